use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};

/// H×W×D spectral image, stored row-major as (row, col, band).
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    height: usize,
    width: usize,
    bands: usize,
    values: Vec<f64>,
}

impl HyperCube {
    pub fn new(height: usize, width: usize, bands: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || bands == 0 {
            return Err(Error::InvalidParameter(format!(
                "cube dimensions must be positive, got {height}x{width}x{bands}"
            )));
        }
        if values.len() != height * width * bands {
            return Err(Error::DimensionMismatch(format!(
                "{}x{}x{} cube needs {} values, got {}",
                height,
                width,
                bands,
                height * width * bands,
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let band = idx % bands;
            let pixel = idx / bands;
            return Err(Error::NonFinite {
                row: pixel / width,
                col: pixel % width,
                band,
            });
        }
        Ok(Self {
            height,
            width,
            bands,
            values,
        })
    }

    /// Builds a cube from per-band grids (each `height × width`).
    pub fn from_bands(bands: &[Array2<f64>]) -> Result<Self> {
        let first = bands
            .first()
            .ok_or_else(|| Error::InvalidParameter("no bands".into()))?;
        let (h, w) = first.dim();
        let d = bands.len();
        let mut values = vec![0.0; h * w * d];
        for (b, grid) in bands.iter().enumerate() {
            if grid.dim() != (h, w) {
                return Err(Error::DimensionMismatch(format!(
                    "band {b} is {:?}, expected {:?}",
                    grid.dim(),
                    (h, w)
                )));
            }
            for ((r, c), v) in grid.indexed_iter() {
                values[(r * w + c) * d + b] = *v;
            }
        }
        Self::new(h, w, d, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize, band: usize) -> f64 {
        self.values[(row * self.width + col) * self.bands + band]
    }

    /// Spectrum of one pixel.
    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.bands;
        &self.values[start..start + self.bands]
    }

    pub fn band(&self, band: usize) -> Array2<f64> {
        Array2::from_shape_fn((self.height, self.width), |(r, c)| self.get(r, c, band))
    }

    /// Applies `f` to every spectrum in place.
    pub fn map_pixels(&self, mut f: impl FnMut(&mut [f64])) -> Result<Self> {
        let mut values = self.values.clone();
        for px in values.chunks_mut(self.bands) {
            f(px);
        }
        Self::new(self.height, self.width, self.bands, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
    I16,
    U16,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
            Dtype::I16 | Dtype::U16 => 2,
        }
    }
}

impl FromStr for Dtype {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f32" | "float32" => Ok(Dtype::F32),
            "f64" | "float64" => Ok(Dtype::F64),
            "i16" | "int16" => Ok(Dtype::I16),
            "u16" | "uint16" => Ok(Dtype::U16),
            other => Err(format!("unknown dtype '{other}'")),
        }
    }
}

impl fmt::Display for Dtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dtype::F32 => "f32",
            Dtype::F64 => "f64",
            Dtype::I16 => "i16",
            Dtype::U16 => "u16",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

impl FromStr for ByteOrder {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "little" | "le" => Ok(ByteOrder::Little),
            "big" | "be" => Ok(ByteOrder::Big),
            other => Err(format!("unknown byte order '{other}'")),
        }
    }
}

impl fmt::Display for ByteOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ByteOrder::Little => "little",
            ByteOrder::Big => "big",
        })
    }
}

/// Band sequential (`bsq`: band, row, col) or band interleaved by pixel
/// (`bip`: row, col, band).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    Bsq,
    Bip,
}

impl FromStr for Interleave {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsq" => Ok(Interleave::Bsq),
            "bip" => Ok(Interleave::Bip),
            other => Err(format!("unknown interleave '{other}'")),
        }
    }
}

impl fmt::Display for Interleave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interleave::Bsq => "bsq",
            Interleave::Bip => "bip",
        })
    }
}

/// Parsed `key: value` cube header.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeHeader {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub dtype: Dtype,
    pub byte_order: ByteOrder,
    pub interleave: Interleave,
    /// Payload location, resolved relative to the header's directory.
    pub data_file: PathBuf,
}

impl CubeHeader {
    pub fn payload_bytes(&self) -> u64 {
        (self.height * self.width * self.bands * self.dtype.size()) as u64
    }

    fn render(&self, data_file_name: &str) -> String {
        format!(
            "height: {}\nwidth: {}\nbands: {}\ndtype: {}\nbyte_order: {}\ninterleave: {}\ndata_file: {}\n",
            self.height,
            self.width,
            self.bands,
            self.dtype,
            self.byte_order,
            self.interleave,
            data_file_name
        )
    }
}

fn default_payload_path(header_path: &Path) -> PathBuf {
    header_path.with_extension("raw")
}

/// Reads and validates a cube header without touching the payload.
///
/// Required keys: `height`, `width`, `bands`, `dtype`. Optional: `byte_order`
/// (default little), `interleave` (default bsq), `data_file` (default: the
/// header path with a `.raw` extension). Blank lines and `#` comments are
/// ignored.
pub fn read_header(header_path: &Path) -> Result<CubeHeader> {
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let bad = |msg: String| Error::Header {
        path: header_path.to_path_buf(),
        msg,
    };

    let mut height = None;
    let mut width = None;
    let mut bands = None;
    let mut dtype = None;
    let mut byte_order = ByteOrder::Little;
    let mut interleave = Interleave::Bsq;
    let mut data_file = None;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| bad(format!("line {}: expected 'key: value'", lineno + 1)))?;
        let value = value.trim();
        let parse_dim = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| bad(format!("line {}: '{v}' is not a count", lineno + 1)))
        };
        match key.trim().to_ascii_lowercase().as_str() {
            "height" | "lines" => height = Some(parse_dim(value)?),
            "width" | "samples" => width = Some(parse_dim(value)?),
            "bands" => bands = Some(parse_dim(value)?),
            "dtype" => dtype = Some(value.parse::<Dtype>().map_err(bad)?),
            "byte_order" => byte_order = value.parse().map_err(bad)?,
            "interleave" => interleave = value.parse().map_err(bad)?,
            "data_file" => data_file = Some(PathBuf::from(value)),
            other => log::debug!("ignoring header key '{other}'"),
        }
    }

    let height = height.ok_or_else(|| bad("missing 'height'".into()))?;
    let width = width.ok_or_else(|| bad("missing 'width'".into()))?;
    let bands = bands.ok_or_else(|| bad("missing 'bands'".into()))?;
    let dtype = dtype.ok_or_else(|| bad("missing 'dtype'".into()))?;
    if height == 0 || width == 0 || bands == 0 {
        return Err(bad(format!("dimensions must be positive: {height}x{width}x{bands}")));
    }
    let data_file = match data_file {
        Some(p) if p.is_absolute() => p,
        Some(p) => header_path.parent().unwrap_or(Path::new("")).join(p),
        None => default_payload_path(header_path),
    };
    Ok(CubeHeader {
        height,
        width,
        bands,
        dtype,
        byte_order,
        interleave,
        data_file,
    })
}

fn decode(bytes: &[u8], dtype: Dtype, order: ByteOrder) -> f64 {
    macro_rules! conv {
        ($t:ty, $n:expr) => {{
            let mut buf = [0u8; $n];
            buf.copy_from_slice(bytes);
            match order {
                ByteOrder::Little => <$t>::from_le_bytes(buf) as f64,
                ByteOrder::Big => <$t>::from_be_bytes(buf) as f64,
            }
        }};
    }
    match dtype {
        Dtype::F32 => conv!(f32, 4),
        Dtype::F64 => conv!(f64, 8),
        Dtype::I16 => conv!(i16, 2),
        Dtype::U16 => conv!(u16, 2),
    }
}

fn encode(value: f64, dtype: Dtype, order: ByteOrder, out: &mut Vec<u8>) {
    macro_rules! conv {
        ($v:expr) => {
            match order {
                ByteOrder::Little => out.extend_from_slice(&$v.to_le_bytes()),
                ByteOrder::Big => out.extend_from_slice(&$v.to_be_bytes()),
            }
        };
    }
    match dtype {
        Dtype::F32 => conv!(value as f32),
        Dtype::F64 => conv!(value),
        Dtype::I16 => conv!(value.round() as i16),
        Dtype::U16 => conv!(value.round() as u16),
    }
}

/// Loads a cube from its header/raw-payload pair.
pub fn load_cube(header_path: impl AsRef<Path>) -> Result<HyperCube> {
    let header = read_header(header_path.as_ref())?;
    let payload = fs::read(&header.data_file).map_err(|e| Error::io(&header.data_file, e))?;
    let expected = header.payload_bytes();
    if payload.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: payload.len() as u64,
        });
    }

    let (h, w, d) = (header.height, header.width, header.bands);
    let size = header.dtype.size();
    let mut values = vec![0.0; h * w * d];
    for (i, chunk) in payload.chunks_exact(size).enumerate() {
        let dest = match header.interleave {
            Interleave::Bip => i,
            Interleave::Bsq => {
                let band = i / (h * w);
                let pixel = i % (h * w);
                pixel * d + band
            }
        };
        values[dest] = decode(chunk, header.dtype, header.byte_order);
    }
    HyperCube::new(h, w, d, values)
}

/// Writes `cube` as a header plus a raw payload next to it
/// (`<header stem>.raw`).
pub fn write_cube(
    cube: &HyperCube,
    header_path: impl AsRef<Path>,
    dtype: Dtype,
    byte_order: ByteOrder,
    interleave: Interleave,
) -> Result<()> {
    let header_path = header_path.as_ref();
    let data_file = default_payload_path(header_path);
    let header = CubeHeader {
        height: cube.height,
        width: cube.width,
        bands: cube.bands,
        dtype,
        byte_order,
        interleave,
        data_file: data_file.clone(),
    };

    let mut payload = Vec::with_capacity(header.payload_bytes() as usize);
    match interleave {
        Interleave::Bip => {
            for &v in &cube.values {
                encode(v, dtype, byte_order, &mut payload);
            }
        }
        Interleave::Bsq => {
            for b in 0..cube.bands {
                for px in cube.values.chunks_exact(cube.bands) {
                    encode(px[b], dtype, byte_order, &mut payload);
                }
            }
        }
    }

    let name = data_file
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    fs::write(header_path, header.render(&name)).map_err(|e| Error::io(header_path, e))?;
    fs::write(&data_file, payload).map_err(|e| Error::io(&data_file, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_pair(dir: &Path, header: &str, payload: &[u8]) -> PathBuf {
        let hdr = dir.join("cube.hdr");
        fs::write(&hdr, header).unwrap();
        fs::write(dir.join("cube.raw"), payload).unwrap();
        hdr
    }

    #[test]
    fn loads_declared_layout() {
        let dir = tempfile::tempdir().unwrap();
        let payload: Vec<u8> = [1.0f32, 2.0, 3.0, 4.0]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        assert_eq!(payload.len(), 16);
        let hdr = write_pair(
            dir.path(),
            "height: 2\nwidth: 2\nbands: 1\ndtype: f32\nbyte_order: little\n",
            &payload,
        );
        let cube = load_cube(&hdr).unwrap();
        assert_eq!((cube.height(), cube.width(), cube.bands()), (2, 2, 1));
        assert_eq!(cube.values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let hdr = write_pair(
            dir.path(),
            "height: 3\nwidth: 3\nbands: 2\ndtype: f32\n",
            &[0u8; 70],
        );
        match load_cube(&hdr) {
            Err(Error::SizeMismatch { expected, actual }) => {
                assert_eq!((expected, actual), (72, 70));
            }
            other => panic!("expected size mismatch, got {other:?}"),
        }
    }

    #[test]
    fn missing_payload_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let hdr = dir.path().join("cube.hdr");
        fs::write(&hdr, "height: 1\nwidth: 1\nbands: 1\ndtype: f64\n").unwrap();
        assert!(matches!(load_cube(&hdr), Err(Error::Io { .. })));
    }

    #[test]
    fn non_finite_names_first_index() {
        let dir = tempfile::tempdir().unwrap();
        let vals = [0.0f64, 1.0, 2.0, f64::NAN, 4.0, f64::INFINITY];
        let payload: Vec<u8> = vals.iter().flat_map(|v| v.to_le_bytes()).collect();
        // bsq 1x3x2: index 3 is band 1, pixel 0
        let hdr = write_pair(
            dir.path(),
            "height: 1\nwidth: 3\nbands: 2\ndtype: f64\ninterleave: bsq\n",
            &payload,
        );
        match load_cube(&hdr) {
            Err(Error::NonFinite { row, col, band }) => assert_eq!((row, col, band), (0, 0, 1)),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn big_endian_and_integer_types() {
        let dir = tempfile::tempdir().unwrap();
        let payload: Vec<u8> = [-3i16, 7].iter().flat_map(|v| v.to_be_bytes()).collect();
        let hdr = write_pair(
            dir.path(),
            "height: 1\nwidth: 1\nbands: 2\ndtype: i16\nbyte_order: big\ninterleave: bip\n",
            &payload,
        );
        assert_eq!(load_cube(&hdr).unwrap().pixel(0, 0), &[-3.0, 7.0]);
    }

    #[test]
    fn bsq_and_bip_agree() {
        let dir = tempfile::tempdir().unwrap();
        let cube = HyperCube::new(2, 3, 2, (0..12).map(f64::from).collect()).unwrap();
        let a = dir.path().join("a.hdr");
        let b = dir.path().join("b.hdr");
        write_cube(&cube, &a, Dtype::U16, ByteOrder::Big, Interleave::Bsq).unwrap();
        write_cube(&cube, &b, Dtype::F32, ByteOrder::Little, Interleave::Bip).unwrap();
        assert_eq!(load_cube(&a).unwrap(), cube);
        assert_eq!(load_cube(&b).unwrap(), cube);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn f64_round_trip_is_bit_exact(
            h in 1usize..5, w in 1usize..5, d in 1usize..4,
            seed in any::<u64>(),
            bip in any::<bool>(), big in any::<bool>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..h * w * d).map(|_| rng.random_range(-1e6..1e6)).collect();
            let cube = HyperCube::new(h, w, d, vals).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let hdr = dir.path().join("c.hdr");
            let il = if bip { Interleave::Bip } else { Interleave::Bsq };
            let bo = if big { ByteOrder::Big } else { ByteOrder::Little };
            write_cube(&cube, &hdr, Dtype::F64, bo, il).unwrap();
            let back = load_cube(&hdr).unwrap();
            prop_assert_eq!(back.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            cube.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!((back.height(), back.width(), back.bands()), (h, w, d));
        }
    }
}
