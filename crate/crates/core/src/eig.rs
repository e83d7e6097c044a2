//! Symmetric eigensolver (cyclic Jacobi), Cholesky factorization, and the
//! symmetric-definite generalized eigenproblem `A v = λ B v` that yields the
//! projection basis.

use std::path::Path;

use ndarray::{s, Array1, Array2};

use crate::datamodel::SampleSet;
use crate::error::{Error, Result};
use crate::textfmt::{fmt_f64, fmt_list, TextDoc};

const SYMMETRY_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 100;

/// Initial relative jitter added to the diagonal of `B`, and its ceiling.
pub const JITTER_START: f64 = 1e-8;
pub const JITTER_MAX: f64 = 1e-2;

fn check_square(m: &Array2<f64>, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c || r == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be a nonempty square matrix, got {r}x{c}"
        )));
    }
    Ok(r)
}

/// Largest `|m_ij - m_ji|` relative to `max(1, |m_ij|)`.
pub fn asymmetry(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = (m[[i, j]] - m[[j, i]]).abs() / m[[i, j]].abs().max(1.0);
            worst = worst.max(d);
        }
    }
    worst
}

fn check_symmetric(m: &Array2<f64>, what: &str) -> Result<usize> {
    let n = check_square(m, what)?;
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL || m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(n)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns. Each eigenvector's largest-magnitude entry is
/// made positive (first such entry on ties).
pub fn sym_eig(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = check_symmetric(m, "sym_eig input")?;

    // Upper triangle of `a` holds the working matrix; lower triangle is unused.
    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(0.5 * (m[[i, j]] + m[[j, i]]));
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut converged = n == 1;
    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            converged = true;
            break;
        }
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;

                let rotate = |a: &mut [f64], i: usize, j: usize, k: usize, l: usize| {
                    let g = a[i * n + j];
                    let h = a[k * n + l];
                    a[i * n + j] = g - sn * (h + g * tau);
                    a[k * n + l] = h + sn * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, j, p, j, q);
                }
                for j in p + 1..q {
                    rotate(&mut a, p, j, j, q);
                }
                for j in q + 1..n {
                    rotate(&mut a, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    if !converged {
        log::warn!("Jacobi eigensolver hit {MAX_SWEEPS} sweeps without full convergence");
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));

    let values = Array1::from_iter(order.iter().map(|&i| d[i]));
    let mut vectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        let mut pivot = 0;
        for r in 0..n {
            if v[r * n + k].abs() > v[pivot * n + k].abs() {
                pivot = r;
            }
        }
        let sign = if v[pivot * n + k] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[[r, col]] = sign * v[r * n + k];
        }
    }
    Ok((values, vectors))
}

/// Lower-triangular `L` with `L Lᵀ = m`, or `None` if `m` is not numerically
/// positive definite.
pub fn cholesky(m: &Array2<f64>) -> Option<Array2<f64>> {
    let n = m.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut diag = m[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in j + 1..n {
            let mut sum = m[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = sum / ljj;
        }
    }
    Some(l)
}

/// Solves `L X = rhs` column by column (forward substitution).
fn forward_solve(l: &Array2<f64>, rhs: &Array2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let mut x = rhs.clone();
    for col in 0..x.ncols() {
        for i in 0..n {
            let mut sum = x[[i, col]];
            for k in 0..i {
                sum -= l[[i, k]] * x[[k, col]];
            }
            x[[i, col]] = sum / l[[i, i]];
        }
    }
    x
}

/// Solves `Lᵀ X = rhs` column by column (back substitution).
fn back_solve_transposed(l: &Array2<f64>, rhs: &Array2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let mut x = rhs.clone();
    for col in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut sum = x[[i, col]];
            for k in i + 1..n {
                sum -= l[[k, i]] * x[[k, col]];
            }
            x[[i, col]] = sum / l[[i, i]];
        }
    }
    x
}

/// Projection basis from a generalized eigenproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// D×d, columns are generalized eigenvectors in descending eigenvalue order.
    pub basis: Array2<f64>,
    pub eigenvalues: Array1<f64>,
    /// Relative jitter `τ` that made `B` factorizable.
    pub tau: f64,
    /// Absolute diagonal shift `τ·trace(B)/D` actually added to `B`.
    pub jitter: f64,
}

impl Projection {
    pub fn input_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Identity-free check of the column invariants.
    fn validate(&self) -> Result<()> {
        let (dd, d) = self.basis.dim();
        if d == 0 || d > dd || self.eigenvalues.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "projection basis {dd}x{d} with {} eigenvalues",
                self.eigenvalues.len()
            )));
        }
        Ok(())
    }

    /// Keeps the leading `d` directions.
    pub fn truncate(&self, d: usize) -> Result<Projection> {
        if d == 0 || d > self.output_dim() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate a {}-column projection to {d}",
                self.output_dim()
            )));
        }
        Ok(Projection {
            basis: self.basis.slice(s![.., ..d]).to_owned(),
            eigenvalues: self.eigenvalues.slice(s![..d]).to_owned(),
            tau: self.tau,
            jitter: self.jitter,
        })
    }

    pub fn apply(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        if features.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "features have {} columns, projection expects {}",
                features.ncols(),
                self.input_dim()
            )));
        }
        Ok(features.dot(&self.basis))
    }

    pub fn to_doc(&self) -> TextDoc {
        let mut doc = TextDoc::default();
        doc.push("kind", "projection");
        doc.push("input_dim", self.input_dim());
        doc.push("output_dim", self.output_dim());
        doc.push("tau", fmt_f64(self.tau));
        doc.push("jitter", fmt_f64(self.jitter));
        doc.push("eigenvalues", fmt_list(self.eigenvalues.as_slice().unwrap_or(&[])));
        doc.values = self.basis.t().iter().copied().collect();
        doc
    }

    pub fn from_doc(doc: &TextDoc) -> std::result::Result<Projection, String> {
        if doc.get("kind") != Some("projection") {
            return Err("not a projection file".into());
        }
        let dd: usize = doc.field("input_dim")?;
        let d: usize = doc.field("output_dim")?;
        let eigenvalues = doc.list("eigenvalues")?;
        if doc.values.len() != dd * d || eigenvalues.len() != d {
            return Err(format!(
                "expected {} basis values and {d} eigenvalues, found {} and {}",
                dd * d,
                doc.values.len(),
                eigenvalues.len()
            ));
        }
        // column-major on disk
        let basis = Array2::from_shape_vec((d, dd), doc.values.clone())
            .map_err(|e| e.to_string())?
            .reversed_axes()
            .as_standard_layout()
            .to_owned();
        let p = Projection {
            basis,
            eigenvalues: Array1::from(eigenvalues),
            tau: doc.field("tau")?,
            jitter: doc.field("jitter")?,
        };
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_doc().write(path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Projection> {
        let path = path.as_ref();
        Projection::from_doc(&TextDoc::read(path)?).map_err(|msg| Error::Model {
            path: path.to_path_buf(),
            msg,
        })
    }
}

/// Top-`d` solutions of `A v = λ B v` for symmetric `A` and symmetric PSD `B`.
///
/// `B` is conditioned as `B + τ·trace(B)/D·I`, starting at `τ = 1e-8` and
/// growing ×10 up to `1e-2` until a Cholesky factor `L` exists. The standard
/// problem `L⁻¹ A L⁻ᵀ q = λ q` is then solved and `v = L⁻ᵀ q`, so the
/// returned columns are orthonormal in the conditioned `B` inner product.
pub fn solve_pencil(a: &Array2<f64>, b: &Array2<f64>, d: usize) -> Result<Projection> {
    let n = check_symmetric(a, "pencil matrix A")?;
    let nb = check_symmetric(b, "pencil matrix B")?;
    if n != nb {
        return Err(Error::DimensionMismatch(format!(
            "pencil matrices are {n}x{n} and {nb}x{nb}"
        )));
    }
    if d == 0 || d > n {
        return Err(Error::InvalidParameter(format!(
            "target dimension {d} outside 1..={n}"
        )));
    }

    let trace = b.diag().sum();
    let scale = if trace > 0.0 { trace / n as f64 } else { 1.0 };
    let mut tau = JITTER_START;
    let (l, tau) = loop {
        let mut bc = b.clone();
        bc.diag_mut().mapv_inplace(|x| x + tau * scale);
        if let Some(l) = cholesky(&bc) {
            break (l, tau);
        }
        if tau >= JITTER_MAX * (1.0 - 1e-9) {
            let min_eigenvalue = sym_eig(b)
                .map(|(vals, _)| vals[n - 1])
                .unwrap_or(f64::NAN);
            return Err(Error::Cholesky { min_eigenvalue });
        }
        tau *= 10.0;
    };
    if tau > JITTER_START {
        log::info!("pencil B conditioned with tau = {tau:e}");
    }

    // C = L⁻¹ A L⁻ᵀ
    let y = forward_solve(&l, a);
    let mut c = forward_solve(&l, &y.t().to_owned());
    let ct = c.t().to_owned();
    c = (&c + &ct) * 0.5;

    let (vals, q) = sym_eig(&c)?;
    let q_top = q.slice(s![.., ..d]).to_owned();
    let basis = back_solve_transposed(&l, &q_top);
    Ok(Projection {
        basis,
        eigenvalues: vals.slice(s![..d]).to_owned(),
        tau,
        jitter: tau * scale,
    })
}

/// Projects every sample: `x ↦ Vᵀ x`.
pub fn project(samples: &SampleSet, proj: &Projection) -> Result<SampleSet> {
    samples.with_features(proj.apply(samples.features())?)
}
