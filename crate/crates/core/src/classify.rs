//! One-vs-rest linear SVM (Pegasos), 1-nearest-neighbor cross-check, and the
//! OA / AA / kappa metrics.

use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::datamodel::{SampleSet, Standardizer};
use crate::error::{Error, Result};
use crate::graph::squared_distance;
use crate::textfmt::{fmt_f64, fmt_list, TextDoc};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    /// Standardize features with training statistics before fitting.
    pub standardize: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            epochs: 200,
            standardize: true,
        }
    }
}

/// `C` linear scorers `w_c·z + b_c` on standardized features
/// `z = (x − mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub mean: Array1<f64>,
    pub scale: Array1<f64>,
    pub lambda: f64,
    pub epochs: usize,
}

impl LinearModel {
    pub fn classes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = x
            .iter()
            .zip(self.mean.iter().zip(self.scale.iter()))
            .map(|(v, (m, s))| (v - m) / s)
            .collect();
        self.weights
            .rows()
            .into_iter()
            .zip(self.biases.iter())
            .map(|(w, b)| w.iter().zip(&z).map(|(a, c)| a * c).sum::<f64>() + b)
            .collect()
    }

    pub fn to_doc(&self) -> TextDoc {
        let mut doc = TextDoc::default();
        doc.push("kind", "linear_svm");
        doc.push("classes", self.classes());
        doc.push("dim", self.dim());
        doc.push("lambda", fmt_f64(self.lambda));
        doc.push("epochs", self.epochs);
        doc.push("biases", fmt_list(&self.biases.to_vec()));
        doc.push("mean", fmt_list(&self.mean.to_vec()));
        doc.push("scale", fmt_list(&self.scale.to_vec()));
        doc.values = self.weights.iter().copied().collect();
        doc
    }

    pub fn from_doc(doc: &TextDoc) -> std::result::Result<Self, String> {
        if doc.get("kind") != Some("linear_svm") {
            return Err("not a linear_svm file".into());
        }
        let c: usize = doc.field("classes")?;
        let d: usize = doc.field("dim")?;
        let (biases, mean, scale) = (doc.list("biases")?, doc.list("mean")?, doc.list("scale")?);
        if biases.len() != c || mean.len() != d || scale.len() != d || doc.values.len() != c * d {
            return Err("inconsistent model sizes".into());
        }
        Ok(Self {
            weights: Array2::from_shape_vec((c, d), doc.values.clone()).map_err(|e| e.to_string())?,
            biases: Array1::from(biases),
            mean: Array1::from(mean),
            scale: Array1::from(scale),
            lambda: doc.field("lambda")?,
            epochs: doc.field("epochs")?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_doc().write(path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_doc(&TextDoc::read(path)?).map_err(|msg| Error::Model {
            path: path.to_path_buf(),
            msg,
        })
    }
}

/// Pegasos for one binary problem: labels `y ∈ {−1, +1}`, bias handled as a
/// regularized constant feature, step `1/(λt)`, projection onto the
/// `1/√λ` ball after each step.
fn pegasos(z: &Array2<f64>, y: &[f64], lambda: f64, epochs: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
    let (n, d) = z.dim();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let radius_sq = 1.0 / lambda;
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    for _ in 0..epochs {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let xi = z.row(i);
            let margin = y[i] * (w.iter().zip(xi.iter()).map(|(a, c)| a * c).sum::<f64>() + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            b *= shrink;
            if margin < 1.0 {
                for (wv, xv) in w.iter_mut().zip(xi.iter()) {
                    *wv += eta * y[i] * xv;
                }
                b += eta * y[i];
            }
            let norm_sq = w.iter().map(|v| v * v).sum::<f64>() + b * b;
            if norm_sq > radius_sq {
                let s = (radius_sq / norm_sq).sqrt();
                w.iter_mut().for_each(|v| *v *= s);
                b *= s;
            }
        }
    }
    (w, b)
}

/// One-vs-rest linear SVM by seeded stochastic subgradient descent.
///
/// Class `c`'s binary problem shuffles with ChaCha8 seeded by `seed` on
/// stream `c`, so the result is independent of how classes are scheduled.
pub fn train_svm(train: &SampleSet, params: &SvmParams, seed: u64) -> Result<LinearModel> {
    if !(params.lambda > 0.0) || !params.lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("svm lambda must be > 0, got {}", params.lambda)));
    }
    let classes = train.classes();
    let present = train.class_counts().iter().filter(|&&n| n > 0).count();
    if classes < 2 || present < 2 {
        return Err(Error::InvalidParameter(
            "linear SVM needs samples from at least 2 classes".into(),
        ));
    }
    let d = train.dim();
    let (mean, scale) = if params.standardize {
        let st = Standardizer::fit(train.features())?;
        (st.mean, st.scale)
    } else {
        (Array1::zeros(d), Array1::ones(d))
    };
    let z = (train.features() - &mean) / &scale;

    let rows: Vec<(Vec<f64>, f64)> = (0..classes)
        .into_par_iter()
        .map(|c| {
            let y: Vec<f64> = train
                .labels()
                .iter()
                .map(|&l| if l == c + 1 { 1.0 } else { -1.0 })
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            pegasos(&z, &y, params.lambda, params.epochs, &mut rng)
        })
        .collect();

    let mut weights = Array2::zeros((classes, d));
    let mut biases = Array1::zeros(classes);
    for (c, (w, b)) in rows.into_iter().enumerate() {
        weights.row_mut(c).assign(&Array1::from(w));
        biases[c] = b;
    }
    Ok(LinearModel {
        weights,
        biases,
        mean,
        scale,
        lambda: params.lambda,
        epochs: params.epochs,
    })
}

/// Index of the largest score; ties go to the lowest index.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Class ids (1-based) by highest score.
pub fn predict(model: &LinearModel, samples: &SampleSet) -> Result<Vec<usize>> {
    if samples.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "samples have {} features, model expects {}",
            samples.dim(),
            model.dim()
        )));
    }
    let x = samples.features();
    Ok((0..samples.len())
        .into_par_iter()
        .map(|i| argmax(&model.scores(x.row(i).as_slice().expect("standard layout"))) + 1)
        .collect())
}

/// Label of the nearest training sample (lowest index on ties).
pub fn predict_1nn(train: &SampleSet, samples: &SampleSet) -> Result<Vec<usize>> {
    if samples.dim() != train.dim() || train.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "1-NN: {} training samples of dim {}, queries of dim {}",
            train.len(),
            train.dim(),
            samples.dim()
        )));
    }
    let tx = train.features();
    let qx = samples.features();
    Ok((0..samples.len())
        .into_par_iter()
        .map(|i| {
            let q = qx.row(i);
            let q = q.as_slice().expect("standard layout");
            let mut best = (f64::INFINITY, 0);
            for j in 0..train.len() {
                let d = squared_distance(q, tx.row(j).as_slice().expect("standard layout"));
                if d < best.0 {
                    best = (d, j);
                }
            }
            train.labels()[best.1]
        })
        .collect())
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: Array2<u64>,
}

impl ConfusionMatrix {
    pub fn new(counts: Array2<u64>) -> Result<Self> {
        if counts.nrows() != counts.ncols() {
            return Err(Error::DimensionMismatch("confusion matrix must be square".into()));
        }
        Ok(Self { counts })
    }

    pub fn from_predictions(truth: &[usize], predicted: &[usize], classes: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} true labels, {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut counts = Array2::zeros((classes, classes));
        for (&t, &p) in truth.iter().zip(predicted) {
            if t == 0 || p == 0 || t > classes || p > classes {
                return Err(Error::InvalidParameter(format!("label outside 1..={classes}")));
            }
            counts[[t - 1, p - 1]] += 1;
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub oa: f64,
    pub aa: f64,
    pub kappa: f64,
}

/// Overall accuracy, average per-class recall, and Cohen's kappa.
pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let c = cm.counts.nrows();
    let total = cm.total();
    if c == 0 || total == 0 {
        return Err(Error::InvalidParameter("empty confusion matrix".into()));
    }
    let n = total as f64;
    let diag: u64 = cm.counts.diag().sum();
    let oa = diag as f64 / n;

    let row_sums: Vec<u64> = cm.counts.rows().into_iter().map(|r| r.sum()).collect();
    let col_sums: Vec<u64> = cm.counts.columns().into_iter().map(|r| r.sum()).collect();
    if let Some(k) = row_sums.iter().position(|&r| r == 0) {
        return Err(Error::InvalidParameter(format!(
            "class {} has no true samples; average accuracy undefined",
            k + 1
        )));
    }
    let aa = (0..c)
        .map(|k| cm.counts[[k, k]] as f64 / row_sums[k] as f64)
        .sum::<f64>()
        / c as f64;

    let pe = row_sums
        .iter()
        .zip(&col_sums)
        .map(|(&r, &s)| r as f64 * s as f64)
        .sum::<f64>()
        / (n * n);
    let kappa = if pe >= 1.0 {
        log::warn!("chance agreement is 1; kappa reported as 0");
        0.0
    } else {
        (oa - pe) / (1.0 - pe)
    };
    Ok(Metrics { oa, aa, kappa })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;

    fn samples(features: Array2<f64>, labels: Vec<usize>) -> SampleSet {
        let n = labels.len();
        let c = *labels.iter().max().unwrap();
        SampleSet::new(features, labels, vec![(0, 0); n], c).unwrap()
    }

    /// Two 2-D blobs whose separating gap along x is at least 2.
    fn separable_blobs(seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Array2::zeros((20, 2));
        let mut labels = Vec::new();
        for i in 0..20 {
            let class = i % 2;
            let x0 = if class == 0 { -1.0 - rng.random_range(0.0..2.0) } else { 1.0 + rng.random_range(0.0..2.0) };
            f[[i, 0]] = x0;
            f[[i, 1]] = rng.random_range(-3.0..3.0);
            labels.push(class + 1);
        }
        samples(f, labels)
    }

    fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
        pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
    }

    #[test]
    fn separable_fixture_is_fit_exactly() {
        let train = separable_blobs(1);
        let params = SvmParams { lambda: 0.01, epochs: 200, standardize: false };
        let model = train_svm(&train, &params, 5).unwrap();
        assert_eq!(accuracy(&predict(&model, &train).unwrap(), train.labels()), 1.0);
        let test = separable_blobs(2);
        assert_eq!(accuracy(&predict(&model, &test).unwrap(), test.labels()), 1.0);
    }

    #[test]
    fn identical_features_predict_majority() {
        let labels: Vec<usize> = (0..20).map(|i| if i < 13 { 1 } else { 2 }).collect();
        let train = samples(Array2::from_elem((20, 3), 0.7), labels);
        let model = train_svm(&train, &SvmParams::default(), 0).unwrap();
        let acc = accuracy(&predict(&model, &train).unwrap(), train.labels());
        assert_eq!(acc, 13.0 / 20.0);
    }

    #[test]
    fn training_is_deterministic() {
        let train = separable_blobs(3);
        let a = train_svm(&train, &SvmParams::default(), 9).unwrap();
        let b = train_svm(&train, &SvmParams::default(), 9).unwrap();
        let bits = |m: &LinearModel| m.weights.iter().chain(m.biases.iter()).map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| train_svm(&train, &SvmParams::default(), 9)).unwrap();
        assert_eq!(bits(&a), bits(&c));
    }

    #[test]
    fn single_class_is_rejected() {
        let train = samples(array![[0.0], [1.0]], vec![1, 1]);
        assert!(train_svm(&train, &SvmParams::default(), 0).is_err());
    }

    fn fixed_model(weights: Array2<f64>, biases: Array1<f64>) -> LinearModel {
        let d = weights.ncols();
        LinearModel { weights, biases, mean: Array1::zeros(d), scale: Array1::ones(d), lambda: 0.01, epochs: 1 }
    }

    #[test]
    fn sign_rule_and_tie_rule() {
        let m = fixed_model(array![[1.0, 2.0], [-1.0, -2.0]], array![0.0, 0.0]);
        let s = samples(array![[1.0, 1.0], [-1.0, 0.0]], vec![1, 2]);
        assert_eq!(predict(&m, &s).unwrap(), vec![1, 2]);
        let zero = fixed_model(Array2::zeros((3, 2)), Array1::zeros(3));
        assert_eq!(predict(&zero, &s).unwrap(), vec![1, 1]);
        let wrong = samples(array![[1.0]], vec![1]);
        assert!(predict(&m, &wrong).is_err());
    }

    #[test]
    fn zero_weight_dimensions_do_not_change_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = Array2::from_shape_fn((3, 2), |_| rng.random_range(-1.0..1.0));
        let m = fixed_model(w.clone(), array![0.1, -0.2, 0.0]);
        let mut wide = Array2::zeros((3, 4));
        wide.slice_mut(ndarray::s![.., ..2]).assign(&w);
        let m4 = fixed_model(wide, m.biases.clone());
        let x = Array2::from_shape_fn((30, 2), |_| rng.random_range(-2.0..2.0));
        let mut x4 = Array2::from_shape_fn((30, 4), |_| rng.random_range(-2.0..2.0));
        x4.slice_mut(ndarray::s![.., ..2]).assign(&x);
        let labels = vec![1; 30];
        assert_eq!(
            predict(&m, &samples(x, labels.clone())).unwrap(),
            predict(&m4, &SampleSet::new(x4, labels, vec![(0, 0); 30], 3).unwrap()).unwrap()
        );
    }

    #[test]
    fn nearest_neighbor_cross_check() {
        let train = samples(array![[0.0], [10.0]], vec![1, 2]);
        let q = samples(array![[1.0], [9.0], [5.0]], vec![1, 2, 1]);
        assert_eq!(predict_1nn(&train, &q).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn model_file_round_trip() {
        let model = train_svm(&separable_blobs(6), &SvmParams::default(), 1).unwrap();
        let back = LinearModel::from_doc(&TextDoc::parse(&model.to_doc().render()).unwrap()).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn confusion_matrix_examples() {
        let m = metrics(&ConfusionMatrix::new(array![[5, 0], [0, 5]]).unwrap()).unwrap();
        assert_eq!((m.oa, m.aa, m.kappa), (1.0, 1.0, 1.0));
        let m = metrics(&ConfusionMatrix::new(array![[2, 2], [2, 2]]).unwrap()).unwrap();
        assert_eq!((m.oa, m.kappa), (0.5, 0.0));
        // p_e = (4·3 + 4·5)/64 = 0.5, kappa = (0.875 − 0.5)/0.5
        let m = metrics(&ConfusionMatrix::new(array![[3, 1], [0, 4]]).unwrap()).unwrap();
        assert_eq!((m.oa, m.aa, m.kappa), (0.875, 0.875, 0.75));
    }

    #[test]
    fn degenerate_confusion_matrices() {
        assert!(metrics(&ConfusionMatrix::new(Array2::zeros((2, 2))).unwrap()).is_err());
        assert!(metrics(&ConfusionMatrix::new(array![[3, 0], [0, 0]]).unwrap()).is_err());
        let m = metrics(&ConfusionMatrix::new(array![[4]]).unwrap()).unwrap();
        assert_eq!(m.kappa, 0.0);
    }

    proptest! {
        #[test]
        fn metric_properties(raw in proptest::collection::vec(0u64..20, 9), perm_seed in any::<u64>()) {
            let mut counts = Array2::from_shape_vec((3, 3), raw).unwrap();
            for k in 0..3 { counts[[k, k]] += 1; }
            let cm = ConfusionMatrix::new(counts.clone()).unwrap();
            let m = metrics(&cm).unwrap();
            prop_assert!((0.0..=1.0).contains(&m.oa));
            prop_assert!(m.kappa <= m.oa + 1e-12);
            let off_zero = (0..3).all(|i| (0..3).all(|j| i == j || counts[[i, j]] == 0));
            prop_assert_eq!((m.kappa - 1.0).abs() < 1e-12, off_zero);

            let mut perm = vec![0usize, 1, 2];
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
            let permuted = Array2::from_shape_fn((3, 3), |(i, j)| counts[[perm[i], perm[j]]]);
            let mp = metrics(&ConfusionMatrix::new(permuted).unwrap()).unwrap();
            prop_assert!((mp.oa - m.oa).abs() < 1e-12);
            prop_assert!((mp.aa - m.aa).abs() < 1e-12);
            prop_assert!((mp.kappa - m.kappa).abs() < 1e-12);
        }
    }
}
