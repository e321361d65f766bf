//! Datasets, centers, factor vectors and the radial transforms.
//!
//! Everything here is a pure function of its inputs; [`Dataset`] values are
//! immutable after construction and safe to share across threads.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::metrics;
use crate::rng;

/// Feature count of the synthetic benchmark dataset.
pub const ARTIFICIAL_FEATURE_COUNT: usize = 15;
/// Number of anomaly-revealing axes (the leading features).
pub const ANOMALY_AXES: usize = 12;
/// Step between anomaly distribution centers on consecutive axes.
pub const ANOMALY_MEAN_STEP: f64 = 0.16;
/// Standard deviation of the anomaly distribution on revealing axes.
pub const ANOMALY_STD_DEV: f64 = 0.4;

/// A labelled dataset: an N x D matrix of real features plus binary labels
/// (1 marks an anomaly) and feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        let (n, d) = features.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidData("dataset must have at least one row and one feature".into()));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {n} rows",
                labels.len()
            )));
        }
        if feature_names.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {d} features",
                feature_names.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidData(format!("labels must be 0 or 1, found {bad}")));
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidData("features contain NaN or infinite values".into()));
        }
        Ok(Self { features, labels, feature_names })
    }

    /// Convenience constructor naming columns `f1..fD`.
    pub fn with_default_names(features: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        let names = (1..=features.ncols()).map(|i| format!("f{i}")).collect();
        Self::new(features, labels, names)
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn anomaly_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let k = self.anomaly_count();
        k > 0 && k < self.n_rows()
    }

    /// New dataset keeping only the listed feature columns (0-based).
    pub fn select_features(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty feature selection".into()));
        }
        let d = self.n_features();
        if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
            return Err(Error::InvalidArgument(format!(
                "feature index {bad} out of range for {d} features"
            )));
        }
        let n = self.n_rows();
        let mut out = Array2::zeros((n, indices.len()));
        for (j, &src) in indices.iter().enumerate() {
            out.column_mut(j).assign(&self.features.column(src));
        }
        let names = indices.iter().map(|&i| self.feature_names[i].clone()).collect();
        Dataset::new(out, self.labels.clone(), names)
    }

    /// Keep only rows with the given label.
    pub fn filter_by_label(&self, label: u8) -> Result<Dataset> {
        let keep: Vec<usize> = (0..self.n_rows()).filter(|&i| self.labels[i] == label).collect();
        if keep.is_empty() {
            return Err(Error::InvalidData(format!("no rows with label {label}")));
        }
        self.take_rows(&keep)
    }

    pub(crate) fn take_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let mut out = Array2::zeros((rows.len(), self.n_features()));
        let mut labels = Vec::with_capacity(rows.len());
        for (dst, &src) in rows.iter().enumerate() {
            out.row_mut(dst).assign(&self.features.row(src));
            labels.push(self.labels[src]);
        }
        Dataset::new(out, labels, self.feature_names.clone())
    }

    /// Per-feature standardisation (mean 0, population std 1) over all rows.
    /// Constant features are left centred but unscaled.
    pub fn zscored(&self) -> Dataset {
        let n = self.n_rows() as f64;
        let mut out = self.features.clone();
        for mut col in out.columns_mut() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = var.sqrt();
            let scale = if std > 1e-12 { 1.0 / std } else { 1.0 };
            col.mapv_inplace(|v| (v - mean) * scale);
        }
        Dataset {
            features: out,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// A D-dimensional point about which all radial operations act.
/// Serialises as a plain JSON array of coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Center {
    coords: Array1<f64>,
}

impl serde::Serialize for Center {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coords.iter())
    }
}

impl<'de> serde::Deserialize<'de> for Center {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Center::new(Vec::<f64>::deserialize(deserializer)?))
    }
}

impl Center {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords: Array1::from(coords) }
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: Array1::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &Array1<f64> {
        &self.coords
    }

    pub fn select(&self, indices: &[usize]) -> Result<Center> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::InvalidArgument(format!(
                "center index {bad} out of range for dim {}",
                self.dim()
            )));
        }
        Ok(Center::new(indices.iter().map(|&i| self.coords[i]).collect()))
    }
}

/// Per-feature strictly positive deformation factors.
/// Serialises as a plain JSON array; deserialisation re-validates positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorVector {
    factors: Array1<f64>,
}

impl serde::Serialize for FactorVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.factors.iter())
    }
}

impl<'de> serde::Deserialize<'de> for FactorVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        FactorVector::new(Vec::<f64>::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl FactorVector {
    pub fn new(factors: Vec<f64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("factor vector must be non-empty".into()));
        }
        if let Some(bad) = factors.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "deformation factors must be finite and > 0, found {bad}"
            )));
        }
        Ok(Self { factors: Array1::from(factors) })
    }

    /// The undeformed factor vector (1, ..., 1).
    pub fn ones(dim: usize) -> Self {
        Self { factors: Array1::ones(dim) }
    }

    pub fn uniform(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.factors
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.factors.to_vec()
    }

    pub fn norm(&self) -> f64 {
        self.factors.iter().map(|f| f * f).sum::<f64>().sqrt()
    }
}

/// How to partition a dataset for training. The training side receives only
/// label-0 rows; anomalies always end up in the test side.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "train_fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        Ok(Self { train_fraction, seed })
    }
}

/// Synthetic benchmark dataset: 15 i.i.d. standard-normal features; the first
/// floor(ratio * n) rows are rewritten on axes 1..=12 with
/// `N((i - 1) * 0.16, 0.4)` for axis i and labelled 1.
///
/// Sampling order is fixed (base matrix column by column, then anomaly
/// overwrites column by column) so a seed pins the exact matrix.
pub fn generate_artificial(n_points: usize, anomaly_ratio: f64, seed: u64) -> Result<Dataset> {
    if n_points < 100 {
        return Err(Error::InvalidArgument(format!(
            "n_points must be at least 100, got {n_points}"
        )));
    }
    if !(anomaly_ratio > 0.0 && anomaly_ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "anomaly_ratio must lie in (0, 1), got {anomaly_ratio}"
        )));
    }
    let n_anomalies = (anomaly_ratio * n_points as f64).floor() as usize;
    let mut rng = rng::rng_from_seed(seed);
    let mut features = Array2::zeros((n_points, ARTIFICIAL_FEATURE_COUNT));
    for j in 0..ARTIFICIAL_FEATURE_COUNT {
        for i in 0..n_points {
            features[[i, j]] = rng::standard_normal(&mut rng);
        }
    }
    for j in 0..ANOMALY_AXES {
        let mean = j as f64 * ANOMALY_MEAN_STEP;
        for i in 0..n_anomalies {
            features[[i, j]] = rng::normal(&mut rng, mean, ANOMALY_STD_DEV);
        }
    }
    let mut labels = vec![0u8; n_points];
    for l in labels.iter_mut().take(n_anomalies) {
        *l = 1;
    }
    Dataset::with_default_names(features, labels)
}

/// Per-feature arithmetic mean over rows matching the filter (all rows when
/// `class_filter` is `None`).
pub fn center_of_mass(data: &Dataset, class_filter: Option<u8>) -> Result<Center> {
    let rows: Vec<usize> = (0..data.n_rows())
        .filter(|&i| class_filter.is_none_or(|c| data.labels()[i] == c))
        .collect();
    if rows.is_empty() {
        return Err(Error::InvalidData("no rows match the class filter".into()));
    }
    let mut sums = vec![0.0; data.n_features()];
    for &i in &rows {
        for (s, v) in sums.iter_mut().zip(data.row(i)) {
            *s += v;
        }
    }
    let inv = 1.0 / rows.len() as f64;
    Ok(Center::new(sums.into_iter().map(|s| s * inv).collect()))
}

/// Euclidean norm of each row relative to the center.
pub fn radii(data: &Dataset, center: &Center) -> Result<Vec<f64>> {
    if center.dim() != data.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "center dim {} vs {} features",
            center.dim(),
            data.n_features()
        )));
    }
    let c = center.coords();
    Ok((0..data.n_rows())
        .map(|i| {
            data.row(i)
                .iter()
                .zip(c.iter())
                .map(|(x, ci)| (x - ci) * (x - ci))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// Per-axis affine map about the center: `x_i -> c_i + f_i * (x_i - c_i)`.
/// Labels are unchanged.
pub fn radial_deform(data: &Dataset, center: &Center, factors: &FactorVector) -> Result<Dataset> {
    let d = data.n_features();
    if center.dim() != d || factors.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "center dim {}, factor dim {} vs {d} features",
            center.dim(),
            factors.dim()
        )));
    }
    let c = center.coords();
    let f = factors.values();
    let mut out = data.features().clone();
    for mut row in out.rows_mut() {
        for j in 0..d {
            row[j] = c[j] + f[j] * (row[j] - c[j]);
        }
    }
    Dataset::new(out, data.labels().to_vec(), data.feature_names().to_vec())
}

/// Uniform radial compression toward the center; `c` must lie in (0, 1).
pub fn compress(data: &Dataset, center: &Center, c: f64) -> Result<Dataset> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "compression factor must lie in (0, 1), got {c}"
        )));
    }
    radial_deform(data, center, &FactorVector::uniform(data.n_features(), c)?)
}

/// Uniform radial expansion away from the center; `e` must exceed 1.
pub fn expand_inputs(data: &Dataset, center: &Center, e: f64) -> Result<Dataset> {
    if !(e > 1.0 && e.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "expansion factor must be finite and > 1, got {e}"
        )));
    }
    radial_deform(data, center, &FactorVector::uniform(data.n_features(), e)?)
}

/// Ratio of average radii between a prediction set and a training set.
pub fn relative_distance(prediction: &Dataset, training: &Dataset, center: &Center) -> Result<f64> {
    let rp = radii(prediction, center)?;
    let rt = radii(training, center)?;
    let mp = rp.iter().sum::<f64>() / rp.len() as f64;
    let mt = rt.iter().sum::<f64>() / rt.len() as f64;
    if mt == 0.0 {
        return Err(Error::InvalidData("training set is concentrated at the center".into()));
    }
    Ok(mp / mt)
}

/// Split into a label-0-only training set and a test set holding the
/// remaining label-0 rows plus every label-1 row. The label-0 rows are
/// shuffled by the seeded generator; anomalies keep their original order.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    SplitSpec::new(spec.train_fraction, spec.seed)?;
    if !data.has_both_classes() {
        return Err(Error::SingleClass("split requires both classes present".into()));
    }
    let mut normal_rows: Vec<usize> =
        (0..data.n_rows()).filter(|&i| data.labels()[i] == 0).collect();
    let anomaly_rows: Vec<usize> =
        (0..data.n_rows()).filter(|&i| data.labels()[i] == 1).collect();
    let mut rng = rng::rng_from_seed(spec.seed);
    rng::shuffle(&mut rng, &mut normal_rows);
    let n_train = (spec.train_fraction * normal_rows.len() as f64).floor() as usize;
    if n_train == 0 || n_train == normal_rows.len() {
        return Err(Error::InvalidArgument(format!(
            "degenerate split: {n_train} of {} normal rows in training",
            normal_rows.len()
        )));
    }
    let train = data.take_rows(&normal_rows[..n_train])?;
    let mut test_rows = normal_rows[n_train..].to_vec();
    test_rows.extend_from_slice(&anomaly_rows);
    let test = data.take_rows(&test_rows)?;
    Ok((train, test))
}

/// Rank features by the AUROC of the single-feature score
/// `|x_i - mean_i(normal rows)|`, descending (ties broken by index).
pub fn feature_auroc_ranking(data: &Dataset) -> Result<Vec<(usize, f64)>> {
    if !data.has_both_classes() {
        return Err(Error::SingleClass("feature ranking requires both classes".into()));
    }
    let normal_center = center_of_mass(data, Some(0))?;
    let c = normal_center.coords();
    let mut ranked: Vec<(usize, f64)> = (0..data.n_features())
        .map(|j| {
            let scores: Vec<f64> = data
                .features()
                .column(j)
                .iter()
                .map(|x| (x - c[j]).abs())
                .collect();
            let a = metrics::auroc(&scores, data.labels()).expect("both classes checked");
            (j, a)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// Binary score per row: 1 when every feature in the 0-based half-open
/// interval is strictly positive.
pub fn positivity_score(data: &Dataset, feature_range: std::ops::Range<usize>) -> Result<Vec<f64>> {
    if feature_range.is_empty() {
        return Err(Error::InvalidArgument("empty feature interval".into()));
    }
    if feature_range.end > data.n_features() {
        return Err(Error::InvalidArgument(format!(
            "feature interval {}..{} out of range for {} features",
            feature_range.start,
            feature_range.end,
            data.n_features()
        )));
    }
    Ok((0..data.n_rows())
        .map(|i| {
            let row = data.row(i);
            let all_positive = feature_range.clone().all(|j| row[j] > 0.0);
            if all_positive {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}
