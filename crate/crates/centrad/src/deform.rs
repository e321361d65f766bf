//! Supervised radial-deformation optimizers.
//!
//! Three searchers over per-axis deformation factors: a greedy digit search
//! (magnitude order, then leading digit, then signed digit corrections), a
//! gradient ascent over hyperspherical angles on the radius-sqrt(D) factor
//! sphere, and a basin-hopping baseline driven by the fraud-rank-sum
//! objective. Scalar multiples of a factor vector are equivalent, so all
//! scoring happens on squared deformed radii.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{Center, Dataset, FactorVector};
use crate::error::{Error, Result};
use crate::metrics;
use crate::rng;

/// FPR target used by the optimizer-comparison traces.
pub const COMPARISON_FPR: f64 = 0.002;

/// Positivity floor for factors during ascent and basin hopping.
pub const FACTOR_FLOOR: f64 = 1e-6;

/// Scoring function maximised by the optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFn {
    #[default]
    Auroc,
    /// Negated fraud rank sum, so that higher stays better.
    NegRankSum,
}

/// Precomputed squared deviations for fast factor scoring: deformed squared
/// radii are `sq_dev . f^2`, and every metric here is invariant under the
/// monotone radii -> radii^2 map.
pub struct RadialScorer {
    sq_dev: Array2<f64>,
    labels: Vec<u8>,
}

impl RadialScorer {
    pub fn new(data: &Dataset, center: &Center) -> Result<Self> {
        if center.dim() != data.n_features() {
            return Err(Error::DimensionMismatch(format!(
                "center dim {} vs {} features",
                center.dim(),
                data.n_features()
            )));
        }
        if !data.has_both_classes() {
            return Err(Error::SingleClass("scoring requires both classes".into()));
        }
        let c = center.coords();
        let mut sq_dev = data.features().clone();
        for mut row in sq_dev.rows_mut() {
            for (v, ci) in row.iter_mut().zip(c.iter()) {
                let d = *v - ci;
                *v = d * d;
            }
        }
        Ok(Self { sq_dev, labels: data.labels().to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.sq_dev.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.sq_dev.nrows()
    }

    /// Squared radii of the deformed rows.
    pub fn deformed_radii_sq(&self, factors: &Array1<f64>) -> Vec<f64> {
        let f_sq = factors.mapv(|f| f * f);
        self.sq_dev.dot(&f_sq).to_vec()
    }

    pub fn auroc(&self, factors: &Array1<f64>) -> f64 {
        metrics::auroc(&self.deformed_radii_sq(factors), &self.labels)
            .expect("scorer holds both classes and finite values")
    }

    pub fn rank_sum(&self, factors: &Array1<f64>) -> f64 {
        metrics::fraud_rank_sum(&self.deformed_radii_sq(factors), &self.labels)
            .expect("scorer holds both classes and finite values")
    }

    pub fn tpr_at(&self, factors: &Array1<f64>, fpr_target: f64) -> Result<f64> {
        let curve = metrics::roc_curve(&self.deformed_radii_sq(factors), &self.labels)?;
        metrics::tpr_at_fpr(&curve, fpr_target)
    }

    pub fn score(&self, factors: &Array1<f64>, kind: ScoreFn) -> f64 {
        match kind {
            ScoreFn::Auroc => self.auroc(factors),
            ScoreFn::NegRankSum => -self.rank_sum(factors),
        }
    }

    /// Row-subset scorer. Indices must be sorted and in range; both classes
    /// must survive the selection.
    fn subset(&self, rows: &[usize]) -> Result<RadialScorer> {
        let mut sq_dev = Array2::zeros((rows.len(), self.dim()));
        let mut labels = Vec::with_capacity(rows.len());
        for (dst, &src) in rows.iter().enumerate() {
            sq_dev.row_mut(dst).assign(&self.sq_dev.row(src));
            labels.push(self.labels[src]);
        }
        if !labels.contains(&1) || !labels.contains(&0) {
            return Err(Error::SingleClass("subsample lost a class".into()));
        }
        Ok(RadialScorer { sq_dev, labels })
    }
}

/// One accepted improvement during an optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub elapsed_s: f64,
    pub score: f64,
    pub factors: Vec<f64>,
}

/// Greedy digit-search settings. `digits` counts significant digits of each
/// factor including the leading one (leading zeros excluded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub digits: usize,
    pub passes: usize,
    pub score: ScoreFn,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self { digits: 3, passes: 2, score: ScoreFn::Auroc }
    }
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub factors: FactorVector,
    pub score: f64,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
}

/// Axis-by-axis factor search. For each axis: find the best magnitude order
/// (upward 10, 100, ... then, when nothing helped, downward 0.1, 0.01, ...),
/// then the leading digit at that order, then signed digit corrections at
/// each lower order. Candidates are accepted only on strict score
/// improvement, so the score trace never decreases. Passes continue from the
/// factors of the previous pass.
pub fn greedy_factor_search(
    data: &Dataset,
    center: &Center,
    cfg: &GreedyConfig,
    initial: &FactorVector,
) -> Result<GreedyResult> {
    if cfg.digits < 1 {
        return Err(Error::InvalidArgument("digits must be at least 1".into()));
    }
    if cfg.passes < 1 {
        return Err(Error::InvalidArgument("passes must be at least 1".into()));
    }
    if initial.dim() != data.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "initial factor dim {} vs {} features",
            initial.dim(),
            data.n_features()
        )));
    }
    let scorer = RadialScorer::new(data, center)?;
    let start = Instant::now();
    let mut factors = initial.values().clone();
    let mut best = scorer.score(&factors, cfg.score);
    let mut evaluations = 0usize;
    let mut trace = vec![TracePoint {
        iteration: 0,
        elapsed_s: 0.0,
        score: best,
        factors: factors.to_vec(),
    }];

    // evaluates one candidate value for axis `i`; accepts on strict improvement
    let try_value = |factors: &mut Array1<f64>,
                         best: &mut f64,
                         evaluations: &mut usize,
                         trace: &mut Vec<TracePoint>,
                         i: usize,
                         value: f64|
     -> bool {
        if !(value.is_finite() && value > 0.0) {
            return false;
        }
        let previous = factors[i];
        factors[i] = value;
        let s = scorer.score(factors, cfg.score);
        *evaluations += 1;
        if s > *best {
            *best = s;
            trace.push(TracePoint {
                iteration: *evaluations,
                elapsed_s: start.elapsed().as_secs_f64(),
                score: s,
                factors: factors.to_vec(),
            });
            true
        } else {
            factors[i] = previous;
            false
        }
    };

    for _pass in 0..cfg.passes {
        for i in 0..scorer.dim() {
            // magnitude order, upward first
            let mut order: i32 = 0;
            while try_value(&mut factors, &mut best, &mut evaluations, &mut trace, i, 10f64.powi(order + 1))
            {
                order += 1;
            }
            if order == 0 {
                while try_value(
                    &mut factors,
                    &mut best,
                    &mut evaluations,
                    &mut trace,
                    i,
                    10f64.powi(order - 1),
                ) {
                    order -= 1;
                }
            }
            // leading digit at the found order
            let scale = 10f64.powi(order);
            for d in 1..10 {
                let value = d as f64 * scale;
                if value == factors[i] {
                    continue;
                }
                if !try_value(&mut factors, &mut best, &mut evaluations, &mut trace, i, value) {
                    break;
                }
            }
            // signed digit corrections at each lower order, one digit per order
            let mut digit_order = order;
            for _ in 1..cfg.digits {
                digit_order -= 1;
                let step = 10f64.powi(digit_order);
                let base = factors[i];
                for d in 1..10 {
                    if !try_value(
                        &mut factors,
                        &mut best,
                        &mut evaluations,
                        &mut trace,
                        i,
                        base + d as f64 * step,
                    ) {
                        break;
                    }
                }
                let base = factors[i];
                for d in 1..10 {
                    let value = base - d as f64 * step;
                    if value <= 0.0 {
                        break;
                    }
                    if !try_value(&mut factors, &mut best, &mut evaluations, &mut trace, i, value) {
                        break;
                    }
                }
            }
        }
    }
    debug_assert!(trace.windows(2).all(|w| w[0].score <= w[1].score));
    Ok(GreedyResult {
        factors: FactorVector::new(factors.to_vec())?,
        score: best,
        trace,
        evaluations,
    })
}

/// Point on the positive orthant of the radius-sqrt(D) factor hypersphere,
/// held as D-1 hyperspherical angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularState {
    angles: Vec<f64>,
    dim: usize,
}

impl AngularState {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        (self.dim as f64).sqrt()
    }
}

/// Hyperspherical angles of a positive factor vector. The map only sees the
/// direction, so any positive multiple of `f` yields the same state.
pub fn factors_to_angles(factors: &FactorVector) -> Result<AngularState> {
    let f = factors.values();
    let d = f.len();
    let norm = factors.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidArgument(format!("factor norm {norm} out of range")));
    }
    let mut angles = Vec::with_capacity(d.saturating_sub(1));
    if d >= 2 {
        let mut tail_sq: Vec<f64> = vec![0.0; d + 1];
        for k in (0..d).rev() {
            tail_sq[k] = tail_sq[k + 1] + f[k] * f[k];
        }
        for k in 0..d - 2 {
            angles.push((f[k] / tail_sq[k].sqrt()).clamp(-1.0, 1.0).acos());
        }
        angles.push(f[d - 1].atan2(f[d - 2]));
    }
    Ok(AngularState { angles, dim: d })
}

/// Factor vector on the radius-sqrt(D) sphere described by the angles.
/// Non-positive reconstructions (possible only for out-of-orthant angles)
/// are floored at [`FACTOR_FLOOR`].
pub fn angles_to_factors(state: &AngularState) -> FactorVector {
    let d = state.dim;
    let mut f = vec![0.0; d];
    let mut sin_prod = state.radius();
    for k in 0..d.saturating_sub(1) {
        f[k] = sin_prod * state.angles[k].cos();
        sin_prod *= state.angles[k].sin();
    }
    f[d - 1] = sin_prod;
    for v in f.iter_mut() {
        if !(*v > FACTOR_FLOOR) {
            *v = FACTOR_FLOOR;
        }
    }
    FactorVector::new(f).expect("floored factors are positive")
}

/// Angular gradient ascent settings. One epoch estimates the score gradient
/// for every angle by central finite differences (step `fd_step` radians)
/// and takes one `step_size` step along it. The defaults are declared, not
/// taken from any reference: AUROC is piecewise constant in the factors, so
/// `fd_step` must be large enough to cross rank boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub epochs: usize,
    pub step_size: f64,
    pub fd_step: f64,
    /// Optional row fraction (0, 1] scored during gradient estimation.
    pub subsample: Option<f64>,
    pub seed: u64,
    pub score: ScoreFn,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            epochs: 15,
            step_size: 0.1,
            fd_step: 0.05,
            subsample: None,
            seed: 0,
            score: ScoreFn::Auroc,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AscentResult {
    pub factors: FactorVector,
    pub score: f64,
    /// Full-set score after each epoch (entry 0 is the initial state).
    pub trace: Vec<TracePoint>,
}

/// Gradient ascent over the factor hypersphere. Gradients may be estimated
/// on a seeded stratified row subsample; the per-epoch trace and the
/// returned best state are always scored on the full set, and the best
/// state seen (including the initial one) is returned.
pub fn angular_ascent(
    data: &Dataset,
    center: &Center,
    cfg: &AscentConfig,
    initial: &FactorVector,
) -> Result<AscentResult> {
    if cfg.epochs < 1 {
        return Err(Error::InvalidArgument("epochs must be at least 1".into()));
    }
    if !(cfg.step_size > 0.0 && cfg.fd_step > 0.0) {
        return Err(Error::InvalidArgument("step_size and fd_step must be positive".into()));
    }
    if let Some(s) = cfg.subsample {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "subsample fraction must lie in (0, 1], got {s}"
            )));
        }
    }
    if initial.dim() != data.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "initial factor dim {} vs {} features",
            initial.dim(),
            data.n_features()
        )));
    }
    let scorer = RadialScorer::new(data, center)?;
    let start = Instant::now();
    let mut state = factors_to_angles(initial)?;
    let n_angles = state.angles.len();

    let mut current = angles_to_factors(&state);
    let mut best_factors = current.clone();
    let mut best_score = scorer.score(current.values(), cfg.score);
    let mut trace = vec![TracePoint {
        iteration: 0,
        elapsed_s: 0.0,
        score: best_score,
        factors: current.to_vec(),
    }];
    let mut rng = rng::rng_from_seed(cfg.seed);

    for epoch in 0..cfg.epochs {
        // seeded stratified subsample; indices sorted so that fraction 1.0
        // reproduces the full-set path exactly
        let sub_scorer;
        let grad_scorer: &RadialScorer = match cfg.subsample {
            Some(s) if s < 1.0 => {
                let rows = stratified_rows(&scorer.labels, s, &mut rng);
                sub_scorer = scorer.subset(&rows)?;
                &sub_scorer
            }
            _ => &scorer,
        };
        let mut gradient = vec![0.0; n_angles];
        for (j, g) in gradient.iter_mut().enumerate() {
            let mut plus = state.clone();
            plus.angles[j] += cfg.fd_step;
            let mut minus = state.clone();
            minus.angles[j] -= cfg.fd_step;
            let s_plus = grad_scorer.score(angles_to_factors(&plus).values(), cfg.score);
            let s_minus = grad_scorer.score(angles_to_factors(&minus).values(), cfg.score);
            *g = (s_plus - s_minus) / (2.0 * cfg.fd_step);
        }
        for (a, g) in state.angles.iter_mut().zip(&gradient) {
            *a += cfg.step_size * g;
        }
        // positivity projection: floor factors, renormalise onto the sphere
        let stepped = angles_to_factors(&state);
        state = factors_to_angles(&stepped)?;
        current = angles_to_factors(&state);

        let full = scorer.score(current.values(), cfg.score);
        trace.push(TracePoint {
            iteration: epoch + 1,
            elapsed_s: start.elapsed().as_secs_f64(),
            score: full,
            factors: current.to_vec(),
        });
        if full > best_score {
            best_score = full;
            best_factors = current.clone();
        }
    }
    Ok(AscentResult { factors: best_factors, score: best_score, trace })
}

fn stratified_rows(labels: &[u8], fraction: f64, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
    let mut normals: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0).collect();
    let mut anomalies: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    rng::shuffle(rng, &mut normals);
    rng::shuffle(rng, &mut anomalies);
    let keep_n = ((fraction * normals.len() as f64).floor() as usize).max(1);
    let keep_a = ((fraction * anomalies.len() as f64).floor() as usize).max(1);
    let mut rows: Vec<usize> = normals[..keep_n.min(normals.len())]
        .iter()
        .chain(&anomalies[..keep_a.min(anomalies.len())])
        .copied()
        .collect();
    rows.sort_unstable();
    rows
}

/// Basin-hopping baseline settings. The walk perturbs every factor with
/// Gaussian noise and accepts by the Metropolis rule on the fraud rank sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinHopConfig {
    pub iterations: usize,
    pub perturbation_scale: f64,
    pub temperature: f64,
    pub seed: u64,
    /// Optional wall-clock cap in seconds; the walk stops at whichever of
    /// iterations/budget runs out first.
    pub time_budget_s: Option<f64>,
}

impl Default for BasinHopConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            perturbation_scale: 0.25,
            temperature: 1.0,
            seed: 0,
            time_budget_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinHopPoint {
    pub iteration: usize,
    pub elapsed_s: f64,
    /// Rank sum of the current walk state.
    pub rank_sum: f64,
    /// TPR at FPR = 0.2% of the best state seen so far.
    pub tpr_at_comparison_fpr: f64,
}

#[derive(Debug, Clone)]
pub struct BasinHopResult {
    pub factors: FactorVector,
    pub rank_sum: f64,
    pub trace: Vec<BasinHopPoint>,
}

/// Metropolis random walk minimising the fraud rank sum, starting from the
/// undeformed factor vector. Returns the best state visited.
pub fn basin_hopping(
    data: &Dataset,
    center: &Center,
    cfg: &BasinHopConfig,
) -> Result<BasinHopResult> {
    if cfg.iterations < 1 {
        return Err(Error::InvalidArgument("iterations must be at least 1".into()));
    }
    if !(cfg.perturbation_scale >= 0.0 && cfg.perturbation_scale.is_finite()) {
        return Err(Error::InvalidArgument("perturbation_scale must be finite and >= 0".into()));
    }
    if !(cfg.temperature >= 0.0 && cfg.temperature.is_finite()) {
        return Err(Error::InvalidArgument("temperature must be finite and >= 0".into()));
    }
    let scorer = RadialScorer::new(data, center)?;
    let start = Instant::now();
    let mut rng = rng::rng_from_seed(cfg.seed);
    let mut current = Array1::ones(scorer.dim());
    let mut current_obj = scorer.rank_sum(&current);
    let mut best = current.clone();
    let mut best_obj = current_obj;
    let mut best_tpr = scorer.tpr_at(&best, COMPARISON_FPR)?;
    let mut trace = Vec::with_capacity(cfg.iterations.min(1 << 20));

    for iteration in 0..cfg.iterations {
        if let Some(budget) = cfg.time_budget_s {
            if start.elapsed().as_secs_f64() >= budget {
                break;
            }
        }
        let mut candidate = current.clone();
        for v in candidate.iter_mut() {
            *v += rng::normal(&mut rng, 0.0, cfg.perturbation_scale);
            if *v < FACTOR_FLOOR {
                *v = FACTOR_FLOOR;
            }
        }
        let candidate_obj = scorer.rank_sum(&candidate);
        let delta = candidate_obj - current_obj;
        let accept = if delta <= 0.0 {
            true
        } else if cfg.temperature > 0.0 {
            rng.random::<f64>() < (-delta / cfg.temperature).exp()
        } else {
            false
        };
        if accept {
            current = candidate;
            current_obj = candidate_obj;
            if current_obj < best_obj {
                best_obj = current_obj;
                best = current.clone();
                best_tpr = scorer.tpr_at(&best, COMPARISON_FPR)?;
            }
        }
        trace.push(BasinHopPoint {
            iteration,
            elapsed_s: start.elapsed().as_secs_f64(),
            rank_sum: current_obj,
            tpr_at_comparison_fpr: best_tpr,
        });
    }
    Ok(BasinHopResult { factors: FactorVector::new(best.to_vec())?, rank_sum: best_obj, trace })
}

use rand::Rng as _;

/// Write an optimizer trace as `iteration,wall_clock_s,score` CSV.
pub fn write_trace_csv<W: std::io::Write>(points: &[TracePoint], mut writer: W) -> Result<()> {
    writeln!(writer, "iteration,wall_clock_s,score")?;
    for p in points {
        writeln!(writer, "{},{},{}", p.iteration, p.elapsed_s, p.score)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use ndarray::Array2;

    /// 200-point toy set: axis 1 is pure noise for both classes, anomalies
    /// sit far out on axis 2.
    fn two_feature_toy(seed: u64) -> Dataset {
        let n = 200;
        let k = 15;
        let mut rng = rng::rng_from_seed(seed);
        let mut feats = Array2::zeros((n, 2));
        let mut labels = vec![0u8; n];
        for i in 0..n {
            feats[[i, 0]] = rng::standard_normal(&mut rng);
            if i < k {
                feats[[i, 1]] = rng::normal(&mut rng, 5.0, 0.2);
                labels[i] = 1;
            } else {
                feats[[i, 1]] = rng::standard_normal(&mut rng);
            }
        }
        Dataset::with_default_names(feats, labels).unwrap()
    }

    /// Brute-force oracle over the factor ratio f2/f1.
    fn grid_best_ratio(data: &Dataset, center: &Center) -> (f64, f64) {
        let scorer = RadialScorer::new(data, center).unwrap();
        let mut best = (1.0, f64::MIN);
        for i in 0..400 {
            let ratio = 10f64.powf(-4.0 + 8.0 * i as f64 / 399.0);
            let a = scorer.auroc(&Array1::from(vec![1.0, ratio]));
            if a > best.1 {
                best = (ratio, a);
            }
        }
        best
    }

    #[test]
    fn angles_of_equal_factors_in_2d() {
        let state = factors_to_angles(&FactorVector::ones(2)).unwrap();
        assert!((state.angles()[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((state.radius() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn angle_roundtrip_and_sphere_norm() {
        let mut rng = rng::rng_from_seed(17);
        for d in [2usize, 3, 7, 15] {
            for _ in 0..20 {
                let f: Vec<f64> =
                    (0..d).map(|_| rng::standard_normal(&mut rng).abs() + 0.05).collect();
                let fv = FactorVector::new(f.clone()).unwrap();
                let state = factors_to_angles(&fv).unwrap();
                let back = angles_to_factors(&state);
                // reconstruction lands on the sphere ...
                assert!((back.norm() - (d as f64).sqrt()).abs() < 1e-9);
                // ... at the normalised direction of the input
                let scale = (d as f64).sqrt() / fv.norm();
                for (a, b) in f.iter().zip(back.values()) {
                    assert!((a * scale - b).abs() < 1e-9, "dim {d}: {} vs {b}", a * scale);
                }
                // angle -> factor -> angle is the identity
                let state2 = factors_to_angles(&back).unwrap();
                for (x, y) in state.angles().iter().zip(state2.angles()) {
                    assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn angles_stay_in_positive_orthant() {
        let fv = FactorVector::new(vec![0.001, 5.0, 0.3, 2.0]).unwrap();
        let state = factors_to_angles(&fv).unwrap();
        for &a in state.angles() {
            assert!(a > 0.0 && a < FRAC_PI_2);
        }
    }

    #[test]
    fn greedy_leaves_single_feature_dataset_alone() {
        // with one feature every factor is a monotone rescale, so no strict
        // improvement exists and the factors never move
        let d = two_feature_toy(3).select_features(&[1]).unwrap();
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let res =
            greedy_factor_search(&d, &c, &GreedyConfig::default(), &FactorVector::ones(1)).unwrap();
        assert_eq!(res.factors.to_vec(), vec![1.0]);
        assert_eq!(res.trace.len(), 1);
    }

    #[test]
    fn greedy_suppresses_the_noise_axis() {
        let d = two_feature_toy(11);
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let res =
            greedy_factor_search(&d, &c, &GreedyConfig::default(), &FactorVector::ones(2)).unwrap();
        let f = res.factors.to_vec();
        assert!(f[0] * 100.0 < f[1], "factors {f:?}");

        // single informative axis: the greedy result must match the
        // axis-2-only classification
        let axis2 = d.select_features(&[1]).unwrap();
        let c2 = c.select(&[1]).unwrap();
        let scorer2 = RadialScorer::new(&axis2, &c2).unwrap();
        let axis2_auroc = scorer2.auroc(&Array1::ones(1));
        assert!((res.score - axis2_auroc).abs() < 1e-6, "{} vs {axis2_auroc}", res.score);

        // and agree with the brute-force ratio grid
        let (_, grid_auroc) = grid_best_ratio(&d, &c);
        assert!(res.score >= grid_auroc - 1e-9, "{} vs grid {grid_auroc}", res.score);
    }

    #[test]
    fn greedy_trace_is_monotone_and_score_nondecreasing() {
        let d = data::generate_artificial(2000, 0.05, 21).unwrap();
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let res =
            greedy_factor_search(&d, &c, &GreedyConfig::default(), &FactorVector::ones(15)).unwrap();
        assert!(res.trace.windows(2).all(|w| w[0].score <= w[1].score));
        assert!(res.score >= res.trace[0].score);
    }

    #[test]
    fn scalar_multiples_do_not_change_the_score() {
        let d = two_feature_toy(5);
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let scorer = RadialScorer::new(&d, &c).unwrap();
        let f = Array1::from(vec![0.7, 3.1]);
        let base = scorer.auroc(&f);
        let mut rng = rng::rng_from_seed(2);
        for _ in 0..10 {
            let scale = rng::standard_normal(&mut rng).abs() + 0.1;
            let scaled = f.mapv(|v| v * scale);
            assert!((scorer.auroc(&scaled) - base).abs() < 1e-12);
        }
    }

    #[test]
    fn ascent_stays_put_on_tied_scores() {
        // identical rows tie every score, so all finite differences vanish
        let feats = Array2::from_elem((20, 3), 2.0);
        let mut labels = vec![0u8; 20];
        labels[0] = 1;
        let d = Dataset::with_default_names(feats, labels).unwrap();
        let c = Center::origin(3);
        let init = FactorVector::ones(3);
        let res = angular_ascent(&d, &c, &AscentConfig::default(), &init).unwrap();
        let expected = angles_to_factors(&factors_to_angles(&init).unwrap());
        for (a, b) in res.factors.values().iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ascent_converges_to_the_grid_ratio_on_the_toy_set() {
        let d = two_feature_toy(11);
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let cfg = AscentConfig { epochs: 60, ..Default::default() };
        let res = angular_ascent(&d, &c, &cfg, &FactorVector::ones(2)).unwrap();
        let (_, grid_auroc) = grid_best_ratio(&d, &c);
        assert!(
            res.score >= grid_auroc - 0.1 * (1.0 - grid_auroc + 1e-12) - 0.01,
            "ascent {} vs grid {grid_auroc}",
            res.score
        );
    }

    #[test]
    fn ascent_full_subsample_matches_plain_run() {
        let d = data::generate_artificial(800, 0.05, 31).unwrap();
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let base = AscentConfig { epochs: 5, seed: 9, ..Default::default() };
        let with_sub = AscentConfig { subsample: Some(1.0), ..base };
        let a = angular_ascent(&d, &c, &base, &FactorVector::ones(15)).unwrap();
        let b = angular_ascent(&d, &c, &with_sub, &FactorVector::ones(15)).unwrap();
        assert_eq!(a.factors.to_vec(), b.factors.to_vec());
        for (x, y) in a.trace.iter().zip(&b.trace) {
            assert_eq!(x.score, y.score);
        }
    }

    #[test]
    fn ascent_from_greedy_never_loses_ground() {
        let d = data::generate_artificial(1500, 0.05, 41).unwrap();
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let g =
            greedy_factor_search(&d, &c, &GreedyConfig::default(), &FactorVector::ones(15)).unwrap();
        let a = angular_ascent(&d, &c, &AscentConfig::default(), &g.factors).unwrap();
        // the step onto the sphere rescales factors, which is score-neutral,
        // so the best-seen contract keeps the greedy score reachable
        assert!(a.score >= g.score - 1e-12, "{} vs {}", a.score, g.score);
    }

    #[test]
    fn basin_hopping_zero_perturbation_never_moves() {
        let d = two_feature_toy(7);
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let cfg = BasinHopConfig {
            iterations: 50,
            perturbation_scale: 0.0,
            ..Default::default()
        };
        let res = basin_hopping(&d, &c, &cfg).unwrap();
        assert_eq!(res.factors.to_vec(), vec![1.0, 1.0]);
        let first = res.trace.first().unwrap().rank_sum;
        assert!(res.trace.iter().all(|p| p.rank_sum == first));
    }

    #[test]
    fn basin_hopping_zero_temperature_is_monotone() {
        let d = two_feature_toy(13);
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let cfg = BasinHopConfig {
            iterations: 300,
            perturbation_scale: 0.3,
            temperature: 0.0,
            seed: 4,
            time_budget_s: None,
        };
        let res = basin_hopping(&d, &c, &cfg).unwrap();
        assert!(res.trace.windows(2).all(|w| w[1].rank_sum <= w[0].rank_sum));
    }

    #[test]
    fn basin_hopping_reaches_the_grid_optimum_on_the_toy_set() {
        let d = two_feature_toy(11);
        let c = data::center_of_mass(&d, Some(0)).unwrap();
        let scorer = RadialScorer::new(&d, &c).unwrap();
        let mut grid_best = f64::MAX;
        for i in 0..400 {
            let ratio = 10f64.powf(-4.0 + 8.0 * i as f64 / 399.0);
            grid_best = grid_best.min(scorer.rank_sum(&Array1::from(vec![1.0, ratio])));
        }
        let cfg = BasinHopConfig {
            iterations: 4000,
            perturbation_scale: 0.3,
            temperature: 2.0,
            seed: 8,
            time_budget_s: None,
        };
        let res = basin_hopping(&d, &c, &cfg).unwrap();
        assert!(
            res.rank_sum <= grid_best,
            "basin hopping {} vs grid {grid_best}",
            res.rank_sum
        );
    }
}
