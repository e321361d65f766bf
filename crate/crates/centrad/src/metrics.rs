//! ROC curves, AUROC and the fraud-rank-sum objective.
//!
//! Scores follow the convention "higher = more anomalous". Ties receive
//! half credit (Mann-Whitney), which makes AUROC independent of input order
//! and equal to the trapezoidal area under the tie-grouped ROC curve.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One ROC vertex. `threshold` is the score at which the vertex is reached;
/// the initial (0, 0) vertex carries `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// ROC curve with tie-grouped thresholds, sorted by nondecreasing FPR,
/// spanning (0,0) to (1,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auroc: f64,
}

/// Per-method result row for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub method_name: String,
    pub auroc: f64,
    #[serde(default)]
    pub tpr_at_fpr: Vec<TprAtFpr>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TprAtFpr {
    pub fpr: f64,
    pub tpr: f64,
}

fn validate_scores(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.is_empty() {
        return Err(Error::InvalidData("empty score vector".into()));
    }
    if !scores.iter().all(|s| s.is_finite()) {
        return Err(Error::InvalidData("scores must be finite".into()));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass(format!(
            "{positives} positives, {negatives} negatives"
        )));
    }
    Ok((positives, negatives))
}

/// Ascending 1-based ranks with tied scores averaged.
fn average_ranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Rank-based AUROC in O(N log N): the Mann-Whitney U statistic normalised
/// by the number of anomaly-normal pairs, ties half-credited.
pub fn auroc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (positives, negatives) = validate_scores(scores, labels)?;
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| *r)
        .sum();
    let k = positives as f64;
    let u = rank_sum - k * (k + 1.0) / 2.0;
    Ok(u / (k * negatives as f64))
}

/// Threshold-sweep ROC curve. Equal scores collapse into single threshold
/// steps, producing diagonal segments whose trapezoidal area equals the
/// rank-based AUROC.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    let (positives, negatives) = validate_scores(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == threshold {
            j += 1;
        }
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        points.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold,
        });
        i = j + 1;
    }
    Ok(RocCurve { points, auroc: auroc(scores, labels)? })
}

impl RocCurve {
    /// Trapezoidal area under the stored vertices.
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
            .sum()
    }
}

/// TPR linearly interpolated on the curve at the target FPR. At a vertical
/// step the upper vertex wins.
pub fn tpr_at_fpr(curve: &RocCurve, fpr_target: f64) -> Result<f64> {
    if curve.points.is_empty() {
        return Err(Error::InvalidData("empty ROC curve".into()));
    }
    if !(fpr_target > 0.0 && fpr_target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fpr target must lie in (0, 1), got {fpr_target}"
        )));
    }
    let pts = &curve.points;
    let exact: Vec<&RocPoint> = pts.iter().filter(|p| p.fpr == fpr_target).collect();
    if !exact.is_empty() {
        return Ok(exact.iter().map(|p| p.tpr).fold(f64::MIN, f64::max));
    }
    for w in pts.windows(2) {
        if w[0].fpr < fpr_target && fpr_target < w[1].fpr {
            let t = (fpr_target - w[0].fpr) / (w[1].fpr - w[0].fpr);
            return Ok(w[0].tpr + t * (w[1].tpr - w[0].tpr));
        }
    }
    // target below the first positive-FPR vertex: interpolate from (0,0)
    Err(Error::InvalidData("ROC curve does not span the target".into()))
}

/// Sum of anomaly ranks in a descending score sort, rank 0 at the top and
/// tied ranks averaged. Lower is better; minimising this is equivalent to
/// maximising AUROC at fixed class counts.
pub fn fraud_rank_sum(scores: &[f64], labels: &[u8]) -> Result<f64> {
    validate_scores(scores, labels)?;
    let n = scores.len() as f64;
    let ranks = average_ranks(scores);
    Ok(ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| n - *r)
        .sum())
}

/// Write a curve as `fpr,tpr,threshold` CSV.
pub fn write_roc_csv<W: Write>(curve: &RocCurve, mut writer: W) -> Result<()> {
    writeln!(writer, "fpr,tpr,threshold")?;
    for p in &curve.points {
        writeln!(writer, "{},{},{}", p.fpr, p.tpr, p.threshold)?;
    }
    Ok(())
}

/// Read back a `fpr,tpr,threshold` CSV written by [`write_roc_csv`].
pub fn read_roc_csv<R: BufRead>(reader: R) -> Result<Vec<RocPoint>> {
    let mut points = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |name: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Csv { row: i, message: format!("missing {name}") })?
                .parse::<f64>()
                .map_err(|e| Error::Csv { row: i, message: format!("{name}: {e}") })
        };
        points.push(RocPoint { fpr: next("fpr")?, tpr: next("tpr")?, threshold: next("threshold")? });
    }
    Ok(points)
}
