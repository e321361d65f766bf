//! Centric-autoencoder flavors.
//!
//! A centric autoencoder scores inputs by the radii of its outputs from a
//! fixed center. Variants differ in how the space is nudged around that
//! rule: cpAE trains on a uniformly compressed training set, EIcAE expands
//! prediction inputs of a trained model, DOcAE post-processes the output
//! space with the supervised radial-deformation optimizers.

use serde::{Deserialize, Serialize};

use crate::data::{self, Center, Dataset, FactorVector};
use crate::deform::{self, AscentConfig, GreedyConfig};
use crate::error::{Error, Result};
use crate::metrics;
use crate::net::{self, Network, NetworkFile, NetworkSpec, TrainConfig};
use crate::rng;

/// Which pipeline the model applies at prediction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    Cae,
    Cpae { c: f64 },
    Eicae { e: f64 },
    Eicpae { c: f64, e: f64 },
    Docae { factors: FactorVector },
    Docpae { c: f64, factors: FactorVector },
}

impl Variant {
    fn validate(&self, dim: usize) -> Result<()> {
        let check_c = |c: f64| {
            if c > 0.0 && c < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("compression factor {c} outside (0, 1)")))
            }
        };
        let check_e = |e: f64| {
            if e > 1.0 && e.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("expansion factor {e} outside (1, inf)")))
            }
        };
        let check_f = |f: &FactorVector| {
            if f.dim() == dim {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!(
                    "deformation factors dim {} vs network dim {dim}",
                    f.dim()
                )))
            }
        };
        match self {
            Variant::Cae => Ok(()),
            Variant::Cpae { c } => check_c(*c),
            Variant::Eicae { e } => check_e(*e),
            Variant::Eicpae { c, e } => check_c(*c).and(check_e(*e)),
            Variant::Docae { factors } => check_f(factors),
            Variant::Docpae { c, factors } => check_c(*c).and(check_f(factors)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Cae => "cae",
            Variant::Cpae { .. } => "cpae",
            Variant::Eicae { .. } => "eicae",
            Variant::Eicpae { .. } => "eicpae",
            Variant::Docae { .. } => "docae",
            Variant::Docpae { .. } => "docpae",
        }
    }
}

/// Seeds and settings that produced a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub train_config: TrainConfig,
    pub network_init_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchBudget>,
}

/// A trained centric autoencoder plus its prediction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct CaeModel {
    pub net: Network,
    pub center: Center,
    pub variant: Variant,
    pub provenance: Provenance,
}

impl CaeModel {
    /// Variant pipeline: optional input expansion, forward pass, optional
    /// output deformation, then radii from the center. Higher = more
    /// anomalous.
    pub fn classify(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.n_features() != self.net.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} features vs network dim {}",
                data.n_features(),
                self.net.input_dim()
            )));
        }
        let expansion = match &self.variant {
            Variant::Eicae { e } | Variant::Eicpae { e, .. } => Some(*e),
            _ => None,
        };
        let expanded;
        let input = match expansion {
            Some(e) => {
                expanded = data::expand_inputs(data, &self.center, e)?;
                &expanded
            }
            None => data,
        };
        let outputs = self.net.forward_batch(input.features().view())?;
        let c = self.center.coords();
        let factors = match &self.variant {
            Variant::Docae { factors } | Variant::Docpae { factors, .. } => Some(factors.values()),
            _ => None,
        };
        Ok(outputs
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .zip(c)
                    .enumerate()
                    .map(|(j, (y, ci))| {
                        let d = y - ci;
                        let f = factors.map_or(1.0, |f| f[j]);
                        f * f * d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect())
    }

    /// Test AUROC of the variant pipeline.
    pub fn evaluate(&self, data: &Dataset) -> Result<f64> {
        metrics::auroc(&self.classify(data)?, data.labels())
    }
}

/// Budget for the compression/expansion hyperparameter searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub trials: usize,
    pub c_range: (f64, f64),
    pub e_range: (f64, f64),
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { trials: 20, c_range: (0.01, 0.99), e_range: (1.0 + 1e-9, 20.0), seed: 0 }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("search budget needs at least one trial".into()));
        }
        let (lo, hi) = self.c_range;
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(Error::InvalidArgument(format!("c range ({lo}, {hi}) outside (0, 1)")));
        }
        let (lo, hi) = self.e_range;
        if !(lo > 1.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!("e range ({lo}, {hi}) outside (1, inf)")));
        }
        Ok(())
    }
}

/// How candidate compression factors are drawn from the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    #[default]
    Random,
    Grid,
}

/// One scored hyperparameter trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub value: f64,
    pub test_auroc: f64,
}

/// Train a plain cAE: fit on the (uncompressed) training set with per-epoch
/// test tracking, center at the training-set mass center, and keep the
/// best-classifying snapshot.
pub fn train_cae(
    train: &Dataset,
    test: &Dataset,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
) -> Result<CaeModel> {
    let center = data::center_of_mass(train, None)?;
    let init_seed = rng::derive_seed(cfg.seed, "network-init");
    let mut net = Network::init(spec.clone(), init_seed)?;
    let trace = net::fit_with_tracking(&mut net, train, test, &center, cfg)?;
    Ok(CaeModel {
        net: trace.best_weights,
        center,
        variant: Variant::Cae,
        provenance: Provenance { train_config: *cfg, network_init_seed: init_seed, search: None },
    })
}

/// Candidate compression factors for a budget.
pub fn c_candidates(budget: &SearchBudget, strategy: SearchStrategy) -> Vec<f64> {
    let (lo, hi) = budget.c_range;
    match strategy {
        SearchStrategy::Random => {
            let mut rng = rng::rng_from_seed(budget.seed);
            use rand::Rng;
            (0..budget.trials).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
        }
        SearchStrategy::Grid => {
            if budget.trials == 1 {
                return vec![(lo + hi) / 2.0];
            }
            (0..budget.trials)
                .map(|i| lo + (hi - lo) * i as f64 / (budget.trials - 1) as f64)
                .collect()
        }
    }
}

/// Centripetal training: each trial trains a full cAE on the training set
/// compressed by a scalar candidate `c` (never a vector), tracked against
/// the uncompressed test set. Prediction never compresses. Ties go to the
/// smallest `c`.
pub fn train_cpae(
    train: &Dataset,
    test: &Dataset,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
    budget: &SearchBudget,
    strategy: SearchStrategy,
) -> Result<(CaeModel, Vec<Trial>)> {
    budget.validate()?;
    let center = data::center_of_mass(train, None)?;
    let init_seed = rng::derive_seed(cfg.seed, "network-init");
    let mut trials = Vec::with_capacity(budget.trials);
    let mut best: Option<(f64, Network)> = None;
    let mut best_c = f64::NAN;

    for c in c_candidates(budget, strategy) {
        let compressed = data::compress(train, &center, c)?;
        let mut net = Network::init(spec.clone(), init_seed)?;
        let trace = net::fit_with_tracking(&mut net, &compressed, test, &center, cfg)?;
        let auroc = if trace.best_epoch.is_some() {
            trace.best_test_auroc
        } else {
            // zero-epoch budget: score the untrained net directly
            metrics::auroc(
                &net::output_radii_scores(&trace.best_weights, test, &center)?,
                test.labels(),
            )?
        };
        trials.push(Trial { value: c, test_auroc: auroc });
        let better = match &best {
            None => true,
            Some((b, _)) => auroc > *b || (auroc == *b && c < best_c),
        };
        if better {
            best = Some((auroc, trace.best_weights));
            best_c = c;
        }
    }
    let (_, net) = best.expect("at least one trial");
    Ok((
        CaeModel {
            net,
            center,
            variant: Variant::Cpae { c: best_c },
            provenance: Provenance {
                train_config: *cfg,
                network_init_seed: init_seed,
                search: Some(*budget),
            },
        },
        trials,
    ))
}

/// Expansion sweep over a trained cAE/cpAE: evaluates the test AUROC of
/// radii of `forward(expand(test, e))` on the unexpanded base plus a uniform
/// grid over `e_range`, and tags the model with the best factor. No
/// retraining happens; the base model always participates, so the sweep
/// never returns anything worse than the input model. Ties go to the
/// smallest `e`.
pub fn eicae_sweep(
    model: &CaeModel,
    test: &Dataset,
    e_range: (f64, f64),
    trials: usize,
) -> Result<(CaeModel, Vec<Trial>)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("expansion sweep needs at least one point".into()));
    }
    let (lo, hi) = e_range;
    if !(lo > 1.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("e range ({lo}, {hi}) outside (1, inf)")));
    }
    let base_c = match &model.variant {
        Variant::Cae => None,
        Variant::Cpae { c } => Some(*c),
        other => {
            return Err(Error::InvalidArgument(format!(
                "expansion sweep needs a cae or cpae base, got {}",
                other.name()
            )))
        }
    };
    if !test.has_both_classes() {
        return Err(Error::SingleClass("sweep scoring requires both classes".into()));
    }

    let mut candidates = vec![1.0];
    if trials == 1 {
        candidates.push(lo);
    } else {
        candidates
            .extend((0..trials).map(|i| lo + (hi - lo) * i as f64 / (trials - 1) as f64));
    }

    let mut trial_log = Vec::with_capacity(candidates.len());
    let mut best_e = 1.0;
    let mut best_auroc = f64::NEG_INFINITY;
    for e in candidates {
        let probe = CaeModel {
            net: model.net.clone(),
            center: model.center.clone(),
            variant: match (base_c, e) {
                (None, e) if e == 1.0 => Variant::Cae,
                (Some(c), e) if e == 1.0 => Variant::Cpae { c },
                (None, e) => Variant::Eicae { e },
                (Some(c), e) => Variant::Eicpae { c, e },
            },
            provenance: model.provenance.clone(),
        };
        let auroc = probe.evaluate(test)?;
        trial_log.push(Trial { value: e, test_auroc: auroc });
        if auroc > best_auroc || (auroc == best_auroc && e < best_e) {
            best_auroc = auroc;
            best_e = e;
        }
    }
    let variant = match (base_c, best_e) {
        (None, e) if e == 1.0 => Variant::Cae,
        (Some(c), e) if e == 1.0 => Variant::Cpae { c },
        (None, e) => Variant::Eicae { e },
        (Some(c), e) => Variant::Eicpae { c, e },
    };
    Ok((
        CaeModel {
            net: model.net.clone(),
            center: model.center.clone(),
            variant,
            provenance: model.provenance.clone(),
        },
        trial_log,
    ))
}

/// Deformed-output training, phase two: run the greedy search and then
/// angular ascent over the model's output space on labelled data, and store
/// the winning factor vector. Both optimizers accept only improvements, so
/// the result never scores below the base model.
pub fn docae(
    model: &CaeModel,
    test: &Dataset,
    greedy_cfg: &GreedyConfig,
    ascent_cfg: &AscentConfig,
) -> Result<CaeModel> {
    let base_c = match &model.variant {
        Variant::Cae => None,
        Variant::Cpae { c } => Some(*c),
        other => {
            return Err(Error::InvalidArgument(format!(
                "output deformation needs a cae or cpae base, got {}",
                other.name()
            )))
        }
    };
    if !test.has_both_classes() {
        return Err(Error::SingleClass("supervised phase needs both classes".into()));
    }
    let outputs = model.net.forward_batch(test.features().view())?;
    let names = (1..=outputs.ncols()).map(|i| format!("out{i}")).collect();
    let output_space = Dataset::new(outputs, test.labels().to_vec(), names)?;

    let ones = FactorVector::ones(output_space.n_features());
    let greedy = deform::greedy_factor_search(&output_space, &model.center, greedy_cfg, &ones)?;
    let ascent = deform::angular_ascent(&output_space, &model.center, ascent_cfg, &greedy.factors)?;
    let factors = if ascent.score > greedy.score { ascent.factors } else { greedy.factors };

    let variant = match base_c {
        None => Variant::Docae { factors },
        Some(c) => Variant::Docpae { c, factors },
    };
    variant.validate(model.net.input_dim())?;
    Ok(CaeModel {
        net: model.net.clone(),
        center: model.center.clone(),
        variant,
        provenance: model.provenance.clone(),
    })
}

pub const CAE_MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned JSON form of a [`CaeModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaeModelFile {
    pub format_version: u32,
    pub network: NetworkFile,
    pub center: Center,
    pub variant: Variant,
    pub provenance: Provenance,
}

impl CaeModel {
    pub fn to_file(&self) -> CaeModelFile {
        CaeModelFile {
            format_version: CAE_MODEL_FORMAT_VERSION,
            network: self.net.to_file(),
            center: self.center.clone(),
            variant: self.variant.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_file(file: &CaeModelFile) -> Result<CaeModel> {
        if file.format_version != CAE_MODEL_FORMAT_VERSION {
            return Err(Error::InvalidData(format!(
                "unsupported model format version {}",
                file.format_version
            )));
        }
        let net = Network::from_file(&file.network)?;
        if file.center.dim() != net.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "center dim {} vs network dim {}",
                file.center.dim(),
                net.input_dim()
            )));
        }
        file.variant.validate(net.input_dim())?;
        Ok(CaeModel {
            net,
            center: file.center.clone(),
            variant: file.variant.clone(),
            provenance: file.provenance.clone(),
        })
    }
}
