//! From-scratch dense autoencoder with a radial training loss.
//!
//! The network keeps input and output dimension equal; training punishes the
//! relative change between input radius and output radius about a fixed
//! center, and the per-epoch tracker snapshots whichever weights classified
//! the test set best.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::{Center, Dataset};
use crate::error::{Error, Result};
use crate::metrics;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    LeakyRelu { alpha: f64 },
    Softsign,
    Tanh,
}

impl Activation {
    fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu { alpha } => {
                if z > 0.0 {
                    z
                } else {
                    alpha * z
                }
            }
            Activation::Softsign => z / (1.0 + z.abs()),
            Activation::Tanh => z.tanh(),
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu { alpha } => {
                if z > 0.0 {
                    1.0
                } else {
                    *alpha
                }
            }
            Activation::Softsign => {
                let d = 1.0 + z.abs();
                1.0 / (d * d)
            }
            Activation::Tanh => 1.0 - z.tanh() * z.tanh(),
        }
    }

    /// Positively homogeneous activations (the zero-bias limit family).
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Activation::Identity | Activation::Relu | Activation::LeakyRelu { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub use_bias: bool,
}

impl NetworkSpec {
    /// The reference architecture: 70-neuron hidden layers around an
    /// 8-neuron coding layer, leaky-ReLU hiddens, identity output, biases.
    pub fn default_for_dim(dim: usize) -> Self {
        Self {
            layer_sizes: vec![dim, 70, 8, 70, dim],
            hidden_activation: Activation::LeakyRelu { alpha: 0.01 },
            output_activation: Activation::Identity,
            use_bias: true,
        }
    }

    /// Same shape without bias units and with identity output: forward
    /// passes become positively homogeneous.
    pub fn zero_bias_for_dim(dim: usize) -> Self {
        Self {
            layer_sizes: vec![dim, 70, 8, 70, dim],
            hidden_activation: Activation::LeakyRelu { alpha: 0.01 },
            output_activation: Activation::Identity,
            use_bias: false,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes.first().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 3 {
            return Err(Error::InvalidArgument("a network needs at least 3 layers".into()));
        }
        if self.layer_sizes.first() != self.layer_sizes.last() {
            return Err(Error::InvalidArgument("input and output dimension must match".into()));
        }
        if self.layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidArgument("layer sizes must be positive".into()));
        }
        if !self.hidden_activation.is_homogeneous() {
            return Err(Error::InvalidArgument(
                "hidden activation must be identity, relu or leaky_relu".into(),
            ));
        }
        if matches!(self.hidden_activation, Activation::LeakyRelu { alpha } if !(alpha.is_finite() && alpha >= 0.0))
        {
            return Err(Error::InvalidArgument("leaky_relu alpha must be finite and >= 0".into()));
        }
        if matches!(self.output_activation, Activation::Relu | Activation::LeakyRelu { .. }) {
            return Err(Error::InvalidArgument(
                "output activation must be identity, softsign or tanh".into(),
            ));
        }
        if !self.use_bias && !matches!(self.output_activation, Activation::Identity) {
            return Err(Error::InvalidArgument(
                "zero-bias networks require an identity output activation".into(),
            ));
        }
        Ok(())
    }
}

/// Dense autoencoder parameters. Weight matrices are stored `(out, in)`;
/// bias vectors exist only when the spec enables them.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: NetworkSpec,
    weights: Vec<Array2<f64>>,
    biases: Option<Vec<Array1<f64>>>,
}

impl Network {
    /// Seeded Xavier-normal initialisation: each weight is drawn from
    /// `N(0, sqrt(2 / (fan_in + fan_out)))` in layer order, row-major within
    /// a layer; biases start at zero. The generator is the pinned ChaCha8
    /// stream, so a seed fixes every parameter.
    pub fn init(spec: NetworkSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = rng::rng_from_seed(seed);
        let mut weights = Vec::with_capacity(spec.layer_sizes.len() - 1);
        for pair in spec.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let scale = (2.0 / (fan_in + fan_out) as f64).sqrt();
            let mut w = Array2::zeros((fan_out, fan_in));
            for v in w.iter_mut() {
                *v = rng::normal(&mut rng, 0.0, scale);
            }
            weights.push(w);
        }
        let biases = spec.use_bias.then(|| {
            spec.layer_sizes[1..].iter().map(|&s| Array1::zeros(s)).collect()
        });
        Ok(Self { spec, weights, biases })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim()
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> Option<&[Array1<f64>]> {
        self.biases.as_deref()
    }

    pub fn parameter_count(&self) -> usize {
        let w: usize = self.weights.iter().map(|w| w.len()).sum();
        let b: usize = self.biases.iter().flat_map(|bs| bs.iter()).map(|b| b.len()).sum();
        w + b
    }

    fn activation_for_layer(&self, layer: usize) -> Activation {
        if layer + 1 == self.weights.len() {
            self.spec.output_activation
        } else {
            self.spec.hidden_activation
        }
    }

    /// Layer activations and pre-activations for a row batch.
    fn forward_full(&self, batch: ArrayView2<'_, f64>) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let mut activations = Vec::with_capacity(self.weights.len() + 1);
        let mut pre = Vec::with_capacity(self.weights.len());
        activations.push(batch.to_owned());
        for (l, w) in self.weights.iter().enumerate() {
            let mut z = activations[l].dot(&w.t());
            if let Some(biases) = &self.biases {
                z += &biases[l];
            }
            let act = self.activation_for_layer(l);
            let a = z.mapv(|v| act.apply(v));
            pre.push(z);
            activations.push(a);
        }
        (activations, pre)
    }

    pub fn forward_batch(&self, batch: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if batch.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "batch has {} columns, network expects {}",
                batch.ncols(),
                self.input_dim()
            )));
        }
        let (mut activations, _) = self.forward_full(batch);
        Ok(activations.pop().expect("forward produces an output layer"))
    }

    pub fn forward(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let row = x.insert_axis(Axis(0));
        Ok(self.forward_batch(row)?.row(0).to_owned())
    }
}

/// One radial-loss term: `rho = |k * r_out - r_in| / max(r_in, epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialLossTerm {
    pub r_in: f64,
    pub r_out: f64,
    pub rho: f64,
}

pub fn radial_loss_term(r_in: f64, r_out: f64, k: f64, epsilon: f64) -> RadialLossTerm {
    let rho = (k * r_out - r_in).abs() / r_in.max(epsilon);
    RadialLossTerm { r_in, r_out, rho }
}

/// Parameter gradients of the mean radial loss over a batch.
#[derive(Debug, Clone)]
pub struct RadialLossGrads {
    pub weights: Vec<Array2<f64>>,
    pub biases: Option<Vec<Array1<f64>>>,
}

/// Mean radial loss and its backpropagated gradients. At `r_out = 0` and at
/// the absolute-value kink `k * r_out = r_in` the subgradient 0 is used.
pub fn radial_loss(
    net: &Network,
    batch: ArrayView2<'_, f64>,
    center: &Center,
    k: f64,
    epsilon: f64,
) -> Result<(f64, RadialLossGrads)> {
    if batch.nrows() == 0 {
        return Err(Error::InvalidData("empty batch".into()));
    }
    if batch.ncols() != net.input_dim() || center.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "batch {} cols, center dim {}, network expects {}",
            batch.ncols(),
            center.dim(),
            net.input_dim()
        )));
    }
    let (activations, pre) = net.forward_full(batch);
    let output = activations.last().expect("output layer");
    let c = center.coords();
    let b = batch.nrows();

    let mut loss = 0.0;
    // dL/d(output), row per sample
    let mut delta = Array2::zeros(output.raw_dim());
    for i in 0..b {
        let x = batch.row(i);
        let y = output.row(i);
        let r_in = x.iter().zip(c).map(|(v, ci)| (v - ci) * (v - ci)).sum::<f64>().sqrt();
        let r_out = y.iter().zip(c).map(|(v, ci)| (v - ci) * (v - ci)).sum::<f64>().sqrt();
        let term = radial_loss_term(r_in, r_out, k, epsilon);
        loss += term.rho;
        let diff = k * r_out - r_in;
        if r_out > 0.0 && diff != 0.0 {
            let coef = k * diff.signum() / (r_in.max(epsilon) * r_out * b as f64);
            for (d, (yv, cv)) in delta.row_mut(i).iter_mut().zip(y.iter().zip(c)) {
                *d = coef * (yv - cv);
            }
        }
    }
    loss /= b as f64;

    let n_layers = net.weights.len();
    let mut grad_w = vec![Array2::zeros((0, 0)); n_layers];
    let mut grad_b = net.biases.as_ref().map(|_| vec![Array1::zeros(0); n_layers]);
    for l in (0..n_layers).rev() {
        let act = net.activation_for_layer(l);
        let dz = &delta * &pre[l].mapv(|z| act.derivative(z));
        grad_w[l] = dz.t().dot(&activations[l]);
        if let Some(gb) = grad_b.as_mut() {
            gb[l] = dz.sum_axis(Axis(0));
        }
        if l > 0 {
            delta = dz.dot(&net.weights[l]);
        }
    }
    Ok((loss, RadialLossGrads { weights: grad_w, biases: grad_b }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    SgdMomentum { beta: f64 },
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    /// Radius-reduction coefficient in the loss; 1 preserves radii.
    pub loss_k: f64,
    /// Guard for rows that coincide with the center.
    pub radius_epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 256,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::default(),
            seed: 0,
            loss_k: 1.0,
            radius_epsilon: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be positive".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("learning_rate must be finite and >= 0".into()));
        }
        if !(self.loss_k >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "loss_k must be at least 1, got {}",
                self.loss_k
            )));
        }
        if !(self.radius_epsilon > 0.0) {
            return Err(Error::InvalidArgument("radius_epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub train_loss: f64,
    pub test_auroc: f64,
}

/// Per-epoch training record plus the best-classifying weight snapshot.
/// Checkpoint selection uses the test AUROC, which makes it test-set-informed
/// model selection; substitute a validation split where that matters.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    pub epochs: Vec<EpochStats>,
    pub best_epoch: Option<usize>,
    pub best_test_auroc: f64,
    pub best_weights: Network,
}

struct OptimizerState {
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Option<Vec<Array1<f64>>>,
    v_b: Option<Vec<Array1<f64>>>,
    step: u64,
}

impl OptimizerState {
    fn new(net: &Network) -> Self {
        let zeros_w = |n: &Network| n.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
        let zeros_b = |n: &Network| {
            n.biases.as_ref().map(|bs| bs.iter().map(|b| Array1::zeros(b.raw_dim())).collect())
        };
        Self { m_w: zeros_w(net), v_w: zeros_w(net), m_b: zeros_b(net), v_b: zeros_b(net), step: 0 }
    }

    fn apply(&mut self, net: &mut Network, grads: &RadialLossGrads, cfg: &TrainConfig) {
        self.step += 1;
        let lr = cfg.learning_rate;
        match cfg.optimizer {
            OptimizerKind::Sgd => {
                for (w, g) in net.weights.iter_mut().zip(&grads.weights) {
                    w.zip_mut_with(g, |w, g| *w -= lr * g);
                }
                if let (Some(bs), Some(gs)) = (net.biases.as_mut(), grads.biases.as_ref()) {
                    for (b, g) in bs.iter_mut().zip(gs) {
                        b.zip_mut_with(g, |b, g| *b -= lr * g);
                    }
                }
            }
            OptimizerKind::SgdMomentum { beta } => {
                for ((w, g), m) in net.weights.iter_mut().zip(&grads.weights).zip(&mut self.m_w) {
                    m.zip_mut_with(g, |m, g| *m = beta * *m + g);
                    w.zip_mut_with(m, |w, m| *w -= lr * m);
                }
                if let (Some(bs), Some(gs), Some(ms)) =
                    (net.biases.as_mut(), grads.biases.as_ref(), self.m_b.as_mut())
                {
                    for ((b, g), m) in bs.iter_mut().zip(gs).zip(ms) {
                        m.zip_mut_with(g, |m, g| *m = beta * *m + g);
                        b.zip_mut_with(m, |b, m| *b -= lr * m);
                    }
                }
            }
            OptimizerKind::Adam { beta1, beta2, epsilon } => {
                let c1 = 1.0 - beta1.powi(self.step as i32);
                let c2 = 1.0 - beta2.powi(self.step as i32);
                for (l, (w, g)) in net.weights.iter_mut().zip(&grads.weights).enumerate() {
                    let m = &mut self.m_w[l];
                    let v = &mut self.v_w[l];
                    m.zip_mut_with(g, |m, g| *m = beta1 * *m + (1.0 - beta1) * g);
                    v.zip_mut_with(g, |v, g| *v = beta2 * *v + (1.0 - beta2) * g * g);
                    ndarray::Zip::from(w).and(&*m).and(&*v).for_each(|w, m, v| {
                        *w -= lr * (m / c1) / ((v / c2).sqrt() + epsilon);
                    });
                }
                if let (Some(bs), Some(gs), Some(ms), Some(vs)) = (
                    net.biases.as_mut(),
                    grads.biases.as_ref(),
                    self.m_b.as_mut(),
                    self.v_b.as_mut(),
                ) {
                    for (l, (b, g)) in bs.iter_mut().zip(gs).enumerate() {
                        let m = &mut ms[l];
                        let v = &mut vs[l];
                        m.zip_mut_with(g, |m, g| *m = beta1 * *m + (1.0 - beta1) * g);
                        v.zip_mut_with(g, |v, g| *v = beta2 * *v + (1.0 - beta2) * g * g);
                        ndarray::Zip::from(b).and(&*m).and(&*v).for_each(|b, m, v| {
                            *b -= lr * (m / c1) / ((v / c2).sqrt() + epsilon);
                        });
                    }
                }
            }
        }
    }
}

/// Radii of the network outputs about the center: the anomaly score of a
/// centric autoencoder.
pub fn output_radii_scores(net: &Network, data: &Dataset, center: &Center) -> Result<Vec<f64>> {
    let outputs = net.forward_batch(data.features().view())?;
    if center.dim() != outputs.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "center dim {} vs output dim {}",
            center.dim(),
            outputs.ncols()
        )));
    }
    let c = center.coords();
    Ok(outputs
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(c).map(|(v, ci)| (v - ci) * (v - ci)).sum::<f64>().sqrt())
        .collect())
}

/// Per-row mean squared reconstruction error, the vanilla baseline score.
pub fn reconstruction_error_scores(net: &Network, data: &Dataset) -> Result<Vec<f64>> {
    let outputs = net.forward_batch(data.features().view())?;
    let d = data.n_features() as f64;
    Ok(outputs
        .rows()
        .into_iter()
        .zip(data.features().rows())
        .map(|(out, inp)| {
            out.iter().zip(inp.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / d
        })
        .collect())
}

/// Seeded mini-batch training on the radial loss with per-epoch test-AUROC
/// checkpointing. The network is left in its final state; the returned trace
/// carries the snapshot of the best epoch.
pub fn fit_with_tracking(
    net: &mut Network,
    train: &Dataset,
    test: &Dataset,
    center: &Center,
    cfg: &TrainConfig,
) -> Result<TrainTrace> {
    cfg.validate()?;
    if train.n_rows() == 0 {
        return Err(Error::InvalidData("empty training set".into()));
    }
    if train.labels().iter().any(|&l| l != 0) {
        return Err(Error::InvalidData("training set must contain only label-0 rows".into()));
    }
    if !test.has_both_classes() {
        return Err(Error::SingleClass("test set must contain both classes".into()));
    }
    if train.n_features() != net.input_dim() || test.n_features() != net.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "network expects dim {}, train has {}, test has {}",
            net.input_dim(),
            train.n_features(),
            test.n_features()
        )));
    }

    let mut state = OptimizerState::new(net);
    let mut rng = rng::rng_from_seed(cfg.seed);
    let n = train.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut batch_buf = Array2::zeros((cfg.batch_size.min(n), train.n_features()));

    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut best_epoch = None;
    let mut best_auroc = f64::NEG_INFINITY;
    let mut best_weights = net.clone();

    for epoch in 0..cfg.epochs {
        rng::shuffle(&mut rng, &mut order);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let rows = chunk.len();
            for (dst, &src) in chunk.iter().enumerate() {
                batch_buf.row_mut(dst).assign(&train.row(src));
            }
            let batch = batch_buf.slice(ndarray::s![..rows, ..]);
            let (loss, grads) = radial_loss(net, batch, center, cfg.loss_k, cfg.radius_epsilon)?;
            loss_sum += loss * rows as f64;
            state.apply(net, &grads, cfg);
        }
        let scores = output_radii_scores(net, test, center)?;
        let test_auroc = metrics::auroc(&scores, test.labels())?;
        epochs.push(EpochStats { train_loss: loss_sum / n as f64, test_auroc });
        if test_auroc > best_auroc {
            best_auroc = test_auroc;
            best_epoch = Some(epoch);
            best_weights = net.clone();
        }
    }
    Ok(TrainTrace {
        epochs,
        best_epoch,
        best_test_auroc: if best_epoch.is_some() { best_auroc } else { f64::NAN },
        best_weights,
    })
}

/// Versioned JSON form of a network: spec plus row-major weight and bias
/// arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub format_version: u32,
    pub spec: NetworkSpec,
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Option<Vec<Vec<f64>>>,
}

pub const NETWORK_FORMAT_VERSION: u32 = 1;

impl Network {
    pub fn to_file(&self) -> NetworkFile {
        NetworkFile {
            format_version: NETWORK_FORMAT_VERSION,
            spec: self.spec.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| w.rows().into_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: self.biases.as_ref().map(|bs| bs.iter().map(|b| b.to_vec()).collect()),
        }
    }

    pub fn from_file(file: &NetworkFile) -> Result<Network> {
        if file.format_version != NETWORK_FORMAT_VERSION {
            return Err(Error::InvalidData(format!(
                "unsupported network format version {}",
                file.format_version
            )));
        }
        file.spec.validate()?;
        let mut weights = Vec::with_capacity(file.weights.len());
        for (l, pair) in file.spec.layer_sizes.windows(2).enumerate() {
            let rows = file
                .weights
                .get(l)
                .ok_or_else(|| Error::InvalidData(format!("missing weights for layer {l}")))?;
            if rows.len() != pair[1] || rows.iter().any(|r| r.len() != pair[0]) {
                return Err(Error::InvalidData(format!("layer {l} weight shape mismatch")));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            weights.push(
                Array2::from_shape_vec((pair[1], pair[0]), flat)
                    .map_err(|e| Error::InvalidData(e.to_string()))?,
            );
        }
        let biases = match (&file.biases, file.spec.use_bias) {
            (Some(bs), true) => {
                let mut out = Vec::with_capacity(bs.len());
                for (l, (b, &size)) in bs.iter().zip(&file.spec.layer_sizes[1..]).enumerate() {
                    if b.len() != size {
                        return Err(Error::InvalidData(format!("layer {l} bias shape mismatch")));
                    }
                    out.push(Array1::from(b.clone()));
                }
                Some(out)
            }
            (None, false) => None,
            _ => {
                return Err(Error::InvalidData(
                    "bias storage disagrees with the spec's use_bias flag".into(),
                ))
            }
        };
        Ok(Network { spec: file.spec.clone(), weights, biases })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{self, Dataset};
    use ndarray::array;

    fn tiny_spec(bias: bool, out: Activation) -> NetworkSpec {
        NetworkSpec {
            layer_sizes: vec![3, 5, 2, 5, 3],
            hidden_activation: Activation::LeakyRelu { alpha: 0.01 },
            output_activation: out,
            use_bias: bias,
        }
    }

    #[test]
    fn init_is_deterministic_and_counts_parameters() {
        let spec = NetworkSpec::default_for_dim(15);
        let a = Network::init(spec.clone(), 7).unwrap();
        let b = Network::init(spec, 7).unwrap();
        assert_eq!(a, b);
        // 2 * (15*70 + 70*8) weights plus 70+8+70+15 biases
        assert_eq!(a.parameter_count(), 3220 + 163);

        let zb = Network::init(NetworkSpec::zero_bias_for_dim(15), 7).unwrap();
        assert!(zb.biases().is_none());
        assert_eq!(zb.parameter_count(), 3220);
    }

    #[test]
    fn spec_validation_rejects_bad_shapes() {
        let mut spec = NetworkSpec::default_for_dim(4);
        spec.layer_sizes = vec![4, 4];
        assert!(spec.validate().is_err());
        let mut spec = NetworkSpec::default_for_dim(4);
        spec.layer_sizes = vec![4, 8, 5];
        assert!(spec.validate().is_err());
        let mut spec = NetworkSpec::default_for_dim(4);
        spec.output_activation = Activation::Relu;
        assert!(spec.validate().is_err());
        let mut spec = NetworkSpec::zero_bias_for_dim(4);
        spec.output_activation = Activation::Tanh;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn identity_weights_reproduce_the_input() {
        let spec = NetworkSpec {
            layer_sizes: vec![2, 2, 2],
            hidden_activation: Activation::Identity,
            output_activation: Activation::Identity,
            use_bias: true,
        };
        let mut net = Network::init(spec, 0).unwrap();
        for w in net.weights.iter_mut() {
            *w = Array2::eye(2);
        }
        let out = net.forward(array![1.5, -2.25].view()).unwrap();
        assert_eq!(out, array![1.5, -2.25]);
    }

    #[test]
    fn zero_bias_forward_is_positively_homogeneous() {
        let net = Network::init(NetworkSpec::zero_bias_for_dim(6), 3).unwrap();
        let mut rng = rng::rng_from_seed(11);
        for _ in 0..20 {
            let x = Array1::from(
                (0..6).map(|_| rng::standard_normal(&mut rng)).collect::<Vec<_>>(),
            );
            let fx = net.forward(x.view()).unwrap();
            for c in [0.1, 0.5, 2.0, 10.0] {
                let scaled = net.forward((c * &x).view()).unwrap();
                let diff = (&scaled - &(c * &fx)).mapv(f64::abs).sum();
                let norm = fx.mapv(f64::abs).sum() * c;
                assert!(diff <= 1e-6 * norm.max(1e-12), "c={c} diff={diff}");
            }
        }
    }

    #[test]
    fn softsign_output_stays_bounded() {
        let spec = tiny_spec(true, Activation::Softsign);
        let net = Network::init(spec, 5).unwrap();
        let mut rng = rng::rng_from_seed(2);
        for _ in 0..50 {
            let x = Array1::from(
                (0..3).map(|_| 100.0 * rng::standard_normal(&mut rng)).collect::<Vec<_>>(),
            );
            let y = net.forward(x.view()).unwrap();
            assert!(y.iter().all(|v| v.abs() < 1.0));
        }
    }

    #[test]
    fn radial_loss_term_examples() {
        assert_eq!(radial_loss_term(2.0, 2.0, 1.0, 1e-8).rho, 0.0);
        assert_eq!(radial_loss_term(2.0, 3.0, 1.0, 1e-8).rho, 0.5);
        // k = 2 asks for halved radii: a perfectly halved output has rho 0
        assert_eq!(radial_loss_term(2.0, 1.0, 2.0, 1e-8).rho, 0.0);
    }

    #[test]
    fn perfect_radius_preservation_gives_zero_loss() {
        let spec = NetworkSpec {
            layer_sizes: vec![2, 2, 2],
            hidden_activation: Activation::Identity,
            output_activation: Activation::Identity,
            use_bias: false,
        };
        let mut net = Network::init(spec, 0).unwrap();
        for w in net.weights.iter_mut() {
            *w = Array2::eye(2);
        }
        let batch = array![[1.0, 2.0], [3.0, -1.0]];
        let (loss, _) = radial_loss(&net, batch.view(), &Center::origin(2), 1.0, 1e-8).unwrap();
        assert_eq!(loss, 0.0);
    }

    /// Central finite differences over every parameter, the gradient oracle.
    fn finite_difference_check(spec: NetworkSpec, seed: u64) -> f64 {
        let net = Network::init(spec, seed).unwrap();
        let mut rng = rng::rng_from_seed(seed ^ 0xabcd);
        let d = net.input_dim();
        let batch = Array2::from_shape_fn((5, d), |_| rng::standard_normal(&mut rng));
        let center = Center::new((0..d).map(|_| 0.1 * rng::standard_normal(&mut rng)).collect());
        let k = 1.0;
        let eps_loss = 1e-8;
        let (_, grads) = radial_loss(&net, batch.view(), &center, k, eps_loss).unwrap();

        let mut worst: f64 = 0.0;
        let h = 1e-6;
        let mut probe = |net: &Network, layer: usize, idx: (usize, usize), bias: bool| -> f64 {
            let mut plus = net.clone();
            let mut minus = net.clone();
            if bias {
                plus.biases.as_mut().unwrap()[layer][idx.0] += h;
                minus.biases.as_mut().unwrap()[layer][idx.0] -= h;
            } else {
                plus.weights[layer][[idx.0, idx.1]] += h;
                minus.weights[layer][[idx.0, idx.1]] -= h;
            }
            let (lp, _) = radial_loss(&plus, batch.view(), &center, k, eps_loss).unwrap();
            let (lm, _) = radial_loss(&minus, batch.view(), &center, k, eps_loss).unwrap();
            (lp - lm) / (2.0 * h)
        };
        for l in 0..net.n_layers() {
            for ((r, cidx), &analytic) in grads.weights[l].indexed_iter() {
                let numeric = probe(&net, l, (r, cidx), false);
                let denom = (numeric.abs() + analytic.abs()).max(1e-6);
                worst = worst.max((numeric - analytic).abs() / denom);
            }
            if let Some(gb) = &grads.biases {
                for (r, &analytic) in gb[l].iter().enumerate() {
                    let numeric = probe(&net, l, (r, 0), true);
                    let denom = (numeric.abs() + analytic.abs()).max(1e-6);
                    worst = worst.max((numeric - analytic).abs() / denom);
                }
            }
        }
        worst
    }

    #[test]
    fn backprop_matches_finite_differences() {
        for (seed, out) in
            [(1u64, Activation::Identity), (2, Activation::Softsign), (3, Activation::Tanh)]
        {
            let err = finite_difference_check(tiny_spec(true, out), seed);
            assert!(err < 1e-4, "rel err {err} for {out:?}");
        }
        let err = finite_difference_check(tiny_spec(false, Activation::Identity), 4);
        assert!(err < 1e-4, "zero-bias rel err {err}");
    }

    fn small_sets(seed: u64) -> (Dataset, Dataset, Center) {
        let d = data::generate_artificial(600, 0.05, seed).unwrap();
        let spec = data::SplitSpec::new(0.8, seed).unwrap();
        let (train, test) = data::split(&d, &spec).unwrap();
        let center = data::center_of_mass(&train, None).unwrap();
        (train, test, center)
    }

    #[test]
    fn zero_epochs_returns_the_initial_net() {
        let (train, test, center) = small_sets(51);
        let mut net = Network::init(NetworkSpec::default_for_dim(15), 9).unwrap();
        let initial = net.clone();
        let cfg = TrainConfig { epochs: 0, ..Default::default() };
        let trace = fit_with_tracking(&mut net, &train, &test, &center, &cfg).unwrap();
        assert!(trace.epochs.is_empty());
        assert_eq!(trace.best_epoch, None);
        assert_eq!(trace.best_weights, initial);
        assert_eq!(net, initial);
    }

    #[test]
    fn zero_learning_rate_freezes_the_loss() {
        let (train, test, center) = small_sets(52);
        let mut net = Network::init(NetworkSpec::default_for_dim(15), 9).unwrap();
        let cfg = TrainConfig { epochs: 3, learning_rate: 0.0, ..Default::default() };
        let trace = fit_with_tracking(&mut net, &train, &test, &center, &cfg).unwrap();
        let first = trace.epochs[0].train_loss;
        for e in &trace.epochs {
            assert!((e.train_loss - first).abs() < 1e-12);
        }
    }

    #[test]
    fn training_is_deterministic_and_tracks_the_best_epoch() {
        let (train, test, center) = small_sets(53);
        let cfg = TrainConfig { epochs: 6, ..Default::default() };
        let mut n1 = Network::init(NetworkSpec::default_for_dim(15), 4).unwrap();
        let mut n2 = Network::init(NetworkSpec::default_for_dim(15), 4).unwrap();
        let t1 = fit_with_tracking(&mut n1, &train, &test, &center, &cfg).unwrap();
        let t2 = fit_with_tracking(&mut n2, &train, &test, &center, &cfg).unwrap();
        assert_eq!(t1.epochs, t2.epochs);
        assert_eq!(n1, n2);

        let best = t1.best_epoch.unwrap();
        let max = t1.epochs.iter().map(|e| e.test_auroc).fold(f64::MIN, f64::max);
        assert_eq!(t1.epochs[best].test_auroc, max);
        assert_eq!(t1.best_test_auroc, max);
    }

    #[test]
    fn training_rejects_contaminated_train_sets() {
        let (train, test, center) = small_sets(54);
        let mut net = Network::init(NetworkSpec::default_for_dim(15), 1).unwrap();
        let cfg = TrainConfig { epochs: 1, ..Default::default() };
        assert!(fit_with_tracking(&mut net, &test, &test, &center, &cfg).is_err());
        assert!(fit_with_tracking(&mut net, &train, &train, &center, &cfg).is_err());
    }

    #[test]
    fn reconstruction_scores_are_zero_for_identity_nets() {
        let spec = NetworkSpec {
            layer_sizes: vec![2, 2, 2],
            hidden_activation: Activation::Identity,
            output_activation: Activation::Identity,
            use_bias: false,
        };
        let mut net = Network::init(spec, 0).unwrap();
        for w in net.weights.iter_mut() {
            *w = Array2::eye(2);
        }
        let d = Dataset::with_default_names(array![[1.0, 2.0], [0.5, -0.5]], vec![0, 1]).unwrap();
        assert_eq!(reconstruction_error_scores(&net, &d).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn network_file_roundtrip_is_bitwise() {
        let net = Network::init(NetworkSpec::default_for_dim(7), 13).unwrap();
        let json = serde_json::to_string(&net.to_file()).unwrap();
        let parsed: NetworkFile = serde_json::from_str(&json).unwrap();
        let back = Network::from_file(&parsed).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn network_file_rejects_shape_lies() {
        let net = Network::init(NetworkSpec::default_for_dim(4), 13).unwrap();
        let mut file = net.to_file();
        file.weights[0].pop();
        assert!(Network::from_file(&file).is_err());
        let mut file = net.to_file();
        file.biases = None;
        assert!(Network::from_file(&file).is_err());
    }
}
