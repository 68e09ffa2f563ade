//! Sliding-window forecasting with linear readouts over motif, Fourier or
//! reservoir-state features, trained by ridge regression to all horizons at
//! once.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{DatasetManifest, Slice, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::kernel::{metric_tensor, motif_decomposition, project, MotifBasis};
use crate::numerics::{ridge_solve, DenseMatrix};
use crate::reservoir::{CycleReservoir, FORECAST_INPUT_SCALE};
use crate::spectral::{periodic_extension_basis, real_fourier_basis, RealFourierBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    /// Projections onto the SCR motifs.
    RmmScr,
    /// Projections onto the sampled real Fourier basis of the window.
    RmmFourier,
    /// Projections onto the periodic extension of the `n`-point Fourier basis.
    RmmFourierPeriodic,
    /// Reservoir state after driving the window from the zero state.
    ScrState,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 4] = [
        FeatureKind::RmmScr,
        FeatureKind::RmmFourier,
        FeatureKind::RmmFourierPeriodic,
        FeatureKind::ScrState,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::RmmScr => "rmm-scr",
            FeatureKind::RmmFourier => "rmm-fourier",
            FeatureKind::RmmFourierPeriodic => "rmm-fourier-periodic",
            FeatureKind::ScrState => "scr-state",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model {s:?}; expected one of rmm-scr, rmm-fourier, rmm-fourier-periodic, scr-state"
                ))
            })
    }
}

/// Look-back windows and their targets from one slice of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    pub tau: usize,
    pub horizon: usize,
    pub slice: Slice,
    /// One window per row, oldest sample first.
    pub inputs: DenseMatrix,
    /// The `horizon` samples following each window.
    pub targets: DenseMatrix,
    /// Absolute index of each window's first sample.
    pub origins: Vec<usize>,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }
}

/// All stride-one windows inside `slice`; `len − τ − H + 1` of them.
pub fn make_windows(
    d: &TimeSeriesDataset,
    slice: Slice,
    tau: usize,
    horizon: usize,
) -> Result<WindowSet> {
    if tau == 0 || horizon == 0 {
        return Err(Error::Config(format!(
            "look-back and horizon must be positive, got tau={tau}, horizon={horizon}"
        )));
    }
    let range = d.split().get(slice);
    let required = tau + horizon;
    if range.len() < required {
        return Err(Error::InsufficientData {
            what: format!("{slice} slice of {:?}", d.name()),
            available: range.len(),
            required,
        });
    }
    let values = d.values();
    let count = range.len() - required + 1;
    let origins: Vec<usize> = (range.start..range.start + count).collect();
    let inputs = DenseMatrix::from_fn(count, tau, |w, i| values[origins[w] + i]);
    let targets = DenseMatrix::from_fn(count, horizon, |w, h| values[origins[w] + tau + h]);
    Ok(WindowSet {
        tau,
        horizon,
        slice,
        inputs,
        targets,
        origins,
    })
}

/// A linear window-to-feature map `u ↦ Bᵀu`.
///
/// For the reservoir-state kind `B` stacks `W^{τ−1−j}·w` as row `j`, which is
/// exactly the state reached by driving the window from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    kind: FeatureKind,
    basis: DenseMatrix,
}

impl FeatureMap {
    pub fn from_motifs(m: &MotifBasis) -> Self {
        Self {
            kind: FeatureKind::RmmScr,
            basis: m.motifs.clone(),
        }
    }

    pub fn from_fourier(f: &RealFourierBasis, kind: FeatureKind) -> Result<Self> {
        if !matches!(
            kind,
            FeatureKind::RmmFourier | FeatureKind::RmmFourierPeriodic
        ) {
            return Err(Error::Precondition(format!(
                "{kind} is not a Fourier feature kind"
            )));
        }
        Ok(Self {
            kind,
            basis: f.f.clone(),
        })
    }

    pub fn from_reservoir(r: &CycleReservoir, tau: usize) -> Self {
        let responses = r.impulse_responses(tau);
        Self {
            kind: FeatureKind::ScrState,
            basis: DenseMatrix::from_fn(tau, r.n(), |j, k| responses[tau - 1 - j][k]),
        }
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn tau(&self) -> usize {
        self.basis.rows()
    }

    pub fn n_features(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn features(&self, u: &[f64]) -> Result<Vec<f64>> {
        project(&self.basis, u)
    }

    /// Feature matrix, one row per window.
    pub fn design(&self, w: &WindowSet) -> Result<DenseMatrix> {
        if w.tau != self.tau() {
            return Err(Error::structural(format!(
                "windows have length {}, feature map expects {}",
                w.tau,
                self.tau()
            )));
        }
        w.inputs.matmul(&self.basis)
    }
}

/// `ŷ = φ(u)ᵀ·weights + bias`, one column per step ahead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RidgeReadout {
    /// features × horizon
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub alpha: f64,
    pub feature_kind: FeatureKind,
}

fn column_means(a: &DenseMatrix) -> Vec<f64> {
    let mut m = vec![0.0; a.cols()];
    for i in 0..a.rows() {
        for (mj, x) in m.iter_mut().zip(a.row(i)) {
            *mj += x;
        }
    }
    let n = a.rows().max(1) as f64;
    m.iter_mut().for_each(|x| *x /= n);
    m
}

fn centered(a: &DenseMatrix, means: &[f64]) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] - means[j])
}

/// Ridge fit on train-centered features and targets.
pub fn fit(map: &FeatureMap, w: &WindowSet, alpha: f64) -> Result<RidgeReadout> {
    if w.is_empty() {
        return Err(Error::InsufficientData {
            what: "training windows".into(),
            available: 0,
            required: 1,
        });
    }
    let x = map.design(w)?;
    let x_mean = column_means(&x);
    let y_mean = column_means(&w.targets);
    let weights = ridge_solve(
        &centered(&x, &x_mean),
        &centered(&w.targets, &y_mean),
        alpha,
    )?;
    let bias = (0..w.horizon)
        .map(|h| {
            y_mean[h]
                - (0..x_mean.len())
                    .map(|f| x_mean[f] * weights[(f, h)])
                    .sum::<f64>()
        })
        .collect();
    if !weights.is_finite() {
        return Err(Error::Singular("ridge weights are not finite".into()));
    }
    Ok(RidgeReadout {
        weights,
        bias,
        alpha,
        feature_kind: map.kind(),
    })
}

pub fn predict(r: &RidgeReadout, map: &FeatureMap, w: &WindowSet) -> Result<DenseMatrix> {
    if r.feature_kind != map.kind() {
        return Err(Error::Precondition(format!(
            "readout trained on {} features, given {}",
            r.feature_kind,
            map.kind()
        )));
    }
    if r.weights.rows() != map.n_features() || r.weights.cols() != w.horizon {
        return Err(Error::structural(format!(
            "readout is {}x{}, features {} and horizon {}",
            r.weights.rows(),
            r.weights.cols(),
            map.n_features(),
            w.horizon
        )));
    }
    let mut p = map.design(w)?.matmul(&r.weights)?;
    for i in 0..p.rows() {
        for h in 0..p.cols() {
            p[(i, h)] += r.bias[h];
        }
    }
    Ok(p)
}

/// Mean squared error over every entry.
pub fn mse(pred: &DenseMatrix, target: &DenseMatrix) -> Result<f64> {
    if pred.shape() != target.shape() {
        return Err(Error::structural("prediction and target shapes differ"));
    }
    let n = pred.as_slice().len().max(1) as f64;
    Ok(pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
}

/// `max |a − b| / max(|a|, |b|)` over matching entries, with `0/0 = 0`.
pub fn max_relative_deviation(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::structural("shapes differ"));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| {
            let d = (x - y).abs();
            if d == 0.0 {
                0.0
            } else {
                d / x.abs().max(y.abs())
            }
        })
        .fold(0.0, f64::max))
}

/// Configuration of one comparison run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub n: usize,
    pub rho: f64,
    pub tau: usize,
    pub horizon: usize,
    pub alpha: f64,
    pub r_in: f64,
    /// Relative motif threshold; 0 keeps every motif above the rank floor.
    pub threshold: f64,
    pub seed: u64,
    pub models: Vec<FeatureKind>,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            n: 97,
            rho: 1.0,
            tau: 194,
            horizon: 168,
            alpha: 1e-3,
            r_in: FORECAST_INPUT_SCALE,
            threshold: 0.0,
            seed: 0,
            models: vec![
                FeatureKind::RmmScr,
                FeatureKind::RmmFourier,
                FeatureKind::ScrState,
            ],
        }
    }
}

impl ForecastConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.tau == 0 || self.horizon == 0 {
            return Err(Error::Config("n, tau and horizon must be positive".into()));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::Config(format!(
                "rho must lie in (0, 1], got {}",
                self.rho
            )));
        }
        if self.alpha < 0.0 || !self.alpha.is_finite() {
            return Err(Error::Config(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if self.r_in <= 0.0 || !self.r_in.is_finite() {
            return Err(Error::Config(format!(
                "r_in must be positive, got {}",
                self.r_in
            )));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold must lie in [0, 1), got {}",
                self.threshold
            )));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models configured".into()));
        }
        Ok(())
    }

    pub fn reservoir(&self) -> Result<CycleReservoir> {
        CycleReservoir::with_pi_pattern(self.n, self.rho, self.r_in)
    }

    /// Builds the feature map for one model kind.
    pub fn feature_map(&self, kind: FeatureKind) -> Result<FeatureMap> {
        match kind {
            FeatureKind::RmmScr => {
                let q = metric_tensor(&self.reservoir()?, self.tau)?;
                Ok(FeatureMap::from_motifs(&motif_decomposition(
                    &q,
                    self.threshold,
                )?))
            }
            FeatureKind::RmmFourier => {
                if self.n > self.tau {
                    return Err(Error::Config(format!(
                        "rmm-fourier needs n <= tau, got n={} tau={}",
                        self.n, self.tau
                    )));
                }
                FeatureMap::from_fourier(&real_fourier_basis(self.tau, self.n)?, kind)
            }
            FeatureKind::RmmFourierPeriodic => {
                if !self.tau.is_multiple_of(self.n) {
                    return Err(Error::Config(format!(
                        "rmm-fourier-periodic needs tau to be a multiple of n, got n={} tau={}",
                        self.n, self.tau
                    )));
                }
                FeatureMap::from_fourier(
                    &periodic_extension_basis(self.n, self.tau / self.n)?,
                    kind,
                )
            }
            FeatureKind::ScrState => Ok(FeatureMap::from_reservoir(&self.reservoir()?, self.tau)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelResult {
    pub label: String,
    pub kind: FeatureKind,
    pub n_features: usize,
    pub train_windows: usize,
    pub test_windows: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    #[serde(skip)]
    pub test_predictions: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseDelta {
    pub a: String,
    pub b: String,
    pub abs_delta_mse: f64,
    pub max_relative_prediction_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastReport {
    pub version: String,
    pub config: ForecastConfig,
    pub dataset: DatasetManifest,
    pub models: Vec<ModelResult>,
    pub pairwise: Vec<PairwiseDelta>,
    #[serde(skip)]
    pub test_targets: DenseMatrix,
    #[serde(skip)]
    pub test_origins: Vec<usize>,
}

impl ForecastReport {
    pub fn model(&self, label: &str) -> Option<&ModelResult> {
        self.models.iter().find(|m| m.label == label)
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseDelta> {
        self.pairwise
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }

    /// One row per model.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "model",
            "kind",
            "n_features",
            "train_windows",
            "test_windows",
            "train_mse",
            "test_mse",
        ])?;
        for m in &self.models {
            w.write_record([
                m.label.clone(),
                m.kind.to_string(),
                m.n_features.to_string(),
                m.train_windows.to_string(),
                m.test_windows.to_string(),
                fmt_f64(m.train_mse),
                fmt_f64(m.test_mse),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Per-window test predictions in long form: origin, step, target, then
    /// one column per model.
    pub fn write_predictions_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["origin".to_string(), "step".into(), "target".into()];
        header.extend(self.models.iter().map(|m| m.label.clone()));
        w.write_record(&header)?;
        for (i, origin) in self.test_origins.iter().enumerate() {
            for h in 0..self.test_targets.cols() {
                let mut row = vec![
                    origin.to_string(),
                    (h + 1).to_string(),
                    fmt_f64(self.test_targets[(i, h)]),
                ];
                row.extend(
                    self.models
                        .iter()
                        .map(|m| fmt_f64(m.test_predictions[(i, h)])),
                );
                w.write_record(&row)?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Fits every configured model on the train slice and scores it on the
/// test slice.
pub fn compare(config: &ForecastConfig, d: &TimeSeriesDataset) -> Result<ForecastReport> {
    config.validate()?;
    d.require_slice_len(config.tau + config.horizon)?;
    let train = make_windows(d, Slice::Train, config.tau, config.horizon)?;
    let test = make_windows(d, Slice::Test, config.tau, config.horizon)?;

    let mut models: Vec<ModelResult> = Vec::with_capacity(config.models.len());
    for &kind in &config.models {
        let map = config.feature_map(kind)?;
        let readout = fit(&map, &train, config.alpha)?;
        let train_pred = predict(&readout, &map, &train)?;
        let test_pred = predict(&readout, &map, &test)?;
        let seen = models.iter().filter(|m| m.kind == kind).count();
        let label = if seen == 0 {
            kind.to_string()
        } else {
            format!("{kind}#{}", seen + 1)
        };
        models.push(ModelResult {
            label,
            kind,
            n_features: map.n_features(),
            train_windows: train.len(),
            test_windows: test.len(),
            train_mse: mse(&train_pred, &train.targets)?,
            test_mse: mse(&test_pred, &test.targets)?,
            test_predictions: test_pred,
        });
    }

    let mut pairwise = Vec::new();
    for i in 0..models.len() {
        for j in i + 1..models.len() {
            pairwise.push(PairwiseDelta {
                a: models[i].label.clone(),
                b: models[j].label.clone(),
                abs_delta_mse: (models[i].test_mse - models[j].test_mse).abs(),
                max_relative_prediction_deviation: max_relative_deviation(
                    &models[i].test_predictions,
                    &models[j].test_predictions,
                )?,
            });
        }
    }

    Ok(ForecastReport {
        version: crate::VERSION.to_string(),
        config: config.clone(),
        dataset: d.manifest(),
        models,
        pairwise,
        test_targets: test.targets,
        test_origins: test.origins,
    })
}
