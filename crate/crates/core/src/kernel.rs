//! Reservoir kernel: metric tensor, motif decomposition and RMM features.
//!
//! Windows are chronological: `u[τ−1]` is the most recent sample. In these
//! coordinates the metric tensor is the Gram matrix of the feature-map
//! columns `W^{τ−j}·w`, so `uᵀQv = ⟨φ(u), φ(v)⟩` holds exactly. The lag-indexed
//! form `Q_{ij} = wᵀ(Wᵀ)^{i−1}W^{j−1}w` is the same matrix with rows and
//! columns reversed, available via [`MetricTensor::lag_ordered`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::numerics::{dot, norm, sym_eig, DenseMatrix, DEFAULT_EIG_TOL};
use crate::reservoir::CycleReservoir;

/// Relative threshold used by the relative-area pipeline.
pub const AREA_THRESHOLD: f64 = 1e-2;

/// Eigenvalues at or below this fraction of the largest are numerically zero
/// and never count as motifs.
pub const RANK_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricTensor {
    pub q: DenseMatrix,
    pub tau: usize,
    pub source: CycleReservoir,
}

impl MetricTensor {
    /// `J·Q·J`: entry `(i, j)` pairs lag `i` with lag `j`.
    pub fn lag_ordered(&self) -> DenseMatrix {
        let t = self.tau;
        DenseMatrix::from_fn(t, t, |i, j| self.q[(t - 1 - i, t - 1 - j)])
    }
}

/// Metric tensor of the reservoir kernel on windows of length `tau`.
///
/// Builds the impulse responses `W^k·w` once and forms their Gram matrix.
pub fn metric_tensor(r: &CycleReservoir, tau: usize) -> Result<MetricTensor> {
    if tau == 0 {
        return Err(Error::structural("window length must be at least 1"));
    }
    let q = response_gram(&r.impulse_responses(tau));
    Ok(MetricTensor {
        q,
        tau,
        source: r.clone(),
    })
}

/// Motifs (columns of `motifs`) with their weights, sorted descending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MotifBasis {
    pub motifs: DenseMatrix,
    pub weights: Vec<f64>,
    pub threshold_used: f64,
}

impl MotifBasis {
    pub fn from_parts(motifs: DenseMatrix, weights: Vec<f64>, threshold_used: f64) -> Result<Self> {
        if motifs.cols() != weights.len() {
            return Err(Error::structural(format!(
                "{} motifs but {} weights",
                motifs.cols(),
                weights.len()
            )));
        }
        Ok(Self {
            motifs,
            weights,
            threshold_used,
        })
    }

    /// Number of retained motifs.
    pub fn n_m(&self) -> usize {
        self.weights.len()
    }

    pub fn tau(&self) -> usize {
        self.motifs.rows()
    }

    pub fn motif(&self, i: usize) -> Vec<f64> {
        self.motifs.column(i)
    }

    /// Writes one motif per column with the weights as header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(out);
        w.write_record(self.weights.iter().map(|&x| fmt_f64(x)))?;
        for i in 0..self.tau() {
            w.write_record(self.motifs.row(i).iter().map(|&x| fmt_f64(x)))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Eigenpairs of `Q` whose weight is at least `rel_threshold·λ_max`.
///
/// Weights at or below [`RANK_FLOOR`]`·λ_max` are dropped regardless, so the
/// basis spans the numerical range of `Q`. A zero tensor gives an empty basis.
pub fn motif_decomposition(q: &MetricTensor, rel_threshold: f64) -> Result<MotifBasis> {
    decompose(&q.q, rel_threshold)
}

/// [`motif_decomposition`] for any symmetric PSD matrix.
pub fn decompose(q: &DenseMatrix, rel_threshold: f64) -> Result<MotifBasis> {
    if !(0.0..1.0).contains(&rel_threshold) {
        return Err(Error::Precondition(format!(
            "relative threshold must lie in [0, 1), got {rel_threshold}"
        )));
    }
    let eig = sym_eig(q, DEFAULT_EIG_TOL)?;
    let lambda_max = eig.values.first().copied().unwrap_or(0.0);
    let cut = rel_threshold * lambda_max;
    let floor = RANK_FLOOR * lambda_max;
    let keep: Vec<usize> = (0..eig.dim())
        .filter(|&i| {
            let l = eig.values[i];
            l > 0.0 && l > floor && l >= cut
        })
        .collect();
    Ok(MotifBasis {
        motifs: eig.vectors.select_columns(&keep),
        weights: keep.iter().map(|&i| eig.values[i]).collect(),
        threshold_used: cut.max(floor),
    })
}

/// Gram matrix of the feature-map columns in chronological order, given the
/// impulse responses `[w, W·w, …, W^{τ−1}·w]` of any linear reservoir.
pub fn response_gram(responses: &[Vec<f64>]) -> DenseMatrix {
    let tau = responses.len();
    let mut q = DenseMatrix::zeros(tau, tau);
    for i in 0..tau {
        for j in i..tau {
            let v = dot(&responses[tau - 1 - i], &responses[tau - 1 - j]);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

/// Every eigenpair of `Q`, including the numerically zero ones.
///
/// Used by the structural census, which classifies a complete basis.
pub fn complete_eigenbasis(q: &MetricTensor) -> Result<MotifBasis> {
    let eig = sym_eig(&q.q, DEFAULT_EIG_TOL)?;
    Ok(MotifBasis {
        motifs: eig.vectors,
        weights: eig.values,
        threshold_used: f64::NEG_INFINITY,
    })
}

/// `uᵀQv`
pub fn kernel_eval(q: &MetricTensor, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != q.tau || v.len() != q.tau {
        return Err(Error::structural(format!(
            "windows of length {} and {} for a tensor of order {}",
            u.len(),
            v.len(),
            q.tau
        )));
    }
    Ok(dot(u, &q.q.matvec(v)?))
}

/// Motif for window length `k·n` built from a motif for window length `n`.
///
/// Block `l` (oldest first) is scaled by `ρ^{(k−1−l)·n}` so the most recent
/// block carries unit scale; the result is renormalised.
pub fn replicate_motif(base: &[f64], k: usize, rho: f64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::structural("replication count must be at least 1"));
    }
    let n = base.len();
    let mut out = Vec::with_capacity(k * n);
    for l in 0..k {
        let scale = rho.powi(((k - 1 - l) * n) as i32);
        out.extend(base.iter().map(|x| x * scale));
    }
    let len = norm(&out);
    if len > 0.0 {
        out.iter_mut().for_each(|x| *x /= len);
    }
    Ok(out)
}

/// Projections `⟨m_i, u⟩` of a window onto each motif.
///
/// The adaptable per-motif coefficients of an RMM are left to the linear
/// readout that consumes these features.
pub fn rmm_features(m: &MotifBasis, u: &[f64]) -> Result<Vec<f64>> {
    project(&m.motifs, u)
}

/// `Bᵀu` for a column basis `B`.
pub(crate) fn project(basis: &DenseMatrix, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != basis.rows() {
        return Err(Error::structural(format!(
            "window of length {} for a basis over R^{}",
            u.len(),
            basis.rows()
        )));
    }
    let mut out = vec![0.0; basis.cols()];
    for (i, &ui) in u.iter().enumerate() {
        for (o, b) in out.iter_mut().zip(basis.row(i)) {
            *o += ui * b;
        }
    }
    Ok(out)
}
