//! Structural checks on reservoir kernels.
//!
//! Covers the block Gram matrix `X_ρ` of the coupling powers, which is `λ`
//! times a rank-`n` projection, and the unit-radius structure of `Q`: it is
//! circulant, hence Toeplitz and centrosymmetric, its eigenvectors are real
//! Fourier columns, and its eigenbasis splits into `⌈n/2⌉` symmetric and
//! `⌊n/2⌋` skew vectors under index reversal `J`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{MetricTensor, MotifBasis, RANK_FLOOR};
use crate::numerics::{dft_real, norm, principal_angles, sym_eig, DenseMatrix, DEFAULT_EIG_TOL};
use crate::reservoir::CycleReservoir;
use crate::spectral::real_fourier_basis;

/// Largest `τ·n` for which `X_ρ` is assembled densely.
pub const MAX_GRAM_ROWS: usize = 4096;

/// Relative gap below which two weights belong to one degeneracy class.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// Norm below which a symmetric or skew component is treated as absent.
const COMPONENT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct GramBlockMatrix {
    pub x: DenseMatrix,
    pub lambda: f64,
    pub n: usize,
    pub tau: usize,
    pub rho: f64,
}

/// `λ = Σ_{k<τ} ρ^{2k}`
pub fn gram_lambda(rho: f64, tau: usize) -> f64 {
    if rho == 1.0 {
        tau as f64
    } else {
        (1.0 - rho.powi(2 * tau as i32)) / (1.0 - rho * rho)
    }
}

/// Assembles `X_ρ`, whose block `(a, b)` is `ρ^{a+b}·C^{b−a}`.
pub fn build_gram_block(r: &CycleReservoir, tau: usize) -> Result<GramBlockMatrix> {
    let n = r.n();
    if tau == 0 {
        return Err(Error::structural("window length must be at least 1"));
    }
    let rows = tau * n;
    if rows > MAX_GRAM_ROWS {
        return Err(Error::Resource(format!(
            "X_ρ would have {rows} rows, limit is {MAX_GRAM_ROWS}"
        )));
    }
    let rho = r.rho();
    let powers: Vec<f64> = (0..2 * tau).map(|k| rho.powi(k as i32)).collect();
    // (C^k)_{pq} = 1 iff p − q ≡ k (mod n)
    let x = DenseMatrix::from_fn(rows, rows, |i, j| {
        let (a, p) = (i / n, i % n);
        let (b, q) = (j / n, j % n);
        let shift = (b as i64 - a as i64).rem_euclid(n as i64) as usize;
        if (p + n - q) % n == shift {
            powers[a + b]
        } else {
            0.0
        }
    });
    Ok(GramBlockMatrix {
        x,
        lambda: gram_lambda(rho, tau),
        n,
        tau,
        rho,
    })
}

impl GramBlockMatrix {
    /// `ŵᵀ·X_ρ·ŵ` with `ŵ = diag(w, …, w)`; equals the lag-ordered metric tensor.
    pub fn project_inputs(&self, w: &[f64]) -> Result<DenseMatrix> {
        if w.len() != self.n {
            return Err(Error::structural("input weights do not match n"));
        }
        let (n, tau) = (self.n, self.tau);
        Ok(DenseMatrix::from_fn(tau, tau, |a, b| {
            let mut s = 0.0;
            for p in 0..n {
                for q in 0..n {
                    s += w[p] * self.x[(a * n + p, b * n + q)] * w[q];
                }
            }
            s
        }))
    }
}

/// `‖X_ρ² − λ·X_ρ‖_max`
pub fn verify_idempotent_scaled(g: &GramBlockMatrix) -> Result<f64> {
    let sq = g.x.matmul(&g.x)?;
    Ok(sq.sub(&g.x.scaled(g.lambda))?.max_abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    /// Eigenvalues within `1e-8·λ` of `λ`.
    pub multiplicity: usize,
    /// Largest distance of any eigenvalue from `{0, λ}`.
    pub max_deviation: f64,
}

/// Eigenvalue census of `X_ρ`: every eigenvalue should be `0` or `λ`, the
/// latter with multiplicity `n`.
pub fn verify_rank(g: &GramBlockMatrix) -> Result<RankReport> {
    let eig = sym_eig(&g.x, DEFAULT_EIG_TOL)?;
    let tol = 1e-8 * g.lambda;
    let multiplicity = eig
        .values
        .iter()
        .filter(|&&v| (v - g.lambda).abs() <= tol)
        .count();
    let max_deviation = eig
        .values
        .iter()
        .map(|&v| v.abs().min((v - g.lambda).abs()))
        .fold(0.0, f64::max);
    Ok(RankReport {
        multiplicity,
        max_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixStructure {
    pub toeplitz: PropertyCheck,
    pub circulant: PropertyCheck,
    pub centrosymmetric: PropertyCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetryCensus {
    pub n_symmetric: usize,
    pub n_skew: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub matrix: Option<MatrixStructure>,
    pub census: Option<SymmetryCensus>,
    pub tolerance: f64,
}

/// Toeplitz, circulant and centrosymmetry deviations of a square matrix.
///
/// A property holds when its deviation is at most `tol·‖A‖_max`.
pub fn matrix_structure(a: &DenseMatrix, tol: f64) -> Result<MatrixStructure> {
    if !a.is_square() {
        return Err(Error::structural("structure checks need a square matrix"));
    }
    let t = a.rows();
    let (mut toe, mut circ, mut centro) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..t {
        for j in 0..t {
            let v = a[(i, j)];
            if i + 1 < t && j + 1 < t {
                toe = toe.max((v - a[(i + 1, j + 1)]).abs());
            }
            circ = circ.max((v - a[((i + 1) % t, (j + 1) % t)]).abs());
            centro = centro.max((v - a[(t - 1 - i, t - 1 - j)]).abs());
        }
    }
    let limit = tol * a.max_abs();
    let check = |d: f64| PropertyCheck {
        holds: d <= limit,
        max_deviation: d,
    };
    Ok(MatrixStructure {
        toeplitz: check(toe),
        circulant: check(circ),
        centrosymmetric: check(centro),
    })
}

pub fn toeplitz_circulant_centro_check(q: &MetricTensor, tol: f64) -> Result<StructureReport> {
    Ok(StructureReport {
        matrix: Some(matrix_structure(&q.q, tol)?),
        census: None,
        tolerance: tol,
    })
}

fn reversed(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

/// Chains of consecutive weights whose neighbours differ by at most
/// `gap·max(λ_max, 1)`.
pub fn degeneracy_classes(weights: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let scale = weights.iter().fold(1.0f64, |m, w| m.max(w.abs()));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        match classes.last_mut() {
            Some(c) if (weights[*c.last().unwrap()] - w).abs() <= gap * scale => c.push(i),
            _ => classes.push(vec![i]),
        }
    }
    classes
}

/// Orthonormalises the candidates by pivoted Gram–Schmidt, dropping
/// residuals shorter than `COMPONENT_FLOOR`.
fn pivoted_gram_schmidt(mut candidates: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while !candidates.is_empty() {
        let (idx, len) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if len < COMPONENT_FLOOR {
            break;
        }
        let mut v = candidates.swap_remove(idx);
        v.iter_mut().for_each(|x| *x /= len);
        for c in candidates.iter_mut() {
            let proj: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
            c.iter_mut().zip(&v).for_each(|(a, b)| *a -= proj * b);
        }
        out.push(v);
    }
    out
}

/// Rotates each degeneracy class into eigenvectors of the exchange matrix `J`.
///
/// Within a class the basis is replaced by orthonormalised `v + Jv`
/// (symmetric) and `v − Jv` (skew) components. Weights within a class are
/// reassigned in their original order. Fails when a class does not split
/// into exactly as many `J`-eigenvectors as it has members, or when an
/// output vector is not `J`-(anti)symmetric within `tol`.
pub fn canonicalize_symmetry(m: &MotifBasis, tol: f64) -> Result<(MotifBasis, StructureReport)> {
    let mut columns = Vec::with_capacity(m.n_m());
    let mut weights = Vec::with_capacity(m.n_m());
    let mut census = SymmetryCensus {
        n_symmetric: 0,
        n_skew: 0,
    };
    for class in degeneracy_classes(&m.weights, DEGENERACY_GAP) {
        let vs: Vec<Vec<f64>> = class.iter().map(|&i| m.motif(i)).collect();
        let sym: Vec<Vec<f64>> = vs
            .iter()
            .map(|v| {
                v.iter()
                    .zip(reversed(v))
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect()
            })
            .collect();
        let skew: Vec<Vec<f64>> = vs
            .iter()
            .map(|v| {
                v.iter()
                    .zip(reversed(v))
                    .map(|(a, b)| 0.5 * (a - b))
                    .collect()
            })
            .collect();
        let sym = pivoted_gram_schmidt(sym);
        let skew = pivoted_gram_schmidt(skew);
        if sym.len() + skew.len() != class.len() {
            return Err(Error::StructureViolation(format!(
                "weight class at {:.6e} of size {} splits into {} symmetric and {} skew directions",
                m.weights[class[0]],
                class.len(),
                sym.len(),
                skew.len()
            )));
        }
        for (v, sign) in sym
            .iter()
            .map(|v| (v, 1.0))
            .chain(skew.iter().map(|v| (v, -1.0)))
        {
            let dev = v
                .iter()
                .zip(reversed(v))
                .fold(0.0f64, |d, (a, b)| d.max((sign * b - a).abs()));
            if dev > tol {
                return Err(Error::StructureViolation(format!(
                    "rotated motif deviates from J-{} by {dev:e}",
                    if sign > 0.0 {
                        "symmetry"
                    } else {
                        "skew symmetry"
                    }
                )));
            }
        }
        census.n_symmetric += sym.len();
        census.n_skew += skew.len();
        columns.extend(sym);
        columns.extend(skew);
        weights.extend(class.iter().map(|&i| m.weights[i]));
    }
    let motifs = if columns.is_empty() {
        DenseMatrix::zeros(m.tau(), 0)
    } else {
        DenseMatrix::from_columns(&columns)?
    };
    Ok((
        MotifBasis::from_parts(motifs, weights, m.threshold_used)?,
        StructureReport {
            matrix: None,
            census: Some(census),
            tolerance: tol,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassAlignment {
    pub weight: f64,
    pub dimension: usize,
    pub frequencies: Vec<usize>,
    pub min_cosine: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarmonicReport {
    /// `n·|⟨ξ_f, w⟩|²` for `f = 0..⌊n/2⌋`, i.e. `|DFT(w)_f|²`.
    pub predicted_weights: Vec<f64>,
    pub classes: Vec<ClassAlignment>,
    pub min_cosine: f64,
    pub max_weight_rel_error: f64,
    pub max_pair_rel_gap: f64,
}

/// Compares unit-radius motifs at `τ = n` with the Fourier prediction.
///
/// Each weight class must span the real Fourier columns of the frequencies
/// predicted to carry that weight; the sorted weights must match the
/// predicted list; and each conjugate frequency pair must carry two equal
/// weights.
pub fn verify_harmonic(m: &MotifBasis, r: &CycleReservoir) -> Result<HarmonicReport> {
    let n = r.n();
    if r.rho() != 1.0 {
        return Err(Error::Precondition(format!(
            "harmonic motifs need unit spectral radius, got {}",
            r.rho()
        )));
    }
    if m.tau() != n {
        return Err(Error::Precondition(format!(
            "harmonic motifs need τ = n = {n}, got τ = {}",
            m.tau()
        )));
    }
    let spectrum = dft_real(&r.input_weights())?;
    let predicted: Vec<f64> = (0..=n / 2).map(|f| spectrum[f].norm_sqr()).collect();
    let fourier = real_fourier_basis(n, n)?;

    // Expanded prediction: one entry per Fourier column, above the rank floor.
    let lambda_max = predicted.iter().fold(0.0f64, |a, &b| a.max(b));
    let floor = RANK_FLOOR * lambda_max;
    let mut expected: Vec<(f64, usize)> = fourier
        .enumeration
        .iter()
        .map(|c| (predicted[c.frequency], c.frequency))
        .filter(|&(w, _)| w > floor)
        .collect();
    expected.sort_by(|a, b| b.0.total_cmp(&a.0));

    if expected.len() != m.n_m() {
        return Err(Error::StructureViolation(format!(
            "{} motifs but {} Fourier directions carry positive weight",
            m.n_m(),
            expected.len()
        )));
    }
    let max_weight_rel_error = m
        .weights
        .iter()
        .zip(&expected)
        .map(|(got, (want, _))| (got - want).abs() / want)
        .fold(0.0, f64::max);

    let mut max_pair_rel_gap: f64 = 0.0;
    for (f, &p) in predicted.iter().enumerate().take(n.div_ceil(2)).skip(1) {
        let slots: Vec<usize> = (0..expected.len())
            .filter(|&i| expected[i].1 == f)
            .collect();
        if let [a, b] = slots[..] {
            let gap = (m.weights[a] - m.weights[b]).abs() / p;
            max_pair_rel_gap = max_pair_rel_gap.max(gap);
        }
    }

    let mut classes = Vec::new();
    let mut min_cosine: f64 = 1.0;
    let scale = lambda_max.max(1.0);
    for class in degeneracy_classes(&m.weights, DEGENERACY_GAP) {
        let weight = m.weights[class[0]];
        let lo = m.weights[*class.last().unwrap()] - DEGENERACY_GAP * scale;
        let hi = weight + DEGENERACY_GAP * scale;
        let frequencies: Vec<usize> = (0..predicted.len())
            .filter(|&f| predicted[f] > floor && (lo..=hi).contains(&predicted[f]))
            .collect();
        let cols: Vec<usize> = frequencies
            .iter()
            .flat_map(|&f| fourier.columns_at(f))
            .collect();
        let cosines = if cols.is_empty() {
            vec![0.0]
        } else {
            let mut c = principal_angles(
                &m.motifs.select_columns(&class),
                &fourier.f.select_columns(&cols),
            )?;
            if cols.len() != class.len() {
                c.push(0.0);
            }
            c
        };
        let class_min = cosines.iter().copied().fold(1.0, f64::min);
        min_cosine = min_cosine.min(class_min);
        classes.push(ClassAlignment {
            weight,
            dimension: class.len(),
            frequencies,
            min_cosine: class_min,
        });
    }
    Ok(HarmonicReport {
        predicted_weights: predicted,
        classes,
        min_cosine,
        max_weight_rel_error,
        max_pair_rel_gap,
    })
}
