//! Fourier-side analysis of motifs.
//!
//! Covers the real Fourier basis, its periodic extension to `τ = k·n`, motif
//! spectra, the relative-area diagnostic over the `[−7, 7]²` grid, and the
//! alignment of motifs to Fourier columns.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{decompose, response_gram, MotifBasis, AREA_THRESHOLD};
use crate::numerics::{dft_real, dot, norm, principal_angles, ComplexMatrix, DenseMatrix};
use crate::reservoir::CycleReservoir;

/// Half-width of the complex-plane box used by [`relative_area`].
pub const AREA_HALF_WIDTH: f64 = 7.0;
/// Side length of one grid cell.
pub const AREA_CELL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FourierKind {
    Constant,
    Cos,
    Sin,
    Nyquist,
}

impl FourierKind {
    /// Whether the column is even under `i → −i (mod τ)`. This is not the
    /// index reversal `J`: for even `n` the Nyquist column is `J`-skew.
    pub fn is_even(self) -> bool {
        !matches!(self, FourierKind::Sin)
    }
}

/// Label of one basis column: its kind and frequency in cycles per window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierColumn {
    pub kind: FourierKind,
    pub frequency: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealFourierBasis {
    pub f: DenseMatrix,
    pub enumeration: Vec<FourierColumn>,
    pub domain_length: usize,
}

impl RealFourierBasis {
    pub fn n(&self) -> usize {
        self.enumeration.len()
    }

    /// Column indices carrying the given frequency.
    pub fn columns_at(&self, frequency: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| self.enumeration[j].frequency == frequency)
            .collect()
    }
}

/// Enumeration of `n` non-degenerate real Fourier columns: the constant,
/// `(cos_k, sin_k)` for `k = 1..⌈n/2⌉−1`, and a Nyquist-type cosine at
/// `k = n/2` when `n` is even.
fn enumerate_columns(n: usize) -> Vec<(FourierKind, usize)> {
    let mut cols = vec![(FourierKind::Constant, 0)];
    let pairs = (n - 1) / 2;
    for k in 1..=pairs {
        cols.push((FourierKind::Cos, k));
        cols.push((FourierKind::Sin, k));
    }
    if n.is_multiple_of(2) && n > 0 {
        cols.push((FourierKind::Nyquist, n / 2));
    }
    cols
}

/// Sampled real Fourier basis on `i = 0..τ−1`.
///
/// Columns are `√(2/τ)·cos(2πki/τ)` and `√(2/τ)·sin(2πki/τ)`; the constant
/// and Nyquist-type columns are renormalised to unit length.
pub fn real_fourier_basis(tau: usize, n: usize) -> Result<RealFourierBasis> {
    if n == 0 {
        return Err(Error::structural("Fourier basis needs at least one column"));
    }
    if n > tau {
        return Err(Error::structural(format!(
            "{n} Fourier columns do not fit a window of length {tau}"
        )));
    }
    let amp = (2.0 / tau as f64).sqrt();
    let mut columns = Vec::with_capacity(n);
    let mut enumeration = Vec::with_capacity(n);
    for (kind, k) in enumerate_columns(n) {
        let angle = |i: usize| 2.0 * PI * ((k * i) % tau) as f64 / tau as f64;
        let mut col: Vec<f64> = (0..tau)
            .map(|i| match kind {
                FourierKind::Sin => amp * angle(i).sin(),
                _ => amp * angle(i).cos(),
            })
            .collect();
        if matches!(kind, FourierKind::Constant | FourierKind::Nyquist) {
            let len = norm(&col);
            col.iter_mut().for_each(|x| *x /= len);
        }
        columns.push(col);
        enumeration.push(FourierColumn { kind, frequency: k });
    }
    Ok(RealFourierBasis {
        f: DenseMatrix::from_columns(&columns)?,
        enumeration,
        domain_length: tau,
    })
}

/// `k`-fold periodic extension of the `n`-point real Fourier basis.
///
/// Each column is the concatenation of `k` copies of an `n`-point column,
/// scaled by `1/√k`. At unit spectral radius these span the motif space for
/// window length `k·n`.
pub fn periodic_extension_basis(n: usize, k: usize) -> Result<RealFourierBasis> {
    if k == 0 {
        return Err(Error::structural("extension count must be at least 1"));
    }
    let base = real_fourier_basis(n, n)?;
    let scale = 1.0 / (k as f64).sqrt();
    let columns: Vec<Vec<f64>> = base
        .f
        .columns()
        .into_iter()
        .map(|c| {
            let mut out = Vec::with_capacity(n * k);
            for _ in 0..k {
                out.extend(c.iter().map(|x| x * scale));
            }
            out
        })
        .collect();
    Ok(RealFourierBasis {
        f: DenseMatrix::from_columns(&columns)?,
        enumeration: base
            .enumeration
            .iter()
            .map(|c| FourierColumn {
                kind: c.kind,
                frequency: c.frequency * k,
            })
            .collect(),
        domain_length: n * k,
    })
}

/// Column-wise DFT of the motifs; row `k` holds frequency bin `k`.
pub fn motif_fft(m: &MotifBasis) -> Result<ComplexMatrix> {
    if m.n_m() == 0 {
        return Err(Error::structural("no motifs to transform"));
    }
    let spectra = (0..m.n_m())
        .map(|j| dft_real(&m.motif(j)))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::from_columns(&spectra)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeAreaReport {
    pub rho: f64,
    pub area: f64,
    pub retained_motifs: usize,
    pub visited_cells: usize,
    pub total_cells: usize,
    /// Coefficients outside the box, counted in their boundary cell.
    pub clamped: usize,
    pub half_width: f64,
    pub cell: f64,
}

/// Fraction of grid cells in `[−h, h]²` visited by the coefficients.
///
/// Out-of-box coefficients are clamped to the nearest boundary cell. The
/// `rho` and `retained_motifs` fields are left for the caller to fill.
pub fn relative_area(
    coeffs: &[Complex64],
    half_width: f64,
    cell: f64,
) -> Result<RelativeAreaReport> {
    if cell.is_nan() || cell <= 0.0 || half_width.is_nan() || half_width <= 0.0 {
        return Err(Error::Precondition(format!(
            "grid needs positive cell size and half-width, got {cell} and {half_width}"
        )));
    }
    let side = (2.0 * half_width / cell).round() as i64;
    let mut clamped = 0;
    let mut visited = HashSet::new();
    for z in coeffs {
        let index = |x: f64| ((x + half_width) / cell).floor() as i64;
        let (ix, iy) = (index(z.re), index(z.im));
        let (cx, cy) = (ix.clamp(0, side - 1), iy.clamp(0, side - 1));
        if (cx, cy) != (ix, iy) {
            clamped += 1;
        }
        visited.insert((cx, cy));
    }
    let total = (side * side) as usize;
    Ok(RelativeAreaReport {
        rho: f64::NAN,
        area: visited.len() as f64 / total as f64,
        retained_motifs: 0,
        visited_cells: visited.len(),
        total_cells: total,
        clamped,
        half_width,
        cell,
    })
}

/// Relative area of the motif spectra of a metric tensor at threshold
/// [`AREA_THRESHOLD`].
pub fn motif_area(q: &DenseMatrix, rho: f64) -> Result<RelativeAreaReport> {
    let basis = decompose(q, AREA_THRESHOLD)?;
    let coeffs = if basis.n_m() == 0 {
        Vec::new()
    } else {
        motif_fft(&basis)?.as_slice().to_vec()
    };
    let mut report = relative_area(&coeffs, AREA_HALF_WIDTH, AREA_CELL)?;
    report.rho = rho;
    report.retained_motifs = basis.n_m();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Scr,
    Random,
}

/// Relative area at `τ = n` for each spectral radius.
///
/// `Scr` uses the cycle reservoir with sign pattern `signs`. `Random` draws one
/// dense standard-normal coupling from `seed` and rescales it to each `ρ`;
/// the input weights are `signs` in both modes.
pub fn rho_sweep(
    signs: &[f64],
    rhos: &[f64],
    mode: SweepMode,
    seed: u64,
) -> Result<Vec<RelativeAreaReport>> {
    let n = signs.len();
    if let Some(&bad) = rhos.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::Precondition(format!(
            "spectral radius {bad} outside (0, 1]"
        )));
    }
    match mode {
        SweepMode::Scr => rhos
            .iter()
            .map(|&rho| {
                let r = CycleReservoir::new(rho, signs.to_vec(), 1.0)?;
                motif_area(&response_gram(&r.impulse_responses(n)), rho)
            })
            .collect(),
        SweepMode::Random => {
            let (base, radius) = random_coupling(n, seed)?;
            rhos.iter()
                .map(|&rho| {
                    let w = base.scaled(rho / radius);
                    let mut responses = Vec::with_capacity(n);
                    let mut v = signs.to_vec();
                    for _ in 0..n {
                        let next = w.matvec(&v)?;
                        responses.push(v);
                        v = next;
                    }
                    motif_area(&response_gram(&responses), rho)
                })
                .collect()
        }
    }
}

/// Standard-normal `n×n` coupling with its estimated spectral radius.
///
/// A draw whose estimate is zero or non-finite is replaced by the draw for
/// the next seed, up to ten attempts.
pub fn random_coupling(n: usize, seed: u64) -> Result<(DenseMatrix, f64)> {
    for attempt in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let w = DenseMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let radius = spectral_radius_estimate(&w, &mut rng, 1000);
        if radius.is_finite() && radius > 1e-12 {
            return Ok((w, radius));
        }
    }
    Err(Error::Precondition(format!(
        "no usable random coupling in 10 draws starting at seed {seed}"
    )))
}

/// Spectral radius from the growth rate of `‖W^k·x‖` for a random complex
/// start, measured over the second half of `iterations` steps.
///
/// The growth rate is insensitive to a complex-conjugate dominant pair, where
/// the iterate direction itself never settles.
pub fn spectral_radius_estimate(w: &DenseMatrix, rng: &mut ChaCha8Rng, iterations: usize) -> f64 {
    let n = w.rows();
    let mut re: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let mut im: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let half = iterations / 2;
    let mut log_growth = 0.0;
    for step in 0..iterations {
        re = w.matvec(&re).expect("square");
        im = w.matvec(&im).expect("square");
        let len = (dot(&re, &re) + dot(&im, &im)).sqrt();
        if len <= 0.0 || !len.is_finite() {
            return if len == 0.0 { 0.0 } else { f64::NAN };
        }
        if step >= half {
            log_growth += len.ln();
        }
        re.iter_mut().chain(im.iter_mut()).for_each(|x| *x /= len);
    }
    (log_growth / (iterations - half) as f64).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyAlignment {
    pub frequency: usize,
    pub motifs: Vec<usize>,
    pub fourier_columns: Vec<usize>,
    pub cosines: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlignmentReport {
    pub frequencies: Vec<FrequencyAlignment>,
    /// Fourier column matched to each motif, in motif order.
    pub permutation: Vec<Option<usize>>,
    pub min_cosine: f64,
    /// Motifs whose dominant frequency has no Fourier column.
    pub unmatched_motifs: Vec<usize>,
}

/// Folded spectral energy `|X_b|² + |X_{τ−b}|²` per frequency `b ≤ τ/2`.
fn folded_energy(spectrum: &[Complex64]) -> Vec<f64> {
    let tau = spectrum.len();
    (0..=tau / 2)
        .map(|b| {
            let mirror = (tau - b) % tau;
            if mirror == b {
                spectrum[b].norm_sqr()
            } else {
                spectrum[b].norm_sqr() + spectrum[mirror].norm_sqr()
            }
        })
        .collect()
}

/// Groups motifs by their dominant frequency and compares each group with
/// the Fourier columns of that frequency.
pub fn align_motifs_to_fourier(m: &MotifBasis, f: &RealFourierBasis) -> Result<AlignmentReport> {
    if m.tau() != f.domain_length {
        return Err(Error::structural(format!(
            "motifs over R^{} but Fourier basis over R^{}",
            m.tau(),
            f.domain_length
        )));
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..m.n_m() {
        let energy = folded_energy(&dft_real(&m.motif(j))?);
        let mut order: Vec<usize> = (0..energy.len()).collect();
        order.sort_by(|&a, &b| energy[b].total_cmp(&energy[a]));
        let best = order[0];
        if let Some(&second) = order.get(1) {
            if energy[best] - energy[second] <= 1e-6 * energy[best] {
                return Err(Error::Ambiguity(format!(
                    "motif {j} has equal energy at frequencies {best} and {second}"
                )));
            }
        }
        groups.entry(best).or_default().push(j);
    }

    let mut frequencies = Vec::new();
    let mut permutation = vec![None; m.n_m()];
    let mut unmatched = Vec::new();
    let mut min_cosine: f64 = 1.0;
    for (frequency, motifs) in groups {
        let cols = f.columns_at(frequency);
        if cols.is_empty() {
            unmatched.extend(motifs);
            min_cosine = 0.0;
            continue;
        }
        let mu = m.motifs.select_columns(&motifs);
        let fv = f.f.select_columns(&cols);
        let mut cosines = principal_angles(&mu, &fv)?;
        if motifs.len() != cols.len() {
            // A dimension mismatch leaves part of the larger space unmatched.
            cosines.resize(motifs.len().max(cols.len()), 0.0);
        }
        min_cosine = cosines.iter().copied().fold(min_cosine, f64::min);

        let mut taken = HashSet::new();
        for &j in &motifs {
            let mj = m.motif(j);
            let best = cols
                .iter()
                .filter(|c| !taken.contains(*c))
                .max_by(|&&a, &&b| {
                    dot(&mj, &f.f.column(a))
                        .abs()
                        .total_cmp(&dot(&mj, &f.f.column(b)).abs())
                })
                .copied();
            if let Some(c) = best {
                taken.insert(c);
                permutation[j] = Some(c);
            }
        }
        frequencies.push(FrequencyAlignment {
            frequency,
            motifs,
            fourier_columns: cols,
            cosines,
        });
    }
    Ok(AlignmentReport {
        frequencies,
        permutation,
        min_cosine,
        unmatched_motifs: unmatched,
    })
}
