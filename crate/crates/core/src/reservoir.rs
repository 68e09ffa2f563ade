//! Simple cycle reservoirs and their linear state recursion.
//!
//! The coupling is `W = ρ·C` with `C` the canonical full-cycle shift
//! (`C[0][n−1] = 1`, ones on the subdiagonal), so `(C·x)_k = x_{(k−1) mod n}`.
//! Input weights are `w = r_in·s` for a sign pattern `s ∈ {−1, +1}ⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::pi::pi_fraction_bits;

/// Input scale used for kernel analysis; motifs do not depend on it.
pub const KERNEL_INPUT_SCALE: f64 = 1.0;

/// Input scale of the forecasting experiments.
pub const FORECAST_INPUT_SCALE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReservoir {
    n: usize,
    rho: f64,
    sign_pattern: Vec<f64>,
    input_scale: f64,
}

impl CycleReservoir {
    pub fn new(rho: f64, sign_pattern: Vec<f64>, input_scale: f64) -> Result<Self> {
        let n = sign_pattern.len();
        if n == 0 {
            return Err(Error::structural("reservoir needs at least one unit"));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Precondition(format!(
                "spectral radius must lie in (0, 1], got {rho}"
            )));
        }
        if let Some(i) = sign_pattern.iter().position(|s| s.abs() != 1.0) {
            return Err(Error::structural(format!(
                "sign pattern entry {i} is {}, expected ±1",
                sign_pattern[i]
            )));
        }
        if !input_scale.is_finite() {
            return Err(Error::Precondition("input scale must be finite".into()));
        }
        Ok(Self {
            n,
            rho,
            sign_pattern,
            input_scale,
        })
    }

    /// Reservoir whose sign pattern is read off the binary expansion of π.
    pub fn with_pi_pattern(n: usize, rho: f64, input_scale: f64) -> Result<Self> {
        Self::new(rho, pi_sign_pattern(n)?, input_scale)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sign_pattern(&self) -> &[f64] {
        &self.sign_pattern
    }

    pub fn input_scale(&self) -> f64 {
        self.input_scale
    }

    /// Same reservoir with a different spectral radius.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(rho, self.sign_pattern.clone(), self.input_scale)
    }

    /// Effective input weights `w = r_in·s`.
    pub fn input_weights(&self) -> Vec<f64> {
        self.sign_pattern
            .iter()
            .map(|s| s * self.input_scale)
            .collect()
    }

    /// Dense coupling matrix `W = ρ·C`.
    pub fn coupling(&self) -> DenseMatrix {
        cycle_matrix(self.n).expect("n >= 1").scaled(self.rho)
    }

    /// `W·x` via the cyclic index map.
    pub fn apply_coupling(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|k| self.rho * x[(k + n - 1) % n]).collect()
    }

    /// `[w, W·w, …, W^{count−1}·w]`
    pub fn impulse_responses(&self, count: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        let mut v = self.input_weights();
        for _ in 0..count {
            let next = self.apply_coupling(&v);
            out.push(v);
            v = next;
        }
        out
    }
}

/// Canonical full-cycle permutation matrix of order `n`.
pub fn cycle_matrix(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::structural("cycle matrix of order 0"));
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if j == (i + n - 1) % n {
            1.0
        } else {
            0.0
        }
    }))
}

/// Sign pattern from the first `n` fractional bits of π: 1 → +1, 0 → −1.
pub fn pi_sign_pattern(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::structural("sign pattern of length 0"));
    }
    Ok(pi_fraction_bits(n)
        .into_iter()
        .map(|b| if b { 1.0 } else { -1.0 })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateTrajectory {
    pub initial_state: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl StateTrajectory {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().unwrap_or(&self.initial_state)
    }
}

/// Runs `x_t = W·x_{t−1} + w·c_t` from `x0` over `inputs`.
pub fn drive(r: &CycleReservoir, inputs: &[f64], x0: &[f64]) -> Result<StateTrajectory> {
    if x0.len() != r.n() {
        return Err(Error::structural(format!(
            "initial state has length {}, reservoir has {} units",
            x0.len(),
            r.n()
        )));
    }
    if let Some(row) = inputs.iter().position(|c| !c.is_finite()) {
        return Err(Error::Data {
            row,
            message: format!("non-finite input {}", inputs[row]),
        });
    }
    let w = r.input_weights();
    let mut states = Vec::with_capacity(inputs.len());
    let mut x = x0.to_vec();
    for &c in inputs {
        x = r.apply_coupling(&x);
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi += wi * c;
        }
        states.push(x.clone());
    }
    Ok(StateTrajectory {
        initial_state: x0.to_vec(),
        states,
    })
}

/// `φ(u) = Σ_j u_j·W^{τ−j}·w` for a chronologically ordered window `u`
/// (the last entry is the most recent sample).
pub fn feature_map(r: &CycleReservoir, u: &[f64]) -> Vec<f64> {
    let tau = u.len();
    let responses = r.impulse_responses(tau);
    let mut phi = vec![0.0; r.n()];
    for (j, &uj) in u.iter().enumerate() {
        for (p, v) in phi.iter_mut().zip(&responses[tau - 1 - j]) {
            *p += uj * v;
        }
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n3() -> CycleReservoir {
        CycleReservoir::new(1.0, vec![1.0, 1.0, -1.0], 1.0).unwrap()
    }

    #[test]
    fn cycle_matrix_small_orders() {
        assert_eq!(cycle_matrix(1).unwrap(), DenseMatrix::identity(1));
        let c = cycle_matrix(3).unwrap();
        let expect = DenseMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(c, expect);
        // a_{k−1 mod n} index map
        assert_eq!(c.matvec(&[1.0, 1.0, -1.0]).unwrap(), vec![-1.0, 1.0, 1.0]);
        assert!(matches!(cycle_matrix(0), Err(Error::Structural(_))));
    }

    #[test]
    fn cycle_matrix_is_a_full_cycle() {
        for n in 1..9 {
            let c = cycle_matrix(n).unwrap();
            assert_eq!(c.tr_matmul(&c).unwrap(), DenseMatrix::identity(n));
            let mut p = DenseMatrix::identity(n);
            for k in 1..=n {
                p = p.matmul(&c).unwrap();
                assert_eq!(p == DenseMatrix::identity(n), k == n, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn pi_pattern_prefix() {
        // 0x24 = 0010 0100
        assert_eq!(
            pi_sign_pattern(8).unwrap(),
            vec![-1.0, -1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]
        );
        assert_eq!(pi_sign_pattern(1).unwrap(), vec![-1.0]);
        assert!(pi_sign_pattern(300).unwrap().iter().all(|s| s.abs() == 1.0));
        assert!(pi_sign_pattern(0).is_err());
    }

    #[test]
    fn construction_validates() {
        assert!(CycleReservoir::new(0.0, vec![1.0], 1.0).is_err());
        assert!(CycleReservoir::new(1.1, vec![1.0], 1.0).is_err());
        assert!(CycleReservoir::new(0.5, vec![], 1.0).is_err());
        assert!(CycleReservoir::new(0.5, vec![1.0, 0.5], 1.0).is_err());
        let r = CycleReservoir::new(0.5, vec![1.0, -1.0], 0.05).unwrap();
        assert_eq!(r.input_weights(), vec![0.05, -0.05]);
    }

    #[test]
    fn coupling_has_norm_rho() {
        let r = CycleReservoir::with_pi_pattern(5, 0.7, 1.0).unwrap();
        let w = r.coupling();
        let wtw = w.tr_matmul(&w).unwrap();
        assert!(
            wtw.sub(&DenseMatrix::identity(5).scaled(0.49))
                .unwrap()
                .max_abs()
                < 1e-15
        );
    }

    #[test]
    fn drive_examples() {
        let r = n3();
        let zero = drive(&r, &[0.0; 5], &[0.0; 3]).unwrap();
        assert!(zero.states.iter().flatten().all(|&x| x == 0.0));

        let t = drive(&r, &[1.0, 0.0], &[0.0; 3]).unwrap();
        assert_eq!(t.states[0], vec![1.0, 1.0, -1.0]);
        assert_eq!(t.states[1], vec![-1.0, 1.0, 1.0]);

        let err = drive(&r, &[0.0, f64::NAN], &[0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, .. }));
    }

    #[test]
    fn feature_map_examples() {
        let r = n3();
        assert_eq!(feature_map(&r, &[0.0; 4]), vec![0.0; 3]);
        assert_eq!(feature_map(&r, &[0.0, 0.0, 1.0]), r.input_weights());
        // w + Cw + C²w summed directly
        let c = cycle_matrix(3).unwrap();
        let w = r.input_weights();
        let cw = c.matvec(&w).unwrap();
        let ccw = c.matvec(&cw).unwrap();
        let oracle: Vec<f64> = (0..3).map(|i| w[i] + cw[i] + ccw[i]).collect();
        assert_eq!(oracle, vec![1.0, 1.0, 1.0]);
        assert_eq!(feature_map(&r, &[1.0, 1.0, 1.0]), oracle);
    }

    proptest! {
        #[test]
        fn feature_map_matches_final_state(
            n in 1usize..8,
            rho in 0.1f64..=1.0,
            bits in proptest::collection::vec(any::<bool>(), 8),
            u in proptest::collection::vec(-2.0f64..2.0, 1..24),
        ) {
            let signs = bits[..n].iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
            let r = CycleReservoir::new(rho, signs, 1.0).unwrap();
            let u = &u[..u.len().min(3 * n)];
            let phi = feature_map(&r, u);
            let traj = drive(&r, u, &vec![0.0; n]).unwrap();
            for (a, b) in phi.iter().zip(traj.last_state()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn cycle_powers_compose(n in 1usize..10, a in 0usize..20, b in 0usize..20) {
            let c = cycle_matrix(n).unwrap();
            let pow = |k: usize| {
                let mut p = DenseMatrix::identity(n);
                for _ in 0..k { p = p.matmul(&c).unwrap(); }
                p
            };
            prop_assert_eq!(pow(a).matmul(&pow(b)).unwrap(), pow((a + b) % n));
        }
    }
}
