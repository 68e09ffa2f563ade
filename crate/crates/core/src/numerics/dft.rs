use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reference discrete Fourier transform, `X_k = Σ_j v_j·exp(−2πi·jk/N)`.
///
/// Direct O(N²) summation. Twiddle angles are reduced modulo `N` before the
/// trigonometric call so large `jk` products do not lose precision.
pub fn dft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    transform(v, -1.0)
}

/// Inverse of [`dft`], including the `1/N` normalisation.
pub fn idft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = v.len() as f64;
    Ok(transform(v, 1.0)?.into_iter().map(|x| x / n).collect())
}

/// [`dft`] of a real signal.
pub fn dft_real(v: &[f64]) -> Result<Vec<Complex64>> {
    let c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    dft(&c)
}

fn transform(v: &[Complex64], sign: f64) -> Result<Vec<Complex64>> {
    let n = v.len();
    if n == 0 {
        return Err(Error::structural("DFT of an empty signal"));
    }
    let twiddles: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64))
        .collect();
    Ok((0..n)
        .map(|k| {
            v.iter()
                .enumerate()
                .map(|(j, &x)| x * twiddles[(j * k) % n])
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn constant_and_impulse() {
        let out = dft(&real(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(close(&out, &real(&[4.0, 0.0, 0.0, 0.0]), 1e-12));
        let out = dft(&real(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(close(&out, &real(&[1.0; 4]), 1e-12));
    }

    /// Oracle: explicit Σ_j v_j·e^{−2πijk/4} with fresh trig calls per term.
    #[test]
    fn sampled_cosine() {
        let v = [1.0, 0.0, -1.0, 0.0];
        let oracle: Vec<Complex64> = (0..4)
            .map(|k| {
                (0..4)
                    .map(|j| {
                        let ang = -2.0 * PI * (j * k) as f64 / 4.0;
                        Complex64::new(v[j] * ang.cos(), v[j] * ang.sin())
                    })
                    .sum()
            })
            .collect();
        assert!(close(&oracle, &real(&[0.0, 2.0, 0.0, 2.0]), 1e-12));
        assert!(close(&dft_real(&v).unwrap(), &oracle, 1e-12));
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(dft(&[]), Err(Error::Structural(_))));
    }

    proptest! {
        #[test]
        fn roundtrip_and_parseval(v in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..64)) {
            let x: Vec<Complex64> = v.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let f = dft(&x).unwrap();
            prop_assert!(close(&idft(&f).unwrap(), &x, 1e-10));
            let e_time: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            let e_freq: f64 = f.iter().map(|z| z.norm_sqr()).sum();
            let n = x.len() as f64;
            prop_assert!((e_freq - n * e_time).abs() <= 1e-9 * (n * e_time).max(1e-300));
        }
    }
}
