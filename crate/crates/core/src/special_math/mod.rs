//! Special functions and the numerical primitives shared by the model and the
//! Fisher engine: Hermite polynomials and functions, the Mehler kernel,
//! adaptive quadrature on a finite window and Richardson-extrapolated central
//! differences.

mod diff;
mod quadrature;

pub use diff::{d_dchi, default_step};
pub use quadrature::{integrate, Integral, QuadratureSpec};

use crate::error::{domain, Error, Result};

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("hermite argument must be finite, got {x}")));
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::NumericRange(format!("H_{n}({x}) overflows f64")))
    }
}

/// Normalized Hermite functions `psi_k(x) = H_k(x) exp(-x^2/2) / sqrt(2^k k! sqrt(pi))`
/// for `k = 0..count`, written into `out`.
///
/// Uses the orthonormal recurrence, which stays in range for orders in the
/// thousands where `H_k` itself overflows.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x * out[0];
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Closed form of the Mehler series `sum_n H_n(x) H_n(y) (w/2)^n / n!`.
pub fn mehler_kernel(x: f64, y: f64, w: f64) -> Result<f64> {
    if !(w.abs() < 1.0) {
        return Err(domain(format!("Mehler series diverges for |w| >= 1 (w = {w})")));
    }
    let one_minus_w2 = 1.0 - w * w;
    let exponent = (2.0 * x * y * w - (x * x + y * y) * w * w) / one_minus_w2;
    Ok(exponent.exp() / one_minus_w2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite(1, 2.0).unwrap(), 4.0);
        assert_eq!(hermite(3, 1.0).unwrap(), -4.0);
        // H_4(x) = 16x^4 - 48x^2 + 12
        let x = 0.3_f64;
        let expect = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        assert!((hermite(4, x).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn hermite_overflow_is_reported() {
        assert!(matches!(hermite(400, 50.0), Err(Error::NumericRange(_))));
        assert!(matches!(hermite(2, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn hermite_functions_match_polynomials() {
        let x = 0.7;
        let mut psi = [0.0; 12];
        hermite_functions(x, &mut psi);
        let mut fact = 1.0;
        for (k, value) in psi.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            let norm = (2f64.powi(k as i32) * fact * std::f64::consts::PI.sqrt()).sqrt();
            let expect = hermite(k, x).unwrap() * (-0.5 * x * x).exp() / norm;
            assert!((value - expect).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn mehler_special_values() {
        assert_eq!(mehler_kernel(1.3, -0.4, 0.0).unwrap(), 1.0);
        let v = mehler_kernel(0.0, 0.0, 0.9).unwrap();
        assert!((v - 2.294157338705618).abs() < 1e-12);
        assert!(mehler_kernel(0.0, 0.0, 1.0).is_err());
        assert!(mehler_kernel(0.0, 0.0, -1.2).is_err());
    }
}
