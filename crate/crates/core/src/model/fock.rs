//! Brute-force pointer density from the truncated thermal Fock series.
//!
//! Each Fock component `|n>` is displaced (momentum basis) or phase-kicked
//! (position basis) by `exp(-i chi a_i q)`, projected onto the post-selected
//! system state and squared; the thermal weights `(1-z) z^n` are summed
//! explicitly. No resummation identity is used, which makes this an
//! independent reference for the closed-form densities.

use num_complex::Complex64;

use super::{Basis, Scenario, POSTSELECT_FLOOR};
use crate::error::{domain, Error, Result};
use crate::special_math::{hermite_functions, integrate, QuadratureSpec};

const TRUNCATION_TOL: f64 = 1e-12;
const N_MAX_CAP: usize = 2000;

fn required_terms(z: f64) -> usize {
    if z == 0.0 {
        return 1;
    }
    let n = (TRUNCATION_TOL.ln() / z.ln()).floor() as usize + 1;
    // guard the floor against rounding at the boundary
    if z.powi(n as i32) < TRUNCATION_TOL {
        n.max(1)
    } else {
        n + 1
    }
}

/// Smallest `n` with `z^n < 1e-12`, capped at 2000.
pub fn default_n_max(z: f64) -> usize {
    required_terms(z).min(N_MAX_CAP)
}

#[derive(Debug, Clone)]
pub struct FockOracle {
    scenario: Scenario,
    n_max: usize,
    normalization: f64,
}

impl FockOracle {
    /// Builds the oracle summing Fock levels `0..n_max`; `None` picks
    /// [`default_n_max`].
    pub fn new(sc: &Scenario, n_max: Option<usize>) -> Result<Self> {
        let z = sc.pointer.z;
        let n_max = n_max.unwrap_or_else(|| default_n_max(z));
        if n_max < 1 {
            return Err(domain("n_max must be at least 1"));
        }
        let residual = z.powi(n_max.min(i32::MAX as usize) as i32);
        if residual >= TRUNCATION_TOL {
            return Err(Error::Precision {
                required: required_terms(z),
                residual,
            });
        }
        let mut oracle = Self {
            scenario: *sc,
            n_max,
            normalization: 1.0,
        };
        let (center, halfwidth) = oracle.support();
        let quad = QuadratureSpec::window(center, halfwidth).with_tolerances(1e-11, 1e-16);
        let total = integrate(|s| oracle.unnormalized(s), &quad)?.value;
        if total < POSTSELECT_FLOOR {
            return Err(Error::DegeneratePostselection { probability: total });
        }
        oracle.normalization = total;
        Ok(oracle)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Integrated unnormalized density; approximates the post-selection
    /// probability up to truncation.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    fn support(&self) -> (f64, f64) {
        let sc = &self.scenario;
        match sc.basis {
            Basis::P => {
                let (a1, a2) = (sc.system.a1, sc.system.a2);
                let spread = 0.5 * ((a1 - a2) * sc.chi).abs();
                (
                    -0.5 * (a1 + a2) * sc.chi,
                    12.0 * sc.pointer.var_p().sqrt() + spread,
                )
            }
            Basis::Q => (0.0, 12.0 * sc.pointer.var_q().sqrt()),
        }
    }

    /// Post-selected but unnormalized pointer density at `s`.
    pub fn unnormalized(&self, s: f64) -> f64 {
        let sc = &self.scenario;
        let z = sc.pointer.z;
        let scale = std::f64::consts::SQRT_2 * sc.pointer.sigma;
        let [c1, c2] = sc.system.pre_amplitudes();
        let [d1, d2] = sc.system.post_amplitudes();
        let branch = [c1 * d1, c2 * d2];
        let eigen = [sc.system.a1, sc.system.a2];
        let mut total = 0.0;
        match sc.basis {
            Basis::P => {
                // momentum wavefunction of |n>, shifted to p + a_i chi; the
                // common (-i)^n phase cancels in the modulus
                let mut psi1 = vec![0.0; self.n_max];
                let mut psi2 = vec![0.0; self.n_max];
                hermite_functions(scale * (s + eigen[0] * sc.chi), &mut psi1);
                hermite_functions(scale * (s + eigen[1] * sc.chi), &mut psi2);
                let mut weight = 1.0 - z;
                for n in 0..self.n_max {
                    let amp = branch[0] * psi1[n] + branch[1] * psi2[n];
                    total += weight * amp.norm_sqr();
                    weight *= z;
                }
                total * scale
            }
            Basis::Q => {
                let mut psi = vec![0.0; self.n_max];
                hermite_functions(s / scale, &mut psi);
                let kick = |a: f64| Complex64::from_polar(1.0, -sc.chi * a * s);
                let fringe = (branch[0] * kick(eigen[0]) + branch[1] * kick(eigen[1])).norm_sqr();
                let mut weight = 1.0 - z;
                for value in psi {
                    total += weight * value * value * fringe;
                    weight *= z;
                }
                total / scale
            }
        }
    }

    pub fn density(&self, s: f64) -> f64 {
        self.unnormalized(s) / self.normalization
    }
}

/// One-shot oracle evaluation. Prefer [`FockOracle`] when evaluating many
/// points, since each call re-integrates the normalization.
pub fn fock_oracle_density(sc: &Scenario, s: f64, n_max: usize) -> Result<f64> {
    Ok(FockOracle::new(sc, Some(n_max))?.density(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SystemSpec, ThermalPointer};

    #[test]
    fn truncation_length() {
        assert_eq!(default_n_max(0.0), 1);
        let n = default_n_max(0.5);
        assert!(0.5f64.powi(n as i32) < 1e-12 && 0.5f64.powi(n as i32 - 1) >= 1e-12);
        assert_eq!(default_n_max(Z_CLOSE_TO_ONE), N_MAX_CAP);
    }

    const Z_CLOSE_TO_ONE: f64 = 0.9999;

    #[test]
    fn short_truncation_names_required_length() {
        let sys = SystemSpec::new(1.0, -1.0, 0.4, 0.0, 0.3).unwrap();
        let sc = Scenario::new(sys, ThermalPointer::new(0.5, 1.0).unwrap(), 0.1, Basis::P).unwrap();
        match FockOracle::new(&sc, Some(10)) {
            Err(Error::Precision { required, .. }) => assert_eq!(required, default_n_max(0.5)),
            other => panic!("expected precision error, got {other:?}"),
        }
        let hot = Scenario::new(
            sys,
            ThermalPointer::new(Z_CLOSE_TO_ONE, 1.0).unwrap(),
            0.1,
            Basis::P,
        )
        .unwrap();
        assert!(matches!(
            FockOracle::new(&hot, None),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn ground_state_only_at_zero_temperature() {
        // n = 0 only: the pure-Gaussian post-selected density
        let sys = SystemSpec::new(1.0, -1.0, 1.1, 0.3, -0.8).unwrap();
        let sc = Scenario::new(sys, ThermalPointer::new(0.0, 0.7).unwrap(), 0.4, Basis::P).unwrap();
        let oracle = FockOracle::new(&sc, Some(1)).unwrap();
        let (r, t) = (sys.r(), sys.t());
        let v = 1.0 / (4.0 * 0.49);
        let phi0 = |p: f64| (2.0 * std::f64::consts::PI * v).powf(-0.25) * (-p * p / (4.0 * v)).exp();
        for p in [-0.9, -0.2, 0.0, 0.5] {
            let amp = Complex64::new(r * phi0(p + 0.4), 0.0) + Complex64::from_polar(t, 0.3) * phi0(p - 0.4);
            let expect = amp.norm_sqr() / oracle.normalization();
            assert!((oracle.density(p) - expect).abs() < 1e-12);
        }
    }
}
