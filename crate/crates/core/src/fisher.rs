//! Fisher information of the coupling `chi`: a numerical engine for any
//! [`DensityFamily`], closed forms for the standard strategy and the
//! imaginary-part channel, and the ratios against the pure-pointer benchmark.

use std::cell::Cell;

use crate::error::{domain, Error, Result};
use crate::model::{
    postselect_probability, wma_density_p, wma_density_q, DensityFamily, Scenario, SystemSpec,
    ThermalPointer, Z_MAX,
};
use crate::special_math::{d_dchi, default_step, integrate, QuadratureSpec};

/// Densities below this contribute nothing to the Fisher integrand.
pub const DENSITY_FLOOR: f64 = 1e-300;

const BALANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherMethod {
    Numeric,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherReport {
    pub value: f64,
    pub method: FisherMethod,
    pub quad_error: f64,
    pub chi: f64,
}

/// `∫ (∂_chi p)^2 / p ds` with the derivative taken by Richardson-extrapolated
/// central differences inside the quadrature.
pub fn fisher_numeric<D: DensityFamily + ?Sized>(
    family: &D,
    chi: f64,
    quad: &QuadratureSpec,
    step_hint: f64,
) -> Result<FisherReport> {
    let bad_density = Cell::new(None);
    let integrand = |s: f64| {
        let p = family.density(s, chi);
        if !(p >= -DENSITY_FLOOR) {
            if bad_density.get().is_none() {
                bad_density.set(Some((s, p)));
            }
            return 0.0;
        }
        if p < DENSITY_FLOOR {
            return 0.0;
        }
        let dp = d_dchi(|c| family.density(s, c), chi, step_hint);
        dp * dp / p
    };
    let result = integrate(integrand, quad);
    if let Some((s, p)) = bad_density.get() {
        return Err(Error::Model(format!("density {p} at s = {s}, chi = {chi}")));
    }
    let integral = result?;
    Ok(FisherReport {
        value: integral.value,
        method: FisherMethod::Numeric,
        quad_error: integral.error,
        chi,
    })
}

/// [`fisher_numeric`] on the family's own support window with the default step.
pub fn fisher_numeric_auto<D: DensityFamily + ?Sized>(family: &D, chi: f64) -> Result<FisherReport> {
    let quad = family
        .window(chi)
        .with_tolerances(1e-8, 1e-10)
        .with_max_subdivisions(4000);
    fisher_numeric(family, chi, &quad, default_step(chi))
}

/// Fisher information of the filtered standard strategy with a pointer at
/// thermal parameter `at_z`: `|a*|^2 / var_p(at_z)`.
pub fn fisher_std_closed(sc: &Scenario, at_z: f64) -> Result<f64> {
    if !(0.0..Z_MAX).contains(&at_z) {
        return Err(domain(format!("at_z must lie in [0, {Z_MAX}), got {at_z}")));
    }
    let pointer = ThermalPointer::new(at_z, sc.pointer.sigma)?;
    Ok(sc.system.a_star().powi(2) / pointer.var_p())
}

/// `(r a1 - t a2)^2 / var_p`, the total-information expression as stated for
/// the joint state without post-selection.
///
/// This is not an upper bound on `A_m F[P_wma(p)]` in general; in the weak
/// limit that product tends to `(r a1 + t a2)^2 / var_p` at `phi = 0`.
pub fn f_total_closed(sc: &Scenario) -> f64 {
    let SystemSpec { a1, a2, .. } = sc.system;
    (sc.system.r() * a1 - sc.system.t() * a2).powi(2) / sc.pointer.var_p()
}

/// `A_m F[P_wma(p)] / F_std(z = 0)`.
pub fn ratio_p_numeric(sc: &Scenario) -> Result<f64> {
    let family = wma_density_p(sc)?;
    let am = postselect_probability(sc)?;
    let fisher = fisher_numeric_auto(&family, sc.chi)?;
    Ok(am * fisher.value / fisher_std_closed(sc, 0.0)?)
}

/// `A_m F[P_wma(q)] / F_std(z = 0)` by quadrature, valid at any angles.
pub fn ratio_q_numeric(sc: &Scenario) -> Result<f64> {
    let family = wma_density_q(sc)?;
    let am = postselect_probability(sc)?;
    let fisher = fisher_numeric_auto(&family, sc.chi)?;
    Ok(am * fisher.value / fisher_std_closed(sc, 0.0)?)
}

/// Closed form of `A_m F[P_wma(q)] / F_std(z = 0)` for the balanced selection
/// `r = 1/2, t = -1/2`:
///
/// `(a1-a2)^2/(8 a*^2) (1+z)/(1-z) [1 + e^{-k²/2}(1-k²)cos φ - e^{-k²} k² cos²φ / (1 - e^{-k²/2} cos φ)]`.
pub fn ratio_q_closed(sc: &Scenario) -> Result<f64> {
    let (r, t) = (sc.system.r(), sc.system.t());
    if (r - 0.5).abs() > BALANCE_TOL || (t + 0.5).abs() > BALANCE_TOL {
        return Err(domain(format!(
            "closed-form ratio needs the balanced selection r = 1/2, t = -1/2 \
             (got r = {r}, t = {t}); use ratio_q_numeric"
        )));
    }
    let SystemSpec { a1, a2, phi, .. } = sc.system;
    let k2 = sc.k2();
    let c = phi.cos();
    let decay = (-0.5 * k2).exp();
    let visibility_loss = -(-0.5 * k2).exp_m1() + decay * 2.0 * (0.5 * phi).sin().powi(2);
    let bracket = if k2 == 0.0 {
        1.0 + c
    } else {
        1.0 + decay * (1.0 - k2) * c - decay * decay * k2 * c * c / visibility_loss
    };
    let prefactor = (a1 - a2).powi(2) / (8.0 * sc.system.a_star().powi(2));
    Ok(prefactor * sc.pointer.broadening() * bracket)
}

/// Variance lower bound `1 / (N F)`.
pub fn cramer_rao_bound(fisher_value: f64, n_trials: u64) -> Result<f64> {
    if !(fisher_value > 0.0) {
        return Err(domain(format!(
            "Fisher information must be positive, got {fisher_value}"
        )));
    }
    if n_trials < 1 {
        return Err(domain("need at least one trial"));
    }
    Ok(1.0 / (n_trials as f64 * fisher_value))
}
