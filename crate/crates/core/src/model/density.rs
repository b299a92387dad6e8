//! Parametric pointer densities `s ↦ p(s | chi)`.

use std::f64::consts::PI;

use super::{postselect_floor, postselect_raw, Basis, Scenario, SystemSpec, ThermalPointer};
use crate::error::{domain, Error, Result};
use crate::special_math::QuadratureSpec;

/// Width of the integration window in units of the widest standard deviation.
pub const WINDOW_SIGMAS: f64 = 10.0;

/// A family of probability densities over a pointer coordinate, indexed by
/// the coupling `chi`.
pub trait DensityFamily: Sync {
    fn density(&self, s: f64, chi: f64) -> f64;

    /// `(center, halfwidth)` of a window holding all but a negligible tail.
    fn support(&self, chi: f64) -> (f64, f64);

    fn window(&self, chi: f64) -> QuadratureSpec {
        let (center, halfwidth) = self.support(chi);
        QuadratureSpec::window(center, halfwidth)
    }
}

impl<D: DensityFamily + ?Sized> DensityFamily for &D {
    fn density(&self, s: f64, chi: f64) -> f64 {
        (**self).density(s, chi)
    }

    fn support(&self, chi: f64) -> (f64, f64) {
        (**self).support(chi)
    }
}

fn gaussian(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * PI * variance).sqrt()
}

fn require_postselection(sc: &Scenario) -> Result<()> {
    let am = postselect_raw(&sc.system, &sc.pointer, sc.chi);
    if am < postselect_floor(&sc.system) {
        return Err(Error::DegeneratePostselection { probability: am });
    }
    Ok(())
}

/// Post-selected momentum density: two shifted thermal Gaussians plus the
/// interference term whose centers sit at `(a2 - z a1) chi / (1-z)` and
/// `(a1 - z a2) chi / (1-z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WmaDensityP {
    pub system: SystemSpec,
    pub pointer: ThermalPointer,
}

impl WmaDensityP {
    /// Density before division by the post-selection probability.
    pub fn numerator(&self, p: f64, chi: f64) -> f64 {
        let SystemSpec { a1, a2, phi, .. } = self.system;
        let (r, t) = (self.system.r(), self.system.t());
        let z = self.pointer.z;
        let v = self.pointer.var_p();
        let shift_12 = (a2 - z * a1) * chi / (1.0 - z);
        let shift_21 = (a1 - z * a2) * chi / (1.0 - z);
        let pa = p + a1 * chi;
        let pb = p + a2 * chi;
        let pc = p + shift_12;
        let pd = p + shift_21;
        // Regrouped as (r√Ea + t√Eb)² + 2rt (cos φ Ec - √(Ea Eb)) so that
        // near-orthogonal selections keep their relative accuracy.
        let half_a = (-pa * pa / (4.0 * v)).exp();
        let amp = (r + t) * half_a + t * half_a * ((pa * pa - pb * pb) / (4.0 * v)).exp_m1();
        let ec = (-(pc * pc + pd * pd) / (4.0 * v)).exp();
        let geo = (-(pa * pa + pb * pb) / (4.0 * v)).exp();
        // pa² + pb² - pc² - pd² does not depend on p
        let gap = -2.0 * z * ((a1 - a2) * chi / (1.0 - z)).powi(2);
        let cross = -2.0 * (0.5 * phi).sin().powi(2) * ec + geo * (gap / (4.0 * v)).exp_m1();
        (amp * amp + 2.0 * r * t * cross) / (2.0 * PI * v).sqrt()
    }
}

impl DensityFamily for WmaDensityP {
    fn density(&self, p: f64, chi: f64) -> f64 {
        let am = postselect_raw(&self.system, &self.pointer, chi);
        if am < postselect_floor(&self.system) {
            return f64::NAN;
        }
        self.numerator(p, chi) / am
    }

    fn support(&self, chi: f64) -> (f64, f64) {
        let (a1, a2) = (self.system.a1, self.system.a2);
        let center = -0.5 * (a1 + a2) * chi;
        let spread = 0.5 * ((a1 - a2) * chi).abs();
        (center, WINDOW_SIGMAS * self.pointer.var_p().sqrt() + spread)
    }
}

/// Post-selected position density: the thermal Gaussian modulated by the
/// two-path interference fringe.
///
/// The fringe is `r² + t² + 2rt cos(φ + (a1 - a2) chi q)`, the phase produced
/// by `exp(-i chi A q)` acting on `c2 = e^{iφ} sin α_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WmaDensityQ {
    pub system: SystemSpec,
    pub pointer: ThermalPointer,
}

impl WmaDensityQ {
    pub fn numerator(&self, q: f64, chi: f64) -> f64 {
        let SystemSpec { a1, a2, phi, .. } = self.system;
        let (r, t) = (self.system.r(), self.system.t());
        let half_phase = 0.5 * (phi + (a1 - a2) * chi * q);
        // r² + t² + 2rt cos θ = (r+t)² - 4rt sin²(θ/2)
        let fringe = (r + t).powi(2) - 4.0 * r * t * half_phase.sin().powi(2);
        gaussian(q, self.pointer.var_q()) * fringe
    }
}

impl DensityFamily for WmaDensityQ {
    fn density(&self, q: f64, chi: f64) -> f64 {
        let am = postselect_raw(&self.system, &self.pointer, chi);
        if am < postselect_floor(&self.system) {
            return f64::NAN;
        }
        self.numerator(q, chi) / am
    }

    fn support(&self, _chi: f64) -> (f64, f64) {
        (0.0, WINDOW_SIGMAS * self.pointer.var_q().sqrt())
    }
}

/// Momentum density with the system traced out: a population-weighted
/// mixture of the shifted thermal Gaussians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdDensityP {
    pub weights: [f64; 2],
    pub eigenvalues: [f64; 2],
    pub var_p: f64,
}

impl DensityFamily for StdDensityP {
    fn density(&self, p: f64, chi: f64) -> f64 {
        self.weights
            .iter()
            .zip(self.eigenvalues)
            .map(|(w, a)| w * gaussian(p + a * chi, self.var_p))
            .sum()
    }

    fn support(&self, chi: f64) -> (f64, f64) {
        let [a1, a2] = self.eigenvalues;
        let center = -0.5 * (a1 + a2) * chi;
        let spread = 0.5 * ((a1 - a2) * chi).abs();
        (center, WINDOW_SIGMAS * self.var_p.sqrt() + spread)
    }
}

/// Gaussian location family `N(-slope * chi, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLocation {
    pub slope: f64,
    pub variance: f64,
}

impl DensityFamily for GaussianLocation {
    fn density(&self, s: f64, chi: f64) -> f64 {
        gaussian(s + self.slope * chi, self.variance)
    }

    fn support(&self, chi: f64) -> (f64, f64) {
        (-self.slope * chi, WINDOW_SIGMAS * self.variance.sqrt())
    }
}

/// The post-selected density in the scenario's measured basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionalDensity {
    P(WmaDensityP),
    Q(WmaDensityQ),
}

impl ConditionalDensity {
    pub fn for_scenario(sc: &Scenario) -> Result<Self> {
        Ok(match sc.basis {
            Basis::P => ConditionalDensity::P(wma_density_p(sc)?),
            Basis::Q => ConditionalDensity::Q(wma_density_q(sc)?),
        })
    }

    pub fn numerator(&self, s: f64, chi: f64) -> f64 {
        match self {
            ConditionalDensity::P(d) => d.numerator(s, chi),
            ConditionalDensity::Q(d) => d.numerator(s, chi),
        }
    }
}

impl DensityFamily for ConditionalDensity {
    fn density(&self, s: f64, chi: f64) -> f64 {
        match self {
            ConditionalDensity::P(d) => d.density(s, chi),
            ConditionalDensity::Q(d) => d.density(s, chi),
        }
    }

    fn support(&self, chi: f64) -> (f64, f64) {
        match self {
            ConditionalDensity::P(d) => d.support(chi),
            ConditionalDensity::Q(d) => d.support(chi),
        }
    }
}

pub fn wma_density_p(sc: &Scenario) -> Result<WmaDensityP> {
    require_postselection(sc)?;
    Ok(WmaDensityP {
        system: sc.system,
        pointer: sc.pointer,
    })
}

pub fn wma_density_q(sc: &Scenario) -> Result<WmaDensityQ> {
    require_postselection(sc)?;
    Ok(WmaDensityQ {
        system: sc.system,
        pointer: sc.pointer,
    })
}

/// Standard-strategy density. With `filter` set to one of the eigenvalues the
/// mixture collapses onto that branch.
pub fn std_density_p(sc: &Scenario, filter: Option<f64>) -> Result<StdDensityP> {
    let eigenvalues = [sc.system.a1, sc.system.a2];
    let weights = match filter {
        None => sc.system.populations(),
        Some(a) if a == eigenvalues[0] => [1.0, 0.0],
        Some(a) if a == eigenvalues[1] => [0.0, 1.0],
        Some(a) => {
            return Err(domain(format!(
                "filter eigenvalue {a} is neither a1 = {} nor a2 = {}",
                eigenvalues[0], eigenvalues[1]
            )))
        }
    };
    Ok(StdDensityP {
        weights,
        eigenvalues,
        var_p: sc.pointer.var_p(),
    })
}
