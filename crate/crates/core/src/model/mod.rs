//! Measurement model: the two-level system, the thermal pointer, the coupling
//! scenario and the quantities derived from them.
//!
//! Units have ħ = k_B = 1. Shifts enter the momentum basis as `p + a_i chi`.

mod density;
mod fock;

pub use density::{
    std_density_p, wma_density_p, wma_density_q, ConditionalDensity, DensityFamily, GaussianLocation,
    StdDensityP, WmaDensityP, WmaDensityQ,
};
pub use fock::{default_n_max, fock_oracle_density, FockOracle};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::special_math::{integrate, QuadratureSpec};

/// Largest admissible thermal parameter; keeps `(1+z)/(1-z)` finite.
pub const Z_MAX: f64 = 0.999_999;

/// Post-selection probabilities below this are treated as orthogonal.
pub const POSTSELECT_FLOOR: f64 = 1e-300;

/// Orthogonality threshold for a given selection: the larger of
/// [`POSTSELECT_FLOOR`] and the rounding noise of `r² + t²`, below which a
/// computed `A_m` carries no significant digits.
pub fn postselect_floor(system: &SystemSpec) -> f64 {
    let scale = system.r().powi(2) + system.t().powi(2);
    POSTSELECT_FLOOR.max(16.0 * f64::EPSILON * scale)
}

const PROBABILITY_SLACK: f64 = 1e-12;

/// How a selection angle maps onto state amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleConvention {
    /// Bloch polar angle: amplitudes `cos(θ/2)`, `sin(θ/2)`.
    #[default]
    Bloch,
    /// Amplitude angle: amplitudes `cos θ`, `sin θ`. Under this reading
    /// `θ_i = π/4, θ_f = -π/4` are the balanced, nearly orthogonal
    /// selections with `r = 1/2, t = -1/2`.
    Amplitude,
}

impl AngleConvention {
    fn amplitude_angle(self, theta: f64) -> f64 {
        match self {
            AngleConvention::Bloch => 0.5 * theta,
            AngleConvention::Amplitude => theta,
        }
    }
}

/// Qubit observable and pre/post-selected states.
///
/// Pre-selection is `c1 = cos α_i`, `c2 = e^{iφ} sin α_i`; post-selection is
/// `c1' = cos α_f`, `c2' = sin α_f` (real), where `α` is the angle mapped
/// through the [`AngleConvention`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    pub a1: f64,
    pub a2: f64,
    pub theta_i: f64,
    pub phi: f64,
    pub theta_f: f64,
    pub convention: AngleConvention,
}

impl SystemSpec {
    /// Bloch-angle system.
    pub fn new(a1: f64, a2: f64, theta_i: f64, phi: f64, theta_f: f64) -> Result<Self> {
        Self::with_convention(a1, a2, theta_i, phi, theta_f, AngleConvention::Bloch)
    }

    pub fn with_convention(
        a1: f64,
        a2: f64,
        theta_i: f64,
        phi: f64,
        theta_f: f64,
        convention: AngleConvention,
    ) -> Result<Self> {
        for (name, v) in [
            ("a1", a1),
            ("a2", a2),
            ("theta_i", theta_i),
            ("phi", phi),
            ("theta_f", theta_f),
        ] {
            if !v.is_finite() {
                return Err(domain(format!("{name} must be finite, got {v}")));
            }
        }
        if a1 == a2 {
            return Err(domain(format!("observable is degenerate: a1 = a2 = {a1}")));
        }
        Ok(Self {
            a1,
            a2,
            theta_i,
            phi,
            theta_f,
            convention,
        })
    }

    /// Balanced selection `r = 1/2, t = -1/2` with eigenvalues ±1, the
    /// configuration of the imaginary-part closed form.
    pub fn balanced(phi: f64) -> Self {
        Self {
            a1: 1.0,
            a2: -1.0,
            theta_i: std::f64::consts::FRAC_PI_4,
            phi,
            theta_f: -std::f64::consts::FRAC_PI_4,
            convention: AngleConvention::Amplitude,
        }
    }

    fn alpha_i(&self) -> f64 {
        self.convention.amplitude_angle(self.theta_i)
    }

    fn alpha_f(&self) -> f64 {
        self.convention.amplitude_angle(self.theta_f)
    }

    /// `cos α_i cos α_f`.
    pub fn r(&self) -> f64 {
        self.alpha_i().cos() * self.alpha_f().cos()
    }

    /// `sin α_i sin α_f`.
    pub fn t(&self) -> f64 {
        self.alpha_i().sin() * self.alpha_f().sin()
    }

    pub fn pre_amplitudes(&self) -> [Complex64; 2] {
        let a = self.alpha_i();
        [
            Complex64::new(a.cos(), 0.0),
            Complex64::from_polar(a.sin(), self.phi),
        ]
    }

    pub fn post_amplitudes(&self) -> [f64; 2] {
        let a = self.alpha_f();
        [a.cos(), a.sin()]
    }

    /// `|c1|^2, |c2|^2`.
    pub fn populations(&self) -> [f64; 2] {
        let a = self.alpha_i();
        [a.cos().powi(2), a.sin().powi(2)]
    }

    /// Largest eigenvalue magnitude, the optimal filter of the standard strategy.
    pub fn a_star(&self) -> f64 {
        self.a1.abs().max(self.a2.abs())
    }
}

/// Thermal pointer `(1-z) Σ z^n |n><n|` with zero-point width `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPointer {
    pub z: f64,
    pub sigma: f64,
}

impl ThermalPointer {
    pub fn new(z: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=Z_MAX).contains(&z) {
            return Err(domain(format!("z must lie in [0, {Z_MAX}], got {z}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(domain(format!("sigma must be positive and finite, got {sigma}")));
        }
        Ok(Self { z, sigma })
    }

    /// `(1+z)/(1-z)`, the thermal broadening of both quadratures.
    pub fn broadening(&self) -> f64 {
        (1.0 + self.z) / (1.0 - self.z)
    }

    pub fn var_q(&self) -> f64 {
        self.broadening() * self.sigma * self.sigma
    }

    pub fn var_p(&self) -> f64 {
        self.broadening() / (4.0 * self.sigma * self.sigma)
    }
}

/// Measured pointer quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub system: SystemSpec,
    pub pointer: ThermalPointer,
    pub chi: f64,
    pub basis: Basis,
}

impl Scenario {
    pub fn new(system: SystemSpec, pointer: ThermalPointer, chi: f64, basis: Basis) -> Result<Self> {
        if !chi.is_finite() {
            return Err(domain(format!("chi must be finite, got {chi}")));
        }
        Ok(Self {
            system,
            pointer,
            chi,
            basis,
        })
    }

    /// Scenario with the non-negative coupling that produces weakness `k2`.
    pub fn with_k2(system: SystemSpec, pointer: ThermalPointer, k2: f64, basis: Basis) -> Result<Self> {
        if !(k2 >= 0.0) || !k2.is_finite() {
            return Err(domain(format!("k2 must be non-negative and finite, got {k2}")));
        }
        let scale = k2_per_chi2(&system, &pointer);
        Self::new(system, pointer, (k2 / scale).sqrt(), basis)
    }

    /// `(a1-a2)^2 chi^2 (1+z)/(1-z) sigma^2`.
    pub fn k2(&self) -> f64 {
        k2_per_chi2(&self.system, &self.pointer) * self.chi * self.chi
    }

    pub fn with_chi(&self, chi: f64) -> Self {
        Self { chi, ..*self }
    }

    pub fn with_basis(&self, basis: Basis) -> Self {
        Self { basis, ..*self }
    }
}

fn k2_per_chi2(system: &SystemSpec, pointer: &ThermalPointer) -> f64 {
    let da = system.a1 - system.a2;
    da * da * pointer.var_q()
}

/// `z = exp(-omega / T)`; zero at zero temperature.
pub fn thermal_z_from_temperature(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(domain(format!("omega must be positive, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(domain(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok((-omega / temperature).exp())
}

/// Post-selection success probability at coupling `chi`, unchecked.
pub(crate) fn postselect_raw(system: &SystemSpec, pointer: &ThermalPointer, chi: f64) -> f64 {
    let (r, t) = (system.r(), system.t());
    let half_k2 = 0.5 * k2_per_chi2(system, pointer) * chi * chi;
    let decay = (-half_k2).exp();
    // 1 - e^{-k²/2} cos φ, split to avoid cancellation near k, φ -> 0
    let half_phi = 0.5 * system.phi;
    let visibility_loss = -(-half_k2).exp_m1() + decay * 2.0 * half_phi.sin().powi(2);
    (r + t).powi(2) - 2.0 * r * t * visibility_loss
}

/// `A_m = r^2 + t^2 + 2rt exp(-k^2/2) cos φ`.
pub fn postselect_probability(sc: &Scenario) -> Result<f64> {
    let am = postselect_raw(&sc.system, &sc.pointer, sc.chi);
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&am) {
        return Err(Error::InternalConsistency(format!(
            "post-selection probability {am} outside [0, 1]"
        )));
    }
    Ok(am)
}

/// Weak value `<ψ_f|A|ψ_i> / <ψ_f|ψ_i>`.
pub fn weak_value(system: &SystemSpec) -> Result<Complex64> {
    let [c1, c2] = system.pre_amplitudes();
    let [d1, d2] = system.post_amplitudes();
    let inner = c1 * d1 + c2 * d2;
    if inner.norm() < 1e-12 {
        return Err(Error::DegeneratePostselection {
            probability: inner.norm_sqr(),
        });
    }
    Ok((c1 * d1 * system.a1 + c2 * d2 * system.a2) / inner)
}

/// Overlap of the two shifted, thermally broadened pointer branches,
/// evaluated by quadrature of the resummed Fock-space integrand.
pub fn overlap(sc: &Scenario) -> Result<f64> {
    let ThermalPointer { z, sigma } = sc.pointer;
    let s2 = sigma * sigma;
    let (a1, a2, chi) = (sc.system.a1, sc.system.a2, sc.chi);
    let prefactor = sc.pointer.broadening().powf(-0.5);
    // φ0(p1) φ0(p2) normalization: (2π / 4σ²)^{-1/2}
    let ground_norm = (2.0 * std::f64::consts::PI / (4.0 * s2)).powf(-0.5);
    let one_minus_z2 = 1.0 - z * z;
    let integrand = |p: f64| {
        let p1 = p + a1 * chi;
        let p2 = p + a2 * chi;
        let squares = p1 * p1 + p2 * p2;
        let mehler = (4.0 * s2 * p1 * p2 * z - 2.0 * s2 * squares * z * z) / one_minus_z2;
        prefactor * ground_norm * (mehler - s2 * squares).exp()
    };
    let center = -0.5 * (a1 + a2) * chi;
    let halfwidth = 10.0 * sc.pointer.var_p().sqrt();
    let quad = QuadratureSpec::window(center, halfwidth).with_tolerances(1e-11, 1e-15);
    Ok(integrate(integrand, &quad)?.value)
}
