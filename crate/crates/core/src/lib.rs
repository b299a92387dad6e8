//! Weak-value amplification with a thermal pointer.
//!
//! A two-level system is weakly coupled to a continuous pointer prepared in a
//! thermal state, then post-selected. This crate provides the conditional
//! pointer densities in the momentum and position bases, a truncated-Fock
//! reference implementation of the same densities, Fisher information of the
//! amplification and standard strategies, and a Monte Carlo maximum-likelihood
//! harness for checking the Cramér–Rao bound.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fisher;
pub mod model;
pub mod montecarlo;
pub mod special_math;

pub use error::{Error, Result};
pub use fisher::{
    cramer_rao_bound, f_total_closed, fisher_numeric, fisher_numeric_auto, fisher_std_closed,
    ratio_p_numeric, ratio_q_closed, ratio_q_numeric, FisherMethod, FisherReport,
};
pub use model::{
    fock_oracle_density, overlap, postselect_probability, std_density_p, thermal_z_from_temperature,
    weak_value, wma_density_p, wma_density_q, AngleConvention, Basis, ConditionalDensity, DensityFamily,
    FockOracle, GaussianLocation, Scenario, StdDensityP, SystemSpec, ThermalPointer, WmaDensityP,
    WmaDensityQ, Z_MAX,
};
pub use special_math::{d_dchi, hermite, integrate, mehler_kernel, Integral, QuadratureSpec};
