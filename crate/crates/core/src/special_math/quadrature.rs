//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite window.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and integration window for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub support_center: f64,
    pub support_halfwidth: f64,
}

impl QuadratureSpec {
    /// Window `center ± halfwidth` with tolerances tight enough for
    /// normalization checks.
    pub fn window(center: f64, halfwidth: f64) -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_subdivisions: 2000,
            support_center: center,
            support_halfwidth: halfwidth,
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }

    pub fn lower(&self) -> f64 {
        self.support_center - self.support_halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.support_center + self.support_halfwidth
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(domain("max_subdivisions must be at least 1"));
        }
        if !(self.support_halfwidth > 0.0) || !self.support_halfwidth.is_finite() {
            return Err(domain("support_halfwidth must be positive and finite"));
        }
        if !self.support_center.is_finite() {
            return Err(domain("support_center must be finite"));
        }
        Ok(())
    }
}

/// Quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { lo, hi, value, error }
}

/// Integrates `f` over `spec.lower()..spec.upper()`.
///
/// The segment with the largest error estimate is bisected until the summed
/// error is at most `max(abs_tol, rel_tol * |value|)`. Running out of
/// subdivisions yields [`Error::Convergence`] carrying the best estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, spec: &QuadratureSpec) -> Result<Integral> {
    spec.validate()?;
    let first = kronrod(&mut f, spec.lower(), spec.upper());
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut segments = 1;

    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Numeric(format!(
                "integrand produced non-finite quadrature sum {value}"
            )));
        }
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            return Ok(Integral { value, error });
        }
        if segments >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Convergence {
                estimate: value,
                error,
            });
        }
        let left = kronrod(&mut f, worst.lo, mid);
        let right = kronrod(&mut f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        segments += 1;

        // Re-sum periodically so incremental updates do not drift.
        if segments % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
}
