//! Conditional maximum-likelihood estimation of the coupling.

use crate::error::{domain, Error, Result};
use crate::model::{Basis, ConditionalDensity, DensityFamily, Scenario, WmaDensityP, WmaDensityQ};

/// Golden-section contraction factor `1/φ`.
const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Final bracket width of the golden-section refinement.
pub const MLE_XTOL: f64 = 1e-9;

const SCAN_POINTS: usize = 65;

/// Half-spacing of the final three-point fit, relative to the scan step.
const POLISH_FRACTION: f64 = 1e-3;

fn conditional_family(sc: &Scenario) -> ConditionalDensity {
    match sc.basis {
        Basis::P => ConditionalDensity::P(WmaDensityP {
            system: sc.system,
            pointer: sc.pointer,
        }),
        Basis::Q => ConditionalDensity::Q(WmaDensityQ {
            system: sc.system,
            pointer: sc.pointer,
        }),
    }
}

/// Sum of log densities of `readings` at coupling `chi`.
pub fn log_likelihood<D: DensityFamily>(family: &D, readings: &[f64], chi: f64) -> Result<f64> {
    let total: f64 = readings.iter().map(|&s| family.density(s, chi).ln()).sum();
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Numeric(format!(
            "log-likelihood is {total} at chi = {chi}"
        )))
    }
}

/// Maximizes the conditional log-likelihood over `search_interval`.
///
/// A uniform scan locates the best grid cell, which is then refined by
/// golden-section search down to [`MLE_XTOL`]. Only the system, pointer and
/// basis of `sc_template` are used.
pub fn mle_estimate(readings: &[f64], sc_template: &Scenario, search_interval: (f64, f64)) -> Result<f64> {
    if readings.is_empty() {
        return Err(Error::DegenerateData("no readings".into()));
    }
    let (lo, hi) = search_interval;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(domain(format!("invalid search interval [{lo}, {hi}]")));
    }
    let family = conditional_family(sc_template);
    let objective = |chi: f64| log_likelihood(&family, readings, chi);

    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let values = grid.iter().map(|&c| objective(c)).collect::<Result<Vec<_>>>()?;
    let (best, best_value) =
        values.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    if values.iter().all(|&v| v == best_value) {
        return Err(Error::DegenerateData(
            "likelihood is flat over the search interval".into(),
        ));
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut d = grid[(best + 1).min(SCAN_POINTS - 1)];
    let mut b = d - INV_GOLDEN * (d - a);
    let mut c = a + INV_GOLDEN * (d - a);
    let mut fb = objective(b)?;
    let mut fc = objective(c)?;
    while d - a > MLE_XTOL {
        if fb >= fc {
            d = c;
            c = b;
            fc = fb;
            b = d - INV_GOLDEN * (d - a);
            fb = objective(b)?;
        } else {
            a = b;
            b = c;
            fb = fc;
            c = a + INV_GOLDEN * (d - a);
            fc = objective(c)?;
        }
    }
    let refined = polish(&objective, 0.5 * (a + d), POLISH_FRACTION * step)?;
    // the refinement cannot do worse than the best scanned point
    if objective(refined)? >= best_value {
        Ok(refined)
    } else {
        Ok(grid[best])
    }
}

/// One parabolic step through `x ± h`.
///
/// Near the maximum the log-likelihood is flat to within rounding over a
/// width of order `sqrt(eps)`, which bounds what comparisons alone can
/// resolve. The vertex of a parabola through wider-spaced points is not
/// limited that way.
fn polish<F: Fn(f64) -> Result<f64>>(objective: &F, x: f64, h: f64) -> Result<f64> {
    let (fm, f0, fp) = (objective(x - h)?, objective(x)?, objective(x + h)?);
    let curvature = fp - 2.0 * f0 + fm;
    if !(curvature < 0.0) {
        return Ok(x);
    }
    let shift = -0.5 * h * (fp - fm) / curvature;
    Ok(if shift.abs() <= h { x + shift } else { x })
}
