/// Default finite-difference step for a parameter value `chi`.
pub fn default_step(chi: f64) -> f64 {
    (1e-4 * chi.abs()).max(1e-6)
}

/// Derivative of `g` at `chi` by central differences at steps `h` and `h/2`
/// combined with one Richardson extrapolation level, giving O(h^4) error.
pub fn d_dchi<G: Fn(f64) -> f64>(g: G, chi: f64, step_hint: f64) -> f64 {
    let h = step_hint;
    let coarse = (g(chi + h) - g(chi - h)) / (2.0 * h);
    let half = 0.5 * h;
    let fine = (g(chi + half) - g(chi - half)) / h;
    (4.0 * fine - coarse) / 3.0
}
