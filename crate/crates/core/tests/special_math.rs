use proptest::prelude::*;
use wma_core::special_math::{d_dchi, hermite, integrate, mehler_kernel, QuadratureSpec};

/// Partial sums `S_0, S_1, ..., S_{n_terms-1}` of the Mehler series, each term
/// written as `h_n(x) h_n(y) w^n` with `h_n = H_n / sqrt(2^n n!)` built by its
/// own recurrence so that orders in the hundreds stay in range.
fn mehler_partial_sums(x: f64, y: f64, w: f64, n_terms: usize) -> Vec<f64> {
    let (mut hx_prev, mut hy_prev) = (1.0, 1.0);
    let (mut hx, mut hy) = (std::f64::consts::SQRT_2 * x, std::f64::consts::SQRT_2 * y);
    let mut sums = vec![1.0, 1.0 + hx * hy * w];
    let mut wn = w;
    for n in 1..n_terms.saturating_sub(1) {
        let nf = n as f64;
        let a = (2.0 / (nf + 1.0)).sqrt();
        let b = (nf / (nf + 1.0)).sqrt();
        let hx_next = a * x * hx - b * hx_prev;
        let hy_next = a * y * hy - b * hy_prev;
        hx_prev = hx;
        hy_prev = hy;
        hx = hx_next;
        hy = hy_next;
        wn *= w;
        sums.push(sums[sums.len() - 1] + hx * hy * wn);
    }
    sums
}

#[test]
fn mehler_matches_plain_partial_sum() {
    // direct Σ_{n≤50} H_n(1)^2 (0.25)^n / n!
    let mut sum = 0.0;
    let mut fact = 1.0;
    for n in 0..=50 {
        if n > 0 {
            fact *= n as f64;
        }
        let h = hermite(n, 1.0).unwrap();
        sum += h * h * 0.25f64.powi(n as i32) / fact;
    }
    let closed = mehler_kernel(1.0, 1.0, 0.5).unwrap();
    assert!(((sum - closed) / closed).abs() < 1e-10, "{sum} vs {closed}");
}

#[test]
fn mehler_partial_sums_converge_on_grid() {
    // At w = 0.9 the opposite-sign corners of [-3, 3]^2 still carry a tail of
    // ~1e-7 after 200 terms, so convergence is checked out to 400 there.
    let grid: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect();
    for &(w, n_terms) in &[(0.1, 201), (0.5, 201), (0.9, 401)] {
        for &x in &grid {
            for &y in &grid {
                let closed = mehler_kernel(x, y, w).unwrap();
                // best partial sum; absolute where the kernel is
                // O(1) or smaller, relative where it is large
                let err = mehler_partial_sums(x, y, w, n_terms)
                    .iter()
                    .map(|s| (s - closed).abs() / closed.abs().max(1.0))
                    .fold(f64::INFINITY, f64::min);
                assert!(err < 1e-8, "x={x} y={y} w={w}: error {err:e}");
            }
        }
    }
}

#[test]
fn hermite_derivative_identity() {
    for n in 1..=10 {
        for i in 0..=16 {
            let x = -2.0 + 0.25 * i as f64;
            let numeric = d_dchi(|s| hermite(n, s).unwrap(), x, 1e-3);
            let exact = 2.0 * n as f64 * hermite(n - 1, x).unwrap();
            let scale = exact.abs().max(1.0);
            assert!((numeric - exact).abs() / scale < 1e-6, "n={n} x={x}");
        }
    }
}

proptest! {
    #[test]
    fn integrate_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        mu in -1.0f64..1.0,
        width in 0.3f64..2.0,
        freq in 0.0f64..4.0,
    ) {
        let spec = QuadratureSpec::window(0.0, 12.0);
        let f = |x: f64| (-(x - mu).powi(2) / (2.0 * width * width)).exp();
        let g = |x: f64| (-0.5 * x * x).exp() * (freq * x).cos();
        let lhs = integrate(|x| a * f(x) + b * g(x), &spec).unwrap();
        let fi = integrate(f, &spec).unwrap();
        let gi = integrate(g, &spec).unwrap();
        let rhs = a * fi.value + b * gi.value;
        let tol = lhs.error + a.abs() * fi.error + b.abs() * gi.error + 1e-12;
        prop_assert!((lhs.value - rhs).abs() <= tol, "{} vs {}", lhs.value, rhs);
    }
}
