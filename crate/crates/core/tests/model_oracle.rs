use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;
use wma_core::model::{
    overlap, postselect_probability, wma_density_p, wma_density_q, AngleConvention, Basis, DensityFamily,
    FockOracle, Scenario, SystemSpec, ThermalPointer,
};
use wma_core::special_math::integrate;

fn max_abs_difference<D: DensityFamily>(family: &D, oracle: &FockOracle, chi: f64) -> f64 {
    let (center, halfwidth) = family.support(chi);
    // 101 points over the central ±5 standard deviations
    let span = 0.5 * halfwidth;
    (0..101)
        .map(|i| center - span + span * i as f64 / 50.0)
        .map(|s| (family.density(s, chi) - oracle.density(s)).abs())
        .fold(0.0, f64::max)
}

fn generic_system() -> SystemSpec {
    SystemSpec::new(1.0, -1.0, 1.1, 0.4, -0.7).unwrap()
}

#[test]
fn momentum_density_matches_fock_oracle_at_sample_points() {
    let sys =
        SystemSpec::with_convention(1.0, -1.0, FRAC_PI_4, 0.0, -FRAC_PI_4, AngleConvention::Bloch).unwrap();
    let sc = Scenario::new(sys, ThermalPointer::new(0.5, 1.0).unwrap(), 0.01, Basis::P).unwrap();
    let family = wma_density_p(&sc).unwrap();
    let oracle = FockOracle::new(&sc, None).unwrap();
    for p in [-0.05, 0.0, 0.05] {
        assert!(
            (family.density(p, sc.chi) - oracle.density(p)).abs() < 1e-8,
            "p={p}"
        );
    }
}

#[test]
fn position_density_matches_fock_oracle_at_hot_point() {
    let sc = Scenario::with_k2(
        SystemSpec::balanced(0.05),
        ThermalPointer::new(0.9, 1.0).unwrap(),
        0.0095,
        Basis::Q,
    )
    .unwrap();
    let family = wma_density_q(&sc).unwrap();
    let mass = integrate(|q| family.density(q, sc.chi), &family.window(sc.chi))
        .unwrap()
        .value;
    assert!((mass - 1.0).abs() < 1e-8);
    let oracle = FockOracle::new(&sc, None).unwrap();
    assert!(max_abs_difference(&family, &oracle, sc.chi) < 1e-7);
}

#[test]
fn oracle_is_normalized() {
    let sc = Scenario::new(
        generic_system(),
        ThermalPointer::new(0.5, 0.8).unwrap(),
        0.3,
        Basis::P,
    )
    .unwrap();
    let oracle = FockOracle::new(&sc, Some(100)).unwrap();
    let mass = integrate(|p| oracle.density(p), &wma_density_p(&sc).unwrap().window(sc.chi))
        .unwrap()
        .value;
    assert!((mass - 1.0).abs() < 1e-7);
    // the unnormalized oracle mass is the post-selection probability
    assert!((oracle.normalization() - postselect_probability(&sc).unwrap()).abs() < 1e-9);
}

#[test]
fn closed_forms_match_oracle_across_temperatures() {
    for z in [0.0, 0.3, 0.6, 0.9] {
        for chi in [0.05, 0.8] {
            let base = Scenario::new(
                generic_system(),
                ThermalPointer::new(z, 0.9).unwrap(),
                chi,
                Basis::P,
            )
            .unwrap();
            let p = wma_density_p(&base).unwrap();
            let op = FockOracle::new(&base, None).unwrap();
            let dp = max_abs_difference(&p, &op, chi);
            assert!(dp < 1e-6, "P z={z} chi={chi}: {dp:e}");

            let qsc = base.with_basis(Basis::Q);
            let q = wma_density_q(&qsc).unwrap();
            let oq = FockOracle::new(&qsc, None).unwrap();
            let dq = max_abs_difference(&q, &oq, chi);
            assert!(dq < 1e-6, "Q z={z} chi={chi}: {dq:e}");
        }
    }
}

#[test]
fn zero_temperature_reduction() {
    // pure-Gaussian pointer forms with (1+z)/(1-z) = 1 and (a_i - z a_j)/(1-z) = a_i
    let sys = generic_system();
    let sigma = 0.8;
    let chi = 0.37;
    let sc = Scenario::new(sys, ThermalPointer::new(0.0, sigma).unwrap(), chi, Basis::P).unwrap();
    let am = postselect_probability(&sc).unwrap();
    let (r, t) = (sys.r(), sys.t());
    let vp = 1.0 / (4.0 * sigma * sigma);
    let vq = sigma * sigma;
    let g = |x: f64, v: f64| (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
    let dp = wma_density_p(&sc).unwrap();
    let dq = wma_density_q(&sc.with_basis(Basis::Q)).unwrap();
    for i in 0..41 {
        let s = -2.0 + 0.1 * i as f64;
        let cross = (-((s + sys.a2 * chi).powi(2) + (s + sys.a1 * chi).powi(2)) / (4.0 * vp)).exp()
            / (2.0 * PI * vp).sqrt();
        let pure_p = (r * r * g(s + sys.a1 * chi, vp)
            + t * t * g(s + sys.a2 * chi, vp)
            + 2.0 * r * t * sys.phi.cos() * cross)
            / am;
        assert!((dp.density(s, chi) - pure_p).abs() < 1e-12, "p={s}");
        let fringe = r * r + t * t + 2.0 * r * t * (sys.phi + (sys.a1 - sys.a2) * chi * s).cos();
        let pure_q = g(s, vq) * fringe / am;
        assert!((dq.density(s, chi) - pure_q).abs() < 1e-12, "q={s}");
    }
}

#[test]
fn overlap_decreases_with_coupling() {
    for z in [0.0, 0.5, 0.9] {
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let chi = 0.1 * i as f64;
            let sc = Scenario::new(
                generic_system(),
                ThermalPointer::new(z, 1.0).unwrap(),
                chi,
                Basis::P,
            )
            .unwrap();
            let o = overlap(&sc).unwrap();
            assert!(o < last || (i == 0 && (o - 1.0).abs() < 1e-10), "z={z} chi={chi}");
            // the resummed integral is exp(-k^2/2)
            assert!((o - (-0.5 * sc.k2()).exp()).abs() < 1e-10);
            last = o;
        }
    }
}

#[test]
fn pure_pointer_overlap_by_direct_quadrature() {
    // <φ0(p + chi) | φ0(p - chi)> for a z = 0 pointer
    let sigma = 1.0;
    let chi = 1.0;
    let phi0 = |p: f64| (2.0 * PI / (4.0 * sigma * sigma)).powf(-0.25) * (-sigma * sigma * p * p).exp();
    let spec = wma_core::special_math::QuadratureSpec::window(0.0, 12.0);
    let direct = integrate(|p| phi0(p + chi) * phi0(p - chi), &spec).unwrap().value;
    let sc = Scenario::new(
        generic_system(),
        ThermalPointer::new(0.0, sigma).unwrap(),
        chi,
        Basis::P,
    )
    .unwrap();
    assert!((overlap(&sc).unwrap() - direct).abs() < 1e-10);
    assert!((direct - (-2.0f64).exp()).abs() < 1e-10);
}

fn any_scenario() -> impl Strategy<Value = Scenario> {
    (
        0.0f64..0.95,
        0.2f64..3.0,
        0.0f64..2.0,
        -PI..PI,
        -PI..PI,
        -PI..PI,
        prop_oneof![Just(AngleConvention::Bloch), Just(AngleConvention::Amplitude)],
    )
        .prop_map(|(z, sigma, chi_sigma, ti, tf, phi, conv)| {
            let sys = SystemSpec::with_convention(1.0, -1.0, ti, phi, tf, conv).unwrap();
            Scenario::new(
                sys,
                ThermalPointer::new(z, sigma).unwrap(),
                chi_sigma / sigma,
                Basis::P,
            )
            .unwrap()
        })
        .prop_filter("post-selection must succeed", |sc| {
            postselect_probability(sc).unwrap() > 1e-6
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn densities_normalize_and_match_postselection(sc in any_scenario()) {
        let am = postselect_probability(&sc).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&am));
        let dp = wma_density_p(&sc).unwrap();
        let dq = wma_density_q(&sc).unwrap();
        let wp = dp.window(sc.chi);
        let wq = dq.window(sc.chi);
        let mp = integrate(|p| dp.density(p, sc.chi), &wp).unwrap().value;
        let mq = integrate(|q| dq.density(q, sc.chi), &wq).unwrap().value;
        prop_assert!((mp - 1.0).abs() < 1e-7, "p mass {}", mp);
        prop_assert!((mq - 1.0).abs() < 1e-7, "q mass {}", mq);
        let num = integrate(|p| dp.numerator(p, sc.chi), &wp).unwrap().value;
        prop_assert!((num - am).abs() < 1e-8, "numerator {} vs A_m {}", num, am);
    }

    #[test]
    fn densities_are_non_negative(sc in any_scenario(), u in -1.0f64..1.0) {
        let dp = wma_density_p(&sc).unwrap();
        let dq = wma_density_q(&sc).unwrap();
        let (cp, hp) = dp.support(sc.chi);
        let (cq, hq) = dq.support(sc.chi);
        prop_assert!(dp.density(cp + u * hp, sc.chi) >= 0.0);
        prop_assert!(dq.density(cq + u * hq, sc.chi) >= 0.0);
    }
}
