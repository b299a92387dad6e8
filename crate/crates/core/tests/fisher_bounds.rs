use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wma_core::fisher::{f_total_closed, fisher_numeric_auto, ratio_p_numeric};
use wma_core::model::{
    postselect_probability, wma_density_p, wma_density_q, Basis, Scenario, SystemSpec, ThermalPointer,
};

fn weak_p_scenario(theta_i: f64, theta_f: f64, z: f64, chi_sigma: f64) -> Scenario {
    let sys = SystemSpec::new(1.0, -1.0, theta_i, 0.0, theta_f).unwrap();
    Scenario::new(sys, ThermalPointer::new(z, 1.0).unwrap(), chi_sigma, Basis::P).unwrap()
}

#[test]
fn real_part_ratio_respects_thermal_ceiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &z in &[0.0, 0.3, 0.6, 0.9] {
        let ceiling = (1.0 - z) / (1.0 + z);
        let mut tested = 0;
        while tested < 12 {
            let sc = weak_p_scenario(rng.random_range(-PI..PI), rng.random_range(-PI..PI), z, 1e-3);
            if postselect_probability(&sc).unwrap() < 1e-4 {
                continue;
            }
            let ratio = ratio_p_numeric(&sc).unwrap();
            assert!(ratio <= ceiling + 1e-4, "z={z}: {ratio} > {ceiling}");
            tested += 1;
        }
    }
}

#[test]
fn hot_pointer_real_part_ratio_below_one_nineteenth() {
    for (ti, tf) in [(PI / 2.0, -PI / 2.0 + 0.3), (1.0, 0.5), (2.0, -2.5)] {
        let ratio = ratio_p_numeric(&weak_p_scenario(ti, tf, 0.9, 1e-3)).unwrap();
        assert!(ratio <= 1.0 / 19.0 + 1e-4, "{ratio}");
    }
}

#[test]
fn weak_limit_information_uses_real_part_of_transition_amplitude() {
    // A_m F[P_wma(p)] -> (r a1 + t a2)^2 / var_p at phi = 0 as chi -> 0
    for (ti, tf, z) in [(1.3, -0.4, 0.0), (2.2, 0.9, 0.5), (0.4, -2.9, 0.8)] {
        let sys = SystemSpec::new(1.5, -0.5, ti, 0.0, tf).unwrap();
        let sc = Scenario::new(sys, ThermalPointer::new(z, 1.0).unwrap(), 1e-4, Basis::P).unwrap();
        let am = postselect_probability(&sc).unwrap();
        let f = fisher_numeric_auto(&wma_density_p(&sc).unwrap(), sc.chi)
            .unwrap()
            .value;
        let limit = (sys.r() * sys.a1 + sys.t() * sys.a2).powi(2) / sc.pointer.var_p();
        assert!(((am * f - limit) / limit).abs() < 1e-3, "{} vs {limit}", am * f);
    }
}

#[test]
fn printed_total_information_is_not_an_upper_bound() {
    // with r and t of opposite sign the printed (r a1 - t a2)^2 undercounts
    let sys = SystemSpec::new(1.0, -1.0, 0.6, 0.0, -1.0).unwrap();
    assert!(sys.r() * sys.t() < 0.0);
    let sc = Scenario::new(sys, ThermalPointer::new(0.0, 1.0).unwrap(), 1e-3, Basis::P).unwrap();
    let am = postselect_probability(&sc).unwrap();
    assert!(am > 0.01);
    let f = fisher_numeric_auto(&wma_density_p(&sc).unwrap(), sc.chi)
        .unwrap()
        .value;
    let printed = f_total_closed(&sc);
    assert!(am * f > 1.5 * printed, "{} vs {printed}", am * f);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fisher_information_is_non_negative(
        z in 0.0f64..0.95,
        chi in -1.5f64..1.5,
        ti in -PI..PI,
        tf in -PI..PI,
        phi in -PI..PI,
    ) {
        let sys = SystemSpec::new(1.0, -1.0, ti, phi, tf).unwrap();
        let sc = Scenario::new(sys, ThermalPointer::new(z, 1.0).unwrap(), chi, Basis::P).unwrap();
        prop_assume!(postselect_probability(&sc).unwrap() > 1e-6);
        let fp = fisher_numeric_auto(&wma_density_p(&sc).unwrap(), chi).unwrap();
        let fq = fisher_numeric_auto(&wma_density_q(&sc).unwrap(), chi).unwrap();
        prop_assert!(fp.value >= -1e-10);
        prop_assert!(fq.value >= -1e-10);
    }
}
