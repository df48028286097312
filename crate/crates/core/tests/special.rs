#![allow(clippy::excessive_precision)]

use ctoa_core::special::{bessel_j, bessel_j_pair, find_roots, BesselOrder, EquationTag};
use proptest::prelude::*;

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

/// Power series `sum (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))`.
fn series(nu: f64, gamma_nu1: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / gamma_nu1;
    let mut sum = term;
    for k in 1..60 {
        let k = k as f64;
        term *= -h * h / (k * (k + nu));
        sum += term;
    }
    sum
}

#[test]
fn quarter_order_matches_power_series() {
    // Gamma(5/4) = Gamma(1/4) / 4
    let g = GAMMA_QUARTER / 4.0;
    for x in [0.1, 1.0, 3.0, 7.5] {
        let want = series(0.25, g, x);
        let got = bessel_j(BesselOrder::Quarter, x).unwrap();
        assert!((got - want).abs() < 1e-13, "x={x}: {got} vs {want}");
    }
}

#[test]
fn three_term_recurrence() {
    // J_{-3/4} + J_{5/4} = (1/(2x)) J_{1/4}
    for x in [0.05, 0.9, 4.2, 17.0, 120.0, 480.0] {
        let a = bessel_j(BesselOrder::MinusThreeQuarters, x).unwrap();
        let b = bessel_j(BesselOrder::FiveQuarters, x).unwrap();
        let c = bessel_j(BesselOrder::Quarter, x).unwrap();
        let scale = a.abs().max(b.abs()).max(c.abs());
        assert!((a + b - c / (2.0 * x)).abs() <= 1e-12 * scale, "x={x}");
    }
}

#[test]
fn small_argument_leading_term() {
    // J_nu(x) ~ (x/2)^nu / Gamma(nu + 1)
    let x: f64 = 1e-7;
    let g54 = GAMMA_QUARTER / 4.0;
    let lead = (0.5 * x).powf(0.25) / g54;
    let got = bessel_j(BesselOrder::Quarter, x).unwrap();
    assert!((got / lead - 1.0).abs() < 1e-12);
}

#[test]
fn large_argument_tracks_asymptotic_form() {
    let x: f64 = 400.0;
    for order in BesselOrder::ALL {
        let nu = order.value();
        let asym = (2.0 / (std::f64::consts::PI * x)).sqrt()
            * (x - nu * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4).cos();
        let got = bessel_j(order, x).unwrap();
        assert!((got - asym).abs() < 2e-3 * (2.0 / (std::f64::consts::PI * x)).sqrt());
    }
}

#[test]
fn roots_of_cosine_are_found_in_order() {
    let r = find_roots(f64::cos, 10.0, 3, 1e-13, EquationTag::Custom).unwrap();
    for (k, x) in r.roots.iter().enumerate() {
        let want = (k as f64 + 0.5) * std::f64::consts::PI;
        assert!((x - want).abs() < 1e-12);
    }
    assert!(r.achieved_tolerance <= 1e-13);
}

proptest! {
    #[test]
    fn pair_matches_single_orders(x in 1e-3f64..400.0) {
        let (p, m) = bessel_j_pair(0.75, x).unwrap();
        prop_assert_eq!(p, bessel_j(BesselOrder::ThreeQuarters, x).unwrap());
        prop_assert_eq!(m, bessel_j(BesselOrder::MinusThreeQuarters, x).unwrap());
    }

    #[test]
    fn wronskian_identity(x in 0.01f64..300.0) {
        // J_nu J_{1-nu} + J_{-nu} J_{nu-1} = 2 sin(nu pi) / (pi x)
        let nu = 0.25;
        let (j14, jm14) = bessel_j_pair(0.25, x).unwrap();
        let (j34, jm34) = bessel_j_pair(0.75, x).unwrap();
        let lhs = j14 * j34 + jm14 * jm34;
        let rhs = 2.0 * (nu * std::f64::consts::PI).sin() / (std::f64::consts::PI * x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }
}
