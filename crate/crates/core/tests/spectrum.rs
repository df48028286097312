#![allow(clippy::excessive_precision)]

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use ctoa_core::analytic::{classify, spectrum, EigenfunctionSpec, SpectralCase};
use ctoa_core::config::SystemConfig;
use ctoa_core::grid::build_grid;
use ctoa_core::matrix::{Branch, Nodal, Parity};
use proptest::prelude::*;

// 30-digit reference roots of the generic characteristic equation
const ROOTS_0_01: [(usize, f64); 4] = [
    (1, 0.008_660_221_045_440_656),
    (2, 2.780_779_509_501_434),
    (20, 31.026_146_687_678_177),
    (21, 31.803_815_759_320_188),
];
const ROOTS_0_7: [f64; 4] = [
    0.593_056_549_071_383_9,
    2.438_452_286_058_24,
    3.836_335_692_756_261,
    5.568_208_391_547_716,
];

#[test]
fn generic_roots_match_reference() {
    let s = spectrum(
        SpectralCase::Generic { gamma: 0.01 },
        &SystemConfig::natural(0.01).unwrap(),
        21,
    )
    .unwrap();
    for (n, r) in ROOTS_0_01 {
        let got = s.level(n).unwrap().root;
        assert!((got - r).abs() < 1e-11, "n={n}: {got} vs {r}");
    }
    let s = spectrum(
        SpectralCase::Generic { gamma: 0.7 },
        &SystemConfig::natural(0.7).unwrap(),
        4,
    )
    .unwrap();
    for (l, r) in s.levels.iter().zip(ROOTS_0_7) {
        assert!((l.root - r).abs() < 1e-11);
    }
}

#[test]
fn published_eigenvalues() {
    let c = SystemConfig::natural(0.01).unwrap();
    let s = spectrum(SpectralCase::from_gamma(0.01), &c, 21).unwrap();
    for (n, tau) in [(2, 0.0899), (6, 0.0276), (20, 0.0081), (21, 0.0079)] {
        assert!((s.level(n).unwrap().tau_plus - tau).abs() <= 5e-4);
    }
}

#[test]
fn generic_phase_approaches_half_pi_spectrum() {
    let a = spectrum(
        SpectralCase::PiHalf,
        &SystemConfig::natural(FRAC_PI_2).unwrap(),
        6,
    )
    .unwrap();
    let g = FRAC_PI_2 - 1e-9;
    let b = spectrum(
        SpectralCase::from_gamma(g),
        &SystemConfig::natural(g).unwrap(),
        6,
    )
    .unwrap();
    for (x, y) in a.levels.iter().zip(&b.levels) {
        assert!((x.root - y.root).abs() < 1e-6);
    }
}

#[test]
fn parity_alternates_at_half_pi() {
    let c = SystemConfig::natural(FRAC_PI_2).unwrap();
    let grid = Arc::new(build_grid(512, 1.0).unwrap());
    let s = spectrum(SpectralCase::PiHalf, &c, 6).unwrap();
    for l in &s.levels {
        let want = if l.n % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        };
        assert_eq!(l.parity, want);
        let spec = EigenfunctionSpec::new(s.case, *l, Branch::Plus, &c).unwrap();
        let cl = classify(&spec, &grid).unwrap();
        assert_eq!(cl.parity, want);
        assert!(cl.parity_defect < 1e-10);
    }
}

#[test]
fn odd_levels_have_one_node_at_the_figure_phase() {
    let c = SystemConfig::natural(0.01).unwrap();
    let grid = Arc::new(build_grid(1024, 1.0).unwrap());
    let s = spectrum(SpectralCase::from_gamma(0.01), &c, 24).unwrap();
    // level 1 is quasi-nodal: its minimum is O(gamma^2), far above the node threshold
    for l in s.levels.iter().skip(1) {
        let spec = EigenfunctionSpec::new(s.case, *l, Branch::Plus, &c).unwrap();
        let cl = classify(&spec, &grid).unwrap();
        let want = if l.n % 2 == 0 {
            Nodal::NonNodal
        } else {
            Nodal::Nodal
        };
        assert_eq!(cl.nodal, want, "n={}", l.n);
    }
}

#[test]
fn branches_are_complex_conjugate_at_parity_phases() {
    for gamma in [0.0, FRAC_PI_2] {
        let c = SystemConfig::natural(gamma).unwrap();
        let s = spectrum(SpectralCase::from_gamma(gamma), &c, 4).unwrap();
        for l in &s.levels {
            let p = EigenfunctionSpec::new(s.case, *l, Branch::Plus, &c).unwrap();
            let m = EigenfunctionSpec::new(s.case, *l, Branch::Minus, &c).unwrap();
            for q in [-0.8, -0.1, 0.35, 0.9] {
                let a = p.eval(q).unwrap().norm_sqr();
                let b = m.eval(q).unwrap().norm_sqr();
                assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            }
            assert_eq!(l.tau_minus, -l.tau_plus);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn eigenfunctions_normalize_on_the_grid(gamma in 0.01f64..3.0, n in 1usize..8) {
        let c = SystemConfig::natural(gamma).unwrap();
        let grid = Arc::new(build_grid(256, 1.0).unwrap());
        let s = spectrum(SpectralCase::from_gamma(gamma), &c, n).unwrap();
        let spec = EigenfunctionSpec::new(s.case, *s.level(n).unwrap(), Branch::Plus, &c).unwrap();
        let v = spec.normalized(&grid).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_decrease_with_level(gamma in 0.01f64..3.0) {
        let c = SystemConfig::natural(gamma).unwrap();
        let s = spectrum(SpectralCase::from_gamma(gamma), &c, 10).unwrap();
        prop_assert!(s.levels.windows(2).all(|w| w[0].tau_plus > w[1].tau_plus));
    }
}
