use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use ctoa_core::basis::{
    basis_function, momentum_eigenvalue, to_momentum, to_position, MomentumIndexSet,
};
use ctoa_core::config::{make_config, parse_config_str, SystemConfig};
use ctoa_core::grid::build_grid;
use ctoa_core::matrix::{diagonalize, pairing_defect, positive_eigenvalues};
use ctoa_core::operator::{matrix_nystrom, matrix_spectral, position_squared_element, KernelKind};
use ctoa_core::state::StateVector;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn config_file_overrides_defaults() {
    let raw =
        parse_config_str("# figure parameters\ngamma = 0.01\nbasis_cutoff = 64\n\nmass_mu = 2\n")
            .unwrap();
    let c = make_config(&raw).unwrap();
    assert_eq!(c.gamma, 0.01);
    assert_eq!(c.basis_cutoff, 64);
    assert_eq!(c.mass_mu, 2.0);
    assert_eq!(c.hbar, 1.0);
}

#[test]
fn config_errors_carry_line_numbers() {
    let err = parse_config_str("gamma = 0.1\nwidth = 3\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    assert!(parse_config_str("gamma 0.1").is_err());
    let raw = parse_config_str("grid_points = 4").unwrap();
    assert!(make_config(&raw).is_err());
}

#[test]
fn position_squared_elements_match_quadrature() {
    let c = SystemConfig::natural(0.4).unwrap();
    let g = build_grid(256, 1.0).unwrap();
    for (m, n) in [(0i64, 0i64), (0, 1), (-3, 2), (5, 5)] {
        let quad: Complex64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(&q, &w)| {
                basis_function(m, q, &c).conj() * basis_function(n, q, &c) * (q * q * w)
            })
            .sum();
        assert!((quad.re - position_squared_element(n - m, 1.0)).abs() < 1e-12);
        assert!(quad.im.abs() < 1e-12);
    }
}

#[test]
fn coefficient_round_trip_is_exact_on_a_fine_grid() {
    let c = SystemConfig::natural(0.01)
        .unwrap()
        .with_basis_cutoff(32)
        .unwrap();
    let basis = Arc::new(MomentumIndexSet::new(&c));
    let amps: Vec<Complex64> = (0..basis.len())
        .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
        .collect();
    let s = StateVector::momentum(basis.clone(), amps)
        .unwrap()
        .normalize()
        .unwrap();
    let grid = Arc::new(build_grid(4 * 32, 1.0).unwrap());
    let (back, defect) = to_momentum(&to_position(&s, &grid).unwrap(), &basis).unwrap();
    for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
        assert!((a - b).norm() < 1e-12);
    }
    assert!(defect < 1e-12);
}

#[test]
fn eigenvalues_scale_with_mu_l2_over_hbar() {
    let a = SystemConfig::natural(FRAC_PI_2)
        .unwrap()
        .with_basis_cutoff(48)
        .unwrap();
    let b = a
        .with_mass(3.0)
        .unwrap()
        .with_hbar(0.5)
        .unwrap()
        .with_length(2.0)
        .unwrap();
    let ta = positive_eigenvalues(&diagonalize(&matrix_spectral(&a, 48).unwrap()).unwrap());
    let tb = positive_eigenvalues(&diagonalize(&matrix_spectral(&b, 48).unwrap()).unwrap());
    let ratio = b.time_scale() / a.time_scale();
    assert_eq!(ratio, 24.0);
    for (x, y) in ta.iter().zip(&tb).take(10) {
        assert!((y / x - ratio).abs() < 1e-12 * ratio);
    }
}

#[test]
fn nystrom_and_spectral_agree_on_the_leading_eigenvalue() {
    let c = SystemConfig::natural(0.6).unwrap();
    let grid = Arc::new(build_grid(256, 1.0).unwrap());
    let ny = positive_eigenvalues(
        &diagonalize(&matrix_nystrom(&c, &grid, KernelKind::NonPeriodic).unwrap()).unwrap(),
    );
    let sp = positive_eigenvalues(&diagonalize(&matrix_spectral(&c, 256).unwrap()).unwrap());
    assert!((ny[0] - sp[0]).abs() / ny[0] < 5e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn index_set_is_symmetric_about_minus_gamma_over_pi(gamma in -3.0f64..3.0, cutoff in 8usize..64) {
        let c = SystemConfig::natural(gamma).unwrap();
        let b = MomentumIndexSet::with_cutoff(&c, cutoff);
        for n in b.indices() {
            prop_assert!((n as f64 + gamma / PI).abs() <= cutoff as f64 + 0.5);
        }
        let ps = b.momenta();
        prop_assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn plane_waves_obey_the_boundary_condition(gamma in -3.0f64..3.0, n in -40i64..40) {
        let c = SystemConfig::natural(gamma).unwrap();
        let left = basis_function(n, -1.0, &c);
        let right = basis_function(n, 1.0, &c);
        prop_assert!((left - Complex64::cis(-2.0 * gamma) * right).norm() < 1e-12);
        if gamma + n as f64 * PI != 0.0 {
            let p = momentum_eigenvalue(n, &c).unwrap();
            prop_assert!((p - (gamma + n as f64 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_matrix_is_hermitian_with_paired_spectrum(gamma in prop_oneof![Just(0.0), Just(FRAC_PI_2), 0.05f64..3.0]) {
        let c = SystemConfig::natural(gamma).unwrap();
        let m = matrix_spectral(&c, 24).unwrap();
        prop_assert!(m.hermiticity_defect() <= 1e-12);
        if ctoa_core::matrix::has_parity(gamma) {
            prop_assert!(pairing_defect(&diagonalize(&m).unwrap()) <= 1e-10);
        }
    }
}
