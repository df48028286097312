//! The confined time-of-arrival operator, assembled two independent ways.
//!
//! The spectral route uses exact matrix elements in the plane-wave basis,
//! `T_mn = -(mu/2) Q_mn (1/p_m + 1/p_n)` with
//! `Q_mn = <phi_m|q|phi_n> = -i l (-1)^j / (j pi)` for `j = n - m != 0` and
//! `Q_nn = 0`. The Nystrom route discretizes the integral kernel on a
//! Gauss-Legendre grid in the symmetric form `sqrt(w_i) K(q_i, q_j) sqrt(w_j)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::MomentumIndexSet;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::grid::PositionGrid;
use crate::matrix::HermitianOperatorMatrix;
use crate::par;
use crate::state::Representation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    NonPeriodic,
    Periodic,
}

impl KernelKind {
    /// The kernel that represents the operator at this boundary phase.
    pub fn for_gamma(gamma: f64) -> Self {
        if gamma == 0.0 {
            KernelKind::Periodic
        } else {
            KernelKind::NonPeriodic
        }
    }

    fn check(self, config: &SystemConfig) -> Result<()> {
        match self {
            KernelKind::NonPeriodic if config.gamma.sin() == 0.0 => {
                Err(Error::KernelKind("nonperiodic"))
            }
            _ => Ok(()),
        }
    }
}

/// Kernel for `gamma != 0`, with the step convention `H(0) = 1/2`.
pub fn kernel_nonperiodic(q: f64, qp: f64, config: &SystemConfig) -> Result<Complex64> {
    KernelKind::NonPeriodic.check(config)?;
    Ok(nonperiodic_unchecked(q, qp, config))
}

fn nonperiodic_unchecked(q: f64, qp: f64, config: &SystemConfig) -> Complex64 {
    let g = config.gamma;
    let pre = -config.mass_mu * (q + qp) / (4.0 * config.hbar * g.sin());
    let phase = if q > qp {
        Complex64::cis(g)
    } else if q < qp {
        Complex64::cis(-g)
    } else {
        Complex64::new(g.cos(), 0.0)
    };
    phase * pre
}

/// Kernel for `gamma = 0`, with `sgn(0) = 0`.
pub fn kernel_periodic(q: f64, qp: f64, config: &SystemConfig) -> Complex64 {
    let sgn = if q > qp {
        1.0
    } else if q < qp {
        -1.0
    } else {
        0.0
    };
    let a = config.mass_mu / (4.0 * config.hbar);
    let v = a * (q + qp) * sgn - a * (q * q - qp * qp) / config.length_l;
    // 1/i = -i
    Complex64::new(0.0, -v)
}

pub fn kernel(kind: KernelKind, q: f64, qp: f64, config: &SystemConfig) -> Result<Complex64> {
    match kind {
        KernelKind::NonPeriodic => kernel_nonperiodic(q, qp, config),
        KernelKind::Periodic => Ok(kernel_periodic(q, qp, config)),
    }
}

/// `<phi_m|q|phi_n>` for mode numbers differing by `j = n - m`.
pub fn position_element(j: i64, length_l: f64) -> Complex64 {
    if j == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, -length_l * sign / (j as f64 * PI))
}

/// `<phi_m|q^2|phi_n>` for `j = n - m`.
pub fn position_squared_element(j: i64, length_l: f64) -> f64 {
    let l2 = length_l * length_l;
    if j == 0 {
        return l2 / 3.0;
    }
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let jp = j as f64 * PI;
    2.0 * l2 * sign / (jp * jp)
}

/// Spectral truncation on the `cutoff`-mode index set.
pub fn matrix_spectral(config: &SystemConfig, cutoff: usize) -> Result<HermitianOperatorMatrix> {
    let basis = Arc::new(MomentumIndexSet::with_cutoff(config, cutoff));
    let d = basis.len();
    let g = config.gamma;
    // 1/kappa with kappa = gamma + n pi; the null mode maps to zero
    let inv: Vec<f64> = basis
        .indices()
        .map(|n| {
            let k = g + n as f64 * PI;
            if k == 0.0 {
                0.0
            } else {
                1.0 / k
            }
        })
        .collect();
    let scale = config.time_scale();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    par::for_each_row(&mut entries, d, |m, row| {
        for (n, e) in row.iter_mut().enumerate() {
            let q = position_element(n as i64 - m as i64, 1.0);
            *e = q * (-0.5 * scale * (inv[m] + inv[n]));
        }
    });
    HermitianOperatorMatrix::new(Representation::MomentumCoefficients(basis), g, entries)
}

/// Symmetric Nystrom discretization of the kernel on `grid`.
pub fn matrix_nystrom(
    config: &SystemConfig,
    grid: &Arc<PositionGrid>,
    kind: KernelKind,
) -> Result<HermitianOperatorMatrix> {
    kind.check(config)?;
    if grid.length_l() != config.length_l {
        return Err(Error::RepresentationMismatch(
            "grid length differs from config",
        ));
    }
    let d = grid.len();
    let nodes = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    par::for_each_row(&mut entries, d, |i, row| {
        for (j, e) in row.iter_mut().enumerate() {
            let k = match kind {
                KernelKind::NonPeriodic => nonperiodic_unchecked(nodes[i], nodes[j], config),
                KernelKind::Periodic => kernel_periodic(nodes[i], nodes[j], config),
            };
            *e = k * (sw[i] * sw[j]);
        }
    });
    HermitianOperatorMatrix::new(
        Representation::PositionSampled(grid.clone()),
        config.gamma,
        entries,
    )
}

/// Quadrature estimate of the squared Hilbert-Schmidt norm,
/// `int int |K(q, q')|^2 dq dq'`.
///
/// `|K|^2` is continuous across `q = q'` (both one-sided limits agree), so
/// the diagonal uses that limit rather than the step convention of the
/// matrix. For the non-periodic kernel the integrand is then a polynomial
/// and the rule is exact.
pub fn hilbert_schmidt_norm(
    kind: KernelKind,
    config: &SystemConfig,
    grid: &PositionGrid,
) -> Result<f64> {
    kind.check(config)?;
    let nodes = grid.nodes();
    let w = grid.weights();
    let rows = par::map_range(nodes.len(), |i| {
        nodes
            .iter()
            .zip(w)
            .map(|(&qp, &wj)| wj * kernel_modulus_sq(kind, nodes[i], qp, config))
            .sum::<f64>()
            * w[i]
    });
    Ok(rows.iter().sum())
}

/// Continuous extension of `|K(q, q')|^2`.
fn kernel_modulus_sq(kind: KernelKind, q: f64, qp: f64, config: &SystemConfig) -> f64 {
    let a = config.mass_mu / (4.0 * config.hbar);
    match kind {
        KernelKind::NonPeriodic => {
            let v = a * (q + qp) / config.gamma.sin();
            v * v
        }
        KernelKind::Periodic => {
            let s = if q < qp { -1.0 } else { 1.0 };
            let v = a * ((q + qp) * s - (q * q - qp * qp) / config.length_l);
            v * v
        }
    }
}

/// `sum |A_ij|^2`, which equals the sum of squared eigenvalues.
pub fn frobenius_norm_sq(matrix: &HermitianOperatorMatrix) -> f64 {
    matrix.entries().iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use std::f64::consts::FRAC_PI_2;

    fn nat(g: f64) -> SystemConfig {
        SystemConfig::natural(g).unwrap()
    }

    #[test]
    fn nonperiodic_kernel_is_hermitian() {
        let c = nat(0.7);
        let a = kernel_nonperiodic(0.3, -0.5, &c).unwrap();
        let b = kernel_nonperiodic(-0.5, 0.3, &c).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
        assert_eq!(kernel_nonperiodic(0.0, 0.0, &c).unwrap().norm(), 0.0);
        assert!(kernel_nonperiodic(0.1, 0.2, &nat(0.0)).is_err());
    }

    #[test]
    fn half_pi_kernel_is_first_periodic_term() {
        let c = nat(FRAC_PI_2);
        for (q, qp) in [(0.3, -0.5), (-0.9, 0.2), (0.4, 0.4)] {
            let sgn = if q > qp {
                1.0
            } else if q < qp {
                -1.0
            } else {
                0.0
            };
            let want = Complex64::new(0.0, -(q + qp) * sgn / 4.0);
            assert!((kernel_nonperiodic(q, qp, &c).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn periodic_kernel_examples() {
        let c = nat(0.0);
        for q in [-0.7, 0.0, 0.4] {
            assert_eq!(kernel_periodic(q, q, &c).norm(), 0.0);
        }
        assert!(kernel_periodic(1.0, 0.0, &c).norm() < 1e-16);
        let a = kernel_periodic(0.25, -0.75, &c);
        let b = kernel_periodic(-0.75, 0.25, &c);
        assert!((a - b.conj()).norm() < 1e-16);
    }

    #[test]
    fn spectral_matrix_has_zero_diagonal_and_is_hermitian() {
        let m = matrix_spectral(&nat(0.01), 32).unwrap();
        for i in 0..m.dim() {
            assert_eq!(m.get(i, i).norm(), 0.0);
        }
        assert!(m.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn nystrom_periodic_trace_vanishes() {
        let g = Arc::new(build_grid(64, 1.0).unwrap());
        let m = matrix_nystrom(&nat(0.0), &g, KernelKind::Periodic).unwrap();
        assert_eq!(m.trace().norm(), 0.0);
        assert!(m.hermiticity_defect() <= 1e-12);
        assert!(matrix_nystrom(&nat(0.0), &g, KernelKind::NonPeriodic).is_err());
    }

    #[test]
    fn hilbert_schmidt_closed_form() {
        // int int (q + q')^2 / (16 sin^2 g) = 1 / (6 sin^2 g) on [-1, 1]^2
        let c = nat(0.7);
        let g = build_grid(16, 1.0).unwrap();
        let hs = hilbert_schmidt_norm(KernelKind::NonPeriodic, &c, &g).unwrap();
        let want = 1.0 / (6.0 * 0.7f64.sin().powi(2));
        assert!((hs - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn position_elements() {
        assert_eq!(position_element(0, 1.0).norm(), 0.0);
        assert!((position_element(1, 1.0) - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-16);
        assert!((position_squared_element(0, 2.0) - 4.0 / 3.0).abs() < 1e-15);
    }
}
