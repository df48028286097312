//! Plane-wave eigenbasis of the twisted momentum operator.
//!
//! With `phi(-l) = exp(-2i gamma) phi(l)` the momentum eigenvalues are
//! `p_n = hbar (gamma + n pi) / l` and the eigenfunctions are
//! `(2l)^{-1/2} exp(i p_n q / hbar)`. The truncated index set keeps every `n`
//! with `|n + gamma/pi| <= N + 1/2`, which is symmetric in momentum: it is
//! closed under `p -> -p` whenever that map is defined on the lattice
//! (`gamma` in `{0, +-pi/2}`).
//!
//! At `gamma = 0` the `n = 0` mode is the null space of `p`. It stays in the
//! index set and `p^{-1}` acts on it as zero (Moore-Penrose inverse).

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::grid::PositionGrid;
use crate::par;
use crate::state::{Representation, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumIndexSet {
    cutoff: usize,
    first: i64,
    len: usize,
    gamma: f64,
    hbar: f64,
    length_l: f64,
    mass_mu: f64,
    /// `k` such that `p_n -> -p_n` maps `n` to `-n - k`.
    mirror_shift: Option<i64>,
}

impl MomentumIndexSet {
    pub fn new(config: &SystemConfig) -> Self {
        Self::with_cutoff(config, config.basis_cutoff)
    }

    pub fn with_cutoff(config: &SystemConfig, cutoff: usize) -> Self {
        let shift = config.gamma / PI;
        let half = cutoff as f64 + 0.5;
        let first = (-half - shift).ceil() as i64;
        let last = (half - shift).floor() as i64;
        let k = 2.0 * shift;
        let mirror_shift = ((k - k.round()).abs() < 1e-12).then(|| k.round() as i64);
        Self {
            cutoff,
            first,
            len: (last - first + 1) as usize,
            gamma: config.gamma,
            hbar: config.hbar,
            length_l: config.length_l,
            mass_mu: config.mass_mu,
            mirror_shift,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn length_l(&self) -> f64 {
        self.length_l
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass_mu(&self) -> f64 {
        self.mass_mu
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(|k| self.first + k as i64)
    }

    /// Mode number stored at position `k`.
    pub fn index(&self, k: usize) -> i64 {
        self.first + k as i64
    }

    /// Storage position of mode `n`.
    pub fn position(&self, n: i64) -> Option<usize> {
        let k = n - self.first;
        (k >= 0 && (k as usize) < self.len).then_some(k as usize)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.position(n).is_some()
    }

    /// Position of the zero-momentum mode; present only at `gamma = 0`.
    pub fn null_mode(&self) -> Option<usize> {
        if self.gamma == 0.0 {
            self.position(0)
        } else {
            None
        }
    }

    pub fn momentum_at(&self, k: usize) -> f64 {
        self.hbar * (self.gamma + self.index(k) as f64 * PI) / self.length_l
    }

    pub fn energy_at(&self, k: usize) -> f64 {
        let p = self.momentum_at(k);
        p * p / (2.0 * self.mass_mu)
    }

    /// `1/p_n`, and zero on the null mode.
    pub fn inverse_momentum_at(&self, k: usize) -> f64 {
        let p = self.momentum_at(k);
        if p == 0.0 {
            0.0
        } else {
            1.0 / p
        }
    }

    /// Position holding `-p` for the mode at position `k`.
    pub fn mirror_position(&self, k: usize) -> Option<usize> {
        let s = self.mirror_shift?;
        self.position(-self.index(k) - s)
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.momentum_at(k)).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.energy_at(k)).collect()
    }

    /// `phi_n(q)` for the mode at position `k`.
    pub fn plane_wave_at(&self, k: usize, q: f64) -> Complex64 {
        let phase = (self.gamma + self.index(k) as f64 * PI) * q / self.length_l;
        Complex64::from_polar((2.0 * self.length_l).sqrt().recip(), phase)
    }

    /// Dense `M x K` matrix of `phi_n(q_i)`.
    pub fn synthesis_matrix(&self, grid: &PositionGrid) -> Mat<Complex64> {
        let nodes = grid.nodes();
        Mat::from_fn(nodes.len(), self.len, |i, k| {
            self.plane_wave_at(k, nodes[i])
        })
    }
}

pub fn momentum_eigenvalue(n: i64, config: &SystemConfig) -> Result<f64> {
    let set = MomentumIndexSet::new(config);
    let k = set.position(n).ok_or(Error::IndexOutOfSet(n))?;
    Ok(set.momentum_at(k))
}

pub fn energy_eigenvalue(n: i64, config: &SystemConfig) -> Result<f64> {
    let set = MomentumIndexSet::new(config);
    let k = set.position(n).ok_or(Error::IndexOutOfSet(n))?;
    Ok(set.energy_at(k))
}

/// `(2l)^{-1/2} exp(i p_n q / hbar)`.
pub fn basis_function(n: i64, q: f64, config: &SystemConfig) -> Complex64 {
    let phase = (config.gamma + n as f64 * PI) * q / config.length_l;
    Complex64::from_polar((2.0 * config.length_l).sqrt().recip(), phase)
}

/// Expansion coefficients `c_n = <phi_n|psi>` by quadrature, together with
/// the Parseval defect `|sum |c_n|^2 - ||psi||^2|`.
pub fn to_momentum(
    state: &StateVector,
    basis: &Arc<MomentumIndexSet>,
) -> Result<(StateVector, f64)> {
    let grid = state.grid().ok_or(Error::RepresentationMismatch(
        "to_momentum needs a sampled state",
    ))?;
    if grid.length_l() != basis.length_l() {
        return Err(Error::RepresentationMismatch(
            "grid and basis use different box lengths",
        ));
    }
    let nodes = grid.nodes();
    let weighted: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .zip(grid.weights())
        .map(|(a, &w)| a * w)
        .collect();
    let coeffs = par::map_range(basis.len(), |k| {
        nodes
            .iter()
            .zip(&weighted)
            .map(|(&q, a)| basis.plane_wave_at(k, q).conj() * a)
            .sum::<Complex64>()
    });
    let out = StateVector::momentum(basis.clone(), coeffs)?;
    let defect = (out.norm().powi(2) - state.norm().powi(2)).abs();
    Ok((out, defect))
}

/// Samples `sum_n c_n phi_n(q_i)` on the grid.
pub fn to_position(state: &StateVector, grid: &Arc<PositionGrid>) -> Result<StateVector> {
    let basis = state.basis().ok_or(Error::RepresentationMismatch(
        "to_position needs a coefficient state",
    ))?;
    if grid.length_l() != basis.length_l() {
        return Err(Error::RepresentationMismatch(
            "grid and basis use different box lengths",
        ));
    }
    let c = state.amplitudes();
    let samples = par::map_slice(grid.nodes(), |&q| {
        c.iter()
            .enumerate()
            .map(|(k, a)| basis.plane_wave_at(k, q) * a)
            .sum::<Complex64>()
    });
    StateVector::new(Representation::PositionSampled(grid.clone()), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use std::f64::consts::FRAC_PI_2;

    fn cfg(gamma: f64, n: usize) -> SystemConfig {
        SystemConfig::natural(gamma)
            .unwrap()
            .with_basis_cutoff(n)
            .unwrap()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(
            momentum_eigenvalue(0, &cfg(FRAC_PI_2, 8)).unwrap(),
            FRAC_PI_2
        );
        assert_eq!(momentum_eigenvalue(1, &cfg(0.0, 8)).unwrap(), PI);
        assert!((energy_eigenvalue(1, &cfg(0.0, 8)).unwrap() - PI * PI / 2.0).abs() < 1e-15);
        assert!((energy_eigenvalue(0, &cfg(0.01, 8)).unwrap() - 5e-5).abs() < 1e-18);
        assert!(momentum_eigenvalue(100, &cfg(0.0, 8)).is_err());
    }

    #[test]
    fn index_set_is_symmetric_in_momentum() {
        let s = MomentumIndexSet::new(&cfg(FRAC_PI_2, 8));
        assert_eq!(s.len(), 18);
        assert_eq!(s.index(0), -9);
        let p = s.momenta();
        for k in 0..s.len() {
            assert_eq!(p[s.mirror_position(k).unwrap()], -p[k]);
        }
        let s0 = MomentumIndexSet::new(&cfg(0.0, 8));
        assert_eq!(s0.len(), 17);
        assert_eq!(s0.null_mode(), Some(8));
        assert_eq!(s0.inverse_momentum_at(8), 0.0);
        assert!(MomentumIndexSet::new(&cfg(0.7, 8))
            .mirror_position(0)
            .is_none());
    }

    #[test]
    fn momenta_increase_and_vanish_only_at_periodic_phase() {
        for g in [0.0, 0.01, 0.7, FRAC_PI_2, -2.0] {
            let s = MomentumIndexSet::new(&cfg(g, 16));
            let p = s.momenta();
            assert!(p.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(p.contains(&0.0), g == 0.0);
        }
    }

    #[test]
    fn energies_degenerate_only_when_periodic() {
        let s = MomentumIndexSet::new(&cfg(0.0, 8));
        let e = |n: i64| s.energy_at(s.position(n).unwrap());
        assert_eq!(e(3), e(-3));
        let s = MomentumIndexSet::new(&cfg(0.3, 8));
        let e = |n: i64| s.energy_at(s.position(n).unwrap());
        assert_ne!(e(3), e(-3));
    }

    #[test]
    fn boundary_condition_holds() {
        let c = SystemConfig::natural(0.7)
            .unwrap()
            .with_length(1.3)
            .unwrap();
        let twist = Complex64::from_polar(1.0, -2.0 * c.gamma);
        for n in [-3, 0, 5] {
            let l = c.length_l;
            let d = basis_function(n, -l, &c) - twist * basis_function(n, l, &c);
            assert!(d.norm() <= 1e-12);
            assert!((basis_function(n, 0.37, &c).norm_sqr() - 1.0 / (2.0 * l)).abs() < 1e-15);
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let g = build_grid(1024, 1.0).unwrap();
        let s = MomentumIndexSet::new(&cfg(0.7, 32));
        let b = s.synthesis_matrix(&g);
        let mut worst: f64 = 0.0;
        for m in 0..s.len() {
            for n in 0..s.len() {
                let v: Complex64 = (0..g.len())
                    .map(|i| b[(i, m)].conj() * b[(i, n)] * g.weights()[i])
                    .sum();
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        assert!(worst <= 1e-10, "{worst:e}");
    }

    #[test]
    fn single_mode_round_trip() {
        let g = Arc::new(build_grid(256, 1.0).unwrap());
        let c = cfg(0.01, 16);
        let basis = Arc::new(MomentumIndexSet::new(&c));
        let samples = g
            .nodes()
            .iter()
            .map(|&q| basis_function(3, q, &c))
            .collect();
        let st = StateVector::position(g.clone(), samples).unwrap();
        let (coef, defect) = to_momentum(&st, &basis).unwrap();
        let k3 = basis.position(3).unwrap();
        for (k, a) in coef.amplitudes().iter().enumerate() {
            let target = if k == k3 { 1.0 } else { 0.0 };
            assert!((a - target).norm() <= 1e-10);
        }
        assert!(defect <= 1e-10);
        let back = to_position(&coef, &g).unwrap();
        for (a, b) in back.amplitudes().iter().zip(st.amplitudes()) {
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn wrong_representation_is_rejected() {
        let g = Arc::new(build_grid(16, 1.0).unwrap());
        let basis = Arc::new(MomentumIndexSet::new(&cfg(0.3, 8)));
        let coef =
            StateVector::momentum(basis.clone(), vec![Complex64::new(1.0, 0.0); basis.len()])
                .unwrap();
        assert!(to_momentum(&coef, &basis).is_err());
        let st = StateVector::position(g.clone(), vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        assert!(to_position(&st, &g).is_err());
    }
}
