//! Wavefunctions in position-sampled or momentum-coefficient form.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::MomentumIndexSet;
use crate::error::{Error, Result};
use crate::grid::PositionGrid;

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    PositionSampled(Arc<PositionGrid>),
    MomentumCoefficients(Arc<MomentumIndexSet>),
}

impl Representation {
    pub fn len(&self) -> usize {
        match self {
            Representation::PositionSampled(g) => g.len(),
            Representation::MomentumCoefficients(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the amplitude that `psi(q) -> psi(-q)` maps amplitude `i`
    /// onto, when the reflection closes on this representation.
    pub fn mirror(&self, i: usize) -> Option<usize> {
        match self {
            Representation::PositionSampled(g) => Some(g.mirror(i)),
            Representation::MomentumCoefficients(b) => b.mirror_position(i),
        }
    }
}

/// Amplitudes plus the norm they had at construction.
///
/// For sampled states the norm is the quadrature norm; for coefficient states
/// it is the plain Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    representation: Representation,
    amplitudes: Vec<Complex64>,
    norm: f64,
}

impl StateVector {
    pub fn new(representation: Representation, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != representation.len() {
            return Err(Error::DimensionMismatch {
                dim: representation.len(),
                len: amplitudes.len(),
            });
        }
        let norm = norm_of(&representation, &amplitudes);
        Ok(Self {
            representation,
            amplitudes,
            norm,
        })
    }

    pub fn position(grid: Arc<PositionGrid>, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(Representation::PositionSampled(grid), samples)
    }

    pub fn momentum(basis: Arc<MomentumIndexSet>, coefficients: Vec<Complex64>) -> Result<Self> {
        Self::new(Representation::MomentumCoefficients(basis), coefficients)
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn grid(&self) -> Option<&Arc<PositionGrid>> {
        match &self.representation {
            Representation::PositionSampled(g) => Some(g),
            Representation::MomentumCoefficients(_) => None,
        }
    }

    pub fn basis(&self) -> Option<&Arc<MomentumIndexSet>> {
        match &self.representation {
            Representation::MomentumCoefficients(b) => Some(b),
            Representation::PositionSampled(_) => None,
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        if !(self.norm > 0.0) || !self.norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / self.norm;
        let amplitudes: Vec<Complex64> = self.amplitudes.iter().map(|a| a * inv).collect();
        Self::new(self.representation.clone(), amplitudes)
    }

    /// `<self|other>` in the shared representation.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.representation != other.representation {
            return Err(Error::RepresentationMismatch(
                "inner product of different representations",
            ));
        }
        let s = match &self.representation {
            Representation::PositionSampled(g) => self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .zip(g.weights())
                .map(|((a, b), &w)| a.conj() * b * w)
                .sum(),
            Representation::MomentumCoefficients(_) => self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum(),
        };
        Ok(s)
    }

    /// Multiplies by the phase that makes the largest-modulus amplitude real
    /// and positive.
    pub fn fix_phase(&self) -> Self {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_abs {
                best_abs = m;
                best = i;
            }
        }
        let a = self.amplitudes[best];
        if a.norm() == 0.0 {
            return self.clone();
        }
        let phase = a.conj() / a.norm();
        let mut amplitudes: Vec<Complex64> = self.amplitudes.iter().map(|x| x * phase).collect();
        amplitudes[best] = Complex64::new(amplitudes[best].re, 0.0);
        Self {
            representation: self.representation.clone(),
            amplitudes,
            norm: self.norm,
        }
    }

    /// The reflected state `psi(-q)`, if the representation is closed under it.
    pub fn reflect(&self) -> Option<Self> {
        let n = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[self.representation.mirror(i)?] = *a;
        }
        Some(Self {
            representation: self.representation.clone(),
            amplitudes: out,
            norm: self.norm,
        })
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        if (self.norm - 1.0).abs() > tol {
            Err(Error::NotNormalized(self.norm))
        } else {
            Ok(())
        }
    }
}

fn norm_of(rep: &Representation, a: &[Complex64]) -> f64 {
    match rep {
        Representation::PositionSampled(g) => a
            .iter()
            .zip(g.weights())
            .map(|(x, &w)| w * x.norm_sqr())
            .sum::<f64>()
            .sqrt(),
        Representation::MomentumCoefficients(_) => {
            a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn grid() -> Arc<PositionGrid> {
        Arc::new(build_grid(32, 1.0).unwrap())
    }

    #[test]
    fn normalize_gives_unit_norm() {
        let g = grid();
        let s: Vec<Complex64> = g
            .nodes()
            .iter()
            .map(|&q| Complex64::new(3.0 * (-q * q).exp(), q))
            .collect();
        let st = StateVector::position(g, s).unwrap().normalize().unwrap();
        assert!((st.norm() - 1.0).abs() <= 1e-12);
        let direct = st.inner(&st).unwrap().re.sqrt();
        assert!((direct - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_state_cannot_be_normalized() {
        let g = grid();
        let st = StateVector::position(g.clone(), vec![Complex64::new(0.0, 0.0); g.len()]).unwrap();
        assert_eq!(st.normalize().unwrap_err(), Error::ZeroNorm);
    }

    #[test]
    fn length_mismatch_rejected() {
        let st = StateVector::position(grid(), vec![Complex64::new(1.0, 0.0); 3]);
        assert!(matches!(st, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn phase_fix_makes_peak_real_positive() {
        let g = grid();
        let s: Vec<Complex64> = g
            .nodes()
            .iter()
            .map(|&q| Complex64::from_polar(1.0 + q, 0.7))
            .collect();
        let st = StateVector::position(g, s).unwrap().fix_phase();
        let peak = st.amplitudes()[st.len() - 1];
        assert_eq!(peak.im, 0.0);
        assert!(peak.re > 0.0);
    }
}
