//! Hermitian operator truncations and their eigenpairs.

use std::f64::consts::FRAC_PI_2;

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Representation, StateVector};

/// Largest accepted `|A_mn - conj(A_nm)|` before symmetrization.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTag {
    MomentumSpectral,
    PositionNystrom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Nodal {
    Nodal,
    NonNodal,
}

/// Whether reflection `q -> -q` commutes with the operator at this phase.
pub fn has_parity(gamma: f64) -> bool {
    gamma == 0.0 || gamma.abs() == FRAC_PI_2
}

#[derive(Debug, Clone)]
pub struct HermitianOperatorMatrix {
    representation: Representation,
    gamma: f64,
    dim: usize,
    /// Row-major.
    entries: Vec<Complex64>,
}

impl HermitianOperatorMatrix {
    /// Accepts `entries` (row-major) if they are Hermitian to
    /// [`HERMITIAN_TOLERANCE`] and stores their exact Hermitian part.
    pub fn new(
        representation: Representation,
        gamma: f64,
        entries: Vec<Complex64>,
    ) -> Result<Self> {
        let dim = representation.len();
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                dim,
                len: entries.len(),
            });
        }
        let defect = hermiticity_defect_of(dim, &entries);
        if !(defect <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian {
                defect,
                tolerance: HERMITIAN_TOLERANCE,
            });
        }
        let mut entries = entries;
        for m in 0..dim {
            let d = m * dim + m;
            entries[d] = Complex64::new(entries[d].re, 0.0);
            for n in m + 1..dim {
                let avg = 0.5 * (entries[m * dim + n] + entries[n * dim + m].conj());
                entries[m * dim + n] = avg;
                entries[n * dim + m] = avg.conj();
            }
        }
        Ok(Self {
            representation,
            gamma,
            dim,
            entries,
        })
    }

    pub fn basis(&self) -> BasisTag {
        match self.representation {
            Representation::MomentumCoefficients(_) => BasisTag::MomentumSpectral,
            Representation::PositionSampled(_) => BasisTag::PositionNystrom,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[m * self.dim + n]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect_of(self.dim, &self.entries)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `A x` in a fixed summation order.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        crate::par::map_range(d, |m| {
            self.entries[m * d..(m + 1) * d]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let evd = self
            .to_faer()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        Ok((0..self.dim).map(|i| s[i].re).collect())
    }

    fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

fn hermiticity_defect_of(dim: usize, entries: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for m in 0..dim {
        for n in m..dim {
            let d = (entries[m * dim + n] - entries[n * dim + m].conj()).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub eigenvalue: f64,
    pub eigenfunction: StateVector,
    /// 1-based rank by decreasing `|eigenvalue|`.
    pub quantum_number: usize,
    pub branch: Branch,
    pub parity: Parity,
    /// `None` until a pointwise classification has been run.
    pub nodal: Option<Nodal>,
    /// `||P v - s v||` with `s = <v, P v>`; zero when parity is not defined.
    pub parity_defect: f64,
}

/// Eigenpairs sorted by decreasing `|tau|`, positive branch first within a
/// level. Eigenvalue `n` of each sign gets quantum number `n`; an unpaired
/// eigenvalue (odd dimension) is dropped.
pub fn diagonalize(matrix: &HermitianOperatorMatrix) -> Result<Vec<EigenPair>> {
    let dim = matrix.dim;
    let evd = matrix
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }

    // faer returns ascending order: negatives from the front, positives from the back
    let n_neg = values.iter().filter(|&&v| v < 0.0).count();
    let n_pos = values.iter().filter(|&&v| v > 0.0).count();
    let levels = n_neg.min(n_pos);
    let parity_defined = has_parity(matrix.gamma);

    let vector = |col: usize| -> Result<StateVector> {
        let raw: Vec<Complex64> = (0..dim).map(|i| u[(i, col)]).collect();
        let amplitudes = match &matrix.representation {
            Representation::MomentumCoefficients(_) => raw,
            Representation::PositionSampled(g) => raw
                .iter()
                .zip(g.weights())
                .map(|(v, &w)| v / w.sqrt())
                .collect(),
        };
        Ok(StateVector::new(matrix.representation.clone(), amplitudes)?.fix_phase())
    };

    let mut out = Vec::with_capacity(2 * levels);
    for n in 0..levels {
        for (col, branch) in [(dim - 1 - n, Branch::Plus), (n, Branch::Minus)] {
            let eigenfunction = vector(col)?;
            let (parity, parity_defect) = if parity_defined {
                parity_of(&eigenfunction)?
            } else {
                (Parity::None, 0.0)
            };
            out.push(EigenPair {
                eigenvalue: values[col],
                eigenfunction,
                quantum_number: n + 1,
                branch,
                parity,
                nodal: None,
                parity_defect,
            });
        }
    }
    Ok(out)
}

/// Parity by the sign of `<v, P v>`, with the defect `||P v - s v|| / ||v||`.
pub fn parity_of(state: &StateVector) -> Result<(Parity, f64)> {
    let reflected = state.reflect().ok_or(Error::RepresentationMismatch(
        "representation is not closed under reflection",
    ))?;
    let norm2 = state.norm() * state.norm();
    if norm2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let s = state.inner(&reflected)? / norm2;
    let diff = StateVector::new(
        state.representation().clone(),
        reflected
            .amplitudes()
            .iter()
            .zip(state.amplitudes())
            .map(|(p, v)| p - s * v)
            .collect(),
    )?;
    let defect = diff.norm() / state.norm();
    let parity = if s.re >= 0.0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    Ok((parity, defect))
}

/// Largest `||tau+| - |tau-||` over paired levels.
pub fn pairing_defect(pairs: &[EigenPair]) -> f64 {
    pairs
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[0].eigenvalue.abs() - c[1].eigenvalue.abs()).abs())
        .fold(0.0, f64::max)
}

/// Positive-branch eigenvalues in quantum-number order.
pub fn positive_eigenvalues(pairs: &[EigenPair]) -> Vec<f64> {
    pairs
        .iter()
        .filter(|p| p.branch == Branch::Plus)
        .map(|p| p.eigenvalue)
        .collect()
}
