//! Closed-form spectrum and eigenfunctions.
//!
//! Eigenvalues are `tau = +-mu l^2 / (4 hbar r)` where `r` runs over the
//! positive roots of a Bessel characteristic equation that depends on the
//! boundary phase. Eigenfunctions are built from
//! `J^{-+}_{nu,rho}(x) = x^nu (J_{-nu}(x) -+ i J_rho(x))` at `x = r q^2 / l^2`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::grid::PositionGrid;
use crate::matrix::{has_parity, parity_of, Branch, HermitianOperatorMatrix, Nodal, Parity};
use crate::par;
use crate::special::{
    bessel_j, bessel_j_pair, find_roots, BesselOrder, EquationTag, GAMMA_QUARTER,
    GAMMA_THREE_QUARTERS,
};
use crate::state::StateVector;

/// Below this argument `J^{-+}` switches to its power series.
pub const SMALL_X: f64 = 1e-6;

/// `|phi|^2 / max |phi|^2` below which a local minimum counts as a node.
pub const NODE_THRESHOLD: f64 = 1e-8;

/// Largest reflection defect accepted when tagging parity.
pub const PARITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralCase {
    Generic { gamma: f64 },
    PiHalf,
    Periodic,
}

impl SpectralCase {
    pub fn from_gamma(gamma: f64) -> Self {
        if gamma == 0.0 {
            SpectralCase::Periodic
        } else if gamma.abs() == FRAC_PI_2 {
            SpectralCase::PiHalf
        } else {
            SpectralCase::Generic { gamma }
        }
    }
}

/// Which characteristic equation a root belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// The single equation of a generic phase.
    All,
    Even,
    Odd,
}

/// The four quarter-order values a root equation or eigenfunction needs.
#[derive(Debug, Clone, Copy)]
struct Quarters {
    jm34: f64,
    jm14: f64,
    j14: f64,
    j34: f64,
}

impl Quarters {
    fn at(x: f64) -> Result<Self> {
        let (j14, jm14) = bessel_j_pair(0.25, x)?;
        let (j34, jm34) = bessel_j_pair(0.75, x)?;
        Ok(Self {
            jm34,
            jm14,
            j14,
            j34,
        })
    }
}

/// Value of the (rescaled) characteristic function at `x > 0`.
///
/// The generic equation is returned as
/// `sin^2 g J_{-3/4} J_{-1/4} - cos^2 g J_{3/4} J_{1/4}`, which has the same
/// positive roots as the `cot^2` form and stays bounded as `g -> 0`.
pub fn characteristic_value(x: f64, case: SpectralCase, family: Family) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::BesselDomain(x));
    }
    let b = Quarters::at(x)?;
    match (case, family) {
        (SpectralCase::Generic { gamma }, Family::All) => {
            let (s, c) = gamma.sin_cos();
            Ok(s * s * b.jm34 * b.jm14 - c * c * b.j34 * b.j14)
        }
        (SpectralCase::PiHalf, Family::All) => Ok(b.jm34 * b.jm14),
        (SpectralCase::PiHalf, Family::Even) => Ok(b.jm34),
        (SpectralCase::PiHalf | SpectralCase::Periodic, Family::Odd) => Ok(b.jm14),
        (SpectralCase::Periodic, Family::Even) => {
            let j54 = bessel_j(BesselOrder::FiveQuarters, x)?;
            Ok(b.jm34 + 2.0 / 3.0 * j54 + b.j14 / x)
        }
        _ => Err(Error::InvalidArgument(format!(
            "family {family:?} does not exist for {case:?}"
        ))),
    }
}

fn equation_tag(case: SpectralCase, family: Family) -> EquationTag {
    match (case, family) {
        (SpectralCase::Generic { gamma }, _) => EquationTag::Generic { gamma },
        (SpectralCase::PiHalf, Family::Odd) => EquationTag::Pi2Odd,
        (SpectralCase::PiHalf, _) => EquationTag::Pi2Even,
        (SpectralCase::Periodic, Family::Odd) => EquationTag::PeriodicOdd,
        (SpectralCase::Periodic, _) => EquationTag::PeriodicEven,
    }
}

/// First `count` positive roots of one characteristic equation.
///
/// The scan uses `x f(x)`, which is finite at the origin and so keeps the
/// small root of a nearly periodic generic phase inside the first bracket.
pub fn family_roots(
    case: SpectralCase,
    family: Family,
    count: usize,
    tol: f64,
) -> Result<crate::special::RootList> {
    // at most two roots per pi across all equations, plus the small one
    let x_max = (count as f64 + 2.0) * PI;
    let f = |x: f64| x * characteristic_value(x, case, family).unwrap_or(f64::NAN);
    find_roots(f, x_max, count, tol, equation_tag(case, family))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Rank in the merged ascending root list, from 1.
    pub n: usize,
    /// Rank within its own family, from 1.
    pub family_index: usize,
    pub family: Family,
    pub root: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub case: SpectralCase,
    pub levels: Vec<Level>,
    pub achieved_tolerance: f64,
}

impl Spectrum {
    pub fn level(&self, n: usize) -> Result<&Level> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::LevelOutOfRange {
                n,
                available: self.levels.len(),
            });
        }
        Ok(&self.levels[n - 1])
    }

    pub fn tau_plus(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.tau_plus).collect()
    }
}

/// First `count` levels. For phases with parity the even and odd root lists
/// are merged in ascending order.
pub fn spectrum(case: SpectralCase, config: &SystemConfig, count: usize) -> Result<Spectrum> {
    let tol = config.root_tolerance;
    let mut tagged: Vec<(f64, Family, usize)> = Vec::new();
    let mut achieved: f64 = 0.0;
    let families: &[Family] = match case {
        SpectralCase::Generic { .. } => &[Family::All],
        _ => &[Family::Even, Family::Odd],
    };
    for &fam in families {
        let roots = family_roots(case, fam, count, tol)?;
        achieved = achieved.max(roots.achieved_tolerance);
        tagged.extend(
            roots
                .roots
                .iter()
                .enumerate()
                .map(|(i, &r)| (r, fam, i + 1)),
        );
    }
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    tagged.truncate(count);
    let scale = config.time_scale() / 4.0;
    let levels = tagged
        .into_iter()
        .enumerate()
        .map(|(i, (r, family, family_index))| Level {
            n: i + 1,
            family_index,
            family,
            root: r,
            tau_plus: scale / r,
            tau_minus: -scale / r,
            parity: match family {
                Family::All => Parity::None,
                Family::Even => Parity::Even,
                Family::Odd => Parity::Odd,
            },
        })
        .collect();
    Ok(Spectrum {
        case,
        levels,
        achieved_tolerance: achieved,
    })
}

/// `x^nu J_{-nu}(x)` and `x^nu J_rho(x)` for `(nu, rho)` in
/// `{(3/4, 1/4), (1/4, 3/4)}`, with the series branch near zero.
fn scaled_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    let rho = 1.0 - nu;
    if x < SMALL_X {
        // Gamma(1 - nu) and Gamma(1 + rho)
        let (g_neg, g_rho) = if nu == 0.75 {
            (GAMMA_QUARTER, GAMMA_QUARTER / 4.0)
        } else {
            (GAMMA_THREE_QUARTERS, 0.75 * GAMMA_THREE_QUARTERS)
        };
        let h = 0.5 * x;
        let a = 2f64.powf(nu) / g_neg * (1.0 - h * h / (1.0 - nu));
        let b = x.powf(nu) * h.powf(rho) / g_rho * (1.0 - h * h / (1.0 + rho));
        return Ok((a, b));
    }
    let xn = x.powf(nu);
    let (_, jneg) = bessel_j_pair(nu, x)?;
    let (jrho, _) = bessel_j_pair(rho, x)?;
    Ok((xn * jneg, xn * jrho))
}

/// Everything needed to evaluate one closed-form eigenfunction pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSpec {
    pub case: SpectralCase,
    pub level: Level,
    pub branch: Branch,
    pub length_l: f64,
    /// Weight of the `J_{3/4,1/4}` term.
    a: f64,
    /// Weight of the `J_{1/4,3/4}` term.
    b: f64,
    /// Additive constant of the periodic even family.
    constant: Complex64,
}

impl EigenfunctionSpec {
    pub fn new(
        case: SpectralCase,
        level: Level,
        branch: Branch,
        config: &SystemConfig,
    ) -> Result<Self> {
        let r = level.root;
        let q = Quarters::at(r)?;
        let s = branch.sign();
        let zero = Complex64::new(0.0, 0.0);
        let (a, b, constant) = match (case, level.family) {
            (SpectralCase::Generic { gamma }, _) => {
                let cot = gamma.cos() / gamma.sin();
                (q.jm14 - cot * q.j34, q.jm34 - cot * q.j14, zero)
            }
            // cot = 0; the vanishing weight is set exactly
            (SpectralCase::PiHalf, Family::Even) => (q.jm14, 0.0, zero),
            (SpectralCase::PiHalf | SpectralCase::Periodic, Family::Odd) => (0.0, q.jm34, zero),
            (SpectralCase::Periodic, Family::Even) => {
                let c = Complex64::from_polar(4.0 * q.j14 / (4.0 * r).powf(0.25), -s * r);
                (1.0, 0.0, c)
            }
            (_, fam) => {
                return Err(Error::InvalidArgument(format!(
                    "family {fam:?} does not exist for {case:?}"
                )))
            }
        };
        Ok(Self {
            case,
            level,
            branch,
            length_l: config.length_l,
            a,
            b,
            constant,
        })
    }

    pub fn tau(&self) -> f64 {
        match self.branch {
            Branch::Plus => self.level.tau_plus,
            Branch::Minus => self.level.tau_minus,
        }
    }

    /// Unnormalized value at `q`.
    pub fn eval(&self, q: f64) -> Result<Complex64> {
        let r = self.level.root;
        let l = self.length_l;
        let x = r * q * q / (l * l);
        let s = self.branch.sign();
        // J^{-+}: minus sign on the plus branch
        let helper = |(neg, pos): (f64, f64)| Complex64::new(neg, -s * pos);
        let mut acc = Complex64::new(0.0, 0.0);
        if self.a != 0.0 {
            acc += helper(scaled_pair(0.75, x)?) * self.a;
        }
        if self.b != 0.0 {
            acc += helper(scaled_pair(0.25, x)?) * (s * q * r.sqrt() / l * self.b);
        }
        Ok(Complex64::from_polar(1.0, -s * x) * acc + self.constant)
    }

    /// Unnormalized samples on the grid nodes.
    pub fn sample(&self, grid: &Arc<PositionGrid>) -> Result<StateVector> {
        let vals = par::map_slice(grid.nodes(), |&q| self.eval(q));
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        StateVector::position(grid.clone(), vals)
    }

    /// Normalized samples on the grid nodes.
    pub fn normalized(&self, grid: &Arc<PositionGrid>) -> Result<StateVector> {
        Ok(normalize_eigenfunction(&self.sample(grid)?)?.0)
    }
}

/// Convenience pointwise evaluation of level `n`; computes the spectrum.
pub fn eigenfunction(
    case: SpectralCase,
    n: usize,
    branch: Branch,
    q: f64,
    config: &SystemConfig,
) -> Result<Complex64> {
    let spec = spectrum(case, config, n)?;
    EigenfunctionSpec::new(case, *spec.level(n)?, branch, config)?.eval(q)
}

/// Unit-norm copy of `samples` and the normalization constant used.
pub fn normalize_eigenfunction(samples: &StateVector) -> Result<(StateVector, f64)> {
    let n = samples.norm();
    Ok((samples.normalize()?, 1.0 / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub parity: Parity,
    pub parity_defect: f64,
    pub nodal: Nodal,
    /// Smallest interior `|phi|^2 / max |phi|^2` found.
    pub min_ratio: f64,
    pub node: Option<f64>,
}

/// Parity (only at phases where it is defined) and nodal character.
///
/// Interior local minima of the sampled density are refined by golden-section
/// search on `density`; a minimum below [`NODE_THRESHOLD`] times the peak is
/// a node. More than one node is reported as ambiguous.
pub fn classify_with<F>(state: &StateVector, gamma: f64, density: F) -> Result<Classification>
where
    F: Fn(f64) -> f64,
{
    let grid = state.grid().ok_or(Error::RepresentationMismatch(
        "classification needs a sampled state",
    ))?;
    let (parity, parity_defect) = if has_parity(gamma) {
        let (p, d) = parity_of(state)?;
        if d > PARITY_TOLERANCE {
            return Err(Error::AmbiguousParity(d));
        }
        (p, d)
    } else {
        (Parity::None, 0.0)
    };

    let nodes = grid.nodes();
    let rho: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let scale = state.norm() * state.norm();
    let peak = rho.iter().cloned().fold(0.0, f64::max) / scale;
    let mut min_ratio = f64::INFINITY;
    let mut found = Vec::new();
    for i in 1..rho.len() - 1 {
        if rho[i] <= rho[i - 1] && rho[i] <= rho[i + 1] {
            let (q, v) = golden_min(|q| density(q) / scale, nodes[i - 1], nodes[i + 1]);
            let v = v.min(rho[i] / scale);
            let ratio = v / peak;
            min_ratio = min_ratio.min(ratio);
            // a node midway between two samples shows up as two tied minima
            let seen = found
                .last()
                .is_some_and(|&p: &f64| (q - p).abs() <= nodes[i + 1] - nodes[i - 1]);
            if ratio <= NODE_THRESHOLD && !seen {
                found.push(q);
            }
        }
    }
    let nodal = match found.len() {
        0 => Nodal::NonNodal,
        1 => Nodal::Nodal,
        k => return Err(Error::AmbiguousNodes(k)),
    };
    Ok(Classification {
        parity,
        parity_defect,
        nodal,
        min_ratio,
        node: found.first().copied(),
    })
}

/// Classifies a closed-form eigenfunction sampled on `grid`.
pub fn classify(spec: &EigenfunctionSpec, grid: &Arc<PositionGrid>) -> Result<Classification> {
    let samples = spec.sample(grid)?;
    let gamma = match spec.case {
        SpectralCase::Generic { gamma } => gamma,
        SpectralCase::PiHalf => FRAC_PI_2,
        SpectralCase::Periodic => 0.0,
    };
    classify_with(&samples, gamma, |q| {
        spec.eval(q).map(|v| v.norm_sqr()).unwrap_or(f64::INFINITY)
    })
}

/// Golden-section minimum of `f` on `[a, b]`: `(argmin, min)`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let tol = 1e-13 * (b - a).abs().max(1e-300);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `||A v - tau v|| / |tau|` for a sampled, normalized state and a Nystrom
/// matrix on the same grid, with `v = sqrt(w) phi`.
pub fn kernel_residual(
    matrix: &HermitianOperatorMatrix,
    state: &StateVector,
    tau: f64,
) -> Result<f64> {
    let grid = state.grid().ok_or(Error::RepresentationMismatch(
        "kernel residual needs a sampled state",
    ))?;
    if matrix.representation() != state.representation() {
        return Err(Error::RepresentationMismatch(
            "matrix and state live on different grids",
        ));
    }
    let v: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .zip(grid.weights())
        .map(|(a, w)| a * w.sqrt())
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let av = matrix.apply(&v);
    let r = av
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b * tau).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(r / (tau.abs() * norm))
}

/// Least-squares additive constant for the periodic even family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    /// Kernel residual of the closed form with its built-in constant.
    pub printed_residual: f64,
    /// Kernel residual with the least-squares constant.
    pub fitted_residual: f64,
    /// Fitted constant divided by the built-in one.
    pub ratio: Complex64,
}

/// Fits the additive constant `c` minimizing `||(A - tau)(f + c)||` where `f`
/// is the Bessel part of a periodic even eigenfunction.
pub fn fit_periodic_even_constant(
    spec: &EigenfunctionSpec,
    matrix: &HermitianOperatorMatrix,
    grid: &Arc<PositionGrid>,
) -> Result<ConstantFit> {
    if spec.case != SpectralCase::Periodic || spec.level.family != Family::Even {
        return Err(Error::InvalidArgument(
            "constant fit applies to the periodic even family".into(),
        ));
    }
    let tau = spec.tau();
    let bare = EigenfunctionSpec {
        constant: Complex64::new(0.0, 0.0),
        ..*spec
    };
    let f = bare.sample(grid)?;
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let fv: Vec<Complex64> = f.amplitudes().iter().zip(&sw).map(|(a, s)| a * s).collect();
    let one: Vec<Complex64> = sw.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let af = matrix.apply(&fv);
    let a1 = matrix.apply(&one);
    let ra: Vec<Complex64> = af.iter().zip(&fv).map(|(x, y)| x - y * tau).collect();
    let rb: Vec<Complex64> = a1.iter().zip(&one).map(|(x, y)| x - y * tau).collect();
    let num: Complex64 = rb.iter().zip(&ra).map(|(b, a)| b.conj() * a).sum();
    let den: f64 = rb.iter().map(|b| b.norm_sqr()).sum();
    let c = -num / den;

    let with = |c: Complex64| -> Result<f64> {
        let s =
            StateVector::position(grid.clone(), f.amplitudes().iter().map(|a| a + c).collect())?
                .normalize()?;
        kernel_residual(matrix, &s, tau)
    };
    Ok(ConstantFit {
        printed_residual: with(spec.constant)?,
        fitted_residual: with(c)?,
        ratio: c / spec.constant,
    })
}
