//! Free evolution in the energy representation and the arrival diagnostics.
//!
//! A coefficient state evolves as `c_n -> c_n exp(-i E_n t / hbar)`. Position
//! moments are computed in coefficient space from the autocorrelation
//! `R(j) = sum_m conj(c_m) c_{m+j}` (one zero-padded FFT pair) and the
//! closed-form matrix elements of `q` and `q^2` between plane waves.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::analytic::{EigenfunctionSpec, Level, SpectralCase};
use crate::basis::{to_momentum, MomentumIndexSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::grid::PositionGrid;
use crate::matrix::Branch;
use crate::operator::{position_element, position_squared_element};
use crate::par;
use crate::state::StateVector;

/// Norm tolerance for states handed to [`observables`].
pub const NORMALIZED_TOLERANCE: f64 = 1e-8;

/// Coarse samples used before refining a time extremum.
pub const COARSE_SAMPLES: usize = 256;

pub const MIN_TRACE_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub mean_q: f64,
    pub var_q: f64,
    pub mean_p: f64,
    pub density_at_origin: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshots {
    pub nodes: Vec<f64>,
    /// One row of `|psi(q_i, t)|^2` per recorded time.
    pub density: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub var_q: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub density_at_origin: Vec<f64>,
    /// Largest `|norm(t) - norm(0)|` over the trace.
    pub norm_drift: f64,
    pub snapshots: Option<Snapshots>,
}

/// Evaluates the autocorrelation moments of coefficient vectors of one length.
struct MomentPlan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    size: usize,
    /// `<q>` and `<q^2>` elements indexed by `j + (K - 1)`.
    q1: Vec<Complex64>,
    q2: Vec<f64>,
}

impl MomentPlan {
    fn new(len: usize, length_l: f64) -> Self {
        let size = (2 * len).next_power_of_two();
        let mut planner = FftPlanner::new();
        let span = len as i64 - 1;
        Self {
            fwd: planner.plan_fft_forward(size),
            inv: planner.plan_fft_inverse(size),
            size,
            q1: (-span..=span)
                .map(|j| position_element(j, length_l))
                .collect(),
            q2: (-span..=span)
                .map(|j| position_squared_element(j, length_l))
                .collect(),
        }
    }

    /// `(<q>, <q^2>)` for coefficient vector `c`.
    fn moments(&self, c: &[Complex64]) -> (f64, f64) {
        let k = c.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        buf[..k].copy_from_slice(c);
        self.fwd.process(&mut buf);
        for z in buf.iter_mut() {
            *z = Complex64::new(z.norm_sqr(), 0.0);
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        let span = k - 1;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (idx, (q1, q2)) in self.q1.iter().zip(&self.q2).enumerate() {
            let j = idx as i64 - span as i64;
            let r = buf[j.rem_euclid(self.size as i64) as usize] * scale;
            m1 += (q1 * r).re;
            m2 += q2 * r.re;
        }
        (m1, m2)
    }
}

/// A coefficient state ready for repeated evaluation at arbitrary times.
pub struct Propagator {
    basis: Arc<MomentumIndexSet>,
    coeffs: Vec<Complex64>,
    /// `E_n / hbar`
    rates: Vec<f64>,
    momenta: Vec<f64>,
    plan: MomentPlan,
}

impl Propagator {
    /// Takes a coefficient state as is, or expands a sampled one in `basis`.
    pub fn new(state: &StateVector, basis: &Arc<MomentumIndexSet>) -> Result<Self> {
        let coef = match state.basis() {
            Some(_) => state.clone(),
            None => to_momentum(state, basis)?.0,
        };
        let basis = coef.basis().expect("coefficient state").clone();
        let hbar = basis.hbar();
        Ok(Self {
            rates: basis.energies().iter().map(|e| e / hbar).collect(),
            momenta: basis.momenta(),
            plan: MomentPlan::new(basis.len(), basis.length_l()),
            coeffs: coef.into_amplitudes(),
            basis,
        })
    }

    pub fn basis(&self) -> &Arc<MomentumIndexSet> {
        &self.basis
    }

    fn coeffs_at(&self, t: f64) -> Vec<Complex64> {
        if t == 0.0 {
            return self.coeffs.clone();
        }
        self.coeffs
            .iter()
            .zip(&self.rates)
            .map(|(c, w)| c * Complex64::cis(-w * t))
            .collect()
    }

    pub fn state_at(&self, t: f64) -> StateVector {
        StateVector::momentum(self.basis.clone(), self.coeffs_at(t)).expect("matching length")
    }

    pub fn observables_at(&self, t: f64) -> Observables {
        let c = self.coeffs_at(t);
        moments_of(&c, &self.momenta, &self.plan, self.basis.length_l())
    }

    /// Observables on `steps + 1` uniform times in `[0, t_max]`, with optional
    /// density snapshots on `grid`.
    pub fn trace(
        &self,
        t_max: f64,
        steps: usize,
        snapshots: Option<&PositionGrid>,
    ) -> Result<EvolutionTrace> {
        if steps < MIN_TRACE_STEPS {
            return Err(Error::InsufficientPoints {
                min: MIN_TRACE_STEPS,
                got: steps,
            });
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        let times: Vec<f64> = (0..=steps)
            .map(|k| t_max * k as f64 / steps as f64)
            .collect();
        let obs = par::map_slice(&times, |&t| self.observables_at(t));
        let n0 = obs[0].norm;
        let norm_drift = obs.iter().map(|o| (o.norm - n0).abs()).fold(0.0, f64::max);
        let snapshots = snapshots.map(|g| self.snapshots(g, &times));
        Ok(EvolutionTrace {
            mean_q: obs.iter().map(|o| o.mean_q).collect(),
            var_q: obs.iter().map(|o| o.var_q).collect(),
            mean_p: obs.iter().map(|o| o.mean_p).collect(),
            density_at_origin: obs.iter().map(|o| o.density_at_origin).collect(),
            times,
            norm_drift,
            snapshots,
        })
    }

    fn snapshots(&self, grid: &PositionGrid, times: &[f64]) -> Snapshots {
        let synth = self.basis.synthesis_matrix(grid);
        let cols = faer::Mat::from_fn(self.coeffs.len(), times.len(), |k, j| {
            self.coeffs[k] * Complex64::cis(-self.rates[k] * times[j])
        });
        let psi = &synth * &cols;
        let density = (0..times.len())
            .map(|j| (0..grid.len()).map(|i| psi[(i, j)].norm_sqr()).collect())
            .collect();
        Snapshots {
            nodes: grid.nodes().to_vec(),
            density,
        }
    }

    /// Time of the interior minimum of `var_q` on `[0, t_max]`.
    pub fn collapse_time(&self, t_max: f64) -> Result<f64> {
        self.refine_extremum(t_max, |o| o.var_q).map(|(t, _)| t)
    }

    /// Time of the interior maximum of the density at the origin.
    pub fn density_peak_time(&self, t_max: f64) -> Result<f64> {
        self.refine_extremum(t_max, |o| -o.density_at_origin)
            .map(|(t, _)| t)
    }

    /// Coarse scan then golden-section refinement of the minimum of `key`.
    fn refine_extremum<F>(&self, t_max: f64, key: F) -> Result<(f64, f64)>
    where
        F: Fn(&Observables) -> f64 + Sync + Send,
    {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        let n = COARSE_SAMPLES;
        let dt = t_max / n as f64;
        let vals = par::map_range(n + 1, |k| key(&self.observables_at(k as f64 * dt)));
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        if hi - lo <= 1e-12 * lo.abs().max(hi.abs()) {
            return Err(Error::NoInteriorMinimum);
        }
        let best = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if best == 0 || best == n {
            return Err(Error::MinimumOnBoundary);
        }
        let (a, b) = ((best - 1) as f64 * dt, (best + 1) as f64 * dt);
        Ok(golden_min_to(
            |t| key(&self.observables_at(t)),
            a,
            b,
            1e-6 * t_max,
        ))
    }
}

/// Golden-section search stopped at an absolute bracket width.
fn golden_min_to<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    // the generic helper runs to near machine precision; narrow in steps
    let mut lo = a;
    let mut hi = b;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    let v = f(t);
    if v <= fc.min(fd) {
        (t, v)
    } else if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn moments_of(c: &[Complex64], momenta: &[f64], plan: &MomentPlan, length_l: f64) -> Observables {
    let norm2: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let (m1, m2) = plan.moments(c);
    let mean_p = c
        .iter()
        .zip(momenta)
        .map(|(x, p)| p * x.norm_sqr())
        .sum::<f64>()
        / norm2;
    let at0: Complex64 = c.iter().sum();
    let mean_q = m1 / norm2;
    Observables {
        mean_q,
        var_q: m2 / norm2 - mean_q * mean_q,
        mean_p,
        density_at_origin: at0.norm_sqr() / (2.0 * length_l),
        norm: norm2.sqrt(),
    }
}

/// Coefficient state evolved to time `t`. A sampled state is first expanded
/// in `basis`.
pub fn evolve(state: &StateVector, t: f64, basis: &Arc<MomentumIndexSet>) -> Result<StateVector> {
    Ok(Propagator::new(state, basis)?.state_at(t))
}

/// Moments of a normalized coefficient state.
pub fn observables(state: &StateVector) -> Result<Observables> {
    let basis = state.basis().ok_or(Error::RepresentationMismatch(
        "observables need a coefficient state",
    ))?;
    state.check_normalized(NORMALIZED_TOLERANCE)?;
    let plan = MomentPlan::new(basis.len(), basis.length_l());
    Ok(moments_of(
        state.amplitudes(),
        &basis.momenta(),
        &plan,
        basis.length_l(),
    ))
}

pub fn trace_evolution(
    state: &StateVector,
    basis: &Arc<MomentumIndexSet>,
    t_max: f64,
    steps: usize,
    snapshots: Option<&PositionGrid>,
) -> Result<EvolutionTrace> {
    state.check_normalized(NORMALIZED_TOLERANCE)?;
    Propagator::new(state, basis)?.trace(t_max, steps, snapshots)
}

pub fn collapse_time(
    state: &StateVector,
    basis: &Arc<MomentumIndexSet>,
    t_max: f64,
) -> Result<f64> {
    Propagator::new(state, basis)?.collapse_time(t_max)
}

pub fn density_peak_time(
    state: &StateVector,
    basis: &Arc<MomentumIndexSet>,
    t_max: f64,
) -> Result<f64> {
    Propagator::new(state, basis)?.density_peak_time(t_max)
}

/// First sign change of the centroid, linearly interpolated.
pub fn zero_crossing_time(trace: &EvolutionTrace) -> Result<f64> {
    let q = &trace.mean_q;
    let t = &trace.times;
    let scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // a parity state has an identically vanishing centroid up to rounding
    let floor = 1e-12 * trace.var_q.first().map(|v| v.sqrt()).unwrap_or(1.0);
    if scale <= floor {
        return Err(Error::NoCrossing);
    }
    for k in 0..q.len().saturating_sub(1) {
        let (a, b) = (q[k], q[k + 1]);
        if a == 0.0 && k == 0 {
            continue;
        }
        if b == 0.0 {
            return Ok(t[k + 1]);
        }
        if a * b < 0.0 {
            return Ok(t[k] + (t[k + 1] - t[k]) * a / (a - b));
        }
    }
    Err(Error::NoCrossing)
}

/// Free classical motion folded into the box by specular reflection.
pub fn classical_trajectory(q0: f64, p0: f64, t: f64, config: &SystemConfig) -> f64 {
    let l = config.length_l;
    let x = q0 + p0 * t / config.mass_mu;
    let y = (x + l).rem_euclid(4.0 * l);
    let y = if y > 2.0 * l { 4.0 * l - y } else { y };
    y - l
}

/// `max |<q(t)> - q_cl(t)| / l` over trace samples with `t <= tau`, the
/// classical path starting from `<q(0)>` and `<p(0)>`.
pub fn trajectory_deviation(trace: &EvolutionTrace, tau: f64, config: &SystemConfig) -> f64 {
    let q0 = trace.mean_q[0];
    let p0 = trace.mean_p[0];
    trace
        .times
        .iter()
        .zip(&trace.mean_q)
        .take_while(|(&t, _)| t <= tau * (1.0 + 1e-12))
        .map(|(&t, &q)| (q - classical_trajectory(q0, p0, t, config)).abs())
        .fold(0.0, f64::max)
        / config.length_l
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `v` in `sigma^2_min ~ n^{-v}`.
    pub exponent: f64,
    pub log_prefactor: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    pub points: Vec<(usize, f64)>,
}

pub const MIN_FIT_POINTS: usize = 8;

/// Least-squares slope of `log sigma^2_min` against `log n`.
pub fn variance_scaling_fit(points: &[(usize, f64)]) -> Result<ScalingFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            min: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    if points.iter().any(|&(n, v)| n == 0 || !(v > 0.0)) {
        return Err(Error::InvalidArgument(
            "fit needs positive n and variances".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(ScalingFit {
        exponent: -slope,
        log_prefactor: icpt,
        residual,
        points: points.to_vec(),
    })
}

/// Closed-form eigenstate expanded in the config's momentum basis. The
/// truncated expansion is renormalized, so the evolved state has unit norm.
pub fn eigenstate_coefficients(
    case: SpectralCase,
    level: Level,
    branch: Branch,
    config: &SystemConfig,
    grid: &Arc<PositionGrid>,
) -> Result<StateVector> {
    let spec = EigenfunctionSpec::new(case, level, branch, config)?;
    let basis = Arc::new(MomentumIndexSet::new(config));
    to_momentum(&spec.normalized(grid)?, &basis)?.0.normalize()
}

pub fn eigenstate_propagator(
    case: SpectralCase,
    level: Level,
    branch: Branch,
    config: &SystemConfig,
    grid: &Arc<PositionGrid>,
) -> Result<Propagator> {
    let coef = eigenstate_coefficients(case, level, branch, config, grid)?;
    let basis = coef.basis().expect("coefficient state").clone();
    Propagator::new(&coef, &basis)
}

/// `(n, sigma^2_min)` for the positive branch of each level in `levels`,
/// each minimized over `[0, 2 tau_n]`.
pub fn minimum_variances(
    case: SpectralCase,
    levels: &[Level],
    config: &SystemConfig,
    grid: &Arc<PositionGrid>,
) -> Result<Vec<(usize, f64)>> {
    let out = par::map_slice(levels, |lv| -> Result<(usize, f64)> {
        let prop = eigenstate_propagator(case, *lv, Branch::Plus, config, grid)?;
        let t = prop.collapse_time(2.0 * lv.tau_plus)?;
        Ok((lv.n, prop.observables_at(t).var_q))
    });
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalReport {
    /// Unique interior variance minimum.
    pub unique_minimum: bool,
    /// Centroid at the origin at the minimum.
    pub centroid_at_origin: bool,
    /// Centroid follows the classical path up to the minimum.
    pub classical: bool,
    /// Doubling the mass doubles the collapse time and nothing else changes.
    pub geometric: bool,
    pub tau: Option<f64>,
    pub centroid: Option<f64>,
    pub deviation: Option<f64>,
    pub mass_ratio: Option<f64>,
}

impl ArrivalReport {
    pub fn all(&self) -> bool {
        self.unique_minimum && self.centroid_at_origin && self.classical && self.geometric
    }
}

/// Checks a coefficient state against the ideal arrival criteria for arrival
/// at the origin, scanning `[0, t_max]`.
pub fn ideal_arrival_check(
    state: &StateVector,
    config: &SystemConfig,
    t_max: f64,
) -> Result<ArrivalReport> {
    let basis = state
        .basis()
        .ok_or(Error::RepresentationMismatch(
            "arrival check needs a coefficient state",
        ))?
        .clone();
    state.check_normalized(NORMALIZED_TOLERANCE)?;
    let prop = Propagator::new(state, &basis)?;
    let mut report = ArrivalReport {
        unique_minimum: false,
        centroid_at_origin: false,
        classical: false,
        geometric: false,
        tau: None,
        centroid: None,
        deviation: None,
        mass_ratio: None,
    };
    let tau = match prop.collapse_time(t_max) {
        Ok(t) => t,
        Err(Error::NoInteriorMinimum | Error::MinimumOnBoundary) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.tau = Some(tau);

    // uniqueness: every coarse sample away from tau lies strictly above the minimum
    let vmin = prop.observables_at(tau).var_q;
    let dt = t_max / COARSE_SAMPLES as f64;
    let others = par::map_range(COARSE_SAMPLES + 1, |k| {
        let t = k as f64 * dt;
        if (t - tau).abs() <= 2.0 * dt {
            f64::INFINITY
        } else {
            prop.observables_at(t).var_q
        }
    });
    report.unique_minimum = others.iter().all(|&v| v > vmin);

    let centroid = prop.observables_at(tau).mean_q;
    report.centroid = Some(centroid);
    report.centroid_at_origin = centroid.abs() <= 0.02 * config.length_l;

    let steps = ((tau / dt).ceil() as usize).max(MIN_TRACE_STEPS);
    let trace = prop.trace(tau, steps, None)?;
    let dev = trajectory_deviation(&trace, tau, config);
    report.deviation = Some(dev);
    report.classical = dev <= 0.05;

    let heavy = config.with_mass(2.0 * config.mass_mu)?;
    let heavy_basis = Arc::new(MomentumIndexSet::with_cutoff(&heavy, basis.cutoff()));
    let heavy_state = StateVector::momentum(heavy_basis.clone(), state.amplitudes().to_vec())?;
    let heavy_prop = Propagator::new(&heavy_state, &heavy_basis)?;
    if let Ok(t2) = heavy_prop.collapse_time(2.0 * t_max) {
        let ratio = t2 / tau;
        report.mass_ratio = Some(ratio);
        report.geometric = (ratio - 2.0).abs() <= 1e-5;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(g: f64) -> SystemConfig {
        SystemConfig::natural(g)
            .unwrap()
            .with_basis_cutoff(32)
            .unwrap()
    }

    fn single_mode(c: &SystemConfig, n: i64) -> StateVector {
        let basis = Arc::new(MomentumIndexSet::new(c));
        let mut a = vec![Complex64::new(0.0, 0.0); basis.len()];
        a[basis.position(n).unwrap()] = Complex64::new(1.0, 0.0);
        StateVector::momentum(basis, a).unwrap()
    }

    #[test]
    fn plane_wave_moments() {
        let c = nat(0.3);
        let o = observables(&single_mode(&c, 2)).unwrap();
        assert!(o.mean_q.abs() < 1e-15);
        assert!((o.var_q - 1.0 / 3.0).abs() < 1e-14);
        assert!((o.mean_p - (0.3 + 2.0 * std::f64::consts::PI)).abs() < 1e-13);
        assert!((o.density_at_origin - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_input_rejected() {
        let c = nat(0.3);
        let s = single_mode(&c, 2);
        let doubled = StateVector::momentum(
            s.basis().unwrap().clone(),
            s.amplitudes().iter().map(|a| a * 2.0).collect(),
        )
        .unwrap();
        assert!(matches!(
            observables(&doubled),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn stationary_state_has_no_collapse() {
        let c = nat(0.3);
        let s = single_mode(&c, 1);
        let b = s.basis().unwrap().clone();
        assert_eq!(
            collapse_time(&s, &b, 1.0).unwrap_err(),
            Error::NoInteriorMinimum
        );
        let tr = trace_evolution(&s, &b, 1.0, 32, None).unwrap();
        assert!(tr.var_q.iter().all(|v| (v - tr.var_q[0]).abs() < 1e-14));
        assert!(tr.mean_q.iter().all(|v| v.abs() < 1e-14));
        let r = ideal_arrival_check(&s, &c, 1.0).unwrap();
        assert!(!r.unique_minimum && !r.all());
    }

    #[test]
    fn classical_fold() {
        let c = nat(0.3);
        assert_eq!(classical_trajectory(0.25, 0.0, 7.0, &c), 0.25);
        assert!((classical_trajectory(0.5, 1.0, 0.6, &c) - 0.9).abs() < 1e-15);
        assert!((classical_trajectory(-0.5, 2.0, 0.25, &c)).abs() < 1e-15);
        assert!((classical_trajectory(0.5, 1.0, 4.0, &c) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(usize, f64)> = (1..=8)
            .map(|k| (2 * k, 3.0 * (2.0 * k as f64).powf(-1.5)))
            .collect();
        let f = variance_scaling_fit(&pts).unwrap();
        assert!((f.exponent - 1.5).abs() <= 1e-6);
        assert!(f.residual < 1e-12);
        assert!(matches!(
            variance_scaling_fit(&pts[..7]),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn crossing_needs_a_sign_change() {
        let tr = EvolutionTrace {
            times: vec![0.0, 1.0, 2.0],
            mean_q: vec![0.0; 3],
            var_q: vec![0.3; 3],
            mean_p: vec![0.0; 3],
            density_at_origin: vec![0.5; 3],
            norm_drift: 0.0,
            snapshots: None,
        };
        assert_eq!(zero_crossing_time(&tr).unwrap_err(), Error::NoCrossing);
        let tr = EvolutionTrace {
            mean_q: vec![-0.2, -0.1, 0.3],
            ..tr
        };
        assert!((zero_crossing_time(&tr).unwrap() - 1.25).abs() < 1e-15);
    }
}
