//! Scan-and-bisect root finding on `(0, x_max]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Root spacing of every characteristic equation is asymptotically at least
/// `pi / 2`, so this step never puts two roots in one bracket.
pub const SCAN_STEP: f64 = PI / 16.0;

/// First scan point. The regularized equations are finite at 0 but a few
/// Bessel factors are not, so the scan stays strictly positive.
pub const SCAN_START: f64 = 1e-8;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EquationTag {
    Generic { gamma: f64 },
    Pi2Even,
    Pi2Odd,
    PeriodicEven,
    PeriodicOdd,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootList {
    pub roots: Vec<f64>,
    pub equation: EquationTag,
    /// Largest final bracket half-width over all roots.
    pub achieved_tolerance: f64,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// First `count` positive roots of `f` below `x_max`, each bisected to an
/// absolute bracket width of `tol`.
pub fn find_roots<F>(
    f: F,
    x_max: f64,
    count: usize,
    tol: f64,
    equation: EquationTag,
) -> Result<RootList>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    find_roots_with_step(f, x_max, count, tol, equation, SCAN_STEP)
}

pub fn find_roots_with_step<F>(
    f: F,
    x_max: f64,
    count: usize,
    tol: f64,
    equation: EquationTag,
    step: f64,
) -> Result<RootList>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if count == 0 {
        return Err(Error::InvalidArgument(
            "root count must be at least 1".into(),
        ));
    }
    if !(tol > 0.0 && step > 0.0 && x_max > SCAN_START) {
        return Err(Error::InvalidArgument(format!(
            "bad root search parameters: x_max={x_max}, tol={tol}, step={step}"
        )));
    }
    let samples = ((x_max - SCAN_START) / step).ceil() as usize + 1;
    let xs: Vec<f64> = (0..samples)
        .map(|k| (SCAN_START + k as f64 * step).min(x_max))
        .collect();
    let fs = par::map_slice(&xs, |&x| f(x));

    let mut brackets = Vec::new();
    let mut k = 0;
    while k + 1 < samples && brackets.len() < count {
        let (a, b) = (fs[k], fs[k + 1]);
        if a == 0.0 {
            brackets.push((xs[k], xs[k], a));
        } else if a * b < 0.0 {
            brackets.push((xs[k], xs[k + 1], a));
        } else if b == 0.0 {
            brackets.push((xs[k + 1], xs[k + 1], b));
            // do not count the same exact zero twice
            k += 1;
        }
        k += 1;
    }
    if brackets.len() < count {
        return Err(Error::RootsNotFound {
            found: brackets.len(),
            requested: count,
            x_max,
        });
    }

    let refined = par::map_slice(&brackets, |&(a, b, fa)| bisect(&f, a, b, fa, tol));
    let achieved_tolerance = refined.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut roots: Vec<f64> = refined.into_iter().map(|r| r.0).collect();
    roots.sort_by(f64::total_cmp);
    Ok(RootList {
        roots,
        equation,
        achieved_tolerance,
    })
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> (f64, f64) {
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return (m, 0.0);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    (0.5 * (a + b), 0.5 * (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_zeros() {
        let r = find_roots(f64::sin, 10.0, 3, 1e-12, EquationTag::Custom).unwrap();
        for (k, x) in r.roots.iter().enumerate() {
            assert!((x - (k + 1) as f64 * PI).abs() <= 1e-12, "{x}");
        }
        assert!(r.achieved_tolerance <= 1e-12);
    }

    #[test]
    fn reports_how_many_were_found() {
        let err = find_roots(f64::sin, 10.0, 4, 1e-12, EquationTag::Custom).unwrap_err();
        assert_eq!(
            err,
            Error::RootsNotFound {
                found: 3,
                requested: 4,
                x_max: 10.0
            }
        );
    }

    #[test]
    fn rejects_zero_count() {
        assert!(find_roots(f64::sin, 10.0, 0, 1e-12, EquationTag::Custom).is_err());
    }

    #[test]
    fn exact_zero_on_scan_point_counted_once() {
        let f = |x: f64| x - (SCAN_START + 3.0 * SCAN_STEP);
        let r = find_roots(f, 2.0, 1, 1e-12, EquationTag::Custom).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.roots[0] - (SCAN_START + 3.0 * SCAN_STEP)).abs() < 1e-12);
    }
}
