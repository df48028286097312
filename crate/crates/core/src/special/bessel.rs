//! Bessel functions of the first kind for quarter-integer orders.
//!
//! `J_nu` and `Y_nu` for `nu >= 0` come from Temme's series (x < 2) or
//! Steed's continued fractions (x >= 2), seeded by the continued fraction
//! for `J'_nu / J_nu`. Negative orders use the reflection
//! `J_{-nu} = cos(nu pi) J_nu - sin(nu pi) Y_nu`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Gamma(1/4)`
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_311_930_685;
/// `Gamma(3/4)`
pub const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_645_129_098;

pub const MAX_ARGUMENT: f64 = 500.0;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const XMIN: f64 = 2.0;

/// The five orders that occur in the spectral equations and eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselOrder {
    MinusThreeQuarters,
    MinusQuarter,
    Quarter,
    ThreeQuarters,
    FiveQuarters,
}

impl BesselOrder {
    pub const ALL: [BesselOrder; 5] = [
        BesselOrder::MinusThreeQuarters,
        BesselOrder::MinusQuarter,
        BesselOrder::Quarter,
        BesselOrder::ThreeQuarters,
        BesselOrder::FiveQuarters,
    ];

    pub fn value(self) -> f64 {
        match self {
            BesselOrder::MinusThreeQuarters => -0.75,
            BesselOrder::MinusQuarter => -0.25,
            BesselOrder::Quarter => 0.25,
            BesselOrder::ThreeQuarters => 0.75,
            BesselOrder::FiveQuarters => 1.25,
        }
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        BesselOrder::ALL
            .into_iter()
            .find(|o| o.value() == v)
            .ok_or(Error::UnsupportedOrder(v))
    }
}

/// `J_nu(x)` for `0 < x <= 500`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= MAX_ARGUMENT) {
        return Err(Error::BesselDomain(x));
    }
    let nu = order.value();
    let (j, y) = bessel_jy(nu.abs(), x)?;
    Ok(if nu >= 0.0 {
        j
    } else {
        reflect(nu.abs(), j, y)
    })
}

/// `(J_nu(x), J_{-nu}(x))` for `nu` in `{1/4, 3/4}` from a single evaluation.
pub fn bessel_j_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    if nu != 0.25 && nu != 0.75 {
        return Err(Error::UnsupportedOrder(nu));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::BesselDomain(x));
    }
    let (j, y) = bessel_jy(nu, x)?;
    Ok((j, reflect(nu, j, y)))
}

fn reflect(nu: f64, j: f64, y: f64) -> f64 {
    // cos and sin of nu*pi for nu in {1/4, 3/4}
    let (c, s) = if nu == 0.25 {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else if nu == 0.75 {
        (-FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else {
        ((nu * PI).cos(), (nu * PI).sin())
    };
    c * j - s * y
}

/// `(1/Gamma(1 + mu), 1/Gamma(1 - mu))` for `mu = +-1/4`.
fn recip_gammas(mu: f64) -> (f64, f64) {
    // Gamma(5/4) = Gamma(1/4) / 4
    let g54 = GAMMA_QUARTER / 4.0;
    let g34 = GAMMA_THREE_QUARTERS;
    if mu > 0.0 {
        (1.0 / g54, 1.0 / g34)
    } else {
        (1.0 / g34, 1.0 / g54)
    }
}

/// `(J_nu(x), Y_nu(x))` for `nu` in `{1/4, 3/4, 5/4}` and `x > 0`.
fn bessel_jy(xnu: f64, x: f64) -> Result<(f64, f64)> {
    let nl = if x < XMIN {
        (xnu + 0.5) as usize
    } else {
        (xnu - x + 1.5).max(0.0) as usize
    };
    let xmu = xnu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // continued fraction for J'_nu / J_nu
    let mut isign = 1.0;
    let mut h = (xnu * xi).max(FPMIN);
    let mut b = xi2 * xnu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::BesselConvergence(x));
    }

    // downward recurrence to order xmu
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = xnu * xi;
    for _ in (1..=nl).rev() {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, rymu, ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gampl, gammi) = recip_gammas(xmu);
        let gam1 = (gammi - gampl) / (2.0 * xmu);
        let gam2 = (gammi + gampl) / 2.0;
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::BesselConvergence(x));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // Steed's CF2 for p + i q
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::BesselConvergence(x));
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let rj = rjl1 * scale;
    let (mut ymu, mut y1) = (rymu, ry1);
    for i in 1..=nl {
        let ytemp = (xmu + i as f64) * xi2 * y1 - ymu;
        ymu = y1;
        y1 = ytemp;
    }
    Ok((rj, ymu))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 40-digit arithmetic.
    const TABLE: &[(f64, f64, f64)] = &[
        (-0.75, 1e-4, 463.86479965085238375),
        (-0.75, 0.01, 14.667226224791341716),
        (-0.75, 0.5, 0.58992422509026669841),
        (-0.75, 1.0, 0.044701115814504631055),
        (-0.75, 1.9, -0.42118910236010171829),
        (-0.75, 2.0, -0.44672065795573945332),
        (-0.75, 2.1, -0.46726281578949012488),
        (-0.75, 5.0, 0.23356120863327478465),
        (-0.75, 10.0, -0.13992324072188758988),
        (-0.75, 20.0, 0.0035419186089718080675),
        (-0.75, 31.4, 0.1321492883999790474),
        (-0.75, 75.0, 0.092132506912887148977),
        (-0.75, 200.0, 0.044276757326980539577),
        (-0.75, 500.0, -0.022741200749025132233),
        (-0.25, 1e-4, 9.704512013312391986),
        (-0.25, 0.01, 3.068733870674654747),
        (-0.25, 0.5, 1.0595995935275231736),
        (-0.25, 1.0, 0.66938481726157445152),
        (-0.25, 1.9, 0.061975196719928789241),
        (-0.25, 2.0, 0.0035869156241729160775),
        (-0.25, 2.1, -0.051986278437865239519),
        (-0.25, 5.0, -0.043874518227060089611),
        (-0.25, 10.0, -0.24842374255618820314),
        (-0.25, 20.0, 0.13015401042690348416),
        (-0.25, 31.4, 0.1304898279879936092),
        (-0.25, 75.0, 0.064703633296350301325),
        (-0.25, 200.0, 0.0065130373640730912449),
        (-0.25, 500.0, -0.035525343140083577201),
        (0.25, 1e-4, 0.092772960672354162788),
        (0.25, 0.01, 0.29336799414397816048),
        (0.25, 0.5, 0.74165657015714606282),
        (0.25, 1.0, 0.75223133334079005698),
        (0.25, 1.9, 0.44666726760962873229),
        (0.25, 2.0, 0.39781106433817834873),
        (0.25, 2.1, 0.34752117091612695809),
        (0.25, 5.0, -0.28097206576137600541),
        (0.25, 10.0, -0.20639378685517280976),
        (0.25, 20.0, 0.1782983385342748964),
        (0.25, 31.4, 0.051990003764193437432),
        (0.25, 75.0, -0.00062413579667246593954),
        (0.25, 200.0, -0.035022050734633629007),
        (0.25, 500.0, -0.027485487137731849351),
        (0.75, 1e-4, 0.00064696746878647845454),
        (0.75, 0.01, 0.020458615494436246276),
        (0.75, 0.5, 0.37110551987842919929),
        (0.75, 1.0, 0.55865249320489174775),
        (0.75, 1.9, 0.58886926109407314628),
        (0.75, 2.0, 0.56982182917425685038),
        (0.75, 2.1, 0.54693005410318770355),
        (0.75, 5.0, -0.35690030910827407051),
        (0.75, 10.0, -0.049689289747515081354),
        (0.75, 20.0, 0.12365181399671954),
        (0.75, 31.4, -0.05593172973544512042),
        (0.75, 75.0, -0.065371723002148766399),
        (0.75, 200.0, -0.056033686617371437842),
        (0.75, 500.0, -0.0033627694378237550238),
        (1.25, 1e-4, 3.7109184301927606728e-6),
        (1.25, 0.01, 0.0011734824075663081348),
        (1.25, 0.5, 0.15173234506687936441),
        (1.25, 1.0, 0.33141455085589039743),
        (1.25, 1.9, 0.53873312015210927942),
        (1.25, 2.0, 0.5461734240402840405),
        (1.25, 2.1, 0.55000595172190130538),
        (1.25, 5.0, -0.26165841520941238519),
        (1.25, 10.0, 0.12960355137912894939),
        (1.25, 20.0, 0.0009155398543850643426),
        (1.25, 31.4, -0.1313214220980014449),
        (1.25, 75.0, -0.092136667818198298749),
        (1.25, 200.0, -0.04436431245381712365),
        (1.25, 500.0, 0.022713715261887400383),
    ];

    #[test]
    fn matches_high_precision_table() {
        for &(nu, x, exact) in TABLE {
            let v = bessel_j(BesselOrder::try_from(nu).unwrap(), x).unwrap();
            let err = (v - exact).abs();
            assert!(
                err <= 1e-10 * exact.abs() || err <= 1e-12,
                "J_{nu}({x}) = {v}, expected {exact}, err {err:e}"
            );
        }
    }

    #[test]
    fn domain_and_order_errors() {
        assert!(bessel_j(BesselOrder::Quarter, 0.0).is_err());
        assert!(bessel_j(BesselOrder::Quarter, -1.0).is_err());
        assert!(bessel_j(BesselOrder::Quarter, 500.5).is_err());
        assert!(BesselOrder::try_from(0.5).is_err());
        assert!(bessel_j_pair(0.5, 1.0).is_err());
    }

    #[test]
    fn pair_agrees_with_single_orders() {
        for x in [0.3, 2.0, 17.0] {
            let (j, jm) = bessel_j_pair(0.75, x).unwrap();
            assert_eq!(j, bessel_j(BesselOrder::ThreeQuarters, x).unwrap());
            assert_eq!(jm, bessel_j(BesselOrder::MinusThreeQuarters, x).unwrap());
        }
    }
}
