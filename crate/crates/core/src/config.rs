//! Physical parameters and numerical controls shared by every module.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BASIS_CUTOFF: usize = 512;
pub const DEFAULT_GRID_POINTS: usize = 1024;
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-12;
pub const MIN_BASIS_CUTOFF: usize = 8;
pub const MIN_GRID_POINTS: usize = 16;

/// Validated configuration. Construct through [`make_config`] or
/// [`SystemConfig::natural`]; the fields are public for reading only in
/// spirit, use the `with_*` methods to derive modified copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Half-width of the box `[-l, l]`.
    pub length_l: f64,
    pub mass_mu: f64,
    pub hbar: f64,
    /// Boundary phase: `phi(-l) = exp(-2 i gamma) phi(l)`, `|gamma| < pi`.
    pub gamma: f64,
    /// Momentum modes kept per side of the spectrum.
    pub basis_cutoff: usize,
    /// Gauss-Legendre nodes on `[-l, l]`.
    pub grid_points: usize,
    /// Absolute tolerance for root refinement.
    pub root_tolerance: f64,
}

impl SystemConfig {
    /// `hbar = l = mu = 1` with default numerical controls.
    pub fn natural(gamma: f64) -> Result<Self> {
        make_config(&RawConfig {
            gamma: Some(gamma),
            ..RawConfig::default()
        })
    }

    pub fn is_natural_units(&self) -> bool {
        self.length_l == 1.0 && self.mass_mu == 1.0 && self.hbar == 1.0
    }

    /// `mu l^2 / hbar`, the unit in which every eigenvalue is measured.
    pub fn time_scale(&self) -> f64 {
        self.mass_mu * self.length_l * self.length_l / self.hbar
    }

    fn revalidate(raw: RawConfig) -> Result<Self> {
        make_config(&raw)
    }

    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            length_l: Some(self.length_l),
            mass_mu: Some(self.mass_mu),
            hbar: Some(self.hbar),
            gamma: Some(self.gamma),
            basis_cutoff: Some(self.basis_cutoff),
            grid_points: Some(self.grid_points),
            root_tolerance: Some(self.root_tolerance),
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::revalidate(RawConfig {
            gamma: Some(gamma),
            ..self.to_raw()
        })
    }

    pub fn with_mass(&self, mass_mu: f64) -> Result<Self> {
        Self::revalidate(RawConfig {
            mass_mu: Some(mass_mu),
            ..self.to_raw()
        })
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::revalidate(RawConfig {
            hbar: Some(hbar),
            ..self.to_raw()
        })
    }

    pub fn with_length(&self, length_l: f64) -> Result<Self> {
        Self::revalidate(RawConfig {
            length_l: Some(length_l),
            ..self.to_raw()
        })
    }

    pub fn with_basis_cutoff(&self, basis_cutoff: usize) -> Result<Self> {
        Self::revalidate(RawConfig {
            basis_cutoff: Some(basis_cutoff),
            ..self.to_raw()
        })
    }

    pub fn with_grid_points(&self, grid_points: usize) -> Result<Self> {
        Self::revalidate(RawConfig {
            grid_points: Some(grid_points),
            ..self.to_raw()
        })
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            length_l: 1.0,
            mass_mu: 1.0,
            hbar: 1.0,
            gamma: FRAC_PI_2,
            basis_cutoff: DEFAULT_BASIS_CUTOFF,
            grid_points: DEFAULT_GRID_POINTS,
            root_tolerance: DEFAULT_ROOT_TOLERANCE,
        }
    }
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "length_l={} mass_mu={} hbar={} gamma={} basis_cutoff={} grid_points={} root_tolerance={}",
            self.length_l,
            self.mass_mu,
            self.hbar,
            self.gamma,
            self.basis_cutoff,
            self.grid_points,
            self.root_tolerance
        )
    }
}

/// Unvalidated parameters, as read from a file or the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RawConfig {
    pub length_l: Option<f64>,
    pub mass_mu: Option<f64>,
    pub hbar: Option<f64>,
    pub gamma: Option<f64>,
    pub basis_cutoff: Option<usize>,
    pub grid_points: Option<usize>,
    pub root_tolerance: Option<f64>,
}

impl RawConfig {
    /// Values set in `other` take precedence.
    pub fn overlay(self, other: &RawConfig) -> RawConfig {
        RawConfig {
            length_l: other.length_l.or(self.length_l),
            mass_mu: other.mass_mu.or(self.mass_mu),
            hbar: other.hbar.or(self.hbar),
            gamma: other.gamma.or(self.gamma),
            basis_cutoff: other.basis_cutoff.or(self.basis_cutoff),
            grid_points: other.grid_points.or(self.grid_points),
            root_tolerance: other.root_tolerance.or(self.root_tolerance),
        }
    }
}

/// Validates raw parameters and applies defaults for absent values.
///
/// Missing physical parameters default to natural units and the boundary
/// phase defaults to `pi/2`.
pub fn make_config(raw: &RawConfig) -> Result<SystemConfig> {
    let d = SystemConfig::default();
    let cfg = SystemConfig {
        length_l: raw.length_l.unwrap_or(d.length_l),
        mass_mu: raw.mass_mu.unwrap_or(d.mass_mu),
        hbar: raw.hbar.unwrap_or(d.hbar),
        gamma: raw.gamma.unwrap_or(d.gamma),
        basis_cutoff: raw.basis_cutoff.unwrap_or(d.basis_cutoff),
        grid_points: raw.grid_points.unwrap_or(d.grid_points),
        root_tolerance: raw.root_tolerance.unwrap_or(d.root_tolerance),
    };
    for (name, v) in [
        ("length_l", cfg.length_l),
        ("mass_mu", cfg.mass_mu),
        ("hbar", cfg.hbar),
        ("root_tolerance", cfg.root_tolerance),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("{name} must be positive, got {v}")));
        }
    }
    if !cfg.gamma.is_finite() || cfg.gamma.abs() >= PI {
        return Err(Error::Config(format!(
            "gamma must satisfy |gamma| < pi, got {}",
            cfg.gamma
        )));
    }
    if cfg.basis_cutoff < MIN_BASIS_CUTOFF {
        return Err(Error::Config(format!(
            "basis_cutoff must be >= {MIN_BASIS_CUTOFF}, got {}",
            cfg.basis_cutoff
        )));
    }
    if cfg.grid_points < MIN_GRID_POINTS {
        return Err(Error::Config(format!(
            "grid_points must be >= {MIN_GRID_POINTS}, got {}",
            cfg.grid_points
        )));
    }
    Ok(cfg)
}

/// Parses a boundary phase: a decimal literal, `0`, `pi/2` or `-pi/2`.
pub fn parse_gamma(token: &str) -> Result<f64> {
    match token.trim() {
        "pi/2" => Ok(FRAC_PI_2),
        "-pi/2" => Ok(-FRAC_PI_2),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot parse gamma {t:?}"))),
    }
}

/// Parses the flat `key = value` config format. Blank lines and lines
/// starting with `#` are ignored; unknown keys are errors.
pub fn parse_config_str(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::ConfigParse {
            line: line_no,
            message: format!("cannot parse {key} value {value:?} as {what}"),
        };
        let real = || value.parse::<f64>().map_err(|_| bad("a decimal"));
        let int = || value.parse::<usize>().map_err(|_| bad("an integer"));
        match key {
            "length_l" => raw.length_l = Some(real()?),
            "mass_mu" => raw.mass_mu = Some(real()?),
            "hbar" => raw.hbar = Some(real()?),
            "gamma" => raw.gamma = Some(parse_gamma(value).map_err(|_| bad("a boundary phase"))?),
            "basis_cutoff" => raw.basis_cutoff = Some(int()?),
            "grid_points" => raw.grid_points = Some(int()?),
            "root_tolerance" => raw.root_tolerance = Some(real()?),
            _ => {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("unknown key {key:?}"),
                })
            }
        }
    }
    Ok(raw)
}

pub fn read_config_file(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_parameters_are_valid() {
        let cfg = SystemConfig::natural(0.01).unwrap();
        assert!(cfg.is_natural_units());
        assert_eq!(cfg.basis_cutoff, 512);
        assert_eq!(cfg.grid_points, 1024);
        assert_eq!(cfg.root_tolerance, 1e-12);
    }

    #[test]
    fn boundary_phase_pi_is_rejected() {
        assert!(SystemConfig::natural(PI).is_err());
        assert!(SystemConfig::natural(-PI).is_err());
        assert!(SystemConfig::natural(PI - 1e-6).is_ok());
    }

    #[test]
    fn nonpositive_parameters_are_rejected() {
        for raw in [
            RawConfig {
                length_l: Some(-1.0),
                ..Default::default()
            },
            RawConfig {
                mass_mu: Some(0.0),
                ..Default::default()
            },
            RawConfig {
                hbar: Some(f64::NAN),
                ..Default::default()
            },
            RawConfig {
                basis_cutoff: Some(7),
                ..Default::default()
            },
            RawConfig {
                grid_points: Some(15),
                ..Default::default()
            },
        ] {
            assert!(make_config(&raw).is_err(), "{raw:?}");
        }
    }

    #[test]
    fn file_format_round_trip() {
        let text = "# box\nlength_l = 2\nmass_mu=3.5\nhbar=0.5\ngamma = pi/2\n\nbasis_cutoff=64\ngrid_points=128\nroot_tolerance=1e-10\n";
        let cfg = make_config(&parse_config_str(text).unwrap()).unwrap();
        assert_eq!(cfg.length_l, 2.0);
        assert_eq!(cfg.mass_mu, 3.5);
        assert_eq!(cfg.hbar, 0.5);
        assert_eq!(cfg.gamma, FRAC_PI_2);
        assert_eq!(cfg.basis_cutoff, 64);
        assert_eq!(cfg.grid_points, 128);
        assert_eq!(cfg.root_tolerance, 1e-10);
        assert_eq!(parse_config_str("gamma=0").unwrap().gamma, Some(0.0));
    }

    #[test]
    fn corrupted_file_reports_line() {
        let err = parse_config_str("hbar=1\nmass_mu=heavy\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 2, .. }));
        assert!(parse_config_str("speed=3").is_err());
        assert!(parse_config_str("no equals sign").is_err());
    }

    #[test]
    fn overlay_prefers_command_line() {
        let file = RawConfig {
            hbar: Some(2.0),
            gamma: Some(0.3),
            ..Default::default()
        };
        let flags = RawConfig {
            gamma: Some(0.01),
            ..Default::default()
        };
        let merged = file.overlay(&flags);
        assert_eq!(merged.hbar, Some(2.0));
        assert_eq!(merged.gamma, Some(0.01));
    }
}
