mod args;
mod output;

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use ctoa_core::analytic::{
    classify, family_roots, spectrum, EigenfunctionSpec, Family, Level, SpectralCase, Spectrum,
};
use ctoa_core::config::{make_config, read_config_file, RawConfig, SystemConfig};
use ctoa_core::dynamics::{eigenstate_propagator, EvolutionTrace};
use ctoa_core::error::Error;
use ctoa_core::grid::{build_grid, PositionGrid};
use ctoa_core::matrix::{has_parity, Branch};
use ctoa_core::verification::{run_all, Status, Suite, FIGURE_GAMMA};

use args::{BranchArg, Cli, Command, FigureId, RootCase, SuiteArg, SystemArgs};
use output::{emit, num, write_atomic, Csv};

/// Nodes across the box in figure snapshots.
const FIGURE_NODES: usize = 256;
/// Time steps per figure series.
const FIGURE_STEPS: usize = 800;

enum Failure {
    /// Bad flags or input files: exit 2.
    Usage(String),
    /// Anything that went wrong after validation: exit 1.
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(format!("write failed: {e}"))
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let sys = &cli.system;
    match cli.command {
        Command::Roots(a) => {
            let c = config(sys, Some(a.gamma), None)?;
            cmd_roots(&c, a.count as usize, a.case, a.out.as_deref())
        }
        Command::Spectrum(a) => {
            let c = config(sys, Some(a.gamma), None)?;
            cmd_spectrum(&c, a.count as usize, a.out.as_deref())
        }
        Command::Eigenfunction(a) => {
            let c = config(sys, Some(a.gamma), a.grid)?;
            cmd_eigenfunction(&c, a.n as usize, branch(a.branch), a.out.as_deref())
        }
        Command::Evolve(a) => {
            let c = config(sys, Some(a.gamma), None)?;
            if let Some(t) = a.t_max {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Failure::Usage(format!("--t-max must be positive, got {t}")));
                }
            }
            if a.steps < ctoa_core::dynamics::MIN_TRACE_STEPS {
                return Err(Failure::Usage(format!(
                    "--steps must be at least {}",
                    ctoa_core::dynamics::MIN_TRACE_STEPS
                )));
            }
            cmd_evolve(&c, &a, a.out.as_deref())
        }
        Command::Figure(a) => {
            let c = config(sys, Some(FIGURE_GAMMA), None)?;
            if !a.out_dir.is_dir() {
                return Err(Failure::Usage(format!(
                    "{} is not a directory",
                    a.out_dir.display()
                )));
            }
            cmd_figure(&c, a.id, &a.out_dir)
        }
        Command::Verify(a) => {
            let c = config(sys, None, None)?;
            cmd_verify(&c, a.suite, a.timestamp, a.out.as_deref())
        }
    }
}

fn config(
    sys: &SystemArgs,
    gamma: Option<f64>,
    grid: Option<usize>,
) -> Result<SystemConfig, Failure> {
    let file = match &sys.config {
        Some(p) => read_config_file(p).map_err(|e| Failure::Usage(e.to_string()))?,
        None => RawConfig::default(),
    };
    let flags = RawConfig {
        length_l: sys.length,
        mass_mu: sys.mass,
        hbar: sys.hbar,
        gamma,
        basis_cutoff: sys.basis_cutoff,
        grid_points: grid.or(sys.grid_points),
        root_tolerance: None,
    };
    make_config(&file.overlay(&flags)).map_err(|e| Failure::Usage(e.to_string()))
}

fn branch(b: BranchArg) -> Branch {
    match b {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
    }
}

fn cmd_roots(c: &SystemConfig, count: usize, case: RootCase, out: Option<&Path>) -> Outcome {
    let sc = SpectralCase::from_gamma(c.gamma);
    let family = match case {
        RootCase::Merged => None,
        RootCase::Even => Some(Family::Even),
        RootCase::Odd => Some(Family::Odd),
    };
    if family.is_some() && !has_parity(c.gamma) {
        return Err(Failure::Usage(
            "--case even|odd needs gamma = 0 or pi/2".into(),
        ));
    }
    let rows: Vec<(usize, f64)> = match family {
        None => spectrum(sc, c, count)?
            .levels
            .iter()
            .map(|l| (l.n, l.root))
            .collect(),
        Some(f) => family_roots(sc, f, count, c.root_tolerance)?
            .roots
            .iter()
            .enumerate()
            .map(|(i, &r)| (i + 1, r))
            .collect(),
    };
    let case_name = match case {
        RootCase::Merged => "merged",
        RootCase::Even => "even",
        RootCase::Odd => "odd",
    };
    let mut csv = Csv::new(
        "roots",
        c,
        &[("case", case_name.into())],
        &["n", "r", "tau_plus"],
    );
    let scale = c.time_scale() / 4.0;
    for (n, r) in rows {
        csv.row([n.to_string(), num(r), num(scale / r)]);
    }
    emit(&csv.into_string(), out)?;
    Ok(ExitCode::SUCCESS)
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::All => "all",
        Family::Even => "even",
        Family::Odd => "odd",
    }
}

fn cmd_spectrum(c: &SystemConfig, count: usize, out: Option<&Path>) -> Outcome {
    let s = spectrum(SpectralCase::from_gamma(c.gamma), c, count)?;
    let mut csv = Csv::new(
        "spectrum",
        c,
        &[("achieved_tolerance", num(s.achieved_tolerance))],
        &[
            "n",
            "family",
            "family_index",
            "r",
            "tau_plus",
            "tau_minus",
            "parity",
        ],
    );
    for l in &s.levels {
        csv.row([
            l.n.to_string(),
            family_name(l.family).to_string(),
            l.family_index.to_string(),
            num(l.root),
            num(l.tau_plus),
            num(l.tau_minus),
            format!("{:?}", l.parity).to_lowercase(),
        ]);
    }
    emit(&csv.into_string(), out)?;
    Ok(ExitCode::SUCCESS)
}

fn level(c: &SystemConfig, n: usize) -> Result<(Spectrum, Level), Failure> {
    let s = spectrum(SpectralCase::from_gamma(c.gamma), c, n)?;
    let lv = *s.level(n)?;
    Ok((s, lv))
}

fn cmd_eigenfunction(c: &SystemConfig, n: usize, b: Branch, out: Option<&Path>) -> Outcome {
    let (s, lv) = level(c, n)?;
    let grid = Arc::new(build_grid(c.grid_points, c.length_l)?);
    let spec = EigenfunctionSpec::new(s.case, lv, b, c)?;
    let state = spec.normalized(&grid)?;
    let cl = classify(&spec, &grid)?;
    let node = cl.node.map(num).unwrap_or_else(|| "none".into());
    let mut csv = Csv::new(
        "eigenfunction",
        c,
        &[
            ("n", n.to_string()),
            ("branch", branch_name(b).into()),
            ("tau", num(spec.tau())),
            ("parity", format!("{:?}", cl.parity).to_lowercase()),
            ("nodal", format!("{:?}", cl.nodal).to_lowercase()),
            ("node", node),
        ],
        &["q", "re", "im", "abs2"],
    );
    for (q, v) in grid.nodes().iter().zip(state.amplitudes()) {
        csv.row([num(*q), num(v.re), num(v.im), num(v.norm_sqr())]);
    }
    emit(&csv.into_string(), out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_evolve(c: &SystemConfig, a: &args::EvolveArgs, out: Option<&Path>) -> Outcome {
    let n = a.n as usize;
    let b = branch(a.branch);
    let (s, lv) = level(c, n)?;
    let grid = Arc::new(build_grid(c.grid_points, c.length_l)?);
    let prop = eigenstate_propagator(s.case, lv, b, c, &grid)?;
    let tau = lv.tau_plus;
    let t_max = a.t_max.unwrap_or(2.0 * tau);
    let snap_grid = match a.snapshots {
        Some(_) => Some(build_grid(FIGURE_NODES, c.length_l)?),
        None => None,
    };
    let trace = prop.trace(t_max, a.steps, snap_grid.as_ref())?;
    let collapse = prop.collapse_time(t_max)?;
    let extra = [
        ("n", n.to_string()),
        ("branch", branch_name(b).into()),
        ("tau", num(tau)),
        ("collapse_time", num(collapse)),
        ("norm_drift", num(trace.norm_drift)),
    ];
    let mut csv = Csv::new("evolve", c, &extra, &["t", "mean_q", "var_q", "density0"]);
    for k in 0..trace.times.len() {
        csv.row([
            num(trace.times[k]),
            num(trace.mean_q[k]),
            num(trace.var_q[k]),
            num(trace.density_at_origin[k]),
        ]);
    }
    if let Some(path) = &a.snapshots {
        write_atomic(path, &density_csv("evolve", c, &extra, &trace))?;
    }
    emit(&csv.into_string(), out)?;
    Ok(ExitCode::SUCCESS)
}

/// One row per time, one column per grid node.
fn density_csv(
    command: &str,
    c: &SystemConfig,
    extra: &[(&str, String)],
    trace: &EvolutionTrace,
) -> String {
    let snaps = trace.snapshots.as_ref().expect("trace recorded snapshots");
    let q: Vec<String> = snaps.nodes.iter().map(|&x| num(x)).collect();
    let mut cols = vec!["t"];
    cols.extend(q.iter().map(String::as_str));
    let mut csv = Csv::new(command, c, extra, &cols);
    for (t, row) in trace.times.iter().zip(&snaps.density) {
        csv.row(std::iter::once(num(*t)).chain(row.iter().map(|&d| num(d))));
    }
    csv.into_string()
}

fn cmd_figure(c: &SystemConfig, id: FigureId, dir: &Path) -> Outcome {
    let s = spectrum(SpectralCase::from_gamma(c.gamma), c, 21)?;
    let grid = Arc::new(build_grid(c.grid_points, c.length_l)?);
    let trace_of = |n: usize, snaps: Option<&PositionGrid>| -> Result<EvolutionTrace, Failure> {
        let lv = *s.level(n)?;
        let prop = eigenstate_propagator(s.case, lv, Branch::Plus, c, &grid)?;
        Ok(prop.trace(2.0 * lv.tau_plus, FIGURE_STEPS, snaps)?)
    };
    match id {
        FigureId::Fig1a | FigureId::Fig1b => {
            let (n, name) = if id == FigureId::Fig1a {
                (20, "figure_1a.csv")
            } else {
                (21, "figure_1b.csv")
            };
            let g = build_grid(FIGURE_NODES, c.length_l)?;
            let trace = trace_of(n, Some(&g))?;
            let extra = [("n", n.to_string()), ("tau", num(s.level(n)?.tau_plus))];
            write_atomic(&dir.join(name), &density_csv("figure", c, &extra, &trace))?;
        }
        FigureId::Fig2a | FigureId::Fig2b => {
            let (col, name) = if id == FigureId::Fig2a {
                ("mean_q", "figure_2a.csv")
            } else {
                ("var_q", "figure_2b.csv")
            };
            let mut csv = Csv::new(
                "figure",
                c,
                &[("levels", "2;6;20".into())],
                &["n", "t", col],
            );
            for n in [2usize, 6, 20] {
                let trace = trace_of(n, None)?;
                let ys = if id == FigureId::Fig2a {
                    &trace.mean_q
                } else {
                    &trace.var_q
                };
                for (t, y) in trace.times.iter().zip(ys) {
                    csv.row([n.to_string(), num(*t), num(*y)]);
                }
            }
            write_atomic(&dir.join(name), &csv.into_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(c: &SystemConfig, suite: SuiteArg, timestamp: bool, out: Option<&Path>) -> Outcome {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Spectral => Suite::Spectral,
        SuiteArg::Dynamics => Suite::Dynamics,
        SuiteArg::Commutator => Suite::Commutator,
    };
    let mut report = run_all(c, suite);
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report.timestamp = Some(format!("unix:{secs}"));
    }
    emit(&report.to_json(), out)?;
    let failed: Vec<_> = report.failures().collect();
    for e in &failed {
        let metric = e.metric.map(num).unwrap_or_else(|| "none".into());
        eprintln!(
            "FAIL {} metric={metric}{}",
            e.name,
            e.note
                .as_ref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default()
        );
    }
    let checked = report
        .entries
        .iter()
        .filter(|e| e.status != Status::ReportOnly)
        .count();
    eprintln!("{} of {checked} checks passed", checked - failed.len());
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
