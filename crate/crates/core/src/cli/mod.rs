//! Batch front end: configuration ingestion, subcommand dispatch, artifact
//! emission, and the exit-code contract (64 config error, 65 run rejection,
//! 66 threshold failure).
//!
//! Every artifact starts with a header carrying an artifact version, the
//! sha256 of the merged configuration, and the scenario id; files are
//! written to a temporary name and renamed so failures leave no partial
//! output. All floats are printed in full precision for regression diffs.

mod config;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::classical::{
    funnel_potential, funnel_radial_derivative, integrate_flat, takens_funnel, FunnelSpec,
};
use crate::error::{Error, Result};
use crate::scenarios::{
    alpha_marginal_study, build_scenario, convergence_study, list_scenarios, residual_sweep,
    Geometry, Scenario,
};
use crate::transverse::{fd_eigensolve_1d_auto, fd_eigensolve_2d, RellichModel};

pub use config::{load as load_config, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 64;
pub const EXIT_RUN: i32 = 65;
pub const EXIT_THRESHOLD: i32 = 66;

const ARTIFACT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "tubelab", about = "Confined quantum dynamics laboratory", version)]
struct Cli {
    /// Configuration file (TOML); defaults apply when absent
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for artifacts
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Dotted-path configuration override, e.g. compare.threshold=0.6
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for per-hbar sweeps
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transverse band energies over a base-point sweep: closed form vs grid
    Spectrum,
    /// Classical trajectory in the effective band potential
    Classical,
    /// Semiclassical-vs-reference convergence study over an hbar sweep
    Compare,
    /// Local-equation defect of the evolved approximant per hbar
    Residual,
    /// Homogenized-limit trajectory fan from a conical vertex
    Takens,
    /// Constraint checks: zero set, gradient, Hessian, spectral smoothness
    Validate,
    /// List the scenario catalogue with knobs and defaults
    Scenarios,
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { EXIT_OK } else { EXIT_CONFIG };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(Stage::Config(e)) => {
            eprintln!("tubelab: {e}");
            EXIT_CONFIG
        }
        Err(Stage::Run(e)) => {
            eprintln!("tubelab: {e}");
            EXIT_RUN
        }
    }
}

/// Where an error happened decides the exit code.
enum Stage {
    Config(Error),
    Run(Error),
}

fn cfg<T>(r: Result<T>) -> std::result::Result<T, Stage> {
    r.map_err(Stage::Config)
}

fn rej<T>(r: Result<T>) -> std::result::Result<T, Stage> {
    r.map_err(Stage::Run)
}

struct Ctx {
    config: RunConfig,
    config_hash: String,
    out: PathBuf,
    threads: usize,
}

impl Ctx {
    fn scenario(&self) -> Result<Scenario> {
        let overrides: Vec<(&str, f64)> =
            self.config.overrides.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        build_scenario(&self.config.scenario, &overrides)
    }

    fn header(&self) -> String {
        format!(
            "# artifact-version: {ARTIFACT_VERSION}\n# config-sha256: {}\n# scenario: {}\n",
            self.config_hash, self.config.scenario
        )
    }

    fn json_artifact(&self, payload: serde_json::Value) -> serde_json::Value {
        json!({
            "artifact_version": ARTIFACT_VERSION,
            "config_sha256": self.config_hash,
            "scenario": self.config.scenario,
            "payload": payload,
        })
    }

    fn write(&self, name: &str, content: &str) -> Result<()> {
        write_atomic(&self.out.join(name), content)
    }
}

/// Write to `<path>.tmp`, then rename into place.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(e) => format!("{}.tmp", e.to_string_lossy()),
        None => "tmp".into(),
    });
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn dispatch(cli: &Cli) -> std::result::Result<i32, Stage> {
    if matches!(cli.command, Command::Scenarios) {
        return Ok(cmd_scenarios());
    }
    let config = cfg(config::load(cli.config.as_deref(), &cli.set))?;
    let config_hash = config::hash(&config);
    cfg(std::fs::create_dir_all(&cli.out).map_err(Error::from))?;
    let ctx = Ctx { config, config_hash, out: cli.out.clone(), threads: cli.threads.max(1) };
    match cli.command {
        Command::Spectrum => cmd_spectrum(&ctx),
        Command::Classical => cmd_classical(&ctx),
        Command::Compare => cmd_compare(&ctx),
        Command::Residual => cmd_residual(&ctx),
        Command::Takens => cmd_takens(&ctx),
        Command::Validate => cmd_validate(&ctx),
        Command::Scenarios => unreachable!("handled above"),
    }
}

fn cmd_scenarios() -> i32 {
    use std::io::Write;
    let mut text = String::new();
    for info in list_scenarios() {
        text.push_str(&format!("{}: {}\n", info.id, info.summary));
        for (name, default, doc) in info.knobs {
            text.push_str(&format!("    {name} = {default} ({doc})\n"));
        }
    }
    // a closed pipe (e.g. piping into head) is not an error for a listing
    let _ = std::io::stdout().write_all(text.as_bytes());
    EXIT_OK
}

/// hbar sweeps must be strictly decreasing and positive.
fn check_hbars(hbars: &[f64], minimum: usize) -> Result<()> {
    if hbars.len() < minimum {
        return Err(Error::Config(format!(
            "need at least {minimum} hbar values, got {}",
            hbars.len()
        )));
    }
    for w in hbars.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Config(format!(
                "hbar list must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if hbars.last().is_some_and(|h| *h <= 0.0) {
        return Err(Error::Config("hbar values must be positive".into()));
    }
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn cmd_spectrum(ctx: &Ctx) -> std::result::Result<i32, Stage> {
    let sc = cfg(ctx.scenario())?;
    let p = &ctx.config.spectrum;
    if p.count < 2 || !(p.x_max > p.x_min) {
        return Err(Stage::Config(Error::Config(format!(
            "spectrum sweep needs count >= 2 and x_max > x_min, got count={}, range=[{}, {}]",
            p.count, p.x_min, p.x_max
        ))));
    }
    if p.levels == 0 {
        return Err(Stage::Config(Error::Config("spectrum needs at least one level".into())));
    }
    let mut out = ctx.header();
    out.push_str("x,n1,n2,closed_form,numeric,abs_diff\n");
    for &x in &linspace(p.x_min, p.x_max, p.count) {
        let rows = rej(spectrum_at(&sc, x, p.levels, p.grid_n)
            .map_err(|e| Error::Config(format!("base point x = {x}: {e}"))))?;
        for r in rows {
            let closed = r.closed.map_or(String::from("nan"), |c| format!("{c:.16e}"));
            let diff = r
                .closed
                .map_or(String::from("nan"), |c| format!("{:.16e}", (c - r.numeric).abs()));
            out.push_str(&format!(
                "{x:.16e},{},{},{closed},{:.16e},{diff}\n",
                r.n1,
                r.n2.map_or(String::new(), |n| n.to_string()),
                r.numeric
            ));
        }
    }
    rej(ctx.write("spectrum.csv", &out))?;
    println!("wrote {}", ctx.out.join("spectrum.csv").display());
    Ok(EXIT_OK)
}

struct SpectrumRow {
    n1: usize,
    n2: Option<usize>,
    closed: Option<f64>,
    numeric: f64,
}

/// Transverse channel levels at one base point: a closed form where one
/// exists, and a finite-difference value for every level.
fn spectrum_at(sc: &Scenario, x: f64, levels: usize, grid_n: usize) -> Result<Vec<SpectrumRow>> {
    match sc.id {
        "rellich" => {
            let a = sc.params["a"];
            let model = RellichModel { a };
            // pairs (n+, n-) ordered by total excitation, then n+
            let mut pairs = Vec::new();
            for total in 0..levels {
                for np in (0..=total).rev() {
                    pairs.push((np, total - np));
                }
            }
            let mut closed: Vec<(usize, usize, f64)> = pairs
                .iter()
                .map(|&(np, nm)| Ok((np, nm, model.spectrum([x, 0.0], np, nm)?)))
                .collect::<Result<_>>()?;
            closed.sort_by(|a, b| a.2.total_cmp(&b.2));
            let pot = move |y1: f64, y2: f64| model.transverse_potential([x, 0.0], [y1, y2]);
            // box wide enough for the softest channel to decay below the
            // solver's boundary threshold, excited factors included
            let (wp, wm) = model.omegas([x, 0.0])?;
            let half_width = 13.0 / wp.min(wm).sqrt();
            let numeric = fd_eigensolve_2d(&pot, half_width, grid_n, closed.len())?;
            Ok(closed
                .into_iter()
                .zip(numeric)
                .map(|((np, nm, c), e)| SpectrumRow {
                    n1: np,
                    n2: Some(nm),
                    closed: Some(c),
                    numeric: e.energy,
                })
                .collect())
        }
        "sextic" => {
            let (mu, nu) = (sc.params["mu"], sc.params["nu"]);
            let pot = move |u: f64| {
                0.5 * nu * nu * u.powi(6)
                    + mu * nu * u.powi(4)
                    + 0.5 * (mu * mu - 3.0 * nu) * u * u
            };
            let pairs = fd_eigensolve_1d_auto(&pot, levels, 4.0, 0.01)?;
            Ok(pairs
                .into_iter()
                .map(|p| SpectrumRow {
                    n1: p.index,
                    n2: None,
                    // only the ground state has a closed form
                    closed: (p.index == 0).then_some(0.5 * mu),
                    numeric: p.energy,
                })
                .collect())
        }
        _ => {
            let a = sc.squeeze();
            let omega = sc.omega(x)?;
            let pot = move |u: f64| omega * omega * u * u / (2.0 * a * a);
            let width = 8.0 * (a / omega).sqrt();
            let pairs = fd_eigensolve_1d_auto(&pot, levels, width, width / 3200.0)?;
            Ok(pairs
                .into_iter()
                .map(|p| SpectrumRow {
                    n1: p.index,
                    n2: None,
                    closed: Some((p.index as f64 + 0.5) * omega / a),
                    numeric: p.energy,
                })
                .collect())
        }
    }
}

fn cmd_classical(ctx: &Ctx) -> std::result::Result<i32, Stage> {
    let sc = cfg(ctx.scenario())?;
    let p = &ctx.config.classical;
    let horizon = p.horizon.unwrap_or(sc.horizon());
    let pot = rej(sc.effective_potential(p.hbar))?;
    let (s0, eta0) = sc.initial();
    let traj = match integrate_flat(&pot, &[s0], &[eta0], horizon, p.dt) {
        Ok(t) => t,
        Err(Error::DomainExit { time }) => {
            eprintln!("tubelab: trajectory left the declared domain at t = {time:.6}");
            return Ok(EXIT_RUN);
        }
        Err(e) => return Err(Stage::Run(e)),
    };
    let e0 = traj.energy[0];
    let drift = traj.energy.iter().fold(0.0f64, |m, e| m.max((e - e0).abs()));
    let mut out = ctx.header();
    out.push_str(&format!("# max-energy-drift: {drift:.16e}\n"));
    out.push_str("t,a,eta,S,energy,energy_drift\n");
    for i in 0..traj.len() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            traj.times[i],
            traj.position[i][0],
            traj.momentum[i][0],
            traj.action[i],
            traj.energy[i],
            (traj.energy[i] - e0).abs()
        ));
    }
    rej(ctx.write("trajectory.csv", &out))?;
    println!(
        "wrote {} ({} steps, max energy drift {drift:.3e})",
        ctx.out.join("trajectory.csv").display(),
        traj.len() - 1
    );
    Ok(EXIT_OK)
}

fn cmd_compare(ctx: &Ctx) -> std::result::Result<i32, Stage> {
    let sc = cfg(ctx.scenario())?;
    let p = &ctx.config.compare;
    cfg(check_hbars(&p.hbars, 3))?;
    let study = if sc.alpha() < 1.0 {
        // at a weaker dilation the base motion homogenizes to free flow;
        // the study compares x-marginals against the free packet instead
        let (dists, slope) = rej(alpha_marginal_study(&sc, &p.hbars))?;
        let mut csv = ctx.header();
        csv.push_str("hbar,marginal_l2_distance\n");
        for (h, d) in p.hbars.iter().zip(&dists) {
            csv.push_str(&format!("{h:.16e},{d:.16e}\n"));
        }
        rej(ctx.write("convergence.csv", &csv))?;
        let summary = ctx.json_artifact(json!({
            "mode": "marginal",
            "hbars": p.hbars,
            "distances": dists,
            "slope": slope,
            "threshold": p.threshold,
            "pass": slope >= p.threshold,
        }));
        rej(ctx.write("summary.json", &pretty(&summary)))?;
        let mut plot = ctx.header();
        for (h, d) in p.hbars.iter().zip(&dists) {
            plot.push_str(&format!("{:.16e},{:.16e}\n", h.log10(), d.log10()));
        }
        rej(ctx.write("convergence_plot.csv", &plot))?;
        println!("marginal suppression slope {slope:.4} (threshold {})", p.threshold);
        return Ok(if slope >= p.threshold { EXIT_OK } else { EXIT_THRESHOLD });
    } else {
        rej(convergence_study(&sc, &p.hbars, p.threshold, ctx.threads))?
    };
    let mut csv = ctx.header();
    csv.push_str(&study.result.csv());
    rej(ctx.write("convergence.csv", &csv))?;
    let summary = ctx.json_artifact(json!({
        "mode": "l2",
        "study": serde_json::to_value(&study.result).map_err(|e| {
            Stage::Run(Error::Config(format!("summary serialization: {e}")))
        })?,
        "transverse_spreads": study.spreads,
        "max_speed_deviation": study.max_speed_deviation,
    }));
    rej(ctx.write("summary.json", &pretty(&summary)))?;
    let mut plot = ctx.header();
    plot.push_str(&study.result.plot_data());
    rej(ctx.write("convergence_plot.csv", &plot))?;
    println!(
        "slope {:.4} (threshold {}), {} runs -> {}",
        study.result.slope,
        study.result.threshold,
        study.result.runs.len(),
        ctx.out.join("summary.json").display()
    );
    Ok(if study.result.pass { EXIT_OK } else { EXIT_THRESHOLD })
}

fn cmd_residual(ctx: &Ctx) -> std::result::Result<i32, Stage> {
    let sc = cfg(ctx.scenario())?;
    let p = &ctx.config.residual;
    cfg(check_hbars(&p.hbars, 2))?;
    let (residuals, slope) = rej(residual_sweep(&sc, &p.hbars, p.t_eval, p.correction))?;
    let chart = match sc.geometry {
        Geometry::Flat => "flat",
        Geometry::Curve { .. } => "tubular",
    };
    let mut csv = ctx.header();
    csv.push_str(&format!("# chart: {chart}\n# correction: {}\n", p.correction));
    csv.push_str("hbar,residual_norm\n");
    for (h, r) in p.hbars.iter().zip(&residuals) {
        csv.push_str(&format!("{h:.16e},{r:.16e}\n"));
    }
    rej(ctx.write("residual.csv", &csv))?;
    let summary = ctx.json_artifact(json!({
        "chart": chart,
        "correction": p.correction,
        "t_eval": p.t_eval,
        "hbars": p.hbars,
        "residuals": residuals,
        "slope": slope,
    }));
    rej(ctx.write("residual.json", &pretty(&summary)))?;
    println!("residual slope {slope:.4} (correction {})", p.correction);
    Ok(EXIT_OK)
}

fn cmd_takens(ctx: &Ctx) -> std::result::Result<i32, Stage> {
    let sc = cfg(ctx.scenario())?;
    if sc.id != "rellich" {
        return Err(Stage::Config(Error::Config(format!(
            "the funnel fan needs the conical-crossing scenario, got '{}'",
            sc.id
        ))));
    }
    let p = &ctx.config.takens;
    if p.splits < 2 {
        return Err(Stage::Config(Error::Config("need at least two theta splits".into())));
    }
    let a = sc.params["a"];
    let v_star = [p.speed * p.angle.cos(), p.speed * p.angle.sin()];
    let mut csv = ctx.header();
    csv.push_str(&format!("# theta-sum: {:.16e}\n", p.theta_sum));
    csv.push_str("split,theta_plus,theta_minus,t,x1,x2,energy_drift\n");
    let mut max_drift = 0.0f64;
    for j in 0..p.splits {
        let theta_plus = p.theta_sum * j as f64 / (p.splits - 1) as f64;
        let theta_minus = p.theta_sum - theta_plus;
        let spec = FunnelSpec { theta_plus, theta_minus, v_star, horizon: p.horizon };
        let traj = rej(takens_funnel(&spec, p.dt))?;
        let e0 = traj.energy[0];
        for i in 0..traj.len() {
            let drift = (traj.energy[i] - e0).abs();
            max_drift = max_drift.max(drift);
            csv.push_str(&format!(
                "{j},{theta_plus:.16e},{theta_minus:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                traj.times[i], traj.position[i][0], traj.position[i][1], drift
            ));
        }
    }
    rej(ctx.write("funnel.csv", &csv))?;
    // the quantum ground state selects theta_+ = theta_- = 1/(2a): its
    // homogenized potential reproduces the lowest band, gradient included
    let model = RellichModel { a };
    let theta = 0.5 / a;
    let mut sel = ctx.header();
    sel.push_str("r,funnel_potential,band_energy,funnel_gradient,band_gradient,abs_diff\n");
    let mut worst = 0.0f64;
    for &r in &linspace(0.02, 0.4, 20) {
        let u = funnel_potential(theta, theta, r);
        let band = rej(model.spectrum([r, 0.0], 0, 0))?;
        let du = funnel_radial_derivative(theta, theta, r);
        let dband = rej(band_radial_derivative(&model, r))?;
        worst = worst.max((du - dband).abs());
        sel.push_str(&format!(
            "{r:.16e},{u:.16e},{band:.16e},{du:.16e},{dband:.16e},{:.16e}\n",
            (du - dband).abs()
        ));
    }
    rej(ctx.write("selection.csv", &sel))?;
    println!(
        "funnel fan: {} splits, max energy drift {max_drift:.3e}; selection gradient gap {worst:.3e}",
        p.splits
    );
    Ok(EXIT_OK)
}

/// d/dr of the lowest band along the x1 axis, five-point differences.
fn band_radial_derivative(model: &RellichModel, r: f64) -> Result<f64> {
    let h = 1e-3;
    let f = |x: f64| model.spectrum([x, 0.0], 0, 0);
    Ok((f(r - 2.0 * h)? - 8.0 * f(r - h)? + 8.0 * f(r + h)? - f(r + 2.0 * h)?) / (12.0 * h))
}

fn cmd_validate(ctx: &Ctx) -> std::result::Result<i32, Stage> {
    let sc = cfg(ctx.scenario())?;
    let report = sc.validate();
    let payload = ctx.json_artifact(json!({
        "tags": sc.tags,
        "report": serde_json::to_value(&report)
            .map_err(|e| Stage::Run(Error::Config(format!("report serialization: {e}"))))?,
    }));
    rej(ctx.write("report.json", &pretty(&payload)))?;
    println!(
        "zero_set {} gradient {} nondegenerate {} spectrally_smooth {}",
        report.zero_set_ok, report.gradient_ok, report.nondegenerate_ok, report.spectrally_smooth
    );
    Ok(EXIT_OK)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact values are finite");
    s.push('\n');
    s
}
