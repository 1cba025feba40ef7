//! Experiment runner for the `brenier` optimal-transport library.
//!
//! Subcommands: `solve` (one semi-discrete transport problem), `embed`
//! (pairwise map distances of several targets), `verify` (named
//! inequality checks), `sweep` (parameter sweeps from a config manifest
//! or a builtin preset), `crofton` (boundary-measure estimators).
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 invalid input.

mod config;
mod report;
mod svg;

use brenier::crofton::{crofton_boundary, sample_lines};
use brenier::geometry::ConvexDomain;
use brenier::lot::{bracket, dual_difference, embed, lot_distance, variance};
use brenier::measures::{w1_discrete, w2_discrete, wasserstein_1d, DiscreteMeasure, Measure1D};
use brenier::num::{ksum, Point};
use brenier::otsolve::{solve_semidiscrete, SolveOptions};
use brenier::verify::{self, fit_holder_exponent, CheckReport, SuiteConfig};
use clap::{Args, Parser, Subcommand};
use config::{ConfigError, ExperimentConfig};
use rand::{Rng, SeedableRng};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "brenier", version, about = "semi-discrete optimal transport and stability checks")]
struct Cli {
    /// Experiment manifest (TOML; sections source, targets, sweep,
    /// checks, output)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized component
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Grid resolution override per axis (64..=4096)
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Output directory (defaults to the config's `output.dir`, then `out`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one transport problem from the config source to a CSV target
    Solve(SolveArgs),
    /// Embed several targets and emit pairwise map-distance matrices
    Embed(EmbedArgs),
    /// Run named inequality checks (`verify all` for the whole battery)
    Verify(VerifyArgs),
    /// Run a parameter sweep from the config manifest or a builtin preset
    Sweep(SweepArgs),
    /// Crofton boundary-measure estimate for a named shape
    Crofton(CroftonArgs),
}

#[derive(Args)]
#[command(after_help = "\
Outputs:
  transport.csv     columns: x1[,x2],index,t1[,t2],phi — one row per grid
                    cell: cell center, assigned atom index, map value,
                    centered potential value
  convergence.json  keys: iterations, grad_inf_norm, objective")]
struct SolveArgs {
    /// Target measure CSV (columns x1[,x2],weight)
    #[arg(long)]
    mu: PathBuf,
}

#[derive(Args)]
#[command(after_help = "\
Outputs:
  embedding.csv  columns: i,j,lot_distance,w2 — one row per target pair")]
struct EmbedArgs {
    /// Target measure CSVs (at least two)
    #[arg(long, required = true, num_args = 1..)]
    mu: Vec<PathBuf>,
}

#[derive(Args)]
#[command(after_help = "\
Outputs:
  verify_<id>.csv     columns: check,instance,lhs,rhs,ratio,tolerance,
                      pass,aux,inputs — one row per checked instance;
                      aux holds named constants as key=value pairs
  verify_summary.csv  columns: check,instances,failures,max_ratio")]
struct VerifyArgs {
    /// Check id (see `--list`) or `all`
    #[arg(default_value = "all")]
    check: String,
    /// Shrink instance counts by this factor for quick runs
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// List available check ids and exit
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
#[command(after_help = "\
Outputs:
  sweep.csv         columns: label,w1,w2,lot_distance,bracket,dual_variance
  sweep_loglog.svg  log-log scatter of map distance vs W1 with the
                    fitted slope (with output.svg = true)
Presets write sharpness_1d.csv/.svg or gn_sharpness.csv instead.")]
struct SweepArgs {
    /// Builtin preset: `sharpness-1d` or `gn-sharpness`
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
#[command(after_help = "\
Outputs:
  crofton.csv  columns: shape,lines,seed,estimate,stderr,exact")]
struct CroftonArgs {
    /// `square`, `disk`, or `config` to take the shape from the manifest
    #[arg(long, default_value = "square")]
    shape: String,
    /// Number of sampled lines
    #[arg(long, default_value_t = 1_000_000)]
    lines: usize,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error("solve failed: {0}")]
    Solve(String),
}

fn input_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Input(msg.into()))
}

/// Returns Ok(true) when everything passed, Ok(false) on check failures.
fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(cli, args),
        Command::Embed(args) => cmd_embed(cli, args),
        Command::Verify(args) => cmd_verify(cli, args),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::Crofton(args) => cmd_crofton(cli, args),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Input("this command needs --config".into()))?;
    Ok(ExperimentConfig::load(path)?)
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `--out` wins, then the manifest's `output.dir`, then `out/`.
fn out_dir(cli: &Cli, cfg: Option<&ExperimentConfig>) -> Result<PathBuf, CliError> {
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.dir.clone().map(PathBuf::from)))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

// ---------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> Result<bool, CliError> {
    let cfg = load_config(cli)?;
    let out = out_dir(cli, Some(&cfg))?;
    let rho = cfg.build_source(cli.resolution)?;
    let mu = ExperimentConfig::load_measure(&args.mu, rho.dim())?;
    let res = solve_semidiscrete(&rho, &mu, &SolveOptions::default())
        .map_err(|e| CliError::Solve(e.to_string()))?;

    let mut csv = if rho.dim() == 1 {
        String::from("x1,index,t1,phi\n")
    } else {
        String::from("x1,x2,index,t1,t2,phi\n")
    };
    for (((cell, j), t), phi) in rho
        .cells()
        .iter()
        .zip(&res.assignment)
        .zip(&res.map)
        .zip(&res.brenier_values)
    {
        if rho.dim() == 1 {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                report::fmt_e(cell.center[0]),
                j,
                report::fmt_e(t[0]),
                report::fmt_e(*phi)
            );
        } else {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                report::fmt_e(cell.center[0]),
                report::fmt_e(cell.center[1]),
                j,
                report::fmt_e(t[0]),
                report::fmt_e(t[1]),
                report::fmt_e(*phi)
            );
        }
    }
    write(&out.join("transport.csv"), &csv)?;

    let summary = format!(
        "{{\"iterations\": {}, \"grad_inf_norm\": {}, \"objective\": {}}}\n",
        res.convergence.iterations,
        report::fmt_e(res.convergence.grad_inf_norm),
        report::fmt_e(res.convergence.objective),
    );
    write(&out.join("convergence.json"), &summary)?;
    print!("{summary}");
    Ok(true)
}

// ---------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------

fn cmd_embed(cli: &Cli, args: &EmbedArgs) -> Result<bool, CliError> {
    if args.mu.len() < 2 {
        return input_err("embed needs at least two --mu files");
    }
    let cfg = load_config(cli)?;
    let out = out_dir(cli, Some(&cfg))?;
    let rho = cfg.build_source(cli.resolution)?;
    let opts = SolveOptions::default();
    let mut embedded = Vec::new();
    for path in &args.mu {
        let mu = ExperimentConfig::load_measure(path, rho.dim())?;
        embedded.push(embed(&rho, &mu, &opts).map_err(|e| CliError::Solve(e.to_string()))?);
    }
    let mut csv = String::from("i,j,lot_distance,w2\n");
    for i in 0..embedded.len() {
        for j in (i + 1)..embedded.len() {
            let d = lot_distance(&embedded[i], &embedded[j], &rho)
                .map_err(|e| CliError::Solve(e.to_string()))?;
            let w2 = w2_discrete(&embedded[i].target, &embedded[j].target)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let _ = writeln!(csv, "{i},{j},{},{}", report::fmt_e(d), report::fmt_e(w2));
        }
    }
    write(&out.join("embedding.csv"), &csv)?;
    Ok(true)
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

fn suite_config(cli: &Cli, scale: usize) -> SuiteConfig {
    let mut cfg = SuiteConfig {
        seed: cli.seed,
        ..SuiteConfig::default()
    };
    if let Some(r) = cli.resolution {
        cfg.grid_1d = r;
        cfg.grid_2d = r;
    }
    cfg.scaled_down(scale)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<bool, CliError> {
    if args.list {
        for id in verify::all_check_ids() {
            println!("{id}");
        }
        return Ok(true);
    }
    if let Some(r) = cli.resolution {
        if !(64..=4096).contains(&r) {
            return input_err(format!("resolution must lie in [64, 4096], got {r}"));
        }
    }
    let cfg = suite_config(cli, args.scale);
    let ids: Vec<&str> = if args.check == "all" {
        verify::all_check_ids().to_vec()
    } else if verify::all_check_ids().contains(&args.check.as_str()) {
        vec![verify::all_check_ids()
            .iter()
            .find(|id| **id == args.check)
            .expect("membership checked")]
    } else {
        return input_err(format!("unknown check `{}` (try --list)", args.check));
    };
    let out = out_dir(cli, None)?;
    // the three solved-pair checks share one expensive suite of solves
    let battery_ids = [
        "strong-convexity",
        "primal-dual-comparison",
        "potential-stability",
    ];
    let wants_battery = ids.iter().filter(|id| battery_ids.contains(id)).count() >= 2;
    let battery = if wants_battery {
        Some(verify::run_stability_battery(&cfg)?)
    } else {
        None
    };
    let mut all_reports: Vec<CheckReport> = Vec::new();
    for id in &ids {
        let reports = match (&battery, *id) {
            (Some(b), "strong-convexity") => b.strong_convexity.clone(),
            (Some(b), "primal-dual-comparison") => b.primal_dual.clone(),
            (Some(b), "potential-stability") => {
                let mut v = b.potential_w1.clone();
                v.extend(b.potential_chi2.clone());
                v
            }
            _ => verify::run_check(id, &cfg)?,
        };
        let csv = report::reports_to_csv(&reports);
        write(&out.join(format!("verify_{id}.csv")), &csv)?;
        all_reports.extend(reports);
    }
    write(
        &out.join("verify_summary.csv"),
        &report::summary_csv(&all_reports),
    )?;
    print!("{}", report::summary_table(&all_reports));
    Ok(all_reports.iter().all(|r| r.pass))
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<bool, CliError> {
    match args.preset.as_deref() {
        Some("sharpness-1d") => return preset_sharpness_1d(cli),
        Some("gn-sharpness") => return preset_gn_sharpness(cli),
        Some(other) => return input_err(format!("unknown preset `{other}`")),
        None => {}
    }
    let cfg = load_config(cli)?;
    let out = out_dir(cli, Some(&cfg))?;
    let rho = cfg.build_source(cli.resolution)?;
    // lattice families have axis-aligned Laguerre boundaries whose cells
    // flip in whole strips; a tolerance near the strip quantum keeps the
    // sweep distances sharp
    let opts = if matches!(cfg.targets.family.as_str(), "shift" | "dilation") && rho.dim() == 2 {
        SolveOptions {
            mass_tolerance: Some(1e-3),
            ..SolveOptions::default()
        }
    } else {
        SolveOptions::default()
    };

    // build the target family
    let mut labels: Vec<String> = Vec::new();
    let mut targets: Vec<DiscreteMeasure> = Vec::new();
    match cfg.targets.family.as_str() {
        "shift" | "dilation" => {
            let base = discretize_source(&rho, cfg.targets.atoms);
            labels.push("base".into());
            targets.push(base.clone());
            let (lo, _) = rho.domain().bounding_box();
            for &eps in &cfg.sweep.epsilons {
                if cfg.targets.family == "shift" {
                    let dir = if rho.dim() == 1 {
                        [eps, 0.0]
                    } else {
                        [eps / 2f64.sqrt(), eps / 2f64.sqrt()]
                    };
                    targets.push(base.translate(dir));
                } else {
                    if rho.dim() != 1 {
                        return input_err("dilation sweeps are 1D only");
                    }
                    // dilate the atom cloud about the left end of the domain
                    let scaled = base
                        .points()
                        .iter()
                        .map(|p| [lo[0] + (p[0] - lo[0]) * (1.0 + eps), 0.0])
                        .collect();
                    targets.push(
                        DiscreteMeasure::new(scaled, base.weights().to_vec(), 1)
                            .map_err(|e| CliError::Input(e.to_string()))?,
                    );
                }
                labels.push(format!("eps={eps}"));
            }
        }
        "random-atoms" => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
            let (lo, hi) = rho.domain().bounding_box();
            for i in 0..cfg.sweep.instances.max(2) {
                let k = cfg.targets.atoms.clamp(2, 50);
                let mut pts: Vec<Point> = Vec::new();
                while pts.len() < k {
                    let p = [
                        rng.gen_range(lo[0]..hi[0]),
                        if rho.dim() == 2 {
                            rng.gen_range(lo[1]..hi[1])
                        } else {
                            0.0
                        },
                    ];
                    if rho.domain().contains(p) {
                        pts.push(p);
                    }
                }
                targets.push(
                    DiscreteMeasure::uniform_on(pts, rho.dim())
                        .map_err(|e| CliError::Input(e.to_string()))?,
                );
                labels.push(format!("instance={i}"));
            }
        }
        "files" => {
            for f in &cfg.targets.files {
                targets.push(ExperimentConfig::load_measure(Path::new(f), rho.dim())?);
                labels.push(f.clone());
            }
        }
        other => return input_err(format!("unknown target family `{other}`")),
    }
    if targets.len() < 2 {
        return input_err("sweep needs at least two targets");
    }

    // embed everything, compare against the first member
    let mut embedded = Vec::new();
    for mu in &targets {
        embedded.push(embed(&rho, mu, &opts).map_err(|e| CliError::Solve(e.to_string()))?);
    }
    let mut csv = String::from("label,w1,w2,lot_distance,bracket,dual_variance\n");
    let mut fit_samples = Vec::new();
    for (k, e) in embedded.iter().enumerate().skip(1) {
        let base = &embedded[0];
        let (w1, w2) = if rho.dim() == 1 {
            (
                wasserstein_1d(
                    &Measure1D::Discrete(&base.target),
                    &Measure1D::Discrete(&e.target),
                    1,
                ),
                wasserstein_1d(
                    &Measure1D::Discrete(&base.target),
                    &Measure1D::Discrete(&e.target),
                    2,
                ),
            )
        } else {
            (
                w1_discrete(&base.target, &e.target).map_err(|e| CliError::Input(e.to_string()))?,
                w2_discrete(&base.target, &e.target).map_err(|e| CliError::Input(e.to_string()))?,
            )
        };
        let lot = lot_distance(base, e, &rho).map_err(|e| CliError::Solve(e.to_string()))?;
        let br = bracket(base, e, &rho);
        let dd = dual_difference(base, e, &rho);
        let var = variance(&dd.values, &dd.masses);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            labels[k],
            report::fmt_e(w1),
            report::fmt_e(w2),
            report::fmt_e(lot),
            report::fmt_e(br),
            report::fmt_e(var)
        );
        if w1 > 0.0 && lot > 0.0 {
            fit_samples.push((w1, lot));
        }
    }
    write(&out.join("sweep.csv"), &csv)?;
    if cfg.output.svg && fit_samples.len() >= 4 {
        let fit = fit_holder_exponent(&fit_samples)?;
        match svg::plot_loglog(&fit_samples, &fit, "W1", "map distance", "sweep") {
            Ok(rendered) => write(&out.join("sweep_loglog.svg"), &rendered)?,
            Err(e) => eprintln!("svg skipped: {e}"),
        }
    }

    // optional named checks from the manifest
    let mut pass = true;
    if !cfg.checks.run.is_empty() {
        let suite = suite_config(cli, 1);
        let ids: Vec<String> = if cfg.checks.run.iter().any(|c| c == "all") {
            verify::all_check_ids()
                .iter()
                .map(|s| s.to_string())
                .collect()
        } else {
            cfg.checks.run.clone()
        };
        let mut all_reports = Vec::new();
        for id in &ids {
            let reports = verify::run_check(id, &suite)?;
            let path = out.join(format!("verify_{id}.csv"));
            write(&path, &report::reports_to_csv(&reports))?;
            all_reports.extend(reports);
        }
        write(
            &out.join("verify_summary.csv"),
            &report::summary_csv(&all_reports),
        )?;
        print!("{}", report::summary_table(&all_reports));
        pass = all_reports.iter().all(|r| r.pass);
    }
    Ok(pass)
}

/// Equal-mass discretization of the source: ρ-quantile atoms in 1D, a
/// mass-weighted lattice coarsening in 2D.
fn discretize_source(rho: &brenier::measures::GridDensity, atoms: usize) -> DiscreteMeasure {
    if rho.dim() == 1 {
        let q = rho.quantile_fn();
        let pts: Vec<Point> = (0..atoms.max(2))
            .map(|j| [q.eval((j as f64 + 0.5) / atoms.max(2) as f64), 0.0])
            .collect();
        DiscreteMeasure::uniform_on(pts, 1).expect("quantile atoms are distinct")
    } else {
        let k = (atoms.max(4) as f64).sqrt().round() as usize;
        let (lo, hi) = rho.domain().bounding_box();
        let mut weights = vec![0.0f64; k * k];
        for c in rho.cells() {
            let i = (((c.center[0] - lo[0]) / (hi[0] - lo[0]) * k as f64) as usize).min(k - 1);
            let j = (((c.center[1] - lo[1]) / (hi[1] - lo[1]) * k as f64) as usize).min(k - 1);
            weights[j * k + i] += c.mass();
        }
        let mut pts = Vec::new();
        let mut ws = Vec::new();
        for j in 0..k {
            for i in 0..k {
                let w = weights[j * k + i];
                if w > 0.0 {
                    pts.push([
                        lo[0] + (i as f64 + 0.5) / k as f64 * (hi[0] - lo[0]),
                        lo[1] + (j as f64 + 0.5) / k as f64 * (hi[1] - lo[1]),
                    ]);
                    ws.push(w);
                }
            }
        }
        let total = ksum(ws.iter().copied());
        for w in ws.iter_mut() {
            *w /= total;
        }
        DiscreteMeasure::new(pts, ws, 2).expect("lattice coarsening is a valid measure")
    }
}

fn preset_sharpness_1d(cli: &Cli) -> Result<bool, CliError> {
    let out = out_dir(cli, None)?;
    let cfg = suite_config(cli, 1);
    let reports = verify::run_shift_sharpness(&cfg)?;
    write(
        &out.join("sharpness_1d.csv"),
        &report::reports_to_csv(&reports),
    )?;
    // slope plot of the bracket samples embedded in the reports
    let mut samples = Vec::new();
    for r in &reports {
        if let Some(eps) = r
            .instance
            .strip_prefix("bracket;eps=")
            .and_then(|s| s.parse::<f64>().ok())
        {
            if let Some((_, v)) = r.aux.iter().find(|(k, _)| k == "bracket") {
                samples.push((eps, *v));
            }
        }
    }
    if samples.len() >= 4 {
        let fit = fit_holder_exponent(&samples)?;
        let rendered = svg::plot_loglog(
            &samples,
            &fit,
            "shift",
            "dual bracket",
            "bracket scaling of the 1D shift family",
        )
        .map_err(CliError::Input)?;
        write(&out.join("sharpness_1d.svg"), &rendered)?;
        println!("bracket slope {:.3}", fit.slope);
    }
    print!("{}", report::summary_table(&reports));
    Ok(reports.iter().all(|r| r.pass))
}

fn preset_gn_sharpness(cli: &Cli) -> Result<bool, CliError> {
    let out = out_dir(cli, None)?;
    use brenier::convexfun::SampledFunction1D;
    use brenier::crofton::gn_check_1d;
    let mut csv = String::from("L,eps,lhs,rhs,l2_sq,l2_sq_stated,pass\n");
    let mut all_pass = true;
    for l in [0.5, 1.0, 2.0] {
        for eps in [0.05, 0.1] {
            let u = SampledFunction1D::new(vec![0.0, 0.5, 1.0], vec![0.5 * l, 0.0, 0.5 * l]);
            let v = SampledFunction1D::new(
                vec![0.0, 0.5 - eps / l, 0.5 + eps / l, 1.0],
                vec![0.5 * l, eps, eps, 0.5 * l],
            );
            let (lhs, rhs) = gn_check_1d(&u, &v).map_err(|e| CliError::Input(e.to_string()))?;
            let l2 = u.l2_sq_diff(&v);
            let pass = (lhs - 2.0 * l * eps).abs() <= 1e-12
                && (l2 - 2.0 / 3.0 * eps.powi(3) / l).abs() <= 1e-12
                && lhs <= rhs;
            all_pass &= pass;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                report::fmt_e(l),
                report::fmt_e(eps),
                report::fmt_e(lhs),
                report::fmt_e(rhs),
                report::fmt_e(l2),
                report::fmt_e(eps.powi(3) / l),
                pass
            );
        }
    }
    write(&out.join("gn_sharpness.csv"), &csv)?;
    println!("gn-sharpness: {}", if all_pass { "PASS" } else { "FAIL" });
    Ok(all_pass)
}

// ---------------------------------------------------------------------
// crofton
// ---------------------------------------------------------------------

fn cmd_crofton(cli: &Cli, args: &CroftonArgs) -> Result<bool, CliError> {
    let (name, domain) = match args.shape.as_str() {
        "square" => (
            "square".to_string(),
            ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).expect("unit square"),
        ),
        "disk" => (
            "disk".to_string(),
            ConvexDomain::ball([0.0, 0.0], 1.0).expect("unit disk"),
        ),
        "config" => {
            let cfg = load_config(cli)?;
            let rho = cfg.build_source(Some(64))?;
            if rho.dim() != 2 {
                return input_err("crofton needs a two-dimensional shape");
            }
            (cfg.source.kind.clone(), rho.domain().clone())
        }
        other => return input_err(format!("unknown shape `{other}`")),
    };
    if args.lines == 0 {
        return input_err("line count must be positive");
    }
    let out = out_dir(cli, None)?;
    let (lo, hi) = domain.bounding_box();
    let radius = [lo, hi, [lo[0], hi[1]], [hi[0], lo[1]]]
        .iter()
        .map(|p| brenier::num::norm(*p))
        .fold(0.0f64, f64::max)
        * 1.05;
    let ens = sample_lines(args.lines, radius, cli.seed);
    let est = crofton_boundary(&domain, &ens).map_err(|e| CliError::Input(e.to_string()))?;
    let exact = domain.boundary_measure();
    let mut csv = String::from("shape,lines,seed,estimate,stderr,exact\n");
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{}",
        name,
        args.lines,
        cli.seed,
        report::fmt_e(est.estimate),
        report::fmt_e(est.stderr),
        report::fmt_e(exact)
    );
    write(&out.join("crofton.csv"), &csv)?;
    println!(
        "{name}: estimate {:.6} ± {:.6} (exact {exact:.6})",
        est.estimate, est.stderr
    );
    Ok(true)
}
