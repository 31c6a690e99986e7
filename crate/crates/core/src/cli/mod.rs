//! Batch front end: `tugwar <solve|simulate|analyze|converge> --config run.toml`.
//!
//! Exit status is 0 on success, 2 when the config fails validation, 3 when a
//! solve does not converge under `--strict`, and 1 for any other failure.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    barrier_check, boundary_estimate_check, convergence_study, holder_modulus, taylor_residual,
    BarrierSpec, ConvergenceProblem, ExpFirst, HolderOptions, Probes, SquaredDistance, TestFunction,
};
use crate::dpp::{solve_bracket, Bracket, Scheme, SchemeParams, SolveOptions};
use crate::game::{
    run_game, simulate_runs, Fixed, Game, Greedy, Pull, RandomDirection, Sense, Strategy, ValueEstimate,
};
use crate::geometry::ScalarFn;
use crate::timing::Stopwatch;
use crate::{BoundaryData, Domain, Error, ExponentField, Point};

pub use config::{
    locate, AnalyzeConfig, BarrierConfig, BoundaryConfig, BoundaryEstimateConfig, ConvergeConfig, DomainConfig,
    ExponentConfig, HolderConfig, Invalid, OutputConfig, ReferenceConfig, RunConfig, SimulateConfig,
    SolverConfig, StrategyConfig, TaylorConfig, TaylorFunction,
};

#[derive(Debug, Parser)]
#[command(name = "tugwar", version, about = "Tug-of-war DPP solver, game simulator and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the bracket iteration and dump both fields.
    Solve(Common),
    /// Play the game from the configured start points.
    Simulate(Common),
    /// Hölder, barrier, boundary and Taylor diagnostics.
    Analyze(Common),
    /// ε-refinement study against a reference solution.
    Converge(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit with status 3 when a solve does not converge.
    #[arg(long)]
    pub strict: bool,
    /// Overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotConverged(_) => 3,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything a subcommand needs, validated.
struct Setup {
    name: &'static str,
    text: String,
    path: PathBuf,
    config: RunConfig,
    domain: Domain,
    pfield: ExponentField,
    boundary: BoundaryData,
    params: SchemeParams,
    opts: SolveOptions,
    seed: u64,
    strict: bool,
    out: PathBuf,
}

impl Setup {
    fn load(name: &'static str, args: &Common) -> CliResult<Self> {
        let text = fs::read_to_string(&args.config)?;
        let path = args.config.clone();
        let config = RunConfig::parse(&text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            CliError::Validation(format!("{}:{line}: {}", path.display(), e.message()))
        })?;
        let anchor = |inv: Invalid| {
            let line = locate(&text, inv.section, inv.key).unwrap_or(1);
            CliError::Validation(format!(
                "{}:{line}: [{}] {}: {}",
                path.display(),
                inv.section,
                inv.key,
                inv.error
            ))
        };
        let domain = config.build_domain().map_err(anchor)?;
        let dim = domain.dim();
        let pfield = config.build_exponent(dim).map_err(anchor)?;
        let boundary = config.build_boundary(dim).map_err(anchor)?;
        let params = config.scheme_params(dim).map_err(anchor)?;
        let opts = config.solve_options().map_err(anchor)?;
        let out = args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&config.output.dir));
        Ok(Self {
            name,
            seed: args.seed.unwrap_or(config.seed),
            strict: args.strict,
            text,
            path,
            config,
            domain,
            pfield,
            boundary,
            params,
            opts,
            out,
        })
    }

    fn invalid(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
        let line = locate(&self.text, section, key).unwrap_or(1);
        CliError::Validation(format!("{}:{line}: [{section}] {key}: {msg}", self.path.display()))
    }

    fn point(&self, v: &[f64], section: &str, key: &str) -> CliResult<Point> {
        config::point_from(v, self.domain.dim()).map_err(|e| self.invalid(section, key, e))
    }

    fn scheme(&self, eps: Option<f64>) -> CliResult<Scheme> {
        let mut params = self.params;
        if let Some(eps) = eps {
            params.eps = eps;
        }
        Scheme::new(self.domain.clone(), self.pfield.clone(), self.boundary.clone(), params)
            .map_err(|e| self.invalid("solver", "eps", e))
    }

    fn solve(&self, scheme: &Scheme) -> CliResult<Bracket> {
        let b = solve_bracket(scheme, &self.opts)?;
        if self.strict && !b.report.converged {
            return Err(CliError::NotConverged(format!(
                "bracket gap {} > tol {} after {} sweeps",
                b.report.bracket_gap, self.opts.tol, b.report.iterations
            )));
        }
        Ok(b)
    }

    fn write_manifest(&self, clock: &Stopwatch, outputs: &[&str], extra: Value) -> CliResult<()> {
        let manifest = json!({
            "subcommand": self.name,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "config_path": self.path.display().to_string(),
            "config": self.config,
            "wall_time": clock.seconds(),
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "outputs": outputs,
            "details": extra,
        });
        write_json(&self.out.join("manifest.json"), &manifest)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn coords(x: &Point, dim: usize) -> Vec<String> {
    (0..dim).map(|a| x[a].to_string()).collect()
}

fn coord_headers(dim: usize) -> Vec<&'static str> {
    ["x", "y", "z"][..dim].to_vec()
}

/// Parses arguments and runs; returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Solve(a) => solve(&Setup::load("solve", a)?),
        Command::Simulate(a) => simulate(&Setup::load("simulate", a)?),
        Command::Analyze(a) => analyze(&Setup::load("analyze", a)?),
        Command::Converge(a) => converge(&Setup::load("converge", a)?),
    }
}

fn write_field_csv(path: &Path, scheme: &Scheme, bracket: &Bracket) -> CliResult<()> {
    let dim = scheme.dim();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["node"];
    header.extend(coord_headers(dim));
    header.extend(["region", "lower", "upper"]);
    w.write_record(&header)?;
    let lat = scheme.lattice();
    for i in 0..lat.len() {
        let mut row = vec![i.to_string()];
        row.extend(coords(&lat.node(i), dim));
        row.push(scheme.regions()[i].tag().to_string());
        row.push(bracket.lower.values()[i].to_string());
        row.push(bracket.upper.values()[i].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn solve(s: &Setup) -> CliResult<()> {
    let clock = Stopwatch::start();
    let scheme = s.scheme(None)?;
    fs::create_dir_all(&s.out)?;
    let bracket = solve_bracket(&scheme, &s.opts)?;
    write_field_csv(&s.out.join("field.csv"), &scheme, &bracket)?;
    write_json(
        &s.out.join("report.json"),
        &json!({
            "report": bracket.report,
            "lattice": scheme.lattice(),
            "scheme": scheme.params(),
            "solve": s.opts,
        }),
    )?;
    s.write_manifest(
        &clock,
        &["field.csv", "report.json"],
        json!({ "converged": bracket.report.converged }),
    )?;
    if s.strict && !bracket.report.converged {
        return Err(CliError::NotConverged(format!(
            "bracket gap {} > tol {}",
            bracket.report.bracket_gap, s.opts.tol
        )));
    }
    Ok(())
}

fn strategy(
    s: &Setup,
    cfg: &StrategyConfig,
    key: &str,
    sense: Sense,
    greedy: &Option<(Arc<Scheme>, Arc<crate::dpp::GridField>)>,
) -> CliResult<Box<dyn Strategy>> {
    Ok(match cfg {
        StrategyConfig::Greedy => {
            let (scheme, field) = greedy.clone().expect("solved for greedy players");
            Box::new(Greedy::new(scheme, field, sense)?)
        }
        StrategyConfig::Pull { target } => Box::new(Pull::new(s.point(target, "simulate", key)?)),
        StrategyConfig::Random { salt } => Box::new(RandomDirection {
            dim: s.domain.dim(),
            salt: *salt,
        }),
        StrategyConfig::Fixed { direction } => {
            let d = s.point(direction, "simulate", key)?;
            if !(d.norm() > 0.0) {
                return Err(s.invalid("simulate", key, "direction must be nonzero"));
            }
            Box::new(Fixed(d.normalize()))
        }
    })
}

fn simulate(s: &Setup) -> CliResult<()> {
    let clock = Stopwatch::start();
    let cfg = s
        .config
        .simulate
        .as_ref()
        .ok_or_else(|| s.invalid("simulate", "starts", "missing [simulate] section"))?;
    if cfg.runs < 2 {
        return Err(s.invalid("simulate", "runs", "runs must be at least 2"));
    }
    let starts = cfg
        .starts
        .iter()
        .map(|v| s.point(v, "simulate", "starts"))
        .collect::<CliResult<Vec<_>>>()?;
    for x in &starts {
        if s.domain.signed_distance(x) >= 0.0 {
            return Err(s.invalid("simulate", "starts", format!("start {:?} is not in Ω", x.as_slice())));
        }
    }
    fs::create_dir_all(&s.out)?;
    let needs_field = matches!(cfg.player_one, StrategyConfig::Greedy) || matches!(cfg.player_two, StrategyConfig::Greedy);
    let mut greedy = None;
    let mut solver_report = None;
    if needs_field {
        let scheme = Arc::new(s.scheme(None)?);
        let b = s.solve(&scheme)?;
        solver_report = Some(b.report.clone());
        greedy = Some((scheme, Arc::new(b.midpoint())));
    }
    let p1 = strategy(s, &cfg.player_one, "player_one", Sense::Max, &greedy)?;
    let p2 = strategy(s, &cfg.player_two, "player_two", Sense::Min, &greedy)?;
    let game = Game::new(s.domain.clone(), s.pfield.clone(), s.boundary.clone(), s.params.eps)?;

    let dim = s.domain.dim();
    let mut runs_csv = csv::Writer::from_path(s.out.join("runs.csv"))?;
    runs_csv.write_record(["start", "run", "payoff", "tau", "truncated"])?;
    let mut estimates = Vec::new();
    let mut outputs = vec!["runs.csv", "report.json"];
    let mut traj_csv = if cfg.trajectories > 0 {
        outputs.push("trajectories.csv");
        let mut w = csv::Writer::from_path(s.out.join("trajectories.csv"))?;
        let mut header = vec!["start", "run", "step", "c"];
        header.extend(coord_headers(dim));
        w.write_record(&header)?;
        Some(w)
    } else {
        None
    };
    for (k, x0) in starts.iter().enumerate() {
        // Each start point gets its own seed so adding starts leaves earlier ones unchanged.
        let seed = s.seed.wrapping_add(k as u64);
        let runs = simulate_runs(*x0, p1.as_ref(), p2.as_ref(), &game, cfg.runs, seed, cfg.max_steps)?;
        for (i, r) in runs.iter().enumerate() {
            runs_csv.write_record([
                k.to_string(),
                i.to_string(),
                r.payoff.map(|v| v.to_string()).unwrap_or_default(),
                r.tau.map(|v| v.to_string()).unwrap_or_default(),
                r.truncated.to_string(),
            ])?;
        }
        let est = ValueEstimate::from_runs(&runs, seed)?;
        let dpp = match &greedy {
            Some((_, field)) => Some(field.interpolate(x0)?),
            None => None,
        };
        estimates.push(json!({
            "start": x0.rows(0, dim).iter().collect::<Vec<_>>(),
            "estimate": est,
            "dpp_value": dpp,
        }));
        if let Some(w) = traj_csv.as_mut() {
            use rand::SeedableRng;
            for i in 0..cfg.trajectories {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let t = run_game(*x0, p1.as_ref(), p2.as_ref(), &game, &mut rng, cfg.max_steps)?;
                for st in &t.states {
                    let mut row = vec![k.to_string(), i.to_string(), st.step.to_string(), (st.c as u8).to_string()];
                    row.extend(coords(&st.x, dim));
                    w.write_record(&row)?;
                }
            }
            w.flush()?;
        }
    }
    runs_csv.flush()?;
    let mean_tau: Vec<f64> = estimates
        .iter()
        .map(|e| e["estimate"]["mean_tau"].as_f64().unwrap_or(f64::NAN))
        .collect();
    write_json(
        &s.out.join("report.json"),
        &json!({ "estimates": estimates, "solver": solver_report }),
    )?;
    s.write_manifest(&clock, &outputs, json!({ "mean_tau": mean_tau }))
}

#[derive(Serialize)]
struct Metric {
    eps: f64,
    metric: String,
    value: f64,
}

fn write_metrics(path: &Path, rows: &[Metric]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn analyze(s: &Setup) -> CliResult<()> {
    let clock = Stopwatch::start();
    let cfg: &AnalyzeConfig = s
        .config
        .analyze
        .as_ref()
        .ok_or_else(|| s.invalid("analyze", "holder", "missing [analyze] section"))?;
    fs::create_dir_all(&s.out)?;
    let eps = s.params.eps;
    let mut report = serde_json::Map::new();
    let mut metrics = Vec::new();

    if cfg.holder.is_some() || cfg.boundary_estimate.is_some() {
        let scheme = s.scheme(None)?;
        let b = s.solve(&scheme)?;
        let u = b.midpoint();
        report.insert("solver".into(), serde_json::to_value(&b.report)?);
        if let Some(h) = &cfg.holder {
            let center = s.point(&h.center, "analyze.holder", "center")?;
            let opts = HolderOptions {
                sample_pairs: h.sample_pairs,
                seed: s.seed,
                ..HolderOptions::new(h.gamma, h.kappa)
            };
            let r = holder_modulus(&u, &s.domain, &s.pfield, &center, h.radius, &opts).map_err(|e| match e {
                Error::Parameter(_) | Error::Geometry(_) => s.invalid("analyze.holder", "gamma", e),
                other => other.into(),
            })?;
            metrics.push(Metric {
                eps,
                metric: "holder_c".into(),
                value: r.c_measured,
            });
            report.insert("holder".into(), serde_json::to_value(r)?);
        }
        if let Some(be) = &cfg.boundary_estimate {
            let y = s.point(&be.point, "analyze.boundary_estimate", "point")?;
            let r = boundary_estimate_check(&scheme, &u, &y, be.r, be.eta).map_err(|e| match e {
                Error::Parameter(_) | Error::Geometry(_) => s.invalid("analyze.boundary_estimate", "r", e),
                other => other.into(),
            })?;
            metrics.push(Metric {
                eps,
                metric: "boundary_upper_gap".into(),
                value: r.max_upper_gap,
            });
            metrics.push(Metric {
                eps,
                metric: "boundary_lower_gap".into(),
                value: r.min_lower_gap,
            });
            report.insert("boundary_estimate".into(), serde_json::to_value(&r)?);
        }
    }

    if let Some(bc) = &cfg.barrier {
        let z = s.point(&bc.z, "analyze.barrier", "z")?;
        let spec = BarrierSpec::new(z, bc.r, bc.sigma, bc.a, bc.b).map_err(|e| s.invalid("analyze.barrier", "sigma", e))?;
        let dim = s.domain.dim();
        let dirs = crate::dpp::DirectionSet::for_dim(dim, s.params.directions)?;
        let quad = crate::dpp::DiskQuadrature::new(dim, s.params.quadrature)?;
        let mut rows = Vec::new();
        for &e in &bc.eps_list {
            let mut worst = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in &bc.points {
                let x = s.point(p, "analyze.barrier", "points")?;
                let (s1, s2) = barrier_check(&spec, &s.pfield, &x, e, &dirs, &quad)
                    .map_err(|err| s.invalid("analyze.barrier", "points", err))?;
                worst = (worst.0.max(s1), worst.1.max(s2));
            }
            metrics.push(Metric {
                eps: e,
                metric: "barrier_slack_jump".into(),
                value: worst.0,
            });
            metrics.push(Metric {
                eps: e,
                metric: "barrier_slack_drift".into(),
                value: worst.1,
            });
            rows.push(json!({ "eps": e, "max_slack_jump": worst.0, "max_slack_drift": worst.1 }));
        }
        report.insert("barrier".into(), json!({ "spec": spec, "rows": rows }));
    }

    if let Some(t) = &cfg.taylor {
        let dim = s.domain.dim();
        let x = s.point(&t.point, "analyze.taylor", "point")?;
        let nu = s.point(&t.direction, "analyze.taylor", "direction")?;
        if !(nu.norm() > 0.0) {
            return Err(s.invalid("analyze.taylor", "direction", "direction must be nonzero"));
        }
        let nu = nu.normalize();
        let quad = crate::dpp::DiskQuadrature::new(dim, s.params.quadrature)?;
        let phi: Box<dyn TestFunction> = match t.function {
            TaylorFunction::Exp => Box::new(ExpFirst),
            TaylorFunction::SquaredDistance => Box::new(SquaredDistance { center: x, dim }),
        };
        let mut rows = Vec::new();
        for &e in &t.eps_list {
            let (r1, r2) = taylor_residual(phi.as_ref(), &x, e, &nu, &quad)?;
            metrics.push(Metric {
                eps: e,
                metric: "taylor_r1".into(),
                value: r1,
            });
            metrics.push(Metric {
                eps: e,
                metric: "taylor_r2".into(),
                value: r2,
            });
            rows.push(json!({ "eps": e, "r1": r1, "r2": r2 }));
        }
        report.insert("taylor".into(), Value::Array(rows));
    }

    write_metrics(&s.out.join("metrics.csv"), &metrics)?;
    write_json(&s.out.join("report.json"), &Value::Object(report))?;
    s.write_manifest(&clock, &["metrics.csv", "report.json"], Value::Null)
}

fn reference_fn(s: &Setup, r: &ReferenceConfig) -> CliResult<ScalarFn> {
    let dim = s.domain.dim();
    Ok(match r {
        ReferenceConfig::Boundary => {
            let f = s.boundary.clone();
            Arc::new(move |x: &Point| f.eval(x))
        }
        ReferenceConfig::Affine { gradient, offset } => {
            let g = s.point(gradient, "converge.reference", "gradient")?;
            let c = *offset;
            Arc::new(move |x: &Point| g.dot(x) + c)
        }
        ReferenceConfig::Product { scale } => {
            let k = *scale;
            Arc::new(move |x: &Point| k * x[0] * x[1])
        }
        ReferenceConfig::RadialPower { center, exponent } => {
            let c = if center.is_empty() {
                Point::zeros()
            } else {
                config::point_from(center, dim).map_err(|e| s.invalid("converge.reference", "center", e))?
            };
            let k = *exponent;
            Arc::new(move |x: &Point| (x - c).norm().powf(k))
        }
    })
}

fn converge(s: &Setup) -> CliResult<()> {
    let clock = Stopwatch::start();
    let cfg: &ConvergeConfig = s
        .config
        .converge
        .as_ref()
        .ok_or_else(|| s.invalid("converge", "eps_list", "missing [converge] section"))?;
    if cfg.eps_list.is_empty() || cfg.eps_list.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(s.invalid("converge", "eps_list", "entries must lie in (0, 1)"));
    }
    let probes = match &cfg.probes {
        None => Probes::InteriorNodes,
        Some(ps) => Probes::Points(
            ps.iter()
                .map(|p| s.point(p, "converge", "probes"))
                .collect::<CliResult<Vec<_>>>()?,
        ),
    };
    let problem = ConvergenceProblem {
        domain: s.domain.clone(),
        pfield: s.pfield.clone(),
        boundary: s.boundary.clone(),
        reference: reference_fn(s, &cfg.reference)?,
        params: s.params,
        probes,
    };
    fs::create_dir_all(&s.out)?;
    let table = convergence_study(&problem, &cfg.eps_list, &s.opts)?;
    let mut w = csv::Writer::from_path(s.out.join("convergence.csv"))?;
    w.write_record(["eps", "sup_error", "bracket_gap", "iterations", "converged"])?;
    let mut metrics = Vec::new();
    for r in &table.rows {
        w.write_record([
            r.eps.to_string(),
            r.sup_error.to_string(),
            r.bracket_gap.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
        ])?;
        metrics.push(Metric {
            eps: r.eps,
            metric: "sup_error".into(),
            value: r.sup_error,
        });
        metrics.push(Metric {
            eps: r.eps,
            metric: "bracket_gap".into(),
            value: r.bracket_gap,
        });
    }
    w.flush()?;
    write_metrics(&s.out.join("metrics.csv"), &metrics)?;
    write_json(&s.out.join("report.json"), &table)?;
    s.write_manifest(
        &clock,
        &["convergence.csv", "metrics.csv", "report.json"],
        json!({ "strictly_decreasing": table.strictly_decreasing() }),
    )?;
    if s.strict && !table.all_converged() {
        return Err(CliError::NotConverged("some ε rows did not converge".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
