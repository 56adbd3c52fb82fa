//! `segregate`: run scenarios, extract limits and check certificates from the
//! command line. Every subcommand reads a scenario file and writes plain CSV
//! and JSON artifacts into the output directory.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 invalid config,
//! arguments or input files, 3 a solver hit its iteration limit, 4 a tuple
//! failed class S under `--require-class-s`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use segregate::analysis::h1_distances;
use segregate::io::{
    append_ladder_row, ladder_entry_dir, read_ladder, read_tuple, write_json, write_ladder,
    write_rates, write_tuple, LadderRow,
};
use segregate::{
    certify, compare_limits, compute_pq, continuation, limit_direct, limit_two_species,
    overlap_metric, rate_study, solve_eps, BoundarySpec, DensityTuple, Grid, LimitInit, RunConfig,
    SolveReport,
};

#[derive(Parser)]
#[command(name = "segregate", version, about = "Strong-competition limits on uniform grids")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to `output.dir` from the scenario.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the parallel red-black sweeps on this many threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved. The solvers are deterministic and ignore it.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the coupled system at one value of epsilon.
    SolveEps {
        #[arg(long)]
        epsilon: f64,
        /// Start from this tuple directory instead of the harmonic extensions.
        #[arg(long)]
        init: Option<PathBuf>,
    },
    /// Solve along `solver.ladder`, warm-starting each rung.
    Continuation,
    /// Compute the segregated limit directly.
    Limit {
        #[arg(long, value_enum)]
        method: Method,
        /// `harmonic`, `zero`, or a tuple directory (direct method only).
        #[arg(long, default_value = "harmonic")]
        init: String,
    },
    /// Certify a tuple; with a second tuple also report P and Q.
    Verify {
        fields: PathBuf,
        second: Option<PathBuf>,
        /// Exit with status 4 unless every tuple is in class S.
        #[arg(long)]
        require_class_s: bool,
    },
    /// Fit the rate of approach of a continuation ladder to a reference limit.
    Rate { ladder: PathBuf, reference: PathBuf },
    /// Distances and P / Q between two tuples.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    #[value(name = "two_species")]
    TwoSpecies,
    #[value(name = "direct")]
    Direct,
}

enum Failure {
    Output(String),
    Invalid(String),
    NotConverged(String),
    NotClassS(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::NotConverged(_) => 3,
            Failure::NotClassS(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Output(m) | Failure::Invalid(m) | Failure::NotConverged(m) | Failure::NotClassS(m) => m,
        }
    }
}

impl From<segregate::Error> for Failure {
    fn from(e: segregate::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn written(r: segregate::Result<()>) -> CmdResult {
    r.map_err(|e| Failure::Output(e.to_string()))
}

struct Context {
    cfg: RunConfig,
    grid: Grid,
    bc: BoundarySpec,
    out: PathBuf,
    threads: Option<usize>,
}

impl Context {
    fn load(common: &Common) -> Result<Self, Failure> {
        let path = common
            .config
            .as_ref()
            .ok_or_else(|| Failure::Invalid("--config is required".into()))?;
        let cfg = RunConfig::load(path)?.with_env_overrides()?;
        let grid = cfg.build_grid()?;
        let bc = cfg.build_boundary(&grid)?;
        let out = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
        written(std::fs::create_dir_all(&out).map_err(Into::into))?;
        if common.threads == Some(0) {
            return Err(Failure::Invalid("--threads must be positive".into()));
        }
        Ok(Context { cfg, grid, bc, out, threads: common.threads })
    }

    fn read(&self, dir: &Path) -> Result<DensityTuple, Failure> {
        let u = read_tuple(dir, &self.grid)?;
        u.check_grid(&self.grid)?;
        Ok(u)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Context::load(&cli.common).and_then(|ctx| run(&ctx, &cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(ctx: &Context, command: &Command) -> CmdResult {
    match command {
        Command::SolveEps { epsilon, init } => cmd_solve_eps(ctx, *epsilon, init.as_deref()),
        Command::Continuation => cmd_continuation(ctx),
        Command::Limit { method, init } => cmd_limit(ctx, *method, init),
        Command::Verify { fields, second, require_class_s } => {
            cmd_verify(ctx, fields, second.as_deref(), *require_class_s)
        }
        Command::Rate { ladder, reference } => cmd_rate(ctx, ladder, reference),
        Command::Compare { a, b } => cmd_compare(ctx, a, b),
    }
}

fn report_line(label: &str, r: &SolveReport, overlap: f64) {
    println!(
        "{label}: {} sweeps, residual {:.3e}, overlap {:.3e}, {:.2} s{}",
        r.iterations,
        r.residual,
        overlap,
        r.wall_time,
        if r.converged { "" } else { "  (not converged)" }
    );
}

fn cmd_solve_eps(ctx: &Context, eps: f64, init: Option<&Path>) -> CmdResult {
    let start = init.map(|dir| ctx.read(dir)).transpose()?;
    let opts = ctx.cfg.solve_options(ctx.threads);
    let (u, report) = solve_eps(&ctx.grid, &ctx.bc, eps, &opts, start.as_ref())?;
    let dir = ladder_entry_dir(&ctx.out, eps);
    let overlap = overlap_metric(&u);
    written(write_tuple(&dir, &ctx.grid, &u))?;
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    doc["overlap"] = json!(overlap);
    written(write_json(&dir.join("report.json"), &doc))?;
    report_line(&format!("eps {eps:e}"), &report, overlap);
    if report.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("eps {eps:e} stopped at max_iter")))
    }
}

fn cmd_continuation(ctx: &Context) -> CmdResult {
    let opts = ctx.cfg.solve_options(ctx.threads);
    let ladder = continuation(&ctx.grid, &ctx.bc, &ctx.cfg.solver.ladder, &opts)?;
    let mut rows = Vec::with_capacity(ladder.len());
    for (u, report) in &ladder {
        let overlap = overlap_metric(u);
        written(write_tuple(&ladder_entry_dir(&ctx.out, report.epsilon), &ctx.grid, u))?;
        report_line(&format!("eps {:e}", report.epsilon), report, overlap);
        rows.push(LadderRow::new(report, overlap));
    }
    written(write_ladder(&ctx.out.join("ladder.csv"), &rows))?;
    let stalled: Vec<String> = ladder
        .iter()
        .filter(|(_, r)| !r.converged)
        .map(|(_, r)| format!("{:e}", r.epsilon))
        .collect();
    if stalled.is_empty() {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("not converged at eps {}", stalled.join(", "))))
    }
}

fn cmd_limit(ctx: &Context, method: Method, init: &str) -> CmdResult {
    let (u, report, name) = match method {
        Method::TwoSpecies => {
            let clock = Instant::now();
            let u = limit_two_species(&ctx.grid, &ctx.bc)?;
            let report = SolveReport {
                epsilon: 0.0,
                iterations: 0,
                residual: 0.0,
                wall_time: clock.elapsed().as_secs_f64(),
                converged: true,
            };
            (u, report, "limit_two_species")
        }
        Method::Direct => {
            let start = match init {
                "harmonic" => LimitInit::HarmonicExtensions,
                "zero" => LimitInit::ZeroInterior,
                dir => LimitInit::State(ctx.read(Path::new(dir))?),
            };
            let opts = ctx.cfg.limit_options(ctx.threads);
            let (u, report) = limit_direct(&ctx.grid, &ctx.bc, &opts, &start)?;
            (u, report, "limit_direct")
        }
    };
    let overlap = overlap_metric(&u);
    written(write_tuple(&ctx.out.join(name), &ctx.grid, &u))?;
    written(append_ladder_row(&ctx.out.join("ladder.csv"), &LadderRow::new(&report, overlap)))?;
    report_line(name, &report, overlap);
    if report.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("{name} stopped at max_iter")))
    }
}

fn cmd_verify(ctx: &Context, fields: &Path, second: Option<&Path>, require: bool) -> CmdResult {
    let tol = ctx.cfg.tolerances(ctx.bc.scale());
    let u = ctx.read(fields)?;
    let cert = certify(&ctx.grid, &ctx.bc, &u, &tol)?;
    print!("{}: {cert}", fields.display());
    let mut doc: Map<String, Value> = cert.to_json_map().into_iter().collect();
    let mut failing = Vec::new();
    if !cert.class_s {
        failing.push(fields.display().to_string());
    }
    if let Some(path) = second {
        let v = ctx.read(path)?;
        let cert2 = certify(&ctx.grid, &ctx.bc, &v, &tol)?;
        print!("{}: {cert2}", path.display());
        if !cert2.class_s {
            failing.push(path.display().to_string());
        }
        for (k, val) in cert2.to_json_map() {
            doc.insert(format!("second.{k}"), val);
        }
        let pq = compute_pq(&ctx.grid, &u, &v)?;
        println!("P = {:.6e} (species {}), Q = {:.6e} (species {})", pq.p, pq.p_species + 1, pq.q, pq.q_species + 1);
        doc.extend(pq.to_json_map(&ctx.grid));
    }
    written(write_json(&ctx.out.join("certificate.json"), &Value::Object(doc)))?;
    if require && !failing.is_empty() {
        return Err(Failure::NotClassS(format!("not in class S: {}", failing.join(", "))));
    }
    Ok(())
}

fn cmd_rate(ctx: &Context, ladder_dir: &Path, reference: &Path) -> CmdResult {
    let reference = ctx.read(reference)?;
    let rows = read_ladder(&ladder_dir.join("ladder.csv"))?;
    let mut ladder = Vec::new();
    for row in rows.iter().filter(|r| r.epsilon > 0.0) {
        let u = ctx.read(&ladder_entry_dir(ladder_dir, row.epsilon))?;
        let report = SolveReport {
            epsilon: row.epsilon,
            iterations: row.iterations,
            residual: row.residual,
            wall_time: row.wall_time,
            converged: row.residual <= ctx.cfg.solver.tol,
        };
        ladder.push((u, report));
    }
    let study = rate_study(&ctx.grid, &ladder, &reference)?;
    let converged: Vec<_> = ladder.iter().filter(|(_, r)| r.converged).collect();
    let distances = h1_distances(&ctx.grid, &converged, &reference)?;
    written(write_rates(&ctx.out.join("rates.csv"), &distances))?;
    written(write_json(&ctx.out.join("ratefit.json"), &study.to_json()))?;
    for (i, fit) in study.per_species.iter().enumerate() {
        println!("u{}: slope {:.4}, r^2 {:.4}", i + 1, fit.slope, fit.r_squared);
    }
    println!("worst: slope {:.4}, r^2 {:.4}", study.worst.slope, study.worst.r_squared);
    Ok(())
}

fn cmd_compare(ctx: &Context, a: &Path, b: &Path) -> CmdResult {
    let u = ctx.read(a)?;
    let v = ctx.read(b)?;
    let cmp = compare_limits(&ctx.grid, &u, &v)?;
    written(write_json(&ctx.out.join("compare.json"), &cmp.to_json(&ctx.grid)))?;
    println!(
        "max-norm distance {:.6e}, P {:.6e}, Q {:.6e}",
        cmp.headline, cmp.pq.p, cmp.pq.q
    );
    Ok(())
}
