use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use asbec::experiment::{self, ConfigSpec, ExperimentConfig, PRESETS};
use asbec::metrics::Axis;
use asbec::{Error, ExecMode, FunctionId, ParallelPlan, TechnologySet};

#[derive(Parser)]
#[command(name = "asbec", version, about = "Artificial Bee Colony benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repetition ensembles and write traces and summaries.
    Run(RunArgs),
    /// Compute gain and MLG tables of every configuration against a reference.
    Compare(CompareArgs),
    /// Run once and print the trace as `eval,time,best_f` lines.
    Single(SingleArgs),
    /// List the benchmark functions.
    ListFunctions,
    /// List the named configurations.
    ListConfigs,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment description; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated function ids.
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<FunctionId>>,
    /// Comma-separated configuration labels.
    #[arg(long, value_delimiter = ',')]
    configs: Option<Vec<String>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Label of the extra configuration defined by technology and mode flags.
    #[arg(long, default_value = "custom")]
    label: String,
    #[command(flatten)]
    tech: TechFlags,
    #[command(flatten)]
    plan: PlanFlags,
}

#[derive(Args)]
struct CompareArgs {
    /// Results directory written by `run`.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value = "abc")]
    reference: String,
    #[arg(long, default_value_t = 8)]
    fe_step: u64,
    #[arg(long, default_value_t = 100)]
    time_points: usize,
    /// Evaluation count reported on standard output.
    #[arg(long, default_value_t = 1000)]
    at_fe: u64,
}

#[derive(Args)]
struct SingleArgs {
    #[arg(long)]
    function: FunctionId,
    #[arg(long, default_value = "asbec")]
    config: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1600)]
    budget: u64,
    #[command(flatten)]
    tech: TechFlags,
    #[command(flatten)]
    plan: PlanFlags,
}

#[derive(Args, Default)]
struct TechFlags {
    /// Passes per bee group between hive dances.
    #[arg(long)]
    check: Option<u32>,
    #[arg(long)]
    biased: bool,
    #[arg(long)]
    multi_param: bool,
    #[arg(long)]
    smart_scout: bool,
    #[arg(long)]
    opposition: bool,
    #[arg(long)]
    interpolation: bool,
    /// Enable the prophet with this catalyst.
    #[arg(long, value_name = "CATALYST")]
    prophet: Option<f64>,
    #[arg(long)]
    prophet_memory: Option<usize>,
}

impl TechFlags {
    fn any(&self) -> bool {
        self.check.is_some()
            || self.biased
            || self.multi_param
            || self.smart_scout
            || self.opposition
            || self.interpolation
            || self.prophet.is_some()
            || self.prophet_memory.is_some()
    }

    fn apply(&self, t: &mut TechnologySet) {
        if let Some(c) = self.check {
            t.check = c;
        }
        t.biased |= self.biased;
        t.multi_param |= self.multi_param;
        t.smart_scout |= self.smart_scout;
        t.opposition |= self.opposition;
        t.interpolation |= self.interpolation;
        if let Some(c) = self.prophet {
            t.prophet_catalyst = Some(c);
        }
        if let Some(n) = self.prophet_memory {
            t.prophet_memory = n;
        }
    }
}

#[derive(Args, Default)]
struct PlanFlags {
    /// serial, multi-start, multi-swarm or bbb.
    #[arg(long)]
    mode: Option<ExecMode>,
    #[arg(long)]
    workers: Option<usize>,
    /// Multi-Swarm exchange period in cycles.
    #[arg(long)]
    exchange_every: Option<u64>,
}

impl PlanFlags {
    fn any(&self) -> bool {
        self.mode.is_some() || self.workers.is_some() || self.exchange_every.is_some()
    }

    fn apply(&self, p: &mut ParallelPlan) {
        if let Some(m) = self.mode {
            p.mode = m;
        }
        if let Some(w) = self.workers {
            p.workers = w;
        }
        if let Some(k) = self.exchange_every {
            p.exchange_every = k;
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Usage and configuration mistakes exit with 2, runtime failures with 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::SingularSystem => 1,
        _ => 2,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ASBEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("ASBEC_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("ASBEC_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn dispatch(cmd: Command) -> asbec::Result<()> {
    match cmd {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::Single(a) => single(a),
        Command::ListFunctions => {
            let mut out = io::stdout().lock();
            for id in FunctionId::ALL {
                let (m, lo, hi) = id.table_entry();
                let _ = writeln!(out, "{id}\tm={m}\t[{lo}, {hi}]\t{}", id.properties());
            }
            Ok(())
        }
        Command::ListConfigs => {
            let mut out = io::stdout().lock();
            for p in PRESETS {
                let _ = writeln!(out, "{}\t{}\t{}", p.label, p.mode, p.description);
            }
            Ok(())
        }
    }
}

fn run(a: RunArgs) -> asbec::Result<()> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(f) = a.functions {
        cfg.functions = f;
    }
    if let Some(c) = a.configs {
        cfg.configs = c.into_iter().map(ConfigSpec::named).collect();
    }
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(o) = a.out {
        cfg.out = o;
    }
    if a.tech.any() || a.plan.any() {
        let mut tech = TechnologySet::abc();
        a.tech.apply(&mut tech);
        let mut plan = ParallelPlan::serial();
        a.plan.apply(&mut plan);
        cfg.configs.push(ConfigSpec {
            label: a.label,
            tech: Some(tech),
            plan: Some(plan),
            budget: None,
        });
    }
    cfg.validate()?;
    eprintln!(
        "running {} functions x {} configs x {} reps into {}",
        cfg.functions.len(),
        cfg.configs.len(),
        cfg.reps,
        cfg.out.display()
    );
    cfg.run(|line| eprintln!("{line}"))
}

fn compare(a: CompareArgs) -> asbec::Result<()> {
    let tables = experiment::compare(&a.out, &a.reference, a.fe_step, a.time_points)?;
    let dirs = experiment::write_comparisons(&a.out, &a.reference, &tables)?;
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "config,reference,fe,mlg_fe,mlg_time_1");
    for t in &tables {
        let at_fe = t
            .mlg
            .iter()
            .rfind(|r| r.axis_type == Axis::Evals && r.axis_value <= a.at_fe as f64);
        let at_t1 = t.mlg.iter().rfind(|r| r.axis_type == Axis::Time);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            t.config,
            a.reference,
            at_fe.map_or(0.0, |r| r.axis_value),
            at_fe.map_or(f64::NAN, |r| r.mlg),
            at_t1.map_or(f64::NAN, |r| r.mlg)
        );
    }
    for d in dirs {
        eprintln!("wrote {}", d.display());
    }
    Ok(())
}

fn single(a: SingleArgs) -> asbec::Result<()> {
    let cfg = ExperimentConfig {
        budget: a.budget,
        seed: a.seed,
        ..ExperimentConfig::default()
    };
    let mut resolved = cfg.resolve(&ConfigSpec::named(&a.config))?;
    a.tech.apply(&mut resolved.colony.tech);
    a.plan.apply(&mut resolved.plan);
    let outcome = resolved.run(a.function, a.seed)?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    for p in outcome.combined.points() {
        let _ = writeln!(out, "{},{},{}", p.evals, p.time, experiment::fmt_f(p.best_f));
    }
    Ok(())
}
