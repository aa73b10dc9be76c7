use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use thermsched::adversary::run_lower_bound_game;
use thermsched::experiment::{ratio_experiment, RandomModel};
use thermsched::io::{
    from_json, parse_3partition_source, parse_instance, parse_n3dm_source, parse_schedule, serialize_instance,
    to_canonical_json, IoError,
};
use thermsched::reductions::{gen_from_3partition, gen_from_n3dm, ReductionMeta};
use thermsched::render::{render_gantt_rows, role_labels, GanttFormat, GanttRow};
use thermsched::{
    check_reasonable, run_online, simulate, solve_optimal, validate_instance, BuiltinPolicy, Instance, OnlinePolicy,
    SolveError, SolveOptions,
};

#[derive(Parser)]
#[command(name = "thermsched", version, about = "Temperature-aware scheduling of unit jobs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance for structural errors.
    Validate { instance: PathBuf },
    /// Simulate a schedule and print the temperature trace.
    Simulate {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the maximum throughput and an optimal schedule.
    Opt {
        instance: PathBuf,
        /// Give up after this many search nodes.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an online policy.
    Online {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Policy::Coolest)]
        policy: Policy,
        /// Fail if the run idles needlessly or runs a dominated job.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a scheduling instance from a 3-Partition or N3DM source file.
    Reduce {
        #[arg(value_enum)]
        problem: Problem,
        source: PathBuf,
        /// Instance output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Role metadata output; defaults to `<out>.meta.json` when `--out` is set.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Play the two-branch lower-bound game against a policy.
    Adversary {
        #[arg(long, value_enum, default_value_t = Policy::Coolest)]
        policy: Policy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare policies with the optimum on seeded random instances.
    Experiment {
        /// Jobs per instance.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        release_span: u32,
        #[arg(long, default_value_t = 4)]
        max_window: u32,
        #[arg(long = "policy", value_enum, default_values_t = [Policy::Coolest, Policy::Edf])]
        policies: Vec<Policy>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw schedules as a Gantt chart.
    Render {
        instance: PathBuf,
        #[arg(required = true)]
        schedules: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Reduction metadata used to label jobs by role.
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Coolest,
    Edf,
    Idle,
}

impl From<Policy> for BuiltinPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Coolest => BuiltinPolicy::Coolest,
            Policy::Edf => BuiltinPolicy::Edf,
            Policy::Idle => BuiltinPolicy::Idle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    #[value(name = "3part")]
    ThreePartition,
    N3dm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    #[value(alias = "svg-like-vector")]
    Svg,
}

/// A result the command could compute but that signals failure, such as a
/// schedule with violations.
#[derive(Debug)]
struct DomainFailure(String);

impl std::fmt::Display for DomainFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DomainFailure {}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let instance = parse_instance(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let errors = validate_instance(&instance);
    if !errors.is_empty() {
        let list: Vec<String> = errors.iter().map(ToString::to_string).collect();
        bail!(DomainFailure(format!("{}: invalid instance: {}", path.display(), list.join("; "))));
    }
    Ok(instance)
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    write_output(out, &to_canonical_json(value))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { instance } => {
            let inst = load_instance(&instance)?;
            println!("ok: {} jobs, horizon {}", inst.len(), inst.horizon());
        }
        Command::Simulate { instance, schedule, out } => {
            let inst = load_instance(&instance)?;
            let sched = parse_schedule(&read_input(&schedule)?)
                .with_context(|| format!("parsing {}", schedule.display()))?;
            let trace = simulate(&inst, &sched);
            emit(out.as_deref(), &trace)?;
            if !trace.is_feasible() {
                bail!(DomainFailure(format!("schedule has {} violation(s)", trace.violations.len())));
            }
        }
        Command::Opt { instance, budget, out } => {
            let inst = load_instance(&instance)?;
            match solve_optimal(&inst, SolveOptions { node_budget: budget }) {
                Ok(result) => emit(out.as_deref(), &result)?,
                Err(SolveError::BudgetExceeded { budget, best }) => {
                    emit(out.as_deref(), &best)?;
                    bail!(DomainFailure(format!(
                        "node budget {budget} exhausted; best throughput found {} is a lower bound",
                        best.best_throughput
                    )));
                }
                Err(e) => bail!(DomainFailure(e.to_string())),
            }
        }
        Command::Online { instance, policy, check, out } => {
            let inst = load_instance(&instance)?;
            let run = run_online(&inst, &BuiltinPolicy::from(policy))?;
            emit(out.as_deref(), &run)?;
            if check {
                let bad = check_reasonable(&run);
                if !bad.is_empty() {
                    let list: Vec<String> = bad.iter().map(ToString::to_string).collect();
                    bail!(DomainFailure(format!("not reasonable: {}", list.join("; "))));
                }
            }
        }
        Command::Reduce { problem, source, out, meta } => {
            let text = read_input(&source)?;
            let (instance, roles) = match problem {
                Problem::ThreePartition => gen_from_3partition(&parse_3partition_source(&text)?)?,
                Problem::N3dm => gen_from_n3dm(&parse_n3dm_source(&text)?)?,
            };
            let meta_path = meta.or_else(|| {
                out.as_ref().map(|p| {
                    let mut name = p.as_os_str().to_owned();
                    name.push(".meta.json");
                    PathBuf::from(name)
                })
            });
            write_output(out.as_deref(), &serialize_instance(&instance))?;
            if let Some(path) = meta_path {
                write_output(Some(&path), &to_canonical_json(&roles))?;
            }
        }
        Command::Adversary { policy, out } => {
            let transcript = run_lower_bound_game(&BuiltinPolicy::from(policy))?;
            emit(out.as_deref(), &transcript)?;
        }
        Command::Experiment {
            n,
            count,
            seed,
            release_span,
            max_window,
            policies,
            budget,
            out,
        } => {
            let builtins: Vec<BuiltinPolicy> = policies.into_iter().map(BuiltinPolicy::from).collect();
            let refs: Vec<&(dyn OnlinePolicy + Sync)> =
                builtins.iter().map(|p| p as &(dyn OnlinePolicy + Sync)).collect();
            let model = RandomModel::new(n, release_span, max_window, seed);
            let report = ratio_experiment(&model, &refs, count, SolveOptions { node_budget: budget });
            emit(out.as_deref(), &report)?;
            let failures: usize = report.summaries.iter().map(|s| s.failures).sum();
            let counter = report.counterexample_count();
            if counter > 0 {
                bail!(DomainFailure(format!("{counter} counterexample record(s)")));
            }
            if failures > 0 {
                bail!(DomainFailure(format!("{failures} instance(s) not solved within the budget")));
            }
        }
        Command::Render {
            instance,
            schedules,
            format,
            meta,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let rows = schedules
                .iter()
                .map(|path| {
                    let sched = parse_schedule(&read_input(path)?)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    let name = path
                        .file_stem()
                        .map_or_else(|| "schedule".to_string(), |s| s.to_string_lossy().into_owned());
                    Ok(GanttRow::new(name, sched))
                })
                .collect::<Result<Vec<_>>>()?;
            let labels = match meta {
                Some(path) => {
                    let meta: ReductionMeta = from_json(&read_input(&path)?)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    Some(role_labels(&meta))
                }
                None => None,
            };
            let format = match format {
                Format::Text => GanttFormat::Text,
                Format::Svg => GanttFormat::Svg,
            };
            write_output(out.as_deref(), &render_gantt_rows(&inst, &rows, labels.as_ref(), format))?;
        }
    }
    Ok(())
}

/// 2 for unreadable or malformed input, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let malformed = err.chain().any(|cause| {
        cause.is::<io::Error>()
            || matches!(
                cause.downcast_ref::<IoError>(),
                Some(IoError::Parse { .. } | IoError::Source(_))
            )
    });
    if malformed {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
