//! `sprinkler` — plan fixed sprinkling routes, re-plan them when live
//! demands arrive, and benchmark the solver variants.
//!
//! Exit codes: 0 success, 2 parse/input error, 3 infeasible, 4 internal.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sprinkler_solver::construct::ConstructError;
use sprinkler_solver::dynamic::{replan, ServiceLog};
use sprinkler_solver::io::{
    emit_demands, emit_kpis, emit_network, generate_grid_instance,
    parse_config, parse_demands, parse_events, parse_network, parse_plan, plan_document,
    run_bench, run_sweep, solution_from_plan, BenchRow, GridParams, KpiRow, RunMeta, SweepParam,
};
use sprinkler_solver::verify::{audit_solution, brute_force_optimum, OracleError};
use sprinkler_solver::{
    build_network, fleet_size, initial_solution, run_alns, ConfigF64, DemandEventF64, LinkId,
    NetworkF64, Stage, Variant,
};

#[derive(Parser)]
#[command(name = "sprinkler", version, about = "Street-sprinkler fleet route planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Network document
    #[arg(long)]
    network: PathBuf,
    /// Demand-set document
    #[arg(long)]
    demands: PathBuf,
    /// Config document (defaults apply when omitted)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's variant (improved|plain)
    #[arg(long)]
    variant: Option<Variant>,
    /// Wall-clock cutoff per search, seconds (breaks determinism)
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic grid instance
    Gen {
        #[arg(long, default_value_t = 10)]
        rows: usize,
        #[arg(long, default_value_t = 10)]
        cols: usize,
        #[arg(long, default_value_t = 100.0)]
        edge_len: f64,
        #[arg(long, default_value_t = 0.7)]
        demand_frac: f64,
        #[arg(long, default_value_t = 0.3)]
        arc_frac: f64,
        #[arg(long, default_value_t = 2)]
        depots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix: writes <out>.network and <out>.demands
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan fixed routes for the demand set
    Plan {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Plan document output (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append a KPI row here
        #[arg(long)]
        kpi: Option<PathBuf>,
        /// Iteration trace output
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Record measured wall time in the document (breaks byte
        /// determinism across runs)
        #[arg(long)]
        timing: bool,
    },
    /// Re-plan an existing plan against incoming demand events
    Replan {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Plan document to adjust
        #[arg(long)]
        plan: PathBuf,
        /// Events document
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-planning report output (stdout when omitted)
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        kpi: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
    /// Replay a plan document and verify its feasibility and objective
    Simulate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        plan: PathBuf,
    },
    /// KPI table across a swept parameter
    Sweep {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Events document; the first event is the template
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        sweep_param: SweepParamArg,
        /// Comma-separated values, e.g. 20,30,40
        #[arg(long)]
        sweep_values: String,
        #[arg(long)]
        kpi: Option<PathBuf>,
    },
    /// Improved-vs-plain benchmark over seeded runs
    Bench {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long)]
        kpi: Option<PathBuf>,
    },
    /// Exhaustive optimum for tiny instances (test harness hook)
    #[command(hide = true)]
    Brute {
        #[command(flatten)]
        instance: InstanceArgs,
    },
}

#[derive(Copy, Clone, clap::ValueEnum)]
enum SweepParamArg {
    ResponseTime,
    WindowLength,
}

impl From<SweepParamArg> for SweepParam {
    fn from(v: SweepParamArg) -> Self {
        match v {
            SweepParamArg::ResponseTime => SweepParam::ResponseTime,
            SweepParamArg::WindowLength => SweepParam::WindowLength,
        }
    }
}

enum CliError {
    Parse(String),
    Infeasible(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Infeasible(m) | CliError::Internal(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_out(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Instance {
    net: NetworkF64,
    demand_ids: Vec<LinkId>,
    cfg: ConfigF64,
}

fn load_instance(args: &InstanceArgs) -> Result<Instance, CliError> {
    let spec = parse_network::<f64>(&read(&args.network)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.network.display())))?;
    let demands = parse_demands(&read(&args.demands)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.demands.display())))?;
    let net = build_network(&spec, &demands)
        .map_err(|e| CliError::Parse(format!("network validation: {e}")))?;
    let mut cfg: ConfigF64 = match &args.config {
        Some(p) => parse_config(&read(p)?)
            .map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?,
        None => ConfigF64::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(variant) = args.variant {
        cfg.variant = variant;
    }
    if let Some(limit) = args.time_limit {
        cfg.time_limit_s = Some(limit);
    }
    let demand_ids = net.demand_links().map(|l| l.id).collect();
    Ok(Instance { net, demand_ids, cfg })
}

fn solve_error(e: ConstructError) -> CliError {
    CliError::Infeasible(format!("construction: {e}"))
}

fn kpi_append(path: &Path, rows: &[KpiRow<f64>]) -> Result<(), CliError> {
    write_out(path, &emit_kpis(rows))
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { rows, cols, edge_len, demand_frac, arc_frac, depots, seed, out } => {
            let params = GridParams {
                rows,
                cols,
                edge_len,
                demand_frac,
                arc_frac,
                n_depots: depots,
                seed,
            };
            let (spec, demands) = generate_grid_instance::<f64>(&params)
                .map_err(|e| CliError::Parse(format!("generator: {e}")))?;
            let net_path = out.with_extension("network");
            let dem_path = out.with_extension("demands");
            write_out(&net_path, &emit_network(&spec))?;
            write_out(&dem_path, &emit_demands(&demands))?;
            println!(
                "wrote {} ({} nodes, {} links) and {} ({} demand links)",
                net_path.display(),
                spec.nodes.len(),
                spec.links.len(),
                dem_path.display(),
                demands.len()
            );
            Ok(())
        }
        Command::Plan { instance, out, kpi, trace, timing } => {
            let inst = load_instance(&instance)?;
            let started = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(inst.cfg.seed);
            let s0 = initial_solution(&inst.net, &inst.demand_ids, &inst.cfg, &mut rng)
                .map_err(solve_error)?;
            let outcome = run_alns(&s0, &inst.net, &inst.cfg, &mut rng);
            let wall_ms = started.elapsed().as_millis();
            let breakdown = outcome
                .best
                .evaluate(&inst.net, &inst.cfg)
                .map_err(|e| CliError::Internal(format!("evaluation: {e}")))?;
            let doc = plan_document(
                &outcome.best,
                &breakdown,
                &inst.cfg,
                &inst.net,
                RunMeta {
                    iterations: outcome.iterations,
                    wall_ms: if timing { wall_ms } else { 0 },
                },
            );
            emit(out.as_deref(), &sprinkler_solver::io::emit_plan(&doc))?;
            if let Some(p) = trace {
                let mut text = String::new();
                for row in &outcome.trace {
                    let _ = writeln!(text, "{}", row.render());
                }
                write_out(&p, &text)?;
            }
            if let Some(p) = kpi {
                let detail = outcome.best.evaluate_detail(&inst.net, &inst.cfg).unwrap();
                kpi_append(
                    &p,
                    &[KpiRow {
                        scenario: "fixed".into(),
                        response_time: 0.0,
                        window_length: 0.0,
                        service_m: detail.breakdown.service_distance,
                        deadhead_m: detail.breakdown.deadhead_distance,
                        penalty: detail.breakdown.window_penalty,
                        work_spread_min: detail.spread,
                        wall_ms,
                        iterations: outcome.iterations,
                        pre_adjust_m: 0.0,
                    }],
                )?;
            }
            Ok(())
        }
        Command::Replan { instance, plan, events, out, report, kpi, trace, timing } => {
            let inst = load_instance(&instance)?;
            let doc = parse_plan::<f64>(&read(&plan)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", plan.display())))?;
            let mut current = solution_from_plan(&doc, &inst.net)
                .map_err(|e| CliError::Parse(format!("{}: {e}", plan.display())))?;
            current.recompute_all(&inst.net, &inst.cfg);
            let events: Vec<DemandEventF64> = parse_events(&read(&events)?)
                .map_err(|e| CliError::Parse(format!("events: {e}")))?;
            if events.is_empty() {
                return Err(CliError::Parse("events document holds no events".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(inst.cfg.seed);
            let mut history = ServiceLog::new();
            let mut reports = String::new();
            let mut kpi_rows = Vec::new();
            let mut last_outcome = None;
            let started = Instant::now();
            for (i, event) in events.iter().enumerate() {
                let outcome = replan(&current, event, &history, &inst.net, &inst.cfg, &mut rng)
                    .map_err(|e| CliError::Infeasible(format!("event {i}: {e}")))?;
                reports.push_str(&outcome.report.render());
                history = outcome.log.clone();
                current = outcome.solution.clone();
                let detail = current.evaluate_detail(&inst.net, &inst.cfg).unwrap();
                kpi_rows.push(KpiRow {
                    scenario: format!("event{i}"),
                    response_time: event.receipt_time,
                    window_length: event.window_length,
                    service_m: detail.breakdown.service_distance,
                    deadhead_m: detail.breakdown.deadhead_distance,
                    penalty: detail.breakdown.window_penalty,
                    work_spread_min: detail.spread,
                    wall_ms: outcome.alns.wall_ms,
                    iterations: outcome.alns.iterations,
                    pre_adjust_m: 0.0,
                });
                last_outcome = Some(outcome);
            }
            let wall_ms = started.elapsed().as_millis();
            let breakdown = current
                .evaluate(&inst.net, &inst.cfg)
                .map_err(|e| CliError::Internal(format!("evaluation: {e}")))?;
            let last = last_outcome.expect("at least one event processed");
            let final_doc = plan_document(
                &current,
                &breakdown,
                &inst.cfg,
                &inst.net,
                RunMeta {
                    iterations: last.alns.iterations,
                    wall_ms: if timing { wall_ms } else { 0 },
                },
            );
            emit(out.as_deref(), &sprinkler_solver::io::emit_plan(&final_doc))?;
            emit(report.as_deref(), &reports)?;
            if let Some(p) = trace {
                let mut text = String::new();
                for row in &last.alns.trace {
                    let _ = writeln!(text, "{}", row.render());
                }
                write_out(&p, &text)?;
            }
            if let Some(p) = kpi {
                kpi_append(&p, &kpi_rows)?;
            }
            Ok(())
        }
        Command::Simulate { instance, plan } => {
            let inst = load_instance(&instance)?;
            let doc = parse_plan::<f64>(&read(&plan)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", plan.display())))?;
            let mut sol = solution_from_plan(&doc, &inst.net)
                .map_err(|e| CliError::Parse(format!("{}: {e}", plan.display())))?;
            sol.recompute_all(&inst.net, &inst.cfg);
            // a fixed plan must cover the whole demand set; a re-planned
            // document is checked against its own task set
            let demand_set: std::collections::BTreeSet<LinkId> = match doc.stage {
                Stage::Fixed => inst.demand_ids.iter().copied().collect(),
                Stage::Replan => sol.task_positions().map(|(_, _, t)| t.link).collect(),
            };
            let audit = audit_solution(&sol, &inst.net, &inst.cfg, &demand_set);
            let restated = (audit.evaluated_total - doc.objective.total).abs();
            println!(
                "objective stated {} recomputed {} (diff {:.2e}); independent re-derivation diff {:.2e}",
                doc.objective.total,
                audit.evaluated_total,
                restated,
                (audit.evaluated_total - audit.independent_total).abs(),
            );
            for v in &audit.violations {
                println!("violation: {v}");
            }
            if !audit.passed || restated > 1e-6 {
                return Err(CliError::Infeasible(format!(
                    "{} violations, objective diff {restated:.2e}",
                    audit.violations.len()
                )));
            }
            println!("plan verified: timing and feasibility consistent");
            Ok(())
        }
        Command::Sweep { instance, events, sweep_param, sweep_values, kpi } => {
            let inst = load_instance(&instance)?;
            let events: Vec<DemandEventF64> = parse_events(&read(&events)?)
                .map_err(|e| CliError::Parse(format!("events: {e}")))?;
            let template = events
                .first()
                .ok_or_else(|| CliError::Parse("events document holds no events".into()))?;
            let values: Vec<f64> = sweep_values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Parse(format!("bad sweep value `{v}`")))
                })
                .collect::<Result<_, _>>()?;
            let rows = run_sweep(
                &inst.net,
                &inst.demand_ids,
                &inst.cfg,
                template,
                sweep_param.into(),
                &values,
            );
            let text = emit_kpis(&rows);
            match kpi {
                Some(p) => write_out(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Bench { instance, runs, kpi } => {
            let inst = load_instance(&instance)?;
            let rows = run_bench(&inst.net, &inst.demand_ids, &inst.cfg, runs.max(1));
            let mut text = String::from(BenchRow::<f64>::render_header());
            text.push('\n');
            for r in &rows {
                text.push_str(&r.render());
                text.push('\n');
            }
            print!("{text}");
            if let Some(p) = kpi {
                write_out(&p, &text)?;
            }
            Ok(())
        }
        Command::Brute { instance } => {
            let inst = load_instance(&instance)?;
            let total: f64 = inst
                .demand_ids
                .iter()
                .map(|&l| inst.net.service_demand(l))
                .sum();
            let m = fleet_size(total, inst.cfg.capacity);
            match brute_force_optimum(&inst.net, &inst.demand_ids, m, &inst.cfg) {
                Ok(best) => {
                    println!("optimum {} vehicles {m}", best.objective);
                    Ok(())
                }
                Err(OracleError::Infeasible) => {
                    Err(CliError::Infeasible("no feasible assignment".into()))
                }
                Err(e @ OracleError::TooLarge(_)) => Err(CliError::Internal(e.to_string())),
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
