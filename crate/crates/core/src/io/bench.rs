//! Benchmark and sensitivity-sweep harnesses. Both fan independent seeded
//! solver runs out across threads and reduce the results single-threaded.

use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kpi::KpiRow;
use crate::alns::run_alns;
use crate::config::{SolverConfig, Variant};
use crate::construct::initial_solution;
use crate::dynamic::{distance_traveled_by, replan, DemandEvent, ServiceLog};
use crate::network::{LinkId, MixedNetwork};
use crate::scalar::Scalar;

/// One line of the benchmark table: final objective of the best run, its
/// wall time, the 1-minute and 5-minute snapshots, the mean final
/// objective, and the fleet size.
#[derive(Clone, Debug)]
pub struct BenchRow<F> {
    pub variant: Variant,
    pub obj: F,
    pub t_s: f64,
    pub obj_1min: Option<F>,
    pub obj_5min: Option<F>,
    pub ave: F,
    pub num: usize,
}

impl<F: Scalar> BenchRow<F> {
    pub fn render_header() -> &'static str {
        "variant\tobj\tt_s\tobj_1min\tobj_5min\tave\tnum"
    }

    pub fn render(&self) -> String {
        let opt = |v: &Option<F>| match v {
            Some(x) => format!("{x}"),
            None => "-".to_string(),
        };
        format!(
            "{}\t{}\t{:.1}\t{}\t{}\t{}\t{}",
            self.variant.as_str(),
            self.obj,
            self.t_s,
            opt(&self.obj_1min),
            opt(&self.obj_5min),
            self.ave,
            self.num
        )
    }
}

struct RunResult<F> {
    objective: F,
    wall_ms: u128,
    obj_1min: Option<F>,
    obj_5min: Option<F>,
    fleet: usize,
}

fn one_run<F: Scalar>(
    net: &MixedNetwork<F>,
    demands: &[LinkId],
    cfg: &SolverConfig<F>,
    seed: u64,
) -> RunResult<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s0 = initial_solution(net, demands, cfg, &mut rng)
        .expect("benchmark instances must construct");
    let out = run_alns(&s0, net, cfg, &mut rng);
    let objective = out
        .best
        .evaluate(net, cfg)
        .expect("benchmark solutions evaluate")
        .total;
    let snap = |ms: u128| {
        if out.wall_ms < ms {
            None
        } else {
            out.objective_at_ms(ms)
        }
    };
    RunResult {
        objective,
        wall_ms: out.wall_ms,
        obj_1min: snap(60_000),
        obj_5min: snap(300_000),
        fleet: out.best.routes.len(),
    }
}

/// Runs `runs` seeded searches per variant (improved and plain) and
/// reduces each variant to one row. Seeds are `cfg.seed + run index`.
pub fn run_bench<F: Scalar>(
    net: &MixedNetwork<F>,
    demands: &[LinkId],
    cfg: &SolverConfig<F>,
    runs: usize,
) -> Vec<BenchRow<F>> {
    let mut rows = Vec::new();
    for variant in [Variant::Improved, Variant::Plain] {
        let mut vcfg = cfg.clone();
        vcfg.variant = variant;
        let results: Vec<RunResult<F>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..runs)
                .map(|i| {
                    let vcfg = &vcfg;
                    scope.spawn(move || one_run(net, demands, vcfg, vcfg.seed + i as u64))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("bench worker")).collect()
        });
        let best_idx = results
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.objective.partial_cmp(&b.1.objective).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        let best = &results[best_idx];
        let sum = results
            .iter()
            .fold(F::zero(), |acc, r| acc + r.objective);
        rows.push(BenchRow {
            variant,
            obj: best.objective,
            t_s: best.wall_ms as f64 / 1000.0,
            obj_1min: best.obj_1min,
            obj_5min: best.obj_5min,
            ave: sum / F::from_usize(results.len()),
            num: best.fleet,
        });
    }
    rows
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum SweepParam {
    ResponseTime,
    WindowLength,
}

impl std::str::FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "response_time" => Ok(SweepParam::ResponseTime),
            "window_length" => Ok(SweepParam::WindowLength),
            other => Err(format!("unknown sweep parameter `{other}`")),
        }
    }
}

/// Solves the fixed plan once, then re-plans the same event template at
/// every swept value, emitting one KPI row per value.
pub fn run_sweep<F: Scalar>(
    net: &MixedNetwork<F>,
    demands: &[LinkId],
    cfg: &SolverConfig<F>,
    event_template: &DemandEvent<F>,
    param: SweepParam,
    values: &[F],
) -> Vec<KpiRow<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let s0 = initial_solution(net, demands, cfg, &mut rng).expect("sweep instance constructs");
    let fixed = run_alns(&s0, net, cfg, &mut rng).best;

    let rows: Vec<KpiRow<F>> = thread::scope(|scope| {
        let handles: Vec<_> = values
            .iter()
            .map(|&value| {
                let fixed = &fixed;
                scope.spawn(move || {
                    let mut event = event_template.clone();
                    let mut vcfg = cfg.clone();
                    match param {
                        SweepParam::ResponseTime => event.receipt_time = value,
                        SweepParam::WindowLength => {
                            event.window_length = value;
                            vcfg.window_length = value;
                        }
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(vcfg.seed);
                    let out = replan(fixed, &event, &ServiceLog::new(), net, &vcfg, &mut rng)
                        .expect("sweep replan succeeds");
                    let detail = out
                        .solution
                        .evaluate_detail(net, &vcfg)
                        .expect("sweep solution evaluates");
                    let name = match param {
                        SweepParam::ResponseTime => format!("rt_{}", value),
                        SweepParam::WindowLength => format!("wl_{}", value),
                    };
                    KpiRow {
                        scenario: name,
                        response_time: event.receipt_time,
                        window_length: event.window_length,
                        service_m: detail.breakdown.service_distance,
                        deadhead_m: detail.breakdown.deadhead_distance,
                        penalty: detail.breakdown.window_penalty,
                        work_spread_min: detail.spread,
                        wall_ms: out.alns.wall_ms,
                        iterations: out.alns.iterations,
                        pre_adjust_m: distance_traveled_by(fixed, net, &vcfg, event.receipt_time),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker")).collect()
    });
    rows
}
