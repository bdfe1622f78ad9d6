//! Plan documents: the emitted routing plan with enough context (config
//! echo, windows, anchors, budgets) to re-load, re-evaluate and audit it.

use super::config_fmt::{apply_config_kv, config_lines};
use super::{expect_header, parse_int, parse_scalar, tokenize, ParseError};
use crate::config::SolverConfig;
use crate::network::{LinkId, MixedNetwork};
use crate::scalar::Scalar;
use crate::solution::{
    Direction, ObjectiveBreakdown, Route, ServiceTask, Solution, Stage, Windows,
};

#[derive(Clone, Debug, PartialEq)]
pub struct PlanTask<F> {
    pub link: LinkId,
    pub reverse: bool,
    pub start_min: F,
    pub end_min: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanRoute<F> {
    pub vehicle: usize,
    pub depot_label: u64,
    pub capacity: F,
    pub service_m: F,
    pub deadhead_m: F,
    pub work_min: F,
    pub anchor_label: Option<u64>,
    pub offset_min: F,
    pub tasks: Vec<PlanTask<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanDocument<F> {
    pub stage: Stage,
    pub config: SolverConfig<F>,
    pub solver_version: String,
    pub iterations: u64,
    pub wall_ms: u128,
    pub objective: ObjectiveBreakdown<F>,
    pub windows: Vec<(LinkId, F, F)>,
    pub routes: Vec<PlanRoute<F>>,
}

#[derive(Copy, Clone, Debug, Default)]
pub struct RunMeta {
    pub iterations: u64,
    /// Emitted as given; pass 0 unless timing output was requested, so
    /// identical runs stay byte-identical.
    pub wall_ms: u128,
}

/// Derives the document from a solved solution.
pub fn plan_document<F: Scalar>(
    sol: &Solution<F>,
    breakdown: &ObjectiveBreakdown<F>,
    cfg: &SolverConfig<F>,
    net: &MixedNetwork<F>,
    meta: RunMeta,
) -> PlanDocument<F> {
    let v_r = cfg.v_service();
    let routes = sol
        .routes
        .iter()
        .map(|r| PlanRoute {
            vehicle: r.vehicle,
            depot_label: net.node_label(r.depot),
            capacity: r.capacity,
            service_m: r.service_distance,
            deadhead_m: r.deadhead_distance,
            work_min: r.work_time,
            anchor_label: r.anchor.map(|a| net.node_label(a)),
            offset_min: r.start_offset,
            tasks: r
                .tasks
                .iter()
                .zip(&r.start_times)
                .map(|(t, &start)| PlanTask {
                    link: t.link,
                    reverse: t.direction == Direction::Reverse,
                    start_min: start,
                    end_min: start + net.link(t.link).length / v_r,
                })
                .collect(),
        })
        .collect();
    PlanDocument {
        stage: sol.stage,
        config: cfg.clone(),
        solver_version: env!("CARGO_PKG_VERSION").to_string(),
        iterations: meta.iterations,
        wall_ms: meta.wall_ms,
        objective: *breakdown,
        windows: sol.windows.iter().map(|(&l, &(a, b))| (l, a, b)).collect(),
        routes,
    }
}

pub fn emit_plan<F: Scalar>(doc: &PlanDocument<F>) -> String {
    let mut out = String::from("sprinkler-plan v1\n");
    out.push_str(&format!(
        "stage {}\n",
        match doc.stage {
            Stage::Fixed => "fixed",
            Stage::Replan => "replan",
        }
    ));
    out.push_str(&format!("solver {}\n", doc.solver_version));
    out.push_str(&format!("iterations {}\n", doc.iterations));
    out.push_str(&format!("wall_ms {}\n", doc.wall_ms));
    out.push_str(&format!("objective {}\n", doc.objective.total));
    out.push_str(&format!("service_m {}\n", doc.objective.service_distance));
    out.push_str(&format!("deadhead_m {}\n", doc.objective.deadhead_distance));
    out.push_str(&format!("window_penalty {}\n", doc.objective.window_penalty));
    for line in config_lines(&doc.config) {
        out.push_str("config ");
        out.push_str(&line);
        out.push('\n');
    }
    for &(link, a, b) in &doc.windows {
        out.push_str(&format!("window {} {} {}\n", link.0, a, b));
    }
    for r in &doc.routes {
        out.push_str(&format!(
            "route {} depot {} capacity {} service {} deadhead {} work {}",
            r.vehicle, r.depot_label, r.capacity, r.service_m, r.deadhead_m, r.work_min
        ));
        if let Some(anchor) = r.anchor_label {
            out.push_str(&format!(" anchor {} offset {}", anchor, r.offset_min));
        }
        out.push('\n');
        for t in &r.tasks {
            let dir = if t.reverse { "rev" } else { "fwd" };
            out.push_str(&format!("task {} {} {} {}\n", t.link.0, dir, t.start_min, t.end_min));
        }
    }
    out
}

pub fn parse_plan<F: Scalar>(text: &str) -> Result<PlanDocument<F>, ParseError> {
    let lines = tokenize(text);
    expect_header(&lines, "sprinkler-plan")?;
    let mut doc = PlanDocument {
        stage: Stage::Fixed,
        config: SolverConfig::default(),
        solver_version: String::new(),
        iterations: 0,
        wall_ms: 0,
        objective: ObjectiveBreakdown::zero(),
        windows: Vec::new(),
        routes: Vec::new(),
    };
    for (n, toks) in lines.iter().skip(1) {
        let n = *n;
        match toks[0] {
            "stage" if toks.len() == 2 => {
                doc.stage = match toks[1] {
                    "fixed" => Stage::Fixed,
                    "replan" => Stage::Replan,
                    other => return Err(ParseError::at(n, format!("unknown stage `{other}`"))),
                }
            }
            "solver" if toks.len() == 2 => doc.solver_version = toks[1].to_string(),
            "iterations" if toks.len() == 2 => doc.iterations = parse_int(toks[1], n)?,
            "wall_ms" if toks.len() == 2 => doc.wall_ms = parse_int(toks[1], n)?,
            "objective" if toks.len() == 2 => doc.objective.total = parse_scalar(toks[1], n)?,
            "service_m" if toks.len() == 2 => {
                doc.objective.service_distance = parse_scalar(toks[1], n)?
            }
            "deadhead_m" if toks.len() == 2 => {
                doc.objective.deadhead_distance = parse_scalar(toks[1], n)?
            }
            "window_penalty" if toks.len() == 2 => {
                doc.objective.window_penalty = parse_scalar(toks[1], n)?
            }
            "config" if toks.len() == 3 => {
                apply_config_kv(&mut doc.config, toks[1], toks[2], n)?
            }
            "window" if toks.len() == 4 => doc.windows.push((
                LinkId(parse_int(toks[1], n)?),
                parse_scalar(toks[2], n)?,
                parse_scalar(toks[3], n)?,
            )),
            "route" => {
                let mut route = PlanRoute {
                    vehicle: parse_int(toks[1], n)?,
                    depot_label: 0,
                    capacity: F::zero(),
                    service_m: F::zero(),
                    deadhead_m: F::zero(),
                    work_min: F::zero(),
                    anchor_label: None,
                    offset_min: F::zero(),
                    tasks: Vec::new(),
                };
                let mut i = 2;
                while i < toks.len() {
                    let key = toks[i];
                    let val = *toks
                        .get(i + 1)
                        .ok_or_else(|| ParseError::at(n, format!("missing value for `{key}`")))?;
                    match key {
                        "depot" => route.depot_label = parse_int(val, n)?,
                        "capacity" => route.capacity = parse_scalar(val, n)?,
                        "service" => route.service_m = parse_scalar(val, n)?,
                        "deadhead" => route.deadhead_m = parse_scalar(val, n)?,
                        "work" => route.work_min = parse_scalar(val, n)?,
                        "anchor" => route.anchor_label = Some(parse_int(val, n)?),
                        "offset" => route.offset_min = parse_scalar(val, n)?,
                        other => {
                            return Err(ParseError::at(n, format!("unknown route field `{other}`")))
                        }
                    }
                    i += 2;
                }
                doc.routes.push(route);
            }
            "task" if toks.len() == 5 => {
                let route = doc
                    .routes
                    .last_mut()
                    .ok_or_else(|| ParseError::at(n, "task before any route"))?;
                let reverse = match toks[2] {
                    "fwd" => false,
                    "rev" => true,
                    other => return Err(ParseError::at(n, format!("bad direction `{other}`"))),
                };
                route.tasks.push(PlanTask {
                    link: LinkId(parse_int(toks[1], n)?),
                    reverse,
                    start_min: parse_scalar(toks[3], n)?,
                    end_min: parse_scalar(toks[4], n)?,
                });
            }
            other => return Err(ParseError::at(n, format!("unexpected `{other}` in plan document"))),
        }
    }
    Ok(doc)
}

/// Rebuilds an in-memory solution from a document against its network.
pub fn solution_from_plan<F: Scalar>(
    doc: &PlanDocument<F>,
    net: &MixedNetwork<F>,
) -> Result<Solution<F>, ParseError> {
    let mut windows = Windows::new();
    for &(l, a, b) in &doc.windows {
        windows.insert(l, (a, b));
    }
    let mut routes = Vec::with_capacity(doc.routes.len());
    for r in &doc.routes {
        let depot = net
            .node_by_label(r.depot_label)
            .ok_or_else(|| ParseError::at(0, format!("unknown depot node {}", r.depot_label)))?;
        let mut route = Route::new(r.vehicle, depot, r.capacity);
        route.start_offset = r.offset_min;
        route.anchor = match r.anchor_label {
            None => None,
            Some(label) => Some(
                net.node_by_label(label)
                    .ok_or_else(|| ParseError::at(0, format!("unknown anchor node {label}")))?,
            ),
        };
        for t in &r.tasks {
            if t.link.idx() >= net.links().len() {
                return Err(ParseError::at(0, format!("unknown link {}", t.link)));
            }
            route.tasks.push(ServiceTask {
                link: t.link,
                direction: if t.reverse { Direction::Reverse } else { Direction::Forward },
            });
        }
        routes.push(route);
    }
    let mut sol = Solution::new(doc.stage, routes);
    sol.windows = windows;
    Ok(sol)
}
