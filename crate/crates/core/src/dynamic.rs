//! Mid-operation re-planning: replay the running plan to the event time,
//! classify the incoming demand links, budget them against the fleet's
//! remaining water, rebuild the routes from the vehicles' current
//! positions, and re-optimize under the windowed objective.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::alns::{run_alns, AlnsOutcome};
use crate::config::SolverConfig;
use crate::network::{LinkId, LinkKind, MixedNetwork, NodeId};
use crate::operators::{repair_time_window, RepairError};
use crate::scalar::Scalar;
use crate::solution::{walk_route, Route, ServiceTask, Solution, Stage, Windows};

/// A timed batch of demand links that must be sprinkled within a window
/// of `window_length` minutes from receipt.
#[derive(Clone, Debug)]
pub struct DemandEvent<F> {
    pub receipt_time: F,
    pub links: Vec<LinkId>,
    pub window_length: F,
}

/// Where one vehicle stands at the event time: committed work counts as
/// done (a sprinkler finishes the street it is on before diverting).
#[derive(Clone, Debug)]
pub struct VehicleState<F> {
    pub vehicle: usize,
    pub depot: NodeId,
    pub position: NodeId,
    pub remaining_water: F,
    pub served: Vec<ServiceTask>,
    pub pending: Vec<ServiceTask>,
    /// Minutes on the clock when the vehicle can leave `position`.
    pub available_at: F,
}

/// Completion times of everything sprinkled so far, across plans.
#[derive(Clone, Debug, Default)]
pub struct ServiceLog<F> {
    last_served: BTreeMap<LinkId, F>,
}

impl<F: Scalar> ServiceLog<F> {
    pub fn new() -> Self {
        ServiceLog { last_served: BTreeMap::new() }
    }

    pub fn last(&self, link: LinkId) -> Option<F> {
        self.last_served.get(&link).copied()
    }

    pub fn record(&mut self, link: LinkId, completed_at: F) {
        let slot = self.last_served.entry(link).or_insert(completed_at);
        if completed_at > *slot {
            *slot = completed_at;
        }
    }

    pub fn merge(&mut self, other: &ServiceLog<F>) {
        for (&l, &t) in &other.last_served {
            self.record(l, t);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// In the current plan, not yet served: service moves forward.
    pub bring_forward: Vec<LinkId>,
    /// Sprinkled within the recency horizon: nothing to do.
    pub skip_recent: Vec<LinkId>,
    /// Sprinkled long ago or not planned at all: serve as soon as water
    /// allows.
    pub must_add: Vec<LinkId>,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DynamicError {
    #[error("event references unknown link {0}")]
    UnknownLink(LinkId),
    #[error("re-planning repair failed: {0}")]
    Repair(#[from] RepairError),
}

/// Simulates every route up to minute `t`. In-progress tasks commit: the
/// vehicle finishes them (position and availability reflect that), and the
/// water they need is spent.
pub fn project_state<F: Scalar>(
    sol: &Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    t: F,
) -> (Vec<VehicleState<F>>, ServiceLog<F>) {
    let mut states = Vec::with_capacity(sol.routes.len());
    let mut log = ServiceLog::new();
    let t_eps = F::feas_eps(t);
    for route in &sol.routes {
        let walk = walk_route(
            route.origin(),
            route.depot,
            route.start_offset,
            route.anchor.is_some(),
            &route.tasks,
            net,
            cfg,
            &sol.windows,
        );
        let v_r = cfg.v_service();
        let mut served = Vec::new();
        let mut pending = Vec::new();
        let mut position = route.origin();
        let mut available = t;
        let mut water_used = F::zero();
        let mut last_completion = None;
        for (i, task) in route.tasks.iter().enumerate() {
            let start = walk.start_times[i];
            let completion = start + net.link(task.link).length / v_r;
            if completion <= t + t_eps {
                served.push(*task);
                log.record(task.link, completion);
                water_used += net.service_demand(task.link);
                position = task.end_node(net);
                last_completion = Some(completion);
            } else if start <= t + t_eps {
                // in progress: commit it
                served.push(*task);
                log.record(task.link, completion);
                water_used += net.service_demand(task.link);
                position = task.end_node(net);
                available = completion;
                last_completion = Some(completion);
            } else {
                pending.extend_from_slice(&route.tasks[i..]);
                break;
            }
        }
        if pending.is_empty() {
            // full route done; back at the depot once the return leg ends
            if let Some(c) = last_completion {
                let home = c + net.dist(position, route.depot) / cfg.v_deadhead();
                if t + t_eps >= home {
                    position = route.depot;
                }
            } else if route.tasks.is_empty() && route.anchor.is_none() {
                position = route.depot;
            }
        }
        states.push(VehicleState {
            vehicle: route.vehicle,
            depot: route.depot,
            position,
            remaining_water: route.capacity - water_used,
            served,
            pending,
            available_at: available,
        });
    }
    (states, log)
}

/// Total meters driven (service plus deadhead) by minute `t`, across the
/// fleet. Waiting time accrues no distance.
pub fn distance_traveled_by<F: Scalar>(
    sol: &Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    t: F,
) -> F {
    let v_r = cfg.v_service();
    let v_n = cfg.v_deadhead();
    let mut total = F::zero();
    let mut leg = |start: F, length: F, speed: F| {
        if length <= F::zero() {
            return;
        }
        let end = start + length / speed;
        if end <= t {
            total += length;
        } else if start < t {
            total += speed * (t - start);
        }
    };
    for route in &sol.routes {
        let mut clock = route.start_offset;
        let mut at = route.origin();
        for task in &route.tasks {
            let gap = net.dist(at, task.start_node(net));
            leg(clock, gap, v_n);
            clock += gap / v_n;
            if let Some(&(a, _)) = sol.windows.get(&task.link) {
                if clock < a {
                    clock = a;
                }
            }
            let len = net.link(task.link).length;
            leg(clock, len, v_r);
            clock += len / v_r;
            at = task.end_node(net);
        }
        if !route.tasks.is_empty() || route.anchor.is_some() {
            let home = net.dist(at, route.depot);
            leg(clock, home, v_n);
        }
    }
    total
}

/// Splits the event links into bring-forward / skip-recent / must-add. A
/// link served within `cfg.recency` minutes before receipt does not need
/// service again; anything served longer ago, or never planned, does.
pub fn classify_new_demands<F: Scalar>(
    event: &DemandEvent<F>,
    states: &[VehicleState<F>],
    log: &ServiceLog<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Result<Classification, DynamicError> {
    let pending: BTreeSet<LinkId> = states
        .iter()
        .flat_map(|s| s.pending.iter().map(|t| t.link))
        .collect();
    let mut links: Vec<LinkId> = event.links.clone();
    links.sort();
    links.dedup();
    let mut out = Classification {
        bring_forward: Vec::new(),
        skip_recent: Vec::new(),
        must_add: Vec::new(),
    };
    for link in links {
        if link.idx() >= net.links().len()
            || net.link(link).kind == LinkKind::VirtualDepot
        {
            return Err(DynamicError::UnknownLink(link));
        }
        if pending.contains(&link) {
            out.bring_forward.push(link);
        } else {
            match log.last(link) {
                Some(tc) if event.receipt_time - tc <= cfg.recency + F::feas_eps(cfg.recency) => {
                    out.skip_recent.push(link)
                }
                _ => out.must_add.push(link),
            }
        }
    }
    Ok(out)
}

/// Admits must-add links against the fleet's spare water after the still
/// pending plan is paid for. With enough surplus everything goes in;
/// otherwise a uniform random subset that fits.
pub fn select_addable<F: Scalar>(
    must_add: &[LinkId],
    states: &[VehicleState<F>],
    net: &MixedNetwork<F>,
    rng: &mut impl Rng,
) -> Vec<LinkId> {
    let remaining: F = states
        .iter()
        .fold(F::zero(), |acc, s| acc + s.remaining_water);
    let reserved: F = states
        .iter()
        .flat_map(|s| s.pending.iter())
        .fold(F::zero(), |acc, t| acc + net.service_demand(t.link));
    let mut surplus = remaining - reserved;
    let need: F = must_add
        .iter()
        .fold(F::zero(), |acc, &l| acc + net.service_demand(l));
    let mut links: Vec<LinkId> = must_add.to_vec();
    links.sort();
    if need <= surplus + F::feas_eps(surplus) {
        return links;
    }
    // random subset that fits the surplus
    for i in (1..links.len()).rev() {
        let j = rng.random_range(0..=i);
        links.swap(i, j);
    }
    let mut chosen = Vec::new();
    for link in links {
        let d = net.service_demand(link);
        if d <= surplus + F::feas_eps(surplus) {
            surplus -= d;
            chosen.push(link);
        }
    }
    chosen.sort();
    chosen
}

/// The dynamic starting solution: routes re-anchored at the vehicles'
/// positions with their remaining water as budget, windowed links stripped
/// and re-inserted by the window-aware repair.
pub fn build_replan_base<F: Scalar>(
    states: &[VehicleState<F>],
    added: &[LinkId],
    bring_forward: &[LinkId],
    event: &DemandEvent<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Result<Solution<F>, DynamicError> {
    let windowed: BTreeSet<LinkId> = added.iter().chain(bring_forward).copied().collect();
    let mut windows = Windows::new();
    for &l in &windowed {
        windows.insert(l, (event.receipt_time, event.receipt_time + event.window_length));
    }
    let mut routes = Vec::with_capacity(states.len());
    let mut removed: Vec<ServiceTask> = Vec::new();
    for state in states {
        let mut route = Route::new(state.vehicle, state.depot, state.remaining_water);
        route.anchor = Some(state.position);
        route.start_offset = state.available_at;
        for task in &state.pending {
            if windowed.contains(&task.link) {
                removed.push(ServiceTask::forward(task.link));
            } else {
                route.tasks.push(*task);
            }
        }
        route.recompute(net, cfg, &windows);
        routes.push(route);
    }
    for &l in added {
        removed.push(ServiceTask::forward(l));
    }
    let mut base = Solution::new(Stage::Replan, routes);
    base.windows = windows;
    base.recompute_all(net, cfg);
    let base = repair_time_window(base, removed, net, cfg)?;
    Ok(base)
}

#[derive(Clone, Debug)]
pub struct ReplanReport<F> {
    pub receipt_time: F,
    pub n_bring_forward: usize,
    pub n_skip_recent: usize,
    pub n_must_add: usize,
    pub added: Vec<LinkId>,
    pub water_surplus: F,
    pub objective_before: F,
    pub objective_after: F,
}

impl<F: Scalar> ReplanReport<F> {
    pub fn render(&self) -> String {
        let added: Vec<String> = self.added.iter().map(|l| l.to_string()).collect();
        format!(
            "replan at {} min\n  bring_forward {}\n  skip_recent {}\n  must_add {}\n  added [{}]\n  water_surplus {}\n  objective_before {}\n  objective_after {}\n",
            self.receipt_time,
            self.n_bring_forward,
            self.n_skip_recent,
            self.n_must_add,
            added.join(" "),
            self.water_surplus,
            self.objective_before,
            self.objective_after,
        )
    }
}

#[derive(Clone, Debug)]
pub struct ReplanOutcome<F> {
    pub solution: Solution<F>,
    pub report: ReplanReport<F>,
    pub alns: AlnsOutcome<F>,
    /// Service history including everything completed before this event.
    pub log: ServiceLog<F>,
}

/// Full pipeline: project, classify, budget, rebuild, re-optimize.
/// `history` carries completions from earlier cycles so recency checks see
/// more than the current plan.
pub fn replan<F: Scalar>(
    sol: &Solution<F>,
    event: &DemandEvent<F>,
    history: &ServiceLog<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    rng: &mut impl Rng,
) -> Result<ReplanOutcome<F>, DynamicError> {
    let (states, mut log) = project_state(sol, net, cfg, event.receipt_time);
    log.merge(history);
    let class = classify_new_demands(event, &states, &log, net, cfg)?;
    let added = select_addable(&class.must_add, &states, net, rng);
    let base = build_replan_base(&states, &added, &class.bring_forward, event, net, cfg)?;
    let objective_before = base
        .evaluate(net, cfg)
        .expect("re-plan base evaluates")
        .total;
    let remaining: F = states.iter().fold(F::zero(), |a, s| a + s.remaining_water);
    let reserved: F = states
        .iter()
        .flat_map(|s| s.pending.iter())
        .fold(F::zero(), |acc, t| acc + net.service_demand(t.link));
    let alns = run_alns(&base, net, cfg, rng);
    let objective_after = alns
        .best
        .evaluate(net, cfg)
        .expect("re-planned solution evaluates")
        .total;
    Ok(ReplanOutcome {
        solution: alns.best.clone(),
        report: ReplanReport {
            receipt_time: event.receipt_time,
            n_bring_forward: class.bring_forward.len(),
            n_skip_recent: class.skip_recent.len(),
            n_must_add: class.must_add.len(),
            added,
            water_surplus: remaining - reserved,
            objective_before,
            objective_after,
        },
        alns,
        log,
    })
}
