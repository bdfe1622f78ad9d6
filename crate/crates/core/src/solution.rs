//! Route and solution representation, objective evaluation, timing
//! propagation and feasibility checking.
//!
//! A route is an ordered task sequence anchored at a depot (or, while
//! re-planning, at the vehicle's current position, still returning to its
//! depot). Vehicle-assignment and sequencing decision variables exist only
//! implicitly as the sequence itself.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::config::SolverConfig;
use crate::network::{LinkId, LinkKind, MixedNetwork, NodeId};
use crate::scalar::Scalar;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Reverse,
}

/// One demand link plus its chosen traversal direction.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct ServiceTask {
    pub link: LinkId,
    pub direction: Direction,
}

impl ServiceTask {
    pub fn forward(link: LinkId) -> Self {
        ServiceTask { link, direction: Direction::Forward }
    }

    pub fn start_node<F: Scalar>(&self, net: &MixedNetwork<F>) -> NodeId {
        let l = net.link(self.link);
        match self.direction {
            Direction::Forward => l.from,
            Direction::Reverse => l.to,
        }
    }

    pub fn end_node<F: Scalar>(&self, net: &MixedNetwork<F>) -> NodeId {
        let l = net.link(self.link);
        match self.direction {
            Direction::Forward => l.to,
            Direction::Reverse => l.from,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Stage {
    Fixed,
    Replan,
}

/// Service window per link, minutes: earliest and latest service start.
pub type Windows<F> = BTreeMap<LinkId, (F, F)>;

#[derive(Clone, Debug)]
pub struct Route<F> {
    pub vehicle: usize,
    pub depot: NodeId,
    /// Re-planning start position; `None` means the route starts at its
    /// depot.
    pub anchor: Option<NodeId>,
    /// Minutes already on the clock when the route leaves its origin.
    pub start_offset: F,
    /// Water budget for this route: the tank capacity, or the remaining
    /// water when re-planning mid-operation.
    pub capacity: F,
    pub tasks: Vec<ServiceTask>,
    // cached quantities, maintained by recompute()
    pub load: F,
    pub service_distance: F,
    pub deadhead_distance: F,
    pub start_times: Vec<F>,
    pub work_time: F,
}

impl<F: Scalar> Route<F> {
    pub fn new(vehicle: usize, depot: NodeId, capacity: F) -> Self {
        Route {
            vehicle,
            depot,
            anchor: None,
            start_offset: F::zero(),
            capacity,
            tasks: Vec::new(),
            load: F::zero(),
            service_distance: F::zero(),
            deadhead_distance: F::zero(),
            start_times: Vec::new(),
            work_time: F::zero(),
        }
    }

    /// Node the route departs from.
    pub fn origin(&self) -> NodeId {
        self.anchor.unwrap_or(self.depot)
    }

    pub fn recompute(&mut self, net: &MixedNetwork<F>, cfg: &SolverConfig<F>, windows: &Windows<F>) {
        let walk = walk_route(self.origin(), self.depot, self.start_offset, self.anchor.is_some(), &self.tasks, net, cfg, windows);
        self.load = self
            .tasks
            .iter()
            .fold(F::zero(), |acc, t| acc + net.service_demand(t.link));
        self.service_distance = walk.service;
        self.deadhead_distance = walk.deadhead;
        self.start_times = walk.start_times;
        self.work_time = walk.work_time;
    }
}

#[derive(Clone, Debug)]
pub struct Solution<F> {
    pub stage: Stage,
    pub routes: Vec<Route<F>>,
    /// Service windows for event-added links; empty in the fixed stage.
    pub windows: Windows<F>,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ObjectiveBreakdown<F> {
    pub service_distance: F,
    pub deadhead_distance: F,
    pub window_penalty: F,
    pub total: F,
}

impl<F: Scalar> ObjectiveBreakdown<F> {
    pub fn zero() -> Self {
        ObjectiveBreakdown {
            service_distance: F::zero(),
            deadhead_distance: F::zero(),
            window_penalty: F::zero(),
            total: F::zero(),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EvalError {
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("directional arc {0} served in reverse")]
    IllegalDirection(LinkId),
    #[error("virtual depot link {0} cannot be serviced")]
    VirtualLinkService(LinkId),
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum InsertError {
    #[error("insertion would exceed the route's water budget")]
    CapacityExceeded,
}

/// Per-constraint feasibility findings. `check_feasibility` reports, it
/// never fails.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation<F> {
    MissingDemand(LinkId),
    DuplicateService(LinkId),
    UnexpectedService(LinkId),
    WrongDirection(LinkId),
    UnknownLink(LinkId),
    CapacityExceeded { route: usize, load: F, capacity: F },
    WorkTimeSpread { spread: F, limit: F },
    BadDepotClosure { route: usize },
    EarlyWindowStart { link: LinkId, start: F, earliest: F },
    LateWindowStart { link: LinkId, start: F, latest: F },
}

impl<F: Scalar> std::fmt::Display for Violation<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MissingDemand(l) => write!(f, "demand link {l} unserved"),
            Violation::DuplicateService(l) => write!(f, "link {l} served more than once"),
            Violation::UnexpectedService(l) => write!(f, "link {l} served but not demanded"),
            Violation::WrongDirection(l) => write!(f, "arc {l} served against its direction"),
            Violation::UnknownLink(l) => write!(f, "unknown link {l}"),
            Violation::CapacityExceeded { route, load, capacity } => {
                write!(f, "route {route} load {load} exceeds budget {capacity}")
            }
            Violation::WorkTimeSpread { spread, limit } => {
                write!(f, "working-time spread {spread} min exceeds {limit} min")
            }
            Violation::BadDepotClosure { route } => {
                write!(f, "route {route} does not start/end at a depot")
            }
            Violation::EarlyWindowStart { link, start, earliest } => {
                write!(f, "link {link} starts at {start} before window opens at {earliest}")
            }
            Violation::LateWindowStart { link, start, latest } => {
                write!(f, "link {link} starts at {start} after window closes at {latest}")
            }
        }
    }
}

pub(crate) struct RouteWalk<F> {
    pub start_times: Vec<F>,
    pub service: F,
    pub deadhead: F,
    pub work_time: F,
    pub lateness_sq: F,
}

/// Propagates service start times along a task sequence and accumulates
/// the distance totals. Start times honor window openings (a vehicle
/// arriving early waits); working time is the driving time plus the
/// clock offset carried in from before the anchor.
#[allow(clippy::too_many_arguments)]
pub(crate) fn walk_route<F: Scalar>(
    origin: NodeId,
    depot: NodeId,
    offset: F,
    returns_when_empty: bool,
    tasks: &[ServiceTask],
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    windows: &Windows<F>,
) -> RouteWalk<F> {
    let v_r = cfg.v_service();
    let v_n = cfg.v_deadhead();
    let mut start_times = Vec::with_capacity(tasks.len());
    let mut service = F::zero();
    let mut deadhead = F::zero();
    let mut lateness_sq = F::zero();
    if tasks.is_empty() {
        let ret = if returns_when_empty { net.dist(origin, depot) } else { F::zero() };
        return RouteWalk {
            start_times,
            service: F::zero(),
            deadhead: ret,
            work_time: offset + ret / v_n,
            lateness_sq: F::zero(),
        };
    }
    let mut clock = offset;
    let mut at = origin;
    for task in tasks {
        let len = net.link(task.link).length;
        let gap = net.dist(at, task.start_node(net));
        deadhead += gap;
        clock += gap / v_n;
        if let Some(&(a, b)) = windows.get(&task.link) {
            if clock < a {
                clock = a;
            }
            let late = (clock - b).max(F::zero());
            lateness_sq += late * late;
        }
        start_times.push(clock);
        service += len;
        clock += len / v_r;
        at = task.end_node(net);
    }
    let ret = net.dist(at, depot);
    deadhead += ret;
    let work_time = offset + service / v_r + deadhead / v_n;
    RouteWalk { start_times, service, deadhead, work_time, lateness_sq }
}

impl<F: Scalar> Solution<F> {
    pub fn new(stage: Stage, routes: Vec<Route<F>>) -> Self {
        Solution { stage, routes, windows: Windows::new() }
    }

    pub fn n_tasks(&self) -> usize {
        self.routes.iter().map(|r| r.tasks.len()).sum()
    }

    pub fn task_positions(&self) -> impl Iterator<Item = (usize, usize, &ServiceTask)> {
        self.routes
            .iter()
            .enumerate()
            .flat_map(|(ri, r)| r.tasks.iter().enumerate().map(move |(ti, t)| (ri, ti, t)))
    }

    pub fn find_link(&self, link: LinkId) -> Option<(usize, usize)> {
        self.task_positions()
            .find(|(_, _, t)| t.link == link)
            .map(|(r, p, _)| (r, p))
    }

    pub fn recompute_all(&mut self, net: &MixedNetwork<F>, cfg: &SolverConfig<F>) {
        let windows = std::mem::take(&mut self.windows);
        for r in &mut self.routes {
            r.recompute(net, cfg, &windows);
        }
        self.windows = windows;
    }

    fn validate_task(&self, task: &ServiceTask, net: &MixedNetwork<F>) -> Result<(), EvalError> {
        if task.link.idx() >= net.links().len() {
            return Err(EvalError::UnknownLink(task.link));
        }
        let l = net.link(task.link);
        match l.kind {
            LinkKind::VirtualDepot => Err(EvalError::VirtualLinkService(task.link)),
            LinkKind::DirectionalArc if task.direction == Direction::Reverse => {
                Err(EvalError::IllegalDirection(task.link))
            }
            _ => Ok(()),
        }
    }

    /// Full recomputation of the two-part travel objective plus the
    /// quadratic window penalty. Pure: depends only on the task
    /// sequences, never on cached fields.
    pub fn evaluate(
        &self,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
    ) -> Result<ObjectiveBreakdown<F>, EvalError> {
        Ok(self.evaluate_detail(net, cfg)?.breakdown)
    }

    pub fn evaluate_detail(
        &self,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
    ) -> Result<EvalDetail<F>, EvalError> {
        let mut service = F::zero();
        let mut deadhead = F::zero();
        let mut lateness_sq = F::zero();
        let mut work_times = Vec::with_capacity(self.routes.len());
        for route in &self.routes {
            for task in &route.tasks {
                self.validate_task(task, net)?;
            }
            let walk = walk_route(
                route.origin(),
                route.depot,
                route.start_offset,
                route.anchor.is_some(),
                &route.tasks,
                net,
                cfg,
                &self.windows,
            );
            service += walk.service;
            deadhead += walk.deadhead;
            lateness_sq += walk.lateness_sq;
            work_times.push(walk.work_time);
        }
        let window_penalty = match self.stage {
            Stage::Fixed => F::zero(),
            Stage::Replan => cfg.delta * lateness_sq,
        };
        let total = service + deadhead + window_penalty;
        let spread = spread_of(&work_times);
        Ok(EvalDetail {
            breakdown: ObjectiveBreakdown { service_distance: service, deadhead_distance: deadhead, window_penalty, total },
            work_times,
            spread,
        })
    }

    /// Objective the search optimizes: the travel-plus-penalty total with
    /// a soft charge on working-time spread beyond the allowed limit.
    pub fn search_cost(&self, net: &MixedNetwork<F>, cfg: &SolverConfig<F>) -> Result<F, EvalError> {
        let detail = self.evaluate_detail(net, cfg)?;
        let excess = (detail.spread - cfg.t_dif).max(F::zero());
        Ok(detail.breakdown.total + cfg.w_bal * excess)
    }

    /// Working-time spread from cached route fields.
    pub fn cached_spread(&self) -> F {
        spread_of_iter(self.routes.iter().map(|r| r.work_time))
    }

    pub fn spread_feasible(&self, cfg: &SolverConfig<F>) -> bool {
        self.cached_spread() <= cfg.t_dif + F::feas_eps(cfg.t_dif)
    }

    /// Order-sensitive 64-bit fingerprint of all route task sequences,
    /// depots and anchors (FNV-1a).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x100000001b3);
        };
        for (i, route) in self.routes.iter().enumerate() {
            mix(i as u64 + 1);
            mix(route.depot.0 as u64 + 1);
            mix(route.anchor.map_or(0, |a| a.0 as u64 + 1));
            for t in &route.tasks {
                let dir = match t.direction {
                    Direction::Forward => 0u64,
                    Direction::Reverse => 1u64,
                };
                mix(((t.link.0 as u64) << 1) | dir);
            }
        }
        h
    }

    /// Reports every constraint violation: demand coverage, service
    /// directions, water budgets, depot closure, working-time spread, and
    /// window bounds.
    pub fn check_feasibility(
        &self,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
        demand_set: &std::collections::BTreeSet<LinkId>,
    ) -> Vec<Violation<F>> {
        let mut out = Vec::new();
        let mut counts: BTreeMap<LinkId, usize> = BTreeMap::new();
        let mut work_times = Vec::with_capacity(self.routes.len());
        for (ri, route) in self.routes.iter().enumerate() {
            if !net.depots().contains(&route.depot) {
                out.push(Violation::BadDepotClosure { route: ri });
            }
            let mut load = F::zero();
            for task in &route.tasks {
                if task.link.idx() >= net.links().len() {
                    out.push(Violation::UnknownLink(task.link));
                    continue;
                }
                let l = net.link(task.link);
                if l.kind == LinkKind::VirtualDepot {
                    out.push(Violation::UnknownLink(task.link));
                    continue;
                }
                if l.kind == LinkKind::DirectionalArc && task.direction == Direction::Reverse {
                    out.push(Violation::WrongDirection(task.link));
                }
                *counts.entry(task.link).or_insert(0) += 1;
                load += net.service_demand(task.link);
            }
            if load > route.capacity + F::feas_eps(route.capacity) {
                out.push(Violation::CapacityExceeded { route: ri, load, capacity: route.capacity });
            }
            let walk = walk_route(
                route.origin(),
                route.depot,
                route.start_offset,
                route.anchor.is_some(),
                &route.tasks,
                net,
                cfg,
                &self.windows,
            );
            work_times.push(walk.work_time);
            for (task, &start) in route.tasks.iter().zip(&walk.start_times) {
                if let Some(&(a, _b)) = self.windows.get(&task.link) {
                    if start < a - F::feas_eps(a) {
                        out.push(Violation::EarlyWindowStart { link: task.link, start, earliest: a });
                    }
                }
            }
        }
        for &link in demand_set {
            match counts.get(&link) {
                None => out.push(Violation::MissingDemand(link)),
                Some(&1) => {}
                Some(_) => out.push(Violation::DuplicateService(link)),
            }
        }
        for (&link, &count) in &counts {
            if !demand_set.contains(&link) {
                out.push(Violation::UnexpectedService(link));
                let _ = count;
            }
        }
        let spread = spread_of(&work_times);
        if spread > cfg.t_dif + F::feas_eps(cfg.t_dif) {
            out.push(Violation::WorkTimeSpread { spread, limit: cfg.t_dif });
        }
        out
    }

    /// Objective change from inserting `task` at `position` of route
    /// `route_idx`, equal to `evaluate(after) - evaluate(before)`.
    /// Distance terms are O(1); window timing needs a walk over the route
    /// when service windows are present.
    pub fn delta_insert_cost(
        &self,
        route_idx: usize,
        position: usize,
        task: ServiceTask,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
    ) -> Result<F, InsertError> {
        Ok(self.insertion_eval(route_idx, position, task, net, cfg)?.delta)
    }

    /// Like [`Self::delta_insert_cost`], also reporting the inserted
    /// task's start time and its own squared lateness (for the windowed
    /// repair).
    pub fn insertion_eval(
        &self,
        route_idx: usize,
        position: usize,
        task: ServiceTask,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
    ) -> Result<InsertionEval<F>, InsertError> {
        let route = &self.routes[route_idx];
        let demand = net.service_demand(task.link);
        if route.load + demand > route.capacity + F::feas_eps(route.capacity) {
            return Err(InsertError::CapacityExceeded);
        }
        let origin = route.origin();
        let s = task.start_node(net);
        let e = task.end_node(net);
        let prev = if position == 0 { origin } else { route.tasks[position - 1].end_node(net) };
        let next = if position == route.tasks.len() {
            route.depot
        } else {
            route.tasks[position].start_node(net)
        };
        let old_leg = if route.tasks.is_empty() {
            if route.anchor.is_some() { net.dist(origin, route.depot) } else { F::zero() }
        } else {
            net.dist(prev, next)
        };
        let len = net.link(task.link).length;
        let dd = net.dist(prev, s) + net.dist(e, next) - old_leg;

        let timing_matters = self.stage == Stage::Replan && !self.windows.is_empty();
        let (pen_delta, start_time, own_lateness_sq) = if timing_matters {
            let before = walk_route(
                origin,
                route.depot,
                route.start_offset,
                route.anchor.is_some(),
                &route.tasks,
                net,
                cfg,
                &self.windows,
            );
            let mut after_tasks = Vec::with_capacity(route.tasks.len() + 1);
            after_tasks.extend_from_slice(&route.tasks[..position]);
            after_tasks.push(task);
            after_tasks.extend_from_slice(&route.tasks[position..]);
            let after = walk_route(
                origin,
                route.depot,
                route.start_offset,
                route.anchor.is_some(),
                &after_tasks,
                net,
                cfg,
                &self.windows,
            );
            let start = after.start_times[position];
            let own = match self.windows.get(&task.link) {
                Some(&(_a, b)) => {
                    let late = (start - b).max(F::zero());
                    late * late
                }
                None => F::zero(),
            };
            (cfg.delta * (after.lateness_sq - before.lateness_sq), start, own)
        } else {
            // no windows: start time still useful to callers
            let mut clock = route.start_offset;
            let mut at = origin;
            for t in &route.tasks[..position] {
                clock += net.dist(at, t.start_node(net)) / cfg.v_deadhead();
                clock += net.link(t.link).length / cfg.v_service();
                at = t.end_node(net);
            }
            clock += net.dist(at, s) / cfg.v_deadhead();
            (F::zero(), clock, F::zero())
        };

        Ok(InsertionEval { delta: len + dd + pen_delta, start_time, own_lateness_sq })
    }

    /// Inserts and refreshes the route's caches.
    pub fn insert_task(
        &mut self,
        route_idx: usize,
        position: usize,
        task: ServiceTask,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
    ) {
        let windows = std::mem::take(&mut self.windows);
        let route = &mut self.routes[route_idx];
        route.tasks.insert(position, task);
        route.recompute(net, cfg, &windows);
        self.windows = windows;
    }

    /// Removes and refreshes the route's caches.
    pub fn remove_task(
        &mut self,
        route_idx: usize,
        position: usize,
        net: &MixedNetwork<F>,
        cfg: &SolverConfig<F>,
    ) -> ServiceTask {
        let windows = std::mem::take(&mut self.windows);
        let route = &mut self.routes[route_idx];
        let task = route.tasks.remove(position);
        route.recompute(net, cfg, &windows);
        self.windows = windows;
        task
    }
}

#[derive(Clone, Debug)]
pub struct EvalDetail<F> {
    pub breakdown: ObjectiveBreakdown<F>,
    pub work_times: Vec<F>,
    pub spread: F,
}

#[derive(Copy, Clone, Debug)]
pub struct InsertionEval<F> {
    pub delta: F,
    pub start_time: F,
    pub own_lateness_sq: F,
}

fn spread_of<F: Scalar>(work_times: &[F]) -> F {
    spread_of_iter(work_times.iter().copied())
}

fn spread_of_iter<F: Scalar>(iter: impl Iterator<Item = F>) -> F {
    let mut min = F::infinity();
    let mut max = F::neg_infinity();
    let mut any = false;
    for w in iter {
        min = min.min(w);
        max = max.max(w);
        any = true;
    }
    if any {
        max - min
    } else {
        F::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::testutil::two_node_net;
    use crate::network::{build_network, LinkSpec, NetworkSpec, NodeSpec};

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    fn single_route_solution(net: &MixedNetwork<f64>) -> Solution<f64> {
        let cfg = cfg();
        let mut route = Route::new(0, net.depots()[0], cfg.capacity);
        route.tasks.push(ServiceTask::forward(LinkId(0)));
        route.recompute(net, &cfg, &Windows::new());
        Solution::new(Stage::Fixed, vec![route])
    }

    #[test]
    fn single_route_objective() {
        let net = two_node_net();
        let sol = single_route_solution(&net);
        let b = sol.evaluate(&net, &cfg()).unwrap();
        // serve the 100 m arc, deadhead 100 m back over the parallel edge
        assert_eq!(b.service_distance, 100.0);
        assert_eq!(b.deadhead_distance, 100.0);
        assert_eq!(b.window_penalty, 0.0);
        assert_eq!(b.total, 200.0);
    }

    #[test]
    fn empty_solution_is_zero() {
        let net = two_node_net();
        let sol: Solution<f64> = Solution::new(Stage::Fixed, vec![]);
        let b = sol.evaluate(&net, &cfg()).unwrap();
        assert_eq!(b, ObjectiveBreakdown::zero());
    }

    #[test]
    fn window_penalty_quadratic() {
        // 2 minutes late at delta = 5 costs 20
        let net = two_node_net();
        let mut sol = single_route_solution(&net);
        sol.stage = Stage::Replan;
        sol.windows.insert(LinkId(0), (0.0, 0.0));
        // shift the clock so the task starts 2 minutes past the window end
        sol.routes[0].start_offset = 2.0;
        sol.recompute_all(&net, &cfg());
        let b = sol.evaluate(&net, &cfg()).unwrap();
        assert!((b.window_penalty - 5.0 * 4.0).abs() < 1e-9);
        assert!((b.total - (200.0 + 20.0)).abs() < 1e-9);
    }

    #[test]
    fn fixed_stage_never_penalizes() {
        let net = two_node_net();
        let mut sol = single_route_solution(&net);
        sol.windows.insert(LinkId(0), (0.0, -10.0));
        let b = sol.evaluate(&net, &cfg()).unwrap();
        assert_eq!(b.window_penalty, 0.0);
    }

    #[test]
    fn times_on_adjacent_service_and_return() {
        // 100 m service then 100 m return: 0.6 min + 0.2 min
        let net = two_node_net();
        let sol = single_route_solution(&net);
        let route = &sol.routes[0];
        assert_eq!(route.start_times[0], 0.0);
        assert!((route.work_time - 0.8).abs() < 1e-9);
    }

    #[test]
    fn empty_route_work_time_zero() {
        let net = two_node_net();
        let c = cfg();
        let mut route = Route::new(0, net.depots()[0], c.capacity);
        route.recompute(&net, &c, &Windows::new());
        assert_eq!(route.work_time, 0.0);
        assert_eq!(route.deadhead_distance, 0.0);
    }

    #[test]
    fn second_task_timing_follows_sequence() {
        // chain: depot node 0; task A = edge(0,1) 200 m; gap 500 m; task B
        let spec = NetworkSpec {
            nodes: (0..4u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 200.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 500.0 },
                LinkSpec { from: 2, to: 3, directional: false, length: 150.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0, 2]).unwrap();
        let c = cfg();
        let mut route = Route::new(0, net.depots()[0], c.capacity);
        route.tasks.push(ServiceTask::forward(LinkId(0)));
        route.tasks.push(ServiceTask::forward(LinkId(2)));
        route.recompute(&net, &c, &Windows::new());
        assert_eq!(route.start_times[0], 0.0);
        // 200 m at 166.67 m/min + 500 m at 500 m/min = 1.2 + 1.0
        assert!((route.start_times[1] - 2.2).abs() < 1e-9);
    }

    #[test]
    fn feasibility_clean_and_violations() {
        let net = two_node_net();
        let c = cfg();
        let sol = single_route_solution(&net);
        let demand: std::collections::BTreeSet<LinkId> =
            net.demand_links().map(|l| l.id).collect();
        assert!(sol.check_feasibility(&net, &c, &demand).is_empty());

        // duplicate across two routes
        let mut dup = sol.clone();
        let mut extra = Route::new(1, net.depots()[0], c.capacity);
        extra.tasks.push(ServiceTask::forward(LinkId(0)));
        extra.recompute(&net, &c, &Windows::new());
        dup.routes.push(extra);
        let v = dup.check_feasibility(&net, &c, &demand);
        assert!(v.contains(&Violation::DuplicateService(LinkId(0))));

        // capacity breach: shrink the budget below the load
        let mut over = sol.clone();
        over.routes[0].capacity = 99.0;
        let v = over.check_feasibility(&net, &c, &demand);
        assert!(matches!(v[0], Violation::CapacityExceeded { .. }));

        // wrong direction on an arc
        let mut wrong = sol.clone();
        wrong.routes[0].tasks[0].direction = Direction::Reverse;
        wrong.recompute_all(&net, &c);
        let v = wrong.check_feasibility(&net, &c, &demand);
        assert!(v.contains(&Violation::WrongDirection(LinkId(0))));

        // missing demand
        let empty: Solution<f64> = Solution::new(Stage::Fixed, vec![]);
        let v = empty.check_feasibility(&net, &c, &demand);
        assert!(v.contains(&Violation::MissingDemand(LinkId(0))));
    }

    #[test]
    fn delta_insert_matches_examples() {
        let net = two_node_net();
        let c = cfg();
        let sol = single_route_solution(&net);

        // empty route anchored at the task's own depot: delta is the task
        // length plus the round trip
        let empty = Solution::new(
            Stage::Fixed,
            vec![Route::new(0, net.depots()[0], c.capacity)],
        );
        let d = empty
            .delta_insert_cost(0, 0, ServiceTask::forward(LinkId(0)), &net, &c)
            .unwrap();
        let full = {
            let mut s = empty.clone();
            s.insert_task(0, 0, ServiceTask::forward(LinkId(0)), &net, &c);
            s.evaluate(&net, &c).unwrap().total
        };
        assert!((d - full).abs() < 1e-9);
        assert_eq!(d, 200.0); // 100 service + 0 out + 100 back

        // capacity guard
        let mut tight = sol.clone();
        tight.routes[0].capacity = 150.0;
        let err = tight.delta_insert_cost(0, 1, ServiceTask::forward(LinkId(0)), &net, &c);
        assert_eq!(err.unwrap_err(), InsertError::CapacityExceeded);
    }

    #[test]
    fn zero_gap_insertion_costs_task_length() {
        // triangle 0-1 (100), 1-2 (150), 2-0 (100), depot 0; the route
        // serves (0,1). Appending (1,2) picks up at node 1 where the
        // vehicle already stands and the return from node 2 is as long as
        // the return from node 1 was: zero added deadhead, delta = length.
        let spec = NetworkSpec {
            nodes: (0..3u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 100.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 150.0 },
                LinkSpec { from: 2, to: 0, directional: false, length: 100.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0, 1]).unwrap();
        let c = cfg();
        let mut route = Route::new(0, net.depots()[0], c.capacity);
        route.tasks.push(ServiceTask::forward(LinkId(0)));
        route.recompute(&net, &c, &Windows::new());
        let sol = Solution::new(Stage::Fixed, vec![route]);
        let task = ServiceTask::forward(LinkId(1));
        let d = sol.delta_insert_cost(0, 1, task, &net, &c).unwrap();
        assert!((d - 150.0).abs() < 1e-9);
        let mut after = sol.clone();
        after.insert_task(0, 1, task, &net, &c);
        let diff = after.evaluate(&net, &c).unwrap().total - sol.evaluate(&net, &c).unwrap().total;
        assert!((d - diff).abs() < 1e-9);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let net = two_node_net();
        let sol = single_route_solution(&net);
        let a = sol.evaluate(&net, &cfg()).unwrap();
        let b = sol.evaluate(&net, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reversing_edge_changes_only_deadhead() {
        // the one-way shortcut 2 -> 0 makes the two orientations of the
        // demand edge (1,2) cost different deadheads
        let spec = NetworkSpec {
            nodes: (0..3u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 100.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 60.0 },
                LinkSpec { from: 2, to: 0, directional: true, length: 30.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[1]).unwrap();
        let c = cfg();
        let mut route = Route::new(0, net.depots()[0], c.capacity);
        route.tasks.push(ServiceTask::forward(LinkId(1)));
        route.recompute(&net, &c, &Windows::new());
        let fwd = Solution::new(Stage::Fixed, vec![route.clone()]);
        route.tasks[0].direction = Direction::Reverse;
        route.recompute(&net, &c, &Windows::new());
        let rev = Solution::new(Stage::Fixed, vec![route]);
        let bf = fwd.evaluate(&net, &c).unwrap();
        let br = rev.evaluate(&net, &c).unwrap();
        assert_eq!(bf.service_distance, br.service_distance);
        assert_ne!(bf.deadhead_distance, br.deadhead_distance);
    }

    #[test]
    fn fingerprint_sensitive_to_order_and_direction() {
        let net = two_node_net();
        let sol = single_route_solution(&net);
        let mut other = sol.clone();
        other.routes[0].tasks[0].direction = Direction::Reverse;
        assert_ne!(sol.fingerprint(), other.fingerprint());
        assert_eq!(sol.fingerprint(), sol.clone().fingerprint());
    }
}
