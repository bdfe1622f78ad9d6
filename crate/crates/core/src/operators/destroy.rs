//! The five destroy operators. Each returns the gapped solution plus the
//! removed tasks in selection order; non-directional edges come back with
//! their direction reset so the repair re-chooses orientation.

use rand::Rng;

use crate::config::SolverConfig;
use crate::network::{LinkKind, MixedNetwork};
use crate::scalar::Scalar;
use crate::solution::{walk_route, Direction, ServiceTask, Solution, Stage};

use super::{gamma_count, RemovalResult};

fn reset_direction<F: Scalar>(net: &MixedNetwork<F>, task: ServiceTask) -> ServiceTask {
    if net.link(task.link).kind == LinkKind::NonDirectionalEdge {
        ServiceTask { link: task.link, direction: Direction::Forward }
    } else {
        task
    }
}

/// Removes the tasks at `picks` (in the given order) from a copy of the
/// solution.
fn extract<F: Scalar>(
    sol: &Solution<F>,
    picks: &[(usize, usize)],
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> RemovalResult<F> {
    let mut partial = sol.clone();
    let removed: Vec<ServiceTask> = picks
        .iter()
        .map(|&(r, p)| reset_direction(net, sol.routes[r].tasks[p]))
        .collect();
    let mut marked: Vec<Vec<bool>> = sol.routes.iter().map(|r| vec![false; r.tasks.len()]).collect();
    for &(r, p) in picks {
        marked[r][p] = true;
    }
    let windows = std::mem::take(&mut partial.windows);
    for (ri, route) in partial.routes.iter_mut().enumerate() {
        if marked[ri].iter().any(|&m| m) {
            let kept: Vec<ServiceTask> = route
                .tasks
                .iter()
                .zip(&marked[ri])
                .filter(|(_, &m)| !m)
                .map(|(t, _)| *t)
                .collect();
            route.tasks = kept;
            route.recompute(net, cfg, &windows);
        }
    }
    partial.windows = windows;
    RemovalResult { partial, removed }
}

fn all_positions<F: Scalar>(sol: &Solution<F>) -> Vec<(usize, usize)> {
    sol.task_positions().map(|(r, p, _)| (r, p)).collect()
}

/// Uniformly removes a `gamma` fraction of the tasks.
pub fn destroy_random<F: Scalar>(
    sol: &Solution<F>,
    gamma: F,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    rng: &mut impl Rng,
) -> RemovalResult<F> {
    let mut positions = all_positions(sol);
    let k = gamma_count(gamma, positions.len());
    for i in 0..k {
        let j = rng.random_range(i..positions.len());
        positions.swap(i, j);
    }
    positions.truncate(k);
    extract(sol, &positions, net, cfg)
}

/// Objective decrease from deleting the task at (route, pos): the travel
/// saving plus, while re-planning, the window-penalty saving.
pub fn removal_gain<F: Scalar>(
    sol: &Solution<F>,
    route_idx: usize,
    pos: usize,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> F {
    let route = &sol.routes[route_idx];
    let task = route.tasks[pos];
    let origin = route.origin();
    let s = task.start_node(net);
    let e = task.end_node(net);
    let prev = if pos == 0 { origin } else { route.tasks[pos - 1].end_node(net) };
    let next = if pos + 1 == route.tasks.len() {
        route.depot
    } else {
        route.tasks[pos + 1].start_node(net)
    };
    let new_leg = if route.tasks.len() == 1 {
        if route.anchor.is_some() { net.dist(origin, route.depot) } else { F::zero() }
    } else {
        net.dist(prev, next)
    };
    let len = net.link(task.link).length;
    let dd_saving = net.dist(prev, s) + net.dist(e, next) - new_leg;
    let mut gain = len + dd_saving;
    if sol.stage == Stage::Replan && !sol.windows.is_empty() {
        let before = walk_route(
            origin,
            route.depot,
            route.start_offset,
            route.anchor.is_some(),
            &route.tasks,
            net,
            cfg,
            &sol.windows,
        );
        let mut shorter = route.tasks.clone();
        shorter.remove(pos);
        let after = walk_route(
            origin,
            route.depot,
            route.start_offset,
            route.anchor.is_some(),
            &shorter,
            net,
            cfg,
            &sol.windows,
        );
        gain += cfg.delta * (before.lateness_sq - after.lateness_sq);
    }
    gain
}

/// Removes the tasks whose deletion shrinks the objective most,
/// re-scoring survivors after every removal.
pub fn destroy_worst<F: Scalar>(
    sol: &Solution<F>,
    gamma: F,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> RemovalResult<F> {
    let k = gamma_count(gamma, sol.n_tasks());
    let mut partial = sol.clone();
    let mut removed = Vec::with_capacity(k);
    for _ in 0..k {
        // (gain, link id, route, pos); ties break toward the lowest link id
        let mut best: Option<(F, u32, usize, usize)> = None;
        for (r, p, t) in partial.task_positions() {
            let gain = removal_gain(&partial, r, p, net, cfg);
            let better = match best {
                None => true,
                Some((bg, blink, _, _)) => gain > bg || (gain == bg && t.link.0 < blink),
            };
            if better {
                best = Some((gain, t.link.0, r, p));
            }
        }
        let (_, _, r, p) = match best {
            Some(b) => b,
            None => break,
        };
        let task = partial.remove_task(r, p, net, cfg);
        removed.push(reset_direction(net, task));
    }
    RemovalResult { partial, removed }
}

/// Deadhead to the predecessor plus deadhead to the successor; depot
/// anchors count as neighbors.
fn non_adjacent_distance<F: Scalar>(
    sol: &Solution<F>,
    route_idx: usize,
    pos: usize,
    net: &MixedNetwork<F>,
) -> F {
    let route = &sol.routes[route_idx];
    let task = route.tasks[pos];
    let prev = if pos == 0 { route.origin() } else { route.tasks[pos - 1].end_node(net) };
    let next = if pos + 1 == route.tasks.len() {
        route.depot
    } else {
        route.tasks[pos + 1].start_node(net)
    };
    net.dist(prev, task.start_node(net)) + net.dist(task.end_node(net), next)
}

/// Removes the tasks with the longest gap to their route neighbors.
pub fn destroy_non_adjacent<F: Scalar>(
    sol: &Solution<F>,
    gamma: F,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> RemovalResult<F> {
    let mut scored: Vec<(F, usize, usize, u32)> = sol
        .task_positions()
        .map(|(r, p, t)| (non_adjacent_distance(sol, r, p, net), r, p, t.link.0))
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.3.cmp(&b.3)));
    let k = gamma_count(gamma, scored.len());
    let picks: Vec<(usize, usize)> = scored[..k].iter().map(|&(_, r, p, _)| (r, p)).collect();
    extract(sol, &picks, net, cfg)
}

/// Removes the tasks farthest from their own route's depot.
pub fn destroy_farthest_depot<F: Scalar>(
    sol: &Solution<F>,
    gamma: F,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> RemovalResult<F> {
    let mut scored: Vec<(F, usize, usize, u32)> = sol
        .task_positions()
        .map(|(r, p, t)| {
            (net.node_to_link(sol.routes[r].depot, t.link), r, p, t.link.0)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.3.cmp(&b.3)));
    let k = gamma_count(gamma, scored.len());
    let picks: Vec<(usize, usize)> = scored[..k].iter().map(|&(_, r, p, _)| (r, p)).collect();
    extract(sol, &picks, net, cfg)
}

/// Removes window violators first (largest penalty when there are more
/// than the quota), padding with uniform random tasks when there are
/// fewer. Without windows this is random removal.
pub fn destroy_time_related<F: Scalar>(
    sol: &Solution<F>,
    gamma: F,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    rng: &mut impl Rng,
) -> RemovalResult<F> {
    if sol.stage == Stage::Fixed || sol.windows.is_empty() {
        return destroy_random(sol, gamma, net, cfg, rng);
    }
    let k = gamma_count(gamma, sol.n_tasks());
    // fresh lateness per task
    let mut violators: Vec<(F, usize, usize, u32)> = Vec::new();
    for (ri, route) in sol.routes.iter().enumerate() {
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
        for (pi, (task, &start)) in route.tasks.iter().zip(&walk.start_times).enumerate() {
            if let Some(&(_a, b)) = sol.windows.get(&task.link) {
                let late = start - b;
                if late > F::feas_eps(b) {
                    violators.push((late, ri, pi, task.link.0));
                }
            }
        }
    }
    violators.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.3.cmp(&b.3)));
    let mut picks: Vec<(usize, usize)> = violators
        .iter()
        .take(k)
        .map(|&(_, r, p, _)| (r, p))
        .collect();
    if picks.len() < k {
        let mut rest: Vec<(usize, usize)> = all_positions(sol)
            .into_iter()
            .filter(|pos| !picks.contains(pos))
            .collect();
        let pad = (k - picks.len()).min(rest.len());
        for i in 0..pad {
            let j = rng.random_range(i..rest.len());
            rest.swap(i, j);
        }
        picks.extend(rest.into_iter().take(pad));
    }
    extract(sol, &picks, net, cfg)
}
