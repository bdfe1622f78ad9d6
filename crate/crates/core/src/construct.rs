//! Initial solution: fleet sizing, dispersion seeding, round-robin
//! nearest-neighbor assignment, depot anchoring, and workload balancing.

use rand::Rng;
use thiserror::Error;

use crate::config::SolverConfig;
use crate::network::{LinkId, LinkKind, MixedNetwork, NodeId};
use crate::scalar::Scalar;
use crate::solution::{Direction, Route, ServiceTask, Solution, Stage, Windows};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConstructError {
    #[error("no demand links to plan")]
    EmptyDemand,
    #[error("demand link {0} alone exceeds the tank capacity")]
    DemandExceedsCapacity(LinkId),
    #[error("no route has room for the remaining demand links")]
    NoCapacityFit,
    #[error("workload balancing stalled at spread {spread} min (limit {limit} min)")]
    InfeasibleBalance { spread: f64, limit: f64 },
}

/// Smallest fleet able to carry the total demand: `ceil(total / capacity)`,
/// so that `(m-1)*Q < total <= m*Q`.
pub fn fleet_size<F: Scalar>(total_demand: F, capacity: F) -> usize {
    let ratio = total_demand / capacity;
    // snap near-integers so exact multiples don't round up
    let rounded = ratio.round();
    let ratio = if (ratio - rounded).abs() <= F::feas_eps(ratio) { rounded } else { ratio };
    ratio.ceil().to_f64() as usize
}

/// Dispersion seeding: the first seed is drawn uniformly; each further
/// seed maximizes the summed gap to all previously seeded links.
pub fn select_seeds<F: Scalar>(
    net: &MixedNetwork<F>,
    demands: &[LinkId],
    m: usize,
    rng: &mut impl Rng,
) -> Vec<LinkId> {
    let mut remaining: Vec<LinkId> = demands.to_vec();
    remaining.sort();
    let first = remaining.remove(rng.random_range(0..remaining.len()));
    let mut seeds = vec![first];
    while seeds.len() < m {
        let mut best: Option<(F, LinkId)> = None;
        for &cand in &remaining {
            let sum = seeds
                .iter()
                .fold(F::zero(), |acc, &s| acc + net.link_gap(cand, s));
            let better = match best {
                None => true,
                Some((bs, _)) => sum > bs,
            };
            if better {
                best = Some((sum, cand));
            }
        }
        let (_, chosen) = best.expect("seed count never exceeds demand count");
        remaining.retain(|&l| l != chosen);
        seeds.push(chosen);
    }
    seeds
}

/// Cheapest serving orientation of `link` when approached from `node`.
fn nearest_orientation<F: Scalar>(
    net: &MixedNetwork<F>,
    node: NodeId,
    link: LinkId,
) -> (F, Direction) {
    let l = net.link(link);
    let fwd = net.dist(node, l.from);
    if l.kind == LinkKind::NonDirectionalEdge {
        let rev = net.dist(node, l.to);
        if rev < fwd {
            return (rev, Direction::Reverse);
        }
    }
    (fwd, Direction::Forward)
}

/// Picks the depot closest to the task set and the cyclic anchor position
/// that minimizes the route's travel distance. Ties break toward the
/// lowest depot node, then the lowest anchor index.
pub fn assign_depot<F: Scalar>(
    tasks: &[ServiceTask],
    net: &MixedNetwork<F>,
) -> (NodeId, Vec<ServiceTask>) {
    assert!(!tasks.is_empty(), "assign_depot needs at least one task");
    let mut best_depot = net.depots()[0];
    let mut best_sum = F::infinity();
    for &p in net.depots() {
        let sum = tasks
            .iter()
            .fold(F::zero(), |acc, t| acc + net.node_to_link(p, t.link));
        if sum < best_sum || (sum == best_sum && p < best_depot) {
            best_sum = sum;
            best_depot = p;
        }
    }
    let n = tasks.len();
    let mut best_k = 0usize;
    let mut best_cost = F::infinity();
    for k in 0..n {
        let mut cost = F::zero();
        let mut at = best_depot;
        for i in 0..n {
            let t = &tasks[(k + i) % n];
            cost += net.dist(at, t.start_node(net)) + net.link(t.link).length;
            at = t.end_node(net);
        }
        cost += net.dist(at, best_depot);
        if cost < best_cost {
            best_cost = cost;
            best_k = k;
        }
    }
    let rotated = (0..n).map(|i| tasks[(best_k + i) % n]).collect();
    (best_depot, rotated)
}

/// Builds the starting plan: every demand link assigned once, routes
/// anchored at their closest depots, workload spread within the limit.
/// Deterministic for a given rng state.
pub fn initial_solution<F: Scalar>(
    net: &MixedNetwork<F>,
    demands: &[LinkId],
    cfg: &SolverConfig<F>,
    rng: &mut impl Rng,
) -> Result<Solution<F>, ConstructError> {
    if demands.is_empty() {
        return Err(ConstructError::EmptyDemand);
    }
    for &d in demands {
        if net.service_demand(d) > cfg.capacity + F::feas_eps(cfg.capacity) {
            return Err(ConstructError::DemandExceedsCapacity(d));
        }
    }
    let total = demands
        .iter()
        .fold(F::zero(), |acc, &d| acc + net.service_demand(d));
    let m = fleet_size(total, cfg.capacity).max(1);

    let seeds = select_seeds(net, demands, m, rng);
    let mut unassigned: Vec<LinkId> = demands.iter().copied().filter(|l| !seeds.contains(l)).collect();
    unassigned.sort();

    let mut tasks: Vec<Vec<ServiceTask>> = seeds.iter().map(|&s| vec![ServiceTask::forward(s)]).collect();
    let mut loads: Vec<F> = seeds.iter().map(|&s| net.service_demand(s)).collect();
    let mut now: Vec<NodeId> = seeds.iter().map(|&s| net.link(s).to).collect();

    while !unassigned.is_empty() {
        let mut assigned_this_pass = false;
        for f in 0..m {
            if unassigned.is_empty() {
                break;
            }
            // nearest unassigned link from this vehicle's current position
            let mut best: Option<(F, Direction, usize)> = None;
            for (i, &cand) in unassigned.iter().enumerate() {
                let (d, dir) = nearest_orientation(net, now[f], cand);
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, dir, i));
                }
            }
            let (_, dir, idx) = best.unwrap();
            let link = unassigned[idx];
            if loads[f] + net.service_demand(link) > cfg.capacity + F::feas_eps(cfg.capacity) {
                continue; // tank full for this candidate; skip the turn
            }
            unassigned.remove(idx);
            let task = ServiceTask { link, direction: dir };
            now[f] = task.end_node(net);
            loads[f] += net.service_demand(link);
            tasks[f].push(task);
            assigned_this_pass = true;
        }
        if !assigned_this_pass {
            // every route's nearest pick overflows its tank; fall back to
            // the cheapest (route, link) pair that still fits
            let mut best: Option<(F, usize, Direction, usize)> = None;
            for f in 0..m {
                for (i, &cand) in unassigned.iter().enumerate() {
                    if loads[f] + net.service_demand(cand) > cfg.capacity + F::feas_eps(cfg.capacity) {
                        continue;
                    }
                    let (d, dir) = nearest_orientation(net, now[f], cand);
                    if best.map_or(true, |(bd, _, _, _)| d < bd) {
                        best = Some((d, f, dir, i));
                    }
                }
            }
            let Some((_, f, dir, idx)) = best else {
                return Err(ConstructError::NoCapacityFit);
            };
            let link = unassigned.remove(idx);
            let task = ServiceTask { link, direction: dir };
            now[f] = task.end_node(net);
            loads[f] += net.service_demand(link);
            tasks[f].push(task);
        }
    }

    let mut routes = Vec::with_capacity(m);
    for (vehicle, task_list) in tasks.into_iter().enumerate() {
        let (depot, rotated) = assign_depot(&task_list, net);
        let mut route = Route::new(vehicle, depot, cfg.capacity);
        route.tasks = rotated;
        route.recompute(net, cfg, &Windows::new());
        routes.push(route);
    }
    let sol = Solution::new(Stage::Fixed, routes);
    balance_workload(sol, net, cfg)
}

/// Moves tasks from the longest route to the shortest until the
/// working-time spread fits; capacity-blocked targets fall through to the
/// next-shortest route.
pub fn balance_workload<F: Scalar>(
    mut sol: Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Result<Solution<F>, ConstructError> {
    let n_tasks = sol.n_tasks();
    let cap = (10 * n_tasks).max(10);
    let tol = F::feas_eps(cfg.t_dif);
    for _ in 0..=cap {
        let spread = sol.cached_spread();
        if spread <= cfg.t_dif + tol {
            return Ok(sol);
        }
        let (r1, _) = argmax_by(&sol.routes, |r| r.work_time);
        let depot1 = sol.routes[r1].depot;

        // candidates in the long route, farthest from its depot first
        let mut candidates: Vec<(usize, LinkId, F)> = sol.routes[r1]
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t.link, net.node_to_link(depot1, t.link)))
            .collect();
        candidates.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.1.cmp(&b.1)));

        // target routes from shortest working time up
        let mut targets: Vec<usize> = (0..sol.routes.len()).filter(|&i| i != r1).collect();
        targets.sort_by(|&a, &b| {
            sol.routes[a]
                .work_time
                .partial_cmp(&sol.routes[b].work_time)
                .unwrap()
                .then(a.cmp(&b))
        });

        let mut moved = false;
        'candidate: for &(pos, link, _) in &candidates {
            for &r2 in &targets {
                let mut best: Option<(F, usize, Direction)> = None;
                for dir in directions_of(net, link) {
                    let task = ServiceTask { link, direction: dir };
                    for p in 0..=sol.routes[r2].tasks.len() {
                        if let Ok(d) = sol.delta_insert_cost(r2, p, task, net, cfg) {
                            if best.map_or(true, |(bd, _, _)| d < bd) {
                                best = Some((d, p, dir));
                            }
                        }
                    }
                }
                if let Some((_, p, dir)) = best {
                    sol.remove_task(r1, pos, net, cfg);
                    sol.insert_task(r2, p, ServiceTask { link, direction: dir }, net, cfg);
                    moved = true;
                    break 'candidate;
                }
            }
        }
        if !moved {
            break;
        }
    }
    let spread = sol.cached_spread();
    if spread <= cfg.t_dif + tol {
        Ok(sol)
    } else {
        Err(ConstructError::InfeasibleBalance {
            spread: spread.to_f64(),
            limit: cfg.t_dif.to_f64(),
        })
    }
}

pub(crate) fn directions_of<F: Scalar>(net: &MixedNetwork<F>, link: LinkId) -> Vec<Direction> {
    match net.link(link).kind {
        LinkKind::NonDirectionalEdge => vec![Direction::Forward, Direction::Reverse],
        _ => vec![Direction::Forward],
    }
}

fn argmax_by<F: Scalar, T>(items: &[T], f: impl Fn(&T) -> F) -> (usize, F) {
    let mut idx = 0;
    let mut best = f(&items[0]);
    for (i, item) in items.iter().enumerate().skip(1) {
        let v = f(item);
        if v > best {
            best = v;
            idx = i;
        }
    }
    (idx, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, LinkSpec, NetworkSpec, NodeSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn fleet_size_follows_capacity_bound() {
        assert_eq!(fleet_size(20_000.0, 20_000.0), 1);
        assert_eq!(fleet_size(22_000.0, 20_000.0), 2);
        assert_eq!(fleet_size(54_000.0, 20_000.0), 3);
    }

    #[test]
    fn single_demand_single_route() {
        let net = crate::network::testutil::two_node_net();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let sol = initial_solution(&net, &demands, &cfg(), &mut rng).unwrap();
        assert_eq!(sol.routes.len(), 1);
        assert_eq!(sol.routes[0].tasks.len(), 1);
        assert_eq!(sol.routes[0].depot, net.depots()[0]);
    }

    /// Two clusters of demand edges joined by one long bridge.
    fn two_cluster_net_scaled(street_len: f64) -> MixedNetwork<f64> {
        let mut links = Vec::new();
        // cluster A: path over nodes 0..4
        for i in 0..4u64 {
            links.push(LinkSpec { from: i, to: i + 1, directional: false, length: street_len });
        }
        // bridge 4 - 5
        links.push(LinkSpec { from: 4, to: 5, directional: false, length: 5_000.0 });
        // cluster B: path over nodes 5..9
        for i in 5..9u64 {
            links.push(LinkSpec { from: i, to: i + 1, directional: false, length: street_len });
        }
        let spec = NetworkSpec {
            nodes: (0..10u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0, 9],
            links,
            sprinkling_rate: 1.0,
        };
        // all short streets are demands; the bridge is not
        build_network(&spec, &[0, 1, 2, 3, 5, 6, 7, 8]).unwrap()
    }

    fn two_cluster_net() -> MixedNetwork<f64> {
        two_cluster_net_scaled(100.0)
    }

    #[test]
    fn seeds_disperse_across_clusters() {
        let net = two_cluster_net();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seeds = select_seeds(&net, &demands, 2, &mut rng);
            let side = |l: LinkId| l.0 <= 3;
            assert_ne!(side(seeds[0]), side(seeds[1]), "seeds landed in one cluster");
        }
    }

    #[test]
    fn kth_seed_maximizes_summed_gap() {
        let net = two_cluster_net();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let seeds = select_seeds(&net, &demands, 3, &mut rng);
        for k in 1..seeds.len() {
            let prior = &seeds[..k];
            let sum = |l: LinkId| prior.iter().fold(0.0, |acc, &s| acc + net.link_gap(l, s));
            let chosen = sum(seeds[k]);
            for &other in demands.iter().filter(|l| !seeds[..=k].contains(l)) {
                assert!(sum(other) <= chosen + 1e-9);
            }
        }
    }

    #[test]
    fn initial_solution_feasible_and_deterministic() {
        let net = two_cluster_net();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sol = initial_solution(&net, &demands, &c, &mut rng).unwrap();
        let demand_set: BTreeSet<LinkId> = demands.iter().copied().collect();
        assert!(sol.check_feasibility(&net, &c, &demand_set).is_empty());

        let mut rng2 = ChaCha8Rng::seed_from_u64(11);
        let sol2 = initial_solution(&net, &demands, &c, &mut rng2).unwrap();
        assert_eq!(sol.fingerprint(), sol2.fingerprint());
    }

    #[test]
    fn capacity_skip_splits_load() {
        let net = two_cluster_net();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let mut c = cfg();
        c.capacity = 450.0; // 8 links of 100 -> at least 2 vehicles
        c.t_dif = 1e9; // balancing out of the picture
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sol = initial_solution(&net, &demands, &c, &mut rng).unwrap();
        assert_eq!(sol.routes.len(), 2);
        for r in &sol.routes {
            assert!(r.load <= 450.0 + 1e-6);
        }
    }

    #[test]
    fn oversized_single_demand_rejected() {
        let net = crate::network::testutil::two_node_net();
        let mut c = cfg();
        c.capacity = 50.0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let err = initial_solution(&net, &demands, &c, &mut rng).unwrap_err();
        assert_eq!(err, ConstructError::DemandExceedsCapacity(LinkId(0)));
    }

    #[test]
    fn depot_choice_prefers_near_side() {
        let net = two_cluster_net();
        // tasks all in cluster A -> depot must be node 0, not node 9
        let tasks: Vec<ServiceTask> = (0..4).map(|i| ServiceTask::forward(LinkId(i))).collect();
        let (depot, _) = assign_depot(&tasks, &net);
        assert_eq!(net.node_label(depot), 0);

        let tasks_b: Vec<ServiceTask> = (5..9).map(|i| ServiceTask::forward(LinkId(i))).collect();
        let (depot_b, _) = assign_depot(&tasks_b, &net);
        assert_eq!(net.node_label(depot_b), 9);
    }

    #[test]
    fn depot_tie_breaks_low() {
        // symmetric path with depots at both ends
        let spec = NetworkSpec {
            nodes: (0..4u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0, 3],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 100.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 100.0 },
                LinkSpec { from: 2, to: 3, directional: false, length: 100.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[1]).unwrap();
        let (depot, _) = assign_depot(&[ServiceTask::forward(LinkId(1))], &net);
        assert_eq!(net.node_label(depot), 0);
    }

    #[test]
    fn anchor_matches_exhaustive_rotation() {
        let net = two_cluster_net();
        let tasks = vec![
            ServiceTask::forward(LinkId(2)),
            ServiceTask::forward(LinkId(0)),
            ServiceTask::forward(LinkId(3)),
        ];
        let (depot, rotated) = assign_depot(&tasks, &net);
        let cost = |order: &[ServiceTask]| {
            let mut at = depot;
            let mut c = 0.0;
            for t in order {
                c += net.dist(at, t.start_node(&net)) + net.link(t.link).length;
                at = t.end_node(&net);
            }
            c + net.dist(at, depot)
        };
        let chosen = cost(&rotated);
        for k in 0..tasks.len() {
            let rot: Vec<ServiceTask> = (0..tasks.len()).map(|i| tasks[(k + i) % tasks.len()]).collect();
            assert!(chosen <= cost(&rot) + 1e-9);
        }
    }

    #[test]
    fn balance_noop_cases() {
        let net = crate::network::testutil::two_node_net();
        let c = cfg();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sol = initial_solution(&net, &demands, &c, &mut rng).unwrap();
        let fp = sol.fingerprint();
        let balanced = balance_workload(sol, &net, &c).unwrap();
        assert_eq!(balanced.fingerprint(), fp); // single route: spread 0
    }

    #[test]
    fn balance_reduces_spread_to_limit() {
        // 2 km streets: the 6-vs-2 split leaves a spread near 50 minutes
        let net = two_cluster_net_scaled(2_000.0);
        let c = {
            let mut c = cfg();
            c.t_dif = 15.0;
            c
        };
        // lopsided split: 6 links on route 0, 2 on route 1
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let heavy: Vec<ServiceTask> = demands[..6].iter().map(|&l| ServiceTask::forward(l)).collect();
        let light: Vec<ServiceTask> = demands[6..].iter().map(|&l| ServiceTask::forward(l)).collect();
        let (d0, t0) = assign_depot(&heavy, &net);
        let (d1, t1) = assign_depot(&light, &net);
        let mut r0 = Route::new(0, d0, c.capacity);
        r0.tasks = t0;
        r0.recompute(&net, &c, &Windows::new());
        let mut r1 = Route::new(1, d1, c.capacity);
        r1.tasks = t1;
        r1.recompute(&net, &c, &Windows::new());
        let sol = Solution::new(Stage::Fixed, vec![r0, r1]);
        let before = sol.cached_spread();
        let balanced = balance_workload(sol, &net, &c).unwrap();
        let after = balanced.cached_spread();
        assert!(after <= 15.0 + 1e-9);
        if before > 15.0 {
            assert!(after < before);
        }
    }
}
