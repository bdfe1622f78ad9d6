//! Independent optimality oracle and solution audit. Costs here are
//! derived from raw link data and the distance matrix only; none of the
//! solver's evaluation code is reused, so agreement between the two is
//! meaningful evidence.

use thiserror::Error;

use crate::config::SolverConfig;
use crate::network::{LinkId, LinkKind, MixedNetwork, NodeId};
use crate::scalar::Scalar;
use crate::solution::{Direction, ServiceTask, Solution, Violation};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum OracleError {
    #[error("{0} demand links exceed the oracle's exhaustive-search cap of 8")]
    TooLarge(usize),
    #[error("no assignment satisfies capacity and working-time constraints")]
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct OracleSolution<F> {
    pub objective: F,
    pub routes: Vec<Vec<ServiceTask>>,
    pub depots: Vec<NodeId>,
}

/// Fixed-stage route travel cost and working time from raw data.
fn raw_route_cost<F: Scalar>(
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    depot: NodeId,
    block: &[ServiceTask],
) -> (F, F) {
    let mut service = F::zero();
    let mut deadhead = F::zero();
    let mut at = depot;
    for t in block {
        let l = net.link(t.link);
        let (s, e) = match t.direction {
            Direction::Forward => (l.from, l.to),
            Direction::Reverse => (l.to, l.from),
        };
        deadhead += net.dist(at, s);
        service += l.length;
        at = e;
    }
    deadhead += net.dist(at, depot);
    let v_r = cfg.v_service_kmh * F::from_f64(1000.0 / 60.0);
    let v_n = cfg.v_deadhead_kmh * F::from_f64(1000.0 / 60.0);
    (service + deadhead, service / v_r + deadhead / v_n)
}

/// Exhaustively enumerates task-to-vehicle assignments, within-route
/// orders, edge orientations and per-route depot choices for the fixed
/// stage; capacity and working-time spread are hard. Only capacity prunes
/// the search.
pub fn brute_force_optimum<F: Scalar>(
    net: &MixedNetwork<F>,
    demands: &[LinkId],
    m: usize,
    cfg: &SolverConfig<F>,
) -> Result<OracleSolution<F>, OracleError> {
    let n = demands.len();
    if n > 8 {
        return Err(OracleError::TooLarge(n));
    }
    if n == 0 || m == 0 || m > n {
        return Err(OracleError::Infeasible);
    }
    let depots = net.depots().to_vec();
    let cap_tol = F::feas_eps(cfg.capacity);
    let spread_tol = F::feas_eps(cfg.t_dif);

    struct Search<'a, F> {
        net: &'a MixedNetwork<F>,
        cfg: &'a SolverConfig<F>,
        demands: &'a [LinkId],
        depots: Vec<NodeId>,
        m: usize,
        cap_tol: F,
        spread_tol: F,
        best: Option<OracleSolution<F>>,
    }

    impl<F: Scalar> Search<'_, F> {
        fn leaf(&mut self, blocks: &[Vec<ServiceTask>]) {
            let o = self.depots.len();
            let combos = o.pow(self.m as u32);
            for combo in 0..combos {
                let mut total = F::zero();
                let mut min_work = F::infinity();
                let mut max_work = F::neg_infinity();
                let mut chosen = Vec::with_capacity(self.m);
                for (b, block) in blocks.iter().enumerate() {
                    let depot = self.depots[(combo / o.pow(b as u32)) % o];
                    chosen.push(depot);
                    let (dist, work) = raw_route_cost(self.net, self.cfg, depot, block);
                    total += dist;
                    min_work = min_work.min(work);
                    max_work = max_work.max(work);
                }
                if max_work - min_work > self.cfg.t_dif + self.spread_tol {
                    continue;
                }
                if self.best.as_ref().map_or(true, |b| total < b.objective) {
                    self.best = Some(OracleSolution {
                        objective: total,
                        routes: blocks.to_vec(),
                        depots: chosen,
                    });
                }
            }
        }

        fn orientations(&self, link: LinkId) -> Vec<Direction> {
            match self.net.link(link).kind {
                LinkKind::NonDirectionalEdge => vec![Direction::Forward, Direction::Reverse],
                _ => vec![Direction::Forward],
            }
        }

        fn recurse(
            &mut self,
            blocks: &mut Vec<Vec<ServiceTask>>,
            used: u32,
            current_load: F,
        ) {
            let n = self.demands.len();
            let remaining = n - (used.count_ones() as usize);
            if remaining == 0 {
                // every vehicle must exist and serve something
                if blocks.len() == self.m && !blocks.last().map_or(true, |b| b.is_empty()) {
                    self.leaf(blocks);
                }
                return;
            }
            // close the current block and open the next; the new block and
            // every still-unopened one need at least one task each
            let unopened = self.m - blocks.len();
            if !blocks.last().map_or(true, |b| b.is_empty())
                && unopened > 0
                && remaining >= unopened
            {
                blocks.push(Vec::new());
                self.recurse(blocks, used, F::zero());
                blocks.pop();
            }
            // or extend the current block with any unused task
            for (i, &link) in self.demands.iter().enumerate() {
                if used & (1 << i) != 0 {
                    continue;
                }
                let demand = self.net.service_demand(link);
                if current_load + demand > self.cfg.capacity + self.cap_tol {
                    continue;
                }
                for dir in self.orientations(link) {
                    blocks
                        .last_mut()
                        .expect("at least one open block")
                        .push(ServiceTask { link, direction: dir });
                    self.recurse(blocks, used | (1 << i), current_load + demand);
                    blocks.last_mut().unwrap().pop();
                }
            }
        }
    }

    let mut search = Search {
        net,
        cfg,
        demands,
        depots,
        m,
        cap_tol,
        spread_tol,
        best: None,
    };
    let mut blocks = vec![Vec::new()];
    search.recurse(&mut blocks, 0, F::zero());
    search.best.ok_or(OracleError::Infeasible)
}

#[derive(Clone, Debug)]
pub struct AuditReport<F> {
    pub passed: bool,
    pub violations: Vec<Violation<F>>,
    pub evaluated_total: F,
    pub independent_total: F,
    pub cache_drift: F,
}

/// Re-derives the objective from raw link data (bypassing both the
/// evaluator and the caches) and cross-checks feasibility. Any mismatch
/// beyond 1e-6 fails.
pub fn audit_solution<F: Scalar>(
    sol: &Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    demand_set: &std::collections::BTreeSet<LinkId>,
) -> AuditReport<F> {
    let v_r = cfg.v_service_kmh * F::from_f64(1000.0 / 60.0);
    let v_n = cfg.v_deadhead_kmh * F::from_f64(1000.0 / 60.0);
    let mut independent = F::zero();
    let mut cache_drift = F::zero();
    for route in &sol.routes {
        let origin = route.anchor.unwrap_or(route.depot);
        let mut service = F::zero();
        let mut deadhead = F::zero();
        let mut clock = route.start_offset;
        let mut lateness_sq = F::zero();
        let mut at = origin;
        if route.tasks.is_empty() && route.anchor.is_some() {
            deadhead += net.dist(origin, route.depot);
        }
        for t in &route.tasks {
            let l = net.link(t.link);
            let (s, e) = match t.direction {
                Direction::Forward => (l.from, l.to),
                Direction::Reverse => (l.to, l.from),
            };
            let gap = net.dist(at, s);
            deadhead += gap;
            clock += gap / v_n;
            if let Some(&(a, b)) = sol.windows.get(&t.link) {
                if clock < a {
                    clock = a;
                }
                let late = (clock - b).max(F::zero());
                lateness_sq += late * late;
            }
            service += l.length;
            clock += l.length / v_r;
            at = e;
        }
        if !route.tasks.is_empty() {
            deadhead += net.dist(at, route.depot);
        }
        let penalty = match sol.stage {
            crate::solution::Stage::Fixed => F::zero(),
            crate::solution::Stage::Replan => cfg.delta * lateness_sq,
        };
        independent += service + deadhead + penalty;
        cache_drift = cache_drift
            .max((route.service_distance - service).abs())
            .max((route.deadhead_distance - deadhead).abs());
    }
    let evaluated = sol
        .evaluate(net, cfg)
        .map(|b| b.total)
        .unwrap_or(F::nan());
    let violations = sol.check_feasibility(net, cfg, demand_set);
    let tol = F::from_f64(1e-6);
    let passed = violations.is_empty()
        && (evaluated - independent).abs() <= tol
        && cache_drift <= tol
        && evaluated.is_finite();
    AuditReport {
        passed,
        violations,
        evaluated_total: evaluated,
        independent_total: independent,
        cache_drift,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::initial_solution;
    use crate::network::testutil::two_node_net;
    use crate::network::{build_network, LinkSpec, NetworkSpec, NodeSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn single_task_round_trip_cost() {
        let net = two_node_net();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let best = brute_force_optimum(&net, &demands, 1, &cfg()).unwrap();
        // serve the 100 m arc, return 100 m over the parallel edge
        assert!((best.objective - 200.0).abs() < 1e-9);
        assert_eq!(best.routes.len(), 1);
    }

    #[test]
    fn collinear_tasks_sweep_is_optimal() {
        let spec = NetworkSpec {
            nodes: (0..4u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: (0..3)
                .map(|i| LinkSpec {
                    from: i,
                    to: i + 1,
                    directional: false,
                    length: 100.0,
                })
                .collect(),
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0, 1, 2]).unwrap();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let best = brute_force_optimum(&net, &demands, 1, &cfg()).unwrap();
        // serve 0-1-2-3 in order (300 m) and drive 300 m home
        assert!((best.objective - 600.0).abs() < 1e-9);
        let order: Vec<u32> = best.routes[0].iter().map(|t| t.link.0).collect();
        assert!(order == vec![0, 1, 2] || order == vec![2, 1, 0]);
    }

    #[test]
    fn capacity_infeasibility_is_reported() {
        let net = two_node_net();
        let mut c = cfg();
        c.capacity = 50.0; // the single 100 m demand cannot fit
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        assert_eq!(
            brute_force_optimum(&net, &demands, 1, &c).unwrap_err(),
            OracleError::Infeasible
        );
    }

    #[test]
    fn size_cap_enforced() {
        let spec = NetworkSpec {
            nodes: (0..10u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: (0..9)
                .map(|i| LinkSpec { from: i, to: i + 1, directional: false, length: 10.0 })
                .collect(),
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &(0..9).collect::<Vec<_>>()).unwrap();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        assert_eq!(
            brute_force_optimum(&net, &demands, 1, &cfg()).unwrap_err(),
            OracleError::TooLarge(9)
        );
    }

    #[test]
    fn two_vehicle_split_respects_capacity() {
        // four 100 m demand edges in a ring; capacity for two each
        let spec = NetworkSpec {
            nodes: (0..4u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: (0..4)
                .map(|i| LinkSpec {
                    from: i,
                    to: (i + 1) % 4,
                    directional: false,
                    length: 100.0,
                })
                .collect(),
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0, 1, 2, 3]).unwrap();
        let mut c = cfg();
        c.capacity = 200.0;
        c.t_dif = 1e9;
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let best = brute_force_optimum(&net, &demands, 2, &c).unwrap();
        assert_eq!(best.routes.len(), 2);
        for block in &best.routes {
            let load: f64 = block.iter().map(|t| net.link(t.link).length).sum();
            assert!(load <= 200.0 + 1e-9);
        }
    }

    #[test]
    fn search_keeps_an_already_optimal_start() {
        // three collinear demand edges, one vehicle: start the search at
        // the exhaustive optimum and it must stay there
        let spec = NetworkSpec {
            nodes: (0..4u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: (0..3)
                .map(|i| LinkSpec { from: i, to: i + 1, directional: false, length: 100.0 })
                .collect(),
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0, 1, 2]).unwrap();
        let c = cfg();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let oracle = brute_force_optimum(&net, &demands, 1, &c).unwrap();
        let mut route = crate::solution::Route::new(0, oracle.depots[0], c.capacity);
        route.tasks = oracle.routes[0].clone();
        route.recompute(&net, &c, &Default::default());
        let s0 = crate::solution::Solution::new(crate::solution::Stage::Fixed, vec![route]);
        assert!((s0.evaluate(&net, &c).unwrap().total - oracle.objective).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = crate::alns::run_alns(&s0, &net, &c, &mut rng);
        let f_best = out.best.evaluate(&net, &c).unwrap().total;
        assert!((f_best - oracle.objective).abs() < 1e-9);
    }

    #[test]
    fn audit_passes_fresh_and_catches_stale_caches() {
        let net = two_node_net();
        let c = cfg();
        let demands: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sol = initial_solution(&net, &demands, &c, &mut rng).unwrap();
        let demand_set: BTreeSet<LinkId> = demands.iter().copied().collect();
        let report = audit_solution(&sol, &net, &c, &demand_set);
        assert!(report.passed, "violations: {:?}", report.violations);
        assert!((report.evaluated_total - report.independent_total).abs() < 1e-9);

        // tamper: stale cache after an unsynchronized edit
        let spec = NetworkSpec {
            nodes: (0..3u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 100.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 250.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net2 = build_network(&spec, &[0, 1]).unwrap();
        let demands2: Vec<LinkId> = net2.demand_links().map(|l| l.id).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut tampered = initial_solution(&net2, &demands2, &c, &mut rng).unwrap();
        tampered.routes[0].tasks.reverse(); // caches now lie
        let demand_set2: BTreeSet<LinkId> = demands2.iter().copied().collect();
        let report = audit_solution(&tampered, &net2, &c, &demand_set2);
        assert!(!report.passed);
        assert!(report.cache_drift > 1e-6);
    }
}
