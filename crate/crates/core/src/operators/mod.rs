//! Destroy and repair operators, the insertion-search acceleration filter,
//! depot re-optimization, and the tabu-list.

mod destroy;
mod repair;
mod tabu;

pub use destroy::{
    destroy_farthest_depot, destroy_non_adjacent, destroy_random, destroy_time_related,
    destroy_worst, removal_gain,
};
pub use repair::{
    noise_term, repair_greedy, repair_noise_greedy, repair_noise_regret, repair_regret2,
    repair_time_window, RepairError,
};
pub use tabu::{TabuKey, TabuList};

use crate::config::SolverConfig;
use crate::construct::assign_depot;
use crate::network::{LinkId, MixedNetwork};
use crate::scalar::Scalar;
use crate::solution::{ServiceTask, Solution, Stage};

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum DestroyOp {
    Random,
    Worst,
    NonAdjacent,
    FarthestDepot,
    TimeRelated,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum RepairOp {
    Greedy,
    NoiseGreedy,
    Regret2,
    NoiseRegret,
    TimeWindow,
}

pub const DESTROY_OPS: [DestroyOp; 5] = [
    DestroyOp::Random,
    DestroyOp::Worst,
    DestroyOp::NonAdjacent,
    DestroyOp::FarthestDepot,
    DestroyOp::TimeRelated,
];

pub const REPAIR_OPS: [RepairOp; 5] = [
    RepairOp::Greedy,
    RepairOp::NoiseGreedy,
    RepairOp::Regret2,
    RepairOp::NoiseRegret,
    RepairOp::TimeWindow,
];

pub const N_PAIRS: usize = DESTROY_OPS.len() * REPAIR_OPS.len();

impl DestroyOp {
    pub fn name(self) -> &'static str {
        match self {
            DestroyOp::Random => "random",
            DestroyOp::Worst => "worst",
            DestroyOp::NonAdjacent => "non_adjacent",
            DestroyOp::FarthestDepot => "farthest_depot",
            DestroyOp::TimeRelated => "time_related",
        }
    }

    fn index(self) -> usize {
        DESTROY_OPS.iter().position(|&d| d == self).unwrap()
    }
}

impl RepairOp {
    pub fn name(self) -> &'static str {
        match self {
            RepairOp::Greedy => "greedy",
            RepairOp::NoiseGreedy => "noise_greedy",
            RepairOp::Regret2 => "regret2",
            RepairOp::NoiseRegret => "noise_regret",
            RepairOp::TimeWindow => "time_window",
        }
    }

    fn index(self) -> usize {
        REPAIR_OPS.iter().position(|&r| r == self).unwrap()
    }
}

pub fn pair_index(d: DestroyOp, r: RepairOp) -> usize {
    d.index() * REPAIR_OPS.len() + r.index()
}

pub fn pair_from_index(i: usize) -> (DestroyOp, RepairOp) {
    (DESTROY_OPS[i / REPAIR_OPS.len()], REPAIR_OPS[i % REPAIR_OPS.len()])
}

/// A destroy-repair pair is deterministic when both sides always produce
/// the same output for the same input solution; only those are worth
/// remembering in the tabu-list.
pub fn is_deterministic_pair(d: DestroyOp, r: RepairOp) -> bool {
    let d_det = matches!(
        d,
        DestroyOp::Worst | DestroyOp::NonAdjacent | DestroyOp::FarthestDepot | DestroyOp::TimeRelated
    );
    let r_det = matches!(r, RepairOp::Greedy | RepairOp::Regret2 | RepairOp::TimeWindow);
    d_det && r_det
}

/// Tasks removed by one destroy step: the gapped solution plus the removed
/// tasks. Edge directions are reset so reinsertion re-chooses orientation.
#[derive(Clone, Debug)]
pub struct RemovalResult<F> {
    pub partial: Solution<F>,
    pub removed: Vec<ServiceTask>,
}

/// Number of tasks one destroy step removes; zero only when there is
/// nothing to remove.
pub fn gamma_count<F: Scalar>(fraction: F, n_tasks: usize) -> usize {
    if n_tasks == 0 {
        return 0;
    }
    let raw = (fraction * F::from_usize(n_tasks)).round().to_f64() as usize;
    raw.clamp(1, n_tasks)
}

/// Insertion-search domain for one task: routes whose depot (anchor while
/// re-planning) lies within `accel_ratio` times the closest one.
pub fn candidate_routes<F: Scalar>(
    link: LinkId,
    sol: &Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Vec<usize> {
    let all: Vec<usize> = (0..sol.routes.len()).collect();
    if !cfg.acceleration_enabled() || sol.routes.len() <= 1 {
        return all;
    }
    let dists: Vec<F> = sol
        .routes
        .iter()
        .map(|r| net.node_to_link(r.origin(), link))
        .collect();
    let best = dists.iter().copied().fold(F::infinity(), F::min);
    let cutoff = best * cfg.accel_ratio + F::feas_eps(best);
    all.into_iter().filter(|&i| dists[i] <= cutoff).collect()
}

/// Re-runs depot selection per route after a repair; keeps the original
/// depot when the re-anchored alternative is no cheaper. Fixed stage only:
/// re-planned routes start wherever their vehicle currently is.
pub fn reoptimize_depots<F: Scalar>(
    sol: &mut Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) {
    if sol.stage != Stage::Fixed {
        return;
    }
    let windows = std::mem::take(&mut sol.windows);
    for route in &mut sol.routes {
        if route.tasks.is_empty() {
            continue;
        }
        let (depot, rotated) = assign_depot(&route.tasks, net);
        if depot == route.depot && rotated == route.tasks {
            continue;
        }
        let candidate_dd = {
            let mut at = depot;
            let mut dd = F::zero();
            for t in &rotated {
                dd += net.dist(at, t.start_node(net));
                at = t.end_node(net);
            }
            dd + net.dist(at, depot)
        };
        if candidate_dd < route.deadhead_distance {
            route.depot = depot;
            route.tasks = rotated;
            route.recompute(net, cfg, &windows);
        }
    }
    sol.windows = windows;
}
