//! Adaptive large neighborhood search: roulette-wheel pair selection over
//! adaptive weights, simulated-annealing acceptance, tabu veto of repeated
//! deterministic moves, and a perturbation/fallback block that kicks in
//! after prolonged stagnation.

use std::time::Instant;

use rand::Rng;

use crate::config::SolverConfig;
use crate::network::MixedNetwork;
use crate::operators::{
    destroy_farthest_depot, destroy_non_adjacent, destroy_random, destroy_time_related,
    destroy_worst, is_deterministic_pair, pair_from_index, repair_greedy, repair_noise_greedy,
    repair_noise_regret, repair_regret2, repair_time_window, DestroyOp, RepairError, RepairOp,
    TabuList, N_PAIRS,
};
use crate::scalar::Scalar;
use crate::solution::Solution;

/// Per destroy-repair pair: adaptive weight, phase score, phase use count.
#[derive(Clone, Debug)]
pub struct PairStats<F> {
    pub weights: Vec<F>,
    pub scores: Vec<F>,
    pub uses: Vec<u32>,
}

impl<F: Scalar> PairStats<F> {
    pub fn new() -> Self {
        PairStats {
            weights: vec![F::one(); N_PAIRS],
            scores: vec![F::zero(); N_PAIRS],
            uses: vec![0; N_PAIRS],
        }
    }

    /// Selection probabilities implied by the current weights.
    pub fn probabilities(&self) -> Vec<F> {
        let total = self.weights.iter().fold(F::zero(), |a, &w| a + w);
        self.weights.iter().map(|&w| w / total).collect()
    }
}

impl<F: Scalar> Default for PairStats<F> {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum MoveOutcome {
    NewBest,
    Improving,
    AcceptedWorse,
    Rejected,
}

/// Books one use of a pair and its score for the phase.
pub fn score_event<F: Scalar>(
    stats: &mut PairStats<F>,
    pair: usize,
    outcome: MoveOutcome,
    cfg: &SolverConfig<F>,
) {
    stats.uses[pair] += 1;
    stats.scores[pair] += match outcome {
        MoveOutcome::NewBest => cfg.sco3,
        MoveOutcome::Improving => cfg.sco2,
        MoveOutcome::AcceptedWorse => cfg.sco1,
        MoveOutcome::Rejected => F::zero(),
    };
}

/// Phase-boundary weight update: `w = tau*w + score/uses` for pairs used
/// this phase, clamped into [a_min, a_max]; scores and counters reset.
pub fn update_weights<F: Scalar>(stats: &mut PairStats<F>, cfg: &SolverConfig<F>) {
    for i in 0..N_PAIRS {
        if stats.uses[i] > 0 {
            let fresh = cfg.tau * stats.weights[i] + stats.scores[i] / F::from_usize(stats.uses[i] as usize);
            stats.weights[i] = fresh.max(cfg.a_min).min(cfg.a_max);
        }
        stats.scores[i] = F::zero();
        stats.uses[i] = 0;
    }
}

/// Roulette-wheel pair selection over non-vetoed pairs. Returns the pair
/// index and whether the veto had to be ignored because everything was
/// tabu.
pub fn select_pair<F: Scalar>(
    stats: &PairStats<F>,
    tabu: Option<&TabuList>,
    fingerprint: u64,
    rng: &mut impl Rng,
) -> (usize, bool) {
    let vetoed = |i: usize| -> bool {
        let Some(t) = tabu else { return false };
        let (d, r) = pair_from_index(i);
        is_deterministic_pair(d, r) && t.contains((fingerprint, i as u8))
    };
    let total_free = (0..N_PAIRS)
        .filter(|&i| !vetoed(i))
        .fold(F::zero(), |a, i| a + stats.weights[i]);
    let (use_all, total) = if total_free > F::zero() {
        (false, total_free)
    } else {
        let all = stats.weights.iter().fold(F::zero(), |a, &w| a + w);
        (true, all)
    };
    let mut target = F::from_f64(rng.random::<f64>()) * total;
    let mut chosen = None;
    for i in 0..N_PAIRS {
        if !use_all && vetoed(i) {
            continue;
        }
        let w = stats.weights[i];
        if w <= F::zero() {
            continue;
        }
        if target < w {
            chosen = Some(i);
            break;
        }
        target -= w;
    }
    let pick = chosen.unwrap_or_else(|| {
        // numerical tail: fall back to the last positive-weight pair
        (0..N_PAIRS)
            .rev()
            .find(|&i| stats.weights[i] > F::zero() && (use_all || !vetoed(i)))
            .unwrap_or(0)
    });
    (pick, use_all)
}

/// Simulated-annealing acceptance: improving moves always pass, worsening
/// ones with probability `exp(-(f_new - f_curr)/T)`.
pub fn accept<F: Scalar>(f_new: F, f_curr: F, temp: F, rng: &mut impl Rng) -> bool {
    if f_new < f_curr {
        return true;
    }
    if temp <= F::zero() {
        return false;
    }
    let p = (-(f_new - f_curr) / temp).exp();
    F::from_f64(rng.random::<f64>()) < p
}

/// Initial temperature and its floor: a solution `t0_worse_frac` worse
/// than the start is accepted with probability `t0_accept_prob`.
pub fn temperature_schedule<F: Scalar>(cfg: &SolverConfig<F>, f0: F) -> (F, F) {
    let denom = (F::one() / cfg.t0_accept_prob).ln();
    let mut t0 = cfg.t0_worse_frac * f0 / denom;
    if !(t0 > F::zero()) || !t0.is_finite() {
        t0 = F::one();
    }
    (t0, t0 * cfg.temp_floor_frac)
}

/// Large random destruction repaired by both greedy and 2-regret; the
/// better result wins. Falls back to the input when both repairs fail.
pub fn shake<F: Scalar>(
    s: &Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    rng: &mut impl Rng,
) -> Solution<F> {
    let removal = destroy_random(s, cfg.gamma_shake, net, cfg, rng);
    let a = repair_greedy(removal.partial.clone(), removal.removed.clone(), net, cfg);
    let b = repair_regret2(removal.partial, removal.removed, net, cfg);
    let cost = |s: &Solution<F>| s.search_cost(net, cfg).expect("solver solution evaluates");
    match (a, b) {
        (Ok(x), Ok(y)) => {
            if cost(&x) <= cost(&y) {
                x
            } else {
                y
            }
        }
        (Ok(x), Err(_)) => x,
        (Err(_), Ok(y)) => y,
        (Err(_), Err(_)) => s.clone(),
    }
}

/// Uniform coin flip between the current solution and the last superseded
/// one; degenerates to the current solution when nothing was superseded.
pub fn fallback<F: Scalar>(
    s_curr: &Solution<F>,
    s_before: Option<&Solution<F>>,
    rng: &mut impl Rng,
) -> Solution<F> {
    match s_before {
        None => s_curr.clone(),
        Some(b) => {
            if rng.random_range(0..2u32) == 0 {
                s_curr.clone()
            } else {
                b.clone()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceRow<F> {
    pub iter: u64,
    pub f_curr: F,
    pub f_best: F,
    pub destroy: DestroyOp,
    pub repair: RepairOp,
    pub accepted: bool,
    pub temp: F,
}

impl<F: Scalar> TraceRow<F> {
    pub fn render(&self) -> String {
        format!(
            "iter {} curr {} best {} pair {}/{} accepted {} temp {}",
            self.iter,
            self.f_curr,
            self.f_best,
            self.destroy.name(),
            self.repair.name(),
            self.accepted as u8,
            self.temp
        )
    }
}

#[derive(Clone, Debug)]
pub struct AlnsOutcome<F> {
    pub best: Solution<F>,
    pub iterations: u64,
    pub trace: Vec<TraceRow<F>>,
    /// (elapsed ms, best search cost) at every improvement, starting with
    /// the initial solution. Wall-clock based: for reporting only.
    pub improvements: Vec<(u128, F)>,
    pub wall_ms: u128,
    pub tabu_overrides: u64,
}

impl<F: Scalar> AlnsOutcome<F> {
    /// Best objective known by `at_ms` of wall time.
    pub fn objective_at_ms(&self, at_ms: u128) -> Option<F> {
        self.improvements
            .iter()
            .take_while(|(t, _)| *t <= at_ms)
            .last()
            .map(|&(_, f)| f)
    }
}

/// One full search. Feasibility with respect to the working-time spread is
/// tracked lexicographically: once a spread-feasible best exists, no
/// infeasible solution can displace it.
pub fn run_alns<F: Scalar>(
    s0: &Solution<F>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    rng: &mut impl Rng,
) -> AlnsOutcome<F> {
    let started = Instant::now();
    let cost = |s: &Solution<F>| s.search_cost(net, cfg).expect("solver solution evaluates");

    let mut s_curr = s0.clone();
    s_curr.recompute_all(net, cfg);
    let mut f_curr = cost(&s_curr);
    let mut s_best = s_curr.clone();
    let mut f_best = f_curr;
    let mut best_feasible = s_best.spread_feasible(cfg);
    let mut s_before: Option<(Solution<F>, F)> = None;

    let (mut temp, temp_floor) = temperature_schedule(cfg, f_curr);
    let mut stats: PairStats<F> = PairStats::new();
    let mut tabu = TabuList::new(cfg.tabu_capacity);
    let mut trace = Vec::new();
    let mut improvements = vec![(0u128, f_best)];
    let mut tabu_overrides = 0u64;
    let mut accepted_moves = 0u64;
    let mut iterations_run = 0u64;

    let better_best = |f: F, feas: bool, f_b: F, b_feas: bool| -> bool {
        (feas && !b_feas) || (feas == b_feas && f < f_b)
    };

    let mut iter: u64 = 1;
    let mut non_iter: u64 = 1;
    while non_iter <= cfg.m1 && iter <= cfg.m2 {
        if let Some(limit) = cfg.time_limit_s {
            if started.elapsed().as_secs_f64() > limit {
                break;
            }
        }
        let fp = s_curr.fingerprint();
        let (pair_idx, forced) = select_pair(
            &stats,
            if cfg.tabu_enabled() { Some(&tabu) } else { None },
            fp,
            rng,
        );
        if forced {
            tabu_overrides += 1;
        }
        let (d_op, r_op) = pair_from_index(pair_idx);

        let attempt: Result<Solution<F>, RepairError> = {
            let removal = match d_op {
                DestroyOp::Random => destroy_random(&s_curr, cfg.gamma, net, cfg, rng),
                DestroyOp::Worst => destroy_worst(&s_curr, cfg.gamma, net, cfg),
                DestroyOp::NonAdjacent => destroy_non_adjacent(&s_curr, cfg.gamma, net, cfg),
                DestroyOp::FarthestDepot => destroy_farthest_depot(&s_curr, cfg.gamma, net, cfg),
                DestroyOp::TimeRelated => destroy_time_related(&s_curr, cfg.gamma, net, cfg, rng),
            };
            match r_op {
                RepairOp::Greedy => repair_greedy(removal.partial, removal.removed, net, cfg),
                RepairOp::NoiseGreedy => repair_noise_greedy(
                    removal.partial,
                    removal.removed,
                    net,
                    cfg,
                    iter,
                    cfg.m2,
                    rng,
                ),
                RepairOp::Regret2 => repair_regret2(removal.partial, removal.removed, net, cfg),
                RepairOp::NoiseRegret => repair_noise_regret(
                    removal.partial,
                    removal.removed,
                    net,
                    cfg,
                    iter,
                    cfg.m2,
                    rng,
                ),
                RepairOp::TimeWindow => {
                    repair_time_window(removal.partial, removal.removed, net, cfg)
                }
            }
        };

        if cfg.tabu_enabled() && is_deterministic_pair(d_op, r_op) {
            tabu.record((fp, pair_idx as u8));
        }
        temp = (temp * cfg.cooling).max(temp_floor);

        let mut accepted = false;
        let outcome = match attempt {
            Err(_) => {
                non_iter += 1;
                MoveOutcome::Rejected
            }
            Ok(s_new) => {
                let f_new = cost(&s_new);
                let new_feasible = s_new.spread_feasible(cfg);
                if better_best(f_new, new_feasible, f_best, best_feasible) {
                    s_best = s_new.clone();
                    f_best = f_new;
                    best_feasible = new_feasible;
                    s_before = Some((std::mem::replace(&mut s_curr, s_new), f_curr));
                    f_curr = f_new;
                    non_iter = 1;
                    accepted = true;
                    improvements.push((started.elapsed().as_millis(), f_best));
                    MoveOutcome::NewBest
                } else if f_new < f_curr || accept(f_new, f_curr, temp, rng) {
                    let improving = f_new < f_curr;
                    s_before = Some((std::mem::replace(&mut s_curr, s_new), f_curr));
                    f_curr = f_new;
                    non_iter += 1;
                    accepted = true;
                    if improving {
                        MoveOutcome::Improving
                    } else {
                        MoveOutcome::AcceptedWorse
                    }
                } else {
                    non_iter += 1;
                    MoveOutcome::Rejected
                }
            }
        };
        score_event(&mut stats, pair_idx, outcome, cfg);

        if accepted {
            accepted_moves += 1;
            if cfg.recompute_period > 0 && accepted_moves % cfg.recompute_period == 0 {
                s_curr.recompute_all(net, cfg);
                f_curr = cost(&s_curr);
            }
        }

        trace.push(TraceRow {
            iter,
            f_curr,
            f_best,
            destroy: d_op,
            repair: r_op,
            accepted,
            temp,
        });

        if cfg.perturbation_enabled() && non_iter > cfg.phi1 {
            if non_iter % cfg.phi2 == 0 {
                let s_shaken = shake(&s_curr, net, cfg, rng);
                let f_shaken = cost(&s_shaken);
                let shaken_feasible = s_shaken.spread_feasible(cfg);
                if better_best(f_shaken, shaken_feasible, f_best, best_feasible) {
                    s_best = s_shaken.clone();
                    f_best = f_shaken;
                    best_feasible = shaken_feasible;
                    s_before = Some((std::mem::replace(&mut s_curr, s_shaken), f_curr));
                    f_curr = f_best;
                    non_iter = 1;
                    improvements.push((started.elapsed().as_millis(), f_best));
                } else if f_shaken < f_curr || accept(f_shaken, f_curr, temp, rng) {
                    s_before = Some((std::mem::replace(&mut s_curr, s_shaken), f_curr));
                    f_curr = f_shaken;
                } else if let Some((b, fb)) = s_before.take() {
                    if rng.random_range(0..2u32) == 1 {
                        let old = std::mem::replace(&mut s_curr, b);
                        s_before = Some((old, f_curr));
                        f_curr = fb;
                    } else {
                        s_before = Some((b, fb));
                    }
                }
            } else if let Some((b, fb)) = s_before.take() {
                if rng.random_range(0..2u32) == 1 {
                    let old = std::mem::replace(&mut s_curr, b);
                    s_before = Some((old, f_curr));
                    f_curr = fb;
                } else {
                    s_before = Some((b, fb));
                }
            }
        }

        if iter % cfg.psi == 0 {
            update_weights(&mut stats, cfg);
        }
        iterations_run += 1;
        iter += 1;
    }

    s_best.recompute_all(net, cfg);
    AlnsOutcome {
        best: s_best,
        iterations: iterations_run,
        trace,
        improvements,
        wall_ms: started.elapsed().as_millis(),
        tabu_overrides,
    }
}
