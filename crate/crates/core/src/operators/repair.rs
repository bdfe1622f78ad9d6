//! The five repair operators: greedy, noise greedy, 2-regret, noise
//! regret, and window-aware insertion.

use rand::Rng;
use thiserror::Error;

use crate::config::SolverConfig;
use crate::construct::directions_of;
use crate::network::{LinkId, MixedNetwork};
use crate::scalar::Scalar;
use crate::solution::{Direction, ServiceTask, Solution};

use super::{candidate_routes, reoptimize_depots};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RepairError {
    #[error("no capacity-feasible insertion position for link {0}")]
    NoFeasibleInsertion(LinkId),
}

/// Decaying random surcharge added to insertion costs by the noise
/// repairs: `mu * (1 - iter/all_iter) * z * d_max` with `z` uniform in
/// [0, 1).
pub fn noise_term<F: Scalar>(
    mu: F,
    iter: u64,
    all_iter: u64,
    d_max: F,
    rng: &mut impl Rng,
) -> F {
    let phi = if all_iter == 0 {
        F::zero()
    } else {
        (F::one() - F::from_f64(iter as f64 / all_iter as f64)).max(F::zero())
    };
    let z = F::from_f64(rng.random::<f64>());
    mu * phi * z * d_max
}

#[derive(Copy, Clone, Debug)]
struct Candidate<F> {
    /// Selection cost: the true delta plus any noise.
    cost: F,
    route: usize,
    pos: usize,
    dir: Direction,
    start: F,
    own_lateness_sq: F,
}

/// Scans every (route, position, orientation) candidate for one link and
/// returns the best and second-best by selection cost. Candidate order is
/// fixed, so ties resolve deterministically.
fn scan_task<F: Scalar, D: FnMut() -> F>(
    sol: &Solution<F>,
    link: LinkId,
    routes: &[usize],
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    draw: &mut D,
) -> (Option<Candidate<F>>, Option<Candidate<F>>) {
    let mut best: Option<Candidate<F>> = None;
    let mut second: Option<Candidate<F>> = None;
    for &r in routes {
        for dir in directions_of(net, link) {
            let task = ServiceTask { link, direction: dir };
            for pos in 0..=sol.routes[r].tasks.len() {
                let Ok(ev) = sol.insertion_eval(r, pos, task, net, cfg) else {
                    continue;
                };
                let cost = ev.delta + draw();
                let cand = Candidate {
                    cost,
                    route: r,
                    pos,
                    dir,
                    start: ev.start_time,
                    own_lateness_sq: ev.own_lateness_sq,
                };
                if best.map_or(true, |b| cost < b.cost) {
                    second = best;
                    best = Some(cand);
                } else if second.map_or(true, |s| cost < s.cost) {
                    second = Some(cand);
                }
            }
        }
    }
    (best, second)
}

/// Scan under the acceleration filter; when nothing fits there, widen to
/// every route before giving up.
fn scan_with_fallback<F: Scalar, D: FnMut() -> F>(
    sol: &Solution<F>,
    link: LinkId,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    draw: &mut D,
) -> Result<(Candidate<F>, Option<Candidate<F>>), RepairError> {
    let filtered = candidate_routes(link, sol, net, cfg);
    let (best, second) = scan_task(sol, link, &filtered, net, cfg, draw);
    if let Some(b) = best {
        return Ok((b, second));
    }
    if filtered.len() < sol.routes.len() {
        let all: Vec<usize> = (0..sol.routes.len()).collect();
        let (best, second) = scan_task(sol, link, &all, net, cfg, draw);
        if let Some(b) = best {
            return Ok((b, second));
        }
    }
    Err(RepairError::NoFeasibleInsertion(link))
}

/// Repeatedly inserts the globally cheapest (task, route, position,
/// orientation) tuple.
fn greedy_core<F: Scalar, D: FnMut() -> F>(
    mut sol: Solution<F>,
    mut remaining: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    draw: &mut D,
) -> Result<Solution<F>, RepairError> {
    remaining.sort_by_key(|t| t.link);
    while !remaining.is_empty() {
        let mut pick: Option<(Candidate<F>, usize)> = None;
        for (i, t) in remaining.iter().enumerate() {
            let (best, _) = scan_with_fallback(&sol, t.link, net, cfg, draw)?;
            if pick.as_ref().map_or(true, |(c, _)| best.cost < c.cost) {
                pick = Some((best, i));
            }
        }
        let (cand, i) = pick.expect("non-empty remaining implies a pick");
        let link = remaining.remove(i).link;
        sol.insert_task(cand.route, cand.pos, ServiceTask { link, direction: cand.dir }, net, cfg);
    }
    Ok(sol)
}

/// Each round inserts the task with the largest regret (second-best minus
/// best insertion cost) at its best position; tasks with a single feasible
/// candidate go first.
fn regret_core<F: Scalar, D: FnMut() -> F>(
    mut sol: Solution<F>,
    mut remaining: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    draw: &mut D,
) -> Result<Solution<F>, RepairError> {
    remaining.sort_by_key(|t| t.link);
    while !remaining.is_empty() {
        let mut pick: Option<(F, Candidate<F>, usize)> = None;
        for (i, t) in remaining.iter().enumerate() {
            let (best, second) = scan_with_fallback(&sol, t.link, net, cfg, draw)?;
            let regret = match second {
                Some(s) => s.cost - best.cost,
                None => F::infinity(),
            };
            if pick.as_ref().map_or(true, |(r, _, _)| regret > *r) {
                pick = Some((regret, best, i));
            }
        }
        let (_, cand, i) = pick.expect("non-empty remaining implies a pick");
        let link = remaining.remove(i).link;
        sol.insert_task(cand.route, cand.pos, ServiceTask { link, direction: cand.dir }, net, cfg);
    }
    Ok(sol)
}

pub fn repair_greedy<F: Scalar>(
    partial: Solution<F>,
    removed: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Result<Solution<F>, RepairError> {
    let mut zero = || F::zero();
    let mut sol = greedy_core(partial, removed, net, cfg, &mut zero)?;
    reoptimize_depots(&mut sol, net, cfg);
    Ok(sol)
}

pub fn repair_noise_greedy<F: Scalar>(
    partial: Solution<F>,
    removed: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    iter: u64,
    all_iter: u64,
    rng: &mut impl Rng,
) -> Result<Solution<F>, RepairError> {
    let d_max = net.max_demand_gap();
    let mu = cfg.mu;
    let draw = |rng: &mut _| noise_term(mu, iter, all_iter, d_max, rng);
    let mut noise = || draw(rng);
    let mut sol = greedy_core(partial, removed, net, cfg, &mut noise)?;
    reoptimize_depots(&mut sol, net, cfg);
    Ok(sol)
}

pub fn repair_regret2<F: Scalar>(
    partial: Solution<F>,
    removed: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Result<Solution<F>, RepairError> {
    let mut zero = || F::zero();
    let mut sol = regret_core(partial, removed, net, cfg, &mut zero)?;
    reoptimize_depots(&mut sol, net, cfg);
    Ok(sol)
}

pub fn repair_noise_regret<F: Scalar>(
    partial: Solution<F>,
    removed: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
    iter: u64,
    all_iter: u64,
    rng: &mut impl Rng,
) -> Result<Solution<F>, RepairError> {
    let d_max = net.max_demand_gap();
    let mu = cfg.mu;
    let draw = |rng: &mut _| noise_term(mu, iter, all_iter, d_max, rng);
    let mut noise = || draw(rng);
    let mut sol = regret_core(partial, removed, net, cfg, &mut noise)?;
    reoptimize_depots(&mut sol, net, cfg);
    Ok(sol)
}

/// One task's candidates split two ways: the cheapest whose start stays
/// inside the window, and the least-late one as a fallback.
fn scan_windowed<F: Scalar>(
    sol: &Solution<F>,
    link: LinkId,
    window_end: F,
    routes: &[usize],
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> (Option<Candidate<F>>, Option<Candidate<F>>) {
    let mut best_in: Option<Candidate<F>> = None;
    let mut best_late: Option<Candidate<F>> = None;
    for &r in routes {
        for dir in directions_of(net, link) {
            let task = ServiceTask { link, direction: dir };
            for pos in 0..=sol.routes[r].tasks.len() {
                let Ok(ev) = sol.insertion_eval(r, pos, task, net, cfg) else {
                    continue;
                };
                let cand = Candidate {
                    cost: ev.delta,
                    route: r,
                    pos,
                    dir,
                    start: ev.start_time,
                    own_lateness_sq: ev.own_lateness_sq,
                };
                if cand.start <= window_end + F::feas_eps(window_end)
                    && best_in.map_or(true, |c| cand.cost < c.cost)
                {
                    best_in = Some(cand);
                }
                let better_late = match best_late {
                    None => true,
                    Some(c) => {
                        cand.own_lateness_sq < c.own_lateness_sq
                            || (cand.own_lateness_sq == c.own_lateness_sq && cand.cost < c.cost)
                    }
                };
                if better_late {
                    best_late = Some(cand);
                }
            }
        }
    }
    (best_in, best_late)
}

/// Windowed tasks first, each at the cheapest position whose start time
/// stays inside its window; when no such position exists the task takes
/// the position with the least lateness. Unwindowed tasks follow greedily.
pub fn repair_time_window<F: Scalar>(
    partial: Solution<F>,
    removed: Vec<ServiceTask>,
    net: &MixedNetwork<F>,
    cfg: &SolverConfig<F>,
) -> Result<Solution<F>, RepairError> {
    let mut sol = partial;
    let (mut windowed, plain): (Vec<ServiceTask>, Vec<ServiceTask>) = removed
        .into_iter()
        .partition(|t| sol.windows.contains_key(&t.link));
    windowed.sort_by_key(|t| t.link);

    let mut zero = || F::zero();
    while !windowed.is_empty() {
        // best in-window candidate across tasks, else least-lateness one
        let mut pick_in: Option<(Candidate<F>, usize)> = None;
        let mut pick_late: Option<(Candidate<F>, usize)> = None;
        for (i, t) in windowed.iter().enumerate() {
            let (_a, b) = sol.windows[&t.link];
            let routes = candidate_routes(t.link, &sol, net, cfg);
            let (mut best_in, mut best_late) = scan_windowed(&sol, t.link, b, &routes, net, cfg);
            if best_in.is_none() && best_late.is_none() && routes.len() < sol.routes.len() {
                let all: Vec<usize> = (0..sol.routes.len()).collect();
                let widened = scan_windowed(&sol, t.link, b, &all, net, cfg);
                best_in = widened.0;
                best_late = widened.1;
            }
            if best_in.is_none() && best_late.is_none() {
                return Err(RepairError::NoFeasibleInsertion(t.link));
            }
            if let Some(c) = best_in {
                if pick_in.as_ref().map_or(true, |(p, _)| c.cost < p.cost) {
                    pick_in = Some((c, i));
                }
            }
            if let Some(c) = best_late {
                let better = match &pick_late {
                    None => true,
                    Some((p, _)) => {
                        c.own_lateness_sq < p.own_lateness_sq
                            || (c.own_lateness_sq == p.own_lateness_sq && c.cost < p.cost)
                    }
                };
                if better {
                    pick_late = Some((c, i));
                }
            }
        }
        let (cand, i) = pick_in.or(pick_late).expect("some candidate must exist");
        let link = windowed.remove(i).link;
        sol.insert_task(cand.route, cand.pos, ServiceTask { link, direction: cand.dir }, net, cfg);
    }

    let mut sol = greedy_core(sol, plain, net, cfg, &mut zero)?;
    reoptimize_depots(&mut sol, net, cfg);
    Ok(sol)
}
