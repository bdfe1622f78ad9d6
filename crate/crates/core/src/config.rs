//! Solver parameters. Field defaults are the tuned values the solver ships
//! with; every one of them can be overridden by a config document or a CLI
//! flag.

use crate::scalar::Scalar;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Variant {
    /// Full algorithm: tabu-list, acceleration, perturbation, fallback.
    Improved,
    /// Classical adaptive search only; the four add-ons above disabled.
    Plain,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Improved => "improved",
            Variant::Plain => "plain",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "improved" => Ok(Variant::Improved),
            "plain" => Ok(Variant::Plain),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<F> {
    /// Tank capacity, liters-equivalent. The default matches 20 km of
    /// serviceable street at a sprinkling rate of 1.
    pub capacity: F,
    /// Travel speed while sprinkling, km/h.
    pub v_service_kmh: F,
    /// Travel speed while deadheading, km/h.
    pub v_deadhead_kmh: F,
    /// Max allowed spread between vehicle working times, minutes.
    pub t_dif: F,
    /// Fraction of demand links removed per destroy step.
    pub gamma: F,
    /// Quadratic lateness penalty weight.
    pub delta: F,
    /// Stagnation threshold before perturbation kicks in.
    pub phi1: u64,
    /// Perturbation cadence while stagnating.
    pub phi2: u64,
    /// Max iterations without a new best.
    pub m1: u64,
    /// Max total iterations.
    pub m2: u64,
    /// Weight-update phase length.
    pub psi: u64,
    /// Weight clamp bounds.
    pub a_min: F,
    pub a_max: F,
    /// Scores for accepted-worse / improving / new-best moves.
    pub sco1: F,
    pub sco2: F,
    pub sco3: F,
    /// Memory of previous weights in the phase update.
    pub tau: F,
    /// Noise magnitude for the randomized repairs.
    pub mu: F,
    /// Destroy fraction used by the perturbation step.
    pub gamma_shake: F,
    /// Insertion search is restricted to routes whose depot (or anchor) is
    /// within this multiple of the closest one; `infinity` disables it.
    /// 1.5 keeps the filter selective enough to pay for itself on grid
    /// geometries.
    pub accel_ratio: F,
    /// A link sprinkled within this many minutes before an event does not
    /// need service again.
    pub recency: F,
    /// Service window length granted to event links, minutes.
    pub window_length: F,
    /// Soft penalty per minute of working-time spread beyond `t_dif`
    /// during the search (the final solution must satisfy `t_dif` hard).
    pub w_bal: F,
    /// Initial temperature: a solution `t0_worse_frac` worse than the
    /// start is accepted with probability `t0_accept_prob`.
    pub t0_worse_frac: F,
    pub t0_accept_prob: F,
    /// Geometric cooling factor per iteration.
    pub cooling: F,
    /// Temperature floor, as a fraction of the initial temperature.
    pub temp_floor_frac: F,
    /// Tabu-list capacity (FIFO).
    pub tabu_capacity: usize,
    /// Full cache recompute cadence, in accepted moves.
    pub recompute_period: u64,
    pub seed: u64,
    pub variant: Variant,
    /// Optional wall-clock cutoff for one search, seconds. Breaks
    /// run-to-run determinism when set.
    pub time_limit_s: Option<f64>,
}

impl<F: Scalar> Default for SolverConfig<F> {
    fn default() -> Self {
        let f = F::from_f64;
        SolverConfig {
            capacity: f(20_000.0),
            v_service_kmh: f(10.0),
            v_deadhead_kmh: f(30.0),
            t_dif: f(15.0),
            gamma: f(0.10),
            delta: f(5.0),
            phi1: 200,
            phi2: 100,
            m1: 1500,
            m2: 3000,
            psi: 100,
            a_min: f(1.0),
            a_max: f(3.0),
            sco1: f(0.0),
            sco2: f(0.02),
            sco3: f(0.05),
            tau: f(0.8),
            mu: f(0.1),
            gamma_shake: f(0.20),
            accel_ratio: f(1.5),
            recency: f(30.0),
            window_length: f(30.0),
            w_bal: f(10_000.0),
            t0_worse_frac: f(0.05),
            t0_accept_prob: f(0.5),
            cooling: f(0.9997),
            temp_floor_frac: f(1e-6),
            tabu_capacity: 5000,
            recompute_period: 500,
            seed: 0,
            variant: Variant::Improved,
            time_limit_s: None,
        }
    }
}

impl<F: Scalar> SolverConfig<F> {
    /// Service speed in meters per minute.
    pub fn v_service(&self) -> F {
        self.v_service_kmh * F::from_f64(1000.0 / 60.0)
    }

    /// Deadhead speed in meters per minute.
    pub fn v_deadhead(&self) -> F {
        self.v_deadhead_kmh * F::from_f64(1000.0 / 60.0)
    }

    pub fn acceleration_enabled(&self) -> bool {
        self.variant == Variant::Improved && self.accel_ratio.is_finite()
    }

    pub fn tabu_enabled(&self) -> bool {
        self.variant == Variant::Improved
    }

    pub fn perturbation_enabled(&self) -> bool {
        self.variant == Variant::Improved
    }
}
