//! Config documents. Every key is optional; omitted keys keep their
//! defaults.

use super::{expect_header, parse_int, parse_scalar, tokenize, ParseError};
use crate::config::{SolverConfig, Variant};
use crate::scalar::Scalar;

pub(crate) fn config_lines<F: Scalar>(cfg: &SolverConfig<F>) -> Vec<String> {
    let mut out = vec![
        format!("capacity {}", cfg.capacity),
        format!("v_service_kmh {}", cfg.v_service_kmh),
        format!("v_deadhead_kmh {}", cfg.v_deadhead_kmh),
        format!("t_dif {}", cfg.t_dif),
        format!("gamma {}", cfg.gamma),
        format!("delta {}", cfg.delta),
        format!("phi1 {}", cfg.phi1),
        format!("phi2 {}", cfg.phi2),
        format!("m1 {}", cfg.m1),
        format!("m2 {}", cfg.m2),
        format!("psi {}", cfg.psi),
        format!("a_min {}", cfg.a_min),
        format!("a_max {}", cfg.a_max),
        format!("sco1 {}", cfg.sco1),
        format!("sco2 {}", cfg.sco2),
        format!("sco3 {}", cfg.sco3),
        format!("tau {}", cfg.tau),
        format!("mu {}", cfg.mu),
        format!("gamma_shake {}", cfg.gamma_shake),
        format!("accel_ratio {}", cfg.accel_ratio),
        format!("recency {}", cfg.recency),
        format!("window_length {}", cfg.window_length),
        format!("w_bal {}", cfg.w_bal),
        format!("t0_worse_frac {}", cfg.t0_worse_frac),
        format!("t0_accept_prob {}", cfg.t0_accept_prob),
        format!("cooling {}", cfg.cooling),
        format!("temp_floor_frac {}", cfg.temp_floor_frac),
        format!("tabu_capacity {}", cfg.tabu_capacity),
        format!("recompute_period {}", cfg.recompute_period),
        format!("seed {}", cfg.seed),
        format!("variant {}", cfg.variant.as_str()),
    ];
    if let Some(limit) = cfg.time_limit_s {
        out.push(format!("time_limit_s {limit}"));
    }
    out
}

pub(crate) fn apply_config_kv<F: Scalar>(
    cfg: &mut SolverConfig<F>,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ParseError> {
    match key {
        "capacity" => cfg.capacity = parse_scalar(value, line)?,
        "v_service_kmh" => cfg.v_service_kmh = parse_scalar(value, line)?,
        "v_deadhead_kmh" => cfg.v_deadhead_kmh = parse_scalar(value, line)?,
        "t_dif" => cfg.t_dif = parse_scalar(value, line)?,
        "gamma" => cfg.gamma = parse_scalar(value, line)?,
        "delta" => cfg.delta = parse_scalar(value, line)?,
        "phi1" => cfg.phi1 = parse_int(value, line)?,
        "phi2" => cfg.phi2 = parse_int(value, line)?,
        "m1" => cfg.m1 = parse_int(value, line)?,
        "m2" => cfg.m2 = parse_int(value, line)?,
        "psi" => cfg.psi = parse_int(value, line)?,
        "a_min" => cfg.a_min = parse_scalar(value, line)?,
        "a_max" => cfg.a_max = parse_scalar(value, line)?,
        "sco1" => cfg.sco1 = parse_scalar(value, line)?,
        "sco2" => cfg.sco2 = parse_scalar(value, line)?,
        "sco3" => cfg.sco3 = parse_scalar(value, line)?,
        "tau" => cfg.tau = parse_scalar(value, line)?,
        "mu" => cfg.mu = parse_scalar(value, line)?,
        "gamma_shake" => cfg.gamma_shake = parse_scalar(value, line)?,
        "accel_ratio" => cfg.accel_ratio = parse_scalar(value, line)?,
        "recency" => cfg.recency = parse_scalar(value, line)?,
        "window_length" => cfg.window_length = parse_scalar(value, line)?,
        "w_bal" => cfg.w_bal = parse_scalar(value, line)?,
        "t0_worse_frac" => cfg.t0_worse_frac = parse_scalar(value, line)?,
        "t0_accept_prob" => cfg.t0_accept_prob = parse_scalar(value, line)?,
        "cooling" => cfg.cooling = parse_scalar(value, line)?,
        "temp_floor_frac" => cfg.temp_floor_frac = parse_scalar(value, line)?,
        "tabu_capacity" => cfg.tabu_capacity = parse_int(value, line)?,
        "recompute_period" => cfg.recompute_period = parse_int(value, line)?,
        "seed" => cfg.seed = parse_int(value, line)?,
        "variant" => {
            cfg.variant = value
                .parse::<Variant>()
                .map_err(|e| ParseError::at(line, e))?
        }
        "time_limit_s" => {
            cfg.time_limit_s =
                Some(value.parse::<f64>().map_err(|_| ParseError::at(line, "invalid number"))?)
        }
        other => return Err(ParseError::at(line, format!("unknown config key `{other}`"))),
    }
    Ok(())
}

pub fn parse_config<F: Scalar>(text: &str) -> Result<SolverConfig<F>, ParseError> {
    let lines = tokenize(text);
    expect_header(&lines, "sprinkler-config")?;
    let mut cfg = SolverConfig::default();
    for (n, toks) in lines.iter().skip(1) {
        if toks.len() != 2 {
            return Err(ParseError::at(*n, "expected `<key> <value>`"));
        }
        apply_config_kv(&mut cfg, toks[0], toks[1], *n)?;
    }
    Ok(cfg)
}

pub fn emit_config<F: Scalar>(cfg: &SolverConfig<F>) -> String {
    let mut out = String::from("sprinkler-config v1\n");
    for line in config_lines(cfg) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}
