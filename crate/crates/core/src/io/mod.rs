//! Document formats (network, demands, events, config, plan), the grid
//! instance generator, KPI tables, and the bench/sweep harnesses.
//!
//! Every document is line-oriented text: whitespace-separated tokens, `#`
//! starts a comment, the first line names the format and schema version.
//! Emission is byte-deterministic and `parse(emit(x)) == x`.

mod bench;
mod config_fmt;
mod format;
mod generator;
mod kpi;
mod plan;

pub use bench::{run_bench, run_sweep, BenchRow, SweepParam};
pub use config_fmt::{emit_config, parse_config};
pub use format::{
    emit_demands, emit_events, emit_network, parse_demands, parse_events, parse_network,
};
pub use generator::{generate_grid_instance, GenError, GridParams};
pub use kpi::{emit_kpis, KpiRow};
pub use plan::{
    emit_plan, parse_plan, plan_document, solution_from_plan, PlanDocument, PlanRoute, PlanTask,
    RunMeta,
};

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Schema { line: usize, msg: String },
}

impl ParseError {
    pub(crate) fn at(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Schema { line, msg: msg.into() }
    }
}

/// Tokenized non-empty lines with their 1-based numbers; `#` comments
/// stripped.
pub(crate) fn tokenize(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            };
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((i + 1, tokens))
            }
        })
        .collect()
}

/// Checks the `<format> v1` header line.
pub(crate) fn expect_header(
    lines: &[(usize, Vec<&str>)],
    format: &str,
) -> Result<(), ParseError> {
    match lines.first() {
        Some((n, toks)) if toks.len() == 2 && toks[0] == format && toks[1] == "v1" => {
            let _ = n;
            Ok(())
        }
        Some((n, toks)) => Err(ParseError::at(
            *n,
            format!("expected header `{format} v1`, found `{}`", toks.join(" ")),
        )),
        None => Err(ParseError::at(1, format!("empty document, expected `{format} v1`"))),
    }
}

pub(crate) fn parse_scalar<F: crate::scalar::Scalar>(
    tok: &str,
    line: usize,
) -> Result<F, ParseError> {
    tok.parse::<F>()
        .map_err(|_| ParseError::at(line, format!("invalid number `{tok}`")))
}

pub(crate) fn parse_int<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, ParseError> {
    tok.parse::<T>()
        .map_err(|_| ParseError::at(line, format!("invalid integer `{tok}`")))
}
