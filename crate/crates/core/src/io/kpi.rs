//! Tab-separated KPI rows for the sweep and bench commands; plot-ready.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct KpiRow<F> {
    pub scenario: String,
    pub response_time: F,
    pub window_length: F,
    pub service_m: F,
    pub deadhead_m: F,
    pub penalty: F,
    pub work_spread_min: F,
    pub wall_ms: u128,
    pub iterations: u64,
    /// Fleet distance already driven when the event arrived.
    pub pre_adjust_m: F,
}

pub const KPI_HEADER: &str = "scenario\tresponse_time\twindow_length\tservice_m\tdeadhead_m\tpenalty\twork_spread_min\twall_ms\titerations\tpre_adjust_m";

pub fn emit_kpis<F: Scalar>(rows: &[KpiRow<F>]) -> String {
    let mut out = String::from(KPI_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.scenario,
            r.response_time,
            r.window_length,
            r.service_m,
            r.deadhead_m,
            r.penalty,
            r.work_spread_min,
            r.wall_ms,
            r.iterations,
            r.pre_adjust_m,
        ));
    }
    out
}
