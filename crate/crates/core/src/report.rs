//! Tabular output for parameter sweeps.

use serde::Serialize;

use crate::correlations::{self, CorrelationOptions, CorrelationReport, KOpt};
use crate::error::{Error, Result};
use crate::states;

/// Exact CSV header of a sweep table.
pub const SWEEP_HEADER: &str = "a,S_A,S_B,S_AB,S_A_given_B,I,C,D,ratio,k_opt";

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub a: f64,
    #[serde(flatten)]
    pub report: CorrelationReport,
    pub ratio: f64,
}

/// `steps` evenly spaced values on `[a_min, a_max]`, endpoints included.
pub fn sweep_points(a_min: f64, a_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::OutOfRange(format!("sweep needs at least 2 steps, got {steps}")));
    }
    if !(0.0..=1.0).contains(&a_min) || !(0.0..=1.0).contains(&a_max) || a_min > a_max {
        return Err(Error::OutOfRange(format!("sweep range [{a_min}, {a_max}] must lie within [0, 1]")));
    }
    Ok((0..steps).map(|i| crate::optim::closed_grid(a_min, a_max, steps, i)).collect())
}

/// Correlation report of the mixed Bell family at each `a`, in input order.
pub fn mixed_bell_sweep(points: &[f64], opts: &CorrelationOptions) -> Result<Vec<SweepRow>> {
    points
        .iter()
        .map(|&a| {
            let report = correlations::correlation_report(&states::mixed_bell(a)?, opts)?;
            let ratio = report.ratio();
            Ok(SweepRow { a, report, ratio })
        })
        .collect()
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn k_opt_cell(k: KOpt) -> String {
    k.to_string()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        let cells = [
            format_sig6(row.a),
            format_sig6(r.s_a),
            format_sig6(r.s_b),
            format_sig6(r.s_ab),
            format_sig6(r.s_a_given_b),
            format_sig6(r.mutual_information),
            format_sig6(r.classical),
            format_sig6(r.discord),
            format_sig6(row.ratio),
            k_opt_cell(r.k_opt),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
