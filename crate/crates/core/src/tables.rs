//! Parameter and threshold tables for the built-in catalog, with embedded
//! expected values.

use std::fmt::Write as _;

use crate::catalog::builtin_examples;
use crate::classify::threshold_report;
use crate::params::{compute_all, ParamValue};
use crate::scalar::Scalar;

pub const PARAM_COLUMNS: [&str; 7] =
    ["beta_opt", "beta_flex", "delta_flex", "beta_coprime", "beta_gap", "delta_gap", "beta_const"];

/// Expected parameter rows; `-` marks a parameter the problem class does not use.
pub const EXPECTED_PARAMS: [(&str, [&str; 7]); 5] = [
    ("max-independent-set", ["1/2", "1/2", "true", "-", "1/2", "true", "0"]),
    ("min-dominating-set", ["1/3", "1/3", "true", "-", "1/3", "true", "1"]),
    ("min-vertex-coloring", ["2", "-", "-", "3", "-", "-", "bot"]),
    ("max-domatic-partition", ["3", "-", "-", "2", "-", "-", "1"]),
    ("sloppy-coloring", ["1", "2", "false", "-", "3", "true", "100"]),
];

/// Expected alpha ranges and strategies.
pub const EXPECTED_RANGES: [(&str, &str, &str); 14] = [
    ("max-independent-set", "{1}", "Optimal"),
    ("max-independent-set", "(1,inf)", "Constant fragment"),
    ("min-dominating-set", "{1}", "Optimal"),
    ("min-dominating-set", "(1,3)", "Constant fragment"),
    ("min-dominating-set", "[3,inf)", "Constant solution"),
    ("min-vertex-coloring", "[1,3/2)", "Optimal"),
    ("min-vertex-coloring", "[3/2,inf)", "Flexible"),
    ("max-domatic-partition", "[1,3/2)", "Optimal"),
    ("max-domatic-partition", "[3/2,3)", "Flexible"),
    ("max-domatic-partition", "[3,inf)", "Constant solution"),
    ("sloppy-coloring", "[1,2)", "Optimal"),
    ("sloppy-coloring", "[2,3]", "Flexible"),
    ("sloppy-coloring", "(3,100)", "Constant fragment"),
    ("sloppy-coloring", "[100,inf)", "Constant solution"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamRow {
    pub name: String,
    pub values: [String; 7],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeRow {
    pub name: String,
    pub range: String,
    pub strategy: String,
    pub det: String,
    pub rand: String,
}

pub fn param_rows<S: Scalar>() -> Vec<ParamRow> {
    builtin_examples::<S>()
        .into_iter()
        .map(|(name, p)| {
            let params = compute_all(&p);
            let values = params.entries().map(|(_, v)| match v {
                ParamValue::Cost(c) => c.as_ref().map_or("-".to_string(), |c| c.to_string()),
                ParamValue::Flag(d) => d.map_or("-".to_string(), |d| d.to_string()),
            });
            ParamRow { name: name.to_string(), values }
        })
        .collect()
}

pub fn range_rows<S: Scalar>() -> Vec<RangeRow> {
    let mut rows = Vec::new();
    for (name, p) in builtin_examples::<S>() {
        let report = threshold_report(&compute_all(&p)).expect("catalog parameters are complete");
        for (interval, c) in report.pieces {
            rows.push(RangeRow {
                name: name.to_string(),
                range: interval.to_string(),
                strategy: c.strategy.title().to_string(),
                det: c.class.deterministic().to_string(),
                rand: c.class.randomized().to_string(),
            });
        }
    }
    rows
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

pub fn render_params(rows: &[ParamRow]) -> String {
    let mut table = vec![std::iter::once("example").chain(PARAM_COLUMNS).map(String::from).collect::<Vec<_>>()];
    table.extend(rows.iter().map(|r| std::iter::once(r.name.clone()).chain(r.values.iter().cloned()).collect()));
    aligned(&table)
}

pub fn render_ranges(rows: &[RangeRow]) -> String {
    let mut table = vec![["example", "alpha", "strategy", "det", "rand"].map(String::from).to_vec()];
    table.extend(rows.iter().map(|r| vec![r.name.clone(), r.range.clone(), r.strategy.clone(), r.det.clone(), r.rand.clone()]));
    aligned(&table)
}

pub fn params_csv(rows: &[ParamRow]) -> String {
    let mut out = format!("example,{}\n", PARAM_COLUMNS.join(","));
    for r in rows {
        let _ = writeln!(out, "{},{}", r.name, r.values.join(","));
    }
    out
}

pub fn ranges_csv(rows: &[RangeRow]) -> String {
    let mut out = String::from("example,alpha,strategy,det,rand\n");
    for r in rows {
        let _ = writeln!(out, "{},\"{}\",{},{},{}", r.name, r.range, r.strategy, r.det, r.rand);
    }
    out
}

/// Differences between computed and expected tables; empty on success.
pub fn check<S: Scalar>() -> Vec<String> {
    let mut problems = Vec::new();
    let params = param_rows::<S>();
    if params.len() != EXPECTED_PARAMS.len() {
        problems.push(format!("parameter table has {} rows, expected {}", params.len(), EXPECTED_PARAMS.len()));
    }
    for (row, (name, want)) in params.iter().zip(EXPECTED_PARAMS) {
        for ((col, got), want) in PARAM_COLUMNS.iter().zip(&row.values).zip(want) {
            if row.name != name || got != want {
                problems.push(format!("{}: {col} = {got}, expected {name} {want}", row.name));
            }
        }
    }
    let ranges = range_rows::<S>();
    if ranges.len() != EXPECTED_RANGES.len() {
        problems.push(format!("range table has {} rows, expected {}", ranges.len(), EXPECTED_RANGES.len()));
    }
    for (row, (name, range, strategy)) in ranges.iter().zip(EXPECTED_RANGES) {
        if row.name != name || row.range != range || row.strategy != strategy {
            problems.push(format!(
                "{} {} {}: expected {name} {range} {strategy}",
                row.name, row.range, row.strategy
            ));
        }
    }
    problems
}
