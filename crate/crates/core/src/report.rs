//! Cost tables as Markdown, CSV or JSON.

use serde::Serialize;

use crate::estimator::{CostReport, FibReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

pub const COST_COLUMNS: [&str; 14] = [
    "n",
    "beta",
    "window",
    "pebbles",
    "length",
    "d",
    "m",
    "log_d",
    "depth",
    "total",
    "qubits_per_n",
    "strategy",
    "pebbles_used",
    "exceeds_budget",
];

pub const FIB_COLUMNS: [&str; 11] =
    ["n", "beta", "r", "s", "d", "m", "log_d", "k", "depth", "total", "qubits_per_n_min"];

fn cost_cells(r: &CostReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.beta.to_string(),
        r.window.to_string(),
        r.pebbles.to_string(),
        r.length.to_string(),
        r.d.to_string(),
        r.m.to_string(),
        r.log_d.to_string(),
        r.depth.to_string(),
        r.total_mults.to_string(),
        format!("{:.1}", r.qubit_ratio),
        r.strategy.to_string(),
        r.pebbles_used.map(|u| u.to_string()).unwrap_or_default(),
        r.exceeds_budget.to_string(),
    ]
}

fn fib_cells(r: &FibReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.beta.to_string(),
        r.r.to_string(),
        r.s.to_string(),
        r.d.to_string(),
        r.m.to_string(),
        r.log_d.to_string(),
        r.k.to_string(),
        r.depth.to_string(),
        r.total_mults.to_string(),
        format!("{:.1}", r.qubit_ratio_lower),
    ]
}

fn markdown(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out += &format!("|{}\n", "---|".repeat(header.len()));
    for r in rows {
        out += &format!("| {} |\n", r.join(" | "));
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn json<T: Serialize>(rows: &[T]) -> String {
    serde_json::to_string_pretty(rows).expect("reports serialize") + "\n"
}

fn render<T: Serialize>(header: &[&str], rows: &[T], cells: fn(&T) -> Vec<String>, format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv(header, &rows.iter().map(cells).collect::<Vec<_>>()),
        Format::Markdown => markdown(header, &rows.iter().map(cells).collect::<Vec<_>>()),
    }
}

pub fn render_costs(rows: &[CostReport], format: Format) -> String {
    render(&COST_COLUMNS, rows, cost_cells, format)
}

pub fn render_fib(rows: &[FibReport], format: Format) -> String {
    render(&FIB_COLUMNS, rows, fib_cells, format)
}
