//! Grid evaluation over (N, T, λ) and report emission.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::costmodel::{self, AMode, CostParams, Policy};
use crate::error::{Error, Result};
use crate::simulator::{self, SimulationConfig};
use crate::stochastics::{AuctionParams, AuctionStatistics, TdMode};

/// CSV header, fixed. The trailing `error` column is empty for good rows.
pub const CSV_COLUMNS: [&str; 12] = [
    "n",
    "t",
    "lambda",
    "p_success",
    "dispatch_time",
    "q_star_real",
    "q_star_integer",
    "optimal_cost",
    "sim_cost",
    "sim_halfwidth",
    "delta",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_values: Vec<u32>,
    pub t_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub costs: CostParams,
    pub td_mode: TdMode,
    /// Simulate each cell at its integer optimum when present.
    pub simulation: Option<SimulationConfig>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::invalid("n_values", "must not be empty"));
        }
        if self.t_values.is_empty() {
            return Err(Error::invalid("t_values", "must not be empty"));
        }
        if self.lambda_values.is_empty() {
            return Err(Error::invalid("lambda_values", "must not be empty"));
        }
        if self.t_values.iter().chain(&self.lambda_values).any(|v| v.is_nan()) {
            return Err(Error::invalid("t_values", "grid values must not be NaN"));
        }
        if let Some(sim) = &self.simulation {
            sim.validate()?;
        }
        Ok(())
    }

    fn grid(&self) -> Vec<(u32, f64, f64)> {
        let mut ns = self.n_values.clone();
        let mut ts = self.t_values.clone();
        let mut ls = self.lambda_values.clone();
        ns.sort_unstable();
        ts.sort_by(f64::total_cmp);
        ls.sort_by(f64::total_cmp);
        let mut cells = Vec::with_capacity(ns.len() * ts.len() * ls.len());
        for &n in &ns {
            for &t in &ts {
                for &l in &ls {
                    cells.push((n, t, l));
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellValues {
    pub p_success: f64,
    pub dispatch_time: f64,
    pub q_star_real: f64,
    pub q_star_integer: u64,
    pub optimal_cost: f64,
}

/// Simulation of one cell at `q_star_integer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulatedCell {
    pub cost: f64,
    pub half_width: f64,
    /// Simulated minus analytic cost at the same Q, with consistent T_d and
    /// exact dispatch count.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub t: f64,
    pub lambda: f64,
    pub values: Option<CellValues>,
    pub simulation: Option<SimulatedCell>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

fn evaluate_cell(
    spec: &SweepSpec,
    index: u64,
    n: u32,
    t: f64,
    lambda: f64,
) -> Result<(CellValues, Option<SimulatedCell>)> {
    let auction = AuctionParams::new(n, t, lambda)?;
    let stats = AuctionStatistics::compute(&auction)?;
    let opt = costmodel::optimize(&stats, &spec.costs, spec.td_mode)?;
    let values = CellValues {
        p_success: stats.p_success,
        dispatch_time: stats.dispatch_time(spec.td_mode),
        q_star_real: opt.quantity,
        q_star_integer: opt.integer_quantity,
        optimal_cost: opt.cost,
    };
    let simulated = match &spec.simulation {
        None => None,
        Some(cfg) => {
            let policy = Policy::new(opt.integer_quantity as f64)?;
            let sim = simulator::simulate_replication(&auction, &spec.costs, policy, cfg, index)?;
            let analytic = costmodel::long_run_average_cost(
                &stats,
                &spec.costs,
                policy,
                TdMode::Consistent,
                AMode::Exact,
            )?;
            Some(SimulatedCell {
                cost: sim.long_run_cost.value,
                half_width: sim.long_run_cost.half_width,
                delta: sim.long_run_cost.value - analytic,
            })
        }
    };
    Ok((values, simulated))
}

/// Evaluates every grid cell. Cells that fail carry an error message instead
/// of aborting the sweep. With simulation, cell `i` uses random stream `i`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let cells = spec.grid();
    let one = |(i, &(n, t, lambda)): (usize, &(u32, f64, f64))| {
        let (values, simulation, error) = match evaluate_cell(spec, i as u64, n, t, lambda) {
            Ok((v, s)) => (Some(v), s, None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        SweepRow {
            n,
            t,
            lambda,
            values,
            simulation,
            error,
        }
    };
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        cells.par_iter().enumerate().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = cells.iter().enumerate().map(one).collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!(
                "unsupported report format `{other}` (expected csv|json|markdown)"
            ))),
        }
    }
}

/// Six significant digits, ties to even, trailing zeros dropped; plain
/// notation for decimal exponents in [-4, 6), scientific otherwise.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// The value a report carries for `x`: `x` rounded to six significant digits.
fn sig6_value(x: f64) -> Value {
    format_sig6(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn row_fields(row: &SweepRow) -> Vec<(&'static str, Option<f64>, Option<u64>)> {
    let v = row.values.as_ref();
    let s = row.simulation.as_ref();
    vec![
        ("p_success", v.map(|v| v.p_success), None),
        ("dispatch_time", v.map(|v| v.dispatch_time), None),
        ("q_star_real", v.map(|v| v.q_star_real), None),
        ("q_star_integer", None, v.map(|v| v.q_star_integer)),
        ("optimal_cost", v.map(|v| v.optimal_cost), None),
        ("sim_cost", s.map(|s| s.cost), None),
        ("sim_halfwidth", s.map(|s| s.half_width), None),
        ("delta", s.map(|s| s.delta), None),
    ]
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let mut cells = vec![row.n.to_string(), format_sig6(row.t), format_sig6(row.lambda)];
        for (_, real, int) in row_fields(row) {
            cells.push(match (real, int) {
                (Some(x), _) => format_sig6(x),
                (_, Some(i)) => i.to_string(),
                _ => String::new(),
            });
        }
        cells.push(row.error.as_deref().map(csv_escape).unwrap_or_default());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn to_json(rows: &[SweepRow]) -> String {
    let array: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("n".into(), Value::from(row.n));
            obj.insert("t".into(), sig6_value(row.t));
            obj.insert("lambda".into(), sig6_value(row.lambda));
            for (key, real, int) in row_fields(row) {
                let v = match (real, int) {
                    (Some(x), _) => sig6_value(x),
                    (_, Some(i)) => Value::from(i),
                    _ => Value::Null,
                };
                obj.insert(key.into(), v);
            }
            obj.insert(
                "error".into(),
                row.error.clone().map(Value::String).unwrap_or(Value::Null),
            );
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(array)).expect("serializable");
    s.push('\n');
    s
}

fn to_markdown(rows: &[SweepRow], td_mode: Option<TdMode>) -> String {
    let mut out = String::new();
    out.push_str("# Replenishment sweep\n\n");
    if let Some(mode) = td_mode {
        let _ = writeln!(out, "td_mode: {mode}, a_mode: approx\n");
    }
    let mut lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let has_sim = rows.iter().any(|r| r.simulation.is_some());

    type Getter = fn(&SweepRow) -> Option<String>;
    let mut grids: Vec<(&str, Getter)> = vec![
        ("(a) success probability p_T", |r| r.values.map(|v| format_sig6(v.p_success))),
        ("(b) dispatch time T_d", |r| r.values.map(|v| format_sig6(v.dispatch_time))),
        ("(c) optimal integer quantity Q*", |r| r.values.map(|v| v.q_star_integer.to_string())),
        ("(d) optimal long-run cost C(Q*)", |r| r.values.map(|v| format_sig6(v.optimal_cost))),
    ];
    if has_sim {
        grids.push(("(e) simulated cost at integer Q* (± 95% half-width)", |r| {
            r.simulation
                .map(|s| format!("{} ± {}", format_sig6(s.cost), format_sig6(s.half_width)))
        }));
    }

    for &lambda in &lambdas {
        let subset: Vec<&SweepRow> = rows.iter().filter(|r| r.lambda == lambda).collect();
        let mut ns: Vec<u32> = subset.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let mut ts: Vec<f64> = subset.iter().map(|r| r.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        for (title, get) in &grids {
            let _ = writeln!(out, "## {title}, λ = {}\n", format_sig6(lambda));
            out.push('|');
            out.push_str(" |");
            for t in &ts {
                let _ = write!(out, " T={} |", format_sig6(*t));
            }
            out.push_str("\n|---|");
            for _ in &ts {
                out.push_str("---:|");
            }
            out.push('\n');
            for n in &ns {
                let _ = write!(out, "| N={n} |");
                for t in &ts {
                    let cell = subset
                        .iter()
                        .find(|r| r.n == *n && r.t == *t)
                        .map(|r| get(r).unwrap_or_else(|| "error".into()))
                        .unwrap_or_default();
                    let _ = write!(out, " {cell} |");
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    let errors: Vec<&SweepRow> = rows.iter().filter(|r| r.is_error()).collect();
    if !errors.is_empty() {
        out.push_str("## Errors\n\n");
        for r in errors {
            let _ = writeln!(
                out,
                "- N={}, T={}, λ={}: {}",
                r.n,
                format_sig6(r.t),
                format_sig6(r.lambda),
                r.error.as_deref().unwrap_or_default()
            );
        }
    }
    out
}

/// Renders `rows` as a report document.
pub fn emit_report(rows: &[SweepRow], format: ReportFormat) -> Result<String> {
    emit_report_with_mode(rows, format, None)
}

/// As [`emit_report`]; markdown output additionally states the modes.
pub fn emit_report_with_mode(
    rows: &[SweepRow],
    format: ReportFormat,
    td_mode: Option<TdMode>,
) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("cannot emit a report with no rows".into()));
    }
    Ok(match format {
        ReportFormat::Csv => to_csv(rows),
        ReportFormat::Json => to_json(rows),
        ReportFormat::Markdown => to_markdown(rows, td_mode),
    })
}

/// Emits and writes a report to `path`.
pub fn write_report(rows: &[SweepRow], format: ReportFormat, path: &Path) -> Result<()> {
    let text = emit_report(rows, format)?;
    std::fs::write(path, text).map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))
}
