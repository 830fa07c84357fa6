//! Flat TOML run configuration and its command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use groupbuy_core::{AMode, AuctionParams, CostParams, Error as CoreError, ShortfallRule, TdMode};
use serde::Deserialize;

use crate::CliError;

/// Keys exactly as they appear in the file. Everything is optional here;
/// [`RunConfig::resolve`] decides what each command needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n_required: Option<i64>,
    pub max_time: Option<f64>,
    pub arrival_rate: Option<f64>,
    pub dispatch_cost: Option<f64>,
    pub transport_cost_per_unit: Option<f64>,
    pub holding_rate: Option<f64>,
    pub penalty_cost: Option<f64>,
    pub reorder_cost: Option<f64>,
    pub quantity: Option<f64>,
    pub td_mode: Option<String>,
    pub a_mode: Option<String>,
    pub shortfall_rule: Option<String>,
    pub num_cycles: Option<i64>,
    pub replications: Option<i64>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub path: Option<PathBuf>,
    pub n_values: Option<Vec<i64>>,
    pub t_values: Option<Vec<f64>>,
    pub lambda_values: Option<Vec<f64>>,
    pub simulate_cells: Option<bool>,
}

/// One flag per configuration key. A flag that is present replaces the
/// file's value.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long = "n_required", alias = "n-required", value_name = "N")]
    pub n_required: Option<i64>,
    /// Auction deadline T; `inf` removes the deadline.
    #[arg(long = "max_time", alias = "max-time", value_name = "T")]
    pub max_time: Option<f64>,
    #[arg(long = "arrival_rate", alias = "arrival-rate", value_name = "LAMBDA")]
    pub arrival_rate: Option<f64>,
    #[arg(long = "dispatch_cost", alias = "dispatch-cost", value_name = "D")]
    pub dispatch_cost: Option<f64>,
    #[arg(long = "transport_cost_per_unit", alias = "transport-cost-per-unit", value_name = "F")]
    pub transport_cost_per_unit: Option<f64>,
    #[arg(long = "holding_rate", alias = "holding-rate", value_name = "I")]
    pub holding_rate: Option<f64>,
    #[arg(long = "penalty_cost", alias = "penalty-cost", value_name = "C_P")]
    pub penalty_cost: Option<f64>,
    #[arg(long = "reorder_cost", alias = "reorder-cost", value_name = "K")]
    pub reorder_cost: Option<f64>,
    #[arg(long, value_name = "Q")]
    pub quantity: Option<f64>,
    /// paper | consistent
    #[arg(long = "td_mode", alias = "td-mode", value_name = "MODE")]
    pub td_mode: Option<String>,
    /// approx | exact
    #[arg(long = "a_mode", alias = "a-mode", value_name = "MODE")]
    pub a_mode: Option<String>,
    /// reset_to_q | carry_shortfall
    #[arg(long = "shortfall_rule", alias = "shortfall-rule", value_name = "RULE")]
    pub shortfall_rule: Option<String>,
    #[arg(long = "cycles", visible_alias = "num_cycles", alias = "num-cycles", value_name = "COUNT")]
    pub num_cycles: Option<i64>,
    #[arg(long, value_name = "COUNT")]
    pub replications: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// text | json for optimize and simulate; csv | json | markdown for sweep
    #[arg(long)]
    pub format: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long = "out", visible_alias = "path", value_name = "FILE")]
    pub path: Option<PathBuf>,
    #[arg(long = "n_values", alias = "n-values", value_delimiter = ',', value_name = "LIST")]
    pub n_values: Option<Vec<i64>>,
    #[arg(long = "t_values", alias = "t-values", value_delimiter = ',', value_name = "LIST")]
    pub t_values: Option<Vec<f64>>,
    #[arg(long = "lambda_values", alias = "lambda-values", value_delimiter = ',', value_name = "LIST")]
    pub lambda_values: Option<Vec<f64>>,
    #[arg(long = "simulate_cells", alias = "simulate-cells", value_name = "BOOL")]
    pub simulate_cells: Option<bool>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: Overrides) {
        macro_rules! take {
            ($($f:ident),*) => {
                $(if o.$f.is_some() { self.$f = o.$f; })*
            };
        }
        take!(
            n_required, max_time, arrival_rate, dispatch_cost, transport_cost_per_unit,
            holding_rate, penalty_cost, reorder_cost, quantity, td_mode, a_mode,
            shortfall_rule, num_cycles, replications, seed, format, path, n_values,
            t_values, lambda_values, simulate_cells
        );
    }
}

pub const DEFAULT_NUM_CYCLES: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 42;

/// A checked configuration. Auction keys stay optional because a sweep can
/// take its grid from the list keys alone.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n_required: Option<u32>,
    pub max_time: Option<f64>,
    pub arrival_rate: Option<f64>,
    pub costs: CostParams,
    pub quantity: Option<f64>,
    pub td_mode: TdMode,
    pub a_mode: AMode,
    pub shortfall_rule: ShortfallRule,
    pub num_cycles: u64,
    pub replications: u64,
    pub seed: u64,
    pub format: Option<String>,
    pub path: Option<PathBuf>,
    pub n_values: Option<Vec<u32>>,
    pub t_values: Option<Vec<f64>>,
    pub lambda_values: Option<Vec<f64>>,
    pub simulate_cells: bool,
}

fn field_error(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

fn required<T>(value: Option<T>, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| field_error(field, "missing required key"))
}

fn count(value: i64, field: &str, min: i64) -> Result<u64, CliError> {
    if value < min {
        return Err(field_error(field, format!("must be at least {min}, got {value}")));
    }
    Ok(value as u64)
}

fn n_value(value: i64, field: &str) -> Result<u32, CliError> {
    u32::try_from(value)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| field_error(field, format!("must be an integer in 1..=4294967295, got {value}")))
}

fn parse_mode<T: FromStr<Err = CoreError>>(value: Option<&str>, field: &str, default: T) -> Result<T, CliError> {
    match value {
        None => Ok(default),
        Some(s) => s.parse().map_err(|e| match e {
            CoreError::Config(m) => field_error(field, m),
            other => field_error(field, other),
        }),
    }
}

fn cost(value: Option<f64>, field: &str) -> Result<f64, CliError> {
    let v = required(value, field)?;
    if !v.is_finite() || v < 0.0 {
        return Err(field_error(field, format!("must be finite and >= 0, got {v}")));
    }
    Ok(v)
}

/// Core error field names that differ from the configuration keys.
pub fn config_key(core_field: &str) -> &str {
    match core_field {
        "unit_transport_cost" => "transport_cost_per_unit",
        "failure_penalty" => "penalty_cost",
        "num_replications" => "replications",
        other => other,
    }
}

impl RunConfig {
    pub fn resolve(raw: RawConfig) -> Result<Self, CliError> {
        let costs = CostParams {
            dispatch_cost: cost(raw.dispatch_cost, "dispatch_cost")?,
            unit_transport_cost: cost(raw.transport_cost_per_unit, "transport_cost_per_unit")?,
            holding_rate: cost(raw.holding_rate, "holding_rate")?,
            failure_penalty: cost(raw.penalty_cost, "penalty_cost")?,
            reorder_cost: cost(raw.reorder_cost, "reorder_cost")?,
        };
        let n_required = raw.n_required.map(|n| n_value(n, "n_required")).transpose()?;
        if let Some(t) = raw.max_time {
            if !(t > 0.0) {
                return Err(field_error("max_time", format!("must be > 0 (inf allowed), got {t}")));
            }
        }
        if let Some(l) = raw.arrival_rate {
            if !(l > 0.0) || !l.is_finite() {
                return Err(field_error("arrival_rate", format!("must be finite and > 0, got {l}")));
            }
        }
        if let Some(q) = raw.quantity {
            if !(q > 0.0) || !q.is_finite() {
                return Err(field_error("quantity", format!("must be finite and > 0, got {q}")));
            }
        }
        let n_values = raw
            .n_values
            .map(|v| v.into_iter().map(|n| n_value(n, "n_values")).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        for (field, list) in [("t_values", &raw.t_values), ("lambda_values", &raw.lambda_values)] {
            if let Some(list) = list {
                if list.is_empty() {
                    return Err(field_error(field, "must not be empty"));
                }
                if let Some(bad) = list.iter().find(|v| !(**v > 0.0)) {
                    return Err(field_error(field, format!("entries must be > 0, got {bad}")));
                }
            }
        }
        if n_values.as_ref().is_some_and(Vec::is_empty) {
            return Err(field_error("n_values", "must not be empty"));
        }
        Ok(RunConfig {
            n_required,
            max_time: raw.max_time,
            arrival_rate: raw.arrival_rate,
            costs,
            quantity: raw.quantity,
            td_mode: parse_mode(raw.td_mode.as_deref(), "td_mode", TdMode::Paper)?,
            a_mode: parse_mode(raw.a_mode.as_deref(), "a_mode", AMode::Approx)?,
            shortfall_rule: parse_mode(raw.shortfall_rule.as_deref(), "shortfall_rule", ShortfallRule::ResetToQ)?,
            num_cycles: count(raw.num_cycles.unwrap_or(DEFAULT_NUM_CYCLES as i64), "num_cycles", 1)?,
            replications: count(raw.replications.unwrap_or(1), "replications", 1)?,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            format: raw.format,
            path: raw.path,
            n_values,
            t_values: raw.t_values,
            lambda_values: raw.lambda_values,
            simulate_cells: raw.simulate_cells.unwrap_or(false),
        })
    }

    /// File (if any) plus flags, flags winning.
    pub fn load(path: Option<&Path>, overrides: Overrides) -> Result<Self, CliError> {
        let mut raw = match path {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        raw.apply(overrides);
        Self::resolve(raw)
    }

    pub fn auction(&self) -> Result<AuctionParams, CliError> {
        let n = required(self.n_required, "n_required")?;
        let t = required(self.max_time, "max_time")?;
        let l = required(self.arrival_rate, "arrival_rate")?;
        AuctionParams::new(n, t, l).map_err(CliError::from)
    }

    pub fn mode_header(&self) -> String {
        format!("td_mode: {}, a_mode: {}", self.td_mode, self.a_mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
n_required = 100
max_time = 7.0
arrival_rate = 14.0
dispatch_cost = 40.0
transport_cost_per_unit = 4.0
holding_rate = 0.02
penalty_cost = 10.0
reorder_cost = 300.0
"#;

    fn resolve(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::resolve(RawConfig::from_toml(text).unwrap())
    }

    #[test]
    fn base_file_resolves_with_defaults() {
        let c = resolve(BASE).unwrap();
        assert_eq!(c.costs, CostParams::reference());
        assert_eq!(c.td_mode, TdMode::Paper);
        assert_eq!(c.a_mode, AMode::Approx);
        assert_eq!(c.num_cycles, DEFAULT_NUM_CYCLES);
        assert_eq!(c.auction().unwrap(), AuctionParams::new(100, 7.0, 14.0).unwrap());
    }

    #[test]
    fn infinite_deadline_literal() {
        let c = resolve(&BASE.replace("max_time = 7.0", "max_time = inf")).unwrap();
        assert!(c.auction().unwrap().max_time.is_infinite());
    }

    #[test]
    fn flags_win() {
        let mut raw = RawConfig::from_toml(BASE).unwrap();
        raw.apply(Overrides {
            holding_rate: Some(0.05),
            seed: Some(7),
            ..Overrides::default()
        });
        let c = RunConfig::resolve(raw).unwrap();
        assert_eq!(c.costs.holding_rate, 0.05);
        assert_eq!(c.seed, 7);
        assert_eq!(c.costs.reorder_cost, 300.0);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |r: Result<RunConfig, CliError>| r.unwrap_err().to_string();
        assert!(msg(resolve(&BASE.replace("holding_rate = 0.02", ""))).contains("holding_rate"));
        assert!(msg(resolve(&BASE.replace("penalty_cost = 10.0", "penalty_cost = -1.0"))).contains("penalty_cost"));
        assert!(msg(resolve(&format!("{BASE}num_cycles = 0"))).contains("num_cycles"));
        assert!(msg(resolve(&format!("{BASE}td_mode = \"fast\""))).contains("td_mode"));
        assert!(msg(resolve(&format!("{BASE}n_values = [0]"))).contains("n_values"));
        let unknown = RawConfig::from_toml(&format!("{BASE}holding = 1.0")).unwrap_err();
        assert!(unknown.to_string().contains("holding"));
    }

    #[test]
    fn auction_keys_only_needed_on_demand() {
        let c = resolve(&BASE.replace("n_required = 100", "")).unwrap();
        assert!(c.auction().unwrap_err().to_string().contains("n_required"));
    }
}
