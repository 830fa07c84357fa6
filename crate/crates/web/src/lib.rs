//! Browser bindings. Every export takes plain numbers and strings and
//! returns a JSON document; failures come back as `{"error": "..."}`.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use groupbuy_core::costmodel::{self, AMode, CostParams, Policy};
use groupbuy_core::simulator::{self, SimulationConfig};
use groupbuy_core::stochastics::{AuctionParams, AuctionStatistics, TdMode};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Upper bounds that keep a single call responsive in the browser.
pub const MAX_CURVE_POINTS: u32 = 2_000;
pub const MAX_HEATMAP_CELLS: u32 = 10_000;
pub const MAX_SIM_CYCLES: u64 = 200_000;

type Outcome = Result<Value, String>;

fn finish(result: Outcome) -> String {
    let value = result.unwrap_or_else(|e| json!({ "error": e }));
    serde_json::to_string(&value).expect("serializable")
}

fn parse_td(mode: &str) -> Result<TdMode, String> {
    mode.parse().map_err(|e: groupbuy_core::Error| e.to_string())
}

/// Arguments shared by the cost-curve and simulation calls.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub n_required: u32,
    pub max_time: f64,
    pub arrival_rate: f64,
    pub costs: CostParams,
}

impl Scenario {
    fn statistics(&self) -> Result<(AuctionParams, AuctionStatistics), String> {
        let auction = AuctionParams::new(self.n_required, self.max_time, self.arrival_rate).map_err(|e| e.to_string())?;
        let stats = AuctionStatistics::compute(&auction).map_err(|e| e.to_string())?;
        Ok((auction, stats))
    }
}

/// Statistics, both optima and C(Q) sampled on `points` quantities in
/// `[q_min, q_max]` for each dispatch-time mode.
pub fn cost_curve(s: &Scenario, q_min: f64, q_max: f64, points: u32) -> Outcome {
    if !(q_min > 0.0 && q_max > q_min && q_max.is_finite()) {
        return Err(format!("quantity range must satisfy 0 < q_min < q_max, got [{q_min}, {q_max}]"));
    }
    if !(2..=MAX_CURVE_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_CURVE_POINTS}"));
    }
    let costs = s.costs;
    costs.validate_for_optimization().map_err(|e| e.to_string())?;
    let (_, stats) = s.statistics()?;
    let step = (q_max - q_min) / f64::from(points - 1);
    let qs: Vec<f64> = (0..points).map(|i| q_min + step * f64::from(i)).collect();
    let mut modes = serde_json::Map::new();
    for td in TdMode::ALL {
        let opt = costmodel::optimize(&stats, &costs, td).map_err(|e| e.to_string())?;
        let curve = qs
            .iter()
            .map(|&q| {
                costmodel::long_run_average_cost(&stats, &costs, Policy::new(q)?, td, AMode::Approx)
            })
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?;
        modes.insert(
            td.to_string(),
            json!({
                "dispatch_time": stats.dispatch_time(td),
                "q_star": opt.quantity,
                "q_star_integer": opt.integer_quantity,
                "optimal_cost": opt.cost,
                "cost": curve,
            }),
        );
    }
    Ok(json!({
        "p_success": stats.p_success,
        "truncated_mean": stats.e_min_duration,
        "conditional_mean": stats.e_cond_duration,
        "expected_failures": stats.expected_failures,
        "quantities": qs,
        "modes": modes,
    }))
}

/// p_T and T_d over an (N, T) grid at fixed λ. Rows are N values, columns
/// T values. Degenerate cells carry `null`.
#[allow(clippy::too_many_arguments)]
pub fn heatmap(
    n_min: u32,
    n_max: u32,
    n_steps: u32,
    t_min: f64,
    t_max: f64,
    t_steps: u32,
    arrival_rate: f64,
    td_mode: TdMode,
) -> Outcome {
    if n_min == 0 || n_max < n_min {
        return Err("need 1 <= n_min <= n_max".into());
    }
    if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) {
        return Err("need 0 < t_min <= t_max".into());
    }
    if n_steps == 0 || t_steps == 0 || n_steps.saturating_mul(t_steps) > MAX_HEATMAP_CELLS {
        return Err(format!("grid must have between 1 and {MAX_HEATMAP_CELLS} cells"));
    }
    let spread = |lo: f64, hi: f64, k: u32, i: u32| {
        if k == 1 {
            lo
        } else {
            lo + (hi - lo) * f64::from(i) / f64::from(k - 1)
        }
    };
    let mut ns: Vec<u32> = (0..n_steps)
        .map(|i| spread(f64::from(n_min), f64::from(n_max), n_steps, i).round() as u32)
        .collect();
    ns.dedup();
    let ts: Vec<f64> = (0..t_steps).map(|i| spread(t_min, t_max, t_steps, i)).collect();
    let mut p = Vec::with_capacity(ns.len());
    let mut td = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut p_row = Vec::with_capacity(ts.len());
        let mut td_row = Vec::with_capacity(ts.len());
        for &t in &ts {
            let auction = AuctionParams::new(n, t, arrival_rate).map_err(|e| e.to_string())?;
            match AuctionStatistics::compute(&auction) {
                Ok(s) => {
                    p_row.push(Some(s.p_success));
                    td_row.push(Some(s.dispatch_time(td_mode)));
                }
                Err(_) => {
                    p_row.push(None);
                    td_row.push(None);
                }
            }
        }
        p.push(p_row);
        td.push(td_row);
    }
    Ok(json!({
        "td_mode": td_mode,
        "arrival_rate": arrival_rate,
        "n_values": ns,
        "t_values": ts,
        "p_success": p,
        "dispatch_time": td,
    }))
}

/// One simulation run next to the analytic values for both modes.
pub fn simulation(s: &Scenario, quantity: f64, cycles: u64, seed: u64) -> Outcome {
    if cycles == 0 || cycles > MAX_SIM_CYCLES {
        return Err(format!("cycles must lie in 1..={MAX_SIM_CYCLES}"));
    }
    let (auction, stats) = s.statistics()?;
    let policy = Policy::new(quantity).map_err(|e| e.to_string())?;
    let r = simulator::simulate(&auction, &s.costs, policy, &SimulationConfig::new(cycles, seed))
        .map_err(|e| e.to_string())?;
    let analytic = |td, a| costmodel::long_run_average_cost(&stats, &s.costs, policy, td, a);
    let mut rows = Vec::new();
    for td in TdMode::ALL {
        for a in AMode::ALL {
            let c = analytic(td, a).map_err(|e| e.to_string())?;
            rows.push(json!({
                "td_mode": td,
                "a_mode": a,
                "analytic_cost": c,
                "z": r.long_run_cost.z_score(c),
            }));
        }
    }
    Ok(json!({
        "p_hat": r.p_hat,
        "p_success": stats.p_success,
        "mean_dispatch_interval": r.mean_dispatch_interval,
        "dispatch_time_paper": stats.dispatch_time_paper,
        "dispatch_time_consistent": stats.dispatch_time_consistent,
        "long_run_cost": r.long_run_cost,
        "counts": r.counts,
        "comparisons": rows,
    }))
}

#[allow(clippy::too_many_arguments)]
fn scenario(n: u32, t: f64, lambda: f64, d: f64, f: f64, i: f64, cp: f64, k: f64) -> Result<Scenario, String> {
    let costs = CostParams::new(d, f, i, cp, k).map_err(|e| e.to_string())?;
    Ok(Scenario {
        n_required: n,
        max_time: t,
        arrival_rate: lambda,
        costs,
    })
}

#[wasm_bindgen(js_name = costCurve)]
#[allow(clippy::too_many_arguments)]
pub fn cost_curve_js(
    n: u32,
    t: f64,
    lambda: f64,
    dispatch_cost: f64,
    transport_cost: f64,
    holding_rate: f64,
    penalty_cost: f64,
    reorder_cost: f64,
    q_min: f64,
    q_max: f64,
    points: u32,
) -> String {
    finish(
        scenario(n, t, lambda, dispatch_cost, transport_cost, holding_rate, penalty_cost, reorder_cost)
            .and_then(|s| cost_curve(&s, q_min, q_max, points)),
    )
}

#[wasm_bindgen(js_name = heatmap)]
#[allow(clippy::too_many_arguments)]
pub fn heatmap_js(
    n_min: u32,
    n_max: u32,
    n_steps: u32,
    t_min: f64,
    t_max: f64,
    t_steps: u32,
    lambda: f64,
    td_mode: &str,
) -> String {
    finish(parse_td(td_mode).and_then(|td| heatmap(n_min, n_max, n_steps, t_min, t_max, t_steps, lambda, td)))
}

/// `seed` arrives as a JS number; integers up to 2^53 are exact.
#[wasm_bindgen(js_name = simulate)]
#[allow(clippy::too_many_arguments)]
pub fn simulate_js(
    n: u32,
    t: f64,
    lambda: f64,
    dispatch_cost: f64,
    transport_cost: f64,
    holding_rate: f64,
    penalty_cost: f64,
    reorder_cost: f64,
    quantity: f64,
    cycles: u32,
    seed: f64,
) -> String {
    let seed = if seed.is_finite() && seed >= 0.0 { seed as u64 } else { 0 };
    finish(
        scenario(n, t, lambda, dispatch_cost, transport_cost, holding_rate, penalty_cost, reorder_cost)
            .and_then(|s| simulation(&s, quantity, u64::from(cycles), seed)),
    )
}
