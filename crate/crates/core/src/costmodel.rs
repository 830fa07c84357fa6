//! Renewal-reward cost model for one replenishment cycle.
//!
//! A cycle starts when stock is raised to Q and ends at the dispatch that
//! exhausts it. Over that cycle we charge holding, dispatching, transport,
//! failed-auction penalties and one reorder; the long-run average cost is
//! expected cycle cost over expected cycle length.
//!
//! The number of dispatches per cycle is `⌈Q/N⌉` for the real system
//! ([`AMode::Exact`]) and `Q/N` for the smooth closed forms
//! ([`AMode::Approx`]). All closed-form optimizers use the latter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastics::{AuctionStatistics, TdMode};

/// Cost coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// D, charged per dispatch.
    pub dispatch_cost: f64,
    /// F, charged per unit shipped.
    pub unit_transport_cost: f64,
    /// I, per unit held per unit time.
    pub holding_rate: f64,
    /// C_p, per failed auction.
    pub failure_penalty: f64,
    /// K, per replenishment order.
    pub reorder_cost: f64,
}

impl CostParams {
    pub fn new(
        dispatch_cost: f64,
        unit_transport_cost: f64,
        holding_rate: f64,
        failure_penalty: f64,
        reorder_cost: f64,
    ) -> Result<Self> {
        let costs = Self {
            dispatch_cost,
            unit_transport_cost,
            holding_rate,
            failure_penalty,
            reorder_cost,
        };
        costs.validate()?;
        Ok(costs)
    }

    /// Coefficients used in the numerical example of the model: D=40, F=4,
    /// I=0.02, C_p=10, K=300.
    pub fn reference() -> Self {
        Self {
            dispatch_cost: 40.0,
            unit_transport_cost: 4.0,
            holding_rate: 0.02,
            failure_penalty: 10.0,
            reorder_cost: 300.0,
        }
    }

    /// Every coefficient finite and nonnegative. Enough for cost evaluation
    /// and simulation.
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("dispatch_cost", self.dispatch_cost),
            ("unit_transport_cost", self.unit_transport_cost),
            ("holding_rate", self.holding_rate),
            ("failure_penalty", self.failure_penalty),
            ("reorder_cost", self.reorder_cost),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Additionally requires I > 0 and K > 0, without which the cost has no
    /// finite positive minimizer.
    pub fn validate_for_optimization(&self) -> Result<()> {
        self.validate()?;
        if !(self.holding_rate > 0.0) {
            return Err(Error::invalid("holding_rate", "must be > 0 to optimize Q"));
        }
        if !(self.reorder_cost > 0.0) {
            return Err(Error::invalid("reorder_cost", "must be > 0 to optimize Q"));
        }
        Ok(())
    }
}

/// Replenishment quantity Q.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Policy(f64);

impl Policy {
    pub fn new(quantity: f64) -> Result<Self> {
        if quantity > 0.0 && quantity.is_finite() {
            Ok(Self(quantity))
        } else {
            Err(Error::invalid("quantity", format!("must be finite and > 0, got {quantity}")))
        }
    }

    pub fn quantity(self) -> f64 {
        self.0
    }
}

/// How the dispatch count A per cycle is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AMode {
    /// A = ⌈Q/N⌉.
    Exact,
    /// A = Q/N.
    #[default]
    Approx,
}

impl AMode {
    pub const ALL: [AMode; 2] = [AMode::Exact, AMode::Approx];

    pub fn as_str(self) -> &'static str {
        match self {
            AMode::Exact => "exact",
            AMode::Approx => "approx",
        }
    }
}

impl fmt::Display for AMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AMode::Exact),
            "approx" => Ok(AMode::Approx),
            other => Err(Error::Config(format!(
                "unknown a_mode `{other}` (expected exact|approx)"
            ))),
        }
    }
}

pub fn dispatches_per_cycle(quantity: f64, n_required: u32, mode: AMode) -> f64 {
    let ratio = quantity / f64::from(n_required);
    match mode {
        AMode::Exact => ratio.ceil(),
        AMode::Approx => ratio,
    }
}

/// Expected per-cycle costs and the resulting long-run average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub dispatches_per_cycle: f64,
    pub cycle_length: f64,
    pub holding: f64,
    pub dispatching: f64,
    pub transport: f64,
    pub penalty: f64,
    pub reorder: f64,
    pub cycle_total: f64,
    pub long_run_average: f64,
}

/// Each cost item spread over the cycle length (cost per unit time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRates {
    pub holding: f64,
    pub dispatching: f64,
    pub transport: f64,
    pub penalty: f64,
    pub reorder: f64,
}

impl CostBreakdown {
    pub fn rates(&self) -> CostRates {
        let per_time = |c: f64| c / self.cycle_length;
        CostRates {
            holding: per_time(self.holding),
            dispatching: per_time(self.dispatching),
            transport: per_time(self.transport),
            penalty: per_time(self.penalty),
            reorder: per_time(self.reorder),
        }
    }
}

pub fn cycle_cost_breakdown(
    stats: &AuctionStatistics,
    costs: &CostParams,
    policy: Policy,
    td_mode: TdMode,
    a_mode: AMode,
) -> Result<CostBreakdown> {
    costs.validate()?;
    let q = policy.quantity();
    let n = f64::from(stats.n_required());
    let td = stats.dispatch_time(td_mode);
    let a = dispatches_per_cycle(q, stats.n_required(), a_mode);

    // Level during the i-th inter-dispatch interval is Q - (i-1)N.
    let mean_level = match a_mode {
        AMode::Approx => (q + n) / 2.0,
        AMode::Exact => q - (a - 1.0) * n / 2.0,
    };
    let holding = costs.holding_rate * a * td * mean_level;
    let dispatching = costs.dispatch_cost * a;
    let transport = costs.unit_transport_cost * a * n;
    let penalty = costs.failure_penalty * a * stats.expected_failures;
    let reorder = costs.reorder_cost;
    let cycle_total = holding + dispatching + transport + penalty + reorder;
    let cycle_length = a * td;
    Ok(CostBreakdown {
        dispatches_per_cycle: a,
        cycle_length,
        holding,
        dispatching,
        transport,
        penalty,
        reorder,
        cycle_total,
        long_run_average: cycle_total / cycle_length,
    })
}

/// Long-run average cost C(Q).
pub fn long_run_average_cost(
    stats: &AuctionStatistics,
    costs: &CostParams,
    policy: Policy,
    td_mode: TdMode,
    a_mode: AMode,
) -> Result<f64> {
    cycle_cost_breakdown(stats, costs, policy, td_mode, a_mode).map(|b| b.long_run_average)
}

/// `(C'(Q), C''(Q))` of the smooth (approx-A) cost.
pub fn cost_derivatives(
    stats: &AuctionStatistics,
    costs: &CostParams,
    policy: Policy,
    td_mode: TdMode,
) -> Result<(f64, f64)> {
    costs.validate()?;
    let q = policy.quantity();
    let kn_over_td = reorder_scale(stats, costs, td_mode);
    let first = costs.holding_rate / 2.0 - kn_over_td / (q * q);
    let second = 2.0 * kn_over_td / (q * q * q);
    Ok((first, second))
}

fn reorder_scale(stats: &AuctionStatistics, costs: &CostParams, td_mode: TdMode) -> f64 {
    costs.reorder_cost * f64::from(stats.n_required()) / stats.dispatch_time(td_mode)
}

/// Q* = sqrt(2KN / (I T_d)). Does not depend on D, F or C_p.
pub fn optimal_quantity(
    stats: &AuctionStatistics,
    costs: &CostParams,
    td_mode: TdMode,
) -> Result<f64> {
    costs.validate_for_optimization()?;
    if !stats.params.has_deadline() {
        // T_d = N/λ, so N cancels
        return eoq_limit(costs, stats.params.arrival_rate);
    }
    Ok((2.0 * reorder_scale(stats, costs, td_mode) / costs.holding_rate).sqrt())
}

/// C(Q*) = sqrt(2IKN/T_d) + IN/2 + D/T_d + FN/T_d + C_p E[N_a]/T_d.
pub fn optimal_cost(stats: &AuctionStatistics, costs: &CostParams, td_mode: TdMode) -> Result<f64> {
    costs.validate_for_optimization()?;
    let n = f64::from(stats.n_required());
    let td = stats.dispatch_time(td_mode);
    Ok((2.0 * costs.holding_rate * reorder_scale(stats, costs, td_mode)).sqrt()
        + costs.holding_rate * n / 2.0
        + costs.dispatch_cost / td
        + costs.unit_transport_cost * n / td
        + costs.failure_penalty * stats.expected_failures / td)
}

/// Cheaper of ⌊Q*⌋ and ⌈Q*⌉ under the smooth cost; ties go to the larger.
pub fn best_integer_quantity(
    stats: &AuctionStatistics,
    costs: &CostParams,
    td_mode: TdMode,
) -> Result<u64> {
    let q = optimal_quantity(stats, costs, td_mode)?;
    let lo = q.floor().max(1.0);
    let hi = q.ceil().max(1.0);
    if lo == hi {
        return Ok(hi as u64);
    }
    let cost_at = |v: f64| long_run_average_cost(stats, costs, Policy(v), td_mode, AMode::Approx);
    let (c_lo, c_hi) = (cost_at(lo)?, cost_at(hi)?);
    Ok(if c_hi <= c_lo { hi as u64 } else { lo as u64 })
}

/// Classical EOQ sqrt(2Kλ/I), the no-deadline limit of Q*.
pub fn eoq_limit(costs: &CostParams, arrival_rate: f64) -> Result<f64> {
    costs.validate_for_optimization()?;
    if !(arrival_rate > 0.0) || !arrival_rate.is_finite() {
        return Err(Error::invalid("arrival_rate", format!("must be finite and > 0, got {arrival_rate}")));
    }
    Ok((2.0 * costs.reorder_cost * arrival_rate / costs.holding_rate).sqrt())
}

/// Closed-form optimum together with its integer refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub td_mode: TdMode,
    pub quantity: f64,
    pub cost: f64,
    pub integer_quantity: u64,
    pub integer_cost: f64,
    pub breakdown: CostBreakdown,
}

pub fn optimize(stats: &AuctionStatistics, costs: &CostParams, td_mode: TdMode) -> Result<Optimum> {
    let quantity = optimal_quantity(stats, costs, td_mode)?;
    let cost = optimal_cost(stats, costs, td_mode)?;
    let integer_quantity = best_integer_quantity(stats, costs, td_mode)?;
    let integer_cost = long_run_average_cost(
        stats,
        costs,
        Policy(integer_quantity as f64),
        td_mode,
        AMode::Approx,
    )?;
    let breakdown = cycle_cost_breakdown(stats, costs, Policy(quantity), td_mode, AMode::Approx)?;
    Ok(Optimum {
        td_mode,
        quantity,
        cost,
        integer_quantity,
        integer_cost,
        breakdown,
    })
}
