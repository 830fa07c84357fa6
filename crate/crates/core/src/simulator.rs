//! Discrete-event Monte Carlo of the auction / dispatch / replenishment loop.
//!
//! Each auction round either collects N bidders before the deadline
//! (success: N units ship, D + F·N is charged) or times out (failure: C_p is
//! charged at the deadline). A new round starts immediately after either
//! outcome. Holding cost accrues on the piecewise-constant stock level. The
//! dispatch that takes stock to zero or below closes the replenishment
//! cycle, charges K and restocks.
//!
//! Nothing here calls into the closed-form model; it is the independent
//! check on it.
//!
//! # Random streams
//!
//! A run with seed `s` and replication index `r` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `r` via
//! `set_stream(r)`. [`simulate`] is replication 0. This derivation is part
//! of the crate's stable interface.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};

use crate::costmodel::{CostParams, Policy};
use crate::error::{Error, Result};
use crate::stochastics::{AuctionParams, TdMode};

/// z-value for a two-sided 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// What happens to demand left unserved by the dispatch that ends a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShortfallRule {
    /// Restock to exactly Q; the shortfall is served from the incoming order
    /// without reducing the restored level.
    #[default]
    ResetToQ,
    /// Restock to Q minus the shortfall. If that is not positive, further
    /// orders of Q are placed (each charged K) until it is.
    CarryShortfall,
}

impl ShortfallRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ShortfallRule::ResetToQ => "reset_to_q",
            ShortfallRule::CarryShortfall => "carry_shortfall",
        }
    }
}

impl fmt::Display for ShortfallRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShortfallRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reset_to_q" => Ok(ShortfallRule::ResetToQ),
            "carry_shortfall" => Ok(ShortfallRule::CarryShortfall),
            other => Err(Error::Config(format!(
                "unknown shortfall_rule `{other}` (expected reset_to_q|carry_shortfall)"
            ))),
        }
    }
}

/// How the N-th arrival time of a round is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawMethod {
    /// One Gamma(N, 1/λ) draw per round.
    #[default]
    Erlang,
    /// Accumulate exponential(λ) interarrivals, stopping at N or at T.
    Interarrival,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub num_cycles: u64,
    pub seed: u64,
    pub shortfall_rule: ShortfallRule,
    /// Dispatch-time semantics used when the result is set against the
    /// closed forms; does not affect the simulation itself.
    pub td_mode_for_comparison: TdMode,
    pub draw: DrawMethod,
}

impl SimulationConfig {
    pub fn new(num_cycles: u64, seed: u64) -> Self {
        Self {
            num_cycles,
            seed,
            shortfall_rule: ShortfallRule::default(),
            td_mode_for_comparison: TdMode::Consistent,
            draw: DrawMethod::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_cycles == 0 {
            return Err(Error::invalid("num_cycles", "must be at least 1"));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `(mean - value) / std_error`: how far the estimate sits from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value) / self.std_error
    }
}

/// Renewal-reward ratio estimate with a delta-method interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub value: f64,
    pub std_error: f64,
    /// 95% confidence half-width.
    pub half_width: f64,
}

impl RatioEstimate {
    /// `(estimate - value) / std_error`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.value - value) / self.std_error
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationCounts {
    pub auctions: u64,
    pub successes: u64,
    pub failures: u64,
    pub dispatches: u64,
    pub cycles: u64,
    /// Replenishment orders placed; exceeds `cycles` only under
    /// [`ShortfallRule::CarryShortfall`].
    pub orders: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub replication: u64,
    pub p_hat: Estimate,
    pub mean_dispatch_interval: Estimate,
    pub mean_cycle_length: Estimate,
    pub mean_cycle_cost: Estimate,
    pub long_run_cost: RatioEstimate,
    pub counts: SimulationCounts,
    pub total_time: f64,
    pub total_cost: f64,
    /// Dispatches in each simulated cycle, summed.
    pub cycle_dispatch_total: u64,
}

/// One line of the optional event log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub cycle: u64,
    pub start: f64,
    pub duration: f64,
    pub success: bool,
    /// Stock after the round, after any restock it triggered.
    pub level_after: f64,
    pub replenished: bool,
}

/// Online mean and variance.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean,
            std_error: (self.variance() / self.n as f64).sqrt(),
        }
    }
}

/// Online co-moments of (cost, length) per cycle.
#[derive(Debug, Clone, Copy, Default)]
struct PairMoments {
    cost: Moments,
    length: Moments,
    co: f64,
}

impl PairMoments {
    fn push(&mut self, cost: f64, length: f64) {
        let d_len = length - self.length.mean;
        self.cost.push(cost);
        self.length.push(length);
        self.co += d_len * (cost - self.cost.mean);
    }

    /// Delta-method standard error of mean(cost)/mean(length).
    fn ratio_std_error(&self, ratio: f64) -> f64 {
        let n = self.cost.n;
        if n < 2 {
            return f64::NAN;
        }
        let cov = self.co / (n - 1) as f64;
        let var = self.cost.variance() - 2.0 * ratio * cov + ratio * ratio * self.length.variance();
        (var.max(0.0) / n as f64).sqrt() / self.length.mean
    }
}

/// The RNG for replication `replication` of `seed`.
pub fn stream_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

enum RoundSampler {
    Erlang(Gamma<f64>),
    Interarrival { gap: Exp<f64>, n: u32 },
}

impl RoundSampler {
    fn new(auction: &AuctionParams, draw: DrawMethod) -> Result<Self> {
        let rate = auction.arrival_rate;
        let bad = |e: &dyn fmt::Display| Error::Domain(format!("sampler: {e}"));
        Ok(match draw {
            DrawMethod::Erlang => RoundSampler::Erlang(
                Gamma::new(f64::from(auction.n_required), 1.0 / rate).map_err(|e| bad(&e))?,
            ),
            DrawMethod::Interarrival => RoundSampler::Interarrival {
                gap: Exp::new(rate).map_err(|e| bad(&e))?,
                n: auction.n_required,
            },
        })
    }

    /// Round duration and whether N bidders arrived strictly before `deadline`.
    fn round<R: Rng>(&self, rng: &mut R, deadline: f64) -> (f64, bool) {
        match self {
            RoundSampler::Erlang(g) => {
                let s = g.sample(rng);
                if s < deadline {
                    (s, true)
                } else {
                    (deadline, false)
                }
            }
            RoundSampler::Interarrival { gap, n } => {
                let mut s = 0.0;
                for _ in 0..*n {
                    s += gap.sample(rng);
                    if s >= deadline {
                        return (deadline, false);
                    }
                }
                (s, true)
            }
        }
    }
}

/// Simulates `config.num_cycles` replenishment cycles (replication 0).
pub fn simulate(
    auction: &AuctionParams,
    costs: &CostParams,
    policy: Policy,
    config: &SimulationConfig,
) -> Result<SimulationResult> {
    run(auction, costs, policy, config, 0, None)
}

/// As [`simulate`], writing one JSON line per auction round to `log`.
pub fn simulate_with_log(
    auction: &AuctionParams,
    costs: &CostParams,
    policy: Policy,
    config: &SimulationConfig,
    log: &mut dyn Write,
) -> Result<SimulationResult> {
    run(auction, costs, policy, config, 0, Some(log))
}

/// A single run on random stream `replication`.
pub fn simulate_replication(
    auction: &AuctionParams,
    costs: &CostParams,
    policy: Policy,
    config: &SimulationConfig,
    replication: u64,
) -> Result<SimulationResult> {
    run(auction, costs, policy, config, replication, None)
}

/// Independent replications `0..num_replications`, in index order.
pub fn replicate(
    auction: &AuctionParams,
    costs: &CostParams,
    policy: Policy,
    config: &SimulationConfig,
    num_replications: u64,
) -> Result<Vec<SimulationResult>> {
    if num_replications == 0 {
        return Err(Error::invalid("replications", "must be at least 1"));
    }
    let one = |r: u64| run(auction, costs, policy, config, r, None);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..num_replications).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..num_replications).map(one).collect()
    }
}

fn run(
    auction: &AuctionParams,
    costs: &CostParams,
    policy: Policy,
    config: &SimulationConfig,
    replication: u64,
    mut log: Option<&mut dyn Write>,
) -> Result<SimulationResult> {
    auction.validate()?;
    costs.validate()?;
    config.validate()?;
    if !auction.has_deadline() {
        return Err(Error::Config(
            "simulation needs a finite max_time; use a large finite deadline instead".into(),
        ));
    }

    let mut rng = stream_rng(config.seed, replication);
    let sampler = RoundSampler::new(auction, config.draw)?;
    let deadline = auction.max_time;
    let q = policy.quantity();
    let n = f64::from(auction.n_required);
    let success_charge = costs.dispatch_cost + costs.unit_transport_cost * n;

    let mut counts = SimulationCounts::default();
    let mut intervals = Moments::default();
    let mut cycles = PairMoments::default();
    let mut cycle_dispatch_total = 0_u64;
    let mut total_cost = 0.0;
    let mut clock = 0.0;
    let mut since_dispatch = 0.0;
    let mut level = q;

    for cycle in 0..config.num_cycles {
        let cycle_start = clock;
        let mut holding = 0.0;
        let mut charges = 0.0;
        let mut dispatches = 0_u64;
        loop {
            let (duration, success) = sampler.round(&mut rng, deadline);
            let start = clock;
            holding += level * duration;
            clock += duration;
            since_dispatch += duration;
            counts.auctions += 1;
            let mut replenished = false;
            if success {
                counts.successes += 1;
                dispatches += 1;
                charges += success_charge;
                intervals.push(since_dispatch);
                since_dispatch = 0.0;
                level -= n;
                if level <= 0.0 {
                    replenished = true;
                    let shortfall = -level;
                    level = q;
                    charges += costs.reorder_cost;
                    counts.orders += 1;
                    if config.shortfall_rule == ShortfallRule::CarryShortfall {
                        level -= shortfall;
                        while level <= 0.0 {
                            level += q;
                            charges += costs.reorder_cost;
                            counts.orders += 1;
                        }
                    }
                }
            } else {
                counts.failures += 1;
                charges += costs.failure_penalty;
            }
            if let Some(out) = log.as_deref_mut() {
                let rec = RoundRecord {
                    cycle,
                    start,
                    duration,
                    success,
                    level_after: level,
                    replenished,
                };
                let line = serde_json::to_string(&rec).map_err(|e| Error::Config(e.to_string()))?;
                writeln!(out, "{line}").map_err(|e| Error::Config(format!("event log: {e}")))?;
            }
            if replenished {
                break;
            }
        }
        let cycle_cost = costs.holding_rate * holding + charges;
        total_cost += cycle_cost;
        cycles.push(cycle_cost, clock - cycle_start);
        counts.dispatches += dispatches;
        cycle_dispatch_total += dispatches;
        counts.cycles += 1;
    }

    let auctions = counts.auctions as f64;
    let p = counts.successes as f64 / auctions;
    let long_run = total_cost / clock;
    let se = cycles.ratio_std_error(long_run);
    Ok(SimulationResult {
        replication,
        p_hat: Estimate {
            mean: p,
            std_error: (p * (1.0 - p) / auctions).sqrt(),
        },
        mean_dispatch_interval: intervals.estimate(),
        mean_cycle_length: cycles.length.estimate(),
        mean_cycle_cost: cycles.cost.estimate(),
        long_run_cost: RatioEstimate {
            value: long_run,
            std_error: se,
            half_width: Z_95 * se,
        },
        counts,
        total_time: clock,
        total_cost,
        cycle_dispatch_total,
    })
}
