//! Auction-level stochastic quantities under Poisson bidder arrivals.
//!
//! An auction succeeds when the N-th bidder arrives before the deadline T.
//! The arrival instant S_N is Erlang(N, λ), so every quantity here reduces
//! to regularized incomplete gamma evaluations at `λT`.
//!
//! Two readings of "expected auction duration" are carried side by side:
//! the truncated mean `E[min(S_N, T)]` (what the published closed form
//! evaluates to) and the conditional mean `E[S_N | S_N < T]` (what a
//! renewal argument over successful auctions actually needs). See
//! [`TdMode`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_poisson_pmf, poisson_upper_tail, regularized_gamma_pair};

pub use crate::special::regularized_lower_gamma;

/// Success probabilities below this are treated as degenerate designs.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-300;

/// The seller's auction design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuctionParams {
    /// Bidders required for a successful auction (N).
    pub n_required: u32,
    /// Auction deadline (T); `f64::INFINITY` means no deadline.
    pub max_time: f64,
    /// Bidder arrival rate (λ).
    pub arrival_rate: f64,
}

impl AuctionParams {
    pub fn new(n_required: u32, max_time: f64, arrival_rate: f64) -> Result<Self> {
        let params = Self {
            n_required,
            max_time,
            arrival_rate,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_required == 0 {
            return Err(Error::invalid("n_required", "must be at least 1"));
        }
        if !(self.max_time > 0.0) {
            return Err(Error::invalid("max_time", format!("must be > 0, got {}", self.max_time)));
        }
        if !(self.arrival_rate > 0.0) || !self.arrival_rate.is_finite() {
            return Err(Error::invalid(
                "arrival_rate",
                format!("must be finite and > 0, got {}", self.arrival_rate),
            ));
        }
        Ok(())
    }

    pub fn has_deadline(&self) -> bool {
        self.max_time.is_finite()
    }

    /// λT, the expected number of arrivals within one auction window.
    pub fn expected_arrivals(&self) -> f64 {
        self.arrival_rate * self.max_time
    }

    /// E[S_N] = N/λ, the mean time to the N-th arrival with no deadline.
    pub fn unconstrained_mean(&self) -> f64 {
        f64::from(self.n_required) / self.arrival_rate
    }

    fn finite_time(&self, op: &str) -> Result<f64> {
        if self.has_deadline() {
            Ok(self.max_time)
        } else {
            Err(Error::Domain(format!(
                "{op} needs a finite max_time; use dispatch_time for the T = inf limit"
            )))
        }
    }
}

/// Which duration semantics feeds the dispatch-time recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TdMode {
    /// Truncated mean `E[min(S_N, T)]`, reproducing the published tables.
    #[default]
    Paper,
    /// True conditional mean `E[S_N | S_N < T]`; matches simulation.
    Consistent,
}

impl TdMode {
    pub const ALL: [TdMode; 2] = [TdMode::Paper, TdMode::Consistent];

    pub fn as_str(self) -> &'static str {
        match self {
            TdMode::Paper => "paper",
            TdMode::Consistent => "consistent",
        }
    }
}

impl fmt::Display for TdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(TdMode::Paper),
            "consistent" => Ok(TdMode::Consistent),
            other => Err(Error::Config(format!(
                "unknown td_mode `{other}` (expected paper|consistent)"
            ))),
        }
    }
}

/// Erlang(N, λ) density of the N-th arrival instant.
pub fn erlang_pdf(t: f64, params: &AuctionParams) -> Result<f64> {
    params.validate()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("erlang_pdf needs t >= 0, got {t}")));
    }
    let lambda = params.arrival_rate;
    let shape = f64::from(params.n_required - 1);
    // λ · Poisson(N-1; λt) mass
    Ok(lambda * ln_poisson_pmf(shape, lambda * t).exp())
}

/// Erlang(N, λ) distribution function, `P(N, λt)`.
pub fn erlang_cdf(t: f64, params: &AuctionParams) -> Result<f64> {
    params.validate()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("erlang_cdf needs t >= 0, got {t}")));
    }
    regularized_lower_gamma(f64::from(params.n_required), params.arrival_rate * t)
}

/// Probability that N bidders arrive before the deadline.
pub fn success_probability(params: &AuctionParams) -> Result<f64> {
    success_pair(params).map(|(p, _)| p)
}

/// Same quantity via `1 - Σ_{n<N} e^{-λT}(λT)^n/n!` with log-space masses.
pub fn success_probability_poisson_tail(params: &AuctionParams) -> Result<f64> {
    params.validate()?;
    Ok(poisson_upper_tail(
        params.n_required,
        params.expected_arrivals(),
    ))
}

/// `(p_T, 1 - p_T)`, each with full relative accuracy.
fn success_pair(params: &AuctionParams) -> Result<(f64, f64)> {
    params.validate()?;
    if !params.has_deadline() {
        return Ok((1.0, 0.0));
    }
    regularized_gamma_pair(f64::from(params.n_required), params.expected_arrivals())
}

/// `E[min(S_N, T)] = (1/λ) Σ_{n=0}^{N-1} P(n+1, λT)`.
pub fn truncated_mean_duration(params: &AuctionParams) -> Result<f64> {
    params.validate()?;
    params.finite_time("truncated_mean_duration")?;
    let x = params.expected_arrivals();
    let mut terms = Vec::with_capacity(params.n_required as usize);
    for n in 0..params.n_required {
        terms.push(regularized_lower_gamma(f64::from(n) + 1.0, x)?);
    }
    Ok(crate::special::neumaier_sum(terms) / params.arrival_rate)
}

/// `E[min(S_N, T)]` by the closed form `(N/λ)P(N+1, λT) + T(1 - P(N, λT))`.
pub fn truncated_mean_duration_closed_form(params: &AuctionParams) -> Result<f64> {
    params.validate()?;
    let t = params.finite_time("truncated_mean_duration")?;
    let n = f64::from(params.n_required);
    let x = params.expected_arrivals();
    let p_next = regularized_lower_gamma(n + 1.0, x)?;
    let (_, q) = regularized_gamma_pair(n, x)?;
    Ok(params.unconstrained_mean() * p_next + t * q)
}

/// `E[S_N | S_N < T] = (N/λ) P(N+1, λT) / P(N, λT)`.
pub fn conditional_success_duration(params: &AuctionParams) -> Result<f64> {
    params.validate()?;
    params.finite_time("conditional_success_duration")?;
    let n = f64::from(params.n_required);
    let x = params.expected_arrivals();
    let p = regularized_lower_gamma(n, x)?;
    if p < MIN_SUCCESS_PROBABILITY {
        return Err(Error::Underflow { p });
    }
    let p_next = regularized_lower_gamma(n + 1.0, x)?;
    Ok(params.unconstrained_mean() * p_next / p)
}

/// Mean number of failed auctions before a success, `(1 - p)/p`.
pub fn expected_failures(p_success: f64) -> Result<f64> {
    if !(p_success <= 1.0) {
        return Err(Error::Domain(format!(
            "success probability must lie in (0, 1], got {p_success}"
        )));
    }
    if p_success < MIN_SUCCESS_PROBABILITY {
        return Err(Error::Underflow { p: p_success });
    }
    Ok((1.0 - p_success) / p_success)
}

/// Expected time between consecutive dispatches.
pub fn dispatch_time(params: &AuctionParams, mode: TdMode) -> Result<f64> {
    AuctionStatistics::compute(params).map(|s| s.dispatch_time(mode))
}

/// Every derived auction quantity for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuctionStatistics {
    pub params: AuctionParams,
    /// p_T.
    pub p_success: f64,
    /// `E[min(S_N, T)]`.
    pub e_min_duration: f64,
    /// `E[S_N | S_N < T]`.
    pub e_cond_duration: f64,
    /// `E[N_a] = (1 - p_T)/p_T`.
    pub expected_failures: f64,
    pub dispatch_time_paper: f64,
    pub dispatch_time_consistent: f64,
}

impl AuctionStatistics {
    pub fn compute(params: &AuctionParams) -> Result<Self> {
        let (p, q) = success_pair(params)?;
        if p < MIN_SUCCESS_PROBABILITY {
            return Err(Error::Underflow { p });
        }
        if !params.has_deadline() {
            let mean = params.unconstrained_mean();
            return Ok(Self {
                params: *params,
                p_success: 1.0,
                e_min_duration: mean,
                e_cond_duration: mean,
                expected_failures: 0.0,
                dispatch_time_paper: mean,
                dispatch_time_consistent: mean,
            });
        }
        let failures = q / p;
        let e_min = truncated_mean_duration(params)?;
        let e_cond = conditional_success_duration(params)?;
        let t = params.max_time;
        Ok(Self {
            params: *params,
            p_success: p,
            e_min_duration: e_min,
            e_cond_duration: e_cond,
            expected_failures: failures,
            dispatch_time_paper: failures * t + e_min,
            dispatch_time_consistent: e_cond + failures * t,
        })
    }

    pub fn dispatch_time(&self, mode: TdMode) -> f64 {
        match mode {
            TdMode::Paper => self.dispatch_time_paper,
            TdMode::Consistent => self.dispatch_time_consistent,
        }
    }

    /// The single-auction duration feeding `mode`.
    pub fn auction_duration(&self, mode: TdMode) -> f64 {
        match mode {
            TdMode::Paper => self.e_min_duration,
            TdMode::Consistent => self.e_cond_duration,
        }
    }

    pub fn n_required(&self) -> u32 {
        self.params.n_required
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> AuctionParams {
        AuctionParams::new(100, 7.0, 14.0).unwrap()
    }

    #[test]
    fn params_validation_names_fields() {
        let err = AuctionParams::new(0, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "n_required", .. }));
        let err = AuctionParams::new(3, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "max_time", .. }));
        let err = AuctionParams::new(3, 1.0, -2.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "arrival_rate", .. }));
        assert!(AuctionParams::new(3, f64::INFINITY, 2.0).is_ok());
    }

    #[test]
    fn erlang_pdf_at_origin() {
        let p = AuctionParams::new(1, 1.0, 2.0).unwrap();
        assert_eq!(erlang_pdf(0.0, &p).unwrap(), 2.0);
        for n in 2..6 {
            let p = AuctionParams::new(n, 1.0, 3.7).unwrap();
            assert_eq!(erlang_pdf(0.0, &p).unwrap(), 0.0);
        }
        assert!(erlang_pdf(-1.0, &p).is_err());
    }

    #[test]
    fn single_bidder_closed_forms() {
        let (t, lambda) = (1.3, 2.2);
        let p = AuctionParams::new(1, t, lambda).unwrap();
        let surv = (-lambda * t).exp();
        assert!((success_probability(&p).unwrap() - (1.0 - surv)).abs() < 1e-15);
        assert!((truncated_mean_duration(&p).unwrap() - (1.0 - surv) / lambda).abs() < 1e-15);
        let cond = 1.0 / lambda - t * surv / (1.0 - surv);
        assert!((conditional_success_duration(&p).unwrap() - cond).abs() < 1e-14);
    }

    #[test]
    fn base_case_published_values() {
        let stats = AuctionStatistics::compute(&base()).unwrap();
        assert!((stats.p_success - 0.4333).abs() < 5e-5);
        assert!((stats.e_min_duration - 6.7829).abs() < 1e-3);
        assert!((stats.dispatch_time_paper - 15.9376).abs() < 1e-3);
        assert!(stats.e_cond_duration < 6.7829);
    }

    #[test]
    fn expected_failures_edges() {
        assert_eq!(expected_failures(1.0).unwrap(), 0.0);
        assert_eq!(expected_failures(0.5).unwrap(), 1.0);
        assert!((expected_failures(0.4333).unwrap() - 0.5667 / 0.4333).abs() < 1e-15);
        assert!(matches!(expected_failures(1e-301), Err(Error::Underflow { .. })));
        assert!(expected_failures(1.5).is_err());
    }

    #[test]
    fn infinite_deadline_routes_to_limits() {
        let p = AuctionParams::new(100, f64::INFINITY, 14.0).unwrap();
        assert_eq!(success_probability(&p).unwrap(), 1.0);
        for mode in TdMode::ALL {
            assert_eq!(dispatch_time(&p, mode).unwrap(), 100.0 / 14.0);
        }
        assert!(matches!(truncated_mean_duration(&p), Err(Error::Domain(_))));
        assert!(matches!(conditional_success_duration(&p), Err(Error::Domain(_))));
        let stats = AuctionStatistics::compute(&p).unwrap();
        assert_eq!(stats.expected_failures, 0.0);
    }

    #[test]
    fn degenerate_design_fails_loudly() {
        // λT = 1 with N = 400: p ≈ e^{-1}/400! underflows
        let p = AuctionParams::new(400, 1.0, 1.0).unwrap();
        assert!(matches!(AuctionStatistics::compute(&p), Err(Error::Underflow { .. })));
        assert!(matches!(conditional_success_duration(&p), Err(Error::Underflow { .. })));
    }

    #[test]
    fn td_mode_parses() {
        assert_eq!("paper".parse::<TdMode>().unwrap(), TdMode::Paper);
        assert_eq!("consistent".parse::<TdMode>().unwrap(), TdMode::Consistent);
        assert!("both".parse::<TdMode>().is_err());
    }
}
