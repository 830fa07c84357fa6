//! Replenishment analytics for an inventory whose demand arrives in lots of N
//! units from group-buying auctions.
//!
//! - [`stochastics`]: success probability, auction durations and dispatch
//!   timing under Poisson bidder arrivals.
//! - [`costmodel`]: renewal-reward cycle costs, the long-run average cost
//!   C(Q) and its closed-form minimizer.
//! - [`simulator`]: discrete-event Monte Carlo of the same system, used to
//!   validate the closed forms.
//! - [`sweep`]: grid evaluation and CSV/JSON/markdown reports.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod costmodel;
pub mod error;
pub mod reference;
pub mod simulator;
pub mod special;
pub mod stochastics;
pub mod sweep;

pub use costmodel::{AMode, CostBreakdown, CostParams, Optimum, Policy};
pub use error::{Error, Result};
pub use simulator::{DrawMethod, ShortfallRule, SimulationConfig, SimulationResult};
pub use stochastics::{AuctionParams, AuctionStatistics, TdMode};
pub use sweep::{ReportFormat, SweepRow, SweepSpec};
