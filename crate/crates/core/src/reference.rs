//! Published reference grid for λ = 14 with the reference cost coefficients,
//! N ∈ {80, 100, 120} and T ∈ {6, 7, 8}.
//!
//! The optimal-cost column does not follow from the other three (direct
//! evaluation is consistently higher, e.g. 38.1055 vs 37.4780 at N=100,
//! T=7), so it is carried for informational comparison only.

/// One published cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCell {
    pub n: u32,
    pub t: f64,
    pub p_success: f64,
    pub dispatch_time: f64,
    pub q_star_integer: u64,
    /// Informational only; see module docs.
    pub optimal_cost: f64,
}

pub const ARRIVAL_RATE: f64 = 14.0;
pub const N_VALUES: [u32; 3] = [80, 100, 120];
pub const T_VALUES: [f64; 3] = [6.0, 7.0, 8.0];

const fn cell(n: u32, t: f64, p: f64, td: f64, q: u64, c: f64) -> ReferenceCell {
    ReferenceCell {
        n,
        t,
        p_success: p,
        dispatch_time: td,
        q_star_integer: q,
        optimal_cost: c,
    }
}

pub const TABLE: [ReferenceCell; 9] = [
    cell(80, 6.0, 0.6834, 8.3539, 536, 53.9714),
    cell(80, 7.0, 0.9723, 5.9060, 637, 72.8599),
    cell(80, 8.0, 0.9994, 5.7192, 648, 74.9544),
    cell(100, 6.0, 0.0484, 123.94, 156, 9.1673),
    cell(100, 7.0, 0.4333, 15.938, 434, 37.4780),
    cell(100, 8.0, 0.8826, 8.1614, 606, 65.9756),
    cell(120, 6.0, 0.0001, 46989.0, 9, 3.0524),
    cell(120, 7.0, 0.0172, 406.81, 94, 5.7391),
    cell(120, 8.0, 0.2368, 33.681, 327, 23.8377),
];

/// Base-case values quoted alongside the grid (N=100, T=7).
pub mod base_case {
    pub const P_SUCCESS: f64 = 0.4333;
    pub const TRUNCATED_MEAN: f64 = 6.7829;
    pub const DISPATCH_TIME: f64 = 15.9376;
    pub const Q_STAR: f64 = 433.8597;
    pub const Q_STAR_INTEGER: u64 = 434;
    pub const OPTIMAL_COST: f64 = 37.47802;
}

pub fn lookup(n: u32, t: f64) -> Option<&'static ReferenceCell> {
    TABLE.iter().find(|c| c.n == n && c.t == t)
}
