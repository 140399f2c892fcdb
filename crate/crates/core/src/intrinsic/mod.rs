//! Lower and upper intrinsic capacities: rank probabilities, exact LP
//! values, closed-form bounds, binary special cases and support checks.

mod binary;
mod ic11;
mod rank;
mod search;
mod support;

pub use binary::{binary_binary_report, binary_capacity, ic01_binary_input, ic10_binary_output, z_capacity, BinaryBinaryReport};
pub use ic11::{ic11_bounds, ic11_exact, ic11_exact_with_limit, DEFAULT_LP_LIMIT};
pub use rank::{rank1_probs, rank_probability_lp, rank_profile, RankProbReport, RankProfile};
pub use search::{lower_ic01_minimax, upper_ic_via_vertices, MinimaxOptions, MinimaxResult};
pub use support::{validate_optimal_support, Violation};

use serde::Serialize;

use crate::decomposition::Decomposition;
use crate::state_info::Flag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Bracket,
    Approximate,
}

/// A value known exactly or only up to an interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub status: Status,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    pub fn exact(v: f64) -> Self {
        Estimate { status: Status::Exact, lo: v, hi: v }
    }

    pub fn bracket(lo: f64, hi: f64) -> Self {
        Estimate { status: Status::Bracket, lo, hi }
    }

    pub fn approximate(lo: f64, hi: f64) -> Self {
        Estimate { status: Status::Approximate, lo, hi }
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// Ingredients of the lower bound theorem: `W′`, `a = ⌊1W′⌋` and `γ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LowerIngredients {
    pub w_prime: Option<Vec<Vec<f64>>>,
    pub a: Vec<i64>,
    pub gamma: usize,
}

/// Ingredients of the upper bound theorem: `a = ⌊1W⌋`, `b = ⌈1W⌉`, `γ`, `o`
/// and the bound on the perfect-rank probability.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct UpperIngredients {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub gamma: usize,
    pub o: usize,
    pub perfect_upper: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundIngredients {
    pub lower: Option<LowerIngredients>,
    pub upper: Option<UpperIngredients>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ICReport {
    pub flag: Flag,
    pub lower: Estimate,
    pub upper: Estimate,
    pub lower_witness: Option<Decomposition>,
    pub upper_witness: Option<Decomposition>,
    pub ingredients: BoundIngredients,
}

impl ICReport {
    fn new(flag: Flag, lower: Estimate, upper: Estimate) -> Self {
        ICReport {
            flag,
            lower,
            upper,
            lower_witness: None,
            upper_witness: None,
            ingredients: BoundIngredients::default(),
        }
    }
}

/// `⌊x⌋` and `⌈x⌉` that treat values within `1e-9` of an integer as that integer.
pub(crate) fn floor_tol(x: f64) -> i64 {
    (x + 1e-9).floor() as i64
}

pub(crate) fn ceil_tol(x: f64) -> i64 {
    (x - 1e-9).ceil() as i64
}
