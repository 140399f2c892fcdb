//! Numerical engines: a dense simplex LP solver and Blahut–Arimoto.

mod blahut;
mod simplex;

pub use blahut::{blahut_arimoto, capacity, solve_capacity, BaOptions};
pub use simplex::{solve_lp, LinearProgram, LpSolution, LpStatus, Sense, FEASIBILITY_TOL, PIVOT_TOL};
