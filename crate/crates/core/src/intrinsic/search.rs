//! Searches over `Dec(W)`: maximization over vertices, and the minimax
//! formulation of `lowerIC_01`.

use serde::Serialize;

use crate::channel::{Channel, DetChannel};
use crate::decomposition::{dec_system, enumerate_vertices_with_limit, Decomposition, DEFAULT_VERTEX_LIMIT};
use crate::error::{Error, Result};
use crate::optim::{solve_lp, LinearProgram, LpStatus, Sense};
use crate::state_info::{c11, c_f_with, CfOptions, Flag};

use super::ic11::DEFAULT_LP_LIMIT;
use super::rank::normalized;
use super::Estimate;

/// `upperIC_f(W)` as the largest `C_f` over the vertices of `Dec(W)`.
///
/// `C_11` bounds every other `C_f` from above, so vertices are visited in
/// decreasing `C_11` and the scan stops once that bound cannot beat the best
/// value found.
pub fn upper_ic_via_vertices(w: &Channel, flag: Flag, opts: &CfOptions) -> Result<(f64, Decomposition)> {
    if flag == Flag::F00 {
        return Err(Error::InvalidInput("flag 00 has no intrinsic state to optimize over".into()));
    }
    let mut vertices: Vec<(f64, Decomposition)> = enumerate_vertices_with_limit(w, DEFAULT_VERTEX_LIMIT)?
        .into_iter()
        .map(|v| (c11(&v), v))
        .collect();
    vertices.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: Option<(f64, Decomposition)> = None;
    for (bound, v) in vertices {
        if best.as_ref().is_some_and(|(b, _)| bound <= *b + 1e-12) {
            break;
        }
        let c = c_f_with(&v, flag, opts)?;
        if best.as_ref().is_none_or(|(b, _)| c > *b) {
            best = Some((c, v));
        }
    }
    Ok(best.expect("enumeration returns at least one vertex"))
}

#[derive(Clone, Copy, Debug)]
pub struct MinimaxOptions {
    pub iterations: usize,
    pub step: f64,
    pub lp_limit: u128,
    pub cf: CfOptions,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        MinimaxOptions { iterations: 300, step: 0.5, lp_limit: DEFAULT_LP_LIMIT, cf: CfOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaxResult {
    /// `[min_λ J(λ, μ*), min over visited λ of C_01(λ)]`; always approximate.
    pub estimate: Estimate,
    pub mu: Vec<f64>,
    /// Inner minimizer at `μ*`.
    pub lambda: Decomposition,
    /// Visited decomposition with the smallest `C_01`.
    pub best_upper: Decomposition,
}

/// `I(μ, D) = H(μD)` for a deterministic `D`, with its gradient in `μ`
/// (up to the constant `−log2 e`, which the simplex projection removes).
fn det_information(mu: &[f64], d: &DetChannel) -> (f64, Vec<f64>) {
    let mut tau = vec![0.0; d.n()];
    for (x, &p) in mu.iter().enumerate() {
        tau[d.apply(x)] += p;
    }
    let h: f64 = tau.iter().filter(|&&t| t > 0.0).map(|&t| -t * t.log2()).sum();
    let grad = (0..mu.len()).map(|x| -tau[d.apply(x)].max(1e-12).log2()).collect();
    (h, grad)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// `max_μ min_{λ ∈ Dec(W)} Σ_D λ_D I(μ, D)`.
///
/// The inner minimum is an LP in `λ`. The outer concave maximization runs
/// projected supergradient ascent from the uniform input and from inputs
/// tilted toward each symbol. The lower end of the estimate is certified
/// by the inner LP; the upper end by `C_01` of the visited minimizers.
pub fn lower_ic01_minimax(w: &Channel, opts: &MinimaxOptions) -> Result<MinimaxResult> {
    let m = w.m();
    let (atoms, rows, rhs) = dec_system(w, opts.lp_limit)?;

    let inner = |mu: &[f64]| -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let info: Vec<(f64, Vec<f64>)> = atoms.iter().map(|d| det_information(mu, d)).collect();
        let objective: Vec<f64> = info.iter().map(|(h, _)| *h).collect();
        let sol = solve_lp(&LinearProgram::new(objective, Sense::Minimize, rows.clone(), rhs.clone())?)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!("minimax inner LP ended {:?}", sol.status)));
        }
        let mut grad = vec![0.0; m];
        for ((_, g), &l) in info.iter().zip(&sol.point) {
            if l > 0.0 {
                for (a, b) in grad.iter_mut().zip(g) {
                    *a += l * b;
                }
            }
        }
        Ok((sol.value, sol.point, grad))
    };

    let mut starts = vec![vec![1.0 / m as f64; m]];
    for x in 0..m {
        let mut s = vec![0.5 / m as f64; m];
        s[x] += 0.5;
        starts.push(s);
    }

    let mut best_lo = f64::NEG_INFINITY;
    let mut best_mu = starts[0].clone();
    let mut best_lambda = Vec::new();
    let mut visited: Vec<Vec<f64>> = Vec::new();
    let per_start = (opts.iterations / starts.len()).max(1);
    for start in starts {
        let mut mu = start;
        for t in 0..per_start {
            let (val, point, grad) = inner(&mu)?;
            if val > best_lo {
                best_lo = val;
                best_mu = mu.clone();
                best_lambda = point.clone();
            }
            if !visited.iter().any(|v| v.iter().zip(&point).all(|(a, b)| (a - b).abs() < 1e-9)) {
                visited.push(point);
            }
            let mean = grad.iter().sum::<f64>() / m as f64;
            let centered: Vec<f64> = grad.iter().map(|g| g - mean).collect();
            let norm = centered.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm < 1e-12 {
                break;
            }
            let step = opts.step / ((t + 1) as f64).sqrt();
            let moved: Vec<f64> = mu.iter().zip(&centered).map(|(x, g)| x + step * g / norm).collect();
            mu = project_simplex(&moved);
        }
    }

    let to_decomp = |point: &[f64]| -> Result<Decomposition> {
        let pairs: Vec<_> = atoms.iter().cloned().zip(point.iter().map(|x| x.max(0.0))).collect();
        normalized(w, &pairs)
    };
    let mut best_hi = f64::INFINITY;
    let mut best_upper = None;
    for point in &visited {
        let lam = to_decomp(point)?;
        let c = c_f_with(&lam, Flag::F01, &opts.cf)?;
        if c < best_hi {
            best_hi = c;
            best_upper = Some(lam);
        }
    }
    Ok(MinimaxResult {
        estimate: Estimate::approximate(best_lo.max(0.0), best_hi.max(best_lo)),
        mu: best_mu,
        lambda: to_decomp(&best_lambda)?,
        best_upper: best_upper.expect("at least one visited point"),
    })
}
