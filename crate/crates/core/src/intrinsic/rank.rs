//! Rank probabilities `P_λ(r)` and their extremes over `Dec(W)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channel::Channel;
use crate::decomposition::{dec_system, Decomposition};
use crate::error::{Error, Result};
use crate::optim::{solve_lp, LinearProgram, LpStatus, Sense};

/// `r ↦ λ{D : rank(D) = r}` over the ranks present in the support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankProfile {
    pub probs: BTreeMap<usize, f64>,
}

impl RankProfile {
    pub fn get(&self, r: usize) -> f64 {
        self.probs.get(&r).copied().unwrap_or(0.0)
    }
}

pub fn rank_profile(lambda: &Decomposition) -> RankProfile {
    let mut probs = BTreeMap::new();
    for (d, w) in lambda.atoms() {
        *probs.entry(d.rank()).or_insert(0.0) += w;
    }
    RankProfile { probs }
}

/// Closed-form rank-one probabilities and the perfect-rank bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankProbReport {
    /// `(g − m + 1)₊`.
    pub lower_rank1: f64,
    /// `Σ_j α_j`.
    pub upper_rank1: f64,
    /// Largest column sum.
    pub g: f64,
    /// Column attaining `g`, smallest index on ties.
    pub ell: usize,
    /// Column minima.
    pub alpha: Vec<f64>,
    /// Present when `m ≤ n`.
    pub beta: Option<f64>,
    /// Present when `m ≥ n`.
    pub h: Option<f64>,
    /// Upper bound on the probability of rank `m ∧ n`.
    pub perfect_upper: f64,
    /// Set when the bound is attained.
    pub exact_perfect: Option<f64>,
}

pub fn rank1_probs(w: &Channel) -> RankProbReport {
    let (m, n) = (w.m(), w.n());
    let sums = w.column_sums();
    let mut ell = 0;
    for j in 1..n {
        if sums[j] > sums[ell] {
            ell = j;
        }
    }
    let g = sums[ell];
    let alpha = w.column_minima();
    let upper_rank1 = alpha.iter().sum::<f64>().min(1.0);
    let lower_rank1 = (g - m as f64 + 1.0).max(0.0).min(upper_rank1);

    let beta = (m <= n).then(|| {
        (0..n)
            .map(|j| {
                let wt = w.column_weight(j);
                if wt > 1 {
                    (sums[j] - 1.0) / (wt as f64 - 1.0)
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    });
    let h = (m >= n).then(|| sums.iter().copied().fold(1.0, f64::min));

    let mut perfect_upper: f64 = 1.0;
    let mut exact = false;
    if let Some(b) = beta {
        perfect_upper = perfect_upper.min(1.0 - b);
        exact |= b <= 1e-12;
    }
    if let Some(h) = h {
        perfect_upper = perfect_upper.min(h);
        exact |= h >= 1.0 - 1e-12;
    }
    RankProbReport {
        lower_rank1,
        upper_rank1,
        g,
        ell,
        alpha,
        beta,
        h,
        perfect_upper: perfect_upper.max(0.0),
        exact_perfect: exact.then_some(1.0),
    }
}

/// Minimum or maximum of `P_λ(r)` over `Dec(W)` by linear programming,
/// with an optimal vertex as witness.
pub fn rank_probability_lp(w: &Channel, r: usize, sense: Sense, limit: u128) -> Result<(f64, Decomposition)> {
    let (atoms, rows, rhs) = dec_system(w, limit)?;
    let objective: Vec<f64> = atoms.iter().map(|d| if d.rank() == r { 1.0 } else { 0.0 }).collect();
    let sol = solve_lp(&LinearProgram::new(objective, sense, rows, rhs)?)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!("rank LP ended {:?}", sol.status)));
    }
    let pairs: Vec<_> = atoms.into_iter().zip(sol.point.iter().map(|x| x.max(0.0))).collect();
    let lambda = normalized(w, &pairs)?;
    Ok((sol.value, lambda))
}

/// Decomposition from LP output, with the mass renormalized to one.
pub(crate) fn normalized(w: &Channel, pairs: &[(crate::channel::DetChannel, f64)]) -> Result<Decomposition> {
    let total: f64 = pairs.iter().map(|(_, x)| x).sum();
    let scaled: Vec<_> = pairs
        .iter()
        .filter(|(_, x)| *x > 0.0)
        .map(|(d, x)| (d.clone(), x / total))
        .collect();
    Decomposition::from_atoms(w.m(), w.n(), &scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DetChannel;

    fn concrete() -> Channel {
        Channel::new(vec![vec![0.3, 0.3, 0.4], vec![0.2, 0.5, 0.3], vec![0.4, 0.1, 0.5]]).unwrap()
    }

    #[test]
    fn profiles() {
        let swap = DetChannel::new(2, vec![1, 0]).unwrap();
        let f = Decomposition::from_atoms(2, 2, &[(DetChannel::identity(2), 0.5), (swap, 0.5)]).unwrap();
        assert_eq!(rank_profile(&f).probs, BTreeMap::from([(2, 1.0)]));
        let d = |im: Vec<usize>| DetChannel::new(3, im).unwrap();
        let lambda = Decomposition::from_atoms(
            3,
            3,
            &[
                (d(vec![0, 0, 0]), 0.2),
                (d(vec![1, 1, 1]), 0.1),
                (d(vec![2, 2, 2]), 0.3),
                (d(vec![0, 1, 0]), 0.1),
                (d(vec![1, 1, 0]), 0.1),
                (d(vec![1, 1, 2]), 0.1),
                (d(vec![2, 1, 2]), 0.1),
            ],
        )
        .unwrap();
        assert!(lambda.reconstruct().max_abs_diff(&concrete()) < 1e-12);
        let p = rank_profile(&lambda);
        assert!((p.get(1) - 0.6).abs() < 1e-12 && (p.get(2) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let r = rank1_probs(&concrete());
        assert!((r.upper_rank1 - 0.6).abs() < 1e-12);
        assert_eq!(r.lower_rank1, 0.0);
        let bsc = rank1_probs(&Channel::bsc(0.2).unwrap());
        assert!((bsc.upper_rank1 - 0.4).abs() < 1e-12 && bsc.lower_rank1 == 0.0);
        let z = rank1_probs(&Channel::z_channel(0.3).unwrap());
        assert!((z.upper_rank1 - 0.3).abs() < 1e-12 && (z.lower_rank1 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn perfect_bound_tall_channel() {
        let w = Channel::new(vec![vec![0.9, 0.1], vec![0.6, 0.4], vec![0.2, 0.8]]).unwrap();
        let r = rank1_probs(&w);
        assert_eq!(r.beta, None);
        assert_eq!(r.h, Some(1.0));
        assert_eq!(r.exact_perfect, Some(1.0));
    }

    #[test]
    fn lp_agrees_with_closed_form() {
        let w = concrete();
        let (lo, _) = rank_probability_lp(&w, 1, Sense::Minimize, 1 << 10).unwrap();
        let (hi, lam) = rank_probability_lp(&w, 1, Sense::Maximize, 1 << 10).unwrap();
        assert!(lo.abs() < 1e-9);
        assert!((hi - 0.6).abs() < 1e-9);
        assert!(lam.reconstruct().max_abs_diff(&w) < 1e-9);
    }
}
