//! `lowerIC_11` and `upperIC_11`: exact values by linear programming over
//! `Dec(W)` and the closed-form brackets.

use crate::channel::Channel;
use crate::decomposition::{dec_system, Decomposition};
use crate::error::{Error, Result};
use crate::optim::{capacity, solve_lp, LinearProgram, LpStatus, Sense};
use crate::state_info::Flag;

use super::rank::{normalized, rank1_probs};
use super::{ceil_tol, floor_tol, Estimate, ICReport, LowerIngredients, UpperIngredients};

/// Default cap on `n^m` for the LPs over `Dec(W)`.
pub const DEFAULT_LP_LIMIT: u128 = 4096;

pub fn ic11_exact(w: &Channel, sense: Sense) -> Result<(f64, Decomposition)> {
    ic11_exact_with_limit(w, sense, DEFAULT_LP_LIMIT)
}

/// Optimizes `Σ λ_D log2 rank(D)` over `Dec(W)`; the witness is an optimal
/// basic solution.
pub fn ic11_exact_with_limit(w: &Channel, sense: Sense, limit: u128) -> Result<(f64, Decomposition)> {
    let (atoms, rows, rhs) = dec_system(w, limit)?;
    let objective: Vec<f64> = atoms.iter().map(|d| (d.rank() as f64).log2()).collect();
    let sol = solve_lp(&LinearProgram::new(objective, sense, rows, rhs)?)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!("IC11 LP ended {:?}", sol.status)));
    }
    let pairs: Vec<_> = atoms.into_iter().zip(sol.point.iter().map(|x| x.max(0.0))).collect();
    let lambda = normalized(w, &pairs)?;
    Ok((sol.value, lambda))
}

/// Brackets for `lowerIC_11` and `upperIC_11`, collapsed to exact values
/// wherever a closed form applies.
pub fn ic11_bounds(w: &Channel) -> Result<ICReport> {
    let (m, n) = (w.m(), w.n());
    let rp = rank1_probs(w);
    let binary = m == 2 || n == 2;

    // Lower side.
    let u = rp.upper_rank1;
    let (lower, lower_ing) = if u >= 1.0 - 1e-12 {
        (Estimate::exact(0.0), LowerIngredients { w_prime: None, a: vec![0; n], gamma: 1 })
    } else {
        let w_prime: Vec<Vec<f64>> = (0..m)
            .map(|x| (0..n).map(|y| ((w.get(x, y) - rp.alpha[y]) / (1.0 - u)).max(0.0)).collect())
            .collect();
        let a: Vec<i64> = (0..n)
            .map(|y| floor_tol(w_prime.iter().map(|r| r[y]).sum::<f64>()))
            .collect();
        let weight_a = a.iter().filter(|&&v| v != 0).count() as i64;
        let gamma = (m as i64 + weight_a - a.iter().sum::<i64>()).min(n as i64).max(1) as usize;
        let est = if binary {
            Estimate::exact(1.0 - u)
        } else {
            let c = capacity(w)?;
            Estimate::bracket((1.0 - u).max(c), (1.0 - u) * (gamma as f64).log2())
        };
        (est, LowerIngredients { w_prime: Some(w_prime), a, gamma })
    };

    // Upper side.
    let sums = w.column_sums();
    let o = m.min(n);
    let a: Vec<i64> = sums.iter().map(|&s| floor_tol(s)).collect();
    let b: Vec<i64> = sums.iter().map(|&s| ceil_tol(s)).collect();
    let weight_a = a.iter().filter(|&&v| v != 0).count();
    let b_on_support: i64 = a.iter().zip(&b).filter(|(&ai, _)| ai != 0).map(|(_, &bi)| bi).sum();
    let gamma = weight_a + (m as i64 - b_on_support).max(0) as usize;
    let upper = if rp.lower_rank1 > 0.0 || binary {
        Estimate::exact(1.0 - rp.lower_rank1)
    } else if m <= n && sums.iter().all(|&s| s <= 1.0 + 1e-9) {
        Estimate::exact((m as f64).log2())
    } else if m >= n && sums.iter().all(|&s| s >= 1.0 - 1e-9) {
        Estimate::exact((n as f64).log2())
    } else {
        let of = o as f64;
        let hi = (of - 1.0).log2() + rp.perfect_upper * (of / (of - 1.0)).log2();
        Estimate::bracket((gamma.max(1) as f64).log2(), hi)
    };

    let mut report = ICReport::new(Flag::F11, lower, upper);
    report.ingredients.lower = Some(lower_ing);
    report.ingredients.upper = Some(UpperIngredients { a, b, gamma, o, perfect_upper: rp.perfect_upper });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::membership;

    fn concrete() -> Channel {
        Channel::new(vec![vec![0.3, 0.3, 0.4], vec![0.2, 0.5, 0.3], vec![0.4, 0.1, 0.5]]).unwrap()
    }

    #[test]
    fn concrete_lp_values() {
        let w = concrete();
        let (lo, lw) = ic11_exact(&w, Sense::Minimize).unwrap();
        let (hi, hw) = ic11_exact(&w, Sense::Maximize).unwrap();
        assert!((lo - 0.4).abs() < 1e-9, "{lo}");
        assert!((hi - (0.2 + 0.8 * 3f64.log2())).abs() < 1e-9, "{hi}");
        assert!(membership(&lw, &w, 1e-9) && membership(&hw, &w, 1e-9));
    }

    #[test]
    fn concrete_brackets() {
        let r = ic11_bounds(&concrete()).unwrap();
        let l3 = 3f64.log2();
        assert!((r.lower.lo - 0.4).abs() < 1e-9 && (r.lower.hi - 0.4 * l3).abs() < 1e-9);
        assert!((r.upper.lo - 1.0).abs() < 1e-9 && (r.upper.hi - (0.1 + 0.9 * l3)).abs() < 1e-9);
        let wp = r.ingredients.lower.unwrap().w_prime.unwrap();
        let expected = [[0.25, 0.5, 0.25], [0.0, 1.0, 0.0], [0.5, 0.0, 0.5]];
        for (row, e) in wp.iter().zip(&expected) {
            for (a, b) in row.iter().zip(e) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bsc_is_exact() {
        let r = ic11_bounds(&Channel::bsc(0.2).unwrap()).unwrap();
        assert!(r.lower.is_exact() && (r.lower.lo - 0.6).abs() < 1e-12);
        assert!(r.upper.is_exact() && r.upper.lo == 1.0);
    }

    #[test]
    fn uniform_channel_extremes() {
        let w = Channel::uniform(3, 4);
        let (lo, _) = ic11_exact(&w, Sense::Minimize).unwrap();
        let (hi, _) = ic11_exact(&w, Sense::Maximize).unwrap();
        assert!(lo.abs() < 1e-9 && (hi - 3f64.log2()).abs() < 1e-9);
        let r = ic11_bounds(&w).unwrap();
        assert_eq!(r.lower.lo, 0.0);
        assert!(r.upper.is_exact() && (r.upper.lo - 3f64.log2()).abs() < 1e-12);
    }
}
