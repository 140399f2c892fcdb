//! Blahut–Arimoto iteration for `C(W) = max_μ I(μ, W)`.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::info::CapacityCertificate;

#[derive(Clone, Copy, Debug)]
pub struct BaOptions {
    /// Target optimality gap in bits.
    pub tol: f64,
    pub max_iter: usize,
    /// Certified gap still accepted by [`solve_capacity`] once `max_iter` is
    /// reached. Inputs that are only barely suboptimal make the iteration
    /// converge sublinearly, so the last digits can take very long.
    pub accept_gap: f64,
}

impl Default for BaOptions {
    fn default() -> Self {
        BaOptions { tol: 1e-10, max_iter: 100_000, accept_gap: 1e-8 }
    }
}

/// Runs Blahut–Arimoto from the uniform input until the certified gap
/// `max_x D(W_x‖τ) − I(μ, W)` is at most `tol`.
///
/// Every 500 iterations the equalities `D(W_x‖τ) = C` are also
/// solved by Newton's method on the heaviest inputs of the current iterate.
/// A polished input is returned when its own certificate meets `tol`; the
/// iteration itself is unaffected.
///
/// On failure to converge the certificate with the smallest gap seen is
/// returned inside [`Error::MaxIterExceeded`].
pub fn blahut_arimoto(w: &Channel, tol: f64, max_iter: usize) -> Result<CapacityCertificate> {
    let m = w.m();
    // Precompute W log2 W per entry; zeros contribute nothing.
    let wlogw: Vec<f64> = w
        .as_slice()
        .iter()
        .map(|&p| if p > 0.0 { p * p.log2() } else { 0.0 })
        .collect();
    let mut cur = evaluate(w, &wlogw, vec![1.0 / m as f64; m]);
    let mut best = cur.clone();
    for it in 1..=max_iter {
        if cur.gap <= tol {
            return Ok(cur);
        }
        cur = evaluate(w, &wlogw, update(&cur));
        if cur.gap < best.gap {
            best = cur.clone();
        }
        if it % POLISH_EVERY == 0 {
            if let Some(p) = polish(w, &wlogw, &cur) {
                if p.gap <= tol {
                    return Ok(p);
                }
                if p.gap < best.gap {
                    best = p;
                }
            }
        }
    }
    if cur.gap <= tol {
        return Ok(cur);
    }
    Err(Error::MaxIterExceeded {
        iterations: max_iter,
        best: Box::new(best),
    })
}

const POLISH_EVERY: usize = 500;

/// Best certificate over the supports formed by the `k` heaviest distinct
/// rows of `c`, ranked by mass and then by divergence, for `k` up to `n`.
fn polish(w: &Channel, wlogw: &[f64], c: &CapacityCertificate) -> Option<CapacityCertificate> {
    let mut best: Option<CapacityCertificate> = None;
    for key in [&c.input_dist, &c.divergences] {
        let mut order: Vec<usize> = (0..w.m()).collect();
        order.sort_by(|&a, &b| key[b].total_cmp(&key[a]));
        // Repeated rows would make the Newton system singular.
        let mut seen: Vec<usize> = Vec::new();
        order.retain(|&x| {
            let fresh = seen.iter().all(|&y| w.row(y) != w.row(x));
            if fresh {
                seen.push(x);
            }
            fresh
        });
        for k in 1..=order.len().min(w.n()) {
            let Some(mu) = newton_on_support(w, &order[..k], &c.input_dist) else { continue };
            let cand = evaluate(w, wlogw, mu);
            if !(cand.capacity + cand.gap).is_finite() {
                continue;
            }
            if best.as_ref().is_none_or(|b| cand.gap < b.gap) {
                best = Some(cand);
            }
        }
    }
    best
}

/// Solves `D(W_x‖μW) = C` for `x` in `support`, `Σ μ = 1`, starting from
/// `start` restricted to the support. Fails if an input leaves the simplex.
fn newton_on_support(w: &Channel, support: &[usize], start: &[f64]) -> Option<Vec<f64>> {
    let k = support.len();
    let n = w.n();
    let z: f64 = support.iter().map(|&x| start[x]).sum();
    if z <= 0.0 {
        return None;
    }
    let mut mu: Vec<f64> = support.iter().map(|&x| start[x] / z).collect();
    let mut cap = None;
    let ln2 = std::f64::consts::LN_2;
    for _ in 0..50 {
        let mut tau = vec![0.0; n];
        for (&x, &mx) in support.iter().zip(&mu) {
            for (t, &p) in tau.iter_mut().zip(w.row(x)) {
                *t += mx * p;
            }
        }
        let d: Vec<f64> = support
            .iter()
            .map(|&x| {
                w.row(x)
                    .iter()
                    .zip(&tau)
                    .filter(|(&p, _)| p > 0.0)
                    .map(|(&p, &t)| p * (p / t).log2())
                    .sum()
            })
            .collect();
        let c = *cap.get_or_insert_with(|| mu.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>());
        let mut jac = vec![vec![0.0; k + 1]; k + 1];
        let mut rhs = vec![0.0; k + 1];
        for (i, &x) in support.iter().enumerate() {
            for (j, &xp) in support.iter().enumerate() {
                jac[i][j] = -w
                    .row(x)
                    .iter()
                    .zip(w.row(xp))
                    .zip(&tau)
                    .filter(|((&p, &q), _)| p > 0.0 && q > 0.0)
                    .map(|((&p, &q), &t)| p * q / t)
                    .sum::<f64>()
                    / ln2;
            }
            jac[i][k] = -1.0;
            rhs[i] = c - d[i];
        }
        jac[k][..k].iter_mut().for_each(|v| *v = 1.0);
        rhs[k] = 1.0 - mu.iter().sum::<f64>();
        let resid = rhs.iter().fold(0.0f64, |s, r| s.max(r.abs()));
        if resid < 1e-15 {
            break;
        }
        let step = crate::linalg::solve(jac, &rhs, 1e-300)?;
        if step.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut t = 1.0;
        while mu.iter().zip(&step).any(|(m, s)| m + t * s <= 0.0) {
            t /= 2.0;
            if t < 1e-6 {
                return None;
            }
        }
        mu.iter_mut().zip(&step).for_each(|(m, s)| *m += t * s);
        cap = Some(c + t * step[k]);
    }
    let total: f64 = mu.iter().sum();
    let mut full = vec![0.0; w.m()];
    for (&x, &mx) in support.iter().zip(&mu) {
        full[x] = mx / total;
    }
    Some(full)
}

fn update(c: &CapacityCertificate) -> Vec<f64> {
    let upper = c.capacity + c.gap;
    // Shifted by the max exponent for stability.
    let mut mu: Vec<f64> = c
        .input_dist
        .iter()
        .zip(&c.divergences)
        .map(|(&mx, &dx)| mx * (dx - upper).exp2())
        .collect();
    let z: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|mx| *mx /= z);
    mu
}

fn evaluate(w: &Channel, wlogw: &[f64], mu: Vec<f64>) -> CapacityCertificate {
    let n = w.n();
    let mut tau = vec![0.0; n];
    for (x, &mx) in mu.iter().enumerate() {
        if mx > 0.0 {
            for (t, &p) in tau.iter_mut().zip(w.row(x)) {
                *t += mx * p;
            }
        }
    }
    // A zero output under a positive entry makes that divergence infinite.
    let log_tau: Vec<f64> = tau.iter().map(|&t| t.log2()).collect();
    let d: Vec<f64> = (0..w.m())
        .map(|x| {
            let row = w.row(x);
            let mut dx = 0.0;
            for y in 0..n {
                if row[y] > 0.0 {
                    dx += wlogw[x * n + y] - row[y] * log_tau[y];
                }
            }
            dx.max(0.0)
        })
        .collect();
    let lower: f64 = mu.iter().zip(&d).map(|(a, b)| a * b).sum();
    let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CapacityCertificate {
        capacity: lower,
        input_dist: mu,
        output_dist: tau,
        divergences: d,
        gap: (upper - lower).max(0.0),
    }
}

/// Blahut–Arimoto under `opts`, falling back to the best certificate when
/// the iteration limit is hit with a gap of at most `opts.accept_gap`.
pub fn solve_capacity(w: &Channel, opts: &BaOptions) -> Result<CapacityCertificate> {
    match blahut_arimoto(w, opts.tol, opts.max_iter) {
        Err(Error::MaxIterExceeded { best, .. }) if best.gap <= opts.accept_gap.max(opts.tol) => Ok(*best),
        other => other,
    }
}

/// Capacity with default options.
pub fn capacity(w: &Channel) -> Result<f64> {
    solve_capacity(w, &BaOptions::default()).map(|c| c.capacity)
}
