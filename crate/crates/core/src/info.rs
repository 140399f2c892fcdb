//! Information measures in bits, statistical distances, and the Gallager
//! optimality condition for capacity-achieving inputs.

use serde::Serialize;

use crate::channel::{Channel, InputDist};

/// `x log2 x` with the convention `0 log 0 = 0`.
#[inline]
fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Relative entropy `D(p‖q)` in bits. Returns `+∞` when `p` is not absolutely
/// continuous with respect to `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "kl_divergence: length mismatch");
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            d += pi * (pi / qi).log2();
        }
    }
    // Rounding can push D slightly below zero for p ≈ q.
    d.max(0.0)
}

/// Relative entropy in nats.
pub fn kl_divergence_nats(p: &[f64], q: &[f64]) -> f64 {
    kl_divergence(p, q) * std::f64::consts::LN_2
}

/// Shannon entropy in bits.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

pub fn binary_entropy(eps: f64) -> f64 {
    -xlog2x(eps) - xlog2x(1.0 - eps)
}

/// `D(W_x‖μW)` for every input `x`.
pub fn divergences(mu: &[f64], w: &Channel) -> (Vec<f64>, Vec<f64>) {
    let tau = InputDist::from_raw(mu.to_vec()).push_through(w);
    let d = w.rows().map(|row| kl_divergence(row, &tau)).collect();
    (d, tau)
}

/// `I(μ, W) = Σ_x μ_x D(W_x‖μW)` in bits.
pub fn mutual_information(mu: &InputDist, w: &Channel) -> f64 {
    assert_eq!(mu.len(), w.m(), "mutual_information: length mismatch");
    let (d, _) = divergences(mu.as_slice(), w);
    mu.as_slice()
        .iter()
        .zip(&d)
        .filter(|(&m, _)| m > 0.0)
        .map(|(&m, &dx)| m * dx)
        .sum()
}

/// Half the `ℓ1` distance.
pub fn statistical_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "statistical_distance: length mismatch");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Maximum over inputs of the row-wise statistical distance.
pub fn channel_distance(w: &Channel, v: &Channel) -> f64 {
    assert_eq!((w.m(), w.n()), (v.m(), v.n()), "channel_distance: shape mismatch");
    w.rows()
        .zip(v.rows())
        .map(|(a, b)| statistical_distance(a, b))
        .fold(0.0, f64::max)
}

/// Optimality certificate for an input distribution.
///
/// `capacity` is `I(μ, W)`, a lower bound on the capacity; `capacity + gap`
/// (the largest divergence) is an upper bound.
#[derive(Clone, Debug, Serialize)]
pub struct CapacityCertificate {
    pub capacity: f64,
    pub input_dist: Vec<f64>,
    pub output_dist: Vec<f64>,
    pub divergences: Vec<f64>,
    pub gap: f64,
}

impl CapacityCertificate {
    pub fn evaluate(w: &Channel, mu: &[f64]) -> Self {
        let (divergences, output_dist) = divergences(mu, w);
        let capacity: f64 = mu
            .iter()
            .zip(&divergences)
            .filter(|(&m, _)| m > 0.0)
            .map(|(&m, &d)| m * d)
            .sum();
        let max_d = divergences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        CapacityCertificate {
            capacity,
            input_dist: mu.to_vec(),
            output_dist,
            divergences,
            gap: (max_d - capacity).max(0.0),
        }
    }

    pub fn upper_bound(&self) -> f64 {
        self.capacity + self.gap
    }
}

/// Checks the Gallager condition: `D(W_x‖μW) = C` on the support of `μ` and
/// `≤ C` elsewhere, all within `tol`.
pub fn verify_capacity_achieving(w: &Channel, mu: &InputDist, tol: f64) -> (CapacityCertificate, bool) {
    let cert = CapacityCertificate::evaluate(w, mu.as_slice());
    let c = cert.capacity;
    let ok = mu
        .as_slice()
        .iter()
        .zip(&cert.divergences)
        .all(|(&m, &d)| if m > 0.0 { (d - c).abs() <= tol } else { d <= c + tol });
    (cert, ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_basics() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&p, &p), 0.0);
        assert!((kl_divergence(&[1.0, 0.0], &[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn divergence_of_counterexample_rows_in_nats() {
        let tau = [0.01984385, 0.06984385, 0.9103123];
        let d = kl_divergence_nats(&[0.05, 0.1, 0.85], &tau);
        assert!((d - 0.0238286).abs() < 1e-6, "{d}");
    }

    #[test]
    fn mutual_information_examples() {
        let id = Channel::identity(2);
        assert!((mutual_information(&InputDist::uniform(2), &id) - 1.0).abs() < 1e-15);
        let u = Channel::uniform(2, 2);
        assert_eq!(mutual_information(&InputDist::new(vec![0.3, 0.7]).unwrap(), &u), 0.0);

        let w = Channel::new(vec![vec![0.8, 0.2, 0.0], vec![0.6, 0.35, 0.05]]).unwrap();
        let mu = InputDist::new(vec![0.56696216, 0.43303784]).unwrap();
        let i = mutual_information(&mu, &w) * std::f64::consts::LN_2;
        assert!((i - 0.03541501).abs() < 1e-7, "{i}");
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        // -0.25 log2 0.25 - 0.75 log2 0.75 = 0.5 + 0.75 (2 - log2 3)
        let expected = 0.5 + 0.75 * (2.0 - 3f64.log2());
        assert!((binary_entropy(0.25) - expected).abs() < 1e-15);
        assert!((binary_entropy(0.25) - 0.811_278_124_459_132_9).abs() < 1e-15);
    }

    #[test]
    fn distances() {
        assert_eq!(statistical_distance(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        assert_eq!(statistical_distance(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(channel_distance(&Channel::identity(2), &Channel::uniform(2, 2)), 0.5);
    }

    #[test]
    fn gallager_condition() {
        let bsc = Channel::bsc(0.25).unwrap();
        assert!(verify_capacity_achieving(&bsc, &InputDist::uniform(2), 1e-12).1);

        let w = Channel::new(vec![vec![0.8, 0.2, 0.0], vec![0.6, 0.35, 0.05]]).unwrap();
        let mu = InputDist::new(vec![0.56696216, 0.43303784]).unwrap();
        let (cert, ok) = verify_capacity_achieving(&w, &mu, 1e-7);
        assert!(ok);
        for d in &cert.divergences {
            assert!((d * std::f64::consts::LN_2 - 0.03541501).abs() < 1e-7);
        }

        let (cert, ok) = verify_capacity_achieving(&bsc, &InputDist::point(2, 0), 1e-9);
        assert!(!ok);
        assert!(cert.divergences[1] > cert.capacity);
    }
}
