//! Exact intrinsic capacities for binary-output and binary-input channels.

use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::info::binary_entropy;
use crate::optim::{solve_capacity, BaOptions};
use crate::state_info::Flag;

use super::rank::rank1_probs;
use super::{Estimate, ICReport};

/// Capacity of `[[1, 0], [r, 1 − r]]`: `log2(1 + (1 − r) r^{r/(1−r)})`.
pub fn z_capacity(r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    (1.0 + (1.0 - r) * r.powf(r / (1.0 - r))).log2()
}

/// Capacity of `[[1 − ε1, ε1], [ε2, 1 − ε2]]` in closed form.
pub fn binary_capacity(e1: f64, e2: f64) -> f64 {
    let det = 1.0 - e1 - e2;
    if det.abs() <= 1e-9 {
        return 0.0;
    }
    let (h1, h2) = (binary_entropy(e1), binary_entropy(e2));
    let a = (e2 * h1 - (1.0 - e1) * h2) / det;
    let b = (e1 * h2 - (1.0 - e2) * h1) / det;
    (a.exp2() + b.exp2()).log2().max(0.0)
}

/// `lowerIC_10 = C(W)` and `upperIC_10` is the capacity of the Z-type channel
/// with crossover `lowerRP_W(1)`.
pub fn ic10_binary_output(w: &Channel) -> Result<ICReport> {
    if w.n() != 2 {
        return Err(Error::WrongShape(format!("binary output required, got n={}", w.n())));
    }
    let ba = BaOptions::default();
    let lower = solve_capacity(w, &ba)?.capacity;
    let r = rank1_probs(w).lower_rank1;
    let upper = z_capacity(r);
    let z = Channel::new(vec![vec![1.0, 0.0], vec![r, 1.0 - r]])?;
    let check = solve_capacity(&z, &ba)?.capacity;
    if (check - upper).abs() > 1e-6 {
        return Err(Error::NumericalFailure(format!("Z-channel closed form {upper} vs iteration {check}")));
    }
    Ok(ICReport::new(Flag::F10, Estimate::exact(lower), Estimate::exact(upper)))
}

/// `lowerIC_01 = 1 − upperRP_W(1)` and `upperIC_01 = 1 − lowerRP_W(1)`.
pub fn ic01_binary_input(w: &Channel) -> Result<ICReport> {
    if w.m() != 2 {
        return Err(Error::WrongShape(format!("binary input required, got m={}", w.m())));
    }
    let rp = rank1_probs(w);
    Ok(ICReport::new(
        Flag::F01,
        Estimate::exact(1.0 - rp.upper_rank1),
        Estimate::exact(1.0 - rp.lower_rank1),
    ))
}

/// All six intrinsic capacities of a binary-input binary-output channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinaryBinaryReport {
    pub lower11: f64,
    pub lower10: f64,
    pub lower01: f64,
    pub upper11: f64,
    pub upper10: f64,
    pub upper01: f64,
}

pub fn binary_binary_report(e1: f64, e2: f64) -> Result<BinaryBinaryReport> {
    if !(0.0..=1.0).contains(&e1) || !(0.0..=1.0).contains(&e2) {
        return Err(Error::DomainError(format!("crossovers must lie in [0, 1], got {e1}, {e2}")));
    }
    let lower = (1.0 - e1 - e2).abs();
    let d = (e1 - e2).abs();
    Ok(BinaryBinaryReport {
        lower11: lower,
        lower10: binary_capacity(e1, e2),
        lower01: lower,
        upper11: 1.0 - d,
        upper10: z_capacity(d),
        upper01: 1.0 - d,
    })
}
