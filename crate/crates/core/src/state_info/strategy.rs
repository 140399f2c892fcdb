//! Capacities of a decomposition under the four availability patterns of
//! the intrinsic state.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{Channel, DetChannel};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::optim::{solve_capacity, BaOptions};

/// Which ends know the intrinsic state: first digit encoder, second decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flag {
    #[serde(rename = "00")]
    F00,
    #[serde(rename = "01")]
    F01,
    #[serde(rename = "10")]
    F10,
    #[serde(rename = "11")]
    F11,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::F00 => "00",
            Flag::F01 => "01",
            Flag::F10 => "10",
            Flag::F11 => "11",
        })
    }
}

impl FromStr for Flag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Flag::F00),
            "01" => Ok(Flag::F01),
            "10" => Ok(Flag::F10),
            "11" => Ok(Flag::F11),
            _ => Err(Error::InvalidInput(format!("unknown flag {s:?}, expected 00, 01, 10 or 11"))),
        }
    }
}

/// Size limits for strategy channels.
#[derive(Clone, Copy, Debug)]
pub struct StrategyLimits {
    /// Refuse to build more candidate rows than this before merging.
    pub candidates: u128,
    /// Refuse channels with more distinct rows than this.
    pub rows: usize,
}

impl Default for StrategyLimits {
    fn default() -> Self {
        StrategyLimits { candidates: 1_000_000, rows: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CfOptions {
    pub ba: BaOptions,
    pub strategy: StrategyLimits,
}

/// The channel from encoder strategies `u: supp(λ) → [m]` to `Y`.
///
/// Two strategies give the same row whenever they induce the same output
/// tuple `(D(u(D)))_D`, so rows are generated from output tuples and only
/// one representative strategy is kept per distinct row.
#[derive(Clone, Debug)]
pub struct StrategyChannel {
    pub atoms: Vec<(DetChannel, f64)>,
    /// One representative strategy per row: `strategies[r][k]` is the input
    /// used when the state is `atoms[k]`.
    pub strategies: Vec<Vec<usize>>,
    pub channel: Channel,
}

fn row_key(row: &[f64]) -> Vec<i64> {
    row.iter().map(|x| (x * 1e12).round() as i64).collect()
}

pub fn strategy_channel(lambda: &Decomposition) -> Result<StrategyChannel> {
    strategy_channel_with(lambda, &StrategyLimits::default())
}

pub fn strategy_channel_with(lambda: &Decomposition, limits: &StrategyLimits) -> Result<StrategyChannel> {
    let atoms = lambda.atoms();
    let n = lambda.n();
    let images: Vec<Vec<usize>> = atoms
        .iter()
        .map(|(d, _)| {
            let mut im = d.image().to_vec();
            im.sort_unstable();
            im.dedup();
            im
        })
        .collect();
    let candidates = images
        .iter()
        .try_fold(1u128, |acc, im| acc.checked_mul(im.len() as u128))
        .unwrap_or(u128::MAX);
    if candidates > limits.candidates {
        return Err(Error::TooLarge { size: candidates, limit: limits.candidates });
    }

    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut rows = Vec::new();
    let mut strategies = Vec::new();
    let mut digits = vec![0usize; atoms.len()];
    loop {
        let mut row = vec![0.0; n];
        for (k, (_, w)) in atoms.iter().enumerate() {
            row[images[k][digits[k]]] += w;
        }
        if seen.insert(row_key(&row), ()).is_none() {
            if rows.len() >= limits.rows {
                return Err(Error::TooLarge { size: rows.len() as u128 + 1, limit: limits.rows as u128 });
            }
            let u = atoms
                .iter()
                .enumerate()
                .map(|(k, (d, _))| {
                    let y = images[k][digits[k]];
                    (0..d.m()).find(|&x| d.apply(x) == y).expect("y is in the image")
                })
                .collect();
            strategies.push(u);
            rows.push(row);
        }
        // Odometer over output tuples, last atom fastest.
        let mut k = atoms.len();
        loop {
            if k == 0 {
                let channel = Channel::from_rows_any(&rows)?;
                return Ok(StrategyChannel { atoms, strategies, channel });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < images[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// The channel `x ↦ (y, D)` with law `λ_D·D(x, y)`, restricted to the
/// support of `λ`. Output column `k·n + y` corresponds to `(y, atoms[k])`.
pub fn augmented_channel(lambda: &Decomposition) -> Channel {
    let atoms = lambda.atoms();
    let (m, n) = (lambda.m(), lambda.n());
    let mut rows = vec![vec![0.0; n * atoms.len()]; m];
    for (k, (d, w)) in atoms.iter().enumerate() {
        for (x, row) in rows.iter_mut().enumerate() {
            row[k * n + d.apply(x)] = *w;
        }
    }
    Channel::from_rows_any(&rows).expect("augmented rows are stochastic")
}

/// `Σ_D λ_D log2 rank(D)`.
pub fn c11(lambda: &Decomposition) -> f64 {
    lambda.atoms().iter().map(|(d, w)| w * (d.rank() as f64).log2()).sum()
}

pub fn c_f(lambda: &Decomposition, flag: Flag) -> Result<f64> {
    c_f_with(lambda, flag, &CfOptions::default())
}

pub fn c_f_with(lambda: &Decomposition, flag: Flag, opts: &CfOptions) -> Result<f64> {
    let ba = |w: &Channel| solve_capacity(w, &opts.ba).map(|c| c.capacity);
    match flag {
        Flag::F11 => Ok(c11(lambda)),
        Flag::F01 => ba(&augmented_channel(lambda)),
        Flag::F10 => ba(&strategy_channel_with(lambda, &opts.strategy)?.channel),
        Flag::F00 => ba(&lambda.reconstruct()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_model() -> Decomposition {
        Decomposition::from_atoms(
            2,
            2,
            &[(DetChannel::identity(2), 0.5), (DetChannel::new(2, vec![1, 0]).unwrap(), 0.5)],
        )
        .unwrap()
    }

    fn g_model() -> Decomposition {
        Decomposition::from_atoms(
            2,
            2,
            &[(DetChannel::constant(2, 2, 0), 0.5), (DetChannel::constant(2, 2, 1), 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn f_model_strategy_channel_has_clean_row() {
        let s = strategy_channel(&f_model()).unwrap();
        assert!(s.channel.rows().any(|r| r == [1.0, 0.0]));
        assert!((c_f(&f_model(), Flag::F10).unwrap() - 1.0).abs() < 1e-9);
        assert!((c_f(&f_model(), Flag::F11).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn g_model_is_useless_to_the_encoder() {
        let s = strategy_channel(&g_model()).unwrap();
        assert!(s.channel.rows().all(|r| r == [0.5, 0.5]));
        assert!(c_f(&g_model(), Flag::F10).unwrap().abs() < 1e-9);
        assert_eq!(c_f(&g_model(), Flag::F11).unwrap(), 0.0);
        assert!(c_f(&g_model(), Flag::F00).unwrap().abs() < 1e-9);
    }

    #[test]
    fn point_mass_rows_are_rows_of_the_atom() {
        let d = DetChannel::new(3, vec![0, 2, 2]).unwrap();
        let s = strategy_channel(&Decomposition::point(&d)).unwrap();
        assert_eq!(s.channel.m(), 2);
        for (u, row) in s.strategies.iter().zip(s.channel.rows()) {
            assert_eq!(row, d.to_channel().row(u[0]));
        }
    }

    #[test]
    fn binary_input_c01_equals_c11() {
        let l = Decomposition::from_atoms(
            2,
            3,
            &[
                (DetChannel::new(3, vec![0, 1]).unwrap(), 0.3),
                (DetChannel::new(3, vec![2, 2]).unwrap(), 0.2),
                (DetChannel::new(3, vec![1, 2]).unwrap(), 0.5),
            ],
        )
        .unwrap();
        assert!((c_f(&l, Flag::F01).unwrap() - c11(&l)).abs() < 1e-9);
    }

    #[test]
    fn strategy_limits() {
        let lim = StrategyLimits { candidates: 3, rows: 10 };
        assert!(matches!(strategy_channel_with(&f_model(), &lim), Err(Error::TooLarge { .. })));
        let lim = StrategyLimits { candidates: 100, rows: 2 };
        assert!(matches!(strategy_channel_with(&f_model(), &lim), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn flag_parsing() {
        assert_eq!("10".parse::<Flag>().unwrap(), Flag::F10);
        assert!("12".parse::<Flag>().is_err());
        assert_eq!(Flag::F01.to_string(), "01");
    }
}
