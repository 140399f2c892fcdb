//! State-dependent channels with causal state observations at the encoder
//! (`S_E`) and decoder (`S_D`).

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{Channel, STOCHASTIC_TOL};
use crate::error::{Error, Result};
use crate::optim::{solve_capacity, BaOptions};

/// A family of kernels `K^(s)` driven by a state `S ~ p_S`, observed through
/// `p(s_E, s_D | s)`. Column `e·|S_D| + d` of `obs_kernel` holds `(s_E=e, s_D=d)`.
#[derive(Clone, Debug)]
pub struct StateChannelModel {
    pub kernels: Vec<Channel>,
    pub p_s: Vec<f64>,
    pub obs_kernel: Vec<Vec<f64>>,
    pub encoder_alphabet: usize,
    pub decoder_alphabet: usize,
}

fn check_prob(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::InvalidInput(format!("{what} is not a probability vector")));
    }
    Ok(())
}

impl StateChannelModel {
    pub fn new(
        kernels: Vec<Channel>,
        p_s: Vec<f64>,
        obs_kernel: Vec<Vec<f64>>,
        encoder_alphabet: usize,
        decoder_alphabet: usize,
    ) -> Result<Self> {
        let states = kernels.len();
        if states == 0 || p_s.len() != states || obs_kernel.len() != states {
            return Err(Error::WrongShape("kernels, p_S and observation rows must agree in count".into()));
        }
        let (m, n) = (kernels[0].m(), kernels[0].n());
        if kernels.iter().any(|k| k.m() != m || k.n() != n) {
            return Err(Error::WrongShape("kernels must share one shape".into()));
        }
        if encoder_alphabet == 0 || decoder_alphabet == 0 {
            return Err(Error::WrongShape("observation alphabets must be nonempty".into()));
        }
        check_prob(&p_s, "p_S")?;
        for row in &obs_kernel {
            if row.len() != encoder_alphabet * decoder_alphabet {
                return Err(Error::WrongShape("observation row has the wrong length".into()));
            }
            check_prob(row, "observation row")?;
        }
        Ok(StateChannelModel { kernels, p_s, obs_kernel, encoder_alphabet, decoder_alphabet })
    }

    /// Encoder sees `S`, decoder sees nothing.
    pub fn encoder_informed(kernels: Vec<Channel>, p_s: Vec<f64>) -> Result<Self> {
        let k = kernels.len();
        let obs = (0..k).map(|s| (0..k).map(|e| if e == s { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(kernels, p_s, obs, k, 1)
    }

    /// Neither end sees the state.
    pub fn uninformed(kernels: Vec<Channel>, p_s: Vec<f64>) -> Result<Self> {
        let k = kernels.len();
        Self::new(kernels, p_s, vec![vec![1.0]; k], 1, 1)
    }

    pub fn states(&self) -> usize {
        self.kernels.len()
    }

    pub fn m(&self) -> usize {
        self.kernels[0].m()
    }

    pub fn n(&self) -> usize {
        self.kernels[0].n()
    }

    /// `W′ = Σ_s p_S(s) K^(s)`.
    pub fn mixture(&self) -> Channel {
        let (m, n) = (self.m(), self.n());
        let mut data = vec![0.0; m * n];
        for (k, &p) in self.kernels.iter().zip(&self.p_s) {
            for (d, &v) in data.iter_mut().zip(k.as_slice()) {
                *d += p * v;
            }
        }
        Channel::from_raw(m, n, data)
    }

    /// Same kernels and state law with a different observation structure.
    pub fn with_observations(&self, obs_kernel: Vec<Vec<f64>>, se: usize, sd: usize) -> Result<Self> {
        Self::new(self.kernels.clone(), self.p_s.clone(), obs_kernel, se, sd)
    }
}

/// The Shannon-strategy channel `u: S_E → X` to `(Y, S_D)`; output column
/// `d·n + y` holds `(y, s_D=d)`. Row `u` is encoded with `s_E = 0` as the
/// most significant digit.
pub fn shannon_strategy_channel(model: &StateChannelModel, limit: u128) -> Result<Channel> {
    let (m, n) = (model.m(), model.n());
    let (se, sd) = (model.encoder_alphabet, model.decoder_alphabet);
    let count = (m as u128).checked_pow(se as u32).unwrap_or(u128::MAX);
    if count > limit {
        return Err(Error::TooLarge { size: count, limit });
    }
    let count = count as usize;
    let mut rows = vec![vec![0.0; n * sd]; count];
    let mut u = vec![0usize; se];
    for (idx, row) in rows.iter_mut().enumerate() {
        let mut rest = idx;
        for e in (0..se).rev() {
            u[e] = rest % m;
            rest /= m;
        }
        for (s, k) in model.kernels.iter().enumerate() {
            let ps = model.p_s[s];
            if ps == 0.0 {
                continue;
            }
            for e in 0..se {
                for d in 0..sd {
                    let po = model.obs_kernel[s][e * sd + d];
                    if po == 0.0 {
                        continue;
                    }
                    for (y, &kv) in k.row(u[e]).iter().enumerate() {
                        row[d * n + y] += ps * po * kv;
                    }
                }
            }
        }
    }
    Channel::from_rows_any(&rows)
}

pub const DEFAULT_SI_STRATEGY_LIMIT: u128 = 1_000_000;

/// `C(W, S_E, S_D, p_S)` via Blahut–Arimoto on the Shannon-strategy channel.
pub fn capacity_with_causal_si(model: &StateChannelModel) -> Result<f64> {
    capacity_with_causal_si_with(model, &BaOptions::default(), DEFAULT_SI_STRATEGY_LIMIT)
}

pub fn capacity_with_causal_si_with(model: &StateChannelModel, ba: &BaOptions, limit: u128) -> Result<f64> {
    let v = shannon_strategy_channel(model, limit)?;
    Ok(solve_capacity(&v, ba)?.capacity)
}

/// Whether the rows of a binary-output `K` lie on the segment between rows
/// `i1` and `i2`, with `K[i1][0]` minimal and `K[i2][0]` maximal. Ties are allowed.
pub fn is_ended(k: &Channel, i1: usize, i2: usize) -> Result<bool> {
    if k.n() != 2 {
        return Err(Error::WrongShape(format!("ended-ness needs binary output, got n={}", k.n())));
    }
    if i1 >= k.m() || i2 >= k.m() {
        return Err(Error::InvalidInput("row index out of range".into()));
    }
    let col: Vec<f64> = (0..k.m()).map(|x| k.get(x, 0)).collect();
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(col[i1] <= lo + 1e-12 && col[i2] >= hi - 1e-12)
}

/// The first pair `(i1, i2)` in row-major order at which every kernel with
/// positive state probability is ended.
pub fn find_common_ends(model: &StateChannelModel) -> Result<Option<(usize, usize)>> {
    let m = model.m();
    for i1 in 0..m {
        'pair: for i2 in 0..m {
            for (k, &p) in model.kernels.iter().zip(&model.p_s) {
                if p > 0.0 && !is_ended(k, i1, i2)? {
                    continue 'pair;
                }
            }
            return Ok(Some((i1, i2)));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct UselessnessVerdict {
    pub useless: bool,
    /// Common ends, when the structural test applies.
    pub ends: Option<(usize, usize)>,
    /// Capacity with the encoder observing `S`.
    pub capacity_with_si: f64,
    /// Capacity of the mixture `Σ p_S(s) K^(s)`.
    pub capacity_without_si: f64,
    /// `true` when the verdict is structural, `false` when it rests on the
    /// numbers alone (non-binary outputs without a bottleneck).
    pub structural: bool,
}

/// Whether causal knowledge of `S` at the encoder can increase capacity.
///
/// `bottleneck` is the binary-input channel `W″` in `W = W′W″`; pass `None`
/// when the kernels are already binary-output. For other shapes only the
/// numerical comparison is available and `structural` is `false`.
pub fn causal_encoder_si_useless(
    model: &StateChannelModel,
    bottleneck: Option<&Channel>,
    tol: f64,
) -> Result<UselessnessVerdict> {
    let informed = StateChannelModel::encoder_informed(model.kernels.clone(), model.p_s.clone())?;
    let ba = BaOptions::default();
    let composed;
    let (structural_model, outer) = match bottleneck {
        Some(b) => {
            if b.m() != 2 || model.n() != 2 {
                return Err(Error::WrongShape("bottleneck must be 2×k after binary-output kernels".into()));
            }
            if b.row(0).iter().zip(b.row(1)).all(|(x, y)| (x - y).abs() <= 1e-12) {
                return Err(Error::InvalidInput("bottleneck rows must differ".into()));
            }
            let kernels = model.kernels.iter().map(|k| k.compose(b)).collect::<Result<Vec<_>>>()?;
            composed = StateChannelModel::encoder_informed(kernels, model.p_s.clone())?;
            (&informed, Some(&composed))
        }
        None => (&informed, None),
    };
    let numeric = outer.unwrap_or(structural_model);
    let with_si = capacity_with_causal_si_with(numeric, &ba, DEFAULT_SI_STRATEGY_LIMIT)?;
    let mix = numeric.mixture();
    let without = solve_capacity(&mix, &ba)?.capacity;

    if structural_model.n() == 2 {
        let ends = find_common_ends(structural_model)?;
        Ok(UselessnessVerdict {
            useless: ends.is_some(),
            ends,
            capacity_with_si: with_si,
            capacity_without_si: without,
            structural: true,
        })
    } else {
        Ok(UselessnessVerdict {
            useless: with_si <= without + tol,
            ends: None,
            capacity_with_si: with_si,
            capacity_without_si: without,
            structural: false,
        })
    }
}

fn bsc_row(eps: f64, input: usize) -> [f64; 2] {
    if input == 0 {
        [1.0 - eps, eps]
    } else {
        [eps, 1.0 - eps]
    }
}

/// For `S` binary, builds `p(s_E, s_D | s)` with `S_E = S ⊕ Bern(p)` and
/// `S_D = S ⊕ Bern(q)` arranged as a physically degraded cascade: through
/// `S_D` when `p ≥ q`, through `S_E` when `p ≤ q`.
pub fn degraded_observations(p: f64, q: f64) -> Result<Vec<Vec<f64>>> {
    let inside = |x: f64| (0.0..=0.5).contains(&x);
    if !inside(p) || !inside(q) {
        return Err(Error::DomainError(format!("crossovers must lie in [0, 1/2], got p={p}, q={q}")));
    }
    let inner = |outer: f64, first: f64| -> Result<f64> {
        if outer == first {
            return Ok(0.0);
        }
        let t = (outer - first) / (1.0 - 2.0 * first);
        if !t.is_finite() || !(-1e-12..=0.5 + 1e-12).contains(&t) {
            return Err(Error::DomainError(format!("cascade crossover {t} outside [0, 1/2]")));
        }
        Ok(t.clamp(0.0, 0.5))
    };
    let mut obs = vec![vec![0.0; 4]; 2];
    if p >= q {
        let t = inner(p, q)?;
        for (s, row) in obs.iter_mut().enumerate() {
            for d in 0..2 {
                for e in 0..2 {
                    row[e * 2 + d] = bsc_row(q, s)[d] * bsc_row(t, d)[e];
                }
            }
        }
    } else {
        let t = inner(q, p)?;
        for (s, row) in obs.iter_mut().enumerate() {
            for e in 0..2 {
                for d in 0..2 {
                    row[e * 2 + d] = bsc_row(p, s)[e] * bsc_row(t, e)[d];
                }
            }
        }
    }
    Ok(obs)
}

/// Kernels `K^(0) = [[½,½],[0,1]]`, `K^(1) = [[1,0],[½,½]]` with a uniform
/// binary state.
pub fn preset_paper_fig5() -> StateChannelModel {
    let k0 = Channel::new(vec![vec![0.5, 0.5], vec![0.0, 1.0]]).expect("valid kernel");
    let k1 = Channel::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).expect("valid kernel");
    StateChannelModel::uninformed(vec![k0, k1], vec![0.5, 0.5]).expect("valid model")
}

/// Looks up a built-in model by name.
pub fn preset(name: &str) -> Result<StateChannelModel> {
    match name {
        "paper-fig5" => Ok(preset_paper_fig5()),
        "mixture-counterexample" => Ok(super::paper::mixture_counterexample()),
        _ => Err(Error::InvalidInput(format!("unknown preset {name:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub p: f64,
    pub capacity_bits: f64,
}

/// Capacity against the encoder crossover `p` for fixed decoder crossover
/// `q`. Points come back in grid order.
pub fn si_sweep(model: &StateChannelModel, q: f64, p_grid: &[f64], ba: &BaOptions) -> Result<Vec<SweepPoint>> {
    if model.states() != 2 {
        return Err(Error::WrongShape("the degraded sweep needs a binary state".into()));
    }
    p_grid
        .par_iter()
        .map(|&p| {
            let obs = degraded_observations(p, q)?;
            let m = model.with_observations(obs, 2, 2)?;
            let c = capacity_with_causal_si_with(&m, ba, DEFAULT_SI_STRATEGY_LIMIT)?;
            Ok(SweepPoint { p, capacity_bits: c })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_entropy;

    #[test]
    fn ended_examples() {
        let k = Channel::new(vec![vec![0.1, 0.9], vec![0.5, 0.5], vec![0.9, 0.1]]).unwrap();
        assert!(is_ended(&k, 0, 2).unwrap());
        assert!(!is_ended(&k, 1, 2).unwrap());
        let two = Channel::new(vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap();
        assert!(is_ended(&two, 1, 0).unwrap());
        assert!(is_ended(&Channel::identity(3), 0, 0).is_err());
    }

    #[test]
    fn no_common_ends() {
        let k1 = Channel::new(vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let k2 = Channel::new(vec![vec![0.5, 0.5], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = StateChannelModel::encoder_informed(vec![k1, k2], vec![0.5, 0.5]).unwrap();
        assert_eq!(find_common_ends(&m).unwrap(), None);
    }

    #[test]
    fn preset_corner_cases() {
        let base = preset_paper_fig5();
        let informed = StateChannelModel::encoder_informed(base.kernels.clone(), base.p_s.clone()).unwrap();
        let c = capacity_with_causal_si(&informed).unwrap();
        assert!((c - (1.0 - binary_entropy(0.25))).abs() < 1e-9);
        let blind = capacity_with_causal_si(&base).unwrap();
        assert!((blind - (1.0 - binary_entropy(0.25))).abs() < 1e-9);
    }

    #[test]
    fn single_state_is_useless() {
        let k = Channel::new(vec![vec![0.8, 0.2, 0.0], vec![0.6, 0.35, 0.05]]).unwrap();
        let model = StateChannelModel::uninformed(vec![k], vec![1.0]).unwrap();
        let v = causal_encoder_si_useless(&model, None, 1e-6).unwrap();
        assert!(v.useless);
        assert!((v.capacity_with_si - v.capacity_without_si).abs() < 1e-9);
    }

    #[test]
    fn cascade_marginals() {
        for &(p, q) in &[(0.1, 0.25), (0.4, 0.25), (0.25, 0.25), (0.5, 0.0)] {
            let obs = degraded_observations(p, q).unwrap();
            // s = 0: P(s_E = 1) = p and P(s_D = 1) = q.
            let pe: f64 = obs[0][2] + obs[0][3];
            let pd: f64 = obs[0][1] + obs[0][3];
            assert!((pe - p).abs() < 1e-12 && (pd - q).abs() < 1e-12, "{p} {q}");
        }
        assert!(matches!(degraded_observations(0.6, 0.2), Err(Error::DomainError(_))));
    }
}
