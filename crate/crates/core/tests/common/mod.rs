#![allow(dead_code)]

use intrinsic_capacity::channel::enumerate_det_channels;
use intrinsic_capacity::decomposition::ColumnSumBounds;
use intrinsic_capacity::{Channel, DetChannel, Decomposition};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random row-stochastic matrix; each entry is zero with probability `zeros`
/// (every row keeps at least one positive entry).
pub fn random_channel(rng: &mut ChaCha8Rng, m: usize, n: usize, zeros: f64) -> Channel {
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut r: Vec<f64> = (0..n)
                .map(|_| if rng.gen_bool(zeros) { 0.0 } else { rng.gen_range(0.01..1.0) })
                .collect();
            if r.iter().all(|&x| x == 0.0) {
                r[rng.gen_range(0..n)] = 1.0;
            }
            let s: f64 = r.iter().sum();
            r.iter().map(|x| x / s).collect()
        })
        .collect();
    Channel::from_rows_any(&rows).unwrap()
}

/// A random convex combination of `k` deterministic channels drawn from `pool`.
pub fn random_mixture(rng: &mut ChaCha8Rng, m: usize, n: usize, pool: &[DetChannel], k: usize) -> Channel {
    let mut atoms = Vec::with_capacity(k);
    let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= s);
    for w in weights {
        atoms.push((pool.choose(rng).unwrap().clone(), w));
    }
    Decomposition::from_atoms(m, n, &atoms).unwrap().reconstruct()
}

/// Random integer column-sum bounds with `D[a, b]` nonempty, and its members.
pub fn random_bounds(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (ColumnSumBounds, Vec<DetChannel>) {
    loop {
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=m as i64)).collect();
        let b: Vec<i64> = a.iter().map(|&x| rng.gen_range(x..=m as i64)).collect();
        let bounds = ColumnSumBounds::new(a, b).unwrap();
        if !bounds.is_feasible(m) {
            continue;
        }
        let members: Vec<DetChannel> =
            enumerate_det_channels(m, n).unwrap().into_iter().filter(|d| bounds.contains_det(d)).collect();
        if !members.is_empty() {
            return (bounds, members);
        }
    }
}

pub fn shapes() -> [(usize, usize); 4] {
    [(2, 2), (2, 3), (3, 2), (3, 3)]
}

pub fn shuffled(rng: &mut ChaCha8Rng, count: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..count).collect();
    v.shuffle(rng);
    v
}

/// Two binary-output kernels on `m` inputs, both `(i1, i2)`-ended: row `i1`
/// puts the least mass on output 0 and row `i2` the most.
pub fn ended_kernels(rng: &mut ChaCha8Rng, m: usize) -> (Vec<Channel>, usize, usize) {
    let i1 = rng.gen_range(0..m);
    let i2 = (i1 + rng.gen_range(1..m)) % m;
    let kernels = (0..2)
        .map(|_| {
            let lo: f64 = rng.gen_range(0.0..0.5);
            let hi: f64 = rng.gen_range(lo + 0.05..1.0);
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|x| {
                    let p = if x == i1 {
                        lo
                    } else if x == i2 {
                        hi
                    } else {
                        rng.gen_range(lo..=hi)
                    };
                    vec![p, 1.0 - p]
                })
                .collect();
            Channel::new(rows).unwrap()
        })
        .collect();
    (kernels, i1, i2)
}
