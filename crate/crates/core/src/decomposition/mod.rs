//! The decomposition polytope `Dec(W)`: convex combinations of deterministic
//! channels that reproduce a channel.
//!
//! Weight vectors are dense and indexed by the canonical lexicographic index
//! of [`DetChannel`](crate::channel::DetChannel), so decompositions produced
//! by different routines can be compared entry by entry.

mod birkhoff;
mod vertices;

pub use birkhoff::{birkhoff_decompose, ColumnSumBounds};
pub use vertices::{enumerate_vertices, enumerate_vertices_with_limit, DEFAULT_VERTEX_LIMIT};

use std::collections::HashSet;

use crate::channel::{check_det_count, Channel, DetChannel, STOCHASTIC_TOL};
use crate::error::{Error, Result};
use crate::linalg;

/// Weights at or below this are outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Entries of the greedy residual below this are snapped to zero.
const SNAP_TOL: f64 = 1e-12;
/// Tolerance on the greedy residual after the ordering is exhausted.
const RESIDUAL_TOL: f64 = 1e-9;

/// A probability vector over all `n^m` deterministic channels.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    m: usize,
    n: usize,
    weights: Vec<f64>,
}

impl Decomposition {
    pub fn new(m: usize, n: usize, weights: Vec<f64>) -> Result<Self> {
        let count = check_det_count(m, n, crate::channel::DEFAULT_ENUMERATION_LIMIT)?;
        if weights.len() != count {
            return Err(Error::WrongShape(format!(
                "expected {count} weights for m={m}, n={n}, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < -SUPPORT_TOL) {
            return Err(Error::InvalidInput("negative decomposition weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidInput(format!("decomposition weights sum to {sum}")));
        }
        Ok(Self::from_raw(m, n, weights.into_iter().map(|w| w.max(0.0)).collect()))
    }

    pub(crate) fn from_raw(m: usize, n: usize, weights: Vec<f64>) -> Self {
        Decomposition { m, n, weights }
    }

    /// Builds a decomposition from `(atom, weight)` pairs; repeated atoms add up.
    pub fn from_atoms(m: usize, n: usize, atoms: &[(DetChannel, f64)]) -> Result<Self> {
        let count = check_det_count(m, n, crate::channel::DEFAULT_ENUMERATION_LIMIT)?;
        let mut weights = vec![0.0; count];
        for (d, w) in atoms {
            if d.m() != m || d.n() != n {
                return Err(Error::WrongShape("atom shape does not match decomposition".into()));
            }
            weights[d.index()] += w;
        }
        Self::new(m, n, weights)
    }

    /// Point mass on one deterministic channel.
    pub fn point(d: &DetChannel) -> Self {
        let count = d.n().pow(d.m() as u32);
        let mut weights = vec![0.0; count];
        weights[d.index()] = 1.0;
        Self::from_raw(d.m(), d.n(), weights)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_of(&self, d: &DetChannel) -> f64 {
        self.weights[d.index()]
    }

    /// Canonical indices with weight above [`SUPPORT_TOL`].
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&k| self.weights[k] > SUPPORT_TOL).collect()
    }

    /// Support size `weight(λ)`.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > SUPPORT_TOL).count()
    }

    /// Support atoms with their weights, in canonical order.
    pub fn atoms(&self) -> Vec<(DetChannel, f64)> {
        self.support()
            .into_iter()
            .map(|k| (DetChannel::from_index(self.m, self.n, k), self.weights[k]))
            .collect()
    }

    pub fn reconstruct(&self) -> Channel {
        reconstruct(self)
    }

    /// Largest absolute difference between two weight vectors.
    pub fn distance(&self, other: &Decomposition) -> f64 {
        if self.weights.len() != other.weights.len() {
            return f64::INFINITY;
        }
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `Σ_D λ_D D`.
pub fn reconstruct(lambda: &Decomposition) -> Channel {
    let (m, n) = (lambda.m, lambda.n);
    let mut data = vec![0.0; m * n];
    for (k, &w) in lambda.weights.iter().enumerate() {
        if w > 0.0 {
            let d = DetChannel::from_index(m, n, k);
            for x in 0..m {
                data[x * n + d.apply(x)] += w;
            }
        }
    }
    Channel::from_raw(m, n, data)
}

/// Whether `λ` reproduces `W` within `tol` (max-abs entrywise).
pub fn membership(lambda: &Decomposition, w: &Channel, tol: f64) -> bool {
    reconstruct(lambda).max_abs_diff(w) <= tol
}

fn check_ordering(ordering: &[usize], count: usize, full: bool) -> Result<()> {
    if full && ordering.len() != count {
        return Err(Error::InvalidInput(format!(
            "ordering has {} entries, expected {count}",
            ordering.len()
        )));
    }
    let mut seen = HashSet::with_capacity(ordering.len());
    for &k in ordering {
        if k >= count || !seen.insert(k) {
            return Err(Error::InvalidInput(format!("ordering entry {k} is out of range or repeated")));
        }
    }
    Ok(())
}

/// Result of running the greedy extraction over a partial ordering.
#[derive(Clone, Debug)]
pub struct GreedyPartial {
    pub m: usize,
    pub n: usize,
    /// Sub-probability weights `λ'` in canonical order.
    pub weights: Vec<f64>,
    /// Row-major residual `K = W − Σ λ'_D D`.
    pub residual: Vec<f64>,
}

impl GreedyPartial {
    /// Total extracted mass `Σ λ'_D`.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn residual_max(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }

    /// `K / (1 − Σ λ')`, a channel whenever the residual is nonzero.
    pub fn normalized_residual(&self) -> Option<Channel> {
        let rest = 1.0 - self.mass();
        if self.residual_max() <= RESIDUAL_TOL || rest <= 0.0 {
            return None;
        }
        let rows: Vec<Vec<f64>> = self
            .residual
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x / rest).collect())
            .collect();
        Channel::from_rows_any(&rows).ok()
    }
}

fn greedy_run(w: &Channel, ordering: &[usize]) -> GreedyPartial {
    let (m, n) = (w.m(), w.n());
    let count = n.pow(m as u32);
    let mut k: Vec<f64> = w.as_slice().to_vec();
    let mut weights = vec![0.0; count];
    for &idx in ordering {
        if k.iter().all(|&v| v == 0.0) {
            break;
        }
        let d = DetChannel::from_index(m, n, idx);
        let take = (0..m).map(|r| k[r * n + d.apply(r)]).fold(f64::INFINITY, f64::min);
        if take <= 0.0 {
            continue;
        }
        weights[idx] = take;
        for r in 0..m {
            let e = &mut k[r * n + d.apply(r)];
            *e -= take;
            if *e < SNAP_TOL {
                *e = 0.0;
            }
        }
    }
    GreedyPartial { m, n, weights, residual: k }
}

/// Greedy vertex construction: visit deterministic channels in `ordering`,
/// extract `min_r K[r][D(r)]` of each, and subtract.
///
/// `ordering` must be a permutation of all `n^m` canonical indices.
pub fn greedy_vertex(w: &Channel, ordering: &[usize]) -> Result<Decomposition> {
    let count = check_det_count(w.m(), w.n(), crate::channel::DEFAULT_ENUMERATION_LIMIT)?;
    check_ordering(ordering, count, true)?;
    let run = greedy_run(w, ordering);
    let resid = run.residual_max();
    if resid > RESIDUAL_TOL {
        return Err(Error::ResidualNotZero(resid));
    }
    Ok(Decomposition::from_raw(w.m(), w.n(), run.weights))
}

/// Greedy extraction over a partial ordering, returning `(λ', K)` with
/// `W = K + Σ λ'_D D`.
pub fn greedy_partial(w: &Channel, ordering: &[usize]) -> Result<GreedyPartial> {
    let count = check_det_count(w.m(), w.n(), crate::channel::DEFAULT_ENUMERATION_LIMIT)?;
    check_ordering(ordering, count, false)?;
    Ok(greedy_run(w, ordering))
}

/// `0, 1, …, n^m − 1`.
pub fn lexicographic_ordering(m: usize, n: usize) -> Vec<usize> {
    (0..n.pow(m as u32)).collect()
}

/// The incidence matrix: one 0-1 row per deterministic channel (canonical
/// order), one column per entry `(i, j)` in row-major order.
#[derive(Clone, Debug)]
pub struct IncidenceMatrix {
    pub m: usize,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl IncidenceMatrix {
    pub fn rank(&self) -> usize {
        linalg::rank(&self.rows, 1e-9)
    }

    pub fn row_of(&self, d: &DetChannel) -> &[f64] {
        &self.rows[d.index()]
    }
}

/// Flattened 0-1 vector of a deterministic channel.
pub(crate) fn atom_vector(d: &DetChannel) -> Vec<f64> {
    let n = d.n();
    let mut v = vec![0.0; d.m() * n];
    for x in 0..d.m() {
        v[x * n + d.apply(x)] = 1.0;
    }
    v
}

pub fn incidence_matrix(m: usize, n: usize) -> Result<IncidenceMatrix> {
    let count = check_det_count(m, n, crate::channel::DEFAULT_ENUMERATION_LIMIT)?;
    let rows = (0..count).map(|k| atom_vector(&DetChannel::from_index(m, n, k))).collect();
    Ok(IncidenceMatrix { m, n, rows })
}

/// A member of `Dec(W)` is a vertex iff the incidence rows on its support are
/// linearly independent.
pub fn is_vertex(lambda: &Decomposition) -> bool {
    let rows: Vec<Vec<f64>> = lambda
        .support()
        .into_iter()
        .map(|k| atom_vector(&DetChannel::from_index(lambda.m, lambda.n, k)))
        .collect();
    linalg::rank(&rows, 1e-9) == rows.len()
}

/// Support-size bounds for members of `Dec(W)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportBounds {
    /// `⌈log2 s⌉ ∨ max_i weight(W_i)`, valid for every member; `s` counts the
    /// distinct entry values of `W`.
    pub lower: usize,
    /// `weight(W) − m + 1`, valid for vertices.
    pub upper: usize,
}

pub fn support_bounds(w: &Channel) -> SupportBounds {
    let mut values: Vec<f64> = w.as_slice().to_vec();
    values.sort_by(f64::total_cmp);
    let mut distinct = 0usize;
    let mut last = f64::NAN;
    for v in values {
        if distinct == 0 || (v - last).abs() > 1e-12 {
            distinct += 1;
            last = v;
        }
    }
    let log_s = if distinct <= 1 {
        0
    } else {
        (usize::BITS - (distinct - 1).leading_zeros()) as usize
    };
    let row_max = (0..w.m()).map(|x| w.row_weight(x)).max().unwrap_or(0);
    SupportBounds {
        lower: log_s.max(row_max),
        upper: w.weight() + 1 - w.m(),
    }
}

pub(crate) type DecSystem = (Vec<DetChannel>, Vec<Vec<f64>>, Vec<f64>);

/// Equality system of `Dec(W)` restricted to atoms compatible with the zero
/// pattern of `W`. Returns `(atoms, rows, rhs)` where `rows[(i,j)][k]` is the
/// `(i,j)` entry of `atoms[k]`.
pub(crate) fn dec_system(w: &Channel, limit: u128) -> Result<DecSystem> {
    let (m, n) = (w.m(), w.n());
    let count = check_det_count(m, n, limit)?;
    let atoms: Vec<DetChannel> = (0..count)
        .map(|k| DetChannel::from_index(m, n, k))
        .filter(|d| (0..m).all(|x| w.get(x, d.apply(x)) > 0.0))
        .collect();
    let mut rows = vec![vec![0.0; atoms.len()]; m * n];
    for (k, d) in atoms.iter().enumerate() {
        for x in 0..m {
            rows[x * n + d.apply(x)][k] = 1.0;
        }
    }
    Ok((atoms, rows, w.as_slice().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> DetChannel {
        DetChannel::new(2, vec![1, 0]).unwrap()
    }

    fn f_model() -> Decomposition {
        Decomposition::from_atoms(2, 2, &[(DetChannel::identity(2), 0.5), (swap(), 0.5)]).unwrap()
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
    fn two_models_of_the_uniform_bsc() {
        let u = Channel::uniform(2, 2);
        assert_eq!(reconstruct(&f_model()), u);
        assert_eq!(reconstruct(&g_model()), u);
        assert!(membership(&f_model(), &u, 1e-12));
        assert!(membership(&g_model(), &u, 1e-12));
    }

    #[test]
    fn point_mass_reconstruction() {
        let p = Decomposition::point(&DetChannel::constant(3, 3, 0));
        let w = reconstruct(&p);
        for x in 0..3 {
            assert_eq!(w.row(x), &[1.0, 0.0, 0.0]);
        }
        let id = Decomposition::point(&DetChannel::identity(2));
        assert!(!membership(&id, &Channel::bsc(0.25).unwrap(), 1e-9));
    }

    #[test]
    fn greedy_lexicographic_on_uniform_bsc() {
        let l = greedy_vertex(&Channel::uniform(2, 2), &lexicographic_ordering(2, 2)).unwrap();
        assert_eq!(l, g_model());
    }

    #[test]
    fn greedy_identity_first_on_bsc() {
        let ordering = vec![1, 0, 2, 3];
        let l = greedy_vertex(&Channel::bsc(0.25).unwrap(), &ordering).unwrap();
        assert!((l.weight_of(&DetChannel::identity(2)) - 0.75).abs() < 1e-15);
        assert!((l.weight_of(&swap()) - 0.25).abs() < 1e-15);
        assert_eq!(l.support_size(), 2);
    }

    #[test]
    fn greedy_on_z_channel_is_unique() {
        let theta = 0.3;
        let z = Channel::z_channel(theta).unwrap();
        for ordering in [vec![0, 1, 2, 3], vec![3, 2, 1, 0], vec![1, 3, 0, 2]] {
            let l = greedy_vertex(&z, &ordering).unwrap();
            assert!((l.weight_of(&DetChannel::constant(2, 2, 0)) - theta).abs() < 1e-15);
            assert!((l.weight_of(&DetChannel::identity(2)) - (1.0 - theta)).abs() < 1e-15);
        }
    }

    #[test]
    fn greedy_rejects_bad_orderings() {
        let w = Channel::uniform(2, 2);
        assert!(greedy_vertex(&w, &[0, 1, 2]).is_err());
        assert!(greedy_vertex(&w, &[0, 1, 1, 2]).is_err());
    }

    #[test]
    fn greedy_partial_cases() {
        let w = Channel::uniform(2, 2);
        let empty = greedy_partial(&w, &[]).unwrap();
        assert_eq!(empty.mass(), 0.0);
        assert_eq!(empty.residual, w.as_slice());

        let one = greedy_partial(&w, &[0]).unwrap();
        assert_eq!(one.weights[0], 0.5);
        assert_eq!(one.residual, vec![0.0, 0.5, 0.0, 0.5]);
        assert_eq!(one.normalized_residual().unwrap(), DetChannel::constant(2, 2, 1).to_channel());

        let full = greedy_partial(&w, &lexicographic_ordering(2, 2)).unwrap();
        assert_eq!(full.residual_max(), 0.0);
        assert!(full.normalized_residual().is_none());
    }

    #[test]
    fn incidence_matrix_shapes() {
        let inc = incidence_matrix(2, 2).unwrap();
        assert_eq!(inc.rows.len(), 4);
        assert!(inc.rows.iter().all(|r| r.iter().sum::<f64>() == 2.0));
        assert_eq!(inc.row_of(&DetChannel::constant(2, 2, 0)), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(inc.rank(), 3);
        assert_eq!(incidence_matrix(3, 3).unwrap().rank(), 3 * 2 + 1);
    }

    #[test]
    fn vertex_tests() {
        assert!(is_vertex(&g_model()));
        assert!(is_vertex(&f_model()));
        let all = Decomposition::new(2, 2, vec![0.25; 4]).unwrap();
        assert!(!is_vertex(&all));
    }

    #[test]
    fn support_bound_examples() {
        let concrete = Channel::new(vec![vec![0.3, 0.3, 0.4], vec![0.2, 0.5, 0.3], vec![0.4, 0.1, 0.5]]).unwrap();
        assert_eq!(support_bounds(&concrete).upper, 7);
        assert_eq!(support_bounds(&Channel::uniform(2, 2)).lower, 2);
        let z = support_bounds(&Channel::z_channel(0.5).unwrap());
        assert_eq!((z.lower, z.upper), (2, 2));
    }

    #[test]
    fn decomposition_validation() {
        assert!(Decomposition::new(2, 2, vec![0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(Decomposition::new(2, 2, vec![1.5, -0.5, 0.0, 0.0]).is_err());
        assert!(Decomposition::new(2, 2, vec![1.0, 0.0, 0.0]).is_err());
    }
}
