//! Constructive decomposition of `W ∈ W[a,b]` into deterministic channels
//! whose column sums also lie in `[a, b]`.
//!
//! The walk to a vertex follows fractional entries: rows with a fractional
//! entry have at least two, and so do columns whose sum sits on a bound.
//! Connecting every non-boundary column to a virtual node, each such graph
//! contains a cycle; alternating `±1` along it gives a direction `N` with
//! zero row sums that keeps boundary column sums fixed. Moving along `N`
//! until a new entry or column sum becomes tight reaches a vertex of the
//! minimal face after finitely many steps. The vertex is then peeled off
//! with the largest feasible weight and the process repeats on the rest.

use crate::channel::{Channel, DetChannel};
use crate::error::{Error, Result};

use super::Decomposition;

const INT_TOL: f64 = 1e-11;

/// Integer column-sum bounds `a ≤ 1W ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSumBounds {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl ColumnSumBounds {
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::WrongShape("bound vectors differ in length".into()));
        }
        if a.iter().zip(&b).any(|(x, y)| x > y) {
            return Err(Error::InvalidInput("column bounds need a <= b".into()));
        }
        Ok(ColumnSumBounds { a, b })
    }

    /// The same scalar bounds on every column.
    pub fn uniform(n: usize, a: i64, b: i64) -> Result<Self> {
        Self::new(vec![a; n], vec![b; n])
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Necessary condition on the number of rows: `Σ a ≤ m ≤ Σ b`.
    pub fn is_feasible(&self, m: usize) -> bool {
        let m = m as i64;
        self.a.iter().sum::<i64>() <= m && m <= self.b.iter().sum::<i64>()
    }

    pub fn contains_sums(&self, sums: &[f64], tol: f64) -> bool {
        sums.len() == self.n()
            && sums
                .iter()
                .zip(self.a.iter().zip(&self.b))
                .all(|(&s, (&lo, &hi))| s >= lo as f64 - tol && s <= hi as f64 + tol)
    }

    pub fn contains(&self, w: &Channel, tol: f64) -> bool {
        self.contains_sums(&w.column_sums(), tol)
    }

    pub fn contains_det(&self, d: &DetChannel) -> bool {
        (0..self.n()).all(|j| {
            let s = d.column_weight(j) as i64;
            self.a[j] <= s && s <= self.b[j]
        })
    }
}

struct Work {
    m: usize,
    n: usize,
    x: Vec<f64>,
}

impl Work {
    fn get(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n + j]
    }

    fn is_fractional(&self, i: usize, j: usize) -> bool {
        let v = self.get(i, j);
        v > INT_TOL && v < 1.0 - INT_TOL
    }

    fn col_sum(&self, j: usize) -> f64 {
        (0..self.m).map(|i| self.get(i, j)).sum()
    }

    fn snap(&mut self) {
        for v in self.x.iter_mut() {
            if *v < INT_TOL {
                *v = 0.0;
            } else if *v > 1.0 - INT_TOL {
                *v = 1.0;
            }
        }
    }

    fn is_integral(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    fn to_det(&self) -> DetChannel {
        let image = (0..self.m)
            .map(|i| {
                (0..self.n)
                    .max_by(|&a, &b| self.get(i, a).total_cmp(&self.get(i, b)))
                    .unwrap_or(0)
            })
            .collect();
        DetChannel::new(self.n, image).expect("image within range")
    }
}

fn is_boundary(sum: f64, lo: i64, hi: i64) -> bool {
    (sum - lo as f64).abs() <= 1e-9 || (sum - hi as f64).abs() <= 1e-9
}

/// Finds a cycle in the fractional-entry graph. Returns the signed entries
/// `(i, j, ±1)` of the move direction.
fn find_direction(w: &Work, bounds: &ColumnSumBounds) -> Option<Vec<(usize, usize, f64)>> {
    let (m, n) = (w.m, w.n);
    // Nodes: rows 0..m, columns m..m+n, virtual node m+n.
    let virt = m + n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + n + 1];
    for i in 0..m {
        for j in 0..n {
            if w.is_fractional(i, j) {
                adj[i].push(m + j);
                adj[m + j].push(i);
            }
        }
    }
    for j in 0..n {
        if !adj[m + j].is_empty() && !is_boundary(w.col_sum(j), bounds.a[j], bounds.b[j]) {
            adj[m + j].push(virt);
            adj[virt].push(m + j);
        }
    }
    let start = (0..m).find(|&i| !adj[i].is_empty())?;

    // Iterative DFS that records the first back edge.
    let total = m + n + 1;
    let mut parent = vec![usize::MAX; total];
    let mut depth = vec![usize::MAX; total];
    let mut stack = vec![(start, 0usize)];
    depth[start] = 0;
    while let Some(&mut (u, ref mut next)) = stack.last_mut() {
        if *next >= adj[u].len() {
            stack.pop();
            continue;
        }
        let v = adj[u][*next];
        *next += 1;
        if v == parent[u] {
            continue;
        }
        if depth[v] == usize::MAX {
            parent[v] = u;
            depth[v] = depth[u] + 1;
            stack.push((v, 0));
        } else if depth[v] < depth[u] {
            // Cycle v -> ... -> u -> v.
            let mut path = vec![u];
            let mut cur = u;
            while cur != v {
                cur = parent[cur];
                path.push(cur);
            }
            return Some(signed_entries(&path, m, virt));
        }
    }
    None
}

fn signed_entries(cycle: &[usize], m: usize, virt: usize) -> Vec<(usize, usize, f64)> {
    let len = cycle.len();
    let mut out = Vec::new();
    let mut sign = 1.0;
    for k in 0..len {
        let u = cycle[k];
        let v = cycle[(k + 1) % len];
        if u != virt && v != virt {
            let (i, j) = if u < m { (u, v - m) } else { (v, u - m) };
            out.push((i, j, sign));
        }
        sign = -sign;
    }
    out
}

/// Largest step `t ≥ 0` with `X + t·N` still in `W[a,b]`.
fn max_step(w: &Work, bounds: &ColumnSumBounds, dir: &[(usize, usize, f64)]) -> f64 {
    let mut t = f64::INFINITY;
    let mut col_delta = vec![0.0; w.n];
    for &(i, j, s) in dir {
        let v = w.get(i, j);
        t = t.min(if s > 0.0 { 1.0 - v } else { v });
        col_delta[j] += s;
    }
    for (j, &dj) in col_delta.iter().enumerate() {
        let sum = w.col_sum(j);
        if dj > 0.5 {
            t = t.min(bounds.b[j] as f64 - sum);
        } else if dj < -0.5 {
            t = t.min(sum - bounds.a[j] as f64);
        }
    }
    t.max(0.0)
}

/// Walks from `start` to a deterministic vertex of its minimal face.
fn walk_to_vertex(start: &Work, bounds: &ColumnSumBounds) -> Result<DetChannel> {
    let mut w = Work { m: start.m, n: start.n, x: start.x.clone() };
    w.snap();
    let max_steps = 4 * (w.m * w.n + w.n) + 8;
    for _ in 0..max_steps {
        if w.is_integral() {
            return Ok(w.to_det());
        }
        let dir = find_direction(&w, bounds)
            .ok_or_else(|| Error::NumericalFailure("no fractional cycle in a non-integral point".into()))?;
        let t = max_step(&w, bounds, &dir);
        for &(i, j, s) in &dir {
            w.x[i * w.n + j] += s * t;
        }
        w.snap();
    }
    Err(Error::NumericalFailure("vertex walk did not terminate".into()))
}

/// Decomposes `W ∈ W[a,b]` into deterministic channels in `D[a,b]`.
pub fn birkhoff_decompose(w: &Channel, bounds: &ColumnSumBounds) -> Result<Decomposition> {
    let (m, n) = (w.m(), w.n());
    if bounds.n() != n {
        return Err(Error::WrongShape(format!("bounds have {} columns, channel has {n}", bounds.n())));
    }
    if !bounds.is_feasible(m) {
        return Err(Error::Infeasible("D[a,b] is empty".into()));
    }
    if !bounds.contains(w, 1e-9) {
        return Err(Error::Infeasible("channel column sums violate the bounds".into()));
    }
    let count = crate::channel::check_det_count(m, n, crate::channel::DEFAULT_ENUMERATION_LIMIT)?;
    let mut weights = vec![0.0; count];
    let mut rest = Work { m, n, x: w.as_slice().to_vec() };
    let mut remaining = 1.0;
    let max_atoms = m * n + n + 2;

    for _ in 0..max_atoms {
        let v = walk_to_vertex(&rest, bounds)?;
        let c = rest_col_sums(&rest);
        // Largest t with (R - tV)/(1-t) still in W[a,b].
        let mut t: f64 = 1.0;
        for i in 0..m {
            t = t.min(rest.get(i, v.apply(i)));
        }
        for j in 0..n {
            let vj = v.column_weight(j) as f64;
            let (aj, bj) = (bounds.a[j] as f64, bounds.b[j] as f64);
            if vj > aj {
                t = t.min((c[j] - aj) / (vj - aj));
            }
            if bj > vj {
                t = t.min((bj - c[j]) / (bj - vj));
            }
        }
        let t = t.clamp(0.0, 1.0);
        if t <= 1e-14 {
            return Err(Error::NumericalFailure("zero-weight extraction".into()));
        }
        weights[v.index()] += remaining * t;
        if t >= 1.0 - 1e-12 {
            let lambda = Decomposition::from_raw(m, n, weights);
            return certify(w, bounds, lambda);
        }
        for i in 0..m {
            for j in 0..n {
                let e = &mut rest.x[i * n + j];
                *e = (*e - t * v.entry(i, j)) / (1.0 - t);
            }
        }
        rest.snap();
        remaining *= 1.0 - t;
    }
    Err(Error::NumericalFailure("Birkhoff extraction did not terminate".into()))
}

fn rest_col_sums(w: &Work) -> Vec<f64> {
    (0..w.n).map(|j| w.col_sum(j)).collect()
}

fn certify(w: &Channel, bounds: &ColumnSumBounds, lambda: Decomposition) -> Result<Decomposition> {
    // Rescale away accumulated rounding in the total mass.
    let total: f64 = lambda.weights().iter().sum();
    let weights: Vec<f64> = lambda.weights().iter().map(|x| x / total).collect();
    let lambda = Decomposition::from_raw(lambda.m(), lambda.n(), weights);
    let err = lambda.reconstruct().max_abs_diff(w);
    if err > 1e-9 {
        return Err(Error::NumericalFailure(format!("reconstruction error {err:.3e}")));
    }
    if lambda.atoms().iter().any(|(d, _)| !bounds.contains_det(d)) {
        return Err(Error::NumericalFailure("atom outside D[a,b]".into()));
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DetChannel;

    #[test]
    fn classical_birkhoff_on_uniform_bsc() {
        let l = birkhoff_decompose(&Channel::uniform(2, 2), &ColumnSumBounds::uniform(2, 1, 1).unwrap()).unwrap();
        assert!((l.weight_of(&DetChannel::identity(2)) - 0.5).abs() < 1e-12);
        assert!((l.weight_of(&DetChannel::new(2, vec![1, 0]).unwrap()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_on_middle_column() {
        let w = Channel::new(vec![vec![0.25, 0.5, 0.25], vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5]]).unwrap();
        let bounds = ColumnSumBounds::new(vec![0, 1, 0], vec![3, 3, 3]).unwrap();
        let l = birkhoff_decompose(&w, &bounds).unwrap();
        assert!(l.reconstruct().max_abs_diff(&w) < 1e-9);
        for (d, _) in l.atoms() {
            assert!(d.column_weight(1) >= 1);
        }
    }

    #[test]
    fn injective_atoms_when_columns_sum_at_most_one() {
        let w = Channel::new(vec![vec![0.5, 0.2, 0.1, 0.2], vec![0.1, 0.3, 0.4, 0.2], vec![0.2, 0.2, 0.3, 0.3]])
            .unwrap();
        let bounds = ColumnSumBounds::uniform(4, 0, 1).unwrap();
        let l = birkhoff_decompose(&w, &bounds).unwrap();
        assert!(l.atoms().iter().all(|(d, _)| d.rank() == 3));
        let limit = w.weight() - w.m() + 1 + w.n();
        assert!(l.support_size() <= limit);
    }

    #[test]
    fn infeasible_bounds() {
        let w = Channel::uniform(2, 2);
        assert!(matches!(
            birkhoff_decompose(&w, &ColumnSumBounds::uniform(2, 2, 2).unwrap()),
            Err(Error::Infeasible(_))
        ));
        let z = Channel::z_channel(0.5).unwrap();
        assert!(matches!(
            birkhoff_decompose(&z, &ColumnSumBounds::uniform(2, 1, 1).unwrap()),
            Err(Error::Infeasible(_))
        ));
    }
}
