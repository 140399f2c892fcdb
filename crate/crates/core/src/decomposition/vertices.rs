//! Desk-scale enumeration of the vertices of `Dec(W)`.
//!
//! A vertex is determined by its support: a linearly independent set of
//! atoms whose span contains `W` with strictly positive coefficients. The
//! search walks independent atom sets in increasing canonical order and
//! stops extending a set as soon as `W` lies in its span, since every
//! independent superset would represent `W` with zero weight on the new atoms.

use crate::channel::{check_det_count, Channel};
use crate::error::{Error, Result};
use crate::linalg::IncrementalQr;

use super::{atom_vector, dec_system, support_bounds, Decomposition, SUPPORT_TOL};

/// Default cap on `n^m` for vertex enumeration.
pub const DEFAULT_VERTEX_LIMIT: u128 = 81;
const DEDUP_TOL: f64 = 1e-8;
const SPAN_TOL: f64 = 1e-10;

pub fn enumerate_vertices(w: &Channel) -> Result<Vec<Decomposition>> {
    enumerate_vertices_with_limit(w, DEFAULT_VERTEX_LIMIT)
}

pub fn enumerate_vertices_with_limit(w: &Channel, limit: u128) -> Result<Vec<Decomposition>> {
    let (m, n) = (w.m(), w.n());
    let count = check_det_count(m, n, limit)?;
    let (atoms, _, target) = dec_system(w, limit)?;
    let vectors: Vec<Vec<f64>> = atoms.iter().map(atom_vector).collect();
    let max_depth = support_bounds(w).upper;

    let mut search = Search {
        m,
        n,
        vectors: &vectors,
        target: &target,
        max_depth,
        chosen: Vec::new(),
        found: Vec::new(),
    };
    let qr = IncrementalQr::new(m * n, SPAN_TOL);
    search.extend(&qr, 0);

    let mut out: Vec<Decomposition> = Vec::new();
    for (support, coeffs) in search.found {
        let mut weights = vec![0.0; count];
        for (&k, &c) in support.iter().zip(&coeffs) {
            weights[atoms[k].index()] = c;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|x| *x /= total);
        let lambda = Decomposition::from_raw(m, n, weights);
        if !out.iter().any(|v| v.distance(&lambda) <= DEDUP_TOL) {
            out.push(lambda);
        }
    }
    if out.is_empty() {
        return Err(Error::NumericalFailure("no vertex found for a valid channel".into()));
    }
    Ok(out)
}

struct Search<'a> {
    m: usize,
    n: usize,
    vectors: &'a [Vec<f64>],
    target: &'a [f64],
    max_depth: usize,
    chosen: Vec<usize>,
    found: Vec<(Vec<usize>, Vec<f64>)>,
}

impl Search<'_> {
    fn extend(&mut self, qr: &IncrementalQr, next: usize) {
        if !qr.is_empty() {
            let (coeffs, resid) = qr.solve(self.target);
            if resid <= 1e-9 {
                if coeffs.iter().all(|&c| c > SUPPORT_TOL) {
                    self.found.push((self.chosen.clone(), coeffs));
                }
                return;
            }
        }
        if self.chosen.len() >= self.max_depth || !self.coverable(next) {
            return;
        }
        for k in next..self.vectors.len() {
            let mut child = qr.clone();
            if !child.push(&self.vectors[k]) {
                continue;
            }
            self.chosen.push(k);
            self.extend(&child, k + 1);
            self.chosen.pop();
        }
    }

    /// Every positive entry of `W` still uncovered must be reachable with the
    /// remaining depth and atoms.
    fn coverable(&self, next: usize) -> bool {
        let (m, n) = (self.m, self.n);
        let mut covered = vec![false; m * n];
        for &k in &self.chosen {
            for (c, &v) in covered.iter_mut().zip(&self.vectors[k]) {
                *c |= v > 0.0;
            }
        }
        let mut need = 0;
        for x in 0..m {
            let uncovered = (0..n).filter(|&y| self.target[x * n + y] > 0.0 && !covered[x * n + y]).count();
            need = need.max(uncovered);
        }
        if self.chosen.len() + need > self.max_depth {
            return false;
        }
        let mut reachable = covered;
        for v in &self.vectors[next..] {
            for (c, &e) in reachable.iter_mut().zip(v) {
                *c |= e > 0.0;
            }
        }
        self.target.iter().zip(&reachable).all(|(&t, &r)| t <= 0.0 || r)
    }
}
