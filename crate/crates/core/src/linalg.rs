//! Small dense linear-algebra helpers: numerical rank and an incremental QR
//! factorization used by vertex testing and enumeration.

/// Numerical rank of a set of equal-length vectors, by Gaussian elimination
/// with complete pivoting. Pivots with magnitude `≤ tol` (relative to the
/// largest entry) count as zero.
pub fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<f64>> = vectors.to_vec();
    let rows = a.len();
    let cols = a[0].len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, &x| s.max(x.abs()))
        .max(1.0);
    let mut r = 0;
    let mut col_used = vec![false; cols];
    while r < rows {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, &x) in row.iter().enumerate() {
                if !col_used[j] && x.abs() > best.0 {
                    best = (x.abs(), i, j);
                }
            }
        }
        if best.0 <= tol * scale {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(r, pi);
        col_used[pj] = true;
        let pivot = a[r][pj];
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            let f = row[pj] / pivot;
            if f != 0.0 {
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Incremental thin QR factorization of a growing column set.
#[derive(Clone, Debug)]
pub struct IncrementalQr {
    dim: usize,
    q: Vec<Vec<f64>>,
    // r[k] holds the k-th column of R (length k+1).
    r: Vec<Vec<f64>>,
    tol: f64,
}

impl IncrementalQr {
    pub fn new(dim: usize, tol: f64) -> Self {
        IncrementalQr { dim, q: Vec::new(), r: Vec::new(), tol }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    fn project(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut resid = v.to_vec();
        let mut coeffs = vec![0.0; self.q.len()];
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for (k, qk) in self.q.iter().enumerate() {
                let c: f64 = resid.iter().zip(qk).map(|(a, b)| a * b).sum();
                coeffs[k] += c;
                for (x, &qv) in resid.iter_mut().zip(qk) {
                    *x -= c * qv;
                }
            }
        }
        (resid, coeffs)
    }

    /// Distance from `v` to the span of the current columns.
    pub fn residual_norm(&self, v: &[f64]) -> f64 {
        let (resid, _) = self.project(v);
        norm(&resid)
    }

    /// Appends `v` if it is linearly independent of the current columns;
    /// returns whether it was appended.
    pub fn push(&mut self, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let (resid, mut coeffs) = self.project(v);
        let nr = norm(&resid);
        if nr <= self.tol * norm(v).max(1.0) {
            return false;
        }
        self.q.push(resid.iter().map(|x| x / nr).collect());
        coeffs.push(nr);
        self.r.push(coeffs);
        true
    }

    /// Least-squares coefficients of `target` in the current column basis,
    /// together with the residual norm.
    pub fn solve(&self, target: &[f64]) -> (Vec<f64>, f64) {
        let (resid, qt) = self.project(target);
        let k = self.q.len();
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = qt[i];
            for j in i + 1..k {
                s -= self.r[j][i] * x[j];
            }
            x[i] = s / self.r[i][i];
        }
        (x, norm(&resid))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `tol` in magnitude.
pub fn solve(mut a: Vec<Vec<f64>>, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let k = b.len();
    for (row, &bi) in a.iter_mut().zip(b) {
        row.push(bi);
    }
    for c in 0..k {
        let p = (c..k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < tol {
            return None;
        }
        a.swap(c, p);
        let pr = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            let f = row[c] / pr[c];
            if f != 0.0 {
                for (x, &v) in row.iter_mut().zip(&pr).skip(c) {
                    *x -= f * v;
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = a[i][k];
        for j in i + 1..k {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 2.0]];
        assert_eq!(rank(&rows, 1e-9), 2);
        assert_eq!(rank(&[vec![0.0, 0.0]], 1e-9), 0);
    }

    #[test]
    fn qr_solves_independent_system() {
        let mut qr = IncrementalQr::new(3, 1e-10);
        assert!(qr.push(&[1.0, 0.0, 1.0]));
        assert!(qr.push(&[0.0, 1.0, 1.0]));
        assert!(!qr.push(&[2.0, 3.0, 5.0]));
        let (x, res) = qr.solve(&[2.0, 3.0, 5.0]);
        assert!(res < 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
    }
}
