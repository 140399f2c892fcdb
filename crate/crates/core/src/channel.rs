//! Channels, deterministic channels and input distributions.
//!
//! A [`Channel`] is a row-stochastic `m × n` matrix with `W[x][y] = W(y|x)`.
//! A [`DetChannel`] is a map `[0, m) → [0, n)`; internally every index is
//! zero-based, and the JSON formats in [`crate::io`] translate to the
//! one-based labels used for display.

use std::fmt;

use crate::error::{Error, Result};

/// Maximum deviation of a row sum from one.
pub const STOCHASTIC_TOL: f64 = 1e-9;
/// Entries within this distance outside `[0, 1]` are clamped.
pub const CLAMP_TOL: f64 = 1e-12;
/// Default cap on `n^m` for enumerating deterministic channels.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 20;

/// A row-stochastic matrix of conditional probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

/// Validates a raw matrix and returns the corresponding channel.
///
/// Entries slightly outside `[0, 1]` (by at most `1e-12`) are clamped, never
/// renormalized. The `row` reported by [`Error::NotStochastic`] is one-based.
pub fn validate_channel(raw: &[Vec<f64>]) -> Result<Channel> {
    let m = raw.len();
    if m < 2 {
        return Err(Error::WrongShape(format!("need at least 2 inputs, got {m}")));
    }
    let n = raw[0].len();
    if n < 2 {
        return Err(Error::WrongShape(format!("need at least 2 outputs, got {n}")));
    }
    Channel::from_rows_inner(raw, m, n)
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_channel(&rows)
    }

    /// Same checks as [`validate_channel`] but without the `m, n ≥ 2` requirement.
    ///
    /// Strategy channels and augmented channels built internally may have a
    /// single row or column after merging.
    pub fn from_rows_any(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows[0].is_empty() {
            return Err(Error::WrongShape("empty matrix".into()));
        }
        Self::from_rows_inner(rows, m, rows[0].len())
    }

    fn from_rows_inner(raw: &[Vec<f64>], m: usize, n: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(m * n);
        for (i, row) in raw.iter().enumerate() {
            if row.len() != n {
                return Err(Error::WrongShape(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !p.is_finite() {
                    return Err(Error::NotStochastic {
                        row: i + 1,
                        deviation: f64::NAN,
                    });
                }
                if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&p) {
                    return Err(Error::NotStochastic {
                        row: i + 1,
                        deviation: if p < 0.0 { -p } else { p - 1.0 },
                    });
                }
                let p = p.clamp(0.0, 1.0);
                sum += p;
                data.push(p);
            }
            let deviation = (sum - 1.0).abs();
            if deviation > STOCHASTIC_TOL {
                return Err(Error::NotStochastic { row: i + 1, deviation });
            }
        }
        Ok(Channel { m, n, data })
    }

    /// Builds a channel from row-major data that is already known to be stochastic.
    pub(crate) fn from_raw(m: usize, n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), m * n);
        Channel { m, n, data }
    }

    /// Binary channel `[[1-e1, e1], [e2, 1-e2]]`.
    pub fn binary(e1: f64, e2: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - e1, e1], vec![e2, 1.0 - e2]])
    }

    /// Binary symmetric channel with crossover `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        Self::binary(eps, eps)
    }

    /// Z-channel `[[1, 0], [theta, 1-theta]]`.
    pub fn z_channel(theta: f64) -> Result<Self> {
        Self::binary(0.0, theta)
    }

    /// The channel with every entry equal to `1/n`.
    pub fn uniform(m: usize, n: usize) -> Self {
        Channel::from_raw(m, n, vec![1.0 / n as f64; m * n])
    }

    pub fn identity(m: usize) -> Self {
        DetChannel::identity(m).to_channel()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column-sum vector `1W`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for row in self.rows() {
            for (s, &p) in sums.iter_mut().zip(row) {
                *s += p;
            }
        }
        sums
    }

    /// Column minima `(min_i W[i][j])_j`.
    pub fn column_minima(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.m).map(|i| self.get(i, j)).fold(f64::INFINITY, f64::min))
            .collect()
    }

    /// Number of nonzero entries.
    pub fn weight(&self) -> usize {
        self.data.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn row_weight(&self, x: usize) -> usize {
        self.row(x).iter().filter(|&&p| p > 0.0).count()
    }

    pub fn column_weight(&self, y: usize) -> usize {
        (0..self.m).filter(|&i| self.get(i, y) > 0.0).count()
    }

    /// Largest absolute entrywise difference; `∞` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Channel) -> f64 {
        if self.m != other.m || self.n != other.n {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Returns the channel with rows reordered so that new row `i` is old row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Channel {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in perm {
            data.extend_from_slice(self.row(i));
        }
        Channel::from_raw(self.m, self.n, data)
    }

    /// Returns the channel with columns reordered so that new column `j` is old column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Channel {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.rows() {
            data.extend(perm.iter().map(|&j| row[j]));
        }
        Channel::from_raw(self.m, self.n, data)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Channel) -> Result<Channel> {
        if self.n != other.m {
            return Err(Error::WrongShape(format!(
                "cannot compose {}x{} with {}x{}",
                self.m, self.n, other.m, other.n
            )));
        }
        let mut data = vec![0.0; self.m * other.n];
        for x in 0..self.m {
            for k in 0..self.n {
                let p = self.get(x, k);
                if p == 0.0 {
                    continue;
                }
                for y in 0..other.n {
                    data[x * other.n + y] += p * other.get(k, y);
                }
            }
        }
        Ok(Channel::from_raw(self.m, other.n, data))
    }

    /// Whether every entry is 0 or 1 (within `tol`).
    pub fn is_deterministic(&self, tol: f64) -> bool {
        self.data.iter().all(|&p| p <= tol || p >= 1.0 - tol)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|p| format!("{p:.6}")).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A deterministic channel, stored as its image tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetChannel {
    n: usize,
    image: Vec<usize>,
}

impl DetChannel {
    /// `image[i]` is the (zero-based) output of input `i`.
    pub fn new(n: usize, image: Vec<usize>) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::WrongShape("empty image".into()));
        }
        if let Some(&bad) = image.iter().find(|&&y| y >= n) {
            return Err(Error::WrongShape(format!("output {bad} out of range for n={n}")));
        }
        Ok(DetChannel { n, image })
    }

    /// The useless channel `U_j` sending every input to output `j`.
    pub fn constant(m: usize, n: usize, j: usize) -> Self {
        DetChannel { n, image: vec![j; m] }
    }

    pub fn identity(m: usize) -> Self {
        DetChannel { n: m, image: (0..m).collect() }
    }

    /// Decodes the canonical lexicographic index (first input most significant).
    pub fn from_index(m: usize, n: usize, mut index: usize) -> Self {
        let mut image = vec![0; m];
        for slot in image.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        DetChannel { n, image }
    }

    /// Canonical lexicographic index of the image tuple.
    pub fn index(&self) -> usize {
        self.image.iter().fold(0, |acc, &y| acc * self.n + y)
    }

    pub fn m(&self) -> usize {
        self.image.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// Size of the image, which equals the matrix rank of the 0-1 matrix.
    pub fn rank(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for &y in &self.image {
            if !seen[y] {
                seen[y] = true;
                count += 1;
            }
        }
        count
    }

    /// Number of inputs mapped to `y`.
    pub fn column_weight(&self, y: usize) -> usize {
        self.image.iter().filter(|&&v| v == y).count()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        if self.image[x] == y {
            1.0
        } else {
            0.0
        }
    }

    pub fn to_channel(&self) -> Channel {
        let m = self.m();
        let mut data = vec![0.0; m * self.n];
        for (x, &y) in self.image.iter().enumerate() {
            data[x * self.n + y] = 1.0;
        }
        Channel::from_raw(m, self.n, data)
    }
}

/// Returns `n^m` if it fits in a `u128`.
pub fn det_count(m: usize, n: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(m).ok()?)
}

pub(crate) fn check_det_count(m: usize, n: usize, limit: u128) -> Result<usize> {
    match det_count(m, n) {
        Some(size) if size <= limit => Ok(size as usize),
        Some(size) => Err(Error::TooLarge { size, limit }),
        None => Err(Error::TooLarge { size: u128::MAX, limit }),
    }
}

/// All `n^m` deterministic channels in canonical lexicographic order.
pub fn enumerate_det_channels(m: usize, n: usize) -> Result<Vec<DetChannel>> {
    enumerate_det_channels_with_limit(m, n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_det_channels_with_limit(m: usize, n: usize, limit: u128) -> Result<Vec<DetChannel>> {
    let count = check_det_count(m, n, limit)?;
    Ok((0..count).map(|k| DetChannel::from_index(m, n, k)).collect())
}

pub fn det_rank(d: &DetChannel) -> usize {
    d.rank()
}

/// A probability vector over some finite alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDist(Vec<f64>);

impl InputDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::WrongShape("empty distribution".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -CLAMP_TOL) {
            return Err(Error::InvalidInput("distribution has a negative entry".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidInput(format!("distribution sums to {sum}")));
        }
        Ok(InputDist(probs.into_iter().map(|p| p.max(0.0)).collect()))
    }

    pub fn uniform(m: usize) -> Self {
        InputDist(vec![1.0 / m as f64; m])
    }

    /// Point mass on `x`.
    pub fn point(m: usize, x: usize) -> Self {
        let mut v = vec![0.0; m];
        v[x] = 1.0;
        InputDist(v)
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        InputDist(probs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Output distribution `μW`.
    pub fn push_through(&self, w: &Channel) -> Vec<f64> {
        let mut out = vec![0.0; w.n()];
        for (x, &mu) in self.0.iter().enumerate() {
            if mu == 0.0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(w.row(x)) {
                *o += mu * p;
            }
        }
        out
    }
}
