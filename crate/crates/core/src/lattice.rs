//! Lattice points, multi-indices, the deformation matrix and the product cocycle.
//!
//! Monomials are normal ordered as `U^m = U_1^{m_1} ... U_n^{m_n}` and the
//! generators satisfy `U_k U_j = e^{2 pi i theta_kj} U_j U_k`. Moving every
//! `U_j^{s_j}` of the right factor past the `U_k^{r_k}` with `k > j` gives
//!
//! ```text
//! U^r U^s = exp(2 pi i sum_{k>j} theta_kj r_k s_j) U^{r+s}.
//! ```

use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A point of the integer lattice `Z^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode(SmallVec<[i64; 4]>);

impl Mode {
    pub fn new(coords: &[i64]) -> Self {
        Mode(SmallVec::from_slice(coords))
    }

    pub fn zero(n: usize) -> Self {
        Mode(SmallVec::from_elem(0, n))
    }

    /// The `j`-th unit vector.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[j] = 1;
        m
    }

    /// `(k, ..., k)`.
    pub fn diagonal(n: usize, k: i64) -> Self {
        Mode(SmallVec::from_elem(k, n))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Mode) -> Mode {
        Mode(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Mode) -> Mode {
        Mode(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Mode {
        Mode(self.0.iter().map(|a| -a).collect())
    }

    /// `|m|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|&c| (c * c) as f64).sum()
    }

    /// `max_j |m_j|`.
    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl From<Vec<i64>> for Mode {
    fn from(v: Vec<i64>) -> Self {
        Mode(SmallVec::from_vec(v))
    }
}

/// Real skew-symmetric deformation matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ThetaMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "dimension must be at least 1"));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        for j in 0..n {
            for k in 0..n {
                let a = entries[j * n + k];
                if !a.is_finite() || a != -entries[k * n + j] {
                    return Err(Error::NotSkewSymmetric { row: j, col: k });
                }
            }
        }
        Ok(ThetaMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    /// The classical torus.
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        ThetaMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Skew matrix with `theta_kj = frac((k - j) * phi)` below the diagonal,
    /// `phi` the golden ratio.
    pub fn golden(n: usize) -> Self {
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        let mut entries = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..k {
                let v = ((k - j) as f64 * phi).fract();
                entries[k * n + j] = v;
                entries[j * n + k] = -v;
            }
        }
        ThetaMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// Coefficients `c_j(r) = sum_{k>j} theta_kj r_k`, so that the cocycle
    /// phase is linear in the right factor: `omega(r, s) = e(c(r) . s)`.
    pub(crate) fn phase_row(&self, r: &[i64]) -> SmallVec<[f64; 4]> {
        let n = self.n;
        (0..n)
            .map(|j| {
                (j + 1..n)
                    .map(|k| self.entries[k * n + j] * r[k] as f64)
                    .sum()
            })
            .collect()
    }
}

/// `e^{2 pi i x}` with the argument reduced mod 1 first.
pub fn unit_phase(x: f64) -> Complex64 {
    let frac = x - x.floor();
    let (s, c) = (std::f64::consts::TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// The scalar `omega_theta(r, s)` with `U^r U^s = omega_theta(r, s) U^{r+s}`.
pub fn cocycle(theta: &ThetaMatrix, r: &Mode, s: &Mode) -> Result<Complex64> {
    let n = theta.dim();
    for m in [r, s] {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
    }
    Ok(cocycle_unchecked(theta, r.coords(), s.coords()))
}

pub(crate) fn cocycle_unchecked(theta: &ThetaMatrix, r: &[i64], s: &[i64]) -> Complex64 {
    let n = theta.dim();
    let mut x = 0.0;
    for k in 1..n {
        if r[k] == 0 {
            continue;
        }
        for j in 0..k {
            x += theta.get(k, j) * (r[k] * s[j]) as f64;
        }
    }
    if x == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        unit_phase(x)
    }
}

/// The box `{m : max_j |m_j| <= radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    pub n: usize,
    pub radius: i64,
}

impl LatticeBox {
    pub fn new(n: usize, radius: i64) -> Self {
        assert!(radius >= 0, "box radius must be nonnegative");
        LatticeBox { n, radius }
    }

    pub fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    pub fn cardinality(&self) -> usize {
        self.side().pow(self.n as u32)
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.iter().all(|c| c.abs() <= self.radius)
    }

    /// Row-major position of `m` (first coordinate slowest).
    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        if !self.contains(m) {
            return None;
        }
        let side = self.side();
        Some(
            m.iter()
                .fold(0usize, |acc, &c| acc * side + (c + self.radius) as usize),
        )
    }

    pub fn mode_at(&self, mut index: usize) -> Mode {
        let side = self.side();
        let mut coords = vec![0i64; self.n];
        for c in coords.iter_mut().rev() {
            *c = (index % side) as i64 - self.radius;
            index /= side;
        }
        Mode::from(coords)
    }

    /// All points in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.cardinality()).map(move |i| self.mode_at(i))
    }
}

/// A multi-index `alpha in N_0^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: &[u32]) -> Self {
        MultiIndex(entries.to_vec())
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `alpha = order * e_j`.
    pub fn axis(n: usize, j: usize, order: u32) -> Self {
        let mut v = vec![0; n];
        v[j] = order;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|alpha|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `m^alpha` as a float.
    pub fn monomial(&self, m: &[i64]) -> f64 {
        self.0
            .iter()
            .zip(m)
            .map(|(&a, &c)| (c as f64).powi(a as i32))
            .product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// The set `I_k = {alpha : |alpha| = k}` in lexicographically decreasing order.
    pub fn enumerate(n: usize, k: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(k);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=k).rev() {
                prefix.push(first);
                rec(n, k - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, k, &mut Vec::with_capacity(n), &mut out);
        }
        out
    }

    /// `N_{k,n} = binom(n + k - 1, k)`.
    pub fn count(n: usize, k: u32) -> usize {
        let (top, k) = (n as u64 + k as u64 - 1, k as u64);
        let mut c: u64 = 1;
        for i in 0..k {
            c = c * (top - i) / (i + 1);
        }
        c as usize
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Normal-orders a word in the generators (`+j` is `U_j`, `-j` is
    /// `U_j^{-1}`, 1-based) by adjacent swaps, tracking the accumulated phase.
    fn reorder_word(theta: &ThetaMatrix, word: &[i32]) -> (f64, Vec<i64>) {
        let mut w = word.to_vec();
        let mut phase = 0.0;
        loop {
            let mut swapped = false;
            for i in 0..w.len().saturating_sub(1) {
                let (a, b) = (w[i], w[i + 1]);
                let (ka, kb) = (a.unsigned_abs() as usize - 1, b.unsigned_abs() as usize - 1);
                if ka > kb {
                    // U_k^{e} U_j^{f} = e^{2 pi i theta_kj e f} U_j^{f} U_k^{e}
                    let e = a.signum() as f64;
                    let f = b.signum() as f64;
                    phase += theta.get(ka, kb) * e * f;
                    w.swap(i, i + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        let mut m = vec![0i64; theta.dim()];
        for g in w {
            m[g.unsigned_abs() as usize - 1] += g.signum() as i64;
        }
        (phase, m)
    }

    fn word_of(m: &[i64]) -> Vec<i32> {
        let mut w = Vec::new();
        for (j, &c) in m.iter().enumerate() {
            let g = (j + 1) as i32;
            for _ in 0..c.abs() {
                w.push(if c > 0 { g } else { -g });
            }
        }
        w
    }

    #[test]
    fn classical_torus_cocycle_is_one() {
        let theta = ThetaMatrix::zero(3);
        let r = Mode::new(&[2, -1, 4]);
        let s = Mode::new(&[-3, 5, 1]);
        assert_eq!(cocycle(&theta, &r, &s).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn single_swap_examples() {
        let v = 0.3719;
        let theta = ThetaMatrix::from_rows(&[vec![0.0, -v], vec![v, 0.0]]).unwrap();
        let w = cocycle(&theta, &Mode::new(&[0, 1]), &Mode::new(&[1, 0])).unwrap();
        assert!((w - unit_phase(v)).norm() < 1e-15);
        let w = cocycle(&theta, &Mode::new(&[1, 0]), &Mode::new(&[0, 1])).unwrap();
        assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_symbolic_reordering() {
        let theta = ThetaMatrix::golden(3);
        let bx = LatticeBox::new(3, 1);
        for r in bx.iter() {
            for s in bx.iter() {
                let mut word = word_of(r.coords());
                word.extend(word_of(s.coords()));
                if word.len() > 6 {
                    continue;
                }
                let (phase, m) = reorder_word(&theta, &word);
                assert_eq!(m, r.add(&s).coords());
                let w = cocycle(&theta, &r, &s).unwrap();
                assert!((w - unit_phase(phase)).norm() < 1e-14, "{r:?} {s:?}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let theta = ThetaMatrix::zero(2);
        assert!(cocycle(&theta, &Mode::new(&[1]), &Mode::new(&[1, 0])).is_err());
    }

    #[test]
    fn skew_symmetry_enforced() {
        assert!(ThetaMatrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).is_err());
        assert!(ThetaMatrix::from_rows(&[vec![0.1, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(ThetaMatrix::new(0, vec![]).is_err());
    }

    #[test]
    fn box_indexing_round_trips() {
        let bx = LatticeBox::new(2, 3);
        assert_eq!(bx.cardinality(), 49);
        for (i, m) in bx.iter().enumerate() {
            assert_eq!(bx.index_of(m.coords()), Some(i));
        }
        assert_eq!(bx.index_of(&[4, 0]), None);
    }

    #[test]
    fn multi_index_enumeration_counts() {
        for n in 1..5 {
            for k in 0..6 {
                let set = MultiIndex::enumerate(n, k);
                assert_eq!(set.len(), MultiIndex::count(n, k));
                assert!(set.iter().all(|a| a.order() == k));
            }
        }
        assert_eq!(MultiIndex::enumerate(2, 2).len(), 3);
    }
}
