//! Exact rational and integer linear algebra.
//!
//! Everything here works over `BigInt`/`BigRational`; there is no floating
//! point in the crate.  Lattices are kept in column Hermite normal form and
//! subspaces in reduced row echelon form, so both compare by value.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("inconsistent dimensions: {0}")]
    InconsistentDimensions(String),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(int(x))).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn to_int_vec(v: &[Rat]) -> Option<Vec<Int>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

/// Reduce every coordinate into `[0, 1)`.
pub fn frac_vec(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| x - x.floor()).collect()
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn vec_scale(a: &[Rat], s: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x * s).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn ints_to_rats(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_int).collect()
}

fn lcm_of_denominators<'a>(it: impl Iterator<Item = &'a Rat>) -> Int {
    it.fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scale a rational vector to a primitive integer vector with the same direction
/// (first nonzero coordinate positive).
pub fn primitive_direction(v: &[Rat]) -> Vec<Int> {
    let l = lcm_of_denominators(v.iter());
    let mut w: Vec<Int> = v.iter().map(|x| (x * rat_int(&l)).to_integer()).collect();
    let g = w.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in w.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = w.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in w.iter_mut() {
                *x = -&*x;
            }
        }
    }
    w
}

fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_rat_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(","))
}

pub fn fmt_int_vec(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

// ---------------------------------------------------------------------------
// Integer matrices

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        IntMat {
            rows,
            cols,
            data: data.iter().map(|&x| int(x)).collect(),
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let flat: Vec<i64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self::from_i64(r, c, &flat)
    }

    /// Build an `n x cols.len()` matrix from column vectors.
    pub fn from_columns(n: usize, cols: &[Vec<Int>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for i in 0..n {
                m.data[i * cols.len() + j] = c[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn mul_rat_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc += &v[j] * rat_int(a);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(rat_int).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn det(&self) -> Int {
        self.to_rat().det().to_integer()
    }

    pub fn neg(&self) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> IntMat {
        let k = Int::from(k);
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * &k).collect(),
        }
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        self.add(&other.neg())
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<IntMat> {
        let inv = self.to_rat().inverse().ok()?;
        inv.to_int()
    }

    /// Multiplicative order of a finite-order square matrix, up to `limit`.
    pub fn order(&self, limit: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=limit {
            if p.is_identity() {
                return Some(k);
            }
            p = p.mul(self);
        }
        None
    }

    /// Stack matrices with the same row count side by side.
    pub fn hstack(parts: &[IntMat]) -> IntMat {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = IntMat::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack rows");
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, off + j, m.get(i, j).clone());
                }
            }
            off += m.cols;
        }
        out
    }

    /// Stack matrices with the same column count vertically.
    pub fn vstack(parts: &[IntMat]) -> IntMat {
        let cols = parts.first().map_or(0, |m| m.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack cols");
            data.extend(m.data.iter().cloned());
            rows += m.rows;
        }
        IntMat { rows, cols, data }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// col[dst] -= k * col[src]
    fn sub_col_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * k;
            self.data[i * self.cols + dst] -= v;
        }
    }

    /// row[dst] -= k * row[src]
    fn sub_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * k;
            self.data[dst * self.cols + j] -= v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Rational matrices

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntMat::identity(n).to_rat()
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        RatMat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_columns(n: usize, cols: &[Vec<Rat>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for i in 0..n {
                m.set(i, j, c[i].clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Integer matrix if every entry is integral.
    pub fn to_int(&self) -> Option<IntMat> {
        let data: Option<Vec<Int>> = self
            .data
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect();
        data.map(|data| IntMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(r, j) * &f;
                    m.data[i * m.cols + j] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                let f = m.get(i, c) / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(c, j) * &f;
                    m.data[i * n + j] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<RatMat, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::InconsistentDimensions(
                "inverse of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut aug = RatMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinAlgError::Singular);
        }
        let mut inv = RatMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn vstack(parts: &[RatMat]) -> RatMat {
        let cols = parts.first().map_or(0, |m| m.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack cols");
            data.extend(m.data.iter().cloned());
            rows += m.rows;
        }
        RatMat { rows, cols, data }
    }
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(fmt_rat).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Normal forms

/// Column Hermite normal form: returns `(h, u)` with `h = m * u`, `u` unimodular.
///
/// The nonzero columns of `h` come first; their pivots (first nonzero row)
/// strictly increase, are positive, and every entry to the left of a pivot in
/// its row lies in `[0, pivot)`.
pub fn hnf(m: &IntMat) -> (IntMat, IntMat) {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.cols());
    let mut c = 0;
    for i in 0..h.rows() {
        if c == h.cols() {
            break;
        }
        loop {
            // smallest nonzero |entry| of row i among columns c..
            let best = (c..h.cols())
                .filter(|&j| !h.get(i, j).is_zero())
                .min_by(|&a, &b| h.get(i, a).abs().cmp(&h.get(i, b).abs()));
            let Some(best) = best else { break };
            h.swap_cols(c, best);
            u.swap_cols(c, best);
            let mut done = true;
            for j in c + 1..h.cols() {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(h.get(i, c));
                h.sub_col_multiple(j, c, &q);
                u.sub_col_multiple(j, c, &q);
                if !h.get(i, j).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(i, c).is_zero() {
            continue;
        }
        if h.get(i, c).is_negative() {
            h.negate_col(c);
            u.negate_col(c);
        }
        for k in 0..c {
            let q = h.get(i, k).div_floor(h.get(i, c));
            h.sub_col_multiple(k, c, &q);
            u.sub_col_multiple(k, c, &q);
        }
        c += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(d, l, r)` with `d = l * m * r`, `l` and `r`
/// unimodular, `d` diagonal with nonnegative entries `d1 | d2 | ...`.
pub fn snf(m: &IntMat) -> (IntMat, IntMat, IntMat) {
    let mut a = m.clone();
    let mut l = IntMat::identity(m.rows());
    let mut r = IntMat::identity(m.cols());
    let (rows, cols) = (a.rows(), a.cols());
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = a.get(i, j);
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return (a, l, r);
            };
            a.swap_rows(t, bi);
            l.swap_rows(t, bi);
            a.swap_cols(t, bj);
            r.swap_cols(t, bj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = a.get(i, t).div_floor(a.get(t, t));
                a.sub_row_multiple(i, t, &q);
                l.sub_row_multiple(i, t, &q);
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = a.get(t, j).div_floor(a.get(t, t));
                a.sub_col_multiple(j, t, &q);
                r.sub_col_multiple(j, t, &q);
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let piv = a.get(t, t).clone();
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    // row t += row i
                    let minus_one = -Int::one();
                    a.sub_row_multiple(t, i, &minus_one);
                    l.sub_row_multiple(t, i, &minus_one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            l.negate_row(t);
        }
    }
    (a, l, r)
}

// ---------------------------------------------------------------------------
// Gram forms

/// A symmetric positive-definite rational bilinear form in lattice coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GramForm {
    gram: RatMat,
}

impl GramForm {
    pub fn new(gram: RatMat) -> Result<Self, LinAlgError> {
        if gram.rows() != gram.cols() {
            return Err(LinAlgError::InconsistentDimensions(
                "gram must be square".into(),
            ));
        }
        if !gram.is_symmetric() {
            return Err(LinAlgError::NotSymmetric);
        }
        let n = gram.rows();
        for k in 1..=n {
            let mut minor = RatMat::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    minor.set(i, j, gram.get(i, j).clone());
                }
            }
            if !minor.det().is_positive() {
                return Err(LinAlgError::NotPositiveDefinite);
            }
        }
        Ok(GramForm { gram })
    }

    pub fn identity(n: usize) -> Self {
        GramForm {
            gram: RatMat::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn matrix(&self) -> &RatMat {
        &self.gram
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    /// `P^T g P == g`
    pub fn preserved_by(&self, p: &IntMat) -> bool {
        let pr = p.to_rat();
        pr.transpose().mul(&self.gram).mul(&pr) == self.gram
    }

    /// The form in the basis given by the columns of `basis`.
    pub fn transport(&self, basis: &RatMat) -> Result<GramForm, LinAlgError> {
        GramForm::new(basis.transpose().mul(&self.gram).mul(basis))
    }
}

// ---------------------------------------------------------------------------
// Subspaces

/// A rational subspace of `Q^n`, stored by the rows of its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient: n,
            rows: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self::span(n, &RatMat::identity(n).columns())
    }

    pub fn span(n: usize, vectors: &[Vec<Rat>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(n);
        }
        let m = RatMat::from_rows(vectors);
        assert_eq!(m.cols(), n, "vector length");
        let (r, pivots) = m.rref();
        Subspace {
            ambient: n,
            rows: (0..pivots.len()).map(|i| r.row(i)).collect(),
        }
    }

    pub fn span_int(n: usize, vectors: &[Vec<Int>]) -> Self {
        let v: Vec<Vec<Rat>> = vectors.iter().map(|x| ints_to_rats(x)).collect();
        Self::span(n, &v)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    /// Basis scaled to primitive integer vectors.
    pub fn integer_basis(&self) -> Vec<Vec<Int>> {
        self.rows.iter().map(|r| primitive_direction(r)).collect()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if is_zero_vec(v) {
            return true;
        }
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        RatMat::from_rows(&rows).rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Integer matrix `W` with `W x = 0` exactly for `x` in the subspace.
    pub fn annihilator(&self) -> IntMat {
        let n = self.ambient;
        let ker = if self.rows.is_empty() {
            RatMat::identity(n).columns()
        } else {
            RatMat::from_rows(&self.rows).kernel()
        };
        let rows: Vec<Vec<Int>> = ker.iter().map(|v| primitive_direction(v)).collect();
        if rows.is_empty() {
            return IntMat::zeros(0, n);
        }
        IntMat::from_columns(n, &rows).transpose()
    }

    /// `P V = V`
    pub fn is_invariant_under(&self, p: &IntMat) -> bool {
        let pr = p.to_rat();
        self.rows.iter().all(|v| self.contains(&pr.mul_vec(v)))
    }

    /// Every vector of the subspace is fixed by `p`.
    pub fn is_fixed_by(&self, p: &IntMat) -> bool {
        let pr = p.to_rat();
        self.rows.iter().all(|v| &pr.mul_vec(v) == v)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.rows.clone();
        v.extend(other.rows.iter().cloned());
        Subspace::span(self.ambient, &v)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // x in both  <=>  annihilators of both vanish on x
        let a = self.annihilator();
        let b = other.annihilator();
        let stacked = IntMat::vstack(&[a, b]);
        if stacked.rows() == 0 {
            return Subspace::full(self.ambient);
        }
        Subspace::span(self.ambient, &stacked.to_rat().kernel())
    }

    /// Basis vectors as the columns of an `n x dim` matrix.
    pub fn basis_matrix(&self) -> RatMat {
        RatMat::from_columns(self.ambient, &self.rows)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .integer_basis()
            .iter()
            .map(|v| fmt_int_vec(v))
            .collect();
        write!(f, "span{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Gram-orthogonal complement `{x : x^T g v = 0 for all v in V}`.
pub fn orth_complement(v: &Subspace, g: &GramForm) -> Subspace {
    let n = v.ambient();
    if v.dim() == 0 {
        return Subspace::full(n);
    }
    let vg = RatMat::from_rows(v.basis()).mul(g.matrix());
    Subspace::span(n, &vg.kernel())
}

// ---------------------------------------------------------------------------
// Lattices

/// A sublattice of `Z^n`, kept as the nonzero columns of its column HNF.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntLattice {
    ambient: usize,
    basis: IntMat,
}

impl IntLattice {
    pub fn standard(n: usize) -> Self {
        IntLattice {
            ambient: n,
            basis: IntMat::identity(n),
        }
    }

    pub fn zero(n: usize) -> Self {
        IntLattice {
            ambient: n,
            basis: IntMat::zeros(n, 0),
        }
    }

    pub fn from_generators(n: usize, gens: &[Vec<Int>]) -> Self {
        if gens.is_empty() {
            return Self::zero(n);
        }
        let (h, _) = hnf(&IntMat::from_columns(n, gens));
        let nonzero: Vec<Vec<Int>> = h
            .columns()
            .into_iter()
            .filter(|c| c.iter().any(|x| !x.is_zero()))
            .collect();
        IntLattice {
            ambient: n,
            basis: IntMat::from_columns(n, &nonzero),
        }
    }

    pub fn from_matrix(m: &IntMat) -> Self {
        Self::from_generators(m.rows(), &m.columns())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn generators(&self) -> Vec<Vec<Int>> {
        self.basis.columns()
    }

    pub fn span(&self) -> Subspace {
        Subspace::span_int(self.ambient, &self.generators())
    }

    pub fn sum(&self, other: &IntLattice) -> IntLattice {
        let mut g = self.generators();
        g.extend(other.generators());
        IntLattice::from_generators(self.ambient, &g)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_int(&self, v: &[Int]) -> bool {
        self.contains(&ints_to_rats(v))
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.generators().iter().all(|g| self.contains_int(g))
    }

    /// Canonical representative of `v + L`: every pivot coordinate lands in `[0, pivot)`.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut out = v.to_vec();
        for j in 0..self.rank() {
            let p = (0..self.ambient)
                .find(|&i| !self.basis.get(i, j).is_zero())
                .unwrap();
            let piv = rat_int(self.basis.get(p, j));
            let q = (&out[p] / &piv).floor();
            if q.is_zero() {
                continue;
            }
            for i in 0..self.ambient {
                let b = self.basis.get(i, j);
                if !b.is_zero() {
                    out[i] -= &q * rat_int(b);
                }
            }
        }
        out
    }

    /// `[Z^n : L]` for a full-rank lattice.
    pub fn index(&self) -> Option<Int> {
        (self.rank() == self.ambient).then(|| self.basis.det().abs())
    }

    /// Image under an integer matrix.
    pub fn image(&self, p: &IntMat) -> IntLattice {
        let g: Vec<Vec<Int>> = self.generators().iter().map(|v| p.mul_vec(v)).collect();
        IntLattice::from_generators(p.rows(), &g)
    }
}

impl fmt::Debug for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators().iter().map(|v| fmt_int_vec(v)).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

impl fmt::Display for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Integer kernel `{x in Z^cols : m x = 0}` as a lattice.
pub fn integer_kernel(m: &IntMat) -> IntLattice {
    let (h, u) = hnf(m);
    let zero_cols: Vec<Vec<Int>> = (0..h.cols())
        .filter(|&j| h.col(j).iter().all(Zero::is_zero))
        .map(|j| u.col(j))
        .collect();
    IntLattice::from_generators(m.cols(), &zero_cols)
}

/// `{x in L : x in V}`
pub fn lattice_intersect_subspace(l: &IntLattice, v: &Subspace) -> IntLattice {
    assert_eq!(l.ambient(), v.ambient(), "ambient dimensions");
    let w = v.annihilator();
    if w.rows() == 0 {
        return l.clone();
    }
    if l.rank() == 0 {
        return l.clone();
    }
    let k = integer_kernel(&w.mul(l.basis()));
    let gens: Vec<Vec<Int>> = k
        .generators()
        .iter()
        .map(|c| l.basis().mul_vec(c))
        .collect();
    IntLattice::from_generators(l.ambient(), &gens)
}

/// Decide whether `a x = b` has a solution `x` in the lattice `moduli`, and return one.
pub fn solve_integer_affine(
    a: &IntMat,
    b: &[Rat],
    moduli: &IntLattice,
) -> Result<Option<Vec<Int>>, LinAlgError> {
    if a.cols() != moduli.ambient() || a.rows() != b.len() {
        return Err(LinAlgError::InconsistentDimensions(format!(
            "system is {}x{}, right-hand side {}, lattice ambient {}",
            a.rows(),
            a.cols(),
            b.len(),
            moduli.ambient()
        )));
    }
    let n = moduli.ambient();
    if moduli.rank() == 0 {
        return Ok(is_zero_vec(b).then(|| vec![Int::zero(); n]));
    }
    let a2 = a.mul(moduli.basis());
    let (d, l, r) = snf(&a2);
    let c = l.mul_rat_vec(b);
    let k = a2.cols();
    let mut y = vec![Int::zero(); k];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < k {
            d.get(i, i).clone()
        } else {
            Int::zero()
        };
        if di.is_zero() {
            if !ci.is_zero() {
                return Ok(None);
            }
        } else {
            let q = ci / rat_int(&di);
            if !q.is_integer() {
                return Ok(None);
            }
            y[i] = q.to_integer();
        }
    }
    let mu = r.mul_vec(&y);
    Ok(Some(moduli.basis().mul_vec(&mu)))
}

/// As [`solve_integer_affine`] with rational coefficients; rows are cleared of
/// denominators first.
pub fn solve_integer_affine_rat(
    a: &RatMat,
    b: &[Rat],
    moduli: &IntLattice,
) -> Result<Option<Vec<Int>>, LinAlgError> {
    if a.rows() != b.len() {
        return Err(LinAlgError::InconsistentDimensions(
            "right-hand side length".into(),
        ));
    }
    let mut ai = IntMat::zeros(a.rows(), a.cols());
    let mut bi = Vec::with_capacity(b.len());
    for i in 0..a.rows() {
        let row = a.row(i);
        let l = rat_int(&lcm_of_denominators(row.iter()));
        for (j, x) in row.iter().enumerate() {
            ai.set(i, j, (x * &l).to_integer());
        }
        bi.push(&b[i] * &l);
    }
    solve_integer_affine(&ai, &bi, moduli)
}

/// Basis (as columns of a square matrix) of the lattice generated by rational vectors.
/// Returns `None` if the vectors do not span `Q^n`.
pub fn rational_lattice_basis(n: usize, gens: &[Vec<Rat>]) -> Option<RatMat> {
    let l = lcm_of_denominators(gens.iter().flatten());
    let lr = rat_int(&l);
    let ints: Vec<Vec<Int>> = gens
        .iter()
        .map(|g| g.iter().map(|x| (x * &lr).to_integer()).collect())
        .collect();
    let lat = IntLattice::from_generators(n, &ints);
    if lat.rank() != n {
        return None;
    }
    let cols: Vec<Vec<Rat>> = lat
        .generators()
        .iter()
        .map(|c| c.iter().map(|x| rat_int(x) / &lr).collect())
        .collect();
    Some(RatMat::from_columns(n, &cols))
}

pub fn to_u64(x: &Int) -> Option<u64> {
    x.to_u64()
}
