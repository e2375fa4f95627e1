//! Exact dense linear algebra over arbitrary-precision integers.
//!
//! Entries are stored as `BigInt`. Every operation first tries a machine-word
//! route (`i64`/`i128`) when the operand bounds prove it cannot overflow, and
//! otherwise runs on `BigInt`; results are identical either way.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactVector {
    entries: Vec<BigInt>,
}

impl ExactVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        Self { entries }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Self { entries: entries.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn zeros(len: usize) -> Self {
        Self { entries: vec![BigInt::zero(); len] }
    }

    /// The all-one vector.
    pub fn ones(len: usize) -> Self {
        Self { entries: vec![BigInt::one(); len] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &BigInt {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        Self { entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Display for ExactVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(BigInt::from(f(r, c)));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("ragged rows".into()));
        }
        Ok(Self::from_fn(rows.len(), cols, |r, c| rows[r][c]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| i64::from(r == c))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> ExactVector {
        ExactVector::new(self.entries[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// `self − λ·I`.
    pub fn shifted(&self, lambda: &BigInt) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Domain("shift of a non-square matrix".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.entries[i * self.cols + i] -= lambda;
        }
        Ok(out)
    }

    /// A copy with `v` appended as a final row.
    pub fn with_row(&self, v: &ExactVector) -> Result<Self> {
        if v.len() != self.cols {
            return Err(Error::Domain(format!(
                "row of length {} for a matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.entries.len() + self.cols);
        entries.extend_from_slice(&self.entries);
        entries.extend_from_slice(v.entries());
        Ok(Self { rows: self.rows + 1, cols: self.cols, entries })
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    fn small(&self) -> Option<(Vec<i64>, u64)> {
        small_entries(&self.entries)
    }
}

fn small_entries(xs: &[BigInt]) -> Option<(Vec<i64>, u64)> {
    let mut max = 0u64;
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        let v = x.to_i64()?;
        max = max.max(v.unsigned_abs());
        out.push(v);
    }
    Some((out, max))
}

/// Upper bound on |Σ a_i b_i| over `len` terms.
fn product_bound(max_a: u64, max_b: u64, len: usize) -> u128 {
    (max_a as u128)
        .saturating_mul(max_b as u128)
        .saturating_mul(len.max(1) as u128)
}

pub fn dot(u: &ExactVector, v: &ExactVector) -> Result<BigInt> {
    if u.len() != v.len() {
        return Err(Error::Domain(format!("dot of lengths {} and {}", u.len(), v.len())));
    }
    if let (Some((a, ma)), Some((b, mb))) = (small_entries(&u.entries), small_entries(&v.entries)) {
        if product_bound(ma, mb, a.len()) <= i128::MAX as u128 {
            let s: i128 = a.iter().zip(&b).map(|(&x, &y)| x as i128 * y as i128).sum();
            return Ok(BigInt::from(s));
        }
    }
    Ok(u.entries.iter().zip(&v.entries).map(|(x, y)| x * y).sum())
}

pub fn mat_vec(m: &ExactMatrix, v: &ExactVector) -> Result<ExactVector> {
    if v.len() != m.cols {
        return Err(Error::Domain(format!(
            "{}x{} matrix times vector of length {}",
            m.rows,
            m.cols,
            v.len()
        )));
    }
    if let (Some((a, ma)), Some((b, mb))) = (m.small(), small_entries(&v.entries)) {
        if product_bound(ma, mb, m.cols) <= i128::MAX as u128 {
            let out = a
                .chunks(m.cols.max(1))
                .take(m.rows)
                .map(|row| {
                    let s: i128 = row.iter().zip(&b).map(|(&x, &y)| x as i128 * y as i128).sum();
                    BigInt::from(s)
                })
                .collect();
            return Ok(ExactVector::new(out));
        }
    }
    let out = (0..m.rows)
        .map(|r| {
            m.entries[r * m.cols..(r + 1) * m.cols]
                .iter()
                .zip(&v.entries)
                .map(|(x, y)| x * y)
                .sum()
        })
        .collect();
    Ok(ExactVector::new(out))
}

pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    if a.cols != b.rows {
        return Err(Error::Domain(format!(
            "product of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (n, m, p) = (a.rows, a.cols, b.cols);
    if let (Some((sa, ma)), Some((sb, mb))) = (a.small(), b.small()) {
        let bound = product_bound(ma, mb, m);
        if bound <= i64::MAX as u128 {
            let mut out = vec![0i64; n * p];
            for i in 0..n {
                let acc = &mut out[i * p..(i + 1) * p];
                for t in 0..m {
                    let x = sa[i * m + t];
                    if x == 0 {
                        continue;
                    }
                    for (o, &y) in acc.iter_mut().zip(&sb[t * p..(t + 1) * p]) {
                        *o += x * y;
                    }
                }
            }
            return ExactMatrix::new(n, p, out.into_iter().map(BigInt::from).collect());
        }
        if bound <= i128::MAX as u128 {
            let mut out = vec![0i128; n * p];
            for i in 0..n {
                let acc = &mut out[i * p..(i + 1) * p];
                for t in 0..m {
                    let x = sa[i * m + t] as i128;
                    if x == 0 {
                        continue;
                    }
                    for (o, &y) in acc.iter_mut().zip(&sb[t * p..(t + 1) * p]) {
                        *o += x * y as i128;
                    }
                }
            }
            return ExactMatrix::new(n, p, out.into_iter().map(BigInt::from).collect());
        }
    }
    let mut out = vec![BigInt::zero(); n * p];
    for i in 0..n {
        for t in 0..m {
            let x = &a.entries[i * m + t];
            if x.is_zero() {
                continue;
            }
            for j in 0..p {
                out[i * p + j] += x * &b.entries[t * p + j];
            }
        }
    }
    ExactMatrix::new(n, p, out)
}

trait ElimScalar: Clone {
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    /// (a·b − c·d) / e, where the division is known to be exact.
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self>;
}

impl ElimScalar for i128 {
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self> {
        let num = a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)?;
        debug_assert_eq!(num % e, 0);
        Some(num / e)
    }
}

impl ElimScalar for BigInt {
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self> {
        let num = a * b - c * d;
        if e.is_one() {
            Some(num)
        } else {
            debug_assert!(Zero::is_zero(&(&num % e)));
            Some(num / e)
        }
    }
}

/// Fraction-free (Bareiss) elimination in place. With `reduced`, rows above
/// each pivot are cleared too, giving a fraction-free reduced echelon form
/// in which every pivot entry equals the last pivot. Returns the pivot
/// columns (pivot `i` sits in row `i`), or `None` if a checked scalar
/// overflowed.
fn eliminate<T: ElimScalar>(a: &mut [T], rows: usize, cols: usize, reduced: bool) -> Option<Vec<usize>> {
    let mut prev = T::unit();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_nil()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let piv = a[r * cols + c].clone();
        let (head, tail) = a.split_at_mut(r * cols);
        let (pivot_row, below) = tail.split_at_mut(cols);
        for row in below.chunks_mut(cols) {
            let f = row[c].clone();
            for j in c..cols {
                row[j] = T::cross(&piv, &row[j], &f, &pivot_row[j], &prev)?;
            }
        }
        if reduced {
            for row in head.chunks_mut(cols) {
                let f = row[c].clone();
                for j in 0..cols {
                    row[j] = T::cross(&piv, &row[j], &f, &pivot_row[j], &prev)?;
                }
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    Some(pivots)
}

enum Echelon {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

fn echelon(m: &ExactMatrix, reduced: bool) -> (Echelon, Vec<usize>) {
    if let Some(mut a) = m.entries.iter().map(ToPrimitive::to_i128).collect::<Option<Vec<_>>>() {
        if let Some(p) = eliminate(&mut a, m.rows, m.cols, reduced) {
            return (Echelon::Small(a), p);
        }
    }
    let mut a = m.entries.clone();
    let p = eliminate(&mut a, m.rows, m.cols, reduced).expect("BigInt elimination cannot overflow");
    (Echelon::Big(a), p)
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank_exact(m: &ExactMatrix) -> usize {
    echelon(m, false).1.len()
}

/// Integer basis of the right null space over the rationals, one vector per
/// non-pivot column in increasing column order. Each vector has content 1
/// and a positive first nonzero entry.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<ExactVector> {
    let (ech, pivots) = echelon(m, true);
    let a: Vec<BigInt> = match ech {
        Echelon::Small(a) => a.into_iter().map(BigInt::from).collect(),
        Echelon::Big(a) => a,
    };
    let cols = m.cols;
    let d = pivots
        .last()
        .map_or_else(BigInt::one, |&c| a[(pivots.len() - 1) * cols + c].clone());
    debug_assert!(pivots.iter().enumerate().all(|(i, &c)| a[i * cols + c] == d));
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![BigInt::zero(); cols];
            x[f] = d.clone();
            for (i, &c) in pivots.iter().enumerate() {
                x[c] = -a[i * cols + f].clone();
            }
            normalize(&mut x);
            ExactVector::new(x)
        })
        .collect()
}

fn normalize(x: &mut [BigInt]) {
    let g = x.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return;
    }
    let negate = x.iter().find(|v| !v.is_zero()).is_some_and(Signed::is_negative);
    for v in x.iter_mut() {
        *v = &*v / &g;
        if negate {
            *v = -&*v;
        }
    }
}

/// True iff `v` is a rational combination of the rows of `m`, decided as
/// rank(m) = rank(m with v appended).
pub fn in_row_space(m: &ExactMatrix, v: &ExactVector) -> Result<bool> {
    let extended = m.with_row(v)?;
    Ok(rank_exact(m) == rank_exact(&extended))
}

/// Rank over GF(p) for a prime `p < 2^32`. Any nonzero minor mod p is a
/// nonzero integer minor, so this is a lower bound on [`rank_exact`].
pub fn rank_mod_prime(m: &ExactMatrix, p: u64) -> usize {
    assert!(p > 1 && p < 1 << 32, "modulus must fit in 32 bits");
    let (rows, cols) = (m.rows, m.cols);
    let bp = BigInt::from(p);
    let mut a: Vec<u64> = m
        .entries
        .iter()
        .map(|x| match x.to_i64() {
            Some(v) => v.rem_euclid(p as i64) as u64,
            None => x.mod_floor(&bp).to_u64().expect("residue fits"),
        })
        .collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = pow_mod(a[r * cols + c], p - 2, p);
        for j in c..cols {
            a[r * cols + j] = a[r * cols + j] * inv % p;
        }
        let (top, below) = a.split_at_mut((r + 1) * cols);
        let pivot_row = &top[r * cols..];
        for row in below.chunks_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for j in c..cols {
                row[j] = (row[j] + nf * pivot_row[j]) % p;
            }
        }
        r += 1;
    }
    r
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}
