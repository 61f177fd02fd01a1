//! Vectors and subspaces of F_p^k in reduced row echelon form.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const MAX_PRIME: u32 = 251;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FpError {
    #[error("{0} is not a prime in 2..={MAX_PRIME}")]
    BadPrime(u32),
    #[error("ambient mismatch: F_{p1}^{k1} vs F_{p2}^{k2}")]
    Mismatch { p1: u32, k1: usize, p2: u32, k2: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn check_prime(p: u32) -> Result<(), FpError> {
    if p <= MAX_PRIME && is_prime(p) {
        Ok(())
    } else {
        Err(FpError::BadPrime(p))
    }
}

fn mul(p: u32, a: u32, b: u32) -> u32 {
    a * b % p
}

pub(crate) fn inv(p: u32, a: u32) -> u32 {
    assert!(!a.is_multiple_of(p), "zero has no inverse");
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(p, acc, base);
        }
        base = mul(p, base, base);
        e >>= 1;
    }
    acc
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVector {
    p: u32,
    coords: Vec<u32>,
}

impl FpVector {
    /// Reduces every coordinate mod `p`.
    pub fn new(p: u32, coords: impl IntoIterator<Item = i64>) -> Result<Self, FpError> {
        check_prime(p)?;
        let coords = coords.into_iter().map(|c| c.rem_euclid(p as i64) as u32).collect();
        Ok(FpVector { p, coords })
    }

    pub(crate) fn raw(p: u32, coords: Vec<u32>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < p));
        FpVector { p, coords }
    }

    pub fn zero(p: u32, k: usize) -> Self {
        FpVector { p, coords: vec![0; k] }
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn unit(p: u32, k: usize, i: usize) -> Self {
        let mut v = Self::zero(p, k);
        v.coords[i] = 1;
        v
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FpVector) -> FpVector {
        assert_eq!((self.p, self.k()), (other.p, other.k()));
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        FpVector { p: self.p, coords }
    }

    pub fn scale(&self, c: u32) -> FpVector {
        let coords = self.coords.iter().map(|&a| mul(self.p, a, c % self.p)).collect();
        FpVector { p: self.p, coords }
    }

    pub fn neg(&self) -> FpVector {
        self.scale(self.p - 1)
    }

    /// Scalar multiple whose last nonzero coordinate is 1.
    pub fn normalized_last(&self) -> FpVector {
        match self.coords.iter().rev().find(|&&c| c != 0) {
            Some(&c) => self.scale(inv(self.p, c)),
            None => self.clone(),
        }
    }

    /// `Σ λ_i v_i`.
    pub fn combination(p: u32, k: usize, lambda: &[u32], vs: &[FpVector]) -> FpVector {
        lambda
            .iter()
            .zip(vs)
            .fold(FpVector::zero(p, k), |acc, (&l, v)| acc.add(&v.scale(l)))
    }

    /// Renders with named coordinates, highest index first, coefficients
    /// lifted to the symmetric range: `ad2 - d1`.
    pub fn render(&self, names: &[&str]) -> String {
        let mut out = String::new();
        for (i, &c) in self.coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let signed = if c > self.p / 2 {
                c as i64 - self.p as i64
            } else {
                c as i64
            };
            let (sign, mag) = if signed < 0 { ("-", -signed) } else { ("+", signed) };
            let name = names.get(i).map_or_else(|| format!("e{}", i + 1), |s| s.to_string());
            let term = if mag == 1 { name } else { format!("{mag}{name}") };
            if out.is_empty() {
                if sign == "-" {
                    out.push('-');
                }
                out.push_str(&term);
            } else {
                out.push_str(&format!(" {sign} {term}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}", self.coords, self.p)
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

fn same_ambient(p1: u32, k1: usize, p2: u32, k2: usize) -> Result<(), FpError> {
    if (p1, k1) == (p2, k2) {
        Ok(())
    } else {
        Err(FpError::Mismatch { p1, k1, p2, k2 })
    }
}

/// Row-reduces in place over the first `width` columns, drops zero rows and
/// returns the pivot columns. Pivots are 1 and are the only nonzero entries
/// in their columns.
pub(crate) fn rref(p: u32, rows: &mut Vec<Vec<u32>>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let s = inv(p, rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = mul(p, *x, s);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col] == 0 {
                continue;
            }
            let f = rows[i][col];
            for j in 0..rows[i].len() {
                let sub = mul(p, f, rows[r][j]);
                rows[i][j] = (rows[i][j] + p - sub) % p;
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.retain(|row| row.iter().any(|&x| x != 0));
    pivots
}

/// Coefficient vectors `λ` with `Σ λ_i rows_i = 0`, as an echelon basis of
/// that left kernel.
pub(crate) fn left_kernel(p: u32, width: usize, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let m = rows.len();
    let mut aug: Vec<Vec<u32>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut a = row.clone();
            a.extend((0..m).map(|j| u32::from(i == j)));
            a
        })
        .collect();
    rref(p, &mut aug, width);
    // the identity block keeps every row nonzero; rows whose left block
    // vanishes carry the kernel
    let mut kernel: Vec<Vec<u32>> = aug
        .into_iter()
        .filter(|row| row[..width].iter().all(|&x| x == 0))
        .map(|row| row[width..].to_vec())
        .collect();
    rref(p, &mut kernel, m);
    kernel
}

/// A subspace stored by its reduced echelon basis, so equal subspaces
/// compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpSubspace {
    p: u32,
    k: usize,
    basis: Vec<FpVector>,
}

impl FpSubspace {
    pub fn zero(p: u32, k: usize) -> Self {
        FpSubspace { p, k, basis: vec![] }
    }

    pub fn whole(p: u32, k: usize) -> Self {
        FpSubspace {
            p,
            k,
            basis: (0..k).map(|i| FpVector::unit(p, k, i)).collect(),
        }
    }

    /// Span of `vectors` in F_p^k.
    pub fn span(p: u32, k: usize, vectors: &[FpVector]) -> Result<Self, FpError> {
        check_prime(p)?;
        for v in vectors {
            same_ambient(p, k, v.p, v.k())?;
        }
        let mut rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.coords.clone()).collect();
        rref(p, &mut rows, k);
        Ok(FpSubspace {
            p,
            k,
            basis: rows.into_iter().map(|c| FpVector::raw(p, c)).collect(),
        })
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(p: u32, k: usize, indices: &[usize]) -> Self {
        let vs: Vec<FpVector> = indices.iter().map(|&i| FpVector::unit(p, k, i)).collect();
        Self::span(p, k, &vs).expect("valid ambient")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn check(&self, other: &FpSubspace) -> Result<(), FpError> {
        same_ambient(self.p, self.k, other.p, other.k)
    }

    pub fn contains(&self, v: &FpVector) -> Result<bool, FpError> {
        same_ambient(self.p, self.k, v.p, v.k())?;
        let mut rest = v.coords.clone();
        for b in &self.basis {
            let pivot = b.coords.iter().position(|&c| c != 0).expect("nonzero row");
            let f = rest[pivot];
            if f != 0 {
                for (x, &y) in rest.iter_mut().zip(&b.coords) {
                    *x = (*x + self.p - mul(self.p, f, y)) % self.p;
                }
            }
        }
        Ok(rest.iter().all(|&c| c == 0))
    }

    pub fn is_subspace_of(&self, other: &FpSubspace) -> Result<bool, FpError> {
        self.check(other)?;
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &FpSubspace) -> Result<FpSubspace, FpError> {
        self.check(other)?;
        let all: Vec<FpVector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::span(self.p, self.k, &all)
    }

    /// Intersection from the left kernel of the stacked bases: each kernel
    /// vector `(λ, μ)` gives `Σ λ_i u_i = -Σ μ_j v_j` in both spaces.
    pub fn intersect(&self, other: &FpSubspace) -> Result<FpSubspace, FpError> {
        self.check(other)?;
        let rows: Vec<Vec<u32>> = self
            .basis
            .iter()
            .chain(&other.basis)
            .map(|v| v.coords.clone())
            .collect();
        let kernel = left_kernel(self.p, self.k, &rows);
        let vs: Vec<FpVector> = kernel
            .iter()
            .map(|lm| FpVector::combination(self.p, self.k, &lm[..self.dim()], &self.basis))
            .collect();
        Self::span(self.p, self.k, &vs)
    }

    /// Image under an invertible change of coordinates given by columns:
    /// `v ↦ M v` where `M` has rows `matrix[i]`.
    pub fn transform(&self, matrix: &[Vec<u32>]) -> Result<FpSubspace, FpError> {
        let vs: Vec<FpVector> = self.basis.iter().map(|b| apply_matrix(self.p, matrix, b)).collect();
        Self::span(self.p, self.k, &vs)
    }
}

/// `M v` for `M` given by rows.
pub fn apply_matrix(p: u32, matrix: &[Vec<u32>], v: &FpVector) -> FpVector {
    let coords = matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(&v.coords)
                .fold(0, |acc, (&a, &b)| (acc + mul(p, a, b)) % p)
        })
        .collect();
    FpVector::raw(p, coords)
}

impl fmt::Debug for FpSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?}", self.basis)
    }
}

impl fmt::Display for FpSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.basis.iter().map(|b| b.to_string()).collect();
        write!(f, "span{{{}}}", parts.join(", "))
    }
}

/// True iff the dimension of the sum is the sum of the dimensions.
pub fn is_direct_sum(parts: &[FpSubspace]) -> Result<bool, FpError> {
    let Some(first) = parts.first() else { return Ok(true) };
    let mut acc = FpSubspace::zero(first.p, first.k);
    for s in parts {
        acc = acc.sum(s)?;
    }
    Ok(acc.dim() == parts.iter().map(FpSubspace::dim).sum::<usize>())
}
