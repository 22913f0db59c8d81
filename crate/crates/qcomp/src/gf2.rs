//! Linear algebra over GF(2) and the orthogonal-row hash families used by CSS constructions.
//!
//! Vectors are bit-packed into `u64` words. Row reduction always pivots on the leftmost
//! available column so kernel bases are reproducible.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A fixed-length binary vector.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2Vec {
    len: usize,
    words: Vec<u64>,
}

impl F2Vec {
    /// All-zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            len: n,
            words: vec![0; words_for(n)],
        }
    }

    /// Builds a vector from 0/1 entries; any nonzero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a length-`n` vector whose entry `i` is bit `i` of `mask`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        assert!(n <= WORD, "mask vectors hold at most 64 bits");
        let mut v = Self::zeros(n);
        if n > 0 {
            let keep = if n == WORD { u64::MAX } else { (1u64 << n) - 1 };
            v.words[0] = mask & keep;
        }
        v
    }

    /// Parses a string of '0'/'1' characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::InvalidInput(alloc::format!(
                        "invalid bit character {c:?}"
                    )))
                }
            }
        }
        Ok(Self::from_bits(&bits))
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(n);
        for w in v.words.iter_mut() {
            *w = rng.random();
        }
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index out of range");
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index out of range");
        let m = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index out of range");
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Low 64 bits as a mask; entry `i` is bit `i`.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= WORD, "vector longer than 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "length mismatch in and");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Self {
            len: self.len,
            words,
        }
    }

    /// Entries as 0/1 bytes.
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Lexicographic comparison reading entry 0 first, with 0 < 1.
    pub fn lex_cmp(&self, other: &Self) -> core::cmp::Ordering {
        assert_eq!(self.len, other.len, "length mismatch in comparison");
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let d = a ^ b;
                let i = d.trailing_zeros();
                return ((a >> i) & 1).cmp(&((b >> i) & 1));
            }
        }
        core::cmp::Ordering::Equal
    }
}

impl fmt::Display for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vec({self})")
    }
}

/// A binary matrix stored as rows of uniform length.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2Mat {
    n_cols: usize,
    rows: Vec<F2Vec>,
}

/// Row-echelon data: reduced rows and their pivot columns.
struct Echelon {
    rows: Vec<F2Vec>,
    pivots: Vec<usize>,
}

impl F2Mat {
    /// Matrix from rows; every row must have length `n_cols`.
    pub fn new(rows: Vec<F2Vec>, n_cols: usize) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::Dimension(alloc::format!(
                "row of length {} in matrix with {} columns",
                r.len(),
                n_cols
            )));
        }
        Ok(Self { n_cols, rows })
    }

    /// Matrix with no rows.
    pub fn empty(n_cols: usize) -> Self {
        Self {
            n_cols,
            rows: Vec::new(),
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_cols,
            rows: vec![F2Vec::zeros(n_cols); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut v = F2Vec::zeros(n);
                v.set(i, true);
                v
            })
            .collect();
        Self { n_cols: n, rows }
    }

    /// Parses rows given as '0'/'1' strings; all rows must share a length.
    pub fn from_rows_str(rows: &[&str], n_cols: usize) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| F2Vec::parse(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, n_cols)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[F2Vec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &F2Vec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    /// Appends a row of matching length.
    pub fn push_row(&mut self, row: F2Vec) -> Result<()> {
        if row.len() != self.n_cols {
            return Err(Error::Dimension(alloc::format!(
                "row of length {} pushed onto matrix with {} columns",
                row.len(),
                self.n_cols
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.n_cols != other.n_cols {
            return Err(Error::Dimension("column counts differ in vstack".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self {
            n_cols: self.n_cols,
            rows,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..self.n_cols {
                if r.get(j) {
                    t.rows[j].set(i, true);
                }
            }
        }
        t
    }

    /// Product `self · other` over GF(2).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n_cols != other.n_rows() {
            return Err(Error::Dimension(
                "inner dimensions differ in matrix product".into(),
            ));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = F2Vec::zeros(other.n_cols);
                for k in 0..self.n_cols {
                    if r.get(k) {
                        acc.xor_assign(&other.rows[k]);
                    }
                }
                acc
            })
            .collect();
        Ok(Self {
            n_cols: other.n_cols,
            rows,
        })
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &F2Vec) -> Result<F2Vec> {
        if v.len() != self.n_cols {
            return Err(Error::Dimension(alloc::format!(
                "vector of length {} against {} columns",
                v.len(),
                self.n_cols
            )));
        }
        let mut s = F2Vec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                s.set(i, true);
            }
        }
        Ok(s)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(F2Vec::is_zero)
    }

    fn echelon(&self) -> Echelon {
        let mut rows: Vec<F2Vec> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.n_cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    /// Reduced row-echelon form with zero rows removed.
    pub fn rref(&self) -> Self {
        Self {
            n_cols: self.n_cols,
            rows: self.echelon().rows,
        }
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{v : self · v = 0}`, one vector per free column in increasing column order.
    pub fn kernel_basis(&self) -> Vec<F2Vec> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.n_cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = F2Vec::zeros(self.n_cols);
                v.set(f, true);
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// A solution of `self · v = s` with all free coordinates zero, if one exists.
    pub fn solve(&self, s: &F2Vec) -> Result<Option<F2Vec>> {
        if s.len() != self.rows.len() {
            return Err(Error::Dimension(alloc::format!(
                "right-hand side of length {} against {} rows",
                s.len(),
                self.rows.len()
            )));
        }
        let n = self.n_cols;
        let aug_rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut a = F2Vec::zeros(n + 1);
                for j in 0..n {
                    if r.get(j) {
                        a.set(j, true);
                    }
                }
                a.set(n, s.get(i));
                a
            })
            .collect();
        let ech = Self {
            n_cols: n + 1,
            rows: aug_rows,
        }
        .echelon();
        if ech.pivots.last() == Some(&n) {
            return Ok(None);
        }
        let mut v = F2Vec::zeros(n);
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            if row.get(n) {
                v.set(p, true);
            }
        }
        Ok(Some(v))
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Result<Option<Self>> {
        let n = self.n_cols;
        if self.rows.len() != n {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = F2Vec::zeros(n);
            e.set(j, true);
            match self.solve(&e)? {
                Some(c) if self.rank() == n => cols.push(c),
                _ => return Ok(None),
            }
        }
        Ok(Some(
            Self {
                n_cols: n,
                rows: cols,
            }
            .transpose(),
        ))
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &F2Vec) -> bool {
        let ech = self.echelon();
        let mut w = v.clone();
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            if w.get(p) {
                w.xor_assign(row);
            }
        }
        w.is_zero()
    }

    /// Whether two matrices have the same row space.
    pub fn same_row_space(&self, other: &Self) -> bool {
        self.n_cols == other.n_cols
            && self.rank() == other.rank()
            && other.rows.iter().all(|r| self.row_space_contains(r))
    }

    /// Serializes as "n_rows n_cols" followed by one 0/1 row per line.
    pub fn to_text(&self) -> String {
        let mut s = alloc::format!("{} {}\n", self.rows.len(), self.n_cols);
        for r in &self.rows {
            s.push_str(&alloc::format!("{r}\n"));
        }
        s
    }

    /// Parses the format produced by [`F2Mat::to_text`]. Blank lines are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty matrix text".into()))?;
        let (n_rows, n_cols) = parse_header(header)?;
        let mut rows = Vec::with_capacity(n_rows);
        for _ in 0..n_rows {
            let line = lines.next().ok_or_else(|| {
                Error::InvalidInput("matrix text has fewer rows than declared".into())
            })?;
            let row = F2Vec::parse(line)?;
            if row.len() != n_cols {
                return Err(Error::InvalidInput(alloc::format!(
                    "row {line:?} does not have {n_cols} columns"
                )));
            }
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(Error::InvalidInput(
                "matrix text has more rows than declared".into(),
            ));
        }
        Self::new(rows, n_cols)
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let mut it = header.split_whitespace();
    let parse = |t: Option<&str>| -> Result<usize> {
        t.and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::InvalidInput(alloc::format!("bad matrix header {header:?}")))
    };
    let r = parse(it.next())?;
    let c = parse(it.next())?;
    if it.next().is_some() {
        return Err(Error::InvalidInput(alloc::format!(
            "bad matrix header {header:?}"
        )));
    }
    Ok((r, c))
}

impl fmt::Debug for F2Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Mat[{}x{}](", self.rows.len(), self.n_cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// GF(2) row rank.
pub fn rank(m: &F2Mat) -> usize {
    m.rank()
}

/// Kernel basis of `m`; its size is `n_cols - rank(m)`.
pub fn kernel_basis(m: &F2Mat) -> Vec<F2Vec> {
    m.kernel_basis()
}

/// Syndrome `m · v`.
pub fn syndrome(m: &F2Mat, v: &F2Vec) -> Result<F2Vec> {
    m.mul_vec(v)
}

/// Deterministic generator used for all seeded sampling in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const MAX_RESTARTS: usize = 64;

/// Samples `(H_Z, H_X)` with independent rows inside each matrix and `H_Z · H_Xᵀ = 0`.
///
/// `H_Z` rows are uniform among vectors independent of earlier rows; `H_X` rows are uniform
/// over the kernel of `H_Z` subject to independence of earlier `H_X` rows.
pub fn sample_css_hash(n: usize, n_z: usize, n_x: usize, seed: u64) -> Result<(F2Mat, F2Mat)> {
    if n_z + n_x > n {
        return Err(Error::Construction(alloc::format!(
            "cannot fit {n_z} + {n_x} independent orthogonal checks on {n} bits"
        )));
    }
    let mut rng = seeded_rng(seed);
    sample_css_hash_with(n, n_z, n_x, &mut rng)
}

/// As [`sample_css_hash`] but drawing from a caller-supplied generator.
pub fn sample_css_hash_with<R: Rng + ?Sized>(
    n: usize,
    n_z: usize,
    n_x: usize,
    rng: &mut R,
) -> Result<(F2Mat, F2Mat)> {
    if n_z + n_x > n {
        return Err(Error::Construction(alloc::format!(
            "cannot fit {n_z} + {n_x} independent orthogonal checks on {n} bits"
        )));
    }
    for _ in 0..MAX_RESTARTS {
        let h_z = sample_independent_rows(n, n_z, rng, |rng| F2Vec::random(n, rng));
        let Some(h_z) = h_z else { continue };
        let ker = h_z.kernel_basis();
        let h_x = sample_independent_rows(n, n_x, rng, |rng| {
            let mut v = F2Vec::zeros(n);
            for b in &ker {
                if rng.random::<bool>() {
                    v.xor_assign(b);
                }
            }
            v
        });
        if let Some(h_x) = h_x {
            return Ok((h_z, h_x));
        }
    }
    Err(Error::Construction(
        "orthogonal hash sampling did not converge".into(),
    ))
}

fn sample_independent_rows<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> F2Vec,
) -> Option<F2Mat> {
    let mut m = F2Mat::empty(n);
    let budget = 64 * (count + 1);
    let mut tries = 0;
    while m.n_rows() < count {
        tries += 1;
        if tries > budget {
            return None;
        }
        let v = draw(rng);
        if v.is_zero() || m.row_space_contains(&v) {
            continue;
        }
        m.rows.push(v);
    }
    Some(m)
}

/// Empirical collision rate of random linear maps `{0,1}^n → {0,1}^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub trials: u64,
    pub collisions: u64,
    pub estimate: f64,
    /// Binomial standard error of `estimate` under the ideal rate `2^{-m}`.
    pub sigma: f64,
    /// Ideal universal collision rate `2^{-m}`.
    pub ideal: f64,
}

impl ProbeResult {
    /// Whether `estimate ≤ 2^{-m} + 3σ`.
    pub fn within_bound(&self) -> bool {
        self.estimate <= self.ideal + 3.0 * self.sigma
    }
}

/// Estimates `Pr[f(x) = f(y)]` for uniformly random linear `f` and distinct `x`, `y`.
pub fn universality_probe(n: usize, m: usize, trials: u64, seed: u64) -> Result<ProbeResult> {
    if m > n || n == 0 || trials == 0 {
        return Err(Error::InvalidInput(
            "universality probe needs 0 ≤ m ≤ n, n ≥ 1, trials ≥ 1".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let mut collisions = 0u64;
    for _ in 0..trials {
        let f: Vec<F2Vec> = (0..m).map(|_| F2Vec::random(n, &mut rng)).collect();
        let x = F2Vec::random(n, &mut rng);
        let y = loop {
            let y = F2Vec::random(n, &mut rng);
            if y != x {
                break y;
            }
        };
        let d = x.xor(&y);
        if f.iter().all(|r| !r.dot(&d)) {
            collisions += 1;
        }
    }
    let ideal = crate::math::powi(0.5, m as i32);
    let estimate = collisions as f64 / trials as f64;
    let sigma = crate::math::sqrt(ideal * (1.0 - ideal) / trials as f64);
    Ok(ProbeResult {
        trials,
        collisions,
        estimate,
        sigma,
        ideal,
    })
}
