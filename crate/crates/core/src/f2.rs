//! Bit-level GF(2) vectors and matrices and their bipolar (±1) image.
//!
//! Vectors are packed 64 bits per word, least significant bit first, with the
//! logical length tracked separately. Bits past `len` in the last word are
//! always zero so that XOR and popcount can work word-wise.

use crate::{Error, Result};
use std::fmt;
use std::str::FromStr;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinaryVector {
    words: Vec<u64>,
    len: usize,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        BinaryVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BinaryVector {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        v.clear_tail();
        v
    }

    /// Builds a vector from `0`/`1` values. Any nonzero entry is read as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// The `len` low bits of `value`, most significant first.
    ///
    /// `from_msb_int(0b101, 3)` is `(1, 0, 1)`.
    pub fn from_msb_int(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_msb_int supports at most 64 bits");
        let mut v = Self::zeros(len);
        for i in 0..len {
            if (value >> (len - 1 - i)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Inverse of [`from_msb_int`](Self::from_msb_int).
    pub fn to_msb_int(&self) -> u64 {
        assert!(self.len <= 64, "to_msb_int supports at most 64 bits");
        (0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn xor(&self, other: &BinaryVector) -> Result<BinaryVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BinaryVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::dim(self.len, other.len));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BinaryVector) -> BinaryVector {
        let mut out = BinaryVector::zeros(self.len + other.len);
        for (i, b) in self.iter().chain(other.iter()).enumerate() {
            if b {
                out.set(i, true);
            }
        }
        out
    }

    /// Bits `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BinaryVector {
        assert!(start <= end && end <= self.len);
        let mut out = BinaryVector::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    /// Parses a run of `0`/`1` characters; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected character {other:?} in bit string"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(BinaryVector::from_bits(&bits))
    }
}

/// A dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: Vec<BinaryVector>,
    cols: usize,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows: vec![BinaryVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn from_rows(rows: Vec<BinaryVector>) -> Result<Self> {
        let cols = rows.first().map_or(0, BinaryVector::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dim(cols, bad.len()));
        }
        Ok(BinaryMatrix { rows, cols })
    }

    /// Convenience constructor from `"0101"`-style row strings.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.parse())
            .collect::<Result<Vec<BinaryVector>>>()?;
        Self::from_rows(rows)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.rows[r].set(c, bit)
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BinaryVector {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[BinaryVector] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> BinaryVector {
        let mut out = BinaryVector::zeros(self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                out.set(r, true);
            }
        }
        out
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_slice(&self, start: usize, end: usize) -> BinaryMatrix {
        BinaryMatrix {
            rows: self.rows[start..end].to_vec(),
            cols: self.cols,
        }
    }

    /// Rank over GF(2) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(c) {
                    row.xor_assign(&pivot_row).expect("equal row lengths");
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

impl fmt::Display for BinaryMatrix {
    /// One row per line, `0`/`1` characters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.nrows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) format; blank lines are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: BinaryVector = line.parse().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: i + 1, msg },
                other => other,
            })?;
            rows.push(row);
        }
        BinaryMatrix::from_rows(rows)
    }
}

/// A vector with entries in `{-1, +1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BipolarVector {
    vals: Vec<i8>,
}

impl BipolarVector {
    pub fn from_values(vals: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = vals.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::param(format!("bipolar entry {bad} is not ±1")));
        }
        Ok(BipolarVector { vals })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[i8] {
        &self.vals
    }

    pub fn negated(&self) -> BipolarVector {
        BipolarVector {
            vals: self.vals.iter().map(|v| -v).collect(),
        }
    }
}

pub fn weight(v: &BinaryVector) -> usize {
    v.weight()
}

pub fn hamming_distance(a: &BinaryVector, b: &BinaryVector) -> Result<usize> {
    if a.len != b.len {
        return Err(Error::dim(a.len, b.len));
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

/// `0 ↦ -1`, `1 ↦ +1`.
pub fn to_bipolar(v: &BinaryVector) -> BipolarVector {
    BipolarVector {
        vals: v.iter().map(|b| if b { 1 } else { -1 }).collect(),
    }
}

pub fn from_bipolar(v: &BipolarVector) -> BinaryVector {
    let mut out = BinaryVector::zeros(v.len());
    for (i, &x) in v.vals.iter().enumerate() {
        if x > 0 {
            out.set(i, true);
        }
    }
    out
}

pub fn inner_product(a: &BipolarVector, b: &BipolarVector) -> Result<i64> {
    if a.len() != b.len() {
        return Err(Error::dim(a.len(), b.len()));
    }
    Ok(a.vals
        .iter()
        .zip(&b.vals)
        .map(|(&x, &y)| i64::from(x) * i64::from(y))
        .sum())
}

/// Hamming distance between two length-`n` words whose bipolar images have
/// inner product `ip`: `(n - ip) / 2`.
pub fn distance_from_inner_product(n: usize, ip: i64) -> Result<usize> {
    let n_i = n as i64;
    if ip.abs() > n_i || (n_i - ip) % 2 != 0 {
        return Err(Error::InvalidInnerProduct { n, ip });
    }
    Ok(((n_i - ip) / 2) as usize)
}

/// `u · M` over GF(2): the XOR of the rows of `M` selected by `u`.
pub fn f2_matvec(u: &BinaryVector, m: &BinaryMatrix) -> Result<BinaryVector> {
    if u.len() != m.nrows() {
        return Err(Error::dim(m.nrows(), u.len()));
    }
    let mut out = BinaryVector::zeros(m.ncols());
    for (i, row) in m.rows.iter().enumerate() {
        if u.get(i) {
            out.xor_assign(row)?;
        }
    }
    Ok(out)
}
