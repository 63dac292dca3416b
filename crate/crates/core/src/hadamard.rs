//! Sylvester Hadamard matrices, the fast Walsh-Hadamard transform and the
//! per-step branch distance profile of a k-partial simplex code.
//!
//! The profile of a received block `r` lists, for every branch tuple
//! `b ∈ F_2^(δ+k)` in lexicographic order, the Hamming distance between `r`
//! and `b · S(δ+k)_k`. It is computed as `Q · H̃ · rᵀ` followed by
//! `d = (n - ip) / 2`, where `H̃` stacks the bipolar codewords in
//! enumeration order and `Q` reorders them lexicographically. `H̃ · rᵀ`
//! itself only needs one fast transform per column block of the generator.

use crate::block::{combo_lex_rank, enumeration_combo};
use crate::f2::{distance_from_inner_product, BipolarVector};
use crate::ops::OpCount;
use crate::{Error, Result, MAX_TRELLIS_DIM};
use std::fmt;
use std::sync::OnceLock;

/// Largest order for which Hadamard-type matrices are materialised.
pub const MAX_DENSE_ORDER: usize = 12;

/// A permutation stored as a gather map: output `i` takes input `forward[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMap {
    forward: Vec<usize>,
}

impl PermutationMap {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; forward.len()];
        for &f in &forward {
            if f >= seen.len() || std::mem::replace(&mut seen[f], true) {
                return Err(Error::param(format!(
                    "index map is not a bijection on 0..{}",
                    forward.len()
                )));
            }
        }
        Ok(PermutationMap { forward })
    }

    pub fn identity(size: usize) -> Self {
        PermutationMap {
            forward: (0..size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn apply<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(xs.len(), self.size(), "permutation size mismatch");
        self.forward.iter().map(|&i| xs[i].clone()).collect()
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &PermutationMap) -> PermutationMap {
        assert_eq!(self.size(), other.size());
        PermutationMap {
            forward: self.forward.iter().map(|&i| other.forward[i]).collect(),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.forward
            .iter()
            .enumerate()
            .all(|(i, &f)| self.forward[f] == i)
    }

    /// 1-based index `j` such that row `i` (1-based) of the permutation matrix
    /// is the basis vector `e_j`.
    pub fn basis_index(&self, row: usize) -> usize {
        self.forward[row - 1] + 1
    }
}

/// Dense matrix with entries `±1`.
#[derive(Clone, PartialEq, Eq)]
pub struct SignedMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignedMatrix {
    pub fn from_rows(rows: Vec<Vec<i8>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::dim(cols, row.len()));
            }
            if row.iter().any(|&v| v != 1 && v != -1) {
                return Err(Error::param("signed matrix entries must be ±1"));
            }
            entries.extend(row);
        }
        Ok(SignedMatrix {
            rows: nrows,
            cols,
            entries,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> BipolarVector {
        BipolarVector::from_values(self.row(r).to_vec()).expect("entries are ±1")
    }

    pub fn negated(&self) -> SignedMatrix {
        SignedMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| -v).collect(),
        }
    }

    pub fn matvec(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| i64::from(a) * b)
                    .sum()
            })
            .collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &SignedMatrix) -> SignedMatrix {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        SignedMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &SignedMatrix) -> SignedMatrix {
        assert_eq!(self.rows, other.rows);
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        for r in 0..self.rows {
            entries.extend_from_slice(self.row(r));
            entries.extend_from_slice(other.row(r));
        }
        SignedMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            entries,
        }
    }

    pub fn permute_rows(&self, p: &PermutationMap) -> SignedMatrix {
        assert_eq!(p.size(), self.rows);
        let mut entries = Vec::with_capacity(self.entries.len());
        for &src in p.forward() {
            entries.extend_from_slice(self.row(src));
        }
        SignedMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl fmt::Display for SignedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<&str> = self
                .row(r)
                .iter()
                .map(|&v| if v > 0 { "+" } else { "-" })
                .collect();
            writeln!(f, "{}", line.concat())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedMatrix {}x{}\n{self}", self.rows, self.cols)
    }
}

/// Branch metrics of one trellis step, indexed by the lexicographic rank of
/// the branch tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    pub metrics: Vec<usize>,
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_DENSE_ORDER {
        return Err(Error::Resource(format!(
            "dense Hadamard matrices are limited to order 2^{MAX_DENSE_ORDER}"
        )));
    }
    Ok(())
}

/// Sylvester `H_{2^m}`, entry `(i, j) = (-1)^{popcount(i & j)}`.
pub fn hadamard_matrix(m: usize) -> Result<SignedMatrix> {
    check_order(m)?;
    let size = 1usize << m;
    let mut entries = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            entries.push(if (i & j).count_ones() % 2 == 0 { 1 } else { -1 });
        }
    }
    Ok(SignedMatrix {
        rows: size,
        cols: size,
        entries,
    })
}

/// Perfect riffle of the two halves keeping element 0 in front:
/// `(x_0, x_{L/2}, x_1, x_{L/2+1}, …)`.
pub fn faro_out_shuffle(len: usize) -> Result<PermutationMap> {
    if !len.is_multiple_of(2) {
        return Err(Error::param(format!(
            "out-shuffle needs an even length, got {len}"
        )));
    }
    let half = len / 2;
    let forward = (0..len)
        .map(|i| if i % 2 == 0 { i / 2 } else { half + i / 2 })
        .collect();
    Ok(PermutationMap { forward })
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::param(format!("length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// `H_{2^m} · x` as `m` rounds of out-shuffle followed by the pairwise
/// butterfly `(a, b) ↦ (a + b, a - b)`.
pub fn fwht(x: &[i64]) -> Result<Vec<i64>> {
    let mut ops = OpCount::ZERO;
    fwht_counted(x, &mut ops)
}

/// [`fwht`] charging `L` additions per round to `ops`.
pub fn fwht_counted(x: &[i64], ops: &mut OpCount) -> Result<Vec<i64>> {
    let m = log2_exact(x.len())?;
    let len = x.len();
    let half = len / 2;
    let mut cur = x.to_vec();
    let mut next = vec![0i64; len];
    for _ in 0..m {
        // Out-shuffle pairs input i with input i + L/2; C then combines them.
        for i in 0..half {
            let (a, b) = (cur[i], cur[i + half]);
            next[2 * i] = a + b;
            next[2 * i + 1] = a - b;
        }
        std::mem::swap(&mut cur, &mut next);
        ops.add(len as u64);
    }
    Ok(cur)
}

/// Checks that `(C·P)^m`, with `P` the materialised out-shuffle and `C` the
/// block diagonal of `H_2`, reproduces `H_{2^m}` for `m ≤ max_m`.
pub fn shuffle_convention_holds(max_m: usize) -> bool {
    (0..=max_m.min(MAX_DENSE_ORDER)).all(|m| {
        let size = 1usize << m;
        let h = hadamard_matrix(m).expect("bounded order");
        if m == 0 {
            return h.get(0, 0) == 1;
        }
        let p = faro_out_shuffle(size).expect("even size");
        // Columns of (CP)^m are the images of the unit vectors.
        (0..size).all(|c| {
            let mut v = vec![0i64; size];
            v[c] = 1;
            for _ in 0..m {
                let s = p.apply(&v);
                for i in 0..size / 2 {
                    v[2 * i] = s[2 * i] + s[2 * i + 1];
                    v[2 * i + 1] = s[2 * i] - s[2 * i + 1];
                }
            }
            (0..size).all(|r| v[r] == i64::from(h.get(r, c)))
        })
    })
}

fn check_block_params(k: usize, delta: usize) -> Result<()> {
    if k < 1 || delta < 1 {
        return Err(Error::param(format!(
            "need k >= 1 and delta >= 1, got k={k}, delta={delta}"
        )));
    }
    Ok(())
}

/// Row shuffle for column block `l` of `S(δ+k)_k`: with
/// `s = 2^(k+δ-l-1)`, output `j·2^l + c` takes input `c·s + j`.
pub fn build_t(k: usize, delta: usize, l: usize) -> Result<PermutationMap> {
    check_block_params(k, delta)?;
    if l < 1 || l >= k {
        return Err(Error::param(format!("block index l={l} outside 1..{k}")));
    }
    let m = k + delta - 1;
    let s = 1usize << (m - l);
    let width = 1usize << l;
    let mut forward = vec![0; 1 << m];
    for j in 0..s {
        for c in 0..width {
            forward[j * width + c] = c * s + j;
        }
    }
    Ok(PermutationMap { forward })
}

/// `Ĥ = T · (-H; …; -H; H; …; H)` with `2^(l-1)` copies of each sign of
/// `H_{2^(k+δ-l-1)}`.
pub fn build_hhat(k: usize, delta: usize, l: usize) -> Result<SignedMatrix> {
    let t = build_t(k, delta, l)?;
    let h = hadamard_matrix(k + delta - l - 1)?;
    let neg = h.negated();
    let copies = 1usize << (l - 1);
    let mut stack = neg.clone();
    for _ in 1..copies {
        stack = stack.vstack(&neg);
    }
    for _ in 0..copies {
        stack = stack.vstack(&h);
    }
    Ok(stack.permute_rows(&t))
}

/// `H̃ = [H_{2^m} Ĥ_{2^(m-1)} … Ĥ_{2^δ}; -H_{2^m} Ĥ_{2^(m-1)} … Ĥ_{2^δ}]`.
pub fn build_htilde(k: usize, delta: usize) -> Result<SignedMatrix> {
    check_block_params(k, delta)?;
    let m = k + delta - 1;
    check_order(m)?;
    let h = hadamard_matrix(m)?;
    let mut top = h.clone();
    let mut bottom = h.negated();
    for l in 1..k {
        let hh = build_hhat(k, delta, l)?;
        top = top.hstack(&hh);
        bottom = bottom.hstack(&hh);
    }
    Ok(top.vstack(&bottom))
}

/// Reordering from enumeration order to lexicographic branch order.
///
/// For the first `2^m` rows, row `i` holds `e_j` with `j` the lexicographic
/// rank of the generator rows summed into enumerated word `i`; row
/// `i + 2^m` holds `e_{j - 2^m}` where `e_j` sits in row `i`.
pub fn build_q(k: usize, delta: usize) -> Result<PermutationMap> {
    check_block_params(k, delta)?;
    let dim = k + delta;
    if dim > MAX_TRELLIS_DIM + 6 {
        return Err(Error::Resource(format!("Q of size 2^{dim} is too large")));
    }
    let half = 1usize << (dim - 1);
    let first: Vec<usize> = (0..half)
        .map(|i| combo_lex_rank(&enumeration_combo(i, dim), dim) - 1)
        .collect();
    let forward = first
        .iter()
        .copied()
        .chain(first.iter().map(|f| f - half))
        .collect();
    PermutationMap::new(forward)
}

/// Precomputed permutations and layout for repeated profile computation.
#[derive(Debug, Clone)]
pub struct BranchProfiler {
    k: usize,
    delta: usize,
    n: usize,
    q: PermutationMap,
    /// `T` for blocks `l = 1..k`.
    ts: Vec<PermutationMap>,
}

static SHUFFLE_CHECK: OnceLock<bool> = OnceLock::new();

impl BranchProfiler {
    pub fn new(k: usize, delta: usize) -> Result<Self> {
        check_block_params(k, delta)?;
        if k + delta > MAX_TRELLIS_DIM {
            return Err(Error::Resource(format!(
                "δ+k = {} exceeds the supported maximum {MAX_TRELLIS_DIM}",
                k + delta
            )));
        }
        let shuffle_ok = *SHUFFLE_CHECK.get_or_init(|| shuffle_convention_holds(6));
        if !shuffle_ok {
            return Err(Error::Internal(
                "out-shuffle convention does not reproduce H".into(),
            ));
        }
        let ts = (1..k)
            .map(|l| build_t(k, delta, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(BranchProfiler {
            k,
            delta,
            n: (1usize << (k + delta)) - (1usize << delta),
            q: build_q(k, delta)?,
            ts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &PermutationMap {
        &self.q
    }

    /// `H̃ · rᵀ`: inner products of `r` with every codeword, in enumeration
    /// order.
    pub fn inner_products(&self, r: &BipolarVector, ops: &mut OpCount) -> Result<Vec<i64>> {
        if r.len() != self.n {
            return Err(Error::dim(self.n, r.len()));
        }
        let m = self.k + self.delta - 1;
        let half = 1usize << m;
        let vals: Vec<i64> = r.as_slice().iter().map(|&v| i64::from(v)).collect();

        let w0 = fwht_counted(&vals[..half], ops)?;

        // Contribution of blocks 1..k, identical for both halves of H̃.
        let mut shared: Option<Vec<i64>> = None;
        let mut offset = half;
        for (idx, t) in self.ts.iter().enumerate() {
            let l = idx + 1;
            let width = 1usize << (m - l);
            let w = fwht_counted(&vals[offset..offset + width], ops)?;
            offset += width;
            // Stack of 2^(l-1) copies of -w then 2^(l-1) copies of +w, row
            // shuffled by T.
            let neg_rows = half / 2;
            let contrib = t.forward().iter().map(|&src| {
                let v = w[src % width];
                if src < neg_rows {
                    -v
                } else {
                    v
                }
            });
            match shared.as_mut() {
                None => shared = Some(contrib.collect()),
                Some(acc) => {
                    for (a, c) in acc.iter_mut().zip(contrib) {
                        *a += c;
                    }
                    ops.add(half as u64);
                }
            }
        }
        debug_assert_eq!(offset, self.n);

        let mut out = vec![0i64; 2 * half];
        match shared {
            None => {
                for i in 0..half {
                    out[i] = w0[i];
                    out[half + i] = -w0[i];
                }
            }
            Some(s) => {
                for i in 0..half {
                    out[i] = s[i] + w0[i];
                    out[half + i] = s[i] - w0[i];
                }
                ops.add(2 * half as u64);
            }
        }
        Ok(out)
    }

    /// `Q · H̃ · rᵀ` converted to Hamming distances.
    pub fn profile(&self, r: &BipolarVector, ops: &mut OpCount) -> Result<DistanceProfile> {
        let ip = self.inner_products(r, ops)?;
        let metrics = self
            .q
            .forward()
            .iter()
            .map(|&src| distance_from_inner_product(self.n, ip[src]))
            .collect::<Result<Vec<_>>>()?;
        ops.add(metrics.len() as u64);
        Ok(DistanceProfile { metrics })
    }
}

pub fn branch_distance_profile(
    r: &BipolarVector,
    k: usize,
    delta: usize,
) -> Result<DistanceProfile> {
    BranchProfiler::new(k, delta)?.profile(r, &mut OpCount::default())
}
