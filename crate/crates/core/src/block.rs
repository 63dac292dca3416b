//! First-order Reed-Muller, simplex and k-partial simplex block codes.

use crate::f2::{BinaryMatrix, BinaryVector};
use crate::{Error, Result, MAX_CODE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// `RM(1, m)`, generator `R(m)`.
    ReedMuller { m: usize },
    /// Simplex code of dimension `m`.
    Simplex { m: usize },
    /// `S(δ+k)_k`: simplex columns with an all-zero `k`-prefix removed.
    PartialSimplex { k: usize, delta: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    generator: BinaryMatrix,
    kind: CodeKind,
}

impl BlockCode {
    pub fn generator(&self) -> &BinaryMatrix {
        &self.generator
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn len(&self) -> usize {
        self.generator.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All `2^dim` codewords in the canonical doubling order, each paired with
/// the (1-based) generator rows summed to produce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordEnumeration {
    pub words: Vec<BinaryVector>,
    pub combos: Vec<Vec<usize>>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_CODE_DIM {
        return Err(Error::Resource(format!(
            "code dimension {dim} exceeds the supported maximum {MAX_CODE_DIM}"
        )));
    }
    Ok(())
}

/// `R(m)` as a raw matrix: row 0 all ones, row `i ≥ 1` holds bit `i-1` of the
/// column index. This is the closed form of
/// `R(m+1) = [R(m) R(m); 0…0 1…1]`.
fn rm_matrix(m: usize) -> BinaryMatrix {
    let cols = 1usize << m;
    let mut g = BinaryMatrix::zeros(m + 1, cols);
    for c in 0..cols {
        g.set(0, c, true);
        for i in 1..=m {
            if (c >> (i - 1)) & 1 == 1 {
                g.set(i, c, true);
            }
        }
    }
    g
}

pub fn reed_muller_generator(m: usize) -> Result<BlockCode> {
    if m < 1 {
        return Err(Error::param("Reed-Muller order needs m >= 1"));
    }
    check_dim(m + 1)?;
    Ok(BlockCode {
        generator: rm_matrix(m),
        kind: CodeKind::ReedMuller { m },
    })
}

/// Generator of `S(δ+k)_k` in block upper-triangular form: with
/// `m = δ+k-1`, block `l = 0..k` occupies `2^(m-l)` columns and consists of
/// `l` zero rows on top of `R(m-l)`.
pub fn partial_simplex_generator(k: usize, delta: usize) -> Result<BlockCode> {
    if k < 1 || delta < 1 {
        return Err(Error::param(format!(
            "partial simplex code needs k >= 1 and delta >= 1, got k={k}, delta={delta}"
        )));
    }
    let dim = delta + k;
    check_dim(dim)?;
    let m = dim - 1;
    let cols = (1usize << dim) - (1usize << delta);
    let mut g = BinaryMatrix::zeros(dim, cols);
    let mut offset = 0;
    for l in 0..k {
        let block = rm_matrix(m - l);
        for r in 0..block.nrows() {
            for c in 0..block.ncols() {
                if block.get(r, c) {
                    g.set(l + r, offset + c, true);
                }
            }
        }
        offset += block.ncols();
    }
    debug_assert_eq!(offset, cols);
    Ok(BlockCode {
        generator: g,
        kind: CodeKind::PartialSimplex { k, delta },
    })
}

/// Simplex generator with columns `1..2^m` in binary counting order, row 1 as
/// the most significant bit.
pub fn simplex_generator(m: usize) -> Result<BlockCode> {
    if m < 1 {
        return Err(Error::param("simplex code needs m >= 1"));
    }
    check_dim(m)?;
    let cols = (1usize << m) - 1;
    let mut g = BinaryMatrix::zeros(m, cols);
    for c in 0..cols {
        let value = c + 1;
        for r in 0..m {
            if (value >> (m - 1 - r)) & 1 == 1 {
                g.set(r, c, true);
            }
        }
    }
    Ok(BlockCode {
        generator: g,
        kind: CodeKind::Simplex { m },
    })
}

/// Enumerates every codeword in the doubling order: start with row 1, then
/// for each further row append the XOR of that row with every word so far,
/// and finally append the first half XOR row 1.
pub fn enumerate_codewords(code: &BlockCode) -> CodewordEnumeration {
    let g = code.generator();
    let dim = g.nrows();
    let total = 1usize << dim;
    let mut words = Vec::with_capacity(total);
    let mut combos: Vec<Vec<usize>> = Vec::with_capacity(total);
    if dim == 0 {
        return CodewordEnumeration { words, combos };
    }
    words.push(g.row(0).clone());
    combos.push(vec![1]);
    for i in 1..dim {
        let row = g.row(i);
        for p in 0..words.len() {
            let w = words[p].xor(row).expect("rows share a length");
            let mut c = combos[p].clone();
            c.push(i + 1);
            words.push(w);
            combos.push(c);
        }
    }
    let row1 = g.row(0);
    for p in 0..total / 2 {
        words.push(words[p].xor(row1).expect("rows share a length"));
        combos.push(combos[p][1..].to_vec());
    }
    CodewordEnumeration { words, combos }
}

/// The row subset behind word `index` of [`enumerate_codewords`] for a code
/// of dimension `dim`, computed without materialising any codeword.
///
/// In the first half, bit `j` of `index` selects row `j + 2` on top of row 1;
/// the second half drops row 1.
pub fn enumeration_combo(index: usize, dim: usize) -> Vec<usize> {
    assert!(
        dim >= 1 && index < 1 << dim,
        "index {index} outside 2^{dim}"
    );
    let half = 1usize << (dim - 1);
    let (first_half, bits) = if index < half {
        (true, index)
    } else {
        (false, index - half)
    };
    let mut combo = Vec::with_capacity(dim);
    if first_half {
        combo.push(1);
    }
    combo.extend((0..dim - 1).filter(|j| (bits >> j) & 1 == 1).map(|j| j + 2));
    combo
}

/// 1-based lexicographic rank of the indicator tuple of `combo` (1-based row
/// indices) in `F_2^dim`, row 1 most significant: `Σ 2^(dim - j) + 1`.
pub fn combo_lex_rank(combo: &[usize], dim: usize) -> usize {
    combo
        .iter()
        .map(|&j| {
            assert!((1..=dim).contains(&j), "row {j} outside 1..={dim}");
            1usize << (dim - j)
        })
        .sum::<usize>()
        + 1
}
