//! Polynomial generator matrices of k-partial simplex convolutional codes,
//! zero-tail encoding and brute-force distance oracles.

use crate::block::partial_simplex_generator;
use crate::f2::{f2_matvec, BinaryMatrix, BinaryVector};
use crate::{Error, Result};

/// Largest number of input bits `k·(j+1)` enumerated by [`column_distance`].
pub const MAX_COLUMN_DISTANCE_BITS: usize = 24;

/// `G(z) = Σ G_i z^i` with `k × n` coefficient matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyGeneratorMatrix {
    coeffs: Vec<BinaryMatrix>,
    k: usize,
    n: usize,
    delta: usize,
    mu: usize,
}

impl PolyGeneratorMatrix {
    /// Wraps arbitrary coefficient matrices. `delta` is taken as given; it is
    /// only meaningful for minimal generators.
    pub fn from_coeffs(coeffs: Vec<BinaryMatrix>, delta: usize) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::param("generator needs at least one coefficient"))?;
        let (k, n) = (first.nrows(), first.ncols());
        for g in &coeffs {
            if g.nrows() != k {
                return Err(Error::dim(k, g.nrows()));
            }
            if g.ncols() != n {
                return Err(Error::dim(n, g.ncols()));
            }
        }
        let mu = coeffs.len() - 1;
        Ok(PolyGeneratorMatrix {
            coeffs,
            k,
            n,
            delta,
            mu,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn coeffs(&self) -> &[BinaryMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BinaryMatrix {
        &self.coeffs[i]
    }

    /// Number of rows of `G_μ` that may be nonzero, `δ + k - kμ`.
    pub fn gtilde_rows(&self) -> usize {
        self.delta + self.k - self.k * self.mu
    }

    /// `(G_0; …; G_{μ-1}; G̃_μ)`.
    pub fn stacked(&self) -> BinaryMatrix {
        let mut rows = Vec::with_capacity(self.delta + self.k);
        for g in &self.coeffs[..self.mu] {
            rows.extend(g.rows().iter().cloned());
        }
        rows.extend(
            self.coeffs[self.mu].rows()[..self.gtilde_rows()]
                .iter()
                .cloned(),
        );
        BinaryMatrix::from_rows(rows).expect("coefficients share a width")
    }

    /// `G_0` viewed as a map `F_2^k → F_2^n` is injective.
    pub fn g0_injective(&self) -> bool {
        self.coeffs[0].rank() == self.k
    }

    /// Whether the stack of coefficients is `S(δ+k)_k` with generic row
    /// degrees, the shape the transform-based decoder relies on.
    pub fn is_partial_simplex(&self) -> bool {
        if self.k == 0 || self.delta == 0 || self.mu != self.delta.div_ceil(self.k) {
            return false;
        }
        let gm = &self.coeffs[self.mu];
        if gm.rows()[self.gtilde_rows()..].iter().any(|r| !r.is_zero()) {
            return false;
        }
        match partial_simplex_generator(self.k, self.delta) {
            Ok(code) => *code.generator() == self.stacked(),
            Err(_) => false,
        }
    }
}

/// Information blocks `u_0, …, u_{L-1}`, each of length `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageSequence {
    pub blocks: Vec<BinaryVector>,
}

impl MessageSequence {
    pub fn new(blocks: Vec<BinaryVector>) -> Self {
        MessageSequence { blocks }
    }

    /// `k = 1` messages from a bit list.
    pub fn from_bits(bits: &[u8]) -> Self {
        MessageSequence {
            blocks: bits
                .iter()
                .map(|&b| BinaryVector::from_bits(&[b]))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn bit_len(&self) -> usize {
        self.blocks.iter().map(BinaryVector::len).sum()
    }
}

/// Codeword (or received word) blocks `v_0, …`, each of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCodeword {
    pub blocks: Vec<BinaryVector>,
}

impl PolyCodeword {
    pub fn new(blocks: Vec<BinaryVector>) -> Self {
        PolyCodeword { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.blocks.iter().map(BinaryVector::weight).sum()
    }

    pub fn bit_len(&self) -> usize {
        self.blocks.iter().map(BinaryVector::len).sum()
    }

    /// Hamming distance summed over blocks.
    pub fn distance(&self, other: &PolyCodeword) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::dim(self.len(), other.len()));
        }
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| crate::f2::hamming_distance(a, b))
            .sum()
    }
}

/// Slices `S(δ+k)_k` into `G_0, …, G_μ` with `μ = ⌈δ/k⌉`; the last
/// `kμ - δ` rows of `G_μ` are zero.
pub fn partial_simplex_conv_generator(k: usize, delta: usize) -> Result<PolyGeneratorMatrix> {
    let code = partial_simplex_generator(k, delta)?;
    let s = code.generator();
    let mu = delta.div_ceil(k);
    let n = s.ncols();
    let mut coeffs = Vec::with_capacity(mu + 1);
    for i in 0..mu {
        coeffs.push(s.row_slice(i * k, (i + 1) * k));
    }
    let mut last = s.row_slice(mu * k, delta + k).rows().to_vec();
    last.resize(k, BinaryVector::zeros(n));
    coeffs.push(BinaryMatrix::from_rows(last)?);
    let g = PolyGeneratorMatrix {
        coeffs,
        k,
        n,
        delta,
        mu,
    };
    debug_assert_eq!(&g.stacked(), s);
    debug_assert_eq!(row_degrees(&g).iter().sum::<usize>(), delta);
    Ok(g)
}

/// Largest power of `z` with a nonzero entry in each row.
pub fn row_degrees(g: &PolyGeneratorMatrix) -> Vec<usize> {
    (0..g.k)
        .map(|r| {
            (0..=g.mu)
                .rev()
                .find(|&i| !g.coeffs[i].row(r).is_zero())
                .unwrap_or(0)
        })
        .collect()
}

fn check_blocks(blocks: &[BinaryVector], len: usize) -> Result<()> {
    match blocks.iter().find(|b| b.len() != len) {
        Some(b) => Err(Error::dim(len, b.len())),
        None => Ok(()),
    }
}

/// `c_t = Σ_{i ≤ min(t, μ)} u_{t-i} G_i`, without tail.
fn convolve(u: &[BinaryVector], g: &PolyGeneratorMatrix, out_len: usize) -> Vec<BinaryVector> {
    (0..out_len)
        .map(|t| {
            let mut c = BinaryVector::zeros(g.n);
            for i in 0..=g.mu.min(t) {
                if let Some(ui) = u.get(t - i) {
                    c.xor_assign(&f2_matvec(ui, &g.coeffs[i]).expect("checked block length"))
                        .expect("same width");
                }
            }
            c
        })
        .collect()
}

/// Zero-tail encoding: `μ` zero blocks are appended to `u`, giving `L + μ`
/// output blocks.
pub fn encode(u: &MessageSequence, g: &PolyGeneratorMatrix) -> Result<PolyCodeword> {
    check_blocks(&u.blocks, g.k)?;
    Ok(PolyCodeword {
        blocks: convolve(&u.blocks, g, u.len() + g.mu),
    })
}

/// `d_j^c`: minimum weight of `v_{[0,j]}` over inputs with `u_0 ≠ 0`, by
/// exhaustive search.
pub fn column_distance(g: &PolyGeneratorMatrix, j: usize) -> Result<usize> {
    if !g.g0_injective() {
        return Err(Error::UnsupportedCode(
            "column distance search needs G_0 to be injective".into(),
        ));
    }
    let bits = g.k * (j + 1);
    if bits > MAX_COLUMN_DISTANCE_BITS {
        return Err(Error::Resource(format!(
            "column distance search over 2^{bits} inputs"
        )));
    }
    // Depth-first over u_0..u_j keeping prefix weights.
    let inputs: Vec<BinaryVector> = (0..1u64 << g.k)
        .map(|v| BinaryVector::from_msb_int(v, g.k))
        .collect();
    let mut best = usize::MAX;
    let mut path: Vec<usize> = Vec::with_capacity(j + 1);
    fn dfs(
        g: &PolyGeneratorMatrix,
        inputs: &[BinaryVector],
        j: usize,
        path: &mut Vec<usize>,
        weight: usize,
        best: &mut usize,
    ) {
        if weight >= *best {
            return;
        }
        let t = path.len();
        if t > j {
            *best = weight;
            return;
        }
        let start = usize::from(t == 0);
        for x in start..inputs.len() {
            path.push(x);
            let mut c = BinaryVector::zeros(g.n);
            for i in 0..=g.mu.min(t) {
                c.xor_assign(&f2_matvec(&inputs[path[t - i]], &g.coeffs[i]).expect("k bits"))
                    .expect("same width");
            }
            dfs(g, inputs, j, path, weight + c.weight(), best);
            path.pop();
        }
    }
    dfs(g, &inputs, j, &mut path, 0, &mut best);
    Ok(best)
}

/// `d_j^c` for a window `J ≥ ⌊δ/k⌋`, where the column distances of a
/// partial simplex code have reached the free distance.
pub fn free_distance_estimate(g: &PolyGeneratorMatrix, window: usize) -> Result<usize> {
    let plateau = g.delta / g.k;
    if window < plateau {
        return Err(Error::param(format!(
            "window {window} is shorter than floor(delta/k) = {plateau}"
        )));
    }
    column_distance(g, window)
}

/// Closed-form column distances of the `(n, k, δ)` partial simplex
/// convolutional code: `n·2^(k-1)/(2^k-1) + min(j, ⌊δ/k⌋)·n/2`.
pub fn partial_simplex_column_distance(k: usize, delta: usize, j: usize) -> usize {
    let n = (1usize << delta) * ((1usize << k) - 1);
    let base = n * (1 << (k - 1)) / ((1 << k) - 1);
    base + j.min(delta / k) * n / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    fn blocks(c: &PolyCodeword) -> Vec<String> {
        c.blocks.iter().map(|b| b.to_string()).collect()
    }

    #[test]
    fn generator_1_2() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        assert_eq!((g.k(), g.n(), g.delta(), g.mu()), (1, 4, 2, 2));
        let rows: Vec<String> = g.coeffs().iter().map(|c| c.row(0).to_string()).collect();
        assert_eq!(rows, ["1111", "0101", "0011"]);
        assert_eq!(row_degrees(&g), vec![2]);
        assert_eq!(g.gtilde_rows(), 1);
        assert!(g.is_partial_simplex());
    }

    #[test]
    fn generator_3_1() {
        let g = partial_simplex_conv_generator(3, 1).unwrap();
        assert_eq!(g.mu(), 1);
        assert_eq!(
            *g.coeff(0),
            BinaryMatrix::from_strs(&["11111111000000", "01010101111100", "00110011010111"])
                .unwrap()
        );
        assert_eq!(
            *g.coeff(1),
            BinaryMatrix::from_strs(&["00001111001101", "00000000000000", "00000000000000"])
                .unwrap()
        );
        assert_eq!(row_degrees(&g), vec![1, 0, 0]);
        assert_eq!(partial_simplex_conv_generator(2, 2).unwrap().n(), 12);
    }

    #[test]
    fn generic_row_degrees_hold() {
        for k in 1..=4 {
            for delta in 1..=6 {
                let g = partial_simplex_conv_generator(k, delta).unwrap();
                assert_eq!(g.mu(), delta.div_ceil(k));
                assert_eq!(row_degrees(&g).iter().sum::<usize>(), delta);
                assert_eq!(
                    &g.stacked(),
                    partial_simplex_generator(k, delta).unwrap().generator()
                );
                assert!(g.is_partial_simplex());
                assert!(g.g0_injective());
            }
        }
    }

    #[test]
    fn constant_generator_has_zero_degrees() {
        let g = PolyGeneratorMatrix::from_coeffs(
            vec![BinaryMatrix::from_strs(&["110", "011"]).unwrap()],
            0,
        )
        .unwrap();
        assert_eq!(row_degrees(&g), vec![0, 0]);
        assert!(!g.is_partial_simplex());
    }

    #[test]
    fn encode_worked_example() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        let c = encode(&MessageSequence::from_bits(&[1, 0, 1, 1]), &g).unwrap();
        assert_eq!(blocks(&c), ["1111", "0101", "1100", "1010", "0110", "0011"]);
        let zero = encode(&MessageSequence::from_bits(&[0, 0, 0]), &g).unwrap();
        assert_eq!(zero.weight(), 0);
        assert_eq!(zero.len(), 5);
        assert!(encode(&MessageSequence::new(vec![bv("10")]), &g).is_err());
    }

    #[test]
    fn encode_is_linear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (k, delta) in [(1, 2), (2, 1), (2, 3), (3, 1)] {
            let g = partial_simplex_conv_generator(k, delta).unwrap();
            for _ in 0..20 {
                let len = rng.random_range(0..8);
                let rand_msg = |rng: &mut rand_chacha::ChaCha8Rng| {
                    MessageSequence::new(
                        (0..len)
                            .map(|_| BinaryVector::from_msb_int(rng.random_range(0..1 << k), k))
                            .collect(),
                    )
                };
                let (u, w) = (rand_msg(&mut rng), rand_msg(&mut rng));
                let sum = MessageSequence::new(
                    u.blocks
                        .iter()
                        .zip(&w.blocks)
                        .map(|(a, b)| a.xor(b).unwrap())
                        .collect(),
                );
                let lhs = encode(&sum, &g).unwrap();
                let (eu, ew) = (encode(&u, &g).unwrap(), encode(&w, &g).unwrap());
                let rhs: Vec<BinaryVector> = eu
                    .blocks
                    .iter()
                    .zip(&ew.blocks)
                    .map(|(a, b)| a.xor(b).unwrap())
                    .collect();
                assert_eq!(lhs.blocks, rhs);
            }
        }
    }

    #[test]
    fn column_distances_1_2() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        let d: Vec<usize> = (0..=4).map(|j| column_distance(&g, j).unwrap()).collect();
        assert_eq!(d, [4, 6, 8, 8, 8]);
        assert_eq!(free_distance_estimate(&g, 2).unwrap(), 8);
        assert!(free_distance_estimate(&g, 1).is_err());
    }

    #[test]
    fn column_distances_small_codes() {
        let g21 = partial_simplex_conv_generator(2, 1).unwrap();
        assert_eq!(column_distance(&g21, 0).unwrap(), 4);
        assert_eq!(free_distance_estimate(&g21, 1).unwrap(), 4);
        let g11 = partial_simplex_conv_generator(1, 1).unwrap();
        let d: Vec<usize> = (0..=3).map(|j| column_distance(&g11, j).unwrap()).collect();
        assert_eq!(d, [2, 3, 3, 3]);
        assert_eq!(free_distance_estimate(&g11, 1).unwrap(), 3);
        assert!(matches!(column_distance(&g21, 12), Err(Error::Resource(_))));
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for (k, delta) in [
            (1, 1),
            (1, 2),
            (1, 3),
            (2, 1),
            (2, 2),
            (3, 1),
            (2, 3),
            (1, 4),
        ] {
            let g = partial_simplex_conv_generator(k, delta).unwrap();
            let mut prev = 0;
            for j in 0..=delta / k + 2 {
                let d = column_distance(&g, j).unwrap();
                assert_eq!(
                    d,
                    partial_simplex_column_distance(k, delta, j),
                    "({k},{delta}) j={j}"
                );
                assert!(d >= prev);
                prev = d;
            }
        }
    }

    #[test]
    fn terminated_codewords_respect_free_distance() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        for len in 1..=4usize {
            for u in 1u64..1 << len {
                let bits: Vec<u8> = (0..len).map(|i| ((u >> i) & 1) as u8).collect();
                let c = encode(&MessageSequence::from_bits(&bits), &g).unwrap();
                assert!(c.weight() >= 8, "u={bits:?} weight {}", c.weight());
            }
        }
    }
}
