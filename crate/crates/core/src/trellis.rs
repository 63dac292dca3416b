//! Trellis construction and the two maximum-likelihood decoders.
//!
//! States carry `δ` bits: `(u_{t-1}, …, u_{t-μ+1}, ũ_{t-μ})`, ranked
//! lexicographically with the first component most significant. A branch out
//! of state `s` under input `u` is the `(δ+k)`-bit tuple `(u, s)` whose rank is
//! `u·2^δ + s`; its output block is `(u, s) · S(δ+k)_k` and its target state is
//! `rank >> k`. The `2^k` branches entering state `s'` therefore have the
//! consecutive ranks `s'·2^k .. (s'+1)·2^k`.
//!
//! Both decoders run the same add-compare-select step from `t = 1` with only
//! the zero state active at `t = 0`, and restrict inputs to zero in the
//! `μ` tail steps. They differ only in where branch metrics come from: the
//! classic decoder compares the received block against every branch output,
//! the improved decoder reads the steady-state steps from a precomputed
//! [`DistanceProfile`](crate::hadamard::DistanceProfile).

use crate::conv::{MessageSequence, PolyCodeword, PolyGeneratorMatrix};
use crate::f2::{
    f2_matvec, from_bipolar, hamming_distance, BinaryMatrix, BinaryVector, BipolarVector,
};
use crate::hadamard::BranchProfiler;
use crate::ops::OpCount;
use crate::{Error, Result, MAX_TRELLIS_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrellisConfig {
    pub k: usize,
    pub delta: usize,
    pub mu: usize,
    pub n: usize,
    pub state_count: usize,
}

impl TrellisConfig {
    pub fn branch_count(&self) -> usize {
        self.state_count << self.k
    }
}

/// How to pick among equal-metric paths entering a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Keep the entering branch with the smallest rank.
    #[default]
    LowestBranchRank,
    /// Uniform choice among the tied branches, driven by a ChaCha8 stream.
    SeededRandom(u64),
}

#[derive(Debug, Clone)]
pub struct Trellis {
    config: TrellisConfig,
    stacked: BinaryMatrix,
    /// Output block of every branch, by branch rank.
    outputs: Vec<BinaryVector>,
}

fn validate_generator(g: &PolyGeneratorMatrix) -> Result<()> {
    let (k, delta) = (g.k(), g.delta());
    if k == 0 {
        return Err(Error::param("generator has no rows"));
    }
    if delta + k > MAX_TRELLIS_DIM {
        return Err(Error::Resource(format!(
            "δ+k = {} exceeds the supported trellis size {MAX_TRELLIS_DIM}",
            delta + k
        )));
    }
    if g.mu() != delta.div_ceil(k) || k * g.mu() < delta {
        return Err(Error::UnsupportedCode(format!(
            "memory {} does not match generic row degrees for k={k}, delta={delta}",
            g.mu()
        )));
    }
    let gm = g.coeff(g.mu());
    if gm.rows()[g.gtilde_rows()..].iter().any(|r| !r.is_zero()) {
        return Err(Error::UnsupportedCode(
            "trailing rows of the last coefficient must be zero".into(),
        ));
    }
    Ok(())
}

impl Trellis {
    pub fn new(g: &PolyGeneratorMatrix) -> Result<Self> {
        validate_generator(g)?;
        let (k, delta) = (g.k(), g.delta());
        let stacked = g.stacked();
        let dim = k + delta;
        let outputs = (0..1u64 << dim)
            .map(|b| f2_matvec(&BinaryVector::from_msb_int(b, dim), &stacked))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trellis {
            config: TrellisConfig {
                k,
                delta,
                mu: g.mu(),
                n: g.n(),
                state_count: 1 << delta,
            },
            stacked,
            outputs,
        })
    }

    pub fn config(&self) -> &TrellisConfig {
        &self.config
    }

    #[inline]
    pub fn branch_rank(&self, state: usize, input: usize) -> usize {
        (input << self.config.delta) | state
    }

    #[inline]
    pub fn next_state(&self, rank: usize) -> usize {
        rank >> self.config.k
    }

    pub fn output(&self, rank: usize) -> &BinaryVector {
        &self.outputs[rank]
    }

    pub fn stacked(&self) -> &BinaryMatrix {
        &self.stacked
    }
}

/// Edge label of the trellis: `(u, state) · S(δ+k)_k`.
pub fn branch_output(
    state: usize,
    input: &BinaryVector,
    g: &PolyGeneratorMatrix,
) -> Result<BinaryVector> {
    let (k, delta) = (g.k(), g.delta());
    if input.len() != k {
        return Err(Error::dim(k, input.len()));
    }
    if state >= 1 << delta {
        return Err(Error::param(format!("state {state} outside 0..2^{delta}")));
    }
    let tuple = input.concat(&BinaryVector::from_msb_int(state as u64, delta));
    f2_matvec(&tuple, &g.stacked())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Survivor {
    pub pred: usize,
    pub input: usize,
    /// `d(r_{[0,t-1]}, c_{[0,t-1]})` along the survivor.
    pub metric: usize,
}

/// Survivors of one decode: `columns[t][s]` for `t = 0..=N+1`.
#[derive(Debug, Clone)]
pub struct SurvivorTable<'a> {
    trellis: &'a Trellis,
    columns: Vec<Vec<Option<Survivor>>>,
    message_len: usize,
    ops: OpCount,
    steady_ops: OpCount,
    steady_steps: usize,
}

impl SurvivorTable<'_> {
    /// Number of trellis steps, `N + 1`.
    pub fn steps(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn metrics(&self, t: usize) -> Vec<Option<usize>> {
        self.columns[t]
            .iter()
            .map(|s| s.map(|s| s.metric))
            .collect()
    }

    pub fn survivor(&self, t: usize, state: usize) -> Option<&Survivor> {
        self.columns[t][state].as_ref()
    }

    /// Input indices along the surviving path into the zero state, tail
    /// included.
    pub fn input_path(&self) -> Result<Vec<usize>> {
        let mut state = 0;
        let mut inputs = vec![0; self.steps()];
        for t in (1..=self.steps()).rev() {
            let s = self.columns[t][state].ok_or_else(|| {
                Error::Internal(format!("no survivor for state {state} at t={t}"))
            })?;
            inputs[t - 1] = s.input;
            state = s.pred;
        }
        if state != 0 {
            return Err(Error::Internal(
                "survivor path does not start in the zero state".into(),
            ));
        }
        Ok(inputs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub codeword: PolyCodeword,
    pub message: MessageSequence,
    pub metric: usize,
    pub op_count: OpCount,
    /// Operations spent in the steps `t ∈ [μ+1, L]`.
    pub steady_ops: OpCount,
    pub steady_steps: usize,
}

impl DecodeResult {
    pub fn same_decision(&self, other: &DecodeResult) -> bool {
        self.codeword == other.codeword
            && self.message == other.message
            && self.metric == other.metric
    }

    pub fn steady_additions_per_step(&self) -> Option<f64> {
        (self.steady_steps > 0).then(|| self.steady_ops.additions as f64 / self.steady_steps as f64)
    }
}

/// Walks back from the zero state at `t = N + 1`.
pub fn traceback(table: &SurvivorTable<'_>) -> Result<DecodeResult> {
    let trellis = table.trellis;
    let cfg = trellis.config;
    let final_metric = table.columns[table.steps()][0]
        .ok_or_else(|| Error::Internal("zero state not reached at the end".into()))?
        .metric;
    let inputs = table.input_path()?;
    let mut state = 0;
    let mut blocks = vec![BinaryVector::zeros(cfg.n); table.steps()];
    for t in (1..=table.steps()).rev() {
        let s = table.columns[t][state].expect("path checked above");
        blocks[t - 1] = trellis.output(trellis.branch_rank(s.pred, s.input)).clone();
        state = s.pred;
    }
    if inputs[table.message_len..].iter().any(|&u| u != 0) {
        return Err(Error::Internal(
            "nonzero input in the termination tail".into(),
        ));
    }
    let message = MessageSequence::new(
        inputs[..table.message_len]
            .iter()
            .map(|&u| BinaryVector::from_msb_int(u as u64, cfg.k))
            .collect(),
    );
    Ok(DecodeResult {
        codeword: PolyCodeword::new(blocks),
        message,
        metric: final_metric,
        op_count: table.ops,
        steady_ops: table.steady_ops,
        steady_steps: table.steady_steps,
    })
}

struct TieBreaker {
    rng: Option<ChaCha8Rng>,
}

impl TieBreaker {
    fn new(rule: TieRule) -> Self {
        TieBreaker {
            rng: match rule {
                TieRule::LowestBranchRank => None,
                TieRule::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
        }
    }

    /// Whether the `ties`-th equal candidate (counting the incumbent as 1)
    /// replaces the incumbent.
    fn take_tied(&mut self, ties: u32) -> bool {
        match self.rng.as_mut() {
            None => false,
            Some(rng) => rng.random_range(0..ties) == 0,
        }
    }
}

/// One add-compare-select step. `metric_of(rank, ops)` yields the branch
/// metric for an entering branch whose predecessor is active.
fn acs_step(
    trellis: &Trellis,
    prev: &[Option<Survivor>],
    zero_input_only: bool,
    mut metric_of: impl FnMut(usize, &mut OpCount) -> usize,
    ties: &mut TieBreaker,
    ops: &mut OpCount,
) -> Vec<Option<Survivor>> {
    let cfg = trellis.config;
    let state_mask = cfg.state_count - 1;
    let fan_in = 1usize << cfg.k;
    let mut next = vec![None; cfg.state_count];
    for (target, slot) in next.iter_mut().enumerate() {
        let mut best: Option<Survivor> = None;
        let mut tie_count = 1u32;
        for rank in target * fan_in..(target + 1) * fan_in {
            let input = rank >> cfg.delta;
            if zero_input_only && input != 0 {
                continue;
            }
            let pred = rank & state_mask;
            let Some(p) = prev[pred] else { continue };
            let metric = p.metric + metric_of(rank, ops);
            ops.add(1);
            let cand = Survivor {
                pred,
                input,
                metric,
            };
            match best {
                None => best = Some(cand),
                Some(b) => {
                    ops.cmp(1);
                    if metric < b.metric {
                        best = Some(cand);
                        tie_count = 1;
                    } else if metric == b.metric {
                        tie_count += 1;
                        if ties.take_tied(tie_count) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        *slot = best;
    }
    next
}

/// Branch metric source for one step.
enum StepMetrics<'r> {
    Direct(&'r BinaryVector),
    Profile(Vec<usize>),
}

fn run_trellis<'t, 'r>(
    trellis: &'t Trellis,
    blocks: usize,
    tie: TieRule,
    mut step_metrics: impl FnMut(usize, bool, &mut OpCount) -> Result<StepMetrics<'r>>,
) -> Result<SurvivorTable<'t>> {
    let cfg = trellis.config;
    if blocks < cfg.mu {
        return Err(Error::param(format!(
            "received {blocks} blocks, fewer than the memory {}",
            cfg.mu
        )));
    }
    let message_len = blocks - cfg.mu;
    let mut columns = Vec::with_capacity(blocks + 1);
    let mut start = vec![None; cfg.state_count];
    start[0] = Some(Survivor {
        pred: 0,
        input: 0,
        metric: 0,
    });
    columns.push(start);

    let mut ties = TieBreaker::new(tie);
    let mut ops = OpCount::ZERO;
    let mut steady_ops = OpCount::ZERO;
    let mut steady_steps = 0;
    for t in 1..=blocks {
        let steady = t > cfg.mu && t <= message_len;
        let mut step_ops = OpCount::ZERO;
        let metrics = step_metrics(t, steady, &mut step_ops)?;
        let next = match metrics {
            StepMetrics::Direct(r) => acs_step(
                trellis,
                &columns[t - 1],
                t > message_len,
                |rank, ops| {
                    ops.add(cfg.n as u64);
                    hamming_distance(r, trellis.output(rank)).expect("block width checked")
                },
                &mut ties,
                &mut step_ops,
            ),
            StepMetrics::Profile(p) => acs_step(
                trellis,
                &columns[t - 1],
                t > message_len,
                |rank, _| p[rank],
                &mut ties,
                &mut step_ops,
            ),
        };
        columns.push(next);
        ops += step_ops;
        if steady {
            steady_ops += step_ops;
            steady_steps += 1;
        }
    }
    Ok(SurvivorTable {
        trellis,
        columns,
        message_len,
        ops,
        steady_ops,
        steady_steps,
    })
}

/// Classic Viterbi decoder over hard-decision blocks.
#[derive(Debug, Clone)]
pub struct ClassicViterbi {
    trellis: Trellis,
}

impl ClassicViterbi {
    pub fn new(g: &PolyGeneratorMatrix) -> Result<Self> {
        Ok(ClassicViterbi {
            trellis: Trellis::new(g)?,
        })
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    pub fn survivors(&self, r: &PolyCodeword, tie: TieRule) -> Result<SurvivorTable<'_>> {
        let n = self.trellis.config.n;
        if let Some(b) = r.blocks.iter().find(|b| b.len() != n) {
            return Err(Error::dim(n, b.len()));
        }
        run_trellis(&self.trellis, r.len(), tie, |t, _, _| {
            Ok(StepMetrics::Direct(&r.blocks[t - 1]))
        })
    }

    pub fn decode(&self, r: &PolyCodeword, tie: TieRule) -> Result<DecodeResult> {
        traceback(&self.survivors(r, tie)?)
    }
}

/// Viterbi decoder whose steady-state branch metrics come from one
/// transform-based distance profile per step.
#[derive(Debug, Clone)]
pub struct ImprovedViterbi {
    trellis: Trellis,
    profiler: BranchProfiler,
}

impl ImprovedViterbi {
    pub fn new(g: &PolyGeneratorMatrix) -> Result<Self> {
        if !g.is_partial_simplex() {
            return Err(Error::UnsupportedCode(
                "the transform-based decoder needs a k-partial simplex generator".into(),
            ));
        }
        Ok(ImprovedViterbi {
            trellis: Trellis::new(g)?,
            profiler: BranchProfiler::new(g.k(), g.delta())?,
        })
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    pub fn survivors(&self, r: &[BipolarVector], tie: TieRule) -> Result<SurvivorTable<'_>> {
        let n = self.trellis.config.n;
        if let Some(b) = r.iter().find(|b| b.len() != n) {
            return Err(Error::dim(n, b.len()));
        }
        // Head and tail steps use direct metrics on the hard-decision image.
        let binary: Vec<BinaryVector> = r.iter().map(from_bipolar).collect();
        run_trellis(&self.trellis, r.len(), tie, |t, steady, ops| {
            if steady {
                Ok(StepMetrics::Profile(
                    self.profiler.profile(&r[t - 1], ops)?.metrics,
                ))
            } else {
                Ok(StepMetrics::Direct(&binary[t - 1]))
            }
        })
    }

    pub fn decode(&self, r: &[BipolarVector], tie: TieRule) -> Result<DecodeResult> {
        traceback(&self.survivors(r, tie)?)
    }
}

pub fn viterbi_decode(
    r: &PolyCodeword,
    g: &PolyGeneratorMatrix,
    tie: TieRule,
) -> Result<DecodeResult> {
    ClassicViterbi::new(g)?.decode(r, tie)
}

pub fn improved_viterbi_decode(
    r: &[BipolarVector],
    g: &PolyGeneratorMatrix,
    tie: TieRule,
) -> Result<DecodeResult> {
    ImprovedViterbi::new(g)?.decode(r, tie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::{encode, partial_simplex_conv_generator};
    use crate::f2::to_bipolar;

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    fn word(blocks: &[&str]) -> PolyCodeword {
        PolyCodeword::new(blocks.iter().map(|b| bv(b)).collect())
    }

    fn example_received() -> PolyCodeword {
        word(&["1111", "0101", "0100", "1010", "1111", "0011"])
    }

    #[test]
    fn branch_output_labels() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        assert_eq!(branch_output(0b10, &bv("0"), &g).unwrap(), bv("0101"));
        assert_eq!(branch_output(0b01, &bv("1"), &g).unwrap(), bv("1100"));
        assert_eq!(branch_output(0, &bv("0"), &g).unwrap(), bv("0000"));
        assert!(branch_output(4, &bv("0"), &g).is_err());
        assert!(branch_output(0, &bv("01"), &g).is_err());
    }

    #[test]
    fn trellis_outputs_agree_with_branch_output() {
        for (k, delta) in [(1, 2), (2, 1), (3, 1), (2, 3)] {
            let g = partial_simplex_conv_generator(k, delta).unwrap();
            let t = Trellis::new(&g).unwrap();
            for s in 0..1 << delta {
                for u in 0..1u64 << k {
                    let rank = t.branch_rank(s, u as usize);
                    assert_eq!(
                        t.output(rank),
                        &branch_output(s, &BinaryVector::from_msb_int(u, k), &g).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn example_trellis_metrics() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        let dec = ClassicViterbi::new(&g).unwrap();
        let r = example_received();
        let table = dec.survivors(&r, TieRule::LowestBranchRank).unwrap();
        assert_eq!(table.metrics(2), vec![Some(6), Some(0), Some(6), Some(4)]);
        assert_eq!(table.metrics(3), vec![Some(3), Some(5), Some(1), Some(7)]);
        for s in 0..4 {
            // Second entering path: odd predecessor.
            assert_eq!(table.survivor(3, s).unwrap().pred % 2, 1);
        }
        assert_eq!(table.input_path().unwrap(), vec![1, 0, 1, 1, 0, 0]);
        let res = traceback(&table).unwrap();
        assert_eq!(res.metric, 3);
        assert_eq!(res.message, MessageSequence::from_bits(&[1, 0, 1, 1]));
        assert_eq!(
            res.codeword,
            word(&["1111", "0101", "1100", "1010", "0110", "0011"])
        );
    }

    #[test]
    fn improved_matches_on_example() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        let r = example_received();
        let bip: Vec<BipolarVector> = r.blocks.iter().map(to_bipolar).collect();
        let a = viterbi_decode(&r, &g, TieRule::LowestBranchRank).unwrap();
        let b = improved_viterbi_decode(&bip, &g, TieRule::LowestBranchRank).unwrap();
        assert!(a.same_decision(&b));
        assert_eq!(b.metric, 3);
        assert_eq!(b.steady_steps, 2);
    }

    #[test]
    fn zero_word_and_single_error() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (k, delta) in [(1, 2), (2, 1), (2, 2), (3, 1)] {
            let g = partial_simplex_conv_generator(k, delta).unwrap();
            let dec = ClassicViterbi::new(&g).unwrap();
            let zero = PolyCodeword::new(vec![BinaryVector::zeros(g.n()); 5 + g.mu()]);
            let res = dec.decode(&zero, TieRule::LowestBranchRank).unwrap();
            assert_eq!(res.metric, 0);
            assert!(res.message.blocks.iter().all(BinaryVector::is_zero));

            let msg = MessageSequence::new(
                (0..6)
                    .map(|_| BinaryVector::from_msb_int(rng.random_range(0..1 << k), k))
                    .collect(),
            );
            let mut r = encode(&msg, &g).unwrap();
            let b = rng.random_range(0..r.len());
            r.blocks[b].flip(rng.random_range(0..g.n()));
            let res = dec.decode(&r, TieRule::LowestBranchRank).unwrap();
            assert_eq!(res.message, msg);
            assert_eq!(res.metric, 1);
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        assert!(matches!(
            viterbi_decode(&word(&["1111", "010"]), &g, TieRule::LowestBranchRank),
            Err(Error::Dimension { .. })
        ));
        assert!(viterbi_decode(&word(&["1111"]), &g, TieRule::LowestBranchRank).is_err());
        let custom = PolyGeneratorMatrix::from_coeffs(
            vec![
                BinaryMatrix::from_strs(&["1110"]).unwrap(),
                BinaryMatrix::from_strs(&["0111"]).unwrap(),
            ],
            1,
        )
        .unwrap();
        assert!(matches!(
            improved_viterbi_decode(&[], &custom, TieRule::LowestBranchRank),
            Err(Error::UnsupportedCode(_))
        ));
        // The classic decoder accepts any generator with this shape.
        let r = encode(&MessageSequence::from_bits(&[1, 1, 0]), &custom).unwrap();
        let res = viterbi_decode(&r, &custom, TieRule::LowestBranchRank).unwrap();
        assert_eq!(res.message, MessageSequence::from_bits(&[1, 1, 0]));
    }

    #[test]
    fn message_length_zero() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        let r = word(&["0100", "0000"]);
        let res = viterbi_decode(&r, &g, TieRule::LowestBranchRank).unwrap();
        assert!(res.message.is_empty());
        assert_eq!(res.metric, 1);
    }

    #[test]
    fn random_ties_are_reproducible_and_still_optimal() {
        use rand::{Rng, SeedableRng};
        let g = partial_simplex_conv_generator(2, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..50u64 {
            let r = PolyCodeword::new(
                (0..8)
                    .map(|_| {
                        BinaryVector::from_bits(
                            &(0..12).map(|_| rng.random_range(0..2)).collect::<Vec<u8>>(),
                        )
                    })
                    .collect(),
            );
            let bip: Vec<BipolarVector> = r.blocks.iter().map(to_bipolar).collect();
            let lowest = viterbi_decode(&r, &g, TieRule::LowestBranchRank).unwrap();
            let a = viterbi_decode(&r, &g, TieRule::SeededRandom(trial)).unwrap();
            let b = improved_viterbi_decode(&bip, &g, TieRule::SeededRandom(trial)).unwrap();
            assert!(a.same_decision(&b));
            assert_eq!(a.metric, lowest.metric);
            assert_eq!(a.codeword.distance(&r).unwrap(), a.metric);
        }
    }
}
