//! Binary symmetric channel, error injection and instrumented benchmarks.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with a 64-bit value. A
//! benchmark trial `i` uses the stream seeded with `seed ^ i` for both its
//! message and its channel errors, so reports do not depend on how trials are
//! scheduled.

use crate::conv::{encode, partial_simplex_conv_generator, MessageSequence, PolyCodeword};
use crate::f2::{to_bipolar, BinaryVector, BipolarVector};
use crate::ops::OpCount;
use crate::trellis::{ClassicViterbi, DecodeResult, ImprovedViterbi, TieRule};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;

pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub flip_probability: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(flip_probability: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip_probability) {
            return Err(Error::param(format!(
                "flip probability {flip_probability} outside [0, 1]"
            )));
        }
        Ok(ChannelConfig {
            flip_probability,
            seed,
        })
    }
}

/// Flips each bit independently with probability `p`, drawing from `rng`.
pub fn bsc_transmit_with<R: Rng>(c: &PolyCodeword, p: f64, rng: &mut R) -> PolyCodeword {
    let blocks = c
        .blocks
        .iter()
        .map(|b| {
            let mut out = b.clone();
            for i in 0..b.len() {
                if rng.random_bool(p) {
                    out.flip(i);
                }
            }
            out
        })
        .collect();
    PolyCodeword::new(blocks)
}

pub fn bsc_transmit(c: &PolyCodeword, cfg: ChannelConfig) -> Result<PolyCodeword> {
    let cfg = ChannelConfig::new(cfg.flip_probability, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(bsc_transmit_with(c, cfg.flip_probability, &mut rng))
}

/// Flips the listed bits; positions index the concatenated blocks.
pub fn inject_errors(c: &PolyCodeword, positions: &[usize]) -> Result<PolyCodeword> {
    let total = c.bit_len();
    let mut out = c.clone();
    let set: BTreeSet<usize> = positions.iter().copied().collect();
    for &pos in &set {
        if pos >= total {
            return Err(Error::param(format!("bit index {pos} outside 0..{total}")));
        }
        let mut rest = pos;
        for block in out.blocks.iter_mut() {
            if rest < block.len() {
                block.flip(rest);
                break;
            }
            rest -= block.len();
        }
    }
    Ok(out)
}

pub fn random_message<R: Rng>(k: usize, len: usize, rng: &mut R) -> MessageSequence {
    MessageSequence::new(
        (0..len)
            .map(|_| BinaryVector::from_msb_int(rng.random_range(0..1u64 << k), k))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    pub k: usize,
    pub delta: usize,
    pub n: usize,
    /// Message length `L`; the received word has `L + μ` blocks.
    pub length: usize,
    /// `N = L + μ - 1`.
    pub big_n: usize,
    pub trials: usize,
    pub p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderStats {
    pub decoder: String,
    /// Mean additions per trial.
    pub additions: f64,
    /// Mean comparisons per trial.
    pub comparisons: f64,
    /// Mean additions per steady-state trellis step.
    pub additions_per_step: f64,
    pub wall_ns: u64,
    pub bler: f64,
    pub ber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub params: BenchParams,
    pub rng: String,
    /// Trials on which the two decoders returned different decisions.
    pub disagreements: usize,
    pub decoders: Vec<DecoderStats>,
}

impl BenchReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    /// One row per decoder, parameters repeated on each row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let p = &self.params;
        let csv_err = |e: csv::Error| Error::Internal(e.to_string());
        w.write_record([
            "k",
            "delta",
            "n",
            "L",
            "N",
            "trials",
            "p",
            "seed",
            "decoder",
            "additions",
            "comparisons",
            "additions_per_step",
            "wall_ns",
            "bler",
            "ber",
        ])
        .map_err(csv_err)?;
        for d in &self.decoders {
            w.write_record([
                p.k.to_string(),
                p.delta.to_string(),
                p.n.to_string(),
                p.length.to_string(),
                p.big_n.to_string(),
                p.trials.to_string(),
                p.p.to_string(),
                p.seed.to_string(),
                d.decoder.clone(),
                d.additions.to_string(),
                d.comparisons.to_string(),
                d.additions_per_step.to_string(),
                d.wall_ns.to_string(),
                d.bler.to_string(),
                d.ber.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    /// The report with timing fields cleared; everything left is a pure
    /// function of the parameters.
    pub fn without_timing(&self) -> BenchReport {
        let mut r = self.clone();
        for d in &mut r.decoders {
            d.wall_ns = 0;
        }
        r
    }
}

#[derive(Default)]
struct Tally {
    ops: OpCount,
    steady_additions: u64,
    steady_steps: u64,
    wall_ns: u64,
    block_errors: u64,
    bit_errors: u64,
}

impl Tally {
    fn record(&mut self, res: &DecodeResult, sent: &MessageSequence, wall_ns: u64) {
        self.ops += res.op_count;
        self.steady_additions += res.steady_ops.additions;
        self.steady_steps += res.steady_steps as u64;
        self.wall_ns += wall_ns;
        let bits: u64 = res
            .message
            .blocks
            .iter()
            .zip(&sent.blocks)
            .map(|(a, b)| crate::f2::hamming_distance(a, b).expect("k-bit blocks") as u64)
            .sum();
        self.bit_errors += bits;
        self.block_errors += u64::from(bits > 0);
    }

    fn merge(&mut self, other: &Tally) {
        self.ops += other.ops;
        self.steady_additions += other.steady_additions;
        self.steady_steps += other.steady_steps;
        self.wall_ns += other.wall_ns;
        self.block_errors += other.block_errors;
        self.bit_errors += other.bit_errors;
    }

    fn stats(&self, name: &str, trials: usize, message_bits: usize) -> DecoderStats {
        let t = trials.max(1) as f64;
        DecoderStats {
            decoder: name.to_string(),
            additions: self.ops.additions as f64 / t,
            comparisons: self.ops.comparisons as f64 / t,
            additions_per_step: if self.steady_steps == 0 {
                0.0
            } else {
                self.steady_additions as f64 / self.steady_steps as f64
            },
            wall_ns: self.wall_ns,
            bler: self.block_errors as f64 / t,
            ber: if message_bits == 0 {
                0.0
            } else {
                self.bit_errors as f64 / (message_bits as f64 * t)
            },
        }
    }
}

/// Largest `trials · (L + μ) · n` accepted by [`run_bench`].
pub const MAX_BENCH_BITS: usize = 1 << 32;

/// Runs both decoders on identical seeded received words and aggregates
/// operation counts and error rates.
pub fn run_bench(
    k: usize,
    delta: usize,
    length: usize,
    trials: usize,
    p: f64,
    seed: u64,
) -> Result<BenchReport> {
    let cfg = ChannelConfig::new(p, seed)?;
    let g = partial_simplex_conv_generator(k, delta)?;
    if trials
        .checked_mul(length + g.mu())
        .and_then(|x| x.checked_mul(g.n()))
        .is_none_or(|bits| bits > MAX_BENCH_BITS)
    {
        return Err(Error::Resource(format!(
            "{trials} trials of {length} blocks at n={} is too large",
            g.n()
        )));
    }
    let classic = ClassicViterbi::new(&g)?;
    let improved = ImprovedViterbi::new(&g)?;

    let outcomes: Vec<Result<(Tally, Tally, bool)>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ trial);
            let msg = random_message(k, length, &mut rng);
            let sent = encode(&msg, &g)?;
            let received = bsc_transmit_with(&sent, cfg.flip_probability, &mut rng);
            let bipolar: Vec<BipolarVector> = received.blocks.iter().map(to_bipolar).collect();

            let start = Instant::now();
            let a = classic.decode(&received, TieRule::LowestBranchRank)?;
            let a_ns = start.elapsed().as_nanos() as u64;
            let start = Instant::now();
            let b = improved.decode(&bipolar, TieRule::LowestBranchRank)?;
            let b_ns = start.elapsed().as_nanos() as u64;

            let mut ta = Tally::default();
            let mut tb = Tally::default();
            ta.record(&a, &msg, a_ns);
            tb.record(&b, &msg, b_ns);
            Ok((ta, tb, a.same_decision(&b)))
        })
        .collect();

    let mut classic_tally = Tally::default();
    let mut improved_tally = Tally::default();
    let mut disagreements = 0;
    for o in outcomes {
        let (a, b, agree) = o?;
        classic_tally.merge(&a);
        improved_tally.merge(&b);
        disagreements += usize::from(!agree);
    }
    let message_bits = k * length;
    Ok(BenchReport {
        params: BenchParams {
            k,
            delta,
            n: g.n(),
            length,
            big_n: length + g.mu() - 1,
            trials,
            p,
            seed,
        },
        rng: RNG_NAME.to_string(),
        disagreements,
        decoders: vec![
            classic_tally.stats("classic", trials, message_bits),
            improved_tally.stats("improved", trials, message_bits),
        ],
    })
}

/// Steady-state cost of one trellis step for both decoders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub k: usize,
    pub delta: usize,
    pub n: usize,
    pub classic_additions: f64,
    pub improved_additions: f64,
    pub ratio: f64,
    /// `2·n·log2(n) + 2·2^(δ+k)`.
    pub improved_bound: f64,
}

/// Constant in front of `2^(δ+k)` in [`ScalingRow::improved_bound`].
pub const SCALING_C1: f64 = 2.0;

pub fn improved_step_bound(k: usize, delta: usize) -> f64 {
    let n = ((1usize << (delta + k)) - (1usize << delta)) as f64;
    2.0 * n * n.log2() + SCALING_C1 * (1u64 << (delta + k)) as f64
}

/// Decodes one seeded noisy word per `(k, δ)` with both decoders and records
/// the steady-state additions per step.
pub fn scaling_table(
    ks: &[usize],
    deltas: &[usize],
    length: usize,
    p: f64,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    let params: Vec<(usize, usize)> = ks
        .iter()
        .flat_map(|&k| deltas.iter().map(move |&d| (k, d)))
        .collect();
    params
        .into_par_iter()
        .map(|(k, delta)| {
            let g = partial_simplex_conv_generator(k, delta)?;
            if length <= g.mu() {
                return Err(Error::param(format!(
                    "length {length} leaves no steady-state steps for memory {}",
                    g.mu()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let msg = random_message(k, length, &mut rng);
            let received = bsc_transmit_with(&encode(&msg, &g)?, p, &mut rng);
            let bipolar: Vec<BipolarVector> = received.blocks.iter().map(to_bipolar).collect();
            let a = ClassicViterbi::new(&g)?.decode(&received, TieRule::LowestBranchRank)?;
            let b = ImprovedViterbi::new(&g)?.decode(&bipolar, TieRule::LowestBranchRank)?;
            if !a.same_decision(&b) {
                return Err(Error::Internal(format!(
                    "decoders disagree at k={k}, delta={delta}"
                )));
            }
            let ca = a.steady_additions_per_step().expect("steady steps exist");
            let ib = b.steady_additions_per_step().expect("steady steps exist");
            Ok(ScalingRow {
                k,
                delta,
                n: g.n(),
                classic_additions: ca,
                improved_additions: ib,
                ratio: ib / ca,
                improved_bound: improved_step_bound(k, delta),
            })
        })
        .collect()
}

pub fn scaling_csv(rows: &[ScalingRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
