use crate::{CodeArgs, Command, DecoderChoice, EncodeArgs, Format};
use psc::channel::{bsc_transmit, random_message, run_bench, ChannelConfig};
use psc::conv::{
    column_distance, encode, partial_simplex_column_distance, partial_simplex_conv_generator,
    PolyCodeword, PolyGeneratorMatrix, MAX_COLUMN_DISTANCE_BITS,
};
use psc::f2::{to_bipolar, BipolarVector};
use psc::io::{BlockFile, BlockHeader, BlockKind};
use psc::trellis::{improved_viterbi_decode, viterbi_decode, DecodeResult, TieRule};
use psc::MAX_CODE_DIM;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Mismatch(String),
    Core(psc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(..) => 2,
            CliError::Mismatch(_) => 4,
            CliError::Core(e) => match e {
                psc::Error::Parameter(_) | psc::Error::UnsupportedCode(_) => 2,
                psc::Error::Parse { .. } | psc::Error::Dimension { .. } => 3,
                psc::Error::Resource(_) => 5,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Mismatch(m) => write!(f, "verification failed: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<psc::Error> for CliError {
    fn from(e: psc::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Construct { code, jmax, out } => construct(code, jmax, out.as_deref()),
        Command::Encode(args) => encode_cmd(args),
        Command::Transmit {
            input,
            p,
            seed,
            out,
        } => transmit(&input, p, seed, out.as_deref()),
        Command::Decode {
            input,
            decoder,
            out,
        } => decode(&input, decoder, out.as_deref()),
        Command::VerifyDistances { code, jmax } => verify_distances(code, jmax),
        Command::Bench {
            code,
            length,
            trials,
            p,
            seed,
            format,
            out,
        } => bench(code, length, trials, p, seed, format, out.as_deref()),
    }
}

fn generator(k: u32, delta: u32) -> CliResult<PolyGeneratorMatrix> {
    let (k, delta) = (k as usize, delta as usize);
    if k + delta > MAX_CODE_DIM {
        return Err(CliError::Usage(format!(
            "k + delta = {} exceeds {MAX_CODE_DIM}",
            k + delta
        )));
    }
    Ok(partial_simplex_conv_generator(k, delta)?)
}

fn check_probability(p: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--p {p} outside [0, 1]")))
    }
}

fn read_blocks(path: &Path) -> CliResult<BlockFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(text.parse()?)
}

/// Rebuilds the generator named by a file header and checks `n` and `μ`.
fn generator_for(file: &BlockFile) -> CliResult<PolyGeneratorMatrix> {
    let h = file.header;
    let bad = |msg: String| CliError::Core(psc::Error::Parse { line: 1, msg });
    if h.k == 0 || h.delta == 0 || h.k + h.delta > MAX_CODE_DIM {
        return Err(bad(format!(
            "unsupported header k={} delta={}",
            h.k, h.delta
        )));
    }
    let g = partial_simplex_conv_generator(h.k, h.delta)?;
    if g.n() != h.n || g.mu() != h.mu {
        return Err(bad(format!(
            "header n={} mu={} does not match k={} delta={} (n={}, mu={})",
            h.n,
            h.mu,
            h.k,
            h.delta,
            g.n(),
            g.mu()
        )));
    }
    Ok(g)
}

fn codeword_of(file: &BlockFile) -> CliResult<PolyCodeword> {
    if file.kind() != BlockKind::Codeword {
        return Err(CliError::Core(psc::Error::Parse {
            line: 1,
            msg: format!(
                "expected {} blocks of width {}",
                file.header.length + file.header.mu,
                file.header.n
            ),
        }));
    }
    Ok(file.to_codeword()?)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.to_path_buf(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn construct(code: CodeArgs, jmax: Option<usize>, out: Option<&Path>) -> CliResult<()> {
    let g = generator(code.k, code.delta)?;
    let (k, delta) = (g.k(), g.delta());
    let jmax = jmax.unwrap_or(delta / k + 2);
    let mut s = String::new();
    writeln!(
        s,
        "k = {k}, delta = {delta}, n = {}, mu = {}",
        g.n(),
        g.mu()
    )
    .unwrap();
    for (i, c) in g.coeffs().iter().enumerate() {
        writeln!(s, "G_{i}").unwrap();
        write!(s, "{c}").unwrap();
    }
    writeln!(s, "stacked ({} x {})", delta + k, g.n()).unwrap();
    write!(s, "{}", g.stacked()).unwrap();
    writeln!(s, "j d_j^c").unwrap();
    for j in 0..=jmax {
        writeln!(s, "{j} {}", partial_simplex_column_distance(k, delta, j)).unwrap();
    }
    emit(out, &s)
}

fn encode_cmd(args: EncodeArgs) -> CliResult<()> {
    let (header, g, msg) = match &args.input {
        Some(path) => {
            let file = read_blocks(path)?;
            let g = generator_for(&file)?;
            if file.kind() != BlockKind::Message || file.blocks.iter().any(|b| b.len() != g.k()) {
                return Err(CliError::Core(psc::Error::Parse {
                    line: 2,
                    msg: format!("expected message blocks of width {}", g.k()),
                }));
            }
            let msg = file.to_message()?;
            (file.header, g, msg)
        }
        None => {
            let (Some(k), Some(delta), Some(length)) = (args.k, args.delta, args.length) else {
                return Err(CliError::Usage(
                    "encode needs --in or all of --k, --delta, --length".into(),
                ));
            };
            let g = generator(k, delta)?;
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let msg = random_message(g.k(), length, &mut rng);
            (BlockHeader::for_generator(&g, length), g, msg)
        }
    };
    let cw = encode(&msg, &g)?;
    emit(
        args.out.as_deref(),
        &BlockFile::codeword(header, &cw).to_string(),
    )
}

fn transmit(input: &Path, p: f64, seed: u64, out: Option<&Path>) -> CliResult<()> {
    check_probability(p)?;
    let file = read_blocks(input)?;
    generator_for(&file)?;
    let cw = codeword_of(&file)?;
    let received = bsc_transmit(&cw, ChannelConfig::new(p, seed)?)?;
    let flips = cw.distance(&received)?;
    eprintln!("flipped {flips} of {} bits", cw.bit_len());
    emit(
        out,
        &BlockFile::codeword(file.header, &received).to_string(),
    )
}

fn ops_line(name: &str, r: &DecodeResult) -> String {
    let per_step = r
        .steady_additions_per_step()
        .map_or_else(|| "n/a".to_string(), |x| format!("{x:.1}"));
    format!(
        "{name}: additions {} comparisons {} steady additions/step {per_step}",
        r.op_count.additions, r.op_count.comparisons
    )
}

fn decode(input: &Path, choice: DecoderChoice, out: Option<&Path>) -> CliResult<()> {
    let file = read_blocks(input)?;
    let g = generator_for(&file)?;
    let r = codeword_of(&file)?;
    let bipolar = || {
        r.blocks
            .iter()
            .map(to_bipolar)
            .collect::<Vec<BipolarVector>>()
    };
    let tie = TieRule::LowestBranchRank;
    let mut lines = Vec::new();
    let result = match choice {
        DecoderChoice::Classic => {
            let a = viterbi_decode(&r, &g, tie)?;
            lines.push(ops_line("classic", &a));
            a
        }
        DecoderChoice::Improved => {
            let b = improved_viterbi_decode(&bipolar(), &g, tie)?;
            lines.push(ops_line("improved", &b));
            b
        }
        DecoderChoice::Both => {
            let a = viterbi_decode(&r, &g, tie)?;
            let b = improved_viterbi_decode(&bipolar(), &g, tie)?;
            lines.push(ops_line("classic", &a));
            lines.push(ops_line("improved", &b));
            if !a.same_decision(&b) {
                for l in &lines {
                    println!("{l}");
                }
                return Err(CliError::Mismatch(format!(
                    "classic and improved decoders disagree (metrics {} and {})",
                    a.metric, b.metric
                )));
            }
            b
        }
    };
    let words: Vec<String> = result
        .message
        .blocks
        .iter()
        .map(|b| b.to_string())
        .collect();
    println!("message {}", words.join(" "));
    println!("metric {}", result.metric);
    for l in &lines {
        println!("{l}");
    }
    if let Some(path) = out {
        let header = BlockHeader::for_generator(&g, file.header.length);
        let text = BlockFile::message(header, &result.message).to_string();
        fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    }
    Ok(())
}

fn verify_distances(code: CodeArgs, jmax: Option<usize>) -> CliResult<()> {
    let g = generator(code.k, code.delta)?;
    let (k, delta) = (g.k(), g.delta());
    let jmax = jmax.unwrap_or(delta / k + 2);
    if k * (jmax + 1) > MAX_COLUMN_DISTANCE_BITS {
        return Err(psc::Error::Resource(format!(
            "column distance search over 2^{} inputs",
            k * (jmax + 1)
        ))
        .into());
    }
    println!("j brute closed status");
    let mut failed = Vec::new();
    for j in 0..=jmax {
        let brute = column_distance(&g, j)?;
        let closed = partial_simplex_column_distance(k, delta, j);
        let status = if brute == closed { "PASS" } else { "FAIL" };
        println!("{j} {brute} {closed} {status}");
        if brute != closed {
            failed.push(j);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "column distances differ at j = {failed:?}"
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn bench(
    code: CodeArgs,
    length: usize,
    trials: usize,
    p: f64,
    seed: u64,
    format: Format,
    out: Option<&Path>,
) -> CliResult<()> {
    check_probability(p)?;
    let g = generator(code.k, code.delta)?;
    if length == 0 || trials == 0 {
        return Err(CliError::Usage(
            "--length and --trials must be positive".into(),
        ));
    }
    let report = run_bench(g.k(), g.delta(), length, trials, p, seed)?;
    let text = match format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => report.to_csv()?,
    };
    emit(out, &text)?;
    if report.disagreements > 0 {
        return Err(CliError::Mismatch(format!(
            "decoders disagreed on {} of {trials} trials",
            report.disagreements
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let core = |e| CliError::Core(e).exit_code();
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Mismatch("x".into()).exit_code(), 4);
        assert_eq!(core(psc::Error::Parameter("x".into())), 2);
        assert_eq!(
            core(psc::Error::Parse {
                line: 1,
                msg: "x".into()
            }),
            3
        );
        assert_eq!(
            core(psc::Error::Dimension {
                expected: 4,
                actual: 3
            }),
            3
        );
        assert_eq!(core(psc::Error::Resource("x".into())), 5);
        assert_eq!(core(psc::Error::Internal("x".into())), 1);
    }

    #[test]
    fn oversized_codes_are_usage_errors() {
        assert_eq!(generator(10, 11).unwrap_err().exit_code(), 2);
        assert_eq!(generator(1, 2).unwrap().n(), 4);
    }

    #[test]
    fn header_must_name_the_code() {
        let ok: BlockFile = "1 4 2 2 1\n1111\n0101\n0011\n".parse().unwrap();
        assert!(generator_for(&ok).is_ok());
        let wrong_mu: BlockFile = "1 4 2 1 1\n1111\n0101\n".parse().unwrap();
        assert_eq!(generator_for(&wrong_mu).unwrap_err().exit_code(), 3);
        let zero: BlockFile = "0 4 2 2 0\n".parse().unwrap();
        assert_eq!(generator_for(&zero).unwrap_err().exit_code(), 3);
    }
}
