//! Plain-text block files.
//!
//! ```text
//! k n delta mu L
//! <block 0 as 0/1 characters>
//! <block 1>
//! ...
//! ```
//!
//! Message files hold `L` blocks of `k` bits; codeword and received files hold
//! `L + μ` blocks of `n` bits.

use crate::conv::{MessageSequence, PolyCodeword, PolyGeneratorMatrix};
use crate::f2::BinaryVector;
use crate::{Error, Result};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub k: usize,
    pub n: usize,
    pub delta: usize,
    pub mu: usize,
    pub length: usize,
}

impl BlockHeader {
    pub fn for_generator(g: &PolyGeneratorMatrix, length: usize) -> Self {
        BlockHeader {
            k: g.k(),
            n: g.n(),
            delta: g.delta(),
            mu: g.mu(),
            length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Message,
    Codeword,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFile {
    pub header: BlockHeader,
    pub blocks: Vec<BinaryVector>,
}

impl BlockFile {
    pub fn message(header: BlockHeader, msg: &MessageSequence) -> Self {
        BlockFile {
            header,
            blocks: msg.blocks.clone(),
        }
    }

    pub fn codeword(header: BlockHeader, word: &PolyCodeword) -> Self {
        BlockFile {
            header,
            blocks: word.blocks.clone(),
        }
    }

    pub fn kind(&self) -> BlockKind {
        let h = self.header;
        if self.blocks.len() == h.length + h.mu && self.blocks.iter().all(|b| b.len() == h.n) {
            BlockKind::Codeword
        } else {
            BlockKind::Message
        }
    }

    pub fn to_message(&self) -> Result<MessageSequence> {
        if self.kind() != BlockKind::Message {
            return Err(Error::Parse {
                line: 1,
                msg: "file holds codeword blocks, expected a message".into(),
            });
        }
        Ok(MessageSequence::new(self.blocks.clone()))
    }

    pub fn to_codeword(&self) -> Result<PolyCodeword> {
        if self.kind() != BlockKind::Codeword {
            return Err(Error::Parse {
                line: 1,
                msg: "file holds message blocks, expected a codeword".into(),
            });
        }
        Ok(PolyCodeword::new(self.blocks.clone()))
    }
}

impl fmt::Display for BlockFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.header;
        writeln!(f, "{} {} {} {} {}", h.k, h.n, h.delta, h.mu, h.length)?;
        for b in &self.blocks {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

impl FromStr for BlockFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, htext) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let fields = htext
            .split_whitespace()
            .map(|f| {
                f.parse::<usize>()
                    .map_err(|_| parse_err(hline, format!("header field {f:?} is not a count")))
            })
            .collect::<Result<Vec<_>>>()?;
        let [k, n, delta, mu, length] = fields[..] else {
            return Err(parse_err(hline, "header must be \"k n delta mu L\""));
        };
        let header = BlockHeader {
            k,
            n,
            delta,
            mu,
            length,
        };

        let mut blocks = Vec::new();
        for (i, text) in lines {
            let b: BinaryVector = text.parse().map_err(|e| match e {
                Error::Parse { msg, .. } => parse_err(i, msg),
                other => other,
            })?;
            let ok = if blocks.is_empty() {
                b.len() == k || b.len() == n
            } else {
                b.len() == blocks.first().map_or(0, BinaryVector::len)
            };
            if !ok {
                return Err(parse_err(
                    i,
                    format!("block of width {} does not match k={k} or n={n}", b.len()),
                ));
            }
            blocks.push(b);
        }
        let width = blocks.first().map_or(k, BinaryVector::len);
        let expected = if width == n && n != k {
            length + mu
        } else {
            length
        };
        if blocks.len() != expected {
            return Err(parse_err(
                hline,
                format!(
                    "expected {expected} blocks of width {width}, found {}",
                    blocks.len()
                ),
            ));
        }
        Ok(BlockFile { header, blocks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::{encode, partial_simplex_conv_generator};

    #[test]
    fn round_trips_message_and_codeword() {
        let g = partial_simplex_conv_generator(1, 2).unwrap();
        let msg = MessageSequence::from_bits(&[1, 0, 1, 1]);
        let h = BlockHeader::for_generator(&g, 4);
        let mf = BlockFile::message(h, &msg);
        let text = mf.to_string();
        assert_eq!(text, "1 4 2 2 4\n1\n0\n1\n1\n");
        let parsed: BlockFile = text.parse().unwrap();
        assert_eq!(parsed.kind(), BlockKind::Message);
        assert_eq!(parsed.to_message().unwrap(), msg);

        let cw = encode(&msg, &g).unwrap();
        let cf = BlockFile::codeword(h, &cw);
        assert_eq!(
            cf.to_string(),
            "1 4 2 2 4\n1111\n0101\n1100\n1010\n0110\n0011\n"
        );
        let parsed: BlockFile = cf.to_string().parse().unwrap();
        assert_eq!(parsed.to_codeword().unwrap(), cw);
        assert!(parsed.to_message().is_err());
    }

    #[test]
    fn malformed_files() {
        assert!("".parse::<BlockFile>().is_err());
        assert!("1 4 2 2".parse::<BlockFile>().is_err());
        assert!("1 4 2 x 1\n1".parse::<BlockFile>().is_err());
        let e = "1 4 2 2 1\n1111\n01a1\n0000"
            .parse::<BlockFile>()
            .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        assert!("1 4 2 2 1\n1111\n010\n0000".parse::<BlockFile>().is_err());
        // Wrong block count.
        assert!("1 4 2 2 2\n1111\n0101".parse::<BlockFile>().is_err());
    }
}
