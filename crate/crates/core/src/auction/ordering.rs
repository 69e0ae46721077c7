//! The ordering transcript: one difference range proof per comparison
//! `⟨max, sec⟩`, then `⟨sec, i⟩` for every other commitment in board order.
//! Comparison `k` consumes test set `k`.

use std::fmt::Write as _;

use num_bigint::BigUint;

use super::verify::Rejection;
use super::world::Auctioneer;
use super::AuctionError;
use crate::bulletin::{Board, Commitment, MarkRole};
use crate::paillier::PublicKey;
use crate::rangeproof::{prove_range, verify_difference, RangeProof, RangeProofError};

const MAGIC: &str = "era-ordering";
const VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingEntry {
    /// 1-based comparison index; also the test set id.
    pub index: u32,
    /// Board seq of the commitment claimed to be larger.
    pub hi: u64,
    pub lo: u64,
    pub proof: RangeProof,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderingTranscript {
    pub entries: Vec<OrderingEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ordering transcript line {line}: {reason}")]
pub struct TranscriptError {
    pub line: usize,
    pub reason: String,
}

impl OrderingTranscript {
    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\t{VERSION}\t{}\n", self.entries.len());
        for e in &self.entries {
            writeln!(out, "{}\t{}\t{}\t{}", e.index, e.hi, e.lo, e.proof.encode())
                .expect("write to string");
        }
        out
    }

    /// Parses a transcript; proofs are decoded under the auctioneer key `pk`.
    pub fn from_text(pk: &PublicKey, text: &str) -> Result<Self, TranscriptError> {
        let err = |line: usize, reason: String| TranscriptError { line, reason };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let count = match header.split('\t').collect::<Vec<_>>()[..] {
            [MAGIC, VERSION, n] => n
                .parse::<usize>()
                .map_err(|_| err(1, format!("bad entry count {n:?}")))?,
            _ => return Err(err(1, "not an ordering transcript".into())),
        };
        let mut entries = Vec::with_capacity(count);
        for (line, text) in lines {
            let mut fields = text.splitn(4, '\t');
            let mut next = |what: &str| {
                fields
                    .next()
                    .ok_or_else(|| err(line, format!("missing {what}")))
            };
            let index = next("index")?
                .parse()
                .map_err(|_| err(line, "bad index".into()))?;
            let hi = next("hi seq")?
                .parse()
                .map_err(|_| err(line, "bad hi seq".into()))?;
            let lo = next("lo seq")?
                .parse()
                .map_err(|_| err(line, "bad lo seq".into()))?;
            let proof =
                RangeProof::decode(pk, next("proof")?).map_err(|e| err(line, e.to_string()))?;
            entries.push(OrderingEntry {
                index,
                hi,
                lo,
                proof,
            });
        }
        if entries.len() != count {
            return Err(err(
                entries.len() + 2,
                format!("expected {count} entries, found {}", entries.len()),
            ));
        }
        Ok(OrderingTranscript { entries })
    }
}

/// The `(hi, lo)` seq pairs the marks on `board` call for, in order.
/// Empty when there is no second-price mark.
pub fn expected_comparisons(board: &Board) -> Option<Vec<(u64, u64)>> {
    let (_, max) = board.mark(MarkRole::Max)?;
    let Some((_, sec)) = board.mark(MarkRole::Sec) else {
        return Some(Vec::new());
    };
    let (max, sec) = (max.commitment_seq, sec.commitment_seq);
    let mut pairs = vec![(max, sec)];
    pairs.extend(
        board
            .commitments()
            .map(|(seq, _, _)| seq)
            .filter(|&s| s != max && s != sec)
            .map(|s| (sec, s)),
    );
    Some(pairs)
}

/// The auctioneer decrypts every commitment and proves each comparison.
/// A comparison that does not hold still gets a proof, over the low `t` bits
/// of the difference, which the verifier will reject.
pub fn prove_ordering(
    auctioneer: &Auctioneer,
    board: &Board,
) -> Result<OrderingTranscript, AuctionError> {
    let pairs = expected_comparisons(board)
        .ok_or_else(|| AuctionError::Protocol("ordering needs the max mark".into()))?;
    let keys = &auctioneer.keys;
    let pk = keys.public();
    let open = |seq: u64| -> Result<(BigUint, crate::paillier::Randomness), AuctionError> {
        let (_, c) = board
            .commitment(seq)
            .ok_or_else(|| AuctionError::Protocol(format!("seq {seq} is not a commitment")))?;
        Ok((keys.decrypt(&c.c)?, keys.recover_randomness(&c.c)?))
    };
    let mut entries = Vec::with_capacity(pairs.len());
    for (k, (hi, lo)) in (1u32..).zip(pairs) {
        let ts = auctioneer
            .test_sets
            .iter()
            .find(|ts| ts.id() == k)
            .ok_or_else(|| AuctionError::Protocol(format!("no test set {k}")))?;
        let (x_hi, r_hi) = open(hi)?;
        let (x_lo, r_lo) = open(lo)?;
        let d = (x_hi + pk.n() - x_lo) % pk.n();
        let r = r_hi.mul(&r_lo.inverse(pk)?, pk);
        let proof = match prove_range(pk, &d, &r, ts) {
            Err(RangeProofError::Unprovable) => {
                let low = d % (BigUint::from(1u32) << ts.t());
                prove_range(pk, &low, &r, ts)?
            }
            other => other?,
        };
        entries.push(OrderingEntry {
            index: k,
            hi,
            lo,
            proof,
        });
    }
    Ok(OrderingTranscript { entries })
}

fn commitment_at(board: &Board, seq: u64) -> Option<&Commitment> {
    board.commitment(seq).map(|(_, c)| c)
}

/// Step 2: every expected comparison has an accepting proof against its own
/// test set.
pub fn verify_ordering(board: &Board, transcript: &OrderingTranscript) -> Result<(), Rejection> {
    let pairs = expected_comparisons(board)
        .ok_or_else(|| Rejection::Incomplete("max mark missing".into()))?;
    let header = board.header();
    let pk = &header.auctioneer_key;
    let fail = |index: u32, lo: u64, reason: String| Rejection::Ordering {
        index,
        position: commitment_at(board, lo).map_or(0, |c| c.position),
        reason,
    };
    for (k, &(hi, lo)) in (1u32..).zip(&pairs) {
        let Some(entry) = transcript.entries.get(k as usize - 1) else {
            return Err(fail(k, lo, "no proof for this comparison".into()));
        };
        if (entry.index, entry.hi, entry.lo) != (k, hi, lo) {
            return Err(fail(
                k,
                lo,
                format!(
                    "proof is for comparison {} of seqs ({}, {})",
                    entry.index, entry.hi, entry.lo
                ),
            ));
        }
        let (Some(c_hi), Some(c_lo)) = (commitment_at(board, hi), commitment_at(board, lo)) else {
            return Err(fail(k, lo, "marked seq is not a commitment".into()));
        };
        let ts = board
            .test_set(k)
            .ok_or_else(|| fail(k, lo, format!("test set {k} is not on the board")))?;
        verify_difference(pk, &c_hi.c, &c_lo.c, &entry.proof, ts, header.t)
            .map_err(|e| fail(k, lo, e.to_string()))?;
    }
    if transcript.entries.len() > pairs.len() {
        return Err(Rejection::Ordering {
            index: pairs.len() as u32 + 1,
            position: 0,
            reason: "transcript has more proofs than comparisons".into(),
        });
    }
    Ok(())
}
