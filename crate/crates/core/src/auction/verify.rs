//! Public verification of a finished auction and the auctioneer's patching audit.

use std::collections::{BTreeMap, BTreeSet};

use super::execute::{top_two, InternalResult, Slot};
use super::ordering::{verify_ordering, OrderingTranscript};
use crate::bulletin::{Board, MarkRole, PartyId, Reveal, RevealKind};
use crate::ope::MappedBidLookup;
use crate::paillier::{KeyPair, PublicKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("step 1: board is incomplete: {0}")]
    Incomplete(String),
    #[error("step 1: winner check failed: {0}")]
    Winner(String),
    #[error("step 1: payment check failed: {0}")]
    Payment(String),
    #[error("step 2: comparison {index} (bidder position {position}) failed: {reason}")]
    Ordering {
        index: u32,
        position: u32,
        reason: String,
    },
}

impl Rejection {
    pub fn step(&self) -> u8 {
        match self {
            Rejection::Ordering { .. } => 2,
            _ => 1,
        }
    }
}

/// Mapped payment as vouched for by the agent's attestation on the board.
pub struct AttestedLookup<'a>(pub &'a Board);

impl MappedBidLookup for AttestedLookup<'_> {
    fn mapped_bid(&self, cents: u64) -> Option<u64> {
        match self.0.reveal(RevealKind::MappedPayment)? {
            (
                PartyId::Auctioneer,
                Reveal::MappedPayment {
                    payment_cents,
                    mapped,
                    ..
                },
            ) if *payment_cents == cents => Some(*mapped),
            _ => None,
        }
    }
}

/// Re-encrypts the claimed winner identity under the revealed network key and
/// randomness and compares it with the max-marked identity ciphertext.
pub fn verify_winner(board: &Board) -> Result<(), Rejection> {
    let incomplete = |m: &str| Rejection::Incomplete(m.into());
    let winner = |m: String| Rejection::Winner(m);
    let outcome = board.outcome().ok_or_else(|| incomplete("no outcome"))?;
    let (author, mark) = board
        .mark(MarkRole::Max)
        .ok_or_else(|| incomplete("no max mark"))?;
    let PartyId::Network(j) = author else {
        return Err(winner(format!("max mark posted by {author}")));
    };
    if outcome.winner_network != j {
        return Err(winner(format!(
            "outcome names network {}, max mark is from network {j}",
            outcome.winner_network
        )));
    }
    let (_, commitment) = board
        .commitment(mark.commitment_seq)
        .ok_or_else(|| winner("max mark does not point at a commitment".into()))?;
    let (revealer, reveal) = board
        .reveal(RevealKind::Winner)
        .ok_or_else(|| incomplete("no winner reveal"))?;
    let Reveal::Winner { n_j, r2 } = reveal else {
        unreachable!("reveal kind")
    };
    if revealer != author {
        return Err(winner(format!(
            "winner reveal posted by {revealer}, not {author}"
        )));
    }
    let key = board
        .header()
        .network(j)
        .map(|n| &n.key)
        .filter(|k| k.n() == n_j)
        .ok_or_else(|| winner("revealed modulus is not the network's".into()))?;
    let reencrypted = reencrypt(key, outcome.winner, r2.value())
        .map_err(|e| winner(format!("cannot re-encrypt identity: {e}")))?;
    if reencrypted != commitment.id {
        return Err(winner(format!(
            "identity {} does not open the marked commitment",
            outcome.winner
        )));
    }
    Ok(())
}

fn reencrypt(
    key: &PublicKey,
    m: u64,
    r: &num_bigint::BigUint,
) -> Result<crate::paillier::Ciphertext, crate::paillier::PaillierError> {
    key.encrypt_u64(m, &key.randomness(r.clone())?)
}

/// Re-encrypts the mapped payment under the auctioneer key and revealed
/// randomness and compares it with the sec-marked bid ciphertext.
pub fn verify_payment(board: &Board, lookup: &dyn MappedBidLookup) -> Result<(), Rejection> {
    let payment = |m: String| Rejection::Payment(m);
    let outcome = board
        .outcome()
        .ok_or_else(|| Rejection::Incomplete("no outcome".into()))?;
    let Some((_, mark)) = board.mark(MarkRole::Sec) else {
        if board.commitments().count() > 1 {
            return Err(Rejection::Incomplete("no sec mark".into()));
        }
        if outcome.payment_cents != 0 {
            return Err(payment(format!(
                "sole bidder must pay 0, outcome says {}",
                outcome.payment_cents
            )));
        }
        return Ok(());
    };
    let max_seq = board.mark(MarkRole::Max).map(|(_, m)| m.commitment_seq);
    if max_seq == Some(mark.commitment_seq) {
        return Err(payment(
            "max and sec marks point at the same commitment".into(),
        ));
    }
    let (_, commitment) = board
        .commitment(mark.commitment_seq)
        .ok_or_else(|| payment("sec mark does not point at a commitment".into()))?;
    let mapped = lookup.mapped_bid(outcome.payment_cents).ok_or_else(|| {
        payment(format!(
            "agent has no mapped bid for payment {}",
            outcome.payment_cents
        ))
    })?;
    let Some((PartyId::Auctioneer, Reveal::Payment { r1 })) = board.reveal(RevealKind::Payment)
    else {
        return Err(Rejection::Incomplete(
            "no payment reveal from the auctioneer".into(),
        ));
    };
    let key = &board.header().auctioneer_key;
    let reencrypted = reencrypt(key, mapped, r1.value())
        .map_err(|e| payment(format!("cannot re-encrypt payment: {e}")))?;
    if reencrypted != commitment.c {
        return Err(payment(format!(
            "payment {} does not open the marked commitment",
            outcome.payment_cents
        )));
    }
    Ok(())
}

/// Steps 1 and 2 from public data only.
pub fn verify_auction(
    board: &Board,
    transcript: &OrderingTranscript,
    lookup: &dyn MappedBidLookup,
) -> Result<(), Rejection> {
    verify_winner(board)?;
    verify_payment(board, lookup)?;
    verify_ordering(board, transcript)
}

/// Step 3. The auctioneer opens every commitment, recomputes each network's
/// top two and blames every network whose signed result disagrees, then
/// checks that each mark was posted on the commitment the submitted results
/// select. An empty list points at the auctioneer.
pub fn patch_verify(keys: &KeyPair, board: &Board, results: &[InternalResult]) -> Vec<u32> {
    let header = board.header();
    let mut blamed = BTreeSet::new();

    let mut truth: BTreeMap<u32, Vec<Slot>> = BTreeMap::new();
    let mut owner_of_position = BTreeMap::new();
    let mut seq_of_position = BTreeMap::new();
    for (seq, net, c) in board.commitments() {
        owner_of_position.insert(c.position, net);
        seq_of_position.insert(c.position, seq);
        // An unopenable commitment is charged to its poster.
        match keys.decrypt(&c.c).ok().and_then(|m| u64::try_from(m).ok()) {
            Some(mapped) => truth.entry(net).or_default().push(Slot {
                mapped,
                position: c.position,
            }),
            None => {
                blamed.insert(net);
            }
        }
    }

    let mut accepted = Vec::new();
    for net in &header.networks {
        let submitted: Vec<&InternalResult> =
            results.iter().filter(|r| r.network == net.id).collect();
        let expected = top_two(truth.get(&net.id).cloned().unwrap_or_default());
        match (submitted.as_slice(), expected) {
            ([], (None, _)) => {}
            ([r], (Some(top), second))
                if r.verify(&net.vk, &header.group) && r.top == top && r.second == second =>
            {
                accepted.push(*r);
            }
            _ => {
                blamed.insert(net.id);
                if let [r] = submitted.as_slice() {
                    if r.verify(&net.vk, &header.group) {
                        accepted.push(*r);
                    }
                }
            }
        }
    }

    let (max, sec) = top_two(accepted.iter().flat_map(|r| r.slots()));
    for (role, slot) in [(MarkRole::Max, max), (MarkRole::Sec, sec)] {
        let expected_seq = slot.and_then(|s| seq_of_position.get(&s.position).copied());
        match (board.mark(role), expected_seq) {
            (None, None) => {}
            (Some((author, mark)), expected) if expected != Some(mark.commitment_seq) => {
                if let PartyId::Network(j) = author {
                    blamed.insert(j);
                }
            }
            (None, Some(_)) => {
                if let Some(&j) = slot.and_then(|s| owner_of_position.get(&s.position)) {
                    blamed.insert(j);
                }
            }
            _ => {}
        }
    }
    blamed.into_iter().collect()
}
