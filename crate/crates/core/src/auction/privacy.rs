//! Scan of a board for plaintext bids and identities.
//!
//! Every value field of every post is compared numerically against the secret
//! values. Structural fields (sequence numbers, commitment positions, test set
//! ids, network ids) are indices, not secrets, and are skipped. The outcome and
//! the payment reveal legitimately carry the winner identity and the payment.

use std::collections::HashSet;

use num_bigint::BigUint;

use super::execute::AuctionOutcome;
use super::world::World;
use crate::bulletin::{Board, Payload, Reveal};
use crate::schnorr::Signature;

/// What must not appear in plaintext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Secrets {
    pub bids: HashSet<u64>,
    pub hidden_identities: HashSet<u64>,
    pub winner: u64,
    pub payment_cents: u64,
}

impl Secrets {
    /// Every original bid, and every identity but the winner's.
    pub fn of(world: &World, outcome: &AuctionOutcome) -> Self {
        Secrets {
            bids: world.bidders.iter().map(|b| b.bid_cents).collect(),
            hidden_identities: world
                .bidders
                .iter()
                .map(|b| b.identity)
                .filter(|&id| id != outcome.winner)
                .collect(),
            winner: outcome.winner,
            payment_cents: outcome.payment_cents,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leak {
    /// 0 for the header.
    pub seq: u64,
    pub field: &'static str,
    pub value: BigUint,
}

enum Role {
    /// Opaque group or ring element.
    Opaque,
    /// The published winner identity.
    Winner,
    /// The published payment.
    Payment,
}

fn sig_fields<'a>(sig: &'a Signature, out: &mut Vec<(&'static str, Role, &'a BigUint)>) {
    let (e, s) = sig.components();
    out.push(("signature.e", Role::Opaque, e));
    out.push(("signature.s", Role::Opaque, s));
}

fn payload_fields(payload: &Payload, out: &mut Vec<(&'static str, Role, BigUint)>) {
    let mut push = |name, role, v: &BigUint| out.push((name, role, v.clone()));
    match payload {
        Payload::TestSet(ts) => {
            for c in &ts.entries {
                push("testset.entry", Role::Opaque, c.value());
            }
        }
        Payload::Commitment(c) => {
            push("commitment.c", Role::Opaque, c.c.value());
            push("commitment.id", Role::Opaque, c.id.value());
        }
        Payload::Mark(_) => {}
        Payload::Outcome(o) => {
            push("outcome.winner", Role::Winner, &BigUint::from(o.winner));
            push(
                "outcome.payment",
                Role::Payment,
                &BigUint::from(o.payment_cents),
            );
        }
        Payload::Reveal(Reveal::Winner { n_j, r2 }) => {
            push("reveal.n_j", Role::Opaque, n_j);
            push("reveal.r2", Role::Opaque, r2.value());
        }
        Payload::Reveal(Reveal::Payment { r1 }) => push("reveal.r1", Role::Opaque, r1.value()),
        Payload::Reveal(Reveal::MappedPayment {
            payment_cents,
            mapped,
            attestation,
        }) => {
            push(
                "reveal.payment",
                Role::Payment,
                &BigUint::from(*payment_cents),
            );
            push("reveal.mapped", Role::Opaque, &BigUint::from(*mapped));
            let (e, s) = attestation.components();
            push("reveal.attestation.e", Role::Opaque, e);
            push("reveal.attestation.s", Role::Opaque, s);
        }
    }
}

fn check(
    secrets: &Secrets,
    seq: u64,
    field: &'static str,
    role: Role,
    value: &BigUint,
    leaks: &mut Vec<Leak>,
) {
    let Ok(v) = u64::try_from(value) else {
        return;
    };
    let allowed = match role {
        Role::Winner => v == secrets.winner,
        Role::Payment => v == secrets.payment_cents,
        Role::Opaque => false,
    };
    if allowed {
        return;
    }
    if secrets.bids.contains(&v) || secrets.hidden_identities.contains(&v) {
        leaks.push(Leak {
            seq,
            field,
            value: value.clone(),
        });
    }
}

/// Every value field on `board` that equals a secret.
pub fn scan_board(board: &Board, secrets: &Secrets) -> Vec<Leak> {
    let mut leaks = Vec::new();
    let h = board.header();
    let mut header: Vec<(&'static str, Role, &BigUint)> = vec![
        ("group.p", Role::Opaque, h.group.p()),
        ("group.rho", Role::Opaque, h.group.rho()),
        ("group.g", Role::Opaque, h.group.g()),
        ("group.h", Role::Opaque, h.group.h()),
        ("auctioneer.n", Role::Opaque, h.auctioneer_key.n()),
        ("auctioneer.vk", Role::Opaque, h.auctioneer_vk.value()),
        ("agent.vk", Role::Opaque, h.agent_vk.value()),
    ];
    for n in &h.networks {
        header.push(("network.n", Role::Opaque, n.key.n()));
        header.push(("network.vk", Role::Opaque, n.vk.value()));
    }
    for (field, role, v) in header {
        check(secrets, 0, field, role, v, &mut leaks);
    }
    for post in board.posts() {
        let mut fields = Vec::new();
        payload_fields(&post.payload, &mut fields);
        let mut sigs = Vec::new();
        sig_fields(&post.signature, &mut sigs);
        for (field, role, v) in fields {
            check(secrets, post.seq, field, role, &v, &mut leaks);
        }
        for (field, role, v) in sigs {
            check(secrets, post.seq, field, role, v, &mut leaks);
        }
    }
    leaks
}
