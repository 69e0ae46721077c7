//! Two-tier auction execution and outcome resolution.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::ordering::{prove_ordering, OrderingTranscript};
use super::tamper::Fault;
use super::world::{AdNetwork, World};
use super::AuctionError;
use crate::bulletin::{Board, Mark, MarkRole, Outcome, PartyId, Payload, Reveal};
use crate::group::GroupParams;
use crate::schnorr::{Signature, SigningKey, VerifyingKey};

/// A mapped bid together with the position of its commitment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub mapped: u64,
    pub position: u32,
}

impl Slot {
    /// Higher mapped bid first; among equal bids the earlier registration.
    pub fn rank(&self, other: &Slot) -> Ordering {
        other
            .mapped
            .cmp(&self.mapped)
            .then(self.position.cmp(&other.position))
    }
}

/// Best two slots under [`Slot::rank`] in one pass.
pub fn top_two<I: IntoIterator<Item = Slot>>(slots: I) -> (Option<Slot>, Option<Slot>) {
    let mut first: Option<Slot> = None;
    let mut second: Option<Slot> = None;
    for s in slots {
        match first {
            Some(f) if s.rank(&f) != Ordering::Less => {
                if second.is_none_or(|x| s.rank(&x) == Ordering::Less) {
                    second = Some(s);
                }
            }
            _ => {
                second = first;
                first = Some(s);
            }
        }
    }
    (first, second)
}

/// A network's signed report of its two best members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InternalResult {
    pub network: u32,
    pub top: Slot,
    /// `None` for a single-member network; it counts as mapped bid 0.
    pub second: Option<Slot>,
    pub signature: Signature,
}

impl InternalResult {
    pub fn message(network: u32, top: &Slot, second: Option<&Slot>) -> Vec<u8> {
        let (sm, sp) = second.map_or((0, 0), |s| (s.mapped, s.position));
        format!(
            "era/internal\t{network}\t{}\t{}\t{sm}\t{sp}",
            top.mapped, top.position
        )
        .into_bytes()
    }

    pub fn sign(
        network: u32,
        top: Slot,
        second: Option<Slot>,
        key: &SigningKey,
        group: &GroupParams,
    ) -> Self {
        let signature = key.sign(group, &Self::message(network, &top, second.as_ref()));
        InternalResult {
            network,
            top,
            second,
            signature,
        }
    }

    pub fn verify(&self, vk: &VerifyingKey, group: &GroupParams) -> bool {
        vk.verify(
            group,
            &Self::message(self.network, &self.top, self.second.as_ref()),
            &self.signature,
        )
        .is_ok()
    }

    pub fn second_mapped(&self) -> u64 {
        self.second.map_or(0, |s| s.mapped)
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        std::iter::once(self.top).chain(self.second)
    }
}

/// First-tier auction inside one network. Empty networks report nothing.
pub fn internal_auction(network: &AdNetwork, group: &GroupParams) -> Option<InternalResult> {
    let slots = network.members.iter().map(|m| Slot {
        mapped: m.mapped,
        position: m.position,
    });
    let (top, second) = top_two(slots);
    Some(InternalResult::sign(
        network.id,
        top?,
        second,
        &network.signing,
        group,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placed {
    pub slot: Slot,
    pub network: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalResult {
    pub max: Placed,
    pub sec: Option<Placed>,
    /// Networks whose results were dropped for a bad signature or unknown sender.
    pub flagged: Vec<u32>,
}

/// Second-tier auction over the submitted pairs.
pub fn global_auction(
    registry: &[(u32, VerifyingKey)],
    group: &GroupParams,
    results: &[InternalResult],
) -> Result<GlobalResult, AuctionError> {
    let mut flagged = Vec::new();
    let mut placed = Vec::new();
    for r in results {
        let ok = registry
            .iter()
            .find(|(id, _)| *id == r.network)
            .is_some_and(|(_, vk)| r.verify(vk, group));
        if !ok {
            flagged.push(r.network);
            continue;
        }
        placed.extend(r.slots().map(|slot| Placed {
            slot,
            network: r.network,
        }));
    }
    let (first, second) = top_two(placed.iter().map(|p| p.slot));
    let find = |s: Slot| placed.iter().find(|p| p.slot == s).cloned();
    let max = first
        .and_then(find)
        .ok_or_else(|| AuctionError::Protocol("no valid internal results".into()))?;
    Ok(GlobalResult {
        max,
        sec: second.and_then(find),
        flagged,
    })
}

/// `(winner identity, payment)` plus the mapped pair the auctioneer saw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub winner: u64,
    pub payment_cents: u64,
    pub winner_network: u32,
    pub mapped_max: u64,
    /// 0 when there is no second bid.
    pub mapped_sec: u64,
}

/// Per-stage wall times of one execution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub internal: Vec<(u32, Duration)>,
    pub global: Duration,
    pub ordering_proofs: Duration,
}

impl StageTimings {
    /// Networks run in parallel, so the auction takes the slowest one plus the global stage.
    pub fn modelled_latency(&self) -> Duration {
        self.internal
            .iter()
            .map(|(_, d)| *d)
            .max()
            .unwrap_or_default()
            + self.global
    }
}

/// Everything produced by one execution.
#[derive(Debug, Clone)]
pub struct Run {
    pub board: Board,
    pub transcript: OrderingTranscript,
    pub results: Vec<InternalResult>,
    pub global: GlobalResult,
    pub outcome: AuctionOutcome,
    pub timings: StageTimings,
}

impl World {
    pub fn run(&self) -> Result<Run, AuctionError> {
        self.execute(None)
    }

    /// Builds the board from scratch and runs the auction, optionally with one
    /// injected misbehaviour. Honest runs are deterministic in the world state.
    pub fn execute(&self, fault: Option<Fault>) -> Result<Run, AuctionError> {
        let plan = match fault {
            Some(f) => Some(f.plan(self)?),
            None => None,
        };
        let substitute = plan.as_ref().and_then(|p| p.substitute);
        let (mut board, seq_of) = self.init_board(substitute)?;

        let mut timings = StageTimings::default();
        let mut results = Vec::new();
        for net in &self.networks {
            let start = Instant::now();
            let result = match plan.as_ref().and_then(|p| p.forge) {
                Some(j) if j == net.id => forged_internal_result(net, &self.group),
                _ => internal_auction(net, &self.group),
            };
            timings.internal.push((net.id, start.elapsed()));
            results.extend(result);
        }

        let start = Instant::now();
        let registry: Vec<(u32, VerifyingKey)> = self
            .networks
            .iter()
            .map(|n| (n.id, n.signing.verifying_key().clone()))
            .collect();
        let global = global_auction(&registry, &self.group, &results)?;
        timings.global = start.elapsed();

        let winner_net = self.network(global.max.network).expect("registered");
        let winner_member = winner_net.member(global.max.slot.position).ok_or_else(|| {
            AuctionError::Protocol("winner network cannot resolve identity".into())
        })?;
        let mut winner = winner_member.identity;
        let mut payment_cents = match &global.sec {
            Some(sec) => self.agent.table.unmap(sec.slot.mapped)?,
            None => 0,
        };
        match fault {
            Some(Fault::WrongWinner) => {
                let sec = global.sec.as_ref().expect("checked by plan");
                winner = self.bidder(sec.slot.position).expect("bidder").identity;
            }
            Some(Fault::InflatedPayment) => payment_cents += self.config.z_step_cents,
            _ => {}
        }
        let outcome = AuctionOutcome {
            winner,
            payment_cents,
            winner_network: global.max.network,
            mapped_max: global.max.slot.mapped,
            mapped_sec: global.sec.as_ref().map_or(0, |s| s.slot.mapped),
        };
        let a = &self.auctioneer.signing;
        board.post(
            PartyId::Auctioneer,
            a,
            Payload::Outcome(Outcome {
                winner: outcome.winner,
                payment_cents: outcome.payment_cents,
                winner_network: outcome.winner_network,
            }),
        )?;

        let mut marks = vec![(MarkRole::Max, &global.max)];
        if let Some(sec) = &global.sec {
            marks.push((MarkRole::Sec, sec));
        }
        if fault == Some(Fault::SwappedMarks) {
            let targets: Vec<&Placed> = marks.iter().rev().map(|(_, p)| *p).collect();
            marks = marks.iter().map(|(r, _)| *r).zip(targets).collect();
        }
        for (role, placed) in marks {
            let net = self.network(placed.network).expect("registered");
            board.post(
                PartyId::Network(net.id),
                &net.signing,
                Payload::Mark(Mark {
                    role,
                    commitment_seq: seq_of[placed.slot.position as usize],
                }),
            )?;
        }

        board.post(
            PartyId::Network(winner_net.id),
            &winner_net.signing,
            Payload::Reveal(Reveal::Winner {
                n_j: winner_net.keys.public().n().clone(),
                r2: winner_member.r2.clone(),
            }),
        )?;
        if let Some(sec) = &global.sec {
            let (_, commitment) = board
                .commitment(seq_of[sec.slot.position as usize])
                .expect("posted");
            let r1 = self.auctioneer.keys.recover_randomness(&commitment.c)?;
            board.post(
                PartyId::Auctioneer,
                a,
                Payload::Reveal(Reveal::Payment { r1 }),
            )?;
            let (mapped, attestation) = self.agent.attest(&self.group, payment_cents)?;
            board.post(
                PartyId::Auctioneer,
                a,
                Payload::Reveal(Reveal::MappedPayment {
                    payment_cents,
                    mapped,
                    attestation,
                }),
            )?;
        }

        let start = Instant::now();
        let transcript = prove_ordering(&self.auctioneer, &board)?;
        timings.ordering_proofs = start.elapsed();

        Ok(Run {
            board,
            transcript,
            results,
            global,
            outcome,
            timings,
        })
    }
}

/// The misreport used by the forged-result fault: the network hides its best member.
fn forged_internal_result(network: &AdNetwork, group: &GroupParams) -> Option<InternalResult> {
    let slots: Vec<Slot> = network
        .members
        .iter()
        .map(|m| Slot {
            mapped: m.mapped,
            position: m.position,
        })
        .collect();
    let (best, _) = top_two(slots.iter().copied());
    let best = best?;
    let (top, second) = top_two(slots.into_iter().filter(|s| *s != best));
    Some(InternalResult::sign(
        network.id,
        top?,
        second,
        &network.signing,
        group,
    ))
}
