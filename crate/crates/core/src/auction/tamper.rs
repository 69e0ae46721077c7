//! Injected misbehaviour for soundness testing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::execute::{top_two, Slot};
use super::world::World;
use super::AuctionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    /// The auctioneer names the second-highest bidder as winner.
    WrongWinner,
    /// The auctioneer charges one bid step more than the second price.
    InflatedPayment,
    /// The owning networks mark each other's commitment.
    SwappedMarks,
    /// The network owning the top bid reports its internal result without it.
    ForgedInternalResult,
    /// A network posts a commitment above the highest bid for a non-marked member.
    CommitmentSubstitution,
}

impl Fault {
    pub const ALL: [Fault; 5] = [
        Fault::WrongWinner,
        Fault::InflatedPayment,
        Fault::SwappedMarks,
        Fault::ForgedInternalResult,
        Fault::CommitmentSubstitution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fault::WrongWinner => "wrong-winner",
            Fault::InflatedPayment => "inflated-payment",
            Fault::SwappedMarks => "swapped-marks",
            Fault::ForgedInternalResult => "forged-internal-result",
            Fault::CommitmentSubstitution => "commitment-substitution",
        }
    }

    /// How the fault is realised on `world`, or why it cannot be.
    pub fn plan(self, world: &World) -> Result<FaultPlan, AuctionError> {
        let not = |reason: &str| AuctionError::NotApplicable {
            fault: self,
            reason: reason.into(),
        };
        let (max, sec) = honest_top_two(world);
        let max = max.ok_or_else(|| not("no bidders"))?;
        let owner = |s: Slot| world.bidder(s.position).expect("bidder").network;
        let mut plan = FaultPlan::default();
        match self {
            Fault::WrongWinner | Fault::SwappedMarks => {
                let sec = sec.ok_or_else(|| not("needs a second bidder"))?;
                plan.blame = if self == Fault::SwappedMarks {
                    sorted([owner(max), owner(sec)])
                } else {
                    Vec::new()
                };
            }
            Fault::InflatedPayment => {
                if let Some(sec) = sec {
                    let cents = world.agent.table.unmap(sec.mapped)?;
                    if cents + world.config.z_step_cents > world.config.z_max_cents {
                        return Err(not("payment is already the largest bid"));
                    }
                }
            }
            Fault::ForgedInternalResult => {
                let sec = sec.ok_or_else(|| not("needs a second bidder"))?;
                if sec.mapped == max.mapped {
                    return Err(not("top bid is tied"));
                }
                plan.forge = Some(owner(max));
                plan.blame = vec![owner(max)];
            }
            Fault::CommitmentSubstitution => {
                let sec = sec.ok_or_else(|| not("needs a second bidder"))?;
                let raised = max.mapped + 1;
                if raised >> world.config.t != 0 {
                    return Err(not("no room above the top mapped bid"));
                }
                let victim = world
                    .bidders
                    .iter()
                    .find(|b| b.position != max.position && b.position != sec.position)
                    .ok_or_else(|| not("needs a third bidder"))?;
                plan.substitute = Some((victim.position, raised));
                plan.blame = vec![victim.network];
            }
        }
        Ok(plan)
    }

    pub fn applies(self, world: &World) -> bool {
        self.plan(world).is_ok()
    }
}

fn sorted<const N: usize>(ids: [u32; N]) -> Vec<u32> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn honest_top_two(world: &World) -> (Option<Slot>, Option<Slot>) {
    top_two(world.bidders.iter().map(|b| Slot {
        mapped: b.mapped,
        position: b.position,
    }))
}

/// Concrete deviations for one fault and the networks patching must blame.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultPlan {
    /// Commitment position whose bid plaintext is replaced, and by what.
    pub substitute: Option<(u32, u64)>,
    /// Network that reports a forged internal result.
    pub forge: Option<u32>,
    /// Ascending network ids.
    pub blame: Vec<u32>,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown fault kind {0:?}")]
pub struct UnknownFault(pub String);

impl FromStr for Fault {
    type Err = UnknownFault;
    fn from_str(s: &str) -> Result<Self, UnknownFault> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownFault(s.into()))
    }
}
