//! Protocol orchestration: initialization, the two-tier auction, verification
//! and patching.

mod config;
mod execute;
mod ordering;
mod privacy;
mod tamper;
mod verify;
mod world;

pub use config::{Assignment, AuctionConfig, ConfigError, KEYS as CONFIG_KEYS};
pub use execute::{
    global_auction, internal_auction, top_two, AuctionOutcome, GlobalResult, InternalResult,
    Placed, Run, Slot, StageTimings,
};
pub use ordering::{
    expected_comparisons, prove_ordering, verify_ordering, OrderingEntry, OrderingTranscript,
    TranscriptError,
};
pub use privacy::{scan_board, Leak, Secrets};
pub use tamper::{Fault, FaultPlan, UnknownFault};
pub use verify::{
    patch_verify, verify_auction, verify_payment, verify_winner, AttestedLookup, Rejection,
};
pub use world::{AdNetwork, Agent, Auctioneer, Bidder, InitTimings, Member, World};

use crate::bulletin::BoardError;
use crate::group::{GroupError, OtError};
use crate::ope::OpeError;
use crate::paillier::PaillierError;
use crate::rangeproof::RangeProofError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuctionError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ot(#[from] OtError),
    #[error(transparent)]
    Ope(#[from] OpeError),
    #[error(transparent)]
    Paillier(#[from] PaillierError),
    #[error(transparent)]
    RangeProof(#[from] RangeProofError),
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error("{fault} does not apply to this auction: {reason}")]
    NotApplicable { fault: Fault, reason: String },
    #[error("protocol failure: {0}")]
    Protocol(String),
}
