//! Privacy-preserving, verifiable second-price ad auctions.
//!
//! Bidders fetch order-preserving mapped bids from an agent by oblivious
//! transfer and commit to them with Paillier encryption on a signed bulletin
//! board. Ad networks run internal auctions, the auctioneer a global one, and
//! anyone can check the outcome from the board and a transcript of range
//! proofs.

pub mod arith;
pub mod auction;
pub mod bulletin;
pub mod group;
pub mod harness;
pub mod ope;
pub mod paillier;
pub mod rangeproof;
pub mod schnorr;

pub use auction::{
    AuctionConfig, AuctionError, AuctionOutcome, Fault, InternalResult, OrderingTranscript,
    Rejection, Run, World,
};
pub use bulletin::{Board, BoardError, PartyId};
pub use group::GroupParams;
pub use ope::{BidSpace, OpeTable};
pub use paillier::{Ciphertext, KeyPair, PublicKey, Randomness};
pub use rangeproof::{ComparisonProof, RangeProof, TestSet};
