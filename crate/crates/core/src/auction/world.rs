//! Parties and auction initialization.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{Assignment, AuctionConfig};
use super::AuctionError;
use crate::arith::derive_rng;
use crate::bulletin::{
    attestation_message, Board, BoardHeader, Commitment, NetworkEntry, PartyId, Payload,
};
use crate::group::{ot_query, GroupParams};
use crate::ope::{serve_mapped_bids, OpeTable};
use crate::paillier::{Ciphertext, KeyPair, Randomness};
use crate::rangeproof::{gen_test_set, TestSet};
use crate::schnorr::{Signature, SigningKey};

/// A bidder as registered, with the mapped bid it fetched from the agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bidder {
    /// Registration index, 1-based; also the position of its commitment.
    pub position: u32,
    pub identity: u64,
    pub bid_cents: u64,
    pub mapped: u64,
    pub network: u32,
    pub ad_tag: u64,
}

/// What a network keeps for one member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub position: u32,
    pub identity: u64,
    pub mapped: u64,
    /// Randomness of the bid ciphertext, under the auctioneer's key.
    pub r1: Randomness,
    /// Randomness of the identity ciphertext, under the network's key.
    pub r2: Randomness,
    pub c: Ciphertext,
    pub id: Ciphertext,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdNetwork {
    pub id: u32,
    pub keys: KeyPair,
    pub signing: SigningKey,
    pub members: Vec<Member>,
}

impl AdNetwork {
    pub fn member(&self, position: u32) -> Option<&Member> {
        self.members.iter().find(|m| m.position == position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub table: OpeTable,
    pub signing: SigningKey,
}

impl Agent {
    /// Signed statement that `payment_cents` maps to its table entry.
    pub fn attest(
        &self,
        group: &GroupParams,
        payment_cents: u64,
    ) -> Result<(u64, Signature), AuctionError> {
        let mapped = self.table.map(payment_cents)?;
        let sig = self
            .signing
            .sign(group, &attestation_message(payment_cents, mapped));
        Ok((mapped, sig))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Auctioneer {
    pub keys: KeyPair,
    pub signing: SigningKey,
    /// Test set `k` is used for the `k`-th ordering comparison.
    pub test_sets: Vec<TestSet>,
}

/// Wall time of the initialization phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InitTimings {
    pub setup: Duration,
    pub mapped_bid_gen: Duration,
    pub commitment_gen: Duration,
    pub test_set_gen: Duration,
}

/// Complete private state of every party after initialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct World {
    pub config: AuctionConfig,
    pub group: GroupParams,
    pub agent: Agent,
    pub auctioneer: Auctioneer,
    pub networks: Vec<AdNetwork>,
    pub bidders: Vec<Bidder>,
}

fn seed_bytes(seed: u64) -> [u8; 8] {
    seed.to_be_bytes()
}

impl World {
    pub fn init(config: &AuctionConfig) -> Result<Self, AuctionError> {
        Self::init_timed(config).map(|(w, _)| w)
    }

    /// Keys, bid mapping, bidders with OT-fetched mapped bids, commitments and
    /// test sets. Deterministic in the config.
    pub fn init_timed(config: &AuctionConfig) -> Result<(Self, InitTimings), AuctionError> {
        config.validate()?;
        let mut timings = InitTimings::default();
        let seed = seed_bytes(config.seed);
        let start = Instant::now();

        let group = GroupParams::generate(config.group_bits, &seed)?;
        let auctioneer_keys =
            KeyPair::generate(config.key_bits, &mut derive_rng(&seed, "keys/auctioneer"))?;
        let mut network_keys = Vec::with_capacity(config.w);
        for j in 1..=config.w {
            let mut rng = derive_rng(&seed, &format!("keys/network/{j}"));
            network_keys.push(KeyPair::generate(config.key_bits, &mut rng)?);
        }
        let space = config.bid_space()?;
        let ope_seed: u64 = derive_rng(&seed, "ope").gen();
        let agent = Agent {
            table: OpeTable::generate(space.clone(), config.t, ope_seed)?,
            signing: SigningKey::derive(&group, &seed, "agent"),
        };

        let mut rng = derive_rng(&seed, "bidders");
        let mut identities: Vec<u64> = (1..=config.l as u64).collect();
        identities.shuffle(&mut rng);
        let mut bidders = Vec::with_capacity(config.l);
        for (i, identity) in identities.into_iter().enumerate() {
            let alpha = rng.gen_range(1..=space.len());
            let network = match config.assignment {
                Assignment::RoundRobin => (i % config.w) as u32 + 1,
                Assignment::Random => rng.gen_range(1..=config.w as u32),
            };
            bidders.push(Bidder {
                position: i as u32 + 1,
                identity,
                bid_cents: space.value(alpha).expect("alpha in range"),
                mapped: 0,
                network,
                ad_tag: rng.gen(),
            });
        }
        timings.setup = start.elapsed();

        // Each bidder fetches its mapped bid; the agent only ever sees the query.
        let start = Instant::now();
        let mut agent_rng = derive_rng(&seed, "ot/agent");
        let z = space.len();
        for b in &mut bidders {
            let mut rng = derive_rng(&seed, &format!("ot/bidder/{}", b.position));
            let alpha = space.position(b.bid_cents).expect("bid in space");
            let (request, receiver) = ot_query(alpha, z, &group, &mut rng)?;
            let batch = serve_mapped_bids(&agent.table, &request, &group, &mut agent_rng)?;
            let mapped = receiver.recover(&batch, &group)?;
            b.mapped = u64::try_from(mapped)
                .map_err(|_| AuctionError::Protocol("recovered mapped bid out of range".into()))?;
        }
        timings.mapped_bid_gen = start.elapsed();

        let start = Instant::now();
        let apk = auctioneer_keys.public();
        let mut networks = Vec::with_capacity(config.w);
        for (j, keys) in (1..=config.w as u32).zip(network_keys) {
            let mut rng = derive_rng(&seed, &format!("commit/network/{j}"));
            let mut members = Vec::new();
            for b in bidders.iter().filter(|b| b.network == j) {
                let r1 = Randomness::sample(apk, &mut rng);
                let r2 = Randomness::sample(keys.public(), &mut rng);
                members.push(Member {
                    position: b.position,
                    identity: b.identity,
                    mapped: b.mapped,
                    c: apk.encrypt_u64(b.mapped, &r1)?,
                    id: keys.public().encrypt_u64(b.identity, &r2)?,
                    r1,
                    r2,
                });
            }
            networks.push(AdNetwork {
                id: j,
                signing: SigningKey::derive(&group, &seed, &format!("network/{j}")),
                keys,
                members,
            });
        }
        timings.commitment_gen = start.elapsed();

        let start = Instant::now();
        let mut rng = derive_rng(&seed, "test-sets");
        let test_sets = (1..config.l as u32)
            .map(|k| gen_test_set(apk, config.t, k, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        timings.test_set_gen = start.elapsed();

        let auctioneer = Auctioneer {
            signing: SigningKey::derive(&group, &seed, "auctioneer"),
            keys: auctioneer_keys,
            test_sets,
        };
        Ok((
            World {
                config: config.clone(),
                group,
                agent,
                auctioneer,
                networks,
                bidders,
            },
            timings,
        ))
    }

    pub fn network(&self, id: u32) -> Option<&AdNetwork> {
        self.networks.iter().find(|n| n.id == id)
    }

    pub fn bidder(&self, position: u32) -> Option<&Bidder> {
        self.bidders.get(position.checked_sub(1)? as usize)
    }

    pub fn header(&self) -> BoardHeader {
        BoardHeader {
            t: self.config.t,
            group: self.group.clone(),
            auctioneer_key: self.auctioneer.keys.public().clone(),
            auctioneer_vk: self.auctioneer.signing.verifying_key().clone(),
            agent_vk: self.agent.signing.verifying_key().clone(),
            networks: self
                .networks
                .iter()
                .map(|n| NetworkEntry {
                    id: n.id,
                    key: n.keys.public().clone(),
                    vk: n.signing.verifying_key().clone(),
                })
                .collect(),
        }
    }

    /// Board after initialization: the `l − 1` test sets, then one commitment
    /// per bidder in registration order. `substitute` replaces the bid
    /// plaintext of one position.
    pub(crate) fn init_board(
        &self,
        substitute: Option<(u32, u64)>,
    ) -> Result<(Board, Vec<u64>), AuctionError> {
        let mut board = Board::new(self.header(), &self.auctioneer.signing)?;
        for ts in &self.auctioneer.test_sets {
            board.post(
                PartyId::Auctioneer,
                &self.auctioneer.signing,
                Payload::TestSet(ts.public().clone()),
            )?;
        }
        let apk = self.auctioneer.keys.public();
        let mut seq_of_position = vec![0u64; self.bidders.len() + 1];
        for b in &self.bidders {
            let net = self.network(b.network).expect("bidder network exists");
            let m = net.member(b.position).expect("member exists");
            let c = match substitute {
                Some((pos, value)) if pos == b.position => {
                    apk.encrypt(&BigUint::from(value), &m.r1)?
                }
                _ => m.c.clone(),
            };
            let payload = Payload::Commitment(Commitment {
                position: b.position,
                c,
                id: m.id.clone(),
            });
            seq_of_position[b.position as usize] =
                board.post(PartyId::Network(net.id), &net.signing, payload)?;
        }
        Ok((board, seq_of_position))
    }
}
