//! Append-only signed bulletin board.
//!
//! One auction per board. The file is line oriented:
//!
//! ```text
//! era-board  v1  t=..  p=..  rho=..  g=..  h=..  n=..  auctioneer_vk=..  agent_vk=..  net=<id>:<n>:<vk> ...  <sig>
//! <seq>  <author>  <kind>  <payload fields...>  <sig>
//! ...
//! end  <count>
//! ```
//!
//! Fields are tab separated and big integers are lowercase hex without
//! leading zeros. Each signature covers its line up to the preceding tab.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::{from_hex, to_hex};
use crate::group::GroupParams;
use crate::paillier::{Ciphertext, PublicKey, Randomness};
use crate::rangeproof::{format_ciphertext_list, parse_ciphertext_list, PublicTestSet};
use crate::schnorr::{Signature, SigningKey, VerifyingKey};

const MAGIC: &str = "era-board";
const VERSION: &str = "v1";
const TRAILER: &str = "end";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoardError {
    #[error("{author} may not post: {reason}")]
    Unauthorized { author: String, reason: String },
    #[error("rejected post: {0}")]
    Invalid(String),
    #[error("no post with seq {0}")]
    UnknownSeq(u64),
    #[error("signature on seq {0} does not verify")]
    BadSignature(u64),
    #[error("line {line}: malformed: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: sequence gap: expected {expected}, found {found}")]
    SeqGap {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: signature does not verify")]
    Signature { line: usize },
    #[error("line {line}: {reason}")]
    Rejected { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl BoardError {
    /// Line number for errors raised while loading a file.
    pub fn line(&self) -> Option<usize> {
        match self {
            BoardError::Malformed { line, .. }
            | BoardError::SeqGap { line, .. }
            | BoardError::Signature { line }
            | BoardError::Rejected { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartyId {
    Auctioneer,
    Agent,
    Network(u32),
    Bidder(u32),
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Auctioneer => f.write_str("auctioneer"),
            PartyId::Agent => f.write_str("agent"),
            PartyId::Network(j) => write!(f, "net:{j}"),
            PartyId::Bidder(i) => write!(f, "bidder:{i}"),
        }
    }
}

impl FromStr for PartyId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auctioneer" => return Ok(PartyId::Auctioneer),
            "agent" => return Ok(PartyId::Agent),
            _ => {}
        }
        let (kind, id) = s
            .split_once(':')
            .ok_or_else(|| format!("unknown party {s:?}"))?;
        let id = parse_dec(id).ok_or_else(|| format!("bad party id in {s:?}"))?;
        let id = u32::try_from(id).map_err(|_| format!("party id too large in {s:?}"))?;
        match kind {
            "net" => Ok(PartyId::Network(id)),
            "bidder" => Ok(PartyId::Bidder(id)),
            _ => Err(format!("unknown party {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MarkRole {
    Max,
    Sec,
}

impl MarkRole {
    fn as_str(self) -> &'static str {
        match self {
            MarkRole::Max => "max",
            MarkRole::Sec => "sec",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    /// Registration index of the bidder, 1-based.
    pub position: u32,
    /// Mapped bid under the auctioneer's key.
    pub c: Ciphertext,
    /// Identity under the owning network's key.
    pub id: Ciphertext,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    pub role: MarkRole,
    pub commitment_seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub winner: u64,
    pub payment_cents: u64,
    pub winner_network: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reveal {
    /// Posted by the winner's network: its modulus and the identity randomness.
    Winner { n_j: BigUint, r2: Randomness },
    /// Posted by the auctioneer: randomness of the marked second-price commitment.
    Payment { r1: Randomness },
    /// Posted by the auctioneer: the agent's signed statement that
    /// `payment_cents` maps to `mapped`.
    MappedPayment {
        payment_cents: u64,
        mapped: u64,
        attestation: Signature,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RevealKind {
    Winner,
    Payment,
    MappedPayment,
}

impl Reveal {
    pub fn kind(&self) -> RevealKind {
        match self {
            Reveal::Winner { .. } => RevealKind::Winner,
            Reveal::Payment { .. } => RevealKind::Payment,
            Reveal::MappedPayment { .. } => RevealKind::MappedPayment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payload {
    TestSet(PublicTestSet),
    Commitment(Commitment),
    Mark(Mark),
    Outcome(Outcome),
    Reveal(Reveal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostKind {
    TestSet,
    Commitment,
    Mark,
    Outcome,
    Reveal,
}

impl Payload {
    pub fn kind(&self) -> PostKind {
        match self {
            Payload::TestSet(_) => PostKind::TestSet,
            Payload::Commitment(_) => PostKind::Commitment,
            Payload::Mark(_) => PostKind::Mark,
            Payload::Outcome(_) => PostKind::Outcome,
            Payload::Reveal(_) => PostKind::Reveal,
        }
    }

    fn encode(&self) -> String {
        match self {
            Payload::TestSet(ts) => {
                format!(
                    "testset\t{}\t{}",
                    ts.id,
                    format_ciphertext_list(&ts.entries)
                )
            }
            Payload::Commitment(c) => format!(
                "commitment\t{}\t{}\t{}",
                c.position,
                c.c.to_hex(),
                c.id.to_hex()
            ),
            Payload::Mark(m) => format!("mark\t{}\t{}", m.role.as_str(), m.commitment_seq),
            Payload::Outcome(o) => format!(
                "outcome\t{}\t{}\t{}",
                o.winner, o.payment_cents, o.winner_network
            ),
            Payload::Reveal(Reveal::Winner { n_j, r2 }) => {
                format!("reveal\twinner\t{}\t{}", to_hex(n_j), r2.to_hex())
            }
            Payload::Reveal(Reveal::Payment { r1 }) => {
                format!("reveal\tpayment\t{}", r1.to_hex())
            }
            Payload::Reveal(Reveal::MappedPayment {
                payment_cents,
                mapped,
                attestation,
            }) => format!(
                "reveal\tmapped_payment\t{payment_cents}\t{}\t{}",
                to_hex(&BigUint::from(*mapped)),
                attestation.encode()
            ),
        }
    }
}

/// Bytes the agent signs to vouch that `payment_cents` maps to `mapped`.
pub fn attestation_message(payment_cents: u64, mapped: u64) -> Vec<u8> {
    format!("era/agent/mapped\t{payment_cents}\t{mapped:x}").into_bytes()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPost {
    pub seq: u64,
    pub author: PartyId,
    pub payload: Payload,
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkEntry {
    pub id: u32,
    pub key: PublicKey,
    pub vk: VerifyingKey,
}

/// Public parameters of one auction, fixed when the board is opened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardHeader {
    pub t: u32,
    pub group: GroupParams,
    pub auctioneer_key: PublicKey,
    pub auctioneer_vk: VerifyingKey,
    pub agent_vk: VerifyingKey,
    pub networks: Vec<NetworkEntry>,
}

impl BoardHeader {
    pub fn network(&self, id: u32) -> Option<&NetworkEntry> {
        self.networks.iter().find(|n| n.id == id)
    }

    fn encode_unsigned(&self) -> String {
        let g = &self.group;
        let mut out = format!(
            "{MAGIC}\t{VERSION}\tt={}\tp={}\trho={}\tg={}\th={}\tn={}\tauctioneer_vk={}\tagent_vk={}",
            self.t,
            to_hex(g.p()),
            to_hex(g.rho()),
            to_hex(g.g()),
            to_hex(g.h()),
            to_hex(self.auctioneer_key.n()),
            self.auctioneer_vk.to_hex(),
            self.agent_vk.to_hex(),
        );
        for net in &self.networks {
            out.push_str(&format!(
                "\tnet={}:{}:{}",
                net.id,
                to_hex(net.key.n()),
                net.vk.to_hex()
            ));
        }
        out
    }

    fn decode_unsigned(fields: &[&str]) -> Result<Self, String> {
        if fields.len() < 10 || fields[0] != MAGIC || fields[1] != VERSION {
            return Err(format!("expected '{MAGIC}<TAB>{VERSION}' header"));
        }
        let value = |i: usize, key: &str| -> Result<&str, String> {
            fields[i]
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| format!("expected {key}= in header field {}", i + 1))
        };
        let hex = |i: usize, key: &str| -> Result<BigUint, String> {
            from_hex(value(i, key)?).map_err(|e| format!("{key}: {e}"))
        };
        let t = parse_dec(value(2, "t")?)
            .and_then(|t| u32::try_from(t).ok())
            .ok_or("bad t")?;
        let group = GroupParams::new(hex(3, "p")?, hex(4, "rho")?, hex(5, "g")?, hex(6, "h")?)
            .map_err(|e| e.to_string())?;
        let auctioneer_key = PublicKey::new(hex(7, "n")?).map_err(|e| e.to_string())?;
        let vk = |i: usize, key: &str| -> Result<VerifyingKey, String> {
            VerifyingKey::from_value(&group, hex(i, key)?).map_err(|e| format!("{key}: {e}"))
        };
        let auctioneer_vk = vk(8, "auctioneer_vk")?;
        let agent_vk = vk(9, "agent_vk")?;
        let mut networks: Vec<NetworkEntry> = Vec::new();
        for i in 10..fields.len() {
            let parts: Vec<&str> = value(i, "net")?.split(':').collect();
            let [id, n, v] = parts[..] else {
                return Err("network entry must be id:n:vk".into());
            };
            let id = parse_dec(id)
                .and_then(|x| u32::try_from(x).ok())
                .ok_or("bad network id")?;
            if networks.iter().any(|e| e.id == id) {
                return Err(format!("network {id} registered twice"));
            }
            let key = PublicKey::new(from_hex(n).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let vk = VerifyingKey::from_value(&group, from_hex(v).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            networks.push(NetworkEntry { id, key, vk });
        }
        Ok(BoardHeader {
            t,
            group,
            auctioneer_key,
            auctioneer_vk,
            agent_vk,
            networks,
        })
    }
}

/// Bookkeeping needed to validate the next post.
#[derive(Debug, Clone, Default)]
struct ReplayState {
    test_sets: HashMap<u32, u64>,
    positions: HashSet<u32>,
    commitment_owner: HashMap<u64, u32>,
    marks: HashMap<MarkRole, u64>,
    outcome: Option<u64>,
    reveals: HashMap<RevealKind, u64>,
}

#[derive(Debug, Clone)]
pub struct Board {
    header: BoardHeader,
    header_signature: Signature,
    posts: Vec<SignedPost>,
    lines: Vec<String>,
    state: ReplayState,
}

impl PartialEq for Board {
    fn eq(&self, other: &Self) -> bool {
        self.header == other.header
            && self.header_signature == other.header_signature
            && self.posts == other.posts
    }
}

impl Eq for Board {}

impl Board {
    /// Opens an empty board; the operator (the auctioneer) signs the header.
    pub fn new(header: BoardHeader, auctioneer: &SigningKey) -> Result<Self, BoardError> {
        if auctioneer.verifying_key() != &header.auctioneer_vk {
            return Err(BoardError::Unauthorized {
                author: PartyId::Auctioneer.to_string(),
                reason: "signing key does not match the header".into(),
            });
        }
        let mut ids = HashSet::new();
        if let Some(dup) = header.networks.iter().find(|n| !ids.insert(n.id)) {
            return Err(BoardError::Invalid(format!(
                "network {} registered twice",
                dup.id
            )));
        }
        let header_signature = auctioneer.sign(&header.group, header.encode_unsigned().as_bytes());
        Ok(Board {
            header,
            header_signature,
            posts: Vec::new(),
            lines: Vec::new(),
            state: ReplayState::default(),
        })
    }

    pub fn header(&self) -> &BoardHeader {
        &self.header
    }

    pub fn posts(&self) -> &[SignedPost] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn get(&self, seq: u64) -> Option<&SignedPost> {
        seq.checked_sub(1)
            .and_then(|i| self.posts.get(usize::try_from(i).ok()?))
    }

    /// Appends a post signed by `author`. Only the auctioneer and registered
    /// networks may post, each only the kinds that belong to them.
    pub fn post(
        &mut self,
        author: PartyId,
        key: &SigningKey,
        payload: Payload,
    ) -> Result<u64, BoardError> {
        let registered = self
            .registered_vk(author)
            .ok_or_else(|| BoardError::Unauthorized {
                author: author.to_string(),
                reason: "not a registered poster".into(),
            })?;
        if registered != key.verifying_key() {
            return Err(BoardError::Unauthorized {
                author: author.to_string(),
                reason: "signing key does not match registration".into(),
            });
        }
        let seq = self.posts.len() as u64 + 1;
        self.validate(author, &payload)
            .map_err(BoardError::Invalid)?;
        let body = format!("{seq}\t{author}\t{}", payload.encode());
        let signature = key.sign(&self.header.group, body.as_bytes());
        self.apply(seq, author, &payload);
        self.lines.push(format!("{body}\t{}", signature.encode()));
        self.posts.push(SignedPost {
            seq,
            author,
            payload,
            signature,
        });
        Ok(seq)
    }

    fn registered_vk(&self, author: PartyId) -> Option<&VerifyingKey> {
        match author {
            PartyId::Auctioneer => Some(&self.header.auctioneer_vk),
            PartyId::Network(j) => self.header.network(j).map(|n| &n.vk),
            PartyId::Agent | PartyId::Bidder(_) => None,
        }
    }

    fn validate(&self, author: PartyId, payload: &Payload) -> Result<(), String> {
        let st = &self.state;
        let auctioneer_tag = self.header.auctioneer_key.tag();
        let need = |ok: bool, who: &str| {
            if ok {
                Ok(())
            } else {
                Err(format!("{:?} posts must come from {who}", payload.kind()))
            }
        };
        match payload {
            Payload::TestSet(ts) => {
                need(author == PartyId::Auctioneer, "the auctioneer")?;
                if ts.id == 0 || st.test_sets.contains_key(&ts.id) {
                    return Err(format!("test set id {} is zero or already used", ts.id));
                }
                if ts.entries.len() != self.header.t as usize {
                    return Err(format!(
                        "test set has {} entries, expected {}",
                        ts.entries.len(),
                        self.header.t
                    ));
                }
                if ts.entries.iter().any(|c| c.key_tag() != auctioneer_tag) {
                    return Err("test set entry not under the auctioneer key".into());
                }
            }
            Payload::Commitment(c) => {
                let PartyId::Network(j) = author else {
                    return need(false, "a network");
                };
                let net = self.header.network(j).ok_or("unregistered network")?;
                if c.position == 0 || st.positions.contains(&c.position) {
                    return Err(format!("position {} is zero or already taken", c.position));
                }
                if c.c.key_tag() != auctioneer_tag {
                    return Err("bid ciphertext not under the auctioneer key".into());
                }
                if c.id.key_tag() != net.key.tag() {
                    return Err("identity ciphertext not under the network key".into());
                }
            }
            Payload::Mark(m) => {
                let PartyId::Network(j) = author else {
                    return need(false, "a network");
                };
                match st.commitment_owner.get(&m.commitment_seq) {
                    None => return Err(format!("seq {} is not a commitment", m.commitment_seq)),
                    Some(&owner) if owner != j => {
                        return Err(format!(
                            "commitment {} belongs to network {owner}",
                            m.commitment_seq
                        ))
                    }
                    _ => {}
                }
                if st.marks.contains_key(&m.role) {
                    return Err(format!("{} already marked", m.role.as_str()));
                }
            }
            Payload::Outcome(o) => {
                need(author == PartyId::Auctioneer, "the auctioneer")?;
                if st.outcome.is_some() {
                    return Err("outcome already posted".into());
                }
                if self.header.network(o.winner_network).is_none() {
                    return Err(format!("unknown winner network {}", o.winner_network));
                }
            }
            Payload::Reveal(r) => {
                if st.reveals.contains_key(&r.kind()) {
                    return Err(format!("{:?} reveal already posted", r.kind()));
                }
                match r {
                    Reveal::Winner { n_j, .. } => {
                        let PartyId::Network(j) = author else {
                            return need(false, "a network");
                        };
                        let net = self.header.network(j).ok_or("unregistered network")?;
                        if net.key.n() != n_j {
                            return Err("revealed modulus is not the network's key".into());
                        }
                    }
                    Reveal::Payment { .. } => {
                        need(author == PartyId::Auctioneer, "the auctioneer")?
                    }
                    Reveal::MappedPayment {
                        payment_cents,
                        mapped,
                        attestation,
                    } => {
                        need(author == PartyId::Auctioneer, "the auctioneer")?;
                        self.header
                            .agent_vk
                            .verify(
                                &self.header.group,
                                &attestation_message(*payment_cents, *mapped),
                                attestation,
                            )
                            .map_err(|_| "agent attestation does not verify".to_string())?;
                    }
                }
            }
        }
        Ok(())
    }

    fn apply(&mut self, seq: u64, author: PartyId, payload: &Payload) {
        let st = &mut self.state;
        match payload {
            Payload::TestSet(ts) => {
                st.test_sets.insert(ts.id, seq);
            }
            Payload::Commitment(c) => {
                st.positions.insert(c.position);
                if let PartyId::Network(j) = author {
                    st.commitment_owner.insert(seq, j);
                }
            }
            Payload::Mark(m) => {
                st.marks.insert(m.role, seq);
            }
            Payload::Outcome(_) => st.outcome = Some(seq),
            Payload::Reveal(r) => {
                st.reveals.insert(r.kind(), seq);
            }
        }
    }

    /// Re-checks the signature of post `seq` against its author's registered key.
    pub fn verify_post(&self, seq: u64) -> Result<(), BoardError> {
        let post = self.get(seq).ok_or(BoardError::UnknownSeq(seq))?;
        let vk = self
            .registered_vk(post.author)
            .ok_or(BoardError::BadSignature(seq))?;
        let body = format!("{}\t{}\t{}", post.seq, post.author, post.payload.encode());
        vk.verify(&self.header.group, body.as_bytes(), &post.signature)
            .map_err(|_| BoardError::BadSignature(seq))
    }

    /// Posts in seq order matching the optional kind and author filters.
    pub fn read(&self, kind: Option<PostKind>, author: Option<PartyId>) -> Vec<&SignedPost> {
        self.posts
            .iter()
            .filter(|p| kind.is_none_or(|k| p.payload.kind() == k))
            .filter(|p| author.is_none_or(|a| p.author == a))
            .collect()
    }

    /// `(seq, network, commitment)` for every commitment, in seq order.
    pub fn commitments(&self) -> impl Iterator<Item = (u64, u32, &Commitment)> {
        self.posts
            .iter()
            .filter_map(|p| match (&p.payload, p.author) {
                (Payload::Commitment(c), PartyId::Network(j)) => Some((p.seq, j, c)),
                _ => None,
            })
    }

    pub fn commitment(&self, seq: u64) -> Option<(u32, &Commitment)> {
        match self.get(seq) {
            Some(SignedPost {
                payload: Payload::Commitment(c),
                author: PartyId::Network(j),
                ..
            }) => Some((*j, c)),
            _ => None,
        }
    }

    pub fn test_set(&self, id: u32) -> Option<&PublicTestSet> {
        let seq = *self.state.test_sets.get(&id)?;
        match &self.get(seq)?.payload {
            Payload::TestSet(ts) => Some(ts),
            _ => None,
        }
    }

    pub fn test_set_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.state.test_sets.keys().copied().collect();
        ids.sort_unstable();
        ids
    }

    pub fn mark(&self, role: MarkRole) -> Option<(PartyId, &Mark)> {
        let post = self.get(*self.state.marks.get(&role)?)?;
        match &post.payload {
            Payload::Mark(m) => Some((post.author, m)),
            _ => None,
        }
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        match &self.get(self.state.outcome?)?.payload {
            Payload::Outcome(o) => Some(o),
            _ => None,
        }
    }

    pub fn reveal(&self, kind: RevealKind) -> Option<(PartyId, &Reveal)> {
        let post = self.get(*self.state.reveals.get(&kind)?)?;
        match &post.payload {
            Payload::Reveal(r) => Some((post.author, r)),
            _ => None,
        }
    }

    /// The exact file contents.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.encode_unsigned());
        out.push('\t');
        out.push_str(&self.header_signature.encode());
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("{TRAILER}\t{}\n", self.posts.len()));
        out
    }

    pub fn byte_len(&self) -> usize {
        self.to_text().len()
    }

    pub fn persist(&self, path: impl AsRef<Path>) -> Result<(), BoardError> {
        std::fs::write(path, self.to_text()).map_err(|e| BoardError::Io(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BoardError> {
        let text = std::fs::read_to_string(path).map_err(|e| BoardError::Io(e.to_string()))?;
        Self::from_text(&text)
    }

    /// Parses and replays a board file, checking every signature and post rule.
    pub fn from_text(text: &str) -> Result<Self, BoardError> {
        let malformed = |line: usize, reason: &str| BoardError::Malformed {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text
            .split_inclusive('\n')
            .enumerate()
            .map(|(i, l)| (i + 1, l));
        let (_, first) = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
        let first = first
            .strip_suffix('\n')
            .ok_or_else(|| malformed(1, "unterminated line"))?;
        let (unsigned, sig) = first
            .rsplit_once('\t')
            .ok_or_else(|| malformed(1, "missing header signature"))?;
        let fields: Vec<&str> = unsigned.split('\t').collect();
        let header = BoardHeader::decode_unsigned(&fields).map_err(|e| malformed(1, &e))?;
        if header.encode_unsigned() != unsigned {
            return Err(malformed(1, "header is not in canonical form"));
        }
        let header_signature = Signature::decode(sig).map_err(|_| malformed(1, "bad signature"))?;
        header
            .auctioneer_vk
            .verify(&header.group, unsigned.as_bytes(), &header_signature)
            .map_err(|_| BoardError::Signature { line: 1 })?;
        let mut board = Board {
            header,
            header_signature,
            posts: Vec::new(),
            lines: Vec::new(),
            state: ReplayState::default(),
        };
        let mut finished = false;
        let mut last_line = 1;
        for (no, raw) in lines.by_ref() {
            last_line = no;
            let line = raw
                .strip_suffix('\n')
                .ok_or_else(|| malformed(no, "unterminated line"))?;
            if let Some(count) = line.strip_prefix("end\t") {
                if parse_dec(count) != Some(board.posts.len() as u64) {
                    return Err(malformed(no, "trailer count does not match"));
                }
                finished = true;
                break;
            }
            board.replay_line(no, line)?;
        }
        if let Some((no, _)) = lines.next() {
            return Err(malformed(no, "content after trailer"));
        }
        if !finished {
            return Err(BoardError::SeqGap {
                line: last_line + 1,
                expected: (board.posts.len() + 1).to_string(),
                found: "end of file".into(),
            });
        }
        Ok(board)
    }

    fn replay_line(&mut self, no: usize, line: &str) -> Result<(), BoardError> {
        let malformed = |reason: &str| BoardError::Malformed {
            line: no,
            reason: reason.to_string(),
        };
        let (body, sig) = line
            .rsplit_once('\t')
            .ok_or_else(|| malformed("no fields"))?;
        let fields: Vec<&str> = body.split('\t').collect();
        let expected = self.posts.len() as u64 + 1;
        let seq = parse_dec(fields[0]);
        if seq != Some(expected) {
            return Err(BoardError::SeqGap {
                line: no,
                expected: expected.to_string(),
                found: fields[0].to_string(),
            });
        }
        if fields.len() < 3 {
            return Err(malformed("missing author or kind"));
        }
        let author: PartyId = fields[1].parse().map_err(|e: String| malformed(&e))?;
        let vk = self
            .registered_vk(author)
            .ok_or_else(|| BoardError::Rejected {
                line: no,
                reason: format!("{author} is not a registered poster"),
            })?
            .clone();
        let payload = self
            .decode_payload(author, &fields[2..])
            .map_err(|e| malformed(&e))?;
        if payload.encode() != fields[2..].join("\t") {
            return Err(malformed("payload is not in canonical form"));
        }
        let signature = Signature::decode(sig).map_err(|_| malformed("bad signature encoding"))?;
        vk.verify(&self.header.group, body.as_bytes(), &signature)
            .map_err(|_| BoardError::Signature { line: no })?;
        self.validate(author, &payload)
            .map_err(|reason| BoardError::Rejected { line: no, reason })?;
        self.apply(expected, author, &payload);
        self.lines.push(line.to_string());
        self.posts.push(SignedPost {
            seq: expected,
            author,
            payload,
            signature,
        });
        Ok(())
    }

    fn decode_payload(&self, author: PartyId, f: &[&str]) -> Result<Payload, String> {
        let auctioneer_key = &self.header.auctioneer_key;
        let dec = |s: &str| parse_dec(s).ok_or_else(|| format!("bad decimal {s:?}"));
        let dec32 = |s: &str| {
            dec(s).and_then(|v| u32::try_from(v).map_err(|_| format!("{s} out of range")))
        };
        let hex = |s: &str| from_hex(s).map_err(|e| format!("{e} in {s:?}"));
        let arity = |n: usize| {
            if f.len() == n {
                Ok(())
            } else {
                Err(format!(
                    "{} expects {} fields, got {}",
                    f[0],
                    n - 1,
                    f.len() - 1
                ))
            }
        };
        match f[0] {
            "testset" => {
                arity(3)?;
                let entries =
                    parse_ciphertext_list(auctioneer_key, f[2]).map_err(|e| e.to_string())?;
                Ok(Payload::TestSet(PublicTestSet {
                    id: dec32(f[1])?,
                    entries,
                }))
            }
            "commitment" => {
                arity(4)?;
                let PartyId::Network(j) = author else {
                    return Err("commitment from a non-network author".into());
                };
                let net = self.header.network(j).ok_or("unregistered network")?;
                Ok(Payload::Commitment(Commitment {
                    position: dec32(f[1])?,
                    c: auctioneer_key
                        .ciphertext_from_hex(f[2])
                        .map_err(|e| e.to_string())?,
                    id: net
                        .key
                        .ciphertext_from_hex(f[3])
                        .map_err(|e| e.to_string())?,
                }))
            }
            "mark" => {
                arity(3)?;
                let role = match f[1] {
                    "max" => MarkRole::Max,
                    "sec" => MarkRole::Sec,
                    other => return Err(format!("unknown mark role {other:?}")),
                };
                Ok(Payload::Mark(Mark {
                    role,
                    commitment_seq: dec(f[2])?,
                }))
            }
            "outcome" => {
                arity(4)?;
                Ok(Payload::Outcome(Outcome {
                    winner: dec(f[1])?,
                    payment_cents: dec(f[2])?,
                    winner_network: dec32(f[3])?,
                }))
            }
            "reveal" => {
                if f.len() < 2 {
                    return Err("reveal without a kind".into());
                }
                match f[1] {
                    "winner" => {
                        arity(4)?;
                        Ok(Payload::Reveal(Reveal::Winner {
                            n_j: hex(f[2])?,
                            r2: Randomness::new_unchecked(hex(f[3])?),
                        }))
                    }
                    "payment" => {
                        arity(3)?;
                        Ok(Payload::Reveal(Reveal::Payment {
                            r1: Randomness::new_unchecked(hex(f[2])?),
                        }))
                    }
                    "mapped_payment" => {
                        arity(5)?;
                        let mapped = u64::try_from(hex(f[3])?)
                            .map_err(|_| "mapped value too large".to_string())?;
                        Ok(Payload::Reveal(Reveal::MappedPayment {
                            payment_cents: dec(f[2])?,
                            mapped,
                            attestation: Signature::decode(f[4]).map_err(|e| e.to_string())?,
                        }))
                    }
                    other => Err(format!("unknown reveal kind {other:?}")),
                }
            }
            other => Err(format!("unknown post kind {other:?}")),
        }
    }
}

/// Canonical unsigned decimal: digits only, no leading zeros.
pub(crate) fn parse_dec(s: &str) -> Option<u64> {
    let canonical =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    canonical.then(|| s.parse().ok()).flatten()
}
