//! Range proofs over Paillier ciphertexts by subset selection from a test set,
//! and the integer comparison built from them.
//!
//! A test set is `t` shuffled encryptions of `2^0, …, 2^{t−1}`. To show that
//! `C = E(x, r_x)` has `x < 2^t`, the prover picks the entries for the set bits
//! of `x` and reveals `r* = r_x^{-1}·∏ r_j`. The verifier checks
//! `C^{-1}·∏ selected = (r*)^n mod n²`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{from_hex, to_hex};
use crate::paillier::{Ciphertext, CiphertextParseError, PaillierError, PublicKey, Randomness};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RangeProofError {
    #[error("t = {t} needs 2^(t+1) < n, but n has {n_bits} bits")]
    Parameter { t: u32, n_bits: u64 },
    #[error("value is not below 2^t; no proof exists")]
    Unprovable,
    #[error("proof refers to test set {got}, expected {expected}")]
    WrongTestSet { expected: u32, got: u32 },
    #[error("test set {id} has {got} entries, expected {expected}")]
    MalformedTestSet {
        id: u32,
        got: usize,
        expected: usize,
    },
    #[error("{k} selected ciphertexts exceed t = {t}")]
    TooManySelected { k: usize, t: u32 },
    #[error("selected ciphertext {index} is not in the test set")]
    NotMember { index: usize },
    #[error("selected ciphertext {index} repeats an earlier selection")]
    Duplicate { index: usize },
    #[error("r* is not a unit below n")]
    InvalidRStar,
    #[error("C^-1 * prod(selected) != r*^n mod n^2")]
    EquationFailed,
    #[error("comparison uses test set {0} more than once")]
    ReusedTestSet(u32),
    #[error("{which}: {source}")]
    Comparison {
        which: Inequality,
        #[source]
        source: Box<RangeProofError>,
    },
    #[error("malformed proof encoding: {0}")]
    Encoding(String),
    #[error(transparent)]
    Paillier(#[from] PaillierError),
}

/// Which of the three range statements behind `x1 ≥ x2` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    First,
    Second,
    Difference,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inequality::First => "x1 < 2^t",
            Inequality::Second => "x2 < 2^t",
            Inequality::Difference => "(x1 - x2) mod n < 2^t",
        })
    }
}

/// The published half of a test set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicTestSet {
    pub id: u32,
    pub entries: Vec<Ciphertext>,
}

/// Opening of one public entry: it encrypts `2^power` with `randomness`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub power: u32,
    pub randomness: Randomness,
}

/// A test set together with the prover's openings, aligned with the public order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSet {
    public: PublicTestSet,
    openings: Vec<Opening>,
}

impl TestSet {
    pub fn public(&self) -> &PublicTestSet {
        &self.public
    }

    pub fn id(&self) -> u32 {
        self.public.id
    }

    pub fn t(&self) -> u32 {
        self.openings.len() as u32
    }

    pub fn openings(&self) -> &[Opening] {
        &self.openings
    }

    /// Public position of the entry encrypting `2^power`.
    pub fn position_of_power(&self, power: u32) -> Option<usize> {
        self.openings.iter().position(|o| o.power == power)
    }
}

/// `2^{t+1} < n`, so every provable value stays below `n/2`.
pub fn check_parameters(pk: &PublicKey, t: u32) -> Result<(), RangeProofError> {
    if t == 0 || u64::from(t) + 1 >= pk.bits() {
        return Err(RangeProofError::Parameter {
            t,
            n_bits: pk.bits(),
        });
    }
    Ok(())
}

/// Encrypts each power of two below `2^t` with fresh randomness and shuffles.
pub fn gen_test_set<R: Rng + ?Sized>(
    pk: &PublicKey,
    t: u32,
    id: u32,
    rng: &mut R,
) -> Result<TestSet, RangeProofError> {
    check_parameters(pk, t)?;
    let mut pairs = Vec::with_capacity(t as usize);
    for power in 0..t {
        let randomness = Randomness::sample(pk, rng);
        let c = pk.encrypt(&(BigUint::one() << power), &randomness)?;
        pairs.push((c, Opening { power, randomness }));
    }
    pairs.shuffle(rng);
    let (entries, openings) = pairs.into_iter().unzip();
    Ok(TestSet {
        public: PublicTestSet { id, entries },
        openings,
    })
}

/// Exponents of the set bits of `x`, ascending.
pub fn decompose(x: &BigUint) -> Vec<u32> {
    (0..x.bits())
        .filter(|&i| x.bit(i))
        .map(|i| i as u32)
        .collect()
}

/// Selected test-set entries and the combined randomness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeProof {
    pub test_set_id: u32,
    pub selected: Vec<Ciphertext>,
    pub r_star: Randomness,
}

impl RangeProof {
    /// Number of selected ciphertexts, i.e. the Hamming weight of the value.
    pub fn k(&self) -> usize {
        self.selected.len()
    }

    /// `id<TAB>c1,c2,...<TAB>r*`, all big integers in hex; the list may be empty.
    pub fn encode(&self) -> String {
        let list: Vec<String> = self.selected.iter().map(Ciphertext::to_hex).collect();
        format!(
            "{}\t{}\t{}",
            self.test_set_id,
            list.join(","),
            self.r_star.to_hex()
        )
    }

    pub fn decode(pk: &PublicKey, s: &str) -> Result<Self, RangeProofError> {
        let enc = |m: &str| RangeProofError::Encoding(m.to_string());
        let mut fields = s.split('\t');
        let (Some(id), Some(list), Some(r), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(enc("expected three tab-separated fields"));
        };
        let test_set_id = id.parse().map_err(|_| enc("bad test set id"))?;
        let selected = parse_ciphertext_list(pk, list).map_err(|e| enc(&e.to_string()))?;
        let r_star = Randomness::new_unchecked(from_hex(r).map_err(|_| enc("bad r* hex"))?);
        Ok(RangeProof {
            test_set_id,
            selected,
            r_star,
        })
    }
}

/// Comma-separated ciphertext hex values; the empty string is the empty list.
pub fn parse_ciphertext_list(
    pk: &PublicKey,
    s: &str,
) -> Result<Vec<Ciphertext>, CiphertextParseError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|c| pk.ciphertext_from_hex(c)).collect()
}

pub fn format_ciphertext_list(list: &[Ciphertext]) -> String {
    list.iter()
        .map(Ciphertext::to_hex)
        .collect::<Vec<_>>()
        .join(",")
}

/// Proves `x < 2^t` for `C = E(x, r_x)` using test set `ts`.
pub fn prove_range(
    pk: &PublicKey,
    x: &BigUint,
    r_x: &Randomness,
    ts: &TestSet,
) -> Result<RangeProof, RangeProofError> {
    if x.bits() > u64::from(ts.t()) {
        return Err(RangeProofError::Unprovable);
    }
    let mut r_star = r_x.inverse(pk)?;
    let mut selected = Vec::new();
    for (c, opening) in ts.public.entries.iter().zip(&ts.openings) {
        if x.bit(u64::from(opening.power)) {
            selected.push(c.clone());
            r_star = r_star.mul(&opening.randomness, pk);
        }
    }
    Ok(RangeProof {
        test_set_id: ts.id(),
        selected,
        r_star,
    })
}

/// `C^{-1}·∏ selected ≡ (r*)^n (mod n²)`, with no membership checks.
pub fn range_equation_holds(
    pk: &PublicKey,
    c: &Ciphertext,
    selected: &[&Ciphertext],
    r_star: &Randomness,
) -> Result<bool, RangeProofError> {
    let n_sq = pk.n_squared();
    let mut lhs = pk.invert(c)?.value().clone();
    for s in selected {
        if s.key_tag() != pk.tag() {
            return Err(PaillierError::KeyMismatch.into());
        }
        lhs = (lhs * s.value()) % n_sq;
    }
    let rhs = pk.encrypt_zero(r_star)?;
    Ok(&lhs == rhs.value())
}

/// Accepts iff the selections are distinct members of `ts`, at most `t` of
/// them, and the proof equation holds for `c`.
pub fn verify_range(
    pk: &PublicKey,
    c: &Ciphertext,
    proof: &RangeProof,
    ts: &PublicTestSet,
    t: u32,
) -> Result<(), RangeProofError> {
    check_parameters(pk, t)?;
    if proof.test_set_id != ts.id {
        return Err(RangeProofError::WrongTestSet {
            expected: ts.id,
            got: proof.test_set_id,
        });
    }
    if ts.entries.len() != t as usize {
        return Err(RangeProofError::MalformedTestSet {
            id: ts.id,
            got: ts.entries.len(),
            expected: t as usize,
        });
    }
    if proof.selected.len() > t as usize {
        return Err(RangeProofError::TooManySelected {
            k: proof.selected.len(),
            t,
        });
    }
    let members: HashSet<&Ciphertext> = ts.entries.iter().collect();
    let mut seen = HashSet::with_capacity(proof.selected.len());
    for (index, s) in proof.selected.iter().enumerate() {
        if !members.contains(s) {
            return Err(RangeProofError::NotMember { index });
        }
        if !seen.insert(s) {
            return Err(RangeProofError::Duplicate { index });
        }
    }
    let r = proof.r_star.value();
    if r.is_zero() || r >= pk.n() || pk.randomness(r.clone()).is_err() {
        return Err(RangeProofError::InvalidRStar);
    }
    let selected: Vec<&Ciphertext> = proof.selected.iter().collect();
    if range_equation_holds(pk, c, &selected, &proof.r_star)? {
        Ok(())
    } else {
        Err(RangeProofError::EquationFailed)
    }
}

/// `C1 · C2^{-1} mod n²`, an encryption of `(x1 − x2) mod n` under `r1·r2^{-1}`.
pub fn difference_ciphertext(
    pk: &PublicKey,
    c1: &Ciphertext,
    c2: &Ciphertext,
) -> Result<Ciphertext, RangeProofError> {
    Ok(pk.add(c1, &pk.invert(c2)?)?)
}

/// Range proof for `(x1 − x2) mod n`, the only proof needed when both values
/// are already known to be below `2^t`.
pub fn prove_difference(
    pk: &PublicKey,
    (x1, r1): (&BigUint, &Randomness),
    (x2, r2): (&BigUint, &Randomness),
    ts: &TestSet,
) -> Result<RangeProof, RangeProofError> {
    if x1 < x2 {
        return Err(RangeProofError::Unprovable);
    }
    let d = (x1 - x2) % pk.n();
    let r = r1.mul(&r2.inverse(pk)?, pk);
    prove_range(pk, &d, &r, ts)
}

pub fn verify_difference(
    pk: &PublicKey,
    c1: &Ciphertext,
    c2: &Ciphertext,
    proof: &RangeProof,
    ts: &PublicTestSet,
    t: u32,
) -> Result<(), RangeProofError> {
    let diff = difference_ciphertext(pk, c1, c2)?;
    verify_range(pk, &diff, proof, ts, t)
}

/// Proofs that `x1 < 2^t`, `x2 < 2^t` and `(x1 − x2) mod n < 2^t`, which
/// together give `x1 ≥ x2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonProof {
    pub first: RangeProof,
    pub second: RangeProof,
    pub difference: RangeProof,
}

pub fn prove_geq(
    pk: &PublicKey,
    (x1, r1): (&BigUint, &Randomness),
    (x2, r2): (&BigUint, &Randomness),
    test_sets: [&TestSet; 3],
) -> Result<ComparisonProof, RangeProofError> {
    let ids = [test_sets[0].id(), test_sets[1].id(), test_sets[2].id()];
    check_distinct(&ids)?;
    Ok(ComparisonProof {
        first: prove_range(pk, x1, r1, test_sets[0])?,
        second: prove_range(pk, x2, r2, test_sets[1])?,
        difference: prove_difference(pk, (x1, r1), (x2, r2), test_sets[2])?,
    })
}

pub fn verify_geq(
    pk: &PublicKey,
    c1: &Ciphertext,
    c2: &Ciphertext,
    proof: &ComparisonProof,
    test_sets: [&PublicTestSet; 3],
    t: u32,
) -> Result<(), RangeProofError> {
    check_distinct(&[test_sets[0].id, test_sets[1].id, test_sets[2].id])?;
    let tag = |which: Inequality| {
        move |e: RangeProofError| RangeProofError::Comparison {
            which,
            source: Box::new(e),
        }
    };
    verify_range(pk, c1, &proof.first, test_sets[0], t).map_err(tag(Inequality::First))?;
    verify_range(pk, c2, &proof.second, test_sets[1], t).map_err(tag(Inequality::Second))?;
    verify_difference(pk, c1, c2, &proof.difference, test_sets[2], t)
        .map_err(tag(Inequality::Difference))
}

fn check_distinct(ids: &[u32]) -> Result<(), RangeProofError> {
    let mut seen = HashSet::new();
    for &id in ids {
        if !seen.insert(id) {
            return Err(RangeProofError::ReusedTestSet(id));
        }
    }
    Ok(())
}

impl fmt::Display for RangeProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "proof(ts={}, k={}, r*={})",
            self.test_set_id,
            self.selected.len(),
            to_hex(self.r_star.value())
        )
    }
}
