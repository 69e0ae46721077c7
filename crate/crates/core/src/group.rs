//! Prime-order subgroup of `Z_p^*` for a safe prime `p = 2ρ + 1`, and the
//! 1-out-of-z oblivious transfer built on it.
//!
//! The receiver sends `y = g^r h^α`; the sender answers every index `i` with
//! `(g^{k_i}, m_i·(y/h^i)^{k_i})`; only at `i = α` does `(y/h^i)^{k_i}` equal
//! `(g^{k_i})^r`, so the receiver can unblind exactly one message.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{
    self, derive_rng, hash_to_int, hex_serde, is_probable_prime, mod_inverse, Mont64,
    MILLER_RABIN_ROUNDS, SMALL_PRIMES,
};

/// Smallest modulus size for which a useful subgroup exists (p = 23, ρ = 11).
pub const MIN_GROUP_BITS: u64 = 5;

const SEARCH_WINDOW: usize = 1 << 14;
const SEARCH_RESTARTS: usize = 4_096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group size {0} bits is below the minimum of {MIN_GROUP_BITS}")]
    TooSmall(u64),
    #[error("no safe prime of {0} bits found")]
    NoSafePrime(u64),
    #[error("invalid group parameters: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OtError {
    #[error("choice index {alpha} outside [1, {z}]")]
    ChoiceOutOfRange { alpha: usize, z: usize },
    #[error("message {index} is not in [1, p-1]")]
    MessageEncoding { index: usize },
    #[error("no messages to transfer")]
    Empty,
    #[error("query element is not a unit mod p")]
    InvalidQuery,
    #[error("batch has {got} entries, expected {expected}")]
    BatchLength { got: usize, expected: usize },
    #[error("exponent list has {got} entries, expected {expected}")]
    ExponentCount { got: usize, expected: usize },
    #[error("first component is not invertible mod p")]
    NotInvertible,
}

/// `(p, ρ, g, h)` with `p = 2ρ + 1` and `g`, `h` of order `ρ`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "GroupParamsRepr", into = "GroupParamsRepr")]
pub struct GroupParams {
    p: BigUint,
    rho: BigUint,
    g: BigUint,
    h: BigUint,
    ring: Ring,
}

#[derive(Clone, Copy, Debug)]
enum Ring {
    Word(Mont64),
    Big,
}

#[derive(Serialize, Deserialize)]
struct GroupParamsRepr {
    #[serde(with = "hex_serde")]
    p: BigUint,
    #[serde(with = "hex_serde")]
    rho: BigUint,
    #[serde(with = "hex_serde")]
    g: BigUint,
    #[serde(with = "hex_serde")]
    h: BigUint,
}

impl From<GroupParams> for GroupParamsRepr {
    fn from(gp: GroupParams) -> Self {
        GroupParamsRepr {
            p: gp.p,
            rho: gp.rho,
            g: gp.g,
            h: gp.h,
        }
    }
}

impl TryFrom<GroupParamsRepr> for GroupParams {
    type Error = GroupError;
    fn try_from(r: GroupParamsRepr) -> Result<Self, Self::Error> {
        GroupParams::new(r.p, r.rho, r.g, r.h)
    }
}

impl PartialEq for GroupParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.rho == other.rho && self.g == other.g && self.h == other.h
    }
}

impl Eq for GroupParams {}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupParams")
            .field("p_bits", &self.p.bits())
            .field("p", &format_args!("{:x}", self.p))
            .finish_non_exhaustive()
    }
}

impl GroupParams {
    /// Validates and assembles parameters.
    pub fn new(p: BigUint, rho: BigUint, g: BigUint, h: BigUint) -> Result<Self, GroupError> {
        if p != &rho * 2u32 + 1u32 {
            return Err(GroupError::Invalid("p != 2*rho + 1"));
        }
        let mut rng = derive_rng(&p.to_bytes_be(), "group/validate");
        if !is_probable_prime(&rho, MILLER_RABIN_ROUNDS, &mut rng)
            || !is_probable_prime(&p, MILLER_RABIN_ROUNDS, &mut rng)
        {
            return Err(GroupError::Invalid("p or rho is not prime"));
        }
        for x in [&g, &h] {
            if x.is_zero() || x.is_one() || x >= &p || !x.modpow(&rho, &p).is_one() {
                return Err(GroupError::Invalid("generator not of order rho"));
            }
        }
        if g == h {
            return Err(GroupError::Invalid("g == h"));
        }
        Ok(Self::assemble(p, rho, g, h))
    }

    fn assemble(p: BigUint, rho: BigUint, g: BigUint, h: BigUint) -> Self {
        let ring = p
            .to_u64()
            .and_then(Mont64::new)
            .map(Ring::Word)
            .unwrap_or(Ring::Big);
        Self { p, rho, g, h, ring }
    }

    /// Deterministic parameters for a `bits`-bit safe prime `p`; `ρ` has `bits − 1`
    /// bits. Generators are hashed into the group and squared, so nobody knows
    /// `log_g h`.
    pub fn generate(bits: u64, seed: &[u8]) -> Result<Self, GroupError> {
        if bits < MIN_GROUP_BITS {
            return Err(GroupError::TooSmall(bits));
        }
        let mut rng = derive_rng(seed, "group/safe-prime");
        let (p, rho) = find_safe_prime(bits, &mut rng).ok_or(GroupError::NoSafePrime(bits))?;
        let g = hash_to_subgroup(&p, seed, b"era/group/g", None);
        let h = hash_to_subgroup(&p, seed, b"era/group/h", Some(&g));
        Ok(Self::assemble(p, rho, g, h))
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn rho(&self) -> &BigUint {
        &self.rho
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    pub fn h(&self) -> &BigUint {
        &self.h
    }

    pub fn bits(&self) -> u64 {
        self.p.bits()
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        match self.ring {
            Ring::Word(m) => WordArith(m).pow_big(base, exp),
            Ring::Big => base.modpow(exp, &self.p),
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }

    pub fn inverse(&self, a: &BigUint) -> Option<BigUint> {
        mod_inverse(a, &self.p)
    }

    /// Uniform exponent in `Z_ρ`.
    pub fn random_exponent<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_below(&self.rho)
    }

    pub fn is_unit(&self, x: &BigUint) -> bool {
        !x.is_zero() && x < &self.p
    }
}

fn hash_to_subgroup(p: &BigUint, seed: &[u8], tag: &[u8], avoid: Option<&BigUint>) -> BigUint {
    let mut counter = 0u64;
    loop {
        let x = hash_to_int(&[tag, seed, &counter.to_be_bytes()], p.bits()) % p;
        let sq = (&x * &x) % p;
        counter += 1;
        if sq.is_zero() || sq.is_one() || Some(&sq) == avoid {
            continue;
        }
        return sq;
    }
}

/// Random-start incremental search for `ρ` with `p = 2ρ + 1` both prime,
/// sieving both by small primes before any exponentiation.
fn find_safe_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Option<(BigUint, BigUint)> {
    let rho_bits = bits - 1;
    let sieve = rho_bits > 20;
    let two = BigUint::from(2u32);
    for _ in 0..SEARCH_RESTARTS {
        let mut rho = rng.gen_biguint(rho_bits);
        rho.set_bit(rho_bits - 1, true);
        rho.set_bit(0, true);
        let mut residues: Vec<u32> = if sieve {
            SMALL_PRIMES[1..]
                .iter()
                .map(|&q| (&rho % q).to_u32().unwrap_or(0))
                .collect()
        } else {
            Vec::new()
        };
        for _ in 0..SEARCH_WINDOW {
            if rho.bits() != rho_bits {
                break;
            }
            let survives = !sieve
                || SMALL_PRIMES[1..]
                    .iter()
                    .zip(&residues)
                    .all(|(&q, &r)| r != 0 && (2 * u64::from(r) + 1) % u64::from(q) != 0);
            if survives {
                let p = &rho * 2u32 + 1u32;
                let fermat = |x: &BigUint| two.modpow(&(x - 1u32), x).is_one();
                if (rho_bits < 8 || (fermat(&rho) && fermat(&p)))
                    && is_probable_prime(&rho, MILLER_RABIN_ROUNDS, rng)
                    && is_probable_prime(&p, MILLER_RABIN_ROUNDS, rng)
                {
                    return Some((p, rho));
                }
            }
            rho += 2u32;
            if sieve {
                for (r, &q) in residues.iter_mut().zip(&SMALL_PRIMES[1..]) {
                    *r = (*r + 2) % q;
                }
            }
        }
    }
    None
}

/// Modular arithmetic over a group modulus, abstracted so the transfer loop
/// runs on machine words when `p < 2^64`.
trait GroupArith {
    type Elem: Clone;
    fn lift(&self, x: &BigUint) -> Self::Elem;
    fn lower(&self, e: &Self::Elem) -> BigUint;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn pow(&self, base: &Self::Elem, exp: &BigUint) -> Self::Elem;
}

struct WordArith(Mont64);

impl WordArith {
    fn pow_big(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        let b = self.lift(base);
        self.lower(&GroupArith::pow(self, &b, exp))
    }
}

impl GroupArith for WordArith {
    type Elem = u64;

    fn lift(&self, x: &BigUint) -> u64 {
        // Callers only lift residues mod p < 2^64.
        self.0.to_mont(x.to_u64().unwrap_or(0))
    }

    fn lower(&self, e: &u64) -> BigUint {
        BigUint::from(self.0.from_mont(*e))
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.0.mul(*a, *b)
    }

    fn pow(&self, base: &u64, exp: &BigUint) -> u64 {
        if let Some(e) = exp.to_u64() {
            return self.0.pow(*base, e);
        }
        let mut acc = self.0.one();
        for i in (0..exp.bits()).rev() {
            acc = self.0.mul(acc, acc);
            if exp.bit(i) {
                acc = self.0.mul(acc, *base);
            }
        }
        acc
    }
}

struct BigArith<'a>(&'a BigUint);

impl GroupArith for BigArith<'_> {
    type Elem = BigUint;

    fn lift(&self, x: &BigUint) -> BigUint {
        x % self.0
    }

    fn lower(&self, e: &BigUint) -> BigUint {
        e.clone()
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % self.0
    }

    fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, self.0)
    }
}

/// What the receiver sends: `y = g^r h^α mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtRequest {
    #[serde(with = "hex_serde")]
    pub y: BigUint,
}

/// What the receiver keeps: its choice and blinding exponent.
#[derive(Debug, Clone)]
pub struct OtReceiver {
    alpha: usize,
    z: usize,
    r: BigUint,
}

/// The sender's reply: one `(a_i, b_i)` pair per message, in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtBatch {
    pub pairs: Vec<(BigUint, BigUint)>,
}

impl OtBatch {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Bytes on the wire when each element is sent as `ceil(bits(p)/8)` bytes.
    pub fn wire_bytes(&self, params: &GroupParams) -> usize {
        self.pairs.len() * 2 * (params.bits() as usize).div_ceil(8)
    }
}

/// Receiver's first move for a 1-based choice `alpha` out of `z` messages.
pub fn ot_query<R: Rng + ?Sized>(
    alpha: usize,
    z: usize,
    params: &GroupParams,
    rng: &mut R,
) -> Result<(OtRequest, OtReceiver), OtError> {
    let r = params.random_exponent(rng);
    ot_query_with_secret(alpha, z, r, params)
}

/// [`ot_query`] with a caller-chosen blinding exponent.
pub fn ot_query_with_secret(
    alpha: usize,
    z: usize,
    r: BigUint,
    params: &GroupParams,
) -> Result<(OtRequest, OtReceiver), OtError> {
    if alpha == 0 || alpha > z {
        return Err(OtError::ChoiceOutOfRange { alpha, z });
    }
    let g_r = params.pow(&params.g, &r);
    let h_alpha = params.pow(&params.h, &BigUint::from(alpha));
    let y = params.mul(&g_r, &h_alpha);
    Ok((OtRequest { y }, OtReceiver { alpha, z, r }))
}

/// Sender's reply with fresh uniform `k_i ∈ Z_ρ` per message.
pub fn ot_respond<R: Rng + ?Sized>(
    request: &OtRequest,
    messages: &[BigUint],
    params: &GroupParams,
    rng: &mut R,
) -> Result<OtBatch, OtError> {
    let exponents: Vec<BigUint> = (0..messages.len())
        .map(|_| params.random_exponent(rng))
        .collect();
    ot_respond_with_exponents(request, messages, &exponents, params)
}

/// Sender's reply with caller-supplied exponents `k_1..k_z`.
pub fn ot_respond_with_exponents(
    request: &OtRequest,
    messages: &[BigUint],
    exponents: &[BigUint],
    params: &GroupParams,
) -> Result<OtBatch, OtError> {
    if messages.is_empty() {
        return Err(OtError::Empty);
    }
    if exponents.len() != messages.len() {
        return Err(OtError::ExponentCount {
            got: exponents.len(),
            expected: messages.len(),
        });
    }
    if let Some(index) = messages.iter().position(|m| m.is_zero() || m >= &params.p) {
        return Err(OtError::MessageEncoding { index: index + 1 });
    }
    if !params.is_unit(&request.y) {
        return Err(OtError::InvalidQuery);
    }
    let h_inv = params.inverse(&params.h).ok_or(OtError::InvalidQuery)?;
    let pairs = match params.ring {
        Ring::Word(m) => respond_in(
            &WordArith(m),
            params,
            &request.y,
            &h_inv,
            messages,
            exponents,
        ),
        Ring::Big => respond_in(
            &BigArith(&params.p),
            params,
            &request.y,
            &h_inv,
            messages,
            exponents,
        ),
    };
    Ok(OtBatch { pairs })
}

fn respond_in<A: GroupArith>(
    arith: &A,
    params: &GroupParams,
    y: &BigUint,
    h_inv: &BigUint,
    messages: &[BigUint],
    exponents: &[BigUint],
) -> Vec<(BigUint, BigUint)> {
    let g = arith.lift(&params.g);
    let h_inv = arith.lift(h_inv);
    // y / h^i, starting at i = 1 and stepping by h^{-1}.
    let mut blind_base = arith.mul(&arith.lift(y), &h_inv);
    let mut pairs = Vec::with_capacity(messages.len());
    for (m, k) in messages.iter().zip(exponents) {
        let a = arith.pow(&g, k);
        let b = arith.mul(&arith.lift(m), &arith.pow(&blind_base, k));
        pairs.push((arith.lower(&a), arith.lower(&b)));
        blind_base = arith.mul(&blind_base, &h_inv);
    }
    pairs
}

/// `m = b / a^r mod p` for one reply pair.
pub fn ot_recover(
    pair: &(BigUint, BigUint),
    r: &BigUint,
    params: &GroupParams,
) -> Result<BigUint, OtError> {
    let (a, b) = pair;
    let a_r = params.pow(a, r);
    let inv = params.inverse(&a_r).ok_or(OtError::NotInvertible)?;
    Ok(params.mul(b, &inv))
}

impl OtReceiver {
    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn secret(&self) -> &BigUint {
        &self.r
    }

    /// Unblinds the chosen entry of a full reply.
    pub fn recover(&self, batch: &OtBatch, params: &GroupParams) -> Result<BigUint, OtError> {
        if batch.len() != self.z {
            return Err(OtError::BatchLength {
                got: batch.len(),
                expected: self.z,
            });
        }
        ot_recover(&batch.pairs[self.alpha - 1], &self.r, params)
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} rho={} g={} h={}",
            arith::to_hex(&self.p),
            arith::to_hex(&self.rho),
            arith::to_hex(&self.g),
            arith::to_hex(&self.h)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Repeated multiplication, independent of both exponentiation paths.
    fn naive_pow(b: u64, e: u64, m: u64) -> u64 {
        (0..e).fold(1u64, |acc, _| acc * b % m)
    }

    fn tiny() -> GroupParams {
        GroupParams::generate(5, b"tiny").unwrap()
    }

    #[test]
    fn five_bit_group_is_23_11() {
        let gp = tiny();
        assert_eq!(gp.p(), &big(23));
        assert_eq!(gp.rho(), &big(11));
        for x in [gp.g(), gp.h()] {
            assert!(!x.is_one());
            assert!(x.modpow(&big(11), &big(23)).is_one());
        }
        assert_ne!(gp.g(), gp.h());
    }

    #[test]
    fn setup_is_deterministic_and_seed_sensitive() {
        let a = GroupParams::generate(64, b"seed-a").unwrap();
        let b = GroupParams::generate(64, b"seed-a").unwrap();
        let c = GroupParams::generate(64, b"seed-b").unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.bits(), 64);
        assert_eq!(a.rho().bits(), 63);
    }

    #[test]
    fn setup_at_512_bits() {
        let gp = GroupParams::generate(512, b"ot-512").unwrap();
        assert_eq!(gp.p().bits(), 512);
        assert!(gp.g().modpow(gp.rho(), gp.p()).is_one());
        assert!(gp.h().modpow(gp.rho(), gp.p()).is_one());
    }

    #[test]
    #[ignore = "full-size safe prime search takes a while on one core"]
    fn setup_with_1024_bit_order() {
        let gp = GroupParams::generate(1025, b"full-scale").unwrap();
        assert_eq!(gp.rho().bits(), 1024);
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(
            GroupParams::generate(4, b"x").unwrap_err(),
            GroupError::TooSmall(4)
        );
        assert!(GroupParams::new(big(23), big(11), big(4), big(4)).is_err());
        assert!(GroupParams::new(big(23), big(11), big(5), big(4)).is_err()); // 5 has order 22
        assert!(GroupParams::new(big(25), big(12), big(4), big(2)).is_err());
        assert!(GroupParams::new(big(23), big(11), big(4), big(2)).is_ok());
    }

    #[test]
    fn query_vectors() {
        let gp = tiny();
        let (g, h) = (gp.g().to_u64().unwrap(), gp.h().to_u64().unwrap());
        let (req, _) = ot_query_with_secret(1, 3, big(0), &gp).unwrap();
        assert_eq!(&req.y, gp.h());
        let (req, _) = ot_query_with_secret(2, 3, big(3), &gp).unwrap();
        let expected = naive_pow(g, 3, 23) * naive_pow(h, 2, 23) % 23;
        assert_eq!(req.y, big(expected));
        assert_eq!(
            ot_query_with_secret(0, 3, big(1), &gp).unwrap_err(),
            OtError::ChoiceOutOfRange { alpha: 0, z: 3 }
        );
        assert!(ot_query_with_secret(4, 3, big(1), &gp).is_err());
    }

    #[test]
    fn independent_queries_differ() {
        let gp = GroupParams::generate(64, b"q").unwrap();
        let mut rng = derive_rng(b"q", "rng");
        let (a, _) = ot_query(3, 10, &gp, &mut rng).unwrap();
        let (b, _) = ot_query(3, 10, &gp, &mut rng).unwrap();
        assert_ne!(a.y, b.y);
    }

    #[test]
    fn respond_structure_and_degenerate_exponents() {
        let gp = tiny();
        let msgs: Vec<BigUint> = [10u64, 20, 22].iter().map(|&m| big(m)).collect();
        let mut rng = derive_rng(b"r", "rng");
        let (req, _) = ot_query(2, 3, &gp, &mut rng).unwrap();
        let batch = ot_respond(&req, &msgs, &gp, &mut rng).unwrap();
        assert_eq!(batch.len(), 3);
        for (a, b) in &batch.pairs {
            assert!(gp.is_unit(a) && gp.is_unit(b));
        }
        let zeros = vec![big(0); 3];
        let batch = ot_respond_with_exponents(&req, &msgs, &zeros, &gp).unwrap();
        for ((a, b), m) in batch.pairs.iter().zip(&msgs) {
            assert!(a.is_one());
            assert_eq!(b, m);
        }
        assert_eq!(
            ot_respond(&req, &[big(1), big(0)], &gp, &mut rng).unwrap_err(),
            OtError::MessageEncoding { index: 2 }
        );
        assert_eq!(
            ot_respond(&req, &[big(23)], &gp, &mut rng).unwrap_err(),
            OtError::MessageEncoding { index: 1 }
        );
    }

    #[test]
    fn recover_with_unit_first_component() {
        let gp = tiny();
        assert_eq!(
            ot_recover(&(big(1), big(17)), &big(5), &gp).unwrap(),
            big(17)
        );
    }

    #[test]
    fn five_message_transfer_picks_the_fourth() {
        let gp = GroupParams::generate(64, b"five").unwrap();
        let mut rng = derive_rng(b"five", "rng");
        let msgs: Vec<BigUint> = [2u64, 4, 6, 8, 10].iter().map(|&m| big(m)).collect();
        let (req, rx) = ot_query(4, 5, &gp, &mut rng).unwrap();
        let batch = ot_respond(&req, &msgs, &gp, &mut rng).unwrap();
        assert_eq!(rx.recover(&batch, &gp).unwrap(), big(8));
    }

    #[test]
    fn every_choice_recovers_at_z_100_in_both_rings() {
        for (bits, seed) in [(64u64, &b"word"[..]), (80, &b"big"[..])] {
            let gp = GroupParams::generate(bits, seed).unwrap();
            let mut rng = derive_rng(seed, "rng");
            let msgs: Vec<BigUint> = (0..100u64).map(|i| big(1000 + 7 * i)).collect();
            for alpha in 1..=100 {
                let (req, rx) = ot_query(alpha, 100, &gp, &mut rng).unwrap();
                let batch = ot_respond(&req, &msgs, &gp, &mut rng).unwrap();
                assert_eq!(rx.recover(&batch, &gp).unwrap(), msgs[alpha - 1]);
            }
        }
    }

    #[test]
    fn other_indices_do_not_unblind() {
        let gp = GroupParams::generate(64, b"cross").unwrap();
        let mut rng = derive_rng(b"cross", "rng");
        let msgs: Vec<BigUint> = (1..=10u64).map(big).collect();
        for _ in 0..100 {
            let (req, rx) = ot_query(3, 10, &gp, &mut rng).unwrap();
            let batch = ot_respond(&req, &msgs, &gp, &mut rng).unwrap();
            for j in (1..=10).filter(|&j| j != 3) {
                let got = ot_recover(&batch.pairs[j - 1], rx.secret(), &gp).unwrap();
                assert_ne!(got, msgs[j - 1]);
            }
        }
    }

    #[test]
    fn reachable_queries_do_not_depend_on_choice() {
        // At rho = 11 every alpha reaches the whole order-11 subgroup as r ranges over Z_11.
        let gp = tiny();
        let subgroup: HashSet<u64> = (0..11)
            .map(|e| naive_pow(gp.g().to_u64().unwrap(), e, 23))
            .collect();
        for alpha in 1..=11 {
            let reachable: HashSet<u64> = (0..11u64)
                .map(|r| {
                    ot_query_with_secret(alpha, 11, big(r), &gp)
                        .unwrap()
                        .0
                        .y
                        .to_u64()
                        .unwrap()
                })
                .collect();
            assert_eq!(reachable, subgroup, "alpha = {alpha}");
        }
    }

    #[test]
    fn batch_exponents_are_fresh() {
        let gp = GroupParams::generate(512, b"ot-512").unwrap();
        let mut rng = derive_rng(b"fresh", "rng");
        let msgs: Vec<BigUint> = (1..=1000u64).map(big).collect();
        let (req, _) = ot_query(1, 1000, &gp, &mut rng).unwrap();
        let batch = ot_respond(&req, &msgs, &gp, &mut rng).unwrap();
        let firsts: HashSet<&BigUint> = batch.pairs.iter().map(|(a, _)| a).collect();
        assert_eq!(firsts.len(), 1000);
    }

    #[test]
    fn word_and_big_paths_agree() {
        let gp = GroupParams::generate(62, b"agree").unwrap();
        let p = gp.p().clone();
        let mut rng = derive_rng(b"agree", "rng");
        for _ in 0..100 {
            let b = rng.gen_biguint_below(&p);
            let e = rng.gen_biguint(200);
            assert_eq!(gp.pow(&b, &e), b.modpow(&e, &p));
        }
    }
}
