//! Paillier encryption with the `g = n + 1` generator and explicit randomness.
//!
//! Ciphertexts are `(1 + m·n)·r^n mod n²`. Besides the usual decryption with
//! the totient, the scheme is used here for three less common things: opening
//! a ciphertext with its randomness, recovering that randomness from the
//! totient, and re-encrypting to check a claimed opening (binding).

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{self, hex_serde, is_coprime, mod_inverse};

/// Smallest key size accepted by [`KeyPair::generate`]. Explicit prime sources
/// may build smaller keys for test vectors.
pub const MIN_RANDOM_KEY_BITS: u64 = 16;

const KEYGEN_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PaillierError {
    #[error("plaintext out of range [0, n)")]
    PlaintextOutOfRange,
    #[error("randomness must lie in [1, n) and be coprime to n")]
    InvalidRandomness,
    #[error("value is not a ciphertext under this key (not a unit mod n^2)")]
    NotACiphertext,
    #[error("randomness does not open this ciphertext")]
    InconsistentRandomness,
    #[error("ciphertext was produced under a different key")]
    KeyMismatch,
    #[error("n is not invertible modulo phi")]
    NonInvertibleModulus,
    #[error("invalid primes: {0}")]
    InvalidPrimes(&'static str),
    #[error("key generation failed: {0}")]
    KeyGeneration(String),
}

/// Short fingerprint of a public modulus, carried by every ciphertext.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyTag(pub u64);

impl fmt::Debug for KeyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyTag({:016x})", self.0)
    }
}

impl KeyTag {
    fn of(n: &BigUint) -> Self {
        let digest = Sha256::digest(n.to_bytes_be());
        let mut b = [0u8; 8];
        b.copy_from_slice(&digest[..8]);
        KeyTag(u64::from_be_bytes(b))
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PublicKeyRepr", into = "PublicKeyRepr")]
pub struct PublicKey {
    n: BigUint,
    n_sq: BigUint,
    tag: KeyTag,
}

#[derive(Serialize, Deserialize)]
struct PublicKeyRepr {
    #[serde(with = "hex_serde")]
    n: BigUint,
}

impl From<PublicKey> for PublicKeyRepr {
    fn from(pk: PublicKey) -> Self {
        PublicKeyRepr { n: pk.n }
    }
}

impl TryFrom<PublicKeyRepr> for PublicKey {
    type Error = PaillierError;
    fn try_from(r: PublicKeyRepr) -> Result<Self, Self::Error> {
        PublicKey::new(r.n)
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({} bits, {:?})", self.n.bits(), self.tag)
    }
}

impl PublicKey {
    pub fn new(n: BigUint) -> Result<Self, PaillierError> {
        if n < BigUint::from(6u32) || !n.bit(0) {
            return Err(PaillierError::InvalidPrimes(
                "modulus must be an odd composite",
            ));
        }
        let n_sq = &n * &n;
        let tag = KeyTag::of(&n);
        Ok(Self { n, n_sq, tag })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_squared(&self) -> &BigUint {
        &self.n_sq
    }

    pub fn tag(&self) -> KeyTag {
        self.tag
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }

    /// `E_n(m, r) = (1 + m·n)·r^n mod n²`.
    pub fn encrypt(&self, m: &BigUint, r: &Randomness) -> Result<Ciphertext, PaillierError> {
        if m >= &self.n {
            return Err(PaillierError::PlaintextOutOfRange);
        }
        self.check_randomness(r)?;
        let g_m = (BigUint::one() + m * &self.n) % &self.n_sq;
        let r_n = r.0.modpow(&self.n, &self.n_sq);
        Ok(self.wrap((g_m * r_n) % &self.n_sq))
    }

    pub fn encrypt_u64(&self, m: u64, r: &Randomness) -> Result<Ciphertext, PaillierError> {
        self.encrypt(&BigUint::from(m), r)
    }

    /// Opens `c` with the randomness it was made with:
    /// `m = ((c · r^{-n} mod n²) − 1) / n`.
    pub fn decrypt_with_randomness(
        &self,
        c: &Ciphertext,
        r: &Randomness,
    ) -> Result<BigUint, PaillierError> {
        self.check_tag(c)?;
        self.check_randomness(r)?;
        let r_inv = mod_inverse(&r.0, &self.n_sq).ok_or(PaillierError::InvalidRandomness)?;
        let x = (&c.value * r_inv.modpow(&self.n, &self.n_sq)) % &self.n_sq;
        if x.is_zero() {
            return Err(PaillierError::NotACiphertext);
        }
        let x_minus_one = x - 1u32;
        if !(&x_minus_one % &self.n).is_zero() {
            return Err(PaillierError::InconsistentRandomness);
        }
        // x < n² so the quotient is already below n.
        Ok(x_minus_one / &self.n)
    }

    /// Ciphertext inverse mod n²; encrypts `(n − m) mod n` under `r^{-1} mod n`.
    pub fn invert(&self, c: &Ciphertext) -> Result<Ciphertext, PaillierError> {
        self.check_tag(c)?;
        let inv = mod_inverse(&c.value, &self.n_sq).ok_or(PaillierError::NotACiphertext)?;
        Ok(self.wrap(inv))
    }

    /// Homomorphic addition: `c1·c2 mod n²` encrypts `(m1 + m2) mod n` under `r1·r2`.
    pub fn add(&self, c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext, PaillierError> {
        self.check_tag(c1)?;
        self.check_tag(c2)?;
        Ok(self.wrap((&c1.value * &c2.value) % &self.n_sq))
    }

    /// `E_n(0, r) = r^n mod n²`, the right-hand side of a range-proof check.
    pub fn encrypt_zero(&self, r: &Randomness) -> Result<Ciphertext, PaillierError> {
        self.encrypt(&BigUint::zero(), r)
    }

    /// Wraps a raw value as a ciphertext under this key after checking it is a unit mod n².
    pub fn ciphertext(&self, value: BigUint) -> Result<Ciphertext, PaillierError> {
        if value >= self.n_sq || !is_coprime(&value, &self.n_sq) {
            return Err(PaillierError::NotACiphertext);
        }
        Ok(self.wrap(value))
    }

    pub fn ciphertext_from_hex(&self, s: &str) -> Result<Ciphertext, CiphertextParseError> {
        let v = arith::from_hex(s)?;
        Ok(self.ciphertext(v)?)
    }

    pub fn randomness(&self, r: BigUint) -> Result<Randomness, PaillierError> {
        let r = Randomness(r);
        self.check_randomness(&r)?;
        Ok(r)
    }

    pub(crate) fn wrap(&self, value: BigUint) -> Ciphertext {
        Ciphertext {
            value,
            key: self.tag,
        }
    }

    fn check_tag(&self, c: &Ciphertext) -> Result<(), PaillierError> {
        if c.key != self.tag {
            return Err(PaillierError::KeyMismatch);
        }
        Ok(())
    }

    fn check_randomness(&self, r: &Randomness) -> Result<(), PaillierError> {
        if r.0.is_zero() || r.0 >= self.n || !is_coprime(&r.0, &self.n) {
            return Err(PaillierError::InvalidRandomness);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CiphertextParseError {
    #[error(transparent)]
    Hex(#[from] arith::HexError),
    #[error(transparent)]
    Paillier(#[from] PaillierError),
}

/// Private key material. `phi = (p−1)(q−1)` is the decryption key.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "KeyPairRepr", into = "KeyPairRepr")]
pub struct KeyPair {
    p: BigUint,
    q: BigUint,
    phi: BigUint,
    phi_inv: BigUint,
    n_inv_mod_phi: BigUint,
    public: PublicKey,
}

#[derive(Serialize, Deserialize)]
struct KeyPairRepr {
    #[serde(with = "hex_serde")]
    p: BigUint,
    #[serde(with = "hex_serde")]
    q: BigUint,
}

impl From<KeyPair> for KeyPairRepr {
    fn from(k: KeyPair) -> Self {
        KeyPairRepr { p: k.p, q: k.q }
    }
}

impl TryFrom<KeyPairRepr> for KeyPair {
    type Error = PaillierError;
    fn try_from(r: KeyPairRepr) -> Result<Self, Self::Error> {
        KeyPair::from_primes(r.p, r.q)
    }
}

impl PartialEq for KeyPair {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.q == other.q
    }
}

impl Eq for KeyPair {}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl KeyPair {
    /// Builds a key from two primes. Primality is trusted for inputs that are
    /// not checked cheaply; distinctness, oddness and `gcd(n, phi) = 1` are enforced.
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self, PaillierError> {
        let three = BigUint::from(3u32);
        if p < three || q < three || !p.bit(0) || !q.bit(0) {
            return Err(PaillierError::InvalidPrimes(
                "primes must be odd and at least 3",
            ));
        }
        if p == q {
            return Err(PaillierError::InvalidPrimes("p and q must differ"));
        }
        let n = &p * &q;
        let phi = (&p - 1u32) * (&q - 1u32);
        if !is_coprime(&n, &phi) {
            return Err(PaillierError::InvalidPrimes("gcd(n, phi) != 1"));
        }
        let phi_inv = mod_inverse(&phi, &n).ok_or(PaillierError::NonInvertibleModulus)?;
        let n_inv_mod_phi = mod_inverse(&n, &phi).ok_or(PaillierError::NonInvertibleModulus)?;
        Ok(Self {
            p,
            q,
            phi,
            phi_inv,
            n_inv_mod_phi,
            public: PublicKey::new(n)?,
        })
    }

    /// Random key of exactly `bits` bits.
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<Self, PaillierError> {
        if bits < MIN_RANDOM_KEY_BITS {
            return Err(PaillierError::KeyGeneration(format!(
                "key size {bits} below minimum {MIN_RANDOM_KEY_BITS}"
            )));
        }
        keygen(bits, &mut RandomPrimes(rng))
    }

    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn phi(&self) -> &BigUint {
        &self.phi
    }

    /// `m = L(c^phi mod n²) · phi^{-1} mod n`, with `L(x) = (x − 1)/n`.
    pub fn decrypt(&self, c: &Ciphertext) -> Result<BigUint, PaillierError> {
        let pk = &self.public;
        pk.check_tag(c)?;
        if c.value >= pk.n_sq || !is_coprime(&c.value, &pk.n_sq) {
            return Err(PaillierError::NotACiphertext);
        }
        let u = c.value.modpow(&self.phi, &pk.n_sq);
        let l = (u - 1u32) / &pk.n;
        Ok((l * &self.phi_inv) % &pk.n)
    }

    /// `r = c^{n^{-1} mod phi} mod n`: the randomness `c` was encrypted with.
    pub fn recover_randomness(&self, c: &Ciphertext) -> Result<Randomness, PaillierError> {
        let pk = &self.public;
        pk.check_tag(c)?;
        if c.value >= pk.n_sq || !is_coprime(&c.value, &pk.n_sq) {
            return Err(PaillierError::NotACiphertext);
        }
        let base = &c.value % &pk.n;
        Ok(Randomness(base.modpow(&self.n_inv_mod_phi, &pk.n)))
    }
}

/// Supplies primes to [`keygen`].
pub trait PrimeSource {
    fn next_prime(&mut self, bits: u64) -> Option<BigUint>;
}

/// Random primes with the top two bits set.
pub struct RandomPrimes<R>(pub R);

impl<R: Rng> PrimeSource for RandomPrimes<R> {
    fn next_prime(&mut self, bits: u64) -> Option<BigUint> {
        arith::random_prime(bits, &mut self.0)
    }
}

/// Hands out a fixed list of primes in order, ignoring the requested size.
#[derive(Debug, Clone)]
pub struct FixedPrimes(VecDeque<BigUint>);

impl FixedPrimes {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        FixedPrimes(primes.into_iter().map(BigUint::from).collect())
    }
}

impl PrimeSource for FixedPrimes {
    fn next_prime(&mut self, _bits: u64) -> Option<BigUint> {
        self.0.pop_front()
    }
}

/// Draws `p` of `bits/2` bits and `q` of the remaining bits until `n = pq`
/// has exactly `bits` bits and the key invariants hold.
pub fn keygen<S: PrimeSource + ?Sized>(
    bits: u64,
    source: &mut S,
) -> Result<KeyPair, PaillierError> {
    if bits < 4 {
        return Err(PaillierError::KeyGeneration(format!(
            "key size {bits} too small"
        )));
    }
    let p_bits = bits / 2;
    let q_bits = bits - p_bits;
    for _ in 0..KEYGEN_ATTEMPTS {
        let p = source
            .next_prime(p_bits)
            .ok_or_else(|| PaillierError::KeyGeneration("prime source exhausted".into()))?;
        let q = source
            .next_prime(q_bits)
            .ok_or_else(|| PaillierError::KeyGeneration("prime source exhausted".into()))?;
        if (&p * &q).bits() != bits {
            continue;
        }
        match KeyPair::from_primes(p, q) {
            Ok(k) => return Ok(k),
            Err(PaillierError::InvalidPrimes(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PaillierError::KeyGeneration(format!(
        "no valid {bits}-bit key after {KEYGEN_ATTEMPTS} attempts"
    )))
}

/// An element of `Z_n^*` used as encryption randomness.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Randomness(#[serde(with = "hex_serde")] BigUint);

impl fmt::Debug for Randomness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Randomness({:x})", self.0)
    }
}

impl Randomness {
    /// Uniform over `[2, n)` subject to `gcd(r, n) = 1`.
    pub fn sample<R: Rng + ?Sized>(pk: &PublicKey, rng: &mut R) -> Self {
        let two = BigUint::from(2u32);
        loop {
            let r = num_bigint::RandBigInt::gen_biguint_range(rng, &two, &pk.n);
            if is_coprime(&r, &pk.n) {
                return Randomness(r);
            }
        }
    }

    /// No range or coprimality check; use [`PublicKey::randomness`] for that.
    pub fn new_unchecked(r: BigUint) -> Self {
        Randomness(r)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        arith::to_hex(&self.0)
    }

    /// `self · other mod n`.
    pub fn mul(&self, other: &Randomness, pk: &PublicKey) -> Randomness {
        Randomness((&self.0 * &other.0) % &pk.n)
    }

    /// `self^{-1} mod n`.
    pub fn inverse(&self, pk: &PublicKey) -> Result<Randomness, PaillierError> {
        mod_inverse(&self.0, &pk.n)
            .map(Randomness)
            .ok_or(PaillierError::InvalidRandomness)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ciphertext {
    #[serde(with = "hex_serde")]
    value: BigUint,
    key: KeyTag,
}

impl fmt::Debug for Ciphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ciphertext({:x})", self.value)
    }
}

impl Ciphertext {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn key_tag(&self) -> KeyTag {
        self.key
    }

    pub fn to_hex(&self) -> String {
        arith::to_hex(&self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::derive_rng;
    use proptest::prelude::*;

    fn key_35() -> KeyPair {
        keygen(6, &mut FixedPrimes::new([5, 7])).unwrap()
    }

    fn r(pk: &PublicKey, v: u64) -> Randomness {
        pk.randomness(BigUint::from(v)).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn keygen_from_fixed_primes() {
        let k = key_35();
        assert_eq!(k.public().n(), &big(35));
        assert_eq!(k.phi(), &big(24));
        assert_eq!(k.public().n_squared(), &big(1225));

        let k = keygen(8, &mut FixedPrimes::new([11, 13])).unwrap();
        assert_eq!(k.public().n(), &big(143));
        assert_eq!(k.phi(), &big(120));
    }

    #[test]
    fn keygen_rejects_bad_primes() {
        assert!(KeyPair::from_primes(big(7), big(7)).is_err());
        assert!(KeyPair::from_primes(big(4), big(7)).is_err());
        // n = 21, phi = 12: gcd 3.
        assert!(KeyPair::from_primes(big(3), big(7)).is_err());
        assert!(matches!(
            keygen(6, &mut FixedPrimes::new([5])),
            Err(PaillierError::KeyGeneration(_))
        ));
    }

    #[test]
    fn random_keys_have_exact_size() {
        let mut rng = derive_rng(b"paillier", "keys");
        for bits in [16u64, 17, 64, 256] {
            let k = KeyPair::generate(bits, &mut rng).unwrap();
            assert_eq!(k.public().bits(), bits);
            assert!(is_coprime(k.public().n(), k.phi()));
            assert_ne!(k.p(), k.q());
        }
        assert!(KeyPair::generate(8, &mut rng).is_err());
    }

    #[test]
    fn encrypt_vectors_at_n_35() {
        let k = key_35();
        let pk = k.public();
        assert_eq!(pk.encrypt_u64(0, &r(pk, 1)).unwrap().value(), &big(1));
        let c = pk.encrypt_u64(3, &r(pk, 2)).unwrap();
        assert_eq!(c.value(), &big(683));
        assert_eq!(k.decrypt(&c).unwrap(), big(3));
        assert_eq!(pk.decrypt_with_randomness(&c, &r(pk, 2)).unwrap(), big(3));
        assert_eq!(k.recover_randomness(&c).unwrap(), r(pk, 2));

        let one = pk.ciphertext(big(1)).unwrap();
        assert_eq!(k.decrypt(&one).unwrap(), big(0));
        assert_eq!(pk.decrypt_with_randomness(&one, &r(pk, 1)).unwrap(), big(0));
        assert_eq!(k.recover_randomness(&one).unwrap(), r(pk, 1));
    }

    #[test]
    fn wrong_randomness_is_inconsistent() {
        let k = key_35();
        let pk = k.public();
        let c = pk.encrypt_u64(3, &r(pk, 2)).unwrap();
        assert_eq!(
            pk.decrypt_with_randomness(&c, &r(pk, 3)),
            Err(PaillierError::InconsistentRandomness)
        );
    }

    #[test]
    fn encrypt_domain_errors() {
        let k = key_35();
        let pk = k.public();
        assert_eq!(
            pk.encrypt_u64(35, &r(pk, 2)),
            Err(PaillierError::PlaintextOutOfRange)
        );
        for bad in [0u64, 5, 7, 35, 40] {
            assert_eq!(
                pk.encrypt_u64(1, &Randomness::new_unchecked(big(bad))),
                Err(PaillierError::InvalidRandomness)
            );
        }
        assert_eq!(pk.ciphertext(big(5)), Err(PaillierError::NotACiphertext));
        assert_eq!(pk.ciphertext(big(1225)), Err(PaillierError::NotACiphertext));
    }

    #[test]
    fn homomorphism_and_inverse_at_n_35() {
        let k = key_35();
        let pk = k.public();
        let c1 = pk.encrypt_u64(3, &r(pk, 2)).unwrap();
        let c2 = pk.encrypt_u64(4, &r(pk, 3)).unwrap();
        let sum = pk.add(&c1, &c2).unwrap();
        assert_eq!(sum, pk.encrypt_u64(7, &r(pk, 6)).unwrap());
        assert_eq!(sum.value(), &big(146));
        assert_eq!(k.decrypt(&sum).unwrap(), big(7));

        let identity = pk.encrypt_u64(0, &r(pk, 1)).unwrap();
        assert_eq!(pk.add(&c1, &identity).unwrap(), c1);

        let wrap = pk
            .add(
                &pk.encrypt_u64(30, &r(pk, 2)).unwrap(),
                &pk.encrypt_u64(10, &r(pk, 4)).unwrap(),
            )
            .unwrap();
        assert_eq!(k.decrypt(&wrap).unwrap(), big(5));

        let inv = pk.invert(&c1).unwrap();
        assert_eq!(inv.value(), &big(947));
        assert_eq!(k.decrypt(&inv).unwrap(), big(32));
        assert_eq!(pk.add(&c1, &inv).unwrap().value(), &big(1));
        assert_eq!(pk.invert(&one(pk)).unwrap().value(), &big(1));
    }

    fn one(pk: &PublicKey) -> Ciphertext {
        pk.ciphertext(big(1)).unwrap()
    }

    #[test]
    fn binding_is_exhaustive_at_n_35() {
        let k = key_35();
        let pk = k.public();
        let mut seen = std::collections::HashMap::new();
        for m in 0..35u64 {
            for rv in 1..35u64 {
                let Ok(rand) = pk.randomness(big(rv)) else {
                    continue;
                };
                let c = pk.encrypt_u64(m, &rand).unwrap();
                if let Some(prev) = seen.insert(c.value().clone(), (m, rv)) {
                    panic!("collision between {prev:?} and {:?}", (m, rv));
                }
            }
        }
        assert_eq!(seen.len(), 35 * 24);
    }

    #[test]
    fn key_mismatch_is_rejected() {
        let a = key_35();
        let b = keygen(8, &mut FixedPrimes::new([11, 13])).unwrap();
        let ca = a.public().encrypt_u64(1, &r(a.public(), 2)).unwrap();
        let cb = b.public().encrypt_u64(1, &r(b.public(), 2)).unwrap();
        assert_eq!(a.public().add(&ca, &cb), Err(PaillierError::KeyMismatch));
        assert_eq!(b.decrypt(&ca), Err(PaillierError::KeyMismatch));
    }

    #[test]
    fn keypair_serde_round_trip() {
        let k = key_35();
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(json, r#"{"p":"5","q":"7"}"#);
        let back: KeyPair = serde_json::from_str(&json).unwrap();
        assert_eq!(back.phi(), k.phi());
        assert!(serde_json::from_str::<KeyPair>(r#"{"p":"7","q":"7"}"#).is_err());
        let c = k.public().encrypt_u64(3, &r(k.public(), 2)).unwrap();
        let back: Ciphertext = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trips_under_random_64_bit_key(seed in any::<u64>(), m_raw in any::<u64>()) {
            let mut rng = derive_rng(&seed.to_be_bytes(), "prop");
            let k = KeyPair::generate(64, &mut rng).unwrap();
            let pk = k.public();
            let m = BigUint::from(m_raw) % pk.n();
            let rand = Randomness::sample(pk, &mut rng);
            let c = pk.encrypt(&m, &rand).unwrap();
            prop_assert_eq!(k.decrypt(&c).unwrap(), m.clone());
            prop_assert_eq!(pk.decrypt_with_randomness(&c, &rand).unwrap(), m);
            prop_assert_eq!(k.recover_randomness(&c).unwrap(), rand);
        }
    }
}
