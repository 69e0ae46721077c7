//! Big-integer helpers shared by every protocol layer: canonical hex,
//! primality testing, seeded randomness, and a single-word Montgomery ring
//! used when a group modulus fits in 64 bits.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Miller–Rabin rounds used for every primality decision.
pub const MILLER_RABIN_ROUNDS: usize = 64;

/// Odd primes used for trial division before Miller–Rabin.
pub(crate) const SMALL_PRIMES: [u32; 168] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421,
    431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547,
    557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
    661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797,
    809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919, 929,
    937, 941, 947, 953, 967, 971, 977, 983, 991, 997,
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HexError {
    #[error("empty hex string")]
    Empty,
    #[error("non-canonical hex {0:?} (lowercase, no leading zeros)")]
    NonCanonical(String),
    #[error("invalid hex digit in {0:?}")]
    InvalidDigit(String),
}

/// Lowercase big-endian hex with no leading zeros; zero is `"0"`.
pub fn to_hex(x: &BigUint) -> String {
    format!("{x:x}")
}

/// Strict inverse of [`to_hex`]: anything `to_hex` would not produce is rejected.
pub fn from_hex(s: &str) -> Result<BigUint, HexError> {
    if s.is_empty() {
        return Err(HexError::Empty);
    }
    if !s
        .bytes()
        .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
    {
        return Err(HexError::InvalidDigit(s.to_string()));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(HexError::NonCanonical(s.to_string()));
    }
    BigUint::parse_bytes(s.as_bytes(), 16).ok_or_else(|| HexError::InvalidDigit(s.to_string()))
}

/// serde adapter storing a `BigUint` as canonical hex.
pub mod hex_serde {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_hex(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        super::from_hex(&s).map_err(D::Error::custom)
    }
}

pub fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    if modulus.is_zero() {
        return None;
    }
    a.modinv(modulus)
}

pub fn is_coprime(a: &BigUint, b: &BigUint) -> bool {
    a.gcd(b).is_one()
}

/// Uniform integer in `[0, bound)`.
pub fn random_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    rng.gen_biguint_below(bound)
}

/// Probabilistic primality test: trial division, then `rounds` Miller–Rabin rounds
/// with random bases.
pub fn is_probable_prime<R: Rng + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return false;
        }
        for &p in SMALL_PRIMES.iter() {
            let p = u64::from(p);
            if small == p {
                return true;
            }
            if small % p == 0 {
                return false;
            }
        }
    } else {
        for &p in SMALL_PRIMES.iter() {
            if (n % p).is_zero() {
                return false;
            }
        }
    }
    miller_rabin(n, rounds, rng)
}

fn miller_rabin<R: Rng + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    // Bases are drawn from [2, n-2]; n > 997 here, so the range is never empty.
    let upper = n - &one;
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &upper);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
            if x == one {
                return false;
            }
        }
        return false;
    }
    true
}

/// A random prime of exactly `bits` bits whose top two bits are set, so the
/// product of two such primes has exactly the sum of their bit lengths.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Option<BigUint> {
    if bits < 2 {
        return None;
    }
    let attempts = 200 * bits as usize + 1_000;
    for _ in 0..attempts {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(bits - 2, true);
        candidate.set_bit(0, true);
        if is_probable_prime(&candidate, MILLER_RABIN_ROUNDS, rng) {
            return Some(candidate);
        }
    }
    None
}

/// Deterministic generator for one named purpose under a run seed. Distinct
/// labels give independent streams, so adding work under one label never
/// perturbs another.
pub fn derive_rng(seed: &[u8], label: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"era/rng/v1");
    h.update((seed.len() as u64).to_be_bytes());
    h.update(seed);
    h.update(label.as_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// Hash the given parts to an integer of `bits + 64` bits (counter-mode SHA-256),
/// suitable for reduction modulo a `bits`-bit modulus with negligible bias.
pub fn hash_to_int(parts: &[&[u8]], bits: u64) -> BigUint {
    let want = ((bits + 64).div_ceil(8)) as usize;
    let mut out = Vec::with_capacity(want + 32);
    let mut counter = 0u32;
    while out.len() < want {
        let mut h = Sha256::new();
        h.update(counter.to_be_bytes());
        for part in parts {
            h.update((part.len() as u64).to_be_bytes());
            h.update(part);
        }
        out.extend_from_slice(&h.finalize());
        counter += 1;
    }
    out.truncate(want);
    BigUint::from_bytes_be(&out)
}

/// Arithmetic in `Z_m` for an odd modulus `m < 2^64`, in Montgomery form.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) struct Mont64 {
    m: u64,
    /// `-m^{-1} mod 2^64`
    m_neg_inv: u64,
    /// `2^128 mod m`
    r2: u64,
}

impl fmt::Debug for Mont64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mont64({})", self.m)
    }
}

impl Mont64 {
    pub(crate) fn new(m: u64) -> Option<Self> {
        if m < 3 || m % 2 == 0 {
            return None;
        }
        // Newton iteration for m^{-1} mod 2^64.
        let mut inv: u64 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = (u128::from(u64::MAX) + 1) % u128::from(m);
        let r2 = ((r * r) % u128::from(m)) as u64;
        Some(Self {
            m,
            m_neg_inv: inv.wrapping_neg(),
            r2,
        })
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let k = (t as u64).wrapping_mul(self.m_neg_inv);
        let (sum, carry) = t.overflowing_add(u128::from(k) * u128::from(self.m));
        let u = (sum >> 64) as u64;
        if carry || u >= self.m {
            u.wrapping_sub(self.m)
        } else {
            u
        }
    }

    #[inline]
    pub(crate) fn to_mont(&self, x: u64) -> u64 {
        self.redc(u128::from(x % self.m) * u128::from(self.r2))
    }

    #[inline]
    pub(crate) fn from_mont(&self, x: u64) -> u64 {
        self.redc(u128::from(x))
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(u128::from(a) * u128::from(b))
    }

    pub(crate) fn one(&self) -> u64 {
        self.to_mont(1)
    }

    /// `base^exp` with `base` and the result in Montgomery form.
    pub(crate) fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }
}
