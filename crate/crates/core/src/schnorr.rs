//! Schnorr signatures in the order-`ρ` subgroup, with deterministic nonces.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{from_hex, hash_to_int, hex_serde, to_hex, HexError};
use crate::group::GroupParams;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("signature does not verify")]
    Invalid,
    #[error("malformed signature encoding")]
    Encoding,
    #[error("verifying key is not a subgroup element")]
    BadKey,
}

impl From<HexError> for SignatureError {
    fn from(_: HexError) -> Self {
        SignatureError::Encoding
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerifyingKey(#[serde(with = "hex_serde")] BigUint);

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigningKey {
    #[serde(with = "hex_serde")]
    x: BigUint,
    public: VerifyingKey,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    #[serde(with = "hex_serde")]
    e: BigUint,
    #[serde(with = "hex_serde")]
    s: BigUint,
}

impl fmt::Debug for VerifyingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VerifyingKey({:x})", self.0)
    }
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigningKey")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", self.encode())
    }
}

fn element_bytes(params: &GroupParams, x: &BigUint) -> Vec<u8> {
    let width = (params.bits() as usize).div_ceil(8);
    let raw = x.to_bytes_be();
    let mut out = vec![0u8; width.saturating_sub(raw.len())];
    out.extend_from_slice(&raw);
    out
}

fn challenge(params: &GroupParams, r: &BigUint, y: &BigUint, msg: &[u8]) -> BigUint {
    let digest = Sha256::new()
        .chain_update(b"era/schnorr/challenge")
        .chain_update(element_bytes(params, r))
        .chain_update(element_bytes(params, y))
        .chain_update(msg)
        .finalize();
    hash_to_int(&[&digest], params.rho().bits()) % params.rho()
}

impl SigningKey {
    /// Key with secret exponent derived from `(seed, label)`.
    pub fn derive(params: &GroupParams, seed: &[u8], label: &str) -> Self {
        let rho_minus_one = params.rho() - 1u32;
        let x = hash_to_int(
            &[b"era/schnorr/key", seed, label.as_bytes()],
            params.rho().bits(),
        ) % &rho_minus_one
            + 1u32;
        let public = VerifyingKey(params.pow(params.g(), &x));
        SigningKey { x, public }
    }

    pub fn verifying_key(&self) -> &VerifyingKey {
        &self.public
    }

    pub fn sign(&self, params: &GroupParams, msg: &[u8]) -> Signature {
        let x_bytes = self.x.to_bytes_be();
        let mut counter = 0u32;
        loop {
            let k = hash_to_int(
                &[b"era/schnorr/nonce", &x_bytes, msg, &counter.to_be_bytes()],
                params.rho().bits(),
            ) % params.rho();
            counter += 1;
            if k.is_zero() {
                continue;
            }
            let r = params.pow(params.g(), &k);
            let e = challenge(params, &r, &self.public.0, msg);
            let s = (k + &e * &self.x) % params.rho();
            return Signature { e, s };
        }
    }
}

impl VerifyingKey {
    pub fn from_value(params: &GroupParams, y: BigUint) -> Result<Self, SignatureError> {
        if y.is_zero() || &y >= params.p() || !params.pow(&y, params.rho()).is_one() {
            return Err(SignatureError::BadKey);
        }
        Ok(VerifyingKey(y))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        to_hex(&self.0)
    }

    pub fn verify(
        &self,
        params: &GroupParams,
        msg: &[u8],
        sig: &Signature,
    ) -> Result<(), SignatureError> {
        if &sig.e >= params.rho() || &sig.s >= params.rho() {
            return Err(SignatureError::Invalid);
        }
        // R = g^s · y^{-e} = g^s · y^{ρ−e}
        let neg_e = params.rho() - &sig.e;
        let r = params.mul(
            &params.pow(params.g(), &sig.s),
            &params.pow(&self.0, &neg_e),
        );
        if challenge(params, &r, &self.0, msg) == sig.e {
            Ok(())
        } else {
            Err(SignatureError::Invalid)
        }
    }
}

impl Signature {
    /// `(e, s)`.
    pub fn components(&self) -> (&BigUint, &BigUint) {
        (&self.e, &self.s)
    }

    /// `e:s` in hex.
    pub fn encode(&self) -> String {
        format!("{}:{}", to_hex(&self.e), to_hex(&self.s))
    }

    pub fn decode(s: &str) -> Result<Self, SignatureError> {
        let (e, s) = s.split_once(':').ok_or(SignatureError::Encoding)?;
        Ok(Signature {
            e: from_hex(e)?,
            s: from_hex(s)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GroupParams {
        GroupParams::generate(64, b"schnorr").unwrap()
    }

    #[test]
    fn sign_and_verify() {
        let gp = params();
        let sk = SigningKey::derive(&gp, b"seed", "alice");
        let sig = sk.sign(&gp, b"hello");
        sk.verifying_key().verify(&gp, b"hello", &sig).unwrap();
        assert_eq!(sig, sk.sign(&gp, b"hello"));
        assert_eq!(
            sk.verifying_key().verify(&gp, b"hellp", &sig).unwrap_err(),
            SignatureError::Invalid
        );
        let other = SigningKey::derive(&gp, b"seed", "bob");
        assert_ne!(other.verifying_key(), sk.verifying_key());
        assert!(other.verifying_key().verify(&gp, b"hello", &sig).is_err());
    }

    #[test]
    fn works_in_a_big_group() {
        let gp = GroupParams::generate(160, b"schnorr-big").unwrap();
        let sk = SigningKey::derive(&gp, b"s", "k");
        let sig = sk.sign(&gp, b"msg");
        sk.verifying_key().verify(&gp, b"msg", &sig).unwrap();
    }

    #[test]
    fn encoding_round_trip() {
        let gp = params();
        let sk = SigningKey::derive(&gp, b"seed", "alice");
        let sig = sk.sign(&gp, b"x");
        assert_eq!(Signature::decode(&sig.encode()).unwrap(), sig);
        assert!(Signature::decode("12").is_err());
        assert!(Signature::decode("012:3").is_err());
        let json = serde_json::to_string(&sk).unwrap();
        let back: SigningKey = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sk);
    }

    #[test]
    fn rejects_out_of_range_components_and_keys() {
        let gp = params();
        let sk = SigningKey::derive(&gp, b"seed", "alice");
        let mut sig = sk.sign(&gp, b"x");
        sig.s += gp.rho();
        assert!(sk.verifying_key().verify(&gp, b"x", &sig).is_err());
        assert!(VerifyingKey::from_value(&gp, BigUint::zero()).is_err());
        assert!(VerifyingKey::from_value(&gp, gp.p() - 1u32).is_err());
        assert!(VerifyingKey::from_value(&gp, sk.verifying_key().value().clone()).is_ok());
    }
}
