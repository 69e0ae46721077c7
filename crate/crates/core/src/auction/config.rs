//! Flat `key = value` auction configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::group::MIN_GROUP_BITS;
use crate::ope::{BidSpace, MAX_T};
use crate::paillier::MIN_RANDOM_KEY_BITS;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// How bidders are spread over networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assignment {
    RoundRobin,
    Random,
}

impl FromStr for Assignment {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "round_robin" => Ok(Assignment::RoundRobin),
            "random" => Ok(Assignment::Random),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assignment::RoundRobin => "round_robin",
            Assignment::Random => "random",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionConfig {
    pub z_min_cents: u64,
    pub z_max_cents: u64,
    pub z_step_cents: u64,
    pub t: u32,
    pub key_bits: u64,
    pub group_bits: u64,
    pub l: usize,
    pub w: usize,
    pub seed: u64,
    pub assignment: Assignment,
}

impl Default for AuctionConfig {
    /// $0.01 to $100 in cent steps, 32-bit mapped bids, 1024-bit Paillier keys.
    fn default() -> Self {
        AuctionConfig {
            z_min_cents: 1,
            z_max_cents: 10_000,
            z_step_cents: 1,
            t: 32,
            key_bits: 1024,
            group_bits: 1025,
            l: 10,
            w: 2,
            seed: 1,
            assignment: Assignment::RoundRobin,
        }
    }
}

pub const KEYS: [&str; 10] = [
    "z_min_cents",
    "z_max_cents",
    "z_step_cents",
    "t",
    "key_bits",
    "group_bits",
    "l",
    "w",
    "seed",
    "assignment",
];

impl AuctionConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = AuctionConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: "expected key = value".into(),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its text form. Does not re-validate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadValue {
                key: key.into(),
                value: value.into(),
            })
        }
        match key {
            "z_min_cents" => self.z_min_cents = num(key, value)?,
            "z_max_cents" => self.z_max_cents = num(key, value)?,
            "z_step_cents" => self.z_step_cents = num(key, value)?,
            "t" => self.t = num(key, value)?,
            "key_bits" => self.key_bits = num(key, value)?,
            "group_bits" => self.group_bits = num(key, value)?,
            "l" => self.l = num(key, value)?,
            "w" => self.w = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "assignment" => self.assignment = num(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn bid_space(&self) -> Result<BidSpace, ConfigError> {
        BidSpace::new(self.z_min_cents, self.z_max_cents, self.z_step_cents)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        let z = self.bid_space()?.len() as u64;
        if self.t == 0 || self.t > MAX_T {
            return invalid(format!("t must be in [1, {MAX_T}]"));
        }
        if (1u64 << self.t) - 1 < z {
            return invalid(format!("{z} bids do not fit below 2^{}", self.t));
        }
        if self.key_bits < MIN_RANDOM_KEY_BITS {
            return invalid(format!("key_bits must be at least {MIN_RANDOM_KEY_BITS}"));
        }
        if u64::from(self.t) + 1 >= self.key_bits {
            return invalid("key_bits must exceed t + 1".into());
        }
        if self.group_bits < MIN_GROUP_BITS || self.group_bits <= u64::from(self.t) {
            return invalid(format!(
                "group_bits must be at least {MIN_GROUP_BITS} and exceed t"
            ));
        }
        if self.l == 0 || self.w == 0 {
            return invalid("l and w must be positive".into());
        }
        if self.l > u32::MAX as usize || self.w > u32::MAX as usize {
            return invalid("l and w must fit in 32 bits".into());
        }
        // Identities 1..=l are Paillier plaintexts under every network key.
        if (self.l as u64)
            .checked_shl(1)
            .is_none_or(|x| x.ilog2() as u64 + 1 >= self.key_bits)
        {
            return invalid("l is too large for the key size".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("known key")))
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "z_min_cents" => self.z_min_cents.to_string(),
            "z_max_cents" => self.z_max_cents.to_string(),
            "z_step_cents" => self.z_step_cents.to_string(),
            "t" => self.t.to_string(),
            "key_bits" => self.key_bits.to_string(),
            "group_bits" => self.group_bits.to_string(),
            "l" => self.l.to_string(),
            "w" => self.w.to_string(),
            "seed" => self.seed.to_string(),
            "assignment" => self.assignment.to_string(),
            _ => return None,
        })
    }
}
