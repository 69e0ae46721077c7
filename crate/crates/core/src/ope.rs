//! The agent's order-preserving bid mapping and its role as OT sender.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{derive_rng, from_hex, to_hex};
use crate::group::{ot_respond, GroupParams, OtBatch, OtError, OtRequest};

/// Largest supported bound on mapped bids, so they fit in a `u64`.
pub const MAX_T: u32 = 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpeError {
    #[error("invalid bid space: {0}")]
    InvalidSpace(String),
    #[error("{z} bids do not fit in [1, 2^{t} - 1]")]
    Capacity { z: usize, t: u32 },
    #[error("bid {0} cents is not in the bid space")]
    UnknownBid(u64),
    #[error("mapped bid {0} is not in the table")]
    UnknownMapped(u64),
    #[error("table line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// The finite set of allowed bids in cents, listed highest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidSpace {
    min: u64,
    max: u64,
    step: u64,
}

impl BidSpace {
    pub fn new(min_cents: u64, max_cents: u64, step_cents: u64) -> Result<Self, OpeError> {
        if min_cents == 0 {
            return Err(OpeError::InvalidSpace("bids must be positive".into()));
        }
        if min_cents > max_cents {
            return Err(OpeError::InvalidSpace(format!(
                "min {min_cents} exceeds max {max_cents}"
            )));
        }
        if step_cents == 0 {
            return Err(OpeError::InvalidSpace("step must be positive".into()));
        }
        if (max_cents - min_cents) % step_cents != 0 {
            return Err(OpeError::InvalidSpace(format!(
                "range {} is not a multiple of step {step_cents}",
                max_cents - min_cents
            )));
        }
        if (max_cents - min_cents) / step_cents >= usize::MAX as u64 {
            return Err(OpeError::InvalidSpace("too many bids".into()));
        }
        Ok(Self {
            min: min_cents,
            max: max_cents,
            step: step_cents,
        })
    }

    pub fn min(&self) -> u64 {
        self.min
    }

    pub fn max(&self) -> u64 {
        self.max
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Number of bids `z`.
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The bid at 1-based position `alpha` (`alpha = 1` is the largest).
    pub fn value(&self, alpha: usize) -> Option<u64> {
        (1..=self.len())
            .contains(&alpha)
            .then(|| self.max - (alpha as u64 - 1) * self.step)
    }

    /// 1-based position of `cents`, the OT choice index for that bid.
    pub fn position(&self, cents: u64) -> Option<usize> {
        if cents < self.min || cents > self.max || (self.max - cents) % self.step != 0 {
            return None;
        }
        Some(((self.max - cents) / self.step) as usize + 1)
    }

    pub fn contains(&self, cents: u64) -> bool {
        self.position(cents).is_some()
    }

    /// All bids, highest first.
    pub fn values(&self) -> impl DoubleEndedIterator<Item = u64> + ExactSizeIterator + '_ {
        (0..self.len()).map(move |i| self.max - i as u64 * self.step)
    }
}

/// Anything that can answer "what is the mapped value of this bid".
pub trait MappedBidLookup {
    fn mapped_bid(&self, cents: u64) -> Option<u64>;
}

/// A random order-preserving injection of the bid space into `[1, 2^t − 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "OpeTableRepr", into = "OpeTableRepr")]
pub struct OpeTable {
    space: BidSpace,
    t: u32,
    seed: u64,
    /// Aligned with `space.values()`, so strictly descending.
    mapped: Vec<u64>,
    inverse: HashMap<u64, usize>,
}

#[derive(Serialize, Deserialize)]
struct OpeTableRepr {
    space: BidSpace,
    t: u32,
    seed: u64,
}

impl From<OpeTable> for OpeTableRepr {
    fn from(table: OpeTable) -> Self {
        OpeTableRepr {
            space: table.space,
            t: table.t,
            seed: table.seed,
        }
    }
}

impl TryFrom<OpeTableRepr> for OpeTable {
    type Error = OpeError;
    fn try_from(r: OpeTableRepr) -> Result<Self, OpeError> {
        OpeTable::generate(r.space, r.t, r.seed)
    }
}

impl PartialEq for OpeTable {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.t == other.t && self.mapped == other.mapped
    }
}

impl Eq for OpeTable {}

impl OpeTable {
    /// Samples `z` distinct values from `[1, 2^t − 1]` and assigns them to the
    /// bids in order. Deterministic in `(space, t, seed)`.
    pub fn generate(space: BidSpace, t: u32, seed: u64) -> Result<Self, OpeError> {
        let z = space.len();
        if t == 0 || t > MAX_T || (1u64 << t) - 1 < z as u64 {
            return Err(OpeError::Capacity { z, t });
        }
        let range = ((1u64 << t) - 1) as usize;
        let mut rng = derive_rng(&seed.to_be_bytes(), "ope/table");
        let mut mapped: Vec<u64> = rand::seq::index::sample(&mut rng, range, z)
            .into_iter()
            .map(|i| i as u64 + 1)
            .collect();
        mapped.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self::from_parts(space, t, seed, mapped))
    }

    fn from_parts(space: BidSpace, t: u32, seed: u64, mapped: Vec<u64>) -> Self {
        let inverse = mapped.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Self {
            space,
            t,
            seed,
            mapped,
            inverse,
        }
    }

    pub fn space(&self) -> &BidSpace {
        &self.space
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.mapped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapped.is_empty()
    }

    /// Mapped values in bid-space order (highest first).
    pub fn mapped_values(&self) -> &[u64] {
        &self.mapped
    }

    pub fn map(&self, cents: u64) -> Result<u64, OpeError> {
        let alpha = self
            .space
            .position(cents)
            .ok_or(OpeError::UnknownBid(cents))?;
        Ok(self.mapped[alpha - 1])
    }

    pub fn unmap(&self, mapped: u64) -> Result<u64, OpeError> {
        let i = *self
            .inverse
            .get(&mapped)
            .ok_or(OpeError::UnknownMapped(mapped))?;
        Ok(self.space.max - i as u64 * self.space.step)
    }

    /// Private table file: a `#t` header line, then `cents<TAB>mapped-hex` rows,
    /// highest bid first.
    pub fn to_file_string(&self) -> String {
        let mut out = String::with_capacity(self.mapped.len() * 16);
        let _ = writeln!(out, "#t\t{}", self.t);
        for (cents, &m) in self.space.values().zip(&self.mapped) {
            let _ = writeln!(out, "{cents}\t{}", to_hex(&BigUint::from(m)));
        }
        out
    }

    /// Inverse of [`OpeTable::to_file_string`]. The seed is not stored in the
    /// file and is reported as 0.
    pub fn from_file_str(text: &str) -> Result<Self, OpeError> {
        let perr = |line: usize, reason: &str| OpeError::Parse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
        let t: u32 = header
            .strip_prefix("#t\t")
            .and_then(|s| s.parse().ok())
            .filter(|&t| (1..=MAX_T).contains(&t))
            .ok_or_else(|| perr(1, "expected '#t<TAB>bits' header"))?;
        let mut rows: Vec<(u64, u64)> = Vec::new();
        for (no, line) in lines {
            let (c, m) = line
                .split_once('\t')
                .ok_or_else(|| perr(no, "expected two tab-separated columns"))?;
            let cents: u64 = c.parse().map_err(|_| perr(no, "bad cents value"))?;
            let mapped = from_hex(m)
                .ok()
                .and_then(|v| u64::try_from(v).ok())
                .ok_or_else(|| perr(no, "bad mapped value"))?;
            if mapped == 0 || (t < 64 && mapped >= 1u64 << t) {
                return Err(perr(no, "mapped value outside [1, 2^t - 1]"));
            }
            if let Some(&(pc, pm)) = rows.last() {
                if cents >= pc || mapped >= pm {
                    return Err(perr(no, "rows are not strictly descending"));
                }
            }
            rows.push((cents, mapped));
        }
        let (max, _) = *rows.first().ok_or_else(|| perr(2, "no rows"))?;
        let (min, _) = *rows.last().expect("nonempty");
        let step = if rows.len() > 1 {
            rows[0].0 - rows[1].0
        } else {
            1
        };
        let space = BidSpace::new(min, max, step).map_err(|e| perr(2, &e.to_string()))?;
        if space.len() != rows.len() || !space.values().zip(&rows).all(|(v, r)| v == r.0) {
            return Err(perr(2, "bids are not evenly spaced"));
        }
        Ok(Self::from_parts(
            space,
            t,
            0,
            rows.into_iter().map(|(_, m)| m).collect(),
        ))
    }
}

impl MappedBidLookup for OpeTable {
    fn mapped_bid(&self, cents: u64) -> Option<u64> {
        self.map(cents).ok()
    }
}

/// The agent answers an OT query with every mapped bid, in bid-space order.
/// Only the query is visible here; the bidder's choice never is.
pub fn serve_mapped_bids<R: Rng + ?Sized>(
    table: &OpeTable,
    request: &OtRequest,
    params: &GroupParams,
    rng: &mut R,
) -> Result<OtBatch, OtError> {
    let messages: Vec<BigUint> = table.mapped.iter().map(|&m| BigUint::from(m)).collect();
    ot_respond(request, &messages, params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ot_query;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    #[test]
    fn bid_space_shapes() {
        let s = BidSpace::new(1, 10_000, 1).unwrap();
        assert_eq!(s.len(), 10_000);
        assert_eq!(s.values().next(), Some(10_000));
        assert_eq!(s.values().last(), Some(1));
        let one = BidSpace::new(5, 5, 1).unwrap();
        assert_eq!(one.values().collect::<Vec<_>>(), vec![5]);
        assert!(BidSpace::new(1, 10, 2).is_err());
        assert!(BidSpace::new(0, 10, 1).is_err());
        assert!(BidSpace::new(10, 1, 1).is_err());
        assert!(BidSpace::new(1, 10, 0).is_err());
        let s = BidSpace::new(100, 500, 100).unwrap();
        assert_eq!(s.position(500), Some(1));
        assert_eq!(s.position(100), Some(5));
        assert_eq!(s.position(150), None);
        assert_eq!(s.value(3), Some(300));
        assert_eq!(s.value(0), None);
        assert_eq!(s.value(6), None);
    }

    #[test]
    fn full_scale_table_is_monotone_and_bounded() {
        let table = OpeTable::generate(BidSpace::new(1, 10_000, 1).unwrap(), 32, 7).unwrap();
        let m = table.mapped_values();
        assert!(m.windows(2).all(|w| w[0] > w[1]));
        assert!(m[0] < 1 << 32);
        assert!(*m.last().unwrap() >= 1);
        for cents in 1..=10_000 {
            assert_eq!(table.unmap(table.map(cents).unwrap()).unwrap(), cents);
        }
    }

    #[test]
    fn capacity_boundary() {
        let three = BidSpace::new(1, 3, 1).unwrap();
        let table = OpeTable::generate(three.clone(), 2, 0).unwrap();
        assert_eq!(table.mapped_values(), &[3, 2, 1]);
        let four = BidSpace::new(1, 4, 1).unwrap();
        assert_eq!(
            OpeTable::generate(four, 2, 0).unwrap_err(),
            OpeError::Capacity { z: 4, t: 2 }
        );
        assert!(OpeTable::generate(three.clone(), 0, 0).is_err());
        assert!(OpeTable::generate(three, 64, 0).is_err());
    }

    #[test]
    fn single_bid_space() {
        let table = OpeTable::generate(BidSpace::new(42, 42, 1).unwrap(), 8, 3).unwrap();
        let m = table.map(42).unwrap();
        assert!((1..=255).contains(&m));
    }

    #[test]
    fn lookups_against_resampled_oracle() {
        let space = BidSpace::new(1, 3, 1).unwrap();
        let table = OpeTable::generate(space, 8, 0).unwrap();
        let mut rng = derive_rng(&0u64.to_be_bytes(), "ope/table");
        let mut oracle: Vec<u64> = rand::seq::index::sample(&mut rng, 255, 3)
            .into_iter()
            .map(|i| i as u64 + 1)
            .collect();
        oracle.sort_unstable();
        assert_eq!(table.map(1).unwrap(), oracle[0]);
        assert_eq!(table.map(2).unwrap(), oracle[1]);
        assert_eq!(table.map(3).unwrap(), oracle[2]);
        assert_eq!(table.map(4).unwrap_err(), OpeError::UnknownBid(4));
        let unused = (1..=255).find(|v| !oracle.contains(v)).unwrap();
        assert_eq!(
            table.unmap(unused).unwrap_err(),
            OpeError::UnknownMapped(unused)
        );
    }

    #[test]
    fn deterministic_in_seed() {
        let s = BidSpace::new(1, 1000, 1).unwrap();
        let a = OpeTable::generate(s.clone(), 20, 11).unwrap();
        let b = OpeTable::generate(s.clone(), 20, 11).unwrap();
        let c = OpeTable::generate(s, 20, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn order_preserved_exhaustively_at_z_1000() {
        let s = BidSpace::new(5, 5 + 999 * 5, 5).unwrap();
        let table = OpeTable::generate(s.clone(), 16, 99).unwrap();
        let bids: Vec<u64> = s.values().collect();
        for &a in &bids {
            let ma = table.map(a).unwrap();
            for &b in &bids {
                assert_eq!(a.cmp(&b), ma.cmp(&table.map(b).unwrap()));
            }
        }
    }

    #[test]
    fn order_preserved_on_random_pairs_at_z_10000() {
        let table = OpeTable::generate(BidSpace::new(1, 10_000, 1).unwrap(), 32, 5).unwrap();
        let mut rng = derive_rng(b"pairs", "rng");
        for _ in 0..100_000 {
            let a = rng.gen_range(1..=10_000);
            let b = rng.gen_range(1..=10_000);
            assert_eq!(a.cmp(&b), table.map(a).unwrap().cmp(&table.map(b).unwrap()));
        }
    }

    #[test]
    fn file_round_trip() {
        let table = OpeTable::generate(BidSpace::new(10, 500, 10).unwrap(), 12, 4).unwrap();
        let text = table.to_file_string();
        assert!(text.starts_with("#t\t12\n500\t"));
        let back = OpeTable::from_file_str(&text).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.to_file_string(), text);
    }

    #[test]
    fn file_rejects_damage() {
        let table = OpeTable::generate(BidSpace::new(1, 5, 1).unwrap(), 8, 4).unwrap();
        let text = table.to_file_string();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.swap(2, 3);
        let err = OpeTable::from_file_str(&lines.join("\n")).unwrap_err();
        assert!(matches!(err, OpeError::Parse { line: 4, .. }), "{err}");
        assert!(OpeTable::from_file_str("").is_err());
        assert!(OpeTable::from_file_str("#t\t8\n").is_err());
        assert!(OpeTable::from_file_str("#t\t8\n5\t0\n").is_err());
        assert!(OpeTable::from_file_str("#t\t8\n5\t100\n").is_err());
        assert!(OpeTable::from_file_str("#t\t8\n5\tff\n3\t1\n2\t0a\n").is_err());
    }

    #[test]
    fn serde_regenerates_the_same_table() {
        let table = OpeTable::generate(BidSpace::new(1, 100, 1).unwrap(), 10, 8).unwrap();
        let json = serde_json::to_string(&table).unwrap();
        let back: OpeTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn every_bid_fetched_over_ot_at_z_50() {
        let gp = GroupParams::generate(64, b"ope").unwrap();
        let space = BidSpace::new(1, 50, 1).unwrap();
        let table = OpeTable::generate(space.clone(), 32, 1).unwrap();
        let mut rng = derive_rng(b"ope", "rng");
        for cents in space.values() {
            let alpha = space.position(cents).unwrap();
            let (req, rx) = ot_query(alpha, 50, &gp, &mut rng).unwrap();
            let batch = serve_mapped_bids(&table, &req, &gp, &mut rng).unwrap();
            let got = rx.recover(&batch, &gp).unwrap();
            assert_eq!(got, BigUint::from(table.map(cents).unwrap()));
        }
    }

    #[test]
    fn degenerate_space_over_ot() {
        let gp = GroupParams::generate(64, b"ope1").unwrap();
        let table = OpeTable::generate(BidSpace::new(7, 7, 1).unwrap(), 8, 1).unwrap();
        let mut rng = derive_rng(b"ope1", "rng");
        let (req, rx) = ot_query(1, 1, &gp, &mut rng).unwrap();
        let batch = serve_mapped_bids(&table, &req, &gp, &mut rng).unwrap();
        assert_eq!(
            rx.recover(&batch, &gp).unwrap(),
            BigUint::from(table.map(7).unwrap())
        );
    }

    proptest! {
        #[test]
        fn order_preserved_for_random_tables(
            min in 1u64..1000, step in 1u64..50, z in 1usize..300, t in 9u32..40, seed: u64,
        ) {
            let space = BidSpace::new(min, min + (z as u64 - 1) * step, step).unwrap();
            let table = OpeTable::generate(space.clone(), t, seed).unwrap();
            let m = table.mapped_values();
            prop_assert_eq!(m.len(), z);
            prop_assert!(m.windows(2).all(|w| w[0] > w[1]));
            prop_assert!(m[0] < 1u64 << t && m[z - 1] >= 1);
            for cents in space.values() {
                prop_assert_eq!(table.unmap(table.map(cents).unwrap()).unwrap(), cents);
            }
        }
    }
}
