//! Exact cardinalities of representation spaces.
//!
//! Every space has a power-of-two size, so sizes are kept as their base-2
//! logarithm. Logarithms themselves can be astronomically large for higher
//! orders, so they are stored in hereditary base 2: a number is a sum of
//! distinct powers of two whose exponents are again such numbers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::types::{Type, TypeKind};

/// A natural number in hereditary base 2. Exponents are kept distinct and
/// sorted in decreasing order, so equal values have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HNum(Vec<HNum>);

impl HNum {
    pub fn zero() -> HNum {
        HNum(Vec::new())
    }

    pub fn one() -> HNum {
        HNum(vec![HNum::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_u64(mut n: u64) -> HNum {
        let mut exps = Vec::new();
        let mut bit = 0u64;
        while n > 0 {
            if n & 1 == 1 {
                exps.push(HNum::from_u64(bit));
            }
            n >>= 1;
            bit += 1;
        }
        exps.reverse();
        HNum(exps)
    }

    /// `2^e`.
    pub fn pow2(e: HNum) -> HNum {
        HNum(vec![e])
    }

    /// `exp2` applied `k` times.
    pub fn tower(k: usize, base: HNum) -> HNum {
        (0..k).fold(base, |acc, _| HNum::pow2(acc))
    }

    fn normalize(mut exps: Vec<HNum>) -> HNum {
        loop {
            exps.sort_by(|a, b| b.cmp(a));
            let Some(i) = exps.windows(2).position(|w| w[0] == w[1]) else {
                return HNum(exps);
            };
            let e = exps.remove(i);
            exps[i] = e.add(&HNum::one());
        }
    }

    pub fn add(&self, other: &HNum) -> HNum {
        let mut exps = self.0.clone();
        exps.extend(other.0.iter().cloned());
        HNum::normalize(exps)
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: &HNum) -> HNum {
        HNum(self.0.iter().map(|e| e.add(k)).collect())
    }

    pub fn mul(&self, other: &HNum) -> HNum {
        other.0.iter().fold(HNum::zero(), |acc, f| acc.add(&self.mul_pow2(f)))
    }

    /// The value, if it is below `2^64`.
    pub fn to_u64(&self) -> Option<u64> {
        let mut v = 0u64;
        for e in &self.0 {
            let e = e.to_u64().filter(|&e| e < 64)?;
            v |= 1 << e;
        }
        Some(v)
    }

    /// The value, if it has at most `max_bits` binary digits.
    pub fn to_biguint(&self, max_bits: u64) -> Option<BigUint> {
        let mut v = BigUint::default();
        for e in &self.0 {
            let e = e.to_u64().filter(|&e| e < max_bits)?;
            v.set_bit(e, true);
        }
        Some(v)
    }
}

impl Ord for HNum {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for HNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_biguint(4096) {
            return write!(f, "{v}");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|e| if e.is_zero() { "1".to_string() } else { format!("2^({e})") })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for HNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HNum({self})")
    }
}

/// A cardinality `2^log2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cardinality {
    pub log2: HNum,
}

impl Cardinality {
    pub fn to_biguint(&self, max_bits: u64) -> Option<BigUint> {
        let l = self.log2.to_u64().filter(|&l| l < max_bits)?;
        let mut v = BigUint::default();
        v.set_bit(l, true);
        Some(v)
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_biguint(256) {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "2^({})", self.log2),
        }
    }
}

impl fmt::Debug for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cardinality({self})")
    }
}

/// Number of atoms of a base type: data terms of a sort, or tuples of them.
pub fn atom_count(ty: &Type, per_sort: &dyn Fn(&str) -> u64) -> Option<HNum> {
    match ty.kind() {
        TypeKind::Sort(s) => Some(HNum::from_u64(per_sort(s))),
        TypeKind::Product(l, r) => Some(atom_count(l, per_sort)?.mul(&atom_count(r, per_sort)?)),
        TypeKind::Arrow(..) => None,
    }
}

/// Exact `|[[ty]]|` given the number of data terms of each sort.
pub fn repr_cardinality(ty: &Type, per_sort: &dyn Fn(&str) -> u64) -> Cardinality {
    Cardinality { log2: log2_card(ty, per_sort) }
}

fn log2_card(ty: &Type, per_sort: &dyn Fn(&str) -> u64) -> HNum {
    match ty.kind() {
        TypeKind::Arrow(a, b) => log2_card(b, per_sort).mul_pow2(&log2_card(a, per_sort)),
        _ => atom_count(ty, per_sort).expect("base type"),
    }
}

/// The bound `exp2^(K+1)(d^K * N)` with `K` the order of `ty` and `d` its
/// longest arrow chain, plus one.
pub fn cardinality_bound(ty: &Type, n: u64) -> Cardinality {
    let k = ty.order();
    let d = ty.chain_width() as u64;
    let base = (0..k).fold(HNum::from_u64(n), |acc, _| acc.mul(&HNum::from_u64(d)));
    Cardinality { log2: HNum::tower(k, base) }
}
