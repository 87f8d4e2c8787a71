//! Finite representation spaces and their elements.
//!
//! An element of a base space is a bit mask over the atoms of the type (the
//! data terms of a sort in B, or tuples of such terms for products). An
//! element of `s => t` is a table holding one `t`-element per `s`-element,
//! packed as fixed-width bit fields, so application is a shift and a mask.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::format::print_term;
use crate::term::Term;
use crate::types::Type;

#[derive(Debug)]
pub enum SpaceKind {
    Base { atoms: Vec<Term>, index: HashMap<Term, usize> },
    Arrow { dom: Arc<Space>, cod: Arc<Space> },
}

/// The space `[[ty]]`, of size `2^bits`.
#[derive(Debug)]
pub struct Space {
    pub ty: Type,
    pub bits: u32,
    pub kind: SpaceKind,
}

/// Mask with the low `bits` bits set.
pub fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl Space {
    pub fn size(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn atoms(&self) -> &[Term] {
        match &self.kind {
            SpaceKind::Base { atoms, .. } => atoms,
            SpaceKind::Arrow { .. } => &[],
        }
    }

    pub fn atom_index(&self, t: &Term) -> Option<usize> {
        match &self.kind {
            SpaceKind::Base { index, .. } => index.get(t).copied(),
            SpaceKind::Arrow { .. } => None,
        }
    }

    /// `f(a)` for an arrow-space element `f`.
    pub fn apply(&self, f: u64, a: u64) -> u64 {
        match &self.kind {
            SpaceKind::Arrow { cod, .. } => (f >> (a * cod.bits as u64)) & mask(cod.bits),
            SpaceKind::Base { .. } => panic!("applying a base-space element"),
        }
    }

    pub fn decode(&self, x: u64) -> Repr {
        match &self.kind {
            SpaceKind::Base { atoms, .. } => {
                Repr::Set(atoms.iter().enumerate().filter(|(i, _)| x >> i & 1 == 1).map(|(_, t)| t.clone()).collect())
            }
            SpaceKind::Arrow { dom, cod } => {
                Repr::Fun((0..dom.size()).map(|a| (dom.decode(a), cod.decode(self.apply(x, a)))).collect())
            }
        }
    }

    /// Inverse of [`Space::decode`].
    pub fn encode(&self, r: &Repr) -> Option<u64> {
        match (&self.kind, r) {
            (SpaceKind::Base { index, .. }, Repr::Set(s)) => {
                s.iter().try_fold(0u64, |acc, t| Some(acc | 1 << index.get(t)?))
            }
            (SpaceKind::Arrow { dom, cod }, Repr::Fun(table)) => {
                if table.len() as u64 != dom.size() {
                    return None;
                }
                let mut f = 0u64;
                for (a, b) in table {
                    f |= cod.encode(b)? << (dom.encode(a)? * cod.bits as u64);
                }
                Some(f)
            }
            _ => None,
        }
    }
}

/// A decoded representation: a set of data terms, or a function table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Repr {
    Set(BTreeSet<Term>),
    Fun(Vec<(Repr, Repr)>),
}

impl fmt::Display for Repr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Repr::Set(s) => {
                let items: Vec<String> = s.iter().map(print_term).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            Repr::Fun(table) => {
                f.write_str("[")?;
                for (i, (a, b)) in table.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a} -> {b}")?;
                }
                f.write_str("]")
            }
        }
    }
}
