use std::collections::{BTreeMap, BTreeSet};

use crate::coding::ZSet;
use crate::families::{AdFamily, CantorPairing, ConstraintSets, FamilyMember};
use crate::perms::GroundPermutation;
use crate::perms::GroundRepresentation;
use crate::words::Word;

static NO_BITS: ZSet = ZSet::Set(BTreeSet::new());

/// Everything the poset is parametrised by: the ground representation, the
/// almost disjoint family, the sets `Y^w_m`, the reals `z^w` and the pairing.
#[derive(Clone, Debug)]
pub struct PosetContext {
    pub rep: GroundRepresentation,
    pub family: AdFamily,
    pub y: ConstraintSets,
    pub z: BTreeMap<Word, ZSet>,
    pub pairing: CantorPairing,
    /// Window for scans over ground words, which have no finite support.
    pub window: u64,
    /// Candidates at or above this value are never tried.
    pub search_limit: u64,
}

impl PosetContext {
    pub fn new(rep: GroundRepresentation, family: AdFamily) -> Self {
        PosetContext {
            rep,
            family,
            y: ConstraintSets::default(),
            z: BTreeMap::new(),
            pairing: CantorPairing,
            window: 200,
            search_limit: 1 << 24,
        }
    }

    /// `z^w`; words without an entry code the empty set.
    pub fn z(&self, w: &Word) -> &ZSet {
        self.z.get(w).unwrap_or(&NO_BITS)
    }
}

/// A total injection of the naturals that can serve as a hitting target.
pub trait TotalMap {
    fn apply(&self, n: u64) -> u64;
}

/// `2k ↔ 2k+1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SwapPairs;

impl TotalMap for SwapPairs {
    fn apply(&self, n: u64) -> u64 {
        n ^ 1
    }
}

impl TotalMap for FamilyMember {
    fn apply(&self, n: u64) -> u64 {
        FamilyMember::apply(self, n)
    }
}

impl TotalMap for GroundPermutation {
    fn apply(&self, n: u64) -> u64 {
        self.forward(n)
    }
}
