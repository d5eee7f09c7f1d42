//! Pairing functions, almost disjoint families of permutations and the
//! constraint index sets `Y^w_m`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perms::{zigzag_from_int, zigzag_to_int, BlockScramble};
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("member ({m}, {xi}) is outside the family ({m_count} x {xi_count})")]
    OutOfRange { m: u64, xi: u64, m_count: u64, xi_count: u64 },
    #[error("family counts must be at least 1")]
    EmptyFamily,
}

/// The Cantor pairing `ψ(n, k) = (n+k)(n+k+1)/2 + k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorPairing;

impl CantorPairing {
    pub fn pair(self, n: u64, k: u64) -> u64 {
        let d = n + k;
        d * (d + 1) / 2 + k
    }

    pub fn split(self, c: u64) -> (u64, u64) {
        // largest d with d(d+1)/2 <= c
        let mut d = (((8.0 * c as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
        while d * (d + 1) / 2 > c {
            d -= 1;
        }
        while (d + 1) * (d + 2) / 2 <= c {
            d += 1;
        }
        let k = c - d * (d + 1) / 2;
        (d - k, k)
    }
}

pub fn psi_pair(n: u64, k: u64) -> u64 {
    CantorPairing.pair(n, k)
}

pub fn psi_split(c: u64) -> (u64, u64) {
    CantorPairing.split(c)
}

/// `ψ(ξ, ψ(m, n))`, a bijection from triples to naturals.
pub fn psi_triple(xi: u64, m: u64, n: u64) -> u64 {
    psi_pair(xi, psi_pair(m, n))
}

pub fn psi_triple_split(c: u64) -> (u64, u64, u64) {
    let (xi, rest) = psi_split(c);
    let (m, n) = psi_split(rest);
    (xi, m, n)
}

/// Reference to the family member `f_{m,ξ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MemberRef {
    pub m: u64,
    pub xi: u64,
}

/// One member of a family: `θ^-1 ∘ h_c ∘ θ` where `h_c` moves the point
/// `ψ(x, j)` (with `x` read as an integer) to `ψ(x+1, j XOR c)`.
///
/// Different codes `c` never agree anywhere, and no nonzero power of a member
/// has a fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    code: u64,
    scramble: BlockScramble,
}

impl FamilyMember {
    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn apply(&self, n: u64) -> u64 {
        let (x, j) = psi_split(self.scramble.apply(n));
        let y = psi_pair(zigzag_from_int(zigzag_to_int(x) + 1), j ^ self.code);
        self.scramble.invert(y)
    }

    pub fn inverse(&self, n: u64) -> u64 {
        let (x, j) = psi_split(self.scramble.apply(n));
        let y = psi_pair(zigzag_from_int(zigzag_to_int(x) - 1), j ^ self.code);
        self.scramble.invert(y)
    }
}

/// A family `{f_{m,ξ} : m < m_count, ξ < xi_count}` built for one stage.
///
/// Member codes are `ψ(stage, ψ(m, ξ))`, so graphs are pairwise disjoint,
/// also across families of different stages that share a seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdFamily {
    pub stage: u64,
    pub m_count: u64,
    pub xi_count: u64,
    pub seed: u64,
}

pub fn build_family(stage: u64, m_count: u64, xi_count: u64, seed: u64) -> Result<AdFamily, FamilyError> {
    if m_count == 0 || xi_count == 0 {
        return Err(FamilyError::EmptyFamily);
    }
    Ok(AdFamily { stage, m_count, xi_count, seed })
}

impl AdFamily {
    pub fn contains(&self, r: MemberRef) -> bool {
        r.m < self.m_count && r.xi < self.xi_count
    }

    pub fn member(&self, r: MemberRef) -> Result<FamilyMember, FamilyError> {
        if !self.contains(r) {
            return Err(FamilyError::OutOfRange { m: r.m, xi: r.xi, m_count: self.m_count, xi_count: self.xi_count });
        }
        Ok(FamilyMember { code: psi_triple(self.stage, r.m, r.xi), scramble: BlockScramble::new(self.seed) })
    }
}

/// `|graph(f) ∩ graph(g) ∩ ([0, window) × ℕ)|`.
pub fn overlap_in_window(f: &FamilyMember, g: &FamilyMember, window: u64) -> usize {
    (0..window).filter(|&n| f.apply(n) == g.apply(n)).count()
}

/// The sets `Y^w_m`: explicit entries with a shared default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSets {
    pub default: BTreeSet<u64>,
    pub entries: BTreeMap<(Word, u64), BTreeSet<u64>>,
}

impl ConstraintSets {
    pub fn with_default<I: IntoIterator<Item = u64>>(default: I) -> Self {
        ConstraintSets { default: default.into_iter().collect(), entries: BTreeMap::new() }
    }

    pub fn set(&mut self, w: Word, m: u64, xis: BTreeSet<u64>) {
        self.entries.insert((w, m), xis);
    }

    pub fn get(&self, w: &Word, m: u64) -> &BTreeSet<u64> {
        self.entries.get(&(w.clone(), m)).unwrap_or(&self.default)
    }

    pub fn contains(&self, w: &Word, m: u64, xi: u64) -> bool {
        self.get(w, m).contains(&xi)
    }
}
