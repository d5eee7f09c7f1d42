//! An executable forcing poset that adds a new cofinitary permutation `a`
//! over a ground cofinitary group, coding reals along word orbits.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: reduced words over the ground generators and `a`.
//! * [`perms`]: partial injections, ground permutations and `w[s]`.
//! * [`coding`]: the shape function `S` and parity coding along paths.
//! * [`families`]: pairings, almost disjoint families, constraint sets.
//! * [`forcing`]: conditions, the extension relation and one extension
//!   algorithm per dense set.
//! * [`generic`]: a fair scheduler building finite generic approximations.
//! * [`tower`]: stage-by-stage growth of a multi-generator representation.
//! * [`config`]: the TOML experiment format driving the `cofin` binary.

pub mod coding;
pub mod config;
pub mod families;
pub mod forcing;
pub mod generic;
pub mod perms;
pub mod tower;
pub mod words;

pub use coding::{BitString, ZSet};
pub use families::{AdFamily, CantorPairing, ConstraintSets, MemberRef};
pub use forcing::{Condition, PosetContext};
pub use perms::{GroundPermutation, GroundRepresentation, PartialInjection};
pub use words::{Letter, Word};
