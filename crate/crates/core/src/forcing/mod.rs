//! The poset of conditions `p = ⟨s, F, m̄, s*⟩`, its extension relation and
//! the extension algorithms that witness density of each dense set.
//!
//! Every algorithm resolves its free choices to the least admissible value,
//! so all operations are deterministic functions of their inputs.

mod admissible;
mod condition;
mod context;
mod extend;
mod order;

use thiserror::Error;

use crate::coding::CodingError;
use crate::families::{FamilyError, MemberRef};
use crate::perms::EvalError;
use crate::words::{Letter, Word};

pub use condition::{coding_terminals, Condition, Violation};
pub use context::{PosetContext, SwapPairs, TotalMap};
pub use extend::{
    add_constraint, extend_coding, extend_domain, extend_range, hit, hit_preconditions, register_coding,
    register_word, HitOutcome,
};
pub use order::{leq, leq_report, merge, untraced_fixed_points, LeqFailure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForcingError {
    #[error("word {0} does not contain a or a^-1")]
    NotInWd(Word),
    #[error("word {0} has a proper conjugate subword")]
    NotInWs(Word),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("the input condition is invalid: {0}")]
    Invalid(Violation),
    #[error("{point} ends the coding path of {word} (next letter {letter}); extend the coding instead")]
    CodingConflict { word: Word, point: u64, letter: Letter },
    #[error("word {0} has no coding parameter")]
    NotCoding(Word),
    #[error("coding path of {0} does not terminate")]
    CyclicCodingPath(Word),
    #[error("parity requirements of several words meet at {point}: {words:?}")]
    ParityConflict { point: u64, words: Vec<Word> },
    #[error("no admissible value below {limit}")]
    NoAdmissibleValue { limit: u64 },
    #[error("constraint f({}, {}) is not eligible for {word}: {reason}", member.m, member.xi)]
    IndexNotEligible { word: Word, member: MemberRef, reason: String },
    #[error("hitting target fails a precondition: {0}")]
    HitPrecondition(String),
    #[error("extension left the dense set: {0}")]
    ExtensionFailed(String),
}
