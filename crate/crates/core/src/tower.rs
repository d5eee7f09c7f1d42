//! Stage-by-stage growth of a multi-generator representation: each stage
//! runs the single-step poset over the current generators and promotes the
//! resulting approximation to a new total generator.
//!
//! Stage `α` reserves the ordinal block starting at `β_α = α·B`; coding word
//! `w` of that stage codes `z^w`, built from the stage code `c^F_α` and the
//! code `c^W` attached to ordinal `β_α + i_α(w)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::{BitString, ZSet};
use crate::families::{build_family, overlap_in_window, AdFamily, FamilyError, MemberRef};
use crate::forcing::PosetContext;
use crate::generic::{decoded, run_builder, verify_generic, BuildError, TaskList};
use crate::perms::{GroundPermutation, GroundRepresentation};
use crate::words::{reduced_words_up_to, Word};

#[derive(Debug, Error)]
pub enum TowerError {
    #[error("exponent {0} is above 30")]
    ExponentTooLarge(u32),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("stage {stage}: {source}")]
    Build { stage: u64, source: BuildError },
    #[error("stage {stage}: coding word {word} is not in the word index")]
    UnindexedWord { stage: u64, word: Word },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `{2^m : m ∈ cF} ∪ {3^m : m ∈ cW}`.
pub fn build_zw(cf: &BTreeSet<u32>, cw: &BTreeSet<u32>) -> Result<BTreeSet<u64>, TowerError> {
    if let Some(&m) = cf.iter().chain(cw).find(|&&m| m > 30) {
        return Err(TowerError::ExponentTooLarge(m));
    }
    Ok(cf.iter().map(|&m| 2u64.pow(m)).chain(cw.iter().map(|&m| 3u64.pow(m))).collect())
}

/// [`build_zw`] with every exponent shifted up by `offset`, which keeps
/// `2^0 = 3^0` out of the set when `offset ≥ 1`.
pub fn build_zw_offset(cf: &BTreeSet<u32>, cw: &BTreeSet<u32>, offset: u32) -> Result<BTreeSet<u64>, TowerError> {
    let shift = |s: &BTreeSet<u32>| s.iter().map(|&m| m + offset).collect::<BTreeSet<u32>>();
    build_zw(&shift(cf), &shift(cw))
}

fn exponent_of(mut x: u64, base: u64) -> Option<u32> {
    let mut e = 0;
    while x > 1 && x.is_multiple_of(base) {
        x /= base;
        e += 1;
    }
    (x == 1).then_some(e)
}

/// Recovers `(cF, cW)` from a `z^w` built with `offset`. Without an offset,
/// `1 ∈ z` is read as `0` belonging to both.
pub fn decode_zw(z: &BTreeSet<u64>, offset: u32) -> (BTreeSet<u32>, BTreeSet<u32>) {
    let mut cf = BTreeSet::new();
    let mut cw = BTreeSet::new();
    for &x in z {
        if x == 1 {
            if offset == 0 {
                cf.insert(0);
                cw.insert(0);
            }
            continue;
        }
        if let Some(e) = exponent_of(x, 2).filter(|&e| e >= offset) {
            cf.insert(e - offset);
        } else if let Some(e) = exponent_of(x, 3).filter(|&e| e >= offset) {
            cw.insert(e - offset);
        }
    }
    (cf, cw)
}

/// `z^w` for each coding word of a stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZAssignment {
    pub z: BTreeMap<Word, BTreeSet<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TowerConfig {
    pub stages: u64,
    /// Ordinal block size `B`.
    pub block_size: u64,
    /// Every stage puts `[0, window)` into domain and range.
    pub window: u64,
    /// Coding words; a word joins once all its ground letters exist.
    pub coding_words: Vec<Word>,
    /// Codes are subsets of `[0, code_range)`.
    pub code_range: u32,
    pub offset: u32,
    /// Longest word enumerated by the word index.
    pub index_length: usize,
    pub m_count: u64,
    pub xi_count: u64,
    pub family_seed: u64,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            stages: 3,
            block_size: 1000,
            window: 50,
            coding_words: vec![Word::a()],
            code_range: 3,
            offset: 1,
            index_length: 2,
            m_count: 1000,
            xi_count: 4,
            family_seed: 0,
        }
    }
}

/// The bookkeeping carried from one stage to the next.
#[derive(Clone, Debug)]
pub struct StageState {
    pub stage: u64,
    pub rep: GroundRepresentation,
    /// Number of generators in the starting representation.
    pub base_generators: usize,
    pub families: Vec<AdFamily>,
    pub c_f: BTreeMap<u64, BTreeSet<u32>>,
    pub c_w: BTreeMap<u64, BTreeSet<u32>>,
}

impl StageState {
    pub fn initial(rep: GroundRepresentation) -> Self {
        let base_generators = rep.len();
        StageState { stage: 0, rep, base_generators, families: Vec::new(), c_f: BTreeMap::new(), c_w: BTreeMap::new() }
    }
}

/// What a stage produced, as written to the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: u64,
    pub beta: u64,
    pub generators: usize,
    pub word_index: BTreeMap<Word, u64>,
    pub c_f: BTreeSet<u32>,
    pub c_w: BTreeMap<Word, BTreeSet<u32>>,
    pub zw: ZAssignment,
    pub bits: usize,
    pub decoded: BTreeMap<Word, BitString>,
    pub decoded_c_f: BTreeMap<Word, BTreeSet<u32>>,
    pub decoded_c_w: BTreeMap<Word, BTreeSet<u32>>,
    pub parameters: BTreeMap<Word, u64>,
    pub pairs: usize,
    pub completion_boundary: u64,
    pub verified: bool,
}

/// `i_α`: WS words over the current generators, up to `max_len`, in
/// (length, alphabet) order. `a` gets index 0.
pub fn word_index(generators: usize, max_len: usize) -> BTreeMap<Word, u64> {
    let mut words: Vec<Word> =
        reduced_words_up_to(max_len, generators as u32).into_iter().filter(|w| w.in_ws()).collect();
    words.sort();
    words.into_iter().zip(0..).collect()
}

fn random_code(seed: u64, salt: u64, range: u32) -> BTreeSet<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..range).filter(|_| rng.gen_bool(0.5)).collect()
}

fn bits_to_set(bits: &BitString) -> BTreeSet<u64> {
    bits.0.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k as u64).collect()
}

/// One stage: code, build, verify, promote.
pub fn next_stage(
    st: &StageState,
    cfg: &TowerConfig,
    seed: u64,
) -> Result<(StageState, StageRecord, String), TowerError> {
    let alpha = st.stage;
    let beta = alpha * cfg.block_size;
    let index = word_index(st.rep.len(), cfg.index_length);
    let c_f = random_code(seed, 2 * alpha, cfg.code_range);
    let words: Vec<Word> = cfg
        .coding_words
        .iter()
        .filter(|w| w.max_ground_index().is_none_or(|i| (i as usize) < st.rep.len()))
        .cloned()
        .collect();
    let mut c_w_by_word = BTreeMap::new();
    let mut c_w = st.c_w.clone();
    let mut zw = ZAssignment::default();
    for w in &words {
        let i = *index.get(w).ok_or_else(|| TowerError::UnindexedWord { stage: alpha, word: w.clone() })?;
        let ordinal = beta + i;
        let code = random_code(seed, 2 * ordinal + 1, cfg.code_range);
        zw.z.insert(w.clone(), build_zw_offset(&c_f, &code, cfg.offset)?);
        c_w.insert(ordinal, code.clone());
        c_w_by_word.insert(w.clone(), code);
    }
    let max_exp = cfg.code_range.saturating_sub(1) + cfg.offset;
    let bits = 3usize.pow(max_exp) + 1;

    let family = build_family(alpha, cfg.m_count, cfg.xi_count, cfg.family_seed)?;
    let mut ctx = PosetContext::new(st.rep.clone(), family.clone());
    ctx.window = cfg.window.max(1);
    ctx.z = zw.z.iter().map(|(w, z)| (w.clone(), ZSet::Set(z.clone()))).collect();
    let tasks = TaskList {
        domain_up_to: cfg.window,
        range_up_to: cfg.window,
        coding: words.iter().map(|w| (w.clone(), bits)).collect(),
        ..TaskList::default()
    };
    let approx = run_builder(&ctx, &tasks, seed).map_err(|source| TowerError::Build { stage: alpha, source })?;
    let verified = verify_generic(&approx, &ctx, &tasks).passed();
    let fin = &approx.final_condition;

    let got = decoded(fin, &ctx);
    let mut decoded_c_f = BTreeMap::new();
    let mut decoded_c_w = BTreeMap::new();
    for (w, b) in &got {
        let (cf, cw) = decode_zw(&bits_to_set(&b.prefix(bits)), cfg.offset);
        decoded_c_f.insert(w.clone(), cf);
        decoded_c_w.insert(w.clone(), cw);
    }

    let promoted = GroundPermutation::completed(fin.s.clone());
    let boundary = promoted.fixed_point_bound();
    let mut rep = st.rep.clone();
    rep.push(promoted);
    let mut c_f_all = st.c_f.clone();
    c_f_all.insert(alpha, c_f.clone());
    let mut families = st.families.clone();
    families.push(family);

    let record = StageRecord {
        stage: alpha,
        beta,
        generators: st.rep.len(),
        word_index: index,
        c_f,
        c_w: c_w_by_word,
        zw,
        bits,
        decoded: got,
        decoded_c_f,
        decoded_c_w,
        parameters: fin.m_bar.clone(),
        pairs: fin.s.len(),
        completion_boundary: boundary,
        verified,
    };
    let next = StageState { stage: alpha + 1, rep, base_generators: st.base_generators, families, c_f: c_f_all, c_w };
    Ok((next, record, approx.log_lines()))
}

/// A finished tower run.
#[derive(Clone, Debug)]
pub struct TowerRun {
    pub state: StageState,
    pub records: Vec<StageRecord>,
    pub logs: Vec<String>,
}

pub fn run_tower(base: GroundRepresentation, cfg: &TowerConfig, seed: u64) -> Result<TowerRun, TowerError> {
    let mut state = StageState::initial(base);
    let mut records = Vec::new();
    let mut logs = Vec::new();
    for _ in 0..cfg.stages {
        let (next, record, log) = next_stage(&state, cfg, seed)?;
        state = next;
        records.push(record);
        logs.push(log);
    }
    Ok(TowerRun { state, records, logs })
}

impl TowerRun {
    /// Every coding word decodes back to the codes it was given.
    pub fn codes_recovered(&self) -> bool {
        self.records.iter().all(|r| {
            r.c_w.iter().all(|(w, cw)| {
                r.decoded_c_f.get(w) == Some(&r.c_f) && r.decoded_c_w.get(w) == Some(cw)
            })
        })
    }

    /// Largest graph overlap on `[0, window)` between members of different
    /// stage families, over members with `m, ξ < members`.
    pub fn cross_stage_overlap(&self, window: u64, members: u64) -> usize {
        let mut worst = 0;
        let fams = &self.state.families;
        for (i, fa) in fams.iter().enumerate() {
            for fb in &fams[i + 1..] {
                for m in 0..members.min(fa.m_count) {
                    for xi in 0..members.min(fa.xi_count) {
                        for m2 in 0..members.min(fb.m_count) {
                            for xi2 in 0..members.min(fb.xi_count) {
                                let f = fa.member(MemberRef { m, xi }).expect("in range");
                                let g = fb.member(MemberRef { m: m2, xi: xi2 }).expect("in range");
                                worst = worst.max(overlap_in_window(&f, &g, window));
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Writes `stage_<k>.jsonl` logs and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), TowerError> {
        fs::create_dir_all(dir)?;
        for (k, log) in self.logs.iter().enumerate() {
            fs::write(dir.join(format!("stage_{k}.jsonl")), log)?;
        }
        let manifest = serde_json::to_string_pretty(&self.records)? + "\n";
        fs::write(dir.join("manifest.json"), manifest)?;
        Ok(())
    }
}
