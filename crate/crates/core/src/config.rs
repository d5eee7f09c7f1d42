//! The TOML experiment format and the four run modes of the `cofin` binary.
//!
//! A config declares the ground family, the almost disjoint family, the sets
//! `Y^w_m`, the reals `z^w`, the task list and the tower parameters. Unknown
//! keys are rejected. See `configs/` for annotated examples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::{s_value, BitString, ZSet};
use crate::families::{build_family, ConstraintSets, FamilyError};
use crate::forcing::PosetContext;
use crate::generic::{parse_log, replay, run_builder, verify_generic, GenericApproximation, TaskList};
use crate::perms::{GroundPermutation, GroundRepresentation};
use crate::tower::{run_tower, TowerConfig};
use crate::words::Word;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Task(String),
    #[error("verification failed:\n{0}")]
    Verify(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<FamilyError> for ExperimentError {
    fn from(e: FamilyError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GroundKind {
    /// No ground generators.
    None,
    /// The integer shift through the zig-zag encoding.
    #[default]
    Zshift,
    /// Block-scrambled conjugates of the shift, one per generator.
    ZshiftConjugates,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundConfig {
    pub kind: GroundKind,
    pub count: u32,
    pub seed: u64,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig { kind: GroundKind::Zshift, count: 1, seed: 0 }
    }
}

impl GroundConfig {
    pub fn build(&self) -> GroundRepresentation {
        match self.kind {
            GroundKind::None => GroundRepresentation::trivial(),
            GroundKind::Zshift => {
                let mut rep = GroundRepresentation::trivial();
                for i in 0..self.count {
                    let g = if i == 0 {
                        GroundPermutation::zshift()
                    } else {
                        GroundPermutation::zshift_conjugate(self.seed.wrapping_add(u64::from(i)))
                    };
                    rep.push(g);
                }
                rep
            }
            GroundKind::ZshiftConjugates => {
                let mut rep = GroundRepresentation::trivial();
                for i in 0..self.count {
                    rep.push(GroundPermutation::zshift_conjugate(self.seed.wrapping_add(u64::from(i))));
                }
                rep
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyConfig {
    pub stage: u64,
    pub m_count: u64,
    pub xi_count: u64,
    pub seed: u64,
    /// Largest windowed overlap tolerated between two members.
    pub overlap_cap: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { stage: 0, m_count: 1000, xi_count: 4, seed: 0, overlap_cap: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YEntry {
    pub word: Word,
    pub m: u64,
    pub xi: BTreeSet<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YConfig {
    pub default: BTreeSet<u64>,
    pub entries: Vec<YEntry>,
}

/// One `z^w`: exactly one of `bits`, `set` or `random` (a number of seeded
/// random bits).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZConfig {
    pub word: Word,
    #[serde(default)]
    pub bits: Option<BitString>,
    #[serde(default)]
    pub set: Option<BTreeSet<u64>>,
    #[serde(default)]
    pub random: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub window: u64,
    pub limit: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { window: 200, limit: 1 << 24 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WordsConfig {
    pub list: Vec<Word>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub ground: GroundConfig,
    pub family: FamilyConfig,
    pub constraints: YConfig,
    pub z: Vec<ZConfig>,
    pub tasks: TaskList,
    pub search: SearchConfig,
    pub tower: TowerConfig,
    pub words: WordsConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Build,
    Tower,
    Verify,
    Words,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "build" => Ok(Mode::Build),
            "tower" => Ok(Mode::Tower),
            "verify" => Ok(Mode::Verify),
            "words" => Ok(Mode::Words),
            other => Err(format!("unknown mode {other:?} (build, tower, verify, words)")),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The reals `z^w`, drawing random bits from the config seed in order.
    pub fn z_sets(&self) -> Result<BTreeMap<Word, ZSet>, ExperimentError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = BTreeMap::new();
        for entry in &self.z {
            let z = match (&entry.bits, &entry.set, entry.random) {
                (Some(bits), None, None) => ZSet::Bits(bits.clone()),
                (None, Some(set), None) => ZSet::Set(set.clone()),
                (None, None, Some(n)) => ZSet::Bits(BitString((0..n).map(|_| rng.gen_bool(0.5)).collect())),
                _ => {
                    return Err(ExperimentError::Config(format!(
                        "z entry for {} needs exactly one of bits, set, random",
                        entry.word
                    )))
                }
            };
            if !entry.word.in_ws() {
                return Err(ExperimentError::Config(format!("z entry for {} is not a WS word", entry.word)));
            }
            out.insert(entry.word.clone(), z);
        }
        Ok(out)
    }

    pub fn context(&self) -> Result<PosetContext, ExperimentError> {
        let f = &self.family;
        let family = build_family(f.stage, f.m_count, f.xi_count, f.seed)?;
        let mut ctx = PosetContext::new(self.ground.build(), family);
        let mut y = ConstraintSets::with_default(self.constraints.default.iter().copied());
        for e in &self.constraints.entries {
            y.set(e.word.clone(), e.m, e.xi.clone());
        }
        ctx.y = y;
        ctx.z = self.z_sets()?;
        ctx.window = self.search.window;
        ctx.search_limit = self.search.limit;
        for w in self.tasks.coding.keys().chain(&self.tasks.registrations).chain(self.tasks.hits.iter().map(|h| &h.word)) {
            ctx.rep.check_word(w).map_err(|e| ExperimentError::Config(e.to_string()))?;
        }
        Ok(ctx)
    }
}

/// Table of WD/WS flags, cores and `S` values.
pub fn words_table(words: &[Word]) -> String {
    let mut out = String::new();
    let width = words.iter().map(|w| w.to_string().len()).max().unwrap_or(4).max(4);
    writeln!(out, "{:width$}  in_WD  in_WS  {:width$}  S", "word", "core").unwrap();
    for w in words {
        let class = w.conjugate_core();
        let s = if class.in_ws { s_value(w).map_or("-".into(), |v| v.to_string()) } else { "-".into() };
        writeln!(out, "{:width$}  {:5}  {:5}  {:width$}  {}", w.to_string(), class.in_wd, class.in_ws, class.core.to_string(), s)
            .unwrap();
    }
    out
}

/// Runs the builder and verifies the result.
pub fn build(cfg: &ExperimentConfig) -> Result<(GenericApproximation, String), ExperimentError> {
    let ctx = cfg.context()?;
    let approx = run_builder(&ctx, &cfg.tasks, cfg.seed).map_err(|e| ExperimentError::Task(e.to_string()))?;
    let report = verify_generic(&approx, &ctx, &cfg.tasks);
    let text = report.to_string();
    if !report.passed() {
        return Err(ExperimentError::Verify(text));
    }
    Ok((approx, text))
}

/// Re-checks a log against its config: it must parse, replay, match a fresh
/// build byte for byte and pass every verification check.
pub fn verify_log(cfg: &ExperimentConfig, log_text: &str) -> Result<String, ExperimentError> {
    let ctx = cfg.context()?;
    let log = parse_log(log_text).map_err(|e| ExperimentError::Verify(e.to_string()))?;
    let stages = replay(&log).map_err(|e| ExperimentError::Verify(e.to_string()))?;
    let approx =
        GenericApproximation { final_condition: stages.last().cloned().unwrap_or_default(), log, seed: cfg.seed };
    let rebuilt = run_builder(&ctx, &cfg.tasks, cfg.seed).map_err(|e| ExperimentError::Task(e.to_string()))?;
    let fresh = rebuilt.log_lines();
    if fresh != log_text {
        let line = fresh.lines().zip(log_text.lines()).position(|(a, b)| a != b).unwrap_or(fresh.lines().count().min(log_text.lines().count()));
        return Err(ExperimentError::Verify(format!("log differs from a fresh build at line {}", line + 1)));
    }
    let report = verify_generic(&approx, &ctx, &cfg.tasks);
    let text = report.to_string();
    if report.passed() {
        Ok(text)
    } else {
        Err(ExperimentError::Verify(text))
    }
}

/// Executes one mode, writing artifacts under `out`, and returns the text
/// to print.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    mode: Mode,
    out: &Path,
    log: Option<&Path>,
) -> Result<String, ExperimentError> {
    match mode {
        Mode::Words => Ok(words_table(&cfg.words.list)),
        Mode::Build => {
            let (approx, report) = build(cfg)?;
            fs::create_dir_all(out)?;
            fs::write(out.join("log.jsonl"), approx.log_lines())?;
            let fin = serde_json::to_string_pretty(&approx.final_condition).expect("conditions serialize") + "\n";
            fs::write(out.join("final.json"), fin)?;
            fs::write(out.join("report.txt"), &report)?;
            Ok(report)
        }
        Mode::Verify => {
            let path = log.map(Path::to_path_buf).unwrap_or_else(|| out.join("log.jsonl"));
            let text = fs::read_to_string(&path)?;
            verify_log(cfg, &text)
        }
        Mode::Tower => {
            let run = run_tower(cfg.ground.build(), &cfg.tower, cfg.seed).map_err(|e| ExperimentError::Task(e.to_string()))?;
            run.write(out).map_err(|e| ExperimentError::Task(e.to_string()))?;
            let mut text = String::new();
            for r in &run.records {
                writeln!(
                    text,
                    "stage {} beta {} generators {} pairs {} cF {:?} recovered {} verified {}",
                    r.stage,
                    r.beta,
                    r.generators,
                    r.pairs,
                    r.c_f,
                    r.c_w.keys().all(|w| r.decoded_c_f.get(w) == Some(&r.c_f) && r.decoded_c_w.get(w) == r.c_w.get(w)),
                    r.verified
                )
                .unwrap();
            }
            let overlap = run.cross_stage_overlap(cfg.tower.window, 3);
            writeln!(text, "cross-stage family overlap on [0, {}): {overlap}", cfg.tower.window).unwrap();
            if !run.codes_recovered() || overlap > 0 || run.records.iter().any(|r| !r.verified) {
                return Err(ExperimentError::Verify(text));
            }
            Ok(text)
        }
    }
}
