//! Batch verification suites.
//!
//! Each suite re-checks one family of structural claims about a configured
//! Coxeter system inside explicit budgets: group axioms, braid normal forms,
//! the deletion identity, contractibility of word posets, stratifications,
//! block partitions, gap posets, the truncated letter-sequence category, the
//! downward comma model, nerve pushouts, and strong composability.  Results
//! are plain data so that callers can serialize them; nothing here reads a
//! clock or touches IO.  Runs with equal configuration and seed produce
//! identical reports.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::artin::{self, BraidElement};
use crate::coxeter::{CoxeterMatrix, CoxeterSystem, Gen, GroupElement, INF};
use crate::schubert::{self, ConvObject, MorphismClass};
use crate::topo::{
    self, certify_contractible_poset, check_adjunction_posets, check_poset_iso, comma,
    homology, inclusion_functor, mapping_cone_homology, nerve_loopfree, profiles_equal,
    pushout_check, Certificate, FinCategory, FinPoset, RankedStep,
};
use crate::words::{
    self, block_conditions, block2_poset, classify, compute_strata, coarsen_by_partition,
    enumerate_deletion_patterns, enumerate_words, functor_f, gap_posets, in_slice, meet,
    pullback_partition, refines, slice_shape, word_b_min, word_poset, word_s_1f,
    BlockPartition, Factorization, WordFilter,
};
use crate::{Error, Result};

/// Outcome of one verification instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The claim was neither confirmed nor refuted: a budget ran out, or
    /// only a homology-level certificate was found where a collapse was
    /// wanted.
    Unknown,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        }
    }
}

/// One checked instance: a stable id, the verdict, and a human-readable
/// account of what was checked and what was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instances: Vec<Instance>,
}

impl SuiteReport {
    /// (pass, fail, unknown) counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for i in &self.instances {
            match i.verdict {
                Verdict::Pass => c.0 += 1,
                Verdict::Fail => c.1 += 1,
                Verdict::Unknown => c.2 += 1,
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub system: String,
    pub seed: u64,
    pub budgets: Budgets,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn total_counts(&self) -> (usize, usize, usize) {
        let mut t = (0, 0, 0);
        for s in &self.suites {
            let c = s.counts();
            t.0 += c.0;
            t.1 += c.1;
            t.2 += c.2;
        }
        t
    }

    /// Instances that found homology-level evidence only, where a stronger
    /// collapse or cone certificate was wanted.
    pub fn downgraded_count(&self) -> usize {
        self.suites
            .iter()
            .flat_map(|s| &s.instances)
            .filter(|i| i.verdict == Verdict::Unknown && i.detail.contains("z-acyclic"))
            .count()
    }

    pub fn find(&self, id: &str) -> Option<(Suite, &Instance)> {
        for s in &self.suites {
            for i in &s.instances {
                if i.id == id {
                    return Some((s.suite, i));
                }
            }
        }
        None
    }
}

/// Verification suite selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    CoxeterAxioms,
    BraidKernel,
    DeletionProperty,
    DeleteThm,
    DelpatStrata,
    Blocks,
    GapPosets,
    Bistratified,
    DownContractible,
    Suspend,
    BisP0,
}

pub const ALL_SUITES: [Suite; 11] = [
    Suite::CoxeterAxioms,
    Suite::BraidKernel,
    Suite::DeletionProperty,
    Suite::DeleteThm,
    Suite::DelpatStrata,
    Suite::Blocks,
    Suite::GapPosets,
    Suite::Bistratified,
    Suite::DownContractible,
    Suite::Suspend,
    Suite::BisP0,
];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::CoxeterAxioms => "coxeter-axioms",
            Suite::BraidKernel => "braid-kernel",
            Suite::DeletionProperty => "deletion-property",
            Suite::DeleteThm => "delete-thm",
            Suite::DelpatStrata => "delpat-strata",
            Suite::Blocks => "blocks",
            Suite::GapPosets => "gap-posets",
            Suite::Bistratified => "bistratified",
            Suite::DownContractible => "down-contractible",
            Suite::Suspend => "suspend",
            Suite::BisP0 => "bis-p0",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        ALL_SUITES.iter().copied().find(|s| s.name() == name)
    }
}

/// Work limits for a run.  The time budget is enforced by the caller via the
/// `keep_going` callback (this crate never reads a clock); the others bound
/// enumeration sizes and convert overruns into unknown verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Longest braid (by generator count) enumerated as a base object.
    pub max_braid_len: usize,
    /// Letter-count bound for truncated letter-sequence categories.
    pub max_letters: usize,
    /// Object-count bound for any single enumerated structure.
    pub max_objects: usize,
    /// Morphism-count bound for any single materialized category.
    pub max_morphisms: usize,
    /// Per-suite wall-clock budget in seconds, enforced by the caller.
    pub time_budget_secs: u64,
}

impl Budgets {
    /// Desk-scale defaults keyed by preset name.  Unrecognized labels get
    /// the conservative affine-rank-3 limits.
    pub fn defaults_for(system: &str) -> Budgets {
        let max_braid_len = match system {
            "A1" | "A1~" => 6,
            "A2" | "B2" | "G2" => 5,
            _ => 4,
        };
        Budgets {
            max_braid_len,
            max_letters: 6,
            max_objects: 200_000,
            max_morphisms: 500_000,
            time_budget_secs: 600,
        }
    }
}

/// A parsed configuration file: every field optional, resolved against
/// per-system defaults by `resolve`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    pub system: Option<String>,
    pub suites: Option<Vec<Suite>>,
    pub max_braid_len: Option<usize>,
    pub max_letters: Option<usize>,
    pub max_objects: Option<usize>,
    pub max_morphisms: Option<usize>,
    pub time_budget_secs: Option<u64>,
    pub seed: Option<u64>,
}

fn parse_number<T: core::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::ConfigError(format!("bad value for {key}: {value}")))
}

impl RawConfig {
    /// Line-oriented `key value` format.  `#` starts a comment; keys are
    /// `system`, `suites` (comma-separated names or `all`), `max-braid-len`,
    /// `max-letters`, `max-objects`, `max-morphisms`, `time-budget-secs`,
    /// and `seed`.
    pub fn parse(text: &str) -> Result<RawConfig> {
        let mut cfg = RawConfig::default();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (ln, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => {
                    return Err(Error::ConfigError(format!(
                        "line {}: expected `key value`, got `{line}`",
                        ln + 1
                    )))
                }
            };
            if value.is_empty() {
                return Err(Error::ConfigError(format!("line {}: empty value for {key}", ln + 1)));
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::ConfigError(format!("duplicate key {key}")));
            }
            match key {
                "system" => cfg.system = Some(value.to_string()),
                "suites" => {
                    let mut suites = Vec::new();
                    let parts = value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|p| !p.is_empty());
                    for part in parts {
                        let part = part.trim();
                        if part == "all" {
                            suites.extend(ALL_SUITES);
                        } else {
                            match Suite::parse(part) {
                                Some(s) => suites.push(s),
                                None => {
                                    return Err(Error::ConfigError(format!(
                                        "unknown suite {part}"
                                    )))
                                }
                            }
                        }
                    }
                    suites.sort();
                    suites.dedup();
                    if suites.is_empty() {
                        return Err(Error::ConfigError("no suites selected".into()));
                    }
                    cfg.suites = Some(suites);
                }
                "max-braid-len" => cfg.max_braid_len = Some(parse_number(key, value)?),
                "max-letters" => cfg.max_letters = Some(parse_number(key, value)?),
                "max-objects" => cfg.max_objects = Some(parse_number(key, value)?),
                "max-morphisms" => cfg.max_morphisms = Some(parse_number(key, value)?),
                "time-budget-secs" => cfg.time_budget_secs = Some(parse_number(key, value)?),
                "seed" => cfg.seed = Some(parse_number(key, value)?),
                other => {
                    return Err(Error::ConfigError(format!("unknown key {other}")));
                }
            }
        }
        Ok(cfg)
    }

    /// Fill in defaults around the explicit overrides.  The matrix is
    /// supplied by the caller, which is what lets file-backed systems and
    /// presets share this path.
    pub fn resolve(&self, matrix: CoxeterMatrix) -> Result<RunConfig> {
        let system = self.system.clone().unwrap_or_else(|| "A2".to_string());
        let mut budgets = Budgets::defaults_for(&system);
        if let Some(v) = self.max_braid_len {
            budgets.max_braid_len = v;
        }
        if let Some(v) = self.max_letters {
            budgets.max_letters = v;
        }
        if let Some(v) = self.max_objects {
            budgets.max_objects = v;
        }
        if let Some(v) = self.max_morphisms {
            budgets.max_morphisms = v;
        }
        if let Some(v) = self.time_budget_secs {
            budgets.time_budget_secs = v;
        }
        if budgets.max_braid_len == 0 || budgets.max_letters == 0 || budgets.max_objects == 0
            || budgets.max_morphisms == 0
        {
            return Err(Error::ConfigError("budgets must be positive".into()));
        }
        Ok(RunConfig {
            system,
            matrix,
            suites: self.suites.clone().unwrap_or_else(|| ALL_SUITES.to_vec()),
            budgets,
            seed: self.seed.unwrap_or(7),
        })
    }
}

/// A fully resolved run: which system, which suites, what limits, what seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub system: String,
    pub matrix: CoxeterMatrix,
    pub suites: Vec<Suite>,
    pub budgets: Budgets,
    pub seed: u64,
}

/// Run every configured suite.  `keep_going` is polled between instances;
/// when it returns false the current suite records a deadline marker and
/// stops, and later suites do the same immediately.
pub fn run(cfg: &RunConfig, keep_going: &mut dyn FnMut() -> bool) -> Result<Report> {
    let sys = CoxeterSystem::build(cfg.matrix.clone())?;
    let mut suites = Vec::new();
    for &suite in &cfg.suites {
        suites.push(run_suite(&sys, suite, &cfg.budgets, cfg.seed, keep_going));
    }
    Ok(Report {
        system: cfg.system.clone(),
        seed: cfg.seed,
        budgets: cfg.budgets.clone(),
        suites,
    })
}

/// Run a single suite against an already-built system.
pub fn run_suite(
    sys: &CoxeterSystem,
    suite: Suite,
    budgets: &Budgets,
    seed: u64,
    keep_going: &mut dyn FnMut() -> bool,
) -> SuiteReport {
    let mut cx = Cx {
        sys,
        bg: budgets,
        rng: seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(suite as u64 + 1)),
        out: Vec::new(),
        stopped: false,
        suite,
    };
    match suite {
        Suite::CoxeterAxioms => suite_coxeter_axioms(&mut cx, keep_going),
        Suite::BraidKernel => suite_braid_kernel(&mut cx, keep_going),
        Suite::DeletionProperty => suite_deletion_property(&mut cx, keep_going),
        Suite::DeleteThm => suite_delete_thm(&mut cx, keep_going),
        Suite::DelpatStrata => suite_delpat_strata(&mut cx, keep_going),
        Suite::Blocks => suite_blocks(&mut cx, keep_going),
        Suite::GapPosets => suite_gap_posets(&mut cx, keep_going),
        Suite::Bistratified => suite_bistratified(&mut cx, keep_going),
        Suite::DownContractible => suite_down_contractible(&mut cx, keep_going),
        Suite::Suspend => suite_suspend(&mut cx, keep_going),
        Suite::BisP0 => suite_bis_p0(&mut cx, keep_going),
    }
    SuiteReport {
        suite,
        instances: cx.out,
    }
}

/// Shared per-suite state: budgets, a seeded stream, collected instances,
/// and the deadline latch.
struct Cx<'a> {
    sys: &'a CoxeterSystem,
    bg: &'a Budgets,
    rng: u64,
    out: Vec<Instance>,
    stopped: bool,
    suite: Suite,
}

impl Cx<'_> {
    /// Poll the deadline before starting the next instance.  On the first
    /// refusal a marker instance is recorded so skipped work is visible.
    fn go(&mut self, keep_going: &mut dyn FnMut() -> bool) -> bool {
        if self.stopped {
            return false;
        }
        if keep_going() {
            return true;
        }
        self.stopped = true;
        self.out.push(Instance {
            id: format!("{}/deadline", self.suite.name()),
            verdict: Verdict::Unknown,
            detail: "suite time budget exhausted; remaining instances skipped".to_string(),
        });
        false
    }

    fn rand(&mut self) -> u64 {
        topo::splitmix64(&mut self.rng)
    }

    fn push(&mut self, id: String, outcome: Result<(Verdict, String)>) {
        let (verdict, detail) = match outcome {
            Ok(v) => v,
            Err(Error::BudgetExceeded { budget, needed }) => (
                Verdict::Unknown,
                format!("budget exceeded: {budget} allowed, {needed} needed"),
            ),
            Err(e) => (Verdict::Fail, format!("error: {e}")),
        };
        self.out.push(Instance { id, verdict, detail });
    }
}

fn pass(detail: String) -> Result<(Verdict, String)> {
    Ok((Verdict::Pass, detail))
}

fn verdict_of(ok: bool, good: String, bad: String) -> Result<(Verdict, String)> {
    if ok {
        Ok((Verdict::Pass, good))
    } else {
        Ok((Verdict::Fail, bad))
    }
}

/// Pass on a cone or collapse certificate, unknown on homology-only or
/// exhausted search, fail on nonvanishing homology.
fn cert_outcome(cert: &Certificate, what: &str) -> (Verdict, String) {
    match cert {
        Certificate::Cone { .. } | Certificate::Collapsible { .. } => (
            Verdict::Pass,
            format!("{what}: certificate {}", cert.level_name()),
        ),
        Certificate::ZAcyclic => (
            Verdict::Unknown,
            format!("{what}: certificate z-acyclic only; contractibility unproven"),
        ),
        Certificate::NotContractible { degree } => (
            Verdict::Fail,
            format!("{what}: nonzero reduced homology in degree {degree}"),
        ),
        Certificate::Unknown => (Verdict::Unknown, format!("{what}: no certificate found")),
    }
}

fn gen_word_id(word: &[Gen]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    word.iter().map(|g| char::from(b'0' + *g)).collect()
}

/// Stable label for a braid: normal-form factor words joined by dots.
fn braid_id(b: &BraidElement) -> String {
    if b.is_empty() {
        return "e".to_string();
    }
    let parts: Vec<String> = b.factors().iter().map(|f| gen_word_id(f.word())).collect();
    parts.join(".")
}

/// All positive braids of generator length 1..=max_len, labelled by the
/// first generator word reaching them, in braid order.  The monoid is
/// graded by generator count, so breadth-first search by word length finds
/// every braid at its own length.
fn braids_up_to(sys: &CoxeterSystem, max_len: usize) -> Result<Vec<(String, BraidElement)>> {
    let gens: Vec<Gen> = sys.generators().collect();
    let mut seen: BTreeMap<BraidElement, Vec<Gen>> = BTreeMap::new();
    let mut frontier: Vec<(Vec<Gen>, BraidElement)> = vec![(Vec::new(), artin::empty(sys))];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, b) in &frontier {
            for &s in &gens {
                let nb = artin::bmul(sys, b, &artin::from_letter_word(sys, &[s]))?;
                if seen.contains_key(&nb) {
                    continue;
                }
                let mut w2 = word.clone();
                w2.push(s);
                seen.insert(nb.clone(), w2.clone());
                next.push((w2, nb));
            }
        }
        frontier = next;
    }
    Ok(seen
        .into_iter()
        .map(|(b, w)| (gen_word_id(&w), b))
        .collect())
}

fn all_words(rank: usize, len: usize) -> impl Iterator<Item = Vec<Gen>> {
    let total = rank.checked_pow(len as u32).unwrap_or(0);
    (0..total).map(move |mut code| {
        let mut w = Vec::with_capacity(len);
        for _ in 0..len {
            w.push((code % rank) as Gen);
            code /= rank;
        }
        w
    })
}

fn alternating(s: Gen, t: Gen, len: usize) -> Vec<Gen> {
    (0..len).map(|i| if i % 2 == 0 { s } else { t }).collect()
}

// ---------------------------------------------------------------------------
// coxeter-axioms

fn suite_coxeter_axioms(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let sys = cx.sys;
    let rank = sys.rank();

    if cx.go(keep) {
        let r = (|| {
            for s in 0..rank as Gen {
                let g = sys.gen(s);
                if !sys.multiply(&g, &g)?.is_identity() || !sys.from_word(&[s, s]).is_identity() {
                    return verdict_of(false, String::new(), format!("generator {s} is not an involution"));
                }
            }
            pass(format!("all {rank} generators square to the identity"))
        })();
        cx.push("involutions".to_string(), r);
    }

    if cx.go(keep) {
        let r = (|| {
            let mut checked = 0;
            for i in 0..rank {
                for j in (i + 1)..rank {
                    let (s, t) = (i as Gen, j as Gen);
                    let m = sys.matrix().get(i, j);
                    if m == INF {
                        // no relation: alternating words stay reduced
                        for k in 1..=8usize {
                            if sys.from_word(&alternating(s, t, k)).len() != k {
                                return verdict_of(
                                    false,
                                    String::new(),
                                    format!("bond ({s},{t}) marked infinite but relation found at {k}"),
                                );
                            }
                        }
                    } else {
                        let m = m as usize;
                        let lhs = sys.from_word(&alternating(s, t, m));
                        let rhs = sys.from_word(&alternating(t, s, m));
                        if lhs != rhs {
                            return verdict_of(false, String::new(), format!("braid relation fails at ({s},{t})"));
                        }
                        let mut sq = alternating(s, t, m);
                        sq.extend(alternating(s, t, m).iter().rev());
                        if !sys.from_word(&sq).is_identity() {
                            return verdict_of(false, String::new(), format!("(st)^m not the identity at ({s},{t})"));
                        }
                        for k in 1..m {
                            if sys.from_word(&alternating(s, t, k)) == sys.from_word(&alternating(t, s, k)) {
                                return verdict_of(
                                    false,
                                    String::new(),
                                    format!("bond ({s},{t}) satisfies a shorter relation at {k}"),
                                );
                            }
                        }
                    }
                    checked += 1;
                }
            }
            pass(format!("checked {checked} generator pairs against the matrix"))
        })();
        cx.push("bond-orders".to_string(), r);
    }

    let cap = cx.bg.max_braid_len.min(6);
    if cx.go(keep) {
        let r = (|| {
            let elems = sys.enumerate_elements(cap, cx.bg.max_objects)?;
            for w in &elems {
                if sys.from_word(w.word()) != *w || w.word().len() != w.len() {
                    return verdict_of(false, String::new(), format!("canonical word of {w:?} does not round-trip"));
                }
            }
            pass(format!("{} canonical words up to length {cap} round-trip", elems.len()))
        })();
        cx.push("word-roundtrip".to_string(), r);
    }

    if cx.go(keep) {
        let r = (|| {
            let elems = sys.enumerate_elements(cap.min(4), cx.bg.max_objects)?;
            let mut pairs = 0;
            for u in &elems {
                for w in &elems {
                    // subword characterization of the order
                    let word = w.word();
                    let mut oracle = false;
                    for mask in 0..(1usize << word.len()) {
                        let sub: Vec<Gen> = word
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| mask >> k & 1 == 1)
                            .map(|(_, &g)| g)
                            .collect();
                        if sys.from_word(&sub) == *u {
                            oracle = true;
                            break;
                        }
                    }
                    if sys.bruhat_leq(u, w)? != oracle {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("order disagrees with the subword oracle at {u:?} vs {w:?}"),
                        );
                    }
                    pairs += 1;
                }
            }
            pass(format!("{pairs} ordered pairs match the subword oracle"))
        })();
        cx.push("bruhat-subword".to_string(), r);
    }

    if cx.go(keep) {
        let mut rng = cx.rand();
        let r = (|| {
            let elems = sys.enumerate_elements(cap, cx.bg.max_objects)?;
            let n = elems.len();
            let mut checked = 0;
            for _ in 0..200 {
                let u = &elems[(topo::splitmix64(&mut rng) % n as u64) as usize];
                let v = &elems[(topo::splitmix64(&mut rng) % n as u64) as usize];
                for s in 0..sys.rank() as Gen {
                    let shorter = sys.gen_mul(s, u)?.len() < u.len();
                    if sys.left_descents(u).contains(&s) != shorter {
                        return verdict_of(false, String::new(), format!("descent set wrong for {u:?}"));
                    }
                }
                if sys.inverse(&sys.inverse(u)?)? != *u {
                    return verdict_of(false, String::new(), format!("double inverse moves {u:?}"));
                }
                let uv = sys.multiply(u, v)?;
                let vinv_uinv = sys.multiply(&sys.inverse(v)?, &sys.inverse(u)?)?;
                if sys.inverse(&uv)? != vinv_uinv {
                    return verdict_of(false, String::new(), "inverse is not an antihomomorphism".to_string());
                }
                if sys.prefix_leq(u, &uv).unwrap_or(false) && !sys.bruhat_leq(u, &uv)? {
                    return verdict_of(false, String::new(), "prefix order not inside the full order".to_string());
                }
                checked += 1;
            }
            pass(format!("{checked} randomized element pairs consistent"))
        })();
        cx.push("descent-inverse-sample".to_string(), r);
    }
}

// ---------------------------------------------------------------------------
// braid-kernel

/// Rewriting oracle: equivalence classes of generator words of one length
/// under single applications of the defining braid relations, computed by
/// union-find over the raw words without normal forms.
fn rewriting_classes(sys: &CoxeterSystem, len: usize) -> (Vec<Vec<Gen>>, Vec<usize>) {
    let rank = sys.rank();
    let word_list: Vec<Vec<Gen>> = all_words(rank, len).collect();
    let index: BTreeMap<Vec<Gen>, usize> =
        word_list.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut parent: Vec<usize> = (0..word_list.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, w) in word_list.iter().enumerate() {
        for s in 0..rank as Gen {
            for t in 0..rank as Gen {
                if s == t {
                    continue;
                }
                let m = sys.matrix().get(s as usize, t as usize);
                if m == INF {
                    continue;
                }
                let m = m as usize;
                if m > len {
                    continue;
                }
                let pat = alternating(s, t, m);
                let rep = alternating(t, s, m);
                for start in 0..=(len - m) {
                    if w[start..start + m] == pat[..] {
                        let mut w2 = w.clone();
                        w2[start..start + m].copy_from_slice(&rep);
                        let j = index[&w2];
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri] = rj;
                        }
                    }
                }
            }
        }
    }
    let roots: Vec<usize> = (0..word_list.len()).map(|i| find(&mut parent, i)).collect();
    (word_list, roots)
}

fn suite_braid_kernel(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let sys = cx.sys;
    let cap6 = cx.bg.max_braid_len.min(6);
    let cap5 = cx.bg.max_braid_len.min(5);

    for len in 1..=cap6 {
        if !cx.go(keep) {
            return;
        }
        let r = (|| {
            let (word_list, roots) = rewriting_classes(sys, len);
            let mut by_root: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
            let mut keys: BTreeSet<Vec<u8>> = BTreeSet::new();
            for (i, w) in word_list.iter().enumerate() {
                let key = artin::from_letter_word(sys, w).key();
                keys.insert(key.clone());
                match by_root.get(&roots[i]) {
                    None => {
                        by_root.insert(roots[i], key);
                    }
                    Some(k) if *k == key => {}
                    Some(_) => {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("rewriting-equivalent words get distinct normal forms at {w:?}"),
                        )
                    }
                }
            }
            verdict_of(
                by_root.len() == keys.len(),
                format!(
                    "{} words, {} rewriting classes, matching normal forms",
                    word_list.len(),
                    by_root.len()
                ),
                format!(
                    "{} rewriting classes but {} normal forms at length {len}",
                    by_root.len(),
                    keys.len()
                ),
            )
        })();
        cx.push(format!("nf-vs-rewriting/len{len}"), r);
    }

    if cx.go(keep) {
        let r = (|| {
            let elems = sys.enumerate_elements(cap6, cx.bg.max_objects)?;
            for w in &elems {
                let lifted = artin::lift(sys, w);
                if !lifted.is_reduced() || lifted.len() != w.len() || artin::demazure(sys, &lifted) != *w {
                    return verdict_of(false, String::new(), format!("lift of {w:?} does not round-trip"));
                }
            }
            pass(format!("lift/demazure round-trips on {} elements", elems.len()))
        })();
        cx.push("demazure-lift-roundtrip".to_string(), r);
    }

    if cx.go(keep) {
        let braids = match braids_up_to(sys, cap5) {
            Ok(b) => b,
            Err(e) => {
                cx.push("gcd-meet".to_string(), Err(e));
                return;
            }
        };
        let r = (|| {
            let mut divisors: BTreeMap<BraidElement, BTreeSet<BraidElement>> = BTreeMap::new();
            for (_, b) in &braids {
                divisors.insert(
                    b.clone(),
                    artin::left_divisors(sys, b, cx.bg.max_objects)?.into_iter().collect(),
                );
            }
            let mut pairs = 0;
            for (_, a) in &braids {
                for (_, b) in &braids {
                    let g = artin::left_gcd(sys, a, b)?;
                    if !artin::left_divides(sys, &g, a)? || !artin::left_divides(sys, &g, b)? {
                        return verdict_of(false, String::new(), format!("gcd does not divide at ({a:?}, {b:?})"));
                    }
                    for c in divisors[a].intersection(&divisors[b]) {
                        if !artin::left_divides(sys, c, &g)? {
                            return verdict_of(
                                false,
                                String::new(),
                                format!("common divisor {c:?} not below the gcd of ({a:?}, {b:?})"),
                            );
                        }
                    }
                    pairs += 1;
                }
            }
            pass(format!("gcd is the divisor-lattice meet on {pairs} pairs up to length {cap5}"))
        })();
        cx.push("gcd-meet".to_string(), r);
    }

    if cx.go(keep) {
        let braids = match braids_up_to(sys, cap6) {
            Ok(b) => b,
            Err(e) => {
                cx.push("prefix-set-divisibility".to_string(), Err(e));
                return;
            }
        };
        let r = (|| {
            let mut checked = 0;
            for (_, b) in &braids {
                let prefixes: Vec<Gen> = artin::simple_prefixes(sys, b).into_iter().collect();
                let full: BTreeSet<Gen> = prefixes.iter().copied().collect();
                if !sys.is_finite_type(&full) {
                    return verdict_of(
                        false,
                        String::new(),
                        format!("length-1 prefix set of {b:?} is not finite type"),
                    );
                }
                for mask in 1..(1usize << prefixes.len()) {
                    let sub: BTreeSet<Gen> = prefixes
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| mask >> k & 1 == 1)
                        .map(|(_, &g)| g)
                        .collect();
                    let w0 = sys.longest_element(&sub)?;
                    if !artin::left_divides(sys, &artin::lift(sys, &w0), b)? {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("lifted longest element of {sub:?} does not divide {b:?}"),
                        );
                    }
                    checked += 1;
                }
            }
            pass(format!("{checked} lifted longest elements divide their braids (length <= {cap6})"))
        })();
        cx.push("prefix-set-divisibility".to_string(), r);
    }

    if cx.go(keep) {
        let mut rng = cx.rand();
        let r = (|| {
            let rank = sys.rank();
            let word = |rng: &mut u64| -> Vec<Gen> {
                let len = (topo::splitmix64(rng) % (cap6 as u64 + 1)) as usize;
                (0..len)
                    .map(|_| (topo::splitmix64(rng) % rank as u64) as Gen)
                    .collect()
            };
            for i in 0..1000 {
                let (wa, wb) = (word(&mut rng), word(&mut rng));
                let a = artin::from_letter_word(sys, &wa);
                let b = artin::from_letter_word(sys, &wb);
                let lhs = artin::demazure(sys, &artin::bmul(sys, &a, &b)?);
                let rhs =
                    sys.demazure_product(&[artin::demazure(sys, &a), artin::demazure(sys, &b)])?;
                if lhs != rhs {
                    return verdict_of(
                        false,
                        String::new(),
                        format!("sample {i}: image of a product differs from the product of images"),
                    );
                }
            }
            pass("1000 randomized products map correctly to the 0-Hecke monoid".to_string())
        })();
        cx.push("demazure-monoid-map".to_string(), r);
    }
}

// ---------------------------------------------------------------------------
// deletion-property

fn suite_deletion_property(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let sys = cx.sys;
    let rank = sys.rank();
    for len in 2..=cx.bg.max_braid_len {
        if !cx.go(keep) {
            return;
        }
        let r = (|| {
            let mut nonreduced = 0;
            for word in all_words(rank, len) {
                // independent prefix walk
                let mut prefixes = Vec::with_capacity(len + 1);
                prefixes.push(sys.identity());
                for &g in &word {
                    let last = prefixes.last().expect("nonempty");
                    prefixes.push(sys.mul_gen(last, g)?);
                }
                if prefixes[len].len() == len {
                    continue;
                }
                nonreduced += 1;
                let (j, jp) = sys.deletion_indices(&word)?;
                if !(1 <= jp && jp <= j && j < len) {
                    return verdict_of(false, String::new(), format!("indices ({j},{jp}) out of range for {word:?}"));
                }
                // j is the last reduced prefix
                for (i, p) in prefixes.iter().enumerate().take(j + 1) {
                    if p.len() != i {
                        return verdict_of(false, String::new(), format!("prefix {i} of {word:?} not reduced before {j}"));
                    }
                }
                if prefixes[j + 1].len() >= j + 1 {
                    return verdict_of(false, String::new(), format!("prefix {} of {word:?} still reduced", j + 1));
                }
                // deleting both indexed letters preserves the element
                let remain: Vec<Gen> = word
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != jp - 1 && *k != j)
                    .map(|(_, &g)| g)
                    .collect();
                if sys.from_word(&remain) != prefixes[len] {
                    return verdict_of(false, String::new(), format!("deletion at ({j},{jp}) changes {word:?}"));
                }
                // uniqueness, by conjugated reflections instead of walls
                let refl = |i: usize| -> Result<GroupElement> {
                    let p = &prefixes[i - 1];
                    sys.multiply(&sys.multiply(p, &sys.gen(word[i - 1]))?, &sys.inverse(p)?)
                };
                let target = refl(j + 1)?;
                let mut matches = Vec::new();
                for i in 1..=j {
                    if refl(i)? == target {
                        matches.push(i);
                    }
                }
                if matches != vec![jp] {
                    return verdict_of(
                        false,
                        String::new(),
                        format!("reflection matches {matches:?} instead of [{jp}] for {word:?}"),
                    );
                }
            }
            pass(format!("{nonreduced} nonreduced words of length {len}: indices unique, identity holds"))
        })();
        cx.push(format!("len{len}"), r);
    }
}

// ---------------------------------------------------------------------------
// delete-thm

fn suite_delete_thm(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let braids = match braids_up_to(cx.sys, cx.bg.max_braid_len) {
        Ok(b) => b,
        Err(e) => {
            cx.push("enumerate".to_string(), Err(e));
            return;
        }
    };
    for (id, b) in &braids {
        let filters: &[(WordFilter, &str, bool)] = &[
            (WordFilter::Finite, "finite-words", true),
            (WordFilter::FiniteReduced, "reduced-words", true),
            (WordFilter::FiniteNonreduced, "nonreduced-words", !b.is_reduced()),
        ];
        for &(filter, label, applicable) in filters {
            if !applicable {
                continue;
            }
            if !cx.go(keep) {
                return;
            }
            let seed = cx.rand();
            let sys = cx.sys;
            let max_objects = cx.bg.max_objects;
            let r = (|| {
                let wp = word_poset(sys, b, filter, max_objects)?;
                if wp.n() == 0 {
                    return verdict_of(false, String::new(), format!("{label} poset of {id} is empty"));
                }
                let p = wp.fin_poset()?;
                let cert = certify_contractible_poset(&p, seed);
                let (v, d) = cert_outcome(&cert, &format!("{} objects", p.n()));
                Ok((v, d))
            })();
            cx.push(format!("b{id}/{label}"), r);
        }
        if b.is_reduced() {
            if !cx.go(keep) {
                return;
            }
            let sys = cx.sys;
            let max_objects = cx.bg.max_objects;
            let r = (|| {
                let fnw = enumerate_words(sys, b, WordFilter::FiniteNonreduced, max_objects)?;
                verdict_of(
                    fnw.is_empty(),
                    "reduced braid admits no nonreduced-letter words".to_string(),
                    format!("{} nonreduced-letter words found for a reduced braid", fnw.len()),
                )
            })();
            cx.push(format!("b{id}/no-nonreduced-words"), r);
        }
    }
}

// ---------------------------------------------------------------------------
// delpat-strata

fn suite_delpat_strata(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let braids = match braids_up_to(cx.sys, cx.bg.max_braid_len) {
        Ok(b) => b,
        Err(e) => {
            cx.push("enumerate".to_string(), Err(e));
            return;
        }
    };
    for (id, b) in braids.iter().filter(|(_, b)| !b.is_reduced()) {
        if !cx.go(keep) {
            return;
        }
        let sys = cx.sys;
        let max_objects = cx.bg.max_objects;
        let r = (|| {
            let strata = compute_strata(sys, b, max_objects)?;
            let poset = strata.poset();
            let n = poset.n();
            let depth = strata.depth();
            if depth == 0 {
                return verdict_of(false, String::new(), "no deletion patterns for a nonreduced braid".to_string());
            }
            if strata.le_set(depth)?.len() != n {
                return verdict_of(false, String::new(), "top level does not exhaust the poset".to_string());
            }
            let fn_count = (0..n).filter(|&i| poset.in_fn(i)).count();
            if strata.le_set(0)?.len() != fn_count {
                return verdict_of(false, String::new(), "level zero is not the nonreduced part".to_string());
            }
            for i in 0..n {
                for j in 0..n {
                    if poset.leq(i, j) && poset.in_fn(i) && !poset.in_fn(j) {
                        return verdict_of(false, String::new(), "nonreduced part is not upward closed".to_string());
                    }
                }
            }
            let mut slice_members = Vec::new();
            for d in 1..=depth {
                let lt: BTreeSet<usize> = strata.lt_set(d)?.into_iter().collect();
                let fr: BTreeSet<usize> = strata.fr_set(d)?.into_iter().collect();
                for &i in &lt {
                    for &j in &fr {
                        if poset.leq(i, j) {
                            return verdict_of(false, String::new(), format!("arrow from below into stratum {d}"));
                        }
                    }
                }
                let slice = strata.slice_set(sys, d)?;
                for &i in &slice {
                    if !fr.contains(&i) {
                        return verdict_of(false, String::new(), format!("slice word outside stratum {d}"));
                    }
                }
                slice_members.extend(slice);
            }
            for j in 0..n {
                if !slice_members.iter().any(|&i| poset.leq(i, j)) {
                    return verdict_of(false, String::new(), format!("object {j} not refined by any slice word"));
                }
            }
            // classification agrees with the stratification; words whose
            // crossing positions sit inside oversized letters lie in no
            // slice, but they must still land in some closed stratum
            let mut classified = 0;
            let mut unsliced = 0;
            for i in 0..n {
                if poset.in_fn(i) {
                    continue;
                }
                let w = poset.object(i);
                match classify(sys, strata.patterns(), w) {
                    Ok(d0) => {
                        if !in_slice(sys, w, &strata.patterns()[d0])? {
                            return verdict_of(
                                false,
                                String::new(),
                                format!("classified word {w:?} not over its pattern"),
                            );
                        }
                        match strata.min_meet(i) {
                            Some(m) if m <= d0 + 1 => {}
                            other => {
                                return verdict_of(
                                    false,
                                    String::new(),
                                    format!("stratum {other:?} above classification {} for {w:?}", d0 + 1),
                                )
                            }
                        }
                        classified += 1;
                    }
                    Err(Error::NotClassified) => {
                        if strata.min_meet(i).is_none() {
                            return verdict_of(
                                false,
                                String::new(),
                                format!("word {w:?} meets no stratum"),
                            );
                        }
                        unsliced += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
            pass(format!(
                "{n} objects, {depth} patterns, {classified} slice words, {unsliced} closure-only words"
            ))
        })();
        cx.push(format!("b{id}/stratification"), r);

        if !cx.go(keep) {
            return;
        }
        let r = slice_product_check(cx.sys, b, cx.bg.max_objects);
        cx.push(format!("b{id}/slice-product"), r);

        if !cx.go(keep) {
            return;
        }
        let r = slice_meet_adjoint_check(cx.sys, b, cx.bg.max_objects);
        cx.push(format!("b{id}/slice-meet-adjoint"), r);
    }
}

/// Each open stratum restricted to its slice is the triple product of the
/// reduced-word posets of the pattern's three segments, via letterwise
/// concatenation around the two crossing letters.
fn slice_product_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut levels = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        let slice = strata.slice_set(sys, d)?;
        let slice_poset = poset.induced(&slice)?;
        let parts = [
            artin::lift(sys, pat.w1()),
            artin::lift(sys, pat.w2()),
            pat.b3().clone(),
        ];
        let mut factors = Vec::new();
        for p in &parts {
            factors.push(enumerate_words(sys, p, WordFilter::FiniteReduced, max_objects)?);
        }
        let mut fin = Vec::new();
        for objs in &factors {
            let m = objs.len();
            let mut leq = vec![false; m * m];
            for i in 0..m {
                for j in 0..m {
                    leq[i * m + j] = refines(sys, &objs[i], &objs[j])?;
                }
            }
            fin.push(FinPoset::new(m, leq, (0..m).map(|i| format!("{i}")).collect())?);
        }
        let product = fin[0].product(&fin[1]).product(&fin[2]);
        if product.n() != slice.len() {
            return verdict_of(
                false,
                String::new(),
                format!("stratum {d}: {} slice words vs {} product points", slice.len(), product.n()),
            );
        }
        let mut map = Vec::new();
        for x in &factors[0] {
            for y in &factors[1] {
                for z in &factors[2] {
                    let mut letters = x.letters().to_vec();
                    letters.push(artin::from_letter_word(sys, &[pat.s()]));
                    letters.extend(y.letters().iter().cloned());
                    letters.push(artin::from_letter_word(sys, &[pat.t()]));
                    letters.extend(z.letters().iter().cloned());
                    let w = Factorization::new(sys, letters)?;
                    let Some(global) = poset.index_of(&w) else {
                        return verdict_of(false, String::new(), format!("assembled word {w:?} missing"));
                    };
                    let Some(local) = slice.iter().position(|&g| g == global) else {
                        return verdict_of(false, String::new(), format!("assembled word {w:?} not in its slice"));
                    };
                    map.push(local);
                }
            }
        }
        if !check_poset_iso(&product, &slice_poset, &map) {
            return verdict_of(false, String::new(), format!("stratum {d}: product map is not an isomorphism"));
        }
        levels += 1;
    }
    pass(format!("{levels} strata factor as triple products"))
}

/// The slice embeds into its stratum with meet-with-the-pattern-object as
/// right adjoint.
fn slice_meet_adjoint_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut levels = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        let pat_obj = pat.object(sys)?;
        let slice = strata.slice_set(sys, d)?;
        let fr = strata.fr_set(d)?;
        let slice_poset = poset.induced(&slice)?;
        let fr_poset = poset.induced(&fr)?;
        let mut l = Vec::new();
        for &g in &slice {
            let Some(p) = fr.iter().position(|&x| x == g) else {
                return verdict_of(false, String::new(), format!("stratum {d}: slice not inside"));
            };
            l.push(p);
        }
        let mut r = Vec::new();
        for &g in &fr {
            let Some(m) = meet(sys, poset.object(g), &pat_obj)? else {
                return verdict_of(false, String::new(), format!("stratum {d}: word admits no meet with its pattern"));
            };
            let Some(gi) = poset.index_of(&m) else {
                return verdict_of(false, String::new(), format!("stratum {d}: meet escapes the poset"));
            };
            let Some(si) = slice.iter().position(|&x| x == gi) else {
                return verdict_of(false, String::new(), format!("stratum {d}: meet lands outside the slice"));
            };
            r.push(si);
        }
        if !check_adjunction_posets(&slice_poset, &fr_poset, &l, &r)? {
            return verdict_of(false, String::new(), format!("stratum {d}: embedding and meet are not adjoint"));
        }
        levels += 1;
    }
    pass(format!("meet is right adjoint to the slice embedding on {levels} strata"))
}

// ---------------------------------------------------------------------------
// blocks

fn suite_blocks(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let cap = cx.bg.max_braid_len.min(6);
    let braids = match braids_up_to(cx.sys, cap) {
        Ok(b) => b,
        Err(e) => {
            cx.push("enumerate".to_string(), Err(e));
            return;
        }
    };
    for (id, b) in braids.iter().filter(|(_, b)| !b.is_reduced()) {
        if !cx.go(keep) {
            return;
        }
        cx.push(format!("b{id}/partition-oracle"), partition_oracle_check(cx.sys, b, cx.bg.max_objects));
        if !cx.go(keep) {
            return;
        }
        cx.push(format!("b{id}/union-lemma"), union_lemma_check(cx.sys, b, cx.bg.max_objects));
        if !cx.go(keep) {
            return;
        }
        cx.push(format!("b{id}/gap-run-adjunction"), gap_run_adjunction_check(cx.sys, b, cx.bg.max_objects));
        if !cx.go(keep) {
            return;
        }
        cx.push(format!("b{id}/splitting-reflection"), splitting_reflection_check(cx.sys, b, cx.bg.max_objects));
    }
    if cx.sys.matrix() == CoxeterMatrix::preset("A2~").as_ref().expect("preset") {
        if !cx.go(keep) {
            return;
        }
        cx.push("affine-regroup-iso".to_string(), affine_regroup_check(cx.sys, cx.bg.max_objects));
        if !cx.go(keep) {
            return;
        }
        cx.push("affine-first-gap-adjunction".to_string(), affine_first_gap_check(cx.sys, cx.bg.max_objects));
    }
}

fn block_ft(sys: &CoxeterSystem, w: &Factorization, lo: usize, hi: usize) -> Result<bool> {
    let mut acc = artin::empty(sys);
    for l in &w.letters()[lo..=hi] {
        acc = artin::bmul(sys, &acc, l)?;
    }
    Ok(artin::is_finite_type_elt(sys, &acc))
}

fn bmin_of(sys: &CoxeterSystem, w: &Factorization, pat: &words::DeletionPattern) -> Result<Option<usize>> {
    match word_b_min(sys, w, pat) {
        Ok(k) => Ok(Some(k)),
        Err(Error::NoGapIndex) => Ok(None),
        Err(e) => Err(e),
    }
}

fn qualifies(
    sys: &CoxeterSystem,
    w: &Factorization,
    pat: &words::DeletionPattern,
    shape: words::SliceShape,
    bmin: Option<usize>,
    lo: usize,
    hi: usize,
) -> Result<bool> {
    let (a, b, c) = block_conditions(sys, w, pat, shape, bmin, lo, hi)?;
    Ok(a || b || c)
}

/// The comma-membership predicate on partitions of a slice word agrees with
/// the direct criterion: coarsening by the partition lands strictly below
/// the pattern's level.
fn partition_oracle_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut checked = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        let lt: BTreeSet<usize> = strata.lt_set(d)?.into_iter().collect();
        for &i in &strata.slice_set(sys, d)? {
            let w = poset.object(i).clone();
            let shape = slice_shape(sys, &w, pat)?;
            let bmin = bmin_of(sys, &w, pat)?;
            for mask in 0..(1usize << (w.len() - 1)) {
                let p = BlockPartition::from_mask(w.len(), mask);
                let coarse = coarsen_by_partition(sys, &w, &p)?;
                let below = match poset.index_of(&coarse) {
                    Some(ci) => lt.contains(&ci),
                    None => false,
                };
                if words::partition_maps_below(sys, &w, pat, shape, bmin, &p)? != below {
                    return verdict_of(
                        false,
                        String::new(),
                        format!("predicate disagrees at word {w:?} partition {p:?} level {d}"),
                    );
                }
                checked += 1;
            }
        }
    }
    pass(format!("{checked} (word, partition) pairs match the coarsening criterion"))
}

/// A finite-type block reaching from at most the gap index to the second
/// crossing forces the union with the first crossing to stay finite type.
fn union_lemma_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut checked = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        for &i in &strata.slice_set(sys, d)? {
            let w = poset.object(i).clone();
            let shape = slice_shape(sys, &w, pat)?;
            let Some(k) = bmin_of(sys, &w, pat)? else {
                continue;
            };
            for lo in shape.pos_s + 1..=shape.pos_t {
                if lo > shape.pos_s + k {
                    continue;
                }
                for hi in shape.pos_t..w.len() {
                    if !block_ft(sys, &w, lo, hi)? {
                        continue;
                    }
                    checked += 1;
                    if !block_ft(sys, &w, shape.pos_s, hi)? {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("union with the crossing leaves finite type at {w:?} [{lo},{hi}]"),
                        );
                    }
                }
            }
        }
    }
    pass(format!("{checked} block unions stay finite type"))
}

/// Inside the admissible-partition poset of a slice word with a gap index,
/// merging the run from the first crossing through the gap is left adjoint
/// to the inclusion of the partitions already containing that run.
fn gap_run_adjunction_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut checked = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        for &i in &strata.slice_set(sys, d)? {
            let w = poset.object(i).clone();
            if word_b_min(sys, &w, pat).is_err() {
                continue;
            }
            let bp = words::block_poset(sys, &w, pat, max_objects)?;
            let shape = bp.shape();
            let Some(k) = bp.bmin() else { continue };
            let sub: Vec<usize> = (0..bp.partitions().len())
                .filter(|&i| {
                    bp.partitions()[i]
                        .blocks()
                        .iter()
                        .any(|&(lo, hi)| lo <= shape.pos_s && hi >= shape.pos_s + k)
                })
                .collect();
            if sub.is_empty() {
                continue;
            }
            let sub_poset = bp.poset().induced(&sub)?;
            if sub_poset.initial().is_none() {
                return verdict_of(false, String::new(), format!("merged part of {w:?} has no least element"));
            }
            let mut l = Vec::new();
            for i in 0..bp.partitions().len() {
                let u = bp.partitions()[i].union_with_range(shape.pos_s, shape.pos_s + k);
                let Some(gi) = bp.index_of(&u) else {
                    return verdict_of(false, String::new(), format!("union leaves the admissible poset at {w:?}"));
                };
                let Some(li) = sub.iter().position(|&x| x == gi) else {
                    return verdict_of(false, String::new(), format!("union misses the merged part at {w:?}"));
                };
                l.push(li);
            }
            if !check_adjunction_posets(bp.poset(), &sub_poset, &l, &sub)? {
                return verdict_of(false, String::new(), format!("gap-run union not adjoint at {w:?}"));
            }
            checked += 1;
        }
    }
    pass(format!("{checked} slice words verified"))
}

/// Splitting before the first crossing and re-merging the qualifying blocks
/// reflects the comma poset onto its admissible part.
fn splitting_reflection_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut checked = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        for &i in &strata.slice_set(sys, d)? {
            let w = poset.object(i).clone();
            let shape = slice_shape(sys, &w, pat)?;
            let bmin = bmin_of(sys, &w, pat)?;
            let n = w.len();
            let mut comma_part = Vec::new();
            let mut admissible = Vec::new();
            for mask in 0..(1usize << (n - 1)) {
                let p = BlockPartition::from_mask(n, mask);
                if words::partition_maps_below(sys, &w, pat, shape, bmin, &p)? {
                    comma_part.push(p.clone());
                }
                if words::partition_admissible(sys, &w, pat, shape, bmin, &p)? {
                    admissible.push(p);
                }
            }
            let both: Vec<&BlockPartition> =
                comma_part.iter().filter(|p| admissible.contains(p)).collect();
            for q in &comma_part {
                // split right before the first crossing, then fully split
                // every non-qualifying block
                let mut merged = q.merged().to_vec();
                if shape.pos_s > 0 {
                    merged[shape.pos_s - 1] = false;
                }
                let mut split_mask = 0usize;
                for (k, &m) in merged.iter().enumerate() {
                    if m {
                        split_mask |= 1 << k;
                    }
                }
                let split = BlockPartition::from_mask(n, split_mask);
                let mut rq = BlockPartition::discrete(n);
                for (lo, hi) in split.blocks() {
                    if lo < hi && qualifies(sys, &w, pat, shape, bmin, lo, hi)? {
                        rq = rq.union_with_range(lo, hi);
                    }
                }
                if !admissible.contains(&rq) {
                    return verdict_of(false, String::new(), format!("reflection of {q:?} not admissible at {w:?}"));
                }
                if !rq.refines(q) {
                    return verdict_of(false, String::new(), format!("reflection of {q:?} does not refine it"));
                }
                for p in &both {
                    if p.refines(q) != p.refines(&rq) {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("reflection changes maps out of {p:?} at {w:?}"),
                        );
                    }
                }
                checked += 1;
            }
        }
    }
    pass(format!("{checked} partitions reflect onto the admissible part"))
}

/// Fixed affine instance: a pattern whose middle segment has full support.
/// The word has exactly one crossing configuration and the regrouped
/// two-block poset matches the direct one under pullback.
fn affine_pattern(sys: &CoxeterSystem, max_objects: usize) -> Result<(BraidElement, words::DeletionPattern)> {
    let b = artin::from_letter_word(sys, &[2, 1, 2, 0, 1, 0]);
    let pats = enumerate_deletion_patterns(sys, &b, max_objects)?;
    let w2 = sys.from_word(&[1, 2, 0, 1]);
    pats.into_iter()
        .find(|p| p.w1().is_identity() && p.s() == 2 && *p.w2() == w2 && p.t() == 0)
        .ok_or_else(|| Error::HypothesisFailed("expected affine pattern missing".into()))
        .map(|p| (b, p))
}

fn affine_regroup_check(sys: &CoxeterSystem, max_objects: usize) -> Result<(Verdict, String)> {
    let (_, pat) = affine_pattern(sys, max_objects)?;
    let letters: Vec<BraidElement> =
        [2u8, 1, 2, 0, 1, 0].iter().map(|&g| artin::from_letter_word(sys, &[g])).collect();
    let w = Factorization::new(sys, letters)?;
    let (y, z) = functor_f(sys, &w, &pat)?;
    if !z.is_empty() {
        return verdict_of(false, String::new(), "expected an empty tail segment".to_string());
    }
    let bp1 = words::block_poset(sys, &w, &pat, max_objects)?;
    let bp2 = block2_poset(sys, &pat, &y, &z, max_objects)?;
    if bp1.partitions().len() != bp2.partitions().len() {
        return verdict_of(
            false,
            String::new(),
            format!("{} direct vs {} regrouped partitions", bp1.partitions().len(), bp2.partitions().len()),
        );
    }
    let combined = bp2.word().clone();
    let mut map = Vec::new();
    for q in bp2.partitions() {
        let pulled = pullback_partition(sys, &w, &combined, q)?;
        let Some(i) = bp1.index_of(&pulled) else {
            return verdict_of(false, String::new(), "pullback leaves the admissible poset".to_string());
        };
        map.push(i);
    }
    if !check_poset_iso(bp2.poset(), bp1.poset(), &map) {
        return verdict_of(false, String::new(), "pullback is not an isomorphism".to_string());
    }
    if !certify_contractible_poset(bp1.poset(), 3).proves_contractible() {
        return verdict_of(false, String::new(), "admissible poset not certified contractible".to_string());
    }
    pass(format!("{} partitions match under pullback", bp1.partitions().len()))
}

fn affine_first_gap_check(sys: &CoxeterSystem, max_objects: usize) -> Result<(Verdict, String)> {
    let (_, pat) = affine_pattern(sys, max_objects)?;
    let y = Factorization::new(
        sys,
        vec![artin::from_letter_word(sys, &[1, 2]), artin::from_letter_word(sys, &[0, 1])],
    )?;
    let z = Factorization::new(sys, Vec::new())?;
    let bp = block2_poset(sys, &pat, &y, &z, max_objects)?;
    for p in bp.partitions() {
        for (lo, hi) in p.blocks() {
            if lo < hi && lo == 1 {
                return verdict_of(false, String::new(), "a nontrivial block splits the first crossing pair".to_string());
            }
        }
    }
    let sub: Vec<usize> = (0..bp.partitions().len())
        .filter(|&i| bp.partitions()[i].merged()[0])
        .collect();
    let sub_poset = bp.poset().induced(&sub)?;
    if sub_poset.initial().is_none() {
        return verdict_of(false, String::new(), "merged part has no least element".to_string());
    }
    let mut l = Vec::new();
    for i in 0..bp.partitions().len() {
        let u = bp.partitions()[i].union_with_range(0, 1);
        let Some(gi) = bp.index_of(&u) else {
            return verdict_of(false, String::new(), "union leaves the admissible poset".to_string());
        };
        let Some(li) = sub.iter().position(|&x| x == gi) else {
            return verdict_of(false, String::new(), "union misses the merged part".to_string());
        };
        l.push(li);
    }
    verdict_of(
        check_adjunction_posets(bp.poset(), &sub_poset, &l, &sub)?,
        format!("first-block union adjoint on {} partitions", bp.partitions().len()),
        "first-block union not adjoint".to_string(),
    )
}

// ---------------------------------------------------------------------------
// gap-posets

fn suite_gap_posets(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let braids = match braids_up_to(cx.sys, cx.bg.max_braid_len) {
        Ok(b) => b,
        Err(e) => {
            cx.push("enumerate".to_string(), Err(e));
            return;
        }
    };
    for (id, b) in braids.iter().filter(|(_, b)| !b.is_reduced()) {
        let patterns = match enumerate_deletion_patterns(cx.sys, b, cx.bg.max_objects) {
            Ok(p) => p,
            Err(e) => {
                cx.push(format!("b{id}/patterns"), Err(e));
                continue;
            }
        };
        for (pi, pat) in patterns.iter().enumerate() {
            if !cx.go(keep) {
                return;
            }
            let seed = cx.rand();
            cx.push(
                format!("b{id}/p{pi}/gap-fibers"),
                gap_fiber_check(cx.sys, pat, cx.bg.max_objects, seed),
            );
            // first-letter retract, when the slice middle admits one
            let sw2 = match cx.sys.gen_mul(pat.s(), pat.w2()) {
                Ok(v) => v,
                Err(e) => {
                    cx.push(format!("b{id}/p{pi}/first-letter"), Err(e));
                    continue;
                }
            };
            match word_s_1f(cx.sys, pat.s(), &sw2, cx.bg.max_objects) {
                Ok(s1f) => {
                    if !cx.go(keep) {
                        return;
                    }
                    let seed = cx.rand();
                    let r = (|| {
                        if s1f.poset().terminal().is_none() {
                            return verdict_of(false, String::new(), "fixed-first-letter poset has no terminal object".to_string());
                        }
                        let cert = certify_contractible_poset(s1f.poset(), seed);
                        Ok(cert_outcome(&cert, &format!("{} objects", s1f.n())))
                    })();
                    cx.push(format!("b{id}/p{pi}/first-letter"), r);
                }
                Err(Error::HypothesisFailed(_)) => {}
                Err(e) => cx.push(format!("b{id}/p{pi}/first-letter"), Err(e)),
            }
        }
        if !cx.go(keep) {
            return;
        }
        cx.push(format!("b{id}/regroup-functorial"), regroup_functorial_check(cx.sys, b, cx.bg.max_objects));
    }
    if cx.sys.matrix() == CoxeterMatrix::preset("A2~").as_ref().expect("preset") {
        if !cx.go(keep) {
            return;
        }
        let seed = cx.rand();
        cx.push("affine-gap-fibers".to_string(), affine_gap_fiber_check(cx.sys, cx.bg.max_objects, seed));
    }
}

/// The single-gap embedding has contractible fibers under every object, and
/// both the gap poset and its single-gap part are contractible.
fn gap_fiber_check(
    sys: &CoxeterSystem,
    pat: &words::DeletionPattern,
    max_objects: usize,
    seed: u64,
) -> Result<(Verdict, String)> {
    let gap = gap_posets(sys, pat, max_objects)?;
    if gap.n() == 0 {
        return pass("no gap objects for this pattern".to_string());
    }
    let mut weakest: Option<Certificate> = None;
    let mut note = |cert: Certificate| {
        let rank = |c: &Certificate| match c {
            Certificate::Cone { .. } => 0,
            Certificate::Collapsible { .. } => 1,
            Certificate::ZAcyclic => 2,
            Certificate::Unknown => 3,
            Certificate::NotContractible { .. } => 4,
        };
        if weakest.as_ref().map(|w| rank(&cert) > rank(w)).unwrap_or(true) {
            weakest = Some(cert);
        }
    };
    for j in 0..gap.n() {
        let fiber: Vec<usize> = gap
            .onef_indices()
            .into_iter()
            .filter(|&i| gap.poset().leq(i, j))
            .collect();
        let fp = gap.poset().induced(&fiber)?;
        note(certify_contractible_poset(&fp, seed));
    }
    note(certify_contractible_poset(gap.poset(), seed));
    note(certify_contractible_poset(&gap.onef_poset()?, seed));
    let weakest = weakest.expect("at least one certificate");
    Ok(cert_outcome(&weakest, &format!("{} gap objects, all fibers", gap.n())))
}

fn affine_gap_fiber_check(sys: &CoxeterSystem, max_objects: usize, seed: u64) -> Result<(Verdict, String)> {
    let (_, pat) = affine_pattern(sys, max_objects)?;
    let gap = gap_posets(sys, &pat, max_objects)?;
    if gap.n() != 4 {
        return verdict_of(false, String::new(), format!("expected 4 gap objects, found {}", gap.n()));
    }
    let fact = |letters: &[&[Gen]]| -> Result<Factorization> {
        Factorization::new(
            sys,
            letters.iter().map(|w| artin::from_letter_word(sys, w)).collect(),
        )
    };
    let expect = [
        (fact(&[&[1, 2, 0, 1]])?, false),
        (fact(&[&[1, 2], &[0, 1]])?, true),
        (fact(&[&[1, 2, 0], &[1]])?, false),
        (fact(&[&[1, 2], &[0], &[1]])?, true),
    ];
    for (f, onef) in &expect {
        let Some(i) = gap.index_of(f) else {
            return verdict_of(false, String::new(), format!("expected gap object {f:?} missing"));
        };
        if gap.in_onef(i) != *onef {
            return verdict_of(false, String::new(), format!("single-gap flag wrong for {f:?}"));
        }
    }
    gap_fiber_check(sys, &pat, max_objects, seed)
}

/// Regrouping a slice word around its pattern is monotone in the refinement
/// order on both output segments.
fn regroup_functorial_check(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_objects: usize,
) -> Result<(Verdict, String)> {
    let strata = compute_strata(sys, b, max_objects)?;
    let poset = strata.poset();
    let mut checked = 0;
    for d in 1..=strata.depth() {
        let pat = &strata.patterns()[d - 1];
        let slice = strata.slice_set(sys, d)?;
        let mut regrouped = Vec::new();
        for &i in &slice {
            let w = poset.object(i);
            match functor_f(sys, w, pat) {
                Ok(pair) => regrouped.push((i, pair)),
                Err(Error::NoGapIndex) => {}
                Err(e) => return Err(e),
            }
        }
        for (i, (fy, fz)) in &regrouped {
            for (j, (cy, cz)) in &regrouped {
                if !poset.leq(*i, *j) {
                    continue;
                }
                if !refines(sys, fy, cy)? || !refines(sys, fz, cz)? {
                    return verdict_of(
                        false,
                        String::new(),
                        format!("regrouping not monotone from {:?} to {:?}", poset.object(*i), poset.object(*j)),
                    );
                }
                checked += 1;
            }
        }
    }
    pass(format!("{checked} comparable slice-word pairs regroup monotonically"))
}

// ---------------------------------------------------------------------------
// bistratified

fn suite_bistratified(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let sys = cx.sys;
    let rank_cap = cx.bg.max_braid_len.min(4);
    let letter_cap = cx.bg.max_letters.min(5);
    if !cx.go(keep) {
        return;
    }
    let trunc = match schubert::build_window(sys, rank_cap, letter_cap, cx.bg.max_objects) {
        Ok(t) => {
            cx.push(
                "window".to_string(),
                pass(format!(
                    "{} objects in {} rank classes (rank length <= {rank_cap}, letters <= {letter_cap})",
                    t.n(),
                    t.class_count()
                )),
            );
            t
        }
        Err(e) => {
            cx.push("window".to_string(), Err(e));
            return;
        }
    };

    for c in 0..trunc.class_count() {
        let label = braid_id(trunc.rank_value(c));
        if !cx.go(keep) {
            return;
        }
        let r = level_class_check(sys, &trunc, c, cx.bg);
        cx.push(format!("cls{label}/level-closure"), r);
        if !cx.go(keep) {
            return;
        }
        let (r, nonbasic) = basic_criterion_check(sys, &trunc, c, cx.bg);
        cx.push(format!("cls{label}/basic-criterion"), r);

        if !nonbasic.is_empty() {
            if !cx.go(keep) {
                return;
            }
            // sample up to two nonbasic maps for the full reflection; the
            // seeded draw is restricted to maps between short objects, since
            // factorization categories over long objects run to tens of
            // thousands of morphisms and the adjunction audit re-walks them
            let mut pool: Vec<usize> = (0..nonbasic.len()).collect();
            pool.sort_by_key(|&k| {
                trunc.object(nonbasic[k].0).n_letters() + trunc.object(nonbasic[k].1).n_letters()
            });
            pool.truncate(8);
            let mut picks = Vec::new();
            while picks.len() < 2 && !pool.is_empty() {
                let k = (cx.rand() % pool.len() as u64) as usize;
                picks.push(pool.swap_remove(k));
            }
            let r = (|| {
                let mut details = Vec::new();
                for &k in &picks {
                    let (i, j, ref map) = nonbasic[k];
                    let fd = schubert::fact_category(
                        sys,
                        &trunc,
                        i,
                        j,
                        map,
                        cx.bg.max_objects.min(1_500),
                        cx.bg.max_morphisms.min(20_000),
                    )?;
                    if fd.objects.is_empty() {
                        return verdict_of(false, String::new(), "nonbasic map with empty factorization category".to_string());
                    }
                    if !fd.reduction_ok {
                        return verdict_of(false, String::new(), "reduction onto identity-backed middles not adjoint".to_string());
                    }
                    let fr = schubert::fact_reduced_poset(
                        sys,
                        trunc.object(i),
                        trunc.object(j),
                        map,
                        cx.bg.max_objects,
                    )?;
                    if fd.reduced_ids.len() != fr.middles.len() {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("{} identity-backed objects vs {} reduced middles", fd.reduced_ids.len(), fr.middles.len()),
                        );
                    }
                    details.push(format!("{} objects", fd.objects.len()));
                }
                pass(format!("{} sampled reflections: {}", picks.len(), details.join(", ")))
            })();
            cx.push(format!("cls{label}/fact-reflection"), r);
        }
    }

    // a smaller window whose category fits in memory, for the global checks
    if !cx.go(keep) {
        return;
    }
    let r = (|| {
        let small = schubert::build_window(sys, rank_cap.min(2), letter_cap.min(4), cx.bg.max_objects)?;
        let tc = small.category(sys, cx.bg.max_morphisms)?;
        if !schubert::check_demazure_monotone(sys, &small, &tc)? {
            return verdict_of(false, String::new(), "group image not monotone along a morphism".to_string());
        }
        if !schubert::check_unique_weak_factorization(sys, &small, &tc)? {
            return verdict_of(false, String::new(), "weak factorization missing or not unique".to_string());
        }
        pass(format!(
            "{} objects, {} morphisms: image monotone, exactly one downward-upward factorization each",
            small.n(),
            tc.cat.n_mor()
        ))
    })();
    cx.push("small-window-factorization".to_string(), r);
}

/// Basic level maps of one rank class compose (building the category checks
/// closure), deleting identity letters is adjoint to the inclusion of plain
/// objects, and the plain part is the reduced-word poset of the rank braid.
fn level_class_check(
    sys: &CoxeterSystem,
    trunc: &schubert::Truncation,
    c: usize,
    bg: &Budgets,
) -> Result<(Verdict, String)> {
    let ld = schubert::level_category(sys, trunc, c, bg.max_morphisms)?;
    if !ld.adjunction_ok {
        return verdict_of(false, String::new(), "identity-deletion not right adjoint to the plain inclusion".to_string());
    }
    if !schubert::check_basic_closure(sys, trunc, &ld)? {
        return verdict_of(false, String::new(), "composite of basic maps fails the basic criterion".to_string());
    }
    let wp = word_poset(sys, trunc.rank_value(c), WordFilter::FiniteReduced, bg.max_objects)?;
    let plain_poset = ld.plain_cat.as_poset()?;
    if plain_poset.n() != wp.n() {
        return verdict_of(
            false,
            String::new(),
            format!("{} plain objects vs {} reduced words", plain_poset.n(), wp.n()),
        );
    }
    let mut map = Vec::new();
    for &lp in &ld.plain_ids {
        let obj = trunc.object(ld.objects[lp]);
        let letters: Vec<BraidElement> = obj.letters().iter().map(|g| artin::lift(sys, g)).collect();
        let f = Factorization::new(sys, letters)?;
        let Some(i) = wp.index_of(&f) else {
            return verdict_of(false, String::new(), format!("plain object {obj:?} is not a reduced word"));
        };
        map.push(i);
    }
    if !check_poset_iso(&plain_poset, &wp.fin_poset()?, &map) {
        return verdict_of(false, String::new(), "plain part does not match the reduced-word poset".to_string());
    }
    pass(format!(
        "{} objects, {} basic arrows, plain part matches {} reduced words",
        ld.objects.len(),
        ld.arrows.len(),
        wp.n()
    ))
}

/// Sweep every level map of a class: the letterwise basic criterion agrees
/// with rank preservation under collapse and with emptiness of the reduced
/// factorization poset, and every nonbasic map's reduced poset has its
/// collapse as least element.
fn basic_criterion_check(
    sys: &CoxeterSystem,
    trunc: &schubert::Truncation,
    c: usize,
    bg: &Budgets,
) -> (Result<(Verdict, String)>, Vec<(usize, usize, Vec<usize>)>) {
    let mut nonbasic = Vec::new();
    let r = (|| {
        let members = trunc.class_members(c).to_vec();
        let mut level_maps = 0;
        let mut basics = 0;
        for &i in &members {
            for &j in &members {
                for map in trunc.morphism_maps(sys, i, j)? {
                    level_maps += 1;
                    let basic = schubert::is_basic_level_map(sys, trunc.object(i), trunc.object(j), &map)?;
                    let preserves = schubert::collapse_preserves_rank(sys, trunc.object(i), trunc.object(j), &map)?;
                    let class = schubert::classify_morphism(sys, trunc.object(i), trunc.object(j), &map)?;
                    let class_says_basic = matches!(class, MorphismClass::LevelBasic);
                    let fr = schubert::fact_reduced_poset(sys, trunc.object(i), trunc.object(j), &map, bg.max_objects)?;
                    if basic != preserves || basic != class_says_basic || basic != fr.middles.is_empty() {
                        return verdict_of(
                            false,
                            String::new(),
                            format!("basic criteria disagree on map {map:?}: criterion {basic}, collapse {preserves}, reduced-middles {}", fr.middles.len()),
                        );
                    }
                    if basic {
                        basics += 1;
                    } else {
                        match (fr.bottom, fr.poset.initial()) {
                            (Some(b0), Some(i0)) if b0 == i0 => {}
                            other => {
                                return verdict_of(
                                    false,
                                    String::new(),
                                    format!("collapse is not the least reduced middle: {other:?}"),
                                )
                            }
                        }
                        nonbasic.push((i, j, map));
                    }
                }
            }
        }
        pass(format!(
            "{level_maps} level maps: {basics} basic, {} with contractible reduced factorizations",
            level_maps - basics
        ))
    })();
    (r, nonbasic)
}

// ---------------------------------------------------------------------------
// down-contractible

fn suite_down_contractible(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let braids = match braids_up_to(cx.sys, cx.bg.max_braid_len) {
        Ok(b) => b,
        Err(e) => {
            cx.push("enumerate".to_string(), Err(e));
            return;
        }
    };
    // the ambient comma categories grow fast with braid length, and their
    // construction audits associativity in full, so keep them short
    let adj_cap = cx.bg.max_braid_len.min(3);
    for (id, b) in &braids {
        let sys = cx.sys;
        if b.is_reduced() {
            if !cx.go(keep) {
                return;
            }
            let r = (|| {
                let pm = schubert::pair_model(sys, b, cx.bg.max_objects)?;
                let fnw = enumerate_words(sys, b, WordFilter::FiniteNonreduced, cx.bg.max_objects)?;
                verdict_of(
                    pm.pairs.is_empty() && fnw.is_empty(),
                    "reduced braid: no marked pairs, no nonreduced words".to_string(),
                    format!("{} pairs, {} nonreduced words for a reduced braid", pm.pairs.len(), fnw.len()),
                )
            })();
            cx.push(format!("b{id}/reduced-empty"), r);
            continue;
        }
        if !cx.go(keep) {
            return;
        }
        let seed = cx.rand();
        let r = (|| {
            let pm = schubert::pair_model(sys, b, cx.bg.max_objects)?;
            if pm.pairs.is_empty() {
                return verdict_of(false, String::new(), "no marked pairs for a nonreduced braid".to_string());
            }
            let wp = word_poset(sys, b, WordFilter::Finite, cx.bg.max_objects)?;
            if !schubert::check_pairs_match_words_comma(sys, &pm, &wp)? {
                return verdict_of(false, String::new(), "pair model does not match the word-poset comma".to_string());
            }
            let cert = certify_contractible_poset(&pm.poset, seed);
            Ok(cert_outcome(&cert, &format!("{} pairs match the comma", pm.pairs.len())))
        })();
        cx.push(format!("b{id}/pair-comma"), r);

        if b.len() <= adj_cap {
            if !cx.go(keep) {
                return;
            }
            let r = (|| {
                let letters = cx.bg.max_letters.min(b.len().max(1));
                let trunc = schubert::build_truncation(sys, b, letters, cx.bg.max_objects)?;
                let down = schubert::down_comma(
                    sys,
                    &trunc,
                    b,
                    cx.bg.max_objects.min(1_500),
                    cx.bg.max_morphisms.min(4_000),
                )?;
                if !down.adjunction_ok {
                    return verdict_of(false, String::new(), "primed reflection not adjoint to the inclusion".to_string());
                }
                let pm = schubert::pair_model(sys, b, cx.bg.max_objects)?;
                if !schubert::check_pairs_match_primed(sys, &trunc, &down, &pm)? {
                    return verdict_of(false, String::new(), "primed part does not match the pair model".to_string());
                }
                pass(format!(
                    "{} comma objects reflect onto {} primed ones matching the pair model",
                    down.objects.len(),
                    down.primed_ids.len()
                ))
            })();
            cx.push(format!("b{id}/comma-reflection"), r);
        }
    }
}

// ---------------------------------------------------------------------------
// suspend

fn suite_suspend(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let cap = if cx.sys.rank() <= 2 {
        cx.bg.max_braid_len.min(6)
    } else {
        cx.bg.max_braid_len.min(4)
    };
    let braids = match braids_up_to(cx.sys, cap) {
        Ok(b) => b,
        Err(e) => {
            cx.push("enumerate".to_string(), Err(e));
            return;
        }
    };
    let mut first_split: Option<(FinCategory, Vec<usize>, Vec<usize>)> = None;
    for (id, b) in braids.iter().filter(|(_, b)| !b.is_reduced()) {
        let sys = cx.sys;
        let strata = match compute_strata(sys, b, cx.bg.max_objects) {
            Ok(s) => s,
            Err(e) => {
                cx.push(format!("b{id}/strata"), Err(e));
                continue;
            }
        };
        for d in 1..=strata.depth() {
            if !cx.go(keep) {
                return;
            }
            let r = (|| {
                let le = strata.le_set(d)?;
                let lp = strata.le_poset(d)?;
                let c = FinCategory::from_poset(&lp);
                let local = |set: Vec<usize>| -> Vec<usize> {
                    set.into_iter()
                        .map(|g| le.iter().position(|&x| x == g).expect("level member"))
                        .collect()
                };
                let objs0 = local(strata.fr_set(d)?);
                let objs1 = local(strata.lt_set(d)?);
                let ok = pushout_check(&c, &objs0, &objs1)?;
                if ok && first_split.is_none() && !objs0.is_empty() && !objs1.is_empty() {
                    first_split = Some((c, objs0.clone(), objs1.clone()));
                }
                verdict_of(
                    ok,
                    format!(
                        "level {d}: nerve of {} objects matches the cylinder over the {}/{} split",
                        le.len(),
                        objs0.len(),
                        objs1.len()
                    ),
                    format!("level {d}: nerve homology differs from the glued cylinder"),
                )
            })();
            cx.push(format!("b{id}/split-d{d}"), r);
        }
    }

    for i in 0..20 {
        if !cx.go(keep) {
            return;
        }
        let mut rng = cx.rand();
        let r = (|| {
            let n = 4 + (topo::splitmix64(&mut rng) % 4) as usize;
            let mut pairs = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if topo::splitmix64(&mut rng) % 2 == 0 {
                        pairs.push((a, b));
                    }
                }
            }
            let p = FinPoset::from_relation(n, &pairs, (0..n).map(|i| format!("{i}")).collect())?;
            // an upward-closed part gives a valid split
            let pick = (topo::splitmix64(&mut rng) % n as u64) as usize;
            let objs1: Vec<usize> = (0..n).filter(|&j| p.leq(pick, j)).collect();
            let objs0: Vec<usize> = (0..n).filter(|&j| !p.leq(pick, j)).collect();
            let c = FinCategory::from_poset(&p);
            verdict_of(
                pushout_check(&c, &objs0, &objs1)?,
                format!("{n}-object poset, upward-closed part of size {}", objs1.len()),
                "nerve homology differs from the glued cylinder".to_string(),
            )
        })();
        cx.push(format!("random{i}"), r);
    }

    if !cx.go(keep) {
        return;
    }
    let r = (|| {
        // canonical corrupted instance: a single arrow with its comma object
        // dropped must be detected
        let p = FinPoset::chain(2);
        let c = FinCategory::from_poset(&p);
        let (inc0, c0) = inclusion_functor(&c, &[0])?;
        let (inc1, c1) = inclusion_functor(&c, &[1])?;
        let k = comma(&inc0, &c0, &inc1, &c1, &c)?;
        if k.cat.n_obj() != 1 {
            return verdict_of(false, String::new(), format!("expected one comma object, found {}", k.cat.n_obj()));
        }
        let honest = pushout_check(&c, &[0], &[1])?;
        let broken = k.restrict(&[])?;
        let h_total = homology(&nerve_loopfree(&c)?)?;
        let h_broken = mapping_cone_homology(&broken, &c0, &c1)?;
        let detected = !profiles_equal(&h_total, &h_broken);
        verdict_of(
            honest && detected,
            "dropping the comma object changes the cylinder homology".to_string(),
            format!("honest split {honest}, corruption detected {detected}"),
        )
    })();
    cx.push("mutation-arrow".to_string(), r);

    if let Some((c, objs0, objs1)) = first_split {
        if !cx.go(keep) {
            return;
        }
        let r = (|| {
            let (inc0, c0) = inclusion_functor(&c, &objs0)?;
            let (inc1, c1) = inclusion_functor(&c, &objs1)?;
            let k = comma(&inc0, &c0, &inc1, &c1, &c)?;
            let m = k.cat.n_obj();
            if m == 0 {
                return pass("split has an empty comma; nothing to corrupt".to_string());
            }
            let kept: Vec<usize> = (0..m - 1).collect();
            let broken = k.restrict(&kept)?;
            let h_total = homology(&nerve_loopfree(&c)?)?;
            let h_broken = mapping_cone_homology(&broken, &c0, &c1)?;
            verdict_of(
                !profiles_equal(&h_total, &h_broken),
                format!("dropping one of {m} comma objects changes the cylinder homology"),
                format!("dropping one of {m} comma objects went undetected"),
            )
        })();
        cx.push("mutation-stratification".to_string(), r);
    }
}

// ---------------------------------------------------------------------------
// bis-p0

fn suite_bis_p0(cx: &mut Cx, keep: &mut dyn FnMut() -> bool) {
    let sys = cx.sys;
    let rank_cap = cx.bg.max_braid_len.min(3);
    let letter_cap = cx.bg.max_letters.min(2);
    if !cx.go(keep) {
        return;
    }
    let (trunc, tc) = match (|| {
        let t = schubert::build_window(sys, rank_cap, letter_cap, cx.bg.max_objects)?;
        let tc = t.category(sys, cx.bg.max_morphisms)?;
        Ok::<_, Error>((t, tc))
    })() {
        Ok(v) => v,
        Err(e) => {
            cx.push("window".to_string(), Err(e));
            return;
        }
    };
    cx.push(
        "window".to_string(),
        pass(format!(
            "{} objects, {} morphisms (rank length <= {rank_cap}, letters <= {letter_cap})",
            trunc.n(),
            tc.cat.n_mor()
        )),
    );

    // non-identity arrows with their cheap basic flags
    let mut arrows = Vec::new();
    let mut by_src: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (f, (s, t, map)) in tc.morphisms.iter().enumerate() {
        if *s == *t && schubert::identity_map(trunc.object(*s).n_letters()) == *map {
            continue;
        }
        let level = trunc.object_class(*s) == trunc.object_class(*t);
        let basic = if level {
            match schubert::is_basic_level_map(sys, trunc.object(*s), trunc.object(*t), map) {
                Ok(v) => v,
                Err(e) => {
                    cx.push("window".to_string(), Err(e));
                    return;
                }
            }
        } else {
            true
        };
        by_src.entry(*s).or_default().push(arrows.len());
        arrows.push((f, *s, *t, map.clone(), basic));
    }

    for chain_len in 1..=4usize {
        if !cx.go(keep) {
            return;
        }
        let r = (|| {
            let mut checked = 0u64;
            let mut excluded = 0u64;
            let mut stack: Vec<Vec<usize>> = arrows.iter().enumerate().map(|(k, _)| vec![k]).collect();
            for _ in 1..chain_len {
                let mut next = Vec::new();
                for chain in &stack {
                    let (_, _, tgt, _, _) = arrows[*chain.last().expect("nonempty")];
                    if let Some(outs) = by_src.get(&tgt) {
                        for &k in outs {
                            let mut c2 = chain.clone();
                            c2.push(k);
                            next.push(c2);
                        }
                    }
                }
                stack = next;
            }
            for chain in &stack {
                let objs: Vec<usize> = {
                    let mut o = vec![arrows[chain[0]].1];
                    o.extend(chain.iter().map(|&k| arrows[k].2));
                    o
                };
                let classes: Vec<u64> = objs.iter().map(|&o| trunc.object_class(o) as u64).collect();
                let beta = *classes.iter().max().expect("nonempty");
                let steps: Vec<RankedStep> = chain
                    .iter()
                    .map(|&k| RankedStep {
                        src_rank: trunc.object_class(arrows[k].1) as u64,
                        tgt_rank: trunc.object_class(arrows[k].2) as u64,
                        basic: arrows[k].4,
                    })
                    .collect();
                // a nonbasic step at the top rank leaves the allowed class
                let has_forbidden = chain.iter().any(|&k| {
                    let (_, s, t, _, basic) = &arrows[k];
                    trunc.object_class(*s) as u64 == beta
                        && trunc.object_class(*t) as u64 == beta
                        && !*basic
                });
                match topo::strong_composability(&steps, beta) {
                    Err(Error::ForbiddenEdge) => {
                        if !has_forbidden {
                            return verdict_of(false, String::new(), "edge rejected although every top-rank step is basic".to_string());
                        }
                        excluded += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                    Ok((ok, transitions)) => {
                        if has_forbidden {
                            return verdict_of(false, String::new(), "nonbasic top-rank step accepted".to_string());
                        }
                        // manual transition recount
                        let manual: Vec<usize> = (0..chain.len())
                            .filter(|&t| (classes[t] == beta) != (classes[t + 1] == beta))
                            .collect();
                        if manual != transitions {
                            return verdict_of(false, String::new(), format!("transition set {transitions:?} vs manual {manual:?}"));
                        }
                        // brute force: every consecutive composite must stay
                        // inside the allowed class
                        let mut expect = true;
                        'outer: for i in 0..chain.len() {
                            let mut m = arrows[chain[i]].3.clone();
                            for j in (i + 1)..chain.len() {
                                m = schubert::compose_maps(&m, &arrows[chain[j]].3);
                                if classes[i] == beta && classes[j + 1] == beta {
                                    let src = trunc.object(objs[i]);
                                    let tgt = trunc.object(objs[j + 1]);
                                    if !schubert::is_basic_level_map(sys, src, tgt, &m)? {
                                        expect = false;
                                        break 'outer;
                                    }
                                }
                            }
                        }
                        if ok != expect {
                            return verdict_of(
                                false,
                                String::new(),
                                format!("transition rule says {ok}, composite check says {expect}"),
                            );
                        }
                        // above the top rank there is nothing to cross
                        let (ok_above, tr_above) = topo::strong_composability(&steps, beta + 1)?;
                        if !ok_above || !tr_above.is_empty() {
                            return verdict_of(false, String::new(), "spurious transitions above the top rank".to_string());
                        }
                        checked += 1;
                    }
                }
            }
            pass(format!("{checked} chains agree with the composite check, {excluded} correctly rejected"))
        })();
        cx.push(format!("chains-len{chain_len}"), r);
    }

    if !cx.go(keep) {
        return;
    }
    let r = (|| {
        // explicit dip: top, down, back to top must fail
        let s = sys.gen(0);
        let ss = ConvObject::new(sys, vec![s.clone(), s.clone()])?;
        let single = ConvObject::new(sys, vec![s.clone()])?;
        let (Some(i_ss), Some(i_s)) = (trunc.index_of(&ss), trunc.index_of(&single)) else {
            return verdict_of(false, String::new(), "dip objects missing from the window".to_string());
        };
        let c_top = trunc.object_class(i_ss) as u64;
        let c_low = trunc.object_class(i_s) as u64;
        let steps = [
            RankedStep { src_rank: c_top, tgt_rank: c_low, basic: true },
            RankedStep { src_rank: c_low, tgt_rank: c_top, basic: true },
        ];
        let (ok, transitions) = topo::strong_composability(&steps, c_top)?;
        if ok || transitions != vec![0, 1] {
            return verdict_of(false, String::new(), format!("dip accepted: ok {ok}, transitions {transitions:?}"));
        }
        // and the actual composite through the window is a nonbasic level map
        let down = vec![0usize, 0];
        let up = vec![0usize];
        if !schubert::is_morphism(sys, &ss, &single, &down)? || !schubert::is_morphism(sys, &single, &ss, &up)? {
            return verdict_of(false, String::new(), "dip arrows are not morphisms".to_string());
        }
        let composite = schubert::compose_maps(&down, &up);
        verdict_of(
            !schubert::is_basic_level_map(sys, &ss, &ss, &composite)?,
            "round trip through the lower rank composes to a nonbasic level map".to_string(),
            "dip composite unexpectedly basic".to_string(),
        )
    })();
    cx.push("dip-witness".to_string(), r);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(name: &str) -> CoxeterSystem {
        CoxeterSystem::build(CoxeterMatrix::preset(name).expect("preset")).expect("build")
    }

    fn small(name: &str, len: usize, letters: usize) -> (CoxeterSystem, Budgets) {
        let mut bg = Budgets::defaults_for(name);
        bg.max_braid_len = len;
        bg.max_letters = letters;
        (sys(name), bg)
    }

    fn run_one(name: &str, suite: Suite, len: usize, letters: usize) -> SuiteReport {
        let (s, bg) = small(name, len, letters);
        run_suite(&s, suite, &bg, 7, &mut || true)
    }

    fn assert_no_failures(r: &SuiteReport) {
        for i in &r.instances {
            assert_ne!(i.verdict, Verdict::Fail, "{}: {}", i.id, i.detail);
        }
        assert!(!r.instances.is_empty());
    }

    fn assert_all_pass(r: &SuiteReport) {
        for i in &r.instances {
            assert_eq!(i.verdict, Verdict::Pass, "{}: {}", i.id, i.detail);
        }
        assert!(!r.instances.is_empty());
    }

    #[test]
    fn config_parsing_and_defaults() {
        let text = "# sample\nsystem B2\nsuites deletion-property, braid-kernel\nseed 11\nmax-braid-len 4\n";
        let raw = RawConfig::parse(text).unwrap();
        assert_eq!(raw.system.as_deref(), Some("B2"));
        assert_eq!(
            raw.suites.as_deref(),
            Some(&[Suite::BraidKernel, Suite::DeletionProperty][..])
        );
        let cfg = raw.resolve(CoxeterMatrix::preset("B2").unwrap()).unwrap();
        assert_eq!(cfg.budgets.max_braid_len, 4);
        assert_eq!(cfg.budgets.max_letters, 6);
        assert_eq!(cfg.seed, 11);

        assert!(matches!(RawConfig::parse("bogus 3"), Err(Error::ConfigError(_))));
        assert!(matches!(RawConfig::parse("suites nope"), Err(Error::ConfigError(_))));
        assert!(matches!(RawConfig::parse("seed x"), Err(Error::ConfigError(_))));
        assert!(matches!(RawConfig::parse("seed 1\nseed 2"), Err(Error::ConfigError(_))));
        let zero = RawConfig::parse("max-letters 0").unwrap();
        assert!(matches!(
            zero.resolve(CoxeterMatrix::preset("A2").unwrap()),
            Err(Error::ConfigError(_))
        ));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ALL_SUITES {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("nope"), None);
    }

    #[test]
    fn braid_enumeration_is_graded_and_labelled() {
        let s = sys("A2");
        let braids = braids_up_to(&s, 3).unwrap();
        // 2 + 4 + 7 distinct braids of length 1..=3 over two strands
        assert_eq!(braids.len(), 13);
        for (id, b) in &braids {
            assert_eq!(id.len(), b.len());
        }
        assert!(braids.iter().any(|(id, _)| id == "010"));
        assert!(!braids.iter().any(|(id, _)| id == "101"));
        let again = braids_up_to(&s, 3).unwrap();
        assert_eq!(braids, again);
    }

    #[test]
    fn axioms_pass_on_presets() {
        for name in ["A2", "B2", "A1~"] {
            let r = run_one(name, Suite::CoxeterAxioms, 4, 6);
            assert_all_pass(&r);
        }
    }

    #[test]
    fn kernel_suite_passes_small() {
        let r = run_one("A2", Suite::BraidKernel, 3, 6);
        assert_all_pass(&r);
    }

    #[test]
    fn deletion_property_passes_small() {
        for name in ["A2", "A1~"] {
            let r = run_one(name, Suite::DeletionProperty, 5, 6);
            assert_all_pass(&r);
        }
    }

    #[test]
    fn delete_thm_passes_small() {
        let r = run_one("A1~", Suite::DeleteThm, 3, 6);
        assert_no_failures(&r);
        let nonreduced: Vec<_> = r
            .instances
            .iter()
            .filter(|i| i.id.contains("nonreduced"))
            .collect();
        assert!(!nonreduced.is_empty());
    }

    #[test]
    fn strata_suite_passes_small() {
        let r = run_one("A2", Suite::DelpatStrata, 4, 6);
        assert_all_pass(&r);
        // 0010 is the first word of the braid class {0010, 0101, 1011}
        assert!(r.instances.iter().any(|i| i.id == "b0010/slice-product"));
    }

    #[test]
    fn blocks_suite_passes_small() {
        let r = run_one("A2", Suite::Blocks, 4, 6);
        assert_all_pass(&r);
    }

    #[test]
    fn gap_suite_passes_small() {
        let r = run_one("A2", Suite::GapPosets, 4, 6);
        assert_no_failures(&r);
    }

    #[test]
    fn bistratified_suite_passes_small() {
        let r = run_one("A1~", Suite::Bistratified, 3, 4);
        assert_all_pass(&r);
        assert!(r.instances.iter().any(|i| i.id.starts_with("cls0.0/")));
    }

    #[test]
    fn down_contractible_suite_passes_small() {
        let r = run_one("A1~", Suite::DownContractible, 3, 6);
        assert_all_pass(&r);
        assert!(r.instances.iter().any(|i| i.id.ends_with("/comma-reflection")));
        assert!(r.instances.iter().any(|i| i.id.ends_with("/reduced-empty")));
    }

    #[test]
    fn suspend_suite_passes_small() {
        let r = run_one("A2", Suite::Suspend, 4, 6);
        assert_all_pass(&r);
        assert!(r.instances.iter().any(|i| i.id == "mutation-arrow"));
    }

    #[test]
    fn bis_p0_suite_passes_small() {
        let r = run_one("A1~", Suite::BisP0, 3, 2);
        assert_all_pass(&r);
        let dip = r.instances.iter().find(|i| i.id == "dip-witness").unwrap();
        assert_eq!(dip.verdict, Verdict::Pass);
    }

    #[test]
    fn runs_are_deterministic() {
        let raw = RawConfig::parse("system A2\nsuites deletion-property,suspend\nmax-braid-len 3\nseed 5").unwrap();
        let cfg = raw.resolve(CoxeterMatrix::preset("A2").unwrap()).unwrap();
        let a = run(&cfg, &mut || true).unwrap();
        let b = run(&cfg, &mut || true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_counts().1, 0);
    }

    #[test]
    fn deadline_records_a_marker() {
        let (s, bg) = small("A2", 4, 6);
        let mut calls = 0;
        let r = run_suite(&s, Suite::DeletionProperty, &bg, 7, &mut || {
            calls += 1;
            calls <= 1
        });
        assert!(r
            .instances
            .iter()
            .any(|i| i.id == "deletion-property/deadline" && i.verdict == Verdict::Unknown));
    }

    #[test]
    fn report_lookup_and_counts() {
        let r = run_one("A2", Suite::DeletionProperty, 3, 6);
        let report = Report {
            system: "A2".into(),
            seed: 7,
            budgets: Budgets::defaults_for("A2"),
            suites: vec![r],
        };
        let (suite, inst) = report.find("len2").unwrap();
        assert_eq!(suite, Suite::DeletionProperty);
        assert_eq!(inst.verdict, Verdict::Pass);
        assert!(report.find("no-such-id").is_none());
        let (p, f, u) = report.total_counts();
        assert!(p > 0 && f == 0 && u == 0);
    }
}
