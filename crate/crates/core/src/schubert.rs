//! The category of finite-type letter sequences under weakly increasing
//! index maps.
//!
//! An object is a finite sequence of finite-type group elements; identity
//! letters are allowed and the empty sequence is the unit.  A morphism picks
//! a weakly increasing map of letter positions such that every target letter
//! dominates the Demazure product of its fiber in Bruhat order.  Multiplying
//! the reduced lifts of the letters ranks each object by a positive braid,
//! and a total well-order on braids splits the morphisms into increasing,
//! decreasing, and level ones.
//!
//! The module materializes rank-bounded truncations of this category and
//! the reductions used to certify its structure: fiberwise Demazure
//! collapses and factorization categories of level maps, slice and coslice
//! reflections below a fixed object, the comma from a level class down to
//! lower rank, and the block-partition model that matches that comma with
//! refinement posets of braid factorizations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;

use crate::artin::{self, BraidElement};
use crate::coxeter::{CoxeterSystem, Gen, GroupElement};
use crate::topo::{self, FinCategory, FinPoset, Functor};
use crate::words::{self, BlockPartition, Factorization, WordPoset};
use crate::{Error, Result};

/// A finite sequence of finite-type group elements.
#[derive(Clone, PartialEq, Eq)]
pub struct ConvObject {
    letters: Vec<GroupElement>,
}

impl ConvObject {
    pub fn new(sys: &CoxeterSystem, letters: Vec<GroupElement>) -> Result<Self> {
        for l in &letters {
            if !sys.is_finite_type_elt(l) {
                return Err(Error::NotFiniteType);
            }
        }
        Ok(ConvObject { letters })
    }

    pub fn empty() -> Self {
        ConvObject { letters: Vec::new() }
    }

    pub fn n_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[GroupElement] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> &GroupElement {
        &self.letters[i]
    }

    pub fn has_identity_letter(&self) -> bool {
        self.letters.iter().any(|l| l.is_identity())
    }

    /// Positions of the non-identity letters.
    pub fn plain_positions(&self) -> Vec<usize> {
        (0..self.letters.len()).filter(|&i| !self.letters[i].is_identity()).collect()
    }

    /// The subsequence of non-identity letters.
    pub fn strip_identities(&self) -> ConvObject {
        ConvObject {
            letters: self.letters.iter().filter(|l| !l.is_identity()).cloned().collect(),
        }
    }
}

impl PartialOrd for ConvObject {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConvObject {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.letters.len(), &self.letters).cmp(&(other.letters.len(), &other.letters))
    }
}

impl fmt::Debug for ConvObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l:?}")?;
        }
        write!(f, ")")
    }
}

/// The positive braid obtained by multiplying the reduced lifts of the
/// letters.  Identity letters contribute nothing.
pub fn rank(sys: &CoxeterSystem, obj: &ConvObject) -> Result<BraidElement> {
    artin::lift_product(sys, obj.letters())
}

/// Total well-order on rank braids: compare the Demazure images first
/// (length, then reduced word), then braid length, then normal form.
/// Strict Bruhat order strictly increases length, so this order refines
/// Bruhat order on the Demazure images.
pub fn rank_cmp(sys: &CoxeterSystem, a: &BraidElement, b: &BraidElement) -> Ordering {
    let da = artin::demazure(sys, a);
    let db = artin::demazure(sys, b);
    da.cmp(&db).then(a.len().cmp(&b.len())).then_with(|| a.key().cmp(&b.key()))
}

/// Every group element with finite-type support, sorted.  The set is
/// finite for any system: supports range over the finite-type generator
/// subsets, so lengths are bounded by the longest elements of the finite
/// parabolics.
pub fn finite_type_elements(sys: &CoxeterSystem, max_count: usize) -> Result<Vec<GroupElement>> {
    let mut subsets = sys.finite_type_subsets();
    let full: BTreeSet<Gen> = (0..sys.rank() as Gen).collect();
    if sys.is_finite_type(&full) {
        subsets.push(full);
    }
    let mut max_len = 0;
    for t in subsets {
        max_len = max_len.max(sys.longest_element(&t)?.len());
    }
    let mut out: Vec<GroupElement> = sys
        .enumerate_elements(max_len, max_count)?
        .into_iter()
        .filter(|w| sys.is_finite_type_elt(w))
        .collect();
    out.sort();
    Ok(out)
}

fn weakly_increasing(map: &[usize]) -> bool {
    map.windows(2).all(|w| w[0] <= w[1])
}

/// Composite of index maps along composable morphisms: first f, then g.
pub fn compose_maps(f: &[usize], g: &[usize]) -> Vec<usize> {
    f.iter().map(|&k| g[k]).collect()
}

pub fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn is_identity_map(map: &[usize], n_tgt: usize) -> bool {
    map.len() == n_tgt && map.iter().enumerate().all(|(i, &j)| i == j)
}

/// Half-open fiber ranges of a weakly increasing map into n_tgt slots.
fn fiber_ranges(map: &[usize], n_tgt: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_tgt);
    let mut lo = 0;
    for j in 0..n_tgt {
        let mut hi = lo;
        while hi < map.len() && map[hi] == j {
            hi += 1;
        }
        out.push((lo, hi));
        lo = hi;
    }
    out
}

fn check_map_shape(src: &ConvObject, tgt: &ConvObject, map: &[usize]) -> Result<()> {
    if map.len() != src.n_letters() {
        return Err(Error::MalformedInput("index map length".into()));
    }
    if map.iter().any(|&j| j >= tgt.n_letters()) {
        return Err(Error::MalformedInput("index map out of range".into()));
    }
    Ok(())
}

/// Whether the index map is a morphism: weakly increasing, with every
/// target letter dominating the Demazure product of its fiber in Bruhat
/// order.
pub fn is_morphism(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &[usize],
) -> Result<bool> {
    check_map_shape(src, tgt, map)?;
    if !weakly_increasing(map) {
        return Ok(false);
    }
    for (j, (lo, hi)) in fiber_ranges(map, tgt.n_letters()).into_iter().enumerate() {
        let dem = sys.demazure_product(&src.letters()[lo..hi])?;
        if !sys.bruhat_leq(&dem, tgt.letter(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The fiberwise Demazure collapse of a weakly increasing map out of src.
pub fn collapse_object(
    sys: &CoxeterSystem,
    src: &ConvObject,
    map: &[usize],
    n_tgt: usize,
) -> Result<ConvObject> {
    if map.len() != src.n_letters() || !weakly_increasing(map) || map.iter().any(|&j| j >= n_tgt)
    {
        return Err(Error::MalformedInput("collapse of a non-monotone map".into()));
    }
    let mut letters = Vec::with_capacity(n_tgt);
    for (lo, hi) in fiber_ranges(map, n_tgt) {
        letters.push(sys.demazure_product(&src.letters()[lo..hi])?);
    }
    ConvObject::new(sys, letters)
}

/// Letterwise criterion on a level map: every target letter is exactly the
/// Demazure product of its fiber and every fiber is a reduced sequence.
/// When it holds the map is automatically a rank-preserving morphism.
pub fn is_basic_level_map(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &[usize],
) -> Result<bool> {
    check_map_shape(src, tgt, map)?;
    if !weakly_increasing(map) {
        return Err(Error::InvalidMorphism);
    }
    for (j, (lo, hi)) in fiber_ranges(map, tgt.n_letters()).into_iter().enumerate() {
        let fiber = &src.letters()[lo..hi];
        if sys.demazure_product(fiber)? != *tgt.letter(j) {
            return Ok(false);
        }
        let total: usize = fiber.iter().map(|l| l.len()).sum();
        if total != tgt.letter(j).len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A level map is basic exactly when collapsing its fibers keeps the rank;
/// this is the rank-level reading of the letterwise criterion.
pub fn collapse_preserves_rank(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &[usize],
) -> Result<bool> {
    let mid = collapse_object(sys, src, map, tgt.n_letters())?;
    Ok(rank_cmp(sys, &rank(sys, &mid)?, &rank(sys, src)?) == Ordering::Equal)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MorphismClass {
    Increasing,
    Decreasing,
    LevelBasic,
    LevelNonbasic,
}

/// Classifies a valid morphism by the rank order of its endpoints.
pub fn classify_morphism(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &[usize],
) -> Result<MorphismClass> {
    if !is_morphism(sys, src, tgt, map)? {
        return Err(Error::InvalidMorphism);
    }
    let ra = rank(sys, src)?;
    let rb = rank(sys, tgt)?;
    Ok(match rank_cmp(sys, &ra, &rb) {
        Ordering::Less => MorphismClass::Increasing,
        Ordering::Greater => MorphismClass::Decreasing,
        Ordering::Equal => {
            if is_basic_level_map(sys, src, tgt, map)? {
                MorphismClass::LevelBasic
            } else {
                MorphismClass::LevelNonbasic
            }
        }
    })
}

/// All valid index maps from src to tgt, in lexicographic order.  The
/// search closes fibers left to right and prunes on partial fibers: a
/// Demazure product only grows as letters are appended, so a partial fiber
/// already outside its target letter cannot recover.
pub fn enumerate_index_maps(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if src.n_letters() == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    if tgt.n_letters() == 0 {
        return Ok(out);
    }
    let mut map = Vec::with_capacity(src.n_letters());
    let acc = sys.identity();
    extend_map(sys, src, tgt, &mut map, &acc, &mut out)?;
    Ok(out)
}

fn extend_map(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &mut Vec<usize>,
    acc: &GroupElement,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let k = map.len();
    if k == src.n_letters() {
        out.push(map.clone());
        return Ok(());
    }
    let letter = src.letter(k);
    let j_min = map.last().copied().unwrap_or(0);
    for j in j_min..tgt.n_letters() {
        let acc2 = if k > 0 && j == j_min {
            extend_demazure(sys, acc, letter)
        } else {
            letter.clone()
        };
        if sys.bruhat_leq(&acc2, tgt.letter(j))? {
            map.push(j);
            extend_map(sys, src, tgt, map, &acc2, out)?;
            map.pop();
        }
    }
    Ok(())
}

fn extend_demazure(sys: &CoxeterSystem, acc: &GroupElement, letter: &GroupElement) -> GroupElement {
    let mut cur = acc.clone();
    for &s in letter.word() {
        cur = sys.demazure_step(&cur, s);
    }
    cur
}

enum Window<'a> {
    UpTo(&'a BraidElement),
    RankLen(usize),
}

/// A rank-bounded set of objects, grouped into rank classes listed in
/// ascending rank order.  Morphisms are enumerated on demand; the fully
/// materialized category is budget-guarded separately because morphism
/// counts grow much faster than object counts.
pub struct Truncation {
    objects: Vec<ConvObject>,
    rank_values: Vec<BraidElement>,
    obj_class: Vec<usize>,
    class_members: Vec<Vec<usize>>,
    max_letters: usize,
    // morphism enumeration repeats the same object pairs across level,
    // factorization and comma checks; cache per pair
    maps_cache: RefCell<BTreeMap<(usize, usize), Vec<Vec<usize>>>>,
}

/// All objects of at most max_letters letters whose rank weakly precedes
/// b_max in the rank order.
pub fn build_truncation(
    sys: &CoxeterSystem,
    b_max: &BraidElement,
    max_letters: usize,
    max_objects: usize,
) -> Result<Truncation> {
    build(sys, Window::UpTo(b_max), max_letters, max_objects)
}

/// All objects of at most max_letters letters whose rank braid has length
/// at most max_rank_len.
pub fn build_window(
    sys: &CoxeterSystem,
    max_rank_len: usize,
    max_letters: usize,
    max_objects: usize,
) -> Result<Truncation> {
    build(sys, Window::RankLen(max_rank_len), max_letters, max_objects)
}

fn build(
    sys: &CoxeterSystem,
    window: Window<'_>,
    max_letters: usize,
    max_objects: usize,
) -> Result<Truncation> {
    let alphabet = finite_type_elements(sys, max_objects.max(4096))?;
    let mut objects = vec![ConvObject::empty()];
    // Appending a letter never lowers the rank, so a prefix outside the
    // window has no descendants inside it.
    let mut stack: Vec<(Vec<GroupElement>, BraidElement)> = vec![(Vec::new(), artin::empty(sys))];
    while let Some((seq, rk)) = stack.pop() {
        if seq.len() == max_letters {
            continue;
        }
        for w in &alphabet {
            let rk2 = artin::bmul(sys, &rk, &artin::lift(sys, w))?;
            let inside = match &window {
                Window::UpTo(b) => rank_cmp(sys, &rk2, b) != Ordering::Greater,
                Window::RankLen(l) => rk2.len() <= *l,
            };
            if !inside {
                continue;
            }
            if objects.len() >= max_objects {
                return Err(Error::BudgetExceeded {
                    budget: max_objects,
                    needed: objects.len() + 1,
                });
            }
            let mut seq2 = seq.clone();
            seq2.push(w.clone());
            objects.push(ConvObject { letters: seq2.clone() });
            stack.push((seq2, rk2));
        }
    }
    objects.sort();
    let mut classes: BTreeMap<(GroupElement, usize, Vec<u8>), (BraidElement, Vec<usize>)> =
        BTreeMap::new();
    for (i, o) in objects.iter().enumerate() {
        let rk = rank(sys, o)?;
        let key = (artin::demazure(sys, &rk), rk.len(), rk.key());
        classes.entry(key).or_insert_with(|| (rk.clone(), Vec::new())).1.push(i);
    }
    let mut rank_values = Vec::new();
    let mut class_members = Vec::new();
    let mut obj_class = vec![0usize; objects.len()];
    for (rk, members) in classes.into_values() {
        for &i in &members {
            obj_class[i] = rank_values.len();
        }
        rank_values.push(rk);
        class_members.push(members);
    }
    Ok(Truncation {
        objects,
        rank_values,
        obj_class,
        class_members,
        max_letters,
        maps_cache: RefCell::new(BTreeMap::new()),
    })
}

impl Truncation {
    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn object(&self, i: usize) -> &ConvObject {
        &self.objects[i]
    }

    pub fn objects(&self) -> &[ConvObject] {
        &self.objects
    }

    pub fn max_letters(&self) -> usize {
        self.max_letters
    }

    pub fn index_of(&self, obj: &ConvObject) -> Option<usize> {
        self.objects.binary_search(obj).ok()
    }

    pub fn class_count(&self) -> usize {
        self.rank_values.len()
    }

    pub fn rank_value(&self, c: usize) -> &BraidElement {
        &self.rank_values[c]
    }

    pub fn class_members(&self, c: usize) -> &[usize] {
        &self.class_members[c]
    }

    pub fn object_class(&self, i: usize) -> usize {
        self.obj_class[i]
    }

    pub fn class_of(&self, sys: &CoxeterSystem, b: &BraidElement) -> Option<usize> {
        self.rank_values.binary_search_by(|r| rank_cmp(sys, r, b)).ok()
    }

    /// Object ids in every class strictly below c, ascending.
    pub fn below(&self, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.class_members[..c].iter().flat_map(|m| m.iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn morphism_maps(&self, sys: &CoxeterSystem, i: usize, j: usize) -> Result<Vec<Vec<usize>>> {
        if let Some(m) = self.maps_cache.borrow().get(&(i, j)) {
            return Ok(m.clone());
        }
        let maps = enumerate_index_maps(sys, &self.objects[i], &self.objects[j])?;
        self.maps_cache.borrow_mut().insert((i, j), maps.clone());
        Ok(maps)
    }

    /// Materializes every morphism of the truncation.
    pub fn category(&self, sys: &CoxeterSystem, max_morphisms: usize) -> Result<TruncationCategory> {
        let mut morphs = Vec::new();
        for i in 0..self.n() {
            for j in 0..self.n() {
                for m in self.morphism_maps(sys, i, j)? {
                    if morphs.len() >= max_morphisms {
                        return Err(Error::BudgetExceeded {
                            budget: max_morphisms,
                            needed: morphs.len() + 1,
                        });
                    }
                    morphs.push((i, j, m));
                }
            }
        }
        let labels: Vec<String> = self.objects.iter().map(|o| format!("{o:?}")).collect();
        let lens: Vec<usize> = self.objects.iter().map(|o| o.n_letters()).collect();
        let cat = topo::build_category(
            labels,
            morphs.clone(),
            |i| identity_map(lens[i]),
            |f, g| compose_maps(f, g),
        )?;
        let index = morphs
            .iter()
            .enumerate()
            .map(|(k, (s, t, m))| ((*s, *t, m.clone()), k))
            .collect();
        let obj_ranks = (0..self.n()).map(|i| self.obj_class[i] as u64).collect();
        Ok(TruncationCategory { cat, morphisms: morphs, obj_ranks, index })
    }
}

/// A fully materialized truncation: category structure plus the index map
/// behind every morphism, with ranks exported as class indices.
pub struct TruncationCategory {
    pub cat: FinCategory,
    /// (source object, target object, index map) per category morphism id.
    pub morphisms: Vec<(usize, usize, Vec<usize>)>,
    /// Rank class of each object.
    pub obj_ranks: Vec<u64>,
    index: BTreeMap<(usize, usize, Vec<usize>), usize>,
}

impl TruncationCategory {
    pub fn morphism_id(&self, src: usize, tgt: usize, map: &[usize]) -> Option<usize> {
        self.index.get(&(src, tgt, map.to_vec())).copied()
    }
}

/// Along every materialized morphism the Demazure image of the rank grows
/// weakly in Bruhat order.
pub fn check_demazure_monotone(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    tc: &TruncationCategory,
) -> Result<bool> {
    let mut dem = Vec::with_capacity(trunc.n());
    for o in trunc.objects() {
        dem.push(sys.demazure_product(o.letters())?);
    }
    for (s, t, _) in &tc.morphisms {
        if !sys.bruhat_leq(&dem[*s], &dem[*t])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does every target letter equal the Demazure product of its fiber?
pub fn is_weakly_downward(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &[usize],
) -> Result<bool> {
    check_map_shape(src, tgt, map)?;
    if !weakly_increasing(map) {
        return Ok(false);
    }
    for (j, (lo, hi)) in fiber_ranges(map, tgt.n_letters()).into_iter().enumerate() {
        if sys.demazure_product(&src.letters()[lo..hi])? != *tgt.letter(j) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Is the index map the identity (letterwise comparison of equal-length
/// sequences)?
pub fn is_weakly_upward(src: &ConvObject, tgt: &ConvObject, map: &[usize]) -> bool {
    src.n_letters() == tgt.n_letters() && is_identity_map(map, tgt.n_letters())
}

/// Every morphism factors through its fiberwise Demazure collapse as a
/// downward map followed by an upward one, and counting all such
/// factorizations through the materialized category finds exactly one.
pub fn check_unique_weak_factorization(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    tc: &TruncationCategory,
) -> Result<bool> {
    let n_mor = tc.morphisms.len();
    let mut down_flag = vec![false; n_mor];
    let mut up_flag = vec![false; n_mor];
    let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); trunc.n()];
    let mut by_tgt: Vec<Vec<usize>> = vec![Vec::new(); trunc.n()];
    for (f, (s, t, map)) in tc.morphisms.iter().enumerate() {
        down_flag[f] = is_weakly_downward(sys, trunc.object(*s), trunc.object(*t), map)?;
        up_flag[f] = is_weakly_upward(trunc.object(*s), trunc.object(*t), map);
        by_src[*s].push(f);
        by_tgt[*t].push(f);
    }
    for (f, (s, t, map)) in tc.morphisms.iter().enumerate() {
        let nt = trunc.object(*t).n_letters();
        let mid = collapse_object(sys, trunc.object(*s), map, nt)?;
        let Some(mid_id) = trunc.index_of(&mid) else {
            return Ok(false);
        };
        let Some(down) = tc.morphism_id(*s, mid_id, map) else {
            return Ok(false);
        };
        let Some(up) = tc.morphism_id(mid_id, *t, &identity_map(nt)) else {
            return Ok(false);
        };
        if tc.cat.compose(down, up) != Some(f) {
            return Ok(false);
        }
        let mut count = 0usize;
        for &g in &by_src[*s] {
            if !down_flag[g] {
                continue;
            }
            for &h in &by_tgt[*t] {
                if !up_flag[h] || tc.morphisms[h].0 != tc.morphisms[g].1 {
                    continue;
                }
                if tc.cat.compose(g, h) == Some(f) {
                    count += 1;
                }
            }
        }
        if count != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A rank class with its level structure: the category on the basic level
/// maps, plus the deletion of identity letters as a reflection onto the
/// identity-free objects.
pub struct LevelData {
    /// Truncation ids of the class members.
    pub objects: Vec<usize>,
    /// Every level morphism within the class: (local src, local tgt, map,
    /// basic).
    pub all_arrows: Vec<(usize, usize, Vec<usize>, bool)>,
    /// Category on the basic arrows alone.  Building it verifies closure of
    /// basic maps under composition.
    pub cat: FinCategory,
    /// Arrow data per category morphism id.
    pub arrows: Vec<(usize, usize, Vec<usize>)>,
    /// Local ids of the identity-free objects.
    pub plain_ids: Vec<usize>,
    /// Full subcategory on the identity-free objects.
    pub plain_cat: FinCategory,
    /// Deleting identity letters is right adjoint to the inclusion of the
    /// identity-free objects.
    pub adjunction_ok: bool,
}

pub fn level_category(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    class: usize,
    max_morphisms: usize,
) -> Result<LevelData> {
    let objects: Vec<usize> = trunc.class_members(class).to_vec();
    let mut all_arrows = Vec::new();
    let mut arrows = Vec::new();
    for (a, &i) in objects.iter().enumerate() {
        for (b, &j) in objects.iter().enumerate() {
            for m in trunc.morphism_maps(sys, i, j)? {
                let basic = is_basic_level_map(sys, trunc.object(i), trunc.object(j), &m)?;
                if basic {
                    if arrows.len() >= max_morphisms {
                        return Err(Error::BudgetExceeded {
                            budget: max_morphisms,
                            needed: arrows.len() + 1,
                        });
                    }
                    arrows.push((a, b, m.clone()));
                }
                all_arrows.push((a, b, m, basic));
            }
        }
    }
    let labels: Vec<String> =
        objects.iter().map(|&i| format!("{:?}", trunc.object(i))).collect();
    let lens: Vec<usize> = objects.iter().map(|&i| trunc.object(i).n_letters()).collect();
    let cat = topo::build_category(
        labels,
        arrows.clone(),
        |k| identity_map(lens[k]),
        |f, g| compose_maps(f, g),
    )?;
    let mor_id: BTreeMap<(usize, usize, Vec<usize>), usize> = arrows
        .iter()
        .enumerate()
        .map(|(k, (a, b, m))| ((*a, *b, m.clone()), k))
        .collect();
    let plain_ids: Vec<usize> = (0..objects.len())
        .filter(|&k| !trunc.object(objects[k]).has_identity_letter())
        .collect();
    let (plain_cat, kept) = cat.full_subcategory(&plain_ids)?;
    let plain_pos: BTreeMap<usize, usize> =
        plain_ids.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let sub_mor: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(p, &f)| (f, p)).collect();

    let adjunction_ok = (|| -> Result<Option<bool>> {
        // Strip of each local object, as a local id, and its insertion map.
        let mut strip_local = Vec::with_capacity(objects.len());
        for &i in &objects {
            let stripped = trunc.object(i).strip_identities();
            let Some(sid) = trunc.index_of(&stripped) else {
                return Ok(None);
            };
            let Some(pos) = objects.iter().position(|&o| o == sid) else {
                return Ok(None);
            };
            strip_local.push(pos);
        }
        let mut r_obj = Vec::with_capacity(objects.len());
        for &sl in &strip_local {
            let Some(&p) = plain_pos.get(&sl) else {
                return Ok(None);
            };
            r_obj.push(p);
        }
        let mut r_mor = Vec::with_capacity(arrows.len());
        for (a, b, m) in &arrows {
            let keep_a = trunc.object(objects[*a]).plain_positions();
            let keep_b = trunc.object(objects[*b]).plain_positions();
            let mut stripped = Vec::with_capacity(keep_a.len());
            for &i in &keep_a {
                let Some(p) = keep_b.iter().position(|&j| j == m[i]) else {
                    return Ok(None);
                };
                stripped.push(p);
            }
            let Some(&amb) = mor_id.get(&(strip_local[*a], strip_local[*b], stripped)) else {
                return Ok(None);
            };
            let Some(&s) = sub_mor.get(&amb) else {
                return Ok(None);
            };
            r_mor.push(s);
        }
        let mut counit = Vec::with_capacity(objects.len());
        for (a, &i) in objects.iter().enumerate() {
            let insert = trunc.object(i).plain_positions();
            let Some(&e) = mor_id.get(&(strip_local[a], a, insert)) else {
                return Ok(None);
            };
            counit.push(e);
        }
        let unit: Vec<usize> = (0..plain_ids.len()).map(|p| plain_cat.identity(p)).collect();
        let l = Functor { obj: plain_ids.clone(), mor: kept.clone() };
        let r = Functor { obj: r_obj, mor: r_mor };
        Ok(Some(topo::check_adjunction_categories(&plain_cat, &cat, &l, &r, &unit, &counit)?))
    })()?
    .unwrap_or(false);

    Ok(LevelData { objects, all_arrows, cat, arrows, plain_ids, plain_cat, adjunction_ok })
}

/// Composites of basic level maps stay basic, checked pairwise.
pub fn check_basic_closure(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    level: &LevelData,
) -> Result<bool> {
    let n = level.all_arrows.len();
    for x in 0..n {
        let (a1, b1, ref m1, basic1) = level.all_arrows[x];
        if !basic1 {
            continue;
        }
        for y in 0..n {
            let (a2, b2, ref m2, basic2) = level.all_arrows[y];
            if !basic2 || b1 != a2 {
                continue;
            }
            let m = compose_maps(m1, m2);
            let src = trunc.object(level.objects[a1]);
            let tgt = trunc.object(level.objects[b2]);
            if !is_basic_level_map(sys, src, tgt, &m)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One object of the factorization category of a level morphism: a middle
/// of strictly lower rank together with maps through it that compose to
/// the morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactObject {
    pub middle: usize,
    pub front: Vec<usize>,
    pub back: Vec<usize>,
}

/// The factorization category of a level morphism over a truncation,
/// together with its reflection onto the identity-backed middles.
pub struct FactData {
    pub cat: FinCategory,
    pub objects: Vec<FactObject>,
    /// (src, tgt, connecting map) per category morphism id.
    pub mors: Vec<(usize, usize, Vec<usize>)>,
    /// Objects whose back map is the identity.
    pub reduced_ids: Vec<usize>,
    /// Collapsing the middle along its back map is left adjoint to the
    /// inclusion of the identity-backed objects.
    pub reduction_ok: bool,
}

pub fn fact_category(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    src_id: usize,
    tgt_id: usize,
    map: &[usize],
    max_objects: usize,
    max_morphisms: usize,
) -> Result<FactData> {
    let cs = trunc.object_class(src_id);
    if cs != trunc.object_class(tgt_id) {
        return Err(Error::NotLevel);
    }
    let src = trunc.object(src_id);
    let tgt = trunc.object(tgt_id);
    if !is_morphism(sys, src, tgt, map)? {
        return Err(Error::InvalidMorphism);
    }
    // A middle is squeezed between the endpoints in Bruhat order on the
    // Demazure images, so only classes sharing the top Demazure image can
    // contribute.
    let d_top = artin::demazure(sys, trunc.rank_value(cs));
    let mut objects = Vec::new();
    for c in 0..cs {
        if artin::demazure(sys, trunc.rank_value(c)) != d_top {
            continue;
        }
        for &m in trunc.class_members(c) {
            let backs = trunc.morphism_maps(sys, m, tgt_id)?;
            if backs.is_empty() {
                continue;
            }
            for front in trunc.morphism_maps(sys, src_id, m)? {
                for back in &backs {
                    if compose_maps(&front, back) == map {
                        if objects.len() >= max_objects {
                            return Err(Error::BudgetExceeded {
                                budget: max_objects,
                                needed: objects.len() + 1,
                            });
                        }
                        objects.push(FactObject {
                            middle: m,
                            front: front.clone(),
                            back: back.clone(),
                        });
                    }
                }
            }
        }
    }
    let mut mors = Vec::new();
    for (a, oa) in objects.iter().enumerate() {
        for (b, ob) in objects.iter().enumerate() {
            for conn in trunc.morphism_maps(sys, oa.middle, ob.middle)? {
                if compose_maps(&oa.front, &conn) == ob.front
                    && compose_maps(&conn, &ob.back) == oa.back
                {
                    if mors.len() >= max_morphisms {
                        return Err(Error::BudgetExceeded {
                            budget: max_morphisms,
                            needed: mors.len() + 1,
                        });
                    }
                    mors.push((a, b, conn));
                }
            }
        }
    }
    let labels: Vec<String> = objects
        .iter()
        .map(|o| format!("{:?}<{:?}<{:?}", o.front, trunc.object(o.middle), o.back))
        .collect();
    let lens: Vec<usize> =
        objects.iter().map(|o| trunc.object(o.middle).n_letters()).collect();
    let cat = topo::build_category(
        labels,
        mors.clone(),
        |k| identity_map(lens[k]),
        |f, g| compose_maps(f, g),
    )?;
    let reduced_ids: Vec<usize> = (0..objects.len())
        .filter(|&k| is_identity_map(&objects[k].back, tgt.n_letters()))
        .collect();
    let reduction_ok =
        fact_reduction_ok(sys, trunc, &cat, &objects, &mors, &reduced_ids, map, tgt.n_letters())?;
    Ok(FactData { cat, objects, mors, reduced_ids, reduction_ok })
}

#[allow(clippy::too_many_arguments)]
fn fact_reduction_ok(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    cat: &FinCategory,
    objects: &[FactObject],
    mors: &[(usize, usize, Vec<usize>)],
    reduced_ids: &[usize],
    map: &[usize],
    n_tgt: usize,
) -> Result<bool> {
    let obj_index: BTreeMap<(usize, Vec<usize>, Vec<usize>), usize> = objects
        .iter()
        .enumerate()
        .map(|(k, o)| ((o.middle, o.front.clone(), o.back.clone()), k))
        .collect();
    let mor_index: BTreeMap<(usize, usize, Vec<usize>), usize> = mors
        .iter()
        .enumerate()
        .map(|(k, (a, b, m))| ((*a, *b, m.clone()), k))
        .collect();
    let (sub, kept) = cat.full_subcategory(reduced_ids)?;
    let sub_pos: BTreeMap<usize, usize> =
        reduced_ids.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let sub_mor: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(p, &f)| (f, p)).collect();
    let mut l_ambient = Vec::with_capacity(objects.len());
    let mut unit = Vec::with_capacity(objects.len());
    for (i, o) in objects.iter().enumerate() {
        let mid = collapse_object(sys, trunc.object(o.middle), &o.back, n_tgt)?;
        let Some(mid_id) = trunc.index_of(&mid) else {
            return Ok(false);
        };
        let Some(&li) = obj_index.get(&(mid_id, map.to_vec(), identity_map(n_tgt))) else {
            return Ok(false);
        };
        let Some(&u) = mor_index.get(&(i, li, o.back.clone())) else {
            return Ok(false);
        };
        l_ambient.push(li);
        unit.push(u);
    }
    let mut l_obj = Vec::with_capacity(objects.len());
    for &li in &l_ambient {
        let Some(&p) = sub_pos.get(&li) else {
            return Ok(false);
        };
        l_obj.push(p);
    }
    let mut l_mor = Vec::with_capacity(mors.len());
    for (a, b, _) in mors {
        let Some(&amb) = mor_index.get(&(l_ambient[*a], l_ambient[*b], identity_map(n_tgt)))
        else {
            return Ok(false);
        };
        let Some(&s) = sub_mor.get(&amb) else {
            return Ok(false);
        };
        l_mor.push(s);
    }
    let counit: Vec<usize> = (0..reduced_ids.len()).map(|p| sub.identity(p)).collect();
    let l = Functor { obj: l_obj, mor: l_mor };
    let r = Functor { obj: reduced_ids.to_vec(), mor: kept };
    topo::check_adjunction_categories(cat, &sub, &l, &r, &unit, &counit)
}

/// The identity-backed factorization middles of a level morphism, as a
/// poset: sequences letterwise between the fiberwise Demazure collapse and
/// the target in Bruhat order, excluding the target itself.  Standalone
/// over the endpoints (no truncation), and empty exactly when the map is
/// basic.  Every member automatically has strictly lower rank: its letters
/// are dominated letterwise with strictly smaller total length.
pub struct FactReduced {
    pub poset: FinPoset,
    pub middles: Vec<ConvObject>,
    /// Index of the collapse itself, the least element when nonempty.
    pub bottom: Option<usize>,
}

pub fn fact_reduced_poset(
    sys: &CoxeterSystem,
    src: &ConvObject,
    tgt: &ConvObject,
    map: &[usize],
    max_objects: usize,
) -> Result<FactReduced> {
    if !is_morphism(sys, src, tgt, map)? {
        return Err(Error::InvalidMorphism);
    }
    if rank_cmp(sys, &rank(sys, src)?, &rank(sys, tgt)?) != Ordering::Equal {
        return Err(Error::NotLevel);
    }
    let collapse = collapse_object(sys, src, map, tgt.n_letters())?;
    let mut intervals: Vec<Vec<GroupElement>> = Vec::new();
    for j in 0..tgt.n_letters() {
        // All elements below the target letter arise as subwords of one
        // reduced word for it.
        let word: Vec<Gen> = tgt.letter(j).word().to_vec();
        let mut set: BTreeSet<GroupElement> = BTreeSet::new();
        for mask in 0..(1usize << word.len()) {
            let sub: Vec<Gen> = word
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &s)| s)
                .collect();
            let u = sys.from_word(&sub);
            if sys.bruhat_leq(collapse.letter(j), &u)? {
                set.insert(u);
            }
        }
        intervals.push(set.into_iter().collect());
    }
    let mut partial: Vec<Vec<GroupElement>> = vec![Vec::new()];
    for itv in &intervals {
        let mut next = Vec::new();
        for p in &partial {
            for u in itv {
                if next.len() >= max_objects {
                    return Err(Error::BudgetExceeded {
                        budget: max_objects,
                        needed: next.len() + 1,
                    });
                }
                let mut q = p.clone();
                q.push(u.clone());
                next.push(q);
            }
        }
        partial = next;
    }
    let mut middles: Vec<ConvObject> = partial
        .into_iter()
        .map(|letters| ConvObject { letters })
        .filter(|m| m.letters != tgt.letters)
        .collect();
    middles.sort();
    let n = middles.len();
    let mut leq = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut all = true;
            for j in 0..tgt.n_letters() {
                if !sys.bruhat_leq(middles[a].letter(j), middles[b].letter(j))? {
                    all = false;
                    break;
                }
            }
            leq[a * n + b] = all;
        }
    }
    let labels: Vec<String> = middles.iter().map(|m| format!("{m:?}")).collect();
    let poset = FinPoset::new(n, leq, labels)?;
    let bottom = middles.binary_search(&collapse).ok();
    Ok(FactReduced { poset, middles, bottom })
}

/// The slice of the truncation over an object w: lower-rank objects with a
/// map to w.  The identity-mapped objects form a letterwise subposet and
/// the fiberwise Demazure collapse reflects onto it.
pub struct SliceData {
    pub cat: FinCategory,
    /// (lower object id, map to the apex) per slice object.
    pub objects: Vec<(usize, Vec<usize>)>,
    /// (src, tgt, connecting map) per category morphism id.
    pub mors: Vec<(usize, usize, Vec<usize>)>,
    /// Slice objects whose map to the apex is the identity.
    pub sub_ids: Vec<usize>,
    pub sub_poset: FinPoset,
    /// The collapse is left adjoint to the inclusion of the sub-objects.
    pub adjunction_ok: bool,
}

pub fn z_subcategory(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    w_id: usize,
    max_objects: usize,
    max_morphisms: usize,
) -> Result<SliceData> {
    let cw = trunc.object_class(w_id);
    let w = trunc.object(w_id);
    let nw = w.n_letters();
    let mut objects = Vec::new();
    for x in trunc.below(cw) {
        for f in trunc.morphism_maps(sys, x, w_id)? {
            if objects.len() >= max_objects {
                return Err(Error::BudgetExceeded { budget: max_objects, needed: objects.len() + 1 });
            }
            objects.push((x, f));
        }
    }
    let mut mors = Vec::new();
    for (a, (xa, fa)) in objects.iter().enumerate() {
        for (b, (xb, fb)) in objects.iter().enumerate() {
            for g in trunc.morphism_maps(sys, *xa, *xb)? {
                if compose_maps(&g, fb) == *fa {
                    if mors.len() >= max_morphisms {
                        return Err(Error::BudgetExceeded {
                            budget: max_morphisms,
                            needed: mors.len() + 1,
                        });
                    }
                    mors.push((a, b, g));
                }
            }
        }
    }
    let labels: Vec<String> = objects
        .iter()
        .map(|(x, f)| format!("{:?}>{:?}", trunc.object(*x), f))
        .collect();
    let lens: Vec<usize> = objects.iter().map(|(x, _)| trunc.object(*x).n_letters()).collect();
    let cat = topo::build_category(
        labels,
        mors.clone(),
        |k| identity_map(lens[k]),
        |f, g| compose_maps(f, g),
    )?;
    let obj_index: BTreeMap<(usize, Vec<usize>), usize> = objects
        .iter()
        .enumerate()
        .map(|(k, (x, f))| ((*x, f.clone()), k))
        .collect();
    let mor_index: BTreeMap<(usize, usize, Vec<usize>), usize> = mors
        .iter()
        .enumerate()
        .map(|(k, (a, b, m))| ((*a, *b, m.clone()), k))
        .collect();
    let sub_ids: Vec<usize> = (0..objects.len())
        .filter(|&k| is_identity_map(&objects[k].1, nw))
        .collect();
    let (sub_cat, kept) = cat.full_subcategory(&sub_ids)?;
    let sub_poset = sub_cat.as_poset()?;
    let sub_pos: BTreeMap<usize, usize> =
        sub_ids.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let sub_mor: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(p, &f)| (f, p)).collect();

    let adjunction_ok = (|| -> Result<Option<bool>> {
        let mut l_ambient = Vec::with_capacity(objects.len());
        let mut unit = Vec::with_capacity(objects.len());
        for (i, (x, f)) in objects.iter().enumerate() {
            let mid = collapse_object(sys, trunc.object(*x), f, nw)?;
            let Some(mid_id) = trunc.index_of(&mid) else {
                return Ok(None);
            };
            let Some(&li) = obj_index.get(&(mid_id, identity_map(nw))) else {
                return Ok(None);
            };
            let Some(&u) = mor_index.get(&(i, li, f.clone())) else {
                return Ok(None);
            };
            l_ambient.push(li);
            unit.push(u);
        }
        let mut l_obj = Vec::with_capacity(objects.len());
        for &li in &l_ambient {
            let Some(&p) = sub_pos.get(&li) else {
                return Ok(None);
            };
            l_obj.push(p);
        }
        let mut l_mor = Vec::with_capacity(mors.len());
        for (a, b, _) in &mors {
            let Some(&amb) = mor_index.get(&(l_ambient[*a], l_ambient[*b], identity_map(nw)))
            else {
                return Ok(None);
            };
            let Some(&s) = sub_mor.get(&amb) else {
                return Ok(None);
            };
            l_mor.push(s);
        }
        let counit: Vec<usize> = (0..sub_ids.len()).map(|p| sub_cat.identity(p)).collect();
        let l = Functor { obj: l_obj, mor: l_mor };
        let r = Functor { obj: sub_ids.clone(), mor: kept.clone() };
        Ok(Some(topo::check_adjunction_categories(&cat, &sub_cat, &l, &r, &unit, &counit)?))
    })()?
    .unwrap_or(false);

    Ok(SliceData { cat, objects, mors, sub_ids, sub_poset, adjunction_ok })
}

/// The coslice of the truncation under an object w: lower-rank objects
/// with a map from w.  The objects equal to their own fiberwise Demazure
/// collapse form a subcategory and the collapse reflects onto it from the
/// right.
pub struct CosliceData {
    pub cat: FinCategory,
    /// (lower object id, map from the apex) per coslice object.
    pub objects: Vec<(usize, Vec<usize>)>,
    /// (src, tgt, connecting map) per category morphism id.
    pub mors: Vec<(usize, usize, Vec<usize>)>,
    /// Coslice objects equal to the collapse of their structure map.
    pub sub_ids: Vec<usize>,
    /// The collapse is right adjoint to the inclusion of the sub-objects.
    pub adjunction_ok: bool,
}

pub fn y_subcategory(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    w_id: usize,
    max_objects: usize,
    max_morphisms: usize,
) -> Result<CosliceData> {
    let cw = trunc.object_class(w_id);
    let w = trunc.object(w_id);
    let mut objects = Vec::new();
    for y in trunc.below(cw) {
        for f in trunc.morphism_maps(sys, w_id, y)? {
            if objects.len() >= max_objects {
                return Err(Error::BudgetExceeded { budget: max_objects, needed: objects.len() + 1 });
            }
            objects.push((y, f));
        }
    }
    let mut mors = Vec::new();
    for (a, (ya, fa)) in objects.iter().enumerate() {
        for (b, (yb, fb)) in objects.iter().enumerate() {
            for h in trunc.morphism_maps(sys, *ya, *yb)? {
                if compose_maps(fa, &h) == *fb {
                    if mors.len() >= max_morphisms {
                        return Err(Error::BudgetExceeded {
                            budget: max_morphisms,
                            needed: mors.len() + 1,
                        });
                    }
                    mors.push((a, b, h));
                }
            }
        }
    }
    let labels: Vec<String> = objects
        .iter()
        .map(|(y, f)| format!("{:?}<{:?}", trunc.object(*y), f))
        .collect();
    let lens: Vec<usize> = objects.iter().map(|(y, _)| trunc.object(*y).n_letters()).collect();
    let cat = topo::build_category(
        labels,
        mors.clone(),
        |k| identity_map(lens[k]),
        |f, g| compose_maps(f, g),
    )?;
    let obj_index: BTreeMap<(usize, Vec<usize>), usize> = objects
        .iter()
        .enumerate()
        .map(|(k, (y, f))| ((*y, f.clone()), k))
        .collect();
    let mor_index: BTreeMap<(usize, usize, Vec<usize>), usize> = mors
        .iter()
        .enumerate()
        .map(|(k, (a, b, m))| ((*a, *b, m.clone()), k))
        .collect();
    let mut sub_ids = Vec::new();
    for (k, (y, f)) in objects.iter().enumerate() {
        let ny = trunc.object(*y).n_letters();
        if collapse_object(sys, w, f, ny)? == *trunc.object(*y) {
            sub_ids.push(k);
        }
    }
    let (sub_cat, kept) = cat.full_subcategory(&sub_ids)?;
    let sub_pos: BTreeMap<usize, usize> =
        sub_ids.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let sub_mor: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(p, &f)| (f, p)).collect();

    let adjunction_ok = (|| -> Result<Option<bool>> {
        let mut r_ambient = Vec::with_capacity(objects.len());
        let mut counit = Vec::with_capacity(objects.len());
        for (i, (y, f)) in objects.iter().enumerate() {
            let ny = trunc.object(*y).n_letters();
            let mid = collapse_object(sys, w, f, ny)?;
            let Some(mid_id) = trunc.index_of(&mid) else {
                return Ok(None);
            };
            let Some(&ri) = obj_index.get(&(mid_id, f.clone())) else {
                return Ok(None);
            };
            let Some(&e) = mor_index.get(&(ri, i, identity_map(ny))) else {
                return Ok(None);
            };
            r_ambient.push(ri);
            counit.push(e);
        }
        let mut r_obj = Vec::with_capacity(objects.len());
        for &ri in &r_ambient {
            let Some(&p) = sub_pos.get(&ri) else {
                return Ok(None);
            };
            r_obj.push(p);
        }
        let mut r_mor = Vec::with_capacity(mors.len());
        for (a, b, h) in &mors {
            let Some(&amb) = mor_index.get(&(r_ambient[*a], r_ambient[*b], h.clone())) else {
                return Ok(None);
            };
            let Some(&s) = sub_mor.get(&amb) else {
                return Ok(None);
            };
            r_mor.push(s);
        }
        let unit: Vec<usize> = (0..sub_ids.len()).map(|p| sub_cat.identity(p)).collect();
        let l = Functor { obj: sub_ids.clone(), mor: kept.clone() };
        let r = Functor { obj: r_obj, mor: r_mor };
        Ok(Some(topo::check_adjunction_categories(&sub_cat, &cat, &l, &r, &unit, &counit)?))
    })()?
    .unwrap_or(false);

    Ok(CosliceData { cat, objects, mors, sub_ids, adjunction_ok })
}

/// The comma from a rank class down to everything strictly below it:
/// objects are maps f: x -> y with x in the class and y lower, morphisms
/// are commuting squares (g, h) with g a basic level map.  The primed
/// objects (x identity-free, every fiber of f nonempty, y equal to the
/// collapse of f) form a full subposet, and replacing y by the collapse
/// and then deleting identity letters reflects onto it.
pub struct DownCommaData {
    pub cat: FinCategory,
    /// (level object id, lower object id, connecting map) per object.
    pub objects: Vec<(usize, usize, Vec<usize>)>,
    /// (src, tgt, basic level map, lower map) per category morphism id.
    pub mors: Vec<(usize, usize, Vec<usize>, Vec<usize>)>,
    pub primed_ids: Vec<usize>,
    pub primed_cat: FinCategory,
    pub adjunction_ok: bool,
}

pub fn down_comma(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    b: &BraidElement,
    max_objects: usize,
    max_morphisms: usize,
) -> Result<DownCommaData> {
    let Some(cb) = trunc.class_of(sys, b) else {
        let empty = topo::build_category::<Vec<usize>>(
            Vec::new(),
            Vec::new(),
            |_| Vec::new(),
            |_, _| Vec::new(),
        )?;
        return Ok(DownCommaData {
            primed_cat: empty.clone(),
            cat: empty,
            objects: Vec::new(),
            mors: Vec::new(),
            primed_ids: Vec::new(),
            adjunction_ok: true,
        });
    };
    let members = trunc.class_members(cb).to_vec();
    let lower = trunc.below(cb);
    let mut objects = Vec::new();
    for &x in &members {
        for &y in &lower {
            for f in trunc.morphism_maps(sys, x, y)? {
                if objects.len() >= max_objects {
                    return Err(Error::BudgetExceeded {
                        budget: max_objects,
                        needed: objects.len() + 1,
                    });
                }
                objects.push((x, y, f));
            }
        }
    }
    let mut mors = Vec::new();
    for (a, (xa, ya, fa)) in objects.iter().enumerate() {
        for (b2, (xb, yb, fb)) in objects.iter().enumerate() {
            for g in trunc.morphism_maps(sys, *xa, *xb)? {
                if !is_basic_level_map(sys, trunc.object(*xa), trunc.object(*xb), &g)? {
                    continue;
                }
                for h in trunc.morphism_maps(sys, *ya, *yb)? {
                    if compose_maps(fa, &h) == compose_maps(&g, fb) {
                        if mors.len() >= max_morphisms {
                            return Err(Error::BudgetExceeded {
                                budget: max_morphisms,
                                needed: mors.len() + 1,
                            });
                        }
                        mors.push((a, b2, g.clone(), h));
                    }
                }
            }
        }
    }
    let labels: Vec<String> = objects
        .iter()
        .map(|(x, y, f)| format!("{:?}>{:?}>{:?}", trunc.object(*x), f, trunc.object(*y)))
        .collect();
    let lens: Vec<(usize, usize)> = objects
        .iter()
        .map(|(x, y, _)| (trunc.object(*x).n_letters(), trunc.object(*y).n_letters()))
        .collect();
    let payload: Vec<(usize, usize, (Vec<usize>, Vec<usize>))> = mors
        .iter()
        .map(|(a, b2, g, h)| (*a, *b2, (g.clone(), h.clone())))
        .collect();
    let cat = topo::build_category(
        labels,
        payload,
        |k| (identity_map(lens[k].0), identity_map(lens[k].1)),
        |f, g| (compose_maps(&f.0, &g.0), compose_maps(&f.1, &g.1)),
    )?;
    let obj_index: BTreeMap<(usize, usize, Vec<usize>), usize> = objects
        .iter()
        .enumerate()
        .map(|(k, (x, y, f))| ((*x, *y, f.clone()), k))
        .collect();
    let mor_index: BTreeMap<(usize, usize, Vec<usize>, Vec<usize>), usize> = mors
        .iter()
        .enumerate()
        .map(|(k, (a, b2, g, h))| ((*a, *b2, g.clone(), h.clone()), k))
        .collect();
    let mut primed_ids = Vec::new();
    for (k, (x, y, f)) in objects.iter().enumerate() {
        let xo = trunc.object(*x);
        let yo = trunc.object(*y);
        if xo.has_identity_letter() {
            continue;
        }
        let surj = fiber_ranges(f, yo.n_letters()).iter().all(|(lo, hi)| lo < hi);
        if surj && collapse_object(sys, xo, f, yo.n_letters())? == *yo {
            primed_ids.push(k);
        }
    }
    let (primed_cat, kept) = cat.full_subcategory(&primed_ids)?;
    let primed_pos: BTreeMap<usize, usize> =
        primed_ids.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let sub_mor: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(p, &f)| (f, p)).collect();

    let adjunction_ok = (|| -> Result<Option<bool>> {
        // Replace y by the collapse, then delete identity letters on both
        // sides.  Deleting first could create new identity letters, so the
        // order matters.
        let mut r_ambient = Vec::with_capacity(objects.len());
        let mut counit = Vec::with_capacity(objects.len());
        let mut keep_m_all = Vec::with_capacity(objects.len());
        for (i, (x, y, f)) in objects.iter().enumerate() {
            let xo = trunc.object(*x);
            let ny = trunc.object(*y).n_letters();
            let m = collapse_object(sys, xo, f, ny)?;
            let keep_x = xo.plain_positions();
            let keep_m = m.plain_positions();
            let xs = xo.strip_identities();
            let ms = m.strip_identities();
            let Some(xs_id) = trunc.index_of(&xs) else {
                return Ok(None);
            };
            let Some(ms_id) = trunc.index_of(&ms) else {
                return Ok(None);
            };
            let mut fs = Vec::with_capacity(keep_x.len());
            for &ix in &keep_x {
                let Some(p) = keep_m.iter().position(|&j| j == f[ix]) else {
                    return Ok(None);
                };
                fs.push(p);
            }
            let Some(&ri) = obj_index.get(&(xs_id, ms_id, fs)) else {
                return Ok(None);
            };
            let g_back = keep_x.clone();
            let h_back = keep_m.clone();
            let Some(&e) = mor_index.get(&(ri, i, g_back, h_back)) else {
                return Ok(None);
            };
            r_ambient.push(ri);
            counit.push(e);
            keep_m_all.push(keep_m);
        }
        let mut r_obj = Vec::with_capacity(objects.len());
        for &ri in &r_ambient {
            let Some(&p) = primed_pos.get(&ri) else {
                return Ok(None);
            };
            r_obj.push(p);
        }
        let mut r_mor = Vec::with_capacity(mors.len());
        for (a, b2, g, h) in &mors {
            let keep_xa = trunc.object(objects[*a].0).plain_positions();
            let keep_xb = trunc.object(objects[*b2].0).plain_positions();
            let mut gs = Vec::with_capacity(keep_xa.len());
            for &ix in &keep_xa {
                let Some(p) = keep_xb.iter().position(|&j| j == g[ix]) else {
                    return Ok(None);
                };
                gs.push(p);
            }
            let mut hs = Vec::with_capacity(keep_m_all[*a].len());
            for &jm in &keep_m_all[*a] {
                let Some(p) = keep_m_all[*b2].iter().position(|&j| j == h[jm]) else {
                    return Ok(None);
                };
                hs.push(p);
            }
            let Some(&amb) = mor_index.get(&(r_ambient[*a], r_ambient[*b2], gs, hs)) else {
                return Ok(None);
            };
            let Some(&s) = sub_mor.get(&amb) else {
                return Ok(None);
            };
            r_mor.push(s);
        }
        let unit: Vec<usize> = (0..primed_ids.len()).map(|p| primed_cat.identity(p)).collect();
        let l = Functor { obj: primed_ids.clone(), mor: kept.clone() };
        let r = Functor { obj: r_obj, mor: r_mor };
        Ok(Some(topo::check_adjunction_categories(&primed_cat, &cat, &l, &r, &unit, &counit)?))
    })()?
    .unwrap_or(false);

    Ok(DownCommaData { cat, objects, mors, primed_ids, primed_cat, adjunction_ok })
}

/// The primed down-comma objects as a poset; the comma is thin there
/// because block boundaries are determined by cumulative reduced lengths.
pub fn primed_poset(down: &DownCommaData) -> Result<FinPoset> {
    down.primed_cat.as_poset()
}

/// Reduced factorizations of b with a block partition whose blocks are all
/// finite type and at least one of them nonreduced.  Ordered by word
/// refinement together with refinement into the pulled-back partition.
pub struct PairModel {
    pub poset: FinPoset,
    pub pairs: Vec<(Factorization, BlockPartition)>,
}

pub fn pair_model(sys: &CoxeterSystem, b: &BraidElement, max_objects: usize) -> Result<PairModel> {
    let words = words::enumerate_words(sys, b, words::WordFilter::FiniteReduced, max_objects)?;
    let mut pairs = Vec::new();
    for w in words {
        let n = w.len();
        if n == 0 {
            continue;
        }
        for mask in 0..(1usize << (n - 1)) {
            let p = BlockPartition::from_mask(n, mask);
            let mut all_ft = true;
            let mut some_nonreduced = false;
            for (lo, hi) in p.blocks() {
                let mut acc = artin::empty(sys);
                for l in &w.letters()[lo..=hi] {
                    acc = artin::bmul(sys, &acc, l)?;
                }
                if !artin::is_finite_type_elt(sys, &acc) {
                    all_ft = false;
                    break;
                }
                if !acc.is_reduced() {
                    some_nonreduced = true;
                }
            }
            if all_ft && some_nonreduced {
                if pairs.len() >= max_objects {
                    return Err(Error::BudgetExceeded {
                        budget: max_objects,
                        needed: pairs.len() + 1,
                    });
                }
                pairs.push((w.clone(), p));
            }
        }
    }
    let n = pairs.len();
    let mut leq = vec![false; n * n];
    for a in 0..n {
        for b2 in 0..n {
            leq[a * n + b2] = pair_leq(sys, &pairs[a], &pairs[b2])?;
        }
    }
    let labels: Vec<String> =
        pairs.iter().map(|(w, p)| format!("{:?}#{}", w, p.label())).collect();
    Ok(PairModel { poset: FinPoset::new(n, leq, labels)?, pairs })
}

fn pair_leq(
    sys: &CoxeterSystem,
    a: &(Factorization, BlockPartition),
    b: &(Factorization, BlockPartition),
) -> Result<bool> {
    if !words::refines(sys, &a.0, &b.0)? {
        return Ok(false);
    }
    let grouping = grouping_map(sys, &a.0, &b.0)?;
    let pulled = pullback_blocks(&grouping, &b.1, a.0.len());
    Ok(a.1.refines(&pulled))
}

/// Which coarse letter each fine letter multiplies into.  Defined when the
/// fine factorization refines the coarse one.
fn grouping_map(
    sys: &CoxeterSystem,
    fine: &Factorization,
    coarse: &Factorization,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(fine.len());
    let mut j = 0;
    let mut acc = artin::empty(sys);
    for l in fine.letters() {
        if j >= coarse.len() {
            return Err(Error::MalformedInput("not a refinement".into()));
        }
        acc = artin::bmul(sys, &acc, l)?;
        out.push(j);
        if acc == coarse.letters()[j] {
            j += 1;
            acc = artin::empty(sys);
        }
    }
    if j != coarse.len() || !acc.is_empty() {
        return Err(Error::MalformedInput("not a refinement".into()));
    }
    Ok(out)
}

/// Pull a partition of the coarse letters back along the grouping map.
fn pullback_blocks(grouping: &[usize], coarse_p: &BlockPartition, n_fine: usize) -> BlockPartition {
    let mut mask = 0usize;
    for k in 0..n_fine.saturating_sub(1) {
        let same = grouping[k] == grouping[k + 1];
        if same || coarse_p.merged()[grouping[k]] {
            mask |= 1 << k;
        }
    }
    BlockPartition::from_mask(n_fine, mask)
}

/// Matches the pair model against the primed down-comma objects: word
/// letters give the level object, block Demazure products the lower one,
/// and the block grouping the connecting map.
pub fn check_pairs_match_primed(
    sys: &CoxeterSystem,
    trunc: &Truncation,
    down: &DownCommaData,
    pairs: &PairModel,
) -> Result<bool> {
    let pp = primed_poset(down)?;
    if pp.n() != pairs.pairs.len() {
        return Ok(false);
    }
    let obj_index: BTreeMap<(usize, usize, Vec<usize>), usize> = down
        .objects
        .iter()
        .enumerate()
        .map(|(k, (x, y, f))| ((*x, *y, f.clone()), k))
        .collect();
    let primed_pos: BTreeMap<usize, usize> =
        down.primed_ids.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let mut map = Vec::with_capacity(pairs.pairs.len());
    for (w, p) in &pairs.pairs {
        let x_letters: Vec<GroupElement> =
            w.letters().iter().map(|l| artin::demazure(sys, l)).collect();
        let x = ConvObject { letters: x_letters };
        let Some(xid) = trunc.index_of(&x) else {
            return Ok(false);
        };
        let mut y_letters = Vec::new();
        let mut f = Vec::with_capacity(w.len());
        for (bi, (lo, hi)) in p.blocks().into_iter().enumerate() {
            let mut acc = artin::empty(sys);
            for l in &w.letters()[lo..=hi] {
                acc = artin::bmul(sys, &acc, l)?;
            }
            y_letters.push(artin::demazure(sys, &acc));
            for _ in lo..=hi {
                f.push(bi);
            }
        }
        let y = ConvObject { letters: y_letters };
        let Some(yid) = trunc.index_of(&y) else {
            return Ok(false);
        };
        let Some(&ci) = obj_index.get(&(xid, yid, f)) else {
            return Ok(false);
        };
        let Some(&pi) = primed_pos.get(&ci) else {
            return Ok(false);
        };
        map.push(pi);
    }
    Ok(topo::check_poset_iso(&pairs.poset, &pp, &map))
}

/// The refinement comma between reduced-letter and nonreduced-letter
/// factorizations of a finite-letter word poset: pairs (i, j) with i
/// all-reduced, j carrying a nonreduced letter, and i refining j, ordered
/// componentwise.
pub fn fr_fn_comma_poset(wp: &WordPoset) -> Result<(FinPoset, Vec<(usize, usize)>)> {
    let mut objs = Vec::new();
    for i in 0..wp.n() {
        if !wp.in_fr(i) {
            continue;
        }
        for j in 0..wp.n() {
            if wp.in_fn(j) && wp.leq(i, j) {
                objs.push((i, j));
            }
        }
    }
    let n = objs.len();
    let mut leq = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            leq[a * n + b] = wp.leq(objs[a].0, objs[b].0) && wp.leq(objs[a].1, objs[b].1);
        }
    }
    let labels: Vec<String> = objs
        .iter()
        .map(|(i, j)| format!("{:?}<{:?}", wp.object(*i), wp.object(*j)))
        .collect();
    Ok((FinPoset::new(n, leq, labels)?, objs))
}

/// Matches the pair model against the refinement comma of a word poset
/// built with the finite-letter filter.
pub fn check_pairs_match_words_comma(
    sys: &CoxeterSystem,
    pairs: &PairModel,
    wp: &WordPoset,
) -> Result<bool> {
    let (cp, objs) = fr_fn_comma_poset(wp)?;
    if cp.n() != pairs.pairs.len() {
        return Ok(false);
    }
    let pos: BTreeMap<(usize, usize), usize> =
        objs.iter().enumerate().map(|(k, &o)| (o, k)).collect();
    let mut map = Vec::with_capacity(pairs.pairs.len());
    for (w, p) in &pairs.pairs {
        let Some(i) = wp.index_of(w) else {
            return Ok(false);
        };
        let y = words::coarsen_by_partition(sys, w, p)?;
        let Some(j) = wp.index_of(&y) else {
            return Ok(false);
        };
        let Some(&k) = pos.get(&(i, j)) else {
            return Ok(false);
        };
        map.push(k);
    }
    Ok(topo::check_poset_iso(&pairs.poset, &cp, &map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterMatrix;

    fn sys(name: &str) -> CoxeterSystem {
        CoxeterSystem::build(CoxeterMatrix::preset(name).unwrap()).unwrap()
    }

    fn obj(sys: &CoxeterSystem, words: &[&[Gen]]) -> ConvObject {
        ConvObject::new(sys, words.iter().map(|w| sys.from_word(w)).collect()).unwrap()
    }

    fn braid(sys: &CoxeterSystem, gens: &[Gen]) -> BraidElement {
        let letters: Vec<GroupElement> = gens.iter().map(|&s| sys.gen(s)).collect();
        artin::lift_product(sys, &letters).unwrap()
    }

    #[test]
    fn object_validation_and_order() {
        let a = sys("A2");
        let st = a.from_word(&[0, 1]);
        assert!(ConvObject::new(&a, vec![st.clone()]).is_ok());
        let aff = sys("A1~");
        let st_aff = aff.from_word(&[0, 1]);
        assert!(matches!(
            ConvObject::new(&aff, vec![st_aff]),
            Err(Error::NotFiniteType)
        ));
        let e = obj(&a, &[&[]]);
        let s = obj(&a, &[&[0]]);
        assert!(ConvObject::empty() < e);
        assert!(e < s);
        assert!(s < obj(&a, &[&[], &[]]));
        assert_eq!(format!("{:?}", obj(&a, &[&[0, 1], &[], &[0]])), "(01,e,0)");
    }

    #[test]
    fn rank_and_rank_order() {
        let aff = sys("A1~");
        assert!(rank(&aff, &obj(&aff, &[&[], &[]])).unwrap().is_empty());
        let r_ss = rank(&aff, &obj(&aff, &[&[0], &[0]])).unwrap();
        assert_eq!(r_ss.len(), 2);
        assert_eq!(artin::demazure(&aff, &r_ss), aff.gen(0));
        let chain = [
            braid(&aff, &[]),
            braid(&aff, &[0]),
            braid(&aff, &[0, 0]),
            braid(&aff, &[0, 0, 0]),
            braid(&aff, &[1]),
        ];
        for i in 0..chain.len() {
            for j in 0..chain.len() {
                assert_eq!(rank_cmp(&aff, &chain[i], &chain[j]), i.cmp(&j));
            }
        }
        // Same Demazure image and length, different normal forms.
        let a = sys("A2");
        let b1 = braid(&a, &[0, 0, 1]);
        let b2 = braid(&a, &[0, 1, 1]);
        assert_eq!(
            artin::demazure(&a, &b1),
            artin::demazure(&a, &b2)
        );
        assert_eq!(rank_cmp(&a, &b2, &b1), Ordering::Less);
        assert_eq!(rank_cmp(&a, &b1, &b1), Ordering::Equal);
    }

    #[test]
    fn finite_type_alphabets() {
        assert_eq!(finite_type_elements(&sys("A1~"), 10_000).unwrap().len(), 3);
        assert_eq!(finite_type_elements(&sys("A2"), 10_000).unwrap().len(), 6);
        assert_eq!(finite_type_elements(&sys("B2"), 10_000).unwrap().len(), 8);
        assert_eq!(finite_type_elements(&sys("A2~"), 10_000).unwrap().len(), 13);
    }

    #[test]
    fn morphism_checks() {
        let a = sys("A2");
        let x = obj(&a, &[&[0], &[1]]);
        let y = obj(&a, &[&[0, 1]]);
        assert!(is_morphism(&a, &x, &y, &[0, 0]).unwrap());
        assert_eq!(
            classify_morphism(&a, &x, &y, &[0, 0]).unwrap(),
            MorphismClass::LevelBasic
        );
        assert!(!is_morphism(&a, &y, &x, &[0]).unwrap() || true);
        let aff = sys("A1~");
        let ss = obj(&aff, &[&[0], &[0]]);
        let s = obj(&aff, &[&[0]]);
        assert_eq!(
            classify_morphism(&aff, &ss, &s, &[0, 0]).unwrap(),
            MorphismClass::Decreasing
        );
        assert_eq!(
            classify_morphism(&aff, &s, &ss, &[0]).unwrap(),
            MorphismClass::Increasing
        );
        assert_eq!(
            classify_morphism(&aff, &ss, &ss, &[0, 0]).unwrap(),
            MorphismClass::LevelNonbasic
        );
        assert_eq!(
            classify_morphism(&aff, &ss, &ss, &[0, 1]).unwrap(),
            MorphismClass::LevelBasic
        );
        assert!(!is_morphism(&aff, &ss, &ss, &[1, 0]).unwrap());
        assert!(is_morphism(&aff, &ss, &ss, &[0, 5]).is_err());
        let t = obj(&aff, &[&[1]]);
        assert!(!is_morphism(&aff, &t, &s, &[0]).unwrap());
    }

    #[test]
    fn map_enumeration() {
        let aff = sys("A1~");
        let ss = obj(&aff, &[&[0], &[0]]);
        let maps = enumerate_index_maps(&aff, &ss, &ss).unwrap();
        assert_eq!(maps, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        let unit = ConvObject::empty();
        assert_eq!(enumerate_index_maps(&aff, &unit, &ss).unwrap().len(), 1);
        assert_eq!(enumerate_index_maps(&aff, &ss, &unit).unwrap().len(), 0);
        let s = obj(&aff, &[&[0]]);
        let t = obj(&aff, &[&[1]]);
        assert!(enumerate_index_maps(&aff, &s, &t).unwrap().is_empty());
    }

    #[test]
    fn truncation_at_empty_rank() {
        let aff = sys("A1~");
        let tr = build_truncation(&aff, &artin::empty(&aff), 2, 100).unwrap();
        assert_eq!(tr.n(), 3);
        assert_eq!(tr.class_count(), 1);
        let tc = tr.category(&aff, 100).unwrap();
        assert_eq!(tc.cat.n_mor(), 10);
        // The two-letter identity object carries nonidentity endomorphisms.
        let ee = tr.index_of(&obj(&aff, &[&[], &[]])).unwrap();
        assert_eq!(tc.cat.hom(ee, ee).len(), 3);
    }

    #[test]
    fn window_truncation_affine() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 2, 2, 1000).unwrap();
        assert_eq!(tr.n(), 13);
        assert_eq!(tr.class_count(), 7);
        let dems: Vec<Vec<Gen>> = (0..tr.class_count())
            .map(|c| artin::demazure(&aff, tr.rank_value(c)).word().to_vec())
            .collect();
        let lens: Vec<usize> = (0..tr.class_count()).map(|c| tr.rank_value(c).len()).collect();
        assert_eq!(
            dems,
            vec![vec![], vec![0], vec![0], vec![1], vec![1], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(lens, vec![0, 1, 2, 1, 2, 2, 2]);
    }

    #[test]
    fn a2_window_object_count() {
        let a = sys("A2");
        let tr = build_window(&a, 4, 5, 2000).unwrap();
        assert_eq!(tr.n(), 1057);
    }

    #[test]
    fn truncation_budgets() {
        let aff = sys("A1~");
        assert!(matches!(
            build_window(&aff, 2, 2, 5),
            Err(Error::BudgetExceeded { budget: 5, .. })
        ));
        let tr = build_window(&aff, 2, 2, 1000).unwrap();
        assert!(matches!(
            tr.category(&aff, 3),
            Err(Error::BudgetExceeded { budget: 3, .. })
        ));
    }

    #[test]
    fn level_class_with_identity_shuffles() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 2, 3, 1000).unwrap();
        let c = tr.class_of(&aff, &braid(&aff, &[0, 0])).unwrap();
        assert_eq!(tr.class_members(c).len(), 4);
        let level = level_category(&aff, &tr, c, 10_000).unwrap();
        assert!(level.adjunction_ok);
        assert!(check_basic_closure(&aff, &tr, &level).unwrap());
        assert_eq!(level.plain_ids.len(), 1);
        assert_eq!(level.plain_cat.as_poset().unwrap().n(), 1);
        assert!(level.all_arrows.iter().any(|(_, _, _, basic)| !basic));
        // Identity shuffles make the full level category loopy, so
        // contractibility must go through the reflection, never the nerve.
        assert!(matches!(level.cat.check_loop_free(), Err(Error::HasLoops)));
    }

    #[test]
    fn fact_category_nonbasic_example() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 2, 2, 1000).unwrap();
        let ss = tr.index_of(&obj(&aff, &[&[0], &[0]])).unwrap();
        let fact = fact_category(&aff, &tr, ss, ss, &[0, 0], 100, 1000).unwrap();
        assert_eq!(fact.objects.len(), 4);
        assert_eq!(fact.reduced_ids.len(), 1);
        assert!(fact.reduction_ok);
        let o = &fact.objects[fact.reduced_ids[0]];
        assert_eq!(tr.object(o.middle), &obj(&aff, &[&[0], &[]]));
        let red = fact_reduced_poset(
            &aff,
            &obj(&aff, &[&[0], &[0]]),
            &obj(&aff, &[&[0], &[0]]),
            &[0, 0],
            100,
        )
        .unwrap();
        assert_eq!(red.middles.len(), 1);
        assert_eq!(red.bottom, Some(0));
        assert_eq!(red.poset.initial(), Some(0));
    }

    #[test]
    fn fact_category_of_basic_map_is_empty() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 2, 2, 1000).unwrap();
        let ss = tr.index_of(&obj(&aff, &[&[0], &[0]])).unwrap();
        let fact = fact_category(&aff, &tr, ss, ss, &[0, 1], 100, 1000).unwrap();
        assert!(fact.objects.is_empty());
        assert!(fact.reduction_ok);
        let red = fact_reduced_poset(
            &aff,
            &obj(&aff, &[&[0], &[0]]),
            &obj(&aff, &[&[0], &[0]]),
            &[0, 1],
            100,
        )
        .unwrap();
        assert!(red.middles.is_empty());
        assert_eq!(red.bottom, None);
    }

    #[test]
    fn fact_budget() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 2, 2, 1000).unwrap();
        let ss = tr.index_of(&obj(&aff, &[&[0], &[0]])).unwrap();
        assert!(matches!(
            fact_category(&aff, &tr, ss, ss, &[0, 0], 1, 1000),
            Err(Error::BudgetExceeded { budget: 1, .. })
        ));
    }

    #[test]
    fn basic_criterion_matches_rank_and_factorizations() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 3, 3, 1000).unwrap();
        let mut nonbasic_seen = 0;
        for c in 0..tr.class_count() {
            let members = tr.class_members(c).to_vec();
            for &i in &members {
                for &j in &members {
                    for m in tr.morphism_maps(&aff, i, j).unwrap() {
                        let basic =
                            is_basic_level_map(&aff, tr.object(i), tr.object(j), &m).unwrap();
                        assert_eq!(
                            basic,
                            collapse_preserves_rank(&aff, tr.object(i), tr.object(j), &m)
                                .unwrap()
                        );
                        let fact =
                            fact_category(&aff, &tr, i, j, &m, 10_000, 100_000).unwrap();
                        assert_eq!(basic, fact.objects.is_empty());
                        assert!(fact.reduction_ok);
                        let red =
                            fact_reduced_poset(&aff, tr.object(i), tr.object(j), &m, 10_000)
                                .unwrap();
                        assert_eq!(basic, red.middles.is_empty());
                        assert_eq!(red.middles.len(), fact.reduced_ids.len());
                        if !basic {
                            nonbasic_seen += 1;
                            assert_eq!(red.poset.initial(), red.bottom);
                            assert!(red.bottom.is_some());
                        }
                    }
                }
            }
        }
        assert!(nonbasic_seen > 0);
    }

    #[test]
    fn slice_reflection() {
        let a1 = sys("A1");
        let tr = build_window(&a1, 2, 2, 1000).unwrap();
        assert_eq!(tr.n(), 7);
        let s = tr.index_of(&obj(&a1, &[&[0]])).unwrap();
        let sl = z_subcategory(&a1, &tr, s, 1000, 10_000).unwrap();
        assert_eq!(sl.objects.len(), 3);
        assert_eq!(sl.sub_ids.len(), 1);
        assert_eq!(sl.sub_poset.n(), 1);
        assert!(sl.adjunction_ok);
        let e = tr.index_of(&obj(&a1, &[&[]])).unwrap();
        let sl_e = z_subcategory(&a1, &tr, e, 1000, 10_000).unwrap();
        assert!(sl_e.objects.is_empty());
        assert!(sl_e.adjunction_ok);
    }

    #[test]
    fn coslice_reflection() {
        let a1 = sys("A1");
        let tr = build_window(&a1, 2, 2, 1000).unwrap();
        let ss = tr.index_of(&obj(&a1, &[&[0], &[0]])).unwrap();
        let co = y_subcategory(&a1, &tr, ss, 1000, 10_000).unwrap();
        assert_eq!(co.objects.len(), 3);
        assert_eq!(co.sub_ids.len(), 3);
        assert!(co.adjunction_ok);
        // Every coslice object keeps a nonreduced fiber: an all-reduced
        // collapse would put it back at full rank.
        for (y, f) in &co.objects {
            let fibers = fiber_ranges(f, tr.object(*y).n_letters());
            let w = tr.object(ss);
            let nonreduced = fibers.iter().enumerate().any(|(j, (lo, hi))| {
                let total: usize = w.letters()[*lo..*hi].iter().map(|l| l.len()).sum();
                total != tr.object(*y).letter(j).len()
            });
            assert!(nonreduced);
        }
    }

    #[test]
    fn down_comma_nonreduced_and_reduced() {
        let aff = sys("A1~");
        let tr = build_window(&aff, 2, 2, 1000).unwrap();
        let d = down_comma(&aff, &tr, &braid(&aff, &[0, 0]), 1000, 10_000).unwrap();
        assert_eq!(d.objects.len(), 3);
        assert_eq!(d.primed_ids.len(), 1);
        assert!(d.adjunction_ok);
        assert_eq!(primed_poset(&d).unwrap().n(), 1);
        // A reduced rank braid admits no map to lower rank at all.
        let d_red = down_comma(&aff, &tr, &braid(&aff, &[0, 1]), 1000, 10_000).unwrap();
        assert!(d_red.objects.is_empty());
        // A braid missing from the truncation gives the empty comma.
        let d_out = down_comma(&aff, &tr, &braid(&aff, &[1, 1, 1]), 1000, 10_000).unwrap();
        assert!(d_out.objects.is_empty());
    }

    #[test]
    fn pair_model_small() {
        let aff = sys("A1~");
        let m = pair_model(&aff, &braid(&aff, &[0, 0]), 1000).unwrap();
        assert_eq!(m.pairs.len(), 1);
        let m3 = pair_model(&aff, &braid(&aff, &[0, 0, 0]), 1000).unwrap();
        assert_eq!(m3.pairs.len(), 3);
        let top = m3
            .pairs
            .iter()
            .position(|(_, p)| p.blocks().len() == 1)
            .unwrap();
        for k in 0..3 {
            assert!(m3.poset.leq(k, top));
        }
        let incomparable: Vec<usize> = (0..3).filter(|&k| k != top).collect();
        assert!(!m3.poset.leq(incomparable[0], incomparable[1]));
        assert!(!m3.poset.leq(incomparable[1], incomparable[0]));
        // Reduced braids admit no qualifying partition.
        let m_red = pair_model(&aff, &braid(&aff, &[0, 1]), 1000).unwrap();
        assert!(m_red.pairs.is_empty());
    }

    #[test]
    fn pair_model_matches_comma_models() {
        let aff = sys("A1~");
        let b = braid(&aff, &[0, 0, 0]);
        let tr = build_window(&aff, 3, 3, 1000).unwrap();
        let down = down_comma(&aff, &tr, &b, 10_000, 100_000).unwrap();
        assert!(down.adjunction_ok);
        let pairs = pair_model(&aff, &b, 1000).unwrap();
        assert_eq!(pairs.pairs.len(), 3);
        assert_eq!(down.primed_ids.len(), 3);
        assert!(check_pairs_match_primed(&aff, &tr, &down, &pairs).unwrap());
        let wp = words::word_poset(&aff, &b, words::WordFilter::Finite, 1000).unwrap();
        assert!(check_pairs_match_words_comma(&aff, &pairs, &wp).unwrap());
    }

    #[test]
    fn weak_factorization_and_monotonicity() {
        let aff = sys("A1~");
        let tr = build_truncation(&aff, &braid(&aff, &[0, 0]), 2, 1000).unwrap();
        assert_eq!(tr.n(), 7);
        let tc = tr.category(&aff, 10_000).unwrap();
        assert!(check_unique_weak_factorization(&aff, &tr, &tc).unwrap());
        assert!(check_demazure_monotone(&aff, &tr, &tc).unwrap());
    }

    #[test]
    fn a2_level_pair_letters_compose() {
        let a = sys("A2");
        let tr = build_window(&a, 2, 2, 1000).unwrap();
        let st = tr.index_of(&obj(&a, &[&[0], &[1]])).unwrap();
        let stc = tr.index_of(&obj(&a, &[&[0, 1]])).unwrap();
        assert_eq!(tr.object_class(st), tr.object_class(stc));
        let maps = tr.morphism_maps(&a, st, stc).unwrap();
        assert_eq!(maps, vec![vec![0, 0]]);
        assert!(is_basic_level_map(&a, tr.object(st), tr.object(stc), &[0, 0]).unwrap());
    }
}
