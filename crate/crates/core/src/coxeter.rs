//! Exact Coxeter-group computation: the geometric representation, word
//! problem, lengths, descents, Bruhat and prefix orders, Demazure products,
//! walls and walks, finite-type detection, coset simplices, and the two
//! deletion/wall lemmas.
//!
//! Elements carry their representation matrix (the equality key), the
//! inverse matrix, and the lexicographically smallest reduced word.
//! Bond labels are restricted to {2, 3, 4, 6, ∞} so that every matrix
//! entry lies in Q(√2, √3).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;

use crate::field::{Mat, Scalar};
use crate::{Error, Result};

/// Generator index into the diagram.
pub type Gen = u8;

/// Bond label for m_st = ∞.
pub const INF: u32 = u32::MAX;

const SUPPORTED_BONDS: [u32; 5] = [2, 3, 4, 6, INF];

/// Symmetric Coxeter matrix with unit diagonal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoxeterMatrix {
    rank: usize,
    m: Vec<u32>,
}

impl CoxeterMatrix {
    /// Build from the full row-major entry list.
    pub fn new(rank: usize, entries: Vec<u32>) -> Result<Self> {
        if rank == 0 || entries.len() != rank * rank {
            return Err(Error::MalformedMatrix(format!(
                "expected {} entries for rank {rank}",
                rank * rank
            )));
        }
        let m = CoxeterMatrix { rank, m: entries };
        for i in 0..rank {
            if m.get(i, i) != 1 {
                return Err(Error::MalformedMatrix(format!("diagonal entry m({i},{i}) != 1")));
            }
            for j in 0..rank {
                if i == j {
                    continue;
                }
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::MalformedMatrix(format!("asymmetric at ({i},{j})")));
                }
                if !SUPPORTED_BONDS.contains(&m.get(i, j)) {
                    return Err(Error::UnsupportedBond { i, j, m: m.get(i, j) });
                }
            }
        }
        Ok(m)
    }

    /// Build from a bond list; unlisted off-diagonal pairs default to 2.
    pub fn from_bonds(rank: usize, bonds: &[(usize, usize, u32)]) -> Result<Self> {
        let mut e = vec![2u32; rank * rank];
        for i in 0..rank {
            e[i * rank + i] = 1;
        }
        for &(i, j, v) in bonds {
            if i >= rank || j >= rank || i == j {
                return Err(Error::MalformedMatrix(format!("bad bond ({i},{j})")));
            }
            e[i * rank + j] = v;
            e[j * rank + i] = v;
        }
        CoxeterMatrix::new(rank, e)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.m[i * self.rank + j]
    }

    /// Named presets. `~` marks the affine extension of the base type.
    pub fn preset(name: &str) -> Option<CoxeterMatrix> {
        let m = |rank, bonds: &[(usize, usize, u32)]| CoxeterMatrix::from_bonds(rank, bonds).ok();
        match name {
            "A1" => m(1, &[]),
            "A2" => m(2, &[(0, 1, 3)]),
            "B2" => m(2, &[(0, 1, 4)]),
            "G2" => m(2, &[(0, 1, 6)]),
            "A1~" => m(2, &[(0, 1, INF)]),
            "A2~" => m(3, &[(0, 1, 3), (1, 2, 3), (0, 2, 3)]),
            "B2~" | "C2~" => m(3, &[(0, 1, 4), (1, 2, 4)]),
            "G2~" => m(3, &[(0, 1, 6), (1, 2, 3)]),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["A1", "A2", "B2", "G2", "A1~", "A2~", "B2~", "C2~", "G2~"]
    }

    /// Parse the text format: a `coxeter <rank>` header followed by the
    /// strictly upper-triangular entries row by row, `inf` for ∞.
    pub fn parse(text: &str) -> Result<CoxeterMatrix> {
        let mut tokens = text.split_whitespace();
        match tokens.next() {
            Some("coxeter") => {}
            _ => return Err(Error::MalformedMatrix("missing `coxeter <rank>` header".into())),
        }
        let rank: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedMatrix("bad rank".into()))?;
        let mut bonds = Vec::new();
        for i in 0..rank {
            for j in (i + 1)..rank {
                let tok = tokens
                    .next()
                    .ok_or_else(|| Error::MalformedMatrix(format!("missing entry ({i},{j})")))?;
                let v = if tok == "inf" {
                    INF
                } else {
                    tok.parse::<u32>()
                        .map_err(|_| Error::MalformedMatrix(format!("bad entry `{tok}`")))?
                };
                bonds.push((i, j, v));
            }
        }
        if tokens.next().is_some() {
            return Err(Error::MalformedMatrix("trailing tokens".into()));
        }
        CoxeterMatrix::from_bonds(rank, &bonds)
    }

    /// Render in the same text format.
    pub fn render(&self) -> String {
        let mut out = format!("coxeter {}", self.rank);
        for i in 0..self.rank {
            let mut row = String::new();
            for j in (i + 1)..self.rank {
                if !row.is_empty() {
                    row.push(' ');
                }
                let v = self.get(i, j);
                if v == INF {
                    row.push_str("inf");
                } else {
                    row.push_str(&v.to_string());
                }
            }
            if !row.is_empty() {
                out.push('\n');
                out.push_str(&row);
            }
        }
        out.push('\n');
        out
    }

    fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x1000_0000_01b3);
        };
        mix(self.rank as u64);
        for &v in &self.m {
            mix(v as u64);
        }
        h
    }
}

/// 2·cos(π/m) for the supported bond labels.
fn two_cos(m: u32) -> Scalar {
    match m {
        1 => Scalar::from_int(2), // cos(π/1) = -1 never used off-diagonal
        2 => Scalar::zero(),
        3 => Scalar::one(),
        4 => Scalar::sqrt2(),
        6 => Scalar::sqrt3(),
        INF => Scalar::from_int(2),
        _ => unreachable!("unsupported bond"),
    }
}

/// A Coxeter system: the matrix plus its exact geometric representation.
pub struct CoxeterSystem {
    matrix: CoxeterMatrix,
    rep: Vec<Mat>,
    sig: u64,
    // the descent recursion grinds matrix products; canonical words key the
    // answers exactly, and verification replays the same small pairs a lot
    bruhat_cache: RefCell<BTreeMap<(Vec<Gen>, Vec<Gen>), bool>>,
}

/// Element of the Coxeter group, canonically represented.
#[derive(Clone)]
pub struct GroupElement {
    sig: u64,
    mat: Mat,
    inv: Mat,
    word: Vec<Gen>,
}

impl GroupElement {
    /// Lexicographically smallest reduced word.
    pub fn word(&self) -> &[Gen] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub(crate) fn sig(&self) -> u64 {
        self.sig
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig && self.word == other.word
    }
}

impl Eq for GroupElement {}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    /// Length first, then word lex; elements of different systems are
    /// ordered by fingerprint (they never mix in practice).
    fn cmp(&self, other: &Self) -> Ordering {
        (self.word.len(), &self.word, self.sig).cmp(&(other.word.len(), &other.word, other.sig))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "e")
        } else {
            for g in &self.word {
                write!(f, "{}", g)?;
            }
            Ok(())
        }
    }
}

/// A wall: the reflection across it plus its positive root.
#[derive(Clone)]
pub struct Wall {
    refl: GroupElement,
    root: Vec<Scalar>,
}

impl Wall {
    pub fn reflection(&self) -> &GroupElement {
        &self.refl
    }

    pub fn root(&self) -> &[Scalar] {
        &self.root
    }
}

impl PartialEq for Wall {
    fn eq(&self, other: &Self) -> bool {
        self.refl == other.refl
    }
}

impl Eq for Wall {}

impl fmt::Debug for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wall({:?})", self.refl)
    }
}

/// Sign of a root vector: +1 if all coordinates ≥ 0, -1 if all ≤ 0.
/// Roots of the geometric representation always have a uniform sign.
fn root_sign(v: &[Scalar]) -> i32 {
    let mut pos = false;
    let mut neg = false;
    for x in v {
        match x.sign() {
            1 => pos = true,
            -1 => neg = true,
            _ => {}
        }
    }
    match (pos, neg) {
        (true, false) => 1,
        (false, true) => -1,
        (false, false) => 0,
        (true, true) => panic!("mixed-sign vector is not a root"),
    }
}

/// A simplex of the Coxeter complex: a right coset `rep·W_J` with `J ⊊ I`,
/// keyed by its minimal-length representative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CosetSimplex {
    subset: Vec<Gen>,
    rep: GroupElement,
}

impl CosetSimplex {
    pub fn subset(&self) -> &[Gen] {
        &self.subset
    }

    pub fn rep(&self) -> &GroupElement {
        &self.rep
    }
}

impl CoxeterSystem {
    /// Build and validate a system from its matrix. Representation matrices
    /// are checked to be involutions whose pairwise products have the
    /// prescribed orders (probed up to a finite bound for ∞ bonds).
    pub fn build(matrix: CoxeterMatrix) -> Result<CoxeterSystem> {
        let n = matrix.rank();
        let mut rep = Vec::with_capacity(n);
        for s in 0..n {
            // σ_s(α_t) = α_t + 2cos(π/m_st)·α_s for t ≠ s; σ_s(α_s) = -α_s.
            let mut m = Mat::identity(n);
            m.set(s, s, Scalar::from_int(-1));
            for t in 0..n {
                if t != s {
                    m.set(s, t, two_cos(matrix.get(s, t)));
                }
            }
            rep.push(m);
        }
        let sys = CoxeterSystem {
            sig: matrix.fingerprint(),
            matrix,
            rep,
            bruhat_cache: RefCell::new(BTreeMap::new()),
        };
        sys.validate_relations()?;
        Ok(sys)
    }

    fn validate_relations(&self) -> Result<()> {
        let n = self.rank();
        let id = Mat::identity(n);
        for s in 0..n {
            if self.rep[s].mul(&self.rep[s]) != id {
                return Err(Error::MalformedMatrix(format!("rep({s}) is not an involution")));
            }
        }
        const INF_PROBE: u32 = 12;
        for s in 0..n {
            for t in (s + 1)..n {
                let m = self.matrix.get(s, t);
                let st = self.rep[s].mul(&self.rep[t]);
                let bound = if m == INF { INF_PROBE } else { m };
                let mut p = Mat::identity(n);
                for k in 1..=bound {
                    p = p.mul(&st);
                    let is_id = p == id;
                    if m != INF && k == m && !is_id {
                        return Err(Error::MalformedMatrix(format!(
                            "rep({s})rep({t}) does not have order {m}"
                        )));
                    }
                    if is_id && (m == INF || k < m) {
                        return Err(Error::MalformedMatrix(format!(
                            "rep({s})rep({t}) has premature order {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn generators(&self) -> impl Iterator<Item = Gen> {
        (0..self.rank() as Gen).into_iter()
    }

    fn check_sig(&self, u: &GroupElement) -> Result<()> {
        if u.sig == self.sig {
            Ok(())
        } else {
            Err(Error::SystemMismatch)
        }
    }

    fn check_gen(&self, s: Gen) -> Result<()> {
        if (s as usize) < self.rank() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange)
        }
    }

    pub fn identity(&self) -> GroupElement {
        let n = self.rank();
        GroupElement {
            sig: self.sig,
            mat: Mat::identity(n),
            inv: Mat::identity(n),
            word: Vec::new(),
        }
    }

    pub fn gen(&self, s: Gen) -> GroupElement {
        assert!((s as usize) < self.rank());
        GroupElement {
            sig: self.sig,
            mat: self.rep[s as usize].clone(),
            inv: self.rep[s as usize].clone(),
            word: vec![s],
        }
    }

    /// Extract the lexicographically smallest reduced word from a matrix
    /// pair by greedy smallest-left-descent stripping.
    fn canonical_word(&self, mat: &Mat, inv: &Mat) -> Vec<Gen> {
        let n = self.rank();
        let id = Mat::identity(n);
        let mut mat = mat.clone();
        let mut inv = inv.clone();
        let mut word = Vec::new();
        loop {
            if mat == id {
                return word;
            }
            let mut found = None;
            for s in 0..n {
                // s is a left descent iff w^{-1}(α_s) = inv·e_s is negative.
                if root_sign(&inv.col(s)) < 0 {
                    found = Some(s);
                    break;
                }
            }
            let s = found.expect("non-identity element with no left descent");
            word.push(s as Gen);
            mat = self.rep[s].mul(&mat);
            inv = inv.mul(&self.rep[s]);
        }
    }

    fn element_from_mats(&self, mat: Mat, inv: Mat) -> GroupElement {
        let word = self.canonical_word(&mat, &inv);
        GroupElement {
            sig: self.sig,
            mat,
            inv,
            word,
        }
    }

    /// Element defined by an arbitrary word (not necessarily reduced).
    pub fn from_word(&self, word: &[Gen]) -> GroupElement {
        let n = self.rank();
        let mut mat = Mat::identity(n);
        let mut inv = Mat::identity(n);
        for &s in word {
            assert!((s as usize) < n, "generator out of range");
            mat = mat.mul(&self.rep[s as usize]);
            inv = self.rep[s as usize].mul(&inv);
        }
        self.element_from_mats(mat, inv)
    }

    pub fn multiply(&self, u: &GroupElement, v: &GroupElement) -> Result<GroupElement> {
        self.check_sig(u)?;
        self.check_sig(v)?;
        Ok(self.element_from_mats(u.mat.mul(&v.mat), v.inv.mul(&u.inv)))
    }

    /// u·s, by a single matrix multiplication.
    pub fn mul_gen(&self, u: &GroupElement, s: Gen) -> Result<GroupElement> {
        self.check_sig(u)?;
        self.check_gen(s)?;
        Ok(self.element_from_mats(u.mat.mul(&self.rep[s as usize]), self.rep[s as usize].mul(&u.inv)))
    }

    /// s·u, by a single matrix multiplication.
    pub fn gen_mul(&self, s: Gen, u: &GroupElement) -> Result<GroupElement> {
        self.check_sig(u)?;
        self.check_gen(s)?;
        Ok(self.element_from_mats(self.rep[s as usize].mul(&u.mat), u.inv.mul(&self.rep[s as usize])))
    }

    pub fn inverse(&self, u: &GroupElement) -> Result<GroupElement> {
        self.check_sig(u)?;
        Ok(self.element_from_mats(u.inv.clone(), u.mat.clone()))
    }

    pub fn length(&self, u: &GroupElement) -> usize {
        u.word.len()
    }

    pub fn is_left_descent(&self, u: &GroupElement, s: Gen) -> bool {
        assert!((s as usize) < self.rank());
        root_sign(&u.inv.col(s as usize)) < 0
    }

    pub fn is_right_descent(&self, u: &GroupElement, s: Gen) -> bool {
        assert!((s as usize) < self.rank());
        root_sign(&u.mat.col(s as usize)) < 0
    }

    pub fn left_descents(&self, u: &GroupElement) -> Vec<Gen> {
        (0..self.rank() as Gen)
            .filter(|&s| self.is_left_descent(u, s))
            .collect()
    }

    pub fn right_descents(&self, u: &GroupElement) -> Vec<Gen> {
        (0..self.rank() as Gen)
            .filter(|&s| self.is_right_descent(u, s))
            .collect()
    }

    /// Bruhat order, by the standard descent recursion.  Subproblems are
    /// memoized by canonical word pair.
    pub fn bruhat_leq(&self, u: &GroupElement, w: &GroupElement) -> Result<bool> {
        self.check_sig(u)?;
        self.check_sig(w)?;
        Ok(self.bruhat_leq_inner(u.clone(), w.clone()))
    }

    fn bruhat_leq_inner(&self, u: GroupElement, w: GroupElement) -> bool {
        if u.word.is_empty() {
            return true;
        }
        if u.word.len() > w.word.len() {
            return false;
        }
        let key = (u.word.clone(), w.word.clone());
        if let Some(&v) = self.bruhat_cache.borrow().get(&key) {
            return v;
        }
        // Canonical words begin with the smallest left descent.
        let s = w.word[0];
        let sw = self.gen_mul(s, &w).expect("same system");
        let v = if self.is_left_descent(&u, s) {
            let su = self.gen_mul(s, &u).expect("same system");
            self.bruhat_leq_inner(su, sw)
        } else {
            self.bruhat_leq_inner(u, sw)
        };
        self.bruhat_cache.borrow_mut().insert(key, v);
        v
    }

    /// Prefix (weak) order: ℓ(u) + ℓ(u⁻¹w) = ℓ(w).
    pub fn prefix_leq(&self, u: &GroupElement, w: &GroupElement) -> Result<bool> {
        self.check_sig(u)?;
        self.check_sig(w)?;
        let q = self.multiply(&self.inverse(u)?, w)?;
        Ok(u.len() + q.len() == w.len())
    }

    /// One Demazure step: w ⋆ s.
    pub fn demazure_step(&self, w: &GroupElement, s: Gen) -> GroupElement {
        if self.is_right_descent(w, s) {
            w.clone()
        } else {
            self.mul_gen(w, s).expect("same system")
        }
    }

    /// Demazure (0-Hecke) product of a sequence.
    pub fn demazure_product(&self, seq: &[GroupElement]) -> Result<GroupElement> {
        let mut acc = self.identity();
        for w in seq {
            self.check_sig(w)?;
            for &s in w.word.clone().iter() {
                acc = self.demazure_step(&acc, s);
            }
        }
        Ok(acc)
    }

    pub fn support(&self, u: &GroupElement) -> BTreeSet<Gen> {
        u.word.iter().copied().collect()
    }

    /// Finite-type test by exact positive-definiteness of the doubled
    /// cosine Gram matrix (diagonal 2, off-diagonal -2cos(π/m)).
    pub fn is_finite_type(&self, subset: &BTreeSet<Gen>) -> bool {
        let gens: Vec<Gen> = subset.iter().copied().collect();
        let k = gens.len();
        let mut g = Mat::zero(k);
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    g.set(a, b, Scalar::from_int(2));
                } else {
                    g.set(a, b, -&two_cos(self.matrix.get(gens[a] as usize, gens[b] as usize)));
                }
            }
        }
        g.is_positive_definite()
    }

    pub fn is_finite_type_elt(&self, u: &GroupElement) -> bool {
        self.is_finite_type(&self.support(u))
    }

    /// Longest element Δ_J of a finite-type standard parabolic.
    pub fn longest_element(&self, subset: &BTreeSet<Gen>) -> Result<GroupElement> {
        if !self.is_finite_type(subset) {
            return Err(Error::NotFiniteType);
        }
        let mut w = self.identity();
        'grow: loop {
            for &s in subset {
                if !self.is_right_descent(&w, s) {
                    w = self.mul_gen(&w, s)?;
                    continue 'grow;
                }
            }
            return Ok(w);
        }
    }

    /// The type-s wall of w: reflection wsw⁻¹ with its positive root w(α_s).
    pub fn wall(&self, w: &GroupElement, s: Gen) -> Result<Wall> {
        self.check_sig(w)?;
        self.check_gen(s)?;
        let ws = self.mul_gen(w, s)?;
        let refl = self.multiply(&ws, &self.inverse(w)?)?;
        let mut root = w.mat.col(s as usize);
        if root_sign(&root) < 0 {
            for x in root.iter_mut() {
                *x = -&*x;
            }
        }
        Ok(Wall { refl, root })
    }

    /// Whether the wall separates the chambers of w1 and w2: the root of h
    /// changes sign between the two chambers.
    pub fn separates(&self, h: &Wall, w1: &GroupElement, w2: &GroupElement) -> Result<bool> {
        self.check_sig(&h.refl)?;
        self.check_sig(w1)?;
        self.check_sig(w2)?;
        let a = root_sign(&w1.inv.mul_vec(&h.root));
        let b = root_sign(&w2.inv.mul_vec(&h.root));
        debug_assert!(a != 0 && b != 0);
        Ok(a != b)
    }

    /// The walk of a sequence: (1, w1, w1w2, ..., w1⋯wn).
    pub fn walk(&self, seq: &[GroupElement]) -> Result<Vec<GroupElement>> {
        let mut out = Vec::with_capacity(seq.len() + 1);
        out.push(self.identity());
        for w in seq {
            self.check_sig(w)?;
            let next = self.multiply(out.last().unwrap(), w)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Deletion property: for a nonreduced word of simple reflections,
    /// returns 1-based indices (j, j') with j maximal such that the prefix
    /// of length j is reduced, and j' ∈ {1, ..., j} the unique index whose
    /// walk step crosses the same wall as step j+1. The boundary case
    /// j' = j occurs (e.g. for (s, s)) and is permitted.
    pub fn deletion_indices(&self, word: &[Gen]) -> Result<(usize, usize)> {
        for &s in word {
            self.check_gen(s)?;
        }
        let n = word.len();
        let mut prefixes = Vec::with_capacity(n + 1);
        prefixes.push(self.identity());
        for &s in word {
            let next = self.mul_gen(prefixes.last().unwrap(), s)?;
            prefixes.push(next);
        }
        let mut j = 0;
        for i in (0..=n).rev() {
            if prefixes[i].len() == i {
                j = i;
                break;
            }
        }
        if j == n {
            return Err(Error::ReducedInput);
        }
        let h = self.wall(&prefixes[j], word[j])?;
        let mut matches = Vec::new();
        for i in 1..=j {
            let hi = self.wall(&prefixes[i - 1], word[i - 1])?;
            if hi == h {
                matches.push(i);
            }
        }
        match matches.as_slice() {
            [jp] => Ok((j, *jp)),
            _ => Err(Error::HypothesisFailed(format!(
                "expected exactly one crossing of the repeated wall, found {}",
                matches.len()
            ))),
        }
    }

    /// Greatest common prefix of two elements (the reduced left gcd),
    /// computed by stripping common left descents, smallest first.
    pub fn common_prefix(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_sig(a)?;
        self.check_sig(b)?;
        let mut g = self.identity();
        let mut a = a.clone();
        let mut b = b.clone();
        loop {
            let mut advanced = false;
            for s in 0..self.rank() as Gen {
                if self.is_left_descent(&a, s) && self.is_left_descent(&b, s) {
                    g = self.mul_gen(&g, s)?;
                    a = self.gen_mul(s, &a)?;
                    b = self.gen_mul(s, &b)?;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Ok(g);
            }
        }
    }

    /// Unique maximal element of {w : w ≼_Pre w1, h does not separate 1
    /// from w}. Requires a witness w2 with w1 ≼_Pre w2 and h a wall of w2
    /// separating it from 1; equals the greatest common prefix of w1 and
    /// w2·s where h is the type-s wall of w2.
    pub fn max_prefix_off_wall(
        &self,
        w1: &GroupElement,
        h: &Wall,
        w2: &GroupElement,
    ) -> Result<GroupElement> {
        self.check_sig(w1)?;
        self.check_sig(w2)?;
        if !self.prefix_leq(w1, w2)? {
            return Err(Error::HypothesisFailed("w1 is not a prefix of w2".into()));
        }
        let mut chosen = None;
        for s in self.right_descents(w2) {
            if self.wall(w2, s)? == *h {
                chosen = Some(s);
                break;
            }
        }
        let s = chosen.ok_or_else(|| {
            Error::HypothesisFailed("h is not a wall of w2 separating it from 1".into())
        })?;
        let w3 = self.mul_gen(w2, s)?;
        self.common_prefix(w1, &w3)
    }

    /// All elements of length ≤ max_len, sorted by (length, word).
    /// Fails with BudgetExceeded once more than max_count are found.
    pub fn enumerate_elements(&self, max_len: usize, max_count: usize) -> Result<Vec<GroupElement>> {
        let mut all: Vec<GroupElement> = vec![self.identity()];
        let mut frontier: Vec<GroupElement> = vec![self.identity()];
        let mut seen: BTreeSet<Vec<Gen>> = BTreeSet::new();
        seen.insert(Vec::new());
        for _ in 0..max_len {
            let mut next: BTreeMap<Vec<Gen>, GroupElement> = BTreeMap::new();
            for w in &frontier {
                for s in 0..self.rank() as Gen {
                    if !self.is_right_descent(w, s) {
                        let ws = self.mul_gen(w, s)?;
                        if !seen.contains(ws.word()) {
                            next.insert(ws.word.clone(), ws);
                        }
                    }
                }
            }
            frontier = next.into_values().collect();
            for w in &frontier {
                seen.insert(w.word.clone());
            }
            all.extend(frontier.iter().cloned());
            if all.len() > max_count {
                return Err(Error::BudgetExceeded {
                    budget: max_count,
                    needed: all.len(),
                });
            }
            if frontier.is_empty() {
                break;
            }
        }
        Ok(all)
    }

    /// Minimal-length representative of the coset w·W_J.
    pub fn coset_min_rep(&self, w: &GroupElement, subset: &BTreeSet<Gen>) -> Result<GroupElement> {
        self.check_sig(w)?;
        let mut w = w.clone();
        'strip: loop {
            for &s in subset {
                if self.is_right_descent(&w, s) {
                    w = self.mul_gen(&w, s)?;
                    continue 'strip;
                }
            }
            return Ok(w);
        }
    }

    /// The simplex w·W_J of the Coxeter complex; J must be proper.
    pub fn coset_simplex(&self, w: &GroupElement, subset: &BTreeSet<Gen>) -> Result<CosetSimplex> {
        if subset.len() >= self.rank() {
            return Err(Error::MalformedInput("simplex subset must be proper".into()));
        }
        for &s in subset {
            self.check_gen(s)?;
        }
        Ok(CosetSimplex {
            subset: subset.iter().copied().collect(),
            rep: self.coset_min_rep(w, subset)?,
        })
    }

    /// Whether the chamber of `w` contains the simplex (i.e. w ∈ rep·W_J).
    pub fn chamber_contains(&self, w: &GroupElement, simplex: &CosetSimplex) -> Result<bool> {
        let subset: BTreeSet<Gen> = simplex.subset.iter().copied().collect();
        Ok(self.coset_min_rep(w, &subset)? == simplex.rep)
    }

    /// All proper finite-type subsets of the diagram.
    pub fn finite_type_subsets(&self) -> Vec<BTreeSet<Gen>> {
        let n = self.rank();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask == (1 << n) - 1 && n > 0 {
                continue; // proper subsets only
            }
            let subset: BTreeSet<Gen> = (0..n as Gen).filter(|&s| mask & (1 << s) != 0).collect();
            if self.is_finite_type(&subset) {
                out.push(subset);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(name: &str) -> CoxeterSystem {
        CoxeterSystem::build(CoxeterMatrix::preset(name).unwrap()).unwrap()
    }

    #[test]
    fn build_rejects_bad_matrices() {
        assert!(matches!(
            CoxeterMatrix::from_bonds(2, &[(0, 1, 5)]),
            Err(Error::UnsupportedBond { m: 5, .. })
        ));
        assert!(matches!(
            CoxeterMatrix::new(2, vec![1, 3, 4, 1]),
            Err(Error::MalformedMatrix(_))
        ));
        assert!(matches!(
            CoxeterMatrix::new(2, vec![2, 3, 3, 1]),
            Err(Error::MalformedMatrix(_))
        ));
    }

    #[test]
    fn presets_build() {
        for name in CoxeterMatrix::preset_names() {
            let s = sys(name);
            assert!(s.rank() >= 1);
        }
    }

    #[test]
    fn parse_and_render_roundtrip() {
        for name in CoxeterMatrix::preset_names() {
            let m = CoxeterMatrix::preset(name).unwrap();
            let text = m.render();
            assert_eq!(CoxeterMatrix::parse(&text).unwrap(), m);
        }
        let m = CoxeterMatrix::parse("coxeter 3\n4 2\ninf\n").unwrap();
        assert_eq!(m.get(0, 1), 4);
        assert_eq!(m.get(0, 2), 2);
        assert_eq!(m.get(1, 2), INF);
    }

    #[test]
    fn a2_products_and_canonical_words() {
        let s = sys("A2");
        let a = s.gen(0);
        let b = s.gen(1);
        assert!(s.multiply(&a, &a).unwrap().is_identity());
        let st = s.multiply(&a, &b).unwrap();
        let stst = s.multiply(&st, &st).unwrap();
        let ts = s.multiply(&b, &a).unwrap();
        assert_eq!(stst, ts);
        assert_eq!(stst.len(), 2);
        // Longest element sts = tst has canonical word starting with 0.
        let w0 = s.from_word(&[1, 0, 1]);
        assert_eq!(w0.word(), &[0, 1, 0]);
    }

    #[test]
    fn infinite_dihedral_lengths() {
        let s = sys("A1~");
        let w = s.from_word(&[0, 1, 0, 1]);
        assert_eq!(w.len(), 4);
        let v = s.from_word(&[0, 1, 1, 0]);
        assert!(v.is_identity());
    }

    #[test]
    fn descents_match_definition() {
        let s = sys("A2");
        let st = s.from_word(&[0, 1]);
        assert!(s.is_left_descent(&st, 0));
        assert!(!s.is_left_descent(&st, 1));
        assert!(s.is_right_descent(&st, 1));
        assert!(!s.is_right_descent(&st, 0));
    }

    #[test]
    fn bruhat_examples() {
        let s = sys("A2");
        let e = s.identity();
        let a = s.gen(0);
        let tst = s.from_word(&[1, 0, 1]);
        let st = s.from_word(&[0, 1]);
        let ts = s.from_word(&[1, 0]);
        for w in [&e, &a, &tst, &st, &ts] {
            assert!(s.bruhat_leq(&e, w).unwrap());
        }
        assert!(s.bruhat_leq(&a, &tst).unwrap());
        assert!(!s.bruhat_leq(&st, &ts).unwrap());
        assert!(!s.bruhat_leq(&ts, &st).unwrap());
    }

    #[test]
    fn bruhat_agrees_with_subword_criterion() {
        // Exhaustive on B2 up to length 4.
        let s = sys("B2");
        let elems = s.enumerate_elements(4, 1000).unwrap();
        for u in &elems {
            for w in &elems {
                let got = s.bruhat_leq(u, w).unwrap();
                let want = subword_of(u.word(), w.word());
                assert_eq!(got, want, "{u:?} vs {w:?}");
            }
        }
    }

    // Subword criterion against one fixed reduced word of w: u ≤ w iff some
    // reduced word of u embeds in it. Scanning subsequences of w's word and
    // testing which are reduced expressions of u is equivalent.
    fn subword_of(u: &[Gen], w: &[Gen]) -> bool {
        let s = sys("B2");
        let target = s.from_word(u);
        let n = w.len();
        for mask in 0u32..(1 << n) {
            if (mask.count_ones() as usize) != u.len() {
                continue;
            }
            let sub: Vec<Gen> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| w[i]).collect();
            if s.from_word(&sub) == target {
                return true;
            }
        }
        u.is_empty()
    }

    #[test]
    fn prefix_examples() {
        let s = sys("A2");
        let a = s.gen(0);
        let b = s.gen(1);
        let st = s.from_word(&[0, 1]);
        assert!(s.prefix_leq(&st, &st).unwrap());
        assert!(s.prefix_leq(&a, &st).unwrap());
        assert!(!s.prefix_leq(&b, &st).unwrap());
    }

    #[test]
    fn demazure_fold_and_oracle() {
        let s = sys("A2");
        assert!(s.demazure_product(&[]).unwrap().is_identity());
        let a = s.gen(0);
        assert_eq!(s.demazure_product(&[a.clone(), a.clone()]).unwrap(), a);
        let seq = [s.gen(0), s.gen(1), s.gen(0), s.gen(1)];
        let d = s.demazure_product(&seq).unwrap();
        assert_eq!(d, s.from_word(&[0, 1, 0]));
        // Brute-force deletion oracle on the concatenated word.
        let word = [0u8, 1, 0, 1];
        let mut best: Option<GroupElement> = None;
        for mask in 0u32..(1 << word.len()) {
            let sub: Vec<Gen> = (0..word.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| word[i])
                .collect();
            if sub.len() != s.from_word(&sub).len() {
                continue; // not a reduced product
            }
            let v = s.from_word(&sub);
            if best.as_ref().map_or(true, |b| v.len() > b.len()) {
                best = Some(v);
            }
        }
        assert_eq!(best.unwrap(), d);
    }

    #[test]
    fn finite_type_and_longest() {
        let a2 = sys("A2");
        let full: BTreeSet<Gen> = [0, 1].into_iter().collect();
        assert!(a2.is_finite_type(&full));
        assert_eq!(a2.longest_element(&full).unwrap(), a2.from_word(&[0, 1, 0]));
        let empty: BTreeSet<Gen> = BTreeSet::new();
        assert!(a2.is_finite_type(&empty));
        assert!(a2.longest_element(&empty).unwrap().is_identity());

        let aff = sys("A1~");
        let both: BTreeSet<Gen> = [0, 1].into_iter().collect();
        assert!(!aff.is_finite_type(&both));
        assert!(matches!(aff.longest_element(&both), Err(Error::NotFiniteType)));

        let a2t = sys("A2~");
        let tri: BTreeSet<Gen> = [0, 1, 2].into_iter().collect();
        assert!(!a2t.is_finite_type(&tri));
        let pair: BTreeSet<Gen> = [0, 2].into_iter().collect();
        assert!(a2t.is_finite_type(&pair));
    }

    #[test]
    fn walls_and_separation() {
        let s = sys("A2");
        let e = s.identity();
        let a = s.gen(0);
        let h = s.wall(&e, 0).unwrap();
        assert!(s.separates(&h, &e, &a).unwrap());
        assert!(!s.separates(&h, &e, &e).unwrap());
        let walk = s.walk(&[s.gen(0), s.gen(1), s.gen(0)]).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(walk[3], s.from_word(&[0, 1, 0]));
    }

    #[test]
    fn wall_count_equals_length() {
        // ℓ(w1⁻¹w2) = number of separating walls; enumerate all walls via
        // all (prefix, letter) crossings from reduced words of elements.
        let s = sys("B2");
        let elems = s.enumerate_elements(4, 1000).unwrap();
        // Collect all walls of the finite group B2.
        let mut walls: Vec<Wall> = Vec::new();
        for w in &elems {
            for g in 0..s.rank() as Gen {
                let h = s.wall(w, g).unwrap();
                if !walls.contains(&h) {
                    walls.push(h);
                }
            }
        }
        assert_eq!(walls.len(), 4); // 4 reflections in B2
        for u in elems.iter().take(8) {
            for v in elems.iter().take(8) {
                let q = s.multiply(&s.inverse(u).unwrap(), v).unwrap();
                let count = walls.iter().filter(|h| s.separates(h, u, v).unwrap()).count();
                assert_eq!(count, q.len());
            }
        }
    }

    #[test]
    fn prefix_iff_walls_nested() {
        let s = sys("B2");
        let elems = s.enumerate_elements(4, 1000).unwrap();
        let mut walls: Vec<Wall> = Vec::new();
        for w in &elems {
            for g in 0..s.rank() as Gen {
                let h = s.wall(w, g).unwrap();
                if !walls.contains(&h) {
                    walls.push(h);
                }
            }
        }
        let e = s.identity();
        for u in &elems {
            for v in &elems {
                let got = s.prefix_leq(u, v).unwrap();
                let want = walls
                    .iter()
                    .all(|h| !s.separates(h, &e, u).unwrap() || s.separates(h, &e, v).unwrap());
                assert_eq!(got, want, "{u:?} {v:?}");
            }
        }
    }

    #[test]
    fn deletion_examples() {
        let a1 = sys("A1");
        assert_eq!(a1.deletion_indices(&[0, 0]).unwrap(), (1, 1));

        let a2 = sys("A2");
        assert_eq!(a2.deletion_indices(&[0, 1, 0, 1]).unwrap(), (3, 1));
        assert!(matches!(a2.deletion_indices(&[0, 1]), Err(Error::ReducedInput)));

        let aff = sys("A1~");
        assert_eq!(aff.deletion_indices(&[0, 1, 0, 0]).unwrap(), (3, 3));
    }

    #[test]
    fn deletion_identity_holds_exhaustively() {
        // All nonreduced words of length ≤ 6 in A2: deleting letters j' and
        // j+1 preserves the product, and the index pair is unique.
        let s = sys("A2");
        let n_gens = s.rank() as u8;
        for len in 2..=6usize {
            let mut word = vec![0u8; len];
            loop {
                let full = s.from_word(&word);
                if full.len() < len {
                    if let Ok((j, jp)) = s.deletion_indices(&word) {
                        assert!(jp <= j);
                        let reduced: Vec<Gen> = word
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i + 1 != jp && i + 1 != j + 1)
                            .map(|(_, &g)| g)
                            .collect();
                        assert_eq!(s.from_word(&reduced), full, "word {word:?}");
                    } else {
                        panic!("deletion_indices failed on {word:?}");
                    }
                }
                // Next word in lexicographic order.
                let mut i = len;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    word[i] += 1;
                    if word[i] < n_gens {
                        break;
                    }
                    word[i] = 0;
                }
                if word.iter().all(|&g| g == 0) {
                    break;
                }
            }
        }
    }

    #[test]
    fn max_prefix_off_wall_examples() {
        let s = sys("A2");
        // w2 = sts, h = type-t wall of sts (t right descent), w1 = st.
        let w2 = s.from_word(&[0, 1, 0]);
        let w1 = s.from_word(&[0, 1]);
        let h = s.wall(&w2, 1).unwrap();
        let got = s.max_prefix_off_wall(&w1, &h, &w2).unwrap();
        // Oracle: enumerate prefixes of w1, drop separated ones, take max.
        let e = s.identity();
        let mut best = e.clone();
        for cand in s.enumerate_elements(3, 100).unwrap() {
            if s.prefix_leq(&cand, &w1).unwrap()
                && !s.separates(&h, &e, &cand).unwrap()
                && cand.len() > best.len()
            {
                best = cand;
            }
        }
        assert_eq!(got, best);

        // Identity input: P = {1}.
        let trivial = s.max_prefix_off_wall(&e, &h, &w2).unwrap();
        assert!(trivial.is_identity());

        // Hypothesis failure: h not a wall of w2 separating it from 1.
        let bad = s.wall(&e, 0).unwrap();
        assert!(s.max_prefix_off_wall(&w1, &bad, &w1).is_err());
    }

    #[test]
    fn max_prefix_off_wall_affine() {
        let s = sys("A1~");
        let w2 = s.from_word(&[0, 1, 0]);
        let w1 = s.from_word(&[0, 1]);
        let h = s.wall(&w2, 0).unwrap(); // type-s0 wall of w2 = s0s1s0
        let got = s.max_prefix_off_wall(&w1, &h, &w2).unwrap();
        let e = s.identity();
        let mut best = e.clone();
        for cand in s.enumerate_elements(3, 100).unwrap() {
            if s.prefix_leq(&cand, &w1).unwrap()
                && !s.separates(&h, &e, &cand).unwrap()
                && cand.len() > best.len()
            {
                best = cand;
            }
        }
        assert_eq!(got, best);
    }

    #[test]
    fn enumeration_budget() {
        let s = sys("A1~");
        let elems = s.enumerate_elements(5, 100).unwrap();
        assert_eq!(elems.len(), 11); // 1 + 2 per length
        assert!(matches!(
            s.enumerate_elements(50, 20),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn coset_simplices() {
        let s = sys("A2~");
        let w = s.from_word(&[0, 1]);
        let j: BTreeSet<Gen> = [1].into_iter().collect();
        let simplex = s.coset_simplex(&w, &j).unwrap();
        assert_eq!(simplex.rep(), &s.from_word(&[0]));
        assert!(s.chamber_contains(&w, &simplex).unwrap());
        assert!(s.chamber_contains(&s.from_word(&[0]), &simplex).unwrap());
        assert!(!s.chamber_contains(&s.identity(), &simplex).unwrap());
        let full: BTreeSet<Gen> = [0, 1, 2].into_iter().collect();
        assert!(s.coset_simplex(&w, &full).is_err());
    }

    #[test]
    fn walk_finite_type_criterion() {
        // In a non-finite-type system, a sequence is finite type iff some
        // finite-type simplex is a face of every chamber of its walk.
        let s = sys("A1~");
        let elems = s.enumerate_elements(3, 100).unwrap();
        let subsets = s.finite_type_subsets();
        let mut seqs: Vec<Vec<GroupElement>> = vec![Vec::new()];
        for _ in 0..2 {
            let mut next = Vec::new();
            for seq in &seqs {
                let used: usize = seq.iter().map(|w| w.len()).sum();
                for w in elems.iter().filter(|w| !w.is_identity()) {
                    if used + w.len() <= 4 {
                        let mut s2 = seq.clone();
                        s2.push(w.clone());
                        next.push(s2);
                    }
                }
            }
            seqs.extend(next);
        }
        for seq in seqs.iter().filter(|s| !s.is_empty()) {
            let mut supp: BTreeSet<Gen> = BTreeSet::new();
            for w in seq {
                supp.extend(s.support(w));
            }
            let ft = s.is_finite_type(&supp);
            let walk = s.walk(seq).unwrap();
            let witness = subsets.iter().any(|j| {
                let simplex = s.coset_simplex(&walk[0], j).unwrap();
                walk.iter().all(|c| s.chamber_contains(c, &simplex).unwrap())
            });
            assert_eq!(ft, witness, "sequence {seq:?}");
        }
    }

    #[test]
    fn system_mismatch_detected() {
        let a = sys("A2");
        let b = sys("B2");
        let u = a.gen(0);
        let v = b.gen(0);
        assert!(matches!(a.multiply(&u, &v), Err(Error::SystemMismatch)));
    }
}
