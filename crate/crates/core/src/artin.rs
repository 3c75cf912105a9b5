//! The positive Artin (braid) monoid of a Coxeter system: left-greedy
//! normal forms with reduced-element factors, divisibility, greatest
//! common prefixes, maximal reduced prefixes, and the Demazure map d
//! with its section r.
//!
//! The normal form used here is valid for every bond label including ∞:
//! factors are non-identity group elements, and each adjacent pair is
//! left-weighted (every length-1 prefix of the right factor is a right
//! descent of the left factor).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::coxeter::{CoxeterSystem, Gen, GroupElement};
use crate::{Error, Result};

/// Element of the positive braid monoid in left-greedy normal form.
#[derive(Clone)]
pub struct BraidElement {
    sig: u64,
    factors: Vec<GroupElement>,
}

impl BraidElement {
    pub fn factors(&self) -> &[GroupElement] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total length (sum of factor lengths).
    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.len()).sum()
    }

    /// Reduced elements have at most one normal-form factor.
    pub fn is_reduced(&self) -> bool {
        self.factors.len() <= 1
    }

    /// Deterministic encoding: factor words separated by a sentinel.
    /// Used as the normal-form-lexicographic sort key.
    pub fn key(&self) -> Vec<u8> {
        let mut k = Vec::new();
        for f in &self.factors {
            k.extend_from_slice(f.word());
            k.push(u8::MAX);
        }
        k
    }

    pub(crate) fn sig(&self) -> u64 {
        self.sig
    }
}

impl PartialEq for BraidElement {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig && self.factors == other.factors
    }
}

impl Eq for BraidElement {}

impl PartialOrd for BraidElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BraidElement {
    /// Length first, then normal-form lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.key(), self.sig).cmp(&(other.len(), other.key(), other.sig))
    }
}

impl fmt::Debug for BraidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "[]");
        }
        for x in &self.factors {
            write!(f, "[{x:?}]")?;
        }
        Ok(())
    }
}

/// The empty (identity) braid element.
pub fn empty(sys: &CoxeterSystem) -> BraidElement {
    BraidElement {
        sig: sys.identity().sig(),
        factors: Vec::new(),
    }
}

/// The section r: W → B⁺, a single-factor (or empty) normal form.
pub fn lift(sys: &CoxeterSystem, w: &GroupElement) -> BraidElement {
    let sig = sys.identity().sig();
    assert_eq!(sig, w.sig(), "system mismatch in lift");
    if w.is_identity() {
        empty(sys)
    } else {
        BraidElement {
            sig,
            factors: alloc::vec![w.clone()],
        }
    }
}

/// Renormalize a factor list into left-greedy normal form by local
/// sliding passes. Each slide moves one letter leftward, which strictly
/// increases the vector of partial lengths, so the passes terminate.
fn normalize(sys: &CoxeterSystem, mut factors: Vec<GroupElement>) -> Vec<GroupElement> {
    factors.retain(|f| !f.is_identity());
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < factors.len() {
            loop {
                let mut moved = None;
                for s in sys.left_descents(&factors[i + 1]) {
                    if !sys.is_right_descent(&factors[i], s) {
                        moved = Some(s);
                        break;
                    }
                }
                match moved {
                    Some(s) => {
                        factors[i] = sys.mul_gen(&factors[i], s).expect("same system");
                        factors[i + 1] = sys.gen_mul(s, &factors[i + 1]).expect("same system");
                        changed = true;
                    }
                    None => break,
                }
            }
            if factors[i + 1].is_identity() {
                factors.remove(i + 1);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return factors;
        }
    }
}

/// Product of two braid elements, in normal form.
pub fn bmul(sys: &CoxeterSystem, a: &BraidElement, b: &BraidElement) -> Result<BraidElement> {
    let sig = sys.identity().sig();
    if a.sig != sig || b.sig != sig {
        return Err(Error::SystemMismatch);
    }
    let mut factors = a.factors.clone();
    factors.extend(b.factors.iter().cloned());
    Ok(BraidElement {
        sig,
        factors: normalize(sys, factors),
    })
}

/// Product of a sequence of group elements under r, in normal form.
pub fn lift_product(sys: &CoxeterSystem, seq: &[GroupElement]) -> Result<BraidElement> {
    let sig = sys.identity().sig();
    for w in seq {
        if w.sig() != sig {
            return Err(Error::SystemMismatch);
        }
    }
    Ok(BraidElement {
        sig,
        factors: normalize(sys, seq.to_vec()),
    })
}

/// Braid element spelled by a word of simple reflections.
pub fn from_letter_word(sys: &CoxeterSystem, word: &[Gen]) -> BraidElement {
    let letters: Vec<GroupElement> = word.iter().map(|&s| sys.gen(s)).collect();
    lift_product(sys, &letters).expect("same system")
}

/// The Demazure map d: fold the 0-Hecke rule over any expression.
pub fn demazure(sys: &CoxeterSystem, b: &BraidElement) -> GroupElement {
    let mut acc = sys.identity();
    for f in &b.factors {
        for &s in f.word() {
            acc = sys.demazure_step(&acc, s);
        }
    }
    acc
}

/// Union of the supports of the factors.
pub fn supp(sys: &CoxeterSystem, b: &BraidElement) -> BTreeSet<Gen> {
    let mut out = BTreeSet::new();
    for f in &b.factors {
        out.extend(sys.support(f));
    }
    out
}

/// Whether the support generates a finite standard parabolic.
pub fn is_finite_type_elt(sys: &CoxeterSystem, b: &BraidElement) -> bool {
    sys.is_finite_type(&supp(sys, b))
}

/// The set 𝓛(b) of length-1 prefixes: left descents of the first factor.
pub fn simple_prefixes(sys: &CoxeterSystem, b: &BraidElement) -> BTreeSet<Gen> {
    match b.factors.first() {
        None => BTreeSet::new(),
        Some(f) => sys.left_descents(f).into_iter().collect(),
    }
}

/// Left quotient by a single generator, if it divides.
pub fn strip_gen(sys: &CoxeterSystem, s: Gen, b: &BraidElement) -> Option<BraidElement> {
    let first = b.factors.first()?;
    if !sys.is_left_descent(first, s) {
        return None;
    }
    let mut factors = b.factors.clone();
    factors[0] = sys.gen_mul(s, first).expect("same system");
    Some(BraidElement {
        sig: b.sig,
        factors: normalize(sys, factors),
    })
}

/// Whether a left-divides b.
pub fn left_divides(sys: &CoxeterSystem, a: &BraidElement, b: &BraidElement) -> Result<bool> {
    let sig = sys.identity().sig();
    if a.sig != sig || b.sig != sig {
        return Err(Error::SystemMismatch);
    }
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        let s = match simple_prefixes(sys, &a).into_iter().next() {
            None => return Ok(true),
            Some(s) => s,
        };
        match strip_gen(sys, s, &b) {
            None => return Ok(false),
            Some(b2) => {
                a = strip_gen(sys, s, &a).expect("s is a prefix of a");
                b = b2;
            }
        }
    }
}

/// The unique c with a·c = b.
pub fn left_quotient(sys: &CoxeterSystem, a: &BraidElement, b: &BraidElement) -> Result<BraidElement> {
    let sig = sys.identity().sig();
    if a.sig != sig || b.sig != sig {
        return Err(Error::SystemMismatch);
    }
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        let s = match simple_prefixes(sys, &a).into_iter().next() {
            None => return Ok(b),
            Some(s) => s,
        };
        match strip_gen(sys, s, &b) {
            None => return Err(Error::NotDivisible),
            Some(b2) => {
                a = strip_gen(sys, s, &a).expect("s is a prefix of a");
                b = b2;
            }
        }
    }
}

/// Greatest common left divisor, by stripping common simple prefixes
/// (smallest generator first).
pub fn left_gcd(sys: &CoxeterSystem, a: &BraidElement, b: &BraidElement) -> Result<BraidElement> {
    let sig = sys.identity().sig();
    if a.sig != sig || b.sig != sig {
        return Err(Error::SystemMismatch);
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut word: Vec<Gen> = Vec::new();
    loop {
        let pa = simple_prefixes(sys, &a);
        let pb = simple_prefixes(sys, &b);
        match pa.intersection(&pb).next().copied() {
            None => return Ok(from_letter_word(sys, &word)),
            Some(s) => {
                word.push(s);
                a = strip_gen(sys, s, &a).expect("common prefix");
                b = strip_gen(sys, s, &b).expect("common prefix");
            }
        }
    }
}

/// Maximal reduced left prefix: the first normal-form factor.
pub fn alpha(sys: &CoxeterSystem, b: &BraidElement) -> GroupElement {
    b.factors.first().cloned().unwrap_or_else(|| sys.identity())
}

/// All left divisors of b, sorted, with a count budget.
pub fn left_divisors(
    sys: &CoxeterSystem,
    b: &BraidElement,
    max_count: usize,
) -> Result<Vec<BraidElement>> {
    let mut seen: BTreeMap<Vec<u8>, (BraidElement, BraidElement)> = BTreeMap::new();
    let root = (empty(sys), b.clone());
    seen.insert(root.0.key(), root);
    let mut frontier: Vec<Vec<u8>> = alloc::vec![Vec::new()];
    while let Some(k) = frontier.pop() {
        let (div, quot) = seen.get(&k).expect("frontier key present").clone();
        for s in simple_prefixes(sys, &quot) {
            let d2 = bmul(sys, &div, &lift(sys, &sys.gen(s)))?;
            let key = d2.key();
            if !seen.contains_key(&key) {
                let q2 = strip_gen(sys, s, &quot).expect("prefix");
                seen.insert(key.clone(), (d2, q2));
                frontier.push(key);
                if seen.len() > max_count {
                    return Err(Error::BudgetExceeded {
                        budget: max_count,
                        needed: seen.len(),
                    });
                }
            }
        }
    }
    let mut out: Vec<BraidElement> = seen.into_values().map(|(d, _)| d).collect();
    out.sort();
    Ok(out)
}
