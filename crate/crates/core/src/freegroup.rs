//! Reduced words of free groups, the Boolean (exponent-2) variant,
//! induced homomorphisms, and membership in pair subgroups.
//!
//! Generators are opaque canonical byte strings so that words sort, hash
//! and print deterministically. A group element is either a reduced word
//! over signed generators (free mode) or a finite generator set with
//! symmetric difference as the operation (Boolean mode).

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("mode mismatch between free and boolean elements")]
    ModeMismatch,
    #[error("generator {0:?} is not mapped")]
    UnmappedGenerator(String),
    #[error("undecidable configuration refused: non-functional linkage in free mode")]
    NonFunctionalLinkage,
    #[error("cannot parse group element from {0:?}")]
    Parse(String),
}

/// Canonical generator key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Generator(pub String);

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// Element of a free group or of its Boolean quotient.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum GroupElement {
    /// Reduced word: no adjacent `g^{+1} g^{-1}` or `g^{-1} g^{+1}`.
    Free(Vec<(Generator, i8)>),
    /// Finite generator set; the product is symmetric difference.
    Boolean(BTreeSet<Generator>),
}

impl GroupElement {
    pub fn identity_free() -> Self {
        GroupElement::Free(Vec::new())
    }

    pub fn identity_boolean() -> Self {
        GroupElement::Boolean(BTreeSet::new())
    }

    pub fn generator_free(g: Generator) -> Self {
        GroupElement::Free(vec![(g, 1)])
    }

    pub fn generator_boolean(g: Generator) -> Self {
        GroupElement::Boolean(BTreeSet::from([g]))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Free(w) => w.is_empty(),
            GroupElement::Boolean(s) => s.is_empty(),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, GroupElement::Free(_))
    }

    /// Word length (free) or support size (Boolean).
    pub fn len(&self) -> usize {
        match self {
            GroupElement::Free(w) => w.len(),
            GroupElement::Boolean(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Generators occurring in the element.
    pub fn support(&self) -> BTreeSet<&Generator> {
        match self {
            GroupElement::Free(w) => w.iter().map(|(g, _)| g).collect(),
            GroupElement::Boolean(s) => s.iter().collect(),
        }
    }

    /// Sum of exponents (free) or parity-as-count (Boolean support size).
    pub fn exponent_sum(&self) -> i64 {
        match self {
            GroupElement::Free(w) => w.iter().map(|&(_, s)| s as i64).sum(),
            GroupElement::Boolean(s) => s.len() as i64,
        }
    }
}

fn push_reduced(word: &mut Vec<(Generator, i8)>, letter: (Generator, i8)) {
    if let Some(last) = word.last() {
        if last.0 == letter.0 && last.1 == -letter.1 {
            word.pop();
            return;
        }
    }
    word.push(letter);
}

/// Reduce a raw letter sequence to normal form.
pub fn reduce(letters: impl IntoIterator<Item = (Generator, i8)>) -> Vec<(Generator, i8)> {
    let mut out = Vec::new();
    for l in letters {
        push_reduced(&mut out, l);
    }
    out
}

/// Group product; reduced concatenation in free mode, symmetric
/// difference in Boolean mode.
pub fn gmul(a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
    match (a, b) {
        (GroupElement::Free(x), GroupElement::Free(y)) => {
            let mut w = x.clone();
            for l in y {
                push_reduced(&mut w, l.clone());
            }
            Ok(GroupElement::Free(w))
        }
        (GroupElement::Boolean(x), GroupElement::Boolean(y)) => Ok(GroupElement::Boolean(
            x.symmetric_difference(y).cloned().collect(),
        )),
        _ => Err(GroupError::ModeMismatch),
    }
}

pub fn ginv(a: &GroupElement) -> GroupElement {
    match a {
        GroupElement::Free(w) => {
            GroupElement::Free(w.iter().rev().map(|(g, s)| (g.clone(), -s)).collect())
        }
        GroupElement::Boolean(s) => GroupElement::Boolean(s.clone()),
    }
}

/// Image of `a` under the homomorphism sending each generator through
/// `gen_map`, re-reduced.
pub fn induced_hom(
    gen_map: impl Fn(&Generator) -> Option<Generator>,
    a: &GroupElement,
) -> Result<GroupElement, GroupError> {
    match a {
        GroupElement::Free(w) => {
            let mut out = Vec::new();
            for (g, s) in w {
                let img = gen_map(g).ok_or_else(|| GroupError::UnmappedGenerator(g.0.clone()))?;
                push_reduced(&mut out, (img, *s));
            }
            Ok(GroupElement::Free(out))
        }
        GroupElement::Boolean(set) => {
            let mut out = BTreeSet::new();
            for g in set {
                let img = gen_map(g).ok_or_else(|| GroupError::UnmappedGenerator(g.0.clone()))?;
                if !out.remove(&img) {
                    out.insert(img);
                }
            }
            Ok(GroupElement::Boolean(out))
        }
    }
}

/// Generating data for a pair subgroup of `G_{s1} × G_{s2}`.
pub enum Linkage {
    /// Graph of a map from right-sort generators to left-sort generators.
    Functional(BTreeMap<Generator, Generator>),
    /// Explicit generating pairs `(left, right)`.
    Pairs(Vec<(Generator, Generator)>),
}

/// Is `(x1, x2)` in the subgroup of the product generated by the linked
/// generator pairs?
///
/// In free mode the linkage must be functional (a graph of a map); the
/// general case is refused as undecidable. In Boolean mode arbitrary
/// pair lists are solved as a GF(2) linear system.
pub fn pair_membership(
    linkage: &Linkage,
    x1: &GroupElement,
    x2: &GroupElement,
) -> Result<bool, GroupError> {
    match (x1, x2) {
        (GroupElement::Free(_), GroupElement::Free(_)) => {
            let map: BTreeMap<Generator, Generator> = match linkage {
                Linkage::Functional(m) => m.clone(),
                Linkage::Pairs(pairs) => {
                    let mut m = BTreeMap::new();
                    for (t1, t2) in pairs {
                        if let Some(prev) = m.insert(t2.clone(), t1.clone()) {
                            if prev != *t1 {
                                return Err(GroupError::NonFunctionalLinkage);
                            }
                        }
                    }
                    m
                }
            };
            // x2 must lie in the subgroup generated by the linked right
            // components, and x1 must be its image.
            if x2.support().iter().any(|g| !map.contains_key(g)) {
                return Ok(false);
            }
            let image = induced_hom(|g| map.get(g).cloned(), x2)?;
            Ok(image == *x1)
        }
        (GroupElement::Boolean(w1), GroupElement::Boolean(w2)) => {
            let pairs: Vec<(Generator, Generator)> = match linkage {
                Linkage::Functional(m) => {
                    m.iter().map(|(t2, t1)| (t1.clone(), t2.clone())).collect()
                }
                Linkage::Pairs(p) => p.clone(),
            };
            Ok(gf2_solvable(&pairs, w1, w2))
        }
        _ => Err(GroupError::ModeMismatch),
    }
}

/// Solve for a subset S of generating pairs with
/// `⊕_{i∈S} left_i = w1` and `⊕_{i∈S} right_i = w2` over GF(2).
fn gf2_solvable(
    pairs: &[(Generator, Generator)],
    w1: &BTreeSet<Generator>,
    w2: &BTreeSet<Generator>,
) -> bool {
    // Row space: one coordinate per (side, generator) that occurs anywhere.
    let mut coords: BTreeMap<(bool, &Generator), usize> = BTreeMap::new();
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(pairs.len());
    for (l, r) in pairs {
        let next = coords.len();
        let a = *coords.entry((false, l)).or_insert(next);
        let next = coords.len();
        let b = *coords.entry((true, r)).or_insert(next);
        cols.push(vec![a, b]);
    }
    let mut target: BTreeSet<usize> = BTreeSet::new();
    for g in w1 {
        if !coords.contains_key(&(false, g)) {
            return false;
        }
        target.insert(coords[&(false, g)]);
    }
    for g in w2 {
        if !coords.contains_key(&(true, g)) {
            return false;
        }
        target.insert(coords[&(true, g)]);
    }
    let dim = coords.len();
    // Gaussian elimination over column vectors.
    let mut basis: Vec<Vec<u64>> = Vec::new(); // bitset rows of length dim
    let words = dim.div_ceil(64);
    let to_bits = |idxs: &[usize]| {
        let mut v = vec![0u64; words];
        for &i in idxs {
            v[i / 64] ^= 1 << (i % 64);
        }
        v
    };
    for col in &cols {
        basis.push(to_bits(col));
    }
    let mut t = to_bits(&target.iter().copied().collect::<Vec<_>>());
    // reduce basis to row echelon by leading bit
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    'outer: for mut v in basis {
        loop {
            let Some(lead) = leading_bit(&v) else {
                continue 'outer;
            };
            if let Some((_, pv)) = pivots.iter().find(|(l, _)| *l == lead) {
                for (a, b) in v.iter_mut().zip(pv.iter()) {
                    *a ^= b;
                }
            } else {
                pivots.push((lead, v));
                continue 'outer;
            }
        }
    }
    loop {
        let Some(lead) = leading_bit(&t) else {
            return true;
        };
        let Some((_, pv)) = pivots.iter().find(|(l, _)| *l == lead) else {
            return false;
        };
        for (a, b) in t.iter_mut().zip(pv.iter()) {
            *a ^= b;
        }
    }
}

fn leading_bit(v: &[u64]) -> Option<usize> {
    for (i, w) in v.iter().enumerate() {
        if *w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

/// Word syntax: `e`, `g<key>`, `g<key>^-1`, `*`-separated products;
/// Boolean elements print as `{g<k1>, g<k2>}` with sorted keys.
impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Free(w) => {
                if w.is_empty() {
                    return write!(f, "e");
                }
                let mut first = true;
                for (g, s) in w {
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    write!(f, "g{}", g.0)?;
                    if *s < 0 {
                        write!(f, "^-1")?;
                    }
                }
                Ok(())
            }
            GroupElement::Boolean(set) => {
                if set.is_empty() {
                    return write!(f, "e");
                }
                write!(f, "{{")?;
                let mut first = true;
                for g in set {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "g{}", g.0)?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl GroupElement {
    /// Parse the display syntax back. `boolean` selects the mode `e`
    /// parses into.
    pub fn parse(s: &str, boolean: bool) -> Result<Self, GroupError> {
        let bad = || GroupError::Parse(s.to_string());
        let s = s.trim();
        if s == "e" {
            return Ok(if boolean {
                Self::identity_boolean()
            } else {
                Self::identity_free()
            });
        }
        if let Some(body) = s.strip_prefix('{') {
            let body = body.strip_suffix('}').ok_or_else(bad)?;
            let mut set = BTreeSet::new();
            for part in body.split(", ") {
                let key = part.trim().strip_prefix('g').ok_or_else(bad)?;
                set.insert(Generator(key.to_string()));
            }
            return Ok(GroupElement::Boolean(set));
        }
        let mut word = Vec::new();
        for part in s.split('*') {
            let part = part.trim();
            let (body, sign) = match part.strip_suffix("^-1") {
                Some(b) => (b, -1),
                None => (part, 1),
            };
            let key = body.strip_prefix('g').ok_or_else(bad)?;
            push_reduced(&mut word, (Generator(key.to_string()), sign));
        }
        Ok(GroupElement::Free(word))
    }
}
