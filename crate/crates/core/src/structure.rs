//! Finite relational structures with partial unary functions and
//! constants, partial maps between them, and brute-force automorphism
//! search.
//!
//! Structure files are JSON:
//! `{"vocabulary": {...}, "universe": N, "relations": {name: [[ids]]},
//!   "functions": {name: {id: id}}, "constants": {name: id}}`.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("vocabularies of the two structures differ")]
    VocabularyMismatch,
    #[error("element id {0} outside the universe of size {1}")]
    ElementOutOfUniverse(u32, u32),
    #[error("symbol {0:?} not declared or declared twice")]
    BadSymbol(String),
    #[error("tuple arity mismatch for {0:?}")]
    ArityMismatch(String),
    #[error("result limit must be positive")]
    ZeroLimit,
    #[error("map is not functional or not injective")]
    BadMap,
}

/// Symbols of a finite first-order vocabulary: predicates with arity,
/// unary function symbols, constants. Names must be unique across kinds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Vocabulary {
    pub predicates: Vec<(String, usize)>,
    pub functions: Vec<String>,
    pub constants: Vec<String>,
}

impl Vocabulary {
    pub fn validate(&self) -> Result<(), StructureError> {
        let mut seen = BTreeSet::new();
        for (name, arity) in &self.predicates {
            if *arity == 0 || !seen.insert(name.clone()) {
                return Err(StructureError::BadSymbol(name.clone()));
            }
        }
        for name in self.functions.iter().chain(self.constants.iter()) {
            if !seen.insert(name.clone()) {
                return Err(StructureError::BadSymbol(name.clone()));
            }
        }
        Ok(())
    }
}

/// Finite structure over dense integer element ids `0..universe`,
/// treated as immutable once built.
///
/// Function interpretations are partial maps (off-sort arguments are
/// simply absent).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteStructure {
    pub vocabulary: Vocabulary,
    pub universe: u32,
    pub relations: BTreeMap<String, BTreeSet<Vec<u32>>>,
    pub functions: BTreeMap<String, BTreeMap<u32, u32>>,
    pub constants: BTreeMap<String, u32>,
}

impl FiniteStructure {
    pub fn new(vocabulary: Vocabulary, universe: u32) -> Result<Self, StructureError> {
        vocabulary.validate()?;
        let relations = vocabulary
            .predicates
            .iter()
            .map(|(n, _)| (n.clone(), BTreeSet::new()))
            .collect();
        let functions = vocabulary
            .functions
            .iter()
            .map(|n| (n.clone(), BTreeMap::new()))
            .collect();
        Ok(FiniteStructure {
            vocabulary,
            universe,
            relations,
            functions,
            constants: BTreeMap::new(),
        })
    }

    fn check_elem(&self, id: u32) -> Result<(), StructureError> {
        if id >= self.universe {
            Err(StructureError::ElementOutOfUniverse(id, self.universe))
        } else {
            Ok(())
        }
    }

    pub fn add_tuple(&mut self, predicate: &str, tuple: Vec<u32>) -> Result<(), StructureError> {
        let arity = self
            .vocabulary
            .predicates
            .iter()
            .find(|(n, _)| n == predicate)
            .map(|(_, a)| *a)
            .ok_or_else(|| StructureError::BadSymbol(predicate.to_string()))?;
        if tuple.len() != arity {
            return Err(StructureError::ArityMismatch(predicate.to_string()));
        }
        for &id in &tuple {
            self.check_elem(id)?;
        }
        self.relations.get_mut(predicate).unwrap().insert(tuple);
        Ok(())
    }

    pub fn set_function(&mut self, name: &str, arg: u32, val: u32) -> Result<(), StructureError> {
        if !self.vocabulary.functions.iter().any(|n| n == name) {
            return Err(StructureError::BadSymbol(name.to_string()));
        }
        self.check_elem(arg)?;
        self.check_elem(val)?;
        self.functions.get_mut(name).unwrap().insert(arg, val);
        Ok(())
    }

    pub fn set_constant(&mut self, name: &str, val: u32) -> Result<(), StructureError> {
        if !self.vocabulary.constants.iter().any(|n| n == name) {
            return Err(StructureError::BadSymbol(name.to_string()));
        }
        self.check_elem(val)?;
        self.constants.insert(name.to_string(), val);
        Ok(())
    }

    /// Validate internal consistency (used after deserializing).
    pub fn validate(&self) -> Result<(), StructureError> {
        self.vocabulary.validate()?;
        for (name, tuples) in &self.relations {
            let arity = self
                .vocabulary
                .predicates
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, a)| *a)
                .ok_or_else(|| StructureError::BadSymbol(name.clone()))?;
            for t in tuples {
                if t.len() != arity {
                    return Err(StructureError::ArityMismatch(name.clone()));
                }
                for &id in t {
                    self.check_elem(id)?;
                }
            }
        }
        for (name, map) in &self.functions {
            if !self.vocabulary.functions.iter().any(|n| n == name) {
                return Err(StructureError::BadSymbol(name.clone()));
            }
            for (&a, &v) in map {
                self.check_elem(a)?;
                self.check_elem(v)?;
            }
        }
        for (name, &v) in &self.constants {
            if !self.vocabulary.constants.iter().any(|n| n == name) {
                return Err(StructureError::BadSymbol(name.clone()));
            }
            self.check_elem(v)?;
        }
        Ok(())
    }

    /// A linear order `0 < 1 < ... < n-1` with binary predicate `lt`.
    pub fn linear_order(n: u32) -> FiniteStructure {
        let vocab = Vocabulary {
            predicates: vec![("lt".to_string(), 2)],
            functions: vec![],
            constants: vec![],
        };
        let mut s = FiniteStructure::new(vocab, n).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                s.add_tuple("lt", vec![i, j]).unwrap();
            }
        }
        s
    }
}

/// Finite partial map between element ids; functional and injective.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct PartialMap {
    pairs: Vec<(u32, u32)>,
}

impl PartialMap {
    pub fn empty() -> Self {
        PartialMap { pairs: Vec::new() }
    }

    pub fn from_pairs(pairs: Vec<(u32, u32)>) -> Result<Self, StructureError> {
        let mut m = PartialMap::empty();
        for (a, b) in pairs {
            m.insert(a, b)?;
        }
        Ok(m)
    }

    /// Add a pair; re-adding an existing pair is a no-op, conflicting
    /// pairs are rejected.
    pub fn insert(&mut self, a: u32, b: u32) -> Result<(), StructureError> {
        for &(x, y) in &self.pairs {
            if x == a {
                return if y == b {
                    Ok(())
                } else {
                    Err(StructureError::BadMap)
                };
            }
            if y == b {
                return Err(StructureError::BadMap);
            }
        }
        self.pairs.push((a, b));
        Ok(())
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn apply(&self, a: u32) -> Option<u32> {
        self.pairs.iter().find(|&&(x, _)| x == a).map(|&(_, y)| y)
    }

    pub fn preimage(&self, b: u32) -> Option<u32> {
        self.pairs.iter().find(|&&(_, y)| y == b).map(|&(x, _)| x)
    }

    pub fn inverse(&self) -> PartialMap {
        PartialMap {
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    pub fn contains_all(&self, other: &PartialMap) -> bool {
        other.pairs.iter().all(|&(a, b)| self.apply(a) == Some(b))
    }

    /// Canonical sorted copy, for memo keys and deterministic output.
    pub fn canonical(&self) -> Vec<(u32, u32)> {
        let mut v = self.pairs.clone();
        v.sort_unstable();
        v
    }
}

/// Does `f` preserve, in both directions, every predicate on captured
/// tuples, every constant pair that appears in it, and every function
/// symbol on captured argument/value pairs?
pub fn check_partial_isomorphism(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &PartialMap,
) -> Result<bool, StructureError> {
    if a.vocabulary != b.vocabulary {
        return Err(StructureError::VocabularyMismatch);
    }
    for &(x, y) in f.pairs() {
        a.check_elem(x)?;
        b.check_elem(y)?;
    }
    // predicates, both directions
    for (name, arity) in &a.vocabulary.predicates {
        let ra = &a.relations[name];
        let rb = &b.relations[name];
        let dom: Vec<u32> = f.pairs().iter().map(|&(x, _)| x).collect();
        for tuple in tuples_over(&dom, *arity) {
            let image: Vec<u32> = tuple.iter().map(|&x| f.apply(x).unwrap()).collect();
            if ra.contains(&tuple) != rb.contains(&image) {
                return Ok(false);
            }
        }
    }
    // constants captured by the map must correspond
    for name in &a.vocabulary.constants {
        let ca = a.constants.get(name);
        let cb = b.constants.get(name);
        if let Some(&ca) = ca {
            if let Some(y) = f.apply(ca) {
                if cb != Some(&y) {
                    return Ok(false);
                }
            }
        }
        if let Some(&cb) = cb {
            if let Some(x) = f.preimage(cb) {
                if ca != Some(&x) {
                    return Ok(false);
                }
            }
        }
    }
    // functions on captured argument/value pairs, both directions
    for name in &a.vocabulary.functions {
        let fa = &a.functions[name];
        let fb = &b.functions[name];
        for &(x, y) in f.pairs() {
            if let Some(&vx) = fa.get(&x) {
                if let Some(img) = f.apply(vx) {
                    if fb.get(&y) != Some(&img) {
                        return Ok(false);
                    }
                }
            }
            if let Some(&vy) = fb.get(&y) {
                if let Some(pre) = f.preimage(vy) {
                    if fa.get(&x) != Some(&pre) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn tuples_over(dom: &[u32], arity: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                dom.iter().map(move |&x| {
                    let mut t2 = t.clone();
                    t2.push(x);
                    t2
                })
            })
            .collect();
    }
    out
}

/// All automorphisms of `a` up to `limit`, identity first, in canonical
/// lexicographic order of their pair lists.
pub fn automorphism_search(
    a: &FiniteStructure,
    limit: usize,
) -> Result<Vec<PartialMap>, StructureError> {
    if limit == 0 {
        return Err(StructureError::ZeroLimit);
    }
    let n = a.universe;
    let mut results: Vec<PartialMap> = Vec::new();
    let mut image: Vec<Option<u32>> = vec![None; n as usize];
    let mut used: Vec<bool> = vec![false; n as usize];
    fn backtrack(
        a: &FiniteStructure,
        depth: u32,
        image: &mut Vec<Option<u32>>,
        used: &mut Vec<bool>,
        results: &mut Vec<PartialMap>,
        limit: usize,
    ) -> Result<(), StructureError> {
        if results.len() >= limit {
            return Ok(());
        }
        let n = a.universe;
        if depth == n {
            let pairs: Vec<(u32, u32)> = (0..n).map(|i| (i, image[i as usize].unwrap())).collect();
            results.push(PartialMap::from_pairs(pairs)?);
            return Ok(());
        }
        for cand in 0..n {
            if used[cand as usize] {
                continue;
            }
            image[depth as usize] = Some(cand);
            used[cand as usize] = true;
            let partial = PartialMap::from_pairs(
                (0..=depth)
                    .map(|i| (i, image[i as usize].unwrap()))
                    .collect(),
            )?;
            if check_partial_isomorphism(a, a, &partial)? {
                backtrack(a, depth + 1, image, used, results, limit)?;
            }
            image[depth as usize] = None;
            used[cand as usize] = false;
            if results.len() >= limit {
                return Ok(());
            }
        }
        Ok(())
    }
    backtrack(a, 0, &mut image, &mut used, &mut results, limit)?;
    results.sort_by_key(|x| x.canonical());
    // identity comes first in lexicographic order only when present; put
    // it first explicitly to honor the output contract.
    let identity: Vec<(u32, u32)> = (0..n).map(|i| (i, i)).collect();
    if let Some(pos) = results.iter().position(|m| m.canonical() == identity) {
        let id = results.remove(pos);
        results.insert(0, id);
    }
    Ok(results)
}
