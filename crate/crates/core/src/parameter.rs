//! Desk-scale parameters for the sorted free-group model: the generator
//! key space, the linkage relation between keys, and the machinery that
//! turns a monotone map into an indexed translation family.
//!
//! A [`ParameterSpec`] fixes a finite sort universe `[0, N)` standing in
//! for an uncountable cardinal, an ordinal bound `alpha_star` for key
//! tags, the group mode (free words or Boolean sets) and the linkage
//! variant. Sorts are finite subsets of `[0, N)`; each sort `u` carries
//! a free group whose generators are [`GeneratorKey`]s — quadruples
//! `(u, α, g, h)` with `g` a non-decreasing ordinal-valued map on `u`,
//! `h` a non-decreasing natural-valued map on `u`, `h(β) > β`, and equal
//! `g`-values forcing equal `h`-values. Cross-sort structure comes from
//! the linkage relation on keys; see [`linkable`].

use crate::freegroup::Generator;
use crate::ordinal::Ordinal;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("sort element {0} out of range [0, {1})")]
    SortOutOfRange(String, u64),
    #[error("key maps must be defined exactly on u: {0}")]
    BadKeyShape(String),
    #[error("not a subsort: {0}")]
    NotSubsort(String),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("spec invariant violated: {0}")]
    BadSpec(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Group mode: reduced free-group words or the Boolean variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Free,
    Boolean,
}

/// Linkage variant. `Uniform` demands equal tags on linked keys.
/// `ZeroFree` waives tag equality for keys whose `g` is constantly zero,
/// which pins one anchor generator across all game lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Variant {
    Uniform,
    ZeroFree,
}

/// Desk-scale parameter bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParameterSpec {
    /// Finite stand-in for the cardinal: sorts are subsets of `[0, N)`.
    pub n: u64,
    /// Strict upper bound for key tags.
    pub alpha_star: Ordinal,
    pub mode: Mode,
    pub variant: Variant,
    /// Strict upper bound for h-values; must exceed `n`.
    pub h_ceiling: u64,
    /// The sup-of-u clause of the zero-free linkage; harmless under the
    /// reading `γ^t = sup(u^t)` but kept toggleable.
    #[serde(default = "default_true")]
    pub zero_free_gamma_clause: bool,
}

fn default_true() -> bool {
    true
}

impl ParameterSpec {
    pub fn new(
        n: u64,
        alpha_star: Ordinal,
        mode: Mode,
        variant: Variant,
        h_ceiling: u64,
    ) -> Result<Self, ParamError> {
        let spec = ParameterSpec {
            n,
            alpha_star,
            mode,
            variant,
            h_ceiling,
            zero_free_gamma_clause: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The canonical spec used throughout the test campaigns.
    pub fn canonical(n: u64, alpha_star: u64, mode: Mode, variant: Variant) -> Self {
        ParameterSpec::new(n, Ordinal::nat(alpha_star), mode, variant, n + 64).unwrap()
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n < 2 {
            return Err(ParamError::BadSpec("N must be at least 2".into()));
        }
        if self.h_ceiling <= self.n {
            return Err(ParamError::BadSpec("hCeiling must exceed N".into()));
        }
        Ok(())
    }
}

/// A sort: a finite, non-empty-by-convention set of naturals below N.
/// The empty set is representable but excluded from sort pools.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SortId(pub BTreeSet<u64>);

impl SortId {
    pub fn new(elems: impl IntoIterator<Item = u64>) -> Self {
        SortId(elems.into_iter().collect())
    }

    pub fn is_subsort_of(&self, other: &SortId) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn max(&self) -> Option<u64> {
        self.0.iter().next_back().copied()
    }

    /// `∪{γ+1 : γ ∈ u}`: zero on the empty sort.
    pub fn gamma_star(&self) -> u64 {
        self.max().map_or(0, |m| m + 1)
    }

    pub fn union(&self, other: &SortId) -> SortId {
        SortId(self.0.union(&other.0).cloned().collect())
    }
}

impl fmt::Display for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for x in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Generator key `(u, α-tag, g, h)`. The canonical serialization doubles
/// as the free-group generator name, so keys sort and hash
/// deterministically everywhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneratorKey {
    pub u: BTreeSet<u64>,
    pub alpha_tag: Ordinal,
    pub g: BTreeMap<u64, Ordinal>,
    pub h: BTreeMap<u64, u64>,
}

impl GeneratorKey {
    pub fn new(
        u: BTreeSet<u64>,
        alpha_tag: Ordinal,
        g: BTreeMap<u64, Ordinal>,
        h: BTreeMap<u64, u64>,
    ) -> Result<Self, ParamError> {
        let key = GeneratorKey { u, alpha_tag, g, h };
        if key.g.keys().cloned().collect::<BTreeSet<_>>() != key.u
            || key.h.keys().cloned().collect::<BTreeSet<_>>() != key.u
        {
            return Err(ParamError::BadKeyShape(key.canonical_string()));
        }
        Ok(key)
    }

    pub fn sort(&self) -> SortId {
        SortId(self.u.clone())
    }

    /// `u=[..];a=<ord>;g=[(β,ord)..];h=[(β,n)..]` with sorted components.
    pub fn canonical_string(&self) -> String {
        let us: Vec<String> = self.u.iter().map(|x| x.to_string()).collect();
        let gs: Vec<String> = self.g.iter().map(|(b, v)| format!("({b},{v})")).collect();
        let hs: Vec<String> = self.h.iter().map(|(b, v)| format!("({b},{v})")).collect();
        format!(
            "u=[{}];a={};g=[{}];h=[{}]",
            us.join(","),
            self.alpha_tag,
            gs.join(","),
            hs.join(",")
        )
    }

    pub fn parse(s: &str) -> Result<Self, ParamError> {
        let bad = || ParamError::Parse(s.to_string());
        let mut u = BTreeSet::new();
        let mut alpha_tag = None;
        let mut g = BTreeMap::new();
        let mut h = BTreeMap::new();
        for field in s.split(';') {
            let (name, val) = field.split_once('=').ok_or_else(bad)?;
            let body = val
                .strip_prefix('[')
                .and_then(|v| v.strip_suffix(']'))
                .unwrap_or(val);
            match name {
                "u" => {
                    for part in body.split(',').filter(|p| !p.is_empty()) {
                        u.insert(part.parse::<u64>().map_err(|_| bad())?);
                    }
                }
                "a" => alpha_tag = Some(val.parse::<Ordinal>().map_err(|_| bad())?),
                "g" | "h" => {
                    // entries look like (β,value),(β,value)
                    for part in body.split("),(").filter(|p| !p.is_empty()) {
                        let part = part.trim_start_matches('(').trim_end_matches(')');
                        let (b, v) = part.split_once(',').ok_or_else(bad)?;
                        let beta = b.parse::<u64>().map_err(|_| bad())?;
                        if name == "g" {
                            g.insert(beta, v.parse::<Ordinal>().map_err(|_| bad())?);
                        } else {
                            h.insert(beta, v.parse::<u64>().map_err(|_| bad())?);
                        }
                    }
                }
                _ => return Err(bad()),
            }
        }
        GeneratorKey::new(u, alpha_tag.ok_or_else(bad)?, g, h).map_err(|_| bad())
    }

    pub fn generator(&self) -> Generator {
        Generator(self.canonical_string())
    }

    /// Is `g` constantly zero on `u`?
    pub fn zero_range(&self) -> bool {
        self.g.values().all(|v| v.is_zero())
    }
}

impl fmt::Display for GeneratorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl fmt::Debug for GeneratorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

/// Does the key satisfy all membership clauses of the canonical key
/// space? `u` out of range is an error; every other violation makes the
/// answer `false`.
pub fn j_membership(spec: &ParameterSpec, t: &GeneratorKey) -> Result<bool, ParamError> {
    if let Some(&beta) = t.u.iter().find(|&&b| b >= spec.n) {
        return Err(ParamError::SortOutOfRange(format!("{beta}"), spec.n));
    }
    if t.alpha_tag.compare(&spec.alpha_star) != std::cmp::Ordering::Less {
        return Ok(false);
    }
    let mut prev_g: Option<&Ordinal> = None;
    let mut prev_h: Option<u64> = None;
    let mut level_h: BTreeMap<&Ordinal, u64> = BTreeMap::new();
    for (&beta, gv) in &t.g {
        let hv = t.h[&beta];
        // (iii): g non-decreasing with values below the tag
        if gv.compare(&t.alpha_tag) != std::cmp::Ordering::Less {
            return Ok(false);
        }
        if let Some(p) = prev_g {
            if gv.compare(p) == std::cmp::Ordering::Less {
                return Ok(false);
            }
        }
        prev_g = Some(gv);
        // (ii): h non-decreasing into the ceiling
        if hv >= spec.h_ceiling {
            return Ok(false);
        }
        if let Some(p) = prev_h {
            if hv < p {
                return Ok(false);
            }
        }
        prev_h = Some(hv);
        // (v): h(β) > β
        if hv <= beta {
            return Ok(false);
        }
        // (iv): equal g-values share their h-value
        if let Some(&h0) = level_h.get(gv) {
            if h0 != hv {
                return Ok(false);
            }
        } else {
            level_h.insert(gv, hv);
        }
    }
    Ok(true)
}

/// The nested linkage clause: `u ⊆`, `g ⊆`, `h ⊆` as graphs, with equal
/// tags in the uniform variant and the zero-range tag waiver in the
/// zero-free variant.
pub fn t_membership(
    spec: &ParameterSpec,
    t1: &GeneratorKey,
    t2: &GeneratorKey,
) -> Result<bool, ParamError> {
    t_membership_ext(spec, t1, t2, spec.zero_free_gamma_clause)
}

pub fn t_membership_ext(
    spec: &ParameterSpec,
    t1: &GeneratorKey,
    t2: &GeneratorKey,
    gamma_clause: bool,
) -> Result<bool, ParamError> {
    for t in [t1, t2] {
        if !j_membership(spec, t)? {
            return Err(ParamError::InvalidKey(t.canonical_string()));
        }
    }
    if !t1.u.is_subset(&t2.u) {
        return Ok(false);
    }
    for (&beta, gv) in &t1.g {
        if t2.g[&beta] != *gv || t2.h[&beta] != t1.h[&beta] {
            return Ok(false);
        }
    }
    match spec.variant {
        Variant::Uniform => Ok(t1.alpha_tag == t2.alpha_tag),
        Variant::ZeroFree => {
            if gamma_clause {
                let g1 = t1.u.iter().next_back().map_or(0, |m| m + 1);
                let g2 = t2.u.iter().next_back().map_or(0, |m| m + 1);
                if g1 > g2 {
                    return Ok(false);
                }
            }
            Ok(t1.zero_range() || t1.alpha_tag == t2.alpha_tag)
        }
    }
}

/// Joint datum of up to two keys: merged `g` and `h` graphs.
struct JointDatum {
    g: BTreeMap<u64, Ordinal>,
    h: BTreeMap<u64, u64>,
}

fn merge_keys(t1: &GeneratorKey, t2: &GeneratorKey) -> Option<JointDatum> {
    let mut g = t1.g.clone();
    let mut h = t1.h.clone();
    for (&beta, gv) in &t2.g {
        if let Some(prev) = g.insert(beta, gv.clone()) {
            if prev != *gv {
                return None;
            }
        }
        let hv = t2.h[&beta];
        if let Some(prev) = h.insert(beta, hv) {
            if prev != hv {
                return None;
            }
        }
    }
    Some(JointDatum { g, h })
}

/// Is the datum the restriction of `(g↾u, h_g↾u)` for a single global
/// non-decreasing `g`? Characterized pointwise: both maps non-decreasing,
/// equal g-values share h, `h(β) > β`, and whenever `g(β) < g(β′)` the
/// exceed point `h(β)` is at most `β′`.
fn datum_realizable(spec: &ParameterSpec, d: &JointDatum) -> bool {
    let mut prev: Option<(&Ordinal, u64)> = None;
    let mut level_h: BTreeMap<&Ordinal, u64> = BTreeMap::new();
    for (&beta, gv) in &d.g {
        let hv = d.h[&beta];
        if hv >= spec.h_ceiling || hv <= beta {
            return false;
        }
        if let Some((pg, ph)) = prev {
            if gv.compare(pg) == std::cmp::Ordering::Less || hv < ph {
                return false;
            }
        }
        prev = Some((gv, hv));
        if let Some(&h0) = level_h.get(gv) {
            if h0 != hv {
                return false;
            }
        } else {
            level_h.insert(gv, hv);
        }
    }
    // cross clause: g(β) < g(β′) forces h(β) ≤ β′
    let entries: Vec<(&u64, &Ordinal)> = d.g.iter().collect();
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            let (bi, gi) = entries[i];
            let (bj, gj) = entries[j];
            if gi.compare(gj) == std::cmp::Ordering::Less && d.h[bi] > *bj {
                return false;
            }
        }
    }
    true
}

/// Is the key realizable from a single global monotone map?
pub fn realizable_key(spec: &ParameterSpec, t: &GeneratorKey) -> Result<bool, ParamError> {
    if !j_membership(spec, t)? {
        return Ok(false);
    }
    Ok(datum_realizable(
        spec,
        &JointDatum {
            g: t.g.clone(),
            h: t.h.clone(),
        },
    ))
}

/// A concrete monotone map realizing the key: constant between the
/// exceed points of its value levels, with domain at least `min_domain`.
/// Returns `None` when the key is not realizable or the tag has no room
/// for the extension value a longer domain needs.
pub fn canonical_realizer(
    spec: &ParameterSpec,
    t: &GeneratorKey,
    min_domain: u64,
    tag: &Ordinal,
) -> Option<TaggedMonotone> {
    if !realizable_key(spec, t).ok()? {
        return None;
    }
    if t.g.is_empty() {
        return Some(TaggedMonotone::zeros(tag.clone(), min_domain.max(1)));
    }
    // levels: distinct values with their shared exceed points
    let mut levels: Vec<(Ordinal, u64)> = Vec::new();
    for (&beta, gv) in &t.g {
        let hv = t.h[&beta];
        if levels.last().map(|(v, _)| v) != Some(gv) {
            levels.push((gv.clone(), hv));
        }
    }
    let base_domain = levels.last().unwrap().1;
    let mut values: Vec<Ordinal> = Vec::with_capacity(base_domain as usize);
    let mut level_idx = 0usize;
    for pos in 0..base_domain {
        while levels[level_idx].1 <= pos {
            level_idx += 1;
        }
        values.push(levels[level_idx].0.clone());
    }
    if min_domain > base_domain {
        // extend past the final exceed point with the next value up
        let bump = levels.last().unwrap().0.succ().ok()?;
        if bump.compare(tag) != std::cmp::Ordering::Less {
            return None;
        }
        for _ in base_domain..min_domain {
            values.push(bump.clone());
        }
    }
    if values
        .iter()
        .any(|v| v.compare(tag) != std::cmp::Ordering::Less)
    {
        return None;
    }
    TaggedMonotone::new(tag.clone(), values).ok()
}

/// The full linkage relation on keys: the nested clause of
/// [`t_membership`], or joint realizability from one global monotone map
/// (with the tag rules of the active variant). The joint arm is what
/// makes translation families coherent across incomparable sorts; the
/// nested arm keeps the subsort linkage exactly the graph of
/// [`project`].
pub fn linkable(
    spec: &ParameterSpec,
    t1: &GeneratorKey,
    t2: &GeneratorKey,
) -> Result<bool, ParamError> {
    if t_membership(spec, t1, t2)? {
        return Ok(true);
    }
    let Some(joint) = merge_keys(t1, t2) else {
        return Ok(false);
    };
    if !datum_realizable(spec, &joint) {
        return Ok(false);
    }
    // The sup-of-u clause stays confined to the nested arm: keys arising
    // from one common map must link in both orientations.
    match spec.variant {
        Variant::Uniform => Ok(t1.alpha_tag == t2.alpha_tag),
        Variant::ZeroFree => match (t1.zero_range(), t2.zero_range()) {
            (false, false) => Ok(t1.alpha_tag == t2.alpha_tag),
            _ => Ok(true),
        },
    }
}

/// Non-decreasing map from an initial segment of the naturals into an
/// ordinal tag. The tag is intrinsic: two maps with equal values but
/// different tags are different objects, which is what makes a key
/// determined by `(sort, g, h)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedMonotone {
    pub codomain_tag: Ordinal,
    pub values: Vec<Ordinal>,
}

impl TaggedMonotone {
    pub fn new(codomain_tag: Ordinal, values: Vec<Ordinal>) -> Result<Self, ParamError> {
        for w in values.windows(2) {
            if w[1].compare(&w[0]) == std::cmp::Ordering::Less {
                return Err(ParamError::BadSpec("values must be non-decreasing".into()));
            }
        }
        Ok(TaggedMonotone {
            codomain_tag,
            values,
        })
    }

    /// Constantly-zero map on `[0, domain)`.
    pub fn zeros(codomain_tag: Ordinal, domain: u64) -> Self {
        TaggedMonotone {
            codomain_tag,
            values: vec![Ordinal::zero(); domain as usize],
        }
    }

    pub fn domain(&self) -> u64 {
        self.values.len() as u64
    }

    /// Do all values lie strictly below the tag? The strategy keeps its
    /// play maps inside this; sampled maps may violate it deliberately.
    pub fn values_below_tag(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.compare(&self.codomain_tag) == std::cmp::Ordering::Less)
    }

    pub fn restrict(&self, domain: u64) -> TaggedMonotone {
        TaggedMonotone {
            codomain_tag: self.codomain_tag.clone(),
            values: self.values[..domain as usize].to_vec(),
        }
    }

    /// Does `other` extend `self` as a tagged graph?
    pub fn extends(&self, base: &TaggedMonotone) -> bool {
        self.codomain_tag == base.codomain_tag
            && self.values.len() >= base.values.len()
            && self.values[..base.values.len()] == base.values[..]
    }
}

/// The collapse-level map: `h(γ)` is the least `β′ ≤ domain` such that
/// either `β′ = domain` or `g(β′) > g(γ)`. Computed with a single
/// right-to-left sweep; the literal enumeration of the defining formula
/// is kept as a test oracle.
pub fn derive_h(g: &TaggedMonotone) -> Vec<u64> {
    let n = g.values.len();
    let mut h = vec![n as u64; n];
    // positions of the next strictly-greater value, scanning right to left
    let mut stack: Vec<usize> = Vec::new(); // indices with strictly increasing values right-to-left
    for i in (0..n).rev() {
        while let Some(&j) = stack.last() {
            if g.values[j].compare(&g.values[i]) == std::cmp::Ordering::Greater {
                break;
            }
            stack.pop();
        }
        if let Some(&j) = stack.last() {
            h[i] = j as u64;
        }
        stack.push(i);
    }
    h
}

/// The key a monotone map induces at a sort, when the sort lies inside
/// its domain. In the zero-free variant, zero-range keys are canonically
/// tagged 1 so the anchor generator is the same object at every game
/// length.
pub fn key_for_sort(
    spec: &ParameterSpec,
    g: &TaggedMonotone,
    sort: &SortId,
) -> Result<GeneratorKey, ParamError> {
    let h_all = derive_h(g);
    let mut gk = BTreeMap::new();
    let mut hk = BTreeMap::new();
    for &beta in &sort.0 {
        if beta >= g.domain() {
            return Err(ParamError::BadKeyShape(format!(
                "sort {sort} not inside domain {}",
                g.domain()
            )));
        }
        gk.insert(beta, g.values[beta as usize].clone());
        hk.insert(beta, h_all[beta as usize]);
    }
    let zero_range = gk.values().all(|v| v.is_zero());
    let tag = match spec.variant {
        Variant::ZeroFree if zero_range => Ordinal::nat(1),
        _ => g.codomain_tag.clone(),
    };
    GeneratorKey::new(sort.0.clone(), tag, gk, hk)
}

/// The sorts from `pool` that the map covers and keys validly:
/// `u ⊆ [0, domain)` and the induced key passes [`j_membership`].
/// Empty sorts are excluded by convention.
pub fn index_set(
    spec: &ParameterSpec,
    g: &TaggedMonotone,
    pool: &[SortId],
) -> Result<Vec<SortId>, ParamError> {
    let mut out = Vec::new();
    for s in pool {
        if s.0.is_empty() {
            continue;
        }
        if let Some(&beta) = s.0.iter().find(|&&b| b >= spec.n) {
            return Err(ParamError::SortOutOfRange(format!("{beta}"), spec.n));
        }
        if s.gamma_star() > g.domain() {
            continue;
        }
        let key = key_for_sort(spec, g, s)?;
        if j_membership(spec, &key)? {
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Restriction of a key to a subsort; the projection of the canonical
/// linkage.
pub fn project(u1: &SortId, u2: &SortId, t: &GeneratorKey) -> Result<GeneratorKey, ParamError> {
    if t.u != u2.0 {
        return Err(ParamError::NotSubsort(format!("key sort is not {u2}")));
    }
    if !u1.is_subsort_of(u2) {
        return Err(ParamError::NotSubsort(format!(
            "{u1} is not a subsort of {u2}"
        )));
    }
    let g =
        t.g.iter()
            .filter(|(b, _)| u1.0.contains(b))
            .map(|(b, v)| (*b, v.clone()))
            .collect();
    let h =
        t.h.iter()
            .filter(|(b, _)| u1.0.contains(b))
            .map(|(b, v)| (*b, *v))
            .collect();
    GeneratorKey::new(u1.0.clone(), t.alpha_tag.clone(), g, h)
}

/// Project with the zero-free tag canonicalization applied to the
/// restricted key, matching [`key_for_sort`].
pub fn project_canonical(
    spec: &ParameterSpec,
    u1: &SortId,
    u2: &SortId,
    t: &GeneratorKey,
) -> Result<GeneratorKey, ParamError> {
    let mut p = project(u1, u2, t)?;
    if spec.variant == Variant::ZeroFree && p.zero_range() {
        p.alpha_tag = Ordinal::nat(1);
    }
    Ok(p)
}

// ---------------------------------------------------------------------
// Bounded validation of the full-parameter clauses.

/// Budget for the bounded enumeration in [`validate_full_parameter`].
#[derive(Clone, Debug)]
pub struct EnumerationBudget {
    pub max_u_size: usize,
    pub max_u_element: u64,
    pub value_cap: u64,
    pub h_cap: u64,
    pub tag_cap: u64,
    pub sampled_maps: usize,
    pub seed: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_u_size: 2,
            max_u_element: 4,
            value_cap: 2,
            h_cap: 8,
            tag_cap: 3,
            sampled_maps: 40,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Predicate standing in for the linkage relation during validation, so
/// fault-injection tests can swap in a broken one.
pub type LinkPredicate<'a> = &'a dyn Fn(&ParameterSpec, &GeneratorKey, &GeneratorKey) -> bool;

/// Enumerate keys over `u` within the budget caps.
pub fn enumerate_keys(
    spec: &ParameterSpec,
    u: &SortId,
    budget: &EnumerationBudget,
) -> Vec<GeneratorKey> {
    let elems: Vec<u64> = u.0.iter().copied().collect();
    let k = elems.len();
    let mut out = Vec::new();
    let tags: Vec<Ordinal> = (1..=budget.tag_cap).map(Ordinal::nat).collect();
    // non-decreasing g assignments
    let mut g_choices: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; k];
    loop {
        if cur.windows(2).all(|w| w[0] <= w[1]) {
            g_choices.push(cur.clone());
        }
        // odometer
        let mut i = 0;
        loop {
            if i == k {
                break;
            }
            cur[i] += 1;
            if cur[i] <= budget.value_cap {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        if k == 0 {
            break;
        }
    }
    if k == 0 {
        g_choices = vec![vec![]];
    }
    let mut h_choices: Vec<Vec<u64>> = Vec::new();
    let mut hcur = vec![0u64; k];
    loop {
        if hcur.windows(2).all(|w| w[0] <= w[1]) {
            h_choices.push(hcur.clone());
        }
        let mut i = 0;
        loop {
            if i == k {
                break;
            }
            hcur[i] += 1;
            if hcur[i] <= budget.h_cap {
                break;
            }
            hcur[i] = 0;
            i += 1;
        }
        if i == k || k == 0 {
            break;
        }
    }
    if k == 0 {
        h_choices = vec![vec![]];
    }
    for tag in &tags {
        for gs in &g_choices {
            for hs in &h_choices {
                let g: BTreeMap<u64, Ordinal> = elems
                    .iter()
                    .zip(gs)
                    .map(|(&b, &v)| (b, Ordinal::nat(v)))
                    .collect();
                let h: BTreeMap<u64, u64> = elems.iter().zip(hs).map(|(&b, &v)| (b, v)).collect();
                let key = GeneratorKey::new(u.0.clone(), tag.clone(), g, h).unwrap();
                if j_membership(spec, &key).unwrap_or(false) {
                    out.push(key);
                }
            }
        }
    }
    out
}

fn small_sorts(budget: &EnumerationBudget) -> Vec<SortId> {
    let elems: Vec<u64> = (0..=budget.max_u_element).collect();
    let mut out = Vec::new();
    let n = elems.len();
    for mask in 1u64..(1 << n) {
        if (mask.count_ones() as usize) > budget.max_u_size {
            continue;
        }
        let s: BTreeSet<u64> = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        out.push(SortId(s));
    }
    out
}

fn sample_monotone(
    spec: &ParameterSpec,
    rng: &mut crate::rng::SimRng,
    budget: &EnumerationBudget,
) -> TaggedMonotone {
    // sampled maps must be legal: tags strictly below alpha_star
    let tag_bound = spec
        .alpha_star
        .as_nat()
        .unwrap_or(budget.tag_cap + 1)
        .min(budget.tag_cap + 1);
    if tag_bound <= 1 {
        // degenerate tag space: only the empty map exists
        return TaggedMonotone::zeros(Ordinal::zero(), 0);
    }
    let tag = Ordinal::nat(rng.range(1, tag_bound));
    let dom = rng.range(1, budget.max_u_element + 4);
    let mut values = Vec::new();
    let mut cur = 0u64;
    let top = tag.as_nat().unwrap_or(budget.tag_cap);
    for _ in 0..dom {
        if cur + 1 < top && rng.chance(1, 3) {
            cur += 1;
        }
        values.push(Ordinal::nat(cur));
    }
    TaggedMonotone::new(tag, values).unwrap()
}

/// Bounded-enumeration validation of the full-parameter clauses:
/// key-space sanity, uniqueness of keys given `(sort, tagged g, h)`,
/// closure of the key space under restrictions of sampled monotone maps,
/// linkage closure for key pairs arising from a common map, and
/// functionality of the nested linkage (the subsort linkage must be
/// exactly the graph of [`project`]).
pub fn validate_full_parameter(
    spec: &ParameterSpec,
    budget: &EnumerationBudget,
) -> ValidationReport {
    let canonical =
        |s: &ParameterSpec, a: &GeneratorKey, b: &GeneratorKey| linkable(s, a, b).unwrap_or(false);
    validate_full_parameter_with(spec, budget, &canonical)
}

pub fn validate_full_parameter_with(
    spec: &ParameterSpec,
    budget: &EnumerationBudget,
    link: LinkPredicate<'_>,
) -> ValidationReport {
    let mut checks = Vec::new();
    let mut notes = vec![
        "clause (e) is read as (sort(t1), sort(t2)) ∈ S; the literal text has a \
         (sort(t1), sort(t1)) repetition that is almost surely a typo"
            .to_string(),
        "I_γ membership is read as u_s ⊆ γ".to_string(),
    ];
    let sorts = small_sorts(budget);

    // (e) sort-compatibility of the linkage: with S the full square this
    // cannot fail for in-range keys; the check guards the enumerator.
    let mut e_ok = true;
    let mut e_detail = String::new();
    let mut pair_count = 0usize;
    for s1 in &sorts {
        for s2 in &sorts {
            let keys1 = enumerate_keys(spec, s1, budget);
            let keys2 = enumerate_keys(spec, s2, budget);
            for t1 in keys1.iter().take(8) {
                for t2 in keys2.iter().take(8) {
                    if link(spec, t1, t2) {
                        pair_count += 1;
                        let in_range =
                            t1.u.iter().all(|&b| b < spec.n) && t2.u.iter().all(|&b| b < spec.n);
                        if !in_range {
                            e_ok = false;
                            e_detail = format!("linked pair out of sort range: {t1} / {t2}");
                        }
                    }
                }
            }
        }
    }
    checks.push(ValidationCheck {
        name: "clause-e-sort-compatibility".into(),
        passed: e_ok,
        detail: if e_ok {
            format!("{pair_count} linked pairs inspected")
        } else {
            e_detail
        },
    });

    // (h) uniqueness of a key given (sort, tagged g, h)
    let mut h_ok = true;
    let mut h_detail = String::new();
    for s in &sorts {
        let keys = enumerate_keys(spec, s, budget);
        let mut seen: BTreeMap<String, &GeneratorKey> = BTreeMap::new();
        for k in &keys {
            let data = k.canonical_string();
            if let Some(prev) = seen.insert(data.clone(), k) {
                h_ok = false;
                h_detail = format!("duplicate key data {data} ({prev})");
            }
        }
    }
    checks.push(ValidationCheck {
        name: "clause-h-uniqueness".into(),
        passed: h_ok,
        detail: if h_ok {
            "keys are their data".into()
        } else {
            h_detail
        },
    });

    // closure: restrictions of sampled monotone maps are always valid keys
    let mut rng = crate::rng::SimRng::new(budget.seed);
    let mut closure_ok = true;
    let mut closure_detail = String::new();
    let mut closure_count = 0usize;
    for _ in 0..budget.sampled_maps {
        let g = sample_monotone(spec, &mut rng, budget);
        for s in &sorts {
            if s.gamma_star() > g.domain() {
                continue;
            }
            let key = match key_for_sort(spec, &g, s) {
                Ok(k) => k,
                Err(e) => {
                    closure_ok = false;
                    closure_detail = format!("key_for_sort failed: {e}");
                    continue;
                }
            };
            closure_count += 1;
            if !j_membership(spec, &key).unwrap_or(false) {
                closure_ok = false;
                closure_detail = format!("restricted key fails membership: {key}");
            }
        }
    }
    checks.push(ValidationCheck {
        name: "key-space-closure-under-restriction".into(),
        passed: closure_ok,
        detail: if closure_ok {
            format!("{closure_count} restricted keys valid")
        } else {
            closure_detail
        },
    });

    // linkage closure: keys arising from one common map must be linked
    let mut rng = crate::rng::SimRng::new(budget.seed.wrapping_add(1));
    let mut link_ok = true;
    let mut link_detail = String::new();
    let mut link_count = 0usize;
    for _ in 0..budget.sampled_maps {
        let g = sample_monotone(spec, &mut rng, budget);
        let covered: Vec<&SortId> = sorts
            .iter()
            .filter(|s| s.gamma_star() <= g.domain())
            .collect();
        for s1 in &covered {
            for s2 in &covered {
                let t1 = key_for_sort(spec, &g, s1).unwrap();
                let t2 = key_for_sort(spec, &g, s2).unwrap();
                link_count += 1;
                if !link(spec, &t1, &t2) {
                    link_ok = false;
                    link_detail = format!("common-map keys unlinked: {t1} / {t2}");
                }
            }
        }
    }
    checks.push(ValidationCheck {
        name: "linkage-closure-for-common-map-pairs".into(),
        passed: link_ok,
        detail: if link_ok {
            format!("{link_count} common-map pairs linked")
        } else {
            link_detail
        },
    });

    // nested functionality: the subsort linkage is the graph of project
    let mut fun_ok = true;
    let mut fun_detail = String::new();
    let mut fun_count = 0usize;
    for s2 in &sorts {
        for s1 in &sorts {
            if s1 == s2 || !s1.is_subsort_of(s2) {
                continue;
            }
            let keys2 = enumerate_keys(spec, s2, budget);
            let keys1 = enumerate_keys(spec, s1, budget);
            for t2 in keys2.iter().take(16) {
                let projected = project(s1, s2, t2).unwrap();
                for t1 in keys1.iter().take(32) {
                    let linked = link(spec, t1, t2);
                    let is_projection = match spec.variant {
                        Variant::Uniform => *t1 == projected,
                        // the zero-free waiver keeps several tags linked
                        Variant::ZeroFree => {
                            t1.g == projected.g
                                && t1.h == projected.h
                                && (t1.zero_range() || t1.alpha_tag == projected.alpha_tag)
                        }
                    };
                    fun_count += 1;
                    if linked != is_projection {
                        fun_ok = false;
                        fun_detail =
                            format!("nested linkage is not the projection graph: {t1} / {t2}");
                    }
                }
            }
        }
    }
    checks.push(ValidationCheck {
        name: "nested-linkage-functionality".into(),
        passed: fun_ok,
        detail: if fun_ok {
            format!("{fun_count} nested pairs agree with projection")
        } else {
            fun_detail
        },
    });

    if spec.variant == Variant::ZeroFree {
        notes.push(
            "zero-free variant: the linkage is not functional on zero-range keys; \
             Boolean mode is required for pair-subgroup decisions"
                .to_string(),
        );
    }

    ValidationReport { checks, notes }
}
