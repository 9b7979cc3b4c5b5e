//! The ISO strategy engine and the rigidity apparatus.
//!
//! A play of target length α keeps one monotone map `g` as its position.
//! The map starts as the zero map on `γ* = sup(u)+1` for the anchor sort
//! `u`; the anchor generator `t*` is the key this position induces
//! there, and the two pointed models are `(M, (u, e))` and
//! `(M, (u, x_{t*}))`. When a demand mentions a sort outside the
//! position's domain, the position is extended in one stroke past the
//! whole sort universe, with the fresh stretch one value above
//! everything older — the strict step that freezes every existing key
//! and keeps the translation family of the new position an extension of
//! the old one. Demanded elements are then mapped by right translation
//! with the current family (preimages for right-side demands).
//!
//! The witness checker samples position chains and verifies the order,
//! monotonicity, partition, coherence, upper-bound and extension
//! clauses the strategy relies on; the obstruction tracer replays, on
//! finitely presented limit data, the closure-point contradiction that
//! rules out nontrivial global families at full scale.

use crate::efgame::{AisPlayer, IsoPlayer};
use crate::freegroup::{ginv, gmul, GroupElement};
use crate::model::{apply_family, family_of, membership_c, Family, ModelElement, ModelError};
use crate::ordinal::Ordinal;
use crate::parameter::{
    index_set, j_membership, key_for_sort, GeneratorKey, ParamError, ParameterSpec, SortId,
    TaggedMonotone,
};
use crate::rng::SimRng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum StrategyError {
    #[error("stuck: no valid key for demanded sort {sort}: {detail}")]
    Stuck { sort: String, detail: String },
    #[error("bad anchor: {0}")]
    BadAnchor(String),
    #[error("game length must be at least 1")]
    ZeroLength,
    #[error("incompatible chain: {0}")]
    IncompatibleChain(String),
    #[error("malformed obstruction candidate: {0}")]
    MalformedCandidate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Group(#[from] crate::freegroup::GroupError),
}

/// Ordinal tag a play of length `alpha` runs under. The first covering
/// extension must place the value 1 somewhere, so the tag needs room
/// for it: plays of length 1 run under tag 2, longer plays under their
/// own length.
pub fn play_tag(alpha: &Ordinal) -> Ordinal {
    let two = Ordinal::nat(2);
    if alpha.compare(&two) == std::cmp::Ordering::Less {
        two
    } else {
        alpha.clone()
    }
}

/// The strategy's position plus the finite map played so far.
#[derive(Clone, Debug)]
pub struct IsoState {
    pub g: TaggedMonotone,
    pub round: u64,
    pub map: Vec<(ModelElement, ModelElement)>,
    pub gamma_star: u64,
    pub s_star: SortId,
    pub t_star: GeneratorKey,
}

impl IsoState {
    /// The translation family of the current position over the mapped
    /// sorts.
    pub fn family(&self, spec: &ParameterSpec) -> Result<Family, StrategyError> {
        let sorts: Vec<SortId> = self
            .map
            .iter()
            .map(|(x, _)| x.sort.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(family_of(spec, &self.g, &sorts)?)
    }

    /// Position and map invariants: zero below `γ*`, the step to 1 at
    /// `γ*` once the domain grew, the anchor entry pinned to `t*`, and
    /// every map pair a right translation by the family entry of its
    /// sort.
    pub fn check_invariants(&self, spec: &ParameterSpec) -> Result<(), StrategyError> {
        for i in 0..self.gamma_star.min(self.g.domain()) {
            if !self.g.values[i as usize].is_zero() {
                return Err(StrategyError::BadAnchor(format!(
                    "position not zero below gamma* at {i}"
                )));
            }
        }
        if self.g.domain() > self.gamma_star
            && self.g.values[self.gamma_star as usize] != Ordinal::nat(1)
        {
            return Err(StrategyError::BadAnchor(
                "position must step to 1 at gamma*".into(),
            ));
        }
        let anchor_key = key_for_sort(spec, &self.g, &self.s_star)?;
        if anchor_key != self.t_star {
            return Err(StrategyError::BadAnchor(format!(
                "anchor key drifted to {anchor_key}"
            )));
        }
        let fam = self.family(spec)?;
        for (x, y) in &self.map {
            let expect = apply_family(&fam, x)?;
            if expect != *y {
                return Err(StrategyError::BadAnchor(format!(
                    "map pair ({x}, {y}) is not the family translation"
                )));
            }
        }
        Ok(())
    }
}

/// Build the initial position for a play of length `alpha` anchored at
/// `s_star`; returns the state and the pointed elements `c1`, `c2`.
pub fn init_state(
    spec: &ParameterSpec,
    s_star: &SortId,
    alpha: &Ordinal,
) -> Result<(IsoState, ModelElement, ModelElement), StrategyError> {
    if alpha.is_zero() {
        return Err(StrategyError::ZeroLength);
    }
    if s_star.0.is_empty() {
        return Err(StrategyError::BadAnchor(
            "anchor sort must be non-empty".into(),
        ));
    }
    if let Some(&beta) = s_star.0.iter().find(|&&b| b >= spec.n) {
        return Err(StrategyError::BadAnchor(format!(
            "anchor ordinal {beta} outside [0, {})",
            spec.n
        )));
    }
    let tag = play_tag(alpha);
    let gamma_star = s_star.gamma_star();
    let g0 = TaggedMonotone::zeros(tag, gamma_star);
    let t_star = key_for_sort(spec, &g0, s_star)?;
    if !j_membership(spec, &t_star)? {
        return Err(StrategyError::BadAnchor(format!(
            "anchor key {t_star} fails membership (is alpha* large enough?)"
        )));
    }
    let c1 = ModelElement::identity(spec, s_star.clone());
    let c2 = ModelElement::generator(spec, &t_star);
    let state = IsoState {
        g: g0,
        round: 0,
        map: vec![(c1.clone(), c2.clone())],
        gamma_star,
        s_star: s_star.clone(),
        t_star,
    };
    Ok((state, c1, c2))
}

/// One strategy move: cover the demanded sorts (extending the position
/// if they mention fresh ordinals) and extend the map by family
/// translation. Every demanded sort must key validly afterwards; a
/// failure is reported as [`StrategyError::Stuck`].
pub fn respond(
    spec: &ParameterSpec,
    state: &IsoState,
    demand_left: &[ModelElement],
    demand_right: &[ModelElement],
) -> Result<IsoState, StrategyError> {
    let mut next = state.clone();
    next.round += 1;
    let mut sorts: BTreeSet<SortId> = BTreeSet::new();
    for e in demand_left.iter().chain(demand_right) {
        e.validate(spec)?;
        if e.sort.0.is_empty() {
            return Err(StrategyError::Stuck {
                sort: e.sort.to_string(),
                detail: "empty sorts are excluded from play".into(),
            });
        }
        sorts.insert(e.sort.clone());
    }
    let needed = sorts.iter().map(|s| s.gamma_star()).max().unwrap_or(0);
    if needed > next.g.domain() {
        // one covering extension, past the whole sort universe, with the
        // fresh stretch strictly above every older value
        let new_domain = spec.n.max(needed).max(next.g.domain()) + 1;
        let bump = Ordinal::sup(next.g.values.iter())
            .succ()
            .map_err(|e| StrategyError::BadAnchor(e.to_string()))?;
        if bump.compare(&next.g.codomain_tag) != std::cmp::Ordering::Less {
            return Err(StrategyError::Stuck {
                sort: format!("domain {new_domain}"),
                detail: format!("no room below the tag for value {bump}"),
            });
        }
        while next.g.domain() < new_domain {
            next.g.values.push(bump.clone());
        }
    }
    // all demanded sorts must now key validly
    for s in &sorts {
        let key = key_for_sort(spec, &next.g, s)?;
        if !j_membership(spec, &key)? {
            return Err(StrategyError::Stuck {
                sort: s.to_string(),
                detail: format!("key {key} fails membership"),
            });
        }
    }
    let fam_sorts: Vec<SortId> = sorts.iter().cloned().collect();
    let fam = family_of(spec, &next.g, &fam_sorts)?;
    for s in &sorts {
        if fam.get(s).is_none() {
            return Err(StrategyError::Stuck {
                sort: s.to_string(),
                detail: "sort missing from the index set".into(),
            });
        }
    }
    for x in demand_left {
        if next.map.iter().any(|(a, _)| a == x) {
            continue;
        }
        let y = apply_family(&fam, x)?;
        next.map.push((x.clone(), y));
    }
    for y in demand_right {
        if next.map.iter().any(|(_, b)| b == y) {
            continue;
        }
        let c = fam.get(&y.sort).unwrap();
        let x = ModelElement {
            sort: y.sort.clone(),
            value: gmul(&y.value, &ginv(c))?,
        };
        next.map.push((x, y.clone()));
    }
    debug_assert!(next.check_invariants(spec).is_ok());
    Ok(next)
}

/// Union of an increasing chain of states. Each position must extend
/// the previous one and each map must contain the previous one.
pub fn limit_union(states: &[IsoState]) -> Result<IsoState, StrategyError> {
    let Some(first) = states.first() else {
        return Err(StrategyError::IncompatibleChain("empty chain".into()));
    };
    let mut result = first.clone();
    for st in &states[1..] {
        if !st.g.extends(&result.g) {
            return Err(StrategyError::IncompatibleChain(format!(
                "position at round {} does not extend its predecessor",
                st.round
            )));
        }
        for p in &result.map {
            if !st.map.contains(p) {
                return Err(StrategyError::IncompatibleChain(format!(
                    "map at round {} drops the pair ({}, {})",
                    st.round, p.0, p.1
                )));
            }
        }
        result = st.clone();
    }
    Ok(result)
}

/// Strategy endpoint for the referee.
pub struct IsoEngine<'a> {
    pub spec: &'a ParameterSpec,
    pub state: IsoState,
    pub stuck: Option<String>,
    /// States after each round, for chain checks.
    pub history: Vec<IsoState>,
}

impl<'a> IsoEngine<'a> {
    pub fn new(spec: &'a ParameterSpec, state: IsoState) -> IsoEngine<'a> {
        IsoEngine {
            spec,
            state,
            stuck: None,
            history: Vec::new(),
        }
    }
}

impl IsoPlayer<ModelElement> for IsoEngine<'_> {
    fn extend(
        &mut self,
        _round: u64,
        _map: &[(ModelElement, ModelElement)],
        demand_left: &[ModelElement],
        demand_right: &[ModelElement],
    ) -> Option<Vec<(ModelElement, ModelElement)>> {
        match respond(self.spec, &self.state, demand_left, demand_right) {
            Ok(next) => {
                self.state = next;
                self.history.push(self.state.clone());
                Some(self.state.map.clone())
            }
            Err(e) => {
                self.stuck = Some(e.to_string());
                None
            }
        }
    }
}

// ---------------------------------------------------------------------
// Adversaries.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdversaryKind {
    Random,
    Boundary,
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryKind::Random => write!(f, "random"),
            AdversaryKind::Boundary => write!(f, "boundary"),
        }
    }
}

/// Seeded adversary demanding random elements: random sorts over the
/// whole universe, words of length up to two over keys realizable from
/// random monotone maps.
pub struct RandomAdversary<'a> {
    spec: &'a ParameterSpec,
    rng: SimRng,
    mu: u64,
    tag: Ordinal,
}

impl<'a> RandomAdversary<'a> {
    pub fn new(spec: &'a ParameterSpec, alpha: &Ordinal, mu: u64, seed: u64) -> Self {
        RandomAdversary {
            spec,
            rng: SimRng::new(seed),
            mu,
            tag: play_tag(alpha),
        }
    }
}

fn random_sort(spec: &ParameterSpec, rng: &mut SimRng) -> SortId {
    let size = rng.range(1, 4).min(spec.n);
    let mut s = BTreeSet::new();
    while (s.len() as u64) < size {
        s.insert(rng.below(spec.n));
    }
    SortId(s)
}

fn random_monotone(
    spec: &ParameterSpec,
    rng: &mut SimRng,
    tag: &Ordinal,
    min_domain: u64,
) -> TaggedMonotone {
    let dom = min_domain.max(1) + rng.below(4);
    let top = tag.as_nat().unwrap_or(4).max(1);
    let mut values = Vec::new();
    let mut cur = 0u64;
    for _ in 0..dom {
        if cur + 1 < top && rng.chance(1, 3) {
            cur += 1;
        }
        values.push(Ordinal::nat(cur));
    }
    let _ = spec;
    TaggedMonotone::new(tag.clone(), values).unwrap()
}

fn random_element(
    spec: &ParameterSpec,
    rng: &mut SimRng,
    tag: &Ordinal,
    sort: &SortId,
) -> ModelElement {
    let keys: Vec<GeneratorKey> = (0..2)
        .map(|_| {
            let m = random_monotone(spec, rng, tag, sort.gamma_star());
            key_for_sort(spec, &m, sort).unwrap()
        })
        .collect();
    let len = rng.below(3);
    let mut value = match spec.mode {
        crate::parameter::Mode::Free => GroupElement::identity_free(),
        crate::parameter::Mode::Boolean => GroupElement::identity_boolean(),
    };
    for _ in 0..len {
        let k = &keys[rng.below(keys.len() as u64) as usize];
        let letter = match spec.mode {
            crate::parameter::Mode::Free => {
                let g = GroupElement::generator_free(k.generator());
                if rng.chance(1, 2) {
                    ginv(&g)
                } else {
                    g
                }
            }
            crate::parameter::Mode::Boolean => GroupElement::generator_boolean(k.generator()),
        };
        value = gmul(&value, &letter).unwrap();
    }
    ModelElement {
        sort: sort.clone(),
        value,
    }
}

impl AisPlayer<ModelElement> for RandomAdversary<'_> {
    fn demand(
        &mut self,
        _round: u64,
        map: &[(ModelElement, ModelElement)],
    ) -> Option<(Vec<ModelElement>, Vec<ModelElement>)> {
        let total = self.rng.range(1, self.mu + 1);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for _ in 0..total {
            let sort = random_sort(self.spec, &mut self.rng);
            let elem = if self.rng.chance(1, 5) && !map.is_empty() {
                // replay an element the play already mentioned
                let (x, y) = self.rng.pick(map);
                if self.rng.chance(1, 2) {
                    x.clone()
                } else {
                    y.clone()
                }
            } else {
                random_element(self.spec, &mut self.rng, &self.tag, &sort)
            };
            if self.rng.chance(1, 2) {
                left.push(elem);
            } else {
                right.push(elem);
            }
        }
        Some((left, right))
    }
}

/// Adversary that aims at the seams: sorts straddling `γ*`, the anchor
/// sort itself, top-of-universe ordinals, and images or preimages of
/// the anchor pair.
pub struct BoundaryAdversary<'a> {
    spec: &'a ParameterSpec,
    rng: SimRng,
    mu: u64,
    tag: Ordinal,
    s_star: SortId,
    t_star: GeneratorKey,
}

impl<'a> BoundaryAdversary<'a> {
    pub fn new(
        spec: &'a ParameterSpec,
        alpha: &Ordinal,
        mu: u64,
        seed: u64,
        s_star: &SortId,
        t_star: &GeneratorKey,
    ) -> Self {
        BoundaryAdversary {
            spec,
            rng: SimRng::new(seed),
            mu,
            tag: play_tag(alpha),
            s_star: s_star.clone(),
            t_star: t_star.clone(),
        }
    }

    fn straddle_sort(&mut self) -> SortId {
        let gs = self.s_star.gamma_star();
        let n = self.spec.n;
        match self.rng.below(5) {
            0 => SortId::new([gs.saturating_sub(1), gs.min(n - 1)]),
            1 => SortId::new([gs.min(n - 1)]),
            2 => SortId::new([n - 1]),
            3 => SortId::new([gs.saturating_sub(1), n - 1]),
            _ => {
                let mut s = self.s_star.0.clone();
                s.insert(gs.min(n - 1));
                SortId(s)
            }
        }
    }
}

impl AisPlayer<ModelElement> for BoundaryAdversary<'_> {
    fn demand(
        &mut self,
        _round: u64,
        map: &[(ModelElement, ModelElement)],
    ) -> Option<(Vec<ModelElement>, Vec<ModelElement>)> {
        let total = self.rng.range(1, self.mu + 1);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for _ in 0..total {
            let elem = match self.rng.below(6) {
                // the anchor generator demanded on the right: its
                // preimage must stay consistent with the pinned pair
                0 => ModelElement::generator(self.spec, &self.t_star),
                // the identity at a straddling sort
                1 => {
                    let s = self.straddle_sort();
                    ModelElement::identity(self.spec, s)
                }
                // an element the play already produced
                2 if !map.is_empty() => {
                    let (x, y) = self.rng.pick(map);
                    if self.rng.chance(1, 2) {
                        x.clone()
                    } else {
                        y.clone()
                    }
                }
                // a word over a straddling sort
                _ => {
                    let s = self.straddle_sort();
                    let tag = self.tag.clone();
                    random_element(self.spec, &mut self.rng, &tag, &s)
                }
            };
            if self.rng.chance(1, 2) {
                left.push(elem);
            } else {
                right.push(elem);
            }
        }
        Some((left, right))
    }
}

/// Adversary that replays a fixed demand script.
pub struct ReplayAdversary {
    pub script: Vec<(Vec<ModelElement>, Vec<ModelElement>)>,
}

impl AisPlayer<ModelElement> for ReplayAdversary {
    fn demand(
        &mut self,
        round: u64,
        _map: &[(ModelElement, ModelElement)],
    ) -> Option<(Vec<ModelElement>, Vec<ModelElement>)> {
        self.script.get((round - 1) as usize).cloned()
    }
}

/// Adversary driven by a callback (the interactive REPL uses this).
pub struct FnAdversary<F>(pub F);

impl<F> AisPlayer<ModelElement> for FnAdversary<F>
where
    F: FnMut(
        u64,
        &[(ModelElement, ModelElement)],
    ) -> Option<(Vec<ModelElement>, Vec<ModelElement>)>,
{
    fn demand(
        &mut self,
        round: u64,
        map: &[(ModelElement, ModelElement)],
    ) -> Option<(Vec<ModelElement>, Vec<ModelElement>)> {
        (self.0)(round, map)
    }
}

// ---------------------------------------------------------------------
// Campaigns.

#[derive(Clone, Debug, Serialize)]
pub struct CampaignConfig {
    pub alpha: u64,
    pub mu: u64,
    pub games: usize,
    pub adversary: AdversaryKind,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CampaignResult {
    pub games: usize,
    pub verified: usize,
    pub stuck: usize,
    pub anchor_violations: usize,
    pub failures: Vec<String>,
}

impl CampaignResult {
    pub fn all_pass(&self) -> bool {
        self.games == self.verified && self.stuck == 0 && self.anchor_violations == 0
    }
}

/// Play and fully verify a batch of games of the configured length.
pub fn run_campaign(
    spec: &ParameterSpec,
    s_star: &SortId,
    cc: &CampaignConfig,
) -> Result<CampaignResult, StrategyError> {
    let alpha = Ordinal::nat(cc.alpha);
    let mut result = CampaignResult {
        games: cc.games,
        ..Default::default()
    };
    for game in 0..cc.games {
        let seed = SimRng::split(cc.seed, game as u64).next_u64();
        match run_one_game(spec, s_star, &alpha, cc.mu, cc.adversary, seed) {
            Ok(GameReport::Verified) => result.verified += 1,
            Ok(GameReport::Stuck(detail)) => {
                result.stuck += 1;
                result
                    .failures
                    .push(format!("game {game}: stuck: {detail}"));
            }
            Ok(GameReport::AnchorBroken(detail)) => {
                result.anchor_violations += 1;
                result.failures.push(format!("game {game}: {detail}"));
            }
            Ok(GameReport::VerificationFailed(detail)) => {
                result.failures.push(format!("game {game}: {detail}"));
            }
            Err(e) => result.failures.push(format!("game {game}: error: {e}")),
        }
    }
    Ok(result)
}

pub enum GameReport {
    Verified,
    Stuck(String),
    AnchorBroken(String),
    VerificationFailed(String),
}

/// Play one seeded game and verify the full transcript plus the anchor
/// and coherence invariants at every round.
pub fn run_one_game(
    spec: &ParameterSpec,
    s_star: &SortId,
    alpha: &Ordinal,
    mu: u64,
    adversary: AdversaryKind,
    seed: u64,
) -> Result<GameReport, StrategyError> {
    let (state, c1, c2) = init_state(spec, s_star, alpha)?;
    let t_star = state.t_star.clone();
    let mut iso = IsoEngine::new(spec, state);
    let cfg = crate::efgame::GameConfig {
        length: alpha.clone(),
        mu,
        stop_after: alpha.as_nat().unwrap_or(4),
        node_cap: None,
        atom_matrix_memo: false,
    };
    let arena = crate::efgame::SymbolicArena { spec };
    let seed_map = vec![(c1.clone(), c2.clone())];
    let transcript = {
        let mut random;
        let mut boundary;
        let ais: &mut dyn AisPlayer<ModelElement> = match adversary {
            AdversaryKind::Random => {
                random = RandomAdversary::new(spec, alpha, mu, seed);
                &mut random
            }
            AdversaryKind::Boundary => {
                boundary = BoundaryAdversary::new(spec, alpha, mu, seed, s_star, &t_star);
                &mut boundary
            }
        };
        crate::efgame::play(&arena, &cfg, seed_map, &mut iso, ais)
            .map_err(|e| StrategyError::BadAnchor(format!("referee: {e}")))?
    };
    if let Some(detail) = iso.stuck {
        return Ok(GameReport::Stuck(detail));
    }
    if transcript.outcome != crate::efgame::PlayOutcome::Completed {
        return Ok(GameReport::VerificationFailed(format!(
            "unexpected outcome {:?}",
            transcript.outcome
        )));
    }
    // anchor: every state keeps the pinned pair and the pinned family entry
    for st in &iso.history {
        let anchor_key = key_for_sort(spec, &st.g, s_star)?;
        if anchor_key != t_star {
            return Ok(GameReport::AnchorBroken(format!(
                "round {}: anchor key {anchor_key}",
                st.round
            )));
        }
        if !st.map.iter().any(|(x, y)| *x == c1 && *y == c2) {
            return Ok(GameReport::AnchorBroken(format!(
                "round {}: pinned pair missing",
                st.round
            )));
        }
        st.check_invariants(spec)?;
    }
    // coherence across rounds: each family restricts the next
    for w in iso.history.windows(2) {
        let sorts: Vec<SortId> = w[0]
            .map
            .iter()
            .map(|(x, _)| x.sort.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let early = family_of(spec, &w[0].g, &sorts)?;
        let late = family_of(spec, &w[1].g, &sorts)?;
        if early != late {
            return Ok(GameReport::VerificationFailed(format!(
                "family coherence broken between rounds {} and {}",
                w[0].round, w[1].round
            )));
        }
    }
    let report = crate::efgame::verify_transcript(&arena, &cfg, &transcript)
        .map_err(|e| StrategyError::BadAnchor(format!("verifier: {e}")))?;
    if !report.ok {
        return Ok(GameReport::VerificationFailed(
            report.first_failure.unwrap_or_default(),
        ));
    }
    Ok(GameReport::Verified)
}

// ---------------------------------------------------------------------
// Witness-system checks.

#[derive(Clone, Debug)]
pub struct WitnessPlan {
    pub s_star: SortId,
    /// Chains sampled.
    pub chains: usize,
    /// Links per chain.
    pub chain_length: usize,
    /// Demand-pool bound for the extension clause.
    pub mu: u64,
    pub seed: u64,
    pub fault: Option<WitnessFault>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessFault {
    /// Extend positions with values equal to the old maximum instead of
    /// strictly above it.
    NonStrictNewValues,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessClause {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub clauses: Vec<WitnessClause>,
    pub chains_checked: usize,
}

impl WitnessReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause_failed(&self, name: &str) -> bool {
        self.clauses.iter().any(|c| c.name == name && !c.passed)
    }
}

/// Sample position chains and verify the six witness-system clauses the
/// strategy rests on: partial order, index monotonicity, the stage
/// partition, family coherence along the order, upper bounds for
/// chains, and the extension property for small demand pools.
pub fn check_witness(
    spec: &ParameterSpec,
    plan: &WitnessPlan,
) -> Result<WitnessReport, StrategyError> {
    let mut rng = SimRng::new(plan.seed);
    let tag = Ordinal::nat(
        (plan.chain_length as u64 + 2).min(
            spec.alpha_star
                .as_nat()
                .unwrap_or(u64::MAX)
                .saturating_sub(1),
        ),
    );
    let gamma_star = plan.s_star.gamma_star();
    let mut order_ok = (true, String::new());
    let mut mono_ok = (true, String::new());
    let mut partition_ok = (true, String::new());
    let mut coherence_ok = (true, String::new());
    let mut ub_ok = (true, String::new());
    let mut ext_ok = (true, String::new());

    for chain_idx in 0..plan.chains {
        // build one chain of positions with the strict (or faulted) step
        let mut chain: Vec<TaggedMonotone> = vec![TaggedMonotone::zeros(tag.clone(), gamma_star)];
        for _ in 0..plan.chain_length {
            let prev = chain.last().unwrap();
            let grow = 1 + rng.below(3);
            let new_value = match plan.fault {
                Some(WitnessFault::NonStrictNewValues) => Ordinal::sup(prev.values.iter()),
                None => Ordinal::sup(prev.values.iter())
                    .succ()
                    .map_err(|e| StrategyError::BadAnchor(e.to_string()))?,
            };
            let mut next = prev.clone();
            for _ in 0..grow {
                next.values.push(new_value.clone());
            }
            chain.push(next);
        }
        // a pool that always sees the moving top of each position
        let mut pool: Vec<SortId> = vec![plan.s_star.clone()];
        for g in &chain {
            if g.domain() >= 1 {
                let top = (g.domain() - 1).min(spec.n - 1);
                pool.push(SortId::new([top]));
                if top >= 1 {
                    pool.push(SortId::new([top - 1, top]));
                }
            }
        }
        for _ in 0..3 {
            pool.push(random_sort(spec, &mut rng));
        }
        pool.sort();
        pool.dedup();

        // (a) extension is a partial order on the chain
        for (i, gi) in chain.iter().enumerate() {
            if !gi.extends(gi) {
                order_ok = (false, format!("chain {chain_idx}: not reflexive"));
            }
            for gj in &chain[i + 1..] {
                if !gj.extends(gi) {
                    order_ok = (false, format!("chain {chain_idx}: not increasing"));
                }
                if gj.domain() != gi.domain() && gi.extends(gj) {
                    order_ok = (false, format!("chain {chain_idx}: antisymmetry broken"));
                }
            }
        }
        // (b) index sets grow along the order
        for w in chain.windows(2) {
            let early = index_set(spec, &w[0], &pool)?;
            let late = index_set(spec, &w[1], &pool)?;
            for s in &early {
                if !late.contains(s) {
                    mono_ok = (false, format!("chain {chain_idx}: index set shrank at {s}"));
                }
            }
        }
        // (c) stages partition the chain by top value
        for (i, g) in chain.iter().enumerate() {
            let stage = Ordinal::sup(g.values.iter());
            let expected = match plan.fault {
                Some(WitnessFault::NonStrictNewValues) => Ordinal::zero(),
                None => Ordinal::nat(i as u64),
            };
            if plan.fault.is_none() && stage != expected {
                partition_ok = (
                    false,
                    format!("chain {chain_idx}: stage {stage} at link {i}"),
                );
            }
        }
        // (d) families restrict coherently along the order
        for w in chain.windows(2) {
            let early_idx = index_set(spec, &w[0], &pool)?;
            let early = family_of(spec, &w[0], &early_idx)?;
            let late = family_of(spec, &w[1], &early_idx)?;
            if early != late {
                coherence_ok = (
                    false,
                    format!("chain {chain_idx}: family changed on an old sort"),
                );
            }
        }
        // (e) the chain has an upper bound with the same data as its top
        match limit_chain(&chain) {
            Some(ub) => {
                for g in &chain {
                    if !ub.extends(g) {
                        ub_ok = (
                            false,
                            format!("chain {chain_idx}: upper bound misses a link"),
                        );
                    }
                }
            }
            None => ub_ok = (false, format!("chain {chain_idx}: no upper bound")),
        }
        // (f) extension property: any small demand pool is absorbed one
        // link later
        let demand_count = (plan.mu.saturating_sub(1)).max(1);
        let demands: Vec<SortId> = (0..demand_count)
            .map(|_| random_sort(spec, &mut rng))
            .collect();
        let top = chain.last().unwrap();
        let needed = demands.iter().map(|s| s.gamma_star()).max().unwrap_or(0);
        let mut extended = top.clone();
        if needed > extended.domain() {
            let bump = match Ordinal::sup(extended.values.iter()).succ() {
                Ok(b) => b,
                Err(e) => return Err(StrategyError::BadAnchor(e.to_string())),
            };
            if bump.compare(&extended.codomain_tag) != std::cmp::Ordering::Less {
                ext_ok = (false, format!("chain {chain_idx}: tag exhausted"));
                continue;
            }
            while extended.domain() < spec.n.max(needed) + 1 {
                extended.values.push(bump.clone());
            }
        }
        let idx = index_set(spec, &extended, &demands)?;
        for s in &demands {
            if !idx.contains(s) {
                ext_ok = (false, format!("chain {chain_idx}: demand {s} not absorbed"));
            }
        }
    }

    let clauses = vec![
        WitnessClause {
            name: "a-partial-order".into(),
            passed: order_ok.0,
            detail: order_ok.1,
        },
        WitnessClause {
            name: "b-index-monotone".into(),
            passed: mono_ok.0,
            detail: mono_ok.1,
        },
        WitnessClause {
            name: "c-stage-partition".into(),
            passed: partition_ok.0,
            detail: partition_ok.1,
        },
        WitnessClause {
            name: "d-family-coherence".into(),
            passed: coherence_ok.0,
            detail: coherence_ok.1,
        },
        WitnessClause {
            name: "e-chain-upper-bound".into(),
            passed: ub_ok.0,
            detail: ub_ok.1,
        },
        WitnessClause {
            name: "f-extension-property".into(),
            passed: ext_ok.0,
            detail: ext_ok.1,
        },
    ];
    Ok(WitnessReport {
        clauses,
        chains_checked: plan.chains,
    })
}

fn limit_chain(chain: &[TaggedMonotone]) -> Option<TaggedMonotone> {
    let mut ub = chain.first()?.clone();
    for g in &chain[1..] {
        if !g.extends(&ub) {
            return None;
        }
        ub = g.clone();
    }
    Some(ub)
}

// ---------------------------------------------------------------------
// Rigidity probes.

/// Look for a nontrivial coherent family over the pool. With a
/// maximal sort in a finite pool one always exists: push a single
/// monotone map through every covered sort. That success is the
/// documented divergence of the finite truncation from full-scale
/// rigidity.
pub fn nontrivial_family_probe(
    spec: &ParameterSpec,
    pool: &[SortId],
    word_bound: usize,
) -> Result<Option<Family>, StrategyError> {
    if word_bound == 0 || pool.is_empty() {
        return Ok(None);
    }
    let top = pool.iter().map(|s| s.gamma_star()).max().unwrap_or(0);
    let tag = Ordinal::nat(2);
    if tag.compare(&spec.alpha_star) != std::cmp::Ordering::Less {
        return Ok(None);
    }
    let g = TaggedMonotone::zeros(tag, top.max(1));
    let fam = family_of(spec, &g, pool)?;
    if fam.entries.is_empty() || fam.is_identity() {
        return Ok(None);
    }
    if !membership_c(spec, &fam)? {
        return Ok(None);
    }
    Ok(Some(fam))
}

/// Monotone step function on `[0, N)`: pieces of constant value with
/// increasing start points; the first piece starts at 0.
#[derive(Clone, Debug, Serialize)]
pub struct StepFunction {
    pub pieces: Vec<(u64, u64)>,
}

impl StepFunction {
    pub fn constant(v: u64) -> StepFunction {
        StepFunction {
            pieces: vec![(0, v)],
        }
    }

    pub fn successor() -> StepFunction {
        StepFunction { pieces: Vec::new() }
    }

    pub fn at(&self, beta: u64) -> u64 {
        if self.pieces.is_empty() {
            // the successor map
            return beta + 1;
        }
        let mut v = self.pieces[0].1;
        for &(start, value) in &self.pieces {
            if start <= beta {
                v = value;
            }
        }
        v
    }

    fn validate(&self, n: u64, name: &str) -> Result<(), StrategyError> {
        if self.pieces.is_empty() {
            return Ok(()); // successor map
        }
        if self.pieces[0].0 != 0 {
            return Err(StrategyError::MalformedCandidate(format!(
                "{name}: first piece must start at 0"
            )));
        }
        for w in self.pieces.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 > w[1].1 {
                return Err(StrategyError::MalformedCandidate(format!(
                    "{name}: pieces must have increasing starts and non-decreasing values"
                )));
            }
        }
        let _ = n;
        Ok(())
    }
}

/// Finitely presented limit data of one hypothetical nontrivial family
/// word: per letter, the limit of its value maps, exceed maps and tag.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionCandidate {
    pub u_star: BTreeSet<u64>,
    pub letters: Vec<ObstructionLetter>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionLetter {
    pub g_limit: StepFunction,
    pub h_limit: StepFunction,
    pub alpha_limit: Ordinal,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub value: u64,
    pub witness: u64,
    pub h_witness: u64,
    pub h_delta: u64,
    pub conclusion: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LetterTrace {
    pub letter: usize,
    pub value_at_delta: u64,
    pub rows: Vec<TraceRow>,
    pub contradiction: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WordLengthCheck {
    pub small_sort: String,
    pub big_sort: String,
    pub small_len: usize,
    pub big_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionTrace {
    pub delta_star: u64,
    pub letters: Vec<LetterTrace>,
    pub word_lengths: Vec<WordLengthCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub enum ObstructionVerdict {
    /// The candidate limit data is inconsistent: at the closure point
    /// every candidate value is forced strictly below itself.
    Contradiction(ObstructionTrace),
    /// The sort universe is too small to contain a closure point — the
    /// honest finite-scale outcome.
    NoClosurePoint { checked_up_to: u64, reason: String },
}

/// Replay the closure-point contradiction on candidate limit data.
pub fn obstruction_trace(
    spec: &ParameterSpec,
    cand: &ObstructionCandidate,
) -> Result<ObstructionVerdict, StrategyError> {
    if cand.letters.is_empty() {
        return Err(StrategyError::MalformedCandidate(
            "a trivial family needs no obstruction: the word must have letters".into(),
        ));
    }
    let n = spec.n;
    for (i, l) in cand.letters.iter().enumerate() {
        l.g_limit.validate(n, &format!("letter {i} g"))?;
        l.h_limit.validate(n, &format!("letter {i} h"))?;
        if l.sign != 1 && l.sign != -1 {
            return Err(StrategyError::MalformedCandidate(format!(
                "letter {i}: sign must be ±1"
            )));
        }
        for beta in 0..n {
            if l.h_limit.at(beta) <= beta {
                return Err(StrategyError::MalformedCandidate(format!(
                    "letter {i}: exceed map must satisfy h(β) > β at {beta}"
                )));
            }
            if Ordinal::nat(l.g_limit.at(beta)).compare(&l.alpha_limit) != std::cmp::Ordering::Less
            {
                return Err(StrategyError::MalformedCandidate(format!(
                    "letter {i}: value at {beta} reaches the tag limit"
                )));
            }
        }
    }
    // adjacent letters with equal data must not cancel
    for (i, w) in cand.letters.windows(2).enumerate() {
        let same = format!("{:?}{:?}{}", w[0].g_limit, w[0].h_limit, w[0].alpha_limit)
            == format!("{:?}{:?}{}", w[1].g_limit, w[1].h_limit, w[1].alpha_limit);
        if same && w[0].sign == -w[1].sign {
            return Err(StrategyError::MalformedCandidate(format!(
                "letters {i},{} cancel: the word is not reduced",
                i + 1
            )));
        }
    }
    let sup_u = cand.u_star.iter().next_back().map_or(0, |&m| m + 1);
    // witnesses: least position attaining each value
    let witnesses: Vec<std::collections::BTreeMap<u64, u64>> = cand
        .letters
        .iter()
        .map(|l| {
            let mut w = std::collections::BTreeMap::new();
            for beta in 0..n {
                w.entry(l.g_limit.at(beta)).or_insert(beta);
            }
            w
        })
        .collect();
    // closure point: past sup(u*), above all witnesses, absorbing every
    // exceed map
    let mut delta_star = None;
    'search: for delta in (sup_u + 1)..n {
        for (l, letter) in cand.letters.iter().enumerate() {
            for &w in witnesses[l].values() {
                if w >= delta {
                    continue 'search;
                }
            }
            for beta in 0..delta {
                if letter.h_limit.at(beta) > delta {
                    continue 'search;
                }
            }
        }
        delta_star = Some(delta);
        break;
    }
    let Some(delta) = delta_star else {
        return Ok(ObstructionVerdict::NoClosurePoint {
            checked_up_to: n,
            reason: format!("no δ in ({sup_u}, {n}) absorbs every exceed map and witness"),
        });
    };
    let mut letters = Vec::new();
    for (l, letter) in cand.letters.iter().enumerate() {
        let v_delta = letter.g_limit.at(delta);
        let h_delta = letter.h_limit.at(delta);
        let mut rows = Vec::new();
        let mut contradiction = String::new();
        for (&i, &w) in &witnesses[l] {
            if Ordinal::nat(i).compare(&letter.alpha_limit) != std::cmp::Ordering::Less {
                continue;
            }
            let h_w = letter.h_limit.at(w);
            // h(witness) ≤ δ* < h(δ*): the exceed values split, so equal
            // g-values are impossible and monotonicity forces strictness
            let conclusion = format!(
                "value {i} at witness {w}: h({w}) = {h_w} ≤ {delta} < {h_delta} = h({delta}), \
                 so g({delta}) > {i}"
            );
            if i == v_delta {
                contradiction =
                    format!("{i} = g({w}) < g({delta}) = {i}: the candidate cannot extend");
            }
            rows.push(TraceRow {
                value: i,
                witness: w,
                h_witness: h_w,
                h_delta,
                conclusion,
            });
        }
        if contradiction.is_empty() {
            // the value at δ* must be witnessed below δ* by closure
            contradiction = format!(
                "value {v_delta} at {delta} has no witness below {delta}: closure violated"
            );
        }
        letters.push(LetterTrace {
            letter: l,
            value_at_delta: v_delta,
            rows,
            contradiction,
        });
    }
    let word_lengths = word_length_checks(spec, cand)?;
    Ok(ObstructionVerdict::Contradiction(ObstructionTrace {
        delta_star: delta,
        letters,
        word_lengths,
    }))
}

/// Materialize the candidate word at a nested pair of sorts built from
/// level-leading positions (where the limit data is valid key data) and
/// confirm that the reduced projected word is no longer than the
/// original — restriction can only collapse letters.
fn word_length_checks(
    spec: &ParameterSpec,
    cand: &ObstructionCandidate,
) -> Result<Vec<WordLengthCheck>, StrategyError> {
    // positions where some letter starts a new value level; the sampled
    // sorts stay inside [0, N)
    let mut leads: BTreeSet<u64> = BTreeSet::new();
    for letter in &cand.letters {
        let mut seen = BTreeSet::new();
        for beta in 0..spec.n {
            if seen.insert(letter.g_limit.at(beta)) {
                leads.insert(beta);
            }
        }
    }
    let leads: Vec<u64> = leads.into_iter().collect();
    let mut out = Vec::new();
    let pairs: Vec<(Vec<u64>, Vec<u64>)> = match leads.len() {
        0 => vec![],
        1 => vec![(vec![leads[0]], vec![leads[0]])],
        _ => vec![
            (vec![leads[0]], vec![leads[0], leads[1]]),
            (vec![leads[1]], vec![leads[0], leads[1]]),
        ],
    };
    for (small, big) in pairs {
        let key_at = |positions: &[u64], letter: &ObstructionLetter| {
            GeneratorKey::new(
                positions.iter().copied().collect(),
                letter.alpha_limit.clone(),
                positions
                    .iter()
                    .map(|&b| (b, Ordinal::nat(letter.g_limit.at(b))))
                    .collect(),
                positions
                    .iter()
                    .map(|&b| (b, letter.h_limit.at(b)))
                    .collect(),
            )
        };
        let mut big_word = GroupElement::identity_free();
        let mut small_word = GroupElement::identity_free();
        let mut ok = true;
        for letter in &cand.letters {
            let kb = key_at(&big, letter)?;
            let ks = key_at(&small, letter)?;
            if !j_membership(spec, &kb)? || !j_membership(spec, &ks)? {
                ok = false;
                break;
            }
            let lb = if letter.sign > 0 {
                GroupElement::generator_free(kb.generator())
            } else {
                ginv(&GroupElement::generator_free(kb.generator()))
            };
            let ls = if letter.sign > 0 {
                GroupElement::generator_free(ks.generator())
            } else {
                ginv(&GroupElement::generator_free(ks.generator()))
            };
            big_word = gmul(&big_word, &lb)?;
            small_word = gmul(&small_word, &ls)?;
        }
        if !ok {
            continue;
        }
        let check = WordLengthCheck {
            small_sort: format!("{}", SortId::new(small.iter().copied())),
            big_sort: format!("{}", SortId::new(big.iter().copied())),
            small_len: small_word.len(),
            big_len: big_word.len(),
        };
        if check.small_len > check.big_len {
            return Err(StrategyError::MalformedCandidate(format!(
                "projected word grew from {} to {} letters",
                check.big_len, check.small_len
            )));
        }
        out.push(check);
    }
    Ok(out)
}
