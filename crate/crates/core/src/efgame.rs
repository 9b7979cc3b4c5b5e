//! The back-and-forth game: an exact solver for finite structures and
//! finite length, a referee for arbitrary strategies and adversaries,
//! and a transcript verifier.
//!
//! One round: the adversary AIS demands element sets `A1 ⊆ M1`,
//! `A2 ⊆ M2` with `|A1| + |A2| < 1 + μ`; the player ISO answers with an
//! extension of the current partial isomorphism whose domain covers `A1`
//! and whose range covers `A2`. ISO loses as soon as it has no legal
//! answer. Limit stages cannot be reached by software; transcripts may
//! carry explicit limit markers whose map must be the union of the
//! preceding maps.

use crate::model::{check_symbolic_map, ModelElement};
use crate::ordinal::Ordinal;
use crate::parameter::ParameterSpec;
use crate::structure::{check_partial_isomorphism, FiniteStructure, PartialMap, StructureError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum GameError {
    #[error("the solver needs a finite game length")]
    InfiniteLength,
    #[error("node budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("demand of size {got} exceeds the bound {mu}")]
    DemandTooLarge { got: usize, mu: u64 },
    #[error("element outside the structure: {0}")]
    ForeignElement(String),
    #[error("mu must be at least 1")]
    ZeroMu,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("model error: {0}")]
    Model(String),
}

impl From<crate::model::ModelError> for GameError {
    fn from(e: crate::model::ModelError) -> Self {
        GameError::Model(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    Iso,
    Ais,
}

/// A demand: element sets for the left and right structure.
pub type Demand = (Vec<u32>, Vec<u32>);

/// Shared game configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameConfig {
    /// Game length α; the solver requires it finite.
    pub length: Ordinal,
    /// Demand bound μ ≥ 1: per round `|A1| + |A2| ≤ μ`.
    pub mu: u64,
    /// Bound on the played prefix when the length is infinite.
    pub stop_after: u64,
    /// Node budget for the solver.
    pub node_cap: Option<u64>,
    /// Memoize on the sorted atom matrix instead of the exact map.
    /// Coarser and faster; the exact key is the default.
    pub atom_matrix_memo: bool,
}

impl GameConfig {
    pub fn finite(rounds: u64, mu: u64) -> GameConfig {
        GameConfig {
            length: Ordinal::nat(rounds),
            mu,
            stop_after: rounds,
            node_cap: None,
            atom_matrix_memo: false,
        }
    }

    /// Number of rounds actually played.
    pub fn rounds_to_play(&self) -> u64 {
        self.length.as_nat().unwrap_or(self.stop_after)
    }
}

// ---------------------------------------------------------------------
// Exact solver for finite structures.

type MemoKey = (u64, Vec<(u32, u32)>);

pub struct Solver<'a> {
    left: &'a FiniteStructure,
    right: &'a FiniteStructure,
    cfg: GameConfig,
    memo: HashMap<MemoKey, bool>,
    nodes: u64,
}

/// Result of an exact solve, hanging on to the memo so the winner's
/// strategy can be queried position by position.
pub struct Solved<'a> {
    pub winner: Player,
    pub nodes: u64,
    solver: Solver<'a>,
    seed: PartialMap,
}

impl<'a> Solver<'a> {
    pub fn new(
        left: &'a FiniteStructure,
        right: &'a FiniteStructure,
        cfg: GameConfig,
    ) -> Solver<'a> {
        Solver {
            left,
            right,
            cfg,
            memo: HashMap::new(),
            nodes: 0,
        }
    }

    fn bump(&mut self) -> Result<(), GameError> {
        self.nodes += 1;
        if let Some(cap) = self.cfg.node_cap {
            if self.nodes > cap {
                return Err(GameError::BudgetExceeded { nodes: self.nodes });
            }
        }
        Ok(())
    }

    fn memo_key(&self, rounds_left: u64, map: &PartialMap) -> MemoKey {
        if !self.cfg.atom_matrix_memo {
            return (rounds_left, map.canonical());
        }
        // Sorted atom-matrix key: pairs are replaced by their row of
        // atoms against every pair and every raw element. Conflates
        // positions with identical matrices.
        let pairs = map.canonical();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for &(a, b) in &pairs {
            let mut row = Vec::new();
            for (name, arity) in &self.left.vocabulary.predicates {
                if *arity != 2 {
                    continue;
                }
                for &(a2, b2) in &pairs {
                    let mut bits = 0u32;
                    if self.left.relations[name].contains(&vec![a, a2]) {
                        bits |= 1;
                    }
                    if self.right.relations[name].contains(&vec![b, b2]) {
                        bits |= 2;
                    }
                    if a == a2 {
                        bits |= 4;
                    }
                    row.push(bits);
                }
            }
            row.push(a);
            row.push(b);
            rows.push(row);
        }
        rows.sort();
        let flat: Vec<(u32, u32)> = rows.into_iter().flatten().map(|x| (x, 0)).collect();
        (rounds_left, flat)
    }

    /// Demands in deterministic order: all `(A1, A2)` with
    /// `|A1| + |A2| ≤ μ`, subsets enumerated lexicographically.
    fn demands(&self) -> Vec<Demand> {
        let mu = self.cfg.mu as usize;
        let lefts = subsets_up_to(self.left.universe, mu);
        let rights = subsets_up_to(self.right.universe, mu);
        let mut out = Vec::new();
        for a1 in &lefts {
            for a2 in &rights {
                if a1.len() + a2.len() <= mu {
                    out.push((a1.clone(), a2.clone()));
                }
            }
        }
        out
    }

    /// All minimal extensions of `map` covering the demand, lех-first.
    fn extensions(
        &self,
        map: &PartialMap,
        demand_left: &[u32],
        demand_right: &[u32],
    ) -> Result<Vec<PartialMap>, GameError> {
        let need_left: Vec<u32> = demand_left
            .iter()
            .copied()
            .filter(|&a| map.apply(a).is_none())
            .collect();
        let mut out = Vec::new();
        let mut stack = vec![(map.clone(), 0usize)];
        // first cover the left demand
        let mut covered_left = Vec::new();
        while let Some((m, i)) = stack.pop() {
            if i == need_left.len() {
                covered_left.push(m);
                continue;
            }
            let a = need_left[i];
            for b in (0..self.right.universe).rev() {
                if m.preimage(b).is_some() {
                    continue;
                }
                let mut m2 = m.clone();
                m2.insert(a, b)?;
                stack.push((m2, i + 1));
            }
        }
        // then the right demand
        for m in covered_left {
            let need_right: Vec<u32> = demand_right
                .iter()
                .copied()
                .filter(|&b| m.preimage(b).is_none())
                .collect();
            let mut stack = vec![(m, 0usize)];
            while let Some((m, i)) = stack.pop() {
                if i == need_right.len() {
                    if check_partial_isomorphism(self.left, self.right, &m)? {
                        out.push(m);
                    }
                    continue;
                }
                let b = need_right[i];
                for a in (0..self.left.universe).rev() {
                    if m.apply(a).is_some() {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2.insert(a, b)?;
                    stack.push((m2, i + 1));
                }
            }
        }
        out.sort_by_key(|x| x.canonical());
        out.dedup_by(|x, y| x.canonical() == y.canonical());
        Ok(out)
    }

    fn iso_wins(&mut self, rounds_left: u64, map: &PartialMap) -> Result<bool, GameError> {
        if rounds_left == 0 {
            return Ok(true);
        }
        let key = self.memo_key(rounds_left, map);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.bump()?;
        let mut result = true;
        for (a1, a2) in self.demands() {
            let mut survivable = false;
            for ext in self.extensions(map, &a1, &a2)? {
                if self.iso_wins(rounds_left - 1, &ext)? {
                    survivable = true;
                    break;
                }
            }
            if !survivable {
                result = false;
                break;
            }
        }
        self.memo.insert(key, result);
        Ok(result)
    }
}

/// Exact minimax solve. The winner is determined by full enumeration of
/// demands and minimal covering extensions, memoized on position.
pub fn solve<'a>(
    left: &'a FiniteStructure,
    right: &'a FiniteStructure,
    cfg: GameConfig,
    seed: &PartialMap,
) -> Result<Solved<'a>, GameError> {
    if cfg.mu == 0 {
        return Err(GameError::ZeroMu);
    }
    let Some(rounds) = cfg.length.as_nat() else {
        return Err(GameError::InfiniteLength);
    };
    if !check_partial_isomorphism(left, right, seed)? {
        // a seed that is not a partial isomorphism is an immediate loss
        let solver = Solver::new(left, right, cfg);
        return Ok(Solved {
            winner: Player::Ais,
            nodes: 0,
            solver,
            seed: seed.clone(),
        });
    }
    let mut solver = Solver::new(left, right, cfg);
    let iso = solver.iso_wins(rounds, seed)?;
    Ok(Solved {
        winner: if iso { Player::Iso } else { Player::Ais },
        nodes: solver.nodes,
        solver,
        seed: seed.clone(),
    })
}

impl<'a> Solved<'a> {
    /// ISO's lexicographically first winning answer to a demand, when
    /// one exists.
    pub fn best_response(
        &mut self,
        rounds_left: u64,
        map: &PartialMap,
        demand_left: &[u32],
        demand_right: &[u32],
    ) -> Result<Option<PartialMap>, GameError> {
        for ext in self.solver.extensions(map, demand_left, demand_right)? {
            if self.solver.iso_wins(rounds_left - 1, &ext)? {
                return Ok(Some(ext));
            }
        }
        Ok(None)
    }

    /// AIS's lexicographically first winning demand, when one exists.
    pub fn winning_demand(
        &mut self,
        rounds_left: u64,
        map: &PartialMap,
    ) -> Result<Option<Demand>, GameError> {
        if rounds_left == 0 {
            return Ok(None);
        }
        for (a1, a2) in self.solver.demands() {
            let mut survivable = false;
            for ext in self.solver.extensions(map, &a1, &a2)? {
                if self.solver.iso_wins(rounds_left - 1, &ext)? {
                    survivable = true;
                    break;
                }
            }
            if !survivable {
                return Ok(Some((a1, a2)));
            }
        }
        Ok(None)
    }

    pub fn seed(&self) -> &PartialMap {
        &self.seed
    }

    /// Materialize the winner's strategy over all positions reachable
    /// from the seed (bounded breadth-first walk; small instances only).
    pub fn strategy_table(&mut self) -> Result<StrategyTable, GameError> {
        let rounds = self
            .solver
            .cfg
            .length
            .as_nat()
            .ok_or(GameError::InfiniteLength)?;
        let mut table = StrategyTable {
            winner: self.winner,
            responses: Vec::new(),
        };
        match self.winner {
            Player::Iso => {
                let mut frontier = vec![(rounds, self.seed.clone())];
                let mut seen = std::collections::BTreeSet::new();
                while let Some((k, map)) = frontier.pop() {
                    if k == 0 || !seen.insert((k, map.canonical())) {
                        continue;
                    }
                    for (a1, a2) in self.solver.demands() {
                        if let Some(resp) = self.best_response(k, &map, &a1, &a2)? {
                            table.responses.push(StrategyEntry {
                                rounds_left: k,
                                position: map.canonical(),
                                demand_left: a1,
                                demand_right: a2,
                                response: resp.canonical(),
                            });
                            frontier.push((k - 1, resp));
                        }
                    }
                }
            }
            Player::Ais => {
                // one winning demand per reachable position on the main line
                if let Some((a1, a2)) = self.winning_demand(rounds, &self.seed.clone())? {
                    table.responses.push(StrategyEntry {
                        rounds_left: rounds,
                        position: self.seed.canonical(),
                        demand_left: a1,
                        demand_right: a2,
                        response: Vec::new(),
                    });
                }
            }
        }
        table.responses.sort_by(|a, b| {
            (a.rounds_left, &a.position, &a.demand_left, &a.demand_right).cmp(&(
                b.rounds_left,
                &b.position,
                &b.demand_left,
                &b.demand_right,
            ))
        });
        Ok(table)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub rounds_left: u64,
    pub position: Vec<(u32, u32)>,
    pub demand_left: Vec<u32>,
    pub demand_right: Vec<u32>,
    pub response: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyTable {
    pub winner: Player,
    pub responses: Vec<StrategyEntry>,
}

fn subsets_up_to(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&x| x + 1);
            for e in start..n {
                let mut s2 = s.clone();
                s2.push(e);
                next.push(s2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

// ---------------------------------------------------------------------
// Referee, transcripts, verification.

/// What the referee needs from a pair of models: element sanity and
/// map verification.
pub trait Arena {
    type Elem: Clone + Ord + fmt::Display + Serialize + DeserializeOwned;

    fn element_ok(&self, left_side: bool, e: &Self::Elem) -> bool;

    /// Exact verdict on a candidate partial isomorphism.
    fn verify_map(&self, pairs: &[(Self::Elem, Self::Elem)]) -> Result<MapVerdict, GameError>;
}

#[derive(Clone, Debug, Serialize)]
pub struct MapVerdict {
    pub ok: bool,
    pub detail: Option<String>,
    /// The map carried an exact algebraic certificate.
    pub certified: bool,
}

pub struct FiniteArena<'a> {
    pub left: &'a FiniteStructure,
    pub right: &'a FiniteStructure,
}

impl<'a> Arena for FiniteArena<'a> {
    type Elem = u32;

    fn element_ok(&self, left_side: bool, e: &u32) -> bool {
        let u = if left_side {
            self.left.universe
        } else {
            self.right.universe
        };
        *e < u
    }

    fn verify_map(&self, pairs: &[(u32, u32)]) -> Result<MapVerdict, GameError> {
        let map = match PartialMap::from_pairs(pairs.to_vec()) {
            Ok(m) => m,
            Err(_) => {
                return Ok(MapVerdict {
                    ok: false,
                    detail: Some("not functional/injective".into()),
                    certified: false,
                })
            }
        };
        let ok = check_partial_isomorphism(self.left, self.right, &map)?;
        Ok(MapVerdict {
            ok,
            detail: if ok {
                None
            } else {
                Some("atom check failed".into())
            },
            certified: false,
        })
    }
}

/// Both sides are the one symbolic model; the pointed constants live in
/// the seed map.
pub struct SymbolicArena<'a> {
    pub spec: &'a ParameterSpec,
}

impl<'a> Arena for SymbolicArena<'a> {
    type Elem = ModelElement;

    fn element_ok(&self, _left_side: bool, e: &ModelElement) -> bool {
        e.validate(self.spec).is_ok()
    }

    fn verify_map(&self, pairs: &[(ModelElement, ModelElement)]) -> Result<MapVerdict, GameError> {
        let check = check_symbolic_map(self.spec, pairs)?;
        Ok(MapVerdict {
            ok: check.ok,
            detail: check.failure,
            certified: check.certified,
        })
    }
}

/// One recorded stage of a play.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "E: Serialize + DeserializeOwned")]
pub enum Round<E> {
    Move {
        demand_left: Vec<E>,
        demand_right: Vec<E>,
        map_after: Vec<(E, E)>,
    },
    Limit {
        index: Ordinal,
        map_after: Vec<(E, E)>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlayOutcome {
    /// The configured prefix was played out.
    Completed,
    /// ISO had no legal move at the recorded round; AIS wins.
    IsoStuck,
    /// The play was cut short from outside (resignation).
    Incomplete,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "E: Serialize + DeserializeOwned")]
pub struct Transcript<E> {
    pub seed: Vec<(E, E)>,
    pub rounds: Vec<Round<E>>,
    pub outcome: PlayOutcome,
}

impl<E: Clone + Ord> Transcript<E> {
    pub fn final_map(&self) -> Vec<(E, E)> {
        self.rounds
            .iter()
            .rev()
            .map(|r| match r {
                Round::Move { map_after, .. } | Round::Limit { map_after, .. } => map_after.clone(),
            })
            .next()
            .unwrap_or_else(|| self.seed.clone())
    }
}

/// ISO side of a play.
pub trait IsoPlayer<E> {
    /// Extension covering the demand, or `None` to resign.
    fn extend(
        &mut self,
        round: u64,
        map: &[(E, E)],
        demand_left: &[E],
        demand_right: &[E],
    ) -> Option<Vec<(E, E)>>;
}

/// AIS side of a play. `None` stops the play (resignation or an
/// exhausted script); the transcript is then marked incomplete.
pub trait AisPlayer<E> {
    fn demand(&mut self, round: u64, map: &[(E, E)]) -> Option<(Vec<E>, Vec<E>)>;
}

/// Referee a play. Demands are validated against the μ bound and the
/// element universes; the ISO answer must extend the current map, cover
/// the demand, and pass map verification, otherwise the play ends with
/// [`PlayOutcome::IsoStuck`].
pub fn play<A: Arena>(
    arena: &A,
    cfg: &GameConfig,
    seed: Vec<(A::Elem, A::Elem)>,
    iso: &mut dyn IsoPlayer<A::Elem>,
    ais: &mut dyn AisPlayer<A::Elem>,
) -> Result<Transcript<A::Elem>, GameError> {
    if cfg.mu == 0 {
        return Err(GameError::ZeroMu);
    }
    let rounds = cfg.rounds_to_play();
    let mut map = seed.clone();
    let mut transcript = Transcript {
        seed,
        rounds: Vec::new(),
        outcome: PlayOutcome::Completed,
    };
    for round in 1..=rounds {
        let Some((a1, a2)) = ais.demand(round, &map) else {
            transcript.outcome = PlayOutcome::Incomplete;
            return Ok(transcript);
        };
        let size = a1.len() + a2.len();
        if size as u64 > cfg.mu {
            return Err(GameError::DemandTooLarge {
                got: size,
                mu: cfg.mu,
            });
        }
        for e in &a1 {
            if !arena.element_ok(true, e) {
                return Err(GameError::ForeignElement(e.to_string()));
            }
        }
        for e in &a2 {
            if !arena.element_ok(false, e) {
                return Err(GameError::ForeignElement(e.to_string()));
            }
        }
        let Some(next) = iso.extend(round, &map, &a1, &a2) else {
            transcript.outcome = PlayOutcome::IsoStuck;
            return Ok(transcript);
        };
        let legal = extends(&next, &map) && covers(&next, &a1, &a2) && arena.verify_map(&next)?.ok;
        if !legal {
            transcript.outcome = PlayOutcome::IsoStuck;
            return Ok(transcript);
        }
        map = next.clone();
        transcript.rounds.push(Round::Move {
            demand_left: a1,
            demand_right: a2,
            map_after: next,
        });
    }
    Ok(transcript)
}

fn extends<E: PartialEq>(next: &[(E, E)], prev: &[(E, E)]) -> bool {
    prev.iter().all(|p| next.contains(p))
}

fn covers<E: PartialEq>(map: &[(E, E)], demand_left: &[E], demand_right: &[E]) -> bool {
    demand_left.iter().all(|a| map.iter().any(|(x, _)| x == a))
        && demand_right.iter().all(|b| map.iter().any(|(_, y)| y == b))
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub first_failure: Option<String>,
    pub rounds_checked: usize,
    /// Rounds whose map check used the algebraic certificate.
    pub certified_rounds: usize,
}

/// Full transcript verification: every map is a partial isomorphism,
/// maps increase from the seed, each round's map covers its demands,
/// demand sizes respect μ, and each limit marker's map is the union of
/// its predecessors.
pub fn verify_transcript<A: Arena>(
    arena: &A,
    cfg: &GameConfig,
    t: &Transcript<A::Elem>,
) -> Result<VerifyReport, GameError> {
    let fail = |at: usize, msg: String| VerifyReport {
        ok: false,
        first_failure: Some(format!("round {at}: {msg}")),
        rounds_checked: at,
        certified_rounds: 0,
    };
    let seed_verdict = arena.verify_map(&t.seed)?;
    if !seed_verdict.ok {
        return Ok(fail(0, "seed map is not a partial isomorphism".into()));
    }
    let mut certified_rounds = 0usize;
    let mut prev: Vec<(A::Elem, A::Elem)> = t.seed.clone();
    let mut union_so_far: Vec<(A::Elem, A::Elem)> = t.seed.clone();
    for (i, round) in t.rounds.iter().enumerate() {
        let at = i + 1;
        match round {
            Round::Move {
                demand_left,
                demand_right,
                map_after,
            } => {
                let size = demand_left.len() + demand_right.len();
                if size as u64 > cfg.mu {
                    return Ok(fail(
                        at,
                        format!("demand of size {size} exceeds μ = {}", cfg.mu),
                    ));
                }
                if !extends(map_after, &prev) {
                    return Ok(fail(at, "map does not extend the previous one".into()));
                }
                if !covers(map_after, demand_left, demand_right) {
                    return Ok(fail(at, "uncovered demand".into()));
                }
                let verdict = arena.verify_map(map_after)?;
                if !verdict.ok {
                    return Ok(fail(
                        at,
                        verdict
                            .detail
                            .unwrap_or_else(|| "map is not a partial isomorphism".into()),
                    ));
                }
                if verdict.certified {
                    certified_rounds += 1;
                }
                for p in map_after {
                    if !union_so_far.contains(p) {
                        union_so_far.push(p.clone());
                    }
                }
                prev = map_after.clone();
            }
            Round::Limit {
                index: _,
                map_after,
            } => {
                let mut expected = union_so_far.clone();
                expected.sort();
                let mut got = map_after.clone();
                got.sort();
                if expected != got {
                    return Ok(fail(
                        at,
                        "limit map is not the union of its predecessors".into(),
                    ));
                }
                let verdict = arena.verify_map(map_after)?;
                if !verdict.ok {
                    return Ok(fail(at, "limit map is not a partial isomorphism".into()));
                }
                prev = map_after.clone();
            }
        }
    }
    Ok(VerifyReport {
        ok: true,
        first_failure: None,
        rounds_checked: t.rounds.len(),
        certified_rounds,
    })
}
