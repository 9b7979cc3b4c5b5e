//! Acceptance suite. Each test prints one pass/fail line and enforces
//! its stated time budget.
//!
//! Criterion 1 — exact agreement between the memoized solver and an
//!   independent naive recursion on random structure pairs.
//! Criterion 2 — the classical linear-order calibration.
//! Criterion 3 — strategy soundness over seeded campaigns, uniform
//!   variant, per game length 1..4.
//! Criterion 4 — the zero-free variant with one fixed pointed pair
//!   across all lengths (Boolean mode).
//! Criterion 5 — witness-system clauses on sampled chains plus fault
//!   detection.
//! Criterion 6 — exactness of the collapse-level map.
//! Criterion 7 — translation-family algebra on sampled families.
//! Criterion 8 — the documented finite-scale divergence: the rigidity
//!   probe succeeds, and obstruction traces match golden files.
//! Criterion 9 — ordinal arithmetic laws, exhaustively on small forms.

use efgames_core::efgame::{solve, GameConfig, Player};
use efgames_core::freegroup::{ginv, gmul, GroupElement};
use efgames_core::model::{
    apply_family, eval_atomic, family_from_images, family_of, membership_c, Atom, Family,
    ModelElement,
};
use efgames_core::ordinal::Ordinal;
use efgames_core::parameter::{
    derive_h, j_membership, GeneratorKey, Mode, ParameterSpec, SortId, TaggedMonotone, Variant,
};
use efgames_core::rng::SimRng;
use efgames_core::strategy::{
    check_witness, init_state, nontrivial_family_probe, obstruction_trace, AdversaryKind,
    CampaignConfig, ObstructionCandidate, ObstructionLetter, ObstructionVerdict, StepFunction,
    WitnessFault, WitnessPlan,
};
use efgames_core::structure::{check_partial_isomorphism, FiniteStructure, PartialMap, Vocabulary};
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

fn report(criterion: u32, name: &str, started: Instant, budget: Duration, detail: String) {
    let elapsed = started.elapsed();
    println!("[PASS] criterion {criterion}: {name} — {detail} ({elapsed:.2?})");
    assert!(
        elapsed < budget,
        "[FAIL] criterion {criterion}: exceeded the {budget:?} budget ({elapsed:.2?})"
    );
}

// ---------------------------------------------------------------------
// Criterion 1: solver oracle equivalence.

/// Independent naive recursion: its own demand and extension
/// enumeration, no memoization, no solver internals. Minimal covering
/// extensions suffice on both sides: pairs beyond the demanded cover
/// only constrain the extending player later.
mod naive {
    use super::*;

    fn subsets(n: u32, max: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for e in 0..n {
            let mut grown = Vec::new();
            for s in &out {
                if s.len() < max {
                    let mut s2 = s.clone();
                    s2.push(e);
                    grown.push(s2);
                }
            }
            out.extend(grown);
        }
        out
    }

    fn covers(
        left: &FiniteStructure,
        right: &FiniteStructure,
        map: &[(u32, u32)],
        a1: &[u32],
        a2: &[u32],
    ) -> Vec<Vec<(u32, u32)>> {
        // all injective assignments of the uncovered demand
        let mut need1: Vec<u32> = a1
            .iter()
            .copied()
            .filter(|a| !map.iter().any(|&(x, _)| x == *a))
            .collect();
        need1.dedup();
        let mut states = vec![map.to_vec()];
        for a in need1 {
            let mut next = Vec::new();
            for st in &states {
                for b in 0..right.universe {
                    if st.iter().any(|&(_, y)| y == b) {
                        continue;
                    }
                    let mut st2 = st.clone();
                    st2.push((a, b));
                    next.push(st2);
                }
            }
            states = next;
        }
        let mut out = Vec::new();
        for st in states {
            let need2: Vec<u32> = a2
                .iter()
                .copied()
                .filter(|b| !st.iter().any(|&(_, y)| y == *b))
                .collect();
            let mut sub = vec![st];
            for b in need2 {
                let mut next = Vec::new();
                for s in &sub {
                    for a in 0..left.universe {
                        if s.iter().any(|&(x, _)| x == a) {
                            continue;
                        }
                        let mut s2 = s.clone();
                        s2.push((a, b));
                        next.push(s2);
                    }
                }
                sub = next;
            }
            out.extend(sub);
        }
        out
    }

    pub fn iso_wins(
        left: &FiniteStructure,
        right: &FiniteStructure,
        mu: usize,
        rounds: u32,
        map: &[(u32, u32)],
    ) -> bool {
        if rounds == 0 {
            return true;
        }
        for a1 in subsets(left.universe, mu) {
            for a2 in subsets(right.universe, mu - a1.len()) {
                let mut survivable = false;
                for ext in covers(left, right, map, &a1, &a2) {
                    let pm = match PartialMap::from_pairs(ext.clone()) {
                        Ok(m) => m,
                        Err(_) => continue,
                    };
                    if !check_partial_isomorphism(left, right, &pm).unwrap() {
                        continue;
                    }
                    if iso_wins(left, right, mu, rounds - 1, &ext) {
                        survivable = true;
                        break;
                    }
                }
                if !survivable {
                    return false;
                }
            }
        }
        true
    }
}

fn random_structure(rng: &mut SimRng, universe: u32) -> FiniteStructure {
    let vocab = Vocabulary {
        predicates: vec![("p".to_string(), 1), ("r".to_string(), 2)],
        functions: vec![],
        constants: vec![],
    };
    let mut s = FiniteStructure::new(vocab, universe).unwrap();
    for i in 0..universe {
        if rng.chance(1, 2) {
            s.add_tuple("p", vec![i]).unwrap();
        }
        for j in 0..universe {
            if rng.chance(3, 10) {
                s.add_tuple("r", vec![i, j]).unwrap();
            }
        }
    }
    s
}

#[test]
fn criterion_1_solver_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = SimRng::new(0x5EED_0001);
    let mut checked = 0;
    while checked < 100 {
        let na = 2 + rng.below(3) as u32;
        let nb = 2 + rng.below(3) as u32;
        let k = 1 + rng.below(3) as u32;
        let mu = 1 + rng.below(2);
        // keep the deliberately exponential oracle inside its budget
        if k == 3 && mu == 2 && (na == 4 || nb == 4) {
            continue;
        }
        let a = random_structure(&mut rng, na);
        // a quarter of the instances play a structure against itself,
        // exercising full-depth extender wins on both solvers
        let b = if rng.chance(1, 4) {
            a.clone()
        } else {
            random_structure(&mut rng, nb)
        };
        let solved = solve(
            &a,
            &b,
            GameConfig::finite(k as u64, mu),
            &PartialMap::empty(),
        )
        .expect("solver");
        let oracle = naive::iso_wins(&a, &b, mu as usize, k, &[]);
        assert_eq!(
            solved.winner == Player::Iso,
            oracle,
            "[FAIL] criterion 1: disagreement on instance {checked} ({na},{nb},k={k},mu={mu})"
        );
        checked += 1;
    }
    report(
        1,
        "solver oracle equivalence",
        started,
        Duration::from_secs(60),
        format!("{checked}/100 random instances agree exactly"),
    );
}

// ---------------------------------------------------------------------
// Criterion 2: linear-order calibration.

#[test]
fn criterion_2_linear_order_calibration() {
    let started = Instant::now();
    let cases = [
        (3u32, 4u32, 2u64, Player::Iso),
        (3, 4, 3, Player::Ais),
        (7, 8, 3, Player::Iso),
    ];
    for (na, nb, k, expect) in cases {
        let a = FiniteStructure::linear_order(na);
        let b = FiniteStructure::linear_order(nb);
        let solved = solve(&a, &b, GameConfig::finite(k, 1), &PartialMap::empty()).unwrap();
        assert_eq!(
            solved.winner, expect,
            "[FAIL] criterion 2: orders ({na},{nb}) at {k} rounds"
        );
    }
    report(
        2,
        "linear-order calibration",
        started,
        Duration::from_secs(60),
        "sizes (3,4): extender wins k=2, demander wins k=3; sizes (7,8): extender wins k=3"
            .to_string(),
    );
}

// ---------------------------------------------------------------------
// Criteria 3 and 4: strategy soundness campaigns.

fn soundness_suite(spec: &ParameterSpec, label: &str, criterion: u32, started: Instant) {
    let s_star = SortId::new([0, 1]);
    let mut total = 0usize;
    for alpha in 1..=4u64 {
        for (adversary, seed) in [
            (AdversaryKind::Random, 0xA11CE + alpha),
            (AdversaryKind::Boundary, 0xB0B + alpha),
        ] {
            let cc = CampaignConfig {
                alpha,
                mu: 4,
                games: 250,
                adversary,
                seed,
            };
            let result = efgames_core::strategy::run_campaign(spec, &s_star, &cc).unwrap();
            assert!(
                result.all_pass(),
                "[FAIL] criterion {criterion}: {label} alpha={alpha} {adversary}: \
                 {} verified of {}, {} stuck, {} anchor violations; first: {:?}",
                result.verified,
                result.games,
                result.stuck,
                result.anchor_violations,
                result.failures.first()
            );
            total += result.games;
        }
    }
    report(
        criterion,
        label,
        started,
        Duration::from_secs(300),
        format!("{total} games over lengths 1..4: all maps verified, 0 stuck, anchor held"),
    );
}

#[test]
fn criterion_3_strategy_soundness_uniform() {
    let started = Instant::now();
    let spec = ParameterSpec::canonical(16, 5, Mode::Free, Variant::Uniform);
    soundness_suite(&spec, "strategy soundness (uniform)", 3, started);
}

#[test]
fn criterion_4_zero_free_fixed_pair() {
    let started = Instant::now();
    let spec = ParameterSpec::canonical(16, 5, Mode::Boolean, Variant::ZeroFree);
    // one pointed pair across every length
    let s_star = SortId::new([0, 1]);
    let mut anchors = BTreeSet::new();
    for alpha in 1..=4u64 {
        let (_, c1, c2) = init_state(&spec, &s_star, &Ordinal::nat(alpha)).unwrap();
        anchors.insert((c1, c2));
    }
    assert_eq!(
        anchors.len(),
        1,
        "[FAIL] criterion 4: the pointed pair must not depend on the length"
    );
    soundness_suite(&spec, "zero-free variant, one fixed pair", 4, started);
}

// ---------------------------------------------------------------------
// Criterion 5: witness-system conditions.

#[test]
fn criterion_5_witness_conditions() {
    let started = Instant::now();
    let spec = ParameterSpec::canonical(16, 12, Mode::Free, Variant::Uniform);
    let plan = WitnessPlan {
        s_star: SortId::new([0, 1]),
        chains: 200,
        chain_length: 4,
        mu: 4,
        seed: 0x517E55,
        fault: None,
    };
    let clean = check_witness(&spec, &plan).unwrap();
    assert!(
        clean.all_pass(),
        "[FAIL] criterion 5: clean chains failed: {clean:?}"
    );
    let mut detected = 0;
    for run in 0..50u64 {
        let faulted = WitnessPlan {
            chains: 4,
            seed: 0xFA017 + run,
            fault: Some(WitnessFault::NonStrictNewValues),
            ..plan.clone()
        };
        let report = check_witness(&spec, &faulted).unwrap();
        if report.clause_failed("d-family-coherence") {
            detected += 1;
        }
    }
    assert_eq!(
        detected, 50,
        "[FAIL] criterion 5: fault detected in {detected}/50 runs"
    );
    report(
        5,
        "witness-system conditions",
        started,
        Duration::from_secs(300),
        "200 chains pass all six clauses; 50/50 non-strict faults flagged as coherence".to_string(),
    );
}

// ---------------------------------------------------------------------
// Criterion 6: collapse-level exactness.

#[test]
fn criterion_6_collapse_level_exactness() {
    let started = Instant::now();
    // literal enumeration of the defining Min formula
    let oracle = |g: &TaggedMonotone| -> Vec<u64> {
        let n = g.values.len() as u64;
        (0..n)
            .map(|gamma| {
                (0..=n)
                    .find(|&bp| {
                        bp == n
                            || g.values[bp as usize].compare(&g.values[gamma as usize])
                                == std::cmp::Ordering::Greater
                    })
                    .unwrap()
            })
            .collect()
    };
    let mut total = 0;
    for dom in 0..=5usize {
        let mut vals = vec![0u64; dom];
        loop {
            if vals.windows(2).all(|w| w[0] <= w[1]) {
                let g = TaggedMonotone::new(
                    Ordinal::nat(4),
                    vals.iter().map(|&v| Ordinal::nat(v)).collect(),
                )
                .unwrap();
                let h = derive_h(&g);
                assert_eq!(h, oracle(&g), "[FAIL] criterion 6: g = {vals:?}");
                // clauses on the output: non-decreasing, equal values
                // share their level, strictly above the argument
                let mut level: BTreeMap<u64, u64> = BTreeMap::new();
                for i in 0..dom {
                    assert!(
                        h[i] > i as u64,
                        "[FAIL] criterion 6: h({i}) = {} on {vals:?}",
                        h[i]
                    );
                    if i + 1 < dom {
                        assert!(h[i] <= h[i + 1]);
                    }
                    let v = vals[i];
                    if let Some(&h0) = level.get(&v) {
                        assert_eq!(h0, h[i], "[FAIL] criterion 6: level split on {vals:?}");
                    } else {
                        level.insert(v, h[i]);
                    }
                }
                total += 1;
            }
            let mut i = 0;
            loop {
                if i == dom {
                    break;
                }
                vals[i] += 1;
                if vals[i] <= 3 {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
            if i == dom {
                break;
            }
        }
    }
    report(
        6,
        "collapse-level exactness",
        started,
        Duration::from_secs(60),
        format!("{total} monotone maps (domain ≤ 5, values ≤ 3) agree with the literal formula"),
    );
}

// ---------------------------------------------------------------------
// Criterion 7: family algebra.

fn sample_family(
    spec: &ParameterSpec,
    rng: &mut SimRng,
    pool: &[SortId],
) -> (TaggedMonotone, Family) {
    let tag = Ordinal::nat(2 + rng.below(2));
    let dom = 8 + rng.below(4);
    let mut values = Vec::new();
    let mut cur = 0u64;
    let top = tag.as_nat().unwrap();
    for _ in 0..dom {
        if cur + 1 < top && rng.chance(1, 4) {
            cur += 1;
        }
        values.push(Ordinal::nat(cur));
    }
    let g = TaggedMonotone::new(tag, values).unwrap();
    let fam = family_of(spec, &g, pool).unwrap();
    (g, fam)
}

#[test]
fn criterion_7_family_algebra() {
    let started = Instant::now();
    let spec = ParameterSpec::canonical(8, 5, Mode::Free, Variant::Uniform);
    let mut rng = SimRng::new(0xFA311);
    let pool: Vec<SortId> = vec![
        SortId::new([0]),
        SortId::new([1]),
        SortId::new([3]),
        SortId::new([0, 1]),
        SortId::new([1, 3]),
        SortId::new([5]),
        SortId::new([3, 5]),
    ];
    for trial in 0..100 {
        let (_, fam) = sample_family(&spec, &mut rng, &pool);
        assert!(
            membership_c(&spec, &fam).unwrap(),
            "[FAIL] criterion 7: sampled family incoherent (trial {trial})"
        );
        // atom preservation on sampled elements
        let sorts: Vec<SortId> = fam.entries.keys().cloned().collect();
        let elems: Vec<ModelElement> = sorts
            .iter()
            .flat_map(|s| {
                let id = ModelElement::identity(&spec, s.clone());
                let gen = ModelElement {
                    sort: s.clone(),
                    value: fam.get(s).unwrap().clone(),
                };
                [id, gen]
            })
            .collect();
        for x in &elems {
            for y in &elems {
                let before = eval_atomic(
                    &spec,
                    &Atom::Link(x.sort.clone(), y.sort.clone(), x.clone(), y.clone()),
                );
                let fx = apply_family(&fam, x).unwrap();
                let fy = apply_family(&fam, y).unwrap();
                let after = eval_atomic(
                    &spec,
                    &Atom::Link(fx.sort.clone(), fy.sort.clone(), fx.clone(), fy.clone()),
                );
                match (before, after) {
                    (Ok(b), Ok(a)) => assert_eq!(
                        b, a,
                        "[FAIL] criterion 7: link atom moved on ({x}, {y}) (trial {trial})"
                    ),
                    (b, a) => panic!("[FAIL] criterion 7: undecided atom ({b:?}, {a:?})"),
                }
            }
            // translation functions commute with the family action
            let a = fam.get(&x.sort).unwrap();
            let ax = ModelElement {
                sort: x.sort.clone(),
                value: gmul(a, &x.value).unwrap(),
            };
            let fx = apply_family(&fam, x).unwrap();
            let fax = apply_family(&fam, &ax).unwrap();
            assert!(
                eval_atomic(
                    &spec,
                    &Atom::Translate(x.sort.clone(), a.clone(), fx.clone(), fax.clone())
                )
                .unwrap(),
                "[FAIL] criterion 7: function atom broken (trial {trial})"
            );
        }
        // bijection on the sampled fragment: inverse undoes
        for x in &elems {
            let round = apply_family(&fam.inverse(), &apply_family(&fam, x).unwrap()).unwrap();
            assert_eq!(
                round, *x,
                "[FAIL] criterion 7: not invertible (trial {trial})"
            );
        }
        // identity on a sort iff the entry is the identity
        for s in &sorts {
            let id = ModelElement::identity(&spec, s.clone());
            let fixed = apply_family(&fam, &id).unwrap() == id;
            assert_eq!(
                fixed,
                fam.get(s).unwrap().is_identity(),
                "[FAIL] criterion 7: identity-iff-trivial at {s} (trial {trial})"
            );
        }
        // restriction law: the restricted family acts identically
        let sub: Vec<SortId> = sorts.iter().take(sorts.len() / 2).cloned().collect();
        let restricted = fam.restrict(&sub);
        for s in &sub {
            let x = ModelElement::identity(&spec, s.clone());
            assert_eq!(
                apply_family(&restricted, &x).unwrap(),
                apply_family(&fam, &x).unwrap(),
                "[FAIL] criterion 7: restriction law (trial {trial})"
            );
        }
        // images of the identities reproduce the family
        let images: BTreeMap<SortId, ModelElement> = sorts
            .iter()
            .map(|s| {
                let e = ModelElement::identity(&spec, s.clone());
                (s.clone(), apply_family(&fam, &e).unwrap())
            })
            .collect();
        assert_eq!(
            family_from_images(&images).unwrap(),
            fam,
            "[FAIL] criterion 7: image round-trip (trial {trial})"
        );
    }
    // identity-iff-trivial also in the affirmative direction: a kernel
    // family has an identity entry below a non-identity entry
    let s_small = SortId::new([1]);
    let s_big = SortId::new([1, 3]);
    let a = GeneratorKey::new(
        [1, 3].into(),
        Ordinal::nat(2),
        [(1, Ordinal::zero()), (3, Ordinal::nat(1))].into(),
        [(1, 2), (3, 5)].into(),
    )
    .unwrap();
    let b = GeneratorKey::new(
        [1, 3].into(),
        Ordinal::nat(2),
        [(1, Ordinal::zero()), (3, Ordinal::nat(1))].into(),
        [(1, 2), (3, 6)].into(),
    )
    .unwrap();
    assert!(j_membership(&spec, &a).unwrap() && j_membership(&spec, &b).unwrap());
    let kernel_word = gmul(
        &GroupElement::generator_free(a.generator()),
        &ginv(&GroupElement::generator_free(b.generator())),
    )
    .unwrap();
    let kernel = Family::new(
        [
            (s_small.clone(), GroupElement::identity_free()),
            (s_big.clone(), kernel_word),
        ]
        .into(),
    );
    assert!(
        membership_c(&spec, &kernel).unwrap(),
        "[FAIL] criterion 7: kernel family must be coherent"
    );
    let id_small = ModelElement::identity(&spec, s_small.clone());
    let id_big = ModelElement::identity(&spec, s_big.clone());
    assert_eq!(apply_family(&kernel, &id_small).unwrap(), id_small);
    assert_ne!(apply_family(&kernel, &id_big).unwrap(), id_big);
    report(
        7,
        "family algebra",
        started,
        Duration::from_secs(60),
        "100 sampled families: atoms preserved, action invertible, identity iff trivial, \
         restriction and image laws exact"
            .to_string(),
    );
}

// ---------------------------------------------------------------------
// Criterion 8: finite-scale divergence and golden traces.

fn synthetic_candidates(spec: &ParameterSpec) -> Vec<ObstructionCandidate> {
    // 20 with closure points, then 5 without
    let mut rng = SimRng::new(0xEF5EED);
    let n = spec.n;
    let mut out = Vec::new();
    for i in 0..25 {
        let no_closure = i >= 20;
        let letters = 1 + rng.below(2) as usize;
        let mut ls = Vec::new();
        for _ in 0..letters {
            let steps = 1 + rng.below(3);
            let mut pieces = vec![(0u64, 0u64)];
            let mut pos = 0u64;
            let mut val = 0u64;
            for _ in 0..steps {
                pos += 1 + rng.below(4);
                val += 1;
                if pos < n {
                    pieces.push((pos, val));
                }
            }
            let h_limit = if no_closure {
                StepFunction::constant(n)
            } else {
                StepFunction::successor()
            };
            ls.push(ObstructionLetter {
                g_limit: StepFunction { pieces },
                h_limit,
                alpha_limit: Ordinal::nat(val + 1),
                sign: if rng.chance(1, 2) { 1 } else { -1 },
            });
        }
        out.push(ObstructionCandidate {
            u_star: BTreeSet::from([0]),
            letters: ls,
        });
    }
    out
}

#[test]
fn criterion_8_finite_scale_divergence() {
    let started = Instant::now();
    // the rigidity probe must SUCCEED at N = 6: the finite truncation
    // admits nontrivial coherent families
    let probe_spec = ParameterSpec::canonical(6, 5, Mode::Free, Variant::Uniform);
    let mut pool: Vec<SortId> = Vec::new();
    for a in 0..6u64 {
        pool.push(SortId::new([a]));
        for b in (a + 1)..6 {
            pool.push(SortId::new([a, b]));
        }
    }
    pool.push(SortId::new(0..6));
    let fam = nontrivial_family_probe(&probe_spec, &pool, 1).unwrap();
    let fam = fam.expect("[FAIL] criterion 8: probe found no family at N=6");
    assert!(!fam.is_identity());
    assert!(membership_c(&probe_spec, &fam).unwrap());

    // obstruction traces, against golden files
    let trace_spec = ParameterSpec::canonical(16, 8, Mode::Free, Variant::Uniform);
    let candidates = synthetic_candidates(&trace_spec);
    let golden_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var("UPDATE_GOLDEN").is_ok();
    let mut contradictions = 0;
    let mut no_closure = 0;
    for (i, cand) in candidates.iter().enumerate() {
        let verdict = obstruction_trace(&trace_spec, cand).unwrap();
        match &verdict {
            ObstructionVerdict::Contradiction(trace) => {
                contradictions += 1;
                // the chain is verified: every row splits the exceed
                // values, and the letter's own value closes the loop
                for letter in &trace.letters {
                    assert!(
                        !letter.rows.is_empty(),
                        "[FAIL] criterion 8: empty chain in trace {i}"
                    );
                    for row in &letter.rows {
                        assert!(row.h_witness <= trace.delta_star);
                        assert!(row.h_delta > trace.delta_star);
                        assert!(row.witness < trace.delta_star);
                    }
                    assert!(
                        letter.rows.iter().any(|r| r.value == letter.value_at_delta),
                        "[FAIL] criterion 8: trace {i} misses the self-row"
                    );
                }
            }
            ObstructionVerdict::NoClosurePoint { .. } => no_closure += 1,
        }
        let mut text = serde_json::to_string_pretty(&verdict).unwrap();
        text.push('\n');
        let path = golden_dir.join(format!("trace_{i:02}.json"));
        if update {
            std::fs::create_dir_all(&golden_dir).unwrap();
            std::fs::write(&path, &text).unwrap();
        } else {
            let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| {
                panic!(
                    "[FAIL] criterion 8: missing golden {} ({e})",
                    path.display()
                )
            });
            assert_eq!(
                text, golden,
                "[FAIL] criterion 8: trace {i} differs from its golden file"
            );
        }
    }
    assert!(
        contradictions >= 20,
        "[FAIL] criterion 8: {contradictions} contradictions"
    );
    assert!(
        no_closure >= 5,
        "[FAIL] criterion 8: {no_closure} no-closure outcomes"
    );
    report(
        8,
        "finite-scale divergence",
        started,
        Duration::from_secs(60),
        format!(
            "probe found a coherent nontrivial family over {} sorts at N=6; \
             {contradictions} contradiction traces and {no_closure} no-closure traces \
             match the golden files byte for byte",
            fam.entries.len()
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 9: ordinal laws.

#[test]
fn criterion_9_ordinal_laws() {
    let started = Instant::now();
    // all CNF forms with exponents ≤ 2 and coefficients ≤ 3
    let mut all = Vec::new();
    for c2 in 0..=3u64 {
        for c1 in 0..=3u64 {
            for c0 in 0..=3u64 {
                let mut terms = Vec::new();
                if c2 > 0 {
                    terms.push((2, c2));
                }
                if c1 > 0 {
                    terms.push((1, c1));
                }
                if c0 > 0 {
                    terms.push((0, c0));
                }
                all.push(Ordinal::from_terms(terms).unwrap());
            }
        }
    }
    use std::cmp::Ordering;
    for a in &all {
        assert_eq!(a.compare(a), Ordering::Equal);
        for b in &all {
            let ab = a.compare(b);
            assert_eq!(
                ab,
                b.compare(a).reverse(),
                "[FAIL] criterion 9: antisymmetry"
            );
            if ab == Ordering::Equal {
                assert_eq!(a, b);
            }
            for c in &all {
                if ab != Ordering::Greater && b.compare(c) != Ordering::Greater {
                    assert_ne!(
                        a.compare(c),
                        Ordering::Greater,
                        "[FAIL] criterion 9: transitivity"
                    );
                }
                // associativity of addition
                let left = a.add(b).unwrap().add(c).unwrap();
                let right = a.add(&b.add(c).unwrap()).unwrap();
                assert_eq!(left, right, "[FAIL] criterion 9: associativity");
            }
            // right-monotonicity, strict
            if ab == Ordering::Less {
                for c in all.iter().take(8) {
                    assert_eq!(
                        c.add(a).unwrap().compare(&c.add(b).unwrap()),
                        Ordering::Less,
                        "[FAIL] criterion 9: right-monotonicity"
                    );
                }
            }
            // a + b ≥ b
            assert_ne!(a.add(b).unwrap().compare(b), Ordering::Less);
        }
    }
    report(
        9,
        "ordinal laws",
        started,
        Duration::from_secs(10),
        format!(
            "{} forms: total order, associativity, strict right-monotonicity",
            all.len()
        ),
    );
}
