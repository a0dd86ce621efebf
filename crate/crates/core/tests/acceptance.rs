//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use common::{gamma_defect_within, gamma_ref, r, reference};
use equitower::axioms::{check_all, Axiom, AxiomConfig};
use equitower::formula::{parse_formula, print_formula, BMode, TruncationParams};
use equitower::io::{to_json, SpaceConfig};
use equitower::oracles::{oracle, oracle_between, oracle_gamma};
use equitower::sample::{sample_rng, Sampler, SamplerKind};
use equitower::verify::{check_instance, verify_layer, VerifyConfig};
use equitower::vogt::{
    check_preservation, run_vogt_experiment, Classification, MapSpec, VogtConfig,
};
use equitower::{Backend, NormSpec, Point, RelationId, RelationKind, Space};

/// Float comparisons use this mixed absolute/relative tolerance.
const FLOAT_TOLERANCE: f64 = 1e-9;
const ORACLE_RUNTIME_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_SAMPLES: usize = 10_000;
/// Truncated GAMMA at this K must keep the defect within 2^-(K-1)·d(a,b).
const GAMMA_K: u32 = 6;
const GAMMA_EXACT_K_MAX: u32 = 10;
const GAMMA_EXACT_TRIPLES: usize = 1_000;
const DISCRIMINATION_SAMPLES: usize = 10_000;
const REPAIRED_B_SAMPLES: usize = 10_000;
const LAYER_SAMPLES: usize = 1_000;
const AXIOM_SAMPLES: usize = 100_000;
const AXIOM_CONSTRUCTIONS: usize = 1_000;
const VOGT_SAMPLES: usize = 10_000;
const VOGT_WITNESS_BUDGET: usize = 1_000;
const ROUND_TRIP_FORMULAS: usize = 1_000;
const SEED: u64 = 20_240_601;

fn norms() -> [NormSpec; 3] {
    [NormSpec::L1, NormSpec::L2, NormSpec::Linf]
}

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn oracle_ground_truth() -> Verdict {
    let start = Instant::now();
    let ids = common::oracle_ids();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for norm in norms() {
        let space = Space::exact(norm.clone());
        let default = Sampler::new(&space, SamplerKind::Default, TruncationParams::default());
        let collinear = Sampler::new(
            &space,
            SamplerKind::CollinearBiased,
            TruncationParams::default(),
        );
        for kind in RelationKind::ALL {
            let family: Vec<RelationId> =
                ids.iter().copied().filter(|id| id.kind() == kind).collect();
            for i in 0..ORACLE_SAMPLES {
                let id = family[i % family.len()];
                let sampler = if i % 2 == 1 { &collinear } else { &default };
                let draw = sampler.draw(id, i, &mut sample_rng(SEED ^ kind as u64, i as u64));
                let refs: Vec<&Point> = draw.inputs.iter().collect();
                checked += 1;
                if oracle(&space, id, &refs).unwrap() != reference(&norm, id, &draw.inputs) {
                    mismatches.push(format!("{id} {} #{i}", space.label()));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        mismatches.is_empty() && elapsed < ORACLE_RUNTIME_LIMIT,
        format!(
            "{checked} instances, {} mismatches{}, {:.1}s (limit {}s)",
            mismatches.len(),
            mismatches
                .first()
                .map(|m| format!(" first {m}"))
                .unwrap_or_default(),
            elapsed.as_secs_f64(),
            ORACLE_RUNTIME_LIMIT.as_secs()
        ),
    )
}

/// Near-segment triple: `b = a + t(c − a) + δw` with `t` away from 0.
fn near_segment_triple<R: Rng>(space: &Space, rng: &mut R) -> [Point; 3] {
    let coord = |rng: &mut R| r(rng.random_range(-24..=24), rng.random_range(1..=4));
    loop {
        let a = space.point(coord(rng), coord(rng));
        let c = space.point(coord(rng), coord(rng));
        let j = [-3, -1, 1, 2, 3, 5, 8, 11, 13, 15, 17, 19][rng.random_range(0..12)];
        let base = equitower::affine_combination(&a, &c, &r(j, 16));
        let delta = if rng.random_bool(0.15) {
            r(0, 1)
        } else {
            r(
                if rng.random_bool(0.5) { 1 } else { -1 },
                1i64 << rng.random_range(2..=12),
            )
        };
        let w = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1)][rng.random_range(0..5)];
        let b = base.add(&space.point(&delta * r(w.0, 1), &delta * r(w.1, 1)));
        if !space.same_point(&a, &b) && !space.same_point(&b, &c) && !space.same_point(&a, &c) {
            return [a, b, c];
        }
    }
}

fn gamma_truncation_bound() -> Verdict {
    let eps = r(1, 1 << (GAMMA_K - 1));
    let mut bound_violations = 0;
    let mut accepted = 0;
    let mut accepted_inexact = 0;
    let mut exact_failures = 0;
    let mut exact_checked = 0;
    for norm in norms() {
        let space = Space::exact(norm.clone());
        let trunc = TruncationParams {
            k: GAMMA_K,
            adaptive_n: true,
            ..TruncationParams::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED + 2);
        for _ in 0..3_000 {
            let t = near_segment_triple(&space, &mut rng);
            let inst =
                check_instance(RelationId::Gamma, &space, &t, &trunc, BMode::Repaired).unwrap();
            if inst.formula {
                accepted += 1;
                accepted_inexact += !gamma_ref(&norm, &t[0], &t[1], &t[2]) as usize;
                if !gamma_defect_within(&norm, &t[0], &t[1], &t[2], &eps) {
                    bound_violations += 1;
                }
            }
        }

        let sampler = Sampler::new(&space, SamplerKind::Default, TruncationParams::default());
        let mut found = 0;
        let mut i = 0;
        while found < GAMMA_EXACT_TRIPLES {
            let draw = sampler.draw(RelationId::Gamma, i, &mut sample_rng(SEED + 3, i as u64));
            i += 1;
            let t = &draw.inputs;
            if !gamma_ref(&norm, &t[0], &t[1], &t[2]) {
                continue;
            }
            found += 1;
            for k in 1..=GAMMA_EXACT_K_MAX {
                let trunc = TruncationParams {
                    k,
                    adaptive_n: true,
                    ..TruncationParams::default()
                };
                exact_checked += 1;
                if !check_instance(RelationId::Gamma, &space, t, &trunc, BMode::Repaired)
                    .unwrap()
                    .formula
                {
                    exact_failures += 1;
                }
            }
        }
    }
    verdict(
        bound_violations == 0 && exact_failures == 0 && accepted_inexact > 0,
        format!(
            "K={GAMMA_K}: {accepted} accepted ({accepted_inexact} with nonzero defect), {bound_violations} beyond 2^-{}·d(a,b); \
             exact triples: {exact_failures} failures in {exact_checked} (K ≤ {GAMMA_EXACT_K_MAX})",
            GAMMA_K - 1
        ),
    )
}

fn strict_convexity_discrimination() -> Verdict {
    let l2 = Space::exact(NormSpec::L2);
    let sampler = Sampler::new(
        &l2,
        SamplerKind::CollinearBiased,
        TruncationParams::default(),
    );
    let (mut mismatches, mut positives, mut n) = (0, 0, 0);
    let mut i = 0;
    while n < DISCRIMINATION_SAMPLES {
        let draw = sampler.draw(RelationId::Gamma, i, &mut sample_rng(SEED + 4, i as u64));
        i += 1;
        let [a, b, c] = [&draw.inputs[0], &draw.inputs[1], &draw.inputs[2]];
        if l2.same_point(a, b) || l2.same_point(b, c) || l2.same_point(a, c) {
            continue;
        }
        n += 1;
        let g = oracle_gamma(&l2, a, b, c);
        positives += g as usize;
        mismatches += (g != oracle_between(&l2, a, b, c)) as usize;
    }
    let linf = Space::exact(NormSpec::Linf);
    let t = [Point::ints(0, 0), Point::ints(2, 1), Point::ints(4, 0)];
    let g = oracle_gamma(&linf, &t[0], &t[1], &t[2]);
    let b = oracle_between(&linf, &t[0], &t[1], &t[2]);
    let trunc = TruncationParams {
        b_depth: 1,
        ..TruncationParams::default()
    };
    let formula = check_instance(RelationId::Between, &linf, &t, &trunc, BMode::Repaired)
        .unwrap()
        .formula;
    verdict(
        mismatches == 0 && positives > 0 && g && !b && !formula,
        format!(
            "l2: {mismatches} mismatches in {n} triples ({positives} gamma-true); \
             linf (0,0),(2,1),(4,0): gamma {g}, B {b}, truncated B {formula}"
        ),
    )
}

fn dyadic_position(a: &Point, b: &Point, c: &Point, max_depth: u32) -> bool {
    (0..=1i64 << max_depth).any(|j| {
        common::same(
            &equitower::affine_combination(a, c, &r(j, 1 << max_depth)),
            b,
        )
    })
}

fn paper_gap_regression() -> Verdict {
    let l2 = Space::exact(NormSpec::L2);
    let t = [Point::ints(0, 0), Point::ints(2, 0), Point::ints(4, 0)];
    let trunc = TruncationParams::default();
    let strict = check_instance(RelationId::Between, &l2, &t, &trunc, BMode::Strict).unwrap();
    let mut disagreements = 0;
    let mut dyadic = 0;
    let mut positives = 0;
    for (sampler_kind, half) in [(SamplerKind::MidpointTriples, 0), (SamplerKind::Default, 1)] {
        let sampler = Sampler::new(&l2, sampler_kind, trunc);
        for i in 0..REPAIRED_B_SAMPLES / 2 {
            let idx = half * REPAIRED_B_SAMPLES + i;
            let draw = sampler.draw(
                RelationId::Between,
                idx,
                &mut sample_rng(SEED + 5, idx as u64),
            );
            let p = &draw.inputs;
            dyadic += dyadic_position(&p[0], &p[1], &p[2], trunc.b_depth) as usize;
            let inst =
                check_instance(RelationId::Between, &l2, p, &trunc, BMode::Repaired).unwrap();
            positives += inst.oracle as usize;
            disagreements += (inst.formula != inst.oracle) as usize;
        }
    }
    verdict(
        !strict.formula && strict.oracle && disagreements == 0 && dyadic > 0,
        format!(
            "strict B on (0,0),(2,0),(4,0): formula {}, oracle {}; repaired: {disagreements} disagreements in {REPAIRED_B_SAMPLES} \
             ({positives} true, {dyadic} with b on the dyadic grid)",
            strict.formula, strict.oracle
        ),
    )
}

fn layer_ids() -> Vec<(RelationId, u32)> {
    let mut v = vec![
        (RelationId::Equiv2, 3),
        (RelationId::Gamma, 3),
        (RelationId::Neq, 3),
        (RelationId::Le, 3),
    ];
    v.extend((1..=4).map(|k| (RelationId::Beta(k), 3)));
    v.extend((1..=6).map(|n| (RelationId::Alpha(n), 3)));
    for n in 1..=8 {
        for k in 1..=4 {
            v.push((RelationId::Psi(n, k), 3));
        }
    }
    v.extend((1..=8).map(|n| (RelationId::Delta(n), 3)));
    v.extend((1..=3).map(|d| (RelationId::Between, d)));
    v
}

fn layer_verification() -> Verdict {
    let mut failures = Vec::new();
    let (mut runs, mut fallbacks) = (0, 0);
    for norm in norms() {
        let space = Space::exact(norm);
        for (id, depth) in layer_ids() {
            let mut cfg = VerifyConfig::new(LAYER_SAMPLES, SEED + 6);
            cfg.trunc.b_depth = depth;
            cfg.mode = BMode::Repaired;
            let rep = verify_layer(id, &space, &cfg).unwrap();
            runs += 1;
            fallbacks += rep.float_fallbacks;
            if !rep.passed()
                || rep.positives == 0
                || rep.positives == rep.samples && id != RelationId::Neq
            {
                failures.push(format!(
                    "{id}(depth {depth}) {}: {} counterexamples, {} positives",
                    space.label(),
                    rep.counterexamples.len(),
                    rep.positives
                ));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{runs} layer runs of {LAYER_SAMPLES} samples, {fallbacks} float fallbacks (tolerance {FLOAT_TOLERANCE:e}), {} failing{}",
            failures.len(),
            failures.first().map(|f| format!(": {f}")).unwrap_or_default()
        ),
    )
}

fn axiom_suite() -> Verdict {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for norm in norms() {
        let space = Space::exact(norm);
        for ax in [
            Axiom::A,
            Axiom::B,
            Axiom::C,
            Axiom::D,
            Axiom::E,
            Axiom::F,
            Axiom::G,
            Axiom::H,
            Axiom::I,
        ] {
            let n = if ax.existential() {
                AXIOM_CONSTRUCTIONS
            } else {
                AXIOM_SAMPLES
            };
            let rep = check_all(&space, &AxiomConfig::new(n, SEED + 7), &[ax])
                .unwrap()
                .remove(0);
            let witnesses_ok = !ax.existential() || (rep.witnesses == n && rep.incomplete == 0);
            if !rep.pass || !witnesses_ok {
                problems.push(format!(
                    "({ax}) {}: {} violations, {} witnesses, {} incomplete",
                    space.label(),
                    rep.violations.len(),
                    rep.witnesses,
                    rep.incomplete
                ));
            }
            if ax == Axiom::I {
                summary.push(format!(
                    "{} archimedean witnesses {}",
                    space.label(),
                    rep.witnesses
                ));
            }
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "universal axioms at {AXIOM_SAMPLES}, existential at {AXIOM_CONSTRUCTIONS} per norm; {}; {} problems{}",
            summary.join(", "),
            problems.len(),
            problems.first().map(|p| format!(": {p}")).unwrap_or_default()
        ),
    )
}

/// Re-measures a reported `≡` violation from its coordinates.
fn witness_reverifies(norm: &NormSpec, w: &equitower::vogt::PreservationWitness) -> bool {
    let pts: Vec<Point> = w
        .points
        .iter()
        .map(|p| p.to_point(Backend::Exact).unwrap())
        .collect();
    let img: Vec<Point> = w
        .images
        .iter()
        .map(|p| p.to_point(Backend::Exact).unwrap())
        .collect();
    let before = common::dist(norm, &pts[0], &pts[1]) == common::dist(norm, &pts[2], &pts[3]);
    let after = common::dist(norm, &img[0], &img[1]) == common::dist(norm, &img[2], &img[3]);
    before != after
}

fn vogt_harness() -> Verdict {
    let mut similarity_maps = 0;
    let mut bad = Vec::new();
    for norm in norms() {
        let cfg = VogtConfig {
            seed: SEED + 8,
            quadruples: VOGT_SAMPLES,
            triples: VOGT_SAMPLES,
            spaces: vec![SpaceConfig::from_space(&Space::exact(norm))],
            suites: vec!["similarities".into()],
            maps: vec![],
        };
        let summary = run_vogt_experiment(&cfg).unwrap();
        for e in &summary.entries {
            similarity_maps += 1;
            let rep = &e.report;
            if rep.forward_violations + rep.backward_violations + rep.b_violations > 0
                || rep.congruent_before == 0
            {
                bad.push(format!("{} {}", rep.name, rep.norm));
            }
        }
    }
    let l2 = Space::exact(NormSpec::L2);
    let mut caught = Vec::new();
    for (name, map) in [
        ("shear", MapSpec::shear()),
        ("anisotropic", MapSpec::anisotropic()),
    ] {
        let rep = check_preservation(&l2, name, &map, VOGT_WITNESS_BUDGET, 0, SEED + 9).unwrap();
        let ok = rep.classification == Classification::Violating
            && rep
                .first_forward
                .as_ref()
                .is_some_and(|w| witness_reverifies(&NormSpec::L2, w));
        caught.push(format!("{name} {}", if ok { "caught" } else { "MISSED" }));
        if !ok {
            bad.push(name.to_string());
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{similarity_maps} similarities clean on {VOGT_SAMPLES} quadruples and triples; {} within {VOGT_WITNESS_BUDGET} l2 samples{}",
            caught.join(", "),
            bad.first().map(|b| format!("; first problem {b}")).unwrap_or_default()
        ),
    )
}

fn determinism_and_round_trip() -> Verdict {
    let linf = Space::exact(NormSpec::Linf);
    let layer = |seed| {
        to_json(&verify_layer(RelationId::Psi(3, 2), &linf, &VerifyConfig::new(300, seed)).unwrap())
            .unwrap()
    };
    let axioms = |seed| {
        let cfg = AxiomConfig::new(300, seed);
        to_json(&check_all(&Space::exact(NormSpec::L2), &cfg, &[Axiom::B, Axiom::I]).unwrap())
            .unwrap()
    };
    let vogt = |seed| {
        let cfg = VogtConfig {
            seed,
            quadruples: 300,
            triples: 300,
            spaces: vec![SpaceConfig::from_space(&Space::exact(NormSpec::L1))],
            suites: vec!["non-similarities".into()],
            maps: vec![],
        };
        to_json(&run_vogt_experiment(&cfg).unwrap()).unwrap()
    };
    let identical = layer(1) == layer(1) && axioms(1) == axioms(1) && vogt(1) == vogt(1);
    let sensitive = layer(1) != layer(2) && axioms(1) != axioms(2) && vogt(1) != vogt(2);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut broken = 0;
    for _ in 0..ROUND_TRIP_FORMULAS {
        let f = common::gen::formula(&mut rng, 4);
        let once = parse_formula(&print_formula(&f)).unwrap();
        let twice = parse_formula(&print_formula(&once)).unwrap();
        broken += (once != twice || once != f) as usize;
    }
    verdict(
        identical && sensitive && broken == 0,
        format!(
            "byte-identical reports for equal seeds: {identical}, distinct for distinct seeds: {sensitive}; \
             {broken} of {ROUND_TRIP_FORMULAS} formulas off the parse-print fixpoint"
        ),
    )
}

fn main() {
    assert_eq!(Space::float(NormSpec::L2).tolerance, FLOAT_TOLERANCE);
    let criteria: [Criterion; 8] = [
        ("oracle ground truth", oracle_ground_truth),
        ("gamma truncation bound", gamma_truncation_bound),
        (
            "strict-convexity discrimination",
            strict_convexity_discrimination,
        ),
        ("strict betweenness gap", paper_gap_regression),
        ("layer verification", layer_verification),
        ("axiom suite", axiom_suite),
        ("similarity harness", vogt_harness),
        ("determinism and round trip", determinism_and_round_trip),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        failed += !v.pass as usize;
        println!(
            "{} criterion {n} ({name}): {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
