//! End-to-end acceptance run: one PASS/FAIL line per criterion.

#[path = "../../core/tests/support/spe_bruteforce.rs"]
mod spe_bruteforce;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use cefai_cli::repro::{ReproReport, SoundnessGroup};
use cefai_cli::{run_repro, ReproConfig};
use cefai_core::cefai::{build_game, select_range};
use cefai_core::{
    audit_ce_fairness, classify_bundle, complete_partial, excluded_hyperplanes, int,
    is_dominated_by, is_generic, random_preference, rat, resolve_epsilon, solve, spe_outcomes,
    verify_ce, AffinePrice, Bundle, BundleClass, BundleClassification, CEPair, Error, GameNode,
    IncomeVector, ItemNames, PartialRelations, Pixep, PreferenceOrder, Rational,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spe_bruteforce::{brute_force_spe, random_game, Play};

const SEED: u64 = 0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn groups_1_to_3(report: &ReproReport) -> Vec<&SoundnessGroup> {
    [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3)]
        .iter()
        .filter_map(|&(m, n)| report.group(m, n))
        .collect()
}

fn three_items(report: &ReproReport) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=4 {
        let g = report.group(3, n).expect("group");
        ok &= g.records.len() == 500 && g.verified() == 500;
        parts.push(format!("n={n}: {}/{}", g.verified(), g.records.len()));
    }
    outcome(ok, format!("verified {}", parts.join(", ")))
}

fn four_items_two_agents(report: &ReproReport) -> Outcome {
    let g = report.group(4, 2).expect("group");
    let hits = g.stratum_hits();
    let each = ["Alg2-Range1", "Alg2-Range2"].map(|r| hits.get(r).copied().unwrap_or(0));
    let checked = g.records.iter().filter(|r| r.oracle.is_some()).count();
    let ok = g.records.len() == 500
        && g.verified() == 500
        && each.iter().all(|&h| h >= 100)
        && checked >= 100
        && g.oracle_confirmed() >= 100;
    outcome(
        ok,
        format!(
            "verified {}/{}; range hits {:?}; oracle confirmed {}/{checked}",
            g.verified(),
            g.records.len(),
            each,
            g.oracle_confirmed()
        ),
    )
}

fn four_items_three_agents(report: &ReproReport) -> Outcome {
    let g = report.group(4, 3).expect("group");
    let hits = g.stratum_hits();
    let each: Vec<usize> = (1..=7)
        .map(|k| hits.get(&format!("Alg3-Range{k}")).copied().unwrap_or(0))
        .collect();
    let no_spe = g
        .records
        .iter()
        .filter(|r| r.result.as_ref().err() == Some(&Error::NoValidSpe))
        .count();
    let mut failing_ranges: Vec<String> = g
        .failures()
        .filter_map(|r| r.stratum.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    failing_ranges.sort();
    let ok = g.records.len() == 700
        && g.verified() == 700
        && each.iter().all(|&h| h >= 50)
        && no_spe == 0;
    let mut detail = format!(
        "verified {}/{}; range hits {:?}; NoValidSpe {no_spe}",
        g.verified(),
        g.records.len(),
        each
    );
    if no_spe > 0 {
        detail.push_str(&format!(
            " (in {}); the oracle finds no CE at any price for {} of them and a CE no SPE reaches for {}",
            failing_ranges.join(", "),
            g.without_ce(),
            no_spe - g.without_ce()
        ));
    }
    outcome(ok, detail)
}

fn counterexample(
    report: &ReproReport,
    label: &str,
    samples: usize,
    allocations: usize,
) -> Outcome {
    let g = report.counterexample(label).expect("group");
    let ok = g.points == samples + 1
        && g.profiles == 6
        && g.allocations_per_point() == allocations
        && g.relation_violations == 0
        && g.witnesses.is_empty();
    outcome(
        ok,
        format!(
            "{} points (reference + {samples} sampled) x {} completions, {} allocations each; CE found at {}; relation violations {}",
            g.points,
            g.profiles,
            g.allocations_per_point(),
            g.witnesses.len(),
            g.relation_violations
        ),
    )
}

fn spe_fidelity() -> Outcome {
    let names = ItemNames::new(["x", "y", "z"]);
    let cls = |s: &str| BundleClass::parse(&names, s).unwrap();
    let mut alice = PartialRelations::new(3);
    alice.chain(&[cls("yz"), cls("xz")]);
    let mut bob = PartialRelations::new(3);
    bob.chain(&[cls("x"), cls("y"), cls("z")]);
    let profile = vec![
        complete_partial(&alice).unwrap(),
        complete_partial(&bob).unwrap(),
    ];
    let fixed = |v| AffinePrice::fixed(int(v));
    let game = GameNode::Leaf(Pixep::from_pairs(
        "ABA",
        vec![(0, fixed(4)), (1, fixed(2)), (0, fixed(1))],
    ));
    let outs = spe_outcomes(&game, &profile);
    let yz_x = outs
        .iter()
        .all(|e| e.allocation.bundles() == [names.parse("yz").unwrap(), names.parse("x").unwrap()]);
    let firsts: BTreeSet<usize> = outs.iter().map(|e| e.picks[0].item).collect();
    let worked = yz_x && firsts == BTreeSet::from([1, 2]);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut agree = 0;
    let total = 200;
    for case in 0..total {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=3);
        let game = random_game(&mut rng, m, n);
        let profile: Vec<PreferenceOrder> = (0..n)
            .map(|i| random_preference(m, (case * 3 + i) as u64).unwrap())
            .collect();
        let engine: Vec<Play> = spe_outcomes(&game, &profile)
            .iter()
            .map(|e| (e.path.clone(), e.picks.iter().map(|p| p.item).collect()))
            .collect();
        let unique: BTreeSet<Play> = engine.iter().cloned().collect();
        if unique.len() == engine.len() && unique == brute_force_spe(&game, &profile) {
            agree += 1;
        }
    }
    outcome(
        worked && agree == total,
        format!(
            "worked example allocation (yz, x) {}, first picks {{y, z}} {}; random games agreeing with brute force {agree}/{total}",
            if yz_x { "ok" } else { "wrong" },
            if firsts == BTreeSet::from([1, 2]) { "ok" } else { "wrong" }
        ),
    )
}

fn domination() -> Outcome {
    let pos = [1, 2, 3, 4];
    let b = |ps: &[usize]| Bundle::from_items(ps.iter().map(|p| p - 1));
    let examples = is_dominated_by(b(&[1, 4]), b(&[1, 2]), &pos)
        && is_dominated_by(b(&[3, 4]), b(&[1, 4]), &pos)
        && !is_dominated_by(b(&[1, 4]), b(&[2, 3, 4]), &pos)
        && !is_dominated_by(b(&[2, 3, 4]), b(&[1, 4]), &pos)
        && classify_bundle(&pos, b(&[1, 4]), b(&[1, 3, 4])) == BundleClassification::Dominating
        && classify_bundle(&pos, b(&[1, 4]), b(&[1])) == BundleClassification::Dominated
        && classify_bundle(&pos, b(&[1, 4]), b(&[2, 3, 4])) == BundleClassification::Unrelated;
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 1..=5 {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, k);
                    q
                })
            })
            .collect();
    }
    let mut pairs = 0usize;
    let mut both = 0usize;
    for p in &perms {
        for x in Bundle::all(5) {
            for y in Bundle::all(5) {
                if x != y {
                    pairs += 1;
                    if is_dominated_by(x, y, p) && is_dominated_by(y, x, p) {
                        both += 1;
                    }
                }
            }
        }
    }
    outcome(
        examples && both == 0,
        format!(
            "positional examples {}; {pairs} ordered pairs over {} sequences, {both} mutual dominations",
            if examples { "ok" } else { "wrong" },
            perms.len()
        ),
    )
}

fn sorted(t: &IncomeVector) -> Vec<Rational> {
    let mut v = t.as_slice().to_vec();
    v.sort_unstable_by(|x, y| y.cmp(x));
    v
}

fn lemmas(report: &ReproReport) -> Outcome {
    let mut executions = 0usize;
    let mut violations = Vec::new();
    for g in groups_1_to_3(report) {
        for r in &g.records {
            let game = match &r.result {
                Ok((_, tr)) => tr.game.clone(),
                Err(_) => {
                    let range = select_range(g.m, &r.incomes).unwrap();
                    build_game(
                        range,
                        g.m,
                        &r.incomes.descending_order(),
                        &sorted(&r.incomes),
                    )
                    .unwrap()
                }
            };
            for e in spe_outcomes(&game, &r.profile) {
                executions += 1;
                let eps = resolve_epsilon(&e.leaf, &r.incomes).unwrap();
                let prices = e.prices_at(&eps).unwrap();
                let pos = e.positions();
                for (i, pref) in r.profile.iter().enumerate() {
                    let own = e.allocation.bundle(i);
                    let contiguous = e.leaf.is_contiguous(i);
                    for d in Bundle::all(g.m) {
                        let bad = match classify_bundle(&pos, own, d) {
                            BundleClassification::Dominating => prices.of(d) <= *r.incomes.get(i),
                            BundleClassification::Dominated => contiguous && !pref.prefers(own, d),
                            BundleClassification::Unrelated => false,
                        };
                        if bad {
                            violations.push((g.m, g.n, i, d));
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations.is_empty() && executions > 0,
        format!(
            "{executions} executions checked; {} violations",
            violations.len()
        ),
    )
}

fn fairness(report: &ReproReport) -> Outcome {
    let mut ces = 0usize;
    let mut applicable = 0usize;
    let mut violated = 0usize;
    let mut audit = |profile: &[PreferenceOrder], t: &IncomeVector, ce: &CEPair| {
        let a = audit_ce_fairness(profile, t, ce, 4);
        ces += 1;
        applicable += a.applicable.len();
        violated += a.violations().count();
    };
    for g in groups_1_to_3(report) {
        for r in &g.records {
            if let Ok((ce, _)) = &r.result {
                if r.verified {
                    audit(&r.profile, &r.incomes, ce);
                }
            }
            if g.m == 4 && g.n == 2 {
                if let Some(Some(w)) = &r.oracle {
                    audit(&r.profile, &r.incomes, w);
                }
            }
        }
    }
    outcome(
        violated == 0,
        format!("{ces} CEs audited with d_max = 4; {applicable} applicable guarantees, {violated} violated"),
    )
}

/// A strictly decreasing point on `h` that every other excluded hyperplane
/// misses by a wide margin, with the coordinate used to leave `h`.
fn point_on(
    h: &cefai_core::Hyperplane,
    others: &[cefai_core::Hyperplane],
    rng: &mut ChaCha8Rng,
) -> (Vec<Rational>, usize) {
    let n = h.coeffs.len();
    let margin = rat(1, 10_000);
    loop {
        let mut x: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=1000), 1000)).collect();
        x.sort_unstable_by(|a, b| b.cmp(a));
        let pivots: Vec<usize> = (0..n).filter(|&k| h.coeffs[k] != 0).collect();
        let k = *pivots.choose(rng).unwrap();
        let rest: Rational = (0..n)
            .filter(|&j| j != k)
            .map(|j| int(h.coeffs[j]) * &x[j])
            .sum();
        x[k] = -rest / int(h.coeffs[k]);
        if x[k] <= int(0) {
            continue;
        }
        let wide = others.iter().all(|o| {
            let v = o.evaluate(&x);
            v > margin || v < -margin.clone()
        });
        let mut s = x.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        if wide && s == x {
            return (x, k);
        }
    }
}

fn boundaries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let delta = rat(1, 1_000_000);
    let mut planes = 0usize;
    let mut rejected = 0usize;
    let mut accepted = 0usize;
    let mut solved = 0usize;
    let mut attempts = 0usize;
    let mut failures = Vec::new();
    let mut cases: Vec<(usize, usize)> =
        (1..=3).flat_map(|m| (1..=4).map(move |n| (m, n))).collect();
    cases.extend([(4, 1), (4, 2), (4, 3)]);
    for (m, n) in cases {
        let hs = excluded_hyperplanes(m, n).unwrap();
        for (idx, h) in hs.iter().enumerate() {
            planes += 1;
            let others: Vec<_> = hs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != idx)
                .map(|(_, o)| o.clone())
                .collect();
            let (x, k) = point_on(h, &others, &mut rng);
            let on = IncomeVector::new(x.clone()).unwrap();
            if !is_generic(&on, m).unwrap() {
                rejected += 1;
            }
            for sign in [1, -1] {
                let mut y = x.clone();
                y[k] += &delta * int(sign);
                let off = IncomeVector::new(y).unwrap();
                if !is_generic(&off, m).unwrap() {
                    continue;
                }
                accepted += 1;
                for s in 0..3u64 {
                    attempts += 1;
                    let profile: Vec<PreferenceOrder> = (0..n)
                        .map(|i| random_preference(m, s * 10 + i as u64).unwrap())
                        .collect();
                    match solve(&profile, &off) {
                        Ok((ce, _)) if verify_ce(&profile, &off, &ce).unwrap().valid() => {
                            solved += 1
                        }
                        Ok(_) => failures.push(format!("m={m} n={n} {h}: invalid CE")),
                        Err(e) => failures.push(format!(
                            "m={m} n={n} near {h} ({}): {e}",
                            select_range(m, &off)
                                .map(|r| r.to_string())
                                .unwrap_or_default()
                        )),
                    }
                }
            }
        }
    }
    let ok = rejected == planes && accepted == 2 * planes && solved == attempts;
    let mut detail = format!(
        "{planes} hyperplanes: on-plane rejected {rejected}/{planes}, perturbed accepted {accepted}/{}, solved {solved}/{attempts}",
        2 * planes
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join("; ")));
    }
    outcome(ok, detail)
}

fn table(report: &ReproReport) -> Outcome {
    let cells: Vec<String> = report
        .table
        .iter()
        .filter(|c| c.observed.is_some())
        .map(|c| {
            format!(
                "({} items, {} agents) {}{}",
                c.items,
                c.agents,
                c.observed.as_deref().unwrap(),
                if c.agrees() {
                    String::new()
                } else {
                    format!(" vs claimed {}", c.claimed)
                }
            )
        })
        .collect();
    outcome(report.passed(), cells.join(", "))
}

fn main() -> ExitCode {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let started = Instant::now();
    let report = run_repro(&ReproConfig::full(SEED, jobs)).expect("reproduction runs");
    let repro_secs = started.elapsed().as_secs_f64();
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id, name, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((id, name, o, t.elapsed().as_secs_f64()));
    };
    timed(1, "three items, any number of agents", &|| {
        three_items(&report)
    });
    timed(2, "four items, two agents", &|| {
        four_items_two_agents(&report)
    });
    timed(3, "four items, three agents", &|| {
        four_items_three_agents(&report)
    });
    timed(4, "no CE: four items, four agents", &|| {
        counterexample(&report, "four-items-four-agents", 100, 256)
    });
    timed(5, "no CE: five items, two agents", &|| {
        counterexample(&report, "five-items-two-agents", 50, 32)
    });
    timed(6, "SPE engine fidelity", &spe_fidelity);
    timed(7, "domination relation", &domination);
    timed(8, "dominating and dominated bundle lemmas", &|| {
        lemmas(&report)
    });
    timed(9, "maximin guarantees of every CE", &|| fairness(&report));
    timed(10, "genericity boundaries", &boundaries);
    timed(11, "existence table", &|| table(&report));

    println!("{report}");
    println!();
    println!("shared solver and oracle runs: {repro_secs:.1}s");
    let mut all = true;
    for (id, name, o, secs) in &results {
        all &= o.passed;
        println!(
            "{} criterion {id:>2} ({name}): {} [{secs:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
