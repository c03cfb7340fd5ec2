//! Reproduction of the existence table: solver soundness per supported
//! case and exhaustive non-existence checks for the two named instances.

use std::collections::BTreeMap;
use std::fmt;

use cefai_core::cefai::parse_range;
use cefai_core::{
    ce_exists, counterexample_4x4, counterexample_5x2, format_rational, solve, stratified_incomes,
    verify_ce, CEPair, Error, GridSampler, IncomeVector, NamedInstance, PreferenceOrder,
    SolveTranscript,
};
use rand::Rng;

use crate::error::CliResult;
use crate::sweep::{generic_incomes, parallel_map, random_profile, trial_rng};

/// Trials for one supported `(m, n)`; `None` strata draw generic incomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessSpec {
    pub m: usize,
    pub n: usize,
    pub strata: Vec<(Option<String>, usize)>,
    /// Solved instances whose existence is also checked by the oracle.
    pub oracle_checks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleSpec {
    pub instance: NamedInstance,
    pub samples: usize,
    /// Random completions on top of the canonical one.
    pub alternatives: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproConfig {
    pub seed: u64,
    pub jobs: usize,
    pub soundness: Vec<SoundnessSpec>,
    pub counterexamples: Vec<CounterexampleSpec>,
}

fn plain(m: usize, n: usize, count: usize) -> SoundnessSpec {
    SoundnessSpec {
        m,
        n,
        strata: vec![(None, count)],
        oracle_checks: 0,
    }
}

fn stratified(
    m: usize,
    n: usize,
    ranges: usize,
    per_range: usize,
    oracle_checks: usize,
) -> SoundnessSpec {
    SoundnessSpec {
        m,
        n,
        strata: (1..=ranges)
            .map(|k| (Some(format!("Range{k}")), per_range))
            .collect(),
        oracle_checks,
    }
}

impl ReproConfig {
    pub fn full(seed: u64, jobs: usize) -> Self {
        Self::scaled(seed, jobs, 1)
    }

    /// A small run for smoke tests.
    pub fn quick(seed: u64, jobs: usize) -> Self {
        Self::scaled(seed, jobs, 10)
    }

    fn scaled(seed: u64, jobs: usize, divisor: usize) -> Self {
        let c = |k: usize| (k / divisor).max(1);
        let mut soundness = Vec::new();
        for m in 1..=2 {
            for n in 2..=4 {
                soundness.push(plain(m, n, c(100)));
            }
        }
        for n in 2..=4 {
            soundness.push(plain(3, n, c(500)));
        }
        soundness.push(stratified(4, 2, 2, c(250), c(100)));
        soundness.push(stratified(4, 3, 7, c(100), 0));
        let alternatives = if divisor == 1 { 5 } else { 1 };
        ReproConfig {
            seed,
            jobs,
            soundness,
            counterexamples: vec![
                CounterexampleSpec {
                    instance: counterexample_4x4(),
                    samples: c(100),
                    alternatives,
                },
                CounterexampleSpec {
                    instance: counterexample_5x2(),
                    samples: c(50),
                    alternatives,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveRecord {
    pub stratum: Option<String>,
    pub profile_seeds: Vec<u64>,
    pub profile: Vec<PreferenceOrder>,
    pub incomes: IncomeVector,
    pub result: Result<(CEPair, SolveTranscript), Error>,
    /// The solver's CE passed verification.
    pub verified: bool,
    /// Oracle witness, when the oracle was run.
    pub oracle: Option<Option<CEPair>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessGroup {
    pub m: usize,
    pub n: usize,
    pub records: Vec<SolveRecord>,
}

impl SoundnessGroup {
    pub fn verified(&self) -> usize {
        self.records.iter().filter(|r| r.verified).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SolveRecord> {
        self.records.iter().filter(|r| !r.verified)
    }

    /// Failures where the oracle found no CE at all.
    pub fn without_ce(&self) -> usize {
        self.failures().filter(|r| r.oracle == Some(None)).count()
    }

    /// Solved instances whose existence the oracle confirmed.
    pub fn oracle_confirmed(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.verified && matches!(r.oracle, Some(Some(_))))
            .count()
    }

    pub fn stratum_hits(&self) -> BTreeMap<String, usize> {
        let mut hits = BTreeMap::new();
        for r in &self.records {
            let label = match (&r.stratum, &r.result) {
                (Some(s), _) => parse_range(self.m, self.n, s).map(|r| r.to_string()).ok(),
                (None, Ok((_, tr))) => Some(tr.range.to_string()),
                (None, Err(_)) => None,
            };
            *hits
                .entry(label.unwrap_or_else(|| "unknown".into()))
                .or_default() += 1;
        }
        hits
    }

    pub fn verdict(&self) -> Verdict {
        if self.failures().next().is_none() {
            Verdict::Yes
        } else if self.without_ce() > 0 {
            Verdict::No
        } else {
            Verdict::Unresolved
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleGroup {
    pub label: String,
    pub m: usize,
    pub n: usize,
    pub profiles: usize,
    pub points: usize,
    pub checks: usize,
    /// Completions breaking an asserted relation.
    pub relation_violations: usize,
    /// `(completion index, incomes, witness)` where a CE was found.
    pub witnesses: Vec<(usize, IncomeVector, CEPair)>,
}

impl CounterexampleGroup {
    pub fn allocations_per_point(&self) -> usize {
        self.n.pow(self.m as u32)
    }

    pub fn verdict(&self) -> Verdict {
        if self.witnesses.is_empty() && self.relation_violations == 0 {
            Verdict::No
        } else {
            Verdict::Unresolved
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// Neither a proof of existence nor a point without a CE.
    Unresolved,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::Unresolved => "?",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCell {
    pub agents: &'static str,
    pub items: &'static str,
    pub claimed: &'static str,
    /// `None` when no run backs this cell.
    pub observed: Option<String>,
}

impl TableCell {
    pub fn agrees(&self) -> bool {
        self.observed.as_deref().is_none_or(|o| o == self.claimed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproReport {
    pub soundness: Vec<SoundnessGroup>,
    pub counterexamples: Vec<CounterexampleGroup>,
    pub table: Vec<TableCell>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.table.iter().all(TableCell::agrees)
    }

    pub fn group(&self, m: usize, n: usize) -> Option<&SoundnessGroup> {
        self.soundness.iter().find(|g| g.m == m && g.n == n)
    }

    pub fn counterexample(&self, label: &str) -> Option<&CounterexampleGroup> {
        self.counterexamples.iter().find(|g| g.label == label)
    }
}

fn run_soundness(spec: &SoundnessSpec, seed: u64, jobs: usize) -> CliResult<SoundnessGroup> {
    let (m, n) = (spec.m, spec.n);
    let plan: Vec<Option<String>> = spec
        .strata
        .iter()
        .flat_map(|(s, k)| std::iter::repeat_n(s.clone(), *k))
        .collect();
    let base = seed ^ ((m as u64) << 40) ^ ((n as u64) << 32);
    let records = parallel_map(jobs, plan.len(), |k| -> CliResult<SolveRecord> {
        let mut rng = trial_rng(base, k as u64);
        let income_seed: u64 = rng.gen();
        let (profile_seeds, profile) = random_profile(&mut rng, m, n);
        let incomes = match &plan[k] {
            Some(label) => stratified_incomes(m, n, label, income_seed, 1)?.remove(0),
            None => generic_incomes(m, n, income_seed)?,
        };
        let result = solve(&profile, &incomes);
        let verified = match &result {
            Ok((ce, _)) => verify_ce(&profile, &incomes, ce)?.valid(),
            Err(_) => false,
        };
        let oracle = if !verified || k < spec.oracle_checks {
            Some(ce_exists(&profile, &incomes)?)
        } else {
            None
        };
        Ok(SolveRecord {
            stratum: plan[k].clone(),
            profile_seeds,
            profile,
            incomes,
            result,
            verified,
            oracle,
        })
    });
    Ok(SoundnessGroup {
        m,
        n,
        records: records.into_iter().collect::<CliResult<_>>()?,
    })
}

fn run_counterexample(
    spec: &CounterexampleSpec,
    seed: u64,
    jobs: usize,
) -> CliResult<CounterexampleGroup> {
    let inst = &spec.instance;
    let mut profiles = vec![inst.profile()?];
    for k in 1..=spec.alternatives {
        profiles.push(inst.random_profile(seed.wrapping_add(k as u64))?);
    }
    let relation_violations = profiles
        .iter()
        .filter(|p| inst.violation(p).is_some())
        .count();
    let mut points = vec![inst.reference.clone()];
    points.extend(GridSampler::default().sample(&inst.region, seed, spec.samples)?);
    let total = profiles.len() * points.len();
    let found = parallel_map(
        jobs,
        total,
        |k| -> CliResult<Option<(usize, IncomeVector, CEPair)>> {
            let (c, p) = (k / points.len(), k % points.len());
            Ok(ce_exists(&profiles[c], &points[p])?.map(|ce| (c, points[p].clone(), ce)))
        },
    );
    let witnesses = found
        .into_iter()
        .filter_map(|r| r.transpose())
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CounterexampleGroup {
        label: inst.label.clone(),
        m: inst.m(),
        n: inst.n(),
        profiles: profiles.len(),
        points: points.len(),
        checks: total,
        relation_violations,
        witnesses,
    })
}

fn combine(vs: impl IntoIterator<Item = Verdict>) -> Option<Verdict> {
    vs.into_iter().fold(None, |acc, v| {
        Some(match (acc, v) {
            (None, v) => v,
            (Some(Verdict::No), _) | (_, Verdict::No) => Verdict::No,
            (Some(Verdict::Unresolved), _) | (_, Verdict::Unresolved) => Verdict::Unresolved,
            _ => Verdict::Yes,
        })
    })
}

fn build_table(
    soundness: &[SoundnessGroup],
    counterexamples: &[CounterexampleGroup],
) -> Vec<TableCell> {
    let solver = |items: &[usize], n: usize| {
        combine(
            soundness
                .iter()
                .filter(|g| items.contains(&g.m) && g.n == n)
                .map(SoundnessGroup::verdict),
        )
    };
    let named = |m: usize, n: usize| {
        combine(
            counterexamples
                .iter()
                .filter(|g| g.m == m && g.n == n)
                .map(CounterexampleGroup::verdict),
        )
    };
    let cell = |agents, items, claimed: &'static str, observed: Option<Verdict>| {
        let star = if claimed.ends_with('*') { "*" } else { "" };
        TableCell {
            agents,
            items,
            claimed,
            observed: observed.map(|v| format!("{v}{star}")),
        }
    };
    vec![
        cell("2", "1,2,3", "Yes", solver(&[1, 2, 3], 2)),
        cell("2", "4", "Yes", solver(&[4], 2)),
        cell("2", "5+", "No", named(5, 2)),
        cell("3", "1,2,3", "Yes", solver(&[1, 2, 3], 3)),
        cell("3", "4", "Yes*", solver(&[4], 3)),
        cell("3", "5+", "No", named(5, 3)),
        cell("4+", "1,2,3", "Yes", solver(&[1, 2, 3], 4)),
        cell("4+", "4", "No*", named(4, 4)),
        cell("4+", "5+", "No", named(5, 4)),
    ]
}

pub fn run_repro(config: &ReproConfig) -> CliResult<ReproReport> {
    let soundness = config
        .soundness
        .iter()
        .map(|s| run_soundness(s, config.seed, config.jobs))
        .collect::<CliResult<Vec<_>>>()?;
    let counterexamples = config
        .counterexamples
        .iter()
        .map(|s| run_counterexample(s, config.seed, config.jobs))
        .collect::<CliResult<Vec<_>>>()?;
    let table = build_table(&soundness, &counterexamples);
    Ok(ReproReport {
        soundness,
        counterexamples,
        table,
    })
}

fn incomes_text(t: &IncomeVector) -> String {
    let parts: Vec<String> = t.as_slice().iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

impl fmt::Display for ReproReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Existence of a CE for almost all incomes (observed; claimed in brackets where different)")?;
        writeln!(f)?;
        writeln!(
            f,
            "{:<12}| {:<16}| {:<16}| {:<16}",
            "Items:", "1,2,3", "4", "5+"
        )?;
        for agents in ["2", "3", "4+"] {
            write!(f, "{:<12}", format!("{agents} agents"))?;
            for items in ["1,2,3", "4", "5+"] {
                let c = self
                    .table
                    .iter()
                    .find(|c| c.agents == agents && c.items == items)
                    .expect("full table");
                let text = match &c.observed {
                    None => format!("n/c [{}]", c.claimed),
                    Some(o) if o == c.claimed => o.clone(),
                    Some(o) => format!("{o} [{}]", c.claimed),
                };
                write!(f, "| {text:<16}")?;
            }
            writeln!(f)?;
        }
        writeln!(f)?;
        for g in &self.soundness {
            write!(
                f,
                "m={} n={}: {}/{} solver CEs verified",
                g.m,
                g.n,
                g.verified(),
                g.records.len()
            )?;
            let checked = g
                .records
                .iter()
                .filter(|r| r.verified && r.oracle.is_some())
                .count();
            if checked > 0 {
                write!(f, "; oracle confirmed {}/{checked}", g.oracle_confirmed())?;
            }
            let failed = g.records.len() - g.verified();
            if failed > 0 {
                write!(
                    f,
                    "; {failed} failed, {} of them with no CE at all",
                    g.without_ce()
                )?;
            }
            writeln!(f)?;
            for r in g.failures().take(5) {
                let why = match &r.result {
                    Err(e) => e.to_string(),
                    Ok(_) => "verification failed".into(),
                };
                writeln!(
                    f,
                    "    {} incomes {} seeds {:?}: {why}; CE exists: {}",
                    r.stratum.as_deref().unwrap_or("-"),
                    incomes_text(&r.incomes),
                    r.profile_seeds,
                    match &r.oracle {
                        Some(Some(_)) => "yes",
                        Some(None) => "no",
                        None => "unchecked",
                    }
                )?;
            }
        }
        for g in &self.counterexamples {
            writeln!(
                f,
                "{}: {} points x {} completions, {} allocations each; CE found at {}",
                g.label,
                g.points,
                g.profiles,
                g.allocations_per_point(),
                g.witnesses.len()
            )?;
        }
        writeln!(f)?;
        write!(
            f,
            "table {}",
            if self.passed() { "matches" } else { "DIFFERS" }
        )
    }
}
