//! Income-space sweeps with the existence oracle.

use cefai_core::cefai::algorithm_for;
use cefai_core::{
    ce_exists, format_rational, is_generic, random_preference, GridSampler, IncomeVector,
    NamedInstance, PreferenceOrder,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MAX_SWEEP_ITEMS: usize = 5;
pub const MAX_SWEEP_AGENTS: usize = 4;

/// Independent generator for trial `k` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// `f(0..count)` on `jobs` threads; the result order is the index order.
pub fn parallel_map<T, F>(jobs: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

/// Random profile from per-agent seeds drawn from `rng`.
pub fn random_profile(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
) -> (Vec<u64>, Vec<PreferenceOrder>) {
    let seeds: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
    let profile = seeds
        .iter()
        .map(|&s| random_preference(m, s).expect("valid item count"))
        .collect();
    (seeds, profile)
}

/// Grid incomes, generic for `m` items when `(m, n)` is a supported case.
pub fn generic_incomes(m: usize, n: usize, seed: u64) -> CliResult<IncomeVector> {
    let supported = algorithm_for(m, n).is_ok();
    let mut v = GridSampler::default().sample_with(n, seed, 1, |p| {
        !supported
            || is_generic(&IncomeVector::new(p.to_vec()).expect("positive"), m).unwrap_or(false)
    })?;
    Ok(v.remove(0))
}

#[derive(Debug, Clone)]
pub enum Source {
    /// Random monotone profiles with generic grid incomes.
    Random { m: usize, n: usize },
    /// Fixed completion of a named instance, incomes sampled in its region.
    Named(NamedInstance),
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Random { .. } => "random".into(),
            Source::Named(i) => i.label.clone(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            Source::Random { m, n } => (*m, *n),
            Source::Named(i) => (i.m(), i.n()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoCePoint {
    pub trial: usize,
    pub incomes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub source: String,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub ce_found: usize,
    /// `found/trials`.
    pub existence_rate: String,
    pub no_ce: Vec<NoCePoint>,
}

fn incomes_text(t: &IncomeVector) -> Vec<String> {
    t.as_slice().iter().map(format_rational).collect()
}

pub fn cmd_sweep(
    source: &Source,
    trials: usize,
    seed: u64,
    jobs: usize,
) -> CliResult<SweepDocument> {
    let (m, n) = source.dims();
    if m == 0 || n == 0 || m > MAX_SWEEP_ITEMS || n > MAX_SWEEP_AGENTS {
        return Err(CliError::Usage(format!(
            "sweep supports 1..={MAX_SWEEP_ITEMS} items and 1..={MAX_SWEEP_AGENTS} agents, got m={m}, n={n}"
        )));
    }
    let fixed = match source {
        Source::Named(inst) => Some(inst.profile()?),
        Source::Random { .. } => None,
    };
    let outcomes = parallel_map(jobs, trials, |k| -> CliResult<Option<NoCePoint>> {
        let mut rng = trial_rng(seed, k as u64);
        let income_seed: u64 = rng.gen();
        let (seeds, profile, incomes) = match source {
            Source::Random { m, n } => {
                let (seeds, profile) = random_profile(&mut rng, *m, *n);
                (Some(seeds), profile, generic_incomes(*m, *n, income_seed)?)
            }
            Source::Named(inst) => {
                let t = GridSampler::default()
                    .sample(&inst.region, income_seed, 1)?
                    .remove(0);
                (None, fixed.clone().expect("named profile"), t)
            }
        };
        Ok(match ce_exists(&profile, &incomes)? {
            Some(_) => None,
            None => Some(NoCePoint {
                trial: k,
                incomes: incomes_text(&incomes),
                profile_seeds: seeds,
            }),
        })
    });
    let no_ce = outcomes
        .into_iter()
        .filter_map(|r| r.transpose())
        .collect::<CliResult<Vec<_>>>()?;
    let ce_found = trials - no_ce.len();
    Ok(SweepDocument {
        source: source.label(),
        m,
        n,
        seed,
        trials,
        ce_found,
        existence_rate: format!("{ce_found}/{trials}"),
        no_ce,
    })
}
