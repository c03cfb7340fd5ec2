//! Ground-truth CE existence by exhaustive allocation enumeration.
//!
//! For a fixed allocation, a CE price vector exists iff the open polyhedron
//! `{p > 0, p(X_i) = t_i for X_i ≠ ∅, p(Y) > t_i for Y ≻_i X_i}` is
//! nonempty. Strictness is handled by one slack `s`: maximize `s` subject to
//! the non-strict system with `s` added to every strict row and `s ≤ 1`.

use num::{One, Signed, Zero};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::market::{verify_ce, Allocation, CEPair, IncomeVector, PriceVector};
use crate::preference::PreferenceOrder;
use crate::rational::Rational;
use crate::sampling::{GridSampler, Region};

pub const MAX_ORACLE_ITEMS: usize = 6;

/// Price conditions of one allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilitySystem {
    pub m: usize,
    /// `p(X) = t`.
    pub equalities: Vec<(Bundle, Rational)>,
    /// `p(Y) > t`; item positivity appears as `p({j}) > 0`.
    pub strict: Vec<(Bundle, Rational)>,
}

impl FeasibilitySystem {
    /// Builds the system, keeping only inclusion-minimal better bundles per
    /// agent; with positive prices the dropped rows are implied.
    pub fn build(
        profile: &[PreferenceOrder],
        incomes: &IncomeVector,
        allocation: &Allocation,
    ) -> Self {
        let m = allocation.m();
        let mut equalities = Vec::new();
        let mut strict: Vec<(Bundle, Rational)> = (0..m)
            .map(|j| (Bundle::singleton(j), Rational::zero()))
            .collect();
        for (i, pref) in profile.iter().enumerate() {
            let own = allocation.bundle(i);
            let t = incomes.get(i);
            if !own.is_empty() {
                equalities.push((own, t.clone()));
            }
            let better = pref.better_than(own);
            for &y in better {
                let minimal = y.subsets().all(|z| z == y || !pref.prefers(z, own));
                if minimal {
                    strict.push((y, t.clone()));
                }
            }
        }
        FeasibilitySystem {
            m,
            equalities,
            strict,
        }
    }

    pub fn is_satisfied_by(&self, prices: &PriceVector) -> bool {
        self.equalities.iter().all(|(b, t)| prices.of(*b) == *t)
            && self.strict.iter().all(|(b, t)| prices.of(*b) > *t)
    }

    /// A price vector satisfying the system, if one exists.
    pub fn solve(&self) -> Option<PriceVector> {
        let m = self.m;
        let one = Rational::one();
        let mut objective = vec![Rational::zero(); m + 1];
        objective[m] = one.clone();
        let mut lp = LinearProgram::new(m + 1, objective);
        let row = |b: Bundle, slack: bool| {
            let mut r: Vec<Rational> = (0..m)
                .map(|j| {
                    if b.contains(j) {
                        one.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            r.push(if slack {
                -one.clone()
            } else {
                Rational::zero()
            });
            r
        };
        for (b, t) in &self.equalities {
            lp.add(row(*b, false), Relation::Eq, t.clone());
        }
        for (b, t) in &self.strict {
            lp.add(row(*b, true), Relation::Ge, t.clone());
        }
        let mut cap = vec![Rational::zero(); m + 1];
        cap[m] = one.clone();
        lp.add(cap, Relation::Le, one);
        match lp.maximize() {
            LpOutcome::Optimal { value, mut point } if value.is_positive() => {
                point.truncate(m);
                PriceVector::new(point).ok()
            }
            _ => None,
        }
    }
}

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistenceReport {
    pub witness: Option<CEPair>,
    pub allocations_checked: usize,
    pub programs_solved: usize,
}

/// Agent `i` strictly prefers the bundle of some agent `k ≠ i` who is no
/// richer; that bundle costs at most `t_i`, so the allocation has no CE.
fn cheap_envy(profile: &[PreferenceOrder], incomes: &IncomeVector, alloc: &Allocation) -> bool {
    let n = profile.len();
    (0..n).any(|i| {
        let own = alloc.bundle(i);
        (0..n).any(|k| {
            let other = alloc.bundle(k);
            k != i
                && !other.is_empty()
                && incomes.get(k) <= incomes.get(i)
                && profile[i].prefers(other, own)
        })
    })
}

fn check_inputs(profile: &[PreferenceOrder], incomes: &IncomeVector) -> Result<usize> {
    let n = profile.len();
    if n == 0 || incomes.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} preferences, {} incomes",
            incomes.len()
        )));
    }
    let m = profile[0].m();
    if profile.iter().any(|p| p.m() != m) {
        return Err(Error::DimensionMismatch(
            "preferences over different item counts".into(),
        ));
    }
    if m > MAX_ORACLE_ITEMS {
        return Err(Error::InstanceTooLarge { m, n });
    }
    Ok(m)
}

/// All `n^m` allocations in mixed-radix order: item 0 is the fastest digit.
pub fn allocations(m: usize, n: usize) -> impl Iterator<Item = Allocation> {
    let total = n.pow(m as u32);
    (0..total).map(move |mut code| {
        let owners: Vec<usize> = (0..m)
            .map(|_| {
                let o = code % n;
                code /= n;
                o
            })
            .collect();
        Allocation::from_owners(n, &owners).expect("owners are in range")
    })
}

pub fn ce_exists_report(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
) -> Result<ExistenceReport> {
    let m = check_inputs(profile, incomes)?;
    let n = profile.len();
    let mut report = ExistenceReport {
        witness: None,
        allocations_checked: 0,
        programs_solved: 0,
    };
    for alloc in allocations(m, n) {
        report.allocations_checked += 1;
        if cheap_envy(profile, incomes, &alloc) {
            continue;
        }
        report.programs_solved += 1;
        let system = FeasibilitySystem::build(profile, incomes, &alloc);
        if let Some(prices) = system.solve() {
            let ce = CEPair {
                prices,
                allocation: alloc,
            };
            if !verify_ce(profile, incomes, &ce)?.valid() {
                return Err(Error::Internal("oracle witness fails verification".into()));
            }
            report.witness = Some(ce);
            return Ok(report);
        }
    }
    Ok(report)
}

/// First CE in enumeration order, or `None` if no allocation supports one.
pub fn ce_exists(profile: &[PreferenceOrder], incomes: &IncomeVector) -> Result<Option<CEPair>> {
    Ok(ce_exists_report(profile, incomes)?.witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionReport {
    pub checked: usize,
    /// Sampled incomes where a CE was found, with the witness.
    pub failures: Vec<(IncomeVector, CEPair)>,
}

/// Samples `trials` incomes in `region` and runs [`ce_exists`] on each.
pub fn no_ce_on_region(
    profile: &[PreferenceOrder],
    region: &Region,
    seed: u64,
    trials: usize,
) -> Result<RegionReport> {
    let points = GridSampler::default().sample(region, seed, trials)?;
    let mut report = RegionReport {
        checked: 0,
        failures: Vec::new(),
    };
    for t in points {
        report.checked += 1;
        if let Some(ce) = ce_exists(profile, &t)? {
            report.failures.push((t, ce));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::make_preference;
    use crate::rational::int;

    fn one_item() -> Vec<PreferenceOrder> {
        let p = make_preference(1, &[Bundle::EMPTY, Bundle::singleton(0)]).unwrap();
        vec![p.clone(), p]
    }

    #[test]
    fn equal_incomes_one_item() {
        let t = IncomeVector::new(vec![int(1), int(1)]).unwrap();
        let r = ce_exists_report(&one_item(), &t).unwrap();
        assert_eq!(r.witness, None);
        assert_eq!(r.allocations_checked, 2);
    }

    #[test]
    fn unequal_incomes_one_item() {
        let t = IncomeVector::new(vec![int(2), int(1)]).unwrap();
        let ce = ce_exists(&one_item(), &t).unwrap().unwrap();
        assert_eq!(ce.allocation.bundle(0), Bundle::singleton(0));
        assert_eq!(ce.prices.item(0), &int(2));
    }

    #[test]
    fn enumeration_order() {
        let owners: Vec<Vec<usize>> = allocations(2, 3)
            .take(4)
            .map(|a| (0..2).map(|j| a.owner(j)).collect())
            .collect();
        assert_eq!(owners, vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1]]);
    }

    #[test]
    fn too_large() {
        let p = make_preference(7, &Bundle::all(7).collect::<Vec<_>>()).unwrap();
        let t = IncomeVector::new(vec![int(1)]).unwrap();
        assert!(matches!(
            ce_exists(&[p], &t),
            Err(Error::InstanceTooLarge { m: 7, n: 1 })
        ));
    }
}
