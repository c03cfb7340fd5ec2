//! `l`-out-of-`d` maximin bundles and the entitlement guarantee of a CE.
//!
//! `maximin(X, l, d)` is the best bundle an agent can secure by splitting
//! `X` into `d` parts (some possibly empty) and keeping the worst union of
//! `l` of them. In a CE, an agent whose income is at least `l/d` of the
//! total income of a group `K` weakly prefers their own bundle to the maximin
//! bundle of the union of `K`'s bundles.

use std::collections::{HashMap, HashSet};

use num::BigInt;

use crate::bundle::Bundle;
use crate::market::{Allocation, CEPair, IncomeVector};
use crate::preference::PreferenceOrder;
use crate::rational::Rational;

pub const MAX_MAXIMIN_ITEMS: usize = 6;
pub const MAX_MAXIMIN_PARTS: usize = 6;

/// Brute force over all assignments of the items of `x` to `d` labeled
/// parts. Requires `1 ≤ l ≤ d ≤ 6` and `|x| ≤ 6`.
pub fn maximin(pref: &PreferenceOrder, x: Bundle, l: usize, d: usize) -> Bundle {
    assert!(1 <= l && l <= d, "need 1 <= l <= d");
    assert!(d <= MAX_MAXIMIN_PARTS && x.len() <= MAX_MAXIMIN_ITEMS);
    let items: Vec<usize> = x.items().collect();
    let choices: Vec<u32> = (0u32..1 << d)
        .filter(|s| s.count_ones() as usize == l)
        .collect();
    let total = d.pow(items.len() as u32);
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut best: Option<Bundle> = None;
    let mut parts = vec![Bundle::EMPTY; d];
    for mut code in 0..total {
        parts.iter_mut().for_each(|p| *p = Bundle::EMPTY);
        for &item in &items {
            parts[code % d] = parts[code % d].with(item);
            code /= d;
        }
        let mut key: Vec<u16> = parts.iter().map(|b| b.bits()).collect();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        let worst = pref
            .worst(choices.iter().map(|&s| {
                (0..d)
                    .filter(|k| s & (1 << k) != 0)
                    .fold(Bundle::EMPTY, |acc, k| acc.union(parts[k]))
            }))
            .expect("at least one union");
        if best.is_none_or(|b| pref.prefers(worst, b)) {
            best = Some(worst);
        }
    }
    best.unwrap_or(Bundle::EMPTY)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeCheck {
    /// The income premise `t_agent ≥ (l/d)·Σ_{i∈K} t_i`.
    pub applicable: bool,
    /// The conclusion; vacuously true when not applicable.
    pub holds: bool,
    pub maximin: Option<Bundle>,
}

fn premise(incomes: &IncomeVector, agent: usize, group: &[usize], l: usize, d: usize) -> bool {
    let sum: Rational = group.iter().map(|&i| incomes.get(i).clone()).sum();
    let lhs = incomes.get(agent) * Rational::from_integer(BigInt::from(d));
    lhs >= sum * Rational::from_integer(BigInt::from(l))
}

fn group_union(alloc: &Allocation, group: &[usize]) -> Bundle {
    group
        .iter()
        .fold(Bundle::EMPTY, |acc, &i| acc.union(alloc.bundle(i)))
}

pub fn check_guarantee(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
    alloc: &Allocation,
    agent: usize,
    group: &[usize],
    l: usize,
    d: usize,
) -> GuaranteeCheck {
    if !premise(incomes, agent, group, l, d) {
        return GuaranteeCheck {
            applicable: false,
            holds: true,
            maximin: None,
        };
    }
    let pref = &profile[agent];
    let target = maximin(pref, group_union(alloc, group), l, d);
    GuaranteeCheck {
        applicable: true,
        holds: pref.weakly_prefers(alloc.bundle(agent), target),
        maximin: Some(target),
    }
}

/// One applicable instance of the guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeInstance {
    pub agent: usize,
    pub group: Vec<usize>,
    pub l: usize,
    pub d: usize,
    pub maximin: Bundle,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FairnessAudit {
    pub applicable: Vec<GuaranteeInstance>,
}

impl FairnessAudit {
    pub fn violations(&self) -> impl Iterator<Item = &GuaranteeInstance> {
        self.applicable.iter().filter(|g| !g.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Every agent, every nonempty group `K` and every `1 ≤ l ≤ d ≤ d_max`.
pub fn audit_ce_fairness(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
    ce: &CEPair,
    d_max: usize,
) -> FairnessAudit {
    let n = profile.len();
    let alloc = &ce.allocation;
    let mut memo: HashMap<(usize, Bundle, usize, usize), Bundle> = HashMap::new();
    let mut audit = FairnessAudit::default();
    for (agent, pref) in profile.iter().enumerate() {
        for mask in 1u32..1 << n {
            let group: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let union = group_union(alloc, &group);
            for d in 1..=d_max {
                for l in 1..=d {
                    if !premise(incomes, agent, &group, l, d) {
                        continue;
                    }
                    let target = *memo
                        .entry((agent, union, l, d))
                        .or_insert_with(|| maximin(pref, union, l, d));
                    audit.applicable.push(GuaranteeInstance {
                        agent,
                        group: group.clone(),
                        l,
                        d,
                        maximin: target,
                        holds: pref.weakly_prefers(alloc.bundle(agent), target),
                    });
                }
            }
        }
    }
    audit
}
