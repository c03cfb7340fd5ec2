//! Incomes, allocations, prices, exact CE verification and the positional
//! domination relation.

use std::fmt;

use num::{Signed, Zero};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::preference::PreferenceOrder;
use crate::rational::{format_rational, Rational};

/// Positive income per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncomeVector(Vec<Rational>);

impl IncomeVector {
    pub fn new(incomes: Vec<Rational>) -> Result<Self> {
        if let Some(i) = incomes.iter().position(|t| !t.is_positive()) {
            return Err(Error::NonPositiveIncome(i));
        }
        Ok(IncomeVector(incomes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: usize) -> &Rational {
        &self.0[agent]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// Agent indices sorted by income, richest first (stable on ties).
    pub fn descending_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.0.len()).collect();
        idx.sort_by(|&i, &j| self.0[j].cmp(&self.0[i]));
        idx
    }

    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        IncomeVector::new(self.0.iter().map(|t| t * factor).collect())
    }
}

/// A partition of all `m` items among `n` agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    m: usize,
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(m: usize, bundles: Vec<Bundle>) -> Result<Self> {
        let mut seen = Bundle::EMPTY;
        for (i, &b) in bundles.iter().enumerate() {
            b.check_universe(m)?;
            if !b.is_disjoint(seen) {
                return Err(Error::InvalidAllocation(format!(
                    "agent {i} shares items {} with an earlier agent",
                    b.intersection(seen)
                )));
            }
            seen = seen.union(b);
        }
        if seen != Bundle::full(m) {
            return Err(Error::InvalidAllocation(format!(
                "items {} are unallocated",
                Bundle::full(m).difference(seen)
            )));
        }
        Ok(Allocation { m, bundles })
    }

    /// Allocation where item `j` goes to agent `owner[j]`.
    pub fn from_owners(n: usize, owner: &[usize]) -> Result<Self> {
        let mut bundles = vec![Bundle::EMPTY; n];
        for (item, &agent) in owner.iter().enumerate() {
            if agent >= n {
                return Err(Error::DimensionMismatch(format!(
                    "item {item} assigned to agent {agent} of {n}"
                )));
            }
            bundles[agent] = bundles[agent].with(item);
        }
        Allocation::new(owner.len(), bundles)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: usize) -> Bundle {
        self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn owner(&self, item: usize) -> usize {
        self.bundles
            .iter()
            .position(|b| b.contains(item))
            .expect("allocation covers every item")
    }

    /// The same allocation with agents `i` and `j` exchanging bundles.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut bundles = self.bundles.clone();
        bundles.swap(i, j);
        Allocation { m: self.m, bundles }
    }
}

/// Positive price per item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PriceVector(Vec<Rational>);

impl PriceVector {
    pub fn new(prices: Vec<Rational>) -> Result<Self> {
        if let Some(j) = prices.iter().position(|p| !p.is_positive()) {
            return Err(Error::NonPositivePrice(j));
        }
        Ok(PriceVector(prices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn item(&self, j: usize) -> &Rational {
        &self.0[j]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn of(&self, b: Bundle) -> Rational {
        b.items().fold(Rational::zero(), |acc, j| acc + &self.0[j])
    }

    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        PriceVector::new(self.0.iter().map(|p| p * factor).collect())
    }
}

/// A candidate competitive equilibrium.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CEPair {
    pub prices: PriceVector,
    pub allocation: Allocation,
}

/// How Condition 2 measures what an agent can afford.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AffordabilityRule {
    /// Threshold is the agent's income `t_i`.
    #[default]
    Income,
    /// Threshold is the price of the agent's own bundle `p(X_i)`; differs
    /// from `Income` only for agents holding nothing.
    StrictLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A non-empty bundle whose price differs from its holder's income.
    BudgetMismatch,
    /// A strictly preferred bundle priced at or below the threshold.
    AffordableBetterBundle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub agent: usize,
    pub kind: ViolationKind,
    /// Own bundle for `BudgetMismatch`, the affordable better bundle otherwise.
    pub witness: Bundle,
    pub witness_price: Rational,
    /// Income (budget mismatch) or affordability threshold.
    pub threshold: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::BudgetMismatch => write!(
                f,
                "agent {}: bundle {} costs {} but income is {}",
                self.agent,
                self.witness,
                format_rational(&self.witness_price),
                format_rational(&self.threshold)
            ),
            ViolationKind::AffordableBetterBundle => write!(
                f,
                "agent {}: prefers {} which costs {} <= {}",
                self.agent,
                self.witness,
                format_rational(&self.witness_price),
                format_rational(&self.threshold)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CEReport {
    pub violations: Vec<Violation>,
}

impl CEReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_dimensions(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
    cand: &CEPair,
) -> Result<()> {
    let n = profile.len();
    let m = cand.allocation.m();
    if incomes.len() != n || cand.allocation.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} preferences, {} incomes, {} bundles",
            n,
            incomes.len(),
            cand.allocation.n()
        )));
    }
    if cand.prices.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} prices for {m} items",
            cand.prices.len()
        )));
    }
    if let Some(p) = profile.iter().find(|p| p.m() != m) {
        return Err(Error::DimensionMismatch(format!(
            "preference over {} items, allocation over {m}",
            p.m()
        )));
    }
    Ok(())
}

pub fn verify_ce(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
    cand: &CEPair,
) -> Result<CEReport> {
    verify_ce_with(profile, incomes, cand, AffordabilityRule::Income)
}

/// Checks both CE conditions exactly and returns every violation found.
pub fn verify_ce_with(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
    cand: &CEPair,
    rule: AffordabilityRule,
) -> Result<CEReport> {
    check_dimensions(profile, incomes, cand)?;
    let mut violations = Vec::new();
    for (agent, pref) in profile.iter().enumerate() {
        let own = cand.allocation.bundle(agent);
        let income = incomes.get(agent);
        let own_price = cand.prices.of(own);
        if !own.is_empty() && &own_price != income {
            violations.push(Violation {
                agent,
                kind: ViolationKind::BudgetMismatch,
                witness: own,
                witness_price: own_price.clone(),
                threshold: income.clone(),
            });
        }
        let threshold = match rule {
            AffordabilityRule::Income => income.clone(),
            AffordabilityRule::StrictLiteral => own_price,
        };
        for &better in pref.better_than(own) {
            let price = cand.prices.of(better);
            if price <= threshold {
                violations.push(Violation {
                    agent,
                    kind: ViolationKind::AffordableBetterBundle,
                    witness: better,
                    witness_price: price,
                    threshold: threshold.clone(),
                });
            }
        }
    }
    Ok(CEReport { violations })
}

/// `X` is dominated by `Y` when some injection `X -> Y` maps every item to
/// one picked weakly earlier. `positions[item]` is the item's pick position.
///
/// Matching the k-th earliest item of `Y` to the k-th earliest of `X` is
/// exact: the feasible pairs form an interval order.
pub fn is_dominated_by(x: Bundle, y: Bundle, positions: &[usize]) -> bool {
    if x == y || y.len() < x.len() {
        return false;
    }
    let sorted = |b: Bundle| {
        let mut v: Vec<usize> = b.items().map(|i| positions[i]).collect();
        v.sort_unstable();
        v
    };
    let px = sorted(x);
    let py = sorted(y);
    px.iter().zip(&py).all(|(a, b)| b <= a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleClassification {
    /// The other bundle dominates the agent's own bundle.
    Dominating,
    /// The other bundle is dominated by the agent's own bundle.
    Dominated,
    Unrelated,
}

pub fn classify_bundle(positions: &[usize], own: Bundle, other: Bundle) -> BundleClassification {
    if is_dominated_by(own, other, positions) {
        BundleClassification::Dominating
    } else if is_dominated_by(other, own, positions) {
        BundleClassification::Dominated
    } else {
        BundleClassification::Unrelated
    }
}
