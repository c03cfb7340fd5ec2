//! Picking sequences with prices ("pixeps"), their price requirements, and
//! subgame-perfect equilibrium enumeration for pixep games and for
//! sequential games whose moves choose between pixeps.
//!
//! Every price is affine in a symbolic `ε > 0`. The requirements are:
//!
//! * **R1** – an agent's prices sum to its income, identically in `ε`;
//! * **R2** – prices are non-increasing along the sequence, strictly
//!   decreasing where the picking agent changes;
//! * **R3** – the last price exceeds the income of every agent that never
//!   picks (and is positive in any case).

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num::{One, Signed, Zero};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::market::{verify_ce, Allocation, CEPair, IncomeVector, PriceVector};
use crate::preference::PreferenceOrder;
use crate::rational::{format_rational, int, Rational};

/// `constant + slope·ε`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePrice {
    pub constant: Rational,
    pub slope: Rational,
}

impl AffinePrice {
    pub fn new(constant: Rational, slope: i64) -> Self {
        AffinePrice {
            constant,
            slope: int(slope),
        }
    }

    /// A price with no `ε` part.
    pub fn fixed(constant: Rational) -> Self {
        AffinePrice::new(constant, 0)
    }

    pub fn eval(&self, epsilon: &Rational) -> Rational {
        &self.constant + &self.slope * epsilon
    }

    fn minus(&self, other: &AffinePrice) -> AffinePrice {
        AffinePrice {
            constant: &self.constant - &other.constant,
            slope: &self.slope - &other.slope,
        }
    }
}

impl fmt::Display for AffinePrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eps = |s: &Rational| {
            if s.abs().is_one() {
                "ε".to_string()
            } else {
                format!("{}ε", format_rational(&s.abs()))
            }
        };
        match (self.constant.is_zero(), self.slope.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.constant)),
            (true, false) => {
                let sign = if self.slope.is_negative() { "-" } else { "" };
                write!(f, "{sign}{}", eps(&self.slope))
            }
            (false, false) => {
                let sign = if self.slope.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{}{sign}{}",
                    format_rational(&self.constant),
                    eps(&self.slope)
                )
            }
        }
    }
}

/// One turn of a pixep: the agent who picks and the price attached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Turn {
    pub agent: usize,
    pub price: AffinePrice,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pixep {
    label: String,
    turns: Vec<Turn>,
}

impl Pixep {
    pub fn new(label: impl Into<String>, turns: Vec<Turn>) -> Self {
        Pixep {
            label: label.into(),
            turns,
        }
    }

    /// Builds from `(agent, price)` pairs.
    pub fn from_pairs(label: impl Into<String>, pairs: Vec<(usize, AffinePrice)>) -> Self {
        Pixep::new(
            label,
            pairs
                .into_iter()
                .map(|(agent, price)| Turn { agent, price })
                .collect(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn appears(&self, agent: usize) -> bool {
        self.turns.iter().any(|t| t.agent == agent)
    }

    /// Whether all of `agent`'s turns form one contiguous block.
    pub fn is_contiguous(&self, agent: usize) -> bool {
        let idx: Vec<usize> = (0..self.turns.len())
            .filter(|&k| self.turns[k].agent == agent)
            .collect();
        match (idx.first(), idx.last()) {
            (Some(&a), Some(&b)) => b - a + 1 == idx.len(),
            _ => true,
        }
    }
}

impl fmt::Display for Pixep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.turns.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "#{}({})", t.agent, t.price)?;
        }
        Ok(())
    }
}

/// A linear requirement on `ε` that can bind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequirementConstraint {
    /// Price at 0-based `position` versus the next one.
    Decreasing { position: usize, strict: bool },
    /// Last price versus the richest absent agent.
    AbsentIncome { agent: usize },
    /// Last price must be positive.
    Positivity,
}

impl fmt::Display for RequirementConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RequirementConstraint::Decreasing { position, strict } => write!(
                f,
                "R2: price {} {} price {}",
                position + 1,
                if *strict { ">" } else { ">=" },
                position + 2
            ),
            RequirementConstraint::AbsentIncome { agent } => {
                write!(f, "R3: last price > income of absent agent {agent}")
            }
            RequirementConstraint::Positivity => write!(f, "last price > 0"),
        }
    }
}

/// The open interval `(0, upper)` of admissible `ε`; `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonInterval {
    pub upper: Option<Rational>,
}

impl EpsilonInterval {
    pub fn contains(&self, epsilon: &Rational) -> bool {
        epsilon.is_positive() && self.upper.as_ref().is_none_or(|u| epsilon < u)
    }
}

/// Verifies R1 exactly and solves R2/R3 for the admissible `ε` interval.
pub fn check_requirements(pix: &Pixep, incomes: &IncomeVector) -> Result<EpsilonInterval> {
    let n = incomes.len();
    let mut sums: Vec<Option<AffinePrice>> = vec![None; n];
    for t in &pix.turns {
        if t.agent >= n {
            return Err(Error::DimensionMismatch(format!(
                "pixep names agent {} of {n}",
                t.agent
            )));
        }
        let entry = sums[t.agent].get_or_insert_with(|| AffinePrice::fixed(Rational::zero()));
        entry.constant += &t.price.constant;
        entry.slope += &t.price.slope;
    }
    for (agent, sum) in sums.iter().enumerate() {
        if let Some(sum) = sum {
            if &sum.constant != incomes.get(agent) || !sum.slope.is_zero() {
                return Err(Error::R1Violation { agent });
            }
        }
    }

    // (g, strict, tag): g(ε) > 0 (strict) or g(ε) >= 0.
    let mut constraints: Vec<(AffinePrice, bool, RequirementConstraint)> = Vec::new();
    for (k, w) in pix.turns.windows(2).enumerate() {
        let strict = w[0].agent != w[1].agent;
        constraints.push((
            w[0].price.minus(&w[1].price),
            strict,
            RequirementConstraint::Decreasing {
                position: k,
                strict,
            },
        ));
    }
    if let Some(last) = pix.turns.last() {
        let richest_absent = (0..n)
            .filter(|&i| sums[i].is_none())
            .max_by(|&i, &j| incomes.get(i).cmp(incomes.get(j)));
        if let Some(agent) = richest_absent {
            constraints.push((
                last.price
                    .minus(&AffinePrice::fixed(incomes.get(agent).clone())),
                true,
                RequirementConstraint::AbsentIncome { agent },
            ));
        }
        constraints.push((last.price.clone(), true, RequirementConstraint::Positivity));
    }

    let mut upper: Option<Rational> = None;
    for (g, strict, tag) in constraints {
        let c0 = &g.constant;
        let c1 = &g.slope;
        // Must hold on some interval (0, u): inspect the limit ε -> 0+.
        let ok = if c1.is_zero() {
            if strict {
                c0.is_positive()
            } else {
                !c0.is_negative()
            }
        } else if c1.is_positive() {
            !c0.is_negative()
        } else {
            c0.is_positive()
        };
        if !ok {
            return Err(Error::EmptyEpsilonInterval(tag));
        }
        if c1.is_negative() {
            let bound = c0 / -c1;
            upper = Some(match upper {
                Some(u) if u <= bound => u,
                _ => bound,
            });
        }
    }
    Ok(EpsilonInterval { upper })
}

/// Largest `u` such that on `(0, u)` no bundle price crosses an income:
/// for every set of positions `S` and agent `i`, `p_S(ε) - t_i` keeps the
/// sign it has as `ε -> 0+`. `None` when no comparison depends on `ε`.
pub fn stability_bound(pix: &Pixep, incomes: &IncomeVector) -> Option<Rational> {
    let k = pix.turns.len();
    let mut bound: Option<Rational> = None;
    for mask in 1u32..1 << k {
        let mut c0 = Rational::zero();
        let mut c1 = Rational::zero();
        for (j, t) in pix.turns.iter().enumerate() {
            if mask & (1 << j) != 0 {
                c0 += &t.price.constant;
                c1 += &t.price.slope;
            }
        }
        if c1.is_zero() {
            continue;
        }
        for t in incomes.as_slice() {
            let gap = &c0 - t;
            if gap.is_zero() {
                continue;
            }
            let b = gap.abs() / c1.abs();
            if bound.as_ref().is_none_or(|u| b < *u) {
                bound = Some(b);
            }
        }
    }
    bound
}

/// Half the smaller of the admissible interval and [`stability_bound`], so
/// that the concrete prices behave like an infinitesimal `ε`; `1` when
/// neither is bounded (then no price depends on `ε`).
pub fn resolve_epsilon(pix: &Pixep, incomes: &IncomeVector) -> Result<Rational> {
    let interval = check_requirements(pix, incomes)?;
    let upper = match (interval.upper, stability_bound(pix, incomes)) {
        (Some(u), Some(v)) => Some(std::cmp::min(u, v)),
        (u, v) => u.or(v),
    };
    Ok(match upper {
        Some(u) => u / int(2),
        None => Rational::one(),
    })
}

/// A sequential game: choice nodes over sub-games, with pixep leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameNode {
    /// `agent` may take any option; the last one is the default, taken unless
    /// some earlier option gives the agent a strictly better final bundle.
    Choice {
        agent: usize,
        options: Vec<(String, GameNode)>,
    },
    Leaf(Pixep),
}

impl GameNode {
    pub fn leaves(&self) -> Vec<&Pixep> {
        match self {
            GameNode::Leaf(p) => vec![p],
            GameNode::Choice { options, .. } => {
                options.iter().flat_map(|(_, node)| node.leaves()).collect()
            }
        }
    }
}

impl fmt::Display for GameNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameNode::Leaf(p) => write!(f, "{} [{}]", p.label(), p),
            GameNode::Choice { agent, options } => {
                write!(f, "agent {agent} chooses {{ ")?;
                for (k, (label, node)) in options.iter().enumerate() {
                    if k > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{label}: {node}")?;
                }
                write!(f, " }}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pick {
    /// 1-based position in the sequence.
    pub position: usize,
    pub agent: usize,
    pub item: usize,
}

/// One subgame-perfect play: the choices made, the leaf pixep reached and
/// the picks made in it. Prices are kept symbolic in `ε`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Execution {
    pub path: Vec<String>,
    pub leaf: Pixep,
    pub picks: Vec<Pick>,
    pub allocation: Allocation,
}

impl Execution {
    /// `positions()[item]` is the 1-based position at which `item` was picked.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.picks.len()];
        for p in &self.picks {
            pos[p.item] = p.position;
        }
        pos
    }

    /// Symbolic price of every item.
    pub fn item_prices(&self) -> Vec<AffinePrice> {
        let mut prices = vec![AffinePrice::fixed(Rational::zero()); self.picks.len()];
        for p in &self.picks {
            prices[p.item] = self.leaf.turns[p.position - 1].price.clone();
        }
        prices
    }

    pub fn prices_at(&self, epsilon: &Rational) -> Result<PriceVector> {
        PriceVector::new(self.item_prices().iter().map(|p| p.eval(epsilon)).collect())
    }
}

/// Picks suffix plus final holdings of every agent.
#[derive(Debug, Clone)]
struct Outcome {
    picks: Vec<u8>,
    holdings: Vec<Bundle>,
}

struct LeafSolver<'a> {
    pix: &'a Pixep,
    profile: &'a [PreferenceOrder],
    memo: HashMap<(usize, Vec<Bundle>), Rc<Vec<Outcome>>>,
}

impl LeafSolver<'_> {
    /// All SPE outcomes of the subgame starting at position `k` with the
    /// given holdings. Keyed on holdings, not only on the remaining items:
    /// preferences over bundles are not separable, so what an agent already
    /// holds changes how it ranks continuations.
    fn solve(&mut self, k: usize, holdings: &[Bundle]) -> Rc<Vec<Outcome>> {
        if k == self.pix.len() {
            return Rc::new(vec![Outcome {
                picks: Vec::new(),
                holdings: holdings.to_vec(),
            }]);
        }
        let key = (k, holdings.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return Rc::clone(hit);
        }
        let mover = self.pix.turns[k].agent;
        let pref = &self.profile[mover];
        let taken = holdings.iter().fold(Bundle::EMPTY, |acc, &b| acc.union(b));
        let remaining = Bundle::full(self.pix.len()).difference(taken);

        let mut children = Vec::new();
        for item in remaining.items() {
            let mut next = holdings.to_vec();
            next[mover] = next[mover].with(item);
            let outs = self.solve(k + 1, &next);
            let worst = outs
                .iter()
                .map(|o| pref.rank(o.holdings[mover]))
                .min()
                .expect("non-empty outcome set");
            children.push((item, outs, worst));
        }

        let mut result = Vec::new();
        for (j, (item, outs, _)) in children.iter().enumerate() {
            // Best worst-case among the alternatives; an outcome is an SPE
            // outcome iff the mover weakly prefers it to that.
            let bar = children
                .iter()
                .enumerate()
                .filter(|&(j2, _)| j2 != j)
                .map(|(_, c)| c.2)
                .max();
            for o in outs.iter() {
                if bar.is_none_or(|b| pref.rank(o.holdings[mover]) >= b) {
                    let mut picks = Vec::with_capacity(o.picks.len() + 1);
                    picks.push(*item as u8);
                    picks.extend_from_slice(&o.picks);
                    result.push(Outcome {
                        picks,
                        holdings: o.holdings.clone(),
                    });
                }
            }
        }
        let result = Rc::new(result);
        self.memo.insert(key, Rc::clone(&result));
        result
    }
}

fn leaf_executions(pix: &Pixep, profile: &[PreferenceOrder]) -> Vec<Execution> {
    let n = profile.len();
    let mut solver = LeafSolver {
        pix,
        profile,
        memo: HashMap::new(),
    };
    let outs = solver.solve(0, &vec![Bundle::EMPTY; n]);
    outs.iter()
        .map(|o| Execution {
            path: Vec::new(),
            leaf: pix.clone(),
            picks: o
                .picks
                .iter()
                .enumerate()
                .map(|(k, &item)| Pick {
                    position: k + 1,
                    agent: pix.turns[k].agent,
                    item: item as usize,
                })
                .collect(),
            allocation: Allocation::new(pix.len(), o.holdings.clone())
                .expect("picks partition the items"),
        })
        .collect()
}

/// Every subgame-perfect execution of `game`, in a fixed order (options in
/// listed order, items ascending).
///
/// At a picking turn the mover may take any item whose continuation gives a
/// best final bundle; since sub-games are independent, an outcome of one
/// branch is an equilibrium outcome iff the mover weakly prefers it to the
/// worst equilibrium outcome of every other branch. Choice nodes work the
/// same way except that leaving the default needs a strict improvement.
pub fn spe_outcomes(game: &GameNode, profile: &[PreferenceOrder]) -> Vec<Execution> {
    match game {
        GameNode::Leaf(pix) => leaf_executions(pix, profile),
        GameNode::Choice { agent, options } => {
            let pref = &profile[*agent];
            let branches: Vec<(&String, Vec<Execution>, u32)> = options
                .iter()
                .map(|(label, node)| {
                    let outs = spe_outcomes(node, profile);
                    let worst = outs
                        .iter()
                        .map(|e| pref.rank(e.allocation.bundle(*agent)))
                        .min()
                        .expect("non-empty outcome set");
                    (label, outs, worst)
                })
                .collect();
            let default = branches.len() - 1;
            let mut result = Vec::new();
            for (j, (label, outs, _)) in branches.iter().enumerate() {
                for e in outs {
                    let r = pref.rank(e.allocation.bundle(*agent));
                    let chosen = branches.iter().enumerate().all(|(j2, b)| {
                        if j2 == j {
                            true
                        } else if j2 == default {
                            r > b.2
                        } else {
                            r >= b.2
                        }
                    });
                    if chosen {
                        let mut e = e.clone();
                        e.path.insert(0, (*label).clone());
                        result.push(e);
                    }
                }
            }
            result
        }
    }
}

/// Runs every SPE of `game` and keeps those whose allocation and resolved
/// prices form a CE. Fails with `NoValidSpe` when none does.
pub fn execute_to_ce(
    game: &GameNode,
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
) -> Result<Vec<(Execution, CEPair)>> {
    if profile.len() != incomes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} preferences, {} incomes",
            profile.len(),
            incomes.len()
        )));
    }
    let mut epsilons: HashMap<&Pixep, Rational> = HashMap::new();
    for leaf in game.leaves() {
        if let Some(p) = profile.iter().find(|p| p.m() != leaf.len()) {
            return Err(Error::DimensionMismatch(format!(
                "pixep of length {} with preferences over {} items",
                leaf.len(),
                p.m()
            )));
        }
        epsilons.insert(leaf, resolve_epsilon(leaf, incomes)?);
    }
    let mut passing = Vec::new();
    for exec in spe_outcomes(game, profile) {
        let eps = &epsilons[&exec.leaf];
        let cand = CEPair {
            prices: exec.prices_at(eps)?,
            allocation: exec.allocation.clone(),
        };
        if verify_ce(profile, incomes, &cand)?.valid() {
            passing.push((exec, cand));
        }
    }
    if passing.is_empty() {
        return Err(Error::NoValidSpe);
    }
    Ok(passing)
}
