//! Constructive CE for almost all incomes.
//!
//! Agents are ranked by income (`a > b > c > d`, written A, B, C, D). For each
//! supported `(m, n)` the income space minus finitely many hyperplanes splits
//! into ranges; each range has a pixep, or a sequential game over pixeps,
//! whose subgame-perfect play yields a competitive equilibrium.

use std::fmt;

use num::Zero;

use crate::error::{Error, Result};
use crate::market::{verify_ce, CEPair, IncomeVector};
use crate::pixep::{execute_to_ce, resolve_epsilon, AffinePrice, Execution, GameNode, Pixep};
use crate::preference::PreferenceOrder;
use crate::rational::{int, Rational};

/// The excluded set `{t : Σ coeffs[k]·t_(k) = 0}`, where `t_(0) > t_(1) > …`
/// are the incomes sorted in decreasing order (`a, b, c, …`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hyperplane {
    pub coeffs: Vec<i64>,
}

impl Hyperplane {
    fn new(n: usize, terms: &[(usize, i64)]) -> Self {
        let mut coeffs = vec![0; n];
        for &(k, c) in terms {
            coeffs[k] += c;
        }
        debug_assert!(coeffs.iter().any(|&c| c != 0));
        Hyperplane { coeffs }
    }

    /// Signed value `Σ coeffs[k]·sorted[k]`.
    pub fn evaluate(&self, sorted: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(sorted)
            .filter(|(c, _)| **c != 0)
            .map(|(&c, t)| int(c) * t)
            .sum()
    }

    pub fn contains(&self, sorted: &[Rational]) -> bool {
        self.evaluate(sorted).is_zero()
    }
}

const ROLE_NAMES: [char; 16] = [
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p',
];

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |positive: bool| {
            let terms: Vec<String> = self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| if positive { c > 0 } else { c < 0 })
                .map(|(k, &c)| match c.abs() {
                    1 => ROLE_NAMES[k].to_string(),
                    c => format!("{c}{}", ROLE_NAMES[k]),
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        write!(f, "{} = {}", side(true), side(false))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// A single agent takes everything.
    OneAgent,
    OneItem,
    TwoItems,
    /// Three items, any number of agents.
    ThreeItems,
    FourItemsTwoAgents,
    FourItemsThreeAgents,
}

/// One income range of one algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Range {
    pub algorithm: Algorithm,
    /// 1-based range number within the algorithm.
    pub index: u8,
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.algorithm {
            Algorithm::OneAgent => write!(f, "OneAgent"),
            Algorithm::OneItem => write!(f, "OneItem"),
            Algorithm::TwoItems => write!(f, "TwoItems"),
            Algorithm::ThreeItems => write!(f, "Alg1-Range{}", self.index),
            Algorithm::FourItemsTwoAgents => write!(f, "Alg2-Range{}", self.index),
            Algorithm::FourItemsThreeAgents => write!(f, "Alg3-Range{}", self.index),
        }
    }
}

pub fn algorithm_for(m: usize, n: usize) -> Result<Algorithm> {
    let unsupported = |reason: &str| Error::UnsupportedCase {
        m,
        n,
        reason: reason.to_string(),
    };
    match (m, n) {
        (0, _) | (_, 0) => Err(unsupported("need at least one item and one agent")),
        (m, _) if m >= 5 => Err(unsupported(
            "with five or more items a CE may fail to exist on a set of positive measure",
        )),
        (4, n) if n >= 4 => Err(unsupported(
            "with four items and four or more agents a CE may fail to exist on a set of positive measure",
        )),
        (_, 1) => Ok(Algorithm::OneAgent),
        (1, _) => Ok(Algorithm::OneItem),
        (2, _) => Ok(Algorithm::TwoItems),
        (3, _) => Ok(Algorithm::ThreeItems),
        (4, 2) => Ok(Algorithm::FourItemsTwoAgents),
        (4, 3) => Ok(Algorithm::FourItemsThreeAgents),
        _ => unreachable!(),
    }
}

/// Every range of the `(m, n)` algorithm.
pub fn ranges(m: usize, n: usize) -> Result<Vec<Range>> {
    let algorithm = algorithm_for(m, n)?;
    let count = match algorithm {
        Algorithm::ThreeItems if n >= 3 => 2,
        Algorithm::FourItemsTwoAgents => 2,
        Algorithm::FourItemsThreeAgents => 7,
        _ => 1,
    };
    Ok((1..=count)
        .map(|index| Range { algorithm, index })
        .collect())
}

/// Parses `"Range4"` or a full label such as `"Alg3-Range4"` for `(m, n)`.
pub fn parse_range(m: usize, n: usize, label: &str) -> Result<Range> {
    let all = ranges(m, n)?;
    let wanted = label.trim();
    all.into_iter()
        .find(|r| {
            let full = r.to_string();
            full == wanted
                || full.ends_with(&format!("-{wanted}"))
                || (r.index == 1 && full == wanted)
        })
        .ok_or_else(|| Error::UnknownRange(label.to_string()))
}

/// Excluded income equalities for `(m, n)`; includes `t_(k) = t_(k+1)`
/// for adjacent sorted incomes so that the sort is strict.
pub fn excluded_hyperplanes(m: usize, n: usize) -> Result<Vec<Hyperplane>> {
    let algorithm = algorithm_for(m, n)?;
    let (a, b, c) = (0, 1, 2);
    let mut out: Vec<Hyperplane> = (0..n.saturating_sub(1))
        .map(|k| Hyperplane::new(n, &[(k, 1), (k + 1, -1)]))
        .collect();
    match algorithm {
        Algorithm::ThreeItems if n >= 3 => {
            out.push(Hyperplane::new(n, &[(a, 1), (b, -1), (c, -1)]));
        }
        Algorithm::FourItemsTwoAgents => {
            out.push(Hyperplane::new(n, &[(a, 1), (b, -2)]));
        }
        Algorithm::FourItemsThreeAgents => {
            out.push(Hyperplane::new(n, &[(a, 1), (b, -2), (c, -1)]));
            out.push(Hyperplane::new(n, &[(a, 1), (b, -2)]));
            out.push(Hyperplane::new(n, &[(a, 1), (b, -1), (c, -1)]));
            out.push(Hyperplane::new(n, &[(a, 1), (c, 1), (b, -2)]));
            out.push(Hyperplane::new(n, &[(a, 1), (c, -2)]));
            out.push(Hyperplane::new(n, &[(c, 2), (b, -1)]));
        }
        _ => {}
    }
    Ok(out)
}

fn sorted_values(incomes: &IncomeVector) -> Vec<Rational> {
    incomes
        .descending_order()
        .into_iter()
        .map(|i| incomes.get(i).clone())
        .collect()
}

/// The first excluded hyperplane the incomes lie on, if any.
pub fn violated_hyperplane(incomes: &IncomeVector, m: usize) -> Result<Option<Hyperplane>> {
    let sorted = sorted_values(incomes);
    Ok(excluded_hyperplanes(m, incomes.len())?
        .into_iter()
        .find(|h| h.contains(&sorted)))
}

pub fn is_generic(incomes: &IncomeVector, m: usize) -> Result<bool> {
    Ok(violated_hyperplane(incomes, m)?.is_none())
}

/// Strict range predicate over incomes sorted in decreasing order.
pub fn in_range(range: Range, sorted: &[Rational]) -> bool {
    let get = |k: usize| sorted.get(k).cloned().unwrap_or_else(Rational::zero);
    let (a, b, c) = (get(0), get(1), get(2));
    let two = |x: &Rational| x * int(2);
    match (range.algorithm, range.index) {
        (Algorithm::OneAgent | Algorithm::OneItem | Algorithm::TwoItems, _) => true,
        (Algorithm::ThreeItems, 1) => a > &b + &c,
        (Algorithm::ThreeItems, 2) => a < &b + &c,
        (Algorithm::FourItemsTwoAgents, 1) => a > two(&b),
        (Algorithm::FourItemsTwoAgents, 2) => a < two(&b),
        (Algorithm::FourItemsThreeAgents, k) => {
            let b2 = two(&b);
            let c2 = two(&c);
            let bc = &b + &c;
            match k {
                1 => a > &b2 + &c,
                2 => &b2 + &c > a && a > b2,
                3 => b2 > a && a > bc && &a + &c > b2,
                4 => b2 > a && a > bc && b2 > &a + &c,
                5 => bc > a && a > c2 && c2 > b,
                6 => bc > a && a > c2 && b > c2,
                7 => c2 > a,
                _ => false,
            }
        }
        _ => false,
    }
}

/// Builds a pixep from a role string such as `"ABAB"`; role `A` is the
/// richest agent, i.e. `order[0]`.
fn pixep(roles: &str, order: &[usize], prices: Vec<AffinePrice>) -> Pixep {
    debug_assert_eq!(roles.len(), prices.len());
    let turns = roles
        .bytes()
        .zip(prices)
        .map(|(r, p)| (order[(r - b'A') as usize], p))
        .collect();
    Pixep::from_pairs(roles, turns)
}

fn leaf(roles: &str, order: &[usize], prices: Vec<AffinePrice>) -> GameNode {
    GameNode::Leaf(pixep(roles, order, prices))
}

fn choice(agent: usize, options: Vec<GameNode>) -> GameNode {
    let options = options
        .into_iter()
        .map(|node| {
            let label = match &node {
                GameNode::Leaf(p) => p.label().to_string(),
                GameNode::Choice { .. } => "else".to_string(),
            };
            (label, node)
        })
        .collect();
    GameNode::Choice { agent, options }
}

/// The game played in `range` over `m` items. `sorted` holds the incomes in decreasing
/// order and `order` the matching agent indices.
pub fn build_game(
    range: Range,
    m: usize,
    order: &[usize],
    sorted: &[Rational],
) -> Result<GameNode> {
    let get = |k: usize| sorted.get(k).cloned().unwrap_or_else(Rational::zero);
    let (a, b, c) = (get(0), get(1), get(2));
    let half = |x: &Rational| x / int(2);
    let px = |x: &Rational, eps: i64| AffinePrice::new(x.clone(), eps);
    let zero = Rational::zero();
    let (alice, bob) = (order[0], order.get(1).copied().unwrap_or(0));

    let game = match (range.algorithm, range.index) {
        (Algorithm::OneAgent, _) => {
            let share = &a / int(m as i64);
            leaf(&"A".repeat(m), order, vec![AffinePrice::fixed(share); m])
        }
        (Algorithm::OneItem, _) => leaf("A", order, vec![px(&a, 0)]),
        (Algorithm::TwoItems, _) => leaf("AB", order, vec![px(&a, 0), px(&b, 0)]),
        (Algorithm::ThreeItems, 1) => {
            leaf("ABA", order, vec![px(&(&a - &c), -1), px(&b, 0), px(&c, 1)])
        }
        (Algorithm::ThreeItems, 2) => leaf("ABC", order, vec![px(&a, 0), px(&b, 0), px(&c, 0)]),
        (Algorithm::FourItemsTwoAgents, 1) => leaf(
            "AABA",
            order,
            vec![px(&(&a - &b), -2), px(&b, 1), px(&b, 0), px(&zero, 1)],
        ),
        (Algorithm::FourItemsTwoAgents, 2) => {
            let d = half(&(&a - &b));
            choice(
                alice,
                vec![
                    leaf(
                        "ABAB",
                        order,
                        vec![px(&a, -2), px(&b, -1), px(&zero, 2), px(&zero, 1)],
                    ),
                    choice(
                        bob,
                        vec![
                            leaf(
                                "BAAA",
                                order,
                                vec![px(&b, 0), px(&b, -2), px(&d, 1), px(&d, 1)],
                            ),
                            leaf(
                                "AABB",
                                order,
                                vec![
                                    px(&half(&a), 0),
                                    px(&half(&a), 0),
                                    px(&half(&b), 0),
                                    px(&half(&b), 0),
                                ],
                            ),
                        ],
                    ),
                ],
            )
        }
        (Algorithm::FourItemsThreeAgents, k) => {
            let abab = || {
                leaf(
                    "ABAB",
                    order,
                    vec![px(&(&a - &c), -2), px(&(&b - &c), -1), px(&c, 2), px(&c, 1)],
                )
            };
            let baac = || {
                leaf(
                    "BAAC",
                    order,
                    vec![px(&b, 0), px(&(&a - &c), -1), px(&c, 1), px(&c, 0)],
                )
            };
            let abcb = || {
                leaf(
                    "ABCB",
                    order,
                    vec![px(&a, 0), px(&b, -1), px(&c, 0), px(&zero, 1)],
                )
            };
            match k {
                1 => leaf(
                    "AABA",
                    order,
                    vec![px(&(&a - &b - &c), -2), px(&b, 1), px(&b, 0), px(&c, 1)],
                ),
                2 => leaf(
                    "AABC",
                    order,
                    vec![px(&(&a - &b), -1), px(&b, 1), px(&b, 0), px(&c, 0)],
                ),
                3 => leaf(
                    "ABAC",
                    order,
                    vec![px(&b, 1), px(&b, 0), px(&(&a - &b), -1), px(&c, 0)],
                ),
                4 => {
                    if !(b > &c * int(2) && a > &c * int(3)) {
                        return Err(Error::Internal(
                            "range 4 incomes must satisfy b > 2c and a > 3c".into(),
                        ));
                    }
                    let p = std::cmp::max(c.clone(), half(&(&a - &b)));
                    choice(
                        alice,
                        vec![
                            abab(),
                            choice(
                                bob,
                                vec![
                                    leaf(
                                        "BAAA",
                                        order,
                                        vec![
                                            px(&b, 0),
                                            px(&(&a - &p * int(2)), -2),
                                            px(&p, 1),
                                            px(&p, 1),
                                        ],
                                    ),
                                    leaf(
                                        "AABB",
                                        order,
                                        vec![
                                            px(&half(&a), 0),
                                            px(&half(&a), 0),
                                            px(&half(&b), 0),
                                            px(&half(&b), 0),
                                        ],
                                    ),
                                ],
                            ),
                        ],
                    )
                }
                5 => choice(alice, vec![abcb(), baac()]),
                6 => choice(
                    bob,
                    vec![
                        abab(),
                        choice(
                            alice,
                            vec![
                                leaf(
                                    "ABBC",
                                    order,
                                    vec![px(&a, 0), px(&half(&b), 0), px(&half(&b), 0), px(&c, 0)],
                                ),
                                baac(),
                            ],
                        ),
                    ],
                ),
                7 => choice(
                    alice,
                    vec![
                        abcb(),
                        leaf(
                            "BACA",
                            order,
                            vec![px(&b, 0), px(&c, 1), px(&c, 0), px(&(&a - &c), -1)],
                        ),
                    ],
                ),
                _ => return Err(Error::UnknownRange(range.to_string())),
            }
        }
        _ => return Err(Error::UnknownRange(range.to_string())),
    };
    Ok(game)
}

/// Audit trail of one solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveTranscript {
    /// Agent indices, richest first.
    pub order: Vec<usize>,
    pub range: Range,
    pub game: GameNode,
    pub execution: Execution,
    pub epsilon: Rational,
}

impl SolveTranscript {
    /// Recomputes the CE from the recorded execution.
    pub fn replay(&self, incomes: &IncomeVector) -> Result<CEPair> {
        let eps = resolve_epsilon(&self.execution.leaf, incomes)?;
        if eps != self.epsilon {
            return Err(Error::Internal("replayed epsilon differs".into()));
        }
        Ok(CEPair {
            prices: self.execution.prices_at(&eps)?,
            allocation: self.execution.allocation.clone(),
        })
    }
}

/// The unique range containing the incomes; errors unless exactly one
/// predicate holds.
pub fn select_range(m: usize, incomes: &IncomeVector) -> Result<Range> {
    let sorted = sorted_values(incomes);
    let hits: Vec<Range> = ranges(m, incomes.len())?
        .into_iter()
        .filter(|&r| in_range(r, &sorted))
        .collect();
    match hits.as_slice() {
        [r] => Ok(*r),
        _ => Err(Error::Internal(format!(
            "{} ranges match the incomes",
            hits.len()
        ))),
    }
}

/// Finds a CE for generic incomes by playing the range's game and keeping
/// the first subgame-perfect execution that passes verification.
pub fn solve(
    profile: &[PreferenceOrder],
    incomes: &IncomeVector,
) -> Result<(CEPair, SolveTranscript)> {
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
    if let Some(h) = violated_hyperplane(incomes, m)? {
        return Err(Error::NotGeneric(h));
    }
    let order = incomes.descending_order();
    let sorted = sorted_values(incomes);
    let range = select_range(m, incomes)?;
    let game = build_game(range, m, &order, &sorted)?;
    let (execution, ce) = execute_to_ce(&game, profile, incomes)?
        .into_iter()
        .next()
        .expect("execute_to_ce returns a non-empty list");
    debug_assert!(verify_ce(profile, incomes, &ce)?.valid());
    let epsilon = resolve_epsilon(&execution.leaf, incomes)?;
    Ok((
        ce,
        SolveTranscript {
            order,
            range,
            game,
            execution,
            epsilon,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn incomes(v: &[i64]) -> IncomeVector {
        IncomeVector::new(v.iter().map(|&t| int(t)).collect()).unwrap()
    }

    fn labels(hs: &[Hyperplane]) -> Vec<String> {
        hs.iter().map(|h| h.to_string()).collect()
    }

    #[test]
    fn hyperplane_lists() {
        assert_eq!(
            labels(&excluded_hyperplanes(3, 3).unwrap()),
            ["a = b", "b = c", "a = b + c"]
        );
        assert_eq!(
            labels(&excluded_hyperplanes(4, 2).unwrap()),
            ["a = b", "a = 2b"]
        );
        assert_eq!(
            labels(&excluded_hyperplanes(4, 3).unwrap()),
            [
                "a = b",
                "b = c",
                "a = 2b + c",
                "a = 2b",
                "a = b + c",
                "a + c = 2b",
                "a = 2c",
                "2c = b"
            ]
        );
        assert!(matches!(
            excluded_hyperplanes(4, 4),
            Err(Error::UnsupportedCase { .. })
        ));
        assert!(matches!(
            excluded_hyperplanes(5, 2),
            Err(Error::UnsupportedCase { .. })
        ));
    }

    #[test]
    fn genericity() {
        assert!(!is_generic(&incomes(&[5, 3, 2]), 3).unwrap());
        assert!(is_generic(&incomes(&[6, 3, 2]), 3).unwrap());
        assert!(!is_generic(&incomes(&[4, 2]), 4).unwrap());
        assert!(is_generic(&incomes(&[5, 2]), 4).unwrap());
        // Order of agents does not matter.
        assert!(!is_generic(&incomes(&[2, 5, 3]), 3).unwrap());
    }

    #[test]
    fn range_labels_parse() {
        assert_eq!(
            parse_range(4, 3, "Range5").unwrap().to_string(),
            "Alg3-Range5"
        );
        assert_eq!(parse_range(4, 2, "Alg2-Range2").unwrap().index, 2);
        assert!(parse_range(4, 3, "Range8").is_err());
    }

    #[test]
    fn range_four_uses_max_of_c_and_half_gap() {
        // 2b > a > b + c and 2b > a + c: a=13, b=8, c=2 -> p = max(2, 5/2).
        let t = incomes(&[13, 8, 2]);
        let r = select_range(4, &t).unwrap();
        assert_eq!(r.to_string(), "Alg3-Range4");
        let game = build_game(r, 4, &[0, 1, 2], &[int(13), int(8), int(2)]).unwrap();
        let baaa = game
            .leaves()
            .into_iter()
            .find(|p| p.label() == "BAAA")
            .unwrap()
            .clone();
        assert_eq!(baaa.turns()[2].price.constant, rat(5, 2));
    }
}
