//! Named instances without a CE, and income samplers stratified by range.
//!
//! Items are indexed in the listed order: `w, x, y, z` for the four-item
//! instance and `v, w, x, y, z` for the five-item one. Agents are Alice,
//! Bob, Carl, Dana with incomes `a, b, c, d`.

use crate::bundle::{Bundle, ItemNames};
use crate::cefai::{in_range, is_generic, parse_range};
use crate::error::Result;
use crate::market::IncomeVector;
use crate::preference::{
    complete_partial, random_completion, BundleClass, PartialRelations, PreferenceOrder,
};
use crate::rational::{int, rat, Rational};
use crate::sampling::{GridSampler, LinearConstraint, Region};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedInstance {
    pub label: String,
    pub items: ItemNames,
    pub agents: Vec<String>,
    /// Asserted preference pairs per agent; everything else is free.
    pub relations: Vec<PartialRelations>,
    pub region: Region,
    pub reference: IncomeVector,
}

impl NamedInstance {
    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    /// Deterministic completion of every agent's relations.
    pub fn profile(&self) -> Result<Vec<PreferenceOrder>> {
        self.relations.iter().map(complete_partial).collect()
    }

    /// Random completion; agent `i` uses seed `seed·n + i`.
    pub fn random_profile(&self, seed: u64) -> Result<Vec<PreferenceOrder>> {
        let n = self.relations.len() as u64;
        self.relations
            .iter()
            .enumerate()
            .map(|(i, r)| random_completion(r, seed.wrapping_mul(n).wrapping_add(i as u64)))
            .collect()
    }

    /// Agent and pair violating the asserted relations, if any.
    pub fn violation(&self, profile: &[PreferenceOrder]) -> Option<(usize, (Bundle, Bundle))> {
        self.relations
            .iter()
            .zip(profile)
            .enumerate()
            .find_map(|(i, (rel, p))| rel.violated_by(p).map(|v| (i, v)))
    }
}

fn classes(names: &ItemNames, groups: &[&str]) -> Vec<BundleClass> {
    groups
        .iter()
        .map(|g| BundleClass::parse(names, g).expect("built-in class"))
        .collect()
}

fn chain(names: &ItemNames, groups: &[&str]) -> PartialRelations {
    let mut rel = PartialRelations::new(names.len());
    rel.chain(&classes(names, groups));
    rel
}

/// Four items, four agents; no CE on the region
/// `2b > 2c > b+d > a > c+d > 2d > b > c > d`.
pub fn counterexample_4x4() -> NamedInstance {
    let items = ItemNames::new(["w", "x", "y", "z"]);
    let relations = vec![
        chain(&items, &["xy", "w", "xz", "yz", "x", "y", "z"]),
        chain(&items, &["w", "z", "x", "y"]),
        chain(&items, &["x", "y", "w", "z"]),
        PartialRelations::new(4),
    ];
    let region =
        Region::parse_chain(4, "2b > 2c > b+d > a > c+d > 2d > b > c > d").expect("valid chain");
    NamedInstance {
        label: "four-items-four-agents".into(),
        items,
        agents: ["Alice", "Bob", "Carl", "Dana"].map(String::from).to_vec(),
        relations,
        region,
        reference: IncomeVector::new(vec![rat(27, 2), int(9), int(8), int(5)]).expect("positive"),
    }
}

/// Five items, two agents; no CE on the region `a > b > 3a/4`.
pub fn counterexample_5x2() -> NamedInstance {
    let items = ItemNames::new(["v", "w", "x", "y", "z"]);
    let relations = vec![
        chain(
            &items,
            &[
                "quartets",
                "vwx,vwy,vwz",
                "vw",
                "xyz",
                "vxy,vxz,vyz,wxy,wxz,wyz",
                "pairs-except-vw",
                "singletons",
            ],
        ),
        chain(
            &items,
            &[
                "quartets",
                "triplets-except-xyz",
                "vx,vy,vz,wx,wy,wz",
                "xyz",
                "vw",
                "v",
                "w",
                "xy,xz,yz",
                "x,y,z",
            ],
        ),
    ];
    let region = Region::new(
        2,
        vec![
            LinearConstraint::greater(&[1, 0], &[0, 1]),
            LinearConstraint::greater(&[0, 4], &[3, 0]),
        ],
    );
    NamedInstance {
        label: "five-items-two-agents".into(),
        items,
        agents: ["Alice", "Bob"].map(String::from).to_vec(),
        relations,
        region,
        reference: IncomeVector::new(vec![int(1), rat(4, 5)]).expect("positive"),
    }
}

/// `count` incomes in `(0, 1]` that are generic for `(m, n)` and fall in
/// the named range (`"Range3"` or `"Alg3-Range3"`). Agent order is random.
pub fn stratified_incomes(
    m: usize,
    n: usize,
    range_label: &str,
    seed: u64,
    count: usize,
) -> Result<Vec<IncomeVector>> {
    let range = parse_range(m, n, range_label)?;
    GridSampler::default().sample_with(n, seed, count, |point| {
        let mut sorted: Vec<Rational> = point.to_vec();
        sorted.sort_unstable_by(|x, y| y.cmp(x));
        if !in_range(range, &sorted) {
            return false;
        }
        let t = IncomeVector::new(point.to_vec()).expect("grid points are positive");
        is_generic(&t, m).unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::additive_preference;

    #[test]
    fn reference_points_lie_in_regions() {
        for inst in [counterexample_4x4(), counterexample_5x2()] {
            assert!(
                inst.region.contains(inst.reference.as_slice()),
                "{}",
                inst.label
            );
        }
    }

    #[test]
    fn completions_respect_relations() {
        for inst in [counterexample_4x4(), counterexample_5x2()] {
            let p = inst.profile().unwrap();
            assert_eq!(inst.violation(&p), None);
            for seed in 0..5 {
                let p = inst.random_profile(seed).unwrap();
                assert_eq!(inst.violation(&p), None);
            }
        }
    }

    #[test]
    fn alice_additive_values_fit_her_relations() {
        let inst = counterexample_4x4();
        let alice = additive_preference(4, &[int(11), int(7), int(5), int(3)]).unwrap();
        assert_eq!(inst.relations[0].violated_by(&alice), None);
    }

    #[test]
    fn quintet_on_top() {
        let inst = counterexample_5x2();
        for p in inst.profile().unwrap() {
            assert_eq!(p.ascending().last(), Some(&Bundle::full(5)));
        }
    }

    #[test]
    fn stratified_range_one() {
        let xs = stratified_incomes(4, 3, "Range1", 3, 10).unwrap();
        for t in xs {
            let mut s: Vec<Rational> = t.as_slice().to_vec();
            s.sort_unstable_by(|x, y| y.cmp(x));
            assert!(s[0] > &s[1] * int(2) + &s[2]);
        }
    }
}
