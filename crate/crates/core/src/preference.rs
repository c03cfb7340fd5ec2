//! Strict monotone preference orders over bundles.
//!
//! An order is stored as an explicit rank table over all `2^m` bundles:
//! rank 0 is the empty bundle, rank `2^m - 1` the full set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{Bundle, ItemNames, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceOrder {
    m: usize,
    /// `rank[b.bits()]`; higher is better.
    rank: Vec<u32>,
    /// Bundles from worst to best.
    order: Vec<Bundle>,
}

impl PreferenceOrder {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rank(&self, b: Bundle) -> u32 {
        self.rank[b.bits() as usize]
    }

    /// `a ≻ b`.
    pub fn prefers(&self, a: Bundle, b: Bundle) -> bool {
        self.rank(a) > self.rank(b)
    }

    /// `a ⪰ b`.
    pub fn weakly_prefers(&self, a: Bundle, b: Bundle) -> bool {
        self.rank(a) >= self.rank(b)
    }

    /// Bundles from worst to best.
    pub fn ascending(&self) -> &[Bundle] {
        &self.order
    }

    /// Bundles strictly better than `b`, worst first.
    pub fn better_than(&self, b: Bundle) -> &[Bundle] {
        &self.order[self.rank(b) as usize + 1..]
    }

    pub fn best<I: IntoIterator<Item = Bundle>>(&self, bundles: I) -> Option<Bundle> {
        bundles.into_iter().max_by_key(|&b| self.rank(b))
    }

    pub fn worst<I: IntoIterator<Item = Bundle>>(&self, bundles: I) -> Option<Bundle> {
        bundles.into_iter().min_by_key(|&b| self.rank(b))
    }
}

fn check_item_count(m: usize) -> Result<()> {
    if (1..=MAX_ITEMS).contains(&m) {
        Ok(())
    } else {
        Err(Error::ItemCount(m))
    }
}

/// Builds an order from a worst-to-best listing of all `2^m` bundles.
pub fn make_preference(m: usize, ranking: &[Bundle]) -> Result<PreferenceOrder> {
    check_item_count(m)?;
    let size = 1usize << m;
    let mut rank = vec![u32::MAX; size];
    for (r, &b) in ranking.iter().enumerate() {
        b.check_universe(m)?;
        let slot = &mut rank[b.bits() as usize];
        if *slot != u32::MAX {
            return Err(Error::DuplicateBundle(b));
        }
        *slot = r as u32;
    }
    if let Some(bits) = rank.iter().position(|&r| r == u32::MAX) {
        return Err(Error::MissingBundle(Bundle::from_bits(bits as u16)));
    }
    // Checking immediate supersets suffices; monotonicity is transitive.
    for (r, &s) in ranking.iter().enumerate() {
        for i in 0..m {
            if s.contains(i) {
                continue;
            }
            let t = s.with(i);
            if (rank[t.bits() as usize] as usize) < r {
                return Err(Error::MonotonicityViolation {
                    subset: s,
                    superset: t,
                });
            }
        }
    }
    Ok(PreferenceOrder {
        m,
        rank,
        order: ranking.to_vec(),
    })
}

/// A set of bundles used on one side of a preference assertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleClass {
    Bundles(Vec<Bundle>),
    /// All bundles of the given cardinality, minus the listed exceptions.
    Size {
        size: usize,
        except: Vec<Bundle>,
    },
}

impl BundleClass {
    pub fn single(b: Bundle) -> Self {
        BundleClass::Bundles(vec![b])
    }

    pub fn expand(&self, m: usize) -> Vec<Bundle> {
        match self {
            BundleClass::Bundles(bs) => bs.clone(),
            BundleClass::Size { size, except } => Bundle::all(m)
                .filter(|b| b.len() == *size && !except.contains(b))
                .collect(),
        }
    }

    /// Parses `"quartets"`, `"triplets-except-xyz"`, `"size-2"`,
    /// `"vwx,vwy,vwz"` or a single bundle such as `"xy"`.
    pub fn parse(names: &ItemNames, text: &str) -> Option<BundleClass> {
        let text = text.trim();
        let (head, except) = match text.split_once("-except-") {
            Some((h, e)) => (h, Some(e)),
            None => (text, None),
        };
        let size = match head {
            "singletons" => Some(1),
            "pairs" => Some(2),
            "triplets" => Some(3),
            "quartets" => Some(4),
            "quintets" => Some(5),
            _ => head.strip_prefix("size-").and_then(|k| k.parse().ok()),
        };
        match size {
            Some(size) => {
                let except = match except {
                    Some(list) => list
                        .split(',')
                        .map(|b| names.parse(b))
                        .collect::<Option<Vec<_>>>()?,
                    None => Vec::new(),
                };
                Some(BundleClass::Size { size, except })
            }
            None if except.is_none() => text
                .split(',')
                .map(|b| names.parse(b))
                .collect::<Option<Vec<_>>>()
                .map(BundleClass::Bundles),
            None => None,
        }
    }
}

/// Pairwise strict preference assertions `better ≻ worse` over `m` items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRelations {
    m: usize,
    pairs: Vec<(Bundle, Bundle)>,
}

impl PartialRelations {
    pub fn new(m: usize) -> Self {
        PartialRelations {
            m,
            pairs: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pairs(&self) -> &[(Bundle, Bundle)] {
        &self.pairs
    }

    pub fn prefer(&mut self, better: Bundle, worse: Bundle) -> &mut Self {
        self.pairs.push((better, worse));
        self
    }

    /// Adds a chain `G1 > G2 > ... > Gk`: every bundle of `G_j` is preferred to
    /// every bundle of `G_{j+1}`. Bundles inside one group stay unordered.
    pub fn chain(&mut self, groups: &[BundleClass]) -> &mut Self {
        let expanded: Vec<Vec<Bundle>> = groups.iter().map(|g| g.expand(self.m)).collect();
        for w in expanded.windows(2) {
            for &better in &w[0] {
                for &worse in &w[1] {
                    self.pairs.push((better, worse));
                }
            }
        }
        self
    }

    /// Checks that `pref` satisfies every asserted pair; returns the first
    /// pair it violates.
    pub fn violated_by(&self, pref: &PreferenceOrder) -> Option<(Bundle, Bundle)> {
        self.pairs
            .iter()
            .copied()
            .find(|&(better, worse)| !pref.prefers(better, worse))
    }
}

/// Constraint graph over all bundles: an edge `u -> v` means `u` must be
/// ranked below `v`.
struct Lattice {
    m: usize,
    succ: Vec<Vec<u16>>,
    pred: Vec<Vec<u16>>,
}

impl Lattice {
    fn build(rel: &PartialRelations) -> Result<Self> {
        let m = rel.m;
        check_item_count(m)?;
        let size = 1usize << m;
        let mut succ = vec![Vec::new(); size];
        let mut pred = vec![Vec::new(); size];
        for b in Bundle::all(m) {
            for i in 0..m {
                if !b.contains(i) {
                    let t = b.with(i);
                    succ[b.bits() as usize].push(t.bits());
                    pred[t.bits() as usize].push(b.bits());
                }
            }
        }
        for &(better, worse) in &rel.pairs {
            better.check_universe(m)?;
            worse.check_universe(m)?;
            let (bw, bb) = (worse.bits(), better.bits());
            if !succ[bw as usize].contains(&bb) {
                succ[bw as usize].push(bb);
                pred[bb as usize].push(bw);
            }
        }
        Ok(Lattice { m, succ, pred })
    }

    /// Topological emission; `choose` picks the index of the next bundle
    /// among the currently available ones.
    fn linearize(&self, mut pick: impl FnMut(&mut Vec<u16>) -> u16) -> Result<Vec<Bundle>> {
        let size = 1usize << self.m;
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut avail: Vec<u16> = (0..size as u32)
            .filter(|&b| indeg[b as usize] == 0)
            .map(|b| b as u16)
            .collect();
        let mut order = Vec::with_capacity(size);
        while !avail.is_empty() {
            let b = pick(&mut avail);
            order.push(Bundle::from_bits(b));
            for &s in &self.succ[b as usize] {
                indeg[s as usize] -= 1;
                if indeg[s as usize] == 0 {
                    avail.push(s);
                }
            }
        }
        if order.len() < size {
            return Err(Error::CyclicRelations(self.find_cycle(&indeg)));
        }
        Ok(order)
    }

    fn find_cycle(&self, indeg: &[usize]) -> Vec<Bundle> {
        // Every unemitted node has an unemitted predecessor; walk backwards
        // until a node repeats.
        let start = indeg.iter().position(|&d| d > 0).expect("cycle exists") as u16;
        let mut seen: Vec<u16> = vec![start];
        let mut cur = start;
        loop {
            let prev = *self.pred[cur as usize]
                .iter()
                .find(|&&p| indeg[p as usize] > 0)
                .expect("blocked node has a blocked predecessor");
            if let Some(pos) = seen.iter().position(|&s| s == prev) {
                let mut cycle: Vec<Bundle> =
                    seen[pos..].iter().map(|&b| Bundle::from_bits(b)).collect();
                // Walked against the edges; report in "ranked below" order.
                cycle.reverse();
                return cycle;
            }
            seen.push(prev);
            cur = prev;
        }
    }
}

/// Deterministic monotone completion: repeatedly emits the available bundle
/// of smallest cardinality, ties broken by smallest encoding.
pub fn complete_partial(rel: &PartialRelations) -> Result<PreferenceOrder> {
    let lattice = Lattice::build(rel)?;
    let order = lattice.linearize(|avail| {
        let (idx, _) = avail
            .iter()
            .enumerate()
            .min_by_key(|&(_, &b)| (b.count_ones(), b))
            .expect("non-empty");
        avail.swap_remove(idx)
    })?;
    make_preference(rel.m, &order)
}

/// Random monotone completion of `rel`, deterministic in `seed`.
pub fn random_completion(rel: &PartialRelations, seed: u64) -> Result<PreferenceOrder> {
    let lattice = Lattice::build(rel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = lattice.linearize(|avail| {
        // Sort so the draw does not depend on push order.
        avail.sort_unstable();
        let idx = rng.gen_range(0..avail.len());
        avail.remove(idx)
    })?;
    make_preference(rel.m, &order)
}

/// Random strict monotone order: a random topological order of the subset
/// lattice (not uniform over linear extensions). Deterministic in `seed`.
pub fn random_preference(m: usize, seed: u64) -> Result<PreferenceOrder> {
    random_completion(&PartialRelations::new(m), seed)
}

/// Order induced by additive item values; all subset sums must differ.
pub fn additive_preference(m: usize, values: &[Rational]) -> Result<PreferenceOrder> {
    check_item_count(m)?;
    if values.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {m} items",
            values.len()
        )));
    }
    let mut valued: Vec<(Rational, Bundle)> = Bundle::all(m)
        .map(|b| (b.items().map(|i| values[i].clone()).sum(), b))
        .collect();
    valued.sort();
    for w in valued.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::TiedSubsetSums(w[0].1, w[1].1));
        }
    }
    let order: Vec<Bundle> = valued.into_iter().map(|(_, b)| b).collect();
    make_preference(m, &order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn b(items: &[usize]) -> Bundle {
        Bundle::from_items(items.iter().copied())
    }

    #[test]
    fn make_preference_accepts_valid() {
        let p = make_preference(1, &[b(&[]), b(&[0])]).unwrap();
        assert!(p.prefers(b(&[0]), Bundle::EMPTY));
        let p = make_preference(2, &[b(&[]), b(&[0]), b(&[1]), b(&[0, 1])]).unwrap();
        assert_eq!(p.rank(b(&[0, 1])), 3);
        assert_eq!(p.rank(Bundle::EMPTY), 0);
    }

    #[test]
    fn make_preference_rejects_superset_below_subset() {
        let err = make_preference(2, &[b(&[]), b(&[0, 1]), b(&[0]), b(&[1])]).unwrap_err();
        assert_eq!(
            err,
            Error::MonotonicityViolation {
                subset: b(&[0]),
                superset: b(&[0, 1])
            }
        );
    }

    #[test]
    fn make_preference_rejects_duplicates_and_gaps() {
        let err = make_preference(2, &[b(&[]), b(&[0]), b(&[0]), b(&[0, 1])]).unwrap_err();
        assert_eq!(err, Error::DuplicateBundle(b(&[0])));
        let err = make_preference(2, &[b(&[]), b(&[0]), b(&[0, 1])]).unwrap_err();
        assert_eq!(err, Error::MissingBundle(b(&[1])));
        assert!(matches!(
            make_preference(1, &[b(&[]), b(&[3])]),
            Err(Error::OutOfUniverse { .. })
        ));
    }

    #[test]
    fn completion_single_pair() {
        let mut rel = PartialRelations::new(2);
        rel.prefer(b(&[1]), b(&[0]));
        let p = complete_partial(&rel).unwrap();
        assert_eq!(p.ascending(), &[b(&[]), b(&[0]), b(&[1]), b(&[0, 1])]);
    }

    #[test]
    fn completion_detects_cycle_with_monotonicity() {
        let mut rel = PartialRelations::new(2);
        rel.prefer(b(&[0]), b(&[0, 1]));
        match complete_partial(&rel) {
            Err(Error::CyclicRelations(cycle)) => {
                assert_eq!(cycle.len(), 2);
                assert!(cycle.contains(&b(&[0])) && cycle.contains(&b(&[0, 1])));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn completion_of_alice_chain() {
        let names = ItemNames::new(["w", "x", "y", "z"]);
        let chain: Vec<BundleClass> = ["xy", "w", "xz", "yz", "x", "y", "z"]
            .iter()
            .map(|s| BundleClass::parse(&names, s).unwrap())
            .collect();
        let mut rel = PartialRelations::new(4);
        rel.chain(&chain);
        let p = complete_partial(&rel).unwrap();
        let ranks: Vec<u32> = ["xy", "w", "xz", "yz", "x", "y", "z"]
            .iter()
            .map(|s| p.rank(names.parse(s).unwrap()))
            .collect();
        assert!(ranks.windows(2).all(|w| w[0] > w[1]), "{ranks:?}");
        assert_eq!(rel.violated_by(&p), None);
    }

    #[test]
    fn additive_orders() {
        let p = additive_preference(4, &[int(11), int(7), int(5), int(3)]).unwrap();
        assert_eq!(*p.ascending().last().unwrap(), Bundle::full(4));
        // {x,y} = 12 beats {w} = 11
        assert!(p.prefers(b(&[1, 2]), b(&[0])));

        let err = additive_preference(2, &[int(1), int(1)]).unwrap_err();
        assert_eq!(err, Error::TiedSubsetSums(b(&[0]), b(&[1])));
    }

    #[test]
    fn additive_binary_counting() {
        // x=4, y=2, z=1: value of bundle == binary number xyz.
        let p = additive_preference(3, &[int(4), int(2), int(1)]).unwrap();
        let names = ItemNames::new(["x", "y", "z"]);
        let expect: Vec<Bundle> = ["∅", "z", "y", "yz", "x", "xz", "xy", "xyz"]
            .iter()
            .map(|s| names.parse(s).unwrap())
            .collect();
        assert_eq!(p.ascending(), expect.as_slice());
    }

    #[test]
    fn random_preference_deterministic() {
        let p = random_preference(1, 99).unwrap();
        assert_eq!(p.ascending(), &[b(&[]), b(&[0])]);
        assert_eq!(
            random_preference(3, 7).unwrap(),
            random_preference(3, 7).unwrap()
        );
    }

    #[test]
    fn class_parsing() {
        let names = ItemNames::new(["v", "w", "x", "y", "z"]);
        let c = BundleClass::parse(&names, "triplets-except-xyz").unwrap();
        assert_eq!(c.expand(5).len(), 9);
        let c = BundleClass::parse(&names, "vwx,vwy,vwz").unwrap();
        assert_eq!(c.expand(5).len(), 3);
        assert_eq!(
            BundleClass::parse(&names, "quartets")
                .unwrap()
                .expand(5)
                .len(),
            5
        );
        assert!(BundleClass::parse(&names, "pairs-except-qq").is_none());
    }
}
