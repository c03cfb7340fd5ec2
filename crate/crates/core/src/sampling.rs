//! Deterministic rational income sampling inside open polyhedral regions.

use num::{BigInt, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::IncomeVector;
use crate::rational::{int, Rational};

/// The open half-space `Σ coeffs[i]·t_i > 0`, indexed by agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        LinearConstraint { coeffs }
    }

    /// `lhs > rhs`, both given as integer weight vectors.
    pub fn greater(lhs: &[i64], rhs: &[i64]) -> Self {
        assert_eq!(lhs.len(), rhs.len());
        LinearConstraint {
            coeffs: lhs.iter().zip(rhs).map(|(l, r)| int(l - r)).collect(),
        }
    }

    pub fn value(&self, incomes: &[Rational]) -> Rational {
        self.coeffs.iter().zip(incomes).map(|(c, t)| c * t).sum()
    }

    pub fn holds(&self, incomes: &[Rational]) -> bool {
        self.value(incomes).is_positive()
    }
}

/// An open region of income space given by strict linear constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub dim: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl Region {
    pub fn new(dim: usize, constraints: Vec<LinearConstraint>) -> Self {
        assert!(constraints.iter().all(|c| c.coeffs.len() == dim));
        Region { dim, constraints }
    }

    /// Parses a chain such as `"2b > 2c > b+d > a"` over agents named
    /// `a, b, c, …`; each `>` yields one constraint.
    pub fn parse_chain(dim: usize, chain: &str) -> Option<Self> {
        let sides: Vec<Vec<i64>> = chain
            .split('>')
            .map(|side| parse_linear(dim, side))
            .collect::<Option<_>>()?;
        if sides.len() < 2 {
            return None;
        }
        let constraints = sides
            .windows(2)
            .map(|w| LinearConstraint::greater(&w[0], &w[1]))
            .collect();
        Some(Region::new(dim, constraints))
    }

    pub fn contains(&self, incomes: &[Rational]) -> bool {
        incomes.len() == self.dim
            && incomes.iter().all(|t| t.is_positive())
            && self.constraints.iter().all(|c| c.holds(incomes))
    }
}

/// `"2b + d"` -> weights over agents `a, b, c, …`.
fn parse_linear(dim: usize, text: &str) -> Option<Vec<i64>> {
    let mut w = vec![0i64; dim];
    for term in text.split('+') {
        let term = term.trim();
        let split = term.find(|c: char| c.is_ascii_alphabetic())?;
        let (coef, var) = term.split_at(split);
        let coef: i64 = if coef.trim().is_empty() {
            1
        } else {
            coef.trim().parse().ok()?
        };
        let mut chars = var.chars();
        let v = chars.next()?;
        if chars.next().is_some() {
            return None;
        }
        let k = (v as u8).checked_sub(b'a')? as usize;
        *w.get_mut(k)? += coef;
    }
    Some(w)
}

/// Rejection sampler on the grid `{k / grid : 1 ≤ k ≤ upper·grid}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSampler {
    pub upper: u64,
    pub grid: u64,
    /// Draws allowed per requested sample.
    pub attempts_per_sample: usize,
}

impl Default for GridSampler {
    fn default() -> Self {
        GridSampler {
            upper: 1,
            grid: 10_000,
            attempts_per_sample: 200_000,
        }
    }
}

impl GridSampler {
    fn draw(&self, rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
        let top = self.upper * self.grid;
        (0..dim)
            .map(|_| {
                let k = rng.gen_range(1..=top);
                Rational::new(BigInt::from(k), BigInt::from(self.grid))
            })
            .collect()
    }

    /// `count` points accepted by `accept`, deterministic in `seed`.
    pub fn sample_with(
        &self,
        dim: usize,
        seed: u64,
        count: usize,
        mut accept: impl FnMut(&[Rational]) -> bool,
    ) -> Result<Vec<IncomeVector>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            if attempts == self.attempts_per_sample * count.max(1) {
                return Err(Error::EmptyRegionSampler(attempts));
            }
            attempts += 1;
            let point = self.draw(&mut rng, dim);
            if accept(&point) {
                out.push(IncomeVector::new(point)?);
            }
        }
        Ok(out)
    }

    pub fn sample(&self, region: &Region, seed: u64, count: usize) -> Result<Vec<IncomeVector>> {
        self.sample_with(region.dim, seed, count, |p| region.contains(p))
    }
}

/// `n` grid incomes in `(0, 1]` with no further constraint.
pub fn random_incomes(n: usize, seed: u64) -> IncomeVector {
    GridSampler::default()
        .sample_with(n, seed, 1, |_| true)
        .expect("unconstrained sampling always succeeds")
        .remove(0)
}
