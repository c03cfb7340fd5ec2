//! Exact two-phase simplex over rationals.
//!
//! Dense tableau with Bland's rule, so it always terminates. Sized for the
//! oracle's programs: a handful of variables and a few dozen rows.

use num::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram {
            num_vars,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau {
    /// Each row is `[coefficients…, rhs]`.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    num_vars: usize,
    width: usize,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let slack_count = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let artificial_count = lp
            .constraints
            .iter()
            .filter(|c| {
                let flip = c.rhs.is_negative();
                match c.relation {
                    Relation::Eq => true,
                    Relation::Le => flip,
                    Relation::Ge => !flip,
                }
            })
            .count();
        let width = n + slack_count + artificial_count + 1;
        let first_artificial = n + slack_count;
        let mut rows = Vec::with_capacity(lp.constraints.len());
        let mut basis = Vec::with_capacity(lp.constraints.len());
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let sign = |x: &Rational| if flip { -x.clone() } else { x.clone() };
            let mut row = vec![Rational::zero(); width];
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = sign(a);
            }
            row[width - 1] = sign(&c.rhs);
            let relation = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match relation {
                Relation::Le => {
                    row[next_slack] = Rational::from_integer(1.into());
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = Rational::from_integer((-1).into());
                    next_slack += 1;
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            num_vars: n,
            width,
            first_artificial,
        }
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, obj: &mut [Rational], r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        // The objective row holds reduced costs; its rhs slot holds the
        // negated objective value.
        let f = obj[col].clone();
        if !f.is_zero() {
            for (x, y) in obj.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Runs simplex iterations over columns `< limit`.
    fn iterate(&mut self, obj: &mut [Rational], limit: usize) -> Step {
        let rhs = self.rhs_col();
        loop {
            let Some(col) = (0..limit).find(|&j| obj[j].is_positive()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Step::Unbounded,
                Some((r, _)) => self.pivot(obj, r, col),
            }
        }
    }

    fn solve(mut self, objective: &[Rational]) -> LpOutcome {
        let width = self.width;
        let rhs = self.rhs_col();
        // Phase 1: maximize minus the sum of artificials.
        let mut obj = vec![Rational::zero(); width];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b >= self.first_artificial {
                for j in 0..self.first_artificial {
                    obj[j] += &row[j];
                }
                obj[rhs] += &row[rhs];
            }
        }
        if let Step::Unbounded = self.iterate(&mut obj, self.first_artificial) {
            unreachable!("phase one is bounded");
        }
        if obj[rhs].is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis or drop their rows.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(col) => {
                        self.pivot(&mut obj, r, col);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        // Phase 2 objective in terms of the nonbasic columns.
        let mut obj = vec![Rational::zero(); width];
        for (j, c) in objective.iter().enumerate() {
            obj[j] = c.clone();
        }
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_vars && !objective[b].is_zero() {
                let c = objective[b].clone();
                for (x, y) in obj.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        if let Step::Unbounded = self.iterate(&mut obj, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Rational::zero(); self.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_vars {
                point[b] = row[rhs].clone();
            }
        }
        let value = objective.iter().zip(&point).map(|(c, x)| c * x).sum();
        LpOutcome::Optimal { value, point }
    }
}
