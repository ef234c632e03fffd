//! Exact Fourier-Motzkin elimination for small systems of strict and
//! non-strict linear inequalities over the rationals.

use std::collections::BTreeMap;

use crate::local_arith::Rat;

/// `coeffs . x <= rhs`, or `<` when `strict`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub strict: bool,
}

impl Inequality {
    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// A constant row `0 <= rhs` (or `0 < rhs`) holds.
    fn constant_holds(&self) -> bool {
        if self.strict {
            self.rhs.is_positive()
        } else {
            !self.rhs.is_negative()
        }
    }

    /// Scale so the first nonzero coefficient has absolute value 1.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(Rat::abs) {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &lead;
            }
            self.rhs = &self.rhs / &lead;
        }
        self
    }
}

/// A conjunction of linear inequalities in a fixed number of variables.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    vars: usize,
    rows: Vec<Inequality>,
    infeasible: bool,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        LinearSystem { vars, rows: Vec::new(), infeasible: false }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    fn push(&mut self, coeffs: Vec<Rat>, rhs: Rat, strict: bool) {
        assert_eq!(coeffs.len(), self.vars, "coefficient count");
        let row = Inequality { coeffs, rhs, strict };
        if row.is_constant() {
            if !row.constant_holds() {
                self.infeasible = true;
            }
            return;
        }
        self.rows.push(row.normalized());
    }

    pub fn le(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        self.push(coeffs, rhs, false);
    }

    pub fn lt(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        self.push(coeffs, rhs, true);
    }

    pub fn ge(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        self.push(coeffs.into_iter().map(|c| -c).collect(), -rhs, false);
    }

    pub fn gt(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        self.push(coeffs.into_iter().map(|c| -c).collect(), -rhs, true);
    }

    pub fn eq(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        self.ge(coeffs.clone(), rhs.clone());
        self.le(coeffs, rhs);
    }

    /// Remove redundant copies, keeping the tightest bound per direction.
    fn dedup(&mut self) {
        let mut best: BTreeMap<Vec<Rat>, (Rat, bool)> = BTreeMap::new();
        for row in self.rows.drain(..) {
            match best.get_mut(&row.coeffs) {
                Some((rhs, strict)) => {
                    if row.rhs < *rhs || (row.rhs == *rhs && row.strict) {
                        *rhs = row.rhs;
                        *strict = row.strict;
                    }
                }
                None => {
                    best.insert(row.coeffs, (row.rhs, row.strict));
                }
            }
        }
        self.rows = best
            .into_iter()
            .map(|(coeffs, (rhs, strict))| Inequality { coeffs, rhs, strict })
            .collect();
    }

    /// The system with `var` eliminated; the variable keeps its index but
    /// no longer occurs in any row.
    pub fn eliminate(&self, var: usize) -> LinearSystem {
        let mut out = LinearSystem::new(self.vars);
        out.infeasible = self.infeasible;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for row in &self.rows {
            let c = &row.coeffs[var];
            if c.is_positive() {
                pos.push(row);
            } else if c.is_negative() {
                neg.push(row);
            } else {
                out.rows.push(row.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                let a = &p.coeffs[var];
                let b = -&q.coeffs[var];
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&q.coeffs)
                    .map(|(x, y)| x * &b + y * a)
                    .collect();
                let rhs = &p.rhs * &b + &q.rhs * a;
                out.push(coeffs, rhs, p.strict || q.strict);
            }
        }
        for row in out.rows.iter_mut() {
            row.coeffs[var] = Rat::zero();
        }
        out.dedup();
        out
    }

    fn occurs(&self, var: usize) -> bool {
        self.rows.iter().any(|r| !r.coeffs[var].is_zero())
    }

    /// Eliminate every variable not in `keep`, cheapest first.
    pub fn project(&self, keep: &[usize]) -> LinearSystem {
        let mut sys = self.clone();
        sys.dedup();
        loop {
            if sys.infeasible {
                return sys;
            }
            let cost = |v: usize| {
                let p = sys.rows.iter().filter(|r| r.coeffs[v].is_positive()).count();
                let n = sys.rows.iter().filter(|r| r.coeffs[v].is_negative()).count();
                p * n
            };
            let next = (0..sys.vars)
                .filter(|v| !keep.contains(v) && sys.occurs(*v))
                .min_by_key(|&v| (cost(v), v));
            match next {
                Some(v) => sys = sys.eliminate(v),
                None => return sys,
            }
        }
    }

    pub fn is_feasible(&self) -> bool {
        !self.project(&[]).infeasible
    }

    /// True once some elimination step has produced a violated constant row.
    pub fn is_trivially_infeasible(&self) -> bool {
        self.infeasible
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn interval_feasibility() {
        let mut s = LinearSystem::new(1);
        s.ge(v(&[1]), r(0));
        s.le(v(&[1]), r(1));
        assert!(s.is_feasible());
        let mut t = s.clone();
        t.ge(v(&[1]), r(2));
        assert!(!t.is_feasible());
    }

    #[test]
    fn strictness_matters_at_a_single_point() {
        let mut s = LinearSystem::new(1);
        s.ge(v(&[1]), r(1));
        s.le(v(&[1]), r(1));
        assert!(s.is_feasible());
        let mut t = LinearSystem::new(1);
        t.gt(v(&[1]), r(1));
        t.le(v(&[1]), r(1));
        assert!(!t.is_feasible());
    }

    #[test]
    fn triangle_projection() {
        // x >= 0, y >= 0, x + y <= 2; projecting onto x gives 0 <= x <= 2
        let mut s = LinearSystem::new(2);
        s.ge(v(&[1, 0]), r(0));
        s.ge(v(&[0, 1]), r(0));
        s.le(v(&[1, 1]), r(2));
        let proj = s.project(&[0]);
        let mut bounds: Vec<(Rat, Rat)> =
            proj.rows().iter().map(|row| (row.coeffs[0].clone(), row.rhs.clone())).collect();
        bounds.sort();
        assert_eq!(bounds, vec![(r(-1), r(0)), (r(1), r(2))]);
    }

    #[test]
    fn equalities_pin_a_point() {
        let mut s = LinearSystem::new(2);
        s.eq(v(&[1, 1]), r(3));
        s.eq(v(&[1, -1]), r(1));
        let mut t = s.clone();
        t.gt(v(&[1, 0]), r(2));
        assert!(s.is_feasible());
        assert!(!t.is_feasible());
    }
}
