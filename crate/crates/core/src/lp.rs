//! Exact phase-one simplex for linear feasibility.
//!
//! Finds a point `x ≥ 0` satisfying a list of linear constraints, or proves
//! that none exists. Arithmetic is exact for rational scalars; pivoting uses
//! Bland's rule, so the method terminates without anti-cycling tricks.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint<Q> {
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
}

impl<Q: Scalar> Constraint<Q> {
    pub fn new(coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn is_satisfied_by(&self, x: &[Q]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .fold(Q::zero(), |acc, (j, c)| acc + c.clone() * x[*j].clone());
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Returns a nonnegative point satisfying every constraint, if one exists.
pub fn find_feasible<Q: Scalar>(num_vars: usize, constraints: &[Constraint<Q>]) -> Option<Vec<Q>> {
    let m = constraints.len();
    if m == 0 {
        return Some(vec![Q::zero(); num_vars]);
    }
    // Columns: structural, then one slack/surplus per inequality, then one
    // artificial per row. Last entry of each row is the right-hand side.
    let n_slack = constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let art0 = num_vars + n_slack;
    let width = art0 + m + 1;
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m);
    let mut slack = num_vars;
    for (r, c) in constraints.iter().enumerate() {
        let mut row = vec![Q::zero(); width];
        for (j, a) in &c.coeffs {
            row[*j] = row[*j].clone() + a.clone();
        }
        match c.relation {
            Relation::Le => {
                row[slack] = Q::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Q::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[width - 1] = c.rhs.clone();
        if c.rhs.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[art0 + r] = Q::one();
        rows.push(row);
    }
    let mut basis: Vec<usize> = (art0..art0 + m).collect();

    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![Q::zero(); width];
    for j in 0..width {
        if (art0..art0 + m).contains(&j) {
            continue;
        }
        cost[j] = rows.iter().fold(Q::zero(), |acc, row| acc - row[j].clone());
    }

    loop {
        let entering = (0..width - 1).find(|&j| cost[j].is_negative());
        let Some(e) = entering else { break };
        let mut leaving: Option<(usize, Q)> = None;
        for (r, row) in rows.iter().enumerate() {
            if row[e] > Q::zero() {
                let ratio = row[width - 1].clone() / row[e].clone();
                let better = match &leaving {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        // The phase-one objective is bounded below by zero.
        let (pr, _) = leaving.expect("phase-one objective is bounded");
        let pivot = rows[pr][e].clone();
        for v in rows[pr].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        let pivot_row = rows[pr].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pr && !row[e].is_zero() {
                let f = row[e].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        let f = cost[e].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * p.clone();
        }
        basis[pr] = e;
    }

    let residual = basis
        .iter()
        .zip(&rows)
        .filter(|(b, _)| **b >= art0)
        .fold(Q::zero(), |acc, (_, row)| acc + row[width - 1].clone());
    if !residual.is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); num_vars];
    for (b, row) in basis.iter().zip(&rows) {
        if *b < num_vars {
            x[*b] = row[width - 1].clone();
        }
    }
    Some(x)
}
