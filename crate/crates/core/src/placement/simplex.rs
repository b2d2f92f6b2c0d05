//! Dense bounded-variable primal simplex.
//!
//! Solves max c.x subject to the model's rows and per-variable bounds (lower
//! bounds must be finite). Every row gets a logical column (slack for Le,
//! surplus for Ge). A starting basis is crashed from logicals and singleton
//! columns, and rows that still lack a feasible basic column get a phase-one
//! artificial.

use super::model::{MilpModel, Sense};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
/// Switch to Bland's rule after this many consecutive degenerate pivots.
const DEGENERATE_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values (empty unless optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    n: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    status: Vec<Status>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.n + j]
    }

    fn value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::AtLower => self.lb[j],
            Status::AtUpper => self.ub[j],
            Status::Basic => {
                let i = self.basis.iter().position(|&b| b == j).expect("basic column in basis");
                self.beta[i]
            }
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.n..(i + 1) * self.n];
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, q: usize, d: &mut [f64]) {
        let n = self.n;
        let piv = self.t[r * n + q];
        for j in 0..n {
            self.t[r * n + j] /= piv;
        }
        let (before, rest) = self.t.split_at_mut(r * n);
        let (prow, after) = rest.split_at_mut(n);
        for row in before.chunks_exact_mut(n).chain(after.chunks_exact_mut(n)) {
            let f = row[q];
            if f != 0.0 {
                for (a, p) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * p;
                }
                row[q] = 0.0;
            }
        }
        let f = d[q];
        if f != 0.0 {
            for (dj, p) in d.iter_mut().zip(prow.iter()) {
                *dj -= f * p;
            }
            d[q] = 0.0;
        }
    }

    /// Minimizes cost.x from the current basis. Returns false if unbounded.
    fn run(&mut self, cost: &[f64], limit: usize) -> Result<bool> {
        let mut d = self.reduced_costs(cost);
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= limit {
                return Err(Error::Internal("simplex iteration limit reached".into()));
            }
            let bland = degenerate >= DEGENERATE_LIMIT;
            let mut enter = None;
            let mut best = 0.0;
            for j in 0..self.n {
                let gain = match self.status[j] {
                    Status::AtLower if d[j] < -OPT_TOL && self.ub[j] > self.lb[j] => -d[j],
                    Status::AtUpper if d[j] > OPT_TOL && self.ub[j] > self.lb[j] => d[j],
                    _ => continue,
                };
                if bland {
                    enter = Some(j);
                    break;
                }
                if gain > best {
                    best = gain;
                    enter = Some(j);
                }
            }
            let Some(q) = enter else { return Ok(true) };
            let dir = if self.status[q] == Status::AtLower { 1.0 } else { -1.0 };

            // Ratio test; a bound flip of the entering column wins exact ties.
            let mut step = self.ub[q] - self.lb[q];
            let mut leave: Option<(usize, bool, f64)> = None;
            for i in 0..self.m {
                let alpha = dir * self.at(i, q);
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL {
                    ((self.beta[i] - self.lb[b]) / alpha).max(0.0)
                } else if alpha < -PIVOT_TOL && self.ub[b].is_finite() {
                    ((self.ub[b] - self.beta[i]) / -alpha).max(0.0)
                } else {
                    continue;
                };
                let take = if limit < step - 1e-12 {
                    true
                } else if limit <= step + 1e-12 {
                    match leave {
                        Some((li, _, la)) if bland => b < self.basis[li] || (b == self.basis[li] && alpha.abs() > la),
                        Some((_, _, la)) => alpha.abs() > la,
                        None => false,
                    }
                } else {
                    false
                };
                if take {
                    step = step.min(limit);
                    leave = Some((i, alpha > 0.0, alpha.abs()));
                }
            }
            if !step.is_finite() {
                return Ok(false);
            }
            self.iterations += 1;
            degenerate = if step <= 1e-12 { degenerate + 1 } else { 0 };

            for i in 0..self.m {
                let a = self.at(i, q);
                if a != 0.0 {
                    self.beta[i] -= dir * a * step;
                }
            }
            match leave {
                Some((r, to_lower, _)) => {
                    let entering = if dir > 0.0 { self.lb[q] + step } else { self.ub[q] - step };
                    let out = self.basis[r];
                    self.status[out] = if to_lower { Status::AtLower } else { Status::AtUpper };
                    self.status[q] = Status::Basic;
                    self.basis[r] = q;
                    self.beta[r] = entering;
                    self.pivot(r, q, &mut d);
                }
                None => {
                    self.status[q] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                }
            }
        }
    }
}

/// Solves the LP relaxation of `model` with bounds overridden by `lb`/`ub`.
pub fn solve_lp(model: &MilpModel, lb: &[f64], ub: &[f64]) -> Result<LpSolution> {
    let ns = model.vars.len();
    let m = model.rows.len();
    assert_eq!(lb.len(), ns);
    assert_eq!(ub.len(), ns);
    if lb.iter().zip(ub).any(|(l, u)| l > u) {
        return Ok(LpSolution { status: LpStatus::Infeasible, x: vec![], objective: f64::NAN, iterations: 0 });
    }

    // Column layout: structurals, one logical per non-Eq row, then artificials.
    let mut logical = vec![None; m];
    let mut n = ns;
    for (i, r) in model.rows.iter().enumerate() {
        if r.sense != Sense::Eq {
            logical[i] = Some(n);
            n += 1;
        }
    }
    let mut dense = vec![0.0; m * ns];
    let mut col_rows = vec![0usize; ns];
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, a) in &r.terms {
            dense[i * ns + j] += a;
        }
    }
    for i in 0..m {
        for j in 0..ns {
            if dense[i * ns + j] != 0.0 {
                col_rows[j] += 1;
            }
        }
    }

    let mut lbs = lb.to_vec();
    let mut ubs = ub.to_vec();
    lbs.resize(n, 0.0);
    ubs.resize(n, f64::INFINITY);
    let mut status = vec![Status::AtLower; n];
    for j in 0..ns {
        if !lb[j].is_finite() {
            return Err(Error::InvalidArgument(format!("variable {j} needs a finite lower bound")));
        }
    }

    // Residual with every structural at its lower bound.
    let resid: Vec<f64> = (0..m)
        .map(|i| model.rows[i].rhs - (0..ns).map(|j| dense[i * ns + j] * lbs[j]).sum::<f64>())
        .collect();

    let mut basis = vec![usize::MAX; m];
    let mut beta = vec![0.0; m];
    let mut pivot_coef = vec![1.0; m];
    let mut artificial_rows = Vec::new();
    let mut used = vec![false; ns];
    for i in 0..m {
        let r = resid[i];
        match (model.rows[i].sense, logical[i]) {
            (Sense::Le, Some(s)) if r >= 0.0 => {
                basis[i] = s;
                beta[i] = r;
                continue;
            }
            (Sense::Ge, Some(s)) if r <= 0.0 => {
                basis[i] = s;
                beta[i] = -r;
                pivot_coef[i] = -1.0;
                continue;
            }
            _ => {}
        }
        // Crash: a structural that lives only in this row and can absorb r.
        let crash = (0..ns).find(|&j| {
            let a = dense[i * ns + j];
            if used[j] || col_rows[j] != 1 || a == 0.0 {
                return false;
            }
            let v = lbs[j] + r / a;
            v >= lbs[j] && v <= ubs[j]
        });
        if let Some(j) = crash {
            used[j] = true;
            basis[i] = j;
            beta[i] = lbs[j] + r / dense[i * ns + j];
            pivot_coef[i] = dense[i * ns + j];
            continue;
        }
        artificial_rows.push(i);
    }
    let first_art = n;
    n += artificial_rows.len();
    lbs.resize(n, 0.0);
    ubs.resize(n, f64::INFINITY);
    status.resize(n, Status::AtLower);
    for (k, &i) in artificial_rows.iter().enumerate() {
        let col = first_art + k;
        basis[i] = col;
        beta[i] = resid[i].abs();
        pivot_coef[i] = if resid[i] < 0.0 { -1.0 } else { 1.0 };
    }

    // Build B^-1 A, which is a row scaling since B is diagonal.
    let mut t = vec![0.0; m * n];
    for i in 0..m {
        let row = &mut t[i * n..(i + 1) * n];
        row[..ns].copy_from_slice(&dense[i * ns..(i + 1) * ns]);
        if let Some(s) = logical[i] {
            row[s] = if model.rows[i].sense == Sense::Le { 1.0 } else { -1.0 };
        }
        let inv = 1.0 / pivot_coef[i];
        for v in row.iter_mut() {
            *v *= inv;
        }
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        t[i * n + first_art + k] = 1.0;
    }
    for &b in &basis {
        status[b] = Status::Basic;
    }

    let mut tab = Tableau { m, n, t, beta, basis, status, lb: lbs, ub: ubs, iterations: 0 };
    let limit = 200 * (m + n) + 1000;

    if !artificial_rows.is_empty() {
        let mut cost = vec![0.0; n];
        for c in cost.iter_mut().skip(first_art) {
            *c = 1.0;
        }
        tab.run(&cost, limit)?;
        let infeas: f64 = (first_art..n).map(|j| tab.value(j)).sum();
        if infeas > FEAS_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![],
                objective: f64::NAN,
                iterations: tab.iterations,
            });
        }
        for j in first_art..n {
            tab.ub[j] = 0.0;
        }
    }

    let mut cost = vec![0.0; n];
    for (j, v) in model.vars.iter().enumerate() {
        cost[j] = -v.obj;
    }
    if !tab.run(&cost, limit)? {
        return Ok(LpSolution { status: LpStatus::Unbounded, x: vec![], objective: f64::INFINITY, iterations: tab.iterations });
    }
    let mut x = vec![0.0; ns];
    for (j, v) in x.iter_mut().enumerate() {
        *v = match tab.status[j] {
            Status::AtLower => tab.lb[j],
            Status::AtUpper => tab.ub[j],
            Status::Basic => 0.0,
        };
    }
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < ns {
            x[b] = tab.beta[i];
        }
    }
    let objective = model.objective(&x);
    Ok(LpSolution { status: LpStatus::Optimal, x, objective, iterations: tab.iterations })
}
