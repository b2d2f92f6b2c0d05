use serde::{Deserialize, Serialize};

use super::problem::CoverageProblem;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarRole {
    /// y_c: candidate c is used.
    Placement(usize),
    /// z_p: grid point p is counted as covered.
    Coverage(usize),
    Slack,
    Surplus,
    Artificial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub role: VarRole,
    pub integer: bool,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Linking(usize),
    Cardinality,
    UpperBound(usize),
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub kind: RowKind,
}

/// Maximization MILP: max obj.x subject to rows and variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub vars: Vec<Variable>,
    pub rows: Vec<Constraint>,
    /// Penalty on artificial variables. `None` means derive one per row.
    pub big_m: Option<f64>,
    pub standard_form: bool,
    /// The coverage instance this model encodes, if any.
    pub problem: Option<CoverageProblem>,
}

impl MilpModel {
    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.integer && v.lb == 0.0 && v.ub == 1.0).count()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, xi)| v.obj * xi).sum()
    }

    /// Column of the placement variable for candidate c.
    pub fn placement_columns(&self) -> Vec<usize> {
        let mut cols: Vec<(usize, usize)> = self
            .vars
            .iter()
            .enumerate()
            .filter_map(|(j, v)| match v.role {
                VarRole::Placement(c) => Some((c, j)),
                _ => None,
            })
            .collect();
        cols.sort_unstable();
        cols.into_iter().map(|(_, j)| j).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            if !r.rhs.is_finite() {
                return invalid(format!("row {i} has a non-finite right-hand side"));
            }
            if let Some(&(j, a)) = r.terms.iter().find(|(j, a)| *j >= self.vars.len() || !a.is_finite()) {
                return invalid(format!("row {i} has a bad term ({j}, {a})"));
            }
        }
        for (j, v) in self.vars.iter().enumerate() {
            if !(v.lb.is_finite() && v.lb <= v.ub && v.obj.is_finite()) {
                return invalid(format!("variable {j} has inconsistent bounds or objective"));
            }
        }
        Ok(())
    }
}

/// Max-coverage MILP: max sum phi_p z_p, z_p <= sum_{c covers p} y_c, sum y_c <= k.
pub fn build_mpc(problem: &CoverageProblem) -> Result<MilpModel> {
    problem.validate()?;
    let nc = problem.candidates.len();
    let np = problem.grid.len();
    let mut vars = Vec::with_capacity(nc + np);
    for c in 0..nc {
        vars.push(Variable { role: VarRole::Placement(c), integer: true, lb: 0.0, ub: 1.0, obj: 0.0 });
    }
    for (p, &w) in problem.weights().iter().enumerate() {
        vars.push(Variable { role: VarRole::Coverage(p), integer: true, lb: 0.0, ub: 1.0, obj: w });
    }
    let mut rows = Vec::with_capacity(np + 1);
    for p in 0..np {
        let mut terms: Vec<(usize, f64)> = (0..nc)
            .filter(|&c| problem.candidates[c].covered[p])
            .map(|c| (c, 1.0))
            .collect();
        terms.push((nc + p, -1.0));
        rows.push(Constraint { terms, sense: Sense::Ge, rhs: 0.0, kind: RowKind::Linking(p) });
    }
    rows.push(Constraint {
        terms: (0..nc).map(|c| (c, 1.0)).collect(),
        sense: Sense::Le,
        rhs: problem.k as f64,
        kind: RowKind::Cardinality,
    });
    Ok(MilpModel { vars, rows, big_m: None, standard_form: false, problem: Some(problem.clone()) })
}

/// Largest value any feasible assignment can give the objective, at least 1.
fn objective_range(model: &MilpModel) -> Result<f64> {
    let mut total = 0.0;
    for (j, v) in model.vars.iter().enumerate() {
        if v.obj != 0.0 {
            let span = v.lb.abs().max(v.ub.abs());
            if !span.is_finite() {
                return invalid(format!("variable {j} has an objective term but an infinite bound"));
            }
            total += v.obj.abs() * span;
        }
    }
    Ok(total.max(1.0))
}

/// Per-row penalty bound: 1 + R * sum |a_ij| with R the objective range.
pub fn derived_big_m(model: &MilpModel) -> Result<Vec<f64>> {
    let range = objective_range(model)?;
    let mut out: Vec<f64> =
        model.rows.iter().map(|r| 1.0 + range * r.terms.iter().map(|(_, a)| a.abs()).sum::<f64>()).collect();
    for v in &model.vars {
        if v.ub.is_finite() {
            out.push(1.0 + range);
        }
    }
    Ok(out)
}

/// Equality form with nonnegative right-hand sides. Le rows gain a slack,
/// Ge rows a surplus plus an artificial, Eq rows an artificial; finite upper
/// bounds become explicit rows. Artificials carry an objective of -M.
pub fn big_m_standard_form(model: &MilpModel) -> Result<MilpModel> {
    model.validate()?;
    if model.standard_form {
        return Ok(model.clone());
    }
    if let Some(j) = model.vars.iter().position(|v| v.lb != 0.0) {
        return invalid(format!("variable {j} needs a zero lower bound for standard form"));
    }
    let derived = derived_big_m(model)?;
    let bound = derived.iter().cloned().fold(0.0, f64::max);
    let penalties: Vec<f64> = match model.big_m {
        Some(m) if !(m > bound) => {
            return invalid(format!("big M {m} must exceed the derived bound {bound}"));
        }
        Some(m) => vec![m; derived.len()],
        None => derived,
    };

    let mut vars: Vec<Variable> = model.vars.iter().map(|v| Variable { ub: f64::INFINITY, ..v.clone() }).collect();
    let mut rows = Vec::new();
    let mut source: Vec<Constraint> = model.rows.clone();
    for (j, v) in model.vars.iter().enumerate() {
        if v.ub.is_finite() {
            source.push(Constraint { terms: vec![(j, 1.0)], sense: Sense::Le, rhs: v.ub, kind: RowKind::UpperBound(j) });
        }
    }
    let push_var = |vars: &mut Vec<Variable>, role, obj| {
        vars.push(Variable { role, integer: false, lb: 0.0, ub: f64::INFINITY, obj });
        vars.len() - 1
    };
    for (row, penalty) in source.into_iter().zip(penalties) {
        let (mut terms, mut sense, mut rhs) = (row.terms, row.sense, row.rhs);
        if rhs < 0.0 {
            for t in terms.iter_mut() {
                t.1 = -t.1;
            }
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        match sense {
            Sense::Le => {
                let s = push_var(&mut vars, VarRole::Slack, 0.0);
                terms.push((s, 1.0));
            }
            Sense::Ge => {
                let e = push_var(&mut vars, VarRole::Surplus, 0.0);
                let a = push_var(&mut vars, VarRole::Artificial, -penalty);
                terms.push((e, -1.0));
                terms.push((a, 1.0));
            }
            Sense::Eq => {
                let a = push_var(&mut vars, VarRole::Artificial, -penalty);
                terms.push((a, 1.0));
            }
        }
        rows.push(Constraint { terms, sense: Sense::Eq, rhs, kind: row.kind });
    }
    Ok(MilpModel { vars, rows, big_m: model.big_m, standard_form: true, problem: model.problem.clone() })
}
