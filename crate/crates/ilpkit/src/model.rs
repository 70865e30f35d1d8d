//! The 0-1 ILP model: variables, linear rows, objective, and serialization.
//!
//! A model owns its variable namespace. Encoding layers append rows tagged
//! with the recipe that produced them, which keeps reports and row-count
//! checks possible after the fact.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boolexpr::{FreshVars, VarId};
use crate::error::{Error, Result};
use crate::parse::ResolveVar;

/// Domain of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    /// 0-1 integer.
    Binary,
    /// Integer within its bounds.
    Integer,
    /// Real within its bounds.
    Continuous,
}

/// Row comparison sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// A model variable: name, domain, bounds, objective coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelVar {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

/// One linear row: Σ coeff·var  sense  rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    /// Sorted by variable id; no zero coefficients; no repeats.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    /// Recipe label, e.g. `"disjunction"` or `"tree-balance"`.
    pub tag: String,
}

impl LinearConstraint {
    /// Left-hand-side activity under the given point.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * x[v.index()]).sum()
    }
}

/// Result status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Search stopped at the node limit before proving optimality.
    NodeLimit,
    /// Search stopped at the time limit before proving optimality.
    TimeLimit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::NodeLimit => "node-limit",
            SolveStatus::TimeLimit => "time-limit",
        })
    }
}

/// Outcome of a solve: status, best point found (if any), and search stats.
#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    /// Objective of `values` when present.
    pub objective: f64,
    /// One entry per model variable, indexed by `VarId`.
    pub values: Vec<f64>,
    /// Branch-and-bound nodes processed (0 for pure LP / brute force).
    pub nodes: u64,
}

impl Solution {
    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.index()]
    }

    /// Rounded 0/1 view of a binary variable.
    pub fn is_true(&self, var: VarId) -> bool {
        self.values[var.index()] > 0.5
    }
}

/// Feasibility report from [`Model::check_feasible`].
#[derive(Debug, Clone)]
pub struct Violation {
    /// Index into `Model::constraints`, or `None` for a bound/integrality violation.
    pub row: Option<usize>,
    pub message: String,
    /// Signed slack: how far the row or bound is from holding (negative = violated amount).
    pub slack: f64,
}

/// A maximization 0-1 ILP (with optional integer/continuous variables).
#[derive(Debug, Clone, Default)]
pub struct Model {
    vars: Vec<ModelVar>,
    by_name: HashMap<String, VarId>,
    constraints: Vec<LinearConstraint>,
    aux_counter: u32,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable. Binary variables get bounds [0, 1] regardless of the
    /// arguments. Duplicate names and invalid bounds are errors.
    pub fn add_var(
        &mut self,
        name: &str,
        kind: VarKind,
        lower: f64,
        upper: f64,
        objective: f64,
    ) -> Result<VarId> {
        if name.is_empty() {
            return Err(Error::EmptyVarName);
        }
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateVar(name.to_string()));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => (0.0, 1.0),
            _ => (lower, upper),
        };
        if !lower.is_finite() {
            return Err(Error::NonFinite {
                what: format!("lower bound of '{name}'"),
                value: lower,
            });
        }
        if upper.is_nan() {
            return Err(Error::NonFinite {
                what: format!("upper bound of '{name}'"),
                value: upper,
            });
        }
        if !objective.is_finite() {
            return Err(Error::NonFinite {
                what: format!("objective of '{name}'"),
                value: objective,
            });
        }
        if lower > upper {
            return Err(Error::InvalidBounds {
                name: name.to_string(),
                kind,
                lower,
                upper,
            });
        }
        if self.vars.len() >= u32::MAX as usize {
            return Err(Error::RegistryFull);
        }
        let id = VarId(self.vars.len() as u32);
        self.by_name.insert(name.to_string(), id);
        self.vars.push(ModelVar {
            name: name.to_string(),
            kind,
            lower,
            upper,
            objective,
        });
        Ok(id)
    }

    /// Shorthand for a binary variable with the given objective coefficient.
    pub fn add_binary(&mut self, name: &str, objective: f64) -> Result<VarId> {
        self.add_var(name, VarKind::Binary, 0.0, 1.0, objective)
    }

    /// Adds a row. Repeated variables are coalesced, zero coefficients are
    /// dropped, and terms are sorted by variable id.
    pub fn add_constraint(
        &mut self,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
        tag: &str,
    ) -> Result<usize> {
        if tag.is_empty() {
            return Err(Error::EmptyTag);
        }
        if !rhs.is_finite() {
            return Err(Error::NonFinite {
                what: format!("rhs of row '{tag}'"),
                value: rhs,
            });
        }
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for (v, c) in terms {
            if v.index() >= self.vars.len() {
                return Err(Error::UnknownVar(v));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite {
                    what: format!(
                        "coefficient of '{}' in row '{tag}'",
                        self.vars[v.index()].name
                    ),
                    value: c,
                });
            }
            *merged.entry(v).or_insert(0.0) += c;
        }
        let terms: Vec<(VarId, f64)> = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();
        let idx = self.constraints.len();
        self.constraints.push(LinearConstraint {
            terms,
            sense,
            rhs,
            tag: tag.to_string(),
        });
        Ok(idx)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var(&self, id: VarId) -> &ModelVar {
        &self.vars[id.index()]
    }

    pub fn vars(&self) -> &[ModelVar] {
        &self.vars
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// Id for `name`, or [`Error::UnknownVarName`].
    pub fn require(&self, name: &str) -> Result<VarId> {
        self.lookup(name)
            .ok_or_else(|| Error::UnknownVarName(name.to_string()))
    }

    /// Sets the objective coefficient of an existing variable.
    pub fn set_objective(&mut self, var: VarId, coeff: f64) -> Result<()> {
        if var.index() >= self.vars.len() {
            return Err(Error::UnknownVar(var));
        }
        if !coeff.is_finite() {
            return Err(Error::NonFinite {
                what: format!("objective of '{}'", self.vars[var.index()].name),
                value: coeff,
            });
        }
        self.vars[var.index()].objective = coeff;
        Ok(())
    }

    /// Objective value of a point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| v.objective * x[i])
            .sum()
    }

    /// Number of rows whose tag equals `tag`.
    pub fn rows_tagged(&self, tag: &str) -> usize {
        self.constraints.iter().filter(|c| c.tag == tag).count()
    }

    /// Row counts grouped by tag, in first-appearance order.
    pub fn tag_histogram(&self) -> Vec<(String, usize)> {
        let mut order: Vec<String> = Vec::new();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for c in &self.constraints {
            if !counts.contains_key(c.tag.as_str()) {
                order.push(c.tag.clone());
            }
            *counts.entry(c.tag.as_str()).or_insert(0) += 1;
        }
        order
            .into_iter()
            .map(|t| {
                let n = counts[t.as_str()];
                (t, n)
            })
            .collect()
    }

    /// Checks a point against every bound, integrality requirement, and row.
    /// Empty result means feasible at tolerance `tol`.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        if x.len() != self.vars.len() {
            out.push(Violation {
                row: None,
                message: format!(
                    "point has {} entries but the model has {} variables",
                    x.len(),
                    self.vars.len()
                ),
                slack: f64::NEG_INFINITY,
            });
            return out;
        }
        for (i, v) in self.vars.iter().enumerate() {
            let xi = x[i];
            if xi < v.lower - tol {
                out.push(Violation {
                    row: None,
                    message: format!("{} = {xi} below lower bound {}", v.name, v.lower),
                    slack: xi - v.lower,
                });
            }
            if xi > v.upper + tol {
                out.push(Violation {
                    row: None,
                    message: format!("{} = {xi} above upper bound {}", v.name, v.upper),
                    slack: v.upper - xi,
                });
            }
            if matches!(v.kind, VarKind::Binary | VarKind::Integer) && (xi - xi.round()).abs() > tol
            {
                out.push(Violation {
                    row: None,
                    message: format!("{} = {xi} is not integral", v.name),
                    slack: -(xi - xi.round()).abs(),
                });
            }
        }
        for (idx, c) in self.constraints.iter().enumerate() {
            let lhs = c.activity(x);
            if !c.sense.holds(lhs, c.rhs, tol) {
                let slack = match c.sense {
                    Sense::Le => c.rhs - lhs,
                    Sense::Ge => lhs - c.rhs,
                    Sense::Eq => -(lhs - c.rhs).abs(),
                };
                out.push(Violation {
                    row: Some(idx),
                    message: format!(
                        "row {idx} [{}]: {} {} {} violated (lhs = {lhs})",
                        c.tag,
                        self.row_lhs_text(c),
                        c.sense.symbol(),
                        c.rhs
                    ),
                    slack,
                });
            }
        }
        out
    }

    fn row_lhs_text(&self, c: &LinearConstraint) -> String {
        let mut s = String::new();
        write_terms(&mut s, &c.terms, |v| &self.vars[v.index()].name);
        s
    }

    /// Serializes in LP format: objective, rows, bounds, and integrality
    /// sections. Variables appear under `Binary`/`General` as appropriate.
    pub fn write_lp(&self) -> String {
        let mut s = String::new();
        s.push_str("Maximize\n obj:");
        let obj_terms: Vec<(VarId, f64)> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.objective != 0.0)
            .map(|(i, v)| (VarId(i as u32), v.objective))
            .collect();
        if obj_terms.is_empty() {
            s.push_str(" 0");
        } else {
            s.push(' ');
            write_terms(&mut s, &obj_terms, |v| &self.vars[v.index()].name);
        }
        s.push_str("\nSubject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = write!(s, " c{i}: ");
            if c.terms.is_empty() {
                s.push('0');
            } else {
                write_terms(&mut s, &c.terms, |v| &self.vars[v.index()].name);
            }
            let _ = writeln!(s, " {} {}", c.sense.symbol(), fmt_num(c.rhs));
        }
        s.push_str("Bounds\n");
        for v in &self.vars {
            if v.kind == VarKind::Binary {
                continue; // implied by the Binary section
            }
            if v.upper == f64::INFINITY {
                if v.lower == 0.0 {
                    let _ = writeln!(s, " {} >= 0", v.name);
                } else {
                    let _ = writeln!(s, " {} >= {}", v.name, fmt_num(v.lower));
                }
            } else {
                let _ = writeln!(
                    s,
                    " {} <= {} <= {}",
                    fmt_num(v.lower),
                    v.name,
                    fmt_num(v.upper)
                );
            }
        }
        let binaries: Vec<&str> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            s.push_str("Binary\n");
            for name in binaries {
                let _ = writeln!(s, " {name}");
            }
        }
        let generals: Vec<&str> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Integer)
            .map(|v| v.name.as_str())
            .collect();
        if !generals.is_empty() {
            s.push_str("General\n");
            for name in generals {
                let _ = writeln!(s, " {name}");
            }
        }
        s.push_str("End\n");
        s
    }

    /// Lossless JSON serialization (schema 1).
    pub fn write_json(&self) -> String {
        let schema = JsonModel {
            schema: 1,
            vars: self
                .vars
                .iter()
                .map(|v| JsonVar {
                    name: v.name.clone(),
                    kind: v.kind,
                    lower: v.lower,
                    // JSON has no infinity literal: null marks "no upper bound".
                    upper: v.upper.is_finite().then_some(v.upper),
                    objective: v.objective,
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| JsonRow {
                    terms: c
                        .terms
                        .iter()
                        .map(|&(v, coef)| JsonTerm {
                            var: self.vars[v.index()].name.clone(),
                            coef,
                        })
                        .collect(),
                    sense: c.sense,
                    rhs: c.rhs,
                    tag: c.tag.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&schema).expect("model serialization cannot fail")
    }

    /// Parses the JSON produced by [`Model::write_json`]. Semantic problems
    /// (unknown kinds, bad bounds, unknown variables in rows) are reported
    /// with the JSON path of the offending element.
    pub fn read_json(text: &str) -> Result<Model> {
        let parsed: JsonModel = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: "$".into(),
            msg: e.to_string(),
        })?;
        if parsed.schema != 1 {
            return Err(Error::Schema {
                path: "schema".into(),
                msg: format!("unsupported schema version {}", parsed.schema),
            });
        }
        let mut model = Model::new();
        for (i, v) in parsed.vars.iter().enumerate() {
            model
                .add_var(
                    &v.name,
                    v.kind,
                    v.lower,
                    v.upper.unwrap_or(f64::INFINITY),
                    v.objective,
                )
                .map_err(|e| Error::Schema {
                    path: format!("vars[{i}]"),
                    msg: e.to_string(),
                })?;
        }
        for (i, row) in parsed.constraints.iter().enumerate() {
            let mut terms = Vec::with_capacity(row.terms.len());
            for (j, t) in row.terms.iter().enumerate() {
                let id = model.lookup(&t.var).ok_or_else(|| Error::Schema {
                    path: format!("constraints[{i}].terms[{j}].var"),
                    msg: format!("unknown variable '{}'", t.var),
                })?;
                terms.push((id, t.coef));
            }
            model
                .add_constraint(terms, row.sense, row.rhs, &row.tag)
                .map_err(|e| Error::Schema {
                    path: format!("constraints[{i}]"),
                    msg: e.to_string(),
                })?;
        }
        Ok(model)
    }
}

impl FreshVars for Model {
    /// Auxiliary variables minted during encoding are binary with zero
    /// objective weight.
    fn fresh_var(&mut self, hint: &str) -> Result<VarId> {
        loop {
            let name = format!("_{}{}", hint, self.aux_counter);
            self.aux_counter = self.aux_counter.checked_add(1).ok_or(Error::RegistryFull)?;
            if !self.by_name.contains_key(&name) {
                return self.add_binary(&name, 0.0);
            }
        }
    }
}

impl ResolveVar for Model {
    /// Parsing against a model never creates variables: unknown names error.
    fn resolve(&mut self, name: &str) -> Result<VarId> {
        self.require(name)
    }
}

/// `12`, `-3`, `0.5`, `2.5e-9` — integers without a trailing `.0`, everything
/// else with up to 12 significant digits and no trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let mut s = format!("{x:.12}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn write_terms<'a>(out: &mut String, terms: &[(VarId, f64)], name_of: impl Fn(VarId) -> &'a str) {
    for (i, &(v, c)) in terms.iter().enumerate() {
        if i == 0 {
            if c < 0.0 {
                out.push_str("- ");
            }
        } else if c < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = c.abs();
        if mag != 1.0 {
            let _ = write!(out, "{} ", fmt_num(mag));
        }
        out.push_str(name_of(v));
    }
}

#[derive(Serialize, Deserialize)]
struct JsonModel {
    schema: u32,
    vars: Vec<JsonVar>,
    constraints: Vec<JsonRow>,
}

#[derive(Serialize, Deserialize)]
struct JsonVar {
    name: String,
    kind: VarKind,
    lower: f64,
    /// `null` means unbounded above.
    upper: Option<f64>,
    objective: f64,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    terms: Vec<JsonTerm>,
    sense: Sense,
    rhs: f64,
    tag: String,
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    var: String,
    coef: f64,
}
