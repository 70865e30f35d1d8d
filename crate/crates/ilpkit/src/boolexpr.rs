//! Boolean expression AST, evaluation, and conversion to conjunctive normal form.
//!
//! Expressions are built over named 0-1 decision variables. Two CNF routes are
//! provided: the distributive expansion, which yields a logically equivalent
//! formula over the original variables, and the Tseitin transformation, which
//! introduces defined auxiliary variables and stays linear in the input size.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense index of a decision variable within one registry or model.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A possibly negated variable occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: VarId) -> Self {
        Literal { var, negated: true }
    }

    /// The same variable with the opposite sign.
    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    pub fn holds(self, value: bool) -> bool {
        value != self.negated
    }
}

/// Source of truth values for evaluation.
pub trait Assignment {
    fn value(&self, var: VarId) -> Option<bool>;
}

impl Assignment for HashMap<VarId, bool> {
    fn value(&self, var: VarId) -> Option<bool> {
        self.get(&var).copied()
    }
}

/// Flat assignment indexed by variable id; the workhorse of enumeration loops.
#[derive(Debug, Clone, Default)]
pub struct DenseAssignment {
    slots: Vec<Option<bool>>,
}

impl DenseAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        let idx = var.index();
        if idx >= self.slots.len() {
            self.slots.resize(idx + 1, None);
        }
        self.slots[idx] = Some(value);
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
    }
}

impl Assignment for DenseAssignment {
    fn value(&self, var: VarId) -> Option<bool> {
        self.slots.get(var.index()).copied().flatten()
    }
}

/// Comparator of a counting constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountCmp {
    AtLeast,
    AtMost,
    Exactly,
}

impl CountCmp {
    pub fn compare(self, count: u32, k: u32) -> bool {
        match self {
            CountCmp::AtLeast => count >= k,
            CountCmp::AtMost => count <= k,
            CountCmp::Exactly => count == k,
        }
    }
}

/// Recursive Boolean formula over decision variables.
///
/// `And`/`Or` children are non-empty by construction. `Count` bounds how many
/// of a literal list are true; it has no clausal expansion here and is encoded
/// directly as a linear row by the recipe layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Lit(Literal),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    Iff(Box<BoolExpr>, Box<BoolExpr>),
    Count {
        lits: Vec<Literal>,
        cmp: CountCmp,
        k: u32,
    },
}

impl BoolExpr {
    pub fn var(v: VarId) -> Self {
        BoolExpr::Lit(Literal::pos(v))
    }

    pub fn not_var(v: VarId) -> Self {
        BoolExpr::Lit(Literal::neg(v))
    }

    pub fn lit(l: Literal) -> Self {
        BoolExpr::Lit(l)
    }

    /// Conjunction. Panics on an empty child list.
    pub fn and(children: Vec<BoolExpr>) -> Self {
        assert!(!children.is_empty(), "And requires at least one child");
        BoolExpr::And(children)
    }

    /// Disjunction. Panics on an empty child list.
    pub fn or(children: Vec<BoolExpr>) -> Self {
        assert!(!children.is_empty(), "Or requires at least one child");
        BoolExpr::Or(children)
    }

    pub fn negate(self) -> Self {
        BoolExpr::Not(Box::new(self))
    }

    pub fn implies(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Iff(Box::new(a), Box::new(b))
    }

    pub fn count(lits: Vec<Literal>, cmp: CountCmp, k: u32) -> Self {
        BoolExpr::Count { lits, cmp, k }
    }

    /// Exactly one of the literals holds.
    pub fn exactly_one(lits: Vec<Literal>) -> Self {
        BoolExpr::Count {
            lits,
            cmp: CountCmp::Exactly,
            k: 1,
        }
    }

    /// All variables mentioned anywhere in the expression, sorted and deduped.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            BoolExpr::Lit(l) => out.push(l.var),
            BoolExpr::Not(e) => e.collect_vars(out),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            BoolExpr::Implies(a, b) | BoolExpr::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            BoolExpr::Count { lits, .. } => out.extend(lits.iter().map(|l| l.var)),
        }
    }

    pub fn contains_count(&self) -> bool {
        match self {
            BoolExpr::Count { .. } => true,
            BoolExpr::Lit(_) => false,
            BoolExpr::Not(e) => e.contains_count(),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().any(|x| x.contains_count()),
            BoolExpr::Implies(a, b) | BoolExpr::Iff(a, b) => {
                a.contains_count() || b.contains_count()
            }
        }
    }

    /// Standard Boolean semantics; `Count` tallies its true literals.
    ///
    /// Fails with [`Error::UnassignedVar`] if a mentioned variable is missing
    /// from the assignment.
    pub fn eval(&self, a: &impl Assignment) -> Result<bool> {
        match self {
            BoolExpr::Lit(l) => {
                let v = a.value(l.var).ok_or(Error::UnassignedVar(l.var))?;
                Ok(l.holds(v))
            }
            BoolExpr::Not(e) => Ok(!e.eval(a)?),
            BoolExpr::And(xs) => {
                let mut all = true;
                for x in xs {
                    all &= x.eval(a)?;
                }
                Ok(all)
            }
            BoolExpr::Or(xs) => {
                let mut any = false;
                for x in xs {
                    any |= x.eval(a)?;
                }
                Ok(any)
            }
            BoolExpr::Implies(p, q) => Ok(!p.eval(a)? || q.eval(a)?),
            BoolExpr::Iff(p, q) => Ok(p.eval(a)? == q.eval(a)?),
            BoolExpr::Count { lits, cmp, k } => {
                let mut n = 0u32;
                for l in lits {
                    let v = a.value(l.var).ok_or(Error::UnassignedVar(l.var))?;
                    n += u32::from(l.holds(v));
                }
                Ok(cmp.compare(n, *k))
            }
        }
    }
}

/// Registry mapping display names to dense variable ids.
#[derive(Debug, Clone, Default)]
pub struct VarRegistry {
    names: Vec<String>,
    by_name: HashMap<String, VarId>,
    aux_counter: u32,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Id for `name`, registering it if unseen.
    pub fn intern(&mut self, name: &str) -> Result<VarId> {
        if name.is_empty() {
            return Err(Error::EmptyVarName);
        }
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        self.insert(name.to_string())
    }

    fn insert(&mut self, name: String) -> Result<VarId> {
        if self.names.len() >= u32::MAX as usize {
            return Err(Error::RegistryFull);
        }
        let id = VarId(self.names.len() as u32);
        self.by_name.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len() as u32).map(VarId)
    }
}

/// Mints fresh auxiliary variables; implemented by [`VarRegistry`] and by the
/// ILP model so Tseitin auxiliaries can land in either.
pub trait FreshVars {
    fn fresh_var(&mut self, hint: &str) -> Result<VarId>;
}

impl FreshVars for VarRegistry {
    fn fresh_var(&mut self, hint: &str) -> Result<VarId> {
        loop {
            let name = format!("_{}{}", hint, self.aux_counter);
            self.aux_counter = self.aux_counter.checked_add(1).ok_or(Error::RegistryFull)?;
            if !self.by_name.contains_key(&name) {
                return self.insert(name);
            }
        }
    }
}

/// A disjunctive clause: sorted, deduplicated literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Canonicalizes: sorts by (variable id, sign) and drops duplicates.
    pub fn new(mut lits: Vec<Literal>) -> Self {
        lits.sort();
        lits.dedup();
        Clause { lits }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    /// True if the clause contains some variable with both signs.
    pub fn is_tautology(&self) -> bool {
        self.lits
            .windows(2)
            .any(|w| w[0].var == w[1].var && w[0].negated != w[1].negated)
    }

    pub fn is_satisfied_by(&self, a: &impl Assignment) -> Result<bool> {
        for l in &self.lits {
            let v = a.value(l.var).ok_or(Error::UnassignedVar(l.var))?;
            if l.holds(v) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// True if every literal of `self` also occurs in `other`.
    fn subsumes(&self, other: &Clause) -> bool {
        if self.lits.len() > other.lits.len() {
            return false;
        }
        // Both sides are sorted.
        let mut it = other.lits.iter();
        'outer: for l in &self.lits {
            for o in it.by_ref() {
                match o.cmp(l) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }
}

/// Conjunction of disjunctive clauses plus the auxiliary variables introduced
/// while producing it (empty for the distributive route).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub clauses: Vec<Clause>,
    pub aux_vars: Vec<VarId>,
}

impl Cnf {
    fn canonical(mut clauses: Vec<Clause>, aux_vars: Vec<VarId>) -> Self {
        clauses.sort();
        clauses.dedup();
        Cnf { clauses, aux_vars }
    }

    pub fn is_satisfied_by(&self, a: &impl Assignment) -> Result<bool> {
        for c in &self.clauses {
            if !c.is_satisfied_by(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Default cap on the clause count of a distributive expansion.
pub const DEFAULT_CLAUSE_BUDGET: usize = 1_000_000;

/// Negation-free view used internally by the CNF conversions: `Not` has been
/// pushed down into literal signs and `Implies`/`Iff` rewritten away.
enum Nnf {
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn to_nnf(expr: &BoolExpr, polarity: bool) -> Result<Nnf> {
    Ok(match expr {
        BoolExpr::Lit(l) => Nnf::Lit(if polarity { *l } else { l.complement() }),
        BoolExpr::Not(e) => to_nnf(e, !polarity)?,
        BoolExpr::And(xs) => {
            let children = xs
                .iter()
                .map(|x| to_nnf(x, polarity))
                .collect::<Result<Vec<_>>>()?;
            if polarity {
                Nnf::And(children)
            } else {
                Nnf::Or(children)
            }
        }
        BoolExpr::Or(xs) => {
            let children = xs
                .iter()
                .map(|x| to_nnf(x, polarity))
                .collect::<Result<Vec<_>>>()?;
            if polarity {
                Nnf::Or(children)
            } else {
                Nnf::And(children)
            }
        }
        BoolExpr::Implies(p, q) => {
            if polarity {
                Nnf::Or(vec![to_nnf(p, false)?, to_nnf(q, true)?])
            } else {
                Nnf::And(vec![to_nnf(p, true)?, to_nnf(q, false)?])
            }
        }
        BoolExpr::Iff(p, q) => {
            if polarity {
                // (¬p ∨ q) ∧ (¬q ∨ p)
                Nnf::And(vec![
                    Nnf::Or(vec![to_nnf(p, false)?, to_nnf(q, true)?]),
                    Nnf::Or(vec![to_nnf(q, false)?, to_nnf(p, true)?]),
                ])
            } else {
                // (p ∨ q) ∧ (¬p ∨ ¬q)
                Nnf::And(vec![
                    Nnf::Or(vec![to_nnf(p, true)?, to_nnf(q, true)?]),
                    Nnf::Or(vec![to_nnf(p, false)?, to_nnf(q, false)?]),
                ])
            }
        }
        BoolExpr::Count { .. } => return Err(Error::CountInCnf),
    })
}

/// Logically equivalent CNF by De Morgan + distribution.
///
/// Tautological, duplicate, and subsumed clauses are dropped, and the result
/// is in canonical order, so equal formulas produce identical output.
/// Uses [`DEFAULT_CLAUSE_BUDGET`]; see [`to_cnf_distributive_with_budget`].
pub fn to_cnf_distributive(expr: &BoolExpr) -> Result<Cnf> {
    to_cnf_distributive_with_budget(expr, DEFAULT_CLAUSE_BUDGET)
}

pub fn to_cnf_distributive_with_budget(expr: &BoolExpr, budget: usize) -> Result<Cnf> {
    let nnf = to_nnf(expr, true)?;
    let mut clauses = distribute(&nnf, budget)?;
    clauses.retain(|c| !c.is_tautology());
    clauses.sort();
    clauses.dedup();
    remove_subsumed(&mut clauses);
    Ok(Cnf::canonical(clauses, Vec::new()))
}

fn distribute(nnf: &Nnf, budget: usize) -> Result<Vec<Clause>> {
    match nnf {
        Nnf::Lit(l) => Ok(vec![Clause::new(vec![*l])]),
        Nnf::And(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(distribute(x, budget)?);
                if out.len() > budget {
                    return Err(Error::ClauseBudget { budget });
                }
            }
            Ok(out)
        }
        Nnf::Or(xs) => {
            // Cross product of the children's clause sets.
            let mut acc: Vec<Clause> = vec![Clause::new(Vec::new())];
            for x in xs {
                let rhs = distribute(x, budget)?;
                if acc.len().saturating_mul(rhs.len()) > budget {
                    return Err(Error::ClauseBudget { budget });
                }
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for a in &acc {
                    for b in &rhs {
                        let mut lits = a.lits.clone();
                        lits.extend_from_slice(&b.lits);
                        let merged = Clause::new(lits);
                        if !merged.is_tautology() {
                            next.push(merged);
                        }
                    }
                }
                // An empty product means every combination was tautological:
                // this disjunct is valid, so it contributes no clauses. Use a
                // sentinel tautology-free representation: the whole Or is true.
                if next.is_empty() {
                    return Ok(Vec::new());
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

fn remove_subsumed(clauses: &mut Vec<Clause>) {
    let snapshot = clauses.clone();
    clauses.retain(|c| !snapshot.iter().any(|d| d != c && d.subsumes(c)));
}

/// Equisatisfiable CNF via the Tseitin transformation.
///
/// Every internal gate gets an auxiliary variable constrained by both
/// implication directions, so models of the CNF project exactly onto models
/// of the expression. The root is asserted structurally (a conjunction at the
/// root becomes asserted clauses rather than one more gate).
pub fn to_cnf_tseitin(expr: &BoolExpr, fresh: &mut dyn FreshVars) -> Result<Cnf> {
    let nnf = to_nnf(expr, true)?;
    let mut ctx = TseitinCtx {
        clauses: Vec::new(),
        aux: Vec::new(),
        fresh,
    };
    ctx.assert_root(&nnf)?;
    let TseitinCtx { clauses, aux, .. } = ctx;
    Ok(Cnf::canonical(clauses, aux))
}

/// Tseitin-define `expr` without asserting it: returns the defining clauses,
/// a literal equivalent to the expression's truth value, and the auxiliaries
/// introduced. Used by the soft-constraint transform.
pub fn tseitin_define(
    expr: &BoolExpr,
    fresh: &mut dyn FreshVars,
) -> Result<(Vec<Clause>, Literal, Vec<VarId>)> {
    let nnf = to_nnf(expr, true)?;
    let mut ctx = TseitinCtx {
        clauses: Vec::new(),
        aux: Vec::new(),
        fresh,
    };
    let root = ctx.define(&nnf)?;
    let TseitinCtx {
        mut clauses, aux, ..
    } = ctx;
    clauses.sort();
    clauses.dedup();
    Ok((clauses, root, aux))
}

struct TseitinCtx<'a> {
    clauses: Vec<Clause>,
    aux: Vec<VarId>,
    fresh: &'a mut dyn FreshVars,
}

impl TseitinCtx<'_> {
    fn assert_root(&mut self, nnf: &Nnf) -> Result<()> {
        match nnf {
            Nnf::Lit(l) => {
                self.clauses.push(Clause::new(vec![*l]));
                Ok(())
            }
            Nnf::And(xs) => {
                for x in xs {
                    self.assert_root(x)?;
                }
                Ok(())
            }
            Nnf::Or(xs) => {
                let lits = xs
                    .iter()
                    .map(|x| self.define(x))
                    .collect::<Result<Vec<_>>>()?;
                self.clauses.push(Clause::new(lits));
                Ok(())
            }
        }
    }

    fn define(&mut self, nnf: &Nnf) -> Result<Literal> {
        match nnf {
            Nnf::Lit(l) => Ok(*l),
            Nnf::And(xs) => {
                let lits = xs
                    .iter()
                    .map(|x| self.define(x))
                    .collect::<Result<Vec<_>>>()?;
                let g = Literal::pos(self.fresh_aux()?);
                // g → each child; all children → g.
                let mut long = vec![g];
                for l in &lits {
                    self.clauses.push(Clause::new(vec![g.complement(), *l]));
                    long.push(l.complement());
                }
                self.clauses.push(Clause::new(long));
                Ok(g)
            }
            Nnf::Or(xs) => {
                let lits = xs
                    .iter()
                    .map(|x| self.define(x))
                    .collect::<Result<Vec<_>>>()?;
                let g = Literal::pos(self.fresh_aux()?);
                // each child → g; g → some child.
                let mut long = vec![g.complement()];
                for l in &lits {
                    self.clauses.push(Clause::new(vec![l.complement(), g]));
                    long.push(*l);
                }
                self.clauses.push(Clause::new(long));
                Ok(g)
            }
        }
    }

    fn fresh_aux(&mut self) -> Result<VarId> {
        let v = self.fresh.fresh_var("t")?;
        self.aux.push(v);
        Ok(v)
    }
}
