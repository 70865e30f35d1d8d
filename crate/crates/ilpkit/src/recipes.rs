//! Encoding recipes: each turns one logical constraint over 0-1 variables
//! into linear rows of a [`Model`].
//!
//! Negated literals never appear in the emitted rows. A term `(1 - y)` is
//! folded into the right-hand side: wherever a recipe would use the negation
//! of `y`, the row instead carries coefficient `-1` on `y` and the constant
//! moves across the comparison. All coefficients and right-hand sides are
//! integers.
//!
//! Every row is tagged with the recipe name that produced it, so models can
//! be audited per recipe after encoding.

use crate::boolexpr::{BoolExpr, Cnf, CountCmp, Literal, VarId};
use crate::error::{Error, Result};
use crate::model::{Model, Sense};

/// How [`encode_expr`] maps an arbitrary expression onto rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EncodeStrategy {
    /// Convert to CNF by distribution and emit one row per clause.
    Naive,
    /// Recognize implication/biconditional shapes and emit the dedicated
    /// one-or-two-row forms; fall back to `Naive` otherwise.
    #[default]
    Compact,
}

impl std::fmt::Display for EncodeStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EncodeStrategy::Naive => "naive",
            EncodeStrategy::Compact => "compact",
        })
    }
}

/// Accumulates `(coefficient, rhs-delta)` pairs with negation folding:
/// a positive literal `y` contributes `+s·y`; a negated one contributes
/// `-s·y` and shifts the right-hand side by `-s`.
pub(crate) fn push_lit(terms: &mut Vec<(VarId, f64)>, rhs: &mut f64, lit: Literal, scale: f64) {
    if lit.negated {
        terms.push((lit.var, -scale));
        *rhs -= scale;
    } else {
        terms.push((lit.var, scale));
    }
}

fn require_nonempty(lits: &[Literal], what: &'static str) -> Result<()> {
    if lits.is_empty() {
        Err(Error::EmptyLiterals(what))
    } else {
        Ok(())
    }
}

/// All literals hold: Σ lits = n.
pub fn force_all(model: &mut Model, lits: &[Literal]) -> Result<usize> {
    require_nonempty(lits, "force_all")?;
    let mut terms = Vec::with_capacity(lits.len());
    let mut rhs = lits.len() as f64;
    for &l in lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    model.add_constraint(terms, Sense::Eq, rhs, "force-all")
}

/// No literal holds: Σ lits = 0.
pub fn forbid_all(model: &mut Model, lits: &[Literal]) -> Result<usize> {
    require_nonempty(lits, "forbid_all")?;
    let mut terms = Vec::with_capacity(lits.len());
    let mut rhs = 0.0;
    for &l in lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    model.add_constraint(terms, Sense::Eq, rhs, "forbid-all")
}

/// At least one literal holds: Σ lits ≥ 1.
pub fn disjunction(model: &mut Model, lits: &[Literal]) -> Result<usize> {
    require_nonempty(lits, "disjunction")?;
    let mut terms = Vec::with_capacity(lits.len());
    let mut rhs = 1.0;
    for &l in lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    model.add_constraint(terms, Sense::Ge, rhs, "disjunction")
}

/// The number of holding literals is `cmp` `k`: Σ lits {≥, ≤, =} k.
pub fn count(model: &mut Model, lits: &[Literal], cmp: CountCmp, k: u32) -> Result<usize> {
    require_nonempty(lits, "count")?;
    let mut terms = Vec::with_capacity(lits.len());
    let mut rhs = k as f64;
    for &l in lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    let sense = match cmp {
        CountCmp::AtLeast => Sense::Ge,
        CountCmp::AtMost => Sense::Le,
        CountCmp::Exactly => Sense::Eq,
    };
    model.add_constraint(terms, sense, rhs, "count")
}

/// Exactly one literal holds: Σ lits = 1.
pub fn exactly_one(model: &mut Model, lits: &[Literal]) -> Result<usize> {
    require_nonempty(lits, "exactly_one")?;
    let mut terms = Vec::with_capacity(lits.len());
    let mut rhs = 1.0;
    for &l in lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    model.add_constraint(terms, Sense::Eq, rhs, "exactly-one")
}

/// The two literals agree: a − b = 0 (after negation folding).
pub fn equivalence(model: &mut Model, a: Literal, b: Literal) -> Result<usize> {
    let mut terms = Vec::with_capacity(2);
    let mut rhs = 0.0;
    push_lit(&mut terms, &mut rhs, a, 1.0);
    push_lit(&mut terms, &mut rhs, b, -1.0);
    model.add_constraint(terms, Sense::Eq, rhs, "equivalence")
}

/// Conjunction of `lhs` implies disjunction of `rhs`, in one row:
/// −Σ lhs + Σ rhs ≥ 1 − |lhs|.
pub fn implication(model: &mut Model, lhs: &[Literal], rhs_lits: &[Literal]) -> Result<usize> {
    require_nonempty(lhs, "implication lhs")?;
    require_nonempty(rhs_lits, "implication rhs")?;
    let mut terms = Vec::with_capacity(lhs.len() + rhs_lits.len());
    let mut rhs = 1.0 - lhs.len() as f64;
    for &l in lhs {
        push_lit(&mut terms, &mut rhs, l, -1.0);
    }
    for &l in rhs_lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    model.add_constraint(terms, Sense::Ge, rhs, "implication")
}

/// All of `lhs` holding forces `conclusion`: a Horn-shaped implication.
pub fn horn(model: &mut Model, lhs: &[Literal], conclusion: Literal) -> Result<usize> {
    implication(model, lhs, &[conclusion])
}

/// Disjunction of `lhs` implies disjunction of `rhs`, in one row:
/// −Σ lhs + |lhs|·Σ rhs ≥ 0.
pub fn disjunctive_implication(
    model: &mut Model,
    lhs: &[Literal],
    rhs_lits: &[Literal],
) -> Result<usize> {
    require_nonempty(lhs, "disjunctive_implication lhs")?;
    require_nonempty(rhs_lits, "disjunctive_implication rhs")?;
    let n = lhs.len() as f64;
    let mut terms = Vec::with_capacity(lhs.len() + rhs_lits.len());
    let mut rhs = 0.0;
    for &l in lhs {
        push_lit(&mut terms, &mut rhs, l, -1.0);
    }
    for &l in rhs_lits {
        push_lit(&mut terms, &mut rhs, l, n);
    }
    model.add_constraint(terms, Sense::Ge, rhs, "disjunctive-implication")
}

/// Conjunction of `lhs` implies conjunction of `rhs`, in one row:
/// −|rhs|·Σ lhs + Σ rhs ≥ |rhs|·(1 − |lhs|).
pub fn conjunctive_implication(
    model: &mut Model,
    lhs: &[Literal],
    rhs_lits: &[Literal],
) -> Result<usize> {
    require_nonempty(lhs, "conjunctive_implication lhs")?;
    require_nonempty(rhs_lits, "conjunctive_implication rhs")?;
    let n = lhs.len() as f64;
    let m = rhs_lits.len() as f64;
    let mut terms = Vec::with_capacity(lhs.len() + rhs_lits.len());
    let mut rhs = m * (1.0 - n);
    for &l in lhs {
        push_lit(&mut terms, &mut rhs, l, -m);
    }
    for &l in rhs_lits {
        push_lit(&mut terms, &mut rhs, l, 1.0);
    }
    model.add_constraint(terms, Sense::Ge, rhs, "conjunctive-implication")
}

/// Biconditional between a conjunction and a single literal, in two rows:
/// c → each aᵢ (aggregated) and ∧a → c.
///
///   −Σ a + c ≥ 1 − n   (if any aᵢ fails, c fails)
///   −n·c + Σ a ≥ 0     (c forces every aᵢ)
pub fn iff_conjunction(
    model: &mut Model,
    conj: &[Literal],
    lit: Literal,
) -> Result<(usize, usize)> {
    require_nonempty(conj, "iff_conjunction")?;
    let n = conj.len() as f64;

    let mut terms = Vec::with_capacity(conj.len() + 1);
    let mut rhs = 1.0 - n;
    for &a in conj {
        push_lit(&mut terms, &mut rhs, a, -1.0);
    }
    push_lit(&mut terms, &mut rhs, lit, 1.0);
    let r1 = model.add_constraint(terms, Sense::Ge, rhs, "iff-conjunction")?;

    let mut terms = Vec::with_capacity(conj.len() + 1);
    let mut rhs = 0.0;
    push_lit(&mut terms, &mut rhs, lit, -n);
    for &a in conj {
        push_lit(&mut terms, &mut rhs, a, 1.0);
    }
    let r2 = model.add_constraint(terms, Sense::Ge, rhs, "iff-conjunction")?;
    Ok((r1, r2))
}

/// One row per clause: Σ clause ≥ 1 with negations folded to the rhs.
pub fn encode_cnf_naive(model: &mut Model, cnf: &Cnf) -> Result<Vec<usize>> {
    let mut rows = Vec::with_capacity(cnf.clauses.len());
    for clause in &cnf.clauses {
        let mut terms = Vec::with_capacity(clause.literals().len());
        let mut rhs = 1.0;
        for &l in clause.literals() {
            push_lit(&mut terms, &mut rhs, l, 1.0);
        }
        rows.push(model.add_constraint(terms, Sense::Ge, rhs, "cnf-naive")?);
    }
    Ok(rows)
}

/// Encodes an arbitrary expression as rows asserting it true.
///
/// A top-level conjunction is split and each conjunct encoded on its own.
/// `Count` conjuncts become single cardinality rows; `Count` anywhere deeper
/// has no clausal form and is rejected with [`Error::CountPlacement`].
///
/// Under [`EncodeStrategy::Naive`] every non-`Count` conjunct goes through
/// the distributive CNF. Under [`EncodeStrategy::Compact`] these shapes are
/// recognized syntactically and emitted in their dense forms:
///
/// | shape                  | rows |
/// |------------------------|------|
/// | `lit <-> lit`          | 1    |
/// | `conj-of-lits <-> lit` | 2    |
/// | `and-lits -> or-lits`  | 1    |
/// | `or-lits -> or-lits`   | 1    |
/// | `and-lits -> and-lits` | 1    |
/// | `or-lits <-> or-lits`  | 2    |
///
/// Anything else falls back to the naive route.
pub fn encode_expr(
    model: &mut Model,
    expr: &BoolExpr,
    strategy: EncodeStrategy,
) -> Result<Vec<usize>> {
    let mut rows = Vec::new();
    match expr {
        BoolExpr::And(children) => {
            for child in children {
                rows.extend(encode_conjunct(model, child, strategy)?);
            }
        }
        other => rows.extend(encode_conjunct(model, other, strategy)?),
    }
    Ok(rows)
}

fn encode_conjunct(
    model: &mut Model,
    expr: &BoolExpr,
    strategy: EncodeStrategy,
) -> Result<Vec<usize>> {
    // Cardinality first: a Count at conjunct level is a single linear row.
    if let BoolExpr::Count { lits, cmp, k } = expr {
        return Ok(vec![count(model, lits, *cmp, *k)?]);
    }
    // Not(Count) still has a linear form: flip the comparator.
    if let BoolExpr::Not(inner) = expr {
        if let BoolExpr::Count { lits, cmp, k } = inner.as_ref() {
            let flipped = match cmp {
                // ¬(Σ ≥ k)  ⇔  Σ ≤ k−1
                CountCmp::AtLeast => {
                    if *k == 0 {
                        // Σ ≥ 0 is a tautology; its negation is unsatisfiable.
                        return Ok(vec![model.add_constraint(
                            Vec::new(),
                            Sense::Ge,
                            1.0,
                            "count",
                        )?]);
                    }
                    (CountCmp::AtMost, k - 1)
                }
                // ¬(Σ ≤ k)  ⇔  Σ ≥ k+1
                CountCmp::AtMost => (CountCmp::AtLeast, k + 1),
                // ¬(Σ = k) is disjunctive; no single-row form exists.
                CountCmp::Exactly => {
                    return Err(Error::CountPlacement(
                        "negated exact-count has no single-row encoding",
                    ))
                }
            };
            return Ok(vec![count(model, lits, flipped.0, flipped.1)?]);
        }
    }
    if expr.contains_count() {
        return Err(Error::CountPlacement(
            "count may only appear as a top-level conjunct",
        ));
    }
    if strategy == EncodeStrategy::Compact {
        if let Some(rows) = try_compact(model, expr)? {
            return Ok(rows);
        }
    }
    let cnf = crate::boolexpr::to_cnf_distributive(expr)?;
    encode_cnf_naive(model, &cnf)
}

/// Literal view of an expression node, when it is one.
fn as_literal(e: &BoolExpr) -> Option<Literal> {
    match e {
        BoolExpr::Lit(l) => Some(*l),
        BoolExpr::Not(inner) => as_literal(inner).map(Literal::complement),
        _ => None,
    }
}

/// The literals of a conjunction node (or a single literal).
fn as_conj_lits(e: &BoolExpr) -> Option<Vec<Literal>> {
    match e {
        BoolExpr::And(xs) => xs.iter().map(as_literal).collect(),
        _ => as_literal(e).map(|l| vec![l]),
    }
}

/// The literals of a disjunction node (or a single literal).
fn as_disj_lits(e: &BoolExpr) -> Option<Vec<Literal>> {
    match e {
        BoolExpr::Or(xs) => xs.iter().map(as_literal).collect(),
        _ => as_literal(e).map(|l| vec![l]),
    }
}

/// Strict shapes only: `And`/`Or` nodes of literals, not single literals.
fn as_strict_or(e: &BoolExpr) -> Option<Vec<Literal>> {
    match e {
        BoolExpr::Or(xs) => xs.iter().map(as_literal).collect(),
        _ => None,
    }
}

fn try_compact(model: &mut Model, expr: &BoolExpr) -> Result<Option<Vec<usize>>> {
    match expr {
        BoolExpr::Iff(a, b) => {
            // lit <-> lit: one equality row.
            if let (Some(la), Some(lb)) = (as_literal(a), as_literal(b)) {
                return Ok(Some(vec![equivalence(model, la, lb)?]));
            }
            // conjunction <-> lit (either side): two rows.
            if let (Some(conj), Some(lit)) = (as_conj_lits(a), as_literal(b)) {
                let (r1, r2) = iff_conjunction(model, &conj, lit)?;
                return Ok(Some(vec![r1, r2]));
            }
            if let (Some(lit), Some(conj)) = (as_literal(a), as_conj_lits(b)) {
                let (r1, r2) = iff_conjunction(model, &conj, lit)?;
                return Ok(Some(vec![r1, r2]));
            }
            // or-lits <-> or-lits: a pair of disjunctive implications.
            if let (Some(la), Some(lb)) = (as_strict_or(a), as_strict_or(b)) {
                let r1 = disjunctive_implication(model, &la, &lb)?;
                let r2 = disjunctive_implication(model, &lb, &la)?;
                return Ok(Some(vec![r1, r2]));
            }
            Ok(None)
        }
        BoolExpr::Implies(p, q) => {
            // or-lits -> or-lits gets the scaled single row; it dominates the
            // and->or form when the left side is a strict disjunction.
            if let (Some(lhs), Some(rhs)) = (as_strict_or(p), as_disj_lits(q)) {
                return Ok(Some(vec![disjunctive_implication(model, &lhs, &rhs)?]));
            }
            if let (Some(lhs), Some(rhs)) = (as_conj_lits(p), as_disj_lits(q)) {
                return Ok(Some(vec![implication(model, &lhs, &rhs)?]));
            }
            if let (Some(lhs), Some(rhs)) = (as_conj_lits(p), as_conj_lits(q)) {
                return Ok(Some(vec![conjunctive_implication(model, &lhs, &rhs)?]));
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

/// Adds one binary per label, scored by `scores`, plus the exactly-one row.
/// Variables are named `{prefix}_{i}` for label index `i`. Returns the ids.
pub fn multiclass_block(model: &mut Model, prefix: &str, scores: &[f64]) -> Result<Vec<VarId>> {
    if scores.is_empty() {
        return Err(Error::EmptyLiterals("multiclass_block"));
    }
    let ids = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| model.add_binary(&format!("{prefix}_{i}"), s))
        .collect::<Result<Vec<_>>>()?;
    exactly_one(
        model,
        &ids.iter().map(|&v| Literal::pos(v)).collect::<Vec<_>>(),
    )?;
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::{to_cnf_distributive, DenseAssignment, VarRegistry};
    use crate::model::VarKind;

    /// Model with `n` binaries named y1..yn, zero objective.
    fn setup(n: u32) -> (Model, Vec<VarId>) {
        let mut m = Model::new();
        let ids = (1..=n)
            .map(|i| m.add_binary(&format!("y{i}"), 0.0).unwrap())
            .collect();
        (m, ids)
    }

    fn row(m: &Model, idx: usize) -> &crate::model::LinearConstraint {
        &m.constraints()[idx]
    }

    /// All 0-1 points over the model's variables satisfying every row.
    fn feasible_masks(m: &Model) -> Vec<u64> {
        let n = m.num_vars();
        assert!(n <= 20);
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let x: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
            if m.check_feasible(&x, 1e-9).is_empty() {
                out.push(mask);
            }
        }
        out
    }

    /// Masks over `vars` satisfying `expr`.
    fn expr_masks(expr: &BoolExpr, nvars: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut a = DenseAssignment::new();
        for mask in 0u64..(1 << nvars) {
            for i in 0..nvars {
                a.set(VarId(i as u32), (mask >> i) & 1 == 1);
            }
            if expr.eval(&a).unwrap() {
                out.push(mask);
            }
        }
        out
    }

    #[test]
    fn force_all_folds_negation() {
        let (mut m, v) = setup(2);
        // y1 ∧ ¬y2  →  y1 − y2 = 1 (2 − 1 folded).
        let idx = force_all(&mut m, &[Literal::pos(v[0]), Literal::neg(v[1])]).unwrap();
        let r = row(&m, idx);
        assert_eq!(r.terms, vec![(v[0], 1.0), (v[1], -1.0)]);
        assert_eq!(r.sense, Sense::Eq);
        assert_eq!(r.rhs, 1.0);
        assert_eq!(feasible_masks(&m), vec![0b01]);
    }

    #[test]
    fn forbid_all_folds_negation() {
        let (mut m, v) = setup(2);
        let idx = forbid_all(&mut m, &[Literal::neg(v[0]), Literal::pos(v[1])]).unwrap();
        let r = row(&m, idx);
        assert_eq!(r.terms, vec![(v[0], -1.0), (v[1], 1.0)]);
        assert_eq!(r.rhs, -1.0);
        assert_eq!(feasible_masks(&m), vec![0b01]);
    }

    #[test]
    fn disjunction_row() {
        let (mut m, v) = setup(3);
        let idx = disjunction(
            &mut m,
            &[Literal::pos(v[0]), Literal::neg(v[1]), Literal::pos(v[2])],
        )
        .unwrap();
        let r = row(&m, idx);
        assert_eq!(r.terms, vec![(v[0], 1.0), (v[1], -1.0), (v[2], 1.0)]);
        assert_eq!(r.sense, Sense::Ge);
        assert_eq!(r.rhs, 0.0);
        // Excluded: exactly the one assignment falsifying all three literals.
        assert_eq!(feasible_masks(&m).len(), 7);
    }

    #[test]
    fn count_rows_each_comparator() {
        for (cmp, sense) in [
            (CountCmp::AtLeast, Sense::Ge),
            (CountCmp::AtMost, Sense::Le),
            (CountCmp::Exactly, Sense::Eq),
        ] {
            let (mut m, v) = setup(3);
            let lits: Vec<Literal> = v.iter().map(|&x| Literal::pos(x)).collect();
            let idx = count(&mut m, &lits, cmp, 2).unwrap();
            let r = row(&m, idx);
            assert_eq!(r.sense, sense);
            assert_eq!(r.rhs, 2.0);
            let expect = expr_masks(&BoolExpr::count(lits.clone(), cmp, 2), 3);
            assert_eq!(feasible_masks(&m), expect);
        }
    }

    #[test]
    fn equivalence_direct_and_negated() {
        let (mut m, v) = setup(2);
        let idx = equivalence(&mut m, Literal::pos(v[0]), Literal::pos(v[1])).unwrap();
        assert_eq!(row(&m, idx).terms, vec![(v[0], 1.0), (v[1], -1.0)]);
        assert_eq!(row(&m, idx).rhs, 0.0);
        assert_eq!(feasible_masks(&m), vec![0b00, 0b11]);

        // y1 ↔ ¬y2 becomes y1 + y2 = 1.
        let (mut m2, w) = setup(2);
        let idx2 = equivalence(&mut m2, Literal::pos(w[0]), Literal::neg(w[1])).unwrap();
        assert_eq!(row(&m2, idx2).terms, vec![(w[0], 1.0), (w[1], 1.0)]);
        assert_eq!(row(&m2, idx2).rhs, 1.0);
        assert_eq!(feasible_masks(&m2), vec![0b01, 0b10]);
    }

    #[test]
    fn implication_row_shape() {
        // y1 ∧ y2 → y3 ∨ y4:  −y1 − y2 + y3 + y4 ≥ −1.
        let (mut m, v) = setup(4);
        let idx = implication(
            &mut m,
            &[Literal::pos(v[0]), Literal::pos(v[1])],
            &[Literal::pos(v[2]), Literal::pos(v[3])],
        )
        .unwrap();
        let r = row(&m, idx);
        assert_eq!(
            r.terms,
            vec![(v[0], -1.0), (v[1], -1.0), (v[2], 1.0), (v[3], 1.0)]
        );
        assert_eq!(r.sense, Sense::Ge);
        assert_eq!(r.rhs, -1.0);
        let e = BoolExpr::implies(
            BoolExpr::and(vec![BoolExpr::var(v[0]), BoolExpr::var(v[1])]),
            BoolExpr::or(vec![BoolExpr::var(v[2]), BoolExpr::var(v[3])]),
        );
        assert_eq!(feasible_masks(&m), expr_masks(&e, 4));
    }

    #[test]
    fn horn_is_single_conclusion_implication() {
        let (mut m, v) = setup(3);
        let idx = horn(
            &mut m,
            &[Literal::pos(v[0]), Literal::pos(v[1])],
            Literal::pos(v[2]),
        )
        .unwrap();
        let r = row(&m, idx);
        assert_eq!(r.terms, vec![(v[0], -1.0), (v[1], -1.0), (v[2], 1.0)]);
        assert_eq!(r.rhs, -1.0);
    }

    #[test]
    fn disjunctive_implication_scales_rhs_side() {
        // y1 ∨ y2 ∨ y3 → y4 ∨ y5:  −y1 − y2 − y3 + 3y4 + 3y5 ≥ 0.
        let (mut m, v) = setup(5);
        let idx = disjunctive_implication(
            &mut m,
            &[Literal::pos(v[0]), Literal::pos(v[1]), Literal::pos(v[2])],
            &[Literal::pos(v[3]), Literal::pos(v[4])],
        )
        .unwrap();
        let r = row(&m, idx);
        assert_eq!(
            r.terms,
            vec![
                (v[0], -1.0),
                (v[1], -1.0),
                (v[2], -1.0),
                (v[3], 3.0),
                (v[4], 3.0)
            ]
        );
        assert_eq!(r.rhs, 0.0);
        let e = BoolExpr::implies(
            BoolExpr::or(vec![
                BoolExpr::var(v[0]),
                BoolExpr::var(v[1]),
                BoolExpr::var(v[2]),
            ]),
            BoolExpr::or(vec![BoolExpr::var(v[3]), BoolExpr::var(v[4])]),
        );
        assert_eq!(feasible_masks(&m), expr_masks(&e, 5));
    }

    #[test]
    fn conjunctive_implication_scales_lhs_side() {
        // y1 ∧ y2 → y3 ∧ y4 ∧ y5:  −3y1 − 3y2 + y3 + y4 + y5 ≥ −3.
        let (mut m, v) = setup(5);
        let idx = conjunctive_implication(
            &mut m,
            &[Literal::pos(v[0]), Literal::pos(v[1])],
            &[Literal::pos(v[2]), Literal::pos(v[3]), Literal::pos(v[4])],
        )
        .unwrap();
        let r = row(&m, idx);
        assert_eq!(
            r.terms,
            vec![
                (v[0], -3.0),
                (v[1], -3.0),
                (v[2], 1.0),
                (v[3], 1.0),
                (v[4], 1.0)
            ]
        );
        assert_eq!(r.rhs, -3.0);
        let e = BoolExpr::implies(
            BoolExpr::and(vec![BoolExpr::var(v[0]), BoolExpr::var(v[1])]),
            BoolExpr::and(vec![
                BoolExpr::var(v[2]),
                BoolExpr::var(v[3]),
                BoolExpr::var(v[4]),
            ]),
        );
        assert_eq!(feasible_masks(&m), expr_masks(&e, 5));
    }

    #[test]
    fn iff_conjunction_two_rows() {
        // (y1 ∧ y2) ↔ y3.
        let (mut m, v) = setup(3);
        let (r1, r2) = iff_conjunction(
            &mut m,
            &[Literal::pos(v[0]), Literal::pos(v[1])],
            Literal::pos(v[2]),
        )
        .unwrap();
        assert_eq!(
            row(&m, r1).terms,
            vec![(v[0], -1.0), (v[1], -1.0), (v[2], 1.0)]
        );
        assert_eq!(row(&m, r1).rhs, -1.0);
        assert_eq!(
            row(&m, r2).terms,
            vec![(v[0], 1.0), (v[1], 1.0), (v[2], -2.0)]
        );
        assert_eq!(row(&m, r2).rhs, 0.0);
        let e = BoolExpr::iff(
            BoolExpr::and(vec![BoolExpr::var(v[0]), BoolExpr::var(v[1])]),
            BoolExpr::var(v[2]),
        );
        assert_eq!(feasible_masks(&m), expr_masks(&e, 3));
    }

    #[test]
    fn cnf_naive_frozen_example() {
        // y1 ∧ (¬y2 ∨ ¬y3) emits rows y1 ≥ 1 and −y2 − y3 ≥ −1.
        let (mut m, v) = setup(3);
        let e = BoolExpr::or(vec![
            BoolExpr::and(vec![BoolExpr::var(v[0]), BoolExpr::not_var(v[1])]),
            BoolExpr::and(vec![BoolExpr::var(v[0]), BoolExpr::not_var(v[2])]),
        ]);
        let cnf = to_cnf_distributive(&e).unwrap();
        let rows = encode_cnf_naive(&mut m, &cnf).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(row(&m, rows[0]).terms, vec![(v[0], 1.0)]);
        assert_eq!(row(&m, rows[0]).rhs, 1.0);
        assert_eq!(row(&m, rows[1]).terms, vec![(v[1], -1.0), (v[2], -1.0)]);
        assert_eq!(row(&m, rows[1]).rhs, -1.0);
    }

    #[test]
    fn cnf_naive_all_equal_six_rows() {
        let (mut m, v) = setup(3);
        let e = BoolExpr::or(vec![
            BoolExpr::and(vec![
                BoolExpr::var(v[0]),
                BoolExpr::var(v[1]),
                BoolExpr::var(v[2]),
            ]),
            BoolExpr::and(vec![
                BoolExpr::not_var(v[0]),
                BoolExpr::not_var(v[1]),
                BoolExpr::not_var(v[2]),
            ]),
        ]);
        let cnf = to_cnf_distributive(&e).unwrap();
        let rows = encode_cnf_naive(&mut m, &cnf).unwrap();
        assert_eq!(rows.len(), 6);
        // First clause in canonical order: y1 ∨ ¬y2 → y1 − y2 ≥ 0.
        assert_eq!(row(&m, rows[0]).terms, vec![(v[0], 1.0), (v[1], -1.0)]);
        assert_eq!(row(&m, rows[0]).rhs, 0.0);
        assert_eq!(feasible_masks(&m), vec![0b000, 0b111]);
    }

    #[test]
    fn compact_iff_disjunctions_uses_two_rows() {
        let (mut m, v) = setup(4);
        let e = BoolExpr::iff(
            BoolExpr::or(vec![BoolExpr::var(v[0]), BoolExpr::var(v[1])]),
            BoolExpr::or(vec![BoolExpr::var(v[2]), BoolExpr::var(v[3])]),
        );
        let rows = encode_expr(&mut m, &e, EncodeStrategy::Compact).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(feasible_masks(&m), expr_masks(&e, 4));
    }

    #[test]
    fn compact_matches_naive_feasible_sets() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..120 {
            let nv = 5;
            let (mut mn, v) = setup(nv);
            let (mut mc, _) = setup(nv);
            let e = crate::boolexpr::testutil::random_expr(&mut rng, &v, 3);
            encode_expr(&mut mn, &e, EncodeStrategy::Naive).unwrap();
            encode_expr(&mut mc, &e, EncodeStrategy::Compact).unwrap();
            let expect = expr_masks(&e, nv as usize);
            assert_eq!(feasible_masks(&mn), expect, "naive {e:?}");
            assert_eq!(feasible_masks(&mc), expect, "compact {e:?}");
        }
    }

    #[test]
    fn integer_coefficients_always() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let (mut m, v) = setup(5);
            let e = crate::boolexpr::testutil::random_expr(&mut rng, &v, 3);
            for strat in [EncodeStrategy::Naive, EncodeStrategy::Compact] {
                encode_expr(&mut m, &e, strat).unwrap();
            }
            for c in m.constraints() {
                assert_eq!(c.rhs, c.rhs.round());
                for &(_, coef) in &c.terms {
                    assert_eq!(coef, coef.round(), "non-integer coefficient in {c:?}");
                }
            }
        }
    }

    #[test]
    fn top_level_and_splits_counts() {
        let (mut m, v) = setup(4);
        let e = BoolExpr::and(vec![
            BoolExpr::exactly_one(vec![Literal::pos(v[0]), Literal::pos(v[1])]),
            BoolExpr::implies(BoolExpr::var(v[2]), BoolExpr::var(v[3])),
        ]);
        let rows = encode_expr(&mut m, &e, EncodeStrategy::Compact).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(feasible_masks(&m), expr_masks(&e, 4));
    }

    #[test]
    fn negated_count_flips_comparator() {
        let (mut m, v) = setup(3);
        let lits: Vec<Literal> = v.iter().map(|&x| Literal::pos(x)).collect();
        let e = BoolExpr::Not(Box::new(BoolExpr::count(lits.clone(), CountCmp::AtMost, 1)));
        encode_expr(&mut m, &e, EncodeStrategy::Compact).unwrap();
        let r = &m.constraints()[0];
        assert_eq!(r.sense, Sense::Ge);
        assert_eq!(r.rhs, 2.0);
        assert_eq!(feasible_masks(&m), expr_masks(&e, 3));
    }

    #[test]
    fn nested_count_rejected() {
        let (mut m, v) = setup(3);
        let e = BoolExpr::or(vec![
            BoolExpr::var(v[0]),
            BoolExpr::exactly_one(vec![Literal::pos(v[1]), Literal::pos(v[2])]),
        ]);
        assert!(matches!(
            encode_expr(&mut m, &e, EncodeStrategy::Naive),
            Err(Error::CountPlacement(_))
        ));
    }

    #[test]
    fn multiclass_block_names_and_row() {
        let mut m = Model::new();
        let ids = multiclass_block(&mut m, "slot0", &[0.5, -0.25, 1.0]).unwrap();
        assert_eq!(m.var(ids[1]).name, "slot0_1");
        assert_eq!(m.var(ids[2]).objective, 1.0);
        assert_eq!(m.var(ids[0]).kind, VarKind::Binary);
        assert_eq!(m.rows_tagged("exactly-one"), 1);
        assert_eq!(feasible_masks(&m), vec![0b001, 0b010, 0b100]);
    }

    #[test]
    fn registry_and_model_share_no_state() {
        // Guard: encoding into a model tagged rows only; registry untouched.
        let mut reg = VarRegistry::new();
        let a = reg.intern("a").unwrap();
        let (mut m, v) = setup(1);
        assert_eq!(a, v[0]); // both zero-indexed, ids line up by construction
        disjunction(&mut m, &[Literal::pos(v[0])]).unwrap();
        assert_eq!(m.rows_tagged("disjunction"), 1);
    }
}
