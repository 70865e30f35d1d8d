//! Soft constraints: violating an expression is allowed but costs a fixed
//! penalty in the objective.
//!
//! The expression is Tseitin-defined (not asserted), producing a literal `c`
//! that tracks its truth value under every assignment. A binary indicator
//! `z` with objective `−penalty` is then tied to the complement of `c` by a
//! single row `z + c = 1`, so the solver pays exactly when it breaks the
//! constraint.

use crate::boolexpr::{tseitin_define, BoolExpr, FreshVars, VarId};
use crate::error::{Error, Result};
use crate::model::{Model, Sense};
use crate::recipes::push_lit;

/// What [`add_soft`] created, for reporting and inspection.
#[derive(Debug, Clone)]
pub struct SoftHandle {
    /// Binary that is 1 exactly when the constraint is violated.
    pub indicator: VarId,
    /// Tseitin gate variables introduced for the expression.
    pub aux: Vec<VarId>,
    /// Indices of all rows added (definitions plus the link row).
    pub rows: Vec<usize>,
}

/// Makes `expr` a soft constraint with the given positive, finite penalty.
///
/// Adds the defining rows for the expression (tag `soft-def`), the violation
/// indicator, and the link row (tag `soft-link`). Returns the handle; the
/// expression itself is *not* asserted. `Count` expressions have no clausal
/// definition and are rejected.
pub fn add_soft(model: &mut Model, expr: &BoolExpr, penalty: f64) -> Result<SoftHandle> {
    if !penalty.is_finite() || penalty <= 0.0 {
        return Err(Error::BadPenalty(penalty));
    }
    let (clauses, root, aux) = tseitin_define(expr, model)?;
    let mut rows = Vec::with_capacity(clauses.len() + 1);
    for clause in &clauses {
        let mut terms = Vec::with_capacity(clause.literals().len());
        let mut rhs = 1.0;
        for &l in clause.literals() {
            push_lit(&mut terms, &mut rhs, l, 1.0);
        }
        rows.push(model.add_constraint(terms, Sense::Ge, rhs, "soft-def")?);
    }
    let z = model.fresh_var("viol")?;
    model.set_objective(z, -penalty)?;
    let mut terms = vec![(z, 1.0)];
    let mut rhs = 1.0;
    push_lit(&mut terms, &mut rhs, root, 1.0);
    rows.push(model.add_constraint(terms, Sense::Eq, rhs, "soft-link")?);
    Ok(SoftHandle {
        indicator: z,
        aux,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::{CountCmp, DenseAssignment, Literal};
    use crate::model::SolveStatus;
    use crate::solver::{solve, solve_bruteforce};

    #[test]
    fn penalty_worth_paying_gets_paid() {
        // max y with soft !y at penalty 0.5: keep y, pay the fine.
        let mut m = Model::new();
        let y = m.add_binary("y", 1.0).unwrap();
        let h = add_soft(&mut m, &BoolExpr::not_var(y), 0.5).unwrap();
        let sol = solve(&m).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.is_true(y));
        assert!(sol.is_true(h.indicator));
        assert!((sol.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn heavy_penalty_enforces() {
        // Same but penalty 2: better to give up y.
        let mut m = Model::new();
        let y = m.add_binary("y", 1.0).unwrap();
        let h = add_soft(&mut m, &BoolExpr::not_var(y), 2.0).unwrap();
        let sol = solve(&m).unwrap();
        assert!(!sol.is_true(y));
        assert!(!sol.is_true(h.indicator));
        assert!(sol.objective.abs() < 1e-9);
    }

    #[test]
    fn indicator_tracks_violation_not_just_optimum() {
        // Pin y1 = y2 = 1 and soften "y1 -> !y2": indicator must be 1.
        let mut m = Model::new();
        let y1 = m.add_binary("y1", 0.0).unwrap();
        let y2 = m.add_binary("y2", 0.0).unwrap();
        m.add_constraint(vec![(y1, 1.0)], Sense::Eq, 1.0, "pin")
            .unwrap();
        m.add_constraint(vec![(y2, 1.0)], Sense::Eq, 1.0, "pin")
            .unwrap();
        let e = BoolExpr::implies(BoolExpr::var(y1), BoolExpr::not_var(y2));
        let h = add_soft(&mut m, &e, 3.0).unwrap();
        let sol = solve(&m).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.is_true(h.indicator));
        assert!((sol.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn bad_penalties_rejected() {
        let mut m = Model::new();
        let y = m.add_binary("y", 0.0).unwrap();
        for p in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                add_soft(&mut m, &BoolExpr::var(y), p),
                Err(Error::BadPenalty(_))
            ));
        }
    }

    #[test]
    fn count_rejected() {
        let mut m = Model::new();
        let y = m.add_binary("y", 0.0).unwrap();
        let e = BoolExpr::count(vec![Literal::pos(y)], CountCmp::AtLeast, 1);
        assert!(matches!(add_soft(&mut m, &e, 1.0), Err(Error::CountInCnf)));
    }

    #[test]
    fn matches_penalized_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..60 {
            // Base model: random objective, a few random hard rows.
            let nv = rng.gen_range(2..7);
            let mut base = Model::new();
            let vars: Vec<VarId> = (0..nv)
                .map(|i| {
                    base.add_binary(&format!("y{i}"), (rng.gen_range(-12..=12) as f64) / 4.0)
                        .unwrap()
                })
                .collect();
            for r in 0..rng.gen_range(0..3) {
                let mut terms = Vec::new();
                for &v in &vars {
                    if rng.gen_bool(0.5) {
                        terms.push((v, rng.gen_range(-2..=2) as f64));
                    }
                }
                base.add_constraint(
                    terms,
                    Sense::Le,
                    rng.gen_range(0..=3) as f64,
                    &format!("r{r}"),
                )
                .unwrap();
            }

            // Soft side: up to three random expressions with penalties.
            let mut soft_exprs = Vec::new();
            let mut softened = base.clone();
            for _ in 0..rng.gen_range(1..4) {
                let e = crate::boolexpr::testutil::random_expr(&mut rng, &vars, 2);
                let p = rng.gen_range(1..=8) as f64 / 2.0;
                add_soft(&mut softened, &e, p).unwrap();
                soft_exprs.push((e, p));
            }

            // Reference: enumerate original assignments, apply penalties by
            // direct evaluation.
            let mut best = f64::NEG_INFINITY;
            let mut a = DenseAssignment::new();
            for mask in 0u64..(1 << nv) {
                let x: Vec<f64> = (0..nv).map(|i| ((mask >> i) & 1) as f64).collect();
                if !base.check_feasible(&x, 1e-9).is_empty() {
                    continue;
                }
                for (i, &v) in vars.iter().enumerate() {
                    a.set(v, (mask >> i) & 1 == 1);
                }
                let mut val = base.objective_value(&x);
                for (e, p) in &soft_exprs {
                    if !e.eval(&a).unwrap() {
                        val -= p;
                    }
                }
                best = best.max(val);
            }

            let sol = solve(&softened).unwrap();
            let brute = solve_bruteforce(&softened).unwrap();
            if best == f64::NEG_INFINITY {
                assert_eq!(sol.status, SolveStatus::Infeasible);
            } else {
                assert_eq!(sol.status, SolveStatus::Optimal);
                assert!(
                    (sol.objective - best).abs() < 1e-6,
                    "solver {} vs reference {best}",
                    sol.objective
                );
                assert!((brute.objective - best).abs() < 1e-6);
            }
        }
    }
}
