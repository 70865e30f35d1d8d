//! Two-phase primal simplex over a dense tableau.
//!
//! The LP relaxation handed in by the branch-and-bound layer is first put in
//! standard form: every variable is shifted to lower bound 0, finite upper
//! bounds become explicit `≤` rows, rows are normalized to nonnegative
//! right-hand sides, and slack/surplus variables turn inequalities into
//! equations. Phase one minimizes the sum of artificial variables to find a
//! basic feasible point; phase two optimizes the true objective from there.
//!
//! Maximization throughout. Reduced costs use the `c_j − z_j` convention, so
//! a basis is optimal when every reduced cost is ≤ tolerance.

use crate::error::{Error, Result};
use crate::model::{Model, Sense};

/// Pivot column selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest column index with positive reduced cost. Cycle-proof.
    #[default]
    Bland,
    /// Largest reduced cost; falls back to Bland after long degenerate runs.
    LargestCoefficient,
}

/// Reduced costs and ratio tests treat magnitudes below this as zero.
pub const PIVOT_TOL: f64 = 1e-9;

/// After this many consecutive non-improving pivots under
/// [`PivotRule::LargestCoefficient`], selection falls back to Bland's rule,
/// which cannot cycle.
const DEGENERACY_PATIENCE: u32 = 256;

/// Outcome of an LP solve.
#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// Optimal objective and one value per model variable.
    Optimal {
        objective: f64,
        values: Vec<f64>,
    },
    Infeasible,
    Unbounded,
}

/// Solves the LP relaxation of `model` (integrality dropped) with its
/// objective, under optional overriding bounds (used by branch-and-bound to
/// tighten individual variables). `bounds[i]` replaces the model's bounds for
/// variable `i` when present.
pub fn lp_solve_bounded(model: &Model, bounds: Option<&[(f64, f64)]>) -> Result<LpOutcome> {
    let n = model.num_vars();
    let var_bounds: Vec<(f64, f64)> = match bounds {
        Some(b) => {
            debug_assert_eq!(b.len(), n);
            b.to_vec()
        }
        None => model.vars().iter().map(|v| (v.lower, v.upper)).collect(),
    };
    for (i, &(lo, hi)) in var_bounds.iter().enumerate() {
        if lo > hi {
            // Branching can cross bounds; that subproblem is simply empty.
            return Ok(LpOutcome::Infeasible);
        }
        if !lo.is_finite() {
            return Err(Error::UnboundedBelow {
                name: model.vars()[i].name.clone(),
            });
        }
    }

    // Shift x = lo + x', x' ≥ 0. Row right-hand sides absorb Σ a_ij lo_j;
    // the objective constant absorbs Σ c_j lo_j.
    let shift: Vec<f64> = var_bounds.iter().map(|&(lo, _)| lo).collect();
    let mut obj_const = 0.0;
    let mut obj = vec![0.0; n];
    for (j, v) in model.vars().iter().enumerate() {
        obj[j] = v.objective;
        obj_const += v.objective * shift[j];
    }

    // Collect rows: model rows plus one ≤ row per finite upper bound.
    struct Row {
        coeffs: Vec<f64>,
        sense: Sense,
        rhs: f64,
    }
    let mut rows: Vec<Row> = Vec::with_capacity(model.num_constraints() + n);
    for c in model.constraints() {
        let mut coeffs = vec![0.0; n];
        let mut rhs = c.rhs;
        for &(v, a) in &c.terms {
            coeffs[v.index()] = a;
            rhs -= a * shift[v.index()];
        }
        rows.push(Row {
            coeffs,
            sense: c.sense,
            rhs,
        });
    }
    for (j, &(lo, hi)) in var_bounds.iter().enumerate() {
        if hi.is_finite() && hi - lo >= 0.0 {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push(Row {
                coeffs,
                sense: Sense::Le,
                rhs: hi - lo,
            });
        }
    }

    // Normalize to b ≥ 0 (flip rows), then add slack/surplus/artificials.
    let m = rows.len();
    for r in rows.iter_mut() {
        if r.rhs < 0.0 {
            r.rhs = -r.rhs;
            r.coeffs.iter_mut().for_each(|a| *a = -*a);
            r.sense = match r.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_slack = rows
        .iter()
        .filter(|r| matches!(r.sense, Sense::Le | Sense::Ge))
        .count();
    let n_artificial = rows
        .iter()
        .filter(|r| matches!(r.sense, Sense::Ge | Sense::Eq))
        .count();
    let total = n + n_slack + n_artificial;

    // Tableau layout: columns [structural | slack | artificial | rhs], one
    // row per constraint, then the phase-2 objective row, then phase-1's.
    let width = total + 1;
    let mut t = vec![0.0; (m + 2) * width];
    let obj2_row = m; // true objective (c_j − z_j form)
    let obj1_row = m + 1; // artificial objective
    let idx = |r: usize, c: usize| r * width + c;

    let mut basis = vec![usize::MAX; m];
    let mut slack_cursor = n;
    let mut art_cursor = n + n_slack;
    let mut artificial_cols = Vec::with_capacity(n_artificial);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..n {
            t[idx(i, j)] = r.coeffs[j];
        }
        t[idx(i, total)] = r.rhs;
        match r.sense {
            Sense::Le => {
                t[idx(i, slack_cursor)] = 1.0;
                basis[i] = slack_cursor;
                slack_cursor += 1;
            }
            Sense::Ge => {
                t[idx(i, slack_cursor)] = -1.0;
                slack_cursor += 1;
                t[idx(i, art_cursor)] = 1.0;
                basis[i] = art_cursor;
                artificial_cols.push(art_cursor);
                art_cursor += 1;
            }
            Sense::Eq => {
                t[idx(i, art_cursor)] = 1.0;
                basis[i] = art_cursor;
                artificial_cols.push(art_cursor);
                art_cursor += 1;
            }
        }
    }

    // Phase-2 objective row: reduced costs start as c_j (slack basis ⇒ z = 0),
    // with the rhs cell holding −objective so it stays in sync under pivots.
    for j in 0..n {
        t[idx(obj2_row, j)] = obj[j];
    }
    // Phase-1 objective: maximize −Σ artificials. Express reduced costs for
    // the starting basis by adding each artificial row into the objective row
    // (price-out), so basic columns have reduced cost 0.
    for j in 0..total {
        let mut v = 0.0;
        for (i, r) in rows.iter().enumerate() {
            if matches!(r.sense, Sense::Ge | Sense::Eq) {
                v += t[idx(i, j)];
            }
        }
        if artificial_cols.contains(&j) {
            v -= 1.0;
        }
        t[idx(obj1_row, j)] = v;
    }
    let mut phase1_rhs = 0.0;
    for (i, r) in rows.iter().enumerate() {
        if matches!(r.sense, Sense::Ge | Sense::Eq) {
            phase1_rhs += t[idx(i, total)];
        }
    }
    t[idx(obj1_row, total)] = phase1_rhs;

    if n_artificial > 0 {
        match run_simplex(
            &mut t,
            width,
            m,
            obj1_row,
            total,
            &mut basis,
            PivotRule::Bland,
        ) {
            SimplexEnd::Optimal => {}
            SimplexEnd::Unbounded => {
                // Phase-1 objective is bounded above by 0; this cannot happen.
                return Err(Error::Numerics(
                    "phase-1 objective reported unbounded".into(),
                ));
            }
        }
        // Infeasible iff artificials cannot all reach zero.
        if t[idx(obj1_row, total)] > 1e-7 {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive any artificial still in the basis out (degenerate rows).
        for i in 0..m {
            if artificial_cols.contains(&basis[i]) {
                let pivot_col = (0..n + n_slack).find(|&j| t[idx(i, j)].abs() > PIVOT_TOL);
                if let Some(j) = pivot_col {
                    pivot(&mut t, width, m + 2, i, j);
                    basis[i] = j;
                }
                // A fully zero row is redundant; the artificial stays basic
                // at value 0 and never re-enters, which is harmless.
            }
        }
        // Erase artificial columns so phase 2 cannot pivot them back in.
        for &j in &artificial_cols {
            for r in 0..m + 2 {
                t[idx(r, j)] = 0.0;
            }
        }
        // Re-derive the phase-2 reduced-cost row for the current basis.
        // r_j = c_j − c_B · B⁻¹ A_j; the body rows already hold B⁻¹ A.
        for j in 0..total {
            let mut v = if j < n { obj[j] } else { 0.0 };
            for i in 0..m {
                let cb = if basis[i] < n { obj[basis[i]] } else { 0.0 };
                v -= cb * t[idx(i, j)];
            }
            t[idx(obj2_row, j)] = v;
        }
        // The rhs column of the objective row stores −value: value = c_B b.
        let mut value = 0.0;
        for i in 0..m {
            let cb = if basis[i] < n { obj[basis[i]] } else { 0.0 };
            value += cb * t[idx(i, total)];
        }
        t[idx(obj2_row, total)] = -value;
    }

    match run_simplex(
        &mut t,
        width,
        m,
        obj2_row,
        total,
        &mut basis,
        PivotRule::LargestCoefficient,
    ) {
        SimplexEnd::Optimal => {}
        SimplexEnd::Unbounded => return Ok(LpOutcome::Unbounded),
    }

    let mut x = shift;
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] += t[idx(i, total)];
        }
    }
    // Clamp the pennies of float noise so downstream integrality checks and
    // feasibility reports see clean values.
    for (j, v) in x.iter_mut().enumerate() {
        let (lo, hi) = var_bounds[j];
        if *v < lo {
            *v = lo;
        }
        if *v > hi {
            *v = hi;
        }
    }
    let objective = -t[idx(obj2_row, total)] + obj_const;
    Ok(LpOutcome::Optimal {
        objective,
        values: x,
    })
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

/// Pivots until no positive reduced cost remains (optimal) or a column with
/// positive reduced cost has no positive body coefficient (unbounded).
fn run_simplex(
    t: &mut [f64],
    width: usize,
    m: usize,
    obj_row: usize,
    rhs_col: usize,
    basis: &mut [usize],
    rule: PivotRule,
) -> SimplexEnd {
    let idx = |r: usize, c: usize| r * width + c;
    let mut stalled: u32 = 0;
    loop {
        let use_bland = rule == PivotRule::Bland || stalled >= DEGENERACY_PATIENCE;
        let mut entering = None;
        if use_bland {
            for j in 0..rhs_col {
                if t[idx(obj_row, j)] > PIVOT_TOL {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best = PIVOT_TOL;
            for j in 0..rhs_col {
                let r = t[idx(obj_row, j)];
                if r > best {
                    best = r;
                    entering = Some(j);
                }
            }
        }
        let Some(e) = entering else {
            return SimplexEnd::Optimal;
        };

        // Ratio test; ties to the smallest basis index to avoid cycling.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[idx(i, e)];
            if a > PIVOT_TOL {
                let ratio = t[idx(i, rhs_col)] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_TOL
                            || (ratio < lr + PIVOT_TOL && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((l, ratio)) = leave else {
            return SimplexEnd::Unbounded;
        };
        stalled = if ratio.abs() <= PIVOT_TOL {
            stalled.saturating_add(1)
        } else {
            0
        };
        let nrows = t.len() / width;
        pivot(t, width, nrows, l, e);
        basis[l] = e;
    }
}

/// Gauss-Jordan step on the full tableau (all `nrows` rows, both objectives).
fn pivot(t: &mut [f64], width: usize, nrows: usize, prow: usize, pcol: usize) {
    let idx = |r: usize, c: usize| r * width + c;
    let p = t[idx(prow, pcol)];
    debug_assert!(p.abs() > PIVOT_TOL, "pivot on a zero element");
    let inv = 1.0 / p;
    for c in 0..width {
        t[idx(prow, c)] *= inv;
    }
    t[idx(prow, pcol)] = 1.0;
    for r in 0..nrows {
        if r == prow {
            continue;
        }
        let factor = t[idx(r, pcol)];
        if factor == 0.0 {
            continue;
        }
        for c in 0..width {
            t[idx(r, c)] -= factor * t[idx(prow, c)];
        }
        t[idx(r, pcol)] = 0.0;
    }
}
