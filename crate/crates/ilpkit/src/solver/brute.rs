//! Exhaustive reference solver for small models.
//!
//! Enumerates every assignment of the integer variables by depth-first
//! search, keeping row activities incrementally updated. Models that also
//! have continuous variables get those optimized by the LP simplex with the
//! integers fixed. Intended as an independent check on the branch-and-bound
//! path, not for performance.

use super::simplex::{lp_solve_bounded, LpOutcome};
use super::OBJ_TOL;
use crate::error::{Error, Result};
use crate::model::{Model, Sense, Solution, SolveStatus, VarKind};

/// Largest number of integer variables the exhaustive solver accepts.
pub const BRUTE_FORCE_CAP: usize = 25;

/// Solves by complete enumeration of integer assignments.
///
/// Exact like [`super::solve`], but with cost exponential in the number of
/// integer variables; more than [`BRUTE_FORCE_CAP`] of them is an error.
/// Integer variables must have finite bounds.
pub fn solve_bruteforce(model: &Model) -> Result<Solution> {
    let int_vars: Vec<usize> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v.kind, VarKind::Binary | VarKind::Integer))
        .map(|(i, _)| i)
        .collect();
    if int_vars.len() > BRUTE_FORCE_CAP {
        return Err(Error::SizeCap {
            limit: BRUTE_FORCE_CAP,
        });
    }
    for &j in &int_vars {
        let v = &model.vars()[j];
        if !v.lower.is_finite() || !v.upper.is_finite() {
            return Err(Error::UnboundedBelow {
                name: v.name.clone(),
            });
        }
    }
    let has_continuous = model.vars().iter().any(|v| v.kind == VarKind::Continuous);

    let mut x: Vec<f64> = model.vars().iter().map(|v| v.lower).collect();
    // Row activities for the current partial assignment (integers at their
    // lower bounds, continuous at lower bounds too when pure-integer).
    let mut activity: Vec<f64> = model.constraints().iter().map(|c| c.activity(&x)).collect();

    struct Search<'a> {
        model: &'a Model,
        int_vars: &'a [usize],
        has_continuous: bool,
        best: Option<(f64, Vec<f64>)>,
    }

    impl Search<'_> {
        fn recurse(
            &mut self,
            depth: usize,
            x: &mut Vec<f64>,
            activity: &mut Vec<f64>,
        ) -> Result<()> {
            if depth == self.int_vars.len() {
                self.leaf(x, activity)?;
                return Ok(());
            }
            let j = self.int_vars[depth];
            let lo = self.model.vars()[j].lower as i64;
            let hi = self.model.vars()[j].upper as i64;
            // x[j] arrives at lo with activities consistent.
            for val in lo..=hi {
                let delta = val as f64 - x[j];
                if delta != 0.0 {
                    for (ci, c) in self.model.constraints().iter().enumerate() {
                        // Dense scan is fine at this scale; rows are short.
                        for &(v, a) in &c.terms {
                            if v.index() == j {
                                activity[ci] += a * delta;
                            }
                        }
                    }
                    x[j] = val as f64;
                }
                self.recurse(depth + 1, x, activity)?;
            }
            // Restore to lower bound for the caller.
            let delta = lo as f64 - x[j];
            if delta != 0.0 {
                for (ci, c) in self.model.constraints().iter().enumerate() {
                    for &(v, a) in &c.terms {
                        if v.index() == j {
                            activity[ci] += a * delta;
                        }
                    }
                }
                x[j] = lo as f64;
            }
            Ok(())
        }

        fn leaf(&mut self, x: &mut Vec<f64>, activity: &[f64]) -> Result<()> {
            if self.has_continuous {
                // Fix integers, let the LP place the continuous variables.
                let bounds: Vec<(f64, f64)> = self
                    .model
                    .vars()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        if matches!(v.kind, VarKind::Binary | VarKind::Integer) {
                            (x[i], x[i])
                        } else {
                            (v.lower, v.upper)
                        }
                    })
                    .collect();
                match lp_solve_bounded(self.model, Some(&bounds))? {
                    LpOutcome::Optimal { objective, values } => {
                        if self
                            .best
                            .as_ref()
                            .map_or(true, |(b, _)| objective > *b + OBJ_TOL)
                        {
                            self.best = Some((objective, values));
                        }
                    }
                    LpOutcome::Infeasible => {}
                    LpOutcome::Unbounded => {
                        return Err(Error::Numerics(
                            "continuous block unbounded under fixed integers".into(),
                        ))
                    }
                }
                return Ok(());
            }
            for (ci, c) in self.model.constraints().iter().enumerate() {
                let ok = match c.sense {
                    Sense::Le => activity[ci] <= c.rhs + 1e-9,
                    Sense::Ge => activity[ci] >= c.rhs - 1e-9,
                    Sense::Eq => (activity[ci] - c.rhs).abs() <= 1e-9,
                };
                if !ok {
                    return Ok(());
                }
            }
            let obj = self.model.objective_value(x);
            if self.best.as_ref().map_or(true, |(b, _)| obj > *b + OBJ_TOL) {
                self.best = Some((obj, x.clone()));
            }
            Ok(())
        }
    }

    let mut search = Search {
        model,
        int_vars: &int_vars,
        has_continuous,
        best: None,
    };
    search.recurse(0, &mut x, &mut activity)?;

    Ok(match search.best {
        Some((objective, values)) => Solution {
            status: SolveStatus::Optimal,
            objective,
            values,
            nodes: 0,
        },
        None => Solution {
            status: SolveStatus::Infeasible,
            objective: f64::NEG_INFINITY,
            values: Vec::new(),
            nodes: 0,
        },
    })
}
