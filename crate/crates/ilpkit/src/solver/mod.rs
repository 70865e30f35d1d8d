//! Exact solver for desk-scale 0-1 ILPs: LP relaxations by two-phase primal
//! simplex, integrality by depth-first branch-and-bound.

mod brute;
mod simplex;

pub use brute::solve_bruteforce;
pub use simplex::{lp_solve_bounded, LpOutcome, PivotRule, PIVOT_TOL};

use std::time::Instant;

use crate::error::Result;
use crate::model::{Model, Solution, SolveStatus, VarKind};

/// A solution is integral when every integer variable is within this of a
/// whole number.
pub const INT_TOL: f64 = 1e-6;

/// Objective comparisons (incumbent updates, bound pruning) use this slack.
pub const OBJ_TOL: f64 = 1e-9;

/// Which fractional variable to branch on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Fractional part closest to one half; ties to the lowest variable id.
    #[default]
    MostFractional,
    /// Lowest variable id among fractional variables.
    FirstFractional,
}

/// Search limits and rule selection. `Default` means: no limits, most-
/// fractional branching, largest-coefficient pivoting with Bland fallback.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub node_limit: Option<u64>,
    pub time_limit: Option<std::time::Duration>,
    pub branch_rule: BranchRule,
    pub pivot_rule: PivotRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: None,
            time_limit: None,
            branch_rule: BranchRule::MostFractional,
            pivot_rule: PivotRule::LargestCoefficient,
        }
    }
}

/// Solves the LP relaxation only (integrality dropped).
pub fn lp_solve(model: &Model) -> Result<LpOutcome> {
    lp_solve_bounded(model, None)
}

/// Solves the model exactly with default configuration.
pub fn solve(model: &Model) -> Result<Solution> {
    solve_with(model, &SolverConfig::default())
}

/// Branch-and-bound over the LP relaxation.
///
/// Depth-first: the most recently created node is explored next, and of a
/// branch pair the down branch (upper bound floored) is explored before the
/// up branch. Nodes whose LP bound cannot beat the incumbent are pruned.
/// With no limits configured the result is exact: `Optimal` or `Infeasible`
/// (or `Unbounded` if the relaxation admits an improving ray).
pub fn solve_with(model: &Model, config: &SolverConfig) -> Result<Solution> {
    let started = Instant::now();
    let root_bounds: Vec<(f64, f64)> = model.vars().iter().map(|v| (v.lower, v.upper)).collect();

    struct Node {
        bounds: Vec<(f64, f64)>,
        /// LP value of the parent, an upper bound for this node's LP.
        parent_bound: f64,
    }

    let mut stack = vec![Node {
        bounds: root_bounds,
        parent_bound: f64::INFINITY,
    }];
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes: u64 = 0;
    let mut stopped: Option<SolveStatus> = None;

    while let Some(node) = stack.pop() {
        if let Some(limit) = config.node_limit {
            if nodes >= limit {
                stopped = Some(SolveStatus::NodeLimit);
                break;
            }
        }
        if let Some(limit) = config.time_limit {
            if started.elapsed() >= limit {
                stopped = Some(SolveStatus::TimeLimit);
                break;
            }
        }
        nodes += 1;

        // Bound pruning before the LP when the parent already can't win.
        if let Some((best, _)) = &incumbent {
            if node.parent_bound <= *best + OBJ_TOL {
                continue;
            }
        }

        let outcome = lp_solve_bounded(model, Some(&node.bounds))?;
        let (bound, relax) = match outcome {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                // An unbounded relaxation at any node means the ILP itself
                // has no finite optimum along that ray (continuous vars) or
                // the model is pathological; report it rather than loop.
                return Ok(Solution {
                    status: SolveStatus::Unbounded,
                    objective: f64::INFINITY,
                    values: Vec::new(),
                    nodes,
                });
            }
            LpOutcome::Optimal { objective, values } => (objective, values),
        };
        debug_assert!(
            bound <= node.parent_bound + 1e-6,
            "child LP bound {bound} exceeds parent {}",
            node.parent_bound
        );
        if let Some((best, _)) = &incumbent {
            if bound <= *best + OBJ_TOL {
                continue;
            }
        }

        match pick_branch_var(model, &relax, config.branch_rule) {
            None => {
                // Integral: candidate incumbent.
                let better = match &incumbent {
                    None => true,
                    Some((best, _)) => bound > *best + OBJ_TOL,
                };
                if better {
                    incumbent = Some((bound, round_integers(model, relax)));
                }
            }
            Some(j) => {
                let x = relax[j];
                let floor = x.floor();
                // Push the up branch first so the down branch pops first.
                let mut up = node.bounds.clone();
                up[j].0 = floor + 1.0;
                stack.push(Node {
                    bounds: up,
                    parent_bound: bound,
                });
                let mut down = node.bounds;
                down[j].1 = floor;
                stack.push(Node {
                    bounds: down,
                    parent_bound: bound,
                });
            }
        }
    }

    let status = match (&incumbent, stopped) {
        (_, Some(limit_status)) => limit_status,
        (Some(_), None) => SolveStatus::Optimal,
        (None, None) => SolveStatus::Infeasible,
    };
    Ok(match incumbent {
        Some((objective, values)) => Solution {
            status,
            objective,
            values,
            nodes,
        },
        None => Solution {
            status,
            objective: f64::NEG_INFINITY,
            values: Vec::new(),
            nodes,
        },
    })
}

/// Index of the variable to branch on, or `None` when integral.
fn pick_branch_var(model: &Model, x: &[f64], rule: BranchRule) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in model.vars().iter().enumerate() {
        if !matches!(v.kind, VarKind::Binary | VarKind::Integer) {
            continue;
        }
        let frac = x[j] - x[j].floor();
        let dist = (frac - 0.5).abs();
        if frac > INT_TOL && frac < 1.0 - INT_TOL {
            match rule {
                BranchRule::FirstFractional => return Some(j),
                BranchRule::MostFractional => {
                    // Strict `<` keeps the lowest id on ties.
                    if best.map_or(true, |(_, d)| dist < d) {
                        best = Some((j, dist));
                    }
                }
            }
        }
    }
    best.map(|(j, _)| j)
}

/// Snaps near-integral values of integer variables to exact integers.
fn round_integers(model: &Model, mut x: Vec<f64>) -> Vec<f64> {
    for (j, v) in model.vars().iter().enumerate() {
        if matches!(v.kind, VarKind::Binary | VarKind::Integer) {
            x[j] = x[j].round();
        }
    }
    x
}
