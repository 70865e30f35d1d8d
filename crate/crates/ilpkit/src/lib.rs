//! Compile Boolean constraints over 0-1 decision variables into integer
//! linear programs, and solve the resulting desk-scale models exactly.
//!
//! The pipeline: build a [`BoolExpr`] (or parse one), encode it into a
//! [`Model`] as linear rows via the recipe layer, optionally add structural
//! graph constraints or soft (penalized) constraints, then call [`solve`].

pub mod bench;
pub mod boolexpr;
pub mod demos;
pub mod error;
pub mod graphs;
pub mod model;
pub mod oracles;
pub mod parse;
pub mod recipes;
pub mod soft;
pub mod solver;

pub use boolexpr::{
    Assignment, BoolExpr, Clause, Cnf, CountCmp, DenseAssignment, FreshVars, Literal, VarId,
    VarRegistry,
};
pub use error::{Error, Result};
pub use model::{
    LinearConstraint, Model, ModelVar, Sense, Solution, SolveStatus, VarKind, Violation,
};
pub use parse::{parse_constraint_file, parse_expr, print_expr, ConstraintLine, ResolveVar};
pub use recipes::EncodeStrategy;
pub use solver::{
    lp_solve, solve, solve_bruteforce, solve_with, BranchRule, LpOutcome, PivotRule, SolverConfig,
};
