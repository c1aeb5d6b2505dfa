//! Exact team selection for auto-chess games.
//!
//! A team of at most `m` heroes is scored by the heroes' powers plus the
//! alliance bonuses its composition unlocks. This crate loads hero/alliance
//! datasets, evaluates teams, builds the binary program, solves it exactly
//! by branch and bound, and implements the reductions to and from classic
//! graph problems along with brute-force oracles for cross-checking.

pub mod error;
pub mod evaluator;
pub mod ilp;
pub mod instance;
pub mod random;
pub mod reductions;
pub mod solver;

pub use error::{Error, Result};
pub use evaluator::{
    alliance_counts, check_decision, evaluate_team, render_breakdown, Evaluation, Team,
};
pub use ilp::{build_model, check_feasible, export_lp, import_lp, objective_value, LinearModel};
pub use instance::{
    compile_bonus_rules, load_instance, parse_instance, validate_instance, BonusKey, BonusRule,
    BonusTensorEntry, Hero, Instance, Violation,
};
pub use solver::{
    branch_and_bound, brute_force, brute_force_sized, optimistic_bound, solve_no_alliance,
    SearchOptions, Solution, TeamSize,
};
