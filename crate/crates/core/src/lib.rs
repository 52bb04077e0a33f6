//! Sequential allocation of indivisible goods.
//!
//! Agents take turns picking items according to a *policy* (a picking
//! sequence). Given exact additive utilities, this crate answers what
//! utilitarian or egalitarian welfare is possible or necessary over four
//! nested policy classes:
//!
//! * [`PolicyClass::All`]: any sequence of turns,
//! * [`PolicyClass::Balanced`]: every agent picks equally often,
//! * [`PolicyClass::RecursivelyBalanced`]: every agent picks once per round,
//! * [`PolicyClass::BalancedAlternating`]: every round reverses the previous one.
//!
//! Exact polynomial algorithms live in [`solvers`]; everything else is
//! answered by exhaustive enumeration in [`oracle`], guarded by a size cap.
//! [`reductions`] builds the hardness gadgets used as benchmark corpora.

pub mod error;
pub mod mechanism;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
pub use mechanism::{
    improve_allocation, is_reachable, pareto_check_bruteforce, simulate, synthesize_policy,
    Improvement, ParetoVerdict, Simulator, StuckState, SynthesisResult,
};
pub use model::{
    Allocation, DecisionProblem, Direction, Instance, Mode, Objective, Policy, PolicyClass,
    PreferenceProfile, Utility, WelfareReport,
};
pub use solvers::{DecisionAnswer, Method, OptimumResult};
