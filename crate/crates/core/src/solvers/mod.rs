//! Exact algorithms and the decision dispatcher.
//!
//! | query                                   | route                      |
//! |-----------------------------------------|----------------------------|
//! | max utilitarian, all policies           | per-item maximum + repair  |
//! | min egalitarian, all policies           | constant policy            |
//! | max utilitarian, balanced               | min-cost max-flow + repair |
//! | max egalitarian, all policies, `m = n`  | bottleneck matching        |
//! | max (either), balanced, 2 agents        | item-by-item DP            |
//! | max (either), rec. balanced, 2 agents, identical rankings | round DP |
//!
//! Everything else goes to the exhaustive [`oracle`](crate::oracle).
//! "Repair" is [`improve_allocation`](crate::mechanism::improve_allocation),
//! which turns an optimal allocation into a reachable one without hurting
//! anybody, so every reported value is attained by its witness policy.

mod flow;
mod house;
mod two_agent;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanism::{improve_with, welfare_of};
use crate::model::{
    Allocation, DecisionProblem, Direction, Instance, Mode, Objective, Policy, PolicyClass, Utility,
};
use crate::oracle::{self, OracleConfig};

pub use house::{house_allocation_egalitarian, house_allocation_max_egalitarian};
pub use two_agent::{two_agent_balanced_max, two_agent_rb_identical_max};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    PolynomialExact,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimumResult {
    pub value: Utility,
    pub witness: Policy,
    pub witness_allocation: Allocation,
    pub method: Method,
}

impl OptimumResult {
    /// Re-simulates `witness` and checks that it attains `value`.
    pub(crate) fn verified(
        inst: &Instance,
        value: Utility,
        witness: Policy,
        objective: Objective,
        method: Method,
    ) -> Result<Self> {
        let (alloc, w) = welfare_of(inst, &witness)?;
        if w.get(objective) != value {
            return Err(Error::Verification(format!(
                "policy {witness} yields {objective:?} welfare {} but {value} was reported",
                w.get(objective)
            )));
        }
        Ok(OptimumResult {
            value,
            witness,
            witness_allocation: alloc,
            method,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionAnswer {
    pub answer: bool,
    /// Yes-witness for Possible, counterexample for a failed Necessary.
    pub witness: Option<Policy>,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub oracle: OracleConfig,
    /// Refuse to fall back to enumeration.
    pub exact_only: bool,
}

/// Sum over items of the best utility any agent has for it, realised by a
/// policy.
pub fn max_utilitarian_all(inst: &Instance) -> Result<OptimumResult> {
    let n = inst.n_agents();
    let owner: Vec<usize> = (0..inst.n_items())
        .map(|j| {
            // lowest index among the maximisers
            (0..n).rev().max_by_key(|&a| inst.utility(a, j)).unwrap_or(0)
        })
        .collect();
    let value: Utility = (0..inst.n_items())
        .map(|j| (0..n).map(|a| inst.utility(a, j)).max().unwrap_or(0))
        .sum();
    let improved = improve_with(&inst.rankings(), &Allocation::new(owner, n)?);
    OptimumResult::verified(inst, value, improved.policy, Objective::Utilitarian, Method::PolynomialExact)
}

/// Zero as soon as there are two agents: agent 1 takes everything.
pub fn min_egalitarian_all(inst: &Instance) -> Result<OptimumResult> {
    let value = if inst.n_agents() == 1 { inst.total_utility(0) } else { 0 };
    let witness = Policy::new(vec![0; inst.n_items()]);
    OptimumResult::verified(inst, value, witness, Objective::Egalitarian, Method::PolynomialExact)
}

/// Optimal balanced assignment as a min-cost max-flow
/// (source → agent cap `m/n`, agent → item cap 1 cost `-u`, item → sink cap 1).
pub fn max_utilitarian_balanced(inst: &Instance) -> Result<OptimumResult> {
    let flow = balanced_flow(inst)?;
    if flow.flow != inst.n_items() as i64 || flow.item_flows.iter().any(|&f| f != 1) {
        return Err(Error::Verification("flow does not saturate every item".into()));
    }
    let improved = improve_with(&inst.rankings(), &flow.allocation);
    let value = (-flow.cost) as Utility;
    if inst.welfare(&improved.allocation).utilitarian != value {
        return Err(Error::Verification("improvement changed the flow optimum".into()));
    }
    OptimumResult::verified(inst, value, improved.policy, Objective::Utilitarian, Method::PolynomialExact)
}

#[derive(Debug)]
struct BalancedFlow {
    allocation: Allocation,
    flow: i64,
    cost: i64,
    /// Flow on each item → sink edge.
    item_flows: Vec<i64>,
}

fn balanced_flow(inst: &Instance) -> Result<BalancedFlow> {
    let (n, m) = (inst.n_agents(), inst.n_items());
    if m % n != 0 {
        return Err(Error::Divisibility { items: m, agents: n });
    }
    let k = (m / n) as i64;
    let (source, sink) = (0, n + m + 1);
    let agent_node = |a: usize| 1 + a;
    let item_node = |j: usize| 1 + n + j;
    let mut net = flow::MinCostFlow::new(n + m + 2);
    let mut assign = Vec::with_capacity(n * m);
    for a in 0..n {
        net.add_edge(source, agent_node(a), k, 0);
        for j in 0..m {
            let e = net.add_edge(agent_node(a), item_node(j), 1, -(inst.utility(a, j) as i64));
            assign.push((a, j, e));
        }
    }
    let sink_edges: Vec<_> = (0..m).map(|j| net.add_edge(item_node(j), sink, 1, 0)).collect();
    let (total, cost) = net.run(source, sink);
    let mut owner = vec![usize::MAX; m];
    for &(a, j, e) in &assign {
        if net.flow(e) == 1 {
            owner[j] = a;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::Verification(format!("flow of {total} does not saturate {m} items")));
    }
    Ok(BalancedFlow {
        allocation: Allocation::new(owner, n)?,
        flow: total,
        cost,
        item_flows: sink_edges.iter().map(|&e| net.flow(e)).collect(),
    })
}

fn no_exact(what: String, opts: &SolveOptions) -> Result<()> {
    if opts.exact_only {
        Err(Error::NoExactAlgorithm(what))
    } else {
        Ok(())
    }
}

/// Optimum over a class. Restricted classes need `m` divisible by `n`
/// (see [`Instance::pad_to_multiple`]).
pub fn solve(
    inst: &Instance,
    class: PolicyClass,
    objective: Objective,
    direction: Direction,
    opts: &SolveOptions,
) -> Result<OptimumResult> {
    use Direction::*;
    use Objective::*;
    use PolicyClass::*;
    let (n, m) = (inst.n_agents(), inst.n_items());
    if class.is_restricted() && m % n != 0 {
        return Err(Error::Divisibility { items: m, agents: n });
    }
    match (class, objective, direction) {
        (All, Utilitarian, Max) => max_utilitarian_all(inst),
        (All, Egalitarian, Min) => min_egalitarian_all(inst),
        (Balanced, Utilitarian, Max) => max_utilitarian_balanced(inst),
        (All, Egalitarian, Max) if m == n => house_allocation_max_egalitarian(inst),
        (Balanced, Egalitarian, Max) if n == 2 => two_agent_balanced_max(inst, objective),
        (RecursivelyBalanced, _, Max) if n == 2 && inst.rankings().all_identical() => {
            two_agent_rb_identical_max(inst, objective)
        }
        _ => {
            no_exact(format!("{direction:?} {objective:?} welfare over {class} policies"), opts)?;
            oracle::brute_force_optimum(inst, class, objective, direction, &opts.oracle)
        }
    }
}

fn from_optimum(q: &DecisionProblem, r: OptimumResult) -> DecisionAnswer {
    let reaches = r.value as i128 >= q.threshold as i128;
    match q.mode {
        Mode::Possible => DecisionAnswer {
            answer: reaches,
            witness: reaches.then_some(r.witness),
            method: r.method,
        },
        Mode::Necessary => DecisionAnswer {
            answer: reaches,
            witness: (!reaches).then_some(r.witness),
            method: r.method,
        },
    }
}

/// Answers a Possible/Necessary query. Restricted classes are padded with
/// dummy items first; witnesses then refer to the padded instance.
pub fn decide(inst: &Instance, q: &DecisionProblem, opts: &SolveOptions) -> Result<DecisionAnswer> {
    use Mode::*;
    use Objective::*;
    use PolicyClass::*;
    let padded;
    let inst = if q.class.is_restricted() {
        padded = inst.pad_to_multiple();
        &padded
    } else {
        inst
    };
    let (n, m) = (inst.n_agents(), inst.n_items());
    if q.threshold <= 0 {
        return Ok(DecisionAnswer {
            answer: true,
            witness: (q.mode == Possible).then(|| oracle::first_policy(q.class, n, m)),
            method: Method::PolynomialExact,
        });
    }
    let optimum = match (q.mode, q.objective, q.class) {
        (Possible, Utilitarian, All) => Some(max_utilitarian_all(inst)?),
        (Possible, Utilitarian, Balanced) => Some(max_utilitarian_balanced(inst)?),
        (Necessary, Egalitarian, All) => Some(min_egalitarian_all(inst)?),
        (Possible, Egalitarian, All) if m == n => return house_allocation_egalitarian(inst, q.threshold),
        (Possible, Egalitarian, Balanced) if n == 2 => Some(two_agent_balanced_max(inst, Egalitarian)?),
        (Possible, objective, RecursivelyBalanced) if n == 2 && inst.rankings().all_identical() => {
            Some(two_agent_rb_identical_max(inst, objective)?)
        }
        _ => None,
    };
    match optimum {
        Some(r) => Ok(from_optimum(q, r)),
        None => {
            no_exact(
                format!("{:?} {:?} welfare over {} policies", q.mode, q.objective, q.class),
                opts,
            )?;
            oracle::brute_force_decide(inst, q, &opts.oracle)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{example1, remark1};

    #[test]
    fn max_utilitarian_all_examples() {
        let r = max_utilitarian_all(&remark1()).unwrap();
        assert_eq!(r.value, 14);
        let zero = Instance::from_matrix(vec![vec![0; 3]; 2]).unwrap();
        assert_eq!(max_utilitarian_all(&zero).unwrap().value, 0);
        let one = Instance::from_matrix(vec![vec![3, 4, 5]]).unwrap();
        assert_eq!(max_utilitarian_all(&one).unwrap().value, 12);
    }

    #[test]
    fn min_egalitarian_all_examples() {
        let r = min_egalitarian_all(&remark1()).unwrap();
        assert_eq!((r.value, r.witness.to_string()), (0, "1,1,1,1".to_string()));
        let one = Instance::from_matrix(vec![vec![3, 4]]).unwrap();
        assert_eq!(min_egalitarian_all(&one).unwrap().value, 7);
        assert_eq!(min_egalitarian_all(&example1()).unwrap().value, 0);
    }

    #[test]
    fn balanced_flow_examples() {
        let inst = remark1();
        let r = max_utilitarian_balanced(&inst).unwrap();
        assert_eq!(r.value, 14);
        assert_eq!(r.witness.to_string(), "2,1,1,2");
        assert!(r.witness.belongs_to(PolicyClass::Balanced, 2));
        let f = balanced_flow(&inst).unwrap();
        assert_eq!(f.flow, 4);
        assert_eq!(f.cost, -14);
        assert!(f.item_flows.iter().all(|&x| x == 1));

        let same = Instance::from_matrix(vec![vec![1, 5, 2, 7]; 2]).unwrap();
        assert_eq!(max_utilitarian_balanced(&same).unwrap().value, 15);
        let one = Instance::from_matrix(vec![vec![1, 5, 2]]).unwrap();
        assert_eq!(max_utilitarian_balanced(&one).unwrap().value, 8);
        let odd = Instance::from_matrix(vec![vec![1, 5, 2]; 2]).unwrap();
        assert!(matches!(max_utilitarian_balanced(&odd), Err(Error::Divisibility { .. })));
    }

    #[test]
    fn decide_examples() {
        let opts = SolveOptions::default();
        let q = |objective, mode, class, threshold| DecisionProblem { objective, mode, threshold, class };

        let a = decide(&remark1(), &q(Objective::Utilitarian, Mode::Possible, PolicyClass::All, 14), &opts).unwrap();
        assert!(a.answer);
        assert_eq!(a.method, Method::PolynomialExact);

        let a = decide(&remark1(), &q(Objective::Egalitarian, Mode::Necessary, PolicyClass::All, 1), &opts).unwrap();
        assert!(!a.answer);
        assert_eq!(a.witness.unwrap().to_string(), "1,1,1,1");

        let gadget = Instance::from_matrix(vec![vec![4, 3, 3, 2, 2, 0]; 2]).unwrap();
        let a = decide(
            &gadget,
            &q(Objective::Egalitarian, Mode::Possible, PolicyClass::RecursivelyBalanced, 7),
            &opts,
        )
        .unwrap();
        assert!(a.answer);
        assert_eq!(a.witness.unwrap().to_string(), "1,2,1,2,2,1");

        let brute = oracle::brute_force_decide(
            &gadget,
            &q(Objective::Egalitarian, Mode::Possible, PolicyClass::RecursivelyBalanced, 7),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(brute.witness.unwrap().to_string(), "1,2,1,2,2,1");
        assert_eq!(brute.method, Method::BruteForce);
    }

    #[test]
    fn decide_pads_and_falls_back() {
        let inst = Instance::from_matrix(vec![vec![3, 1, 2], vec![1, 3, 2], vec![2, 2, 2]]).unwrap();
        let opts = SolveOptions::default();
        let q = DecisionProblem {
            objective: Objective::Utilitarian,
            mode: Mode::Necessary,
            threshold: 5,
            class: PolicyClass::BalancedAlternating,
        };
        let a = decide(&inst, &q, &opts).unwrap();
        assert_eq!(a.method, Method::BruteForce);
        let strict = SolveOptions { exact_only: true, ..opts };
        assert!(matches!(decide(&inst, &q, &strict), Err(Error::NoExactAlgorithm(_))));

        let padded = Instance::from_matrix(vec![vec![5, 1, 1], vec![1, 5, 1]]).unwrap();
        let q = DecisionProblem {
            objective: Objective::Utilitarian,
            mode: Mode::Possible,
            threshold: 11,
            class: PolicyClass::Balanced,
        };
        let a = decide(&padded, &q, &opts).unwrap();
        assert!(a.answer);
        assert_eq!(a.witness.unwrap().len(), 4);
    }

    #[test]
    fn solve_dispatch_tags_methods() {
        let opts = SolveOptions::default();
        let inst = remark1();
        let r = solve(&inst, PolicyClass::Balanced, Objective::Utilitarian, Direction::Max, &opts).unwrap();
        assert_eq!((r.value, r.method), (14, Method::PolynomialExact));
        let r = solve(&inst, PolicyClass::Balanced, Objective::Utilitarian, Direction::Min, &opts).unwrap();
        assert_eq!(r.method, Method::BruteForce);
        let strict = SolveOptions { exact_only: true, ..opts };
        assert!(solve(&inst, PolicyClass::All, Objective::Utilitarian, Direction::Min, &strict).is_err());
    }
}
