//! Pseudo-polynomial dynamic programs for two agents.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mechanism::improve_with;
use crate::model::{Allocation, Instance, Objective, Policy, Utility};

use super::{Method, OptimumResult};

fn check_two_agents(inst: &Instance) -> Result<()> {
    if inst.n_agents() != 2 {
        return Err(Error::Precondition(format!(
            "two-agent solver needs exactly 2 agents, found {}",
            inst.n_agents()
        )));
    }
    if inst.n_items() % 2 != 0 {
        return Err(Error::Divisibility {
            items: inst.n_items(),
            agents: 2,
        });
    }
    Ok(())
}

/// Best balanced split of the items, one item at a time in index order.
///
/// Egalitarian states are `(items to agent 1, agent-1 sum, agent-2 sum)`;
/// only the largest agent-2 sum is kept per `(count, agent-1 sum)`, which
/// loses no optimum because the objective is monotone in both sums.
/// Utilitarian states are `(items to agent 1, combined sum)`, again keeping
/// only the best sum per count.
pub fn two_agent_balanced_max(inst: &Instance, objective: Objective) -> Result<OptimumResult> {
    check_two_agents(inst)?;
    let owner = match objective {
        Objective::Utilitarian => balanced_utilitarian_split(inst),
        Objective::Egalitarian => balanced_egalitarian_split(inst),
    };
    let alloc = Allocation::new(owner, 2)?;
    let improved = improve_with(&inst.rankings(), &alloc);
    let value = inst.welfare(&improved.allocation).get(objective);
    let dp_value = inst.welfare(&alloc).get(objective);
    if value != dp_value {
        return Err(Error::Verification(format!(
            "improvement changed a DP optimum from {dp_value} to {value}"
        )));
    }
    OptimumResult::verified(inst, value, improved.policy, objective, Method::PolynomialExact)
}

fn balanced_utilitarian_split(inst: &Instance) -> Vec<usize> {
    let m = inst.n_items();
    let half = m / 2;
    // best[c] = best combined sum with c items to agent 1
    let mut best: Vec<Option<Utility>> = vec![None; half + 1];
    best[0] = Some(0);
    let mut took_first: Vec<Vec<bool>> = Vec::with_capacity(m);
    for item in 0..m {
        let (u1, u2) = (inst.utility(0, item), inst.utility(1, item));
        let mut next = vec![None; half + 1];
        let mut choice = vec![false; half + 1];
        for c in 0..=half.min(item + 1) {
            // agent 2 takes it: agent 2 then holds item + 1 - c items
            let via_second = best[c].filter(|_| item + 1 - c <= half).map(|s| s + u2);
            let via_first = c.checked_sub(1).and_then(|p| best[p]).map(|s| s + u1);
            let pick = match (via_first, via_second) {
                (Some(a), Some(b)) if a >= b => Some((a, true)),
                (_, Some(b)) => Some((b, false)),
                (Some(a), None) => Some((a, true)),
                (None, None) => None,
            };
            if let Some((s, first)) = pick {
                next[c] = Some(s);
                choice[c] = first;
            }
        }
        best = next;
        took_first.push(choice);
    }
    let mut owner = vec![0; m];
    let mut c = half;
    for item in (0..m).rev() {
        if took_first[item][c] {
            owner[item] = 0;
            c -= 1;
        } else {
            owner[item] = 1;
        }
    }
    owner
}

fn balanced_egalitarian_split(inst: &Instance) -> Vec<usize> {
    let m = inst.n_items();
    let half = m / 2;
    // layer: (count, s1) -> (best s2, took_first)
    type Layer = BTreeMap<(usize, Utility), (Utility, bool)>;
    let mut layers: Vec<Layer> = Vec::with_capacity(m + 1);
    layers.push(BTreeMap::from([((0, 0), (0, false))]));
    for item in 0..m {
        let (u1, u2) = (inst.utility(0, item), inst.utility(1, item));
        let mut next: Layer = BTreeMap::new();
        let mut offer = |key: (usize, Utility), s2: Utility, first: bool| {
            let slot = next.entry(key).or_insert((s2, first));
            if s2 > slot.0 {
                *slot = (s2, first);
            }
        };
        for (&(c, s1), &(s2, _)) in &layers[item] {
            if c < half {
                offer((c + 1, s1 + u1), s2, true);
            }
            if item - c < half {
                offer((c, s1), s2 + u2, false);
            }
        }
        layers.push(next);
    }
    let (mut key, _) = layers[m]
        .iter()
        .map(|(&(c, s1), &(s2, _))| ((c, s1), s1.min(s2)))
        .fold(None, |acc: Option<((usize, Utility), Utility)>, cand| match acc {
            Some(best) if best.1 >= cand.1 => Some(best),
            _ => Some(cand),
        })
        .expect("a balanced split exists");
    let mut owner = vec![0; m];
    for item in (0..m).rev() {
        let (_, first) = layers[item + 1][&key];
        if first {
            owner[item] = 0;
            key = (key.0 - 1, key.1 - inst.utility(0, item));
        } else {
            owner[item] = 1;
        }
    }
    owner
}

/// Two agents with the same ranking: in round `r` the two best remaining
/// items (common ranks `2r`, `2r+1`) go one to each agent, the first picker
/// getting the better one. The witness is the lexicographically smallest
/// optimal recursively balanced policy.
pub fn two_agent_rb_identical_max(inst: &Instance, objective: Objective) -> Result<OptimumResult> {
    check_two_agents(inst)?;
    let profile = inst.rankings();
    if !profile.all_identical() {
        return Err(Error::Precondition("agents' derived rankings differ".into()));
    }
    let order = profile.ranking(0);
    // per round: (agent-1 gain, agent-2 gain) if agent 1 starts / if agent 2 starts
    let rounds: Vec<[(Utility, Utility); 2]> = order
        .chunks(2)
        .map(|pair| {
            let (x, y) = (pair[0], pair[1]);
            [
                (inst.utility(0, x), inst.utility(1, y)),
                (inst.utility(0, y), inst.utility(1, x)),
            ]
        })
        .collect();

    let starts: Vec<usize> = match objective {
        Objective::Utilitarian => rounds
            .iter()
            .map(|[a, b]| usize::from(a.0 + a.1 < b.0 + b.1))
            .collect(),
        Objective::Egalitarian => egalitarian_round_choices(&rounds),
    };
    let turns = starts
        .iter()
        .flat_map(|&s| if s == 0 { [0, 1] } else { [1, 0] })
        .collect();
    let policy = Policy::new(turns);
    let value = {
        let (mut s1, mut s2) = (0, 0);
        for (round, &s) in rounds.iter().zip(&starts) {
            s1 += round[s].0;
            s2 += round[s].1;
        }
        match objective {
            Objective::Utilitarian => s1 + s2,
            Objective::Egalitarian => s1.min(s2),
        }
    };
    OptimumResult::verified(inst, value, policy, objective, Method::PolynomialExact)
}

/// Pareto front of reachable `(agent-1, agent-2)` totals, as a map from the
/// agent-1 total to the best agent-2 total.
type Front = BTreeMap<Utility, Utility>;

fn prune(points: impl IntoIterator<Item = (Utility, Utility)>) -> Front {
    let mut best: Front = BTreeMap::new();
    for (a, b) in points {
        let slot = best.entry(a).or_insert(b);
        *slot = (*slot).max(b);
    }
    // keep only points not dominated by one with a larger first coordinate
    let mut front = BTreeMap::new();
    let mut ceiling = None;
    for (&a, &b) in best.iter().rev() {
        if ceiling.map_or(true, |c| b > c) {
            front.insert(a, b);
            ceiling = Some(b);
        }
    }
    front
}

fn egalitarian_round_choices(rounds: &[[(Utility, Utility); 2]]) -> Vec<usize> {
    let r = rounds.len();
    // suffix[k]: front achievable from rounds k..r
    let mut suffix: Vec<Front> = vec![BTreeMap::new(); r + 1];
    suffix[r].insert(0, 0);
    for k in (0..r).rev() {
        let points: Vec<(Utility, Utility)> = suffix[k + 1]
            .iter()
            .flat_map(|(&d1, &d2)| rounds[k].iter().map(move |&(g1, g2)| (d1 + g1, d2 + g2)))
            .collect();
        suffix[k] = prune(points);
    }
    let target = suffix[0].iter().map(|(&a, &b)| a.min(b)).max().unwrap_or(0);
    let feasible = |k: usize, s1: Utility, s2: Utility| {
        suffix[k]
            .range(target.saturating_sub(s1)..)
            .any(|(_, &d2)| s2 + d2 >= target)
    };
    let (mut s1, mut s2) = (0, 0);
    let mut starts = Vec::with_capacity(r);
    for (k, round) in rounds.iter().enumerate() {
        let choice = (0..2)
            .find(|&c| feasible(k + 1, s1 + round[c].0, s2 + round[c].1))
            .expect("an optimal completion exists");
        s1 += round[choice].0;
        s2 += round[choice].1;
        starts.push(choice);
    }
    starts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::remark1;

    fn partition_gadget() -> Instance {
        Instance::from_matrix(vec![vec![4, 3, 3, 2, 2, 0]; 2]).unwrap()
    }

    #[test]
    fn balanced_dp_examples() {
        let inst = remark1();
        let egal = two_agent_balanced_max(&inst, Objective::Egalitarian).unwrap();
        assert_eq!(egal.value, 6);
        assert_eq!(egal.witness_allocation.owners(), &[1, 0, 0, 1]);
        assert_eq!(two_agent_balanced_max(&inst, Objective::Utilitarian).unwrap().value, 14);

        let same = Instance::from_matrix(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(two_agent_balanced_max(&same, Objective::Egalitarian).unwrap().value, 1);
    }

    #[test]
    fn rb_dp_examples() {
        let r = two_agent_rb_identical_max(&partition_gadget(), Objective::Egalitarian).unwrap();
        assert_eq!(r.value, 7);
        assert_eq!(r.witness.to_string(), "1,2,1,2,2,1");

        let r = two_agent_rb_identical_max(&partition_gadget(), Objective::Utilitarian).unwrap();
        assert_eq!(r.value, 14);

        let one_round = Instance::from_matrix(vec![vec![5, 3], vec![5, 3]]).unwrap();
        assert_eq!(two_agent_rb_identical_max(&one_round, Objective::Egalitarian).unwrap().value, 3);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            two_agent_rb_identical_max(&remark1().pad_to_multiple(), Objective::Egalitarian),
            Ok(_)
        ));
        let differ = Instance::from_matrix(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert!(matches!(
            two_agent_rb_identical_max(&differ, Objective::Egalitarian),
            Err(Error::Precondition(_))
        ));
        let odd = Instance::from_matrix(vec![vec![1, 2, 3], vec![2, 1, 3]]).unwrap();
        assert!(matches!(two_agent_balanced_max(&odd, Objective::Utilitarian), Err(Error::Divisibility { .. })));
        let three = Instance::from_matrix(vec![vec![1, 2, 3]; 3]).unwrap();
        assert!(two_agent_balanced_max(&three, Objective::Utilitarian).is_err());
    }

    #[test]
    fn front_pruning() {
        let f = prune([(1, 5), (3, 3), (2, 2), (3, 1), (0, 6), (0, 4)]);
        assert_eq!(f, BTreeMap::from([(0, 6), (1, 5), (3, 3)]));
    }
}
