//! House allocation: as many items as agents.

use crate::error::{Error, Result};
use crate::mechanism::improve_with;
use crate::model::{Allocation, Instance, Objective, Utility};

use super::{DecisionAnswer, Method, OptimumResult};

fn check_square(inst: &Instance) -> Result<()> {
    if inst.n_items() != inst.n_agents() {
        return Err(Error::Precondition(format!(
            "house allocation needs as many items as agents ({} items, {} agents)",
            inst.n_items(),
            inst.n_agents()
        )));
    }
    Ok(())
}

/// Perfect matching on edges `u(agent, item) >= t` by augmenting paths.
/// Returns the item matched to each agent.
fn perfect_matching(inst: &Instance, t: i64) -> Option<Vec<usize>> {
    let n = inst.n_agents();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).filter(|&j| inst.utility(a, j) as i128 >= t as i128).collect())
        .collect();
    let mut item_owner = vec![usize::MAX; n];

    fn augment(a: usize, adj: &[Vec<usize>], seen: &mut [bool], item_owner: &mut [usize]) -> bool {
        for &j in &adj[a] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if item_owner[j] == usize::MAX || augment(item_owner[j], adj, seen, item_owner) {
                item_owner[j] = a;
                return true;
            }
        }
        false
    }

    for a in 0..n {
        let mut seen = vec![false; n];
        if !augment(a, &adj, &mut seen, &mut item_owner) {
            return None;
        }
    }
    Some(item_owner)
}

/// Is there a policy giving every agent utility at least `t`?
pub fn house_allocation_egalitarian(inst: &Instance, t: i64) -> Result<DecisionAnswer> {
    check_square(inst)?;
    let Some(item_owner) = perfect_matching(inst, t) else {
        return Ok(DecisionAnswer {
            answer: false,
            witness: None,
            method: Method::PolynomialExact,
        });
    };
    let alloc = Allocation::new(item_owner, inst.n_agents())?;
    let improved = improve_with(&inst.rankings(), &alloc);
    let w = inst.welfare(&improved.allocation);
    let result = OptimumResult::verified(inst, w.egalitarian, improved.policy, Objective::Egalitarian, Method::PolynomialExact)?;
    if (result.value as i128) < t as i128 {
        return Err(Error::Verification(format!(
            "matching witness reaches {} below threshold {t}",
            result.value
        )));
    }
    Ok(DecisionAnswer {
        answer: true,
        witness: Some(result.witness),
        method: Method::PolynomialExact,
    })
}

/// Largest egalitarian welfare over all policies, by binary search over
/// the distinct utility values.
pub fn house_allocation_max_egalitarian(inst: &Instance) -> Result<OptimumResult> {
    check_square(inst)?;
    let mut values: Vec<Utility> = inst.utilities().iter().flatten().copied().collect();
    values.sort_unstable();
    values.dedup();
    // values[lo] is always feasible: every agent gets some item
    let (mut lo, mut hi) = (0, values.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if perfect_matching(inst, values[mid] as i64).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = values.get(lo).copied().unwrap_or(0);
    let answer = house_allocation_egalitarian(inst, best as i64)?;
    let witness = answer
        .witness
        .ok_or_else(|| Error::Verification("bottleneck value not attainable".into()))?;
    OptimumResult::verified(inst, best, witness, Objective::Egalitarian, Method::PolynomialExact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::simulate;
    use crate::model::fixtures::{example1, remark1};

    #[test]
    fn example1_thresholds() {
        let inst = example1();
        let yes = house_allocation_egalitarian(&inst, 1).unwrap();
        assert!(yes.answer);
        let alloc = simulate(&inst, yes.witness.as_ref().unwrap()).unwrap();
        assert!(inst.welfare(&alloc).egalitarian >= 1);

        let no = house_allocation_egalitarian(&inst, 2).unwrap();
        assert!(!no.answer);
        assert!(no.witness.is_none());

        assert_eq!(house_allocation_max_egalitarian(&inst).unwrap().value, 1);
        assert!(house_allocation_egalitarian(&inst, -3).unwrap().answer);
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(house_allocation_egalitarian(&remark1(), 1), Err(Error::Precondition(_))));
    }
}
