//! Exhaustive ground truth: policy enumeration per class, brute-force
//! optimisation and decision, and the balanced-alternating lottery.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanism::{Scratch, Simulator};
use crate::model::{
    Allocation, DecisionProblem, Direction, Instance, Mode, Objective, Policy, PolicyClass, Utility,
};
use crate::solvers::{DecisionAnswer, Method, OptimumResult};

/// Default cap on enumerated policies.
pub const DEFAULT_GUARD: u64 = 10_000_000;

const BATCH: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub guard: u64,
    /// Worker threads; 1 runs sequentially.
    pub jobs: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            guard: DEFAULT_GUARD,
            jobs: 1,
        }
    }
}

/// Closed-form class size, `None` on overflow.
pub fn class_size(class: PolicyClass, n: usize, m: usize) -> Option<u128> {
    let fact = |k: usize| (1..=k as u128).try_fold(1u128, |acc, x| acc.checked_mul(x));
    match class {
        PolicyClass::All => (n as u128).checked_pow(m as u32),
        _ if m % n != 0 => Some(0),
        PolicyClass::Balanced => {
            // multinomial m! / ((m/n)!)^n, built as a product of binomials
            let k = m / n;
            let mut total = 1u128;
            let mut placed = 0usize;
            for _ in 0..n {
                total = total.checked_mul(binomial(placed + k, k)?)?;
                placed += k;
            }
            Some(total)
        }
        PolicyClass::RecursivelyBalanced => fact(n)?.checked_pow((m / n) as u32),
        PolicyClass::BalancedAlternating if m == 0 => Some(1),
        PolicyClass::BalancedAlternating => fact(n),
    }
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let mut acc = 1u128;
    for i in 0..k as u128 {
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

fn check_class(class: PolicyClass, n: usize, m: usize, guard: u64) -> Result<u128> {
    if class.is_restricted() && m % n != 0 {
        return Err(Error::Divisibility { items: m, agents: n });
    }
    match class_size(class, n, m) {
        Some(size) if size <= guard as u128 => Ok(size),
        size => Err(Error::guard(size, guard)),
    }
}

/// Every policy of `class` for `n` agents and `m` items, once each, in
/// lexicographic order.
pub fn enumerate_policies(
    class: PolicyClass,
    n: usize,
    m: usize,
    guard: u64,
) -> Result<Box<dyn Iterator<Item = Policy> + Send>> {
    if n == 0 {
        return Err(Error::Precondition("at least one agent is required".into()));
    }
    check_class(class, n, m, guard)?;
    Ok(match class {
        PolicyClass::All => Box::new(Odometer::new(vec![n; m]).map(Policy::new)),
        PolicyClass::Balanced => {
            let start: Vec<usize> = (0..n).flat_map(|a| std::iter::repeat(a).take(m / n)).collect();
            Box::new(MultisetPermutations::new(start).map(Policy::new))
        }
        PolicyClass::RecursivelyBalanced => {
            let rounds: Vec<Vec<usize>> = (0..n).permutations(n).collect();
            let count = rounds.len();
            Box::new(
                Odometer::new(vec![count; m / n])
                    .map(move |digits| Policy::new(digits.iter().flat_map(|&d| rounds[d].iter().copied()).collect())),
            )
        }
        PolicyClass::BalancedAlternating if m == 0 => Box::new(std::iter::once(Policy::new(Vec::new()))),
        PolicyClass::BalancedAlternating => Box::new((0..n).permutations(n).map(move |first| {
            let reversed: Vec<usize> = first.iter().rev().copied().collect();
            let turns = (0..m / n)
                .flat_map(|r| if r % 2 == 0 { first.clone() } else { reversed.clone() })
                .collect();
            Policy::new(turns)
        })),
    })
}

/// Lexicographically smallest policy of a class, without enumerating.
pub fn first_policy(class: PolicyClass, n: usize, m: usize) -> Policy {
    let turns = match class {
        PolicyClass::All => vec![0; m],
        PolicyClass::Balanced => (0..m).map(|i| i / (m / n).max(1)).collect(),
        PolicyClass::RecursivelyBalanced => (0..m).map(|i| i % n).collect(),
        PolicyClass::BalancedAlternating => (0..m)
            .map(|i| if (i / n) % 2 == 0 { i % n } else { n - 1 - i % n })
            .collect(),
    };
    Policy::new(turns)
}

/// Mixed-radix counter, last digit fastest.
struct Odometer {
    radix: Vec<usize>,
    digits: Option<Vec<usize>>,
}

impl Odometer {
    fn new(radix: Vec<usize>) -> Self {
        let digits = radix.iter().all(|&r| r > 0).then(|| vec![0; radix.len()]);
        Odometer { radix, digits }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.digits.clone()?;
        let digits = self.digits.as_mut().unwrap();
        let mut i = digits.len();
        loop {
            if i == 0 {
                self.digits = None;
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < self.radix[i] {
                break;
            }
            digits[i] = 0;
        }
        Some(current)
    }
}

/// Distinct permutations of a sorted multiset via next-permutation.
struct MultisetPermutations {
    next: Option<Vec<usize>>,
}

impl MultisetPermutations {
    fn new(sorted: Vec<usize>) -> Self {
        MultisetPermutations { next: Some(sorted) }
    }
}

impl Iterator for MultisetPermutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut v = current.clone();
        if let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) {
            let pivot = i - 1;
            let j = (i..v.len()).rev().find(|&j| v[j] > v[pivot]).unwrap();
            v.swap(pivot, j);
            v[i..].reverse();
            self.next = Some(v);
        }
        Some(current)
    }
}

fn batches(it: Box<dyn Iterator<Item = Policy> + Send>) -> impl Iterator<Item = Vec<Policy>> + Send {
    let mut it = it;
    std::iter::from_fn(move || {
        let batch: Vec<Policy> = it.by_ref().take(BATCH).collect();
        (!batch.is_empty()).then_some(batch)
    })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))
}

/// Better value first, then the lexicographically smaller policy.
fn prefer(direction: Direction, a: (Utility, Policy), b: (Utility, Policy)) -> (Utility, Policy) {
    let a_wins = match direction {
        Direction::Max => a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1),
        Direction::Min => a.0 < b.0 || (a.0 == b.0 && a.1 <= b.1),
    };
    if a_wins {
        a
    } else {
        b
    }
}

fn extreme_of_batch(
    sim: &Simulator<'_>,
    batch: &[Policy],
    objective: Objective,
    direction: Direction,
) -> Option<(Utility, Policy)> {
    let mut scratch = Scratch::default();
    let mut best: Option<(Utility, &Policy)> = None;
    for p in batch {
        let (util, egal) = sim.welfare_pair(p.turns(), &mut scratch);
        let v = match objective {
            Objective::Utilitarian => util,
            Objective::Egalitarian => egal,
        };
        let better = match (best, direction) {
            (None, _) => true,
            (Some((b, _)), Direction::Max) => v > b,
            (Some((b, _)), Direction::Min) => v < b,
        };
        if better {
            best = Some((v, p));
        }
    }
    best.map(|(v, p)| (v, p.clone()))
}

/// Extreme welfare over every policy of the class; the witness is the
/// lexicographically smallest policy attaining it.
pub fn brute_force_optimum(
    inst: &Instance,
    class: PolicyClass,
    objective: Objective,
    direction: Direction,
    cfg: &OracleConfig,
) -> Result<OptimumResult> {
    let sim = Simulator::new(inst);
    let policies = enumerate_policies(class, inst.n_agents(), inst.n_items(), cfg.guard)?;
    let best = if cfg.jobs <= 1 {
        batches(policies)
            .filter_map(|b| extreme_of_batch(&sim, &b, objective, direction))
            .reduce(|a, b| prefer(direction, a, b))
    } else {
        pool(cfg.jobs)?.install(|| {
            batches(policies)
                .par_bridge()
                .filter_map(|b| extreme_of_batch(&sim, &b, objective, direction))
                .reduce_with(|a, b| prefer(direction, a, b))
        })
    };
    let (value, witness) = best.ok_or_else(|| Error::Precondition(format!("class {class} is empty")))?;
    OptimumResult::verified(inst, value, witness, objective, Method::BruteForce)
}

fn first_hit(sim: &Simulator<'_>, batch: &[Policy], q: &DecisionProblem) -> Option<Policy> {
    let mut scratch = Scratch::default();
    batch
        .iter()
        .find(|p| {
            let (util, egal) = sim.welfare_pair(p.turns(), &mut scratch);
            let v = match q.objective {
                Objective::Utilitarian => util,
                Objective::Egalitarian => egal,
            } as i128;
            match q.mode {
                Mode::Possible => v >= q.threshold as i128,
                Mode::Necessary => v < q.threshold as i128,
            }
        })
        .cloned()
}

/// Possible: first policy reaching the threshold. Necessary: first policy
/// falling below it (a counterexample), else yes.
pub fn brute_force_decide(inst: &Instance, q: &DecisionProblem, cfg: &OracleConfig) -> Result<DecisionAnswer> {
    let sim = Simulator::new(inst);
    let policies = enumerate_policies(q.class, inst.n_agents(), inst.n_items(), cfg.guard)?;
    let hit = if cfg.jobs <= 1 {
        batches(policies).find_map(|b| first_hit(&sim, &b, q))
    } else {
        pool(cfg.jobs)?.install(|| {
            batches(policies)
                .par_bridge()
                .filter_map(|b| first_hit(&sim, &b, q))
                .reduce_with(|a, b| a.min(b))
        })
    };
    let answer = match q.mode {
        Mode::Possible => hit.is_some(),
        Mode::Necessary => hit.is_none(),
    };
    Ok(DecisionAnswer {
        answer,
        witness: hit,
        method: Method::BruteForce,
    })
}

/// Exact welfare distribution over the balanced-alternating lottery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelfareDistribution {
    pub entries: BTreeMap<Utility, u64>,
    pub total: u64,
    pub objective: Objective,
    pub class: PolicyClass,
}

impl WelfareDistribution {
    pub fn min(&self) -> Option<Utility> {
        self.entries.keys().next().copied()
    }

    pub fn max(&self) -> Option<Utility> {
        self.entries.keys().next_back().copied()
    }

    pub fn mean(&self) -> f64 {
        let sum: f64 = self.entries.iter().map(|(&v, &c)| v as f64 * c as f64).sum();
        sum / self.total as f64
    }

    /// Probability that a uniformly drawn policy reaches `t`.
    pub fn prob_at_least(&self, t: i64) -> f64 {
        let hits: u64 = self
            .entries
            .iter()
            .filter(|(&v, _)| v as i128 >= t as i128)
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.total as f64
    }
}

/// Pads the instance if needed, then simulates all `n!` balanced
/// alternating policies.
pub fn ba_welfare_distribution(inst: &Instance, objective: Objective, guard: u64) -> Result<WelfareDistribution> {
    let inst = inst.pad_to_multiple();
    let sim = Simulator::new(&inst);
    let mut scratch = Scratch::default();
    let mut entries = BTreeMap::new();
    let mut total = 0u64;
    for p in enumerate_policies(PolicyClass::BalancedAlternating, inst.n_agents(), inst.n_items(), guard)? {
        let (util, egal) = sim.welfare_pair(p.turns(), &mut scratch);
        let v = match objective {
            Objective::Utilitarian => util,
            Objective::Egalitarian => egal,
        };
        *entries.entry(v).or_insert(0) += 1;
        total += 1;
    }
    Ok(WelfareDistribution {
        entries,
        total,
        objective,
        class: PolicyClass::BalancedAlternating,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub successes: u64,
    pub samples: u64,
    /// 95% Wilson score interval.
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub seed: u64,
}

const Z95: f64 = 1.959_963_984_540_054;

fn wilson(successes: u64, samples: u64) -> (f64, f64) {
    let n = samples as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Estimates P(welfare ≥ t) when the first round is a uniformly random
/// permutation and later rounds alternate.
pub fn monte_carlo_ba(
    inst: &Instance,
    objective: Objective,
    t: i64,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let inst = inst.pad_to_multiple();
    let (n, m) = (inst.n_agents(), inst.n_items());
    let sim = Simulator::new(&inst);
    let mut scratch = Scratch::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first: Vec<usize> = (0..n).collect();
    let mut turns = vec![0; m];
    let mut successes = 0u64;
    for _ in 0..samples {
        first.clear();
        first.extend(0..n);
        first.shuffle(&mut rng);
        for (r, round) in turns.chunks_mut(n).enumerate() {
            if r % 2 == 0 {
                round.copy_from_slice(&first);
            } else {
                for (slot, &a) in round.iter_mut().zip(first.iter().rev()) {
                    *slot = a;
                }
            }
        }
        let (util, egal) = sim.welfare_pair(&turns, &mut scratch);
        let v = match objective {
            Objective::Utilitarian => util,
            Objective::Egalitarian => egal,
        };
        if v as i128 >= t as i128 {
            successes += 1;
        }
    }
    let (ci_lower, ci_upper) = wilson(successes, samples);
    Ok(MonteCarloEstimate {
        estimate: successes as f64 / samples as f64,
        successes,
        samples,
        ci_lower,
        ci_upper,
        seed,
    })
}

/// Allocation of every policy of the class; handy for reachability sets.
pub fn reachable_allocations(inst: &Instance, class: PolicyClass, guard: u64) -> Result<Vec<Allocation>> {
    let sim = Simulator::new(inst);
    enumerate_policies(class, inst.n_agents(), inst.n_items(), guard)?
        .map(|p| sim.simulate(&p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{example1, remark1};
    use std::collections::HashSet;

    fn strs(class: PolicyClass, n: usize, m: usize) -> Vec<String> {
        enumerate_policies(class, n, m, DEFAULT_GUARD)
            .unwrap()
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(strs(PolicyClass::BalancedAlternating, 2, 4), vec!["1,2,2,1", "2,1,1,2"]);
        assert_eq!(
            strs(PolicyClass::RecursivelyBalanced, 2, 4),
            vec!["1,2,1,2", "1,2,2,1", "2,1,1,2", "2,1,2,1"]
        );
        assert_eq!(strs(PolicyClass::All, 1, 5), vec!["1,1,1,1,1"]);
        assert_eq!(strs(PolicyClass::Balanced, 2, 4).len(), 6);
        assert_eq!(strs(PolicyClass::All, 2, 0), vec![""]);
    }

    #[test]
    fn enumeration_counts_match_closed_forms() {
        for n in 1..=3 {
            for m in 0..=6 {
                for class in PolicyClass::ALL {
                    if class.is_restricted() && m % n != 0 {
                        assert!(matches!(
                            enumerate_policies(class, n, m, DEFAULT_GUARD),
                            Err(Error::Divisibility { .. })
                        ));
                        continue;
                    }
                    let all: Vec<Policy> = enumerate_policies(class, n, m, DEFAULT_GUARD).unwrap().collect();
                    let distinct: HashSet<&Policy> = all.iter().collect();
                    assert_eq!(distinct.len(), all.len(), "{class} n={n} m={m}");
                    assert_eq!(Some(all.len() as u128), class_size(class, n, m), "{class} n={n} m={m}");
                    assert!(all.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
                    assert!(all.iter().all(|p| p.belongs_to(class, n) && p.len() == m));
                }
            }
        }
        assert_eq!(class_size(PolicyClass::Balanced, 3, 6), Some(90));
        assert_eq!(class_size(PolicyClass::RecursivelyBalanced, 3, 6), Some(36));
        assert_eq!(class_size(PolicyClass::All, 2, 200), None);
    }

    #[test]
    fn guard_is_enforced() {
        assert!(matches!(
            enumerate_policies(PolicyClass::All, 3, 20, DEFAULT_GUARD),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(enumerate_policies(PolicyClass::All, 2, 4, 16).is_ok());
        assert!(enumerate_policies(PolicyClass::All, 2, 4, 15).is_err());
    }

    #[test]
    fn optimum_examples() {
        let cfg = OracleConfig::default();
        let r = brute_force_optimum(&example1(), PolicyClass::All, Objective::Egalitarian, Direction::Max, &cfg)
            .unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.witness.to_string(), "1,2,3");

        let r = brute_force_optimum(&remark1(), PolicyClass::Balanced, Objective::Utilitarian, Direction::Max, &cfg)
            .unwrap();
        assert_eq!(r.value, 14);

        let one = Instance::from_matrix(vec![vec![2, 0, 5]]).unwrap();
        for d in [Direction::Max, Direction::Min] {
            for o in [Objective::Utilitarian, Objective::Egalitarian] {
                assert_eq!(brute_force_optimum(&one, PolicyClass::All, o, d, &cfg).unwrap().value, 7);
            }
        }
    }

    #[test]
    fn decide_matches_optimum_and_t_zero() {
        let cfg = OracleConfig::default();
        let inst = remark1();
        for class in PolicyClass::ALL {
            for objective in [Objective::Utilitarian, Objective::Egalitarian] {
                let max = brute_force_optimum(&inst, class, objective, Direction::Max, &cfg).unwrap().value as i64;
                let min = brute_force_optimum(&inst, class, objective, Direction::Min, &cfg).unwrap().value as i64;
                for t in 0..=16 {
                    let q = |mode| DecisionProblem { objective, mode, threshold: t, class };
                    let pos = brute_force_decide(&inst, &q(Mode::Possible), &cfg).unwrap();
                    let nec = brute_force_decide(&inst, &q(Mode::Necessary), &cfg).unwrap();
                    assert_eq!(pos.answer, max >= t);
                    assert_eq!(nec.answer, min >= t);
                    if t == 0 {
                        assert!(pos.answer && nec.answer);
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let inst = Instance::from_matrix(vec![vec![3, 1, 4, 1, 5, 9], vec![2, 6, 5, 3, 5, 8], vec![9, 7, 9, 3, 2, 3]])
            .unwrap();
        let seq = OracleConfig::default();
        for jobs in 2..=4 {
            let par = OracleConfig { jobs, ..seq };
            for class in PolicyClass::ALL {
                for objective in [Objective::Utilitarian, Objective::Egalitarian] {
                    for direction in [Direction::Max, Direction::Min] {
                        let a = brute_force_optimum(&inst, class, objective, direction, &seq).unwrap();
                        let b = brute_force_optimum(&inst, class, objective, direction, &par).unwrap();
                        assert_eq!(a, b);
                    }
                    for mode in [Mode::Possible, Mode::Necessary] {
                        let q = DecisionProblem { objective, mode, threshold: 12, class };
                        assert_eq!(
                            brute_force_decide(&inst, &q, &seq).unwrap(),
                            brute_force_decide(&inst, &q, &par).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn distribution_examples() {
        let d = ba_welfare_distribution(&remark1(), Objective::Egalitarian, DEFAULT_GUARD).unwrap();
        assert_eq!(d.entries, BTreeMap::from([(3, 1), (6, 1)]));
        assert_eq!(d.total, 2);
        assert_eq!(d.prob_at_least(5), 0.5);
        assert_eq!(d.mean(), 4.5);

        let one = Instance::from_matrix(vec![vec![1, 2]]).unwrap();
        let d = ba_welfare_distribution(&one, Objective::Utilitarian, DEFAULT_GUARD).unwrap();
        assert_eq!(d.entries, BTreeMap::from([(3, 1)]));

        let flat = Instance::from_matrix(vec![vec![2; 6]; 3]).unwrap();
        let d = ba_welfare_distribution(&flat, Objective::Egalitarian, DEFAULT_GUARD).unwrap();
        assert_eq!(d.entries, BTreeMap::from([(4, 6)]));
    }

    #[test]
    fn monte_carlo_edges_and_reproducibility() {
        let inst = remark1();
        let a = monte_carlo_ba(&inst, Objective::Egalitarian, 5, 1000, 7).unwrap();
        let b = monte_carlo_ba(&inst, Objective::Egalitarian, 5, 1000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_lower <= a.estimate && a.estimate <= a.ci_upper);
        assert_eq!(monte_carlo_ba(&inst, Objective::Egalitarian, 0, 50, 1).unwrap().estimate, 1.0);
        assert_eq!(monte_carlo_ba(&inst, Objective::Utilitarian, 100, 50, 1).unwrap().estimate, 0.0);
        assert!(monte_carlo_ba(&inst, Objective::Utilitarian, 1, 0, 1).is_err());
    }

    #[test]
    fn wilson_interval_reference_values() {
        // 50/100: textbook Wilson interval (0.4038, 0.5962)
        let (lo, hi) = wilson(50, 100);
        assert!((lo - 0.403_8).abs() < 1e-4 && (hi - 0.596_2).abs() < 1e-4, "{lo} {hi}");
        let (lo, hi) = wilson(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_5).abs() < 1e-4, "{hi}");
    }
}
