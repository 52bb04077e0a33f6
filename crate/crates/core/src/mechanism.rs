//! Sincere sequential allocation, policy synthesis and trading-cycle
//! improvement.

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, Policy, PreferenceProfile, Utility, WelfareReport};

/// Default cap on candidate allocations for [`pareto_check_bruteforce`].
pub const PARETO_CAP: u64 = 10_000_000;

/// Precomputed rankings for repeated simulation of one instance.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    inst: &'a Instance,
    profile: PreferenceProfile,
}

/// Reusable buffers for [`Simulator::run_into`].
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    taken: Vec<bool>,
    cursor: Vec<usize>,
    pub owner: Vec<usize>,
    pub per_agent: Vec<Utility>,
}

impl<'a> Simulator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Simulator {
            inst,
            profile: inst.rankings(),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn profile(&self) -> &PreferenceProfile {
        &self.profile
    }

    /// Runs sincere picking for already validated turns, filling `scratch`.
    pub fn run_into(&self, turns: &[usize], scratch: &mut Scratch) {
        let m = self.inst.n_items();
        let n = self.inst.n_agents();
        scratch.taken.clear();
        scratch.taken.resize(m, false);
        scratch.cursor.clear();
        scratch.cursor.resize(n, 0);
        scratch.owner.clear();
        scratch.owner.resize(m, 0);
        scratch.per_agent.clear();
        scratch.per_agent.resize(n, 0);
        for &agent in turns {
            let ranking = self.profile.ranking(agent);
            let cur = &mut scratch.cursor[agent];
            while scratch.taken[ranking[*cur]] {
                *cur += 1;
            }
            let item = ranking[*cur];
            scratch.taken[item] = true;
            scratch.owner[item] = agent;
            scratch.per_agent[agent] += self.inst.utility(agent, item);
        }
    }

    /// Utilitarian and egalitarian welfare of `turns`.
    pub fn welfare_pair(&self, turns: &[usize], scratch: &mut Scratch) -> (Utility, Utility) {
        self.run_into(turns, scratch);
        let util = scratch.per_agent.iter().sum();
        let egal = scratch.per_agent.iter().copied().min().unwrap_or(0);
        (util, egal)
    }

    pub fn simulate(&self, policy: &Policy) -> Result<Allocation> {
        self.inst.check_policy(policy)?;
        let mut scratch = Scratch::default();
        self.run_into(policy.turns(), &mut scratch);
        Ok(Allocation::from_owner_unchecked(scratch.owner, self.inst.n_agents()))
    }
}

/// Allocation produced by sincere picking under `policy`.
pub fn simulate(inst: &Instance, policy: &Policy) -> Result<Allocation> {
    Simulator::new(inst).simulate(policy)
}

/// Where the synthesis greedy got stuck: no agent's favourite remaining
/// item is in its own remaining bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckState {
    pub remaining_items: Vec<usize>,
    pub remaining_bundles: Vec<Vec<usize>>,
    /// Turns emitted before getting stuck.
    pub prefix: Policy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthesisResult {
    Reached(Policy),
    Unreachable(StuckState),
}

impl SynthesisResult {
    pub fn policy(&self) -> Option<&Policy> {
        match self {
            SynthesisResult::Reached(p) => Some(p),
            SynthesisResult::Unreachable(_) => None,
        }
    }
}

/// Greedy state shared by synthesis and improvement.
struct Greedy<'p> {
    profile: &'p PreferenceProfile,
    owner: Vec<usize>,
    taken: Vec<bool>,
    cursor: Vec<usize>,
    left: Vec<usize>,
    turns: Vec<usize>,
}

impl<'p> Greedy<'p> {
    fn new(profile: &'p PreferenceProfile, alloc: &Allocation) -> Self {
        Greedy {
            profile,
            owner: alloc.owners().to_vec(),
            taken: vec![false; alloc.n_items()],
            cursor: vec![0; alloc.n_agents()],
            left: alloc.bundle_sizes(),
            turns: Vec::with_capacity(alloc.n_items()),
        }
    }

    fn top(&mut self, agent: usize) -> usize {
        let ranking = self.profile.ranking(agent);
        let cur = &mut self.cursor[agent];
        while self.taken[ranking[*cur]] {
            *cur += 1;
        }
        ranking[*cur]
    }

    fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.left.len()).filter(|&a| self.left[a] > 0)
    }

    fn done(&self) -> bool {
        self.turns.len() == self.owner.len()
    }

    /// Lets the lowest-indexed eligible agent pick. False when stuck.
    fn step(&mut self) -> bool {
        for agent in 0..self.left.len() {
            if self.left[agent] == 0 {
                continue;
            }
            let item = self.top(agent);
            if self.owner[item] == agent {
                self.taken[item] = true;
                self.left[agent] -= 1;
                self.turns.push(agent);
                return true;
            }
        }
        false
    }

    fn stuck_state(&self) -> StuckState {
        let mut remaining_bundles = vec![Vec::new(); self.left.len()];
        let mut remaining_items = Vec::new();
        for (j, &a) in self.owner.iter().enumerate() {
            if !self.taken[j] {
                remaining_items.push(j);
                remaining_bundles[a].push(j);
            }
        }
        StuckState {
            remaining_items,
            remaining_bundles,
            prefix: Policy::new(self.turns.clone()),
        }
    }

    /// In a stuck state every active agent demands an item held by another
    /// active agent. Follows demands from the lowest active agent to a cycle
    /// and moves each demanded item to its demander.
    fn rotate(&mut self) {
        let n = self.left.len();
        let active: Vec<usize> = self.active().collect();
        let mut demand = vec![usize::MAX; n];
        for &a in &active {
            demand[a] = self.top(a);
        }
        let mut seen_at = vec![usize::MAX; n];
        let mut path = Vec::new();
        let mut a = active[0];
        while seen_at[a] == usize::MAX {
            seen_at[a] = path.len();
            path.push(a);
            a = self.owner[demand[a]];
            debug_assert!(self.left[a] > 0);
        }
        for &member in &path[seen_at[a]..] {
            self.owner[demand[member]] = member;
        }
    }
}

/// Builds a policy whose sincere simulation yields `target`, if one exists.
pub fn synthesize_policy(inst: &Instance, target: &Allocation) -> Result<SynthesisResult> {
    inst.check_allocation(target)?;
    let profile = inst.rankings();
    Ok(synthesize_with(&profile, target))
}

pub(crate) fn synthesize_with(profile: &PreferenceProfile, target: &Allocation) -> SynthesisResult {
    let mut g = Greedy::new(profile, target);
    while !g.done() {
        if !g.step() {
            return SynthesisResult::Unreachable(g.stuck_state());
        }
    }
    SynthesisResult::Reached(Policy::new(g.turns))
}

/// Whether sincere picking under some policy produces `target`.
pub fn is_reachable(inst: &Instance, target: &Allocation) -> Result<bool> {
    Ok(matches!(synthesize_policy(inst, target)?, SynthesisResult::Reached(_)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Improvement {
    pub allocation: Allocation,
    pub policy: Policy,
    pub rotations: usize,
}

/// Turns `alloc` into a reachable allocation that is at least as good for
/// every agent and keeps every bundle size, together with its policy.
pub fn improve_allocation(inst: &Instance, alloc: &Allocation) -> Result<Improvement> {
    inst.check_allocation(alloc)?;
    let profile = inst.rankings();
    Ok(improve_with(&profile, alloc))
}

pub(crate) fn improve_with(profile: &PreferenceProfile, alloc: &Allocation) -> Improvement {
    let mut g = Greedy::new(profile, alloc);
    let mut rotations = 0;
    while !g.done() {
        if !g.step() {
            g.rotate();
            rotations += 1;
        }
    }
    Improvement {
        allocation: Allocation::from_owner_unchecked(g.owner, alloc.n_agents()),
        policy: Policy::new(g.turns),
        rotations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParetoVerdict {
    Efficient,
    ImprovedBy(Allocation),
}

/// Exhaustive Pareto check over all `n^m` allocations.
///
/// When improvements exist, returns the one with the largest utilitarian
/// welfare (itself Pareto efficient); ties go to the lexicographically
/// smallest owner vector.
pub fn pareto_check_bruteforce(inst: &Instance, alloc: &Allocation, cap: u64) -> Result<ParetoVerdict> {
    inst.check_allocation(alloc)?;
    let n = inst.n_agents();
    let m = inst.n_items();
    let size = (n as u128).checked_pow(m as u32);
    if size.map_or(true, |s| s > cap as u128) {
        return Err(Error::guard(size, cap));
    }
    let base = inst.welfare(alloc).per_agent;

    let mut owner = vec![0usize; m];
    let mut per_agent = vec![0 as Utility; n];
    per_agent[0] = inst.total_utility(0);
    let mut best: Option<(Utility, Vec<usize>)> = None;
    loop {
        let improves = per_agent.iter().zip(&base).all(|(x, b)| x >= b) && per_agent != base;
        if improves {
            let total: Utility = per_agent.iter().sum();
            if best.as_ref().map_or(true, |(t, _)| total > *t) {
                best = Some((total, owner.clone()));
            }
        }
        // odometer, last item fastest
        let mut j = m;
        loop {
            if j == 0 {
                return Ok(match best {
                    None => ParetoVerdict::Efficient,
                    Some((_, owner)) => ParetoVerdict::ImprovedBy(Allocation::from_owner_unchecked(owner, n)),
                });
            }
            j -= 1;
            let a = owner[j];
            per_agent[a] -= inst.utility(a, j);
            if a + 1 < n {
                owner[j] = a + 1;
                per_agent[a + 1] += inst.utility(a + 1, j);
                break;
            }
            owner[j] = 0;
            per_agent[0] += inst.utility(0, j);
        }
    }
}

/// Per-agent welfare of the simulated policy; convenience for verification.
pub(crate) fn welfare_of(inst: &Instance, policy: &Policy) -> Result<(Allocation, WelfareReport)> {
    let alloc = simulate(inst, policy)?;
    let w = inst.welfare(&alloc);
    Ok((alloc, w))
}
