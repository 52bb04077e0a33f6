//! Instances, derived rankings, policies, allocations and welfare.
//!
//! Agents and items are 0-based in memory. Every external surface (instance
//! files, policy strings, allocation maps) is 1-based.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Utility units. Rational inputs must be pre-scaled to integers.
pub type Utility = u64;

/// An allocation problem: agents, items and an additive utility matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n_agents: usize,
    labels: Vec<String>,
    utilities: Vec<Vec<Utility>>,
    tie_break: Vec<Vec<usize>>,
    dummy: Vec<bool>,
}

/// On-disk instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub agents: i64,
    pub items: Vec<String>,
    pub utilities: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<Vec<Vec<i64>>>,
}

impl Instance {
    /// Builds an instance with the default tie-breaking (ascending item index).
    pub fn new(n_agents: usize, labels: Vec<String>, utilities: Vec<Vec<Utility>>) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::invalid("agents", "at least one agent is required"));
        }
        if utilities.len() != n_agents {
            return Err(Error::invalid(
                "utilities",
                format!("expected {} rows (one per agent), found {}", n_agents, utilities.len()),
            ));
        }
        let m = labels.len();
        for (a, row) in utilities.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(
                    format!("utilities[{a}]"),
                    format!("ragged matrix: expected {m} entries, found {}", row.len()),
                ));
            }
        }
        let mut seen = HashSet::new();
        for (j, label) in labels.iter().enumerate() {
            if !seen.insert(label.as_str()) {
                return Err(Error::invalid(format!("items[{j}]"), format!("duplicate item label {label:?}")));
            }
        }
        let identity: Vec<usize> = (0..m).collect();
        Ok(Instance {
            n_agents,
            labels,
            utilities,
            tie_break: vec![identity; n_agents],
            dummy: vec![false; m],
        })
    }

    /// Same as [`Instance::new`] with labels `item1`, `item2`, ...
    pub fn from_matrix(utilities: Vec<Vec<Utility>>) -> Result<Self> {
        let m = utilities.first().map_or(0, Vec::len);
        let labels = (1..=m).map(|j| format!("item{j}")).collect();
        Instance::new(utilities.len(), labels, utilities)
    }

    /// Replaces the tie-breaking orders (0-based item permutations, one per agent).
    pub fn with_tie_break(mut self, tie_break: Vec<Vec<usize>>) -> Result<Self> {
        if tie_break.len() != self.n_agents {
            return Err(Error::invalid(
                "tie_break",
                format!("expected {} rows, found {}", self.n_agents, tie_break.len()),
            ));
        }
        for (a, order) in tie_break.iter().enumerate() {
            check_permutation(order, self.n_items()).map_err(|msg| Error::invalid(format!("tie_break[{a}]"), msg))?;
        }
        self.tie_break = tie_break;
        Ok(self)
    }

    /// Parses and validates an instance document (`load_instance`).
    pub fn from_json(document: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(document).map_err(|e| Error::invalid("document", e.to_string()))?;
        Instance::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if file.agents < 1 {
            return Err(Error::invalid("agents", format!("must be positive, found {}", file.agents)));
        }
        let n = file.agents as usize;
        let mut utilities = Vec::with_capacity(file.utilities.len());
        for (a, row) in file.utilities.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, &u) in row.iter().enumerate() {
                if u < 0 {
                    return Err(Error::invalid(format!("utilities[{a}][{j}]"), format!("negative utility {u}")));
                }
                out.push(u as Utility);
            }
            utilities.push(out);
        }
        let inst = Instance::new(n, file.items, utilities)?;
        match file.tie_break {
            None => Ok(inst),
            Some(rows) => {
                let mut orders = Vec::with_capacity(rows.len());
                for (a, row) in rows.iter().enumerate() {
                    let mut order = Vec::with_capacity(row.len());
                    for (pos, &j) in row.iter().enumerate() {
                        if j < 1 || j as usize > inst.n_items() {
                            return Err(Error::invalid(
                                format!("tie_break[{a}][{pos}]"),
                                format!("bad permutation: item {j} out of range 1..={}", inst.n_items()),
                            ));
                        }
                        order.push(j as usize - 1);
                    }
                    orders.push(order);
                }
                inst.with_tie_break(orders)
            }
        }
    }

    /// The instance as a document; `tie_break` is emitted only when non-default.
    pub fn to_file(&self) -> InstanceFile {
        let default = self.tie_break.iter().all(|o| o.iter().enumerate().all(|(p, &j)| p == j));
        InstanceFile {
            agents: self.n_agents as i64,
            items: self.labels.clone(),
            utilities: self.utilities.iter().map(|r| r.iter().map(|&u| u as i64).collect()).collect(),
            tie_break: (!default).then(|| {
                self.tie_break.iter().map(|o| o.iter().map(|&j| j as i64 + 1).collect()).collect()
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_items(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, item: usize) -> &str {
        &self.labels[item]
    }

    pub fn utility(&self, agent: usize, item: usize) -> Utility {
        self.utilities[agent][item]
    }

    pub fn utilities(&self) -> &[Vec<Utility>] {
        &self.utilities
    }

    pub fn tie_break(&self, agent: usize) -> &[usize] {
        &self.tie_break[agent]
    }

    pub fn is_dummy(&self, item: usize) -> bool {
        self.dummy[item]
    }

    pub fn total_utility(&self, agent: usize) -> Utility {
        self.utilities[agent].iter().sum()
    }

    pub fn max_utility(&self) -> Utility {
        self.utilities.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Strict per-agent rankings: utility descending, ties in tie-break order.
    pub fn rankings(&self) -> PreferenceProfile {
        let rankings = (0..self.n_agents)
            .map(|a| {
                let mut tb_pos = vec![0; self.n_items()];
                for (p, &j) in self.tie_break[a].iter().enumerate() {
                    tb_pos[j] = p;
                }
                let mut order: Vec<usize> = (0..self.n_items()).collect();
                order.sort_by(|&x, &y| {
                    self.utilities[a][y]
                        .cmp(&self.utilities[a][x])
                        .then(tb_pos[x].cmp(&tb_pos[y]))
                });
                order
            })
            .collect();
        PreferenceProfile::from_rankings_unchecked(rankings)
    }

    /// Appends zero-utility dummy items until the item count is a multiple
    /// of the agent count. Dummies come last in every tie-break order.
    pub fn pad_to_multiple(&self) -> Instance {
        let m = self.n_items();
        let missing = (self.n_agents - m % self.n_agents) % self.n_agents;
        if missing == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        let existing: HashSet<&str> = self.labels.iter().map(String::as_str).collect();
        let mut next = 1;
        for _ in 0..missing {
            let mut label = format!("dummy{next}");
            while existing.contains(label.as_str()) {
                label.push('\'');
            }
            next += 1;
            out.labels.push(label);
            out.dummy.push(true);
        }
        for row in &mut out.utilities {
            row.resize(m + missing, 0);
        }
        for order in &mut out.tie_break {
            order.extend(m..m + missing);
        }
        out
    }

    /// Number of dummy items appended by padding.
    pub fn dummy_count(&self) -> usize {
        self.dummy.iter().filter(|&&d| d).count()
    }

    pub fn welfare(&self, alloc: &Allocation) -> WelfareReport {
        let mut per_agent = vec![0; self.n_agents];
        for (item, &agent) in alloc.owners().iter().enumerate() {
            per_agent[agent] += self.utilities[agent][item];
        }
        WelfareReport::from_per_agent(per_agent)
    }

    pub(crate) fn check_allocation(&self, alloc: &Allocation) -> Result<()> {
        if alloc.n_items() != self.n_items() {
            return Err(Error::AllocationMismatch {
                expected: self.n_items(),
                found: alloc.n_items(),
            });
        }
        if alloc.n_agents() != self.n_agents {
            return Err(Error::Precondition(format!(
                "allocation is over {} agents, instance has {}",
                alloc.n_agents(),
                self.n_agents
            )));
        }
        Ok(())
    }

    pub(crate) fn check_policy(&self, policy: &Policy) -> Result<()> {
        if policy.len() != self.n_items() {
            return Err(Error::PolicyLength {
                expected: self.n_items(),
                found: policy.len(),
            });
        }
        if let Some(&bad) = policy.turns().iter().find(|&&a| a >= self.n_agents) {
            return Err(Error::InvalidAgent {
                index: bad + 1,
                n_agents: self.n_agents,
            });
        }
        Ok(())
    }
}

fn check_permutation(order: &[usize], m: usize) -> std::result::Result<(), String> {
    if order.len() != m {
        return Err(format!("bad permutation: expected {m} entries, found {}", order.len()));
    }
    let mut seen = vec![false; m];
    for &j in order {
        if j >= m || std::mem::replace(&mut seen[j], true) {
            return Err(format!("bad permutation: item {} repeated or out of range", j + 1));
        }
    }
    Ok(())
}

/// Strict ordinal rankings, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    rankings: Vec<Vec<usize>>,
    positions: Vec<Vec<usize>>,
}

impl PreferenceProfile {
    /// Validates that every ranking is a permutation of the same item set.
    pub fn from_rankings(rankings: Vec<Vec<usize>>) -> Result<Self> {
        if rankings.is_empty() {
            return Err(Error::invalid("profile", "at least one agent is required"));
        }
        let m = rankings[0].len();
        for (a, r) in rankings.iter().enumerate() {
            check_permutation(r, m).map_err(|msg| Error::invalid(format!("profile[{a}]"), msg))?;
        }
        Ok(Self::from_rankings_unchecked(rankings))
    }

    fn from_rankings_unchecked(rankings: Vec<Vec<usize>>) -> Self {
        let positions = rankings
            .iter()
            .map(|r| {
                let mut pos = vec![0; r.len()];
                for (p, &j) in r.iter().enumerate() {
                    pos[j] = p;
                }
                pos
            })
            .collect();
        PreferenceProfile { rankings, positions }
    }

    pub fn n_agents(&self) -> usize {
        self.rankings.len()
    }

    pub fn n_items(&self) -> usize {
        self.rankings.first().map_or(0, Vec::len)
    }

    pub fn ranking(&self, agent: usize) -> &[usize] {
        &self.rankings[agent]
    }

    pub fn rankings(&self) -> &[Vec<usize>] {
        &self.rankings
    }

    /// 0-based rank of `item` for `agent` (0 = favourite).
    pub fn position(&self, agent: usize, item: usize) -> usize {
        self.positions[agent][item]
    }

    pub fn all_identical(&self) -> bool {
        self.rankings.windows(2).all(|w| w[0] == w[1])
    }
}

/// A picking sequence. Turn `i` names the agent who picks the `i`-th item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Policy(Vec<usize>);

impl Policy {
    pub fn new(turns: Vec<usize>) -> Self {
        Policy(turns)
    }

    /// `turns` holds 1-based agent indices.
    pub fn from_one_based(turns: &[usize]) -> Result<Self> {
        turns
            .iter()
            .map(|&a| a.checked_sub(1).ok_or_else(|| Error::invalid("policy", "agent indices start at 1")))
            .collect::<Result<Vec<_>>>()
            .map(Policy)
    }

    /// Parses `"1,2,2,1"` or, for at most nine agents, the compact `"1221"`.
    pub fn parse(text: &str, n_agents: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Policy(Vec::new()));
        }
        let raw: Vec<usize> = if text.contains(',') {
            text.split(',')
                .enumerate()
                .map(|(i, tok)| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::invalid(format!("policy[{i}]"), format!("not an agent index: {tok:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            if text.len() > 1 && n_agents > 9 {
                return Err(Error::invalid("policy", "compact digit form needs at most 9 agents; use commas"));
            }
            text.chars()
                .enumerate()
                .map(|(i, c)| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::invalid(format!("policy[{i}]"), format!("not a digit: {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        for (i, &a) in raw.iter().enumerate() {
            if a == 0 || a > n_agents {
                return Err(Error::invalid(
                    format!("policy[{i}]"),
                    format!("agent {a} out of range 1..={n_agents}"),
                ));
            }
        }
        Policy::from_one_based(&raw)
    }

    pub fn turns(&self) -> &[usize] {
        &self.0
    }

    pub fn into_turns(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Membership test for one class. Restricted classes need the length to
    /// be a multiple of `n_agents`.
    pub fn belongs_to(&self, class: PolicyClass, n_agents: usize) -> bool {
        if self.0.iter().any(|&a| a >= n_agents) {
            return false;
        }
        let m = self.0.len();
        if class == PolicyClass::All {
            return true;
        }
        if m % n_agents != 0 {
            return false;
        }
        match class {
            PolicyClass::All => true,
            PolicyClass::Balanced => {
                let mut counts = vec![0; n_agents];
                for &a in &self.0 {
                    counts[a] += 1;
                }
                counts.iter().all(|&c| c == m / n_agents)
            }
            PolicyClass::RecursivelyBalanced => self.0.chunks(n_agents).all(|round| {
                let mut seen = vec![false; n_agents];
                round.iter().all(|&a| !std::mem::replace(&mut seen[a], true))
            }),
            PolicyClass::BalancedAlternating => {
                if !self.belongs_to(PolicyClass::RecursivelyBalanced, n_agents) {
                    return false;
                }
                self.0
                    .chunks(n_agents)
                    .collect::<Vec<_>>()
                    .windows(2)
                    .all(|w| w[0].iter().rev().eq(w[1].iter()))
            }
        }
    }

    /// Every class the policy belongs to, widest first.
    pub fn classes(&self, n_agents: usize) -> Vec<PolicyClass> {
        PolicyClass::ALL
            .into_iter()
            .filter(|&c| self.belongs_to(c, n_agents))
            .collect()
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PolicyClass {
    All,
    Balanced,
    RecursivelyBalanced,
    BalancedAlternating,
}

impl PolicyClass {
    /// Widest to narrowest.
    pub const ALL: [PolicyClass; 4] = [
        PolicyClass::All,
        PolicyClass::Balanced,
        PolicyClass::RecursivelyBalanced,
        PolicyClass::BalancedAlternating,
    ];

    pub fn is_restricted(self) -> bool {
        self != PolicyClass::All
    }
}

impl fmt::Display for PolicyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyClass::All => "all",
            PolicyClass::Balanced => "balanced",
            PolicyClass::RecursivelyBalanced => "recursively-balanced",
            PolicyClass::BalancedAlternating => "balanced-alternating",
        })
    }
}

impl FromStr for PolicyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all" => Ok(PolicyClass::All),
            "balanced" => Ok(PolicyClass::Balanced),
            "recursively-balanced" | "recursivelybalanced" | "rb" => Ok(PolicyClass::RecursivelyBalanced),
            "balanced-alternating" | "balancedalternating" | "ba" => Ok(PolicyClass::BalancedAlternating),
            _ => Err(Error::invalid("class", format!("unknown policy class {s:?}"))),
        }
    }
}

/// A total map from items to agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    owner: Vec<usize>,
    n_agents: usize,
}

impl Allocation {
    pub fn new(owner: Vec<usize>, n_agents: usize) -> Result<Self> {
        if let Some(&bad) = owner.iter().find(|&&a| a >= n_agents) {
            return Err(Error::InvalidAgent { index: bad + 1, n_agents });
        }
        Ok(Allocation { owner, n_agents })
    }

    pub(crate) fn from_owner_unchecked(owner: Vec<usize>, n_agents: usize) -> Self {
        Allocation { owner, n_agents }
    }

    /// Builds an allocation from per-agent bundles that must partition `0..n_items`.
    pub fn from_bundles(bundles: &[Vec<usize>], n_items: usize) -> Result<Self> {
        let mut owner = vec![usize::MAX; n_items];
        for (a, bundle) in bundles.iter().enumerate() {
            for &j in bundle {
                if j >= n_items {
                    return Err(Error::invalid(format!("bundles[{a}]"), format!("item {} out of range", j + 1)));
                }
                if owner[j] != usize::MAX {
                    return Err(Error::invalid(format!("bundles[{a}]"), format!("item {} assigned twice", j + 1)));
                }
                owner[j] = a;
            }
        }
        if let Some(j) = owner.iter().position(|&a| a == usize::MAX) {
            return Err(Error::invalid("bundles", format!("allocation is not total: item {} unassigned", j + 1)));
        }
        Ok(Allocation {
            owner,
            n_agents: bundles.len(),
        })
    }

    pub fn owner(&self, item: usize) -> usize {
        self.owner[item]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn n_items(&self) -> usize {
        self.owner.len()
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Per-agent item lists in ascending item order.
    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut bundles = vec![Vec::new(); self.n_agents];
        for (j, &a) in self.owner.iter().enumerate() {
            bundles[a].push(j);
        }
        bundles
    }

    pub fn bundle_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_agents];
        for &a in &self.owner {
            sizes[a] += 1;
        }
        sizes
    }

    /// JSON map from item label to 1-based agent, in item order.
    pub fn to_json(&self, inst: &Instance) -> Value {
        let map: Map<String, Value> = self
            .owner
            .iter()
            .enumerate()
            .map(|(j, &a)| (inst.label(j).to_string(), Value::from(a + 1)))
            .collect();
        Value::Object(map)
    }

    pub fn from_json(inst: &Instance, value: &Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::invalid("allocation", "expected a JSON object"))?;
        let mut owner = vec![usize::MAX; inst.n_items()];
        for (label, agent) in map {
            let j = inst
                .labels()
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::invalid(format!("allocation.{label}"), "unknown item label"))?;
            let a = agent
                .as_u64()
                .filter(|&a| a >= 1 && a as usize <= inst.n_agents())
                .ok_or_else(|| Error::invalid(format!("allocation.{label}"), format!("bad agent index {agent}")))?;
            owner[j] = a as usize - 1;
        }
        if let Some(j) = owner.iter().position(|&a| a == usize::MAX) {
            return Err(Error::invalid("allocation", format!("not total: item {:?} unassigned", inst.label(j))));
        }
        Ok(Allocation {
            owner,
            n_agents: inst.n_agents(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WelfareReport {
    pub per_agent: Vec<Utility>,
    pub utilitarian: Utility,
    pub egalitarian: Utility,
}

impl WelfareReport {
    pub fn from_per_agent(per_agent: Vec<Utility>) -> Self {
        let utilitarian = per_agent.iter().sum();
        let egalitarian = per_agent.iter().copied().min().unwrap_or(0);
        WelfareReport {
            per_agent,
            utilitarian,
            egalitarian,
        }
    }

    pub fn get(&self, objective: Objective) -> Utility {
        match objective {
            Objective::Utilitarian => self.utilitarian,
            Objective::Egalitarian => self.egalitarian,
        }
    }

    /// True iff `self` is at least as good for everyone and better for someone.
    pub fn pareto_improves(&self, other: &WelfareReport) -> bool {
        self.per_agent.iter().zip(&other.per_agent).all(|(a, b)| a >= b) && self.per_agent != other.per_agent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    Utilitarian,
    Egalitarian,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "utilitarian" | "util" => Ok(Objective::Utilitarian),
            "egalitarian" | "egal" => Ok(Objective::Egalitarian),
            _ => Err(Error::invalid("objective", format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Possible,
    Necessary,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "possible" => Ok(Mode::Possible),
            "necessary" => Ok(Mode::Necessary),
            _ => Err(Error::invalid("mode", format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Max,
    Min,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Direction::Max),
            "min" => Ok(Direction::Min),
            _ => Err(Error::invalid("direction", format!("unknown direction {s:?}"))),
        }
    }
}

/// "Is there a policy / does every policy in `class` reach welfare `threshold`?"
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionProblem {
    pub objective: Objective,
    pub mode: Mode,
    pub threshold: i64,
    pub class: PolicyClass,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two agents, items a..d.
    pub fn remark1() -> Instance {
        Instance::new(
            2,
            ["a", "b", "c", "d"].map(String::from).to_vec(),
            vec![vec![5, 4, 2, 0], vec![8, 2, 1, 0]],
        )
        .unwrap()
    }

    /// Orders bac / abc / acb with Borda scores 2,1,0.
    pub fn example1() -> Instance {
        Instance::new(
            3,
            ["a", "b", "c"].map(String::from).to_vec(),
            vec![vec![1, 2, 0], vec![2, 1, 0], vec![2, 0, 1]],
        )
        .unwrap()
    }
}
