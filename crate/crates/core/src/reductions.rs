//! Hardness gadgets as welfare instances with a matching decision query.
//!
//! Certificates use 1-based indices, as in the sidecar documents.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::simulate;
use crate::model::{DecisionProblem, Instance, Mode, Objective, Policy, PolicyClass, PreferenceProfile, Utility};

/// Largest `n` for which the 3DM generator searches for a certificate.
const MATCHING_SEARCH_LIMIT: usize = 9;
/// Largest target sum for which subset certificates are searched.
const SUBSET_SEARCH_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopKMode {
    PossibleEgal,
    PossibleUtil,
    NecessaryEgal,
    NecessaryUtil,
}

impl std::str::FromStr for TopKMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "possible-egal" | "possible-egalitarian" => Ok(TopKMode::PossibleEgal),
            "possible-util" | "possible-utilitarian" => Ok(TopKMode::PossibleUtil),
            "necessary-egal" | "necessary-egalitarian" => Ok(TopKMode::NecessaryEgal),
            "necessary-util" | "necessary-utilitarian" => Ok(TopKMode::NecessaryUtil),
            _ => Err(Error::invalid("mode", format!("unknown top-k mode {s:?}"))),
        }
    }
}

/// Generator parameters; enough to rebuild the gadget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GadgetSpec {
    Numerical3dm {
        x: Vec<u64>,
        y: Vec<u64>,
        z: Vec<u64>,
        t: u64,
        items: usize,
    },
    Partition {
        a: Vec<u64>,
    },
    Equipartition {
        a: Vec<u64>,
    },
    TopK {
        /// 1-based item rankings, one per agent; agent 1 is distinguished.
        profile: Vec<Vec<usize>>,
        k: usize,
        mode: TopKMode,
        class: PolicyClass,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Certificate {
    /// Agent `i` gets big item `sigma[i]` and small item `pi[i]`.
    Matching { sigma: Vec<usize>, pi: Vec<usize> },
    /// An index set of the source sequence.
    Subset { indices: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Policy(Policy),
    Certificate(Certificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetInstance {
    pub spec: GadgetSpec,
    pub instance: Instance,
    pub query: DecisionProblem,
    pub certificate: Option<Certificate>,
}

/// The query/certificate document stored next to a gadget's instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(flatten)]
    pub spec: GadgetSpec,
    pub query: DecisionProblem,
    #[serde(default)]
    pub certificate: Option<Certificate>,
}

impl GadgetInstance {
    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            spec: self.spec.clone(),
            query: self.query,
            certificate: self.certificate.clone(),
        }
    }

    /// Rebuilds a gadget from its parameters.
    pub fn from_spec(spec: &GadgetSpec) -> Result<Self> {
        match spec {
            GadgetSpec::Numerical3dm { x, y, z, t, items } => gen_numerical_3dm(x, y, z, *t, *items),
            GadgetSpec::Partition { a } => gen_partition_rb(a),
            GadgetSpec::Equipartition { a } => gen_equipartition_balanced(a),
            GadgetSpec::TopK { profile, k, mode, class } => {
                let zero_based = profile
                    .iter()
                    .map(|r| r.iter().map(|&j| j.checked_sub(1)).collect::<Option<Vec<_>>>())
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::invalid("profile", "item indices start at 1"))?;
                topk_welfare_transform(&PreferenceProfile::from_rankings(zero_based)?, *k, *mode, *class)
            }
        }
    }
}

fn labels(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}{i}"))
}

/// Numerical 3-dimensional matching as Possible Egalitarian Welfare over
/// all policies: `n` agents, `n` big items worth `u + x_i + y_j` to agent
/// `i`, `n` small items worth `z_j` to everyone, and `m - 2n` worthless
/// items, with `u = 1 + sum(z)` and threshold `u + t`.
///
/// The equivalence with the matching problem relies on no agent being able
/// to reach `u + t` with several small items or none; that holds when every
/// number lies strictly between `t/4` and `t/2`, the usual form of the
/// problem. Outside that range a "yes" gadget need not have a matching.
pub fn gen_numerical_3dm(x: &[u64], y: &[u64], z: &[u64], t: u64, m: usize) -> Result<GadgetInstance> {
    let n = x.len();
    if n == 0 || y.len() != n || z.len() != n {
        return Err(Error::invalid("x/y/z", "X, Y and Z must be non-empty and of equal size"));
    }
    let total: u64 = x.iter().chain(y).chain(z).sum();
    if total != n as u64 * t {
        return Err(Error::invalid(
            "t",
            format!("sum condition violated: X+Y+Z sums to {total}, expected n*t = {}", n as u64 * t),
        ));
    }
    if m < 2 * n {
        return Err(Error::invalid("items", format!("need at least 2n = {} items, got {m}", 2 * n)));
    }
    let u: Utility = 1 + z.iter().sum::<u64>();
    let utilities = (0..n)
        .map(|i| {
            let mut row: Vec<Utility> = y.iter().map(|&yj| u + x[i] + yj).collect();
            row.extend_from_slice(z);
            row.resize(m, 0);
            row
        })
        .collect();
    let item_labels = labels("big", n).chain(labels("small", n)).chain(labels("zero", m - 2 * n)).collect();
    let instance = Instance::new(n, item_labels, utilities)?;
    Ok(GadgetInstance {
        spec: GadgetSpec::Numerical3dm {
            x: x.to_vec(),
            y: y.to_vec(),
            z: z.to_vec(),
            t,
            items: m,
        },
        instance,
        query: DecisionProblem {
            objective: Objective::Egalitarian,
            mode: Mode::Possible,
            threshold: (u + t) as i64,
            class: PolicyClass::All,
        },
        certificate: (n <= MATCHING_SEARCH_LIMIT).then(|| find_matching(x, y, z, t)).flatten(),
    })
}

/// Tries every `sigma`; `pi` is then forced up to equal `z` values.
fn find_matching(x: &[u64], y: &[u64], z: &[u64], t: u64) -> Option<Certificate> {
    let n = x.len();
    for sigma in (0..n).permutations(n) {
        let mut used = vec![false; n];
        let pi: Option<Vec<usize>> = (0..n)
            .map(|i| {
                let need = t.checked_sub(x[i] + y[sigma[i]])?;
                let j = (0..n).find(|&j| !used[j] && z[j] == need)?;
                used[j] = true;
                Some(j)
            })
            .collect();
        if let Some(pi) = pi {
            return Some(Certificate::Matching {
                sigma: sigma.iter().map(|s| s + 1).collect(),
                pi: pi.iter().map(|p| p + 1).collect(),
            });
        }
    }
    None
}

/// Utilities `c` of the Partition gadget: `c_1 = 2B`,
/// `c_{2k} = c_{2k+1} = c_{2k-1} - a_k`, `c_{2n} = 0`.
fn partition_utilities(a: &[u64]) -> Vec<Utility> {
    let n = a.len();
    let two_b: u64 = a.iter().sum();
    let mut c = vec![0; 2 * n];
    c[0] = two_b;
    for k in 1..n {
        let v = c[2 * k - 2] - a[k - 1];
        c[2 * k - 1] = v;
        c[2 * k] = v;
    }
    assert_eq!(c[2 * n - 2], a[n - 1], "c_(2n-1) - a_n must vanish");
    c
}

/// Partition as Possible Egalitarian Welfare over recursively balanced
/// policies for two agents with identical utilities; threshold `C/2`.
pub fn gen_partition_rb(a: &[u64]) -> Result<GadgetInstance> {
    if a.is_empty() || a.contains(&0) {
        return Err(Error::invalid("a", "expected a non-empty sequence of positive integers"));
    }
    let sum: u64 = a.iter().sum();
    if sum % 2 != 0 {
        return Err(Error::invalid("a", format!("odd sum {sum}")));
    }
    let c = partition_utilities(a);
    let total: u64 = c.iter().sum();
    let instance = Instance::new(2, labels("c", c.len()).collect(), vec![c.clone(), c])?;
    Ok(GadgetInstance {
        spec: GadgetSpec::Partition { a: a.to_vec() },
        instance,
        query: DecisionProblem {
            objective: Objective::Egalitarian,
            mode: Mode::Possible,
            threshold: (total / 2) as i64,
            class: PolicyClass::RecursivelyBalanced,
        },
        certificate: find_subset(a, sum / 2, None).map(|indices| Certificate::Subset { indices }),
    })
}

/// Equal-size, equal-sum split as Possible Egalitarian Welfare over
/// balanced policies for two identical agents.
pub fn gen_equipartition_balanced(a: &[u64]) -> Result<GadgetInstance> {
    if a.is_empty() || a.len() % 2 != 0 {
        return Err(Error::invalid("a", "expected a non-empty sequence of even length"));
    }
    let sum: u64 = a.iter().sum();
    if sum % 2 != 0 {
        return Err(Error::invalid("a", format!("odd sum {sum}")));
    }
    let instance = Instance::new(2, labels("a", a.len()).collect(), vec![a.to_vec(), a.to_vec()])?;
    Ok(GadgetInstance {
        spec: GadgetSpec::Equipartition { a: a.to_vec() },
        instance,
        query: DecisionProblem {
            objective: Objective::Egalitarian,
            mode: Mode::Possible,
            threshold: (sum / 2) as i64,
            class: PolicyClass::Balanced,
        },
        certificate: find_subset(a, sum / 2, Some(a.len() / 2)).map(|indices| Certificate::Subset { indices }),
    })
}

/// Lexicographically first index set (1-based) with the given sum and,
/// optionally, size. Dynamic program over suffixes.
fn find_subset(a: &[u64], target: u64, size: Option<usize>) -> Option<Vec<usize>> {
    if target > SUBSET_SEARCH_LIMIT {
        return None;
    }
    let n = a.len();
    let sizes = size.map_or(1, |_| n + 1);
    let t = target as usize;
    // reach[k][c][s]: items k.. can pick c items (if sized) summing to s
    let idx = |c: usize, s: usize| c * (t + 1) + s;
    let mut reach = vec![vec![false; sizes * (t + 1)]; n + 1];
    reach[n][idx(0, 0)] = true;
    for k in (0..n).rev() {
        let ak = a[k] as usize;
        for c in 0..sizes {
            for s in 0..=t {
                let skip = reach[k + 1][idx(c, s)];
                let take = s >= ak && {
                    let pc = if size.is_some() { c.checked_sub(1) } else { Some(0) };
                    pc.is_some_and(|pc| reach[k + 1][idx(pc, s - ak)])
                };
                reach[k][idx(c, s)] = skip || take;
            }
        }
    }
    let mut c = size.unwrap_or(0);
    let mut s = t;
    if !reach[0][idx(c, s)] {
        return None;
    }
    let mut picked = Vec::new();
    for k in 0..n {
        let ak = a[k] as usize;
        let pc = if size.is_some() { c.checked_sub(1) } else { Some(0) };
        if let Some(pc) = pc.filter(|&pc| s >= ak && reach[k + 1][idx(pc, s - ak)]) {
            picked.push(k + 1);
            c = pc;
            s -= ak;
        }
    }
    Some(picked)
}

/// Top-k possible/necessary set problems as welfare queries.
///
/// Agent 1 values its `k` favourite items at `k^2` each (egalitarian
/// possible), `k` each (egalitarian necessary, so `k^2` in total) or
/// `m k^2` each (utilitarian), and the rest at zero. Every other agent values
/// every item at `k^3` (egalitarian) or `k` (utilitarian). Each agent's
/// tie-break order is its given ranking, so sincere picking follows the
/// profile exactly.
pub fn topk_welfare_transform(
    profile: &PreferenceProfile,
    k: usize,
    mode: TopKMode,
    class: PolicyClass,
) -> Result<GadgetInstance> {
    if !matches!(class, PolicyClass::RecursivelyBalanced | PolicyClass::BalancedAlternating) {
        return Err(Error::invalid("class", "top-k transform targets recursively balanced or balanced alternating policies"));
    }
    let (n, m) = (profile.n_agents(), profile.n_items());
    if k == 0 || k > m {
        return Err(Error::invalid("k", format!("invalid k: need 1 <= k <= {m}, got {k}")));
    }
    if m % n != 0 {
        return Err(Error::Divisibility { items: m, agents: n });
    }
    let (kk, mm) = (k as u64, m as u64);
    let (top, rest, threshold, objective, query_mode) = match mode {
        TopKMode::PossibleEgal => (kk * kk, kk * kk * kk, kk * kk * kk, Objective::Egalitarian, Mode::Possible),
        TopKMode::PossibleUtil => (mm * kk * kk, kk, mm * kk * kk * kk, Objective::Utilitarian, Mode::Possible),
        TopKMode::NecessaryEgal => (kk, kk * kk * kk, kk * kk, Objective::Egalitarian, Mode::Necessary),
        TopKMode::NecessaryUtil => (mm * kk * kk, kk, mm * kk * kk * kk, Objective::Utilitarian, Mode::Necessary),
    };
    let mut utilities = vec![vec![rest; m]; n];
    utilities[0] = vec![0; m];
    for &j in &profile.ranking(0)[..k] {
        utilities[0][j] = top;
    }
    let instance = Instance::new(n, labels("item", m).collect(), utilities)?.with_tie_break(profile.rankings().to_vec())?;
    debug_assert_eq!(instance.rankings(), *profile);
    Ok(GadgetInstance {
        spec: GadgetSpec::TopK {
            profile: profile.rankings().iter().map(|r| r.iter().map(|j| j + 1).collect()).collect(),
            k,
            mode,
            class,
        },
        instance,
        query: DecisionProblem {
            objective,
            mode: query_mode,
            threshold: threshold as i64,
            class,
        },
        certificate: None,
    })
}

fn is_permutation_1based(v: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    v.len() == n && v.iter().all(|&i| (1..=n).contains(&i) && !std::mem::replace(&mut seen[i - 1], true))
}

fn valid_index_set(indices: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    indices
        .iter()
        .all(|&i| (1..=n).contains(&i) && !std::mem::replace(&mut seen[i - 1], true))
}

fn shape_mismatch() -> Error {
    Error::Precondition("witness shape does not match gadget kind".into())
}

/// Checks a certificate or a policy against the gadget it was built for.
pub fn verify_witness(g: &GadgetInstance, witness: &Witness) -> Result<bool> {
    match (&g.spec, witness) {
        (GadgetSpec::Numerical3dm { x, y, z, t, .. }, Witness::Certificate(Certificate::Matching { sigma, pi })) => {
            let n = x.len();
            Ok(is_permutation_1based(sigma, n)
                && is_permutation_1based(pi, n)
                && (0..n).all(|i| x[i] + y[sigma[i] - 1] + z[pi[i] - 1] == *t))
        }
        (GadgetSpec::Numerical3dm { x, z, t, .. }, Witness::Policy(p)) => {
            let n = x.len();
            let u: u64 = 1 + z.iter().sum::<u64>();
            let alloc = simulate(&g.instance, p)?;
            let w = g.instance.welfare(&alloc);
            Ok(alloc.bundles().iter().zip(&w.per_agent).all(|(bundle, &value)| {
                let big = bundle.iter().filter(|&&j| j < n).count();
                let small = bundle.iter().filter(|&&j| (n..2 * n).contains(&j)).count();
                big == 1 && small == 1 && value == u + t
            }))
        }
        (GadgetSpec::Partition { a }, Witness::Certificate(Certificate::Subset { indices })) => {
            let half = a.iter().sum::<u64>() / 2;
            Ok(valid_index_set(indices, a.len()) && indices.iter().map(|&i| a[i - 1]).sum::<u64>() == half)
        }
        (GadgetSpec::Partition { a }, Witness::Policy(p)) => {
            g.instance.check_policy(p)?;
            if !p.belongs_to(PolicyClass::RecursivelyBalanced, 2) {
                return Ok(false);
            }
            let half = a.iter().sum::<u64>() / 2;
            let starts: u64 = p
                .turns()
                .chunks(2)
                .zip(a)
                .filter(|(round, _)| round[0] == 0)
                .map(|(_, &ak)| ak)
                .sum();
            Ok(starts == half)
        }
        (GadgetSpec::Equipartition { a }, Witness::Certificate(Certificate::Subset { indices })) => {
            let half = a.iter().sum::<u64>() / 2;
            Ok(valid_index_set(indices, a.len())
                && indices.len() * 2 == a.len()
                && indices.iter().map(|&i| a[i - 1]).sum::<u64>() == half)
        }
        (GadgetSpec::Equipartition { .. } | GadgetSpec::TopK { .. }, Witness::Policy(p)) => {
            let alloc = simulate(&g.instance, p)?;
            let value = g.instance.welfare(&alloc).get(g.query.objective);
            Ok(p.belongs_to(g.query.class, g.instance.n_agents()) && value as i128 >= g.query.threshold as i128)
        }
        _ => Err(shape_mismatch()),
    }
}
