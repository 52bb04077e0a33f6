//! Gadget answers against direct exhaustive search on the source problems.

use itertools::Itertools;
use proptest::prelude::*;

use seqalloc::oracle::{brute_force_decide, enumerate_policies, OracleConfig, DEFAULT_GUARD};
use seqalloc::reductions::{
    gen_equipartition_balanced, gen_numerical_3dm, gen_partition_rb, verify_witness, Certificate, GadgetInstance,
    Witness,
};
use seqalloc::simulate;

fn has_matching(x: &[u64], y: &[u64], z: &[u64], t: u64) -> bool {
    let n = x.len();
    (0..n).permutations(n).any(|sigma| {
        (0..n)
            .permutations(n)
            .any(|pi| (0..n).all(|i| x[i] + y[sigma[i]] + z[pi[i]] == t))
    })
}

fn has_subset(a: &[u64], size: Option<usize>) -> bool {
    let half = a.iter().sum::<u64>() / 2;
    (0..a.len())
        .powerset()
        .any(|s| size.map_or(true, |k| s.len() == k) && s.iter().map(|&i| a[i]).sum::<u64>() == half)
}

/// The oracle's answer, the certificate search and the policy check agree:
/// a policy verifies exactly when it reaches the threshold.
fn check_gadget(g: &GadgetInstance, expected: bool) {
    let answer = brute_force_decide(&g.instance, &g.query, &OracleConfig::default()).unwrap();
    assert_eq!(answer.answer, expected, "{:?}", g.spec);
    assert_eq!(g.certificate.is_some(), expected, "{:?}", g.spec);
    if let Some(cert) = &g.certificate {
        assert!(verify_witness(g, &Witness::Certificate(cert.clone())).unwrap());
    }
    let (n, m) = (g.instance.n_agents(), g.instance.n_items());
    for p in enumerate_policies(g.query.class, n, m, DEFAULT_GUARD).unwrap() {
        let value = g.instance.welfare(&simulate(&g.instance, &p).unwrap()).get(g.query.objective);
        let reaches = value as i64 >= g.query.threshold;
        assert_eq!(verify_witness(g, &Witness::Policy(p.clone())).unwrap(), reaches, "policy {p} on {:?}", g.spec);
    }
}

/// Bounded 3DM input for two triples: every number strictly between t/4
/// and t/2, with the sum condition.
fn bounded_3dm() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>, u64)> {
    (12u64..=24).prop_flat_map(|t| {
        let range = t / 4 + 1..=(t - 1) / 2;
        let pair = move || proptest::collection::vec(range.clone(), 2);
        (pair(), pair(), pair(), Just(t))
            .prop_filter("sum condition", |(x, y, z, t)| x.iter().chain(y).chain(z).sum::<u64>() == 2 * t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn partition_gadget_sound(a in proptest::collection::vec(1u64..=6, 1..=4)
        .prop_filter("even sum", |a| a.iter().sum::<u64>() % 2 == 0))
    {
        let g = gen_partition_rb(&a).unwrap();
        check_gadget(&g, has_subset(&a, None));
    }

    #[test]
    fn three_dm_gadget_sound((x, y, z, t) in bounded_3dm(), extra in 0usize..=2) {
        let g = gen_numerical_3dm(&x, &y, &z, t, 4 + extra).unwrap();
        for j in 2..4 {
            prop_assert!((0..2).all(|a| g.instance.utility(a, j) == z[j - 2]));
        }
        check_gadget(&g, has_matching(&x, &y, &z, t));
    }

    #[test]
    fn equipartition_gadget_sound(a in proptest::collection::vec(0u64..=6, 1..=3)
        .prop_flat_map(|h| proptest::collection::vec(0u64..=6, 2 * h.len()))
        .prop_filter("even sum", |a| a.iter().sum::<u64>() % 2 == 0))
    {
        let g = gen_equipartition_balanced(&a).unwrap();
        let expected = has_subset(&a, Some(a.len() / 2));
        let answer = brute_force_decide(&g.instance, &g.query, &OracleConfig::default()).unwrap();
        prop_assert_eq!(answer.answer, expected);
        prop_assert_eq!(g.certificate.is_some(), expected);
        if let Some(p) = answer.witness {
            prop_assert!(verify_witness(&g, &Witness::Policy(p)).unwrap());
        }
    }
}

#[test]
fn three_dm_grid_with_yes_and_no_cases() {
    let t = 16;
    let mut seen = [0usize; 2];
    for values in (0..6).map(|_| 5u64..=7).multi_cartesian_product() {
        if values.iter().sum::<u64>() != 2 * t {
            continue;
        }
        let (x, y, z) = (&values[0..2], &values[2..4], &values[4..6]);
        let expected = has_matching(x, y, z, t);
        seen[usize::from(expected)] += 1;
        check_gadget(&gen_numerical_3dm(x, y, z, t, 4).unwrap(), expected);
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn certificates_reject_tampering() {
    let g = gen_numerical_3dm(&[4, 5], &[4, 5], &[4, 3], 12, 4);
    assert!(g.is_err(), "numbers outside the sum condition are rejected");

    let g = gen_partition_rb(&[3, 1, 2]).unwrap();
    let Some(Certificate::Subset { indices }) = g.certificate.clone() else {
        panic!("yes-instance without a certificate")
    };
    assert_eq!(indices, vec![1]);
    for bad in [vec![2], vec![1, 1], vec![4], vec![]] {
        assert!(!verify_witness(&g, &Witness::Certificate(Certificate::Subset { indices: bad })).unwrap());
    }
}
