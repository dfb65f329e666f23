use proptest::prelude::*;
use scbound_core::common_info::{common_part, residual_info, residual_info_oracle};
use scbound_core::dist::{h2, Alphabet, Channel, JointDist};
use scbound_core::normal_form::{channel_normal_form, pair_normal_form, sampling_normal_form};

fn bit(n: &str) -> Alphabet {
    Alphabet::range(n, 2)
}

/// Dense joint from raw weights; zero weights leave holes in the support.
fn joint(sizes: &[usize], w: &[u8]) -> JointDist {
    let axes: Vec<Alphabet> = sizes.iter().enumerate().map(|(i, &n)| Alphabet::range(format!("A{i}"), n)).collect();
    let total: f64 = w.iter().map(|&v| v as f64).sum();
    let probs: Vec<f64> = if total == 0.0 {
        let mut p = vec![0.0; w.len()];
        p[0] = 1.0;
        p
    } else {
        w.iter().map(|&v| v as f64 / total).collect()
    };
    JointDist::from_dense(axes, &probs).unwrap()
}

fn joint_strategy(max_axes: usize, max_size: usize) -> impl Strategy<Value = JointDist> {
    prop::collection::vec(1..=max_size, 1..=max_axes).prop_flat_map(|sizes| {
        let n: usize = sizes.iter().product();
        // weights 0..4 so supports are often sparse
        prop::collection::vec(0u8..4, n).prop_map(move |w| joint(&sizes, &w))
    })
}

fn pair_strategy(max: usize) -> impl Strategy<Value = JointDist> {
    (1..=max, 1..=max).prop_flat_map(|(a, b)| {
        prop::collection::vec(0u8..4, a * b).prop_map(move |w| joint(&[a, b], &w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chain_rule(d in joint_strategy(4, 3)) {
        let k = d.arity();
        let a: Vec<usize> = (0..k).filter(|i| i % 2 == 0).collect();
        let b: Vec<usize> = (0..k).filter(|i| i % 2 == 1).collect();
        prop_assume!(!b.is_empty());
        let all: Vec<usize> = (0..k).collect();
        let lhs = d.entropy(&all).unwrap();
        let rhs = d.entropy(&a).unwrap() + d.cond_entropy(&b, &a).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn mutual_information_identity(d in joint_strategy(3, 3)) {
        prop_assume!(d.arity() >= 2);
        let i = d.mutual_info(&[0], &[1]).unwrap();
        let h = d.entropy(&[0]).unwrap() + d.entropy(&[1]).unwrap() - d.entropy(&[0, 1]).unwrap();
        prop_assert!((i - h.max(0.0)).abs() < 1e-10);
    }

    #[test]
    fn functionals_are_nonnegative(d in joint_strategy(4, 3)) {
        let k = d.arity();
        prop_assume!(k >= 3);
        prop_assert!(d.cond_entropy(&[0], &[1]).unwrap() >= -1e-12);
        prop_assert!(d.mutual_info(&[0], &[1, 2]).unwrap() >= -1e-12);
        prop_assert!(d.cond_mutual_info(&[0], &[1], &[2]).unwrap() >= -1e-12);
    }

    #[test]
    fn join_then_marginal_recovers_input(p in pair_strategy(3), seed in 0u8..255) {
        let (nx, ny) = (p.axes()[0].len(), p.axes()[1].len());
        let z = Alphabet::range("Z", 3);
        let ch = Channel::deterministic(p.axes()[0].clone(), p.axes()[1].clone(), z, |x, y| (x * 7 + y * 3 + seed as usize) % 3).unwrap();
        let back = JointDist::join(&p, &ch).unwrap().marginal(&[0, 1]).unwrap();
        for x in 0..nx {
            for y in 0..ny {
                prop_assert!((back.prob(&[x, y]) - p.prob(&[x, y])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn residual_info_matches_oracle(d in pair_strategy(5)) {
        let a = residual_info(&d).unwrap();
        let b = residual_info_oracle(&d).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn common_part_blocks_respect_support(d in pair_strategy(5)) {
        let cp = common_part(&d).unwrap();
        for (t, p) in d.iter() {
            if p > 0.0 {
                prop_assert_eq!(cp.block_of_u[t[0]], cp.block_of_v[t[1]]);
            }
        }
        prop_assert!(cp.entropy() <= d.mutual_info(&[0], &[1]).unwrap() + 1e-9);
    }

    #[test]
    fn normal_forms_are_idempotent(p in pair_strategy(4), seed in 0usize..50) {
        let (xa, ya) = (p.axes()[0].clone(), p.axes()[1].clone());
        let ch = Channel::deterministic(xa, ya, Alphabet::range("Z", 3), |x, y| (x * seed + y * (seed / 7) + x * y) % 3).unwrap();
        let once = channel_normal_form(&ch);
        prop_assert!(channel_normal_form(&once.reduced).is_identity());
        let nf = pair_normal_form(&p, &ch).unwrap();
        let (q, c) = nf.reduced;
        prop_assert!(pair_normal_form(&q, &c).unwrap().is_identity());
        let s = sampling_normal_form(&JointDist::join(&p, &ch).unwrap()).unwrap();
        prop_assert!(sampling_normal_form(&s.reduced).unwrap().is_identity());
    }
}

#[test]
fn entropy_examples() {
    let u4 = JointDist::uniform(vec![Alphabet::range("U", 4)]);
    assert!((u4.entropy(&[0]).unwrap() - 2.0).abs() < 1e-12);
    let pt = JointDist::point(vec![bit("U")], vec![1]).unwrap();
    assert_eq!(pt.entropy(&[0]).unwrap(), 0.0);
    let b = JointDist::bernoulli("B", 0.11).unwrap();
    assert!((b.entropy(&[0]).unwrap() - 0.499_915_958_164_528).abs() < 1e-9);
    assert!((h2(0.11) - b.entropy(&[0]).unwrap()).abs() < 1e-15);
}

#[test]
fn and_functionals() {
    let ch = Channel::deterministic(bit("X"), bit("Y"), bit("Z"), |x, y| x & y).unwrap();
    let d = JointDist::join(&JointDist::uniform(vec![bit("X"), bit("Y")]), &ch).unwrap();
    assert!((d.cond_entropy(&[1, 2], &[0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((d.mutual_info(&[0], &[2]).unwrap() - 0.311_278_124_459_132_8).abs() < 1e-12);
    assert_eq!(d.support_len(), 4);
}

#[test]
fn product_of_bernoullis() {
    let p = JointDist::bernoulli("X", 0.456).unwrap().product(&JointDist::bernoulli("Y", 0.397).unwrap());
    assert!((p.prob(&[1, 1]) - 0.456 * 0.397).abs() < 1e-15);
    assert!((p.prob(&[0, 1]) - 0.544 * 0.397).abs() < 1e-15);
    assert!(p.is_product(1e-12));
}

#[test]
fn overlapping_axes_are_rejected() {
    let d = JointDist::uniform(vec![bit("A"), bit("B")]);
    assert!(d.cond_entropy(&[0], &[0]).is_err());
    assert!(d.mutual_info(&[0, 1], &[1]).is_err());
    assert!(d.entropy(&[2]).is_err());
}

#[test]
fn iid_copies() {
    let b = JointDist::bernoulli("B", 0.25).unwrap();
    let two = b.iid(2).unwrap();
    assert_eq!(two.axes()[0].symbols(), ["0.0", "0.1", "1.0", "1.1"]);
    assert!((two.entropy(&[0]).unwrap() - 2.0 * h2(0.25)).abs() < 1e-12);
}
