use scbound_core::bounds::{best_bounds, Conditions, Link, OptConfig};
use scbound_core::dist::{h2, Alphabet, Channel, JointDist};
use scbound_core::protocol::*;
use scbound_core::Error;

const LOG3: f64 = 1.584_962_500_721_156;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Uniform, skewed product and dependent full-support inputs.
fn input_family(b: &Builtin) -> Vec<(&'static str, JointDist)> {
    let (x, y) = (b.spec.x.clone(), b.spec.y.clone());
    let (nx, ny) = (x.len(), y.len());
    let px: Vec<f64> = (0..nx).map(|i| (i + 1) as f64).collect();
    let py: Vec<f64> = (0..ny).map(|j| ((j + 1) * (j + 1)) as f64).collect();
    let (sx, sy): (f64, f64) = (px.iter().sum(), py.iter().sum());
    let skewed = JointDist::from_probs(x.clone(), &px.iter().map(|v| v / sx).collect::<Vec<_>>())
        .unwrap()
        .product(&JointDist::from_probs(y.clone(), &py.iter().map(|v| v / sy).collect::<Vec<_>>()).unwrap());
    let w: Vec<f64> = (0..nx * ny).map(|i| (1 + (i / ny * 7 + i % ny * 3 + (i / ny) * (i % ny)) % 5) as f64).collect();
    let sw: f64 = w.iter().sum();
    let dependent = JointDist::from_dense(vec![x.clone(), y.clone()], &w.iter().map(|v| v / sw).collect::<Vec<_>>()).unwrap();
    assert!(!dependent.is_product(1e-9));
    vec![("uniform", JointDist::uniform(vec![x, y])), ("skewed", skewed), ("dependent", dependent)]
}

fn all_builtins() -> Vec<Builtin> {
    vec![
        group_add(2, 1).unwrap(),
        group_add(3, 1).unwrap(),
        sum(1).unwrap(),
        controlled_erasure(0.5, 0.5, 1).unwrap(),
        controlled_erasure(0.3, 0.8, 1).unwrap(),
        remote_ot(2, 1).unwrap(),
        remote_ot(3, 1).unwrap(),
        and(1).unwrap(),
        and(2).unwrap(),
    ]
}

#[test]
fn builtins_are_secure_on_every_input_family() {
    for b in all_builtins() {
        for (label, p) in input_family(&b) {
            let e = run_exact(&b.spec, &p).unwrap();
            let r = verify_all(&e, &b.channel).unwrap();
            assert!(r.normal_form, "{} {label}", b.spec.name);
            assert!(r.all_pass(), "{} {label}: {:?}", b.spec.name, r.named());
            assert_eq!(r.info_inequality.is_some(), label != "dependent");
            if label == "dependent" {
                assert!(matches!(verify_info_inequality(&e), Err(Error::Precondition(_))));
            }
        }
    }
}

#[test]
fn execution_marginal_is_the_input() {
    let b = remote_ot(2, 1).unwrap();
    for (_, p) in input_family(&b) {
        let e = run_exact(&b.spec, &p).unwrap();
        let total: f64 = e.joint.iter().map(|(_, q)| q).sum();
        assert!(close(total, 1.0, 1e-12));
        let back = e.input();
        for (t, q) in p.iter() {
            assert!(close(back.prob(t), q, 1e-12));
        }
    }
}

#[test]
fn transcript_entropies() {
    let ent = |b: Builtin| run_exact(&b.spec, &b.inputs).unwrap().entropies();
    let h = ent(and(1).unwrap());
    assert!(close(h.h31, LOG3, 1e-12) && close(h.h23, LOG3, 1e-12) && close(h.h12, 1.0 + LOG3, 1e-12));
    let h = ent(group_add(2, 1).unwrap());
    assert!(close(h.h12, 1.0, 1e-12) && close(h.h23, 1.0, 1e-12) && close(h.h31, 1.0, 1e-12));
    let h = ent(remote_ot(2, 1).unwrap());
    assert!(close(h.h31, 2.0, 1e-12) && close(h.h23, 2.0, 1e-12) && close(h.h12, 3.0, 1e-12));
    let h = ent(remote_ot(3, 1).unwrap());
    assert!(close(h.h31, 3.0, 1e-9) && close(h.h23, 1.0 + LOG3, 1e-9) && close(h.h12, 3.0 + LOG3, 1e-9));
    let h = ent(controlled_erasure(0.5, 0.5, 1).unwrap());
    assert!(close(h.h31, 1.5, 1e-12) && close(h.h12, 1.0, 1e-12) && close(h.h23, 1.0, 1e-12));
}

#[test]
fn randomness_of_and_is_one_plus_log3() {
    let b = and(1).unwrap();
    let e = run_exact(&b.spec, &b.inputs).unwrap();
    assert!(close(e.randomness(), 1.0 + LOG3, 1e-12));
    let rep = best_bounds(&b.inputs, &b.channel, &OptConfig::default()).unwrap();
    assert!(e.randomness() >= rep.rho - 1e-9);
}

#[test]
fn expected_lengths() {
    let b = group_add(2, 1).unwrap();
    let l = run_exact(&b.spec, &b.inputs).unwrap().expected_lengths();
    assert!(close(l.h12, 1.0, 1e-12) && close(l.h23, 1.0, 1e-12) && close(l.h31, 1.0, 1e-12));

    let b = and(1).unwrap();
    let e = run_exact(&b.spec, &b.inputs).unwrap();
    let l = e.expected_lengths();
    assert!(close(l.h31, 5.0 / 3.0, 1e-12));
    assert!(l.h31 >= LOG3 && l.h31 < LOG3 + 1.0);

    for (p, q) in [(0.5, 0.5), (0.2, 0.7), (0.9, 0.1)] {
        let b = controlled_erasure(p, q, 1).unwrap();
        let e = run_exact(&b.spec, &b.inputs).unwrap();
        let l = e.expected_lengths();
        assert!(l.h31 < h2(p) + 1.0 + p, "p = {p}: {}", l.h31);
        assert!(close(l.h12, 1.0, 1e-12) && close(l.h23, 1.0, 1e-12));
    }
}

#[test]
fn erasure_leaks_x_on_link_31() {
    let b = controlled_erasure(0.5, 0.5, 1).unwrap();
    let e = run_exact(&b.spec, &b.inputs).unwrap();
    let c = Conditions::of(&b.inputs, &b.channel).unwrap();
    assert!(!c.condition1 && c.condition2);
    let checks = verify_transcript_independence(&e, &c);
    assert!(checks.iter().all(|c| c.name != "I(X,Y,Z;M31)"));
    assert!(e.joint.mutual_info(&[axis::X], &[axis::M31]).unwrap() > 0.5);
}

#[test]
fn corrupted_and_fails_correctness() {
    let mut b = and(1).unwrap();
    b.spec.output = MessageMap::func(|v| usize::from(v.history[0] != v.history[1]));
    let e = run_exact(&b.spec, &b.inputs).unwrap();
    let c = verify_correctness(&e, &b.channel);
    assert!(!c.pass && close(c.value, 1.0, 1e-12));
}

#[test]
fn sending_x_to_bob_breaks_privacy_against_bob() {
    let mut b = and(1).unwrap();
    b.spec.rounds.push(Round::new(Party::Alice, Party::Bob, Alphabet::range("leak", 2), MessageMap::func(|v| v.input.unwrap())));
    let e = run_exact(&b.spec, &b.inputs).unwrap();
    let p = verify_privacy(&e);
    assert!(p[0].pass && !p[1].pass && p[2].pass);
    assert!(!verify_all(&e, &b.channel).unwrap().all_pass());
}

#[test]
fn empty_protocol_for_a_constant_channel() {
    let (x, y, z) = (Alphabet::range("X", 2), Alphabet::range("Y", 3), Alphabet::range("Z", 1));
    let spec = ProtocolSpec {
        name: "constant".into(),
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        randomness: [1, 1, 1],
        rounds: vec![],
        output: MessageMap::func(|_| 0),
        designed_for: None,
    };
    let ch = Channel::deterministic(x.clone(), y.clone(), z, |_, _| 0).unwrap();
    let e = run_exact(&spec, &JointDist::uniform(vec![x, y])).unwrap();
    assert!(verify_correctness(&e, &ch).pass);
    assert!(verify_privacy(&e).iter().all(|c| c.pass));
    assert!(verify_info_inequality(&e).unwrap().iter().all(|c| c.pass && c.value.abs() < 1e-12));
    let r = verify_all(&e, &ch).unwrap();
    assert!(!r.normal_form && r.all_pass(), "{r:?}");
    assert_eq!(e.joint.axes()[axis::M12].symbols(), ["-"]);
}

#[test]
fn duplicated_input_symbol_fails_cutset() {
    // x = 2 behaves like x = 0
    let b = group_add(2, 1).unwrap();
    let x = Alphabet::range("X", 3);
    let mut spec = b.spec.clone();
    spec.x = x.clone();
    spec.rounds[2].map = MessageMap::func(|v| (v.input.unwrap() % 2 + v.history[0]) % 2);
    let ch = Channel::deterministic(x.clone(), b.spec.y.clone(), b.spec.z.clone(), |a, c| (a % 2 + c) % 2).unwrap();
    let e = run_exact(&spec, &JointDist::uniform(vec![x, b.spec.y.clone()])).unwrap();
    let cut = verify_cutset(&e);
    assert!(!cut[0].pass && cut[1].pass && cut[2].pass);
    let r = verify_all(&e, &ch).unwrap();
    assert!(!r.normal_form && r.all_pass());
}

#[test]
fn spec_errors() {
    let mut b = and(1).unwrap();
    b.spec.rounds[1].map = MessageMap::func(|_| 7);
    assert!(matches!(run_exact(&b.spec, &b.inputs), Err(Error::Spec(_))));
    let b = and(1).unwrap();
    assert!(matches!(run_exact_capped(&b.spec, &b.inputs, 10), Err(Error::Capacity(_))));
    let mut b = and(1).unwrap();
    b.spec.rounds[0].receiver = Party::Alice;
    assert!(matches!(run_exact(&b.spec, &b.inputs), Err(Error::Spec(_))));
    let b = and(1).unwrap();
    let wrong = JointDist::uniform(vec![Alphabet::range("X", 3), Alphabet::range("Y", 2)]);
    assert!(matches!(run_exact(&b.spec, &wrong), Err(Error::Argument(_))));
}

#[test]
fn tabulated_spec_runs_identically() {
    for b in [and(1).unwrap(), remote_ot(2, 1).unwrap(), controlled_erasure(0.3, 0.6, 1).unwrap()] {
        let t = b.spec.tabulate().unwrap();
        assert!(t.rounds.iter().all(|r| matches!(r.map, MessageMap::Table(_))));
        let a = run_exact(&b.spec, &b.inputs).unwrap();
        let c = run_exact(&t, &b.inputs).unwrap();
        assert_eq!(a, c);
    }
    let mut t = and(1).unwrap().spec.tabulate().unwrap();
    if let MessageMap::Table(m) = &mut t.rounds[2].map {
        let k = m.keys().next().unwrap().clone();
        m.remove(&k);
    }
    assert!(matches!(run_exact(&t, &and(1).unwrap().inputs), Err(Error::Spec(_))));
}

#[test]
fn block_protocols_scale_entropies() {
    let one = and(1).unwrap();
    let two = and(2).unwrap();
    let h1 = run_exact(&one.spec, &one.inputs).unwrap().entropies();
    let h2 = run_exact(&two.spec, &two.inputs).unwrap().entropies();
    for l in Link::ALL {
        assert!(close(*h2.get(l), 2.0 * h1.get(l), 1e-9));
    }
    let b = group_add(3, 2).unwrap();
    let h = run_exact(&b.spec, &b.inputs).unwrap().entropies();
    assert!(close(h.h12, 2.0 * LOG3, 1e-9));
}

#[test]
fn entropies_do_not_depend_on_full_support_inputs() {
    // links gated by the reachable-output conditions keep their law under any full-support input
    for b in [and(1).unwrap(), sum(1).unwrap(), remote_ot(2, 1).unwrap(), controlled_erasure(0.5, 0.5, 1).unwrap()] {
        let c = Conditions::of(&b.inputs, &b.channel).unwrap();
        let fam = input_family(&b);
        let base = run_exact(&b.spec, &fam[0].1).unwrap().entropies();
        for (_, p) in &fam[1..] {
            let h = run_exact(&b.spec, p).unwrap().entropies();
            assert!(close(h.h12, base.h12, 1e-9));
            if c.condition1 {
                assert!(close(h.h31, base.h31, 1e-9));
            }
            if c.condition2 {
                assert!(close(h.h23, base.h23, 1e-9));
            }
        }
    }
}

#[test]
fn simulated_entropies_respect_the_bounds() {
    let cfg = OptConfig::default();
    for b in all_builtins().into_iter().filter(|b| b.spec.x.len() <= 8) {
        let e = run_exact(&b.spec, &b.inputs).unwrap();
        let h = e.entropies();
        let rep = best_bounds(&b.inputs, &b.channel, &cfg).unwrap();
        for l in Link::ALL {
            assert!(*h.get(l) >= rep.value(l) - 1e-6, "{} {l:?}: {} < {}", b.spec.name, h.get(l), rep.value(l));
        }
        assert!(e.randomness() >= rep.rho - 1e-6);
        let ideal = b.spec.name.starts_with("group-add")
            || b.spec.name.starts_with("remote-ot")
            || b.spec.name.starts_with("controlled-erasure");
        if ideal {
            for l in Link::ALL {
                assert!(close(*h.get(l), rep.value(l), 1e-6), "{} {l:?}", b.spec.name);
            }
        }
    }
}

#[test]
fn builtin_lookup() {
    let p = BuiltinParams { order: 6, ..BuiltinParams::default() };
    assert_eq!(builtin("group-add", &p).unwrap().spec.x.len(), 6);
    assert_eq!(builtin("and", &p).unwrap().spec.randomness, [6, 1, 1]);
    assert_eq!(builtin("remote-ot", &p).unwrap().spec.randomness, [8, 1, 1]);
    assert_eq!(builtin("controlled-erasure", &p).unwrap().spec.z.symbols(), ["e", "0", "1"]);
}
