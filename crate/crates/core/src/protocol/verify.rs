use alloc::vec::Vec;

use super::axis::{M12, M23, M31, X, Y, Z};
use super::Execution;
use crate::bounds::{Conditions, Links, PRODUCT_TOL};
use crate::dist::{Channel, JointDist};
use crate::error::bail;
use crate::normal_form::pair_normal_form;
use crate::Result;

/// Tolerance of every security check.
pub const CHECK_TOL: f64 = 1e-9;

/// A measured quantity and whether it meets its requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub value: f64,
    pub pass: bool,
}

impl Check {
    fn zero(value: f64) -> Check {
        Check { value, pass: value.abs() <= CHECK_TOL }
    }

    fn nonneg(value: f64) -> Check {
        Check { value, pass: value >= -CHECK_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedCheck {
    pub name: &'static str,
    pub check: Check,
}

fn ent(j: &JointDist, t: &[usize], g: &[usize]) -> f64 {
    j.cond_entropy(t, g).expect("execution joint axes")
}

fn cmi(j: &JointDist, a: &[usize], b: &[usize], g: &[usize]) -> f64 {
    j.cond_mutual_info(a, b, g).expect("execution joint axes")
}

/// Largest deviation of `p(z|x,y)` from the channel over the input support.
pub fn verify_correctness(e: &Execution, ch: &Channel) -> Check {
    let ax = e.joint.axes();
    if !ax[X].same_symbols(ch.x()) || !ax[Y].same_symbols(ch.y()) || !ax[Z].same_symbols(ch.z()) {
        return Check { value: f64::INFINITY, pass: false };
    }
    let xyz = e.joint.marginal(&[X, Y, Z]).expect("execution joint axes");
    let xy = e.input();
    let mut worst: f64 = 0.0;
    for (t, pxy) in xy.iter() {
        for (z, &w) in ch.row(t[0], t[1]).iter().enumerate() {
            let got = xyz.prob(&[t[0], t[1], z]) / pxy;
            worst = worst.max((got - w).abs());
        }
    }
    Check::zero(worst)
}

/// Privacy against Alice, Bob and Charlie: `I(M12,M31; Y,Z | X)`,
/// `I(M12,M23; X,Z | Y)`, `I(M23,M31; X,Y | Z)`.
pub fn privacy_checks(joint: &JointDist) -> [Check; 3] {
    [
        Check::zero(cmi(joint, &[M12, M31], &[Y, Z], &[X])),
        Check::zero(cmi(joint, &[M12, M23], &[X, Z], &[Y])),
        Check::zero(cmi(joint, &[M23, M31], &[X, Y], &[Z])),
    ]
}

pub fn verify_privacy(e: &Execution) -> [Check; 3] {
    privacy_checks(&e.joint)
}

/// Each party's two links determine its variable: `H(X|M12,M31)`,
/// `H(Y|M12,M23)`, `H(Z|M23,M31)`.
pub fn cutset_checks(joint: &JointDist) -> [Check; 3] {
    [
        Check::zero(ent(joint, &[X], &[M12, M31])),
        Check::zero(ent(joint, &[Y], &[M12, M23])),
        Check::zero(ent(joint, &[Z], &[M23, M31])),
    ]
}

pub fn verify_cutset(e: &Execution) -> [Check; 3] {
    cutset_checks(&e.joint)
}

/// `I(Mγα; Mβγ) - I(Mγα; Mβγ | Mαβ)` for `(α,β,γ) = (1,2,3), (2,3,1),
/// (3,1,2)`, required non-negative. Not restricted to protocol joints.
pub fn info_inequality_checks(joint: &JointDist) -> [Check; 3] {
    let rot = |ga: usize, bg: usize, ab: usize| {
        Check::nonneg(cmi(joint, &[ga], &[bg], &[]) - cmi(joint, &[ga], &[bg], &[ab]))
    };
    [rot(M31, M23, M12), rot(M12, M31, M23), rot(M23, M12, M31)]
}

/// The information inequality holds for protocols with independent inputs.
pub fn verify_info_inequality(e: &Execution) -> Result<[Check; 3]> {
    if !e.input().is_product(PRODUCT_TOL) {
        bail!(Precondition, "the information inequality needs independent inputs");
    }
    Ok(info_inequality_checks(&e.joint))
}

/// Transcripts that must be independent of all inputs and outputs: `M12`
/// when the input bigraph is connected, `M31` / `M23` under full support and
/// Condition 1 / 2, and for independent inputs `I(X;M23) = I(Y;M31) = 0`.
pub fn verify_transcript_independence(e: &Execution, c: &Conditions) -> Vec<NamedCheck> {
    let j = &e.joint;
    let mut out = Vec::new();
    let mut push = |name, v| out.push(NamedCheck { name, check: Check::zero(v) });
    if c.bigraph_connected {
        push("I(X,Y,Z;M12)", cmi(j, &[X, Y, Z], &[M12], &[]));
    }
    if c.full_support && c.condition1 {
        push("I(X,Y,Z;M31)", cmi(j, &[X, Y, Z], &[M31], &[]));
    }
    if c.full_support && c.condition2 {
        push("I(X,Y,Z;M23)", cmi(j, &[X, Y, Z], &[M23], &[]));
    }
    if c.product_inputs {
        push("I(X;M23)", cmi(j, &[X], &[M23], &[]));
        push("I(Y;M31)", cmi(j, &[Y], &[M31], &[]));
    }
    out
}

/// Every check that applies to an execution of a protocol for `ch`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub correctness: Check,
    pub privacy: [Check; 3],
    pub cutset: [Check; 3],
    /// Whether the input pair is already in normal form; the cut-set checks
    /// only bind then.
    pub normal_form: bool,
    pub info_inequality: Option<[Check; 3]>,
    pub independence: Vec<NamedCheck>,
    pub entropies: Links<f64>,
    pub expected_lengths: Links<f64>,
    /// `E[L_ij] >= H(M_ij)`.
    pub lengths: [Check; 3],
    pub randomness: f64,
}

impl SecurityReport {
    pub fn all_pass(&self) -> bool {
        self.correctness.pass
            && self.privacy.iter().all(|c| c.pass)
            && (!self.normal_form || self.cutset.iter().all(|c| c.pass))
            && self.info_inequality.is_none_or(|r| r.iter().all(|c| c.pass))
            && self.independence.iter().all(|c| c.check.pass)
            && self.lengths.iter().all(|c| c.pass)
    }

    /// `(name, check)` for every entry, in a fixed order.
    pub fn named(&self) -> Vec<(alloc::string::String, Check)> {
        use alloc::format;
        let mut v = Vec::new();
        v.push(("correctness".into(), self.correctness));
        for (p, c) in ["alice", "bob", "charlie"].iter().zip(self.privacy) {
            v.push((format!("privacy against {p}"), c));
        }
        for (p, c) in ["H(X|M12,M31)", "H(Y|M12,M23)", "H(Z|M23,M31)"].iter().zip(self.cutset) {
            v.push((format!("cut-set {p}"), c));
        }
        if let Some(r) = self.info_inequality {
            for (p, c) in ["M31;M23|M12", "M12;M31|M23", "M23;M12|M31"].iter().zip(r) {
                v.push((format!("information inequality {p}"), c));
            }
        }
        for c in &self.independence {
            v.push((format!("independence {}", c.name), c.check));
        }
        for (p, c) in ["M12", "M23", "M31"].iter().zip(self.lengths) {
            v.push((format!("E[L] >= H({p})"), c));
        }
        v
    }
}

/// Runs every applicable check on an execution of a protocol for `ch`.
pub fn verify_all(e: &Execution, ch: &Channel) -> Result<SecurityReport> {
    let input = e.input();
    let conditions = Conditions::of(&input, ch)?;
    let normal_form = pair_normal_form(&input, ch)?.is_identity();
    let entropies = e.entropies();
    let expected_lengths = e.expected_lengths();
    let lengths = [
        Check::nonneg(expected_lengths.h12 - entropies.h12),
        Check::nonneg(expected_lengths.h23 - entropies.h23),
        Check::nonneg(expected_lengths.h31 - entropies.h31),
    ];
    Ok(SecurityReport {
        correctness: verify_correctness(e, ch),
        privacy: verify_privacy(e),
        cutset: verify_cutset(e),
        normal_form,
        info_inequality: if conditions.product_inputs { Some(info_inequality_checks(&e.joint)) } else { None },
        independence: verify_transcript_independence(e, &conditions),
        entropies,
        expected_lengths,
        lengths,
        randomness: e.randomness(),
    })
}
