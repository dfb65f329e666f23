//! Correlated multi-secret sharing on the triangle: a dealer who sees all of
//! `(X, Y, Z)` hands out shares `M12`, `M23`, `M31` so that each party
//! recovers its own secret from its two shares and learns nothing more.
//!
//! Share joints use the same six axes as protocol executions (see
//! [`crate::protocol::axis`]), so any secure protocol's transcripts are a
//! valid scheme.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bounds::{best_bounds, cmss_bounds, link_values, Link, Links, OptConfig};
use crate::dist::{Alphabet, Channel, JointDist};
use crate::error::bail;
use crate::protocol::{cutset_checks, info_inequality_checks, privacy_checks, Check, Execution};
use crate::Result;

pub type DealerFn = dyn Fn(usize, usize, usize, usize) -> [usize; 3] + Send + Sync;

/// Dealer map `(x, y, z, r) -> (m12, m23, m31)`.
#[derive(Clone)]
pub enum ShareMap {
    /// Keyed by `[x, y, z, r]`.
    Table(BTreeMap<Vec<usize>, [usize; 3]>),
    Func(Arc<DealerFn>),
}

impl fmt::Debug for ShareMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShareMap::Table(t) => f.debug_tuple("Table").field(&t.len()).finish(),
            ShareMap::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl ShareMap {
    pub fn func(f: impl Fn(usize, usize, usize, usize) -> [usize; 3] + Send + Sync + 'static) -> ShareMap {
        ShareMap::Func(Arc::new(f))
    }

    pub fn eval(&self, x: usize, y: usize, z: usize, r: usize) -> Result<[usize; 3]> {
        match self {
            ShareMap::Func(f) => Ok(f(x, y, z, r)),
            ShareMap::Table(t) => match t.get(&vec![x, y, z, r]) {
                Some(&s) => Ok(s),
                None => bail!(Spec, "no share entry for ({x}, {y}, {z}, {r})"),
            },
        }
    }
}

/// A dealer with uniform randomness over `dealer` symbols.
#[derive(Debug, Clone)]
pub struct CmssSpec {
    pub name: String,
    pub x: Alphabet,
    pub y: Alphabet,
    pub z: Alphabet,
    pub dealer: usize,
    /// Share alphabets of `M12`, `M23`, `M31`.
    pub shares: [Alphabet; 3],
    pub map: ShareMap,
}

impl CmssSpec {
    /// Same scheme with the map written out for every secret triple.
    pub fn tabulate(&self) -> Result<CmssSpec> {
        let mut t = BTreeMap::new();
        for x in 0..self.x.len() {
            for y in 0..self.y.len() {
                for z in 0..self.z.len() {
                    for r in 0..self.dealer {
                        t.insert(vec![x, y, z, r], self.map.eval(x, y, z, r)?);
                    }
                }
            }
        }
        Ok(CmssSpec { map: ShareMap::Table(t), ..self.clone() })
    }
}

/// Joint law of secrets and shares over `(X, Y, Z, M12, M23, M31)`.
pub fn cmss_joint(s: &CmssSpec, p_xyz: &JointDist) -> Result<JointDist> {
    let ax = p_xyz.axes();
    if ax.len() != 3 || !ax[0].same_symbols(&s.x) || !ax[1].same_symbols(&s.y) || !ax[2].same_symbols(&s.z) {
        bail!(Argument, "secret distribution does not match the scheme's alphabets");
    }
    if s.dealer == 0 {
        bail!(Spec, "dealer randomness must be non-empty");
    }
    let w = 1.0 / s.dealer as f64;
    let mut entries = Vec::with_capacity(p_xyz.support_len() * s.dealer);
    for (t, p) in p_xyz.iter() {
        for r in 0..s.dealer {
            let sh = s.map.eval(t[0], t[1], t[2], r)?;
            for (i, (&m, a)) in sh.iter().zip(&s.shares).enumerate() {
                if m >= a.len() {
                    bail!(Spec, "share {i} value {m} outside an alphabet of {} symbols", a.len());
                }
            }
            entries.push((vec![t[0], t[1], t[2], sh[0], sh[1], sh[2]], p * w));
        }
    }
    let mut axes = vec![s.x.clone(), s.y.clone(), s.z.clone()];
    axes.extend(s.shares.iter().cloned());
    JointDist::new(axes, entries)
}

/// The transcripts of a protocol execution, read as shares.
pub fn shares_from_execution(e: &Execution) -> JointDist {
    e.joint.clone()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmssChecks {
    /// `H(X|M12,M31)`, `H(Y|M12,M23)`, `H(Z|M23,M31)`.
    pub correctness: [Check; 3],
    /// Against Alice, Bob, Charlie.
    pub privacy: [Check; 3],
}

impl CmssChecks {
    pub fn all_pass(&self) -> bool {
        self.correctness.iter().chain(&self.privacy).all(|c| c.pass)
    }
}

pub fn verify_cmss(joint: &JointDist) -> Result<CmssChecks> {
    if joint.arity() != 6 {
        bail!(Argument, "a share joint has six axes, got {}", joint.arity());
    }
    Ok(CmssChecks { correctness: cutset_checks(joint), privacy: privacy_checks(joint) })
}

/// `H(M12), H(M23), H(M31)` of a share joint.
pub fn share_entropies(joint: &JointDist) -> Result<Links<f64>> {
    Ok(Links { h12: joint.entropy(&[3])?, h23: joint.entropy(&[4])?, h31: joint.entropy(&[5])? })
}

/// Shares from a random permutation `(α, β, γ)` of `{0,1,2}`: `M12 = α`,
/// `M31` is `α` if `X = 1` and `β` otherwise, `M23` is `α` if `Y = 1` and
/// `γ` otherwise. Each share is a single ternary symbol.
pub fn and_cmss() -> CmssSpec {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let bit = |n| Alphabet::range(n, 2);
    CmssSpec {
        name: String::from("and"),
        x: bit("X"),
        y: bit("Y"),
        z: bit("Z"),
        dealer: 6,
        shares: [Alphabet::range("M12", 3), Alphabet::range("M23", 3), Alphabet::range("M31", 3)],
        map: ShareMap::func(|x, y, _, r| {
            let [a, b, c] = PERMS[r];
            [a, if y == 1 { a } else { c }, if x == 1 { a } else { b }]
        }),
    }
}

/// Protocol lower bounds against what sharing needs for the same secrets.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub protocol_lb: Links<f64>,
    pub cmss_lb: Links<f64>,
    /// Share entropies of a concrete scheme, when one was supplied.
    pub scheme: Option<Links<f64>>,
    /// `protocol_lb` minus the scheme's entropy (or `cmss_lb` without one).
    pub gap: Links<f64>,
}

impl SeparationReport {
    pub fn max_gap(&self) -> (Link, f64) {
        Link::ALL
            .into_iter()
            .map(|l| (l, *self.gap.get(l)))
            .fold((Link::L12, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    }
}

/// Compares protocol lower bounds for `(p_xy, ch)` with sharing the secrets
/// `p_xy p(z|x,y)`. `shares` is an optional verified share joint.
pub fn separation_report(
    p_xy: &JointDist,
    ch: &Channel,
    shares: Option<&JointDist>,
    cfg: &OptConfig,
) -> Result<SeparationReport> {
    let report = best_bounds(p_xy, ch, cfg)?;
    let protocol_lb = report.links.map(|_, b| b.value);
    let p_xyz = JointDist::join(p_xy, ch)?;
    let lb = link_values(&cmss_bounds(&p_xyz, cfg)?);
    let cmss_lb = lb.map(|_, v| v.unwrap_or(0.0));
    let scheme = match shares {
        Some(j) => {
            let checks = verify_cmss(j)?;
            if !checks.all_pass() {
                bail!(Precondition, "the supplied shares are not a valid scheme: {checks:?}");
            }
            Some(share_entropies(j)?)
        }
        None => None,
    };
    let reference = scheme.unwrap_or(cmss_lb);
    let gap = protocol_lb.map(|l, &v| v - reference.get(l));
    Ok(SeparationReport { protocol_lb, cmss_lb, scheme, gap })
}

/// Information-inequality slack of a share joint; negative entries show
/// shares that no protocol with independent inputs could produce.
pub fn protocol_realizability(joint: &JointDist) -> [Check; 3] {
    info_inequality_checks(joint)
}
