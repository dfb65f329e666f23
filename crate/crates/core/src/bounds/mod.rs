//! Lower bounds on the transcript entropies `H(M12)`, `H(M23)`, `H(M31)` and
//! on the randomness `ρ` of any secure protocol, plus the analogous bounds for
//! secure sampling and CMSS shares.
//!
//! Bounds come in families:
//!
//! * [`Family::Cutset`]: residual information plus a conditional entropy, at
//!   the given input distribution.
//! * [`Family::JointSwitching`]: the same expressions maximized over a switched
//!   joint input distribution `p_{X'Y'}`.
//! * [`Family::Interactive`]: both residual informations added, for
//!   independent inputs.
//! * [`Family::SplitSwitching`]: each term maximized over its own input
//!   distribution.
//! * [`Family::ConditionalSwitching`]: as above, sharing one switched input
//!   across both terms, valid when the channel connects its inputs.

mod model;
pub mod optimize;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

pub use optimize::{optimize_over_simplex, OptConfig, OptResult, LIMIT_EPS};

use crate::common_info::residual_info_between;
use crate::dist::{Channel, JointDist};
use crate::error::bail;
use crate::normal_form::{
    bigraph_connected, channel_normal_form, check_condition1, check_condition2, pair_normal_form,
    sampling_normal_form,
};
use crate::Result;
use model::{Model, Stats};

/// Product inputs are detected with this tolerance.
pub const PRODUCT_TOL: f64 = 1e-12;

/// A later term replaces the current winner only if larger by this much.
const TIE_EPS: f64 = 1e-12;

/// One of the three pairwise links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    /// Alice-Bob.
    L12,
    /// Bob-Charlie.
    L23,
    /// Charlie-Alice.
    L31,
}

impl Link {
    pub const ALL: [Link; 3] = [Link::L12, Link::L23, Link::L31];

    pub fn name(self) -> &'static str {
        match self {
            Link::L12 => "M12",
            Link::L23 => "M23",
            Link::L31 => "M31",
        }
    }
}

/// Per-link values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Links<T> {
    pub h12: T,
    pub h23: T,
    pub h31: T,
}

impl<T> Links<T> {
    pub fn get(&self, l: Link) -> &T {
        match l {
            Link::L12 => &self.h12,
            Link::L23 => &self.h23,
            Link::L31 => &self.h31,
        }
    }

    pub fn get_mut(&mut self, l: Link) -> &mut T {
        match l {
            Link::L12 => &mut self.h12,
            Link::L23 => &mut self.h23,
            Link::L31 => &mut self.h31,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Link, &T) -> U) -> Links<U> {
        Links { h12: f(Link::L12, &self.h12), h23: f(Link::L23, &self.h23), h31: f(Link::L31, &self.h31) }
    }
}

/// Bound family a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Cutset,
    JointSwitching,
    Interactive,
    SplitSwitching,
    ConditionalSwitching,
    Sampling,
    CmssCutset,
    CmssSwitching,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cutset => "Cutset",
            Family::JointSwitching => "JointSwitching",
            Family::Interactive => "Interactive",
            Family::SplitSwitching => "SplitSwitching",
            Family::ConditionalSwitching => "ConditionalSwitching",
            Family::Sampling => "Sampling",
            Family::CmssCutset => "CmssCutset",
            Family::CmssSwitching => "CmssSwitching",
        }
    }

    /// True for families whose value does not depend on the input
    /// distribution.
    pub fn distribution_free(self) -> bool {
        matches!(self, Family::JointSwitching | Family::ConditionalSwitching)
    }
}

/// Which residual information a switched term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ri {
    XZ,
    YZ,
    XY,
}

impl Ri {
    fn of(self, s: &Stats) -> f64 {
        match self {
            Ri::XZ => s.ri_xz(),
            Ri::YZ => s.ri_yz(),
            Ri::XY => s.ri_xy(),
        }
    }

    fn primed(self, tag: &str) -> String {
        match self {
            Ri::XZ => format!("RI(X{tag};Z{tag})"),
            Ri::YZ => format!("RI(Y{tag};Z{tag})"),
            Ri::XY => format!("RI(X{tag};Y{tag})"),
        }
    }
}

/// Exactly which expression a term evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    Cutset(Link),
    JointSwitching { link: Link, ri: Ri },
    Interactive(Link),
    /// Links 23 and 31: separate suprema with the other party's marginal.
    SplitMarginal(Link),
    /// Link 12: outer supremum over `X'` (`outer_x`) or over `Y'`.
    SplitNested { outer_x: bool },
    /// Links 31 (outer `X'`) and 23 (outer `Y'`).
    Conditional(Link),
    Sampling(Link),
    CmssCutset(Link),
    CmssSwitching { link: Link, ri: Ri },
}

fn cond_entropy_label(link: Link, tag: &str) -> String {
    match link {
        Link::L12 => format!("H(X{tag},Y{tag}|Z{tag})"),
        Link::L23 => format!("H(Y{tag},Z{tag}|X{tag})"),
        Link::L31 => format!("H(X{tag},Z{tag}|Y{tag})"),
    }
}

fn cond_entropy_of(link: Link, s: &Stats) -> f64 {
    match link {
        Link::L12 => s.h_xy_given_z(),
        Link::L23 => s.h_yz_given_x(),
        Link::L31 => s.h_xz_given_y(),
    }
}

fn cutset_ris(link: Link) -> [Ri; 2] {
    match link {
        Link::L12 => [Ri::XZ, Ri::YZ],
        Link::L23 => [Ri::XZ, Ri::XY],
        Link::L31 => [Ri::YZ, Ri::XY],
    }
}

impl TermKind {
    pub fn link(&self) -> Link {
        match *self {
            TermKind::Cutset(l)
            | TermKind::Interactive(l)
            | TermKind::SplitMarginal(l)
            | TermKind::Conditional(l)
            | TermKind::Sampling(l)
            | TermKind::CmssCutset(l) => l,
            TermKind::JointSwitching { link, .. } | TermKind::CmssSwitching { link, .. } => link,
            TermKind::SplitNested { .. } => Link::L12,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            TermKind::Cutset(_) => Family::Cutset,
            TermKind::JointSwitching { .. } => Family::JointSwitching,
            TermKind::Interactive(_) => Family::Interactive,
            TermKind::SplitMarginal(_) | TermKind::SplitNested { .. } => Family::SplitSwitching,
            TermKind::Conditional(_) => Family::ConditionalSwitching,
            TermKind::Sampling(_) => Family::Sampling,
            TermKind::CmssCutset(_) => Family::CmssCutset,
            TermKind::CmssSwitching { .. } => Family::CmssSwitching,
        }
    }

    /// Human-readable formula.
    pub fn expression(&self) -> String {
        match *self {
            TermKind::Cutset(l) | TermKind::CmssCutset(l) => {
                let [a, b] = cutset_ris(l);
                format!("max{{{}, {}}} + {}", a.primed(""), b.primed(""), cond_entropy_label(l, ""))
            }
            TermKind::JointSwitching { link, ri } => {
                format!("sup_{{X'Y'}} [{} + {}]", ri.primed("'"), cond_entropy_label(link, "'"))
            }
            TermKind::CmssSwitching { link, ri } => {
                format!("sup_{{X'Y'Z'}} [{} + {}]", ri.primed("'"), cond_entropy_label(link, "'"))
            }
            TermKind::Interactive(Link::L12) => "RI(X;Z) + RI(Y;Z) + H(X,Y|Z)".into(),
            TermKind::Interactive(Link::L23) => "RI(X;Z) + H(Y,Z|X)".into(),
            TermKind::Interactive(Link::L31) => "RI(Y;Z) + H(X,Z|Y)".into(),
            TermKind::Sampling(Link::L12) => "RI(X;Z) + RI(Y;Z) + H(X,Y|Z)".into(),
            TermKind::Sampling(Link::L23) => "RI(X;Z) + RI(X;Y) + H(Y,Z|X)".into(),
            TermKind::Sampling(Link::L31) => "RI(Y;Z) + RI(X;Y) + H(X,Z|Y)".into(),
            TermKind::SplitMarginal(Link::L31) => "sup_{Y'} RI(Y';Z') + sup_{Y''} H(X,Z''|Y'')".into(),
            TermKind::SplitMarginal(_) => "sup_{X'} RI(X';Z') + sup_{X''} H(Y,Z''|X'')".into(),
            TermKind::SplitNested { outer_x: true } => {
                "sup_{X'} [sup_{Y'} RI(Y';Z') + sup_{Y''} (RI(X';Z'') + H(X',Y''|Z''))]".into()
            }
            TermKind::SplitNested { outer_x: false } => {
                "sup_{Y'} [sup_{X'} RI(X';Z') + sup_{X''} (RI(Y';Z'') + H(X'',Y'|Z''))]".into()
            }
            TermKind::Conditional(Link::L31) => "sup_{X'} [sup_{Y'} RI(Y';Z') + sup_{Y''} H(X',Z''|Y'')]".into(),
            TermKind::Conditional(_) => "sup_{Y'} [sup_{X'} RI(X';Z') + sup_{X''} H(Y',Z''|X'')]".into(),
        }
    }
}

/// A distribution attaining (part of) a term.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Which variable: `X'`, `Y''`, `X'Y'` (row-major over `X × Y`), or
    /// `X'Y'Z'` (over the support points of the shared joint).
    pub label: String,
    pub probs: Vec<f64>,
    /// Some coordinate is (numerically) zero: the value is approached by
    /// full-support distributions but not attained by one.
    pub limit_point: bool,
}

impl Witness {
    fn new(label: &str, probs: Vec<f64>) -> Self {
        let limit_point = probs.iter().any(|&p| p < LIMIT_EPS);
        Witness { label: label.to_string(), probs, limit_point }
    }
}

/// One evaluated bound expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub value: f64,
    pub witnesses: Vec<Witness>,
}

impl Term {
    fn plain(kind: TermKind, value: f64) -> Self {
        Term { kind, value, witnesses: Vec::new() }
    }

    pub fn link(&self) -> Link {
        self.kind.link()
    }

    pub fn family(&self) -> Family {
        self.kind.family()
    }

    pub fn expression(&self) -> String {
        self.kind.expression()
    }

    pub fn witness(&self, label: &str) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.label == label)
    }

    pub fn is_limit_point(&self) -> bool {
        self.witnesses.iter().any(|w| w.limit_point)
    }
}

/// Largest term per link; earlier terms win ties.
pub fn best_term(terms: &[Term], link: Link) -> Option<&Term> {
    let mut best: Option<&Term> = None;
    for t in terms.iter().filter(|t| t.link() == link) {
        if best.is_none_or(|b| t.value > b.value + TIE_EPS) {
            best = Some(t);
        }
    }
    best
}

/// Per-link maxima of a list of terms.
pub fn link_values(terms: &[Term]) -> Links<Option<f64>> {
    Links::default().map(|l, _: &()| best_term(terms, l).map(|t| t.value))
}

// ---------------------------------------------------------------------------
// exact evaluation at a given distribution

struct Exact {
    ri_xz: f64,
    ri_yz: f64,
    ri_xy: f64,
    h_xy_z: f64,
    h_yz_x: f64,
    h_xz_y: f64,
}

impl Exact {
    fn of(d: &JointDist) -> Result<Exact> {
        Ok(Exact {
            ri_xz: residual_info_between(d, &[0], &[2])?,
            ri_yz: residual_info_between(d, &[1], &[2])?,
            ri_xy: residual_info_between(d, &[0], &[1])?,
            h_xy_z: d.cond_entropy(&[0, 1], &[2])?,
            h_yz_x: d.cond_entropy(&[1, 2], &[0])?,
            h_xz_y: d.cond_entropy(&[0, 2], &[1])?,
        })
    }

    fn ri(&self, r: Ri) -> f64 {
        match r {
            Ri::XZ => self.ri_xz,
            Ri::YZ => self.ri_yz,
            Ri::XY => self.ri_xy,
        }
    }

    fn cond(&self, l: Link) -> f64 {
        match l {
            Link::L12 => self.h_xy_z,
            Link::L23 => self.h_yz_x,
            Link::L31 => self.h_xz_y,
        }
    }

    fn cutset(&self, l: Link) -> f64 {
        let [a, b] = cutset_ris(l);
        self.ri(a).max(self.ri(b)) + self.cond(l)
    }

    fn interactive(&self, l: Link) -> f64 {
        match l {
            Link::L12 => self.ri_xz + self.ri_yz + self.h_xy_z,
            Link::L23 => self.ri_xz + self.h_yz_x,
            Link::L31 => self.ri_yz + self.h_xz_y,
        }
    }

    fn sampling(&self, l: Link) -> f64 {
        let [a, b] = cutset_ris(l);
        self.ri(a) + self.ri(b) + self.cond(l)
    }
}

fn require_three_axes(d: &JointDist) -> Result<()> {
    if d.arity() != 3 {
        bail!(Argument, "expected a joint over (X, Y, Z), got {} axes", d.arity());
    }
    Ok(())
}

fn require_channel_normal(ch: &Channel) -> Result<()> {
    if !channel_normal_form(ch).is_identity() {
        bail!(Precondition, "channel is not in normal form");
    }
    Ok(())
}

fn require_marginal(p: &JointDist, len: usize, who: &str) -> Result<Vec<f64>> {
    if p.arity() != 1 || p.axes()[0].len() != len {
        bail!(Argument, "{who} must be a one-axis distribution over {len} symbols");
    }
    let v = p.marginal_probs(0);
    if !p.is_full_support() {
        bail!(Precondition, "{who} must have full support");
    }
    Ok(v)
}

fn cutset_terms(p_xy: &JointDist, ch: &Channel) -> Result<Vec<Term>> {
    let e = Exact::of(&JointDist::join(p_xy, ch)?)?;
    Ok(Link::ALL.iter().map(|&l| Term::plain(TermKind::Cutset(l), e.cutset(l))).collect())
}

/// Cut-set bounds at the given input distribution. The pair must already be
/// in pair normal form.
pub fn prelim_bounds(p_xy: &JointDist, ch: &Channel) -> Result<Links<f64>> {
    if !pair_normal_form(p_xy, ch)?.is_identity() {
        bail!(Precondition, "input distribution and channel are not in pair normal form");
    }
    let t = cutset_terms(p_xy, ch)?;
    Ok(link_values(&t).map(|_, v| v.unwrap_or(0.0)))
}

// ---------------------------------------------------------------------------
// switched bounds

fn joint_switching_terms(m: &Model, cfg: &OptConfig, c1: bool, c2: bool) -> Vec<Term> {
    let mut kinds: Vec<(Link, Ri)> = vec![(Link::L12, Ri::XZ), (Link::L12, Ri::YZ)];
    if c1 {
        kinds.extend([(Link::L31, Ri::YZ), (Link::L31, Ri::XY)]);
    }
    if c2 {
        kinds.extend([(Link::L23, Ri::XZ), (Link::L23, Ri::XY)]);
    }
    kinds
        .into_iter()
        .map(|(link, ri)| {
            let r = optimize_over_simplex(|q| ri.of(&m.stats(q)) + cond_entropy_of(link, &m.stats(q)), &[m.nvars], cfg);
            Term {
                kind: TermKind::JointSwitching { link, ri },
                value: r.value,
                witnesses: vec![Witness::new("X'Y'", r.args[0].clone())],
            }
        })
        .collect()
}

/// Switched bounds over a joint input `p_{X'Y'}` with full support. Link 12 is
/// always bounded; link 31 needs Condition 1 and link 23 Condition 2.
pub fn improved_bounds(ch: &Channel, cfg: &OptConfig) -> Result<Vec<Term>> {
    cfg.validate()?;
    require_channel_normal(ch)?;
    let m = Model::from_channel(ch);
    Ok(joint_switching_terms(&m, cfg, check_condition1(ch), check_condition2(ch)))
}

/// The interactive bounds at independent full-support inputs.
pub fn intermediate_bounds(p_x: &JointDist, p_y: &JointDist, ch: &Channel) -> Result<Vec<Term>> {
    require_channel_normal(ch)?;
    require_marginal(p_x, ch.x().len(), "p_x")?;
    require_marginal(p_y, ch.y().len(), "p_y")?;
    let p = JointDist::new(
        vec![ch.x().clone(), ch.y().clone()],
        p_x.iter().flat_map(|(a, pa)| p_y.iter().map(move |(b, pb)| (vec![a[0], b[0]], pa * pb))).collect::<Vec<_>>(),
    )?;
    let e = Exact::of(&JointDist::join(&p, ch)?)?;
    Ok(Link::ALL.iter().map(|&l| Term::plain(TermKind::Interactive(l), e.interactive(l))).collect())
}

type StatFn = fn(&Stats) -> f64;

fn ri_xz(s: &Stats) -> f64 {
    s.ri_xz()
}
fn ri_yz(s: &Stats) -> f64 {
    s.ri_yz()
}
fn ri_xz_plus_h_xy_z(s: &Stats) -> f64 {
    s.ri_xz() + s.h_xy_given_z()
}
fn ri_yz_plus_h_xy_z(s: &Stats) -> f64 {
    s.ri_yz() + s.h_xy_given_z()
}
fn h_yz_x(s: &Stats) -> f64 {
    s.h_yz_given_x()
}
fn h_xz_y(s: &Stats) -> f64 {
    s.h_xz_given_y()
}

/// The two inner functions and witness labels of a nested term.
fn nested_parts(kind: TermKind) -> (bool, StatFn, StatFn, [&'static str; 3]) {
    match kind {
        TermKind::SplitNested { outer_x: true } => (true, ri_yz, ri_xz_plus_h_xy_z, ["X'", "Y'", "Y''"]),
        TermKind::SplitNested { outer_x: false } => (false, ri_xz, ri_yz_plus_h_xy_z, ["Y'", "X'", "X''"]),
        TermKind::Conditional(Link::L31) => (true, ri_yz, h_xz_y, ["X'", "Y'", "Y''"]),
        TermKind::Conditional(_) => (false, ri_xz, h_yz_x, ["Y'", "X'", "X''"]),
        _ => unreachable!("not a nested term"),
    }
}

fn stats_oriented(m: &Model, outer_x: bool, outer: &[f64], inner: &[f64]) -> Stats {
    if outer_x {
        m.stats_product(outer, inner)
    } else {
        m.stats_product(inner, outer)
    }
}

/// `sup_o [ sup_i f1(o, i) + sup_i f2(o, i) ]`. This equals the joint
/// supremum over `(o, i1, i2)` of `f1(o, i1) + f2(o, i2)`, which is searched
/// directly; the two inner suprema are then polished at the chosen `o`.
fn nested_term(m: &Model, cfg: &OptConfig, kind: TermKind) -> Term {
    let (outer_x, f1, f2, labels) = nested_parts(kind);
    let (no, ni) = if outer_x { (m.nx, m.ny) } else { (m.ny, m.nx) };
    let joint = optimize_over_simplex(
        |v| {
            let (o, rest) = v.split_at(no);
            let (i1, i2) = rest.split_at(ni);
            f1(&stats_oriented(m, outer_x, o, i1)) + f2(&stats_oriented(m, outer_x, o, i2))
        },
        &[no, ni, ni],
        cfg,
    );
    let o = &joint.args[0];
    let polish = |f: StatFn, start: &[f64]| {
        let at_start = f(&stats_oriented(m, outer_x, o, start));
        let r = optimize_over_simplex(|i| f(&stats_oriented(m, outer_x, o, i)), &[ni], cfg);
        if r.value > at_start {
            (r.value, r.args[0].clone())
        } else {
            (at_start, start.to_vec())
        }
    };
    let (a, ia) = polish(f1, &joint.args[1]);
    let (b, ib) = polish(f2, &joint.args[2]);
    Term {
        kind,
        value: a + b,
        witnesses: vec![
            Witness::new(labels[0], o.clone()),
            Witness::new(labels[1], ia),
            Witness::new(labels[2], ib),
        ],
    }
}

/// Eq. for links 23 / 31 with the other party's actual marginal.
fn split_marginal_term(m: &Model, cfg: &OptConfig, link: Link, other: &[f64]) -> Term {
    let (a, b, labels) = if link == Link::L23 {
        let a = optimize_over_simplex(|x| m.stats_product(x, other).ri_xz(), &[m.nx], cfg);
        let b = optimize_over_simplex(|x| m.stats_product(x, other).h_yz_given_x(), &[m.nx], cfg);
        (a, b, ["X'", "X''"])
    } else {
        let a = optimize_over_simplex(|y| m.stats_product(other, y).ri_yz(), &[m.ny], cfg);
        let b = optimize_over_simplex(|y| m.stats_product(other, y).h_xz_given_y(), &[m.ny], cfg);
        (a, b, ["Y'", "Y''"])
    };
    Term {
        kind: TermKind::SplitMarginal(link),
        value: a.value + b.value,
        witnesses: vec![Witness::new(labels[0], a.args[0].clone()), Witness::new(labels[1], b.args[0].clone())],
    }
}

fn split_terms(m: &Model, cfg: &OptConfig, px: &[f64], py: &[f64]) -> Vec<Term> {
    vec![
        split_marginal_term(m, cfg, Link::L23, py),
        split_marginal_term(m, cfg, Link::L31, px),
        nested_term(m, cfg, TermKind::SplitNested { outer_x: true }),
        nested_term(m, cfg, TermKind::SplitNested { outer_x: false }),
    ]
}

/// Bounds with each term switched separately. Links 23 and 31 use the given
/// marginals `p_y` and `p_x`; link 12 does not depend on either.
pub fn switched_bounds(ch: &Channel, p_x: &JointDist, p_y: &JointDist, cfg: &OptConfig) -> Result<Vec<Term>> {
    cfg.validate()?;
    require_channel_normal(ch)?;
    let px = require_marginal(p_x, ch.x().len(), "p_x")?;
    let py = require_marginal(p_y, ch.y().len(), "p_y")?;
    Ok(split_terms(&Model::from_channel(ch), cfg, &px, &py))
}

fn conditional_terms(m: &Model, cfg: &OptConfig, c1: bool, c2: bool) -> Vec<Term> {
    let mut out = Vec::new();
    if c1 {
        out.push(nested_term(m, cfg, TermKind::Conditional(Link::L31)));
    }
    if c2 {
        out.push(nested_term(m, cfg, TermKind::Conditional(Link::L23)));
    }
    out
}

/// Switched bounds sharing one input across both terms: link 31 when
/// Condition 1 holds, link 23 when Condition 2 holds. Links whose condition
/// fails are simply absent.
pub fn conditional_bounds(ch: &Channel, cfg: &OptConfig) -> Result<Vec<Term>> {
    cfg.validate()?;
    require_channel_normal(ch)?;
    let m = Model::from_channel(ch);
    Ok(conditional_terms(&m, cfg, check_condition1(ch), check_condition2(ch)))
}

// ---------------------------------------------------------------------------
// report

/// Structural facts that decide which bounds apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conditions {
    pub bigraph_connected: bool,
    pub full_support: bool,
    pub product_inputs: bool,
    pub condition1: bool,
    pub condition2: bool,
}

impl Conditions {
    /// Conditions of `(p_xy, ch)` after reduction to pair normal form.
    pub fn of(p_xy: &JointDist, ch: &Channel) -> Result<Conditions> {
        let (p, c) = pair_normal_form(p_xy, ch)?.reduced;
        Conditions::of_reduced(&p, &c)
    }

    fn of_reduced(p: &JointDist, c: &Channel) -> Result<Conditions> {
        Ok(Conditions {
            bigraph_connected: bigraph_connected(p)?,
            full_support: p.is_full_support(),
            product_inputs: p.is_product(PRODUCT_TOL),
            condition1: check_condition1(c),
            condition2: check_condition2(c),
        })
    }
}

/// Best bound on one link and every applicable term behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBound {
    pub value: f64,
    pub terms: Vec<Term>,
}

impl LinkBound {
    /// The term attaining the value.
    pub fn winner(&self) -> Option<&Term> {
        best_term(&self.terms, self.terms.first().map_or(Link::L12, Term::link))
    }
}

/// Everything `best_bounds` computed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub links: Links<LinkBound>,
    pub rho: f64,
    /// Links whose bound also bounds the randomness.
    pub rho_links: Vec<Link>,
    pub conditions: Conditions,
    /// The reduced pair the bounds were computed on.
    pub input: JointDist,
    pub channel: Channel,
    pub x_merge: Vec<Option<usize>>,
    pub y_merge: Vec<Option<usize>>,
    pub z_merge: Vec<Option<usize>>,
    pub config: OptConfig,
}

impl BoundReport {
    pub fn value(&self, l: Link) -> f64 {
        self.links.get(l).value
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        Link::ALL.into_iter().flat_map(move |l| self.links.get(l).terms.iter())
    }

    /// Recomputes a term from its witnesses on the reduced pair.
    pub fn reevaluate(&self, term: &Term) -> Result<f64> {
        reevaluate(term, &Setting::Computation { p_xy: &self.input, ch: &self.channel })
    }
}

/// All applicable bounds for `(p_xy, ch)`. The pair is reduced to normal form
/// first. Switched families need a full-support input; the interactive family
/// needs independent inputs.
pub fn best_bounds(p_xy: &JointDist, ch: &Channel, cfg: &OptConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let nf = pair_normal_form(p_xy, ch)?;
    let (p, c) = nf.reduced;
    let conditions = Conditions::of_reduced(&p, &c)?;
    let mut terms = cutset_terms(&p, &c)?;
    if conditions.full_support {
        let m = Model::from_channel(&c);
        let (px, py) = (p.marginal_probs(0), p.marginal_probs(1));
        terms.extend(joint_switching_terms(&m, cfg, conditions.condition1, conditions.condition2));
        if conditions.product_inputs {
            let e = Exact::of(&JointDist::join(&p, &c)?)?;
            terms.extend(Link::ALL.iter().map(|&l| Term::plain(TermKind::Interactive(l), e.interactive(l))));
        }
        terms.extend(split_terms(&m, cfg, &px, &py));
        terms.extend(conditional_terms(&m, cfg, conditions.condition1, conditions.condition2));
    }
    let links = Links::default().map(|l, _: &()| {
        let ts: Vec<Term> = terms.iter().filter(|t| t.link() == l).cloned().collect();
        let value = best_term(&ts, l).map_or(0.0, |t| t.value);
        LinkBound { value, terms: ts }
    });
    let mut rho_links = Vec::new();
    if conditions.bigraph_connected {
        rho_links.push(Link::L12);
    }
    if conditions.full_support && conditions.condition2 {
        rho_links.push(Link::L23);
    }
    if conditions.full_support && conditions.condition1 {
        rho_links.push(Link::L31);
    }
    let mut report = BoundReport {
        links,
        rho: 0.0,
        rho_links,
        conditions,
        input: p,
        channel: c,
        x_merge: nf.x_merge,
        y_merge: nf.y_merge,
        z_merge: nf.z_merge,
        config: cfg.clone(),
    };
    report.rho = randomness_bound(&report);
    Ok(report)
}

/// `ρ ≥ max` of the link bounds that also bound randomness: link 12 when the
/// input bigraph is connected, links 31 / 23 under full support and
/// Condition 1 / 2.
pub fn randomness_bound(report: &BoundReport) -> f64 {
    report.rho_links.iter().map(|&l| report.value(l)).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// sampling and CMSS

/// Bounds for secure sampling of `p_xyz`, which must be in sampling normal
/// form.
pub fn sampling_bounds(p_xyz: &JointDist) -> Result<Links<f64>> {
    require_three_axes(p_xyz)?;
    if !sampling_normal_form(p_xyz)?.is_identity() {
        bail!(Precondition, "joint is not in sampling normal form");
    }
    let e = Exact::of(p_xyz)?;
    Ok(Links { h12: e.sampling(Link::L12), h23: e.sampling(Link::L23), h31: e.sampling(Link::L31) })
}

/// Lower bounds on CMSS share entropies for secrets `p_xyz`.
///
/// The cut-set terms hold at `p_xyz` itself. A share whose link variables
/// have a connected support bigraph in `p_xyz` (X-Y for `M12`, Y-Z for `M23`,
/// X-Z for `M31`) is independent of the secrets, so its bound may be switched
/// to any joint supported inside the support of `p_xyz`.
pub fn cmss_bounds(p_xyz: &JointDist, cfg: &OptConfig) -> Result<Vec<Term>> {
    cfg.validate()?;
    require_three_axes(p_xyz)?;
    let e = Exact::of(p_xyz)?;
    let mut terms: Vec<Term> = Link::ALL.iter().map(|&l| Term::plain(TermKind::CmssCutset(l), e.cutset(l))).collect();
    let m = Model::from_support(p_xyz);
    for link in Link::ALL {
        let pair = match link {
            Link::L12 => [0, 1],
            Link::L23 => [1, 2],
            Link::L31 => [0, 2],
        };
        if !bigraph_connected(&p_xyz.marginal(&pair)?)? {
            continue;
        }
        for ri in cutset_ris(link) {
            let r = optimize_over_simplex(|q| { let s = m.stats(q); ri.of(&s) + cond_entropy_of(link, &s) }, &[m.nvars], cfg);
            terms.push(Term {
                kind: TermKind::CmssSwitching { link, ri },
                value: r.value,
                witnesses: vec![Witness::new("X'Y'Z'", r.args[0].clone())],
            });
        }
    }
    Ok(terms)
}

// ---------------------------------------------------------------------------
// re-evaluation

/// What a term was computed for.
#[derive(Debug, Clone, Copy)]
pub enum Setting<'a> {
    /// A reduced `(p_xy, ch)` pair.
    Computation { p_xy: &'a JointDist, ch: &'a Channel },
    /// CMSS or sampling secrets.
    Sharing { p_xyz: &'a JointDist },
}

fn witness<'a>(t: &'a Term, label: &str) -> Result<&'a [f64]> {
    match t.witness(label) {
        Some(w) => Ok(&w.probs),
        None => bail!(Argument, "term has no `{label}` witness"),
    }
}

/// Evaluates a term's expression at its witnesses.
pub fn reevaluate(term: &Term, setting: &Setting<'_>) -> Result<f64> {
    match (*setting, term.kind) {
        (Setting::Computation { p_xy, ch }, kind) => {
            let m = Model::from_channel(ch);
            match kind {
                TermKind::Cutset(l) => Ok(Exact::of(&JointDist::join(p_xy, ch)?)?.cutset(l)),
                TermKind::Interactive(l) => Ok(Exact::of(&JointDist::join(p_xy, ch)?)?.interactive(l)),
                TermKind::JointSwitching { link, ri } => {
                    let s = m.stats(witness(term, "X'Y'")?);
                    Ok(ri.of(&s) + cond_entropy_of(link, &s))
                }
                TermKind::SplitMarginal(Link::L31) => {
                    let px = p_xy.marginal_probs(0);
                    Ok(m.stats_product(&px, witness(term, "Y'")?).ri_yz()
                        + m.stats_product(&px, witness(term, "Y''")?).h_xz_given_y())
                }
                TermKind::SplitMarginal(_) => {
                    let py = p_xy.marginal_probs(1);
                    Ok(m.stats_product(witness(term, "X'")?, &py).ri_xz()
                        + m.stats_product(witness(term, "X''")?, &py).h_yz_given_x())
                }
                TermKind::SplitNested { .. } | TermKind::Conditional(_) => {
                    let (outer_x, f1, f2, labels) = nested_parts(kind);
                    let o = witness(term, labels[0])?;
                    Ok(f1(&stats_oriented(&m, outer_x, o, witness(term, labels[1])?))
                        + f2(&stats_oriented(&m, outer_x, o, witness(term, labels[2])?)))
                }
                _ => bail!(Argument, "term does not belong to a computation setting"),
            }
        }
        (Setting::Sharing { p_xyz }, kind) => match kind {
            TermKind::CmssCutset(l) => Ok(Exact::of(p_xyz)?.cutset(l)),
            TermKind::Sampling(l) => Ok(Exact::of(p_xyz)?.sampling(l)),
            TermKind::CmssSwitching { link, ri } => {
                let s = Model::from_support(p_xyz).stats(witness(term, "X'Y'Z'")?);
                Ok(ri.of(&s) + cond_entropy_of(link, &s))
            }
            _ => bail!(Argument, "term does not belong to a sharing setting"),
        },
    }
}
