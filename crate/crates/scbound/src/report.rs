//! Report types and their JSON and CSV renderings.
//!
//! CSV output starts with the manifest as `# key: value` comment lines,
//! followed by a header and one row per record.

use std::collections::BTreeMap;

use serde::Serialize;

use scbound_core::bounds::{BoundReport, Conditions, Link, Links, Term};
use scbound_core::protocol::{Check, SecurityReport};

use crate::format::{ChannelJson, DistJson};
use crate::{CliResult, RunManifest};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkValues {
    #[serde(rename = "M12")]
    pub m12: f64,
    #[serde(rename = "M23")]
    pub m23: f64,
    #[serde(rename = "M31")]
    pub m31: f64,
}

impl From<Links<f64>> for LinkValues {
    fn from(l: Links<f64>) -> Self {
        LinkValues { m12: l.h12, m23: l.h23, m31: l.h31 }
    }
}

impl LinkValues {
    pub fn get(&self, l: Link) -> f64 {
        match l {
            Link::L12 => self.m12,
            Link::L23 => self.m23,
            Link::L31 => self.m31,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckJson {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

impl CheckJson {
    pub fn new(name: impl Into<String>, c: Check) -> Self {
        CheckJson { name: name.into(), value: c.value, pass: c.pass }
    }
}

/// A report the binary can print.
pub trait Report: Serialize {
    fn manifest_mut(&mut self) -> &mut RunManifest;
    fn manifest(&self) -> &RunManifest;
    /// False makes the process exit with the verification-failure code.
    fn passed(&self) -> bool;
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;

    fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut out = String::new();
                let m = serde_json::to_value(self.manifest()).expect("manifests serialize");
                if let serde_json::Value::Object(fields) = m {
                    for (k, v) in fields {
                        out.push_str(&format!("# {k}: {v}\n"));
                    }
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(self.csv_header())?;
                for r in self.csv_rows() {
                    w.write_record(&r)?;
                }
                let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
                out.push_str(&String::from_utf8(bytes).expect("csv of strings is utf-8"));
                Ok(out)
            }
        }
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessJson {
    pub probs: Vec<f64>,
    pub limit_point: bool,
}

fn witnesses(t: &Term) -> BTreeMap<String, WitnessJson> {
    t.witnesses
        .iter()
        .map(|w| (w.label.clone(), WitnessJson { probs: w.probs.clone(), limit_point: w.limit_point }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermJson {
    pub family: String,
    pub expression: String,
    pub value: f64,
    pub limit_point: bool,
    pub witnesses: BTreeMap<String, WitnessJson>,
}

impl From<&Term> for TermJson {
    fn from(t: &Term) -> Self {
        TermJson {
            family: t.family().name().to_string(),
            expression: t.expression(),
            value: t.value,
            limit_point: t.is_limit_point(),
            witnesses: witnesses(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkJson {
    pub value: f64,
    /// Family and witnesses of the term attaining the value.
    pub family: Option<String>,
    pub expression: Option<String>,
    pub witnesses: BTreeMap<String, WitnessJson>,
    /// Index of that term in `terms`.
    pub best: Option<usize>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionsJson {
    pub bigraph_connected: bool,
    pub full_support: bool,
    pub product_inputs: bool,
    pub condition1: bool,
    pub condition2: bool,
}

impl From<Conditions> for ConditionsJson {
    fn from(c: Conditions) -> Self {
        ConditionsJson {
            bigraph_connected: c.bigraph_connected,
            full_support: c.full_support,
            product_inputs: c.product_inputs,
            condition1: c.condition1,
            condition2: c.condition2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub manifest: RunManifest,
    pub links: BTreeMap<String, LinkJson>,
    pub conditions: ConditionsJson,
    pub rho: f64,
    pub rho_links: Vec<String>,
    /// Input and channel after reduction to normal form; witnesses live on
    /// these alphabets.
    pub input: DistJson,
    pub channel: ChannelJson,
}

impl AnalyzeReport {
    pub fn new(manifest: RunManifest, r: &BoundReport) -> Self {
        let links = Link::ALL
            .iter()
            .map(|&l| {
                let lb = r.links.get(l);
                let win = lb.winner();
                let json = LinkJson {
                    value: lb.value,
                    family: win.map(|t| t.family().name().to_string()),
                    expression: win.map(Term::expression),
                    witnesses: win.map(witnesses).unwrap_or_default(),
                    best: win.and_then(|w| lb.terms.iter().position(|t| std::ptr::eq(t, w))),
                    terms: lb.terms.iter().map(TermJson::from).collect(),
                };
                (l.name().to_string(), json)
            })
            .collect();
        AnalyzeReport {
            manifest,
            links,
            conditions: r.conditions.into(),
            rho: r.rho,
            rho_links: r.rho_links.iter().map(|l| l.name().to_string()).collect(),
            input: DistJson::of(&r.input),
            channel: ChannelJson::of(&r.channel),
        }
    }

    pub fn value(&self, l: Link) -> f64 {
        self.links[l.name()].value
    }
}

impl Report for AnalyzeReport {
    fn manifest_mut(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn passed(&self) -> bool {
        true
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["link", "family", "expression", "value", "limit_point", "best"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for (name, l) in &self.links {
            for (i, t) in l.terms.iter().enumerate() {
                let best = l.best == Some(i);
                rows.push(vec![
                    name.clone(),
                    t.family.clone(),
                    t.expression.clone(),
                    num(t.value),
                    t.limit_point.to_string(),
                    best.to_string(),
                ]);
            }
        }
        rows.push(vec!["rho".into(), String::new(), self.rho_links.join(" "), num(self.rho), String::new(), String::new()]);
        rows
    }
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub manifest: RunManifest,
    pub protocol: String,
    pub inputs: DistJson,
    pub entropies: LinkValues,
    pub expected_lengths: LinkValues,
    /// `H(M12, M23, M31 | X, Y)`.
    pub randomness: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<LinkValues>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_bound: Option<f64>,
    pub checks: Vec<CheckJson>,
    pub all_pass: bool,
}

/// Entropies must not fall below lower bounds by more than this.
pub const SOUNDNESS_TOL: f64 = 1e-6;

impl SimulateReport {
    pub fn new(
        manifest: RunManifest,
        protocol: String,
        inputs: DistJson,
        sec: &SecurityReport,
        bounds: Option<&BoundReport>,
    ) -> Self {
        let mut checks: Vec<CheckJson> = sec.named().into_iter().map(|(n, c)| CheckJson::new(n, c)).collect();
        let mut all_pass = sec.all_pass();
        if let Some(b) = bounds {
            for l in Link::ALL {
                let slack = sec.entropies.get(l) - b.value(l);
                let pass = slack >= -SOUNDNESS_TOL;
                all_pass &= pass;
                checks.push(CheckJson { name: format!("H({}) >= bound", l.name()), value: slack, pass });
            }
        }
        SimulateReport {
            manifest,
            protocol,
            inputs,
            entropies: sec.entropies.into(),
            expected_lengths: sec.expected_lengths.into(),
            randomness: sec.randomness,
            bounds: bounds.map(|b| b.links.map(|_, v| v.value).into()),
            rho_bound: bounds.map(|b| b.rho),
            checks,
            all_pass,
        }
    }
}

impl Report for SimulateReport {
    fn manifest_mut(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn passed(&self) -> bool {
        self.all_pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["quantity", "value", "pass"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for l in Link::ALL {
            rows.push(vec![format!("H({})", l.name()), num(self.entropies.get(l)), String::new()]);
            rows.push(vec![format!("E[L] {}", l.name()), num(self.expected_lengths.get(l)), String::new()]);
            if let Some(b) = &self.bounds {
                rows.push(vec![format!("bound {}", l.name()), num(b.get(l)), String::new()]);
            }
        }
        rows.push(vec!["randomness".into(), num(self.randomness), String::new()]);
        if let Some(r) = self.rho_bound {
            rows.push(vec!["randomness bound".into(), num(r), String::new()]);
        }
        for c in &self.checks {
            rows.push(vec![c.name.clone(), num(c.value), c.pass.to_string()]);
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmssReport {
    pub manifest: RunManifest,
    pub scheme: String,
    pub secrets: DistJson,
    pub share_entropies: LinkValues,
    /// Lower bounds any scheme for these secrets obeys.
    pub bounds: LinkValues,
    pub checks: Vec<CheckJson>,
    /// Slack of the inequality every protocol transcript with independent
    /// inputs satisfies; negative means no protocol yields these shares.
    pub realizability: Vec<CheckJson>,
    pub all_pass: bool,
}

impl Report for CmssReport {
    fn manifest_mut(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn passed(&self) -> bool {
        self.all_pass
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["quantity", "value", "pass"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for l in Link::ALL {
            rows.push(vec![format!("H({})", l.name()), num(self.share_entropies.get(l)), String::new()]);
            rows.push(vec![format!("bound {}", l.name()), num(self.bounds.get(l)), String::new()]);
        }
        for c in self.checks.iter().chain(&self.realizability) {
            rows.push(vec![c.name.clone(), num(c.value), c.pass.to_string()]);
        }
        rows
    }
}

// ---------------------------------------------------------------------------
// reproduce

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    Equals,
    Below,
}

/// One comparison of a computed value with its expected target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowCheck {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl RowCheck {
    pub fn at_least(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = value >= target - tolerance;
        RowCheck { name: name.into(), value, relation: Relation::AtLeast, target, tolerance, pass }
    }

    pub fn equals(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = (value - target).abs() <= tolerance;
        RowCheck { name: name.into(), value, relation: Relation::Equals, target, tolerance, pass }
    }

    pub fn below(name: impl Into<String>, value: f64, target: f64) -> Self {
        RowCheck { name: name.into(), value, relation: Relation::Below, target, tolerance: 0.0, pass: value < target }
    }

    /// A yes/no fact, recorded as 1 or 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        RowCheck::equals(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub description: String,
    /// Best lower bounds per link.
    pub bound: LinkValues,
    /// Entropies of the simulated protocol or scheme.
    pub simulated: Option<LinkValues>,
    pub checks: Vec<RowCheck>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub manifest: RunManifest,
    pub rows: Vec<Row>,
    pub all_match: bool,
}

impl Report for ReproduceReport {
    fn manifest_mut(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn passed(&self) -> bool {
        self.all_match
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "row", "bound_M12", "bound_M23", "bound_M31", "sim_M12", "sim_M23", "sim_M31", "check", "value", "relation",
            "target", "tolerance", "pass",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for r in &self.rows {
            let sim = |l| r.simulated.map_or(String::new(), |s: LinkValues| num(s.get(l)));
            for c in &r.checks {
                let rel = match c.relation {
                    Relation::AtLeast => ">=",
                    Relation::Equals => "=",
                    Relation::Below => "<",
                };
                rows.push(vec![
                    r.name.clone(),
                    num(r.bound.m12),
                    num(r.bound.m23),
                    num(r.bound.m31),
                    sim(Link::L12),
                    sim(Link::L23),
                    sim(Link::L31),
                    c.name.clone(),
                    num(c.value),
                    rel.into(),
                    num(c.target),
                    num(c.tolerance),
                    c.pass.to_string(),
                ]);
            }
        }
        rows
    }
}
