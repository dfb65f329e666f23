//! Known bound and protocol values for the built-in functions, recomputed and compared.
//!
//! Each row recomputes the lower bounds for one function, runs the matching
//! protocol (or sharing scheme) exactly, and checks both against the known
//! values at fixed tolerances.

use scbound_core::bounds::{best_bounds, cmss_bounds, link_values, BoundReport, Link, OptConfig};
use scbound_core::cmss::{and_cmss, cmss_joint, protocol_realizability, separation_report, verify_cmss};
use scbound_core::dist::{h2, JointDist};
use scbound_core::protocol::{and, controlled_erasure, group_add, remote_ot, run_exact, sum, verify_all, Builtin, SecurityReport};

use crate::report::{LinkValues, ReproduceReport, Row, RowCheck};
use crate::{CliError, CliResult, RunManifest};

pub const ROWS: [&str; 9] = [
    "and",
    "remote-ot-2",
    "remote-ot-3",
    "group-add-2",
    "group-add-3",
    "group-add-6",
    "sum",
    "erasure",
    "cmss-gap",
];

fn log3() -> f64 {
    3f64.log2()
}

/// Rows matching any filter; a filter selects a row by its full name or by
/// a prefix ending before a `-`, so `group-add` picks all three orders.
pub fn select(only: &[String]) -> CliResult<Vec<&'static str>> {
    if only.is_empty() {
        return Ok(ROWS.to_vec());
    }
    let hit = |f: &str, r: &str| r == f || r.strip_prefix(f).is_some_and(|rest| rest.starts_with('-'));
    for f in only {
        if !ROWS.iter().any(|r| hit(f, r)) {
            return Err(CliError::Usage(format!("no reproduction row `{f}`; rows are {}", ROWS.join(", "))));
        }
    }
    Ok(ROWS.iter().copied().filter(|r| only.iter().any(|f| hit(f, r))).collect())
}

pub fn reproduce(only: &[String], cfg: &OptConfig, manifest: RunManifest) -> CliResult<ReproduceReport> {
    let rows = select(only)?.into_iter().map(|r| row(r, cfg)).collect::<CliResult<Vec<_>>>()?;
    let all_match = rows.iter().all(|r| r.matched);
    Ok(ReproduceReport { manifest, rows, all_match })
}

struct Run {
    bounds: BoundReport,
    sec: SecurityReport,
}

fn run(b: &Builtin, cfg: &OptConfig) -> CliResult<Run> {
    let bounds = best_bounds(&b.inputs, &b.channel, cfg)?;
    let e = run_exact(&b.spec, &b.inputs)?;
    let sec = verify_all(&e, &b.channel)?;
    Ok(Run { bounds, sec })
}

fn finish(name: &str, description: &str, bound: LinkValues, simulated: Option<LinkValues>, checks: Vec<RowCheck>) -> Row {
    let matched = checks.iter().all(|c| c.pass);
    Row { name: name.into(), description: description.into(), bound, simulated, checks, matched }
}

fn bound_checks(r: &BoundReport, targets: impl IntoIterator<Item = (Link, f64)>, tol: f64) -> Vec<RowCheck> {
    targets.into_iter().map(|(l, t)| RowCheck::at_least(format!("bound {}", l.name()), r.value(l), t, tol)).collect()
}

fn simulated_checks(s: &SecurityReport, targets: [(Link, f64); 3], tol: f64) -> Vec<RowCheck> {
    targets
        .iter()
        .map(|&(l, t)| RowCheck::equals(format!("simulated {}", l.name()), *s.entropies.get(l), t, tol))
        .collect()
}

/// `P(V = "1")` under the named witness of the best term on link 12.
fn witness_one(r: &BoundReport, label: &str, axis: usize) -> f64 {
    let one = r.input.axes()[axis].index_of("1");
    r.links
        .h12
        .winner()
        .and_then(|t| t.witness(label))
        .zip(one)
        .map_or(f64::NAN, |(w, i)| w.probs[i])
}

fn protocol_row(name: &str, run: &Run, description: &str, mut checks: Vec<RowCheck>) -> Row {
    checks.push(RowCheck::holds("security checks pass", run.sec.all_pass()));
    let bound = run.bounds.links.map(|_, b| b.value).into();
    finish(name, description, bound, Some(run.sec.entropies.into()), checks)
}

pub fn row(name: &str, cfg: &OptConfig) -> CliResult<Row> {
    let l3 = log3();
    use Link::*;
    Ok(match name {
        "and" => {
            let r = run(&and(1)?, cfg)?;
            let mut c = bound_checks(&r.bounds, [(L12, 1.826), (L23, l3), (L31, l3)], 1e-3);
            c.push(RowCheck::at_least("randomness bound", r.bounds.rho, 1.826, 1e-3));
            c.push(RowCheck::equals("witness P(X'=1)", witness_one(&r.bounds, "X'", 0), 0.456, 0.02));
            c.push(RowCheck::equals("witness P(Y'=1)", witness_one(&r.bounds, "Y'", 1), 0.397, 0.02));
            c.extend(simulated_checks(&r.sec, [(L12, 1.0 + l3), (L23, l3), (L31, l3)], 1e-9));
            c.push(RowCheck::equals("randomness used", r.sec.randomness, 1.0 + l3, 1e-9));
            protocol_row(name, &r, "AND: lower bounds against the 1 + log 3 protocol", c)
        }
        "remote-ot-2" | "remote-ot-3" => {
            let m = if name == "remote-ot-2" { 2 } else { 3 };
            let r = run(&remote_ot(m, 1)?, cfg)?;
            let (target, tol) = if m == 2 {
                ([(L31, 2.0), (L23, 2.0), (L12, 3.0)], 1e-3)
            } else {
                ([(L31, 3.0), (L23, 1.0 + l3), (L12, 3.0 + l3)], 1e-2)
            };
            let mut c = bound_checks(&r.bounds, target, tol);
            if m == 2 {
                c.push(RowCheck::at_least("randomness bound", r.bounds.rho, 3.0, 1e-3));
            }
            c.extend(simulated_checks(&r.sec, target, 1e-9));
            protocol_row(name, &r, "remote oblivious transfer of one of m bits: bounds met on every link", c)
        }
        "group-add-2" | "group-add-3" | "group-add-6" => {
            let k: usize = name.rsplit('-').next().and_then(|s| s.parse().ok()).expect("row names end in the order");
            let r = run(&group_add(k, 1)?, cfg)?;
            let lk = (k as f64).log2();
            let mut c: Vec<RowCheck> =
                Link::ALL.iter().map(|&l| RowCheck::equals(format!("bound {}", l.name()), r.bounds.value(l), lk, 1e-6)).collect();
            c.extend(simulated_checks(&r.sec, [(L12, lk), (L23, lk), (L31, lk)], 1e-6));
            c.push(RowCheck::equals("randomness bound", r.bounds.rho, lk, 1e-6));
            let ideal = Link::ALL.iter().all(|&l| (r.sec.entropies.get(l) - r.bounds.value(l)).abs() <= 1e-6);
            c.push(RowCheck::holds("communication ideal", ideal));
            protocol_row(name, &r, "addition in a cyclic group: log |G| on every link", c)
        }
        "sum" => {
            let r = run(&sum(1)?, cfg)?;
            let mut c = bound_checks(&r.bounds, [(L12, 1.5), (L23, l3), (L31, l3)], 1e-3);
            c.extend(simulated_checks(&r.sec, [(L12, l3), (L23, l3), (L31, l3)], 1e-9));
            let gap = r.sec.entropies.h12 - r.bounds.value(L12);
            c.push(RowCheck::equals("open gap on M12", gap, l3 - 1.5, 1e-3));
            protocol_row(name, &r, "integer sum of two bits: gap between log 3 and 1.5 on link 12", c)
        }
        "erasure" => {
            let (p, q) = (0.5, 0.5);
            let r = run(&controlled_erasure(p, q, 1)?, cfg)?;
            let mut c = bound_checks(&r.bounds, [(L31, 1.5)], 1e-3);
            c.extend(bound_checks(&r.bounds, [(L12, 1.0), (L23, 1.0)], 1e-6));
            for l in Link::ALL {
                let name = format!("simulated {} = bound", l.name());
                c.push(RowCheck::equals(name, *r.sec.entropies.get(l), r.bounds.value(l), 1e-6));
            }
            c.push(RowCheck::below("E[L] M31", r.sec.expected_lengths.h31, h2(p) + 1.0 + p));
            protocol_row(name, &r, "controlled erasure with p = q = 1/2: bounds met on every link", c)
        }
        "cmss-gap" => {
            let b = and(1)?;
            let p_xyz = JointDist::join(&b.inputs, &b.channel)?;
            let shares = cmss_joint(&and_cmss(), &p_xyz)?;
            let valid = verify_cmss(&shares)?.all_pass();
            let sep = separation_report(&b.inputs, &b.channel, valid.then_some(&shares), cfg)?;
            let scheme = sep.scheme.unwrap_or_default();
            let mut c = vec![RowCheck::holds("scheme verifies", valid)];
            for l in Link::ALL {
                c.push(RowCheck::equals(format!("share {}", l.name()), *scheme.get(l), l3, 1e-9));
            }
            c.push(RowCheck::equals("gap on M12", sep.gap.h12, 1.826 - l3, 2e-3));
            let lb = link_values(&cmss_bounds(&p_xyz, cfg)?);
            for l in Link::ALL {
                c.push(RowCheck::equals(format!("sharing bound {}", l.name()), lb.get(l).unwrap_or(0.0), l3, 1e-6));
            }
            let violated = protocol_realizability(&shares).iter().any(|k| !k.pass);
            c.push(RowCheck::holds("shares break the protocol inequality", violated));
            let description = "AND sharing with log 3 per share against the protocol bound";
            finish(name, description, sep.protocol_lb.into(), Some(scheme.into()), c)
        }
        _ => return Err(CliError::Usage(format!("no reproduction row `{name}`"))),
    })
}
