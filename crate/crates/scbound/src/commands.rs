//! The work behind each subcommand, independent of argument parsing.

use std::path::Path;

use serde::de::DeserializeOwned;

use scbound_core::bounds::{best_bounds, cmss_bounds, link_values, Link, OptConfig};
use scbound_core::cmss::{cmss_joint, protocol_realizability, share_entropies, verify_cmss};
use scbound_core::dist::{Channel, JointDist};
use scbound_core::protocol::{builtin, run_exact, verify_all, BuiltinParams, ProtocolSpec};

use crate::format::{ChannelJson, CmssFile, DistJson, ProtocolFile};
use crate::report::{AnalyzeReport, CheckJson, CmssReport, SimulateReport, SOUNDNESS_TOL};
use crate::{CliError, CliResult, RunManifest};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: shown, source })
}

pub fn read_dist(path: &Path) -> CliResult<JointDist> {
    Ok(read_json::<DistJson>(path)?.to_dist()?)
}

pub fn read_channel(path: &Path) -> CliResult<Channel> {
    Ok(read_json::<ChannelJson>(path)?.to_channel()?)
}

/// Where a channel, and optionally a protocol, come from.
#[derive(Debug, Clone, Default)]
pub struct Source<'a> {
    pub builtin: Option<&'a str>,
    pub params: BuiltinParams,
    pub channel: Option<&'a Path>,
    pub dist: Option<&'a Path>,
}

/// The channel and input distribution named by `src`. Without a `dist`
/// file, built-ins use their default inputs and channels the uniform pair.
pub fn resolve_pair(src: &Source<'_>) -> CliResult<(JointDist, Channel)> {
    let (p, ch) = match (src.builtin, src.channel) {
        (Some(name), None) => {
            let b = builtin(name, &src.params)?;
            (b.inputs, b.channel)
        }
        (None, Some(path)) => {
            let ch = read_channel(path)?;
            (JointDist::uniform(vec![ch.x().clone(), ch.y().clone()]), ch)
        }
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --builtin or --channel, not both".into())),
        (None, None) => return Err(CliError::Usage("one of --builtin or --channel is required".into())),
    };
    match src.dist {
        Some(path) => Ok((read_dist(path)?, ch)),
        None => Ok((p, ch)),
    }
}

pub fn analyze(src: &Source<'_>, cfg: &OptConfig, manifest: RunManifest) -> CliResult<AnalyzeReport> {
    let (p, ch) = resolve_pair(src)?;
    let report = best_bounds(&p, &ch, cfg)?;
    Ok(AnalyzeReport::new(manifest, &report))
}

/// Runs `spec` exactly on `inputs`, checks it against `ch` and, when a
/// config is given, compares its entropies with the lower bounds.
pub fn simulate(
    spec: &ProtocolSpec,
    ch: &Channel,
    inputs: &JointDist,
    cfg: Option<&OptConfig>,
    manifest: RunManifest,
) -> CliResult<SimulateReport> {
    let e = run_exact(spec, inputs)?;
    let sec = verify_all(&e, ch)?;
    let bounds = cfg.map(|c| best_bounds(inputs, ch, c)).transpose()?;
    Ok(SimulateReport::new(manifest, spec.name.clone(), DistJson::of(inputs), &sec, bounds.as_ref()))
}

/// A built-in protocol, or one read from a protocol file. `src.dist` and
/// `src.channel` override the inputs and channel of either.
pub fn load_protocol(src: &Source<'_>, spec_file: Option<&Path>) -> CliResult<(ProtocolSpec, Channel, JointDist)> {
    let (spec, ch, inputs) = match (src.builtin, spec_file) {
        (Some(name), None) => {
            let b = builtin(name, &src.params)?;
            (b.spec, b.channel, b.inputs)
        }
        (None, Some(path)) => {
            let f: ProtocolFile = read_json(path)?;
            let spec = f.protocol.to_spec()?;
            let ch = f.channel.to_channel()?;
            let inputs = match &f.inputs {
                Some(d) => d.to_dist()?,
                None => JointDist::uniform(vec![spec.x.clone(), spec.y.clone()]),
            };
            (spec, ch, inputs)
        }
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --builtin or --spec, not both".into())),
        (None, None) => return Err(CliError::Usage("one of --builtin, --spec or --cmss is required".into())),
    };
    let ch = match src.channel {
        Some(path) => read_channel(path)?,
        None => ch,
    };
    let inputs = match src.dist {
        Some(path) => read_dist(path)?,
        None => inputs,
    };
    Ok((spec, ch, inputs))
}

/// Deals a scheme on its secrets and checks it.
pub fn simulate_cmss(file: &CmssFile, cfg: &OptConfig, manifest: RunManifest) -> CliResult<CmssReport> {
    let scheme = file.scheme.to_spec()?;
    let secrets = file.secrets.to_dist()?;
    let joint = cmss_joint(&scheme, &secrets)?;
    let c = verify_cmss(&joint)?;
    let mut checks = Vec::new();
    for (n, k) in ["H(X|M12,M31)", "H(Y|M12,M23)", "H(Z|M23,M31)"].iter().zip(c.correctness) {
        checks.push(CheckJson::new(format!("correctness {n}"), k));
    }
    for (n, k) in ["alice", "bob", "charlie"].iter().zip(c.privacy) {
        checks.push(CheckJson::new(format!("privacy against {n}"), k));
    }
    let realizability = ["M31;M23|M12", "M12;M31|M23", "M23;M12|M31"]
        .iter()
        .zip(protocol_realizability(&joint))
        .map(|(n, k)| CheckJson::new(format!("information inequality {n}"), k))
        .collect();
    let lb = link_values(&cmss_bounds(&secrets, cfg)?).map(|_, v| v.unwrap_or(0.0));
    let h = share_entropies(&joint)?;
    for l in Link::ALL {
        let slack = h.get(l) - lb.get(l);
        checks.push(CheckJson { name: format!("H({}) >= bound", l.name()), value: slack, pass: slack >= -SOUNDNESS_TOL });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(CmssReport {
        manifest,
        scheme: scheme.name.clone(),
        secrets: DistJson::of(&secrets),
        share_entropies: h.into(),
        bounds: lb.into(),
        checks,
        realizability,
        all_pass,
    })
}
