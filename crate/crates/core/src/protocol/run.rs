use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{axis, huffman, ProtocolSpec, View};
use crate::bounds::{Link, Links};
use crate::dist::{Alphabet, JointDist};
use crate::error::bail;
use crate::Result;

/// Default cap on enumerated branches (input pairs times random symbols).
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Exact outcome of running a protocol on an input distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    /// Over `(X, Y, Z, M12, M23, M31)`; see [`axis`].
    pub joint: JointDist,
    /// Over `(X, Y, Z, R0, R1, ..)`, one axis per round.
    pub rounds: JointDist,
    /// Round indices carried by each link, in schedule order.
    pub link_rounds: [Vec<usize>; 3],
}

impl Execution {
    /// The input distribution `p(x, y)`.
    pub fn input(&self) -> JointDist {
        self.joint.marginal(&[axis::X, axis::Y]).expect("execution joint has input axes")
    }

    /// `H(M12), H(M23), H(M31)`.
    pub fn entropies(&self) -> Links<f64> {
        Links::default().map(|l, _: &()| self.joint.entropy(&[axis::of(l)]).expect("transcript axis"))
    }

    /// Randomness consumed, `H(M12, M23, M31 | X, Y)`.
    pub fn randomness(&self) -> f64 {
        self.joint
            .cond_entropy(&[axis::M12, axis::M23, axis::M31], &[axis::X, axis::Y])
            .expect("execution joint axes")
    }

    /// Expected bits per link when each round's message is Huffman coded
    /// given the earlier symbols on the same link.
    pub fn expected_lengths(&self) -> Links<f64> {
        Links::default().map(|l, _: &()| {
            let rounds = &self.link_rounds[l as usize];
            let mut total = 0.0;
            for j in 0..rounds.len() {
                let axes: Vec<usize> = rounds[..=j].iter().map(|r| 3 + r).collect();
                let m = self.rounds.marginal(&axes).expect("round axes");
                let mut by_prefix: BTreeMap<&[usize], Vec<(usize, f64)>> = BTreeMap::new();
                for (t, p) in m.iter() {
                    by_prefix.entry(&t[..j]).or_default().push((t[j], p));
                }
                for cond in by_prefix.values() {
                    let mass: f64 = cond.iter().map(|c| c.1).sum();
                    let probs: Vec<f64> = cond.iter().map(|c| c.1 / mass).collect();
                    total += mass * huffman::huffman_expected_length(&probs);
                }
            }
            total
        })
    }
}

pub(crate) fn rand_tuples(r: [usize; 3]) -> impl Iterator<Item = [usize; 3]> {
    (0..r[0]).flat_map(move |a| (0..r[1]).flat_map(move |b| (0..r[2]).map(move |c| [a, b, c])))
}

/// Runs the schedule for one branch, calling `on_msg(round, sender_view,
/// message)` after each round. Returns every party's history.
pub(crate) fn unroll(
    spec: &ProtocolSpec,
    inputs: [Option<usize>; 3],
    rand: [usize; 3],
    mut on_msg: impl FnMut(usize, &View<'_>, usize),
) -> Result<[Vec<usize>; 3]> {
    let mut hist: [Vec<usize>; 3] = Default::default();
    for (i, r) in spec.rounds.iter().enumerate() {
        let s = r.sender.index();
        let v = View { input: inputs[s], rand: rand[s], history: &hist[s] };
        let m = r.map.eval(&v)?;
        if m >= r.alphabet.len() {
            bail!(Spec, "round {i}: message {m} outside an alphabet of {} symbols", r.alphabet.len());
        }
        on_msg(i, &v, m);
        hist[s].push(m);
        hist[r.receiver.index()].push(m);
    }
    Ok(hist)
}

/// [`run_exact_capped`] with [`DEFAULT_CAP`].
pub fn run_exact(spec: &ProtocolSpec, p_xy: &JointDist) -> Result<Execution> {
    run_exact_capped(spec, p_xy, DEFAULT_CAP)
}

/// Enumerates every input pair in the support of `p_xy` and every
/// combination of random symbols, and collects the exact joint law.
pub fn run_exact_capped(spec: &ProtocolSpec, p_xy: &JointDist, cap: u64) -> Result<Execution> {
    spec.validate()?;
    if p_xy.arity() != 2 || !p_xy.axes()[0].same_symbols(&spec.x) || !p_xy.axes()[1].same_symbols(&spec.y) {
        bail!(Argument, "input distribution does not match the protocol's input alphabets");
    }
    let [r1, r2, r3] = spec.randomness;
    let branches = (p_xy.support_len() as u64)
        .saturating_mul(r1 as u64)
        .saturating_mul(r2 as u64)
        .saturating_mul(r3 as u64);
    if branches > cap {
        bail!(Capacity, "{branches} branches exceed the cap of {cap}");
    }
    let weight = 1.0 / (r1 * r2 * r3) as f64;
    let points: Vec<(usize, usize, f64)> = p_xy.iter().map(|(t, p)| (t[0], t[1], p)).collect();
    let per_input = |&(x, y, p): &(usize, usize, f64)| -> Result<BTreeMap<Vec<usize>, f64>> {
        let mut acc = BTreeMap::new();
        for rand in rand_tuples(spec.randomness) {
            let mut key = vec![x, y, 0];
            let hist = unroll(spec, [Some(x), Some(y), None], rand, |_, _, m| key.push(m))?;
            let z = spec.output.eval(&View { input: None, rand: rand[2], history: &hist[2] })?;
            if z >= spec.z.len() {
                bail!(Spec, "output {z} outside an alphabet of {} symbols", spec.z.len());
            }
            key[2] = z;
            *acc.entry(key).or_insert(0.0) += p * weight;
        }
        Ok(acc)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<BTreeMap<Vec<usize>, f64>> = {
        use rayon::prelude::*;
        points.par_iter().map(per_input).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<BTreeMap<Vec<usize>, f64>> = points.iter().map(per_input).collect::<Result<_>>()?;

    let mut all: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for part in parts {
        for (k, p) in part {
            *all.entry(k).or_insert(0.0) += p;
        }
    }
    let mut round_axes = vec![spec.x.clone(), spec.y.clone(), spec.z.clone()];
    round_axes.extend(spec.rounds.iter().enumerate().map(|(i, r)| r.alphabet.renamed(alloc::format!("R{i}"))));
    let rounds = JointDist::new(round_axes, all.iter().map(|(k, &p)| (k.clone(), p)))?;
    let link_rounds = spec.link_rounds();
    let joint = transcript_joint(spec, &rounds, &link_rounds)?;
    Ok(Execution { joint, rounds, link_rounds })
}

/// Groups round symbols into per-link transcripts. Transcript alphabets list
/// the realized tuples in lexicographic order; symbols are joined by `,`
/// and the empty transcript is `-`.
fn transcript_joint(spec: &ProtocolSpec, rounds: &JointDist, link_rounds: &[Vec<usize>; 3]) -> Result<JointDist> {
    let mut index: [BTreeMap<Vec<usize>, usize>; 3] = Default::default();
    for (t, _) in rounds.iter() {
        for l in 0..3 {
            let tr: Vec<usize> = link_rounds[l].iter().map(|&r| t[3 + r]).collect();
            index[l].entry(tr).or_insert(0);
        }
    }
    let mut axes = vec![spec.x.clone(), spec.y.clone(), spec.z.clone()];
    for (l, link) in Link::ALL.iter().enumerate() {
        let mut labels = Vec::with_capacity(index[l].len());
        for (i, (tr, slot)) in index[l].iter_mut().enumerate() {
            *slot = i;
            labels.push(if tr.is_empty() {
                String::from("-")
            } else {
                tr.iter()
                    .zip(&link_rounds[l])
                    .map(|(&s, &r)| spec.rounds[r].alphabet.symbol(s))
                    .collect::<Vec<_>>()
                    .join(",")
            });
        }
        axes.push(transcript_alphabet(link.name(), labels)?);
    }
    let entries = rounds.iter().map(|(t, p)| {
        let mut k = t[..3].to_vec();
        for l in 0..3 {
            let tr: Vec<usize> = link_rounds[l].iter().map(|&r| t[3 + r]).collect();
            k.push(index[l][&tr]);
        }
        (k, p)
    });
    JointDist::new(axes, entries.collect::<Vec<_>>())
}

/// Distinct tuples can print the same when round symbols contain `,`; fall
/// back to numbered labels then.
fn transcript_alphabet(name: &str, labels: Vec<String>) -> Result<Alphabet> {
    let n = labels.len();
    Alphabet::new(name, labels).or_else(|_| Ok(Alphabet::range(name, n)))
}
