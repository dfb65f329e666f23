//! JSON file formats for distributions, channels, protocols and sharing
//! schemes.
//!
//! Symbols are always written by label. A distribution stores only its
//! support points:
//!
//! ```json
//! {"axes":[{"name":"X","symbols":["0","1"]}],"pmf":[{"t":["0"],"p":0.5},{"t":["1"],"p":0.5}]}
//! ```
//!
//! A channel lists one kernel row per input pair, either as a distribution
//! `p` over the output symbols or as a single output symbol `z`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use scbound_core::cmss::{CmssSpec, ShareMap};
use scbound_core::dist::{Alphabet, Channel, JointDist};
use scbound_core::protocol::{MessageMap, Party, ProtocolSpec, Round};
use scbound_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisJson {
    pub name: String,
    pub symbols: Vec<String>,
}

impl AxisJson {
    pub fn of(a: &Alphabet) -> AxisJson {
        AxisJson { name: a.name().to_string(), symbols: a.symbols().to_vec() }
    }

    pub fn to_alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.name.clone(), self.symbols.iter().cloned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub t: Vec<String>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistJson {
    pub axes: Vec<AxisJson>,
    pub pmf: Vec<PointJson>,
}

fn lookup(a: &Alphabet, label: &str) -> Result<usize> {
    a.index_of(label).ok_or_else(|| Error::Argument(format!("unknown symbol `{label}` on axis `{}`", a.name())))
}

impl DistJson {
    pub fn of(d: &JointDist) -> DistJson {
        DistJson {
            axes: d.axes().iter().map(AxisJson::of).collect(),
            pmf: d
                .iter()
                .map(|(t, p)| PointJson { t: d.labels(t).into_iter().map(String::from).collect(), p })
                .collect(),
        }
    }

    pub fn to_dist(&self) -> Result<JointDist> {
        let axes = self.axes.iter().map(AxisJson::to_alphabet).collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::with_capacity(self.pmf.len());
        for pt in &self.pmf {
            if pt.t.len() != axes.len() {
                return Err(Error::Argument(format!("point {:?} has {} symbols for {} axes", pt.t, pt.t.len(), axes.len())));
            }
            let t = pt.t.iter().zip(&axes).map(|(l, a)| lookup(a, l)).collect::<Result<Vec<_>>>()?;
            entries.push((t, pt.p));
        }
        JointDist::new(axes, entries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRowJson {
    /// The input pair `[x, y]`.
    pub t: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    /// Shorthand for a point mass on one output symbol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    /// `X`, `Y`, `Z`.
    pub axes: Vec<AxisJson>,
    pub kernel: Vec<KernelRowJson>,
}

impl ChannelJson {
    pub fn of(ch: &Channel) -> ChannelJson {
        let (nx, ny, _) = ch.dims();
        let mut kernel = Vec::with_capacity(nx * ny);
        for x in 0..nx {
            for y in 0..ny {
                let t = vec![ch.x().symbol(x).to_string(), ch.y().symbol(y).to_string()];
                kernel.push(KernelRowJson { t, p: Some(ch.row(x, y).to_vec()), z: None });
            }
        }
        ChannelJson { axes: vec![AxisJson::of(ch.x()), AxisJson::of(ch.y()), AxisJson::of(ch.z())], kernel }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        let [x, y, z] = match &self.axes[..] {
            [a, b, c] => [a.to_alphabet()?, b.to_alphabet()?, c.to_alphabet()?],
            _ => return Err(Error::Argument(format!("a channel has 3 axes, got {}", self.axes.len()))),
        };
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; x.len() * y.len()];
        for row in &self.kernel {
            let [a, b] = match &row.t[..] {
                [a, b] => [lookup(&x, a)?, lookup(&y, b)?],
                _ => return Err(Error::Argument(format!("kernel row {:?} needs an input pair", row.t))),
            };
            let probs = match (&row.p, &row.z) {
                (Some(p), None) => p.clone(),
                (None, Some(s)) => {
                    let mut p = vec![0.0; z.len()];
                    p[lookup(&z, s)?] = 1.0;
                    p
                }
                _ => return Err(Error::Argument(format!("kernel row {:?} needs exactly one of `p` and `z`", row.t))),
            };
            let slot = &mut rows[a * y.len() + b];
            if slot.is_some() {
                return Err(Error::Argument(format!("kernel row {:?} given twice", row.t)));
            }
            *slot = Some(probs);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| {
                    Error::Argument(format!("no kernel row for ({}, {})", x.symbol(i / y.len()), y.symbol(i % y.len())))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Channel::new(x, y, z, rows)
    }
}

// ---------------------------------------------------------------------------
// protocols

/// One lookup-table entry: a view written as labels, and the value it maps to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub view: Vec<String>,
    pub out: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundJson {
    pub from: String,
    pub to: String,
    pub alphabet: AxisJson,
    pub table: Vec<EntryJson>,
}

/// A protocol with every map written out as a table. A view is
/// `[input, random symbol, history..]`: the input label (omitted for
/// Charlie), the random symbol as a decimal index, then the symbols of every
/// earlier round the party sent or received.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolJson {
    pub name: String,
    pub x: AxisJson,
    pub y: AxisJson,
    pub z: AxisJson,
    pub randomness: [usize; 3],
    pub rounds: Vec<RoundJson>,
    pub output: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designed_for: Option<DistJson>,
}

enum Slot<'a> {
    Symbols(&'a Alphabet),
    Index(usize),
}

impl Slot<'_> {
    fn label(&self, v: usize) -> String {
        match self {
            Slot::Symbols(a) => a.symbol(v).to_string(),
            Slot::Index(_) => v.to_string(),
        }
    }

    fn parse(&self, s: &str) -> Result<usize> {
        match self {
            Slot::Symbols(a) => lookup(a, s),
            Slot::Index(n) => match s.parse::<usize>() {
                Ok(v) if v < *n => Ok(v),
                _ => Err(Error::Argument(format!("random symbol `{s}` is not an index below {n}"))),
            },
        }
    }
}

/// What each position of a view holds for `party` before round `upto`.
fn view_slots<'a>(
    inputs: [Option<&'a Alphabet>; 3],
    randomness: [usize; 3],
    rounds: &'a [Round],
    party: Party,
    upto: usize,
) -> Vec<Slot<'a>> {
    let mut slots = Vec::new();
    if let Some(a) = inputs[party.index()] {
        slots.push(Slot::Symbols(a));
    }
    slots.push(Slot::Index(randomness[party.index()]));
    for r in &rounds[..upto] {
        if r.sender == party || r.receiver == party {
            slots.push(Slot::Symbols(&r.alphabet));
        }
    }
    slots
}

fn encode_table(map: &MessageMap, slots: &[Slot<'_>], out: &Alphabet) -> Vec<EntryJson> {
    let MessageMap::Table(t) = map else { unreachable!("tabulated maps are tables") };
    t.iter()
        .map(|(k, &m)| EntryJson {
            view: k.iter().zip(slots).map(|(&v, s)| s.label(v)).collect(),
            out: out.symbol(m).to_string(),
        })
        .collect()
}

fn decode_table(entries: &[EntryJson], slots: &[Slot<'_>], out: &Alphabet, what: &str) -> Result<MessageMap> {
    let mut t = BTreeMap::new();
    for e in entries {
        if e.view.len() != slots.len() {
            return Err(Error::Spec(format!(
                "{what}: view {:?} has {} entries, expected {}",
                e.view,
                e.view.len(),
                slots.len()
            )));
        }
        let key = e.view.iter().zip(slots).map(|(l, s)| s.parse(l)).collect::<Result<Vec<_>>>()?;
        if t.insert(key, lookup(out, &e.out)?).is_some() {
            return Err(Error::Spec(format!("{what}: view {:?} listed twice", e.view)));
        }
    }
    Ok(MessageMap::Table(t))
}

fn party(name: &str) -> Result<Party> {
    Party::from_name(name).ok_or_else(|| Error::Spec(format!("unknown party `{name}`; expected alice, bob or charlie")))
}

impl ProtocolJson {
    /// Tabulates the protocol over every input pair and random symbols.
    pub fn of(spec: &ProtocolSpec) -> Result<ProtocolJson> {
        let t = spec.tabulate()?;
        let inputs = [Some(&t.x), Some(&t.y), None];
        let rounds = t
            .rounds
            .iter()
            .enumerate()
            .map(|(i, r)| RoundJson {
                from: r.sender.name().to_string(),
                to: r.receiver.name().to_string(),
                alphabet: AxisJson::of(&r.alphabet),
                table: encode_table(&r.map, &view_slots(inputs, t.randomness, &t.rounds, r.sender, i), &r.alphabet),
            })
            .collect();
        let slots = view_slots(inputs, t.randomness, &t.rounds, Party::Charlie, t.rounds.len());
        Ok(ProtocolJson {
            name: t.name.clone(),
            x: AxisJson::of(&t.x),
            y: AxisJson::of(&t.y),
            z: AxisJson::of(&t.z),
            randomness: t.randomness,
            rounds,
            output: encode_table(&t.output, &slots, &t.z),
            designed_for: t.designed_for.as_ref().map(DistJson::of),
        })
    }

    pub fn to_spec(&self) -> Result<ProtocolSpec> {
        let (x, y, z) = (self.x.to_alphabet()?, self.y.to_alphabet()?, self.z.to_alphabet()?);
        // maps are filled in once every round alphabet is known
        let mut rounds = Vec::with_capacity(self.rounds.len());
        for r in &self.rounds {
            let map = MessageMap::Table(BTreeMap::new());
            rounds.push(Round::new(party(&r.from)?, party(&r.to)?, r.alphabet.to_alphabet()?, map));
        }
        let inputs = [Some(&x), Some(&y), None];
        let mut maps = Vec::with_capacity(rounds.len());
        for (i, (r, rj)) in rounds.iter().zip(&self.rounds).enumerate() {
            let slots = view_slots(inputs, self.randomness, &rounds, r.sender, i);
            maps.push(decode_table(&rj.table, &slots, &r.alphabet, &format!("round {i}"))?);
        }
        let slots = view_slots(inputs, self.randomness, &rounds, Party::Charlie, rounds.len());
        let output = decode_table(&self.output, &slots, &z, "output")?;
        for (r, m) in rounds.iter_mut().zip(maps) {
            r.map = m;
        }
        let spec = ProtocolSpec {
            name: self.name.clone(),
            x,
            y,
            z,
            randomness: self.randomness,
            rounds,
            output,
            designed_for: self.designed_for.as_ref().map(DistJson::to_dist).transpose()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A protocol together with the channel it should compute and, optionally,
/// the inputs to run it on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub protocol: ProtocolJson,
    pub channel: ChannelJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<DistJson>,
}

// ---------------------------------------------------------------------------
// sharing schemes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareEntryJson {
    pub secret: Vec<String>,
    /// Dealer randomness as a decimal index.
    pub r: String,
    /// `M12`, `M23`, `M31`.
    pub shares: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmssJson {
    pub name: String,
    pub x: AxisJson,
    pub y: AxisJson,
    pub z: AxisJson,
    pub dealer: usize,
    /// Share alphabets of `M12`, `M23`, `M31`.
    pub shares: Vec<AxisJson>,
    pub table: Vec<ShareEntryJson>,
}

impl CmssJson {
    pub fn of(s: &CmssSpec) -> Result<CmssJson> {
        let mut table = Vec::new();
        for x in 0..s.x.len() {
            for y in 0..s.y.len() {
                for z in 0..s.z.len() {
                    for r in 0..s.dealer {
                        let m = s.map.eval(x, y, z, r)?;
                        table.push(ShareEntryJson {
                            secret: vec![s.x.symbol(x).into(), s.y.symbol(y).into(), s.z.symbol(z).into()],
                            r: r.to_string(),
                            shares: m.iter().zip(&s.shares).map(|(&v, a)| a.symbol(v).to_string()).collect(),
                        });
                    }
                }
            }
        }
        Ok(CmssJson {
            name: s.name.clone(),
            x: AxisJson::of(&s.x),
            y: AxisJson::of(&s.y),
            z: AxisJson::of(&s.z),
            dealer: s.dealer,
            shares: s.shares.iter().map(AxisJson::of).collect(),
            table,
        })
    }

    pub fn to_spec(&self) -> Result<CmssSpec> {
        let (x, y, z) = (self.x.to_alphabet()?, self.y.to_alphabet()?, self.z.to_alphabet()?);
        let shares: [Alphabet; 3] = match &self.shares[..] {
            [a, b, c] => [a.to_alphabet()?, b.to_alphabet()?, c.to_alphabet()?],
            _ => return Err(Error::Spec(format!("a scheme has 3 share alphabets, got {}", self.shares.len()))),
        };
        let secret_axes = [&x, &y, &z];
        let mut t = BTreeMap::new();
        for e in &self.table {
            if e.secret.len() != 3 || e.shares.len() != 3 {
                return Err(Error::Spec(format!("share entry {:?} needs 3 secrets and 3 shares", e.secret)));
            }
            let mut key = e.secret.iter().zip(secret_axes).map(|(l, a)| lookup(a, l)).collect::<Result<Vec<_>>>()?;
            key.push(Slot::Index(self.dealer).parse(&e.r)?);
            let mut m = [0; 3];
            for ((dst, l), a) in m.iter_mut().zip(&e.shares).zip(&shares) {
                *dst = lookup(a, l)?;
            }
            if t.insert(key, m).is_some() {
                return Err(Error::Spec(format!("share entry {:?} r={} listed twice", e.secret, e.r)));
            }
        }
        Ok(CmssSpec { name: self.name.clone(), x, y, z, dealer: self.dealer, shares, map: ShareMap::Table(t) })
    }
}

/// A scheme and the secrets it is dealt on (three axes `X`, `Y`, `Z`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmssFile {
    pub scheme: CmssJson,
    pub secrets: DistJson,
}
