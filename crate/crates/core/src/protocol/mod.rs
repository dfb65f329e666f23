//! Three-party protocols with a static round schedule: description, exact
//! execution by enumeration, security checks and the built-in protocols.
//!
//! Each party draws one uniform random symbol up front. A round is a message
//! from one party to another, computed deterministically from the sender's
//! view: its input (none for Charlie), its random symbol and every symbol it
//! has sent or received so far, in schedule order.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bounds::Link;
use crate::dist::{flatten, unflatten, Alphabet, JointDist};
use crate::error::bail;
use crate::Result;

mod builtins;
mod huffman;
mod run;
mod verify;

pub use builtins::{
    and, builtin, controlled_erasure, group_add, remote_ot, sum, Builtin, BuiltinParams, BUILTIN_NAMES,
};
pub use huffman::{huffman_expected_length, huffman_lengths};
pub use run::{run_exact, run_exact_capped, Execution, DEFAULT_CAP};
pub use verify::{
    cutset_checks, info_inequality_checks, privacy_checks, verify_all, verify_correctness, verify_cutset,
    verify_info_inequality, verify_privacy, verify_transcript_independence, Check, NamedCheck,
    SecurityReport, CHECK_TOL,
};

/// Axis indices of an execution joint.
pub mod axis {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const Z: usize = 2;
    pub const M12: usize = 3;
    pub const M23: usize = 4;
    pub const M31: usize = 5;

    /// Transcript axis of a link.
    pub fn of(l: crate::bounds::Link) -> usize {
        match l {
            crate::bounds::Link::L12 => M12,
            crate::bounds::Link::L23 => M23,
            crate::bounds::Link::L31 => M31,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::Alice, Party::Bob, Party::Charlie];

    /// 0, 1, 2.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
            Party::Charlie => "charlie",
        }
    }

    pub fn from_name(s: &str) -> Option<Party> {
        Party::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// The link joining two distinct parties.
pub fn link_between(a: Party, b: Party) -> Option<Link> {
    use Party::*;
    match (a, b) {
        (Alice, Bob) | (Bob, Alice) => Some(Link::L12),
        (Bob, Charlie) | (Charlie, Bob) => Some(Link::L23),
        (Charlie, Alice) | (Alice, Charlie) => Some(Link::L31),
        _ => None,
    }
}

/// What a party sees when it computes a message or its output.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    pub input: Option<usize>,
    pub rand: usize,
    /// Symbols of every earlier round the party took part in.
    pub history: &'a [usize],
}

impl View<'_> {
    /// Lookup key: `[input, rand, history..]`, the input omitted when absent.
    pub fn key(&self) -> Vec<usize> {
        let mut k = Vec::with_capacity(self.history.len() + 2);
        if let Some(x) = self.input {
            k.push(x);
        }
        k.push(self.rand);
        k.extend_from_slice(self.history);
        k
    }
}

pub type ViewFn = dyn Fn(&View<'_>) -> usize + Send + Sync;

/// A deterministic function of a view, as a lookup table or a closure.
#[derive(Clone)]
pub enum MessageMap {
    /// Keyed by [`View::key`].
    Table(BTreeMap<Vec<usize>, usize>),
    Func(Arc<ViewFn>),
}

impl fmt::Debug for MessageMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessageMap::Table(t) => f.debug_tuple("Table").field(&t.len()).finish(),
            MessageMap::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl MessageMap {
    pub fn func(f: impl Fn(&View<'_>) -> usize + Send + Sync + 'static) -> MessageMap {
        MessageMap::Func(Arc::new(f))
    }

    pub fn eval(&self, v: &View<'_>) -> Result<usize> {
        match self {
            MessageMap::Func(f) => Ok(f(v)),
            MessageMap::Table(t) => match t.get(&v.key()) {
                Some(&s) => Ok(s),
                None => bail!(Spec, "no table entry for view {:?}", v.key()),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Round {
    pub sender: Party,
    pub receiver: Party,
    pub alphabet: Alphabet,
    pub map: MessageMap,
}

impl Round {
    pub fn new(sender: Party, receiver: Party, alphabet: Alphabet, map: MessageMap) -> Round {
        Round { sender, receiver, alphabet, map }
    }

    pub fn link(&self) -> Option<Link> {
        link_between(self.sender, self.receiver)
    }
}

/// A well-formed protocol: inputs, per-party randomness, the round schedule
/// and Charlie's output map.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    pub name: String,
    pub x: Alphabet,
    pub y: Alphabet,
    pub z: Alphabet,
    /// Size of each party's uniform random symbol (1 for none).
    pub randomness: [usize; 3],
    pub rounds: Vec<Round>,
    /// Charlie's output, a function of his view with `input: None`.
    pub output: MessageMap,
    /// Input distribution the protocol was tailored to, if any.
    pub designed_for: Option<JointDist>,
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<()> {
        if self.randomness.contains(&0) {
            bail!(Spec, "randomness alphabets must be non-empty");
        }
        for (i, r) in self.rounds.iter().enumerate() {
            if r.sender == r.receiver {
                bail!(Spec, "round {i}: {} sends to itself", r.sender.name());
            }
        }
        Ok(())
    }

    pub fn input_of(&self, p: Party) -> Option<&Alphabet> {
        match p {
            Party::Alice => Some(&self.x),
            Party::Bob => Some(&self.y),
            Party::Charlie => None,
        }
    }

    /// Rounds on each link, in schedule order.
    pub fn link_rounds(&self) -> [Vec<usize>; 3] {
        let mut out: [Vec<usize>; 3] = Default::default();
        for (i, r) in self.rounds.iter().enumerate() {
            if let Some(l) = r.link() {
                out[l as usize].push(i);
            }
        }
        out
    }

    /// Alphabet sizes of the history a party has before round `upto`.
    fn history_sizes(&self, p: Party, upto: usize) -> Vec<usize> {
        self.rounds[..upto]
            .iter()
            .filter(|r| r.sender == p || r.receiver == p)
            .map(|r| r.alphabet.len())
            .collect()
    }

    /// Equivalent spec with every map replaced by a lookup table over the
    /// views reachable from some input pair and random symbols.
    pub fn tabulate(&self) -> Result<ProtocolSpec> {
        self.validate()?;
        let mut tables: Vec<BTreeMap<Vec<usize>, usize>> = vec![BTreeMap::new(); self.rounds.len()];
        let mut out_table = BTreeMap::new();
        let [r1, r2, r3] = self.randomness;
        let branches = (self.x.len() * self.y.len()) as u64 * (r1 * r2 * r3) as u64;
        if branches > DEFAULT_CAP {
            bail!(Capacity, "tabulating {branches} branches exceeds {DEFAULT_CAP}");
        }
        for x in 0..self.x.len() {
            for y in 0..self.y.len() {
                for rand in run::rand_tuples(self.randomness) {
                    let hist = run::unroll(self, [Some(x), Some(y), None], rand, |i, v, m| {
                        tables[i].insert(v.key(), m);
                    })?;
                    let v = View { input: None, rand: rand[2], history: &hist[2] };
                    out_table.insert(v.key(), self.output.eval(&v)?);
                }
            }
        }
        let mut spec = self.clone();
        for (r, t) in spec.rounds.iter_mut().zip(tables) {
            r.map = MessageMap::Table(t);
        }
        spec.output = MessageMap::Table(out_table);
        Ok(spec)
    }

    /// `n` independent copies run in lockstep on tuple alphabets: every input,
    /// random symbol and message is an `n`-tuple, and each map acts
    /// coordinate-wise.
    pub fn repeat(&self, n: usize) -> Result<ProtocolSpec> {
        self.validate()?;
        if n == 1 {
            return Ok(self.clone());
        }
        let mut randomness = [0; 3];
        for (dst, &r) in randomness.iter_mut().zip(&self.randomness) {
            *dst = r
                .checked_pow(n as u32)
                .filter(|&v| v as u64 <= DEFAULT_CAP)
                .ok_or_else(|| crate::Error::Capacity(alloc::format!("randomness {r}^{n}")))?;
        }
        let mut rounds = Vec::with_capacity(self.rounds.len());
        for (i, r) in self.rounds.iter().enumerate() {
            let input = self.input_of(r.sender).map(Alphabet::len);
            let lifted = lift(
                r.map.clone(),
                n,
                input,
                self.randomness[r.sender.index()],
                self.history_sizes(r.sender, i),
                r.alphabet.len(),
            );
            rounds.push(Round::new(r.sender, r.receiver, r.alphabet.power(n)?, lifted));
        }
        let output = lift(
            self.output.clone(),
            n,
            None,
            self.randomness[2],
            self.history_sizes(Party::Charlie, self.rounds.len()),
            self.z.len(),
        );
        Ok(ProtocolSpec {
            name: alloc::format!("{}^{n}", self.name),
            x: self.x.power(n)?,
            y: self.y.power(n)?,
            z: self.z.power(n)?,
            randomness,
            rounds,
            output,
            designed_for: match &self.designed_for {
                Some(d) => Some(d.iid(n)?),
                None => None,
            },
        })
    }
}

/// Applies a single-copy map to each coordinate of a tuple-valued view.
fn lift(
    map: MessageMap,
    n: usize,
    input: Option<usize>,
    rand: usize,
    hist: Vec<usize>,
    out: usize,
) -> MessageMap {
    MessageMap::func(move |v| {
        let xs = v.input.zip(input).map(|(x, k)| unflatten(x, &vec![k; n]));
        let rs = unflatten(v.rand, &vec![rand; n]);
        let hs: Vec<Vec<usize>> = v.history.iter().zip(&hist).map(|(&h, &k)| unflatten(h, &vec![k; n])).collect();
        let mut outs = Vec::with_capacity(n);
        let mut h1 = vec![0; hs.len()];
        for c in 0..n {
            for (dst, h) in h1.iter_mut().zip(&hs) {
                *dst = h[c];
            }
            let view = View { input: xs.as_ref().map(|x| x[c]), rand: rs[c], history: &h1 };
            // an unknown view in a table has no valid coordinate value; map it
            // outside the alphabet so execution reports it
            let m = map.eval(&view).unwrap_or(out);
            if m >= out {
                return usize::MAX;
            }
            outs.push(m);
        }
        flatten(&outs, &vec![out; n])
    })
}
