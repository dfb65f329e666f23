use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{MessageMap, Party, ProtocolSpec, Round, DEFAULT_CAP};
use crate::dist::{flatten, unflatten, Alphabet, Channel, JointDist};
use crate::error::bail;
use crate::Result;

use Party::{Alice, Bob, Charlie};

pub const BUILTIN_NAMES: [&str; 5] = ["group-add", "sum", "erasure", "remote-ot", "and"];

/// A built-in protocol, the channel it computes and its default inputs.
#[derive(Debug, Clone)]
pub struct Builtin {
    pub spec: ProtocolSpec,
    pub channel: Channel,
    pub inputs: JointDist,
}

/// Parameters shared by the built-ins; each uses the ones it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinParams {
    /// Group order for `group-add`.
    pub order: usize,
    /// Block length.
    pub n: usize,
    /// Number of strings for `remote-ot`.
    pub m: usize,
    /// `P(X = 1)` for `erasure`.
    pub p: f64,
    /// `P(Y = 1)` for `erasure`.
    pub q: f64,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams { order: 2, n: 1, m: 2, p: 0.5, q: 0.5 }
    }
}

/// Looks a built-in up by name (`controlled-erasure` and `ot` are accepted
/// as aliases).
pub fn builtin(name: &str, params: &BuiltinParams) -> Result<Builtin> {
    match name {
        "group-add" => group_add(params.order, params.n),
        "sum" => sum(params.n),
        "erasure" | "controlled-erasure" => controlled_erasure(params.p, params.q, params.n),
        "remote-ot" | "ot" => remote_ot(params.m, params.n),
        "and" => and(params.n),
        _ => bail!(Argument, "unknown built-in `{name}`; expected one of {}", BUILTIN_NAMES.join(", ")),
    }
}

fn msg(name: &str, n: usize) -> Alphabet {
    Alphabet::range(name, n)
}

fn check_size(spec: &ProtocolSpec) -> Result<()> {
    let branches = spec
        .randomness
        .iter()
        .fold((spec.x.len() * spec.y.len()) as u64, |acc, &r| acc.saturating_mul(r as u64));
    if branches > DEFAULT_CAP {
        bail!(Capacity, "`{}` needs {branches} branches, above {DEFAULT_CAP}", spec.name);
    }
    Ok(())
}

/// Lifts a single-copy built-in to block length `n`.
fn block(b: Builtin, n: usize) -> Result<Builtin> {
    if n == 0 {
        bail!(Argument, "block length must be at least 1");
    }
    if n == 1 {
        check_size(&b.spec)?;
        return Ok(b);
    }
    let spec = b.spec.repeat(n)?;
    check_size(&spec)?;
    Ok(Builtin { spec, channel: b.channel.power(n)?, inputs: b.inputs.iid(n)? })
}

fn uniform_inputs(x: &Alphabet, y: &Alphabet) -> JointDist {
    JointDist::uniform(vec![x.clone(), y.clone()])
}

/// Addition in the cyclic group of order `k`: Charlie's key travels to Bob,
/// Bob adds `Y` and passes it to Alice, Alice adds `X` and hands the sum to
/// Charlie, who removes the key.
pub fn group_add(k: usize, n: usize) -> Result<Builtin> {
    if k < 2 {
        bail!(Argument, "group order must be at least 2");
    }
    let (x, y, z) = (Alphabet::range("X", k), Alphabet::range("Y", k), Alphabet::range("Z", k));
    let spec = ProtocolSpec {
        name: format!("group-add-{k}"),
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        randomness: [1, 1, k],
        rounds: vec![
            Round::new(Charlie, Bob, msg("M32", k), MessageMap::func(|v| v.rand)),
            Round::new(Bob, Alice, msg("M21", k), MessageMap::func(move |v| (v.input.unwrap() + v.history[0]) % k)),
            Round::new(Alice, Charlie, msg("M13", k), MessageMap::func(move |v| (v.input.unwrap() + v.history[0]) % k)),
        ],
        output: MessageMap::func(move |v| (v.history[1] + k - v.rand) % k),
        designed_for: None,
    };
    let channel = Channel::deterministic(x.clone(), y.clone(), z, |a, b| (a + b) % k)?;
    block(Builtin { inputs: uniform_inputs(&x, &y), spec, channel }, n)
}

/// Integer sum of two bits, computed modulo 3 behind Charlie's key.
pub fn sum(n: usize) -> Result<Builtin> {
    let (x, y, z) = (Alphabet::range("X", 2), Alphabet::range("Y", 2), Alphabet::range("Z", 3));
    let spec = ProtocolSpec {
        name: String::from("sum"),
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        randomness: [1, 1, 3],
        rounds: vec![
            Round::new(Charlie, Alice, msg("M31", 3), MessageMap::func(|v| v.rand)),
            Round::new(Alice, Bob, msg("M12", 3), MessageMap::func(|v| (v.history[0] + v.input.unwrap()) % 3)),
            Round::new(Bob, Charlie, msg("M23", 3), MessageMap::func(|v| (v.history[0] + v.input.unwrap()) % 3)),
        ],
        output: MessageMap::func(|v| (v.history[1] + 3 - v.rand) % 3),
        designed_for: None,
    };
    let channel = Channel::deterministic(x.clone(), y.clone(), z, |a, b| a + b)?;
    block(Builtin { inputs: uniform_inputs(&x, &y), spec, channel }, n)
}

/// `Z = e` when `X = 0`, else `Z = Y`. Bob pads `Y` with a key bit he shares
/// with Alice; Alice tells Charlie `X` and, only when `X = 1`, the key bit.
/// Alice's message is a null-padded symbol whose expected length comes from
/// Huffman coding.
pub fn controlled_erasure(p: f64, q: f64, n: usize) -> Result<Builtin> {
    if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
        bail!(Argument, "erasure parameters must lie strictly between 0 and 1");
    }
    let (x, y) = (Alphabet::range("X", 2), Alphabet::range("Y", 2));
    let z = Alphabet::new("Z", ["e", "0", "1"])?;
    let spec = ProtocolSpec {
        name: String::from("controlled-erasure"),
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        randomness: [1, 2, 1],
        rounds: vec![
            Round::new(Bob, Alice, msg("M21", 2), MessageMap::func(|v| v.rand)),
            Round::new(Bob, Charlie, msg("M23", 2), MessageMap::func(|v| v.input.unwrap() ^ v.rand)),
            Round::new(
                Alice,
                Charlie,
                Alphabet::new("M13", ["0", "1.0", "1.1"])?,
                MessageMap::func(|v| if v.input == Some(0) { 0 } else { 1 + v.history[0] }),
            ),
        ],
        // Charlie's history is [M23, M13]
        output: MessageMap::func(|v| match v.history[1] {
            0 => 0,
            k => 1 + (v.history[0] ^ (k - 1)),
        }),
        designed_for: None,
    };
    let channel = Channel::deterministic(x.clone(), y.clone(), z, |a, b| if a == 0 { 0 } else { 1 + b })?;
    let inputs = JointDist::bernoulli("X", p)?.product(&JointDist::bernoulli("Y", q)?);
    block(Builtin { inputs, spec, channel }, n)
}

/// Remote 1-out-of-`m` oblivious transfer of `n`-bit strings: Alice holds
/// `m` strings, Bob an index, Charlie learns the chosen string. Alice shares
/// `m` pads and a rotation with Bob, sends Charlie the rotated padded
/// strings, and Bob sends Charlie the rotated index with the matching pad.
pub fn remote_ot(m: usize, n: usize) -> Result<Builtin> {
    if m < 2 || n == 0 {
        bail!(Argument, "remote OT needs m >= 2 and n >= 1");
    }
    if n * m > 20 {
        bail!(Capacity, "remote OT with {m} strings of {n} bits is too large to enumerate");
    }
    let s = 1usize << n;
    let strings = vec![s; m];
    let xs = s.pow(m as u32);
    let x = Alphabet::range("", s).power(m)?.renamed("X");
    let y = Alphabet::range("Y", m);
    let z = Alphabet::range("Z", s);
    let pad_and_rot = xs * m;
    let (st1, st2, st3) = (strings.clone(), strings.clone(), strings.clone());
    let spec = ProtocolSpec {
        name: format!("remote-ot-{m}"),
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        // pads K_0..K_{m-1} and rotation π, encoded as flatten(K) * m + π
        randomness: [pad_and_rot, 1, 1],
        rounds: vec![
            Round::new(Alice, Bob, msg("M12", pad_and_rot), MessageMap::func(|v| v.rand)),
            Round::new(
                Alice,
                Charlie,
                msg("M13", xs),
                MessageMap::func(move |v| {
                    let (keys, pi) = (unflatten(v.rand / m, &st1), v.rand % m);
                    let xs = unflatten(v.input.unwrap(), &st1);
                    let out: Vec<usize> = (0..m).map(|i| xs[(pi + i) % m] ^ keys[(pi + i) % m]).collect();
                    flatten(&out, &st1)
                }),
            ),
            Round::new(
                Bob,
                Charlie,
                msg("M23", m * s),
                MessageMap::func(move |v| {
                    let r = v.history[0];
                    let (keys, pi) = (unflatten(r / m, &st2), r % m);
                    let yv = v.input.unwrap();
                    ((yv + m - pi) % m) * s + keys[yv]
                }),
            ),
        ],
        // Charlie's history is [M13, M23]
        output: MessageMap::func(move |v| {
            let (c, k) = (v.history[1] / s, v.history[1] % s);
            unflatten(v.history[0], &st3)[c] ^ k
        }),
        designed_for: None,
    };
    let channel = Channel::deterministic(x.clone(), y.clone(), z, |a, b| unflatten(a, &strings)[b])?;
    let b = Builtin { inputs: uniform_inputs(&x, &y), spec, channel };
    check_size(&b.spec)?;
    Ok(b)
}

/// Permutations of `{0, 1, 2}` in lexicographic order.
const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// AND of two bits. Alice shares a random permutation `(α, β, γ)` of
/// `{0,1,2}` with Bob; Alice sends `α` or `β`, Bob `α` or `γ`, and Charlie
/// outputs 1 on a match.
pub fn and(n: usize) -> Result<Builtin> {
    let (x, y, z) = (Alphabet::range("X", 2), Alphabet::range("Y", 2), Alphabet::range("Z", 2));
    let perm_labels = PERMS.map(|p| format!("{}{}{}", p[0], p[1], p[2]));
    let spec = ProtocolSpec {
        name: String::from("and"),
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        randomness: [6, 1, 1],
        rounds: vec![
            Round::new(Alice, Bob, Alphabet::new("M12", perm_labels)?, MessageMap::func(|v| v.rand)),
            Round::new(
                Alice,
                Charlie,
                msg("M13", 3),
                MessageMap::func(|v| {
                    let [a, b, _] = PERMS[v.rand];
                    if v.input == Some(1) { a } else { b }
                }),
            ),
            Round::new(
                Bob,
                Charlie,
                msg("M23", 3),
                MessageMap::func(|v| {
                    let [a, _, c] = PERMS[v.history[0]];
                    if v.input == Some(1) { a } else { c }
                }),
            ),
        ],
        output: MessageMap::func(|v| usize::from(v.history[0] == v.history[1])),
        designed_for: None,
    };
    let channel = Channel::deterministic(x.clone(), y.clone(), z, |a, b| a & b)?;
    block(Builtin { inputs: uniform_inputs(&x, &y), spec, channel }, n)
}
