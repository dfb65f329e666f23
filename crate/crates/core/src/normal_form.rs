//! Normal-form reductions and the connectivity conditions on channels.
//!
//! Three reductions are provided: for a channel alone (exact equivalence of
//! input rows, proportional output columns), for an input distribution paired
//! with a channel (equivalence checked only on the support), and for a
//! three-way sampling joint (proportional slices). Every reduction returns the
//! merge maps from original to reduced symbol indices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{Alphabet, Channel, JointDist};
use crate::error::bail;
use crate::union_find::UnionFind;
use crate::{Result, SUPPORT_EPS};

/// Relative tolerance when comparing ratios for proportionality.
pub const RATIO_TOL: f64 = 1e-9;
/// Absolute tolerance when comparing kernel rows for equality.
pub const ROW_TOL: f64 = 1e-9;

/// A reduced object plus the maps taking each original symbol to its
/// reduced index. `None` marks a symbol that was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm<T> {
    pub reduced: T,
    pub x_merge: Vec<Option<usize>>,
    pub y_merge: Vec<Option<usize>>,
    pub z_merge: Vec<Option<usize>>,
    /// Reduced alphabets for `X`, `Y`, `Z`.
    pub alphabets: [Alphabet; 3],
}

impl<T> NormalForm<T> {
    /// True when nothing was merged or dropped.
    pub fn is_identity(&self) -> bool {
        [&self.x_merge, &self.y_merge, &self.z_merge]
            .iter()
            .all(|m| m.iter().enumerate().all(|(i, &t)| t == Some(i)))
            && self.alphabets.iter().zip([&self.x_merge, &self.y_merge, &self.z_merge]).all(|(a, m)| a.len() == m.len())
    }

    /// Original `Z` indices that were dropped.
    pub fn dropped_z(&self) -> Vec<usize> {
        (0..self.z_merge.len()).filter(|&i| self.z_merge[i].is_none()).collect()
    }

    /// Pushes a joint over the original `(X, Y, Z)` alphabets through the
    /// merge maps.
    pub fn push_forward(&self, d: &JointDist) -> Result<JointDist> {
        if d.arity() != 3 {
            bail!(Argument, "push_forward needs a three-axis joint");
        }
        let d = d.map_axis(0, self.alphabets[0].clone(), &self.x_merge)?;
        let d = d.map_axis(1, self.alphabets[1].clone(), &self.y_merge)?;
        d.map_axis(2, self.alphabets[2].clone(), &self.z_merge)
    }
}

/// Tracks one axis while symbols are merged and dropped.
struct AxisState {
    name: String,
    map: Vec<Option<usize>>,
    labels: Vec<String>,
}

impl AxisState {
    fn new(a: &Alphabet) -> Self {
        AxisState {
            name: a.name().into(),
            map: (0..a.len()).map(Some).collect(),
            labels: a.symbols().to_vec(),
        }
    }

    /// `groups` partitions the kept current indices; each group becomes one
    /// new symbol, labelled by its lexicographically smallest member.
    fn regroup(&mut self, groups: &[Vec<usize>]) {
        let mut to = vec![None; self.labels.len()];
        let mut labels = Vec::with_capacity(groups.len());
        for (g, members) in groups.iter().enumerate() {
            for &m in members {
                to[m] = Some(g);
            }
            let rep = members.iter().map(|&m| &self.labels[m]).min().expect("non-empty group");
            labels.push(rep.clone());
        }
        for m in self.map.iter_mut() {
            *m = m.and_then(|c| to[c]);
        }
        self.labels = labels;
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.name.clone(), self.labels.clone()).expect("representatives are distinct")
    }
}

/// Groups indices `0..n` into classes of `same`, greedily against the first
/// member of each class, in index order.
fn classes(n: usize, keep: impl Fn(usize) -> bool, same: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in (0..n).filter(|&i| keep(i)) {
        match out.iter_mut().find(|c| same(c[0], i)) {
            Some(c) => c.push(i),
            None => out.push(vec![i]),
        }
    }
    out
}

/// `a = c b` for some `c > 0`, with equal zero patterns.
pub(crate) fn proportional(a: &[f64], b: &[f64]) -> bool {
    let mut ratio: Option<f64> = None;
    for (&u, &v) in a.iter().zip(b) {
        let (zu, zv) = (u <= SUPPORT_EPS, v <= SUPPORT_EPS);
        if zu != zv {
            return false;
        }
        if zu {
            continue;
        }
        let r = u / v;
        match ratio {
            None => ratio = Some(r),
            Some(c) if (r - c).abs() <= RATIO_TOL * c.abs().max(r.abs()) => {}
            Some(_) => return false,
        }
    }
    true
}

/// Dense `(x, y, z)` kernel being reduced.
struct Kernel {
    nx: usize,
    ny: usize,
    nz: usize,
    k: Vec<f64>,
}

impl Kernel {
    fn from_channel(ch: &Channel) -> Self {
        let (nx, ny, nz) = ch.dims();
        Kernel { nx, ny, nz, k: ch.kernel().to_vec() }
    }

    fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.k[(x * self.ny + y) * self.nz + z]
    }

    fn row(&self, x: usize, y: usize) -> &[f64] {
        let i = (x * self.ny + y) * self.nz;
        &self.k[i..i + self.nz]
    }

    fn z_column(&self, z: usize, on: impl Fn(usize, usize) -> bool) -> Vec<f64> {
        let mut v = Vec::new();
        for x in 0..self.nx {
            for y in 0..self.ny {
                if on(x, y) {
                    v.push(self.at(x, y, z));
                }
            }
        }
        v
    }

    /// Rebuilds with new index sets; `pick(x, y)` gives the source row for a
    /// merged `(x, y)`, and output groups add up.
    fn rebuild(
        &self,
        xs: usize,
        ys: usize,
        pick: impl Fn(usize, usize) -> (usize, usize),
        zgroups: &[Vec<usize>],
    ) -> Kernel {
        let nz = zgroups.len();
        let mut k = Vec::with_capacity(xs * ys * nz);
        for x in 0..xs {
            for y in 0..ys {
                let (sx, sy) = pick(x, y);
                for g in zgroups {
                    k.push(g.iter().map(|&z| self.at(sx, sy, z)).sum());
                }
            }
        }
        Kernel { nx: xs, ny: ys, nz, k }
    }

    fn to_channel(&self, x: Alphabet, y: Alphabet, z: Alphabet) -> Result<Channel> {
        let rows = (0..self.nx)
            .flat_map(|a| (0..self.ny).map(move |b| (a, b)))
            .map(|(a, b)| {
                let r = self.row(a, b);
                let s: f64 = r.iter().sum();
                if s > 0.0 {
                    r.iter().map(|p| p / s).collect()
                } else {
                    vec![1.0 / self.nz as f64; self.nz]
                }
            })
            .collect();
        Channel::new(x, y, z, rows)
    }
}

fn rows_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= ROW_TOL)
}

/// Reduces a channel to normal form: equal input rows merge, proportional
/// output columns merge (their masses add), never-produced outputs are
/// dropped. Repeats until nothing changes.
pub fn channel_normal_form(ch: &Channel) -> NormalForm<Channel> {
    let mut ax = [AxisState::new(ch.x()), AxisState::new(ch.y()), AxisState::new(ch.z())];
    let mut k = Kernel::from_channel(ch);
    loop {
        let zg = classes(
            k.nz,
            |z| k.z_column(z, |_, _| true).iter().any(|&p| p > SUPPORT_EPS),
            |a, b| proportional(&k.z_column(a, |_, _| true), &k.z_column(b, |_, _| true)),
        );
        let xg = classes(k.nx, |_| true, |a, b| (0..k.ny).all(|y| rows_equal(k.row(a, y), k.row(b, y))));
        let yg = classes(k.ny, |_| true, |a, b| (0..k.nx).all(|x| rows_equal(k.row(x, a), k.row(x, b))));
        if zg.len() == k.nz && xg.len() == k.nx && yg.len() == k.ny {
            break;
        }
        k = k.rebuild(xg.len(), yg.len(), |x, y| (xg[x][0], yg[y][0]), &zg);
        ax[0].regroup(&xg);
        ax[1].regroup(&yg);
        ax[2].regroup(&zg);
    }
    let alphabets = [ax[0].alphabet(), ax[1].alphabet(), ax[2].alphabet()];
    let reduced = k
        .to_channel(alphabets[0].clone(), alphabets[1].clone(), alphabets[2].clone())
        .expect("reduced kernel is stochastic");
    let [x, y, z] = ax;
    NormalForm { reduced, x_merge: x.map, y_merge: y.map, z_merge: z.map, alphabets }
}

/// Reduces `(p_xy, ch)` to pair normal form.
///
/// Inputs are merged one pair at a time (lowest indices first) while any two
/// agree on every `y` both can occur with; the merged row takes the first
/// symbol's row wherever that symbol has mass. Outputs with zero mass on the
/// input support are dropped, then outputs proportional on the support merge.
pub fn pair_normal_form(p_xy: &JointDist, ch: &Channel) -> Result<NormalForm<(JointDist, Channel)>> {
    if p_xy.arity() != 2 || !p_xy.axes()[0].same_symbols(ch.x()) || !p_xy.axes()[1].same_symbols(ch.y()) {
        bail!(Argument, "input distribution alphabets do not match the channel inputs");
    }
    let mut ax = [AxisState::new(ch.x()), AxisState::new(ch.y()), AxisState::new(ch.z())];
    let mut k = Kernel::from_channel(ch);
    let (nx0, ny0) = (k.nx, k.ny);
    let mut p: Vec<Vec<f64>> = (0..nx0).map(|x| (0..ny0).map(|y| p_xy.prob(&[x, y])).collect()).collect();
    let on = |p: &Vec<Vec<f64>>, x: usize, y: usize| p[x][y] > SUPPORT_EPS;

    loop {
        let mut changed = false;
        // inputs on Alice's side
        'x: loop {
            for i in 0..k.nx {
                for j in i + 1..k.nx {
                    let equiv = (0..k.ny)
                        .filter(|&y| on(&p, i, y) && on(&p, j, y))
                        .all(|y| rows_equal(k.row(i, y), k.row(j, y)));
                    if equiv {
                        let groups: Vec<Vec<usize>> = (0..k.nx)
                            .filter(|&x| x != j)
                            .map(|x| if x == i { vec![i, j] } else { vec![x] })
                            .collect();
                        let src = |x: usize, y: usize| {
                            let g = &groups[x];
                            if g.len() == 2 && !on(&p, i, y) && on(&p, j, y) {
                                (j, y)
                            } else {
                                (g[0], y)
                            }
                        };
                        let zg: Vec<Vec<usize>> = (0..k.nz).map(|z| vec![z]).collect();
                        k = k.rebuild(groups.len(), k.ny, src, &zg);
                        let pj = p.remove(j);
                        for (a, b) in p[i].iter_mut().zip(pj) {
                            *a += b;
                        }
                        ax[0].regroup(&groups);
                        changed = true;
                        continue 'x;
                    }
                }
            }
            break;
        }
        // inputs on Bob's side
        'y: loop {
            for i in 0..k.ny {
                for j in i + 1..k.ny {
                    let equiv = (0..k.nx)
                        .filter(|&x| on(&p, x, i) && on(&p, x, j))
                        .all(|x| rows_equal(k.row(x, i), k.row(x, j)));
                    if equiv {
                        let groups: Vec<Vec<usize>> = (0..k.ny)
                            .filter(|&y| y != j)
                            .map(|y| if y == i { vec![i, j] } else { vec![y] })
                            .collect();
                        let src = |x: usize, y: usize| {
                            let g = &groups[y];
                            if g.len() == 2 && !on(&p, x, i) && on(&p, x, j) {
                                (x, j)
                            } else {
                                (x, g[0])
                            }
                        };
                        let zg: Vec<Vec<usize>> = (0..k.nz).map(|z| vec![z]).collect();
                        k = k.rebuild(k.nx, groups.len(), src, &zg);
                        for row in p.iter_mut() {
                            let pj = row.remove(j);
                            row[i] += pj;
                        }
                        ax[1].regroup(&groups);
                        changed = true;
                        continue 'y;
                    }
                }
            }
            break;
        }
        // outputs
        let col = |k: &Kernel, z: usize| k.z_column(z, |x, y| on(&p, x, y));
        let zg = classes(
            k.nz,
            |z| col(&k, z).iter().any(|&q| q > SUPPORT_EPS),
            |a, b| proportional(&col(&k, a), &col(&k, b)),
        );
        if zg.len() != k.nz {
            k = k.rebuild(k.nx, k.ny, |x, y| (x, y), &zg);
            ax[2].regroup(&zg);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let alphabets = [ax[0].alphabet(), ax[1].alphabet(), ax[2].alphabet()];
    let names = [p_xy.axes()[0].name(), p_xy.axes()[1].name()];
    let entries = (0..k.nx).flat_map(|x| (0..k.ny).map(move |y| (x, y))).map(|(x, y)| (vec![x, y], p[x][y]));
    let total: f64 = p.iter().flatten().sum();
    let dist = JointDist::new(
        vec![alphabets[0].renamed(names[0]), alphabets[1].renamed(names[1])],
        entries.map(|(t, q)| (t, q / total)).collect::<Vec<_>>(),
    )?;
    let chan = k.to_channel(alphabets[0].clone(), alphabets[1].clone(), alphabets[2].clone())?;
    let [x, y, z] = ax;
    Ok(NormalForm { reduced: (dist, chan), x_merge: x.map, y_merge: y.map, z_merge: z.map, alphabets })
}

/// Reduces a three-axis joint: zero-probability symbols are dropped and
/// symbols whose slices are proportional merge. Repeats until stable.
pub fn sampling_normal_form(p_xyz: &JointDist) -> Result<NormalForm<JointDist>> {
    if p_xyz.arity() != 3 {
        bail!(Argument, "sampling normal form needs a three-axis joint");
    }
    let mut ax = [
        AxisState::new(&p_xyz.axes()[0]),
        AxisState::new(&p_xyz.axes()[1]),
        AxisState::new(&p_xyz.axes()[2]),
    ];
    let mut dims = [ax[0].labels.len(), ax[1].labels.len(), ax[2].labels.len()];
    let mut t = p_xyz.to_dense();
    loop {
        let mut changed = false;
        for axis in 0..3 {
            let slice = |t: &[f64], dims: &[usize; 3], s: usize| -> Vec<f64> {
                let mut v = Vec::new();
                for a in 0..dims[0] {
                    for b in 0..dims[1] {
                        for c in 0..dims[2] {
                            if [a, b, c][axis] == s {
                                v.push(t[(a * dims[1] + b) * dims[2] + c]);
                            }
                        }
                    }
                }
                v
            };
            let groups = classes(
                dims[axis],
                |s| slice(&t, &dims, s).iter().any(|&q| q > SUPPORT_EPS),
                |a, b| proportional(&slice(&t, &dims, a), &slice(&t, &dims, b)),
            );
            if groups.len() == dims[axis] {
                continue;
            }
            let mut to = vec![None; dims[axis]];
            for (g, members) in groups.iter().enumerate() {
                for &m in members {
                    to[m] = Some(g);
                }
            }
            let mut nd = dims;
            nd[axis] = groups.len();
            let mut nt = vec![0.0; nd.iter().product()];
            for a in 0..dims[0] {
                for b in 0..dims[1] {
                    for c in 0..dims[2] {
                        let mut idx = [a, b, c];
                        if let Some(g) = to[idx[axis]] {
                            idx[axis] = g;
                            nt[(idx[0] * nd[1] + idx[1]) * nd[2] + idx[2]] += t[(a * dims[1] + b) * dims[2] + c];
                        }
                    }
                }
            }
            t = nt;
            dims = nd;
            ax[axis].regroup(&groups);
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let alphabets = [ax[0].alphabet(), ax[1].alphabet(), ax[2].alphabet()];
    let total: f64 = t.iter().sum();
    let reduced = JointDist::from_dense(alphabets.to_vec(), &t.iter().map(|q| q / total).collect::<Vec<_>>())?;
    let [x, y, z] = ax;
    Ok(NormalForm { reduced, x_merge: x.map, y_merge: y.map, z_merge: z.map, alphabets })
}

/// Whether the bipartite support graph of a two-axis joint is connected,
/// ignoring symbols of zero marginal.
pub fn bigraph_connected(p_xy: &JointDist) -> Result<bool> {
    if p_xy.arity() != 2 {
        bail!(Argument, "expected a two-axis joint");
    }
    let nx = p_xy.axes()[0].len();
    let ny = p_xy.axes()[1].len();
    let mut uf = UnionFind::new(nx + ny);
    let mut present = vec![false; nx + ny];
    for (t, p) in p_xy.iter() {
        if p > SUPPORT_EPS {
            present[t[0]] = true;
            present[nx + t[1]] = true;
            uf.union(t[0], nx + t[1]);
        }
    }
    Ok(uf.labels(&present).1 <= 1)
}

/// Inputs on one side are linked when some output is reachable from both;
/// the condition holds when this graph is connected.
fn reachability_connected(ch: &Channel, alice_side: bool) -> bool {
    let (nx, ny, nz) = ch.dims();
    let n = if alice_side { nx } else { ny };
    let mut uf = UnionFind::new(n);
    for z in 0..nz {
        let mut first: Option<usize> = None;
        for s in 0..n {
            let reach = if alice_side {
                (0..ny).any(|y| ch.prob(z, s, y) > SUPPORT_EPS)
            } else {
                (0..nx).any(|x| ch.prob(z, x, s) > SUPPORT_EPS)
            };
            if reach {
                match first {
                    None => first = Some(s),
                    Some(f) => uf.union(f, s),
                }
            }
        }
    }
    uf.labels(&vec![true; n]).1 == 1
}

/// No partition of Alice's inputs into two non-empty sets with disjoint
/// reachable outputs.
pub fn check_condition1(ch: &Channel) -> bool {
    reachability_connected(ch, true)
}

/// No partition of Bob's inputs into two non-empty sets with disjoint
/// reachable outputs.
pub fn check_condition2(ch: &Channel) -> bool {
    reachability_connected(ch, false)
}
