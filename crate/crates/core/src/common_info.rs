//! Gács-Körner common part, residual information and a brute-force
//! cross-check of the latter.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{plogp, Alphabet, JointDist};
use crate::error::bail;
use crate::union_find::UnionFind;
use crate::{Result, SUPPORT_EPS};

/// Largest support (per side) the oracle will enumerate.
pub const ORACLE_MAX_SUPPORT: usize = 12;

/// The common part `U⊓V` of a two-axis joint: connected components of the
/// bipartite support graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonPart {
    /// Block of each `u` symbol; `None` for zero-marginal symbols.
    pub block_of_u: Vec<Option<usize>>,
    /// Block of each `v` symbol; `None` for zero-marginal symbols.
    pub block_of_v: Vec<Option<usize>>,
    /// Distribution of the block label.
    pub block_dist: JointDist,
}

impl CommonPart {
    pub fn blocks(&self) -> usize {
        self.block_dist.axes()[0].len()
    }

    /// `H(U⊓V)`.
    pub fn entropy(&self) -> f64 {
        self.block_dist.iter().map(|(_, p)| plogp(p)).sum()
    }
}

fn require_pair(d: &JointDist) -> Result<()> {
    if d.arity() != 2 {
        bail!(Argument, "expected a two-axis joint, got {} axes", d.arity());
    }
    Ok(())
}

/// Computes `U⊓V` for a joint over `(U, V)`.
pub fn common_part(d: &JointDist) -> Result<CommonPart> {
    require_pair(d)?;
    let nu = d.axes()[0].len();
    let nv = d.axes()[1].len();
    // nodes 0..nu are u symbols, nu.. are v symbols
    let mut uf = UnionFind::new(nu + nv);
    let mut present = vec![false; nu + nv];
    for (t, p) in d.iter() {
        if p > SUPPORT_EPS {
            present[t[0]] = true;
            present[nu + t[1]] = true;
            uf.union(t[0], nu + t[1]);
        }
    }
    let (labels, count) = uf.labels(&present);
    let mut mass = vec![0.0; count.max(1)];
    for (t, p) in d.iter() {
        if p > SUPPORT_EPS {
            mass[labels[t[0]].expect("support symbol is labelled")] += p;
        }
    }
    let total: f64 = mass.iter().sum();
    let block_dist = JointDist::from_probs(
        Alphabet::range("common", mass.len()),
        &mass.iter().map(|m| m / total).collect::<Vec<_>>(),
    )?;
    Ok(CommonPart {
        block_of_u: labels[..nu].to_vec(),
        block_of_v: labels[nu..].to_vec(),
        block_dist,
    })
}

/// `RI(U;V) = I(U;V) - H(U⊓V)`, clamped at zero.
pub fn residual_info(d: &JointDist) -> Result<f64> {
    let cp = common_part(d)?;
    let i = d.mutual_info(&[0], &[1])?;
    Ok((i - cp.entropy()).max(0.0))
}

/// Collapses two disjoint groups of axes of `d` into a two-axis joint whose
/// symbols are the observed tuples of each group.
pub fn pair_view(d: &JointDist, a: &[usize], b: &[usize]) -> Result<JointDist> {
    let mut axes = a.to_vec();
    axes.extend_from_slice(b);
    let m = d.marginal(&axes)?;
    let mut ua: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut vb: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (t, _) in m.iter() {
        let n = ua.len();
        ua.entry(t[..a.len()].to_vec()).or_insert(n);
        let n = vb.len();
        vb.entry(t[a.len()..].to_vec()).or_insert(n);
    }
    let name = |idx: &[usize]| {
        idx.iter()
            .map(|&i| String::from(d.axes()[i].name()))
            .collect::<Vec<_>>()
            .join(",")
    };
    let entries = m
        .iter()
        .map(|(t, p)| (vec![ua[&t[..a.len()]], vb[&t[a.len()..]]], p))
        .collect::<Vec<_>>();
    JointDist::new(
        vec![Alphabet::range(name(a), ua.len()), Alphabet::range(name(b), vb.len())],
        entries,
    )
}

/// `RI` between two groups of axes of a larger joint.
pub fn residual_info_between(d: &JointDist, a: &[usize], b: &[usize]) -> Result<f64> {
    residual_info(&pair_view(d, a, b)?)
}

/// `RI(U;V)` as `min I(U;V|Q)` over every `Q` that is simultaneously a
/// function of `U` and of `V` on the support. Exponential in the support size.
pub fn residual_info_oracle(d: &JointDist) -> Result<f64> {
    require_pair(d)?;
    let pu = d.marginal_probs(0);
    let pv = d.marginal_probs(1);
    let us: Vec<usize> = (0..pu.len()).filter(|&u| pu[u] > SUPPORT_EPS).collect();
    let vs: Vec<usize> = (0..pv.len()).filter(|&v| pv[v] > SUPPORT_EPS).collect();
    if us.len() > ORACLE_MAX_SUPPORT || vs.len() > ORACLE_MAX_SUPPORT {
        return Err(crate::Error::Capacity(format!(
            "oracle limited to {ORACLE_MAX_SUPPORT} support symbols per side, got {}x{}",
            us.len(),
            vs.len()
        )));
    }
    let (nu, nv) = (us.len(), vs.len());
    let mut p = vec![vec![0.0; nv]; nu];
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            let q = d.prob(&[u, v]);
            if q > SUPPORT_EPS {
                p[i][j] = q;
            }
        }
    }
    // neighbours of each v among earlier-indexed u's, for pruning
    let neigh: Vec<Vec<usize>> = (0..nv)
        .map(|j| (0..nu).filter(|&i| p[i][j] > 0.0).collect())
        .collect();

    let mut best = f64::INFINITY;
    let mut block = vec![0usize; nu];
    search(0, 0, &mut block, &p, &neigh, &mut best);
    Ok(best.max(0.0))
}

/// Enumerates restricted-growth strings over the u-support, skipping any
/// partition under which some `v` would need two different `Q` values.
fn search(
    i: usize,
    used: usize,
    block: &mut [usize],
    p: &[Vec<f64>],
    neigh: &[Vec<usize>],
    best: &mut f64,
) {
    let nu = block.len();
    if i == nu {
        let v = cond_mi_given_blocks(p, block, used);
        if v < *best {
            *best = v;
        }
        return;
    }
    for b in 0..=used {
        block[i] = b;
        let consistent = neigh.iter().all(|ns| {
            if !ns.contains(&i) {
                return true;
            }
            ns.iter().filter(|&&k| k < i).all(|&k| block[k] == b)
        });
        if consistent {
            search(i + 1, used.max(b + 1), block, p, neigh, best);
        }
    }
}

/// `I(U;V|Q) = sum_q p(q) I(U;V | Q = q)` where `Q` is the block of `u`.
fn cond_mi_given_blocks(p: &[Vec<f64>], block: &[usize], blocks: usize) -> f64 {
    let nv = p.first().map_or(0, Vec::len);
    let mut total = 0.0;
    for q in 0..blocks {
        let rows: Vec<usize> = (0..block.len()).filter(|&i| block[i] == q).collect();
        let pq: f64 = rows.iter().map(|&i| p[i].iter().sum::<f64>()).sum();
        if pq <= 0.0 {
            continue;
        }
        let mut mi = 0.0;
        for &i in &rows {
            let pu: f64 = p[i].iter().sum::<f64>() / pq;
            for j in 0..nv {
                let puv = p[i][j] / pq;
                if puv > 0.0 {
                    let pv: f64 = rows.iter().map(|&k| p[k][j]).sum::<f64>() / pq;
                    mi += puv * libm::log2(puv / (pu * pv));
                }
            }
        }
        total += pq * mi;
    }
    total
}
