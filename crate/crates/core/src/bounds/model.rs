//! Fast evaluation of the entropy and residual-information terms for many
//! input distributions over a fixed support pattern.
//!
//! Residual information jumps where the support changes: on the boundary of
//! the simplex the bipartite graph can fall apart and the common part grows.
//! Suprema over full-support distributions are therefore evaluated with the
//! common-part blocks of the full-support pattern, `RI = I - H(block)`, which
//! is the continuous extension of the interior values to the closed simplex.

use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{plogp, Channel, JointDist};
use crate::union_find::UnionFind;
use crate::SUPPORT_EPS;

/// A linear map from search variables to a dense `(x, y, z)` joint, plus the
/// common-part blocks of its full-support pattern.
#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// `(variable, cell, coefficient)`; cell is `(x * ny + y) * nz + z`.
    map: Vec<(usize, usize, f64)>,
    pub nvars: usize,
    xz_block: Vec<usize>,
    yz_block: Vec<usize>,
    xy_block: Vec<usize>,
}

/// Entropies of one evaluated joint.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Stats {
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
    pub hxy: f64,
    pub hxz: f64,
    pub hyz: f64,
    pub hxyz: f64,
    /// `H` of the `X⊓Z` block label.
    pub hb_xz: f64,
    pub hb_yz: f64,
    pub hb_xy: f64,
}

impl Stats {
    pub fn ri_xz(&self) -> f64 {
        (self.hx + self.hz - self.hxz - self.hb_xz).max(0.0)
    }
    pub fn ri_yz(&self) -> f64 {
        (self.hy + self.hz - self.hyz - self.hb_yz).max(0.0)
    }
    pub fn ri_xy(&self) -> f64 {
        (self.hx + self.hy - self.hxy - self.hb_xy).max(0.0)
    }
    pub fn h_xy_given_z(&self) -> f64 {
        (self.hxyz - self.hz).max(0.0)
    }
    pub fn h_xz_given_y(&self) -> f64 {
        (self.hxyz - self.hy).max(0.0)
    }
    pub fn h_yz_given_x(&self) -> f64 {
        (self.hxyz - self.hx).max(0.0)
    }
}

impl Model {
    /// Variables are `p(x, y)` at index `x * ny + y`.
    pub fn from_channel(ch: &Channel) -> Model {
        let (nx, ny, nz) = ch.dims();
        let mut map = Vec::new();
        for x in 0..nx {
            for y in 0..ny {
                for (z, &w) in ch.row(x, y).iter().enumerate() {
                    if w > 0.0 {
                        map.push((x * ny + y, (x * ny + y) * nz + z, w));
                    }
                }
            }
        }
        Model::with_map(nx, ny, nz, map, nx * ny)
    }

    /// Variables are the support points of `p`, in iteration order.
    pub fn from_support(p: &JointDist) -> Model {
        let dims: Vec<usize> = p.axes().iter().map(|a| a.len()).collect();
        let (nx, ny, nz) = (dims[0], dims[1], dims[2]);
        let map: Vec<(usize, usize, f64)> = p
            .iter()
            .filter(|(_, q)| *q > SUPPORT_EPS)
            .enumerate()
            .map(|(v, (t, _))| (v, (t[0] * ny + t[1]) * nz + t[2], 1.0))
            .collect();
        let n = map.len();
        Model::with_map(nx, ny, nz, map, n)
    }

    fn with_map(nx: usize, ny: usize, nz: usize, map: Vec<(usize, usize, f64)>, nvars: usize) -> Model {
        let cells: Vec<(usize, usize, usize)> = map
            .iter()
            .map(|&(_, c, _)| (c / (ny * nz), (c / nz) % ny, c % nz))
            .collect();
        let blocks = |na: usize, nb: usize, pick: &dyn Fn(&(usize, usize, usize)) -> (usize, usize)| {
            let mut uf = UnionFind::new(na + nb);
            for c in &cells {
                let (a, b) = pick(c);
                uf.union(a, na + b);
            }
            let (labels, _) = uf.labels(&vec![true; na + nb]);
            labels[..na].iter().map(|l| l.expect("all labelled")).collect::<Vec<_>>()
        };
        let xz_block = blocks(nx, nz, &|c| (c.0, c.2));
        let yz_block = blocks(ny, nz, &|c| (c.1, c.2));
        let xy_block = blocks(nx, ny, &|c| (c.0, c.1));
        Model { nx, ny, nz, map, nvars, xz_block, yz_block, xy_block }
    }

    /// Variables for the product `p_x ⊗ p_y` of a channel model.
    pub fn product_vars(&self, px: &[f64], py: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(px.len() * py.len());
        for &a in px {
            for &b in py {
                v.push(a * b);
            }
        }
        v
    }

    pub fn stats(&self, vars: &[f64]) -> Stats {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        // one buffer: cell | px | py | pz | pxy | pxz | pyz
        let sizes = [nx * ny * nz, nx, ny, nz, nx * ny, nx * nz, ny * nz];
        let mut buf = vec![0.0; sizes.iter().sum()];
        let (cell, rest) = buf.split_at_mut(sizes[0]);
        let (px, rest) = rest.split_at_mut(nx);
        let (py, rest) = rest.split_at_mut(ny);
        let (pz, rest) = rest.split_at_mut(nz);
        let (pxy, rest) = rest.split_at_mut(nx * ny);
        let (pxz, pyz) = rest.split_at_mut(nx * nz);
        for &(v, c, w) in &self.map {
            cell[c] += vars[v] * w;
        }
        let mut hxyz = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let p = cell[(x * ny + y) * nz + z];
                    if p <= 0.0 {
                        continue;
                    }
                    hxyz += plogp(p);
                    px[x] += p;
                    py[y] += p;
                    pz[z] += p;
                    pxy[x * ny + y] += p;
                    pxz[x * nz + z] += p;
                    pyz[y * nz + z] += p;
                }
            }
        }
        let h = |v: &[f64]| v.iter().map(|&p| plogp(p)).sum::<f64>();
        let hb = |blocks: &[usize], marg: &[f64]| {
            if blocks.iter().all(|&b| b == 0) {
                return 0.0;
            }
            let n = blocks.iter().max().map_or(0, |m| m + 1);
            let mut b = vec![0.0; n];
            for (i, &k) in blocks.iter().enumerate() {
                b[k] += marg[i];
            }
            h(&b)
        };
        Stats {
            hx: h(px),
            hy: h(py),
            hz: h(pz),
            hxy: h(pxy),
            hxz: h(pxz),
            hyz: h(pyz),
            hxyz,
            hb_xz: hb(&self.xz_block, px),
            hb_yz: hb(&self.yz_block, py),
            hb_xy: hb(&self.xy_block, px),
        }
    }

    pub fn stats_product(&self, px: &[f64], py: &[f64]) -> Stats {
        self.stats(&self.product_vars(px, py))
    }
}
