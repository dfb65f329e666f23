//! Maximization over products of probability simplices: a grid (or random
//! Dirichlet starts for large alphabets) followed by line searches.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::bail;
use crate::Result;

/// Alphabets larger than this are searched from random starts instead of a
/// grid.
pub const GRID_MAX_SHAPE: usize = 6;

/// Coordinates below this are reported as limit points on the boundary.
pub const LIMIT_EPS: f64 = 1e-6;

const GOLDEN_ITERS: usize = 40;
const LINE_WIDTH: f64 = 1e-9;

/// Search settings for every supremum over input distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    /// Grid spacing for the initial scan.
    pub grid_resolution: f64,
    /// Maximum number of refinement sweeps per start.
    pub refine_iters: usize,
    /// Every coordinate is kept at or above this value.
    pub simplex_floor: f64,
    /// Target accuracy of reported optima.
    pub tolerance: f64,
    /// The grid is coarsened until it has at most this many points.
    pub max_grid_points: usize,
    /// Dirichlet(1) starts when the grid is not used.
    pub random_starts: usize,
    /// Number of best scan points refined.
    pub refine_starts: usize,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            grid_resolution: 0.02,
            refine_iters: 60,
            simplex_floor: 0.0,
            tolerance: 1e-4,
            max_grid_points: 25_000,
            random_starts: 200,
            refine_starts: 3,
            seed: 0x5eed,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_resolution > 0.0 && self.grid_resolution <= 1.0) {
            bail!(Argument, "grid_resolution must lie in (0, 1]");
        }
        if !(self.simplex_floor >= 0.0) {
            bail!(Argument, "simplex_floor must be non-negative");
        }
        if !(self.tolerance > 0.0) {
            bail!(Argument, "tolerance must be positive");
        }
        if self.max_grid_points == 0 {
            bail!(Argument, "max_grid_points must be positive");
        }
        Ok(())
    }
}

/// Best value found and its argument, one distribution per simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub value: f64,
    pub args: Vec<Vec<f64>>,
}

impl OptResult {
    /// True when some coordinate sits on the simplex boundary.
    pub fn is_limit_point(&self) -> bool {
        self.args.iter().flatten().any(|&p| p < LIMIT_EPS)
    }
}

/// Maximizes `objective` over a product of simplices with the given sizes.
///
/// The objective receives the concatenation of one probability vector per
/// shape. Deterministic for a fixed configuration.
pub fn optimize_over_simplex<F>(objective: F, shapes: &[usize], cfg: &OptConfig) -> OptResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(shapes.iter().all(|&s| s >= 1), "empty simplex");
    let space = Space::new(shapes, cfg.simplex_floor);
    if shapes.iter().all(|&s| s == 1) {
        let x = space.project(&vec![1.0; shapes.len()]);
        return OptResult { value: objective(&x), args: space.split(&x) };
    }

    let candidates = space.candidates(cfg);
    let scores = eval_all(&candidates, |q| objective(&space.project(q)));
    let mut order: Vec<usize> = (0..candidates.len()).filter(|&i| scores[i].is_finite()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut best: Option<(f64, Vec<f64>)> = None;
    for &i in order.iter().take(cfg.refine_starts.max(1)) {
        let (v, q) = space.refine(&objective, candidates[i].clone(), cfg);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, q));
        }
    }
    let (value, q) = best.unwrap_or_else(|| {
        let q = candidates[0].clone();
        (objective(&space.project(&q)), q)
    });
    let x = space.project(&q);
    OptResult { value, args: space.split(&x) }
}

#[cfg(feature = "parallel")]
fn eval_all<G: Fn(&[f64]) -> f64 + Sync>(points: &[Vec<f64>], g: G) -> Vec<f64> {
    use rayon::prelude::*;
    points.par_iter().map(|p| g(p)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_all<G: Fn(&[f64]) -> f64>(points: &[Vec<f64>], g: G) -> Vec<f64> {
    points.iter().map(|p| g(p)).collect()
}

/// A product of simplices. Search runs on unfloored points `q`; the objective
/// sees `floor + (1 - n floor) q` per block.
struct Space {
    shapes: Vec<usize>,
    offsets: Vec<usize>,
    floor: f64,
}

impl Space {
    fn new(shapes: &[usize], floor: f64) -> Self {
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut o = 0;
        for &s in shapes {
            offsets.push(o);
            o += s;
        }
        let max_floor = shapes.iter().map(|&s| 1.0 / s as f64).fold(1.0, f64::min);
        Space { shapes: shapes.to_vec(), offsets, floor: floor.min(max_floor) }
    }

    fn dim(&self) -> usize {
        self.shapes.iter().sum()
    }

    fn project(&self, q: &[f64]) -> Vec<f64> {
        if self.floor == 0.0 {
            return q.to_vec();
        }
        let mut x = q.to_vec();
        for (&o, &n) in self.offsets.iter().zip(&self.shapes) {
            let scale = 1.0 - n as f64 * self.floor;
            for v in &mut x[o..o + n] {
                *v = self.floor + scale * *v;
            }
        }
        x
    }

    fn split(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.offsets.iter().zip(&self.shapes).map(|(&o, &n)| x[o..o + n].to_vec()).collect()
    }

    fn candidates(&self, cfg: &OptConfig) -> Vec<Vec<f64>> {
        let mut out = if self.shapes.iter().all(|&s| s <= GRID_MAX_SHAPE) {
            self.grid(cfg)
        } else {
            self.random(cfg)
        };
        out.extend(self.seeds());
        out
    }

    fn grid(&self, cfg: &OptConfig) -> Vec<Vec<f64>> {
        let mut n = libm::round(1.0 / cfg.grid_resolution).max(1.0) as usize;
        while n > 1 && self.grid_count(n) > cfg.max_grid_points as f64 {
            n = (n * 9 / 10).min(n - 1).max(1);
        }
        let per_block: Vec<Vec<Vec<f64>>> = self.shapes.iter().map(|&s| compositions(n, s)).collect();
        let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(self.dim())];
        for block in &per_block {
            let mut next = Vec::with_capacity(out.len() * block.len());
            for prefix in &out {
                for b in block {
                    let mut v = prefix.clone();
                    v.extend_from_slice(b);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    fn grid_count(&self, n: usize) -> f64 {
        self.shapes.iter().map(|&s| binomial(n + s - 1, s - 1)).product()
    }

    fn random(&self, cfg: &OptConfig) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.random_starts.min(cfg.max_grid_points))
            .map(|_| {
                let mut v = Vec::with_capacity(self.dim());
                for &s in &self.shapes {
                    let e: Vec<f64> = (0..s).map(|_| -libm::log(unit_open(&mut rng))).collect();
                    let t: f64 = e.iter().sum();
                    v.extend(e.iter().map(|x| x / t));
                }
                v
            })
            .collect()
    }

    /// Uniform point, every vertex and every edge midpoint, combined block by
    /// block with the other blocks uniform.
    fn seeds(&self) -> Vec<Vec<f64>> {
        let uniform: Vec<f64> = self
            .shapes
            .iter()
            .flat_map(|&s| core::iter::repeat_n(1.0 / s as f64, s))
            .collect();
        let mut out = vec![uniform.clone()];
        for (&o, &n) in self.offsets.iter().zip(&self.shapes) {
            for i in 0..n {
                let mut v = uniform.clone();
                v[o..o + n].iter_mut().for_each(|x| *x = 0.0);
                v[o + i] = 1.0;
                out.push(v);
                for j in i + 1..n {
                    let mut v = uniform.clone();
                    v[o..o + n].iter_mut().for_each(|x| *x = 0.0);
                    v[o + i] = 0.5;
                    v[o + j] = 0.5;
                    out.push(v);
                }
            }
        }
        out
    }

    /// Line searches along vertex directions and pairwise mass transfers
    /// until a sweep gains less than a hundredth of the tolerance.
    fn refine<F: Fn(&[f64]) -> f64>(&self, f: &F, mut q: Vec<f64>, cfg: &OptConfig) -> (f64, Vec<f64>) {
        let g = |q: &[f64]| f(&self.project(q));
        let mut best = g(&q);
        for _ in 0..cfg.refine_iters {
            let start = best;
            for (&o, &n) in self.offsets.iter().zip(&self.shapes) {
                if n < 2 {
                    continue;
                }
                for i in o..o + n {
                    let base = q.clone();
                    let a = base[i];
                    let line = |t: f64| {
                        let mut p = base.clone();
                        toward_vertex(&mut p[o..o + n], i - o, a, t);
                        p
                    };
                    if let Some((v, t)) = golden(|t| g(&line(t)), 0.0, 1.0, a, best) {
                        best = v;
                        q = line(t);
                    }
                }
                if n <= 8 {
                    for i in o..o + n {
                        for j in i + 1..o + n {
                            let base = q.clone();
                            let line = |s: f64| {
                                let mut p = base.clone();
                                p[i] += s;
                                p[j] -= s;
                                p[i] = p[i].max(0.0);
                                p[j] = p[j].max(0.0);
                                p
                            };
                            if let Some((v, s)) = golden(|s| g(&line(s)), -base[i], base[j], 0.0, best) {
                                best = v;
                                q = line(s);
                            }
                        }
                    }
                }
            }
            if best - start < cfg.tolerance * 1e-2 {
                break;
            }
        }
        (best, q)
    }
}

/// Moves a block along `t e_i + (1 - t) r`, where `r` is the block with
/// coordinate `i` removed and renormalized.
fn toward_vertex(block: &mut [f64], i: usize, a: f64, t: f64) {
    let n = block.len();
    let rest = 1.0 - a;
    for (k, v) in block.iter_mut().enumerate() {
        if k == i {
            *v = t;
        } else if rest > 0.0 {
            *v = (1.0 - t) * *v / rest;
        } else {
            *v = (1.0 - t) / (n - 1) as f64;
        }
    }
}

/// Golden-section search for a maximum on `[lo, hi]`, also trying both ends.
/// Returns an improvement over `current` (attained at `at`), if any.
fn golden(h: impl Fn(f64) -> f64, lo: f64, hi: f64, at: f64, current: f64) -> Option<(f64, f64)> {
    if hi - lo <= LINE_WIDTH {
        return None;
    }
    let mut best = (current, at);
    let consider = |v: f64, t: f64, best: &mut (f64, f64)| {
        if v > best.0 {
            *best = (v, t);
        }
    };
    consider(h(lo), lo, &mut best);
    consider(h(hi), hi, &mut best);
    const R: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..GOLDEN_ITERS {
        if b - a <= LINE_WIDTH {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = h(d);
        }
    }
    consider(fc, c, &mut best);
    consider(fd, d, &mut best);
    if best.0 > current {
        Some(best)
    } else {
        None
    }
}

/// All points of the `n`-step grid on the simplex with `parts` coordinates.
fn compositions(n: usize, parts: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(i: usize, left: usize, n: usize, cur: &mut [usize], out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.iter().map(|&k| k as f64 / n as f64).collect());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, n, cur, out);
        }
    }
    rec(0, n, n, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64
}
