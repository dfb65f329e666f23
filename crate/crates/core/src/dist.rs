//! Finite alphabets, exact joint distributions, channels and the Shannon
//! functionals computed on them. All logarithms are base 2.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::bail;
use crate::{Error, Result, SUPPORT_EPS};

/// Probabilities must sum to one within this tolerance.
pub const SUM_TOL: f64 = 1e-12;

/// `-p log2 p` with `0 log 0 = 0`.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * libm::log2(p)
    } else {
        0.0
    }
}

/// Entropy of a probability vector.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| plogp(p)).sum()
}

/// Binary entropy function `H_2(p)`.
pub fn h2(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// A named, ordered list of distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        symbols: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            bail!(Argument, "alphabet `{name}` is empty");
        }
        let mut seen: Vec<&String> = symbols.iter().collect();
        seen.sort();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            bail!(Argument, "alphabet `{name}` repeats symbol `{}`", w[0]);
        }
        Ok(Alphabet { name, symbols })
    }

    /// Symbols `"0"`, `"1"`, ..., `"n-1"`.
    ///
    /// Panics if `n == 0`.
    pub fn range(name: impl Into<String>, n: usize) -> Self {
        assert!(n > 0, "empty alphabet");
        Alphabet {
            name: name.into(),
            symbols: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Alphabet {
            name: name.into(),
            symbols: self.symbols.clone(),
        }
    }

    /// Same symbols in the same order, ignoring the name.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.symbols == other.symbols
    }

    /// Alphabet of `n`-tuples, symbols joined by `.` in lexicographic order
    /// (the last coordinate varies fastest).
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            bail!(Argument, "power of an alphabet needs n >= 1");
        }
        let k = self.len();
        let count = k
            .checked_pow(n as u32)
            .filter(|&c| c <= 1 << 20)
            .ok_or_else(|| Error::Capacity(format!("{k}^{n} symbols")))?;
        let symbols = (0..count)
            .map(|mut idx| {
                let mut parts = alloc::vec![""; n];
                for slot in parts.iter_mut().rev() {
                    *slot = &self.symbols[idx % k];
                    idx /= k;
                }
                parts.join(".")
            })
            .collect::<Vec<_>>();
        Alphabet::new(self.name.clone(), symbols)
    }
}

/// Exact probability mass function over a finite product of alphabets.
///
/// Only support points are stored, keyed by symbol-index tuples in axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    axes: Vec<Alphabet>,
    pmf: BTreeMap<Vec<usize>, f64>,
}

impl JointDist {
    /// Builds a distribution; repeated tuples are summed and zero entries
    /// dropped.
    pub fn new(
        axes: Vec<Alphabet>,
        entries: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        if axes.is_empty() {
            bail!(Argument, "a joint distribution needs at least one axis");
        }
        let mut pmf = BTreeMap::new();
        for (t, p) in entries {
            if t.len() != axes.len() {
                bail!(Argument, "tuple arity {} but {} axes", t.len(), axes.len());
            }
            for (i, (&s, a)) in t.iter().zip(&axes).enumerate() {
                if s >= a.len() {
                    bail!(Argument, "symbol index {s} out of range on axis {i}");
                }
            }
            if !(p >= 0.0) || !p.is_finite() {
                bail!(Argument, "invalid probability {p}");
            }
            if p > 0.0 {
                *pmf.entry(t).or_insert(0.0) += p;
            }
        }
        let total: f64 = pmf.values().sum();
        if (total - 1.0).abs() > SUM_TOL {
            bail!(Argument, "probabilities sum to {total}, not 1");
        }
        Ok(JointDist { axes, pmf })
    }

    /// Same as [`JointDist::new`] but with symbol labels.
    pub fn from_labels(axes: Vec<Alphabet>, entries: &[(&[&str], f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for (labels, p) in entries {
            if labels.len() != axes.len() {
                bail!(Argument, "tuple arity {} but {} axes", labels.len(), axes.len());
            }
            let t = labels
                .iter()
                .zip(&axes)
                .map(|(l, a)| {
                    a.index_of(l)
                        .ok_or_else(|| Error::Argument(format!("unknown symbol `{l}` on `{}`", a.name())))
                })
                .collect::<Result<Vec<_>>>()?;
            out.push((t, *p));
        }
        JointDist::new(axes, out)
    }

    /// One-axis distribution from a probability vector.
    pub fn from_probs(axis: Alphabet, probs: &[f64]) -> Result<Self> {
        if probs.len() != axis.len() {
            bail!(Argument, "{} probabilities for {} symbols", probs.len(), axis.len());
        }
        JointDist::new(alloc::vec![axis], probs.iter().enumerate().map(|(i, &p)| (alloc::vec![i], p)))
    }

    /// Dense row-major probabilities over the full product alphabet.
    pub fn from_dense(axes: Vec<Alphabet>, probs: &[f64]) -> Result<Self> {
        let sizes: Vec<usize> = axes.iter().map(Alphabet::len).collect();
        let total: usize = sizes.iter().product();
        if probs.len() != total {
            bail!(Argument, "{} probabilities for {total} cells", probs.len());
        }
        let entries = probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (unflatten(i, &sizes), p))
            .collect::<Vec<_>>();
        JointDist::new(axes, entries)
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Self {
        let sizes: Vec<usize> = axes.iter().map(Alphabet::len).collect();
        let total: usize = sizes.iter().product();
        let p = 1.0 / total as f64;
        let pmf = (0..total).map(|i| (unflatten(i, &sizes), p)).collect();
        JointDist { axes, pmf }
    }

    pub fn point(axes: Vec<Alphabet>, tuple: Vec<usize>) -> Result<Self> {
        JointDist::new(axes, [(tuple, 1.0)])
    }

    /// `Bernoulli(p)` on the alphabet `{"0", "1"}`.
    pub fn bernoulli(name: impl Into<String>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            bail!(Argument, "Bernoulli parameter {p} outside [0,1]");
        }
        JointDist::from_probs(Alphabet::range(name, 2), &[1.0 - p, p])
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn arity(&self) -> usize {
        self.axes.len()
    }

    /// Support points with their probabilities, in lexicographic tuple order.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.pmf.iter().map(|(t, &p)| (t.as_slice(), p))
    }

    pub fn prob(&self, tuple: &[usize]) -> f64 {
        self.pmf.get(tuple).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.pmf.values().filter(|&&p| p > SUPPORT_EPS).count()
    }

    /// Symbol labels of a tuple.
    pub fn labels(&self, tuple: &[usize]) -> Vec<&str> {
        tuple.iter().zip(&self.axes).map(|(&s, a)| a.symbol(s)).collect()
    }

    fn check_axes(&self, axes: &[usize], what: &str) -> Result<()> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.axes.len() {
                bail!(Argument, "{what}: axis {a} out of range ({} axes)", self.axes.len());
            }
            if axes[..i].contains(&a) {
                bail!(Argument, "{what}: axis {a} listed twice");
            }
        }
        Ok(())
    }

    fn marginal_map(&self, axes: &[usize]) -> BTreeMap<Vec<usize>, f64> {
        let mut m = BTreeMap::new();
        for (t, &p) in &self.pmf {
            let key: Vec<usize> = axes.iter().map(|&a| t[a]).collect();
            *m.entry(key).or_insert(0.0) += p;
        }
        m
    }

    /// Marginal on the listed axes, in the listed order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointDist> {
        if axes.is_empty() {
            bail!(Argument, "marginal over no axes");
        }
        self.check_axes(axes, "marginal")?;
        Ok(JointDist {
            axes: axes.iter().map(|&a| self.axes[a].clone()).collect(),
            pmf: self.marginal_map(axes),
        })
    }

    /// Probability vector of one axis.
    pub fn marginal_probs(&self, axis: usize) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.axes[axis].len()];
        for (t, &p) in &self.pmf {
            v[t[axis]] += p;
        }
        v
    }

    fn raw_entropy(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        self.marginal_map(axes).values().map(|&p| plogp(p)).sum()
    }

    /// `H` of the marginal on `axes`.
    pub fn entropy(&self, axes: &[usize]) -> Result<f64> {
        if axes.is_empty() {
            bail!(Argument, "entropy over no axes");
        }
        self.check_axes(axes, "entropy")?;
        Ok(self.raw_entropy(axes))
    }

    /// `H(target | given)`; `given` may be empty.
    pub fn cond_entropy(&self, target: &[usize], given: &[usize]) -> Result<f64> {
        if target.is_empty() {
            bail!(Argument, "conditional entropy with empty target");
        }
        let all = disjoint_union(target, given, "conditional entropy")?;
        self.check_axes(&all, "conditional entropy")?;
        Ok((self.raw_entropy(&all) - self.raw_entropy(given)).max(0.0))
    }

    /// `I(a; b)`.
    pub fn mutual_info(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        self.cond_mutual_info(a, b, &[])
    }

    /// `I(a; b | given)`; `given` may be empty.
    pub fn cond_mutual_info(&self, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            bail!(Argument, "mutual information needs two non-empty axis sets");
        }
        let ab = disjoint_union(a, b, "mutual information")?;
        let abc = disjoint_union(&ab, given, "mutual information")?;
        let ac = disjoint_union(a, given, "mutual information")?;
        let bc = disjoint_union(b, given, "mutual information")?;
        self.check_axes(&abc, "mutual information")?;
        let v = self.raw_entropy(&ac) + self.raw_entropy(&bc)
            - self.raw_entropy(&abc)
            - self.raw_entropy(given);
        Ok(v.max(0.0))
    }

    /// Independent product; axes of `self` come first.
    pub fn product(&self, other: &JointDist) -> JointDist {
        let mut pmf = BTreeMap::new();
        for (a, &pa) in &self.pmf {
            for (b, &pb) in &other.pmf {
                let mut t = a.clone();
                t.extend_from_slice(b);
                pmf.insert(t, pa * pb);
            }
        }
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        JointDist { axes, pmf }
    }

    /// `p(x,y) p(z|x,y)` as a three-axis joint over `(X, Y, Z)`.
    pub fn join(p_xy: &JointDist, ch: &Channel) -> Result<JointDist> {
        if p_xy.arity() != 2 {
            bail!(Argument, "join needs a two-axis input distribution");
        }
        if !p_xy.axes[0].same_symbols(ch.x()) || !p_xy.axes[1].same_symbols(ch.y()) {
            bail!(Argument, "input distribution alphabets do not match the channel inputs");
        }
        let mut pmf = BTreeMap::new();
        for (t, &p) in &p_xy.pmf {
            for (z, &w) in ch.row(t[0], t[1]).iter().enumerate() {
                if w > 0.0 {
                    pmf.insert(alloc::vec![t[0], t[1], z], p * w);
                }
            }
        }
        Ok(JointDist {
            axes: alloc::vec![p_xy.axes[0].clone(), p_xy.axes[1].clone(), ch.z().clone()],
            pmf,
        })
    }

    /// True when every cell of the product alphabet carries mass above
    /// [`SUPPORT_EPS`].
    pub fn is_full_support(&self) -> bool {
        let total: usize = self.axes.iter().map(Alphabet::len).product();
        self.support_len() == total
    }

    /// For a two-axis joint: whether it factors as the product of its
    /// marginals within `tol`.
    pub fn is_product(&self, tol: f64) -> bool {
        if self.arity() != 2 {
            return false;
        }
        let pa = self.marginal_probs(0);
        let pb = self.marginal_probs(1);
        for (a, &qa) in pa.iter().enumerate() {
            for (b, &qb) in pb.iter().enumerate() {
                if (self.prob(&[a, b]) - qa * qb).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Dense row-major probabilities over the full product alphabet.
    pub fn to_dense(&self) -> Vec<f64> {
        let sizes: Vec<usize> = self.axes.iter().map(Alphabet::len).collect();
        let total: usize = sizes.iter().product();
        let mut v = alloc::vec![0.0; total];
        for (t, &p) in &self.pmf {
            v[flatten(t, &sizes)] += p;
        }
        v
    }

    /// Relabels one axis through `map` (old index to new index). Masses of
    /// symbols sent to the same index add up; symbols mapped to `None` must
    /// carry no mass.
    pub fn map_axis(&self, axis: usize, to: Alphabet, map: &[Option<usize>]) -> Result<JointDist> {
        if axis >= self.arity() || map.len() != self.axes[axis].len() {
            bail!(Argument, "axis map does not match axis {axis}");
        }
        let mut pmf = BTreeMap::new();
        for (t, &p) in &self.pmf {
            match map[t[axis]] {
                Some(n) if n < to.len() => {
                    let mut t = t.clone();
                    t[axis] = n;
                    *pmf.entry(t).or_insert(0.0) += p;
                }
                Some(n) => bail!(Argument, "axis map target {n} out of range"),
                None if p > SUPPORT_EPS => {
                    bail!(Argument, "dropping symbol `{}` with mass {p}", self.axes[axis].symbol(t[axis]))
                }
                None => {}
            }
        }
        let mut axes = self.axes.clone();
        axes[axis] = to;
        Ok(JointDist { axes, pmf })
    }

    /// Reorders (or selects) axes without marginalizing. `order` must be a
    /// permutation of all axes.
    pub fn permute(&self, order: &[usize]) -> Result<JointDist> {
        if order.len() != self.arity() {
            bail!(Argument, "permutation must list every axis");
        }
        self.marginal(order)
    }

    /// Renames axis `i`.
    pub fn rename_axis(mut self, i: usize, name: &str) -> JointDist {
        self.axes[i] = self.axes[i].renamed(name);
        self
    }

    /// `n` i.i.d. copies, grouped per axis: axis `a` becomes the tuple
    /// alphabet `a^n` (see [`Alphabet::power`]).
    pub fn iid(&self, n: usize) -> Result<JointDist> {
        let axes = self.axes.iter().map(|a| a.power(n)).collect::<Result<Vec<_>>>()?;
        let sizes: Vec<usize> = self.axes.iter().map(Alphabet::len).collect();
        let mut pmf: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        pmf.insert(alloc::vec![0; self.arity()], 1.0);
        for _ in 0..n {
            let mut next = BTreeMap::new();
            for (t, &p) in &pmf {
                for (s, &q) in &self.pmf {
                    let key: Vec<usize> = t.iter().zip(s).zip(&sizes).map(|((&a, &b), &k)| a * k + b).collect();
                    next.insert(key, p * q);
                }
            }
            pmf = next;
        }
        Ok(JointDist { axes, pmf })
    }
}

fn disjoint_union(a: &[usize], b: &[usize], what: &str) -> Result<Vec<usize>> {
    if let Some(x) = a.iter().find(|x| b.contains(x)) {
        bail!(Argument, "{what}: axis {x} appears in two overlapping sets");
    }
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    Ok(v)
}

pub(crate) fn unflatten(mut i: usize, sizes: &[usize]) -> Vec<usize> {
    let mut t = alloc::vec![0; sizes.len()];
    for (slot, &s) in t.iter_mut().zip(sizes).rev() {
        *slot = i % s;
        i /= s;
    }
    t
}

pub(crate) fn flatten(t: &[usize], sizes: &[usize]) -> usize {
    t.iter().zip(sizes).fold(0, |acc, (&s, &n)| acc * n + s)
}

/// A conditional distribution `p(z|x,y)` over finite alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    x: Alphabet,
    y: Alphabet,
    z: Alphabet,
    /// Row-major: index `(x * |Y| + y) * |Z| + z`.
    kernel: Vec<f64>,
}

impl Channel {
    /// `rows[x * |Y| + y]` is the output distribution for input `(x, y)`.
    pub fn new(x: Alphabet, y: Alphabet, z: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != x.len() * y.len() {
            bail!(Argument, "{} kernel rows for {}x{} inputs", rows.len(), x.len(), y.len());
        }
        let mut kernel = Vec::with_capacity(rows.len() * z.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != z.len() {
                bail!(Argument, "kernel row {i} has {} entries, expected {}", row.len(), z.len());
            }
            if row.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
                bail!(Argument, "kernel row {i} has an invalid probability");
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                bail!(Argument, "kernel row {i} sums to {s}");
            }
            kernel.extend_from_slice(row);
        }
        Ok(Channel { x, y, z, kernel })
    }

    /// Deterministic function `z = f(x, y)`.
    pub fn deterministic(
        x: Alphabet,
        y: Alphabet,
        z: Alphabet,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(x.len() * y.len());
        for a in 0..x.len() {
            for b in 0..y.len() {
                let out = f(a, b);
                if out >= z.len() {
                    bail!(Argument, "function value {out} outside the output alphabet");
                }
                let mut row = alloc::vec![0.0; z.len()];
                row[out] = 1.0;
                rows.push(row);
            }
        }
        Channel::new(x, y, z, rows)
    }

    pub fn x(&self) -> &Alphabet {
        &self.x
    }

    pub fn y(&self) -> &Alphabet {
        &self.y
    }

    pub fn z(&self) -> &Alphabet {
        &self.z
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.x.len(), self.y.len(), self.z.len())
    }

    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        let nz = self.z.len();
        let i = (x * self.y.len() + y) * nz;
        &self.kernel[i..i + nz]
    }

    pub fn prob(&self, z: usize, x: usize, y: usize) -> f64 {
        self.row(x, y)[z]
    }

    /// Flat kernel, index `(x * |Y| + y) * |Z| + z`.
    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn is_deterministic(&self) -> bool {
        self.kernel.iter().all(|&p| p == 0.0 || p == 1.0)
    }

    /// The `n`-fold i.i.d. product channel on tuple alphabets.
    pub fn power(&self, n: usize) -> Result<Channel> {
        let (x, y, z) = (self.x.power(n)?, self.y.power(n)?, self.z.power(n)?);
        let (nx, ny, nz) = self.dims();
        let mut rows = Vec::with_capacity(x.len() * y.len());
        for xi in 0..x.len() {
            let xs = unflatten(xi, &alloc::vec![nx; n]);
            for yi in 0..y.len() {
                let ys = unflatten(yi, &alloc::vec![ny; n]);
                let row = (0..z.len())
                    .map(|zi| {
                        let zs = unflatten(zi, &alloc::vec![nz; n]);
                        (0..n).map(|k| self.prob(zs[k], xs[k], ys[k])).product()
                    })
                    .collect();
                rows.push(row);
            }
        }
        // products of row entries sum to one only up to rounding
        let rows = rows
            .into_iter()
            .map(|r: Vec<f64>| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|p| p / s).collect()
            })
            .collect();
        Channel::new(x, y, z, rows)
    }
}
