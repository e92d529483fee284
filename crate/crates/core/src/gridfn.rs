//! Grid functions on `[0,1]^n`, up-sets, level-set decompositions, one-dimensional
//! step functions and quantile transforms.
//!
//! Cells are half-open and values are constant on each cell, so every integral is a
//! cell mean. Storage is row-major: the last axis varies fastest.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Values this close to the unit interval are accepted and clamped into it.
pub const RANGE_SLACK: f64 = 1e-9;
/// Default absolute tolerance for monotonicity checks.
pub const MONOTONE_TOL: f64 = 1e-9;
/// Breakpoints closer than this are merged in step-function arithmetic.
pub const EDGE_EPS: f64 = 1e-12;

/// Shape of a rectangular grid with row-major indexing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.len() > 4 {
            return Err(Error::InvalidGrid(format!("dimension count {} not in 1..=4", dims.len())));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("empty axis in {dims:?}")));
        }
        Ok(Shape { dims: dims.to_vec() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for a in (0..self.dims.len().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for a in (0..self.dims.len()).rev() {
            idx[a] = flat % self.dims[a];
            flat /= self.dims[a];
        }
        idx
    }

    /// Coordinate of cell `flat` along `axis`.
    pub fn coord(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides()[axis]) % self.dims[axis]
    }

    /// All pairs `(lo, hi)` of cells adjacent along one axis with `hi` one step above `lo`.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let strides = self.strides();
        let mut out = Vec::with_capacity(self.len() * self.n());
        for c in 0..self.len() {
            for (a, &s) in strides.iter().enumerate() {
                if self.coord(c, a) + 1 < self.dims[a] {
                    out.push((c, c + s));
                }
            }
        }
        out
    }
}

/// A function `[0,1]^n -> [0,1]` stored as cell values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    shape: Shape,
    values: Vec<f64>,
}

impl GridFunction {
    /// Values within [`RANGE_SLACK`] of `[0,1]` are clamped; anything further out is rejected.
    pub fn new(dims: &[usize], values: Vec<f64>) -> Result<Self> {
        let shape = Shape::new(dims)?;
        if values.len() != shape.len() {
            return Err(Error::LengthMismatch(values.len(), shape.len()));
        }
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -RANGE_SLACK || *v > 1.0 + RANGE_SLACK {
                return Err(Error::InvalidGrid(format!("value {v} outside [0,1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(GridFunction { shape, values })
    }

    pub fn constant(dims: &[usize], c: f64) -> Result<Self> {
        let len = Shape::new(dims)?.len();
        GridFunction::new(dims, vec![c; len])
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let shape = Shape::new(dims)?;
        let values = (0..shape.len()).map(|c| f(&shape.unravel(c))).collect();
        GridFunction::new(dims, values)
    }

    pub fn indicator(set: &UpSet) -> Self {
        GridFunction {
            shape: set.shape.clone(),
            values: set.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.shape.flat(idx)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &GridFunction, w: f64) -> Result<GridFunction> {
        if self.shape != other.shape {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let v = self.values.iter().zip(&other.values).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        GridFunction::new(self.dims(), v)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Distinct values after merging those within `tol`, ascending.
    pub fn distinct_values(&self, tol: f64) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<f64> = Vec::new();
        for x in v {
            if out.last().is_none_or(|&l| x - l > tol) {
                out.push(x);
            }
        }
        out
    }
}

/// Largest amount by which `f` decreases between adjacent cells (0 when monotone).
pub fn monotonicity_violation(f: &GridFunction) -> f64 {
    f.shape
        .adjacent_pairs()
        .into_iter()
        .map(|(lo, hi)| f.values[lo] - f.values[hi])
        .fold(0.0, f64::max)
}

pub fn is_monotone(f: &GridFunction, tol: f64) -> bool {
    monotonicity_violation(f) <= tol
}

/// A 0/1 upward-closed grid region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpSet {
    shape: Shape,
    mask: Vec<bool>,
}

impl UpSet {
    pub fn new(dims: &[usize], mask: Vec<bool>) -> Result<Self> {
        let shape = Shape::new(dims)?;
        if mask.len() != shape.len() {
            return Err(Error::LengthMismatch(mask.len(), shape.len()));
        }
        for (lo, hi) in shape.adjacent_pairs() {
            if mask[lo] && !mask[hi] {
                return Err(Error::InvalidGrid(format!("mask not upward closed at cell {lo}")));
            }
        }
        Ok(UpSet { shape, mask })
    }

    pub fn empty(dims: &[usize]) -> Result<Self> {
        let len = Shape::new(dims)?.len();
        UpSet::new(dims, vec![false; len])
    }

    pub fn full(dims: &[usize]) -> Result<Self> {
        let len = Shape::new(dims)?.len();
        UpSet::new(dims, vec![true; len])
    }

    /// The level set `{f >= level}` of a monotone function.
    pub fn level_set(f: &GridFunction, level: f64) -> Result<Self> {
        UpSet::new(f.dims(), f.values.iter().map(|&v| v >= level).collect())
    }

    /// Two-dimensional up-set from a nonincreasing boundary: column `i` holds rows `j >= g[i]`.
    pub fn from_boundary(dims: &[usize], g: &[usize]) -> Result<Self> {
        if dims.len() != 2 || g.len() != dims[0] {
            return Err(Error::InvalidGrid("boundary needs a 2D shape with one entry per column".into()));
        }
        let mask = (0..dims[0] * dims[1]).map(|c| c % dims[1] >= g[c / dims[1]]).collect();
        UpSet::new(dims, mask)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.mask[flat]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_subset(&self, other: &UpSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// For n = 2: per column `i` (axis 0), the lowest included row on axis 1, or `dims[1]`
    /// when the column is empty. Nonincreasing in `i`.
    pub fn boundary(&self) -> Option<Vec<usize>> {
        if self.shape.n() != 2 {
            return None;
        }
        let (d0, d1) = (self.dims()[0], self.dims()[1]);
        Some(
            (0..d0)
                .map(|i| (0..d1).find(|&j| self.mask[i * d1 + j]).unwrap_or(d1))
                .collect(),
        )
    }
}

/// Level-set decomposition `f = Σ_j λ_j 1_{A_j}` of a monotone grid function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestingRepresentation {
    pub levels: Vec<f64>,
    /// `sets[j] = {f >= levels[j]}`, decreasing in `j`.
    pub sets: Vec<UpSet>,
    pub weights: Vec<f64>,
    /// Weight placed on the empty set, `1 - levels.last()`.
    pub residual: f64,
}

impl NestingRepresentation {
    /// Evaluates the mixture. Partial sums of the weights are the stored levels, so
    /// each cell receives the level of the smallest set containing it.
    pub fn reconstruct(&self, dims: &[usize]) -> Result<GridFunction> {
        let len = Shape::new(dims)?.len();
        let mut v = vec![0.0; len];
        for (level, set) in self.levels.iter().zip(&self.sets) {
            for (c, x) in v.iter_mut().enumerate() {
                if set.contains(c) {
                    *x = *level;
                }
            }
        }
        GridFunction::new(dims, v)
    }

    /// Weighted sum `Σ λ_j 1_{A_j}` evaluated term by term.
    pub fn weighted_sum(&self, dims: &[usize]) -> Result<Vec<f64>> {
        let len = Shape::new(dims)?.len();
        let mut v = vec![0.0; len];
        for (w, set) in self.weights.iter().zip(&self.sets) {
            for (c, x) in v.iter_mut().enumerate() {
                if set.contains(c) {
                    *x += w;
                }
            }
        }
        Ok(v)
    }

    pub fn is_nested(&self) -> bool {
        self.sets.windows(2).all(|w| w[1].is_subset(&w[0]))
    }

    /// Drops entries with zero weight.
    pub fn canonical(&self) -> NestingRepresentation {
        let keep: Vec<usize> = (0..self.levels.len()).filter(|&j| self.weights[j] > 0.0).collect();
        NestingRepresentation {
            levels: keep.iter().map(|&j| self.levels[j]).collect(),
            sets: keep.iter().map(|&j| self.sets[j].clone()).collect(),
            weights: keep.iter().map(|&j| self.weights[j]).collect(),
            residual: self.residual,
        }
    }
}

pub fn nesting_decompose(f: &GridFunction) -> Result<NestingRepresentation> {
    let viol = monotonicity_violation(f);
    if viol > 0.0 {
        return Err(Error::NotMonotone(viol));
    }
    let levels: Vec<f64> = f.distinct_values(0.0).into_iter().filter(|&v| v > 0.0).collect();
    let mut sets = Vec::with_capacity(levels.len());
    let mut weights = Vec::with_capacity(levels.len());
    let mut prev = 0.0;
    for &l in &levels {
        sets.push(UpSet::level_set(f, l)?);
        weights.push(l - prev);
        prev = l;
    }
    Ok(NestingRepresentation { residual: 1.0 - prev, levels, sets, weights })
}

/// Nondecreasing step function on `[0,1]`: `values[k]` on the cell `(edges[k], edges[k+1]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction1D {
    edges: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction1D {
    /// Equal-width cells.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        let edges = (0..=m).map(|k| k as f64 / m as f64).collect();
        StepFunction1D::with_edges(edges, values)
    }

    pub fn with_edges(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || edges.len() != values.len() + 1 {
            return Err(Error::LengthMismatch(edges.len(), values.len() + 1));
        }
        if edges[0] != 0.0 || edges[values.len()] != 1.0 || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("step edges must increase from 0 to 1".into()));
        }
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -RANGE_SLACK || *v > 1.0 + RANGE_SLACK {
                return Err(Error::InvalidGrid(format!("step value {v} outside [0,1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(StepFunction1D { edges, values })
    }

    pub fn constant(m: usize, c: f64) -> Result<Self> {
        StepFunction1D::uniform(vec![c; m])
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn is_uniform(&self) -> bool {
        let m = self.m() as f64;
        self.edges.iter().enumerate().all(|(k, &e)| (e - k as f64 / m).abs() <= EDGE_EPS)
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1] + tol)
    }

    /// Left-continuous evaluation; `eval(0)` is the first value.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.edges[1..].iter().position(|&e| x <= e).unwrap_or(self.m() - 1);
        self.values[k]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().zip(self.widths()).map(|(v, w)| v * w).sum()
    }

    /// `∫_x^1 self`.
    pub fn tail_integral(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.m() {
            let (a, b) = (self.edges[k].max(x), self.edges[k + 1]);
            if b > a {
                s += self.values[k] * (b - a);
            }
        }
        s
    }

    /// Generalized inverse `y ↦ inf{x : q(x) > y}`, the measure of `{q <= y}` for nondecreasing q.
    pub fn inverse(&self) -> StepFunction1D {
        let mut br: Vec<f64> = self.values.iter().copied().filter(|&v| v > 0.0 && v < 1.0).collect();
        br.push(0.0);
        br.push(1.0);
        let edges = merge_edges(br);
        let values = edges[..edges.len() - 1]
            .iter()
            .map(|&b| {
                // {q <= y} for y just above b is a prefix of the cells.
                let cnt = self.values.iter().take_while(|&&v| v <= b).count();
                self.edges[cnt]
            })
            .collect();
        StepFunction1D::with_edges(edges, values).expect("inverse is a valid step").simplify()
    }

    /// Conjugate `z ↦ 1 - q^{-1}(1 - z)`.
    pub fn conjugate(&self) -> StepFunction1D {
        self.inverse().reflect()
    }

    /// `z ↦ 1 - q(1 - z)`, the flip through the centre of the unit square.
    pub fn reflect(&self) -> StepFunction1D {
        let m = self.m();
        let edges: Vec<f64> = (0..=m).map(|k| if k == m { 1.0 } else { 1.0 - self.edges[m - k] }).collect();
        let edges = {
            let mut e = edges;
            e[0] = 0.0;
            e
        };
        let values = (0..m).map(|k| 1.0 - self.values[m - 1 - k]).collect();
        StepFunction1D::with_edges(edges, values).expect("reflection is a valid step").simplify()
    }

    /// `self · 1_{[k,1]}`.
    pub fn truncate_below(&self, k: f64) -> StepFunction1D {
        let mut e = self.edges.clone();
        e.push(k);
        let edges = merge_edges(e);
        let values = edges[..edges.len() - 1]
            .iter()
            .zip(&edges[1..])
            .map(|(&a, &b)| if b <= k + EDGE_EPS { 0.0 } else { self.eval(0.5 * (a + b)) })
            .collect();
        StepFunction1D::with_edges(edges, values).expect("truncation is a valid step").simplify()
    }

    /// Merges adjacent cells with equal values.
    pub fn simplify(&self) -> StepFunction1D {
        let mut edges = vec![0.0];
        let mut values: Vec<f64> = Vec::new();
        for k in 0..self.m() {
            if values.last() == Some(&self.values[k]) {
                *edges.last_mut().unwrap() = self.edges[k + 1];
            } else {
                values.push(self.values[k]);
                edges.push(self.edges[k + 1]);
            }
        }
        StepFunction1D { edges, values }
    }

    /// Values on `m` equal cells; exact when every breakpoint of `self` is a multiple of `1/m`.
    pub fn on_uniform_grid(&self, m: usize) -> StepFunction1D {
        let values = (0..m).map(|k| self.eval((k as f64 + 0.5) / m as f64)).collect();
        StepFunction1D::uniform(values).expect("resampled step")
    }

    pub fn scale(&self, s: f64) -> Result<StepFunction1D> {
        StepFunction1D::with_edges(self.edges.clone(), self.values.iter().map(|v| v * s).collect())
    }
}

fn merge_edges(mut e: Vec<f64>) -> Vec<f64> {
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(e.len());
    for x in e {
        let x = x.clamp(0.0, 1.0);
        match out.last() {
            Some(&l) if x - l <= EDGE_EPS => {
                if x == 1.0 {
                    *out.last_mut().unwrap() = 1.0;
                }
            }
            _ => out.push(x),
        }
    }
    if out.len() < 2 {
        return vec![0.0, 1.0];
    }
    out[0] = 0.0;
    let last = out.len() - 1;
    out[last] = 1.0;
    out
}

/// Common refinement of the partitions of `a` and `b`.
pub fn common_edges(a: &StepFunction1D, b: &StepFunction1D) -> Vec<f64> {
    let mut e = a.edges.clone();
    e.extend_from_slice(&b.edges);
    merge_edges(e)
}

/// Sup-norm distance over cell interiors.
pub fn sup_distance(a: &StepFunction1D, b: &StepFunction1D) -> f64 {
    let e = common_edges(a, b);
    e.windows(2)
        .map(|w| {
            let x = 0.5 * (w[0] + w[1]);
            (a.eval(x) - b.eval(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Means of `f` over the slices `x_i = j`, one step function per axis.
pub fn marginals(f: &GridFunction) -> Vec<StepFunction1D> {
    let shape = f.shape();
    (0..f.n())
        .map(|a| {
            let d = shape.dims()[a];
            let mut sums = vec![0.0; d];
            for (c, v) in f.values().iter().enumerate() {
                sums[shape.coord(c, a)] += v;
            }
            let per = (f.len() / d) as f64;
            StepFunction1D::uniform(sums.into_iter().map(|s| s / per).collect()).expect("marginal in [0,1]")
        })
        .collect()
}

/// Average of `f` over all permutations of its arguments.
pub fn symmetrize(f: &GridFunction) -> Result<GridFunction> {
    let dims = f.dims();
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(Error::DimsUnequal(dims.to_vec()));
    }
    let perms = permutations(f.n());
    let shape = f.shape();
    let mut out = vec![0.0; f.len()];
    let mut permuted = vec![0; f.n()];
    for (c, o) in out.iter_mut().enumerate() {
        let idx = shape.unravel(c);
        let mut s = 0.0;
        for p in &perms {
            for (k, &pk) in p.iter().enumerate() {
                permuted[k] = idx[pk];
            }
            s += f.values()[shape.flat(&permuted)];
        }
        *o = s / perms.len() as f64;
    }
    GridFunction::new(dims, out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// A distribution on a bounded interval, used to change variables into quantile space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantileTransform {
    Uniform { lo: f64, hi: f64 },
    TruncatedNormal { lo: f64, hi: f64, mu: f64, sigma: f64 },
    /// `mu` and `sigma` are the mean and standard deviation of `ln x`.
    TruncatedLognormal { lo: f64, hi: f64, mu: f64, sigma: f64 },
    /// Piecewise-linear CDF through `(xs[k], cdf[k])`.
    Tabulated { xs: Vec<f64>, cdf: Vec<f64> },
}

impl QuantileTransform {
    pub fn support(&self) -> (f64, f64) {
        match self {
            QuantileTransform::Uniform { lo, hi }
            | QuantileTransform::TruncatedNormal { lo, hi, .. }
            | QuantileTransform::TruncatedLognormal { lo, hi, .. } => (*lo, *hi),
            QuantileTransform::Tabulated { xs, .. } => (xs[0], xs[xs.len() - 1]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support();
        if !(lo < hi) {
            return Err(Error::InvalidGrid(format!("empty support [{lo}, {hi}]")));
        }
        match self {
            QuantileTransform::TruncatedNormal { sigma, .. } | QuantileTransform::TruncatedLognormal { sigma, .. } => {
                if !(*sigma > 0.0) {
                    return Err(Error::InvalidGrid("sigma must be positive".into()));
                }
                if let QuantileTransform::TruncatedLognormal { lo, .. } = self {
                    if *lo < 0.0 {
                        return Err(Error::InvalidGrid("lognormal support must be nonnegative".into()));
                    }
                }
            }
            QuantileTransform::Tabulated { xs, cdf } => {
                let ok = xs.len() >= 2
                    && xs.len() == cdf.len()
                    && xs.windows(2).all(|w| w[1] > w[0])
                    && cdf.windows(2).all(|w| w[1] >= w[0])
                    && cdf[0] == 0.0
                    && cdf[cdf.len() - 1] == 1.0;
                if !ok {
                    return Err(Error::InvalidGrid("tabulated CDF must rise from 0 to 1 on increasing xs".into()));
                }
            }
            QuantileTransform::Uniform { .. } => {}
        }
        Ok(())
    }

    /// Untruncated density (up to a constant) at `x`.
    fn raw_density(&self, x: f64) -> f64 {
        match self {
            QuantileTransform::Uniform { .. } => 1.0,
            QuantileTransform::TruncatedNormal { mu, sigma, .. } => Normal::new(*mu, *sigma).unwrap().pdf(x),
            QuantileTransform::TruncatedLognormal { mu, sigma, .. } => {
                if x <= 0.0 {
                    0.0
                } else {
                    Normal::new(*mu, *sigma).unwrap().pdf(x.ln()) / x
                }
            }
            QuantileTransform::Tabulated { .. } => unreachable!("tabulated CDFs have no raw density"),
        }
    }

    /// Probability of each of `m` equal cells of the support.
    ///
    /// Parametric kinds use the density at cell centres, renormalized; tabulated CDFs
    /// use exact differences.
    pub fn cell_masses(&self, m: usize) -> Vec<f64> {
        let (lo, hi) = self.support();
        let h = (hi - lo) / m as f64;
        let raw: Vec<f64> = match self {
            QuantileTransform::Tabulated { .. } => {
                (0..m).map(|k| self.cdf(lo + (k + 1) as f64 * h) - self.cdf(lo + k as f64 * h)).collect()
            }
            _ => (0..m).map(|k| self.raw_density(lo + (k as f64 + 0.5) * h)).collect(),
        };
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    /// CDF at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match self {
            QuantileTransform::Uniform { .. } => (x - lo) / (hi - lo),
            QuantileTransform::TruncatedNormal { mu, sigma, .. } => {
                let n = Normal::new(*mu, *sigma).unwrap();
                (n.cdf(x) - n.cdf(lo)) / (n.cdf(hi) - n.cdf(lo))
            }
            QuantileTransform::TruncatedLognormal { mu, sigma, .. } => {
                let n = Normal::new(*mu, *sigma).unwrap();
                let l = |y: f64| if y <= 0.0 { 0.0 } else { n.cdf(y.ln()) };
                (l(x) - l(lo)) / (l(hi) - l(lo))
            }
            QuantileTransform::Tabulated { xs, cdf } => {
                let k = xs.windows(2).position(|w| x <= w[1]).unwrap_or(xs.len() - 2);
                let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
                cdf[k] + t * (cdf[k + 1] - cdf[k])
            }
        }
    }

    /// Generalized inverse `inf{x : G(x) > z}`, by bisection on the CDF.
    pub fn inverse_cdf(&self, z: f64) -> f64 {
        let (mut a, mut b) = self.support();
        if z < 0.0 {
            return a;
        }
        if z >= 1.0 {
            return b;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if self.cdf(mid) > z {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-15 * (1.0 + b.abs()) {
                break;
            }
        }
        b
    }
}

fn check_supports(domains: &[(f64, f64)], g: &[QuantileTransform], n: usize) -> Result<()> {
    if domains.len() != n || g.len() != n {
        return Err(Error::LengthMismatch(g.len(), n));
    }
    for (d, t) in domains.iter().zip(g) {
        t.validate()?;
        let (lo, hi) = t.support();
        if (lo - d.0).abs() > 1e-12 || (hi - d.1).abs() > 1e-12 {
            return Err(Error::SupportMismatch(lo, hi, d.0, d.1));
        }
    }
    Ok(())
}

/// Resamples `f` (cells over `domains`) into quantile coordinates: `f̃(t) = f(G^{-1}(t))`
/// at cell centres of the same grid.
pub fn to_quantile_space(f: &GridFunction, domains: &[(f64, f64)], g: &[QuantileTransform]) -> Result<GridFunction> {
    check_supports(domains, g, f.n())?;
    let maps: Vec<Vec<usize>> = (0..f.n())
        .map(|a| {
            let m = f.dims()[a];
            let (lo, hi) = domains[a];
            (0..m)
                .map(|k| {
                    let x = g[a].inverse_cdf((k as f64 + 0.5) / m as f64);
                    (((x - lo) / (hi - lo) * m as f64).floor() as usize).min(m - 1)
                })
                .collect()
        })
        .collect();
    remap(f, &maps)
}

/// Inverse of [`to_quantile_space`]: `f(x) = f̃(G(x))` at cell centres.
pub fn from_quantile_space(ft: &GridFunction, domains: &[(f64, f64)], g: &[QuantileTransform]) -> Result<GridFunction> {
    check_supports(domains, g, ft.n())?;
    let maps: Vec<Vec<usize>> = (0..ft.n())
        .map(|a| {
            let m = ft.dims()[a];
            let (lo, hi) = domains[a];
            (0..m)
                .map(|k| {
                    let t = g[a].cdf(lo + (k as f64 + 0.5) * (hi - lo) / m as f64);
                    ((t * m as f64).floor() as usize).min(m - 1)
                })
                .collect()
        })
        .collect();
    remap(ft, &maps)
}

fn remap(f: &GridFunction, maps: &[Vec<usize>]) -> Result<GridFunction> {
    let shape = f.shape();
    let mut src = vec![0; f.n()];
    let values = (0..f.len())
        .map(|c| {
            let idx = shape.unravel(c);
            for a in 0..f.n() {
                src[a] = maps[a][idx[a]];
            }
            f.values()[shape.flat(&src)]
        })
        .collect();
    GridFunction::new(f.dims(), values)
}
