//! Dense linear programming over grid variables, plus vertex and uniqueness
//! certificates built from tight-constraint rank tests.
//!
//! The simplex works on a condensed tableau: every row is an activity variable
//! `s_r = a_r · x` with its own bounds, so structural and row variables are handled
//! uniformly by a bounded-variable primal method.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::Shape;

pub const PIVOT_TOL: f64 = 1e-9;
pub const FEAS_TOL: f64 = 1e-8;
pub const RANK_TOL: f64 = 1e-8;
const COST_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const DEGENERATE_RUN: usize = 60;
const PERTURB: f64 = 1e-7;
const REFRESH_EVERY: usize = 250;
pub const UNIQUENESS_PROBES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `coeffs · x  (relation)  rhs`, with `coeffs` indexed like the problem variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Maximize `objective · x` over grid cells (and optional extra scalars) subject to
/// bounds, order pairs `x_a <= x_b`, and affine constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub dims: Vec<usize>,
    pub bounds: Vec<(f64, f64)>,
    pub objective: Vec<f64>,
    pub order: Vec<(usize, usize)>,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// All variables: cells first, then extras.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Rows (order pairs first, then constraints) whose activity sits at a bound.
    pub tight: Vec<usize>,
    /// Shadow price of each row's activity.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpProblem {
    /// Cells of `dims` boxed in `[0,1]`, zero objective, no constraints.
    pub fn new(dims: &[usize]) -> Result<Self> {
        let n = Shape::new(dims)?.len();
        Ok(LpProblem {
            dims: dims.to_vec(),
            bounds: vec![(0.0, 1.0); n],
            objective: vec![0.0; n],
            order: Vec::new(),
            constraints: Vec::new(),
        })
    }

    /// Adds the adjacent-cell inequalities that make the cells monotone.
    pub fn with_monotonicity(mut self) -> Self {
        let pairs = Shape::new(&self.dims).expect("valid dims").adjacent_pairs();
        self.order.extend(pairs);
        self
    }

    pub fn with_objective(mut self, c: &[f64]) -> Self {
        self.objective[..c.len()].copy_from_slice(c);
        self
    }

    /// Appends a scalar variable; returns its index.
    pub fn add_extra(&mut self, lo: f64, hi: f64, objective: f64) -> usize {
        self.bounds.push((lo, hi));
        self.objective.push(objective);
        for c in &mut self.constraints {
            c.coeffs.push(0.0);
        }
        self.bounds.len() - 1
    }

    /// Coefficient vectors shorter than the variable count are zero-padded.
    pub fn add_constraint(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) {
        let mut c = vec![0.0; self.n_vars()];
        c[..coeffs.len()].copy_from_slice(coeffs);
        self.constraints.push(LinearConstraint { coeffs: c, relation, rhs });
    }

    pub fn n_cells(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_rows(&self) -> usize {
        self.order.len() + self.constraints.len()
    }

    pub fn row_bounds(&self, r: usize) -> (f64, f64) {
        if r < self.order.len() {
            return (f64::NEG_INFINITY, 0.0);
        }
        let c = &self.constraints[r - self.order.len()];
        match c.relation {
            Relation::Le => (f64::NEG_INFINITY, c.rhs),
            Relation::Ge => (c.rhs, f64::INFINITY),
            Relation::Eq => (c.rhs, c.rhs),
        }
    }

    pub fn row_activity(&self, r: usize, x: &[f64]) -> f64 {
        if r < self.order.len() {
            let (a, b) = self.order[r];
            return x[a] - x[b];
        }
        dot(&self.constraints[r - self.order.len()].coeffs, x)
    }

    /// Dense coefficients of row `r`.
    pub fn row_coeffs(&self, r: usize) -> Vec<f64> {
        if r < self.order.len() {
            let mut v = vec![0.0; self.n_vars()];
            let (a, b) = self.order[r];
            v[a] += 1.0;
            v[b] -= 1.0;
            return v;
        }
        self.constraints[r - self.order.len()].coeffs.clone()
    }

    /// Largest bound or constraint violation of `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        for r in 0..self.n_rows() {
            let (lo, hi) = self.row_bounds(r);
            let a = self.row_activity(r, x);
            worst = worst.max(lo - a).max(a - hi);
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.objective.len() != n || self.n_cells() > n {
            return Err(Error::LengthMismatch(self.objective.len(), n));
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::LengthMismatch(c.coeffs.len(), n));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::InvalidGrid("non-finite constraint data".into()));
            }
        }
        for &(a, b) in &self.order {
            if a >= n || b >= n {
                return Err(Error::InvalidGrid("order pair out of range".into()));
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidGrid(format!("bad bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Tableau {
    m: usize,
    n: usize,
    /// `x[basis[i]] = Σ_j t[i*n + j] · x[nonbasic[j]]`.
    t: Vec<f64>,
    /// Objective as a combination of the nonbasic variables.
    d: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    iterations: usize,
    degenerate: usize,
    since_refresh: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

impl Tableau {
    fn new(p: &LpProblem, start: &[f64]) -> Tableau {
        let n = p.n_vars();
        let m = p.n_rows();
        let mut t = vec![0.0; m * n];
        for (k, &(a, b)) in p.order.iter().enumerate() {
            t[k * n + a] += 1.0;
            t[k * n + b] -= 1.0;
        }
        for (k, c) in p.constraints.iter().enumerate() {
            let r = p.order.len() + k;
            t[r * n..(r + 1) * n].copy_from_slice(&c.coeffs);
        }
        let mut lo: Vec<f64> = p.bounds.iter().map(|b| b.0).collect();
        let mut hi: Vec<f64> = p.bounds.iter().map(|b| b.1).collect();
        for r in 0..m {
            let (a, b) = p.row_bounds(r);
            lo.push(a);
            hi.push(b);
        }
        let mut x = start.to_vec();
        for r in 0..m {
            x.push(p.row_activity(r, start));
        }
        Tableau {
            m,
            n,
            t,
            d: p.objective.clone(),
            basis: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            lo,
            hi,
            x,
            iterations: 0,
            degenerate: 0,
            since_refresh: 0,
        }
    }

    fn refresh(&mut self) {
        for i in 0..self.m {
            let row = &self.t[i * self.n..(i + 1) * self.n];
            let v = row.iter().zip(&self.nonbasic).map(|(a, &j)| a * self.x[j]).sum();
            self.x[self.basis[i]] = v;
        }
        self.since_refresh = 0;
    }

    fn can_increase(&self, v: usize) -> bool {
        self.x[v] < self.hi[v] - FEAS_TOL * 0.01
    }

    fn can_decrease(&self, v: usize) -> bool {
        self.x[v] > self.lo[v] + FEAS_TOL * 0.01
    }

    /// Picks an entering column and direction for reduced costs `cost`.
    fn price(&self, cost: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n {
            let v = self.nonbasic[j];
            let c = cost[j];
            let dir = if c > COST_TOL && self.can_increase(v) {
                1.0
            } else if c < -COST_TOL && self.can_decrease(v) {
                -1.0
            } else {
                continue;
            };
            let score = c.abs();
            let better = match best {
                None => true,
                Some((bj, _, bs)) => {
                    if bland {
                        v < self.nonbasic[bj]
                    } else {
                        score > bs * (1.0 + 1e-12) || (score >= bs * (1.0 - 1e-12) && v < self.nonbasic[bj])
                    }
                }
            };
            if better {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Room for basic row `i` to move at `rate` per unit step; `None` if unlimited.
    /// Infeasible rows (phase one) may move until they reach the bound they violate.
    fn room(&self, i: usize, rate: f64) -> Option<(f64, f64)> {
        let v = self.basis[i];
        let (x, lo, hi) = (self.x[v], self.lo[v], self.hi[v]);
        if rate > 0.0 {
            if x < lo - FEAS_TOL {
                Some(((lo - x) / rate, lo))
            } else if x > hi + FEAS_TOL || !hi.is_finite() {
                None
            } else {
                Some(((hi - x).max(0.0) / rate, hi))
            }
        } else if x > hi + FEAS_TOL {
            Some(((x - hi) / -rate, hi))
        } else if x < lo - FEAS_TOL || !lo.is_finite() {
            None
        } else {
            Some(((x - lo).max(0.0) / -rate, lo))
        }
    }

    fn step(&mut self, cost: &[f64], phase_one: bool) -> Result<Step> {
        let bland = self.degenerate >= DEGENERATE_RUN;
        let Some((q, dir)) = self.price(cost, bland) else {
            return Ok(Step::Optimal);
        };
        let vq = self.nonbasic[q];
        let own = if dir > 0.0 { self.hi[vq] - self.x[vq] } else { self.x[vq] - self.lo[vq] };
        let n = self.n;

        // Two-pass ratio test: bound the step with a small tolerance, then take the
        // largest pivot among rows that block within that bound.
        let mut theta_max = f64::INFINITY;
        for i in 0..self.m {
            let a = self.t[i * n + q];
            if a.abs() < PIVOT_TOL {
                continue;
            }
            if let Some((r, _)) = self.room(i, a * dir) {
                let tol = if phase_one || bland { 0.0 } else { FEAS_TOL * 0.1 };
                theta_max = theta_max.min(r + tol / a.abs());
            }
        }
        let mut leave: Option<(usize, f64, f64)> = None;
        if theta_max.is_finite() {
            for i in 0..self.m {
                let a = self.t[i * n + q];
                if a.abs() < PIVOT_TOL {
                    continue;
                }
                if let Some((r, bound)) = self.room(i, a * dir) {
                    if r <= theta_max {
                        let better = match leave {
                            None => true,
                            Some((bi, _, _)) => {
                                if bland {
                                    let (rb, _) = self.room(bi, self.t[bi * n + q] * dir).unwrap();
                                    r < rb - 1e-12 || (r <= rb + 1e-12 && self.basis[i] < self.basis[bi])
                                } else {
                                    a.abs() > self.t[bi * n + q].abs()
                                }
                            }
                        };
                        if better {
                            leave = Some((i, r, bound));
                        }
                    }
                }
            }
        }
        let theta = match leave {
            Some((_, r, _)) => r.min(own),
            None => own,
        };
        if !theta.is_finite() {
            return Ok(Step::Unbounded);
        }
        if theta <= 1e-9 {
            self.degenerate += 1;
        } else {
            self.degenerate = 0;
        }
        self.iterations += 1;
        // Move.
        let delta = dir * theta;
        self.x[vq] += delta;
        for i in 0..self.m {
            let a = self.t[i * n + q];
            if a != 0.0 {
                let v = self.basis[i];
                self.x[v] += a * delta;
            }
        }
        match leave {
            Some((r, rr, bound)) if rr < own => {
                let vr = self.basis[r];
                self.x[vr] = bound;
                self.pivot(r, q);
            }
            _ => {
                self.x[vq] = if dir > 0.0 { self.hi[vq] } else { self.lo[vq] };
            }
        }
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_EVERY {
            self.refresh();
        }
        Ok(Step::Moved)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n;
        let p = self.t[r * n + q];
        let mut row: Vec<f64> = self.t[r * n..(r + 1) * n].iter().map(|v| -v / p).collect();
        row[q] = 1.0 / p;
        let nz: Vec<usize> = (0..n).filter(|&j| row[j] != 0.0).collect();
        self.t[r * n..(r + 1) * n].copy_from_slice(&row);
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let base = i * n;
            let alpha = self.t[base + q];
            if alpha == 0.0 {
                continue;
            }
            self.t[base + q] = 0.0;
            for &j in &nz {
                let v = self.t[base + j] + alpha * row[j];
                self.t[base + j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
        }
        let alpha = self.d[q];
        if alpha != 0.0 {
            self.d[q] = 0.0;
            for &j in &nz {
                self.d[j] += alpha * row[j];
            }
        }
        std::mem::swap(&mut self.basis[r], &mut self.nonbasic[q]);
    }

    fn infeasibility(&self) -> (f64, Vec<f64>) {
        let mut total = 0.0;
        let w = self
            .basis
            .iter()
            .map(|&v| {
                if self.x[v] < self.lo[v] - FEAS_TOL {
                    total += self.lo[v] - self.x[v];
                    1.0
                } else if self.x[v] > self.hi[v] + FEAS_TOL {
                    total += self.x[v] - self.hi[v];
                    -1.0
                } else {
                    0.0
                }
            })
            .collect();
        (total, w)
    }

    fn phase_one(&mut self, max_iter: usize) -> Result<bool> {
        loop {
            let (total, w) = self.infeasibility();
            if total == 0.0 {
                return Ok(true);
            }
            let mut cost = vec![0.0; self.n];
            for (i, &wi) in w.iter().enumerate() {
                if wi != 0.0 {
                    let row = &self.t[i * self.n..(i + 1) * self.n];
                    for (c, a) in cost.iter_mut().zip(row) {
                        *c += wi * a;
                    }
                }
            }
            match self.step(&cost, true)? {
                Step::Optimal => {
                    self.refresh();
                    return Ok(self.infeasibility().0 == 0.0);
                }
                Step::Unbounded => return Err(Error::Numerical("unbounded phase one".into())),
                Step::Moved => {}
            }
            if self.iterations > max_iter {
                return Err(Error::Numerical("phase one iteration limit".into()));
            }
        }
    }

    /// Relaxes every finite bound outward by a small random amount so that no
    /// vertex is degenerate. Returns the original bounds for [`Tableau::restore`].
    fn perturb(&mut self, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let saved = (self.lo.clone(), self.hi.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in 0..self.lo.len() {
            let scale = |b: f64| PERTURB * (1.0 + b.abs());
            if self.lo[v].is_finite() {
                self.lo[v] -= scale(self.lo[v]) * rng.gen_range(1.0..2.0);
            }
            if self.hi[v].is_finite() {
                self.hi[v] += scale(self.hi[v]) * rng.gen_range(1.0..2.0);
            }
        }
        for &v in &self.nonbasic {
            if self.x[v] == saved.0[v] {
                self.x[v] = self.lo[v];
            } else if self.x[v] == saved.1[v] {
                self.x[v] = self.hi[v];
            }
        }
        self.refresh();
        saved
    }

    /// Puts the original bounds back, snapping nonbasic variables that sat on a
    /// relaxed bound onto the true one.
    fn restore(&mut self, saved: (Vec<f64>, Vec<f64>)) {
        let (lo, hi) = saved;
        for &v in &self.nonbasic {
            if self.x[v] <= self.lo[v] + FEAS_TOL * 0.01 {
                self.x[v] = lo[v];
            } else if self.x[v] >= self.hi[v] - FEAS_TOL * 0.01 {
                self.x[v] = hi[v];
            } else {
                self.x[v] = self.x[v].clamp(lo[v], hi[v]);
            }
        }
        self.lo = lo;
        self.hi = hi;
        self.degenerate = 0;
        self.refresh();
    }

    fn phase_two(&mut self, max_iter: usize) -> Result<bool> {
        loop {
            let cost = self.d.clone();
            match self.step(&cost, false)? {
                Step::Optimal => return Ok(true),
                Step::Unbounded => return Ok(false),
                Step::Moved => {}
            }
            if self.iterations > max_iter {
                return Err(Error::Numerical("phase two iteration limit".into()));
            }
        }
    }
}

/// Solves `p` starting from every variable at its lower bound (or upper bound when
/// the lower one is infinite).
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    let start: Vec<f64> = p
        .bounds
        .iter()
        .map(|&(lo, hi)| if lo.is_finite() { lo } else if hi.is_finite() { hi } else { 0.0 })
        .collect();
    solve_from(p, &start)
}

/// Solves `p` with the nonbasic variables initially at `start` (which must respect the
/// variable bounds; rows may be violated). Interior starting values are allowed, in
/// which case the returned point need not be a vertex.
pub fn solve_from(p: &LpProblem, start: &[f64]) -> Result<LpSolution> {
    p.validate()?;
    if start.len() != p.n_vars() {
        return Err(Error::LengthMismatch(start.len(), p.n_vars()));
    }
    let mut tab = Tableau::new(p, start);
    let max_iter = 200 * (tab.m + tab.n) + 10_000;
    let saved = tab.perturb(0x5eed ^ (tab.m as u64) << 20 ^ tab.n as u64);
    let mut feasible = tab.phase_one(max_iter)?;
    let mut bounded = true;
    if feasible {
        bounded = tab.phase_two(max_iter)?;
    }
    tab.restore(saved);
    if bounded {
        feasible = tab.phase_one(max_iter)?;
    }
    let nv = p.n_vars();
    if !feasible {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            values: tab.x[..nv].to_vec(),
            objective: f64::NAN,
            tight: Vec::new(),
            duals: vec![0.0; p.n_rows()],
            iterations: tab.iterations,
        });
    }
    if bounded {
        bounded = tab.phase_two(max_iter)?;
    }
    tab.refresh();
    let values = tab.x[..nv].to_vec();
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: f64::INFINITY,
            values,
            tight: Vec::new(),
            duals: vec![0.0; p.n_rows()],
            iterations: tab.iterations,
        });
    }
    let viol = p.violation(&values);
    if viol > 1e-6 {
        return Err(Error::Numerical(format!("simplex drifted: violation {viol:.3e}")));
    }
    let mut duals = vec![0.0; p.n_rows()];
    for (j, &v) in tab.nonbasic.iter().enumerate() {
        if v >= nv {
            duals[v - nv] = tab.d[j];
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: dot(&p.objective, &values),
        tight: tight_rows(p, &values, FEAS_TOL),
        values,
        duals,
        iterations: tab.iterations,
    })
}

/// Rows whose activity is within `tol` of a finite bound.
pub fn tight_rows(p: &LpProblem, x: &[f64], tol: f64) -> Vec<usize> {
    (0..p.n_rows())
        .filter(|&r| {
            let (lo, hi) = p.row_bounds(r);
            let a = p.row_activity(r, x);
            (lo.is_finite() && (a - lo).abs() <= tol) || (hi.is_finite() && (a - hi).abs() <= tol)
        })
        .collect()
}

/// Lagrangian upper bound minus the primal objective, computed from the original
/// problem data and the reported row duals. Returns `INFINITY` when the duals have a
/// sign that no finite bound supports.
pub fn duality_gap(p: &LpProblem, sol: &LpSolution) -> f64 {
    let mut reduced = p.objective.clone();
    for r in 0..p.n_rows() {
        let y = sol.duals[r];
        if y != 0.0 {
            for (c, a) in reduced.iter_mut().zip(p.row_coeffs(r)) {
                *c -= y * a;
            }
        }
    }
    let mut bound = 0.0;
    for r in 0..p.n_rows() {
        let y = sol.duals[r];
        let (lo, hi) = p.row_bounds(r);
        let b = if y > 0.0 { hi } else if y < 0.0 { lo } else { 0.0 };
        if !b.is_finite() {
            if y.abs() > COST_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        bound += y * b;
    }
    for (v, &rc) in reduced.iter().enumerate() {
        let (lo, hi) = p.bounds[v];
        let b = if rc > 0.0 { hi } else { lo };
        if !b.is_finite() {
            if rc.abs() > COST_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        bound += rc * b;
    }
    bound - sol.objective
}

/// Result of a tight-constraint rank test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexCertificate {
    pub is_vertex: bool,
    pub rank: usize,
    pub degrees_of_freedom: usize,
    /// When not a vertex: `u` with `point ± u` feasible.
    pub perturbation: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub unique: bool,
    pub degrees_of_freedom: usize,
    /// A feasible point different from the input, when one was found.
    pub witness: Option<Vec<f64>>,
}

fn at_bound(x: f64, (lo, hi): (f64, f64), tol: f64) -> (bool, bool) {
    (lo.is_finite() && (x - lo).abs() <= tol, hi.is_finite() && (x - hi).abs() <= tol)
}

struct TightSystem {
    free: Vec<usize>,
    rank: usize,
    /// Null-space basis over all variables, each normalized to unit sup-norm.
    null: Vec<Vec<f64>>,
}

fn tight_system(p: &LpProblem, x: &[f64], tol: f64) -> TightSystem {
    let nv = p.n_vars();
    let mut fixed = vec![false; nv];
    for v in 0..nv {
        let (a, b) = at_bound(x[v], p.bounds[v], tol);
        fixed[v] = a || b;
    }
    let free: Vec<usize> = (0..nv).filter(|&v| !fixed[v]).collect();
    let mut col = vec![usize::MAX; nv];
    for (k, &v) in free.iter().enumerate() {
        col[v] = k;
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for r in tight_rows(p, x, tol) {
        let full = p.row_coeffs(r);
        let row: Vec<f64> = free.iter().map(|&v| full[v]).collect();
        if row.iter().any(|&a| a != 0.0) {
            rows.push(row);
        }
    }
    let fixed_count = nv - free.len();
    let (rank, null_free) = rank_and_null_space(rows, free.len());
    let null = null_free
        .into_iter()
        .map(|u| {
            let mut full = vec![0.0; nv];
            for (k, &v) in free.iter().enumerate() {
                full[v] = u[k];
            }
            full
        })
        .collect();
    TightSystem { free, rank: rank + fixed_count, null }
}

/// Rank of the rows (length `ncols`) by Gauss-Jordan elimination with partial
/// pivoting, and a basis of their null space.
pub fn rank_and_null_space(mut rows: Vec<Vec<f64>>, ncols: usize) -> (usize, Vec<Vec<f64>>) {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut largest: f64 = 0.0;
    let mut r0 = 0;
    for c in 0..ncols {
        if r0 == rows.len() {
            break;
        }
        let (best, val) = (r0..rows.len())
            .map(|i| (i, rows[i][c].abs()))
            .fold((r0, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if val <= RANK_TOL * largest.max(1.0) {
            continue;
        }
        largest = largest.max(val);
        rows.swap(r0, best);
        let piv = rows[r0][c];
        for v in rows[r0].iter_mut() {
            *v /= piv;
        }
        let prow = rows[r0].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r0 {
                let f = row[c];
                if f != 0.0 {
                    for (a, b) in row.iter_mut().zip(&prow) {
                        *a -= f * b;
                    }
                }
            }
        }
        pivots.push((r0, c));
        r0 += 1;
    }
    let rank = pivots.len();
    let mut is_pivot = vec![false; ncols];
    for &(_, c) in &pivots {
        is_pivot[c] = true;
    }
    let mut null = Vec::new();
    for fcol in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut u = vec![0.0; ncols];
        u[fcol] = 1.0;
        for &(r, c) in &pivots {
            u[c] = -rows[r][fcol];
        }
        let s = u.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        null.push(u.into_iter().map(|v| v / s).collect());
    }
    (rank, null)
}

/// Largest `e <= cap` with `x + e·u` feasible.
fn max_step(p: &LpProblem, x: &[f64], u: &[f64], cap: f64) -> f64 {
    let mut e = cap;
    for (v, &(lo, hi)) in p.bounds.iter().enumerate() {
        if u[v] > 1e-12 && hi.is_finite() {
            e = e.min(((hi - x[v]).max(0.0)) / u[v]);
        } else if u[v] < -1e-12 && lo.is_finite() {
            e = e.min(((x[v] - lo).max(0.0)) / -u[v]);
        }
    }
    for r in 0..p.n_rows() {
        let (lo, hi) = p.row_bounds(r);
        let rate = dot(&p.row_coeffs(r), u);
        let a = p.row_activity(r, x);
        if rate > 1e-12 && hi.is_finite() {
            e = e.min(((hi - a).max(0.0)) / rate);
        } else if rate < -1e-12 && lo.is_finite() {
            e = e.min(((a - lo).max(0.0)) / -rate);
        }
    }
    e
}

fn check_point(p: &LpProblem, point: &[f64]) -> Result<()> {
    p.validate()?;
    if point.len() != p.n_vars() {
        return Err(Error::LengthMismatch(point.len(), p.n_vars()));
    }
    let viol = p.violation(point);
    if viol > 1e-7 {
        return Err(Error::InfeasiblePoint(viol));
    }
    Ok(())
}

/// Vertex test: the tight constraints must have full column rank.
pub fn is_vertex(point: &[f64], p: &LpProblem) -> Result<VertexCertificate> {
    check_point(p, point)?;
    let sys = tight_system(p, point, FEAS_TOL);
    let nv = p.n_vars();
    let perturbation = sys.null.first().map(|dir| {
        let e = max_step(p, point, dir, f64::INFINITY).min(max_step(p, point, &neg(dir), f64::INFINITY));
        dir.iter().map(|v| v * e).collect()
    });
    Ok(VertexCertificate {
        is_vertex: sys.null.is_empty(),
        rank: sys.rank,
        degrees_of_freedom: nv - sys.rank,
        perturbation,
    })
}

fn neg(u: &[f64]) -> Vec<f64> {
    u.iter().map(|v| -v).collect()
}

/// Whether the feasible set of `p` is the single point `point`.
///
/// First the rank test: free directions of the tight system give a witness directly.
/// Then the cone of feasible directions at the point is probed with
/// [`UNIQUENESS_PROBES`] deterministic pseudo-random objectives (each direction is
/// maximized and minimized); a nonzero optimum is a feasible direction.
pub fn is_unique_feasible(point: &[f64], p: &LpProblem) -> Result<UniquenessReport> {
    check_point(p, point)?;
    let sys = tight_system(p, point, FEAS_TOL);
    let nv = p.n_vars();
    let dof = nv - sys.rank;
    if let Some(dir) = sys.null.first() {
        let e = max_step(p, point, dir, 1.0);
        let e2 = max_step(p, point, &neg(dir), 1.0);
        let (dir, e) = if e >= e2 { (dir.clone(), e) } else { (neg(dir), e2) };
        let witness = point.iter().zip(&dir).map(|(x, u)| x + e * u).collect();
        return Ok(UniquenessReport { unique: false, degrees_of_freedom: dof, witness: Some(witness) });
    }
    let _ = &sys.free;
    let (cone, keep) = reduce_cone(feasible_cone(p, point, FEAS_TOL));
    if keep.is_empty() {
        return Ok(UniquenessReport { unique: true, degrees_of_freedom: 0, witness: None });
    }
    let nk = keep.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd5_ca1e);
    for _ in 0..UNIQUENESS_PROBES / 2 {
        let d: Vec<f64> = (0..nk).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for sign in [1.0, -1.0] {
            let mut probe = cone.clone();
            probe.objective = d.iter().map(|v| sign * v).collect();
            let sol = solve_from(&probe, &vec![0.0; nk])?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Numerical("cone probe not optimal".into()));
            }
            let norm = sol.values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if sol.objective > 1e-9 && norm > 1e-9 {
                let mut u = vec![0.0; nv];
                for (k, &v) in keep.iter().enumerate() {
                    u[v] = sol.values[k] / norm;
                }
                let e = max_step(p, point, &u, 1.0);
                if e > 1e-9 {
                    let witness = point.iter().zip(&u).map(|(x, a)| x + e * a).collect();
                    return Ok(UniquenessReport { unique: false, degrees_of_freedom: 0, witness: Some(witness) });
                }
            }
        }
    }
    Ok(UniquenessReport { unique: true, degrees_of_freedom: 0, witness: None })
}

/// Directions `u` in `[-1,1]^n` that keep every constraint tight at `x` satisfied.
fn feasible_cone(p: &LpProblem, x: &[f64], tol: f64) -> LpProblem {
    let nv = p.n_vars();
    let bounds = (0..nv)
        .map(|v| {
            let (atlo, athi) = at_bound(x[v], p.bounds[v], tol);
            match (atlo, athi) {
                (true, true) => (0.0, 0.0),
                (true, false) => (0.0, 1.0),
                (false, true) => (-1.0, 0.0),
                _ => (-1.0, 1.0),
            }
        })
        .collect();
    let mut cone = LpProblem {
        dims: p.dims.clone(),
        bounds,
        objective: vec![0.0; nv],
        order: Vec::new(),
        constraints: Vec::new(),
    };
    for r in tight_rows(p, x, tol) {
        if r < p.order.len() {
            cone.order.push(p.order[r]);
            continue;
        }
        let c = &p.constraints[r - p.order.len()];
        cone.constraints.push(LinearConstraint { coeffs: c.coeffs.clone(), relation: c.relation, rhs: 0.0 });
    }
    cone
}

/// Fixes cone variables to zero where bound propagation through the order pairs
/// and the rows forces it, and drops them. Returns the cone over the remaining
/// variables (as a 1D problem) and their original indices.
fn reduce_cone(cone: LpProblem) -> (LpProblem, Vec<usize>) {
    let nv = cone.n_vars();
    let mut lo: Vec<f64> = cone.bounds.iter().map(|b| b.0).collect();
    let mut hi: Vec<f64> = cone.bounds.iter().map(|b| b.1).collect();
    let zero = |a: f64| a.abs() <= 1e-12;
    loop {
        let mut changed = false;
        for &(a, b) in &cone.order {
            if hi[b] < hi[a] {
                hi[a] = hi[b];
                changed = true;
            }
            if lo[a] > lo[b] {
                lo[b] = lo[a];
                changed = true;
            }
        }
        for c in &cone.constraints {
            let (mut min_all_zero, mut max_all_zero) = (true, true);
            for (v, &a) in c.coeffs.iter().enumerate() {
                if zero(a) {
                    continue;
                }
                let (t1, t2) = (a * lo[v], a * hi[v]);
                min_all_zero &= t1.min(t2) >= 0.0;
                max_all_zero &= t1.max(t2) <= 0.0;
            }
            let force = match c.relation {
                Relation::Eq => min_all_zero || max_all_zero,
                Relation::Ge => max_all_zero,
                Relation::Le => min_all_zero,
            };
            if force {
                for (v, &a) in c.coeffs.iter().enumerate() {
                    if !zero(a) && (lo[v] != 0.0 || hi[v] != 0.0) {
                        lo[v] = 0.0;
                        hi[v] = 0.0;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let keep: Vec<usize> = (0..nv).filter(|&v| lo[v] != 0.0 || hi[v] != 0.0).collect();
    let mut col = vec![usize::MAX; nv];
    for (k, &v) in keep.iter().enumerate() {
        col[v] = k;
    }
    let dims = vec![keep.len().max(1)];
    let mut reduced = LpProblem {
        dims,
        bounds: keep.iter().map(|&v| (lo[v], hi[v])).collect(),
        objective: vec![0.0; keep.len()],
        order: cone
            .order
            .iter()
            .filter(|&&(a, b)| col[a] != usize::MAX && col[b] != usize::MAX)
            .map(|&(a, b)| (col[a], col[b]))
            .collect(),
        constraints: Vec::new(),
    };
    for c in &cone.constraints {
        let coeffs: Vec<f64> = keep.iter().map(|&v| c.coeffs[v]).collect();
        if coeffs.iter().any(|&a| !zero(a)) {
            reduced.constraints.push(LinearConstraint { coeffs, relation: c.relation, rhs: 0.0 });
        }
    }
    (reduced, keep)
}

/// A separable objective `c(x) = Π_a w_a(x_a) · Σ_a φ_a(x_a)` with `φ_a` drawn from
/// `[-1,1]` by a seeded generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableObjective {
    pub coeffs: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
}

/// `weights[a]` holds per-cell weights along axis `a` (pass all ones for Lebesgue).
pub fn random_separable_objective(seed: u64, dims: &[usize], weights: &[Vec<f64>]) -> Result<SeparableObjective> {
    let shape = Shape::new(dims)?;
    if weights.len() != dims.len() || weights.iter().zip(dims).any(|(w, &d)| w.len() != d) {
        return Err(Error::LengthMismatch(weights.len(), dims.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles: Vec<Vec<f64>> = dims.iter().map(|&d| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let coeffs = (0..shape.len())
        .map(|c| {
            let idx = shape.unravel(c);
            let w: f64 = idx.iter().enumerate().map(|(a, &i)| weights[a][i]).product();
            let s: f64 = idx.iter().enumerate().map(|(a, &i)| profiles[a][i]).sum();
            w * s
        })
        .collect();
    Ok(SeparableObjective { coeffs, profiles })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upset_indicator(dims: &[usize], f: impl Fn(&[usize]) -> bool) -> Vec<f64> {
        let s = Shape::new(dims).unwrap();
        (0..s.len()).map(|c| if f(&s.unravel(c)) { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn single_variable() {
        let p = LpProblem::new(&[1]).unwrap().with_objective(&[1.0]);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binding_mean_constraint() {
        let mut p = LpProblem::new(&[2, 2]).unwrap().with_monotonicity().with_objective(&[1.0; 4]);
        p.add_constraint(&[0.25; 4], Relation::Le, 0.5);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!(duality_gap(&p, &s).abs() < 1e-7);
    }

    #[test]
    fn transport_feasibility() {
        // Row and column means 0.5 on a 2x2 table.
        let mut p = LpProblem::new(&[2, 2]).unwrap();
        p.add_constraint(&[0.5, 0.5, 0.0, 0.0], Relation::Eq, 0.5);
        p.add_constraint(&[0.0, 0.0, 0.5, 0.5], Relation::Eq, 0.5);
        p.add_constraint(&[0.5, 0.0, 0.5, 0.0], Relation::Eq, 0.5);
        p.add_constraint(&[0.0, 0.5, 0.0, 0.5], Relation::Eq, 0.5);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(p.violation(&s.values) < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(&[2]).unwrap();
        p.add_constraint(&[1.0, 1.0], Relation::Ge, 3.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
        let mut p = LpProblem::new(&[1]).unwrap();
        p.add_extra(0.0, f64::INFINITY, 1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn upset_indicators_are_vertices() {
        let dims = [4, 3];
        let p = LpProblem::new(&dims).unwrap().with_monotonicity();
        let x = upset_indicator(&dims, |i| i[0] + i[1] >= 3);
        assert!(is_vertex(&x, &p).unwrap().is_vertex);
        let half = vec![0.5; 12];
        let cert = is_vertex(&half, &p).unwrap();
        assert!(!cert.is_vertex);
        assert_eq!(cert.degrees_of_freedom, 1);
        let u = cert.perturbation.unwrap();
        assert!(u.iter().all(|&v| (v.abs() - 0.5).abs() < 1e-12));
    }

    #[test]
    fn mixture_with_binding_constraint_is_vertex() {
        // f = 0.5·1_{A1} + 0.5·1_{A2}, A1 = {i >= 2}, A2 = {i >= 1}, on a 3x2 grid.
        let dims = [3, 2];
        let f = upset_indicator(&dims, |i| i[0] >= 2).iter().zip(upset_indicator(&dims, |i| i[0] >= 1)).map(|(a, b)| 0.5 * a + 0.5 * b).collect::<Vec<_>>();
        let phi = [0.3, -0.2, 1.0, 0.4, 0.7, 0.1];
        let eta = dot(&phi, &f);
        let mut p = LpProblem::new(&dims).unwrap().with_monotonicity();
        p.add_constraint(&phi, Relation::Eq, eta);
        assert!(is_vertex(&f, &p).unwrap().is_vertex);
    }

    fn marginal_problem(dims: [usize; 2], f: &[f64]) -> LpProblem {
        let mut p = LpProblem::new(&dims).unwrap();
        for i in 0..dims[0] {
            let mut c = vec![0.0; dims[0] * dims[1]];
            for j in 0..dims[1] {
                c[i * dims[1] + j] = 1.0;
            }
            let rhs = dot(&c, f);
            p.add_constraint(&c, Relation::Eq, rhs);
        }
        for j in 0..dims[1] {
            let mut c = vec![0.0; dims[0] * dims[1]];
            for i in 0..dims[0] {
                c[i * dims[1] + j] = 1.0;
            }
            let rhs = dot(&c, f);
            p.add_constraint(&c, Relation::Eq, rhs);
        }
        p
    }

    #[test]
    fn uniqueness_examples() {
        let dims = [4, 5];
        let f = upset_indicator(&dims, |i| 2 * i[0] + i[1] >= 5);
        assert!(is_unique_feasible(&f, &marginal_problem(dims, &f)).unwrap().unique);

        let half = vec![0.5; 4];
        let r = is_unique_feasible(&half, &marginal_problem([2, 2], &half)).unwrap();
        assert!(!r.unique);
        let w = r.witness.unwrap();
        assert!(w.iter().zip(&half).any(|(a, b)| (a - b).abs() > 1e-6));
        assert!(marginal_problem([2, 2], &half).violation(&w) < 1e-9);

        let zero = vec![0.0; 6];
        assert!(is_unique_feasible(&zero, &marginal_problem([2, 3], &zero)).unwrap().unique);
    }

    #[test]
    fn nonmonotone_zero_one_vertex_is_not_unique() {
        // A 0/1 permutation-like table is a vertex but shares marginals with its transpose.
        let f = vec![1.0, 0.0, 0.0, 1.0];
        let p = marginal_problem([2, 2], &f);
        assert!(is_vertex(&f, &p).unwrap().is_vertex);
        let r = is_unique_feasible(&f, &p).unwrap();
        assert!(!r.unique);
    }

    #[test]
    fn separable_objective_properties() {
        let dims = [4, 3];
        let ones: Vec<Vec<f64>> = dims.iter().map(|&d| vec![1.0; d]).collect();
        let a = random_separable_objective(7, &dims, &ones).unwrap();
        assert_eq!(a, random_separable_objective(7, &dims, &ones).unwrap());
        let zeros: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
        assert!(random_separable_objective(7, &dims, &zeros).unwrap().coeffs.iter().all(|&c| c == 0.0));
        let s1: f64 = a.profiles[1].iter().sum();
        for i in 0..4 {
            let row: f64 = (0..3).map(|j| a.coeffs[i * 3 + j]).sum();
            assert!((row - (3.0 * a.profiles[0][i] + s1)).abs() < 1e-12);
        }
    }
}
