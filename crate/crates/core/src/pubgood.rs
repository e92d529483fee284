//! Public-good provision with interdependent values under ex-post IC and IR and an
//! ex-ante budget constraint.
//!
//! Signals live on a grid of equal cells; a discrete type `k` along axis `i` has the
//! value `v_i(k)`, and the envelope integral becomes the prefix sum of
//! `α(j)·dv_i(j)` over `j < k`, where `dv_i` is the forward difference of `v_i`. With
//! that convention the resulting transfers are exactly ex-post IC for any monotone `α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{is_monotone, GridFunction, Shape};
use crate::solver::{solve_lp, LpProblem, LpStatus, Relation};

/// Values within this distance of 0, 1, or each other count as equal.
pub const LEVEL_TOL: f64 = 1e-7;
/// Objective tolerance when comparing the symmetric and unrestricted optima.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Joint signal law on a box, discretized by density at cell centres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JointDensity {
    Uniform,
    /// Equicorrelated normal with per-axis `mu`, `sigma`, truncated to the domain.
    TruncatedNormal { mu: Vec<f64>, sigma: Vec<f64>, rho: f64 },
    /// `ln s` is equicorrelated normal with per-axis `mu`, `sigma`.
    TruncatedLognormal { mu: Vec<f64>, sigma: Vec<f64>, rho: f64 },
    /// Cell probabilities, row-major.
    Table { probs: Vec<f64> },
}

impl JointDensity {
    /// Cell probabilities on `dims` cells over `domain`, summing to one.
    pub fn cell_probs(&self, dims: &[usize], domain: &[(f64, f64)]) -> Result<Vec<f64>> {
        let shape = Shape::new(dims)?;
        let n = dims.len();
        if domain.len() != n {
            return Err(Error::LengthMismatch(domain.len(), n));
        }
        let center = |c: usize| -> Vec<f64> {
            shape
                .unravel(c)
                .iter()
                .enumerate()
                .map(|(a, &k)| domain[a].0 + (k as f64 + 0.5) * (domain[a].1 - domain[a].0) / dims[a] as f64)
                .collect()
        };
        let gauss = |z: &[f64], rho: f64| -> f64 {
            let s: f64 = z.iter().sum();
            let s2: f64 = z.iter().map(|x| x * x).sum();
            let q = (s2 - rho / (1.0 + (n as f64 - 1.0) * rho) * s * s) / (1.0 - rho);
            (-0.5 * q).exp()
        };
        let check = |mu: &Vec<f64>, sigma: &Vec<f64>, rho: f64| -> Result<()> {
            if mu.len() != n || sigma.len() != n {
                return Err(Error::LengthMismatch(mu.len(), n));
            }
            if sigma.iter().any(|&s| !(s > 0.0)) || !(rho > -1.0 / (n as f64 - 1.0).max(1.0) && rho < 1.0) {
                return Err(Error::InvalidGrid("bad normal parameters".into()));
            }
            Ok(())
        };
        let raw: Vec<f64> = match self {
            JointDensity::Uniform => vec![1.0; shape.len()],
            JointDensity::TruncatedNormal { mu, sigma, rho } => {
                check(mu, sigma, *rho)?;
                (0..shape.len())
                    .map(|c| {
                        let x = center(c);
                        let z: Vec<f64> = (0..n).map(|a| (x[a] - mu[a]) / sigma[a]).collect();
                        gauss(&z, *rho)
                    })
                    .collect()
            }
            JointDensity::TruncatedLognormal { mu, sigma, rho } => {
                check(mu, sigma, *rho)?;
                if domain.iter().any(|d| d.0 < 0.0) {
                    return Err(Error::InvalidGrid("lognormal domain must be nonnegative".into()));
                }
                (0..shape.len())
                    .map(|c| {
                        let x = center(c);
                        let z: Vec<f64> = (0..n).map(|a| (x[a].ln() - mu[a]) / sigma[a]).collect();
                        gauss(&z, *rho) / x.iter().product::<f64>()
                    })
                    .collect()
            }
            JointDensity::Table { probs } => {
                if probs.len() != shape.len() {
                    return Err(Error::LengthMismatch(probs.len(), shape.len()));
                }
                if probs.iter().any(|&p| !(p >= 0.0)) {
                    return Err(Error::InvalidGrid("negative probability".into()));
                }
                probs.clone()
            }
        };
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidGrid("density has no mass".into()));
        }
        Ok(raw.into_iter().map(|p| p / total).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueModel {
    /// `v_i = s_i + w·Σ_{j≠i} s_j`.
    LinearExternality { w: f64 },
    /// Two agents, `v_i = max(s_i - s_{-i}, 0)`.
    LimitedNegative,
}

/// A fully tabulated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicGoodScenario {
    pub dims: Vec<usize>,
    pub domain: Vec<(f64, f64)>,
    /// Cell probabilities, row-major.
    pub density: Vec<f64>,
    /// `values[i][cell]` is agent `i`'s willingness to pay.
    pub values: Vec<Vec<f64>>,
    /// Forward differences of `values[i]` along axis `i`; the last slice is unused.
    pub dv: Vec<Vec<f64>>,
    pub cost: f64,
    pub symmetric: bool,
}

impl PublicGoodScenario {
    pub fn build(dims: &[usize], domain: &[(f64, f64)], density: &JointDensity, values: &ValueModel, cost: f64) -> Result<Self> {
        let shape = Shape::new(dims)?;
        let n = dims.len();
        let probs = density.cell_probs(dims, domain)?;
        let center = |c: usize, a: usize| {
            domain[a].0 + (shape.coord(c, a) as f64 + 0.5) * (domain[a].1 - domain[a].0) / dims[a] as f64
        };
        let (vals, dv): (Vec<Vec<f64>>, Vec<Vec<f64>>) = match values {
            ValueModel::LinearExternality { w } => {
                let vals: Vec<Vec<f64>> = (0..n)
                    .map(|i| {
                        (0..shape.len())
                            .map(|c| (0..n).map(|a| if a == i { center(c, a) } else { w * center(c, a) }).sum())
                            .collect()
                    })
                    .collect();
                let dv = (0..n).map(|i| forward_difference(&shape, &vals[i], i)).collect();
                (vals, dv)
            }
            ValueModel::LimitedNegative => {
                if n != 2 {
                    return Err(Error::InvalidGrid("limited negative externalities need two agents".into()));
                }
                if dims[0] != dims[1] || domain[0] != domain[1] {
                    return Err(Error::DimsUnequal(dims.to_vec()));
                }
                let h = (domain[0].1 - domain[0].0) / dims[0] as f64;
                let vals: Vec<Vec<f64>> = (0..2)
                    .map(|i| (0..shape.len()).map(|c| (center(c, i) - center(c, 1 - i)).max(0.0)).collect())
                    .collect();
                // The kink sits on the diagonal, so the own-signal increment is h·1{s_i >= s_-i}.
                let dv = (0..2)
                    .map(|i| {
                        (0..shape.len())
                            .map(|c| if shape.coord(c, i) >= shape.coord(c, 1 - i) { h } else { 0.0 })
                            .collect()
                    })
                    .collect();
                (vals, dv)
            }
        };
        let mut s = PublicGoodScenario {
            dims: dims.to_vec(),
            domain: domain.to_vec(),
            density: probs,
            values: vals,
            dv,
            cost,
            symmetric: false,
        };
        s.symmetric = s.is_symmetric();
        s.validate()?;
        Ok(s)
    }

    pub fn shape(&self) -> Shape {
        Shape::new(&self.dims).expect("validated dims")
    }

    pub fn validate(&self) -> Result<()> {
        let shape = Shape::new(&self.dims)?;
        let n = self.dims.len();
        if self.values.len() != n || self.dv.len() != n || self.density.len() != shape.len() {
            return Err(Error::LengthMismatch(self.values.len(), n));
        }
        if self.density.iter().any(|&p| p < 0.0) || (self.density.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidGrid("density must be nonnegative and sum to 1".into()));
        }
        for i in 0..n {
            if self.values[i].len() != shape.len() || self.dv[i].len() != shape.len() {
                return Err(Error::LengthMismatch(self.values[i].len(), shape.len()));
            }
            if self.dv[i].iter().any(|&d| d < -1e-12) {
                return Err(Error::InvalidGrid(format!("v_{i} decreases in its own signal")));
            }
        }
        Ok(())
    }

    /// Exchangeable density and permutation-symmetric values.
    fn is_symmetric(&self) -> bool {
        let n = self.dims.len();
        if n != 2 || self.dims[0] != self.dims[1] || self.domain[0] != self.domain[1] {
            return n == 1;
        }
        let shape = self.shape();
        let swap = |c: usize| {
            let i = shape.unravel(c);
            shape.flat(&[i[1], i[0]])
        };
        (0..shape.len()).all(|c| {
            let d = swap(c);
            (self.density[c] - self.density[d]).abs() <= 1e-12
                && (self.values[0][c] - self.values[1][d]).abs() <= 1e-12
        })
    }

    /// Expected surplus coefficients `g(s)·(Σ_i v_i(s) - c)`.
    pub fn surplus_coeffs(&self) -> Vec<f64> {
        (0..self.density.len())
            .map(|c| self.density[c] * (self.values.iter().map(|v| v[c]).sum::<f64>() - self.cost))
            .collect()
    }

    /// Coefficients of the linear budget functional `E[Σ_i t_i - c·α]`.
    pub fn budget_coeffs(&self) -> Vec<f64> {
        let shape = self.shape();
        let mut coef = self.surplus_coeffs();
        for (i, dv) in self.dv.iter().enumerate() {
            // Mass strictly above each cell along axis i, same other coordinates.
            let upper = suffix_mass_above(&shape, &self.density, i);
            for c in 0..coef.len() {
                coef[c] -= dv[c] * upper[c];
            }
        }
        coef
    }
}

fn forward_difference(shape: &Shape, v: &[f64], axis: usize) -> Vec<f64> {
    let stride = shape.strides()[axis];
    let m = shape.dims()[axis];
    (0..v.len()).map(|c| if shape.coord(c, axis) + 1 < m { v[c + stride] - v[c] } else { 0.0 }).collect()
}

/// `out[c] = Σ_{k > c_axis} w(k, c_{-axis})`.
fn suffix_mass_above(shape: &Shape, w: &[f64], axis: usize) -> Vec<f64> {
    let stride = shape.strides()[axis];
    let m = shape.dims()[axis];
    let mut out = vec![0.0; w.len()];
    for c in 0..w.len() {
        if shape.coord(c, axis) == 0 {
            let mut acc = 0.0;
            for k in (0..m).rev() {
                let cell = c + k * stride;
                out[cell] = acc;
                acc += w[cell];
            }
        }
    }
    out
}

/// Allocation `1` where `φ >= k_high`, `p` where `k_low <= φ < k_high`, else `0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoThresholdPolicy {
    pub aggregator: GridFunction,
    pub k_low: f64,
    pub k_high: f64,
    pub p: f64,
}

impl TwoThresholdPolicy {
    pub fn allocation(&self) -> GridFunction {
        let v = self
            .aggregator
            .values()
            .iter()
            .map(|&x| if x >= self.k_high { 1.0 } else if x >= self.k_low { self.p } else { 0.0 })
            .collect();
        GridFunction::new(self.aggregator.dims(), v).expect("policy values in [0,1]")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechanismResult {
    pub allocation: GridFunction,
    pub transfers: Vec<Vec<f64>>,
    pub expected_surplus: f64,
    pub budget_slack: f64,
    pub policy: TwoThresholdPolicy,
    pub lp_iterations: usize,
}

/// Envelope transfers `t_i(s) = α(s)v_i(s) - Σ_{j < s_i} α(j, s_-i)·dv_i(j, s_-i)`.
pub fn compute_transfers(alpha: &GridFunction, s: &PublicGoodScenario) -> Vec<Vec<f64>> {
    let shape = alpha.shape();
    let a = alpha.values();
    (0..s.values.len())
        .map(|i| {
            let stride = shape.strides()[i];
            let m = shape.dims()[i];
            let mut t = vec![0.0; a.len()];
            for c in 0..a.len() {
                if shape.coord(c, i) == 0 {
                    let mut rent = 0.0;
                    for k in 0..m {
                        let cell = c + k * stride;
                        t[cell] = a[cell] * s.values[i][cell] - rent;
                        rent += a[cell] * s.dv[i][cell];
                    }
                }
            }
            t
        })
        .collect()
}

/// Largest gain from misreporting along any axis; `ok` when it is at most `tol`.
pub fn verify_expost_ic(alpha: &GridFunction, t: &[Vec<f64>], s: &PublicGoodScenario, tol: f64) -> (bool, f64) {
    let shape = alpha.shape();
    let a = alpha.values();
    let mut worst: f64 = 0.0;
    for (i, ti) in t.iter().enumerate() {
        let stride = shape.strides()[i];
        let m = shape.dims()[i];
        for c in 0..a.len() {
            let base = c - shape.coord(c, i) * stride;
            let truth = a[c] * s.values[i][c] - ti[c];
            for k in 0..m {
                let r = base + k * stride;
                worst = worst.max(a[r] * s.values[i][c] - ti[r] - truth);
            }
        }
    }
    (worst <= tol, worst)
}

/// Ex-post utilities `α·v_i - t_i`; all nonnegative under envelope transfers.
pub fn utilities(alpha: &GridFunction, t: &[Vec<f64>], s: &PublicGoodScenario) -> Vec<Vec<f64>> {
    t.iter()
        .enumerate()
        .map(|(i, ti)| alpha.values().iter().zip(ti).zip(&s.values[i]).map(|((a, t), v)| a * v - t).collect())
        .collect()
}

/// The designer's LP: maximize expected surplus over monotone `α` with nonnegative
/// expected budget.
pub fn public_good_lp(s: &PublicGoodScenario) -> Result<LpProblem> {
    let mut p = LpProblem::new(&s.dims)?.with_monotonicity().with_objective(&s.surplus_coeffs());
    p.add_constraint(&s.budget_coeffs(), Relation::Ge, 0.0);
    Ok(p)
}

/// Two-agent LP restricted to exchangeable `α`, with one variable per unordered cell
/// pair `i <= j`. Returns the problem and the map from grid cells to variables.
pub fn symmetric_public_good_lp(s: &PublicGoodScenario) -> Result<(LpProblem, Vec<usize>)> {
    let m = s.dims[0];
    if s.dims.len() != 2 || s.dims[1] != m {
        return Err(Error::DimsUnequal(s.dims.clone()));
    }
    let var = |i: usize, j: usize| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        // Row-major index into the upper triangle.
        a * m - a * (a + 1) / 2 + b
    };
    let k = m * (m + 1) / 2;
    let map: Vec<usize> = (0..m * m).map(|c| var(c / m, c % m)).collect();
    let fold = |coef: &[f64]| {
        let mut out = vec![0.0; k];
        for (c, &v) in coef.iter().enumerate() {
            out[map[c]] += v;
        }
        out
    };
    let mut p = LpProblem::new(&[k])?.with_objective(&fold(&s.surplus_coeffs()));
    for a in 0..m {
        for b in a..m {
            if a < b {
                p.order.push((var(a, b), var(a + 1, b)));
            }
            if b + 1 < m {
                p.order.push((var(a, b), var(a, b + 1)));
            }
        }
    }
    p.add_constraint(&fold(&s.budget_coeffs()), Relation::Ge, 0.0);
    Ok((p, map))
}

/// Snaps values to `{0, p, 1}` and returns `p`, or a structure violation.
fn two_level(alpha: &[f64]) -> Result<(Vec<f64>, Option<f64>)> {
    let mut p: Option<f64> = None;
    let mut out = Vec::with_capacity(alpha.len());
    for &v in alpha {
        if v <= LEVEL_TOL {
            out.push(0.0);
        } else if v >= 1.0 - LEVEL_TOL {
            out.push(1.0);
        } else {
            match p {
                None => p = Some(v),
                Some(q) if (q - v).abs() <= LEVEL_TOL => {}
                Some(q) => return Err(Error::StructureViolation(format!("two interior levels {q} and {v}"))),
            }
            out.push(v);
        }
    }
    Ok((out, p))
}

fn finish(s: &PublicGoodScenario, values: Vec<f64>, lp_iterations: usize) -> Result<MechanismResult> {
    let (snapped, p) = two_level(&values)?;
    let allocation = GridFunction::new(&s.dims, snapped)?;
    if !is_monotone(&allocation, LEVEL_TOL) {
        return Err(Error::StructureViolation("allocation is not monotone".into()));
    }
    let transfers = compute_transfers(&allocation, s);
    let expected_surplus = dot(&s.surplus_coeffs(), allocation.values());
    let budget_slack = dot(&s.budget_coeffs(), allocation.values());
    let policy = match p {
        Some(p) => TwoThresholdPolicy { aggregator: allocation.clone(), k_low: p, k_high: 1.0, p },
        None => TwoThresholdPolicy { aggregator: allocation.clone(), k_low: 1.0, k_high: 1.0, p: 1.0 },
    };
    Ok(MechanismResult { allocation, transfers, expected_surplus, budget_slack, policy, lp_iterations })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Optimal two-threshold mechanism. For symmetric scenarios the LP is re-solved over
/// exchangeable allocations and must reach the same optimum.
pub fn solve_public_good(s: &PublicGoodScenario) -> Result<MechanismResult> {
    s.validate()?;
    let free = solve_lp(&public_good_lp(s)?)?;
    if free.status != LpStatus::Optimal {
        return Err(Error::Infeasible(format!("public good LP is {:?}", free.status)));
    }
    if !s.symmetric || s.dims.len() != 2 {
        return finish(s, free.values, free.iterations);
    }
    let (sp, map) = symmetric_public_good_lp(s)?;
    let sym = solve_lp(&sp)?;
    if sym.status != LpStatus::Optimal || (sym.objective - free.objective).abs() > SYMMETRY_TOL {
        return Err(Error::StructureViolation(format!(
            "symmetric optimum {} differs from unrestricted optimum {}",
            sym.objective, free.objective
        )));
    }
    let values = map.iter().map(|&v| sym.values[v]).collect();
    finish(s, values, free.iterations + sym.iterations)
}

/// Verdicts on the discrete conditional hazard `h(i|j) = P(s1 = i | j) / P(s1 >= i | j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HazardReport {
    pub increasing_in_s1: bool,
    pub decreasing_in_s2: bool,
    /// `hazard[i * m2 + j]`.
    pub hazard: Vec<f64>,
}

impl HazardReport {
    pub fn passes(&self) -> bool {
        self.increasing_in_s1 && self.decreasing_in_s2
    }
}

pub fn check_hazard_condition(density: &[f64], dims: &[usize]) -> Result<HazardReport> {
    if dims.len() != 2 || density.len() != dims[0] * dims[1] {
        return Err(Error::InvalidGrid("hazard check needs a 2D table".into()));
    }
    let (m1, m2) = (dims[0], dims[1]);
    let mut hazard = vec![0.0; m1 * m2];
    for j in 0..m2 {
        let col: f64 = (0..m1).map(|i| density[i * m2 + j]).sum();
        if !(col > 0.0) {
            return Err(Error::DegenerateConditional(j));
        }
        let mut tail = 1.0;
        for i in 0..m1 {
            let p = density[i * m2 + j] / col;
            hazard[i * m2 + j] = if tail > 1e-300 { p / tail } else { 1.0 };
            tail -= p;
        }
    }
    let tol = 1e-12;
    let increasing_in_s1 = (0..m2).all(|j| (1..m1).all(|i| hazard[i * m2 + j] >= hazard[(i - 1) * m2 + j] - tol));
    let decreasing_in_s2 = (0..m1).all(|i| (1..m2).all(|j| hazard[i * m2 + j] <= hazard[i * m2 + j - 1] + tol));
    Ok(HazardReport { increasing_in_s1, decreasing_in_s2, hazard })
}

/// `α = weight·1{max(s) >= k_low} + (1 - weight)·1{max(s) >= k_high}`, prices as signal values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefundPrices {
    pub k_low: f64,
    pub k_high: f64,
    pub weight: f64,
}

impl RefundPrices {
    /// One posted price up to the grid: either no mixing or mixing between prices at
    /// most one cell apart, which is how a budget-binding single price shows up on a grid.
    pub fn is_single_threshold(&self, cell: f64) -> bool {
        self.weight >= 1.0 - LEVEL_TOL || self.k_high - self.k_low <= cell + 1e-9
    }
}

/// Optimal mechanism with limited negative externalities, checked to be a mixture of
/// two externality-refund mechanisms with aggregator `max(s1, s2)`.
pub fn solve_limited_negative_externality(
    dims: &[usize],
    domain: &[(f64, f64)],
    density: &JointDensity,
    cost: f64,
) -> Result<(MechanismResult, RefundPrices)> {
    let s = PublicGoodScenario::build(dims, domain, density, &ValueModel::LimitedNegative, cost)?;
    let res = solve_public_good(&s)?;
    let prices = refund_prices(&res.allocation, domain[0])?;
    Ok((res, prices))
}

/// Reads the refund prices off an allocation that depends on `max(i, j)` only.
pub fn refund_prices(alpha: &GridFunction, domain: (f64, f64)) -> Result<RefundPrices> {
    let m = alpha.dims()[0];
    let a = alpha.values();
    let diag: Vec<f64> = (0..m).map(|k| a[k * m + k]).collect();
    for i in 0..m {
        for j in 0..m {
            let want = diag[i.max(j)];
            if (a[i * m + j] - want).abs() > LEVEL_TOL {
                return Err(Error::StructureViolation(format!("cell ({i}, {j}) is not a function of max(s1, s2)")));
            }
        }
    }
    let h = (domain.1 - domain.0) / m as f64;
    let price = |k: Option<usize>| k.map_or(domain.1, |k| domain.0 + k as f64 * h);
    let first_pos = diag.iter().position(|&v| v > LEVEL_TOL);
    let first_one = diag.iter().position(|&v| v >= 1.0 - LEVEL_TOL);
    let weight = match (first_pos, first_one) {
        (Some(k), Some(l)) if k < l => diag[k],
        (Some(k), None) => diag[k],
        _ => 1.0,
    };
    Ok(RefundPrices { k_low: price(first_pos), k_high: price(first_one), weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_lp, RefOutcome};

    fn unit(m: usize) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); m]
    }

    fn linear(m: usize, w: f64, c: f64) -> PublicGoodScenario {
        PublicGoodScenario::build(&[m, m], &unit(2), &JointDensity::Uniform, &ValueModel::LinearExternality { w }, c).unwrap()
    }

    #[test]
    fn transfers_examples() {
        let s = linear(5, 0.0, 1.0);
        let zero = GridFunction::constant(&[5, 5], 0.0).unwrap();
        assert!(compute_transfers(&zero, &s).iter().all(|t| t.iter().all(|&x| x == 0.0)));
        let one = GridFunction::constant(&[5, 5], 1.0).unwrap();
        let t = compute_transfers(&one, &s);
        // v_1 = s_1 at cell centres, rent = k·h: t = (k + 1/2)h - kh = h/2.
        assert!(t[0].iter().all(|&x| (x - 0.1).abs() < 1e-12));
        let s1 = PublicGoodScenario::build(&[10], &unit(1), &JointDensity::Uniform, &ValueModel::LinearExternality { w: 0.0 }, 0.0)
            .unwrap();
        let post = GridFunction::from_fn(&[10], |i| if i[0] >= 4 { 1.0 } else { 0.0 }).unwrap();
        let t = compute_transfers(&post, &s1);
        for k in 0..10 {
            let want = if k >= 4 { 0.4 } else { 0.0 };
            assert!((t[0][k] - want).abs() <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn ic_examples() {
        let s = linear(6, 0.1, 0.5);
        let inc = GridFunction::from_fn(&[6, 6], |i| (i[0] + i[1]) as f64 / 10.0).unwrap();
        let zero_t = vec![vec![0.0; 36]; 2];
        assert!(!verify_expost_ic(&inc, &zero_t, &s, 1e-9).0);
        let t = compute_transfers(&inc, &s);
        let (ok, worst) = verify_expost_ic(&inc, &t, &s, 1e-12);
        assert!(ok, "{worst}");
        let c = GridFunction::constant(&[6, 6], 0.7).unwrap();
        assert!(verify_expost_ic(&c, &zero_t, &s, 1e-12).0);
        assert!(utilities(&inc, &t, &s).iter().all(|u| u.iter().all(|&x| x >= -1e-12)));
    }

    #[test]
    fn extreme_costs() {
        let s = linear(5, 0.1, 10.0);
        let r = solve_public_good(&s).unwrap();
        assert!(r.allocation.values().iter().all(|&v| v == 0.0) && r.expected_surplus == 0.0);
        let s = linear(5, 0.1, -1.0);
        let r = solve_public_good(&s).unwrap();
        assert!(r.allocation.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn matches_brute_force() {
        for (c, w) in [(0.6, 0.1), (0.9, 0.3), (1.1, 0.0)] {
            let s = PublicGoodScenario::build(
                &[5, 5],
                &unit(2),
                &JointDensity::TruncatedNormal { mu: vec![0.5, 0.5], sigma: vec![0.3, 0.3], rho: 0.4 },
                &ValueModel::LinearExternality { w },
                c,
            )
            .unwrap();
            let r = solve_public_good(&s).unwrap();
            assert!(r.budget_slack >= -1e-7);
            match brute_force_lp(&public_good_lp(&s).unwrap()).unwrap() {
                RefOutcome::Optimal { value, .. } => assert!((value - r.expected_surplus).abs() <= 1e-7),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn hazard_examples() {
        let u = vec![1.0 / 16.0; 16];
        let rep = check_hazard_condition(&u, &[4, 4]).unwrap();
        assert!(rep.passes());
        assert!((rep.hazard[0] - 0.25).abs() < 1e-12 && (rep.hazard[2 * 4] - 0.5).abs() < 1e-12);
        let d = JointDensity::TruncatedNormal { mu: vec![0.5, 0.5], sigma: vec![0.3, 0.3], rho: 0.5 };
        let p = d.cell_probs(&[12, 12], &unit(2)).unwrap();
        assert!(check_hazard_condition(&p, &[12, 12]).unwrap().passes());
        // Low s2 puts its mass on high s1.
        let bad = vec![0.01, 0.1, 0.1, 0.01, 0.1, 0.1, 0.3, 0.1, 0.18];
        assert!(!check_hazard_condition(&bad, &[3, 3]).unwrap().passes());
        let hole = vec![0.5, 0.0, 0.5, 0.0];
        assert_eq!(check_hazard_condition(&hole, &[2, 2]), Err(Error::DegenerateConditional(1)));
    }

    #[test]
    fn limited_negative_structure() {
        let d = JointDensity::TruncatedNormal { mu: vec![0.5, 0.5], sigma: vec![0.3, 0.3], rho: 0.2 };
        let (r, prices) = solve_limited_negative_externality(&[20, 20], &unit(2), &d, 0.2).unwrap();
        assert!(r.budget_slack >= -1e-7);
        assert!(prices.k_low <= prices.k_high && prices.weight > 0.0 && prices.weight <= 1.0);
        let weak = JointDensity::TruncatedNormal { mu: vec![0.5, 0.5], sigma: vec![0.3, 0.3], rho: 0.01 };
        let (_, prices) = solve_limited_negative_externality(&[20, 20], &unit(2), &weak, 0.2).unwrap();
        assert!(prices.is_single_threshold(0.05));
        let (r, prices) = solve_limited_negative_externality(&[10, 10], &unit(2), &d, 1.0).unwrap();
        assert!(r.allocation.values().iter().all(|&v| v == 0.0));
        assert_eq!((prices.k_low, prices.k_high, prices.weight), (1.0, 1.0, 1.0));
    }
}
