//! Two-bidder reduced-form auctions.
//!
//! Interim allocations live on value cells with cell masses `g1`, `g2`. In quantile
//! space bidder `i`'s allocation is a step function whose edges are the cumulative
//! cell masses, so feasibility and extremality are checked exactly on those edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{common_edges, sup_distance, GridFunction, QuantileTransform, StepFunction1D};
use crate::rationalize::{check_majorization, MajorizationReport};
use crate::solver::{solve_lp, LpProblem, LpStatus, Relation};

pub const EXTREME_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const PROBE_BUDGET: usize = 64;
const IMPROVE_TOL: f64 = 1e-9;
const TIEBREAK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

impl ReducedForm {
    pub fn new(q1: Vec<f64>, q2: Vec<f64>, g1: Vec<f64>, g2: Vec<f64>) -> Result<Self> {
        let rf = ReducedForm { q1, q2, g1, g2 };
        rf.validate()?;
        Ok(rf)
    }

    /// Equal cell masses, so the quantile functions are the value tables themselves.
    pub fn uniform(q1: Vec<f64>, q2: Vec<f64>) -> Result<Self> {
        let (m1, m2) = (q1.len(), q2.len());
        ReducedForm::new(q1, q2, vec![1.0 / m1 as f64; m1], vec![1.0 / m2 as f64; m2])
    }

    pub fn from_distributions(q1: Vec<f64>, q2: Vec<f64>, g1: &QuantileTransform, g2: &QuantileTransform) -> Result<Self> {
        let (m1, m2) = (q1.len(), q2.len());
        ReducedForm::new(q1, q2, g1.cell_masses(m1), g2.cell_masses(m2))
    }

    pub fn validate(&self) -> Result<()> {
        for (q, g) in [(&self.q1, &self.g1), (&self.q2, &self.g2)] {
            if q.is_empty() || q.len() != g.len() {
                return Err(Error::LengthMismatch(q.len(), g.len()));
            }
            if g.iter().any(|&x| !(x > 0.0)) || (g.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidGrid("cell masses must be positive and sum to 1".into()));
            }
            if q.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::InvalidGrid("allocation probabilities must lie in [0,1]".into()));
            }
            if let Some(w) = q.windows(2).map(|w| w[0] - w[1]).find(|&d| d > 1e-12) {
                return Err(Error::NotMonotone(w));
            }
        }
        Ok(())
    }

    pub fn m1(&self) -> usize {
        self.q1.len()
    }

    pub fn m2(&self) -> usize {
        self.q2.len()
    }

    /// Bidder `i`'s allocation in quantile space (`i` is 0 or 1).
    pub fn quantile(&self, i: usize) -> StepFunction1D {
        let (q, g) = if i == 0 { (&self.q1, &self.g1) } else { (&self.q2, &self.g2) };
        StepFunction1D::with_edges(cell_edges(g), q.clone()).expect("cell masses give valid edges")
    }
}

/// Cumulative cell masses `0 = e_0 < … < e_m = 1`.
pub fn cell_edges(g: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(g.len() + 1);
    let mut acc = 0.0;
    e.push(0.0);
    for &x in g {
        acc += x;
        e.push(acc);
    }
    *e.last_mut().unwrap() = 1.0;
    e
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `q̃1` against the inverse of `q̃2`.
    pub report: MajorizationReport,
    /// `q̃2` against the inverse of `q̃1`.
    pub swapped: MajorizationReport,
}

/// Feasibility of a reduced form: `q̃1 ⪯_w q̃2^{-1}`. The bidder-swapped condition is
/// computed as well; the two agree up to rounding.
pub fn check_reduced_form(rf: &ReducedForm) -> FeasibilityReport {
    let (a, b) = (rf.quantile(0), rf.quantile(1));
    let report = check_majorization(&a, &b.inverse(), true);
    let swapped = check_majorization(&b, &a.inverse(), true);
    FeasibilityReport { feasible: report.holds, report, swapped }
}

/// Smallest breakpoint `k` with `a = b^{-1}·1_{[k,1]}`.
fn truncation_threshold(a: &StepFunction1D, b: &StepFunction1D) -> Option<f64> {
    let inv = b.inverse();
    common_edges(a, &inv)
        .into_iter()
        .find(|&k| sup_distance(a, &inv.truncate_below(k)) <= EXTREME_TOL)
}

/// Whether `q̃1 = q̃2^{-1}·1_{[k1,1]}` and `q̃2 = q̃1^{-1}·1_{[k2,1]}`; returns `(k1, k2)`.
pub fn extreme_reduced_form_check(rf: &ReducedForm) -> (bool, Option<(f64, f64)>) {
    let (a, b) = (rf.quantile(0), rf.quantile(1));
    match (truncation_threshold(&a, &b), truncation_threshold(&b, &a)) {
        (Some(k1), Some(k2)) => (true, Some((k1, k2))),
        _ => (false, None),
    }
}

/// Allocation rules on the value cells of both bidders, `p_i[(i1, i2)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuctionImplementation {
    pub p1: GridFunction,
    pub p2: GridFunction,
    pub closed_form: bool,
}

impl AuctionImplementation {
    /// Interim allocations under the cell masses of `rf`.
    pub fn interim(&self, rf: &ReducedForm) -> (Vec<f64>, Vec<f64>) {
        interim_of(&self.p1, &self.p2, &rf.g1, &rf.g2)
    }

    pub fn residual(&self, rf: &ReducedForm) -> f64 {
        let (a, b) = self.interim(rf);
        a.iter().zip(&rf.q1).chain(b.iter().zip(&rf.q2)).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn max_total(&self) -> f64 {
        self.p1.values().iter().zip(self.p2.values()).fold(0.0f64, |m, (a, b)| m.max(a + b))
    }
}

fn interim_of(p1: &GridFunction, p2: &GridFunction, g1: &[f64], g2: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (m1, m2) = (g1.len(), g2.len());
    let (a, b) = (p1.values(), p2.values());
    let q1 = (0..m1).map(|i| (0..m2).map(|j| g2[j] * a[i * m2 + j]).sum()).collect();
    let q2 = (0..m2).map(|j| (0..m1).map(|i| g1[i] * b[i * m2 + j]).sum()).collect();
    (q1, q2)
}

/// Bidder 1 wins when `x1 >= max(k, q̃2(x2))`, bidder 2 when `x1 < q̃2(x2)`, evaluated
/// on whole cells. `None` when some cell straddles a boundary.
fn closed_form(rf: &ReducedForm, k: f64) -> Option<(GridFunction, GridFunction)> {
    let e1 = cell_edges(&rf.g1);
    let (m1, m2) = (rf.m1(), rf.m2());
    let tol = 1e-9;
    let mut p1 = vec![0.0; m1 * m2];
    let mut p2 = vec![0.0; m1 * m2];
    for i in 0..m1 {
        for j in 0..m2 {
            let t = rf.q2[j];
            let (lo, hi) = (e1[i], e1[i + 1]);
            if hi <= t + tol {
                p2[i * m2 + j] = 1.0;
            } else if lo >= t.max(k) - tol {
                p1[i * m2 + j] = 1.0;
            } else if lo < t - tol || (lo < k - tol && hi > k + tol) {
                return None;
            }
        }
    }
    Some((GridFunction::new(&[m1, m2], p1).ok()?, GridFunction::new(&[m1, m2], p2).ok()?))
}

/// Variables `p1` then `p2` (a `[2, m1, m2]` grid) with `p1 + p2 <= 1` per cell.
fn allocation_lp(g1: &[f64], g2: &[f64]) -> Result<LpProblem> {
    let (m1, m2) = (g1.len(), g2.len());
    let cells = m1 * m2;
    let mut p = LpProblem::new(&[2, m1, m2])?;
    for c in 0..cells {
        let mut row = vec![0.0; 2 * cells];
        row[c] = 1.0;
        row[cells + c] = 1.0;
        p.add_constraint(&row, Relation::Le, 1.0);
    }
    Ok(p)
}

fn interim_row_1(g2: &[f64], m1: usize, i: usize) -> Vec<f64> {
    let m2 = g2.len();
    let mut row = vec![0.0; 2 * m1 * m2];
    for j in 0..m2 {
        row[i * m2 + j] = g2[j];
    }
    row
}

fn interim_row_2(g1: &[f64], m2: usize, j: usize) -> Vec<f64> {
    let m1 = g1.len();
    let mut row = vec![0.0; 2 * m1 * m2];
    for i in 0..m1 {
        row[m1 * m2 + i * m2 + j] = g1[i];
    }
    row
}

fn split(values: &[f64], m1: usize, m2: usize) -> Result<(GridFunction, GridFunction)> {
    let clip = |v: &[f64]| v.iter().map(|x| x.clamp(0.0, 1.0)).collect::<Vec<_>>();
    Ok((GridFunction::new(&[m1, m2], clip(&values[..m1 * m2]))?, GridFunction::new(&[m1, m2], clip(&values[m1 * m2..]))?))
}

/// Allocation rules inducing `rf`: the threshold construction when `rf` is extreme and
/// its boundaries fall on cell edges, otherwise an LP.
pub fn construct_implementation(rf: &ReducedForm) -> Result<AuctionImplementation> {
    rf.validate()?;
    if let (true, Some((k1, _))) = extreme_reduced_form_check(rf) {
        if let Some((p1, p2)) = closed_form(rf, k1) {
            let imp = AuctionImplementation { p1, p2, closed_form: true };
            if imp.residual(rf) <= RESIDUAL_TOL {
                return Ok(imp);
            }
        }
    }
    let (m1, m2) = (rf.m1(), rf.m2());
    let mut p = allocation_lp(&rf.g1, &rf.g2)?;
    for i in 0..m1 {
        p.add_constraint(&interim_row_1(&rf.g2, m1, i), Relation::Eq, rf.q1[i]);
    }
    for j in 0..m2 {
        p.add_constraint(&interim_row_2(&rf.g1, m2, j), Relation::Eq, rf.q2[j]);
    }
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Infeasible("no allocation rule induces this reduced form".into()));
    }
    let (p1, p2) = split(&sol.values, m1, m2)?;
    let imp = AuctionImplementation { p1, p2, closed_form: false };
    let r = imp.residual(rf);
    if r > RESIDUAL_TOL {
        return Err(Error::Numerical(format!("implementation residual {r:.3e}")));
    }
    Ok(imp)
}

/// Quadratic investment cost `b·a²/2`, so a bidder winning with probability `q` gains
/// `w(q) = q²/(2b)`. `psi` is the virtual value per type cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvestmentSpec {
    pub b: f64,
    pub psi: Vec<f64>,
}

impl InvestmentSpec {
    /// Virtual values `θ - h·G(> θ)/g(θ)` at the cell centres of `domain`.
    pub fn new(b: f64, g: &[f64], domain: (f64, f64)) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::InvalidGrid("cost curvature must be positive".into()));
        }
        let m = g.len();
        let h = (domain.1 - domain.0) / m as f64;
        let mut above = 0.0;
        let mut psi = vec![0.0; m];
        for i in (0..m).rev() {
            psi[i] = domain.0 + (i as f64 + 0.5) * h - h * above / g[i];
            above += g[i];
        }
        Ok(InvestmentSpec { b, psi })
    }

    pub fn w(&self, q: f64) -> f64 {
        q * q / (2.0 * self.b)
    }

    pub fn dw(&self, q: f64) -> f64 {
        q / self.b
    }

    /// `Σ_i Σ_θ g(θ)·[q_i(θ)ψ(θ) + w(q_i(θ))]`.
    pub fn objective(&self, g: &[f64], q1: &[f64], q2: &[f64]) -> f64 {
        [q1, q2]
            .iter()
            .map(|q| q.iter().zip(g).zip(&self.psi).map(|((&x, &gx), &s)| gx * (x * s + self.w(x))).sum::<f64>())
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvestmentResult {
    pub rf: ReducedForm,
    pub implementation: AuctionImplementation,
    pub objective: f64,
    pub probes: usize,
    pub extreme: bool,
    pub thresholds: Option<(f64, f64)>,
}

/// Maximizes a linear functional of `(q1, q2)` over reduced forms with symmetric
/// masses `g`; returns the interim allocations and the allocation rules.
fn linear_probe(base: &LpProblem, g: &[f64], c1: &[f64], c2: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let m = g.len();
    let mut p = base.clone();
    for i in 0..m {
        for j in 0..m {
            p.objective[i * m + j] = c1[i] * g[i] * g[j];
            p.objective[m * m + i * m + j] = c2[j] * g[i] * g[j];
        }
    }
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Numerical(format!("reduced-form probe is {:?}", sol.status)));
    }
    let (p1, p2) = split(&sol.values, m, m)?;
    let (q1, q2) = interim_of(&p1, &p2, g, g);
    Ok((q1, q2, sol.values))
}

/// Reduced-form polytope over allocation rules, with nondecreasing interim rows.
fn reduced_form_polytope(g: &[f64]) -> Result<LpProblem> {
    let m = g.len();
    let mut p = allocation_lp(g, g)?;
    for i in 0..m - 1 {
        let a: Vec<f64> = interim_row_1(g, m, i).iter().zip(interim_row_1(g, m, i + 1)).map(|(x, y)| x - y).collect();
        p.add_constraint(&a, Relation::Le, 0.0);
        let b: Vec<f64> = interim_row_2(g, m, i).iter().zip(interim_row_2(g, m, i + 1)).map(|(x, y)| x - y).collect();
        p.add_constraint(&b, Relation::Le, 0.0);
    }
    Ok(p)
}

/// Maximizes `Σ_i Σ_θ g(θ)·c_i(θ)·q_i(θ)` over monotone reduced forms for two bidders
/// with the same cell masses `g`.
pub fn maximize_linear(g: &[f64], c1: &[f64], c2: &[f64]) -> Result<(ReducedForm, AuctionImplementation)> {
    let m = g.len();
    if c1.len() != m || c2.len() != m {
        return Err(Error::LengthMismatch(c1.len(), m));
    }
    let (q1, q2, x) = linear_probe(&reduced_form_polytope(g)?, g, c1, c2)?;
    let rf = ReducedForm::new(snap(&q1, g), snap(&q2, g), g.to_vec(), g.to_vec())?;
    let (p1, p2) = split(&x, m, m)?;
    Ok((rf, AuctionImplementation { p1, p2, closed_form: false }))
}

/// Revenue-maximizing auction with investment, by vertex probing: every probe
/// linearizes the convex objective at the incumbent and moves to the LP optimum, which
/// never lowers the objective. Restarts use seeded random linear objectives; the
/// search stops after [`PROBE_BUDGET`] LP solves. Inexact in general.
pub fn solve_investment_auction(spec: &InvestmentSpec, g: &[f64], seed: u64) -> Result<InvestmentResult> {
    let m = g.len();
    if spec.psi.len() != m {
        return Err(Error::LengthMismatch(spec.psi.len(), m));
    }
    let base = reduced_form_polytope(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..m).map(|_| TIEBREAK * rng.gen_range(-1.0..1.0)).collect() };
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut probes = 0;
    let mut start = 0;
    while probes < PROBE_BUDGET {
        // Starting directions: the virtual values alone, then with the full investment
        // gain, then random.
        let (mut c1, mut c2): (Vec<f64>, Vec<f64>) = match start {
            0 => (spec.psi.clone(), spec.psi.clone()),
            1 => (spec.psi.iter().map(|s| s + spec.dw(1.0)).collect(), spec.psi.clone()),
            _ => ((0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(), (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        };
        start += 1;
        let mut incumbent = f64::NEG_INFINITY;
        loop {
            let (j1, j2) = (jitter(&mut rng), jitter(&mut rng));
            c1.iter_mut().zip(&j1).for_each(|(c, j)| *c += j);
            c2.iter_mut().zip(&j2).for_each(|(c, j)| *c += j);
            let (q1, q2, x) = linear_probe(&base, g, &c1, &c2)?;
            probes += 1;
            let val = spec.objective(g, &q1, &q2);
            if val <= incumbent + IMPROVE_TOL {
                break;
            }
            incumbent = val;
            let better = match &best {
                None => true,
                Some((b, bq1, bq2, _)) => {
                    val > b + IMPROVE_TOL || ((val - b).abs() <= IMPROVE_TOL && (&q1, &q2) < (bq1, bq2))
                }
            };
            if better {
                best = Some((val, q1.clone(), q2.clone(), x));
            }
            c1 = spec.psi.iter().zip(&q1).map(|(s, q)| s + spec.dw(*q)).collect();
            c2 = spec.psi.iter().zip(&q2).map(|(s, q)| s + spec.dw(*q)).collect();
            if probes >= PROBE_BUDGET {
                break;
            }
        }
    }
    let (objective, q1, q2, x) = best.expect("at least one probe");
    let rf = ReducedForm::new(snap(&q1, g), snap(&q2, g), g.to_vec(), g.to_vec())?;
    let (p1, p2) = split(&x, m, m)?;
    let implementation = AuctionImplementation { p1, p2, closed_form: false };
    let (extreme, thresholds) = extreme_reduced_form_check(&rf);
    Ok(InvestmentResult { rf, implementation, objective, probes, extreme, thresholds })
}

/// Clips LP round-off: values within `1e-9` of a cumulative mass of `other` (where an
/// extreme reduced form takes its values) are moved onto it, then monotonicity is restored.
fn snap(q: &[f64], other: &[f64]) -> Vec<f64> {
    let edges = cell_edges(other);
    let mut out: Vec<f64> = q
        .iter()
        .map(|&x| {
            let x = x.clamp(0.0, 1.0);
            edges.iter().copied().find(|e| (e - x).abs() <= 1e-9).unwrap_or(x)
        })
        .collect();
    for k in 1..out.len() {
        if out[k] < out[k - 1] {
            out[k] = out[k - 1];
        }
    }
    out
}

/// Best symmetric mechanism in the family "efficient above a common reserve cell `r`,
/// ties split evenly", found by scanning `r`. Returns `(r, objective)`.
pub fn best_symmetric_reserve(spec: &InvestmentSpec, g: &[f64]) -> (usize, f64) {
    let m = g.len();
    let mut best = (m, spec.objective(g, &vec![0.0; m], &vec![0.0; m]));
    for r in 0..m {
        let mut below = 0.0;
        let q: Vec<f64> = (0..m)
            .map(|i| {
                let v = if i >= r { below + 0.5 * g[i] } else { 0.0 };
                below += g[i];
                v
            })
            .collect();
        let val = spec.objective(g, &q, &q);
        if val > best.1 {
            best = (r, val);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_reduced_form;

    fn ramp(m: usize) -> Vec<f64> {
        (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect()
    }

    /// Efficient above reserve cell `r`, ties to bidder 1.
    fn spa_reserve(m: usize, r: usize) -> ReducedForm {
        let q1 = (0..m).map(|i| if i >= r { (i + 1) as f64 / m as f64 } else { 0.0 }).collect();
        let q2 = (0..m).map(|j| if j >= r { j as f64 / m as f64 } else { 0.0 }).collect();
        ReducedForm::uniform(q1, q2).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let m = 8;
        let r = check_reduced_form(&ReducedForm::uniform(ramp(m), ramp(m)).unwrap());
        assert!(r.feasible && r.swapped.holds);
        let r = check_reduced_form(&ReducedForm::uniform(vec![1.0; m], vec![1.0; m]).unwrap());
        assert!(!r.feasible && !r.swapped.holds);
        assert!(check_reduced_form(&spa_reserve(m, 3)).feasible);
    }

    #[test]
    fn extreme_examples() {
        let m = 10;
        let (ok, k) = extreme_reduced_form_check(&spa_reserve(m, 4));
        assert!(ok);
        let (k1, k2) = k.unwrap();
        assert!((k1 - 0.4).abs() < 1e-12 && (k2 - 0.4).abs() < 1e-12);
        let (ok, k) = extreme_reduced_form_check(&spa_reserve(m, 0));
        assert!(ok && k.unwrap().0 == 0.0);
        let a = spa_reserve(m, 2);
        let b = spa_reserve(m, 6);
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| 0.5 * (u + v)).collect::<Vec<_>>();
        let avg = ReducedForm::uniform(mix(&a.q1, &b.q1), mix(&a.q2, &b.q2)).unwrap();
        assert!(check_reduced_form(&avg).feasible);
        assert!(!extreme_reduced_form_check(&avg).0);
    }

    #[test]
    fn implementations() {
        let m = 10;
        let rf = spa_reserve(m, 3);
        let imp = construct_implementation(&rf).unwrap();
        assert!(imp.closed_form);
        assert!(imp.residual(&rf) <= RESIDUAL_TOL && imp.max_total() <= 1.0 + 1e-12);
        for i in 0..m {
            for j in 0..m {
                let (a, b) = (imp.p1.get(&[i, j]), imp.p2.get(&[i, j]));
                assert_eq!(a, (i >= 3 && i >= j) as u8 as f64, "p1 at ({i}, {j})");
                assert_eq!(b, (j >= 3 && j > i) as u8 as f64, "p2 at ({i}, {j})");
            }
        }
        // Sequential posted prices: bidder 1 buys above cell 6, else bidder 2 above cell 3.
        let q1 = (0..m).map(|i| (i >= 6) as u8 as f64).collect();
        let q2 = (0..m).map(|j| if j >= 3 { 0.6 } else { 0.0 }).collect();
        let rf = ReducedForm::uniform(q1, q2).unwrap();
        assert!(extreme_reduced_form_check(&rf).0);
        let imp = construct_implementation(&rf).unwrap();
        assert!(imp.closed_form);
        for i in 0..m {
            for j in 0..m {
                assert_eq!(imp.p1.get(&[i, j]), (i >= 6) as u8 as f64);
                assert_eq!(imp.p2.get(&[i, j]), (i < 6 && j >= 3) as u8 as f64);
            }
        }
        let zero = ReducedForm::uniform(vec![0.0; 4], vec![0.0; 5]).unwrap();
        let imp = construct_implementation(&zero).unwrap();
        assert!(imp.p1.values().iter().chain(imp.p2.values()).all(|&v| v == 0.0));
        // Ties split evenly need the LP.
        let rf = ReducedForm::uniform(ramp(6), ramp(6)).unwrap();
        let imp = construct_implementation(&rf).unwrap();
        assert!(!imp.closed_form && imp.residual(&rf) <= RESIDUAL_TOL);
        let bad = ReducedForm::uniform(vec![1.0; 3], vec![1.0; 3]).unwrap();
        assert!(matches!(construct_implementation(&bad), Err(Error::Infeasible(_))));
    }

    #[test]
    fn nonuniform_masses_match_brute_force() {
        let g1 = vec![0.1, 0.2, 0.3, 0.4];
        let g2 = vec![0.25, 0.5, 0.25];
        for (q1, q2) in [
            (vec![0.0, 0.2, 0.5, 0.75], vec![0.1, 0.3, 0.6]),
            (vec![0.0, 0.25, 0.5, 1.0], vec![0.1, 0.3, 0.7]),
            (vec![0.2, 0.2, 0.2, 0.2], vec![0.8, 0.8, 0.8]),
        ] {
            let rf = ReducedForm::new(q1.clone(), q2.clone(), g1.clone(), g2.clone()).unwrap();
            let want = brute_force_reduced_form(&q1, &q2, &g1, &g2).unwrap();
            assert_eq!(check_reduced_form(&rf).feasible, want, "{q1:?} {q2:?}");
        }
    }

    #[test]
    fn myerson_limit() {
        let m = 20;
        let g = vec![1.0 / m as f64; m];
        let spec = InvestmentSpec::new(1e12, &g, (0.0, 1.0)).unwrap();
        let res = solve_investment_auction(&spec, &g, 1).unwrap();
        assert!(res.extreme);
        let (k1, k2) = res.thresholds.unwrap();
        assert!((k1 - 0.5).abs() < 1e-12 && (k2 - 0.5).abs() < 1e-12, "{k1} {k2}");
        let (_, sym) = best_symmetric_reserve(&spec, &g);
        assert!((res.objective - sym).abs() < 1e-9);
    }

    #[test]
    fn investment_beats_symmetric() {
        let m = 16;
        let g = vec![1.0 / m as f64; m];
        let spec = InvestmentSpec::new(0.4, &g, (0.0, 1.0)).unwrap();
        let res = solve_investment_auction(&spec, &g, 7).unwrap();
        let (_, sym) = best_symmetric_reserve(&spec, &g);
        assert!(res.objective > sym + 1e-6, "{} vs {sym}", res.objective);
        assert!(res.extreme);
        assert!(res.rf.q1 != res.rf.q2);
        assert!(res.implementation.residual(&res.rf) <= 1e-9);
    }

    #[test]
    fn flat_objective_returns_a_vertex() {
        let m = 6;
        let g = vec![1.0 / m as f64; m];
        let spec = InvestmentSpec { b: f64::INFINITY, psi: vec![0.0; m] };
        let res = solve_investment_auction(&spec, &g, 3).unwrap();
        assert!(res.objective.abs() < 1e-9);
        assert!(check_reduced_form(&res.rf).feasible);
    }
}
