//! Interim-efficient bilateral trade with independent private values.
//!
//! Types sit at the centres of equal cells. On such a grid the envelope conditions
//! give `U_B(i) = z + h_v·Σ_{k<i} q1(k)` and `U_S(j) = U_S(last) + h_c·Σ_{k>j} q2(k)`,
//! and the ex-ante budget reads `Π = Σ g_B q1 MR - Σ g_S q2 MC = z + U_S(last)` with
//! the discrete virtual values `MR(i) = v_i - h_v·G_B(> i)/g_B(i)` and
//! `MC(j) = c_j + h_c·G_S(< j)/g_S(j)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{is_monotone, GridFunction, QuantileTransform};
use crate::rationalize::{detect_rectangle_structure, unique_rationalization_check_weighted};
use crate::solver::{solve_lp, LpProblem, LpStatus, Relation};

pub const LEVEL_TOL: f64 = 1e-7;
pub const BUDGET_TOL: f64 = 1e-7;
const TIEBREAK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeScenario {
    pub v_domain: (f64, f64),
    pub c_domain: (f64, f64),
    /// Cell masses of the buyer's value and the seller's cost.
    pub g_b: Vec<f64>,
    pub g_s: Vec<f64>,
    /// Welfare weights as cell masses.
    pub lambda_b: Vec<f64>,
    pub lambda_s: Vec<f64>,
}

impl TradeScenario {
    pub fn new(
        v_domain: (f64, f64),
        c_domain: (f64, f64),
        g_b: Vec<f64>,
        g_s: Vec<f64>,
        lambda_b: Vec<f64>,
        lambda_s: Vec<f64>,
    ) -> Result<Self> {
        let s = TradeScenario { v_domain, c_domain, g_b, g_s, lambda_b, lambda_s };
        s.validate()?;
        Ok(s)
    }

    /// Distributions given as quantile transforms, discretized on `mv` and `mc` cells.
    pub fn from_distributions(
        mv: usize,
        mc: usize,
        gb: &QuantileTransform,
        gs: &QuantileTransform,
        lambda_b: Vec<f64>,
        lambda_s: Vec<f64>,
    ) -> Result<Self> {
        gb.validate()?;
        gs.validate()?;
        TradeScenario::new(gb.support(), gs.support(), gb.cell_masses(mv), gs.cell_masses(mc), lambda_b, lambda_s)
    }

    /// Total-surplus weights: each side weighted by its own type distribution.
    pub fn total_surplus(v_domain: (f64, f64), c_domain: (f64, f64), g_b: Vec<f64>, g_s: Vec<f64>) -> Result<Self> {
        let (lb, ls) = (g_b.clone(), g_s.clone());
        TradeScenario::new(v_domain, c_domain, g_b, g_s, lb, ls)
    }

    /// Random cell masses and weights: i.i.d. uniform draws, masses renormalized,
    /// weights divided by the cell count.
    pub fn random(seed: u64, mv: usize, mc: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |m: usize| -> Vec<f64> { (0..m).map(|_| rng.gen_range(0.0..1.0)).collect() };
        let norm = |v: Vec<f64>| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let g_b = norm(draw(mv));
        let g_s = norm(draw(mc));
        let lambda_b = draw(mv).into_iter().map(|x| x / mv as f64).collect();
        let lambda_s = draw(mc).into_iter().map(|x| x / mc as f64).collect();
        TradeScenario::new((0.0, 1.0), (0.0, 1.0), g_b, g_s, lambda_b, lambda_s)
    }

    pub fn validate(&self) -> Result<()> {
        let (mv, mc) = (self.g_b.len(), self.g_s.len());
        if mv == 0 || mc == 0 {
            return Err(Error::InvalidGrid("empty type grid".into()));
        }
        if self.lambda_b.len() != mv || self.lambda_s.len() != mc {
            return Err(Error::LengthMismatch(self.lambda_b.len(), mv));
        }
        for g in [&self.g_b, &self.g_s] {
            if g.iter().any(|&x| !(x > 0.0)) || (g.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidGrid("type masses must be positive and sum to 1".into()));
            }
        }
        if self.lambda_b.iter().chain(&self.lambda_s).any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidGrid("welfare weights must be nonnegative".into()));
        }
        if !(self.v_domain.0 < self.v_domain.1 && self.c_domain.0 < self.c_domain.1) {
            return Err(Error::InvalidGrid("empty type domain".into()));
        }
        Ok(())
    }

    pub fn mv(&self) -> usize {
        self.g_b.len()
    }

    pub fn mc(&self) -> usize {
        self.g_s.len()
    }

    pub fn h_v(&self) -> f64 {
        (self.v_domain.1 - self.v_domain.0) / self.mv() as f64
    }

    pub fn h_c(&self) -> f64 {
        (self.c_domain.1 - self.c_domain.0) / self.mc() as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.mv()).map(|i| self.v_domain.0 + (i as f64 + 0.5) * self.h_v()).collect()
    }

    pub fn costs(&self) -> Vec<f64> {
        (0..self.mc()).map(|j| self.c_domain.0 + (j as f64 + 0.5) * self.h_c()).collect()
    }

    pub fn marginal_revenue(&self) -> Vec<f64> {
        let v = self.values();
        let mut above = 0.0;
        let mut out = vec![0.0; self.mv()];
        for i in (0..self.mv()).rev() {
            out[i] = v[i] - self.h_v() * above / self.g_b[i];
            above += self.g_b[i];
        }
        out
    }

    pub fn marginal_cost(&self) -> Vec<f64> {
        let c = self.costs();
        let mut below = 0.0;
        let mut out = vec![0.0; self.mc()];
        for j in 0..self.mc() {
            out[j] = c[j] + self.h_c() * below / self.g_s[j];
            below += self.g_s[j];
        }
        out
    }

    /// `W_B(k) = Λ_B(types above k)`.
    pub fn weight_tail_b(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0; self.mv()];
        for i in (0..self.mv()).rev() {
            out[i] = acc;
            acc += self.lambda_b[i];
        }
        out
    }

    /// `W_S(k) = Λ_S(types below k)`.
    pub fn weight_tail_s(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0; self.mc()];
        for j in 0..self.mc() {
            out[j] = acc;
            acc += self.lambda_s[j];
        }
        out
    }
}

/// `p` over `(v, c)` has flipped-cost counterpart `p̃(i, j') = p(i, mc - 1 - j')`,
/// which is monotone in the usual sense.
pub fn flip_cost(p: &GridFunction) -> GridFunction {
    let (mv, mc) = (p.dims()[0], p.dims()[1]);
    GridFunction::from_fn(&[mv, mc], |x| p.values()[x[0] * mc + (mc - 1 - x[1])]).expect("flip keeps range")
}

/// Interim trade probabilities `q1(v) = Σ_c g_S p` and `q2(c) = Σ_v g_B p`.
pub fn interim(s: &TradeScenario, p: &GridFunction) -> (Vec<f64>, Vec<f64>) {
    let (mv, mc) = (s.mv(), s.mc());
    let a = p.values();
    let q1 = (0..mv).map(|i| (0..mc).map(|j| s.g_s[j] * a[i * mc + j]).sum()).collect();
    let q2 = (0..mc).map(|j| (0..mv).map(|i| s.g_b[i] * a[i * mc + j]).sum()).collect();
    (q1, q2)
}

/// `Π(q1, q2) = Σ g_B q1 MR - Σ g_S q2 MC`.
pub fn budget_surplus(s: &TradeScenario, q1: &[f64], q2: &[f64]) -> f64 {
    let mr = s.marginal_revenue();
    let mc = s.marginal_cost();
    let b: f64 = (0..s.mv()).map(|i| s.g_b[i] * q1[i] * mr[i]).sum();
    let c: f64 = (0..s.mc()).map(|j| s.g_s[j] * q2[j] * mc[j]).sum();
    b - c
}

/// Interim utilities `(U_B, U_S)` of trade rule `p` with `U_B(v̲) = z` and `U_S(c̄) = us_bar`.
pub fn interim_utilities(s: &TradeScenario, p: &GridFunction, z: f64, us_bar: f64) -> (Vec<f64>, Vec<f64>) {
    let (q1, q2) = interim(s, p);
    let mut ub = vec![0.0; s.mv()];
    let mut acc = z;
    for i in 0..s.mv() {
        ub[i] = acc;
        acc += s.h_v() * q1[i];
    }
    let mut us = vec![0.0; s.mc()];
    let mut acc = us_bar;
    for j in (0..s.mc()).rev() {
        us[j] = acc;
        acc += s.h_c() * q2[j];
    }
    (ub, us)
}

/// Discrete markup-pooling mechanism on the `(v, c)` grid.
///
/// Off the pooling interval trade happens iff the value cell is at least
/// `markup[c]`. On cost cells `lo..=hi` of the interval, the cost is resampled to the
/// lower end (threshold `phi_lo`) with probability `k` and to the upper end
/// (threshold `phi_hi`) otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkupPooling {
    /// Value-cell threshold per cost cell; `mv` means no trade.
    pub markup: Vec<usize>,
    pub pooling: Option<PoolingInterval>,
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolingInterval {
    pub lo: usize,
    pub hi: usize,
    pub phi_lo: usize,
    pub phi_hi: usize,
}

impl MarkupPooling {
    /// The trade rule this mechanism implements on `mv` value cells.
    pub fn simulate(&self, mv: usize) -> GridFunction {
        let mc = self.markup.len();
        GridFunction::from_fn(&[mv, mc], |x| {
            let (i, j) = (x[0], x[1]);
            match &self.pooling {
                Some(pi) if j >= pi.lo && j <= pi.hi => {
                    self.k * (i >= pi.phi_lo) as u8 as f64 + (1.0 - self.k) * (i >= pi.phi_hi) as u8 as f64
                }
                _ => (i >= self.markup[j]) as u8 as f64,
            }
        })
        .expect("simulated trade rule")
    }

    /// Markup thresholds in value units (lower edges of the threshold cells).
    pub fn markup_values(&self, v_domain: (f64, f64), mv: usize) -> Vec<f64> {
        let h = (v_domain.1 - v_domain.0) / mv as f64;
        self.markup.iter().map(|&k| v_domain.0 + k as f64 * h).collect()
    }
}

/// Recovers the markup-pooling mechanism behind a trade rule that is monotone in
/// `(v, -c)` with values in `{0, λ, 1}` and a box-shaped fractional region.
pub fn extract_markup_pooling(p: &GridFunction) -> Result<MarkupPooling> {
    if p.n() != 2 {
        return Err(Error::NotMarkupPooling("trade rule must be two-dimensional".into()));
    }
    let (mv, mc) = (p.dims()[0], p.dims()[1]);
    let flipped = flip_cost(p);
    if !is_monotone(&flipped, LEVEL_TOL) {
        return Err(Error::NotMarkupPooling("not monotone in (v, -c)".into()));
    }
    let rect = detect_rectangle_structure(&flipped)?;
    if !rect.valid {
        return Err(Error::NotMarkupPooling("fractional region is not one box at one level".into()));
    }
    let a = p.values();
    // Lower boundary of the outer up-set {p > 0} in each cost column.
    let markup: Vec<usize> = (0..mc).map(|j| (0..mv).find(|&i| a[i * mc + j] > LEVEL_TOL).unwrap_or(mv)).collect();
    let (pooling, k) = match rect.rectangle {
        None => (None, 1.0),
        Some([(ilo, ihi), (jlo_f, jhi_f)]) => {
            let (lo, hi) = (mc - 1 - jhi_f, mc - 1 - jlo_f);
            (Some(PoolingInterval { lo, hi, phi_lo: ilo, phi_hi: ihi + 1 }), rect.lambda)
        }
    };
    let m = MarkupPooling { markup, pooling, k };
    let sim = m.simulate(mv);
    if sim.max_abs_diff(p) > 1e-6 {
        return Err(Error::NotMarkupPooling(format!("re-simulation differs by {:.3e}", sim.max_abs_diff(p))));
    }
    if m.markup.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::NotMarkupPooling("markup is not nondecreasing".into()));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeSolution {
    /// Trade probability over `(v, c)`.
    pub p: GridFunction,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub z: f64,
    pub us_bar: f64,
    pub pi: f64,
    pub welfare: f64,
    pub mechanism: MarkupPooling,
    pub lp_iterations: usize,
}

/// LP over the flipped trade rule `p̃` (cells, monotone) and `z` (last variable).
pub fn trade_lp(s: &TradeScenario) -> Result<LpProblem> {
    let (mv, mc) = (s.mv(), s.mc());
    let mr = s.marginal_revenue();
    let mcost = s.marginal_cost();
    let wb = s.weight_tail_b();
    let ws = s.weight_tail_s();
    let lb: f64 = s.lambda_b.iter().sum();
    let ls: f64 = s.lambda_s.iter().sum();
    let mut obj = vec![0.0; mv * mc];
    let mut budget = vec![0.0; mv * mc];
    for i in 0..mv {
        for jf in 0..mc {
            let j = mc - 1 - jf;
            let virt = s.g_b[i] * s.g_s[j] * (mr[i] - mcost[j]);
            obj[i * mc + jf] = s.h_v() * wb[i] * s.g_s[j] + s.h_c() * ws[j] * s.g_b[i] + ls * virt;
            budget[i * mc + jf] = virt;
        }
    }
    let mut p = LpProblem::new(&[mv, mc])?.with_monotonicity().with_objective(&obj);
    // Π never exceeds the largest possible gain from trade, so this bound is slack.
    let zmax = 2.0 * (s.v_domain.0.abs() + s.v_domain.1.abs() + s.c_domain.0.abs() + s.c_domain.1.abs()) + 1.0;
    p.add_extra(0.0, zmax, lb - ls);
    budget.push(-1.0);
    p.add_constraint(&budget, Relation::Ge, 0.0);
    Ok(p)
}

fn snap(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| if v <= LEVEL_TOL { 0.0 } else if v >= 1.0 - LEVEL_TOL { 1.0 } else { v })
        .collect()
}

/// Welfare-maximizing trade rule, returned as a verified markup-pooling mechanism.
pub fn solve_interim_efficient(s: &TradeScenario) -> Result<TradeSolution> {
    s.validate()?;
    let base = trade_lp(s)?;
    let mut last_err = None;
    for attempt in 0..2 {
        let mut p = base.clone();
        if attempt == 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7ade);
            for c in p.objective.iter_mut() {
                *c += TIEBREAK * rng.gen_range(-1.0..1.0);
            }
        }
        let sol = solve_lp(&p)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Infeasible(format!("trade LP is {:?}", sol.status)));
        }
        let (mv, mc) = (s.mv(), s.mc());
        let flipped = GridFunction::new(&[mv, mc], snap(&sol.values[..mv * mc]))?;
        let pgrid = flip_cost(&flipped);
        match extract_markup_pooling(&pgrid) {
            Ok(mechanism) => return Ok(finish(s, pgrid, sol.values[mv * mc], mechanism, sol.iterations)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::StructureViolation(format!("optimal vertex is not markup-pooling: {}", last_err.unwrap())))
}

fn finish(s: &TradeScenario, p: GridFunction, z: f64, mechanism: MarkupPooling, lp_iterations: usize) -> TradeSolution {
    let (q1, q2) = interim(s, &p);
    let pi = budget_surplus(s, &q1, &q2);
    let us_bar = pi - z;
    let (ub, us) = interim_utilities(s, &p, z, us_bar);
    let welfare = ub.iter().zip(&s.lambda_b).map(|(u, l)| u * l).sum::<f64>()
        + us.iter().zip(&s.lambda_s).map(|(u, l)| u * l).sum::<f64>();
    TradeSolution { p, q1, q2, z, us_bar, pi, welfare, mechanism, lp_iterations }
}

/// Seller's utility at the top cost recomputed from total surplus and the interim
/// envelopes, without virtual values: `E[p(v - c)] - E[U_B] - E[U_S - U_S(c̄)]`.
pub fn seller_top_utility_from_surplus(s: &TradeScenario, sol: &TradeSolution) -> f64 {
    let (mv, mc) = (s.mv(), s.mc());
    let v = s.values();
    let c = s.costs();
    let a = sol.p.values();
    let mut gains = 0.0;
    for i in 0..mv {
        for j in 0..mc {
            gains += s.g_b[i] * s.g_s[j] * a[i * mc + j] * (v[i] - c[j]);
        }
    }
    let (ub, us) = interim_utilities(s, &sol.p, sol.z, 0.0);
    let eub: f64 = ub.iter().zip(&s.g_b).map(|(u, g)| u * g).sum();
    let eus_rel: f64 = us.iter().zip(&s.g_s).map(|(u, g)| u * g).sum();
    gains - eub - eus_rel
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DicReport {
    pub trials: usize,
    pub passed: usize,
    /// `(seed, reason)` for each failing trial.
    pub failures: Vec<(u64, String)>,
}

/// For `trials` random scenarios (seeds `master_seed + t`), solves and checks that
/// the optimal trade rule is markup-pooling and uniquely rationalized among monotone
/// rules by its interim allocations.
pub fn verify_dic_vertex_is_markup_pooling(mv: usize, mc: usize, trials: usize, master_seed: u64) -> DicReport {
    let mut failures = Vec::new();
    for t in 0..trials {
        let seed = master_seed.wrapping_add(t as u64);
        if let Err(e) = check_one(seed, mv, mc) {
            failures.push((seed, e.to_string()));
        }
    }
    DicReport { trials, passed: trials - failures.len(), failures }
}

fn check_one(seed: u64, mv: usize, mc: usize) -> Result<()> {
    let s = TradeScenario::random(seed, mv, mc)?;
    let sol = solve_interim_efficient(&s)?;
    check_solution(&s, &sol)
}

/// Markup-pooling and unique rationalization among monotone rules.
pub fn check_solution(s: &TradeScenario, sol: &TradeSolution) -> Result<()> {
    extract_markup_pooling(&sol.p)?;
    let flipped = flip_cost(&sol.p);
    let g_s_flipped: Vec<f64> = s.g_s.iter().rev().copied().collect();
    let rep = unique_rationalization_check_weighted(&flipped, &[s.g_b.clone(), g_s_flipped], true)?;
    if !rep.unique {
        return Err(Error::TheoremViolation("optimal trade rule is not uniquely rationalized".into()));
    }
    if (sol.us_bar - seller_top_utility_from_surplus(s, sol)).abs() > BUDGET_TOL {
        return Err(Error::TheoremViolation("budget identity fails".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_lp, trade_lagrangian_oracle, RefOutcome};

    fn uniform(m: usize) -> TradeScenario {
        TradeScenario::total_surplus((0.0, 1.0), (0.0, 1.0), vec![1.0 / m as f64; m], vec![1.0 / m as f64; m]).unwrap()
    }

    #[test]
    fn virtual_values_uniform() {
        let s = uniform(10);
        let mr = s.marginal_revenue();
        let mc = s.marginal_cost();
        // Continuous MR(v) = 2v - 1 and MC(c) = 2c, each off by half a cell.
        for k in 0..10 {
            let v = (k as f64 + 0.5) / 10.0;
            assert!((mr[k] - (2.0 * v - 1.0 + 0.05)).abs() < 1e-12);
            assert!((mc[k] - (2.0 * v - 0.05)).abs() < 1e-12);
        }
    }

    #[test]
    fn no_gains_no_trade() {
        let m = 6;
        let s = TradeScenario::total_surplus((0.0, 0.4), (0.5, 1.0), vec![1.0 / m as f64; m], vec![1.0 / m as f64; m]).unwrap();
        let sol = solve_interim_efficient(&s).unwrap();
        assert!(sol.p.values().iter().all(|&v| v == 0.0));
        assert!(sol.welfare.abs() < 1e-12);
    }

    #[test]
    fn second_best_uniform() {
        let m = 30;
        let sol = solve_interim_efficient(&uniform(m)).unwrap();
        let oracle = trade_lagrangian_oracle(m);
        let mut mismatch = 0;
        for i in 0..m {
            for j in 0..m {
                let gap = (i as f64 - j as f64) / m as f64;
                let trade = sol.p.values()[i * m + j] > 0.5;
                if (gap - 0.25).abs() > 1.0 / m as f64 + 1e-12 {
                    assert_eq!(trade, gap >= 0.25, "closed form at ({i}, {j})");
                    assert_eq!(trade, oracle[i][j], "oracle at ({i}, {j})");
                } else if trade != oracle[i][j] {
                    mismatch += 1;
                }
            }
        }
        assert!(mismatch <= 2 * m);
        assert!((sol.pi - sol.z - sol.us_bar).abs() < 1e-12);
        assert!((sol.us_bar - seller_top_utility_from_surplus(&uniform(m), &sol)).abs() < BUDGET_TOL);
    }

    #[test]
    fn markup_pooling_roundtrip() {
        let m = 20;
        let diag = GridFunction::from_fn(&[m, m], |x| if x[0] >= x[1] { 1.0 } else { 0.0 }).unwrap();
        let mp = extract_markup_pooling(&diag).unwrap();
        assert_eq!(mp.markup, (0..m).collect::<Vec<_>>());
        assert!(mp.pooling.is_none());
        // φ(c) = c + 0.2, I = [0.3, 0.5], k = 0.4 on cells of width 0.05.
        let markup: Vec<usize> = (0..m).map(|j| (j + 4).min(m)).collect();
        let synth = MarkupPooling {
            markup: (0..m).map(|j| if (6..=9).contains(&j) { 10 } else { markup[j] }).collect(),
            pooling: Some(PoolingInterval { lo: 6, hi: 9, phi_lo: 10, phi_hi: 14 }),
            k: 0.4,
        };
        let p = synth.simulate(m);
        let got = extract_markup_pooling(&p).unwrap();
        assert_eq!(got.pooling, synth.pooling);
        assert!((got.k - 0.4).abs() < 1e-12);
        assert_eq!(got.markup, synth.markup);
        let two = GridFunction::from_fn(&[m, m], |x| {
            let base = if x[0] >= x[1] + 4 { 1.0 } else { 0.0 };
            if base == 0.0 && ((x[1] == 2 && x[0] >= 3) || (x[1] == 12 && x[0] >= 13)) { 0.5 } else { base }
        })
        .unwrap();
        assert!(matches!(extract_markup_pooling(&two), Err(Error::NotMarkupPooling(_))));
    }

    #[test]
    fn random_instances_are_markup_pooling() {
        let rep = verify_dic_vertex_is_markup_pooling(12, 12, 6, 11);
        assert_eq!(rep.passed, rep.trials, "{:?}", rep.failures);
    }

    #[test]
    fn matches_brute_force() {
        for seed in [3, 4] {
            let s = TradeScenario::random(seed, 8, 8).unwrap();
            let sol = solve_interim_efficient(&s).unwrap();
            match brute_force_lp(&trade_lp(&s).unwrap()).unwrap() {
                RefOutcome::Optimal { value, .. } => assert!((value - sol.welfare).abs() < 1e-7, "{value} {}", sol.welfare),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn concentrated_weights() {
        let m = 12;
        let g = vec![1.0 / m as f64; m];
        let mut lb = vec![0.0; m];
        lb[0] = 1.0;
        let s = TradeScenario::new((0.0, 1.0), (0.0, 1.0), g.clone(), g.clone(), lb, vec![0.0; m]).unwrap();
        let sol = solve_interim_efficient(&s).unwrap();
        check_solution(&s, &sol).unwrap();
        let mut lb = vec![0.0; m];
        lb[m / 2] = 1.0;
        let s = TradeScenario::new((0.0, 1.0), (0.0, 1.0), g.clone(), g, lb, vec![0.0; m]).unwrap();
        let sol = solve_interim_efficient(&s).unwrap();
        check_solution(&s, &sol).unwrap();
    }
}
