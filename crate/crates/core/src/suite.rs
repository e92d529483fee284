//! Seeded property suites shared by the CLI and the acceptance tests.
//!
//! Summaries hold only counts, verdicts and derived numbers, so the same seed gives
//! byte-identical JSON.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{is_monotone, marginals, nesting_decompose, sup_distance, GridFunction, Shape, StepFunction1D, UpSet};
use crate::oracle::{brute_force_rationalizable, brute_force_reduced_form, brute_force_vertices, enumerate_upsets, trade_lagrangian_oracle};
use crate::ppi::{pooling_implementation, solve_ppi_linear, solve_ppi_threshold, BAYES_TOL};
use crate::rationalize::{
    detect_rectangle_structure, extreme_check_joint_majorization, extreme_check_weak_majorization, is_rationalizable,
    joint_majorization_perturbation, monotone_rationalizer, square_majorization_structure, unique_rationalization_check,
};
use crate::rfauction::{
    best_symmetric_reserve, check_reduced_form, construct_implementation, extreme_reduced_form_check, solve_investment_auction,
    InvestmentSpec, ReducedForm, RESIDUAL_TOL,
};
use crate::solver::{random_separable_objective, solve_lp, LpProblem, LpStatus, Relation};
use crate::trade::{check_solution, flip_cost, solve_interim_efficient, TradeScenario};

pub const SUITES: [&str; 8] = ["choquet", "nesting", "gutmann", "rectangle", "trade", "rfauction", "ppi", "anti"];

const MAX_LOGGED_FAILURES: usize = 10;
const SNAP_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckSummary {
    fn new(check: &str) -> Self {
        CheckSummary { check: check.to_string(), ..Default::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < MAX_LOGGED_FAILURES {
            self.failures.push(what());
        }
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.to_string(), v);
    }

    pub fn ok(&self) -> bool {
        self.cases > 0 && self.passed == self.cases
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteSummary> {
    let checks = match name {
        "choquet" => vec![check_choquet()?, check_constrained_vertices(seed, 200)?],
        "nesting" => vec![check_nesting(seed, 1000)?],
        "gutmann" => vec![check_gutmann(seed, 300)?, check_joint_extremes(seed, 100)?],
        "rectangle" => vec![check_rectangle(seed, 200)?],
        "trade" => vec![check_trade_uniform(50)?, check_trade_random(seed, 4, 50)?],
        "rfauction" => vec![check_rf_feasibility(seed, 300)?, check_rf_structures()?, check_investment(seed, 30, 0.4)?],
        "ppi" => vec![check_ppi(seed)?],
        "anti" => vec![check_anti(seed, 200, 50)?],
        other => return Err(Error::InvalidGrid(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    };
    let passed = checks.iter().all(CheckSummary::ok);
    Ok(SuiteSummary { suite: name.to_string(), seed, passed, checks })
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Monotone grid with values drawn from `levels` random levels: cumulative maxima
/// of i.i.d. draws along every axis.
pub fn random_monotone(rng: &mut impl Rng, dims: &[usize], levels: usize) -> Result<GridFunction> {
    let shape = Shape::new(dims)?;
    let mut pool: Vec<f64> = (0..levels).map(|_| rng.gen_range(0.0..1.0)).collect();
    pool.push(0.0);
    pool.push(1.0);
    let mut v: Vec<f64> = (0..shape.len())
        .map(|_| {
            // Skew towards low values so the maxima do not saturate at 1.
            let k = rng.gen_range(0..pool.len());
            if rng.gen_bool(0.9) { pool[k] * rng.gen_range(0.0..0.2) } else { pool[k] }
        })
        .collect();
    let quant: Vec<f64> = {
        let mut p = pool.clone();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p
    };
    // Round each draw down to a pool level to keep repeated values.
    for x in v.iter_mut() {
        *x = *quant.iter().rev().find(|&&q| q <= *x).unwrap();
    }
    for (lo, hi) in shape.adjacent_pairs() {
        // Pairs come in increasing order of `lo`, so one pass propagates maxima.
        if v[lo] > v[hi] {
            v[hi] = v[lo];
        }
    }
    GridFunction::new(dims, v)
}

/// Clusters values within `SNAP_TOL`, snapping to 0 and 1 where close.
pub fn snap_levels(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = values.to_vec();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] - values[order[end - 1]] <= SNAP_TOL {
            end += 1;
        }
        let mean = order[start..end].iter().map(|&i| values[i]).sum::<f64>() / (end - start) as f64;
        let level = if mean <= SNAP_TOL { 0.0 } else if mean >= 1.0 - SNAP_TOL { 1.0 } else { mean };
        order[start..end].iter().for_each(|&i| out[i] = level);
        start = end;
    }
    out
}

/// Vertices of the order polytopes on 2×2 and 2×3 are exactly the up-set indicators.
pub fn check_choquet() -> Result<CheckSummary> {
    let mut s = CheckSummary::new("choquet vertices");
    for dims in [[2usize, 2], [2, 3]] {
        let p = LpProblem::new(&dims)?.with_monotonicity();
        let mut verts: Vec<Vec<f64>> = brute_force_vertices(&p)?;
        let mut ups: Vec<Vec<f64>> = enumerate_upsets(&dims)?
            .iter()
            .map(|a| GridFunction::indicator(a).into_values())
            .collect();
        let key = |v: &Vec<f64>| v.iter().map(|x| (x * 1e9).round() as i64).collect::<Vec<_>>();
        verts.sort_by_key(key);
        ups.sort_by_key(key);
        let same = verts.len() == ups.len()
            && verts.iter().zip(&ups).all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9));
        s.record(same, || format!("{dims:?}: {} vertices vs {} up-sets", verts.len(), ups.len()));
        s.metric(&format!("vertices_{}x{}", dims[0], dims[1]), verts.len() as f64);
    }
    Ok(s)
}

/// Optima of random LPs with `m` generic constraints over monotone 12×12 grids have at
/// most `m + 1` positive levels with nested level sets.
pub fn check_constrained_vertices(seed: u64, cases: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("constrained vertices");
    let mut rng = rng_for(seed, 3);
    let dims = [12, 12];
    let n = 144;
    let mut max_levels = 0usize;
    for case in 0..cases {
        let m = 1 + case % 2;
        let obj: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut p = LpProblem::new(&dims)?.with_monotonicity().with_objective(&obj);
        for _ in 0..m {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0) / n as f64).collect();
            let rhs = rng.gen_range(0.2..0.6) * row.iter().sum::<f64>();
            p.add_constraint(&row, Relation::Le, rhs);
        }
        let sol = solve_lp(&p)?;
        if sol.status != LpStatus::Optimal {
            s.record(false, || format!("case {case}: {:?}", sol.status));
            continue;
        }
        let f = GridFunction::new(&dims, snap_levels(&sol.values[..n]))?;
        let levels = f.distinct_values(0.0).into_iter().filter(|&v| v > 0.0).count();
        max_levels = max_levels.max(levels);
        let nested = is_monotone(&f, 0.0) && nesting_decompose(&f).map(|r| r.is_nested()).unwrap_or(false);
        s.record(levels <= m + 1 && nested, || format!("case {case}: m = {m}, {levels} levels, nested = {nested}"));
    }
    s.metric("max_levels", max_levels as f64);
    Ok(s)
}

/// Exact reconstruction and canonical uniqueness of the level-set decomposition.
pub fn check_nesting(seed: u64, cases: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("nesting round trip");
    let mut rng = rng_for(seed, 1);
    for case in 0..cases {
        let n = 1 + case % 3;
        let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=16)).collect();
        let levels = rng.gen_range(1..6);
        let f = random_monotone(&mut rng, &dims, levels)?;
        let rep = nesting_decompose(&f)?;
        let back = rep.reconstruct(&dims)?;
        let summed = rep.weighted_sum(&dims)?;
        let strict = rep.levels.windows(2).all(|w| w[0] < w[1])
            && rep.sets.windows(2).all(|w| w[1].is_subset(&w[0]) && w[0] != w[1])
            && rep.weights.iter().all(|&w| w > 0.0);
        let again = nesting_decompose(&back)?;
        let ok = back == f
            && summed.iter().zip(f.values()).all(|(a, b)| (a - b).abs() <= 1e-12)
            && rep.is_nested()
            && strict
            && again == rep;
        s.record(ok, || format!("case {case}: dims {dims:?}"));
    }
    Ok(s)
}

/// Majorization verdicts against the brute-force LP, and Dykstra rationalizers.
pub fn check_gutmann(seed: u64, cases: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("majorization equivalence");
    let mut rng = rng_for(seed, 4);
    let m = 6;
    let mut rationalizable = 0;
    let mut worst_residual: f64 = 0.0;
    for case in 0..cases {
        let f = random_monotone(&mut rng, &[m, m], 4)?;
        let mut q: Vec<Vec<f64>> = marginals(&f).iter().map(|q| q.values().to_vec()).collect();
        if case % 2 == 1 {
            // Independent sorted draw, shrunk towards the mean of the second marginal.
            let mean = q[1].iter().sum::<f64>() / m as f64;
            let mut d: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let dm = d.iter().sum::<f64>() / m as f64;
            let lo = d[0] - dm;
            let hi = d[m - 1] - dm;
            let mut t: f64 = 1.0;
            if lo < 0.0 {
                t = t.min(mean / -lo);
            }
            if hi > 0.0 {
                t = t.min((1.0 - mean) / hi);
            }
            q[0] = d.iter().map(|x| (mean + t * (x - dm)).clamp(0.0, 1.0)).collect();
        }
        let steps: Vec<StepFunction1D> = q.iter().map(|v| StepFunction1D::uniform(v.clone())).collect::<Result<_>>()?;
        let fast = is_rationalizable(&steps)?;
        let slow = brute_force_rationalizable(&q, &[m, m])?;
        let mut ok = fast == slow;
        if fast {
            rationalizable += 1;
            match monotone_rationalizer(&steps) {
                Ok(g) => {
                    let back = marginals(&g);
                    let r = back.iter().zip(&steps).map(|(a, b)| sup_distance(a, b)).fold(0.0, f64::max);
                    worst_residual = worst_residual.max(r);
                    ok &= is_monotone(&g, 1e-6) && r <= 1e-6;
                }
                Err(_) => ok = false,
            }
        }
        s.record(ok, || format!("case {case}: fast {fast}, brute force {slow}"));
    }
    s.metric("rationalizable", rationalizable as f64);
    s.metric("worst_residual_le_1e-6", (worst_residual <= 1e-6) as u8 as f64);
    Ok(s)
}

fn step_fn(m: usize, f: impl Fn(usize) -> f64) -> Result<StepFunction1D> {
    StepFunction1D::uniform((0..m).map(f).collect())
}

/// Synthesized joint/weak majorization extremes on 100 cells, and perturbation
/// witnesses for non-extreme pairs.
pub fn check_joint_extremes(seed: u64, cases: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("joint majorization extremes");
    let mut rng = rng_for(seed, 6);
    let m = 100;
    let cell = 1.0 / m as f64;
    for case in 0..10 {
        // Conjugate target with a jump between two ramps.
        let a = rng.gen_range(25..45);
        let b = rng.gen_range(55..75);
        let jump = rng.gen_range(a + 5..b - 5);
        let (lo, hi) = (rng.gen_range(0.1..0.3), rng.gen_range(0.6..0.8));
        let g = step_fn(m, |k| {
            let z = (k as f64 + 0.5) * cell;
            if k < a {
                lo * z / (a as f64 * cell)
            } else if k < jump {
                lo
            } else if k < b {
                hi
            } else {
                hi + (1.0 - hi) * (z - b as f64 * cell) / (1.0 - b as f64 * cell)
            }
        })?;
        let q2 = g.conjugate();
        let binding = extreme_check_joint_majorization(&q2.conjugate(), &q2);
        let lambda = (b - jump) as f64 / (b - a) as f64;
        let pooled = lambda * hi + (1.0 - lambda) * lo;
        let q1 = step_fn(m, |k| if (a..b).contains(&k) { pooled } else { g.values()[k] })?;
        let ok_pool = match square_majorization_structure(&q1, &q2) {
            Ok(sq) => sq.interval.is_some_and(|(x, y)| {
                (x - a as f64 * cell).abs() <= cell + 1e-12 && (y - b as f64 * cell).abs() <= cell + 1e-12
            }) && (sq.lambda - lambda).abs() <= cell + 1e-12,
            Err(_) => false,
        };
        let k = rng.gen_range(10..90) as f64 * cell;
        let t = g.truncate_below(k);
        let (weak, kk) = extreme_check_weak_majorization(&t, &q2);
        let ok_trunc = weak && kk.is_some_and(|x| (x - k).abs() <= cell + 1e-12);
        s.record(binding && ok_pool && ok_trunc, || {
            format!("synthetic {case}: binding {binding}, pooled {ok_pool}, truncated {ok_trunc}")
        });
    }
    let mut witnesses = 0;
    let mut drawn = 0;
    while witnesses < cases && drawn < 20 * cases {
        drawn += 1;
        let f = random_monotone(&mut rng, &[10, 10], 3)?;
        let q = marginals(&f);
        if extreme_check_joint_majorization(&q[0], &q[1]) {
            continue;
        }
        witnesses += 1;
        let ok = match joint_majorization_perturbation(&q[0], &q[1])? {
            Some(w) => {
                let apart = sup_distance(&w.q_plus[0], &w.q_minus[0]).max(sup_distance(&w.q_plus[1], &w.q_minus[1])) > 1e-9;
                let mid = (0..2).all(|a| {
                    w.q_plus[a]
                        .values()
                        .iter()
                        .zip(w.q_minus[a].values())
                        .zip(q[a].values())
                        .all(|((x, y), z)| (0.5 * (x + y) - z).abs() <= 1e-6)
                });
                apart && mid && is_monotone(&w.plus, 1e-9) && is_monotone(&w.minus, 1e-9)
            }
            None => false,
        };
        s.record(ok, || format!("non-extreme draw {drawn}: no valid witness"));
    }
    s.metric("witnesses", witnesses as f64);
    Ok(s)
}

/// Separable objective plus one separable equality on 20×20: every optimum is a
/// rectangle bi-upset and uniquely rationalized among monotone functions.
pub fn check_rectangle(seed: u64, cases: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("rectangle structure");
    let dims = [20, 20];
    let ones = vec![vec![1.0; 20]; 2];
    let mut with_rect = 0;
    for case in 0..cases {
        let base = seed.wrapping_mul(1_000_003).wrapping_add(case as u64);
        let obj = random_separable_objective(2 * base, &dims, &ones)?;
        let con = random_separable_objective(2 * base + 1, &dims, &ones)?;
        let mut p = LpProblem::new(&dims)?.with_monotonicity().with_objective(&obj.coeffs);
        let rhs = 0.5 * con.coeffs.iter().sum::<f64>();
        p.add_constraint(&con.coeffs, Relation::Eq, rhs);
        let sol = solve_lp(&p)?;
        if sol.status != LpStatus::Optimal {
            s.record(false, || format!("case {case}: {:?}", sol.status));
            continue;
        }
        let f = GridFunction::new(&dims, snap_levels(&sol.values))?;
        let rect = detect_rectangle_structure(&f)?;
        with_rect += rect.rectangle.is_some() as usize;
        let unique = unique_rationalization_check(&f, true)?.unique;
        s.record(rect.valid && unique, || format!("case {case}: valid {}, unique {unique}", rect.valid));
    }
    s.metric("with_fractional_rectangle", with_rect as f64);
    Ok(s)
}

/// Uniform types with total-surplus weights: trade iff `v >= c + 1/4` away from the
/// boundary, cross-checked against the Lagrangian oracle.
pub fn check_trade_uniform(m: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("second-best trade");
    let u = vec![1.0 / m as f64; m];
    let sc = TradeScenario::total_surplus((0.0, 1.0), (0.0, 1.0), u.clone(), u)?;
    let sol = solve_interim_efficient(&sc)?;
    let oracle = trade_lagrangian_oracle(m);
    let mut off = 0usize;
    let mut oracle_off = 0usize;
    for i in 0..m {
        for j in 0..m {
            let gap = (i as f64 - j as f64) / m as f64;
            let trade = sol.p.values()[i * m + j] > 0.5;
            if (gap - 0.25).abs() > 1.0 / m as f64 + 1e-12 {
                off += (trade != (gap >= 0.25)) as usize;
                oracle_off += (trade != oracle[i][j]) as usize;
            }
        }
    }
    s.record(off == 0, || format!("{off} cells off the closed form beyond one cell"));
    s.record(oracle_off == 0, || format!("{oracle_off} cells differ from the oracle beyond one cell"));
    s.metric("welfare", sol.welfare);
    Ok(s)
}

/// Random densities and weights: one fractional level on one rectangle, checked as a
/// unique markup-pooling vertex.
pub fn check_trade_random(seed: u64, cases: usize, m: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("random trade structure");
    for case in 0..cases {
        let sd = seed.wrapping_add(case as u64);
        let sc = TradeScenario::random(sd, m, m)?;
        let ok = match solve_interim_efficient(&sc) {
            Ok(sol) => {
                let rect = detect_rectangle_structure(&flip_cost(&sol.p))?;
                rect.valid && check_solution(&sc, &sol).is_ok()
            }
            Err(_) => false,
        };
        s.record(ok, || format!("seed {sd}"));
    }
    Ok(s)
}

/// Reduced-form feasibility on 6 cells against the brute-force LP.
pub fn check_rf_feasibility(seed: u64, cases: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("reduced form feasibility");
    let mut rng = rng_for(seed, 9);
    let m = 6;
    let mut feasible = 0;
    for case in 0..cases {
        let masses = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            if case % 3 == 0 {
                vec![1.0 / m as f64; m]
            } else {
                let v: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
                let t: f64 = v.iter().sum();
                v.into_iter().map(|x| x / t).collect()
            }
        };
        let (g1, g2) = (masses(&mut rng), masses(&mut rng));
        let scale = rng.gen_range(0.3..1.2);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let mut v: Vec<f64> = (0..m).map(|_| (rng.gen_range(0.0..1.0f64) * scale).min(1.0)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let (q1, q2) = (draw(&mut rng), draw(&mut rng));
        let rf = ReducedForm::new(q1.clone(), q2.clone(), g1.clone(), g2.clone())?;
        let fast = check_reduced_form(&rf).feasible;
        let slow = brute_force_reduced_form(&q1, &q2, &g1, &g2)?;
        feasible += fast as usize;
        s.record(fast == slow, || format!("case {case}: fast {fast}, brute force {slow}"));
    }
    s.metric("feasible", feasible as f64);
    Ok(s)
}

/// Second-price auction with reserve and sequential posted prices are recovered as
/// extreme reduced forms with their deterministic implementations.
pub fn check_rf_structures() -> Result<CheckSummary> {
    let mut s = CheckSummary::new("auction structures");
    let m = 10;
    for r in [0, 3, 6] {
        let q1 = (0..m).map(|i| if i >= r { (i + 1) as f64 / m as f64 } else { 0.0 }).collect();
        let q2 = (0..m).map(|j| if j >= r { j as f64 / m as f64 } else { 0.0 }).collect();
        let rf = ReducedForm::uniform(q1, q2)?;
        let (extreme, _) = extreme_reduced_form_check(&rf);
        let ok = extreme
            && construct_implementation(&rf).is_ok_and(|imp| {
                imp.residual(&rf) <= RESIDUAL_TOL
                    && (0..m).all(|i| {
                        (0..m).all(|j| {
                            imp.p1.get(&[i, j]) == (i >= r && i >= j) as u8 as f64
                                && imp.p2.get(&[i, j]) == (j >= r && j > i) as u8 as f64
                        })
                    })
            });
        s.record(ok, || format!("second price with reserve cell {r}"));
    }
    for (a, b) in [(6, 3), (2, 8), (5, 5)] {
        let q1: Vec<f64> = (0..m).map(|i| (i >= a) as u8 as f64).collect();
        let p_lose = a as f64 / m as f64;
        let q2 = (0..m).map(|j| if j >= b { p_lose } else { 0.0 }).collect();
        let rf = ReducedForm::uniform(q1, q2)?;
        let ok = extreme_reduced_form_check(&rf).0
            && construct_implementation(&rf).is_ok_and(|imp| {
                (0..m).all(|i| {
                    (0..m).all(|j| {
                        imp.p1.get(&[i, j]) == (i >= a) as u8 as f64 && imp.p2.get(&[i, j]) == (i < a && j >= b) as u8 as f64
                    })
                })
            });
        s.record(ok, || format!("sequential posted prices ({a}, {b})"));
    }
    Ok(s)
}

/// Investment auction: the best asymmetric vertex beats the best symmetric mechanism.
pub fn check_investment(seed: u64, m: usize, b: f64) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("investment auction");
    let g = vec![1.0 / m as f64; m];
    let spec = InvestmentSpec::new(b, &g, (0.0, 1.0))?;
    let res = solve_investment_auction(&spec, &g, seed)?;
    let (r, sym) = best_symmetric_reserve(&spec, &g);
    let gain = res.objective - sym;
    s.record(gain > 1e-6, || format!("asymmetric {} vs symmetric {sym}", res.objective));
    s.record(res.extreme && res.implementation.residual(&res.rf) <= RESIDUAL_TOL, || "best vertex is not a valid extreme point".into());
    s.metric("asymmetric", res.objective);
    s.metric("symmetric", sym);
    s.metric("symmetric_reserve_cell", r as f64);
    Ok(s)
}

/// Linear optima are bi-upsets with the prior as mean, pooling implementations
/// reproduce their marginals, and one receiver attains the `p/t` closed form.
pub fn check_ppi(seed: u64) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("private persuasion");
    let mut rng = rng_for(seed, 11);
    let mut rectangles = 0;
    for case in 0..30 {
        let dims: Vec<usize> = if case % 3 == 2 { vec![5, 5, 5] } else { vec![10, 10] };
        let prior = rng.gen_range(0.1..0.9);
        let w: Vec<Vec<f64>> = dims.iter().map(|&d| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let ok = match solve_ppi_linear(&w, prior, &dims) {
            Ok(sol) => {
                let mean_ok = (sol.signal.mean() - prior).abs() <= BAYES_TOL;
                let pool_ok = if dims.len() == 2 {
                    match pooling_implementation(&sol.signal) {
                        Ok(imp) => {
                            rectangles += 1;
                            (imp.mean() - prior).abs() <= 1e-9
                        }
                        Err(Error::NotRectangle) => true,
                        Err(_) => false,
                    }
                } else {
                    true
                };
                mean_ok && pool_ok
            }
            Err(_) => false,
        };
        s.record(ok, || format!("linear case {case}: dims {dims:?}, prior {prior:.4}"));
    }
    s.metric("pooling_round_trips", rectangles as f64);
    let (p, t, m) = (0.3, 0.6, 40);
    let sol = solve_ppi_threshold(&[t], &[1.0], p, &[m], 48, seed)?;
    s.record((sol.value - p / t).abs() <= 1.0 / m as f64, || format!("one receiver: {} vs {}", sol.value, p / t));
    s.metric("one_receiver_value", sol.value);
    Ok(s)
}

/// Up-set indicators on 8×8 are the only functions with their marginals; stochastic
/// monotone functions without rectangle structure share their marginals with some
/// other `[0,1]`-valued function.
pub fn check_anti(seed: u64, upsets: usize, stochastic: usize) -> Result<CheckSummary> {
    let mut s = CheckSummary::new("anti-equivalence");
    let mut rng = rng_for(seed, 13);
    let m = 8;
    for case in 0..upsets {
        let mut g: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=m)).collect();
        g.sort_unstable_by(|a, b| b.cmp(a));
        let a = UpSet::from_boundary(&[m, m], &g)?;
        let rep = unique_rationalization_check(&GridFunction::indicator(&a), false)?;
        s.record(rep.unique, || format!("up-set {case}: boundary {g:?} not unique"));
    }
    let mut found = 0;
    let mut drawn = 0;
    let mut refined = 0;
    while found < stochastic && drawn < 50 * stochastic {
        drawn += 1;
        let f = random_monotone(&mut rng, &[m, m], 3)?;
        let rect = detect_rectangle_structure(&f)?;
        let interior = f.values().iter().any(|&v| v > 0.0 && v < 1.0);
        if !interior || rect.valid {
            continue;
        }
        found += 1;
        let rep = unique_rationalization_check(&f, false)?;
        let ok = match (&rep.unique, &rep.witness) {
            (false, Some(w)) => {
                let alt = GridFunction::new(&[m, m], w.iter().map(|v| v.clamp(0.0, 1.0)).collect())?;
                is_witness(&f, &alt)
            }
            // Grid edges can pin a fractional cell; the same step function on a finer
            // grid always has a checkerboard witness.
            (true, _) => {
                refined += 1;
                let (fine, alt) = checkerboard_witness(&f)?;
                is_witness(&fine, &alt)
            }
            _ => false,
        };
        s.record(ok, || format!("stochastic draw {drawn}: no witness"));
    }
    s.metric("stochastic_cases", found as f64);
    s.metric("refined_witnesses", refined as f64);
    Ok(s)
}

fn is_witness(f: &GridFunction, alt: &GridFunction) -> bool {
    let (qa, qb) = (marginals(alt), marginals(f));
    alt.max_abs_diff(f) > 1e-6 && qa.iter().zip(&qb).all(|(x, y)| sup_distance(x, y) <= 1e-7)
}

/// Splits every cell of a 2D grid into 2×2 and perturbs the first fractional cell by a
/// checkerboard, which leaves both marginals unchanged. Returns `(refined f, witness)`.
pub fn checkerboard_witness(f: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    let &[m1, m2] = f.dims() else {
        return Err(Error::DimsUnequal(f.dims().to_vec()));
    };
    let fine_dims = [2 * m1, 2 * m2];
    let fine: Vec<f64> = (0..4 * m1 * m2).map(|c| f.get(&[c / (2 * m2) / 2, c % (2 * m2) / 2])).collect();
    let fine = GridFunction::new(&fine_dims, fine)?;
    let cell = (0..m1 * m2)
        .find(|&c| f.values()[c] > 0.0 && f.values()[c] < 1.0)
        .ok_or_else(|| Error::StructureViolation("no fractional cell".into()))?;
    let (i, j) = (cell / m2, cell % m2);
    let v = f.values()[cell];
    let e = v.min(1.0 - v);
    let mut alt = fine.values().to_vec();
    for (di, dj, sign) in [(0, 0, 1.0), (1, 1, 1.0), (0, 1, -1.0), (1, 0, -1.0)] {
        alt[(2 * i + di) * 2 * m2 + 2 * j + dj] += sign * e;
    }
    Ok((fine, GridFunction::new(&fine_dims, alt)?))
}
