//! Private private information: independent uniform signals `s_i` and a signal
//! structure `f(s) = P(ω = 1 | s)` with mean equal to the prior.
//!
//! Receiver `i`'s belief quantile function is the slice mean `q_i` of a monotone `f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{marginals, GridFunction, Shape, StepFunction1D, UpSet};
use crate::rationalize::is_rationalizable;
use crate::solver::{solve_lp, LpProblem, LpStatus, Relation};

pub const LEVEL_TOL: f64 = 1e-7;
pub const BAYES_TOL: f64 = 1e-9;
/// Slack on the `q >= t` comparison in threshold objectives.
pub const THRESHOLD_TOL: f64 = 1e-9;
pub const DEFAULT_PROBES: usize = 64;
const TIEBREAK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PpiObjective {
    /// `Σ_i ∫ q_i w_i`, one weight per cell of each axis.
    Linear(Vec<Vec<f64>>),
    /// `Σ_i w_i · |{q_i >= t_i}|`.
    Threshold { thresholds: Vec<f64>, weights: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpiScenario {
    pub prior: f64,
    pub dims: Vec<usize>,
    pub objective: PpiObjective,
}

impl PpiScenario {
    pub fn validate(&self) -> Result<()> {
        check_prior(self.prior)?;
        Shape::new(&self.dims)?;
        let n = self.dims.len();
        match &self.objective {
            PpiObjective::Linear(w) => {
                if w.len() != n || w.iter().zip(&self.dims).any(|(w, &d)| w.len() != d) {
                    return Err(Error::LengthMismatch(w.len(), n));
                }
            }
            PpiObjective::Threshold { thresholds, weights } => {
                if thresholds.len() != n || weights.len() != n {
                    return Err(Error::LengthMismatch(thresholds.len(), n));
                }
                if thresholds.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
                    return Err(Error::InvalidGrid("thresholds must lie in (0,1)".into()));
                }
            }
        }
        Ok(())
    }
}

fn check_prior(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidGrid(format!("prior {p} not in (0,1)")));
    }
    Ok(())
}

/// `f = 1_{A1} + λ·1_{A2 \ A1}` with `λ` fixed by the prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiUpsetSignal {
    pub a1: UpSet,
    pub a2: UpSet,
    pub lambda: f64,
}

impl BiUpsetSignal {
    /// Solves `|A1| + λ·|A2 \ A1| = p·N` for `λ`; `λ = 1` when the sets coincide.
    pub fn new(a1: UpSet, a2: UpSet, prior: f64) -> Result<Self> {
        check_prior(prior)?;
        if a1.dims() != a2.dims() || !a1.is_subset(&a2) {
            return Err(Error::InvalidGrid("up-sets are not nested".into()));
        }
        let n = a1.mask().len() as f64;
        let (c1, c2) = (a1.count() as f64, a2.count() as f64);
        let lambda = if c2 == c1 {
            if (c1 / n - prior).abs() > BAYES_TOL {
                return Err(Error::Infeasible(format!("up-set mass {} differs from prior {prior}", c1 / n)));
            }
            1.0
        } else {
            (prior * n - c1) / (c2 - c1)
        };
        if !(-BAYES_TOL..=1.0 + BAYES_TOL).contains(&lambda) {
            return Err(Error::Infeasible(format!("no weight in [0,1] matches the prior (λ = {lambda})")));
        }
        Ok(BiUpsetSignal { a1, a2, lambda: lambda.clamp(0.0, 1.0) })
    }

    /// Reads the two up-sets off a function with values in `{0, λ, 1}`.
    pub fn from_function(f: &GridFunction, prior: f64) -> Result<Self> {
        let dims = f.dims();
        let v = f.values();
        let a1 = UpSet::new(dims, v.iter().map(|&x| x >= 1.0 - LEVEL_TOL).collect())
            .map_err(|_| Error::StructureViolation("top level set is not an up-set".into()))?;
        let a2 = UpSet::new(dims, v.iter().map(|&x| x > LEVEL_TOL).collect())
            .map_err(|_| Error::StructureViolation("support is not an up-set".into()))?;
        let frac: Vec<f64> = (0..v.len()).filter(|&c| a2.contains(c) && !a1.contains(c)).map(|c| v[c]).collect();
        if let (Some(lo), Some(hi)) = (
            frac.iter().copied().reduce(f64::min),
            frac.iter().copied().reduce(f64::max),
        ) {
            if hi - lo > LEVEL_TOL {
                return Err(Error::StructureViolation(format!("fractional values span [{lo}, {hi}]")));
            }
        }
        let sig = BiUpsetSignal::new(a1, a2, prior)?;
        let d = sig.signal().max_abs_diff(f);
        if d > 10.0 * LEVEL_TOL {
            return Err(Error::StructureViolation(format!("bi-upset differs from the function by {d:.3e}")));
        }
        Ok(sig)
    }

    pub fn signal(&self) -> GridFunction {
        let v = self
            .a1
            .mask()
            .iter()
            .zip(self.a2.mask())
            .map(|(&x, &y)| if x { 1.0 } else if y { self.lambda } else { 0.0 })
            .collect();
        GridFunction::new(self.a1.dims(), v).expect("bi-upset values lie in [0,1]")
    }

    pub fn mean(&self) -> f64 {
        self.signal().mean()
    }

    pub fn marginals(&self) -> Vec<StepFunction1D> {
        marginals(&self.signal())
    }
}

/// Belief quantile functions `q` are feasible for prior `p` iff they are rationalizable
/// and `∫ q_1 = p`.
pub fn check_feasible_beliefs(q: &[StepFunction1D], prior: f64) -> Result<bool> {
    check_prior(prior)?;
    if q.iter().any(|s| !s.is_nondecreasing(0.0)) {
        return Err(Error::NotMonotone(0.0));
    }
    if q.is_empty() || (q[0].integral() - prior).abs() > BAYES_TOL {
        return Ok(false);
    }
    is_rationalizable(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpiSolution {
    pub signal: BiUpsetSignal,
    pub marginals: Vec<StepFunction1D>,
    pub value: f64,
}

/// Coefficient of each cell in `Σ_i ∫ q_i w_i`.
fn cell_objective(shape: &Shape, weights: &[Vec<f64>]) -> Vec<f64> {
    let n = shape.len() as f64;
    (0..shape.len()).map(|c| (0..weights.len()).map(|a| weights[a][shape.coord(c, a)]).sum::<f64>() / n).collect()
}

fn linear_value(q: &[StepFunction1D], weights: &[Vec<f64>]) -> f64 {
    q.iter()
        .zip(weights)
        .map(|(s, w)| s.values().iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / s.m() as f64)
        .sum()
}

/// Cells grouped into orbits under permutations of the axes (all dims equal);
/// returns the orbit index of every cell and the orbit count.
fn orbits(shape: &Shape) -> (Vec<usize>, usize) {
    let mut key_to_orbit = std::collections::HashMap::new();
    let mut orbit = vec![0; shape.len()];
    for c in 0..shape.len() {
        let mut key = shape.unravel(c);
        key.sort_unstable();
        let next = key_to_orbit.len();
        orbit[c] = *key_to_orbit.entry(key).or_insert(next);
    }
    (orbit, key_to_orbit.len())
}

/// Monotone `f` with mean `p`, maximizing `obj · f`. With `symmetric`, `f` is
/// restricted to functions invariant under permuting the axes.
fn solve_signal_lp(shape: &Shape, obj: &[f64], prior: f64, symmetric: bool) -> Result<GridFunction> {
    let dims = shape.dims().to_vec();
    let len = shape.len();
    let values = if symmetric {
        let (orbit, k) = orbits(shape);
        let mut p = LpProblem::new(&[k])?;
        let mut size = vec![0.0; k];
        for c in 0..len {
            p.objective[orbit[c]] += obj[c];
            size[orbit[c]] += 1.0;
        }
        let mut pairs: Vec<(usize, usize)> = shape
            .adjacent_pairs()
            .into_iter()
            .map(|(a, b)| (orbit[a], orbit[b]))
            .filter(|(a, b)| a != b)
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        p.order = pairs;
        p.add_constraint(&size.iter().map(|s| s / len as f64).collect::<Vec<_>>(), Relation::Eq, prior);
        let sol = solve_lp(&p)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Numerical(format!("signal LP is {:?}", sol.status)));
        }
        (0..len).map(|c| sol.values[orbit[c]]).collect::<Vec<_>>()
    } else {
        let mut p = LpProblem::new(&dims)?.with_monotonicity().with_objective(obj);
        p.add_constraint(&vec![1.0 / len as f64; len], Relation::Eq, prior);
        let sol = solve_lp(&p)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Numerical(format!("signal LP is {:?}", sol.status)));
        }
        sol.values
    };
    GridFunction::new(&dims, values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

fn is_symmetric(weights: &[Vec<f64>]) -> bool {
    weights.windows(2).all(|w| w[0].len() == w[1].len() && w[0].iter().zip(&w[1]).all(|(a, b)| (a - b).abs() <= 1e-12))
}

/// Optimal signal for a linear objective in the belief quantiles. Symmetric weights on
/// equal axes are solved over symmetric signals.
pub fn solve_ppi_linear(weights: &[Vec<f64>], prior: f64, dims: &[usize]) -> Result<PpiSolution> {
    let s = PpiScenario { prior, dims: dims.to_vec(), objective: PpiObjective::Linear(weights.to_vec()) };
    s.validate()?;
    let shape = Shape::new(dims)?;
    let symmetric = dims.len() > 1 && is_symmetric(weights);
    let base = cell_objective(&shape, weights);
    let mut last = None;
    for attempt in 0..2 {
        let mut obj = base.clone();
        if attempt == 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x991);
            let mut noise: Vec<f64> = (0..obj.len()).map(|_| TIEBREAK * rng.gen_range(-1.0..1.0)).collect();
            if symmetric {
                let (orbit, _) = orbits(&shape);
                noise = (0..obj.len()).map(|c| noise[orbit.iter().position(|&o| o == orbit[c]).unwrap()]).collect();
            }
            obj.iter_mut().zip(noise).for_each(|(o, e)| *o += e);
        }
        let f = solve_signal_lp(&shape, &obj, prior, symmetric)?;
        match BiUpsetSignal::from_function(&f, prior) {
            Ok(signal) => {
                let q = signal.marginals();
                let value = linear_value(&q, weights);
                return Ok(PpiSolution { signal, marginals: q, value });
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// An up-set `A*` given by a real-valued lower boundary over the cells of axis 0,
/// with signals of axis 1 pooled on `interval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolingImplementation {
    /// Lower boundary of `A*` in `[0,1]` units of axis 1, one entry per column.
    pub boundary: Vec<f64>,
    pub rows: usize,
    pub pooled_axis: usize,
    /// Pooled cells `lo..=hi` of axis 1, with the interval in signal units.
    pub interval: Option<((usize, usize), (f64, f64))>,
}

impl PoolingImplementation {
    pub fn mean(&self) -> f64 {
        self.boundary.iter().map(|b| 1.0 - b).sum::<f64>() / self.boundary.len() as f64
    }

    /// Belief quantiles per cell of both axes after pooling.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let m2 = self.rows;
        let q1 = self.boundary.iter().map(|b| 1.0 - b).collect();
        let mut q2: Vec<f64> = (0..m2)
            .map(|r| {
                let (lo, hi) = (r as f64 / m2 as f64, (r + 1) as f64 / m2 as f64);
                let cover: f64 = self.boundary.iter().map(|&b| (hi - b.max(lo)).max(0.0)).sum();
                cover * m2 as f64 / self.boundary.len() as f64
            })
            .collect();
        if let Some(((lo, hi), _)) = self.interval {
            let avg = q2[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
            q2[lo..=hi].iter_mut().for_each(|x| *x = avg);
        }
        (q1, q2)
    }
}

/// Up-set from averaging the lower boundaries of `A1` and `A2` with weights
/// `1 - λ` and `λ`, pooling axis 1 over the rows of the rectangle `A2 \ A1`.
pub fn pooling_implementation(sig: &BiUpsetSignal) -> Result<PoolingImplementation> {
    let dims = sig.a1.dims().to_vec();
    if dims.len() != 2 {
        return Err(Error::InvalidGrid("pooling implementation needs two receivers".into()));
    }
    let (m1, m2) = (dims[0], dims[1]);
    let shape = sig.a1.shape();
    let diff: Vec<usize> = (0..shape.len()).filter(|&c| sig.a2.contains(c) && !sig.a1.contains(c)).collect();
    let g1 = sig.a1.boundary().ok_or_else(|| Error::InvalidGrid("no boundary".into()))?;
    let g2 = sig.a2.boundary().ok_or_else(|| Error::InvalidGrid("no boundary".into()))?;
    let interval = if diff.is_empty() {
        None
    } else {
        let mut bx = [(usize::MAX, 0usize); 2];
        for &c in &diff {
            for (a, b) in bx.iter_mut().enumerate() {
                let i = shape.coord(c, a);
                b.0 = b.0.min(i);
                b.1 = b.1.max(i);
            }
        }
        if (bx[0].1 - bx[0].0 + 1) * (bx[1].1 - bx[1].0 + 1) != diff.len() {
            return Err(Error::NotRectangle);
        }
        let (lo, hi) = bx[1];
        Some(((lo, hi), (lo as f64 / m2 as f64, (hi + 1) as f64 / m2 as f64)))
    };
    let lam = if diff.is_empty() { 0.0 } else { sig.lambda };
    let boundary =
        (0..m1).map(|i| ((1.0 - lam) * g1[i] as f64 + lam * g2[i] as f64) / m2 as f64).collect();
    let imp = PoolingImplementation { boundary, rows: m2, pooled_axis: 1, interval };
    let (q1, q2) = imp.marginals();
    let want = sig.marginals();
    let err = q1
        .iter()
        .zip(want[0].values())
        .chain(q2.iter().zip(want[1].values()))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if err > 1e-9 {
        return Err(Error::Numerical(format!("pooled marginals differ by {err:.3e}")));
    }
    Ok(imp)
}

/// `Σ_i w_i · |{q_i >= t_i}|`, counting beliefs exactly at the threshold.
pub fn threshold_objective(q: &[StepFunction1D], thresholds: &[f64], weights: &[f64]) -> f64 {
    q.iter()
        .zip(thresholds)
        .zip(weights)
        .map(|((s, &t), &w)| {
            let mass: f64 =
                s.values().iter().zip(s.widths()).filter(|(v, _)| **v >= t - THRESHOLD_TOL).map(|(_, w)| w).sum();
            w * mass
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub label: String,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSolution {
    pub signal: BiUpsetSignal,
    pub marginals: Vec<StepFunction1D>,
    pub value: f64,
    pub probes: Vec<ProbeRecord>,
}

/// Weights rewarding `q_i` at cell `a_i` and penalizing it below, per axis; their
/// optimum spreads the prior evenly over a region where the beliefs clear a cut.
fn cut_weights(dims: &[usize], cuts: &[Option<usize>]) -> Vec<Vec<f64>> {
    dims.iter()
        .zip(cuts)
        .map(|(&d, cut)| match cut {
            None => vec![0.0; d],
            Some(a) => (0..d).map(|j| if j < *a { -1.0 } else if j == *a { 1.0 } else { 0.0 }).collect(),
        })
        .collect()
}

/// Heuristic maximization of the threshold objective over nested bi-upset signals.
///
/// Candidates are the uninformative signal and LP vertices for linear probes: single
/// receiver cuts, common cuts, random cut tuples, then random weights. Every probe is
/// logged; at most `probes` LPs are solved.
pub fn solve_ppi_threshold(
    thresholds: &[f64],
    weights: &[f64],
    prior: f64,
    dims: &[usize],
    probes: usize,
    seed: u64,
) -> Result<ThresholdSolution> {
    let s = PpiScenario {
        prior,
        dims: dims.to_vec(),
        objective: PpiObjective::Threshold { thresholds: thresholds.to_vec(), weights: weights.to_vec() },
    };
    s.validate()?;
    let n = dims.len();
    let shape = Shape::new(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plans: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    for a in 0..n {
        for k in 0..dims[a] {
            let cuts: Vec<Option<usize>> = (0..n).map(|b| if b == a { Some(k) } else { None }).collect();
            plans.push((format!("cut axis {a} at {k}"), cut_weights(dims, &cuts)));
        }
    }
    let dmin = *dims.iter().min().unwrap();
    for k in 0..dmin {
        plans.push((format!("common cut at {k}"), cut_weights(dims, &vec![Some(k); n])));
    }
    let mut log = Vec::new();
    let uninformative = BiUpsetSignal::new(UpSet::empty(dims)?, UpSet::full(dims)?, prior)?;
    let q0 = uninformative.marginals();
    let v0 = threshold_objective(&q0, thresholds, weights);
    log.push(ProbeRecord { label: "uninformative".into(), value: Some(v0) });
    let mut best = (v0, uninformative, q0);
    let mut solved = 0;
    let mut next = 0;
    while solved < probes {
        let (label, w) = if next < plans.len() {
            plans[next].clone()
        } else if next % 2 == 0 {
            let cuts: Vec<Option<usize>> = dims.iter().map(|&d| Some(rng.gen_range(0..d))).collect();
            (format!("random cuts {cuts:?}"), cut_weights(dims, &cuts))
        } else {
            ("random weights".to_string(), dims.iter().map(|&d| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect())
        };
        next += 1;
        solved += 1;
        let mut obj = cell_objective(&shape, &w);
        obj.iter_mut().for_each(|o| *o += TIEBREAK * rng.gen_range(-1.0..1.0));
        let outcome = solve_signal_lp(&shape, &obj, prior, false).and_then(|f| BiUpsetSignal::from_function(&f, prior));
        match outcome {
            Ok(sig) => {
                let q = sig.marginals();
                let v = threshold_objective(&q, thresholds, weights);
                log.push(ProbeRecord { label, value: Some(v) });
                if v > best.0 + 1e-12 {
                    best = (v, sig, q);
                }
            }
            Err(_) => log.push(ProbeRecord { label, value: None }),
        }
    }
    let (value, signal, marginals) = best;
    Ok(ThresholdSolution { signal, marginals, value, probes: log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::is_monotone;

    fn step(values: Vec<f64>) -> StepFunction1D {
        StepFunction1D::uniform(values).unwrap()
    }

    #[test]
    fn feasible_beliefs() {
        let p = 0.3;
        let m = 10;
        assert!(check_feasible_beliefs(&[step(vec![p; m]), step(vec![p; m])], p).unwrap());
        let reveal = step((0..m).map(|j| if j >= 7 { 1.0 } else { 0.0 }).collect());
        assert!(check_feasible_beliefs(&[reveal, step(vec![p; m])], p).unwrap());
        assert!(!check_feasible_beliefs(&[step(vec![p; m]), step(vec![1.0; m])], p).unwrap());
        assert!(!check_feasible_beliefs(&[step(vec![0.5; m]), step(vec![0.5; m])], p).unwrap());
    }

    #[test]
    fn lambda_closed_form() {
        let dims = [4, 4];
        let a1 = UpSet::from_boundary(&dims, &[4, 3, 2, 1]).unwrap();
        let a2 = UpSet::from_boundary(&dims, &[3, 2, 1, 0]).unwrap();
        // |A1| = 6, |A2| = 10, so λ = (16p - 6) / 4.
        let sig = BiUpsetSignal::new(a1.clone(), a2.clone(), 0.5).unwrap();
        assert!((sig.lambda - 0.5).abs() < 1e-15);
        assert!((sig.mean() - 0.5).abs() < 1e-15);
        assert!(matches!(BiUpsetSignal::new(a1.clone(), a2.clone(), 0.9), Err(Error::Infeasible(_))));
        assert!(BiUpsetSignal::new(a2, a1, 0.5).is_err());
    }

    #[test]
    fn linear_vertices_are_bi_upsets() {
        let dims = [8, 8];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let w: Vec<Vec<f64>> = dims.iter().map(|&d| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let sol = solve_ppi_linear(&w, 0.35, &dims).unwrap();
            let f = sol.signal.signal();
            assert!(is_monotone(&f, 0.0));
            assert!(f.distinct_values(1e-9).len() <= 3);
            assert!((sol.signal.mean() - 0.35).abs() <= BAYES_TOL);
        }
        let zero = solve_ppi_linear(&[vec![0.0; 5], vec![0.0; 5]], 0.4, &[5, 5]).unwrap();
        assert!((zero.signal.mean() - 0.4).abs() <= BAYES_TOL);
    }

    #[test]
    fn upper_tail_weight_favours_receiver_one() {
        let m = 10;
        let w1: Vec<f64> = (0..m).map(|j| if j >= 7 { 1.0 } else { -0.2 }).collect();
        let w2: Vec<f64> = (0..m).map(|j| if j >= 7 { 0.2 } else { -0.2 }).collect();
        let sol = solve_ppi_linear(&[w1, w2], 0.3, &[m, m]).unwrap();
        let (q1, q2) = (&sol.marginals[0], &sol.marginals[1]);
        assert!(q1.tail_integral(0.7) > q2.tail_integral(0.7) + 0.05);
    }

    #[test]
    fn symmetric_weights_give_symmetric_signal() {
        let m = 7;
        let w: Vec<f64> = (0..m).map(|j| (j as f64 - 3.2).powi(3)).collect();
        let sol = solve_ppi_linear(&[w.clone(), w], 0.4, &[m, m]).unwrap();
        let f = sol.signal.signal();
        for i in 0..m {
            for j in 0..m {
                assert_eq!(f.get(&[i, j]), f.get(&[j, i]));
            }
        }
    }

    #[test]
    fn pooling_round_trip() {
        let dims = [10, 10];
        // A2 \ A1 is columns 2..=4 by rows 4..=5.
        let g1 = [10, 10, 6, 6, 6, 3, 3, 2, 1, 0];
        let g2 = [10, 10, 4, 4, 4, 3, 3, 2, 1, 0];
        let a1 = UpSet::from_boundary(&dims, &g1).unwrap();
        let a2 = UpSet::from_boundary(&dims, &g2).unwrap();
        let prior = (a1.count() as f64 + 0.5 * 6.0) / 100.0;
        let sig = BiUpsetSignal::new(a1.clone(), a2, prior).unwrap();
        assert!((sig.lambda - 0.5).abs() < 1e-12);
        let imp = pooling_implementation(&sig).unwrap();
        let ((lo, hi), (x, y)) = imp.interval.unwrap();
        assert_eq!((lo, hi), (4, 5));
        assert!((x - 0.4).abs() < 1e-15 && (y - 0.6).abs() < 1e-15);
        for i in 2..=4 {
            assert!((imp.boundary[i] - 0.5).abs() < 1e-15);
        }
        assert!((imp.mean() - prior).abs() < 1e-12);

        let flat = BiUpsetSignal::new(a1.clone(), a1.clone(), a1.count() as f64 / 100.0).unwrap();
        let imp = pooling_implementation(&flat).unwrap();
        assert!(imp.interval.is_none());
        assert_eq!(imp.boundary, g1.iter().map(|&g| g as f64 / 10.0).collect::<Vec<_>>());

        let g2 = [10, 10, 5, 5, 4, 3, 3, 2, 1, 0];
        let a2 = UpSet::from_boundary(&dims, &g2).unwrap();
        let sig = BiUpsetSignal::new(a1.clone(), a2.clone(), (a1.count() as f64 + 2.0) / 100.0).unwrap();
        assert!(matches!(pooling_implementation(&sig), Err(Error::NotRectangle)));
    }

    #[test]
    fn threshold_tie_convention() {
        let p = 0.4;
        let q = vec![step(vec![p; 5]), step(vec![p; 5])];
        assert!((threshold_objective(&q, &[p, p], &[1.0, 2.0]) - 3.0).abs() < 1e-15);
        assert_eq!(threshold_objective(&q, &[p + 0.01, p + 0.01], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn one_receiver_persuasion() {
        let (p, t, m) = (0.3, 0.6, 40);
        let sol = solve_ppi_threshold(&[t], &[1.0], p, &[m], 48, 1).unwrap();
        assert!((sol.value - p / t).abs() <= 1.0 / m as f64, "{}", sol.value);
    }

    #[test]
    fn two_receivers_beat_one() {
        let (p, t, m) = (0.3, 0.5, 12);
        let sol = solve_ppi_threshold(&[t, t], &[1.0, 1.0], p, &[m, m], 64, 2).unwrap();
        assert!(sol.value >= p / t - 1e-9, "{}", sol.value);
        assert!((sol.signal.mean() - p).abs() <= BAYES_TOL);
    }
}
