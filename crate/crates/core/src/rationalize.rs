//! Rationalizing one-dimensional monotone marginals by a multidimensional function:
//! majorization tests, a minimum-norm rationalizer, and extreme-point checks for the
//! two-dimensional joint majorization set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{
    common_edges, is_monotone, marginals, monotonicity_violation, nesting_decompose, sup_distance, GridFunction, Shape,
    StepFunction1D, UpSet,
};
use crate::solver::{is_unique_feasible, solve_lp, LpProblem, LpStatus, Relation, UniquenessReport};

/// Absolute tolerance on tail integrals.
pub const MAJORIZATION_TOL: f64 = 1e-9;
/// Sup-norm tolerance when comparing a marginal with a conjugate.
pub const EXTREME_TOL: f64 = 1e-9;
/// Snapping and clustering tolerance for fractional values.
pub const CLUSTER_TOL: f64 = 1e-6;
pub const DYKSTRA_MAX_SWEEPS: usize = 50_000;
pub const DYKSTRA_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub holds: bool,
    pub weak: bool,
    /// `(x, Δ(x))` at every breakpoint of the common partition, `x` increasing.
    pub gaps: Vec<(f64, f64)>,
    pub equality_at_zero: bool,
    /// Indices into `gaps` where `|Δ| <= tol`.
    pub binding: Vec<usize>,
}

/// Compares upper-tail integrals of `q1` and `ghat`: `Δ(x) = ∫_x^1 ghat - ∫_x^1 q1`.
///
/// Both functions are piecewise constant, so `Δ` is piecewise linear between the
/// breakpoints of their common refinement and checking those points is exact.
pub fn check_majorization(q1: &StepFunction1D, ghat: &StepFunction1D, weak: bool) -> MajorizationReport {
    let edges = common_edges(q1, ghat);
    let gaps: Vec<(f64, f64)> =
        edges.iter().map(|&x| (x, ghat.tail_integral(x) - q1.tail_integral(x))).collect();
    let equality_at_zero = gaps[0].1.abs() <= MAJORIZATION_TOL;
    let dominated = gaps.iter().all(|g| g.1 >= -MAJORIZATION_TOL);
    let binding = (0..gaps.len()).filter(|&k| gaps[k].1.abs() <= MAJORIZATION_TOL).collect();
    MajorizationReport { holds: dominated && (weak || equality_at_zero), weak, gaps, equality_at_zero, binding }
}

/// Conjugate `z ↦ 1 - q^{-1}(1 - z)`.
pub fn conjugate(q: &StepFunction1D) -> StepFunction1D {
    q.conjugate()
}

fn dims_of(q: &[StepFunction1D]) -> Result<Vec<usize>> {
    if q.is_empty() {
        return Err(Error::InvalidGrid("no marginals".into()));
    }
    if let Some(a) = q.iter().position(|s| !s.is_uniform()) {
        return Err(Error::InvalidGrid(format!("marginal {a} is not on a uniform grid")));
    }
    Ok(q.iter().map(|s| s.m()).collect())
}

/// Marginal equalities `mean over slice x_a = j of f = q_a(j)`, appended to `p`.
fn add_marginal_rows(p: &mut LpProblem, q: &[StepFunction1D]) {
    let shape = Shape::new(&p.dims).expect("valid dims");
    let len = shape.len();
    for (a, qa) in q.iter().enumerate() {
        let d = qa.m();
        let per = (len / d) as f64;
        for (j, &v) in qa.values().iter().enumerate() {
            let row: Vec<f64> = (0..len).map(|c| if shape.coord(c, a) == j { 1.0 / per } else { 0.0 }).collect();
            p.add_constraint(&row, Relation::Eq, v);
        }
    }
}

/// LP feasibility of `{0 <= f <= 1, marginals(f) = q}` on uniform grids.
pub fn is_rationalizable_lp(q: &[StepFunction1D]) -> Result<bool> {
    let dims = dims_of(q)?;
    let mut p = LpProblem::new(&dims)?;
    add_marginal_rows(&mut p, q);
    Ok(solve_lp(&p)?.status == LpStatus::Optimal)
}

/// Cells of `q` reordered so the values are nondecreasing; widths travel with values.
pub fn sorted_rearrangement(q: &StepFunction1D) -> StepFunction1D {
    let w = q.widths();
    let mut order: Vec<usize> = (0..q.m()).collect();
    order.sort_by(|&a, &b| q.values()[a].partial_cmp(&q.values()[b]).unwrap());
    let mut edges = vec![0.0];
    for &k in &order {
        edges.push(edges.last().unwrap() + w[k]);
    }
    *edges.last_mut().unwrap() = 1.0;
    let values = order.iter().map(|&k| q.values()[k]).collect();
    StepFunction1D::with_edges(edges, values).expect("rearranged step").simplify()
}

/// Whether some `[0,1]`-valued function has marginals `q`.
///
/// Two marginals use the majorization test `q1 ⪯ conjugate(q2)` on the increasing
/// rearrangements (permuting the cells of one axis does not change feasibility);
/// three or more solve the feasibility LP.
pub fn is_rationalizable(q: &[StepFunction1D]) -> Result<bool> {
    match q.len() {
        0 => Err(Error::InvalidGrid("no marginals".into())),
        1 => Ok(true),
        2 => {
            let (a, b) = (sorted_rearrangement(&q[0]), sorted_rearrangement(&q[1]));
            Ok(check_majorization(&a, &b.conjugate(), false).holds)
        }
        _ => is_rationalizable_lp(q),
    }
}

fn marginal_residual(f: &[f64], shape: &Shape, q: &[StepFunction1D]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, qa) in q.iter().enumerate() {
        let d = qa.m();
        let mut sums = vec![0.0; d];
        for (c, v) in f.iter().enumerate() {
            sums[shape.coord(c, a)] += v;
        }
        let per = (f.len() / d) as f64;
        for (s, t) in sums.iter().zip(qa.values()) {
            worst = worst.max((s / per - t).abs());
        }
    }
    worst
}

/// Minimum-norm `f` in `[0,1]` with marginals `q`, by cyclic Dykstra projections.
///
/// The marginal constraints are affine, so their projections are exact slice-wise
/// shifts and need no correction term; only the box carries one.
pub fn monotone_rationalizer(q: &[StepFunction1D]) -> Result<GridFunction> {
    let dims = dims_of(q)?;
    if !is_rationalizable(q)? {
        return Err(Error::NotRationalizable);
    }
    let shape = Shape::new(&dims)?;
    let len = shape.len();
    let mut x = vec![0.0; len];
    let mut corr = vec![0.0; len];
    let mut sums: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
    let mut residual = f64::INFINITY;
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        for (a, qa) in q.iter().enumerate() {
            let s = &mut sums[a];
            s.iter_mut().for_each(|v| *v = 0.0);
            for (c, v) in x.iter().enumerate() {
                s[shape.coord(c, a)] += v;
            }
            let per = (len / dims[a]) as f64;
            let shift: Vec<f64> = s.iter().zip(qa.values()).map(|(t, v)| v - t / per).collect();
            for (c, v) in x.iter_mut().enumerate() {
                *v += shift[shape.coord(c, a)];
            }
        }
        for (v, p) in x.iter_mut().zip(corr.iter_mut()) {
            let y = *v + *p;
            let z = y.clamp(0.0, 1.0);
            *p = y - z;
            *v = z;
        }
        residual = marginal_residual(&x, &shape, q);
        if residual < DYKSTRA_TOL {
            return GridFunction::new(&dims, x);
        }
    }
    Err(Error::NoConvergence { iterations: DYKSTRA_MAX_SWEEPS, residual })
}

/// Marginal-polytope problem for `f`: box, marginal equalities, and optionally
/// monotonicity.
pub fn marginal_polytope(f: &GridFunction, among_monotone: bool) -> Result<LpProblem> {
    let mut p = LpProblem::new(f.dims())?;
    if among_monotone {
        p = p.with_monotonicity();
    }
    add_marginal_rows(&mut p, &marginals(f));
    Ok(p)
}

/// Marginal polytope under a product measure with per-axis cell masses `weights`:
/// the interim rows are `Σ_{c : c_a = j} Π_{b ≠ a} w_b(c_b) f(c)`.
pub fn weighted_marginal_polytope(f: &GridFunction, weights: &[Vec<f64>], among_monotone: bool) -> Result<LpProblem> {
    let dims = f.dims();
    if weights.len() != dims.len() || weights.iter().zip(dims).any(|(w, &d)| w.len() != d) {
        return Err(Error::LengthMismatch(weights.len(), dims.len()));
    }
    let shape = f.shape();
    let mut p = LpProblem::new(dims)?;
    if among_monotone {
        p = p.with_monotonicity();
    }
    for a in 0..dims.len() {
        for j in 0..dims[a] {
            let row: Vec<f64> = (0..shape.len())
                .map(|c| {
                    if shape.coord(c, a) != j {
                        return 0.0;
                    }
                    (0..dims.len()).filter(|&b| b != a).map(|b| weights[b][shape.coord(c, b)]).product()
                })
                .collect();
            let scale = row.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let row: Vec<f64> = row.iter().map(|r| r / scale).collect();
            let rhs = row.iter().zip(f.values()).map(|(r, v)| r * v).sum();
            p.add_constraint(&row, Relation::Eq, rhs);
        }
    }
    Ok(p)
}

/// Whether `f` is the only function (monotone, if requested) with its marginals.
pub fn unique_rationalization_check(f: &GridFunction, among_monotone: bool) -> Result<UniquenessReport> {
    let p = marginal_polytope(f, among_monotone)?;
    is_unique_feasible(f.values(), &p)
}

/// [`unique_rationalization_check`] with marginals taken under a product measure.
pub fn unique_rationalization_check_weighted(
    f: &GridFunction,
    weights: &[Vec<f64>],
    among_monotone: bool,
) -> Result<UniquenessReport> {
    let p = weighted_marginal_polytope(f, weights, among_monotone)?;
    is_unique_feasible(f.values(), &p)
}

/// Inclusive cell box `[(lo1, hi1), (lo2, hi2)]`.
pub type CellBox = [(usize, usize); 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleDecomposition {
    pub a1: UpSet,
    pub a2: UpSet,
    pub lambda: f64,
    pub rectangle: Option<CellBox>,
    pub valid: bool,
}

/// Splits a monotone 2D `f` into `1_{A1} + λ·1_{A2 \ A1}` and checks that the
/// difference is an axis-aligned box.
pub fn detect_rectangle_structure(f: &GridFunction) -> Result<RectangleDecomposition> {
    if f.n() != 2 {
        return Err(Error::InvalidGrid(format!("expected a 2D function, got n = {}", f.n())));
    }
    if !is_monotone(f, CLUSTER_TOL) {
        return Err(Error::NotMonotone(monotonicity_violation(f)));
    }
    let dims = f.dims();
    let vals = f.values();
    let a1 = UpSet::new(dims, vals.iter().map(|&v| v >= 1.0 - CLUSTER_TOL).collect())?;
    let a2 = UpSet::new(dims, vals.iter().map(|&v| v > CLUSTER_TOL).collect())?;
    let frac: Vec<usize> = (0..vals.len()).filter(|&c| a2.contains(c) && !a1.contains(c)).collect();
    if frac.is_empty() {
        return Ok(RectangleDecomposition { a1: a1.clone(), a2: a1, lambda: 0.0, rectangle: None, valid: true });
    }
    let lambda = frac.iter().map(|&c| vals[c]).sum::<f64>() / frac.len() as f64;
    let one_level = frac.iter().all(|&c| (vals[c] - vals[frac[0]]).abs() <= CLUSTER_TOL);
    let shape = f.shape();
    let mut bx = [(usize::MAX, 0usize), (usize::MAX, 0usize)];
    for &c in &frac {
        for (a, b) in bx.iter_mut().enumerate() {
            let i = shape.coord(c, a);
            b.0 = b.0.min(i);
            b.1 = b.1.max(i);
        }
    }
    let area = (bx[0].1 - bx[0].0 + 1) * (bx[1].1 - bx[1].0 + 1);
    let is_box = area == frac.len();
    let valid = one_level && is_box;
    Ok(RectangleDecomposition { a1, a2, lambda, rectangle: if is_box { Some(bx) } else { None }, valid })
}

/// Whether `(q1, q2)` is extreme in the joint majorization set, i.e. `q1 = conjugate(q2)`.
pub fn extreme_check_joint_majorization(q1: &StepFunction1D, q2: &StepFunction1D) -> bool {
    sup_distance(q1, &q2.conjugate()) <= EXTREME_TOL
}

/// Single pooling interval `(z_lo, z_hi]` on which `q1` is the constant
/// `λ·γ_hi + (1-λ)·γ_lo` while the conjugate of `q2` steps from `γ_lo` to `γ_hi`
/// at `(1-λ)·z_hi + λ·z_lo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareStructure {
    pub interval: Option<(f64, f64)>,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub lambda: f64,
}

/// Detects the one-interval pooling structure of an extreme point of the joint
/// majorization set with one extra linear constraint. Errors carry the index of the
/// first offending cell of `q1`.
pub fn square_majorization_structure(q1: &StepFunction1D, q2: &StepFunction1D) -> Result<SquareStructure> {
    let g = q2.conjugate();
    let edges = common_edges(q1, &g);
    let cells: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    let mid = |c: (f64, f64)| 0.5 * (c.0 + c.1);
    let q1_cell = |x: f64| q1.edges()[1..].iter().position(|&e| x <= e).unwrap_or(q1.m() - 1);
    let differs: Vec<bool> = cells.iter().map(|&c| (q1.eval(mid(c)) - g.eval(mid(c))).abs() > EXTREME_TOL).collect();
    let Some(first) = differs.iter().position(|&d| d) else {
        return Ok(SquareStructure { interval: None, gamma_lo: 0.0, gamma_hi: 0.0, lambda: 0.0 });
    };
    let last = differs.iter().rposition(|&d| d).unwrap();
    let fail = |k: usize| Error::NotOfForm(q1_cell(mid(cells[k])));
    if let Some(k) = (first..=last).find(|&k| !differs[k]) {
        return Err(fail(k));
    }
    let (z_lo, z_hi) = (cells[first].0, cells[last].1);
    let pooled = q1.eval(mid(cells[first]));
    if let Some(k) = (first..=last).find(|&k| (q1.eval(mid(cells[k])) - pooled).abs() > EXTREME_TOL) {
        return Err(fail(k));
    }
    let gamma_lo = g.eval(mid(cells[first]));
    let gamma_hi = g.eval(mid(cells[last]));
    // The conjugate takes exactly two values on the interval, low then high.
    let jump = (first..=last).find(|&k| (g.eval(mid(cells[k])) - gamma_lo).abs() > EXTREME_TOL).unwrap_or(last + 1);
    if let Some(k) = (jump..=last).find(|&k| (g.eval(mid(cells[k])) - gamma_hi).abs() > EXTREME_TOL) {
        return Err(fail(k));
    }
    if jump > last || gamma_hi <= gamma_lo {
        return Err(fail(first));
    }
    let y = cells[jump].0;
    let lambda = (z_hi - y) / (z_hi - z_lo);
    if (pooled - (lambda * gamma_hi + (1.0 - lambda) * gamma_lo)).abs() > EXTREME_TOL {
        return Err(fail(first));
    }
    // Boundary values: q1 just left of the interval and just right of it bracket the levels.
    if first > 0 && q1.eval(mid(cells[first - 1])) > gamma_lo + EXTREME_TOL {
        return Err(fail(first - 1));
    }
    if last + 1 < cells.len() && q1.eval(mid(cells[last + 1])) < gamma_hi - EXTREME_TOL {
        return Err(fail(last + 1));
    }
    Ok(SquareStructure { interval: Some((z_lo, z_hi)), gamma_lo, gamma_hi, lambda })
}

/// Whether `q1 = conjugate(q2)·1_{[k,1]}` for a breakpoint `k`; returns the smallest such `k`.
pub fn extreme_check_weak_majorization(q1: &StepFunction1D, q2: &StepFunction1D) -> (bool, Option<f64>) {
    let g = q2.conjugate();
    for k in common_edges(q1, &g) {
        if sup_distance(q1, &g.truncate_below(k)) <= EXTREME_TOL {
            return (true, Some(k));
        }
    }
    (false, None)
}

/// Two distinct rationalizable marginal pairs averaging to a non-extreme pair,
/// together with monotone functions rationalizing them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationWitness {
    pub plus: GridFunction,
    pub minus: GridFunction,
    pub q_plus: Vec<StepFunction1D>,
    pub q_minus: Vec<StepFunction1D>,
}

/// Splits the monotone rationalizer of `(q1, q2)` along its two heaviest nested
/// level sets. Returns `None` when the rationalizer is an up-set indicator, which
/// happens exactly when `q1 = conjugate(q2)`.
pub fn joint_majorization_perturbation(q1: &StepFunction1D, q2: &StepFunction1D) -> Result<Option<PerturbationWitness>> {
    let f = monotone_rationalizer(&[q1.clone(), q2.clone()])?;
    let nest = nesting_decompose(&f)?;
    let dims = f.dims().to_vec();
    // Components (set, weight), including the empty set with the residual weight.
    let mut comps: Vec<(UpSet, f64)> = nest.sets.iter().cloned().zip(nest.weights.iter().copied()).collect();
    comps.push((UpSet::empty(&dims)?, nest.residual));
    comps.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    if comps.len() < 2 || comps[1].1 < CLUSTER_TOL {
        return Ok(None);
    }
    let delta = 0.5 * comps[1].1;
    let d: Vec<f64> = (0..f.len())
        .map(|c| delta * (comps[0].0.contains(c) as u8 as f64 - comps[1].0.contains(c) as u8 as f64))
        .collect();
    let plus = GridFunction::new(&dims, f.values().iter().zip(&d).map(|(v, e)| v + e).collect())?;
    let minus = GridFunction::new(&dims, f.values().iter().zip(&d).map(|(v, e)| v - e).collect())?;
    let q_plus = marginals(&plus);
    let q_minus = marginals(&minus);
    Ok(Some(PerturbationWitness { plus, minus, q_plus, q_minus }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditiveCertificate {
    pub additive: bool,
    /// Nondecreasing per-axis profiles; empty when not additive.
    pub phi: Vec<Vec<f64>>,
    /// `min` over cells off `A` of `-Σ_a φ_a(x_a)`; zero when `A` is the full grid.
    pub margin: f64,
}

const ADDITIVE_BOUND: f64 = 1e3;

/// Whether `A = {x : Σ_a φ_a(x_a) >= 0}` for nondecreasing `φ_a`, normalized so that
/// the sum is at most `-1` off `A`.
pub fn is_additive_set(a: &UpSet) -> Result<AdditiveCertificate> {
    let dims = a.dims().to_vec();
    let shape = a.shape();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let nv: usize = dims.iter().sum();
    let mut p = LpProblem::new(&[nv])?;
    p.bounds = vec![(-ADDITIVE_BOUND, ADDITIVE_BOUND); nv];
    for (ax, &d) in dims.iter().enumerate() {
        for j in 1..d {
            p.order.push((offsets[ax] + j - 1, offsets[ax] + j));
        }
    }
    for c in 0..shape.len() {
        let mut row = vec![0.0; nv];
        for (ax, &o) in offsets.iter().enumerate() {
            row[o + shape.coord(c, ax)] = 1.0;
        }
        if a.contains(c) {
            p.add_constraint(&row, Relation::Ge, 0.0);
        } else {
            p.add_constraint(&row, Relation::Le, -1.0);
        }
    }
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Ok(AdditiveCertificate { additive: false, phi: Vec::new(), margin: 0.0 });
    }
    let phi: Vec<Vec<f64>> = offsets.iter().zip(&dims).map(|(&o, &d)| sol.values[o..o + d].to_vec()).collect();
    let margin = (0..shape.len())
        .filter(|&c| !a.contains(c))
        .map(|c| -(0..dims.len()).map(|ax| phi[ax][shape.coord(c, ax)]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let margin = if margin.is_finite() { margin } else { 0.0 };
    Ok(AdditiveCertificate { additive: true, phi, margin })
}

/// Per-axis profiles `(φ1, φ2)` whose separable sum is positive exactly on `A`:
/// `φ1(i) = -g(i)/d2` with `g` the boundary of `A`, and `φ2(j) = (j + 1/2)/d2`.
pub fn exposing_functional(a: &UpSet) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = a.boundary().ok_or_else(|| Error::InvalidGrid("exposing functional needs a 2D up-set".into()))?;
    let d2 = a.dims()[1] as f64;
    let phi1 = g.iter().map(|&b| -(b as f64) / d2).collect();
    let phi2 = (0..a.dims()[1]).map(|j| (j as f64 + 0.5) / d2).collect();
    Ok((phi1, phi2))
}

/// Objective coefficients `φ1(x1) + φ2(x2)` on the grid of `a`.
pub fn exposing_objective(a: &UpSet) -> Result<Vec<f64>> {
    let (p1, p2) = exposing_functional(a)?;
    let d2 = p2.len();
    Ok((0..p1.len() * d2).map(|c| p1[c / d2] + p2[c % d2]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::is_vertex;

    fn step(m: usize, f: impl Fn(usize) -> f64) -> StepFunction1D {
        StepFunction1D::uniform((0..m).map(f).collect()).unwrap()
    }

    fn ramp(m: usize) -> StepFunction1D {
        step(m, |k| (k + 1) as f64 / m as f64)
    }

    #[test]
    fn conjugate_examples() {
        let one = StepFunction1D::constant(8, 1.0).unwrap();
        assert!(sup_distance(&conjugate(&one), &one) <= 1e-12);
        let r = ramp(10);
        assert!(sup_distance(&conjugate(&r), &r) <= 1e-12);
        let q = step(6, |k| [0.0, 0.2, 0.2, 0.5, 0.9, 1.0][k]);
        assert!(sup_distance(&conjugate(&conjugate(&q)), &q) <= 1e-12);
    }

    #[test]
    fn majorization_examples() {
        let half = StepFunction1D::constant(4, 0.5).unwrap();
        let rep = check_majorization(&half, &conjugate(&half), false);
        assert!(rep.holds);
        let g = conjugate(&half);
        assert!((g.eval(0.25) - 0.0).abs() < 1e-12 && (g.eval(0.75) - 1.0).abs() < 1e-12);
        let same = check_majorization(&half, &half, false);
        assert!(same.holds && same.binding.len() == same.gaps.len());
        let one = StepFunction1D::constant(4, 1.0).unwrap();
        let zero = StepFunction1D::constant(4, 0.0).unwrap();
        let rep = check_majorization(&one, &conjugate(&zero), false);
        assert!(!rep.holds);
        assert!((rep.gaps[0].1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rationalizable_examples() {
        let f = GridFunction::from_fn(&[4, 5], |i| ((i[0] * 3 + i[1] * 2) % 7) as f64 / 7.0).unwrap();
        assert!(is_rationalizable(&marginals(&f)).unwrap());
        let one = StepFunction1D::constant(4, 1.0).unwrap();
        let zero = StepFunction1D::constant(4, 0.0).unwrap();
        assert!(!is_rationalizable(&[one.clone(), zero.clone()]).unwrap());
        let s = step(10, |k| if k >= 5 { 1.0 } else { 0.0 });
        let h = step(10, |k| if k >= 5 { 0.5 } else { 0.0 });
        // Two full steps need mass 1/2 from each axis; not rationalizable. Half steps are.
        assert!(!is_rationalizable(&[s.clone(), s]).unwrap());
        assert!(is_rationalizable(&[h.clone(), h.clone()]).unwrap());
        assert!(is_rationalizable_lp(&[h.clone(), h]).unwrap());
        let f3 = GridFunction::from_fn(&[3, 3, 3], |i| if i.iter().sum::<usize>() >= 3 { 1.0 } else { 0.0 }).unwrap();
        assert!(is_rationalizable(&marginals(&f3)).unwrap());
        assert!(!is_rationalizable(&[one.clone(), one, zero]).unwrap());
    }

    #[test]
    fn rationalizer_examples() {
        let a = UpSet::from_boundary(&[5, 5], &[4, 3, 3, 1, 0]).unwrap();
        let ind = GridFunction::indicator(&a);
        let f = monotone_rationalizer(&marginals(&ind)).unwrap();
        assert!(f.max_abs_diff(&ind) <= 1e-6);
        let c = StepFunction1D::constant(6, 0.3).unwrap();
        let f = monotone_rationalizer(&[c.clone(), c]).unwrap();
        assert!(f.values().iter().all(|v| (v - 0.3).abs() <= 1e-6));
        let f = monotone_rationalizer(&[ramp(6), ramp(6)]).unwrap();
        let anti = GridFunction::from_fn(&[6, 6], |i| if i[0] + i[1] >= 5 { 1.0 } else { 0.0 }).unwrap();
        assert!(f.max_abs_diff(&anti) <= 1e-6);
        let one = StepFunction1D::constant(4, 1.0).unwrap();
        let zero = StepFunction1D::constant(4, 0.0).unwrap();
        assert_eq!(monotone_rationalizer(&[one, zero]), Err(Error::NotRationalizable));
    }

    #[test]
    fn uniqueness_examples() {
        let a = UpSet::from_boundary(&[4, 4], &[3, 2, 2, 0]).unwrap();
        let ind = GridFunction::indicator(&a);
        assert!(unique_rationalization_check(&ind, false).unwrap().unique);
        // Nested up-sets differing by a 3x3 box, λ = 0.4.
        let f = GridFunction::from_fn(&[6, 6], |i| {
            if i[0] >= 4 || i[1] >= 4 {
                1.0
            } else if i[0] >= 1 && i[1] >= 1 {
                0.4
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(unique_rationalization_check(&f, true).unwrap().unique);
        let rep = unique_rationalization_check(&f, false).unwrap();
        assert!(!rep.unique);
        let w = rep.witness.unwrap();
        let g = GridFunction::new(&[6, 6], w).unwrap();
        assert!(g.max_abs_diff(&f) > 1e-6);
        let mf = marginals(&f);
        let mg = marginals(&g);
        assert!(mf.iter().zip(&mg).all(|(a, b)| sup_distance(a, b) <= 1e-7));
        let h = GridFunction::constant(&[2, 2], 0.5).unwrap();
        let rep = unique_rationalization_check(&h, false).unwrap();
        assert!(!rep.unique && rep.witness.is_some());
    }

    #[test]
    fn rectangle_detection() {
        let box_f = GridFunction::from_fn(&[6, 6], |i| {
            if i[0] >= 4 || i[1] >= 4 {
                1.0
            } else if i[0] >= 1 && i[1] >= 1 {
                0.4
            } else {
                0.0
            }
        })
        .unwrap();
        let d = detect_rectangle_structure(&box_f).unwrap();
        assert!(d.valid);
        assert_eq!(d.rectangle, Some([(1, 3), (1, 3)]));
        assert!((d.lambda - 0.4).abs() < 1e-12);
        // Difference of two nested up-sets shaped like an L.
        let l_f = GridFunction::from_fn(&[6, 6], |i| {
            if i[0] >= 4 && i[1] >= 4 {
                1.0
            } else if i[0] >= 2 && i[1] >= 2 {
                0.4
            } else {
                0.0
            }
        })
        .unwrap();
        let d = detect_rectangle_structure(&l_f).unwrap();
        assert!(!d.valid && d.rectangle.is_none());
        let a = UpSet::from_boundary(&[4, 4], &[3, 2, 2, 0]).unwrap();
        let d = detect_rectangle_structure(&GridFunction::indicator(&a)).unwrap();
        assert!(d.valid && d.rectangle.is_none());
        let bad = GridFunction::new(&[1, 2], vec![1.0, 0.0]).unwrap();
        assert!(matches!(detect_rectangle_structure(&bad), Err(Error::NotMonotone(_))));
    }

    #[test]
    fn joint_extremes() {
        assert!(extreme_check_joint_majorization(&ramp(10), &ramp(10)));
        let half = StepFunction1D::constant(10, 0.5).unwrap();
        assert!(!extreme_check_joint_majorization(&half, &half));
        let a = UpSet::from_boundary(&[7, 5], &[5, 4, 4, 2, 2, 1, 0]).unwrap();
        let q = marginals(&GridFunction::indicator(&a));
        assert!(extreme_check_joint_majorization(&q[0], &q[1]));
        assert!(joint_majorization_perturbation(&q[0], &q[1]).unwrap().is_none());
        let w = joint_majorization_perturbation(&half, &half).unwrap().unwrap();
        assert!(sup_distance(&w.q_plus[0], &w.q_minus[0]) > 1e-3);
    }

    #[test]
    fn square_structure_recovered() {
        let m = 100;
        // Conjugate target: slope-2/3 ramps outside (0.3, 0.7], levels 0.2 and 0.8 inside.
        let g = step(m, |k| {
            let z = (k as f64 + 0.5) / m as f64;
            if z <= 0.3 {
                z * 2.0 / 3.0
            } else if z <= 0.5 {
                0.2
            } else if z <= 0.7 {
                0.8
            } else {
                0.8 + (z - 0.7) * 2.0 / 3.0
            }
        });
        let q2 = g.conjugate();
        let q1 = step(m, |k| if (30..70).contains(&k) { 0.5 } else { g.values()[k] });
        let s = square_majorization_structure(&q1, &q2).unwrap();
        let (lo, hi) = s.interval.unwrap();
        assert!((lo - 0.3).abs() <= 0.01 && (hi - 0.7).abs() <= 0.01);
        assert!((s.gamma_lo - 0.2).abs() < 1e-9 && (s.gamma_hi - 0.8).abs() < 1e-9);
        assert!((s.lambda - 0.5).abs() <= 0.01);
        assert!(square_majorization_structure(&g, &q2).unwrap().interval.is_none());
        // A second pooled interval breaks the form.
        let two = step(m, |k| if (30..70).contains(&k) { 0.5 } else if (75..85).contains(&k) { 0.88 } else { g.values()[k] });
        assert!(matches!(square_majorization_structure(&two, &q2), Err(Error::NotOfForm(_))));
    }

    #[test]
    fn weak_extremes() {
        let q2 = step(20, |k| ((k * k) / 20) as f64 / 20.0);
        let g = q2.conjugate().on_uniform_grid(20);
        assert_eq!(extreme_check_weak_majorization(&g, &q2), (true, Some(0.0)));
        let zero = StepFunction1D::constant(20, 0.0).unwrap();
        assert_eq!(extreme_check_weak_majorization(&zero, &q2), (true, Some(1.0)));
        let t = g.truncate_below(0.4);
        let (ok, k) = extreme_check_weak_majorization(&t, &q2);
        assert!(ok && (k.unwrap() - 0.4).abs() <= 0.05 + 1e-12);
    }

    #[test]
    fn additive_sets() {
        let a = UpSet::from_boundary(&[5, 5], &[4, 4, 1, 1, 0]).unwrap();
        let cert = is_additive_set(&a).unwrap();
        assert!(cert.additive && cert.margin >= 1.0 - 1e-9);
        assert!(is_additive_set(&UpSet::full(&[3, 3, 3]).unwrap()).unwrap().additive);
        // Generators (0,2,1), (1,0,2), (2,1,0) are in A while their coordinate
        // rotations (0,1,2), (1,2,0), (2,0,1) are not; both triples have the same
        // coordinate multiset per axis, so no separable sum can split them.
        let dims = [3, 3, 3];
        let shape = Shape::new(&dims).unwrap();
        let gens = [[0, 2, 1], [1, 0, 2], [2, 1, 0]];
        let mask: Vec<bool> = (0..27)
            .map(|c| {
                let i = shape.unravel(c);
                gens.iter().any(|g| (0..3).all(|a| i[a] >= g[a]))
            })
            .collect();
        let up = UpSet::new(&dims, mask).unwrap();
        assert!(!is_additive_set(&up).unwrap().additive);
    }

    #[test]
    fn exposing_functionals() {
        let half = UpSet::from_boundary(&[4, 6], &[3; 4]).unwrap();
        let (p1, p2) = exposing_functional(&half).unwrap();
        assert!(p1.iter().all(|&v| (v + 0.5).abs() < 1e-12));
        assert!(p2.iter().enumerate().all(|(j, &v)| (v - (j as f64 + 0.5) / 6.0).abs() < 1e-12));
        let anti = UpSet::from_boundary(&[6, 6], &[5, 4, 3, 2, 1, 0]).unwrap();
        let (p1, _) = exposing_functional(&anti).unwrap();
        let r = ramp(6);
        assert!(p1.iter().zip(r.values()).all(|(a, b)| (a + (1.0 - b)).abs() < 1e-12));
        for a in [half, anti] {
            let c = exposing_objective(&a).unwrap();
            let p = LpProblem::new(a.dims()).unwrap().with_objective(&c);
            let sol = solve_lp(&p).unwrap();
            let ind = GridFunction::indicator(&a);
            assert!(sol.values.iter().zip(ind.values()).all(|(x, y)| (x - y).abs() < 1e-9));
            // The marginals of 1_A are a vertex of the monotone marginal polytope.
            let mp = marginal_polytope(&ind, true).unwrap();
            assert!(is_vertex(ind.values(), &mp).unwrap().is_vertex);
        }
    }
}
