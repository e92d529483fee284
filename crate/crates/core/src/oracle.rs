//! Brute-force ground truth for tiny instances.
//!
//! Nothing here calls into the main solver: constraints are assembled from raw
//! problem data and solved with a separate textbook two-phase simplex (Bland's rule,
//! explicit slacks and artificials) or by enumerating candidate bases.

use crate::error::{Error, Result};
use crate::gridfn::UpSet;
use crate::solver::{LpProblem, Relation};

const EPS: f64 = 1e-9;

/// Outcome of the reference simplex.
#[derive(Clone, Debug, PartialEq)]
pub enum RefOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Maximizes `c·x` subject to `rows[i]·x (rel[i]) b[i]` and `x >= 0`.
pub fn reference_simplex(rows: &[Vec<f64>], rel: &[Relation], b: &[f64], c: &[f64]) -> RefOutcome {
    let m = rows.len();
    let n = c.len();
    // Columns: originals, one slack/surplus per inequality, one artificial per row that needs it.
    let mut slack_of = vec![None; m];
    let mut art_of = vec![None; m];
    let mut ncols = n;
    let mut sign = vec![1.0; m];
    for i in 0..m {
        if b[i] < 0.0 {
            sign[i] = -1.0;
        }
        let r = match (rel[i], sign[i] < 0.0) {
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
            (Relation::Eq, _) => Relation::Eq,
        };
        if r != Relation::Eq {
            slack_of[i] = Some((ncols, if r == Relation::Le { 1.0 } else { -1.0 }));
            ncols += 1;
        }
        if r != Relation::Le {
            art_of[i] = Some(ncols);
            ncols += 1;
        }
    }
    let width = ncols + 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0; m];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = sign[i] * rows[i][j];
        }
        t[i][ncols] = sign[i] * b[i];
        if let Some((s, v)) = slack_of[i] {
            t[i][s] = v;
            if v > 0.0 {
                basis[i] = s;
            }
        }
        if let Some(a) = art_of[i] {
            t[i][a] = 1.0;
            basis[i] = a;
        }
    }
    let is_art = |j: usize| art_of.contains(&Some(j));

    // Phase one: minimize the sum of artificials, i.e. maximize its negative.
    let mut cost = vec![0.0; ncols];
    for a in art_of.iter().flatten() {
        cost[*a] = -1.0;
    }
    if !run_bland(&mut t, &mut basis, &cost, ncols, &|_| true) {
        return RefOutcome::Unbounded;
    }
    let infeas: f64 = (0..m).filter(|&i| is_art(basis[i])).map(|i| t[i][ncols]).sum();
    if infeas > 1e-7 {
        return RefOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if is_art(basis[i]) {
            if let Some(j) = (0..ncols).find(|&j| !is_art(j) && t[i][j].abs() > EPS) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    let mut cost = vec![0.0; ncols];
    cost[..n].copy_from_slice(c);
    if !run_bland(&mut t, &mut basis, &cost, ncols, &|j| !is_art(j)) {
        return RefOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][ncols];
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
    RefOutcome::Optimal { x, value }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, q: usize) {
    let p = t[r][q];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && row[q] != 0.0 {
            let f = row[q];
            for (a, b) in row.iter_mut().zip(&prow) {
                *a -= f * b;
            }
        }
    }
    basis[r] = q;
}

/// Maximizes `cost` with Bland's rule over columns allowed by `allowed`. Returns false
/// when unbounded.
fn run_bland(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], ncols: usize, allowed: &dyn Fn(usize) -> bool) -> bool {
    let m = t.len();
    for _ in 0..1_000_000 {
        // Reduced cost of column j: cost_j - Σ_i cost_{basis_i} t[i][j].
        let entering = (0..ncols).filter(|&j| allowed(j) && !basis.contains(&j)).find(|&j| {
            let z: f64 = (0..m).map(|i| cost[basis[i]] * t[i][j]).sum();
            cost[j] - z > EPS
        });
        let Some(q) = entering else { return true };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][q] > EPS {
                let ratio = t[i][ncols] / t[i][q];
                let better = match best {
                    None => true,
                    Some((bi, br)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && basis[i] < basis[bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else { return false };
        pivot(t, basis, r, q);
    }
    panic!("reference simplex did not terminate");
}

/// Row list of a problem rewritten over `y = x - lo >= 0`, with finite upper bounds
/// as explicit rows. Returns `(rows, relations, rhs, offset)`.
fn assemble(p: &LpProblem) -> Result<(Vec<Vec<f64>>, Vec<Relation>, Vec<f64>, Vec<f64>)> {
    let n = p.bounds.len();
    let lo: Vec<f64> = p.bounds.iter().map(|b| b.0).collect();
    if lo.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("oracle needs finite lower bounds".into()));
    }
    let mut rows = Vec::new();
    let mut rel = Vec::new();
    let mut rhs = Vec::new();
    for (v, &(l, h)) in p.bounds.iter().enumerate() {
        if h.is_finite() {
            let mut r = vec![0.0; n];
            r[v] = 1.0;
            rows.push(r);
            rel.push(Relation::Le);
            rhs.push(h - l);
        }
    }
    for &(a, b) in &p.order {
        let mut r = vec![0.0; n];
        r[a] = 1.0;
        r[b] = -1.0;
        rows.push(r);
        rel.push(Relation::Le);
        rhs.push(lo[b] - lo[a]);
    }
    for c in &p.constraints {
        let shift: f64 = c.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
        rows.push(c.coeffs.clone());
        rel.push(c.relation);
        rhs.push(c.rhs - shift);
    }
    Ok((rows, rel, rhs, lo))
}

/// Optimal value and point of `p` by the reference simplex.
pub fn brute_force_lp(p: &LpProblem) -> Result<RefOutcome> {
    let (rows, rel, rhs, lo) = assemble(p)?;
    Ok(match reference_simplex(&rows, &rel, &rhs, &p.objective) {
        RefOutcome::Optimal { x, .. } => {
            let x: Vec<f64> = x.iter().zip(&lo).map(|(y, l)| y + l).collect();
            let value = x.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
            RefOutcome::Optimal { x, value }
        }
        other => other,
    })
}

fn dims_len(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn coords(dims: &[usize], mut c: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for a in (0..dims.len()).rev() {
        out[a] = c % dims[a];
        c /= dims[a];
    }
    out
}

/// Every upward-closed subset of the grid, by checking closure against all
/// comparable pairs.
pub fn enumerate_upsets(dims: &[usize]) -> Result<Vec<UpSet>> {
    let len = dims_len(dims);
    if len > 27 || dims.is_empty() {
        return Err(Error::TooLarge(format!("{len} cells")));
    }
    let cs: Vec<Vec<usize>> = (0..len).map(|c| coords(dims, c)).collect();
    // above[c]: cells y >= c, y != c.
    let above: Vec<Vec<usize>> = (0..len)
        .map(|c| (0..len).filter(|&y| y != c && cs[y].iter().zip(&cs[c]).all(|(a, b)| a >= b)).collect())
        .collect();
    let mut out = Vec::new();
    let mut mask = vec![false; len];
    // Cells in decreasing flat order: everything above a cell has a larger index.
    fn rec(k: usize, mask: &mut Vec<bool>, above: &[Vec<usize>], dims: &[usize], out: &mut Vec<UpSet>) -> Result<()> {
        if k == 0 {
            out.push(UpSet::new(dims, mask.clone())?);
            return Ok(());
        }
        let c = k - 1;
        mask[c] = false;
        rec(c, mask, above, dims, out)?;
        if above[c].iter().all(|&y| mask[y]) {
            mask[c] = true;
            rec(c, mask, above, dims, out)?;
            mask[c] = false;
        }
        Ok(())
    }
    rec(len, &mut mask, &above, dims, &mut out)?;
    Ok(out)
}

/// Every basic feasible solution of the polytope, by solving each choice of `n`
/// linearly independent active hyperplanes. Deduplicated at `1e-9`.
pub fn brute_force_vertices(p: &LpProblem) -> Result<Vec<Vec<f64>>> {
    let n = p.bounds.len();
    if n > 12 {
        return Err(Error::TooLarge(format!("{n} variables")));
    }
    // Hyperplanes as (coeffs, value); equalities are always active.
    let mut eqs: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut ineqs: Vec<(Vec<f64>, f64)> = Vec::new();
    for (v, &(l, h)) in p.bounds.iter().enumerate() {
        let mut r = vec![0.0; n];
        r[v] = 1.0;
        if l == h {
            eqs.push((r, l));
            continue;
        }
        if l.is_finite() {
            ineqs.push((r.clone(), l));
        }
        if h.is_finite() {
            ineqs.push((r, h));
        }
    }
    for &(a, b) in &p.order {
        let mut r = vec![0.0; n];
        r[a] = 1.0;
        r[b] = -1.0;
        ineqs.push((r, 0.0));
    }
    for c in &p.constraints {
        if c.relation == Relation::Eq {
            eqs.push((c.coeffs.clone(), c.rhs));
        } else {
            ineqs.push((c.coeffs.clone(), c.rhs));
        }
    }
    let need = n.saturating_sub(eqs.len());
    if binomial(ineqs.len(), need) > 20_000_000 {
        return Err(Error::TooLarge(format!("C({}, {need}) candidate bases", ineqs.len())));
    }
    let feasible = |x: &[f64]| -> bool {
        let ok_bounds = x.iter().zip(&p.bounds).all(|(v, &(l, h))| *v >= l - EPS && *v <= h + EPS);
        let ok_order = p.order.iter().all(|&(a, b)| x[a] <= x[b] + EPS);
        let ok_cons = p.constraints.iter().all(|c| {
            let s: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            match c.relation {
                Relation::Le => s <= c.rhs + EPS,
                Relation::Ge => s >= c.rhs - EPS,
                Relation::Eq => (s - c.rhs).abs() <= EPS,
            }
        });
        ok_bounds && ok_order && ok_cons
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick: Vec<usize> = (0..need).collect();
    loop {
        let mut a: Vec<Vec<f64>> = eqs.iter().map(|e| e.0.clone()).collect();
        let mut b: Vec<f64> = eqs.iter().map(|e| e.1).collect();
        for &k in &pick {
            a.push(ineqs[k].0.clone());
            b.push(ineqs[k].1);
        }
        if let Some(x) = solve_square_or_overdetermined(a, b, n) {
            if feasible(&x) && !out.iter().any(|y| y.iter().zip(&x).all(|(u, v)| (u - v).abs() <= EPS)) {
                out.push(x);
            }
        }
        if !next_combination(&mut pick, ineqs.len()) {
            break;
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Unique solution of `a x = b` when `a` has full column rank `n` and the system is
/// consistent; `None` otherwise.
fn solve_square_or_overdetermined(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let rows = a.len();
    let mut piv_rows = Vec::with_capacity(n);
    let mut r = 0;
    for c in 0..n {
        let best = (r..rows).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[best][c].abs() < 1e-10 {
            return None;
        }
        a.swap(r, best);
        b.swap(r, best);
        for i in 0..rows {
            if i != r {
                let f = a[i][c] / a[r][c];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[r][j];
                    }
                    b[i] -= f * b[r];
                }
            }
        }
        piv_rows.push(r);
        r += 1;
    }
    if (r..rows).any(|i| b[i].abs() > 1e-9) {
        return None;
    }
    Some((0..n).map(|c| b[c] / a[c][c]).collect())
}

/// Slice-mean equalities `mean over {x_a = j} of f = q[a][j]` for each axis.
fn marginal_rows(dims: &[usize], q: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let len = dims_len(dims);
    let cs: Vec<Vec<usize>> = (0..len).map(|c| coords(dims, c)).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (a, qa) in q.iter().enumerate() {
        let per = (len / dims[a]) as f64;
        for (j, &v) in qa.iter().enumerate() {
            rows.push((0..len).map(|c| if cs[c][a] == j { 1.0 / per } else { 0.0 }).collect());
            rhs.push(v);
        }
    }
    (rows, rhs)
}

/// Whether some `f` in `[0,1]` on `dims` has slice means `q`.
pub fn brute_force_rationalizable(q: &[Vec<f64>], dims: &[usize]) -> Result<bool> {
    if q.len() != dims.len() || q.iter().zip(dims).any(|(v, &d)| v.len() != d) {
        return Err(Error::LengthMismatch(q.len(), dims.len()));
    }
    let len = dims_len(dims);
    let (mut rows, mut rhs) = marginal_rows(dims, q);
    let mut rel = vec![Relation::Eq; rows.len()];
    for c in 0..len {
        let mut r = vec![0.0; len];
        r[c] = 1.0;
        rows.push(r);
        rel.push(Relation::Le);
        rhs.push(1.0);
    }
    Ok(matches!(reference_simplex(&rows, &rel, &rhs, &vec![0.0; len]), RefOutcome::Optimal { .. }))
}

/// Whether allocation rules `p1, p2 >= 0` with `p1 + p2 <= 1` on the cells of two
/// bidders (masses `g1`, `g2`) induce interim allocations `q1`, `q2`.
pub fn brute_force_reduced_form(q1: &[f64], q2: &[f64], g1: &[f64], g2: &[f64]) -> Result<bool> {
    if q1.len() != g1.len() || q2.len() != g2.len() {
        return Err(Error::LengthMismatch(q1.len(), g1.len()));
    }
    let (m1, m2) = (g1.len(), g2.len());
    let n = 2 * m1 * m2;
    let mut rows = Vec::new();
    let mut rel = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..m1 {
        let mut r = vec![0.0; n];
        for j in 0..m2 {
            r[i * m2 + j] = g2[j];
        }
        rows.push(r);
        rel.push(Relation::Eq);
        rhs.push(q1[i]);
    }
    for j in 0..m2 {
        let mut r = vec![0.0; n];
        for i in 0..m1 {
            r[m1 * m2 + i * m2 + j] = g1[i];
        }
        rows.push(r);
        rel.push(Relation::Eq);
        rhs.push(q2[j]);
    }
    for c in 0..m1 * m2 {
        let mut r = vec![0.0; n];
        r[c] = 1.0;
        r[m1 * m2 + c] = 1.0;
        rows.push(r);
        rel.push(Relation::Le);
        rhs.push(1.0);
    }
    Ok(matches!(reference_simplex(&rows, &rel, &rhs, &vec![0.0; n]), RefOutcome::Optimal { .. }))
}

/// Whether `f` is the only `[0,1]`-valued function with its marginals, by maximizing
/// and minimizing every cell. With `monotone`, the search is restricted to monotone
/// functions.
pub fn brute_force_unique(dims: &[usize], f: &[f64], monotone: bool) -> Result<bool> {
    let len = dims_len(dims);
    if len > 100 || f.len() != len {
        return Err(Error::TooLarge(format!("{len} cells")));
    }
    let cs: Vec<Vec<usize>> = (0..len).map(|c| coords(dims, c)).collect();
    let q: Vec<Vec<f64>> = (0..dims.len())
        .map(|a| {
            let per = (len / dims[a]) as f64;
            (0..dims[a]).map(|j| (0..len).filter(|&c| cs[c][a] == j).map(|c| f[c]).sum::<f64>() / per).collect()
        })
        .collect();
    let (mut rows, mut rhs) = marginal_rows(dims, &q);
    let mut rel = vec![Relation::Eq; rows.len()];
    for c in 0..len {
        let mut r = vec![0.0; len];
        r[c] = 1.0;
        rows.push(r);
        rel.push(Relation::Le);
        rhs.push(1.0);
    }
    if monotone {
        for x in 0..len {
            for y in 0..len {
                let step = cs[y].iter().zip(&cs[x]).map(|(a, b)| *a as i64 - *b as i64).collect::<Vec<_>>();
                if step.iter().all(|&d| d >= 0) && step.iter().sum::<i64>() == 1 {
                    let mut r = vec![0.0; len];
                    r[x] = 1.0;
                    r[y] = -1.0;
                    rows.push(r);
                    rel.push(Relation::Le);
                    rhs.push(0.0);
                }
            }
        }
    }
    for c in 0..len {
        for s in [1.0, -1.0] {
            let mut obj = vec![0.0; len];
            obj[c] = s;
            match reference_simplex(&rows, &rel, &rhs, &obj) {
                RefOutcome::Optimal { value, .. } => {
                    if (s * value - f[c]).abs() > 1e-7 {
                        return Ok(false);
                    }
                }
                _ => return Err(Error::Numerical("reference simplex failed on a feasible problem".into())),
            }
        }
    }
    Ok(true)
}

/// Second-best bilateral trade threshold for uniform types on `m` cells with
/// total-surplus weights, by bisection on the Lagrange multiplier of the budget.
///
/// Trade happens iff `(v - c) + μ·(MR(v) - MC(c)) >= 0`; the multiplier is chosen so
/// that the expected budget `E[(MR - MC)·p]` is as close to zero as the grid allows
/// while staying nonnegative. Returns the trade indicator on `(v index, c index)`.
pub fn trade_lagrangian_oracle(m: usize) -> Vec<Vec<bool>> {
    let h = 1.0 / m as f64;
    let v = |k: usize| (k as f64 + 0.5) * h;
    // Discrete virtual values for equal cell masses.
    let mr = |k: usize| v(k) - h * (m - 1 - k) as f64;
    let mc = |k: usize| v(k) + h * k as f64;
    let rule = |mu: f64| -> Vec<Vec<bool>> {
        (0..m).map(|i| (0..m).map(|j| (v(i) - v(j)) + mu * (mr(i) - mc(j)) >= -1e-12).collect()).collect()
    };
    let budget = |p: &Vec<Vec<bool>>| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                if p[i][j] {
                    s += mr(i) - mc(j);
                }
            }
        }
        s
    };
    let (mut lo, mut hi) = (0.0, 1e6);
    if budget(&rule(lo)) >= 0.0 {
        return rule(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if budget(&rule(mid)) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    rule(hi)
}
