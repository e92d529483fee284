//! Two alternatives, linear utilities `a_i^k θ_i + c_i^k - t_i`, independent discrete types.
//!
//! Mechanisms are the probability `p1` of alternative 1 on the type grid. After
//! normalization every axis runs in the direction that favours alternative 1, so BIC is
//! monotonicity of the interim marginals and DIC is monotonicity of the grid itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{is_monotone, GridFunction, QuantileTransform, UpSet};
use crate::rationalize::{is_additive_set, unique_rationalization_check_weighted, AdditiveCertificate};

pub const EQUIV_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScgScenario {
    /// `a[i] = [a_i^1, a_i^2]`.
    pub a: Vec<[f64; 2]>,
    pub c: Vec<[f64; 2]>,
    /// Type cell masses per agent, lowest type first.
    pub masses: Vec<Vec<f64>>,
}

impl ScgScenario {
    pub fn new(a: Vec<[f64; 2]>, c: Vec<[f64; 2]>, masses: Vec<Vec<f64>>) -> Result<Self> {
        let s = ScgScenario { a, c, masses };
        s.validate()?;
        Ok(s)
    }

    /// Uniform type masses on `dims`.
    pub fn uniform(a: Vec<[f64; 2]>, c: Vec<[f64; 2]>, dims: &[usize]) -> Result<Self> {
        let masses = dims.iter().map(|&d| vec![1.0 / d as f64; d]).collect();
        ScgScenario::new(a, c, masses)
    }

    pub fn from_distributions(a: Vec<[f64; 2]>, c: Vec<[f64; 2]>, g: &[QuantileTransform], dims: &[usize]) -> Result<Self> {
        if g.len() != dims.len() {
            return Err(Error::LengthMismatch(g.len(), dims.len()));
        }
        let masses = g.iter().zip(dims).map(|(g, &d)| g.cell_masses(d)).collect();
        ScgScenario::new(a, c, masses)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        if self.a.len() != n || self.c.len() != n {
            return Err(Error::LengthMismatch(self.a.len(), n));
        }
        if let Some(i) = self.a.iter().position(|a| a[0] == a[1]) {
            return Err(Error::InvalidGrid(format!("agent {i} has equal slopes for both alternatives")));
        }
        for m in &self.masses {
            let total: f64 = m.iter().sum();
            if m.is_empty() || m.iter().any(|&x| !(x > 0.0)) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidGrid("type masses must be positive and sum to one".into()));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.masses.iter().map(Vec::len).collect()
    }

    /// Axes whose types favour alternative 2 as they rise.
    pub fn flipped(&self) -> Vec<bool> {
        self.a.iter().map(|a| a[0] < a[1]).collect()
    }
}

/// Interim probability of alternative 1 for every type of every agent.
pub fn interim_allocation(p: &GridFunction, masses: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let shape = p.shape();
    let n = shape.n();
    let mut q: Vec<Vec<f64>> = masses.iter().map(|m| vec![0.0; m.len()]).collect();
    for (c, &v) in p.values().iter().enumerate() {
        let idx = shape.unravel(c);
        for a in 0..n {
            let w: f64 = (0..n).filter(|&b| b != a).map(|b| masses[b][idx[b]]).product();
            q[a][idx[a]] += w * v;
        }
    }
    q
}

/// Interim utility of each type before transfers.
pub fn interim_utilities(s: &ScgScenario, p: &GridFunction, types: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let q = interim_allocation(p, &s.masses);
    q.iter()
        .enumerate()
        .map(|(i, qi)| {
            let ([a1, a2], [c1, c2]) = (s.a[i], s.c[i]);
            qi.iter().zip(&types[i]).map(|(&x, &t)| x * (a1 * t + c1) + (1.0 - x) * (a2 * t + c2)).collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMechanism {
    pub p: GridFunction,
    pub masses: Vec<Vec<f64>>,
    pub flipped: Vec<bool>,
}

impl NormalizedMechanism {
    pub fn interim(&self) -> Vec<Vec<f64>> {
        interim_allocation(&self.p, &self.masses)
    }

    pub fn is_deterministic(&self) -> bool {
        self.p.values().iter().all(|&v| v <= EQUIV_TOL || v >= 1.0 - EQUIV_TOL)
    }
}

fn reverse_axes(p: &GridFunction, flip: &[bool]) -> Result<GridFunction> {
    let dims = p.dims().to_vec();
    GridFunction::from_fn(&dims, |idx| {
        let src: Vec<usize> = idx.iter().zip(&dims).zip(flip).map(|((&i, &d), &f)| if f { d - 1 - i } else { i }).collect();
        p.get(&src)
    })
}

/// Reorders every axis so that alternative 1 becomes more attractive along it.
pub fn normalize_mechanism(s: &ScgScenario, p1: &GridFunction) -> Result<NormalizedMechanism> {
    s.validate()?;
    if p1.dims() != s.dims().as_slice() {
        return Err(Error::DimsUnequal(p1.dims().to_vec()));
    }
    let flipped = s.flipped();
    let p = reverse_axes(p1, &flipped)?;
    let masses = s
        .masses
        .iter()
        .zip(&flipped)
        .map(|(m, &f)| if f { m.iter().rev().copied().collect() } else { m.clone() })
        .collect();
    Ok(NormalizedMechanism { p, masses, flipped })
}

/// Inverse of [`normalize_mechanism`].
pub fn denormalize_mechanism(n: &NormalizedMechanism) -> Result<GridFunction> {
    reverse_axes(&n.p, &n.flipped)
}

pub fn check_bic(n: &NormalizedMechanism) -> bool {
    n.interim().iter().all(|q| q.windows(2).all(|w| w[0] <= w[1] + EQUIV_TOL))
}

pub fn check_dic(n: &NormalizedMechanism) -> bool {
    is_monotone(&n.p, EQUIV_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub bic: [bool; 2],
    pub dic: [bool; 2],
    pub deterministic: [bool; 2],
    pub payoff_equivalent: bool,
    pub expost_equivalent: bool,
    pub normalized: [GridFunction; 2],
}

/// Compares two mechanisms and enforces that a deterministic DIC mechanism has no
/// payoff-equivalent mechanism with different ex-post allocations.
pub fn anti_equivalence_report(s: &ScgScenario, pa: &GridFunction, pb: &GridFunction) -> Result<EquivalenceReport> {
    if s.masses.len() != 2 {
        return Err(Error::InvalidGrid("anti-equivalence needs two agents".into()));
    }
    let na = normalize_mechanism(s, pa)?;
    let nb = normalize_mechanism(s, pb)?;
    let (qa, qb) = (na.interim(), nb.interim());
    let payoff_equivalent =
        qa.iter().zip(&qb).all(|(x, y)| x.iter().zip(y).all(|(u, v)| (u - v).abs() <= EQUIV_TOL));
    let expost_equivalent = na.p.max_abs_diff(&nb.p) <= EQUIV_TOL;
    let report = EquivalenceReport {
        bic: [check_bic(&na), check_bic(&nb)],
        dic: [check_dic(&na), check_dic(&nb)],
        deterministic: [na.is_deterministic(), nb.is_deterministic()],
        payoff_equivalent,
        expost_equivalent,
        normalized: [na.p, nb.p],
    };
    for k in 0..2 {
        if report.deterministic[k] && report.dic[k] && payoff_equivalent && !expost_equivalent {
            return Err(Error::TheoremViolation(format!(
                "mechanism {} is deterministic and DIC but a payoff-equivalent mechanism differs ex post",
                if k == 0 { "A" } else { "B" }
            )));
        }
    }
    Ok(report)
}

/// A different mechanism with the same interim allocations, if one exists.
pub fn equivalent_alternative(n: &NormalizedMechanism) -> Result<Option<GridFunction>> {
    let rep = unique_rationalization_check_weighted(&n.p, &n.masses, false)?;
    match rep.witness {
        Some(w) if !rep.unique => Ok(Some(GridFunction::new(n.p.dims(), w.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())?)),
        _ => Ok(None),
    }
}

/// Whether a deterministic mechanism is `1_A` for an additive up-set `A`. The returned
/// certificate has a strictly increasing first profile and positive margin.
pub fn exposed_mechanism_check(n: &NormalizedMechanism) -> Result<(bool, AdditiveCertificate)> {
    if !n.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let dims = n.p.dims().to_vec();
    let not_additive = AdditiveCertificate { additive: false, phi: Vec::new(), margin: 0.0 };
    let Ok(a) = UpSet::new(&dims, n.p.values().iter().map(|&v| v >= 0.5).collect()) else {
        return Ok((false, not_additive));
    };
    let mut cert = is_additive_set(&a)?;
    if !cert.additive {
        return Ok((false, cert));
    }
    // The certificate separates by at least one, so a slope below 1/d0 keeps it valid.
    let eps = 0.5 / dims[0] as f64;
    cert.phi[0].iter_mut().enumerate().for_each(|(j, x)| *x += eps * j as f64);
    let shape = a.shape();
    let sum = |c: usize| (0..dims.len()).map(|ax| cert.phi[ax][shape.coord(c, ax)]).sum::<f64>();
    let ok_in = (0..shape.len()).filter(|&c| a.contains(c)).all(|c| sum(c) >= -EQUIV_TOL);
    let margin = (0..shape.len()).filter(|&c| !a.contains(c)).map(|c| -sum(c)).fold(f64::INFINITY, f64::min);
    cert.margin = if margin.is_finite() { margin } else { 1.0 };
    let exposed = ok_in && cert.margin > 0.0;
    cert.additive = exposed;
    Ok((exposed, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::Shape;

    fn grid(dims: &[usize], v: &[f64]) -> GridFunction {
        GridFunction::new(dims, v.to_vec()).unwrap()
    }

    fn scenario(flip1: bool, flip2: bool, dims: &[usize]) -> ScgScenario {
        let a = |f: bool| if f { [0.0, 1.0] } else { [1.0, 0.0] };
        ScgScenario::uniform(vec![a(flip1), a(flip2)], vec![[0.0, 0.0]; 2], dims).unwrap()
    }

    #[test]
    fn normalization() {
        let p = grid(&[2, 3], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let id = normalize_mechanism(&scenario(false, false, &[2, 3]), &p).unwrap();
        assert_eq!(id.p, p);
        let s = scenario(true, false, &[2, 3]);
        let n = normalize_mechanism(&s, &p).unwrap();
        assert_eq!(n.p.values(), &[0.4, 0.5, 0.6, 0.1, 0.2, 0.3]);
        assert_eq!(denormalize_mechanism(&n).unwrap(), p);
        // Public good: alternative 1 is worth the value, alternative 2 nothing.
        let pg = ScgScenario::uniform(vec![[1.0, 0.0]; 2], vec![[0.0, 0.0]; 2], &[2, 3]).unwrap();
        assert_eq!(normalize_mechanism(&pg, &p).unwrap().p, p);
    }

    #[test]
    fn normalization_preserves_interim_payoffs() {
        let masses = vec![vec![0.2, 0.5, 0.3], vec![0.6, 0.4]];
        let s = ScgScenario::new(vec![[-1.0, 2.0], [3.0, 0.5]], vec![[0.5, 0.0], [0.0, 1.0]], masses).unwrap();
        let p = grid(&[3, 2], &[0.9, 0.1, 0.4, 0.7, 0.3, 0.2]);
        let types = vec![vec![0.0, 0.5, 1.0], vec![1.0, 2.0]];
        let before = interim_utilities(&s, &p, &types);
        let n = normalize_mechanism(&s, &p).unwrap();
        let q = n.interim();
        for i in 0..2 {
            for j in 0..types[i].len() {
                let jj = if n.flipped[i] { types[i].len() - 1 - j } else { j };
                let ([a1, a2], [c1, c2]) = (s.a[i], s.c[i]);
                let t = types[i][j];
                let u = q[i][jj] * (a1 * t + c1) + (1.0 - q[i][jj]) * (a2 * t + c2);
                assert!((u - before[i][j]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn incentive_predicates() {
        let s = scenario(false, false, &[3, 3]);
        let a = UpSet::from_boundary(&[3, 3], &[3, 1, 0]).unwrap();
        let n = normalize_mechanism(&s, &GridFunction::indicator(&a)).unwrap();
        assert!(check_bic(&n) && check_dic(&n));
        let p = grid(&[3, 3], &[0.0, 0.5, 0.5, 0.5, 0.0, 1.0, 0.5, 1.0, 1.0]);
        let n = normalize_mechanism(&s, &p).unwrap();
        assert!(check_bic(&n) && !check_dic(&n));
        let checker = GridFunction::from_fn(&[3, 3], |i| ((i[0] + i[1] + 1) % 2) as f64).unwrap();
        let n = normalize_mechanism(&s, &checker).unwrap();
        assert!(!check_bic(&n) && !check_dic(&n));
    }

    #[test]
    fn anti_equivalence() {
        let s = scenario(false, true, &[4, 4]);
        let a = UpSet::from_boundary(&[4, 4], &[4, 2, 1, 1]).unwrap();
        // Mechanism A in raw coordinates: denormalize the up-set indicator.
        let na = NormalizedMechanism { p: GridFunction::indicator(&a), masses: s.masses.clone(), flipped: s.flipped() };
        let pa = denormalize_mechanism(&na).unwrap();
        assert!(equivalent_alternative(&na).unwrap().is_none());
        let r = anti_equivalence_report(&s, &pa, &pa).unwrap();
        assert!(r.payoff_equivalent && r.expost_equivalent && r.dic[0] && r.deterministic[0]);

        let s = scenario(false, false, &[2, 2]);
        let half = GridFunction::constant(&[2, 2], 0.5).unwrap();
        let anti = grid(&[2, 2], &[1.0, 0.0, 0.0, 1.0]);
        let r = anti_equivalence_report(&s, &half, &anti).unwrap();
        assert!(r.payoff_equivalent && !r.expost_equivalent);
        assert!(r.dic[0] && !r.deterministic[0] && r.deterministic[1] && !r.dic[1]);
        let alt = equivalent_alternative(&normalize_mechanism(&s, &half).unwrap()).unwrap().unwrap();
        assert!(alt.max_abs_diff(&half) > 1e-6);
    }

    #[test]
    fn deterministic_dic_has_no_alternative() {
        let masses = vec![vec![0.2, 0.5, 0.3], vec![0.1, 0.3, 0.6]];
        let s = ScgScenario::new(vec![[1.0, 0.0], [-1.0, 0.0]], vec![[0.0, 0.0]; 2], masses).unwrap();
        for a in crate::oracle::enumerate_upsets(&[3, 3]).unwrap() {
            let na = NormalizedMechanism { p: GridFunction::indicator(&a), masses: vec![], flipped: s.flipped() };
            let pa = denormalize_mechanism(&na).unwrap();
            let n = normalize_mechanism(&s, &pa).unwrap();
            assert!(equivalent_alternative(&n).unwrap().is_none());
            assert!(anti_equivalence_report(&s, &pa, &pa).unwrap().expost_equivalent);
        }
    }

    #[test]
    fn exposed_mechanisms() {
        let s = scenario(false, false, &[5, 5]);
        let a = UpSet::from_boundary(&[5, 5], &[4, 4, 2, 1, 0]).unwrap();
        let n = normalize_mechanism(&s, &GridFunction::indicator(&a)).unwrap();
        let (ok, cert) = exposed_mechanism_check(&n).unwrap();
        assert!(ok && cert.margin > 0.0);
        assert!(cert.phi[0].windows(2).all(|w| w[1] > w[0]));
        let full = GridFunction::constant(&[3, 3, 3], 1.0).unwrap();
        let s3 = ScgScenario::uniform(vec![[1.0, 0.0]; 3], vec![[0.0, 0.0]; 3], &[3, 3, 3]).unwrap();
        assert!(exposed_mechanism_check(&normalize_mechanism(&s3, &full).unwrap()).unwrap().0);
        let shape = Shape::new(&[3, 3, 3]).unwrap();
        let gens = [[0, 2, 1], [1, 0, 2], [2, 1, 0]];
        let f = GridFunction::from_fn(&[3, 3, 3], |i| {
            gens.iter().any(|g| (0..3).all(|a| i[a] >= g[a])) as u8 as f64
        })
        .unwrap();
        assert_eq!(shape.len(), f.len());
        assert!(!exposed_mechanism_check(&normalize_mechanism(&s3, &f).unwrap()).unwrap().0);
        let half = GridFunction::constant(&[5, 5], 0.5).unwrap();
        assert!(matches!(
            exposed_mechanism_check(&normalize_mechanism(&s, &half).unwrap()),
            Err(Error::NotDeterministic)
        ));
    }
}
