//! Two agents, two alternatives: a deterministic DIC mechanism has no payoff-equivalent
//! alternative, while a stochastic one does.

use extremal::gridfn::GridFunction;
use extremal::socialchoice::{anti_equivalence_report, equivalent_alternative, normalize_mechanism, ScgScenario};

fn main() -> extremal::error::Result<()> {
    let masses = vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.25; 4]];
    let s = ScgScenario::new(vec![[1.0, 0.0]; 2], vec![[0.0, 1.0]; 2], masses)?;
    let det = GridFunction::new(&[4, 4], vec![0., 0., 0., 1., 0., 0., 1., 1., 0., 1., 1., 1., 1., 1., 1., 1.])?;
    let sto = GridFunction::new(&[4, 4], vec![0., 0., 0., 1., 0., 0.5, 0.5, 1., 0., 0.5, 0.5, 1., 1., 1., 1., 1.])?;
    let rep = anti_equivalence_report(&s, &det, &sto)?;
    println!("DIC {:?}, deterministic {:?}, payoff-equivalent {}", rep.dic, rep.deterministic, rep.payoff_equivalent);
    for (name, p) in [("deterministic", &det), ("stochastic", &sto)] {
        let alt = equivalent_alternative(&normalize_mechanism(&s, p)?)?;
        println!("{name}: payoff-equivalent alternative exists: {}", alt.is_some());
    }
    Ok(())
}
