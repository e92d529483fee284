//! Two-agent public good with a positive externality on a lognormal type grid.

use extremal::pubgood::{solve_public_good, verify_expost_ic, JointDensity, PublicGoodScenario, ValueModel};

fn main() -> extremal::error::Result<()> {
    let m = 30;
    let density = JointDensity::TruncatedLognormal { mu: vec![2f64.ln(); 2], sigma: vec![0.4; 2], rho: 0.5 };
    let s = PublicGoodScenario::build(&[m, m], &[(0.0, 4.0); 2], &density, &ValueModel::LinearExternality { w: 0.1 }, 3.0)?;
    let res = solve_public_good(&s)?;
    println!("expected surplus {:.6}, budget slack {:.2e}", res.expected_surplus, res.budget_slack);
    println!("allocation levels {:?}", res.allocation.distinct_values(1e-7));
    let (ic, gain) = verify_expost_ic(&res.allocation, &res.transfers, &s, 2.0 / m as f64);
    println!("ex-post IC {ic} (largest misreport gain {gain:.2e})");
    for i in (0..m).rev().step_by(3) {
        let row: String = (0..m)
            .map(|j| match res.allocation.get(&[j, i]) {
                v if v >= 1.0 - 1e-7 => '#',
                v if v <= 1e-7 => '.',
                _ => '+',
            })
            .collect();
        println!("{row}");
    }
    Ok(())
}
