//! Rationalizability of two marginals and a monotone rationalizer.

use extremal::gridfn::{marginals, StepFunction1D};
use extremal::rationalize::{is_rationalizable, monotone_rationalizer, unique_rationalization_check};

fn main() -> extremal::error::Result<()> {
    let q = vec![
        StepFunction1D::uniform(vec![0.1, 0.3, 0.5, 0.7])?,
        StepFunction1D::uniform(vec![0.2, 0.3, 0.5, 0.6])?,
    ];
    println!("rationalizable: {}", is_rationalizable(&q)?);
    let f = monotone_rationalizer(&q)?;
    for row in f.values().chunks(4) {
        println!("{}", row.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" "));
    }
    let back = marginals(&f);
    println!("first marginal back: {:?}", back[0].values());
    let uniq = unique_rationalization_check(&f, true)?;
    println!("unique among monotone: {} ({} free directions)", uniq.unique, uniq.degrees_of_freedom);

    let too_much = vec![StepFunction1D::uniform(vec![0.5, 0.5])?, StepFunction1D::uniform(vec![0.0, 0.1])?];
    println!("means 0.5 vs 0.05 rationalizable: {}", is_rationalizable(&too_much)?);
    Ok(())
}
