//! Reduced-form feasibility and the allocation rule behind a second-price auction
//! with a reserve.

use extremal::rfauction::{check_reduced_form, construct_implementation, extreme_reduced_form_check, ReducedForm};

fn main() -> extremal::error::Result<()> {
    let m = 8;
    let r = 3;
    let q1 = (0..m).map(|i| if i >= r { (i + 1) as f64 / m as f64 } else { 0.0 }).collect();
    let q2 = (0..m).map(|j| if j >= r { j as f64 / m as f64 } else { 0.0 }).collect();
    let rf = ReducedForm::uniform(q1, q2)?;
    println!("feasible {}, extreme {:?}", check_reduced_form(&rf).feasible, extreme_reduced_form_check(&rf));
    let imp = construct_implementation(&rf)?;
    println!("bidder 1 wins (rows: own value, columns: rival value):");
    for row in imp.p1.values().chunks(m) {
        println!("{}", row.iter().map(|&v| if v > 0.5 { '1' } else { '.' }).collect::<String>());
    }
    let over = ReducedForm::uniform(vec![0.9; 4], vec![0.9; 4])?;
    println!("both bidders winning 90% of the time: feasible {}", check_reduced_form(&over).feasible);
    Ok(())
}
