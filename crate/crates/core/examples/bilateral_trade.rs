//! Second-best bilateral trade: uniform types, then a seeded random instance with one
//! pooled rectangle.

use extremal::rationalize::detect_rectangle_structure;
use extremal::trade::{extract_markup_pooling, flip_cost, solve_interim_efficient, TradeScenario};

fn main() -> extremal::error::Result<()> {
    let m = 40;
    let u = vec![1.0 / m as f64; m];
    let s = TradeScenario::total_surplus((0.0, 1.0), (0.0, 1.0), u.clone(), u)?;
    let sol = solve_interim_efficient(&s)?;
    let gap = (0..m).find(|&k| sol.p.get(&[k, 0]) > 0.5).map(|k| k as f64 / m as f64);
    println!("uniform: welfare {:.5}, lowest value trading with the lowest cost ~ {gap:?}", sol.welfare);

    let s = TradeScenario::random(7, 50, 50)?;
    let sol = solve_interim_efficient(&s)?;
    let rect = detect_rectangle_structure(&flip_cost(&sol.p))?;
    println!("random seed 7: welfare {:.5}, rectangle {:?}, fractional level {:.4}", sol.welfare, rect.rectangle, rect.lambda);
    if let Ok(mp) = extract_markup_pooling(&sol.p) {
        println!("markup pooling: {mp:?}");
    }
    Ok(())
}
