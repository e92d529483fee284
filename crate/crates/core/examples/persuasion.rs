//! Private persuasion of two receivers: a linear objective solved over bi-upset signals,
//! its pooling implementation, and a single-receiver threshold case.

use extremal::ppi::{pooling_implementation, solve_ppi_linear, solve_ppi_threshold, DEFAULT_PROBES};

fn main() -> extremal::error::Result<()> {
    let m = 10;
    let w1: Vec<f64> = (0..m).map(|k| (1.3 * k as f64).sin()).collect();
    let w2: Vec<f64> = (0..m).map(|k| (0.9 * k as f64).cos() - 0.2).collect();
    let sol = solve_ppi_linear(&[w1, w2], 0.4, &[m, m])?;
    println!("linear: value {:.6}, mean {:.6}, lambda {:.4}", sol.value, sol.signal.mean(), sol.signal.lambda);
    if let Ok(pool) = pooling_implementation(&sol.signal) {
        println!("pooling boundary {:?}", pool.boundary);
    }
    let one = solve_ppi_threshold(&[0.6], &[1.0], 0.3, &[40], DEFAULT_PROBES, 0)?;
    println!("one receiver, prior 0.3, threshold 0.6: persuaded mass {:.4} (p/t = 0.5)", one.value);
    Ok(())
}
