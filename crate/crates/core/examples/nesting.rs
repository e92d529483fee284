//! Level-set decomposition of a monotone grid function.

use extremal::gridfn::{nesting_decompose, GridFunction};

fn main() -> extremal::error::Result<()> {
    let f = GridFunction::from_fn(&[4, 4], |x| ((x[0] + x[1]) as f64 / 6.0).min(1.0))?;
    let rep = nesting_decompose(&f)?;
    for (level, set) in rep.levels.iter().zip(&rep.sets) {
        println!("level {level:.3}: {} cells", set.count());
    }
    println!("weights {:?}, empty-set weight {:.3}", rep.weights, rep.residual);
    assert!(rep.reconstruct(f.dims())?.max_abs_diff(&f) < 1e-12);
    Ok(())
}
