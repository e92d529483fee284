//! Rectangle structure of a two-level monotone function and its additive certificate.

use extremal::gridfn::GridFunction;
use extremal::rationalize::{detect_rectangle_structure, is_additive_set, unique_rationalization_check};

fn main() -> extremal::error::Result<()> {
    let f = GridFunction::new(&[4, 4], vec![0., 0., 0., 1., 0., 0.5, 0.5, 1., 0., 0.5, 0.5, 1., 1., 1., 1., 1.])?;
    let rep = detect_rectangle_structure(&f)?;
    println!("valid {}, lambda {}, rectangle {:?}", rep.valid, rep.lambda, rep.rectangle);
    println!("unique among monotone: {}", unique_rationalization_check(&f, true)?.unique);
    println!("unique among all:      {}", unique_rationalization_check(&f, false)?.unique);
    let cert = is_additive_set(&rep.a1)?;
    println!("A1 additive with margin {:.3}: phi {:?}", cert.margin, cert.phi);
    Ok(())
}
