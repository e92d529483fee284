//! Vertices of the monotone [0,1] functions on small grids, and a vertex certificate
//! for a mixture of two up-sets.

use extremal::gridfn::{GridFunction, UpSet};
use extremal::oracle::{brute_force_vertices, enumerate_upsets};
use extremal::solver::{is_vertex, LpProblem};

fn main() -> extremal::error::Result<()> {
    for dims in [[2, 2], [2, 3], [3, 3]] {
        let p = LpProblem::new(&dims)?.with_monotonicity();
        let verts = brute_force_vertices(&p)?;
        println!("{dims:?}: {} vertices, {} up-sets", verts.len(), enumerate_upsets(&dims)?.len());
    }
    let p = LpProblem::new(&[3, 3])?.with_monotonicity();
    let a = GridFunction::indicator(&UpSet::from_boundary(&[3, 3], &[3, 2, 1])?);
    let b = GridFunction::indicator(&UpSet::from_boundary(&[3, 3], &[2, 2, 0])?);
    let cert = is_vertex(&a.mix(&b, 0.5)?.into_values(), &p)?;
    println!("half-half mixture is a vertex: {}, free directions: {}", cert.is_vertex, cert.degrees_of_freedom);
    Ok(())
}
