//! Auction with pre-auction investment: the best asymmetric extreme reduced form
//! against the best symmetric reserve.

use extremal::gridfn::QuantileTransform;
use extremal::rfauction::{best_symmetric_reserve, solve_investment_auction, InvestmentSpec};

fn main() -> extremal::error::Result<()> {
    let g = QuantileTransform::Uniform { lo: 0.0, hi: 1.0 }.cell_masses(30);
    let spec = InvestmentSpec::new(0.4, &g, (0.0, 1.0))?;
    let res = solve_investment_auction(&spec, &g, 0)?;
    let (reserve, sym) = best_symmetric_reserve(&spec, &g);
    println!("asymmetric {:.6} (extreme {}, thresholds {:?})", res.objective, res.extreme, res.thresholds);
    println!("symmetric  {sym:.6} at reserve cell {reserve}");
    Ok(())
}
