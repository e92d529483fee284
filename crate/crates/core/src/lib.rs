//! Extreme points of multidimensional monotone functions and of their one-dimensional
//! marginals, on discretized grids, with the mechanism and information design
//! problems that reduce to them.

pub mod error;
pub mod gridfn;
pub mod io;
pub mod oracle;
pub mod ppi;
pub mod pubgood;
pub mod rationalize;
pub mod rfauction;
pub mod scenario;
pub mod socialchoice;
pub mod solver;
pub mod suite;
pub mod trade;

pub use error::{Error, Result};
