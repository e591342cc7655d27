pub mod cli;
pub mod error;
pub mod flow;
pub mod gadgets;
pub mod harness;
pub mod lp;
pub mod model;
pub mod polytope;
pub mod rational;
pub mod robust;

pub use error::{Error, Result};
pub use rational::Rational;
