//! Exact model checking for strategy logic with discounted temporal goals.
//!
//! Satisfaction values are exact rationals. Memoryless strategies are
//! evaluated directly; the discounted-LTL fragment also has an alternating
//! parity automaton construction whose membership test is checked against
//! direct evaluation.

pub mod apt;
pub mod cgs;
pub mod concepts;
pub mod discount;
pub mod error;
pub mod eval;
pub mod formula;
pub mod lasso;
pub mod parity;
pub mod rational;
pub mod strategy;
pub mod textio;

pub use cgs::{Cgs, CgsSpec};
pub use discount::DiscountFn;
pub use error::{Error, Result};
pub use formula::Formula;
pub use rational::Rational;
pub use strategy::{Assignment, LassoPlay, Strategy};
