//! Exact-arithmetic engine for classical operational probabilistic theories
//! and their minimal generator-restricted fragment.

pub mod lang;
pub mod mct;
pub mod analysis;
pub mod harness;
pub mod matrix;
pub mod permutation;
pub mod random;
pub mod rational;
pub mod system;
pub mod theory;
