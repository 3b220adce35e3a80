//! Reductions that recover counting problems from Shapley values.

pub mod embed;
pub mod linalg;
pub mod monotone;
pub mod permanent;
pub mod setcover;
