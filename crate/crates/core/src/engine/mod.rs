//! Polynomial-time engines, one per family of aggregate functions.

pub mod avgqnt;
pub mod boolean;
pub mod dup;
pub mod maxmin;
