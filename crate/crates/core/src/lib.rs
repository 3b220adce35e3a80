//! Exact Shapley and Banzhaf values of database facts for aggregate
//! conjunctive queries.
//!
//! A query `A = α ∘ τ ∘ Q` combines a conjunctive query `Q`, a value
//! function `τ` over answers and an aggregate `α`. Facts are endogenous
//! players or exogenous background. [`shapley::dispatch`] picks a
//! polynomial-time engine from the hierarchy class of `Q` and falls back to
//! enumerating coalitions when allowed.

pub mod aggregates;
pub mod combinatorics;
pub mod corpus;
pub mod cq;
pub mod engine;
pub mod error;
pub mod exec;
pub mod gadgets;
pub mod manifest;
pub mod model;
pub mod shapley;

pub use aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
pub use cq::{parse_cq, ConjunctiveQuery, HierarchyClass};
pub use error::{Error, Result};
pub use model::{Constant, Database, Fact, Provenance, Rational};
