//! Schema formalisms (frames, Entity-Relationship, object-oriented) compiled into a common
//! description logic with number restrictions and inverse roles, plus a bounded finite-model
//! finder and a cardinality analyzer for reasoning over the result.

pub mod er;
pub mod error;
pub mod frames;
pub mod kb;
pub mod oo;
pub mod reason;
mod lex;

pub use error::SyntaxError;
pub use kb::{ConceptExpr, InclusionAssertion, Interpretation, KnowledgeBase, RoleExpr};
