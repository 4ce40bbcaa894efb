//! Inductive data type systems: simply-typed terms over strictly positive
//! inductive types, higher-order rewrite rules, and a checker for the
//! General Schema guaranteeing strong normalization of rules plus βη.

pub mod batch;
pub mod enumerate;
pub mod interp;
pub mod rewrite;
pub mod schema;
pub mod signature;
pub mod syntax;
pub mod transforms;
pub mod term;
pub mod types;

pub use signature::{Signature, SignatureBuilder, SignatureOptions, Status};
pub use term::{alpha_equal, substitute, Position, Substitution, Symbol, SymbolKind, Term, TermKind, Var};
pub use types::{Name, Type, TypePosition};
