//! Vertex algebras presented by generators and OPE relations.
//!
//! Elements are combinations of mode words `b_1(n_1)..b_k(n_k)1` applied to
//! the vacuum. Words are straightened with the commutator formula; modes of
//! composite states use the associativity formula. All generators must have
//! weight at least 1, so every nonzero state has weight at least 0 and sums
//! over modes truncate by weight.

mod element;
mod engine;
mod lattice;
mod npoint;
mod ops;
mod presentation;
mod radical;

use thiserror::Error;

pub use element::{parse_element, VAElement, VAWord};
pub use engine::{Engine, DEFAULT_STEP_BOUND};
pub use lattice::{lattice_check, realize, LatticeReport, RelationCheck};
pub use npoint::npoint_vacuum;
pub use ops::{
    bracket, check_uniform_bound, derivative, graded_dims, normal_form, ope_singular,
    spanning_basis,
};
pub use presentation::{
    load_presentation, GeneratorDoc, Generator, LatticeData, Presentation, PresentationDoc,
    RelationDoc, ResultTermDoc,
};
pub use radical::{radical_slice, RadicalSlice};

pub type Gen = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VaError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("relation [{a},{b}]_{n} has a term of weight {got}, expected {expected}")]
    WeightMismatch {
        a: String,
        b: String,
        n: i64,
        expected: i64,
        got: i64,
    },
    #[error("relation [{a},{b}]_{n} lies beyond the weight bound and must vanish")]
    UnboundedOPE { a: String, b: String, n: i64 },
    #[error("rewriting exceeded {steps} steps")]
    NonTerminating { steps: u64 },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("no local function matches the correlator: {0}")]
    NoLocalMatch(String),
    #[error("result needs weight {needed}, above the truncation {cutoff}")]
    TruncationTooSmall { needed: i64, cutoff: i64 },
    #[error("presentation has no lattice data")]
    NotLattice,
}
