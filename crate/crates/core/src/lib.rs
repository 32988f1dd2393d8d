//! Exact symbolic computation with local functions, the correlation-function
//! co-operad, and vertex algebras given by generators and OPE relations.
//!
//! Everything is computed over the rationals. The [`fock`] module holds
//! free-field realizations that share no code with [`va`] and serve as an
//! independent check of its normal forms.

pub mod cli;
pub mod cooperad;
pub mod fock;
pub mod linalg;
pub mod localfn;
pub mod rational;
pub mod va;

pub use rational::Q;
