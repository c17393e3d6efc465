//! Exact majorization for step functions on σ-finite measure spaces.
//!
//! Functions are finite families of level sets with rational values and
//! masses ([`StepFunction`]); on spaces of infinite measure they are
//! nonnegative and vanish off a set of finite measure. On this class the
//! relation `f ≺ g` is decided exactly by three independent criteria
//! (rearrangement partial integrals, hinge integrals, tail integrals of the
//! distribution function), and the stochastic operators that realize it are
//! constructed explicitly as rational matrices.

pub mod diagnostics;
pub mod error;
pub mod format;
pub mod generate;
pub mod majorization;
pub mod operators;
pub mod rational;
pub mod selftest;
pub mod step;

pub use error::{Error, Result};
pub use majorization::{
    convex_sample_test, cross_check, cross_check_with, hinge_criterion, majorize, rearrangement_criterion,
    tail_distribution_criterion, weak_majorize, Certificate, Criterion, MajorizationVerdict, Relation,
    TestFunctionFamily,
};
pub use rational::{ExtendedReal, Rational};
pub use step::{Piece, StepFunction};
