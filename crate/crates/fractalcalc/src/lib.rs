//! Numerics for calculus of fractional order α on Cantor-like subsets of the
//! real line: staircase functions, set masses and the γ-dimension, the
//! α-derivative and α-integral taken through the staircase, and linear
//! constant-coefficient equations in the α-derivative solved symbolically in
//! the staircase coordinate.
//!
//! Start with [`CantorSpec`] and [`Staircase`], lift ordinary functions with
//! [`FractalFn`], and see the `examples/` directory for one walkthrough per
//! capability.

// negated comparisons like !(lo <= hi) double as NaN guards throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod demos;
pub mod error;
pub mod fode_solver;
pub mod fractal_calculus;
pub mod fractal_set;
pub mod special;
pub mod symbolic;

pub use demos::{run_demo, DemoName, DemoReport};
pub use error::{Error, Result};
pub use fode_solver::{
    basis_functions, characteristic_polynomial, find_roots, ic_mismatch, residual, solve,
    solve_homogeneous_ivp, undetermined_coefficients, variation_of_parameters, BasisFn,
    CharPolynomial, FODEProblem, FODESolution, ForcingAtom, ForcingTerm, Particular, RootSet,
    VopParticular, DEFAULT_CLUSTER_TOL,
};
pub use fractal_calculus::{
    conjugate_lift, f_alpha_derivative, f_alpha_integral, f_alpha_integral_bounds,
    DerivativeConfig, FnForm, FractalFn, ScalarFn, DEFAULT_CELLS,
};
pub use fractal_set::{
    CantorSpec, MassEstimate, Partition, Piece, Staircase, DEFAULT_DEPTH,
};
pub use symbolic::{Term, TermSum, Trig};
