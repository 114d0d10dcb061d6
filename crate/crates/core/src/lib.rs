//! Gap eigenvalues of self-adjoint operators built as form perturbations.
//!
//! The crate works at the Galerkin-matrix level. A [`forms::FormPair`] holds
//! the Gram matrix together with an unperturbed form `Q`, a perturbation `V`
//! and an orthogonal splitting of the space into `D+ ⊕ D-`. The
//! [`minimax`] module characterises the eigenvalues of `Q + V` above
//! `a = sup s` on `D-` as roots of a scalar equation in the shift `u`,
//! obtained by maximising over `D-` in closed form (a Schur complement). The
//! result is cross-checked against a dense eigensolve of the full pencil.
//!
//! [`dirac`] supplies a concrete application: radial Dirac-Coulomb channels on
//! a B-spline basis, with the free-spectral (`P±`) and upper/lower component
//! (`T±`) splittings and the closed-form hydrogen-like spectrum as oracle.
//!
//! [`workflow`] wires these into reproducible file-based runs; the
//! `gapminimax` binary is a thin front end over it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod minimax;
pub mod mtx;
pub mod random;
pub mod root;
pub mod workflow;

pub use error::{Error, Result};
pub use forms::{AlphaMetric, ConditionCheck, ConditionReport, FormPair, SplitSpace};
pub use minimax::{MinimaxResult, SForm, SchurReduction, SolveOptions, SolveStatus};

use nalgebra::ComplexField;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Field of matrix entries: real or complex double precision.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync {
    /// Sample with independent standard normal real (and imaginary) parts.
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Build from real and imaginary parts. The imaginary part is dropped for
    /// real scalars.
    fn from_parts(re: f64, im: f64) -> Self;

    /// True when the type carries an imaginary part.
    const IS_COMPLEX: bool;
}

impl Scalar for f64 {
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }

    const IS_COMPLEX: bool = false;
}

impl Scalar for Complex64 {
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    const IS_COMPLEX: bool = true;
}
