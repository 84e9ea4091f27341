//! Approximation of periodic functions in weighted Orlicz spaces.
//!
//! Functions are band-limited trigonometric polynomials held as Fourier
//! coefficients. Norms are computed numerically on a uniform grid; every
//! other operator (conjugation, ψ-integrals and derivatives, Steklov means)
//! is exact in coefficient space.

pub mod bestapprox;
pub mod config;
pub mod error;
pub mod fourier;
pub mod orlicz;
pub mod psi;
pub mod smoothness;
pub mod theorems;
pub mod weights;
pub mod young;

pub use error::{Error, Hypothesis, Result};
pub use fourier::{FunctionFamily, PeriodicFunction, UniformGrid};
pub use orlicz::{NormKind, OrliczSpace};
pub use psi::{PsiPair, PsiSequence};
pub use weights::Weight;
pub use young::YoungFunction;
