//! Numerical toolkit for hyperbolic-harmonic mappings on the unit ball of C^n.
//!
//! * [`geometry`]: ball and sphere points, Möbius automorphisms, hyperbolic distance.
//! * [`kernel`]: hyperbolic Poisson kernel and the real-ball kernel with derivatives.
//! * [`quadrature`]: circle and Monte Carlo sphere rules with deterministic reduction.
//! * [`extension`]: Dirichlet solver and Laplace-Beltrami residual.
//! * [`calculus`]: Wirtinger derivatives, real Jacobians, `Λ_f` / `λ_f`.
//! * [`norms`]: Bloch, α-Bloch, weighted Lipschitz and Lipschitz-number estimates.
//! * [`theorems`]: inequality checks, Landau constants, univalence probes.
//! * [`cli`]: the `hballs` command line.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod kernel;
pub mod norms;
pub mod quadrature;
pub mod theorems;

pub use error::{Error, Result};
pub use num_complex::Complex64;
