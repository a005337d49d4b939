//! Spectra of non-self-adjoint quasi-periodic operators.
//!
//! The operators treated here act on ℓ²(ℤᵈ) and come in a dual pair: a
//! long-range model with hopping coefficients v_k and a complex-exponential
//! diagonal, and its first-order dual
//!
//! ```text
//! (Ĥ u)(n) = λ u(n−1) + V(θ + nα) u(n)
//! ```
//!
//! with V: 𝕋ᵈ → ℂ a Hölder-continuous sampling function and α rationally
//! independent. Both share the spectrum
//!
//! ```text
//! S_λ = P_λ ∪ C_λ,   P_λ = {G(z) = log|λ|},   C_λ = {G(z) > log|λ|} ∩ R(V),
//! ```
//!
//! where G(z) = ∫_{𝕋ᵈ} log|z − V(θ)| dθ is the logarithmic potential of the
//! push-forward of Lebesgue measure under V, and R(V) is the range of V.
//!
//! The crate computes G by three interoperable routes (adaptive quadrature,
//! exact Jensen root products for trigonometric polynomials, iterated 1-D
//! integration for separable potentials), classifies points of ℂ against
//! S_λ, extracts the level curves P_λ, and cross-validates everything
//! against periodic Floquet approximants, Weyl-sequence residuals,
//! finite-truncation eigenvalues, and closed-form solved models.
//!
//! Modules map onto the pipeline:
//!
//! - [`potential`]: concrete sampling functions V and their ranges
//! - [`frequency`]: continued fractions, β(α), Liouville-type frequencies
//! - [`poly`]: simultaneous (Aberth–Ehrlich) polynomial root finding
//! - [`quadrature`]: adaptive Gauss–Legendre panels with log-singularity
//!   handling
//! - [`log_potential`]: the evaluator for G itself
//! - [`spectrum`]: pointwise classification, rasterization, level-curve
//!   tracing, PT thresholds
//! - [`operators`]: finite matrices, dense eigensolver, Floquet spectra,
//!   Weyl residuals, duality checks
//! - [`oracles`]: closed-form spectra of the solved models
//! - [`contour`], [`geometry`]: marching squares and point-set utilities

pub mod contour;
pub mod eig;
pub mod frequency;
pub mod geometry;
pub mod log_potential;
pub mod operators;
pub mod oracles;
pub mod poly;
pub mod potential;
pub mod quadrature;
pub mod spectrum;

pub use num_complex::Complex64;
