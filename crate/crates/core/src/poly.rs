//! Dense complex polynomials and simultaneous root finding.
//!
//! Roots are found by the Aberth–Ehrlich iteration: all approximations are
//! corrected at once with the implicit-deflation term Σ 1/(z_i − z_j), which
//! avoids the error accumulation of explicit deflation and converges
//! cubically for simple roots. Initial guesses sit on a circle of radius
//! (|c₀/c_deg|)^(1/deg) scaled by 1.1, with the angles offset by 0.4 rad so
//! symmetric configurations do not stall.

use num_complex::Complex64;
use thiserror::Error;

/// Convergence threshold on the Aberth correction, relative to 1 + |root|.
pub const ABERTH_TOL: f64 = 1e-13;
/// Iteration cap before the solve is reported as non-converged.
pub const ABERTH_MAX_ITER: u32 = 200;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("polynomial has degree zero after trimming")]
    DegreeZero,
    #[error("all coefficients are zero")]
    ZeroPolynomial,
    #[error(
        "root iteration did not converge after {iterations} sweeps (max correction {max_correction:.3e})"
    )]
    NonConvergence {
        iterations: u32,
        max_correction: f64,
        residuals: Vec<f64>,
    },
}

/// Roots of a polynomial together with per-root backward-error bounds.
///
/// `coeffs` are ascending (c₀ + c₁ z + …). `residuals[i]` is |p(root_i)|;
/// `backward_errors[i]` bounds the relative coefficient perturbation that
/// would make root_i exact, i.e. |p(z)| ≤ backward_errors[i] · Σ|c_k||z|^k.
/// After convergence the backward errors sit at machine-noise scale.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub coeffs: Vec<Complex64>,
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub backward_errors: Vec<f64>,
    pub iterations: u32,
}

impl RootSet {
    /// 1-norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Σ |c_k| |z|^k: the coefficient-perturbation scale at the i-th root.
    pub fn scale_at(&self, i: usize) -> f64 {
        let z = self.roots[i].norm();
        let mut zp = 1.0;
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += c.norm() * zp;
            zp *= z;
        }
        acc
    }
}

/// Evaluate p(z) by Horner's rule (ascending coefficients).
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Evaluate p(z) and p'(z) in one Horner pass.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Multiply a polynomial by the linear factor (z − a), in place semantics.
pub fn mul_linear(coeffs: &[Complex64], a: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= c * a;
    }
    out
}

/// All complex roots of the polynomial with the given ascending coefficients.
///
/// Exact roots at the origin are stripped before iterating, so a vanishing
/// constant term costs nothing. Non-convergence is an error carrying the
/// achieved residuals, never a silently wrong answer.
pub fn roots(coeffs: &[Complex64]) -> Result<RootSet, PolyError> {
    let original: Vec<Complex64> = coeffs.to_vec();

    // Trim zero leading coefficients (highest powers).
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1] == Complex64::new(0.0, 0.0) {
        hi -= 1;
    }
    if hi == 0 {
        return Err(PolyError::ZeroPolynomial);
    }
    if hi == 1 {
        return Err(PolyError::DegreeZero);
    }
    let mut work: Vec<Complex64> = coeffs[..hi].to_vec();

    // Strip exact roots at the origin.
    let mut zero_roots = 0usize;
    while work.len() > 1 && work[0] == Complex64::new(0.0, 0.0) {
        work.remove(0);
        zero_roots += 1;
    }

    let degree = work.len() - 1;
    let mut approx: Vec<Complex64> = Vec::with_capacity(degree);
    let mut iterations = 0u32;

    if degree > 0 {
        let lead = work[degree];
        let radius = (work[0].norm() / lead.norm()).powf(1.0 / degree as f64) * 1.1;
        let radius = if radius.is_finite() && radius > 0.0 {
            radius
        } else {
            1.0
        };
        for i in 0..degree {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / degree as f64 + 0.4;
            approx.push(Complex64::from_polar(radius, angle));
        }

        let mut converged = false;
        while iterations < ABERTH_MAX_ITER {
            iterations += 1;
            let mut max_corr = 0.0f64;
            for i in 0..degree {
                let zi = approx[i];
                let (p, dp) = eval_with_derivative(&work, zi);
                if p == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let newton = if dp == Complex64::new(0.0, 0.0) {
                    // Flat spot: nudge off it instead of dividing by zero.
                    Complex64::new(ABERTH_TOL, ABERTH_TOL)
                } else {
                    p / dp
                };
                let mut repulsion = Complex64::new(0.0, 0.0);
                for j in 0..degree {
                    if j != i {
                        let diff = zi - approx[j];
                        if diff != Complex64::new(0.0, 0.0) {
                            repulsion += diff.inv();
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
                let corr = if denom == Complex64::new(0.0, 0.0) {
                    newton
                } else {
                    newton / denom
                };
                approx[i] = zi - corr;
                let rel = corr.norm() / (1.0 + approx[i].norm());
                if rel > max_corr {
                    max_corr = rel;
                }
            }
            if max_corr <= ABERTH_TOL {
                converged = true;
                break;
            }
        }

        if !converged {
            // One more sweep to measure where we stalled.
            let mut max_corr = 0.0f64;
            let mut residuals = Vec::with_capacity(degree);
            for &zi in &approx {
                let (p, dp) = eval_with_derivative(&work, zi);
                residuals.push(p.norm());
                if dp != Complex64::new(0.0, 0.0) {
                    let rel = (p / dp).norm() / (1.0 + zi.norm());
                    if rel > max_corr {
                        max_corr = rel;
                    }
                }
            }
            return Err(PolyError::NonConvergence {
                iterations,
                max_correction: max_corr,
                residuals,
            });
        }
    }

    let mut all_roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); zero_roots];
    all_roots.extend(approx);

    // A-posteriori bounds: the raw residual, and the relative backward
    // error |p(z)| / Σ|c_k||z|^k padded by a Horner rounding envelope.
    let eps = f64::EPSILON;
    let mut residuals = Vec::with_capacity(all_roots.len());
    let mut backward_errors = Vec::with_capacity(all_roots.len());
    for &z in &all_roots {
        let residual = eval(&original, z).norm();
        let mut scale = 0.0f64;
        let mut zp = 1.0f64;
        for c in &original {
            scale += c.norm() * zp;
            zp *= z.norm();
        }
        residuals.push(residual);
        backward_errors.push(residual / scale.max(f64::MIN_POSITIVE) + 2.0 * original.len() as f64 * eps);
    }

    Ok(RootSet {
        coeffs: original,
        roots: all_roots,
        residuals,
        backward_errors,
        iterations,
    })
}
