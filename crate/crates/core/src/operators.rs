//! Finite realizations of the dual pair of operators and their spectral
//! probes.
//!
//! The primal model acts by Σ_k v_k u(n−k) + λ e^{2πi(ω+⟨n,α⟩)} u(n); its
//! dual is the first-order operator λu(n−1) + V(θ+nα)u(n) on ℓ²(ℤ). Both
//! get Dirichlet finite sections here, plus the two principled spectral
//! objects for rational frequencies:
//!
//! - **Floquet spectra.** For α = p/q the dual operator is q-periodic and
//!   its spectrum is the union over the Bloch phase φ of the roots of
//!
//!   ```text
//!   Π_{j<Q} (z − V(θ + j p/q)) = (−1)^{Q+1} λ^Q e^{iφ},
//!   ```
//!
//!   solved here by expanding the product (largest factors first, with
//!   per-step max-modulus renormalization tracked in log scale so Q up to
//!   512 neither overflows nor underflows) and handing the polynomial to
//!   the simultaneous root finder.
//! - **Weyl residuals.** Along the orbit the cut-off solution ψ of
//!   Ĥψ = zψ with ψ₀ = 1 satisfies (Ĥ−z)ψ^N = −λψ_{−N−1}δ_{−N} + λψ_N δ_{N+1},
//!   so r_N = λ√(|ψ_{−N−1}|² + |ψ_N|²)/‖ψ^N‖ certifies approximate
//!   eigenvalues. Magnitudes are accumulated in log space; N can reach 10⁵
//!   without overflow even deep in a resolvent region.
//!
//! Truncation eigenvalues of the dual are the diagonal orbit values exactly
//! (the section is lower bidiagonal), which is the operative form of the
//! non-approximability phenomenon: finite sections never leave R(V), while
//! the true spectrum may be a two-dimensional set.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::eig::{eig_dense, CMatrix, EigError};
use crate::geometry::{directed_hausdorff, hausdorff, GeometryError};
use crate::frequency::ContinuedFraction;
use crate::poly::{self, PolyError};
use crate::potential::{Potential, PotentialError, TrigPoly1D, TAU};

/// Dirichlet-section size cap (d = 1 length, or flattened 2-D rectangle).
pub const MAX_SECTION: usize = 4096;
/// Full-period cap for Floquet determinants.
pub const MAX_FLOQUET_PERIOD: i64 = 512;
/// Block-size cap for the periodic duality check.
pub const MAX_DUALITY_PERIOD: i64 = 128;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("section of {got} rows exceeds the cap {cap}")]
    SectionTooLarge { got: usize, cap: usize },
    #[error("full Floquet period {0} exceeds the cap")]
    PeriodTooLarge(i64),
    #[error("phase/Bloch grids must be at least 1")]
    EmptyGrid,
    #[error("coupling must be positive here, got {0}")]
    NonPositiveCoupling(f64),
    #[error("orbit point {index} hits z within 1e-13; the point is skipped")]
    OrbitHit { index: i64 },
    #[error("window length {len} exceeds the vector support {support}")]
    WindowTooLong { len: usize, support: usize },
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("this operation requires a 1-D trig-polynomial potential")]
    RequiresTrig,
    #[error(
        "no phase solves the level equation: log Π − q log λ stays in [{min:.3}, {max:.3}] (target level {target:.3}) without a sign change"
    )]
    PhaseSearchFailed { min: f64, max: f64, target: f64 },
    #[error("primal 2-D sections require a separable potential with trig parts")]
    RequiresSeparableTrig,
    #[error("rational frequency components must have 1 <= q and gcd(p, q) = 1")]
    BadRational,
    #[error(transparent)]
    Eig(#[from] EigError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Primal,
    Dual,
}

/// A banded operator instance pinned to concrete parameters.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub model: Model,
    pub potential: Potential,
    pub lambda: Complex64,
    /// Frequency vector, one component per torus coordinate.
    pub alpha: Vec<f64>,
    /// ω (primal, length 1) or θ (dual, length d).
    pub phase: Vec<f64>,
}

/// Index window for a finite section.
#[derive(Debug, Clone, Copy)]
pub enum IndexRange {
    Line { start: i64, len: usize },
    Rect { start: (i64, i64), shape: (usize, usize) },
}

impl IndexRange {
    pub fn len(&self) -> usize {
        match self {
            IndexRange::Line { len, .. } => *len,
            IndexRange::Rect { shape, .. } => shape.0 * shape.1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn orbit_value(potential: &Potential, theta: &[f64], alpha: &[f64], n: i64) -> Complex64 {
    let coords: Vec<f64> = theta
        .iter()
        .zip(alpha)
        .map(|(t, a)| (t + n as f64 * a).rem_euclid(1.0))
        .collect();
    potential.eval(&coords).expect("dimension checked at build")
}

/// Dense Dirichlet section of the operator on the given index window.
pub fn build_matrix(spec: &OperatorSpec, range: IndexRange) -> Result<CMatrix, OperatorError> {
    let n = range.len();
    if n > MAX_SECTION {
        return Err(OperatorError::SectionTooLarge {
            got: n,
            cap: MAX_SECTION,
        });
    }
    let mut m = CMatrix::zeros(n);
    match (spec.model, range) {
        (Model::Dual, IndexRange::Line { start, len }) => {
            for i in 0..len {
                let site = start + i as i64;
                m.set(i, i, orbit_value(&spec.potential, &spec.phase, &spec.alpha, site));
                if i > 0 {
                    m.set(i, i - 1, spec.lambda);
                }
            }
        }
        (Model::Primal, IndexRange::Line { start, len }) => {
            let tp = spec.potential.as_trig().ok_or(OperatorError::RequiresTrig)?;
            let (l_win, m_win) = tp.window();
            for i in 0..len {
                let site = start + i as i64;
                let diag = spec.lambda
                    * Complex64::from_polar(1.0, TAU * (spec.phase[0] + site as f64 * spec.alpha[0]));
                m.add_to(i, i, diag);
                for k in l_win..=m_win {
                    let j = i as i64 - k;
                    if k != 0 && j >= 0 && (j as usize) < len {
                        m.add_to(i, j as usize, tp.coeff(k));
                    } else if k == 0 {
                        m.add_to(i, i, tp.coeff(0));
                    }
                }
            }
        }
        (Model::Primal, IndexRange::Rect { start, shape }) => {
            let parts = spec
                .potential
                .as_separable()
                .ok_or(OperatorError::RequiresSeparableTrig)?;
            if parts.len() != 2 {
                return Err(OperatorError::RequiresSeparableTrig);
            }
            let tps: Vec<&TrigPoly1D> = parts
                .iter()
                .map(|p| p.as_trig().ok_or(OperatorError::RequiresSeparableTrig))
                .collect::<Result<_, _>>()?;
            let (rows, cols) = shape;
            let idx = |r: usize, c: usize| r * cols + c;
            for r in 0..rows {
                for c in 0..cols {
                    let site = (start.0 + r as i64, start.1 + c as i64);
                    let phase = spec.phase[0]
                        + site.0 as f64 * spec.alpha[0]
                        + site.1 as f64 * spec.alpha[1];
                    m.add_to(
                        idx(r, c),
                        idx(r, c),
                        spec.lambda * Complex64::from_polar(1.0, TAU * phase),
                    );
                    for (axis, tp) in tps.iter().enumerate() {
                        let (l_win, m_win) = tp.window();
                        for k in l_win..=m_win {
                            if k == 0 {
                                m.add_to(idx(r, c), idx(r, c), tp.coeff(0));
                                continue;
                            }
                            let (tr, tc) = if axis == 0 {
                                (r as i64 - k, c as i64)
                            } else {
                                (r as i64, c as i64 - k)
                            };
                            if tr >= 0 && tc >= 0 && (tr as usize) < rows && (tc as usize) < cols {
                                m.add_to(idx(r, c), idx(tr as usize, tc as usize), tp.coeff(k));
                            }
                        }
                    }
                }
            }
        }
        (Model::Dual, IndexRange::Rect { .. }) => {
            // The dual model lives on ℓ²(ℤ) regardless of d.
            return Err(OperatorError::RequiresTrig);
        }
    }
    Ok(m)
}

/// Root cloud of the dual Floquet determinant over (θ, φ) grids.
#[derive(Debug, Clone)]
pub struct FloquetSpectrum {
    /// Full period Q (product over coordinates).
    pub period: i64,
    pub rational: Vec<(i64, i64)>,
    pub theta_grid: usize,
    pub phi_grid: usize,
    pub roots: Vec<Complex64>,
    /// Relative determinant residual per root.
    pub residuals: Vec<f64>,
    pub failed_cells: usize,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Expand Π (w − o_j) with factors taken in descending magnitude and the
/// coefficients renormalized by their max modulus each step; returns the
/// scaled coefficients and log of the total scale.
fn expand_orbit_polynomial(orbit: &[Complex64]) -> (Vec<Complex64>, f64) {
    let mut factors: Vec<Complex64> = orbit.to_vec();
    factors.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut log_scale = 0.0f64;
    for a in factors {
        coeffs = poly::mul_linear(&coeffs, a);
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max > 0.0 {
            for c in coeffs.iter_mut() {
                *c /= max;
            }
            log_scale += max.ln();
        }
    }
    (coeffs, log_scale)
}

/// Dual Floquet spectrum for rational frequency components (p_i, q_i).
///
/// θ is sampled over the fundamental period [0, 1/q_i) per coordinate
/// (`theta_grid` points each); the Bloch phase over [0, 2π) with `phi_grid`
/// points. λ = 0 collapses to the triangular case whose roots are the
/// orbit values themselves.
pub fn floquet_spectrum(
    potential: &Potential,
    lambda: f64,
    rational: &[(i64, i64)],
    theta_grid: usize,
    phi_grid: usize,
) -> Result<FloquetSpectrum, OperatorError> {
    if theta_grid == 0 || phi_grid == 0 {
        return Err(OperatorError::EmptyGrid);
    }
    if rational.len() != potential.dim() {
        return Err(OperatorError::Potential(PotentialError::DimensionMismatch {
            want: potential.dim(),
            got: rational.len(),
        }));
    }
    for &(p, q) in rational {
        if q < 1 || gcd(p, q) != 1 {
            return Err(OperatorError::BadRational);
        }
    }
    let period: i64 = rational.iter().map(|&(_, q)| q).product();
    if period > MAX_FLOQUET_PERIOD {
        return Err(OperatorError::PeriodTooLarge(period));
    }
    if lambda < 0.0 {
        return Err(OperatorError::NonPositiveCoupling(lambda));
    }

    let alpha: Vec<f64> = rational
        .iter()
        .map(|&(p, q)| p as f64 / q as f64)
        .collect();
    let dim = alpha.len();

    // θ sample list (fundamental domain per coordinate).
    let mut thetas: Vec<Vec<f64>> = Vec::new();
    match dim {
        1 => {
            let q = rational[0].1 as f64;
            for i in 0..theta_grid {
                thetas.push(vec![i as f64 / (theta_grid as f64 * q)]);
            }
        }
        _ => {
            let (q1, q2) = (rational[0].1 as f64, rational[1].1 as f64);
            for i in 0..theta_grid {
                for j in 0..theta_grid {
                    thetas.push(vec![
                        i as f64 / (theta_grid as f64 * q1),
                        j as f64 / (theta_grid as f64 * q2),
                    ]);
                }
            }
        }
    }

    struct CellOut {
        roots: Vec<Complex64>,
        residuals: Vec<f64>,
        failed: usize,
    }

    let q = period;
    let cells: Vec<CellOut> = thetas
        .par_iter()
        .map(|theta| {
            let orbit: Vec<Complex64> = (0..q)
                .map(|j| orbit_value(potential, theta, &alpha, j))
                .collect();
            if lambda == 0.0 {
                return CellOut {
                    roots: orbit.clone(),
                    residuals: vec![0.0; orbit.len()],
                    failed: 0,
                };
            }
            let (scaled, log_scale) = expand_orbit_polynomial(&orbit);
            let rhs_log = q as f64 * lambda.ln() - log_scale;
            let sign = if q % 2 == 0 { -1.0 } else { 1.0 };
            let mut out = CellOut {
                roots: Vec::new(),
                residuals: Vec::new(),
                failed: 0,
            };
            for k in 0..phi_grid {
                let phi = TAU * k as f64 / phi_grid as f64;
                let rhs = Complex64::from_polar(rhs_log.exp(), phi) * sign;
                let mut coeffs = scaled.clone();
                coeffs[0] -= rhs;
                match poly::roots(&coeffs) {
                    Ok(rs) => {
                        for root in rs.roots {
                            let det = poly::eval(&scaled, root) - rhs;
                            let log_prod: f64 = orbit
                                .iter()
                                .map(|o| (root - o).norm().max(f64::MIN_POSITIVE).ln())
                                .sum();
                            let scale = (log_prod - log_scale).max(rhs_log).exp();
                            out.roots.push(root);
                            out.residuals.push(det.norm() / scale.max(f64::MIN_POSITIVE));
                        }
                    }
                    Err(_) => out.failed += 1,
                }
            }
            out
        })
        .collect();

    let mut roots = Vec::new();
    let mut residuals = Vec::new();
    let mut failed_cells = 0;
    for cell in cells {
        roots.extend(cell.roots);
        residuals.extend(cell.residuals);
        failed_cells += cell.failed;
    }
    Ok(FloquetSpectrum {
        period,
        rational: rational.to_vec(),
        theta_grid,
        phi_grid,
        roots,
        residuals,
        failed_cells,
    })
}

/// Primal Floquet block J(ω, φ): the q × q Bloch fiber of the q-periodic
/// primal operator, wrap-around hops picking up e^{∓iφ} per cell crossed.
pub fn primal_floquet_block(
    tp: &TrigPoly1D,
    lambda: f64,
    p: i64,
    q: i64,
    omega: f64,
    phi: f64,
) -> Result<CMatrix, OperatorError> {
    if q < 1 || gcd(p, q) != 1 {
        return Err(OperatorError::BadRational);
    }
    let n = q as usize;
    let mut m = CMatrix::zeros(n);
    let (l_win, m_win) = tp.window();
    for row in 0..n {
        let diag = Complex64::from_polar(
            lambda,
            TAU * (omega + row as f64 * p as f64 / q as f64),
        );
        m.add_to(row, row, diag);
        for k in l_win..=m_win {
            if tp.coeff(k) == Complex64::new(0.0, 0.0) {
                continue;
            }
            let target = row as i64 - k;
            let col = target.rem_euclid(q);
            let wraps = (target - col) / q; // how many cells the hop crosses
            let phase = Complex64::from_polar(1.0, -phi * wraps as f64);
            m.add_to(row, col as usize, tp.coeff(k) * phase);
        }
    }
    Ok(m)
}

/// Union of primal Floquet eigenvalues over (ω, φ) grids; ω runs over the
/// fundamental period [0, 1/q).
pub fn primal_floquet_cloud(
    tp: &TrigPoly1D,
    lambda: f64,
    p: i64,
    q: i64,
    omega_grid: usize,
    phi_grid: usize,
) -> Result<Vec<Complex64>, OperatorError> {
    if omega_grid == 0 || phi_grid == 0 {
        return Err(OperatorError::EmptyGrid);
    }
    let cells: Vec<(usize, usize)> = (0..omega_grid)
        .flat_map(|i| (0..phi_grid).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<Vec<Complex64>, OperatorError>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let omega = i as f64 / (omega_grid as f64 * q as f64);
            let phi = TAU * j as f64 / phi_grid as f64;
            let block = primal_floquet_block(tp, lambda, p, q, omega, phi)?;
            Ok(eig_dense(&block)?.eigenvalues)
        })
        .collect();
    let mut cloud = Vec::new();
    for r in results {
        cloud.extend(r?);
    }
    Ok(cloud)
}

/// One level of the rational-approximant convergence experiment.
#[derive(Debug, Clone, Copy)]
pub struct ApproximantLevel {
    pub p: i64,
    pub q: i64,
    /// Directed Hausdorff distance from the Floquet cloud to the reference
    /// set: how far any approximant point strays from the target spectrum.
    pub distance: f64,
}

/// Floquet clouds along the continued-fraction convergents, each compared
/// against a reference spectral set.
pub fn approximant_convergence(
    potential: &Potential,
    lambda: f64,
    cf: &ContinuedFraction,
    levels: usize,
    reference: &[Complex64],
) -> Result<Vec<ApproximantLevel>, OperatorError> {
    let mut out = Vec::new();
    for &(p, q) in cf.convergents.iter().skip(1) {
        if out.len() >= levels || q > MAX_FLOQUET_PERIOD {
            break;
        }
        let grid = (4 * q as usize).max(8);
        let cloud = floquet_spectrum(potential, lambda, &[(p, q)], grid, grid)?;
        let distance = directed_hausdorff(&cloud.roots, reference)?;
        out.push(ApproximantLevel { p, q, distance });
    }
    Ok(out)
}

/// Weyl-sequence residual report at a point z.
#[derive(Debug, Clone)]
pub struct WeylReport {
    pub z: Complex64,
    pub lambda: f64,
    pub theta: Vec<f64>,
    pub window_sizes: Vec<i64>,
    pub residuals: Vec<f64>,
    pub min_residual: f64,
    /// max over the outer half of the computed range of |log|ψ_n|| / |n|.
    pub tail_exponent: f64,
}

/// Residuals r_N = λ√(|ψ_{−N−1}|² + |ψ_N|²)/‖ψ^N‖ for N in a dyadic ladder,
/// all magnitudes carried in log scale.
pub fn weyl_certify(
    potential: &Potential,
    lambda: f64,
    z: Complex64,
    theta: &[f64],
    alpha: &[f64],
    n_max: i64,
) -> Result<WeylReport, OperatorError> {
    if lambda <= 0.0 {
        return Err(OperatorError::NonPositiveCoupling(lambda));
    }
    let log_lambda = lambda.ln();
    let factor = |n: i64| -> Result<f64, OperatorError> {
        let d = (z - orbit_value(potential, theta, alpha, n)).norm();
        if d < 1e-13 {
            return Err(OperatorError::OrbitHit { index: n });
        }
        Ok(d.ln())
    };

    // Streaming log-sum-exp of Σ e^{2 l_k}.
    struct Norm {
        max: f64,
        sum: f64,
    }
    impl Norm {
        fn push(&mut self, l: f64) {
            let t = 2.0 * l;
            if t > self.max {
                self.sum = self.sum * (self.max - t).exp() + 1.0;
                self.max = t;
            } else {
                self.sum += (t - self.max).exp();
            }
        }
        fn log_norm(&self) -> f64 {
            0.5 * (self.max + self.sum.ln())
        }
    }

    let mut norm = Norm { max: 0.0, sum: 1.0 }; // ψ₀ = 1
    let mut fwd = 0.0f64; // log|ψ_n|
    let mut bwd = 0.0f64; // log|ψ_{−n}|
    let mut window_sizes = Vec::new();
    let mut residuals = Vec::new();
    let mut tail = 0.0f64;
    let mut ladder = 1i64;

    for n in 1..=n_max {
        fwd += log_lambda - factor(n)?;
        bwd += factor(-(n - 1))? - log_lambda;
        norm.push(fwd);
        norm.push(bwd);
        if n >= n_max / 2 {
            tail = tail.max(fwd.abs() / n as f64).max(bwd.abs() / n as f64);
        }
        if n == ladder {
            // Peek ψ_{−N−1} without committing the recursion step.
            let bwd_next = bwd + factor(-n)? - log_lambda;
            let big = (2.0 * bwd_next).max(2.0 * fwd);
            let log_num = log_lambda
                + 0.5 * (big + ((2.0 * bwd_next - big).exp() + (2.0 * fwd - big).exp()).ln());
            let r = (log_num - norm.log_norm()).exp();
            window_sizes.push(n);
            residuals.push(r);
            ladder *= 2;
        }
    }
    let min_residual = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(WeylReport {
        z,
        lambda,
        theta: theta.to_vec(),
        window_sizes,
        residuals,
        min_residual,
        tail_exponent: tail,
    })
}

/// The cut-off eigenvector candidate ψ_{−n}..ψ_n in plain complex
/// arithmetic. Only safe for moderate n; the log-space path above is the
/// one that scales.
pub fn weyl_vector(
    potential: &Potential,
    lambda: f64,
    z: Complex64,
    theta: &[f64],
    alpha: &[f64],
    n: i64,
) -> Result<Vec<Complex64>, OperatorError> {
    if lambda <= 0.0 {
        return Err(OperatorError::NonPositiveCoupling(lambda));
    }
    let value = |j: i64| orbit_value(potential, theta, alpha, j);
    let len = (2 * n + 1) as usize;
    let mut psi = vec![Complex64::new(0.0, 0.0); len];
    let at = |k: i64| (k + n) as usize;
    psi[at(0)] = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        let d = z - value(j);
        if d.norm() < 1e-13 {
            return Err(OperatorError::OrbitHit { index: j });
        }
        psi[at(j)] = psi[at(j - 1)] * lambda / d;
    }
    for j in 1..=n {
        let d = z - value(-(j - 1));
        if d.norm() < 1e-13 {
            return Err(OperatorError::OrbitHit { index: -(j - 1) });
        }
        psi[at(-j)] = psi[at(-j + 1)] * d / lambda;
    }
    Ok(psi)
}

/// Best length-N window of a finitely supported vector under T.
#[derive(Debug, Clone, Copy)]
pub struct WindowReport {
    /// Offset (in lattice coordinates) where the best window starts.
    pub best_offset: i64,
    pub best_ratio: f64,
    /// ε = ‖Tψ‖/‖ψ‖ of the full input vector.
    pub full_ratio: f64,
    /// C/√N + ε with C² = 4 m³ M².
    pub lemma_bound: f64,
}

/// Scan all length-N windows of ψ and return the one minimizing ‖Tφ‖/‖φ‖.
///
/// `apply_row(i, u)` must produce (Tu)(i) for a finitely supported u; `m`
/// is the band half-width of T and `band_bound` a bound on its entries.
pub fn window_extract<F>(
    apply_row: F,
    m: usize,
    band_bound: f64,
    psi_offset: i64,
    psi: &[Complex64],
    window_len: usize,
) -> Result<WindowReport, OperatorError>
where
    F: Fn(i64, &dyn Fn(i64) -> Complex64) -> Complex64,
{
    if window_len == 0 || window_len > psi.len() {
        return Err(OperatorError::WindowTooLong {
            len: window_len,
            support: psi.len(),
        });
    }
    let norm_of = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm_of(psi) == 0.0 {
        return Err(OperatorError::ZeroVector);
    }

    let ratio_of = |offset: i64, window: &[Complex64]| -> f64 {
        let u = |j: i64| -> Complex64 {
            let k = j - offset;
            if k < 0 || k as usize >= window.len() {
                Complex64::new(0.0, 0.0)
            } else {
                window[k as usize]
            }
        };
        let lo = offset - m as i64;
        let hi = offset + window.len() as i64 + m as i64;
        let mut out = 0.0f64;
        for i in lo..hi {
            out += apply_row(i, &u).norm_sqr();
        }
        let wn = norm_of(window);
        if wn == 0.0 {
            f64::INFINITY
        } else {
            out.sqrt() / wn
        }
    };

    let full_ratio = ratio_of(psi_offset, psi);

    let mut best_ratio = f64::INFINITY;
    let mut best_offset = psi_offset;
    for k in 0..=psi.len() - window_len {
        let window = &psi[k..k + window_len];
        if norm_of(window) == 0.0 {
            continue;
        }
        let offset = psi_offset + k as i64;
        let r = ratio_of(offset, window);
        if r < best_ratio {
            best_ratio = r;
            best_offset = offset;
        }
    }
    if !best_ratio.is_finite() {
        return Err(OperatorError::ZeroVector);
    }
    let c = 2.0 * (m as f64).powf(1.5) * band_bound;
    Ok(WindowReport {
        best_offset,
        best_ratio,
        full_ratio,
        lemma_bound: c / (window_len as f64).sqrt() + full_ratio,
    })
}

/// Finds a phase θ (by bisection over the fundamental period) at which the
/// orbit product matches the coupling level,
///
/// ```text
/// Π_{j<q} |z − V(θ + j p/q)| = λ^q,
/// ```
///
/// which makes z an eigenvalue of the Bloch fiber at some φ. A solution is
/// guaranteed when z lies on R(V) with G(z) > log λ (the product dips to 0
/// near an orbit hit and climbs to e^{qG} elsewhere); outside that set the
/// search legitimately fails and says so.
///
/// The returned phase solves the level equation to the floating floor of
/// the log-product: near the dip one ulp of θ moves log Π by ~1e-7 for
/// q ≈ 20, so expect |log Π − q log λ| at that scale, not at 1e-15.
pub fn level_phase_search(
    potential: &Potential,
    lambda: f64,
    z: Complex64,
    p: i64,
    q: i64,
) -> Result<f64, OperatorError> {
    if lambda <= 0.0 {
        return Err(OperatorError::NonPositiveCoupling(lambda));
    }
    if q < 1 || gcd(p, q) != 1 {
        return Err(OperatorError::BadRational);
    }
    let alpha = [p as f64 / q as f64];
    let log_product = |theta: f64| -> f64 {
        (0..q)
            .map(|j| {
                (z - orbit_value(potential, &[theta], &alpha, j))
                    .norm()
                    .max(f64::MIN_POSITIVE)
                    .ln()
            })
            .sum()
    };
    let target = q as f64 * lambda.ln();
    let period = 1.0 / q as f64;

    // The sub-level basin has width ~λ^q around the orbit hit, far below
    // any blind sampling resolution, so localize the hit first: minimize
    // the orbit distance, then bisect outward from the dip.
    let orbit_dist = |theta: f64| -> f64 {
        (0..q)
            .map(|j| (z - orbit_value(potential, &[theta], &alpha, j)).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let samples = 256 * q as usize;
    let mut best = (f64::INFINITY, 0.0f64);
    let mut max_seen = f64::NEG_INFINITY;
    let mut min_seen = f64::INFINITY;
    for i in 0..samples {
        let theta = period * i as f64 / samples as f64;
        let d = orbit_dist(theta);
        if d < best.0 {
            best = (d, theta);
        }
        let g = log_product(theta) - target;
        min_seen = min_seen.min(g);
        max_seen = max_seen.max(g);
    }
    // Golden-section refinement of the dip.
    let step = period / samples as f64;
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut m1, mut m2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut d1, mut d2) = (orbit_dist(m1), orbit_dist(m2));
    for _ in 0..200 {
        if d1 <= d2 {
            hi = m2;
            m2 = m1;
            d2 = d1;
            m1 = hi - phi * (hi - lo);
            d1 = orbit_dist(m1);
        } else {
            lo = m1;
            m1 = m2;
            d1 = d2;
            m2 = lo + phi * (hi - lo);
            d2 = orbit_dist(m2);
        }
    }
    let theta_star = 0.5 * (lo + hi);
    let g_star = log_product(theta_star) - target;
    min_seen = min_seen.min(g_star);
    if g_star > 0.0 {
        return Err(OperatorError::PhaseSearchFailed {
            min: min_seen,
            max: max_seen,
            target,
        });
    }
    // Bisect between the dip and a sample where the product exceeds λ^q.
    let mut outer = theta_star + step;
    for k in 1..=samples {
        outer = theta_star + step * k as f64;
        if log_product(outer) - target > 0.0 {
            break;
        }
    }
    let (mut lo, mut hi) = (theta_star, outer);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = log_product(mid) - target;
        if g.abs() <= 1e-10 {
            return Ok(mid.rem_euclid(period));
        }
        if g <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).rem_euclid(period))
}

/// Primal vs dual Floquet clouds at a common rational frequency.
#[derive(Debug, Clone)]
pub struct DualityReport {
    pub primal: Vec<Complex64>,
    pub dual: Vec<Complex64>,
    pub hausdorff: f64,
}

/// Both sides of the duality at α = p/q: the primal cloud from dense
/// eigensolves of the q × q Bloch fibers, the dual cloud from the
/// determinant identity. Their union over matching phase grids samples the
/// same spectral set.
pub fn duality_check_periodic(
    tp: &TrigPoly1D,
    lambda: f64,
    p: i64,
    q: i64,
    phase_grid: usize,
    phi_grid: usize,
) -> Result<DualityReport, OperatorError> {
    if q > MAX_DUALITY_PERIOD {
        return Err(OperatorError::PeriodTooLarge(q));
    }
    let primal = primal_floquet_cloud(tp, lambda, p, q, phase_grid, phi_grid)?;
    let dual = floquet_spectrum(
        &Potential::trig(tp.clone()),
        lambda,
        &[(p, q)],
        phase_grid,
        phi_grid,
    )?;
    let h = hausdorff(&primal, &dual.roots)?;
    Ok(DualityReport {
        primal,
        dual: dual.roots,
        hausdorff: h,
    })
}
