//! Classification of ℂ against S_λ = P_λ ∪ C_λ and assembly of discrete
//! spectral sets.
//!
//! A point is on the curve part P_λ when |G(z) − log λ| ≤ ε_level, in the
//! supercritical range part C_λ when G(z) − log λ > ε_level and z sits
//! within ε_range of the sampled range R(V), and in the resolvent set
//! otherwise. Points passing both tests are labelled P: the level-set
//! witness is the sharper one and P ∪ C is what matters. Classification
//! consumes only |λ| — the spectrum of the underlying operator family is
//! invariant under rotating λ — and λ = 0 short-circuits to the range
//! membership test for S₀ = R(V).
//!
//! ε_level defaults follow the evaluator's accuracy contract (1e-8 for the
//! exact routes, 1e-5 for quadrature-backed ones); ε_range follows the
//! potential's Hölder modulus on one range-grid step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::contour::{marching_squares, Box2, ContourError, Polyline};
use crate::geometry::{BucketGrid, GeometryError};
use crate::log_potential::{GdError, GdEvaluator};
use crate::potential::{default_range_samples, PotentialError, TrigPoly1D};

pub use crate::geometry::{directed_hausdorff, hausdorff};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("lambda must be a non-negative modulus, got {0}")]
    NegativeLambda(f64),
    #[error("this operation requires a real-valued potential")]
    NonRealPotential,
    #[error("threshold refinement did not converge to 1e-6")]
    ThresholdNotConverged,
    #[error("rouche disc requires a non-constant trig polynomial")]
    ConstantPotential,
    #[error("level-set refinement failed at {at} (|F| = {f_abs:.3e} > {tol:.3e})")]
    Refinement { at: Complex64, f_abs: f64, tol: f64 },
    #[error(transparent)]
    Gd(#[from] GdError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<ContourError<GdError>> for SpectrumError {
    fn from(e: ContourError<GdError>) -> Self {
        match e {
            ContourError::RefinementFailed { at, f_abs, tol } => {
                SpectrumError::Refinement { at, f_abs, tol }
            }
            ContourError::Field(g) => SpectrumError::Gd(g),
            ContourError::DegenerateGrid => SpectrumError::Refinement {
                at: Complex64::new(0.0, 0.0),
                f_abs: f64::NAN,
                tol: 0.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    /// Level set {G = log λ}.
    P,
    /// Supercritical range part {G > log λ} ∩ R(V).
    C,
    Resolvent,
}

impl Label {
    pub fn in_spectrum(&self) -> bool {
        !matches!(self, Label::Resolvent)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::P => "P",
            Label::C => "C",
            Label::Resolvent => "R",
        }
    }
}

/// Label plus the witness numbers it was decided on.
#[derive(Debug, Clone, Copy)]
pub struct Classification {
    pub label: Label,
    pub g_value: f64,
    pub log_lambda: f64,
    pub dist_to_range: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyParams {
    pub eps_level: f64,
    pub eps_range: f64,
    pub range_samples: usize,
}

/// Immutable classifier: an evaluator for G plus the sampled range cloud.
#[derive(Debug)]
pub struct Classifier {
    evaluator: GdEvaluator,
    range_cloud: BucketGrid,
    params: ClassifyParams,
}

impl Classifier {
    pub fn new(evaluator: GdEvaluator) -> Result<Self, SpectrumError> {
        let n = default_range_samples(evaluator.potential().dim());
        let params = ClassifyParams {
            eps_level: evaluator.level_epsilon(),
            eps_range: evaluator.potential().range_epsilon(n),
            range_samples: n,
        };
        Classifier::with_params(evaluator, params)
    }

    pub fn with_params(
        evaluator: GdEvaluator,
        params: ClassifyParams,
    ) -> Result<Self, SpectrumError> {
        let samples = evaluator.potential().range_sample(params.range_samples)?;
        let range_cloud = BucketGrid::new(&samples)?;
        Ok(Classifier {
            evaluator,
            range_cloud,
            params,
        })
    }

    pub fn evaluator(&self) -> &GdEvaluator {
        &self.evaluator
    }

    pub fn params(&self) -> ClassifyParams {
        self.params
    }

    pub fn dist_to_range(&self, z: Complex64) -> f64 {
        self.range_cloud.nearest_distance(z)
    }

    /// Classify z against S_λ for the coupling modulus λ ≥ 0.
    pub fn classify(&self, z: Complex64, lambda: f64) -> Result<Classification, SpectrumError> {
        if lambda < 0.0 {
            return Err(SpectrumError::NegativeLambda(lambda));
        }
        let dist = self.range_cloud.nearest_distance(z);
        if lambda == 0.0 {
            // S₀ = R(V); no level test exists at log 0.
            let label = if dist <= self.params.eps_range {
                Label::C
            } else {
                Label::Resolvent
            };
            return Ok(Classification {
                label,
                g_value: self.evaluator.eval(z)?,
                log_lambda: f64::NEG_INFINITY,
                dist_to_range: dist,
            });
        }
        let g = self.evaluator.eval(z)?;
        let log_lambda = lambda.ln();
        let label = if (g - log_lambda).abs() <= self.params.eps_level {
            Label::P
        } else if g - log_lambda > self.params.eps_level && dist <= self.params.eps_range {
            Label::C
        } else {
            Label::Resolvent
        };
        Ok(Classification {
            label,
            g_value: g,
            log_lambda,
            dist_to_range: dist,
        })
    }

    /// Classify every node of an nx × ny grid over the box. Nodes where the
    /// evaluator fails are masked, not fatal.
    pub fn rasterize(
        &self,
        lambda: f64,
        bbox: Box2,
        nx: usize,
        ny: usize,
    ) -> Result<ClassGrid, SpectrumError> {
        if lambda < 0.0 {
            return Err(SpectrumError::NegativeLambda(lambda));
        }
        let dx = bbox.width() / (nx - 1) as f64;
        let dy = bbox.height() / (ny - 1) as f64;
        let rows: Vec<Vec<(Label, f64, f64, bool)>> = (0..ny)
            .into_par_iter()
            .map(|j| {
                let y = bbox.y0 + j as f64 * dy;
                (0..nx)
                    .map(|i| {
                        let z = Complex64::new(bbox.x0 + i as f64 * dx, y);
                        match self.classify(z, lambda) {
                            Ok(c) => (c.label, c.g_value, c.dist_to_range, false),
                            Err(_) => (Label::Resolvent, f64::NAN, f64::NAN, true),
                        }
                    })
                    .collect()
            })
            .collect();

        let mut labels = Vec::with_capacity(nx * ny);
        let mut g = Vec::with_capacity(nx * ny);
        let mut dist = Vec::with_capacity(nx * ny);
        let mut failed = Vec::with_capacity(nx * ny);
        for row in rows {
            for (l, gv, dv, f) in row {
                labels.push(l);
                g.push(gv);
                dist.push(dv);
                failed.push(f);
            }
        }
        let any_failed = failed.iter().any(|&f| f);
        Ok(ClassGrid {
            bbox,
            nx,
            ny,
            lambda,
            labels,
            g,
            dist,
            failed,
            any_failed,
        })
    }

    /// Trace the level curves {G = log λ} by marching squares with
    /// bisection-refined crossings.
    pub fn trace_level_set(
        &self,
        lambda: f64,
        bbox: Box2,
        n: usize,
    ) -> Result<Vec<Polyline>, SpectrumError> {
        if lambda <= 0.0 {
            return Err(SpectrumError::NegativeLambda(lambda));
        }
        let grid = self.rasterize(lambda, bbox, n, n)?;
        self.trace_level_set_on(&grid)
    }

    /// Same, reusing an existing rasterization.
    ///
    /// The marched field is F − ε_level/2 rather than F = G − log λ: level
    /// sets can be two-dimensional (G constant on a region), where F sits at
    /// rounding scale and its raw sign is speckle. Shifting by half the
    /// level tolerance turns the trace into the boundary of {F > ε/2}, and
    /// refined vertices satisfy 0 ≤ F ≤ ε_level, i.e. the advertised
    /// |G − log λ| ≤ ε_level.
    pub fn trace_level_set_on(&self, grid: &ClassGrid) -> Result<Vec<Polyline>, SpectrumError> {
        let log_lambda = grid.lambda.ln();
        let half = 0.5 * self.params.eps_level;
        let field = |z: Complex64| -> Result<f64, GdError> {
            Ok(self.evaluator.eval(z)? - log_lambda - half)
        };
        let values: Vec<f64> = grid.g.iter().map(|g| g - log_lambda - half).collect();
        let lines = marching_squares(&values, grid.bbox, grid.nx, grid.ny, &field, half)?;
        Ok(lines)
    }

    /// Discrete S_λ: traced P curves, the C part on the range cloud (d = 1)
    /// or on the grid (d = 2), plus the classification grid itself.
    pub fn spectrum_set(
        &self,
        lambda: f64,
        bbox: Box2,
        n: usize,
    ) -> Result<SpectrumSet, SpectrumError> {
        let grid = self.rasterize(lambda, bbox, n, n)?;
        let p_curves = if lambda > 0.0 {
            self.trace_level_set_on(&grid)?
        } else {
            Vec::new()
        };
        let c_points = if self.evaluator.potential().dim() == 1 {
            let samples = self
                .evaluator
                .potential()
                .range_sample(self.params.range_samples.min(2048))?;
            let log_lambda = lambda.ln();
            let mut pts = Vec::new();
            for z in samples {
                let g = self.evaluator.eval(z)?;
                if lambda == 0.0 || g - log_lambda > self.params.eps_level {
                    pts.push(z);
                }
            }
            pts
        } else {
            grid.points_with_label(Label::C)
        };
        Ok(SpectrumSet {
            lambda,
            p_curves,
            c_points,
            grid_step: bbox.width().max(bbox.height()) / (n - 1) as f64,
            grid,
        })
    }
}

/// Classified grid over a box.
#[derive(Debug, Clone)]
pub struct ClassGrid {
    pub bbox: Box2,
    pub nx: usize,
    pub ny: usize,
    pub lambda: f64,
    pub labels: Vec<Label>,
    pub g: Vec<f64>,
    pub dist: Vec<f64>,
    pub failed: Vec<bool>,
    pub any_failed: bool,
}

impl ClassGrid {
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.bbox.x0 + i as f64 * self.bbox.width() / (self.nx - 1) as f64,
            self.bbox.y0 + j as f64 * self.bbox.height() / (self.ny - 1) as f64,
        )
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.labels[j * self.nx + i]
    }

    pub fn points_with_label(&self, want: Label) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.label(i, j) == want {
                    pts.push(self.node(i, j));
                }
            }
        }
        pts
    }

    pub fn in_spectrum_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.label(i, j).in_spectrum() {
                    pts.push(self.node(i, j));
                }
            }
        }
        pts
    }

    /// 4-connected flood fill from the node nearest `seed` over resolvent
    /// labels; reports whether the region is bounded (a spectral hole).
    pub fn resolvent_hole_at(&self, seed: Complex64) -> bool {
        let dx = self.bbox.width() / (self.nx - 1) as f64;
        let dy = self.bbox.height() / (self.ny - 1) as f64;
        let i0 = (((seed.re - self.bbox.x0) / dx).round() as isize).clamp(0, self.nx as isize - 1);
        let j0 = (((seed.im - self.bbox.y0) / dy).round() as isize).clamp(0, self.ny as isize - 1);
        if self.label(i0 as usize, j0 as usize) != Label::Resolvent {
            return false;
        }
        let mut seen = vec![false; self.nx * self.ny];
        let mut stack = vec![(i0 as usize, j0 as usize)];
        seen[j0 as usize * self.nx + i0 as usize] = true;
        let mut touches_border = false;
        while let Some((i, j)) = stack.pop() {
            if i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1 {
                touches_border = true;
            }
            let mut visit = |ii: usize, jj: usize, stack: &mut Vec<(usize, usize)>| {
                let idx = jj * self.nx + ii;
                if !seen[idx] && self.labels[idx] == Label::Resolvent {
                    seen[idx] = true;
                    stack.push((ii, jj));
                }
            };
            if i > 0 {
                visit(i - 1, j, &mut stack);
            }
            if i + 1 < self.nx {
                visit(i + 1, j, &mut stack);
            }
            if j > 0 {
                visit(i, j - 1, &mut stack);
            }
            if j + 1 < self.ny {
                visit(i, j + 1, &mut stack);
            }
        }
        !touches_border
    }
}

/// Discrete representation of S_λ.
#[derive(Debug, Clone)]
pub struct SpectrumSet {
    pub lambda: f64,
    pub p_curves: Vec<Polyline>,
    pub c_points: Vec<Complex64>,
    pub grid: ClassGrid,
    pub grid_step: f64,
}

impl SpectrumSet {
    /// All discrete points representing the set: curve vertices, C points,
    /// and in-spectrum grid nodes.
    pub fn point_cloud(&self) -> Vec<Complex64> {
        let mut pts: Vec<Complex64> = self.p_curves.iter().flatten().copied().collect();
        pts.extend(&self.c_points);
        pts.extend(self.grid.in_spectrum_points());
        pts
    }
}

/// PT-transition thresholds λ₀ = e^{min G on R(V)}, λ₁ = e^{max G on R(V)}
/// for a real-valued potential, refined by doubling the sampling of
/// [min V, max V] until both extrema settle to 1e-6.
pub fn pt_thresholds(evaluator: &GdEvaluator) -> Result<(f64, f64), SpectrumError> {
    let potential = evaluator.potential();
    if !potential.is_real() {
        return Err(SpectrumError::NonRealPotential);
    }
    let samples = potential.range_sample(default_range_samples(potential.dim()))?;
    let lo = samples.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);

    let extrema = |k: usize| -> Result<(f64, f64), SpectrumError> {
        let mut gmin = f64::INFINITY;
        let mut gmax = f64::NEG_INFINITY;
        for i in 0..k {
            let x = lo + (hi - lo) * i as f64 / (k - 1) as f64;
            let g = evaluator.eval(Complex64::new(x, 0.0))?;
            gmin = gmin.min(g);
            gmax = gmax.max(g);
        }
        Ok((gmin, gmax))
    };

    let mut k = 129;
    let (mut gmin, mut gmax) = extrema(k)?;
    for _ in 0..10 {
        k = 2 * k - 1;
        let (nmin, nmax) = extrema(k)?;
        let settled = (nmin - gmin).abs() <= 1e-6 && (nmax - gmax).abs() <= 1e-6;
        gmin = nmin;
        gmax = nmax;
        if settled {
            return Ok((gmin.exp(), gmax.exp()));
        }
    }
    Err(SpectrumError::ThresholdNotConverged)
}

/// Certified disc of two-dimensional spectrum for a trig polynomial at
/// coupling |λ| = |v_m|: when Σ_{k≠0, k<m} |v_k| < |v_m| the disc of radius
/// |v_m| − Σ about v₀ lies in the spectrum (Rouché keeps all roots of the
/// Jensen polynomial inside the unit circle there).
#[derive(Debug, Clone, Copy)]
pub struct RoucheDisc {
    pub admissible: bool,
    pub radius: f64,
    pub center: Complex64,
    /// The coupling modulus the certificate applies to: |v_m|.
    pub coupling: f64,
}

pub fn rouche_disc(tp: &TrigPoly1D) -> Result<RoucheDisc, SpectrumError> {
    if tp.is_constant() {
        return Err(SpectrumError::ConstantPotential);
    }
    let (l, m) = tp.window();
    let top = tp.coeff(m).norm();
    let mut side_sum = 0.0;
    for k in l..m {
        if k != 0 {
            side_sum += tp.coeff(k).norm();
        }
    }
    let admissible = side_sum < top;
    Ok(RoucheDisc {
        admissible,
        radius: if admissible { top - side_sum } else { 0.0 },
        center: tp.coeff(0),
        coupling: top,
    })
}
