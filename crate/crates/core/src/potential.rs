//! Sampling functions V: 𝕋ᵈ → ℂ and their ranges.
//!
//! Four concrete representations share one handle: trigonometric polynomials
//! with a tight frequency window [l, m], coordinate-wise separable sums,
//! continuous piecewise-linear profiles on 𝕋, and uniformly sampled grids
//! with multilinear interpolation. The handle carries the metadata the
//! spectral pipeline needs everywhere: dimension, sup-norm, a Hölder
//! (exponent, norm) pair bounding |V(θ) − V(θ′)|, and whether V is
//! real-valued.
//!
//! Real-valued potentials evaluate through a purely real path (cosine/sine
//! pairing of conjugate modes), so their range samples have imaginary part
//! exactly zero, not merely small.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TAU: f64 = std::f64::consts::TAU;

/// Default range-sampling density per torus coordinate.
pub fn default_range_samples(dim: usize) -> usize {
    if dim <= 1 {
        4096
    } else {
        512
    }
}

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("theta has {got} coordinates but the potential lives on T^{want}")]
    DimensionMismatch { want: usize, got: usize },
    #[error("invalid potential data: {0}")]
    InvalidData(String),
    #[error("range sampling needs n >= 2, got {0}")]
    TooFewSamples(usize),
}

/// Trigonometric polynomial Σ_{k=l}^{m} v_k e^{2πikθ} with v_l, v_m ≠ 0.
#[derive(Debug, Clone)]
pub struct TrigPoly1D {
    l: i64,
    coeffs: Vec<Complex64>,
    is_real: bool,
}

impl TrigPoly1D {
    /// Build from the coefficient window; zero padding at the ends is
    /// trimmed so the stored window is tight.
    pub fn new(l: i64, coeffs: Vec<Complex64>) -> Result<Self, PotentialError> {
        if coeffs.is_empty() {
            return Err(PotentialError::InvalidData("empty coefficient window".into()));
        }
        let mut l = l;
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        while coeffs.len() > 1 && coeffs[0] == Complex64::new(0.0, 0.0) {
            coeffs.remove(0);
            l += 1;
        }
        if coeffs.len() == 1 && coeffs[0] == Complex64::new(0.0, 0.0) {
            l = 0; // the zero potential, kept as the constant 0
        }
        let tp = TrigPoly1D {
            l,
            is_real: Self::detect_real(l, &coeffs),
            coeffs,
        };
        Ok(tp)
    }

    fn detect_real(l: i64, coeffs: &[Complex64]) -> bool {
        let m = l + coeffs.len() as i64 - 1;
        let get = |k: i64| -> Complex64 {
            if k < l || k > m {
                Complex64::new(0.0, 0.0)
            } else {
                coeffs[(k - l) as usize]
            }
        };
        let span = l.abs().max(m.abs());
        (0..=span).all(|k| get(-k) == get(k).conj())
    }

    /// V(θ) = e^{2πiθ}, the single-mode model.
    pub fn single_mode() -> Self {
        TrigPoly1D::new(1, vec![Complex64::new(1.0, 0.0)]).unwrap()
    }

    /// V(θ) = 2cos(2πθ).
    pub fn cosine() -> Self {
        TrigPoly1D::new(
            -1,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap()
    }

    /// V(θ) = e^{-g} e^{2πiθ} + e^{g} e^{-2πiθ}: asymmetric-hopping symbol.
    pub fn asymmetric_hopping(g: Complex64) -> Self {
        TrigPoly1D::new(
            -1,
            vec![g.exp(), Complex64::new(0.0, 0.0), (-g).exp()],
        )
        .unwrap()
    }

    /// V(θ) = e^{2πiθ} + 2 e^{4πiθ}: the second-order model with a
    /// two-dimensional spectral lobe.
    pub fn second_order() -> Self {
        TrigPoly1D::new(1, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]).unwrap()
    }

    pub fn window(&self) -> (i64, i64) {
        (self.l, self.l + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let (l, m) = self.window();
        if k < l || k > m {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - l) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        let (l, m) = self.window();
        l == 0 && m == 0
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        if self.is_real {
            let (l, m) = self.window();
            let span = l.abs().max(m.abs());
            let mut v = self.coeff(0).re;
            for k in 1..=span {
                let c = self.coeff(k);
                let (s, co) = (TAU * k as f64 * theta).sin_cos();
                v += 2.0 * (c.re * co - c.im * s);
            }
            return Complex64::new(v, 0.0);
        }
        let w = Complex64::from_polar(1.0, TAU * theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * Complex64::from_polar(1.0, TAU * self.l as f64 * theta)
    }

    /// Lipschitz bound 2π Σ |k||v_k|.
    pub fn lipschitz(&self) -> f64 {
        let (l, _) = self.window();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| TAU * ((l + j as i64).abs() as f64) * c.norm())
            .sum()
    }
}

/// Continuous piecewise-linear profile on 𝕋 with nodes at the breakpoints.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear1D {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear1D {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self, PotentialError> {
        if breaks.len() < 2 || breaks.len() != values.len() {
            return Err(PotentialError::InvalidData(
                "pwl needs matching breaks/values with at least two nodes".into(),
            ));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(PotentialError::InvalidData(
                "pwl breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PotentialError::InvalidData(
                "pwl breakpoints must be strictly increasing".into(),
            ));
        }
        if values[0] != *values.last().unwrap() {
            return Err(PotentialError::InvalidData(
                "pwl must wrap: value at 1 must equal value at 0".into(),
            ));
        }
        Ok(PiecewiseLinear1D { breaks, values })
    }

    /// The tent profile θ ↦ θ on [0, ½), 1 − θ on [½, 1): Hölder exponent 1,
    /// uniformly distributed range [0, ½].
    pub fn tent() -> Self {
        PiecewiseLinear1D::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 0.0]).unwrap()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(1.0);
        // Last interval ends at 1.0 inclusive via wrap.
        let idx = match self
            .breaks
            .binary_search_by(|b| b.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.breaks.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.breaks.len() - 2),
        };
        let (t0, t1) = (self.breaks[idx], self.breaks[idx + 1]);
        let (v0, v1) = (self.values[idx], self.values[idx + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn max_slope(&self) -> f64 {
        self.breaks
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| ((v[1] - v[0]) / (t[1] - t[0])).abs())
            .fold(0.0, f64::max)
    }
}

/// Uniform sample grid on 𝕋ᵈ (d ≤ 2) with multilinear wrap-around
/// interpolation and caller-supplied Hölder metadata.
#[derive(Debug, Clone)]
pub struct SampledGrid {
    dims: Vec<usize>,
    values: Vec<Complex64>,
    holder_exponent: f64,
    holder_norm: f64,
    is_real: bool,
}

impl SampledGrid {
    pub fn new(
        dims: Vec<usize>,
        values: Vec<Complex64>,
        holder_exponent: f64,
        holder_norm: f64,
    ) -> Result<Self, PotentialError> {
        if dims.is_empty() || dims.len() > 2 {
            return Err(PotentialError::InvalidData(
                "sampled grids support d = 1 or 2".into(),
            ));
        }
        if dims.iter().any(|&n| n < 2) {
            return Err(PotentialError::InvalidData(
                "sampled grids need at least 2 nodes per axis".into(),
            ));
        }
        if values.len() != dims.iter().product::<usize>() {
            return Err(PotentialError::InvalidData(
                "sampled grid value count does not match dimensions".into(),
            ));
        }
        if !(holder_exponent > 0.0 && holder_exponent <= 1.0) {
            return Err(PotentialError::InvalidData(
                "Hölder exponent must lie in (0, 1]".into(),
            ));
        }
        let is_real = values.iter().all(|v| v.im == 0.0);
        Ok(SampledGrid {
            dims,
            values,
            holder_exponent,
            holder_norm,
            is_real,
        })
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    fn node(&self, idx: &[usize]) -> Complex64 {
        match self.dims.len() {
            1 => self.values[idx[0] % self.dims[0]],
            _ => {
                let (n0, n1) = (self.dims[0], self.dims[1]);
                self.values[(idx[0] % n0) * n1 + (idx[1] % n1)]
            }
        }
    }

    pub fn eval(&self, theta: &[f64]) -> Complex64 {
        match self.dims.len() {
            1 => {
                let n = self.dims[0] as f64;
                let x = theta[0].rem_euclid(1.0) * n;
                let i = x.floor() as usize;
                let f = x - x.floor();
                let a = self.node(&[i]);
                let b = self.node(&[i + 1]);
                if self.is_real {
                    Complex64::new(a.re + (b.re - a.re) * f, 0.0)
                } else {
                    a + (b - a) * f
                }
            }
            _ => {
                let n0 = self.dims[0] as f64;
                let n1 = self.dims[1] as f64;
                let x = theta[0].rem_euclid(1.0) * n0;
                let y = theta[1].rem_euclid(1.0) * n1;
                let (i, j) = (x.floor() as usize, y.floor() as usize);
                let (fx, fy) = (x - x.floor(), y - y.floor());
                let v00 = self.node(&[i, j]);
                let v10 = self.node(&[i + 1, j]);
                let v01 = self.node(&[i, j + 1]);
                let v11 = self.node(&[i + 1, j + 1]);
                let v = v00 * ((1.0 - fx) * (1.0 - fy))
                    + v10 * (fx * (1.0 - fy))
                    + v01 * ((1.0 - fx) * fy)
                    + v11 * (fx * fy);
                if self.is_real {
                    Complex64::new(v.re, 0.0)
                } else {
                    v
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Trig(TrigPoly1D),
    Separable(Vec<Potential>),
    Pwl(PiecewiseLinear1D),
    Sampled(SampledGrid),
}

/// Immutable handle to a concrete potential plus its analysis metadata.
#[derive(Debug, Clone)]
pub struct Potential {
    kind: Kind,
    dim: usize,
    sup_norm: f64,
    holder_exponent: f64,
    holder_norm: f64,
    is_real: bool,
}

impl Potential {
    pub fn trig(tp: TrigPoly1D) -> Self {
        let is_real = tp.is_real();
        let holder_norm = tp.lipschitz();
        let mut p = Potential {
            kind: Kind::Trig(tp),
            dim: 1,
            sup_norm: 0.0,
            holder_exponent: 1.0,
            holder_norm,
            is_real,
        };
        p.sup_norm = p.measure_sup_norm();
        p
    }

    pub fn pwl(pl: PiecewiseLinear1D) -> Self {
        let holder_norm = pl.max_slope();
        let mut p = Potential {
            kind: Kind::Pwl(pl),
            dim: 1,
            sup_norm: 0.0,
            holder_exponent: 1.0,
            holder_norm,
            is_real: true,
        };
        p.sup_norm = p.measure_sup_norm();
        p
    }

    pub fn sampled(grid: SampledGrid) -> Self {
        let mut p = Potential {
            dim: grid.dim(),
            sup_norm: 0.0,
            holder_exponent: grid.holder_exponent,
            holder_norm: grid.holder_norm,
            is_real: grid.is_real,
            kind: Kind::Sampled(grid),
        };
        p.sup_norm = p.measure_sup_norm();
        p
    }

    /// V(θ) = Σ_j W_j(θ_j) from one-dimensional parts.
    pub fn separable(parts: Vec<Potential>) -> Result<Self, PotentialError> {
        if parts.is_empty() {
            return Err(PotentialError::InvalidData("separable sum needs parts".into()));
        }
        for part in &parts {
            if part.dim != 1 {
                return Err(PotentialError::InvalidData(
                    "separable parts must be one-dimensional".into(),
                ));
            }
            if matches!(part.kind, Kind::Separable(_)) {
                return Err(PotentialError::InvalidData(
                    "separable sums do not nest".into(),
                ));
            }
        }
        let dim = parts.len();
        let is_real = parts.iter().all(|p| p.is_real);
        let holder_exponent = parts
            .iter()
            .map(|p| p.holder_exponent)
            .fold(1.0, f64::min);
        let holder_norm = parts.iter().map(|p| p.holder_norm).sum();
        let mut p = Potential {
            kind: Kind::Separable(parts),
            dim,
            sup_norm: 0.0,
            holder_exponent,
            holder_norm,
            is_real,
        };
        p.sup_norm = p.measure_sup_norm();
        Ok(p)
    }

    fn measure_sup_norm(&self) -> f64 {
        match self.dim {
            1 => {
                let n = 4096;
                (0..n)
                    .map(|i| self.eval_unchecked(&[i as f64 / n as f64]).norm())
                    .fold(0.0, f64::max)
            }
            2 => {
                let n = 512;
                let mut best = 0.0f64;
                for i in 0..n {
                    for j in 0..n {
                        best = best.max(
                            self.eval_unchecked(&[i as f64 / n as f64, j as f64 / n as f64])
                                .norm(),
                        );
                    }
                }
                best
            }
            _ => match &self.kind {
                // d ≥ 3 only arises through separable sums; the sum of the
                // parts' sups is a valid (conservative) bound there.
                Kind::Separable(parts) => parts.iter().map(|p| p.sup_norm).sum(),
                _ => unreachable!("non-separable potentials are 1- or 2-dimensional"),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn holder(&self) -> (f64, f64) {
        (self.holder_exponent, self.holder_norm)
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn as_trig(&self) -> Option<&TrigPoly1D> {
        match &self.kind {
            Kind::Trig(tp) => Some(tp),
            _ => None,
        }
    }

    pub fn as_separable(&self) -> Option<&[Potential]> {
        match &self.kind {
            Kind::Separable(parts) => Some(parts),
            _ => None,
        }
    }

    pub fn as_pwl(&self) -> Option<&PiecewiseLinear1D> {
        match &self.kind {
            Kind::Pwl(pl) => Some(pl),
            _ => None,
        }
    }

    fn eval_unchecked(&self, theta: &[f64]) -> Complex64 {
        match &self.kind {
            Kind::Trig(tp) => tp.eval(theta[0]),
            Kind::Pwl(pl) => Complex64::new(pl.eval(theta[0]), 0.0),
            Kind::Sampled(grid) => grid.eval(theta),
            Kind::Separable(parts) => {
                if self.is_real {
                    let mut v = 0.0;
                    for (part, t) in parts.iter().zip(theta) {
                        v += part.eval_unchecked(&[*t]).re;
                    }
                    Complex64::new(v, 0.0)
                } else {
                    let mut v = Complex64::new(0.0, 0.0);
                    for (part, t) in parts.iter().zip(theta) {
                        v += part.eval_unchecked(&[*t]);
                    }
                    v
                }
            }
        }
    }

    pub fn eval(&self, theta: &[f64]) -> Result<Complex64, PotentialError> {
        if theta.len() != self.dim {
            return Err(PotentialError::DimensionMismatch {
                want: self.dim,
                got: theta.len(),
            });
        }
        Ok(self.eval_unchecked(theta))
    }

    /// Shorthand for one-dimensional potentials.
    pub fn eval1(&self, theta: f64) -> Complex64 {
        self.eval_unchecked(&[theta])
    }

    /// V over the uniform n^d torus grid, row-major in θ.
    pub fn range_sample(&self, n: usize) -> Result<Vec<Complex64>, PotentialError> {
        if n < 2 {
            return Err(PotentialError::TooFewSamples(n));
        }
        match self.dim {
            1 => Ok((0..n).map(|i| self.eval_unchecked(&[i as f64 / n as f64])).collect()),
            2 => {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(
                            self.eval_unchecked(&[i as f64 / n as f64, j as f64 / n as f64]),
                        );
                    }
                }
                Ok(out)
            }
            d => Err(PotentialError::InvalidData(format!(
                "range sampling is implemented for d <= 2, got {d}"
            ))),
        }
    }

    /// min over the n^d grid of |z − V(θ)|; non-increasing under grid
    /// doubling since the grids nest.
    pub fn dist_to_range(&self, z: Complex64, n: usize) -> Result<f64, PotentialError> {
        let samples = self.range_sample(n)?;
        Ok(samples
            .iter()
            .map(|v| (z - v).norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// Default tolerance for deciding z ∈ R(V) from an n-point-per-axis
    /// grid: three times the Hölder bound on one grid step.
    pub fn range_epsilon(&self, n: usize) -> f64 {
        3.0 * self.holder_norm * (1.0 / n as f64).powf(self.holder_exponent)
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self, PotentialError> {
        match spec {
            PotentialSpec::Trig { l, m, coeffs } => {
                if coeffs.len() as i64 != m - l + 1 {
                    return Err(PotentialError::InvalidData(format!(
                        "trig window [{l}, {m}] expects {} coefficients, got {}",
                        m - l + 1,
                        coeffs.len()
                    )));
                }
                let cs = coeffs
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                Ok(Potential::trig(TrigPoly1D::new(*l, cs)?))
            }
            PotentialSpec::Separable { parts } => {
                let ps = parts
                    .iter()
                    .map(Potential::from_spec)
                    .collect::<Result<Vec<_>, _>>()?;
                Potential::separable(ps)
            }
            PotentialSpec::Pwl { breaks, values } => Ok(Potential::pwl(PiecewiseLinear1D::new(
                breaks.clone(),
                values.clone(),
            )?)),
            PotentialSpec::Sampled {
                dim,
                values,
                holder_exponent,
                holder_norm,
            } => {
                let (dims, flat) = match (dim, values) {
                    (1, SampledValues::One(v)) => (
                        vec![v.len()],
                        v.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                    ),
                    (2, SampledValues::Two(rows)) => {
                        let n0 = rows.len();
                        let n1 = rows.first().map(|r| r.len()).unwrap_or(0);
                        if rows.iter().any(|r| r.len() != n1) {
                            return Err(PotentialError::InvalidData(
                                "ragged sampled grid".into(),
                            ));
                        }
                        (
                            vec![n0, n1],
                            rows.iter()
                                .flatten()
                                .map(|&[re, im]| Complex64::new(re, im))
                                .collect(),
                        )
                    }
                    _ => {
                        return Err(PotentialError::InvalidData(
                            "sampled dim does not match the value nesting".into(),
                        ))
                    }
                };
                Ok(Potential::sampled(SampledGrid::new(
                    dims,
                    flat,
                    *holder_exponent,
                    *holder_norm,
                )?))
            }
        }
    }

    pub fn to_spec(&self) -> PotentialSpec {
        match &self.kind {
            Kind::Trig(tp) => {
                let (l, m) = tp.window();
                PotentialSpec::Trig {
                    l,
                    m,
                    coeffs: tp.coeffs().iter().map(|c| [c.re, c.im]).collect(),
                }
            }
            Kind::Separable(parts) => PotentialSpec::Separable {
                parts: parts.iter().map(Potential::to_spec).collect(),
            },
            Kind::Pwl(pl) => PotentialSpec::Pwl {
                breaks: pl.breaks.clone(),
                values: pl.values.clone(),
            },
            Kind::Sampled(grid) => {
                let pairs: Vec<[f64; 2]> = grid.values.iter().map(|c| [c.re, c.im]).collect();
                let values = match grid.dims.len() {
                    1 => SampledValues::One(pairs),
                    _ => SampledValues::Two(
                        pairs.chunks(grid.dims[1]).map(|c| c.to_vec()).collect(),
                    ),
                };
                PotentialSpec::Sampled {
                    dim: grid.dims.len(),
                    values,
                    holder_exponent: grid.holder_exponent,
                    holder_norm: grid.holder_norm,
                }
            }
        }
    }
}

/// JSON document form of a potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PotentialSpec {
    Trig {
        l: i64,
        m: i64,
        coeffs: Vec<[f64; 2]>,
    },
    Separable {
        parts: Vec<PotentialSpec>,
    },
    Pwl {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    Sampled {
        dim: usize,
        values: SampledValues,
        holder_exponent: f64,
        holder_norm: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampledValues {
    One(Vec<[f64; 2]>),
    Two(Vec<Vec<[f64; 2]>>),
}
