//! Continued fractions, best rational approximants, and the exponent β(α).
//!
//! For irrational α ∈ (0,1) the partial quotients are a_j = ⌊1/α_{j−1}⌋ with
//! α_j = {1/α_{j−1}}, and the convergent denominators obey
//! q_j = a_j q_{j−1} + q_{j−2} (seeds q₀ = 1, q₁ = a₁). The q_n are the best
//! rational approximation denominators: ‖q_n α‖_𝕋 ≤ 1/q_{n+1} and no smaller
//! k beats q_{n−1}. The Liouville-type exponent
//!
//! ```text
//! β(α) = limsup ln(q_{n+1}) / q_n
//! ```
//!
//! measures how abnormally well α is approximated; frequencies with large β
//! are produced on demand by [`liouville_construct`], which forces
//! a_{n+1} = ⌈exp(γ q_n)⌉ so that every truncated β estimate is ≥ γ.
//!
//! All convergent arithmetic is 64-bit integer with overflow checks, and a
//! constructed α is re-derived from its own quotient list rather than kept
//! as a decimal, since q_{n+1} can be astronomically large.

use thiserror::Error;

/// Residual below which an expansion is declared numerically rational.
pub const RATIONAL_RESIDUAL: f64 = 1e-14;
/// Hard cap on convergent denominators for constructed frequencies.
pub const LIOUVILLE_Q_CAP: i64 = 1_000_000_000_000;

#[derive(Debug, Error)]
pub enum FrequencyError {
    #[error("alpha must lie strictly inside (0,1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("need at least three convergents, have {0}")]
    TooFewConvergents(usize),
    #[error("beta is undefined for a (numerically) rational frequency")]
    RationalFrequency,
    #[error("liouville construction requires gamma > 0, got {0}")]
    NonPositiveGamma(f64),
    #[error("liouville construction overflows the q cap at the first step")]
    Overflow,
}

/// A truncated continued-fraction expansion with its convergents.
///
/// `convergents[j]` is (p_j, q_j), starting from the seed (p₀, q₀) = (0, 1),
/// so `convergents.len() == quotients.len() + 1`.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    pub alpha: f64,
    pub quotients: Vec<i64>,
    pub convergents: Vec<(i64, i64)>,
    /// Residual fell below [`RATIONAL_RESIDUAL`]: α is rational at 64-bit
    /// precision and the expansion is exact.
    pub rational: bool,
    /// Expansion stopped early because a convergent denominator passed the
    /// requested cap.
    pub truncated_by_cap: bool,
}

impl ContinuedFraction {
    pub fn denominators(&self) -> Vec<i64> {
        self.convergents.iter().map(|&(_, q)| q).collect()
    }

    /// Reconstruct the value of the truncated fraction ⟨0; a₁, a₂, …⟩.
    pub fn value(&self) -> f64 {
        let mut x = 0.0f64;
        for &a in self.quotients.iter().rev() {
            x = 1.0 / (a as f64 + x);
        }
        x
    }
}

/// ‖kα‖_𝕋 computed exactly enough for q up to ~10¹²: the product kα is
/// split with an FMA two-product so no bits are lost before reduction mod 1.
pub fn torus_norm(k: i64, alpha: f64) -> f64 {
    let kf = k as f64;
    let hi = kf * alpha;
    let lo = kf.mul_add(alpha, -hi);
    let frac = hi - hi.round();
    let s = frac + lo;
    (s - s.round()).abs()
}

/// The exact rational value (num, den) of a positive f64 below 1, when the
/// denominator fits 128 bits (it does for α ≥ 2^-70 or so).
fn decompose(alpha: f64) -> Option<(u128, u128)> {
    let bits = alpha.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, exp) = if exp_field == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), exp_field - 1075)
    };
    let mut shift = -exp;
    while mantissa % 2 == 0 && shift > 0 {
        mantissa /= 2;
        shift -= 1;
    }
    if !(1..=126).contains(&shift) {
        return None;
    }
    Some((mantissa as u128, 1u128 << shift))
}

/// Continued-fraction expansion of α ∈ (0,1), truncated at `max_terms`
/// quotients or when a denominator exceeds `q_cap`, whichever comes first.
///
/// The quotients are obtained by exact integer Euclid on the f64's own
/// rational value, so the convergents are exactly the best approximants of
/// the stored number; a float recursion would drift once q_n passes ~10⁸.
pub fn expand(alpha: f64, max_terms: usize, q_cap: i64) -> Result<ContinuedFraction, FrequencyError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FrequencyError::AlphaOutOfRange(alpha));
    }
    let mut quotients = Vec::new();
    let mut convergents = vec![(0i64, 1i64)];
    let (mut p_prev, mut q_prev) = (1i64, 0i64); // (p_{-1}, q_{-1})
    let (mut p_cur, mut q_cur) = (0i64, 1i64); // (p_0, q_0)
    let mut rational = false;
    let mut truncated_by_cap = false;

    if let Some((mut num, mut den)) = decompose(alpha) {
        for _ in 0..max_terms {
            if num == 0 {
                break;
            }
            let a_exact = den / num;
            let r = den % num;
            let next = i64::try_from(a_exact).ok().and_then(|a| {
                let p = a.checked_mul(p_cur).and_then(|v| v.checked_add(p_prev));
                let q = a.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev));
                match (p, q) {
                    (Some(p), Some(q)) if q <= q_cap => Some((a, p, q)),
                    _ => None,
                }
            });
            let Some((a, p_new, q_new)) = next else {
                truncated_by_cap = true;
                break;
            };
            quotients.push(a);
            convergents.push((p_new, q_new));
            p_prev = p_cur;
            q_prev = q_cur;
            p_cur = p_new;
            q_cur = q_new;

            den = num;
            num = r;
            if num == 0 || (num as f64) < RATIONAL_RESIDUAL * den as f64 {
                rational = true;
                break;
            }
        }
    } else {
        // α below ~2^-70: the very first quotient already dwarfs any cap.
        truncated_by_cap = true;
    }

    Ok(ContinuedFraction {
        alpha,
        quotients,
        convergents,
        rational,
        truncated_by_cap,
    })
}

/// Truncated lower estimate of β(α) = limsup ln(q_{n+1})/q_n: the maximum of
/// the ratio over the computed convergents. A finite expansion can only
/// undershoot the limsup.
pub fn beta_estimate(cf: &ContinuedFraction) -> Result<f64, FrequencyError> {
    if cf.rational {
        return Err(FrequencyError::RationalFrequency);
    }
    if cf.convergents.len() < 3 {
        return Err(FrequencyError::TooFewConvergents(cf.convergents.len()));
    }
    let qs = cf.denominators();
    let mut best = 0.0f64;
    for n in 1..qs.len() - 1 {
        let ratio = (qs[n + 1] as f64).ln() / qs[n] as f64;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Builds a frequency with β(α) ≥ γ by forcing a_{n+1} = ⌈exp(γ q_n)⌉.
///
/// The expansion starts from a₁ = 1 and stops once the next denominator
/// would pass [`LIOUVILLE_Q_CAP`] (flagged on the result) or after `depth`
/// quotients. α is recomputed from the quotient list bottom-up.
pub fn liouville_construct(gamma: f64, depth: usize) -> Result<(f64, ContinuedFraction), FrequencyError> {
    if gamma <= 0.0 {
        return Err(FrequencyError::NonPositiveGamma(gamma));
    }
    if depth < 2 {
        return Err(FrequencyError::TooFewConvergents(depth));
    }

    let mut quotients = vec![1i64];
    let mut convergents = vec![(0i64, 1i64), (1i64, 1i64)];
    let (mut p_prev, mut q_prev) = (0i64, 1i64);
    let (mut p_cur, mut q_cur) = (1i64, 1i64);
    let mut truncated_by_cap = false;

    for _ in 1..depth {
        let target = (gamma * q_cur as f64).exp().ceil();
        if !target.is_finite() || target > LIOUVILLE_Q_CAP as f64 {
            truncated_by_cap = true;
            break;
        }
        let a = target as i64;
        let next = {
            let p = a.checked_mul(p_cur).and_then(|v| v.checked_add(p_prev));
            let q = a.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev));
            match (p, q) {
                (Some(p), Some(q)) if q <= LIOUVILLE_Q_CAP => Some((p, q)),
                _ => None,
            }
        };
        let Some((p_new, q_new)) = next else {
            truncated_by_cap = true;
            break;
        };
        quotients.push(a);
        convergents.push((p_new, q_new));
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_new;
        q_cur = q_new;
    }

    if quotients.len() < 2 {
        return Err(FrequencyError::Overflow);
    }

    let mut cf = ContinuedFraction {
        alpha: 0.0,
        quotients,
        convergents,
        rational: false,
        truncated_by_cap,
    };
    cf.alpha = cf.value();
    Ok((cf.alpha, cf))
}

/// (√5 − 1)/2, the golden-mean frequency.
pub fn golden_mean() -> f64 {
    (5.0f64.sqrt() - 1.0) / 2.0
}

/// √2 − 1, the silver-mean frequency (all partial quotients 2).
pub fn silver_mean() -> f64 {
    2.0f64.sqrt() - 1.0
}
