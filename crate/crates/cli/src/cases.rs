//! Registry of the solved gallery cases: each tag pins a potential, the
//! natural evaluator, and the matching closed-form oracle.

use num_complex::Complex64;

use spectral_atlas::contour::Box2;
use spectral_atlas::log_potential::{GdEvaluator, Method};
use spectral_atlas::oracles::{OracleCase, RadialProfile};
use spectral_atlas::potential::{PiecewiseLinear1D, Potential, TrigPoly1D};

use crate::config::{numerical, usage, CliError};

pub const CASE_TAGS: &[&str] = &["app2", "two6", "app3", "two5", "pwl", "hn1d", "hn2d"];

pub struct GalleryCase {
    pub evaluator: GdEvaluator,
    pub oracle: OracleCase,
    pub bbox: Box2,
}

/// Resolve a case tag into its pinned setup. `g` is consulted by the
/// hopping cases only.
pub fn build(tag: &str, lambda: f64, g: f64) -> Result<GalleryCase, CliError> {
    let case = match tag {
        // Single Fourier mode; "two6" is its d-dimensional diagonal twin
        // with the identical spectrum, kept as a separate tag to mirror the
        // solved-example list.
        "app2" | "two6" => {
            let evaluator = GdEvaluator::new(
                Potential::trig(TrigPoly1D::single_mode()),
                Method::Jensen,
                1e-8,
            )
            .map_err(usage)?;
            let oracle = OracleCase::monomial(lambda);
            let bbox = oracle.bbox();
            GalleryCase {
                evaluator,
                oracle,
                bbox,
            }
        }
        "app3" => {
            let potential = Potential::separable(vec![
                Potential::trig(TrigPoly1D::single_mode()),
                Potential::trig(TrigPoly1D::single_mode()),
            ])
            .map_err(usage)?;
            let evaluator = GdEvaluator::new(potential, Method::Iterated, 1e-8).map_err(usage)?;
            let profile = RadialProfile::from_evaluator(&evaluator, 2.6, 257).map_err(numerical)?;
            let oracle = OracleCase::cosine_sum(2, lambda, profile).map_err(usage)?;
            let bbox = oracle.bbox();
            GalleryCase {
                evaluator,
                oracle,
                bbox,
            }
        }
        "two5" => {
            let evaluator = GdEvaluator::new(
                Potential::trig(TrigPoly1D::second_order()),
                Method::Jensen,
                1e-8,
            )
            .map_err(usage)?;
            let oracle = OracleCase::second_order_lobe(lambda).map_err(usage)?;
            let bbox = oracle.bbox();
            GalleryCase {
                evaluator,
                oracle,
                bbox,
            }
        }
        "pwl" => {
            let evaluator = GdEvaluator::new(
                Potential::pwl(PiecewiseLinear1D::tent()),
                Method::TentClosedForm,
                1e-8,
            )
            .map_err(usage)?;
            let oracle = OracleCase::tent(lambda);
            let bbox = oracle.bbox();
            GalleryCase {
                evaluator,
                oracle,
                bbox,
            }
        }
        "hn1d" => {
            let gc = Complex64::new(g, 0.0);
            let evaluator = GdEvaluator::new(
                Potential::trig(TrigPoly1D::asymmetric_hopping(gc)),
                Method::Jensen,
                1e-8,
            )
            .map_err(usage)?;
            let oracle = OracleCase::hopping_1d(gc, lambda);
            let bbox = oracle.bbox();
            GalleryCase {
                evaluator,
                oracle,
                bbox,
            }
        }
        "hn2d" => {
            let potential = Potential::separable(vec![
                Potential::trig(TrigPoly1D::cosine()),
                Potential::trig(TrigPoly1D::asymmetric_hopping(Complex64::new(g, 0.0))),
            ])
            .map_err(usage)?;
            let evaluator = GdEvaluator::new(potential, Method::Iterated, 1e-8).map_err(usage)?;
            let oracle = OracleCase::hopping_2d(g, lambda).map_err(usage)?;
            let bbox = oracle.bbox();
            GalleryCase {
                evaluator,
                oracle,
                bbox,
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown case '{other}'; known tags: {}",
                CASE_TAGS.join(", ")
            )))
        }
    };
    Ok(case)
}
