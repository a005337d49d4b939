//! Subcommand implementations: each resolves its configuration, runs the
//! library pipeline, prints or writes JSON artifacts, and registers
//! everything in a run manifest when writing files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use spectral_atlas::eig::eig_dense;
use spectral_atlas::frequency;
use spectral_atlas::log_potential::{GdEvaluator, Method};
use spectral_atlas::operators::{
    build_matrix, floquet_spectrum, weyl_certify, IndexRange, Model, OperatorSpec,
};
use spectral_atlas::oracles::agreement_check;
use spectral_atlas::spectrum::Classifier;

use crate::cases;
use crate::config::{
    load_potential, numerical, parse_box, parse_frequency, parse_index_range, parse_point, usage,
    CliError, FrequencySpec, Manifest,
};
use crate::render;

fn emit_json<T: Serialize>(
    doc: &T,
    out: Option<&Path>,
    manifest_cmd: &str,
    config: &[(&str, serde_json::Value)],
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc).map_err(usage)?;
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().unwrap_or(Path::new("."));
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| CliError::Usage(format!("bad output path {}", path.display())))?;
            let mut manifest = Manifest::new(manifest_cmd, dir);
            for (key, value) in config {
                manifest.config(key, value.clone());
            }
            manifest.config("out", name);
            manifest.write_artifact(name, text.as_bytes())?;
            manifest.finish()
        }
    }
}

#[derive(Serialize)]
struct FreqDoc {
    schema: &'static str,
    a: Vec<i64>,
    p: Vec<i64>,
    q: Vec<i64>,
    beta_estimate: Option<f64>,
    rational: bool,
}

pub fn freq_expand(
    alpha: &str,
    terms: usize,
    q_cap: i64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let spec = parse_frequency(alpha)?;
    let cf = frequency::expand(spec.value(), terms, q_cap).map_err(usage)?;
    let beta = frequency::beta_estimate(&cf).ok();
    let doc = FreqDoc {
        schema: "v1",
        a: cf.quotients.clone(),
        p: cf.convergents.iter().map(|&(p, _)| p).collect(),
        q: cf.convergents.iter().map(|&(_, q)| q).collect(),
        beta_estimate: beta,
        rational: cf.rational,
    };
    emit_json(
        &doc,
        out,
        "freq expand",
        &[
            ("alpha", alpha.into()),
            ("terms", (terms as i64).into()),
            ("q_cap", q_cap.into()),
        ],
    )
}

#[derive(Serialize)]
struct GdDoc {
    schema: &'static str,
    value: f64,
    method: &'static str,
    error_bound: f64,
    near_singular: bool,
}

pub fn gd_eval(
    potential_path: &Path,
    z: &str,
    method: Option<&str>,
    eps: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let potential = load_potential(potential_path)?;
    let z_text = z;
    let z = parse_point(z)?;
    let evaluator = match method {
        None => GdEvaluator::auto(potential).map_err(usage)?,
        Some("jensen") => GdEvaluator::new(potential, Method::Jensen, eps).map_err(usage)?,
        Some("quad") => GdEvaluator::new(potential, Method::Quadrature, eps).map_err(usage)?,
        Some("iterated") => GdEvaluator::new(potential, Method::Iterated, eps).map_err(usage)?,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown method '{other}' (jensen|quad|iterated)"
            )))
        }
    };
    let value = evaluator.eval_detailed(z).map_err(numerical)?;
    let doc = GdDoc {
        schema: "v1",
        value: value.value,
        method: evaluator.method().as_str(),
        error_bound: value.total_bound(),
        near_singular: value.near_singular,
    };
    emit_json(
        &doc,
        out,
        "gd eval",
        &[
            ("potential", potential_path.display().to_string().into()),
            ("z", z_text.into()),
            ("method", evaluator.method().as_str().into()),
            ("eps", eps.into()),
        ],
    )
}

#[derive(Serialize)]
struct CurvesDoc {
    schema: &'static str,
    lambda: f64,
    curves: Vec<Vec<[f64; 2]>>,
}

pub fn spectrum_atlas(
    potential_path: &Path,
    lambda: f64,
    box_spec: &str,
    res: usize,
    out_dir: &Path,
) -> Result<(), CliError> {
    let potential = load_potential(potential_path)?;
    let bbox = parse_box(box_spec)?;
    if res < 16 {
        return Err(CliError::Usage(format!("resolution {res} below 16")));
    }
    let evaluator = GdEvaluator::auto(potential).map_err(usage)?;
    let classifier = Classifier::new(evaluator).map_err(usage)?;
    let set = classifier
        .spectrum_set(lambda, bbox, res)
        .map_err(numerical)?;

    let mut manifest = Manifest::new("spectrum atlas", out_dir);
    manifest.config("potential", potential_path.display().to_string());
    manifest.config("lambda", lambda);
    manifest.config("box", box_spec);
    manifest.config("res", res as i64);
    manifest.failed = set.grid.any_failed;

    manifest.write_artifact("grid.csv", render::grid_csv(&set.grid).as_bytes())?;
    let curves = CurvesDoc {
        schema: "v1",
        lambda,
        curves: set
            .p_curves
            .iter()
            .map(|line| line.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    manifest.write_artifact(
        "curves.json",
        serde_json::to_string_pretty(&curves).map_err(usage)?.as_bytes(),
    )?;
    manifest.write_artifact("picture.ppm", &render::ppm(&set.grid))?;
    manifest.write_artifact("picture.svg", render::svg(&set, &[]).as_bytes())?;
    manifest.finish()?;
    if set.grid.any_failed {
        return Err(CliError::Numerical(
            "some grid nodes missed the evaluator accuracy contract (see failed flags)".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct CloudDoc {
    schema: &'static str,
    q: i64,
    roots: Vec<[f64; 2]>,
    residuals: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn op_floquet(
    potential_path: &Path,
    lambda: f64,
    freq: &str,
    theta_grid: usize,
    phi_grid: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let potential = load_potential(potential_path)?;
    let mut rationals = Vec::new();
    for part in freq.split(',') {
        match parse_frequency(part.trim())? {
            FrequencySpec::Rational(p, q) => rationals.push((p, q)),
            FrequencySpec::Irrational(_) => {
                return Err(CliError::Usage(format!(
                    "floquet frequency '{part}' must be rational p/q"
                )))
            }
        }
    }
    let fs = floquet_spectrum(&potential, lambda, &rationals, theta_grid, phi_grid)
        .map_err(numerical)?;
    if fs.failed_cells > 0 {
        return Err(CliError::Numerical(format!(
            "{} Floquet cells failed to converge",
            fs.failed_cells
        )));
    }
    let doc = CloudDoc {
        schema: "v1",
        q: fs.period,
        roots: fs.roots.iter().map(|z| [z.re, z.im]).collect(),
        residuals: fs.residuals.clone(),
    };
    emit_json(
        &doc,
        out,
        "op floquet",
        &[
            ("potential", potential_path.display().to_string().into()),
            ("lambda", lambda.into()),
            ("freq", freq.into()),
            ("theta_grid", (theta_grid as i64).into()),
            ("phi_grid", (phi_grid as i64).into()),
        ],
    )
}

#[derive(Serialize)]
struct WeylDoc {
    schema: &'static str,
    z: [f64; 2],
    lambda: f64,
    theta: Vec<f64>,
    window_sizes: Vec<i64>,
    residuals: Vec<f64>,
    min_residual: f64,
    tail_exponent: f64,
}

pub fn op_weyl(
    potential_path: &Path,
    z: &str,
    lambda: f64,
    alpha: &str,
    theta: f64,
    n_max: i64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let potential = load_potential(potential_path)?;
    let z_text = z;
    let z = parse_point(z)?;
    let spec = parse_frequency(alpha)?;
    if n_max > 100_000 {
        return Err(CliError::Usage(format!("nmax {n_max} exceeds 100000")));
    }
    let d = potential.dim();
    let alphas = vec![spec.value(); d];
    let thetas = vec![theta; d];
    let rep = weyl_certify(&potential, lambda, z, &thetas, &alphas, n_max).map_err(numerical)?;
    let doc = WeylDoc {
        schema: "v1",
        z: [z.re, z.im],
        lambda,
        theta: rep.theta.clone(),
        window_sizes: rep.window_sizes.clone(),
        residuals: rep.residuals.clone(),
        min_residual: rep.min_residual,
        tail_exponent: rep.tail_exponent,
    };
    emit_json(
        &doc,
        out,
        "op weyl",
        &[
            ("potential", potential_path.display().to_string().into()),
            ("z", z_text.into()),
            ("lambda", lambda.into()),
            ("alpha", alpha.into()),
            ("theta", theta.into()),
            ("nmax", n_max.into()),
        ],
    )
}

#[derive(Serialize)]
struct EigsDoc {
    schema: &'static str,
    size: usize,
    eigenvalues: Vec<[f64; 2]>,
    residual: f64,
    sweeps: u32,
}

#[allow(clippy::too_many_arguments)]
pub fn op_truncate(
    potential_path: &Path,
    lambda: f64,
    alpha: &str,
    theta: f64,
    model: &str,
    range: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let potential = load_potential(potential_path)?;
    let spec = parse_frequency(alpha)?;
    let (start, len) = parse_index_range(range)?;
    let model_text = model;
    let model = match model {
        "dual" => Model::Dual,
        "primal" => Model::Primal,
        other => {
            return Err(CliError::Usage(format!(
                "model '{other}' must be primal or dual"
            )))
        }
    };
    let d = potential.dim();
    let op = OperatorSpec {
        model,
        potential,
        lambda: Complex64::new(lambda, 0.0),
        alpha: vec![spec.value(); d],
        phase: vec![theta; if model == Model::Primal { 1 } else { d }],
    };
    let matrix = build_matrix(&op, IndexRange::Line { start, len }).map_err(usage)?;
    let eig = eig_dense(&matrix).map_err(numerical)?;
    let doc = EigsDoc {
        schema: "v1",
        size: len,
        eigenvalues: eig.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        residual: eig.residual,
        sweeps: eig.sweeps,
    };
    emit_json(
        &doc,
        out,
        "op truncate",
        &[
            ("potential", potential_path.display().to_string().into()),
            ("lambda", lambda.into()),
            ("alpha", alpha.into()),
            ("theta", theta.into()),
            ("model", model_text.into()),
            ("range", range.into()),
        ],
    )
}

#[derive(Serialize)]
struct OracleDoc {
    schema: &'static str,
    case: String,
    lambda: f64,
    samples: usize,
    agree: usize,
    tube: usize,
    disagree: usize,
}

pub fn oracle_check(
    tag: &str,
    lambda: f64,
    g: f64,
    samples: usize,
    seed: u64,
    tube: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let case = cases::build(tag, lambda, g)?;
    let classifier = Classifier::new(case.evaluator).map_err(usage)?;
    // The classifier deliberately fattens R(V) by its range tolerance
    // (three Hölder-bounded grid gaps); the comparison tube must absorb at
    // least that, or the fuzz would be reported as disagreement.
    let tube = tube.max(1.05 * classifier.params().eps_range);
    let bbox = case.bbox;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decisions = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z = Complex64::new(
            rng.gen_range(bbox.x0..bbox.x1),
            rng.gen_range(bbox.y0..bbox.y1),
        );
        let label = classifier.classify(z, lambda).map_err(numerical)?;
        decisions.push((z, label.label.in_spectrum()));
    }
    let report = agreement_check(&case.oracle, &decisions, tube).map_err(numerical)?;
    let doc = OracleDoc {
        schema: "v1",
        case: tag.to_string(),
        lambda,
        samples,
        agree: report.agree,
        tube: report.tube,
        disagree: report.disagree,
    };
    emit_json(
        &doc,
        out,
        "oracle check",
        &[
            ("case", tag.into()),
            ("lambda", lambda.into()),
            ("g", g.into()),
            ("samples", (samples as i64).into()),
            ("seed", (seed as i64).into()),
            ("tube", tube.into()),
        ],
    )?;
    if report.disagree > 0 {
        return Err(CliError::Numerical(format!(
            "{} classifications disagree with the oracle outside the tube",
            report.disagree
        )));
    }
    Ok(())
}

pub fn gallery(
    tag: &str,
    lambda: f64,
    g: f64,
    res: usize,
    out_dir: Option<&Path>,
) -> Result<(), CliError> {
    let case = cases::build(tag, lambda, g)?;
    let classifier = Classifier::new(case.evaluator).map_err(usage)?;
    let set = classifier
        .spectrum_set(lambda, case.bbox, res)
        .map_err(numerical)?;
    let overlay = case.oracle.boundary_points(1024).map_err(numerical)?;

    let default_dir = PathBuf::from(format!("gallery-{tag}"));
    let dir = out_dir.unwrap_or(&default_dir);
    let mut manifest = Manifest::new("gallery", dir);
    manifest.config("case", tag);
    manifest.config("lambda", lambda);
    manifest.config("g", g);
    manifest.config("res", res as i64);
    manifest.failed = set.grid.any_failed;

    manifest.write_artifact("grid.csv", render::grid_csv(&set.grid).as_bytes())?;
    manifest.write_artifact("picture.ppm", &render::ppm(&set.grid))?;
    manifest.write_artifact("picture.svg", render::svg(&set, &[overlay]).as_bytes())?;
    let curves = CurvesDoc {
        schema: "v1",
        lambda,
        curves: set
            .p_curves
            .iter()
            .map(|line| line.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    manifest.write_artifact(
        "curves.json",
        serde_json::to_string_pretty(&curves).map_err(usage)?.as_bytes(),
    )?;
    manifest.finish()?;
    if set.grid.any_failed {
        return Err(CliError::Numerical(
            "some grid nodes missed the evaluator accuracy contract".into(),
        ));
    }
    Ok(())
}
