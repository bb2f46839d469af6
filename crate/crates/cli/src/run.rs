//! Check orchestration and report emission.

use serde::Serialize;

use metallic_core::structures::AssociatedMetricConstants;
use metallic_core::{
    curvature_xi_check, frame_feasibility, kenmotsu_hypersurface_check, killing_check,
    nijenhuis_phi_check, verify_associated_metric, verify_connection_formulas, verify_geometry,
    verify_induced_phi, verify_integrable, verify_kenmotsu, verify_locally_metallic,
    verify_metallic, verify_quadratic_phi, verify_spectral, verify_structure_equations,
    verify_warped_kenmotsu, CheckResult, MetallicStructure, Sampling, VerificationReport,
};

use crate::config::{build_target, ConfigError, ConfigResult, Target, VerificationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    pub fn from_name(name: &str) -> ConfigResult<Format> {
        match name {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(ConfigError(format!(
                "unknown format `{other}` (expected `text` or `json`)"
            ))),
        }
    }
}

/// Command-line overrides; config values fill the gaps, then defaults
/// (samples 100, seed 42, tol 1e-9, text).
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
}

/// The full deterministic output of one config run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub checks: Vec<CheckResult>,
}

pub fn run_config(
    config: &VerificationConfig,
    options: &RunOptions,
) -> ConfigResult<(RunReport, Format)> {
    let sampling = Sampling {
        count: options.samples.or(config.samples).unwrap_or(100),
        seed: options.seed.or(config.seed).unwrap_or(42),
        tol: options.tol.or(config.tol).unwrap_or(1e-9),
    };
    let format = match (options.format, &config.format) {
        (Some(f), _) => f,
        (None, Some(name)) => Format::from_name(name)?,
        (None, None) => Format::Text,
    };

    let target = build_target(&config.target)?;
    validate_checks(&config.checks, &target)?;

    let mut checks = Vec::new();
    for name in &config.checks {
        match execute_check(name, &target, &sampling) {
            Ok(report) => checks.extend(report.checks),
            Err(error) => {
                // Execution errors become failed entries so one bad check
                // cannot hide the rest of the report.
                checks.push(CheckResult {
                    name: format!("{name}.error"),
                    samples: 0,
                    max_residual: f64::INFINITY,
                    mean_residual: f64::INFINITY,
                    worst_point: Vec::new(),
                    tol: sampling.tol,
                    pass: false,
                    notes: vec![error.to_string()],
                });
            }
        }
    }

    let report = VerificationReport::new(checks);
    Ok((
        RunReport {
            name: config
                .name
                .clone()
                .unwrap_or_else(|| "verification".to_string()),
            samples: sampling.count,
            seed: sampling.seed,
            tol: sampling.tol,
            pass: report.pass,
            notes: config.notes.clone(),
            checks: report.checks,
        },
        format,
    ))
}

fn known_checks(target: &Target) -> &'static [&'static str] {
    match target {
        Target::Metallic { .. } => &["metallic", "locally_metallic", "integrable"],
        Target::QuadraticPhi { .. } => &["quadratic_phi", "spectral", "associated_metric"],
        Target::Warped { .. } => &[
            "connection",
            "az",
            "induced_phi",
            "kenmotsu",
            "kenmotsu_theorem",
            "qc",
            "nijenhuis_phi",
            "metallic",
            "locally_metallic",
            "integrable",
        ],
        Target::Hypersurface { .. } => &[
            "geometry",
            "frame",
            "structure_equations",
            "killing",
            "kenmotsu_hypersurface",
            "curvature_xi",
            "metallic_shape",
        ],
    }
}

fn validate_checks(names: &[String], target: &Target) -> ConfigResult<()> {
    if names.is_empty() {
        return Err(ConfigError("no checks requested".to_string()));
    }
    let known = known_checks(target);
    for name in names {
        if !known.contains(&name.as_str()) {
            return Err(ConfigError(format!(
                "unknown check `{name}` for this target (available: {})",
                known.join(", ")
            )));
        }
    }
    if let Target::QuadraticPhi {
        associated_constants,
        structure,
        ..
    } = target
    {
        if names.iter().any(|n| n == "associated_metric") {
            let c = associated_constants.ok_or_else(|| {
                ConfigError("associated_metric needs `associated_constants`".to_string())
            })?;
            AssociatedMetricConstants::new(c[0], c[1], c[2], c[3])
                .validate(structure.a, structure.b)
                .map_err(|e| ConfigError(e.to_string()))?;
        }
    }
    if let Target::Warped { product, beta } = target {
        if names.iter().any(|n| n == "kenmotsu") && beta.is_none() {
            return Err(ConfigError(
                "the `kenmotsu` check needs a `beta` expression".to_string(),
            ));
        }
        let fiber_needed = names.iter().any(|n| {
            matches!(
                n.as_str(),
                "induced_phi"
                    | "kenmotsu"
                    | "kenmotsu_theorem"
                    | "qc"
                    | "nijenhuis_phi"
                    | "metallic"
                    | "locally_metallic"
                    | "integrable"
            )
        });
        if fiber_needed && product.fiber_structure.is_none() {
            return Err(ConfigError(
                "requested checks need a `fiber_structure`".to_string(),
            ));
        }
    }
    Ok(())
}

fn execute_check(
    name: &str,
    target: &Target,
    sampling: &Sampling,
) -> metallic_core::Result<VerificationReport> {
    match target {
        Target::Metallic { chart, structure } => match name {
            "metallic" => verify_metallic(chart, structure, sampling),
            "locally_metallic" => verify_locally_metallic(chart, structure, sampling),
            "integrable" => verify_integrable(chart, structure, sampling),
            _ => unreachable!("validated"),
        },
        Target::QuadraticPhi {
            chart,
            structure,
            metric_compatible,
            associated_constants,
        } => match name {
            "quadratic_phi" => verify_quadratic_phi(chart, structure, sampling, *metric_compatible),
            "spectral" => verify_spectral(chart, structure, sampling),
            "associated_metric" => {
                let c = associated_constants.expect("validated");
                let constants = AssociatedMetricConstants::new(c[0], c[1], c[2], c[3]);
                let h_tilde = nalgebra::DMatrix::identity(chart.dim(), chart.dim());
                verify_associated_metric(&h_tilde, structure, &constants, chart, sampling)
            }
            _ => unreachable!("validated"),
        },
        Target::Warped { product, beta } => match name {
            "connection" | "az" => verify_connection_formulas(product, sampling),
            "induced_phi" => verify_induced_phi(product, sampling),
            "kenmotsu" => {
                let induced = product.induce_phi()?;
                verify_kenmotsu(
                    &induced.chart,
                    &induced.structure,
                    beta.as_ref().expect("validated"),
                    sampling,
                )
            }
            "kenmotsu_theorem" | "qc" => verify_warped_kenmotsu(product, sampling),
            "nijenhuis_phi" => {
                let induced = product.induce_phi()?;
                nijenhuis_phi_check(&induced.chart, &induced.structure, sampling)
            }
            "metallic" => verify_metallic(
                &product.fiber,
                product.fiber_structure.as_ref().expect("validated"),
                sampling,
            ),
            "locally_metallic" => verify_locally_metallic(
                &product.fiber,
                product.fiber_structure.as_ref().expect("validated"),
                sampling,
            ),
            "integrable" => verify_integrable(
                &product.fiber,
                product.fiber_structure.as_ref().expect("validated"),
                sampling,
            ),
            _ => unreachable!("validated"),
        },
        Target::Hypersurface { surface, beta } => match name {
            "geometry" => verify_geometry(surface, sampling),
            "frame" => frame_feasibility(surface, sampling),
            "structure_equations" => verify_structure_equations(surface, sampling),
            "killing" => killing_check(surface, sampling),
            "kenmotsu_hypersurface" => kenmotsu_hypersurface_check(surface, *beta, sampling),
            "curvature_xi" => curvature_xi_check(surface, sampling),
            "metallic_shape" => {
                let fields = surface.fields()?;
                let shape_structure = MetallicStructure::new(
                    surface.structure.p,
                    surface.structure.q,
                    fields.shape.clone(),
                )?;
                let mut report = verify_metallic(&fields.chart, &shape_structure, sampling)?;
                if let Some(first) = report.checks.first_mut() {
                    first.notes.push(format!(
                        "shape operator treated as the structure tensor; sigma = {}",
                        shape_structure.sigma
                    ));
                }
                Ok(report)
            }
            _ => unreachable!("validated"),
        },
    }
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            let verdict = if report.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{}: {} ({} checks, samples={}, seed={}, tol={:e})\n",
                report.name,
                verdict,
                report.checks.len(),
                report.samples,
                report.seed,
                report.tol
            ));
            for note in &report.notes {
                out.push_str(&format!("  note: {note}\n"));
            }
            for check in &report.checks {
                let verdict = if check.pass { "PASS" } else { "FAIL" };
                out.push_str(&format!(
                    "  {verdict} {:<42} max {:>12.5e}  mean {:>12.5e}  (n={})\n",
                    check.name, check.max_residual, check.mean_residual, check.samples
                ));
                for note in &check.notes {
                    out.push_str(&format!("        note: {note}\n"));
                }
            }
            out
        }
    }
}
