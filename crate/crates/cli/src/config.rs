//! JSON configuration schema and construction of core objects from it.
//!
//! Everything that can go wrong while *loading* a config (bad JSON, unknown
//! check names, expressions that do not parse, inconsistent shapes) is a
//! [`ConfigError`] and maps to exit code 2. Residual failures while running
//! checks are ordinary report entries and map to exit code 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use metallic_core::expr::Expr;
use metallic_core::{
    ChartedManifold, Hypersurface, MetallicStructure, OneForm, QuadraticPhiStructure,
    TensorField11, VectorField, WarpedProduct,
};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> ConfigError {
        ConfigError(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column()))
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub target: TargetConfig,
    pub checks: Vec<String>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub format: Option<String>,
    /// Informational notes copied verbatim into the report (fixture caveats,
    /// known source-text discrepancies). Never failures.
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub coords: Vec<String>,
    /// Full square matrix of expression strings; must be symmetric.
    pub metric: Vec<Vec<String>>,
    pub sample_box: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetallicConfig {
    pub p: u32,
    pub q: u32,
    /// J components as expression strings over the chart coordinates.
    pub field: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    Metallic {
        manifold: ManifoldConfig,
        structure: MetallicConfig,
    },
    QuadraticPhi {
        manifold: ManifoldConfig,
        a: f64,
        b: f64,
        phi: Vec<Vec<String>>,
        eta: Vec<String>,
        xi: Vec<String>,
        /// Whether the chart metric is claimed compatible with φ; enables
        /// the metric identities inside `quadratic_phi`.
        #[serde(default)]
        metric_compatible: bool,
        /// (alpha, beta, gamma, delta) for the associated-metric check.
        #[serde(default)]
        associated_constants: Option<[f64; 4]>,
    },
    Warped {
        fiber: ManifoldConfig,
        #[serde(default)]
        fiber_structure: Option<MetallicConfig>,
        warping: String,
        #[serde(default = "default_base_coord")]
        base_coord: String,
        #[serde(default = "default_interval")]
        base_interval: [f64; 2],
        /// β expression for the standalone `kenmotsu` check.
        #[serde(default)]
        beta: Option<String>,
    },
    Hypersurface {
        ambient: ManifoldConfig,
        structure: MetallicConfig,
        embedding: Vec<String>,
        params: Vec<String>,
        param_box: Vec<[f64; 2]>,
        #[serde(default = "default_orientation")]
        orientation: f64,
        /// Optional constant β for `kenmotsu_hypersurface`; estimated from
        /// the shape operator when absent.
        #[serde(default)]
        beta: Option<f64>,
    },
}

fn default_base_coord() -> String {
    "t".to_string()
}

fn default_interval() -> [f64; 2] {
    [-1.0, 1.0]
}

fn default_orientation() -> f64 {
    1.0
}

pub fn parse_config(text: &str) -> ConfigResult<VerificationConfig> {
    let config: VerificationConfig = serde_json::from_str(text)?;
    Ok(config)
}

fn parse_expr(text: &str, coords: &[String], what: &str) -> ConfigResult<Expr> {
    metallic_core::parse(text, coords)
        .map_err(|e| ConfigError(format!("{what}: `{text}`: {e}")))
}

fn parse_matrix(
    rows: &[Vec<String>],
    coords: &[String],
    what: &str,
) -> ConfigResult<Vec<Vec<Expr>>> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| parse_expr(s, coords, &format!("{what}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

pub fn build_manifold(config: &ManifoldConfig) -> ConfigResult<ChartedManifold> {
    let rows = parse_matrix(&config.metric, &config.coords, "metric")?;
    let boxes = config.sample_box.iter().map(|b| (b[0], b[1])).collect();
    ChartedManifold::from_matrix(config.coords.clone(), boxes, rows)
        .map_err(|e| ConfigError(format!("manifold: {e}")))
}

pub fn build_structure(
    config: &MetallicConfig,
    chart: &ChartedManifold,
) -> ConfigResult<MetallicStructure> {
    let rows = parse_matrix(&config.field, chart.coords(), "structure.field")?;
    let field =
        TensorField11::from_rows(rows).map_err(|e| ConfigError(format!("structure: {e}")))?;
    MetallicStructure::new(config.p, config.q, field)
        .map_err(|e| ConfigError(format!("structure: {e}")))
}

/// Core objects a config resolves to, ready for check execution.
pub enum Target {
    Metallic {
        chart: ChartedManifold,
        structure: MetallicStructure,
    },
    QuadraticPhi {
        chart: ChartedManifold,
        structure: QuadraticPhiStructure,
        metric_compatible: bool,
        associated_constants: Option<[f64; 4]>,
    },
    Warped {
        product: WarpedProduct,
        beta: Option<Expr>,
    },
    Hypersurface {
        surface: Hypersurface,
        beta: Option<f64>,
    },
}

pub fn build_target(config: &TargetConfig) -> ConfigResult<Target> {
    match config {
        TargetConfig::Metallic {
            manifold,
            structure,
        } => {
            let chart = build_manifold(manifold)?;
            let structure = build_structure(structure, &chart)?;
            Ok(Target::Metallic { chart, structure })
        }
        TargetConfig::QuadraticPhi {
            manifold,
            a,
            b,
            phi,
            eta,
            xi,
            metric_compatible,
            associated_constants,
        } => {
            let chart = build_manifold(manifold)?;
            let phi_rows = parse_matrix(phi, chart.coords(), "phi")?;
            let phi_field = TensorField11::from_rows(phi_rows)
                .map_err(|e| ConfigError(format!("phi: {e}")))?;
            let eta = eta
                .iter()
                .map(|s| parse_expr(s, chart.coords(), "eta"))
                .collect::<ConfigResult<Vec<_>>>()?;
            let xi = xi
                .iter()
                .map(|s| parse_expr(s, chart.coords(), "xi"))
                .collect::<ConfigResult<Vec<_>>>()?;
            let structure = QuadraticPhiStructure::new(
                *a,
                *b,
                phi_field,
                OneForm::new(eta),
                VectorField::new(xi),
            )
            .map_err(|e| ConfigError(format!("quadratic structure: {e}")))?;
            Ok(Target::QuadraticPhi {
                chart,
                structure,
                metric_compatible: *metric_compatible,
                associated_constants: *associated_constants,
            })
        }
        TargetConfig::Warped {
            fiber,
            fiber_structure,
            warping,
            base_coord,
            base_interval,
            beta,
        } => {
            let fiber_chart = build_manifold(fiber)?;
            let structure = fiber_structure
                .as_ref()
                .map(|s| build_structure(s, &fiber_chart))
                .transpose()?;
            let base_names = [base_coord.clone()];
            let warping = parse_expr(warping, &base_names, "warping")?;
            let beta = beta
                .as_ref()
                .map(|b| parse_expr(b, &base_names, "beta"))
                .transpose()?;
            let product = WarpedProduct::new(
                fiber_chart,
                structure,
                warping,
                base_coord.clone(),
                (base_interval[0], base_interval[1]),
            )
            .map_err(|e| ConfigError(format!("warped product: {e}")))?;
            Ok(Target::Warped { product, beta })
        }
        TargetConfig::Hypersurface {
            ambient,
            structure,
            embedding,
            params,
            param_box,
            orientation,
            beta,
        } => {
            let ambient_chart = build_manifold(ambient)?;
            let structure = build_structure(structure, &ambient_chart)?;
            let embedding = embedding
                .iter()
                .map(|s| parse_expr(s, params, "embedding"))
                .collect::<ConfigResult<Vec<_>>>()?;
            let boxes = param_box.iter().map(|b| (b[0], b[1])).collect();
            let surface = Hypersurface::new(
                ambient_chart,
                structure,
                embedding,
                params.clone(),
                boxes,
                *orientation,
            )
            .map_err(|e| ConfigError(format!("hypersurface: {e}")))?;
            Ok(Target::Hypersurface {
                surface,
                beta: *beta,
            })
        }
    }
}
