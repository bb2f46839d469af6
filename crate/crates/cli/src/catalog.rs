//! Built-in example catalog: every bundled config, by name.

use crate::config::{parse_config, ConfigError, ConfigResult, VerificationConfig};

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "dk_r4",
        description: "almost quadratic phi-structure on R^4 (a = 4, b = 5) with spectral and associated-metric checks",
        json: include_str!("../configs/dk_r4.json"),
    },
    CatalogEntry {
        name: "golden_r2",
        description: "flat plane with the diagonal golden structure diag(sigma, sigma-bar)",
        json: include_str!("../configs/golden_r2.json"),
    },
    CatalogEntry {
        name: "metallic_rnm",
        description: "flat R^{2+2} with J = diag(sigma, sigma, sigma-bar, sigma-bar)",
        json: include_str!("../configs/metallic_rnm.json"),
    },
    CatalogEntry {
        name: "warped_exp",
        description: "exponentially warped product over the flat golden plane (beta = -1)",
        json: include_str!("../configs/warped_exp.json"),
    },
    CatalogEntry {
        name: "warped_cosh_sphere",
        description: "cosh-warped product over the metallic-radius sphere (beta = -tanh t)",
        json: include_str!("../configs/warped_cosh_sphere.json"),
    },
    CatalogEntry {
        name: "cosymplectic_product",
        description: "unwarped product over flat golden R^3 (beta = 0, cosymplectic)",
        json: include_str!("../configs/cosymplectic_product.json"),
    },
    CatalogEntry {
        name: "line_golden",
        description: "golden line in the flat plane: totally geodesic hypersurface with an exact frame",
        json: include_str!("../configs/line_golden.json"),
    },
    CatalogEntry {
        name: "cone_golden",
        description: "constant-angle golden cone in flat R^3: frame holds everywhere, xi along the rulings",
        json: include_str!("../configs/cone_golden.json"),
    },
    CatalogEntry {
        name: "plane",
        description: "coordinate plane in flat R^3 with a non-diagonal golden structure",
        json: include_str!("../configs/plane.json"),
    },
    CatalogEntry {
        name: "sphere_metallic_shaped",
        description: "sphere of metallic radius whose shape operator is sigma I",
        json: include_str!("../configs/sphere_metallic_shaped.json"),
    },
    CatalogEntry {
        name: "warped_broken",
        description: "negative fixture: pointwise-metallic but non-parallel fiber (expected failures)",
        json: include_str!("../configs/warped_broken.json"),
    },
];

pub fn lookup(name: &str) -> ConfigResult<VerificationConfig> {
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            let names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
            ConfigError(format!(
                "unknown example `{name}` (available: {})",
                names.join(", ")
            ))
        })?;
    parse_config(entry.json)
}

pub fn listing() -> String {
    let mut out = String::new();
    for entry in CATALOG {
        out.push_str(&format!("{:<24} {}\n", entry.name, entry.description));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_at_least_ten_entries() {
        assert!(CATALOG.len() >= 10);
    }

    #[test]
    fn every_bundled_config_parses_and_builds() {
        for entry in CATALOG {
            let config = lookup(entry.name).unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            crate::config::build_target(&config.target)
                .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            assert!(!config.checks.is_empty(), "{}", entry.name);
        }
    }

    #[test]
    fn unknown_example_is_reported() {
        assert!(lookup("no_such_example").is_err());
    }
}
