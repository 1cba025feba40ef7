//! Experiment manifest: one TOML file with `source`, `targets`, `sweep`,
//! `checks` and `output` sections. The full schema is documented in
//! `brenier sweep --help` and the README; two builtin presets
//! (`sharpness-1d`, `gn-sharpness`) need no file at all.

use brenier::geometry::ConvexDomain;
use brenier::measures::{DiscreteMeasure, GridDensity};
use brenier::num::Point;
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("config io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse: {0}")]
    Parse(#[from] toml::de::Error),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: SourceCfg,
    #[serde(default)]
    pub targets: TargetsCfg,
    #[serde(default)]
    pub sweep: SweepCfg,
    #[serde(default)]
    pub checks: ChecksCfg,
    #[serde(default)]
    pub output: OutputCfg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceCfg {
    /// interval | box | polygon | ball
    pub kind: String,
    /// interval: [a, b]; box: [x0, y0, x1, y1]; polygon: flat x,y vertex
    /// list; ball: [cx, cy, r]
    pub params: Vec<f64>,
    /// uniform | affine | piecewise
    #[serde(default = "default_density")]
    pub density: String,
    /// affine: [a, b] for a + b·x1 in 1D, [a, b, c] for a + b·x1 + c·x2;
    /// piecewise (1D): k breakpoints followed by k+1 plateau values
    #[serde(default)]
    pub density_params: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_density() -> String {
    "uniform".into()
}

fn default_resolution() -> usize {
    512
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TargetsCfg {
    /// shift | dilation | random-atoms | files
    #[serde(default)]
    pub family: String,
    #[serde(default = "default_atoms")]
    pub atoms: usize,
    #[serde(default)]
    pub files: Vec<String>,
}

fn default_atoms() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// instance count for the random-atoms family
    #[serde(default)]
    pub instances: usize,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ChecksCfg {
    /// check ids, or ["all"]
    #[serde(default)]
    pub run: Vec<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub svg: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(64..=4096).contains(&self.source.resolution) {
            return invalid(format!(
                "resolution must lie in [64, 4096], got {}",
                self.source.resolution
            ));
        }
        match self.targets.family.as_str() {
            "" => {}
            "shift" | "dilation" | "random-atoms" => {
                if self.sweep.epsilons.is_empty() && self.sweep.instances == 0 {
                    return invalid("sweep grid is empty");
                }
            }
            "files" => {
                if self.targets.files.is_empty() {
                    return invalid("targets.family = files needs at least one file");
                }
                for f in &self.targets.files {
                    if !Path::new(f).exists() {
                        return invalid(format!("target file `{f}` does not exist"));
                    }
                }
            }
            other => return invalid(format!("unknown target family `{other}`")),
        }
        Ok(())
    }

    /// Builds the source density, with an optional resolution override
    /// from the command line.
    pub fn build_source(&self, resolution: Option<usize>) -> Result<GridDensity, ConfigError> {
        let res = resolution.unwrap_or(self.source.resolution);
        if !(64..=4096).contains(&res) {
            return invalid(format!("resolution must lie in [64, 4096], got {res}"));
        }
        let p = &self.source.params;
        let domain = match self.source.kind.as_str() {
            "interval" => {
                if p.len() != 2 {
                    return invalid("interval needs params = [a, b]");
                }
                ConvexDomain::interval(p[0], p[1])
            }
            "box" => {
                if p.len() != 4 {
                    return invalid("box needs params = [x0, y0, x1, y1]");
                }
                ConvexDomain::box2([p[0], p[1]], [p[2], p[3]])
            }
            "polygon" => {
                if p.len() < 6 || !p.len().is_multiple_of(2) {
                    return invalid("polygon needs a flat list of at least 3 x,y pairs");
                }
                let verts: Vec<Point> = p.chunks(2).map(|c| [c[0], c[1]]).collect();
                ConvexDomain::polygon(verts)
            }
            "ball" => {
                if p.len() != 3 {
                    return invalid("ball needs params = [cx, cy, r]");
                }
                ConvexDomain::ball([p[0], p[1]], p[2])
            }
            other => return invalid(format!("unknown source kind `{other}`")),
        }
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let dp = self.source.density_params.clone();
        let density: Box<dyn Fn(Point) -> f64> = match self.source.density.as_str() {
            "uniform" => Box::new(|_| 1.0),
            "affine" => {
                if dp.len() < 2 || dp.len() > 3 {
                    return invalid("affine density needs density_params = [a, b] or [a, b, c]");
                }
                let (a, b, c) = (dp[0], dp[1], dp.get(2).copied().unwrap_or(0.0));
                Box::new(move |x: Point| a + b * x[0] + c * x[1])
            }
            "piecewise" => {
                if dp.len() < 3 || dp.len().is_multiple_of(2) {
                    return invalid(
                        "piecewise density needs k breakpoints then k+1 values (odd count)",
                    );
                }
                let k = dp.len() / 2;
                let breaks = dp[..k].to_vec();
                let values = dp[k..].to_vec();
                if breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("piecewise breakpoints must be strictly increasing");
                }
                Box::new(move |x: Point| {
                    let idx = breaks.iter().take_while(|&&b| x[0] >= b).count();
                    values[idx]
                })
            }
            other => return invalid(format!("unknown density `{other}`")),
        };
        GridDensity::with_density(domain, res, density)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Reads one discrete target measure from a CSV file.
    pub fn load_measure(path: &Path, dim: usize) -> Result<DiscreteMeasure, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        DiscreteMeasure::from_csv_str(&text, dim).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            [source]
            kind = "interval"
            params = [0.0, 1.0]

            [targets]
            family = "shift"
            atoms = 100

            [sweep]
            epsilons = [0.05, 0.1]
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        let rho = cfg.build_source(None).unwrap();
        assert_eq!(rho.dim(), 1);
        assert_eq!(rho.resolution(), 512);
    }

    #[test]
    fn rejects_bad_resolution_and_empty_sweep() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            [source]
            kind = "interval"
            params = [0.0, 1.0]
            resolution = 10
            "#,
        )
        .unwrap();
        assert!(cfg.validate().is_err());

        let cfg: ExperimentConfig = toml::from_str(
            r#"
            [source]
            kind = "interval"
            params = [0.0, 1.0]

            [targets]
            family = "shift"
            "#,
        )
        .unwrap();
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn affine_and_piecewise_densities() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            [source]
            kind = "interval"
            params = [0.0, 1.0]
            density = "affine"
            density_params = [0.5, 1.0]
            resolution = 128
            "#,
        )
        .unwrap();
        let rho = cfg.build_source(None).unwrap();
        let (lo, hi) = rho.density_bounds();
        assert!(lo > 0.4 && hi < 1.6);

        let cfg: ExperimentConfig = toml::from_str(
            r#"
            [source]
            kind = "interval"
            params = [0.0, 1.0]
            density = "piecewise"
            density_params = [0.5, 1.0, 3.0]
            resolution = 128
            "#,
        )
        .unwrap();
        let rho = cfg.build_source(None).unwrap();
        let (lo, hi) = rho.density_bounds();
        assert!((hi / lo - 3.0).abs() < 1e-12);
    }

    #[test]
    fn box_source_2d() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            [source]
            kind = "box"
            params = [0.0, 0.0, 1.0, 1.0]
            resolution = 64
            "#,
        )
        .unwrap();
        let rho = cfg.build_source(None).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!((rho.total_mass() - 1.0).abs() < 1e-10);
    }
}
