//! TOML run configuration: parsing, validation, overrides and hashing.

use degenlab::field::{CoefficientField, Perturbation, PerturbationMatrix, Profile};
use degenlab::geometry::{DegenerateEnds, DomainSpec, LayerSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Effective run configuration. Serializing it back (minus the output path)
/// is the canonical form hashed into every CSV row.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Significant digits for floats in the CSV output.
    #[serde(default = "default_precision")]
    pub precision: usize,
    /// Output CSV path; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<CoefficientBlock>,
    #[serde(default)]
    pub layer: LayerBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub evolution: EvolutionBlock,
    #[serde(default)]
    pub mollifier: MollifierBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
}

fn default_precision() -> usize {
    12
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    /// One of interval | punctured | ball_interior | ball_exterior |
    /// product | lattice.
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Interval endpoints; default [0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<f64>,
    /// Degenerate interval ends: left | right | both (default left).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ends: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_radius: Option<f64>,
}

impl DomainBlock {
    pub fn build(&self) -> Result<DomainSpec<f64>, CliError> {
        let dim = || {
            self.dim.ok_or_else(|| {
                CliError::config(format!("domain.dim is required for variant `{}`", self.variant))
            })
        };
        let spec = match self.variant.as_str() {
            "interval" => {
                let ends = match self.ends.as_deref().unwrap_or("left") {
                    "left" => DegenerateEnds::Left,
                    "right" => DegenerateEnds::Right,
                    "both" => DegenerateEnds::Both,
                    other => {
                        return Err(CliError::config(format!(
                            "domain.ends: unknown value `{other}` (expected left|right|both)"
                        )))
                    }
                };
                DomainSpec::interval(self.left.unwrap_or(0.0), self.right.unwrap_or(1.0), ends)
            }
            "punctured" => DomainSpec::punctured(dim()?),
            "ball_interior" => DomainSpec::ball_interior(dim()?, self.radius.unwrap_or(1.0)),
            "ball_exterior" => DomainSpec::ball_exterior(dim()?, self.radius.unwrap_or(1.0)),
            "product" => {
                let sub = self.subspace_dim.ok_or_else(|| {
                    CliError::config("domain.subspace_dim is required for variant `product`")
                })?;
                DomainSpec::convex_exterior_product(dim()?, sub, self.obstacle_radius.unwrap_or(1.0))
            }
            "lattice" => DomainSpec::lattice_complement(dim()?, self.spacing.unwrap_or(1.0)),
            other => {
                return Err(CliError::config(format!(
                    "domain.variant: unknown value `{other}` (expected interval|punctured|\
                     ball_interior|ball_exterior|product|lattice)"
                )))
            }
        };
        Ok(spec?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientBlock {
    /// Degeneracy exponent of the boundary-distance power.
    pub delta: f64,
    /// Constant profile value; ignored when `coeffs` is set.
    #[serde(default = "default_profile_value")]
    pub a: f64,
    /// Polynomial profile in the boundary distance, lowest degree first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    /// Declared profile bounds; default to the profile's values at the
    /// boundary and at unit distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Isotropic perturbation `scale * d^(delta+gamma) I`; both fields or
    /// neither.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_scale: Option<f64>,
}

fn default_profile_value() -> f64 {
    1.0
}

impl CoefficientBlock {
    pub fn build(&self) -> Result<CoefficientField<f64>, CliError> {
        let (profile, mu0, lambda0) = match &self.coeffs {
            None => (Profile::Constant(self.a), self.a, self.a),
            Some(c) => {
                if c.is_empty() {
                    return Err(CliError::config("coefficient.coeffs must be nonempty"));
                }
                let at0 = c[0];
                let at1: f64 = c.iter().sum();
                (Profile::RadialPolynomial { coeffs: c.clone() }, at0.min(at1), at0.max(at1))
            }
        };
        let mu = self.mu.unwrap_or(mu0);
        let lambda = self.lambda.unwrap_or(lambda0);
        let perturbation = match (self.perturbation_gamma, self.perturbation_scale) {
            (None, None) => None,
            (Some(gamma), Some(scale)) => {
                Some(Perturbation { matrix: PerturbationMatrix::Identity { scale }, gamma })
            }
            _ => {
                return Err(CliError::config(
                    "perturbation needs both perturbation_gamma and perturbation_scale",
                ))
            }
        };
        Ok(CoefficientField::new(self.delta, profile, mu, lambda, perturbation, mu)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayerBlock {
    /// Outer layer width.
    pub r: f64,
    /// Inner layer offset (cutoffs transition over `[s, r]`).
    pub s: f64,
    /// Layer sample count for geometric and condition probes.
    pub samples: usize,
    /// Threshold below which a condition supremum counts as vanished.
    pub tol: f64,
}

impl Default for LayerBlock {
    fn default() -> Self {
        LayerBlock { r: 0.5, s: 0.0, samples: 400, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    /// Inner truncation radius.
    pub epsilon: f64,
    pub cells: usize,
    /// Mesh grading exponent toward the degenerate end.
    pub grading: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock { epsilon: 1e-4, cells: 256, grading: 2.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionBlock {
    pub dt: f64,
    pub t_final: f64,
    /// implicit_euler | crank_nicolson.
    pub scheme: String,
    /// Endpoint conditions, inner first: dirichlet_dirichlet |
    /// dirichlet_neumann | neumann_neumann.
    pub bc: String,
    /// Truncation ladder for the mass-conservation scan target.
    pub ladder: Vec<f64>,
}

impl Default for EvolutionBlock {
    fn default() -> Self {
        EvolutionBlock {
            dt: 1e-3,
            t_final: 0.1,
            scheme: "implicit_euler".into(),
            bc: "dirichlet_neumann".into(),
            ladder: vec![1e-2, 1e-3, 1e-4],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollifierBlock {
    /// Cutoff sharpness indices.
    pub n: Vec<u32>,
}

impl Default for MollifierBlock {
    fn default() -> Self {
        MollifierBlock { n: vec![10, 100, 1000, 10000] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    /// classify | weyl | deficiency | hardy | rellich | mass.
    #[serde(default = "default_scan_target")]
    pub target: String,
    /// delta | epsilon | cells | r.
    pub parameter: String,
    pub values: Vec<f64>,
}

fn default_scan_target() -> String {
    "classify".into()
}

const SCAN_TARGETS: &[&str] = &["classify", "weyl", "deficiency", "hardy", "rellich", "mass"];
const SCAN_PARAMETERS: &[&str] = &["delta", "epsilon", "cells", "r"];

impl ScanBlock {
    fn validate(&self) -> Result<(), CliError> {
        if !SCAN_TARGETS.contains(&self.target.as_str()) {
            return Err(CliError::config(format!(
                "scan.target: unknown value `{}` (expected {})",
                self.target,
                SCAN_TARGETS.join("|")
            )));
        }
        if !SCAN_PARAMETERS.contains(&self.parameter.as_str()) {
            return Err(CliError::config(format!(
                "scan.parameter: unknown value `{}` (expected {})",
                self.parameter,
                SCAN_PARAMETERS.join("|")
            )));
        }
        if self.values.is_empty() {
            return Err(CliError::config("scan.values must be nonempty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("scan.values must all be finite"));
        }
        if self.values.windows(2).any(|w| w[0] > w[1]) {
            return Err(CliError::config("scan.values must be sorted ascending"));
        }
        Ok(())
    }
}

impl RunConfig {
    /// Parses the config text, applies `field=value` overrides onto the raw
    /// TOML tree, then deserializes and validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut tree: toml::Value = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::config(format!("config parse error: {e}")))?;
        for ov in overrides {
            apply_override(&mut tree, ov)?;
        }
        let cfg: RunConfig = tree
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(format!("config field error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=17).contains(&self.precision) {
            return Err(CliError::config("precision must lie in 1..=17"));
        }
        if let Some(scan) = &self.scan {
            scan.validate()?;
        }
        Ok(())
    }

    /// 12-hex digest of the re-serialized effective configuration. The
    /// output path is excluded, so the same computation hashes identically
    /// wherever it is written.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        let text = toml::to_string(&canonical).expect("effective config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn domain(&self) -> Result<&DomainBlock, CliError> {
        self.domain.as_ref().ok_or_else(|| CliError::config("missing [domain] block"))
    }

    pub fn coefficient(&self) -> Result<&CoefficientBlock, CliError> {
        self.coefficient.as_ref().ok_or_else(|| CliError::config("missing [coefficient] block"))
    }

    pub fn scan(&self) -> Result<&ScanBlock, CliError> {
        self.scan.as_ref().ok_or_else(|| CliError::config("missing [scan] block"))
    }

    pub fn build_domain(&self) -> Result<DomainSpec<f64>, CliError> {
        self.domain()?.build()
    }

    pub fn build_field(&self) -> Result<CoefficientField<f64>, CliError> {
        self.coefficient()?.build()
    }

    pub fn build_layer(&self) -> Result<LayerSpec<f64>, CliError> {
        Ok(LayerSpec::new(self.layer.r, self.layer.s)?)
    }

    /// Copy of the config with one scanned parameter replaced.
    pub fn with_parameter(&self, parameter: &str, value: f64) -> Result<Self, CliError> {
        let mut cfg = self.clone();
        match parameter {
            "delta" => {
                cfg.coefficient
                    .as_mut()
                    .ok_or_else(|| CliError::config("missing [coefficient] block"))?
                    .delta = value;
            }
            "epsilon" => cfg.grid.epsilon = value,
            "cells" => {
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(CliError::config("scan over cells needs integer values >= 2"));
                }
                cfg.grid.cells = value as usize;
            }
            "r" => cfg.layer.r = value,
            other => return Err(CliError::config(format!("unknown scan parameter `{other}`"))),
        }
        Ok(cfg)
    }
}

/// Applies one `path.to.field=value` override onto the parsed TOML tree.
/// The value text is itself parsed as TOML, so numbers, booleans and arrays
/// work directly; anything that does not parse is taken as a bare string.
fn apply_override(root: &mut toml::Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override `{spec}` is not of the form field=value")))?;
    let parsed = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed override has the probe key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(format!("override path `{path}` has an empty segment")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        node = node
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("override path `{path}` crosses a scalar")))?
            .entry(part.to_string())
            .or_insert(toml::Value::Table(toml::Table::new()));
    }
    node.as_table_mut()
        .ok_or_else(|| CliError::config(format!("override path `{path}` crosses a scalar")))?
        .insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}
