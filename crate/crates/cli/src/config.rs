//! Scenario files. A scenario is a TOML document with a `kind`, a
//! `[parameters]` table whose schema depends on the kind, and an optional
//! `[numerics]` table. Unknown keys are rejected everywhere.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use specbound_core::profiles::{FieldProfile, PotentialProfile};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Threshold,
    OptimizeSplit,
    Pauli,
    Dirac,
    AharonovBohm,
    MillerSimon,
    WignerVonNeumann,
    CustomChannel,
    VirialBench,
    GaugeAudit,
    KatoAudit,
    WeylAudit,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::Threshold,
        Kind::OptimizeSplit,
        Kind::Pauli,
        Kind::Dirac,
        Kind::AharonovBohm,
        Kind::MillerSimon,
        Kind::WignerVonNeumann,
        Kind::CustomChannel,
        Kind::VirialBench,
        Kind::GaugeAudit,
        Kind::KatoAudit,
        Kind::WeylAudit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Threshold => "threshold",
            Kind::OptimizeSplit => "optimize_split",
            Kind::Pauli => "pauli",
            Kind::Dirac => "dirac",
            Kind::AharonovBohm => "aharonov_bohm",
            Kind::MillerSimon => "miller_simon",
            Kind::WignerVonNeumann => "wigner_von_neumann",
            Kind::CustomChannel => "custom_channel",
            Kind::VirialBench => "virial_bench",
            Kind::GaugeAudit => "gauge_audit",
            Kind::KatoAudit => "kato_audit",
            Kind::WeylAudit => "weyl_audit",
        }
    }

    /// The result each kind exercises.
    pub fn anchor(&self) -> &'static str {
        match self {
            Kind::Threshold => "threshold Λ(β, ω₁, ω₂) of the absence theorem",
            Kind::OptimizeSplit => "bang-bang lemma for the splitting V₁ = sV",
            Kind::Pauli => "Pauli corollary, Λ_P = min{4β², Λ(β, ω, ω)}",
            Kind::Dirac => "Dirac corollary, eigenvalues in [-√(Λ_P + m²), √(Λ_P + m²)]",
            Kind::AharonovBohm => "Aharonov–Bohm example, threshold with β = 0",
            Kind::MillerSimon => "Miller–Simon example, a.c. spectrum from b₀²",
            Kind::WignerVonNeumann => {
                "Wigner–von Neumann example, embedded eigenvalue +1 and Λ = 8"
            }
            Kind::CustomChannel => "partial-wave reduction of a radial field",
            Kind::VirialBench => "magnetic virial theorem",
            Kind::GaugeAudit => "Poincaré gauge and its transversality",
            Kind::KatoAudit => "Kato class norm and relative form bounds",
            Kind::WeylAudit => "Weyl-type vanishing of the field at infinity",
        }
    }

    pub fn schema(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            Kind::Threshold => &[
                (
                    "beta, omega1, omega2",
                    "numbers; each may instead be estimated from a profile",
                ),
                ("field", "field profile estimating β (optional)"),
                (
                    "v1",
                    "potential profile estimating ω₁ = limsup |x||V₁| (optional)",
                ),
                (
                    "v2",
                    "potential profile estimating ω₂ = limsup (x·∇V₂)₊ (optional)",
                ),
                ("dim", "dimension for potential estimates, default 3"),
                ("expect_lambda, expect_tol", "optional check on Λ"),
            ],
            Kind::OptimizeSplit => &[("beta, omega1, omega2", "numbers")],
            Kind::Pauli => &[("beta, omega", "numbers")],
            Kind::Dirac => &[("beta, omega, mass", "numbers")],
            Kind::AharonovBohm => &[
                ("b0", "flux"),
                ("m", "list of angular momenta"),
                ("omega1, omega2", "numbers, default 0"),
                ("potential", "potential profile (optional)"),
                ("window", "[lower, upper] eigenvalue window"),
            ],
            Kind::MillerSimon => &[
                ("b0", "field strength of b(r) = b0 r^{-alpha}"),
                ("alpha", "decay exponent, default 1"),
                ("m", "list of angular momenta"),
                ("window", "[lower, upper] eigenvalue window"),
                (
                    "continuum_window",
                    "optional window above b0² whose eigenvalues must all be spurious",
                ),
            ],
            Kind::WignerVonNeumann => &[
                ("window", "[lower, upper], default [0.9, 1.1]"),
                ("recheck_r_max", "optional larger box for the drift check"),
            ],
            Kind::CustomChannel => &[
                ("reduction", "\"planar\" or \"bare\""),
                ("m", "angular momentum (planar)"),
                ("field", "field profile giving h(r) (planar)"),
                ("potential", "potential profile"),
                ("window", "[lower, upper]"),
                ("threshold", "optional Λ; genuine eigenvalues above it fail"),
            ],
            Kind::VirialBench => &[
                ("field", "field profile"),
                ("potential", "potential profile"),
                ("sigma", "width of the Gaussian test state"),
                ("center", "[x, y], default origin"),
                ("momentum", "[kx, ky] plane-wave phase, default 0"),
                (
                    "min_slope, max_residual",
                    "verdict levels, default 1.5 and 1e-2",
                ),
            ],
            Kind::GaugeAudit => &[
                ("field", "field profile"),
                ("extent", "half width of the sample box"),
                ("samples", "sample count, default 1000"),
            ],
            Kind::KatoAudit => &[
                ("potential", "potential profile"),
                ("dim", "2 or 3"),
                ("expect_norm, expect_tol", "optional check on the norm"),
            ],
            Kind::WeylAudit => &[
                ("field", "field profile"),
                ("centers", "\"origin\" or \"squared\" (|x_n| = R_n²)"),
                (
                    "expect_exponent, exponent_tol",
                    "optional check on the growth exponent of C_n",
                ),
                ("vanishing", "if true, C_n must decrease monotonically"),
            ],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Discretization and quadrature controls shared by all kinds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(rename = "R_max")]
    pub r_max: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub quad_nodes: Option<usize>,
    /// radii of the tail shells
    pub shells: Option<Vec<f64>>,
    /// samples per shell
    pub shell_samples: Option<usize>,
    #[serde(rename = "L")]
    pub grid_l: Option<f64>,
    pub h: Option<f64>,
    pub t_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: Kind,
    #[serde(default)]
    parameters: toml::Table,
    #[serde(default)]
    numerics: Numerics,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub kind: Kind,
    pub parameters: toml::Table,
    pub numerics: Numerics,
    #[serde(skip)]
    pub params: Parameters,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    pub beta: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub field: Option<FieldProfile>,
    pub v1: Option<PotentialProfile>,
    pub v2: Option<PotentialProfile>,
    pub dim: Option<usize>,
    pub expect_lambda: Option<f64>,
    pub expect_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitParams {
    pub beta: f64,
    pub omega1: f64,
    pub omega2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliParams {
    pub beta: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracParams {
    pub beta: f64,
    pub omega: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AharonovBohmParams {
    pub b0: f64,
    pub m: Vec<i64>,
    #[serde(default)]
    pub omega1: f64,
    #[serde(default)]
    pub omega2: f64,
    pub potential: Option<PotentialProfile>,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MillerSimonParams {
    pub b0: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    pub m: Vec<i64>,
    pub window: [f64; 2],
    pub continuum_window: Option<[f64; 2]>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerVonNeumannParams {
    #[serde(default = "wvn_window")]
    pub window: [f64; 2],
    pub recheck_r_max: Option<f64>,
}

fn wvn_window() -> [f64; 2] {
    [0.9, 1.1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    Planar,
    Bare,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomChannelParams {
    pub reduction: ReductionKind,
    #[serde(default)]
    pub m: i64,
    pub field: Option<FieldProfile>,
    pub potential: Option<PotentialProfile>,
    pub window: [f64; 2],
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirialBenchParams {
    pub field: FieldProfile,
    pub potential: PotentialProfile,
    pub sigma: f64,
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default)]
    pub momentum: [f64; 2],
    #[serde(default = "min_slope")]
    pub min_slope: f64,
    #[serde(default = "max_residual")]
    pub max_residual: f64,
}

fn min_slope() -> f64 {
    1.5
}

fn max_residual() -> f64 {
    1e-2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeAuditParams {
    pub field: FieldProfile,
    pub extent: f64,
    #[serde(default = "thousand")]
    pub samples: usize,
}

fn thousand() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatoAuditParams {
    pub potential: PotentialProfile,
    pub dim: usize,
    pub expect_norm: Option<f64>,
    pub expect_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterRule {
    Origin,
    Squared,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylAuditParams {
    pub field: FieldProfile,
    pub centers: CenterRule,
    pub expect_exponent: Option<f64>,
    pub exponent_tol: Option<f64>,
    #[serde(default)]
    pub vanishing: bool,
}

#[derive(Debug, Clone)]
pub enum Parameters {
    Threshold(ThresholdParams),
    OptimizeSplit(SplitParams),
    Pauli(PauliParams),
    Dirac(DiracParams),
    AharonovBohm(AharonovBohmParams),
    MillerSimon(MillerSimonParams),
    WignerVonNeumann(WignerVonNeumannParams),
    CustomChannel(CustomChannelParams),
    VirialBench(VirialBenchParams),
    GaugeAudit(GaugeAuditParams),
    KatoAudit(KatoAuditParams),
    WeylAudit(WeylAuditParams),
}

fn typed<T: DeserializeOwned>(table: &toml::Table) -> Result<T, CliError> {
    T::deserialize(table.clone())
        .map_err(|e| CliError::Config(format!("in [parameters]: {}", e.message())))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let p = &raw.parameters;
        let params = match raw.kind {
            Kind::Threshold => Parameters::Threshold(typed(p)?),
            Kind::OptimizeSplit => Parameters::OptimizeSplit(typed(p)?),
            Kind::Pauli => Parameters::Pauli(typed(p)?),
            Kind::Dirac => Parameters::Dirac(typed(p)?),
            Kind::AharonovBohm => Parameters::AharonovBohm(typed(p)?),
            Kind::MillerSimon => Parameters::MillerSimon(typed(p)?),
            Kind::WignerVonNeumann => Parameters::WignerVonNeumann(typed(p)?),
            Kind::CustomChannel => Parameters::CustomChannel(typed(p)?),
            Kind::VirialBench => Parameters::VirialBench(typed(p)?),
            Kind::GaugeAudit => Parameters::GaugeAudit(typed(p)?),
            Kind::KatoAudit => Parameters::KatoAudit(typed(p)?),
            Kind::WeylAudit => Parameters::WeylAudit(typed(p)?),
        };
        Ok(Self {
            kind: raw.kind,
            parameters: raw.parameters,
            numerics: raw.numerics,
            params,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_threshold() {
        let c = ScenarioConfig::parse(
            "kind = \"threshold\"\n[parameters]\nbeta = 0.0\nomega1 = 0.0\nomega2 = 16.0\n",
        )
        .unwrap();
        assert_eq!(c.kind, Kind::Threshold);
        assert!(matches!(
            c.params,
            Parameters::Threshold(ThresholdParams {
                omega2: Some(16.0),
                ..
            })
        ));
    }

    #[test]
    fn missing_key_is_named() {
        let err =
            ScenarioConfig::parse("kind = \"pauli\"\n[parameters]\nomega = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ScenarioConfig::parse(
            "kind = \"pauli\"\n[parameters]\nbeta = 1.0\nomega = 1.0\nextra = 2\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
        let err = ScenarioConfig::parse("kind = \"pauli\"\nflavor = 1\n").unwrap_err();
        assert!(err.to_string().contains("flavor"), "{err}");
        let err = ScenarioConfig::parse("kind = \"pauli\"\n[numerics]\nRmax = 3\n").unwrap_err();
        assert!(err.to_string().contains("Rmax"), "{err}");
        assert!(ScenarioConfig::parse("kind = \"nonsense\"\n").is_err());
    }

    #[test]
    fn profiles_in_parameters() {
        let c = ScenarioConfig::parse(
            "kind = \"gauge_audit\"\n[parameters]\nfield = { type = \"gaussian\", amplitude = 1.0, width = 1.0 }\nextent = 3.0\n",
        )
        .unwrap();
        let Parameters::GaugeAudit(p) = c.params else {
            panic!()
        };
        assert_eq!(p.samples, 1000);
        assert_eq!(
            p.field,
            FieldProfile::Gaussian {
                amplitude: 1.0,
                width: 1.0
            }
        );
    }

    #[test]
    fn shipped_scenarios_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
        let mut kinds = vec![];
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let c =
                ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            kinds.push(c.kind.name());
        }
        kinds.sort();
        let mut all: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
        all.sort();
        assert_eq!(kinds, all);
    }
}
