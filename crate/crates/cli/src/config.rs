//! Scenario files.
//!
//! ```toml
//! units = "absolute"          # or "omega0": frequencies in units of omega0, times in 1/omega0
//!
//! [system]
//! omega0 = 1.0                # cavity and atomic transition frequency
//! coupling = 0.05             # vacuum Rabi coupling Omega
//! n_max = 3                   # highest retained excitation number
//!
//! [bath]                      # required by microscopic generators
//! temperature = 0.0           # k_B T, frequency units
//! lamb_shift = { policy = "zero" }
//! spectrum = { kind = "flat", j0 = 0.0016, cutoff = 10.0 }
//!
//! [generator]
//! kind = "quasi_rwa"          # phenom_bare | phenom_dressed | secular_rwa | quasi_rwa
//! gamma = 0.01                # cavity loss rate, phenomenological kinds only
//!
//! [initial]
//! type = "bare"               # bare | dressed | mixture
//! photons = 0
//! atom = "e"
//!
//! [evolution]
//! t_end = 500.0
//! dt = 0.01                   # optional
//! record_every = 10
//!
//! [output]
//! dir = "out"
//! prefix = "run_"
//! ```

use std::path::{Path, PathBuf};

use jc_core::bath::{BathModel, LambShiftPolicy, SpectralModel};
use jc_core::generators::{self, GeneratorKind, Liouvillian};
use jc_core::{Atom, BareState, DensityMatrix, DressedBasis, DressedLabel, IntegratorConfig, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Absolute,
    Omega0,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega0: f64,
    pub coupling: f64,
    pub n_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub temperature: f64,
    #[serde(default)]
    pub lamb_shift: LambShiftPolicy,
    pub spectrum: SpectralModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: GeneratorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Bare { photons: usize, atom: Atom },
    /// `label` is `E0`, or `<N>+` / `<N>-`.
    Dressed { label: String },
    Mixture { components: Vec<MixtureComponent> },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Bare {
            photons: 0,
            atom: Atom::Excited,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub state: PureState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PureState {
    Bare { photons: usize, atom: Atom },
    Dressed { label: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub prefix: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            prefix: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Dotted path of a numeric scenario field, e.g. `bath.temperature`, or
    /// `gamma_over_4omega` to set `generator.gamma = 4 Omega x`.
    pub axis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeSpec>,
    pub metrics: Vec<String>,
}

impl SweepSection {
    pub fn axis_values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, &self.range) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some(r)) => Ok(jc_core::analysis::linspace(r.start, r.stop, r.count)),
            (None, None) => Ok(Vec::new()),
            (Some(_), Some(_)) => Err(CliError::config("sweep: give either `values` or `range`, not both")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub units: Units,
    pub system: SystemSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathSection>,
    pub generator: GeneratorSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

fn scale_spectrum(s: SpectralModel, w: f64) -> SpectralModel {
    match s {
        SpectralModel::Flat { j0, cutoff } => SpectralModel::Flat {
            j0: j0 * w,
            cutoff: cutoff * w,
        },
        // eta is dimensionless
        SpectralModel::Ohmic { eta, omega_c } => SpectralModel::Ohmic {
            eta,
            omega_c: omega_c * w,
        },
        SpectralModel::Lorentzian {
            strength,
            center,
            width,
        } => SpectralModel::Lorentzian {
            strength: strength * w,
            center: center * w,
            width: width * w,
        },
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("invalid scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// The same scenario expressed in absolute units.
    pub fn resolved(&self) -> Scenario {
        let mut s = self.clone();
        if s.units == Units::Absolute {
            return s;
        }
        let w = s.system.omega0;
        s.units = Units::Absolute;
        s.system.coupling *= w;
        if let Some(b) = &mut s.bath {
            b.temperature *= w;
            b.spectrum = scale_spectrum(b.spectrum, w);
            if let LambShiftPolicy::PrincipalValue { epsilon, tolerance } = b.lamb_shift {
                b.lamb_shift = LambShiftPolicy::PrincipalValue {
                    epsilon: epsilon * w,
                    tolerance: tolerance * w,
                };
            }
        }
        if let Some(g) = &mut s.generator.gamma {
            *g *= w;
        }
        if let Some(e) = &mut s.evolution {
            e.t_end /= w;
            if let Some(dt) = &mut e.dt {
                *dt /= w;
            }
        }
        s
    }

    pub fn params(&self) -> Result<SystemParams, CliError> {
        let s = self.resolved().system;
        SystemParams::new(s.omega0, s.coupling, s.n_max).map_err(|e| CliError::field("system", e))
    }

    pub fn bath(&self) -> Result<Option<BathModel>, CliError> {
        self.resolved()
            .bath
            .map(|b| {
                BathModel::new(b.spectrum, b.temperature)
                    .map(|m| m.with_lamb_shift(b.lamb_shift))
                    .and_then(|m| m.validate().map(|_| m))
                    .map_err(|e| CliError::field("bath", e))
            })
            .transpose()
    }

    pub fn liouvillian(&self) -> Result<Liouvillian, CliError> {
        let params = self.params()?;
        let bath = self.bath()?;
        let gamma = self.resolved().generator.gamma;
        let kind = self.generator.kind;
        if kind.is_phenomenological() && gamma.is_none() {
            return Err(CliError::config(format!(
                "generator.gamma: required by generator kind {}",
                kind_name(kind)
            )));
        }
        if !kind.is_phenomenological() && bath.is_none() {
            return Err(CliError::config(format!(
                "bath: required by generator kind {}",
                kind_name(kind)
            )));
        }
        generators::build(kind, params, gamma, bath.as_ref()).map_err(|e| CliError::from_core("generator", e))
    }

    pub fn initial_state(&self, basis: &DressedBasis) -> Result<DensityMatrix, CliError> {
        let pure = |p: &PureState| -> Result<DensityMatrix, CliError> {
            match p {
                PureState::Bare { photons, atom } => DensityMatrix::bare(
                    basis,
                    BareState {
                        photons: *photons,
                        atom: *atom,
                    },
                ),
                PureState::Dressed { label } => {
                    let l: DressedLabel = label
                        .parse()
                        .map_err(|e| CliError::config(format!("initial.label: {e}")))?;
                    DensityMatrix::dressed(basis, l)
                }
            }
            .map_err(|e| CliError::field("initial", e))
        };
        match self.initial.clone().unwrap_or_default() {
            InitialState::Bare { photons, atom } => pure(&PureState::Bare { photons, atom }),
            InitialState::Dressed { label } => pure(&PureState::Dressed { label }),
            InitialState::Mixture { components } => {
                let parts = components
                    .iter()
                    .map(|c| Ok((c.weight, pure(&c.state)?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                DensityMatrix::mixture(&parts).map_err(|e| CliError::field("initial", e))
            }
        }
    }

    pub fn evolution(&self) -> Result<(f64, IntegratorConfig), CliError> {
        let e = self
            .resolved()
            .evolution
            .ok_or_else(|| CliError::config("evolution: section required"))?;
        let cfg = IntegratorConfig {
            dt: e.dt,
            ..IntegratorConfig::default()
        }
        .recording_every(e.record_every);
        Ok((e.t_end, cfg))
    }

    pub fn output(&self) -> OutputSection {
        self.output.clone().unwrap_or_default()
    }
}

pub fn kind_name(kind: GeneratorKind) -> &'static str {
    match kind {
        GeneratorKind::PhenomBare => "phenom_bare",
        GeneratorKind::PhenomDressed => "phenom_dressed",
        GeneratorKind::SecularRwa => "secular_rwa",
        GeneratorKind::QuasiRwa => "quasi_rwa",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
units = "absolute"

[system]
omega0 = 1.0
coupling = 0.05
n_max = 3

[bath]
temperature = 0.1
lamb_shift = { policy = "zero" }
spectrum = { kind = "ohmic", eta = 0.01, omega_c = 2.0 }

[generator]
kind = "quasi_rwa"

[initial]
type = "mixture"
components = [
  { weight = 0.25, state = { type = "dressed", label = "1+" } },
  { weight = 0.75, state = { type = "bare", photons = 0, atom = "e" } },
]

[evolution]
t_end = 10.0
dt = 0.01
record_every = 5

[output]
dir = "results"
prefix = "a_"

[sweep]
axis = "bath.temperature"
range = { start = 0.0, stop = 0.2, count = 3 }
metrics = ["rate_spread_down"]
"#;

    #[test]
    fn round_trip() {
        let s = Scenario::from_toml(FULL).unwrap();
        let again = Scenario::from_toml(&s.to_toml()).unwrap();
        assert_eq!(s, again);
        let minimal = Scenario::from_toml(
            "[system]\nomega0 = 1.0\ncoupling = 0.1\nn_max = 1\n[generator]\nkind = \"phenom_bare\"\ngamma = 0.0\n",
        )
        .unwrap();
        assert_eq!(minimal, Scenario::from_toml(&minimal.to_toml()).unwrap());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = FULL.replace("coupling = 0.05", "coupling = 0.05\ncoupling_typo = 1.0");
        let e = Scenario::from_toml(&bad).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("coupling_typo"), "{e}");
        let bad = FULL.replace("eta = 0.01", "eta = 0.01, slope = 2.0");
        assert!(Scenario::from_toml(&bad).is_err());
    }

    #[test]
    fn builds_every_piece() {
        let s = Scenario::from_toml(FULL).unwrap();
        let l = s.liouvillian().unwrap();
        assert_eq!(l.dim(), 7);
        let basis = jc_core::build_dressed_basis(s.params().unwrap()).unwrap();
        let rho = s.initial_state(&basis).unwrap();
        assert!((rho.matrix()[(2, 2)].re - (0.25 + 0.75 * 0.5)).abs() < 1e-15);
        let (t, cfg) = s.evolution().unwrap();
        assert_eq!(t, 10.0);
        assert_eq!(cfg.record_every, 5);
        assert_eq!(s.sweep.unwrap().axis_values().unwrap(), vec![0.0, 0.1, 0.2]);
    }

    #[test]
    fn omega0_units_rescale() {
        let text = FULL
            .replace("units = \"absolute\"", "units = \"omega0\"")
            .replace("omega0 = 1.0", "omega0 = 2.0");
        let s = Scenario::from_toml(&text).unwrap();
        let r = s.resolved();
        assert_eq!(r.system.coupling, 0.1);
        assert_eq!(r.bath.unwrap().temperature, 0.2);
        assert_eq!(r.evolution.unwrap().t_end, 5.0);
        assert_eq!(
            r.bath.unwrap().spectrum,
            SpectralModel::Ohmic {
                eta: 0.01,
                omega_c: 4.0
            }
        );
    }

    #[test]
    fn missing_pieces_are_config_errors() {
        let s = Scenario::from_toml(
            "[system]\nomega0 = 1.0\ncoupling = 0.1\nn_max = 1\n[generator]\nkind = \"secular_rwa\"\n",
        )
        .unwrap();
        assert_eq!(s.liouvillian().unwrap_err().exit_code(), 2);
        assert_eq!(s.evolution().unwrap_err().exit_code(), 2);
        let s = Scenario::from_toml(
            "[system]\nomega0 = 1.0\ncoupling = 0.5\nn_max = 2\n[generator]\nkind = \"phenom_bare\"\ngamma = 0.1\n",
        )
        .unwrap();
        let e = s.liouvillian().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("manifold"), "{e}");
    }
}
