use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::exact::{KERNEL_MAX_SIDE, MEASURE_MAX_SIDE};
use crate::kernel::PcaParameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ExactVerify,
    TvTheorem1,
    MixingExact,
    CouplingBound,
    StoppingTimes,
    DiscrepancyWalk,
    EffectiveValidate,
    TunnelingScaling,
    GlauberCompare,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::ExactVerify,
        Experiment::TvTheorem1,
        Experiment::MixingExact,
        Experiment::CouplingBound,
        Experiment::StoppingTimes,
        Experiment::DiscrepancyWalk,
        Experiment::EffectiveValidate,
        Experiment::TunnelingScaling,
        Experiment::GlauberCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ExactVerify => "exact-verify",
            Experiment::TvTheorem1 => "tv-theorem1",
            Experiment::MixingExact => "mixing-exact",
            Experiment::CouplingBound => "coupling-bound",
            Experiment::StoppingTimes => "stopping-times",
            Experiment::DiscrepancyWalk => "discrepancy-walk",
            Experiment::EffectiveValidate => "effective-validate",
            Experiment::TunnelingScaling => "tunneling-scaling",
            Experiment::GlauberCompare => "glauber-compare",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?} (json, csv, both)"))),
        }
    }
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 100;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "L", deserialize_with = "one_or_many")]
    pub sides: Vec<usize>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(l) => vec![l],
        OneOrMany::Many(v) => v,
    })
}

/// Every field optional: the shape of a config file and of the command
/// line before they are merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<String>,
    #[serde(rename = "L", default, deserialize_with = "opt_one_or_many")]
    pub sides: Option<Vec<usize>>,
    #[serde(rename = "J")]
    pub coupling: Option<f64>,
    pub q: Option<f64>,
    pub k: Option<f64>,
    pub c: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

fn opt_one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<usize>>, D::Error> {
    one_or_many(d).map(Some)
}

impl PartialConfig {
    /// Read a TOML or JSON file (by extension; TOML otherwise).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e.message())))
        }
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            experiment: over.experiment.or(self.experiment),
            sides: over.sides.or(self.sides),
            coupling: over.coupling.or(self.coupling),
            q: over.q.or(self.q),
            k: over.k.or(self.k),
            c: over.c.or(self.c),
            seed: over.seed.or(self.seed),
            trials: over.trials.or(self.trials),
            budget: over.budget.or(self.budget),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }

    pub fn build(self) -> Result<ExperimentConfig> {
        let experiment: Experiment = self
            .experiment
            .ok_or_else(|| Error::InvalidConfig("missing experiment".into()))?
            .parse()?;
        let cfg = ExperimentConfig {
            experiment,
            sides: self.sides.ok_or_else(|| Error::InvalidConfig("missing L".into()))?,
            coupling: self.coupling,
            q: self.q,
            k: self.k,
            c: self.c,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            budget: self.budget.unwrap_or(DEFAULT_BUDGET),
            out: self.out,
            format: self.format.as_deref().map(str::parse).transpose()?.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// How `(J, q)` are obtained for each side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterSpec {
    Fixed { coupling: f64, q: f64 },
    Regime { k: f64, c: f64 },
}

impl ParameterSpec {
    pub fn at(&self, side: usize) -> Result<PcaParameters<f64>> {
        match *self {
            ParameterSpec::Fixed { coupling, q } => PcaParameters::new(coupling, q),
            ParameterSpec::Regime { k, c } => PcaParameters::from_regime(k, c, side),
        }
    }
}

impl ExperimentConfig {
    pub fn parameters(&self) -> ParameterSpec {
        match (self.coupling, self.q, self.k, self.c) {
            (Some(coupling), Some(q), _, _) => ParameterSpec::Fixed { coupling, q },
            (_, _, Some(k), Some(c)) => ParameterSpec::Regime { k, c },
            _ => unreachable!("validated"),
        }
    }

    /// Field invariants and experiment-specific refusals, all checked before
    /// any computation.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidConfig(m));
        let fixed = (self.coupling.is_some(), self.q.is_some());
        let regime = (self.k.is_some(), self.c.is_some());
        match (fixed, regime) {
            ((true, true), (false, false)) | ((false, false), (true, true)) => {}
            _ => return invalid("give exactly one of (J, q) or (k, c), both members of the pair".into()),
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if self.budget == 0 {
            return invalid("budget must be at least 1".into());
        }
        if self.sides.is_empty() {
            return invalid("L must name at least one side length".into());
        }
        if let Some(&l) = self.sides.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidGeometry(l));
        }
        for &l in &self.sides {
            self.parameters().at(l)?;
        }
        let max = *self.sides.iter().max().expect("non-empty");
        let min = *self.sides.iter().min().expect("non-empty");
        let guard = |what: &'static str, limit: &'static str, side: usize| Err(Error::SizeGuard { what, limit, side });
        match self.experiment {
            Experiment::ExactVerify | Experiment::TvTheorem1 if max > MEASURE_MAX_SIDE => {
                guard("exact enumeration", "L <= 4", max)
            }
            Experiment::MixingExact if max > KERNEL_MAX_SIDE => guard("dense exact kernels", "L <= 3", max),
            Experiment::TvTheorem1 if !matches!(self.parameters(), ParameterSpec::Regime { .. }) => {
                invalid("tv-theorem1 needs the regime form (k, c)".into())
            }
            Experiment::DiscrepancyWalk | Experiment::EffectiveValidate if min < 3 => {
                guard("a single discrepancy", "L >= 3", min)
            }
            Experiment::DiscrepancyWalk | Experiment::EffectiveValidate => {
                for &l in &self.sides {
                    if !self.parameters().at(l)?.window_is_proper() {
                        return invalid(format!("zero-temperature window is empty at L={l} (needs 4J > 2q)"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
