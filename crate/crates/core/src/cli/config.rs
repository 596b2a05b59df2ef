use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Observable, TimeGrid, TrajectoryConfig};
use crate::error::{Error, Result};
use crate::hilbert::{embed_local, SpaceDescriptor, StateVector};
use crate::models::{self, hubbard, spin1::local, LocalKind, ModelParams};

pub const SCHEMA: &str = include_str!("config.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: ModelParams,
    /// Uniform random offsets added to model parameter lists, drawn from `seed`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub randomize: Vec<RandomList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<TimeGrid>,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub analyses: Vec<AnalysisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomField {
    Omegas,
    ChemPotentials,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomList {
    pub field: RandomField,
    pub low: f64,
    pub high: f64,
}

/// A resolved random draw, echoed into the manifest.
#[derive(Clone, Debug, Serialize)]
pub struct RandomDraw {
    pub field: RandomField,
    pub interval: (f64, f64),
    pub offsets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Labels(Vec<String>),
    RandomProduct { seed: u64 },
    /// Random spin-1 product state with `⟨S^x⟩ = 0` on every site.
    RandomProductZeroSx { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method {
    Dense {
        #[serde(default = "one")]
        check_stride: usize,
    },
    Trajectories {
        n_traj: usize,
        #[serde(default = "default_bisection")]
        jump_bisection_tol: f64,
    },
}

impl Default for Method {
    fn default() -> Self {
        Method::Dense { check_stride: 1 }
    }
}

fn one() -> usize {
    1
}

fn default_bisection() -> f64 {
    1e-10
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableName {
    Sx,
    Sy,
    Sz,
    Sx2,
    Sz2,
    N,
    NUp,
    NDown,
}

impl ObservableName {
    pub fn as_str(self) -> &'static str {
        match self {
            ObservableName::Sx => "sx",
            ObservableName::Sy => "sy",
            ObservableName::Sz => "sz",
            ObservableName::Sx2 => "sx2",
            ObservableName::Sz2 => "sz2",
            ObservableName::N => "n",
            ObservableName::NUp => "n_up",
            ObservableName::NDown => "n_down",
        }
    }

    /// The operator on `site` of an `n`-site chain of `kind`.
    pub fn operator(self, kind: LocalKind, n: usize, site: usize) -> Result<crate::hilbert::Operator> {
        use ObservableName::*;
        match kind {
            LocalKind::Spin1 => {
                let local = match self {
                    Sx => local::sx(),
                    Sy => local::sy(),
                    Sz => local::sz(),
                    Sx2 => local::sx2(),
                    Sz2 => local::sz2(),
                    _ => return Err(Error::Schema(format!("observable `{}` is not defined for spin-1 chains", self.as_str()))),
                };
                embed_local(&local, site, &SpaceDescriptor::uniform(n, 3)?)
            }
            LocalKind::Hubbard => match self {
                Sx => hubbard::spin_x(n, site),
                Sy => hubbard::spin_y(n, site),
                Sz => hubbard::spin_z(n, site),
                N => hubbard::charge(n, site),
                NUp => hubbard::number(n, site, hubbard::Spin::Up),
                NDown => hubbard::number(n, site, hubbard::Spin::Down),
                Sx2 => Ok(hubbard::spin_x(n, site)?.pow(2)),
                Sz2 => Ok(hubbard::spin_z(n, site)?.pow(2)),
            },
        }
    }
}

/// A named local operator recorded on a set of sites (all sites when omitted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: ObservableName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<usize>>,
}

pub fn observable_label(name: ObservableName, site: usize) -> String {
    format!("{}_{}", name.as_str(), site)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisSpec {
    /// Liouvillian spectrum with kernel and imaginary-mode counts.
    Spectrum {},
    /// Entries of the final density matrix above `threshold` in modulus.
    FinalState {
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
    /// Windowed Pearson coefficient for the given label pairs (all pairs of
    /// recorded observables when omitted).
    Pearson {
        window: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<Vec<(String, String)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_from: Option<f64>,
    },
    Fourier {
        observable: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_min: Option<f64>,
    },
    Prevalence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observables: Option<Vec<String>>,
        t_max: f64,
        bins: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<(f64, f64)>,
    },
    /// Per-site negativity and total coherence along the evolution.
    Witnesses {
        #[serde(default = "yes")]
        negativity: bool,
        #[serde(default = "yes")]
        coherence: bool,
        #[serde(default = "one")]
        stride: usize,
    },
    /// Reduced two-site correlators of `name`, recorded as `A_<j>_<l>`.
    Correlators {
        name: ObservableName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<Vec<(usize, usize)>>,
    },
    /// Imaginary-eigenvalue displacement under a linear field gradient.
    ShiftScan { deltas: Vec<f64> },
    /// Coherence decay versus a linear field gradient of half-width δ.
    DetuningScan {
        deltas: Vec<f64>,
        fit_window: (f64, f64),
        profile_time: f64,
    },
}

fn default_threshold() -> f64 {
    1e-6
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    /// Parse and validate against the embedded schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        validate_schema(&value)?;
        let cfg: ExperimentConfig = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Semantic checks beyond the schema.
    pub fn check(&self) -> Result<()> {
        let schema = |e: Error| Error::Schema(e.to_string());
        match &self.model {
            ModelParams::Spin1(p) => p.validate().map_err(schema)?,
            ModelParams::Hubbard(p) => p.validate().map_err(schema)?,
        }
        if let Some(g) = &self.grid {
            g.validate().map_err(schema)?;
        }
        let n = self.model.n_sites();
        for o in &self.observables {
            if let Some(s) = o.sites.as_ref().and_then(|s| s.iter().find(|&&s| s >= n)) {
                return Err(Error::Schema(format!("observable site {s} out of range for {n} sites")));
            }
        }
        for r in &self.randomize {
            if !(r.high >= r.low) {
                return Err(Error::Schema("random interval must satisfy low ≤ high".into()));
            }
            if r.field == RandomField::ChemPotentials && matches!(self.model, ModelParams::Spin1(_)) {
                return Err(Error::Schema("chem_potentials apply only to the Hubbard model".into()));
            }
        }
        if let Method::Trajectories { n_traj, jump_bisection_tol } = self.method {
            TrajectoryConfig { n_traj, seed: self.seed, jump_bisection_tol, chunk_size: 8 }.validate().map_err(schema)?;
        }
        Ok(())
    }

    /// Model parameters after applying the random offsets, and the draws made.
    pub fn resolved_model(&self) -> (ModelParams, Vec<RandomDraw>) {
        let mut model = self.model.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draws = Vec::new();
        for r in &self.randomize {
            let n = model.n_sites();
            let offsets: Vec<f64> = (0..n).map(|_| if r.high > r.low { rng.gen_range(r.low..r.high) } else { r.low }).collect();
            let target = match (&mut model, r.field) {
                (ModelParams::Spin1(p), RandomField::Omegas) => &mut p.omegas,
                (ModelParams::Hubbard(p), RandomField::Omegas) => &mut p.omegas,
                (ModelParams::Hubbard(p), RandomField::ChemPotentials) => &mut p.chem_potentials,
                (ModelParams::Spin1(_), RandomField::ChemPotentials) => continue,
            };
            for (x, o) in target.iter_mut().zip(&offsets) {
                *x += o;
            }
            draws.push(RandomDraw { field: r.field, interval: (r.low, r.high), offsets });
        }
        (model, draws)
    }

    pub fn initial_state(&self) -> Result<Option<StateVector>> {
        let kind = self.model.local_kind();
        let n = self.model.n_sites();
        let Some(init) = &self.initial_state else { return Ok(None) };
        let psi = match init {
            InitialState::Labels(l) => {
                if l.len() != n {
                    return Err(Error::Schema(format!("initial state has {} labels for {n} sites", l.len())));
                }
                models::product_state(kind, l)?
            }
            InitialState::RandomProduct { seed } => models::random_product_state(kind, n, *seed)?,
            InitialState::RandomProductZeroSx { seed } => {
                if kind != LocalKind::Spin1 {
                    return Err(Error::Schema("random_product_zero_sx is defined for spin-1 chains".into()));
                }
                models::random_product_state_zero_sx(n, *seed)?
            }
        };
        Ok(Some(psi))
    }

    pub fn observables(&self) -> Result<Vec<Observable>> {
        let kind = self.model.local_kind();
        let n = self.model.n_sites();
        let mut out = Vec::new();
        for spec in &self.observables {
            let sites: Vec<usize> = spec.sites.clone().unwrap_or_else(|| (0..n).collect());
            for s in sites {
                out.push(Observable::new(observable_label(spec.name, s), spec.name.operator(kind, n, s)?));
            }
        }
        Ok(out)
    }
}

pub fn validate_schema(value: &serde_json::Value) -> Result<()> {
    let schema: serde_json::Value = serde_json::from_str(SCHEMA).expect("embedded schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).map_err(|e| Error::Schema(format!("schema: {e}")))?;
    let errors: Vec<String> = validator.iter_errors(value).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Schema(errors.join("; ")))
    }
}
