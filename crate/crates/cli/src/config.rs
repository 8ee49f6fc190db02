//! Experiment configuration: the JSON schema and its validation.

use crate::locate::Locator;
use nalgebra::{Complex, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sanovlab_core::classical::{validate_n_list, Distribution, EpsSchedule};
use sanovlab_core::counterexamples::MAX_VANDERMONDE_N;
use sanovlab_core::quantum::linalg::CVector;
use sanovlab_core::quantum::{DensityOperator, DEFAULT_DIM_CAP};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const SCHEMA_ID: &str = "sanovlab.config/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ClassicalSanov,
    QuantumSanov,
    NeymanPearson,
    Example1,
    Example2,
    HiaiPetz,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::ClassicalSanov => "classical-sanov",
            Kind::QuantumSanov => "quantum-sanov",
            Kind::NeymanPearson => "neyman-pearson",
            Kind::Example1 => "example1",
            Kind::Example2 => "example2",
            Kind::HiaiPetz => "hiai-petz",
        }
    }
}

/// A classical distribution, or a family of them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Probs(Vec<f64>),
    /// `Bern(p)` with letter 1 carrying probability `p`.
    Bernoulli(f64),
    /// `Bern(from), Bern(from + step), ...` up to `to` inclusive.
    BernoulliGrid { from: f64, to: f64, step: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexArray {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Bloch([f64; 3]),
    Diagonal(Vec<f64>),
    /// Pure state of an unnormalized vector.
    Pure(ComplexArray),
    Matrix(ComplexMatrix),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub scale: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub schema: Option<String>,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub grouping_tol: Option<f64>,
    #[serde(default)]
    pub n_list: Option<Vec<usize>>,
    #[serde(default)]
    pub eps_schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub omega: Option<Vec<DistSpec>>,
    #[serde(default)]
    pub q: Option<DistSpec>,
    #[serde(default)]
    pub psi_set: Option<Vec<StateSpec>>,
    #[serde(default)]
    pub psi: Option<StateSpec>,
    #[serde(default)]
    pub phi: Option<StateSpec>,
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default)]
    pub l_list: Option<Vec<usize>>,
    /// Target for `eta_l` in quantum-sanov runs.
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Mixing weight of example1's reference state.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub v: Option<ComplexArray>,
    #[serde(default)]
    pub w: Option<ComplexArray>,
    /// Example 2's angle `T`, radians.
    #[serde(default)]
    pub angle: Option<f64>,
    #[serde(default)]
    pub candidates: Option<usize>,
    #[serde(default)]
    pub random_pairs: Option<usize>,
}

/// Problem found in a config, with its position when known.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if !self.path.is_empty() {
            write!(f, "`{}`: ", self.path)?;
        }
        f.write_str(&self.message)
    }
}

/// Validated experiment, ready to run.
#[derive(Debug, Clone)]
pub enum Experiment {
    Classical {
        omega: Vec<Distribution<f64>>,
        q: Distribution<f64>,
        n_list: Vec<usize>,
        schedule: EpsSchedule<f64>,
    },
    Quantum {
        psi_set: Vec<DensityOperator<f64>>,
        phi: DensityOperator<f64>,
        l: usize,
        n_list: Vec<usize>,
        schedule: EpsSchedule<f64>,
        target: f64,
    },
    NeymanPearson {
        psi: DensityOperator<f64>,
        phi: DensityOperator<f64>,
        n_list: Vec<usize>,
        epsilon: f64,
    },
    Example1 {
        v: CVector<f64>,
        w: CVector<f64>,
        delta: f64,
        n_list: Vec<usize>,
    },
    Example2 {
        angle: f64,
        n_list: Vec<usize>,
        candidates: usize,
    },
    HiaiPetz {
        pairs: Vec<(DensityOperator<f64>, DensityOperator<f64>)>,
        l_list: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub experiment: Experiment,
    pub cap: usize,
    pub grouping_tol: f64,
}

/// Parses and validates; every error carries a source position.
pub fn load(src: &str) -> Result<Validated, Vec<ConfigError>> {
    let config: ExperimentConfig = serde_json::from_str(src).map_err(|e| {
        vec![ConfigError {
            path: String::new(),
            line: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
        }]
    })?;
    let locator = Locator::new(src);
    let mut v = Validator { locator: &locator, errors: Vec::new() };
    let result = v.experiment(&config);
    if !v.errors.is_empty() {
        return Err(v.errors);
    }
    let experiment = result.expect("no errors means a complete experiment");
    Ok(Validated {
        cap: config.cap.unwrap_or(DEFAULT_DIM_CAP),
        grouping_tol: config.grouping_tol.unwrap_or(1e-9),
        config,
        experiment,
    })
}

struct Validator<'a> {
    locator: &'a Locator,
    errors: Vec<ConfigError>,
}

impl Validator<'_> {
    fn error(&mut self, path: &str, message: impl Into<String>) {
        let pos = self.locator.find(path);
        self.errors.push(ConfigError {
            path: path.to_string(),
            line: pos.map(|p| p.0),
            column: pos.map(|p| p.1),
            message: message.into(),
        });
    }

    fn required<'c, T>(&mut self, value: &'c Option<T>, path: &str, kind: Kind) -> Option<&'c T> {
        if value.is_none() {
            self.error(path, format!("field `{path}` is required for kind `{}`", kind.name()));
        }
        value.as_ref()
    }

    fn experiment(&mut self, c: &ExperimentConfig) -> Option<Experiment> {
        if let Some(s) = &c.schema {
            if s != SCHEMA_ID {
                self.error("schema", format!("unsupported schema `{s}`, expected `{SCHEMA_ID}`"));
            }
        }
        if c.cap == Some(0) {
            self.error("cap", "cap must be positive");
        }
        if let Some(t) = c.grouping_tol {
            if !(t > 0.0 && t < 1.0) {
                self.error("grouping_tol", format!("grouping tolerance must lie in (0, 1), got {t}"));
            }
        }
        let k = c.kind;
        match k {
            Kind::ClassicalSanov => {
                let omega = self.required(&c.omega, "omega", k).map(|o| self.family(o));
                let q = self.required(&c.q, "q", k).and_then(|q| self.single_dist(q, "q"));
                let n_list = self.n_list(c, k);
                let schedule = self.schedule(c);
                if let (Some(omega), Some(q)) = (&omega, &q) {
                    for (i, p) in omega.iter().enumerate() {
                        if p.alphabet_size() != q.alphabet_size() {
                            self.error(
                                "omega",
                                format!(
                                    "member {i} has {} letters but q has {}",
                                    p.alphabet_size(),
                                    q.alphabet_size()
                                ),
                            );
                        }
                    }
                }
                Some(Experiment::Classical { omega: omega?, q: q?, n_list: n_list?, schedule: schedule? })
            }
            Kind::QuantumSanov => {
                let psi_set = self.required(&c.psi_set, "psi_set", k).map(|s| self.states(s, "psi_set"));
                let phi = self.required(&c.phi, "phi", k).and_then(|s| self.state(s, "phi"));
                let l = *self.required(&c.l, "l", k)?;
                if l == 0 {
                    self.error("l", "block length l must be positive");
                }
                let n_list = self.n_list(c, k);
                let schedule = self.schedule(c);
                let target = c.target.unwrap_or(0.5);
                if !(target > 0.0) {
                    self.error("target", format!("target must be positive, got {target}"));
                }
                let psi_set = psi_set?;
                if psi_set.is_empty() {
                    self.error("psi_set", "psi_set must not be empty");
                }
                if let Some(phi) = &phi {
                    self.same_dims(&psi_set, phi, "psi_set");
                }
                Some(Experiment::Quantum { psi_set, phi: phi?, l, n_list: n_list?, schedule: schedule?, target })
            }
            Kind::NeymanPearson => {
                let psi = self.required(&c.psi, "psi", k).and_then(|s| self.state(s, "psi"));
                let phi = self.required(&c.phi, "phi", k).and_then(|s| self.state(s, "phi"));
                let n_list = self.n_list(c, k);
                let epsilon = c.epsilon.unwrap_or(0.1);
                if !(epsilon > 0.0 && epsilon < 1.0) {
                    self.error("epsilon", format!("epsilon must lie in (0, 1), got {epsilon}"));
                }
                let (psi, phi) = (psi?, phi?);
                self.same_dims(std::slice::from_ref(&psi), &phi, "psi");
                Some(Experiment::NeymanPearson { psi, phi, n_list: n_list?, epsilon })
            }
            Kind::Example1 => {
                let v = self.required(&c.v, "v", k).and_then(|a| self.unit_vector(a, "v"));
                let w = self.required(&c.w, "w", k).and_then(|a| self.unit_vector(a, "w"));
                let delta = *self.required(&c.delta, "delta", k)?;
                if !(0.0..=1.0).contains(&delta) {
                    self.error("delta", format!("delta must lie in [0, 1], got {delta}"));
                }
                let n_list = self.n_list(c, k);
                let (v, w) = (v?, w?);
                if v.len() != w.len() {
                    self.error("w", format!("w has dimension {} but v has {}", w.len(), v.len()));
                } else {
                    let overlap = v.dotc(&w).norm_sqr();
                    if !(overlap > 0.0 && overlap < 1.0 - 1e-12) {
                        self.error("w", format!("|<v,w>|^2 must lie strictly between 0 and 1, got {overlap}"));
                    }
                }
                Some(Experiment::Example1 { v, w, delta, n_list: n_list? })
            }
            Kind::Example2 => {
                let angle = c.angle.unwrap_or(std::f64::consts::FRAC_PI_6);
                if !(angle > 0.0 && angle < std::f64::consts::FRAC_PI_2) {
                    self.error("angle", format!("angle must lie in (0, pi/2), got {angle}"));
                }
                let n_list = self.n_list(c, k)?;
                for (i, &n) in n_list.iter().enumerate() {
                    if n % 2 == 0 || n > MAX_VANDERMONDE_N {
                        self.error(
                            &format!("n_list[{i}]"),
                            format!("example2 needs odd n up to {MAX_VANDERMONDE_N}, got {n}"),
                        );
                    }
                }
                Some(Experiment::Example2 { angle, n_list, candidates: c.candidates.unwrap_or(1000) })
            }
            Kind::HiaiPetz => {
                let l_list = c.l_list.clone().unwrap_or_else(|| vec![1, 2, 3]);
                if let Err(e) = validate_n_list(&l_list) {
                    self.error("l_list", e.to_string());
                }
                let mut pairs = Vec::new();
                match (&c.psi, &c.phi, c.random_pairs) {
                    (Some(psi), Some(phi), None) => {
                        let psi = self.state(psi, "psi");
                        let phi = self.state(phi, "phi");
                        let (psi, phi) = (psi?, phi?);
                        self.same_dims(std::slice::from_ref(&psi), &phi, "psi");
                        pairs.push((psi, phi));
                    }
                    (None, None, Some(count)) => {
                        if count == 0 {
                            self.error("random_pairs", "random_pairs must be positive");
                        }
                        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
                        for _ in 0..count {
                            let psi = DensityOperator::from_bloch(random_bloch(&mut rng)).ok()?;
                            let phi = DensityOperator::from_bloch(random_bloch(&mut rng)).ok()?;
                            pairs.push((psi, phi));
                        }
                    }
                    _ => {
                        self.error("kind", "hiai-petz needs either both `psi` and `phi`, or `random_pairs`");
                        return None;
                    }
                }
                Some(Experiment::HiaiPetz { pairs, l_list })
            }
        }
    }

    fn n_list(&mut self, c: &ExperimentConfig, k: Kind) -> Option<Vec<usize>> {
        let list = self.required(&c.n_list, "n_list", k)?.clone();
        if let Err(e) = validate_n_list(&list) {
            self.error("n_list", e.to_string());
            return None;
        }
        Some(list)
    }

    fn schedule(&mut self, c: &ExperimentConfig) -> Option<EpsSchedule<f64>> {
        match &c.eps_schedule {
            None => Some(EpsSchedule::cube_root()),
            Some(s) => match EpsSchedule::power(s.scale, s.exponent) {
                Ok(s) => Some(s),
                Err(e) => {
                    self.error("eps_schedule", e.to_string());
                    None
                }
            },
        }
    }

    fn single_dist(&mut self, spec: &DistSpec, path: &str) -> Option<Distribution<f64>> {
        let mut out = self.dist(spec, path);
        if out.len() != 1 {
            if !out.is_empty() {
                self.error(path, "expected a single distribution, not a grid");
            }
            return None;
        }
        out.pop()
    }

    fn family(&mut self, specs: &[DistSpec]) -> Vec<Distribution<f64>> {
        if specs.is_empty() {
            self.error("omega", "omega must not be empty");
        }
        let mut out = Vec::new();
        for (i, s) in specs.iter().enumerate() {
            out.extend(self.dist(s, &format!("omega[{i}]")));
        }
        out
    }

    fn dist(&mut self, spec: &DistSpec, path: &str) -> Vec<Distribution<f64>> {
        let result = match spec {
            DistSpec::Probs(p) => Distribution::new(p.clone()).map(|d| vec![d]),
            DistSpec::Bernoulli(p) => Distribution::bernoulli(*p).map(|d| vec![d]),
            DistSpec::BernoulliGrid { from, to, step } => {
                if !(*step > 0.0 && from <= to) {
                    self.error(path, format!("grid needs step > 0 and from <= to, got {from}..{to} step {step}"));
                    return Vec::new();
                }
                let count = ((to - from) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| Distribution::bernoulli(from + step * i as f64)).collect()
            }
        };
        match result {
            Ok(d) => d,
            Err(e) => {
                self.error(path, e.to_string());
                Vec::new()
            }
        }
    }

    fn states(&mut self, specs: &[StateSpec], path: &str) -> Vec<DensityOperator<f64>> {
        specs
            .iter()
            .enumerate()
            .filter_map(|(i, s)| self.state(s, &format!("{path}[{i}]")))
            .collect()
    }

    fn state(&mut self, spec: &StateSpec, path: &str) -> Option<DensityOperator<f64>> {
        let result = match spec {
            StateSpec::Bloch(r) => DensityOperator::from_bloch(*r),
            StateSpec::Diagonal(p) => DensityOperator::diagonal(p),
            StateSpec::Pure(a) => {
                let v = self.vector(a, path)?;
                DensityOperator::pure(&v)
            }
            StateSpec::Matrix(m) => {
                let dim = m.re.len();
                let im = m.im.clone().unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
                if m.re.iter().any(|r| r.len() != dim) || im.len() != dim || im.iter().any(|r| r.len() != dim) {
                    self.error(path, format!("matrix parts must both be {dim}x{dim}"));
                    return None;
                }
                let re: Vec<f64> = m.re.concat();
                let im: Vec<f64> = im.concat();
                DensityOperator::from_parts(dim, &re, &im)
            }
        };
        match result {
            Ok(d) => Some(d),
            Err(e) => {
                self.error(path, e.to_string());
                None
            }
        }
    }

    fn vector(&mut self, a: &ComplexArray, path: &str) -> Option<CVector<f64>> {
        let im = a.im.clone().unwrap_or_else(|| vec![0.0; a.re.len()]);
        if im.len() != a.re.len() || a.re.is_empty() {
            self.error(path, "vector needs nonempty `re` and `im` of equal length");
            return None;
        }
        Some(DVector::from_iterator(a.re.len(), a.re.iter().zip(&im).map(|(&r, &i)| Complex::new(r, i))))
    }

    fn unit_vector(&mut self, a: &ComplexArray, path: &str) -> Option<CVector<f64>> {
        let v = self.vector(a, path)?;
        let norm = v.norm();
        if !(norm > 0.0) {
            self.error(path, "vector must be nonzero");
            return None;
        }
        Some(v / Complex::new(norm, 0.0))
    }

    fn same_dims(&mut self, set: &[DensityOperator<f64>], phi: &DensityOperator<f64>, path: &str) {
        for (i, s) in set.iter().enumerate() {
            if s.dim() != phi.dim() {
                self.error(path, format!("state {i} has dimension {} but phi has {}", s.dim(), phi.dim()));
            }
        }
    }
}

fn random_bloch(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let r = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if r.iter().map(|x| x * x).sum::<f64>() < 0.99 {
            return r;
        }
    }
}
