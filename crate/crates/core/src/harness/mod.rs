//! Monte Carlo experiment plans: blanket-time scaling fits, ECDF convergence
//! tables, local-time concentration and equicontinuity, the excursion scaling
//! identity and a coupled `d_𝕂` ladder.

mod identity;
mod ladder;
mod local;
mod stats;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compare::CompareError;
use crate::excursion::{continuum_blanket_time, excursion_to_tree, sample_excursion, DiscretizedContinuumTree, ExcursionError};
use crate::gen::{largest_component, sample_configuration_model, sample_degree_sequence, sample_er_critical, DegreeLaw, GenError};
use crate::graph::{GraphError, WeightedGraph};
use crate::seed;
use crate::tree::{sample_conditioned_gw, Offspring, TreeError};
use crate::walk::{blanket_time_variable, blanket_times_multi, default_t_max, WalkError};

pub use identity::{blanket_scaling_identity_check, scaling_identity_ks, IdentityCheck};
pub use ladder::{dk_ladder, LadderStep};
pub use local::{concentration_check, equicontinuity_modulus, ConcentrationTable, ModulusTable};
pub use stats::{ks_critical, ks_two_sample, linear_fit, majority, median, quantile, LinearFit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("fit undefined: {0}")]
    DegenerateFit(String),
    #[error("size {size}: {got} samples, at least {need} required")]
    InsufficientSamples { size: usize, got: usize, need: usize },
    #[error("size {size}: {timeouts} of {replicates} replicates timed out")]
    TooManyTimeouts { size: usize, timeouts: usize, replicates: usize },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Excursion(#[from] ExcursionError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Space and time scaling `(α(n), β(n))` with `α β = ` total mass order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `α = n^{−1/2}`, `β = n^{3/2}`.
    Tree,
    /// `α = n^{−1/3}`, `β = n`.
    Component,
    /// Already in continuum units.
    Continuum,
}

impl Regime {
    pub fn alpha(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Regime::Tree => n.powf(-0.5),
            Regime::Component => n.powf(-1.0 / 3.0),
            Regime::Continuum => 1.0,
        }
    }

    pub fn beta(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Regime::Tree => n.powf(1.5),
            Regime::Component => n,
            Regime::Continuum => 1.0,
        }
    }
}

fn poisson1() -> Offspring {
    Offspring::Poisson1
}

fn critical_law() -> DegreeLaw {
    DegreeLaw::critical_one_three()
}

/// Random environment of one replicate. The size parameter is the number of
/// edges for trees, the number of vertices of the ambient graph for components,
/// and the number of sampled leaves for excursion trees (grid `8·size`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    GwTree {
        #[serde(default = "poisson1")]
        offspring: Offspring,
    },
    ErComponent {
        #[serde(default)]
        lambda: f64,
    },
    ConfigModel {
        #[serde(default = "critical_law")]
        law: DegreeLaw,
    },
    ExcursionTree,
}

/// A sampled environment with the walk's start.
#[derive(Debug, Clone)]
pub enum Instance {
    Graph { graph: WeightedGraph<f64>, start: usize },
    Continuum(DiscretizedContinuumTree),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::GwTree { .. } => "gw-tree",
            Model::ErComponent { .. } => "er-component",
            Model::ConfigModel { .. } => "config-model",
            Model::ExcursionTree => "excursion-tree",
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            Model::GwTree { .. } => Regime::Tree,
            Model::ErComponent { .. } | Model::ConfigModel { .. } => Regime::Component,
            Model::ExcursionTree => Regime::Continuum,
        }
    }

    /// Largest-component models fall back to `K2` in the (vanishingly rare) case of no edges.
    pub fn instance(&self, size: usize, seed: u64) -> Result<Instance, HarnessError> {
        Ok(match self {
            Model::GwTree { offspring } => {
                let t = sample_conditioned_gw(offspring, size, seed)?;
                Instance::Graph { graph: t.to_graph()?, start: t.root() }
            }
            Model::ErComponent { lambda } => component(sample_er_critical(size, *lambda, seed)?),
            Model::ConfigModel { law } => {
                let d = sample_degree_sequence(law, size, seed!(seed; "degrees"))?;
                component(sample_configuration_model(&d, seed!(seed; "matching"))?)
            }
            Model::ExcursionTree => {
                let e = sample_excursion(1.0, 8 * size, seed)?;
                Instance::Continuum(excursion_to_tree(&e, size)?)
            }
        })
    }

    /// The graph of an instance; continuum instances are rejected.
    pub fn graph(&self, size: usize, seed: u64) -> Result<(WeightedGraph<f64>, usize), HarnessError> {
        match self.instance(size, seed)? {
            Instance::Graph { graph, start } => Ok((graph, start)),
            Instance::Continuum(_) => Err(HarnessError::InvalidPlan("model has no graph instances".into())),
        }
    }
}

fn component(g: WeightedGraph<f64>) -> Instance {
    match largest_component(&g) {
        Some((c, _)) => Instance::Graph { graph: c, start: 0 },
        None => Instance::Graph { graph: WeightedGraph::unit(2, &[(0, 1)]).expect("K2 is a valid graph"), start: 0 },
    }
}

/// Step budget per replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TMaxPolicy {
    /// The walk engine's default; 64 time units for continuum trees.
    #[default]
    Default,
    /// A multiple of the default.
    Multiple(f64),
    Fixed(f64),
}

impl TMaxPolicy {
    fn budget(self, default: f64) -> f64 {
        match self {
            TMaxPolicy::Default => default,
            TMaxPolicy::Multiple(k) => (k * default).ceil(),
            TMaxPolicy::Fixed(t) => t,
        }
    }
}

const CONTINUUM_T_MAX: f64 = 64.0;

fn default_records() -> String {
    "records.jsonl".into()
}

fn default_summary() -> String {
    "summary.csv".into()
}

fn default_timeout_fraction() -> f64 {
    0.01
}

/// Output file names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default = "default_records")]
    pub records: String,
    #[serde(default = "default_summary")]
    pub summary: String,
    #[serde(default)]
    pub plot: Option<String>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { records: default_records(), summary: default_summary(), plot: None }
    }
}

/// A blanket-time scaling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub model: Model,
    pub sizes: Vec<usize>,
    pub epsilon: f64,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub t_max: TMaxPolicy,
    /// Largest tolerated fraction of timed-out replicates per size.
    #[serde(default = "default_timeout_fraction")]
    pub max_timeout_fraction: f64,
    #[serde(default)]
    pub outputs: OutputPaths,
}

/// Fewest replicates for a fitted quantity.
pub const MIN_FIT_REPLICATES: usize = 30;

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidPlan(m));
        if self.sizes.is_empty() {
            return bad("no sizes".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("sizes must be strictly increasing, got {:?}", self.sizes));
        }
        if self.sizes[0] == 0 {
            return bad("sizes must be positive".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.replicates < MIN_FIT_REPLICATES {
            return bad(format!("at least {MIN_FIT_REPLICATES} replicates required, got {}", self.replicates));
        }
        if !(0.0..=1.0).contains(&self.max_timeout_fraction) {
            return bad(format!("max_timeout_fraction must lie in [0, 1], got {}", self.max_timeout_fraction));
        }
        match self.t_max {
            TMaxPolicy::Multiple(k) if !(k > 0.0) => bad(format!("t_max multiple must be positive, got {k}")),
            TMaxPolicy::Fixed(t) if !(t >= 1.0) => bad(format!("fixed t_max must be at least 1, got {t}")),
            _ => Ok(()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let p: Self = serde_json::from_str(text).map_err(|e| HarnessError::InvalidPlan(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

/// One replicate; everything needed to recompute fits offline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub model: String,
    pub size: usize,
    pub index: usize,
    /// `seed!(master; size, index)`.
    pub seed: u64,
    pub n_vertices: usize,
    pub epsilon: f64,
    pub t_max: f64,
    pub tau_blanket: Option<f64>,
    pub cover_time: Option<f64>,
    /// Not part of the replayable record stream.
    #[serde(skip)]
    pub wall_ms: f64,
}

/// Per-size center (median or mean) and spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub size: usize,
    pub center: f64,
    pub q1: f64,
    pub q3: f64,
    pub completed: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub per_size: Vec<SizeSummary>,
}

/// Least squares of `log center` on `log size`.
pub fn fit_log_log(per_size: Vec<SizeSummary>) -> Result<ScalingFit, HarnessError> {
    let mut sizes: Vec<usize> = per_size.iter().map(|s| s.size).collect();
    sizes.sort_unstable();
    if sizes.windows(2).any(|w| w[0] == w[1]) {
        return Err(HarnessError::DegenerateFit(format!("duplicated sizes {sizes:?}")));
    }
    if let Some(s) = per_size.iter().find(|s| !(s.center > 0.0 && s.center.is_finite())) {
        return Err(HarnessError::DegenerateFit(format!("size {} has center {}", s.size, s.center)));
    }
    let x: Vec<f64> = per_size.iter().map(|s| (s.size as f64).ln()).collect();
    let y: Vec<f64> = per_size.iter().map(|s| s.center.ln()).collect();
    let f = linear_fit(&x, &y).ok_or_else(|| HarnessError::DegenerateFit("at least three distinct sizes are needed".into()))?;
    Ok(ScalingFit { slope: f.slope, intercept: f.intercept, stderr: f.slope_stderr, r_squared: f.r_squared, per_size })
}

/// Median fit over completed replicates; censored ones are only counted.
pub fn fit_records(records: &[ReplicateRecord]) -> Result<ScalingFit, HarnessError> {
    let mut by_size: BTreeMap<usize, (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let slot = by_size.entry(r.size).or_default();
        match r.tau_blanket {
            Some(t) => slot.0.push(t),
            None => slot.1 += 1,
        }
    }
    let mut per_size = Vec::new();
    for (size, (done, censored)) in by_size {
        if done.is_empty() {
            return Err(HarnessError::DegenerateFit(format!("size {size} has no completed replicate")));
        }
        let s = stats::sorted(&done);
        per_size.push(SizeSummary {
            size,
            center: quantile(&s, 0.5),
            q1: quantile(&s, 0.25),
            q3: quantile(&s, 0.75),
            completed: s.len(),
            censored,
        });
    }
    fit_log_log(per_size)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRun {
    pub records: Vec<ReplicateRecord>,
    pub fit: ScalingFit,
}

/// One blanket-time replicate of `model` at `size` with seed `seed!(master; size, index)`.
pub fn run_replicate(model: &Model, size: usize, index: usize, epsilon: f64, t_max: TMaxPolicy, master: u64) -> Result<ReplicateRecord, HarnessError> {
    let clock = Instant::now();
    let s = seed!(master; size, index);
    let (n_vertices, budget, tau, cover) = match model.instance(size, seed!(s; "instance"))? {
        Instance::Graph { graph, start } => {
            let budget = t_max.budget(default_t_max(&graph) as f64).max(1.0);
            let r = blanket_time_variable(&graph, start, epsilon, budget as u64, seed!(s; "walk"))?;
            (graph.n_vertices(), budget, r.tau_blanket.map(|t| t as f64), r.cover_time.map(|t| t as f64))
        }
        Instance::Continuum(tree) => {
            let budget = t_max.budget(CONTINUUM_T_MAX * tree.zeta().powf(1.5));
            let r = continuum_blanket_time(&tree, epsilon, budget, seed!(s; "walk"))?;
            (tree.n_representatives(), budget, r.tau, r.cover)
        }
    };
    Ok(ReplicateRecord {
        model: model.name().into(),
        size,
        index,
        seed: s,
        n_vertices,
        epsilon,
        t_max: budget,
        tau_blanket: tau,
        cover_time: cover,
        wall_ms: clock.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs every `(size, replicate)` pair in parallel; records come back in plan order.
pub fn run_scaling_experiment(plan: &ExperimentPlan) -> Result<ScalingRun, HarnessError> {
    plan.validate()?;
    let jobs: Vec<(usize, usize)> = plan.sizes.iter().flat_map(|&n| (0..plan.replicates).map(move |i| (n, i))).collect();
    let records: Vec<ReplicateRecord> = jobs
        .par_iter()
        .map(|&(n, i)| run_replicate(&plan.model, n, i, plan.epsilon, plan.t_max, plan.master_seed))
        .collect::<Result<_, _>>()?;
    for &size in &plan.sizes {
        let timeouts = records.iter().filter(|r| r.size == size && r.tau_blanket.is_none()).count();
        if timeouts as f64 > plan.max_timeout_fraction * plan.replicates as f64 {
            return Err(HarnessError::TooManyTimeouts { size, timeouts, replicates: plan.replicates });
        }
    }
    let fit = fit_records(&records)?;
    Ok(ScalingRun { records, fit })
}

/// Rescaled blanket times `τ/β(n)` per size, timeouts as `+∞`.
pub fn rescaled_samples(records: &[ReplicateRecord], regime: Regime) -> BTreeMap<usize, Vec<f64>> {
    let mut out: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        out.entry(r.size).or_default().push(r.tau_blanket.map_or(f64::INFINITY, |t| t / regime.beta(r.size)));
    }
    out
}

/// Fewest samples per size for a KS comparison.
pub const MIN_KS_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRow {
    pub n_small: usize,
    pub n_large: usize,
    pub ks: f64,
    /// 95% two-sample critical value.
    pub critical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsTable {
    pub rows: Vec<KsRow>,
    /// KS distances between consecutive sizes are nonincreasing.
    pub decreasing: bool,
}

/// KS distances between already rescaled samples of consecutive sizes.
pub fn ks_convergence(samples_by_size: &BTreeMap<usize, Vec<f64>>) -> Result<KsTable, HarnessError> {
    if samples_by_size.len() < 2 {
        return Err(HarnessError::InsufficientSamples { size: samples_by_size.len(), got: samples_by_size.len(), need: 2 });
    }
    if let Some((&size, v)) = samples_by_size.iter().find(|(_, v)| v.len() < MIN_KS_SAMPLES) {
        return Err(HarnessError::InsufficientSamples { size, got: v.len(), need: MIN_KS_SAMPLES });
    }
    let entries: Vec<(&usize, &Vec<f64>)> = samples_by_size.iter().collect();
    let rows: Vec<KsRow> = entries
        .windows(2)
        .map(|w| KsRow { n_small: *w[0].0, n_large: *w[1].0, ks: ks_two_sample(w[0].1, w[1].1), critical: ks_critical(w[0].1.len(), w[1].1.len(), 0.05) })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[0].ks >= w[1].ks);
    Ok(KsTable { rows, decreasing })
}

/// Outcome of the monotone-coupling check between two fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub eps_low: f64,
    pub eps_high: f64,
    /// Grid points where the ECDF at `eps_high` exceeds the one at `eps_low`.
    pub violations: usize,
    pub grid_points: usize,
}

/// Blanket times at `eps_low < eps_high` on shared trajectories: the ECDF at
/// the larger fraction must lie below the other one on the pooled sample grid.
pub fn epsilon_sandwich_check(
    model: &Model,
    size: usize,
    eps_low: f64,
    eps_high: f64,
    replicates: usize,
    master: u64,
) -> Result<SandwichCheck, HarnessError> {
    if !(eps_low < eps_high) {
        return Err(HarnessError::InvalidPlan(format!("need eps_low < eps_high, got {eps_low} and {eps_high}")));
    }
    let pairs: Vec<(f64, f64)> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let s = seed!(master; size, i);
            let (g, start) = model.graph(size, seed!(s; "instance"))?;
            let r = blanket_times_multi(&g, start, &[eps_low, eps_high], default_t_max(&g), seed!(s; "walk"))?;
            let v = |k: usize| r[k].tau_blanket.map_or(f64::INFINITY, |t| t as f64);
            Ok((v(0), v(1)))
        })
        .collect::<Result<_, HarnessError>>()?;
    let lo: Vec<f64> = stats::sorted(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let hi: Vec<f64> = stats::sorted(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let ecdf = |s: &[f64], x: f64| s.partition_point(|&v| v <= x);
    let grid: Vec<f64> = lo.iter().chain(&hi).cloned().filter(|v| v.is_finite()).collect();
    let violations = grid.iter().filter(|&&x| ecdf(&hi, x) > ecdf(&lo, x)).count();
    Ok(SandwichCheck { eps_low, eps_high, violations, grid_points: grid.len() })
}

/// Mean size of the largest component per `n`, fitted on a log–log scale.
pub fn component_size_scaling(model: &Model, sizes: &[usize], draws: usize, master: u64) -> Result<ScalingFit, HarnessError> {
    if matches!(model, Model::GwTree { .. } | Model::ExcursionTree) {
        return Err(HarnessError::InvalidPlan("component sizes need a graph model".into()));
    }
    let mut per_size = Vec::new();
    for &n in sizes {
        let c: Vec<f64> = (0..draws)
            .into_par_iter()
            .map(|i| model.graph(n, seed!(master; "component", n, i)).map(|(g, _)| g.n_vertices() as f64))
            .collect::<Result<_, _>>()?;
        let s = stats::sorted(&c);
        per_size.push(SizeSummary {
            size: n,
            center: c.iter().sum::<f64>() / c.len().max(1) as f64,
            q1: quantile(&s, 0.25),
            q3: quantile(&s, 0.75),
            completed: c.len(),
            censored: 0,
        });
    }
    fit_log_log(per_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(model: Model) -> ExperimentPlan {
        ExperimentPlan {
            model,
            sizes: vec![8, 16, 32],
            epsilon: 0.3,
            replicates: 30,
            master_seed: 5,
            t_max: TMaxPolicy::Default,
            max_timeout_fraction: 0.5,
            outputs: OutputPaths::default(),
        }
    }

    #[test]
    fn plan_validation() {
        let mut p = plan(Model::GwTree { offspring: Offspring::Poisson1 });
        assert!(p.validate().is_ok());
        p.sizes = vec![16, 16];
        assert!(matches!(p.validate(), Err(HarnessError::InvalidPlan(_))));
        p.sizes = vec![8, 16];
        p.replicates = 10;
        assert!(p.validate().is_err());
    }

    #[test]
    fn duplicated_sizes_cannot_be_fitted() {
        let s = |size| SizeSummary { size, center: 10.0, q1: 9.0, q3: 11.0, completed: 30, censored: 0 };
        assert!(matches!(fit_log_log(vec![s(10), s(10), s(20)]), Err(HarnessError::DegenerateFit(_))));
        assert!(matches!(fit_log_log(vec![s(10), s(20)]), Err(HarnessError::DegenerateFit(_))));
    }

    #[test]
    fn replay_and_order_independence() {
        let p = plan(Model::GwTree { offspring: Offspring::Poisson1 });
        let a = run_scaling_experiment(&p).unwrap();
        let b = run_scaling_experiment(&p).unwrap();
        let strip = |r: &[ReplicateRecord]| r.iter().map(|x| (x.seed, x.tau_blanket, x.cover_time)).collect::<Vec<_>>();
        assert_eq!(strip(&a.records), strip(&b.records));
        let mut shuffled = a.records.clone();
        shuffled.reverse();
        assert_eq!(fit_records(&shuffled).unwrap(), a.fit);
        let r = &a.records[7];
        let again = run_replicate(&p.model, r.size, r.index, p.epsilon, p.t_max, p.master_seed).unwrap();
        assert_eq!(again.tau_blanket, r.tau_blanket);
        assert_eq!(r.seed, seed!(5; r.size, r.index));
    }

    #[test]
    fn plan_json() {
        let text = r#"{"model": {"kind": "er-component"}, "sizes": [64, 128, 256], "epsilon": 0.3,
                       "replicates": 40, "master_seed": 9, "t_max": {"multiple": 2.0}}"#;
        let p = ExperimentPlan::from_json(text).unwrap();
        assert_eq!(p.model, Model::ErComponent { lambda: 0.0 });
        assert_eq!(p.t_max, TMaxPolicy::Multiple(2.0));
        let back: ExperimentPlan = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(ExperimentPlan::from_json(&text.replace("epsilon", "epsilom")).is_err());
    }

    #[test]
    fn ks_table_needs_samples() {
        let mut m = BTreeMap::new();
        m.insert(1, vec![1.0; 250]);
        assert!(ks_convergence(&m).is_err());
        m.insert(2, vec![1.0; 100]);
        assert!(matches!(ks_convergence(&m), Err(HarnessError::InsufficientSamples { size: 2, .. })));
        m.insert(2, vec![1.0; 250]);
        let t = ks_convergence(&m).unwrap();
        assert_eq!(t.rows[0].ks, 0.0);
    }

    #[test]
    fn sandwich_on_shared_paths() {
        let c = epsilon_sandwich_check(&Model::GwTree { offspring: Offspring::Poisson1 }, 20, 0.2, 0.5, 50, 3).unwrap();
        assert_eq!(c.violations, 0);
        assert!(c.grid_points > 0);
    }

    #[test]
    fn continuum_records() {
        let r = run_replicate(&Model::ExcursionTree, 16, 0, 0.3, TMaxPolicy::Default, 1).unwrap();
        assert!(r.tau_blanket.is_some());
        assert!(r.cover_time.unwrap() <= r.tau_blanket.unwrap());
    }
}
