//! Subcommands of the `blanket-lab` binary, runnable in-process.
//!
//! Each command turns a resolved [`Config`] into an [`Outputs`] bundle; writing
//! files and the manifest happens afterwards, so a replay can rebuild the
//! bundle and compare it against the recorded checksums.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use blanket_lab::compare::DkBound;
use blanket_lab::excursion::{continuum_blanket_samples, excursion_to_tree, sample_excursion};
use blanket_lab::gen::components_with_surplus;
use blanket_lab::graph::{parse_graph, write_graph, GraphStats};
use blanket_lab::harness::{dk_ladder, median, run_scaling_experiment, quantile, run_replicate, ExperimentPlan, HarnessError, Model, ReplicateRecord, SizeSummary, TMaxPolicy};
use blanket_lab::io::{
    emit_outputs, render_svg, replay_mismatches, sha256_hex, to_jsonl, Config, ConfigError, CsvTable, Format, IoError, KeySpec, Manifest, Outputs, Plot, SeedRegistry, SeedSource,
    ValueKind::{Float, Int, Json, Str},
};
use blanket_lab::tree::{contour_process, sample_conditioned_gw, Offspring};
use blanket_lab::walk::{blanket_time_variable, default_t_max, run_walk, LocalTimeField};
use blanket_lab::{seed, Graph};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
    #[error("timeout-dominated: {0}")]
    Timeouts(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
            CliError::Timeouts(_) => 4,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::TooManyTimeouts { .. } => CliError::Timeouts(e.to_string()),
            HarnessError::InvalidPlan(m) => CliError::Config(ConfigError::Malformed(m)),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub const COMMANDS: [&str; 8] = ["graph", "tree", "gen", "walk", "blanket", "excursion", "compare", "experiment"];

const GRAPH_KEYS: [KeySpec; 3] = [
    KeySpec::new("input", Str, r#""""#, "graph file (`n m` header, then `u v w` lines); empty samples `model`"),
    KeySpec::new("model", Json, r#"{"kind":"er-component"}"#, "model sampled when no input is given"),
    KeySpec::new("size", Int, "1024", "model size parameter"),
];

/// Documented keys of a command.
pub fn schema(command: &str) -> Option<Vec<KeySpec>> {
    let v = match command {
        "graph" => GRAPH_KEYS.to_vec(),
        "tree" => vec![
            KeySpec::new("offspring", Json, r#""poisson1""#, "offspring law: poisson1, geometric or {\"table\": [...]}"),
            KeySpec::new("n", Int, "256", "number of edges"),
            KeySpec::new("count", Int, "10", "number of trees"),
        ],
        "gen" => vec![
            KeySpec::new("model", Json, r#"{"kind":"er-component"}"#, "er-component or config-model"),
            KeySpec::new("size", Int, "4096", "number of vertices"),
            KeySpec::new("count", Int, "10", "number of graphs"),
        ],
        "walk" => {
            let mut k = GRAPH_KEYS.to_vec();
            k.push(KeySpec::new("start", Int, "0", "start vertex"));
            k.push(KeySpec::new("steps", Int, "10000", "number of steps"));
            k
        }
        "blanket" => {
            let mut k = GRAPH_KEYS.to_vec();
            k[1] = KeySpec::new("model", Json, r#"{"kind":"gw-tree"}"#, "model sampled afresh for every replicate when no input is given");
            k.push(KeySpec::new("epsilon", Float, "0.3", "blanket parameter in (0, 1)"));
            k.push(KeySpec::new("replicates", Int, "100", "number of walks"));
            k.push(KeySpec::new("t_max", Json, r#""default""#, "step budget: \"default\", {\"multiple\": k} or {\"fixed\": t}"));
            k
        }
        "excursion" => vec![
            KeySpec::new("zeta", Float, "1.0", "excursion length"),
            KeySpec::new("grid", Int, "4096", "grid intervals"),
            KeySpec::new("leaves", Int, "128", "sampled times of the discretized tree"),
            KeySpec::new("epsilon", Float, "0.3", "blanket parameter"),
            KeySpec::new("replicates", Int, "100", "continuum walks on the fixed tree"),
            KeySpec::new("t_max", Float, "0", "time budget; 0 means 64 ζ^{3/2}"),
        ],
        "compare" => vec![
            KeySpec::new("offspring", Json, r#""poisson1""#, "offspring law of the fine tree"),
            KeySpec::new("n_fine", Int, "1024", "edges of the fine tree"),
            KeySpec::new("ladder", Json, "[16, 64, 256]", "increasing sample counts"),
            KeySpec::new("horizon", Float, "1.0", "rescaled walk horizon"),
        ],
        "experiment" => vec![KeySpec::new("plan", Json, "null", "experiment plan object")],
        _ => return None,
    };
    Some(v)
}

/// Result of one command before anything is written.
pub struct Run {
    pub outputs: Outputs,
    /// SHA-256 of input files.
    pub inputs: BTreeMap<String, String>,
    /// Short human-readable report.
    pub report: String,
}

/// Runs the command in a thread pool of `config.threads` workers (0: default).
pub fn execute(config: &Config) -> Result<Run, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if config.threads > 0 {
        pool = pool.num_threads(config.threads);
    }
    let pool = pool.build().map_err(runtime)?;
    pool.install(|| match config.command.as_str() {
        "graph" => cmd_graph(config),
        "tree" => cmd_tree(config),
        "gen" => cmd_gen(config),
        "walk" => cmd_walk(config),
        "blanket" => cmd_blanket(config),
        "excursion" => cmd_excursion(config),
        "compare" => cmd_compare(config),
        "experiment" => cmd_experiment(config),
        other => Err(CliError::Config(ConfigError::Malformed(format!("unknown command `{other}`")))),
    })
}

/// Executes and writes outputs plus manifest.
pub fn run_and_emit(config: &Config) -> Result<(Manifest, String), CliError> {
    let run = execute(config)?;
    let manifest = emit_outputs(config, &run.outputs, run.inputs)?;
    Ok((manifest, run.report))
}

/// Re-executes the configuration recorded in a manifest and lists the files
/// that differ; with `out`, the replayed files are also written there.
pub fn replay(manifest_path: &Path, out: Option<PathBuf>, threads: Option<usize>) -> Result<Vec<String>, CliError> {
    let manifest = Manifest::load(manifest_path)?;
    for (path, sum) in &manifest.inputs {
        let bytes = fs::read(path).map_err(|e| runtime(format!("{path}: {e}")))?;
        if &sha256_hex(&bytes) != sum {
            return Err(runtime(format!("input {path} changed since the recorded run")));
        }
    }
    let mut config = manifest.config.clone();
    if let Some(t) = threads {
        config.threads = t;
    }
    let run = execute(&config)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let bad = replay_mismatches(&manifest, dir, &run.outputs)?;
    if let Some(o) = out {
        config.out = o;
        emit_outputs(&config, &run.outputs, run.inputs)?;
    }
    Ok(bad)
}

fn registry_counts(outputs: &mut Outputs, seeds: impl IntoIterator<Item = u64>) {
    let r = SeedRegistry::new();
    for s in seeds {
        r.register(s);
    }
    outputs.seeds_derived = r.len() as u64 + r.collisions();
    outputs.seed_collisions = r.collisions();
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// The input graph, or a sample of `model` with its start vertex.
fn load_graph(config: &Config, seed: u64, inputs: &mut BTreeMap<String, String>) -> Result<(Graph, usize), CliError> {
    let input = config.string("input")?;
    if input.is_empty() {
        let model: Model = config.get("model")?;
        return Ok(model.graph(config.usize("size")?, seed)?);
    }
    let bytes = fs::read(&input).map_err(|e| runtime(format!("{input}: {e}")))?;
    inputs.insert(input.clone(), sha256_hex(&bytes));
    let g: Graph = parse_graph(&String::from_utf8_lossy(&bytes)).map_err(runtime)?;
    Ok((g, 0))
}

#[derive(Serialize)]
struct VertexRow {
    vertex: usize,
    degree: usize,
    mu: f64,
}

fn cmd_graph(config: &Config) -> Result<Run, CliError> {
    let mut inputs = BTreeMap::new();
    let (g, _) = load_graph(config, seed!(config.master_seed; "graph"), &mut inputs)?;
    let s = GraphStats::of(&g);
    let rows: Vec<VertexRow> = (0..g.n_vertices()).map(|x| VertexRow { vertex: x, degree: g.degree(x), mu: g.vertex_weight(x) }).collect();
    let mut summary = CsvTable::new("blanket-lab/graph-summary/v1", &["n", "m", "total_mass", "diameter", "components"]);
    summary.push(vec![s.n.to_string(), s.m.to_string(), fmt(s.total_mass), s.diameter.to_string(), s.components.to_string()]);
    let mut outputs = Outputs::new(config.format, "blanket-lab/graph-vertices/v1", &rows, &summary, &[])?;
    outputs.add("graph.txt".into(), write_graph(&g).into_bytes());
    let report = format!("n={} m={} diameter={} components={}", s.n, s.m, s.diameter, s.components);
    Ok(Run { outputs, inputs, report })
}

#[derive(Serialize)]
struct TreeRow {
    index: usize,
    seed: u64,
    n_edges: usize,
    height: usize,
    leaves: usize,
    diameter: usize,
}

fn cmd_tree(config: &Config) -> Result<Run, CliError> {
    let offspring: Offspring = config.get("offspring")?;
    let (n, count) = (config.usize("n")?, config.usize("count")?);
    let seeds: Vec<u64> = (0..count).map(|i| seed!(config.master_seed; "tree", i)).collect();
    let trees = seeds.par_iter().map(|&s| sample_conditioned_gw(&offspring, n, s)).collect::<Result<Vec<_>, _>>().map_err(runtime)?;
    let mut rows = Vec::new();
    for (index, (t, &seed)) in trees.iter().zip(&seeds).enumerate() {
        let g = t.to_graph().map_err(runtime)?;
        let leaves = (0..t.n_vertices()).filter(|&v| t.is_leaf(v)).count();
        rows.push(TreeRow { index, seed, n_edges: t.n_edges(), height: t.height(), leaves, diameter: g.hop_diameter() });
    }
    let mut summary = CsvTable::new("blanket-lab/tree-summary/v1", &["count", "n_edges", "median_height", "median_diameter"]);
    let heights: Vec<f64> = rows.iter().map(|r| r.height as f64).collect();
    let diameters: Vec<f64> = rows.iter().map(|r| r.diameter as f64).collect();
    if !rows.is_empty() {
        summary.push(vec![count.to_string(), n.to_string(), fmt(median(&heights)), fmt(median(&diameters))]);
    }
    let mut plots = Vec::new();
    if let Some(t) = trees.first() {
        let c = contour_process(t);
        plots.push(("contour.svg".to_string(), Plot::Trace { title: "contour of tree 0".into(), values: c.values.iter().map(|&v| v as f64).collect() }));
    }
    let mut outputs = Outputs::new(config.format, "blanket-lab/tree-records/v1", &rows, &summary, &plots)?;
    if let Some(t) = trees.first() {
        outputs.add("tree-0.txt".into(), t.to_parent_text().into_bytes());
    }
    registry_counts(&mut outputs, seeds);
    let report = format!("{count} trees with {n} edges, median height {}", summary.rows.first().map_or("-".into(), |r| r[2].clone()));
    Ok(Run { outputs, inputs: BTreeMap::new(), report })
}

#[derive(Serialize)]
struct GenRow {
    index: usize,
    seed: u64,
    largest: usize,
    second: usize,
    largest_surplus: usize,
    components: usize,
}

fn cmd_gen(config: &Config) -> Result<Run, CliError> {
    use blanket_lab::gen::{sample_configuration_model, sample_degree_sequence, sample_er_critical};
    let model: Model = config.get("model")?;
    let (size, count) = (config.usize("size")?, config.usize("count")?);
    let seeds: Vec<u64> = (0..count).map(|i| seed!(config.master_seed; "gen", i)).collect();
    let rows = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &s)| {
            let g = match &model {
                Model::ErComponent { lambda } => sample_er_critical(size, *lambda, s).map_err(runtime)?,
                Model::ConfigModel { law } => {
                    let d = sample_degree_sequence(law, size, seed!(s; "degrees")).map_err(runtime)?;
                    sample_configuration_model(&d, seed!(s; "matching")).map_err(runtime)?
                }
                other => return Err(CliError::Config(ConfigError::Malformed(format!("gen samples random graphs, not {}", other.name())))),
            };
            let c = components_with_surplus(&g);
            let mut order: Vec<usize> = (0..c.sizes.len()).collect();
            order.sort_by(|&a, &b| c.sizes[b].cmp(&c.sizes[a]).then(a.cmp(&b)));
            Ok(GenRow {
                index,
                seed: s,
                largest: order.first().map_or(0, |&k| c.sizes[k]),
                second: order.get(1).map_or(0, |&k| c.sizes[k]),
                largest_surplus: order.first().map_or(0, |&k| c.surpluses[k]),
                components: c.sizes.len(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut summary = CsvTable::new("blanket-lab/gen-summary/v1", &["model", "size", "count", "mean_largest", "mean_largest_over_n23"]);
    if !rows.is_empty() {
        let mean = rows.iter().map(|r| r.largest as f64).sum::<f64>() / rows.len() as f64;
        summary.push(vec![model.name().into(), size.to_string(), count.to_string(), fmt(mean), fmt(mean / (size as f64).powf(2.0 / 3.0))]);
    }
    let mut outputs = Outputs::new(config.format, "blanket-lab/gen-records/v1", &rows, &summary, &[])?;
    registry_counts(&mut outputs, seeds);
    Ok(Run { outputs, inputs: BTreeMap::new(), report: format!("{count} draws of {} at n={size}", model.name()) })
}

#[derive(Serialize)]
struct LocalRow {
    vertex: usize,
    visits: u64,
    local_time: f64,
}

fn cmd_walk(config: &Config) -> Result<Run, CliError> {
    let mut inputs = BTreeMap::new();
    let (g, model_start) = load_graph(config, seed!(config.master_seed; "graph"), &mut inputs)?;
    let start = if config.string("input")?.is_empty() { model_start } else { config.usize("start")? };
    let steps = config.usize("steps")?;
    let path = run_walk(&g, start, steps, seed!(config.master_seed; "walk")).map_err(runtime)?;
    let field = LocalTimeField::from_path(&g, &path, steps).map_err(runtime)?;
    let rows: Vec<LocalRow> = (0..g.n_vertices()).map(|x| LocalRow { vertex: x, visits: field.count(x), local_time: field.value(x) }).collect();
    let visited = rows.iter().filter(|r| r.visits > 0).count();
    let mut summary = CsvTable::new("blanket-lab/walk-summary/v1", &["n", "start", "steps", "visited", "occupation_identity"]);
    summary.push(vec![g.n_vertices().to_string(), start.to_string(), steps.to_string(), visited.to_string(), field.occupation_identity_holds().to_string()]);
    let shown = path.steps.len().min(2000);
    let plots = [("trace.svg".to_string(), Plot::Trace { title: "walk position".into(), values: path.steps[..shown].iter().map(|&x| x as f64).collect() })];
    let outputs = Outputs::new(config.format, "blanket-lab/local-times/v1", &rows, &summary, &plots)?;
    Ok(Run { outputs, inputs, report: format!("{steps} steps from {start}, {visited} of {} vertices visited", g.n_vertices()) })
}

/// Median, quartiles and timeouts of possibly censored times.
fn censored_summary(times: &[Option<f64>]) -> (Option<f64>, Option<f64>, Option<f64>, usize) {
    let mut done: Vec<f64> = times.iter().flatten().copied().collect();
    done.sort_by(|a, b| a.total_cmp(b));
    let timeouts = times.len() - done.len();
    if done.is_empty() {
        return (None, None, None, timeouts);
    }
    (Some(quantile(&done, 0.25)), Some(quantile(&done, 0.5)), Some(quantile(&done, 0.75)), timeouts)
}

fn cmd_blanket(config: &Config) -> Result<Run, CliError> {
    let epsilon = config.f64("epsilon")?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ConfigError::TypeError { key: "epsilon".into(), expected: "a number in (0, 1)", found: epsilon.to_string() }.into());
    }
    let replicates = config.usize("replicates")?;
    let t_max: TMaxPolicy = config.get("t_max")?;
    let input = config.string("input")?;
    let master = config.master_seed;
    let mut inputs = BTreeMap::new();
    let (records, label) = if input.is_empty() {
        let model: Model = config.get("model")?;
        let size = config.usize("size")?;
        let r = (0..replicates).into_par_iter().map(|i| run_replicate(&model, size, i, epsilon, t_max, master)).collect::<Result<Vec<_>, _>>()?;
        (r, format!("{} n={size}", model.name()))
    } else {
        let (g, _) = load_graph(config, 0, &mut inputs)?;
        let start = 0;
        let budget = match t_max {
            TMaxPolicy::Default => default_t_max(&g) as f64,
            TMaxPolicy::Multiple(k) => (k * default_t_max(&g) as f64).ceil(),
            TMaxPolicy::Fixed(t) => t,
        };
        let r = (0..replicates)
            .into_par_iter()
            .map(|i| {
                let s = seed!(master; "blanket", i);
                let b = blanket_time_variable(&g, start, epsilon, budget as u64, s).map_err(runtime)?;
                Ok(ReplicateRecord {
                    model: "input".into(),
                    size: g.n_vertices(),
                    index: i,
                    seed: s,
                    n_vertices: g.n_vertices(),
                    epsilon,
                    t_max: budget,
                    tau_blanket: b.tau_blanket.map(|t| t as f64),
                    cover_time: b.cover_time.map(|t| t as f64),
                    wall_ms: 0.0,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        (r, input.clone())
    };
    let taus: Vec<Option<f64>> = records.iter().map(|r| r.tau_blanket).collect();
    let covers: Vec<Option<f64>> = records.iter().map(|r| r.cover_time).collect();
    let (q1, med, q3, timeouts) = censored_summary(&taus);
    let (_, cover_med, _, _) = censored_summary(&covers);
    let mut summary = CsvTable::new("blanket-lab/blanket-summary/v1", &["epsilon", "replicates", "timeouts", "q1", "median", "q3", "median_cover"]);
    summary.push(vec![fmt(epsilon), replicates.to_string(), timeouts.to_string(), opt(q1), opt(med), opt(q3), opt(cover_med)]);
    let samples: Vec<f64> = taus.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
    let plots = [("ecdf.svg".to_string(), Plot::Ecdf { title: format!("blanket time, {label}, eps={epsilon}"), series: vec![(label.clone(), samples)] })];
    let mut outputs = Outputs::new(config.format, "blanket-lab/blanket-records/v1", &records, &summary, &plots)?;
    registry_counts(&mut outputs, records.iter().map(|r| r.seed));
    if 2 * timeouts > replicates {
        return Err(CliError::Timeouts(format!("{timeouts} of {replicates} walks hit the step budget")));
    }
    Ok(Run { outputs, inputs, report: format!("{label}: median blanket time {} ({timeouts} timeouts)", opt(med)) })
}

#[derive(Serialize)]
struct ContinuumRow {
    index: usize,
    tau_blanket: Option<f64>,
    cover_time: Option<f64>,
    jumps: u64,
}

fn cmd_excursion(config: &Config) -> Result<Run, CliError> {
    let zeta = config.f64("zeta")?;
    let (grid, leaves, replicates) = (config.usize("grid")?, config.usize("leaves")?, config.usize("replicates")?);
    let epsilon = config.f64("epsilon")?;
    let e = sample_excursion(zeta, grid, seed!(config.master_seed; "excursion")).map_err(runtime)?;
    let tree = excursion_to_tree(&e, leaves).map_err(runtime)?;
    let t_max = match config.f64("t_max")? {
        t if t > 0.0 => t,
        _ => 64.0 * zeta.powf(1.5),
    };
    let walk_master = seed!(config.master_seed; "walks");
    let samples = continuum_blanket_samples(&tree, epsilon, replicates, t_max, walk_master).map_err(runtime)?;
    let rows: Vec<ContinuumRow> =
        samples.iter().enumerate().map(|(index, s)| ContinuumRow { index, tau_blanket: s.tau, cover_time: s.cover, jumps: s.jumps }).collect();
    let (q1, med, q3, timeouts) = censored_summary(&rows.iter().map(|r| r.tau_blanket).collect::<Vec<_>>());
    let mut summary =
        CsvTable::new("blanket-lab/excursion-summary/v1", &["zeta", "grid", "representatives", "height", "epsilon", "replicates", "timeouts", "q1", "median", "q3"]);
    summary.push(vec![
        fmt(zeta),
        grid.to_string(),
        tree.n_representatives().to_string(),
        fmt(e.max()),
        fmt(epsilon),
        replicates.to_string(),
        timeouts.to_string(),
        opt(q1),
        opt(med),
        opt(q3),
    ]);
    let plots = [
        ("excursion.svg".to_string(), Plot::Trace { title: "excursion".into(), values: e.values() }),
        ("ecdf.svg".to_string(), Plot::Ecdf { title: format!("continuum blanket time, eps={epsilon}"), series: vec![("tau".into(), rows.iter().map(|r| r.tau_blanket.unwrap_or(f64::INFINITY)).collect())] }),
    ];
    let mut outputs = Outputs::new(config.format, "blanket-lab/continuum-records/v1", &rows, &summary, &plots)?;
    outputs.add("excursion.csv".into(), e.to_csv().into_bytes());
    registry_counts(&mut outputs, (0..replicates).map(|i| seed!(walk_master; "continuum-blanket", i)));
    Ok(Run { outputs, inputs: BTreeMap::new(), report: format!("{} representatives, median blanket time {}", tree.n_representatives(), opt(med)) })
}

#[derive(Serialize)]
struct LadderRow {
    n_small: usize,
    n_large: usize,
    bound: DkBound,
}

fn cmd_compare(config: &Config) -> Result<Run, CliError> {
    let offspring: Offspring = config.get("offspring")?;
    let ladder: Vec<usize> = config.get("ladder")?;
    let steps = dk_ladder(&offspring, config.usize("n_fine")?, &ladder, config.f64("horizon")?, seed!(config.master_seed; "ladder"))?;
    let mut summary = CsvTable::new("blanket-lab/ladder-summary/v1", &["n_small", "n_large", "bound"]);
    for s in &steps {
        summary.push(vec![s.n_small.to_string(), s.n_large.to_string(), fmt(s.bound.total)]);
    }
    let rows: Vec<LadderRow> = steps.into_iter().map(|s| LadderRow { n_small: s.n_small, n_large: s.n_large, bound: s.bound }).collect();
    let report = rows.iter().map(|r| format!("{}->{}: {:.4}", r.n_small, r.n_large, r.bound.total)).collect::<Vec<_>>().join(", ");
    let outputs = Outputs::new(config.format, "blanket-lab/ladder-records/v1", &rows, &summary, &[])?;
    Ok(Run { outputs, inputs: BTreeMap::new(), report })
}

/// The plan in the configuration; an explicit seed (flag or file) replaces the plan's.
pub fn resolved_plan(config: &Config) -> Result<ExperimentPlan, CliError> {
    let raw = config.params.get("plan").cloned().unwrap_or_default();
    if raw.is_null() {
        return Err(ConfigError::Malformed("experiment needs a `plan` object".into()).into());
    }
    let mut plan: ExperimentPlan = serde_json::from_value(raw).map_err(|e| ConfigError::Malformed(format!("plan: {e}")))?;
    if config.seed_source != SeedSource::Entropy {
        plan.master_seed = config.master_seed;
    }
    plan.validate()?;
    Ok(plan)
}

fn cmd_experiment(config: &Config) -> Result<Run, CliError> {
    let plan = resolved_plan(config)?;
    let run = run_scaling_experiment(&plan)?;
    let fit = &run.fit;
    let mut summary = CsvTable::new("blanket-lab/scaling-summary/v1", &["size", "median", "q1", "q3", "completed", "censored"]);
    for SizeSummary { size, center, q1, q3, completed, censored } in &fit.per_size {
        summary.push(vec![size.to_string(), fmt(*center), fmt(*q1), fmt(*q3), completed.to_string(), censored.to_string()]);
    }
    let mut outputs = Outputs::default();
    let records_bytes = match config.format {
        Format::Jsonl => to_jsonl(&run.records)?,
        Format::Csv => CsvTable::from_records("blanket-lab/replicates/v1", &run.records)?.to_csv(),
    };
    outputs.add(plan.outputs.records.clone(), records_bytes.into_bytes());
    outputs.add(plan.outputs.summary.clone(), summary.to_csv().into_bytes());
    let mut fit_text = serde_json::to_string_pretty(fit).map_err(IoError::from)?;
    fit_text.push('\n');
    outputs.add("fit.json".into(), fit_text.into_bytes());
    if let Some(name) = &plan.outputs.plot {
        let points = fit.per_size.iter().map(|s| (s.size as f64, s.center)).collect();
        let plot = Plot::LogLog { title: format!("{} median blanket time, slope {:.3}", plan.model.name(), fit.slope), points, fit: Some((fit.slope, fit.intercept)) };
        outputs.add(name.clone(), render_svg(&plot).into_bytes());
    }
    registry_counts(&mut outputs, run.records.iter().map(|r| r.seed));
    let report = format!("slope {:.4} ± {:.4} over sizes {:?}", fit.slope, fit.stderr, plan.sizes);
    Ok(Run { outputs, inputs: BTreeMap::new(), report })
}
