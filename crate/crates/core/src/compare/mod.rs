//! Finite-data versions of the comparison metrics: Prokhorov, Skorokhod `J1`,
//! correspondence distortion and an upper bound for the extended
//! Gromov–Hausdorff distance between (space, measure, path, local times) quadruples.

mod prokhorov;
mod skorokhod;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::excursion::DiscretizedContinuumTree;
use crate::graph::{MetricKind, MetricMatrix};
use crate::tree::ContourPath;

pub use prokhorov::{prokhorov_coupling_bound, prokhorov_distance, Prokhorov, PROKHOROV_EXACT_LIMIT, PROKHOROV_SIZE_LIMIT};
pub use skorokhod::{skorokhod_j1, uniform_distance, MAX_BREAKPOINTS};

/// A finite metric space on points `0..size()`.
pub trait FiniteMetric {
    fn size(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;
}

impl FiniteMetric for MetricMatrix<f64> {
    fn size(&self) -> usize {
        self.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// A metric given by a distance function, for spaces too large to tabulate.
pub struct FnMetric<F> {
    pub n: usize,
    pub d: F,
}

impl<F: Fn(usize, usize) -> f64> FiniteMetric for FnMetric<F> {
    fn size(&self) -> usize {
        self.n
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        (self.d)(i, j)
    }
}

/// Points of the shared grid on which local times are compared.
pub const LOCAL_TIME_GRID: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error("support of size {size} exceeds the limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("path has {0} breakpoints (limit {1})")]
    TooManyBreakpoints(usize, usize),
    #[error("paths live on different horizons ({0} vs {1})")]
    HorizonMismatch(f64, f64),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("measure masses must be finite and nonnegative")]
    InvalidMeasure,
    #[error("point id out of range")]
    PointOutOfRange,
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("not a correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("object carries no time parameterization")]
    MissingParameterization,
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for CompareError {
    fn from(e: serde_json::Error) -> Self {
        CompareError::Json(e.to_string())
    }
}

/// Right-continuous piecewise-constant path on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcPath {
    pub jumps: Vec<f64>,
    pub values: Vec<usize>,
    pub horizon: f64,
}

impl PcPath {
    pub fn new(jumps: Vec<f64>, values: Vec<usize>, horizon: f64) -> Result<Self, CompareError> {
        if values.len() != jumps.len() + 1 {
            return Err(CompareError::MalformedPath("need one more value than jumps".into()));
        }
        if !(horizon > 0.0) || jumps.iter().any(|&t| !(t > 0.0 && t < horizon)) {
            return Err(CompareError::MalformedPath("jump times must lie in (0, horizon)".into()));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CompareError::MalformedPath("jump times must increase".into()));
        }
        Ok(Self { jumps, values, horizon })
    }

    pub fn constant(value: usize, horizon: f64) -> Self {
        Self { jumps: Vec::new(), values: vec![value], horizon }
    }

    /// `X_k` held on `[k·dt, (k+1)·dt)`, cut at `horizon`; repeated states do not jump.
    pub fn from_steps(states: &[usize], dt: f64, horizon: f64) -> Result<Self, CompareError> {
        if states.is_empty() || !(dt > 0.0) {
            return Err(CompareError::MalformedPath("empty walk or nonpositive step".into()));
        }
        let mut jumps = Vec::new();
        let mut values = vec![states[0]];
        for (k, &x) in states.iter().enumerate().skip(1) {
            let t = k as f64 * dt;
            if t >= horizon {
                break;
            }
            if x != *values.last().unwrap() {
                jumps.push(t);
                values.push(x);
            }
        }
        Self::new(jumps, values, horizon)
    }

    pub fn value_at(&self, t: f64) -> usize {
        self.values[self.jumps.partition_point(|&s| s <= t)]
    }

    /// The same path with point ids passed through `f`.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Self {
        Self { jumps: self.jumps.clone(), values: self.values.iter().map(|&v| f(v)).collect(), horizon: self.horizon }
    }
}

/// Per-point piecewise-linear local times on shared knots `0 = t_0 < … < t_r = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeTable {
    pub knots: Vec<f64>,
    /// `values[x][i]` is the local time of point `x` at `knots[i]`.
    pub values: Vec<Vec<f64>>,
}

impl LocalTimeTable {
    pub fn horizon(&self) -> f64 {
        *self.knots.last().unwrap_or(&0.0)
    }

    pub fn at(&self, x: usize, t: f64) -> f64 {
        let k = &self.knots;
        let v = &self.values[x];
        if k.len() == 1 || t <= k[0] {
            return v[0];
        }
        let i = k.partition_point(|&s| s <= t);
        if i >= k.len() {
            return *v.last().unwrap();
        }
        let f = (t - k[i - 1]) / (k[i] - k[i - 1]);
        v[i - 1] + f * (v[i] - v[i - 1])
    }

    /// Local times of a walk: after `k` steps, `L(x) = space_scale · count(x) / μ_x`, at
    /// time `k · time_step`, sampled at `knots` equally spaced knots on `[0, horizon]`.
    pub fn from_walk(states: &[usize], mu: &[f64], space_scale: f64, time_step: f64, horizon: f64, knots: usize) -> Self {
        let n = mu.len();
        let knots = knots.max(2);
        let grid: Vec<f64> = (0..knots).map(|i| horizon * i as f64 / (knots - 1) as f64).collect();
        let mut counts = vec![0u64; n];
        let mut values = vec![Vec::with_capacity(knots); n];
        let mut steps = 0usize;
        for &t in &grid {
            // counts over X_0 … X_{k−1} with k = ⌊t / time_step⌋; the linear interpolation between knots follows
            let k = ((t / time_step).floor() as usize).min(states.len());
            while steps < k {
                counts[states[steps]] += 1;
                steps += 1;
            }
            for x in 0..n {
                values[x].push(space_scale * counts[x] as f64 / mu[x]);
            }
        }
        Self { knots: grid, values }
    }
}

/// A finite pointed space with a measure, a path and local times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadruple {
    pub space: MetricMatrix<f64>,
    pub measure: Vec<f64>,
    pub path: PcPath,
    pub local_times: LocalTimeTable,
    pub root: usize,
}

impl Quadruple {
    pub fn validate(&self) -> Result<(), CompareError> {
        let n = self.space.len();
        if self.measure.len() != n {
            return Err(CompareError::LengthMismatch { expected: n, got: self.measure.len() });
        }
        if self.local_times.values.len() != n {
            return Err(CompareError::LengthMismatch { expected: n, got: self.local_times.values.len() });
        }
        if self.measure.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
            return Err(CompareError::InvalidMeasure);
        }
        if self.root >= n || self.path.values.iter().any(|&v| v >= n) {
            return Err(CompareError::PointOutOfRange);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, CompareError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CompareError> {
        let q: Self = serde_json::from_str(text)?;
        q.validate()?;
        Ok(q)
    }
}

/// A relation covering both point sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>, n_a: usize, n_b: usize) -> Result<Self, CompareError> {
        let mut seen_a = vec![false; n_a];
        let mut seen_b = vec![false; n_b];
        for &(x, y) in &pairs {
            if x >= n_a || y >= n_b {
                return Err(CompareError::PointOutOfRange);
            }
            seen_a[x] = true;
            seen_b[y] = true;
        }
        if let Some(x) = seen_a.iter().position(|s| !s) {
            return Err(CompareError::InvalidCorrespondence(format!("point {x} of the first space is unmatched")));
        }
        if let Some(y) = seen_b.iter().position(|s| !s) {
            return Err(CompareError::InvalidCorrespondence(format!("point {y} of the second space is unmatched")));
        }
        let mut pairs = pairs;
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self { pairs })
    }

    pub fn identity(n: usize) -> Self {
        Self { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn transposed(&self) -> Self {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }
}

/// `sup |d_A(x, y) − d_B(x', y')|` over pairs of matched pairs.
pub fn correspondence_distortion<A: FiniteMetric + ?Sized, B: FiniteMetric + ?Sized>(c: &Correspondence, da: &A, db: &B) -> f64 {
    let mut worst = 0.0f64;
    for (i, &(x, xp)) in c.pairs.iter().enumerate() {
        for &(y, yp) in &c.pairs[i + 1..] {
            worst = worst.max((da.dist(x, y) - db.dist(xp, yp)).abs());
        }
    }
    worst
}

/// Step parameterization of a space by `[0, 1]`: the point at `s` is the one of the
/// last breakpoint at or before `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameterization {
    pub times: Vec<f64>,
    pub points: Vec<usize>,
}

impl Parameterization {
    pub fn of_contour(c: &ContourPath) -> Self {
        let m = (c.values.len() - 1).max(1) as f64;
        Self { times: (0..c.values.len()).map(|i| i as f64 / m).collect(), points: c.vertices.clone() }
    }

    pub fn of_tree(t: &DiscretizedContinuumTree) -> Self {
        let (times, points) = t.parameterization();
        Self { times, points }
    }

    pub fn point_at(&self, s: f64) -> usize {
        let i = self.times.partition_point(|&t| t <= s + 1e-12);
        self.points[i.saturating_sub(1)]
    }
}

/// Pairs the points seen at equal normalized times. The grid defaults to the union
/// of both breakpoint sets, which makes the relation surjective on both sides.
pub fn contour_correspondence(a: &Parameterization, b: &Parameterization, grid: Option<&[f64]>) -> Result<Correspondence, CompareError> {
    if a.times.is_empty() || b.times.is_empty() {
        return Err(CompareError::MissingParameterization);
    }
    let mut times: Vec<f64> = grid.map(|g| g.to_vec()).unwrap_or_default();
    // first hitting times of every point keep the relation onto
    let firsts = |p: &Parameterization| {
        let mut seen = std::collections::HashSet::new();
        p.times.iter().zip(&p.points).filter(|(_, x)| seen.insert(**x)).map(|(t, _)| *t).collect::<Vec<_>>()
    };
    times.extend(firsts(a));
    times.extend(firsts(b));
    if grid.is_none() {
        times.extend(a.times.iter().chain(&b.times));
    }
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    times.dedup();
    let mut pairs: Vec<(usize, usize)> = times.iter().map(|&s| (a.point_at(s), b.point_at(s))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(Correspondence { pairs })
}

/// The four terms of the bound and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkBound {
    pub prokhorov: f64,
    pub prokhorov_exact: bool,
    pub skorokhod: f64,
    pub displacement: f64,
    pub local_times: f64,
    pub total: f64,
}

/// The disjoint union of two spaces with `d(a, b) = min_{(x,x')∈C} d_A(a,x) + r + d_B(x',b)`
/// across, `r` half the distortion of `C`. A point `b` of the second space has id `n_A + b`.
pub fn sum_space(da: &MetricMatrix<f64>, db: &MetricMatrix<f64>, c: &Correspondence) -> MetricMatrix<f64> {
    let (na, nb) = (da.len(), db.len());
    let r = correspondence_distortion(c, da, db) / 2.0;
    let mut cross = vec![f64::INFINITY; na * nb];
    for a in 0..na {
        for &(x, xp) in &c.pairs {
            let base = da.get(a, x) + r;
            let row = &mut cross[a * nb..(a + 1) * nb];
            for (b, slot) in row.iter_mut().enumerate() {
                let v = base + db.get(xp, b);
                if v < *slot {
                    *slot = v;
                }
            }
        }
    }
    MetricMatrix::from_fn(MetricKind::ShortestPath, na + nb, |i, j| match (i < na, j < na) {
        (true, true) => da.get(i, j),
        (false, false) => db.get(i - na, j - na),
        (true, false) => cross[i * nb + (j - na)],
        (false, true) => cross[j * nb + (i - na)],
    })
}

/// Upper bound on the extended Gromov–Hausdorff distance for a given correspondence,
/// realised in the sum space of the correspondence.
pub fn dk_upper_bound(qa: &Quadruple, qb: &Quadruple, c: &Correspondence, pointed: bool) -> Result<DkBound, CompareError> {
    qa.validate()?;
    qb.validate()?;
    let (na, nb) = (qa.space.len(), qb.space.len());
    let c = Correspondence::new(c.pairs.clone(), na, nb)?;
    if pointed && !c.contains((qa.root, qb.root)) {
        return Err(CompareError::InvalidCorrespondence("roots are not matched".into()));
    }
    if qa.path.horizon != qb.path.horizon {
        return Err(CompareError::HorizonMismatch(qa.path.horizon, qb.path.horizon));
    }
    let z = sum_space(&qa.space, &qb.space, &c);
    let mut mu = qa.measure.clone();
    mu.extend(std::iter::repeat(0.0).take(nb));
    let mut nu = vec![0.0; na];
    nu.extend(&qb.measure);
    let p = prokhorov_distance(&mu, &nu, &z, false)?;
    let s = skorokhod_j1(&qa.path, &qb.path.relabel(|v| v + na), &z)?;
    let displacement = c.pairs.iter().map(|&(x, y)| z.get(x, na + y)).fold(0.0, f64::max);
    let local_times = local_time_gap(&qa.local_times, &qb.local_times, &c, qa.path.horizon);
    Ok(DkBound {
        prokhorov: p.value,
        prokhorov_exact: p.exact,
        skorokhod: s,
        displacement,
        local_times,
        total: p.value + s + displacement + local_times,
    })
}

/// One side of a comparison inside a common ambient space: local point `i` sits at
/// `embedding[i]`; path values and local-time rows are local ids.
#[derive(Debug, Clone, Copy)]
pub struct Embedded<'a> {
    pub embedding: &'a [usize],
    pub measure: &'a [f64],
    pub path: &'a PcPath,
    pub local_times: &'a LocalTimeTable,
    pub root: usize,
}

impl Embedded<'_> {
    fn validate<M: FiniteMetric + ?Sized>(&self, z: &M) -> Result<(), CompareError> {
        let n = self.embedding.len();
        for len in [self.measure.len(), self.local_times.values.len()] {
            if len != n {
                return Err(CompareError::LengthMismatch { expected: n, got: len });
            }
        }
        if self.measure.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
            return Err(CompareError::InvalidMeasure);
        }
        if self.root >= n || self.path.values.iter().any(|&v| v >= n) || self.embedding.iter().any(|&p| p >= z.size()) {
            return Err(CompareError::PointOutOfRange);
        }
        Ok(())
    }
}

/// Upper bound on the extended Gromov–Hausdorff distance for two spaces already
/// embedded in `z`. The Prokhorov term is bounded through `coupling`, a list of
/// `(x, y, mass)` whose marginals are the two measures.
pub fn dk_upper_bound_in<M: FiniteMetric + ?Sized>(
    z: &M,
    a: Embedded<'_>,
    b: Embedded<'_>,
    c: &Correspondence,
    coupling: &[(usize, usize, f64)],
    pointed: bool,
) -> Result<DkBound, CompareError> {
    a.validate(z)?;
    b.validate(z)?;
    let c = Correspondence::new(c.pairs.clone(), a.embedding.len(), b.embedding.len())?;
    if pointed && !c.contains((a.root, b.root)) {
        return Err(CompareError::InvalidCorrespondence("roots are not matched".into()));
    }
    if a.path.horizon != b.path.horizon {
        return Err(CompareError::HorizonMismatch(a.path.horizon, b.path.horizon));
    }
    let (mut ma, mut mb) = (vec![0.0; a.measure.len()], vec![0.0; b.measure.len()]);
    for &(x, y, m) in coupling {
        if x >= ma.len() || y >= mb.len() {
            return Err(CompareError::PointOutOfRange);
        }
        ma[x] += m;
        mb[y] += m;
    }
    let total: f64 = a.measure.iter().sum::<f64>().max(b.measure.iter().sum());
    let off = |got: &[f64], want: &[f64]| got.iter().zip(want).any(|(g, w)| (g - w).abs() > 1e-9 * total.max(1.0));
    if off(&ma, a.measure) || off(&mb, b.measure) {
        return Err(CompareError::InvalidMeasure);
    }
    let in_z: Vec<(usize, usize, f64)> = coupling.iter().map(|&(x, y, m)| (a.embedding[x], b.embedding[y], m)).collect();
    let prokhorov = prokhorov_coupling_bound(&in_z, z);
    let skorokhod = skorokhod_j1(&a.path.relabel(|v| a.embedding[v]), &b.path.relabel(|v| b.embedding[v]), z)?;
    let displacement = c.pairs.iter().map(|&(x, y)| z.dist(a.embedding[x], b.embedding[y])).fold(0.0, f64::max);
    let local_times = local_time_gap(a.local_times, b.local_times, &c, a.path.horizon);
    Ok(DkBound {
        prokhorov,
        prokhorov_exact: false,
        skorokhod,
        displacement,
        local_times,
        total: prokhorov + skorokhod + displacement + local_times,
    })
}

fn local_time_gap(la: &LocalTimeTable, lb: &LocalTimeTable, c: &Correspondence, horizon: f64) -> f64 {
    let grid: Vec<f64> = (0..LOCAL_TIME_GRID).map(|i| horizon * i as f64 / (LOCAL_TIME_GRID - 1) as f64).collect();
    c.pairs
        .iter()
        .map(|&(x, y)| grid.iter().map(|&t| (la.at(x, t) - lb.at(y, t)).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}
