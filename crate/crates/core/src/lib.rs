//! Simulation laboratory for blanket times, cover times and local times of
//! random walks on critical random graphs, random trees and their continuum
//! approximations.

pub mod compare;
pub mod excursion;
pub mod gen;
pub mod graph;
pub mod harness;
pub mod io;
pub mod walk;
pub mod scalar;
pub mod tree;

pub use scalar::Real;

/// `f64` weighted graph.
pub type Graph = graph::WeightedGraph<f64>;
/// `f64` dense metric.
pub type Metric = graph::MetricMatrix<f64>;
