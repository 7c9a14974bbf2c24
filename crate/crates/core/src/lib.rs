//! Safe cooperative dynamics for two AGVs sharing a Y-shaped guidepath.
//!
//! The crate covers the discrete pattern layer on arbitrary graphs, edge
//! point fields for one vehicle, the two-vehicle configuration space of the
//! Y-graph with its punctured-disc model, and vector fields on it: a
//! circulating flow, a navigation field, tuned limit cycles and a
//! chord-switching controller that realizes monotone docking words.

pub mod chords;
pub mod cli;
pub mod cspace;
pub mod edge_fields;
pub mod flow;
pub mod graph;
pub mod patterns;
