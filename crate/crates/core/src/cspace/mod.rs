//! Two-AGV configuration space of the Y-graph.
//!
//! The unfinned region (vehicles on different edges) is modelled as the
//! punctured unit disc: six wedges, one per ordered edge pair, glued along
//! seam rays where one vehicle sits at the hub. The unit circle is the
//! docking boundary, cut into twelve zones.

mod config;
mod disc;
mod grammar;
mod winding;

use thiserror::Error;

use crate::graph::GraphError;

pub use config::{cell_of, product_distance, CellId, Config, FinSide, DEFAULT_DELTA};
pub use disc::{
    from_disc, parity, reduce_angle, seam_angles, seam_distance, to_disc, wedge_cell,
    wedge_indices, DiscPoint,
};
pub use grammar::{
    boundary_angle, corner_half_width, docking_symbol, is_monotone, monotone_orientation, monotone_words,
    GrammarSymbol, Word, ZoneArc, CYCLIC_ORDER, DEFAULT_TOL,
};
pub use winding::{
    angle_step, gap_angles, gap_angles_of, lifted_ray_crossings, optimal_winding_class,
    unwrapped_angles, wd_cost, winding_number, WindingClass,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CspaceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("configuration within {distance} of the diagonal (guard {delta})")]
    InsideGuard { distance: f64, delta: f64 },
    #[error("fin configurations have no disc image")]
    FinHasNoDiscImage,
    #[error("both vehicles at the hub")]
    BothAtCenter,
    #[error("radius {0} outside (0, 1]")]
    RadiusOutOfRange(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("bad symbol token `{0}`")]
    BadToken(String),
    #[error("empty word")]
    EmptyWord,
    #[error("degenerate polyline")]
    DegeneratePath,
    #[error("polyline is not closed")]
    OpenPath,
    #[error("gap angles sum to {0}, not one turn")]
    GapSum(f64),
}
