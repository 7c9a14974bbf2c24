use std::fmt;

use serde::{Deserialize, Serialize};

use super::CspaceError;
use crate::graph::{graph_distance, EdgeId, GraphPoint};

pub const DEFAULT_DELTA: f64 = 0.02;

/// Positions of the two AGVs on the Y-graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub x: GraphPoint,
    pub y: GraphPoint,
}

impl Config {
    /// A configuration at least `delta` away from the diagonal.
    pub fn new(x: GraphPoint, y: GraphPoint, delta: f64) -> Result<Self, CspaceError> {
        let c = Config {
            x: x.canonicalize()?,
            y: y.canonicalize()?,
        };
        let d = c.separation();
        if d < delta {
            return Err(CspaceError::InsideGuard { distance: d, delta });
        }
        Ok(c)
    }

    /// Shorthand for tests and fixtures; indices 1..=3, index 0 is the hub.
    pub fn at(ix: usize, nx: f64, iy: usize, ny: f64) -> Result<Self, CspaceError> {
        let pt = |i: usize, v: f64| {
            if i == 0 {
                Ok(GraphPoint::CENTER)
            } else {
                GraphPoint::on(i, v)
            }
        };
        Config::new(pt(ix, nx)?, pt(iy, ny)?, 0.0)
    }

    pub fn separation(&self) -> f64 {
        graph_distance(self.x, self.y)
    }

    pub fn nu(&self) -> (f64, f64) {
        (self.x.value, self.y.value)
    }

    pub fn is_fin(&self) -> bool {
        self.x.edge.is_some() && self.x.edge == self.y.edge
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} y={}", self.x, self.y)
    }
}

/// Distance in the product of the two graph metrics.
pub fn product_distance(a: &Config, b: &Config) -> f64 {
    graph_distance(a.x, b.x).hypot(graph_distance(a.y, b.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FinSide {
    /// x closer to the hub than y.
    XBelow,
    YBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellId {
    Square(EdgeId, EdgeId),
    Fin(EdgeId, FinSide),
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellId::Square(i, j) => write!(f, "D{}{}", i.0, j.0),
            CellId::Fin(i, FinSide::XBelow) => write!(f, "F{}xy", i.0),
            CellId::Fin(i, FinSide::YBelow) => write!(f, "F{}yx", i.0),
        }
    }
}

/// Cell containing `c`. A vehicle at the hub belongs to the square on the
/// clockwise side of its seam in the disc model: `x` at the hub with `y` on
/// edge `j` gives `D(j-1, j)`, `y` at the hub with `x` on `i` gives
/// `D(i, i-1)`.
pub fn cell_of(c: &Config) -> CellId {
    match (c.x.edge, c.y.edge) {
        (Some(i), Some(j)) if i == j => {
            let side = if c.x.value < c.y.value {
                FinSide::XBelow
            } else {
                FinSide::YBelow
            };
            CellId::Fin(i, side)
        }
        (Some(i), Some(j)) => CellId::Square(i, j),
        (None, Some(j)) => CellId::Square(j.y_prev(), j),
        (Some(i), None) => CellId::Square(i, i.y_prev()),
        (None, None) => CellId::Square(EdgeId(1), EdgeId(2)),
    }
}
