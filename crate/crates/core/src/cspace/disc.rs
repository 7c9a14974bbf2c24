use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{CellId, Config, CspaceError};
use crate::graph::{EdgeId, GraphPoint};

/// Below this a coordinate produced by the inverse map is the hub.
const SNAP: f64 = 1e-13;

/// Polar coordinates in the punctured-disc model of the unfinned region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint {
    pub r: f64,
    pub theta: f64,
}

impl DiscPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self, CspaceError> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(CspaceError::RadiusOutOfRange(r));
        }
        if !theta.is_finite() {
            return Err(CspaceError::NonFinite);
        }
        Ok(DiscPoint {
            r,
            theta: reduce_angle(theta),
        })
    }

    pub fn cartesian(&self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

/// Angle reduced to `[0, 2pi)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// `+1` where `x` sets the radius, `-1` where `y` does.
pub fn parity(theta: f64) -> i8 {
    let t = reduce_angle(theta);
    let k = (3.0 * t / PI).floor() as i64 + (6.0 * t / PI).floor() as i64;
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn index_mod3(v: f64) -> EdgeId {
    match (v.floor() as i64).rem_euclid(3) {
        0 => EdgeId(3),
        k => EdgeId(k as usize),
    }
}

/// Edge indices `(x, y)` of the wedge containing `theta`. On a seam the
/// index of the vehicle at the hub is arbitrary.
pub fn wedge_indices(theta: f64) -> (EdgeId, EdgeId) {
    let t = reduce_angle(theta);
    (
        index_mod3(-3.0 * (t - PI) / TAU),
        index_mod3(-3.0 * t / TAU),
    )
}

/// Square cell of the open wedge containing `theta`.
pub fn wedge_cell(theta: f64) -> CellId {
    let (i, j) = wedge_indices(theta);
    CellId::Square(i, j)
}

pub fn to_disc(c: &Config) -> Result<DiscPoint, CspaceError> {
    if c.is_fin() {
        return Err(CspaceError::FinHasNoDiscImage);
    }
    let (nx, ny) = c.nu();
    if nx == 0.0 && ny == 0.0 {
        return Err(CspaceError::BothAtCenter);
    }
    let a = ny.atan2(nx);
    let theta = match (c.x.edge, c.y.edge) {
        (None, Some(j)) => (2.0 / 3.0) * a - (TAU / 3.0) * (j.0 as f64 + 1.0),
        (Some(i), None) => -(2.0 / 3.0) * a - (TAU / 3.0) * (i.0 as f64 - 1.0),
        (Some(i), Some(j)) if j == i.y_next() => {
            (2.0 / 3.0) * a - (TAU / 3.0) * (j.0 as f64 + 1.0)
        }
        (Some(i), Some(_)) => -(2.0 / 3.0) * a - (TAU / 3.0) * (i.0 as f64 - 1.0),
        (None, None) => unreachable!("checked above"),
    };
    let theta = reduce_angle(theta);
    let r = if parity(theta) == 1 { nx } else { ny };
    Ok(DiscPoint { r, theta })
}

pub fn from_disc(d: DiscPoint) -> Result<Config, CspaceError> {
    let d = DiscPoint::new(d.r, d.theta)?;
    let s = 1.5 * d.theta;
    let (mut nx, mut ny) = if parity(d.theta) == 1 {
        (d.r, d.r * s.tan().abs().min(1.0))
    } else {
        (d.r * (1.0 / s.tan()).abs().min(1.0), d.r)
    };
    if nx < SNAP {
        nx = 0.0;
    }
    if ny < SNAP {
        ny = 0.0;
    }
    let (ix, iy) = wedge_indices(d.theta);
    let pt = |e: EdgeId, v: f64| {
        if v == 0.0 {
            GraphPoint::CENTER
        } else {
            GraphPoint {
                edge: Some(e),
                value: v,
            }
        }
    };
    Ok(Config {
        x: pt(ix, nx),
        y: pt(iy, ny),
    })
}

/// Seam angles `n pi / 3` where one vehicle sits at the hub.
pub fn seam_angles() -> [f64; 6] {
    std::array::from_fn(|n| n as f64 * PI / 3.0)
}

/// Angular distance from `theta` to the nearest seam.
pub fn seam_distance(theta: f64) -> f64 {
    let t = reduce_angle(theta) % (PI / 3.0);
    t.min(PI / 3.0 - t)
}
