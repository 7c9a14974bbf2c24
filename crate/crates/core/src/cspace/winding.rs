use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{CspaceError, DiscPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindingClass {
    Zero,
    PlusMinusOne,
}

/// Signed angle from `a` to `b` in `(-pi, pi]`.
pub fn angle_step(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Continuous lift of the polar angle along a polyline, one entry per
/// vertex, starting at the first vertex's reduced angle.
pub fn unwrapped_angles(path: &[DiscPoint]) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.len());
    let Some(first) = path.first() else {
        return out;
    };
    let mut phi = first.theta;
    out.push(phi);
    for w in path.windows(2) {
        let (ax, ay) = w[0].cartesian();
        let (bx, by) = w[1].cartesian();
        phi += (ax * by - ay * bx).atan2(ax * bx + ay * by);
        out.push(phi);
    }
    out
}

pub fn winding_number(path: &[DiscPoint]) -> Result<i32, CspaceError> {
    if path.len() < 3 {
        return Err(CspaceError::DegeneratePath);
    }
    let (f, l) = (path[0], path[path.len() - 1]);
    let (fx, fy) = f.cartesian();
    let (lx, ly) = l.cartesian();
    if (fx - lx).hypot(fy - ly) > 1e-9 {
        return Err(CspaceError::OpenPath);
    }
    let length: f64 = path
        .windows(2)
        .map(|w| {
            let (ax, ay) = w[0].cartesian();
            let (bx, by) = w[1].cartesian();
            (ax - bx).hypot(ay - by)
        })
        .sum();
    if length < 1e-12 {
        return Err(CspaceError::DegeneratePath);
    }
    let phi = unwrapped_angles(path);
    Ok(((phi[phi.len() - 1] - phi[0]) / TAU).round() as i32)
}

/// Successive angular gaps between time-ordered points on the circle.
pub fn gap_angles(angles: &[f64]) -> Result<Vec<f64>, CspaceError> {
    if angles.is_empty() {
        return Err(CspaceError::DegeneratePath);
    }
    if angles.len() == 1 {
        return Ok(vec![TAU]);
    }
    let n = angles.len();
    let gaps: Vec<f64> = (0..n)
        .map(|k| (angles[(k + 1) % n] - angles[k]).rem_euclid(TAU))
        .collect();
    let sum: f64 = gaps.iter().sum();
    if (sum - TAU).abs() > 1e-9 {
        return Err(CspaceError::GapSum(sum));
    }
    Ok(gaps)
}

pub fn gap_angles_of(points: &[DiscPoint]) -> Result<Vec<f64>, CspaceError> {
    gap_angles(&points.iter().map(|p| p.theta).collect::<Vec<_>>())
}

/// Crossings of the seam rays `n pi / 3` by a polyline of straight
/// segments. A vertex lying on a ray counts once, whether the path crosses
/// there or turns back.
pub fn wd_cost(path: &[DiscPoint]) -> usize {
    lifted_ray_crossings(&unwrapped_angles(path), PI / 3.0)
}

/// Level crossings of a lifted angle sequence for levels `k * spacing`,
/// counting each segment over the half-open range it advances into.
pub fn lifted_ray_crossings(phi: &[f64], spacing: f64) -> usize {
    let eps = 1e-12;
    let mut count = 0i64;
    for w in phi.windows(2) {
        let (a, b) = (w[0] / spacing, w[1] / spacing);
        if b > a {
            // Levels in (a, b].
            count += ((b + eps).floor() - (a + eps).floor()) as i64;
        } else if b < a {
            // Levels in [b, a).
            count += ((a - eps).ceil() - (b - eps).ceil()) as i64;
        }
    }
    count as usize
}

pub fn optimal_winding_class(gaps: &[f64]) -> WindingClass {
    if gaps.iter().any(|&g| g > PI) {
        WindingClass::Zero
    } else {
        WindingClass::PlusMinusOne
    }
}
