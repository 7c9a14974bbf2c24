//! Checks that a piecewise field generates a semiflow: at each hub the
//! one-sided speeds agree, exactly one edge is outgoing, and the vehicle
//! standing still sees the same velocity from every side.

use std::fmt;

use super::{FlowError, PiecewiseField};
use crate::cspace::{cell_of, CellId, Config};
use crate::graph::{EdgeId, GraphPoint};

const TOL: f64 = 1e-9;
/// Offset from the hub used for one-sided limits.
const LIMIT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(rate: f64) -> Sign {
        if rate > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    Coverage(CellId),
    Evaluation(String),
    SpeedMismatch(Vec<f64>),
    /// Number of outgoing edges when it should be one.
    Outgoing(usize),
    /// Velocity of the resting vehicle seen from each side.
    RestMismatch(Vec<f64>),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::Coverage(c) => write!(f, "no velocity on cell {c}"),
            ViolationKind::Evaluation(e) => write!(f, "evaluation failed: {e}"),
            ViolationKind::SpeedMismatch(s) => write!(f, "speeds differ: {s:?}"),
            ViolationKind::Outgoing(n) => write!(f, "{n} outgoing edges"),
            ViolationKind::RestMismatch(r) => write!(f, "resting velocity differs: {r:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Branch point where it was found.
    pub at: Option<Config>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.at {
            Some(c) => write!(f, "{} at {}", self.kind, c),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidityReport {
    pub checked: usize,
    /// Points where every speed vanishes.
    pub singular: usize,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: ValidityReport, at: Config) {
        self.checked += other.checked;
        self.singular += other.singular;
        self.violations.extend(other.violations.into_iter().map(|mut v| {
            v.at = Some(at);
            v
        }));
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * a.abs().max(b.abs()).max(1.0)
}

/// Local condition at one vertex with `speeds.len()` incident edges.
pub fn validate_vertex_fields(speeds: &[f64], signs: &[Sign]) -> Result<ValidityReport, FlowError> {
    if speeds.len() != signs.len() || speeds.is_empty() {
        return Err(FlowError::LengthMismatch(speeds.len(), signs.len()));
    }
    let mut report = ValidityReport {
        checked: 1,
        ..Default::default()
    };
    let mags: Vec<f64> = speeds.iter().map(|s| s.abs()).collect();
    if mags.iter().all(|&m| m <= TOL) {
        report.singular = 1;
        return Ok(report);
    }
    if !mags.iter().all(|&m| close(m, mags[0])) {
        report.violations.push(Violation {
            kind: ViolationKind::SpeedMismatch(mags.clone()),
            at: None,
        });
    }
    let out = signs.iter().filter(|&&s| s == Sign::Plus).count();
    if out != 1 {
        report.violations.push(Violation {
            kind: ViolationKind::Outgoing(out),
            at: None,
        });
    }
    Ok(report)
}

/// Branch points: one vehicle at the hub, the other at some point of an
/// edge. Sample `k` puts vehicle `k % 2` at the hub and spreads the other
/// over all three edges.
fn branch_points(samples: usize) -> Vec<(bool, EdgeId, f64)> {
    let per_edge = samples.div_ceil(6).max(1);
    (0..samples)
        .map(|k| {
            let x_rests = k % 2 == 0;
            let edge = EdgeId((k / 2) % 3 + 1);
            let slot = k / 6;
            let nu = 0.02 + 0.98 * (slot as f64 + 0.5) / per_edge as f64;
            (x_rests, edge, nu.min(1.0))
        })
        .collect()
}

pub fn validate_config_field(field: &PiecewiseField, samples: usize) -> ValidityReport {
    let mut report = ValidityReport::default();
    let mut uncovered: Vec<CellId> = Vec::new();
    for (x_rests, j, nu) in branch_points(samples.max(1)) {
        let other = GraphPoint { edge: Some(j), value: nu };
        let branch = if x_rests {
            Config { x: GraphPoint::CENTER, y: other }
        } else {
            Config { x: other, y: GraphPoint::CENTER }
        };
        let mut moving = Vec::new();
        let mut resting = Vec::new();
        let mut failed = false;
        for i in 1..=3 {
            let near = GraphPoint { edge: Some(EdgeId(i)), value: LIMIT_EPS };
            let c = if x_rests {
                Config { x: near, y: other }
            } else {
                Config { x: other, y: near }
            };
            match field.eval(&c) {
                Ok(v) => {
                    let (m, r) = if x_rests { (v.x, v.y) } else { (v.y, v.x) };
                    moving.push(m.rate);
                    resting.push(r.rate);
                }
                Err(FlowError::Uncovered { cell, .. }) => {
                    failed = true;
                    if !uncovered.contains(&cell) {
                        uncovered.push(cell);
                        report.violations.push(Violation {
                            kind: ViolationKind::Coverage(cell),
                            at: Some(c),
                        });
                    }
                }
                Err(e) => {
                    failed = true;
                    report.violations.push(Violation {
                        kind: ViolationKind::Evaluation(format!("{e} in {}", cell_of(&c))),
                        at: Some(branch),
                    });
                }
            }
        }
        if failed {
            report.checked += 1;
            continue;
        }
        let signs: Vec<Sign> = moving.iter().map(|&r| Sign::of(r)).collect();
        let local = validate_vertex_fields(&moving, &signs).expect("three limits");
        report.merge(local, branch);
        if !resting.iter().all(|&r| close(r, resting[0])) {
            report.violations.push(Violation {
                kind: ViolationKind::RestMismatch(resting),
                at: Some(branch),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{circulating_field, circulating_velocity, ConfigVelocity};
    use crate::graph::Velocity;
    use Sign::{Minus, Plus};

    #[test]
    fn vertex_examples() {
        assert!(validate_vertex_fields(&[1.0, 1.0, 1.0], &[Plus, Minus, Minus])
            .unwrap()
            .is_valid());
        let r = validate_vertex_fields(&[1.0, 1.0, 1.0], &[Plus, Plus, Minus]).unwrap();
        assert_eq!(r.violations[0].kind, ViolationKind::Outgoing(2));
        let r = validate_vertex_fields(&[1.0, 2.0, 1.0], &[Plus, Minus, Minus]).unwrap();
        assert!(matches!(r.violations[0].kind, ViolationKind::SpeedMismatch(_)));
        let r = validate_vertex_fields(&[0.0, 0.0], &[Minus, Minus]).unwrap();
        assert!(r.is_valid() && r.singular == 1);
        assert!(validate_vertex_fields(&[1.0], &[Plus, Minus]).is_err());
        assert!(validate_vertex_fields(&[], &[]).is_err());
    }

    #[test]
    fn circulating_passes() {
        let r = validate_config_field(&circulating_field(), 500);
        assert!(r.is_valid(), "{:?}", r.violations.first());
        assert_eq!(r.checked, 500);
    }

    #[test]
    fn broken_rest_is_located() {
        // Resting vehicle slows down on the fins only.
        let f = PiecewiseField::new("broken", true, true, |c: &Config| {
            let v = circulating_velocity(c)?;
            Ok(if c.is_fin() {
                let (nx, ny) = c.nu();
                if nx < ny {
                    ConfigVelocity::new(v.x, Velocity::new(v.y.edge, 0.5 * v.y.rate))
                } else {
                    ConfigVelocity::new(Velocity::new(v.x.edge, 0.5 * v.x.rate), v.y)
                }
            } else {
                v
            })
        });
        let r = validate_config_field(&f, 12);
        assert!(!r.is_valid());
        let v = &r.violations[0];
        assert!(matches!(v.kind, ViolationKind::RestMismatch(_)));
        let at = v.at.unwrap();
        assert!(at.x.is_center() || at.y.is_center());
    }

    #[test]
    fn missing_fins_reported() {
        let f = PiecewiseField::new("squares", true, false, circulating_velocity);
        let r = validate_config_field(&f, 30);
        assert!(r
            .violations
            .iter()
            .all(|v| matches!(v.kind, ViolationKind::Coverage(CellId::Fin(..)))));
        assert!(!r.violations.is_empty());
    }
}
