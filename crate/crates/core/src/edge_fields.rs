//! Edge point fields and the single-AGV hybrid controller.
//!
//! A field attracts to a goal inside one edge. It lives on that edge plus
//! collars of every edge meeting it, where it drifts at constant speed
//! toward the shared vertex. That speed equals the goal-edge outflow at the
//! vertex, so the vertex conditions for a semiflow hold.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, GraphPoint, Velocity};
use crate::patterns::PatternLevels;

/// Event localization tolerance in time.
pub const EVENT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdgeFieldError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("goal parameter {0} is not interior to its edge")]
    GoalNotInterior(f64),
    #[error("alpha {0} outside (0, 1)")]
    BadAlpha(f64),
    #[error("collar {0} outside (0, 1]")]
    BadCollar(f64),
    #[error("point ({0}, {1}) outside the field domain")]
    OutsideDomain(EdgeId, f64),
    #[error("no field assigned to edge {0}")]
    MissingField(EdgeId),
    #[error("field of {0} does not prepare the field of its successor {1}")]
    BrokenChain(EdgeId, EdgeId),
    #[error("edge {0} cannot reach the pattern")]
    Leftover(EdgeId),
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
    #[error("state ({0}, {1}) left every field domain")]
    Integrity(EdgeId, f64),
}

/// A point on a general graph, `t` measured from the edge tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePos {
    pub edge: EdgeId,
    pub t: f64,
}

impl EdgePos {
    pub fn new(edge: EdgeId, t: f64) -> Self {
        EdgePos { edge, t }
    }

    /// Y-graph point; the hub is placed on `hub_edge` at its tail.
    pub fn from_y(p: GraphPoint, hub_edge: EdgeId) -> Self {
        EdgePos {
            edge: p.edge.unwrap_or(hub_edge),
            t: p.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Collar {
    /// Shared vertex as a parameter on the collar edge.
    at: f64,
    /// The same vertex as a parameter on the goal edge.
    goal_at: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePointField {
    goal: EdgePos,
    alpha: f64,
    collar: f64,
    gain: f64,
    scale: f64,
    collars: BTreeMap<EdgeId, Vec<Collar>>,
}

pub fn make_edge_point_field(
    g: &Graph,
    goal: EdgePos,
    alpha: f64,
    collar: f64,
) -> Result<EdgePointField, EdgeFieldError> {
    let ge = *g.edge(goal.edge)?;
    if !(goal.t > 0.0 && goal.t < 1.0) {
        return Err(EdgeFieldError::GoalNotInterior(goal.t));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EdgeFieldError::BadAlpha(alpha));
    }
    if !(collar > 0.0 && collar <= 1.0) {
        return Err(EdgeFieldError::BadCollar(collar));
    }
    let mut collars: BTreeMap<EdgeId, Vec<Collar>> = BTreeMap::new();
    for (v, goal_at) in [(ge.tail, 0.0), (ge.head, 1.0)] {
        for &eid in g.incident(v)? {
            if eid == ge.id {
                continue;
            }
            let e = g.edge(eid)?;
            let at = if e.tail == v { 0.0 } else { 1.0 };
            collars.entry(eid).or_default().push(Collar { at, goal_at });
        }
    }
    let scale = alpha / (0.5 * goal.t.min(1.0 - goal.t));
    Ok(EdgePointField {
        goal,
        alpha,
        collar,
        gain: 1.0,
        scale,
        collars,
    })
}

/// Edge point field on the Y-graph.
pub fn make_y_edge_point_field(
    goal: GraphPoint,
    alpha: f64,
    collar: f64,
) -> Result<EdgePointField, EdgeFieldError> {
    let edge = goal.edge.ok_or(EdgeFieldError::GoalNotInterior(goal.value))?;
    make_edge_point_field(&Graph::y_graph(), EdgePos::new(edge, goal.value), alpha, collar)
}

impl EdgePointField {
    pub fn goal(&self) -> EdgePos {
        self.goal
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Edges carrying part of the domain, goal edge first.
    pub fn domain_edges(&self) -> Vec<EdgeId> {
        std::iter::once(self.goal.edge)
            .chain(self.collars.keys().copied())
            .collect()
    }

    /// Best collar branch for `p`: (collar, distance to its vertex).
    fn collar_of(&self, p: EdgePos) -> Option<(Collar, f64)> {
        let eps = 1e-12;
        self.collars.get(&p.edge).and_then(|cs| {
            cs.iter()
                .map(|&c| (c, (p.t - c.at).abs()))
                .filter(|&(_, d)| d <= self.collar + eps)
                .min_by(|a, b| {
                    let da = a.1 + (a.0.goal_at - self.goal.t).abs();
                    let db = b.1 + (b.0.goal_at - self.goal.t).abs();
                    da.total_cmp(&db)
                })
        })
    }

    pub fn contains(&self, p: EdgePos) -> bool {
        p.edge == self.goal.edge || self.collar_of(p).is_some()
    }

    fn distance(&self, p: EdgePos) -> Result<f64, EdgeFieldError> {
        if p.edge == self.goal.edge {
            return Ok((p.t - self.goal.t).abs());
        }
        let (c, d) = self
            .collar_of(p)
            .ok_or(EdgeFieldError::OutsideDomain(p.edge, p.t))?;
        Ok(d + (c.goal_at - self.goal.t).abs())
    }

    pub fn lyapunov(&self, p: EdgePos) -> Result<f64, EdgeFieldError> {
        Ok(self.scale * self.distance(p)?)
    }

    /// Rate of change of the edge parameter at `p`.
    pub fn evaluate(&self, p: EdgePos) -> Result<Velocity, EdgeFieldError> {
        if p.edge == self.goal.edge {
            return Ok(Velocity::new(p.edge, -self.gain * (p.t - self.goal.t)));
        }
        let (c, _) = self
            .collar_of(p)
            .ok_or(EdgeFieldError::OutsideDomain(p.edge, p.t))?;
        let speed = self.gain * (c.goal_at - self.goal.t).abs();
        let rate = if c.at == 0.0 { -speed } else { speed };
        Ok(Velocity::new(p.edge, rate))
    }

    /// Y-graph convenience wrapper around [`EdgePointField::evaluate`].
    pub fn evaluate_y(&self, p: GraphPoint) -> Result<Velocity, EdgeFieldError> {
        self.evaluate(EdgePos::from_y(p, self.goal.edge))
    }

    pub fn lyapunov_y(&self, p: GraphPoint) -> Result<f64, EdgeFieldError> {
        self.lyapunov(EdgePos::from_y(p, self.goal.edge))
    }

    /// If `p` sits on the shared vertex end of a collar, the same point
    /// expressed on the goal edge.
    fn onto_goal_edge(&self, p: EdgePos) -> EdgePos {
        match self.collar_of(p) {
            Some((c, d)) if d <= 1e-12 => EdgePos::new(self.goal.edge, c.goal_at),
            _ => p,
        }
    }

    /// Points of this field's domain on a grid of spacing `h`.
    fn domain_samples(&self, h: f64) -> Vec<EdgePos> {
        let n = (1.0 / h).ceil() as usize;
        let mut out = Vec::new();
        for e in self.domain_edges() {
            for k in 0..=n {
                let p = EdgePos::new(e, k as f64 / n as f64);
                if self.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Whether `f1` hands over to `f2`: the goal of `f1` and its whole
/// alpha-sublevel set lie in the domain of `f2`.
pub fn prepares(f1: &EdgePointField, f2: &EdgePointField) -> bool {
    if !f2.contains(f1.goal) {
        return false;
    }
    f1.domain_samples(1e-3)
        .into_iter()
        .filter(|&p| f1.lyapunov(p).is_ok_and(|v| v <= f1.alpha))
        .all(|p| f2.contains(p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HybridEventKind {
    EdgeEntered(EdgeId),
    FieldActivated(EdgeId),
    /// The active field's Lyapunov value fell through alpha.
    Threshold(EdgeId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridEvent {
    pub t: f64,
    pub kind: HybridEventKind,
}

#[derive(Debug, Clone)]
pub struct HybridController {
    levels: PatternLevels,
    fields: BTreeMap<EdgeId, EdgePointField>,
    alpha: f64,
    active: Option<EdgeId>,
    time: f64,
}

/// One field per non-leftover edge, aimed at the midpoint of that edge.
pub fn default_hybrid_fields(
    g: &Graph,
    levels: &PatternLevels,
    alpha: f64,
    collar: f64,
) -> Result<BTreeMap<EdgeId, EdgePointField>, EdgeFieldError> {
    let mut out = BTreeMap::new();
    for e in g.edge_ids() {
        if levels.level_of(e).is_none() {
            continue;
        }
        out.insert(
            e,
            make_edge_point_field(g, EdgePos::new(e, 0.5), alpha, collar)?,
        );
    }
    Ok(out)
}

pub fn make_single_agv_hybrid(
    levels: PatternLevels,
    fields: BTreeMap<EdgeId, EdgePointField>,
    alpha: f64,
) -> Result<HybridController, EdgeFieldError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EdgeFieldError::BadAlpha(alpha));
    }
    for (&e, f) in &fields {
        let Ok(next) = levels.successor(e) else {
            continue;
        };
        let g = fields.get(&next).ok_or(EdgeFieldError::MissingField(next))?;
        if !prepares(f, g) {
            return Err(EdgeFieldError::BrokenChain(e, next));
        }
    }
    if let Some(&e) = levels.levels().iter().flatten().find(|e| !fields.contains_key(e)) {
        return Err(EdgeFieldError::MissingField(e));
    }
    Ok(HybridController {
        levels,
        fields,
        alpha,
        active: None,
        time: 0.0,
    })
}

impl HybridController {
    pub fn active(&self) -> Option<EdgeId> {
        self.active
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn field(&self, e: EdgeId) -> Option<&EdgePointField> {
        self.fields.get(&e)
    }

    fn activate(&mut self, e: EdgeId, events: &mut Vec<HybridEvent>) {
        self.active = Some(e);
        events.push(HybridEvent {
            t: self.time,
            kind: HybridEventKind::FieldActivated(e),
        });
    }

    /// Advance the switch while the active field already reports arrival.
    fn settle(&mut self, p: EdgePos, events: &mut Vec<HybridEvent>) -> Result<(), EdgeFieldError> {
        if self.active.is_none() {
            if self.levels.level_of(p.edge).is_none() {
                return Err(EdgeFieldError::Leftover(p.edge));
            }
            self.activate(p.edge, events);
        }
        for _ in 0..self.fields.len() + 1 {
            let a = self.active.expect("activated above");
            let f = &self.fields[&a];
            let v = f.lyapunov(p).map_err(|_| EdgeFieldError::Integrity(p.edge, p.t))?;
            if v > self.alpha {
                break;
            }
            let next = self.levels.successor(a).map_err(|_| EdgeFieldError::Leftover(a))?;
            if next == a {
                break;
            }
            events.push(HybridEvent {
                t: self.time,
                kind: HybridEventKind::Threshold(a),
            });
            self.activate(next, events);
        }
        Ok(())
    }

    fn rk4(f: &EdgePointField, p: EdgePos, h: f64) -> Result<EdgePos, EdgeFieldError> {
        let rate = |t: f64| f.evaluate(EdgePos::new(p.edge, t.clamp(0.0, 1.0))).map(|v| v.rate);
        let k1 = rate(p.t)?;
        let k2 = rate(p.t + 0.5 * h * k1)?;
        let k3 = rate(p.t + 0.5 * h * k2)?;
        let k4 = rate(p.t + h * k3)?;
        Ok(EdgePos::new(p.edge, p.t + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)))
    }

    /// One time step of length `dt` from `p`.
    pub fn step(&mut self, p: EdgePos, dt: f64) -> Result<(EdgePos, Vec<HybridEvent>), EdgeFieldError> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(EdgeFieldError::BadStep(dt));
        }
        let mut events = Vec::new();
        let mut p = p;
        self.settle(p, &mut events)?;
        let mut left = dt;
        while left > EVENT_TOL * 0.5 {
            let a = self.active.expect("settled");
            let f = self.fields[&a].clone();
            if !f.contains(p) {
                return Err(EdgeFieldError::Integrity(p.edge, p.t));
            }
            let q = Self::rk4(&f, p, left)?;
            let leaves = q.t < 0.0 || q.t > 1.0;
            let phi_p = f.lyapunov(p)?;
            let crosses = !leaves && phi_p > self.alpha && f.lyapunov(q)? <= self.alpha;
            if !leaves && !crosses {
                p = q;
                self.time += left;
                break;
            }
            // Bisect for the first event inside the step.
            let hit = |h: f64| -> Result<bool, EdgeFieldError> {
                let q = Self::rk4(&f, p, h)?;
                Ok(if leaves {
                    q.t <= 0.0 || q.t >= 1.0
                } else {
                    f.lyapunov(q)? <= self.alpha
                })
            };
            let (mut lo, mut hi) = (0.0, left);
            while hi - lo > EVENT_TOL {
                let mid = 0.5 * (lo + hi);
                if hit(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut q = Self::rk4(&f, p, hi)?;
            q.t = q.t.clamp(0.0, 1.0);
            self.time += hi;
            left -= hi;
            if leaves {
                let moved = f.onto_goal_edge(q);
                if moved.edge != p.edge {
                    events.push(HybridEvent {
                        t: self.time,
                        kind: HybridEventKind::EdgeEntered(moved.edge),
                    });
                }
                p = moved;
            } else {
                p = q;
            }
            self.settle(p, &mut events)?;
        }
        Ok((p, events))
    }
}

/// Logged run of a hybrid controller.
#[derive(Debug, Clone)]
pub struct HybridRun {
    pub end: EdgePos,
    pub events: Vec<HybridEvent>,
    /// Start edge followed by every entered edge.
    pub transitions: Vec<EdgeId>,
}

pub fn run_hybrid(
    ctrl: &mut HybridController,
    start: EdgePos,
    t_max: f64,
    dt: f64,
) -> Result<HybridRun, EdgeFieldError> {
    let mut events = Vec::new();
    let mut transitions = vec![start.edge];
    let mut p = start;
    let steps = (t_max / dt).round() as usize;
    for _ in 0..steps {
        let (q, ev) = ctrl.step(p, dt)?;
        for e in &ev {
            if let HybridEventKind::EdgeEntered(edge) = e.kind {
                transitions.push(edge);
            }
        }
        events.extend(ev);
        p = q;
    }
    Ok(HybridRun {
        end: p,
        events,
        transitions,
    })
}
