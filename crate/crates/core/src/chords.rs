//! Realizing a monotone word as a limit cycle by switching between chord
//! fields.
//!
//! Each symbol gets a docking point on the unit circle. Consecutive points
//! are joined by a chord that dips below the boundary, and each chord is
//! completed to a closed star-shaped curve by following the boundary. A
//! tuned field attracts to that curve, and the controller hops to the next
//! chord's field once the orbit reaches the chord's endpoint.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use thiserror::Error;

use crate::cspace::{
    from_disc, gap_angles, monotone_orientation, optimal_winding_class, product_distance,
    reduce_angle, seam_angles, CspaceError, Config, DiscPoint, GrammarSymbol, WindingClass, Word,
};
use crate::flow::{
    integrate_with, CycleProfile, EventKind, FlowError, IntegrateOptions, PiecewiseField,
    Supervisor, Trajectory, TunedCycle,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChordError {
    #[error(transparent)]
    Cspace(#[from] CspaceError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("word `{0}` is not monotone")]
    NotMonotone(String),
    #[error("threshold {0} must lie in (0, 0.5)")]
    BadEpsilon(f64),
    #[error("chord {chord} ends {distance} away from the next auxiliary cycle")]
    BrokenChain { chord: usize, distance: f64 },
    #[error("chord index {0} out of range")]
    NoSuchChord(usize),
    #[error("no chord captured the orbit by t = {0}")]
    CaptureFailure(f64),
    #[error("need {needed} completed periods, found {found}")]
    TooFewPeriods { found: usize, needed: usize },
}

/// Ramp width at a single-vehicle docking point.
const WIDE_RAMP: f64 = PI / 12.0;
/// Ramp width at a corner, where the docking zone is narrow.
const NARROW_RAMP: f64 = 0.03;

#[derive(Debug, Clone, PartialEq)]
pub struct ChordOptions {
    pub omega: f64,
    /// Radial gain of each chord field.
    pub gain: f64,
    /// How far forward chords dip below the boundary.
    pub depth: f64,
    /// Dip of the backward chord used for winding-zero cycles.
    pub backward_depth: f64,
    /// Switching fires once `psi_scale * psi < epsilon`.
    pub psi_scale: f64,
    /// Samples per full turn of each auxiliary cycle.
    pub samples: usize,
}

impl Default for ChordOptions {
    fn default() -> Self {
        ChordOptions {
            omega: 2.0,
            gain: 8.0,
            depth: 0.15,
            backward_depth: 0.30,
            psi_scale: 2.0,
            samples: 720,
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn smoothstep_slope(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        6.0 * x * (1.0 - x)
    } else {
        0.0
    }
}

/// One chord: leaves `start` and sweeps `span` radians (signed), dipping
/// to `1 - depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub start: f64,
    pub span: f64,
    pub depth: f64,
    /// Depth reached by the end ramps; a deeper chord sinks the rest of
    /// the way in the middle, so that it matches its neighbours near the
    /// docking points.
    pub shoulder: f64,
    pub ramp_in: f64,
    pub ramp_out: f64,
}

impl Chord {
    fn length(&self) -> f64 {
        self.span.abs()
    }

    /// Distance travelled from the start to reach `theta`, if on the chord.
    fn position(&self, theta: f64) -> Option<f64> {
        let u = ((theta - self.start) * self.span.signum()).rem_euclid(TAU);
        (u <= self.length()).then_some(u)
    }

    /// Width of the inner ramps of a two-stage chord.
    fn inner_ramp(&self) -> f64 {
        WIDE_RAMP.min(0.5 * (self.length() - self.ramp_in - self.ramp_out))
    }

    /// `depth * min(S((u - a) / w_in), S((l - b - u) / w_out))` and its
    /// slope in `u`.
    fn dip(depth: f64, u: f64, l: f64, a: f64, b: f64, w_in: f64, w_out: f64) -> (f64, f64) {
        let x = (u - a) / w_in;
        let y = (l - b - u) / w_out;
        if smoothstep(x) <= smoothstep(y) {
            (depth * smoothstep(x), depth * smoothstep_slope(x) / w_in)
        } else {
            (depth * smoothstep(y), -depth * smoothstep_slope(y) / w_out)
        }
    }

    fn profile_at(&self, u: f64) -> (f64, f64) {
        let l = self.length();
        let (d1, s1) = Self::dip(self.shoulder, u, l, 0.0, 0.0, self.ramp_in, self.ramp_out);
        let (mut d, mut s) = (d1, s1);
        if self.depth > self.shoulder {
            let w = self.inner_ramp();
            let (d2, s2) = Self::dip(self.depth - self.shoulder, u, l, self.ramp_in, self.ramp_out, w, w);
            d += d2;
            s += s2;
        }
        (1.0 - d, -s * self.span.signum())
    }

    fn radius_at(&self, u: f64) -> f64 {
        self.profile_at(u).0
    }

    fn slope_at(&self, u: f64) -> f64 {
        self.profile_at(u).1
    }
}

/// The chord on its range, the unit circle elsewhere.
#[derive(Debug, Clone, Copy)]
struct ChordProfile(Chord);

impl CycleProfile for ChordProfile {
    fn value(&self, theta: f64) -> f64 {
        self.0.position(theta).map_or(1.0, |u| self.0.radius_at(u))
    }

    fn slope(&self, theta: f64) -> f64 {
        match self.0.position(theta) {
            // A full-turn chord has both ends at u = 0.
            Some(u) if u < self.0.length() || self.0.length() < TAU => self.0.slope_at(u),
            _ => 0.0,
        }
    }
}

/// Piecewise-linear curve in the configuration space. Vertices are placed
/// so that no segment crosses a seam, and distances use the product of the
/// graph metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Config>,
    pub closed: bool,
}

/// Squared distance from `p` to the segment `a b`; both ends lie in one
/// closed cell.
fn segment_distance_sq(p: &Config, a: &Config, b: &Config) -> f64 {
    let coeff = |pp: crate::graph::GraphPoint,
                 pa: crate::graph::GraphPoint,
                 pb: crate::graph::GraphPoint| {
        let edge = pa.edge.or(pb.edge);
        let same = pp.edge.is_none() || edge.is_none() || pp.edge == edge;
        let a0 = if same { pa.value - pp.value } else { pa.value + pp.value };
        (a0, pb.value - pa.value)
    };
    let (ax, bx) = coeff(p.x, a.x, b.x);
    let (ay, by) = coeff(p.y, a.y, b.y);
    let bb = bx * bx + by * by;
    let lam = if bb > 0.0 {
        (-(ax * bx + ay * by) / bb).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (ax + bx * lam).powi(2) + (ay + by * lam).powi(2)
}

/// Whether two vertices can be joined by a straight segment in one cell.
fn same_cell(a: &Config, b: &Config) -> bool {
    let ok = |p: crate::graph::GraphPoint, q: crate::graph::GraphPoint| {
        p.edge.is_none() || q.edge.is_none() || p.edge == q.edge
    };
    ok(a.x, b.x) && ok(a.y, b.y)
}

impl Polyline {
    fn segments(&self) -> impl Iterator<Item = (&Config, &Config)> {
        let n = self.points.len();
        let extra = if self.closed && n > 1 { 1 } else { 0 };
        (0..n.saturating_sub(1) + extra).map(move |k| (&self.points[k], &self.points[(k + 1) % n]))
    }

    pub fn distance(&self, p: &Config) -> f64 {
        let mut best = f64::INFINITY;
        if self.points.len() == 1 {
            return product_distance(p, &self.points[0]);
        }
        for (a, b) in self.segments() {
            let d2 = if same_cell(a, b) {
                segment_distance_sq(p, a, b)
            } else {
                product_distance(p, a).min(product_distance(p, b)).powi(2)
            };
            best = best.min(d2);
        }
        best.sqrt()
    }
}

/// Angles `theta0 + s * u` for `u` in `[0, length]`, refined through every
/// seam and zone midpoint on the way.
fn sweep_angles(theta0: f64, span: f64, per_turn: usize) -> Vec<f64> {
    let len = span.abs();
    let s = span.signum();
    let n = ((per_turn as f64 * len / TAU).ceil() as usize).max(8);
    let mut us: Vec<f64> = (0..=n).map(|k| len * k as f64 / n as f64).collect();
    let marks = seam_angles()
        .into_iter()
        .chain((0..12).map(|k| k as f64 * PI / 6.0));
    for m in marks {
        let mut u = ((m - theta0) * s).rem_euclid(TAU);
        while u <= len {
            us.push(u);
            u += TAU;
        }
    }
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    us.into_iter().map(|u| reduce_angle(theta0 + s * u)).collect()
}

fn disc_config(r: f64, theta: f64) -> Result<Config, CspaceError> {
    from_disc(DiscPoint::new(r.min(1.0), theta)?)
}

#[derive(Debug, Clone)]
pub struct ChordPlan {
    pub word: Word,
    pub epsilon: f64,
    pub options: ChordOptions,
    /// `+1` counterclockwise or `-1` clockwise.
    pub orientation: i8,
    pub winding: WindingClass,
    /// Docking points, one per symbol.
    pub points: Vec<DiscPoint>,
    pub chords: Vec<Chord>,
    /// Each chord as a curve from its docking point to the next.
    pub arcs: Vec<Polyline>,
    /// Each chord completed along the boundary.
    pub cycles: Vec<Polyline>,
    pub fields: Vec<PiecewiseField>,
    point_configs: Vec<Config>,
    alpha: Polyline,
}

fn ramp_for(s: GrammarSymbol) -> f64 {
    if s.is_corner() {
        NARROW_RAMP
    } else {
        WIDE_RAMP
    }
}

pub fn plan_cycle(w: &Word, epsilon: f64) -> Result<ChordPlan, ChordError> {
    plan_cycle_with(w, epsilon, ChordOptions::default())
}

pub fn plan_cycle_with(w: &Word, epsilon: f64, options: ChordOptions) -> Result<ChordPlan, ChordError> {
    let orientation = monotone_orientation(w).ok_or_else(|| ChordError::NotMonotone(w.to_string()))?;
    // Neighbouring zone midpoints are one unit apart in the product metric.
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(ChordError::BadEpsilon(epsilon));
    }
    let syms = w.symbols();
    let n = syms.len();
    let s = orientation as f64;
    let angles: Vec<f64> = syms.iter().map(|x| x.zone_midpoint()).collect();
    let points = angles
        .iter()
        .map(|&a| DiscPoint::new(1.0, a))
        .collect::<Result<Vec<_>, _>>()?;
    let gaps: Vec<f64> = (0..n)
        .map(|k| {
            if n == 1 {
                TAU
            } else {
                (s * (angles[(k + 1) % n] - angles[k])).rem_euclid(TAU)
            }
        })
        .collect();
    let winding = if n == 1 {
        WindingClass::PlusMinusOne
    } else {
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        optimal_winding_class(&gap_angles(&sorted)?)
    };
    let backward = match winding {
        WindingClass::Zero => gaps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k),
        WindingClass::PlusMinusOne => None,
    };
    let chords: Vec<Chord> = (0..n)
        .map(|k| {
            let (span, depth) = if Some(k) == backward {
                (-s * (TAU - gaps[k]), options.backward_depth)
            } else {
                (s * gaps[k], options.depth)
            };
            Chord {
                start: angles[k],
                span,
                depth,
                shoulder: options.depth.min(depth),
                ramp_in: ramp_for(syms[k]),
                ramp_out: ramp_for(syms[(k + 1) % n]),
            }
        })
        .collect();

    let mut arcs = Vec::with_capacity(n);
    let mut cycles = Vec::with_capacity(n);
    let mut fields = Vec::with_capacity(n);
    for ch in &chords {
        let profile = ChordProfile(*ch);
        let arc = sweep_angles(ch.start, ch.span, options.samples)
            .into_iter()
            .map(|t| disc_config(profile.value(t), t))
            .collect::<Result<Vec<_>, _>>()?;
        // A full-turn chord ends where it starts.
        let mut arc = arc;
        if ch.length() >= TAU {
            let first = arc[0];
            *arc.last_mut().expect("nonempty") = first;
        }
        arcs.push(Polyline {
            points: arc,
            closed: false,
        });
        let mut ring = sweep_angles(ch.start, ch.span.signum() * TAU, options.samples);
        ring.pop();
        let ring = ring
            .into_iter()
            .map(|t| disc_config(profile.value(t), t))
            .collect::<Result<Vec<_>, _>>()?;
        cycles.push(Polyline {
            points: ring,
            closed: true,
        });
        let tuned = TunedCycle::new(Arc::new(profile), ch.span.signum() * options.omega)?.with_gain(options.gain);
        fields.push(tuned.config_field());
    }
    let point_configs = points.iter().map(|&d| from_disc(d)).collect::<Result<Vec<_>, _>>()?;
    let mut alpha_pts = Vec::new();
    for a in &arcs {
        alpha_pts.extend_from_slice(&a.points);
    }
    let plan = ChordPlan {
        word: w.clone(),
        epsilon,
        options,
        orientation,
        winding,
        points,
        chords,
        arcs,
        cycles,
        fields,
        point_configs,
        alpha: Polyline {
            points: alpha_pts,
            closed: true,
        },
    };
    for j in 0..n {
        let next = (j + 1) % n;
        let d = plan.cycles[next].distance(&plan.point_configs[next]);
        if d > 1e-9 {
            return Err(ChordError::BrokenChain { chord: j, distance: d });
        }
    }
    Ok(plan)
}

impl ChordPlan {
    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    /// The closed curve made of all chords.
    pub fn alpha(&self) -> &Polyline {
        &self.alpha
    }

    /// Docking point as a configuration.
    pub fn point_config(&self, k: usize) -> Config {
        self.point_configs[k]
    }

    /// Time for one trip around the planned cycle.
    pub fn period(&self) -> f64 {
        self.chords.iter().map(|c| c.length()).sum::<f64>() / self.options.omega
    }

    /// Default horizon: reach the first chord, then a few full periods.
    pub fn default_horizon(&self) -> f64 {
        2.0 * TAU / self.options.omega + 3.0 * self.period() + 1.0
    }

    /// Time by which some chord should have captured the orbit.
    pub fn capture_bound(&self) -> f64 {
        2.0 * TAU / self.options.omega + self.period() + 1.0
    }
}

/// `(phi, psi)` of chord `j` at `c`: distance to the chord's auxiliary
/// cycle, and that plus the distance to the chord's endpoint.
pub fn chord_lyapunov(plan: &ChordPlan, j: usize, c: &Config) -> Result<(f64, f64), ChordError> {
    if j >= plan.len() {
        return Err(ChordError::NoSuchChord(j));
    }
    let phi = plan.cycles[j].distance(c);
    let end = plan.point_configs[(j + 1) % plan.len()];
    Ok((phi, phi + product_distance(c, &end)))
}

/// Mode for a fresh start: the lowest chord whose cycle is within reach
/// but whose endpoint is not, or the first chord when none is near.
pub fn initial_mode(plan: &ChordPlan, c: &Config) -> usize {
    let eps = plan.epsilon;
    let scale = plan.options.psi_scale;
    let mut near_end = None;
    for j in 0..plan.len() {
        let (phi, psi) = chord_lyapunov(plan, j, c).expect("index in range");
        if phi < eps {
            if scale * psi > eps {
                return j;
            }
            near_end.get_or_insert(j);
        }
    }
    near_end.map_or(0, |j| (j + 1) % plan.len())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchRecord {
    pub t: f64,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct CycleRun {
    pub trajectory: Trajectory,
    pub initial_mode: usize,
    pub switches: Vec<SwitchRecord>,
}

struct ChordSupervisor<'a> {
    plan: &'a ChordPlan,
    mode: usize,
    armed: bool,
    switches: Vec<SwitchRecord>,
}

impl ChordSupervisor<'_> {
    fn end_distance(&self, c: &Config) -> f64 {
        let end = self.plan.point_configs[(self.mode + 1) % self.plan.len()];
        product_distance(c, &end)
    }

    fn scaled_psi_below(&self, c: &Config) -> bool {
        let s = self.plan.options.psi_scale;
        let eps = self.plan.epsilon;
        let d = self.end_distance(c);
        s * d < eps && s * (d + self.plan.cycles[self.mode].distance(c)) < eps
    }
}

impl Supervisor for ChordSupervisor<'_> {
    fn field(&self) -> &PiecewiseField {
        &self.plan.fields[self.mode]
    }

    fn wants_switch(&self, c: &Config) -> bool {
        self.armed && self.scaled_psi_below(c)
    }

    fn switch(&mut self, t: f64, c: &Config) -> EventKind {
        let from = self.mode;
        self.mode = (from + 1) % self.plan.len();
        self.armed = !self.scaled_psi_below(c);
        self.switches.push(SwitchRecord { t, from, to: self.mode });
        EventKind::Switch { from, to: self.mode }
    }

    fn refine(&self, c: &Config) -> bool {
        self.armed && self.plan.options.psi_scale * self.end_distance(c) < 4.0 * self.plan.epsilon
    }

    fn observe(&mut self, _t: f64, c: &Config) {
        if !self.armed && !self.scaled_psi_below(c) {
            self.armed = true;
        }
    }
}

pub fn run_cycle(plan: &ChordPlan, start: Config, t_max: f64, dt: f64) -> Result<CycleRun, ChordError> {
    run_cycle_with(plan, start, &IntegrateOptions::new(t_max, dt))
}

pub fn run_cycle_with(plan: &ChordPlan, start: Config, opts: &IntegrateOptions) -> Result<CycleRun, ChordError> {
    let mode = initial_mode(plan, &start);
    let mut sup = ChordSupervisor {
        plan,
        mode,
        armed: false,
        switches: Vec::new(),
    };
    sup.armed = !sup.scaled_psi_below(&start);
    let trajectory = integrate_with(&mut sup, start, opts)?;
    let bound = plan.capture_bound();
    if sup.switches.is_empty() && opts.t_max > bound {
        return Err(ChordError::CaptureFailure(bound));
    }
    Ok(CycleRun {
        trajectory,
        initial_mode: mode,
        switches: sup.switches,
    })
}

/// Hausdorff distance between the orbit over its last completed period
/// and the planned cycle.
pub fn realized_cycle_error(run: &CycleRun, plan: &ChordPlan) -> Result<f64, ChordError> {
    let entries: Vec<f64> = run.switches.iter().filter(|s| s.to == 0).map(|s| s.t).collect();
    if entries.len() < 3 {
        return Err(ChordError::TooFewPeriods {
            found: entries.len().saturating_sub(1),
            needed: 2,
        });
    }
    let (t0, t1) = (entries[entries.len() - 2], entries[entries.len() - 1]);
    // Event states fill in the grid, notably at the switches themselves.
    let mut timed: Vec<(f64, Config)> = run
        .trajectory
        .samples
        .iter()
        .map(|s| (s.t, s.config))
        .chain(run.trajectory.events.iter().map(|e| (e.t, e.config)))
        .filter(|(t, _)| *t >= t0 && *t <= t1)
        .collect();
    timed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let orbit: Vec<Config> = timed.into_iter().map(|(_, c)| c).collect();
    Ok(hausdorff(&orbit, plan.alpha()))
}

/// Hausdorff distance between a sampled orbit and a polyline.
pub fn hausdorff(orbit: &[Config], curve: &Polyline) -> f64 {
    let forward = orbit.iter().map(|p| curve.distance(p)).fold(0.0, f64::max);
    let path = Polyline {
        points: orbit.to_vec(),
        closed: false,
    };
    let back = curve.points.iter().map(|q| path.distance(q)).fold(0.0, f64::max);
    forward.max(back)
}

/// Where the observed word settles into repeats of the planned word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SteadyState {
    /// Symbols discarded as transient.
    pub transient: usize,
    /// Word index of the first steady symbol.
    pub phase: usize,
    pub periods: usize,
}

/// Longest tail of `observed` that reads as the planned word repeated,
/// provided it spans at least `min_periods` full words.
pub fn steady_state(observed: &[GrammarSymbol], word: &Word, min_periods: usize) -> Option<SteadyState> {
    let w = word.symbols();
    let n = w.len();
    let fits = |k: usize, r: usize| observed[k..].iter().enumerate().all(|(i, s)| *s == w[(r + i) % n]);
    for k in 0..observed.len() {
        let periods = (observed.len() - k) / n;
        if periods < min_periods.max(1) {
            break;
        }
        for r in (0..n).filter(|&r| w[r] == observed[k]) {
            if fits(k, r) {
                return Some(SteadyState {
                    transient: k,
                    phase: r,
                    periods,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::to_disc;

    fn word(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn plan_basics() {
        let p = plan_cycle(&word("A1 B2 A3"), 0.05).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.winding, WindingClass::Zero);
        assert_eq!(p.chords.iter().filter(|c| c.depth > 0.2).count(), 1);
        let first = p.arcs[0].points[0];
        let last = *p.arcs[2].points.last().unwrap();
        assert!(product_distance(&first, &last) < 1e-9);
        for j in 0..3 {
            let end = *p.arcs[j].points.last().unwrap();
            assert!(product_distance(&end, &p.point_config((j + 1) % 3)) < 1e-9);
        }
        assert!(matches!(plan_cycle(&word("A1 A3 B2 B1"), 0.05), Err(ChordError::NotMonotone(_))));
        assert!(matches!(plan_cycle(&word("A1 B2 A3"), 1.0), Err(ChordError::BadEpsilon(_))));
    }

    #[test]
    fn wide_spread_word_winds_once() {
        let p = plan_cycle(&word("A1 B2 A3 B1"), 0.05).unwrap();
        assert_eq!(p.winding, WindingClass::PlusMinusOne);
        assert!(p.chords.iter().all(|c| c.span > 0.0));
        assert!((p.chords.iter().map(|c| c.span).sum::<f64>() - TAU).abs() < 1e-12);
    }

    #[test]
    fn profile_slope_matches_values() {
        let p = plan_cycle(&word("A1 AB12 B2"), 0.05).unwrap();
        for ch in &p.chords {
            let prof = ChordProfile(*ch);
            for k in 0..400 {
                let t = TAU * (k as f64 + 0.37) / 400.0;
                let h = 1e-6;
                let fd = (prof.value(t + h) - prof.value(t - h)) / (2.0 * h);
                assert!((fd - prof.slope(t)).abs() < 1e-4, "{t} {fd} {}", prof.slope(t));
            }
        }
    }

    #[test]
    fn lyapunov_examples() {
        let p = plan_cycle(&word("A1 B2 A3"), 0.05).unwrap();
        let q = p.point_config(1);
        let (phi, psi) = chord_lyapunov(&p, 0, &q).unwrap();
        assert!(phi < 1e-12 && psi < 1e-12);
        let mid = p.arcs[0].points[p.arcs[0].points.len() / 2];
        let (phi, psi) = chord_lyapunov(&p, 0, &mid).unwrap();
        assert!(phi < 1e-12 && psi > 0.1);
        // B2 sits at x on the hub, y docked on edge 2; pull y inward.
        let off = Config {
            x: q.x,
            y: crate::graph::GraphPoint::on(2, 0.9).unwrap(),
        };
        assert!(q.x.is_center());
        let (phi, psi) = chord_lyapunov(&p, 0, &off).unwrap();
        // The chord bends slightly toward the point on its way in.
        assert!((phi - 0.1).abs() < 1e-3 && (psi - phi - 0.1).abs() < 1e-12, "{phi} {psi}");
        assert!(chord_lyapunov(&p, 3, &q).is_err());
    }

    #[test]
    fn mode_selection() {
        let p = plan_cycle(&word("A1 B2 A3"), 0.05).unwrap();
        let mid = p.arcs[1].points[p.arcs[1].points.len() / 2];
        assert_eq!(initial_mode(&p, &mid), 1);
        let far = Config::at(1, 0.5, 2, 0.5).unwrap();
        assert_eq!(initial_mode(&p, &far), 0);
        assert_eq!(initial_mode(&p, &p.point_config(1)), 1);
    }

    #[test]
    fn three_letter_word_is_realized() {
        let w = word("A1 B2 A3");
        let p = plan_cycle(&w, 0.05).unwrap();
        let start = Config::at(1, 0.5, 2, 0.5).unwrap();
        let run = run_cycle(&p, start, p.default_horizon(), 2e-3).unwrap();
        let ss = steady_state(&run.trajectory.word, &w, 2);
        assert!(ss.is_some(), "{:?}", run.trajectory.word);
        let err = realized_cycle_error(&run, &p).unwrap();
        assert!(err < 0.05, "{err}");
        for s in &run.switches {
            assert_eq!(s.to, (s.from + 1) % 3);
        }
        let d = to_disc(&run.trajectory.last().config).unwrap();
        assert!(d.r > 0.6);
    }

    #[test]
    fn zero_horizon() {
        let p = plan_cycle(&word("A1 B2 A3"), 0.05).unwrap();
        let run = run_cycle(&p, Config::at(1, 0.5, 2, 0.5).unwrap(), 0.0, 1e-3).unwrap();
        assert_eq!(run.trajectory.samples.len(), 1);
        assert!(run.trajectory.events.is_empty());
        assert!(realized_cycle_error(&run, &p).is_err());
    }

    #[test]
    fn steady_state_alignment() {
        use GrammarSymbol::{A, B};
        let w = word("A1 B2 A3");
        let obs = [B(1), A(1), B(2), A(3), A(1), B(2), A(3), A(1), B(2)];
        let ss = steady_state(&obs, &w, 2).unwrap();
        assert_eq!((ss.transient, ss.phase, ss.periods), (1, 0, 2));
        assert!(steady_state(&obs[..5], &w, 2).is_none());
    }
}
