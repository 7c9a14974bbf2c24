//! Fixed-step RK4 on the cells with bisection-localized events.
//!
//! Each step runs in a chart: the edge of every moving vehicle is frozen
//! and its coordinate is clamped to `(0, 1]` at the stages. A vehicle
//! reaching the hub or the pair crossing the parity diagonal ends the
//! sub-step there, so the next chart picks up the field on the far side.

use std::fmt;

use super::{ConfigVelocity, FlowError, PiecewiseField};
use crate::cspace::{cell_of, docking_symbol, product_distance, CellId, Config, GrammarSymbol};
use crate::graph::{EdgeId, GraphPoint};

pub const EVENT_TOL: f64 = 1e-9;
const MIN_NU: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub t_max: f64,
    pub dt: f64,
    /// Diagonal guard.
    pub delta: f64,
    /// Docking tolerance.
    pub tol: f64,
    /// Stop once within `goal_tol` of this configuration.
    pub goal: Option<Config>,
    pub goal_tol: f64,
    /// Keep every n-th grid sample.
    pub record_every: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            t_max: 10.0,
            dt: 1e-3,
            delta: crate::cspace::DEFAULT_DELTA,
            tol: crate::cspace::DEFAULT_TOL,
            goal: None,
            goal_tol: 1e-6,
            record_every: 1,
        }
    }
}

impl IntegrateOptions {
    pub fn new(t_max: f64, dt: f64) -> Self {
        IntegrateOptions {
            t_max,
            dt,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    X,
    Y,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agent::X => "x",
            Agent::Y => "y",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    CellChange { from: CellId, to: CellId },
    VertexPass(Agent),
    /// Docking symbol after the change; `None` when leaving all zones.
    Dock(Option<GrammarSymbol>),
    Switch { from: usize, to: usize },
    BoundaryHit(Agent),
    GoalReached,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::CellChange { from, to } => write!(f, "cell-change {from}->{to}"),
            EventKind::VertexPass(a) => write!(f, "vertex-pass {a}"),
            EventKind::Dock(Some(s)) => write!(f, "dock {s}"),
            EventKind::Dock(None) => write!(f, "undock"),
            EventKind::Switch { from, to } => write!(f, "switch {}->{}", from + 1, to + 1),
            EventKind::BoundaryHit(a) => write!(f, "boundary-hit {a}"),
            EventKind::GoalReached => write!(f, "goal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub config: Config,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub config: Config,
}

/// A stay in one docking zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DockVisit {
    pub symbol: GrammarSymbol,
    pub t_in: f64,
    pub t_out: f64,
    /// For single-vehicle symbols: the other vehicle went clearly inward.
    pub clear: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Horizon,
    Converged,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub visits: Vec<DockVisit>,
    pub word: Vec<GrammarSymbol>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories start with a sample")
    }

    pub fn events_of<'a>(&'a self, pred: impl Fn(&EventKind) -> bool + 'a) -> impl Iterator<Item = &'a Event> + 'a {
        self.events.iter().filter(move |e| pred(&e.kind))
    }
}

/// Mode logic layered on top of the integrator.
pub trait Supervisor {
    fn field(&self) -> &PiecewiseField;
    /// True where the supervisor wants to switch. Checked at accepted
    /// states and localized by bisection.
    fn wants_switch(&self, c: &Config) -> bool;
    /// Perform the switch; returns the event to log.
    fn switch(&mut self, t: f64, c: &Config) -> EventKind;
    /// Called after each accepted step.
    fn observe(&mut self, _t: f64, _c: &Config) {}
    /// Near `c` the switching set may be small enough to slip between
    /// step ends, so the step is probed at interior points too.
    fn refine(&self, _c: &Config) -> bool {
        false
    }
}

const SWITCH_PROBES: usize = 8;

struct Fixed<'a>(&'a PiecewiseField);

impl Supervisor for Fixed<'_> {
    fn field(&self) -> &PiecewiseField {
        self.0
    }
    fn wants_switch(&self, _c: &Config) -> bool {
        false
    }
    fn switch(&mut self, _t: f64, _c: &Config) -> EventKind {
        unreachable!("never switches")
    }
}

#[derive(Debug, Clone, Copy)]
enum Lane {
    Frozen,
    Moving(EdgeId),
}

/// Frozen edges for one sub-step.
struct Chart<'a> {
    field: &'a PiecewiseField,
    x: Lane,
    y: Lane,
    start: (f64, f64),
    /// Which vehicle leads in a square chart; `true` when `x` does.
    ahead: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Surface {
    Hub(Agent),
    Diagonal,
}

impl<'a> Chart<'a> {
    fn new(field: &'a PiecewiseField, c: &Config) -> Result<Self, FlowError> {
        let v = field.eval(c)?;
        let lane = |p: GraphPoint, vel: crate::graph::Velocity| -> Result<Lane, FlowError> {
            match p.edge {
                Some(e) => {
                    if vel.edge != e && vel.rate != 0.0 {
                        return Err(FlowError::WrongEdge {
                            named: vel.edge,
                            actual: e,
                        });
                    }
                    Ok(Lane::Moving(e))
                }
                None if vel.rate > 0.0 => Ok(Lane::Moving(vel.edge)),
                None => Ok(Lane::Frozen),
            }
        };
        let mut chart = Chart {
            field,
            x: lane(c.x, v.x)?,
            y: lane(c.y, v.y)?,
            start: c.nu(),
            ahead: None,
        };
        chart.ahead = chart.leader()?;
        Ok(chart)
    }

    /// On the diagonal itself, lead with the branch that moves off it.
    fn leader(&self) -> Result<Option<bool>, FlowError> {
        let (a, b) = self.start;
        if self.cell().is_none() {
            return Ok(None);
        }
        if a != b {
            return Ok(Some(a > b));
        }
        let m = a.clamp(MIN_NU, 1.0 - 2e-13);
        let split = |n: (f64, f64)| -> Result<f64, FlowError> {
            let c = Config {
                x: Self::point(self.x, n.0),
                y: Self::point(self.y, n.1),
            };
            let v = self.field.eval(&c)?;
            Ok(v.x.rate - v.y.rate)
        };
        if split((m + 1e-13, m))? > 0.0 {
            return Ok(Some(true));
        }
        Ok(Some(split((m, m + 1e-13))? >= 0.0))
    }

    fn cell(&self) -> Option<CellId> {
        match (self.x, self.y) {
            (Lane::Moving(i), Lane::Moving(j)) if i != j => Some(CellId::Square(i, j)),
            _ => None,
        }
    }

    fn point(lane: Lane, nu: f64) -> GraphPoint {
        match lane {
            Lane::Frozen => GraphPoint::CENTER,
            Lane::Moving(e) => GraphPoint {
                edge: Some(e),
                value: nu.clamp(MIN_NU, 1.0),
            },
        }
    }

    /// Keep stages on the starting side of the diagonal so RK4 never
    /// mixes the two branches of a square's field.
    fn side_of(&self, n: (f64, f64)) -> (f64, f64) {
        let Some(ahead) = self.ahead else {
            return n;
        };
        if (ahead && n.0 > n.1) || (!ahead && n.1 > n.0) {
            return n;
        }
        // Stay clear of the clamps, which would make the pair equal again.
        let m = (0.5 * (n.0 + n.1)).clamp(MIN_NU, 1.0 - 2e-13);
        let up = m + 1e-13;
        if ahead {
            (up, m)
        } else {
            (m, up)
        }
    }

    fn rates(&self, n: (f64, f64)) -> Result<(f64, f64), FlowError> {
        let n = self.side_of(n);
        let c = Config {
            x: Self::point(self.x, n.0),
            y: Self::point(self.y, n.1),
        };
        let ConfigVelocity { x, y } = self.field.eval(&c)?;
        let clip = |lane: Lane, nu: f64, r: f64| match lane {
            Lane::Frozen => 0.0,
            Lane::Moving(_) if nu >= 1.0 && r > 0.0 => 0.0,
            Lane::Moving(_) => r,
        };
        Ok((clip(self.x, n.0, x.rate), clip(self.y, n.1, y.rate)))
    }

    fn rk4(&self, h: f64) -> Result<(f64, f64), FlowError> {
        let n = self.start;
        let k1 = self.rates(n)?;
        let k2 = self.rates((n.0 + 0.5 * h * k1.0, n.1 + 0.5 * h * k1.1))?;
        let k3 = self.rates((n.0 + 0.5 * h * k2.0, n.1 + 0.5 * h * k2.1))?;
        let k4 = self.rates((n.0 + h * k3.0, n.1 + h * k3.1))?;
        Ok((
            n.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            n.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        ))
    }

    fn config(&self, n: (f64, f64)) -> Config {
        let pt = |lane: Lane, nu: f64| match lane {
            Lane::Frozen => GraphPoint::CENTER,
            Lane::Moving(_) if nu <= 0.0 => GraphPoint::CENTER,
            Lane::Moving(e) => GraphPoint {
                edge: Some(e),
                value: nu.min(1.0),
            },
        };
        Config {
            x: pt(self.x, n.0),
            y: pt(self.y, n.1),
        }
    }

    fn at(&self, h: f64) -> Result<Config, FlowError> {
        Ok(self.config(self.rk4(h)?))
    }

    fn crossed(&self, s: Surface, n: (f64, f64)) -> bool {
        match s {
            Surface::Hub(Agent::X) => n.0 <= 0.0,
            Surface::Hub(Agent::Y) => n.1 <= 0.0,
            Surface::Diagonal => self.ahead.is_some_and(|a| if a { n.0 < n.1 } else { n.0 > n.1 }),
        }
    }

    /// Advance up to `h`, stopping at the first hub arrival or diagonal
    /// crossing.
    fn advance(&self, h: f64) -> Result<(Config, f64, Option<Surface>), FlowError> {
        let end = self.rk4(h)?;
        let mut candidates = Vec::new();
        if matches!(self.x, Lane::Moving(_)) && self.start.0 > 0.0 {
            candidates.push(Surface::Hub(Agent::X));
        }
        if matches!(self.y, Lane::Moving(_)) && self.start.1 > 0.0 {
            candidates.push(Surface::Hub(Agent::Y));
        }
        if self.ahead.is_some() && self.start.0 > 0.0 && self.start.1 > 0.0 {
            candidates.push(Surface::Diagonal);
        }
        let mut first: Option<(f64, Surface)> = None;
        for s in candidates {
            if !self.crossed(s, end) {
                continue;
            }
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > EVENT_TOL {
                let mid = 0.5 * (lo + hi);
                if self.crossed(s, self.rk4(mid)?) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if first.is_none_or(|(t, _)| hi < t) {
                first = Some((hi, s));
            }
        }
        match first {
            None => Ok((self.config(end), h, None)),
            Some((t, s)) => {
                let mut n = self.rk4(t)?;
                match s {
                    Surface::Hub(Agent::X) => n.0 = 0.0,
                    Surface::Hub(Agent::Y) => n.1 = 0.0,
                    Surface::Diagonal => {}
                }
                Ok((self.config(n), t, Some(s)))
            }
        }
    }

    /// Smallest `h` in `(0, h_max]` where `pred` holds, assuming it fails at 0.
    fn localize(&self, h_max: f64, pred: impl Fn(&Config) -> bool) -> Result<f64, FlowError> {
        self.localize_in(0.0, h_max, pred)
    }

    fn localize_in(&self, lo: f64, hi: f64, pred: impl Fn(&Config) -> bool) -> Result<f64, FlowError> {
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > EVENT_TOL {
            let mid = 0.5 * (lo + hi);
            if pred(&self.at(mid)?) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

fn is_seam(c: &Config) -> bool {
    c.x.edge.is_none() || c.y.edge.is_none()
}

struct DockTracker {
    tol: f64,
    open: Option<DockVisit>,
    visits: Vec<DockVisit>,
}

impl DockTracker {
    fn new(tol: f64, t: f64, c: &Config) -> Self {
        let mut d = DockTracker {
            tol,
            open: None,
            visits: Vec::new(),
        };
        d.enter(t, docking_symbol(c, tol));
        d.touch(c);
        d
    }

    fn enter(&mut self, t: f64, s: Option<GrammarSymbol>) {
        if let Some(mut v) = self.open.take() {
            v.t_out = t;
            self.visits.push(v);
        }
        self.open = s.map(|symbol| DockVisit {
            symbol,
            t_in: t,
            t_out: t,
            clear: false,
        });
    }

    fn touch(&mut self, c: &Config) {
        let lim = 1.0 - 2.0 * self.tol;
        if let Some(v) = self.open.as_mut() {
            match v.symbol {
                GrammarSymbol::A(_) if c.y.value < lim => v.clear = true,
                GrammarSymbol::B(_) if c.x.value < lim => v.clear = true,
                _ => {}
            }
        }
    }

    fn finish(mut self, t: f64) -> Vec<DockVisit> {
        self.enter(t, None);
        self.visits
    }
}

/// Word read off the docking visits. A single-vehicle visit that never saw
/// the other vehicle move clearly inward and that touches a corner visit of
/// the same vehicle is the corner's shoulder, not a symbol of its own. Such
/// a visit still in progress at the end is left out as undecided.
pub fn extract_word(visits: &[DockVisit]) -> Vec<GrammarSymbol> {
    let touching = |a: &DockVisit, b: &DockVisit| (a.t_out - b.t_in).abs() < 1e-12;
    let mut out = Vec::new();
    for (k, v) in visits.iter().enumerate() {
        if !v.symbol.is_corner() && !v.clear {
            let before = k
                .checked_sub(1)
                .map(|p| &visits[p])
                .is_some_and(|p| p.symbol.adjoins(v.symbol) && touching(p, v));
            let after = match visits.get(k + 1) {
                Some(n) => n.symbol.adjoins(v.symbol) && touching(v, n),
                None => true,
            };
            if before || after {
                continue;
            }
        }
        out.push(v.symbol);
    }
    out
}

pub fn integrate(
    field: &PiecewiseField,
    start: Config,
    opts: &IntegrateOptions,
) -> Result<Trajectory, FlowError> {
    integrate_with(&mut Fixed(field), start, opts)
}

/// Integrate under a supervisor that may switch fields at localized events.
pub fn integrate_with<S: Supervisor>(
    sup: &mut S,
    start: Config,
    opts: &IntegrateOptions,
) -> Result<Trajectory, FlowError> {
    if opts.dt.is_nan() || opts.dt <= 0.0 {
        return Err(FlowError::BadStep(opts.dt));
    }
    let sep = start.separation();
    if sep < opts.delta {
        return Err(FlowError::SafetyViolation {
            t: 0.0,
            separation: sep,
            config: start,
        });
    }
    let mut samples = vec![Sample { t: 0.0, config: start }];
    let mut events = Vec::new();
    let mut docks = DockTracker::new(opts.tol, 0.0, &start);
    let mut state = start;
    let mut t = 0.0;
    let mut cell = cell_of(&start);
    let mut termination = Termination::Horizon;
    let steps = (opts.t_max / opts.dt).round() as usize;
    let record = opts.record_every.max(1);

    let goal_hit = |c: &Config| opts.goal.is_some_and(|g| product_distance(c, &g) < opts.goal_tol);
    if goal_hit(&state) {
        events.push(Event {
            t,
            kind: EventKind::GoalReached,
            config: state,
        });
        termination = Termination::Converged;
    }

    'outer: for step in 1..=steps {
        if termination == Termination::Converged {
            break;
        }
        let t_end = step as f64 * opts.dt;
        while t_end - t > 0.5 * EVENT_TOL {
            let h = t_end - t;
            let field = sup.field().clone();
            let chart = Chart::new(&field, &state)?;
            let (mut next, mut used, mut surface) = chart.advance(h)?;

            // A vehicle leaving the hub moves the pair into a new cell now.
            if is_seam(&state) {
                if let Some(c) = chart.cell() {
                    if c != cell {
                        events.push(Event {
                            t,
                            kind: EventKind::CellChange { from: cell, to: c },
                            config: state,
                        });
                        cell = c;
                    }
                }
            }

            if next.separation() < opts.delta {
                let tb = chart.localize(used, |c| c.separation() < opts.delta)?;
                let config = chart.at(tb)?;
                return Err(FlowError::SafetyViolation {
                    t: t + tb,
                    separation: config.separation(),
                    config,
                });
            }

            let mut switched = false;
            if !sup.wants_switch(&state) {
                let probes = if sup.refine(&state) || sup.refine(&next) { SWITCH_PROBES } else { 1 };
                let mut lo = 0.0;
                for k in 1..=probes {
                    let hk = used * k as f64 / probes as f64;
                    let at = if k == probes { next } else { chart.at(hk)? };
                    if sup.wants_switch(&at) {
                        let ts = chart.localize_in(lo, hk, |c| sup.wants_switch(c))?;
                        next = chart.at(ts)?;
                        used = ts;
                        surface = None;
                        switched = true;
                        break;
                    }
                    lo = hk;
                }
            }

            let s0 = docking_symbol(&state, opts.tol);
            let s1 = docking_symbol(&next, opts.tol);
            if s0 != s1 {
                let te = chart.localize(used, |c| docking_symbol(c, opts.tol) != s0)?;
                let at = chart.at(te)?;
                let s = docking_symbol(&at, opts.tol);
                docks.enter(t + te, s);
                events.push(Event {
                    t: t + te,
                    kind: EventKind::Dock(s),
                    config: at,
                });
                if s != s1 {
                    docks.enter(t + used, s1);
                }
            }

            t += used;
            state = next;
            docks.touch(&state);

            for (agent, was, now) in [
                (Agent::X, chart.start.0, state.x.value),
                (Agent::Y, chart.start.1, state.y.value),
            ] {
                if now >= 1.0 && was < 1.0 {
                    events.push(Event {
                        t,
                        kind: EventKind::BoundaryHit(agent),
                        config: state,
                    });
                }
            }
            if let Some(Surface::Hub(a)) = surface {
                events.push(Event {
                    t,
                    kind: EventKind::VertexPass(a),
                    config: state,
                });
            }
            let now = cell_of(&state);
            if now != cell {
                events.push(Event {
                    t,
                    kind: EventKind::CellChange { from: cell, to: now },
                    config: state,
                });
                cell = now;
            }
            if switched {
                let kind = sup.switch(t, &state);
                events.push(Event {
                    t,
                    kind,
                    config: state,
                });
            }
            if goal_hit(&state) {
                events.push(Event {
                    t,
                    kind: EventKind::GoalReached,
                    config: state,
                });
                termination = Termination::Converged;
                samples.push(Sample { t, config: state });
                break 'outer;
            }
        }
        t = t_end;
        sup.observe(t, &state);
        if step % record == 0 || step == steps {
            samples.push(Sample { t, config: state });
        }
    }
    let visits = docks.finish(t);
    let word = extract_word(&visits);
    Ok(Trajectory {
        samples,
        events,
        visits,
        word,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{to_disc, DiscPoint};
    use crate::flow::{circulating_field, circulating_lyapunov, navigation_field, navigation_potential};
    use crate::graph::{GraphPoint, Velocity};

    fn cfg(ix: usize, nx: f64, iy: usize, ny: f64) -> Config {
        Config::at(ix, nx, iy, ny).unwrap()
    }

    #[test]
    fn zero_field_stays_put() {
        let start = cfg(1, 0.3, 2, 0.6);
        let tr = integrate(&PiecewiseField::zero(), start, &IntegrateOptions::new(0.5, 0.1)).unwrap();
        assert_eq!(tr.samples.len(), 6);
        assert!(tr.samples.iter().all(|s| s.config == start));
        assert!(tr.events.is_empty());
    }

    #[test]
    fn circulating_lyapunov_rate() {
        // Off the fins the potential obeys phi' = phi (phi - 1).
        let start = cfg(1, 0.2, 2, 0.1);
        let tr = integrate(&circulating_field(), start, &IntegrateOptions::new(6.0, 1e-3)).unwrap();
        let phi0 = circulating_lyapunov(&start);
        for s in tr.samples.iter().step_by(100) {
            let exact = phi0 / (phi0 + (1.0 - phi0) * s.t.exp());
            assert!((circulating_lyapunov(&s.config) - exact).abs() < 1e-6, "t = {} {} {} {}", s.t, circulating_lyapunov(&s.config), exact, s.config);
        }
    }

    #[test]
    fn circulating_visits_all_squares() {
        let tr = integrate(&circulating_field(), cfg(1, 0.5, 1, 0.2), &IntegrateOptions::new(40.0, 2e-3)).unwrap();
        let cells: Vec<CellId> = tr
            .events_of(|k| matches!(k, EventKind::CellChange { .. }))
            .map(|e| match e.kind {
                EventKind::CellChange { to, .. } => to,
                _ => unreachable!(),
            })
            .collect();
        let tail = &cells[cells.len() - 6..];
        let mut seen: Vec<_> = tail.to_vec();
        seen.sort_by_key(|c| c.to_string());
        seen.dedup();
        assert_eq!(seen.len(), 6, "{cells:?}");
        assert!(tail.iter().all(|c| matches!(c, CellId::Square(..))));
        assert!(tr.events_of(|k| matches!(k, EventKind::VertexPass(_))).count() > 6);
        assert!(tr.word.len() >= 6, "{:?}", tr.word);
    }

    #[test]
    fn navigation_converges_early() {
        let gx = GraphPoint::on(1, 0.5).unwrap();
        let gy = GraphPoint::on(2, 0.4).unwrap();
        let goal = Config { x: gx, y: gy };
        let f = navigation_field(gx, gy).unwrap();
        let opts = IntegrateOptions {
            goal: Some(goal),
            ..IntegrateOptions::new(60.0, 1e-2)
        };
        let start = cfg(3, 0.7, 1, 0.2);
        let tr = integrate(&f, start, &opts).unwrap();
        assert_eq!(tr.termination, Termination::Converged);
        assert!(tr.last().t < 60.0);
        assert!(matches!(tr.events.last().unwrap().kind, EventKind::GoalReached));
        let p: Vec<f64> = tr
            .samples
            .iter()
            .map(|s| navigation_potential(&goal, &s.config).unwrap())
            .collect();
        assert!(p.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        let _ = to_disc(&tr.last().config).map(|d: DiscPoint| d.r);
    }

    #[test]
    fn guard_breach_is_reported() {
        // Both vehicles driven into each other on a fin.
        let f = PiecewiseField::new("crash", true, true, |c: &Config| {
            let e = c.x.edge.or(c.y.edge).unwrap();
            let (nx, ny) = c.nu();
            let s = if nx < ny { 1.0 } else { -1.0 };
            Ok(ConfigVelocity::new(Velocity::new(c.x.edge.unwrap_or(e), s), Velocity::new(c.y.edge.unwrap_or(e), -s)))
        });
        let err = integrate(&f, cfg(1, 0.2, 1, 0.6), &IntegrateOptions::new(1.0, 1e-2)).unwrap_err();
        match err {
            FlowError::SafetyViolation { t, separation, .. } => {
                assert!((t - 0.19).abs() < 1e-6, "{t}");
                assert!(separation < 0.02);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn filter_drops_shoulders() {
        use GrammarSymbol::*;
        let v = |symbol, t_in, t_out, clear| DockVisit { symbol, t_in, t_out, clear };
        let visits = [
            v(A(1), 0.0, 1.0, true),
            v(A(1), 2.0, 2.5, false),
            v(AB(1, 2), 2.5, 3.0, true),
            v(B(2), 3.0, 3.2, false),
            v(B(2), 4.0, 5.0, true),
        ];
        assert_eq!(extract_word(&visits), vec![A(1), AB(1, 2), B(2)]);
    }
}
