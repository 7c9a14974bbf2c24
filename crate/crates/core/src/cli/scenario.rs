//! Scenario documents: which graph, which field, how to integrate, where to
//! write. JSON with every omitted key defaulted.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::chords::{plan_cycle_with, ChordOptions, ChordPlan};
use crate::cspace::{Config, Word, DEFAULT_DELTA, DEFAULT_TOL};
use crate::flow::{circulating_velocity, navigation_field, ConfigVelocity, HarmonicProfile, PiecewiseField, TunedCycle};
use crate::graph::{EdgeId, Graph, GraphPoint, Velocity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Named(String),
    Explicit {
        vertices: Vec<usize>,
        /// `[id, tail, head]`.
        edges: Vec<[usize; 3]>,
    },
}

impl Default for GraphSpec {
    fn default() -> Self {
        GraphSpec::Named("Y".into())
    }
}

impl GraphSpec {
    pub fn is_y(&self) -> bool {
        matches!(self, GraphSpec::Named(n) if n == "Y")
    }

    pub fn build(&self) -> Result<Graph, CliError> {
        match self {
            GraphSpec::Named(n) if n == "Y" => Ok(Graph::y_graph()),
            GraphSpec::Named(n) => Err(CliError::Scenario(format!("graph: unknown built-in `{n}`"))),
            GraphSpec::Explicit { vertices, edges } => {
                let triples: Vec<(usize, usize, usize)> = edges.iter().map(|e| (e[0], e[1], e[2])).collect();
                let g = Graph::from_triples(&triples).map_err(|e| CliError::Scenario(format!("graph: {e}")))?;
                for &v in vertices {
                    if !g.vertices().iter().any(|w| w.0 == v) {
                        return Err(CliError::Scenario(format!("graph: vertex {v} has no edges")));
                    }
                }
                Ok(g)
            }
        }
    }
}

/// `[edge, nu]` with edge 0 standing for the hub.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSpec(pub usize, pub f64);

impl PointSpec {
    pub fn point(self) -> Result<GraphPoint, CliError> {
        match self {
            PointSpec(0, _) => Ok(GraphPoint::CENTER),
            PointSpec(e, v) => GraphPoint::on(e, v).map_err(|err| CliError::Scenario(format!("point [{e}, {v}]: {err}"))),
        }
    }

    pub fn of(p: GraphPoint) -> PointSpec {
        PointSpec(p.edge.map_or(0, |e| e.0), p.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    pub x: PointSpec,
    pub y: PointSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonics {
    pub a0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Circulating {
        /// Multiplies the descent speed on the fins; anything but 1 breaks
        /// the hub conditions.
        #[serde(default = "one")]
        fin_speed: f64,
    },
    Navigation {
        goal_x: PointSpec,
        goal_y: PointSpec,
        #[serde(default = "yes")]
        fins: bool,
    },
    Tuned {
        f_harmonics: Harmonics,
        #[serde(default = "two")]
        omega: f64,
        #[serde(default = "one")]
        gain: f64,
        #[serde(default = "yes")]
        fins: bool,
    },
    Chords {
        word: Word,
        #[serde(default = "two")]
        omega: f64,
        /// How far forward chords dip below the docking boundary.
        #[serde(default)]
        arc_margin: Option<f64>,
        #[serde(default)]
        gain: Option<f64>,
    },
}

impl FieldSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FieldSpec::Circulating { .. } => "circulating",
            FieldSpec::Navigation { .. } => "navigation",
            FieldSpec::Tuned { .. } => "tuned",
            FieldSpec::Chords { .. } => "chords",
        }
    }

    pub fn goal(&self) -> Result<Option<Config>, CliError> {
        match self {
            FieldSpec::Navigation { goal_x, goal_y, .. } => Ok(Some(Config {
                x: goal_x.point()?,
                y: goal_y.point()?,
            })),
            _ => Ok(None),
        }
    }

    pub fn profile(&self) -> Option<HarmonicProfile> {
        match self {
            FieldSpec::Tuned { f_harmonics: h, .. } => Some(HarmonicProfile {
                a0: h.a0,
                cos: h.cos.clone(),
                sin: h.sin.clone(),
            }),
            _ => None,
        }
    }

    pub fn tuned(&self) -> Result<Option<TunedCycle>, CliError> {
        match (self, self.profile()) {
            (FieldSpec::Tuned { omega, gain, .. }, Some(p)) => {
                let t = TunedCycle::new(Arc::new(p), *omega).map_err(|e| CliError::Scenario(format!("field: {e}")))?;
                Ok(Some(t.with_gain(*gain)))
            }
            _ => Ok(None),
        }
    }

    pub fn plan(&self, epsilon: f64) -> Result<Option<ChordPlan>, CliError> {
        let FieldSpec::Chords { word, omega, arc_margin, gain } = self else {
            return Ok(None);
        };
        let mut opts = ChordOptions {
            omega: *omega,
            ..ChordOptions::default()
        };
        if let Some(d) = arc_margin {
            if !(*d > 0.0 && *d < opts.backward_depth) {
                return Err(CliError::Scenario(format!(
                    "field.arc_margin: {d} outside (0, {})",
                    opts.backward_depth
                )));
            }
            opts.depth = *d;
        }
        if let Some(k) = gain {
            opts.gain = *k;
        }
        if omega.is_nan() || *omega <= 0.0 {
            return Err(CliError::Scenario(format!("field.omega: {omega} must be positive")));
        }
        plan_cycle_with(word, epsilon, opts)
            .map(Some)
            .map_err(|e| CliError::Scenario(format!("field: {e}")))
    }

    /// The field itself. Chord fields are switched and are built from the
    /// plan instead.
    pub fn field(&self) -> Result<PiecewiseField, CliError> {
        match self {
            FieldSpec::Circulating { fin_speed } => {
                let s = *fin_speed;
                Ok(PiecewiseField::new("circulating", true, true, move |c: &Config| {
                    let v = circulating_velocity(c)?;
                    if !c.is_fin() || s == 1.0 {
                        return Ok(v);
                    }
                    let slow = |u: Velocity| if u.rate < 0.0 { Velocity::new(u.edge, s * u.rate) } else { u };
                    Ok(ConfigVelocity::new(slow(v.x), slow(v.y)))
                }))
            }
            FieldSpec::Navigation { goal_x, goal_y, fins } => {
                let f = navigation_field(goal_x.point()?, goal_y.point()?)
                    .map_err(|e| CliError::Scenario(format!("field: {e}")))?;
                Ok(if *fins { f } else { squares_only(f) })
            }
            FieldSpec::Tuned { fins, .. } => {
                let f = self.tuned()?.expect("tuned spec").config_field();
                Ok(if *fins { f } else { squares_only(f) })
            }
            FieldSpec::Chords { .. } => Err(CliError::Scenario("chord fields are switched; use the plan".into())),
        }
    }
}

fn squares_only(f: PiecewiseField) -> PiecewiseField {
    let name = format!("{} (squares only)", f.name());
    PiecewiseField::new(name, true, false, move |c| f.eval(c))
}

fn default_dt() -> f64 {
    1e-3
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_epsilon() -> f64 {
    0.05
}

fn default_count() -> usize {
    1
}

fn default_samples() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    /// Horizon; chord runs default to a few periods of the plan, other
    /// fields to 20.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Explicit starts; when empty, `count` random starts from `seed`.
    #[serde(default)]
    pub starts: Vec<StartSpec>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Branch points checked by `validate`.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for SimSpec {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all keys defaulted")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub block: Vec<usize>,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub graph: GraphSpec,
    pub field: FieldSpec,
    #[serde(default)]
    pub sim: SimSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    s.check()?;
    Ok(s)
}

pub fn render_scenario(s: &Scenario) -> String {
    serde_json::to_string_pretty(s).expect("scenarios serialize")
}

impl Scenario {
    fn check(&self) -> Result<(), CliError> {
        let bad = |key: &str, msg: String| Err(CliError::Scenario(format!("{key}: {msg}")));
        let sim = &self.sim;
        if let Some(t) = sim.t_max {
            if !(t >= 0.0 && t.is_finite()) {
                return bad("sim.t_max", format!("{t} must be finite and nonnegative"));
            }
        }
        if !(sim.dt > 0.0 && sim.dt.is_finite()) {
            return bad("sim.dt", format!("{} must be positive", sim.dt));
        }
        if !(sim.delta >= 0.0 && sim.delta < 1.0) {
            return bad("sim.delta", format!("{} outside [0, 1)", sim.delta));
        }
        if !(sim.tol > 0.0 && sim.tol < 0.5) {
            return bad("sim.tol", format!("{} outside (0, 0.5)", sim.tol));
        }
        if sim.samples == 0 {
            return bad("sim.samples", "must be at least 1".into());
        }
        let g = self.graph.build()?;
        if let Some(p) = &self.pattern {
            for &e in p.block.iter().chain([&p.start]) {
                if !g.contains_edge(EdgeId(e)) {
                    return bad("pattern", format!("edge {e} not in the graph"));
                }
            }
        }
        for (k, s) in sim.starts.iter().enumerate() {
            Config::new(s.x.point()?, s.y.point()?, sim.delta)
                .map_err(|e| CliError::Scenario(format!("sim.starts[{k}]: {e}")))?;
        }
        if let FieldSpec::Navigation { .. } = self.field {
            let goal = self.field.goal()?.expect("navigation goal");
            if goal.x.is_center() || goal.y.is_center() || goal.x.edge == goal.y.edge {
                return bad("field", "goals must be interior points of distinct edges".into());
            }
        }
        match &self.field {
            FieldSpec::Chords { .. } => {
                self.field.plan(sim.epsilon)?;
            }
            _ => {
                self.field.field()?;
            }
        }
        Ok(())
    }

    /// Starting configurations, explicit or drawn from the seed.
    pub fn starts(&self) -> Result<Vec<Config>, CliError> {
        if !self.sim.starts.is_empty() {
            return self
                .sim
                .starts
                .iter()
                .map(|s| Ok(Config::new(s.x.point()?, s.y.point()?, self.sim.delta)?))
                .collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.sim.seed);
        Ok((0..self.sim.count).map(|_| random_config(&mut rng, self.sim.delta)).collect())
    }
}

/// Uniform cell (six squares, six fins), then uniform coordinates,
/// rejecting draws inside the guard.
pub fn random_config<R: Rng>(rng: &mut R, delta: f64) -> Config {
    loop {
        let cell = rng.gen_range(0..12);
        let i = cell % 3 + 1;
        let j = if cell < 6 {
            // Squares: the other edge one or two steps on.
            (i + cell / 3) % 3 + 1
        } else {
            i
        };
        let x = GraphPoint {
            edge: Some(EdgeId(i)),
            value: rng.gen_range(f64::EPSILON..=1.0),
        };
        let y = GraphPoint {
            edge: Some(EdgeId(j)),
            value: rng.gen_range(f64::EPSILON..=1.0),
        };
        if let Ok(c) = Config::new(x, y, delta) {
            return c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let s = parse_scenario(r#"{"field": {"kind": "circulating"}}"#).unwrap();
        assert_eq!(s.sim.dt, 1e-3);
        assert_eq!(s.sim.delta, 0.02);
        assert_eq!(s.sim.epsilon, 0.05);
        assert!(s.graph.is_y());
        assert_eq!(s, parse_scenario(&render_scenario(&s)).unwrap());
    }

    #[test]
    fn unknown_kind_named() {
        let e = parse_scenario(r#"{"field": {"kind": "vortex"}}"#).unwrap_err();
        assert!(e.to_string().contains("vortex"), "{e}");
        let e = parse_scenario(r#"{"field": {}}"#).unwrap_err();
        assert!(e.to_string().contains("kind"), "{e}");
    }

    #[test]
    fn bad_corner_token() {
        let e = parse_scenario(r#"{"field": {"kind": "chords", "word": ["A1", "AB11"]}}"#).unwrap_err();
        assert!(e.to_string().contains("AB11"), "{e}");
    }

    #[test]
    fn random_starts_respect_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut fins = 0;
        for _ in 0..2000 {
            let c = random_config(&mut rng, 0.1);
            assert!(c.separation() >= 0.1);
            fins += c.is_fin() as usize;
        }
        assert!(fins > 800 && fins < 1200, "{fins}");
    }
}
