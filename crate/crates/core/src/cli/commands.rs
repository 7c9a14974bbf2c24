//! The verbs. Each returns a report (text plus exit code) or an error.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::thread;

use super::output::{render_svg, trajectory_csv};
use super::scenario::{FieldSpec, Scenario};
use super::{CliError, EXIT_INVALID, EXIT_OK};
use crate::chords::{realized_cycle_error, run_cycle_with, steady_state, ChordPlan, CycleRun};
use crate::cspace::{
    gap_angles, monotone_orientation, optimal_winding_class, to_disc, wd_cost, Config, DiscPoint, GrammarSymbol, Word,
};
use crate::flow::{
    circulating_lyapunov, integrate, navigation_potential, validate_config_field, EventKind, IntegrateOptions,
    PiecewiseField, Termination, Trajectory, TunedCycle, ValidityReport,
};
use crate::graph::{EdgeId, Graph};
use crate::patterns::build_levels;

const DEFAULT_HORIZON: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub exit: i32,
    pub text: String,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { exit: EXIT_OK, text }
    }
}

/// Command-line overrides of the scenario.
#[derive(Debug, Clone, Default)]
pub struct RunSettings {
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Replaces explicit starts with this many random ones.
    pub starts: Option<usize>,
}

impl RunSettings {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(seed) = self.seed {
            s.sim.seed = seed;
        }
        if let Some(n) = self.starts {
            s.sim.starts.clear();
            s.sim.count = n;
        }
        if let Some(p) = &self.out {
            s.output.csv = Some(p.display().to_string());
        }
        if let Some(p) = &self.svg {
            s.output.svg = Some(p.display().to_string());
        }
    }
}

enum Dynamics {
    Plain(PiecewiseField),
    Chords(Box<ChordPlan>),
}

struct Outcome {
    trajectory: Trajectory,
    chord: Option<CycleRun>,
}

fn dynamics(s: &Scenario) -> Result<Dynamics, CliError> {
    Ok(match s.field.plan(s.sim.epsilon)? {
        Some(p) => Dynamics::Chords(Box::new(p)),
        None => Dynamics::Plain(s.field.field()?),
    })
}

fn options(s: &Scenario, dyn_: &Dynamics) -> Result<IntegrateOptions, CliError> {
    let t_max = match (s.sim.t_max, dyn_) {
        (Some(t), _) => t,
        (None, Dynamics::Chords(p)) => p.default_horizon(),
        (None, Dynamics::Plain(_)) => DEFAULT_HORIZON,
    };
    let mut o = IntegrateOptions::new(t_max, s.sim.dt);
    o.delta = s.sim.delta;
    o.tol = s.sim.tol;
    o.goal = s.field.goal()?;
    Ok(o)
}

fn run_one(d: &Dynamics, start: Config, opts: &IntegrateOptions) -> Result<Outcome, CliError> {
    match d {
        Dynamics::Plain(f) => Ok(Outcome {
            trajectory: integrate(f, start, opts)?,
            chord: None,
        }),
        Dynamics::Chords(p) => {
            let run = run_cycle_with(p, start, opts)?;
            Ok(Outcome {
                trajectory: run.trajectory.clone(),
                chord: Some(run),
            })
        }
    }
}

/// Runs every start, spread over the available cores; results come back
/// in start order.
fn run_all(d: &Dynamics, starts: &[Config], opts: &IntegrateOptions) -> Vec<Result<Outcome, CliError>> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(starts.len()).max(1);
    if workers == 1 {
        return starts.iter().map(|&c| run_one(d, c, opts)).collect();
    }
    let mut slots: Vec<Option<Result<Outcome, CliError>>> = (0..starts.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..starts.len())
                        .step_by(workers)
                        .map(|k| (k, run_one(d, starts[k], opts)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("worker panicked") {
                slots[k] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every start ran")).collect()
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `runs.csv` becomes `runs-0.csv`, `runs-1.csv`, ... when there are
/// several starts.
fn numbered(path: &str, k: usize, n: usize) -> PathBuf {
    let p = PathBuf::from(path);
    if n == 1 {
        return p;
    }
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match p.extension() {
        Some(ext) => format!("{stem}-{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{k}"),
    };
    p.with_file_name(name)
}

fn lyapunov(field: &FieldSpec, tuned: Option<&TunedCycle>, plan: Option<&ChordPlan>, c: &Config) -> Option<f64> {
    match field {
        FieldSpec::Circulating { .. } => Some(circulating_lyapunov(c)),
        FieldSpec::Navigation { .. } => {
            let goal = field.goal().ok()??;
            navigation_potential(&goal, c).ok()
        }
        FieldSpec::Tuned { .. } => {
            let d = to_disc(c).ok()?;
            Some((d.r - tuned?.profile().value(d.theta)).abs())
        }
        FieldSpec::Chords { .. } => Some(plan?.alpha().distance(c)),
    }
}

fn fmt_word(w: &[GrammarSymbol]) -> String {
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

/// Shortest period `p` whose last two repeats agree, when the word ends
/// periodically.
fn periodic_tail(w: &[GrammarSymbol]) -> Option<usize> {
    (1..=w.len() / 2).find(|&p| {
        let tail = &w[w.len() - 2 * p..];
        tail[..p] == tail[p..]
    })
}

fn disc_points(traj: &Trajectory, from: f64, to: f64) -> Vec<DiscPoint> {
    traj.samples
        .iter()
        .filter(|s| s.t >= from && s.t <= to)
        .filter_map(|s| to_disc(&s.config).ok())
        .collect()
}

fn summarize(out: &mut String, s: &Scenario, k: usize, o: &Outcome, tuned: Option<&TunedCycle>, plan: Option<&ChordPlan>) {
    let traj = &o.trajectory;
    let last = traj.last();
    let ended = match traj.termination {
        Termination::Horizon => "horizon",
        Termination::Converged => "converged",
    };
    let _ = writeln!(out, "start {k}: {} -> {} at t = {:.4} ({ended})", traj.samples[0].config, last.config, last.t);
    let phis: Vec<f64> = traj
        .samples
        .iter()
        .filter_map(|smp| lyapunov(&s.field, tuned, plan, &smp.config))
        .collect();
    if let (Some(first), Some(fin)) = (phis.first(), phis.last()) {
        let min = phis.iter().copied().fold(f64::INFINITY, f64::min);
        let max = phis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = phis.iter().sum::<f64>() / phis.len() as f64;
        let _ = writeln!(
            out,
            "  phi: first {first:.6} last {fin:.6} min {min:.6} max {max:.6} mean {mean:.6}"
        );
    }
    let cells = traj.events_of(|e| matches!(e, EventKind::CellChange { .. })).count();
    let _ = writeln!(out, "  events: {} ({cells} cell changes)", traj.events.len());
    let _ = writeln!(out, "  observed word: {}", fmt_word(&traj.word));

    let window = if let (Some(run), Some(plan)) = (&o.chord, plan) {
        match steady_state(&traj.word, &plan.word, 2) {
            Some(ss) => {
                let _ = writeln!(out, "  steady word: {} (after {} transient symbols)", plan.word, ss.transient);
            }
            None => {
                let _ = writeln!(out, "  steady word: none");
            }
        }
        match realized_cycle_error(run, plan) {
            Ok(e) => {
                let _ = writeln!(out, "  realized cycle error: {e:.6} (epsilon {})", plan.epsilon);
            }
            Err(e) => {
                let _ = writeln!(out, "  realized cycle error: n/a ({e})");
            }
        }
        let into_first: Vec<f64> = run.switches.iter().filter(|r| r.to == 0).map(|r| r.t).collect();
        (into_first.len() >= 2).then(|| (into_first[into_first.len() - 2], into_first[into_first.len() - 1]))
    } else {
        match periodic_tail(&traj.word) {
            Some(p) => {
                let w = &traj.word[traj.word.len() - p..];
                let _ = writeln!(out, "  steady word: {}", fmt_word(w));
                let v = &traj.visits;
                (v.len() > p).then(|| (v[v.len() - p - 1].t_in, v[v.len() - 1].t_in))
            }
            None => {
                let _ = writeln!(out, "  steady word: none");
                None
            }
        }
    };
    match window {
        Some((a, b)) => {
            let pts = disc_points(traj, a, b);
            let _ = writeln!(out, "  W_d of last period [{a:.4}, {b:.4}]: {}", wd_cost(&pts));
        }
        None => {
            let _ = writeln!(out, "  W_d of last period: n/a");
        }
    }
}

pub fn cmd_simulate(scenario: &Scenario, settings: &RunSettings) -> Result<Report, CliError> {
    let mut s = scenario.clone();
    settings.apply(&mut s);
    let starts = s.starts()?;
    let d = dynamics(&s)?;
    let opts = options(&s, &d)?;
    let tuned = s.field.tuned()?;
    let plan = match &d {
        Dynamics::Chords(p) => Some(p.as_ref()),
        Dynamics::Plain(_) => None,
    };
    let outcomes = run_all(&d, &starts, &opts).into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "simulate {} field, {} start(s), t_max {}, dt {}",
        s.field.kind(),
        starts.len(),
        opts.t_max,
        opts.dt
    );
    for (k, o) in outcomes.iter().enumerate() {
        summarize(&mut text, &s, k, o, tuned.as_ref(), plan);
    }
    if let Some(csv) = &s.output.csv {
        for (k, o) in outcomes.iter().enumerate() {
            let path = numbered(csv, k, outcomes.len());
            trajectory_csv(create(&path)?, &o.trajectory, s.sim.tol)?;
            let _ = writeln!(text, "wrote {}", path.display());
        }
    }
    if let Some(svg) = &s.output.svg {
        let orbits: Vec<&Trajectory> = outcomes.iter().map(|o| &o.trajectory).collect();
        let path = PathBuf::from(svg);
        std::fs::write(&path, render_svg(&orbits)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(Report::ok(text))
}

fn report_validity(text: &mut String, name: &str, r: &ValidityReport) {
    let verdict = if r.is_valid() { "valid" } else { "INVALID" };
    let _ = writeln!(
        text,
        "{name}: {verdict} ({} branch points, {} singular, {} violations)",
        r.checked,
        r.singular,
        r.violations.len()
    );
    for v in &r.violations {
        let _ = writeln!(text, "  violation: {v}");
    }
}

pub fn cmd_validate(scenario: &Scenario) -> Result<Report, CliError> {
    let n = scenario.sim.samples;
    let mut text = String::new();
    let mut valid = true;
    match dynamics(scenario)? {
        Dynamics::Plain(f) => {
            let r = validate_config_field(&f, n);
            valid &= r.is_valid();
            report_validity(&mut text, f.name(), &r);
        }
        Dynamics::Chords(p) => {
            for (j, f) in p.fields.iter().enumerate() {
                let r = validate_config_field(f, n);
                valid &= r.is_valid();
                report_validity(&mut text, &format!("chord {}", j + 1), &r);
            }
        }
    }
    Ok(Report {
        exit: if valid { EXIT_OK } else { EXIT_INVALID },
        text,
    })
}

fn fmt_angles(a: &[f64]) -> String {
    a.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn gap_report(text: &mut String, angles: &[f64]) -> Result<(), CliError> {
    let gaps = gap_angles(angles)?;
    let widest = gaps.iter().copied().fold(0.0, f64::max);
    let _ = writeln!(text, "gap angles: {}", fmt_angles(&gaps));
    let _ = writeln!(text, "widest gap: {widest:.6} ({:.4} turns)", widest / TAU);
    let _ = writeln!(text, "optimal winding class: {:?}", optimal_winding_class(&gaps));
    Ok(())
}

/// Verdict, zone angles, gaps and winding class. A non-monotone word
/// exits with the validation code.
pub fn cmd_check_word(tokens: &str) -> Result<Report, CliError> {
    let w = Word::parse(tokens)?;
    let orientation = monotone_orientation(&w);
    let mono = orientation.is_some();
    let angles: Vec<f64> = w.symbols().iter().map(|s| s.zone_midpoint()).collect();
    let mut text = String::new();
    let _ = writeln!(text, "word: {w}");
    let _ = writeln!(text, "monotone: {}", if mono { "yes" } else { "no" });
    let _ = writeln!(text, "zone angles: {}", fmt_angles(&angles));
    if let Some(o) = orientation {
        let dir = if o > 0 { "counterclockwise" } else { "clockwise" };
        let _ = writeln!(text, "orientation: {dir}");
        // Gaps are measured along the direction of travel.
        let along: Vec<f64> = angles.iter().map(|a| f64::from(o) * a).collect();
        gap_report(&mut text, &along)?;
    }
    Ok(Report {
        exit: if mono { EXIT_OK } else { EXIT_INVALID },
        text,
    })
}

/// Angles in radians or docking-symbol tokens, in visiting order.
pub fn cmd_gap_angles(values: &[String]) -> Result<Report, CliError> {
    let angles = values
        .iter()
        .map(|v| match v.parse::<f64>() {
            Ok(a) if a.is_finite() => Ok(a),
            _ => v
                .parse::<GrammarSymbol>()
                .map(|s| s.zone_midpoint())
                .map_err(CliError::from),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    let _ = writeln!(text, "angles: {}", fmt_angles(&angles));
    gap_report(&mut text, &angles)?;
    Ok(Report::ok(text))
}

pub fn cmd_pattern(g: &Graph, block: &[usize], start: usize) -> Result<Report, CliError> {
    let block: Vec<EdgeId> = block.iter().map(|&e| EdgeId(e)).collect();
    let levels = build_levels(g, &block)?;
    let start = EdgeId(start);
    g.edge(start).map_err(crate::patterns::PatternError::from)?;
    let mut text = String::new();
    let list = |es: &mut dyn Iterator<Item = EdgeId>| es.map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(text, "block: {}", list(&mut block.iter().copied()));
    for (k, lvl) in levels.levels().iter().enumerate() {
        let _ = writeln!(text, "level {k}: {}", list(&mut lvl.iter().copied()));
    }
    let _ = writeln!(text, "leftover: {}", list(&mut levels.leftover().iter().copied()));
    let steps = levels.steps_to_pattern(start)?;
    let _ = writeln!(text, "steps to pattern: {steps}");
    let seq = levels.iterate(start, steps + 2 * block.len() - 1)?;
    let _ = writeln!(text, "iterates: {}", list(&mut seq.into_iter()));
    Ok(Report::ok(text))
}

/// Profile range, period, semiflow check and convergence from the
/// scenario starts.
pub fn cmd_tune(scenario: &Scenario, settings: &RunSettings) -> Result<Report, CliError> {
    let mut s = scenario.clone();
    settings.apply(&mut s);
    let Some(tuned) = s.field.tuned()? else {
        return Err(CliError::Scenario(format!("field: tune needs a tuned field, got {}", s.field.kind())));
    };
    let f = tuned.profile();
    let n = 720;
    let vals: Vec<f64> = (0..n).map(|k| f.value(TAU * k as f64 / n as f64)).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut text = String::new();
    let _ = writeln!(text, "profile range: [{lo:.6}, {hi:.6}] over {n} samples");
    let _ = writeln!(text, "omega {} (period {:.6})", tuned.omega(), TAU / tuned.omega().abs());
    if !(lo > 0.0 && hi <= 1.0) {
        let _ = writeln!(text, "profile leaves (0, 1]: the cycle is not inside the disc");
        return Ok(Report {
            exit: EXIT_INVALID,
            text,
        });
    }
    let field = s.field.field()?;
    let r = validate_config_field(&field, s.sim.samples);
    report_validity(&mut text, field.name(), &r);
    let d = Dynamics::Plain(field);
    let opts = options(&s, &d)?;
    let starts = s.starts()?;
    let mut worst: f64 = 0.0;
    for o in run_all(&d, &starts, &opts) {
        let o = o?;
        let end = o.trajectory.last();
        match to_disc(&end.config) {
            Ok(p) => worst = worst.max((p.r - f.value(p.theta)).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    let _ = writeln!(
        text,
        "max |r - f(theta)| at t = {} over {} start(s): {worst:.3e}",
        opts.t_max,
        starts.len()
    );
    Ok(Report {
        exit: if r.is_valid() { EXIT_OK } else { EXIT_INVALID },
        text,
    })
}
