//! Trajectory CSV and disc-model SVG.

use std::fmt::Write as _;
use std::io::Write;

use super::CliError;
use crate::cspace::{docking_symbol, seam_angles, to_disc, Config, CYCLIC_ORDER};
use crate::flow::{EventKind, Trajectory};

pub const CSV_HEADER: [&str; 10] = ["t", "iota_x", "nu_x", "iota_y", "nu_y", "cell", "r", "theta", "event", "symbol"];

fn row(t: f64, c: &Config, event: Option<&EventKind>, tol: f64) -> [String; 10] {
    let (r, theta) = match to_disc(c) {
        Ok(d) => (d.r.to_string(), d.theta.to_string()),
        Err(_) => (String::new(), String::new()),
    };
    let symbol = match event {
        Some(EventKind::Dock(s)) => s.map(|s| s.to_string()).unwrap_or_default(),
        _ => docking_symbol(c, tol).map(|s| s.to_string()).unwrap_or_default(),
    };
    [
        t.to_string(),
        c.x.edge.map_or(0, |e| e.0).to_string(),
        c.x.value.to_string(),
        c.y.edge.map_or(0, |e| e.0).to_string(),
        c.y.value.to_string(),
        crate::cspace::cell_of(c).to_string(),
        r,
        theta,
        event.map(|e| e.to_string()).unwrap_or_default(),
        symbol,
    ]
}

/// Samples and events interleaved by time; an event sorts after a sample
/// at the same instant.
pub fn trajectory_csv<W: Write>(out: W, traj: &Trajectory, tol: f64) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let (mut i, mut j) = (0, 0);
    let (s, e) = (&traj.samples, &traj.events);
    while i < s.len() || j < e.len() {
        if j >= e.len() || (i < s.len() && s[i].t <= e[j].t) {
            w.write_record(row(s[i].t, &s[i].config, None, tol))?;
            i += 1;
        } else {
            w.write_record(row(e[j].t, &e[j].config, Some(&e[j].kind), tol))?;
            j += 1;
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: "csv".into(),
        source,
    })?;
    Ok(())
}

const SIZE: f64 = 800.0;
const SCALE: f64 = 340.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn px(x: f64, y: f64) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * x, SIZE / 2.0 - SCALE * y)
}

/// Orbits drawn in the disc; fin stretches break the polyline.
pub fn render_svg(orbits: &[&Trajectory]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#
    );
    let _ = writeln!(s, r#"<rect width="800" height="800" fill="white"/>"#);
    let (cx, cy) = px(0.0, 0.0);
    let _ = writeln!(
        s,
        r#"<circle cx="{cx}" cy="{cy}" r="{SCALE}" fill="none" stroke="black" stroke-width="1.5"/>"#
    );
    for a in seam_angles() {
        let (x, y) = px(a.cos(), a.sin());
        let _ = writeln!(
            s,
            r#"<line x1="{cx}" y1="{cy}" x2="{x:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 4"/>"#
        );
    }
    for sym in CYCLIC_ORDER {
        let a = sym.zone_midpoint();
        let (x, y) = px(1.1 * a.cos(), 1.1 * a.sin());
        let (tx, ty) = px(a.cos(), a.sin());
        let (ux, uy) = px(0.97 * a.cos(), 0.97 * a.sin());
        let _ = writeln!(s, r#"<line x1="{ux:.2}" y1="{uy:.2}" x2="{tx:.2}" y2="{ty:.2}" stroke="black"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="16" text-anchor="middle" dominant-baseline="middle">{sym}</text>"#
        );
    }
    for (k, traj) in orbits.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for run in disc_runs(traj) {
            if run.len() < 2 {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn disc_runs(traj: &Trajectory) -> Vec<Vec<(f64, f64)>> {
    let mut runs = vec![Vec::new()];
    for smp in &traj.samples {
        match to_disc(&smp.config) {
            Ok(d) => {
                let (x, y) = d.cartesian();
                runs.last_mut().expect("nonempty").push(px(x, y));
            }
            Err(_) => {
                if !runs.last().expect("nonempty").is_empty() {
                    runs.push(Vec::new());
                }
            }
        }
    }
    runs
}
