//! Fields designed in the disc model and carried to the configuration space.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use super::{ConfigVelocity, FlowError, PiecewiseField};
use crate::cspace::{cell_of, parity, to_disc, wedge_indices, CellId, Config, DiscPoint};
use crate::graph::{GraphPoint, Velocity};

type DiscEval = dyn Fn(DiscPoint) -> (f64, f64) + Send + Sync;

/// A planar field `(r_dot, theta_dot)` on the punctured disc.
#[derive(Clone)]
pub struct DiscField {
    eval: Arc<DiscEval>,
}

impl fmt::Debug for DiscField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DiscField")
    }
}

impl DiscField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(DiscPoint) -> (f64, f64) + Send + Sync + 'static,
    {
        DiscField { eval: Arc::new(f) }
    }

    pub fn eval(&self, d: DiscPoint) -> (f64, f64) {
        (self.eval)(d)
    }

    pub fn r_dot(&self, d: DiscPoint) -> f64 {
        self.eval(d).0
    }

    pub fn theta_dot(&self, d: DiscPoint) -> f64 {
        self.eval(d).1
    }
}

/// Pull a disc field back through the disc homeomorphism at `c`.
///
/// At a seam the hub vehicle is sent into the wedge that the angular motion
/// enters.
pub fn pushforward_velocity(f: &DiscField, c: &Config) -> Result<ConfigVelocity, FlowError> {
    let d = to_disc(c)?;
    let (rd, td) = f.eval(d);
    let (nx, ny) = c.nu();
    let (ix, iy) = match (c.x.edge, c.y.edge) {
        (Some(i), Some(j)) => (i, j),
        _ => {
            let probe = if td > 0.0 {
                d.theta + 1e-7
            } else if td < 0.0 {
                d.theta - 1e-7
            } else {
                match cell_of(c) {
                    CellId::Square(i, j) => return Ok(seam_rest(c, i, j, rd)),
                    CellId::Fin(..) => unreachable!("squares only"),
                }
            };
            wedge_indices(probe)
        }
    };
    let sigma = if iy == ix.y_next() { 1.0 } else { -1.0 };
    // On the diagonal use the side the angular motion enters.
    let side = if nx == ny { d.theta + 1e-7 * td.signum() } else { d.theta };
    let (vx, vy) = if parity(side) == 1 {
        let q = ny / nx;
        (rd, rd * q + sigma * 1.5 * td * nx * (1.0 + q * q))
    } else {
        let q = nx / ny;
        (rd * q - sigma * 1.5 * td * ny * (1.0 + q * q), rd)
    };
    Ok(ConfigVelocity::new(Velocity::new(ix, vx), Velocity::new(iy, vy)))
}

/// Purely radial motion on a seam: the hub vehicle stays put.
fn seam_rest(c: &Config, i: crate::graph::EdgeId, j: crate::graph::EdgeId, rd: f64) -> ConfigVelocity {
    let x = Velocity::new(i, if c.x.edge.is_some() { rd } else { 0.0 });
    let y = Velocity::new(j, if c.y.edge.is_some() { rd } else { 0.0 });
    ConfigVelocity::new(x, y)
}

/// The disc field as a field on the unfinned squares only.
pub fn pushforward_disc_field(f: DiscField) -> PiecewiseField {
    PiecewiseField::new("pushforward", true, false, move |c| pushforward_velocity(&f, c))
}

/// Extend a squares-only field over the fins.
///
/// On a fin the lower vehicle descends to the hub with speed `m + kappa*nu`,
/// where `m` is the hub vehicle's exit speed at the seam point below, and
/// the upper vehicle copies its seam velocity. The one-sided limits at the
/// seam then agree with the squares on both sides.
pub fn with_fin_descent(squares: PiecewiseField, kappa: f64) -> PiecewiseField {
    let name = format!("{}+fins", squares.name());
    PiecewiseField::new(name, true, true, move |c| {
        let (Some(i), Some(j)) = (c.x.edge, c.y.edge) else {
            return squares.eval(c);
        };
        if i != j {
            return squares.eval(c);
        }
        let (nx, ny) = c.nu();
        if nx < ny {
            let seam = Config {
                x: GraphPoint::CENTER,
                y: c.y,
            };
            let v = squares.eval(&seam)?;
            Ok(ConfigVelocity::new(
                Velocity::new(i, -(v.x.rate.abs() + kappa * nx)),
                Velocity::new(i, v.y.rate),
            ))
        } else {
            let seam = Config {
                x: c.x,
                y: GraphPoint::CENTER,
            };
            let v = squares.eval(&seam)?;
            Ok(ConfigVelocity::new(
                Velocity::new(i, v.x.rate),
                Velocity::new(i, -(v.y.rate.abs() + kappa * ny)),
            ))
        }
    })
}

/// Potential of the navigation field, `ln(r/r_g)^2 + 1 - cos(theta - theta_g)`
/// on the squares and the seam value divided by `1 - nu` of the lower
/// vehicle on the fins.
pub fn navigation_potential(goal: &Config, c: &Config) -> Result<f64, FlowError> {
    let g = to_disc(goal)?;
    let disc = |c: &Config| -> Result<f64, FlowError> {
        let d = to_disc(c)?;
        Ok((d.r / g.r).ln().powi(2) + 1.0 - (d.theta - g.theta).cos())
    };
    if !c.is_fin() {
        return disc(c);
    }
    let (nx, ny) = c.nu();
    if nx < ny {
        Ok(disc(&Config {
            x: GraphPoint::CENTER,
            y: c.y,
        })? / (1.0 - nx))
    } else {
        Ok(disc(&Config {
            x: c.x,
            y: GraphPoint::CENTER,
        })? / (1.0 - ny))
    }
}

/// Gradient descent of the navigation potential in log-polar coordinates.
pub fn navigation_field(goal_x: GraphPoint, goal_y: GraphPoint) -> Result<PiecewiseField, FlowError> {
    let interior = |p: GraphPoint| p.edge.is_some() && p.value > 0.0 && p.value < 1.0;
    if !interior(goal_x) || !interior(goal_y) || goal_x.edge == goal_y.edge {
        return Err(FlowError::BadGoal);
    }
    let g = to_disc(&Config {
        x: goal_x,
        y: goal_y,
    })?;
    let disc = DiscField::new(move |d| {
        (
            -2.0 * d.r * (d.r / g.r).ln(),
            -(d.theta - g.theta).sin(),
        )
    });
    let field = with_fin_descent(pushforward_disc_field(disc), 1.0);
    Ok(PiecewiseField::new("navigation", true, true, move |c| field.eval(c)))
}

/// A closed star-shaped curve `r = f(theta)`.
pub trait CycleProfile: Send + Sync {
    fn value(&self, theta: f64) -> f64;
    fn slope(&self, theta: f64) -> f64;
}

/// `a0 + sum a_k cos(k theta) + b_k sin(k theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicProfile {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl HarmonicProfile {
    pub fn constant(a0: f64) -> Self {
        HarmonicProfile {
            a0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }
}

impl CycleProfile for HarmonicProfile {
    fn value(&self, theta: f64) -> f64 {
        let mut v = self.a0;
        for (k, a) in self.cos.iter().enumerate() {
            v += a * ((k + 1) as f64 * theta).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * ((k + 1) as f64 * theta).sin();
        }
        v
    }

    fn slope(&self, theta: f64) -> f64 {
        let mut v = 0.0;
        for (k, a) in self.cos.iter().enumerate() {
            let n = (k + 1) as f64;
            v -= n * a * (n * theta).sin();
        }
        for (k, b) in self.sin.iter().enumerate() {
            let n = (k + 1) as f64;
            v += n * b * (n * theta).cos();
        }
        v
    }
}

/// Tuned limit-cycle field around `r = f(theta)`.
#[derive(Clone)]
pub struct TunedCycle {
    profile: Arc<dyn CycleProfile>,
    omega: f64,
    gain: f64,
}

impl fmt::Debug for TunedCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TunedCycle")
            .field("omega", &self.omega)
            .field("gain", &self.gain)
            .finish()
    }
}

impl TunedCycle {
    /// Checks `f` on a fine grid.
    pub fn new(profile: Arc<dyn CycleProfile>, omega: f64) -> Result<Self, FlowError> {
        if omega == 0.0 || !omega.is_finite() {
            return Err(FlowError::ZeroOmega);
        }
        for k in 0..4096 {
            let theta = TAU * k as f64 / 4096.0;
            let value = profile.value(theta);
            if !(value > 0.0 && value <= 1.0 + 1e-12) {
                return Err(FlowError::ProfileOutOfRange { theta, value });
            }
        }
        Ok(TunedCycle {
            profile,
            omega,
            gain: 1.0,
        })
    }

    /// Radial contraction rate `k`, with `k = 1` the plain tuned field.
    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn profile(&self) -> &Arc<dyn CycleProfile> {
        &self.profile
    }

    /// `r_dot = r (k - (k r - f' omega) / f)`, `theta_dot = omega`.
    pub fn rates(&self, d: DiscPoint) -> (f64, f64) {
        let f = self.profile.value(d.theta);
        let fp = self.profile.slope(d.theta);
        let k = self.gain;
        (d.r * (k - (k * d.r - fp * self.omega) / f), self.omega)
    }

    pub fn disc_field(&self) -> DiscField {
        let me = self.clone();
        DiscField::new(move |d| me.rates(d))
    }

    /// Pushed to the squares and extended over the fins.
    pub fn config_field(&self) -> PiecewiseField {
        with_fin_descent(pushforward_disc_field(self.disc_field()), 1.0)
    }
}

pub fn tuned_cycle_field(profile: Arc<dyn CycleProfile>, omega: f64) -> Result<DiscField, FlowError> {
    Ok(TunedCycle::new(profile, omega)?.disc_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::from_disc;
    use crate::graph::EdgeId;

    fn cfg(ix: usize, nx: f64, iy: usize, ny: f64) -> Config {
        Config::at(ix, nx, iy, ny).unwrap()
    }

    /// Velocity of the disc preimage by central differences.
    fn transported(d: DiscPoint, rd: f64, td: f64) -> (f64, f64) {
        let h = 1e-6;
        let a = from_disc(DiscPoint::new(d.r + h * rd, d.theta + h * td).unwrap()).unwrap();
        let b = from_disc(DiscPoint::new(d.r - h * rd, d.theta - h * td).unwrap()).unwrap();
        (
            (a.x.value - b.x.value) / (2.0 * h),
            (a.y.value - b.y.value) / (2.0 * h),
        )
    }

    #[test]
    fn angular_pushforward() {
        let f = DiscField::new(|_| (0.0, 1.0));
        let c = cfg(1, 0.6, 2, 0.4);
        let v = pushforward_velocity(&f, &c).unwrap();
        assert!(v.x.rate.abs() < 1e-15);
        let exact = 1.5 * 0.6 * (1.0 + (0.4f64 / 0.6).powi(2));
        assert!((v.y.rate - exact).abs() < 1e-12);
        assert!((v.y.rate - 1.3).abs() < 1e-12);
        let (fx, fy) = transported(to_disc(&c).unwrap(), 0.0, 1.0);
        assert!((fx - v.x.rate).abs() < 1e-6 && (fy - v.y.rate).abs() < 1e-6);
    }

    #[test]
    fn radial_pushforward() {
        let f = DiscField::new(|d| (d.r * (1.0 - d.r), 0.0));
        let c = cfg(1, 0.3, 2, 0.6);
        let d = to_disc(&c).unwrap();
        assert_eq!(parity(d.theta), -1);
        let v = pushforward_velocity(&f, &c).unwrap();
        assert!((v.y.rate - 0.6 * 0.4).abs() < 1e-12);
        assert!((v.x.rate - 0.24 * 0.5).abs() < 1e-12);
        let z = pushforward_velocity(&DiscField::new(|_| (0.0, 0.0)), &c).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn seam_exit_edge() {
        let f = DiscField::new(|_| (0.0, 1.0));
        // y at the hub with x on edge 1 (angle 0): moving counterclockwise
        // enters D12.
        let v = pushforward_velocity(&f, &cfg(1, 0.5, 0, 0.0)).unwrap();
        assert_eq!(v.y.edge, EdgeId(2));
        assert!(v.y.rate > 0.0);
        let back = DiscField::new(|_| (0.0, -1.0));
        let v = pushforward_velocity(&back, &cfg(1, 0.5, 0, 0.0)).unwrap();
        assert_eq!(v.y.edge, EdgeId(3));
        assert!(v.y.rate > 0.0);
    }

    #[test]
    fn fins_uncovered_without_companion() {
        let f = pushforward_disc_field(DiscField::new(|_| (0.0, 1.0)));
        assert!(f.eval(&cfg(1, 0.2, 1, 0.6)).is_err());
        let g = with_fin_descent(f, 1.0);
        let v = g.eval(&cfg(1, 0.2, 1, 0.6)).unwrap();
        assert!(v.x.rate < 0.0);
    }

    #[test]
    fn tuned_identity() {
        let t = TunedCycle::new(Arc::new(HarmonicProfile::constant(1.0)), 1.0).unwrap();
        for r in [0.1, 0.5, 0.9, 1.0] {
            let (rd, td) = t.rates(DiscPoint::new(r, 0.3).unwrap());
            assert!((rd - r * (1.0 - r)).abs() <= 1e-15);
            assert_eq!(td, 1.0);
        }
        let bad = HarmonicProfile {
            a0: 0.95,
            cos: vec![0.1],
            sin: vec![],
        };
        assert!(TunedCycle::new(Arc::new(bad), 1.0).is_err());
        assert!(TunedCycle::new(Arc::new(HarmonicProfile::constant(0.5)), 0.0).is_err());
    }

    #[test]
    fn tuned_curve_invariant() {
        let p = HarmonicProfile {
            a0: 0.5,
            cos: vec![],
            sin: vec![0.1],
        };
        let t = TunedCycle::new(Arc::new(p.clone()), 1.3).unwrap();
        for k in 0..100 {
            let theta = TAU * k as f64 / 100.0;
            let (rd, _) = t.rates(DiscPoint::new(p.value(theta), theta).unwrap());
            assert!((rd - p.slope(theta) * 1.3).abs() < 1e-12);
        }
    }

    #[test]
    fn navigation_goal_is_rest() {
        let gx = GraphPoint::on(1, 0.6).unwrap();
        let gy = GraphPoint::on(2, 0.4).unwrap();
        let f = navigation_field(gx, gy).unwrap();
        let v = f.eval(&Config { x: gx, y: gy }).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(navigation_field(gx, GraphPoint::on(1, 0.3).unwrap()).is_err());
        assert!(navigation_field(GraphPoint::CENTER, gy).is_err());
        let goal = Config { x: gx, y: gy };
        assert!(navigation_potential(&goal, &goal).unwrap().abs() < 1e-15);
    }
}
