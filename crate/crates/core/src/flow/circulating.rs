//! The circulating flow: both vehicles take turns docking so that the pair
//! cycles through every ordered edge pair, with the docking boundary as the
//! attracting limit cycle.

use super::{ConfigVelocity, FlowError, PiecewiseField};
use crate::cspace::{Config, CspaceError};
use crate::graph::Velocity;

pub fn circulating_velocity(c: &Config) -> Result<ConfigVelocity, FlowError> {
    let (nx, ny) = c.nu();
    let v = |e, r| Velocity::new(e, r);
    // Fins: the lower vehicle falls to the hub, the upper one climbs.
    if let (Some(i), Some(j)) = (c.x.edge, c.y.edge) {
        if i == j {
            return Ok(if nx < ny {
                ConfigVelocity::new(v(i, -ny), v(i, ny * (1.0 - ny)))
            } else {
                ConfigVelocity::new(v(i, nx * (1.0 - nx)), v(i, -nx))
            });
        }
    }
    match (c.x.edge, c.y.edge) {
        (None, None) => Err(CspaceError::BothAtCenter.into()),
        // x at the hub, or x one edge ahead of y.
        (None, Some(iy)) => Ok(ConfigVelocity::new(v(iy.y_next(), ny), v(iy, ny * (1.0 - ny)))),
        (Some(ix), Some(iy)) if ix == iy.y_next() => Ok(if nx < ny {
            ConfigVelocity::new(v(ix, ny), v(iy, ny * (1.0 - ny)))
        } else {
            ConfigVelocity::new(v(ix, nx * (1.0 - nx)), v(iy, -nx))
        }),
        // y at the hub, or y one edge ahead of x.
        (Some(ix), None) => Ok(ConfigVelocity::new(v(ix, nx * (1.0 - nx)), v(ix.y_next(), nx))),
        (Some(ix), Some(iy)) => Ok(if nx <= ny {
            ConfigVelocity::new(v(ix, -ny), v(iy, ny * (1.0 - ny)))
        } else {
            ConfigVelocity::new(v(ix, nx * (1.0 - nx)), v(iy, nx))
        }),
    }
}

pub fn circulating_field() -> PiecewiseField {
    PiecewiseField::new("circulating", true, true, circulating_velocity)
}

/// `1 - |nu_x - nu_y|` on fins, `1 - max(nu_x, nu_y)` elsewhere.
pub fn circulating_lyapunov(c: &Config) -> f64 {
    let (nx, ny) = c.nu();
    if c.is_fin() {
        1.0 - (nx - ny).abs()
    } else {
        1.0 - nx.max(ny)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeId;

    fn cfg(ix: usize, nx: f64, iy: usize, ny: f64) -> Config {
        Config::at(ix, nx, iy, ny).unwrap()
    }

    fn close(v: Velocity, e: usize, r: f64) -> bool {
        v.edge == EdgeId(e) && (v.rate - r).abs() < 1e-12
    }

    #[test]
    fn dance_cases() {
        let u = circulating_velocity(&cfg(1, 0.2, 1, 0.6)).unwrap();
        assert!(close(u.x, 1, -0.6) && close(u.y, 1, 0.24));
        let u = circulating_velocity(&cfg(0, 0.0, 1, 0.5)).unwrap();
        assert!(close(u.x, 2, 0.5) && close(u.y, 1, 0.25));
        let u = circulating_velocity(&cfg(2, 0.5, 1, 0.5)).unwrap();
        assert!(close(u.x, 2, 0.25) && close(u.y, 1, -0.5));
        // y one edge ahead of x.
        let u = circulating_velocity(&cfg(1, 0.3, 2, 0.6)).unwrap();
        assert!(close(u.x, 1, -0.6) && close(u.y, 2, 0.24));
        let u = circulating_velocity(&cfg(1, 0.5, 0, 0.0)).unwrap();
        assert!(close(u.x, 1, 0.25) && close(u.y, 2, 0.5));
    }

    #[test]
    fn lyapunov_values() {
        assert!((circulating_lyapunov(&cfg(1, 0.2, 1, 0.6)) - 0.6).abs() < 1e-15);
        assert!((circulating_lyapunov(&cfg(1, 0.3, 2, 0.8)) - 0.2).abs() < 1e-15);
        assert_eq!(circulating_lyapunov(&cfg(1, 1.0, 2, 0.4)), 0.0);
    }

    #[test]
    fn field_covers_everything() {
        let f = circulating_field();
        assert!(f.covers_all());
        assert!(f.eval(&cfg(3, 0.9, 3, 0.1)).is_ok());
    }
}
