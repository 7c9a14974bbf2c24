//! Piecewise-smooth vector fields on the two-AGV configuration space.

mod circulating;
mod disc_fields;
mod integrate;
mod validate;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cspace::{cell_of, CellId, Config, CspaceError};
use crate::graph::{EdgeId, Velocity};

pub use circulating::{circulating_field, circulating_lyapunov, circulating_velocity};
pub use disc_fields::{
    navigation_field, navigation_potential, pushforward_disc_field, pushforward_velocity,
    tuned_cycle_field, with_fin_descent, CycleProfile, DiscField, HarmonicProfile, TunedCycle,
};
pub use integrate::{
    extract_word, integrate, integrate_with, DockVisit, Event, EventKind, IntegrateOptions,
    Sample, Supervisor, Termination, Trajectory,
};
pub use validate::{
    validate_config_field, validate_vertex_fields, Sign, ValidityReport, Violation,
    ViolationKind,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Cspace(#[from] CspaceError),
    #[error("field `{field}` does not cover cell {cell}")]
    Uncovered { field: String, cell: CellId },
    #[error("field `{field}` returned a non-finite velocity at {at}")]
    NonFinite { field: String, at: String },
    #[error("field names edge {named} for a vehicle on edge {actual}")]
    WrongEdge { named: EdgeId, actual: EdgeId },
    #[error("safety violation at t = {t}: separation {separation} below guard")]
    SafetyViolation {
        t: f64,
        separation: f64,
        config: Config,
    },
    #[error("profile value {value} at theta = {theta} outside (0, 1]")]
    ProfileOutOfRange { theta: f64, value: f64 },
    #[error("angular speed must be nonzero")]
    ZeroOmega,
    #[error("goals must be interior points of distinct edges")]
    BadGoal,
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
    #[error("length mismatch: {0} speeds, {1} signs")]
    LengthMismatch(usize, usize),
}

/// Velocities of both vehicles. A vehicle at the hub names the edge it is
/// leaving on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigVelocity {
    pub x: Velocity,
    pub y: Velocity,
}

impl ConfigVelocity {
    pub fn new(x: Velocity, y: Velocity) -> Self {
        ConfigVelocity { x, y }
    }

    /// Zero velocity, keeping edges consistent with `c`.
    pub fn zero_at(c: &Config) -> Self {
        ConfigVelocity {
            x: Velocity::new(c.x.edge.unwrap_or(EdgeId(1)), 0.0),
            y: Velocity::new(c.y.edge.unwrap_or(EdgeId(1)), 0.0),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.rate.hypot(self.y.rate)
    }

    fn is_finite(&self) -> bool {
        self.x.rate.is_finite() && self.y.rate.is_finite()
    }
}

type Evaluator = dyn Fn(&Config) -> Result<ConfigVelocity, FlowError> + Send + Sync;

/// A vector field given cell by cell.
#[derive(Clone)]
pub struct PiecewiseField {
    name: String,
    squares: bool,
    fins: bool,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for PiecewiseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseField")
            .field("name", &self.name)
            .field("squares", &self.squares)
            .field("fins", &self.fins)
            .finish()
    }
}

impl PiecewiseField {
    pub fn new<F>(name: impl Into<String>, squares: bool, fins: bool, eval: F) -> Self
    where
        F: Fn(&Config) -> Result<ConfigVelocity, FlowError> + Send + Sync + 'static,
    {
        PiecewiseField {
            name: name.into(),
            squares,
            fins,
            eval: Arc::new(eval),
        }
    }

    /// The zero field on all of the configuration space.
    pub fn zero() -> Self {
        PiecewiseField::new("zero", true, true, |c| Ok(ConfigVelocity::zero_at(c)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn covers(&self, cell: CellId) -> bool {
        match cell {
            CellId::Square(..) => self.squares,
            CellId::Fin(..) => self.fins,
        }
    }

    pub fn covers_all(&self) -> bool {
        self.squares && self.fins
    }

    pub fn eval(&self, c: &Config) -> Result<ConfigVelocity, FlowError> {
        let cell = cell_of(c);
        if !self.covers(cell) {
            return Err(FlowError::Uncovered {
                field: self.name.clone(),
                cell,
            });
        }
        let v = (self.eval)(c)?;
        if !v.is_finite() {
            return Err(FlowError::NonFinite {
                field: self.name.clone(),
                at: c.to_string(),
            });
        }
        Ok(v)
    }
}
