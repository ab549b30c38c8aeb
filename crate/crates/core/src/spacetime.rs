//! Flat 1+1-dimensional kinematics in natural units (c = 1).
//!
//! Time is in seconds (or any unit) and position in the matching light unit,
//! so the light cone is |Δx| = |Δt|. A [`Boost`] maps coordinate differences
//! into a frame moving at velocity `v`; for spacelike pairs the sign of the
//! boosted time difference depends on `v`, which is what [`order_in_frame`]
//! exposes.

use serde::Serialize;

use crate::{Error, Result};

/// Relative tolerance for calling an interval lightlike.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-9;

/// Boosted time differences below this magnitude are reported as simultaneous.
pub const SIMULTANEITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimeEvent {
    t: f64,
    x: f64,
}

impl SpacetimeEvent {
    pub fn new(t: f64, x: f64) -> Result<Self> {
        check_finite(t, x)?;
        Ok(SpacetimeEvent { t, x })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Coordinate difference `other − self`.
    pub fn delta_to(&self, other: &SpacetimeEvent) -> Delta {
        Delta {
            dt: other.t - self.t,
            dx: other.x - self.x,
        }
    }
}

/// A coordinate difference (Δt, Δx).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delta {
    pub dt: f64,
    pub dx: f64,
}

impl Delta {
    pub fn new(dt: f64, dx: f64) -> Self {
        Delta { dt, dx }
    }

    /// Δt² − Δx², evaluated in factored form to limit cancellation.
    pub fn interval(&self) -> f64 {
        (self.dt - self.dx) * (self.dt + self.dx)
    }
}

/// A frame velocity as a fraction of c, strictly inside (−1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Boost {
    v: f64,
}

impl Boost {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::validation(format!("non-finite velocity {v}")));
        }
        if v.abs() >= 1.0 {
            return Err(Error::domain(format!(
                "superluminal frame: |v| = {} ≥ 1",
                v.abs()
            )));
        }
        Ok(Boost { v })
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        1.0 / ((1.0 - self.v) * (1.0 + self.v)).sqrt()
    }

    pub fn apply(&self, d: Delta) -> Delta {
        let g = self.gamma();
        Delta {
            dt: g * (d.dt - self.v * d.dx),
            dx: g * (d.dx - self.v * d.dt),
        }
    }

    /// Relativistic velocity addition: applying `self` then `other` equals
    /// one boost by the returned velocity.
    pub fn compose(&self, other: &Boost) -> Boost {
        Boost {
            v: (self.v + other.v) / (1.0 + self.v * other.v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IntervalClass {
    Timelike,
    Spacelike,
    Lightlike,
}

/// Order of the first event relative to the second in some frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FrameOrder {
    Before,
    After,
    Simultaneous,
}

impl FrameOrder {
    /// Order of `e1` relative to `e2` given `Δt = t2 − t1`.
    pub fn from_dt(dt: f64) -> Self {
        if dt.abs() < SIMULTANEITY_TOLERANCE {
            FrameOrder::Simultaneous
        } else if dt > 0.0 {
            FrameOrder::Before
        } else {
            FrameOrder::After
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            FrameOrder::Before => FrameOrder::After,
            FrameOrder::After => FrameOrder::Before,
            FrameOrder::Simultaneous => FrameOrder::Simultaneous,
        }
    }
}

fn check_finite(dt: f64, dx: f64) -> Result<()> {
    if dt.is_finite() && dx.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "non-finite coordinates ({dt}, {dx})"
        )))
    }
}

/// Lorentz-transforms a coordinate difference into the frame moving at `v`.
pub fn boost(delta: Delta, v: f64) -> Result<Delta> {
    check_finite(delta.dt, delta.dx)?;
    Ok(Boost::new(v)?.apply(delta))
}

pub fn classify_interval(delta: Delta) -> Result<IntervalClass> {
    check_finite(delta.dt, delta.dx)?;
    let dt2 = delta.dt * delta.dt;
    let dx2 = delta.dx * delta.dx;
    let s = delta.interval();
    let band = LIGHTLIKE_TOLERANCE * dt2.max(dx2).max(1.0);
    Ok(if s.abs() <= band {
        IntervalClass::Lightlike
    } else if s > 0.0 {
        IntervalClass::Timelike
    } else {
        IntervalClass::Spacelike
    })
}

/// Order of `e1` relative to `e2` as seen from the frame moving at `v`.
pub fn order_in_frame(e1: &SpacetimeEvent, e2: &SpacetimeEvent, v: f64) -> Result<FrameOrder> {
    let boosted = boost(e1.delta_to(e2), v)?;
    Ok(FrameOrder::from_dt(boosted.dt))
}

/// The frame velocity at which a spacelike pair is simultaneous (Δt' = 0),
/// i.e. `v = Δt/Δx`. Timelike and lightlike pairs have none.
pub fn simultaneity_velocity(delta: Delta) -> Option<f64> {
    if delta.dx == 0.0 {
        return None;
    }
    let v = delta.dt / delta.dx;
    (v.abs() < 1.0).then_some(v)
}
