//! Synchronization conventions and relativistic rate corrections.
//!
//! A round trip A → B → A is measured on A's clock alone. Which instant on
//! that interval "is" the reflection at B is a choice: the Reichenbach
//! parameter ε places it at `t1 + ε(t3 − t1)`, with ε = ½ the Einstein
//! choice. The anisotropy parameter κ expresses the same freedom as
//! direction-dependent one-way speeds `c/(1 ∓ κ)` whose round trip is
//! always c; the two are related by ε = (1 − κ)/2.

use serde::Serialize;

use crate::exact::{FracNs, PPB};
use crate::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Earth's gravitational parameter GM, m³/s² (IERS Conventions 2010 give
/// 3.986004418e14; three significant digits suffice at μs/day precision).
pub const GPS_GM_EARTH: f64 = 3.986e14;
/// Mean Earth radius, m (IUGG mean radius 6371.0 km).
pub const GPS_EARTH_RADIUS: f64 = 6.371e6;
/// GPS nominal semi-major axis, m (IS-GPS-200 constellation, ~26,560 km).
pub const GPS_ORBIT_RADIUS: f64 = 2.6561e7;
/// GPS orbital speed, m/s (circular orbit at the radius above, Ashby 2003).
pub const GPS_ORBITAL_SPEED: f64 = 3_874.0;

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Reichenbach synchrony parameter, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub const EINSTEIN: Epsilon = Epsilon(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Epsilon(value))
        } else {
            Err(Error::domain(format!(
                "ε = {value} outside the open interval (0, 1)"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// ε in parts per billion, rounded and kept inside [1, 10⁹ − 1].
    ///
    /// Network-level conventions are resolved to 10⁻⁹ so that every shift
    /// they induce on integer nanosecond timelines is exact. Decimal grid
    /// values with up to nine places convert without loss.
    pub fn ppb(self) -> i64 {
        ((self.0 * PPB as f64).round() as i64).clamp(1, PPB - 1)
    }

    /// The default audit grid 0.05, 0.10, ..., 0.95.
    pub fn default_grid() -> Vec<Epsilon> {
        (1..20).map(|k| Epsilon(k as f64 / 20.0)).collect()
    }
}

/// Anisotropy parameter in the closed interval [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (-1.0..=1.0).contains(&value) {
            Ok(Kappa(value))
        } else {
            Err(Error::domain(format!("κ = {value} outside [−1, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A one-way light speed in units of c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OneWaySpeed {
    Finite(f64),
    /// The κ = ±1 branch: traversal takes no coordinate time.
    Instantaneous,
}

impl OneWaySpeed {
    /// Coordinate travel time over `distance` (light units, so c = 1).
    pub fn travel_time(self, distance: f64) -> f64 {
        match self {
            OneWaySpeed::Finite(c) => distance / c,
            OneWaySpeed::Instantaneous => 0.0,
        }
    }

    /// 1/c, which stays finite on the instantaneous branch.
    pub fn slowness(self) -> f64 {
        match self {
            OneWaySpeed::Finite(c) => 1.0 / c,
            OneWaySpeed::Instantaneous => 0.0,
        }
    }
}

/// Assigns the remote event time `t1 + ε(t3 − t1)` for a round trip read on
/// the emitter's clock.
pub fn reichenbach_assign(t1: f64, t3: f64, epsilon: Epsilon) -> Result<f64> {
    if !t1.is_finite() || !t3.is_finite() {
        return Err(Error::validation("non-finite round-trip readings"));
    }
    if t3 < t1 {
        return Err(Error::validation(format!(
            "non-causal round trip: t3 = {t3} < t1 = {t1}"
        )));
    }
    Ok((t1 + epsilon.value() * (t3 - t1)).clamp(t1, t3))
}

/// Integer-nanosecond form of [`reichenbach_assign`], exact at ppb resolution.
pub fn reichenbach_assign_ns(t1: i64, t3: i64, epsilon: Epsilon) -> Result<FracNs> {
    if t3 < t1 {
        return Err(Error::validation(format!(
            "non-causal round trip: t3 = {t3} < t1 = {t1}"
        )));
    }
    Ok(FracNs::from_ns(t1) + FracNs::scaled(t3 - t1, epsilon.ppb()))
}

/// One-way speeds `(c₊, c₋) = (1/(1 − κ), 1/(1 + κ))` in units of c.
pub fn kappa_speeds(kappa: Kappa) -> (OneWaySpeed, OneWaySpeed) {
    let k = kappa.value();
    let speed = |den: f64| {
        if den == 0.0 {
            OneWaySpeed::Instantaneous
        } else {
            OneWaySpeed::Finite(1.0 / den)
        }
    };
    (speed(1.0 - k), speed(1.0 + k))
}

/// Outbound share of the round trip implied by κ: ε = (1 − κ)/2.
pub fn kappa_to_epsilon(kappa: Kappa) -> Result<Epsilon> {
    let k = kappa.value();
    if k.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "ε boundary: κ = {k} maps to ε ∈ {{0, 1}}"
        )));
    }
    Epsilon::new((1.0 - k) / 2.0)
}

/// Inverse of [`kappa_to_epsilon`]: κ = 1 − 2ε.
pub fn epsilon_to_kappa(epsilon: Epsilon) -> Kappa {
    Kappa(1.0 - 2.0 * epsilon.value())
}

/// `(1 − κv)/√(1 − v²)`; the standard Lorentz factor at κ = 0.
pub fn modified_gamma(v: f64, kappa: Kappa) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::validation("non-finite velocity"));
    }
    if v.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "superluminal frame: |v| = {} ≥ 1",
            v.abs()
        )));
    }
    Ok((1.0 - kappa.value() * v) / ((1.0 - v) * (1.0 + v)).sqrt())
}

/// Fractional clock-rate offsets relative to a reference clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativisticRates {
    /// Time dilation from motion, −v²/2c².
    pub velocity_term: f64,
    /// Gravitational blueshift from the potential difference, ΔΦ/c².
    pub gravity_term: f64,
    /// Net accumulated offset in μs per day.
    pub net_per_day: f64,
}

impl RelativisticRates {
    pub fn velocity_per_day(&self) -> f64 {
        self.velocity_term * SECONDS_PER_DAY * 1e6
    }

    pub fn gravity_per_day(&self) -> f64 {
        self.gravity_term * SECONDS_PER_DAY * 1e6
    }
}

/// Weak-field, first-order rate of a moving clock at potential difference
/// `phi_delta` (m²/s², positive when the clock sits higher) relative to a
/// stationary reference.
pub fn relativistic_rate(v: f64, phi_delta: f64, c: f64) -> Result<RelativisticRates> {
    if !(v.is_finite() && phi_delta.is_finite() && c.is_finite()) {
        return Err(Error::validation("non-finite rate inputs"));
    }
    if c <= 0.0 {
        return Err(Error::domain(format!(
            "speed of light must be positive, got {c}"
        )));
    }
    if v < 0.0 {
        return Err(Error::domain(format!(
            "speed must be non-negative, got {v}"
        )));
    }
    if v >= c {
        return Err(Error::domain(format!(
            "superluminal clock: v = {v} ≥ c = {c}"
        )));
    }
    let c2 = c * c;
    let velocity_term = -(v * v) / (2.0 * c2);
    let gravity_term = phi_delta / c2;
    Ok(RelativisticRates {
        velocity_term,
        gravity_term,
        net_per_day: (gravity_term + velocity_term) * SECONDS_PER_DAY * 1e6,
    })
}

/// Potential difference between the GPS orbit and the Earth's surface.
pub fn gps_potential_delta() -> f64 {
    GPS_GM_EARTH * (1.0 / GPS_EARTH_RADIUS - 1.0 / GPS_ORBIT_RADIUS)
}

/// Rates of a GPS satellite clock against a ground clock.
pub fn gps_preset() -> RelativisticRates {
    relativistic_rate(GPS_ORBITAL_SPEED, gps_potential_delta(), SPEED_OF_LIGHT)
        .expect("GPS constants are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn einstein_midpoint() {
        assert_eq!(
            reichenbach_assign(0.0, 10.0, Epsilon::EINSTEIN).unwrap(),
            5.0
        );
        assert!((reichenbach_assign(2.0, 12.0, eps(0.2)).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn assignment_stays_inside_round_trip() {
        for e in [1e-12, 1e-6, 0.999_999, 1.0 - 1e-12] {
            let tb = reichenbach_assign(0.0, 10.0, eps(e)).unwrap();
            assert!((0.0..=10.0).contains(&tb), "{e} -> {tb}");
        }
    }

    #[test]
    fn assignment_errors() {
        assert!(matches!(
            reichenbach_assign(5.0, 1.0, Epsilon::EINSTEIN),
            Err(Error::Validation(_))
        ));
        assert!(matches!(Epsilon::new(0.0), Err(Error::Domain(_))));
        assert!(matches!(Epsilon::new(1.0), Err(Error::Domain(_))));
        assert!(Epsilon::new(f64::NAN).is_err());
        assert!(reichenbach_assign_ns(10, 0, Epsilon::EINSTEIN).is_err());
    }

    #[test]
    fn exact_assignment() {
        let tb = reichenbach_assign_ns(2, 12, eps(0.2)).unwrap();
        assert_eq!(tb.as_whole_ns(), Some(4));
        assert_eq!(
            reichenbach_assign_ns(0, 3, Epsilon::EINSTEIN)
                .unwrap()
                .to_string(),
            "1.5"
        );
    }

    #[test]
    fn ppb_resolution() {
        assert_eq!(eps(0.05).ppb(), 50_000_000);
        assert_eq!(eps(0.95).ppb(), 950_000_000);
        assert_eq!(eps(1e-15).ppb(), 1);
        assert_eq!(eps(1.0 - 1e-15).ppb(), PPB - 1);
        let grid = Epsilon::default_grid();
        assert_eq!(grid.len(), 19);
        assert_eq!(grid[9], Epsilon::EINSTEIN);
    }

    #[test]
    fn kappa_speed_values() {
        let k = |v| Kappa::new(v).unwrap();
        assert_eq!(
            kappa_speeds(k(0.0)),
            (OneWaySpeed::Finite(1.0), OneWaySpeed::Finite(1.0))
        );
        assert_eq!(
            kappa_speeds(k(1.0)),
            (OneWaySpeed::Instantaneous, OneWaySpeed::Finite(0.5))
        );
        assert_eq!(
            kappa_speeds(k(-1.0)),
            (OneWaySpeed::Finite(0.5), OneWaySpeed::Instantaneous)
        );
        let (p, m) = kappa_speeds(k(0.5));
        assert_eq!(p, OneWaySpeed::Finite(2.0));
        match m {
            OneWaySpeed::Finite(c) => assert!((c - 2.0 / 3.0).abs() < 1e-15),
            OneWaySpeed::Instantaneous => panic!(),
        }
        assert!(Kappa::new(1.01).is_err());
    }

    #[test]
    fn kappa_epsilon_mapping() {
        let k = |v| Kappa::new(v).unwrap();
        assert_eq!(kappa_to_epsilon(k(0.0)).unwrap(), Epsilon::EINSTEIN);
        assert!((kappa_to_epsilon(k(0.6)).unwrap().value() - 0.2).abs() < 1e-15);
        assert!((kappa_to_epsilon(k(-0.6)).unwrap().value() - 0.8).abs() < 1e-15);
        assert!(matches!(kappa_to_epsilon(k(1.0)), Err(Error::Domain(_))));
        assert!(matches!(kappa_to_epsilon(k(-1.0)), Err(Error::Domain(_))));
        assert_eq!(kappa_to_epsilon(k(0.9)).unwrap().ppb(), 50_000_000);
    }

    #[test]
    fn modified_gamma_values() {
        let k = |v| Kappa::new(v).unwrap();
        assert_eq!(modified_gamma(0.0, k(0.7)).unwrap(), 1.0);
        assert!((modified_gamma(0.6, k(0.0)).unwrap() - 1.25).abs() < 1e-12);
        assert!((modified_gamma(0.6, k(1.0)).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(modified_gamma(1.0, k(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn rates() {
        let r = relativistic_rate(0.0, 0.0, SPEED_OF_LIGHT).unwrap();
        assert_eq!(
            (r.velocity_term, r.gravity_term, r.net_per_day),
            (0.0, 0.0, 0.0)
        );

        let v: f64 = 3_000.0;
        let balanced = relativistic_rate(v, v * v / 2.0, SPEED_OF_LIGHT).unwrap();
        assert!(balanced.net_per_day.abs() < 1e-12);
        assert!(
            relativistic_rate(v, v * v / 2.0 + 1.0, SPEED_OF_LIGHT)
                .unwrap()
                .net_per_day
                > 0.0
        );
        assert!(
            relativistic_rate(v, v * v / 2.0 - 1.0, SPEED_OF_LIGHT)
                .unwrap()
                .net_per_day
                < 0.0
        );

        assert!(matches!(
            relativistic_rate(SPEED_OF_LIGHT, 0.0, SPEED_OF_LIGHT),
            Err(Error::Domain(_))
        ));
        assert!(relativistic_rate(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn gps_figures() {
        let r = gps_preset();
        assert!(
            (r.velocity_per_day() + 7.2).abs() < 0.3,
            "{}",
            r.velocity_per_day()
        );
        assert!(
            (r.gravity_per_day() - 45.7).abs() < 0.5,
            "{}",
            r.gravity_per_day()
        );
        assert!((37.5..=39.5).contains(&r.net_per_day), "{}", r.net_per_day);
        let sum = r.velocity_per_day() + r.gravity_per_day();
        assert!((sum - r.net_per_day).abs() <= 1e-9 * r.net_per_day.abs());
    }
}
