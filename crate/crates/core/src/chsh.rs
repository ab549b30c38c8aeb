//! The CHSH expression: its local-hidden-variable bound and the singlet optimum.
//!
//! Whether the two detections of a Bell test are spacelike-separated is
//! itself decided with synchronized timestamps; that dependence is what
//! [`crate::causal::fito_audit`] measures. This module only evaluates the
//! correlation side.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::{Error, Result};

/// Correlators for settings (a, b), (a, b'), (a', b), (a', b').
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub ab: f64,
    pub ab_prime: f64,
    pub a_prime_b: f64,
    pub a_prime_b_prime: f64,
}

impl CorrelationTable {
    pub fn new(ab: f64, ab_prime: f64, a_prime_b: f64, a_prime_b_prime: f64) -> Result<Self> {
        let t = CorrelationTable {
            ab,
            ab_prime,
            a_prime_b,
            a_prime_b_prime,
        };
        for e in [ab, ab_prime, a_prime_b, a_prime_b_prime] {
            if !(-1.0..=1.0).contains(&e) {
                return Err(Error::validation(format!("correlator {e} outside [−1, 1]")));
            }
        }
        Ok(t)
    }

    /// Singlet correlators at the given measurement angles.
    pub fn singlet(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        CorrelationTable {
            ab: singlet_correlation(a, b),
            ab_prime: singlet_correlation(a, b_prime),
            a_prime_b: singlet_correlation(a_prime, b),
            a_prime_b_prime: singlet_correlation(a_prime, b_prime),
        }
    }
}

/// `|E(a,b) + E(a,b') + E(a',b) − E(a',b')|`.
pub fn chsh_value(c: &CorrelationTable) -> Result<f64> {
    let c = CorrelationTable::new(c.ab, c.ab_prime, c.a_prime_b, c.a_prime_b_prime)?;
    Ok((c.ab + c.ab_prime + c.a_prime_b - c.a_prime_b_prime).abs())
}

/// A deterministic local strategy: fixed ±1 outcomes for a, a', b, b'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Strategy {
    pub a: i8,
    pub a_prime: i8,
    pub b: i8,
    pub b_prime: i8,
}

impl Strategy {
    pub fn all() -> impl Iterator<Item = Strategy> {
        (0u8..16).map(|bits| {
            let s = |k: u8| if bits >> k & 1 == 1 { -1 } else { 1 };
            Strategy {
                a: s(0),
                a_prime: s(1),
                b: s(2),
                b_prime: s(3),
            }
        })
    }

    /// S for this strategy in integer arithmetic.
    pub fn chsh(&self) -> i32 {
        let (a, ap, b, bp) = (
            self.a as i32,
            self.a_prime as i32,
            self.b as i32,
            self.b_prime as i32,
        );
        (a * b + a * bp + ap * b - ap * bp).abs()
    }

    pub fn correlations(&self) -> CorrelationTable {
        let p = |x: i8, y: i8| (x * y) as f64;
        CorrelationTable {
            ab: p(self.a, self.b),
            ab_prime: p(self.a, self.b_prime),
            a_prime_b: p(self.a_prime, self.b),
            a_prime_b_prime: p(self.a_prime, self.b_prime),
        }
    }
}

/// Maximum of S over all 16 deterministic strategies. Always 2.
pub fn lhv_max() -> i32 {
    Strategy::all()
        .map(|s| s.chsh())
        .max()
        .expect("16 strategies")
}

/// Singlet-state correlator `−cos(θa − θb)`.
pub fn singlet_correlation(theta_a: f64, theta_b: f64) -> f64 {
    -(theta_a - theta_b).cos()
}

/// The angles a = 0, a' = π/2, b = π/4, b' = −π/4 attaining 2√2.
pub const OPTIMAL_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub steps: usize,
    pub value: f64,
    /// Angles (a, a', b, b') in radians.
    pub angles: [f64; 4],
}

/// Exhaustive maximum of S over the `steps⁴` grid of singlet angles.
///
/// S depends only on angle differences and the grid is closed under
/// rotation by one step, so fixing a = 0 and scanning the remaining
/// `steps³` points reaches every value of the full grid.
pub fn singlet_grid_max(steps: usize) -> GridOptimum {
    assert!(steps > 0);
    let step = 2.0 * PI / steps as f64;
    // E for an index difference d = (i − j) mod steps
    let corr: Vec<f64> = (0..steps).map(|d| -(d as f64 * step).cos()).collect();
    let e = |i: usize, j: usize| corr[(i + steps - j) % steps];
    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    let a = 0usize;
    for ap in 0..steps {
        for b in 0..steps {
            let ab = e(a, b);
            let apb = e(ap, b);
            for bp in 0..steps {
                let s = (ab + e(a, bp) + apb - e(ap, bp)).abs();
                if s > best.0 {
                    best = (s, [a, ap, b, bp]);
                }
            }
        }
    }
    GridOptimum {
        steps,
        value: best.0,
        angles: best.1.map(|i| i as f64 * step),
    }
}

/// Coarse-to-fine refinement of a grid optimum: a compass search over
/// (a', b, b') with a held at 0, starting at half the grid spacing and
/// halving the step whenever no neighbour improves, down to `min_step`.
pub fn singlet_refine(start: &GridOptimum, min_step: f64) -> GridOptimum {
    let s_of = |x: &[f64; 4]| {
        chsh_value(&CorrelationTable::singlet(x[0], x[1], x[2], x[3]))
            .unwrap_or(f64::NEG_INFINITY)
            .abs()
    };
    let mut x = start.angles.map(|t| t - start.angles[0]);
    let mut best = s_of(&x);
    let mut step = PI / start.steps.max(1) as f64;
    while step >= min_step {
        let mut improved = false;
        for k in 1..4 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] += dir * step;
                let v = s_of(&y);
                if v > best {
                    (x, best, improved) = (y, v, true);
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    GridOptimum {
        steps: start.steps,
        value: best,
        angles: x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chsh_examples() {
        let zero = CorrelationTable::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(chsh_value(&zero).unwrap(), 0.0);
        let max = CorrelationTable::new(1.0, 1.0, 1.0, -1.0).unwrap();
        assert_eq!(chsh_value(&max).unwrap(), 4.0);
        assert!(CorrelationTable::new(1.1, 0.0, 0.0, 0.0).is_err());
        let sneaky = CorrelationTable {
            ab: -2.0,
            ab_prime: 0.0,
            a_prime_b: 0.0,
            a_prime_b_prime: 0.0,
        };
        assert!(matches!(chsh_value(&sneaky), Err(Error::Validation(_))));
    }

    #[test]
    fn local_bound() {
        assert_eq!(lhv_max(), 2);
        let all_plus = Strategy {
            a: 1,
            a_prime: 1,
            b: 1,
            b_prime: 1,
        };
        assert_eq!(all_plus.chsh(), 2);
        assert_eq!(Strategy::all().count(), 16);
        assert!(Strategy::all().all(|s| s.chsh() == 2));
        for s in Strategy::all() {
            assert_eq!(chsh_value(&s.correlations()).unwrap(), s.chsh() as f64);
        }
    }

    #[test]
    fn singlet_values() {
        assert_eq!(singlet_correlation(0.3, 0.3), -1.0);
        assert!(singlet_correlation(0.0, FRAC_PI_2).abs() < 1e-15);
        let [a, ap, b, bp] = OPTIMAL_ANGLES;
        let s = chsh_value(&CorrelationTable::singlet(a, ap, b, bp)).unwrap();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12, "{s}");
    }

    #[test]
    fn refinement_reaches_tsirelson() {
        let coarse = singlet_grid_max(7);
        assert!(coarse.value < 2.8);
        let fine = singlet_refine(&coarse, 1e-9);
        assert!(
            (fine.value - 2.0 * 2f64.sqrt()).abs() < 1e-12,
            "{}",
            fine.value
        );
    }

    #[test]
    fn coarse_grid() {
        let g = singlet_grid_max(8);
        assert!((g.value - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }
}
