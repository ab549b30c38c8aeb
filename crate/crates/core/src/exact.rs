//! Exact integer helpers shared by the estimators and convention sweeps.

use std::fmt;

use serde::{Serialize, Serializer};

/// Parts-per-billion denominator used for convention parameters.
pub const PPB: i64 = 1_000_000_000;

/// Divides by two, rounding a half-integer result to the nearest even integer.
pub fn halve_even(value: i128) -> i128 {
    let q = value.div_euclid(2);
    if value.rem_euclid(2) == 0 {
        q
    } else if q % 2 == 0 {
        // value = 2q + 1, so value/2 = q + ½ and q is the even neighbour.
        q
    } else {
        q + 1
    }
}

/// Rounds `num / den` to the nearest integer, ties to even. `den` must be positive.
pub fn div_round_even(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q % 2 == 0 {
                q
            } else {
                q + 1
            }
        }
    }
}

/// A time value in units of 10⁻⁹ ns, wide enough to hold ε·RTT exactly for
/// any ε given to nine decimal places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FracNs(pub i128);

impl FracNs {
    pub const ZERO: FracNs = FracNs(0);

    pub fn from_ns(ns: i64) -> Self {
        FracNs(ns as i128 * PPB as i128)
    }

    /// `ns · ppb / 10⁹`, held exactly.
    pub fn scaled(ns: i64, ppb: i64) -> Self {
        FracNs(ns as i128 * ppb as i128)
    }

    pub fn units(self) -> i128 {
        self.0
    }

    /// Integral nanoseconds if the value has no fractional part.
    pub fn as_whole_ns(self) -> Option<i64> {
        if self.0 % PPB as i128 == 0 {
            i64::try_from(self.0 / PPB as i128).ok()
        } else {
            None
        }
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / PPB as f64
    }

    pub fn abs(self) -> Self {
        FracNs(self.0.abs())
    }
}

impl std::ops::Add for FracNs {
    type Output = FracNs;
    fn add(self, rhs: Self) -> Self {
        FracNs(self.0 + rhs.0)
    }
}

impl std::ops::Sub for FracNs {
    type Output = FracNs;
    fn sub(self, rhs: Self) -> Self {
        FracNs(self.0 - rhs.0)
    }
}

impl std::ops::Neg for FracNs {
    type Output = FracNs;
    fn neg(self) -> Self {
        FracNs(-self.0)
    }
}

impl fmt::Display for FracNs {
    /// Renders nanoseconds as an exact decimal with trailing zeros trimmed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = PPB as i128;
        let sign = if self.0 < 0 { "-" } else { "" };
        let mag = self.0.unsigned_abs();
        let whole = mag / den as u128;
        let frac = mag % den as u128;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:09}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl Serialize for FracNs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
