use serde::Serialize;

use super::{narrow, TaiInstant, NS_PER_SECOND};
use crate::exact::div_round_even;
use crate::{Error, Result};

pub const DEFAULT_SMEAR_WINDOW_S: i64 = 86_400;

/// An offset change of `sign` seconds (±1) taking effect at TAI instant `at`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeapEvent {
    pub at: TaiInstant,
    pub tai_minus_utc_before_s: i64,
    pub sign: i64,
}

impl LeapEvent {
    pub fn new(at: TaiInstant, tai_minus_utc_before_s: i64, sign: i64) -> Result<Self> {
        if sign.abs() != 1 {
            return Err(Error::domain(format!(
                "leap sign must be +1 or -1, got {sign}"
            )));
        }
        Ok(LeapEvent {
            at,
            tai_minus_utc_before_s,
            sign,
        })
    }
}

/// Where the window sits relative to the leap instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SmearPlacement {
    #[default]
    End,
    Centered,
    Start,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmearWindow {
    pub length_s: i64,
    pub placement: SmearPlacement,
}

impl Default for SmearWindow {
    fn default() -> Self {
        SmearWindow {
            length_s: DEFAULT_SMEAR_WINDOW_S,
            placement: SmearPlacement::End,
        }
    }
}

impl SmearWindow {
    pub fn new(length_s: i64, placement: SmearPlacement) -> Result<Self> {
        if length_s <= 0 {
            return Err(Error::domain(format!(
                "smear window must be positive, got {length_s} s"
            )));
        }
        length_s
            .checked_mul(NS_PER_SECOND)
            .ok_or_else(|| Error::Overflow(format!("smear window of {length_s} s")))?;
        Ok(SmearWindow {
            length_s,
            placement,
        })
    }

    pub fn length_ns(&self) -> i64 {
        self.length_s * NS_PER_SECOND
    }

    /// Half-open bounds `[start, end]` of the window around `at`, in TAI ns.
    pub fn bounds(&self, at: TaiInstant) -> (i64, i64) {
        let w = self.length_ns();
        match self.placement {
            SmearPlacement::End => (at.0 - w, at.0),
            SmearPlacement::Centered => (at.0 - w / 2, at.0 - w / 2 + w),
            SmearPlacement::Start => (at.0, at.0 + w),
        }
    }

    /// Steady-state rate offset in ppb: one second spread over the window.
    pub fn rate_deviation_ppb(&self) -> f64 {
        1e9 / self.length_s as f64
    }
}

/// Cumulative adjustment as a function of time elapsed inside the window.
/// Implementations must be non-decreasing, return 0 at 0 and one full
/// second at `window_ns`, and never step by more than 1 ns per ns.
pub trait SmearShape {
    fn adjustment_ns(&self, elapsed_ns: i64, window_ns: i64) -> i64;
}

/// Constant rate offset across the window.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearSmear;

impl SmearShape for LinearSmear {
    fn adjustment_ns(&self, elapsed_ns: i64, window_ns: i64) -> i64 {
        div_round_even(
            elapsed_ns as i128 * NS_PER_SECOND as i128,
            window_ns as i128,
        ) as i64
    }
}

/// Stepped UTC label (leapless ns since the epoch) without smearing. The
/// inserted second repeats the first second of the following day.
pub fn unsmeared(t: TaiInstant, leap: &LeapEvent) -> i64 {
    let offset = if t < leap.at {
        leap.tai_minus_utc_before_s
    } else {
        leap.tai_minus_utc_before_s + leap.sign
    };
    t.0 - offset * NS_PER_SECOND
}

/// Smeared UTC label in leapless ns since the epoch, using a linear shape.
pub fn smear(t: TaiInstant, leap: &LeapEvent, window: &SmearWindow) -> Result<i64> {
    smear_with(t, leap, window, &LinearSmear)
}

/// Outside the window this equals the unsmeared label; inside it the old
/// offset plus a `shape`-driven share of the step is subtracted.
pub fn smear_with(
    t: TaiInstant,
    leap: &LeapEvent,
    window: &SmearWindow,
    shape: &impl SmearShape,
) -> Result<i64> {
    if window.length_s <= 0 {
        return Err(Error::domain(format!(
            "smear window must be positive, got {} s",
            window.length_s
        )));
    }
    let (start, end) = window.bounds(leap.at);
    if t.0 < start || t.0 > end {
        return Ok(unsmeared(t, leap));
    }
    let adj = shape.adjustment_ns(t.0 - start, window.length_ns());
    narrow(
        t.0 as i128
            - (leap.tai_minus_utc_before_s * NS_PER_SECOND) as i128
            - (leap.sign * adj) as i128,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leap(sign: i64) -> LeapEvent {
        LeapEvent::new(TaiInstant(1_000_000 * NS_PER_SECOND), 10, sign).unwrap()
    }

    #[test]
    fn boundaries_match_unsmeared() {
        for sign in [1, -1] {
            let ev = leap(sign);
            for placement in [SmearPlacement::End, SmearPlacement::Centered] {
                let w = SmearWindow::new(86_400, placement).unwrap();
                let (s, e) = w.bounds(ev.at);
                for t in [s, e, s - 1, e + 1] {
                    let t = TaiInstant(t);
                    assert_eq!(smear(t, &ev, &w).unwrap(), unsmeared(t, &ev));
                }
            }
        }
    }

    #[test]
    fn midpoint_holds_half_a_second() {
        let ev = leap(1);
        let w = SmearWindow::default();
        let mid = TaiInstant(ev.at.0 - w.length_ns() / 2);
        assert_eq!(
            smear(mid, &ev, &w).unwrap(),
            unsmeared(mid, &ev) - 500_000_000
        );
    }

    #[test]
    fn adjacent_outputs_step_by_at_most_two() {
        for sign in [1, -1] {
            let ev = leap(sign);
            let w = SmearWindow::new(10, SmearPlacement::End).unwrap();
            let (s, e) = w.bounds(ev.at);
            let mut prev = smear(TaiInstant(s - 5), &ev, &w).unwrap();
            for t in (s - 4..s + 50_000).chain(e - 50_000..e + 5) {
                let cur = smear(TaiInstant(t), &ev, &w).unwrap();
                if t != e - 50_000 {
                    assert!(
                        (0..=2).contains(&(cur - prev)),
                        "step {} at {t}",
                        cur - prev
                    );
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn rejects_bad_window() {
        assert!(matches!(
            SmearWindow::new(0, SmearPlacement::End),
            Err(Error::Domain(_))
        ));
        let w = SmearWindow {
            length_s: -5,
            placement: SmearPlacement::End,
        };
        assert!(smear(TaiInstant(0), &leap(1), &w).is_err());
        assert!(LeapEvent::new(TaiInstant(0), 10, 2).is_err());
    }
}
