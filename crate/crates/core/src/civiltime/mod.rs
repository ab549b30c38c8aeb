//! Civil-time scales and the conventions layered on them.
//!
//! [`TaiInstant`] is a plain nanosecond count with no discontinuities. UTC
//! is TAI relabelled through a [`LeapTable`]; leap seconds show up as a
//! 61-second minute ending in `23:59:60`. A leap smear replaces that step
//! with a rate change over a window, and daylight-saving rules add a whole
//! hour by decree. UT1 is supplied by the caller as a piecewise-linear model.

mod dst;
mod leap;
mod smear;
mod ut1;

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

pub use dst::{apply_dst, resolve_local, DstRule, LocalResolution};
pub use leap::{check_leap_constraint, tai_to_utc, utc_to_tai, LeapEntry, LeapTable};
pub use smear::{
    smear, unsmeared, LeapEvent, LinearSmear, SmearPlacement, SmearShape, SmearWindow,
    DEFAULT_SMEAR_WINDOW_S,
};
pub use ut1::Ut1Model;

pub const NS_PER_SECOND: i64 = 1_000_000_000;
pub const NS_PER_DAY: i64 = 86_400 * NS_PER_SECOND;

/// Nanoseconds since 1958-01-01T00:00:00 TAI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TaiInstant(pub i64);

impl TaiInstant {
    pub fn ns_since_epoch(self) -> i64 {
        self.0
    }

    /// TAI calendar label (TAI has no leap seconds).
    pub fn to_calendar(self) -> CivilDateTime {
        CivilDateTime::from_label_ns(self.0 as i128)
    }

    pub fn from_calendar(c: &CivilDateTime) -> Result<Self> {
        c.validate(false)?;
        Ok(TaiInstant(narrow(c.label_ns())?))
    }
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(format!("{v} ns outside the i64 range")))
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1958, 1, 1).expect("valid epoch")
}

/// Days from the 1958 epoch to `date`.
pub(crate) fn day_number(date: NaiveDate) -> i64 {
    (date - epoch()).num_days()
}

pub(crate) fn date_from_day(day: i64) -> NaiveDate {
    epoch() + chrono::Duration::days(day)
}

/// A calendar reading with nanoseconds. `second` may be 60 only in UTC,
/// and only where the leap table declares a leap second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CivilDateTime {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub minute: u32,
    pub second: u32,
    pub nanosecond: u32,
}

pub type UtcCivil = CivilDateTime;

impl CivilDateTime {
    pub fn new(year: i32, month: u32, day: u32, hour: u32, minute: u32, second: u32) -> Self {
        CivilDateTime {
            year,
            month,
            day,
            hour,
            minute,
            second,
            nanosecond: 0,
        }
    }

    pub fn with_nanos(mut self, nanosecond: u32) -> Self {
        self.nanosecond = nanosecond;
        self
    }

    pub fn date(&self) -> Result<NaiveDate> {
        NaiveDate::from_ymd_opt(self.year, self.month, self.day).ok_or_else(|| {
            Error::validation(format!(
                "invalid date {:04}-{:02}-{:02}",
                self.year, self.month, self.day
            ))
        })
    }

    pub(crate) fn validate(&self, allow_leap: bool) -> Result<()> {
        self.date()?;
        let max_second = if allow_leap { 60 } else { 59 };
        if self.hour > 23
            || self.minute > 59
            || self.second > max_second
            || self.nanosecond >= 1_000_000_000
        {
            return Err(Error::validation(format!("invalid time of day in {self}")));
        }
        if self.second == 60 && (self.hour, self.minute) != (23, 59) {
            return Err(Error::validation(format!(
                "second 60 outside a final minute: {self}"
            )));
        }
        Ok(())
    }

    /// Leapless label count: 86,400 s per day from the epoch. Second 60
    /// lands on the next day's 00:00:00.
    pub(crate) fn label_ns(&self) -> i128 {
        let day = day_number(self.date().expect("validated date")) as i128;
        let secs = (self.hour * 3_600 + self.minute * 60 + self.second) as i128;
        day * NS_PER_DAY as i128 + secs * NS_PER_SECOND as i128 + self.nanosecond as i128
    }

    pub(crate) fn from_label_ns(label: i128) -> Self {
        let day = label.div_euclid(NS_PER_DAY as i128) as i64;
        let rem = label.rem_euclid(NS_PER_DAY as i128) as i64;
        let date = date_from_day(day);
        let secs = rem / NS_PER_SECOND;
        CivilDateTime {
            year: date.year(),
            month: date.month(),
            day: date.day(),
            hour: (secs / 3_600) as u32,
            minute: (secs / 60 % 60) as u32,
            second: (secs % 60) as u32,
            nanosecond: (rem % NS_PER_SECOND) as u32,
        }
    }

    /// Reading for a count of leapless nanoseconds since the epoch (every day
    /// 86,400 s long), as produced by the smear functions.
    pub fn from_leapless_ns(ns: i64) -> Self {
        Self::from_label_ns(ns as i128)
    }

    /// Adds whole seconds on the leapless label scale (local civil arithmetic).
    pub fn plus_seconds(&self, seconds: i64) -> Result<Self> {
        self.validate(false)?;
        Ok(Self::from_label_ns(
            self.label_ns() + seconds as i128 * NS_PER_SECOND as i128,
        ))
    }
}

impl fmt::Display for CivilDateTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}",
            self.year, self.month, self.day, self.hour, self.minute, self.second
        )?;
        if self.nanosecond != 0 {
            let digits = format!("{:09}", self.nanosecond);
            write!(f, ".{}", digits.trim_end_matches('0'))?;
        }
        Ok(())
    }
}

impl Serialize for CivilDateTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for CivilDateTime {
    type Err = Error;

    /// `YYYY-MM-DDTHH:MM:SS[.f]` with up to nine fractional digits; a space
    /// may replace the `T` and a trailing `Z` is accepted. Only the shape is
    /// checked here; calendar validity is checked by the conversions.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::validation(format!(
                "malformed date-time {s:?}; expected YYYY-MM-DDTHH:MM:SS[.fffffffff]"
            ))
        };
        let s_trim = s.trim().trim_end_matches('Z');
        let (date, time) = s_trim.split_once(['T', ' ']).ok_or_else(bad)?;
        let mut d = date.splitn(3, '-');
        let year: i32 = d.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let month: u32 = d.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let day: u32 = d.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let (hms, frac) = match time.split_once('.') {
            Some((h, f)) => (h, Some(f)),
            None => (time, None),
        };
        let parts: Vec<u32> = hms
            .split(':')
            .map(|p| if p.len() == 2 { p.parse().ok() } else { None })
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        let [hour, minute, second] = parts[..] else {
            return Err(bad());
        };
        let nanosecond = match frac {
            None => 0,
            Some(f) if !f.is_empty() && f.len() <= 9 && f.bytes().all(|b| b.is_ascii_digit()) => {
                format!("{f:0<9}").parse().map_err(|_| bad())?
            }
            Some(_) => return Err(bad()),
        };
        Ok(CivilDateTime {
            year,
            month,
            day,
            hour,
            minute,
            second,
            nanosecond,
        })
    }
}
