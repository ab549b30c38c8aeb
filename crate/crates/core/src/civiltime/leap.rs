use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use super::{
    day_number, narrow, CivilDateTime, LeapEvent, TaiInstant, UtcCivil, NS_PER_DAY, NS_PER_SECOND,
};
use crate::{Error, Result};

const HISTORICAL_CSV: &str = include_str!("../../data/leap_seconds.csv");

/// TAI−UTC in force from 00:00:00 UTC on `effective` onward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeapEntry {
    pub effective: NaiveDate,
    pub tai_minus_utc_s: i64,
}

impl LeapEntry {
    /// TAI instant at which this entry takes effect.
    fn start_ns(&self) -> i128 {
        day_number(self.effective) as i128 * NS_PER_DAY as i128
            + self.tai_minus_utc_s as i128 * NS_PER_SECOND as i128
    }

    fn offset_ns(&self) -> i128 {
        self.tai_minus_utc_s as i128 * NS_PER_SECOND as i128
    }
}

/// Dates strictly increase and consecutive offsets differ by exactly one second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeapTable {
    entries: Vec<LeapEntry>,
}

impl LeapTable {
    pub fn new(entries: Vec<LeapEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation("leap table has no entries"));
        }
        for w in entries.windows(2) {
            if w[1].effective <= w[0].effective {
                return Err(Error::validation(format!(
                    "leap table dates must strictly increase: {} then {}",
                    w[0].effective, w[1].effective
                )));
            }
            if (w[1].tai_minus_utc_s - w[0].tai_minus_utc_s).abs() != 1 {
                return Err(Error::validation(format!(
                    "leap table offset must change by exactly one second at {} ({} -> {})",
                    w[1].effective, w[0].tai_minus_utc_s, w[1].tai_minus_utc_s
                )));
            }
        }
        Ok(LeapTable { entries })
    }

    /// A table with one constant offset and no leaps.
    pub fn constant(from: NaiveDate, tai_minus_utc_s: i64) -> Self {
        LeapTable {
            entries: vec![LeapEntry {
                effective: from,
                tai_minus_utc_s,
            }],
        }
    }

    /// The bundled 1972–2017 table.
    pub fn historical() -> Self {
        Self::from_csv(HISTORICAL_CSV).expect("bundled leap table is valid")
    }

    /// Parses `date,offset_s` rows under a header line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::Parse {
                    line,
                    column: 1,
                    message: e.to_string(),
                }
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: "expected `YYYY-MM-DD,offset_s`".into(),
                });
            }
            let effective =
                NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| Error::Parse {
                    line,
                    column: 1,
                    message: format!("bad date {:?}: {e}", &record[0]),
                })?;
            let tai_minus_utc_s = record[1].parse().map_err(|_| Error::Parse {
                line,
                column: record[0].len() + 2,
                message: format!("bad offset {:?}", &record[1]),
            })?;
            entries.push(LeapEntry {
                effective,
                tai_minus_utc_s,
            });
        }
        Self::new(entries)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,offset_s\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{}\n",
                e.effective.format("%Y-%m-%d"),
                e.tai_minus_utc_s
            ));
        }
        out
    }

    pub fn entries(&self) -> &[LeapEntry] {
        &self.entries
    }

    /// Earliest TAI instant the table covers.
    pub fn covered_from(&self) -> TaiInstant {
        TaiInstant(self.entries[0].start_ns() as i64)
    }

    pub fn positive_steps(&self) -> usize {
        self.leap_events().iter().filter(|e| e.sign > 0).count()
    }

    pub fn negative_steps(&self) -> usize {
        self.leap_events().iter().filter(|e| e.sign < 0).count()
    }

    /// One event per offset change, in order.
    pub fn leap_events(&self) -> Vec<LeapEvent> {
        self.entries
            .windows(2)
            .map(|w| LeapEvent {
                at: TaiInstant(w[1].start_ns() as i64),
                tai_minus_utc_before_s: w[0].tai_minus_utc_s,
                sign: w[1].tai_minus_utc_s - w[0].tai_minus_utc_s,
            })
            .collect()
    }

    /// TAI−UTC in seconds at a TAI instant.
    pub fn offset_at(&self, t: TaiInstant) -> Result<i64> {
        Ok(self.entries[self.index_at(t)?].tai_minus_utc_s)
    }

    fn index_at(&self, t: TaiInstant) -> Result<usize> {
        let idx = self
            .entries
            .partition_point(|e| e.start_ns() <= t.0 as i128);
        if idx == 0 {
            return Err(Error::UncoveredEpoch(format!(
                "TAI {} precedes the leap table (first entry {})",
                t.to_calendar(),
                self.entries[0].effective
            )));
        }
        Ok(idx - 1)
    }
}

/// Renders a TAI instant as a UTC label; an inserted second reads `23:59:60`.
pub fn tai_to_utc(t: TaiInstant, table: &LeapTable) -> Result<UtcCivil> {
    let i = table.index_at(t)?;
    let entry = table.entries[i];
    if let Some(next) = table.entries.get(i + 1) {
        if next.tai_minus_utc_s == entry.tai_minus_utc_s + 1 {
            let rollover = day_number(next.effective) as i128 * NS_PER_DAY as i128;
            let leap_start = rollover + entry.offset_ns();
            if t.0 as i128 >= leap_start {
                let within = (t.0 as i128 - leap_start) as u32;
                let mut label = CivilDateTime::from_label_ns(rollover - NS_PER_SECOND as i128);
                label.second = 60;
                label.nanosecond = within;
                return Ok(label);
            }
        }
    }
    Ok(CivilDateTime::from_label_ns(
        t.0 as i128 - entry.offset_ns(),
    ))
}

/// Inverse of [`tai_to_utc`]. Rejects `:60` where no leap was inserted and
/// the final second of a day shortened by a negative leap.
pub fn utc_to_tai(utc: &UtcCivil, table: &LeapTable) -> Result<TaiInstant> {
    utc.validate(true)?;
    let date = utc.date()?;
    let idx = table.entries.partition_point(|e| e.effective <= date);
    if idx == 0 {
        return Err(Error::UncoveredEpoch(format!(
            "UTC {utc} precedes the leap table (first entry {})",
            table.entries[0].effective
        )));
    }
    let entry = table.entries[idx - 1];
    let next = table
        .entries
        .get(idx)
        .filter(|n| Some(n.effective) == date.succ_opt());
    let step = next.map_or(0, |n| n.tai_minus_utc_s - entry.tai_minus_utc_s);
    if utc.second == 60 && step != 1 {
        return Err(Error::validation(format!(
            "{utc} is not an inserted leap second"
        )));
    }
    if step == -1 && (utc.hour, utc.minute, utc.second) == (23, 59, 59) {
        return Err(Error::validation(format!(
            "{utc} was removed by a negative leap second"
        )));
    }
    narrow(utc.label_ns() + entry.offset_ns()).map(TaiInstant)
}

/// Whether a UTC−UT1 difference honours the 0.9 s bound. Non-finite input fails.
pub fn check_leap_constraint(utc_minus_ut1_s: f64) -> bool {
    utc_minus_ut1_s.abs() < 0.9
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn one_leap(sign: i64) -> LeapTable {
        LeapTable::new(vec![
            LeapEntry {
                effective: d(2000, 1, 1),
                tai_minus_utc_s: 10,
            },
            LeapEntry {
                effective: d(2000, 1, 11),
                tai_minus_utc_s: 10 + sign,
            },
        ])
        .unwrap()
    }

    #[test]
    fn historical_table() {
        let t = LeapTable::historical();
        assert_eq!(t.entries().len(), 28);
        assert_eq!(t.positive_steps(), 27);
        assert_eq!(t.negative_steps(), 0);
        assert_eq!(LeapTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn table_validation() {
        let bad_step = "date,offset_s\n2000-01-01,10\n2000-06-01,12\n";
        assert!(matches!(
            LeapTable::from_csv(bad_step),
            Err(Error::Validation(_))
        ));
        let unordered = "date,offset_s\n2000-01-01,10\n1999-06-01,11\n";
        assert!(matches!(
            LeapTable::from_csv(unordered),
            Err(Error::Validation(_))
        ));
        let garbage = "date,offset_s\n2000-01-01,10\n2000-13-01,11\n";
        assert!(matches!(
            LeapTable::from_csv(garbage),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(LeapTable::from_csv("date,offset_s\n").is_err());
    }

    #[test]
    fn positive_leap_renders_sixty() {
        let table = one_leap(1);
        // 2000-01-10T23:59:59 UTC is 10 s ahead in TAI; the leap second follows.
        let before = utc_to_tai(&CivilDateTime::new(2000, 1, 10, 23, 59, 59), &table).unwrap();
        let leap = TaiInstant(before.0 + NS_PER_SECOND);
        assert_eq!(
            tai_to_utc(leap, &table).unwrap().to_string(),
            "2000-01-10T23:59:60"
        );
        let after = TaiInstant(leap.0 + NS_PER_SECOND);
        assert_eq!(
            tai_to_utc(after, &table).unwrap().to_string(),
            "2000-01-11T00:00:00"
        );
        assert_eq!(table.offset_at(after).unwrap(), 11);
        let half = TaiInstant(leap.0 + NS_PER_SECOND / 2);
        let label = tai_to_utc(half, &table).unwrap();
        assert_eq!(label.to_string(), "2000-01-10T23:59:60.5");
        assert_eq!(utc_to_tai(&label, &table).unwrap(), half);
    }

    #[test]
    fn negative_leap_skips_a_label() {
        let table = one_leap(-1);
        let last = utc_to_tai(&CivilDateTime::new(2000, 1, 10, 23, 59, 58), &table).unwrap();
        let next = TaiInstant(last.0 + NS_PER_SECOND);
        assert_eq!(
            tai_to_utc(next, &table).unwrap().to_string(),
            "2000-01-11T00:00:00"
        );
        assert!(utc_to_tai(&CivilDateTime::new(2000, 1, 10, 23, 59, 59), &table).is_err());
    }

    #[test]
    fn leap_label_only_where_declared() {
        let table = one_leap(1);
        assert!(utc_to_tai(&CivilDateTime::new(2000, 1, 9, 23, 59, 60), &table).is_err());
        assert!(utc_to_tai(&CivilDateTime::new(2000, 1, 10, 23, 59, 60), &table).is_ok());
    }

    #[test]
    fn constant_table_offset() {
        let table = LeapTable::constant(d(1990, 1, 1), 25);
        let utc = CivilDateTime::new(1995, 3, 4, 5, 6, 7);
        let tai = utc_to_tai(&utc, &table).unwrap();
        assert_eq!(
            tai.0 - TaiInstant::from_calendar(&utc).unwrap().0,
            25 * NS_PER_SECOND
        );
    }

    #[test]
    fn uncovered_epoch() {
        let table = LeapTable::historical();
        assert!(matches!(
            tai_to_utc(TaiInstant(0), &table),
            Err(Error::UncoveredEpoch(_))
        ));
        let early = CivilDateTime::new(1971, 12, 31, 23, 59, 59);
        assert!(matches!(
            utc_to_tai(&early, &table),
            Err(Error::UncoveredEpoch(_))
        ));
        assert!(tai_to_utc(table.covered_from(), &table).is_ok());
        assert!(tai_to_utc(TaiInstant(table.covered_from().0 - 1), &table).is_err());
    }

    #[test]
    fn leap_constraint() {
        assert!(check_leap_constraint(0.0));
        assert!(check_leap_constraint(-0.899));
        assert!(!check_leap_constraint(0.9));
        assert!(!check_leap_constraint(f64::NAN));
    }
}
