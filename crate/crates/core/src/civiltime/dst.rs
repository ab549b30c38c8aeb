use serde::Serialize;

use super::{CivilDateTime, NS_PER_SECOND};
use crate::{Error, Result};

/// A single daylight-saving period. `start` and `end` are local standard
/// time readings; the rule is in effect on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DstRule {
    pub base_offset_s: i64,
    pub dst_offset_s: i64,
    pub start: CivilDateTime,
    pub end: CivilDateTime,
}

impl DstRule {
    pub fn new(
        base_offset_s: i64,
        dst_offset_s: i64,
        start: CivilDateTime,
        end: CivilDateTime,
    ) -> Result<Self> {
        start.validate(false)?;
        end.validate(false)?;
        if dst_offset_s <= 0 {
            return Err(Error::validation(format!(
                "dst offset must be positive, got {dst_offset_s} s"
            )));
        }
        if base_offset_s.abs() > 86_400 {
            return Err(Error::validation(format!(
                "base offset {base_offset_s} s exceeds one day"
            )));
        }
        let span = end.label_ns() - start.label_ns();
        if span <= dst_offset_s as i128 * NS_PER_SECOND as i128 {
            return Err(Error::validation(format!(
                "dst period {start} .. {end} must be longer than its {dst_offset_s} s offset"
            )));
        }
        Ok(DstRule {
            base_offset_s,
            dst_offset_s,
            start,
            end,
        })
    }

    pub fn in_effect(&self, standard: &CivilDateTime) -> bool {
        self.start <= *standard && *standard < self.end
    }

    /// Local standard time for a UTC reading (no leap seconds involved).
    pub fn standard_from_utc(&self, utc: &CivilDateTime) -> Result<CivilDateTime> {
        utc.plus_seconds(self.base_offset_s)
    }
}

/// The wall-clock reading for a local standard time.
pub fn apply_dst(standard: &CivilDateTime, rule: &DstRule) -> Result<CivilDateTime> {
    standard.validate(false)?;
    if rule.in_effect(standard) {
        standard.plus_seconds(rule.dst_offset_s)
    } else {
        Ok(*standard)
    }
}

/// What a wall-clock reading means in standard time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LocalResolution {
    Unique {
        standard: CivilDateTime,
    },
    /// The fall-back overlap: the reading occurs once with daylight time in
    /// effect and once after it ends.
    Ambiguous {
        daylight: CivilDateTime,
        standard: CivilDateTime,
    },
}

/// Inverts [`apply_dst`]. Readings skipped by the spring-forward jump are
/// a [`Error::DstGap`]; readings repeated at fall-back carry both candidates.
pub fn resolve_local(wall: &CivilDateTime, rule: &DstRule) -> Result<LocalResolution> {
    wall.validate(false)?;
    let shifted_start = rule.start.plus_seconds(rule.dst_offset_s)?;
    let shifted_end = rule.end.plus_seconds(rule.dst_offset_s)?;
    if rule.start <= *wall && *wall < shifted_start {
        return Err(Error::DstGap(wall.to_string()));
    }
    if rule.end <= *wall && *wall < shifted_end {
        return Ok(LocalResolution::Ambiguous {
            daylight: wall.plus_seconds(-rule.dst_offset_s)?,
            standard: *wall,
        });
    }
    let standard = if shifted_start <= *wall && *wall < rule.end {
        wall.plus_seconds(-rule.dst_offset_s)?
    } else {
        *wall
    };
    Ok(LocalResolution::Unique { standard })
}
