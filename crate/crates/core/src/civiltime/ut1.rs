use serde::Serialize;

use super::{check_leap_constraint, CivilDateTime, NS_PER_SECOND};
use crate::{Error, Result};

/// UT1−UTC as a piecewise-linear function of the UTC label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ut1Model {
    knots: Vec<(CivilDateTime, f64)>,
}

impl Ut1Model {
    /// Knots must be strictly increasing in time with finite offsets.
    pub fn new(knots: Vec<(CivilDateTime, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::validation("UT1 model needs at least one knot"));
        }
        for (t, off) in &knots {
            t.validate(false)?;
            if !off.is_finite() {
                return Err(Error::validation(format!(
                    "UT1 offset at {t} is not finite"
                )));
            }
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::validation(
                "UT1 knots must strictly increase in time",
            ));
        }
        Ok(Ut1Model { knots })
    }

    pub fn knots(&self) -> &[(CivilDateTime, f64)] {
        &self.knots
    }

    /// UT1−UTC in seconds; constant beyond the first and last knots.
    pub fn ut1_minus_utc(&self, utc: &CivilDateTime) -> Result<f64> {
        utc.validate(true)?;
        let x = utc.label_ns();
        let idx = self.knots.partition_point(|(t, _)| t.label_ns() <= x);
        Ok(match idx {
            0 => self.knots[0].1,
            i if i == self.knots.len() => self.knots[i - 1].1,
            i => {
                let (t0, y0) = self.knots[i - 1];
                let (t1, y1) = self.knots[i];
                let (x0, x1) = (t0.label_ns(), t1.label_ns());
                let f = (x - x0) as f64 / (x1 - x0) as f64;
                y0 + f * (y1 - y0)
            }
        })
    }

    /// UT1 label in leapless ns since the epoch, rounded to the nearest ns.
    pub fn ut1_label_ns(&self, utc: &CivilDateTime) -> Result<i128> {
        let off = self.ut1_minus_utc(utc)?;
        Ok(utc.label_ns() + (off * NS_PER_SECOND as f64).round() as i128)
    }

    /// Linear interpolation attains its extremes at knots, so checking them suffices.
    pub fn satisfies_leap_constraint(&self) -> bool {
        self.knots
            .iter()
            .all(|(_, off)| check_leap_constraint(-off))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_linearly() {
        let m = Ut1Model::new(vec![
            (CivilDateTime::new(2020, 1, 1, 0, 0, 0), 0.2),
            (CivilDateTime::new(2020, 1, 3, 0, 0, 0), -0.2),
        ])
        .unwrap();
        let mid = CivilDateTime::new(2020, 1, 2, 0, 0, 0);
        assert!(m.ut1_minus_utc(&mid).unwrap().abs() < 1e-15);
        assert_eq!(
            m.ut1_minus_utc(&CivilDateTime::new(2019, 1, 1, 0, 0, 0))
                .unwrap(),
            0.2
        );
        assert_eq!(
            m.ut1_minus_utc(&CivilDateTime::new(2021, 1, 1, 0, 0, 0))
                .unwrap(),
            -0.2
        );
        let q = CivilDateTime::new(2020, 1, 1, 12, 0, 0);
        assert!((m.ut1_minus_utc(&q).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(m.ut1_label_ns(&q).unwrap(), q.label_ns() + 100_000_000);
        assert!(m.satisfies_leap_constraint());
    }

    #[test]
    fn rejects_bad_knots() {
        let a = CivilDateTime::new(2020, 1, 1, 0, 0, 0);
        assert!(Ut1Model::new(vec![]).is_err());
        assert!(Ut1Model::new(vec![(a, f64::NAN)]).is_err());
        assert!(Ut1Model::new(vec![(a, 0.0), (a, 0.1)]).is_err());
        assert!(!Ut1Model::new(vec![(a, 0.95)])
            .unwrap()
            .satisfies_leap_constraint());
    }
}
