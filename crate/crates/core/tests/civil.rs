use chrono::NaiveDate;
use clockconv::civiltime::{
    smear, tai_to_utc, unsmeared, utc_to_tai, CivilDateTime, LeapEntry, LeapEvent, LeapTable,
    SmearPlacement, SmearWindow, TaiInstant,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const S: i64 = 1_000_000_000;

fn synthetic() -> LeapTable {
    let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
    LeapTable::new(vec![
        LeapEntry {
            effective: d(2000, 1, 1),
            tai_minus_utc_s: 5,
        },
        LeapEntry {
            effective: d(2000, 3, 1),
            tai_minus_utc_s: 6,
        },
        LeapEntry {
            effective: d(2000, 3, 5),
            tai_minus_utc_s: 5,
        },
        LeapEntry {
            effective: d(2000, 3, 6),
            tai_minus_utc_s: 6,
        },
    ])
    .unwrap()
}

#[test]
fn tai_utc_round_trip_over_history() {
    let table = LeapTable::historical();
    let lo = table.covered_from().0;
    let hi = utc_to_tai(&CivilDateTime::new(2040, 1, 1, 0, 0, 0), &table)
        .unwrap()
        .0;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10_000 {
        let t = TaiInstant(rng.gen_range(lo..hi));
        let utc = tai_to_utc(t, &table).unwrap();
        assert_eq!(utc_to_tai(&utc, &table).unwrap(), t, "{utc}");
    }
    // Every inserted second renders as :60 and round-trips.
    for ev in table.leap_events() {
        let t = TaiInstant(ev.at.0 - S / 2);
        let utc = tai_to_utc(t, &table).unwrap();
        assert_eq!((utc.hour, utc.minute, utc.second), (23, 59, 60));
        assert_eq!(utc_to_tai(&utc, &table).unwrap(), t);
    }
}

#[test]
fn zero_leap_table_is_a_constant_shift() {
    let table = LeapTable::constant(NaiveDate::from_ymd_opt(1990, 1, 1).unwrap(), 19);
    for secs in [0i64, 1, 86_399, 86_400, 10_000_000] {
        let utc = CivilDateTime::new(1990, 1, 1, 0, 0, 0)
            .plus_seconds(secs)
            .unwrap();
        let tai = utc_to_tai(&utc, &table).unwrap();
        assert_eq!(tai.0 - TaiInstant::from_calendar(&utc).unwrap().0, 19 * S);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn utc_labels_preserve_tai_order(a in 0i64..20 * 86_400 * S, b in 0i64..20 * 86_400 * S) {
        let table = synthetic();
        let base = table.covered_from().0 + 55 * 86_400 * S;
        let (ta, tb) = (TaiInstant(base + a), TaiInstant(base + b));
        let (ua, ub) = (tai_to_utc(ta, &table).unwrap(), tai_to_utc(tb, &table).unwrap());
        prop_assert_eq!(ua.cmp(&ub), ta.cmp(&tb));
        prop_assert_eq!(utc_to_tai(&ua, &table).unwrap(), ta);
    }

    #[test]
    fn smear_properties(
        window_s in 1i64..200_000,
        offset_s in -50i64..50,
        positive in any::<bool>(),
        placement in prop_oneof![Just(SmearPlacement::End), Just(SmearPlacement::Centered)],
        probe in 0.0..1.0f64,
    ) {
        let sign = if positive { 1 } else { -1 };
        let ev = LeapEvent::new(TaiInstant(1_000_000 * S), offset_s, sign).unwrap();
        let w = SmearWindow::new(window_s, placement).unwrap();
        let (start, end) = w.bounds(ev.at);
        let f = |t: i64| smear(TaiInstant(t), &ev, &w).unwrap();
        prop_assert_eq!(f(start), unsmeared(TaiInstant(start), &ev));
        prop_assert_eq!(f(end), unsmeared(TaiInstant(end), &ev));
        prop_assert_eq!((end - start) - (f(end) - f(start)), sign * S);
        let t = start - 10 + ((end - start + 20) as f64 * probe) as i64;
        for k in t..t + 50 {
            prop_assert!((0..=2).contains(&(f(k + 1) - f(k))));
        }
        let outside = TaiInstant(end + 1 + (probe * 1e12) as i64);
        prop_assert_eq!(f(outside.0), unsmeared(outside, &ev));
    }
}

#[test]
fn historical_smear_midpoint() {
    let table = LeapTable::historical();
    let ev = *table.leap_events().last().unwrap();
    let w = SmearWindow::default();
    let mid = TaiInstant(ev.at.0 - 43_200 * S);
    assert_eq!(
        smear(mid, &ev, &w).unwrap(),
        unsmeared(mid, &ev) - 500_000_000
    );
    assert!((w.rate_deviation_ppb() - 11_574.074).abs() < 1e-3);
}
