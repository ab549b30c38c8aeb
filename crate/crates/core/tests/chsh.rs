use clockconv::chsh::{chsh_value, lhv_max, CorrelationTable, Strategy};
use rand::{Rng, SeedableRng};

#[test]
fn mixtures_of_local_strategies_stay_below_two() {
    assert_eq!(lhv_max(), 2);
    let strategies: Vec<CorrelationTable> = Strategy::all().map(|s| s.correlations()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1_000 {
        let weights: Vec<f64> = (0..strategies.len())
            .map(|_| rng.gen::<f64>().powi(4))
            .collect();
        let total: f64 = weights.iter().sum();
        let mix = |f: fn(&CorrelationTable) -> f64| {
            strategies
                .iter()
                .zip(&weights)
                .map(|(s, w)| f(s) * w / total)
                .sum::<f64>()
                .clamp(-1.0, 1.0)
        };
        let table = CorrelationTable::new(
            mix(|c| c.ab),
            mix(|c| c.ab_prime),
            mix(|c| c.a_prime_b),
            mix(|c| c.a_prime_b_prime),
        )
        .unwrap();
        let s = chsh_value(&table).unwrap();
        worst = worst.max(s);
        assert!(s <= 2.0 + 1e-12, "{s}");
    }
    assert!(worst > 1.0);
}
