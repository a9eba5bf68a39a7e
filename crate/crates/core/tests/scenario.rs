use std::sync::Arc;

use evstation_core::scenario::{
    placeholder_distributions, sample_day_sessions, CountModel, DomainUnit, ScenarioSpec,
    TabulatedPdf, MINUTES_PER_DAY,
};
use evstation_core::seed::rng_for;
use proptest::prelude::*;
use rand::Rng;

fn sample_mean(pdf: &TabulatedPdf, n: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, &[]);
    (0..n)
        .map(|_| pdf.inverse_cdf(rng.random::<f64>()))
        .sum::<f64>()
        / n as f64
}

#[test]
fn uniform_fixture_sample_mean() {
    let pdf = TabulatedPdf::new(&[(10.0, 1.0), (30.0, 1.0)], DomainUnit::Minutes).unwrap();
    assert_eq!(pdf.mean(), 20.0);
    let m = sample_mean(&pdf, 100_000, 1);
    assert!((m / 20.0 - 1.0).abs() < 0.01, "{m}");
}

#[test]
fn triangular_fixture_sample_mean() {
    // mode at 10 on [0, 40]: mean (0 + 10 + 40) / 3
    let pdf = TabulatedPdf::new(&[(0.0, 0.0), (10.0, 1.0), (40.0, 0.0)], DomainUnit::Kwh).unwrap();
    assert!((pdf.mean() - 50.0 / 3.0).abs() < 1e-12);
    let m = sample_mean(&pdf, 100_000, 2);
    assert!((m / pdf.mean() - 1.0).abs() < 0.01, "{m}");
}

#[test]
fn placeholder_tables_sample_means() {
    let d = placeholder_distributions();
    assert!(d.placeholder);
    for (i, pdf) in [&d.arrival, &d.duration, &d.energy].into_iter().enumerate() {
        let m = sample_mean(pdf, 100_000, 10 + i as u64);
        assert!(
            (m / pdf.mean() - 1.0).abs() < 0.01,
            "{i}: {m} vs {}",
            pdf.mean()
        );
    }
}

#[test]
fn poisson_count_matches_rate() {
    let d = placeholder_distributions();
    let days = 2000;
    let total: usize = (0..days)
        .map(|day| {
            sample_day_sessions(day, 12.0, CountModel::Poisson, &d, 175.0, 9)
                .unwrap()
                .len()
        })
        .sum();
    let mean = total as f64 / f64::from(days);
    // sd of the mean = sqrt(12 / 2000) ~ 0.077
    assert!((mean - 12.0).abs() < 0.4, "{mean}");
    let fixed = sample_day_sessions(0, 12.4, CountModel::Fixed, &d, 175.0, 9).unwrap();
    assert_eq!(fixed.len(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sessions_respect_charger_rating(seed in any::<u64>(), rate in 0.0f64..40.0, day in 0u32..14) {
        let d = placeholder_distributions();
        for s in sample_day_sessions(day, rate, CountModel::Poisson, &d, 175.0, seed).unwrap() {
            prop_assert!(s.power() <= 175.0);
            prop_assert!(s.duration >= 1);
            prop_assert!(s.e_requested > 0.0);
            prop_assert!(s.t_arrival / MINUTES_PER_DAY == day);
        }
    }

    #[test]
    fn realization_is_pure(seed in any::<u64>()) {
        let spec = ScenarioSpec {
            season: "june".into(),
            evs_per_day: 15.0,
            count_model: CountModel::Poisson,
            pv: vec![0.0; 3 * 1440].into(),
            dists: Arc::new(placeholder_distributions()),
            horizon_days: 3,
            seed,
        };
        let a = spec.realize(175.0).unwrap();
        let b = spec.clone().realize(175.0).unwrap();
        prop_assert_eq!(a.plan, b.plan);
    }

    #[test]
    fn inverse_cdf_is_monotone(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let d = placeholder_distributions();
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        for pdf in [&d.arrival, &d.duration, &d.energy] {
            prop_assert!(pdf.inverse_cdf(lo) <= pdf.inverse_cdf(hi) + 1e-12);
            let (a, b) = pdf.support();
            prop_assert!((a..=b).contains(&pdf.inverse_cdf(u)));
        }
    }
}
