use localsgd_core::schedules::max_growing_rounds;
use localsgd_core::{CommSchedule, StepSchedule};
use proptest::prelude::*;

fn assert_valid(s: &CommSchedule, horizon: usize) {
    let taus = s.taus();
    assert_eq!(taus[0], 0);
    assert_eq!(*taus.last().unwrap(), horizon);
    assert!(taus.windows(2).all(|w| w[0] < w[1]));
    assert!(s.rounds() >= 1);
}

proptest! {
    #[test]
    fn growing_is_valid_and_follows_triangular_prefix(horizon in 1usize..20_000, pick in 0.0..1.0f64) {
        let max = max_growing_rounds(horizon);
        let rounds = 1 + ((max - 1) as f64 * pick) as usize;
        let s = CommSchedule::growing(horizon, rounds).unwrap();
        assert_valid(&s, horizon);
        prop_assert!(s.rounds() <= rounds);
        let a = (2 * horizon).div_ceil(rounds * rounds);
        for (j, &tau) in s.taus().iter().enumerate() {
            let uncapped = a * j * (j + 1) / 2;
            if uncapped < horizon {
                prop_assert_eq!(tau, uncapped);
            } else {
                prop_assert_eq!(tau, horizon);
            }
        }
    }

    #[test]
    fn fixed_is_valid(horizon in 1usize..5_000, pick in 0.0..1.0f64) {
        let h = 1 + ((horizon - 1) as f64 * pick) as usize;
        let s = CommSchedule::fixed(horizon, h).unwrap();
        assert_valid(&s, horizon);
        prop_assert!(s.intervals().all(|x| x <= h));
        prop_assert_eq!(s.rounds(), horizon.div_ceil(h));
    }

    #[test]
    fn tau_of_is_latest_communication(horizon in 1usize..500, h in 1usize..50) {
        let h = h.min(horizon);
        let s = CommSchedule::fixed(horizon, h).unwrap();
        for t in 0..=horizon {
            let brute = *s.taus().iter().filter(|&&tau| tau <= t).max().unwrap();
            prop_assert_eq!(s.tau_of(t), brute);
        }
    }
}

#[test]
fn degenerate_schedules() {
    for horizon in [1, 2, 7, 100, 1000] {
        let full = CommSchedule::fixed(horizon, 1).unwrap();
        assert_eq!(full.taus(), (0..=horizon).collect::<Vec<_>>().as_slice());
        assert_eq!(
            CommSchedule::growing(horizon, 1).unwrap(),
            CommSchedule::one_shot(horizon).unwrap()
        );
    }
}

#[test]
fn growing_consensus_sum_below_8t_over_r() {
    // direct summation, independent of consensus_sum
    let direct = |s: &CommSchedule, beta: f64| -> f64 {
        (0..s.horizon())
            .map(|t| (t - s.tau_of(t)) as f64 / (t as f64 + beta))
            .sum()
    };
    for horizon in [50, 200, 1000, 5000] {
        let max = max_growing_rounds(horizon);
        for rounds in [1, 2, 3, max / 2, max - 1, max] {
            let rounds = rounds.max(1);
            let s = CommSchedule::growing(horizon, rounds).unwrap();
            for beta in [9.0, 18.0, 50.0, 200.0] {
                let sum = direct(&s, beta);
                assert!((sum - s.consensus_sum(beta)).abs() <= 1e-9 * sum.max(1.0));
                let cap = 8.0 * horizon as f64 / rounds as f64;
                assert!(sum <= cap, "T={horizon} R={rounds} beta={beta}: {sum} > {cap}");
            }
        }
    }
}

#[test]
fn theta_never_exceeds_inverse_smoothness() {
    for (mu, l) in [(1.0, 1.0), (1.0, 2.0), (0.3, 7.0), (2.0, 2.5)] {
        let s = StepSchedule::Theta { mu, smoothness: l };
        for t in 0..=1_000_000 {
            assert!(s.step_size(t) <= 1.0 / l, "mu={mu} L={l} t={t}");
        }
    }
}
