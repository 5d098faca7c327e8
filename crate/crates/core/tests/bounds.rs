use localsgd_core::bounds::{
    bound_fixed_interval, bound_general, bound_osa_leading, bound_theorem1, BoundInputs,
};
use localsgd_core::schedules::max_growing_rounds;
use localsgd_core::{beta_min, CommSchedule};

fn inputs(kappa: f64, horizon: usize, rounds: usize, beta: f64) -> BoundInputs {
    BoundInputs {
        mu: 1.0,
        smoothness: kappa,
        c: 0.5,
        sigma2: 2.0,
        workers: 8,
        horizon,
        rounds,
        beta,
        xi0: 3.0,
    }
}

#[test]
fn theorem1_dominates_general_for_growing_schedule() {
    for horizon in [100, 1000, 5000] {
        let max = max_growing_rounds(horizon);
        for rounds in [1, 2, 5, max / 2, max] {
            for kappa in [1.0, 2.0, 5.0] {
                for beta in [9.0 * kappa, 20.0 * kappa, 100.0 * kappa] {
                    let b = inputs(kappa, horizon, rounds, beta);
                    let s = CommSchedule::growing(horizon, rounds).unwrap();
                    let t1 = bound_theorem1(&b).unwrap();
                    let g = bound_general(&b, &s).unwrap().value;
                    assert!(t1 >= g, "T={horizon} R={rounds} κ={kappa} β={beta}: {t1} < {g}");
                }
            }
        }
    }
}

#[test]
fn fixed_interval_dominates_general() {
    for horizon in [100, 1000] {
        for h in [1, 2, 10, 33, 100] {
            for beta in [1.5, 9.0, 50.0] {
                let b = inputs(2.0, horizon, 1, beta);
                let s = CommSchedule::fixed(horizon, h).unwrap();
                let f = bound_fixed_interval(&b, h).unwrap();
                let g = bound_general(&b, &s).unwrap().value;
                assert!(f >= g, "T={horizon} H={h} β={beta}");
            }
        }
    }
}

#[test]
fn bounds_nonincreasing_in_workers_and_rounds() {
    let s = CommSchedule::growing(1000, 10).unwrap();
    let mut prev = [f64::INFINITY; 4];
    for workers in [1, 2, 4, 8, 64] {
        let b = BoundInputs { workers, ..inputs(2.0, 1000, 10, 18.0) };
        let now = [
            bound_theorem1(&b).unwrap(),
            bound_general(&b, &s).unwrap().value,
            bound_fixed_interval(&b, 50).unwrap(),
            bound_osa_leading(&b).unwrap(),
        ];
        for k in 0..4 {
            assert!(now[k] <= prev[k]);
        }
        prev = now;
    }
    let mut prev = f64::INFINITY;
    for rounds in 1..=max_growing_rounds(1000) {
        let v = bound_theorem1(&inputs(2.0, 1000, rounds, 18.0)).unwrap();
        assert!(v <= prev);
        prev = v;
    }
}

#[test]
fn theorem_beta_satisfies_condition() {
    for (kappa, c, workers, horizon, rounds) in
        [(1.0, 1.0, 20, 1000, 20), (3.0, 1.0, 20, 1000, 10), (2.0, 4.0, 4, 500, 4), (5.0, 0.5, 64, 8000, 64)]
    {
        let beta = beta_min(kappa, c, workers, horizon, rounds).unwrap();
        let s = CommSchedule::growing(horizon, rounds).unwrap();
        let b = BoundInputs {
            mu: 1.0,
            smoothness: kappa,
            c,
            sigma2: 1.0,
            workers,
            horizon,
            rounds,
            beta,
            xi0: 1.0,
        };
        assert!(bound_general(&b, &s).unwrap().condition_holds, "κ={kappa} c={c}");
    }
}
