use std::sync::Arc;

use localsgd_core::experiment::{
    speedup_curve_with_baseline, Metric, RunConfig, ScheduleFamily, SpeedupBaseline,
};
use localsgd_core::objectives::PiecewiseQuadratic1D;
use localsgd_core::{CommSchedule, Point, StepSchedule};

fn piecewise_base(replications: u64) -> RunConfig {
    RunConfig {
        objective: Arc::new(PiecewiseQuadratic1D::new(8.0).unwrap()),
        workers: 1,
        horizon: 1000,
        schedule: CommSchedule::one_shot(1000).unwrap(),
        steps: StepSchedule::CappedInverseT { mu: 1.0, smoothness: 2.0 },
        x0: Point::filled(1, 1.0),
        replications,
        seed: 2,
        trace_stride: Some(1000),
    }
}

#[test]
fn synchronized_speedup_doubles_with_workers() {
    let base = piecewise_base(2000);
    let baseline = SpeedupBaseline::compute(&base, Metric::FGap).unwrap();
    let ns = [1, 2, 4, 8, 16, 32];
    let curve =
        speedup_curve_with_baseline(&base, &ns, ScheduleFamily::Synchronized, &baseline).unwrap();
    assert_eq!(curve[0].speedup, Some(1.0));
    for w in curve.windows(2).skip(1).take(4) {
        let ratio = w[1].speedup.unwrap() / w[0].speedup.unwrap();
        assert!(
            (1.6..=2.4).contains(&ratio),
            "N={}→{}: ratio {ratio}",
            w[0].workers,
            w[1].workers
        );
    }
}
