use demosuff::acquisition::{
    run_acquisition, AcquisitionConfig, AcquisitionState, Checkpoint, LoopParams, Round, Session, SessionStatus, Termination,
    WorldConfig,
};
use demosuff::bandit::{early_stop_beta, partition_coverage, WorkArea};
use demosuff::geometry::{Region, Vec3};
use demosuff::synthetic::{DiscWorld, PointDemo, PointTeacher, RefusingTeacher};

fn params(beta: f64, budget: usize) -> LoopParams {
    LoopParams { epsilon: 0.1, delta: 0.1, beta, max_demonstrations: budget }
}

fn point(x: f64, y: f64) -> PointDemo {
    PointDemo { anchor: Vec3::new(x, y, 0.0) }
}

fn disc_config(seed: u64) -> AcquisitionConfig {
    AcquisitionConfig {
        epsilon: 0.1,
        delta: 0.1,
        beta: 0.85,
        k: 4,
        work_area: Region::planar(0.71, 1.08, -0.24, 0.78, 0.0).unwrap(),
        world: WorldConfig::Disc { radius: 0.2, weak_zones: vec![] },
        teacher: Default::default(),
        max_demonstrations: 32,
        seed,
        initial_anchors: vec![],
    }
}

#[test]
fn segment_world_needs_at_most_the_packing_number() {
    // Every new anchor is an uncovered instance, so all anchors are pairwise more
    // than R apart: at most ceil(L / R) + |D0| of them fit on a segment of length L.
    for (length, radius) in [(1.0, 0.1), (2.0, 0.15), (0.5, 0.02)] {
        let wa = WorkArea::new(Region::planar(0.0, length, 0.0, 0.0, 0.0).unwrap(), 4).unwrap();
        let world = DiscWorld::new(radius).unwrap();
        let bound = (length / (2.0 * radius * 0.5)).ceil() as usize + 1;
        for seed in 0..10 {
            let mut state = AcquisitionState::new(vec![point(length / 2.0, 0.0)], seed).unwrap();
            run_acquisition(&mut state, &wa, &world, &mut PointTeacher, &params(0.85, 1000), |_| Ok(())).unwrap();
            assert_eq!(state.terminated, Some(Termination::Sufficient));
            assert!(state.demos.len() <= bound, "L={length} R={radius}: {} > {bound}", state.demos.len());
        }
    }
}

#[test]
fn covered_from_the_start_stops_at_once() {
    let wa = WorkArea::new(Region::planar(0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 4).unwrap();
    let mut state = AcquisitionState::new(vec![point(0.5, 0.5)], 1).unwrap();
    let world = DiscWorld::new(1.0).unwrap();
    run_acquisition(&mut state, &wa, &world, &mut PointTeacher, &params(0.5, 10), |_| Ok(())).unwrap();
    assert_eq!(state.terminated, Some(Termination::Sufficient));
    assert_eq!((state.iteration, state.demos.len(), state.history.len()), (1, 1, 1));
    assert_eq!(state.achieved_beta, Some(0.5));
}

#[test]
fn refusal_ends_with_the_early_stop_level() {
    let wa = WorkArea::new(Region::planar(0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 4).unwrap();
    let mut state = AcquisitionState::new(vec![point(0.1, 0.1)], 2).unwrap();
    let world = DiscWorld::new(0.3).unwrap();
    run_acquisition(&mut state, &wa, &world, &mut RefusingTeacher::new(), &params(0.85, 10), |_| Ok(())).unwrap();
    assert_eq!(state.terminated, Some(Termination::TeacherRefused));
    assert_eq!((state.iteration, state.demos.len()), (1, 1));
    let mu = state.last_outcome().unwrap().best_mu_hat;
    assert_eq!(state.achieved_beta, Some((1.0 - 0.1 - mu).max(0.0)));
    assert!(state.pending.is_none());
}

#[test]
fn bookkeeping_holds_after_every_round() {
    let wa = WorkArea::new(Region::planar(0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 4).unwrap();
    let world = DiscWorld::new(0.2).unwrap();
    for (seed, budget) in [(3, 100), (4, 3), (5, 1)] {
        let p = params(0.9, budget);
        let mut state = AcquisitionState::new(vec![point(0.5, 0.5)], seed).unwrap();
        let mut accepted = 0;
        run_acquisition(&mut state, &wa, &world, &mut PointTeacher, &p, |s| {
            accepted = s.demos.len() - s.initial_count;
            assert_eq!(s.history.len(), s.iteration);
            Ok(())
        })
        .unwrap();
        assert_eq!(state.demos.len(), state.initial_count + accepted);
        let last = state.last_outcome().unwrap().best_mu_hat;
        match state.terminated.unwrap() {
            Termination::Sufficient => {
                assert!(last <= p.threshold());
                assert_eq!(state.achieved_beta, Some(p.beta));
            }
            Termination::BudgetExhausted => {
                assert_eq!(state.demos.len(), budget.max(1));
                assert!(last > p.threshold());
                assert_eq!(state.achieved_beta, Some(early_stop_beta(last, p.epsilon)));
            }
            Termination::TeacherRefused => unreachable!(),
        }
    }
}

#[test]
fn frozen_grid_coverage_never_drops() {
    let wa = WorkArea::new(Region::planar(0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 4).unwrap();
    let world = DiscWorld::new(0.15).unwrap();
    let mut state = AcquisitionState::new(vec![point(0.05, 0.05)], 6).unwrap();
    let mut trace: Vec<Vec<f64>> = Vec::new();
    run_acquisition(&mut state, &wa, &world, &mut PointTeacher, &params(0.85, 100), |s| {
        trace.push(partition_coverage(&wa, &s.demos, &world, 0.02)?);
        Ok(())
    })
    .unwrap();
    assert!(trace.len() > 2);
    for w in trace.windows(2) {
        assert!(w[0].iter().zip(&w[1]).all(|(a, b)| b >= a));
    }
}

#[test]
fn identical_configs_serialize_identically() {
    for cfg in [disc_config(9), AcquisitionConfig::planar_default()] {
        let run = || {
            let mut s = Session::new(cfg.clone()).unwrap();
            s.run(None).unwrap();
            serde_json::to_string(s.state()).unwrap()
        };
        assert_eq!(run(), run());
    }
}

#[test]
fn resuming_a_checkpoint_matches_an_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in [disc_config(11), AcquisitionConfig { seed: 3, ..AcquisitionConfig::planar_default() }] {
        let mut whole = Session::new(cfg.clone()).unwrap();
        whole.run(None).unwrap();

        let path = dir.path().join("ckpt.json");
        let mut first = Session::new(cfg).unwrap();
        assert_eq!(first.status(), SessionStatus::Ready);
        if let Round::Request(_) = first.evaluate().unwrap() {
            assert_eq!(first.status(), SessionStatus::AwaitingDemo);
            first.answer_simulated().unwrap();
        }
        first.checkpoint().write(&path).unwrap();
        drop(first);

        let mut resumed = Session::from_checkpoint(Checkpoint::read(&path).unwrap()).unwrap();
        resumed.run(Some(&path)).unwrap();
        assert_eq!(resumed.status(), SessionStatus::Done);
        let expected = serde_json::to_string(whole.state()).unwrap();
        assert_eq!(serde_json::to_string(resumed.state()).unwrap(), expected);
        // the file written after the last round holds the same state
        assert_eq!(serde_json::to_string(&Checkpoint::read(&path).unwrap().state).unwrap(), expected);
    }
}

#[test]
fn evaluating_twice_without_an_answer_is_an_error() {
    let mut s = Session::new(AcquisitionConfig { initial_anchors: vec![Vec3::new(0.72, -0.23, 0.0)], ..disc_config(12) }).unwrap();
    assert!(matches!(s.evaluate().unwrap(), Round::Request(_)));
    assert!(s.evaluate().is_err());
    s.answer_simulated().unwrap();
    assert!(s.answer_simulated().is_err());
}
