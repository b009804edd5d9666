mod common;

use amhedge::experiment::{replication_gains, summarize, Strategy};
use amhedge::stats::mean_var;
use amhedge::{
    calibrate, gen_path, price, run_perf, simulate_dynamic, ExercisePolicy, ExerciseStyle, HedgeAction,
    MarketSpec, Move, OptionKind, Path, Rounding, StepParams,
};
use common::{random_lattice, Lcg};

fn all_paths(n: usize) -> impl Iterator<Item = Vec<Move>> {
    (0u32..1 << n).map(move |bits| {
        (0..n)
            .map(|i| if bits >> i & 1 == 1 { Move::Up } else { Move::Down })
            .collect()
    })
}

#[test]
fn every_path_replicates_exactly_and_covers_any_exercise() {
    let mut rng = Lcg::new(2024);
    for case in 0..24 {
        let n = 1 + case % 10;
        let (down, up, rate) = random_lattice(&mut rng);
        let params = StepParams::new(n, down, up, rate, 0.5).unwrap();
        let market = MarketSpec {
            s0: 100.0,
            strike: rng.uniform(60.0, 140.0),
            market_price: rng.uniform(0.0, 40.0),
            kind: if case % 2 == 0 { OptionKind::Call } else { OptionKind::Put },
            style: ExerciseStyle::American,
            ..MarketSpec::twenty_week_call()
        };
        let surface = price(&market, &params).unwrap();
        let locked = (market.market_price - surface.root_value()) * params.horizon_growth();
        for moves in all_paths(n) {
            let path = Path::from_moves(market.s0, &params, moves);
            let t = simulate_dynamic(&path, &surface, &market, ExercisePolicy::Rational, Rounding::Full).unwrap();
            assert!((t.gain - locked).abs() < 1e-8, "case {case}: {} vs {locked}", t.gain);
            for tau in 0..=n {
                let t = simulate_dynamic(&path, &surface, &market, ExercisePolicy::AtStep(tau), Rounding::Full)
                    .unwrap();
                assert!(t.gain >= locked - 1e-8, "case {case} tau {tau}: {} < {locked}", t.gain);
            }
            let t = simulate_dynamic(&path, &surface, &market, ExercisePolicy::ExpiryOnly, Rounding::Full).unwrap();
            assert!(t.gain >= locked - 1e-8);
        }
    }
}

#[test]
fn fixed_step_exercise_settles_at_that_step() {
    let market = MarketSpec {
        kind: OptionKind::Put,
        ..MarketSpec::twenty_week_call()
    };
    let params = calibrate(&market, 12).unwrap();
    let surface = price(&market, &params).unwrap();
    let path = gen_path(&params, market.s0, 4);
    let t = simulate_dynamic(&path, &surface, &market, ExercisePolicy::AtStep(5), Rounding::Full).unwrap();
    assert_eq!(t.exercise_step, Some(5));
    assert_eq!(t.steps[5].action, HedgeAction::ExerciseSettle);
    assert!(t.steps[6..].iter().all(|s| s.action == HedgeAction::None && s.settlement_if_exercised == 0.0));
}

#[test]
fn log_return_drift_matches_mu() {
    let market = MarketSpec::twenty_week_call();
    let n = 10_000;
    let params = calibrate(&market, n).unwrap();
    let (lu, ld) = (params.up_factor().ln(), params.down_factor().ln());
    let reps = 1000;
    let samples: Vec<f64> = (0..reps)
        .map(|seed| {
            let path = gen_path(&params, market.s0, seed);
            let ups = path.moves().iter().filter(|m| **m == Move::Up).count() as f64;
            ups * lu + (n as f64 - ups) * ld
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / reps as f64;
    let q = params.q_up();
    let step_var = q * (1.0 - q) * (lu - ld).powi(2);
    let se = (n as f64 * step_var / reps as f64).sqrt();
    let target = (market.mu - 0.5 * market.sigma * market.sigma) * market.maturity;
    assert!((mean - target).abs() < 3.0 * se, "mean {mean} target {target} se {se}");
}

#[test]
fn stop_loss_is_noisier_than_delta_hedging() {
    let market = MarketSpec::twenty_week_call();
    let dynamic = replication_gains(&market, 100, 1000, 0, Strategy::Dynamic).unwrap();
    let stop = replication_gains(&market, 100, 1000, 0, Strategy::StopLoss).unwrap();
    let (_, var_dyn) = mean_var(&dynamic).unwrap();
    let (_, var_stop) = mean_var(&stop).unwrap();
    assert!(var_stop > var_dyn, "{var_stop} vs {var_dyn}");
    assert!(var_stop > 0.1);
}

#[test]
fn perf_is_deterministic() {
    let market = MarketSpec::twenty_week_call();
    let a = run_perf(&market, 50, 200, 9).unwrap();
    let b = run_perf(&market, 50, 200, 9).unwrap();
    assert_eq!(a.mean_gain.to_bits(), b.mean_gain.to_bits());
    assert_eq!(a.var_gain.to_bits(), b.var_gain.to_bits());
    assert_eq!(a, b);
}

#[test]
fn aggregation_ignores_order() {
    let market = MarketSpec::twenty_week_call();
    for strategy in [Strategy::Dynamic, Strategy::StopLoss] {
        let mut gains = replication_gains(&market, 50, 500, 3, strategy).unwrap();
        let before = summarize(50, market.maturity, 2.4, &gains).unwrap();
        gains.reverse();
        let mut rng = Lcg::new(5);
        for i in (1..gains.len()).rev() {
            let j = rng.below(i + 1);
            gains.swap(i, j);
        }
        let after = summarize(50, market.maturity, 2.4, &gains).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs());
        assert!(rel(before.mean_gain, after.mean_gain));
        assert!(before.var_gain == after.var_gain || rel(before.var_gain, after.var_gain));
    }
}

// The delta hedge on lattice paths is exact, so the mean gain sits on the
// locked-in value up to rounding; 3 standard errors are floored at the 1e-8
// replication tolerance.
fn within_three_se(mean: f64, target: f64, se: f64) -> bool {
    (mean - target).abs() <= (3.0 * se).max(1e-8)
}

#[test]
fn fair_price_captures_nothing() {
    for kind in [OptionKind::Call, OptionKind::Put] {
        for n in [5, 40, 200] {
            let base = MarketSpec {
                kind,
                ..MarketSpec::twenty_week_call()
            };
            let params = calibrate(&base, n).unwrap();
            let c0 = price(&base, &params).unwrap().root_value();
            let market = MarketSpec { market_price: c0, ..base };
            let s = run_perf(&market, n, 200, 1).unwrap();
            assert!(within_three_se(s.mean_gain, 0.0, s.std_error()), "{kind} {n}: {s:?}");
        }
    }
}

#[test]
fn mispricing_passes_through_linearly() {
    let market = MarketSpec::twenty_week_call();
    for n in [10, 100] {
        let base = run_perf(&market, n, 300, 2).unwrap();
        let bumped = run_perf(
            &MarketSpec {
                market_price: market.market_price + 1.0,
                ..market
            },
            n,
            300,
            2,
        )
        .unwrap();
        let growth = calibrate(&market, n).unwrap().horizon_growth();
        let se = base.std_error().hypot(bumped.std_error());
        assert!(within_three_se(bumped.mean_gain - base.mean_gain, growth, se));
    }
}
