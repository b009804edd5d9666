//! The three-step American call example and its hedge ledger.
//!
//! Stock 100, strike 100, returns a = -0.5 and b = 0.5, bank rate 0.1 per
//! step, option sold at 45 against a model value of 42.5995.

use crate::error::Result;
use crate::hedge::{simulate_dynamic, ExercisePolicy, HedgeAction, HedgeTrace, Move, Path, Rounding};
use crate::lattice::{ExerciseStyle, MarketSpec, OptionKind, StepParams};
use crate::pricer::{price, ValueSurface};

/// Market and lattice of the example. `sigma`, `maturity` and `mu` are not
/// used because the lattice is given directly.
pub fn three_step_call() -> (MarketSpec, StepParams) {
    let market = MarketSpec {
        s0: 100.0,
        strike: 100.0,
        sigma: 0.5,
        rate: 0.1,
        maturity: 3.0,
        mu: 0.1,
        market_price: 45.0,
        kind: OptionKind::Call,
        style: ExerciseStyle::American,
    };
    let params = StepParams::new(3, -0.5, 0.5, 0.1, 0.5).expect("example lattice is viable");
    (market, params)
}

/// Up, down, down: the path ending at 37.5.
pub const EXPIRES_WORTHLESS: [Move; 3] = [Move::Up, Move::Down, Move::Down];
/// Up, down, up: the branch ending in the money at 112.5.
pub const EXPIRES_IN_THE_MONEY: [Move; 3] = [Move::Up, Move::Down, Move::Up];

#[derive(Debug, Clone)]
pub struct WorkedExample {
    pub market: MarketSpec,
    pub surface: ValueSurface,
    pub trace: HedgeTrace,
    pub lines: Vec<String>,
}

pub fn worked_example(moves: &[Move], rounding: Rounding) -> Result<WorkedExample> {
    let (market, params) = three_step_call();
    let surface = price(&market, &params)?;
    let path = Path::from_moves(market.s0, &params, moves.to_vec());
    let trace = simulate_dynamic(&path, &surface, &market, ExercisePolicy::Rational, rounding)?;
    let lines = hedge_ledger(&market, &surface, &trace);
    Ok(WorkedExample { market, surface, trace, lines })
}

fn account(balance: f64) -> String {
    if balance < 0.0 {
        format!("owe {:.4}", -balance)
    } else {
        format!("hold {:.4}", balance)
    }
}

/// Narrative of a delta-hedge trace. The bank deposit `M - C0` is reported
/// separately from the hedge account that finances the shares.
pub fn hedge_ledger(market: &MarketSpec, surface: &ValueSurface, trace: &HedgeTrace) -> Vec<String> {
    let growth = surface.params().growth();
    let c0 = surface.root_value();
    let deposit = market.market_price - c0;
    let deposit_at = |step: usize| deposit * growth.powi(step as i32);
    let hedge_at = |step: usize| trace.steps[step].cash - deposit_at(step);
    let kind = market.kind;

    let mut lines = Vec::new();
    let first = &trace.steps[0];
    lines.push(format!(
        "step 0: sell the {kind} for {:.4}; model value {:.4}; bank the difference {:.4}",
        market.market_price, c0, deposit
    ));
    match first.action {
        HedgeAction::Rebalance => lines.push(format!(
            "step 0: hold {:.4} shares at {:.4} per share; hedge account: {}",
            first.shares_held,
            first.stock_price,
            account(hedge_at(0))
        )),
        HedgeAction::ExerciseSettle => lines.push(format!(
            "step 0: holder exercises at once; pay {:.4}",
            first.settlement_if_exercised
        )),
        _ => {}
    }

    for pair in trace.steps.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        let step = cur.step;
        let carried = hedge_at(step - 1) * growth;
        match cur.action {
            HedgeAction::Rebalance => {
                let traded = cur.shares_held - prev.shares_held;
                let verb = if traded >= 0.0 { "buy" } else { "sell" };
                lines.push(format!(
                    "step {step}: stock at {:.4}; new delta {:.4}; {verb} {:.4} shares for {:.4}; \
                     hedge account after interest: {}; after trade: {}",
                    cur.stock_price,
                    cur.shares_held,
                    traded.abs(),
                    (traded * cur.stock_price).abs(),
                    account(carried),
                    account(hedge_at(step)),
                ));
            }
            HedgeAction::ExerciseSettle | HedgeAction::ExpireSettle => {
                let paid = cur.settlement_if_exercised;
                let event = match (cur.action, paid > 0.0) {
                    (HedgeAction::ExerciseSettle, _) => "holder exercises",
                    (_, true) => "option expires in the money",
                    _ => "option expires worthless",
                };
                lines.push(format!(
                    "step {step}: stock at {:.4}; {event}; hedge account after interest: {}",
                    cur.stock_price,
                    account(carried)
                ));
                if paid > 0.0 {
                    lines.push(format!(
                        "step {step}: pay the holder {:.4}; hedge account: {}",
                        paid,
                        account(carried - paid)
                    ));
                }
                let proceeds = prev.shares_held * cur.stock_price;
                lines.push(format!(
                    "step {step}: liquidate {:.4} shares for {:.4}; residual {:.4}",
                    prev.shares_held,
                    proceeds,
                    hedge_at(step)
                ));
            }
            HedgeAction::None => {}
        }
    }

    let n = surface.steps();
    lines.push(format!(
        "step {n}: bank deposit has grown to {:.4}; total gain {:.4}",
        deposit_at(n),
        trace.gain
    ));
    lines
}
