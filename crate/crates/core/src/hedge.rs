//! Writer-side hedging along a single lattice path.
//!
//! The writer sells the option at the market price `M`, so the cash account
//! starts at `M`. The part `M - C0` is the mispricing the hedge locks in; the
//! rest, together with borrowing (or short-sale proceeds for puts), finances
//! the replicating stock position. Each later step:
//!
//! 1. accrue the cash account by `1 + r`,
//! 2. observe the new stock price,
//! 3. if the holder exercises, pay the intrinsic value in cash, liquidate the
//!    shares and stop trading,
//! 4. otherwise rebalance to the node's delta, or settle at expiry.
//!
//! The gain is the cash account at step `N`, so it includes the banked
//! mispricing compounded over the whole horizon even after early exercise.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{node_price, MarketSpec, NodeIndex, OptionKind, StepParams};
use crate::pricer::ValueSurface;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Up,
    Down,
}

/// A stock path on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    seed: Option<u64>,
    moves: Vec<Move>,
    prices: Vec<f64>,
}

impl Path {
    /// Path with explicit moves. Prices use the closed form, so they agree
    /// bit for bit with [`node_price`] at the visited nodes.
    pub fn from_moves(s0: f64, params: &StepParams, moves: Vec<Move>) -> Self {
        let mut prices = Vec::with_capacity(moves.len() + 1);
        let mut idx = NodeIndex::ROOT;
        prices.push(node_price(s0, params, idx));
        for m in &moves {
            idx = match m {
                Move::Up => idx.up_child(),
                Move::Down => idx.down_child(),
            };
            prices.push(node_price(s0, params, idx));
        }
        Path { seed: None, moves, prices }
    }

    /// Parses a string of `u`/`d` characters.
    pub fn parse_moves(text: &str) -> Result<Vec<Move>> {
        text.chars()
            .filter(|c| !c.is_whitespace() && *c != ',' && *c != '-')
            .map(|c| match c.to_ascii_lowercase() {
                'u' => Ok(Move::Up),
                'd' => Ok(Move::Down),
                other => Err(Error::Config(format!("path moves must be u or d, got `{other}`"))),
            })
            .collect()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    /// Number of moves.
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Lattice node visited at `step`.
    pub fn node(&self, step: usize) -> NodeIndex {
        let ups = self.moves[..step].iter().filter(|m| **m == Move::Up).count();
        NodeIndex { step, ups }
    }

    fn nodes(&self) -> Vec<NodeIndex> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        let mut idx = NodeIndex::ROOT;
        out.push(idx);
        for m in &self.moves {
            idx = match m {
                Move::Up => idx.up_child(),
                Move::Down => idx.down_child(),
            };
            out.push(idx);
        }
        out
    }
}

/// Real-world path: each move is up with probability `q_up`, drawn from a
/// ChaCha stream keyed by `seed`.
pub fn gen_path(params: &StepParams, s0: f64, seed: u64) -> Path {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = params.q_up();
    let moves = (0..params.steps())
        .map(|_| if rng.gen::<f64>() < q { Move::Up } else { Move::Down })
        .collect();
    let mut path = Path::from_moves(s0, params, moves);
    path.seed = Some(seed);
    path
}

/// Whether a rational holder exercises at `idx`.
pub fn rational_exercise(surface: &ValueSurface, idx: NodeIndex) -> bool {
    if idx.step == surface.steps() {
        surface.intrinsic(idx) > 0.0
    } else {
        surface.exercise_flag(idx)
    }
}

/// When the option holder exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExercisePolicy {
    /// First node where exercising is optimal.
    Rational,
    /// Exercise at this step whatever the payoff; steps past maturity mean
    /// expiry.
    AtStep(usize),
    ExpiryOnly,
}

/// Precision of the hedge ratios actually traded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    #[default]
    Full,
    /// Deltas rounded to three decimals.
    ThreeDecimals,
}

impl Rounding {
    fn apply(self, delta: f64) -> f64 {
        match self {
            Rounding::Full => delta,
            Rounding::ThreeDecimals => (delta * 1000.0).round() / 1000.0,
        }
    }
}

impl FromStr for Rounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Rounding::Full),
            "three-decimals" => Ok(Rounding::ThreeDecimals),
            other => Err(Error::Config(format!("unknown rounding mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeAction {
    Rebalance,
    ExerciseSettle,
    ExpireSettle,
    None,
}

impl fmt::Display for HedgeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HedgeAction::Rebalance => "rebalance",
            HedgeAction::ExerciseSettle => "exercise_settle",
            HedgeAction::ExpireSettle => "expire_settle",
            HedgeAction::None => "none",
        })
    }
}

/// Book of the writer after the trades of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeStep {
    pub step: usize,
    pub stock_price: f64,
    pub shares_held: f64,
    /// Bank account, negative when borrowing.
    pub cash: f64,
    /// `shares_held * stock_price + cash`.
    pub portfolio_value: f64,
    /// What the holder would be owed on exercise now; zero once the option
    /// is gone.
    pub settlement_if_exercised: f64,
    pub action: HedgeAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeTrace {
    pub steps: Vec<HedgeStep>,
    pub exercise_step: Option<usize>,
    /// Cash at maturity per written option.
    pub gain: f64,
    /// `(M - C0)(1 + r)^N` for the delta hedge; `None` for strategies
    /// without a model price.
    pub locked_gain: Option<f64>,
}

impl HedgeTrace {
    /// Gain in excess of the locked-in mispricing.
    pub fn residual(&self) -> Option<f64> {
        self.locked_gain.map(|locked| self.gain - locked)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for s in &self.steps {
            csv.serialize(TraceRow::from(s))?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// One exported trace row: the price, cash, value and settlement series
/// plus bookkeeping columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub sp: f64,
    pub tc: f64,
    pub tv: f64,
    pub tm: f64,
    pub shares: f64,
    pub action: HedgeAction,
}

impl From<&HedgeStep> for TraceRow {
    fn from(s: &HedgeStep) -> Self {
        TraceRow {
            step: s.step,
            sp: s.stock_price,
            tc: s.cash,
            tv: s.portfolio_value,
            tm: s.settlement_if_exercised,
            shares: s.shares_held,
            action: s.action,
        }
    }
}

pub fn read_trace_csv<R: Read>(reader: R) -> Result<Vec<TraceRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    csv.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn record(step: usize, spot: f64, shares: f64, cash: f64, owed: f64, action: HedgeAction) -> HedgeStep {
    HedgeStep {
        step,
        stock_price: spot,
        shares_held: shares,
        cash,
        portfolio_value: shares * spot + cash,
        settlement_if_exercised: owed,
        action,
    }
}

/// Self-financing delta hedge of a written option along `path`.
pub fn simulate_dynamic(
    path: &Path,
    surface: &ValueSurface,
    market: &MarketSpec,
    policy: ExercisePolicy,
    rounding: Rounding,
) -> Result<HedgeTrace> {
    let n = surface.steps();
    if path.len() != n {
        return Err(Error::PathMismatch { path: path.len(), surface: n });
    }
    let growth = surface.params().growth();
    let model_price = surface.root_value();

    let mut steps = Vec::with_capacity(n + 1);
    let mut cash = market.market_price;
    let mut shares = 0.0;
    let mut alive = true;
    let mut exercise_step = None;

    for (step, idx) in path.nodes().into_iter().enumerate() {
        if step > 0 {
            cash *= growth;
        }
        let spot = path.prices()[step];
        let owed = if alive { surface.intrinsic(idx) } else { 0.0 };

        let action = if !alive {
            HedgeAction::None
        } else if step == n {
            cash += shares * spot - owed;
            shares = 0.0;
            alive = false;
            if owed > 0.0 {
                exercise_step = Some(step);
            }
            HedgeAction::ExpireSettle
        } else if exercises(policy, surface, idx) {
            cash += shares * spot - owed;
            shares = 0.0;
            alive = false;
            exercise_step = Some(step);
            HedgeAction::ExerciseSettle
        } else {
            let delta = surface.delta(idx).expect("interior node");
            let target = rounding.apply(delta);
            cash -= (target - shares) * spot;
            shares = target;
            HedgeAction::Rebalance
        };
        steps.push(record(step, spot, shares, cash, owed, action));
    }

    Ok(HedgeTrace {
        steps,
        exercise_step,
        gain: cash,
        locked_gain: Some((market.market_price - model_price) * surface.params().horizon_growth()),
    })
}

fn exercises(policy: ExercisePolicy, surface: &ValueSurface, idx: NodeIndex) -> bool {
    match policy {
        ExercisePolicy::Rational => rational_exercise(surface, idx),
        ExercisePolicy::AtStep(tau) => idx.step == tau,
        ExercisePolicy::ExpiryOnly => false,
    }
}

/// Covered/naked stop-loss hedge of a written call: hold one share while the
/// stock is at or above the strike, none below it. The holder exercises at
/// expiry when in the money.
pub fn simulate_stop_loss(path: &Path, market: &MarketSpec, params: &StepParams) -> Result<HedgeTrace> {
    if market.kind != OptionKind::Call {
        return Err(Error::Unsupported("stop-loss hedging is defined for calls only"));
    }
    let n = params.steps();
    if path.len() != n {
        return Err(Error::PathMismatch { path: path.len(), surface: n });
    }
    let growth = params.growth();
    let mut steps = Vec::with_capacity(n + 1);
    let mut cash = market.market_price;
    let mut shares: f64 = 0.0;
    let mut exercise_step = None;

    for (step, &spot) in path.prices().iter().enumerate() {
        if step > 0 {
            cash *= growth;
        }
        let owed = (spot - market.strike).max(0.0);
        let action = if step == n {
            cash += shares * spot - owed;
            shares = 0.0;
            if owed > 0.0 {
                exercise_step = Some(step);
            }
            HedgeAction::ExpireSettle
        } else {
            let target = if spot >= market.strike { 1.0 } else { 0.0 };
            if target != shares {
                cash -= (target - shares) * spot;
                shares = target;
                HedgeAction::Rebalance
            } else {
                HedgeAction::None
            }
        };
        steps.push(record(step, spot, shares, cash, owed, action));
    }

    Ok(HedgeTrace {
        steps,
        exercise_step,
        gain: cash,
        locked_gain: None,
    })
}
