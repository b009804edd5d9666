//! Market description, per-step lattice parameters and node addressing.
//!
//! Returns are stored as *net* returns: a step moves the stock by the gross
//! factor `1 + b` (up) or `1 + a` (down), and the bank account grows by
//! `1 + r`. The risk-neutral up probability is `(r - a) / (b - a)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clamp applied to the real-world up probability produced by [`calibrate`].
pub const Q_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExerciseStyle {
    American,
    European,
}

impl OptionKind {
    /// +1 for calls, -1 for puts.
    pub fn sign(self) -> f64 {
        match self {
            OptionKind::Call => 1.0,
            OptionKind::Put => -1.0,
        }
    }
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptionKind::Call => "call",
            OptionKind::Put => "put",
        })
    }
}

impl FromStr for OptionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "call" | "c" => Ok(OptionKind::Call),
            "put" | "p" => Ok(OptionKind::Put),
            other => Err(Error::Config(format!("unknown option kind `{other}`"))),
        }
    }
}

impl fmt::Display for ExerciseStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExerciseStyle::American => "american",
            ExerciseStyle::European => "european",
        })
    }
}

impl FromStr for ExerciseStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "american" | "a" => Ok(ExerciseStyle::American),
            "european" | "e" => Ok(ExerciseStyle::European),
            other => Err(Error::Config(format!("unknown exercise style `{other}`"))),
        }
    }
}

/// Contract and market environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketSpec {
    /// Initial stock price.
    pub s0: f64,
    /// Strike.
    pub strike: f64,
    /// Volatility per sqrt(year).
    pub sigma: f64,
    /// Riskless rate per year.
    pub rate: f64,
    /// Time to maturity in years.
    pub maturity: f64,
    /// Real-world expected return per year.
    pub mu: f64,
    /// Observed market price of the option.
    pub market_price: f64,
    pub kind: OptionKind,
    pub style: ExerciseStyle,
}

impl MarketSpec {
    /// The 20-week call used in the hedging-performance experiments.
    pub fn twenty_week_call() -> Self {
        MarketSpec {
            s0: 49.0,
            strike: 50.0,
            sigma: 0.2,
            rate: 0.05,
            maturity: 0.3836,
            mu: 0.13,
            market_price: 3.0,
            kind: OptionKind::Call,
            style: ExerciseStyle::American,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidMarket { name, value, reason });
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return bad("s0", self.s0, "must be positive");
        }
        if !(self.strike >= 0.0 && self.strike.is_finite()) {
            return bad("k", self.strike, "must be non-negative");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma", self.sigma, "must be positive");
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return bad("t", self.maturity, "must be positive");
        }
        if !(self.market_price >= 0.0 && self.market_price.is_finite()) {
            return bad("market_price", self.market_price, "must be non-negative");
        }
        if !self.rate.is_finite() {
            return bad("r", self.rate, "must be finite");
        }
        if !self.mu.is_finite() {
            return bad("mu", self.mu, "must be finite");
        }
        Ok(())
    }
}

/// Per-step lattice parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    steps: usize,
    down: f64,
    up: f64,
    rate: f64,
    p_up: f64,
    q_up: f64,
}

impl StepParams {
    /// Builds a lattice directly from net returns. `q_up` is the real-world
    /// up probability and must lie in `[0, 1]`; the endpoints are accepted so
    /// that degenerate all-up / all-down paths can be generated.
    pub fn new(steps: usize, down: f64, up: f64, rate: f64, q_up: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidLattice("step count must be at least 1".into()));
        }
        if !(down > -1.0) || !down.is_finite() || !up.is_finite() || !rate.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "returns must be finite with a > -1, got a = {down}, b = {up}, r = {rate}"
            )));
        }
        if !(down < rate && rate < up) {
            return Err(Error::Arbitrage { a: down, r: rate, b: up });
        }
        if !(0.0..=1.0).contains(&q_up) {
            return Err(Error::InvalidLattice(format!(
                "real-world up probability must be in [0, 1], got {q_up}"
            )));
        }
        let p_up = (rate - down) / (up - down);
        if !(p_up > 0.0 && p_up < 1.0) {
            return Err(Error::Arbitrage { a: down, r: rate, b: up });
        }
        Ok(StepParams { steps, down, up, rate, p_up, q_up })
    }

    /// Same lattice with a different real-world up probability.
    pub fn with_q_up(self, q_up: f64) -> Result<Self> {
        StepParams::new(self.steps, self.down, self.up, self.rate, q_up)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Net down return `a`.
    pub fn down(&self) -> f64 {
        self.down
    }

    /// Net up return `b`.
    pub fn up(&self) -> f64 {
        self.up
    }

    /// Net riskless return per step `r`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn p_up(&self) -> f64 {
        self.p_up
    }

    pub fn q_up(&self) -> f64 {
        self.q_up
    }

    pub fn up_factor(&self) -> f64 {
        1.0 + self.up
    }

    pub fn down_factor(&self) -> f64 {
        1.0 + self.down
    }

    pub fn growth(&self) -> f64 {
        1.0 + self.rate
    }

    /// `(1 + r)^steps`, the bank growth over the whole horizon.
    pub fn horizon_growth(&self) -> f64 {
        self.growth().powi(self.steps as i32)
    }
}

/// Address of a lattice node: `ups` up-moves out of `step` moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeIndex {
    pub step: usize,
    pub ups: usize,
}

impl NodeIndex {
    pub const ROOT: NodeIndex = NodeIndex { step: 0, ups: 0 };

    pub fn new(step: usize, ups: usize) -> Self {
        debug_assert!(ups <= step, "node ({step}, {ups}) has more ups than steps");
        NodeIndex { step, ups }
    }

    pub fn up_child(self) -> Self {
        NodeIndex { step: self.step + 1, ups: self.ups + 1 }
    }

    pub fn down_child(self) -> Self {
        NodeIndex { step: self.step + 1, ups: self.ups }
    }

    pub fn is_valid(self, steps: usize) -> bool {
        self.ups <= self.step && self.step <= steps
    }
}

/// CRR calibration of a lattice with `steps` steps to a continuous market.
///
/// The per-step rate is simple: `r = R T / N`. The real-world up probability
/// matches the one-step expected gross return `exp(mu T / N)`.
pub fn calibrate(market: &MarketSpec, steps: usize) -> Result<StepParams> {
    market.validate()?;
    if steps == 0 {
        return Err(Error::InvalidLattice("step count must be at least 1".into()));
    }
    let dt = market.maturity / steps as f64;
    let jump = market.sigma * dt.sqrt();
    let up_factor = jump.exp();
    let down_factor = (-jump).exp();
    let rate = market.rate * market.maturity / steps as f64;
    let q_up = ((market.mu * dt).exp() - down_factor) / (up_factor - down_factor);
    let q_up = q_up.clamp(Q_CLAMP, 1.0 - Q_CLAMP);
    StepParams::new(steps, down_factor - 1.0, up_factor - 1.0, rate, q_up)
}

/// Stock price at `idx`: `S0 (1+b)^ups (1+a)^(step-ups)`.
pub fn node_price(s0: f64, params: &StepParams, idx: NodeIndex) -> f64 {
    debug_assert!(idx.is_valid(params.steps()));
    let downs = idx.step - idx.ups;
    s0 * params.up_factor().powi(idx.ups as i32) * params.down_factor().powi(downs as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_lattice() -> StepParams {
        StepParams::new(3, -0.5, 0.5, 0.1, 0.5).unwrap()
    }

    #[test]
    fn direct_construction_gives_p_six_tenths() {
        let p = example_lattice();
        assert!((p.p_up() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn calibrate_twenty_steps() {
        let market = MarketSpec {
            mu: 0.13,
            ..MarketSpec::twenty_week_call()
        };
        let p = calibrate(&market, 20).unwrap();
        // extended-precision reference values, 6 significant digits
        assert!((p.rate() - 0.000959).abs() < 5e-10);
        assert!((p.up_factor() - 1.02809).abs() < 5e-6);
        assert!((p.down_factor() - 0.972682).abs() < 5e-7);
        assert!((p.p_up() - 0.510385).abs() < 5e-7);
    }

    #[test]
    fn zero_rate_risk_neutral_probability_is_down_biased() {
        let market = MarketSpec {
            s0: 100.0,
            strike: 100.0,
            sigma: 0.2,
            rate: 0.0,
            maturity: 1.0,
            ..MarketSpec::twenty_week_call()
        };
        let p = calibrate(&market, 1).unwrap();
        assert!((p.up() - (0.2f64.exp() - 1.0)).abs() < 1e-15);
        assert!((p.down() - ((-0.2f64).exp() - 1.0)).abs() < 1e-15);
        assert!(p.p_up() < 0.5);
        assert!((p.p_up() - 0.450166002687522).abs() < 1e-12);
    }

    #[test]
    fn calibration_rejects_arbitrage() {
        // r = R T / N = 2.0 dwarfs the one-step up return exp(0.01) - 1.
        let market = MarketSpec {
            sigma: 0.01,
            rate: 2.0,
            maturity: 1.0,
            ..MarketSpec::twenty_week_call()
        };
        assert!(matches!(calibrate(&market, 1), Err(Error::Arbitrage { .. })));
    }

    #[test]
    fn direct_construction_rejects_r_outside_band() {
        assert!(matches!(
            StepParams::new(3, -0.5, 0.5, 0.6, 0.5),
            Err(Error::Arbitrage { .. })
        ));
        assert!(matches!(
            StepParams::new(3, -0.5, 0.5, -0.5, 0.5),
            Err(Error::Arbitrage { .. })
        ));
        assert!(StepParams::new(0, -0.5, 0.5, 0.1, 0.5).is_err());
        assert!(StepParams::new(3, -1.0, 0.5, 0.1, 0.5).is_err());
    }

    #[test]
    fn q_is_clamped_inside_unit_interval() {
        let market = MarketSpec {
            mu: 50.0,
            ..MarketSpec::twenty_week_call()
        };
        let p = calibrate(&market, 10).unwrap();
        assert_eq!(p.q_up(), 1.0 - Q_CLAMP);
        let market = MarketSpec {
            mu: -50.0,
            ..MarketSpec::twenty_week_call()
        };
        assert_eq!(calibrate(&market, 10).unwrap().q_up(), Q_CLAMP);
    }

    #[test]
    fn invalid_market_rejected() {
        let mut m = MarketSpec::twenty_week_call();
        m.s0 = 0.0;
        assert!(calibrate(&m, 10).is_err());
        let mut m = MarketSpec::twenty_week_call();
        m.sigma = -0.1;
        assert!(m.validate().is_err());
        let mut m = MarketSpec::twenty_week_call();
        m.market_price = -1.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn example_tree_corners() {
        let p = example_lattice();
        assert_eq!(node_price(100.0, &p, NodeIndex::new(3, 3)), 337.5);
        assert_eq!(node_price(100.0, &p, NodeIndex::new(3, 0)), 12.5);
        assert_eq!(node_price(100.0, &p, NodeIndex::new(2, 1)), 75.0);
        assert_eq!(node_price(42.0, &p, NodeIndex::ROOT), 42.0);
    }

    #[test]
    fn compounding_error_shrinks_with_steps() {
        let (rate, maturity) = (0.05f64, 0.3836f64);
        let target = (rate * maturity).exp();
        let errs: Vec<f64> = [10, 20, 40, 80]
            .iter()
            .map(|&n| ((1.0 + rate * maturity / n as f64).powi(n) - target).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn kind_and_style_parse() {
        assert_eq!("Call".parse::<OptionKind>().unwrap(), OptionKind::Call);
        assert_eq!("put".parse::<OptionKind>().unwrap(), OptionKind::Put);
        assert_eq!("european".parse::<ExerciseStyle>().unwrap(), ExerciseStyle::European);
        assert!("straddle".parse::<OptionKind>().is_err());
    }
}
