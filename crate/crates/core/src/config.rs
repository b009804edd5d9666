//! Flat `key = value` market files.
//!
//! ```text
//! # twenty-week call
//! s0 = 49
//! k = 50
//! sigma = 0.2
//! r = 0.05
//! t = 0.3836
//! mu = 0.13
//! market_price = 3
//! kind = call
//! style = american
//! ```
//!
//! Rates are decimal fractions and `t` is in years. Blank lines and `#`
//! comments are ignored.

use crate::error::{Error, Result};
use crate::lattice::{ExerciseStyle, MarketSpec, OptionKind};

/// Market fields that may be left unset and filled from a base spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarketOverrides {
    pub s0: Option<f64>,
    pub strike: Option<f64>,
    pub sigma: Option<f64>,
    pub rate: Option<f64>,
    pub maturity: Option<f64>,
    pub mu: Option<f64>,
    pub market_price: Option<f64>,
    pub kind: Option<OptionKind>,
    pub style: Option<ExerciseStyle>,
}

impl MarketOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = MarketOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: `{key}` is not a number: `{value}`", lineno + 1)))
            };
            match key.as_str() {
                "s0" => out.s0 = Some(num()?),
                "k" => out.strike = Some(num()?),
                "sigma" => out.sigma = Some(num()?),
                "r" => out.rate = Some(num()?),
                "t" => out.maturity = Some(num()?),
                "mu" => out.mu = Some(num()?),
                "market_price" => out.market_price = Some(num()?),
                "kind" => out.kind = Some(value.parse()?),
                "style" => out.style = Some(value.parse()?),
                other => {
                    return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1)))
                }
            }
        }
        Ok(out)
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: MarketOverrides) -> Self {
        MarketOverrides {
            s0: other.s0.or(self.s0),
            strike: other.strike.or(self.strike),
            sigma: other.sigma.or(self.sigma),
            rate: other.rate.or(self.rate),
            maturity: other.maturity.or(self.maturity),
            mu: other.mu.or(self.mu),
            market_price: other.market_price.or(self.market_price),
            kind: other.kind.or(self.kind),
            style: other.style.or(self.style),
        }
    }

    pub fn apply(&self, base: MarketSpec) -> MarketSpec {
        MarketSpec {
            s0: self.s0.unwrap_or(base.s0),
            strike: self.strike.unwrap_or(base.strike),
            sigma: self.sigma.unwrap_or(base.sigma),
            rate: self.rate.unwrap_or(base.rate),
            maturity: self.maturity.unwrap_or(base.maturity),
            mu: self.mu.unwrap_or(base.mu),
            market_price: self.market_price.unwrap_or(base.market_price),
            kind: self.kind.unwrap_or(base.kind),
            style: self.style.unwrap_or(base.style),
        }
    }

    /// A complete, validated market; every key must be present.
    pub fn into_market(self) -> Result<MarketSpec> {
        fn need<T>(v: Option<T>, key: &str) -> Result<T> {
            v.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
        }
        let market = MarketSpec {
            s0: need(self.s0, "s0")?,
            strike: need(self.strike, "k")?,
            sigma: need(self.sigma, "sigma")?,
            rate: need(self.rate, "r")?,
            maturity: need(self.maturity, "t")?,
            mu: need(self.mu, "mu")?,
            market_price: need(self.market_price, "market_price")?,
            kind: need(self.kind, "kind")?,
            style: need(self.style, "style")?,
        };
        market.validate()?;
        Ok(market)
    }
}

pub fn parse_market(text: &str) -> Result<MarketSpec> {
    MarketOverrides::parse(text)?.into_market()
}

pub fn format_market(market: &MarketSpec) -> String {
    format!(
        "s0 = {}\nk = {}\nsigma = {}\nr = {}\nt = {}\nmu = {}\nmarket_price = {}\nkind = {}\nstyle = {}\n",
        market.s0,
        market.strike,
        market.sigma,
        market.rate,
        market.maturity,
        market.mu,
        market.market_price,
        market.kind,
        market.style
    )
}
