//! Closed-form European prices, the limit of the calibrated lattice.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::lattice::OptionKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsQuote {
    pub price: f64,
    pub d1: f64,
    pub d2: f64,
    pub delta: f64,
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Black-Scholes price of a European option on a non-dividend stock.
///
/// At `maturity == 0` the quote collapses to the intrinsic value with
/// infinite `d1`/`d2` of the moneyness sign.
pub fn bs_price(
    spot: f64,
    strike: f64,
    sigma: f64,
    rate: f64,
    maturity: f64,
    kind: OptionKind,
) -> BsQuote {
    let sign = kind.sign();
    if maturity <= 0.0 {
        let price = (sign * (spot - strike)).max(0.0);
        let d = if spot > strike {
            f64::INFINITY
        } else if spot < strike {
            f64::NEG_INFINITY
        } else {
            0.0
        };
        let itm = price > 0.0;
        let delta = match kind {
            OptionKind::Call if itm => 1.0,
            OptionKind::Put if itm => -1.0,
            _ => 0.0,
        };
        return BsQuote { price, d1: d, d2: d, delta };
    }

    let vol_sqrt_t = sigma * maturity.sqrt();
    let d1 = ((spot / strike).ln() + (rate + 0.5 * sigma * sigma) * maturity) / vol_sqrt_t;
    let d2 = d1 - vol_sqrt_t;
    let discounted_strike = strike * (-rate * maturity).exp();
    let (price, delta) = match kind {
        OptionKind::Call => (
            spot * norm_cdf(d1) - discounted_strike * norm_cdf(d2),
            norm_cdf(d1),
        ),
        OptionKind::Put => (
            discounted_strike * norm_cdf(-d2) - spot * norm_cdf(-d1),
            norm_cdf(d1) - 1.0,
        ),
    };
    BsQuote { price, d1, d2, delta }
}
