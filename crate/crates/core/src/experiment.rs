//! Monte Carlo hedging performance and lattice convergence sweeps.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::black_scholes::bs_price;
use crate::error::{Error, Result};
use crate::hedge::{gen_path, simulate_dynamic, simulate_stop_loss, ExercisePolicy, Rounding};
use crate::lattice::{calibrate, ExerciseStyle, MarketSpec};
use crate::pricer::{price, price_root};
use crate::stats::mean_var;

/// Lattice sizes of the hedging-performance table.
pub const TABLE_ONE_STEPS: [usize; 7] = [5, 10, 25, 50, 100, 250, 500];

const WEEKS_PER_YEAR: f64 = 365.0 / 7.0;

/// Aggregate hedge outcome at one lattice size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfStats {
    pub n: usize,
    pub step_weeks: f64,
    pub reps: usize,
    pub mean_gain: f64,
    pub var_gain: f64,
    pub std_gain: f64,
    /// `var_gain / c0`.
    pub ratio_var: f64,
    /// `std_gain / c0`.
    pub ratio_std: f64,
    /// Lattice price at this `n`.
    pub c0: f64,
}

impl PerfStats {
    /// Standard error of `mean_gain`.
    pub fn std_error(&self) -> f64 {
        self.std_gain / (self.reps as f64).sqrt()
    }
}

/// Hedging strategy run by [`replication_gains`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Delta hedge against a rational holder, full precision.
    Dynamic,
    StopLoss,
}

/// Per-replication gains, replication `i` using seed `base_seed + i`.
/// Returned in replication order regardless of scheduling.
pub fn replication_gains(
    market: &MarketSpec,
    steps: usize,
    reps: usize,
    base_seed: u64,
    strategy: Strategy,
) -> Result<Vec<f64>> {
    let params = calibrate(market, steps)?;
    match strategy {
        Strategy::Dynamic => {
            let surface = price(market, &params)?;
            (0..reps)
                .into_par_iter()
                .map(|i| {
                    let path = gen_path(&params, market.s0, base_seed.wrapping_add(i as u64));
                    simulate_dynamic(&path, &surface, market, ExercisePolicy::Rational, Rounding::Full)
                        .map(|t| t.gain)
                })
                .collect()
        }
        Strategy::StopLoss => (0..reps)
            .into_par_iter()
            .map(|i| {
                let path = gen_path(&params, market.s0, base_seed.wrapping_add(i as u64));
                simulate_stop_loss(&path, market, &params).map(|t| t.gain)
            })
            .collect(),
    }
}

/// Summarises `gains` against the model price `c0`.
pub fn summarize(steps: usize, maturity: f64, c0: f64, gains: &[f64]) -> Result<PerfStats> {
    let (mean_gain, var_gain) = mean_var(gains).ok_or(Error::TooFewReplications(gains.len()))?;
    let std_gain = var_gain.sqrt();
    Ok(PerfStats {
        n: steps,
        step_weeks: maturity * WEEKS_PER_YEAR / steps as f64,
        reps: gains.len(),
        mean_gain,
        var_gain,
        std_gain,
        ratio_var: var_gain / c0,
        ratio_std: std_gain / c0,
        c0,
    })
}

/// Delta-hedging performance over `reps` seeded real-world paths.
pub fn run_perf(market: &MarketSpec, steps: usize, reps: usize, base_seed: u64) -> Result<PerfStats> {
    if reps < 2 {
        return Err(Error::TooFewReplications(reps));
    }
    let params = calibrate(market, steps)?;
    let c0 = price_root(market, &params)?;
    let gains = replication_gains(market, steps, reps, base_seed, Strategy::Dynamic)?;
    summarize(steps, market.maturity, c0, &gains)
}

/// [`run_perf`] at every size in [`TABLE_ONE_STEPS`].
pub fn table_one(market: &MarketSpec, reps: usize, base_seed: u64) -> Result<Vec<PerfStats>> {
    TABLE_ONE_STEPS
        .iter()
        .map(|&n| run_perf(market, n, reps, base_seed))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub binomial: f64,
    pub black_scholes: f64,
    pub abs_error: f64,
}

/// European lattice price against the closed form for each size in `ns`.
pub fn convergence_sweep(market: &MarketSpec, ns: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if ns.is_empty() {
        return Err(Error::Config("convergence sweep needs at least one step count".into()));
    }
    if ns.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("convergence step counts must be ascending".into()));
    }
    let european = MarketSpec {
        style: ExerciseStyle::European,
        ..*market
    };
    let bs = bs_price(
        market.s0,
        market.strike,
        market.sigma,
        market.rate,
        market.maturity,
        market.kind,
    )
    .price;
    ns.iter()
        .map(|&n| {
            let binomial = price_root(&european, &calibrate(&european, n)?)?;
            Ok(ConvergenceRow {
                n,
                binomial,
                black_scholes: bs,
                abs_error: (binomial - bs).abs(),
            })
        })
        .collect()
}

/// Structured results document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfReport {
    pub base_seed: u64,
    pub market: MarketSpec,
    pub rows: Vec<PerfStats>,
}

pub fn write_perf_csv<W: Write>(rows: &[PerfStats], writer: W) -> Result<()> {
    write_rows(rows, writer)
}

pub fn read_perf_csv<R: Read>(reader: R) -> Result<Vec<PerfStats>> {
    read_rows(reader)
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], writer: W) -> Result<()> {
    write_rows(rows, writer)
}

pub fn read_convergence_csv<R: Read>(reader: R) -> Result<Vec<ConvergenceRow>> {
    read_rows(reader)
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(reader: R) -> Result<Vec<T>> {
    let mut csv = csv::Reader::from_reader(reader);
    csv.deserialize().map(|row| row.map_err(Error::from)).collect()
}
