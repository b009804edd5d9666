//! Binomial-lattice pricing and dynamic delta hedging of American and
//! European options.
//!
//! * [`lattice`]: market inputs, CRR calibration, node prices
//! * [`pricer`]: backward induction, replication weights, exercise region
//! * [`black_scholes`]: closed-form European prices
//! * [`hedge`]: real-world paths and the writer's hedge
//! * [`experiment`]: Monte Carlo performance and convergence sweeps

pub mod black_scholes;
pub mod config;
pub mod error;
pub mod example;
pub mod experiment;
pub mod hedge;
pub mod lattice;
pub mod pricer;
pub mod stats;

pub use black_scholes::{bs_price, norm_cdf, BsQuote};
pub use error::{Error, Result};
pub use experiment::{convergence_sweep, run_perf, table_one, ConvergenceRow, PerfReport, PerfStats};
pub use hedge::{
    gen_path, rational_exercise, simulate_dynamic, simulate_stop_loss, ExercisePolicy, HedgeAction,
    HedgeStep, HedgeTrace, Move, Path, Rounding,
};
pub use lattice::{calibrate, node_price, ExerciseStyle, MarketSpec, NodeIndex, OptionKind, StepParams};
pub use pricer::{exercise_boundary, intrinsic_payoff, price, price_root, replication, ValueSurface};
