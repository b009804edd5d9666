//! Backward-induction valuation over the recombining lattice.
//!
//! Each interior node stores the discounted risk-neutral continuation
//!
//! ```text
//! f(n, j) = (p * P(n+1, j+1) + (1 - p) * P(n+1, j)) / (1 + r)
//! ```
//!
//! and American exercise takes `P(n, j) = max(Z(n, j), f(n, j))` with `Z` the
//! intrinsic payoff. European exercise keeps `P = f`.
//!
//! Replication: holding `delta` shares and `bond` in the bank at a node must
//! pay the option value in both successors,
//!
//! ```text
//! delta * S * (1 + a) + bond * (1 + r) = C_a   (down successor)
//! delta * S * (1 + b) + bond * (1 + r) = C_b   (up successor)
//! ```
//!
//! which gives `delta = (C_b - C_a) / ((b - a) S)` and
//! `bond = ((1 + b) C_a - (1 + a) C_b) / ((b - a)(1 + r))`. The bond is a
//! present amount, so it carries the `1 / (1 + r)` discount and no `1 / S`.
//! On the three-step example it gives -29.3013 at the root, which is the
//! -29.3005 borrowing figure up to rounding delta to three decimals.

use std::io::{Read, Write};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{node_price, ExerciseStyle, MarketSpec, NodeIndex, OptionKind, StepParams};

/// Immediate-exercise payoff.
pub fn intrinsic_payoff(spot: f64, strike: f64, kind: OptionKind) -> f64 {
    match kind {
        OptionKind::Call => (spot - strike).max(0.0),
        OptionKind::Put => (strike - spot).max(0.0),
    }
}

/// Row-major storage for a triangle with layers `0..layers`, layer `n`
/// holding `n + 1` entries.
#[derive(Debug, Clone, PartialEq)]
struct Triangle<T> {
    layers: usize,
    data: Vec<T>,
}

impl<T: Clone> Triangle<T> {
    fn filled(layers: usize, value: T) -> Self {
        Triangle {
            layers,
            data: vec![value; layers * (layers + 1) / 2],
        }
    }

    fn offset(&self, idx: NodeIndex) -> usize {
        assert!(
            idx.step < self.layers && idx.ups <= idx.step,
            "node ({}, {}) outside triangle with {} layers",
            idx.step,
            idx.ups,
            self.layers
        );
        idx.step * (idx.step + 1) / 2 + idx.ups
    }

    fn get(&self, idx: NodeIndex) -> &T {
        &self.data[self.offset(idx)]
    }

    fn set(&mut self, idx: NodeIndex, value: T) {
        let i = self.offset(idx);
        self.data[i] = value;
    }
}

/// Every node of a priced lattice.
///
/// `values`, `intrinsic`, `stock` and `exercise` cover steps `0..=N`;
/// `continuation`, `delta` and `bond` cover the interior steps `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSurface {
    s0: f64,
    strike: f64,
    kind: OptionKind,
    style: ExerciseStyle,
    params: StepParams,
    stock: Triangle<f64>,
    values: Triangle<f64>,
    intrinsic: Triangle<f64>,
    continuation: Triangle<f64>,
    exercise: Triangle<bool>,
    delta: Triangle<f64>,
    bond: Triangle<f64>,
}

impl ValueSurface {
    pub fn params(&self) -> &StepParams {
        &self.params
    }

    pub fn steps(&self) -> usize {
        self.params.steps()
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn kind(&self) -> OptionKind {
        self.kind
    }

    pub fn style(&self) -> ExerciseStyle {
        self.style
    }

    /// Model price at the root.
    pub fn root_value(&self) -> f64 {
        *self.values.get(NodeIndex::ROOT)
    }

    pub fn stock(&self, idx: NodeIndex) -> f64 {
        *self.stock.get(idx)
    }

    pub fn value(&self, idx: NodeIndex) -> f64 {
        *self.values.get(idx)
    }

    pub fn intrinsic(&self, idx: NodeIndex) -> f64 {
        *self.intrinsic.get(idx)
    }

    /// Discounted continuation value; `None` on the terminal layer.
    pub fn continuation(&self, idx: NodeIndex) -> Option<f64> {
        (idx.step < self.steps()).then(|| *self.continuation.get(idx))
    }

    /// Exercise flag. Interior nodes are flagged when exercising is at least
    /// as good as continuing and pays something; terminal nodes are flagged
    /// when in the money. European surfaces are never flagged.
    pub fn exercise_flag(&self, idx: NodeIndex) -> bool {
        *self.exercise.get(idx)
    }

    /// Shares held per written option at an interior node.
    pub fn delta(&self, idx: NodeIndex) -> Option<f64> {
        (idx.step < self.steps()).then(|| *self.delta.get(idx))
    }

    /// Bank position of the replicating portfolio at an interior node.
    pub fn bond(&self, idx: NodeIndex) -> Option<f64> {
        (idx.step < self.steps()).then(|| *self.bond.get(idx))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeIndex> {
        let steps = self.steps();
        (0..=steps).flat_map(|step| (0..=step).map(move |ups| NodeIndex { step, ups }))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for idx in self.nodes() {
            csv.serialize(SurfaceRow {
                step: idx.step,
                ups: idx.ups,
                stock: self.stock(idx),
                intrinsic: self.intrinsic(idx),
                continuation: self.continuation(idx),
                value: self.value(idx),
                exercise: self.exercise_flag(idx),
                delta: self.delta(idx),
                bond: self.bond(idx),
            })?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// One node of an exported [`ValueSurface`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub step: usize,
    pub ups: usize,
    pub stock: f64,
    pub intrinsic: f64,
    pub continuation: Option<f64>,
    pub value: f64,
    pub exercise: bool,
    pub delta: Option<f64>,
    pub bond: Option<f64>,
}

pub fn read_surface_csv<R: Read>(reader: R) -> Result<Vec<SurfaceRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    csv.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Replicating `(delta, bond)` at an interior node, solved from the two
/// successor values.
pub fn replication(surface: &ValueSurface, idx: NodeIndex) -> (f64, f64) {
    let p = surface.params();
    assert!(idx.step < p.steps(), "replication undefined on the terminal layer");
    let spot = surface.stock(idx);
    let c_up = surface.value(idx.up_child());
    let c_down = surface.value(idx.down_child());
    let spread = p.up() - p.down();
    let delta = (c_up - c_down) / (spread * spot);
    let bond = (p.up_factor() * c_down - p.down_factor() * c_up) / (spread * p.growth());
    (delta, bond)
}

/// Prices the option over the whole lattice.
///
/// `params` may come from [`calibrate`](crate::lattice::calibrate) or be
/// built directly; only `market.s0`, `strike`, `kind` and `style` are read.
pub fn price(market: &MarketSpec, params: &StepParams) -> Result<ValueSurface> {
    let p_up = params.p_up();
    if !(p_up > 0.0 && p_up < 1.0) {
        return Err(Error::Arbitrage {
            a: params.down(),
            r: params.rate(),
            b: params.up(),
        });
    }
    if !(market.s0 > 0.0) || !(market.strike >= 0.0) {
        return Err(Error::InvalidMarket {
            name: "s0/k",
            value: market.s0,
            reason: "spot must be positive and strike non-negative",
        });
    }
    let n = params.steps();
    let american = market.style == ExerciseStyle::American;
    let mut surface = ValueSurface {
        s0: market.s0,
        strike: market.strike,
        kind: market.kind,
        style: market.style,
        params: *params,
        stock: Triangle::filled(n + 1, 0.0),
        values: Triangle::filled(n + 1, 0.0),
        intrinsic: Triangle::filled(n + 1, 0.0),
        continuation: Triangle::filled(n, 0.0),
        exercise: Triangle::filled(n + 1, false),
        delta: Triangle::filled(n, 0.0),
        bond: Triangle::filled(n, 0.0),
    };

    for step in 0..=n {
        for ups in 0..=step {
            let idx = NodeIndex { step, ups };
            let spot = node_price(market.s0, params, idx);
            surface.stock.set(idx, spot);
            surface.intrinsic.set(idx, intrinsic_payoff(spot, market.strike, market.kind));
        }
    }

    for ups in 0..=n {
        let idx = NodeIndex { step: n, ups };
        let z = surface.intrinsic(idx);
        surface.values.set(idx, z);
        surface.exercise.set(idx, american && z > 0.0);
    }

    let discount = 1.0 / params.growth();
    for step in (0..n).rev() {
        for ups in 0..=step {
            let idx = NodeIndex { step, ups };
            let cont = discount
                * (p_up * surface.value(idx.up_child())
                    + (1.0 - p_up) * surface.value(idx.down_child()));
            let z = surface.intrinsic(idx);
            surface.continuation.set(idx, cont);
            let (value, exercise) = if american {
                (z.max(cont), z >= cont && z > 0.0)
            } else {
                (cont, false)
            };
            surface.values.set(idx, value);
            surface.exercise.set(idx, exercise);

            let (delta, bond) = replication(&surface, idx);
            surface.delta.set(idx, delta);
            surface.bond.set(idx, bond);
        }
    }

    Ok(surface)
}

/// Root value only, using a single rolling layer of `N + 1` values.
pub fn price_root(market: &MarketSpec, params: &StepParams) -> Result<f64> {
    let p_up = params.p_up();
    if !(p_up > 0.0 && p_up < 1.0) {
        return Err(Error::Arbitrage {
            a: params.down(),
            r: params.rate(),
            b: params.up(),
        });
    }
    let n = params.steps();
    let american = market.style == ExerciseStyle::American;
    let payoff = |idx| intrinsic_payoff(node_price(market.s0, params, idx), market.strike, market.kind);
    let mut layer: Vec<f64> = (0..=n).map(|ups| payoff(NodeIndex { step: n, ups })).collect();
    let discount = 1.0 / params.growth();
    for step in (0..n).rev() {
        for ups in 0..=step {
            let cont = discount * (p_up * layer[ups + 1] + (1.0 - p_up) * layer[ups]);
            layer[ups] = if american {
                payoff(NodeIndex { step, ups }).max(cont)
            } else {
                cont
            };
        }
    }
    Ok(layer[0])
}

/// Flagged `ups` indices of one step, as contiguous ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryLayer {
    pub step: usize,
    pub ranges: Vec<RangeInclusive<usize>>,
}

impl BoundaryLayer {
    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Early-exercise region of a priced surface, one entry per step `0..=N`.
pub fn exercise_boundary(surface: &ValueSurface) -> Vec<BoundaryLayer> {
    (0..=surface.steps())
        .map(|step| {
            let mut ranges: Vec<RangeInclusive<usize>> = Vec::new();
            for ups in 0..=step {
                if !surface.exercise_flag(NodeIndex { step, ups }) {
                    continue;
                }
                match ranges.last_mut() {
                    Some(last) if *last.end() + 1 == ups => *last = *last.start()..=ups,
                    _ => ranges.push(ups..=ups),
                }
            }
            BoundaryLayer { step, ranges }
        })
        .collect()
}
