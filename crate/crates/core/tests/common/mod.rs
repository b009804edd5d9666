//! Reference computations written independently of the library code paths.
#![allow(dead_code)]

use amhedge::OptionKind;

/// Optimal-stopping value by exhaustive recursion over every price history
/// of a non-recombining tree. Stock prices are built by repeated
/// multiplication along each history, and the stopping decision is taken
/// separately at every history node.
pub fn brute_force_value(
    s0: f64,
    strike: f64,
    steps: usize,
    down: f64,
    up: f64,
    rate: f64,
    kind: OptionKind,
    american: bool,
) -> f64 {
    let p = (rate - down) / (up - down);
    fn go(
        s: f64,
        remaining: usize,
        ctx: &(f64, f64, f64, f64, f64, OptionKind, bool),
    ) -> f64 {
        let (strike, down, up, rate, p, kind, american) = *ctx;
        let exercise = match kind {
            OptionKind::Call => (s - strike).max(0.0),
            OptionKind::Put => (strike - s).max(0.0),
        };
        if remaining == 0 {
            return exercise;
        }
        let hold = (p * go(s * (1.0 + up), remaining - 1, ctx)
            + (1.0 - p) * go(s * (1.0 + down), remaining - 1, ctx))
            / (1.0 + rate);
        if american && exercise > hold {
            exercise
        } else {
            hold
        }
    }
    go(s0, steps, &(strike, down, up, rate, p, kind, american))
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Discounted expected call payoff under the lognormal terminal law,
/// integrated over the standard-normal driver.
pub fn quadrature_call(spot: f64, strike: f64, sigma: f64, rate: f64, maturity: f64) -> f64 {
    let vol = sigma * maturity.sqrt();
    let drift = (rate - 0.5 * sigma * sigma) * maturity;
    let z0 = ((strike / spot).ln() - drift) / vol;
    let payoff = |z: f64| (spot * (drift + vol * z).exp() - strike).max(0.0) * std_normal_pdf(z);
    (-rate * maturity).exp() * adaptive_simpson(&payoff, z0, z0.max(0.0) + 14.0, 1e-12)
}

/// Deterministic parameter stream for randomized sweeps.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = (self.0 >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform(0.0, n as f64) as usize).min(n - 1)
    }
}

/// A random viable lattice `(down, up, rate)` with `down < rate < up`.
pub fn random_lattice(rng: &mut Lcg) -> (f64, f64, f64) {
    let down = rng.uniform(-0.5, -0.01);
    let up = rng.uniform(0.01, 0.6);
    let rate = rng.uniform(0.0, up.min(0.1) * 0.95);
    (down, up, rate)
}

pub fn rel_close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(floor)
}
