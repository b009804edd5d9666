//! Order-independent sample statistics.
//!
//! Sums are accumulated with Shewchuk's non-overlapping partials, so the
//! result is the correctly rounded sum whatever order the terms arrive in.

/// Correctly rounded sum of `values`.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for i in 0..partials.len() {
            let mut y = partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    round_partials(&partials)
}

fn round_partials(partials: &[f64]) -> f64 {
    let Some((&last, rest)) = partials.split_last() else {
        return 0.0;
    };
    let mut hi = last;
    let mut lo = 0.0;
    let mut i = rest.len();
    while i > 0 {
        i -= 1;
        let x = hi;
        let y = rest[i];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    // half-way case: the remaining partials decide the rounding direction
    if i > 0 && ((lo < 0.0 && rest[i - 1] < 0.0) || (lo > 0.0 && rest[i - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Mean and unbiased variance. `None` with fewer than two samples.
pub fn mean_var(samples: &[f64]) -> Option<(f64, f64)> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean = exact_sum(samples.iter().copied()) / n;
    let ss = exact_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
    Some((mean, ss / (n - 1.0)))
}
