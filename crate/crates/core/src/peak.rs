//! One-dimensional peak location in time: coarse scan plus golden-section
//! refinement.

/// Default coarse scan step, in time units.
pub const SCAN_STEP: f64 = 0.05;
/// Golden-section stopping width, in time units.
pub const REFINE_TOLERANCE: f64 = 1e-8;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]`; returns `(t, f(t))`.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    let ft = f(t);
    // the bracket midpoint can be marginally worse than the best probe
    [(t, ft), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((t, ft), |best, c| if c.1 > best.1 { c } else { best })
}

fn scan(f: &impl Fn(f64) -> f64, end: f64, step: f64) -> (Vec<f64>, Vec<f64>) {
    let count = (end / step).ceil() as usize;
    let times: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(end)).collect();
    let values = times.iter().map(|&t| f(t)).collect();
    (times, values)
}

/// First local maximum of `f` on `[0, end]` whose value exceeds `threshold`.
pub fn first_local_max(
    f: impl Fn(f64) -> f64,
    end: f64,
    step: f64,
    threshold: f64,
) -> Option<(f64, f64)> {
    let (times, values) = scan(&f, end, step);
    (1..values.len().saturating_sub(1))
        .find(|&i| values[i] > threshold && values[i] >= values[i - 1] && values[i] > values[i + 1])
        .map(|i| golden_section_max(&f, times[i - 1], times[i + 1], REFINE_TOLERANCE))
}

/// Global maximum of `f` on `[0, end]`, to scan resolution then refined.
pub fn global_max(f: impl Fn(f64) -> f64, end: f64, step: f64) -> (f64, f64) {
    let (times, values) = scan(&f, end, step);
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let lo = times[best.saturating_sub(1)];
    let hi = times[(best + 1).min(times.len() - 1)];
    if hi <= lo {
        return (times[best], values[best]);
    }
    let refined = golden_section_max(&f, lo, hi, REFINE_TOLERANCE);
    if refined.1 >= values[best] {
        refined
    } else {
        (times[best], values[best])
    }
}
