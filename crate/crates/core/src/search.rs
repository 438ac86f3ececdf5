//! One-dimensional minimization on a closed interval.
//!
//! A coarse pre-scan locates the basin; golden-section search refines it when
//! the scan looks unimodal, otherwise a fine grid picks the basin first.
//! Non-finite values mark points outside the domain.

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const PRESCAN_POINTS: usize = 33;
const FALLBACK_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn scan<F: Fn(f64) -> f64>(fun: &F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let x = if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            (x, finite_or_inf(fun(x)))
        })
        .collect()
}

/// Index of the first minimum; ties keep the smaller abscissa.
fn argmin(points: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.1 < points[best].1 {
            best = i;
        }
    }
    best
}

fn is_unimodal(points: &[(f64, f64)], at: usize) -> bool {
    points[..=at].windows(2).all(|w| w[1].1 <= w[0].1) && points[at..].windows(2).all(|w| w[1].1 >= w[0].1)
}

/// Golden-section search on `[a, b]`, assuming a single basin. The bracket
/// endpoints are compared against the interior result so boundary minima are
/// returned exactly.
pub fn golden_section<F: Fn(f64) -> f64>(fun: &F, a: f64, b: f64, xtol: f64) -> Minimum {
    let f = |x: f64| finite_or_inf(fun(x));
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = Minimum { x: a, value: f(a) };
    for x in [mid, b] {
        let v = f(x);
        if v < best.value {
            best = Minimum { x, value: v };
        }
    }
    best
}

/// Global-ish minimum of `fun` on `[lo, hi]`. Returns `None` if every probed
/// point is outside the domain.
pub fn minimize_on_interval<F: Fn(f64) -> f64>(fun: &F, lo: f64, hi: f64, xtol: f64) -> Option<Minimum> {
    let coarse = scan(fun, lo, hi, PRESCAN_POINTS);
    let mut at = argmin(&coarse);
    let mut points = coarse;
    if !is_unimodal(&points, at) {
        points = scan(fun, lo, hi, FALLBACK_POINTS);
        at = argmin(&points);
    }
    if !points[at].1.is_finite() {
        return None;
    }
    let a = points[at.saturating_sub(1)].0;
    let b = points[(at + 1).min(points.len() - 1)].0;
    let refined = golden_section(fun, a, b, xtol);
    Some(if refined.value <= points[at].1 {
        refined
    } else {
        Minimum {
            x: points[at].0,
            value: points[at].1,
        }
    })
}
