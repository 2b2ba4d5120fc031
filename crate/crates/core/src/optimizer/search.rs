//! One-dimensional global search: dense grid, then golden-section polish.

use crate::scalar::Real;

const MAX_GOLDEN_ITERS: usize = 200;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_GOLDEN_ITERS {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `f` over `[lo, hi]` by evaluating `points` grid nodes and
/// polishing the best one with golden-section search inside its two
/// neighbouring cells. With `periodic`, `hi` is identified with `lo` and the
/// grid omits it.
///
/// Returns `None` when `f` is non-finite at every node.
pub fn grid_then_golden<T: Real, F: Fn(T) -> T>(
    f: F,
    lo: T,
    hi: T,
    points: usize,
    periodic: bool,
    tol: T,
) -> Option<(T, T)> {
    let points = points.max(2);
    let span = hi - lo;
    let step = if periodic {
        span / T::of(points as f64)
    } else {
        span / T::of((points - 1) as f64)
    };
    let mut best: Option<(T, T)> = None;
    for i in 0..points {
        let x = if !periodic && i == points - 1 {
            hi
        } else {
            lo + step * T::of(i as f64)
        };
        let fx = f(x);
        if fx.is_finite() && best.is_none_or(|(_, fb)| fx < fb) {
            best = Some((x, fx));
        }
    }
    let (x0, f0) = best?;
    let (a, b) = if periodic {
        (x0 - step, x0 + step)
    } else {
        ((x0 - step).max(lo), (x0 + step).min(hi))
    };
    let (x1, f1) = golden_section(&f, a, b, tol);
    Some(if f1 < f0 { (x1, f1) } else { (x0, f0) })
}
