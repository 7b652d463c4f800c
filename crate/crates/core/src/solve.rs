//! Safeguarded root finding for continuous, strictly decreasing functions.

/// Finds the zero of a decreasing function `f` on the bracket `[lo, hi]`,
/// with `f(lo) >= 0 >= f(hi)`.
///
/// Bisection keeps the bracket valid at every step; once the bracket is
/// reasonably tight, Newton steps using `df` (which must return the
/// one-sided derivative, strictly negative on the bracket) take over and are
/// rejected whenever they leave the bracket. Terminates when the step or
/// bracket width falls below `tol * (1 + |m|)` or the residual underflows.
pub fn decreasing_root<F, D>(f: F, df: D, lo: f64, hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    let mut lo = lo;
    let mut hi = hi;
    if lo == hi {
        return lo;
    }
    // Coarse bisection so Newton starts near the root.
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut m = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
        let d = df(m);
        let newton = m - fm / d;
        let next = if d < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - m).abs();
        m = next;
        if step <= 0.1 * tol * (1.0 + m.abs()) || hi - lo <= 0.1 * tol * (1.0 + m.abs()) {
            // One polishing step; for piecewise-linear targets this lands on
            // the root to machine precision.
            let fm = f(m);
            let d = df(m);
            if d < 0.0 {
                let polished = m - fm / d;
                if polished >= lo && polished <= hi {
                    m = polished;
                }
            }
            return m;
        }
    }
    m
}

/// Expands `[center - step, center + step]` by doubling until `f` changes
/// sign (`f` decreasing). Returns the bracket, or `None` after `max_doublings`.
pub fn expanding_bracket<F>(
    f: F,
    center: f64,
    initial_step: f64,
    max_doublings: usize,
) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut step = initial_step.max(f64::MIN_POSITIVE);
    let mut lo = center - step;
    let mut hi = center + step;
    for _ in 0..max_doublings {
        let flo = f(lo);
        let fhi = f(hi);
        if flo >= 0.0 && fhi <= 0.0 {
            return Some((lo, hi));
        }
        step *= 2.0;
        if flo < 0.0 {
            hi = lo;
            lo -= step;
        } else {
            lo = hi;
            hi += step;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_root_of_linear() {
        let root = decreasing_root(|m| 3.0 - m, |_| -1.0, -10.0, 10.0, 1e-12);
        assert!((root - 3.0).abs() < 1e-12);
    }

    #[test]
    fn finds_root_of_kinked_curve() {
        // piecewise linear with a kink at 1
        let f = |m: f64| if m < 1.0 { 2.0 - m } else { 3.0 - 2.0 * m };
        let df = |m: f64| if m < 1.0 { -1.0 } else { -2.0 };
        let root = decreasing_root(f, df, -5.0, 5.0, 1e-12);
        assert!((root - 1.5).abs() < 1e-12);
    }

    #[test]
    fn bracket_expands_to_enclose() {
        let f = |m: f64| 1000.0 - m;
        let (lo, hi) = expanding_bracket(f, 0.0, 1.0, 60).unwrap();
        assert!(f(lo) >= 0.0 && f(hi) <= 0.0);
        assert!(lo <= 1000.0 && 1000.0 <= hi);
    }

    #[test]
    fn bracket_gives_up() {
        assert!(expanding_bracket(|_| 1.0, 0.0, 1.0, 20).is_none());
    }
}
