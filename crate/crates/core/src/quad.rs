//! Adaptive Simpson quadrature with tail extension for improper integrals.

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Integrates `f` over `[a, +inf)` by summing doubling panels until three
/// consecutive panels contribute less than `tol` each. Returns `None` when
/// the panels fail to die out (non-integrable tail).
pub fn integrate_upper_tail<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, tol: f64) -> Option<f64> {
    let mut total = 0.0;
    let mut left = a;
    let mut width = 1.0f64.max(a.abs() * 0.125);
    let mut quiet = 0;
    for _ in 0..96 {
        let right = left + width;
        let piece = integrate(f, left, right, tol * 0.25);
        total += piece;
        if piece.abs() < tol {
            quiet += 1;
            if quiet >= 3 {
                return Some(total);
            }
        } else {
            quiet = 0;
        }
        left = right;
        width *= 2.0;
    }
    None
}

/// Integrates `f` over `(-inf, b]`; mirror of [`integrate_upper_tail`].
pub fn integrate_lower_tail<F: Fn(f64) -> f64 + ?Sized>(f: &F, b: f64, tol: f64) -> Option<f64> {
    integrate_upper_tail(&|x| f(-x), -b, tol)
}
