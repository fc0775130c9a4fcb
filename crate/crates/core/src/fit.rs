//! Least-squares slope fits for ladder diagnostics.

use crate::Real;

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn slope<F: Real>(xs: &[F], ys: &[F]) -> Option<F> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = F::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<F>() / n;
    let my = ys.iter().copied().sum::<F>() / n;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx > F::zero() {
        Some(sxy / sxx)
    } else {
        None
    }
}

/// Slope of `log y` against `log x`; `None` when any value is non-positive.
pub(crate) fn log_log_slope<F: Real>(xs: &[F], ys: &[F]) -> Option<F> {
    if xs.iter().any(|&x| !(x > F::zero())) || ys.iter().any(|&y| !(y > F::zero())) {
        return None;
    }
    let lx: Vec<F> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<F> = ys.iter().map(|&y| y.ln()).collect();
    slope(&lx, &ly)
}
