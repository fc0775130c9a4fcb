//! Deterministic low-discrepancy sampling.
//!
//! All measurement loops (trace bounds, condition suprema, comparability
//! constants) draw their sample points from Halton sequences, so repeated
//! runs produce bit-identical results without any random state.

use crate::Real;

/// First twelve primes, used as Halton bases. Base 2 is reserved for range
/// parameters; directions consume the odd-indexed bases pairwise.
pub const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Maximum ambient dimension the direction sampler supports.
pub const MAX_DIM: usize = 10;

/// Radical-inverse (van der Corput) value of `i` in the given base.
///
/// Returns a value in `[0, 1)`; for `i >= 1` the value is strictly positive.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let b = base as f64;
    let mut scale = 1.0 / b;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * scale;
        i /= base;
        scale /= b;
    }
    x
}

/// Strictly positive low-discrepancy value in `(0, 1)` for sample `i`.
pub fn unit_range(i: u64) -> f64 {
    radical_inverse(i + 1, 2)
}

/// Secondary range value, independent of [`unit_range`].
pub fn unit_range_alt(i: u64) -> f64 {
    radical_inverse(i + 1, 3)
}

/// Deterministic unit vector in `dim` dimensions for sample `i`.
///
/// Gaussian components are produced by the Box-Muller map applied to Halton
/// pairs and then normalised. Degenerate draws (vanishing norm) cannot occur
/// for the bases used, but are guarded by re-salting the index.
///
/// # Panics
/// Panics if `dim == 0` or `dim > MAX_DIM`.
pub fn unit_vector<F: Real>(i: u64, dim: usize) -> Vec<F> {
    assert!((1..=MAX_DIM).contains(&dim), "direction dimension out of range");
    if dim == 1 {
        // Alternate sign deterministically.
        let s = if radical_inverse(i + 1, 5) < 0.5 { -1.0 } else { 1.0 };
        return vec![F::of(s)];
    }
    let mut salt = 0u64;
    loop {
        let idx = i + 1 + salt * 0x9e37;
        let mut v = vec![0.0f64; dim];
        let pairs = dim.div_ceil(2);
        for p in 0..pairs {
            let u1 = radical_inverse(idx, PRIMES[1 + 2 * p]).max(1e-17);
            let u2 = radical_inverse(idx, PRIMES[2 + 2 * p]);
            let mag = (-2.0 * u1.ln()).sqrt();
            let ang = 2.0 * std::f64::consts::PI * u2;
            v[2 * p] = mag * ang.cos();
            if 2 * p + 1 < dim {
                v[2 * p + 1] = mag * ang.sin();
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| F::of(x / norm)).collect();
        }
        salt += 1;
    }
}
