//! Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.
//!
//! The singular endpoint runs integrate toward a coefficient degeneracy, so
//! the controller reports a stall (instead of looping on vanishing steps)
//! with the coordinate it reached.

use crate::error::{Error, Result};
use crate::Real;

/// Tolerances and step limits for one integration.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<F> {
    pub rtol: F,
    pub atol: F,
    pub max_steps: usize,
}

impl<F: Real> Default for Dopri5<F> {
    fn default() -> Self {
        Dopri5 { rtol: F::of(1e-10), atol: F::of(1e-12), max_steps: 2_000_000 }
    }
}

impl<F: Real> Dopri5<F> {
    pub fn with_rtol(rtol: F) -> Self {
        Dopri5 { rtol, ..Self::default() }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction) and
    /// returns the state at `t1`.
    pub fn solve<const N: usize>(
        &self,
        mut f: impl FnMut(F, &[F; N]) -> [F; N],
        t0: F,
        t1: F,
        y0: [F; N],
    ) -> Result<[F; N]> {
        if t0 == t1 {
            return Ok(y0);
        }
        let span = t1 - t0;
        let dir = span.signum();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = span * F::of(1e-4);
        let h_min = span.abs() * F::of(1e-14);

        let c = DOPRI_C.map(F::of);
        let a: [[F; 6]; 6] = DOPRI_A.map(|row| row.map(F::of));
        let e = DOPRI_E.map(F::of);

        for _ in 0..self.max_steps {
            if (t1 - t) * dir <= F::zero() {
                return Ok(y);
            }
            if h.abs() > (t1 - t).abs() {
                h = t1 - t;
            }
            if h.abs() < h_min {
                return Err(Error::IntegratorStall { reached: t.to_f64().unwrap_or(f64::NAN) });
            }

            let mut k = [[F::zero(); N]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let w = a[s - 1][j] * h;
                    for i in 0..N {
                        ys[i] += w * kj[i];
                    }
                }
                k[s] = f(t + c[s - 1] * h, &ys);
            }
            // Stage 7 is evaluated at the 5th-order solution (FSAL).
            let y_new = {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(6) {
                    let w = a[5][j] * h;
                    for i in 0..N {
                        ys[i] += w * kj[i];
                    }
                }
                ys
            };

            let mut err = F::zero();
            for i in 0..N {
                let mut e_i = F::zero();
                for (j, kj) in k.iter().enumerate() {
                    e_i += e[j] * kj[i];
                }
                e_i *= h;
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                let r = e_i / scale;
                err += r * r;
            }
            err = (err / F::of_usize(N)).sqrt();

            if !err.is_finite() {
                h *= F::of(0.25);
                continue;
            }
            if err <= F::one() {
                t += h;
                y = y_new;
                k1 = k[6];
            }
            let factor = if err > F::zero() {
                (F::of(0.9) * err.powf(F::of(-0.2))).min(F::of(5.0)).max(F::of(0.2))
            } else {
                F::of(5.0)
            };
            h *= factor;
        }
        Err(Error::NoConvergence {
            iterations: self.max_steps,
            residual: (t1 - t).abs().to_f64().unwrap_or(f64::NAN),
        })
    }
}

const DOPRI_C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const DOPRI_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Difference between the 5th- and embedded 4th-order weights.
const DOPRI_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];
