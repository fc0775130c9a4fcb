//! Logarithmic cutoff families for boundary layers.
//!
//! `chi_n` is the plain log-cutoff; `zeta_n` is its C^1 replacement built by
//! normalising the integral of a corrected derivative; `eta = 1 - zeta(d/r)`
//! regularises the indicator of the inner layer. The point of the family is
//! that applying the degenerate operator to `eta` costs only a factor
//! `1 / log n` against the natural singular weight, and that constant is
//! measurable.

use crate::error::{Error, Result};
use crate::field::CoefficientField;
use crate::geometry::{DomainSpec, LayerSpec};
use crate::quad;
use crate::Real;

/// Logarithmic cutoff: 0 on `[0, 1/n]`, `log(nu)/log n` on `(1/n, 1)`,
/// 1 from 1 on.
///
/// # Panics
/// Panics when `n < 2` or `u < 0`.
pub fn chi<F: Real>(n: u32, u: F) -> F {
    assert!(n >= 2, "log cutoff needs n >= 2");
    assert!(u >= F::zero(), "log cutoff argument must be nonnegative");
    let nf = F::of_usize(n as usize);
    if u * nf <= F::one() {
        F::zero()
    } else if u >= F::one() {
        F::one()
    } else {
        (nf * u).ln() / nf.ln()
    }
}

/// C^1 log-cutoff family member with cached normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Mollifier<F> {
    n: u32,
    r: F,
    log_n: F,
    norm: F,
}

impl<F: Real> Mollifier<F> {
    pub fn new(n: u32, r: F) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("mollifier index must be at least 3"));
        }
        if !(r > F::zero()) || !(r <= F::one()) {
            return Err(Error::invalid("mollifier layer width must lie in (0, 1]"));
        }
        let nf = F::of_usize(n as usize);
        let log_n = nf.ln();
        // N_n = 1 - (1 - 1/n) / log n, the integral of the corrected
        // derivative over [1/n, 1].
        let norm = F::one() - (F::one() - nf.recip()) / log_n;
        Ok(Mollifier { n, r, log_n, norm })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> F {
        self.r
    }

    /// Cached normalization constant, always in `[1 - 2/log n, 1]`.
    pub fn normalization(&self) -> F {
        self.norm
    }

    /// Cross-check of the normalization by graded quadrature of the
    /// corrected derivative.
    pub fn normalization_by_quadrature(&self) -> F {
        let nf = F::of_usize(self.n as usize);
        let inv_n = nf.recip();
        let l = self.log_n;
        let slope = F::of(2.0) / (l * (F::one() - inv_n));
        let f = move |u: F| F::of(2.0) * (nf * u).ln() / (l * l * u) - slope * (u - inv_n);
        quad::gl16_log_graded(f, inv_n, F::one(), 64)
    }

    /// `zeta_n(u)`: 0 below `1/n`, 1 above 1, C^1 in between.
    pub fn zeta(&self, u: F) -> F {
        let nf = F::of_usize(self.n as usize);
        if u * nf <= F::one() {
            return F::zero();
        }
        if u >= F::one() {
            return F::one();
        }
        let l = self.log_n;
        let x = (nf * u).ln() / l;
        let y = u - nf.recip();
        (x * x - y * y / ((F::one() - nf.recip()) * l)) / self.norm
    }

    /// `zeta_n'(u)`, zero outside `(1/n, 1)`.
    pub fn zeta_prime(&self, u: F) -> F {
        let nf = F::of_usize(self.n as usize);
        if u * nf <= F::one() || u >= F::one() {
            return F::zero();
        }
        self.zeta_prime_closed(u)
    }

    /// `zeta_n''(u)` on the open interval `(1/n, 1)`, zero outside.
    pub fn zeta_double_prime(&self, u: F) -> F {
        let nf = F::of_usize(self.n as usize);
        if u * nf <= F::one() || u >= F::one() {
            return F::zero();
        }
        self.zeta_double_prime_closed(u)
    }

    fn zeta_prime_closed(&self, u: F) -> F {
        let nf = F::of_usize(self.n as usize);
        let l = self.log_n;
        let a = F::of(2.0) * (nf * u).ln() / (l * l * u);
        let b = F::of(2.0) * (u - nf.recip()) / ((F::one() - nf.recip()) * l);
        (a - b) / self.norm
    }

    fn zeta_double_prime_closed(&self, u: F) -> F {
        let nf = F::of_usize(self.n as usize);
        let l = self.log_n;
        let a = F::of(2.0) * (F::one() - (nf * u).ln()) / (l * l * u * u);
        let b = F::of(2.0) / ((F::one() - nf.recip()) * l);
        (a - b) / self.norm
    }

    /// Regularised indicator of the inner layer: `1 - zeta(d(x) / r)`.
    pub fn eta(&self, spec: &DomainSpec<F>, x: &[F]) -> Result<F> {
        let d = spec.distance(x)?;
        Ok(F::one() - self.zeta(d / self.r))
    }

    /// Derivative of `eta` along the distance gradient.
    pub fn eta_normal_derivative(&self, spec: &DomainSpec<F>, x: &[F]) -> Result<F> {
        let d = spec.distance(x)?;
        Ok(-self.zeta_prime(d / self.r) / self.r)
    }

    /// Pointwise value of the operator applied to `eta`:
    /// `H eta = zeta''(d/r) (grad d . C grad d) / r^2
    ///        + zeta'(d/r) [(div C) . grad d + tr(C D^2 d)] / r`.
    pub fn h_eta(
        &self,
        field: &CoefficientField<F>,
        spec: &DomainSpec<F>,
        x: &[F],
    ) -> Result<F> {
        let d = spec.distance(x)?;
        let u = d / self.r;
        let zp = self.zeta_prime(u);
        let zpp = self.zeta_double_prime(u);
        if zp == F::zero() && zpp == F::zero() {
            return Ok(F::zero());
        }
        let g = spec.grad_distance(x)?;
        let c = field.eval_c(spec, x)?;
        let quad_term = zpp * c.quad(&g) / (self.r * self.r);
        let hess = spec.hessian(x)?;
        let trace_term = c.frobenius_inner(&hess);
        let div_term = field.div_dot_grad(spec, x)?;
        Ok(quad_term + zp * (div_term + trace_term) / self.r)
    }

    /// Measures the constant in the layer bound
    /// `|H eta| <= c (log n)^-1 a d^(delta - 2)` and assembles the
    /// theoretical three-term counterpart from the comparability constants.
    pub fn h_eta_bound(
        &self,
        field: &CoefficientField<F>,
        spec: &DomainSpec<F>,
        layer: &LayerSpec<F>,
        samples: usize,
    ) -> Result<HEtaBound<F>> {
        if field.perturbation.is_some()
            && matches!(spec, DomainSpec::ConvexExteriorProduct { .. })
        {
            return Err(Error::NotApplicable(
                "matrix-valued fields over the product obstacle lack a usable trace bound".into(),
            ));
        }
        if layer.r != self.r {
            return Err(Error::invalid("layer width differs from the mollifier layer"));
        }
        let comp = field.comparability(spec, layer, samples)?;
        let mut weighted_sup = F::zero();
        let two = F::of(2.0);
        for x in spec.sample_layer(layer, samples)? {
            let hv = self.h_eta(field, spec, &x)?;
            let d = spec.distance(&x)?;
            let a = field.a_value(spec, &x)?;
            weighted_sup = weighted_sup.max(hv.abs() * d.powf(two - field.delta) / a);
        }
        let alpha = self.derivative_bound_constant(2_000);
        let gap1 = spec.codimension_gap() - F::one();
        let c_assembled = alpha
            * (comp.tau_r + comp.tau_r * (gap1 + comp.gamma * layer.r) + comp.rho_r);
        Ok(HEtaBound {
            c_measured: weighted_sup * self.log_n,
            weighted_sup,
            c_assembled,
            alpha,
            n: self.n,
            r: self.r,
        })
    }

    /// Smallest constant `alpha` with `|zeta'| <= alpha / (u log n)` and
    /// `|zeta''| <= alpha / (u^2 log n)`, measured on a grid over the
    /// closed support `[1/n, 1]`.
    ///
    /// Both suprema are attained at the one-sided limits `u -> 1/n` and
    /// `u -> 1`, so the grid includes the endpoints via the closed forms.
    pub fn derivative_bound_constant(&self, grid_points: usize) -> F {
        let nf = F::of_usize(self.n as usize);
        let lo = nf.recip();
        let width = F::one() - lo;
        let l = self.log_n;
        let mut alpha = F::zero();
        for j in 0..=grid_points {
            let u = lo + width * F::of_usize(j) / F::of_usize(grid_points);
            let first = self.zeta_prime_closed(u).abs() * u * l;
            let second = self.zeta_double_prime_closed(u).abs() * u * u * l;
            alpha = alpha.max(first).max(second);
        }
        alpha
    }
}

/// Measured and assembled constants for the layer-cutoff operator bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEtaBound<F> {
    /// Smallest `c` with `|H eta| <= c (log n)^-1 a d^(delta-2)` on the
    /// sampled layer.
    pub c_measured: F,
    /// Same supremum without the `1 / log n` normalization.
    pub weighted_sup: F,
    /// Three-term assembly `alpha (tau + tau (d - d_H - 1 + gamma r) + rho)`.
    pub c_assembled: F,
    /// Derivative-bound constant used in the assembly.
    pub alpha: F,
    pub n: u32,
    pub r: F,
}
