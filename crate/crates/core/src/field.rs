//! Coefficient fields that vanish like a power of the boundary distance.
//!
//! The field is `C(x) = a(x) d(x)^delta I`, optionally plus a bounded matrix
//! perturbation `B d(x)^(delta+gamma)`. All members have closed-form
//! divergences, which keeps the degeneracy-condition suprema free of
//! numerical differentiation error.

use crate::error::{Error, Result};
use crate::fit;
use crate::geometry::{DomainSpec, LayerSpec};
use crate::linalg::SymMat;
use crate::Real;

/// Scalar profile `a` in front of the degenerate power.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<F> {
    /// `a(x) = c`.
    Constant(F),
    /// `a(x) = p(d(x))` with `p` a polynomial in the boundary distance,
    /// lowest coefficient first.
    RadialPolynomial { coeffs: Vec<F> },
    /// `a(x) = base + amplitude * x_axis / |x|`, a zero-homogeneous profile;
    /// only meaningful on the punctured space, where its gradient is
    /// orthogonal to the distance gradient.
    Angular { base: F, amplitude: F, axis: usize },
}

impl<F: Real> Profile<F> {
    fn value(&self, spec: &DomainSpec<F>, x: &[F], d: F) -> Result<F> {
        match self {
            Profile::Constant(c) => Ok(*c),
            Profile::RadialPolynomial { coeffs } => Ok(horner(coeffs, d)),
            Profile::Angular { base, amplitude, axis } => {
                if !matches!(spec, DomainSpec::PuncturedSpace { .. }) {
                    return Err(Error::NotApplicable(
                        "angular profiles require the punctured space".into(),
                    ));
                }
                if *axis >= x.len() {
                    return Err(Error::invalid("angular profile axis out of range"));
                }
                Ok(*base + *amplitude * x[*axis] / d)
            }
        }
    }

    /// `grad a . grad d` in closed form. Zero for constant profiles and for
    /// angular profiles (whose gradient is tangential).
    fn grad_dot_distance_grad(&self, d: F) -> F {
        match self {
            Profile::Constant(_) | Profile::Angular { .. } => F::zero(),
            Profile::RadialPolynomial { coeffs } => horner_derivative(coeffs, d),
        }
    }

    /// `|grad a| / a` at the point.
    fn relative_gradient(&self, spec: &DomainSpec<F>, x: &[F], d: F) -> Result<F> {
        match self {
            Profile::Constant(_) => Ok(F::zero()),
            Profile::RadialPolynomial { coeffs } => {
                Ok((horner_derivative(coeffs, d) / horner(coeffs, d)).abs())
            }
            Profile::Angular { amplitude, axis, .. } => {
                let a = self.value(spec, x, d)?;
                let e = x[*axis] / d;
                let tangential = (F::one() - e * e).max(F::zero()).sqrt();
                Ok((*amplitude * tangential / (d * a)).abs())
            }
        }
    }
}

fn horner<F: Real>(coeffs: &[F], t: F) -> F {
    coeffs.iter().rev().fold(F::zero(), |acc, &c| acc * t + c)
}

fn horner_derivative<F: Real>(coeffs: &[F], t: F) -> F {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(F::zero(), |acc, (k, &c)| acc * t + c * F::of_usize(k))
}

/// Constant symmetric matrix entering the perturbation term.
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationMatrix<F> {
    Identity { scale: F },
    Diagonal { entries: Vec<F> },
}

impl<F: Real> PerturbationMatrix<F> {
    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            PerturbationMatrix::Identity { .. } => Ok(()),
            PerturbationMatrix::Diagonal { entries } if entries.len() == dim => Ok(()),
            _ => Err(Error::invalid("perturbation matrix dimension mismatch")),
        }
    }

    pub fn spectral_norm(&self) -> F {
        match self {
            PerturbationMatrix::Identity { scale } => scale.abs(),
            PerturbationMatrix::Diagonal { entries } => {
                entries.iter().fold(F::zero(), |m, &e| m.max(e.abs()))
            }
        }
    }

    /// `g . B g` for a unit vector `g`.
    fn quad(&self, g: &[F]) -> F {
        match self {
            PerturbationMatrix::Identity { scale } => *scale,
            PerturbationMatrix::Diagonal { entries } => {
                entries.iter().zip(g).map(|(&b, &gi)| b * gi * gi).sum()
            }
        }
    }

    fn add_to(&self, m: &mut SymMat<F>, factor: F) {
        match self {
            PerturbationMatrix::Identity { scale } => m.add_scaled_identity(*scale * factor),
            PerturbationMatrix::Diagonal { entries } => {
                for (i, &b) in entries.iter().enumerate() {
                    let v = m.get(i, i) + b * factor;
                    m.set_sym(i, i, v);
                }
            }
        }
    }
}

/// Perturbation `B d^(delta+gamma)` with constant `B` and `gamma > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation<F> {
    pub matrix: PerturbationMatrix<F>,
    pub gamma: F,
}

/// Degenerate coefficient field `a d^delta I (+ B d^(delta+gamma))`.
///
/// `mu`/`lambda` are the declared profile bounds, checked opportunistically
/// at every evaluation. `interior_floor` records the ellipticity level the
/// field is assumed to keep outside the unit boundary layer; it never alters
/// values inside the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField<F> {
    pub delta: F,
    pub profile: Profile<F>,
    pub mu: F,
    pub lambda: F,
    pub perturbation: Option<Perturbation<F>>,
    pub interior_floor: F,
}

/// Measured suprema of one degeneracy condition over a ladder of shrinking
/// layers, with the trend verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionLadder<F> {
    /// One supremum per ladder rung, in input order.
    pub sups: Vec<F>,
    /// Log-log slope of the supremum against the layer width, when defined.
    pub slope: Option<F>,
    pub holds: bool,
}

/// Report of the three degeneracy conditions.
///
/// * `deviation` - the normalized deviation `||C d^-delta - a I||` must have
///   infimum zero over shrinking layers.
/// * `divergence` - `|(div C) . grad d| d^(1-delta)` must stay bounded.
/// * `normalized_divergence` - `|(div (C d^-delta)) . grad d|` must stay
///   bounded; fails for perturbations vanishing slower than one extra power.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<F> {
    pub r_ladder: Vec<F>,
    pub deviation: ConditionLadder<F>,
    pub divergence: ConditionLadder<F>,
    pub normalized_divergence: ConditionLadder<F>,
}

impl<F: Real> ConditionReport<F> {
    /// All three conditions hold.
    pub fn all_hold(&self) -> bool {
        self.deviation.holds && self.divergence.holds && self.normalized_divergence.holds
    }

    /// Conditions required for the self-adjointness threshold (deviation
    /// vanishing plus bounded divergence).
    pub fn sufficiency_conditions_hold(&self) -> bool {
        self.deviation.holds && self.divergence.holds
    }

    /// Conditions required for the necessity argument (deviation vanishing
    /// plus bounded normalized divergence).
    pub fn necessity_conditions_hold(&self) -> bool {
        self.deviation.holds && self.normalized_divergence.holds
    }
}

/// Measured comparability and inequality constants on one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparabilityConstants<F> {
    /// Extremal Rayleigh-quotient bounds of `C` against `a d^delta`.
    pub sigma_r: F,
    pub tau_r: F,
    /// `tau_r / sigma_r`.
    pub upsilon_r: F,
    /// Measured constant in `|(div C) . grad d| <= rho_r a d^(delta-1)`.
    pub rho_r: F,
    /// Measured trace-bound constant of the layer geometry.
    pub gamma: F,
    /// Measured sup of `|grad a| / a`.
    pub gamma_a: F,
    /// `gamma + gamma_a`.
    pub c_a: F,
    /// First-order constant `(d - d_H) + delta - 2 - c_a r`.
    pub alpha_1r: F,
    /// Second-order constant; absent when `delta >= 2` or the first-order
    /// constant is dominated by the cross term.
    pub alpha_2r: Option<F>,
    pub r: F,
}

impl<F: Real> CoefficientField<F> {
    pub fn new(
        delta: F,
        profile: Profile<F>,
        mu: F,
        lambda: F,
        perturbation: Option<Perturbation<F>>,
        interior_floor: F,
    ) -> Result<Self> {
        if !(delta >= F::zero()) || !delta.is_finite() {
            return Err(Error::invalid("degeneracy exponent must be >= 0"));
        }
        if !(mu > F::zero()) || !(lambda >= mu) {
            return Err(Error::invalid("profile bounds need 0 < mu <= lambda"));
        }
        if !(interior_floor > F::zero()) {
            return Err(Error::invalid("interior floor must be positive"));
        }
        if let Some(p) = &perturbation {
            if !(p.gamma > F::zero()) {
                return Err(Error::invalid("perturbation exponent must be positive"));
            }
        }
        if let Profile::Constant(c) = profile {
            if c < mu || c > lambda {
                return Err(Error::invalid("constant profile outside declared bounds"));
            }
        }
        if let Profile::Angular { base, amplitude, .. } = profile {
            if !(base - amplitude.abs() > F::zero()) {
                return Err(Error::invalid("angular profile must stay positive"));
            }
        }
        Ok(CoefficientField { delta, profile, mu, lambda, perturbation, interior_floor })
    }

    /// Unperturbed field with constant profile: `C = a d^delta I`.
    pub fn exact(delta: F, a: F) -> Result<Self> {
        Self::new(delta, Profile::Constant(a), a, a, None, a)
    }

    /// Profile value with the declared-bound check.
    pub fn a_value(&self, spec: &DomainSpec<F>, x: &[F]) -> Result<F> {
        let d = spec.distance(x)?;
        let a = self.profile.value(spec, x, d)?;
        let slack = F::of(1e-9) * (self.mu + self.lambda);
        if a < self.mu - slack || a > self.lambda + slack {
            return Err(Error::invalid(format!(
                "profile value {a} violates declared bounds [{}, {}]",
                self.mu, self.lambda
            )));
        }
        Ok(a)
    }

    /// Pointwise coefficient matrix.
    pub fn eval_c(&self, spec: &DomainSpec<F>, x: &[F]) -> Result<SymMat<F>> {
        let d = spec.distance(x)?;
        let a = self.a_value(spec, x)?;
        let dim = spec.ambient_dim();
        let mut c = SymMat::scaled_identity(dim, a * d.powf(self.delta));
        if let Some(p) = &self.perturbation {
            p.matrix.check_dim(dim)?;
            p.matrix.add_to(&mut c, d.powf(self.delta + p.gamma));
        }
        if !(c.min_eigenvalue() > F::zero()) {
            return Err(Error::invalid(
                "perturbation destroys positive definiteness at the sampled point",
            ));
        }
        Ok(c)
    }

    /// `(div C) . grad d` times `d^(1-delta)`, in closed form.
    fn divergence_term(&self, spec: &DomainSpec<F>, x: &[F], d: F) -> Result<F> {
        let a = self.a_value(spec, x)?;
        let radial = self.profile.grad_dot_distance_grad(d);
        let mut v = radial * d + a * self.delta;
        if let Some(p) = &self.perturbation {
            let g = spec.grad_distance(x)?;
            v += (self.delta + p.gamma) * d.powf(p.gamma) * p.matrix.quad(&g);
        }
        Ok(v)
    }

    /// `(div C) . grad d`, in closed form.
    pub fn div_dot_grad(&self, spec: &DomainSpec<F>, x: &[F]) -> Result<F> {
        let d = spec.distance(x)?;
        Ok(self.divergence_term(spec, x, d)? * d.powf(self.delta - F::one()))
    }

    /// `(div (C d^-delta)) . grad d`, in closed form.
    fn normalized_divergence_term(&self, spec: &DomainSpec<F>, x: &[F], d: F) -> Result<F> {
        let mut v = self.profile.grad_dot_distance_grad(d);
        if let Some(p) = &self.perturbation {
            let g = spec.grad_distance(x)?;
            v += p.gamma * d.powf(p.gamma - F::one()) * p.matrix.quad(&g);
        }
        Ok(v)
    }

    /// Measures the three degeneracy-condition suprema on a ladder of
    /// shrinking layers and derives trend verdicts.
    ///
    /// Samples sit at fixed relative depths `u_i r` on every rung, so
    /// power-law suprema scale exactly and the fitted log-log slope is the
    /// true exponent. `tol` is the threshold below which a supremum counts
    /// as already vanished.
    pub fn verify_degeneracy_conditions(
        &self,
        spec: &DomainSpec<F>,
        r_ladder: &[F],
        samples: usize,
        tol: F,
    ) -> Result<ConditionReport<F>> {
        if r_ladder.is_empty() {
            return Err(Error::invalid("empty layer ladder"));
        }
        let mut dev = Vec::with_capacity(r_ladder.len());
        let mut div = Vec::with_capacity(r_ladder.len());
        let mut ndiv = Vec::with_capacity(r_ladder.len());
        for &r in r_ladder {
            let layer = LayerSpec::full(r)?;
            let mut s_dev = F::zero();
            let mut s_div = F::zero();
            let mut s_ndiv = F::zero();
            for x in spec.sample_layer(&layer, samples)? {
                let d = spec.distance(&x)?;
                let a = self.a_value(spec, &x)?;
                let mut m = self.eval_c(spec, &x)?;
                m.add_scaled_identity(-a * d.powf(self.delta));
                m.scale(d.powf(-self.delta));
                s_dev = s_dev.max(m.spectral_norm());
                s_div = s_div.max(self.divergence_term(spec, &x, d)?.abs());
                s_ndiv = s_ndiv.max(self.normalized_divergence_term(spec, &x, d)?.abs());
            }
            dev.push(s_dev);
            div.push(s_div);
            ndiv.push(s_ndiv);
        }
        Ok(ConditionReport {
            r_ladder: r_ladder.to_vec(),
            deviation: ladder_verdict(r_ladder, dev, tol, true),
            divergence: ladder_verdict(r_ladder, div, tol, false),
            normalized_divergence: ladder_verdict(r_ladder, ndiv, tol, false),
        })
    }

    /// Measures the comparability constants of the field on one layer.
    pub fn comparability(
        &self,
        spec: &DomainSpec<F>,
        layer: &LayerSpec<F>,
        samples: usize,
    ) -> Result<ComparabilityConstants<F>> {
        let mut sigma = F::infinity();
        let mut tau = F::neg_infinity();
        let mut rho = F::zero();
        let mut gamma_a = F::zero();
        for x in spec.sample_layer(layer, samples)? {
            let d = spec.distance(&x)?;
            let a = self.a_value(spec, &x)?;
            let scale = a * d.powf(self.delta);
            let c = self.eval_c(spec, &x)?;
            sigma = sigma.min(c.min_eigenvalue() / scale);
            tau = tau.max(c.max_eigenvalue() / scale);
            rho = rho.max(self.divergence_term(spec, &x, d)?.abs() / a);
            gamma_a = gamma_a.max(self.profile.relative_gradient(spec, &x, d)?);
        }
        let gamma = spec.verify_trace_bound(layer, samples.max(100))?;
        let c_a = gamma + gamma_a;
        let alpha_1r = spec.codimension_gap() + self.delta - F::of(2.0) - c_a * layer.r;
        let upsilon_r = tau / sigma;
        let two = F::of(2.0);
        let alpha_2r = if self.delta < two {
            let cross = upsilon_r * (two - self.delta + gamma_a * layer.r).powi(2);
            let head = alpha_1r * alpha_1r;
            (head > cross).then(|| sigma * (head - cross))
        } else {
            None
        };
        Ok(ComparabilityConstants {
            sigma_r: sigma,
            tau_r: tau,
            upsilon_r,
            rho_r: rho,
            gamma,
            gamma_a,
            c_a,
            alpha_1r,
            alpha_2r,
            r: layer.r,
        })
    }

    /// 1-d radial reduction `c(t) = a(t) t^delta`, available for the
    /// interval and for the punctured space (radial coordinate = boundary
    /// distance). Anisotropic perturbations and angular profiles have no
    /// radial form.
    pub fn radial_reduction(&self, spec: &DomainSpec<F>) -> Result<Radial1d<F>> {
        let radial_dim = match spec {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::PuncturedSpace { dim } => *dim,
            _ => {
                return Err(Error::NotRadial(format!(
                    "domain variant '{}' has no radial coordinate equal to the boundary distance",
                    spec.variant_name()
                )))
            }
        };
        if self.perturbation.is_some() {
            return Err(Error::NotRadial("perturbed fields are not radial".into()));
        }
        let profile = match &self.profile {
            Profile::Constant(c) => Profile::Constant(*c),
            Profile::RadialPolynomial { coeffs } => {
                Profile::RadialPolynomial { coeffs: coeffs.clone() }
            }
            Profile::Angular { .. } => {
                return Err(Error::NotRadial("angular profiles are not radial".into()))
            }
        };
        Ok(Radial1d { delta: self.delta, profile, radial_dim })
    }
}

fn ladder_verdict<F: Real>(
    rs: &[F],
    sups: Vec<F>,
    tol: F,
    needs_vanishing: bool,
) -> ConditionLadder<F> {
    let slope = fit::log_log_slope(rs, &sups);
    let last = *sups.last().expect("non-empty ladder");
    let holds = if last <= tol {
        true
    } else {
        match slope {
            // Positive slope: supremum vanishes with the layer. Near-zero
            // slope: supremum is bounded, enough unless vanishing is needed.
            Some(s) => {
                if needs_vanishing {
                    s >= F::of(0.05)
                } else {
                    s >= F::of(-0.05)
                }
            }
            None => false,
        }
    };
    ConditionLadder { sups, slope, holds }
}

/// Radial restriction of a coefficient field: `c(t) = a(t) t^delta` on a
/// coordinate `t in (0, L]`, with volume weight `t^(radial_dim - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Radial1d<F> {
    pub delta: F,
    pub profile: Profile<F>,
    pub radial_dim: usize,
}

impl<F: Real> Radial1d<F> {
    /// Power-law coefficient `c(t) = a t^delta` on a 1-d interval.
    pub fn power_law(delta: F, a: F) -> Result<Self> {
        if !(delta >= F::zero()) || !delta.is_finite() {
            return Err(Error::invalid("degeneracy exponent must be >= 0"));
        }
        if !(a > F::zero()) {
            return Err(Error::invalid("profile constant must be positive"));
        }
        Ok(Radial1d { delta, profile: Profile::Constant(a), radial_dim: 1 })
    }

    pub fn with_radial_dim(mut self, dim: usize) -> Self {
        self.radial_dim = dim;
        self
    }

    /// `a(t)`.
    pub fn a(&self, t: F) -> F {
        match &self.profile {
            Profile::Constant(c) => *c,
            Profile::RadialPolynomial { coeffs } => horner(coeffs, t),
            Profile::Angular { base, .. } => *base,
        }
    }

    /// `a'(t)`.
    pub fn a_prime(&self, t: F) -> F {
        match &self.profile {
            Profile::Constant(_) | Profile::Angular { .. } => F::zero(),
            Profile::RadialPolynomial { coeffs } => horner_derivative(coeffs, t),
        }
    }

    /// `c(t) = a(t) t^delta`.
    pub fn c(&self, t: F) -> F {
        self.a(t) * t.powf(self.delta)
    }

    /// `c'(t)` in closed form.
    pub fn c_prime(&self, t: F) -> F {
        self.a_prime(t) * t.powf(self.delta) + self.a(t) * self.delta * t.powf(self.delta - F::one())
    }

    /// True when the profile is a single constant (power-law coefficient).
    pub fn is_power_law(&self) -> bool {
        matches!(self.profile, Profile::Constant(_))
    }
}
