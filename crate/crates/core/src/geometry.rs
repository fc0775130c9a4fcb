//! Domain classes with closed-form boundary distance, gradient and Hessian.
//!
//! Each variant fixes an ambient dimension `d`, the Hausdorff dimension
//! `d_H` of the set the coefficient degenerates on, and a uniform curvature
//! bound. Everything downstream (coefficient conditions, cutoff bounds,
//! spectral constants) consumes the closed forms computed here.

use crate::error::{Error, Result};
use crate::linalg::SymMat;
use crate::sampling;
use crate::Real;

/// Which endpoints of a 1-d interval carry the degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateEnds {
    Left,
    Right,
    Both,
}

/// A domain together with the boundary set its coefficient degenerates on.
///
/// * `Interval` - a 1-d interval, degenerate at one or both endpoints.
/// * `PuncturedSpace` - `R^d` minus the origin.
/// * `BallInterior` / `BallExterior` - inside / outside of a round ball,
///   the model C^2 boundaries with curvature exactly `1/R`.
/// * `ConvexExteriorProduct` - complement of a solid `s`-dimensional ball
///   embedded in `R^d`; the boundary set has dimension `s`.
/// * `LatticeComplement` - `R^d` minus the scaled integer lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec<F> {
    Interval { left: F, right: F, ends: DegenerateEnds },
    PuncturedSpace { dim: usize },
    BallInterior { dim: usize, radius: F },
    BallExterior { dim: usize, radius: F },
    ConvexExteriorProduct { dim: usize, subspace_dim: usize, obstacle_radius: F },
    LatticeComplement { dim: usize, spacing: F },
}

/// Annular boundary layer `{ s < d(x) < r }`; `s = 0` means the full layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec<F> {
    pub r: F,
    pub s: F,
}

impl<F: Real> LayerSpec<F> {
    pub fn new(r: F, s: F) -> Result<Self> {
        if !(r > F::zero()) || !(r <= F::one()) {
            return Err(Error::invalid("layer width r must lie in (0, 1]"));
        }
        if !(s >= F::zero()) || !(s < r) {
            return Err(Error::invalid("inner cutoff s must satisfy 0 <= s < r"));
        }
        Ok(LayerSpec { r, s })
    }

    /// Full layer of width `r`.
    pub fn full(r: F) -> Result<Self> {
        Self::new(r, F::zero())
    }
}

impl<F: Real> DomainSpec<F> {
    pub fn interval(left: F, right: F, ends: DegenerateEnds) -> Result<Self> {
        if !(left < right) || !left.is_finite() || !right.is_finite() {
            return Err(Error::invalid("interval needs finite left < right"));
        }
        Ok(DomainSpec::Interval { left, right, ends })
    }

    pub fn punctured(dim: usize) -> Result<Self> {
        if !(1..=sampling::MAX_DIM).contains(&dim) {
            return Err(Error::invalid(format!(
                "punctured space dimension must be in 1..={}",
                sampling::MAX_DIM
            )));
        }
        Ok(DomainSpec::PuncturedSpace { dim })
    }

    pub fn ball_interior(dim: usize, radius: F) -> Result<Self> {
        Self::check_ball(dim, radius)?;
        Ok(DomainSpec::BallInterior { dim, radius })
    }

    pub fn ball_exterior(dim: usize, radius: F) -> Result<Self> {
        Self::check_ball(dim, radius)?;
        Ok(DomainSpec::BallExterior { dim, radius })
    }

    fn check_ball(dim: usize, radius: F) -> Result<()> {
        if !(2..=sampling::MAX_DIM).contains(&dim) {
            return Err(Error::invalid(format!(
                "ball dimension must be in 2..={}",
                sampling::MAX_DIM
            )));
        }
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(Error::invalid("ball radius must be positive and finite"));
        }
        Ok(())
    }

    pub fn convex_exterior_product(
        dim: usize,
        subspace_dim: usize,
        obstacle_radius: F,
    ) -> Result<Self> {
        if dim > sampling::MAX_DIM || subspace_dim < 1 || subspace_dim >= dim {
            return Err(Error::invalid(
                "product domain needs 1 <= subspace_dim < dim <= 10",
            ));
        }
        if !(obstacle_radius > F::zero()) || !obstacle_radius.is_finite() {
            return Err(Error::invalid("obstacle radius must be positive and finite"));
        }
        Ok(DomainSpec::ConvexExteriorProduct { dim, subspace_dim, obstacle_radius })
    }

    pub fn lattice_complement(dim: usize, spacing: F) -> Result<Self> {
        if !(1..=sampling::MAX_DIM).contains(&dim) {
            return Err(Error::invalid(format!(
                "lattice dimension must be in 1..={}",
                sampling::MAX_DIM
            )));
        }
        if !(spacing > F::zero()) || !spacing.is_finite() {
            return Err(Error::invalid("lattice spacing must be positive and finite"));
        }
        Ok(DomainSpec::LatticeComplement { dim, spacing })
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::PuncturedSpace { dim }
            | DomainSpec::BallInterior { dim, .. }
            | DomainSpec::BallExterior { dim, .. }
            | DomainSpec::ConvexExteriorProduct { dim, .. }
            | DomainSpec::LatticeComplement { dim, .. } => dim,
        }
    }

    /// Hausdorff dimension of the degenerate boundary set.
    pub fn hausdorff_dim(&self) -> usize {
        match *self {
            DomainSpec::Interval { .. }
            | DomainSpec::PuncturedSpace { .. }
            | DomainSpec::LatticeComplement { .. } => 0,
            DomainSpec::BallInterior { dim, .. } | DomainSpec::BallExterior { dim, .. } => dim - 1,
            DomainSpec::ConvexExteriorProduct { subspace_dim, .. } => subspace_dim,
        }
    }

    /// `d - d_H`, the codimension gap entering both uniqueness thresholds.
    pub fn codimension_gap(&self) -> F {
        F::of_usize(self.ambient_dim() - self.hausdorff_dim())
    }

    /// Uniform bound on the principal curvatures of the boundary set.
    pub fn curvature_bound(&self) -> F {
        match *self {
            DomainSpec::Interval { .. }
            | DomainSpec::PuncturedSpace { .. }
            | DomainSpec::LatticeComplement { .. } => F::zero(),
            DomainSpec::BallInterior { radius, .. } | DomainSpec::BallExterior { radius, .. } => {
                radius.recip()
            }
            DomainSpec::ConvexExteriorProduct { obstacle_radius, .. } => obstacle_radius.recip(),
        }
    }

    /// Stable identifier used in configs and CSV output.
    pub fn variant_name(&self) -> &'static str {
        match self {
            DomainSpec::Interval { .. } => "interval",
            DomainSpec::PuncturedSpace { .. } => "punctured",
            DomainSpec::BallInterior { .. } => "ball_interior",
            DomainSpec::BallExterior { .. } => "ball_exterior",
            DomainSpec::ConvexExteriorProduct { .. } => "product",
            DomainSpec::LatticeComplement { .. } => "lattice",
        }
    }

    fn check_point(&self, x: &[F]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, domain has dimension {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Euclidean distance from `x` to the degenerate boundary set.
    pub fn distance(&self, x: &[F]) -> Result<F> {
        self.check_point(x)?;
        let d = match *self {
            DomainSpec::Interval { left, right, ends } => {
                let t = x[0];
                if t == left || t == right {
                    let on_degenerate = match ends {
                        DegenerateEnds::Left => t == left,
                        DegenerateEnds::Right => t == right,
                        DegenerateEnds::Both => true,
                    };
                    return Err(if on_degenerate { Error::OnBoundary } else { Error::OutsideDomain });
                }
                if t < left || t > right {
                    return Err(Error::OutsideDomain);
                }
                match ends {
                    DegenerateEnds::Left => t - left,
                    DegenerateEnds::Right => right - t,
                    DegenerateEnds::Both => (t - left).min(right - t),
                }
            }
            DomainSpec::PuncturedSpace { .. } => norm(x),
            DomainSpec::BallInterior { radius, .. } => {
                let rho = norm(x);
                if rho > radius {
                    return Err(Error::OutsideDomain);
                }
                radius - rho
            }
            DomainSpec::BallExterior { radius, .. } => {
                let rho = norm(x);
                if rho < radius {
                    return Err(Error::OutsideDomain);
                }
                rho - radius
            }
            DomainSpec::ConvexExteriorProduct { subspace_dim, obstacle_radius, .. } => {
                let (dp, zn) = self.product_parts(x, subspace_dim, obstacle_radius);
                (dp * dp + zn * zn).sqrt()
            }
            DomainSpec::LatticeComplement { spacing, .. } => {
                self.lattice_offset(x, spacing).map(|(off, _)| norm(&off))?
            }
        };
        if d == F::zero() {
            return Err(Error::OnBoundary);
        }
        Ok(d)
    }

    /// `(d_Pi(y), |z|)` for the product variant: distance of the subspace
    /// part to the obstacle, and norm of the complementary part.
    fn product_parts(&self, x: &[F], s: usize, obstacle_radius: F) -> (F, F) {
        let yn = norm(&x[..s]);
        let zn = norm(&x[s..]);
        ((yn - obstacle_radius).max(F::zero()), zn)
    }

    /// Offset to the nearest lattice point; errs when the distance itself is
    /// needed at an exact tie only for derivative callers (flag returned).
    fn lattice_offset(&self, x: &[F], spacing: F) -> Result<(Vec<F>, bool)> {
        let half = F::of(0.5);
        let mut off = Vec::with_capacity(x.len());
        let mut tie = false;
        for &xi in x {
            let f = xi / spacing;
            let k = f.round();
            let r = f - k;
            if r.abs() == half {
                tie = true;
            }
            off.push(r * spacing);
        }
        Ok((off, tie))
    }

    /// Unit gradient of the boundary distance at `x`.
    pub fn grad_distance(&self, x: &[F]) -> Result<Vec<F>> {
        self.check_point(x)?;
        match *self {
            DomainSpec::Interval { left, right, ends } => {
                self.distance(x)?;
                let t = x[0];
                let g = match ends {
                    DegenerateEnds::Left => F::one(),
                    DegenerateEnds::Right => -F::one(),
                    DegenerateEnds::Both => {
                        let (dl, dr) = (t - left, right - t);
                        if dl == dr {
                            return Err(Error::AmbiguousNearestPoint);
                        }
                        if dl < dr {
                            F::one()
                        } else {
                            -F::one()
                        }
                    }
                };
                Ok(vec![g])
            }
            DomainSpec::PuncturedSpace { .. } => {
                let d = self.distance(x)?;
                Ok(x.iter().map(|&xi| xi / d).collect())
            }
            DomainSpec::BallInterior { .. } => {
                self.distance(x)?;
                let rho = norm(x);
                if rho == F::zero() {
                    return Err(Error::AmbiguousNearestPoint);
                }
                Ok(x.iter().map(|&xi| -xi / rho).collect())
            }
            DomainSpec::BallExterior { .. } => {
                self.distance(x)?;
                let rho = norm(x);
                Ok(x.iter().map(|&xi| xi / rho).collect())
            }
            DomainSpec::ConvexExteriorProduct { subspace_dim, obstacle_radius, .. } => {
                let d = self.distance(x)?;
                let s = subspace_dim;
                let (dp, _) = self.product_parts(x, s, obstacle_radius);
                let mut g = vec![F::zero(); x.len()];
                if dp > F::zero() {
                    let yn = norm(&x[..s]);
                    for i in 0..s {
                        g[i] = dp * (x[i] / yn) / d;
                    }
                }
                for i in s..x.len() {
                    g[i] = x[i] / d;
                }
                Ok(g)
            }
            DomainSpec::LatticeComplement { spacing, .. } => {
                let (off, tie) = self.lattice_offset(x, spacing)?;
                let d = norm(&off);
                if d == F::zero() {
                    return Err(Error::OnBoundary);
                }
                if tie {
                    return Err(Error::AmbiguousNearestPoint);
                }
                Ok(off.iter().map(|&o| o / d).collect())
            }
        }
    }

    /// Hessian matrix of the boundary distance at `x`.
    pub fn hessian(&self, x: &[F]) -> Result<SymMat<F>> {
        self.check_point(x)?;
        let dim = self.ambient_dim();
        match *self {
            DomainSpec::Interval { .. } => {
                self.grad_distance(x)?;
                Ok(SymMat::zeros(1))
            }
            DomainSpec::PuncturedSpace { .. } => {
                let d = self.distance(x)?;
                Ok(radial_hessian(x, d, d.recip()))
            }
            DomainSpec::BallInterior { .. } => {
                self.grad_distance(x)?;
                let rho = norm(x);
                Ok(radial_hessian(x, rho, -rho.recip()))
            }
            DomainSpec::BallExterior { .. } => {
                self.distance(x)?;
                let rho = norm(x);
                Ok(radial_hessian(x, rho, rho.recip()))
            }
            DomainSpec::ConvexExteriorProduct { subspace_dim, obstacle_radius, .. } => {
                let d = self.distance(x)?;
                let s = subspace_dim;
                let (dp, zn) = self.product_parts(x, s, obstacle_radius);
                let yn = norm(&x[..s]);
                if dp == F::zero() {
                    if yn == obstacle_radius {
                        return Err(Error::NonSmoothPoint);
                    }
                    // Flat region: distance is |z|, curvature only in z.
                    let mut h = SymMat::zeros(dim);
                    for i in s..dim {
                        for j in i..dim {
                            let kron = if i == j { F::one() } else { F::zero() };
                            h.set_sym(i, j, (kron - x[i] * x[j] / (zn * zn)) / zn);
                        }
                    }
                    return Ok(h);
                }
                // Rim region: second derivative of sqrt(d_Pi^2 + |z|^2).
                let g = self.grad_distance(x)?;
                let mut h = SymMat::zeros(dim);
                for i in 0..s {
                    let ei = x[i] / yn;
                    for (j, &xj) in x.iter().enumerate().take(s).skip(i) {
                        let ej = xj / yn;
                        let kron = if i == j { F::one() } else { F::zero() };
                        h.set_sym(i, j, ei * ej + (dp / yn) * (kron - ei * ej));
                    }
                }
                for i in s..dim {
                    h.set_sym(i, i, F::one());
                }
                for i in 0..dim {
                    for j in i..dim {
                        let v = (h.get(i, j) - g[i] * g[j]) / d;
                        h.set_sym(i, j, v);
                    }
                }
                Ok(h)
            }
            DomainSpec::LatticeComplement { spacing, .. } => {
                let (off, tie) = self.lattice_offset(x, spacing)?;
                let d = norm(&off);
                if d == F::zero() {
                    return Err(Error::OnBoundary);
                }
                if tie {
                    return Err(Error::AmbiguousNearestPoint);
                }
                Ok(radial_hessian(&off, d, d.recip()))
            }
        }
    }

    /// Trace of the distance Hessian at `x`, in closed form.
    pub fn hessian_trace(&self, x: &[F]) -> Result<F> {
        self.check_point(x)?;
        let dm1 = F::of_usize(self.ambient_dim() - 1);
        match *self {
            DomainSpec::Interval { .. } => {
                self.grad_distance(x)?;
                Ok(F::zero())
            }
            DomainSpec::PuncturedSpace { .. } => Ok(dm1 / self.distance(x)?),
            DomainSpec::BallInterior { radius, .. } => {
                let t = self.distance(x)?;
                if norm(x) == F::zero() {
                    return Err(Error::AmbiguousNearestPoint);
                }
                Ok(-dm1 / (radius - t))
            }
            DomainSpec::BallExterior { radius, .. } => {
                let t = self.distance(x)?;
                Ok(dm1 / (radius + t))
            }
            DomainSpec::ConvexExteriorProduct { dim, subspace_dim, obstacle_radius } => {
                let d = self.distance(x)?;
                let s = subspace_dim;
                let (dp, zn) = self.product_parts(x, s, obstacle_radius);
                let gap = F::of_usize(dim - s);
                if dp == F::zero() {
                    if norm(&x[..s]) == obstacle_radius {
                        return Err(Error::NonSmoothPoint);
                    }
                    return Ok((gap - F::one()) / zn);
                }
                let yn = norm(&x[..s]);
                Ok((gap + dp * F::of_usize(s - 1) / yn) / d)
            }
            DomainSpec::LatticeComplement { spacing, .. } => {
                let (off, tie) = self.lattice_offset(x, spacing)?;
                let d = norm(&off);
                if d == F::zero() {
                    return Err(Error::OnBoundary);
                }
                if tie {
                    return Err(Error::AmbiguousNearestPoint);
                }
                Ok(dm1 / d)
            }
        }
    }

    /// `d(x) tr D^2 d(x)` in closed form, without the cancellation of
    /// multiplying the trace back by the distance.
    ///
    /// For variants with flat boundary sets (interval, punctured space,
    /// lattice, product over the obstacle interior) the value is an exact
    /// integer, which is what makes the measured trace-bound constant
    /// exactly zero there.
    pub fn scaled_hessian_trace(&self, x: &[F]) -> Result<F> {
        self.check_point(x)?;
        let dm1 = F::of_usize(self.ambient_dim() - 1);
        match *self {
            DomainSpec::Interval { .. } => {
                self.grad_distance(x)?;
                Ok(F::zero())
            }
            DomainSpec::PuncturedSpace { .. } => {
                self.distance(x)?;
                Ok(dm1)
            }
            DomainSpec::BallInterior { radius, .. } => {
                let t = self.distance(x)?;
                if norm(x) == F::zero() {
                    return Err(Error::AmbiguousNearestPoint);
                }
                Ok(-dm1 * t / (radius - t))
            }
            DomainSpec::BallExterior { radius, .. } => {
                let t = self.distance(x)?;
                Ok(dm1 * t / (radius + t))
            }
            DomainSpec::ConvexExteriorProduct { dim, subspace_dim, obstacle_radius } => {
                self.distance(x)?;
                let s = subspace_dim;
                let (dp, _) = self.product_parts(x, s, obstacle_radius);
                let gap = F::of_usize(dim - s);
                if dp == F::zero() {
                    if norm(&x[..s]) == obstacle_radius {
                        return Err(Error::NonSmoothPoint);
                    }
                    return Ok(gap - F::one());
                }
                let yn = norm(&x[..s]);
                Ok(gap + dp * F::of_usize(s - 1) / yn)
            }
            DomainSpec::LatticeComplement { .. } => {
                self.hessian_trace(x)?;
                Ok(dm1)
            }
        }
    }

    /// Trace of the modulus `|D^2 d|` (sum of absolute Hessian eigenvalues).
    ///
    /// Distance to a convex set is convex and distance into a ball is
    /// concave, so every variant has a single-signed Hessian spectrum and
    /// the modulus trace is just `|trace|`.
    pub fn hessian_abs_trace(&self, x: &[F]) -> Result<F> {
        Ok(self.hessian_trace(x)?.abs())
    }

    /// Checks that a layer sits inside the region where every point has a
    /// unique nearest boundary point (and inside the domain at all).
    pub fn validate_layer(&self, layer: &LayerSpec<F>) -> Result<()> {
        match *self {
            DomainSpec::Interval { left, right, ends } => {
                let len = right - left;
                let cap = if ends == DegenerateEnds::Both { len / F::of(2.0) } else { len };
                if layer.r > cap {
                    return Err(Error::invalid("layer width exceeds the interval"));
                }
            }
            DomainSpec::BallInterior { radius, .. } | DomainSpec::BallExterior { radius, .. } => {
                if !(layer.r < radius) {
                    return Err(Error::invalid(
                        "layer width must stay below the ball radius",
                    ));
                }
            }
            DomainSpec::LatticeComplement { spacing, .. } => {
                if !(layer.r < spacing / F::of(2.0)) {
                    return Err(Error::invalid(
                        "layer width must stay below half the lattice spacing",
                    ));
                }
            }
            DomainSpec::PuncturedSpace { .. } | DomainSpec::ConvexExteriorProduct { .. } => {}
        }
        Ok(())
    }

    /// Deterministic low-discrepancy samples with boundary distance strictly
    /// inside `(layer.s, layer.r)`.
    ///
    /// For the product variant the samples sit over the flat part of the
    /// obstacle (subspace part strictly inside the ball), where the distance
    /// is smooth and the trace decomposition is exact.
    pub fn sample_layer(&self, layer: &LayerSpec<F>, count: usize) -> Result<Vec<Vec<F>>> {
        self.validate_layer(layer)?;
        if count == 0 {
            return Err(Error::invalid("sample count must be positive"));
        }
        let dim = self.ambient_dim();
        let mut out = Vec::with_capacity(count);
        for idx in 0..count {
            let i = idx as u64;
            let t = F::of(sampling::unit_range(i));
            let dist = layer.s + (layer.r - layer.s) * t;
            let x = match *self {
                DomainSpec::Interval { left, right, ends } => {
                    let from_left = match ends {
                        DegenerateEnds::Left => true,
                        DegenerateEnds::Right => false,
                        DegenerateEnds::Both => sampling::unit_range_alt(i) < 0.5,
                    };
                    vec![if from_left { left + dist } else { right - dist }]
                }
                DomainSpec::PuncturedSpace { .. } | DomainSpec::LatticeComplement { .. } => {
                    scale(&sampling::unit_vector::<F>(i, dim), dist)
                }
                DomainSpec::BallInterior { radius, .. } => {
                    scale(&sampling::unit_vector::<F>(i, dim), radius - dist)
                }
                DomainSpec::BallExterior { radius, .. } => {
                    scale(&sampling::unit_vector::<F>(i, dim), radius + dist)
                }
                DomainSpec::ConvexExteriorProduct { subspace_dim, obstacle_radius, .. } => {
                    let s = subspace_dim;
                    let u = sampling::unit_vector::<F>(i, dim);
                    let y_len = obstacle_radius
                        * F::of(0.9)
                        * F::of(sampling::unit_range_alt(i));
                    let mut x = scale(&renormalize(&u[..s]), y_len);
                    x.extend_from_slice(&scale(&renormalize(&u[s..]), dist));
                    x
                }
            };
            out.push(x);
        }
        Ok(out)
    }

    /// Smallest `g` with `|d(x) tr D^2 d(x) - (d - d_H - 1)| <= g d(x)` over
    /// a deterministic layer sample.
    pub fn verify_trace_bound(&self, layer: &LayerSpec<F>, sample_count: usize) -> Result<F> {
        if sample_count < 100 {
            return Err(Error::invalid("trace bound needs at least 100 samples"));
        }
        let target = self.codimension_gap() - F::one();
        let mut gamma = F::zero();
        for x in self.sample_layer(layer, sample_count)? {
            let d = self.distance(&x)?;
            let dev = (self.scaled_hessian_trace(&x)? - target).abs();
            gamma = gamma.max(dev / d);
        }
        Ok(gamma)
    }
}

fn norm<F: Real>(x: &[F]) -> F {
    x.iter().map(|&v| v * v).sum::<F>().sqrt()
}

fn scale<F: Real>(x: &[F], s: F) -> Vec<F> {
    x.iter().map(|&v| v * s).collect()
}

fn renormalize<F: Real>(x: &[F]) -> Vec<F> {
    let n = norm(x);
    if n > F::of(1e-12) {
        scale(x, n.recip())
    } else {
        // Degenerate split of a sampled direction; fall back to an axis.
        let mut e = vec![F::zero(); x.len()];
        e[0] = F::one();
        e
    }
}

/// `k (I - e x e)` with `e = x / rho`: the Hessian of a radial distance.
fn radial_hessian<F: Real>(x: &[F], rho: F, k: F) -> SymMat<F> {
    let n = x.len();
    let mut h = SymMat::zeros(n);
    for i in 0..n {
        let ei = x[i] / rho;
        for (j, &xj) in x.iter().enumerate().skip(i) {
            let ej = xj / rho;
            let kron = if i == j { F::one() } else { F::zero() };
            h.set_sym(i, j, k * (kron - ei * ej));
        }
    }
    h
}
