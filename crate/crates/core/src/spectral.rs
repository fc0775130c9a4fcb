//! Discrete Hardy/Rellich minima and endpoint classification for the 1-d
//! and radial reductions.
//!
//! Everything here reports trends on geometric truncation ladders instead of
//! single numbers: a truncated integral either saturates, keeps a geometric
//! tail, or grows, and verdicts are derived from that — an undecidable ladder
//! is an explicit error, never a guess.

use crate::error::{Error, Result};
use crate::field::{CoefficientField, Radial1d};
use crate::fit;
use crate::geometry::{DomainSpec, LayerSpec};
use crate::grid::{assemble, AssembledOperator, Bc, Grid1d};
use crate::linalg::{smallest_pencil_eigenvalue, smallest_pencil_eigenvalue_general};
use crate::ode::Dopri5;
use crate::quad;
use crate::Real;

/// Behaviour of a sequence of nonnegative ladder increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderTrend {
    /// Last increment below 1e-6 of the running total.
    Saturated,
    /// Increments strictly decreasing with ratio bounded away from 1;
    /// the tail sum is finite even though it has not died out yet.
    GeometricallyConvergent,
    /// Increments non-decreasing across the final rungs.
    Diverging,
    Indeterminate,
}

impl LadderTrend {
    pub fn is_convergent(self) -> bool {
        matches!(self, LadderTrend::Saturated | LadderTrend::GeometricallyConvergent)
    }

    pub fn name(self) -> &'static str {
        match self {
            LadderTrend::Saturated => "saturated",
            LadderTrend::GeometricallyConvergent => "geometric",
            LadderTrend::Diverging => "diverging",
            LadderTrend::Indeterminate => "indeterminate",
        }
    }
}

/// Classifies ladder increments (deepest rung last).
pub fn ladder_trend<F: Real>(increments: &[F]) -> LadderTrend {
    let total: F = increments.iter().copied().sum();
    if total == F::zero() {
        return LadderTrend::Saturated;
    }
    let last = *increments.last().expect("non-empty ladder");
    if last < F::of(1e-6) * total {
        return LadderTrend::Saturated;
    }
    if increments.len() < 5 {
        return LadderTrend::Indeterminate;
    }
    let tail = &increments[increments.len() - 5..];
    let slack = F::of(1.0 - 1e-9);
    if tail.windows(2).all(|w| w[1] >= w[0] * slack) {
        return LadderTrend::Diverging;
    }
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let max_ratio = tail
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(F::neg_infinity(), F::max);
    if decreasing && max_ratio <= F::of(0.999) {
        return LadderTrend::GeometricallyConvergent;
    }
    LadderTrend::Indeterminate
}

/// Weyl dichotomy at the degenerate endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointClass {
    LimitPoint,
    LimitCircle,
}

impl EndpointClass {
    pub fn name(self) -> &'static str {
        match self {
            EndpointClass::LimitPoint => "limit_point",
            EndpointClass::LimitCircle => "limit_circle",
        }
    }
}

/// Discrete Hardy quotient minimum with its truncation ladder.
#[derive(Debug, Clone)]
pub struct HardyReport<F> {
    /// Ladder value extrapolated to zero truncation (linear in
    /// `1/ln^2(outer/epsilon)` through the last two rungs).
    pub numeric_min: F,
    /// `(alpha_1r/2)^2`; the proven lower bound only when `alpha_1r > 0`.
    pub theoretical_bound: F,
    pub alpha_1r: F,
    /// Whether the lower-bound hypothesis `alpha_1r > 0` holds.
    pub applicable: bool,
    pub epsilons: Vec<F>,
    pub rung_values: Vec<F>,
    pub cells: usize,
    pub iterations: usize,
}

/// Discrete Rellich quotient minimum. `numeric_min` is the finest-rung
/// value (the second-order quotient has no reliable log extrapolant).
#[derive(Debug, Clone)]
pub struct RellichReport<F> {
    pub numeric_min: F,
    /// `(alpha_2r/4)^2` when the head condition holds.
    pub theoretical_bound: Option<F>,
    /// `(d-d_H)^2 (d-d_H+2 delta-4)^2 / 16`, the small-layer limit.
    pub limiting_constant: F,
    pub alpha_2r: Option<F>,
    /// Head condition `alpha_1r^2 > upsilon_r (2-delta+gamma_a r)^2`.
    pub applicable: bool,
    pub epsilons: Vec<F>,
    pub rung_values: Vec<F>,
    pub cells: usize,
}

/// Smallest eigenvalue of (stiffness, consistent hardy mass) on one grid.
pub fn hardy_rung<F: Real>(op: &AssembledOperator<F>) -> Result<crate::linalg::PencilEig<F>> {
    let fac = op.stiffness.ldlt()?;
    smallest_pencil_eigenvalue_general(
        |rhs| fac.solve(rhs),
        |v| op.stiffness.quad(v),
        |v| op.hardy_mass.mul_vec(v),
        |v| op.hardy_mass.quad(v),
        op.n(),
        F::of(1e-10),
        2000,
    )
}

/// Smallest eigenvalue of (K M^-1 K, rellich weight) on one grid; two
/// tridiagonal solves per iteration.
pub fn rellich_rung<F: Real>(op: &AssembledOperator<F>) -> Result<crate::linalg::PencilEig<F>> {
    let fac = op.stiffness.ldlt()?;
    let mass = &op.mass;
    smallest_pencil_eigenvalue(
        |rhs| {
            let y = fac.solve(rhs);
            let my: Vec<F> = y.iter().zip(mass).map(|(&v, &m)| v * m).collect();
            fac.solve(&my)
        },
        |v| {
            let kv = op.stiffness.mul_vec(v);
            kv.iter().zip(mass).map(|(&v, &m)| v * v / m).sum()
        },
        &op.rellich_weight,
        F::of(1e-10),
        2000,
    )
}

fn refine_ladder<F: Real>(
    op: &AssembledOperator<F>,
    radial: &Radial1d<F>,
    rung: impl Fn(&AssembledOperator<F>) -> Result<crate::linalg::PencilEig<F>>,
) -> Result<(Vec<F>, Vec<F>, usize)> {
    let g = &op.grid;
    let mut epsilons = Vec::with_capacity(3);
    let mut values = Vec::with_capacity(3);
    let mut iterations = 0;
    for k in 0..3u32 {
        let eps = g.epsilon / F::of_usize(1usize << k);
        let eig = if k == 0 {
            rung(op)?
        } else {
            let grid = Grid1d::build(eps, g.outer, g.cells(), g.grading_exponent, g.radial_dim)?;
            rung(&assemble(radial, &grid, op.bc)?)?
        };
        epsilons.push(eps);
        values.push(eig.value);
        iterations = iterations.max(eig.iterations);
    }
    Ok((epsilons, values, iterations))
}

/// Minimizes the discrete Hardy quotient over an `{eps, eps/2, eps/4}`
/// truncation ladder and extrapolates; the comparability constants of the
/// ambient field supply the reference bound.
pub fn hardy_min<F: Real>(
    op: &AssembledOperator<F>,
    field: &CoefficientField<F>,
    spec: &DomainSpec<F>,
    layer: &LayerSpec<F>,
) -> Result<HardyReport<F>> {
    let radial = field.radial_reduction(spec)?;
    if radial.radial_dim != op.grid.radial_dim {
        return Err(Error::invalid("operator grid does not match the field's radial reduction"));
    }
    let constants = field.comparability(spec, layer, 400)?;
    let (epsilons, rung_values, iterations) =
        refine_ladder(op, &radial, |o| hardy_rung(o))?;

    // Truncated minima converge like 1/ln^2 of the truncation; fit the last
    // two rungs linearly in that variable.
    let x: Vec<F> = epsilons.iter().map(|&e| (op.grid.outer / e).ln().powi(-2)).collect();
    let n = x.len();
    let (x1, x2) = (x[n - 2], x[n - 1]);
    let (v1, v2) = (rung_values[n - 2], rung_values[n - 1]);
    let numeric_min = v2 - x2 * (v1 - v2) / (x1 - x2);

    let half = constants.alpha_1r / F::of(2.0);
    Ok(HardyReport {
        numeric_min,
        theoretical_bound: half * half,
        alpha_1r: constants.alpha_1r,
        applicable: constants.alpha_1r > F::zero(),
        epsilons,
        rung_values,
        cells: op.grid.cells(),
        iterations,
    })
}

/// Minimizes the discrete Rellich quotient over the truncation ladder.
/// Accepts `delta` up to and including 2 (the weight is regular there);
/// the theoretical bound exists only for `delta < 2` with the head
/// condition, and the report is marked non-applicable otherwise.
pub fn rellich_min<F: Real>(
    op: &AssembledOperator<F>,
    field: &CoefficientField<F>,
    spec: &DomainSpec<F>,
    layer: &LayerSpec<F>,
) -> Result<RellichReport<F>> {
    if field.delta > F::of(2.0) {
        return Err(Error::invalid("second-order quotient needs delta <= 2"));
    }
    let radial = field.radial_reduction(spec)?;
    if radial.radial_dim != op.grid.radial_dim {
        return Err(Error::invalid("operator grid does not match the field's radial reduction"));
    }
    let constants = field.comparability(spec, layer, 400)?;
    let (epsilons, rung_values, _) = refine_ladder(op, &radial, |o| rellich_rung(o))?;

    let gap = spec.codimension_gap();
    let four = F::of(4.0);
    let inner = gap + F::of(2.0) * field.delta - four;
    let limiting_constant = gap * gap * inner * inner / F::of(16.0);
    let theoretical_bound = constants.alpha_2r.map(|a2| {
        let q = a2 / four;
        q * q
    });
    Ok(RellichReport {
        numeric_min: *rung_values.last().expect("ladder non-empty"),
        theoretical_bound,
        limiting_constant,
        alpha_2r: constants.alpha_2r,
        applicable: constants.alpha_2r.is_some(),
        epsilons,
        rung_values,
        cells: op.grid.cells(),
    })
}

/// Integral endpoint criterion on `(0, r]`.
#[derive(Debug, Clone)]
pub struct WeylReport<F> {
    pub essentially_self_adjoint: bool,
    pub trend: LadderTrend,
    pub epsilons: Vec<F>,
    /// Cumulative `int_{eps_k}^r nu^2`, one per rung.
    pub partials: Vec<F>,
    pub used_closed_form: bool,
    pub r: F,
}

/// Divergence test of `int_0^r nu(x)^2 dx` with `nu(x) = int_x^r 1/c`:
/// the operator is essentially self-adjoint exactly when the integral
/// diverges. Power-law coefficients take the closed-form route (threshold
/// at exponent 3/2); anything else is decided by the ladder trend alone
/// and an undecided trend is an error.
pub fn weyl_classify<F: Real>(field: &Radial1d<F>, r: F) -> Result<WeylReport<F>> {
    if field.radial_dim != 1 {
        return Err(Error::NotRadial(
            "integral criterion is stated for the 1-d reduction".into(),
        ));
    }
    if !(r > F::zero()) || !r.is_finite() {
        return Err(Error::invalid("outer radius must be positive and finite"));
    }
    for k in 0..=40 {
        let x = r * F::of(0.5f64.powi(k));
        if !(field.a(x) > F::zero()) {
            return Err(Error::invalid("coefficient must be positive on (0, r]"));
        }
    }

    let half = F::of(0.5);
    let mut epsilons = Vec::new();
    let mut partials = Vec::new();
    let mut increments = Vec::new();
    let mut total = F::zero();
    // nu at the current upper rung edge, accumulated outside-in.
    let mut nu_edge = F::zero();
    let mut hi = r;
    for _ in 1..=40 {
        let lo = hi * half;
        let edge = nu_edge;
        let nu_at = move |x: F| edge + quad::gl16(|s| field.c(s).recip(), x, hi);
        let inc = quad::gl16(|x| nu_at(x).powi(2), lo, hi);
        nu_edge = nu_at(lo);
        total += inc;
        increments.push(inc);
        epsilons.push(lo);
        partials.push(total);
        hi = lo;
    }
    let trend = ladder_trend(&increments);

    let used_closed_form = field.is_power_law();
    let essentially_self_adjoint = if used_closed_form {
        field.delta >= F::of(1.5)
    } else {
        match trend {
            LadderTrend::Diverging => true,
            LadderTrend::Saturated | LadderTrend::GeometricallyConvergent => false,
            LadderTrend::Indeterminate => {
                return Err(Error::Inconclusive(format!(
                    "truncated nu-integral ladder undecided after {} rungs (total {:e})",
                    partials.len(),
                    total.to_f64().unwrap_or(f64::NAN),
                )))
            }
        }
    };
    Ok(WeylReport {
        essentially_self_adjoint,
        trend,
        epsilons,
        partials,
        used_closed_form,
        r,
    })
}

/// Norm-growth diagnostics for one shooting solution.
#[derive(Debug, Clone)]
pub struct SolutionDiagnostics<F> {
    /// +1 for the spectral parameter +i, -1 for -i.
    pub spectral_sign: i8,
    /// 0: unit value at the outer end; 1: unit flux.
    pub start: usize,
    pub trend: LadderTrend,
    /// Fitted `d ln(norm increment) / d ln(eps)` over the deepest rungs.
    pub growth_rate: Option<F>,
    pub norm_sq: F,
}

/// Deficiency indices at the degenerate endpoint, regular endpoint held by
/// a fixed boundary condition.
#[derive(Debug, Clone)]
pub struct DeficiencyResult<F> {
    pub n_plus: usize,
    pub n_minus: usize,
    pub classification: EndpointClass,
    pub essentially_self_adjoint: bool,
    pub outer_bc: Bc,
    pub diagnostics: Vec<SolutionDiagnostics<F>>,
}

/// Shoots two independent solutions of `-(rho^(d-1) c u')' = ±i rho^(d-1) u`
/// from the regular outer end toward the degenerate one, tracking truncated
/// L2 norms over a halving ladder. Both solutions square-integrable means
/// limit circle (index 1 per sign); any norm growing without saturation
/// means limit point (index 0). Undecided ladders are an error.
pub fn deficiency_indices<F: Real>(
    field: &Radial1d<F>,
    outer: F,
    outer_bc: Bc,
) -> Result<DeficiencyResult<F>> {
    if !(outer > F::zero()) || !outer.is_finite() {
        return Err(Error::invalid("outer endpoint must be positive and finite"));
    }
    if !(field.a(outer) > F::zero()) {
        return Err(Error::invalid("coefficient must be positive at the outer endpoint"));
    }
    let dm1 = F::of_usize(field.radial_dim - 1);
    let weight = |x: F| x.powf(dm1);
    let solver = Dopri5::with_rtol(F::of(1e-10));

    let mut diagnostics = Vec::with_capacity(4);
    let mut index_per_sign = [0usize; 2];
    for (si, sign) in [1i8, -1i8].into_iter().enumerate() {
        let sgn = F::of(sign as f64);
        let mut diverged = false;
        let mut any_indeterminate = false;
        for start in 0..2usize {
            // State: [Re u, Im u, Re p, Im p, accumulated |u|^2 norm],
            // with p = rho^(d-1) c u'.
            let rhs = |x: F, y: &[F; 5]| {
                let w = weight(x);
                let cw = field.c(x) * w;
                [
                    y[2] / cw,
                    y[3] / cw,
                    sgn * w * y[1],
                    -sgn * w * y[0],
                    w * (y[0] * y[0] + y[1] * y[1]),
                ]
            };
            let mut y = [F::zero(); 5];
            y[start * 2] = F::one();
            let mut hi = outer;
            let mut increments: Vec<F> = Vec::with_capacity(40);
            let mut eps_ladder: Vec<F> = Vec::with_capacity(40);
            let mut norm_sq = F::zero();
            for k in 1..=40 {
                let lo = hi * F::of(0.5);
                let q_before = y[4];
                y = solver.solve(|x, s| rhs(x, s), hi, lo, y)?;
                // Integrating downward, so the quadrature component falls.
                increments.push(q_before - y[4]);
                eps_ladder.push(lo);
                norm_sq = -y[4];
                hi = lo;
                // Deep saturation or certain blow-up: stop descending.
                if k >= 12 {
                    let last = *increments.last().expect("non-empty");
                    if last < F::of(1e-9) * norm_sq || norm_sq > F::of(1e25) {
                        break;
                    }
                }
            }
            let trend = ladder_trend(&increments);
            match trend {
                LadderTrend::Diverging => diverged = true,
                LadderTrend::Indeterminate => any_indeterminate = true,
                _ => {}
            }
            let tail = increments.len().saturating_sub(8);
            let growth_rate = fit::log_log_slope(&eps_ladder[tail..], &increments[tail..]);
            diagnostics.push(SolutionDiagnostics {
                spectral_sign: sign,
                start,
                trend,
                growth_rate,
                norm_sq,
            });
        }
        if any_indeterminate && !diverged {
            return Err(Error::Inconclusive(
                "norm ladder of a shooting solution is undecided".into(),
            ));
        }
        index_per_sign[si] = if diverged { 0 } else { 1 };
    }
    let (n_plus, n_minus) = (index_per_sign[0], index_per_sign[1]);
    if n_plus != n_minus {
        return Err(Error::Inconclusive(format!(
            "asymmetric indices ({n_plus},{n_minus}) for a real coefficient",
        )));
    }
    let classification =
        if n_plus == 1 { EndpointClass::LimitCircle } else { EndpointClass::LimitPoint };
    Ok(DeficiencyResult {
        n_plus,
        n_minus,
        classification,
        essentially_self_adjoint: n_plus == 0,
        outer_bc,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CoefficientField;
    use crate::grid::BcPair;

    fn hardy_setup(
        spec: &DomainSpec<f64>,
        delta: f64,
        cells: usize,
        eps: f64,
    ) -> (AssembledOperator<f64>, CoefficientField<f64>, LayerSpec<f64>) {
        let field = CoefficientField::<f64>::exact(delta, 1.0).unwrap();
        let radial = field.radial_reduction(spec).unwrap();
        let grid = Grid1d::build(eps, 1.0, cells, 4.0, radial.radial_dim).unwrap();
        let op = assemble(&radial, &grid, BcPair::dirichlet_dirichlet()).unwrap();
        (op, field, LayerSpec::full(1.0).unwrap())
    }

    #[test]
    fn trend_classifier() {
        let sat: Vec<f64> = (0..12).map(|k| 0.5f64.powi(3 * k)).collect();
        assert_eq!(ladder_trend(&sat), LadderTrend::Saturated);
        assert_eq!(ladder_trend(&[1.0f64; 10]), LadderTrend::Diverging);
        let grow: Vec<f64> = (0..10).map(|k| 2.0f64.powi(k)).collect();
        assert_eq!(ladder_trend(&grow), LadderTrend::Diverging);
        let geo: Vec<f64> = (0..20).map(|k| 0.9f64.powi(k)).collect();
        assert_eq!(ladder_trend(&geo), LadderTrend::GeometricallyConvergent);
        let slow: Vec<f64> = (0..10).map(|k| 1.0 - 1e-5 * k as f64).collect();
        assert_eq!(ladder_trend(&slow), LadderTrend::Indeterminate);
        assert_eq!(ladder_trend(&[0.0f64; 8]), LadderTrend::Saturated);
    }

    #[test]
    fn hardy_interval_quarter() {
        let spec = DomainSpec::interval(0.0, 1.0, crate::geometry::DegenerateEnds::Left).unwrap();
        let (op, field, layer) = hardy_setup(&spec, 0.0, 2048, 1e-6);
        let rep = hardy_min(&op, &field, &spec, &layer).unwrap();
        assert!((rep.alpha_1r + 1.0).abs() < 1e-12);
        assert!((rep.theoretical_bound - 0.25).abs() < 1e-12);
        assert!(!rep.applicable);
        assert!((rep.numeric_min - 0.25).abs() < 0.005, "extrapolated {}", rep.numeric_min);
        for v in &rep.rung_values {
            assert!(*v >= 0.25 - 1e-6, "rung {v}");
        }
    }

    #[test]
    fn hardy_radial_three_d() {
        let spec = DomainSpec::punctured(3).unwrap();
        let (op, field, layer) = hardy_setup(&spec, 0.0, 2048, 1e-6);
        let rep = hardy_min(&op, &field, &spec, &layer).unwrap();
        assert!((rep.alpha_1r - 1.0).abs() < 1e-12);
        assert!(rep.applicable);
        assert!((rep.numeric_min - 0.25).abs() < 0.005, "extrapolated {}", rep.numeric_min);
        for v in &rep.rung_values {
            assert!(*v >= 0.25 - 1e-6);
        }
    }

    #[test]
    fn hardy_scaling_invariance() {
        let spec = DomainSpec::punctured(3).unwrap();
        let layer = LayerSpec::full(1.0).unwrap();
        let mut values = Vec::new();
        for a in [1.0, 7.0] {
            let field = CoefficientField::<f64>::exact(0.5, a).unwrap();
            let radial = field.radial_reduction(&spec).unwrap();
            let grid = Grid1d::build(1e-5, 1.0, 256, 3.0, 3).unwrap();
            let op = assemble(&radial, &grid, BcPair::dirichlet_dirichlet()).unwrap();
            let rep = hardy_min(&op, &field, &spec, &layer).unwrap();
            values.push((rep.numeric_min, rep.theoretical_bound));
        }
        assert!((values[0].0 / values[1].0 - 1.0).abs() < 1e-12);
        assert!((values[0].1 - values[1].1).abs() < 1e-14);
    }

    #[test]
    fn hardy_rung_monotone_under_refinement() {
        // Nested spaces force a non-increasing minimum; the lumped weight
        // quadrature differs per grid, so allow its O(h^2) wiggle.
        let spec = DomainSpec::interval(0.0, 1.0, crate::geometry::DegenerateEnds::Left).unwrap();
        let field = CoefficientField::<f64>::exact(0.0, 1.0).unwrap();
        let radial = field.radial_reduction(&spec).unwrap();
        let mut prev = f64::INFINITY;
        for cells in [32usize, 64, 128, 256, 512] {
            let grid = Grid1d::build(1e-4, 1.0, cells, 4.0, 1).unwrap();
            let op = assemble(&radial, &grid, BcPair::dirichlet_dirichlet()).unwrap();
            let v = hardy_rung(&op).unwrap().value;
            assert!(v <= prev + 1e-9, "cells {cells}: {v} > {prev}");
            prev = v;
        }
    }

    #[test]
    fn rellich_five_d_reference() {
        let spec = DomainSpec::punctured(5).unwrap();
        let (op, field, layer) = hardy_setup(&spec, 0.0, 2048, 1e-6);
        let rep = rellich_min(&op, &field, &spec, &layer).unwrap();
        assert!((rep.limiting_constant - 25.0 / 16.0).abs() < 1e-12);
        assert!(rep.applicable);
        let bound = rep.theoretical_bound.unwrap();
        assert!((bound - 25.0 / 16.0).abs() < 1e-9, "bound {bound}");
        assert!(
            rep.numeric_min >= 25.0 / 16.0 * 0.95,
            "finest rung {}",
            rep.numeric_min
        );
    }

    #[test]
    fn rellich_non_applicable_modes() {
        // Head condition fails: alpha_1 = 0.
        let spec = DomainSpec::punctured(2).unwrap();
        let (op, field, layer) = hardy_setup(&spec, 0.0, 64, 1e-3);
        let rep = rellich_min(&op, &field, &spec, &layer).unwrap();
        assert!(!rep.applicable && rep.theoretical_bound.is_none());
        // Degenerate limiting constant: d - d_H + 2 delta - 4 = 0.
        let spec4 = DomainSpec::punctured(4).unwrap();
        let (op4, field4, layer4) = hardy_setup(&spec4, 0.0, 64, 1e-3);
        let rep4 = rellich_min(&op4, &field4, &spec4, &layer4).unwrap();
        assert_eq!(rep4.limiting_constant, 0.0);
        assert!(!rep4.applicable);
    }

    #[test]
    fn rellich_continuous_at_two() {
        let spec = DomainSpec::punctured(5).unwrap();
        let layer = LayerSpec::full(1.0).unwrap();
        let mut vals = Vec::new();
        for delta in [1.99, 2.0] {
            let field = CoefficientField::<f64>::exact(delta, 1.0).unwrap();
            let radial = field.radial_reduction(&spec).unwrap();
            let grid = Grid1d::build(1e-4, 1.0, 256, 3.0, 5).unwrap();
            let op = assemble(&radial, &grid, BcPair::dirichlet_dirichlet()).unwrap();
            vals.push(rellich_min(&op, &field, &spec, &layer).unwrap().numeric_min);
        }
        assert!((vals[0] / vals[1] - 1.0).abs() < 0.05, "{vals:?}");
        let over = CoefficientField::<f64>::exact(2.5, 1.0).unwrap();
        let radial = over.radial_reduction(&spec).unwrap();
        let grid = Grid1d::build(1e-4, 1.0, 256, 3.0, 5).unwrap();
        let op = assemble(&radial, &grid, BcPair::dirichlet_dirichlet()).unwrap();
        assert!(rellich_min(&op, &over, &spec, &layer).is_err());
    }

    #[test]
    fn weyl_power_law_threshold() {
        for (delta, expect) in [(1.4, false), (1.5, true), (2.0, true), (0.0, false)] {
            let f = Radial1d::power_law(delta, 1.0).unwrap();
            let rep = weyl_classify(&f, 1.0).unwrap();
            assert_eq!(rep.essentially_self_adjoint, expect, "delta {delta}");
            assert!(rep.used_closed_form);
            // Ladder trend agrees with the closed form.
            assert_eq!(rep.trend.is_convergent(), !expect, "delta {delta}");
        }
    }

    #[test]
    fn weyl_near_critical_ladders() {
        let f = Radial1d::power_law(1.49, 1.0).unwrap();
        let rep = weyl_classify(&f, 1.0).unwrap();
        assert!(!rep.essentially_self_adjoint);
        assert_eq!(rep.trend, LadderTrend::GeometricallyConvergent);
        let g = Radial1d::power_law(1.51, 1.0).unwrap();
        assert!(weyl_classify(&g, 1.0).unwrap().essentially_self_adjoint);
    }

    #[test]
    fn weyl_general_profile_uses_ladder() {
        let f = Radial1d {
            delta: 1.0,
            profile: crate::field::Profile::RadialPolynomial { coeffs: vec![1.0, 1.0] },
            radial_dim: 1,
        };
        let rep = weyl_classify(&f, 1.0).unwrap();
        assert!(!rep.used_closed_form);
        assert!(!rep.essentially_self_adjoint);
    }

    #[test]
    fn deficiency_threshold_points() {
        for (delta, n, esa) in [(1.0, 1usize, false), (1.5, 0, true), (0.0, 1, false)] {
            let f = Radial1d::power_law(delta, 1.0).unwrap();
            let res = deficiency_indices(&f, 1.0, Bc::Dirichlet).unwrap();
            assert_eq!(res.n_plus, n, "delta {delta}");
            assert_eq!(res.n_minus, n);
            assert_eq!(res.essentially_self_adjoint, esa);
            assert_eq!(res.diagnostics.len(), 4);
        }
    }

    #[test]
    fn deficiency_radial_point_interaction() {
        // Radial 3-d Laplacian off the origin admits the 1/rho solution,
        // which is square integrable: limit circle.
        let f = Radial1d::power_law(0.0, 1.0).unwrap().with_radial_dim(3);
        let res = deficiency_indices(&f, 1.0, Bc::Dirichlet).unwrap();
        assert_eq!(res.classification, EndpointClass::LimitCircle);
        assert_eq!((res.n_plus, res.n_minus), (1, 1));
    }
}
