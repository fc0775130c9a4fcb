//! Uniqueness verdicts and their numerical probes.
//!
//! [`classify`] turns the degeneracy rate and the measured field conditions
//! into a verdict on the ordered ladder `not_markov_unique ->
//! markov_unique_not_self_adjoint -> critical_indeterminate -> self_adjoint`.
//! [`evolve`] runs the truncated Dirichlet semigroup, [`mass_conservation_test`]
//! probes probability conservation across a truncation ladder, and [`witness`]
//! builds the explicit boundary-singular functions that separate the maximal
//! operator from the Neumann form domain.

use crate::error::{Error, Result};
use crate::field::{CoefficientField, ConditionReport};
use crate::fit;
use crate::geometry::{DomainSpec, LayerSpec};
use crate::grid::{assemble, AssembledOperator, BcPair, Grid1d};
use crate::quad;
use crate::spectral::{ladder_trend, LadderTrend};
use crate::Real;

/// Uniqueness class of the operator, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    NotMarkovUnique,
    MarkovUniqueNotSelfAdjoint,
    SelfAdjoint,
    CriticalIndeterminate,
    OutsideProvenRegime,
}

impl UniquenessVerdict {
    pub fn name(self) -> &'static str {
        match self {
            UniquenessVerdict::NotMarkovUnique => "not_markov_unique",
            UniquenessVerdict::MarkovUniqueNotSelfAdjoint => "markov_unique_not_self_adjoint",
            UniquenessVerdict::SelfAdjoint => "self_adjoint",
            UniquenessVerdict::CriticalIndeterminate => "critical_indeterminate",
            UniquenessVerdict::OutsideProvenRegime => "outside_proven_regime",
        }
    }

    /// Position on the ordered ladder; `None` for verdicts outside it.
    pub fn ladder_rank(self) -> Option<u8> {
        match self {
            UniquenessVerdict::NotMarkovUnique => Some(0),
            UniquenessVerdict::MarkovUniqueNotSelfAdjoint => Some(1),
            UniquenessVerdict::CriticalIndeterminate => Some(2),
            UniquenessVerdict::SelfAdjoint => Some(3),
            UniquenessVerdict::OutsideProvenRegime => None,
        }
    }
}

/// Thresholds and verdict for one domain/field pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationVerdict<F> {
    /// Degeneracy rate below which Markov uniqueness fails.
    pub markov_threshold: F,
    /// Rate that must be strictly exceeded for self-adjointness.
    pub l2_threshold: F,
    pub verdict: UniquenessVerdict,
    /// Which statement fired: `Thm3.1`, `Thm3.4`, `critical-open`, `Ex3.7`
    /// or `none`.
    pub provenance: &'static str,
}

/// Applies the threshold decision table to a measured condition report.
///
/// The verdict is withheld when the conditions the fired statement relies on
/// did not verify on the layer ladder. The critical rate is always labelled
/// indeterminate; no numerical evidence overrides it.
pub fn classify<F: Real>(
    spec: &DomainSpec<F>,
    field: &CoefficientField<F>,
    report: &ConditionReport<F>,
) -> Result<ClassificationVerdict<F>> {
    let two = F::of(2.0);
    let gap = spec.codimension_gap();
    let markov_threshold = two - gap;
    let l2_threshold = two - gap / two;
    let delta = field.delta;
    let smooth_boundary_model = matches!(
        spec,
        DomainSpec::Interval { .. } | DomainSpec::BallInterior { .. } | DomainSpec::BallExterior { .. }
    );

    let (verdict, provenance) = if delta < markov_threshold {
        (UniquenessVerdict::NotMarkovUnique, "Thm3.4")
    } else if delta == l2_threshold {
        (UniquenessVerdict::CriticalIndeterminate, "critical-open")
    } else if delta > l2_threshold {
        if !report.sufficiency_conditions_hold() {
            return Err(Error::VerdictWithheld(
                "rate clears the self-adjointness threshold but the deviation or \
                 divergence condition failed on the layer ladder"
                    .into(),
            ));
        }
        (UniquenessVerdict::SelfAdjoint, "Thm3.1")
    } else if smooth_boundary_model && delta < F::of(1.5) {
        if !report.necessity_conditions_hold() {
            return Err(Error::VerdictWithheld(
                "rate sits in the Markov-unique band but the deviation or \
                 normalized-divergence condition failed on the layer ladder"
                    .into(),
            ));
        }
        (UniquenessVerdict::MarkovUniqueNotSelfAdjoint, "Thm3.4")
    } else if matches!(spec, DomainSpec::PuncturedSpace { .. }) {
        (UniquenessVerdict::OutsideProvenRegime, "Ex3.7")
    } else {
        (UniquenessVerdict::OutsideProvenRegime, "none")
    };

    Ok(ClassificationVerdict { markov_threshold, l2_threshold, verdict, provenance })
}

/// Time-stepping scheme for the truncated semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    ImplicitEuler,
    CrankNicolson,
}

impl TimeScheme {
    pub fn name(self) -> &'static str {
        match self {
            TimeScheme::ImplicitEuler => "implicit_euler",
            TimeScheme::CrankNicolson => "crank_nicolson",
        }
    }
}

/// Recorded evolution of one initial state.
#[derive(Debug, Clone)]
pub struct EvolutionTrace<F> {
    pub scheme: TimeScheme,
    pub dt: F,
    /// Inner truncation radius of the grid the evolution ran on.
    pub epsilon: F,
    pub times: Vec<F>,
    /// Lumped integral of the state at each time.
    pub masses: Vec<F>,
    /// Discrete energy of the state at each time.
    pub energies: Vec<F>,
    pub final_state: Vec<F>,
}

/// Runs the parabolic flow of the assembled operator from `initial`.
///
/// Implicit Euler solves `(M + dt K) u' = M u`; Crank-Nicolson solves
/// `(M + dt/2 K) u' = (M - dt/2 K) u`. The system matrix is factored once.
pub fn evolve<F: Real>(
    op: &AssembledOperator<F>,
    initial: &[F],
    dt: F,
    t_final: F,
    scheme: TimeScheme,
) -> Result<EvolutionTrace<F>> {
    if !(dt > F::zero()) {
        return Err(Error::invalid("time step must be positive"));
    }
    if initial.len() != op.n() {
        return Err(Error::invalid("initial state length must match the free nodes"));
    }
    if initial.iter().any(|v| !(*v >= F::zero()) || !v.is_finite()) {
        return Err(Error::invalid("initial state must be nonnegative and finite"));
    }
    let steps = (t_final / dt).to_usize().unwrap_or(0);
    if steps == 0 {
        return Err(Error::invalid("final time must cover at least one step"));
    }

    let theta = match scheme {
        TimeScheme::ImplicitEuler => F::one(),
        TimeScheme::CrankNicolson => F::of(0.5),
    };
    let mut system = op.stiffness.clone();
    for (d, m) in system.diag.iter_mut().zip(op.mass.iter()) {
        *d = *d * theta * dt + *m;
    }
    for o in system.off.iter_mut() {
        *o *= theta * dt;
    }
    let factor = system.ldlt()?;

    let mut state = initial.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut masses = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    let record = |t: F, v: &[F], times: &mut Vec<F>, masses: &mut Vec<F>, energies: &mut Vec<F>| {
        times.push(t);
        masses.push(op.lumped_integral(v));
        energies.push(op.stiffness.quad(v));
    };
    record(F::zero(), &state, &mut times, &mut masses, &mut energies);

    for k in 1..=steps {
        let rhs: Vec<F> = match scheme {
            TimeScheme::ImplicitEuler => {
                state.iter().zip(op.mass.iter()).map(|(u, m)| *u * *m).collect()
            }
            TimeScheme::CrankNicolson => {
                let ku = op.stiffness.mul_vec(&state);
                state
                    .iter()
                    .zip(op.mass.iter())
                    .zip(ku.iter())
                    .map(|((u, m), k)| *u * *m - theta * dt * *k)
                    .collect()
            }
        };
        state = factor.solve(&rhs);
        record(F::of_usize(k) * dt, &state, &mut times, &mut masses, &mut energies);
    }

    Ok(EvolutionTrace {
        scheme,
        dt,
        epsilon: op.grid.epsilon,
        times,
        masses,
        energies,
        final_state: state,
    })
}

/// Mass-loss ladder of the truncated Dirichlet semigroup.
#[derive(Debug, Clone, PartialEq)]
pub struct MassConservationReport<F> {
    /// Truncation radii, in input order (typically decreasing).
    pub epsilons: Vec<F>,
    /// `1 - mass(T)/mass(0)` for each truncation.
    pub losses: Vec<F>,
    /// Loss at the finest truncation, the ladder's limit estimate.
    pub extrapolated_loss: F,
}

/// Evolves a fixed interior bump with an absorbing inner boundary for each
/// truncation radius and reports the mass lost by time `t_final`.
///
/// A loss ladder heading to zero indicates the limiting dynamics conserves
/// probability; a loss bounded below indicates escape through the degenerate
/// boundary. Ladders that fail to be monotone within tolerance are refused.
pub fn mass_conservation_test<F: Real>(
    spec: &DomainSpec<F>,
    field: &CoefficientField<F>,
    epsilon_ladder: &[F],
    dt: F,
    t_final: F,
) -> Result<MassConservationReport<F>> {
    if epsilon_ladder.is_empty() {
        return Err(Error::invalid("empty truncation ladder"));
    }
    let radial = field.radial_reduction(spec)?;
    let outer = outer_extent(spec);
    let center = outer * F::of(0.55);
    let width = outer * F::of(0.2);

    let mut losses = Vec::with_capacity(epsilon_ladder.len());
    for &eps in epsilon_ladder {
        if !(eps > F::zero()) || eps >= outer * F::of(0.25) {
            return Err(Error::invalid("truncation must sit well inside the domain"));
        }
        let grid = Grid1d::build(eps, outer, 128, F::of(2.0), radial.radial_dim)?;
        let op = assemble(&radial, &grid, BcPair::dirichlet_neumann())?;
        let initial = op.interpolate(|x| {
            let t = (x - center) / width;
            let s = (F::one() - t * t).max(F::zero());
            s * s * s
        });
        let trace = evolve(&op, &initial, dt, t_final, TimeScheme::ImplicitEuler)?;
        let m0 = trace.masses[0];
        if !(m0 > F::zero()) {
            return Err(Error::invalid("initial bump carries no mass on this grid"));
        }
        losses.push(F::one() - *trace.masses.last().expect("nonempty trace") / m0);
    }

    for pair in losses.windows(2) {
        if pair[1] > pair[0] * F::of(1.05) + F::of(1e-6) {
            return Err(Error::Inconclusive(
                "mass-loss ladder is not monotone within tolerance".into(),
            ));
        }
    }

    let extrapolated_loss = *losses.last().expect("nonempty ladder");
    Ok(MassConservationReport { epsilons: epsilon_ladder.to_vec(), losses, extrapolated_loss })
}

/// Radial extent of the truncated computational domain for a model variant.
pub fn outer_extent<F: Real>(spec: &DomainSpec<F>) -> F {
    match spec {
        DomainSpec::Interval { left, right, .. } => *right - *left,
        // Radial probes truncate unbounded variants at unit radius.
        _ => F::one(),
    }
}

/// Outcome of the witness construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessVerdict {
    /// All three checks passed: the function lies in the maximal domain but
    /// outside the Neumann form domain.
    Confirmed,
    Rejected,
    Inconclusive,
}

impl WitnessVerdict {
    pub fn name(self) -> &'static str {
        match self {
            WitnessVerdict::Confirmed => "confirmed",
            WitnessVerdict::Rejected => "rejected",
            WitnessVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Ladder data and verdict for one witness candidate.
#[derive(Debug, Clone)]
pub struct WitnessReport<F> {
    pub delta: F,
    /// Truncation radii `r 2^-k` of the ladder.
    pub epsilons: Vec<F>,
    /// Squared norm over `[epsilon, r]` at each rung.
    pub l2_partials: Vec<F>,
    /// Energy over `[epsilon, r]` at each rung.
    pub energy_partials: Vec<F>,
    pub l2_trend: LadderTrend,
    pub energy_trend: LadderTrend,
    /// Log-log slope of the energy increments on the plateau rungs.
    pub fitted_exponent: Option<F>,
    /// Exponent the energy divergence should follow.
    pub expected_exponent: F,
    /// Largest observed image value on the plateau, by the closed form.
    pub hessian_sup: F,
    pub l2_finite: bool,
    pub energy_divergent: bool,
    pub hessian_bounded: bool,
    pub verdict: WitnessVerdict,
}

/// Builds the boundary-singular witness for the field and checks the three
/// defining properties on a dyadic truncation ladder.
///
/// The candidate is `g(x) chi(x)` with `g = x^(1-delta)` on the interval
/// model (`-log x` at `delta = 1`) and `g = rho^(2-d-delta)` on the punctured
/// model, where `chi` is a quintic cutoff equal to one on `[0, s]` and zero
/// beyond `r`. Checks: the squared-norm ladder must converge, the energy
/// ladder must diverge (its increments fitted against the expected power),
/// and the image under the operator must stay bounded on the plateau, which
/// the closed form reduces to a profile-derivative bound.
pub fn witness<F: Real>(
    spec: &DomainSpec<F>,
    field: &CoefficientField<F>,
    layer: &LayerSpec<F>,
) -> Result<WitnessReport<F>> {
    let radial = field.radial_reduction(spec)?;
    let delta = field.delta;
    let one = F::one();
    let two = F::of(2.0);

    let (power, log_case) = match spec {
        DomainSpec::Interval { .. } => {
            if !(delta >= one && delta < F::of(1.5)) {
                return Err(Error::invalid(format!(
                    "witness needs the rate in [1, 1.5) on the interval model, got {delta}"
                )));
            }
            (one - delta, delta == one)
        }
        DomainSpec::PuncturedSpace { dim } => {
            let d = F::of_usize(*dim);
            if !(delta > two - d && delta < two - d / two) {
                return Err(Error::invalid(format!(
                    "witness needs the rate in ({}, {}) on the punctured model, got {delta}",
                    two - d,
                    two - d / two
                )));
            }
            (two - d - delta, false)
        }
        _ => {
            return Err(Error::invalid(
                "witness construction needs the interval or punctured model",
            ))
        }
    };
    spec.validate_layer(layer)?;
    let (r, s) = (layer.r, layer.s);
    if !(s > F::zero()) {
        return Err(Error::invalid("witness cutoff needs an inner plateau (s > 0)"));
    }

    let g = |x: F| if log_case { -x.ln() } else { x.powf(power) };
    let g_prime = |x: F| {
        if log_case {
            -x.recip()
        } else {
            power * x.powf(power - one)
        }
    };
    // chi = 1 - S((x-s)/(r-s)) with the quintic step S = 6t^5 - 15t^4 + 10t^3.
    let chi = move |x: F| {
        if x <= s {
            one
        } else if x >= r {
            F::zero()
        } else {
            let t = (x - s) / (r - s);
            one - t * t * t * (t * (t * F::of(6.0) - F::of(15.0)) + F::of(10.0))
        }
    };
    let chi_prime = move |x: F| {
        if x <= s || x >= r {
            F::zero()
        } else {
            let t = (x - s) / (r - s);
            let sp = F::of(30.0) * t * t * (t - one) * (t - one);
            -sp / (r - s)
        }
    };

    let dm1 = F::of_usize(radial.radial_dim - 1);
    let nu = |x: F| g(x) * chi(x);
    let nu_prime = |x: F| g_prime(x) * chi(x) + g(x) * chi_prime(x);
    let l2_density = |x: F| nu(x) * nu(x) * x.powf(dm1);
    let energy_density = |x: F| {
        let v = nu_prime(x);
        radial.c(x) * v * v * x.powf(dm1)
    };

    const RUNGS: usize = 32;
    let mut epsilons = Vec::with_capacity(RUNGS);
    let mut l2_increments = Vec::with_capacity(RUNGS);
    let mut energy_increments = Vec::with_capacity(RUNGS);
    let mut l2_partials = Vec::with_capacity(RUNGS);
    let mut energy_partials = Vec::with_capacity(RUNGS);
    let mut upper = r;
    let (mut l2_sum, mut energy_sum) = (F::zero(), F::zero());
    for _ in 0..RUNGS {
        let lower = upper / two;
        let dl2 = quad::gl16(l2_density, lower, upper);
        let de = quad::gl16(energy_density, lower, upper);
        l2_sum += dl2;
        energy_sum += de;
        epsilons.push(lower);
        l2_increments.push(dl2);
        energy_increments.push(de);
        l2_partials.push(l2_sum);
        energy_partials.push(energy_sum);
        upper = lower;
    }

    let l2_trend = ladder_trend(&l2_increments);
    let energy_trend = ladder_trend(&energy_increments);

    // Fit only rungs fully inside the plateau, where the cutoff is inactive.
    let plateau: Vec<usize> =
        (0..RUNGS).filter(|&k| epsilons[k] * two <= s).collect();
    let fitted_exponent = if plateau.len() >= 2 {
        let tail = &plateau[plateau.len().saturating_sub(8)..];
        let xs: Vec<F> = tail.iter().map(|&k| epsilons[k]).collect();
        let ys: Vec<F> = tail.iter().map(|&k| energy_increments[k]).collect();
        fit::log_log_slope(&xs, &ys)
    } else {
        None
    };

    // Closed form of the image on the plateau: the principal part cancels,
    // leaving a profile-derivative term (zero exactly for constant profiles).
    let image_coeff = if log_case { one } else { power };
    let image = |x: F| (image_coeff * radial.a_prime(x) * x.powf(one - F::of_usize(radial.radial_dim))).abs();
    let mut hessian_sup = F::zero();
    let mut sup_increments = Vec::new();
    for &k in &plateau {
        let (lower, upper) = (epsilons[k], (epsilons[k] * two).min(s));
        let before = hessian_sup;
        let n_samples = 16;
        for j in 0..=n_samples {
            let t = F::of_usize(j) / F::of_usize(n_samples);
            let x = lower * (upper / lower).powf(t);
            hessian_sup = hessian_sup.max(image(x));
        }
        sup_increments.push(hessian_sup - before);
    }
    let hessian_trend = ladder_trend(&sup_increments);

    let l2_finite = l2_trend.is_convergent();
    let energy_divergent = energy_trend == LadderTrend::Diverging;
    let hessian_bounded = hessian_trend.is_convergent();
    let any_indeterminate = l2_trend == LadderTrend::Indeterminate
        || energy_trend == LadderTrend::Indeterminate
        || hessian_trend == LadderTrend::Indeterminate;
    let verdict = if any_indeterminate {
        WitnessVerdict::Inconclusive
    } else if l2_finite && energy_divergent && hessian_bounded {
        WitnessVerdict::Confirmed
    } else {
        WitnessVerdict::Rejected
    };

    Ok(WitnessReport {
        delta,
        epsilons,
        l2_partials,
        energy_partials,
        l2_trend,
        energy_trend,
        fitted_exponent,
        expected_exponent: power,
        hessian_sup,
        l2_finite,
        energy_divergent,
        hessian_bounded,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Perturbation, PerturbationMatrix, Profile, Radial1d};
    use crate::geometry::DegenerateEnds;

    fn ball(delta: f64) -> (DomainSpec<f64>, CoefficientField<f64>, ConditionReport<f64>) {
        let spec = DomainSpec::ball_interior(3, 1.0).unwrap();
        let field = CoefficientField::exact(delta, 1.0).unwrap();
        let report = field
            .verify_degeneracy_conditions(&spec, &[0.4, 0.2, 0.1, 0.05], 64, 1e-6)
            .unwrap();
        (spec, field, report)
    }

    fn line(delta: f64) -> (DomainSpec<f64>, CoefficientField<f64>, LayerSpec<f64>) {
        let spec = DomainSpec::interval(0.0, 1.0, DegenerateEnds::Left).unwrap();
        let field = CoefficientField::exact(delta, 1.0).unwrap();
        let layer = LayerSpec::new(0.5, 0.25).unwrap();
        (spec, field, layer)
    }

    #[test]
    fn classify_reference_verdicts() {
        let cases = [
            (1.6, UniquenessVerdict::SelfAdjoint, "Thm3.1"),
            (1.4, UniquenessVerdict::MarkovUniqueNotSelfAdjoint, "Thm3.4"),
            (0.8, UniquenessVerdict::NotMarkovUnique, "Thm3.4"),
            (1.5, UniquenessVerdict::CriticalIndeterminate, "critical-open"),
        ];
        for (delta, verdict, provenance) in cases {
            let (spec, field, report) = ball(delta);
            let v = classify(&spec, &field, &report).unwrap();
            assert_eq!(v.verdict, verdict, "delta {delta}");
            assert_eq!(v.provenance, provenance, "delta {delta}");
            assert_eq!(v.markov_threshold, 1.0);
            assert_eq!(v.l2_threshold, 1.5);
        }
    }

    #[test]
    fn classify_punctured_gap_cites_the_example() {
        let spec = DomainSpec::punctured(3).unwrap();
        let field = CoefficientField::<f64>::exact(0.0, 1.0).unwrap();
        let report = field
            .verify_degeneracy_conditions(&spec, &[0.4, 0.2, 0.1], 64, 1e-6)
            .unwrap();
        let v = classify(&spec, &field, &report).unwrap();
        assert_eq!(v.verdict, UniquenessVerdict::OutsideProvenRegime);
        assert_eq!(v.provenance, "Ex3.7");
        assert_eq!(v.markov_threshold, -1.0);
        assert_eq!(v.l2_threshold, 0.5);
    }

    #[test]
    fn classify_withholds_on_failed_conditions() {
        let spec = DomainSpec::ball_interior(3, 1.0).unwrap();
        // A perturbation decaying by only half an extra power breaks the
        // normalized-divergence condition the necessity argument needs.
        let field = CoefficientField::new(
            1.2,
            Profile::Constant(1.0),
            1.0,
            1.0,
            Some(Perturbation {
                matrix: PerturbationMatrix::Identity { scale: 1.0 },
                gamma: 0.5,
            }),
            1.0,
        )
        .unwrap();
        let report = field
            .verify_degeneracy_conditions(&spec, &[0.4, 0.2, 0.1, 0.05, 0.025], 64, 1e-6)
            .unwrap();
        assert!(!report.necessity_conditions_hold());
        let err = classify(&spec, &field, &report).unwrap_err();
        assert!(matches!(err, Error::VerdictWithheld(_)));
    }

    #[test]
    fn classify_is_monotone_in_the_rate() {
        let mut prev = 0u8;
        for k in 0..=40 {
            let delta = 0.05 * k as f64;
            let (spec, field, report) = ball(delta);
            let v = classify(&spec, &field, &report).unwrap();
            let rank = v.verdict.ladder_rank().expect("ball verdicts stay on the ladder");
            assert!(rank >= prev, "rank dropped at delta {delta}");
            prev = rank;
        }
    }

    fn bump_on(op: &AssembledOperator<f64>) -> Vec<f64> {
        op.interpolate(|x| {
            let t = (x - 0.55) / 0.2;
            (1.0 - t * t).max(0.0).powi(3)
        })
    }

    #[test]
    fn neumann_flow_conserves_mass_each_step() {
        let field = Radial1d::power_law(0.0, 1.0).unwrap();
        let grid = Grid1d::build(1e-3, 1.0, 64, 1.0, 1).unwrap();
        let op = assemble(&field, &grid, BcPair::neumann_neumann()).unwrap();
        let trace =
            evolve(&op, &bump_on(&op), 1e-3, 0.2, TimeScheme::ImplicitEuler).unwrap();
        let m0 = trace.masses[0];
        for pair in trace.masses.windows(2) {
            assert!((pair[1] - pair[0]).abs() <= 1e-12 * m0);
        }
    }

    #[test]
    fn implicit_euler_energy_never_increases() {
        let field = Radial1d::power_law(0.5, 1.0).unwrap();
        let grid = Grid1d::build(1e-3, 1.0, 64, 2.0, 1).unwrap();
        let op = assemble(&field, &grid, BcPair::dirichlet_neumann()).unwrap();
        let trace =
            evolve(&op, &bump_on(&op), 1e-3, 0.05, TimeScheme::ImplicitEuler).unwrap();
        for pair in trace.energies.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12) + 1e-16);
        }
    }

    #[test]
    fn schemes_agree_at_first_order_in_the_step() {
        let field = Radial1d::power_law(0.5, 1.0).unwrap();
        let grid = Grid1d::build(1e-3, 1.0, 64, 2.0, 1).unwrap();
        let op = assemble(&field, &grid, BcPair::dirichlet_neumann()).unwrap();
        let initial = bump_on(&op);
        let gap = |dt: f64| {
            let ie = evolve(&op, &initial, dt, 0.05, TimeScheme::ImplicitEuler).unwrap();
            let cn = evolve(&op, &initial, dt, 0.05, TimeScheme::CrankNicolson).unwrap();
            (ie.masses.last().unwrap() - cn.masses.last().unwrap()).abs()
        };
        let ratio = gap(2e-3) / gap(1e-3);
        assert!((1.5..2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn evolve_rejects_bad_input() {
        let field = Radial1d::power_law(0.5, 1.0).unwrap();
        let grid = Grid1d::build(1e-3, 1.0, 32, 1.0, 1).unwrap();
        let op = assemble(&field, &grid, BcPair::dirichlet_neumann()).unwrap();
        let good = bump_on(&op);
        assert!(evolve(&op, &good, 0.0, 0.1, TimeScheme::ImplicitEuler).is_err());
        assert!(evolve(&op, &good[1..], 1e-3, 0.1, TimeScheme::ImplicitEuler).is_err());
        let mut bad = good.clone();
        bad[0] = -1.0;
        assert!(evolve(&op, &bad, 1e-3, 0.1, TimeScheme::ImplicitEuler).is_err());
    }

    #[test]
    fn conservative_rate_keeps_mass() {
        let spec = DomainSpec::interval(0.0, 1.0, DegenerateEnds::Left).unwrap();
        let field = CoefficientField::<f64>::exact(1.5, 1.0).unwrap();
        let report =
            mass_conservation_test(&spec, &field, &[1e-2, 1e-3, 1e-4], 1e-3, 0.1).unwrap();
        assert!(report.extrapolated_loss <= 1e-3, "loss {}", report.extrapolated_loss);
    }

    #[test]
    fn subcritical_rate_leaks_mass() {
        let spec = DomainSpec::interval(0.0, 1.0, DegenerateEnds::Left).unwrap();
        let field = CoefficientField::<f64>::exact(0.5, 1.0).unwrap();
        let report =
            mass_conservation_test(&spec, &field, &[1e-2, 1e-3, 1e-4], 1e-3, 0.1).unwrap();
        assert!(report.losses.iter().all(|&l| l >= 1e-2), "losses {:?}", report.losses);
    }

    #[test]
    fn witness_quarter_power_confirmed() {
        let (spec, field, layer) = line(1.25);
        let w = witness(&spec, &field, &layer).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::Confirmed);
        assert!(w.l2_finite && w.energy_divergent && w.hessian_bounded);
        assert_eq!(w.hessian_sup, 0.0);
        let fitted = w.fitted_exponent.unwrap();
        assert!((fitted + 0.25).abs() < 0.03, "fitted {fitted}");
    }

    #[test]
    fn witness_log_case_confirmed() {
        let (spec, field, layer) = line(1.0);
        let w = witness(&spec, &field, &layer).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::Confirmed);
        let fitted = w.fitted_exponent.unwrap();
        assert!(fitted.abs() < 0.05, "fitted {fitted}");
    }

    #[test]
    fn witness_range_is_enforced() {
        let (spec, field, layer) = line(1.6);
        let err = witness(&spec, &field, &layer).unwrap_err();
        assert!(err.to_string().contains("[1, 1.5)"), "{err}");
    }

    #[test]
    fn witness_punctured_model() {
        let spec = DomainSpec::punctured(3).unwrap();
        let field = CoefficientField::<f64>::exact(0.0, 1.0).unwrap();
        let layer = LayerSpec::new(0.5, 0.25).unwrap();
        let w = witness(&spec, &field, &layer).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::Confirmed);
        assert_eq!(w.expected_exponent, -1.0);
        let fitted = w.fitted_exponent.unwrap();
        assert!((fitted + 1.0).abs() < 0.05, "fitted {fitted}");
    }

    #[test]
    fn confirmed_witness_matches_a_non_self_adjoint_verdict() {
        for delta in [1.0, 1.25, 1.4] {
            let (spec, field, layer) = line(delta);
            let w = witness(&spec, &field, &layer).unwrap();
            assert_eq!(w.verdict, WitnessVerdict::Confirmed, "delta {delta}");
            let report = field
                .verify_degeneracy_conditions(&spec, &[0.4, 0.2, 0.1], 64, 1e-6)
                .unwrap();
            let v = classify(&spec, &field, &report).unwrap();
            assert_ne!(v.verdict, UniquenessVerdict::SelfAdjoint, "delta {delta}");
        }
    }
}
