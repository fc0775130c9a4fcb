//! Subcommand implementations. Each one builds its inputs from the
//! effective configuration and renders a CSV document with a fixed header;
//! the first column of every row is the config hash.

use degenlab::field::CoefficientField;
use degenlab::geometry::DomainSpec;
use degenlab::grid::{assemble, AssembledOperator, Bc, BcPair, Grid1d};
use degenlab::spectral::{deficiency_indices, hardy_min, rellich_min, weyl_classify};
use degenlab::uniqueness::{
    classify, evolve, mass_conservation_test, outer_extent, witness, ClassificationVerdict,
    TimeScheme,
};
use degenlab::Mollifier64;

use crate::config::RunConfig;
use crate::output::{fmt_float, Table};
use crate::CliError;

pub const GEOMETRY_HEADER: &str = "config,domain,d,d_H,r,s,samples,gamma";
pub const CONDITIONS_HEADER: &str = "config,domain,delta,r,deviation_sup,divergence_sup,\
                                     normalized_divergence_sup,sufficiency,necessity";
pub const MOLLIFIER_HEADER: &str = "config,n,normalization,derivative_bound,uniform_alpha";
pub const SPECTRAL_HEADER: &str = "config,domain,d,d_H,delta,r,epsilon,cells,numeric_min,\
                                   theoretical_bound,limiting_constant,verdict";
pub const CLASSIFY_HEADER: &str = "config,domain,d,d_H,delta,verdict,provenance";
pub const DEFICIENCY_HEADER: &str = "config,domain,d,d_H,delta,outer_bc,n_plus,n_minus,\
                                     classification,essentially_self_adjoint";
pub const EVOLVE_HEADER: &str = "config,t,mass,energy";
pub const WITNESS_HEADER: &str = "config,delta,epsilon,l2_partial,energy_partial,verdict";
pub const SCAN_HEADER: &str = "config,target,parameter,value,outcome,measure";

pub fn run(name: &str, cfg: &RunConfig) -> Result<String, CliError> {
    let hash = cfg.hash();
    match name {
        "geometry" => geometry(cfg, &hash),
        "conditions" => conditions(cfg, &hash),
        "mollifier" => mollifier(cfg, &hash),
        "hardy" => hardy(cfg, &hash),
        "rellich" => rellich(cfg, &hash),
        "classify" => classify_cmd(cfg, &hash),
        "deficiency" => deficiency(cfg, &hash),
        "evolve" => evolve_cmd(cfg, &hash),
        "witness" => witness_cmd(cfg, &hash),
        "scan" => scan(cfg, &hash),
        other => Err(CliError::config(format!("unknown subcommand `{other}`"))),
    }
}

fn geometry(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let layer = cfg.build_layer()?;
    let gamma = spec.verify_trace_bound(&layer, cfg.layer.samples)?;
    let p = cfg.precision;
    let mut t = Table::new(GEOMETRY_HEADER);
    t.row(vec![
        hash.into(),
        spec.variant_name().into(),
        spec.ambient_dim().to_string(),
        spec.hausdorff_dim().to_string(),
        fmt_float(cfg.layer.r, p),
        fmt_float(cfg.layer.s, p),
        cfg.layer.samples.to_string(),
        fmt_float(gamma, p),
    ]);
    Ok(t.render())
}

fn conditions(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let r = cfg.layer.r;
    let ladder = [r, r / 2.0, r / 4.0, r / 8.0];
    let report = field.verify_degeneracy_conditions(&spec, &ladder, cfg.layer.samples, cfg.layer.tol)?;
    let p = cfg.precision;
    let suff = report.sufficiency_conditions_hold().to_string();
    let nec = report.necessity_conditions_hold().to_string();
    let mut t = Table::new(CONDITIONS_HEADER);
    for (i, &ri) in ladder.iter().enumerate() {
        t.row(vec![
            hash.into(),
            spec.variant_name().into(),
            fmt_float(field.delta, p),
            fmt_float(ri, p),
            fmt_float(report.deviation.sups[i], p),
            fmt_float(report.divergence.sups[i], p),
            fmt_float(report.normalized_divergence.sups[i], p),
            suff.clone(),
            nec.clone(),
        ]);
    }
    Ok(t.render())
}

fn mollifier(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    if cfg.mollifier.n.is_empty() {
        return Err(CliError::config("mollifier.n must be nonempty"));
    }
    let r = cfg.layer.r;
    let mut rows = Vec::new();
    let mut alpha = 0.0f64;
    for &n in &cfg.mollifier.n {
        let m = Mollifier64::new(n, r)?;
        let bound = m.derivative_bound_constant(4096);
        alpha = alpha.max(bound);
        rows.push((n, m.normalization(), bound));
    }
    let p = cfg.precision;
    let mut t = Table::new(MOLLIFIER_HEADER);
    for (n, norm, bound) in rows {
        t.row(vec![
            hash.into(),
            n.to_string(),
            fmt_float(norm, p),
            fmt_float(bound, p),
            fmt_float(alpha, p),
        ]);
    }
    Ok(t.render())
}

/// Radial reduction, graded grid and assembled operator for the spectral
/// and evolution commands. The grid spans the truncated radial extent with
/// homogeneous conditions from `bc`.
fn assemble_radial(
    cfg: &RunConfig,
    spec: &DomainSpec<f64>,
    field: &CoefficientField<f64>,
    bc: BcPair,
) -> Result<AssembledOperator<f64>, CliError> {
    let radial = field.radial_reduction(spec)?;
    let grid = Grid1d::build(
        cfg.grid.epsilon,
        outer_extent(spec),
        cfg.grid.cells,
        cfg.grid.grading,
        radial.radial_dim,
    )?;
    Ok(assemble(&radial, &grid, bc)?)
}

#[allow(clippy::too_many_arguments)]
fn spectral_row(
    cfg: &RunConfig,
    hash: &str,
    spec: &DomainSpec<f64>,
    delta: f64,
    numeric_min: f64,
    theoretical_bound: f64,
    limiting_constant: f64,
    applicable: bool,
) -> Vec<String> {
    let p = cfg.precision;
    vec![
        hash.into(),
        spec.variant_name().into(),
        spec.ambient_dim().to_string(),
        spec.hausdorff_dim().to_string(),
        fmt_float(delta, p),
        fmt_float(cfg.layer.r, p),
        fmt_float(cfg.grid.epsilon, p),
        cfg.grid.cells.to_string(),
        fmt_float(numeric_min, p),
        fmt_float(theoretical_bound, p),
        fmt_float(limiting_constant, p),
        (if applicable { "applicable" } else { "not_applicable" }).into(),
    ]
}

fn hardy(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let layer = cfg.build_layer()?;
    let op = assemble_radial(cfg, &spec, &field, BcPair::dirichlet_dirichlet())?;
    let rep = hardy_min(&op, &field, &spec, &layer)?;
    let mut t = Table::new(SPECTRAL_HEADER);
    t.row(spectral_row(
        cfg,
        hash,
        &spec,
        field.delta,
        rep.numeric_min,
        rep.theoretical_bound,
        f64::NAN,
        rep.applicable,
    ));
    Ok(t.render())
}

fn rellich(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let layer = cfg.build_layer()?;
    let op = assemble_radial(cfg, &spec, &field, BcPair::dirichlet_dirichlet())?;
    let rep = rellich_min(&op, &field, &spec, &layer)?;
    let mut t = Table::new(SPECTRAL_HEADER);
    t.row(spectral_row(
        cfg,
        hash,
        &spec,
        field.delta,
        rep.numeric_min,
        rep.theoretical_bound.unwrap_or(f64::NAN),
        rep.limiting_constant,
        rep.applicable,
    ));
    Ok(t.render())
}

fn run_classify(
    cfg: &RunConfig,
    spec: &DomainSpec<f64>,
    field: &CoefficientField<f64>,
) -> Result<ClassificationVerdict<f64>, CliError> {
    let r = cfg.layer.r;
    let ladder = [r, r / 2.0, r / 4.0];
    let report = field.verify_degeneracy_conditions(spec, &ladder, cfg.layer.samples, cfg.layer.tol)?;
    Ok(classify(spec, field, &report)?)
}

fn classify_cmd(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let verdict = run_classify(cfg, &spec, &field)?;
    let p = cfg.precision;
    let mut t = Table::new(CLASSIFY_HEADER);
    t.row(vec![
        hash.into(),
        spec.variant_name().into(),
        spec.ambient_dim().to_string(),
        spec.hausdorff_dim().to_string(),
        fmt_float(field.delta, p),
        verdict.verdict.name().into(),
        verdict.provenance.into(),
    ]);
    Ok(t.render())
}

fn bc_name(bc: Bc) -> &'static str {
    match bc {
        Bc::Dirichlet => "dirichlet",
        Bc::Neumann => "neumann",
    }
}

fn deficiency(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let radial = field.radial_reduction(&spec)?;
    let res = deficiency_indices(&radial, outer_extent(&spec), Bc::Dirichlet)?;
    let p = cfg.precision;
    let mut t = Table::new(DEFICIENCY_HEADER);
    t.row(vec![
        hash.into(),
        spec.variant_name().into(),
        spec.ambient_dim().to_string(),
        spec.hausdorff_dim().to_string(),
        fmt_float(field.delta, p),
        bc_name(res.outer_bc).into(),
        res.n_plus.to_string(),
        res.n_minus.to_string(),
        res.classification.name().into(),
        res.essentially_self_adjoint.to_string(),
    ]);
    Ok(t.render())
}

fn parse_scheme(name: &str) -> Result<TimeScheme, CliError> {
    match name {
        "implicit_euler" => Ok(TimeScheme::ImplicitEuler),
        "crank_nicolson" => Ok(TimeScheme::CrankNicolson),
        other => Err(CliError::config(format!(
            "evolution.scheme: unknown value `{other}` (expected implicit_euler|crank_nicolson)"
        ))),
    }
}

fn parse_bc_pair(name: &str) -> Result<BcPair, CliError> {
    match name {
        "dirichlet_dirichlet" => Ok(BcPair::dirichlet_dirichlet()),
        "dirichlet_neumann" => Ok(BcPair::dirichlet_neumann()),
        "neumann_neumann" => Ok(BcPair::neumann_neumann()),
        other => Err(CliError::config(format!(
            "evolution.bc: unknown value `{other}` (expected dirichlet_dirichlet|\
             dirichlet_neumann|neumann_neumann)"
        ))),
    }
}

/// Compactly supported cubic bump sitting well inside the truncated radial
/// extent, the same initial state the mass-conservation probe evolves.
fn initial_bump(op: &AssembledOperator<f64>, outer: f64) -> Vec<f64> {
    let center = 0.55 * outer;
    let width = 0.2 * outer;
    op.interpolate(|x| {
        let t = (x - center) / width;
        let s = (1.0 - t * t).max(0.0);
        s * s * s
    })
}

fn evolve_cmd(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let bc = parse_bc_pair(&cfg.evolution.bc)?;
    let scheme = parse_scheme(&cfg.evolution.scheme)?;
    let op = assemble_radial(cfg, &spec, &field, bc)?;
    let initial = initial_bump(&op, outer_extent(&spec));
    let trace = evolve(&op, &initial, cfg.evolution.dt, cfg.evolution.t_final, scheme)?;
    let p = cfg.precision;
    let mut t = Table::new(EVOLVE_HEADER);
    for k in 0..trace.times.len() {
        t.row(vec![
            hash.into(),
            fmt_float(trace.times[k], p),
            fmt_float(trace.masses[k], p),
            fmt_float(trace.energies[k], p),
        ]);
    }
    Ok(t.render())
}

fn witness_cmd(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let spec = cfg.build_domain()?;
    let field = cfg.build_field()?;
    let layer = cfg.build_layer()?;
    let rep = witness(&spec, &field, &layer)?;
    let p = cfg.precision;
    let verdict = rep.verdict.name();
    let mut t = Table::new(WITNESS_HEADER);
    for k in 0..rep.epsilons.len() {
        t.row(vec![
            hash.into(),
            fmt_float(rep.delta, p),
            fmt_float(rep.epsilons[k], p),
            fmt_float(rep.l2_partials[k], p),
            fmt_float(rep.energy_partials[k], p),
            verdict.into(),
        ]);
    }
    Ok(t.render())
}

/// One summary row per scanned value: a categorical outcome plus the
/// target's headline number.
fn scan_point(cfg: &RunConfig, target: &str) -> Result<(String, f64), CliError> {
    match target {
        "classify" => {
            let spec = cfg.build_domain()?;
            let field = cfg.build_field()?;
            let v = run_classify(cfg, &spec, &field)?;
            Ok((v.verdict.name().into(), v.l2_threshold))
        }
        "weyl" => {
            let spec = cfg.build_domain()?;
            let field = cfg.build_field()?;
            let radial = field.radial_reduction(&spec)?;
            let rep = weyl_classify(&radial, cfg.layer.r)?;
            let outcome = if rep.essentially_self_adjoint {
                "essentially_self_adjoint"
            } else {
                "not_essentially_self_adjoint"
            };
            Ok((outcome.into(), *rep.partials.last().expect("nonempty ladder")))
        }
        "deficiency" => {
            let spec = cfg.build_domain()?;
            let field = cfg.build_field()?;
            let radial = field.radial_reduction(&spec)?;
            let res = deficiency_indices(&radial, outer_extent(&spec), Bc::Dirichlet)?;
            Ok((res.classification.name().into(), res.n_plus as f64))
        }
        "hardy" => {
            let spec = cfg.build_domain()?;
            let field = cfg.build_field()?;
            let layer = cfg.build_layer()?;
            let op = assemble_radial(cfg, &spec, &field, BcPair::dirichlet_dirichlet())?;
            let rep = hardy_min(&op, &field, &spec, &layer)?;
            let outcome = if rep.applicable { "applicable" } else { "not_applicable" };
            Ok((outcome.into(), rep.numeric_min))
        }
        "rellich" => {
            let spec = cfg.build_domain()?;
            let field = cfg.build_field()?;
            let layer = cfg.build_layer()?;
            let op = assemble_radial(cfg, &spec, &field, BcPair::dirichlet_dirichlet())?;
            let rep = rellich_min(&op, &field, &spec, &layer)?;
            let outcome = if rep.applicable { "applicable" } else { "not_applicable" };
            Ok((outcome.into(), rep.numeric_min))
        }
        "mass" => {
            let spec = cfg.build_domain()?;
            let field = cfg.build_field()?;
            let rep = mass_conservation_test(
                &spec,
                &field,
                &cfg.evolution.ladder,
                cfg.evolution.dt,
                cfg.evolution.t_final,
            )?;
            Ok(("measured".into(), rep.extrapolated_loss))
        }
        other => Err(CliError::config(format!("unknown scan target `{other}`"))),
    }
}

fn scan(cfg: &RunConfig, hash: &str) -> Result<String, CliError> {
    let scan = cfg.scan()?.clone();
    let p = cfg.precision;
    let mut t = Table::new(SCAN_HEADER);
    for &value in &scan.values {
        let point = cfg.with_parameter(&scan.parameter, value)?;
        let (outcome, measure) = scan_point(&point, &scan.target)?;
        t.row(vec![
            hash.into(),
            scan.target.clone(),
            scan.parameter.clone(),
            fmt_float(value, p),
            outcome,
            fmt_float(measure, p),
        ]);
    }
    Ok(t.render())
}
