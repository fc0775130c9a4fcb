//! Graded 1-d / radial grids and finite-element assembly on truncated
//! boundary layers.
//!
//! The inner truncation at `epsilon > 0` with a Dirichlet row stands in for
//! the Friedrichs boundary condition; shrinking `epsilon` along a ladder and
//! extrapolating is the callers' job. Mass is lumped so that applying the
//! inverse mass is a diagonal scale and the discrete `||H phi||^2` needs no
//! inner solves.

use crate::error::{Error, Result};
use crate::field::Radial1d;
use crate::linalg::SymTridiag;
use crate::quad;
use crate::Real;
use std::fmt::Write as _;

/// Nodes on `[epsilon, L]`, clustered toward `epsilon` by a power grading.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1d<F> {
    pub nodes: Vec<F>,
    pub grading_exponent: F,
    pub epsilon: F,
    pub outer: F,
    /// Ambient dimension of the radial reduction; 1 means a plain interval.
    pub radial_dim: usize,
}

impl<F: Real> Grid1d<F> {
    /// Production grid: `cells >= 16`, strictly positive truncation.
    pub fn build(epsilon: F, outer: F, cells: usize, grading: F, radial_dim: usize) -> Result<Self> {
        if !(epsilon > F::zero()) {
            return Err(Error::invalid("grid truncation must be positive"));
        }
        if cells < 16 {
            return Err(Error::invalid("grid needs at least 16 cells"));
        }
        Self::geometry(epsilon, outer, cells, grading, radial_dim)
    }

    /// Relaxed constructor for pure geometry tests: allows `epsilon = 0`
    /// and tiny cell counts. Not suitable for spectral work.
    pub fn geometry(epsilon: F, outer: F, cells: usize, grading: F, radial_dim: usize) -> Result<Self> {
        if !(epsilon >= F::zero()) || !(epsilon < outer) || !outer.is_finite() {
            return Err(Error::invalid("grid needs 0 <= epsilon < outer extent"));
        }
        if cells == 0 {
            return Err(Error::invalid("grid needs at least one cell"));
        }
        if !(grading >= F::one()) {
            return Err(Error::invalid("grading exponent must be >= 1"));
        }
        if radial_dim == 0 {
            return Err(Error::invalid("radial dimension must be >= 1"));
        }
        let span = outer - epsilon;
        let cells_f = F::of_usize(cells);
        let mut nodes = Vec::with_capacity(cells + 1);
        for i in 0..=cells {
            let t = F::of_usize(i) / cells_f;
            nodes.push(epsilon + span * t.powf(grading));
        }
        nodes[cells] = outer;
        Ok(Grid1d { nodes, grading_exponent: grading, epsilon, outer, radial_dim })
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Exponent of the radial volume weight `rho^(d-1)`.
    pub fn radial_weight_exponent(&self) -> usize {
        self.radial_dim - 1
    }
}

/// Boundary condition at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    Neumann,
}

/// Conditions at the inner (truncation) and outer endpoints. The inner
/// condition is Dirichlet for all spectral work; inner Neumann is kept for
/// conservation checks with regular coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BcPair {
    pub inner: Bc,
    pub outer: Bc,
}

impl BcPair {
    pub const fn dirichlet_dirichlet() -> Self {
        BcPair { inner: Bc::Dirichlet, outer: Bc::Dirichlet }
    }
    pub const fn dirichlet_neumann() -> Self {
        BcPair { inner: Bc::Dirichlet, outer: Bc::Neumann }
    }
    pub const fn neumann_neumann() -> Self {
        BcPair { inner: Bc::Neumann, outer: Bc::Neumann }
    }
}

/// Matrix selector for the coordinate-text export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Stiffness,
    Mass,
    HardyWeight,
    RellichWeight,
}

/// Discretized operator on the free (non-eliminated) nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledOperator<F> {
    pub grid: Grid1d<F>,
    pub bc: BcPair,
    /// P1 stiffness of `int c(rho) phi' psi' rho^(d-1)`.
    pub stiffness: SymTridiag<F>,
    /// Lumped mass diagonal of `int phi psi rho^(d-1)`.
    pub mass: Vec<F>,
    /// Diagonal of the weighted form `int a rho^(delta-2) phi^2 rho^(d-1)`.
    pub hardy_weight: Vec<F>,
    /// Consistent (tridiagonal) form of the same weighted mass. Using it as
    /// the quotient denominator keeps nested-refinement monotonicity exact,
    /// which the lumped diagonal cannot guarantee.
    pub hardy_mass: SymTridiag<F>,
    /// Diagonal of `int (a rho^(delta-2))^2 phi^2 rho^(d-1)`.
    pub rellich_weight: Vec<F>,
    /// Coordinates of the free nodes, in grid order.
    pub free_nodes: Vec<F>,
}

impl<F: Real> AssembledOperator<F> {
    pub fn n(&self) -> usize {
        self.free_nodes.len()
    }

    /// Nodal interpolation of a function on the free nodes.
    pub fn interpolate(&self, f: impl Fn(F) -> F) -> Vec<F> {
        self.free_nodes.iter().map(|&x| f(x)).collect()
    }

    /// Total weighted integral `sum_i m_i v_i` (lumped `int v rho^(d-1)`).
    pub fn lumped_integral(&self, v: &[F]) -> F {
        self.mass.iter().zip(v).map(|(&m, &vi)| m * vi).sum()
    }

    /// Coordinate-format text (row, col, value), row-major, 17 significant
    /// digits, for external inspection.
    pub fn coordinate_text(&self, kind: MatrixKind) -> String {
        let mut s = String::new();
        let mut push = |r: usize, c: usize, v: F| {
            writeln!(s, "{} {} {:.16e}", r, c, v.to_f64().unwrap_or(f64::NAN)).unwrap();
        };
        match kind {
            MatrixKind::Stiffness => {
                let t = &self.stiffness;
                for i in 0..t.n() {
                    if i > 0 {
                        push(i, i - 1, t.off[i - 1]);
                    }
                    push(i, i, t.diag[i]);
                    if i + 1 < t.n() {
                        push(i, i + 1, t.off[i]);
                    }
                }
            }
            MatrixKind::Mass => {
                for (i, &v) in self.mass.iter().enumerate() {
                    push(i, i, v);
                }
            }
            MatrixKind::HardyWeight => {
                for (i, &v) in self.hardy_weight.iter().enumerate() {
                    push(i, i, v);
                }
            }
            MatrixKind::RellichWeight => {
                for (i, &v) in self.rellich_weight.iter().enumerate() {
                    push(i, i, v);
                }
            }
        }
        s
    }
}

/// Assembles stiffness, lumped mass and the two singular weight diagonals
/// for the radial coefficient `c(rho) = a(rho) rho^delta` on the grid.
///
/// Coefficient cell integrals are exact for constant profiles and mid-cell
/// quadrature otherwise; the volume weight `rho^(d-1)` is always integrated
/// exactly. Dirichlet rows are eliminated.
pub fn assemble<F: Real>(
    field: &Radial1d<F>,
    grid: &Grid1d<F>,
    bc: BcPair,
) -> Result<AssembledOperator<F>> {
    if field.radial_dim != grid.radial_dim {
        return Err(Error::invalid(format!(
            "field radial dimension {} does not match grid dimension {}",
            field.radial_dim, grid.radial_dim
        )));
    }
    let n_nodes = grid.nodes.len();
    let d = F::of_usize(grid.radial_dim);
    let dm1 = grid.radial_dim - 1;
    let two = F::of(2.0);

    // Full-grid assembly before boundary elimination.
    let mut diag = vec![F::zero(); n_nodes];
    let mut off = vec![F::zero(); n_nodes - 1];
    let mut mass = vec![F::zero(); n_nodes];
    let mut wdiag = vec![F::zero(); n_nodes];
    let mut woff = vec![F::zero(); n_nodes - 1];
    // Exponent of the combined first-order weight a rho^(delta-2) rho^(d-1).
    let q = field.delta - two + F::of_usize(dm1);
    for i in 0..n_nodes - 1 {
        let (lo, hi) = (grid.nodes[i], grid.nodes[i + 1]);
        let h = hi - lo;
        if !(h > F::zero()) {
            return Err(Error::invalid("grid nodes must be strictly increasing"));
        }
        let coeff_integral = if field.is_power_law() {
            // int a rho^(delta + d - 1) [exact]
            let p = field.delta + d;
            if lo > F::zero() {
                field.a(lo) * quad::power_primitive(p - F::one(), lo, hi)
            } else {
                field.a(hi) * hi.powf(p) / p
            }
        } else {
            let mid = (lo + hi) / two;
            field.c(mid) * mid.powf(F::of_usize(dm1)) * h
        };
        if coeff_integral < F::zero() {
            return Err(Error::invalid("coefficient must be nonnegative on the grid"));
        }
        let stiff = coeff_integral / (h * h);
        diag[i] += stiff;
        diag[i + 1] += stiff;
        off[i] -= stiff;
        // int rho^(d-1) over the cell [exact], split evenly.
        let vol = if lo > F::zero() {
            quad::power_primitive(d - F::one(), lo, hi)
        } else {
            hi.powf(d) / d
        };
        let half = vol / two;
        mass[i] += half;
        mass[i + 1] += half;
        // Consistent weighted mass, integrated in the scaled cell variable so
        // the hat-function factors stay exact on narrow cells. The entries
        // touching a node at zero are dropped by Dirichlet elimination (a free
        // node at zero is rejected below); the surviving one converges because
        // q + 3 = delta + d > 0.
        if lo > F::zero() {
            let w = |t: F| {
                let x = lo + t * h;
                field.a(x) * x.powf(q) * h
            };
            let one = F::one();
            wdiag[i] += quad::gl16(|t| w(t) * (one - t) * (one - t), F::zero(), one);
            wdiag[i + 1] += quad::gl16(|t| w(t) * t * t, F::zero(), one);
            woff[i] += quad::gl16(|t| w(t) * (one - t) * t, F::zero(), one);
        } else {
            let w_rr = if field.is_power_law() {
                field.a(hi) * hi.powf(q + F::one()) / (q + F::of(3.0))
            } else {
                quad::gl16(
                    |t| field.a(t * h) * (t * h).powf(q) * t * t * h,
                    F::zero(),
                    F::one(),
                )
            };
            wdiag[i + 1] += w_rr;
        }
    }

    let start = match bc.inner {
        Bc::Dirichlet => 1,
        Bc::Neumann => 0,
    };
    let end = match bc.outer {
        Bc::Dirichlet => n_nodes - 1,
        Bc::Neumann => n_nodes,
    };
    if start >= end {
        return Err(Error::invalid("no free nodes left after boundary elimination"));
    }

    let free_nodes: Vec<F> = grid.nodes[start..end].to_vec();
    let stiffness = SymTridiag {
        diag: diag[start..end].to_vec(),
        off: off[start..end - 1].to_vec(),
    };
    let hardy_mass = SymTridiag {
        diag: wdiag[start..end].to_vec(),
        off: woff[start..end - 1].to_vec(),
    };
    let mass: Vec<F> = mass[start..end].to_vec();
    let mut hardy_weight = Vec::with_capacity(free_nodes.len());
    let mut rellich_weight = Vec::with_capacity(free_nodes.len());
    for (&x, &m) in free_nodes.iter().zip(mass.iter()) {
        if !(x > F::zero()) {
            return Err(Error::invalid("singular weights need strictly positive nodes"));
        }
        let w = field.a(x) * x.powf(field.delta - two);
        hardy_weight.push(w * m);
        rellich_weight.push(w * w * m);
    }

    Ok(AssembledOperator {
        grid: grid.clone(),
        bc,
        stiffness,
        mass,
        hardy_weight,
        hardy_mass,
        rellich_weight,
        free_nodes,
    })
}

/// Continuum reference value of the energy `int c (phi')^2 rho^(d-1)`,
/// by composite Gauss quadrature. Used as an assembly oracle in tests.
pub fn continuum_energy<F: Real>(
    field: &Radial1d<F>,
    lo: F,
    hi: F,
    phi_prime: impl Fn(F) -> F,
    panels: usize,
) -> F {
    let dm1 = F::of_usize(field.radial_dim - 1);
    let f = |x: F| {
        let p = phi_prime(x);
        field.c(x) * p * p * x.powf(dm1)
    };
    let mut acc = F::zero();
    let w = (hi - lo) / F::of_usize(panels);
    for k in 0..panels {
        let a = lo + w * F::of_usize(k);
        acc += quad::gl16(f, a, a + w);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Radial1d;
    use crate::fit;
    use crate::linalg::smallest_pencil_eigenvalue;

    #[test]
    fn uniform_grid_nodes() {
        let g = Grid1d::<f64>::geometry(0.01, 1.0, 4, 1.0, 1).unwrap();
        let expect = [0.01, 0.2575, 0.505, 0.7525, 1.0];
        for (a, b) in g.nodes.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn graded_geometry_grid() {
        let g = Grid1d::<f64>::geometry(0.0, 1.0, 2, 2.0, 3).unwrap();
        assert_eq!(g.nodes, vec![0.0, 0.25, 1.0]);
        assert_eq!(g.radial_weight_exponent(), 2);
    }

    #[test]
    fn build_grid_preconditions() {
        assert!(Grid1d::<f64>::build(0.0, 1.0, 32, 1.0, 1).is_err());
        assert!(Grid1d::<f64>::build(0.01, 1.0, 8, 1.0, 1).is_err());
        assert!(Grid1d::<f64>::build(0.01, 1.0, 32, 0.5, 1).is_err());
        assert!(Grid1d::<f64>::build(1.0, 0.5, 32, 1.0, 1).is_err());
        assert!(Grid1d::<f64>::build(1e-6, 1.0, 32, 2.0, 3).is_ok());
    }

    #[test]
    fn flat_coefficient_gives_second_difference_rows() {
        let g = Grid1d::<f64>::build(0.5, 1.5, 16, 1.0, 1).unwrap();
        let f = Radial1d::power_law(0.0, 1.0).unwrap();
        let op = assemble(&f, &g, BcPair::dirichlet_dirichlet()).unwrap();
        let h = 1.0 / 16.0;
        for &v in &op.stiffness.diag {
            assert!((v - 2.0 / h).abs() < 1e-10);
        }
        for &v in &op.stiffness.off {
            assert!((v + 1.0 / h).abs() < 1e-10);
        }
        for &m in &op.mass {
            assert!((m - h).abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_rows_sum_to_zero() {
        let g = Grid1d::<f64>::build(0.5, 1.5, 32, 1.5, 3).unwrap();
        let f = Radial1d::power_law(1.0, 2.0).unwrap().with_radial_dim(3);
        let op = assemble(&f, &g, BcPair::neumann_neumann()).unwrap();
        for s in op.stiffness.row_sums() {
            assert!(s.abs() < 1e-10);
        }
        assert_eq!(op.n(), 33);
        let opd = assemble(&f, &g, BcPair::dirichlet_dirichlet()).unwrap();
        assert_eq!(opd.n(), 31);
    }

    #[test]
    fn dirichlet_laplacian_eigenvalue() {
        let g = Grid1d::<f64>::build(1e-9, 1.0, 256, 1.0, 1).unwrap();
        let f = Radial1d::power_law(0.0, 1.0).unwrap();
        let op = assemble(&f, &g, BcPair::dirichlet_dirichlet()).unwrap();
        let fac = op.stiffness.ldlt().unwrap();
        let out = smallest_pencil_eigenvalue(
            |rhs| fac.solve(rhs),
            |v| op.stiffness.quad(v),
            &op.mass,
            1e-12,
            500,
        )
        .unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((out.value - pi2).abs() < 0.01 * pi2, "got {}", out.value);
    }

    #[test]
    fn discrete_energy_converges_at_second_order() {
        let field = Radial1d::power_law(1.5, 2.0).unwrap().with_radial_dim(3);
        let reference = continuum_energy(&field, 0.5, 1.5, |x: f64| x.cos(), 8);
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for cells in [16usize, 32, 64, 128] {
            let g = Grid1d::build(0.5, 1.5, cells, 1.0, 3).unwrap();
            let op = assemble(&field, &g, BcPair::neumann_neumann()).unwrap();
            let v = op.interpolate(|x| x.sin());
            errs.push((op.stiffness.quad(&v) - reference).abs());
            hs.push(1.0 / cells as f64);
        }
        let slope = fit::log_log_slope(&hs, &errs).unwrap();
        assert!(slope >= 1.9, "slope {slope}");
    }

    #[test]
    fn singular_weights_are_positive_and_ordered() {
        let g = Grid1d::<f64>::build(1e-4, 1.0, 64, 2.0, 1).unwrap();
        let f = Radial1d::power_law(0.5, 1.0).unwrap();
        let op = assemble(&f, &g, BcPair::dirichlet_neumann()).unwrap();
        for (w, w2) in op.hardy_weight.iter().zip(op.rellich_weight.iter()) {
            assert!(*w > 0.0 && *w2 > 0.0);
        }
        // delta < 2: the weight blows up toward the truncation.
        assert!(op.hardy_weight[0] / op.mass[0] > op.hardy_weight[10] / op.mass[10]);
    }

    #[test]
    fn weighted_mass_matches_continuum_quadratic() {
        // phi^T W phi with phi = sin interpolated on the nodes should agree
        // with int a x^(delta-2) x^(d-1) sin(x)^2 dx to quadrature order.
        let g = Grid1d::<f64>::build(1e-3, 1.0, 512, 2.0, 3).unwrap();
        let f = Radial1d::power_law(0.5, 2.0).unwrap().with_radial_dim(3);
        let op = assemble(&f, &g, BcPair::neumann_neumann()).unwrap();
        let phi: Vec<f64> = op.free_nodes.iter().map(|x| x.sin()).collect();
        let discrete = op.hardy_mass.quad(&phi);
        let exact = crate::quad::gl16_log_graded(
            |x: f64| 2.0 * x.powf(0.5 - 2.0 + 2.0) * x.sin() * x.sin(),
            1e-3,
            1.0,
            64,
        );
        assert!(
            (discrete / exact - 1.0).abs() < 1e-4,
            "discrete {discrete} exact {exact}"
        );
    }

    #[test]
    fn coordinate_export_shape() {
        let g = Grid1d::<f64>::geometry(0.25, 1.0, 3, 1.0, 1).unwrap();
        let f = Radial1d::power_law(0.0, 1.0).unwrap();
        let op = assemble(&f, &g, BcPair::dirichlet_dirichlet()).unwrap();
        let txt = op.coordinate_text(MatrixKind::Stiffness);
        let lines: Vec<&str> = txt.lines().collect();
        // Two free nodes: 2 diagonal + 2 off-diagonal entries.
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("0 0 "));
        assert_eq!(txt, op.coordinate_text(MatrixKind::Stiffness));
    }

    #[test]
    fn assembly_rejects_dimension_mismatch() {
        let g = Grid1d::<f64>::build(0.01, 1.0, 32, 1.0, 3).unwrap();
        let f = Radial1d::power_law(1.0, 1.0).unwrap();
        assert!(assemble(&f, &g, BcPair::dirichlet_dirichlet()).is_err());
    }
}
