//! Finite-difference Laplace solver for the capacitor quadrant.
//!
//! Interior and symmetry nodes use the 5-point stencil; a symmetry plane
//! reflects its inner neighbour into the missing ghost node.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::geometry::{classify_nodes, dirichlet_value, CapacitorSpec, GridSpec, NodeClass};
use crate::linalg::solve_dense;
use crate::scalar::Scalar;

/// Largest node count accepted by [`solve_direct`].
pub const DIRECT_SOLVE_LIMIT: usize = 10_000;

/// Potential sampled on every node of a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                context: "field values",
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self {
            values: vec![T::zero(); grid.len()],
            grid,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Relaxation factor, strictly inside (0, 2).
    pub omega: T,
    /// Convergence threshold on the largest per-sweep update.
    pub tol: T,
    pub max_iters: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            omega: T::lit(1.8),
            tol: T::lit(1e-8),
            max_iters: 100_000,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > T::zero() && self.omega < T::lit(2.0)) {
            return Err(Error::InvalidConfig(format!(
                "omega must lie in (0, 2), got {}",
                self.omega
            )));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport<T> {
    pub iterations: usize,
    pub final_update: T,
    pub converged: bool,
}

/// Stencil neighbours of node `(i, j)` as flat indices `[west, east, south, north]`,
/// with symmetry planes mirrored onto the inner neighbour.
#[inline]
fn neighbours<T: Scalar>(grid: &GridSpec<T>, i: usize, j: usize) -> [usize; 4] {
    let east = grid.index(i + 1, j);
    let west = if i == 0 { east } else { grid.index(i - 1, j) };
    let north = grid.index(i, j + 1);
    let south = if j == 0 { north } else { grid.index(i, j - 1) };
    [west, east, south, north]
}

/// Fresh field with Dirichlet nodes set and everything else zero.
fn initial_field<T: Scalar>(spec: &CapacitorSpec<T>, classes: &[NodeClass]) -> Vec<T> {
    classes
        .iter()
        .map(|&c| dirichlet_value(c, spec).unwrap_or_else(T::zero))
        .collect()
}

/// Successive over-relaxation with lexicographic in-place sweeps.
///
/// Iteration stops once the largest update of a full sweep is at most
/// `cfg.tol`. Hitting `max_iters` is not an error: the report carries
/// `converged = false` and the caller decides.
pub fn solve_sor<T: Scalar>(
    spec: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
    cfg: &SolverConfig<T>,
) -> Result<(Field<T>, SolveReport<T>)> {
    cfg.validate()?;
    let classes = classify_nodes(spec, grid)?;
    let mut v = initial_field(spec, &classes);

    let cx = (grid.hx * grid.hx).recip();
    let cy = (grid.hy * grid.hy).recip();
    let inv_diag = (T::lit(2.0) * (cx + cy)).recip();
    let omega = cfg.omega;

    // Free nodes with their neighbours, in sweep order.
    let free: Vec<(usize, [usize; 4])> = classes
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_dirichlet())
        .map(|(idx, _)| {
            let (i, j) = grid.coords_of(idx);
            (idx, neighbours(grid, i, j))
        })
        .collect();

    let mut report = SolveReport {
        iterations: 0,
        final_update: T::zero(),
        converged: false,
    };
    while report.iterations < cfg.max_iters {
        let mut max_update = T::zero();
        for &(idx, [w, e, s, n]) in &free {
            let gs = ((v[w] + v[e]) * cx + (v[s] + v[n]) * cy) * inv_diag;
            let delta = omega * (gs - v[idx]);
            v[idx] += delta;
            max_update = max_update.max(delta.abs());
        }
        report.iterations += 1;
        report.final_update = max_update;
        if max_update <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    Ok((Field::new(*grid, v)?, report))
}

/// Assembles the same discrete system as [`solve_sor`] densely and solves it
/// by Gaussian elimination. Intended as an independent oracle.
pub fn solve_direct<T: Scalar>(spec: &CapacitorSpec<T>, grid: &GridSpec<T>) -> Result<Field<T>> {
    let classes = classify_nodes(spec, grid)?;
    let (a, b) = assemble_system(spec, grid, &classes)?;
    let x = solve_dense(a, b, T::lit(1e-10))?;
    Field::new(*grid, x.to_vec())
}

/// Dense matrix and right-hand side of the discrete Laplace problem.
pub fn assemble_system<T: Scalar>(
    spec: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
    classes: &[NodeClass],
) -> Result<(Array2<T>, Array1<T>)> {
    let n = grid.len();
    if n > DIRECT_SOLVE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DIRECT_SOLVE_LIMIT,
        });
    }
    if classes.len() != n {
        return Err(Error::DimensionMismatch {
            context: "node classes",
            expected: n,
            actual: classes.len(),
        });
    }
    let cx = (grid.hx * grid.hx).recip();
    let cy = (grid.hy * grid.hy).recip();
    let mut a = Array2::zeros((n, n));
    let mut b = Array1::zeros(n);
    for (idx, &class) in classes.iter().enumerate() {
        if let Some(value) = dirichlet_value(class, spec) {
            a[[idx, idx]] = T::one();
            b[idx] = value;
            continue;
        }
        let (i, j) = grid.coords_of(idx);
        let [w, e, s, nn] = neighbours(grid, i, j);
        a[[idx, idx]] = -T::lit(2.0) * (cx + cy);
        a[[idx, w]] += cx;
        a[[idx, e]] += cx;
        a[[idx, s]] += cy;
        a[[idx, nn]] += cy;
    }
    Ok((a, b))
}

/// Largest absolute 5-point Laplacian over interior nodes,
/// `|(V_e - 2V + V_w)/hx^2 + (V_n - 2V + V_s)/hy^2|`.
pub fn laplacian_residual<T: Scalar>(field: &Field<T>, classes: &[NodeClass]) -> T {
    let grid = &field.grid;
    let cx = (grid.hx * grid.hx).recip();
    let cy = (grid.hy * grid.hy).recip();
    let two = T::lit(2.0);
    classes
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == NodeClass::Interior)
        .map(|(idx, _)| {
            let (i, j) = grid.coords_of(idx);
            let [w, e, s, n] = neighbours(grid, i, j);
            let v = &field.values;
            ((v[e] - two * v[idx] + v[w]) * cx + (v[n] - two * v[idx] + v[s]) * cy).abs()
        })
        .fold(T::zero(), T::max)
}

/// Discrete integral of the potential over the quadrant: every node carries
/// an equal share `area / N` of the quadrant area.
pub fn field_volume<T: Scalar>(field: &Field<T>) -> T {
    let weight = field.grid.quadrant_area() / T::from_usize_exact(field.grid.len());
    field.values.iter().copied().sum::<T>() * weight
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_potential_converges_in_one_sweep() {
        let spec = CapacitorSpec {
            v0: 0.0,
            ..CapacitorSpec::with_d(0.5)
        };
        let grid = GridSpec::new(9, 9, &spec).unwrap();
        let (f, rep) = solve_sor(&spec, &grid, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert!(f.values.iter().all(|&v| v == 0.0));
        let fd = solve_direct(&spec, &grid).unwrap();
        assert!(fd.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn plate_nodes_hold_v0_exactly() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(5, 5, &spec).unwrap();
        let (f, _) = solve_sor(&spec, &grid, &SolverConfig::default()).unwrap();
        let classes = classify_nodes(&spec, &grid).unwrap();
        for (v, c) in f.values.iter().zip(&classes) {
            match c {
                NodeClass::InnerPlate => assert_eq!(*v, 1.0),
                NodeClass::OuterWall => assert_eq!(*v, 0.0),
                _ => {}
            }
        }
    }

    #[test]
    fn sor_matches_direct_on_9x9() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(9, 9, &spec).unwrap();
        let (f, rep) = solve_sor(&spec, &grid, &SolverConfig::with_tol(1e-12)).unwrap();
        assert!(rep.converged);
        let fd = solve_direct(&spec, &grid).unwrap();
        assert!(max_abs_diff(&f.values, &fd.values) <= 1e-6);
    }

    #[test]
    fn single_unknown_is_mean_of_neighbours() {
        // 3x3 grid with every border node pinned: only the centre is free.
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(3, 3, &spec).unwrap();
        let mut classes = vec![NodeClass::OuterWall; 9];
        classes[4] = NodeClass::Interior;
        classes[1] = NodeClass::InnerPlate;
        classes[0] = NodeClass::InnerPlate;
        let (a, b) = assemble_system(&spec, &grid, &classes).unwrap();
        let x: Array1<f64> = solve_dense(a, b, 1e-14).unwrap();
        // Neighbours of the centre: west(3)=0, east(5)=0, south(1)=1, north(7)=0.
        assert!((x[4] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn direct_solution_residual_is_tiny() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(9, 9, &spec).unwrap();
        let classes = classify_nodes(&spec, &grid).unwrap();
        let (a, b): (Array2<f64>, Array1<f64>) = assemble_system(&spec, &grid, &classes).unwrap();
        let f = solve_direct(&spec, &grid).unwrap();
        let x = Array1::from(f.values.clone());
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.abs() <= 1e-10));
        assert!(laplacian_residual(&f, &classes) <= 1e-8);
    }

    #[test]
    fn direct_solution_monotone_in_d() {
        let grid = GridSpec::new(17, 17, &CapacitorSpec::<f64>::default()).unwrap();
        let lo = solve_direct(&CapacitorSpec::with_d(0.3), &grid).unwrap();
        let hi = solve_direct(&CapacitorSpec::with_d(0.7), &grid).unwrap();
        let worst = lo
            .values
            .iter()
            .zip(&hi.values)
            .map(|(l, h)| l - h)
            .fold(f64::MIN, f64::max); // Dense elimination leaves ~1e-13 of roundoff where the fields nearly coincide.
        assert!(worst <= 1e-12, "worst {worst}");
        assert!(field_volume(&hi) > field_volume(&lo));
    }

    #[test]
    fn residual_picks_up_perturbation() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(9, 9, &spec).unwrap();
        let classes = classify_nodes(&spec, &grid).unwrap();
        let mut f = solve_direct(&spec, &grid).unwrap();
        let base = laplacian_residual(&f, &classes);
        let delta = 1e-3;
        let idx = grid.index(4, 4);
        f.values[idx] += delta;
        let r: f64 = laplacian_residual(&f, &classes);
        let expected = 4.0 * delta / (grid.hx * grid.hx);
        assert!((r - expected).abs() <= base + 1e-9, "{r} vs {expected}");
    }

    #[test]
    fn converged_sor_has_small_residual() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(17, 17, &spec).unwrap();
        let (f, _) = solve_sor(&spec, &grid, &SolverConfig::with_tol(1e-10)).unwrap();
        let classes = classify_nodes(&spec, &grid).unwrap();
        assert!(laplacian_residual(&f, &classes) <= 1e-6);
    }

    #[test]
    fn volume_conventions() {
        let grid = GridSpec::new(41, 41, &CapacitorSpec::<f64>::default()).unwrap();
        assert_eq!(field_volume(&Field::zeros(grid)), 0.0);
        let ones = Field::new(grid, vec![1.0; grid.len()]).unwrap();
        assert!((field_volume(&ones) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rejects_bad_omega_and_reports_nonconvergence() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(9, 9, &spec).unwrap();
        let bad = SolverConfig {
            omega: 2.0,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_sor(&spec, &grid, &bad),
            Err(Error::InvalidConfig(_))
        ));
        let capped = SolverConfig {
            max_iters: 3,
            ..SolverConfig::default()
        };
        let (_, rep) = solve_sor(&spec, &grid, &capped).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn direct_rejects_large_grids() {
        let spec = CapacitorSpec::with_d(0.5);
        let grid = GridSpec::new(101, 101, &spec).unwrap();
        assert!(matches!(
            solve_direct(&spec, &grid),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn sor_is_bit_deterministic() {
        let spec = CapacitorSpec::with_d(0.37);
        let grid = GridSpec::new(21, 21, &spec).unwrap();
        let (a, _) = solve_sor(&spec, &grid, &SolverConfig::default()).unwrap();
        let (b, _) = solve_sor(&spec, &grid, &SolverConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
