//! Linear regression from features (latent codes or raw fields) to the plate
//! length, and inverse prediction by projecting an initial estimate onto the
//! regression hyperplane `{x : x·φ + b = d}`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::dataset::{Dataset, ScaleTransform};
use crate::error::{Error, Result};
use crate::geometry::{CapacitorSpec, GridSpec};
use crate::linalg::solve_dense;
use crate::models::EncDec;
use crate::scalar::Scalar;
use crate::solver::{solve_sor, Field, SolverConfig};

/// Relative ridge added to the Gram matrix when it is numerically singular.
const RIDGE: f64 = 1e-10;
/// Pivot threshold (relative to the largest Gram entry) that triggers the ridge.
const SINGULAR_PIVOT: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel<T> {
    pub phi: Array1<T>,
    pub bias: T,
    pub includes_bias: bool,
}

impl<T: Scalar> RegressionModel<T> {
    pub fn predict(&self, x: ArrayView1<T>) -> T {
        x.dot(&self.phi) + self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseResult<T> {
    pub z_hat: Array1<T>,
    /// `|ẑ·φ + b − d|`.
    pub objective: T,
    /// Plate length of the initial estimate, when one was used.
    pub init_d: Option<T>,
}

fn solve_gram<T: Scalar>(gram: Array2<T>, rhs: Array1<T>) -> Result<Array1<T>> {
    match solve_dense(gram.clone(), rhs.clone(), T::lit(SINGULAR_PIVOT)) {
        Ok(x) => Ok(x),
        Err(Error::Singular { .. }) => {
            let scale = gram.diag().iter().fold(T::zero(), |m, &v| m.max(v.abs()));
            let mut g = gram;
            let ridge = T::lit(RIDGE) * scale;
            g.diag_mut().mapv_inplace(|v| v + ridge);
            solve_dense(g, rhs, T::zero())
        }
        Err(e) => Err(e),
    }
}

/// Minimum-norm least-squares fit of `features · φ (+ b) = labels`.
///
/// Tall systems solve `XᵀX φ = Xᵀy`; wide systems solve `XXᵀ α = y` and
/// return `φ = Xᵀα`. A relative ridge of 1e-10 is added only when the Gram
/// matrix is numerically singular.
pub fn fit_regression<T: Scalar>(
    features: ArrayView2<T>,
    labels: &[T],
    includes_bias: bool,
) -> Result<RegressionModel<T>> {
    let (m, p) = features.dim();
    if m == 0 || p == 0 {
        return Err(Error::InvalidConfig(
            "regression needs m >= 1 and p >= 1".into(),
        ));
    }
    if labels.len() != m {
        return Err(Error::DimensionMismatch {
            context: "regression labels",
            expected: m,
            actual: labels.len(),
        });
    }
    if features.iter().all(|&v| v == T::zero()) {
        return Err(Error::ZeroFeatures);
    }
    let x = if includes_bias {
        let mut aug = Array2::ones((m, p + 1));
        aug.slice_mut(ndarray::s![.., ..p]).assign(&features);
        aug
    } else {
        features.to_owned()
    };
    let y = Array1::from(labels.to_vec());
    let coef = if x.ncols() <= m {
        solve_gram(x.t().dot(&x), x.t().dot(&y))?
    } else {
        let alpha = solve_gram(x.dot(&x.t()), y)?;
        x.t().dot(&alpha)
    };
    let (phi, bias) = if includes_bias {
        (coef.slice(ndarray::s![..p]).to_owned(), coef[p])
    } else {
        (coef, T::zero())
    };
    Ok(RegressionModel {
        phi,
        bias,
        includes_bias,
    })
}

/// Closest point to `x0` on the hyperplane `x·φ + b = d`:
/// `x̂ = x0 − ((x0·φ + b − d) / ‖φ‖²) φ`.
pub fn invert_to_hyperplane<T: Scalar>(
    x0: ArrayView1<T>,
    model: &RegressionModel<T>,
    d: T,
) -> Result<InverseResult<T>> {
    if x0.len() != model.phi.len() {
        return Err(Error::DimensionMismatch {
            context: "initial estimate vs regression features",
            expected: model.phi.len(),
            actual: x0.len(),
        });
    }
    let norm2 = model.phi.dot(&model.phi);
    if !(norm2 > T::zero()) {
        return Err(Error::DegenerateModel);
    }
    let excess = model.predict(x0) - d;
    let z_hat = &x0 - &(&model.phi * (excess / norm2));
    let objective = (model.predict(z_hat.view()) - d).abs();
    Ok(InverseResult {
        z_hat,
        objective,
        init_d: None,
    })
}

/// Plate length of the initial estimate: `offset` toward the middle of the
/// range (`+offset` when `d_true <= 0.5`, `−offset` otherwise).
pub fn initial_d<T: Scalar>(d_true: T, offset: T, a: T) -> Result<T> {
    let d_init = if d_true <= T::lit(0.5) {
        d_true + offset
    } else {
        d_true - offset
    };
    if !(d_init > T::zero() && d_init < a) {
        return Err(Error::InvalidConfig(format!(
            "initial estimate d = {d_init} lies outside (0, {a})"
        )));
    }
    Ok(d_init)
}

/// Fresh SOR solution at the initial-estimate plate length.
pub fn initial_estimate<T: Scalar>(
    housing: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
    solver: &SolverConfig<T>,
    d_true: T,
    offset: T,
) -> Result<(T, Field<T>)> {
    let d_init = initial_d(d_true, offset, housing.a)?;
    let spec = CapacitorSpec {
        d: d_init,
        ..*housing
    };
    let (field, report) = solve_sor(&spec, grid, solver)?;
    if !report.converged {
        return Err(Error::NotConverged {
            d: d_init.to_f64_lossy(),
            iterations: report.iterations,
            final_update: report.final_update.to_f64_lossy(),
        });
    }
    Ok((d_init, field))
}

/// Decodes a latent code and returns the field in physical units.
pub fn reconstruct_latent<T: Scalar>(
    z_hat: ArrayView1<T>,
    decoder: &crate::nn::Mlp<T>,
    scale: &ScaleTransform<T>,
) -> Result<Vec<T>> {
    let out = decoder.predict(z_hat)?;
    Ok(scale.unapply(&out.iter().copied().collect::<Vec<_>>()))
}

/// Raw fields of every sample, one row each, in physical units.
pub fn raw_features<T: Scalar>(ds: &Dataset<T>) -> Array2<T> {
    let n = ds.grid.len();
    let flat: Vec<T> = ds
        .samples
        .iter()
        .flat_map(|s| s.field.values.iter().copied())
        .collect();
    Array2::from_shape_vec((ds.len(), n), flat).expect("whole fields")
}

/// Latent codes of every sample, one row each.
pub fn latent_features<T: Scalar>(
    ds: &Dataset<T>,
    model: &EncDec<T>,
    scale: &ScaleTransform<T>,
) -> Result<Array2<T>> {
    let x = raw_features(ds).mapv(|v| v * scale.scale);
    model.encoder.predict_batch(x.view())
}

/// Raw-space inverse prediction: regression fitted directly on flattened
/// fields, SOR initial estimate at `d ± offset` projected onto the
/// hyperplane. Returns the field in physical units.
pub fn inverse_raw_space<T: Scalar>(
    ds: &Dataset<T>,
    model: &RegressionModel<T>,
    solver: &SolverConfig<T>,
    d: T,
    offset: T,
) -> Result<(Vec<T>, InverseResult<T>)> {
    let housing = ds.spec(d);
    let (d_init, init) = initial_estimate(&housing, &ds.grid, solver, d, offset)?;
    let mut res = invert_to_hyperplane(ArrayView1::from(&init.values), model, d)?;
    res.init_d = Some(d_init);
    Ok((res.z_hat.to_vec(), res))
}

/// Latent-space inverse prediction: encode the SOR initial estimate,
/// project onto the latent hyperplane, decode. Returns the field in physical units.
pub fn inverse_latent<T: Scalar>(
    ds: &Dataset<T>,
    encdec: &EncDec<T>,
    model: &RegressionModel<T>,
    scale: &ScaleTransform<T>,
    solver: &SolverConfig<T>,
    d: T,
    offset: T,
) -> Result<(Vec<T>, InverseResult<T>)> {
    let housing = ds.spec(d);
    let (d_init, init) = initial_estimate(&housing, &ds.grid, solver, d, offset)?;
    let z0 = encdec.encode(&scale.apply(&init.values))?;
    let mut res = invert_to_hyperplane(z0.view(), model, d)?;
    res.init_d = Some(d_init);
    let field = reconstruct_latent(res.z_hat.view(), &encdec.decoder, scale)?;
    Ok((field, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;
    use ndarray::array;
    use proptest::prelude::*;

    fn model(phi: Array1<f64>) -> RegressionModel<f64> {
        RegressionModel {
            phi,
            bias: 0.0,
            includes_bias: false,
        }
    }

    #[test]
    fn orthonormal_rows() {
        let x: Array2<f64> = array![[1.0, 0.0], [0.0, 1.0]];
        let m = fit_regression(x.view(), &[0.3, 0.7], false).unwrap();
        assert!((m.phi[0] - 0.3).abs() < 1e-15 && (m.phi[1] - 0.7).abs() < 1e-15);
        let m = fit_regression(array![[2.0f64]].view(), &[1.0], false).unwrap();
        assert!((m.phi[0] - 0.5).abs() < 1e-15);
    }

    /// Least squares via modified Gram-Schmidt QR, independent of the
    /// normal-equation route.
    fn qr_least_squares(x: &Array2<f64>, y: &Array1<f64>) -> Array1<f64> {
        let (m, p) = x.dim();
        let mut q = x.clone();
        let mut r = Array2::<f64>::zeros((p, p));
        for k in 0..p {
            for j in 0..k {
                let proj = q.column(j).dot(&q.column(k));
                r[[j, k]] = proj;
                let qj = q.column(j).to_owned();
                q.column_mut(k).scaled_add(-proj, &qj);
            }
            let norm = q.column(k).dot(&q.column(k)).sqrt();
            r[[k, k]] = norm;
            q.column_mut(k).mapv_inplace(|v| v / norm);
        }
        let qty = q.t().dot(y);
        let mut beta = Array1::zeros(p);
        for k in (0..p).rev() {
            let mut acc = qty[k];
            for j in k + 1..p {
                acc -= r[[k, j]] * beta[j];
            }
            beta[k] = acc / r[[k, k]];
        }
        assert_eq!(m, x.nrows());
        beta
    }

    #[test]
    fn tall_system_matches_qr_oracle() {
        let mut rng = Prng::new(21);
        let x = Array2::from_shape_fn((10, 4), |_| rng.uniform(-1.0, 1.0));
        let y = Array1::from_shape_fn(10, |_| rng.uniform(0.0, 1.0));
        let fit = fit_regression(x.view(), y.as_slice().unwrap(), false).unwrap();
        let oracle = qr_least_squares(&x, &y);
        for (a, b) in fit.phi.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8);
        }
        let residual = &y - &x.dot(&fit.phi);
        assert!(x.t().dot(&residual).iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn exact_on_full_rank_square_and_with_bias() {
        let mut rng = Prng::new(4);
        let x = Array2::from_shape_fn((6, 3), |_| rng.uniform(-1.0, 1.0));
        let truth = array![0.2, -0.4, 0.9];
        let y = x.dot(&truth) + 0.25;
        let fit = fit_regression(x.view(), y.as_slice().unwrap(), true).unwrap();
        assert!((fit.bias - 0.25).abs() < 1e-10);
        for k in 0..6 {
            assert!((fit.predict(x.row(k)) - y[k]).abs() <= 1e-6);
        }
    }

    #[test]
    fn wide_system_is_minimum_norm() {
        let mut rng = Prng::new(8);
        let x = Array2::from_shape_fn((3, 7), |_| rng.uniform(-1.0, 1.0));
        let y = array![0.3, 0.5, 0.7];
        let fit = fit_regression(x.view(), y.as_slice().unwrap(), false).unwrap();
        assert!((x.dot(&fit.phi) - &y).iter().all(|v| v.abs() < 1e-10));
        // Any other solution differs by a null-space vector and is longer.
        let q = qr_least_squares(&x.t().to_owned(), &fit.phi);
        let back = x.t().dot(&q);
        assert!(
            (&back - &fit.phi).iter().all(|v| v.abs() < 1e-10),
            "phi lies in the row space"
        );
    }

    #[test]
    fn duplicate_rows_fall_back_to_ridge() {
        let x: Array2<f64> = array![[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [0.0, 1.0, 0.0]];
        let fit = fit_regression(x.view(), &[0.4, 0.6, 0.1], false).unwrap();
        assert!(fit.phi.iter().all(|v| v.is_finite()));
        assert!((fit.predict(x.row(0)) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_features_rejected() {
        let x = Array2::<f64>::zeros((3, 2));
        assert!(matches!(
            fit_regression(x.view(), &[1.0, 2.0, 3.0], false),
            Err(Error::ZeroFeatures)
        ));
    }

    #[test]
    fn projection_examples() {
        let m = model(array![1.0, 0.0]);
        let r = invert_to_hyperplane(array![0.0, 0.0].view(), &m, 0.5).unwrap();
        assert_eq!(r.z_hat, array![0.5, 0.0]);
        let x0 = array![0.5, 3.0];
        let r = invert_to_hyperplane(x0.view(), &m, 0.5).unwrap();
        assert_eq!(r.z_hat, x0);
        assert!(matches!(
            invert_to_hyperplane(x0.view(), &model(array![0.0, 0.0]), 0.5),
            Err(Error::DegenerateModel)
        ));
    }

    #[test]
    fn projection_is_nearest_point() {
        let mut rng = Prng::new(99);
        let phi = Array1::from_shape_fn(8, |_| rng.uniform(-1.0, 1.0));
        let x0 = Array1::from_shape_fn(8, |_| rng.uniform(-1.0, 1.0));
        let d = rng.uniform(-1.0, 1.0);
        let m = model(phi.clone());
        let best = invert_to_hyperplane(x0.view(), &m, d).unwrap().z_hat;
        let dist = (&best - &x0).mapv(|v| v * v).sum();
        for _ in 0..1000 {
            let y = Array1::from_shape_fn(8, |_| rng.uniform(-3.0, 3.0));
            let y = invert_to_hyperplane(y.view(), &m, d).unwrap().z_hat;
            assert!((y.dot(&phi) - d).abs() < 1e-10);
            assert!(dist <= (&y - &x0).mapv(|v| v * v).sum() + 1e-12);
        }
    }

    #[test]
    fn initial_estimate_rule() {
        assert!((initial_d(0.3f64, 0.2, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((initial_d(0.8f64, 0.2, 2.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(initial_d(0.1, -0.2, 2.0).is_err());

        let housing = CapacitorSpec::default();
        let grid = GridSpec::new(9, 9, &housing).unwrap();
        let cfg = SolverConfig::default();
        let (d_init, f) = initial_estimate(&housing, &grid, &cfg, 0.3, 0.2).unwrap();
        let (direct, _) = solve_sor(&CapacitorSpec::with_d(d_init), &grid, &cfg).unwrap();
        assert_eq!(f, direct);
    }

    proptest! {
        #[test]
        fn idempotent_and_scale_invariant(
            phi in prop::collection::vec(-2.0f64..2.0, 4),
            x0 in prop::collection::vec(-2.0f64..2.0, 4),
            d in -1.0f64..1.0,
            c in 0.1f64..10.0,
        ) {
            let phi = Array1::from(phi);
            prop_assume!(phi.dot(&phi) > 1e-3);
            let m = model(phi.clone());
            let once = invert_to_hyperplane(ArrayView1::from(&x0), &m, d).unwrap();
            let twice = invert_to_hyperplane(once.z_hat.view(), &m, d).unwrap();
            prop_assert!(once.objective <= 1e-10);
            for (a, b) in once.z_hat.iter().zip(&twice.z_hat) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
            let scaled = invert_to_hyperplane(ArrayView1::from(&x0), &model(&phi * c), d * c).unwrap();
            for (a, b) in once.z_hat.iter().zip(&scaled.z_hat) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}
