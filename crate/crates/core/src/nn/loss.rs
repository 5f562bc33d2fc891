use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Zip};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sum of squared differences `Σ (pred - target)^2` and its gradient
/// `2 (pred - target)` with respect to `pred`.
pub fn mse_loss<T: Scalar>(pred: ArrayView1<T>, target: ArrayView1<T>) -> Result<(T, Array1<T>)> {
    if pred.len() != target.len() {
        return Err(Error::DimensionMismatch {
            context: "loss operands",
            expected: target.len(),
            actual: pred.len(),
        });
    }
    let diff = &pred - &target;
    let loss = diff.iter().map(|&e| e * e).sum();
    Ok((loss, diff * T::lit(2.0)))
}

/// Batched [`mse_loss`]: the loss is summed over every entry of the batch.
pub fn mse_loss_batch<T: Scalar>(
    pred: ArrayView2<T>,
    target: ArrayView2<T>,
) -> Result<(T, Array2<T>)> {
    if pred.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            context: "batched loss operands",
            expected: target.len(),
            actual: pred.len(),
        });
    }
    let two = T::lit(2.0);
    let mut grad = Array2::zeros(pred.raw_dim());
    let mut loss = T::zero();
    Zip::from(&mut grad)
        .and(pred)
        .and(target)
        .for_each(|g, &p, &t| {
            let e = p - t;
            loss += e * e;
            *g = two * e;
        });
    Ok((loss, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;
    use ndarray::array;

    #[test]
    fn equal_inputs_give_zero() {
        let x = array![0.1, 0.2, 0.3];
        let (l, g) = mse_loss(x.view(), x.view()).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_offset() {
        let (l, g) = mse_loss(array![1.0, 0.0].view(), array![0.0, 0.0].view()).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(g, array![2.0, 0.0]);
    }

    #[test]
    fn matches_brute_force_sum() {
        let mut rng = Prng::new(11);
        let p: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let t: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut oracle = 0.0;
        for k in 0..10 {
            oracle += (p[k] - t[k]) * (p[k] - t[k]);
        }
        let (l, _) = mse_loss(ArrayView1::from(&p), ArrayView1::from(&t)).unwrap();
        assert!((l - oracle).abs() <= 1e-12);
        let pb = Array2::from_shape_vec((2, 5), p).unwrap();
        let tb = Array2::from_shape_vec((2, 5), t).unwrap();
        let (lb, _) = mse_loss_batch(pb.view(), tb.view()).unwrap();
        assert!((lb - oracle).abs() <= 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(mse_loss(array![1.0].view(), array![1.0, 2.0].view()).is_err());
    }
}
