use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::mlp::{Gradients, Mlp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> Default for AdamConfig<T> {
    fn default() -> Self {
        Self {
            lr: T::lit(1e-3),
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            epsilon: T::lit(1e-8),
        }
    }
}

impl<T: Scalar> AdamConfig<T> {
    pub fn with_lr(lr: T) -> Self {
        Self {
            lr,
            ..Self::default()
        }
    }
}

/// Moment accumulators for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig<T>,
    pub first: Gradients<T>,
    pub second: Gradients<T>,
    pub step: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(net: &Mlp<T>, config: AdamConfig<T>) -> Self {
        Self {
            config,
            first: Gradients::zeros_like(net),
            second: Gradients::zeros_like(net),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of `net` in place.
pub fn adam_step<T: Scalar>(
    net: &mut Mlp<T>,
    grads: &Gradients<T>,
    state: &mut AdamState<T>,
) -> Result<()> {
    if grads.layers.len() != net.layers.len() || state.first.layers.len() != net.layers.len() {
        return Err(Error::DimensionMismatch {
            context: "optimizer layer count",
            expected: net.layers.len(),
            actual: grads.layers.len(),
        });
    }
    for (g, l) in grads.layers.iter().zip(&net.layers) {
        if g.weights.dim() != l.weights.dim() || g.bias.len() != l.bias.len() {
            return Err(Error::DimensionMismatch {
                context: "gradient shape",
                expected: l.param_count(),
                actual: g.weights.len() + g.bias.len(),
            });
        }
    }
    if !grads.is_finite() {
        return Err(Error::NonFiniteGradient);
    }

    state.step += 1;
    let AdamConfig {
        lr,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    let t = i32::try_from(state.step).unwrap_or(i32::MAX);
    let c1 = T::one() - beta1.powi(t);
    let c2 = T::one() - beta2.powi(t);
    let one = T::one();

    let update = |p: &mut T, g: T, m: &mut T, v: &mut T| {
        *m = beta1 * *m + (one - beta1) * g;
        *v = beta2 * *v + (one - beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + epsilon);
    };

    for (k, layer) in net.layers.iter_mut().enumerate() {
        let g = &grads.layers[k];
        let m = &mut state.first.layers[k];
        let v = &mut state.second.layers[k];
        ndarray::Zip::from(&mut layer.weights)
            .and(&g.weights)
            .and(&mut m.weights)
            .and(&mut v.weights)
            .for_each(|p, &g, m, v| update(p, g, m, v));
        ndarray::Zip::from(&mut layer.bias)
            .and(&g.bias)
            .and(&mut m.bias)
            .and(&mut v.bias)
            .for_each(|p, &g, m, v| update(p, g, m, v));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn scalar_net(p: f64) -> Mlp<f64> {
        let mut net = Mlp::zeros(&[1, 1], &[Activation::Identity]).unwrap();
        net.layers[0].weights[[0, 0]] = p;
        net
    }

    fn scalar_grad(net: &Mlp<f64>, g: f64) -> Gradients<f64> {
        let mut grads = Gradients::zeros_like(net);
        grads.layers[0].weights[[0, 0]] = g;
        grads
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut net = scalar_net(0.7);
        let before = net.clone();
        let mut st = AdamState::new(&net, AdamConfig::default());
        let g = Gradients::zeros_like(&net);
        adam_step(&mut net, &g, &mut st).unwrap();
        assert_eq!(net, before);
        assert_eq!(st.step, 1);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut net = scalar_net(1.0);
        let mut st = AdamState::new(&net, AdamConfig::default());
        let g = scalar_grad(&net, 1.0);
        adam_step(&mut net, &g, &mut st).unwrap();
        let moved = 1.0 - net.layers[0].weights[[0, 0]];
        assert!((moved - 1e-3).abs() < 1e-10, "{moved}");
    }

    fn descend_parabola(lr: f64, steps: usize) -> f64 {
        let mut net = scalar_net(1.0);
        let mut st = AdamState::new(&net, AdamConfig::with_lr(lr));
        for _ in 0..steps {
            let p = net.layers[0].weights[[0, 0]];
            let g = scalar_grad(&net, 2.0 * p);
            adam_step(&mut net, &g, &mut st).unwrap();
        }
        net.layers[0].weights[[0, 0]]
    }

    /// Plain scalar Adam, written out independently of the engine.
    fn scalar_adam_oracle(lr: f64, steps: usize) -> f64 {
        let (mut p, mut m, mut v) = (1.0f64, 0.0f64, 0.0f64);
        for t in 1..=steps {
            let g = 2.0 * p;
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            let m_hat = m / (1.0 - 0.9f64.powi(t as i32));
            let v_hat = v / (1.0 - 0.999f64.powi(t as i32));
            p -= lr * m_hat / (v_hat.sqrt() + 1e-8);
        }
        p
    }

    #[test]
    fn descends_a_parabola() {
        // At lr = 1e-3 each step moves slightly less than lr, so 100 steps
        // stop just short of 0.9.
        let p = descend_parabola(1e-3, 100);
        assert!((p - 0.901743598078609).abs() < 1e-12, "{p}");
        assert!((p - scalar_adam_oracle(1e-3, 100)).abs() < 1e-12);
        assert!(p < 1.0);
        let p = descend_parabola(1e-2, 100);
        assert!(p.abs() < 0.9);
        assert!((p - scalar_adam_oracle(1e-2, 100)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_gradient() {
        let mut net = scalar_net(1.0);
        let mut st = AdamState::new(&net, AdamConfig::default());
        let g = scalar_grad(&net, f64::NAN);
        assert!(matches!(
            adam_step(&mut net, &g, &mut st),
            Err(Error::NonFiniteGradient)
        ));
        assert_eq!(st.step, 0);
    }
}
