use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};

use crate::error::{Error, Result};
use crate::rng::Prng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Tanh,
}

impl Activation {
    pub fn code(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Tanh => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Identity),
            1 => Some(Activation::Tanh),
            _ => None,
        }
    }
}

/// Affine map `y = act(W x + b)` with `W` stored `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
    pub activation: Activation,
}

impl<T: Scalar> Layer<T> {
    pub fn zeros(input: usize, output: usize, activation: Activation) -> Self {
        Self {
            weights: Array2::zeros((output, input)),
            bias: Array1::zeros(output),
            activation,
        }
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    #[inline]
    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    pub layers: Vec<Layer<T>>,
}

/// Per-layer activations recorded by a forward pass: entry 0 is the input
/// batch, entry `l + 1` the post-activation output of layer `l`.
#[derive(Debug, Clone)]
pub struct Tape<T> {
    pub activations: Vec<Array2<T>>,
}

impl<T: Scalar> Tape<T> {
    pub fn output(&self) -> &Array2<T> {
        self.activations
            .last()
            .expect("tape holds at least the input")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
}

/// Gradients shaped like the parameters of an [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<LayerGrad<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(net: &Mlp<T>) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    weights: Array2::zeros(l.weights.raw_dim()),
                    bias: Array1::zeros(l.bias.raw_dim()),
                })
                .collect(),
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Gradients<T>, factor: T) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.scaled_add(factor, &b.weights);
            a.bias.scaled_add(factor, &b.bias);
        }
    }

    pub fn scale(&mut self, factor: T) {
        for l in &mut self.layers {
            l.weights.mapv_inplace(|v| v * factor);
            l.bias.mapv_inplace(|v| v * factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }

    /// Value at a flat parameter index (same ordering as [`Mlp::param`]).
    pub fn get(&self, mut index: usize) -> T {
        for l in &self.layers {
            if index < l.weights.len() {
                let cols = l.weights.ncols();
                return l.weights[[index / cols, index % cols]];
            }
            index -= l.weights.len();
            if index < l.bias.len() {
                return l.bias[index];
            }
            index -= l.bias.len();
        }
        panic!("gradient index out of range")
    }
}

impl<T: Scalar> Mlp<T> {
    pub fn new(layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig(
                "network needs at least one layer".into(),
            ));
        }
        for pair in layers.windows(2) {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::DimensionMismatch {
                    context: "consecutive layer sizes",
                    expected: pair[0].output_dim(),
                    actual: pair[1].input_dim(),
                });
            }
        }
        for l in &layers {
            if l.bias.len() != l.output_dim() {
                return Err(Error::DimensionMismatch {
                    context: "bias length",
                    expected: l.output_dim(),
                    actual: l.bias.len(),
                });
            }
        }
        Ok(Self { layers })
    }

    /// Zero-parameter network with the given layer widths and activations.
    pub fn zeros(sizes: &[usize], activations: &[Activation]) -> Result<Self> {
        check_shape(sizes, activations)?;
        Self::new(
            sizes
                .windows(2)
                .zip(activations)
                .map(|(w, &act)| Layer::zeros(w[0], w[1], act))
                .collect(),
        )
    }

    /// Appends the layers of `next` after those of `self`, forming one chain.
    pub fn chain(&self, next: &Mlp<T>) -> Result<Self> {
        let mut layers = self.layers.clone();
        layers.extend(next.layers.iter().cloned());
        Self::new(layers)
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }

    fn locate(&self, mut index: usize) -> (usize, bool, usize) {
        for (k, l) in self.layers.iter().enumerate() {
            if index < l.weights.len() {
                return (k, true, index);
            }
            index -= l.weights.len();
            if index < l.bias.len() {
                return (k, false, index);
            }
            index -= l.bias.len();
        }
        panic!("parameter index out of range")
    }

    /// Parameter at a flat index: per layer, weights row-major then biases.
    pub fn param(&self, index: usize) -> T {
        let (k, is_weight, i) = self.locate(index);
        let l = &self.layers[k];
        if is_weight {
            let cols = l.weights.ncols();
            l.weights[[i / cols, i % cols]]
        } else {
            l.bias[i]
        }
    }

    pub fn set_param(&mut self, index: usize, value: T) {
        let (k, is_weight, i) = self.locate(index);
        let l = &mut self.layers[k];
        if is_weight {
            let cols = l.weights.ncols();
            l.weights[[i / cols, i % cols]] = value;
        } else {
            l.bias[i] = value;
        }
    }

    /// Forward pass on a batch whose rows are input vectors.
    pub fn forward_batch(&self, x: ArrayView2<T>) -> Result<(Array2<T>, Tape<T>)> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim(),
                actual: x.ncols(),
            });
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_owned());
        for layer in &self.layers {
            let input = activations.last().expect("non-empty");
            let y = apply_layer(layer, input.view());
            activations.push(y);
        }
        let out = activations.last().expect("non-empty").clone();
        Ok((out, Tape { activations }))
    }

    /// Forward pass without recording a tape.
    pub fn predict_batch(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim(),
                actual: x.ncols(),
            });
        }
        let mut cur = apply_layer(&self.layers[0], x);
        for layer in &self.layers[1..] {
            cur = apply_layer(layer, cur.view());
        }
        Ok(cur)
    }

    pub fn forward(&self, x: ArrayView1<T>) -> Result<(Array1<T>, Tape<T>)> {
        let batch = x.insert_axis(Axis(0));
        let (out, tape) = self.forward_batch(batch)?;
        Ok((out.row(0).to_owned(), tape))
    }

    pub fn predict(&self, x: ArrayView1<T>) -> Result<Array1<T>> {
        let out = self.predict_batch(x.insert_axis(Axis(0)))?;
        Ok(out.row(0).to_owned())
    }

    /// Back-propagates `output_grad` (∂L/∂output, one row per batch entry)
    /// through a recorded forward pass. Returns parameter gradients summed
    /// over the batch together with ∂L/∂input.
    pub fn backward(
        &self,
        tape: &Tape<T>,
        output_grad: ArrayView2<T>,
    ) -> Result<(Gradients<T>, Array2<T>)> {
        if tape.activations.len() != self.layers.len() + 1 {
            return Err(Error::DimensionMismatch {
                context: "tape length",
                expected: self.layers.len() + 1,
                actual: tape.activations.len(),
            });
        }
        for (layer, act) in self.layers.iter().zip(&tape.activations) {
            if act.ncols() != layer.input_dim() {
                return Err(Error::DimensionMismatch {
                    context: "tape activation width",
                    expected: layer.input_dim(),
                    actual: act.ncols(),
                });
            }
        }
        let out = tape.output();
        if output_grad.dim() != out.dim() {
            return Err(Error::DimensionMismatch {
                context: "output gradient",
                expected: out.len(),
                actual: output_grad.len(),
            });
        }

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = output_grad.to_owned();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let y = &tape.activations[k + 1];
            let input = &tape.activations[k];
            if layer.activation == Activation::Tanh {
                Zip::from(&mut upstream)
                    .and(y)
                    .for_each(|g, &y| *g *= T::one() - y * y);
            }
            let dw = upstream.t().dot(input);
            let db = upstream.sum_axis(Axis(0));
            upstream = upstream.dot(&layer.weights);
            grads.push(LayerGrad {
                weights: dw,
                bias: db,
            });
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, upstream))
    }
}

fn apply_layer<T: Scalar>(layer: &Layer<T>, input: ArrayView2<T>) -> Array2<T> {
    let mut y = input.dot(&layer.weights.t());
    y += &layer.bias.slice(s![ndarray::NewAxis, ..]);
    if layer.activation == Activation::Tanh {
        y.mapv_inplace(T::tanh);
    }
    y
}

fn check_shape(sizes: &[usize], activations: &[Activation]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::InvalidConfig("need input and output sizes".into()));
    }
    if activations.len() != sizes.len() - 1 {
        return Err(Error::DimensionMismatch {
            context: "activations per layer",
            expected: sizes.len() - 1,
            actual: activations.len(),
        });
    }
    if let Some(pos) = sizes.iter().position(|&n| n == 0) {
        return Err(Error::InvalidConfig(format!("layer width {pos} is zero")));
    }
    Ok(())
}

/// Xavier-uniform weights on `[-s, s]`, `s = sqrt(6 / (fan_in + fan_out))`,
/// zero biases. Weights are drawn layer by layer in row-major order.
pub fn init_xavier<T: Scalar>(
    sizes: &[usize],
    activations: &[Activation],
    rng: &mut Prng,
) -> Result<Mlp<T>> {
    let mut net = Mlp::zeros(sizes, activations)?;
    for layer in &mut net.layers {
        let bound = (6.0 / (layer.input_dim() + layer.output_dim()) as f64).sqrt();
        for w in layer.weights.iter_mut() {
            *w = T::lit(rng.uniform(-bound, bound));
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_network_outputs_zero() {
        let net = Mlp::<f64>::zeros(&[3, 5, 2], &[Activation::Tanh, Activation::Tanh]).unwrap();
        let (y, _) = net.forward(array![0.3, -1.0, 7.0].view()).unwrap();
        assert_eq!(y, array![0.0, 0.0]);
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let mut net = Mlp::<f64>::zeros(&[3, 3], &[Activation::Identity]).unwrap();
        net.layers[0].weights = Array2::eye(3);
        let x = array![0.5, -2.0, 3.25];
        assert_eq!(net.predict(x.view()).unwrap(), x);
    }

    #[test]
    fn hand_computed_two_layer_net() {
        let net = Mlp::new(vec![
            Layer {
                weights: array![[0.5, -0.25], [1.0, 0.75]],
                bias: array![0.1, -0.2],
                activation: Activation::Tanh,
            },
            Layer {
                weights: array![[2.0, -1.5]],
                bias: array![0.05],
                activation: Activation::Tanh,
            },
        ])
        .unwrap();
        let (x1, x2) = (0.4_f64, -0.8_f64);
        let h1 = (0.5 * x1 - 0.25 * x2 + 0.1).tanh();
        let h2 = (1.0 * x1 + 0.75 * x2 - 0.2).tanh();
        let expected = (2.0 * h1 - 1.5 * h2 + 0.05).tanh();
        let (y, tape) = net.forward(array![x1, x2].view()).unwrap();
        assert!((y[0] - expected).abs() < 1e-12);
        assert_eq!(tape.activations.len(), 3);
    }

    #[test]
    fn dimension_errors() {
        let net = Mlp::<f64>::zeros(&[3, 2], &[Activation::Tanh]).unwrap();
        assert!(net.forward(array![1.0, 2.0].view()).is_err());
        assert!(Mlp::<f64>::zeros(&[3, 0, 2], &[Activation::Tanh, Activation::Tanh]).is_err());
        let other = Mlp::<f64>::zeros(&[4, 2], &[Activation::Tanh]).unwrap();
        let (_, tape) = other.forward(array![1.0, 2.0, 3.0, 4.0].view()).unwrap();
        assert!(net.backward(&tape, Array2::zeros((1, 2)).view()).is_err());
        assert!(net.chain(&other).is_err());
    }

    #[test]
    fn backward_zero_grad_and_linearity() {
        let mut rng = Prng::new(3);
        let net: Mlp<f64> = init_xavier(
            &[4, 6, 3],
            &[Activation::Tanh, Activation::Identity],
            &mut rng,
        )
        .unwrap();
        let x = array![[0.1, -0.2, 0.3, 0.9], [0.5, 0.5, -1.0, 0.0]];
        let (_, tape) = net.forward_batch(x.view()).unwrap();
        let (g0, _) = net.backward(&tape, Array2::zeros((2, 3)).view()).unwrap();
        assert!(g0
            .layers
            .iter()
            .all(|l| l.weights.iter().all(|&v| v == 0.0)));

        let og = array![[0.3, -1.0, 0.2], [1.5, 0.1, -0.7]];
        let (g1, _) = net.backward(&tape, og.view()).unwrap();
        let (g2, _) = net.backward(&tape, (&og * 2.0).view()).unwrap();
        for k in 0..net.param_count() {
            assert!((g2.get(k) - 2.0 * g1.get(k)).abs() <= 1e-12 * (1.0 + g1.get(k).abs()));
        }
    }

    #[test]
    fn xavier_bounds_and_determinism() {
        let sizes = [100, 100];
        let acts = [Activation::Tanh];
        let a: Mlp<f64> = init_xavier(&sizes, &acts, &mut Prng::new(1)).unwrap();
        let b: Mlp<f64> = init_xavier(&sizes, &acts, &mut Prng::new(1)).unwrap();
        assert_eq!(a, b);
        let s = (6.0f64 / 200.0).sqrt();
        assert!(a.layers[0].weights.iter().all(|w| w.abs() <= s));
        assert!(a.layers[0].bias.iter().all(|&b| b == 0.0));
        let mean = a.layers[0].weights.mean().unwrap();
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!(init_xavier::<f64>(&[3, 0], &acts, &mut Prng::new(1)).is_err());
    }

    #[test]
    fn flat_parameter_indexing() {
        let mut net =
            Mlp::<f64>::zeros(&[2, 3, 1], &[Activation::Tanh, Activation::Identity]).unwrap();
        assert_eq!(net.param_count(), 2 * 3 + 3 + 3 + 1);
        net.set_param(7, 4.5); // bias[1] of layer 0
        assert_eq!(net.layers[0].bias[1], 4.5);
        net.set_param(12, -1.0); // bias of layer 1
        assert_eq!(net.layers[1].bias[0], -1.0);
        assert_eq!(net.param(7), 4.5);
    }

    #[test]
    fn single_precision_forward() {
        let mut rng = Prng::new(9);
        let net: Mlp<f32> = init_xavier(
            &[2, 8, 1],
            &[Activation::Tanh, Activation::Identity],
            &mut rng,
        )
        .unwrap();
        let y = net.predict(array![0.25f32, 0.5].view()).unwrap();
        assert!(y[0].is_finite());
    }
}
