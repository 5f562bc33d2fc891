//! The learned models: autoencoder, boundary-decoder (supervised and
//! semi-supervised) and the fixed-boundary coordinate networks (plain NN and
//! physics-informed).
//!
//! Field-valued networks work in scaled units (see
//! [`ScaleTransform`](crate::dataset::ScaleTransform)); coordinate networks
//! predict physical potentials directly.

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::dataset::{Dataset, ScaleTransform};
use crate::error::{Error, Result};
use crate::geometry::{classify_nodes, CapacitorSpec, GridSpec, NodeClass};
use crate::nn::{
    adam_step, init_xavier, mse_loss_batch, Activation, AdamConfig, AdamState, Gradients, Mlp,
};
use crate::rng::Prng;
use crate::scalar::Scalar;
use crate::solver::{solve_sor, SolverConfig};

/// Hyperparameters of the field-valued networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig<T> {
    /// Weight of the boundary-decoder reconstruction term.
    pub lambda: T,
    pub lr: T,
    pub epochs: usize,
    pub seed: u64,
    /// Latent width `z`.
    pub latent_dim: usize,
    /// Hidden width `k` of encoder and decoder.
    pub hidden: usize,
    /// Hidden width `f` of the boundary network.
    pub boundary_hidden: usize,
    /// Drop the tanh between the two boundary layers (purely linear map).
    pub boundary_linear: bool,
    pub scale: ScaleTransform<T>,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::one(),
            lr: T::lit(1e-3),
            epochs: 2000,
            seed: 1,
            latent_dim: 8,
            hidden: 64,
            boundary_hidden: 16,
            boundary_linear: false,
            scale: ScaleTransform::default(),
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.lr > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "lr must be positive, got {}",
                self.lr
            )));
        }
        if self.latent_dim == 0 || self.hidden == 0 || self.boundary_hidden == 0 {
            return Err(Error::InvalidConfig(
                "network widths must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Encoder `N → k → z` and decoder `z → k → N`, tanh throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct EncDec<T> {
    pub encoder: Mlp<T>,
    pub decoder: Mlp<T>,
}

impl<T: Scalar> EncDec<T> {
    pub fn latent_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    /// Latent code of a (scaled) field.
    pub fn encode(&self, scaled_field: &[T]) -> Result<Array1<T>> {
        self.encoder.predict(ArrayView1::from(scaled_field))
    }

    /// Decoder output in scaled units.
    pub fn decode(&self, z: ArrayView1<T>) -> Result<Array1<T>> {
        self.decoder.predict(z)
    }
}

/// Maps the plate length `d` to a latent code: `1 → f → z`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNet<T> {
    pub net: Mlp<T>,
}

impl<T: Scalar> BoundaryNet<T> {
    pub fn latent(&self, d: T) -> Result<Array1<T>> {
        self.net.predict(ArrayView1::from(&[d][..]))
    }
}

/// Decoder output for plate length `d`, `dec(bnet(d))`, in scaled units.
pub fn boundary_forward<T: Scalar>(
    bnet: &BoundaryNet<T>,
    decoder: &Mlp<T>,
    d: T,
) -> Result<Array1<T>> {
    if bnet.net.output_dim() != decoder.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "boundary output vs decoder input",
            expected: decoder.input_dim(),
            actual: bnet.net.output_dim(),
        });
    }
    decoder.predict(bnet.latent(d)?.view())
}

/// Boundary-decoder prediction in physical units.
pub fn predict_field<T: Scalar>(
    bnet: &BoundaryNet<T>,
    decoder: &Mlp<T>,
    scale: &ScaleTransform<T>,
    d: T,
) -> Result<Vec<T>> {
    let out = boundary_forward(bnet, decoder, d)?;
    Ok(scale.unapply(&out.iter().copied().collect::<Vec<_>>()))
}

/// A trained model with its per-epoch loss (recorded before each update).
#[derive(Debug, Clone, PartialEq)]
pub struct Trained<M, T> {
    pub model: M,
    pub history: Vec<T>,
}

/// Encoder, decoder and boundary network trained together.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel<T> {
    pub encdec: EncDec<T>,
    pub boundary: BoundaryNet<T>,
}

/// Initial networks for a field of `n` nodes. The generator is consumed in
/// a fixed order (encoder, decoder, boundary), so every training routine
/// starts from identical encoder and decoder weights for a given seed.
pub fn init_field_models<T: Scalar>(
    n: usize,
    cfg: &TrainConfig<T>,
) -> Result<(EncDec<T>, BoundaryNet<T>)> {
    cfg.validate()?;
    let mut rng = Prng::new(cfg.seed);
    let tanh2 = [Activation::Tanh, Activation::Tanh];
    let encoder = init_xavier(&[n, cfg.hidden, cfg.latent_dim], &tanh2, &mut rng)?;
    let decoder = init_xavier(&[cfg.latent_dim, cfg.hidden, n], &tanh2, &mut rng)?;
    let first = if cfg.boundary_linear {
        Activation::Identity
    } else {
        Activation::Tanh
    };
    let boundary = init_xavier(
        &[1, cfg.boundary_hidden, cfg.latent_dim],
        &[first, Activation::Identity],
        &mut rng,
    )?;
    Ok((EncDec { encoder, decoder }, BoundaryNet { net: boundary }))
}

/// Scaled fields of the selected samples, one row each.
fn field_matrix<'a, T: Scalar>(
    ds: &'a Dataset<T>,
    scale: &ScaleTransform<T>,
    samples: impl Iterator<Item = &'a crate::dataset::Sample<T>>,
) -> Array2<T> {
    let n = ds.grid.len();
    let rows: Vec<T> = samples
        .flat_map(|s| s.field.values.iter().map(|&v| v * scale.scale))
        .collect();
    let m = rows.len() / n;
    Array2::from_shape_vec((m, n), rows).expect("rows are whole fields")
}

fn check_finite<T: Scalar>(loss: T, model: &'static str, epoch: usize) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged { model, epoch })
    }
}

/// Unsupervised autoencoder fit over every sample:
/// minimizes `Σ_i ‖V_i − dec(enc(V_i))‖²` by full-batch Adam.
pub fn train_encdec<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<Trained<EncDec<T>, T>> {
    if ds.is_empty() {
        return Err(Error::InvalidConfig("empty dataset".into()));
    }
    let (mut model, _) = init_field_models(ds.grid.len(), cfg)?;
    let x = field_matrix(ds, &cfg.scale, ds.samples.iter());
    let adam = AdamConfig::with_lr(cfg.lr);
    let mut enc_state = AdamState::new(&model.encoder, adam);
    let mut dec_state = AdamState::new(&model.decoder, adam);
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let (z, enc_tape) = model.encoder.forward_batch(x.view())?;
        let (recon, dec_tape) = model.decoder.forward_batch(z.view())?;
        let (loss, grad) = mse_loss_batch(recon.view(), x.view())?;
        check_finite(loss, "enc-dec", epoch)?;
        history.push(loss);
        let (dec_grads, dz) = model.decoder.backward(&dec_tape, grad.view())?;
        let (enc_grads, _) = model.encoder.backward(&enc_tape, dz.view())?;
        adam_step(&mut model.decoder, &dec_grads, &mut dec_state)?;
        adam_step(&mut model.encoder, &enc_grads, &mut enc_state)?;
    }
    Ok(Trained { model, history })
}

/// Semi-supervised fit: per epoch the loss is
/// `Σ_all ‖V_i − dec(enc(V_i))‖² + λ Σ_supervised ‖V_j − dec(bnet(d_j))‖²`,
/// and the decoder receives gradients from both branches.
///
/// With `λ = 0` the boundary branch is skipped entirely and the encoder and
/// decoder follow exactly the [`train_encdec`] trajectory.
pub fn train_joint<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<Trained<JointModel<T>, T>> {
    train_field_models(ds, cfg, true)
}

/// Supervised-only boundary-decoder fit: `Σ_supervised ‖V_j − dec(bnet(d_j))‖²`.
/// The encoder stays at its initialization.
pub fn train_boundary_decoder<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<Trained<JointModel<T>, T>> {
    if ds.supervised_count() == 0 {
        return Err(Error::NoSupervisedSamples { lambda: 1.0 });
    }
    let cfg = TrainConfig {
        lambda: T::one(),
        ..*cfg
    };
    train_field_models(ds, &cfg, false)
}

fn train_field_models<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
    with_reconstruction: bool,
) -> Result<Trained<JointModel<T>, T>> {
    if ds.is_empty() {
        return Err(Error::InvalidConfig("empty dataset".into()));
    }
    let use_boundary = cfg.lambda > T::zero();
    if use_boundary && ds.supervised_count() == 0 {
        return Err(Error::NoSupervisedSamples {
            lambda: cfg.lambda.to_f64_lossy(),
        });
    }
    let name = if with_reconstruction {
        "enc-dec+bou-dec"
    } else {
        "bou-dec"
    };
    let (mut encdec, mut boundary) = init_field_models(ds.grid.len(), cfg)?;

    let x_all = field_matrix(ds, &cfg.scale, ds.samples.iter());
    let x_sup = field_matrix(ds, &cfg.scale, ds.supervised_samples());
    let d_sup = Array2::from_shape_vec(
        (x_sup.nrows(), 1),
        ds.supervised_samples().map(|s| s.d).collect(),
    )
    .expect("one d per supervised sample");

    let adam = AdamConfig::with_lr(cfg.lr);
    let mut enc_state = AdamState::new(&encdec.encoder, adam);
    let mut dec_state = AdamState::new(&encdec.decoder, adam);
    let mut bnd_state = AdamState::new(&boundary.net, adam);
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let mut loss = T::zero();
        let mut dec_grads = Gradients::zeros_like(&encdec.decoder);
        let mut enc_grads = None;
        let mut bnd_grads = None;

        if with_reconstruction {
            let (z, enc_tape) = encdec.encoder.forward_batch(x_all.view())?;
            let (recon, dec_tape) = encdec.decoder.forward_batch(z.view())?;
            let (l, grad) = mse_loss_batch(recon.view(), x_all.view())?;
            loss += l;
            let (g, dz) = encdec.decoder.backward(&dec_tape, grad.view())?;
            dec_grads = g;
            enc_grads = Some(encdec.encoder.backward(&enc_tape, dz.view())?.0);
        }
        if use_boundary {
            let (z, bnd_tape) = boundary.net.forward_batch(d_sup.view())?;
            let (recon, dec_tape) = encdec.decoder.forward_batch(z.view())?;
            let (l, mut grad) = mse_loss_batch(recon.view(), x_sup.view())?;
            loss += cfg.lambda * l;
            grad.mapv_inplace(|g| g * cfg.lambda);
            let (g, dz) = encdec.decoder.backward(&dec_tape, grad.view())?;
            dec_grads.add_scaled(&g, T::one());
            bnd_grads = Some(boundary.net.backward(&bnd_tape, dz.view())?.0);
        }
        check_finite(loss, name, epoch)?;
        history.push(loss);

        adam_step(&mut encdec.decoder, &dec_grads, &mut dec_state)?;
        if let Some(g) = enc_grads {
            adam_step(&mut encdec.encoder, &g, &mut enc_state)?;
        }
        if let Some(g) = bnd_grads {
            adam_step(&mut boundary.net, &g, &mut bnd_state)?;
        }
    }
    Ok(Trained {
        model: JointModel { encdec, boundary },
        history,
    })
}

/// Hyperparameters of the coordinate networks `(x, y) → V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordTrainConfig<T> {
    /// Width of both hidden layers.
    pub hidden: usize,
    pub lr: T,
    pub epochs: usize,
    pub seed: u64,
    /// Weight of the mean-square PDE residual (PINN only).
    pub mu: T,
    /// Weight of the symmetry-plane derivative penalty (PINN only).
    pub neumann_weight: T,
    /// PINN data term over every node instead of Dirichlet nodes only.
    pub supervise_all: bool,
}

impl<T: Scalar> Default for CoordTrainConfig<T> {
    fn default() -> Self {
        Self {
            hidden: 32,
            lr: T::lit(1e-3),
            epochs: 2000,
            seed: 1,
            mu: T::one(),
            neumann_weight: T::one(),
            supervise_all: false,
        }
    }
}

/// Coordinate network fitted at a single plate length.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordNet<T> {
    pub net: Mlp<T>,
    pub trained_d: T,
}

impl<T: Scalar> CoordNet<T> {
    pub fn eval(&self, x: T, y: T) -> Result<T> {
        Ok(self.net.predict(ArrayView1::from(&[x, y][..]))?[0])
    }

    /// Prediction at every node of `grid`, in flattening order. The network
    /// has no `d` input, so this is the same for every plate length.
    pub fn predict_grid(&self, grid: &GridSpec<T>) -> Result<Vec<T>> {
        let out = self.net.predict_batch(coordinate_matrix(grid).view())?;
        Ok(out.index_axis(Axis(1), 0).to_vec())
    }
}

pub fn coordinate_matrix<T: Scalar>(grid: &GridSpec<T>) -> Array2<T> {
    let coords = grid.coordinates();
    Array2::from_shape_fn((coords.len(), 2), |(r, c)| coords[r][c])
}

fn init_coord_net<T: Scalar>(cfg: &CoordTrainConfig<T>) -> Result<Mlp<T>> {
    if cfg.hidden == 0 {
        return Err(Error::InvalidConfig(
            "coordinate hidden width must be >= 1".into(),
        ));
    }
    if !(cfg.lr > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "lr must be positive, got {}",
            cfg.lr
        )));
    }
    init_xavier(
        &[2, cfg.hidden, cfg.hidden, 1],
        &[Activation::Tanh, Activation::Tanh, Activation::Identity],
        &mut Prng::new(cfg.seed),
    )
}

/// Discrete problem a coordinate network is fitted against.
#[derive(Debug, Clone)]
pub struct CoordProblem<T> {
    pub grid: GridSpec<T>,
    pub classes: Vec<NodeClass>,
    /// Ground-truth SOR solution at the training plate length.
    pub truth: Vec<T>,
    pub d: T,
}

impl<T: Scalar> CoordProblem<T> {
    pub fn new(
        spec: &CapacitorSpec<T>,
        grid: &GridSpec<T>,
        solver: &SolverConfig<T>,
    ) -> Result<Self> {
        let classes = classify_nodes(spec, grid)?;
        let (field, report) = solve_sor(spec, grid, solver)?;
        if !report.converged {
            return Err(Error::NotConverged {
                d: spec.d.to_f64_lossy(),
                iterations: report.iterations,
                final_update: report.final_update.to_f64_lossy(),
            });
        }
        Ok(Self {
            grid: *grid,
            classes,
            truth: field.values,
            d: spec.d,
        })
    }
}

/// Loss terms of a coordinate-network fit, evaluated on grid-node outputs `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordLoss<T> {
    pub data: T,
    pub pde: T,
    pub neumann: T,
    pub total: T,
}

/// Plain-NN objective: mean squared error over every node.
pub fn nn_loss<T: Scalar>(problem: &CoordProblem<T>, u: &[T]) -> (CoordLoss<T>, Vec<T>) {
    let n = T::from_usize_exact(u.len());
    let two = T::lit(2.0);
    let mut grad = vec![T::zero(); u.len()];
    let mut data = T::zero();
    for (k, (&ui, &vi)) in u.iter().zip(&problem.truth).enumerate() {
        let e = ui - vi;
        data += e * e;
        grad[k] = two * e / n;
    }
    data /= n;
    (
        CoordLoss {
            data,
            pde: T::zero(),
            neumann: T::zero(),
            total: data,
        },
        grad,
    )
}

/// PINN objective on grid-node outputs `u`:
/// mean squared data misfit on Dirichlet nodes (all nodes with
/// `supervise_all`), plus `mu` times the mean-square 5-point Laplacian over
/// interior nodes, plus `neumann_weight` times the mean-square one-sided
/// normal difference on symmetry planes. Returns the loss and `∂loss/∂u`.
pub fn pinn_loss<T: Scalar>(
    problem: &CoordProblem<T>,
    cfg: &CoordTrainConfig<T>,
    u: &[T],
) -> (CoordLoss<T>, Vec<T>) {
    let grid = &problem.grid;
    let two = T::lit(2.0);
    let mut grad = vec![T::zero(); u.len()];

    let supervised: Vec<usize> = if cfg.supervise_all {
        (0..u.len()).collect()
    } else {
        (0..u.len())
            .filter(|&k| problem.classes[k].is_dirichlet())
            .collect()
    };
    let ns = T::from_usize_exact(supervised.len());
    let mut data = T::zero();
    for &k in &supervised {
        let e = u[k] - problem.truth[k];
        data += e * e;
        grad[k] = two * e / ns;
    }
    data /= ns;

    let mut pde = T::zero();
    if cfg.mu != T::zero() {
        let cx = (grid.hx * grid.hx).recip();
        let cy = (grid.hy * grid.hy).recip();
        let interior: Vec<usize> = (0..u.len())
            .filter(|&k| problem.classes[k] == NodeClass::Interior)
            .collect();
        let ni = T::from_usize_exact(interior.len().max(1));
        for &k in &interior {
            let (i, j) = grid.coords_of(k);
            let (w, e) = (grid.index(i - 1, j), grid.index(i + 1, j));
            let (s, n) = (grid.index(i, j - 1), grid.index(i, j + 1));
            let r = (u[w] + u[e] - two * u[k]) * cx + (u[s] + u[n] - two * u[k]) * cy;
            pde += r * r;
            let g = cfg.mu * two * r / ni;
            grad[w] += g * cx;
            grad[e] += g * cx;
            grad[s] += g * cy;
            grad[n] += g * cy;
            grad[k] -= g * two * (cx + cy);
        }
        pde /= ni;
    }

    let mut neumann = T::zero();
    if cfg.neumann_weight != T::zero() {
        let planes: Vec<(usize, usize, T)> = (0..u.len())
            .filter_map(|k| {
                let (i, j) = grid.coords_of(k);
                match problem.classes[k] {
                    NodeClass::SymmetryX => Some((k, grid.index(i + 1, j), grid.hx)),
                    NodeClass::SymmetryY => Some((k, grid.index(i, j + 1), grid.hy)),
                    _ => None,
                }
            })
            .collect();
        let nb = T::from_usize_exact(planes.len().max(1));
        for &(k, inner, h) in &planes {
            let q = (u[inner] - u[k]) / h;
            neumann += q * q;
            let g = cfg.neumann_weight * two * q / (nb * h);
            grad[inner] += g;
            grad[k] -= g;
        }
        neumann /= nb;
    }

    let total = data + cfg.mu * pde + cfg.neumann_weight * neumann;
    (
        CoordLoss {
            data,
            pde,
            neumann,
            total,
        },
        grad,
    )
}

fn fit_coord_net<T: Scalar>(
    problem: &CoordProblem<T>,
    cfg: &CoordTrainConfig<T>,
    name: &'static str,
    objective: impl Fn(&[T]) -> (CoordLoss<T>, Vec<T>),
) -> Result<Trained<CoordNet<T>, T>> {
    let mut net = init_coord_net(cfg)?;
    let coords = coordinate_matrix(&problem.grid);
    let mut state = AdamState::new(&net, AdamConfig::with_lr(cfg.lr));
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (out, tape) = net.forward_batch(coords.view())?;
        let u = out.as_slice().expect("contiguous column");
        let (loss, grad) = objective(u);
        check_finite(loss.total, name, epoch)?;
        history.push(loss.total);
        let grad = Array2::from_shape_vec((grad.len(), 1), grad).expect("one per node");
        let (g, _) = net.backward(&tape, grad.view())?;
        adam_step(&mut net, &g, &mut state)?;
    }
    Ok(Trained {
        model: CoordNet {
            net,
            trained_d: problem.d,
        },
        history,
    })
}

/// Plain coordinate network fitted to every node of the SOR solution at `d_train`.
pub fn train_nn_fixed<T: Scalar>(
    spec: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
    solver: &SolverConfig<T>,
    cfg: &CoordTrainConfig<T>,
) -> Result<Trained<CoordNet<T>, T>> {
    let problem = CoordProblem::new(spec, grid, solver)?;
    train_nn_on(&problem, cfg)
}

pub fn train_nn_on<T: Scalar>(
    problem: &CoordProblem<T>,
    cfg: &CoordTrainConfig<T>,
) -> Result<Trained<CoordNet<T>, T>> {
    fit_coord_net(problem, cfg, "nn", |u| nn_loss(problem, u))
}

/// Physics-informed coordinate network at `spec.d`; see [`pinn_loss`].
pub fn train_pinn<T: Scalar>(
    spec: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
    solver: &SolverConfig<T>,
    cfg: &CoordTrainConfig<T>,
) -> Result<Trained<CoordNet<T>, T>> {
    let problem = CoordProblem::new(spec, grid, solver)?;
    train_pinn_on(&problem, cfg)
}

pub fn train_pinn_on<T: Scalar>(
    problem: &CoordProblem<T>,
    cfg: &CoordTrainConfig<T>,
) -> Result<Trained<CoordNet<T>, T>> {
    fit_coord_net(problem, cfg, "pinn", |u| pinn_loss(problem, cfg, u))
}

/// Central-difference Laplacian `(f(x±h,y) + f(x,y±h) − 4f(x,y)) / h²` at
/// each point. Points must keep a margin of at least `h` from the edges of
/// the quadrant `[0, extent[0]] × [0, extent[1]]`.
pub fn pde_residual<T: Scalar>(
    f: impl Fn(T, T) -> T,
    points: &[[T; 2]],
    h: T,
    extent: [T; 2],
) -> Result<Vec<T>> {
    let slack = h * T::epsilon().sqrt();
    let four = T::lit(4.0);
    points
        .iter()
        .map(|&[x, y]| {
            let inside = x - h >= -slack
                && y - h >= -slack
                && x + h <= extent[0] + slack
                && y + h <= extent[1] + slack;
            if !inside {
                return Err(Error::PointNearBoundary {
                    x: x.to_f64_lossy(),
                    y: y.to_f64_lossy(),
                    h: h.to_f64_lossy(),
                });
            }
            Ok((f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - four * f(x, y)) / (h * h))
        })
        .collect()
}

/// Mean-square [`pde_residual`] of a coordinate network over the interior
/// nodes of `grid`, with `h` equal to the grid spacing.
pub fn interior_residual_ms<T: Scalar>(
    net: &CoordNet<T>,
    grid: &GridSpec<T>,
    classes: &[NodeClass],
) -> Result<T> {
    let coords = grid.coordinates();
    let points: Vec<[T; 2]> = classes
        .iter()
        .zip(&coords)
        .filter(|(c, _)| **c == NodeClass::Interior)
        .map(|(_, p)| *p)
        .collect();
    let extent = [
        grid.hx * T::from_usize_exact(grid.nx - 1),
        grid.hy * T::from_usize_exact(grid.ny - 1),
    ];
    let r = pde_residual(
        |x, y| net.eval(x, y).unwrap_or_else(|_| T::nan()),
        &points,
        grid.hx,
        extent,
    )?;
    Ok(r.iter().map(|&v| v * v).sum::<T>() / T::from_usize_exact(r.len().max(1)))
}
