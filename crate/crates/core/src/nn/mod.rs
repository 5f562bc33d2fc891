//! Minimal dense-network engine: tanh/identity MLPs with batched forward and
//! backward passes, squared-error loss, Adam, Xavier initialization,
//! `CAPM` checkpoints and finite-difference gradient checking.

mod adam;
mod checkpoint;
mod gradcheck;
mod loss;
mod mlp;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use checkpoint::{
    load_mlp, mlp_from_bytes, mlp_to_bytes, save_mlp, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use gradcheck::{check_gradients, relative_error, GradCheckReport};
pub use loss::{mse_loss, mse_loss_batch};
pub use mlp::{init_xavier, Activation, Gradients, Layer, LayerGrad, Mlp, Tape};
