//! `CAPM` checkpoint layout (little-endian): magic, `version u32`,
//! `layers u32`, then per layer `in u32`, `out u32`, `activation u8`,
//! `out*in` weights and `out` biases as `f64`.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::dataset::Reader;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::mlp::{Activation, Layer, Mlp};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"CAPM";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn mlp_to_bytes<T: Scalar>(net: &Mlp<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + net.param_count() * 8 + net.layers.len() * 9);
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(net.layers.len() as u32).to_le_bytes());
    for l in &net.layers {
        out.extend_from_slice(&(l.input_dim() as u32).to_le_bytes());
        out.extend_from_slice(&(l.output_dim() as u32).to_le_bytes());
        out.push(l.activation.code());
        for &w in l.weights.iter() {
            out.extend_from_slice(&w.to_f64_lossy().to_le_bytes());
        }
        for &b in l.bias.iter() {
            out.extend_from_slice(&b.to_f64_lossy().to_le_bytes());
        }
    }
    out
}

pub fn mlp_from_bytes<T: Scalar>(bytes: &[u8]) -> Result<Mlp<T>> {
    let mut r = Reader::new(bytes);
    let magic = r.magic()?;
    if magic != CHECKPOINT_MAGIC {
        return Err(Error::BadMagic {
            expected: CHECKPOINT_MAGIC,
            found: magic,
        });
    }
    let version = r.u32("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::VersionMismatch {
            expected: CHECKPOINT_VERSION,
            found: version,
        });
    }
    let count = r.u32("layer count")? as usize;
    let mut layers = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let input = r.u32("layer input size")? as usize;
        let output = r.u32("layer output size")? as usize;
        let code = r.u8("activation")?;
        let activation = Activation::from_code(code)
            .ok_or_else(|| Error::Truncated(format!("unknown activation code {code}")))?;
        let mut read_vec = |n: usize, what: &str| -> Result<Vec<T>> {
            let raw = r.take(
                n.checked_mul(8)
                    .ok_or_else(|| Error::Truncated(what.into()))?,
                what,
            )?;
            Ok(raw
                .chunks_exact(8)
                .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
                .collect())
        };
        let weights = read_vec(input * output, "weights")?;
        let bias = read_vec(output, "biases")?;
        layers.push(Layer {
            weights: Array2::from_shape_vec((output, input), weights)
                .expect("length checked by reader"),
            bias: Array1::from(bias),
            activation,
        });
    }
    if r.remaining() != 0 {
        return Err(Error::Truncated(format!(
            "{} trailing bytes",
            r.remaining()
        )));
    }
    Mlp::new(layers)
}

pub fn save_mlp<T: Scalar>(net: &Mlp<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mlp_to_bytes(net))?;
    Ok(())
}

pub fn load_mlp<T: Scalar>(path: impl AsRef<Path>) -> Result<Mlp<T>> {
    mlp_from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::init_xavier;
    use crate::rng::Prng;

    fn net() -> Mlp<f64> {
        init_xavier(
            &[3, 4, 2],
            &[Activation::Tanh, Activation::Identity],
            &mut Prng::new(5),
        )
        .unwrap()
    }

    #[test]
    fn layout_size() {
        let bytes = mlp_to_bytes(&net());
        assert_eq!(bytes.len(), 12 + (9 + 8 * (12 + 4)) + (9 + 8 * (8 + 2)));
    }

    #[test]
    fn round_trip_and_corruption() {
        let n = net();
        let bytes = mlp_to_bytes(&n);
        assert_eq!(mlp_from_bytes::<f64>(&bytes).unwrap(), n);

        let mut bad = bytes.clone();
        bad[3] = b'X';
        assert!(matches!(
            mlp_from_bytes::<f64>(&bad),
            Err(Error::BadMagic { .. })
        ));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(
            mlp_from_bytes::<f64>(&bad),
            Err(Error::VersionMismatch { .. })
        ));
        assert!(matches!(
            mlp_from_bytes::<f64>(&bytes[..bytes.len() - 1]),
            Err(Error::Truncated(_))
        ));
    }
}
