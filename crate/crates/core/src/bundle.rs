//! Trained-model directories: one checkpoint per sub-network plus a
//! `manifest.txt` naming each file's role.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::ScaleTransform;
use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::models::{BoundaryNet, CoordNet, EncDec, JointModel};
use crate::nn::{load_mlp, save_mlp, Mlp};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// A trained model ready for field prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelBundle {
    /// Encoder, decoder and boundary net with the field scaling used in training.
    Field {
        model: JointModel<f64>,
        scale: ScaleTransform<f64>,
    },
    /// Coordinate network (NN or PINN) fitted at a single plate length.
    Coord(CoordNet<f64>),
}

impl ModelBundle {
    /// Field at plate length `d` in physical units.
    pub fn predict(&self, grid: &GridSpec<f64>, d: f64) -> Result<Vec<f64>> {
        match self {
            Self::Field { model, scale } => {
                crate::models::predict_field(&model.boundary, &model.encdec.decoder, scale, d)
            }
            Self::Coord(net) => net.predict_grid(grid),
        }
    }

    fn roles(&self) -> Vec<(&'static str, &Mlp<f64>)> {
        match self {
            Self::Field { model, .. } => vec![
                ("encoder", &model.encdec.encoder),
                ("decoder", &model.encdec.decoder),
                ("boundary", &model.boundary.net),
            ],
            Self::Coord(net) => vec![("coord", &net.net)],
        }
    }
}

/// Writes every sub-network as `<role>.capm` and a manifest into `dir`.
pub fn save_bundle(
    bundle: &ModelBundle,
    grid: &GridSpec<f64>,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut manifest = format!("nx={}\nny={}\n", grid.nx, grid.ny);
    match bundle {
        ModelBundle::Field { scale, .. } => manifest += &format!("scale={}\n", scale.scale),
        ModelBundle::Coord(net) => manifest += &format!("d_train={}\n", net.trained_d),
    }
    for (role, net) in bundle.roles() {
        let file = format!("{role}.capm");
        save_mlp(net, dir.join(&file))?;
        manifest += &format!("{role}={file}\n");
    }
    fs::write(dir.join(MANIFEST_FILE), manifest)?;
    Ok(())
}

/// Reads a directory written by [`save_bundle`]; returns the bundle and its grid size.
pub fn load_bundle(dir: impl AsRef<Path>) -> Result<(ModelBundle, usize, usize)> {
    let dir = dir.as_ref();
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path)?;
    let bad = |reason: String| Error::Malformed {
        path: path.clone(),
        reason,
    };
    let mut entries = std::collections::BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {line:?}")))?;
        entries.insert(k.trim().to_string(), v.trim().to_string());
    }
    let number = |key: &str| -> Result<f64> {
        entries
            .get(key)
            .ok_or_else(|| bad(format!("missing {key}")))?
            .parse()
            .map_err(|_| bad(format!("{key} is not a number")))
    };
    let net = |role: &str| -> Result<Mlp<f64>> {
        let file = entries
            .get(role)
            .ok_or_else(|| bad(format!("missing {role}")))?;
        load_mlp(dir.join(PathBuf::from(file)))
    };
    let nx = number("nx")? as usize;
    let ny = number("ny")? as usize;
    let bundle = if entries.contains_key("coord") {
        ModelBundle::Coord(CoordNet {
            net: net("coord")?,
            trained_d: number("d_train")?,
        })
    } else {
        ModelBundle::Field {
            model: JointModel {
                encdec: EncDec {
                    encoder: net("encoder")?,
                    decoder: net("decoder")?,
                },
                boundary: BoundaryNet {
                    net: net("boundary")?,
                },
            },
            scale: ScaleTransform::new(number("scale")?)?,
        }
    };
    Ok((bundle, nx, ny))
}
