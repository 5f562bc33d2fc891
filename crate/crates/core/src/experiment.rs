//! Experiment harness: seed-averaged SSE tables against fresh SOR solves,
//! plain-text configuration and CSV reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::bundle::ModelBundle;
use crate::dataset::{generate_dataset, split_supervised, Dataset, ScaleTransform};
use crate::error::{Error, Result};
use crate::geometry::{CapacitorSpec, GridSpec};
use crate::inverse::{
    fit_regression, inverse_latent, inverse_raw_space, latent_features, raw_features,
};
use crate::models::{
    predict_field, train_boundary_decoder, train_encdec, train_joint, train_nn_on, train_pinn_on,
    CoordProblem, CoordTrainConfig, JointModel, TrainConfig,
};
use crate::rng::Prng;
use crate::solver::{solve_sor, SolverConfig};

pub const RAW_SPACE: &str = "raw space";
pub const ENC_DEC: &str = "enc-dec";
pub const BOU_DEC: &str = "bou-dec";
pub const JOINT: &str = "enc-dec+bou-dec";
pub const NN: &str = "NN";
pub const PINN: &str = "PINN";

/// Sum of squared differences in physical units.
pub fn sse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            context: "sse operands",
            expected: truth.len(),
            actual: pred.len(),
        });
    }
    Ok(pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum())
}

/// SSE of one method at every requested plate length, for every seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SseReport {
    pub method: String,
    pub d_values: Vec<f64>,
    pub seeds: Vec<u64>,
    /// `per_seed[s][k]`: seed `seeds[s]`, plate length `d_values[k]`.
    pub per_seed: Vec<Vec<f64>>,
}

impl SseReport {
    /// Seed-averaged SSE at each plate length.
    pub fn per_d(&self) -> Vec<f64> {
        let n = self.per_seed.len() as f64;
        (0..self.d_values.len())
            .map(|k| self.per_seed.iter().map(|row| row[k]).sum::<f64>() / n)
            .collect()
    }

    /// Mean of [`per_d`](Self::per_d) over plate lengths.
    pub fn mean(&self) -> f64 {
        let per_d = self.per_d();
        per_d.iter().sum::<f64>() / per_d.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nx: usize,
    pub ny: usize,
    /// Housing geometry; the plate length is set per sample.
    pub housing: CapacitorSpec<f64>,
    pub solver: SolverConfig<f64>,
    pub corpus_size: usize,
    pub d_min: f64,
    pub d_max: f64,
    /// Seed of the corpus plate lengths, shared by every experiment seed.
    pub corpus_seed: u64,
    pub n_supervised: usize,
    /// Field-network settings; `seed` is replaced by each experiment seed.
    pub train: TrainConfig<f64>,
    /// Coordinate-network settings; `seed` is replaced by each experiment seed.
    pub coord: CoordTrainConfig<f64>,
    pub table1_d: Vec<f64>,
    pub table2_d: Vec<f64>,
    pub nn_train_d: f64,
    pub offset: f64,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nx: 41,
            ny: 41,
            housing: CapacitorSpec::default(),
            solver: SolverConfig::default(),
            corpus_size: 81,
            d_min: 0.1,
            d_max: 0.9,
            corpus_seed: 0,
            n_supervised: 20,
            train: TrainConfig::default(),
            coord: CoordTrainConfig::default(),
            table1_d: vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
            table2_d: vec![0.6, 0.65, 0.7],
            nn_train_d: 0.55,
            offset: 0.2,
            seeds: vec![1, 2, 3],
            out_dir: PathBuf::from("out"),
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    /// Every setting as `(key, value)` in a fixed order; this is the file
    /// format and the input of [`config_hash`](Self::config_hash).
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("nx", self.nx.to_string()),
            ("ny", self.ny.to_string()),
            ("a", self.housing.a.to_string()),
            ("b", self.housing.b.to_string()),
            ("v0", self.housing.v0.to_string()),
            ("omega", self.solver.omega.to_string()),
            ("tol", self.solver.tol.to_string()),
            ("max_iters", self.solver.max_iters.to_string()),
            ("corpus_size", self.corpus_size.to_string()),
            ("d_min", self.d_min.to_string()),
            ("d_max", self.d_max.to_string()),
            ("corpus_seed", self.corpus_seed.to_string()),
            ("n_supervised", self.n_supervised.to_string()),
            ("scale", self.train.scale.scale.to_string()),
            ("lambda", self.train.lambda.to_string()),
            ("lr", self.train.lr.to_string()),
            ("epochs", self.train.epochs.to_string()),
            ("latent_dim", self.train.latent_dim.to_string()),
            ("hidden", self.train.hidden.to_string()),
            ("boundary_hidden", self.train.boundary_hidden.to_string()),
            ("boundary_linear", self.train.boundary_linear.to_string()),
            ("coord_hidden", self.coord.hidden.to_string()),
            ("coord_lr", self.coord.lr.to_string()),
            ("coord_epochs", self.coord.epochs.to_string()),
            ("mu", self.coord.mu.to_string()),
            ("neumann_weight", self.coord.neumann_weight.to_string()),
            ("table1_d", join(&self.table1_d)),
            ("table2_d", join(&self.table2_d)),
            ("nn_train_d", self.nn_train_d.to_string()),
            ("offset", self.offset.to_string()),
            ("seeds", join(&self.seeds)),
            ("out_dir", self.out_dir.display().to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "nx" => self.nx = parse_one(key, value)?,
            "ny" => self.ny = parse_one(key, value)?,
            "a" => self.housing.a = parse_one(key, value)?,
            "b" => self.housing.b = parse_one(key, value)?,
            "v0" => self.housing.v0 = parse_one(key, value)?,
            "omega" => self.solver.omega = parse_one(key, value)?,
            "tol" => self.solver.tol = parse_one(key, value)?,
            "max_iters" => self.solver.max_iters = parse_one(key, value)?,
            "corpus_size" => self.corpus_size = parse_one(key, value)?,
            "d_min" => self.d_min = parse_one(key, value)?,
            "d_max" => self.d_max = parse_one(key, value)?,
            "corpus_seed" => self.corpus_seed = parse_one(key, value)?,
            "n_supervised" => self.n_supervised = parse_one(key, value)?,
            "scale" => self.train.scale = ScaleTransform::new(parse_one(key, value)?)?,
            "lambda" => self.train.lambda = parse_one(key, value)?,
            "lr" => self.train.lr = parse_one(key, value)?,
            "epochs" => self.train.epochs = parse_one(key, value)?,
            "latent_dim" => self.train.latent_dim = parse_one(key, value)?,
            "hidden" => self.train.hidden = parse_one(key, value)?,
            "boundary_hidden" => self.train.boundary_hidden = parse_one(key, value)?,
            "boundary_linear" => self.train.boundary_linear = parse_one(key, value)?,
            "coord_hidden" => self.coord.hidden = parse_one(key, value)?,
            "coord_lr" => self.coord.lr = parse_one(key, value)?,
            "coord_epochs" => self.coord.epochs = parse_one(key, value)?,
            "mu" => self.coord.mu = parse_one(key, value)?,
            "neumann_weight" => self.coord.neumann_weight = parse_one(key, value)?,
            "table1_d" => self.table1_d = parse_list(key, value)?,
            "table2_d" => self.table2_d = parse_list(key, value)?,
            "nn_train_d" => self.nn_train_d = parse_one(key, value)?,
            "offset" => self.offset = parse_one(key, value)?,
            "seeds" => self.seeds = parse_list(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines on top of the defaults. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key=value", no + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// First 16 hex digits of the SHA-256 of the settings (output directory excluded).
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.entries() {
            if k != "out_dir" {
                h.update(format!("{k}={v}\n"));
            }
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn grid(&self) -> Result<GridSpec<f64>> {
        GridSpec::new(self.nx, self.ny, &self.housing)
    }

    /// Plate lengths drawn uniformly on `[d_min, d_max]` from `corpus_seed`,
    /// sorted ascending. A symmetric lattice with an odd count would always
    /// contain the midpoint, which is a test value by default.
    pub fn corpus_d_values(&self) -> Vec<f64> {
        let mut rng = Prng::new(self.corpus_seed);
        let mut d: Vec<f64> = (0..self.corpus_size)
            .map(|_| rng.uniform(self.d_min, self.d_max))
            .collect();
        d.sort_by(f64::total_cmp);
        d
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.solver.validate()?;
        self.train.validate()?;
        if self.corpus_size == 0 {
            return Err(Error::InvalidConfig("corpus_size must be >= 1".into()));
        }
        if self.n_supervised > self.corpus_size {
            return Err(Error::InvalidConfig(format!(
                "n_supervised = {} exceeds corpus_size = {}",
                self.n_supervised, self.corpus_size
            )));
        }
        if !(self.d_min > 0.0 && self.d_max < self.housing.a && self.d_min <= self.d_max) {
            return Err(Error::InvalidConfig(format!(
                "corpus range [{}, {}] must lie inside (0, a)",
                self.d_min, self.d_max
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("at least one seed is required".into()));
        }
        let train = self.corpus_d_values();
        for &d in self.table1_d.iter().chain(&self.table2_d) {
            if !(d > 0.0 && d < self.housing.a) {
                return Err(Error::InvalidConfig(format!("test d = {d} outside (0, a)")));
            }
            if train.iter().any(|&t| (t - d).abs() < 1e-9) {
                return Err(Error::InvalidConfig(format!(
                    "test d = {d} is also a training d"
                )));
            }
        }
        Ok(())
    }
}

/// Corpus and freshly solved ground truths shared by every seed.
pub struct Workbench {
    pub cfg: ExperimentConfig,
    pub corpus: Dataset<f64>,
    truths: BTreeMap<u64, Vec<f64>>,
    field_models: BTreeMap<(u64, bool), JointModel<f64>>,
}

impl Workbench {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let corpus = generate_dataset(&cfg.housing, &grid, &cfg.corpus_d_values(), &cfg.solver)?;
        Ok(Self {
            cfg: cfg.clone(),
            corpus,
            truths: BTreeMap::new(),
            field_models: BTreeMap::new(),
        })
    }

    /// SOR solution at exactly `d`, solved on first use (never a corpus member).
    pub fn truth(&mut self, d: f64) -> Result<&[f64]> {
        let key = d.to_bits();
        if !self.truths.contains_key(&key) {
            let spec = CapacitorSpec {
                d,
                ..self.cfg.housing
            };
            let (field, report) = solve_sor(&spec, &self.corpus.grid, &self.cfg.solver)?;
            if !report.converged {
                return Err(Error::NotConverged {
                    d,
                    iterations: report.iterations,
                    final_update: report.final_update,
                });
            }
            self.truths.insert(key, field.values);
        }
        Ok(&self.truths[&key])
    }

    fn seeded_corpus(&self, seed: u64) -> Result<Dataset<f64>> {
        split_supervised(&self.corpus, self.cfg.n_supervised, seed)
    }

    fn train_cfg(&self, seed: u64) -> TrainConfig<f64> {
        TrainConfig {
            seed,
            ..self.cfg.train
        }
    }

    fn coord_cfg(&self, seed: u64) -> CoordTrainConfig<f64> {
        CoordTrainConfig {
            seed,
            ..self.cfg.coord
        }
    }

    fn score(&mut self, preds: Vec<Vec<f64>>, d_values: &[f64]) -> Result<Vec<f64>> {
        preds
            .iter()
            .zip(d_values)
            .map(|(p, &d)| sse(p, self.truth(d)?))
            .collect()
    }

    /// Raw-space regression + projection at each `d` (seed-independent).
    pub fn raw_space(&mut self, d_values: &[f64]) -> Result<Vec<f64>> {
        let model = fit_regression(
            raw_features(&self.corpus).view(),
            &self.corpus.d_values(),
            false,
        )?;
        let preds = d_values
            .iter()
            .map(|&d| {
                Ok(
                    inverse_raw_space(&self.corpus, &model, &self.cfg.solver, d, self.cfg.offset)?
                        .0,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        self.score(preds, d_values)
    }

    /// Autoencoder + latent regression + projection + decoding.
    pub fn enc_dec(&mut self, seed: u64, d_values: &[f64]) -> Result<Vec<f64>> {
        let ds = self.seeded_corpus(seed)?;
        let cfg = self.train_cfg(seed);
        let trained = train_encdec(&ds, &cfg)?;
        let z = latent_features(&ds, &trained.model, &cfg.scale)?;
        let model = fit_regression(z.view(), &ds.d_values(), false)?;
        let preds = d_values
            .iter()
            .map(|&d| {
                Ok(inverse_latent(
                    &ds,
                    &trained.model,
                    &model,
                    &cfg.scale,
                    &self.cfg.solver,
                    d,
                    self.cfg.offset,
                )?
                .0)
            })
            .collect::<Result<Vec<_>>>()?;
        self.score(preds, d_values)
    }

    /// Boundary-decoder model for `seed`, trained jointly or on supervised
    /// samples only. Trained once per workbench and reused.
    pub fn field_model(&mut self, seed: u64, joint: bool) -> Result<&JointModel<f64>> {
        if !self.field_models.contains_key(&(seed, joint)) {
            let ds = self.seeded_corpus(seed)?;
            let cfg = self.train_cfg(seed);
            let trained = if joint {
                train_joint(&ds, &cfg)?
            } else {
                train_boundary_decoder(&ds, &cfg)?
            };
            self.field_models.insert((seed, joint), trained.model);
        }
        Ok(&self.field_models[&(seed, joint)])
    }

    /// Boundary-decoder predictions scored at each `d`.
    pub fn boundary(&mut self, seed: u64, d_values: &[f64], joint: bool) -> Result<Vec<f64>> {
        let cfg = self.train_cfg(seed);
        let m = self.field_model(seed, joint)?;
        let preds = d_values
            .iter()
            .map(|&d| predict_field(&m.boundary, &m.encdec.decoder, &cfg.scale, d))
            .collect::<Result<Vec<_>>>()?;
        self.score(preds, d_values)
    }

    /// Coordinate network (plain or physics-informed) trained at `nn_train_d`.
    pub fn coordinate(&mut self, seed: u64, d_values: &[f64], physics: bool) -> Result<Vec<f64>> {
        let bundle = self.bundle(if physics { PINN } else { NN }, seed)?;
        let pred = bundle.predict(&self.corpus.grid, self.cfg.nn_train_d)?;
        self.score(vec![pred; d_values.len()], d_values)
    }

    /// Trains `method` (bou-dec, enc-dec+bou-dec, NN or PINN; case-insensitive,
    /// `joint` accepted) for `seed` and packages it for saving.
    pub fn bundle(&mut self, method: &str, seed: u64) -> Result<ModelBundle> {
        let key = method.to_ascii_lowercase();
        let train = |w: &mut Self, joint| -> Result<ModelBundle> {
            Ok(ModelBundle::Field {
                model: w.field_model(seed, joint)?.clone(),
                scale: w.cfg.train.scale,
            })
        };
        let coord = |w: &mut Self, physics| -> Result<ModelBundle> {
            let spec = CapacitorSpec {
                d: w.cfg.nn_train_d,
                ..w.cfg.housing
            };
            let problem = CoordProblem::new(&spec, &w.corpus.grid, &w.cfg.solver)?;
            let cfg = w.coord_cfg(seed);
            let trained = if physics {
                train_pinn_on(&problem, &cfg)?
            } else {
                train_nn_on(&problem, &cfg)?
            };
            Ok(ModelBundle::Coord(trained.model))
        };
        let result = match key.as_str() {
            "bou-dec" => train(self, false),
            "enc-dec+bou-dec" | "joint" => train(self, true),
            "nn" => coord(self, false),
            "pinn" => coord(self, true),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown method {method:?} (expected bou-dec, enc-dec+bou-dec, NN or PINN)"
                )))
            }
        };
        result.map_err(|e| e.in_method(method))
    }

    fn report(
        &mut self,
        method: &str,
        d_values: &[f64],
        mut cell: impl FnMut(&mut Self, u64) -> Result<Vec<f64>>,
    ) -> Result<SseReport> {
        let seeds = self.cfg.seeds.clone();
        let per_seed = seeds
            .iter()
            .map(|&s| cell(self, s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.in_method(method))?;
        Ok(SseReport {
            method: method.to_string(),
            d_values: d_values.to_vec(),
            seeds,
            per_seed,
        })
    }

    /// Table 1: raw space, enc-dec, bou-dec, enc-dec+bou-dec at `table1_d`.
    pub fn table1(&mut self) -> Result<Vec<SseReport>> {
        let ds = self.cfg.table1_d.clone();
        let raw = self.raw_space(&ds).map_err(|e| e.in_method(RAW_SPACE))?;
        Ok(vec![
            self.report(RAW_SPACE, &ds, |_, _| Ok(raw.clone()))?,
            self.report(ENC_DEC, &ds, |w, s| w.enc_dec(s, &ds))?,
            self.report(BOU_DEC, &ds, |w, s| w.boundary(s, &ds, false))?,
            self.report(JOINT, &ds, |w, s| w.boundary(s, &ds, true))?,
        ])
    }

    /// Table 2: NN, PINN and enc-dec+bou-dec at `table2_d`.
    pub fn table2(&mut self) -> Result<Vec<SseReport>> {
        let ds = self.cfg.table2_d.clone();
        Ok(vec![
            self.report(NN, &ds, |w, s| w.coordinate(s, &ds, false))?,
            self.report(PINN, &ds, |w, s| w.coordinate(s, &ds, true))?,
            self.report(JOINT, &ds, |w, s| w.boundary(s, &ds, true))?,
        ])
    }
}

pub fn run_table1(cfg: &ExperimentConfig) -> Result<Vec<SseReport>> {
    Workbench::new(cfg)?.table1()
}

pub fn run_table2(cfg: &ExperimentConfig) -> Result<Vec<SseReport>> {
    Workbench::new(cfg)?.table2()
}

/// C-style `%.12e`: twelve fractional digits, signed exponent of at least two digits.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// CSV report: a `#` line with the config hash and seeds, the header
/// `method,d,seed,sse`, then one row per (method, d, seed) cell.
pub fn reports_csv(cfg: &ExperimentConfig, reports: &[SseReport]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# config_hash={} seeds={}",
        cfg.config_hash(),
        join(&cfg.seeds)
    )
    .expect("string write");
    out.push_str("method,d,seed,sse\n");
    for r in reports {
        for (k, &d) in r.d_values.iter().enumerate() {
            for (s, &seed) in r.seeds.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.method,
                    d,
                    seed,
                    format_sci(r.per_seed[s][k])
                )
                .expect("string write");
            }
        }
    }
    out
}

/// Seed-averaged table for terminal output.
pub fn summary_table(reports: &[SseReport]) -> String {
    let mut out = String::new();
    if let Some(first) = reports.first() {
        write!(out, "{:<18}", "method").expect("string write");
        for d in &first.d_values {
            write!(out, " {:>10}", format!("d={d}")).expect("string write");
        }
        writeln!(out, " {:>10}", "mean").expect("string write");
    }
    for r in reports {
        write!(out, "{:<18}", r.method).expect("string write");
        for v in r.per_d() {
            write!(out, " {v:>10.4}").expect("string write");
        }
        writeln!(out, " {:>10.4}", r.mean()).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sse_examples() {
        assert_eq!(sse(&[0.1, 0.2], &[0.1, 0.2]).unwrap(), 0.0);
        assert_eq!(sse(&[0.0, 1.0, 0.5], &[0.0, 0.0, 0.5]).unwrap(), 1.0);
        assert!(sse(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn scientific_format_matches_c() {
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(1.5), "1.500000000000e+00");
        assert_eq!(format_sci(0.063), "6.300000000000e-02");
        assert_eq!(format_sci(12345.678), "1.234567800000e+04");
        assert_eq!(format_sci(1e-120), "1.000000000000e-120");
    }

    #[test]
    fn config_text_round_trip() {
        let mut cfg = ExperimentConfig {
            seeds: vec![4, 5],
            ..ExperimentConfig::default()
        };
        cfg.train.lambda = 0.5;
        cfg.table2_d = vec![0.61, 0.67];
        let back = ExperimentConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.config_hash(), cfg.config_hash());
        assert_ne!(ExperimentConfig::default().config_hash(), cfg.config_hash());
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::from_text("bogus=1").is_err());
        assert!(ExperimentConfig::from_text("nx").is_err());
        assert!(ExperimentConfig::from_text("nx=abc").is_err());
        assert!(ExperimentConfig::from_text("n_supervised=500").is_err());
        let cfg = ExperimentConfig::from_text("# comment\n\nepochs = 10\n").unwrap();
        assert_eq!(cfg.train.epochs, 10);
    }

    #[test]
    fn default_corpus_excludes_test_values() {
        let cfg = ExperimentConfig::default();
        let d = cfg.corpus_d_values();
        assert_eq!(d.len(), 81);
        assert!(d.iter().all(|&v| v > 0.1 && v < 0.9));
        cfg.validate().unwrap();
        assert_eq!(d, cfg.corpus_d_values());
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
        let clash = ExperimentConfig {
            corpus_size: 1,
            d_min: 0.3,
            d_max: 0.3,
            ..ExperimentConfig::default()
        };
        assert!(matches!(clash.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn report_means() {
        let r = SseReport {
            method: "m".into(),
            d_values: vec![0.3, 0.4],
            seeds: vec![1, 2],
            per_seed: vec![vec![1.0, 3.0], vec![3.0, 5.0]],
        };
        assert_eq!(r.per_d(), vec![2.0, 4.0]);
        assert_eq!(r.mean(), 3.0);
    }
}
