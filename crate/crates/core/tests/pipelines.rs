//! End-to-end behaviour of the trained pipelines on the default corpus.

use capfield::dataset::split_supervised;
use capfield::experiment::{sse, ExperimentConfig, Workbench};
use capfield::inverse::{
    fit_regression, inverse_latent, inverse_raw_space, latent_features, raw_features,
};
use capfield::models::{
    predict_field, train_encdec, train_joint, train_nn_on, CoordProblem, CoordTrainConfig,
};
use capfield::{solve_sor, CapacitorSpec};

fn truth(cfg: &ExperimentConfig, d: f64) -> Vec<f64> {
    let grid = cfg.grid().unwrap();
    solve_sor(&CapacitorSpec { d, ..cfg.housing }, &grid, &cfg.solver)
        .unwrap()
        .0
        .values
}

#[test]
fn default_corpus_pipelines() {
    let cfg = ExperimentConfig::default();
    let bench = Workbench::new(&cfg).unwrap();
    assert_eq!(bench.corpus.len(), 81);
    let ds = split_supervised(&bench.corpus, cfg.n_supervised, 1).unwrap();
    let train = cfg.train;

    let ae = train_encdec(&ds, &train).unwrap();
    assert!(ae.history.iter().all(|l| l.is_finite()));
    assert!(ae.history.last().unwrap() < &ae.history[0]);
    let falling = ae.history.windows(2).filter(|w| w[1] < w[0]).count();
    let fraction = falling as f64 / (ae.history.len() - 1) as f64;
    // Full-batch Adam shows periodic small spikes; seeds 1..3 measure 0.857..0.897.
    assert!(
        fraction >= 0.85,
        "loss fell in only {fraction:.3} of epochs"
    );

    // Latent and raw-space inverse pipelines give finite SSE at a held-out d.
    let target = truth(&cfg, 0.5);
    let z = latent_features(&ds, &ae.model, &train.scale).unwrap();
    let latent_model = fit_regression(z.view(), &ds.d_values(), false).unwrap();
    let (field, res) = inverse_latent(
        &ds,
        &ae.model,
        &latent_model,
        &train.scale,
        &cfg.solver,
        0.5,
        cfg.offset,
    )
    .unwrap();
    assert!(sse(&field, &target).unwrap().is_finite());
    assert!(res.objective <= 1e-10);
    assert_eq!(res.init_d, Some(0.7));
    let raw_model = fit_regression(raw_features(&ds).view(), &ds.d_values(), false).unwrap();
    let (field, res) = inverse_raw_space(&ds, &raw_model, &cfg.solver, 0.5, cfg.offset).unwrap();
    assert!(sse(&field, &target).unwrap().is_finite());
    assert!(res.objective <= 1e-10);

    let joint = train_joint(&ds, &train).unwrap();
    assert!(joint.history.iter().all(|l| l.is_finite()));
    let m = &joint.model;
    let at = |d: f64| predict_field(&m.boundary, &m.encdec.decoder, &train.scale, d).unwrap();
    let (low, high) = (at(0.3), at(0.7));
    assert!(
        sse(&low, &high).unwrap() > 1e-3,
        "boundary decoder ignores d"
    );
    // Joint model beats the autoencoder's inverse pipeline at d = 0.5.
    let (inv, _) = inverse_latent(
        &ds,
        &ae.model,
        &latent_model,
        &train.scale,
        &cfg.solver,
        0.5,
        cfg.offset,
    )
    .unwrap();
    assert!(sse(&at(0.5), &target).unwrap() < sse(&inv, &target).unwrap());
}

#[test]
fn nn_fits_its_training_length() {
    let cfg = ExperimentConfig::default();
    let grid = cfg.grid().unwrap();
    let spec = CapacitorSpec {
        d: cfg.nn_train_d,
        ..cfg.housing
    };
    let problem = CoordProblem::new(&spec, &grid, &cfg.solver).unwrap();
    let nn = train_nn_on(
        &problem,
        &CoordTrainConfig {
            seed: 1,
            ..cfg.coord
        },
    )
    .unwrap();
    let pred = nn.model.predict_grid(&grid).unwrap();
    let at_train = sse(&pred, &problem.truth).unwrap();
    let far = sse(&pred, &truth(&cfg, 0.7)).unwrap();
    // Zero prediction scores about 150 here.
    assert!(at_train < 2.0, "SSE at d_train = {at_train}");
    assert!(far > at_train);
}
