use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capfield::bundle::{load_bundle, save_bundle};
use capfield::dataset::{save, split_supervised};
use capfield::experiment::{reports_csv, summary_table, ExperimentConfig, SseReport, Workbench};
use capfield::heatmap::{export_heatmap, HeatmapFormat};
use capfield::{
    classify_nodes, field_volume, laplacian_residual, solve_sor, CapacitorSpec, Error, Field,
    GridSpec,
};
use clap::{Parser, Subcommand};

/// Capacitor field solver, surrogate training and benchmark tables.
#[derive(Parser)]
#[command(name = "capfield", version)]
struct Cli {
    /// key=value experiment configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run with this single seed instead of the configured list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one geometry with SOR and print convergence statistics.
    Solve {
        #[arg(long)]
        d: f64,
        /// Also write the field as a heatmap (format from the extension: .pgm or .csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate the training corpus and write it as a dataset file.
    GenData {
        #[arg(long, default_value = "corpus.capd")]
        output: PathBuf,
    },
    /// Train one model and save its checkpoints and manifest.
    Train {
        /// bou-dec, enc-dec+bou-dec (or joint), NN or PINN.
        #[arg(long)]
        method: String,
        /// Model directory; defaults to `<out_dir>/<method>-seed<seed>`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// SSE of raw space, enc-dec, bou-dec and enc-dec+bou-dec on held-out plate lengths.
    Table1,
    /// SSE of NN, PINN and enc-dec+bou-dec away from the coordinate nets' training length.
    Table2,
    /// Export a field as PGM or CSV, from SOR or from a trained model.
    Heatmap {
        #[arg(long)]
        d: f64,
        #[arg(long, default_value = "pgm")]
        format: HeatmapFormat,
        #[arg(long)]
        output: PathBuf,
        /// Model directory written by `train`; SOR is used when absent.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> capfield::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_text(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn solve_field(cfg: &ExperimentConfig, d: f64) -> capfield::Result<Field<f64>> {
    let spec = CapacitorSpec { d, ..cfg.housing };
    spec.validate()?;
    let grid = cfg.grid()?;
    let (field, report) = solve_sor(&spec, &grid, &cfg.solver)?;
    if !report.converged {
        return Err(Error::NotConverged {
            d,
            iterations: report.iterations,
            final_update: report.final_update,
        });
    }
    Ok(field)
}

fn format_of(path: &Path) -> HeatmapFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => HeatmapFormat::Csv,
        _ => HeatmapFormat::Pgm,
    }
}

fn write_table(cfg: &ExperimentConfig, name: &str, reports: &[SseReport]) -> capfield::Result<()> {
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(format!("{name}.csv"));
    fs::write(&path, reports_csv(cfg, reports))?;
    print!("{}", summary_table(reports));
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> capfield::Result<()> {
    let cfg = load_config(cli)?;
    let seed = cfg.seeds[0];
    match &cli.command {
        Command::Solve { d, output } => {
            let spec = CapacitorSpec {
                d: *d,
                ..cfg.housing
            };
            spec.validate()?;
            let grid = cfg.grid()?;
            let (field, report) = solve_sor(&spec, &grid, &cfg.solver)?;
            let classes = classify_nodes(&spec, &grid)?;
            println!("iterations   {}", report.iterations);
            println!("converged    {}", report.converged);
            println!("last update  {:e}", report.final_update);
            println!("residual     {:e}", laplacian_residual(&field, &classes));
            println!("volume       {}", field_volume(&field));
            if !report.converged {
                return Err(Error::NotConverged {
                    d: *d,
                    iterations: report.iterations,
                    final_update: report.final_update,
                });
            }
            if let Some(path) = output {
                export_heatmap(&field, path, format_of(path))?;
            }
        }
        Command::GenData { output } => {
            let bench = Workbench::new(&cfg)?;
            let ds = split_supervised(&bench.corpus, cfg.n_supervised, seed)?;
            save(&ds, output)?;
            println!(
                "{} samples ({} supervised) -> {}",
                ds.len(),
                ds.supervised_count(),
                output.display()
            );
        }
        Command::Train { method, output } => {
            let mut bench = Workbench::new(&cfg)?;
            let bundle = bench.bundle(method, seed)?;
            let dir = output.clone().unwrap_or_else(|| {
                cfg.out_dir
                    .join(format!("{}-seed{seed}", method.to_ascii_lowercase()))
            });
            save_bundle(&bundle, &bench.corpus.grid, &dir)?;
            println!("saved {method} to {}", dir.display());
        }
        Command::Table1 => write_table(&cfg, "table1", &Workbench::new(&cfg)?.table1()?)?,
        Command::Table2 => write_table(&cfg, "table2", &Workbench::new(&cfg)?.table2()?)?,
        Command::Heatmap {
            d,
            format,
            output,
            model,
        } => {
            let field = match model {
                None => solve_field(&cfg, *d)?,
                Some(dir) => {
                    let (bundle, nx, ny) = load_bundle(dir)?;
                    let grid = GridSpec::new(nx, ny, &cfg.housing)?;
                    Field::new(grid, bundle.predict(&grid, *d)?)?
                }
            };
            export_heatmap(&field, output, *format)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
