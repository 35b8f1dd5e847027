use clap::{Args, Parser, Subcommand};
use harmonia::autoenc::{self, NetworkParams};
use harmonia::bovw::BovwModel;
use harmonia::harness::{self, ExperimentConfig, ServiceConfig};
use harmonia::learn::{save_model, Family};
use harmonia::pipeline::{DatasetVariant, FeaturePipeline, RawFeatures};
use harmonia::scene::{generate, rasterize, save_raster_png, Composition};
use harmonia::targets::{
    deviation_distributions, format_table, merge_classes, read_jsonl, simulate_convergence, ClassLabel,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

type CliResult<T = ()> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "harmonia", version, about = "Harmony quantification for black/white/gray compositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (JSON); missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct Labeled {
    /// Composition directory (`{id}.json`).
    #[arg(long)]
    input: PathBuf,
    /// Ratings JSONL; labels come from round-0 ratings.
    #[arg(long)]
    ratings: PathBuf,
    /// Restrict to one rater (defaults to the config's rater_id).
    #[arg(long)]
    rater: Option<String>,
}

impl Labeled {
    fn load(&self, cfg: &ExperimentConfig) -> CliResult<(Vec<Composition>, Vec<ClassLabel>)> {
        let comps = harness::load_corpus(&self.input)?;
        let records = read_jsonl(&self.ratings)?;
        let ids: Vec<String> = comps.iter().map(|c| c.id.clone()).collect();
        let rater = self.rater.as_deref().or(cfg.rater_id.as_deref());
        let labels = harness::labels_from_ratings(&records, &ids, rater)?;
        let (comps, labels) = harness::labeled(&comps, &labels);
        if comps.is_empty() {
            return Err("no rated compositions".into());
        }
        Ok((comps, labels))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded compositions with their PNG rasters.
    Generate {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Render every composition in a directory to PNG.
    Rasterize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write the assembled feature matrix plus the fitted pipeline sidecar.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "d3")]
        dataset: DatasetVariant,
        #[arg(long)]
        out: PathBuf,
        /// Autoencoder weights (d1, d2).
        #[arg(long)]
        autoenc: Option<PathBuf>,
        /// Codebooks (d1).
        #[arg(long)]
        bovw: Option<PathBuf>,
        /// Apply an existing pipeline instead of fitting one.
        #[arg(long)]
        pipeline: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Train the convolutional autoencoder on a composition directory.
    TrainAe {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fit the visual-word codebooks.
    FitBovw {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// With --ratings: write per-class mean histograms for codebook size --k.
        #[arg(long)]
        histograms: Option<PathBuf>,
        #[arg(long)]
        ratings: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a deployable predictor (pipeline plus model) on all rated data.
    Train {
        #[command(flatten)]
        data: Labeled,
        #[arg(long)]
        model: Family,
        #[arg(long, default_value = "d3")]
        dataset: DatasetVariant,
        #[arg(long)]
        out: PathBuf,
        /// Reuse autoencoder weights instead of training them.
        #[arg(long)]
        autoenc: Option<PathBuf>,
        /// Also write the bare model file.
        #[arg(long)]
        model_only: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the experiment grid and write report.csv and report.txt.
    Evaluate {
        #[command(flatten)]
        data: Labeled,
        /// Run every (setup, dataset, model) cell of the config.
        #[arg(long)]
        grid: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        autoenc: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate re-rating convergence from observed re-ratings.
    SimulateConvergence {
        #[arg(long)]
        reratings: PathBuf,
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        rater: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Serve the rating API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn create_dir(p: &Path) -> CliResult {
    std::fs::create_dir_all(p).map_err(|e| format!("{}: {e}", p.display()).into())
}

fn write(p: &Path, text: &str) -> CliResult {
    std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate { count, out, common } => {
            let cfg = common.load()?;
            create_dir(&out)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let comps = (0..count)
                .map(|_| generate(&cfg.generation, rng.next_u64()))
                .collect::<Result<Vec<_>, _>>()?;
            harness::save_corpus(&out, &comps)?;
            render_all(&comps, &out)?;
            println!("wrote {count} compositions to {}", out.display());
        }
        Command::Rasterize { input, out, common } => {
            common.load()?;
            create_dir(&out)?;
            let comps = harness::load_corpus(&input)?;
            render_all(&comps, &out)?;
            println!("rendered {} compositions", comps.len());
        }
        Command::Extract { input, dataset, out, autoenc, bovw, pipeline, common } => {
            let cfg = common.load()?;
            let comps = harness::load_corpus(&input)?;
            let autoenc = match (dataset.uses_autoenc(), autoenc) {
                (true, Some(p)) => Some(harness::autoenc_block(&NetworkParams::load(&p)?, &comps)?),
                (true, None) => return Err(format!("{dataset} needs --autoenc").into()),
                _ => None,
            };
            let bovw = match (dataset.uses_bovw(), bovw) {
                (true, Some(p)) => {
                    let m = BovwModel::load(&p)?;
                    Some(harness::bovw_block(&m, &harness::descriptor_sets(&comps, &cfg.bovw.detector))?)
                }
                (true, None) => return Err(format!("{dataset} needs --bovw").into()),
                _ => None,
            };
            let raw = RawFeatures { handcrafted: harness::handcrafted_block(&comps)?, autoenc, bovw };
            let plan = match pipeline {
                Some(p) => FeaturePipeline::load(&p)?,
                None => {
                    let plan = FeaturePipeline::fit(&raw, dataset, &cfg.pipeline)?;
                    plan.save(&out.with_extension("pipeline.json"))?;
                    plan
                }
            };
            let block = plan.apply(&raw)?;
            let mut w = csv::Writer::from_path(&out)?;
            let mut header = vec!["id".to_string()];
            header.extend(block.names.iter().cloned());
            w.write_record(&header)?;
            for (c, row) in comps.iter().zip(block.data.rows()) {
                let mut rec = vec![c.id.clone()];
                rec.extend(row.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
            w.flush()?;
            println!("{} rows × {} columns ({dataset})", block.nrows(), block.names.len());
        }
        Command::TrainAe { input, out, common } => {
            let cfg = common.load()?;
            let comps = harness::load_corpus(&input)?;
            let images = harness::autoenc_images(&comps, cfg.autoenc.spec.input_size);
            let (params, report) = autoenc::train(&cfg.autoenc, &images, cfg.seed)?;
            params.save(&out)?;
            if let Some(last) = report.epochs.last() {
                println!("epoch {}: train {:.6} validation {:.6}", last.epoch, last.train, last.validation);
            }
        }
        Command::FitBovw { input, out, histograms, ratings, k, common } => {
            let cfg = common.load()?;
            let comps = harness::load_corpus(&input)?;
            let sets = harness::descriptor_sets(&comps, &cfg.bovw.detector);
            let model = BovwModel::fit(&sets.iter().collect::<Vec<_>>(), &cfg.bovw, cfg.seed)?;
            model.save(&out)?;
            println!("{} codebooks, {} columns", model.codebooks.len(), model.width());
            if let (Some(hist), Some(ratings)) = (histograms, ratings) {
                let ids: Vec<String> = comps.iter().map(|c| c.id.clone()).collect();
                let labels = harness::labels_from_ratings(&read_jsonl(&ratings)?, &ids, cfg.rater_id.as_deref())?;
                let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_some()).collect();
                let block = harness::bovw_block(&model, &sets)?.rows(&rows);
                let labels: Vec<ClassLabel> = rows.iter().filter_map(|&i| labels[i]).collect();
                write(&hist, &harness::bovw_class_means_csv(&harness::bovw_class_means(&block, &labels, k)))?;
            }
        }
        Command::Train { data, model, dataset, out, autoenc, model_only, common } => {
            let cfg = common.load()?;
            let (comps, labels) = data.load(&cfg)?;
            let net = autoenc.map(|p| NetworkParams::load(&p)).transpose()?;
            let predictor = harness::fit_predictor(&comps, &labels, dataset, model, &cfg, net)?;
            predictor.save(&out)?;
            if let Some(p) = model_only {
                save_model(&predictor.model, &p)?;
            }
            println!("trained {model} on {} compositions ({dataset})", comps.len());
        }
        Command::Evaluate { data, grid, out, autoenc, common } => {
            let mut cfg = common.load()?;
            if !grid {
                // a single cell: the first configured setup, dataset and model
                cfg.setups.truncate(1);
                cfg.datasets.truncate(1);
                cfg.models.truncate(1);
            }
            let (comps, labels) = data.load(&cfg)?;
            let net = autoenc.map(|p| NetworkParams::load(&p)).transpose()?;
            let (inputs, _) = harness::prepare_inputs(&comps, &labels, &cfg, net)?;
            let report = harness::run_grid(&inputs, &cfg)?;
            create_dir(&out)?;
            write(&out.join("report.csv"), &report.to_csv())?;
            let text = harness::render_report(&report);
            write(&out.join("report.txt"), &text)?;
            print!("{text}");
        }
        Command::SimulateConvergence { reratings, rounds, trials, rater, common } => {
            let cfg = common.load()?;
            let records = read_jsonl(&reratings)?;
            let dist = deviation_distributions(&records, rater.as_deref().or(cfg.rater_id.as_deref()));
            let converged = simulate_convergence(&dist, rounds, trials, cfg.seed);
            print!("{}", format_table(&converged));
            let merged: Vec<String> =
                (1..=5u8).map(|c| format!("{c}→{}", merge_classes(c).expect("valid class"))).collect();
            println!("class merge: {}", merged.join(", "));
        }
        Command::Serve { port, data, host, common } => {
            let cfg = common.load()?;
            let svc = ServiceConfig { rerate_subset: cfg.rerate_subset, rerate_rounds: cfg.rerate_rounds, ..ServiceConfig::new(data) };
            let rt = tokio::runtime::Runtime::new()?;
            println!("listening on http://{host}:{port}");
            rt.block_on(harness::serve(&host, port, svc))?;
        }
    }
    Ok(())
}

fn render_all(comps: &[Composition], out: &Path) -> CliResult {
    use rayon::prelude::*;
    comps
        .par_iter()
        .try_for_each(|c| save_raster_png(&rasterize(c), c.canvas.gray_level, &out.join(format!("{}.png", c.id))))?;
    Ok(())
}

