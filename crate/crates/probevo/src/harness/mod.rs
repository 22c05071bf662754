//! Experiment driver: runs evolutions across network configurations,
//! with derived per-run seeds and plot-ready CSV outputs.
//!
//! Two study layouts are built in: a sweep over single-hidden-layer
//! widths, and a comparison table of configurations with nearly equal
//! weight counts. Each run writes its own directory (`runlog.csv`,
//! `champion.pbm`, `manifest.txt`); a sweep adds `summary.csv` and
//! `plotdata.csv` at the top.
//!
//! Given the same spec (including the base seed), every emitted file is
//! byte-identical across runs. Timings are reported on stdout only.

pub mod cli;

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::complexity::{Complexity, WindowShapes};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionConfig, RunLog};
use crate::image::BinaryImage;
use crate::network::{ConvergenceMetric, LayerSizes, TrainingParams};
use crate::util::fmt_f64;

/// Which study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// One evolution of one configuration.
    SingleRun,
    /// Single-hidden-layer sweep (default widths 2, 4, 8, 16).
    SingleLayerSweep,
    /// Equal-weight-budget comparison of multi-layer configurations.
    EqualWeightsTable,
}

impl ExperimentKind {
    /// Default configuration list for the study.
    pub fn default_configs(self) -> Vec<LayerSizes> {
        let labels: &[&str] = match self {
            ExperimentKind::SingleRun => &["2-8-1"],
            ExperimentKind::SingleLayerSweep => &["2-2-1", "2-4-1", "2-8-1", "2-16-1"],
            ExperimentKind::EqualWeightsTable => {
                &["2-2-6-1", "2-3-3-2-1", "2-8-1", "2-5-2-1", "2-4-3-1"]
            }
        };
        labels.iter().map(|l| l.parse().unwrap()).collect()
    }
}

/// A full experiment description: what to run, how often, where to
/// write, and any overrides of the evolution parameters.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub configs: Vec<LayerSizes>,
    pub height: usize,
    pub width: usize,
    pub repeats: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads for independent runs; 0 means one per core.
    pub workers: usize,
    pub capacity: usize,
    pub mutation_rate: f64,
    pub stagnation_limit: usize,
    pub training: TrainingParams,
    pub window_shapes: WindowShapes,
}

impl ExperimentSpec {
    /// Reference-scale defaults: 20×20 images, population 100,
    /// stagnation 100, three repeats per configuration.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentSpec {
            kind,
            configs: kind.default_configs(),
            height: 20,
            width: 20,
            repeats: 3,
            base_seed: 1,
            out_dir: PathBuf::from("runs"),
            workers: 0,
            capacity: 100,
            mutation_rate: 0.0025,
            stagnation_limit: 100,
            training: TrainingParams::default(),
            window_shapes: WindowShapes::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.configs.is_empty() {
            return Err(Error::Config("configuration list is empty".into()));
        }
        self.evolution_config(&self.configs[0], 0).validate()
    }

    /// The evolution parameters for one run of `sizes` with `seed`.
    pub fn evolution_config(&self, sizes: &LayerSizes, seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            layer_sizes: sizes.clone(),
            height: self.height,
            width: self.width,
            capacity: self.capacity,
            mutation_rate: self.mutation_rate,
            stagnation_limit: self.stagnation_limit,
            training: self.training,
            window_shapes: self.window_shapes,
            seed,
        }
    }

    fn worker_count(&self, jobs: usize) -> usize {
        let auto = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        let w = if self.workers == 0 {
            auto
        } else {
            self.workers
        };
        w.clamp(1, jobs.max(1))
    }
}

/// Stable per-run seed: a 64-bit mix of the base seed, the
/// configuration label, and the repeat index, so distinct
/// (configuration, repeat) pairs get independent streams.
pub fn derive_seed(base_seed: u64, label: &str, repeat: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base_seed ^ h.rotate_left(17) ^ (repeat as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Where one completed run landed and what it found.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub label: String,
    pub repeat: usize,
    pub seed: u64,
    pub dir: PathBuf,
    pub champion_complexity: Complexity,
    pub generations: usize,
    pub cumulative_epochs: u64,
    pub wall_time: Duration,
}

/// Executes one evolution and writes `runlog.csv`, `champion.pbm`, and
/// `manifest.txt` into `dir`.
pub fn run_single(config: &EvolutionConfig, dir: &Path, repeat: usize) -> Result<RunOutput> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let started = Instant::now();
    let log = evolve(config.clone())?;
    let wall_time = started.elapsed();

    let runlog_path = dir.join("runlog.csv");
    std::fs::write(&runlog_path, log.to_csv()).map_err(|e| Error::io(&runlog_path, e))?;
    log.champion
        .image()
        .write_pbm_file(&dir.join("champion.pbm"))?;
    let manifest_path = dir.join("manifest.txt");
    std::fs::write(&manifest_path, manifest_text(config, repeat, &log))
        .map_err(|e| Error::io(&manifest_path, e))?;

    Ok(RunOutput {
        label: config.layer_sizes.to_string(),
        repeat,
        seed: config.seed,
        dir: dir.to_path_buf(),
        champion_complexity: log.champion.complexity(),
        generations: log.final_generation(),
        cumulative_epochs: log.records.last().map(|r| r.cumulative_epochs).unwrap_or(0),
        wall_time,
    })
}

fn manifest_text(config: &EvolutionConfig, repeat: usize, log: &RunLog) -> String {
    let metric = match config.training.metric {
        ConvergenceMetric::MseTimesRecognized => "mse_times_recognized",
        ConvergenceMetric::MseTimesMisrecognized => "mse_times_misrecognized",
    };
    format!(
        "probevo run manifest\n\
         net = {}\n\
         dims = {}x{}\n\
         pop = {}\n\
         mutation_rate = {}\n\
         stagnation_limit = {}\n\
         n_c = {}\n\
         epsilon = {}\n\
         max_epochs = {}\n\
         metric = {}\n\
         window_shapes = {}\n\
         seed = {}\n\
         repeat = {}\n\
         generations = {}\n\
         cumulative_epochs = {}\n\
         champion_complexity = {}\n\
         champion_log_complexity = {}\n",
        config.layer_sizes,
        config.height,
        config.width,
        config.capacity,
        fmt_f64(config.mutation_rate),
        config.stagnation_limit,
        config.training.n_c,
        fmt_f64(config.training.epsilon),
        config.training.max_epochs,
        metric,
        config.window_shapes,
        config.seed,
        repeat,
        log.final_generation(),
        log.records.last().map(|r| r.cumulative_epochs).unwrap_or(0),
        fmt_f64(log.champion.complexity().value()),
        fmt_f64(log.champion.complexity().ln()),
    )
}

/// `key = value` pairs of a run manifest.
#[derive(Debug, Clone)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join("manifest.txt");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let entries = text
        .lines()
        .filter_map(|line| {
            line.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect();
    Ok(RunManifest { entries })
}

/// One row of a sweep or table summary.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub label: String,
    pub weight_count: usize,
    /// Champion complexity per repeat; `None` marks a failed run.
    pub repeat_complexities: Vec<Option<Complexity>>,
    pub max_complexity: Option<Complexity>,
    pub total_generations: usize,
    pub wall_time: Duration,
    /// First failure message, when any repeat failed.
    pub error: Option<String>,
}

/// Per-configuration results of a sweep, one row per configuration.
#[derive(Debug, Clone)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
    pub repeats: usize,
}

impl SummaryTable {
    /// CSV with one complexity column per repeat plus the maximum.
    /// Wall-times are not included: they vary run to run, and emitted
    /// files stay byte-identical for a fixed spec.
    pub fn to_csv(&self) -> String {
        let mut header = String::from("configuration,weight_count");
        for k in 1..=self.repeats {
            header.push_str(&format!(",rep{k}_complexity"));
        }
        header.push_str(",max_complexity,max_log_complexity,total_generations\n");
        let mut out = header;
        for row in &self.rows {
            out.push_str(&format!("{},{}", row.label, row.weight_count));
            for c in &row.repeat_complexities {
                match c {
                    Some(c) => out.push_str(&format!(",{}", fmt_f64(c.value()))),
                    None => out.push_str(",NA"),
                }
            }
            match row.max_complexity {
                Some(c) => out.push_str(&format!(",{},{}", fmt_f64(c.value()), fmt_f64(c.ln()))),
                None => out.push_str(",NA,NA"),
            }
            out.push_str(&format!(",{}\n", row.total_generations));
        }
        out
    }
}

struct Job {
    index: usize,
    config: EvolutionConfig,
    dir: PathBuf,
    repeat: usize,
}

/// Runs all (configuration, repeat) jobs across a worker pool. Results
/// come back in job order regardless of scheduling.
fn run_jobs(spec: &ExperimentSpec, jobs: Vec<Job>) -> Vec<Result<RunOutput>> {
    let workers = spec.worker_count(jobs.len());
    let total = jobs.len();
    let queue = Mutex::new(jobs.into_iter().collect::<VecDeque<_>>());
    let results = Mutex::new((0..total).map(|_| None).collect::<Vec<_>>());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = match queue.lock().unwrap().pop_front() {
                    Some(job) => job,
                    None => break,
                };
                let outcome = run_single(&job.config, &job.dir, job.repeat);
                match &outcome {
                    Ok(run) => println!(
                        "run {} rep {}: {} generations, champion complexity {} ({:.1}s)",
                        run.label,
                        run.repeat,
                        run.generations,
                        fmt_f64(run.champion_complexity.value()),
                        run.wall_time.as_secs_f64()
                    ),
                    Err(err) => eprintln!(
                        "run {} rep {} failed: {err}",
                        job.config.layer_sizes, job.repeat
                    ),
                }
                results.lock().unwrap()[job.index] = Some(outcome);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job stores a result"))
        .collect()
}

/// Runs every configuration × repeat, writing per-run directories plus
/// `summary.csv` and `plotdata.csv` under the spec's output directory.
///
/// Failed runs are recorded in their summary row and do not stop the
/// sweep. Rows of an equal-weights table are ordered by maximal
/// complexity, best first; sweep rows keep the configuration order.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SummaryTable> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for sizes in &spec.configs {
        let label = sizes.to_string();
        for repeat in 1..=spec.repeats {
            let seed = derive_seed(spec.base_seed, &label, repeat);
            jobs.push(Job {
                index: jobs.len(),
                config: spec.evolution_config(sizes, seed),
                dir: spec.out_dir.join(&label).join(format!("rep{repeat}")),
                repeat,
            });
        }
    }
    let results = run_jobs(spec, jobs);

    let mut rows = Vec::with_capacity(spec.configs.len());
    let mut sources = Vec::new();
    for (ci, sizes) in spec.configs.iter().enumerate() {
        let label = sizes.to_string();
        let mut repeat_complexities = Vec::with_capacity(spec.repeats);
        let mut total_generations = 0;
        let mut wall_time = Duration::ZERO;
        let mut error = None;
        for (ri, result) in results[ci * spec.repeats..(ci + 1) * spec.repeats]
            .iter()
            .enumerate()
        {
            match result {
                Ok(run) => {
                    repeat_complexities.push(Some(run.champion_complexity));
                    total_generations += run.generations;
                    wall_time += run.wall_time;
                    sources.push(PlotSource {
                        label: label.clone(),
                        repeat: ri + 1,
                        dir: run.dir.clone(),
                    });
                }
                Err(err) => {
                    repeat_complexities.push(None);
                    if error.is_none() {
                        error = Some(err.to_string());
                    }
                }
            }
        }
        let max_complexity = repeat_complexities.iter().flatten().max().copied();
        rows.push(SummaryRow {
            label,
            weight_count: sizes.weight_count(),
            repeat_complexities,
            max_complexity,
            total_generations,
            wall_time,
            error,
        });
    }
    if spec.kind == ExperimentKind::EqualWeightsTable {
        // Ranking table: best configuration first, failures last.
        rows.sort_by(|a, b| match (b.max_complexity, a.max_complexity) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Greater,
            (None, Some(_)) => std::cmp::Ordering::Less,
            (None, None) => std::cmp::Ordering::Equal,
        });
    }
    let table = SummaryTable {
        rows,
        repeats: spec.repeats,
    };

    std::fs::create_dir_all(&spec.out_dir).map_err(|e| Error::io(&spec.out_dir, e))?;
    let summary_path = spec.out_dir.join("summary.csv");
    std::fs::write(&summary_path, table.to_csv()).map_err(|e| Error::io(&summary_path, e))?;
    let plot_path = spec.out_dir.join("plotdata.csv");
    std::fs::write(&plot_path, emit_plot_data(&sources)?).map_err(|e| Error::io(&plot_path, e))?;

    for row in &table.rows {
        println!(
            "{}: max complexity {}, total {} generations, {:.1}s",
            row.label,
            row.max_complexity
                .map(|c| fmt_f64(c.value()))
                .unwrap_or_else(|| "NA".into()),
            row.total_generations,
            row.wall_time.as_secs_f64()
        );
    }
    Ok(table)
}

/// The equal-weight-budget comparison; identical machinery to
/// [`run_sweep`] with the table's configuration list and row ranking.
pub fn run_equal_weights(spec: &ExperimentSpec) -> Result<SummaryTable> {
    run_sweep(spec)
}

/// A completed run directory to merge into plot data.
#[derive(Debug, Clone)]
pub struct PlotSource {
    pub label: String,
    pub repeat: usize,
    pub dir: PathBuf,
}

/// Merges run logs into one long-format CSV
/// (`configuration,repeat,generation,best_complexity`), suitable for
/// plotting best-complexity-per-generation curves.
///
/// The best-complexity field is copied verbatim from each run log.
/// Sources with a missing or malformed log are skipped with a warning.
pub fn emit_plot_data(sources: &[PlotSource]) -> Result<String> {
    let mut out = String::from("configuration,repeat,generation,best_complexity\n");
    for src in sources {
        let path = src.dir.join("runlog.csv");
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(err) => {
                eprintln!("skipping {}: {err}", path.display());
                continue;
            }
        };
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let columns: Vec<&str> = header.split(',').collect();
        let (gen_col, best_col) = match (
            columns.iter().position(|&c| c == "generation"),
            columns.iter().position(|&c| c == "best_complexity"),
        ) {
            (Some(g), Some(b)) => (g, b),
            _ => {
                eprintln!("skipping {}: unrecognized header", path.display());
                continue;
            }
        };
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() <= gen_col.max(best_col) {
                eprintln!("skipping malformed row in {}", path.display());
                continue;
            }
            out.push_str(&format!(
                "{},{},{},{}\n",
                src.label, src.repeat, fields[gen_col], fields[best_col]
            ));
        }
    }
    Ok(out)
}

/// Re-reads the champion image of a run directory and re-scores it.
pub fn rescore_champion(dir: &Path, shapes: WindowShapes) -> Result<Complexity> {
    let img = BinaryImage::read_pbm_file(&dir.join("champion.pbm"))?;
    Ok(crate::complexity::complexity_2d_with(&img, shapes))
}
