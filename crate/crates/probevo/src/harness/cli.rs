//! Command-line front end.
//!
//! Subcommands: `run`, `sweep`, `table`, `plotdata`. Every flag can
//! also be given as a `key = value` line in a config file passed with
//! `--config`; flags override the file.

use std::path::{Path, PathBuf};

use crate::complexity::WindowShapes;
use crate::error::{Error, Result};
use crate::harness::{
    emit_plot_data, read_manifest, run_single, run_sweep, ExperimentKind, ExperimentSpec,
    PlotSource,
};
use crate::network::{ConvergenceMetric, LayerSizes};

pub const USAGE: &str = "\
probevo — evolve the most complex image a network configuration can recognize

USAGE:
    probevo run      [OPTIONS]          one evolution of one configuration
    probevo sweep    [OPTIONS]          single-hidden-layer sweep (2-2-1 .. 2-16-1)
    probevo table    [OPTIONS]          equal-weight-budget comparison table
    probevo plotdata [--out FILE] DIR.. merge run logs into plot-ready CSV

OPTIONS (run, sweep, table):
    --config <file>   read `key = value` defaults from a file; flags override
    --seed <u64>      base RNG seed (default 1)
    --out <dir>       output directory (default runs)
    --dims <HxW>      image dimensions (default 20x20)
    --pop <n>         population capacity (default 100)
    --repeats <n>     runs per configuration for sweep/table (default 3)
    --workers <n>     parallel runs (default: one per core)
    --net <list>      configuration(s), e.g. 2-4-3-1 or 2-2-1,2-4-1

CONFIG FILE KEYS:
    seed, out, dims, pop, repeats, workers, net, and additionally
    mutation_rate, stagnation_limit, n_c, epsilon, max_epochs,
    metric (mse_times_recognized | mse_times_misrecognized),
    window_shapes (rectangles | squares)
";

/// Optional overrides collected from flags or a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecOverrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub dims: Option<(usize, usize)>,
    pub pop: Option<usize>,
    pub repeats: Option<usize>,
    pub workers: Option<usize>,
    pub nets: Option<Vec<LayerSizes>>,
    pub mutation_rate: Option<f64>,
    pub stagnation_limit: Option<usize>,
    pub n_c: Option<usize>,
    pub epsilon: Option<f64>,
    pub max_epochs: Option<usize>,
    pub metric: Option<ConvergenceMetric>,
    pub window_shapes: Option<WindowShapes>,
}

impl SpecOverrides {
    /// Applies one `key = value` setting.
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad {what}: {value:?}"));
        match key {
            "seed" => self.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "out" => self.out = Some(PathBuf::from(value)),
            "dims" => self.dims = Some(parse_dims(value)?),
            "pop" => self.pop = Some(value.parse().map_err(|_| bad("pop"))?),
            "repeats" => self.repeats = Some(value.parse().map_err(|_| bad("repeats"))?),
            "workers" => self.workers = Some(value.parse().map_err(|_| bad("workers"))?),
            "net" => {
                let nets = value
                    .split(',')
                    .map(|part| part.trim().parse::<LayerSizes>())
                    .collect::<Result<Vec<_>>>()?;
                self.nets = Some(nets);
            }
            "mutation_rate" => {
                self.mutation_rate = Some(value.parse().map_err(|_| bad("mutation_rate"))?)
            }
            "stagnation_limit" => {
                self.stagnation_limit = Some(value.parse().map_err(|_| bad("stagnation_limit"))?)
            }
            "n_c" => self.n_c = Some(value.parse().map_err(|_| bad("n_c"))?),
            "epsilon" => self.epsilon = Some(value.parse().map_err(|_| bad("epsilon"))?),
            "max_epochs" => self.max_epochs = Some(value.parse().map_err(|_| bad("max_epochs"))?),
            "metric" => {
                self.metric = Some(match value {
                    "mse_times_recognized" => ConvergenceMetric::MseTimesRecognized,
                    "mse_times_misrecognized" => ConvergenceMetric::MseTimesMisrecognized,
                    _ => return Err(bad("metric")),
                })
            }
            "window_shapes" => {
                self.window_shapes = Some(match value {
                    "rectangles" => WindowShapes::Rectangles,
                    "squares" => WindowShapes::Squares,
                    _ => return Err(bad("window_shapes")),
                })
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses a line-oriented `key = value` config file. `#` starts a
    /// comment; blank lines are ignored.
    pub fn parse_config_file(text: &str) -> Result<SpecOverrides> {
        let mut overrides = SpecOverrides::default();
        for (number, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", number + 1))
            })?;
            overrides.set(key.trim(), value.trim())?;
        }
        Ok(overrides)
    }

    /// Merges `self` over `base`: any field set here wins.
    pub fn merged_over(self, base: SpecOverrides) -> SpecOverrides {
        SpecOverrides {
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            dims: self.dims.or(base.dims),
            pop: self.pop.or(base.pop),
            repeats: self.repeats.or(base.repeats),
            workers: self.workers.or(base.workers),
            nets: self.nets.or(base.nets),
            mutation_rate: self.mutation_rate.or(base.mutation_rate),
            stagnation_limit: self.stagnation_limit.or(base.stagnation_limit),
            n_c: self.n_c.or(base.n_c),
            epsilon: self.epsilon.or(base.epsilon),
            max_epochs: self.max_epochs.or(base.max_epochs),
            metric: self.metric.or(base.metric),
            window_shapes: self.window_shapes.or(base.window_shapes),
        }
    }

    /// Builds the experiment spec, filling unset fields with defaults.
    pub fn into_spec(self, kind: ExperimentKind) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(kind);
        if let Some(seed) = self.seed {
            spec.base_seed = seed;
        }
        if let Some(out) = self.out {
            spec.out_dir = out;
        }
        if let Some((h, w)) = self.dims {
            spec.height = h;
            spec.width = w;
        }
        if let Some(pop) = self.pop {
            spec.capacity = pop;
        }
        if let Some(repeats) = self.repeats {
            spec.repeats = repeats;
        }
        if let Some(workers) = self.workers {
            spec.workers = workers;
        }
        if let Some(nets) = self.nets {
            spec.configs = nets;
        }
        if let Some(rate) = self.mutation_rate {
            spec.mutation_rate = rate;
        }
        if let Some(limit) = self.stagnation_limit {
            spec.stagnation_limit = limit;
        }
        if let Some(n_c) = self.n_c {
            spec.training.n_c = n_c;
        }
        if let Some(epsilon) = self.epsilon {
            spec.training.epsilon = epsilon;
        }
        if let Some(max_epochs) = self.max_epochs {
            spec.training.max_epochs = max_epochs;
        }
        if let Some(metric) = self.metric {
            spec.training.metric = metric;
        }
        if let Some(shapes) = self.window_shapes {
            spec.window_shapes = shapes;
        }
        spec
    }
}

/// `HxW`, e.g. `20x20`.
fn parse_dims(value: &str) -> Result<(usize, usize)> {
    let (h, w) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Config(format!("bad dims {value:?}, expected HxW")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad dims {value:?}, expected HxW")))
    };
    let dims = (parse(h)?, parse(w)?);
    if dims.0 == 0 || dims.1 == 0 {
        return Err(Error::Config("image dimensions must be positive".into()));
    }
    Ok(dims)
}

/// A parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Run(SpecOverrides),
    Sweep(SpecOverrides),
    Table(SpecOverrides),
    PlotData {
        out: Option<PathBuf>,
        dirs: Vec<PathBuf>,
    },
    Help,
}

/// Parses arguments (without the program name). Flags may be given as
/// `--key value` or `--key=value`; `--config` files are read here and
/// flags override their contents.
pub fn parse_args(args: &[String]) -> Result<Command> {
    let Some(subcommand) = args.first() else {
        return Ok(Command::Help);
    };
    match subcommand.as_str() {
        "help" | "--help" | "-h" => Ok(Command::Help),
        "plotdata" => {
            let mut out = None;
            let mut dirs = Vec::new();
            let mut it = args[1..].iter();
            while let Some(arg) = it.next() {
                if let Some(value) = flag_value("out", arg, &mut it)? {
                    out = Some(PathBuf::from(value));
                } else if arg.starts_with('-') {
                    return Err(Error::Config(format!("unknown flag {arg:?}")));
                } else {
                    dirs.push(PathBuf::from(arg));
                }
            }
            if dirs.is_empty() {
                return Err(Error::Config(
                    "plotdata needs at least one run directory".into(),
                ));
            }
            Ok(Command::PlotData { out, dirs })
        }
        "run" | "sweep" | "table" => {
            let mut flags = SpecOverrides::default();
            let mut config_file = None;
            let mut it = args[1..].iter();
            while let Some(arg) = it.next() {
                if let Some(value) = flag_value("config", arg, &mut it)? {
                    config_file = Some(PathBuf::from(value));
                    continue;
                }
                let mut matched = false;
                for key in ["seed", "out", "dims", "pop", "repeats", "workers", "net"] {
                    if let Some(value) = flag_value(key, arg, &mut it)? {
                        flags.set(key, &value)?;
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    return Err(Error::Config(format!("unknown flag {arg:?}")));
                }
            }
            let mut overrides = flags;
            if let Some(path) = config_file {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                overrides = overrides.merged_over(SpecOverrides::parse_config_file(&text)?);
            }
            Ok(match subcommand.as_str() {
                "run" => Command::Run(overrides),
                "sweep" => Command::Sweep(overrides),
                _ => Command::Table(overrides),
            })
        }
        other => Err(Error::Config(format!(
            "unknown subcommand {other:?}; try `probevo help`"
        ))),
    }
}

/// Matches `--key value` or `--key=value`, returning the value.
fn flag_value(
    key: &str,
    arg: &str,
    rest: &mut std::slice::Iter<'_, String>,
) -> Result<Option<String>> {
    let Some(stripped) = arg.strip_prefix("--") else {
        return Ok(None);
    };
    if stripped == key {
        match rest.next() {
            Some(value) => Ok(Some(value.clone())),
            None => Err(Error::Config(format!("--{key} needs a value"))),
        }
    } else if let Some(value) = stripped.strip_prefix(&format!("{key}=")) {
        Ok(Some(value.to_string()))
    } else {
        Ok(None)
    }
}

/// Runs a parsed command. Returns an error message for the caller to
/// print and turn into a nonzero exit.
pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Help => {
            println!("{USAGE}");
            Ok(())
        }
        Command::Run(overrides) => {
            let spec = overrides.into_spec(ExperimentKind::SingleRun);
            spec.validate()?;
            if spec.configs.len() != 1 {
                return Err(Error::Config(
                    "run takes exactly one --net configuration".into(),
                ));
            }
            let config = spec.evolution_config(&spec.configs[0], spec.base_seed);
            let run = run_single(&config, &spec.out_dir, 1)?;
            println!(
                "champion complexity {} (ln {}) after {} generations; artifacts in {}",
                crate::util::fmt_f64(run.champion_complexity.value()),
                crate::util::fmt_f64(run.champion_complexity.ln()),
                run.generations,
                run.dir.display()
            );
            Ok(())
        }
        Command::Sweep(overrides) => {
            let spec = overrides.into_spec(ExperimentKind::SingleLayerSweep);
            run_sweep(&spec)?;
            println!(
                "summary written to {}",
                spec.out_dir.join("summary.csv").display()
            );
            Ok(())
        }
        Command::Table(overrides) => {
            let spec = overrides.into_spec(ExperimentKind::EqualWeightsTable);
            run_sweep(&spec)?;
            println!(
                "summary written to {}",
                spec.out_dir.join("summary.csv").display()
            );
            Ok(())
        }
        Command::PlotData { out, dirs } => {
            let mut sources = Vec::new();
            for dir in &dirs {
                sources.push(plot_source_from_dir(dir)?);
            }
            let csv = emit_plot_data(&sources)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
                    println!("plot data written to {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

/// Builds a plot source from a run directory, reading the label and
/// repeat from its manifest.
fn plot_source_from_dir(dir: &Path) -> Result<PlotSource> {
    let manifest = read_manifest(dir)?;
    let label = manifest
        .get("net")
        .ok_or_else(|| Error::Parse(format!("{}: manifest has no net", dir.display())))?
        .to_string();
    let repeat = manifest
        .get("repeat")
        .and_then(|r| r.parse().ok())
        .unwrap_or(1);
    Ok(PlotSource {
        label,
        repeat,
        dir: dir.to_path_buf(),
    })
}

/// Entry point used by the binary.
pub fn main_with_args(args: Vec<String>) -> i32 {
    match parse_args(&args).and_then(execute) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}
