//! Run-directory artifacts: presence, internal consistency, and
//! byte-identical reproducibility.

mod common;

use std::path::PathBuf;

use probevo::complexity::WindowShapes;
use probevo::evolution::EvolutionConfig;
use probevo::harness::{
    cli, emit_plot_data, read_manifest, rescore_champion, run_single, run_sweep, ExperimentKind,
    ExperimentSpec, PlotSource,
};
use probevo::image::BinaryImage;

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("probevo-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn quick_config(seed: u64) -> EvolutionConfig {
    let mut config = EvolutionConfig::new("2-3-1".parse().unwrap());
    config.height = 7;
    config.width = 7;
    config.capacity = 5;
    config.stagnation_limit = 10;
    config.seed = seed;
    config
}

#[test]
fn run_single_artifacts_are_consistent() {
    let dir = temp_dir("single");
    let config = quick_config(21);
    let run = run_single(&config, &dir, 1).unwrap();

    let runlog = std::fs::read_to_string(dir.join("runlog.csv")).unwrap();
    let last = runlog.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    // Champion complexity equals the last best in the CSV (which holds
    // 12 significant digits).
    let best: f64 = fields[1].parse().unwrap();
    assert!((best - run.champion_complexity.value()).abs() < 1e-12);

    // Manifest echoes the config and the champion score.
    let manifest = read_manifest(&dir).unwrap();
    assert_eq!(manifest.get("net"), Some("2-3-1"));
    assert_eq!(manifest.get("dims"), Some("7x7"));
    assert_eq!(manifest.get("pop"), Some("5"));
    assert_eq!(manifest.get("seed"), Some("21"));
    let champion: f64 = manifest
        .get("champion_complexity")
        .unwrap()
        .parse()
        .unwrap();

    // Round trip: re-read the champion image and re-score it.
    let rescored = rescore_champion(&dir, WindowShapes::Rectangles).unwrap();
    assert!((rescored.value() - champion).abs() < 1e-12);
    assert_eq!(rescored, run.champion_complexity);

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = temp_dir("rerun-a");
    let dir_b = temp_dir("rerun-b");
    run_single(&quick_config(33), &dir_a, 1).unwrap();
    run_single(&quick_config(33), &dir_b, 1).unwrap();
    for name in ["runlog.csv", "champion.pbm", "manifest.txt"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    std::fs::remove_dir_all(&dir_a).unwrap();
    std::fs::remove_dir_all(&dir_b).unwrap();
}

fn quick_spec(out: PathBuf) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(ExperimentKind::SingleLayerSweep);
    spec.configs = vec!["2-3-1".parse().unwrap()];
    spec.height = 7;
    spec.width = 7;
    spec.capacity = 5;
    spec.stagnation_limit = 10;
    spec.repeats = 1;
    spec.base_seed = 41;
    spec.out_dir = out;
    spec
}

#[test]
fn degenerate_sweep_yields_one_row_and_plot_data() {
    let out = temp_dir("sweep");
    let spec = quick_spec(out.clone());
    let table = run_sweep(&spec).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.repeats, 1);
    let row = &table.rows[0];
    assert_eq!(row.label, "2-3-1");
    assert!(row.error.is_none());
    assert!(row.max_complexity.is_some());

    // summary.csv and plotdata.csv exist and are consistent.
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("configuration,weight_count,rep1_complexity"));
    assert_eq!(summary.lines().count(), 2);

    let runlog = std::fs::read_to_string(out.join("2-3-1/rep1/runlog.csv")).unwrap();
    let plot = std::fs::read_to_string(out.join("plotdata.csv")).unwrap();
    assert_eq!(plot.lines().count(), runlog.lines().count()); // header + same rows

    // Plot rows copy the best-complexity strings verbatim.
    for (log_line, plot_line) in runlog.lines().skip(1).zip(plot.lines().skip(1)) {
        let log_fields: Vec<&str> = log_line.split(',').collect();
        let plot_fields: Vec<&str> = plot_line.split(',').collect();
        assert_eq!(plot_fields[0], "2-3-1");
        assert_eq!(plot_fields[1], "1");
        assert_eq!(plot_fields[2], log_fields[0]);
        assert_eq!(plot_fields[3], log_fields[1]);
    }

    // The summary maximum agrees with the run directory read back.
    let rescored = rescore_champion(&out.join("2-3-1/rep1"), spec.window_shapes).unwrap();
    assert_eq!(row.max_complexity.unwrap(), rescored);

    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn merged_sweep_plot_rows_sum_per_run_rows() {
    let out = temp_dir("sweep-merge");
    let mut spec = quick_spec(out.clone());
    spec.configs = vec!["2-2-1".parse().unwrap(), "2-3-1".parse().unwrap()];
    spec.repeats = 2;
    spec.stagnation_limit = 5;
    run_sweep(&spec).unwrap();

    let mut expected_rows = 0;
    for label in ["2-2-1", "2-3-1"] {
        for rep in 1..=2 {
            let runlog =
                std::fs::read_to_string(out.join(label).join(format!("rep{rep}/runlog.csv")))
                    .unwrap();
            expected_rows += runlog.lines().count() - 1;
        }
    }
    let plot = std::fs::read_to_string(out.join("plotdata.csv")).unwrap();
    assert_eq!(plot.lines().count() - 1, expected_rows);
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn sweep_outputs_are_byte_identical_across_executions() {
    let out_a = temp_dir("sweep-ident-a");
    let out_b = temp_dir("sweep-ident-b");
    for out in [&out_a, &out_b] {
        let mut spec = quick_spec(out.clone());
        spec.configs = vec!["2-2-1".parse().unwrap(), "2-3-1".parse().unwrap()];
        spec.repeats = 2;
        spec.stagnation_limit = 5;
        spec.workers = 2; // scheduling must not affect any byte
        run_sweep(&spec).unwrap();
    }
    for name in ["summary.csv", "plotdata.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across executions");
    }
    for label in ["2-2-1", "2-3-1"] {
        for rep in 1..=2 {
            for name in ["runlog.csv", "champion.pbm", "manifest.txt"] {
                let rel = format!("{label}/rep{rep}/{name}");
                let a = std::fs::read(out_a.join(&rel)).unwrap();
                let b = std::fs::read(out_b.join(&rel)).unwrap();
                assert_eq!(a, b, "{rel} differs across executions");
            }
        }
    }
    std::fs::remove_dir_all(&out_a).unwrap();
    std::fs::remove_dir_all(&out_b).unwrap();
}

#[test]
fn sweep_records_failed_rows_and_continues() {
    // A 2x2 image space holds only 16 distinct images: seeding a
    // 30-member population is infeasible and every run errors, but the
    // sweep still completes and writes its summary.
    let out = temp_dir("sweep-fail");
    let mut spec = quick_spec(out.clone());
    spec.configs = vec!["2-2-1".parse().unwrap(), "2-3-1".parse().unwrap()];
    spec.height = 2;
    spec.width = 2;
    spec.capacity = 30;
    let table = run_sweep(&spec).unwrap();
    assert_eq!(table.rows.len(), 2);
    for row in &table.rows {
        assert!(row.error.is_some());
        assert!(row.max_complexity.is_none());
        assert_eq!(row.repeat_complexities, vec![None]);
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().nth(1).unwrap().contains("NA"));
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn emit_plot_data_skips_missing_runlogs() {
    let out = temp_dir("plot-missing");
    std::fs::create_dir_all(&out).unwrap();
    let sources = vec![PlotSource {
        label: "2-4-1".into(),
        repeat: 1,
        dir: out.join("nonexistent"),
    }];
    let csv = emit_plot_data(&sources).unwrap();
    assert_eq!(csv.lines().count(), 1); // header only
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn cli_run_and_plotdata_end_to_end() {
    let out = temp_dir("cli");
    let args = |text: &str| -> Vec<String> { text.split_whitespace().map(String::from).collect() };
    let cmd = cli::parse_args(&args(&format!(
        "run --net 2-3-1 --dims 7x7 --pop 5 --seed 51 --out {}",
        out.display()
    )))
    .unwrap();
    // Tighten the stagnation limit through a config file to keep it quick.
    let conf_path = out.with_extension("conf");
    std::fs::write(&conf_path, "stagnation_limit = 10\n").unwrap();
    let cmd = match cmd {
        cli::Command::Run(flags) => {
            let file = cli::SpecOverrides::parse_config_file(
                &std::fs::read_to_string(&conf_path).unwrap(),
            )
            .unwrap();
            cli::Command::Run(flags.merged_over(file))
        }
        other => other,
    };
    cli::execute(cmd).unwrap();
    assert!(out.join("runlog.csv").exists());
    assert!(out.join("champion.pbm").exists());

    let merged = out.with_extension("csv");
    let cmd = cli::parse_args(&args(&format!(
        "plotdata --out {} {}",
        merged.display(),
        out.display()
    )))
    .unwrap();
    cli::execute(cmd).unwrap();
    let plot = std::fs::read_to_string(&merged).unwrap();
    assert!(plot.starts_with("configuration,repeat,generation,best_complexity"));
    assert!(plot.lines().count() > 1);
    let first = plot.lines().nth(1).unwrap();
    assert!(first.starts_with("2-3-1,1,0,"));

    std::fs::remove_dir_all(&out).unwrap();
    std::fs::remove_file(&conf_path).unwrap();
    std::fs::remove_file(&merged).unwrap();
}

#[test]
fn champion_pbm_is_well_formed() {
    let dir = temp_dir("pbm");
    run_single(&quick_config(61), &dir, 1).unwrap();
    let img = BinaryImage::read_pbm_file(&dir.join("champion.pbm")).unwrap();
    assert_eq!((img.height(), img.width()), (7, 7));
    std::fs::remove_dir_all(&dir).unwrap();
}
