use std::fs;
use std::path::Path;

use log::info;
use matrixgt::annotator::{annotate_frame, RefinementParams};
use matrixgt::dataset::{
    frame_stem, oracle_annotations, read_engine_frame, read_instance, read_manifest, simulate_frame, write_frame,
    write_manifest,
};
use matrixgt::evaluator::{evaluate, EvalOptions};
use matrixgt::kitti::{from_annotation, read_label_dir, write_label_file, DifficultyThresholds};
use matrixgt::scene_sim::ScenarioConfig;
use matrixgt::stats::{centroid_heatmap, dataset_summary, detections_histogram, histogram_csv};

use crate::pool::for_each_frame;
use crate::{CliError, Cli, Command, Dims};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { scenario, out, workers } => generate(&scenario, &out, workers.count),
        Command::Annotate {
            input,
            out,
            rho,
            workers,
        } => annotate(&input, &out, rho, workers.count),
        Command::OracleLabels { input, out, workers } => oracle_labels(&input, &out, workers.count),
        Command::Evaluate {
            det,
            gt,
            iou,
            ap,
            out,
        } => {
            let opts = EvalOptions {
                iou_threshold: iou,
                method: ap,
                thresholds: DifficultyThresholds::default(),
            };
            if !(iou > 0.0 && iou <= 1.0) {
                return Err(CliError::Config(format!("--iou must lie in (0, 1], got {iou}")));
            }
            let report = evaluate(&det, &gt, &opts)?;
            print!("{}", report.to_text());
            create_dir(&out)?;
            write(&out.join("report.csv"), report.to_csv().as_bytes())
        }
        Command::Stats {
            labels,
            out,
            grid,
            image,
        } => stats(&labels, &out, grid, image),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::from(matrixgt::Error::io(dir, e)))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::from(matrixgt::Error::io(path, e)))
}

fn generate(scenario: &Path, out: &Path, workers: usize) -> Result<(), CliError> {
    let text = fs::read_to_string(scenario).map_err(|e| CliError::from(matrixgt::Error::io(scenario, e)))?;
    let cfg = ScenarioConfig::parse(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", scenario.display())))?;
    create_dir(out)?;
    write_manifest(out, &cfg)?;
    for_each_frame(workers, cfg.frames, |i| write_frame(out, &simulate_frame(&cfg, i)?))?;
    info!("wrote {} frames to {}", cfg.frames, out.display());
    Ok(())
}

fn annotate(input: &Path, out: &Path, rho: f64, workers: usize) -> Result<(), CliError> {
    let cfg = read_manifest(input)?;
    let params = RefinementParams {
        rho,
        ..RefinementParams::default()
    };
    params.validate()?;
    create_dir(out)?;
    for_each_frame(workers, cfg.frames, |i| {
        let frame = read_engine_frame(input, i)?;
        let labels: Vec<_> = annotate_frame(frame.view(), &cfg.camera.depth, &params)?
            .iter()
            .map(from_annotation)
            .collect();
        write_label_file(&out.join(format!("{}.txt", frame_stem(i))), &labels)
    })?;
    info!("annotated {} frames into {}", cfg.frames, out.display());
    Ok(())
}

fn oracle_labels(input: &Path, out: &Path, workers: usize) -> Result<(), CliError> {
    let cfg = read_manifest(input)?;
    create_dir(out)?;
    for_each_frame(workers, cfg.frames, |i| {
        let instance = read_instance(input, i)?;
        let frame = read_engine_frame(input, i)?;
        let labels: Vec<_> = oracle_annotations(&cfg.camera, &instance, &frame.stencil, &frame.records)?
            .iter()
            .map(from_annotation)
            .collect();
        write_label_file(&out.join(format!("{}.txt", frame_stem(i))), &labels)
    })?;
    info!("wrote oracle labels for {} frames into {}", cfg.frames, out.display());
    Ok(())
}

fn stats(labels: &Path, out: &Path, grid: Dims, image: Dims) -> Result<(), CliError> {
    let set = read_label_dir(labels)?;
    let heat = centroid_heatmap(&set, (image.0, image.1), (grid.0, grid.1))?;
    if heat.clamped > 0 {
        info!("{} centroids fell outside the {}x{} image", heat.clamped, image.0, image.1);
    }
    let summary = dataset_summary(&set, &DifficultyThresholds::default())?;
    create_dir(out)?;
    write(&out.join("heatmap.pgm"), &heat.to_pgm().to_bytes())?;
    write(&out.join("heatmap.csv"), heat.to_csv().as_bytes())?;
    write(&out.join("detections_hist.csv"), histogram_csv(&detections_histogram(&set)).as_bytes())?;
    write(&out.join("summary.txt"), summary.to_text().as_bytes())
}
