//! File-to-file commands: each reads its inputs from disk, runs one stage
//! and writes its outputs with the config fingerprint in a header line.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use super::config::{ExperimentConfig, SweepPoint};
use super::experiment::{
    association_histogram, build_policies, coverage_probability, generate_dataset, model_points, sweep, train_model,
    CoverageResult, ModelSet, Stream, SweepAxis,
};
use super::output::{sweep_svg, write_histogram_csv, write_metrics_csv, write_results_csv};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::neuralnet::{accuracy, load_model, save_model, Trained};
use crate::policies::{AssociationPolicy, PolicyKind};
use crate::Mlp;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    Dataset::read_csv(BufReader::new(File::open(path)?))
}

pub fn generate_cmd(cfg: &ExperimentConfig, point: &SweepPoint, stream: Stream, n: usize, out: &Path) -> Result<Dataset> {
    let ds = generate_dataset(cfg, point, stream, n)?;
    ds.write_csv(create(out)?)?;
    Ok(ds)
}

/// Trains on `data`, writes the model and (optionally) per-epoch metrics.
/// With `test`, the held-out accuracy is returned and noted in the metrics
/// header.
pub fn train_cmd(
    cfg: &ExperimentConfig,
    data: &Path,
    test: Option<&Path>,
    model_out: &Path,
    metrics_out: Option<&Path>,
) -> Result<(Trained<f64>, Option<f64>)> {
    let ds = read_dataset(data)?;
    let trained = train_model(cfg, &ds)?;
    let test_acc = match test {
        Some(p) => {
            let t = read_dataset(p)?;
            Some(accuracy(&trained.model, &t.inputs(), &t.labels())?)
        }
        None => None,
    };
    if let Some(dir) = model_out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    save_model(&trained.model, model_out)?;
    if let Some(m) = metrics_out {
        let extra = test_acc.map(|a| format!("test_accuracy={a}")).unwrap_or_default();
        write_metrics_csv(create(m)?, cfg, &extra, &trained.metrics)?;
    }
    Ok((trained, test_acc))
}

fn load_optional(kinds: &[PolicyKind], model: Option<&Path>) -> Result<Option<Mlp>> {
    match model {
        Some(p) if kinds.contains(&PolicyKind::Neural) => Ok(Some(load_model(p)?)),
        _ => Ok(None),
    }
}

/// Coverage of `kinds` at one point.
pub fn evaluate_cmd(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    kinds: &[PolicyKind],
    model: Option<&Path>,
    out: &Path,
) -> Result<Vec<CoverageResult>> {
    let model = load_optional(kinds, model)?;
    let policies = build_policies(cfg, kinds, model.as_ref(), point)?;
    let results = coverage_probability(cfg, point, &policies)?;
    let extra = format!(
        "uav_height_m={} bs_density_per_km2={} beamwidth_deg={}",
        point.uav_height_m, point.bs_density_per_km2, point.beamwidth_deg
    );
    write_results_csv(create(out)?, cfg, &extra, &results)?;
    Ok(results)
}

pub fn sweep_cmd(
    cfg: &ExperimentConfig,
    axis: SweepAxis,
    kinds: &[PolicyKind],
    models_dir: Option<&Path>,
    out: &Path,
    svg: Option<&Path>,
) -> Result<Vec<CoverageResult>> {
    let models = match models_dir {
        Some(dir) if kinds.contains(&PolicyKind::Neural) => {
            let points: Vec<SweepPoint> = axis.points(cfg).into_iter().map(|(_, p)| p).collect();
            ModelSet::load_dir(dir, &points)?
        }
        _ => ModelSet::new(),
    };
    let results = sweep(cfg, axis, kinds, &models)?;
    write_results_csv(create(out)?, cfg, &format!("axis={axis}"), &results)?;
    if let Some(p) = svg {
        std::fs::write(p, sweep_svg(axis, &results))?;
    }
    Ok(results)
}

/// Per-model summary returned by [`train_models_cmd`].
#[derive(Debug, Clone)]
pub struct TrainedPoint {
    pub point: SweepPoint,
    pub test_accuracy: f64,
    pub final_validation_accuracy: f64,
}

/// Generates train/test data and fits one model for every distinct
/// (density, beamwidth) pair on `axes`, writing them into `dir`.
pub fn train_models_cmd(cfg: &ExperimentConfig, axes: &[SweepAxis], dir: &Path) -> Result<Vec<TrainedPoint>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for point in model_points(cfg, axes) {
        let train = generate_dataset(cfg, &point, Stream::Train, cfg.dataset.train_samples)?;
        let test = generate_dataset(cfg, &point, Stream::Test, cfg.dataset.test_samples)?;
        let trained = train_model(cfg, &train)?;
        let test_accuracy = if test.samples.is_empty() {
            f64::NAN
        } else {
            accuracy(&trained.model, &test.inputs(), &test.labels())?
        };
        save_model(&trained.model, ModelSet::path_in(dir, &point))?;
        let stem = ModelSet::file_name(&point).replace(".json", "_metrics.csv");
        write_metrics_csv(create(&dir.join(stem))?, cfg, &format!("test_accuracy={test_accuracy} {point}"), &trained.metrics)?;
        out.push(TrainedPoint {
            point,
            test_accuracy,
            final_validation_accuracy: trained.metrics.last().map_or(f64::NAN, |m| m.validation_accuracy),
        });
    }
    Ok(out)
}

/// Rank distribution of `kind` at each configured histogram height.
pub fn histogram_cmd(
    cfg: &ExperimentConfig,
    kind: PolicyKind,
    model: Option<&Path>,
    out: &Path,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let loaded = load_optional(&[kind], model)?;
    let base = cfg.default_point();
    let policy: AssociationPolicy<'_> = build_policies(cfg, &[kind], loaded.as_ref(), &base)?[0];
    let mut rows = Vec::new();
    for &h in &cfg.histogram_heights_m {
        let point = SweepPoint { uav_height_m: h, ..base };
        rows.push((h, association_histogram(cfg, &point, &policy)?));
    }
    write_histogram_csv(create(out)?, cfg, &format!("policy={kind}"), &rows)?;
    Ok(rows)
}
