use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepPoint};
use crate::dataset::{label_and_extract, Dataset, LabeledSample};
use crate::environment::Scenario;
use crate::error::{Error, Result};
use crate::neuralnet::{load_model, save_model, train, Trained};
use crate::policies::{distance_rank, AssociationPolicy, PolicyKind};
use crate::radio::{directional_sinr, Fading, LinkSet};
use crate::seed::{derive_rng, hash_words, Purpose};
use crate::Mlp;

/// Scenario draws that are rejected (too few BSs) are redrawn this many
/// times before the trial fails.
pub const MAX_RETRIES: u32 = 16;

/// z such that a standard normal puts 95% of its mass in `[-z, z]`.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Independent seed families so coverage trials never reuse training worlds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Coverage,
    Train,
    Test,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Coverage => 0x434F_5645,
            Stream::Train => 0x5452_4149,
            Stream::Test => 0x5445_5354,
        }
    }
}

pub fn trial_seed(master: u64, stream: Stream, trial_index: u64, attempt: u32) -> u64 {
    hash_words(&[master, stream.tag(), trial_index, attempt as u64])
}

/// Draws the world for a trial, redrawing with a fresh sub-seed while fewer
/// than `zeta` BSs fall inside the window.
pub fn trial_scenario(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    uav_height_m: f64,
    stream: Stream,
    trial_index: u64,
) -> Result<(Scenario, LinkSet<f64>)> {
    let scfg = cfg.scenario_config(point, uav_height_m);
    let needed = cfg.zeta.max(1);
    for attempt in 0..=MAX_RETRIES {
        let scenario = Scenario::generate(&scfg, trial_seed(cfg.master_seed, stream, trial_index, attempt))?;
        if scenario.bss.len() >= needed {
            let set = scenario.link_set();
            return Ok((scenario, set));
        }
    }
    Err(Error::RetriesExhausted { trial: trial_index, retries: MAX_RETRIES })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub covered: bool,
    pub chosen_rank: usize,
    pub sinr: f64,
}

fn evaluate_choice(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    scenario: &Scenario,
    set: &LinkSet<f64>,
    policy: &AssociationPolicy<'_>,
) -> Result<TrialOutcome> {
    let antenna = cfg.antenna(point)?;
    let params = cfg.channel();
    let chosen = policy.choose(set, &antenna, &params)?;
    let mut rng = derive_rng(scenario.seed, 0, Purpose::Fading);
    let sinr = directional_sinr(set, chosen, &antenna, &params, &mut Fading::Sampled(&mut rng))?;
    Ok(TrialOutcome { covered: sinr > params.threshold, chosen_rank: distance_rank(set, chosen), sinr })
}

/// One Monte Carlo trial at `point`: draw the world, associate, then test
/// the sampled-fading directional SINR against the threshold.
pub fn run_trial(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    trial_index: u64,
    policy: &AssociationPolicy<'_>,
) -> Result<TrialOutcome> {
    let (scenario, set) = trial_scenario(cfg, point, point.uav_height_m, Stream::Coverage, trial_index)?;
    evaluate_choice(cfg, point, &scenario, &set, policy)
}

/// Every policy on the same world. Each one restarts the fading stream, so
/// policies that pick the same BS see the same channel.
pub fn run_trial_all(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    trial_index: u64,
    policies: &[AssociationPolicy<'_>],
) -> Result<Vec<TrialOutcome>> {
    let (scenario, set) = trial_scenario(cfg, point, point.uav_height_m, Stream::Coverage, trial_index)?;
    policies.iter().map(|p| evaluate_choice(cfg, point, &scenario, &set, p)).collect()
}

/// Wilson score interval, clipped to `[0, 1]`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub axis_value: f64,
    pub policy: PolicyKind,
    pub coverage: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_trials: usize,
}

impl CoverageResult {
    pub fn from_counts(axis_value: f64, policy: PolicyKind, covered: usize, n_trials: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(covered, n_trials, Z95);
        let coverage = if n_trials == 0 { 0.0 } else { covered as f64 / n_trials as f64 };
        Self { axis_value, policy, coverage, ci_low, ci_high, n_trials }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn overlaps(&self, other: &CoverageResult) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Runs trials `first .. first + n` (in parallel) and tallies each policy.
pub fn coverage_over(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    policies: &[AssociationPolicy<'_>],
    first: u64,
    n: usize,
    axis_value: f64,
) -> Result<Vec<CoverageResult>> {
    let outcomes: Vec<Vec<TrialOutcome>> = (first..first + n as u64)
        .into_par_iter()
        .map(|t| run_trial_all(cfg, point, t, policies))
        .collect::<Result<_>>()?;
    Ok(policies
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let covered = outcomes.iter().filter(|o| o[k].covered).count();
            CoverageResult::from_counts(axis_value, p.kind(), covered, n)
        })
        .collect())
}

/// Coverage of each policy over `cfg.n_trials` trials at `point`.
pub fn coverage_probability(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    policies: &[AssociationPolicy<'_>],
) -> Result<Vec<CoverageResult>> {
    coverage_over(cfg, point, policies, 0, cfg.n_trials, point.uav_height_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Height,
    Density,
    Beamwidth,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Height => "height",
            SweepAxis::Density => "density",
            SweepAxis::Beamwidth => "beamwidth",
        }
    }

    /// Axis label with unit, as used in plots.
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Height => "UAV height (m)",
            SweepAxis::Density => "BS density (per km^2)",
            SweepAxis::Beamwidth => "beamwidth (deg)",
        }
    }

    /// The grid along this axis, every other coordinate at its default.
    pub fn points(self, cfg: &ExperimentConfig) -> Vec<(f64, SweepPoint)> {
        let base = cfg.default_point();
        let grid = match self {
            SweepAxis::Height => &cfg.sweep.heights_m,
            SweepAxis::Density => &cfg.sweep.densities_per_km2,
            SweepAxis::Beamwidth => &cfg.sweep.beamwidths_deg,
        };
        grid.iter()
            .map(|&v| {
                let mut p = base;
                match self {
                    SweepAxis::Height => p.uav_height_m = v,
                    SweepAxis::Density => p.bs_density_per_km2 = v,
                    SweepAxis::Beamwidth => p.beamwidth_deg = v,
                }
                (v, p)
            })
            .collect()
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "height" => Ok(SweepAxis::Height),
            "density" => Ok(SweepAxis::Density),
            "beamwidth" => Ok(SweepAxis::Beamwidth),
            other => Err(Error::InvalidConfig(format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// Classifiers keyed by the (density, beamwidth) pair they were trained for.
#[derive(Debug, Clone, Default)]
pub struct ModelSet {
    models: BTreeMap<(u64, u64), Mlp>,
}

fn model_key(point: &SweepPoint) -> (u64, u64) {
    (point.bs_density_per_km2.to_bits(), point.beamwidth_deg.to_bits())
}

impl ModelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, point: &SweepPoint, model: Mlp) {
        self.models.insert(model_key(point), model);
    }

    pub fn get(&self, point: &SweepPoint) -> Option<&Mlp> {
        self.models.get(&model_key(point))
    }

    pub fn require(&self, point: &SweepPoint) -> Result<&Mlp> {
        self.get(point).ok_or_else(|| Error::MissingModel { point: point.to_string() })
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// File a model for `point` is stored under inside a models directory.
    pub fn file_name(point: &SweepPoint) -> String {
        format!("model_lambda{}_omega{}deg.json", point.bs_density_per_km2, point.beamwidth_deg)
    }

    pub fn path_in(dir: &Path, point: &SweepPoint) -> PathBuf {
        dir.join(Self::file_name(point))
    }

    /// Loads whichever models for `points` exist in `dir`.
    pub fn load_dir(dir: &Path, points: &[SweepPoint]) -> Result<Self> {
        let mut set = Self::new();
        for p in points {
            if set.get(p).is_some() {
                continue;
            }
            let path = Self::path_in(dir, p);
            if path.exists() {
                set.insert(p, load_model(&path)?);
            }
        }
        Ok(set)
    }

    pub fn save_dir(&self, dir: &Path, points: &[SweepPoint]) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for p in points {
            save_model(self.require(p)?, Self::path_in(dir, p))?;
        }
        Ok(())
    }
}

fn policies_for<'a>(kinds: &[PolicyKind], model: Option<&'a Mlp>, point: &SweepPoint) -> Result<Vec<AssociationPolicy<'a>>> {
    kinds
        .iter()
        .map(|k| match k {
            PolicyKind::Closest => Ok(AssociationPolicy::Closest),
            PolicyKind::Strongest => Ok(AssociationPolicy::Strongest),
            PolicyKind::Neural => model
                .map(AssociationPolicy::Neural)
                .ok_or_else(|| Error::MissingModel { point: point.to_string() }),
        })
        .collect()
}

/// Ready-to-run policies for `kinds`; the neural one needs the model for
/// `point`.
pub fn build_policies<'a>(
    cfg: &ExperimentConfig,
    kinds: &[PolicyKind],
    model: Option<&'a Mlp>,
    point: &SweepPoint,
) -> Result<Vec<AssociationPolicy<'a>>> {
    if let Some(m) = model {
        if (m.zeta, m.xi) != (cfg.zeta, cfg.xi) {
            return Err(Error::InvalidConfig(format!(
                "model was trained for zeta={} xi={}, config has zeta={} xi={}",
                m.zeta, m.xi, cfg.zeta, cfg.xi
            )));
        }
    }
    policies_for(kinds, model, point)
}

/// One coverage result per (axis value, policy), in grid then policy order.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, kinds: &[PolicyKind], models: &ModelSet) -> Result<Vec<CoverageResult>> {
    let points = axis.points(cfg);
    let mut policies_per_point = Vec::with_capacity(points.len());
    for (_, p) in &points {
        let model = if kinds.contains(&PolicyKind::Neural) { Some(models.require(p)?) } else { None };
        policies_per_point.push(build_policies(cfg, kinds, model, p)?);
    }
    let mut out = Vec::new();
    for ((v, p), policies) in points.iter().zip(&policies_per_point) {
        out.extend(coverage_over(cfg, p, policies, 0, cfg.n_trials, *v)?);
    }
    Ok(out)
}

/// Labelled samples for `point`; the UAV height of each world is uniform
/// over the configured dataset range.
pub fn generate_dataset(cfg: &ExperimentConfig, point: &SweepPoint, stream: Stream, n: usize) -> Result<Dataset> {
    let antenna = cfg.antenna(point)?;
    let params = cfg.channel();
    let (lo, hi) = (cfg.dataset.height_min_m, cfg.dataset.height_max_m);
    let samples: Vec<LabeledSample> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut h_rng = derive_rng(trial_seed(cfg.master_seed, stream, i, 0), 0, Purpose::UavHeight);
            let h = if hi > lo { h_rng.gen_range(lo..=hi) } else { lo };
            let (scenario, set) = trial_scenario(cfg, point, h, stream, i)?;
            let (features, label) = label_and_extract(&set, &antenna, &params, cfg.zeta, cfg.xi)?;
            Ok(LabeledSample { scenario_seed: scenario.seed, features, label })
        })
        .collect::<Result<_>>()?;
    let mut ds = Dataset::new(cfg.zeta, cfg.xi, cfg.fingerprint(), cfg.master_seed);
    ds.samples = samples;
    Ok(ds)
}

pub fn train_model(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<Trained<f64>> {
    if (dataset.zeta, dataset.xi) != (cfg.zeta, cfg.xi) {
        return Err(Error::InvalidConfig(format!(
            "dataset has zeta={} xi={}, config has zeta={} xi={}",
            dataset.zeta, dataset.xi, cfg.zeta, cfg.xi
        )));
    }
    train(dataset, &cfg.training)
}

/// Distinct (density, beamwidth) pairs met along the given axes.
pub fn model_points(cfg: &ExperimentConfig, axes: &[SweepAxis]) -> Vec<SweepPoint> {
    let mut out: Vec<SweepPoint> = Vec::new();
    for axis in axes {
        for (_, mut p) in axis.points(cfg) {
            p.uav_height_m = cfg.uav_height_m;
            if !out.iter().any(|q| model_key(q) == model_key(&p)) {
                out.push(p);
            }
        }
    }
    out
}

/// Share of trials in which the policy picks the n-th closest BS, for
/// n = 0 .. max(zeta, highest rank seen + 1).
pub fn association_histogram(cfg: &ExperimentConfig, point: &SweepPoint, policy: &AssociationPolicy<'_>) -> Result<Vec<f64>> {
    let ranks: Vec<usize> = (0..cfg.n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let (_, set) = trial_scenario(cfg, point, point.uav_height_m, Stream::Coverage, t)?;
            let chosen = policy.choose(&set, &cfg.antenna(point)?, &cfg.channel())?;
            Ok(distance_rank(&set, chosen))
        })
        .collect::<Result<_>>()?;
    let len = ranks.iter().map(|r| r + 1).max().unwrap_or(0).max(cfg.zeta);
    let mut counts = vec![0usize; len];
    for r in ranks {
        counts[r] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / cfg.n_trials as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{label_sample, FeatureVector};
    use crate::neuralnet::{Activation, MlpModel};
    use proptest::prelude::*;

    fn small_cfg(n_trials: usize) -> ExperimentConfig {
        ExperimentConfig { n_trials, ..ExperimentConfig::default() }
    }

    #[test]
    fn threshold_extremes() {
        let mut cfg = small_cfg(200);
        let p = cfg.default_point();
        let pols = [AssociationPolicy::Closest, AssociationPolicy::Strongest];
        cfg.channel.sinr_threshold_db = -300.0;
        for r in coverage_probability(&cfg, &p, &pols).unwrap() {
            assert_eq!(r.coverage, 1.0);
            assert_eq!(r.ci_high, 1.0);
        }
        cfg.channel.sinr_threshold_db = 300.0;
        for r in coverage_probability(&cfg, &p, &pols).unwrap() {
            assert_eq!(r.coverage, 0.0);
            assert_eq!(r.ci_low, 0.0);
        }
    }

    #[test]
    fn trials_are_pure_functions_of_seed_and_index() {
        let cfg = small_cfg(10);
        let p = cfg.default_point();
        for t in [0, 7, 123_456] {
            let a = run_trial(&cfg, &p, t, &AssociationPolicy::Strongest).unwrap();
            let b = run_trial(&cfg, &p, t, &AssociationPolicy::Strongest).unwrap();
            assert_eq!(a.sinr.to_bits(), b.sinr.to_bits());
            assert_eq!(a, b);
            let all = run_trial_all(&cfg, &p, t, &[AssociationPolicy::Closest, AssociationPolicy::Strongest]).unwrap();
            assert_eq!(all[1], a);
            assert_eq!(all[0].chosen_rank, 0);
        }
        let other = ExperimentConfig { master_seed: 1, ..cfg.clone() };
        assert_ne!(
            run_trial(&cfg, &p, 0, &AssociationPolicy::Closest).unwrap().sinr,
            run_trial(&other, &p, 0, &AssociationPolicy::Closest).unwrap().sinr
        );
    }

    #[test]
    fn wilson_half_width_at_ten_thousand_fair_coins() {
        let (lo, hi) = wilson_interval(5000, 10_000, Z95);
        // Wald half-width at p = 0.5, which Wilson matches to O(1/n).
        let wald = Z95 * (0.25f64 / 10_000.0).sqrt();
        assert!((0.5 * (hi - lo) - wald).abs() < 1e-5);
        assert!((0.5 * (hi - lo) - 0.0098).abs() < 1e-4);
        assert!((0.5 * (lo + hi) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wilson_matches_quadratic_root_oracle() {
        // Bounds are the roots of (p - q)^2 = z^2 q (1 - q) / n in q.
        for &(k, n) in &[(0usize, 10usize), (3, 10), (10, 10), (17, 400), (9_990, 10_000)] {
            let (lo, hi) = wilson_interval(k, n, Z95);
            let p = k as f64 / n as f64;
            let a = 1.0 + Z95 * Z95 / n as f64;
            let b = -(2.0 * p + Z95 * Z95 / n as f64);
            let c = p * p;
            let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
            assert!((lo - ((-b - disc) / (2.0 * a)).max(0.0)).abs() < 1e-12, "k={k} n={n}");
            assert!((hi - ((-b + disc) / (2.0 * a)).min(1.0)).abs() < 1e-12, "k={k} n={n}");
        }
    }

    proptest! {
        #[test]
        fn wilson_contains_estimate(n in 1usize..100_000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).floor() as usize;
            let r = CoverageResult::from_counts(0.0, PolicyKind::Closest, k.min(n), n);
            prop_assert!(0.0 <= r.ci_low && r.ci_low <= r.coverage + 1e-15);
            prop_assert!(r.coverage <= r.ci_high + 1e-15 && r.ci_high <= 1.0);
        }
    }

    #[test]
    fn disjoint_trial_ranges_agree() {
        let cfg = small_cfg(1);
        let p = cfg.default_point();
        let a = coverage_over(&cfg, &p, &[AssociationPolicy::Closest], 0, 1500, 0.0).unwrap();
        let b = coverage_over(&cfg, &p, &[AssociationPolicy::Closest], 1_000_000, 1500, 0.0).unwrap();
        assert!(a[0].overlaps(&b[0]), "{:?} vs {:?}", a[0], b[0]);
        assert_ne!(a, b);
    }

    #[test]
    fn single_point_sweep_is_coverage_probability() {
        let mut cfg = small_cfg(150);
        cfg.sweep.heights_m = vec![cfg.uav_height_m];
        let kinds = [PolicyKind::Closest, PolicyKind::Strongest];
        let s = sweep(&cfg, SweepAxis::Height, &kinds, &ModelSet::new()).unwrap();
        let p = cfg.default_point();
        let c = coverage_probability(&cfg, &p, &[AssociationPolicy::Closest, AssociationPolicy::Strongest]).unwrap();
        assert_eq!(s, c);
    }

    #[test]
    fn sweep_without_model_names_the_point() {
        let mut cfg = small_cfg(5);
        cfg.sweep.densities_per_km2 = vec![2.0];
        let err = sweep(&cfg, SweepAxis::Density, &[PolicyKind::Neural], &ModelSet::new()).unwrap_err();
        match err {
            Error::MissingModel { point } => assert!(point.contains("lambda=2"), "{point}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn model_rejected_for_other_candidate_count() {
        let cfg = small_cfg(5);
        let model = MlpModel::<f64>::new(&[FeatureVector::width(4, 2), 3, 4], Activation::Relu, 2, 0).unwrap();
        let p = cfg.default_point();
        assert!(matches!(build_policies(&cfg, &[PolicyKind::Neural], Some(&model), &p), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn closest_histogram_is_point_mass() {
        let cfg = small_cfg(300);
        let h = association_histogram(&cfg, &cfg.default_point(), &AssociationPolicy::Closest).unwrap();
        assert_eq!(h.len(), cfg.zeta);
        assert_eq!(h[0], 1.0);
        assert!(h[1..].iter().all(|&p| p == 0.0));
        let s = association_histogram(&cfg, &cfg.default_point(), &AssociationPolicy::Strongest).unwrap();
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_networks_exhaust_retries() {
        let mut cfg = small_cfg(1);
        cfg.zeta = 10_000;
        let p = cfg.default_point();
        assert!(matches!(
            run_trial(&cfg, &p, 0, &AssociationPolicy::Closest),
            Err(Error::RetriesExhausted { trial: 0, retries: MAX_RETRIES })
        ));
    }

    #[test]
    fn retried_draws_still_reach_the_candidate_count() {
        // About 39 BSs expected; a third of the draws fall short of 40.
        let mut cfg = small_cfg(1);
        cfg.zeta = 40;
        cfg.window = super::super::config::WindowRule { min_radius_m: 0.0, min_expected_bs: 39.0 };
        let p = cfg.default_point();
        let mut retried = 0;
        for t in 0..60 {
            let (s, set) = trial_scenario(&cfg, &p, 100.0, Stream::Coverage, t).unwrap();
            assert!(set.links.len() >= 40);
            retried += (s.seed != trial_seed(cfg.master_seed, Stream::Coverage, t, 0)) as usize;
        }
        assert!(retried > 0);
    }

    #[test]
    fn outcomes_do_not_depend_on_thread_count() {
        let cfg = small_cfg(64);
        let p = cfg.default_point();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let outs: Vec<TrialOutcome> = (0..64u64)
                    .into_par_iter()
                    .map(|t| run_trial(&cfg, &p, t, &AssociationPolicy::Closest).unwrap())
                    .collect();
                (outs, coverage_probability(&cfg, &p, &[AssociationPolicy::Closest]).unwrap())
            })
        };
        let (a, ra) = run(1);
        let (b, rb) = run(3);
        assert_eq!(ra, rb);
        assert!(a.iter().zip(&b).all(|(x, y)| x.sinr.to_bits() == y.sinr.to_bits()));
    }

    #[test]
    fn dataset_rows_match_their_scenarios() {
        let cfg = small_cfg(1);
        let p = cfg.default_point();
        let ds = generate_dataset(&cfg, &p, Stream::Train, 40).unwrap();
        assert_eq!(ds, generate_dataset(&cfg, &p, Stream::Train, 40).unwrap());
        assert_ne!(ds.samples[0], generate_dataset(&cfg, &p, Stream::Test, 1).unwrap().samples[0]);
        let antenna = cfg.antenna(&p).unwrap();
        for (i, s) in ds.samples.iter().enumerate() {
            let h = s.features.uav_height;
            assert!((cfg.dataset.height_min_m..=cfg.dataset.height_max_m).contains(&h));
            let (scenario, set) = trial_scenario(&cfg, &p, h, Stream::Train, i as u64).unwrap();
            assert_eq!(scenario.seed, s.scenario_seed);
            assert_eq!(label_sample(&set, &antenna, &cfg.channel(), cfg.zeta).unwrap(), s.label);
        }
    }

    #[test]
    fn default_axes_need_eight_models() {
        let cfg = ExperimentConfig::default();
        let pts = model_points(&cfg, &[SweepAxis::Height, SweepAxis::Beamwidth, SweepAxis::Density]);
        assert_eq!(pts.len(), 8);
        assert_eq!(model_points(&cfg, &[SweepAxis::Height]).len(), 1);
        assert!("sideways".parse::<SweepAxis>().is_err());
        assert_eq!("density".parse::<SweepAxis>().unwrap(), SweepAxis::Density);
    }
}
