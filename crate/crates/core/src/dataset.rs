//! Classifier features and labels, z-score normalization, and CSV storage.
//!
//! For the `zeta` closest BSs (the candidates) a sample records the omni
//! received power in dB, the horizontal distance, and for each candidate the
//! distances of the `xi` closest BSs that would interfere if the lobe were
//! steered at it. The label is the candidate with the highest fading-free
//! directional SINR.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radio::{directional_sinr, linear_to_db, mean_fading, mean_rx_power_omni, LinkSet};
use crate::scalar::Real;
use crate::{Antenna, Channel};

/// Classifier input for one UAV position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Omni received power per candidate, dB relative to 1 W.
    pub powers_db: Vec<f64>,
    /// Horizontal distance per candidate, ascending.
    pub distances: Vec<f64>,
    /// `zeta x xi` interferer distances, row-major, padded.
    pub interferer_distances: Vec<f64>,
    pub uav_height: f64,
}

impl FeatureVector {
    /// Input width `2*zeta + zeta*xi + 1`.
    pub fn width(zeta: usize, xi: usize) -> usize {
        2 * zeta + zeta * xi + 1
    }

    /// Flattened network input: height, powers, distances, interferer rows.
    pub fn to_input(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + self.powers_db.len() * 2 + self.interferer_distances.len());
        v.push(self.uav_height);
        v.extend_from_slice(&self.powers_db);
        v.extend_from_slice(&self.distances);
        v.extend_from_slice(&self.interferer_distances);
        v
    }

    pub fn from_input(input: &[f64], zeta: usize, xi: usize) -> Result<Self> {
        let want = Self::width(zeta, xi);
        if input.len() != want {
            return Err(Error::DimensionMismatch { context: "feature vector", expected: want, found: input.len() });
        }
        Ok(Self {
            uav_height: input[0],
            powers_db: input[1..1 + zeta].to_vec(),
            distances: input[1 + zeta..1 + 2 * zeta].to_vec(),
            interferer_distances: input[1 + 2 * zeta..].to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub scenario_seed: u64,
    pub features: FeatureVector,
    /// Index into the candidate list (0 = closest).
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub zeta: usize,
    pub xi: usize,
    /// Hash of the generating configuration.
    pub fingerprint: String,
    pub master_seed: u64,
    pub samples: Vec<LabeledSample>,
}

/// The `zeta` BSs closest to the UAV, ascending by horizontal distance with
/// `(x, y)` as tie-break.
pub fn candidate_set(set: &LinkSet<f64>, zeta: usize) -> Result<Vec<usize>> {
    if set.links.len() < zeta || zeta == 0 {
        return Err(Error::ScenarioRejected { needed: zeta.max(1), found: set.links.len() });
    }
    let mut order: Vec<usize> = (0..set.links.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (&set.links[a], &set.links[b]);
        la.geometry
            .r
            .total_cmp(&lb.geometry.r)
            .then(la.position.x.total_cmp(&lb.position.x))
            .then(la.position.y.total_cmp(&lb.position.y))
    });
    order.truncate(zeta);
    Ok(order)
}

/// Padding written for absent interferers: twice the window radius.
pub fn null_distance(set: &LinkSet<f64>) -> f64 {
    2.0 * set.window_radius
}

/// Distances of the `xi` closest BSs inside the footprint steered at
/// `candidate` (excluding it), ascending, padded with [`null_distance`].
pub fn interferer_row(set: &LinkSet<f64>, candidate: usize, omega: f64, xi: usize) -> Result<Vec<f64>> {
    let mut row: Vec<f64> = set.interferers(candidate, omega)?.into_iter().map(|i| set.links[i].geometry.r).collect();
    row.sort_by(f64::total_cmp);
    row.resize(xi, null_distance(set));
    Ok(row)
}

pub fn extract_features(
    set: &LinkSet<f64>,
    antenna: &Antenna,
    params: &Channel,
    zeta: usize,
    xi: usize,
) -> Result<FeatureVector> {
    let candidates = candidate_set(set, zeta)?;
    features_for(set, &candidates, antenna, params, xi)
}

pub(crate) fn features_for(
    set: &LinkSet<f64>,
    candidates: &[usize],
    antenna: &Antenna,
    params: &Channel,
    xi: usize,
) -> Result<FeatureVector> {
    let mut powers_db = Vec::with_capacity(candidates.len());
    let mut distances = Vec::with_capacity(candidates.len());
    let mut interferer_distances = Vec::with_capacity(candidates.len() * xi);
    for &c in candidates {
        let link = &set.links[c];
        powers_db.push(linear_to_db(mean_rx_power_omni(link, params, antenna.n_elements)));
        distances.push(link.geometry.r);
        interferer_distances.extend(interferer_row(set, c, antenna.omega, xi)?);
    }
    Ok(FeatureVector { powers_db, distances, interferer_distances, uav_height: set.uav_height })
}

/// Candidate index with the highest fading-free directional SINR; the first
/// one wins ties.
pub fn label_sample(set: &LinkSet<f64>, antenna: &Antenna, params: &Channel, zeta: usize) -> Result<usize> {
    let candidates = candidate_set(set, zeta)?;
    label_for(set, &candidates, antenna, params)
}

pub(crate) fn label_for(set: &LinkSet<f64>, candidates: &[usize], antenna: &Antenna, params: &Channel) -> Result<usize> {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, &c) in candidates.iter().enumerate() {
        let sinr = directional_sinr(set, c, antenna, params, &mut mean_fading())?;
        if sinr > best.1 {
            best = (k, sinr);
        }
    }
    Ok(best.0)
}

/// Labelled sample for one scenario.
pub fn label_and_extract(
    set: &LinkSet<f64>,
    antenna: &Antenna,
    params: &Channel,
    zeta: usize,
    xi: usize,
) -> Result<(FeatureVector, usize)> {
    let candidates = candidate_set(set, zeta)?;
    Ok((features_for(set, &candidates, antenna, params, xi)?, label_for(set, &candidates, antenna, params)?))
}

/// Per-feature z-score statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer<T> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
}

pub const STD_FLOOR: f64 = 1e-6;

impl<T: Real> Normalizer<T> {
    /// Column means and population standard deviations (floored at 1e-6).
    pub fn fit<'a, I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [T]>,
    {
        let rows: Vec<&[T]> = rows.into_iter().collect();
        let Some(first) = rows.first() else {
            return Err(Error::EmptyDataset);
        };
        let width = first.len();
        let n = T::from_usize(rows.len()).expect("row count");
        let mut means = vec![T::zero(); width];
        for row in &rows {
            if row.len() != width {
                return Err(Error::DimensionMismatch { context: "normalizer fit", expected: width, found: row.len() });
            }
            for (m, x) in means.iter_mut().zip(row.iter()) {
                *m = *m + *x;
            }
        }
        means.iter_mut().for_each(|m| *m = *m / n);
        let mut vars = vec![T::zero(); width];
        for row in &rows {
            for ((v, x), m) in vars.iter_mut().zip(row.iter()).zip(&means) {
                let d = *x - *m;
                *v = *v + d * d;
            }
        }
        let floor = T::lit(STD_FLOOR);
        let stds = vars.into_iter().map(|v| (v / n).sqrt().max(floor)).collect();
        Ok(Self { means, stds })
    }

    pub fn width(&self) -> usize {
        self.means.len()
    }

    pub fn normalize(&self, x: &[T]) -> Result<Vec<T>> {
        self.check(x)?;
        Ok(x.iter().zip(&self.means).zip(&self.stds).map(|((x, m), s)| (*x - *m) / *s).collect())
    }

    pub fn denormalize(&self, z: &[T]) -> Result<Vec<T>> {
        self.check(z)?;
        Ok(z.iter().zip(&self.means).zip(&self.stds).map(|((z, m), s)| *z * *s + *m).collect())
    }

    fn check(&self, x: &[T]) -> Result<()> {
        if x.len() != self.width() {
            return Err(Error::DimensionMismatch { context: "normalizer", expected: self.width(), found: x.len() });
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Normalizer<U> {
        Normalizer {
            means: self.means.iter().map(|v| U::lit(v.as_f64())).collect(),
            stds: self.stds.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

pub fn fit_normalizer(dataset: &Dataset) -> Result<Normalizer<f64>> {
    let inputs: Vec<Vec<f64>> = dataset.samples.iter().map(|s| s.features.to_input()).collect();
    Normalizer::fit(inputs.iter().map(Vec::as_slice))
}

pub fn csv_header(zeta: usize, xi: usize) -> Vec<String> {
    let mut h = vec!["scenario_seed".to_string(), "gamma_m".to_string()];
    h.extend((0..zeta).map(|k| format!("p_{k}")));
    h.extend((0..zeta).map(|k| format!("r_{k}")));
    for i in 0..zeta {
        h.extend((0..xi).map(|j| format!("f_{i}_{j}")));
    }
    h.push("label".to_string());
    h
}

impl Dataset {
    pub fn new(zeta: usize, xi: usize, fingerprint: String, master_seed: u64) -> Self {
        Self { zeta, xi, fingerprint, master_seed, samples: Vec::new() }
    }

    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.features.to_input()).collect()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Writes the comment line, the header row and one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# fingerprint={} master_seed={} zeta={} xi={} samples={}",
            self.fingerprint,
            self.master_seed,
            self.zeta,
            self.xi,
            self.samples.len()
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(csv_header(self.zeta, self.xi))?;
        for s in &self.samples {
            let mut rec = Vec::with_capacity(3 + Self::width_of(self.zeta, self.xi));
            rec.push(s.scenario_seed.to_string());
            rec.extend(s.features.to_input().iter().map(f64::to_string));
            rec.push(s.label.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn width_of(zeta: usize, xi: usize) -> usize {
        FeatureVector::width(zeta, xi)
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let meta = parse_comment(&first)?;
        let fingerprint = meta("fingerprint")?;
        let master_seed = meta("master_seed")?
            .parse()
            .map_err(|_| Error::DatasetParse("master_seed is not an integer".into()))?;
        let zeta: usize = meta("zeta")?.parse().map_err(|_| Error::DatasetParse("bad zeta".into()))?;
        let xi: usize = meta("xi")?.parse().map_err(|_| Error::DatasetParse("bad xi".into()))?;

        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != csv_header(zeta, xi) {
            return Err(Error::DatasetParse(format!("header does not match zeta={zeta} xi={xi}")));
        }
        let width = FeatureVector::width(zeta, xi);
        let mut samples = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| Error::DatasetParse(format!("row {}: bad {what}", line + 1));
            let scenario_seed = rec[0].parse().map_err(|_| bad("scenario_seed"))?;
            let input: Vec<f64> =
                rec.iter().skip(1).take(width).map(str::parse).collect::<Result<_, _>>().map_err(|_| bad("feature"))?;
            let label: usize = rec[width + 1].parse().map_err(|_| bad("label"))?;
            if label >= zeta {
                return Err(bad("label"));
            }
            samples.push(LabeledSample { scenario_seed, features: FeatureVector::from_input(&input, zeta, xi)?, label });
        }
        Ok(Self { zeta, xi, fingerprint, master_seed, samples })
    }
}

fn parse_comment(line: &str) -> Result<impl Fn(&str) -> Result<String> + '_> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::DatasetParse("missing metadata comment line".into()))?;
    Ok(move |key: &str| {
        body.split_whitespace()
            .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
            .map(str::to_string)
            .ok_or_else(|| Error::DatasetParse(format!("metadata key `{key}` missing")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GroundPoint, VerticalGeometry};
    use crate::radio::{db_to_linear, ChannelParams, LinkState};
    use crate::Point;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn link(x: f64, y: f64, h: f64, los: bool) -> LinkState<f64> {
        let p = Point::new(x, y);
        LinkState { position: p, geometry: VerticalGeometry::between(Point::origin(), h, p, 30.0), los }
    }

    fn set(links: Vec<LinkState<f64>>, h: f64, window: f64) -> LinkSet<f64> {
        LinkSet { uav_xy: GroundPoint::origin(), uav_height: h, window_radius: window, links }
    }

    fn params() -> Channel {
        ChannelParams {
            tx_power: 40.0,
            alpha_los: 2.1,
            alpha_nlos: 4.0,
            fading_m_los: 1.0,
            fading_m_nlos: 1.0,
            near_field: db_to_linear(-38.4),
            noise: 8e-13,
            threshold: 1.0,
        }
    }

    #[test]
    fn candidates_sorted_with_tie_break() {
        let s = set(vec![link(30.0, 0.0, 100.0, true), link(0.0, 10.0, 100.0, true), link(20.0, 0.0, 100.0, true)], 100.0, 3000.0);
        assert_eq!(candidate_set(&s, 2).unwrap(), vec![1, 2]);
        assert!(matches!(candidate_set(&s, 4), Err(Error::ScenarioRejected { needed: 4, found: 3 })));

        let tie = set(vec![link(0.0, 50.0, 100.0, true), link(-50.0, 0.0, 100.0, true), link(50.0, 0.0, 100.0, true)], 100.0, 3000.0);
        assert_eq!(candidate_set(&tie, 3).unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn interferer_row_padding() {
        let lone = set(vec![link(100.0, 0.0, 100.0, true)], 100.0, 3000.0);
        assert_eq!(interferer_row(&lone, 0, FRAC_PI_4, 3).unwrap(), vec![6000.0; 3]);

        // serving at 300 m ahead; one interferer at 500 m on the same bearing
        let s = set(vec![link(300.0, 0.0, 100.0, true), link(500.0, 0.0, 100.0, true)], 100.0, 3000.0);
        assert_eq!(interferer_row(&s, 0, FRAC_PI_4, 3).unwrap(), vec![500.0, 6000.0, 6000.0]);
    }

    #[test]
    fn feature_layout() {
        assert_eq!(FeatureVector::width(10, 20), 221);
        let s = set(
            vec![link(400.0, 0.0, 80.0, true), link(100.0, 30.0, 80.0, false), link(-700.0, 10.0, 80.0, true)],
            80.0,
            2000.0,
        );
        let a = Antenna::new(FRAC_PI_4, 8).unwrap();
        let f = extract_features(&s, &a, &params(), 3, 4).unwrap();
        assert!(f.distances.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(f.to_input().len(), FeatureVector::width(3, 4));
        assert_eq!(FeatureVector::from_input(&f.to_input(), 3, 4).unwrap(), f);
        let p0 = mean_rx_power_omni(&s.links[1], &params(), 8);
        assert_relative_eq!(f.powers_db[0], 10.0 * p0.log10(), max_relative = 1e-14);
    }

    #[test]
    fn db_conversion_example() {
        assert_relative_eq!(linear_to_db(2.90e-9), -85.376, epsilon = 1e-3);
    }

    #[test]
    fn dominant_candidate_is_labelled() {
        let s = set(
            vec![
                link(100.0, 0.0, 60.0, true),
                link(1000.0, 0.0, 60.0, false),
                link(1100.0, 20.0, 60.0, false),
                link(-1200.0, 0.0, 60.0, false),
                link(0.0, 1300.0, 60.0, false),
            ],
            60.0,
            2000.0,
        );
        let a = Antenna::new(FRAC_PI_4, 8).unwrap();
        assert_eq!(label_sample(&s, &a, &params(), 4).unwrap(), 0);

        // scaling transmit power with no noise leaves the argmax alone
        let mut quiet = params();
        quiet.noise = 0.0;
        let l1 = label_sample(&s, &a, &quiet, 4).unwrap();
        quiet.tx_power *= 2.0;
        assert_eq!(label_sample(&s, &a, &quiet, 4).unwrap(), l1);
    }

    #[test]
    fn normalizer_contract() {
        let rows = vec![vec![1.0, 5.0, 2.0], vec![3.0, 5.0, -1.0], vec![8.0, 5.0, 4.0]];
        let n = Normalizer::fit(rows.iter().map(Vec::as_slice)).unwrap();
        let z: Vec<Vec<f64>> = rows.iter().map(|r| n.normalize(r).unwrap()).collect();
        for col in [0, 2] {
            let mean = z.iter().map(|r| r[col]).sum::<f64>() / 3.0;
            let var = z.iter().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-9 && (var.sqrt() - 1.0).abs() < 1e-9);
        }
        assert!(z.iter().all(|r| r[1] == 0.0));
        for r in &rows {
            let back = n.denormalize(&n.normalize(r).unwrap()).unwrap();
            for (a, b) in back.iter().zip(r) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert!(matches!(n.normalize(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(Normalizer::<f64>::fit(std::iter::empty()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn csv_round_trip_and_header() {
        let f = FeatureVector {
            powers_db: vec![-80.5, -90.25],
            distances: vec![100.0, 200.125],
            interferer_distances: vec![300.0, 6000.0, 6000.0, 6000.0],
            uav_height: 87.5,
        };
        let mut d = Dataset::new(2, 2, "abc123".into(), 9);
        d.samples.push(LabeledSample { scenario_seed: 42, features: f, label: 1 });
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# fingerprint=abc123 master_seed=9"));
        assert_eq!(lines.next().unwrap(), "scenario_seed,gamma_m,p_0,p_1,r_0,r_1,f_0_0,f_0_1,f_1_0,f_1_1,label");
        assert_eq!(Dataset::read_csv(buf.as_slice()).unwrap(), d);

        assert!(Dataset::read_csv("scenario_seed\n".as_bytes()).is_err());
    }
}
