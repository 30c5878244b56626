//! JSON model files.
//!
//! ```json
//! {"version": 1, "zeta": 10, "xi": 20, "layer_sizes": [221, 128, 64, 10],
//!  "activation": "relu", "normalizer": {"means": [...], "stds": [...]},
//!  "weights": [[...], ...], "biases": [[...], ...]}
//! ```
//!
//! `weights[k]` is layer `k`'s `outputs x inputs` matrix flattened row-major.
//! Values are written as shortest round-trip decimals, so a save/load cycle
//! is exact for both `f32` and `f64` models.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::model::{param_count, Activation, MlpModel};
use crate::dataset::Normalizer;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MODEL_FILE_VERSION: u64 = 1;

#[derive(Serialize)]
struct ModelFile<'a> {
    version: u64,
    zeta: usize,
    xi: usize,
    layer_sizes: &'a [usize],
    activation: Activation,
    normalizer: NormalizerFile,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

#[derive(Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizerFile {
    means: Vec<f64>,
    stds: Vec<f64>,
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

impl<T: Real> MlpModel<T> {
    pub fn to_json(&self) -> String {
        let (weights, biases) = (0..self.n_layers())
            .map(|k| {
                let (w, b) = self.layer(k);
                (to_f64(w), to_f64(b))
            })
            .unzip();
        let file = ModelFile {
            version: MODEL_FILE_VERSION,
            zeta: self.zeta,
            xi: self.xi,
            layer_sizes: &self.layer_sizes,
            activation: self.activation,
            normalizer: NormalizerFile { means: to_f64(&self.normalizer.means), stds: to_f64(&self.normalizer.stds) },
            weights,
            biases,
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| parse_err("<document>", e))?;
        let Value::Object(mut map) = doc else {
            return Err(parse_err("<document>", "expected a JSON object"));
        };
        let version: u64 = take(&mut map, "version")?;
        if version != MODEL_FILE_VERSION {
            return Err(Error::UnsupportedVersion { found: version, expected: MODEL_FILE_VERSION });
        }
        let zeta: usize = take(&mut map, "zeta")?;
        let xi: usize = take(&mut map, "xi")?;
        let layer_sizes: Vec<usize> = take(&mut map, "layer_sizes")?;
        let activation: Activation = take(&mut map, "activation")?;
        let normalizer: NormalizerFile = take(&mut map, "normalizer")?;
        let weights: Vec<Vec<f64>> = take(&mut map, "weights")?;
        let biases: Vec<Vec<f64>> = take(&mut map, "biases")?;
        if let Some(extra) = map.keys().next() {
            return Err(parse_err(extra, "unknown field"));
        }

        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(parse_err("layer_sizes", "need at least two non-zero widths"));
        }
        if *layer_sizes.last().unwrap() != zeta {
            return Err(parse_err("zeta", "does not match the output width"));
        }
        let n_layers = layer_sizes.len() - 1;
        if weights.len() != n_layers {
            return Err(parse_err("weights", format!("expected {n_layers} layers, found {}", weights.len())));
        }
        if biases.len() != n_layers {
            return Err(parse_err("biases", format!("expected {n_layers} layers, found {}", biases.len())));
        }
        let mut params = Vec::with_capacity(param_count(&layer_sizes));
        for (k, (w, b)) in weights.iter().zip(&biases).enumerate() {
            let (n_in, n_out) = (layer_sizes[k], layer_sizes[k + 1]);
            if w.len() != n_in * n_out {
                return Err(parse_err(&format!("weights[{k}]"), format!("expected {} values, found {}", n_in * n_out, w.len())));
            }
            if b.len() != n_out {
                return Err(parse_err(&format!("biases[{k}]"), format!("expected {n_out} values, found {}", b.len())));
            }
            params.extend(w.iter().chain(b).map(|v| T::lit(*v)));
        }
        let width = layer_sizes[0];
        if normalizer.means.len() != width {
            return Err(parse_err("normalizer.means", format!("expected {width} values")));
        }
        if normalizer.stds.len() != width {
            return Err(parse_err("normalizer.stds", format!("expected {width} values")));
        }
        let cast = |v: Vec<f64>| v.into_iter().map(T::lit).collect::<Vec<T>>();
        Ok(Self {
            zeta,
            xi,
            layer_sizes,
            activation,
            params,
            normalizer: Normalizer { means: cast(normalizer.means), stds: cast(normalizer.stds) },
        })
    }
}

fn parse_err(field: &str, detail: impl ToString) -> Error {
    Error::ModelParse { field: field.to_string(), detail: detail.to_string() }
}

fn take<V: DeserializeOwned>(map: &mut Map<String, Value>, key: &str) -> Result<V> {
    let v = map.remove(key).ok_or_else(|| parse_err(key, "missing"))?;
    serde_json::from_value(v).map_err(|e| parse_err(key, e))
}

pub fn save_model<T: Real>(model: &MlpModel<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model.to_json())?;
    Ok(())
}

pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<MlpModel<T>> {
    MlpModel::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuralnet::Activation;

    fn model() -> MlpModel<f64> {
        let mut m = MlpModel::new(&[7, 5, 3], Activation::Relu, 2, 11).unwrap();
        m.normalizer.means = (0..7).map(|i| i as f64 * 0.37 - 1.0).collect();
        m.normalizer.stds = (0..7).map(|i| 1.0 + i as f64 / 3.0).collect();
        m
    }

    #[test]
    fn save_load_is_exact() {
        let m = model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save_model(&m, &path).unwrap();
        let back: MlpModel<f64> = load_model(&path).unwrap();
        assert_eq!(back, m);
        let x = [0.3, -1.0, 2.0, 0.0, 0.5, 9.0, -3.0];
        assert_eq!(back.predict_proba(&x).unwrap(), m.predict_proba(&x).unwrap());

        let m32: MlpModel<f32> = m.cast();
        assert_eq!(MlpModel::<f32>::from_json(&m32.to_json()).unwrap(), m32);
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let text = model().to_json();
        let err = MlpModel::<f64>::from_json(&text[..text.len() / 2]).unwrap_err();
        assert!(matches!(err, Error::ModelParse { ref field, .. } if field == "<document>"));
    }

    #[test]
    fn version_mismatch() {
        let text = model().to_json().replacen("\"version\":1", "\"version\":7", 1);
        assert!(matches!(
            MlpModel::<f64>::from_json(&text),
            Err(Error::UnsupportedVersion { found: 7, expected: 1 })
        ));
    }

    #[test]
    fn bad_fields_are_named() {
        let mut v: Value = serde_json::from_str(&model().to_json()).unwrap();
        v["weights"][1] = Value::Array(vec![]);
        let err = MlpModel::<f64>::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::ModelParse { ref field, .. } if field == "weights[1]"), "{err}");

        let mut v: Value = serde_json::from_str(&model().to_json()).unwrap();
        v.as_object_mut().unwrap().remove("biases");
        let err = MlpModel::<f64>::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::ModelParse { ref field, .. } if field == "biases"));

        let mut v: Value = serde_json::from_str(&model().to_json()).unwrap();
        v["activation"] = Value::String("sigmoid".into());
        let err = MlpModel::<f64>::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::ModelParse { ref field, .. } if field == "activation"));
    }
}
