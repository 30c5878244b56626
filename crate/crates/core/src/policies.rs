//! Serving-BS selection: closest, strongest omni SINR, and the classifier.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{candidate_set, features_for, FeatureVector};
use crate::error::{Error, Result};
use crate::neuralnet::MlpModel;
use crate::radio::{omni_sinr_all_mean, LinkSet};
use crate::scalar::Real;
use crate::{Antenna, Channel};

/// Policy names as they appear in configs and result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Closest,
    Strongest,
    Neural,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Closest, PolicyKind::Strongest, PolicyKind::Neural];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Closest => "closest",
            PolicyKind::Strongest => "strongest",
            PolicyKind::Neural => "neural",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closest" => Ok(PolicyKind::Closest),
            "strongest" => Ok(PolicyKind::Strongest),
            "neural" => Ok(PolicyKind::Neural),
            other => Err(Error::InvalidConfig(format!("unknown policy `{other}`"))),
        }
    }
}

/// A policy ready to run; the neural variant borrows its trained model.
#[derive(Debug, Clone, Copy)]
pub enum AssociationPolicy<'a, T = f64> {
    Closest,
    Strongest,
    Neural(&'a MlpModel<T>),
}

impl<T: Real> AssociationPolicy<'_, T> {
    pub fn kind(&self) -> PolicyKind {
        match self {
            AssociationPolicy::Closest => PolicyKind::Closest,
            AssociationPolicy::Strongest => PolicyKind::Strongest,
            AssociationPolicy::Neural(_) => PolicyKind::Neural,
        }
    }

    /// Index (into the link set) of the BS this policy associates with.
    pub fn choose(&self, set: &LinkSet<f64>, antenna: &Antenna, params: &Channel) -> Result<usize> {
        match self {
            AssociationPolicy::Closest => choose_closest(set),
            AssociationPolicy::Strongest => choose_strongest(set, params, antenna.n_elements),
            AssociationPolicy::Neural(model) => choose_neural(set, *model, antenna, params),
        }
    }
}

fn non_empty(set: &LinkSet<f64>) -> Result<()> {
    if set.links.is_empty() {
        return Err(Error::ScenarioRejected { needed: 1, found: 0 });
    }
    Ok(())
}

/// Smallest horizontal distance, `(x, y)` tie-break.
pub fn choose_closest(set: &LinkSet<f64>) -> Result<usize> {
    non_empty(set)?;
    Ok(candidate_set(set, 1)?[0])
}

/// Highest fading-free omni SINR over every BS in the window; lowest index
/// wins ties.
pub fn choose_strongest(set: &LinkSet<f64>, params: &Channel, n_elements: u32) -> Result<usize> {
    non_empty(set)?;
    let sinr = omni_sinr_all_mean(set, params, n_elements);
    let mut best = 0;
    for (i, s) in sinr.iter().enumerate() {
        if *s > sinr[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Candidate picked by the classifier from the `zeta` closest BSs.
pub fn choose_neural<T: Real>(
    set: &LinkSet<f64>,
    model: &MlpModel<T>,
    antenna: &Antenna,
    params: &Channel,
) -> Result<usize> {
    let width = FeatureVector::width(model.zeta, model.xi);
    if model.input_width() != width {
        return Err(Error::DimensionMismatch { context: "model input vs (zeta, xi)", expected: width, found: model.input_width() });
    }
    let candidates = candidate_set(set, model.zeta)?;
    let features = features_for(set, &candidates, antenna, params, model.xi)?;
    let row: Vec<T> = features.to_input().into_iter().map(T::lit).collect();
    Ok(candidates[model.predict(&row)?])
}

/// Position of BS `index` in the distance ordering (0 = closest).
pub fn distance_rank(set: &LinkSet<f64>, index: usize) -> usize {
    let me = &set.links[index];
    set.links
        .iter()
        .filter(|l| {
            l.geometry
                .r
                .total_cmp(&me.geometry.r)
                .then(l.position.x.total_cmp(&me.position.x))
                .then(l.position.y.total_cmp(&me.position.y))
                .is_lt()
        })
        .count()
}
