//! UAV base-station association.
//!
//! Synthesizes urban cellular scenarios (PPP base stations, a square grid of
//! Rayleigh-height buildings, ray-traced LOS/NLOS), computes the downlink SINR
//! seen by a UAV steering a directional antenna at its serving base station,
//! and trains a small fully-connected classifier that picks the serving base
//! station from the closest candidates. The [`harness`] module compares that
//! classifier with closest-BS and strongest-omni-SINR association through
//! Monte Carlo coverage experiments.
//!
//! The numerical core ([`geometry`], [`radio`], [`neuralnet`]) is generic over
//! the scalar type through [`Real`]; the scenario-level modules work in `f64`.
//! The aliases below name the concrete instantiations used throughout.

pub mod dataset;
pub mod environment;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod neuralnet;
pub mod policies;
pub mod radio;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::GroundPoint<f64>;
pub type Sector = geometry::RingSector<f64>;
pub type Elevation = geometry::VerticalGeometry<f64>;
pub type Link = radio::LinkState<f64>;
pub type Antenna = radio::AntennaConfig<f64>;
pub type Channel = radio::ChannelParams<f64>;
pub type Stats = dataset::Normalizer<f64>;
pub type Mlp = neuralnet::MlpModel<f64>;
pub type Mlp32 = neuralnet::MlpModel<f32>;
pub type AdaMax = neuralnet::AdaMaxState<f64>;
