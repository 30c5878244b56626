//! Antenna gains, pathloss, Nakagami-m fading and downlink SINR.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_beamwidth, GroundPoint, RingSector, VerticalGeometry};
use crate::scalar::Real;

/// UAV directional beamwidth and BS array size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaConfig<T> {
    /// Beamwidth, radians.
    pub omega: T,
    /// ULA elements per BS.
    pub n_elements: u32,
}

impl<T: Real> AntennaConfig<T> {
    pub fn new(omega: T, n_elements: u32) -> Result<Self> {
        check_beamwidth(omega)?;
        if n_elements == 0 {
            return Err(Error::InvalidConfig("BS array needs at least one element".into()));
        }
        Ok(Self { omega, n_elements })
    }
}

/// Channel and receiver constants, all linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams<T> {
    /// BS transmit power, W.
    pub tx_power: T,
    pub alpha_los: T,
    pub alpha_nlos: T,
    pub fading_m_los: T,
    pub fading_m_nlos: T,
    /// Near-field pathloss `c`.
    pub near_field: T,
    /// Noise power, W.
    pub noise: T,
    /// Coverage threshold on SINR.
    pub threshold: T,
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

impl<T: Real> ChannelParams<T> {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tx_power,
            self.alpha_los,
            self.alpha_nlos,
            self.fading_m_los,
            self.fading_m_nlos,
            self.near_field,
            self.threshold,
        ];
        if all.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) || !(self.noise >= T::zero()) {
            return Err(Error::InvalidConfig("channel parameters must be positive and finite".into()));
        }
        if self.alpha_nlos < self.alpha_los {
            return Err(Error::InvalidConfig("NLOS pathloss exponent below LOS exponent".into()));
        }
        if self.fading_m_los < T::lit(0.5) || self.fading_m_nlos < T::lit(0.5) {
            return Err(Error::InvalidConfig("Nakagami shape must be >= 0.5".into()));
        }
        Ok(())
    }

    pub fn exponent(&self, los: bool) -> T {
        if los {
            self.alpha_los
        } else {
            self.alpha_nlos
        }
    }

    pub fn fading_shape(&self, los: bool) -> T {
        if los {
            self.fading_m_los
        } else {
            self.fading_m_nlos
        }
    }
}

/// Geometry and LOS flag of one UAV-BS link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkState<T> {
    pub position: GroundPoint<T>,
    pub geometry: VerticalGeometry<T>,
    pub los: bool,
}

/// All links seen from one UAV position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSet<T> {
    pub uav_xy: GroundPoint<T>,
    pub uav_height: T,
    pub window_radius: T,
    pub links: Vec<LinkState<T>>,
}

/// Gain of the rectangular-pattern directional antenna inside its main lobe.
pub fn uav_antenna_gain<T: Real>(omega: T) -> Result<T> {
    check_beamwidth(omega)?;
    Ok(T::lit(16.0) * T::PI() / (omega * omega))
}

/// Vertical gain of an `n`-element ULA at elevation `phi`:
/// `(1/n) sin^2(n*x) / sin^2(x)` with `x = (pi/2) sin(phi)`.
/// Close to `x = 0` the ratio is replaced by its second-order expansion
/// `n^2 (1 - (n^2 - 1) x^2 / 3)`.
pub fn bs_vertical_gain<T: Real>(phi: T, n_elements: u32) -> T {
    let n = T::from_u32(n_elements).expect("element count");
    let x = T::FRAC_PI_2() * phi.sin();
    let sx = x.sin();
    if sx.abs() < T::lit(1e-6) {
        let x2 = x * x;
        return n * (T::one() - (n * n - T::one()) * x2 / T::lit(3.0));
    }
    let s = (n * x).sin();
    (s * s) / (sx * sx) / n
}

/// `c * d^(-alpha)`, with `alpha` picked by the LOS flag.
pub fn pathloss<T: Real>(link: &LinkState<T>, params: &ChannelParams<T>) -> T {
    let alpha = params.exponent(link.los);
    params.near_field * link.geometry.distance_sq().powf(-alpha / T::lit(2.0))
}

/// Fading-free power received by the omni antenna (unit UAV gain), W.
pub fn mean_rx_power_omni<T: Real>(link: &LinkState<T>, params: &ChannelParams<T>, n_elements: u32) -> T {
    params.tx_power * bs_vertical_gain(link.geometry.phi, n_elements) * pathloss(link, params)
}

/// Nakagami-m power gain: `Gamma(m, 1/m)`, unit mean.
pub fn sample_fading<T, R>(m: T, rng: &mut R) -> T
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
{
    Gamma::new(m, T::one() / m).expect("valid Nakagami shape").sample(rng)
}

/// Whether multipath fading is averaged out or drawn.
pub enum Fading<'a, R: ?Sized> {
    /// Every fading gain at its mean, 1.
    Mean,
    /// Independent draws from the caller's generator.
    Sampled(&'a mut R),
}

impl<R: Rng + ?Sized> Fading<'_, R> {
    fn gain<T>(&mut self, m: T) -> T
    where
        T: Real,
        StandardNormal: Distribution<T>,
        Exp1: Distribution<T>,
        Open01: Distribution<T>,
    {
        match self {
            Fading::Mean => T::one(),
            Fading::Sampled(rng) => sample_fading(m, *rng),
        }
    }
}

/// Deterministic mode with a placeholder generator type.
pub fn mean_fading() -> Fading<'static, rand_chacha::ChaCha8Rng> {
    Fading::Mean
}

impl<T: Real> LinkSet<T> {
    fn link(&self, index: usize) -> Result<&LinkState<T>> {
        self.links.get(index).ok_or(Error::DimensionMismatch {
            context: "link index",
            expected: self.links.len(),
            found: index,
        })
    }

    /// Footprint of the main lobe when steered at BS `serving`.
    pub fn footprint(&self, serving: usize, omega: T) -> Result<RingSector<T>> {
        let s = self.link(serving)?;
        let bs_height = self.uav_height - s.geometry.delta_gamma;
        RingSector::new(self.uav_height, bs_height, s.position, self.uav_xy, omega)
    }

    /// BSs other than `serving` inside its footprint, in BS order.
    pub fn interferers(&self, serving: usize, omega: T) -> Result<Vec<usize>> {
        let sector = self.footprint(serving, omega)?;
        Ok(self
            .links
            .iter()
            .enumerate()
            .filter(|&(i, l)| i != serving && sector.contains(&l.position))
            .map(|(i, _)| i)
            .collect())
    }
}

/// Breakdown of a directional SINR evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrTerms<T> {
    pub signal: T,
    pub interference_los: T,
    pub interference_nlos: T,
    pub noise: T,
}

impl<T: Real> SinrTerms<T> {
    pub fn sinr(&self) -> T {
        self.signal / (self.interference_los + self.interference_nlos + self.noise)
    }
}

/// Downlink SINR at the directional antenna steered toward BS `serving`.
/// Interference comes from the other BSs inside the lobe footprint, each
/// through the same in-lobe gain and its own LOS state. With sampled fading
/// the serving gain is drawn first, then interferers in BS order.
pub fn directional_sinr_terms<T, R>(
    set: &LinkSet<T>,
    serving: usize,
    antenna: &AntennaConfig<T>,
    params: &ChannelParams<T>,
    fading: &mut Fading<'_, R>,
) -> Result<SinrTerms<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
{
    let eta = uav_antenna_gain(antenna.omega)?;
    let rx = |l: &LinkState<T>| eta * mean_rx_power_omni(l, params, antenna.n_elements);
    let s = set.link(serving)?;
    let signal = rx(s) * fading.gain(params.fading_shape(s.los));
    let mut terms = SinrTerms { signal, interference_los: T::zero(), interference_nlos: T::zero(), noise: params.noise };
    for i in set.interferers(serving, antenna.omega)? {
        let l = &set.links[i];
        let p = rx(l) * fading.gain(params.fading_shape(l.los));
        if l.los {
            terms.interference_los = terms.interference_los + p;
        } else {
            terms.interference_nlos = terms.interference_nlos + p;
        }
    }
    Ok(terms)
}

pub fn directional_sinr<T, R>(
    set: &LinkSet<T>,
    serving: usize,
    antenna: &AntennaConfig<T>,
    params: &ChannelParams<T>,
    fading: &mut Fading<'_, R>,
) -> Result<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
{
    directional_sinr_terms(set, serving, antenna, params, fading).map(|t| t.sinr())
}

/// SINR of BS `candidate` at the omni antenna, every other BS interfering.
pub fn omni_sinr<T, R>(
    set: &LinkSet<T>,
    candidate: usize,
    params: &ChannelParams<T>,
    n_elements: u32,
    fading: &mut Fading<'_, R>,
) -> Result<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
{
    set.link(candidate)?;
    let mut signal = T::zero();
    let mut interference = T::zero();
    for (i, l) in set.links.iter().enumerate() {
        let p = mean_rx_power_omni(l, params, n_elements) * fading.gain(params.fading_shape(l.los));
        if i == candidate {
            signal = p;
        } else {
            interference = interference + p;
        }
    }
    Ok(signal / (interference + params.noise))
}

/// Fading-free omni SINR of every BS, O(n) via prefix and suffix sums.
pub fn omni_sinr_all_mean<T: Real>(set: &LinkSet<T>, params: &ChannelParams<T>, n_elements: u32) -> Vec<T> {
    let powers: Vec<T> = set.links.iter().map(|l| mean_rx_power_omni(l, params, n_elements)).collect();
    let n = powers.len();
    let mut suffix = vec![T::zero(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + powers[i];
    }
    let mut prefix = T::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(powers[i] / (prefix + suffix[i + 1] + params.noise));
        prefix = prefix + powers[i];
    }
    out
}
