//! Planar and vertical geometry of the UAV-to-ground links, and the ring
//! sector lit on the ground by the UAV's directional main lobe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

/// Horizontal projection of a point onto the ground plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> GroundPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn distance(&self, other: &Self) -> T {
        (other.x - self.x).hypot(other.y - self.y)
    }

    /// Azimuth of `other` as seen from `self`, in `(-pi, pi]`.
    pub fn azimuth_to(&self, other: &Self) -> T {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// Horizontal distance, height difference and elevation angle of a UAV-BS pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalGeometry<T> {
    /// Horizontal distance, meters.
    pub r: T,
    /// UAV height minus BS height, meters.
    pub delta_gamma: T,
    /// Elevation angle, radians.
    pub phi: T,
}

impl<T: Real> VerticalGeometry<T> {
    /// Geometry of the link between a UAV at `uav` / `uav_height` and a BS at
    /// `bs` / `bs_height`. Directly overhead the angle is `+pi/2` (or `-pi/2`
    /// when the UAV is below the antenna).
    pub fn between(uav: GroundPoint<T>, uav_height: T, bs: GroundPoint<T>, bs_height: T) -> Self {
        let r = uav.distance(&bs);
        let delta_gamma = uav_height - bs_height;
        let phi = if r > T::zero() {
            (delta_gamma / r).atan()
        } else if delta_gamma >= T::zero() {
            T::FRAC_PI_2()
        } else {
            -T::FRAC_PI_2()
        };
        Self { r, delta_gamma, phi }
    }

    /// Straight-line 3D distance squared.
    pub fn distance_sq(&self) -> T {
        self.r * self.r + self.delta_gamma * self.delta_gamma
    }
}

/// Radius that may extend to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Radius<T> {
    Finite(T),
    Unbounded,
}

impl<T: Real> Radius<T> {
    pub fn is_unbounded(&self) -> bool {
        matches!(self, Radius::Unbounded)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Radius::Finite(v) => Some(v),
            Radius::Unbounded => None,
        }
    }

    /// `true` when `d` does not exceed this radius.
    pub fn admits(&self, d: T) -> bool {
        match *self {
            Radius::Finite(v) => d <= v,
            Radius::Unbounded => true,
        }
    }

    fn from_quotient(num: T, den: T) -> Self {
        if den > T::zero() && den.is_finite() {
            let v = num / den;
            if v.is_finite() {
                return Radius::Finite(v);
            }
        }
        Radius::Unbounded
    }
}

/// Annular wedge on the ground illuminated by the directional main lobe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSector<T> {
    /// UAV ground projection.
    pub center: GroundPoint<T>,
    /// Azimuth of the serving BS seen from the center.
    pub azimuth_center: T,
    /// Beamwidth, radians.
    pub arc_angle: T,
    pub inner_radius: T,
    pub outer_radius: Radius<T>,
}

pub fn check_beamwidth<T: Real>(omega: T) -> Result<()> {
    if omega > T::zero() && omega < T::PI() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("beamwidth {omega} rad outside (0, pi)")))
    }
}

impl<T: Real> RingSector<T> {
    /// Footprint of a lobe of width `omega` centred on the BS at `serving`.
    ///
    /// Boundary values of the serving elevation belong to the branch listed
    /// first: `w/2 < |phi| <= pi/2 - w/2` for the outer radius and
    /// `|phi| <= pi/2 - w/2` for the inner one. A non-positive denominator
    /// (possible for `omega >= pi/2`) means the lobe reaches the horizon.
    pub fn new(
        uav_height: T,
        bs_height: T,
        serving: GroundPoint<T>,
        uav_xy: GroundPoint<T>,
        omega: T,
    ) -> Result<Self> {
        check_beamwidth(omega)?;
        let geo = VerticalGeometry::between(uav_xy, uav_height, serving, bs_height);
        let half = omega / T::lit(2.0);
        let phi = geo.phi.abs();
        let dg = geo.delta_gamma.abs();
        let knee = T::FRAC_PI_2() - half;

        let outer_radius = if phi > half && phi <= knee {
            Radius::from_quotient(dg, (phi - half).tan())
        } else if phi > knee {
            Radius::from_quotient(dg, (T::FRAC_PI_2() - omega).tan())
        } else {
            Radius::Unbounded
        };

        let inner_radius = if phi <= knee {
            let den = (phi + half).tan();
            if den > T::zero() && den.is_finite() {
                dg / den
            } else {
                T::zero()
            }
        } else {
            T::zero()
        };

        Ok(Self {
            center: uav_xy,
            azimuth_center: uav_xy.azimuth_to(&serving),
            arc_angle: omega,
            inner_radius,
            outer_radius,
        })
    }

    /// Membership in the footprint: radius within `[u, v]` and azimuth within
    /// half a beamwidth of the lobe centre.
    pub fn contains(&self, point: &GroundPoint<T>) -> bool {
        let d = self.center.distance(point);
        if d < self.inner_radius || !self.outer_radius.admits(d) {
            return false;
        }
        if d == T::zero() {
            // nadir: inside whenever the annulus reaches the centre
            return true;
        }
        let off = wrap_angle(self.center.azimuth_to(point) - self.azimuth_center);
        off.abs() <= self.arc_angle / T::lit(2.0)
    }
}
