//! Surface points in their four equivalent representations and the
//! conversions between them.

use super::ConformalAtlas;
use crate::error::{Error, Result};
use crate::vec2::Vec2;
use std::f64::consts::PI;

/// A point on the surface in one of four charts. The plane form cannot
/// represent the far pole s = l (r = infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfacePoint {
    /// Stereographic plane coordinates.
    Plane { x: f64, y: f64 },
    /// Reference-sphere spherical coordinates, phi measured from the
    /// s = 0 pole.
    Spherical { theta: f64, phi: f64 },
    /// Cylinder chart: polar angle and arc length along the profile.
    Arc { theta: f64, s: f64 },
    /// Embedded position in R^3.
    Embedded { x: f64, y: f64, z: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Plane,
    Spherical,
    Arc,
    Embedded,
}

impl SurfacePoint {
    pub fn plane_from(v: Vec2) -> Self {
        SurfacePoint::Plane { x: v.x, y: v.y }
    }

    pub fn representation(&self) -> Representation {
        match self {
            SurfacePoint::Plane { .. } => Representation::Plane,
            SurfacePoint::Spherical { .. } => Representation::Spherical,
            SurfacePoint::Arc { .. } => Representation::Arc,
            SurfacePoint::Embedded { .. } => Representation::Embedded,
        }
    }

    /// Canonical (theta, phi) pair of the point.
    pub fn spherical(&self, atlas: &ConformalAtlas) -> Result<(f64, f64)> {
        match *self {
            SurfacePoint::Plane { x, y } => {
                let r = (x * x + y * y).sqrt();
                let theta = if r == 0.0 { 0.0 } else { y.atan2(x) };
                Ok((theta, 2.0 * r.atan()))
            }
            SurfacePoint::Spherical { theta, phi } => Ok((theta, phi)),
            SurfacePoint::Arc { theta, s } => Ok((theta, atlas.phi_of_s(s)?)),
            SurfacePoint::Embedded { x, y, z } => {
                let profile = atlas.profile();
                if !profile.beta_is_monotone() {
                    return Err(Error::Domain(
                        "embedded inversion requires monotone beta".into(),
                    ));
                }
                let rho = (x * x + y * y).sqrt();
                let theta = if rho == 0.0 { 0.0 } else { y.atan2(x) };
                // Invert the monotone height, then polish against alpha.
                let (mut lo, mut hi) = (0.0, profile.l);
                if z <= profile.beta(lo) {
                    return Ok((theta, 0.0));
                }
                if z >= profile.beta(hi) {
                    return Ok((theta, PI));
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if profile.beta(mid) < z {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 * profile.l {
                        break;
                    }
                }
                let s = 0.5 * (lo + hi);
                if (profile.alpha(s) - rho).abs() > 1e-6 * (1.0 + rho) {
                    return Err(Error::Domain(
                        "embedded point does not lie on the surface".into(),
                    ));
                }
                Ok((theta, atlas.phi_of_s(s)?))
            }
        }
    }

    /// Plane chart position; rejects the far pole.
    pub fn plane(&self, atlas: &ConformalAtlas) -> Result<Vec2> {
        if let SurfacePoint::Plane { x, y } = *self {
            return Ok(Vec2::new(x, y));
        }
        let (theta, phi) = self.spherical(atlas)?;
        if phi >= PI {
            return Err(Error::Domain(
                "plane representation undefined at the pole s = l".into(),
            ));
        }
        let r = atlas.radius_of_phi(phi);
        Ok(Vec2::new(r * theta.cos(), r * theta.sin()))
    }

    /// Plane radius |p|; infinite at the far pole (rejected).
    pub fn radius(&self, atlas: &ConformalAtlas) -> Result<f64> {
        match *self {
            SurfacePoint::Plane { x, y } => Ok((x * x + y * y).sqrt()),
            _ => {
                let (_, phi) = self.spherical(atlas)?;
                if phi >= PI {
                    return Err(Error::Domain(
                        "plane radius undefined at the pole s = l".into(),
                    ));
                }
                Ok(atlas.radius_of_phi(phi))
            }
        }
    }

    pub fn arc(&self, atlas: &ConformalAtlas) -> Result<(f64, f64)> {
        let (theta, phi) = self.spherical(atlas)?;
        Ok((theta, atlas.s_of_phi(phi)))
    }

    pub fn embedded(&self, atlas: &ConformalAtlas) -> Result<(f64, f64, f64)> {
        let (theta, s) = self.arc(atlas)?;
        let profile = atlas.profile();
        let a = profile.alpha(s);
        Ok((a * theta.cos(), a * theta.sin(), profile.beta(s)))
    }
}

/// Convert a point to the requested representation.
pub fn convert(
    atlas: &ConformalAtlas,
    p: &SurfacePoint,
    target: Representation,
) -> Result<SurfacePoint> {
    match target {
        Representation::Plane => {
            let v = p.plane(atlas)?;
            Ok(SurfacePoint::Plane { x: v.x, y: v.y })
        }
        Representation::Spherical => {
            let (theta, phi) = p.spherical(atlas)?;
            Ok(SurfacePoint::Spherical { theta, phi })
        }
        Representation::Arc => {
            let (theta, s) = p.arc(atlas)?;
            Ok(SurfacePoint::Arc { theta, s })
        }
        Representation::Embedded => {
            let (x, y, z) = p.embedded(atlas)?;
            Ok(SurfacePoint::Embedded { x, y, z })
        }
    }
}

/// Reflection across the symmetry plane: s -> l - s, theta unchanged; in
/// plane coordinates the inversion p -> p / |p|^2.
pub fn reflect(atlas: &ConformalAtlas, p: &SurfacePoint) -> Result<SurfacePoint> {
    let profile = atlas.profile();
    if !profile.symmetric {
        return Err(Error::Domain(
            "reflection is not an isometry of a non-symmetric surface".into(),
        ));
    }
    let (_, phi) = p.spherical(atlas)?;
    if phi <= 0.0 || phi >= PI {
        return Err(Error::Domain("cannot reflect a pole point".into()));
    }
    match *p {
        SurfacePoint::Plane { x, y } => {
            let r2 = x * x + y * y;
            Ok(SurfacePoint::Plane { x: x / r2, y: y / r2 })
        }
        SurfacePoint::Spherical { theta, phi } => {
            Ok(SurfacePoint::Spherical { theta, phi: PI - phi })
        }
        SurfacePoint::Arc { theta, s } => Ok(SurfacePoint::Arc { theta, s: profile.l - s }),
        SurfacePoint::Embedded { x, y, z } => {
            Ok(SurfacePoint::Embedded { x, y, z: 2.0 * profile.mid_height() - z })
        }
    }
}
