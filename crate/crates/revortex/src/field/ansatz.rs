//! Vortex-ring trial field: the multi-vortex harmonic phase chi everywhere,
//! with a linear modulus ramp inside each geodesic ball of radius eps. The
//! phase carries the winding exactly, so no core/chi blending is needed; a
//! separate local core phase would mismatch chi by O(eps) on the ball rim
//! and cost extra energy that spoils the 2 pi n |ln eps| law at accessible
//! eps.

use super::{symmetrize, ComplexField, Grid};
use crate::error::{Error, Result};
use crate::numerics::wrap_angle;
use crate::rings::{expand, RingSolution};
use crate::surface::ConformalAtlas;
use num_complex::Complex64;
use std::sync::Arc;

struct VortexSite {
    theta: f64,
    s: f64,
    /// alpha at the vortex latitude; local coordinates are
    /// (alpha_c (theta - theta_c), s - s_c).
    alpha: f64,
    degree: f64,
    plane: Complex64,
}

/// Unit phase factor e^{i chi(x)} of the multi-vortex harmonic conjugate:
/// the product of (z - p_i)/|z - p_i| to the power d_i in the plane chart.
fn chi_phase(sites: &[VortexSite], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for site in sites {
        let d = z - site.plane;
        let n = d.norm();
        let unit = if n == 0.0 { Complex64::new(1.0, 0.0) } else { d / n };
        if site.degree > 0.0 {
            acc *= unit;
        } else {
            acc *= unit.conj();
        }
    }
    acc
}

/// Construct the ring trial field on `grid` with healing length `eps`.
pub fn build_ansatz(
    atlas: &ConformalAtlas,
    grid: Arc<Grid>,
    ring: &RingSolution,
    eps: f64,
) -> Result<ComplexField> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Input(format!("ansatz needs eps in (0, 1), got {eps}")));
    }
    let ball = 1.5 * eps;
    if grid.d_s > eps / 4.0 {
        return Err(Error::Input(format!(
            "grid under-resolves eps: ds = {:.3e} > eps/4 = {:.3e}",
            grid.d_s,
            eps / 4.0
        )));
    }
    let config = expand(ring);
    let profile = atlas.profile();
    let (a1, _) = atlas.alpha_at_radius(ring.r1);
    let (a2, _) = atlas.alpha_at_radius(ring.r2);
    let mut sites = Vec::with_capacity(config.len());
    for (i, (p, &d)) in config.positions.iter().zip(&config.degrees).enumerate() {
        let (s, alpha) = if i < ring.n {
            (ring.s1, a1)
        } else {
            (ring.s2, a2)
        };
        if s - ball <= 0.0 || s + ball >= profile.l {
            return Err(Error::Input(
                "vortex ball reaches a pole; reduce eps or move the ring".into(),
            ));
        }
        sites.push(VortexSite {
            theta: p.angle(),
            s,
            alpha,
            degree: d as f64,
            plane: Complex64::new(p.x, p.y),
        });
    }
    // Disjointness of the balls in the approximate geodesic metric.
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let am = 0.5 * (sites[i].alpha + sites[j].alpha);
            let dx = am * wrap_angle(sites[i].theta - sites[j].theta);
            let dy = sites[i].s - sites[j].s;
            if (dx * dx + dy * dy).sqrt() <= 2.0 * ball {
                return Err(Error::Input(
                    "vortex balls overlap; reduce eps or separate the rings".into(),
                ));
            }
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.n_s {
        let s = grid.s(k);
        let z_r = grid.radius_node[k];
        for j in 0..grid.n_theta {
            let theta = grid.theta(j);
            let z = Complex64::from_polar(z_r, theta);
            // Ramp the modulus by the geodesic distance to the nearest vortex.
            let mut rho_min = f64::INFINITY;
            for site in &sites {
                let xi = site.alpha * wrap_angle(theta - site.theta);
                let eta = s - site.s;
                rho_min = rho_min.min((xi * xi + eta * eta).sqrt());
            }
            // Quadratic ramp t(2 - t): flatter near the rim than a linear
            // ramp, halving the core momentum deficit at the same eps.
            let t = (rho_min / eps).min(1.0);
            let amp = t * (2.0 - t);
            values.push(chi_phase(&sites, z) * amp);
        }
    }
    let field = ComplexField { grid, values, epsilon: eps };
    if field.grid.symmetric {
        symmetrize(&field, ring.n)
    } else {
        Ok(field)
    }
}
