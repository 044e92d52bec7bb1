//! Rotating two-ring equilibria of 2n point vortices: n vortices of degree
//! +1 on one latitude circle and n of degree -1 on another, rotating
//! rigidly about the axis.

use crate::error::{Error, Result};
use crate::numerics::brent_root;
use crate::renorm::VortexConfiguration;
use crate::surface::ConformalAtlas;
use crate::vec2::Vec2;
use std::f64::consts::PI;

/// Minimum |r1 - r2| accepted by the ring equations (the 2/(r1 - r2)
/// term is singular at equal radii).
pub const RING_SEPARATION: f64 = 1e-3;
/// Residual tolerance of accepted equilibria.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// A rotating two-ring equilibrium.
#[derive(Debug, Clone)]
pub struct RingSolution {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub omega0: f64,
    pub s1: f64,
    pub s2: f64,
    pub residual: f64,
}

/// Intra/inter-ring interaction sum
/// Q(r1, r2) = sum_{j=2}^{floor((n+1)/2)} 4 (r1 - r2 cos T_j)
///             / (r1^2 + r2^2 - 2 r1 r2 cos T_j) + [n even: 2/(r1 + r2)],
/// with T_j = 2 pi (j - 1)/n.
pub fn ring_interaction_q(n: usize, r1: f64, r2: f64) -> f64 {
    let mut q = 0.0;
    for j in 2..=(n + 1) / 2 {
        let cos_t = (2.0 * PI * (j - 1) as f64 / n as f64).cos();
        q += 4.0 * (r1 - r2 * cos_t) / (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * cos_t);
    }
    if n % 2 == 0 {
        q += 2.0 / (r1 + r2);
    }
    q
}

fn check_ring_radii(atlas: &ConformalAtlas, r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0) || !(r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
        return Err(Error::Input(format!("ring radii must be positive ({r1}, {r2})")));
    }
    if (r1 - r2).abs() < RING_SEPARATION {
        return Err(Error::Domain(format!(
            "ring radii too close: |r1 - r2| = {:e}",
            (r1 - r2).abs()
        )));
    }
    let _ = atlas;
    Ok(())
}

/// Angular velocity demanded by each ring separately; the pair is an
/// equilibrium exactly when the two agree.
pub fn ring_omega(atlas: &ConformalAtlas, n: usize, r1: f64, r2: f64) -> Result<(f64, f64)> {
    check_ring_radii(atlas, r1, r2)?;
    let (a1, ap1) = atlas.alpha_at_radius(r1);
    let (a2, ap2) = atlas.alpha_at_radius(r2);
    let nf = n as f64;
    let bracket1 = nf - ap1 - 2.0 * r1 / (r1 - r2) - r1 * ring_interaction_q(n, r1, r2);
    let bracket2 = nf - ap2 + 2.0 * r2 / (r1 - r2) - r2 * ring_interaction_q(n, r2, r1);
    Ok((-bracket1 / (a1 * a1), bracket2 / (a2 * a2)))
}

/// Equilibrium residual: the mismatch between the angular velocities the
/// two rings demand. Zero at a rotating equilibrium.
pub fn ring_residual(atlas: &ConformalAtlas, n: usize, r1: f64, r2: f64) -> Result<f64> {
    let (w1, w2) = ring_omega(atlas, n, r1, r2)?;
    Ok(w2 - w1)
}

/// On a longitudinally symmetric surface the mirror pair r2 = 1/r1 is an
/// equilibrium for every n; construct it from the latitude s1 of ring 1.
pub fn find_symmetric_ring(atlas: &ConformalAtlas, n: usize, s1: f64) -> Result<RingSolution> {
    let profile = atlas.profile();
    if !profile.symmetric {
        return Err(Error::Domain(
            "symmetric ring construction requires a symmetric surface".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Input("ring needs n >= 1 vortices".into()));
    }
    let l = profile.l;
    if !(s1 > 0.0 && s1 < 0.5 * l) {
        return Err(Error::Input(format!(
            "ring latitude s1 = {s1} outside (0, l/2)"
        )));
    }
    if (s1 - 0.5 * l).abs() < 1e-3 {
        return Err(Error::Input(
            "ring latitude too close to the equator (omega diverges)".into(),
        ));
    }
    let r1 = atlas.radius_of_s(s1)?;
    let r2 = 1.0 / r1;
    let (w1, w2) = ring_omega(atlas, n, r1, r2)?;
    let residual = w2 - w1;
    if residual.abs() > RESIDUAL_TOL {
        return Err(Error::Solver(format!(
            "symmetric ring residual {residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(RingSolution {
        n,
        r1,
        r2,
        omega0: 0.5 * (w1 + w2),
        s1,
        s2: atlas.s_of_radius(r2),
        residual,
    })
}

/// Root-find the companion radius r2 of a general (possibly
/// non-symmetric) surface with ring 1 fixed at r1. Returns `None` when
/// the bracket shows no sign change.
pub fn find_ring_general(
    atlas: &ConformalAtlas,
    n: usize,
    r1: f64,
    bracket: (f64, f64),
) -> Result<Option<RingSolution>> {
    if n == 0 {
        return Err(Error::Input("ring needs n >= 1 vortices".into()));
    }
    let (lo, hi) = if bracket.0 < bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    if !(lo > 0.0) {
        return Err(Error::Input(format!("bracket must be positive ({lo}, {hi})")));
    }
    if r1 >= lo && r1 <= hi {
        return Err(Error::Input(
            "bracket for r2 must exclude r1 (the equations are singular there)".into(),
        ));
    }
    let f_lo = ring_residual(atlas, n, r1, lo)?;
    let f_hi = ring_residual(atlas, n, r1, hi)?;
    if f_lo * f_hi > 0.0 {
        return Ok(None);
    }
    let r2 = brent_root(
        |r2| ring_residual(atlas, n, r1, r2).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-14,
        200,
    )?;
    let (w1, w2) = ring_omega(atlas, n, r1, r2)?;
    let residual = w2 - w1;
    if residual.abs() > RESIDUAL_TOL {
        return Err(Error::Solver(format!(
            "ring root residual {residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(Some(RingSolution {
        n,
        r1,
        r2,
        omega0: 0.5 * (w1 + w2),
        s1: atlas.s_of_radius(r1),
        s2: atlas.s_of_radius(r2),
        residual,
    }))
}

/// Expand a ring solution to its 2n-vortex configuration: degrees +1 on
/// ring 1 and -1 on ring 2, both at angles T_i = 2 pi (i - 1)/n.
pub fn expand(ring: &RingSolution) -> VortexConfiguration {
    let mut positions = Vec::with_capacity(2 * ring.n);
    let mut degrees = Vec::with_capacity(2 * ring.n);
    for i in 0..ring.n {
        let t = 2.0 * PI * i as f64 / ring.n as f64;
        positions.push(Vec2::new(ring.r1 * t.cos(), ring.r1 * t.sin()));
        degrees.push(1);
    }
    for i in 0..ring.n {
        let t = 2.0 * PI * i as f64 / ring.n as f64;
        positions.push(Vec2::new(ring.r2 * t.cos(), ring.r2 * t.sin()));
        degrees.push(-1);
    }
    VortexConfiguration { positions, degrees }
}
