//! Renormalized energy of a vortex configuration, its gradient, and the
//! harmonic pair (Phi_0, chi) used to build ansatz phases.

use crate::error::{Error, Result};
use crate::numerics::GAUSS_LEGENDRE_16;
use crate::surface::{ConformalAtlas, SurfacePoint};
use crate::vec2::Vec2;
use std::f64::consts::PI;

/// Exclusion radius around vortices for path routing (plane units).
pub const R_EXCLUSION: f64 = 1e-3;

/// Point vortices in the plane chart with integer degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfiguration {
    pub positions: Vec<Vec2>,
    pub degrees: Vec<i32>,
}

impl VortexConfiguration {
    pub fn new(positions: Vec<Vec2>, degrees: Vec<i32>) -> Result<Self> {
        if positions.len() != degrees.len() {
            return Err(Error::Input(
                "vortex positions and degrees differ in length".into(),
            ));
        }
        if positions.is_empty() {
            return Err(Error::Input("empty vortex configuration".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::Input("non-finite vortex position".into()));
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(Error::Input("vortex degrees must be nonzero".into()));
        }
        let config = VortexConfiguration { positions, degrees };
        if config.len() > 1 && config.min_separation() <= 0.0 {
            return Err(Error::Domain("coincident vortex positions".into()));
        }
        Ok(config)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_degree(&self) -> i32 {
        self.degrees.iter().sum()
    }

    pub fn min_separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                min = min.min((self.positions[i] - self.positions[j]).norm());
            }
        }
        min
    }

    /// Rotate every vortex about the chart origin.
    pub fn rotated(&self, angle: f64) -> Self {
        VortexConfiguration {
            positions: self.positions.iter().map(|p| p.rotated(angle)).collect(),
            degrees: self.degrees.clone(),
        }
    }
}

fn check_separated(config: &VortexConfiguration) -> Result<()> {
    if config.len() > 1 && config.min_separation() < 1e-12 {
        return Err(Error::Domain("coincident vortex positions".into()));
    }
    Ok(())
}

/// Renormalized energy
/// W = pi sum_i d_i^2 f(b_i) - pi sum_{i != j} d_i d_j ln|b_i - b_j|,
/// the i != j sum running over ordered pairs.
pub fn renormalized_energy(atlas: &ConformalAtlas, config: &VortexConfiguration) -> Result<f64> {
    check_separated(config)?;
    let mut w = 0.0;
    for (p, &d) in config.positions.iter().zip(&config.degrees) {
        let f = atlas.conformal_factor(&SurfacePoint::plane_from(*p))?;
        w += PI * (d as f64) * (d as f64) * f;
    }
    for i in 0..config.len() {
        for j in 0..config.len() {
            if i != j {
                let dist = (config.positions[i] - config.positions[j]).norm();
                w -= PI * (config.degrees[i] * config.degrees[j]) as f64 * dist.ln();
            }
        }
    }
    Ok(w)
}

/// Gradient of W with respect to vortex i:
/// pi d_i^2 grad f(b_i) - 2 pi d_i sum_{j != i} d_j (b_i - b_j)/|b_i - b_j|^2.
pub fn grad_renormalized_energy(
    atlas: &ConformalAtlas,
    config: &VortexConfiguration,
    i: usize,
) -> Result<Vec2> {
    check_separated(config)?;
    if i >= config.len() {
        return Err(Error::Input(format!("vortex index {i} out of range")));
    }
    let di = config.degrees[i] as f64;
    let bi = config.positions[i];
    let mut g = atlas.grad_conformal_factor(&SurfacePoint::plane_from(bi))? * (PI * di * di);
    for j in 0..config.len() {
        if j != i {
            let delta = bi - config.positions[j];
            g += delta * (-2.0 * PI * di * config.degrees[j] as f64 / delta.norm_sq());
        }
    }
    Ok(g)
}

/// Chordal position on the unit reference sphere of a surface point.
fn chordal(atlas: &ConformalAtlas, p: &SurfacePoint) -> Result<[f64; 3]> {
    let (theta, phi) = match *p {
        SurfacePoint::Spherical { theta, phi } => (theta, phi),
        _ => {
            let arc = crate::surface::convert(atlas, p, crate::surface::Representation::Spherical)?;
            match arc {
                SurfacePoint::Spherical { theta, phi } => (theta, phi),
                _ => unreachable!(),
            }
        }
    };
    Ok([phi.sin() * theta.cos(), phi.sin() * theta.sin(), -phi.cos()])
}

fn chordal_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Two-vortex harmonic potential Phi_0(x) = ln|x~ - p1~| - ln|x~ - p2~|
/// with chordal distances on the unit reference sphere.
pub fn phi0(
    atlas: &ConformalAtlas,
    x: &SurfacePoint,
    p1: &SurfacePoint,
    p2: &SurfacePoint,
) -> Result<f64> {
    let cx = chordal(atlas, x)?;
    let c1 = chordal(atlas, p1)?;
    let c2 = chordal(atlas, p2)?;
    let d1 = chordal_distance(cx, c1);
    let d2 = chordal_distance(cx, c2);
    if d1 < 1e-14 || d2 < 1e-14 {
        return Err(Error::Domain("phi0 evaluated at a vortex".into()));
    }
    Ok(d1.ln() - d2.ln())
}

/// Multi-vortex extension sum_i d_i ln|x~ - p_i~|; requires total degree
/// zero so the chordal and plane forms differ only by a constant.
pub fn phi0_multi(
    atlas: &ConformalAtlas,
    x: &SurfacePoint,
    config: &VortexConfiguration,
) -> Result<f64> {
    if config.total_degree() != 0 {
        return Err(Error::Input(
            "phi0_multi requires total degree zero".into(),
        ));
    }
    let cx = chordal(atlas, x)?;
    let mut acc = 0.0;
    for (p, &d) in config.positions.iter().zip(&config.degrees) {
        let cp = chordal(atlas, &SurfacePoint::plane_from(*p))?;
        let dist = chordal_distance(cx, cp);
        if dist < 1e-14 {
            return Err(Error::Domain("phi0 evaluated at a vortex".into()));
        }
        acc += d as f64 * dist.ln();
    }
    Ok(acc)
}

/// Plane-chart gradient of Phi_0 for a total-degree-zero configuration:
/// sum_i d_i (x - p_i)/|x - p_i|^2 (the chordal corrections cancel).
pub fn grad_phi0(config: &VortexConfiguration, x: Vec2) -> Result<Vec2> {
    let mut g = Vec2::ZERO;
    for (p, &d) in config.positions.iter().zip(&config.degrees) {
        let delta = x - *p;
        let r2 = delta.norm_sq();
        if r2 == 0.0 {
            return Err(Error::Domain("grad of Phi_0 at a vortex".into()));
        }
        g += delta * (d as f64 / r2);
    }
    Ok(g)
}

/// Line integral of <perp(grad Phi_0), tangent> along one straight
/// segment, 16-node Gauss-Legendre per panel. Panels are bisected until
/// short relative to their distance from the nearest vortex, where the
/// integrand steepens.
fn segment_flux(config: &VortexConfiguration, a: Vec2, b: Vec2) -> Result<f64> {
    fn panel(config: &VortexConfiguration, a: Vec2, b: Vec2, depth: u32) -> Result<f64> {
        let mid = (a + b) * 0.5;
        let dmin = config
            .positions
            .iter()
            .map(|p| (mid - *p).norm().min((a - *p).norm()).min((b - *p).norm()))
            .fold(f64::INFINITY, f64::min);
        if depth > 0 && (b - a).norm() > 0.25 * dmin {
            return Ok(panel(config, a, mid, depth - 1)? + panel(config, mid, b, depth - 1)?);
        }
        let tangent = b - a;
        let mut acc = 0.0;
        for &(node, weight) in &GAUSS_LEGENDRE_16 {
            let x = a + tangent * (0.5 * (node + 1.0));
            acc += weight * grad_phi0(config, x)?.perp().dot(tangent);
        }
        Ok(0.5 * acc)
    }
    panel(config, a, b, 40)
}

/// Deflect a polyline path around vortex exclusion disks, recursively
/// inserting detour points pushed to `radius` from the offending vortex.
fn route_segment(
    config: &VortexConfiguration,
    a: Vec2,
    b: Vec2,
    radius: f64,
    depth: u32,
    out: &mut Vec<Vec2>,
) {
    if depth > 0 {
        // Closest approach of the segment to any vortex.
        let mut worst: Option<(f64, Vec2, Vec2)> = None;
        for p in &config.positions {
            let ab = b - a;
            let t = if ab.norm_sq() == 0.0 {
                0.0
            } else {
                ((*p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0)
            };
            // Skip endpoint grazing: only interior approaches force detours.
            if t <= 1e-9 || t >= 1.0 - 1e-9 {
                continue;
            }
            let q = a + ab * t;
            let dist = (q - *p).norm();
            if dist < radius && worst.map_or(true, |(d, _, _)| dist < d) {
                worst = Some((dist, q, *p));
            }
        }
        if let Some((dist, q, p)) = worst {
            let dir = if dist > 1e-14 {
                (q - p) / dist
            } else {
                (b - a).perp() * (1.0 / (b - a).norm())
            };
            let m = p + dir * (1.5 * radius);
            route_segment(config, a, m, radius, depth - 1, out);
            route_segment(config, m, b, radius, depth - 1, out);
            return;
        }
    }
    out.push(b);
}

/// Path integral chi(x) = int_{x0}^{x} <perp(grad Phi_0), t> along a
/// straight path deflected around vortex exclusion disks; well-defined
/// modulo 2 pi.
pub fn chi(
    atlas: &ConformalAtlas,
    x0: &SurfacePoint,
    x: &SurfacePoint,
    config: &VortexConfiguration,
) -> Result<f64> {
    if config.total_degree() != 0 {
        return Err(Error::Input("chi requires total degree zero".into()));
    }
    let a = x0.plane(atlas)?;
    let b = x.plane(atlas)?;
    for p in &config.positions {
        if (b - *p).norm() < R_EXCLUSION || (a - *p).norm() < R_EXCLUSION {
            return Err(Error::Domain(
                "chi endpoint inside a vortex exclusion disk".into(),
            ));
        }
    }
    let mut path = vec![a];
    route_segment(config, a, b, R_EXCLUSION, 24, &mut path);
    let mut acc = 0.0;
    for w in path.windows(2) {
        acc += segment_flux(config, w[0], w[1])?;
    }
    Ok(acc)
}

/// Circulation of perp(grad Phi_0) around a closed polyline; equals
/// 2 pi times the total enclosed degree.
pub fn winding_of_loop(
    _atlas: &ConformalAtlas,
    loop_points: &[Vec2],
    config: &VortexConfiguration,
) -> Result<f64> {
    if loop_points.len() < 3 {
        return Err(Error::Input("winding loop needs at least 3 points".into()));
    }
    for v in loop_points {
        for p in &config.positions {
            if (*v - *p).norm() < 1e-12 {
                return Err(Error::Domain("loop passes through a vortex".into()));
            }
        }
    }
    let mut acc = 0.0;
    let m = loop_points.len();
    for k in 0..m {
        acc += segment_flux(config, loop_points[k], loop_points[(k + 1) % m])?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{reflect, solve_conformal_map, ProfileCurve};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere_atlas() -> ConformalAtlas {
        solve_conformal_map(ProfileCurve::sphere(), 1e-10).unwrap()
    }

    fn bumpy_atlas() -> ConformalAtlas {
        solve_conformal_map(ProfileCurve::bumpy(), 1e-10).unwrap()
    }

    fn random_config(rng: &mut ChaCha8Rng, m: usize) -> VortexConfiguration {
        loop {
            let positions: Vec<Vec2> = (0..m)
                .map(|_| {
                    let r = rng.gen_range(0.2..3.0_f64);
                    let t = rng.gen_range(-PI..PI);
                    Vec2::new(r * t.cos(), r * t.sin())
                })
                .collect();
            let degrees: Vec<i32> = (0..m)
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let config = VortexConfiguration::new(positions, degrees).unwrap();
            if config.min_separation() > 0.1 {
                return config;
            }
        }
    }

    #[test]
    fn energy_sphere_pair_closed_form() {
        let atlas = sphere_atlas();
        let config = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            vec![1, -1],
        )
        .unwrap();
        let w = renormalized_energy(&atlas, &config).unwrap();
        assert!((w - PI * 1.44_f64.ln()).abs() < 1e-8, "W = {w}");
    }

    #[test]
    fn energy_single_vortex_at_unit_radius() {
        let atlas = sphere_atlas();
        let config =
            VortexConfiguration::new(vec![Vec2::new(1.0, 0.0)], vec![1]).unwrap();
        let w = renormalized_energy(&atlas, &config).unwrap();
        assert!(w.abs() < 1e-9, "W = {w}");
    }

    #[test]
    fn energy_symmetric_under_swap() {
        let atlas = sphere_atlas();
        let a = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.3), Vec2::new(-1.0, 2.0)],
            vec![1, 1],
        )
        .unwrap();
        let b = VortexConfiguration::new(
            vec![Vec2::new(-1.0, 2.0), Vec2::new(0.5, 0.3)],
            vec![1, 1],
        )
        .unwrap();
        let wa = renormalized_energy(&atlas, &a).unwrap();
        let wb = renormalized_energy(&atlas, &b).unwrap();
        assert!((wa - wb).abs() < 1e-13);
    }

    #[test]
    fn energy_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for atlas in [sphere_atlas(), bumpy_atlas()] {
            for _ in 0..20 {
                let config = random_config(&mut rng, 4);
                let beta = rng.gen_range(-PI..PI);
                let w0 = renormalized_energy(&atlas, &config).unwrap();
                let w1 = renormalized_energy(&atlas, &config.rotated(beta)).unwrap();
                assert!((w0 - w1).abs() <= 1e-10 * (1.0 + w0.abs()));
            }
        }
    }

    #[test]
    fn energy_rejects_coincident() {
        assert_eq!(
            VortexConfiguration::new(
                vec![Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)],
                vec![1, -1]
            )
            .unwrap_err()
            .code(),
            "E_DOMAIN"
        );
    }

    #[test]
    fn grad_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for atlas in [sphere_atlas(), bumpy_atlas()] {
            for _ in 0..25 {
                let m = rng.gen_range(2..=6);
                let config = random_config(&mut rng, m);
                let i = rng.gen_range(0..m);
                let g = grad_renormalized_energy(&atlas, &config, i).unwrap();
                let h = 1e-6;
                let fd = |dx: f64, dy: f64| {
                    let mut c = config.clone();
                    c.positions[i] += Vec2::new(dx, dy);
                    renormalized_energy(&atlas, &c).unwrap()
                };
                let gx = (fd(h, 0.0) - fd(-h, 0.0)) / (2.0 * h);
                let gy = (fd(0.0, h) - fd(0.0, -h)) / (2.0 * h);
                let scale = 1.0 + g.norm();
                assert!((g.x - gx).abs() < 1e-5 * scale, "{} vs {gx}", g.x);
                assert!((g.y - gy).abs() < 1e-5 * scale, "{} vs {gy}", g.y);
            }
        }
    }

    #[test]
    fn grad_single_vortex_closed_form() {
        let atlas = sphere_atlas();
        let config =
            VortexConfiguration::new(vec![Vec2::new(1.0, 0.0)], vec![1]).unwrap();
        let g = grad_renormalized_energy(&atlas, &config, 0).unwrap();
        // grad f(1, 0) = (alpha' - 1) p / r^2 = (0 - 1)(1, 0) = (-1, 0).
        assert!((g.x + PI).abs() < 1e-8 && g.y.abs() < 1e-10, "{g:?}");
    }

    #[test]
    fn grad_antipodal_pair_is_radial() {
        let atlas = sphere_atlas();
        let config = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            vec![1, -1],
        )
        .unwrap();
        for i in 0..2 {
            let g = grad_renormalized_energy(&atlas, &config, i).unwrap();
            assert!(g.y.abs() < 1e-10, "vortex {i}: {g:?}");
        }
    }

    #[test]
    fn phi0_vanishes_on_symmetry_set() {
        let atlas = sphere_atlas();
        let p1 = SurfacePoint::Plane { x: 0.5, y: 0.0 };
        let p2 = reflect(&atlas, &p1).unwrap();
        // Equator points are chordally equidistant from mirror-image pairs.
        for k in 0..8 {
            let t = PI * k as f64 / 4.0;
            let x = SurfacePoint::Plane { x: t.cos(), y: t.sin() };
            let v = phi0(&atlas, &x, &p1, &p2).unwrap();
            assert!(v.abs() < 1e-9, "phi0 = {v}");
        }
        // And an obviously equidistant point for an x-axis pair.
        let x = SurfacePoint::Plane { x: 0.0, y: 0.7 };
        let pa = SurfacePoint::Plane { x: 0.4, y: 0.0 };
        let pb = SurfacePoint::Plane { x: -0.4, y: 0.0 };
        assert!(phi0(&atlas, &x, &pa, &pb).unwrap().abs() < 1e-12);
    }

    #[test]
    fn phi0_rejects_vortex_point() {
        let atlas = sphere_atlas();
        let p1 = SurfacePoint::Plane { x: 0.5, y: 0.0 };
        let p2 = SurfacePoint::Plane { x: 2.0, y: 0.0 };
        assert_eq!(
            phi0(&atlas, &p1.clone(), &p1, &p2).unwrap_err().code(),
            "E_DOMAIN"
        );
    }

    #[test]
    fn phi0_is_discretely_harmonic() {
        // Five-point Laplacian of Phi_0 in the plane chart vanishes to
        // truncation error away from the vortices (conformal invariance
        // makes the flat-plane Laplacian the right operator).
        let atlas = bumpy_atlas();
        let p1 = SurfacePoint::Plane { x: 0.4, y: 0.1 };
        let p2 = SurfacePoint::Plane { x: -1.5, y: 0.8 };
        let h = 1e-3;
        for &(x0, y0) in &[(1.2, 0.9), (-0.3, -0.8), (2.0, 1.0)] {
            let eval = |dx: f64, dy: f64| {
                phi0(
                    &atlas,
                    &SurfacePoint::Plane { x: x0 + dx, y: y0 + dy },
                    &p1,
                    &p2,
                )
                .unwrap()
            };
            let lap = (eval(h, 0.0) + eval(-h, 0.0) + eval(0.0, h) + eval(0.0, -h)
                - 4.0 * eval(0.0, 0.0))
                / (h * h);
            assert!(lap.abs() < 1e-4, "five-point residual {lap}");
        }
    }

    #[test]
    fn chi_basic_properties() {
        let atlas = sphere_atlas();
        let config = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            vec![1, -1],
        )
        .unwrap();
        let x0 = SurfacePoint::Plane { x: 0.0, y: -1.3 };

        // Empty path.
        assert_eq!(chi(&atlas, &x0, &x0, &config).unwrap(), 0.0);

        // Two homotopic routes: direct, and via a waypoint on the same side.
        let x = SurfacePoint::Plane { x: 1.2, y: -0.9 };
        let via = SurfacePoint::Plane { x: 0.7, y: -2.0 };
        let direct = chi(&atlas, &x0, &x, &config).unwrap();
        let detour = chi(&atlas, &x0, &via, &config).unwrap() + chi(&atlas, &via, &x, &config).unwrap();
        assert!((direct - detour).abs() < 1e-8, "{direct} vs {detour}");

        // A route passing on the far side of p1 differs by one winding.
        let far = SurfacePoint::Plane { x: 0.2, y: 0.9 };
        let around = chi(&atlas, &x0, &far, &config).unwrap()
            + chi(&atlas, &far, &x, &config).unwrap();
        let loops = (around - direct) / (2.0 * PI);
        assert!(
            (loops - loops.round()).abs() < 1e-6 && loops.round().abs() >= 1.0,
            "path difference {} not a nonzero multiple of 2 pi",
            around - direct
        );
    }

    #[test]
    fn chi_rejects_exclusion_disk() {
        let atlas = sphere_atlas();
        let config = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            vec![1, -1],
        )
        .unwrap();
        let x0 = SurfacePoint::Plane { x: 0.0, y: -1.3 };
        let near = SurfacePoint::Plane { x: 0.5 + 0.5 * R_EXCLUSION, y: 0.0 };
        assert_eq!(
            chi(&atlas, &x0, &near, &config).unwrap_err().code(),
            "E_DOMAIN"
        );
    }

    #[test]
    fn chi_symmetric_for_mirror_pair() {
        for atlas in [sphere_atlas(), bumpy_atlas()] {
            let p1 = SurfacePoint::Plane { x: 0.5, y: 0.0 };
            let p2 = reflect(&atlas, &p1).unwrap();
            let config = VortexConfiguration::new(
                vec![p1.plane(&atlas).unwrap(), p2.plane(&atlas).unwrap()],
                vec![1, -1],
            )
            .unwrap();
            // Base point on the equator (fixed by the reflection).
            let x0 = SurfacePoint::Plane { x: -1.0, y: 0.0 };
            for &(x, y) in &[(1.3, 0.6), (0.2, -0.9), (-0.6, 1.8)] {
                let p = SurfacePoint::Plane { x, y };
                let pm = reflect(&atlas, &p).unwrap();
                let a = chi(&atlas, &x0, &p, &config).unwrap();
                let b = chi(&atlas, &x0, &pm, &config).unwrap();
                let diff = crate::numerics::wrap_angle(a - b);
                assert!(diff.abs() < 1e-6, "chi asymmetry {diff}");
            }
        }
    }

    #[test]
    fn winding_counts_enclosed_degrees() {
        let atlas = sphere_atlas();
        let config = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            vec![1, -1],
        )
        .unwrap();
        let circle = |center: Vec2, radius: f64| -> Vec<Vec2> {
            (0..64)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / 64.0;
                    center + Vec2::new(radius * t.cos(), radius * t.sin())
                })
                .collect()
        };
        let w1 = winding_of_loop(&atlas, &circle(Vec2::new(0.5, 0.0), 0.1), &config).unwrap();
        assert!((w1 - 2.0 * PI).abs() < 1e-6, "w1 = {w1}");
        let w2 = winding_of_loop(&atlas, &circle(Vec2::new(2.0, 0.0), 0.1), &config).unwrap();
        assert!((w2 + 2.0 * PI).abs() < 1e-6, "w2 = {w2}");
        let w0 = winding_of_loop(&atlas, &circle(Vec2::new(0.0, -2.0), 0.3), &config).unwrap();
        assert!(w0.abs() < 1e-8, "w0 = {w0}");
    }

    #[test]
    fn winding_random_loops_multi_vortex() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let atlas = sphere_atlas();
        // Total degree zero, four vortices.
        let config = VortexConfiguration::new(
            vec![
                Vec2::new(0.5, 0.0),
                Vec2::new(0.0, 0.7),
                Vec2::new(-1.2, 0.2),
                Vec2::new(0.3, -1.5),
            ],
            vec![1, 1, -1, -1],
        )
        .unwrap();
        for _ in 0..20 {
            let center = Vec2::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let radius = rng.gen_range(0.2..1.2_f64);
            let pts: Vec<Vec2> = (0..96)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / 96.0;
                    center + Vec2::new(radius * t.cos(), radius * t.sin())
                })
                .collect();
            if config
                .positions
                .iter()
                .any(|p| ((*p - center).norm() - radius).abs() < 0.05)
            {
                continue; // vortex too close to the loop for clean quadrature
            }
            let enclosed: i32 = config
                .positions
                .iter()
                .zip(&config.degrees)
                .filter(|(p, _)| (**p - center).norm() < radius)
                .map(|(_, &d)| d)
                .sum();
            let w = winding_of_loop(&atlas, &pts, &config).unwrap();
            assert!(
                (w - 2.0 * PI * enclosed as f64).abs() < 1e-6,
                "winding {w} vs enclosed {enclosed}"
            );
        }
    }

    #[test]
    fn phi0_multi_requires_degree_zero() {
        let atlas = sphere_atlas();
        let bad = VortexConfiguration::new(vec![Vec2::new(1.0, 0.0)], vec![1]).unwrap();
        let x = SurfacePoint::Plane { x: 0.2, y: 0.2 };
        assert_eq!(
            phi0_multi(&atlas, &x, &bad).unwrap_err().code(),
            "E_INPUT"
        );
        // Pairwise phi0 is the two-vortex case of the extension.
        let p1 = SurfacePoint::Plane { x: 0.5, y: 0.0 };
        let p2 = SurfacePoint::Plane { x: 2.0, y: 0.0 };
        let pair = VortexConfiguration::new(
            vec![Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)],
            vec![1, -1],
        )
        .unwrap();
        let a = phi0(&atlas, &x, &p1, &p2).unwrap();
        let b = phi0_multi(&atlas, &x, &pair).unwrap();
        assert!((a - b).abs() < 1e-13);
    }
}
