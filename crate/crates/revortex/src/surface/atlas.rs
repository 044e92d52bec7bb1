//! Shooting solver for the conformal latitude map S(phi) and queries
//! derived from it: conformal factor, its gradient and geodesic cap areas.
//!
//! The map S: [0, pi] -> [0, l] satisfies S'(phi) sin(phi) = alpha(S(phi)).
//! Substituting t = ln tan(phi/2) turns this into the autonomous equation
//! dS/dt = alpha(S), which is regular on the whole line; the endpoints are
//! its fixed points. The shooting constant c fixes the dilation freedom of
//! the plane chart through the near-pole behaviour S ~ c tan(phi/2); it is
//! pinned by the midpoint condition S(pi/2) = l/2, which makes the chart of
//! a longitudinally symmetric surface satisfy S(pi - phi) = l - S(phi), so
//! the reflection s -> l - s becomes the inversion r -> 1/r.

use super::{ProfileCurve, SurfacePoint};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, brent_root, CubicHermite};
use crate::vec2::Vec2;
use std::f64::consts::PI;

const PHI_CUT: f64 = 1e-7;
const NODES: usize = 4096;
const SERIES_RADIUS: f64 = 1e-4;

/// Solved conformal parametrization of a surface of revolution.
///
/// Immutable after construction; all queries are pure and the atlas can be
/// shared freely across threads.
#[derive(Debug)]
pub struct ConformalAtlas {
    profile: ProfileCurve,
    /// Shooting constant of the near-pole asymptotics S ~ c tan(phi/2).
    pub c: f64,
    /// Tolerance the solve was verified against.
    pub tol: f64,
    s_of_phi: CubicHermite,
    /// Even series ln(alpha(S)/r) = f0 + f2 r^2 + f4 r^4 + ... near r = 0.
    f_series: [f64; 3],
    total_area: f64,
}

/// Integrate dS/dt = alpha(S) with classic RK4 from (t, s) over `span`
/// using `steps` equal steps.
fn rk4_advance(profile: &ProfileCurve, s: f64, span: f64, steps: usize) -> f64 {
    let h = span / steps as f64;
    let mut s = s;
    for _ in 0..steps {
        let k1 = profile.alpha(s);
        let k2 = profile.alpha(s + 0.5 * h * k1);
        let k3 = profile.alpha(s + 0.5 * h * k2);
        let k4 = profile.alpha(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s = s.clamp(0.0, profile.l);
    }
    s
}

/// Construct the conformal atlas for a validated profile by shooting on c.
pub fn solve_conformal_map(profile: ProfileCurve, tol: f64) -> Result<ConformalAtlas> {
    if !(tol > 0.0) {
        return Err(Error::Solver(format!("unreachable solve tolerance {tol}")));
    }
    if profile.alpha(0.0).abs() > 1e-8 || profile.alpha(profile.l).abs() > 1e-8 {
        return Err(Error::Input(
            "profile does not close at the poles; validate it first".into(),
        ));
    }
    let l = profile.l;
    let t0 = (PHI_CUT / 2.0).tan().ln();
    let half_steps = 8192;

    // Shooting residual at the midpoint phi = pi/2 (t = 0).
    let shoot = |c: f64| -> f64 {
        let s_start = (c * (PHI_CUT / 2.0).tan()).min(0.5 * l);
        rk4_advance(&profile, s_start, -t0, half_steps) - 0.5 * l
    };

    // Geometric bracket expansion, then Brent in log(c).
    let (mut lo, mut hi) = (1e-3, 1e3);
    let mut expansions = 0;
    while shoot(lo) > 0.0 {
        lo /= 10.0;
        expansions += 1;
        if expansions > 10 {
            return Err(Error::Solver("shooting bracket not found (lower end)".into()));
        }
    }
    while shoot(hi) < 0.0 {
        hi *= 10.0;
        expansions += 1;
        if expansions > 10 {
            return Err(Error::Solver("shooting bracket not found (upper end)".into()));
        }
    }
    let log_c = brent_root(|x: f64| shoot(x.exp()), lo.ln(), hi.ln(), 1e-14, 200)?;
    let c = log_c.exp();

    // March once across the full range, sampling S at cosine-spaced nodes.
    let mut phis = Vec::with_capacity(NODES + 1);
    let mut svals = Vec::with_capacity(NODES + 1);
    let mut dvals = Vec::with_capacity(NODES + 1);
    let mut t_cur = t0;
    let mut s_cur = c * (PHI_CUT / 2.0).tan();
    let t_end = -t0;
    let h_max = 2.0 * t_end / (2 * half_steps) as f64;
    let advance_to = |t_target: f64, s: f64, t: f64| -> f64 {
        let span = t_target - t;
        if span <= 0.0 {
            return s;
        }
        let steps = (span / h_max).ceil().max(1.0) as usize;
        rk4_advance(&profile, s, span, steps)
    };
    for k in 0..=NODES {
        let phi = 0.5 * PI * (1.0 - (PI * k as f64 / NODES as f64).cos());
        let (s_k, d_k) = if phi <= PHI_CUT {
            // Near-pole asymptotics; exact for the leading behaviour.
            let s = c * (phi / 2.0).tan();
            let d = if phi == 0.0 {
                0.5 * c
            } else {
                profile.alpha(s) / phi.sin()
            };
            (s, d)
        } else if phi < PI - PHI_CUT {
            let t_target = (phi / 2.0).tan().ln();
            s_cur = advance_to(t_target, s_cur, t_cur);
            t_cur = t_target;
            (s_cur, profile.alpha(s_cur) / phi.sin())
        } else {
            // Integrate to the cut and extrapolate with the far-pole
            // asymptotics l - S ~ k tan((pi - phi)/2).
            s_cur = advance_to(t_end, s_cur, t_cur);
            t_cur = t_end;
            let k_end = (l - s_cur) / (PHI_CUT / 2.0).tan();
            if phi >= PI {
                (l, 0.5 * k_end)
            } else {
                let s = l - k_end * ((PI - phi) / 2.0).tan();
                (s, profile.alpha(s) / phi.sin())
            }
        };
        phis.push(phi);
        svals.push(s_k);
        dvals.push(d_k);
    }

    // Endpoint residual: the autonomous form reaches l only asymptotically,
    // so compare the extrapolated value S(pi - phi0) + alpha(S) against l.
    let s_far = svals[NODES - 1];
    let l_est = s_far + profile.alpha(s_far);
    if (l_est - l).abs() > tol {
        return Err(Error::Solver(format!(
            "conformal map does not reach the far pole: |S(pi) - l| = {:e} > {tol:e}",
            (l_est - l).abs()
        )));
    }
    // The cosine-spaced nodes come in mirror pairs phi_{N-k} = pi - phi_k;
    // averaging enforces S(pi - phi) = l - S(phi) exactly on symmetric
    // surfaces, so mirror-pair queries cancel to machine precision.
    if profile.symmetric {
        for k in 0..=NODES / 2 {
            let m = NODES - k;
            let s_sym = 0.5 * (svals[k] + l - svals[m]);
            svals[k] = s_sym;
            svals[m] = l - s_sym;
            let d_sym = 0.5 * (dvals[k] + dvals[m]);
            dvals[k] = d_sym;
            dvals[m] = d_sym;
        }
    }
    if svals.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Solver("non-monotone S(phi) detected".into()));
    }
    svals[NODES] = l;

    let s_of_phi = CubicHermite::new(phis, svals, dvals)?;
    let total_area = profile.total_area();
    let mut atlas = ConformalAtlas {
        profile,
        c,
        tol,
        s_of_phi,
        f_series: [c.ln(), 0.0, 0.0],
        total_area,
    };
    // Fit the r^2 and r^4 series coefficients from the direct branch.
    let (ra, rb) = (0.02, 0.04);
    let ga = atlas.conformal_factor_direct(ra) - atlas.f_series[0];
    let gb = atlas.conformal_factor_direct(rb) - atlas.f_series[0];
    let det = ra * ra * rb * rb * (rb * rb - ra * ra);
    atlas.f_series[1] = (ga * rb.powi(4) - gb * ra.powi(4)) / det;
    atlas.f_series[2] = (gb * ra * ra - ga * rb * rb) / det;
    Ok(atlas)
}

impl ConformalAtlas {
    pub fn profile(&self) -> &ProfileCurve {
        &self.profile
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// S(phi), clamped to [0, pi].
    pub fn s_of_phi(&self, phi: f64) -> f64 {
        self.s_of_phi.eval(phi.clamp(0.0, PI))
    }

    /// dS/dphi.
    pub fn s_prime_of_phi(&self, phi: f64) -> f64 {
        self.s_of_phi.eval_deriv(phi.clamp(0.0, PI))
    }

    /// Inverse latitude map phi(s).
    pub fn phi_of_s(&self, s: f64) -> Result<f64> {
        self.s_of_phi.invert_monotone(s.clamp(0.0, self.profile.l))
    }

    pub fn radius_of_phi(&self, phi: f64) -> f64 {
        (phi / 2.0).tan()
    }

    pub fn phi_of_radius(&self, r: f64) -> f64 {
        2.0 * r.atan()
    }

    pub fn s_of_radius(&self, r: f64) -> f64 {
        self.s_of_phi(self.phi_of_radius(r))
    }

    pub fn radius_of_s(&self, s: f64) -> Result<f64> {
        Ok(self.radius_of_phi(self.phi_of_s(s)?))
    }

    /// alpha and alpha' evaluated at the latitude of plane radius r.
    pub fn alpha_at_radius(&self, r: f64) -> (f64, f64) {
        let s = self.s_of_radius(r);
        (self.profile.alpha(s), self.profile.alpha_prime(s))
    }

    /// Direct branch of the conformal factor, f = ln(alpha(S(phi)) / r).
    pub fn conformal_factor_direct(&self, r: f64) -> f64 {
        let s = self.s_of_radius(r);
        (self.profile.alpha(s) / r).ln()
    }

    /// Series branch near the chart origin.
    pub fn conformal_factor_series(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.f_series[0] + r2 * (self.f_series[1] + r2 * self.f_series[2])
    }

    /// Conformal factor at plane radius r, with the series branch taking
    /// over below r = 1e-4 (the direct form is 0/0 at the origin).
    pub fn conformal_factor_at_radius(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("conformal factor: bad radius {r}")));
        }
        if !r.is_finite() {
            return Err(Error::Domain(
                "conformal factor undefined at the pole s = l".into(),
            ));
        }
        if r < SERIES_RADIUS {
            Ok(self.conformal_factor_series(r))
        } else {
            Ok(self.conformal_factor_direct(r))
        }
    }

    /// Conformal factor at a surface point.
    pub fn conformal_factor(&self, p: &SurfacePoint) -> Result<f64> {
        self.conformal_factor_at_radius(p.radius(self)?)
    }

    /// Gradient of the conformal factor in plane coordinates,
    /// (alpha'(S(phi)) - 1) p / r^2.
    pub fn grad_conformal_factor(&self, p: &SurfacePoint) -> Result<Vec2> {
        let v = p.plane(self)?;
        let r2 = v.norm_sq();
        if r2 == 0.0 {
            return Err(Error::Domain(
                "grad of conformal factor is singular at r = 0".into(),
            ));
        }
        let (_, ap) = self.alpha_at_radius(r2.sqrt());
        Ok(v * ((ap - 1.0) / r2))
    }

    /// Area of the geodesic cap {|p| <= r} under the surface measure.
    pub fn cap_area(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Input(format!("cap_area: negative radius {r}")));
        }
        let s_r = if r.is_infinite() {
            self.profile.l
        } else {
            self.s_of_radius(r)
        };
        Ok(adaptive_simpson(
            &|s| 2.0 * PI * self.profile.alpha(s),
            0.0,
            s_r,
            1e-12,
        ))
    }

    /// Complement area computed from the l-side of the profile.
    pub fn cap_area_complement(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Input(format!("cap_area: negative radius {r}")));
        }
        let s_r = if r.is_infinite() {
            self.profile.l
        } else {
            self.s_of_radius(r)
        };
        Ok(adaptive_simpson(
            &|s| 2.0 * PI * self.profile.alpha(s),
            s_r,
            self.profile.l,
            1e-12,
        ))
    }

    /// Worst residual of the defining relation S' sin(phi) = alpha(S) over
    /// `n` interior collocation points.
    pub fn collocation_residual(&self, n: usize) -> f64 {
        (1..n)
            .map(|k| {
                let phi = PI * k as f64 / n as f64;
                (self.s_prime_of_phi(phi) * phi.sin() - self.profile.alpha(self.s_of_phi(phi)))
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}
