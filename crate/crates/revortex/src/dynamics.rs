//! The generalized point-vortex flow in the plane chart: right-hand side,
//! fixed-step RK4 integration and conserved-quantity monitoring.

use crate::error::{Error, Result};
use crate::renorm::{grad_renormalized_energy, renormalized_energy, VortexConfiguration};
use crate::surface::{ConformalAtlas, SurfacePoint};
use crate::vec2::Vec2;
use std::f64::consts::PI;

/// Collision threshold on pairwise plane distance.
pub const DELTA_COLLISION: f64 = 1e-6;
/// Pole guard: plane radii must stay inside [R_MIN, 1 / R_MIN].
pub const R_MIN: f64 = 1e-4;

/// Integrated vortex path with per-step conserved quantities.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<VortexConfiguration>,
    /// (W, M) at each recorded time.
    pub invariant_log: Vec<(f64, f64)>,
    pub status: TrajectoryStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// The flow left the admissible region; the trajectory is truncated.
    Aborted(String),
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

fn check_admissible(config: &VortexConfiguration) -> Result<()> {
    for p in &config.positions {
        if !p.is_finite() {
            return Err(Error::Dynamics("non-finite vortex position".into()));
        }
        let r = p.norm();
        if !(R_MIN..=1.0 / R_MIN).contains(&r) {
            return Err(Error::Dynamics(format!(
                "vortex too close to a pole (plane radius {r:e})"
            )));
        }
    }
    if config.len() > 1 && config.min_separation() < DELTA_COLLISION {
        return Err(Error::Dynamics(format!(
            "vortex collision (separation {:e})",
            config.min_separation()
        )));
    }
    Ok(())
}

/// Velocities of all vortices. With the quarter turn perp = (x, y) ->
/// (-y, x) used throughout this crate,
///
///   d_i p_i' = -(r_i^2/a_i^2) [ (1 - a_i') perp(p_i)/r_i^2
///                + 2 sum_{j != i} d_i d_j perp(p_i - p_j)/|p_i - p_j|^2 ],
///
/// which is the Hamiltonian flow of W for the surface measure: p_i' =
/// (1/pi) e^{-2f(p_i)} perp(grad_i W) / d_i (asserted in the tests).
pub fn pv_rhs(atlas: &ConformalAtlas, config: &VortexConfiguration) -> Result<Vec<Vec2>> {
    check_admissible(config)?;
    let mut out = Vec::with_capacity(config.len());
    for i in 0..config.len() {
        let pi = config.positions[i];
        let r2 = pi.norm_sq();
        let (a, ap) = atlas.alpha_at_radius(r2.sqrt());
        let di = config.degrees[i] as f64;
        let mut bracket = pi.perp() * ((1.0 - ap) / r2);
        for j in 0..config.len() {
            if j != i {
                let delta = pi - config.positions[j];
                let dj = config.degrees[j] as f64;
                bracket += delta.perp() * (2.0 * di * dj / delta.norm_sq());
            }
        }
        out.push(bracket * (-(r2 / (a * a)) / di));
    }
    Ok(out)
}

/// Conserved quantities of a configuration: the renormalized energy W and
/// the rotational moment M = sum_i d_i A(r_i) with A the geodesic cap area.
pub fn invariants(atlas: &ConformalAtlas, config: &VortexConfiguration) -> Result<(f64, f64)> {
    let w = renormalized_energy(atlas, config)?;
    let mut m = 0.0;
    for (p, &d) in config.positions.iter().zip(&config.degrees) {
        m += d as f64 * atlas.cap_area(p.norm())?;
    }
    Ok((w, m))
}

/// Velocity from the Hamiltonian form, for cross-checking pv_rhs:
/// (1/pi) e^{-2f(p_i)} perp(grad_i W) / d_i.
pub fn hamiltonian_rhs(atlas: &ConformalAtlas, config: &VortexConfiguration) -> Result<Vec<Vec2>> {
    let mut out = Vec::with_capacity(config.len());
    for i in 0..config.len() {
        let pi = config.positions[i];
        let f = atlas.conformal_factor(&SurfacePoint::plane_from(pi))?;
        let g = grad_renormalized_energy(atlas, config, i)?;
        out.push(g.perp() * ((-2.0 * f).exp() / (PI * config.degrees[i] as f64)));
    }
    Ok(out)
}

/// Integrate the point-vortex flow with classic fixed-step RK4, recording
/// every accepted step. On a collision or pole event the truncated
/// trajectory is returned with an `Aborted` status.
pub fn integrate(
    atlas: &ConformalAtlas,
    config: &VortexConfiguration,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::Input(format!(
            "integrate: need positive t_end and dt (got {t_end}, {dt})"
        )));
    }
    check_admissible(config)?;
    let steps = (t_end / dt).round().max(1.0) as usize;
    let dt = t_end / steps as f64;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut invariant_log = Vec::with_capacity(steps + 1);
    let mut state = config.clone();
    times.push(0.0);
    invariant_log.push(invariants(atlas, &state)?);
    states.push(state.clone());

    let eval = |positions: &[Vec2]| -> Result<Vec<Vec2>> {
        let probe = VortexConfiguration {
            positions: positions.to_vec(),
            degrees: config.degrees.clone(),
        };
        pv_rhs(atlas, &probe)
    };
    let shifted = |p: &[Vec2], k: &[Vec2], h: f64| -> Vec<Vec2> {
        p.iter().zip(k).map(|(pi, ki)| *pi + *ki * h).collect()
    };

    for step in 0..steps {
        let attempt = (|| -> Result<Vec<Vec2>> {
            let p = &state.positions;
            let k1 = eval(p)?;
            let k2 = eval(&shifted(p, &k1, 0.5 * dt))?;
            let k3 = eval(&shifted(p, &k2, 0.5 * dt))?;
            let k4 = eval(&shifted(p, &k3, dt))?;
            Ok(p.iter()
                .enumerate()
                .map(|(i, pi)| *pi + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
                .collect())
        })();
        let next = match attempt {
            Ok(next) => next,
            Err(e) => {
                return Ok(Trajectory {
                    times,
                    states,
                    invariant_log,
                    status: TrajectoryStatus::Aborted(e.to_string()),
                })
            }
        };
        state = VortexConfiguration { positions: next, degrees: state.degrees };
        if let Err(e) = check_admissible(&state) {
            return Ok(Trajectory {
                times,
                states,
                invariant_log,
                status: TrajectoryStatus::Aborted(e.to_string()),
            });
        }
        times.push(dt * (step + 1) as f64);
        invariant_log.push(invariants(atlas, &state)?);
        states.push(state.clone());
    }
    Ok(Trajectory { times, states, invariant_log, status: TrajectoryStatus::Completed })
}
