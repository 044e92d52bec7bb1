//! Vortex detection in a discrete complex field: connected low-modulus
//! components, winding-number degrees, and comparison of detected orbits
//! against ring predictions.

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::numerics::wrap_angle;
use crate::rings::RingSolution;
use std::f64::consts::TAU;

/// One detected vortex.
#[derive(Debug, Clone)]
pub struct DetectedVortex {
    /// Polar angle of the |u|-deficit-weighted centroid.
    pub theta: f64,
    /// Arc-length latitude of the centroid.
    pub s: f64,
    /// Geodesic radius of the smallest covering ball around the centroid.
    pub radius: f64,
    pub degree: i32,
    /// Phase-unwrapping defect |sum - 2 pi degree| of the covering loop.
    pub defect: f64,
}

/// Degree of u along a closed loop of grid nodes (in traversal order):
/// phase increments wrapped into (-pi, pi], summed, divided by 2 pi.
/// Returns the nearest integer and the unwrap defect.
pub fn degree(field: &ComplexField, loop_nodes: &[(usize, usize)]) -> Result<(i32, f64)> {
    if loop_nodes.len() < 3 {
        return Err(Error::Input("degree loop needs at least 3 nodes".into()));
    }
    let mut sum = 0.0;
    let mut prev = field.at(loop_nodes[loop_nodes.len() - 1].0, loop_nodes[loop_nodes.len() - 1].1);
    for &(k, j) in loop_nodes {
        let cur = field.at(k, j);
        if cur.norm() == 0.0 || prev.norm() == 0.0 {
            return Err(Error::Domain("zero modulus on degree loop".into()));
        }
        sum += wrap_angle(cur.arg() - prev.arg());
        prev = cur;
    }
    let d = (sum / TAU).round();
    Ok((d as i32, (sum - TAU * d).abs()))
}

/// Degree along the full latitude circle s = s_k, traversed with
/// increasing theta (encloses the s < s_k cap).
pub fn degree_at_latitude(field: &ComplexField, k: usize) -> Result<(i32, f64)> {
    let nodes: Vec<(usize, usize)> = (0..field.grid.n_theta).map(|j| (k, j)).collect();
    degree(field, &nodes)
}

/// Rectangle loop in index space [k_lo, k_hi] x [j_lo, j_lo + width],
/// theta-periodic, traversed clockwise in the (theta, s) chart so that an
/// enclosed plane-chart vortex of degree d reports +d.
fn rectangle_loop(
    n_theta: usize,
    k_lo: usize,
    k_hi: usize,
    j_lo: usize,
    width: usize,
) -> Vec<(usize, usize)> {
    let mut nodes = Vec::new();
    // Top row, theta increasing.
    for t in 0..=width {
        nodes.push((k_hi, (j_lo + t) % n_theta));
    }
    // Right column, s decreasing.
    for k in (k_lo..k_hi).rev() {
        nodes.push((k, (j_lo + width) % n_theta));
    }
    // Bottom row, theta decreasing.
    for t in (0..width).rev() {
        nodes.push((k_lo, (j_lo + t) % n_theta));
    }
    // Left column, s increasing.
    for k in k_lo + 1..k_hi {
        nodes.push((k, j_lo));
    }
    nodes
}

/// Connected components of {|u| < threshold}, 8-neighbor, theta-periodic.
fn components(field: &ComplexField, threshold: f64) -> Vec<Vec<(usize, usize)>> {
    let grid = &field.grid;
    let (nt, ns) = (grid.n_theta, grid.n_s);
    let mut visited = vec![false; grid.len()];
    let mut out = Vec::new();
    for k0 in 0..ns {
        for j0 in 0..nt {
            let i0 = grid.index(k0, j0);
            if visited[i0] || field.values[i0].norm() >= threshold {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![(k0, j0)];
            visited[i0] = true;
            while let Some((k, j)) = stack.pop() {
                comp.push((k, j));
                for dk in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if dk == 0 && dj == 0 {
                            continue;
                        }
                        let kk = k as i64 + dk;
                        if kk < 0 || kk >= ns as i64 {
                            continue;
                        }
                        let jj = ((j as i64 + dj).rem_euclid(nt as i64)) as usize;
                        let i = grid.index(kk as usize, jj);
                        if !visited[i] && field.values[i].norm() < threshold {
                            visited[i] = true;
                            stack.push((kk as usize, jj));
                        }
                    }
                }
            }
            out.push(comp);
        }
    }
    out
}

/// Detect vortices as low-modulus components wrapped in covering balls.
pub fn detect_vortices(field: &ComplexField, threshold: f64) -> Result<Vec<DetectedVortex>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Input(format!(
            "detection threshold {threshold} outside (0, 1)"
        )));
    }
    if !field.is_finite() {
        return Err(Error::Input("non-finite field values".into()));
    }
    let grid = &field.grid;
    let (nt, ns) = (grid.n_theta, grid.n_s);
    let mut out = Vec::new();
    for comp in components(field, threshold) {
        if comp.iter().any(|&(k, _)| k == 0 || k == ns - 1) {
            return Err(Error::Detection(
                "low-modulus component touches a pole row".into(),
            ));
        }
        // Angular extent: find the largest free gap in occupied columns.
        let mut cols = vec![false; nt];
        for &(_, j) in &comp {
            cols[j] = true;
        }
        let occupied: Vec<usize> = (0..nt).filter(|&j| cols[j]).collect();
        let mut best_gap = 0usize;
        let mut gap_start = 0usize;
        for (i, &j) in occupied.iter().enumerate() {
            let next = occupied[(i + 1) % occupied.len()];
            let gap = (next + nt - j - 1) % nt;
            if gap > best_gap {
                best_gap = gap;
                gap_start = j;
            }
        }
        if occupied.len() == nt || best_gap < 2 {
            return Err(Error::Detection(
                "low-modulus component encircles the rotation axis".into(),
            ));
        }
        // Column range [j_lo .. j_lo + width] (mod nt) covering the
        // component: everything outside the largest gap.
        let j_lo = (gap_start + best_gap + 1) % nt;
        let width = nt - best_gap - 1;
        let k_lo = comp.iter().map(|&(k, _)| k).min().unwrap();
        let k_hi = comp.iter().map(|&(k, _)| k).max().unwrap();

        // Modulus-deficit-weighted centroid (circular mean in theta).
        let (mut cx, mut cy, mut cs, mut wsum) = (0.0, 0.0, 0.0, 0.0);
        for &(k, j) in &comp {
            let w = threshold - field.at(k, j).norm();
            let t = grid.theta(j);
            cx += w * t.cos();
            cy += w * t.sin();
            cs += w * grid.s(k);
            wsum += w;
        }
        let theta_c = cy.atan2(cx).rem_euclid(TAU);
        let s_c = cs / wsum;
        let alpha_c = field.grid.alpha_node[((s_c / grid.d_s - 0.5).round().max(0.0) as usize).min(ns - 1)];
        let radius = comp
            .iter()
            .map(|&(k, j)| {
                let dx = alpha_c * wrap_angle(grid.theta(j) - theta_c);
                let dy = grid.s(k) - s_c;
                (dx * dx + dy * dy).sqrt()
            })
            .fold(0.0, f64::max)
            + 0.5 * (grid.d_s * grid.d_s + (alpha_c * grid.d_theta).powi(2)).sqrt();

        // Degree on the covering rectangle, one cell outside the component.
        let k_lo_loop = k_lo - 1;
        let k_hi_loop = k_hi + 1;
        let j_lo_loop = (j_lo + nt - 1) % nt;
        let width_loop = (width + 2).min(nt - 1);
        let loop_nodes = rectangle_loop(nt, k_lo_loop, k_hi_loop, j_lo_loop, width_loop);
        if loop_nodes
            .iter()
            .any(|&(k, j)| field.at(k, j).norm() < threshold)
        {
            return Err(Error::Detection(
                "covering loop dips below the modulus threshold (components too close)".into(),
            ));
        }
        let (d, defect) = degree(field, &loop_nodes)?;
        out.push(DetectedVortex { theta: theta_c, s: s_c, radius, degree: d, defect });
    }
    out.sort_by(|a, b| (a.s, a.theta).partial_cmp(&(b.s, b.theta)).unwrap());
    Ok(out)
}

/// Comparison of detected vortices against a ring prediction.
#[derive(Debug, Clone)]
pub struct OrbitReport {
    pub n: usize,
    /// Mean latitude of the degree +1 group.
    pub s_plus: f64,
    /// Mean latitude of the degree -1 group.
    pub s_minus: f64,
    /// Worst in-group latitude spread.
    pub spread: f64,
    /// Worst deviation of angular spacing from 2 pi / n within a group.
    pub spacing_defect: f64,
    /// |s_plus - ring latitude of the +1 ring|.
    pub error_plus: f64,
    /// |s_minus - ring latitude of the -1 ring|.
    pub error_minus: f64,
}

impl OrbitReport {
    pub fn render(&self) -> String {
        format!(
            "n = {}\ns_plus = {:.16e}\ns_minus = {:.16e}\nspread = {:.16e}\nspacing_defect = {:.16e}\nerror_plus = {:.16e}\nerror_minus = {:.16e}\n",
            self.n, self.s_plus, self.s_minus, self.spread, self.spacing_defect,
            self.error_plus, self.error_minus
        )
    }
}

/// Group detected vortices by degree sign and compare latitudes and
/// angular spacings with the ring solution.
pub fn compare_orbits(detected: &[DetectedVortex], ring: &RingSolution) -> Result<OrbitReport> {
    let plus: Vec<&DetectedVortex> = detected.iter().filter(|v| v.degree == 1).collect();
    let minus: Vec<&DetectedVortex> = detected.iter().filter(|v| v.degree == -1).collect();
    if plus.len() != ring.n || minus.len() != ring.n || detected.len() != 2 * ring.n {
        return Err(Error::Detection(format!(
            "expected {} vortices of each degree, found {} (+1) and {} (-1) of {}",
            ring.n,
            plus.len(),
            minus.len(),
            detected.len()
        )));
    }
    let group_stats = |group: &[&DetectedVortex]| -> (f64, f64, f64) {
        let mean_s = group.iter().map(|v| v.s).sum::<f64>() / group.len() as f64;
        let spread = group
            .iter()
            .map(|v| (v.s - mean_s).abs())
            .fold(0.0, f64::max);
        let mut angles: Vec<f64> = group.iter().map(|v| v.theta).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = angles.len();
        let mut spacing_defect = 0.0_f64;
        if n > 1 {
            for i in 0..n {
                let gap = if i + 1 < n {
                    angles[i + 1] - angles[i]
                } else {
                    angles[0] + TAU - angles[n - 1]
                };
                spacing_defect = spacing_defect.max((gap - TAU / n as f64).abs());
            }
        }
        (mean_s, spread, spacing_defect)
    };
    let (s_plus, spread_p, spacing_p) = group_stats(&plus);
    let (s_minus, spread_m, spacing_m) = group_stats(&minus);
    // Ring 1 carries the +1 degrees.
    let (ring_plus, ring_minus) = (ring.s1, ring.s2);
    Ok(OrbitReport {
        n: ring.n,
        s_plus,
        s_minus,
        spread: spread_p.max(spread_m),
        spacing_defect: spacing_p.max(spacing_m),
        error_plus: (s_plus - ring_plus).abs(),
        error_minus: (s_minus - ring_minus).abs(),
    })
}
