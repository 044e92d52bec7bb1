//! Discretization of complex order-parameter fields on a surface of
//! revolution, in the (theta, s) chart.
//!
//! theta nodes are uniform on [0, 2 pi); s nodes are staggered,
//! s_k = (k + 1/2) l / N_s, so the poles are never grid nodes. The metric
//! enters through the latitude radius alpha(s): node area weights
//! alpha(s_k) dtheta ds and s-derivative face weights alpha(k ds), which
//! vanish at the poles and close the discrete operators there naturally.

mod ansatz;
mod ops;

pub use ansatz::build_ansatz;
pub use ops::{gl_energy, gl_gradient, gp_residual, laplacian, momentum, momentum_gradient};

use crate::error::{Error, Result};
use crate::surface::ConformalAtlas;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::sync::Arc;

/// Tensor grid over the (theta, s) chart with precomputed metric weights.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n_theta: usize,
    pub n_s: usize,
    pub l: f64,
    pub d_theta: f64,
    pub d_s: f64,
    pub symmetric: bool,
    /// alpha at the staggered nodes s_k.
    pub alpha_node: Vec<f64>,
    /// d alpha/ds at the staggered nodes.
    pub alpha_prime_node: Vec<f64>,
    /// alpha at the cell faces k * ds, k = 0..N_s; zero at both poles.
    pub alpha_face: Vec<f64>,
    /// Plane-chart radius of each latitude s_k.
    pub radius_node: Vec<f64>,
}

impl Grid {
    pub fn new(atlas: &ConformalAtlas, n_theta: usize, n_s: usize) -> Result<Arc<Grid>> {
        if n_theta < 4 || n_s < 4 {
            return Err(Error::Input(format!(
                "grid too small ({n_theta} x {n_s}); need at least 4 x 4"
            )));
        }
        let profile = atlas.profile();
        let l = profile.l;
        let d_s = l / n_s as f64;
        let mut alpha_node: Vec<f64> = (0..n_s)
            .map(|k| profile.alpha((k as f64 + 0.5) * d_s))
            .collect();
        let mut alpha_prime_node: Vec<f64> = (0..n_s)
            .map(|k| profile.alpha_prime((k as f64 + 0.5) * d_s))
            .collect();
        let mut alpha_face: Vec<f64> = (0..=n_s).map(|k| profile.alpha(k as f64 * d_s)).collect();
        // Pole closure: the boundary faces carry no flux.
        alpha_face[0] = 0.0;
        alpha_face[n_s] = 0.0;
        if profile.symmetric {
            // Make the stored weights mirror-exact so the discrete
            // operators commute with the reflection k <-> N_s-1-k.
            for k in 0..n_s / 2 {
                let m = n_s - 1 - k;
                let a = 0.5 * (alpha_node[k] + alpha_node[m]);
                alpha_node[k] = a;
                alpha_node[m] = a;
                let ap = 0.5 * (alpha_prime_node[k] - alpha_prime_node[m]);
                alpha_prime_node[k] = ap;
                alpha_prime_node[m] = -ap;
            }
            for k in 0..=n_s / 2 {
                let a = 0.5 * (alpha_face[k] + alpha_face[n_s - k]);
                alpha_face[k] = a;
                alpha_face[n_s - k] = a;
            }
        }
        let radius_node = (0..n_s)
            .map(|k| atlas.radius_of_s((k as f64 + 0.5) * d_s))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Arc::new(Grid {
            n_theta,
            n_s,
            l,
            d_theta: TAU / n_theta as f64,
            d_s,
            symmetric: profile.symmetric,
            alpha_node,
            alpha_prime_node,
            alpha_face,
            radius_node,
        }))
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.d_theta
    }

    pub fn s(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.d_s
    }

    /// Node area weight alpha(s_k) dtheta ds.
    pub fn area_weight(&self, k: usize) -> f64 {
        self.alpha_node[k] * self.d_theta * self.d_s
    }

    /// Total discrete area (sum of all node weights).
    pub fn total_area(&self) -> f64 {
        self.alpha_node.iter().sum::<f64>() * self.d_theta * self.d_s * self.n_theta as f64
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_s
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of node (k, j): s-major, theta-minor.
    pub fn index(&self, k: usize, j: usize) -> usize {
        k * self.n_theta + j
    }
}

/// Complex order parameter sampled on a grid, with its healing length.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
    pub epsilon: f64,
}

impl ComplexField {
    pub fn constant(grid: Arc<Grid>, value: Complex64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Input(format!("epsilon must be positive ({epsilon})")));
        }
        let values = vec![value; grid.len()];
        Ok(ComplexField { grid, values, epsilon })
    }

    pub fn from_fn(
        grid: Arc<Grid>,
        epsilon: f64,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Input(format!("epsilon must be positive ({epsilon})")));
        }
        let mut values = Vec::with_capacity(grid.len());
        for k in 0..grid.n_s {
            for j in 0..grid.n_theta {
                values.push(f(grid.theta(j), grid.s(k)));
            }
        }
        Ok(ComplexField { grid, values, epsilon })
    }

    pub fn at(&self, k: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(k, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// L2(dA) inner product Re <self, other>.
    pub fn inner(&self, other: &ComplexField) -> f64 {
        let grid = &self.grid;
        let mut acc = 0.0;
        for k in 0..grid.n_s {
            let w = grid.area_weight(k);
            for j in 0..grid.n_theta {
                let i = grid.index(k, j);
                acc += (self.values[i].conj() * other.values[i]).re * w;
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// self + other * scale, as a new snapshot.
    pub fn axpy(&self, scale: Complex64, other: &ComplexField) -> ComplexField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        ComplexField { grid: Arc::clone(&self.grid), values, epsilon: self.epsilon }
    }

    /// In-place self += other * scale.
    pub fn axpy_mut(&mut self, scale: f64, other: &ComplexField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    /// Worst deviation from the reflection + n-fold rotation symmetries.
    pub fn symmetry_defect(&self, n: usize) -> f64 {
        let grid = &self.grid;
        let mut worst = 0.0_f64;
        let shift = grid.n_theta / n.max(1);
        for k in 0..grid.n_s {
            let km = grid.n_s - 1 - k;
            for j in 0..grid.n_theta {
                let v = self.at(k, j);
                worst = worst.max((v - self.at(km, j)).norm());
                if n > 1 {
                    worst = worst.max((v - self.at(k, (j + shift) % grid.n_theta)).norm());
                }
            }
        }
        worst
    }
}

/// Project a field onto the class invariant under s -> l - s and
/// theta -> theta + 2 pi / n, by averaging each group orbit. Every node
/// of an orbit receives the identical mean, so the output symmetries are
/// node-exact.
pub fn symmetrize(field: &ComplexField, n: usize) -> Result<ComplexField> {
    let grid = &field.grid;
    if n == 0 || grid.n_theta % n != 0 {
        return Err(Error::Input(format!(
            "n_theta = {} not divisible by symmetry order n = {n}",
            grid.n_theta
        )));
    }
    if grid.n_s % 2 != 0 {
        return Err(Error::Input("symmetrize needs an even n_s".into()));
    }
    let shift = grid.n_theta / n;
    let mut values = vec![Complex64::new(f64::NAN, f64::NAN); grid.len()];
    let mut orbit = Vec::with_capacity(2 * n);
    for k in 0..grid.n_s {
        for j in 0..grid.n_theta {
            if !values[grid.index(k, j)].re.is_nan() {
                continue;
            }
            orbit.clear();
            for r in 0..n {
                let jr = (j + r * shift) % grid.n_theta;
                orbit.push(grid.index(k, jr));
                orbit.push(grid.index(grid.n_s - 1 - k, jr));
            }
            let mut mean = Complex64::new(0.0, 0.0);
            for &i in &orbit {
                mean += field.values[i];
            }
            mean /= orbit.len() as f64;
            for &i in &orbit {
                values[i] = mean;
            }
        }
    }
    Ok(ComplexField { grid: Arc::clone(grid), values, epsilon: field.epsilon })
}

const DUMP_MAGIC: &[u8; 5] = b"REVX1";

/// Serialize a field: magic, u32 N_theta, u32 N_s, f64 epsilon, then
/// (re, im) f64 pairs s-major, all little-endian.
pub fn write_field(w: &mut impl Write, field: &ComplexField) -> Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&(field.grid.n_theta as u32).to_le_bytes())?;
    w.write_all(&(field.grid.n_s as u32).to_le_bytes())?;
    w.write_all(&field.epsilon.to_le_bytes())?;
    for v in &field.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Deserialize a field dump onto a grid built for the same surface.
pub fn read_field(r: &mut impl Read, atlas: &ConformalAtlas) -> Result<ComplexField> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Input("not a field dump (bad magic)".into()));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let n_theta = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf)?;
    let n_s = u32::from_le_bytes(u32buf) as usize;
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let epsilon = f64::from_le_bytes(f64buf);
    if !(epsilon > 0.0) || n_theta == 0 || n_s == 0 {
        return Err(Error::Input("corrupt field dump header".into()));
    }
    let grid = Grid::new(atlas, n_theta, n_s)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut f64buf)?;
        let re = f64::from_le_bytes(f64buf);
        r.read_exact(&mut f64buf)?;
        let im = f64::from_le_bytes(f64buf);
        values.push(Complex64::new(re, im));
    }
    Ok(ComplexField { grid, values, epsilon })
}
