//! Profile curves and the conformal parametrization of surfaces of
//! revolution.
//!
//! A surface is generated by rotating an arc-length-parametrized curve
//! (alpha(s), 0, beta(s)), 0 <= s <= l, about the Z-axis. The generating
//! curve must close smoothly at both poles: alpha(0) = alpha(l) = 0 and
//! beta'(0) = beta'(l) = 0.

mod atlas;
mod point;

pub use atlas::{solve_conformal_map, ConformalAtlas};
pub use point::{convert, reflect, Representation, SurfacePoint};

use crate::error::{Error, Result};
use crate::numerics::CubicHermite;
use std::fmt::Write as _;
use std::path::Path;

/// Arc-length-parametrized generating curve of a surface of revolution.
///
/// Backed by cubic Hermite tables on a fine uniform s-grid; built-in
/// profiles populate the tables from closed forms or from a prescribed
/// turning angle, file-based profiles from user samples.
#[derive(Debug)]
pub struct ProfileCurve {
    pub l: f64,
    pub symmetric: bool,
    pub name: String,
    alpha: CubicHermite,
    beta: CubicHermite,
    beta_monotone: bool,
}

const BUILTIN_GRID: usize = 8192;

impl ProfileCurve {
    /// Radius alpha(s) of the latitude circle at arc length s.
    pub fn alpha(&self, s: f64) -> f64 {
        self.alpha.eval(s.clamp(0.0, self.l))
    }

    /// d(alpha)/ds.
    pub fn alpha_prime(&self, s: f64) -> f64 {
        self.alpha.eval_deriv(s.clamp(0.0, self.l))
    }

    /// Height beta(s).
    pub fn beta(&self, s: f64) -> f64 {
        self.beta.eval(s.clamp(0.0, self.l))
    }

    /// d(beta)/ds.
    pub fn beta_prime(&self, s: f64) -> f64 {
        self.beta.eval_deriv(s.clamp(0.0, self.l))
    }

    pub(crate) fn beta_is_monotone(&self) -> bool {
        self.beta_monotone
    }

    /// Height of the symmetry plane beta(l/2); meaningful when `symmetric`.
    pub fn mid_height(&self) -> f64 {
        self.beta(0.5 * self.l)
    }

    /// Total surface area 2*pi * integral of alpha over [0, l].
    pub fn total_area(&self) -> f64 {
        crate::numerics::adaptive_simpson(
            &|s| 2.0 * std::f64::consts::PI * self.alpha(s),
            0.0,
            self.l,
            1e-13,
        )
    }

    fn from_tables(
        name: &str,
        l: f64,
        symmetric: bool,
        s: Vec<f64>,
        a: Vec<f64>,
        ap: Vec<f64>,
        b: Vec<f64>,
        bp: Vec<f64>,
    ) -> Result<Self> {
        let beta_monotone = bp.iter().all(|&v| v >= -1e-12);
        Ok(ProfileCurve {
            l,
            symmetric,
            name: name.to_string(),
            alpha: CubicHermite::new(s.clone(), a, ap)?,
            beta: CubicHermite::new(s, b, bp)?,
            beta_monotone,
        })
    }

    /// Unit sphere: alpha = sin s, beta = -cos s, l = pi.
    pub fn sphere() -> Self {
        Self::sphere_scaled(1.0)
    }

    /// Sphere of radius `radius`: alpha = R sin(s/R), l = pi R.
    pub fn sphere_scaled(radius: f64) -> Self {
        let l = std::f64::consts::PI * radius;
        let n = BUILTIN_GRID;
        let mut s = Vec::with_capacity(n + 1);
        let (mut a, mut ap, mut b, mut bp) = (
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
        );
        for k in 0..=n {
            let sk = l * k as f64 / n as f64;
            let t = sk / radius;
            s.push(sk);
            a.push(radius * t.sin());
            ap.push(t.cos());
            b.push(-radius * t.cos());
            bp.push(t.sin());
        }
        let name = if radius == 1.0 {
            "sphere".to_string()
        } else {
            format!("sphere(R={radius})")
        };
        Self::from_tables(&name, l, true, s, a, ap, b, bp).expect("sphere tables")
    }

    /// Longitudinally symmetric non-sphere built-in: turning angle
    /// psi(s) = s + 0.2 sin(2s) on [0, pi].
    pub fn bumpy() -> Self {
        Self::from_turning_angle("bumpy", |s| s + 0.2 * (2.0 * s).sin(), true)
            .expect("bumpy profile")
    }

    /// Non-symmetric pear-shaped built-in: turning angle
    /// psi(s) = s + 0.25 sin^2(s) + c sin(s), with c chosen so the curve
    /// closes at the far pole.
    pub fn pear() -> Self {
        // alpha(pi) = int cos(psi) ds is monotone decreasing in c; bracket
        // and bisect for the closing value.
        let closing = |c: f64| -> f64 {
            let n = 4096;
            let h = std::f64::consts::PI / n as f64;
            let psi = |s: f64| s + 0.25 * s.sin().powi(2) + c * s.sin();
            let mut acc = 0.0;
            for k in 0..n {
                let s0 = k as f64 * h;
                acc += h / 6.0
                    * (psi(s0).cos() + 4.0 * psi(s0 + 0.5 * h).cos() + psi(s0 + h).cos());
            }
            acc
        };
        let c = crate::numerics::brent_root(closing, -1.0, 1.0, 1e-15, 200)
            .expect("pear closing constant");
        Self::from_turning_angle("pear", move |s| s + 0.25 * s.sin().powi(2) + c * s.sin(), false)
            .expect("pear profile")
    }

    /// Build a unit-speed profile on [0, pi] from its turning angle psi:
    /// alpha' = cos(psi), beta' = sin(psi). Requires psi(0) = 0 and
    /// psi(pi) = pi (smooth poles) and a closing curve (alpha(pi) = 0).
    pub fn from_turning_angle(
        name: &str,
        psi: impl Fn(f64) -> f64,
        symmetric: bool,
    ) -> Result<Self> {
        let l = std::f64::consts::PI;
        let n = BUILTIN_GRID;
        let h = l / n as f64;
        let mut s = Vec::with_capacity(n + 1);
        let (mut a, mut ap, mut b, mut bp) = (
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
        );
        let (mut ca, mut cb) = (0.0f64, 0.0f64);
        s.push(0.0);
        a.push(0.0);
        ap.push(psi(0.0).cos());
        b.push(0.0);
        bp.push(psi(0.0).sin());
        for k in 0..n {
            let s0 = k as f64 * h;
            let s1 = s0 + h;
            let sm = s0 + 0.5 * h;
            ca += h / 6.0 * (psi(s0).cos() + 4.0 * psi(sm).cos() + psi(s1).cos());
            cb += h / 6.0 * (psi(s0).sin() + 4.0 * psi(sm).sin() + psi(s1).sin());
            s.push(s1);
            a.push(ca);
            ap.push(psi(s1).cos());
            b.push(cb);
            bp.push(psi(s1).sin());
        }
        if a.last().unwrap().abs() > 1e-10 {
            return Err(Error::Input(format!(
                "turning angle does not close the profile: alpha(l) = {}",
                a.last().unwrap()
            )));
        }
        // Pin the far pole exactly so downstream pole conditions hold.
        *a.last_mut().unwrap() = 0.0;
        Self::from_tables(name, l, symmetric, s, a, ap, b, bp)
    }

    /// Build from tabulated samples; derivatives from a natural cubic
    /// spline fit when not supplied.
    pub fn from_samples(
        name: &str,
        samples: &[ProfileSample],
        symmetric: bool,
    ) -> Result<Self> {
        if samples.len() < 8 {
            return Err(Error::Input("profile needs at least 8 samples".into()));
        }
        if samples.windows(2).any(|w| w[1].s <= w[0].s) {
            return Err(Error::Input("profile samples must be sorted by s".into()));
        }
        let l = samples.last().unwrap().s;
        let s: Vec<f64> = samples.iter().map(|p| p.s).collect();
        let a: Vec<f64> = samples.iter().map(|p| p.alpha).collect();
        let b: Vec<f64> = samples.iter().map(|p| p.beta).collect();
        let have_derivs = samples.iter().all(|p| p.alpha_prime.is_some());
        let (ap, bp) = if have_derivs {
            (
                samples.iter().map(|p| p.alpha_prime.unwrap()).collect(),
                samples.iter().map(|p| p.beta_prime.unwrap()).collect(),
            )
        } else {
            (spline_derivatives(&s, &a), spline_derivatives(&s, &b))
        };
        Self::from_tables(name, l, symmetric, s, a, ap, b, bp)
    }

    /// Parse the plain-text profile format: a header
    /// `l=<value> symmetric=<0|1>` followed by rows
    /// `s alpha beta [alpha' beta']`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|t| !t.is_empty() && !t.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Input("empty profile file".into()))?;
        let mut l = None;
        let mut symmetric = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("l", v)) => {
                    l = Some(v.parse::<f64>().map_err(|_| {
                        Error::Input(format!("bad l value '{v}' in profile header"))
                    })?)
                }
                Some(("symmetric", v)) => symmetric = Some(v == "1"),
                _ => {
                    return Err(Error::Input(format!(
                        "unrecognized header token '{tok}' (expected l=<v> symmetric=<0|1>)"
                    )))
                }
            }
        }
        let l = l.ok_or_else(|| Error::Input("profile header missing l=".into()))?;
        let symmetric =
            symmetric.ok_or_else(|| Error::Input("profile header missing symmetric=".into()))?;
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Input(format!("bad number '{t}' on data row {}", i + 1)))
                })
                .collect::<Result<_>>()?;
            let sample = match vals.len() {
                3 => ProfileSample::new(vals[0], vals[1], vals[2]),
                5 => ProfileSample::with_derivatives(vals[0], vals[1], vals[2], vals[3], vals[4]),
                n => {
                    return Err(Error::Input(format!(
                        "data row {} has {n} columns (expected 3 or 5)",
                        i + 1
                    )))
                }
            };
            samples.push(sample);
        }
        if let Some(last) = samples.last() {
            if (last.s - l).abs() > 1e-9 * l.max(1.0) {
                return Err(Error::Input(format!(
                    "last sample s = {} does not match header l = {l}",
                    last.s
                )));
            }
        }
        let name = format!("file:{}", path.display());
        Self::from_samples(&name, &samples, symmetric)
    }

    /// Resolve a CLI surface spec: `sphere`, `bumpy`, `pear` or `file:<path>`.
    pub fn by_name(spec: &str) -> Result<Self> {
        match spec {
            "sphere" => Ok(Self::sphere()),
            "bumpy" => Ok(Self::bumpy()),
            "pear" => Ok(Self::pear()),
            other => {
                if let Some(path) = other.strip_prefix("file:") {
                    Self::from_file(Path::new(path))
                } else {
                    Err(Error::Input(format!(
                        "unknown surface '{other}' (expected sphere, bumpy, pear or file:<path>)"
                    )))
                }
            }
        }
    }

    /// Sample the profile on a uniform grid, suitable for `validate_profile`.
    pub fn sample(&self, n: usize) -> Vec<ProfileSample> {
        (0..=n)
            .map(|k| {
                let s = self.l * k as f64 / n as f64;
                ProfileSample::with_derivatives(
                    s,
                    self.alpha(s),
                    self.beta(s),
                    self.alpha_prime(s),
                    self.beta_prime(s),
                )
            })
            .collect()
    }
}

/// One tabulated point of a generating curve.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_prime: Option<f64>,
    pub beta_prime: Option<f64>,
}

impl ProfileSample {
    pub fn new(s: f64, alpha: f64, beta: f64) -> Self {
        ProfileSample { s, alpha, beta, alpha_prime: None, beta_prime: None }
    }

    pub fn with_derivatives(s: f64, alpha: f64, beta: f64, ap: f64, bp: f64) -> Self {
        ProfileSample { s, alpha, beta, alpha_prime: Some(ap), beta_prime: Some(bp) }
    }
}

/// Natural cubic spline first derivatives at the sample points.
fn spline_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    // Solve the tridiagonal system for second derivatives m_i.
    let mut m = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut upper = vec![0.0; n];
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    // Thomas algorithm (lower diagonal equals h0, stored implicitly).
    let mut c_star = vec![0.0; n];
    let mut d_star = vec![0.0; n];
    c_star[0] = 0.0;
    d_star[0] = 0.0;
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let denom = diag[i] - h0 * c_star[i - 1];
        c_star[i] = upper[i] / denom;
        d_star[i] = (rhs[i] - h0 * d_star[i - 1]) / denom;
    }
    m[n - 1] = 0.0;
    for i in (1..n - 1).rev() {
        m[i] = d_star[i] - c_star[i] * m[i + 1];
    }
    // First derivative of the spline at each node.
    let mut d = vec![0.0; n];
    for i in 0..n - 1 {
        let h = x[i + 1] - x[i];
        d[i] = (y[i + 1] - y[i]) / h - h / 6.0 * (2.0 * m[i] + m[i + 1]);
    }
    let h = x[n - 1] - x[n - 2];
    d[n - 1] = (y[n - 1] - y[n - 2]) / h + h / 6.0 * (m[n - 2] + 2.0 * m[n - 1]);
    d
}

/// Result of checking profile invariants against a tolerance.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub tol: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub invariant: String,
    pub magnitude: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.passed() {
            let _ = writeln!(out, "profile ok (tol = {:e})", self.tol);
        } else {
            for v in &self.violations {
                let _ = writeln!(out, "violated: {} (max {:.3e})", v.invariant, v.magnitude);
            }
        }
        out
    }
}

/// Check the profile invariants on tabulated samples: unit speed, pole
/// closure, interior positivity and (optionally) longitudinal symmetry.
pub fn validate_profile(
    samples: &[ProfileSample],
    tol: f64,
    symmetric: bool,
) -> Result<ValidationReport> {
    if samples.len() < 8 {
        return Err(Error::Input("validate_profile: need at least 8 samples".into()));
    }
    if samples.windows(2).any(|w| w[1].s <= w[0].s) {
        return Err(Error::Input("validate_profile: samples not sorted by s".into()));
    }
    let l = samples.last().unwrap().s;
    let mut violations = Vec::new();
    let mut push = |name: &str, mag: f64| {
        if mag > tol {
            violations.push(Violation { invariant: name.to_string(), magnitude: mag });
        }
    };

    if samples.iter().any(|p| p.alpha_prime.is_none()) {
        return validate_profile(
            &resample_with_spline(samples),
            tol,
            symmetric,
        );
    }

    let speed_err = samples
        .iter()
        .map(|p| {
            let ap = p.alpha_prime.unwrap();
            let bp = p.beta_prime.unwrap();
            (ap * ap + bp * bp - 1.0).abs()
        })
        .fold(0.0, f64::max);
    push("unit speed alpha'^2 + beta'^2 = 1", speed_err);

    push("pole condition alpha(0) = 0", samples[0].alpha.abs());
    push("pole condition alpha(l) = 0", samples.last().unwrap().alpha.abs());
    push(
        "pole condition beta'(0) = 0",
        samples[0].beta_prime.unwrap().abs(),
    );
    push(
        "pole condition beta'(l) = 0",
        samples.last().unwrap().beta_prime.unwrap().abs(),
    );

    let worst_interior = samples[1..samples.len() - 1]
        .iter()
        .map(|p| -p.alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    push("interior positivity alpha(s) > 0", worst_interior.max(0.0));

    if symmetric {
        // Compare against the mirrored curve through linear interpolation.
        let interp = |s: f64, field: fn(&ProfileSample) -> f64| -> f64 {
            let idx = samples.partition_point(|p| p.s < s).clamp(1, samples.len() - 1);
            let (p0, p1) = (&samples[idx - 1], &samples[idx]);
            let t = (s - p0.s) / (p1.s - p0.s);
            field(p0) * (1.0 - t) + field(p1) * t
        };
        let mut alpha_err: f64 = 0.0;
        let mut beta_err: f64 = 0.0;
        let beta_sum0 = samples[0].beta + interp(l, |p| p.beta);
        for p in samples {
            alpha_err = alpha_err.max((p.alpha - interp(l - p.s, |q| q.alpha)).abs());
            beta_err = beta_err.max((p.beta + interp(l - p.s, |q| q.beta) - beta_sum0).abs());
        }
        push("symmetry alpha(s) = alpha(l-s)", alpha_err);
        push("symmetry beta(s) + beta(l-s) constant", beta_err);
    }

    Ok(ValidationReport { tol, violations })
}

fn resample_with_spline(samples: &[ProfileSample]) -> Vec<ProfileSample> {
    let s: Vec<f64> = samples.iter().map(|p| p.s).collect();
    let a: Vec<f64> = samples.iter().map(|p| p.alpha).collect();
    let b: Vec<f64> = samples.iter().map(|p| p.beta).collect();
    let ap = spline_derivatives(&s, &a);
    let bp = spline_derivatives(&s, &b);
    samples
        .iter()
        .enumerate()
        .map(|(i, p)| ProfileSample::with_derivatives(p.s, p.alpha, p.beta, ap[i], bp[i]))
        .collect()
}
