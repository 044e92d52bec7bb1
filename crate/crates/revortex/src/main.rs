//! Command-line entry point: surface validation, ring equilibria,
//! point-vortex simulation, constrained GP minimization and reporting.

use clap::{Args, Parser, Subcommand};
use revortex::dynamics::{integrate, TrajectoryStatus};
use revortex::field::{momentum, read_field, write_field, ComplexField};
use revortex::gpmin::{continuation, extract_omega, MinimizeOptions};
use revortex::rings::{expand, find_ring_general, find_symmetric_ring, RingSolution};
use revortex::surface::{solve_conformal_map, validate_profile, ConformalAtlas, ProfileCurve};
use revortex::vortexfind::{compare_orbits, detect_vortices};
use revortex::{Error, Result};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "revortex", version, about = "Vortex dynamics and rotating Gross-Pitaevskii states on surfaces of revolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Surface profile utilities.
    Surface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
    /// Rotating vortex-ring equilibria.
    Rings {
        #[command(subcommand)]
        cmd: RingsCmd,
    },
    /// Generalized point-vortex dynamics.
    Pv {
        #[command(subcommand)]
        cmd: PvCmd,
    },
    /// Constrained Gross-Pitaevskii minimization.
    Gp {
        #[command(subcommand)]
        cmd: GpCmd,
    },
    /// Aggregate CSV artifacts from an output directory into a summary.
    Report(CommonArgs),
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Validate a profile and its conformal chart.
    Check(CommonArgs),
}

#[derive(Subcommand)]
enum RingsCmd {
    /// Solve for a rotating two-ring equilibrium.
    Find(CommonArgs),
}

#[derive(Subcommand)]
enum PvCmd {
    /// Integrate the point-vortex flow of a ring configuration.
    Simulate(CommonArgs),
}

#[derive(Subcommand)]
enum GpCmd {
    /// Run the eps-continuation of constrained minimizers.
    Minimize(CommonArgs),
    /// Re-examine a field dump: energy, momentum, omega, residual, vortices.
    Verify(CommonArgs),
}

/// Shared option surface; each subcommand validates the subset it needs.
/// Any flag may also come from `--config <file>` (`key = value` lines,
/// `#` comments); explicit flags override the file.
#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Surface spec: sphere | bumpy | pear | file:<path>.
    #[arg(long)]
    surface: Option<String>,
    /// Vortices per ring.
    #[arg(long)]
    n: Option<usize>,
    /// Latitude (arc length from the south pole) of the first ring.
    #[arg(long)]
    s1: Option<f64>,
    /// Plane radius of the first ring (general ring search).
    #[arg(long)]
    r1: Option<f64>,
    /// Bracket for the second ring radius (general ring search).
    #[arg(long)]
    r2_min: Option<f64>,
    #[arg(long)]
    r2_max: Option<f64>,
    /// Healing lengths, comma-separated, decreasing.
    #[arg(long)]
    eps: Option<String>,
    /// Grid as NTHETAxNS, e.g. 256x128.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Output directory for CSV and field artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed recorded in artifacts for reproducibility bookkeeping.
    #[arg(long)]
    seed: Option<u64>,
    /// Conformal map solve tolerance.
    #[arg(long)]
    tol_map: Option<f64>,
    /// Ring residual tolerance.
    #[arg(long)]
    tol_residual: Option<f64>,
    /// Target relative rotating-frame residual for gp minimize.
    #[arg(long)]
    tol_gp: Option<f64>,
    /// Field dump to verify (gp verify).
    #[arg(long)]
    field: Option<PathBuf>,
}

impl CommonArgs {
    /// Fill unset fields from the config file, if any.
    fn merged(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| io_err(&format!("config {}", path.display()), e))?;
        let mut kv = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Input(format!(
                    "config {}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                )));
            };
            kv.insert(key.trim().replace('_', "-"), value.trim().to_string());
        }
        let parse_f64 = |k: &str, v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Input(format!("config key '{k}': bad number '{v}'")))
        };
        for (key, value) in kv {
            match key.as_str() {
                "surface" => {
                    self.surface.get_or_insert(value);
                }
                "n" => {
                    self.n.get_or_insert(value.parse().map_err(|_| {
                        Error::Input(format!("config key 'n': bad integer '{value}'"))
                    })?);
                }
                "s1" => {
                    self.s1.get_or_insert(parse_f64("s1", &value)?);
                }
                "r1" => {
                    self.r1.get_or_insert(parse_f64("r1", &value)?);
                }
                "r2-min" => {
                    self.r2_min.get_or_insert(parse_f64("r2-min", &value)?);
                }
                "r2-max" => {
                    self.r2_max.get_or_insert(parse_f64("r2-max", &value)?);
                }
                "eps" => {
                    self.eps.get_or_insert(value);
                }
                "grid" => {
                    self.grid.get_or_insert(value);
                }
                "t-end" => {
                    self.t_end.get_or_insert(parse_f64("t-end", &value)?);
                }
                "dt" => {
                    self.dt.get_or_insert(parse_f64("dt", &value)?);
                }
                "out" => {
                    self.out.get_or_insert(PathBuf::from(value));
                }
                "seed" => {
                    self.seed.get_or_insert(value.parse().map_err(|_| {
                        Error::Input(format!("config key 'seed': bad integer '{value}'"))
                    })?);
                }
                "tol-map" => {
                    self.tol_map.get_or_insert(parse_f64("tol-map", &value)?);
                }
                "tol-residual" => {
                    self.tol_residual
                        .get_or_insert(parse_f64("tol-residual", &value)?);
                }
                "tol-gp" => {
                    self.tol_gp.get_or_insert(parse_f64("tol-gp", &value)?);
                }
                "field" => {
                    self.field.get_or_insert(PathBuf::from(value));
                }
                other => {
                    return Err(Error::Input(format!(
                        "config {}: unknown key '{other}'",
                        path.display()
                    )))
                }
            }
        }
        Ok(self)
    }

    fn surface_spec(&self) -> Result<&str> {
        self.surface
            .as_deref()
            .ok_or_else(|| Error::Input("missing --surface".into()))
    }

    fn atlas(&self) -> Result<ConformalAtlas> {
        let profile = ProfileCurve::by_name(self.surface_spec()?)?;
        solve_conformal_map(profile, self.tol_map.unwrap_or(1e-10))
    }

    fn need_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::Input("missing --n".into()))
    }

    fn need_s1(&self) -> Result<f64> {
        self.s1.ok_or_else(|| Error::Input("missing --s1".into()))
    }

    fn eps_list(&self) -> Result<Vec<f64>> {
        let raw = self
            .eps
            .as_deref()
            .ok_or_else(|| Error::Input("missing --eps".into()))?;
        let mut out = Vec::new();
        for part in raw.split(',') {
            let v: f64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad eps value '{part}'")))?;
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Input(format!("eps {v} outside (0, 1)")));
            }
            out.push(v);
        }
        Ok(out)
    }

    fn grid_dims(&self) -> Result<(usize, usize)> {
        let raw = self
            .grid
            .as_deref()
            .ok_or_else(|| Error::Input("missing --grid (NTHETAxNS)".into()))?;
        let (a, b) = raw
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Input(format!("bad grid spec '{raw}' (expected NTHETAxNS)")))?;
        let nt = a
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad grid width '{a}'")))?;
        let ns = b
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad grid height '{b}'")))?;
        Ok((nt, ns))
    }
}


/// Attach a path/context to an I/O error.
fn io_err(ctx: &str, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{ctx}: {e}")))
}
/// 17 significant digits, round-trip exact for f64.
fn f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `text` to stdout and, when an output directory is set, to
/// `<out>/<name>` as well.
fn emit(out: &Option<PathBuf>, name: &str, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| io_err(&format!("create {}", dir.display()), e))?;
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| io_err(&format!("write {}", path.display()), e))?;
    }
    Ok(())
}

fn ring_csv(ring: &RingSolution) -> String {
    format!(
        "n,r1,r2,s1,s2,omega0,residual\n{},{},{},{},{},{},{}\n",
        ring.n,
        f(ring.r1),
        f(ring.r2),
        f(ring.s1),
        f(ring.s2),
        f(ring.omega0),
        f(ring.residual)
    )
}

fn cmd_surface_check(args: &CommonArgs) -> Result<()> {
    let profile = ProfileCurve::by_name(args.surface_spec()?)?;
    let samples = profile.sample(2048);
    let report = validate_profile(&samples, 1e-3, profile.symmetric)?;
    if !report.passed() {
        for v in &report.violations {
            eprintln!("violation: {} (magnitude {:.3e})", v.invariant, v.magnitude);
        }
        return Err(Error::Domain(format!(
            "profile '{}' violates {} invariant(s)",
            profile.name,
            report.violations.len()
        )));
    }
    let atlas = args.atlas()?;
    let mut text = String::new();
    text.push_str(&format!("surface = {}\n", profile.name));
    text.push_str(&format!("l = {}\n", f(profile.l)));
    text.push_str(&format!("symmetric = {}\n", profile.symmetric as u8));
    text.push_str(&format!("total_area = {}\n", f(atlas.total_area())));
    text.push_str(&format!(
        "map_residual = {}\n",
        f(atlas.collocation_residual(1000))
    ));
    emit(&args.out, "surface.txt", &text)
}

fn cmd_rings_find(args: &CommonArgs) -> Result<()> {
    let atlas = args.atlas()?;
    let n = args.need_n()?;
    let tol = args.tol_residual.unwrap_or(1e-10);
    let ring = if atlas.profile().symmetric && args.r2_min.is_none() {
        let s1 = match (args.s1, args.r1) {
            (Some(s1), _) => s1,
            (None, Some(r1)) => atlas.s_of_radius(r1),
            (None, None) => return Err(Error::Input("missing --s1 (or --r1)".into())),
        };
        Some(find_symmetric_ring(&atlas, n, s1)?)
    } else {
        let r1 = match (args.r1, args.s1) {
            (Some(r1), _) => r1,
            (None, Some(s1)) => atlas.radius_of_s(s1)?,
            (None, None) => return Err(Error::Input("missing --r1 (or --s1)".into())),
        };
        let bracket = match (args.r2_min, args.r2_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(Error::Input(
                    "general ring search needs --r2-min and --r2-max".into(),
                ))
            }
        };
        find_ring_general(&atlas, n, r1, bracket)?
    };
    match ring {
        Some(ring) => {
            if ring.residual.abs() > tol {
                return Err(Error::Solver(format!(
                    "ring residual {:.3e} above tolerance {tol:.3e}",
                    ring.residual
                )));
            }
            emit(&args.out, "rings.csv", &ring_csv(&ring))
        }
        None => emit(
            &args.out,
            "rings.csv",
            &format!(
                "# no sign change of the residual for r2 in [{}, {}]; no ring reported\n",
                f(args.r2_min.unwrap()),
                f(args.r2_max.unwrap())
            ),
        ),
    }
}

fn cmd_pv_simulate(args: &CommonArgs) -> Result<()> {
    let atlas = args.atlas()?;
    let n = args.need_n()?;
    let ring = find_symmetric_ring(&atlas, n, args.need_s1()?)?;
    let period = std::f64::consts::TAU / ring.omega0.abs();
    let t_end = args.t_end.unwrap_or(period);
    let dt = args.dt.unwrap_or(period / 2000.0);
    let config = expand(&ring);
    let traj = integrate(&atlas, &config, t_end, dt)?;
    let mut text = String::from("t,i,d,x,y,s,theta,W,M\n");
    for (step, state) in traj.states.iter().enumerate() {
        let (w, m) = traj.invariant_log[step];
        for (i, p) in state.positions.iter().enumerate() {
            let s = atlas.s_of_radius(p.norm());
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                f(traj.times[step]),
                i,
                state.degrees[i],
                f(p.x),
                f(p.y),
                f(s),
                f(p.angle()),
                f(w),
                f(m)
            ));
        }
    }
    emit(&args.out, "trajectory.csv", &text)?;
    if let TrajectoryStatus::Aborted(why) = &traj.status {
        return Err(Error::Dynamics(format!("trajectory truncated: {why}")));
    }
    Ok(())
}

fn vortices_csv(field: &ComplexField) -> Result<String> {
    let mut text = String::from("id,degree,s,theta,radius,defect\n");
    for (id, v) in detect_vortices(field, 0.5)?.iter().enumerate() {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            id,
            v.degree,
            f(v.s),
            f(v.theta),
            f(v.radius),
            f(v.defect)
        ));
    }
    Ok(text)
}

fn cmd_gp_minimize(args: &CommonArgs) -> Result<()> {
    let atlas = args.atlas()?;
    let n = args.need_n()?;
    let ring = find_symmetric_ring(&atlas, n, args.need_s1()?)?;
    let eps = args.eps_list()?;
    let (nt, ns) = args.grid_dims()?;
    let out = args
        .out
        .clone()
        .ok_or_else(|| Error::Input("gp minimize needs --out".into()))?;
    let mut opts = MinimizeOptions::default();
    if let Some(tol) = args.tol_gp {
        opts.gtol = tol;
    }
    let stages: Vec<(f64, usize, usize)> = eps.iter().map(|&e| (e, nt, ns)).collect();
    let steps = continuation(&atlas, &ring, &stages, &opts)?;
    std::fs::create_dir_all(&out).map_err(|e| io_err(&format!("create {}", out.display()), e))?;
    let mut gp_csv = String::from("eps,energy,momentum,omega,residual,s_plus,s_minus\n");
    for step in &steps {
        gp_csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            f(step.eps),
            f(step.energy),
            f(step.momentum),
            f(step.omega),
            f(step.residual),
            f(step.orbits.s_plus),
            f(step.orbits.s_minus)
        ));
        let tag = format!("{:.4}", step.eps).replace('.', "p");
        let path = out.join(format!("field_eps{tag}.revx"));
        let file =
            File::create(&path).map_err(|e| io_err(&format!("create {}", path.display()), e))?;
        let mut w = BufWriter::new(file);
        write_field(&mut w, &step.field)?;
        w.flush().map_err(|e| io_err(&format!("write {}", path.display()), e))?;
        std::fs::write(out.join(format!("vortices_eps{tag}.csv")), vortices_csv(&step.field)?)
            .map_err(|e| io_err("write artifact", e))?;
        std::fs::write(out.join(format!("orbits_eps{tag}.txt")), step.orbits.render())
            .map_err(|e| io_err("write artifact", e))?;
    }
    emit(&Some(out), "gp.csv", &gp_csv)
}

fn cmd_gp_verify(args: &CommonArgs) -> Result<()> {
    let atlas = args.atlas()?;
    let path = args
        .field
        .clone()
        .ok_or_else(|| Error::Input("gp verify needs --field <dump>".into()))?;
    let file = File::open(&path).map_err(|e| io_err(&format!("open {}", path.display()), e))?;
    let field = read_field(&mut BufReader::new(file), &atlas)?;
    let (omega, energy, residual) = extract_omega(&field);
    let mut text = String::new();
    text.push_str(&format!("field = {}\n", path.display()));
    text.push_str(&format!("eps = {}\n", f(field.epsilon)));
    text.push_str(&format!("grid = {}x{}\n", field.grid.n_theta, field.grid.n_s));
    text.push_str(&format!("energy = {}\n", f(energy)));
    text.push_str(&format!("momentum = {}\n", f(momentum(&field))));
    text.push_str(&format!("omega = {}\n", f(omega)));
    text.push_str(&format!("residual = {}\n", f(residual)));
    print!("{text}");
    print!("{}", vortices_csv(&field)?);
    if let (Some(n), Some(s1)) = (args.n, args.s1) {
        let ring = find_symmetric_ring(&atlas, n, s1)?;
        let detected = detect_vortices(&field, 0.5)?;
        print!("{}", compare_orbits(&detected, &ring)?.render());
    }
    Ok(())
}

/// One pass/fail line per artifact class found in the output directory.
fn cmd_report(args: &CommonArgs) -> Result<()> {
    let dir = args
        .out
        .clone()
        .ok_or_else(|| Error::Input("report needs --out <dir>".into()))?;
    let read = |name: &str| -> Option<String> { std::fs::read_to_string(dir.join(name)).ok() };
    let mut any = false;

    if let Some(text) = read("rings.csv") {
        any = true;
        let mut verdict = "PASS";
        let mut worst = 0.0_f64;
        for line in text.lines().skip(1) {
            if line.starts_with('#') {
                verdict = "NO-ROOT";
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() == 7 {
                let residual: f64 = cols[6].parse().unwrap_or(f64::NAN);
                worst = worst.max(residual.abs());
                if !(residual.abs() <= 1e-10) {
                    verdict = "FAIL";
                }
            }
        }
        println!("rings: {verdict} (max residual {worst:.3e})");
    }
    if let Some(text) = read("trajectory.csv") {
        any = true;
        let mut first: Option<(f64, f64)> = None;
        let mut worst_w = 0.0_f64;
        let mut worst_m = 0.0_f64;
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 9 {
                continue;
            }
            let w: f64 = cols[7].parse().unwrap_or(f64::NAN);
            let m: f64 = cols[8].parse().unwrap_or(f64::NAN);
            match first {
                None => first = Some((w, m)),
                Some((w0, m0)) => {
                    worst_w = worst_w.max((w - w0).abs() / w0.abs().max(1.0));
                    worst_m = worst_m.max((m - m0).abs());
                }
            }
        }
        let ok = worst_w <= 1e-8 && worst_m <= 1e-6;
        println!(
            "dynamics: {} (|dW|/|W| {worst_w:.3e}, |dM| {worst_m:.3e})",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if let Some(text) = read("gp.csv") {
        any = true;
        let mut worst = 0.0_f64;
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() == 7 {
                worst = worst.max(cols[4].parse::<f64>().unwrap_or(f64::NAN));
            }
        }
        let ok = worst <= 1e-3;
        println!(
            "gp: {} (max residual {worst:.3e})",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if !any {
        return Err(Error::Input(format!(
            "no known artifacts (rings.csv, trajectory.csv, gp.csv) in {}",
            dir.display()
        )));
    }
    Ok(())
}

fn check_thread_cap() -> Result<()> {
    match std::env::var("REVORTEX_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.parse::<usize>() {
            // All kernels are single-threaded, which satisfies any positive cap.
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(Error::Input(format!(
                "REVORTEX_THREADS must be a positive integer, got '{v}'"
            ))),
        },
    }
}

fn run() -> Result<()> {
    check_thread_cap()?;
    let cli = Cli::parse();
    match cli.command {
        Command::Surface { cmd: SurfaceCmd::Check(args) } => cmd_surface_check(&args.merged()?),
        Command::Rings { cmd: RingsCmd::Find(args) } => cmd_rings_find(&args.merged()?),
        Command::Pv { cmd: PvCmd::Simulate(args) } => cmd_pv_simulate(&args.merged()?),
        Command::Gp { cmd: GpCmd::Minimize(args) } => cmd_gp_minimize(&args.merged()?),
        Command::Gp { cmd: GpCmd::Verify(args) } => cmd_gp_verify(&args.merged()?),
        Command::Report(args) => cmd_report(&args.merged()?),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error[{}]: {e}", e.code());
        std::process::exit(e.exit_status());
    }
}
