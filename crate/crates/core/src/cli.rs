//! Command-line front end. Every command writes CSV data plus a JSON file
//! carrying the configuration that produced it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::blowup::{capacity_bound, expansion_coefficient, BlowupCertificate, TimeCutoff, TimeOrder};
use crate::diagnostics::{
    airy_tail_fit, convergence_rate, g_admissibility_report, tv_growth_exponent, AdmissibilityReport,
    AdmissibilityVerdict, ADMISSIBILITY_TOL,
};
use crate::error::{Error, Result};
use crate::exact::{build_saw, invariant_cubic, residual, saw_envelope_fit, saw_peaks, InvariantCubic, PiecewiseCubic};
use crate::io::{settings_from_env, OutDir};
use crate::ode::OdeSettings;
use crate::pde::{
    default_epsilon, evolve, make_state, make_state_on, BoundaryCondition, DataKind, DtControl, PdeDiagnostics,
    PdeState, RiemannData,
};
use crate::profiles::{
    detect_singularity, interface_profile, origin_shot_profile, reflect_to_rarefaction, shoot_from_origin,
    shoot_profile, singular_point_family, singular_point_family_window, solve_heaviside, terminal_samples, Profile,
    SimilarityParams,
};
use crate::w4::{w4_blowup_time, w4_constants, w4_integrate};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "nde-lab",
    version,
    about = "Similarity profiles, exact solutions and simulations of u_t = (u u_x)_xx"
)]
pub struct Cli {
    /// Directory for the artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Also write a gnuplot script plotting every CSV produced.
    #[arg(long, global = true)]
    pub gnuplot_script: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Shock profile with far-field coefficient `limit`, or the interface
    /// profile when --z0 is given.
    Profile(ProfileArgs),
    /// The interface profile forming the reflected Heaviside step.
    Heaviside,
    /// Piecewise-cubic saw at the critical exponent.
    Saw(SawArgs),
    /// Coefficient dynamics on the invariant cubic subspace.
    W4(W4Args),
    /// Blow-up time bounds and, with --t-end, a simulated ODI check.
    Blowup(BlowupArgs),
    /// ε-regularized Riemann problem.
    Pde(PdeArgs),
    /// Tail fit, TV growth and convergence rate of a shock profile.
    Diagnose(ProfileArgs),
    /// Regenerate the data behind a figure.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub limit: f64,
    /// Interface position; switches to the finite-interface family.
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SawArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, default_value_t = 10)]
    pub humps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct W4Args {
    /// Initial coefficients C0,C1,C2,C3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [0.0, 0.0, 0.0, 1.0 / 60.0])]
    pub coeffs: Vec<f64>,
    /// Defaults to 0.9 of the blow-up time, or 1 without blow-up.
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BlowupArgs {
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub l: f64,
    #[arg(long, default_value_t = 257)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Simulate the PDE up to this time and check the ODI along the run.
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PdeArgs {
    #[arg(long, value_enum, default_value_t = DataArg::SMinus)]
    pub data: DataArg,
    #[arg(long = "L", default_value_t = 4.0, allow_negative_numbers = true)]
    pub l: f64,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Defaults to dx².
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Width of the tanh ramp; defaults to 4 dx.
    #[arg(long, allow_negative_numbers = true)]
    pub width: Option<f64>,
    /// Number of diagnostic records over the run.
    #[arg(long, default_value_t = 100)]
    pub records: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataArg {
    SMinus,
    SPlus,
    HLeft,
    HRight,
}

impl From<DataArg> for DataKind {
    fn from(d: DataArg) -> Self {
        match d {
            DataArg::SMinus => DataKind::SMinus,
            DataArg::SPlus => DataKind::SPlus,
            DataArg::HLeft => DataKind::HLeft,
            DataArg::HRight => DataKind::HRight,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Figure {
    #[value(name = "figure-F1")]
    F1,
    #[value(name = "figure-F2")]
    F2,
    #[value(name = "figure-F3")]
    F3,
    #[value(name = "figure-F4")]
    F4,
    #[value(name = "figure-F41")]
    F41,
    #[value(name = "figure-F5")]
    F5,
    #[value(name = "figure-F55")]
    F55,
    #[value(name = "figure-F6")]
    F6,
    #[value(name = "figure-F7")]
    F7,
    #[value(name = "figure-F8")]
    F8,
    #[value(name = "figure-F9")]
    F9,
    #[value(name = "figure-F10")]
    F10,
}

impl Figure {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_owned()
    }
}

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: bad flags or parameter values.
pub const EXIT_USAGE: i32 = 1;
/// Exit status: numerical failure, with `error.json` in the output directory.
pub const EXIT_NUMERICAL: i32 = 2;

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let mut out = match OutDir::create(&cli.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cli.out.display());
            return EXIT_USAGE;
        }
    };
    let settings = match settings_from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli, &settings, &mut out) {
        Ok(()) => {
            if cli.gnuplot_script {
                if let Err(e) = write_gnuplot(&mut out) {
                    eprintln!("error: {e}");
                    return EXIT_NUMERICAL;
                }
            }
            EXIT_OK
        }
        Err(e) if e.is_usage() => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            let report = json!({
                "error": e.to_string(),
                "kind": error_kind(&e),
                "config": cli,
                "partial_artifacts": out.written(),
            });
            let _ = out.json("error.json", &report);
            EXIT_NUMERICAL
        }
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Unknown").to_owned()
}

fn dispatch(cli: &Cli, settings: &OdeSettings, out: &mut OutDir) -> Result<()> {
    let results = match &cli.command {
        Command::Profile(a) => cmd_profile(a, settings, out)?,
        Command::Heaviside => cmd_heaviside(settings, out)?,
        Command::Saw(a) => cmd_saw(a, out)?,
        Command::W4(a) => cmd_w4(a, settings, out)?,
        Command::Blowup(a) => cmd_blowup(a, out)?,
        Command::Pde(a) => cmd_pde(a, out)?,
        Command::Diagnose(a) => cmd_diagnose(a, settings, out)?,
        Command::Reproduce(a) => {
            let mut sub = OutDir::create(out.path(&a.target.name()))?;
            reproduce(a.target, settings, &mut sub)?
        }
    };
    let name = command_name(&cli.command);
    out.json(&format!("{name}.json"), &json!({ "command": name, "config": cli, "results": results }))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Profile(_) => "profile",
        Command::Heaviside => "heaviside",
        Command::Saw(_) => "saw",
        Command::W4(_) => "w4",
        Command::Blowup(_) => "blowup",
        Command::Pde(_) => "pde",
        Command::Diagnose(_) => "diagnose",
        Command::Reproduce(_) => "reproduce",
    }
}

const PROFILE_STEP: f64 = 0.05;

/// Uniform samples of `g` on the part of `[a, b]` covered by the profile.
fn sample(p: &Profile, a: f64, b: f64, step: f64) -> (Vec<f64>, Vec<f64>) {
    let lo = (a.max(p.z_min()) / step).ceil() as i64;
    let hi = (b.min(p.z_max()) / step).floor() as i64;
    (lo..=hi)
        .map(|k| {
            let z = k as f64 * step;
            (z, p.value(z).expect("inside range"))
        })
        .unzip()
}

fn write_profile(out: &mut OutDir, name: &str, p: &Profile, window: (f64, f64)) -> Result<()> {
    let (z, g) = sample(p, window.0, window.1, PROFILE_STEP);
    out.csv(name, &["z", "g"], &[&z, &g])
}

fn profile_summary(p: &Profile) -> Value {
    json!({
        "alpha": p.params.alpha,
        "branch": p.params.branch,
        "origin_slope": p.origin_slope,
        "far_limit": p.far_limit,
        "far_limit_plus": p.far_limit_plus,
        "interface_z0": p.interface_z0,
        "classification": p.classification,
        "z_range": [p.z_min(), p.z_max()],
    })
}

fn cmd_profile(a: &ProfileArgs, settings: &OdeSettings, out: &mut OutDir) -> Result<Value> {
    let p = match a.z0 {
        Some(z0) => interface_profile(a.alpha, z0, settings)?,
        None => shoot_profile(a.alpha, a.limit, settings)?,
    };
    out.csv("profile.csv", &["z", "g", "dg", "d2g"], &[&p.z, &p.g, &p.dg, &p.d2g])?;
    Ok(profile_summary(&p))
}

fn cmd_heaviside(settings: &OdeSettings, out: &mut OutDir) -> Result<Value> {
    let h = solve_heaviside(settings)?;
    write_profile(out, "heaviside.csv", &h.profile, (-50.0, h.z0 + 5.0))?;
    Ok(json!({ "z0": h.z0, "h0": h.h0, "profile": profile_summary(&h.profile) }))
}

fn saw_summary(saw: &PiecewiseCubic, m: f64) -> Value {
    let zeros: Vec<f64> = saw.pieces.iter().rev().map(|p| p.z_left).collect();
    let envelope = saw_envelope_fit(saw).ok().map(|(c, e)| json!({ "c_env": c, "exponent": e }));
    json!({
        "m": m,
        "humps": saw.pieces.len(),
        "zeros": zeros,
        "breakpoints": saw.breakpoints,
        "pieces": saw.pieces.iter().rev().map(|p| json!({ "z_left": p.z_left, "z_right": p.z_right, "coeffs": p.coeffs })).collect::<Vec<_>>(),
        "ratio": zeros.get(1).map(|z1| z1 / zeros[0]),
        "envelope": envelope,
    })
}

fn write_saw(out: &mut OutDir, name: &str, saw: &PiecewiseCubic) -> Result<()> {
    let n = ((saw.z_max() - saw.z_min()) / 0.01).ceil() as usize;
    let z: Vec<f64> = (0..=n).map(|k| saw.z_min() + (saw.z_max() - saw.z_min()) * k as f64 / n as f64).collect();
    let g: Vec<f64> = z.iter().map(|&s| saw.value(s).expect("inside range")).collect();
    out.csv(name, &["z", "g"], &[&z, &g])
}

fn cmd_saw(a: &SawArgs, out: &mut OutDir) -> Result<Value> {
    let saw = build_saw(a.m, a.humps)?;
    write_saw(out, "saw.csv", &saw)?;
    let peaks = saw_peaks(&saw);
    let (pz, ph): (Vec<f64>, Vec<f64>) = peaks.into_iter().unzip();
    out.csv("saw_peaks.csv", &["z", "height"], &[&pz, &ph])?;
    Ok(saw_summary(&saw, a.m))
}

fn cmd_w4(a: &W4Args, settings: &OdeSettings, out: &mut OutDir) -> Result<Value> {
    let c: [f64; 4] = a
        .coeffs
        .as_slice()
        .try_into()
        .map_err(|_| Error::InvalidInput(format!("--coeffs needs 4 values, got {}", a.coeffs.len())))?;
    let blowup = w4_blowup_time(c[3]).ok();
    let t_end = a.t_end.unwrap_or(blowup.map_or(1.0, |t| 0.9 * t));
    if !(t_end > 0.0) {
        return Err(Error::InvalidInput("t-end must be positive".into()));
    }
    let traj = w4_integrate(c, t_end, settings)?;
    let cols: Vec<Vec<f64>> = (0..4).map(|k| traj.component(k)).collect();
    out.csv("w4.csv", &["t", "C0", "C1", "C2", "C3"], &[&traj.times, &cols[0], &cols[1], &cols[2], &cols[3]])?;
    let constants = w4_constants(0.0, c).ok().map(|(t, a0, b0, d0)| json!({ "T": t, "A0": a0, "B0": b0, "D0": d0 }));
    Ok(json!({
        "blowup_time": blowup,
        "constants": constants,
        "termination": format!("{:?}", traj.termination),
        "final": { "t": traj.last_time(), "c": traj.last_state() },
    }))
}

/// `−sin⁴` bump on `[−L, −L/2]`, zero elsewhere: compact support left of the
/// origin so the boundary terms at `x = 0` vanish while the support stays there.
pub fn odi_initial_data(l: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let (a, b) = (-l, -0.5 * l);
        if x > a && x < b {
            -(std::f64::consts::PI * (x - a) / (b - a)).sin().powi(4)
        } else {
            0.0
        }
    }
}

/// Domain of the ODI simulation: the weighted interval plus a margin on both
/// sides.
pub fn odi_state(l: f64, n: usize, epsilon: f64) -> Result<PdeState> {
    make_state_on(odi_initial_data(l), (-1.5 * l, 1.5 * l), n, epsilon, BoundaryCondition::DirichletZero)
}

/// `J(t)` over the nodes in `[−L, 0]`.
pub fn odi_coefficient(state: &PdeState, l: f64) -> Result<f64> {
    let tol = 1e-9 * state.dx;
    let i0 = state.x.iter().position(|&v| v >= -l - tol).unwrap_or(0);
    let i1 = state.x.iter().rposition(|&v| v <= tol).unwrap_or(state.x.len() - 1);
    expansion_coefficient(&state.x[i0..=i1], &state.u[i0..=i1], l)
}

fn cmd_blowup(a: &BlowupArgs, out: &mut OutDir) -> Result<Value> {
    if !(a.l > 0.0) {
        return Err(Error::InvalidInput("L must be positive".into()));
    }
    let mut state = odi_state(a.l, a.n, a.epsilon)?;
    let j0 = odi_coefficient(&state, a.l)?;
    let mut certs = Vec::new();
    for order in [TimeOrder::First, TimeOrder::Second, TimeOrder::Third] {
        certs.push(BlowupCertificate::eigenfunction(j0, a.l, order)?);
    }
    // capacity bound for the second-order-in-time equation with u_t(x,0) = sin⁴(πx/L)
    let n = 2001;
    let x: Vec<f64> = (0..n).map(|i| a.l * i as f64 / (n - 1) as f64).collect();
    let ut0: Vec<f64> = x.iter().map(|&s| (std::f64::consts::PI * s / a.l).sin().powi(4)).collect();
    let cap = capacity_bound(&x, &ut0, a.l, TimeCutoff::default())?;
    certs.push(BlowupCertificate::capacity(cap, a.l));
    if let Some(t_end) = a.t_end {
        let records = 40;
        let control = DtControl::default();
        let mut traj = vec![(0.0, j0)];
        for k in 1..=records {
            let t = t_end * k as f64 / records as f64;
            state = evolve(&state, t, &control, 0.0)?.0;
            traj.push((state.t, odi_coefficient(&state, a.l)?));
        }
        let (t, j): (Vec<f64>, Vec<f64>) = traj.iter().copied().unzip();
        out.csv("j_trajectory.csv", &["t", "J"], &[&t, &j])?;
        certs[0] = certs[0].clone().with_trajectory(traj, 1e-2)?;
    }
    out.json("certificate.json", &certs)?;
    Ok(serde_json::to_value(&certs)?)
}

fn cmd_pde(a: &PdeArgs, out: &mut OutDir) -> Result<Value> {
    let data = match a.width {
        Some(w) => RiemannData::with_width(a.data.into(), w),
        None => RiemannData::new(a.data.into()),
    };
    let eps = a.epsilon.unwrap_or_else(|| default_epsilon(a.l, a.n));
    let state = make_state(data, a.l, a.n, eps)?;
    if !(a.t_end > 0.0) || a.records == 0 {
        return Err(Error::InvalidInput("t-end and records must be positive".into()));
    }
    let (last, report) = evolve(&state, a.t_end, &DtControl::default(), a.t_end / a.records as f64)?;
    out.csv("snapshot.csv", &["x", "u"], &[&last.x, &last.u])?;
    let col = |f: fn(&PdeDiagnostics) -> f64| report.samples.iter().map(f).collect::<Vec<f64>>();
    let (t, ml, mr, h, s) =
        (col(|d| d.t), col(|d| d.mass_left), col(|d| d.mass_right), col(|d| d.h_minus1), col(|d| d.sup));
    let mass: Vec<f64> = ml.iter().zip(&mr).map(|(a, b)| a + b).collect();
    out.csv(
        "diagnostics.csv",
        &["t", "mass", "mass_left", "mass_right", "h_minus1", "sup"],
        &[&t, &mass, &ml, &mr, &h, &s],
    )?;
    Ok(json!({
        "L": a.l, "n": a.n, "epsilon": eps, "dt_safety": DtControl::default(),
        "data": a.data, "smoothing_width": data.smoothing_width.unwrap_or(4.0 * state.dx),
        "t_end": a.t_end, "steps": report.steps, "boundary_contact": report.boundary_contact,
    }))
}

fn cmd_diagnose(a: &ProfileArgs, settings: &OdeSettings, out: &mut OutDir) -> Result<Value> {
    let p = shoot_profile(a.alpha, a.limit, settings)?;
    let fit = airy_tail_fit(&p)?;
    let zs: Vec<f64> = (0..9).map(|k| 10.0 + 5.0 * k as f64).filter(|&z| z <= -p.z_min()).collect();
    let tv = tv_growth_exponent(&p, &zs)?;
    let q = convergence_rate(&p, 1.0)?;
    let (r, w): (Vec<f64>, Vec<f64>) = {
        let (z, g) = sample(&p, p.z_min(), -10.0, 0.01);
        let lim = p.far_limit.unwrap_or(0.0);
        (z, g.into_iter().map(|v| v - lim).collect())
    };
    let model: Vec<f64> = r.iter().map(|&z| fit.model(z)).collect();
    out.csv("tail_fit.csv", &["z", "g_minus_limit", "model"], &[&r, &w, &model])?;
    Ok(json!({ "airy_tail_fit": fit, "tv_growth_exponent": tv, "convergence_rate": q, "profile": profile_summary(&p) }))
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    value: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, expected, tolerance, pass: (value - expected).abs() <= tolerance }
    }
}

fn report_csv(out: &mut OutDir, name: &str, rep: &AdmissibilityReport) -> Result<()> {
    let p: Vec<f64> = rep.rows.iter().map(|r| r.param).collect();
    let s: Vec<f64> = rep.rows.iter().map(|r| r.sup.unwrap_or(f64::NAN)).collect();
    let l: Vec<f64> = rep.rows.iter().map(|r| r.l1.unwrap_or(f64::NAN)).collect();
    out.csv(name, &["param", "sup", "l1"], &[&p, &s, &l])
}

fn verdict_check(name: &str, rep: &AdmissibilityReport) -> Check {
    let last = rep.rows.last().and_then(|r| r.sup).unwrap_or(f64::INFINITY);
    let mut c = Check::new(name, last, 0.0, ADMISSIBILITY_TOL);
    c.pass = rep.verdict == AdmissibilityVerdict::NumericallyGAdmissible;
    c
}

/// Writes the data behind a figure and returns which features were checked.
pub fn reproduce(fig: Figure, settings: &OdeSettings, out: &mut OutDir) -> Result<Value> {
    let mut checks: Vec<Check> = Vec::new();
    let mut recorded: Vec<Value> = Vec::new();
    let plotted = match fig {
        Figure::F1 => {
            let p = shoot_profile(0.0, 1.0, settings)?;
            write_profile(out, "profile.csv", &p, (-50.0, 50.0))?;
            write_profile(out, "rarefaction.csv", &reflect_to_rarefaction(&p), (-50.0, 50.0))?;
            checks.push(Check::new("origin_slope", p.origin_slope, -0.51, 0.02));
            "shock profile and its reflection"
        }
        Figure::F2 => {
            for c in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let p = shoot_profile(0.0, c, settings)?;
                write_profile(out, &format!("profile_C{c}.csv"), &p, (-50.0, 0.0))?;
                checks.push(Check::new(&format!("far_limit_C{c}"), p.far_limit.unwrap_or(f64::NAN), c, 1e-3 * c));
            }
            "odd profiles for several far-field limits"
        }
        Figure::F3 => {
            for c in [-2.0, -1.0, -0.5] {
                let p = singular_point_family(5.0, c, settings)?;
                write_profile(out, &format!("profile_C{c}.csv"), &p, (-50.0, 50.0))?;
                recorded.push(json!({ "C": c, "far_limit": p.far_limit, "far_limit_plus": p.far_limit_plus }));
            }
            "non-symmetric profiles through a singular zero at z0 = 5; far-field pairs are recorded"
        }
        Figure::F4 => {
            for z0 in [1.0, 2.0, 3.0] {
                let p = interface_profile(0.0, z0, settings)?;
                write_profile(out, &format!("interface_z0_{z0}.csv"), &p, (-50.0, z0 + 5.0))?;
            }
            let h = solve_heaviside(settings)?;
            write_profile(out, "heaviside.csv", &h.profile, (-50.0, h.z0 + 5.0))?;
            checks.push(Check::new("heaviside_z0", h.z0, 2.192, 0.01));
            checks.push(Check::new("heaviside_h0", h.h0, 0.4197, 0.005));
            "interface profiles"
        }
        Figure::F41 => {
            let z0 = 1.0;
            let window = (-10.0, z0 + 5.0);
            let target = interface_profile(0.0, z0, settings)?;
            write_profile(out, "interface.csv", &target, window)?;
            let cs = [-1e-2, -3e-3, -1e-3, -3e-4, -1e-4];
            for &c in &cs[..3] {
                let p = singular_point_family_window(z0, c, window, settings)?;
                write_profile(out, &format!("family_C{c}.csv"), &p, window)?;
            }
            let rep = g_admissibility_report(
                &target,
                |c| singular_point_family_window(z0, c, window, settings),
                &cs,
                window,
                ADMISSIBILITY_TOL,
            );
            report_csv(out, "admissibility.csv", &rep)?;
            checks.push(verdict_check("singular_family_to_interface", &rep));
            "approximation of the interface by profiles through a singular zero"
        }
        Figure::F5 => {
            for alpha in [0.5, 0.2, -0.05] {
                let p = shoot_profile(alpha, 1.0, settings)?;
                write_profile(out, &format!("profile_alpha{alpha}.csv"), &p, (-30.0, 30.0))?;
            }
            "profiles for positive and negative alpha"
        }
        Figure::F55 => {
            for alpha in [-0.09, -0.05, 0.25, 1.0] {
                let p = origin_shot_profile(alpha, -1.0, 20.0, settings)?;
                write_profile(out, &format!("shot_alpha{alpha}.csv"), &p, (-20.0, 20.0))?;
            }
            "origin shots with unit slope for several alpha"
        }
        Figure::F6 => {
            for alpha in [-0.05, -0.09, -0.099, -0.09999] {
                let p = origin_shot_profile(alpha, -1.0, 50.0, settings)?;
                write_profile(out, &format!("shot_alpha{alpha}.csv"), &p, (-50.0, 0.0))?;
            }
            "profiles approaching the critical exponent"
        }
        Figure::F7 => {
            let saw = build_saw(1.0, 20)?;
            write_saw(out, "saw.csv", &saw)?;
            let (pz, ph): (Vec<f64>, Vec<f64>) = saw_peaks(&saw).into_iter().unzip();
            out.csv("saw_peaks.csv", &["z", "height"], &[&pz, &ph])?;
            let (_, e) = saw_envelope_fit(&saw)?;
            checks.push(Check::new("envelope_exponent", e, -1.0 / 3.0, 0.05));
            let p = origin_shot_profile(-0.09999, -1.0, 100.0, settings)?;
            write_profile(out, "shot_alpha-0.09999.csv", &p, (-100.0, 0.0))?;
            "saw profile and its tail"
        }
        Figure::F8 => {
            let z: Vec<f64> = (0..=400).map(|k| -10.0 + 0.05 * k as f64).collect();
            let one = invariant_cubic(InvariantCubic::I { c0: 0.0, c1: -1.0 });
            let two = invariant_cubic(InvariantCubic::II { c2: 0.3 });
            let g1: Vec<f64> = z.iter().map(|&s| one.value(s).expect("cubic")).collect();
            let g2: Vec<f64> = z.iter().map(|&s| two.value(s).expect("cubic")).collect();
            out.csv("invariant_cubics.csv", &["z", "kind_I", "kind_II"], &[&z, &g1, &g2])?;
            let r1 = z.iter().map(|&s| residual(&one, -0.1, s).abs()).fold(0.0, f64::max);
            let r2 = z.iter().map(|&s| residual(&two, -1.0, s).abs()).fold(0.0, f64::max);
            checks.push(Check::new("residual_kind_I", r1, 0.0, 1e-10));
            checks.push(Check::new("residual_kind_II", r2, 0.0, 1e-10));
            "two exact cubic solutions"
        }
        Figure::F9 => {
            let saw = build_saw(1.0, 6)?;
            write_saw(out, "saw.csv", &saw)?;
            let deltas = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
            for &d in &deltas[..4] {
                let p = origin_shot_profile(-0.1 + d, -1.0, 21.0, settings)?;
                write_profile(out, &format!("shot_delta{d}.csv"), &p, (-20.0, 0.0))?;
            }
            let rep = g_admissibility_report(
                &saw,
                |d| origin_shot_profile(-0.1 + d, -1.0, 21.0, settings),
                &deltas,
                (-20.0, 0.0),
                ADMISSIBILITY_TOL,
            );
            report_csv(out, "admissibility.csv", &rep)?;
            checks.push(verdict_check("shots_to_saw", &rep));
            "local convergence of smooth shots to the saw"
        }
        Figure::F10 => {
            for alpha in [-0.11, -0.15, -0.2] {
                let orbit = shoot_from_origin(SimilarityParams::blowup(alpha), -1.0, -30.0, settings)?;
                out.csv(&format!("orbit_alpha{alpha}.csv"), &["z", "g"], &[&orbit.z, &orbit.g])?;
                let (z, g) = terminal_samples(&orbit, 0.05);
                let sqrt = detect_singularity(&z, &g)
                    .map(|f| f.classification == crate::profiles::Classification::SqrtSingularity)
                    .unwrap_or(false);
                checks.push(Check::new(&format!("sqrt_singularity_alpha{alpha}"), f64::from(u8::from(sqrt)), 1.0, 0.0));
            }
            "orbits ending in a square-root zero below the critical exponent"
        }
    };
    let manifest = json!({
        "figure": fig.name(),
        "plotted": plotted,
        "checked": checks,
        "recorded": recorded,
        "all_checks_pass": checks.iter().all(|c| c.pass),
        "files": out.written().iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    out.json("manifest.json", &manifest)?;
    Ok(manifest)
}

fn write_gnuplot(out: &mut OutDir) -> Result<()> {
    let mut script = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    for p in out.written().to_vec() {
        if p.extension().is_some_and(|e| e == "csv") {
            script.push_str(&format!("plot '{}' using 1:2 with lines\npause -1\n", p.display()));
        }
    }
    out.text("plot.gp", &script)
}
