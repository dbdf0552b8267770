//! Command-line front end: spectra, counts, asymptotic constants, averaged
//! errors, profiles, frequency scans and the oracle and conjecture checks.

pub mod conjecture;
pub mod grammar;
pub mod table;

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use surfspec::analysis::{self, amplitude_curve, frequency_spectrum, symmetry_proportions, APProfile};
use surfspec::asymptotics::{fixture_specs, heat_cutoff, heat_trace, refined_for};
use surfspec::average::{self, g_samples, sphere_g_samples, x_of_t, AvgEvaluator};
use surfspec::catalog::geodesic_lengths;
use surfspec::oracle::{check_equivalence, random_sweep};
use surfspec::spectrum::{count_report, levels};
use surfspec::{Exact, SectorBase, SurfaceSpec};

pub use grammar::parse_spec;
pub use table::{Cell, Format, Table};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "surfspec", version, about = "Laplace spectra and refined counting asymptotics of surfaces")]
pub struct Cli {
    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the reference surfaces with their canonical labels.
    List,
    /// Eigenvalue levels up to T: `value,key,multiplicity`.
    Spectrum {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        #[arg(long, value_parser = positive)]
        max_t: f64,
    },
    /// Counting function with its closed form where one exists.
    Count {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        #[arg(long, value_delimiter = ',', required = true, value_parser = non_negative)]
        at: Vec<f64>,
    },
    /// Refined constants A, B, C and the parts C1, C2, C3 of C.
    Asymptotics {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
    },
    /// Averaged error A(t) on a grid of t.
    Avg {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Rescaled profile g on a grid of x.
    Gprofile {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        #[command(flatten)]
        grid: GridArgs,
        /// Sphere only: 2 and 3 expose the lower-order profiles.
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// Amplitude of the profile against frequency.
    Freq {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        /// Profile window `x0:x1`.
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
        /// Frequency grid `w0:w1:n`.
        #[arg(long, value_parser = parse_grid)]
        omega: (f64, f64, usize),
        /// Spacing of the profile samples in x.
        #[arg(long, default_value_t = 0.01, value_parser = positive)]
        step: f64,
        /// Print the extracted peaks and their nearest geodesic lengths instead.
        #[arg(long)]
        peaks: bool,
    },
    /// Share of each symmetry type, `base` one of squaretorus, squareN,
    /// squareD, hextorus, equilateralN, equilateralD.
    Proportions {
        #[arg(value_parser = grammar::parse_base)]
        base: SectorBase,
        #[arg(long, value_parser = positive)]
        max_t: f64,
    },
    /// Compare counts with a brute-force mode enumeration.
    Verify {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        #[arg(long, value_parser = positive)]
        max_t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random points checked in addition to every jump and midpoint.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Heat trace against its three-term expansion.
    Heat {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.02,0.01", value_parser = positive)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 1e-14, value_parser = positive)]
        tol: f64,
    },
    /// Mean value, decay and frequency checks on one surface.
    Conjecture {
        #[arg(value_parser = parse_spec)]
        spec: SurfaceSpec,
        /// Largest t used; defaults to 1e6 on spherical surfaces and 1e7 on flat ones.
        #[arg(long, value_parser = positive)]
        max_t: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// `lo:hi:n`, inclusive.
    #[arg(long, value_parser = parse_grid)]
    pub grid: (f64, f64, usize),
    /// Geometric instead of linear spacing.
    #[arg(long)]
    pub log: bool,
}

impl GridArgs {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        let (lo, hi, n) = self.grid;
        if self.log {
            if !(lo > 0.0) {
                return Err(format!("--log needs a positive lower end, got {}", lo));
            }
            let pts = analysis::grid(lo.ln(), hi.ln(), n).map_err(|e| e.to_string())?;
            let mut pts: Vec<f64> = pts.into_iter().map(f64::exp).collect();
            pts[0] = lo;
            if n > 1 {
                pts[n - 1] = hi;
            }
            Ok(pts)
        } else {
            analysis::grid(lo, hi, n).map_err(|e| e.to_string())
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {:?}", s)),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got {:?}", s)),
    }
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("{:?} is not a number", s))
}

/// `lo:hi` with `0 <= lo < hi`.
pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {:?}", s))?;
    let (lo, hi) = (number(lo)?, number(hi)?);
    if !(lo >= 0.0 && hi > lo) {
        return Err(format!("range {} to {} must be non-negative and ascending", lo, hi));
    }
    Ok((lo, hi))
}

/// `lo:hi:n` with `n >= 1`; `n = 1` requires `lo = hi`.
pub fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected lo:hi:n, got {:?}", s));
    };
    let (lo, hi) = (number(lo)?, number(hi)?);
    let n: usize = n.parse().map_err(|_| format!("grid size {:?} is not a positive integer", n))?;
    if n == 0 {
        return Err("grid size must be at least 1".into());
    }
    if !(lo >= 0.0) || hi < lo || (n == 1 && hi != lo) || (n > 1 && hi == lo) {
        return Err(format!("range {} to {} with {} points must be non-negative and ascending", lo, hi, n));
    }
    Ok((lo, hi, n))
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{}", rendered);
            } else {
                let _ = write!(out, "{}", rendered);
            }
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {}", msg);
            EXIT_USAGE
        }
    }
}

type Outcome = Result<i32, String>;

fn emit(table: &Table, format: Format, out: &mut dyn Write) -> Outcome {
    table.write(format, out).map_err(|e| e.to_string())?;
    Ok(EXIT_PASS)
}

fn lib<T>(r: surfspec::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::List => {
            let mut t = Table::new(&["label", "family", "spherical", "boundary"]);
            for spec in fixture_specs() {
                t.push(vec![
                    spec.label().into(),
                    spec.family_name().into(),
                    yes_no(spec.is_spherical()),
                    yes_no(spec.has_boundary()),
                ]);
            }
            emit(&t, format, out)
        }
        Command::Spectrum { spec, max_t } => {
            let mut t = Table::new(&["value", "key", "multiplicity"]);
            for l in lib(levels(spec, *max_t))? {
                t.push(vec![l.value.into(), l.key.into(), l.mult.into()]);
            }
            emit(&t, format, out)
        }
        Command::Count { spec, at } => {
            let mut t = Table::new(&["t", "count", "closed_form"]);
            for &x in at {
                let r = lib(count_report(spec, x))?;
                t.push(vec![x.into(), r.count.into(), r.closed_form.into()]);
            }
            emit(&t, format, out)
        }
        Command::Asymptotics { spec } => {
            let rc = lib(refined_for(spec))?;
            let mut t = Table::new(&["constant", "symbolic", "decimal"]);
            let c1 = Exact::rational(rc.c1);
            for (name, v) in [("A", &rc.a), ("B", &rc.b), ("C", &rc.c), ("C1", &c1), ("C2", &rc.c2), ("C3", &rc.c3)] {
                t.push(vec![name.into(), v.to_string().into(), v.to_f64().into()]);
            }
            let sqrt = if rc.shifted_sqrt { "sqrt(t+1/4)" } else { "sqrt(t)" };
            t.push(vec!["sqrt_term".into(), sqrt.into(), Cell::Empty]);
            emit(&t, format, out)
        }
        Command::Avg { spec, grid } => {
            let ts = grid.points()?;
            if ts[0] <= 0.0 {
                return Err("avg needs t > 0 on the whole grid".into());
            }
            let ev = lib(AvgEvaluator::new(spec, ts[ts.len() - 1]))?;
            let mut t = Table::new(&["t", "avg", "gx", "g_est"]);
            for &x in &ts {
                let gx = x_of_t(spec, x);
                t.push(vec![x.into(), ev.avg(x).into(), gx.into(), ev.g_est(gx).into()]);
            }
            emit(&t, format, out)
        }
        Command::Gprofile { spec, grid, order } => {
            let xs = grid.points()?;
            let samples = match (spec, order) {
                (_, 1) => lib(g_samples(spec, &xs))?,
                (SurfaceSpec::Sphere, _) => lib(sphere_g_samples(&xs, *order))?,
                _ => return Err(format!("--order {} is only available on the sphere", order)),
            };
            let mut t = Table::new(&["x", "t", "g_est", "order"]);
            for s in samples {
                t.push(vec![s.x.into(), average::t_of_x(spec, s.x).into(), s.g_est.into(), u64::from(s.order).into()]);
            }
            emit(&t, format, out)
        }
        Command::Freq { spec, window, omega, step, peaks } => {
            let n = ((window.1 - window.0) / step).round() as usize + 1;
            if n < 2 {
                return Err(format!("window {}:{} holds fewer than two samples at step {}", window.0, window.1, step));
            }
            if average::t_of_x(spec, window.0) <= 0.0 {
                return Err(format!("window start {} gives t <= 0", window.0));
            }
            let profile = lib(APProfile::for_spec(spec, window.0, window.1, n))?;
            let omegas = lib(analysis::grid(omega.0, omega.1, omega.2))?;
            if *peaks {
                let found = lib(frequency_spectrum(&profile, &omegas))?.frequencies;
                let lengths = geodesic_lengths(spec, omega.1 * 1.1).ok();
                let mut t = Table::new(&["omega", "amplitude", "phase", "nearest_length"]);
                for f in found {
                    let near = lengths.as_ref().and_then(|ls| {
                        ls.iter().copied().min_by(|a, b| (a - f.omega).abs().total_cmp(&(b - f.omega).abs()))
                    });
                    t.push(vec![f.omega.into(), f.amplitude.into(), f.phase.into(), near.into()]);
                }
                emit(&t, format, out)
            } else {
                let mut t = Table::new(&["omega", "amplitude"]);
                for f in lib(amplitude_curve(&profile, &omegas))? {
                    t.push(vec![f.omega.into(), f.amplitude.into()]);
                }
                emit(&t, format, out)
            }
        }
        Command::Proportions { base, max_t } => {
            let mut t =
                Table::new(&["irrep", "count", "total", "measured", "predicted", "b_fit", "b_sign", "b_sign_expected"]);
            for r in lib(symmetry_proportions(*base, *max_t))? {
                t.push(vec![
                    r.irrep.name().into(),
                    r.count.into(),
                    r.total.into(),
                    r.measured.into(),
                    r.predicted.into(),
                    r.b_fit.into(),
                    i64::from(r.b_sign).into(),
                    i64::from(r.b_sign_expected).into(),
                ]);
            }
            emit(&t, format, out)
        }
        Command::Verify { spec, max_t, seed, samples } => verify(spec, *max_t, *seed, *samples, format, out, err),
        Command::Heat { spec, at, tol } => {
            let rc = lib(refined_for(spec))?;
            let mut t = Table::new(&["t", "trace", "companion", "difference", "tail_bound", "cutoff"]);
            for &x in at {
                let h = lib(heat_trace(spec, x, heat_cutoff(&rc, x, *tol), *tol))?;
                t.push(vec![
                    x.into(),
                    h.value.into(),
                    h.companion.into(),
                    (h.value - h.companion).into(),
                    h.tail_bound.into(),
                    h.cutoff.into(),
                ]);
            }
            emit(&t, format, out)
        }
        Command::Conjecture { spec, max_t } => {
            let report = conjecture::run(spec, *max_t)?;
            report.write(format, out).map_err(|e| e.to_string())?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn yes_no(b: bool) -> Cell {
    if b { "yes" } else { "no" }.into()
}

/// Prints `pass` or `fail` on stdout; timing goes to stderr so that the
/// standard output is reproducible.
fn verify(
    spec: &SurfaceSpec,
    max_t: f64,
    seed: u64,
    samples: usize,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let start = Instant::now();
    let rep = lib(check_equivalence(spec, max_t))?;
    let bad = lib(random_sweep(spec, max_t, samples, seed))?;
    let elapsed = start.elapsed().as_secs_f64();
    let passed = rep.passed() && bad == 0;
    let verdict = if passed { "pass" } else { "fail" };
    let mismatch =
        rep.first_mismatch.as_ref().map(|m| format!("t={} {}={} oracle={}", m.t, m.source, m.closed, m.brute));
    match format {
        Format::Csv => {
            writeln!(out, "{}", verdict).map_err(|e| e.to_string())?;
            if let Some(m) = &mismatch {
                writeln!(out, "first mismatch: {}", m).map_err(|e| e.to_string())?;
            }
            if bad > 0 {
                writeln!(out, "random points disagreeing: {}", bad).map_err(|e| e.to_string())?;
            }
        }
        Format::Json => {
            let v = serde_json::json!({
                "spec": spec.label(),
                "result": verdict,
                "max_t": max_t,
                "levels": rep.levels,
                "points_checked": rep.points_checked,
                "random_points": samples,
                "random_failures": bad,
                "seed": seed,
                "first_mismatch": mismatch,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
        }
    }
    let _ = writeln!(
        err,
        "{}: {} levels, {} jump/midpoint checks, {} random points in {:.3} s",
        spec, rep.levels, rep.points_checked, samples, elapsed
    );
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}
