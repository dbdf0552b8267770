//! Structural checks on the averaged error of one surface: the profile has
//! mean zero, the remainder decays (spherical) or stays bounded (flat),
//! and the strongest frequencies are closed-geodesic lengths.

use std::io::Write;

use surfspec::analysis::{frequency_spectrum, grid, window_mean, APProfile};
use surfspec::average::{default_leading, remainder_fit, x_of_t, AvgEvaluator};
use surfspec::catalog::geodesic_lengths;
use surfspec::SurfaceSpec;

use crate::table::{Cell, Format, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub spec: SurfaceSpec,
    pub t_max: f64,
    pub checks: Vec<Check>,
}

/// Allowed `|mean|` over `[X, 2X]` is `MEAN_FACTOR / X`.
pub const MEAN_FACTOR: f64 = 5.0;
/// Accepted log-log slopes of the spherical remainder.
pub const SLOPE_RANGE: (f64, f64) = (-0.65, -0.35);
/// Largest ratio of the flat sup norms over the last two decades.
pub const DECADE_RATIO: f64 = 2.0;
/// Distance within which a peak counts as a geodesic length.
pub const PEAK_TOLERANCE: f64 = 0.05;
/// Number of strongest peaks that must be geodesic lengths.
pub const PEAKS_CHECKED: usize = 3;

const PROFILE_STEP: f64 = 0.01;
const OMEGA_STEP: f64 = 0.005;
const SUP_STEP: f64 = 0.005;
/// Frequency band scanned; peaks at its ends are edge effects and ignored.
const W_LO: f64 = 0.5;
const W_HI: f64 = 14.0;

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["check", "status", "detail"]);
        for c in &self.checks {
            t.push(vec![c.name.into(), c.status.name().into(), c.detail.clone().into()]);
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        t.push(vec!["conjecture".into(), verdict.into(), Cell::Text(format!("{} up to t={}", self.spec, self.t_max))]);
        t
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        self.table().write(format, out)
    }
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check { name, status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn err(e: surfspec::Error) -> String {
    e.to_string()
}

pub fn run(spec: &SurfaceSpec, t_max: Option<f64>) -> Result<Report, String> {
    let t_max = t_max.unwrap_or(if spec.is_spherical() { 1e6 } else { 1e7 });
    let x_top = x_of_t(spec, t_max);
    if x_top < 40.0 {
        return Err(format!("conjecture needs t up to at least {}, got {}", 1600.0, t_max));
    }
    let ev = AvgEvaluator::new(spec, t_max).map_err(err)?;
    let checks = vec![
        mean_check(spec, &ev, x_top)?,
        if spec.is_spherical() { decay_check(spec, t_max)? } else { bounded_check(&ev, t_max) },
        frequency_check(spec, &ev, x_top)?,
    ];
    Ok(Report { spec: spec.clone(), t_max, checks })
}

fn profile(ev: &AvgEvaluator, x0: f64, x1: f64) -> Result<APProfile, String> {
    let n = ((x1 - x0) / PROFILE_STEP).round() as usize + 1;
    let xs = grid(x0, x1, n).map_err(err)?;
    let samples = xs.iter().map(|&x| surfspec::average::GSample { x, g_est: ev.g_est(x), order: 1 }).collect();
    APProfile::new(samples).map_err(err)
}

fn mean_check(spec: &SurfaceSpec, ev: &AvgEvaluator, x_top: f64) -> Result<Check, String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for x in [x_top / 4.0, x_top / 2.0] {
        let x0 = x.max(x_of_t(spec, 1.0));
        let m = window_mean(&profile(ev, x0, 2.0 * x)?).map_err(err)?;
        ok &= m.abs() <= MEAN_FACTOR / x;
        parts.push(format!("X={:.1} mean={:.3e} bound={:.3e}", x, m, MEAN_FACTOR / x));
    }
    Ok(check("mean", ok, parts.join("; ")))
}

fn decay_check(spec: &SurfaceSpec, t_max: f64) -> Result<Check, String> {
    let fit = remainder_fit(spec, t_max / 1000.0, t_max, default_leading(spec)).map_err(err)?;
    let ok = fit.slope >= SLOPE_RANGE.0 && fit.slope <= SLOPE_RANGE.1;
    Ok(check("decay", ok, format!("remainder slope {:.3}", fit.slope)))
}

fn bounded_check(ev: &AvgEvaluator, t_max: f64) -> Check {
    let sup = |t0: f64, t1: f64| {
        let (x0, x1) = (t0.sqrt(), t1.sqrt());
        let n = ((x1 - x0) / SUP_STEP) as usize;
        (0..=n)
            .map(|i| {
                let x = x0 + (x1 - x0) * i as f64 / n as f64;
                (ev.avg((x * x).min(t1)) * x.sqrt()).abs()
            })
            .fold(0.0f64, f64::max)
    };
    let (low, high) = (sup(t_max / 1e4, t_max / 10.0), sup(t_max / 10.0, t_max));
    let ratio = low.max(high) / low.min(high);
    let ok = high.is_finite() && ratio <= DECADE_RATIO;
    check("bounded", ok, format!("sup |A| t^(1/4): {:.4} then {:.4}, ratio {:.3}", low, high, ratio))
}

fn frequency_check(spec: &SurfaceSpec, ev: &AvgEvaluator, x_top: f64) -> Result<Check, String> {
    let skip = |detail: &str| Ok(Check { name: "frequencies", status: Status::Skip, detail: detail.into() });
    let Ok(lengths) = geodesic_lengths(spec, W_HI + 1.0) else {
        return skip("no closed-geodesic list");
    };
    if lengths.is_empty() {
        return skip("no closed geodesic in the scanned band");
    }
    let (x0, x1) = ((x_top / 5.0).max(x_top - 800.0), x_top);
    let p = profile(ev, x0, x1)?;
    let n = ((W_HI - W_LO) / OMEGA_STEP) as usize + 1;
    let omegas = grid(W_LO, W_HI, n).map_err(err)?;
    let found: Vec<_> = frequency_spectrum(&p, &omegas)
        .map_err(err)?
        .frequencies
        .into_iter()
        .filter(|f| f.omega > W_LO + PEAK_TOLERANCE && f.omega < W_HI - PEAK_TOLERANCE)
        .collect();
    let mut ok = !found.is_empty();
    let mut parts = Vec::new();
    for f in found.iter().take(PEAKS_CHECKED) {
        let near = lengths.iter().copied().min_by(|a, b| (a - f.omega).abs().total_cmp(&(b - f.omega).abs()));
        let hit = near.is_some_and(|l| (l - f.omega).abs() <= PEAK_TOLERANCE);
        ok &= hit;
        match near {
            Some(l) => parts.push(format!("{:.4}~{:.4}{}", f.omega, l, if hit { "" } else { "!" })),
            None => parts.push(format!("{:.4}!", f.omega)),
        }
    }
    Ok(check("frequencies", ok, format!("x in [{:.0}, {:.0}]: {}", x0, x1, parts.join(" "))))
}
