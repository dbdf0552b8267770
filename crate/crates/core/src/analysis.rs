//! Structure of the profile `g`: mean value, almost periods, frequency
//! content against closed geodesics, and symmetry-type proportions.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::asymptotics::refined_for;
use crate::average::{self, GSample};
use crate::catalog::{Irrep, SectorBase, SurfaceSpec};
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequency {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Sampled profile over a window of `x`, with extracted frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct APProfile {
    pub samples: Vec<GSample>,
    pub window: (f64, f64),
    /// Sorted by amplitude, largest first.
    pub frequencies: Vec<Frequency>,
}

impl APProfile {
    pub fn new(samples: Vec<GSample>) -> Result<APProfile> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples(samples.len(), 2));
        }
        if samples.windows(2).any(|w| w[1].x <= w[0].x) {
            return Err(Error::InvalidArgument("profile samples must be strictly ascending in x".into()));
        }
        let window = (samples[0].x, samples[samples.len() - 1].x);
        Ok(APProfile { samples, window, frequencies: Vec::new() })
    }

    /// `n` equally spaced samples of `g_est` on `[x_lo, x_hi]`.
    pub fn for_spec(spec: &SurfaceSpec, x_lo: f64, x_hi: f64, n: usize) -> Result<APProfile> {
        APProfile::new(average::g_samples(spec, &grid(x_lo, x_hi, n)?)?)
    }

    /// Samples of an arbitrary function, for synthetic checks.
    pub fn from_fn(f: impl Fn(f64) -> f64, x_lo: f64, x_hi: f64, n: usize) -> Result<APProfile> {
        let samples = grid(x_lo, x_hi, n)?.into_iter().map(|x| GSample { x, g_est: f(x), order: 1 }).collect();
        APProfile::new(samples)
    }

    pub fn len(&self) -> f64 {
        self.window.1 - self.window.0
    }

    /// Linear interpolation of the samples.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        if x < self.window.0 || x > self.window.1 {
            return None;
        }
        let i = self.samples.partition_point(|s| s.x <= x);
        if i == 0 {
            return Some(self.samples[0].g_est);
        }
        if i == self.samples.len() {
            return Some(self.samples[i - 1].g_est);
        }
        let (a, b) = (self.samples[i - 1], self.samples[i]);
        let w = (x - a.x) / (b.x - a.x);
        Some(a.g_est + w * (b.g_est - a.g_est))
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(hi >= lo) || (n == 1 && hi != lo) {
        return Err(Error::InvalidArgument(format!("bad grid {}:{}:{}", lo, hi, n)));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

pub const MIN_MEAN_SAMPLES: usize = 100;

/// Trapezoidal mean of `g_est` over the window.
pub fn window_mean(profile: &APProfile) -> Result<f64> {
    let s = &profile.samples;
    if s.len() < MIN_MEAN_SAMPLES {
        return Err(Error::TooFewSamples(s.len(), MIN_MEAN_SAMPLES));
    }
    let integral: f64 = s.windows(2).map(|w| 0.5 * (w[0].g_est + w[1].g_est) * (w[1].x - w[0].x)).sum();
    Ok(integral / profile.len())
}

/// Trapezoidal weights of the samples, divided by `L / 2`.
fn weights(profile: &APProfile) -> Vec<f64> {
    let s = &profile.samples;
    let k = 1.0 / profile.len();
    (0..s.len())
        .map(|i| {
            let left = if i > 0 { s[i].x - s[i - 1].x } else { 0.0 };
            let right = if i + 1 < s.len() { s[i + 1].x - s[i].x } else { 0.0 };
            k * (left + right) * s[i].g_est
        })
        .collect()
}

/// Common spacing of the samples, if they are equally spaced.
fn uniform_step(profile: &APProfile) -> Option<f64> {
    let s = &profile.samples;
    let h = (s[s.len() - 1].x - s[0].x) / (s.len() - 1) as f64;
    let uniform = s.iter().enumerate().all(|(i, p)| (p.x - (s[0].x + i as f64 * h)).abs() <= 1e-9 * h);
    uniform.then_some(h)
}

/// `(2/L) int g(x) e^{-i omega x} dx` by the trapezoidal rule, as
/// `(amplitude, phase)`.
fn coefficient(profile: &APProfile, weights: &[f64], omega: f64) -> (f64, f64) {
    const ANCHOR: usize = 256;
    let (mut re, mut im) = (0.0, 0.0);
    match uniform_step(profile) {
        Some(h) => {
            let x0 = profile.samples[0].x;
            let (rs, rc) = (-omega * h).sin_cos();
            for (block, ws) in weights.chunks(ANCHOR).enumerate() {
                let (sin, cos) = (-omega * (x0 + (block * ANCHOR) as f64 * h)).sin_cos();
                let (mut c, mut sn) = (cos, sin);
                for w in ws {
                    re += w * c;
                    im += w * sn;
                    let next = c * rc - sn * rs;
                    sn = sn * rc + c * rs;
                    c = next;
                }
            }
        }
        None => {
            for (s, w) in profile.samples.iter().zip(weights) {
                let (sin, cos) = (omega * s.x).sin_cos();
                re += w * cos;
                im -= w * sin;
            }
        }
    }
    (re.hypot(im), im.atan2(re))
}

/// Amplitude and phase on every point of `omega_grid`.
pub fn amplitude_curve(profile: &APProfile, omega_grid: &[f64]) -> Result<Vec<Frequency>> {
    let limit = 2.0 * std::f64::consts::PI / profile.len();
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("omega grid must be strictly ascending".into()));
    }
    if let Some(spacing) = omega_grid.windows(2).map(|w| w[1] - w[0]).reduce(f64::max) {
        if spacing > limit * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse { spacing, limit });
        }
    }
    let w = weights(profile);
    Ok(omega_grid
        .par_iter()
        .map(|&omega| {
            let (amplitude, phase) = coefficient(profile, &w, omega);
            Frequency { omega, amplitude, phase }
        })
        .collect())
}

/// Local maxima of the amplitude above three times its median, refined
/// by golden-section search between the neighbouring grid points. A
/// maximum is kept only if it also clears the rectangular-window sidelobe
/// envelope `a min(1, 2 / (L |omega - omega_0|))` of every stronger peak
/// already kept by a factor [`SIDELOBE_MARGIN`].
pub fn frequency_spectrum(profile: &APProfile, omega_grid: &[f64]) -> Result<APProfile> {
    let curve = amplitude_curve(profile, omega_grid)?;
    let w = weights(profile);
    let mut amps: Vec<f64> = curve.iter().map(|f| f.amplitude).collect();
    amps.sort_by(f64::total_cmp);
    let floor = 3.0 * amps.get(amps.len() / 2).copied().unwrap_or(0.0);
    let mut peaks = Vec::new();
    for i in 0..curve.len() {
        let a = curve[i].amplitude;
        let left = i == 0 || curve[i - 1].amplitude < a;
        let right = i + 1 == curve.len() || curve[i + 1].amplitude <= a;
        if left && right && a > floor {
            let lo = if i == 0 { curve[i].omega } else { curve[i - 1].omega };
            let hi = if i + 1 == curve.len() { curve[i].omega } else { curve[i + 1].omega };
            peaks.push(refine_peak(profile, &w, lo, hi));
        }
    }
    peaks.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    let len = profile.len();
    let mut kept: Vec<Frequency> = Vec::new();
    for p in peaks {
        let leak: f64 = kept
            .iter()
            .map(|k| {
                let d = len * (p.omega - k.omega).abs();
                k.amplitude * (2.0 / d).min(1.0)
            })
            .sum();
        if p.amplitude > SIDELOBE_MARGIN * leak {
            kept.push(p);
        }
    }
    let mut out = profile.clone();
    out.frequencies = kept;
    Ok(out)
}

pub const SIDELOBE_MARGIN: f64 = 1.5;

fn refine_peak(profile: &APProfile, weights: &[f64], mut lo: f64, mut hi: f64) -> Frequency {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let amp = |w: f64| coefficient(profile, weights, w).0;
    let (mut c, mut d) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut fc, mut fd) = (amp(c), amp(d));
    for _ in 0..40 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = amp(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = amp(d);
        }
    }
    let omega = 0.5 * (lo + hi);
    let (amplitude, phase) = coefficient(profile, weights, omega);
    Frequency { omega, amplitude, phase }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchReport {
    /// `(frequency, length)` pairs.
    pub matched: Vec<(f64, f64)>,
    pub unmatched_freqs: Vec<f64>,
    pub unmatched_lengths: Vec<f64>,
}

/// Greedy nearest-first matching of frequencies to geodesic lengths.
pub fn match_geodesics(freqs: &[f64], lengths: &[f64], tol: f64) -> MatchReport {
    let mut pairs = Vec::new();
    for (i, f) in freqs.iter().enumerate() {
        for (j, l) in lengths.iter().enumerate() {
            let d = (f - l).abs();
            if d <= tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used_f = vec![false; freqs.len()];
    let mut used_l = vec![false; lengths.len()];
    let mut matched = Vec::new();
    for (_, i, j) in pairs {
        if !used_f[i] && !used_l[j] {
            used_f[i] = true;
            used_l[j] = true;
            matched.push((freqs[i], lengths[j]));
        }
    }
    matched.sort_by(|a, b| a.1.total_cmp(&b.1));
    MatchReport {
        matched,
        unmatched_freqs: freqs.iter().zip(&used_f).filter(|p| !p.1).map(|p| *p.0).collect(),
        unmatched_lengths: lengths.iter().zip(&used_l).filter(|p| !p.1).map(|p| *p.0).collect(),
    }
}

/// `sup |g(x + period) - g(x)|` over the window.
pub fn almost_period_check(profile: &APProfile, period: f64) -> Result<f64> {
    if !(period > 0.0) || profile.len() < 3.0 * period {
        return Err(Error::WindowTooShort { window: profile.len(), needed: 3.0 * period });
    }
    let mut sup = 0.0f64;
    for s in &profile.samples {
        match profile.value_at(s.x + period) {
            Some(v) => sup = sup.max((v - s.g_est).abs()),
            None => break,
        }
    }
    Ok(sup)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProportionReport {
    pub irrep: Irrep,
    pub count: u64,
    pub total: u64,
    /// `count / total`.
    pub measured: f64,
    /// `d^2 / #G`.
    pub predicted: f64,
    /// Fitted coefficient of `t^{1/2}` in `N_j(t) - A_j t`.
    pub b_fit: f64,
    pub b_sign: i8,
    /// Sign of the refined-asymptotics coefficient `B_j`.
    pub b_sign_expected: i8,
}

/// Fitted `|b|` below this is reported as sign 0.
pub const B_SIGN_THRESHOLD: f64 = 0.01;

const FIT_SAMPLES: usize = 4000;

/// Proportions of each symmetry type up to `t_max`, and the sign of the
/// `t^{1/2}` term fitted over `[t_max/10, t_max]`.
pub fn symmetry_proportions(base: SectorBase, t_max: f64) -> Result<Vec<ProportionReport>> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {}", t_max)));
    }
    let total_spec = base.surface();
    let total = Spectrum::build(&total_spec, t_max)?;
    let n_total = total.count(t_max);
    let order = if base.is_d4() { 8.0 } else { 6.0 };
    let ts = grid(t_max / 10.0, t_max, FIT_SAMPLES)?;
    base.irreps()
        .par_iter()
        .map(|&irrep| {
            let spec = SurfaceSpec::SymmetrySector { base, irrep };
            let sector = Spectrum::build(&spec, t_max)?;
            let rc = refined_for(&spec)?;
            let a = rc.a_f64();
            let b_exact = rc.b_f64();
            let count = sector.count(t_max);
            let rows = DMatrix::from_fn(ts.len(), 2, |i, j| if j == 0 { ts[i].sqrt() } else { 1.0 });
            let ys = DVector::from_iterator(ts.len(), ts.iter().map(|&t| sector.count(t) as f64 - a * t));
            let sol = rows.svd(true, true).solve(&ys, 1e-14).expect("svd solve");
            let b_fit = sol[0];
            let d = irrep.dim() as f64;
            Ok(ProportionReport {
                irrep,
                count,
                total: n_total,
                measured: count as f64 / n_total as f64,
                predicted: d * d / order,
                b_fit,
                b_sign: sign(b_fit, B_SIGN_THRESHOLD),
                b_sign_expected: sign(b_exact, 1e-12),
            })
        })
        .collect()
}

fn sign(x: f64, eps: f64) -> i8 {
    if x > eps {
        1
    } else if x < -eps {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn mean_of_constant_and_sphere() {
        let c = APProfile::from_fn(|_| 0.7, 0.0, 10.0, 200).unwrap();
        assert_abs_diff_eq!(window_mean(&c).unwrap(), 0.7, epsilon = 1e-12);
        let g = APProfile::from_fn(average::sphere_g, 3.0, 4.0, 100_001).unwrap();
        assert_abs_diff_eq!(window_mean(&g).unwrap(), 0.0, epsilon = 1e-8);
        let short = APProfile::from_fn(|_| 1.0, 0.0, 1.0, 50).unwrap();
        assert!(matches!(window_mean(&short), Err(Error::TooFewSamples(..))));
    }

    #[test]
    fn pure_tone_has_one_peak() {
        let p = APProfile::from_fn(|x| (3.0 * x).sin(), 0.0, 200.0, 20_001).unwrap();
        let grid = grid(0.5, 6.0, 400).unwrap();
        let f = frequency_spectrum(&p, &grid).unwrap();
        assert_eq!(f.frequencies.len(), 1);
        assert!((f.frequencies[0].omega - 3.0).abs() < 0.014);
        assert!((f.frequencies[0].amplitude - 1.0).abs() < 0.05);
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = APProfile::from_fn(|x| x.cos(), 0.0, 10.0, 1000).unwrap();
        let coarse = grid(0.0, 10.0, 5).unwrap();
        assert!(matches!(frequency_spectrum(&p, &coarse), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn geodesic_matching_examples() {
        let lengths = [2.0, 2.0 * 2f64.sqrt(), 4.0];
        let r = match_geodesics(&[2.01, 2.83], &lengths, 0.05);
        assert_eq!(r.matched.len(), 2);
        assert_eq!(r.unmatched_lengths, vec![4.0]);
        let r = match_geodesics(&[], &lengths, 0.05);
        assert_eq!(r.unmatched_lengths.len(), 3);
        let r = match_geodesics(&[6.28, 12.57], &[2.0 * PI, 4.0 * PI], 0.05);
        assert_eq!(r.matched.len(), 2);
    }

    #[test]
    fn almost_periods() {
        let c = APProfile::from_fn(|_| 2.0, 0.0, 10.0, 100).unwrap();
        assert_eq!(almost_period_check(&c, 1.3).unwrap(), 0.0);
        let g = APProfile::from_fn(average::sphere_g, 0.0, 10.0, 10_001).unwrap();
        assert!(almost_period_check(&g, 1.0).unwrap() < 1e-9);
        assert!(almost_period_check(&g, 0.5).unwrap() > 0.45);
        assert!(matches!(almost_period_check(&g, 4.0), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn sphere_profile_structure() {
        let p = APProfile::for_spec(&SurfaceSpec::Sphere, 100.0, 200.0, 20_001).unwrap();
        assert!(window_mean(&p).unwrap().abs() <= 0.01);
        assert!(almost_period_check(&p, 1.0).unwrap() <= 0.02);
        assert!(almost_period_check(&p, 0.5).unwrap() >= 0.2);
        let f = frequency_spectrum(&p, &grid(1.0, 14.0, 2000).unwrap()).unwrap();
        let top: Vec<f64> = f.frequencies.iter().take(2).map(|f| f.omega).collect();
        let r = match_geodesics(&top, &[2.0 * PI, 4.0 * PI], 0.05);
        assert_eq!(r.matched.len(), 2, "{:?}", f.frequencies);
    }

    #[test]
    fn square_torus_proportions() {
        let reports = symmetry_proportions(SectorBase::SquareTorus, 2e4).unwrap();
        let total: u64 = reports.iter().map(|r| r.count).sum();
        assert_eq!(total, reports[0].total);
        for r in &reports {
            assert!((r.measured - r.predicted).abs() < 0.03, "{:?}", r);
        }
    }
}
