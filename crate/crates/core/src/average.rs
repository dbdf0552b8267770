//! Averaged error `A(t) = (1/t) * int_0^t (N(s) - Ñ(s)) ds` and the rescaled
//! profiles `g` of its oscillation.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::asymptotics::{refined_for, RefinedConstants};
use crate::catalog::SurfaceSpec;
use crate::error::{Error, Result};
use crate::spectrum::{self, Spectrum};
use crate::sum::NeumaierSum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvgErrorSample {
    pub t: f64,
    pub avg: f64,
    pub n_integral: f64,
    pub tilde_integral: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GSample {
    /// `sqrt(t)` for flat surfaces, `sqrt(t + 1/4)` for spherical ones.
    pub x: f64,
    pub g_est: f64,
    pub order: u32,
}

/// `int_0^t N(s) ds = sum over lambda <= t of mult * (t - lambda)`.
pub fn integral_counting(spec: &SurfaceSpec, t: f64) -> Result<f64> {
    if t <= 0.0 {
        spec.validate()?;
        return Ok(0.0);
    }
    let mut acc = NeumaierSum::new();
    for l in spectrum::levels(spec, t)? {
        acc.add(l.mult as f64 * (t - l.value));
    }
    Ok(acc.sum())
}

/// `A(t)` at one point.
pub fn avg_error(spec: &SurfaceSpec, t: f64) -> Result<AvgErrorSample> {
    if t <= 0.0 {
        return Err(Error::InvalidArgument(format!("t must be positive, got {}", t)));
    }
    let rc = refined_for(spec)?;
    let n_integral = integral_counting(spec, t)?;
    Ok(sample(&rc, t, n_integral))
}

fn sample(rc: &RefinedConstants, t: f64, n_integral: f64) -> AvgErrorSample {
    let tilde_integral = rc.integral(t);
    AvgErrorSample { t, avg: (n_integral - tilde_integral) / t, n_integral, tilde_integral }
}

/// Evaluates `A(t)` repeatedly from one prefix-summed spectrum.
pub struct AvgEvaluator {
    spec: SurfaceSpec,
    spectrum: Spectrum,
    constants: RefinedConstants,
}

impl AvgEvaluator {
    pub fn new(spec: &SurfaceSpec, t_max: f64) -> Result<AvgEvaluator> {
        Ok(AvgEvaluator { spec: spec.clone(), spectrum: Spectrum::build(spec, t_max)?, constants: refined_for(spec)? })
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn constants(&self) -> &RefinedConstants {
        &self.constants
    }

    pub fn t_max(&self) -> f64 {
        self.spectrum.t_max
    }

    pub fn at(&self, t: f64) -> AvgErrorSample {
        debug_assert!(t > 0.0 && spectrum::within(t, self.t_max()));
        sample(&self.constants, t, self.spectrum.integral(t))
    }

    pub fn avg(&self, t: f64) -> f64 {
        self.at(t).avg
    }

    /// `t` as a function of the profile argument `x`.
    pub fn t_of_x(&self, x: f64) -> f64 {
        t_of_x(&self.spec, x)
    }

    /// The rescaled profile `g(x)` estimated pointwise.
    pub fn g_est(&self, x: f64) -> f64 {
        let t = self.t_of_x(x);
        if self.spec.is_spherical() {
            self.avg(t)
        } else {
            self.avg(t) * x.sqrt()
        }
    }
}

pub fn t_of_x(spec: &SurfaceSpec, x: f64) -> f64 {
    if spec.is_spherical() {
        x * x - 0.25
    } else {
        x * x
    }
}

pub fn x_of_t(spec: &SurfaceSpec, t: f64) -> f64 {
    if spec.is_spherical() {
        (t + 0.25).sqrt()
    } else {
        t.sqrt()
    }
}

/// Terms of the exact expansion `A(t) = g(x) + g1(x) x / t + g2(x) / t` on
/// the sphere, where `x = sqrt(t + 1/4)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereTerms {
    pub x: f64,
    /// `x - [x + 1/2]`, in `[-1/2, 1/2)`.
    pub r: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
}

impl SphereTerms {
    pub fn at(t: f64) -> SphereTerms {
        let x = (t + 0.25).sqrt();
        let r = x - (x + 0.5).floor();
        let s = 1.0 - 4.0 * r * r;
        SphereTerms { x, r, g: sphere_g(x), g1: -r * s / 2.0, g2: (4.0 * r * r + 3.0) * s / 32.0 }
    }

    pub fn avg(&self) -> f64 {
        let t = self.x * self.x - 0.25;
        self.g + self.g1 * self.x / t + self.g2 / t
    }
}

/// Leading profile of the sphere, `1/6 - 2 (x - [x + 1/2])^2`.
pub fn sphere_g(x: f64) -> f64 {
    let r = x - (x + 0.5).floor();
    1.0 / 6.0 - 2.0 * r * r
}

/// `A(t)` on the sphere from the piecewise formula in `k`, where
/// `k^2 - k <= t < k^2 + k`.
pub fn sphere_avg_closed_form(t: f64) -> f64 {
    let k = (spectrum::spherical_threshold(t) + 1) as f64;
    let d = k * k - t;
    (k * k - d * d) / (2.0 * t) - 1.0 / 3.0
}

/// Profile samples `g_est(x)` along `x_grid`.
pub fn g_samples(spec: &SurfaceSpec, x_grid: &[f64]) -> Result<Vec<GSample>> {
    let Some(&x_max) = x_grid.last() else {
        spec.validate()?;
        return Ok(Vec::new());
    };
    check_grid(spec, x_grid)?;
    let ev = AvgEvaluator::new(spec, t_of_x(spec, x_max))?;
    Ok(x_grid.par_iter().map(|&x| GSample { x, g_est: ev.g_est(x), order: 1 }).collect())
}

fn check_grid(spec: &SurfaceSpec, x_grid: &[f64]) -> Result<()> {
    if x_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("grid must be ascending".into()));
    }
    if let Some(&x0) = x_grid.first() {
        if t_of_x(spec, x0) <= 0.0 {
            return Err(Error::InvalidArgument(format!("grid point {} gives a non-positive t", x0)));
        }
    }
    Ok(())
}

/// Sphere profiles of higher order: `order = 1` is `A`, `order = 2` is
/// `(A - g) t / x`, which tends to `g1`, and `order = 3` is
/// `(A - g - g1 x / t) t`, which equals `g2`.
pub fn sphere_g_samples(x_grid: &[f64], order: u32) -> Result<Vec<GSample>> {
    let spec = SurfaceSpec::Sphere;
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidArgument(format!("order must be 1, 2 or 3, got {}", order)));
    }
    let Some(&x_max) = x_grid.last() else {
        return Ok(Vec::new());
    };
    check_grid(&spec, x_grid)?;
    let ev = AvgEvaluator::new(&spec, t_of_x(&spec, x_max))?;
    Ok(x_grid
        .par_iter()
        .map(|&x| {
            let t = x * x - 0.25;
            let a = ev.avg(t);
            let s = SphereTerms::at(t);
            let g_est = match order {
                1 => a,
                2 => (a - s.g) * t / x,
                _ => (a - s.g - s.g1 * x / t) * t,
            };
            GSample { x, g_est, order }
        })
        .collect())
}

/// What is subtracted from `A(t)` before measuring the remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeadingTerm {
    /// Nothing; flat surfaces, or to see the undamped signal.
    None,
    /// The exact sphere profile.
    SphereClosedForm,
    /// A profile periodic in `x`, fitted phase by phase together with
    /// `1/x` and `1/x^2` corrections.
    PhaseFit { period: f64 },
}

/// Leading term used by [`remainder_exponent`].
pub fn default_leading(spec: &SurfaceSpec) -> LeadingTerm {
    use SurfaceSpec as S;
    match spec {
        S::Sphere => LeadingTerm::SphereClosedForm,
        S::Hemisphere { .. } => LeadingTerm::PhaseFit { period: 1.0 },
        S::ProjectiveSphere => LeadingTerm::PhaseFit { period: 2.0 },
        S::Lune { m, .. } | S::HalfLune { m, .. } | S::GluedLune { m } => {
            LeadingTerm::PhaseFit { period: 2.0 * *m as f64 }
        }
        _ => LeadingTerm::None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemainderFit {
    pub slope: f64,
    /// `(geometric window centre, max |A - leading|)` per dyadic window.
    pub windows: Vec<(f64, f64)>,
}

/// Phases sampled per unit of `x`.
const PHASES_PER_UNIT: usize = 64;

/// Log-log slope of the windowed maximum of `|A(t) - leading|`.
pub fn remainder_exponent(spec: &SurfaceSpec, t_lo: f64, t_hi: f64) -> Result<f64> {
    Ok(remainder_fit(spec, t_lo, t_hi, default_leading(spec))?.slope)
}

pub fn remainder_fit(spec: &SurfaceSpec, t_lo: f64, t_hi: f64, leading: LeadingTerm) -> Result<RemainderFit> {
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::InvalidArgument(format!("need 0 < t_lo < t_hi, got {} and {}", t_lo, t_hi)));
    }
    let n_windows = (t_hi / t_lo).log2().floor() as usize;
    if n_windows < 3 {
        return Err(Error::InsufficientWindows(t_lo, t_hi));
    }
    let t_end = t_lo * (1u64 << n_windows) as f64;
    let ev = AvgEvaluator::new(spec, t_end)?;
    let (x_lo, x_hi) = (x_of_t(spec, t_lo), x_of_t(spec, t_end));
    let period = match leading {
        LeadingTerm::PhaseFit { period } => period,
        _ => 1.0,
    };
    let phases = (PHASES_PER_UNIT as f64 * period).round().max(1.0) as usize;
    let step = period / phases as f64;
    let first = (x_lo / period).ceil() as i64;
    let last = (x_hi / period).floor() as i64 - 1;
    if last < first + 3 {
        return Err(Error::InsufficientWindows(t_lo, t_hi));
    }
    // Residuals indexed by phase, then by period.
    let residuals: Vec<Vec<(f64, f64)>> = (0..phases)
        .into_par_iter()
        .map(|p| {
            let xs: Vec<f64> = (first..=last).map(|n| n as f64 * period + (p as f64 + 0.5) * step).collect();
            let avgs: Vec<f64> = xs.iter().map(|&x| ev.avg(t_of_x(spec, x))).collect();
            let lead: Vec<f64> = match leading {
                LeadingTerm::None => vec![0.0; xs.len()],
                LeadingTerm::SphereClosedForm => xs.iter().map(|&x| sphere_g(x)).collect(),
                LeadingTerm::PhaseFit { .. } => {
                    let g = phase_constant(&xs, &avgs, x_lo);
                    vec![g; xs.len()]
                }
            };
            xs.iter().zip(avgs.iter().zip(&lead)).map(|(&x, (&a, &l))| (t_of_x(spec, x), (a - l).abs())).collect()
        })
        .collect();
    let mut maxima = vec![0.0f64; n_windows];
    for row in &residuals {
        for &(t, r) in row {
            let w = (t / t_lo).log2().floor();
            if w >= 0.0 && (w as usize) < n_windows {
                maxima[w as usize] = maxima[w as usize].max(r);
            }
        }
    }
    let windows: Vec<(f64, f64)> =
        maxima.iter().enumerate().map(|(i, &m)| (t_lo * 2f64.powf(i as f64 + 0.5), m)).collect();
    let pts: Vec<(f64, f64)> = windows.iter().filter(|w| w.1 > 0.0).map(|&(t, m)| (t.ln(), m.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientWindows(t_lo, t_hi));
    }
    let (slope, _) = fit_line(&pts);
    Ok(RemainderFit { slope, windows })
}

/// Least-squares fit of `a + b u + c u^2` with `u = x0 / x`; returns `a`.
fn phase_constant(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    let m = DMatrix::from_fn(xs.len(), 3, |i, j| (x0 / xs[i]).powi(j as i32));
    let y = DVector::from_column_slice(ys);
    let sol = m.svd(true, true).solve(&y, 1e-14).expect("svd solve");
    sol[0]
}

/// Least-squares `(slope, intercept)` of `y = intercept + slope x`.
pub fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { 1.0 } else { pts[i].0 });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let sol = m.svd(true, true).solve(&y, 1e-14).expect("svd solve");
    (sol[1], sol[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Bc, RectBc};
    use approx::assert_abs_diff_eq;
    use num_rational::Rational64;

    #[test]
    fn integral_counting_examples() {
        assert_abs_diff_eq!(integral_counting(&SurfaceSpec::Sphere, 2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(integral_counting(&SurfaceSpec::Sphere, 3.0).unwrap(), 6.0);
        assert_eq!(integral_counting(&SurfaceSpec::Sphere, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sphere_examples() {
        assert_abs_diff_eq!(avg_error(&SurfaceSpec::Sphere, 2.0 / 3.0).unwrap().avg, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(avg_error(&SurfaceSpec::Sphere, 2.0).unwrap().avg, -1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sphere_avg_closed_form(2.0), -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_g(7.0), 1.0 / 6.0);
        assert_abs_diff_eq!(sphere_g(7.5), -1.0 / 3.0);
    }

    #[test]
    fn sphere_decomposition_is_exact() {
        for i in 1..4000 {
            let t = 0.37 * i as f64;
            assert_abs_diff_eq!(SphereTerms::at(t).avg(), sphere_avg_closed_form(t), epsilon = 1e-11);
        }
    }

    #[test]
    fn g_has_zero_mean_over_a_period() {
        let n = 100_000;
        let mean: f64 = (0..n).map(|i| sphere_g((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn evaluator_agrees_with_direct_sum() {
        let one = Rational64::from_integer(1);
        let spec = SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::N };
        let ev = AvgEvaluator::new(&spec, 3000.0).unwrap();
        for t in [1.0, 9.869, 100.0, 2999.0] {
            let direct = avg_error(&spec, t).unwrap();
            assert_abs_diff_eq!(ev.at(t).avg, direct.avg, epsilon = 1e-10);
            assert_abs_diff_eq!(direct.avg * t, direct.n_integral - direct.tilde_integral, epsilon = 1e-9);
        }
    }

    #[test]
    fn avg_matches_fine_quadrature() {
        let one = Rational64::from_integer(1);
        let spec = SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::N };
        let rc = refined_for(&spec).unwrap();
        let t = 100.0;
        let n = 2_000_000;
        let h = t / n as f64;
        let mut acc = NeumaierSum::new();
        for i in 0..n {
            let s = (i as f64 + 0.5) * h;
            acc.add((spectrum::count(&spec, s).unwrap() as f64 - rc.eval(s)) * h);
        }
        let direct = avg_error(&spec, t).unwrap().avg * t;
        assert!((acc.sum() - direct).abs() < 1e-3, "{} vs {}", acc.sum(), direct);
    }

    #[test]
    fn sphere_profile_near_g() {
        let s = g_samples(&SurfaceSpec::Sphere, &[10.0, 10.5]).unwrap();
        assert!((s[0].g_est - 1.0 / 6.0).abs() < 0.1);
        assert!((s[1].g_est + 1.0 / 3.0).abs() < 0.1);
        assert!(g_samples(&SurfaceSpec::Hemisphere { bc: Bc::N }, &[]).unwrap().is_empty());
        let g3 = sphere_g_samples(&[20.1, 31.7], 3).unwrap();
        for s in g3 {
            let terms = SphereTerms::at(s.x * s.x - 0.25);
            assert_abs_diff_eq!(s.g_est, terms.g2, epsilon = 1e-7);
        }
    }

    #[test]
    fn sphere_remainder_slope() {
        let slope = remainder_exponent(&SurfaceSpec::Sphere, 1e3, 1e5).unwrap();
        assert!((slope + 0.5).abs() < 0.1, "{}", slope);
        let raw = remainder_fit(&SurfaceSpec::Sphere, 1e3, 1e5, LeadingTerm::None).unwrap().slope;
        assert!(raw.abs() < 0.1, "{}", raw);
        assert!(matches!(remainder_exponent(&SurfaceSpec::Sphere, 1e3, 4e3), Err(Error::InsufficientWindows(..))));
    }
}
