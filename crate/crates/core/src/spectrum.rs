//! Exact spectra. Every flat eigenvalue is `pi^2 * s * key` for an integer
//! `key` taken by a binary quadratic form; spherical eigenvalues are
//! `N(N+1)` with the degree `N` as key.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::catalog::{Bc, CylBc, Irrep, Ratio, RectBc, RightIsoBc, SectorBase, SurfaceSpec, TriBc};
use crate::error::{Error, Result};
use crate::lattice::{count_odd_squares, count_squares, isqrt, QuadForm};

/// `value <= t` up to a relative slack of `1e-13`, so that eigenvalues
/// written in closed form (such as `10 pi^2`) are counted at their own value.
pub fn within(value: f64, t: f64) -> bool {
    value <= t + t.abs() * 1e-13
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenLevel {
    pub key: i64,
    pub value: f64,
    pub mult: u64,
}

/// Orbit type of a point `(k, j)` of the hexagonal lattice under the
/// twelve-element group fixing the form `k^2 + kj + j^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HexOrbit {
    Origin,
    /// Orbit of `(k, 0)`.
    Axis,
    /// Orbit of `(k, k)`.
    Diagonal,
    Generic,
}

pub fn hex_orbit(k: i64, j: i64) -> HexOrbit {
    if k == 0 && j == 0 {
        HexOrbit::Origin
    } else if k == 0 || j == 0 || k + j == 0 {
        HexOrbit::Axis
    } else if k == j || k == -2 * j || j == -2 * k {
        HexOrbit::Diagonal
    } else {
        HexOrbit::Generic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    All,
    /// `j >= 0` (or `> 0`), `k >= 0` (or `> 0`).
    Quadrant {
        j_pos: bool,
        k_pos: bool,
    },
    /// `j >= 0` (or `> 0`), `k` odd and positive.
    HalfOdd {
        j_pos: bool,
    },
    /// Both coordinates odd and positive.
    OddOdd,
    /// `0 <=/< j <=/< k`.
    Wedge {
        j_pos: bool,
        strict: bool,
    },
    /// Odd `0 < j <=/< k`.
    OddWedge {
        strict: bool,
    },
    /// Weights for origin, axis, diagonal and generic hexagonal orbits.
    Hex([i64; 4]),
    HalfTetra {
        neumann: bool,
    },
    /// Cylinder: all `j`, `k >= 0` (or `> 0`).
    Strip {
        k_pos: bool,
    },
    StripOdd,
    Mobius {
        neumann: bool,
    },
    ProjPlane,
    Tetra,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct FlatModel {
    pub form: QuadForm,
    pub scale: Ratio,
    denom: i64,
    rule: Rule,
}

impl FlatModel {
    fn new(form: QuadForm, scale: Ratio, denom: i64, rule: Rule) -> FlatModel {
        FlatModel { form, scale, denom, rule }
    }

    pub fn unit(&self) -> f64 {
        PI * PI * (*self.scale.numer() as f64) / (*self.scale.denom() as f64)
    }

    fn weight(&self, j: i64, k: i64) -> i64 {
        let b = |c: bool| c as i64;
        match self.rule {
            Rule::All => 1,
            Rule::Quadrant { j_pos, k_pos } => {
                b((if j_pos { j > 0 } else { j >= 0 }) && (if k_pos { k > 0 } else { k >= 0 }))
            }
            Rule::HalfOdd { j_pos } => b((if j_pos { j > 0 } else { j >= 0 }) && k > 0 && k % 2 != 0),
            Rule::OddOdd => b(j > 0 && k > 0 && j % 2 != 0 && k % 2 != 0),
            Rule::Wedge { j_pos, strict } => {
                b((if j_pos { j > 0 } else { j >= 0 }) && (if strict { j < k } else { j <= k }))
            }
            Rule::OddWedge { strict } => b(j > 0 && j % 2 != 0 && k % 2 != 0 && (if strict { j < k } else { j <= k })),
            Rule::Hex(w) => match hex_orbit(j, k) {
                HexOrbit::Origin => w[0],
                HexOrbit::Axis => w[1],
                HexOrbit::Diagonal => w[2],
                HexOrbit::Generic => w[3],
            },
            Rule::HalfTetra { neumann } => {
                if j == 0 && k == 0 {
                    4 * b(neumann)
                } else if j == 0 || j + 2 * k == 0 {
                    2 * b(neumann)
                } else {
                    1
                }
            }
            Rule::Strip { k_pos } => b(if k_pos { k > 0 } else { k >= 0 }),
            Rule::StripOdd => b(k > 0 && k % 2 != 0),
            Rule::Mobius { neumann } => {
                if neumann {
                    b(k >= 0 && (j + k) % 2 == 0)
                } else {
                    b(k > 0 && (j + k) % 2 != 0)
                }
            }
            Rule::ProjPlane => match (j == 0, k == 0) {
                (true, true) => 4,
                (true, false) => 2 * b(k % 2 == 0),
                (false, true) => 2 * b(j % 2 == 0),
                _ => 1,
            },
            Rule::Tetra => {
                if j == 0 && k == 0 {
                    2
                } else {
                    1
                }
            }
        }
    }

    fn mult(&self, points: &[(i64, i64)]) -> u64 {
        let w: i64 = points.iter().map(|&(j, k)| self.weight(j, k)).sum();
        debug_assert_eq!(w % self.denom, 0, "non-integral multiplicity");
        (w / self.denom) as u64
    }

    pub fn threshold(&self, t: f64) -> i64 {
        if !(t >= 0.0) {
            return -1;
        }
        let unit = self.unit();
        let mut k = (t / unit).floor().min(4e18) as i64;
        while k >= 0 && !within(unit * k as f64, t) {
            k -= 1;
        }
        while within(unit * (k + 1) as f64, t) {
            k += 1;
        }
        k
    }
}

/// `(alpha, beta, L)` with `X^2/(4a^2) + Y^2/(4b^2) = (alpha X^2 + beta Y^2)/(4L)`.
pub(crate) fn rect_coeffs(a: Ratio, b: Ratio) -> (i64, i64, i64) {
    let (pa, qa, pb, qb) = (*a.numer(), *a.denom(), *b.numer(), *b.denom());
    let l = (pa * pa).lcm(&(pb * pb));
    (qa * qa * (l / (pa * pa)), qb * qb * (l / (pb * pb)), l)
}

const HEX_SCALE: (i64, i64) = (16, 9);

pub(crate) fn flat_model(spec: &SurfaceSpec) -> Option<FlatModel> {
    use SurfaceSpec as S;
    let hex = Ratio::new(HEX_SCALE.0, HEX_SCALE.1);
    let m = match spec {
        S::FlatTorusRect { a, b } => {
            let (al, be, l) = rect_coeffs(*a, *b);
            FlatModel::new(QuadForm::diagonal(4 * al, 4 * be), Ratio::new(1, 4 * l), 1, Rule::All)
        }
        S::FlatTorusHex => FlatModel::new(QuadForm::new(1, 1, 1), hex, 1, Rule::All),
        S::Rectangle { a, b, bc } => {
            let (al, be, l) = rect_coeffs(*a, *b);
            let s = Ratio::new(1, 4 * l);
            let even = QuadForm::diagonal(4 * al, 4 * be);
            let half = QuadForm::diagonal(4 * al, be);
            match bc {
                RectBc::N => FlatModel::new(even, s, 1, Rule::Quadrant { j_pos: false, k_pos: false }),
                RectBc::D => FlatModel::new(even, s, 1, Rule::Quadrant { j_pos: true, k_pos: true }),
                RectBc::ND => FlatModel::new(even, s, 1, Rule::Quadrant { j_pos: true, k_pos: false }),
                RectBc::NM => FlatModel::new(half, s, 1, Rule::HalfOdd { j_pos: false }),
                RectBc::DM => FlatModel::new(half, s, 1, Rule::HalfOdd { j_pos: true }),
                RectBc::MM => FlatModel::new(QuadForm::diagonal(al, be), s, 1, Rule::OddOdd),
            }
        }
        S::RightIsoTriangle { a, bc } => {
            let s = Ratio::new(a.denom() * a.denom(), 4 * a.numer() * a.numer());
            let even = QuadForm::diagonal(4, 4);
            let odd = QuadForm::diagonal(1, 1);
            let wedge = |j_pos, strict| FlatModel::new(even, s, 1, Rule::Wedge { j_pos, strict });
            match bc {
                RightIsoBc::N => wedge(false, false),
                RightIsoBc::D => wedge(true, true),
                RightIsoBc::ND => wedge(false, true),
                RightIsoBc::DN => wedge(true, false),
                RightIsoBc::MN => FlatModel::new(odd, s, 1, Rule::OddWedge { strict: false }),
                RightIsoBc::MD => FlatModel::new(odd, s, 1, Rule::OddWedge { strict: true }),
            }
        }
        S::EquilateralTriangle { bc } => {
            let w = match bc {
                Bc::N => [6, 2, 1, 1],
                Bc::D => [0, 0, 1, 1],
            };
            FlatModel::new(QuadForm::new(1, 1, 1), hex, 6, Rule::Hex(w))
        }
        S::Triangle306090 { bc } => {
            let w = match bc {
                TriBc::N => [12, 2, 2, 1],
                TriBc::D => [0, 0, 0, 1],
                TriBc::ND => [0, 2, 0, 1],
                TriBc::DN => [0, 0, 2, 1],
            };
            FlatModel::new(QuadForm::new(1, 1, 1), hex, 12, Rule::Hex(w))
        }
        S::Cylinder { a, b, bc } => {
            let (al, be, l) = rect_coeffs(*a, *b);
            let s = Ratio::new(1, 4 * l);
            match bc {
                CylBc::N => FlatModel::new(QuadForm::diagonal(16 * al, 4 * be), s, 1, Rule::Strip { k_pos: false }),
                CylBc::D => FlatModel::new(QuadForm::diagonal(16 * al, 4 * be), s, 1, Rule::Strip { k_pos: true }),
                CylBc::M => FlatModel::new(QuadForm::diagonal(16 * al, be), s, 1, Rule::StripOdd),
            }
        }
        S::MobiusBand { a, b, bc } => {
            let (al, be, l) = rect_coeffs(*a, *b);
            FlatModel::new(
                QuadForm::diagonal(4 * al, 4 * be),
                Ratio::new(1, 4 * l),
                1,
                Rule::Mobius { neumann: *bc == Bc::N },
            )
        }
        S::FlatProjectivePlane => FlatModel::new(QuadForm::diagonal(1, 1), Ratio::from_integer(1), 4, Rule::ProjPlane),
        S::TetrahedronSurface => FlatModel::new(QuadForm::new(1, 1, 1), Ratio::new(4, 3), 2, Rule::Tetra),
        S::HalfTetrahedron { bc } => {
            FlatModel::new(QuadForm::new(1, 1, 1), Ratio::new(4, 3), 4, Rule::HalfTetra { neumann: *bc == Bc::N })
        }
        _ => return None,
    };
    Some(m)
}

/// Degree multiplicities of the spherical families.
pub(crate) fn spherical_mult(spec: &SurfaceSpec, n: i64) -> Option<u64> {
    use SurfaceSpec as S;
    let v = match spec {
        S::Sphere => 2 * n + 1,
        S::Hemisphere { bc: Bc::N } => n + 1,
        S::Hemisphere { bc: Bc::D } => n,
        S::ProjectiveSphere => {
            if n % 2 == 0 {
                2 * n + 1
            } else {
                0
            }
        }
        S::Lune { m, bc } => n / *m as i64 + if *bc == Bc::N { 1 } else { 0 },
        S::GluedLune { m } => 2 * (n / *m as i64) + 1,
        S::HalfLune { m, side, equator } => half_lune_mult(*m as i64, *side, *equator, n),
        _ => return None,
    };
    Some(v as u64)
}

fn half_lune_mult(m: i64, side: Bc, equator: Bc, n: i64) -> i64 {
    let f = n / m;
    let n_even = n % 2 == 0;
    let even_eq = equator == Bc::N;
    if m % 2 == 0 {
        if n_even != even_eq {
            return 0;
        }
        return if side == Bc::N { f + 1 } else { f };
    }
    let f_even = f % 2 == 0;
    match (side, even_eq) {
        (Bc::N, true) => {
            if !f_even {
                (f + 1) / 2
            } else if n_even {
                f / 2 + 1
            } else {
                f / 2
            }
        }
        (Bc::N, false) => {
            if !f_even {
                (f + 1) / 2
            } else if n_even {
                f / 2
            } else {
                f / 2 + 1
            }
        }
        (Bc::D, true) => {
            if f_even {
                f / 2
            } else if !n_even {
                (f + 1) / 2
            } else {
                (f - 1) / 2
            }
        }
        (Bc::D, false) => {
            if f_even {
                f / 2
            } else if !n_even {
                (f - 1) / 2
            } else {
                (f + 1) / 2
            }
        }
    }
}

/// Largest degree `N` with `N(N+1) <= t`.
pub fn spherical_threshold(t: f64) -> i64 {
    if !(t >= 0.0) {
        return -1;
    }
    let mut n = ((t + 0.25).sqrt() - 0.5).floor() as i64;
    while n >= 0 && !within((n * (n + 1)) as f64, t) {
        n -= 1;
    }
    while within(((n + 1) * (n + 2)) as f64, t) {
        n += 1;
    }
    n
}

/// Threshold key for `t` in the units used by `levels`.
pub fn threshold(spec: &SurfaceSpec, t: f64) -> Result<i64> {
    spec.validate()?;
    if spec.is_spherical() {
        return Ok(spherical_threshold(t));
    }
    let base = match spec {
        SurfaceSpec::SymmetrySector { base, .. } => base.surface(),
        s => s.clone(),
    };
    Ok(flat_model(&base).expect("flat family").threshold(t))
}

/// Eigenvalue for a key.
pub fn key_value(spec: &SurfaceSpec, key: i64) -> f64 {
    if spec.is_spherical() {
        return (key * (key + 1)) as f64;
    }
    let base = match spec {
        SurfaceSpec::SymmetrySector { base, .. } => base.surface(),
        s => s.clone(),
    };
    flat_model(&base).expect("flat family").unit() * key as f64
}

fn flat_levels(model: FlatModel, kmax: i64) -> impl Iterator<Item = EigenLevel> {
    let unit = model.unit();
    model.form.shells(kmax).filter_map(move |shell| {
        let mult = model.mult(&shell.points);
        (mult > 0).then(|| EigenLevel { key: shell.key, value: unit * shell.key as f64, mult })
    })
}

/// Key factor from the fundamental-domain triangle of a sector to its base.
fn sector_key_factor(spec: &SurfaceSpec) -> Option<(SurfaceSpec, i64)> {
    let SurfaceSpec::SymmetrySector { base, .. } = spec else { return None };
    let (tri, f) = spec.sector_triangle()?;
    let sb = flat_model(&base.surface())?.scale;
    let st = flat_model(&tri)?.scale;
    let g = st * f / sb;
    assert!(g.is_integer(), "sector keys are not commensurable");
    Some((tri, g.to_integer()))
}

fn sector_levels(base: SectorBase, irrep: Irrep, kmax: i64) -> Vec<EigenLevel> {
    let spec = SurfaceSpec::SymmetrySector { base, irrep };
    let model = flat_model(&base.surface()).expect("flat base");
    let unit = model.unit();
    let one_dim = |s: &SurfaceSpec| -> BTreeMap<i64, u64> {
        let (tri, g) = sector_key_factor(s).expect("one-dimensional sector");
        flat_levels(flat_model(&tri).expect("flat triangle"), kmax / g).map(|l| (l.key * g, l.mult)).collect()
    };
    let mults: BTreeMap<i64, u64> = if irrep == Irrep::Two {
        let mut m: BTreeMap<i64, i64> = flat_levels(model, kmax).map(|l| (l.key, l.mult as i64)).collect();
        for &other in base.irreps() {
            if other == Irrep::Two {
                continue;
            }
            for (key, mult) in one_dim(&SurfaceSpec::SymmetrySector { base, irrep: other }) {
                *m.get_mut(&key).expect("sector level missing from base") -= mult as i64;
            }
        }
        m.into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|(k, v)| {
                assert!(v > 0, "negative two-dimensional multiplicity");
                (k, v as u64)
            })
            .collect()
    } else {
        one_dim(&spec)
    };
    mults.into_iter().map(|(key, mult)| EigenLevel { key, value: unit * key as f64, mult }).collect()
}

/// Distinct eigenvalues up to `t_max` with multiplicities, ascending.
pub fn levels(spec: &SurfaceSpec, t_max: f64) -> Result<Box<dyn Iterator<Item = EigenLevel>>> {
    spec.validate()?;
    let kmax = threshold(spec, t_max)?;
    if spec.is_spherical() {
        let spec = spec.clone();
        return Ok(Box::new((0..=kmax).filter_map(move |n| {
            let mult = spherical_mult(&spec, n).expect("spherical family");
            (mult > 0).then(|| EigenLevel { key: n, value: (n * (n + 1)) as f64, mult })
        })));
    }
    if let SurfaceSpec::SymmetrySector { base, irrep } = spec {
        return Ok(Box::new(sector_levels(*base, *irrep, kmax).into_iter()));
    }
    let model = flat_model(spec).expect("flat family");
    Ok(Box::new(flat_levels(model, kmax)))
}

/// `N(t)`, the number of eigenvalues `<= t` with multiplicity.
pub fn count(spec: &SurfaceSpec, t: f64) -> Result<u64> {
    Ok(levels(spec, t)?.map(|l| l.mult).sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountReport {
    pub t: f64,
    pub count: u64,
    pub closed_form: Option<u64>,
}

/// `N(t)` together with its closed form where one exists.
pub fn count_report(spec: &SurfaceSpec, t: f64) -> Result<CountReport> {
    Ok(CountReport { t, count: count(spec, t)?, closed_form: closed_form(spec, t)? })
}

/// Closed form of `N(t)` for the spherical families.
pub fn closed_form(spec: &SurfaceSpec, t: f64) -> Result<Option<u64>> {
    if !spec.is_spherical() {
        spec.validate()?;
        return Ok(None);
    }
    let k = threshold(spec, t)? + 1;
    Ok(Some(spherical_closed(spec, k)))
}

fn to_count(r: Ratio) -> u64 {
    assert!(r.is_integer(), "closed form is not an integer: {}", r);
    r.to_integer().to_u64().expect("negative count")
}

/// Closed form in `k`, where `k^2 - k <= t < k^2 + k`.
pub(crate) fn spherical_closed(spec: &SurfaceSpec, k: i64) -> u64 {
    use SurfaceSpec as S;
    let q = |n: i64, d: i64| Rational64::new(n, d);
    let kk = Ratio::from_integer(k);
    let r = match spec {
        S::Sphere => kk * kk,
        S::Hemisphere { bc: Bc::N } => kk * (kk + 1) / 2,
        S::Hemisphere { bc: Bc::D } => kk * (kk - 1) / 2,
        S::ProjectiveSphere => {
            if k % 2 != 0 {
                (kk * kk + kk) / 2
            } else {
                (kk * kk - kk) / 2
            }
        }
        S::Lune { m, bc } => {
            let m = *m as i64;
            let p = k % m;
            let nn = kk * kk / (2 * m) + kk / 2 + q(p * (m - p), 2 * m);
            if *bc == Bc::N {
                nn
            } else {
                nn - kk
            }
        }
        S::GluedLune { m } => {
            let m = *m as i64;
            let p = k % m;
            kk * kk / m + q(p * (m - p), m)
        }
        S::HalfLune { m, side, equator } => half_lune_closed(*m as i64, *side, *equator, k),
        _ => unreachable!("not spherical"),
    };
    to_count(r)
}

fn half_lune_closed(m: i64, side: Bc, equator: Bc, k: i64) -> Ratio {
    let q = |n: i64, d: i64| Rational64::new(n, d);
    let kk = Ratio::from_integer(k);
    let p = k % m;
    let base = kk * kk / (4 * m) + q((m - p) * p, 4 * m);
    if m % 2 == 0 {
        if p % 2 == 0 {
            let lin = if side == Bc::N { kk / 4 } else { -kk / 4 };
            return base + lin;
        }
        let (plus, minus) = (q(1, 4) + q(1, 2 * m), q(1, 4) - q(1, 2 * m));
        return match (side, equator) {
            (Bc::N, Bc::N) => base + plus * kk + q(m - p, 2 * m),
            (Bc::N, Bc::D) => base + minus * kk - q(m - p, 2 * m),
            (Bc::D, Bc::N) => base - minus * kk - q(p, 2 * m),
            (Bc::D, Bc::D) => base - plus * kk + q(p, 2 * m),
        };
    }
    let n = (k - p) / m;
    let h = if n % 2 != 0 {
        Ratio::zero()
    } else if p % 2 != 0 {
        q(1, 4)
    } else {
        q(-1, 4)
    };
    let n_plus = base + (q(1, 4) + q(1, 4 * m)) * kk + q(m - p, 4 * m) + h;
    let n_minus = base + (q(1, 4) - q(1, 4 * m)) * kk - q(m - p, 4 * m) - h;
    let odd = Ratio::from_integer(k % 2);
    match (side, equator) {
        (Bc::N, Bc::N) => n_plus,
        (Bc::N, Bc::D) => n_minus,
        (Bc::D, Bc::N) => n_plus - (kk + odd) / 2,
        (Bc::D, Bc::D) => n_minus - (kk - odd) / 2,
    }
}

fn half(n: i64) -> Ratio {
    Ratio::new(n, 2)
}

/// `N(t)` written through reference tori, squares and floor terms,
/// evaluated exactly at the threshold key.
fn identity_at(spec: &SurfaceSpec, kmax: i64) -> Result<Ratio> {
    use SurfaceSpec as S;
    let q = |n: i64, d: i64| Rational64::new(n, d);
    let z = Ratio::from_integer;
    let nt = |f: QuadForm| z(f.count(kmax));
    let v = match spec {
        S::Rectangle { a, b, bc } => {
            let (al, be, _) = rect_coeffs(*a, *b);
            let t = nt(QuadForm::diagonal(4 * al, 4 * be));
            let fa = z(count_squares(4 * al, kmax));
            let fb = z(count_squares(4 * be, kmax));
            let t1 = || nt(QuadForm::diagonal(4 * al, be));
            let ob = z(count_odd_squares(be, kmax));
            match bc {
                RectBc::N => t / 4 + fa / 2 + fb / 2 + q(3, 4),
                RectBc::D => t / 4 - fa / 2 - fb / 2 - q(1, 4),
                RectBc::ND => t / 4 + fa / 2 - fb / 2 - q(1, 4),
                RectBc::NM => (t1() - t) / 4 + ob / 2,
                RectBc::DM => (t1() - t) / 4 - ob / 2,
                RectBc::MM => (nt(QuadForm::diagonal(al, be)) - t1() - nt(QuadForm::diagonal(al, 4 * be)) + t) / 4,
            }
        }
        S::RightIsoTriangle { bc, .. } => {
            let t = nt(QuadForm::diagonal(4, 4));
            let fa = z(count_squares(4, kmax)) + q(1, 2);
            let fd = z(count_squares(8, kmax)) + q(1, 2);
            let mm =
                || (nt(QuadForm::diagonal(1, 1)) - nt(QuadForm::diagonal(4, 1)) - nt(QuadForm::diagonal(1, 4)) + t) / 4;
            let od = z(count_odd_squares(2, kmax));
            match bc {
                RightIsoBc::N => t / 8 + fa / 2 + fd / 2 + q(3, 8),
                RightIsoBc::D => t / 8 - fa / 2 - fd / 2 + q(3, 8),
                RightIsoBc::ND => t / 8 + fa / 2 - fd / 2 - q(1, 8),
                RightIsoBc::DN => t / 8 - fa / 2 + fd / 2 - q(1, 8),
                RightIsoBc::MN => mm() / 2 + od / 2,
                RightIsoBc::MD => mm() / 2 - od / 2,
            }
        }
        S::EquilateralTriangle { bc } => {
            let t = nt(QuadForm::new(1, 1, 1));
            let f = z(isqrt(kmax)) + q(1, 2);
            t / 6 + f * bc.sign() + q(1, 3)
        }
        S::Triangle306090 { bc } => {
            let t = nt(QuadForm::new(1, 1, 1));
            let f = z(isqrt(kmax)) + q(1, 2);
            let fd = z(count_squares(3, kmax)) + q(1, 2);
            match bc {
                TriBc::N => t / 12 + fd / 2 + f / 2 + q(5, 12),
                TriBc::D => t / 12 - fd / 2 - f / 2 + q(5, 12),
                TriBc::ND => t / 12 + f / 2 - fd / 2 - q(1, 12),
                TriBc::DN => t / 12 - f / 2 + fd / 2 - q(1, 12),
            }
        }
        S::Cylinder { a, b, bc } => {
            let (al, be, _) = rect_coeffs(*a, *b);
            let t3 = nt(QuadForm::diagonal(16 * al, 4 * be));
            let ca = z(count_squares(16 * al, kmax));
            match bc {
                CylBc::N => t3 / 2 + ca + q(1, 2),
                CylBc::D => t3 / 2 - ca - q(1, 2),
                CylBc::M => (nt(QuadForm::diagonal(16 * al, be)) - t3) / 2,
            }
        }
        S::MobiusBand { a, b, bc } => {
            let (al, be, _) = rect_coeffs(*a, *b);
            let even = nt(QuadForm::new(4 * (al + be), 8 * (al - be), 4 * (al + be)));
            match bc {
                Bc::N => even / 2 + z(count_squares(16 * al, kmax)) + q(1, 2),
                Bc::D => {
                    let odd = nt(QuadForm::diagonal(4 * al, 4 * be)) - even;
                    odd / 2 - z(count_odd_squares(4 * al, kmax))
                }
            }
        }
        S::FlatProjectivePlane => {
            let sign = if isqrt(kmax) % 2 == 0 { 1 } else { -1 };
            nt(QuadForm::diagonal(1, 1)) / 4 + q(1, 4) + half(sign)
        }
        S::TetrahedronSurface => nt(QuadForm::new(1, 1, 1)) / 2 + q(1, 2),
        S::HalfTetrahedron { bc } => {
            let t = nt(QuadForm::new(1, 1, 1));
            let c = z(isqrt(kmax) + count_squares(3, kmax));
            match bc {
                Bc::N => t / 4 + c / 2 + q(3, 4),
                Bc::D => t / 4 - c / 2 - q(1, 4),
            }
        }
        S::SymmetrySector { base, irrep } => {
            if *irrep == Irrep::Two {
                let whole = match base.surface() {
                    torus @ (S::FlatTorusRect { .. } | S::FlatTorusHex) => {
                        z(flat_model(&torus).expect("flat").form.count(kmax))
                    }
                    other => identity_at(&other, kmax)?,
                };
                let mut rest = whole;
                for &other in base.irreps() {
                    if other != Irrep::Two {
                        rest -= identity_at(&S::SymmetrySector { base: *base, irrep: other }, kmax)?;
                    }
                }
                rest
            } else {
                let (tri, g) = sector_key_factor(spec).expect("one-dimensional sector");
                identity_at(&tri, kmax / g)?
            }
        }
        _ => return Err(Error::NoIdentity(spec.label())),
    };
    Ok(v)
}

/// Right-hand side of the counting identity at `t`; equals `count`.
pub fn closed_form_identity(spec: &SurfaceSpec, t: f64) -> Result<Ratio> {
    spec.validate()?;
    if spec.is_spherical() || matches!(spec, SurfaceSpec::FlatTorusRect { .. } | SurfaceSpec::FlatTorusHex) {
        return Err(Error::NoIdentity(spec.label()));
    }
    identity_at(spec, threshold(spec, t)?)
}

/// Counts of every symmetry type of `base` at `t`.
pub fn symmetry_counts(base: SectorBase, t: f64) -> Result<Vec<(Irrep, u64)>> {
    base.irreps().iter().map(|&irrep| Ok((irrep, count(&SurfaceSpec::SymmetrySector { base, irrep }, t)?))).collect()
}

/// Tabulated spectrum with prefix sums, for fast evaluation of `N(t)` and
/// of its integral.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub spec: SurfaceSpec,
    pub t_max: f64,
    unit: f64,
    /// Eigenvalue divided by `unit`; an exact integer.
    value_keys: Vec<i64>,
    values: Vec<f64>,
    keys: Vec<i64>,
    mults: Vec<u64>,
    cum_mult: Vec<u64>,
    cum_weighted: Vec<i128>,
}

impl Spectrum {
    pub fn build(spec: &SurfaceSpec, t_max: f64) -> Result<Spectrum> {
        let spherical = spec.is_spherical();
        let unit = if spherical { 1.0 } else { key_value(spec, 1) };
        let mut s = Spectrum {
            spec: spec.clone(),
            t_max,
            unit,
            value_keys: Vec::new(),
            values: Vec::new(),
            keys: Vec::new(),
            mults: Vec::new(),
            cum_mult: Vec::new(),
            cum_weighted: Vec::new(),
        };
        let (mut cm, mut cw) = (0u64, 0i128);
        for l in levels(spec, t_max)? {
            let vk = if spherical { l.key * (l.key + 1) } else { l.key };
            cm += l.mult;
            cw += l.mult as i128 * vk as i128;
            s.value_keys.push(vk);
            s.values.push(l.value);
            s.keys.push(l.key);
            s.mults.push(l.mult);
            s.cum_mult.push(cm);
            s.cum_weighted.push(cw);
        }
        Ok(s)
    }

    pub fn levels(&self) -> impl Iterator<Item = EigenLevel> + '_ {
        (0..self.keys.len()).map(|i| EigenLevel { key: self.keys[i], value: self.values[i], mult: self.mults[i] })
    }

    /// Number of distinct eigenvalues `<= t`.
    fn index(&self, t: f64) -> usize {
        self.values.partition_point(|&v| within(v, t))
    }

    pub fn count(&self, t: f64) -> u64 {
        match self.index(t) {
            0 => 0,
            i => self.cum_mult[i - 1],
        }
    }

    /// `integral_0^t N(s) ds = sum_{lambda <= t} mult (t - lambda)`.
    pub fn integral(&self, t: f64) -> f64 {
        let i = self.index(t);
        if i == 0 {
            return 0.0;
        }
        let m = self.cum_mult[i - 1] as f64;
        let top = self.value_keys[i - 1];
        let exact = top as i128 * self.cum_mult[i - 1] as i128 - self.cum_weighted[i - 1];
        m * (t - self.values[i - 1]) + self.unit * exact as f64
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Distinct eigenvalues.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Ratio {
        Ratio::from_integer(n)
    }

    #[test]
    fn torus_example_count() {
        let spec = SurfaceSpec::FlatTorusRect { a: r(1), b: r(1) };
        let t = 10.0 * PI * PI;
        assert_eq!(count(&spec, t).unwrap(), 37);
    }

    #[test]
    fn square_examples() {
        let t = 2.0 * PI * PI + 1e-9;
        let n = SurfaceSpec::Rectangle { a: r(1), b: r(1), bc: RectBc::N };
        let d = SurfaceSpec::Rectangle { a: r(1), b: r(1), bc: RectBc::D };
        assert_eq!(count(&n, t).unwrap(), 4);
        assert_eq!(count(&d, t).unwrap(), 1);
        let lv: Vec<_> = levels(&n, 5.0 * PI * PI + 1e-9).unwrap().map(|l| l.mult).collect();
        assert_eq!(lv, vec![1, 2, 1, 2, 2]);
    }

    #[test]
    fn sphere_examples() {
        assert_eq!(count(&SurfaceSpec::Sphere, 6.0).unwrap(), 9);
        assert_eq!(count(&SurfaceSpec::Sphere, 5.999).unwrap(), 4);
        assert_eq!(closed_form(&SurfaceSpec::Sphere, 6.0).unwrap(), Some(9));
        assert_eq!(count(&SurfaceSpec::Lune { m: 2, bc: Bc::D }, 12.0).unwrap(), 2);
    }

    #[test]
    fn spherical_thresholds() {
        assert_eq!(spherical_threshold(0.0), 0);
        assert_eq!(spherical_threshold(1.999), 0);
        assert_eq!(spherical_threshold(2.0), 1);
        assert_eq!(spherical_threshold(-1.0), -1);
    }

    #[test]
    fn torus_two_dim_sector_identity() {
        let base = SectorBase::SquareTorus;
        let torus = base.surface();
        for t in [50.0, 400.0, 2000.0, 12345.0] {
            let total = count(&torus, t).unwrap() as i64;
            let two = count(&SurfaceSpec::SymmetrySector { base, irrep: Irrep::Two }, t).unwrap() as i64;
            assert_eq!(Ratio::from_integer(two), Ratio::new(total - 1, 2));
        }
    }

    #[test]
    fn spectrum_table_matches_direct() {
        let spec = SurfaceSpec::Rectangle { a: Ratio::new(3, 2), b: r(1), bc: RectBc::NM };
        let table = Spectrum::build(&spec, 3000.0).unwrap();
        for t in [0.0, 10.0, 99.5, 1234.5, 2999.0] {
            assert_eq!(table.count(t), count(&spec, t).unwrap());
            let direct: f64 = levels(&spec, t).unwrap().map(|l| l.mult as f64 * (t - l.value)).sum();
            assert!((table.integral(t) - direct).abs() <= 1e-9 * direct.max(1.0));
        }
    }

    fn identity_specs() -> Vec<SurfaceSpec> {
        crate::asymptotics::fixture_specs()
            .into_iter()
            .filter(|s| {
                !s.is_spherical() && !matches!(s, SurfaceSpec::FlatTorusRect { .. } | SurfaceSpec::FlatTorusHex)
            })
            .collect()
    }

    #[test]
    fn identities_hold_on_jumps() {
        for spec in identity_specs() {
            let mut prev = None;
            for l in levels(&spec, 3000.0).unwrap() {
                for t in [l.value, prev.map_or(l.value * 0.5, |p: f64| 0.5 * (p + l.value))] {
                    let n = count(&spec, t).unwrap();
                    let id = closed_form_identity(&spec, t).unwrap();
                    assert_eq!(id, Ratio::from_integer(n as i64), "{} at t={}", spec, t);
                }
                prev = Some(l.value);
            }
        }
    }

    #[test]
    fn spherical_closed_forms_match_sums() {
        let mut specs = vec![SurfaceSpec::Sphere, SurfaceSpec::ProjectiveSphere];
        for bc in [Bc::N, Bc::D] {
            specs.push(SurfaceSpec::Hemisphere { bc });
            for m in 1..=8 {
                specs.push(SurfaceSpec::Lune { m, bc });
                for side in [Bc::N, Bc::D] {
                    specs.push(SurfaceSpec::HalfLune { m, side, equator: bc });
                }
            }
        }
        for m in 1..=8 {
            specs.push(SurfaceSpec::GluedLune { m });
        }
        for spec in specs {
            let mut total = 0;
            for n in 0..300 {
                total += spherical_mult(&spec, n).unwrap();
                assert_eq!(spherical_closed(&spec, n + 1), total, "{} k={}", spec, n + 1);
            }
        }
    }

    proptest! {
        #[test]
        fn count_monotone(t1 in 0.0f64..5000.0, dt in 0.0f64..500.0) {
            let spec = SurfaceSpec::EquilateralTriangle { bc: Bc::N };
            prop_assert!(count(&spec, t1).unwrap() <= count(&spec, t1 + dt).unwrap());
        }

        #[test]
        fn neumann_dominates_dirichlet(t in 0.0f64..20000.0) {
            let a = Ratio::new(3, 2);
            let n = count(&SurfaceSpec::Rectangle { a, b: r(1), bc: RectBc::N }, t).unwrap();
            let d = count(&SurfaceSpec::Rectangle { a, b: r(1), bc: RectBc::D }, t).unwrap();
            prop_assert!(n >= d);
            let hn = count(&SurfaceSpec::Hemisphere { bc: Bc::N }, t).unwrap();
            let hd = count(&SurfaceSpec::Hemisphere { bc: Bc::D }, t).unwrap();
            prop_assert!(hn >= hd);
        }

        #[test]
        fn sector_counts_partition(t in 0.0f64..20000.0) {
            for base in [SectorBase::SquareTorus, SectorBase::SquareN, SectorBase::SquareD,
                         SectorBase::HexTorus, SectorBase::EquilateralN, SectorBase::EquilateralD] {
                let total: u64 = symmetry_counts(base, t).unwrap().iter().map(|x| x.1).sum();
                prop_assert_eq!(total, count(&base.surface(), t).unwrap());
            }
        }

        #[test]
        fn sphere_closed_form_everywhere(t in 0.0f64..1e7) {
            let closed = closed_form(&SurfaceSpec::Sphere, t).unwrap();
            let summed = count(&SurfaceSpec::Sphere, t).unwrap();
            prop_assert_eq!(closed, Some(summed));
        }

        #[test]
        fn reflection_sum_rules(t in 0.0f64..200_000.0, m in 1u32..7) {
            let c = |s: SurfaceSpec| count(&s, t).unwrap();
            prop_assert_eq!(c(SurfaceSpec::Hemisphere { bc: Bc::N }) + c(SurfaceSpec::Hemisphere { bc: Bc::D }),
                            c(SurfaceSpec::Sphere));
            prop_assert_eq!(c(SurfaceSpec::Lune { m, bc: Bc::N }) + c(SurfaceSpec::Lune { m, bc: Bc::D }),
                            c(SurfaceSpec::GluedLune { m }));
            for side in [Bc::N, Bc::D] {
                let halves = c(SurfaceSpec::HalfLune { m, side, equator: Bc::N })
                    + c(SurfaceSpec::HalfLune { m, side, equator: Bc::D });
                prop_assert_eq!(halves, c(SurfaceSpec::Lune { m, bc: side }));
            }
        }

        #[test]
        fn triangle_reflection_sums(t in 0.0f64..20_000.0) {
            let c = |s: SurfaceSpec| count(&s, t).unwrap();
            let one = r(1);
            let square = |bc| SurfaceSpec::Rectangle { a: one, b: one, bc };
            let tri = |bc| SurfaceSpec::RightIsoTriangle { a: one, bc };
            prop_assert_eq!(c(tri(RightIsoBc::N)) + c(tri(RightIsoBc::ND)), c(square(RectBc::N)));
            prop_assert_eq!(c(tri(RightIsoBc::D)) + c(tri(RightIsoBc::DN)), c(square(RectBc::D)));
            prop_assert_eq!(c(tri(RightIsoBc::MN)) + c(tri(RightIsoBc::MD)), c(square(RectBc::MM)));
        }

        #[test]
        fn rectangle_rescaling(t in 0.0f64..5_000.0, c in 2i64..4, bi in 0usize..6) {
            let bc = [RectBc::N, RectBc::D, RectBc::ND, RectBc::NM, RectBc::DM, RectBc::MM][bi];
            let (a, b) = (Ratio::new(3, 2), r(1));
            let k = Ratio::from_integer(c);
            let big = count(&SurfaceSpec::Rectangle { a: a * k, b: b * k, bc }, t / (c * c) as f64).unwrap();
            let small = count(&SurfaceSpec::Rectangle { a, b, bc }, t).unwrap();
            prop_assert_eq!(big, small);
        }
    }
}
