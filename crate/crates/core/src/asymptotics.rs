//! Refined asymptotic counting function `A t + B t^(1/2) + C` from
//! geometric data, the reference table of known constants, and the heat
//! trace.

use num_rational::Rational64;
use num_traits::Zero;

use crate::catalog::{
    geometry, Bc, CylBc, GeometryData, Irrep, Ratio, RectBc, RightIsoBc, SectorBase, SurfaceSpec, TriBc,
};
use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::spectrum;
use crate::sum::NeumaierSum;

/// Corner contribution `(1/24)(pi/theta - theta/pi)` for `theta = q pi`.
pub fn psi(q: Ratio) -> Result<Ratio> {
    if q <= Ratio::zero() || q >= Ratio::from_integer(2) {
        return Err(Error::AngleOutOfRange);
    }
    Ok((q.recip() - q) / 24)
}

/// Floating-point corner contribution for an angle in radians.
pub fn psi_f64(theta: f64) -> f64 {
    let pi = std::f64::consts::PI;
    (pi / theta - theta / pi) / 24.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinedConstants {
    pub a: Exact,
    pub b: Exact,
    pub c: Exact,
    /// Corner and cone-point part of `c`.
    pub c1: Ratio,
    /// Gaussian-curvature part of `c`.
    pub c2: Exact,
    /// Boundary-curvature part of `c`.
    pub c3: Exact,
    /// Spherical families use `sqrt(t + 1/4)` in the middle term.
    pub shifted_sqrt: bool,
}

impl RefinedConstants {
    pub fn a_f64(&self) -> f64 {
        self.a.to_f64()
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64()
    }

    pub fn c_f64(&self) -> f64 {
        self.c.to_f64()
    }

    pub fn sqrt_term(&self, t: f64) -> f64 {
        if self.shifted_sqrt {
            (t + 0.25).sqrt()
        } else {
            t.sqrt()
        }
    }

    /// `A t + B sqrt(t) + C`.
    pub fn eval(&self, t: f64) -> f64 {
        self.a_f64() * t + self.b_f64() * self.sqrt_term(t) + self.c_f64()
    }

    /// Integral of the refined counting function from 0 to `t`.
    pub fn integral(&self, t: f64) -> f64 {
        let b_part =
            if self.shifted_sqrt { (2.0 / 3.0) * ((t + 0.25).powf(1.5) - 0.125) } else { (2.0 / 3.0) * t.powf(1.5) };
        0.5 * self.a_f64() * t * t + self.b_f64() * b_part + self.c_f64() * t
    }

    fn sub(&self, other: &RefinedConstants) -> RefinedConstants {
        RefinedConstants {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            c: &self.c - &other.c,
            c1: self.c1 - other.c1,
            c2: &self.c2 - &other.c2,
            c3: &self.c3 - &other.c3,
            shifted_sqrt: self.shifted_sqrt,
        }
    }
}

pub fn refined_constants(g: &GeometryData, shifted_sqrt: bool) -> Result<RefinedConstants> {
    let quarter_pi = Exact::inv_pi().scale(Rational64::new(1, 4));
    let twelfth_pi = Exact::inv_pi().scale(Rational64::new(1, 12));
    let mut c1 = Ratio::zero();
    for corner in &g.corners {
        c1 += if corner.like { psi(corner.angle)? } else { psi(corner.angle * 2)? - psi(corner.angle)? };
    }
    for cone in &g.cone_points {
        c1 += psi(cone.angle / 2)? * 2;
    }
    let c2 = &g.curvature_integral * &twelfth_pi;
    let c3 = &g.boundary_curvature * &twelfth_pi;
    Ok(RefinedConstants {
        a: &g.area * &quarter_pi,
        b: &(&g.len_n - &g.len_d) * &quarter_pi,
        c: &(&Exact::rational(c1) + &c2) + &c3,
        c1,
        c2,
        c3,
        shifted_sqrt,
    })
}

/// Refined constants of any surface. The two-dimensional symmetry sector
/// is obtained by subtracting the one-dimensional sectors from the whole.
pub fn refined_for(spec: &SurfaceSpec) -> Result<RefinedConstants> {
    spec.validate()?;
    if let SurfaceSpec::SymmetrySector { base, irrep: Irrep::Two } = spec {
        let mut rc = refined_for(&base.surface())?;
        for &irrep in base.irreps() {
            if irrep != Irrep::Two {
                rc = rc.sub(&refined_for(&SurfaceSpec::SymmetrySector { base: *base, irrep })?);
            }
        }
        return Ok(rc);
    }
    refined_constants(&geometry(spec)?, spec.is_spherical())
}

/// Reference triple of constants for a surface, as tabulated in the
/// literature, with the tabulated form kept whenever it had to be
/// corrected.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub spec: SurfaceSpec,
    pub a: Exact,
    pub b: Exact,
    pub c: Exact,
    pub printed: Option<(Exact, Exact, Exact)>,
}

fn r(n: i64, d: i64) -> Ratio {
    Ratio::new(n, d)
}

fn over_pi(x: Exact, d: i64) -> Exact {
    (&x * &Exact::inv_pi()).scale(r(1, d))
}

fn rat(x: Ratio) -> Exact {
    Exact::rational(x)
}

fn triple(a: Exact, b: Exact, c: Exact) -> (Exact, Exact, Exact) {
    (a, b, c)
}

/// Tabulated `(A, B, C)` for a surface.
pub fn fixture(spec: &SurfaceSpec) -> Option<Fixture> {
    let s2 = Exact::sqrt2();
    let s3 = Exact::sqrt3();
    let one = Exact::int(1);
    let sgn = |bc: Bc| Ratio::from_integer(bc.sign());
    let mut printed = None;
    let (a, b, c) = match spec {
        SurfaceSpec::FlatTorusRect { a, b } => triple(over_pi(rat(*a * *b), 1), Exact::zero(), Exact::zero()),
        SurfaceSpec::FlatTorusHex => triple(over_pi(s3.scale(r(3, 8)), 1), Exact::zero(), Exact::zero()),
        SurfaceSpec::Rectangle { a, b, bc } => {
            let area = over_pi(rat(*a * *b), 4);
            let (bb, cc) = match bc {
                RectBc::N => (rat((*a + *b) * 2), r(1, 4)),
                RectBc::D => (rat(-(*a + *b) * 2), r(1, 4)),
                RectBc::ND => (rat((*a - *b) * 2), r(-1, 4)),
                RectBc::NM => (rat(*b * 2), Ratio::zero()),
                RectBc::DM => (rat(-*b * 2), Ratio::zero()),
                RectBc::MM => (Exact::zero(), Ratio::zero()),
            };
            triple(area, over_pi(bb, 4), rat(cc))
        }
        SurfaceSpec::RightIsoTriangle { a, bc } => {
            let area = over_pi(rat(*a * *a), 8);
            let (bb, cc) = match bc {
                RightIsoBc::N => (&Exact::int(2) + &s2, r(3, 8)),
                RightIsoBc::D => (-(&Exact::int(2) + &s2), r(3, 8)),
                RightIsoBc::ND => (&Exact::int(2) - &s2, r(-1, 8)),
                RightIsoBc::DN => (-(&Exact::int(2) - &s2), r(-1, 8)),
                RightIsoBc::MN => (s2.clone(), Ratio::zero()),
                RightIsoBc::MD => (-s2.clone(), Ratio::zero()),
            };
            triple(area, over_pi(bb.scale(*a), 4), rat(cc))
        }
        SurfaceSpec::EquilateralTriangle { bc } => {
            triple(over_pi(s3.clone(), 16), over_pi(Exact::rational(sgn(*bc) * 3), 4), rat(r(1, 3)))
        }
        SurfaceSpec::Triangle306090 { bc } => {
            let (bb, cc) = match bc {
                TriBc::N => (&Exact::int(3) + &s3, r(5, 12)),
                TriBc::D => (-(&Exact::int(3) + &s3), r(5, 12)),
                TriBc::ND => (&Exact::int(3) - &s3, r(-1, 12)),
                TriBc::DN => (-(&Exact::int(3) - &s3), r(-1, 12)),
            };
            triple(over_pi(s3.clone(), 32), over_pi(bb, 8), rat(cc))
        }
        SurfaceSpec::Cylinder { a, b, bc } => {
            let bb = match bc {
                CylBc::N => rat(*a * 2),
                CylBc::D => rat(-*a * 2),
                CylBc::M => Exact::zero(),
            };
            triple(over_pi(rat(*a * *b), 4), over_pi(bb, 4), Exact::zero())
        }
        SurfaceSpec::MobiusBand { a, b, bc } => {
            triple(over_pi(rat(*a * *b), 4), over_pi(rat(*a * 2 * sgn(*bc)), 4), Exact::zero())
        }
        SurfaceSpec::Sphere => triple(one.clone(), Exact::zero(), rat(r(1, 3))),
        SurfaceSpec::Hemisphere { bc } => triple(rat(r(1, 2)), rat(sgn(*bc) / 2), rat(r(1, 6))),
        SurfaceSpec::ProjectiveSphere => triple(rat(r(1, 2)), Exact::zero(), rat(r(1, 6))),
        SurfaceSpec::Lune { m, bc } => {
            let m = Ratio::from_integer(*m as i64);
            triple(rat(m.recip() / 2), rat(sgn(*bc) / 2), rat((m - m.recip()) / 12 + m.recip() / 6))
        }
        SurfaceSpec::HalfLune { m, side, equator } => {
            let m = Ratio::from_integer(*m as i64);
            let corner = if side == equator { r(1, 8) } else { r(-1, 8) };
            triple(
                rat(m.recip() / 4),
                rat(sgn(*side) / 4 + sgn(*equator) * m.recip() / 4),
                rat((m - m.recip()) / 24 + corner + m.recip() / 12),
            )
        }
        SurfaceSpec::GluedLune { m } => {
            let m = Ratio::from_integer(*m as i64);
            triple(rat(m.recip()), Exact::zero(), rat((m - m.recip()) / 6 + m.recip() / 3))
        }
        SurfaceSpec::FlatProjectivePlane => triple(over_pi(one.clone(), 4), Exact::zero(), rat(r(1, 4))),
        SurfaceSpec::TetrahedronSurface => triple(over_pi(s3.clone(), 4), Exact::zero(), rat(r(1, 2))),
        SurfaceSpec::HalfTetrahedron { bc } => {
            triple(over_pi(s3.clone(), 8), over_pi((&s3 + &one).scale(sgn(*bc)), 4), rat(r(1, 4)))
        }
        SurfaceSpec::SymmetrySector { base, irrep } => {
            let (t, p) = sector_fixture(*base, *irrep)?;
            printed = p;
            t
        }
    };
    Some(Fixture { spec: spec.clone(), a, b, c, printed })
}

type Triple = (Exact, Exact, Exact);

fn sector_fixture(base: SectorBase, irrep: Irrep) -> Option<(Triple, Option<Triple>)> {
    let s2 = Exact::sqrt2();
    let s3 = Exact::sqrt3();
    let one = Exact::int(1);
    let ip = |x: Exact, d: i64| over_pi(x, d);
    let q = |n, d| rat(r(n, d));
    let sq_a = ip(one.clone(), 32);
    let pp = triple(sq_a.clone(), &ip(one.clone(), 4) + &ip(s2.clone(), 8), q(3, 8));
    let pm = triple(sq_a.clone(), &ip(s2.clone(), 8) - &ip(one.clone(), 4), q(-1, 8));
    let mp = triple(sq_a.clone(), &ip(one.clone(), 4) - &ip(s2.clone(), 8), q(-1, 8));
    let mm = triple(sq_a.clone(), -(&ip(one.clone(), 4) + &ip(s2.clone(), 8)), q(3, 8));
    let mixed_n = triple(sq_a.clone(), ip(s2.clone(), 8), Exact::zero());
    let mixed_d = triple(sq_a.clone(), -ip(s2.clone(), 8), Exact::zero());
    let tri_a = ip(s3.clone(), 96);
    let tri_n = triple(tri_a.clone(), ip(&s3 + &one, 8), q(5, 12));
    let tri_dn = triple(tri_a.clone(), ip(&one - &s3, 8), q(-1, 12));
    let tri_nd = triple(tri_a.clone(), ip(&s3 - &one, 8), q(-1, 12));
    let tri_d = triple(tri_a, -ip(&s3 + &one, 8), q(5, 12));
    let half_pi = |sign: i64| ip(Exact::int(sign), 2);
    let out = match (base, irrep) {
        (SectorBase::SquareTorus, Irrep::PP) => (pp, None),
        (SectorBase::SquareTorus, Irrep::PM) => (pm, None),
        (SectorBase::SquareTorus, Irrep::MP) => (mp, None),
        (SectorBase::SquareTorus, Irrep::MM) => (mm, None),
        (SectorBase::SquareTorus, Irrep::Two) => (triple(ip(one.clone(), 8), Exact::zero(), q(-1, 2)), None),
        (SectorBase::SquareN, Irrep::PP) => (pp, None),
        (SectorBase::SquareN, Irrep::MP) => (mp, None),
        (SectorBase::SquareN, Irrep::PM) => (mixed_n, None),
        (SectorBase::SquareN, Irrep::MM) => (mixed_d, None),
        (SectorBase::SquareN, Irrep::Two) => (
            triple(ip(one.clone(), 8), half_pi(1), Exact::zero()),
            Some(triple(ip(one.clone(), 8), half_pi(-1), q(-1, 4))),
        ),
        (SectorBase::SquareD, Irrep::PM) => (pm, None),
        (SectorBase::SquareD, Irrep::MM) => (mm, None),
        (SectorBase::SquareD, Irrep::PP) => (mixed_n, None),
        (SectorBase::SquareD, Irrep::MP) => (mixed_d, None),
        (SectorBase::SquareD, Irrep::Two) => (
            triple(ip(one.clone(), 8), half_pi(-1), Exact::zero()),
            Some(triple(ip(one.clone(), 8), half_pi(1), q(-1, 4))),
        ),
        (SectorBase::HexTorus, Irrep::Plus) => (triple(ip(s3.clone(), 16), ip(Exact::int(3), 4), q(1, 3)), None),
        (SectorBase::HexTorus, Irrep::Minus) => (triple(ip(s3.clone(), 16), ip(Exact::int(-3), 4), q(1, 3)), None),
        (SectorBase::HexTorus, Irrep::Two) => (triple(ip(s3.clone(), 4), Exact::zero(), q(-2, 3)), None),
        (SectorBase::EquilateralN, Irrep::Plus) => (tri_n, None),
        (SectorBase::EquilateralN, Irrep::Minus) => (tri_dn, None),
        (SectorBase::EquilateralN, Irrep::Two) => (
            triple(ip(s3.clone(), 24), half_pi(1), Exact::zero()),
            Some(triple(ip(s3.clone(), 24), ip(Exact::int(-1), 4), q(-1, 3))),
        ),
        (SectorBase::EquilateralD, Irrep::Plus) => (tri_nd, None),
        (SectorBase::EquilateralD, Irrep::Minus) => (tri_d, None),
        (SectorBase::EquilateralD, Irrep::Two) => (
            triple(ip(s3.clone(), 24), half_pi(-1), Exact::zero()),
            Some(triple(ip(s3, 24), ip(Exact::int(1), 4), q(-1, 3))),
        ),
        _ => return None,
    };
    Some(out)
}

/// Representative surfaces covering every family, boundary condition
/// and symmetry sector.
pub fn fixture_specs() -> Vec<SurfaceSpec> {
    let mut v = Vec::new();
    let (a, b) = (r(3, 2), r(1, 1));
    v.push(SurfaceSpec::FlatTorusRect { a: r(1, 1), b: r(1, 1) });
    v.push(SurfaceSpec::FlatTorusRect { a, b });
    v.push(SurfaceSpec::FlatTorusHex);
    for bc in [RectBc::N, RectBc::D, RectBc::ND, RectBc::NM, RectBc::DM, RectBc::MM] {
        v.push(SurfaceSpec::Rectangle { a, b, bc });
    }
    for bc in [RightIsoBc::N, RightIsoBc::D, RightIsoBc::ND, RightIsoBc::DN, RightIsoBc::MN, RightIsoBc::MD] {
        v.push(SurfaceSpec::RightIsoTriangle { a: r(1, 1), bc });
        v.push(SurfaceSpec::RightIsoTriangle { a: r(1, 2), bc });
    }
    for bc in [Bc::N, Bc::D] {
        v.push(SurfaceSpec::EquilateralTriangle { bc });
    }
    for bc in [TriBc::N, TriBc::D, TriBc::ND, TriBc::DN] {
        v.push(SurfaceSpec::Triangle306090 { bc });
    }
    for bc in [CylBc::N, CylBc::D, CylBc::M] {
        v.push(SurfaceSpec::Cylinder { a: r(2, 1), b, bc });
    }
    for bc in [Bc::N, Bc::D] {
        v.push(SurfaceSpec::MobiusBand { a: r(2, 1), b, bc });
        v.push(SurfaceSpec::Hemisphere { bc });
        v.push(SurfaceSpec::HalfTetrahedron { bc });
        for m in 1..=4 {
            v.push(SurfaceSpec::Lune { m, bc });
        }
        for side in [Bc::N, Bc::D] {
            for m in 1..=4 {
                v.push(SurfaceSpec::HalfLune { m, side, equator: bc });
            }
        }
    }
    v.push(SurfaceSpec::Sphere);
    v.push(SurfaceSpec::ProjectiveSphere);
    for m in 1..=4 {
        v.push(SurfaceSpec::GluedLune { m });
    }
    v.push(SurfaceSpec::FlatProjectivePlane);
    v.push(SurfaceSpec::TetrahedronSurface);
    for base in [
        SectorBase::SquareTorus,
        SectorBase::SquareN,
        SectorBase::SquareD,
        SectorBase::HexTorus,
        SectorBase::EquilateralN,
        SectorBase::EquilateralD,
    ] {
        for &irrep in base.irreps() {
            v.push(SurfaceSpec::SymmetrySector { base, irrep });
        }
    }
    v
}

/// Compares the computed constants with the tabulated ones exactly.
pub fn check_fixture(spec: &SurfaceSpec) -> Result<RefinedConstants> {
    let rc = refined_for(spec)?;
    let fx = fixture(spec).ok_or_else(|| Error::NoFixture(spec.label()))?;
    for (field, got, want) in [("A", &rc.a, &fx.a), ("B", &rc.b, &fx.b), ("C", &rc.c, &fx.c)] {
        if got != want {
            return Err(Error::FixtureMismatch {
                spec: spec.label(),
                field,
                computed: got.to_string(),
                expected: want.to_string(),
            });
        }
    }
    Ok(rc)
}

/// `n psi((n-2) pi / n)`, the corner constant of a regular `n`-gon.
pub fn polygon_corner_limit(n: u32) -> Result<Ratio> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("polygon needs at least 3 sides, got {}", n)));
    }
    let n = n as i64;
    Ok(psi(Ratio::new(n - 2, n))? * n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTrace {
    pub t: f64,
    pub value: f64,
    pub companion: f64,
    pub tail_bound: f64,
    pub cutoff: f64,
}

/// Estimate of `sum_{lambda > cutoff} e^{-lambda t}` from a Weyl-type
/// envelope `N(s) <= 2A s + 2|B| sqrt(s+1) + |C| + 2`.
pub fn heat_tail_bound(rc: &RefinedConstants, t: f64, cutoff: f64) -> f64 {
    let (a, b, c) = (rc.a_f64(), rc.b_f64().abs(), rc.c_f64().abs());
    let root = (cutoff + 1.0).sqrt();
    let slope = 2.0 * a + 2.0 * b / root;
    (-cutoff * t).exp() * (slope * (cutoff + 1.0 / t) + 2.0 * b / root + c + 2.0)
}

/// Smallest doubling of `30/t` whose tail bound is below `tol`.
pub fn heat_cutoff(rc: &RefinedConstants, t: f64, tol: f64) -> f64 {
    let mut cutoff = 30.0 / t;
    while heat_tail_bound(rc, t, cutoff) > tol {
        cutoff *= 1.5;
    }
    cutoff
}

/// `sum mult e^{-lambda t}` over eigenvalues up to `cutoff`, with the
/// companion `A/t + (sqrt(pi)/2) B t^{-1/2} + C`.
pub fn heat_trace(spec: &SurfaceSpec, t: f64, cutoff: f64, tol: f64) -> Result<HeatTrace> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("heat trace needs t > 0, got {}", t)));
    }
    let rc = refined_for(spec)?;
    let tail_bound = heat_tail_bound(&rc, t, cutoff);
    if tail_bound > tol {
        return Err(Error::CutoffTooSmall { tail: tail_bound, tol });
    }
    let mut acc = NeumaierSum::new();
    for level in spectrum::levels(spec, cutoff)? {
        acc.add(level.mult as f64 * (-level.value * t).exp());
    }
    let companion = rc.a_f64() / t + 0.5 * std::f64::consts::PI.sqrt() * rc.b_f64() / t.sqrt() + rc.c_f64();
    Ok(HeatTrace { t, value: acc.sum(), companion, tail_bound, cutoff })
}
