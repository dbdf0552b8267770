//! Surface families, their parameters and boundary conditions, and the
//! geometric data that enters the refined counting asymptotics.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exact::Exact;

pub type Ratio = Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bc {
    N,
    D,
}

impl Bc {
    pub fn sign(self) -> i64 {
        match self {
            Bc::N => 1,
            Bc::D => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RectBc {
    N,
    D,
    ND,
    NM,
    DM,
    MM,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RightIsoBc {
    N,
    D,
    ND,
    DN,
    MN,
    MD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriBc {
    N,
    D,
    ND,
    DN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CylBc {
    N,
    D,
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectorBase {
    SquareTorus,
    SquareN,
    SquareD,
    HexTorus,
    EquilateralN,
    EquilateralD,
}

impl SectorBase {
    pub fn is_d4(self) -> bool {
        matches!(self, SectorBase::SquareTorus | SectorBase::SquareN | SectorBase::SquareD)
    }

    pub fn irreps(self) -> &'static [Irrep] {
        if self.is_d4() {
            &[Irrep::PP, Irrep::PM, Irrep::MP, Irrep::MM, Irrep::Two]
        } else {
            &[Irrep::Plus, Irrep::Minus, Irrep::Two]
        }
    }

    /// The surface whose spectrum is split by symmetry type.
    pub fn surface(self) -> SurfaceSpec {
        let one = Ratio::one();
        match self {
            SectorBase::SquareTorus => SurfaceSpec::FlatTorusRect { a: one / 2, b: one / 2 },
            SectorBase::SquareN => SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::N },
            SectorBase::SquareD => SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::D },
            SectorBase::HexTorus => SurfaceSpec::FlatTorusHex,
            SectorBase::EquilateralN => SurfaceSpec::EquilateralTriangle { bc: Bc::N },
            SectorBase::EquilateralD => SurfaceSpec::EquilateralTriangle { bc: Bc::D },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SectorBase::SquareTorus => "squaretorus",
            SectorBase::SquareN => "squareN",
            SectorBase::SquareD => "squareD",
            SectorBase::HexTorus => "hextorus",
            SectorBase::EquilateralN => "equilateralN",
            SectorBase::EquilateralD => "equilateralD",
        }
    }
}

/// Irreducible representations of D4 (`1++`, `1+-`, `1-+`, `1--`, `2`)
/// and D3 (`1+`, `1-`, `2`). For D4 the first sign is the diagonal
/// reflection, the second the axis reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Irrep {
    PP,
    PM,
    MP,
    MM,
    Plus,
    Minus,
    Two,
}

impl Irrep {
    pub fn dim(self) -> u32 {
        if self == Irrep::Two {
            2
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Irrep::PP => "++",
            Irrep::PM => "+-",
            Irrep::MP => "-+",
            Irrep::MM => "--",
            Irrep::Plus => "+",
            Irrep::Minus => "-",
            Irrep::Two => "2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceSpec {
    /// Flat torus with side lengths `2a` and `2b`.
    FlatTorusRect {
        a: Ratio,
        b: Ratio,
    },
    /// Hexagonal torus covering the unit equilateral triangle.
    FlatTorusHex,
    Rectangle {
        a: Ratio,
        b: Ratio,
        bc: RectBc,
    },
    /// Right isosceles triangle with legs of length `a`.
    RightIsoTriangle {
        a: Ratio,
        bc: RightIsoBc,
    },
    /// Equilateral triangle with unit sides.
    EquilateralTriangle {
        bc: Bc,
    },
    /// Half of the unit equilateral triangle. Two letters give the long
    /// leg, then the short leg together with the hypotenuse.
    Triangle306090 {
        bc: TriBc,
    },
    /// Circumference `a`, height `b`.
    Cylinder {
        a: Ratio,
        b: Ratio,
        bc: CylBc,
    },
    /// Rectangle `a x b` with the edges of length `b` glued with a flip.
    MobiusBand {
        a: Ratio,
        b: Ratio,
        bc: Bc,
    },
    Sphere,
    Hemisphere {
        bc: Bc,
    },
    ProjectiveSphere,
    /// Lune of opening angle `pi/m`.
    Lune {
        m: u32,
        bc: Bc,
    },
    /// Half of a lune of opening angle `pi/m`, cut along the equator.
    HalfLune {
        m: u32,
        side: Bc,
        equator: Bc,
    },
    /// Lune of opening angle `2pi/m` with its sides glued.
    GluedLune {
        m: u32,
    },
    FlatProjectivePlane,
    TetrahedronSurface,
    HalfTetrahedron {
        bc: Bc,
    },
    SymmetrySector {
        base: SectorBase,
        irrep: Irrep,
    },
}

/// Corner of a polygonal boundary; `angle` is a multiple of pi.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CornerSpec {
    pub angle: Ratio,
    pub like: bool,
}

/// Interior cone point; `angle` is a multiple of pi.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConePoint {
    pub angle: Ratio,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryData {
    pub area: Exact,
    pub len_n: Exact,
    pub len_d: Exact,
    pub corners: Vec<CornerSpec>,
    pub cone_points: Vec<ConePoint>,
    /// Integral of the Gaussian curvature over the surface.
    pub curvature_integral: Exact,
    /// Integral of the geodesic curvature along the boundary.
    pub boundary_curvature: Exact,
}

/// Boundary edge: length and condition.
type Edge = (Exact, Bc);

fn polygon(area: Exact, edges: &[Edge], angles: &[Ratio]) -> GeometryData {
    assert_eq!(edges.len(), angles.len());
    let mut len_n = Exact::zero();
    let mut len_d = Exact::zero();
    for (len, bc) in edges {
        match bc {
            Bc::N => len_n = &len_n + len,
            Bc::D => len_d = &len_d + len,
        }
    }
    let corners = (0..edges.len())
        .map(|i| CornerSpec { angle: angles[i], like: edges[i].1 == edges[(i + 1) % edges.len()].1 })
        .collect();
    GeometryData {
        area,
        len_n,
        len_d,
        corners,
        cone_points: Vec::new(),
        curvature_integral: Exact::zero(),
        boundary_curvature: Exact::zero(),
    }
}

fn closed(area: Exact, cone_angles: &[Ratio], curvature_integral: Exact) -> GeometryData {
    GeometryData {
        area,
        len_n: Exact::zero(),
        len_d: Exact::zero(),
        corners: Vec::new(),
        cone_points: cone_angles.iter().map(|&angle| ConePoint { angle }).collect(),
        curvature_integral,
        boundary_curvature: Exact::zero(),
    }
}

fn smooth_boundary(area: Exact, edges: &[Edge], curvature_integral: Exact) -> GeometryData {
    let mut g = closed(area, &[], curvature_integral);
    for (len, bc) in edges {
        match bc {
            Bc::N => g.len_n = &g.len_n + len,
            Bc::D => g.len_d = &g.len_d + len,
        }
    }
    g
}

fn q(n: i64, d: i64) -> Ratio {
    Ratio::new(n, d)
}

fn ex(r: Ratio) -> Exact {
    Exact::rational(r)
}

fn pi_times(r: Ratio) -> Exact {
    Exact::pi().scale(r)
}

impl SurfaceSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            SurfaceSpec::FlatTorusRect { .. } => "torus",
            SurfaceSpec::FlatTorusHex => "hextorus",
            SurfaceSpec::Rectangle { .. } => "rect",
            SurfaceSpec::RightIsoTriangle { .. } => "rightiso",
            SurfaceSpec::EquilateralTriangle { .. } => "equilateral",
            SurfaceSpec::Triangle306090 { .. } => "tri306090",
            SurfaceSpec::Cylinder { .. } => "cylinder",
            SurfaceSpec::MobiusBand { .. } => "mobius",
            SurfaceSpec::Sphere => "sphere",
            SurfaceSpec::Hemisphere { .. } => "hemisphere",
            SurfaceSpec::ProjectiveSphere => "projsphere",
            SurfaceSpec::Lune { .. } => "lune",
            SurfaceSpec::HalfLune { .. } => "halflune",
            SurfaceSpec::GluedLune { .. } => "gluedlune",
            SurfaceSpec::FlatProjectivePlane => "projplane",
            SurfaceSpec::TetrahedronSurface => "tetra",
            SurfaceSpec::HalfTetrahedron { .. } => "halftetra",
            SurfaceSpec::SymmetrySector { .. } => "sector",
        }
    }

    pub fn is_spherical(&self) -> bool {
        matches!(
            self,
            SurfaceSpec::Sphere
                | SurfaceSpec::Hemisphere { .. }
                | SurfaceSpec::ProjectiveSphere
                | SurfaceSpec::Lune { .. }
                | SurfaceSpec::HalfLune { .. }
                | SurfaceSpec::GluedLune { .. }
        )
    }

    pub fn has_boundary(&self) -> bool {
        match self {
            SurfaceSpec::FlatTorusRect { .. }
            | SurfaceSpec::FlatTorusHex
            | SurfaceSpec::Sphere
            | SurfaceSpec::ProjectiveSphere
            | SurfaceSpec::GluedLune { .. }
            | SurfaceSpec::FlatProjectivePlane
            | SurfaceSpec::TetrahedronSurface => false,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, r: &Ratio| {
            if r.is_positive() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{} must be positive, got {}", name, r)))
            }
        };
        match self {
            SurfaceSpec::FlatTorusRect { a, b }
            | SurfaceSpec::Rectangle { a, b, .. }
            | SurfaceSpec::Cylinder { a, b, .. }
            | SurfaceSpec::MobiusBand { a, b, .. } => {
                positive("a", a)?;
                positive("b", b)
            }
            SurfaceSpec::RightIsoTriangle { a, .. } => positive("a", a),
            SurfaceSpec::Lune { m, .. } | SurfaceSpec::HalfLune { m, .. } | SurfaceSpec::GluedLune { m } => {
                if *m == 0 || *m > 10_000 {
                    Err(Error::InvalidSpec(format!("m must lie in 1..=10000, got {}", m)))
                } else {
                    Ok(())
                }
            }
            SurfaceSpec::SymmetrySector { base, irrep } => {
                if base.irreps().contains(irrep) {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "irrep {} does not belong to the symmetry group of {}",
                        irrep.name(),
                        base.name()
                    )))
                }
            }
            _ => Ok(()),
        }
    }

    /// Canonical text form, e.g. `rect:a=1,b=1,bc=N`.
    pub fn label(&self) -> String {
        let r = |x: &Ratio| x.to_string();
        let bc = |b: &Bc| format!("{:?}", b);
        let params = match self {
            SurfaceSpec::FlatTorusRect { a, b } => format!("a={},b={}", r(a), r(b)),
            SurfaceSpec::Rectangle { a, b, bc } => format!("a={},b={},bc={:?}", r(a), r(b), bc),
            SurfaceSpec::RightIsoTriangle { a, bc } => format!("a={},bc={:?}", r(a), bc),
            SurfaceSpec::EquilateralTriangle { bc: b } => format!("bc={}", bc(b)),
            SurfaceSpec::Triangle306090 { bc } => format!("bc={:?}", bc),
            SurfaceSpec::Cylinder { a, b, bc } => format!("a={},b={},bc={:?}", r(a), r(b), bc),
            SurfaceSpec::MobiusBand { a, b, bc: c } => format!("a={},b={},bc={}", r(a), r(b), bc(c)),
            SurfaceSpec::Hemisphere { bc: c } => format!("bc={}", bc(c)),
            SurfaceSpec::Lune { m, bc: c } => format!("m={},bc={}", m, bc(c)),
            SurfaceSpec::HalfLune { m, side, equator } => {
                format!("m={},side={},eq={}", m, bc(side), bc(equator))
            }
            SurfaceSpec::GluedLune { m } => format!("m={}", m),
            SurfaceSpec::HalfTetrahedron { bc: c } => format!("bc={}", bc(c)),
            SurfaceSpec::SymmetrySector { base, irrep } => {
                format!("base={},irrep={}", base.name(), irrep.name())
            }
            _ => String::new(),
        };
        if params.is_empty() {
            self.family_name().to_string()
        } else {
            format!("{}:{}", self.family_name(), params)
        }
    }

    /// For a one-dimensional symmetry sector: the fundamental-domain
    /// triangle and the factor by which its eigenvalues are multiplied.
    pub fn sector_triangle(&self) -> Option<(SurfaceSpec, i64)> {
        let SurfaceSpec::SymmetrySector { base, irrep } = *self else {
            return None;
        };
        let half = Ratio::new(1, 2);
        let iso = |bc| Some((SurfaceSpec::RightIsoTriangle { a: half, bc }, 1));
        let tri = |bc| Some((SurfaceSpec::Triangle306090 { bc }, 3));
        match (base, irrep) {
            (SectorBase::SquareTorus, Irrep::PP) => iso(RightIsoBc::N),
            (SectorBase::SquareTorus, Irrep::PM) => iso(RightIsoBc::DN),
            (SectorBase::SquareTorus, Irrep::MP) => iso(RightIsoBc::ND),
            (SectorBase::SquareTorus, Irrep::MM) => iso(RightIsoBc::D),
            (SectorBase::SquareN, Irrep::PP) => iso(RightIsoBc::N),
            (SectorBase::SquareN, Irrep::PM) => iso(RightIsoBc::MN),
            (SectorBase::SquareN, Irrep::MP) => iso(RightIsoBc::ND),
            (SectorBase::SquareN, Irrep::MM) => iso(RightIsoBc::MD),
            (SectorBase::SquareD, Irrep::PP) => iso(RightIsoBc::MN),
            (SectorBase::SquareD, Irrep::PM) => iso(RightIsoBc::DN),
            (SectorBase::SquareD, Irrep::MP) => iso(RightIsoBc::MD),
            (SectorBase::SquareD, Irrep::MM) => iso(RightIsoBc::D),
            (SectorBase::HexTorus, Irrep::Plus) => Some((SurfaceSpec::EquilateralTriangle { bc: Bc::N }, 1)),
            (SectorBase::HexTorus, Irrep::Minus) => Some((SurfaceSpec::EquilateralTriangle { bc: Bc::D }, 1)),
            (SectorBase::EquilateralN, Irrep::Plus) => tri(TriBc::N),
            (SectorBase::EquilateralN, Irrep::Minus) => tri(TriBc::DN),
            (SectorBase::EquilateralD, Irrep::Plus) => tri(TriBc::ND),
            (SectorBase::EquilateralD, Irrep::Minus) => tri(TriBc::D),
            _ => None,
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Scale lengths by `s`, areas by `s^2`.
fn rescale(g: GeometryData, s: &Exact) -> GeometryData {
    let s2 = s * s;
    GeometryData {
        area: &g.area * &s2,
        len_n: &g.len_n * s,
        len_d: &g.len_d * s,
        corners: g.corners,
        cone_points: g.cone_points,
        curvature_integral: g.curvature_integral,
        boundary_curvature: g.boundary_curvature,
    }
}

pub fn geometry(spec: &SurfaceSpec) -> Result<GeometryData> {
    spec.validate()?;
    let half = q(1, 2);
    let g = match spec {
        SurfaceSpec::FlatTorusRect { a, b } => closed(ex(*a * *b * 4), &[], Exact::zero()),
        SurfaceSpec::FlatTorusHex => closed(Exact::sqrt3().scale(q(3, 2)), &[], Exact::zero()),
        SurfaceSpec::Rectangle { a, b, bc } => {
            let (bottom, right, top, left) = match bc {
                RectBc::N => (Bc::N, Bc::N, Bc::N, Bc::N),
                RectBc::D => (Bc::D, Bc::D, Bc::D, Bc::D),
                RectBc::ND => (Bc::N, Bc::D, Bc::N, Bc::D),
                RectBc::NM => (Bc::N, Bc::N, Bc::D, Bc::N),
                RectBc::DM => (Bc::N, Bc::D, Bc::D, Bc::D),
                RectBc::MM => (Bc::N, Bc::D, Bc::D, Bc::N),
            };
            polygon(ex(*a * *b), &[(ex(*a), bottom), (ex(*b), right), (ex(*a), top), (ex(*b), left)], &[half; 4])
        }
        SurfaceSpec::RightIsoTriangle { a, bc } => {
            let (bottom, hyp, left) = match bc {
                RightIsoBc::N => (Bc::N, Bc::N, Bc::N),
                RightIsoBc::D => (Bc::D, Bc::D, Bc::D),
                RightIsoBc::ND => (Bc::N, Bc::D, Bc::N),
                RightIsoBc::DN => (Bc::D, Bc::N, Bc::D),
                RightIsoBc::MN => (Bc::N, Bc::N, Bc::D),
                RightIsoBc::MD => (Bc::N, Bc::D, Bc::D),
            };
            polygon(
                ex(*a * *a / 2),
                &[(ex(*a), bottom), (Exact::sqrt2().scale(*a), hyp), (ex(*a), left)],
                &[q(1, 4), q(1, 4), half],
            )
        }
        SurfaceSpec::EquilateralTriangle { bc } => polygon(
            Exact::sqrt3().scale(q(1, 4)),
            &[(Exact::int(1), *bc), (Exact::int(1), *bc), (Exact::int(1), *bc)],
            &[q(1, 3); 3],
        ),
        SurfaceSpec::Triangle306090 { bc } => {
            let (long, short, hyp) = match bc {
                TriBc::N => (Bc::N, Bc::N, Bc::N),
                TriBc::D => (Bc::D, Bc::D, Bc::D),
                TriBc::ND => (Bc::D, Bc::N, Bc::N),
                TriBc::DN => (Bc::N, Bc::D, Bc::D),
            };
            polygon(
                Exact::sqrt3().scale(q(1, 8)),
                &[(Exact::sqrt3().scale(half), long), (ex(half), short), (Exact::int(1), hyp)],
                &[half, q(1, 3), q(1, 6)],
            )
        }
        SurfaceSpec::Cylinder { a, b, bc } => {
            let (lo, hi) = match bc {
                CylBc::N => (Bc::N, Bc::N),
                CylBc::D => (Bc::D, Bc::D),
                CylBc::M => (Bc::N, Bc::D),
            };
            smooth_boundary(ex(*a * *b), &[(ex(*a), lo), (ex(*a), hi)], Exact::zero())
        }
        SurfaceSpec::MobiusBand { a, b, bc } => smooth_boundary(ex(*a * *b), &[(ex(*a * 2), *bc)], Exact::zero()),
        SurfaceSpec::Sphere => closed(pi_times(q(4, 1)), &[], pi_times(q(4, 1))),
        SurfaceSpec::ProjectiveSphere => closed(pi_times(q(2, 1)), &[], pi_times(q(2, 1))),
        SurfaceSpec::Hemisphere { bc } => {
            smooth_boundary(pi_times(q(2, 1)), &[(pi_times(q(2, 1)), *bc)], pi_times(q(2, 1)))
        }
        SurfaceSpec::Lune { m, bc } => {
            let area = pi_times(q(2, *m as i64));
            let mut g = polygon(area.clone(), &[(Exact::pi(), *bc), (Exact::pi(), *bc)], &[q(1, *m as i64); 2]);
            g.curvature_integral = area;
            g
        }
        SurfaceSpec::HalfLune { m, side, equator } => {
            let m = *m as i64;
            let area = pi_times(q(1, m));
            let mut g = polygon(
                area.clone(),
                &[(pi_times(half), *side), (pi_times(q(1, m)), *equator), (pi_times(half), *side)],
                &[half, half, q(1, m)],
            );
            g.curvature_integral = area;
            g
        }
        SurfaceSpec::GluedLune { m } => {
            let area = pi_times(q(4, *m as i64));
            let cones: Vec<Ratio> = if *m > 1 { vec![q(2, *m as i64); 2] } else { Vec::new() };
            closed(area.clone(), &cones, area)
        }
        SurfaceSpec::FlatProjectivePlane => closed(Exact::int(1), &[Ratio::one(); 2], Exact::zero()),
        SurfaceSpec::TetrahedronSurface => closed(Exact::sqrt3(), &[Ratio::one(); 4], Exact::zero()),
        SurfaceSpec::HalfTetrahedron { bc } => {
            let mut g =
                polygon(Exact::sqrt3().scale(half), &[(Exact::int(1), *bc), (Exact::sqrt3(), *bc)], &[half, half]);
            g.cone_points.push(ConePoint { angle: Ratio::one() });
            g
        }
        SurfaceSpec::SymmetrySector { .. } => {
            let Some((tri, factor)) = spec.sector_triangle() else {
                return Err(Error::NoGeometry(spec.label()));
            };
            let g = geometry(&tri)?;
            if factor == 3 {
                rescale(g, &Exact::sqrt3().scale(q(1, 3)))
            } else {
                g
            }
        }
    };
    Ok(g)
}

fn push_norms(out: &mut Vec<f64>, scale: f64, form: crate::lattice::QuadForm, max_len: f64) {
    let kmax = ((max_len / scale).powi(2)).floor() as i64;
    for shell in form.shells(kmax).skip(1) {
        out.push(scale * (shell.key as f64).sqrt());
    }
}

/// Lengths of closed geodesics up to `max_len`, sorted and deduplicated.
pub fn geodesic_lengths(spec: &SurfaceSpec, max_len: f64) -> Result<Vec<f64>> {
    use crate::lattice::QuadForm;
    spec.validate()?;
    let mut out = Vec::new();
    let two_pi = 2.0 * std::f64::consts::PI;
    let multiples = |out: &mut Vec<f64>, step: f64| {
        let mut k = 1.0;
        while k * step <= max_len * (1.0 + 1e-12) {
            out.push(k * step);
            k += 1.0;
        }
    };
    match spec {
        SurfaceSpec::FlatTorusRect { a, b } => {
            let (pa, qa, pb, qb) = (*a.numer(), *a.denom(), *b.numer(), *b.denom());
            let den = qa * qb;
            let form = QuadForm::diagonal(4 * pa * pa * qb * qb, 4 * pb * pb * qa * qa);
            push_norms(&mut out, 1.0 / den as f64, form, max_len);
        }
        SurfaceSpec::FlatTorusHex => push_norms(&mut out, 3f64.sqrt(), QuadForm::new(1, 1, 1), max_len),
        SurfaceSpec::Sphere => multiples(&mut out, two_pi),
        SurfaceSpec::ProjectiveSphere => multiples(&mut out, std::f64::consts::PI),
        SurfaceSpec::GluedLune { m } => {
            multiples(&mut out, two_pi / *m as f64);
            multiples(&mut out, two_pi);
        }
        SurfaceSpec::FlatProjectivePlane => {
            push_norms(&mut out, 2.0, QuadForm::diagonal(1, 1), max_len);
            let mut k = 1.0;
            while k <= max_len {
                out.push(k);
                k += 2.0;
            }
        }
        SurfaceSpec::TetrahedronSurface => push_norms(&mut out, 2.0, QuadForm::new(1, 1, 1), max_len),
        _ => return Err(Error::HasBoundary(spec.label())),
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_lengths_by_condition() {
        let g = geometry(&SurfaceSpec::Rectangle { a: q(2, 1), b: q(1, 1), bc: RectBc::ND }).unwrap();
        assert_eq!(g.len_n, Exact::int(4));
        assert_eq!(g.len_d, Exact::int(2));
        assert!(g.corners.iter().all(|c| !c.like));
        let g = geometry(&SurfaceSpec::Rectangle { a: q(2, 1), b: q(1, 1), bc: RectBc::NM }).unwrap();
        assert_eq!(g.len_n, Exact::int(4));
        assert_eq!(g.corners.iter().filter(|c| c.like).count(), 2);
    }

    #[test]
    fn triangle_angles_sum_to_pi() {
        for spec in [
            SurfaceSpec::RightIsoTriangle { a: q(1, 1), bc: RightIsoBc::MN },
            SurfaceSpec::EquilateralTriangle { bc: Bc::N },
            SurfaceSpec::Triangle306090 { bc: TriBc::ND },
        ] {
            let g = geometry(&spec).unwrap();
            let s: Ratio = g.corners.iter().map(|c| c.angle).sum();
            assert_eq!(s, Ratio::one());
        }
    }

    #[test]
    fn sector_geometry_is_scaled_triangle() {
        let spec = SurfaceSpec::SymmetrySector { base: SectorBase::EquilateralN, irrep: Irrep::Plus };
        let g = geometry(&spec).unwrap();
        assert_eq!(g.area, Exact::sqrt3().scale(q(1, 24)));
        let two = SurfaceSpec::SymmetrySector { base: SectorBase::SquareN, irrep: Irrep::Two };
        assert!(matches!(geometry(&two), Err(Error::NoGeometry(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(SurfaceSpec::Rectangle { a: q(0, 1), b: q(1, 1), bc: RectBc::N }.validate().is_err());
        assert!(SurfaceSpec::Lune { m: 0, bc: Bc::N }.validate().is_err());
        let bad = SurfaceSpec::SymmetrySector { base: SectorBase::HexTorus, irrep: Irrep::PP };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn torus_geodesics() {
        let l = geodesic_lengths(&SurfaceSpec::FlatTorusRect { a: q(1, 1), b: q(1, 1) }, 4.0).unwrap();
        let expect = [2.0, 2.0 * 2f64.sqrt(), 4.0];
        assert_eq!(l.len(), 3);
        for (x, y) in l.iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(geodesic_lengths(&SurfaceSpec::Hemisphere { bc: Bc::N }, 10.0).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(SurfaceSpec::Rectangle { a: q(1, 1), b: q(3, 2), bc: RectBc::N }.label(), "rect:a=1,b=3/2,bc=N");
        assert_eq!(SurfaceSpec::Sphere.label(), "sphere");
        assert_eq!(
            SurfaceSpec::SymmetrySector { base: SectorBase::SquareTorus, irrep: Irrep::PM }.label(),
            "sector:base=squaretorus,irrep=+-"
        );
    }
}
