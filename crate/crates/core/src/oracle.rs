//! Brute-force reference spectra. Flat surfaces are quotients of a torus by
//! a finite group of isometries; their eigenspaces are the isotypic parts of
//! the torus eigenspaces, computed with characters. Spherical surfaces are
//! handled by counting azimuthal modes of spherical harmonics.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{Bc, CylBc, Irrep, Ratio, RectBc, RightIsoBc, SectorBase, SurfaceSpec, TriBc};
use crate::error::{Error, Result};
use crate::spectrum::{self, EigenLevel, Spectrum};

type Mat = [[i64; 2]; 2];

/// Largest number of torus modes the flat oracle will enumerate.
pub const MODE_GUARD: u64 = 100_000_000;

/// Isometry `x -> M x + beta` of `R^2 / Z^2` in lattice coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Affine {
    m: Mat,
    beta: [Ratio; 2],
}

fn frac(r: Ratio) -> Ratio {
    r - Ratio::from_integer(r.floor().to_integer())
}

impl Affine {
    fn identity() -> Affine {
        Affine { m: [[1, 0], [0, 1]], beta: [Ratio::from_integer(0); 2] }
    }

    /// `self` after `other`.
    fn compose(&self, other: &Affine) -> Affine {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        let z = |i: usize| {
            frac(
                Ratio::from_integer(a[i][0]) * other.beta[0]
                    + Ratio::from_integer(a[i][1]) * other.beta[1]
                    + self.beta[i],
            )
        };
        Affine { m, beta: [z(0), z(1)] }
    }

    fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `sum over fixed dual points n of cos(2 pi n . beta)`.
    fn trace(&self, shell: &[(i64, i64)]) -> f64 {
        let m = &self.m;
        shell
            .iter()
            .filter(|&&(a, b)| m[0][0] * a + m[1][0] * b == a && m[0][1] * a + m[1][1] * b == b)
            .map(|&(a, b)| {
                let phase = Ratio::from_integer(a) * self.beta[0] + Ratio::from_integer(b) * self.beta[1];
                (2.0 * PI * phase.to_f64().unwrap()).cos()
            })
            .sum()
    }
}

/// Torus `R^2 / E Z^2` with basis vectors as columns of `e`.
#[derive(Clone, Copy, Debug)]
struct Torus {
    e: [[f64; 2]; 2],
}

impl Torus {
    fn diag(a: f64, b: f64) -> Torus {
        Torus { e: [[a, 0.0], [0.0, b]] }
    }

    fn hex() -> Torus {
        let s = 3f64.sqrt();
        Torus { e: [[s, s / 2.0], [0.0, 1.5]] }
    }

    fn tetra() -> Torus {
        Torus { e: [[2.0, 1.0], [0.0, 3f64.sqrt()]] }
    }

    fn inv(&self) -> [[f64; 2]; 2] {
        let e = &self.e;
        let d = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        [[e[1][1] / d, -e[0][1] / d], [-e[1][0] / d, e[0][0] / d]]
    }

    /// Eigenvalue `4 pi^2 |E^{-T} n|^2` of the dual point `n`.
    fn eigenvalue(&self, n: (i64, i64)) -> f64 {
        let ei = self.inv();
        let x = ei[0][0] * n.0 as f64 + ei[1][0] * n.1 as f64;
        let y = ei[0][1] * n.0 as f64 + ei[1][1] * n.1 as f64;
        4.0 * PI * PI * (x * x + y * y)
    }

    /// Cartesian isometry `y -> R y + b` in lattice coordinates.
    fn affine(&self, r: [[f64; 2]; 2], b: [f64; 2]) -> Affine {
        let ei = self.inv();
        let e = &self.e;
        let mut m = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut v = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        v += ei[i][k] * r[k][l] * e[l][j];
                    }
                }
                let rv = v.round();
                assert!((v - rv).abs() < 1e-9, "isometry does not preserve the lattice");
                m[i][j] = rv as i64;
            }
        }
        let beta = [0, 1].map(|i| {
            let v = ei[i][0] * b[0] + ei[i][1] * b[1];
            let den = (1..=48).find(|d| ((v * *d as f64) - (v * *d as f64).round()).abs() < 1e-9);
            let den = den.expect("translation is not a small rational multiple of the lattice");
            frac(Ratio::new((v * den as f64).round() as i64, den))
        });
        Affine { m, beta }
    }

    /// Reflection across the line through `p` with direction angle `theta`.
    fn reflection(&self, p: [f64; 2], theta: f64) -> Affine {
        let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        let r = [[c, s], [s, -c]];
        let b = [p[0] - (r[0][0] * p[0] + r[0][1] * p[1]), p[1] - (r[1][0] * p[0] + r[1][1] * p[1])];
        self.affine(r, b)
    }

    /// Dual points grouped by eigenvalue key, keys up to `kmax`.
    fn shells(&self, unit: f64, kmax: i64) -> Result<BTreeMap<i64, Vec<(i64, i64)>>> {
        let t = unit * (kmax as f64 + 0.5);
        let e = &self.e;
        let len = |i: usize| (e[0][i] * e[0][i] + e[1][i] * e[1][i]).sqrt();
        let bound = |i: usize| ((t.sqrt() / (2.0 * PI)) * len(i) + 2.0).ceil() as i64;
        let (r0, r1) = (bound(0), bound(1));
        let modes = ((2 * r0 + 1) as u64).saturating_mul((2 * r1 + 1) as u64);
        if modes > MODE_GUARD {
            return Err(Error::GuardExceeded(modes));
        }
        let mut out: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for a in -r0..=r0 {
            for b in -r1..=r1 {
                let x = self.eigenvalue((a, b)) / unit;
                let key = x.round();
                if key > kmax as f64 {
                    continue;
                }
                assert!((x - key).abs() < 1e-6 * key.max(1.0), "eigenvalue off the key lattice");
                out.entry(key as i64).or_default().push((a, b));
            }
        }
        Ok(out)
    }
}

/// Finite group of torus isometries with a one-dimensional character.
#[derive(Clone, Debug)]
struct Group {
    elems: BTreeMap<Affine, i64>,
}

impl Group {
    fn generate(gens: &[(Affine, i64)]) -> Result<Group> {
        let mut elems = BTreeMap::new();
        elems.insert(Affine::identity(), 1);
        let mut frontier = vec![(Affine::identity(), 1)];
        while let Some((g, cg)) = frontier.pop() {
            for (h, ch) in gens {
                let x = h.compose(&g);
                let cx = cg * ch;
                match elems.get(&x) {
                    Some(&c) if c != cx => return Err(Error::InconsistentCharacter),
                    Some(_) => {}
                    None => {
                        elems.insert(x, cx);
                        frontier.push((x, cx));
                    }
                }
                if elems.len() > 10_000 {
                    return Err(Error::GuardExceeded(elems.len() as u64));
                }
            }
        }
        Ok(Group { elems })
    }

    fn order(&self) -> usize {
        self.elems.len()
    }
}

/// Torus cover, deck group and boundary characters of a flat surface.
fn cover(spec: &SurfaceSpec) -> Option<(Torus, Vec<(Affine, i64)>)> {
    use SurfaceSpec as S;
    let f = |r: &Ratio| r.to_f64().unwrap();
    let sgn = |bc: Bc| bc.sign();
    let h = PI / 2.0;
    let out = match spec {
        S::FlatTorusRect { a, b } => (Torus::diag(2.0 * f(a), 2.0 * f(b)), vec![]),
        S::FlatTorusHex => (Torus::hex(), vec![]),
        S::Rectangle { a, b, bc } => {
            let (a, b) = (f(a), f(b));
            let tor = Torus::diag(4.0 * a, 4.0 * b);
            use Bc::{D, N};
            let (bottom, right, top, left) = match bc {
                RectBc::N => (N, N, N, N),
                RectBc::D => (D, D, D, D),
                RectBc::ND => (N, D, N, D),
                RectBc::NM => (N, N, D, N),
                RectBc::DM => (N, D, D, D),
                RectBc::MM => (N, D, D, N),
            };
            let gens = vec![
                (tor.reflection([0.0, 0.0], 0.0), sgn(bottom)),
                (tor.reflection([0.0, b], 0.0), sgn(top)),
                (tor.reflection([0.0, 0.0], h), sgn(left)),
                (tor.reflection([a, 0.0], h), sgn(right)),
            ];
            (tor, gens)
        }
        S::RightIsoTriangle { a, bc } => {
            let a = f(a);
            let tor = Torus::diag(4.0 * a, 4.0 * a);
            use Bc::{D, N};
            let (bottom, left, hyp) = match bc {
                RightIsoBc::N => (N, N, N),
                RightIsoBc::D => (D, D, D),
                RightIsoBc::ND => (N, N, D),
                RightIsoBc::DN => (D, D, N),
                RightIsoBc::MN => (N, D, N),
                RightIsoBc::MD => (N, D, D),
            };
            let gens = vec![
                (tor.reflection([0.0, 0.0], 0.0), sgn(bottom)),
                (tor.reflection([0.0, 0.0], h), sgn(left)),
                (tor.reflection([a, 0.0], 3.0 * PI / 4.0), sgn(hyp)),
            ];
            (tor, gens)
        }
        S::EquilateralTriangle { bc } => {
            let tor = Torus::hex();
            let s = sgn(*bc);
            let gens = vec![
                (tor.reflection([0.0, 0.0], PI / 6.0), s),
                (tor.reflection([0.0, 0.0], -PI / 6.0), s),
                (tor.reflection([3f64.sqrt() / 2.0, 0.0], h), s),
            ];
            (tor, gens)
        }
        S::Triangle306090 { bc } => {
            let tor = Torus::hex();
            use Bc::{D, N};
            let (long, short, hyp) = match bc {
                TriBc::N => (N, N, N),
                TriBc::D => (D, D, D),
                TriBc::ND => (D, N, N),
                TriBc::DN => (N, D, D),
            };
            let gens = vec![
                (tor.reflection([0.0, 0.0], 0.0), sgn(long)),
                (tor.reflection([3f64.sqrt() / 2.0, 0.0], h), sgn(short)),
                (tor.reflection([0.0, 0.0], PI / 6.0), sgn(hyp)),
            ];
            (tor, gens)
        }
        S::Cylinder { a, b, bc } => {
            let (a, b) = (f(a), f(b));
            let tor = Torus::diag(a, 4.0 * b);
            let (lo, hi) = match bc {
                CylBc::N => (1, 1),
                CylBc::D => (-1, -1),
                CylBc::M => (1, -1),
            };
            let gens = vec![(tor.reflection([0.0, 0.0], 0.0), lo), (tor.reflection([0.0, b], 0.0), hi)];
            (tor, gens)
        }
        S::MobiusBand { a, b, bc } => {
            let (a, b) = (f(a), f(b));
            let tor = Torus::diag(2.0 * a, 2.0 * b);
            let glide = tor.affine([[1.0, 0.0], [0.0, -1.0]], [a, b]);
            (tor, vec![(glide, 1), (tor.reflection([0.0, 0.0], 0.0), sgn(*bc))])
        }
        S::FlatProjectivePlane => {
            let tor = Torus::diag(2.0, 2.0);
            let g1 = tor.affine([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0]);
            let g2 = tor.affine([[-1.0, 0.0], [0.0, 1.0]], [1.0, 1.0]);
            (tor, vec![(g1, 1), (g2, 1)])
        }
        S::TetrahedronSurface => {
            let tor = Torus::tetra();
            (tor, vec![(tor.affine([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]), 1)])
        }
        S::HalfTetrahedron { bc } => {
            let tor = Torus::tetra();
            let gens = vec![
                (tor.affine([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]), 1),
                (tor.reflection([0.0, 0.0], h), sgn(*bc)),
            ];
            (tor, gens)
        }
        _ => return None,
    };
    Some(out)
}

/// Symmetry group of a sector base, generated in the base's cover.
fn symmetry_group(base: SectorBase, tor: &Torus) -> Vec<Affine> {
    let s3 = 3f64.sqrt();
    match base {
        SectorBase::SquareTorus => vec![tor.reflection([0.0, 0.0], PI / 4.0), tor.reflection([0.0, 0.0], PI / 2.0)],
        SectorBase::SquareN | SectorBase::SquareD => {
            vec![tor.reflection([0.0, 0.0], PI / 4.0), tor.reflection([0.5, 0.0], PI / 2.0)]
        }
        SectorBase::HexTorus => vec![
            tor.reflection([0.0, 0.0], PI / 6.0),
            tor.reflection([0.0, 0.0], -PI / 6.0),
            tor.reflection([s3 / 2.0, 0.0], PI / 2.0),
        ],
        SectorBase::EquilateralN | SectorBase::EquilateralD => {
            let c = [1.0 / s3, 0.0];
            vec![tor.reflection(c, 0.0), tor.reflection(c, PI / 3.0)]
        }
    }
}

/// Character of a symmetry element, classified by its linear part.
fn sector_character(base: SectorBase, irrep: Irrep, g: &Affine) -> Result<i64> {
    let id = g.m == [[1, 0], [0, 1]];
    if id && *g != Affine::identity() {
        return Err(Error::InconsistentCharacter);
    }
    if base.is_d4() {
        let rot180 = g.m == [[-1, 0], [0, -1]];
        let det = g.det();
        let diagonal_part = g.m[0][1] != 0;
        let (a, b) = match irrep {
            Irrep::PP => (1, 1),
            Irrep::PM => (1, -1),
            Irrep::MP => (-1, 1),
            Irrep::MM => (-1, -1),
            Irrep::Two => {
                return Ok(if id {
                    2
                } else if rot180 {
                    -2
                } else {
                    0
                })
            }
            _ => return Err(Error::InvalidArgument("D3 irrep on a D4 base".into())),
        };
        Ok(if id || rot180 {
            1
        } else if det == 1 {
            a * b
        } else if diagonal_part {
            a
        } else {
            b
        })
    } else {
        let det = g.det();
        Ok(match irrep {
            Irrep::Plus => 1,
            Irrep::Minus => det,
            Irrep::Two => {
                if id {
                    2
                } else if det == 1 {
                    -1
                } else {
                    0
                }
            }
            _ => return Err(Error::InvalidArgument("D4 irrep on a D3 base".into())),
        })
    }
}

fn round_dim(x: f64) -> u64 {
    let r = x.round();
    assert!((x - r).abs() < 1e-6 && r >= 0.0, "projection dimension {} is not a natural number", x);
    r as u64
}

/// Weighted group elements whose sum is the projection onto the
/// functions that descend to the surface.
struct Projector {
    terms: Vec<(Affine, f64)>,
    linear: Vec<Mat>,
}

impl Projector {
    fn new(terms: Vec<(Affine, f64)>) -> Projector {
        let mut linear: Vec<Mat> = terms.iter().map(|(g, _)| g.m).collect();
        linear.sort();
        linear.dedup();
        Projector { terms, linear }
    }

    fn for_spec(spec: &SurfaceSpec) -> Result<(Torus, Projector)> {
        if let SurfaceSpec::SymmetrySector { base, irrep } = spec {
            let (tor, gens) = cover(&base.surface()).expect("flat base");
            let h = Group::generate(&gens)?;
            let sym: Vec<(Affine, i64)> = symmetry_group(*base, &tor).into_iter().map(|g| (g, 1)).collect();
            let k = Group::generate(&sym)?;
            let expected = if base.is_d4() { 8 } else { 6 };
            if k.order() != expected {
                return Err(Error::InconsistentCharacter);
            }
            let norm = irrep.dim() as f64 / (h.order() * k.order()) as f64;
            let mut terms = Vec::new();
            for kg in k.elems.keys() {
                let kc = sector_character(*base, *irrep, kg)?;
                if kc == 0 {
                    continue;
                }
                for (hg, hc) in &h.elems {
                    terms.push((kg.compose(hg), norm * (kc * hc) as f64));
                }
            }
            return Ok((tor, Projector::new(terms)));
        }
        let (tor, gens) = cover(spec).ok_or_else(|| Error::InvalidSpec(spec.label()))?;
        let g = Group::generate(&gens)?;
        let norm = 1.0 / g.order() as f64;
        let terms = g.elems.into_iter().map(|(e, c)| (e, norm * c as f64)).collect();
        Ok((tor, Projector::new(terms)))
    }

    /// Orbits of the dual action of the linear parts on one shell.
    fn orbits(&self, shell: &[(i64, i64)]) -> Vec<Vec<(i64, i64)>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &p in shell {
            if !seen.insert(p) {
                continue;
            }
            let mut orbit = vec![p];
            let mut i = 0;
            while i < orbit.len() {
                let (a, b) = orbit[i];
                for m in &self.linear {
                    let q = (m[0][0] * a + m[1][0] * b, m[0][1] * a + m[1][1] * b);
                    if seen.insert(q) {
                        orbit.push(q);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    fn dim(&self, points: &[(i64, i64)]) -> f64 {
        self.terms.iter().map(|(g, w)| w * g.trace(points)).sum()
    }
}

/// One orbit of torus modes and the dimension it contributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDim {
    pub points: Vec<(i64, i64)>,
    pub dim: u64,
}

fn flat_shells(spec: &SurfaceSpec, t_max: f64) -> Result<(Projector, BTreeMap<i64, Vec<(i64, i64)>>)> {
    let kmax = spectrum::threshold(spec, t_max)?;
    let unit = spectrum::key_value(spec, 1);
    let (tor, proj) = Projector::for_spec(spec)?;
    let shells = tor.shells(unit, kmax)?;
    Ok((proj, shells))
}

/// Orbit decomposition of the torus modes with eigenvalue key `key`.
pub fn flat_orbits(spec: &SurfaceSpec, key: i64) -> Result<Vec<OrbitDim>> {
    spec.validate()?;
    let (proj, shells) = flat_shells(spec, spectrum::key_value(spec, key))?;
    let shell = shells.get(&key).cloned().unwrap_or_default();
    Ok(proj
        .orbits(&shell)
        .into_iter()
        .map(|points| {
            let dim = round_dim(proj.dim(&points));
            OrbitDim { points, dim }
        })
        .collect())
}

fn flat_oracle(spec: &SurfaceSpec, t_max: f64) -> Result<Vec<EigenLevel>> {
    let unit = spectrum::key_value(spec, 1);
    let (proj, shells) = flat_shells(spec, t_max)?;
    let shells: Vec<(i64, Vec<(i64, i64)>)> = shells.into_iter().collect();
    let mut out: Vec<EigenLevel> = shells
        .par_iter()
        .map(|(key, shell)| {
            let mult: u64 = proj.orbits(shell).iter().map(|o| round_dim(proj.dim(o))).sum();
            EigenLevel { key: *key, value: unit * *key as f64, mult }
        })
        .filter(|l| l.mult > 0)
        .collect();
    out.sort_by_key(|l| l.key);
    Ok(out)
}

/// A mode of the covering space that contributes to an eigenspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisLabel {
    /// Torus mode `(j, k)` in dual lattice coordinates, tagged by its orbit.
    Flat { j: i64, k: i64, orbit: usize },
    /// `P_N^q(w) cos(q phi)`, or `sin(q phi)` when `sine`.
    Spherical { degree: u32, q: u32, sine: bool },
}

impl BasisLabel {
    /// `(-1)^(N+q)`, the parity under `w -> -w`.
    pub fn equatorial_parity(&self) -> Option<i32> {
        match *self {
            BasisLabel::Spherical { degree, q, .. } => Some(if (degree + q) % 2 == 0 { 1 } else { -1 }),
            BasisLabel::Flat { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarmonicDimension {
    pub degree: u32,
    pub dim_diff: u64,
}

/// Harmonics of degree `degree` that descend to the surface.
pub fn spherical_basis(spec: &SurfaceSpec, degree: u32) -> Result<Vec<BasisLabel>> {
    use SurfaceSpec as S;
    let mut basis = Vec::new();
    for q in 0..=degree {
        for sine in [false, true] {
            if sine && q == 0 {
                continue;
            }
            let even = (degree + q) % 2 == 0;
            let keep = match spec {
                S::Sphere => true,
                S::Hemisphere { bc } => even == (*bc == Bc::N),
                S::ProjectiveSphere => degree % 2 == 0,
                S::Lune { m, bc } => q % m == 0 && sine == (*bc == Bc::D),
                S::HalfLune { m, side, equator } => {
                    q % m == 0 && sine == (*side == Bc::D) && even == (*equator == Bc::N)
                }
                S::GluedLune { m } => q % m == 0,
                _ => return Err(Error::InvalidSpec(format!("{} is not spherical", spec))),
            };
            if keep {
                basis.push(BasisLabel::Spherical { degree, q, sine });
            }
        }
    }
    Ok(basis)
}

/// Multiplicity of `N(N+1)` counted from the azimuthal modes.
pub fn harmonic_dimension(spec: &SurfaceSpec, degree: u32) -> Result<HarmonicDimension> {
    Ok(HarmonicDimension { degree, dim_diff: spherical_basis(spec, degree)?.len() as u64 })
}

/// Torus modes spanning the eigenspace with key `key` after projection.
pub fn basis_labels(spec: &SurfaceSpec, key: i64) -> Result<Vec<BasisLabel>> {
    if spec.is_spherical() {
        return spherical_basis(spec, key.max(0) as u32);
    }
    let mut out = Vec::new();
    for (orbit, o) in flat_orbits(spec, key)?.into_iter().enumerate() {
        if o.dim > 0 {
            out.extend(o.points.iter().map(|&(j, k)| BasisLabel::Flat { j, k, orbit }));
        }
    }
    Ok(out)
}

/// Reference spectrum up to `t_max`, computed without the counting code.
pub fn brute_levels(spec: &SurfaceSpec, t_max: f64) -> Result<Vec<EigenLevel>> {
    spec.validate()?;
    if spec.is_spherical() {
        let kmax = spectrum::spherical_threshold(t_max);
        let mut out = Vec::new();
        for n in 0..=kmax {
            let dim = harmonic_dimension(spec, n as u32)?.dim_diff;
            if dim > 0 {
                out.push(EigenLevel { key: n, value: (n * (n + 1)) as f64, mult: dim });
            }
        }
        return Ok(out);
    }
    flat_oracle(spec, t_max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub t: f64,
    pub brute: u64,
    pub closed: u64,
    /// Which computation disagreed with the oracle.
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub spec: SurfaceSpec,
    pub t_max: f64,
    pub levels: usize,
    pub points_checked: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Jumps and midpoints between consecutive jumps.
fn probe_points(levels: &[EigenLevel]) -> Vec<f64> {
    let mut points = Vec::with_capacity(2 * levels.len());
    let mut prev = 0.0f64;
    for l in levels {
        if l.value > prev {
            points.push(0.5 * (prev + l.value));
        }
        points.push(l.value);
        prev = l.value;
    }
    points
}

fn compare(spec: &SurfaceSpec, t_max: f64, fast: &[EigenLevel], oracle: &[EigenLevel]) -> Result<EquivalenceReport> {
    let points = probe_points(oracle);
    let mut report =
        EquivalenceReport { spec: spec.clone(), t_max, levels: oracle.len(), points_checked: 0, first_mismatch: None };
    let cumulative = |levels: &[EigenLevel]| {
        let mut acc = 0;
        levels
            .iter()
            .map(|l| {
                acc += l.mult;
                (l.value, acc)
            })
            .collect::<Vec<_>>()
    };
    let at = |c: &[(f64, u64)], t: f64| {
        let i = c.partition_point(|&(v, _)| spectrum::within(v, t));
        if i == 0 {
            0
        } else {
            c[i - 1].1
        }
    };
    let (cf, co) = (cumulative(fast), cumulative(oracle));
    let has_identity = spectrum::closed_form_identity(spec, 0.0).is_ok();
    for l in fast.iter().chain(oracle) {
        let t = l.value;
        let (b, n) = (at(&co, t), at(&cf, t));
        if b != n {
            report.first_mismatch = Some(Mismatch { t, brute: b, closed: n, source: "levels" });
            return Ok(report);
        }
    }
    for &t in &points {
        report.points_checked += 1;
        let brute = at(&co, t);
        let mut check = |closed: u64, source| {
            if closed != brute && report.first_mismatch.is_none() {
                report.first_mismatch = Some(Mismatch { t, brute, closed, source });
            }
        };
        check(at(&cf, t), "summation");
        if let Some(c) = spectrum::closed_form(spec, t)? {
            check(c, "closed form");
        }
        if has_identity {
            let id = spectrum::closed_form_identity(spec, t)?;
            let v = if id.is_integer() { id.to_integer().max(0) as u64 } else { u64::MAX };
            check(v, "identity");
        }
        if report.first_mismatch.is_some() {
            break;
        }
    }
    Ok(report)
}

/// Compares summation, closed form, counting identity and the brute-force
/// oracle at every jump and every midpoint between jumps up to `t_max`.
pub fn check_equivalence(spec: &SurfaceSpec, t_max: f64) -> Result<EquivalenceReport> {
    let fast: Vec<EigenLevel> = spectrum::levels(spec, t_max)?.collect();
    let oracle = brute_levels(spec, t_max)?;
    compare(spec, t_max, &fast, &oracle)
}

/// Counting identity (or closed form) against summation at `samples`
/// jumps and midpoints drawn at random below `t_max`. Returns the number
/// of disagreements.
pub fn random_sweep(spec: &SurfaceSpec, t_max: f64, samples: usize, seed: u64) -> Result<usize> {
    let table = Spectrum::build(spec, t_max)?;
    let levels: Vec<EigenLevel> = table.levels().collect();
    let points = probe_points(&levels);
    if points.is_empty() {
        return Ok(0);
    }
    let has_identity = spectrum::closed_form_identity(spec, 0.0).is_ok();
    if !has_identity && !spec.is_spherical() {
        return Err(Error::NoIdentity(spec.label()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..samples {
        let t = points[rng.gen_range(0..points.len())];
        let n = table.count(t);
        let other = if has_identity {
            let v = spectrum::closed_form_identity(spec, t)?;
            if !v.is_integer() {
                bad += 1;
                continue;
            }
            v.to_integer() as u64
        } else {
            spectrum::closed_form(spec, t)?.expect("spherical closed form")
        };
        if other != n {
            bad += 1;
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deck_group_orders() {
        let one = Ratio::from_integer(1);
        let rect = SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::N };
        let (_, gens) = cover(&rect).unwrap();
        assert_eq!(Group::generate(&gens).unwrap().order(), 16);
        let (_, gens) = cover(&SurfaceSpec::EquilateralTriangle { bc: Bc::D }).unwrap();
        assert_eq!(Group::generate(&gens).unwrap().order(), 6);
        let (_, gens) = cover(&SurfaceSpec::Triangle306090 { bc: TriBc::D }).unwrap();
        assert_eq!(Group::generate(&gens).unwrap().order(), 12);
    }

    #[test]
    fn torus_eigenvalue_keys_match_forms() {
        let tor = Torus::hex();
        let unit = spectrum::key_value(&SurfaceSpec::FlatTorusHex, 1);
        for (a, b) in [(1, 0), (0, 1), (1, 1), (2, -1), (3, 5)] {
            let x = tor.eigenvalue((a, b)) / unit;
            assert!((x - x.round()).abs() < 1e-9);
        }
        let mut ours: Vec<u64> = tor.shells(unit, 12).unwrap().values().map(|v| v.len() as u64).collect();
        let mut theirs: Vec<u64> =
            spectrum::levels(&SurfaceSpec::FlatTorusHex, unit * 12.0).unwrap().map(|l| l.mult).collect();
        ours.sort();
        theirs.sort();
        assert_eq!(ours, theirs);
    }

    #[test]
    fn sphere_basis_sizes() {
        for n in 0..20u32 {
            assert_eq!(harmonic_dimension(&SurfaceSpec::Sphere, n).unwrap().dim_diff, 2 * n as u64 + 1);
        }
        let lune = SurfaceSpec::Lune { m: 2, bc: Bc::D };
        assert_eq!(spherical_basis(&lune, 3).unwrap(), vec![BasisLabel::Spherical { degree: 3, q: 2, sine: true }]);
    }

    #[test]
    fn small_equivalences() {
        let one = Ratio::from_integer(1);
        for spec in [
            SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::MM },
            SurfaceSpec::EquilateralTriangle { bc: Bc::N },
            SurfaceSpec::MobiusBand { a: Ratio::from_integer(2), b: one, bc: Bc::D },
            SurfaceSpec::SymmetrySector { base: SectorBase::SquareN, irrep: Irrep::Two },
            SurfaceSpec::HalfLune { m: 3, side: Bc::D, equator: Bc::N },
        ] {
            let r = check_equivalence(&spec, 600.0).unwrap();
            assert!(r.passed(), "{}: {:?}", spec, r.first_mismatch);
        }
    }

    #[test]
    fn every_catalog_surface_matches_oracle() {
        let mut failed = Vec::new();
        for spec in crate::asymptotics::fixture_specs() {
            let t = if spec.is_spherical() { 20_000.0 } else { 1500.0 };
            let r = check_equivalence(&spec, t).unwrap();
            if !r.passed() {
                failed.push(format!("{}: {:?}", spec, r.first_mismatch));
            }
        }
        assert!(failed.is_empty(), "{:#?}", failed);
    }

    #[test]
    fn random_sweep_is_clean() {
        let one = Ratio::from_integer(1);
        let spec = SurfaceSpec::Rectangle { a: one, b: Ratio::new(3, 2), bc: RectBc::NM };
        assert_eq!(random_sweep(&spec, 5000.0, 500, 7).unwrap(), 0);
        assert_eq!(random_sweep(&SurfaceSpec::ProjectiveSphere, 5000.0, 500, 7).unwrap(), 0);
    }

    #[test]
    fn oracle_distinguishes_boundary_conditions() {
        let one = Ratio::from_integer(1);
        let n = brute_levels(&SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::NM }, 400.0).unwrap();
        let d = brute_levels(&SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::DM }, 400.0).unwrap();
        assert_ne!(n, d);
        let h = brute_levels(&SurfaceSpec::SymmetrySector { base: SectorBase::EquilateralD, irrep: Irrep::Two }, 400.0);
        assert!(!h.unwrap().is_empty());
    }

    #[test]
    fn perturbed_multiplicity_is_caught() {
        let one = Ratio::from_integer(1);
        let spec = SurfaceSpec::Rectangle { a: one, b: one, bc: RectBc::N };
        let oracle = brute_levels(&spec, 500.0).unwrap();
        let mut fast: Vec<EigenLevel> = spectrum::levels(&spec, 500.0).unwrap().collect();
        assert!(compare(&spec, 500.0, &fast, &oracle).unwrap().passed());
        fast[5].mult += 1;
        let r = compare(&spec, 500.0, &fast, &oracle).unwrap();
        let m = r.first_mismatch.unwrap();
        assert_eq!(m.t, fast[5].value);
        assert_eq!(m.closed, m.brute + 1);
    }

    #[test]
    fn zero_cutoff_passes() {
        for spec in crate::asymptotics::fixture_specs() {
            assert!(check_equivalence(&spec, 0.0).unwrap().passed(), "{}", spec);
        }
    }

    #[test]
    fn square_torus_total_matches_row_sums() {
        let spec = SurfaceSpec::FlatTorusRect { a: Ratio::new(1, 2), b: Ratio::new(1, 2) };
        for k in [0i64, 1, 2, 10, 100, 1000] {
            let total: u64 = brute_levels(&spec, 4.0 * PI * PI * k as f64).unwrap().iter().map(|l| l.mult).sum();
            let mut rows = 0i64;
            let r = crate::lattice::isqrt(k);
            for j in -r..=r {
                rows += 2 * crate::lattice::isqrt(k - j * j) + 1;
            }
            assert_eq!(total as i64, rows, "k={}", k);
        }
        let two = SurfaceSpec::FlatTorusRect { a: Ratio::from_integer(1), b: Ratio::from_integer(1) };
        assert_eq!(brute_levels(&two, 10.0 * PI * PI).unwrap().iter().map(|l| l.mult).sum::<u64>(), 37);
    }

    #[test]
    fn azimuthal_examples() {
        for n in 0..40u32 {
            let d = harmonic_dimension(&SurfaceSpec::Lune { m: 2, bc: Bc::N }, n).unwrap();
            assert_eq!(d.dim_diff, (n / 2 + 1) as u64);
        }
        let half = SurfaceSpec::HalfLune { m: 1, side: Bc::N, equator: Bc::N };
        assert_eq!(harmonic_dimension(&half, 2).unwrap().dim_diff, 2);
        for l in spherical_basis(&half, 7).unwrap() {
            assert_eq!(l.equatorial_parity(), Some(1));
        }
    }

    #[test]
    fn generic_rectangle_orbits_have_four_modes() {
        let one = Ratio::from_integer(1);
        let spec = SurfaceSpec::Rectangle { a: one, b: Ratio::new(3, 2), bc: RectBc::N };
        let key = spectrum::levels(&spec, 200.0).unwrap().find(|l| l.mult == 1 && l.key > 0).unwrap().key;
        let orbits = flat_orbits(&spec, key).unwrap();
        assert!(orbits.iter().all(|o| o.points.len() <= 4));
        assert_eq!(orbits.iter().map(|o| o.dim).sum::<u64>(), 1);
        assert!(!basis_labels(&spec, key).unwrap().is_empty());
    }

    #[test]
    fn guard_rejects_huge_enumerations() {
        let spec = SurfaceSpec::FlatTorusRect { a: Ratio::from_integer(1), b: Ratio::from_integer(1) };
        assert!(matches!(brute_levels(&spec, 1e12), Err(Error::GuardExceeded(_))));
    }
}
