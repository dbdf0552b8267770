//! Text form of surfaces: `family` or `family:key=val,key=val`.
//!
//! Lengths are integers, fractions `p/q` or finite decimals, and are kept
//! exact. The printed form is [`SurfaceSpec::label`], which this parser
//! accepts back unchanged.

use std::collections::BTreeMap;

use surfspec::catalog::Ratio;
use surfspec::{Bc, CylBc, Irrep, RectBc, RightIsoBc, SectorBase, SurfaceSpec, TriBc};

pub const FAMILIES: [&str; 18] = [
    "torus",
    "hextorus",
    "rect",
    "rightiso",
    "equilateral",
    "tri306090",
    "cylinder",
    "mobius",
    "sphere",
    "hemisphere",
    "projsphere",
    "lune",
    "halflune",
    "gluedlune",
    "projplane",
    "tetra",
    "halftetra",
    "sector",
];

pub const SECTOR_BASES: [SectorBase; 6] = [
    SectorBase::SquareTorus,
    SectorBase::SquareN,
    SectorBase::SquareD,
    SectorBase::HexTorus,
    SectorBase::EquilateralN,
    SectorBase::EquilateralD,
];

struct Params<'a> {
    family: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(family: &'a str, body: &'a str) -> Result<Params<'a>, String> {
        let mut map = BTreeMap::new();
        for item in body.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value in {:?}", item))?;
            let (k, v) = (k.trim(), v.trim());
            if map.insert(k, v).is_some() {
                return Err(format!("{}: key {} given twice", family, k));
            }
        }
        Ok(Params { family, map })
    }

    fn take(&mut self, key: &str) -> Result<&'a str, String> {
        self.map.remove(key).ok_or_else(|| format!("{}: missing key {}", self.family, key))
    }

    fn ratio(&mut self, key: &str) -> Result<Ratio, String> {
        let v = self.take(key)?;
        parse_ratio(v).ok_or_else(|| format!("{}: {}={} is not a number", self.family, key, v))
    }

    fn count(&mut self, key: &str) -> Result<u32, String> {
        let v = self.take(key)?;
        v.parse().map_err(|_| format!("{}: {}={} is not a positive integer", self.family, key, v))
    }

    fn bc<T>(&mut self, key: &str, choices: &[(&str, T)]) -> Result<T, String>
    where
        T: Copy,
    {
        let v = self.take(key)?;
        choices.iter().find(|c| c.0 == v).map(|c| c.1).ok_or_else(|| {
            let names: Vec<&str> = choices.iter().map(|c| c.0).collect();
            format!("{}: {}={} is not one of {}", self.family, key, v, names.join("|"))
        })
    }

    fn finish(self) -> Result<(), String> {
        match self.map.keys().next() {
            Some(k) => Err(format!("{}: unknown key {}", self.family, k)),
            None => Ok(()),
        }
    }
}

const BC: [(&str, Bc); 2] = [("N", Bc::N), ("D", Bc::D)];
const RECT: [(&str, RectBc); 6] = [
    ("N", RectBc::N),
    ("D", RectBc::D),
    ("ND", RectBc::ND),
    ("NM", RectBc::NM),
    ("DM", RectBc::DM),
    ("MM", RectBc::MM),
];
const RIGHT_ISO: [(&str, RightIsoBc); 6] = [
    ("N", RightIsoBc::N),
    ("D", RightIsoBc::D),
    ("ND", RightIsoBc::ND),
    ("DN", RightIsoBc::DN),
    ("MN", RightIsoBc::MN),
    ("MD", RightIsoBc::MD),
];
const TRI: [(&str, TriBc); 4] = [("N", TriBc::N), ("D", TriBc::D), ("ND", TriBc::ND), ("DN", TriBc::DN)];
const CYL: [(&str, CylBc); 3] = [("N", CylBc::N), ("D", CylBc::D), ("M", CylBc::M)];

/// Integer, `p/q`, or finite decimal such as `1.25`.
pub fn parse_ratio(s: &str) -> Option<Ratio> {
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i64, i64) = (p.parse().ok()?, q.parse().ok()?);
        return (q != 0).then(|| Ratio::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let part: i64 = frac.parse().ok()?;
        let num = whole.checked_mul(den)?.checked_add(if negative { -part } else { part })?;
        return Some(Ratio::new(num, den));
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

pub fn parse_base(s: &str) -> Result<SectorBase, String> {
    SECTOR_BASES.iter().copied().find(|b| b.name() == s).ok_or_else(|| {
        let names: Vec<&str> = SECTOR_BASES.iter().map(|b| b.name()).collect();
        format!("unknown symmetry base {:?}; expected one of {}", s, names.join("|"))
    })
}

fn parse_irrep(base: SectorBase, s: &str) -> Result<Irrep, String> {
    let s = if s.len() > 1 { s.strip_prefix('1').unwrap_or(s) } else { s };
    base.irreps().iter().copied().find(|i| i.name() == s).ok_or_else(|| {
        let names: Vec<&str> = base.irreps().iter().map(|i| i.name()).collect();
        format!("sector: irrep={} is not one of {} for {}", s, names.join("|"), base.name())
    })
}

pub fn parse_spec(text: &str) -> Result<SurfaceSpec, String> {
    let text = text.trim();
    let (family, body) = text.split_once(':').unwrap_or((text, ""));
    let mut p = Params::parse(family, body)?;
    use SurfaceSpec as S;
    let spec = match family {
        "torus" => S::FlatTorusRect { a: p.ratio("a")?, b: p.ratio("b")? },
        "hextorus" => S::FlatTorusHex,
        "rect" => S::Rectangle { a: p.ratio("a")?, b: p.ratio("b")?, bc: p.bc("bc", &RECT)? },
        "rightiso" => S::RightIsoTriangle { a: p.ratio("a")?, bc: p.bc("bc", &RIGHT_ISO)? },
        "equilateral" => S::EquilateralTriangle { bc: p.bc("bc", &BC)? },
        "tri306090" => S::Triangle306090 { bc: p.bc("bc", &TRI)? },
        "cylinder" => S::Cylinder { a: p.ratio("a")?, b: p.ratio("b")?, bc: p.bc("bc", &CYL)? },
        "mobius" => S::MobiusBand { a: p.ratio("a")?, b: p.ratio("b")?, bc: p.bc("bc", &BC)? },
        "sphere" => S::Sphere,
        "hemisphere" => S::Hemisphere { bc: p.bc("bc", &BC)? },
        "projsphere" => S::ProjectiveSphere,
        "lune" => S::Lune { m: p.count("m")?, bc: p.bc("bc", &BC)? },
        "halflune" => S::HalfLune { m: p.count("m")?, side: p.bc("side", &BC)?, equator: p.bc("eq", &BC)? },
        "gluedlune" => S::GluedLune { m: p.count("m")? },
        "projplane" => S::FlatProjectivePlane,
        "tetra" => S::TetrahedronSurface,
        "halftetra" => S::HalfTetrahedron { bc: p.bc("bc", &BC)? },
        "sector" => {
            let base = parse_base(p.take("base")?)?;
            let irrep = parse_irrep(base, p.take("irrep")?)?;
            S::SymmetrySector { base, irrep }
        }
        _ => return Err(format!("unknown surface family {:?}; expected one of {}", family, FAMILIES.join("|"))),
    };
    p.finish()?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("3/2"), Some(Ratio::new(3, 2)));
        assert_eq!(parse_ratio("1.25"), Some(Ratio::new(5, 4)));
        assert_eq!(parse_ratio("-0.5"), Some(Ratio::new(-1, 2)));
        assert_eq!(parse_ratio("7"), Some(Ratio::from_integer(7)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("1."), None);
        assert_eq!(parse_ratio("x"), None);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "rect:a=1,b=1",
            "rect:a=1,b=1,bc=X",
            "rect:a=1,b=1,bc=N,c=2",
            "rect:a=0,b=1,bc=N",
            "lune:m=0,bc=N",
            "sphere:m=2",
            "sector:base=hextorus,irrep=++",
            "cube",
            "lune:m=2,m=3,bc=N",
        ] {
            assert!(parse_spec(bad).is_err(), "{}", bad);
        }
    }

    #[test]
    fn every_family_has_a_parser() {
        for family in FAMILIES {
            let err = parse_spec(family).err().unwrap_or_default();
            assert!(!err.contains("unknown surface family"), "{}", family);
        }
    }
}
