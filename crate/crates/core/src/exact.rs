//! Exact numbers of the form `sum r * sqrt(s) * pi^k` with rational `r`,
//! `s` in {1, 2, 3, 6} and small integer `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Surd {
    One,
    Sqrt2,
    Sqrt3,
    Sqrt6,
}

impl Surd {
    fn radicand(self) -> i64 {
        match self {
            Surd::One => 1,
            Surd::Sqrt2 => 2,
            Surd::Sqrt3 => 3,
            Surd::Sqrt6 => 6,
        }
    }

    fn from_squarefree(n: i64) -> Surd {
        match n {
            1 => Surd::One,
            2 => Surd::Sqrt2,
            3 => Surd::Sqrt3,
            6 => Surd::Sqrt6,
            _ => unreachable!("radicand outside basis"),
        }
    }

    /// `sqrt(a) * sqrt(b) = c * sqrt(d)`.
    fn product(self, other: Surd) -> (i64, Surd) {
        let (a, b) = (self.radicand(), other.radicand());
        let g = a.gcd(&b);
        (g, Surd::from_squarefree(a / g * (b / g)))
    }

    fn value(self) -> f64 {
        (self.radicand() as f64).sqrt()
    }

    fn label(self) -> &'static str {
        match self {
            Surd::One => "",
            Surd::Sqrt2 => "sqrt2",
            Surd::Sqrt3 => "sqrt3",
            Surd::Sqrt6 => "sqrt6",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Exact {
    terms: BTreeMap<(i8, Surd), Rational64>,
}

impl Exact {
    pub fn zero() -> Exact {
        Exact::default()
    }

    pub fn term(r: Rational64, surd: Surd, pi_pow: i8) -> Exact {
        let mut e = Exact::zero();
        e.push(pi_pow, surd, r);
        e
    }

    pub fn rational(r: Rational64) -> Exact {
        Exact::term(r, Surd::One, 0)
    }

    pub fn int(n: i64) -> Exact {
        Exact::rational(Rational64::from_integer(n))
    }

    pub fn frac(n: i64, d: i64) -> Exact {
        Exact::rational(Rational64::new(n, d))
    }

    pub fn pi() -> Exact {
        Exact::term(Rational64::one(), Surd::One, 1)
    }

    pub fn inv_pi() -> Exact {
        Exact::term(Rational64::one(), Surd::One, -1)
    }

    pub fn sqrt2() -> Exact {
        Exact::term(Rational64::one(), Surd::Sqrt2, 0)
    }

    pub fn sqrt3() -> Exact {
        Exact::term(Rational64::one(), Surd::Sqrt3, 0)
    }

    fn push(&mut self, pi_pow: i8, surd: Surd, r: Rational64) {
        let key = (pi_pow, surd);
        let v = self.terms.get(&key).copied().unwrap_or_else(Rational64::zero) + r;
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value when no surd or pi factor is present.
    pub fn as_rational(&self) -> Option<Rational64> {
        match self.terms.len() {
            0 => Some(Rational64::zero()),
            1 => self.terms.get(&(0, Surd::One)).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, r: Rational64) -> Exact {
        let mut out = Exact::zero();
        if r.is_zero() {
            return out;
        }
        for (&(k, s), &c) in &self.terms {
            out.terms.insert((k, s), c * r);
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&(k, s), c)| {
                (*c.numer() as f64 / *c.denom() as f64) * s.value() * std::f64::consts::PI.powi(k as i32)
            })
            .sum()
    }

    /// Reciprocal of a single-term value.
    pub fn recip(&self) -> Option<Exact> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&(k, s), &c) = self.terms.iter().next()?;
        let r = Rational64::from_integer(s.radicand()) * c;
        Some(Exact::term(r.recip(), s, -k))
    }

    pub fn div(&self, other: &Exact) -> Option<Exact> {
        other.recip().map(|r| self * &r)
    }
}

impl From<Rational64> for Exact {
    fn from(r: Rational64) -> Exact {
        Exact::rational(r)
    }
}

impl From<i64> for Exact {
    fn from(n: i64) -> Exact {
        Exact::int(n)
    }
}

impl Add for &Exact {
    type Output = Exact;
    fn add(self, rhs: &Exact) -> Exact {
        let mut out = self.clone();
        for (&(k, s), &c) in &rhs.terms {
            out.push(k, s, c);
        }
        out
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        &self + &rhs
    }
}

impl Neg for &Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        self.scale(-Rational64::one())
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        -&self
    }
}

impl Sub for &Exact {
    type Output = Exact;
    fn sub(self, rhs: &Exact) -> Exact {
        self + &(-rhs)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        &self - &rhs
    }
}

impl Mul for &Exact {
    type Output = Exact;
    fn mul(self, rhs: &Exact) -> Exact {
        let mut out = Exact::zero();
        for (&(k1, s1), &c1) in &self.terms {
            for (&(k2, s2), &c2) in &rhs.terms {
                let (f, s) = s1.product(s2);
                out.push(k1 + k2, s, c1 * c2 * Rational64::from_integer(f));
            }
        }
        out
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        &self * &rhs
    }
}

impl std::iter::Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |a, b| a + b)
    }
}

fn group_numerator(group: &[(Surd, Rational64)], denom: i64) -> String {
    let mut s = String::new();
    for (i, (surd, c)) in group.iter().enumerate() {
        let n = *(c * Rational64::from_integer(denom)).numer();
        let mag = n.abs();
        if i == 0 {
            if n < 0 {
                s.push('-');
            }
        } else {
            s.push(if n < 0 { '-' } else { '+' });
        }
        match (mag, *surd) {
            (m, Surd::One) => s.push_str(&m.to_string()),
            (1, sd) => s.push_str(sd.label()),
            (m, sd) => s.push_str(&format!("{}*{}", m, sd.label())),
        }
    }
    s
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut groups: BTreeMap<i8, Vec<(Surd, Rational64)>> = BTreeMap::new();
        for (&(k, s), &c) in &self.terms {
            groups.entry(k).or_default().push((s, c));
        }
        let mut first = true;
        for (k, group) in groups.iter().rev() {
            let denom = group.iter().fold(1i64, |acc, (_, c)| acc.lcm(c.denom()));
            let mut num = group_numerator(group, denom);
            let negative_single = group.len() == 1 && group[0].1.is_negative();
            if negative_single {
                num.remove(0);
            }
            if !first {
                write!(f, "{}", if negative_single { " - " } else { " + " })?;
            } else if negative_single {
                write!(f, "-")?;
            }
            first = false;
            let num = if group.len() > 1 { format!("({})", num) } else { num };
            let pi = match k.abs() {
                0 => String::new(),
                1 => "pi".to_string(),
                p => format!("pi^{}", p),
            };
            let (num, den) = match (*k > 0, *k < 0) {
                (true, _) => {
                    let num = if num == "1" { pi } else { format!("{}*{}", num, pi) };
                    (num, if denom == 1 { String::new() } else { denom.to_string() })
                }
                (_, true) => {
                    let den = if denom == 1 { pi } else { format!("({}*{})", denom, pi) };
                    (num, den)
                }
                _ => (num, if denom == 1 { String::new() } else { denom.to_string() }),
            };
            if den.is_empty() {
                write!(f, "{}", num)?;
            } else {
                write!(f, "{}/{}", num, den)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_products_reduce() {
        assert_eq!(&Exact::sqrt2() * &Exact::sqrt2(), Exact::int(2));
        let s6 = &Exact::sqrt2() * &Exact::sqrt3();
        assert_eq!(&s6 * &Exact::sqrt2(), Exact::int(2) * Exact::sqrt3());
        assert!((s6.to_f64() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = Exact::frac(1, 3) + Exact::sqrt2();
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &Exact::sqrt2()).as_rational(), Some(Rational64::new(1, 3)));
    }

    #[test]
    fn reciprocal_of_monomial() {
        let x = Exact::term(Rational64::new(3, 4), Surd::Sqrt3, 1);
        let r = x.recip().unwrap();
        assert_eq!(&x * &r, Exact::int(1));
        assert!((Exact::int(1) + Exact::sqrt2()).recip().is_none());
    }

    #[test]
    fn display_forms() {
        let b = (Exact::int(3) + Exact::sqrt3()).scale(Rational64::new(1, 8)) * Exact::inv_pi();
        assert_eq!(b.to_string(), "(3+sqrt3)/(8*pi)");
        assert_eq!(Exact::frac(3, 8).to_string(), "3/8");
        assert_eq!(Exact::frac(-1, 4).to_string(), "-1/4");
        let a = Exact::sqrt3().scale(Rational64::new(1, 16)) * Exact::inv_pi();
        assert_eq!(a.to_string(), "sqrt3/(16*pi)");
        assert_eq!(Exact::inv_pi().scale(Rational64::new(-1, 2)).to_string(), "-1/(2*pi)");
        let mixed = Exact::frac(1, 6) + Exact::inv_pi();
        assert_eq!(mixed.to_string(), "1/6 + 1/pi");
        assert_eq!(Exact::pi().to_string(), "pi");
    }
}
