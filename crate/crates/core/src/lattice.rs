//! Integer points of positive-definite binary quadratic forms.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `#{j >= 1 : coef * j^2 <= k}`.
pub fn count_squares(coef: i64, k: i64) -> i64 {
    if k < coef {
        return 0;
    }
    isqrt(k / coef)
}

/// `#{j >= 0 : coef * (2j+1)^2 <= k}`.
pub fn count_odd_squares(coef: i64, k: i64) -> i64 {
    if k < coef {
        return 0;
    }
    (isqrt(k / coef) + 1) / 2
}

/// `a j^2 + b j k + c k^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm { a, b, c }
    }

    pub const fn diagonal(a: i64, c: i64) -> QuadForm {
        QuadForm { a, b: 0, c }
    }

    pub fn eval(&self, j: i64, k: i64) -> i64 {
        self.a * j * j + self.b * j * k + self.c * k * k
    }

    fn discriminant(&self) -> i64 {
        4 * self.a * self.c - self.b * self.b
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() > 0
    }

    /// Largest `|j|` for which some `k` gives a value `<= kmax`.
    fn row_bound(&self, kmax: i64) -> i64 {
        if kmax < 0 {
            return -1;
        }
        let num = 4 * self.c as i128 * kmax as i128;
        isqrt((num / self.discriminant() as i128) as i64)
    }

    /// Smallest `k` at or right of the real minimiser of row `j`.
    fn vertex(&self, j: i64) -> i64 {
        let num = -self.b * j;
        let den = 2 * self.c;
        num.div_euclid(den) + if num.rem_euclid(den) != 0 { 1 } else { 0 }
    }

    /// `#{(j,k) : Q(j,k) <= kmax}`, one row at a time.
    pub fn count(&self, kmax: i64) -> i64 {
        let jmax = self.row_bound(kmax);
        let mut total = 0;
        for j in -jmax..=jmax {
            if let Some((lo, hi)) = self.row_range(j, kmax) {
                total += hi - lo + 1;
            }
        }
        total
    }

    fn row_range(&self, j: i64, kmax: i64) -> Option<(i64, i64)> {
        let v = self.vertex(j);
        let (a, b, c) = (self.a as f64, self.b as f64, self.c as f64);
        let jf = j as f64;
        let disc = b * b * jf * jf - 4.0 * c * (a * jf * jf - kmax as f64);
        let center = -b * jf / (2.0 * c);
        let half = if disc > 0.0 { disc.sqrt() / (2.0 * c) } else { 0.0 };
        let mut hi = (center + half).floor() as i64;
        let mut lo = (center - half).ceil() as i64;
        if self.eval(j, v) > kmax && self.eval(j, v - 1) > kmax {
            return None;
        }
        hi = hi.max(v - 1);
        while self.eval(j, hi) > kmax {
            hi -= 1;
        }
        while self.eval(j, hi + 1) <= kmax {
            hi += 1;
        }
        lo = lo.min(hi);
        while self.eval(j, lo) > kmax {
            lo += 1;
        }
        while self.eval(j, lo - 1) <= kmax {
            lo -= 1;
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }

    /// Shells `{(j,k) : Q(j,k) = q}` in increasing `q`, up to `kmax`.
    pub fn shells(&self, kmax: i64) -> Shells {
        Shells::new(*self, kmax)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shell {
    pub key: i64,
    pub points: Vec<(i64, i64)>,
}

/// Streaming shell enumeration with two monotone cursors per row.
pub struct Shells {
    form: QuadForm,
    kmax: i64,
    heap: BinaryHeap<Reverse<(i64, i64, i64, i8)>>,
}

impl Shells {
    fn new(form: QuadForm, kmax: i64) -> Shells {
        assert!(form.is_positive_definite(), "form must be positive definite");
        let mut heap = BinaryHeap::new();
        let jmax = form.row_bound(kmax);
        for j in -jmax..=jmax {
            let v = form.vertex(j);
            for (k, dir) in [(v, 1i8), (v - 1, -1i8)] {
                let q = form.eval(j, k);
                if q <= kmax {
                    heap.push(Reverse((q, j, k, dir)));
                }
            }
        }
        Shells { form, kmax, heap }
    }
}

impl Iterator for Shells {
    type Item = Shell;

    fn next(&mut self) -> Option<Shell> {
        let Reverse((key, ..)) = *self.heap.peek()?;
        let mut points = Vec::new();
        while let Some(&Reverse((q, j, k, dir))) = self.heap.peek() {
            if q != key {
                break;
            }
            self.heap.pop();
            points.push((j, k));
            let k2 = k + dir as i64;
            let q2 = self.form.eval(j, k2);
            if q2 <= self.kmax {
                self.heap.push(Reverse((q2, j, k2, dir)));
            }
        }
        points.sort_unstable();
        Some(Shell { key, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(form: QuadForm, kmax: i64) -> i64 {
        let r = 4 * isqrt(kmax) + 4;
        let mut n = 0;
        for j in -r..=r {
            for k in -r..=r {
                if form.eval(j, k) <= kmax {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..10_000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(i64::MAX / 4), 1_518_500_249);
    }

    #[test]
    fn gauss_circle_values() {
        let f = QuadForm::diagonal(1, 1);
        assert_eq!(f.count(0), 1);
        assert_eq!(f.count(1), 5);
        assert_eq!(f.count(10), 37);
        assert_eq!(f.count(100), 317);
        assert_eq!(f.count(10_000), 31_417);
    }

    #[test]
    fn hexagonal_first_shells() {
        let f = QuadForm::new(1, 1, 1);
        let sizes: Vec<(i64, usize)> = f.shells(7).map(|s| (s.key, s.points.len())).collect();
        assert_eq!(sizes, vec![(0, 1), (1, 6), (3, 6), (4, 6), (7, 12)]);
    }

    proptest! {
        #[test]
        fn count_matches_brute(a in 1i64..6, c in 1i64..6, b in -4i64..5, kmax in 0i64..400) {
            let f = QuadForm::new(a, b, c);
            prop_assume!(f.is_positive_definite());
            prop_assert_eq!(f.count(kmax), brute(f, kmax));
        }

        #[test]
        fn shells_partition_ball(a in 1i64..6, c in 1i64..6, b in -4i64..5, kmax in 0i64..300) {
            let f = QuadForm::new(a, b, c);
            prop_assume!(f.is_positive_definite());
            let mut last = -1;
            let mut total = 0;
            for s in f.shells(kmax) {
                prop_assert!(s.key > last);
                last = s.key;
                for &(j, k) in &s.points {
                    prop_assert_eq!(f.eval(j, k), s.key);
                }
                total += s.points.len() as i64;
            }
            prop_assert_eq!(total, f.count(kmax));
        }
    }
}
