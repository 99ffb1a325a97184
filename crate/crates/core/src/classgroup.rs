// SPDX-License-Identifier: Apache-2.0

//! The form class group of a negative discriminant and its dual.
//!
//! Classes are indexed by position in the lexicographically sorted list of
//! reduced forms, so index 0 is always the principal form `(1, b0, c0)`.
//! The group is decomposed as `Z/n_1 × … × Z/n_k` with `n_1 | n_2 | … | n_k`,
//! and every class carries its exponent vector against that basis.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qform::{compose_unchecked, opposite, reduce, Discriminant, QuadForm, ReducedForm};

/// Default cap on the class number accepted by [`ClassGroup::new`].
pub const DEFAULT_MAX_CLASS_NUMBER: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct ClassGroupOptions {
    /// Build the group of primitive forms even when D is not fundamental.
    pub allow_nonfundamental: bool,
    pub max_class_number: usize,
}

impl Default for ClassGroupOptions {
    fn default() -> Self {
        ClassGroupOptions {
            allow_nonfundamental: false,
            max_class_number: DEFAULT_MAX_CLASS_NUMBER,
        }
    }
}

/// All primitive reduced forms of discriminant `d`, sorted by `(a, b, c)`.
///
/// Uses `a <= sqrt(|D|/3)`, which holds for every reduced form.
pub fn enumerate_reduced_forms(d: Discriminant) -> Result<Vec<ReducedForm>> {
    if d.value() > -3 {
        return Err(Error::UnsupportedDiscriminant(d.value()));
    }
    let dv = d.value() as i128;
    let mut out = Vec::new();
    let mut a: i128 = 1;
    while 3 * a * a <= -dv {
        let mut b = -a + 1;
        if (b - dv).rem_euclid(2) != 0 {
            b += 1;
        }
        while b <= a {
            let num = b * b - dv;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let f = QuadForm {
                    a: a as i64,
                    b: b as i64,
                    c: c as i64,
                };
                if f.is_reduced() && f.is_primitive() {
                    out.push(ReducedForm::from_coefficients(f.a, f.b, f.c)?);
                }
            }
            b += 2;
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisElement {
    /// class index of the generator
    pub generator: usize,
    pub order: u64,
}

#[derive(Debug, Clone)]
pub struct ClassGroup {
    disc: Discriminant,
    elements: Vec<ReducedForm>,
    index: HashMap<ReducedForm, usize>,
    basis: Vec<BasisElement>,
    /// flat `h × k` table of exponent vectors
    coords: Vec<u64>,
}

impl ClassGroup {
    /// Builds the class group of a negative fundamental discriminant.
    pub fn new(d: Discriminant) -> Result<Self> {
        Self::with_options(d, ClassGroupOptions::default())
    }

    pub fn with_options(d: Discriminant, opts: ClassGroupOptions) -> Result<Self> {
        if d.value() > -3 {
            return Err(Error::UnsupportedDiscriminant(d.value()));
        }
        if !d.is_fundamental() && !opts.allow_nonfundamental {
            return Err(Error::NotFundamental(d.value()));
        }
        let elements = enumerate_reduced_forms(d)?;
        if elements.len() > opts.max_class_number {
            return Err(Error::ClassNumberTooLarge {
                cap: opts.max_class_number,
            });
        }
        let index = elements.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut g = ClassGroup {
            disc: d,
            elements,
            index,
            basis: Vec::new(),
            coords: Vec::new(),
        };
        g.decompose();
        Ok(g)
    }

    pub fn from_value(d: i64) -> Result<Self> {
        Self::new(Discriminant::new(d)?)
    }

    pub fn discriminant(&self) -> Discriminant {
        self.disc
    }

    pub fn class_number(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ReducedForm] {
        &self.elements
    }

    pub fn form(&self, i: usize) -> &ReducedForm {
        &self.elements[i]
    }

    pub fn index_of(&self, f: &ReducedForm) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Class index of an arbitrary form of this discriminant.
    pub fn class_of_form(&self, f: &QuadForm) -> Result<usize> {
        if f.discriminant() != self.disc.value() as i128 {
            return Err(Error::WrongDiscriminant {
                a: f.a,
                b: f.b,
                c: f.c,
                disc: self.disc.value(),
            });
        }
        let r = reduce(f);
        self.index_of(&r)
            .ok_or_else(|| Error::InvalidArgument(format!("{f} is not primitive")))
    }

    /// Class of the ideal with Z-basis `<a, (-b + sqrt(D))/2>`, i.e. of the
    /// form `(a, b, (b^2 - D)/4a)`.
    pub fn ideal_class_of(&self, a: i64, b: i64) -> Result<usize> {
        let f = QuadForm::from_ab(a, b, self.disc)?;
        self.class_of_form(&f)
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let f = compose_unchecked(&self.elements[i], &self.elements[j], self.disc.value() as i128);
        self.index[&f]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.index[&opposite(&self.elements[i])]
    }

    /// `i^k`; negative `k` uses the inverse.
    pub fn pow(&self, i: usize, k: i64) -> usize {
        let mut base = if k < 0 { self.inverse(i) } else { i };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn order_of(&self, i: usize) -> u64 {
        let h = self.class_number() as u64;
        let mut o = h;
        for p in prime_factors(h) {
            while o % p == 0 && self.pow(i, (o / p) as i64) == 0 {
                o /= p;
            }
        }
        o
    }

    /// Cyclic factors `(generator, n_j)` with `n_1 | n_2 | … | n_k`.
    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn invariants(&self) -> Vec<u64> {
        self.basis.iter().map(|b| b.order).collect()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Exponent vector of class `i` against the basis.
    pub fn coords(&self, i: usize) -> &[u64] {
        let k = self.rank();
        &self.coords[i * k..(i + 1) * k]
    }

    /// Class with the given exponent vector.
    pub fn from_coords(&self, exps: &[u64]) -> usize {
        self.basis
            .iter()
            .zip(exps)
            .fold(0, |acc, (b, &e)| self.mul(acc, self.pow(b.generator, e as i64)))
    }

    /// Peels off cyclic factors of maximal order, largest first, keeping an
    /// explicit table of the subgroup built so far. Discrete logs inside that
    /// subgroup are table lookups.
    fn decompose(&mut self) {
        let h = self.class_number();
        let mut sub: Vec<Option<Vec<u64>>> = vec![None; h];
        sub[0] = Some(Vec::new());
        let mut sub_size = 1usize;
        let mut basis: Vec<BasisElement> = Vec::new();

        while sub_size < h {
            let quotient = (h / sub_size) as u64;
            let qprimes = prime_factors(quotient);
            let in_sub = |x: usize| sub[x].is_some();
            let quotient_order = |x: usize| {
                let mut o = quotient;
                for &p in &qprimes {
                    while o % p == 0 && in_sub(self.pow(x, (o / p) as i64)) {
                        o /= p;
                    }
                }
                o
            };

            let mut best = (0usize, 1u64);
            for x in 0..h {
                if in_sub(x) {
                    continue;
                }
                let ox = quotient_order(x);
                if best.1 % ox != 0 {
                    best = self.combine(best, (x, ox));
                }
                if best.1 == quotient {
                    break;
                }
            }
            let (x, m) = best;

            // x^m lies in the subgroup; shift x so that its m-th power is trivial
            let t = sub[self.pow(x, m as i64)].clone().expect("x^m is in the subgroup");
            let mut lifted = x;
            for (b, &ti) in basis.iter().zip(&t) {
                debug_assert_eq!(ti % m, 0);
                let s = (ti / m) % b.order;
                lifted = self.mul(lifted, self.pow(b.generator, (b.order - s) as i64));
            }

            let existing: Vec<usize> = (0..h).filter(|&i| sub[i].is_some()).collect();
            let mut step = 0usize;
            for e in 1..m {
                step = self.mul(step, lifted);
                for &y in &existing {
                    let z = self.mul(step, y);
                    let mut v = sub[y].clone().unwrap();
                    v.push(e);
                    debug_assert!(sub[z].is_none());
                    sub[z] = Some(v);
                }
            }
            for &y in &existing {
                sub[y].as_mut().unwrap().push(0);
            }
            basis.push(BasisElement {
                generator: lifted,
                order: m,
            });
            sub_size *= m as usize;
        }

        basis.reverse();
        let k = basis.len();
        let mut coords = Vec::with_capacity(h * k);
        for v in sub {
            let mut v = v.expect("subgroup table covers the whole group");
            v.reverse();
            coords.extend(v);
        }
        self.basis = basis;
        self.coords = coords;
    }

    /// From classes of orders `a` and `b` in the current quotient, builds a
    /// class of order `lcm(a, b)` there.
    fn combine(&self, (x, a): (usize, u64), (y, b): (usize, u64)) -> (usize, u64) {
        let l = a / gcd_u64(a, b) * b;
        let mut acc = 0usize;
        for p in prime_factors(l) {
            let (ea, eb) = (p_power(a, p), p_power(b, p));
            let part = if ea >= eb {
                self.pow(x, (a / ea) as i64)
            } else {
                self.pow(y, (b / eb) as i64)
            };
            acc = self.mul(acc, part);
        }
        (acc, l)
    }

    /// All `h` characters; index 0 is the trivial one. Exponent vectors are
    /// enumerated in mixed radix with the first coordinate varying fastest.
    pub fn characters(&self) -> Vec<Character<'_>> {
        let orders = self.invariants();
        (0..self.class_number())
            .map(|mut idx| {
                let exps = orders
                    .iter()
                    .map(|&n| {
                        let e = idx as u64 % n;
                        idx /= n as usize;
                        e
                    })
                    .collect();
                Character {
                    group: self,
                    exponents: exps,
                }
            })
            .collect()
    }

    /// Exponent of the group (largest invariant factor).
    pub fn exponent(&self) -> u64 {
        self.basis.last().map_or(1, |b| b.order)
    }
}

/// A character of the class group, `A ↦ exp(2πi Σ m_j a_j / n_j)`.
#[derive(Debug, Clone)]
pub struct Character<'g> {
    pub group: &'g ClassGroup,
    pub exponents: Vec<u64>,
}

impl<'g> Character<'g> {
    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&m| m == 0)
    }

    /// Value on class `i` as the exact fraction `r / N` of a full turn,
    /// with `N` the group exponent and `0 <= r < N`.
    pub fn phase(&self, i: usize) -> (u64, u64) {
        let n = self.group.exponent();
        let r = self
            .group
            .basis
            .iter()
            .zip(&self.exponents)
            .zip(self.group.coords(i))
            .fold(0u128, |acc, ((b, &m), &a)| {
                (acc + (m as u128 * a as u128 % b.order as u128) * (n / b.order) as u128) % n as u128
            });
        (r as u64, n)
    }

    pub fn value(&self, i: usize) -> Complex64 {
        let (r, n) = self.phase(i);
        if r == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if 2 * r == n {
            return Complex64::new(-1.0, 0.0);
        }
        Complex64::from_polar(1.0, TAU * (r as f64) / (n as f64))
    }

    pub fn conj(&self) -> Character<'g> {
        let exponents = self
            .group
            .basis
            .iter()
            .zip(&self.exponents)
            .map(|(b, &m)| (b.order - m) % b.order)
            .collect();
        Character {
            group: self.group,
            exponents,
        }
    }

    /// Real-valued characters are those of order at most 2.
    pub fn is_real(&self) -> bool {
        self.group
            .basis
            .iter()
            .zip(&self.exponents)
            .all(|(b, &m)| (2 * m) % b.order == 0)
    }
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn p_power(mut n: u64, p: u64) -> u64 {
    let mut q = 1;
    while n % p == 0 {
        n /= p;
        q *= p;
    }
    q
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
