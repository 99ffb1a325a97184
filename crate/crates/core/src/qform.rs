// SPDX-License-Identifier: Apache-2.0

//! Positive definite integral binary quadratic forms `a x^2 + b x y + c y^2`.
//!
//! Coefficients are stored as `i64`. Every intermediate of reduction and
//! composition is carried in `i128`, which is wide enough for any discriminant
//! that fits in an `i64`: a reduced form has `|b| <= a <= sqrt(|D|/3)`, so the
//! products formed during composition stay below `2^127`.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// A discriminant `D ≡ 0, 1 (mod 4)` together with its fundamental flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant {
    value: i64,
    fundamental: bool,
}

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value.rem_euclid(4) > 1 {
            return Err(Error::NotADiscriminant(value));
        }
        Ok(Discriminant {
            value,
            fundamental: is_fundamental(value),
        })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn is_fundamental(&self) -> bool {
        self.fundamental
    }

    pub fn unsigned_abs(&self) -> u64 {
        self.value.unsigned_abs()
    }

    /// `log |D|`. The natural log of the absolute value is used everywhere.
    pub fn log_abs(&self) -> f64 {
        (self.unsigned_abs() as f64).ln()
    }

    /// Parity class of the middle coefficient: every form of discriminant D
    /// has `b ≡ D (mod 2)`.
    pub fn parity(&self) -> i64 {
        self.value.rem_euclid(2)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Same as [`Discriminant::new`].
pub fn validate_discriminant(d: i64) -> Result<Discriminant> {
    Discriminant::new(d)
}

fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

fn is_fundamental(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// An element of SL2(Z), acting on forms by `f ↦ f(αx + βy, γx + δy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transform {
    pub m: [[i128; 2]; 2],
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        m: [[1, 0], [0, 1]],
    };
    /// `(x, y) ↦ (-y, x)`
    pub const S: Transform = Transform {
        m: [[0, -1], [1, 0]],
    };

    /// `(x, y) ↦ (x + k y, y)`
    pub fn translation(k: i128) -> Transform {
        Transform {
            m: [[1, k], [0, 1]],
        }
    }

    pub fn determinant(&self) -> i128 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn compose(&self, rhs: &Transform) -> Result<Transform> {
        let mut out = [[0i128; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let s = self.m[i][0]
                    .checked_mul(rhs.m[0][j])
                    .zip(self.m[i][1].checked_mul(rhs.m[1][j]))
                    .and_then(|(p, q)| p.checked_add(q))
                    .ok_or(Error::Overflow("composing unimodular transforms"))?;
                *cell = s;
            }
        }
        Ok(Transform { m: out })
    }

    /// Inverse matrix; valid because the determinant is 1.
    pub fn inverse(&self) -> Transform {
        let [[a, b], [c, d]] = self.m;
        Transform {
            m: [[d, -b], [-c, a]],
        }
    }

    pub fn apply(&self, x: i128, y: i128) -> Option<(i128, i128)> {
        let [[a, b], [c, d]] = self.m;
        let u = a.checked_mul(x)?.checked_add(b.checked_mul(y)?)?;
        let v = c.checked_mul(x)?.checked_add(d.checked_mul(y)?)?;
        Some((u, v))
    }
}

/// A positive definite binary quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        if a <= 0 || f.discriminant() >= 0 {
            return Err(Error::NotPositiveDefinite { a, b, c });
        }
        Ok(f)
    }

    /// The form `(a, b, (b^2 - D) / 4a)`.
    pub fn from_ab(a: i64, b: i64, disc: Discriminant) -> Result<Self> {
        let d = disc.value() as i128;
        let num = (b as i128) * (b as i128) - d;
        let den = 4 * a as i128;
        if a <= 0 || num % den != 0 {
            return Err(Error::InvalidIdealBasis {
                a,
                b,
                disc: disc.value(),
            });
        }
        let c = i64::try_from(num / den).map_err(|_| Error::Overflow("building form"))?;
        QuadForm::new(a, b, c)
    }

    pub fn discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        if b.abs() > a || a > c {
            return false;
        }
        if (b.abs() == a || a == c) && b < 0 {
            return false;
        }
        true
    }

    /// `a x^2 + b x y + c y^2` in arbitrary precision.
    pub fn evaluate(&self, x: i64, y: i64) -> BigInt {
        let (x, y) = (BigInt::from(x), BigInt::from(y));
        BigInt::from(self.a) * &x * &x + BigInt::from(self.b) * &x * &y + BigInt::from(self.c) * &y * &y
    }

    /// Checked fixed-width evaluation; `None` on overflow.
    pub fn evaluate_i128(&self, x: i128, y: i128) -> Option<i128> {
        let ax2 = (self.a as i128).checked_mul(x.checked_mul(x)?)?;
        let bxy = (self.b as i128).checked_mul(x.checked_mul(y)?)?;
        let cy2 = (self.c as i128).checked_mul(y.checked_mul(y)?)?;
        ax2.checked_add(bxy)?.checked_add(cy2)
    }

    /// The form `(x, y) ↦ self(t(x, y))`.
    pub fn transform(&self, t: &Transform) -> Result<QuadForm> {
        let [[al, be], [ga, de]] = t.m;
        let overflow = || Error::Overflow("transforming form");
        let a = self.evaluate_i128(al, ga).ok_or_else(overflow)?;
        let c = self.evaluate_i128(be, de).ok_or_else(overflow)?;
        let (fa, fb, fc) = (self.a as i128, self.b as i128, self.c as i128);
        let b = (|| {
            let t1 = (2 * fa).checked_mul(al.checked_mul(be)?)?;
            let t2 = fb.checked_mul(al.checked_mul(de)?.checked_add(be.checked_mul(ga)?)?)?;
            let t3 = (2 * fc).checked_mul(ga.checked_mul(de)?)?;
            t1.checked_add(t2)?.checked_add(t3)
        })()
        .ok_or_else(overflow)?;
        let narrow = |v: i128| i64::try_from(v).map_err(|_| overflow());
        QuadForm::new(narrow(a)?, narrow(b)?, narrow(c)?)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// A reduced positive definite form: `|b| <= a <= c`, and `b >= 0` whenever
/// `|b| = a` or `a = c`. There is exactly one per SL2(Z)-class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedForm(QuadForm);

impl ReducedForm {
    /// Wraps `(a, b, c)` if it is already reduced and positive definite.
    pub fn from_coefficients(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm::new(a, b, c)?;
        if !f.is_reduced() {
            return Err(Error::InvalidArgument(format!("{f} is not reduced")));
        }
        Ok(ReducedForm(f))
    }

    /// The principal form `(1, b0, c0)` with `b0 = D mod 2`.
    pub fn identity(disc: Discriminant) -> ReducedForm {
        let b = disc.parity();
        let c = (b - disc.value()) / 4;
        ReducedForm(QuadForm { a: 1, b, c })
    }

    pub fn form(&self) -> &QuadForm {
        &self.0
    }

    pub fn a(&self) -> i64 {
        self.0.a
    }

    pub fn b(&self) -> i64 {
        self.0.b
    }

    pub fn c(&self) -> i64 {
        self.0.c
    }

    pub fn discriminant(&self) -> i64 {
        // b^2 - 4ac of a reduced form is bounded by the stored coefficients'
        // discriminant, which always originates from an i64.
        self.0.discriminant() as i64
    }

    pub fn is_identity(&self) -> bool {
        self.0.a == 1
    }

    /// Ambiguous forms are their own inverse.
    pub fn is_ambiguous(&self) -> bool {
        self.0.b == 0 || self.0.b == self.0.a || self.0.a == self.0.c
    }

    pub fn evaluate(&self, x: i64, y: i64) -> BigInt {
        self.0.evaluate(x, y)
    }
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn floor_div(n: i128, d: i128) -> i128 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

/// Gauss reduction on wide coefficients. Returns the reduced triple and,
/// when `track` is given, accumulates the unimodular transform into it.
fn reduce_wide(
    mut a: i128,
    mut b: i128,
    mut c: i128,
    mut track: Option<&mut Transform>,
) -> Result<(i128, i128, i128)> {
    let d = b * b - 4 * a * c;
    loop {
        if b <= -a || b > a {
            // bring b into (-a, a]
            let k = floor_div(a - b, 2 * a);
            b += 2 * a * k;
            c = (b * b - d) / (4 * a);
            if let Some(t) = track.as_deref_mut() {
                *t = t.compose(&Transform::translation(k))?;
            }
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            if let Some(t) = track.as_deref_mut() {
                *t = t.compose(&Transform::S)?;
            }
            continue;
        }
        if a == c && b < 0 {
            b = -b;
            if let Some(t) = track.as_deref_mut() {
                *t = t.compose(&Transform::S)?;
            }
        }
        return Ok((a, b, c));
    }
}

fn narrow_reduced(a: i128, b: i128, c: i128) -> ReducedForm {
    // reduced coefficients satisfy |b| <= a <= c <= (b^2 - D)/4a, which fits in i64
    ReducedForm(QuadForm {
        a: a as i64,
        b: b as i64,
        c: c as i64,
    })
}

/// The unique reduced form equivalent to `f`.
pub fn reduce(f: &QuadForm) -> ReducedForm {
    let (a, b, c) = reduce_wide(f.a as i128, f.b as i128, f.c as i128, None)
        .expect("untracked reduction cannot overflow");
    narrow_reduced(a, b, c)
}

/// Reduces `f` and returns the transform `t` with `reduced = f ∘ t`.
pub fn reduce_with_transform(f: &QuadForm) -> Result<(ReducedForm, Transform)> {
    let mut t = Transform::IDENTITY;
    let (a, b, c) = reduce_wide(f.a as i128, f.b as i128, f.c as i128, Some(&mut t))?;
    Ok((narrow_reduced(a, b, c), t))
}

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Returns `(g, u, v)` with `u a + v b = g = gcd(a, b) >= 0`.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Dirichlet composition followed by reduction.
///
/// With `g = gcd(a1, a2, (b1 + b2)/2) = u a1 + v a2 + w (b1 + b2)/2` the
/// composite is `(a1 a2 / g^2, B, *)` where
/// `B = (u a1 b2 + v a2 b1 + w (b1 b2 + D)/2) / g  (mod 2 a1 a2 / g^2)`.
pub fn compose(f: &ReducedForm, g: &ReducedForm) -> Result<ReducedForm> {
    let d1 = f.0.discriminant();
    let d2 = g.0.discriminant();
    if d1 != d2 {
        return Err(Error::DiscMismatch(d1 as i64, d2 as i64));
    }
    Ok(compose_unchecked(f, g, d1))
}

pub(crate) fn compose_unchecked(f: &ReducedForm, g: &ReducedForm, d: i128) -> ReducedForm {
    let (a1, b1) = (f.0.a as i128, f.0.b as i128);
    let (a2, b2) = (g.0.a as i128, g.0.b as i128);
    let s = (b1 + b2) / 2;

    let (g1, u1, v1) = ext_gcd(a1, a2);
    let (gg, x, w) = ext_gcd(g1, s);
    let (u, v) = (x * u1, x * v1);

    let a3 = (a1 / gg) * (a2 / gg);
    let num = u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + d) / 2);
    let mut b3 = (num / gg).rem_euclid(2 * a3);
    if b3 > a3 {
        b3 -= 2 * a3;
    }
    let c3 = (b3 * b3 - d) / (4 * a3);
    let (a, b, c) = reduce_wide(a3, b3, c3, None).expect("untracked reduction cannot overflow");
    narrow_reduced(a, b, c)
}

/// The inverse class, `reduce((a, -b, c))`.
pub fn opposite(f: &ReducedForm) -> ReducedForm {
    reduce(&QuadForm {
        a: f.0.a,
        b: -f.0.b,
        c: f.0.c,
    })
}

/// `f^k` under composition; negative exponents use the inverse.
pub fn pow(f: &ReducedForm, k: i64) -> ReducedForm {
    let d = f.0.discriminant();
    let mut base = if k < 0 { opposite(f) } else { *f };
    let mut e = k.unsigned_abs();
    let mut acc = ReducedForm::identity(Discriminant {
        value: d as i64,
        fundamental: false,
    });
    while e > 0 {
        if e & 1 == 1 {
            acc = compose_unchecked(&acc, &base, d);
        }
        e >>= 1;
        if e > 0 {
            base = compose_unchecked(&base, &base, d);
        }
    }
    acc
}
