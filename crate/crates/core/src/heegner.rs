// SPDX-License-Identifier: Apache-2.0

//! Heegner points of form classes and the coefficient-size diagnostics built
//! on them.
//!
//! The reduced form `(A, B, C)` of a class has its root
//! `z = (-B + i sqrt|D|) / 2A` in the Gauss fundamental domain. Classes whose
//! point sits high up (small `A`, hence large `C`) only represent numbers
//! that are either multiples of `A` or at least about `|D| / 4A`.

use crate::classgroup::ClassGroup;
use crate::stats::LeastPrime;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeegnerPoint {
    pub class: usize,
    pub re: f64,
    pub im: f64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl HeegnerPoint {
    /// `|re| <= 1/2` and `|z| >= 1`, which reduced forms guarantee.
    pub fn in_fundamental_domain(&self) -> bool {
        self.re.abs() <= 0.5 && self.re * self.re + self.im * self.im >= 1.0 - 1e-12
    }

    pub fn max_coefficient(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs())
    }
}

pub fn heegner_point(g: &ClassGroup, class: usize) -> HeegnerPoint {
    let f = g.form(class);
    let (a, b, c) = (f.a(), f.b(), f.c());
    let sqrt_d = (g.discriminant().unsigned_abs() as f64).sqrt();
    HeegnerPoint {
        class,
        re: -(b as f64) / (2.0 * a as f64),
        im: sqrt_d / (2.0 * a as f64),
        a,
        b,
        c,
    }
}

pub fn heegner_points(g: &ClassGroup) -> Vec<HeegnerPoint> {
    (0..g.class_number()).map(|i| heegner_point(g, i)).collect()
}

/// Fraction of classes with `max(|A|, |B|, |C|) < sqrt|D| · psi_value`.
pub fn coefficient_bound_fraction(g: &ClassGroup, psi_value: f64) -> f64 {
    let bound = (g.discriminant().unsigned_abs() as f64).sqrt() * psi_value;
    let inside = g
        .elements()
        .iter()
        .filter(|f| (f.a().max(f.b().abs()).max(f.c()) as f64) < bound)
        .count();
    inside as f64 / g.class_number() as f64
}

/// Heuristic least-prime scale `sqrt|D| · L(1, χ_D) · ψ · log|D|`.
pub fn cramer_prediction(g: &ClassGroup, psi_value: f64, l_one: f64) -> f64 {
    let d = g.discriminant();
    (d.unsigned_abs() as f64).sqrt() * l_one * psi_value * d.log_abs()
}

/// `h log|D|`, the class-number form of [`cramer_prediction`] at `psi = 1`:
/// the two differ by the factor `w / 2π` from the class number formula.
pub fn cramer_class_number_scale(g: &ClassGroup) -> f64 {
    g.class_number() as f64 * g.discriminant().log_abs()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// Classes that contain no prime `p < x` for structural reasons alone. A
/// reduced form takes the value `A` at `(±1, 0)` and otherwise only values
/// `>= |D| / 4A`, so the class is empty below `x` when `A` is not a prime
/// below `x` and `4 A x <= |D|`.
pub fn forced_exceptional_classes(g: &ClassGroup, x: u64) -> Vec<usize> {
    let abs_d = g.discriminant().unsigned_abs() as u128;
    g.elements()
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            let a = f.a() as u64;
            let small_a = a < x && is_prime(a);
            !small_a && 4 * a as u128 * x as u128 <= abs_d
        })
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepulsionRow {
    pub class: usize,
    pub a: i64,
    pub im: f64,
    pub least_prime: Option<LeastPrime>,
}

impl RepulsionRow {
    /// The least prime cannot be below the minimum `A` of the form.
    pub fn floor_holds(&self) -> bool {
        self.least_prime.map_or(true, |lp| lp.p >= self.a as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepulsionReport {
    pub rows: Vec<RepulsionRow>,
    pub max_least_prime: Option<u64>,
    /// lower median over the classes with a least prime
    pub median_least_prime: Option<u64>,
    /// class attaining the largest least prime (smallest index on ties)
    pub argmax_least_prime: Option<usize>,
    /// class with the largest reduced `A` (smallest index on ties)
    pub argmax_a: usize,
    pub floor_violations: usize,
}

pub fn repulsion_report(g: &ClassGroup, least: &[Option<LeastPrime>]) -> RepulsionReport {
    let rows: Vec<RepulsionRow> = heegner_points(g)
        .into_iter()
        .zip(least)
        .map(|(pt, lp)| RepulsionRow {
            class: pt.class,
            a: pt.a,
            im: pt.im,
            least_prime: *lp,
        })
        .collect();
    let mut found: Vec<u64> = rows.iter().filter_map(|r| r.least_prime.map(|lp| lp.p)).collect();
    found.sort_unstable();
    let max_least_prime = found.last().copied();
    let median_least_prime = if found.is_empty() {
        None
    } else {
        Some(found[(found.len() - 1) / 2])
    };
    let argmax_least_prime = max_least_prime.and_then(|m| rows.iter().position(|r| r.least_prime.map(|lp| lp.p) == Some(m)));
    let max_a = rows.iter().map(|r| r.a).max().unwrap_or(1);
    let argmax_a = rows.iter().position(|r| r.a == max_a).unwrap_or(0);
    let floor_violations = rows.iter().filter(|r| !r.floor_holds()).count();
    RepulsionReport {
        rows,
        max_least_prime,
        median_least_prime,
        argmax_least_prime,
        argmax_a,
        floor_violations,
    }
}
