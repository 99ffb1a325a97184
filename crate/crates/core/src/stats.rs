// SPDX-License-Identifier: Apache-2.0

//! Weighted prime-ideal sums per class and per character, their variance
//! across classes, least primes per class and the exceptional-class count.

use std::f64::consts::TAU;
use std::ops::ControlFlow;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::arith::{classify_prime, kronecker, PrimeIdealPower, SplitKind};
use crate::classgroup::ClassGroup;
use crate::error::{Error, Result};
use crate::qform::Discriminant;
use crate::sieve::{try_for_each_prime, DEFAULT_SIEVE_CAP};

/// Relative tolerance for identities that only involve floating-point error.
pub const IDENTITY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    /// `c exp(-1/((x-1)(2-x)))` on `(1, 2)`, normalised to unit mass.
    Bump,
    /// `1` on `[1, 2)`. Not smooth; useful because its sums are exact
    /// prime-ideal counts weighted by `Λ`.
    Indicator,
}

impl std::str::FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(WeightKind::Bump),
            "indicator" => Ok(WeightKind::Indicator),
            _ => Err(Error::InvalidArgument(format!("unknown weight '{s}'"))),
        }
    }
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightKind::Bump => "bump",
            WeightKind::Indicator => "indicator",
        })
    }
}

/// A test function supported on `[1, 2]` with unit integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    pub kind: WeightKind,
    pub normalization: f64,
}

fn bump_shape(x: f64) -> f64 {
    if x <= 1.0 || x >= 2.0 {
        0.0
    } else {
        (-1.0 / ((x - 1.0) * (2.0 - x))).exp()
    }
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // start from a few panels so that narrow features are not missed
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson_step(&f, lo, hi, flo, fmid, fhi, whole, tol / PANELS as f64, 40)
        })
        .sum()
}

const QUAD_TOL: f64 = 1e-13;

impl Weight {
    pub fn bump() -> Weight {
        static NORM: OnceLock<f64> = OnceLock::new();
        let mass = *NORM.get_or_init(|| adaptive_simpson(bump_shape, 1.0, 2.0, QUAD_TOL * 1e-2));
        Weight {
            kind: WeightKind::Bump,
            normalization: 1.0 / mass,
        }
    }

    pub fn indicator() -> Weight {
        Weight {
            kind: WeightKind::Indicator,
            normalization: 1.0,
        }
    }

    pub fn of_kind(kind: WeightKind) -> Weight {
        match kind {
            WeightKind::Bump => Weight::bump(),
            WeightKind::Indicator => Weight::indicator(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Bump => self.normalization * bump_shape(x),
            WeightKind::Indicator => {
                if (1.0..2.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫ w(x) dx`, which is 1 up to quadrature error.
    pub fn integral(&self) -> f64 {
        match self.kind {
            WeightKind::Bump => adaptive_simpson(|x| self.eval(x), 1.0, 2.0, QUAD_TOL),
            WeightKind::Indicator => 1.0,
        }
    }

    /// Mellin transform `∫ w(x) x^{s-1} dx`.
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        match self.kind {
            WeightKind::Indicator => {
                if s.norm() == 0.0 {
                    Complex64::new(std::f64::consts::LN_2, 0.0)
                } else {
                    (Complex64::new(2.0, 0.0).powc(s) - 1.0) / s
                }
            }
            WeightKind::Bump => {
                let integrand = |x: f64| self.eval(x) * Complex64::new(x, 0.0).powc(s - 1.0);
                let re = adaptive_simpson(|x| integrand(x).re, 1.0, 2.0, QUAD_TOL);
                let im = adaptive_simpson(|x| integrand(x).im, 1.0, 2.0, QUAD_TOL);
                Complex64::new(re, im)
            }
        }
    }
}

/// Free-function form of [`Weight::eval`].
pub fn weight_eval(w: &Weight, x: f64) -> f64 {
    w.eval(x)
}

/// Free-function form of [`Weight::mellin`].
pub fn mellin(w: &Weight, s: Complex64) -> Complex64 {
    w.mellin(s)
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ψ_A(w_T)` for every class together with the reflected sum
/// `Σ Λ(𝔫) φ_T(N𝔫)`, `φ_T(x) = w(1/(xT))/x`, over the same ideals.
#[derive(Debug, Clone)]
pub struct ClassSums {
    pub psi_by_class: Vec<f64>,
    pub reflected: f64,
    /// number of prime-power ideals with norm in `[T, 2T]`
    pub ideals: usize,
}

/// Sums `Λ(𝔫) w(N𝔫 / T)` over prime-power ideals `𝔫` with norm in `[T, 2T]`,
/// grouped by class.
pub fn class_sums(g: &ClassGroup, t: f64, w: &Weight) -> Result<ClassSums> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("scale T must be >= 2, got {t}")));
    }
    let h = g.class_number();
    let d = g.discriminant().value();
    let lo = t.ceil() as u64;
    let hi = (2.0 * t).floor() as u64;
    let mut acc = vec![Neumaier::default(); h];
    let mut reflected = 0.0f64;
    let mut ideals = 0usize;

    let _ = try_for_each_prime(hi, DEFAULT_SIEVE_CAP, |p| {
        let inert = kronecker(d, p as i64) == -1;
        let step = if inert { p as u128 * p as u128 } else { p as u128 };
        // exponents k with (norm of 𝔭)^k in [T, 2T]
        let mut ks = Vec::new();
        let mut norm = step;
        let mut k = 1u32;
        while norm <= hi as u128 {
            if norm >= lo as u128 {
                ks.push(k);
            }
            norm *= step;
            k += 1;
        }
        if ks.is_empty() {
            return ControlFlow::Continue(());
        }
        let cl = if inert { None } else { Some(classify_prime(p, g)) };
        for k in ks {
            let entries = match &cl {
                Some(c) => c.powers(k, g),
                None => vec![PrimeIdealPower {
                    class: 0,
                    norm: step.pow(k),
                    lambda: 2.0 * (p as f64).ln(),
                }],
            };
            for e in entries {
                let n = e.norm as f64;
                acc[e.class].add(e.lambda * w.eval(n / t));
                reflected += e.lambda * w.eval(1.0 / (n * t)) / n;
                ideals += 1;
            }
        }
        ControlFlow::Continue(())
    })?;

    Ok(ClassSums {
        psi_by_class: acc.iter().map(Neumaier::value).collect(),
        reflected,
        ideals,
    })
}

/// `ψ_A(w_T)` for every class `A`.
pub fn psi_by_class(g: &ClassGroup, t: f64, w: &Weight) -> Result<Vec<f64>> {
    Ok(class_sums(g, t, w)?.psi_by_class)
}

/// Values `χ(A)` as a dense `h × h` table, row = character, column = class.
pub fn character_table(g: &ClassGroup) -> Vec<Vec<Complex64>> {
    let n = g.exponent();
    let roots: Vec<Complex64> = (0..n)
        .map(|r| match (r, n) {
            (0, _) => Complex64::new(1.0, 0.0),
            (r, n) if 2 * r == n => Complex64::new(-1.0, 0.0),
            _ => Complex64::from_polar(1.0, TAU * r as f64 / n as f64),
        })
        .collect();
    let h = g.class_number();
    g.characters()
        .iter()
        .map(|ch| (0..h).map(|i| roots[ch.phase(i).0 as usize]).collect())
        .collect()
}

/// `ψ_χ = Σ_A χ(A) ψ_A` for every character, in [`ClassGroup::characters`] order.
pub fn psi_by_char(g: &ClassGroup, psi_a: &[f64]) -> Vec<Complex64> {
    character_table(g)
        .iter()
        .map(|row| row.iter().zip(psi_a).map(|(c, &v)| c * v).sum())
        .collect()
}

/// Inverse transform `ψ_A = (1/h) Σ_χ conj(χ(A)) ψ_χ`.
pub fn fourier_inverse(g: &ClassGroup, psi_chi: &[Complex64]) -> Vec<Complex64> {
    let table = character_table(g);
    let h = g.class_number();
    (0..h)
        .map(|i| {
            let s: Complex64 = table.iter().zip(psi_chi).map(|(row, v)| row[i].conj() * v).sum();
            s / h as f64
        })
        .collect()
}

/// `Σ_A |ψ_A - ψ/h|^2`.
pub fn variance_definitional(psi_a: &[f64]) -> f64 {
    let h = psi_a.len() as f64;
    let mean = psi_a.iter().sum::<f64>() / h;
    psi_a.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// `(1/h) Σ_{χ ≠ 1} |ψ_χ|^2`; `psi_chi[0]` must be the trivial character.
pub fn variance_dual(psi_chi: &[Complex64]) -> f64 {
    psi_chi[1..].iter().map(|v| v.norm_sqr()).sum::<f64>() / psi_chi.len() as f64
}

/// Relative difference with a floor at pure rounding level, `1e-20 ψ^2`.
pub fn identity_gap(definitional: f64, dual: f64, psi_total: f64) -> f64 {
    let scale = definitional
        .abs()
        .max(dual.abs())
        .max(1e-20 * psi_total * psi_total);
    if scale == 0.0 {
        0.0
    } else {
        (definitional - dual).abs() / scale
    }
}

/// Everything computed from one pass over the ideals at scale `T`.
#[derive(Debug, Clone)]
pub struct PsiReport {
    pub disc: Discriminant,
    pub t: f64,
    pub weight: Weight,
    pub psi_by_class: Vec<f64>,
    pub psi_by_char: Vec<Complex64>,
    pub psi_total: f64,
    pub variance: f64,
    pub variance_dual: f64,
    /// `ψ - T ∫w`
    pub delta_main_term: f64,
    /// `Σ Λ φ_T(N𝔫)`, identically zero because `φ_T` lives on `[1/2T, 1/T]`
    pub reflected: f64,
}

impl PsiReport {
    pub fn identity_gap(&self) -> f64 {
        identity_gap(self.variance, self.variance_dual, self.psi_total)
    }

    /// `Var / (T log^2 |D|)`
    pub fn variance_ratio(&self) -> f64 {
        let l = self.disc.log_abs();
        self.variance / (self.t * l * l)
    }
}

pub fn psi_report(g: &ClassGroup, t: f64, w: &Weight) -> Result<PsiReport> {
    let sums = class_sums(g, t, w)?;
    assert_eq!(sums.reflected, 0.0, "reflected weight must vanish on norms >= 1");
    let psi_a = sums.psi_by_class;
    let psi_chi = psi_by_char(g, &psi_a);
    let mut total = Neumaier::default();
    psi_a.iter().for_each(|&v| total.add(v));
    let psi_total = total.value();
    let var = variance_definitional(&psi_a);
    let dual = variance_dual(&psi_chi);
    if identity_gap(var, dual, psi_total) > IDENTITY_RTOL {
        return Err(Error::IdentityMismatch {
            definitional: var,
            dual,
        });
    }
    Ok(PsiReport {
        disc: g.discriminant(),
        t,
        weight: *w,
        psi_by_class: psi_a,
        psi_by_char: psi_chi,
        psi_total,
        variance: var,
        variance_dual: dual,
        delta_main_term: psi_total - t * w.integral(),
        reflected: sums.reflected,
    })
}

/// Definitional variance, checked against the character-side formula.
pub fn variance(g: &ClassGroup, t: f64, w: &Weight) -> Result<f64> {
    Ok(psi_report(g, t, w)?.variance)
}

/// Least rational prime whose prime ideal lies in a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeastPrime {
    pub p: u64,
    pub ramified: bool,
}

/// For each class, the least prime `1 < p < x_cap` represented by it, i.e.
/// with a prime ideal of norm `p` in that class. Ramified primes count.
pub fn least_primes(g: &ClassGroup, x_cap: u64) -> Result<Vec<Option<LeastPrime>>> {
    least_primes_capped(g, x_cap, DEFAULT_SIEVE_CAP)
}

pub fn least_primes_capped(g: &ClassGroup, x_cap: u64, sieve_cap: u64) -> Result<Vec<Option<LeastPrime>>> {
    let h = g.class_number();
    let d = g.discriminant().value();
    let mut out: Vec<Option<LeastPrime>> = vec![None; h];
    let mut missing = h;
    if x_cap <= 2 {
        return Ok(out);
    }
    let _ = try_for_each_prime(x_cap - 1, sieve_cap, |p| {
        if kronecker(d, p as i64) == -1 {
            return ControlFlow::Continue(());
        }
        let cl = classify_prime(p, g);
        for &c in &cl.classes {
            if out[c].is_none() {
                out[c] = Some(LeastPrime {
                    p,
                    ramified: cl.kind == SplitKind::Ramified,
                });
                missing -= 1;
            }
        }
        if missing == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

/// Classes whose least prime is absent or `>= x`.
pub fn exceptional_count_from(least: &[Option<LeastPrime>], x: u64) -> usize {
    least
        .iter()
        .filter(|e| e.map_or(true, |lp| lp.p >= x))
        .count()
}

/// `R(D, X)`: classes representing no prime `p` with `1 < p < X`.
pub fn exceptional_count(g: &ClassGroup, x: u64) -> Result<usize> {
    Ok(exceptional_count_from(&least_primes(g, x)?, x))
}

/// For each class, the least norm `1 < N𝔭 < x_cap` of a prime ideal in it.
/// Differs from [`least_primes`] only through inert primes, whose ideal
/// `(p)` has norm `p^2` and lies in the principal class.
pub fn least_prime_ideal_norms(g: &ClassGroup, x_cap: u64) -> Result<Vec<Option<u64>>> {
    Ok(ideal_norms_from(g, &least_primes(g, x_cap)?, x_cap))
}

/// [`least_prime_ideal_norms`] from an already computed least-prime table
/// with the same cap.
pub fn ideal_norms_from(g: &ClassGroup, least: &[Option<LeastPrime>], x_cap: u64) -> Vec<Option<u64>> {
    let mut out: Vec<Option<u64>> = least.iter().map(|e| e.map(|lp| lp.p)).collect();
    let d = g.discriminant().value();
    let mut p = 2u64;
    while (p as u128) * (p as u128) < x_cap as u128 {
        if is_prime(p) && kronecker(d, p as i64) == -1 {
            let n = p * p;
            out[0] = Some(out[0].map_or(n, |m| m.min(n)));
            break;
        }
        p += 1;
    }
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// `R(K, T)`: classes containing no prime ideal of norm in `(1, T)`.
pub fn exceptional_count_ideals(g: &ClassGroup, x: u64) -> Result<usize> {
    Ok(least_prime_ideal_norms(g, x)?.iter().filter(|e| e.is_none()).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qform::ReducedForm;

    fn group(d: i64) -> ClassGroup {
        ClassGroup::from_value(d).unwrap()
    }

    /// Composite trapezoid rule; spectrally accurate for the bump because all
    /// its derivatives vanish at both ends.
    fn trapezoid<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
        let h = 1.0 / n as f64;
        let inner: f64 = (1..n).map(|i| f(1.0 + i as f64 * h)).sum();
        h * (inner + 0.5 * (f(1.0) + f(2.0)))
    }

    #[test]
    fn bump_normalization() {
        let w = Weight::bump();
        let mass = trapezoid(bump_shape, 4000);
        assert!((w.normalization - 1.0 / mass).abs() < 1e-10 * w.normalization);
        assert!((w.integral() - 1.0).abs() < 1e-10);
        assert!((trapezoid(|x| w.eval(x), 4000) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weight_examples() {
        let w = Weight::bump();
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(2.0), 0.0);
        assert_eq!(w.eval(0.5), 0.0);
        assert!((w.eval(1.5) - w.normalization * (-4.0f64).exp()).abs() < 1e-15);
        let ind = Weight::indicator();
        assert_eq!(ind.eval(1.999), 1.0);
        assert_eq!(ind.eval(1.0), 1.0);
        assert_eq!(ind.eval(2.0), 0.0);
        assert_eq!(ind.eval(0.99), 0.0);
    }

    #[test]
    fn mellin_examples() {
        let ind = Weight::indicator();
        assert!((ind.mellin(Complex64::new(1.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!((ind.mellin(Complex64::new(2.0, 0.0)) - 1.5).norm() < 1e-15);
        let bump = Weight::bump();
        assert!((bump.mellin(Complex64::new(1.0, 0.0)) - 1.0).norm() < 1e-10);
        // against the trapezoid oracle at a few complex points
        for s in [Complex64::new(0.5, 3.0), Complex64::new(0.5, -14.13), Complex64::new(2.0, 1.0)] {
            let re = trapezoid(|x| (bump.eval(x) * Complex64::new(x, 0.0).powc(s - 1.0)).re, 8000);
            let im = trapezoid(|x| (bump.eval(x) * Complex64::new(x, 0.0).powc(s - 1.0)).im, 8000);
            assert!((bump.mellin(s) - Complex64::new(re, im)).norm() < 1e-10, "s={s}");
        }
        // indicator closed form vs quadrature
        let s = Complex64::new(0.5, 7.0);
        let re = adaptive_simpson(|x| Complex64::new(x, 0.0).powc(s - 1.0).re, 1.0, 2.0, 1e-14);
        let im = adaptive_simpson(|x| Complex64::new(x, 0.0).powc(s - 1.0).im, 1.0, 2.0, 1e-14);
        assert!((ind.mellin(s) - Complex64::new(re, im)).norm() < 1e-10);
    }

    /// Direct ideal enumeration: every (p, k) with p^k, or p^{2k} for inert p,
    /// in [T, 2T], classes from brute-force representation of p.
    fn oracle_psi(d: i64, t: f64, w: &Weight) -> Vec<f64> {
        let g = group(d);
        let h = g.class_number();
        let mut out = vec![0.0; h];
        let hi = (2.0 * t) as u64;
        for p in crate::sieve::sieve_primes(hi).unwrap() {
            // classes of forms representing p
            let reps: Vec<usize> = (0..h)
                .filter(|&i| crate::arith::form_representation_count(g.form(i), p) > 0)
                .collect();
            let kr = kronecker(d, p as i64);
            let mut pk: u128 = 1;
            for k in 1.. {
                pk *= p as u128;
                let (norm, lambda) = if kr == -1 { (pk * pk, 2.0 * (p as f64).ln()) } else { (pk, (p as f64).ln()) };
                if norm > hi as u128 {
                    break;
                }
                let x = norm as f64 / t;
                if w.eval(x) == 0.0 {
                    continue;
                }
                match kr {
                    -1 => out[0] += lambda * w.eval(x),
                    0 => {
                        // ramified: 𝔭^k is principal for even k, else in 𝔭's class
                        let c = if k % 2 == 0 { 0 } else { reps[0] };
                        out[c] += lambda * w.eval(x);
                    }
                    _ => {
                        let c = reps[0];
                        let cinv = g.inverse(c);
                        out[g.pow(c, k)] += lambda * w.eval(x);
                        out[g.pow(cinv, k)] += lambda * w.eval(x);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn psi_small_example() {
        // D = -23, T = 10, indicator: norms 10..19.
        // split: 2 (16 = 2^4), 3 (9 no), 13; inert 5? 25 > 20; ramified none
        let g = group(-23);
        let w = Weight::indicator();
        let psi = psi_by_class(&g, 10.0, &w).unwrap();
        let l2 = 2f64.ln();
        let l13 = 13f64.ln();
        // 𝔭_2^4 = 𝔭_2 (order 3), conjugate likewise; 13 splits into both classes
        let expect = [0.0, l2 + l13, l2 + l13];
        for (a, b) in psi.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{psi:?}");
        }
        assert_eq!(psi, oracle_psi(-23, 10.0, &w));
    }

    #[test]
    fn psi_matches_oracle() {
        for d in [-23i64, -47, -84, -231] {
            for t in [50.0, 333.0, 1000.0] {
                for w in [Weight::indicator(), Weight::bump()] {
                    let fast = psi_by_class(&group(d), t, &w).unwrap();
                    let slow = oracle_psi(d, t, &w);
                    for (a, b) in fast.iter().zip(&slow) {
                        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "D={d} T={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn psi_empty_window() {
        // D = -4, T = 2: the only norms in [2, 4] are 2 and 4, both at the ends
        let g = group(-4);
        let psi = psi_by_class(&g, 2.0, &Weight::bump()).unwrap();
        // bump vanishes at both ends, so norms exactly T and 2T contribute 0
        assert_eq!(psi, vec![0.0]);
        assert!(psi_by_class(&g, 1.5, &Weight::bump()).is_err());
    }

    #[test]
    fn psi_by_char_examples() {
        let g = group(-23);
        let w = Weight::indicator();
        let psi_a = psi_by_class(&g, 1000.0, &w).unwrap();
        let psi_chi = psi_by_char(&g, &psi_a);
        let total: f64 = psi_a.iter().sum();
        assert!((psi_chi[0].re - total).abs() < 1e-9 * total);
        assert!(psi_chi[0].im.abs() < 1e-9);
        assert!((psi_chi[1] - psi_chi[2].conj()).norm() < 1e-9 * total);
        let back = fourier_inverse(&g, &psi_chi);
        for (x, y) in back.iter().zip(&psi_a) {
            assert!((x.re - y).abs() < 1e-9 * y.abs());
            assert!(x.im.abs() < 1e-9 * y.abs());
        }

        let g1 = group(-163);
        let psi_a = psi_by_class(&g1, 500.0, &w).unwrap();
        let chi = psi_by_char(&g1, &psi_a);
        assert_eq!(chi.len(), 1);
        assert_eq!(chi[0].re, psi_a[0]);
    }

    #[test]
    fn variance_examples() {
        let r = psi_report(&group(-163), 1000.0, &Weight::bump()).unwrap();
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.variance_dual, 0.0);
        assert_eq!(variance_definitional(&[3.5, 3.5, 3.5]), 0.0);
        for d in [-23i64, -47, -420] {
            for w in [Weight::indicator(), Weight::bump()] {
                let r = psi_report(&group(d), 1000.0, &w).unwrap();
                assert!(r.identity_gap() <= 1e-9);
                assert!(r.variance > 0.0);
                assert_eq!(r.reflected, 0.0);
                let s: f64 = r.psi_by_class.iter().sum();
                assert!((s - r.psi_total).abs() <= 1e-9 * r.psi_total);
                // ψ_A = 0 classes each contribute at least (ψ/h)^2
                let h = r.psi_by_class.len() as f64;
                let floor: f64 = r
                    .psi_by_class
                    .iter()
                    .filter(|&&v| v == 0.0)
                    .map(|_| (r.psi_total / h).powi(2))
                    .sum();
                assert!(r.variance >= floor);
            }
        }
    }

    #[test]
    fn mismatch_is_detected() {
        let gap = identity_gap(1.0, 1.0 + 1e-6, 10.0);
        assert!(gap > IDENTITY_RTOL);
        assert_eq!(identity_gap(0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn least_prime_examples() {
        let g = group(-23);
        let lp = least_primes(&g, 1000).unwrap();
        let by_form = |a, b, c| {
            let f = ReducedForm::from_coefficients(a, b, c).unwrap();
            lp[g.index_of(&f).unwrap()].unwrap()
        };
        assert_eq!(by_form(2, 1, 3), LeastPrime { p: 2, ramified: false });
        assert_eq!(by_form(2, -1, 3), LeastPrime { p: 2, ramified: false });
        assert_eq!(by_form(1, 1, 6), LeastPrime { p: 23, ramified: true });
        assert_eq!(exceptional_count(&g, 3).unwrap(), 1);
        assert_eq!(exceptional_count(&g, 23).unwrap(), 1);
        assert_eq!(exceptional_count(&g, 24).unwrap(), 0);
        assert_eq!(exceptional_count(&g, 2).unwrap(), 3);

        let g4 = group(-4);
        assert_eq!(least_primes(&g4, 100).unwrap(), vec![Some(LeastPrime { p: 2, ramified: true })]);
    }

    #[test]
    fn least_primes_monotone_and_floor() {
        for d in [-47i64, -71, -420, -1155, -4003] {
            let g = group(d);
            let full = least_primes(&g, 1_000_000).unwrap();
            let mut last = g.class_number();
            for x in [2u64, 10, 50, 100, 500, 2000, 10_000] {
                let part = least_primes(&g, x).unwrap();
                for (a, b) in part.iter().zip(&full) {
                    if a.is_some() {
                        assert_eq!(a, b);
                    }
                }
                let r = exceptional_count_from(&part, x);
                assert_eq!(r, exceptional_count_from(&full, x));
                assert!(r <= last);
                last = r;
            }
            for (i, e) in full.iter().enumerate() {
                let e = e.expect("cap large enough");
                assert!(e.p >= g.form(i).a() as u64);
            }
        }
    }

    #[test]
    fn ideal_variant() {
        // D = -23: inert 5 gives the principal ideal (5) of norm 25
        let g = group(-23);
        let n = least_prime_ideal_norms(&g, 1000).unwrap();
        assert_eq!(n, vec![Some(23), Some(2), Some(2)]);
        // D = -47: the principal class first represents 47, but 5 is inert
        let g = group(-47);
        assert_eq!(least_prime_ideal_norms(&g, 1000).unwrap()[0], Some(25));
        assert_eq!(least_primes(&g, 1000).unwrap()[0].unwrap().p, 47);
        assert_eq!(exceptional_count_ideals(&g, 26).unwrap(), 0);
    }
}
