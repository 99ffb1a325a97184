// SPDX-License-Identifier: Apache-2.0

//! The acceptance suite: ten numbered criteria, each run standalone and
//! reported as a single pass/fail line.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use classprime::arith::{
    class_number_from_l, dirichlet_r, form_representation_count, l_one_chi, representation_count_with,
};
use classprime::heegner::forced_exceptional_classes;
use classprime::sieve::sieve_primes;
use classprime::stats::{
    class_sums, exceptional_count_from, fourier_inverse, identity_gap, ideal_norms_from, least_primes, psi_by_char, psi_report,
    variance_definitional, variance_dual, Weight, WeightKind,
};
use classprime::{ClassGroup, Discriminant};

use crate::config::RunConfig;
use crate::scan::{fundamental_range, scan, ScanParams};

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "class-number cross-check",
        2 => "Dirichlet representation formula",
        3 => "variance identity",
        4 => "Fourier round-trip",
        5 => "main term",
        6 => "variance at scale h^2 log^2|D|",
        7 => "least-prime table for D=-23",
        8 => "exceptional decay",
        9 => "structural floor",
        10 => "scan determinism",
        _ => "unknown criterion",
    }
}

/// Runs one criterion. Runtime limits count toward the verdict.
pub fn run(id: u8) -> Outcome {
    let start = Instant::now();
    let (passed, detail, limit) = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        _ => (false, format!("no criterion {id}"), None),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match limit {
        Some(secs) if elapsed.as_secs_f64() > secs => (false, format!("{detail}; over the {secs} s budget")),
        _ => (passed, detail),
    };
    Outcome {
        id,
        title: title(id),
        passed,
        detail,
        elapsed,
    }
}

pub fn run_all(ids: &[u8], mut on_result: impl FnMut(&Outcome)) -> Vec<Outcome> {
    ids.iter()
        .map(|&id| {
            let o = run(id);
            on_result(&o);
            o
        })
        .collect()
}

type Verdict = (bool, String, Option<f64>);

/// 24 fundamental discriminants, log-spaced over `[-10^5, -10^3]`: for
/// `k = 0..24` the largest fundamental `D <= -round(10^(3 + 2k/23))`.
pub fn discriminant_sample() -> Vec<i64> {
    (0..24)
        .map(|k| {
            let m = 10f64.powf(3.0 + 2.0 * k as f64 / 23.0).round() as i64;
            (m..)
                .map(|n| -n)
                .find(|&d| Discriminant::new(d).is_ok_and(|x| x.is_fundamental()))
                .expect("fundamental discriminants are dense")
        })
        .collect()
}

fn group(d: i64) -> ClassGroup {
    ClassGroup::from_value(d).expect("sample discriminants are fundamental")
}

fn criterion_1() -> Verdict {
    let ds = fundamental_range(-9999, -4);
    let bad: Vec<i64> = ds
        .par_iter()
        .filter_map(|&d| {
            let g = group(d);
            let disc = g.discriminant();
            let l = l_one_chi(disc, 100 * disc.unsigned_abs()).ok()?;
            let h = class_number_from_l(disc, l.value).round() as usize;
            (h != g.class_number()).then_some(d)
        })
        .collect();
    (
        bad.is_empty(),
        format!("{} of {} discriminants agree; disagreeing: {:?}", ds.len() - bad.len(), ds.len(), bad),
        Some(60.0),
    )
}

fn criterion_2() -> Verdict {
    const N: u64 = 5000;
    let primes = sieve_primes(N).expect("small limit");
    let mut problems = Vec::new();
    let mut maxima = Vec::new();
    for d in [-3i64, -4, -8, -23, -47, -71, -163] {
        let g = group(d);
        let disc = g.discriminant();
        if let Some(n) = (1..=N).find(|&n| representation_count_with(n, g.elements()) != dirichlet_r(n, disc)) {
            problems.push(format!("D={d} first mismatch at n={n}"));
        }
        let max_r = primes
            .iter()
            .filter(|&&p| d % p as i64 != 0)
            .map(|&p| representation_count_with(p, g.elements()))
            .max()
            .unwrap_or(0);
        maxima.push(format!("{d}:{max_r}"));
        if d < -4 && max_r != 4 {
            problems.push(format!("D={d} max r(p) = {max_r}"));
        }
    }
    let detail = if problems.is_empty() {
        format!("exact for n <= {N}; max r(p) by D {}", maxima.join(" "))
    } else {
        problems.join("; ")
    };
    (problems.is_empty(), detail, Some(60.0))
}

const IDENTITY_DISCS: [i64; 3] = [-23, -47, -10007];
const IDENTITY_SCALES: [f64; 3] = [1e3, 1e4, 1e5];
const WEIGHTS: [WeightKind; 2] = [WeightKind::Bump, WeightKind::Indicator];

fn identity_cases() -> Vec<(i64, f64, WeightKind)> {
    let mut out = Vec::new();
    for d in IDENTITY_DISCS {
        for t in IDENTITY_SCALES {
            for w in WEIGHTS {
                out.push((d, t, w));
            }
        }
    }
    out
}

fn criterion_3() -> Verdict {
    let mut worst = 0.0f64;
    for (d, t, w) in identity_cases() {
        let g = group(d);
        let sums = class_sums(&g, t, &Weight::of_kind(w)).expect("valid scale");
        let chi = psi_by_char(&g, &sums.psi_by_class);
        let total: f64 = sums.psi_by_class.iter().sum();
        let gap = identity_gap(variance_definitional(&sums.psi_by_class), variance_dual(&chi), total);
        worst = worst.max(gap);
    }
    (
        worst <= 1e-9,
        format!("{} cases, worst relative gap {worst:.3e}", identity_cases().len()),
        Some(120.0),
    )
}

fn criterion_4() -> Verdict {
    let mut worst = 0.0f64;
    for (d, t, w) in identity_cases() {
        let g = group(d);
        let psi_a = class_sums(&g, t, &Weight::of_kind(w)).expect("valid scale").psi_by_class;
        let back = fourier_inverse(&g, &psi_by_char(&g, &psi_a));
        let scale = psi_a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let err = psi_a
            .iter()
            .zip(&back)
            .map(|(a, b)| (Complex64::new(*a, 0.0) - b).norm())
            .fold(0.0f64, f64::max);
        worst = worst.max(err / scale);
    }
    (
        worst <= 1e-9,
        format!("{} cases, worst relative error {worst:.3e}", identity_cases().len()),
        None,
    )
}

fn criterion_5() -> Verdict {
    let g = group(-23);
    let t = 1e6;
    match psi_report(&g, t, &Weight::bump()) {
        Ok(rep) => {
            let dev = rep.psi_total / t - 1.0;
            (dev.abs() <= 0.05, format!("psi/T - 1 = {dev:.5}"), Some(30.0))
        }
        Err(e) => (false, e.to_string(), Some(30.0)),
    }
}

fn criterion_6() -> Verdict {
    let sample = discriminant_sample();
    let results: Vec<(i64, Result<f64, String>)> = sample
        .par_iter()
        .map(|&d| {
            let g = group(d);
            let l = g.discriminant().log_abs();
            let h = g.class_number() as f64;
            let t = (h * h * l * l).max(2.0);
            let r = psi_report(&g, t, &Weight::bump())
                .map(|rep| rep.variance_ratio())
                .map_err(|e| e.to_string());
            (d, r)
        })
        .collect();
    let mut max_ratio = 0.0f64;
    let mut problems = Vec::new();
    for (d, r) in &results {
        match r {
            Ok(v) => {
                max_ratio = max_ratio.max(*v);
                if *v > 10.0 {
                    problems.push(format!("D={d} ratio {v:.3}"));
                }
            }
            Err(e) => problems.push(format!("D={d}: {e}")),
        }
    }
    let detail = format!(
        "{} discriminants, max Var/(T log^2|D|) = {max_ratio:.4}{}",
        sample.len(),
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
    );
    (problems.is_empty() && sample.len() >= 20, detail, Some(300.0))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

fn criterion_7() -> Verdict {
    let g = group(-23);
    let least = least_primes(&g, 1000).expect("small cap");
    let table: Vec<((i64, i64, i64), u64)> = g
        .elements()
        .iter()
        .zip(&least)
        .map(|(f, lp)| ((f.a(), f.b(), f.c()), lp.map_or(0, |x| x.p)))
        .collect();
    let expected = [((2, 1, 3), 2u64), ((2, -1, 3), 2), ((1, 1, 6), 23)];
    let mut ok = expected.iter().all(|e| table.contains(e));
    // brute force: least prime with a representation by the form itself
    for (f, lp) in g.elements().iter().zip(&least) {
        let brute = (2..1000u64).find(|&p| is_prime(p) && form_representation_count(f, p) > 0);
        ok &= brute == lp.map(|x| x.p);
    }
    let r3 = exceptional_count_from(&least, 3);
    let r24 = exceptional_count_from(&least, 24);
    ok &= r3 == 1 && r24 == 0;
    (ok, format!("table {table:?}; R(3) = {r3}, R(24) = {r24}"), None)
}

struct DecayRow {
    d: i64,
    h: usize,
    x_small: u64,
    r_small: usize,
    r_big: usize,
    r_ideal_small: usize,
    forced: usize,
}

fn decay_rows() -> Vec<DecayRow> {
    discriminant_sample()
        .par_iter()
        .map(|&d| {
            let g = group(d);
            let h = g.class_number();
            let l = g.discriminant().log_abs();
            let x_small = (h as f64 * l.powf(2.1)).ceil() as u64;
            let x_big = (100.0 * (h * h) as f64 * l * l).ceil() as u64;
            let least = least_primes(&g, x_big).expect("within sieve cap");
            let ideals = ideal_norms_from(&g, &least, x_big);
            DecayRow {
                d,
                h,
                x_small,
                r_small: exceptional_count_from(&least, x_small),
                r_big: exceptional_count_from(&least, x_big),
                r_ideal_small: ideals.iter().filter(|e| e.map_or(true, |n| n >= x_small)).count(),
                forced: forced_exceptional_classes(&g, x_small).len(),
            }
        })
        .collect()
}

/// Failures are reported as such. A failure counts as structural when the
/// classes forced empty by the `|D| / 4A` floor alone already exceed `0.1 h`.
fn criterion_8() -> Verdict {
    let rows = decay_rows();
    let mut failures = Vec::new();
    let mut all_structural = true;
    for r in &rows {
        let small_ok = r.r_small as f64 <= 0.1 * r.h as f64;
        if !small_ok || r.r_big != 0 {
            let structural = r.r_big == 0 && r.forced as f64 > 0.1 * r.h as f64;
            all_structural &= structural;
            failures.push(format!(
                "D={} h={} X={} R={} (forced by the A-floor: {}, prime-ideal variant: {}) R(100 h^2 log^2)={}{}",
                r.d,
                r.h,
                r.x_small,
                r.r_small,
                r.forced,
                r.r_ideal_small,
                r.r_big,
                if structural { " [structural]" } else { "" }
            ));
        }
    }
    let detail = format!(
        "{} of {} discriminants within bounds{}",
        rows.len() - failures.len(),
        rows.len(),
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    let structural = !failures.is_empty() && all_structural;
    let mut v = (failures.is_empty(), detail, Some(600.0));
    if structural {
        v.1.push_str("; every failure is structural");
    }
    v
}

/// Whether a failed criterion 8 is fully accounted for by forced classes.
pub fn decay_failures_structural() -> bool {
    decay_rows().iter().all(|r| {
        let ok = r.r_small as f64 <= 0.1 * r.h as f64 && r.r_big == 0;
        ok || (r.r_big == 0 && r.forced as f64 > 0.1 * r.h as f64)
    })
}

fn criterion_9() -> Verdict {
    let mut ds = fundamental_range(-2000, -3);
    ds.extend(discriminant_sample());
    let counts: Vec<(usize, usize)> = ds
        .par_iter()
        .map(|&d| {
            let g = group(d);
            let abs_d = g.discriminant().unsigned_abs() as i128;
            let h = g.class_number();
            let l = g.discriminant().log_abs();
            let cap = (100.0 * (h * h) as f64 * l * l).ceil().max(1000.0) as u64;
            let least = least_primes(&g, cap).expect("within sieve cap");
            let bad = g
                .elements()
                .iter()
                .zip(&least)
                .filter(|(f, lp)| {
                    (4 * f.a() as i128 * f.c() as i128) < abs_d || lp.is_some_and(|x| x.p < f.a() as u64)
                })
                .count();
            (h, bad)
        })
        .collect();
    let classes: usize = counts.iter().map(|c| c.0).sum();
    let bad: usize = counts.iter().map(|c| c.1).sum();
    (
        bad == 0,
        format!("{classes} classes over {} discriminants, {bad} exceptions", ds.len()),
        None,
    )
}

fn criterion_10() -> Verdict {
    let p = ScanParams::new(-2000, -3);
    let run = |threads| {
        let cfg = RunConfig {
            threads,
            ..RunConfig::default()
        };
        scan(&p, &cfg).map(|o| (o.report.to_csv(), o.failures.len()))
    };
    match (run(1), run(4)) {
        (Ok((a, fa)), Ok((b, fb))) => {
            let same = a == b;
            (
                same && fa == 0 && fb == 0,
                format!("{} rows, {} bytes, identical: {same}", a.lines().count() - 1, a.len()),
                None,
            )
        }
        (Err(e), _) | (_, Err(e)) => (false, e.to_string(), None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_shape() {
        let s = discriminant_sample();
        assert_eq!(s.len(), 24);
        assert!(s.windows(2).all(|w| w[0] > w[1]));
        assert!(s[0] <= -1000 && s[0] > -1010);
        assert!(*s.last().unwrap() <= -100_000 && *s.last().unwrap() > -100_010);
        for d in s {
            assert!(Discriminant::new(d).unwrap().is_fundamental());
        }
    }

    #[test]
    fn cheap_criteria() {
        for id in [4, 7] {
            let o = run(id);
            assert!(o.passed, "{o}");
        }
        assert!(!run(0).passed);
    }
}
