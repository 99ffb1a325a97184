// SPDX-License-Identifier: Apache-2.0

//! Batch scan over a range of fundamental discriminants.

use rayon::prelude::*;

use classprime::heegner::repulsion_report;
use classprime::stats::{exceptional_count_from, ideal_norms_from, least_primes_capped, psi_report, Weight, WeightKind};
use classprime::Discriminant;

use crate::commands::{group, DEFAULT_SCAN_RULES, DEFAULT_T, DEFAULT_X_CAP};
use crate::config::{RunConfig, Scale};
use crate::error::CliError;
use crate::report::{Cell, Report};

#[derive(Debug, Clone)]
pub struct ScanParams {
    pub d_min: i64,
    pub d_max: i64,
    pub x_rules: Vec<Scale>,
    pub x_cap: Scale,
    /// scale for the variance column; `None` skips it
    pub t: Option<Scale>,
    pub weight: WeightKind,
}

impl ScanParams {
    pub fn new(d_min: i64, d_max: i64) -> ScanParams {
        ScanParams {
            d_min,
            d_max,
            x_rules: DEFAULT_SCAN_RULES.iter().map(|s| s.parse().expect("valid default")).collect(),
            x_cap: DEFAULT_X_CAP.parse().expect("valid default"),
            t: Some(DEFAULT_T.parse().expect("valid default")),
            weight: WeightKind::Bump,
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = [
            "disc",
            "h",
            "x_cap",
            "partial",
            "max_least_prime",
            "median_least_prime",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for r in &self.x_rules {
            cols.push(format!("x[{r}]"));
            cols.push(format!("r[{r}]"));
            cols.push(format!("r_ideal[{r}]"));
        }
        cols.push("t".into());
        cols.push("var_ratio".into());
        cols
    }
}

/// Fundamental discriminants in `[d_min, d_max]`, in decreasing order.
pub fn fundamental_range(d_min: i64, d_max: i64) -> Vec<i64> {
    let hi = d_max.min(-3);
    if d_min > hi {
        return Vec::new();
    }
    (d_min..=hi)
        .rev()
        .filter(|&d| Discriminant::new(d).is_ok_and(|x| x.is_fundamental()))
        .collect()
}

pub fn scan_row(d: i64, p: &ScanParams, cfg: &RunConfig) -> Result<Vec<Cell>, CliError> {
    let g = group(d, cfg)?;
    let h = g.class_number();
    let logd = g.discriminant().log_abs();
    let cap = p.x_cap.eval_int(h, logd).min(cfg.sieve_cap.saturating_add(1));
    let least = least_primes_capped(&g, cap, cfg.sieve_cap)?;
    let ideals = ideal_norms_from(&g, &least, cap);
    let rep = repulsion_report(&g, &least);
    if rep.floor_violations > 0 {
        return Err(CliError::Mismatch(format!("D = {d}: least prime below A")));
    }
    let opt = |v: Option<u64>| v.map_or(Cell::Missing(""), Cell::from);
    let mut row = vec![
        Cell::from(d),
        Cell::from(h),
        Cell::from(cap),
        Cell::from(least.iter().any(Option::is_none)),
        opt(rep.max_least_prime),
        opt(rep.median_least_prime),
    ];
    for rule in &p.x_rules {
        let x = rule.eval_int(h, logd);
        row.push(x.into());
        row.push(exceptional_count_from(&least, x).into());
        row.push(ideals.iter().filter(|e| e.map_or(true, |n| n >= x)).count().into());
    }
    match &p.t {
        Some(t) if t.eval(h, logd) >= 2.0 => {
            let tv = t.eval(h, logd);
            let rep = psi_report(&g, tv, &Weight::of_kind(p.weight))?;
            row.push(tv.into());
            row.push(rep.variance_ratio().into());
        }
        Some(t) => {
            row.push(t.eval(h, logd).into());
            row.push(Cell::Missing("na"));
        }
        None => {
            row.push(Cell::Missing("na"));
            row.push(Cell::Missing("na"));
        }
    }
    Ok(row)
}

#[derive(Debug)]
pub struct ScanOutcome {
    pub report: Report,
    /// `(D, error)` for every discriminant that produced no row
    pub failures: Vec<(i64, CliError)>,
}

/// Rows in decreasing `D`; identical for every thread count.
pub fn scan(p: &ScanParams, cfg: &RunConfig) -> Result<ScanOutcome, CliError> {
    if cfg.threads == 0 {
        return Err(CliError::BadInput("thread count must be >= 1".into()));
    }
    let ds = fundamental_range(p.d_min, p.d_max);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::BadInput(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<Cell>, CliError>> =
        pool.install(|| ds.par_iter().map(|&d| scan_row(d, p, cfg)).collect());
    let mut report = Report::new(&p.columns());
    let mut failures = Vec::new();
    for (d, res) in ds.into_iter().zip(results) {
        match res {
            Ok(row) => report.push_row(row),
            Err(e) => failures.push((d, e)),
        }
    }
    Ok(ScanOutcome { report, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(threads: usize) -> RunConfig {
        RunConfig {
            threads,
            ..RunConfig::default()
        }
    }

    fn naive_fundamental(d: i64) -> bool {
        let n = -d;
        let squarefree = |m: i64| (2..).take_while(|k| k * k <= m).all(|k| m % (k * k) != 0);
        match d.rem_euclid(4) {
            1 => squarefree(n),
            0 => {
                let m = n / 4;
                (m % 4 == 1 || m % 4 == 2) && squarefree(m)
            }
            _ => false,
        }
    }

    #[test]
    fn range_is_fundamental_and_decreasing() {
        let ds = fundamental_range(-500, -3);
        let want: Vec<i64> = (-500..=-3).rev().filter(|&d| naive_fundamental(d)).collect();
        assert_eq!(ds, want);
        assert_eq!(ds[0], -3);
        assert!(fundamental_range(-3, -500).is_empty());
        assert!(fundamental_range(-2, 10).is_empty());
    }

    #[test]
    fn scan_rows_and_determinism() {
        let mut p = ScanParams::new(-500, -3);
        p.x_rules = vec!["10*h*log2".parse().unwrap()];
        let a = scan(&p, &cfg(1)).unwrap();
        let b = scan(&p, &cfg(3)).unwrap();
        assert!(a.failures.is_empty());
        assert_eq!(a.report.rows.len(), fundamental_range(-500, -3).len());
        assert_eq!(a.report.to_csv(), b.report.to_csv());
        assert_eq!(a.report.rows[0][0], Cell::Int(-3));
    }

    #[test]
    fn empty_scan_is_header_only() {
        let p = ScanParams::new(-2, -1);
        let out = scan(&p, &cfg(2)).unwrap();
        assert_eq!(out.report.to_csv().lines().count(), 1);
        assert_eq!(out.report.to_json().trim(), "[]");
    }
}
