// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand. Each returns a [`Report`] plus an optional
//! failure that decides the exit code after the report has been written.

use std::f64::consts::PI;

use classprime::arith::{
    default_l_one_terms, dirichlet_r, l_one_chi, representation_count_with, unit_count,
};
use classprime::classgroup::ClassGroupOptions;
use classprime::heegner::{
    coefficient_bound_fraction, cramer_class_number_scale, cramer_prediction, heegner_points,
    repulsion_report,
};
use classprime::sieve::sieve_primes_capped;
use classprime::stats::{
    exceptional_count_from, ideal_norms_from, least_primes_capped, psi_report, LeastPrime, Weight,
    WeightKind,
};
use classprime::{ClassGroup, Discriminant};

use crate::config::{RunConfig, Scale};
use crate::error::CliError;
use crate::report::{Cell, Report};

/// Marker printed for classes with no prime below the cap.
pub const NONE_AT_CAP: &str = "none@cap";

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_X_CAP: &str = "100*h2*log2";
pub const DEFAULT_T: &str = "h2*log2";
pub const DEFAULT_SCAN_RULES: &[&str] = &["h*log2", "h*log2.1", "h2*log2"];
pub const DEFAULT_N_MAX: u64 = 5000;

#[derive(Debug)]
pub struct Output {
    pub report: Report,
    pub failure: Option<CliError>,
}

impl From<Report> for Output {
    fn from(report: Report) -> Self {
        Output { report, failure: None }
    }
}

pub fn discriminant(d: i64) -> Result<Discriminant, CliError> {
    let disc = Discriminant::new(d)?;
    if d >= 0 {
        return Err(CliError::BadInput(format!("discriminant must be negative, got {d}")));
    }
    Ok(disc)
}

/// Class group of a fundamental discriminant, subject to the configured cap.
pub fn group(d: i64, cfg: &RunConfig) -> Result<ClassGroup, CliError> {
    group_with(d, cfg, false)
}

fn group_with(d: i64, cfg: &RunConfig, allow_nonfundamental: bool) -> Result<ClassGroup, CliError> {
    let disc = discriminant(d)?;
    let opts = ClassGroupOptions {
        allow_nonfundamental,
        max_class_number: cfg.max_class_number,
    };
    Ok(ClassGroup::with_options(disc, opts)?)
}

fn invariants_text(g: &ClassGroup) -> String {
    let inv = g.invariants();
    if inv.is_empty() {
        "1".into()
    } else {
        inv.iter().map(u64::to_string).collect::<Vec<_>>().join("x")
    }
}

fn least_cell(lp: Option<LeastPrime>) -> (Cell, Cell) {
    match lp {
        Some(lp) => (Cell::from(lp.p), Cell::from(lp.ramified)),
        None => (Cell::Missing(NONE_AT_CAP), Cell::Missing("")),
    }
}

fn opt_cell(v: Option<u64>) -> Cell {
    v.map_or(Cell::Missing(""), Cell::from)
}

/// Sieve bound for least-prime searches: the scale's value, clamped so that
/// the sieve cap is respected. Returns the cap and whether it was clamped.
fn least_prime_cap(scale: &Scale, g: &ClassGroup, cfg: &RunConfig) -> (u64, bool) {
    let x = scale.eval_int(g.class_number(), g.discriminant().log_abs());
    let limit = cfg.sieve_cap.saturating_add(1);
    if x > limit {
        (limit, true)
    } else {
        (x, false)
    }
}

/// Reduced forms, class number and group structure of one discriminant.
/// Non-fundamental discriminants are accepted (primitive forms only).
pub fn forms(d: i64, cfg: &RunConfig) -> Result<Output, CliError> {
    let g = group_with(d, cfg, true)?;
    let mut r = Report::new(&["class_index", "a", "b", "c", "order"]);
    for (i, f) in g.elements().iter().enumerate() {
        r.push_row(vec![i.into(), f.a().into(), f.b().into(), f.c().into(), g.order_of(i).into()]);
    }
    r.push_summary("disc", d);
    r.push_summary("fundamental", g.discriminant().is_fundamental());
    r.push_summary("h", g.class_number());
    r.push_summary("orders", invariants_text(&g));
    Ok(r.into())
}

#[derive(Debug, Clone)]
pub struct LeastPrimeParams {
    pub x_cap: Scale,
    pub epsilon: f64,
    /// extra thresholds on top of `h log^2`, `h log^{2+ε}`, `h^2 log^2`
    pub thresholds: Vec<Scale>,
}

impl Default for LeastPrimeParams {
    fn default() -> Self {
        LeastPrimeParams {
            x_cap: DEFAULT_X_CAP.parse().expect("valid default"),
            epsilon: DEFAULT_EPSILON,
            thresholds: Vec::new(),
        }
    }
}

impl LeastPrimeParams {
    pub fn all_thresholds(&self) -> Result<Vec<Scale>, CliError> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(CliError::BadInput(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        let mut out: Vec<Scale> = vec![
            "h*log2".parse().expect("valid"),
            format!("h*log{}", 2.0 + self.epsilon).parse().map_err(CliError::BadInput)?,
            "h2*log2".parse().expect("valid"),
        ];
        out.extend(self.thresholds.iter().cloned());
        Ok(out)
    }
}

pub fn least_primes(d: i64, params: &LeastPrimeParams, cfg: &RunConfig) -> Result<Output, CliError> {
    let g = group(d, cfg)?;
    let thresholds = params.all_thresholds()?;
    let (cap, clamped) = least_prime_cap(&params.x_cap, &g, cfg);
    let least = least_primes_capped(&g, cap, cfg.sieve_cap)?;
    let ideals = ideal_norms_from(&g, &least, cap);
    let rep = repulsion_report(&g, &least);

    let mut r = Report::new(&[
        "class_index",
        "a",
        "b",
        "c",
        "heegner_im",
        "least_prime",
        "is_ramified_prime",
    ]);
    for row in &rep.rows {
        let f = g.form(row.class);
        let (p, ram) = least_cell(row.least_prime);
        r.push_row(vec![row.class.into(), f.a().into(), f.b().into(), f.c().into(), row.im.into(), p, ram]);
    }
    let h = g.class_number();
    let logd = g.discriminant().log_abs();
    let partial = least.iter().any(Option::is_none);
    r.push_summary("disc", d);
    r.push_summary("h", h);
    r.push_summary("x_cap", cap);
    r.push_summary("x_cap_clamped", clamped);
    r.push_summary("partial", partial);
    r.push_summary("max_least_prime", opt_cell(rep.max_least_prime));
    r.push_summary("median_least_prime", opt_cell(rep.median_least_prime));
    r.push_summary("floor_violations", rep.floor_violations);
    for s in &thresholds {
        let x = s.eval_int(h, logd);
        r.push_summary(format!("x[{s}]"), x);
        r.push_summary(format!("r[{s}]"), exceptional_count_from(&least, x));
        r.push_summary(
            format!("r_ideal[{s}]"),
            ideals.iter().filter(|e| e.map_or(true, |n| n >= x)).count(),
        );
        // beyond the cap a missing class may still have a prime below X
        r.push_summary(format!("r_exact[{s}]"), x <= cap || !partial);
    }
    let failure = (rep.floor_violations > 0)
        .then(|| CliError::Mismatch(format!("{} classes with least prime below A", rep.floor_violations)));
    Ok(Output { report: r, failure })
}

pub fn variance(d: i64, t: &Scale, weight: WeightKind, cfg: &RunConfig) -> Result<Output, CliError> {
    let g = group(d, cfg)?;
    let tv = t.eval(g.class_number(), g.discriminant().log_abs());
    if !(tv >= 2.0) {
        return Err(CliError::BadInput(format!("T must be >= 2, got {tv}")));
    }
    if tv > (cfg.sieve_cap / 2) as f64 {
        return Err(CliError::BadInput(format!("T = {tv} needs primes beyond the sieve cap {}", cfg.sieve_cap)));
    }
    let w = Weight::of_kind(weight);
    let rep = psi_report(&g, tv, &w)?;
    let mut r = Report::new(&[
        "disc",
        "h",
        "t",
        "weight",
        "psi_total",
        "var_definitional",
        "var_dual",
        "identity_gap",
        "var_ratio",
        "main_term_deviation",
    ]);
    r.push_row(vec![
        d.into(),
        g.class_number().into(),
        tv.into(),
        weight.to_string().into(),
        rep.psi_total.into(),
        rep.variance.into(),
        rep.variance_dual.into(),
        rep.identity_gap().into(),
        rep.variance_ratio().into(),
        (rep.psi_total / (tv * w.integral()) - 1.0).into(),
    ]);
    Ok(r.into())
}

pub fn dirichlet_check(d: i64, n_max: u64, cfg: &RunConfig) -> Result<Output, CliError> {
    let g = group(d, cfg)?;
    let disc = g.discriminant();
    let forms = g.elements();
    let first_mismatch = (1..=n_max).find(|&n| representation_count_with(n, forms) != dirichlet_r(n, disc));
    let primes = sieve_primes_capped(n_max, cfg.sieve_cap)?;
    let mut max_r = 0u64;
    let mut prime_r_sum = 0u64;
    for &p in &primes {
        let rp = representation_count_with(p, forms);
        prime_r_sum += rp;
        if d % p as i64 != 0 {
            max_r = max_r.max(rp);
        }
    }
    let bound_ok = d >= -4 || max_r <= 4;
    let counting_ok = prime_r_sum <= 4 * primes.len() as u64 || d >= -4;
    let status = match (first_mismatch, bound_ok && counting_ok) {
        (None, true) => "OK",
        (Some(_), _) => "MISMATCH",
        (None, false) => "BOUND_EXCEEDED",
    };
    let mut r = Report::new(&[
        "disc",
        "n_max",
        "w",
        "status",
        "first_mismatch",
        "max_prime_r",
        "prime_r_sum",
        "prime_count",
    ]);
    r.push_row(vec![
        d.into(),
        n_max.into(),
        (unit_count(disc) as u64).into(),
        status.into(),
        opt_cell(first_mismatch),
        max_r.into(),
        prime_r_sum.into(),
        primes.len().into(),
    ]);
    let failure = (status != "OK").then(|| match first_mismatch {
        Some(n) => CliError::Mismatch(format!(
            "r({n}, {d}) = {} by lattice count but {} by divisor sum",
            representation_count_with(n, forms),
            dirichlet_r(n, disc)
        )),
        None => CliError::Mismatch(format!("prime representation bound exceeded: max r(p) = {max_r}")),
    });
    Ok(Output { report: r, failure })
}

pub fn heegner(d: i64, psi_value: f64, x_cap: &Scale, cfg: &RunConfig) -> Result<Output, CliError> {
    if !(psi_value.is_finite() && psi_value > 0.0) {
        return Err(CliError::BadInput(format!("psi-value must be positive, got {psi_value}")));
    }
    let g = group(d, cfg)?;
    let disc = g.discriminant();
    let (cap, clamped) = least_prime_cap(x_cap, &g, cfg);
    let least = least_primes_capped(&g, cap, cfg.sieve_cap)?;
    let rep = repulsion_report(&g, &least);
    let mut r = Report::new(&[
        "class_index",
        "a",
        "b",
        "c",
        "heegner_re",
        "heegner_im",
        "max_coefficient",
        "least_prime",
        "is_ramified_prime",
        "floor_holds",
    ]);
    for (pt, row) in heegner_points(&g).iter().zip(&rep.rows) {
        let (p, ram) = least_cell(row.least_prime);
        r.push_row(vec![
            pt.class.into(),
            pt.a.into(),
            pt.b.into(),
            pt.c.into(),
            pt.re.into(),
            pt.im.into(),
            pt.max_coefficient().into(),
            p,
            ram,
            row.floor_holds().into(),
        ]);
    }
    let l = l_one_chi(disc, default_l_one_terms(disc))?;
    let w = unit_count(disc) as f64;
    r.push_summary("disc", d);
    r.push_summary("h", g.class_number());
    r.push_summary("psi_value", psi_value);
    r.push_summary("coefficient_fraction", coefficient_bound_fraction(&g, psi_value));
    r.push_summary("l_one", l.value);
    r.push_summary("l_one_tail_bound", l.tail_bound);
    r.push_summary("cramer_prediction", cramer_prediction(&g, psi_value, l.value));
    r.push_summary("h_log_d", cramer_class_number_scale(&g));
    // cramer_prediction = (2π / w) · h log|D| · ψ by the class number formula
    r.push_summary("w_over_2pi", w / (2.0 * PI));
    r.push_summary("x_cap", cap);
    r.push_summary("x_cap_clamped", clamped);
    r.push_summary("max_least_prime", opt_cell(rep.max_least_prime));
    r.push_summary("median_least_prime", opt_cell(rep.median_least_prime));
    r.push_summary("argmax_least_prime_class", opt_cell(rep.argmax_least_prime.map(|c| c as u64)));
    r.push_summary("argmax_a_class", rep.argmax_a);
    r.push_summary("floor_violations", rep.floor_violations);
    let failure = (rep.floor_violations > 0)
        .then(|| CliError::Mismatch(format!("{} classes with least prime below A", rep.floor_violations)));
    Ok(Output { report: r, failure })
}
