//! Randomized check of every inequality against the seeded generators.

use std::collections::BTreeMap;

use convex_bounds::deriv::{self, SplitPoint};
use convex_bounds::hardy::{self, HardyParams};
use convex_bounds::hh;
use convex_bounds::random::*;
use convex_bounds::{Error, FunctionSpec64, Interval64, Settings64};
use rand::Rng;
use rayon::prelude::*;

use crate::report::{ReportRow, Status};

/// Every inequality id the suite exercises, in report order.
pub const IDS: [&str; 24] = [
    "HH", "2.1", "Fejer", "2.2", "2.5", "HH-composite", "2.9", "2.10", "3.1", "3.3", "3.6", "L3.2", "3.7",
    "3.7-nonconvex", "Ion", "4.1", "4.2", "5.1", "5.3", "5.5", "5.6", "5.7", "5.14", "HH-affine",
];

#[derive(Debug, Clone, PartialEq)]
pub struct IdSummary {
    pub inequality_id: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub precondition_failed: usize,
    /// Largest amount by which a slack fell below zero, or 0.
    pub max_violation: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub rows: Vec<ReportRow>,
    pub summary: Vec<IdSummary>,
}

impl VerifyReport {
    pub fn worst(&self) -> Status {
        self.rows.iter().map(|r| r.status).max().unwrap_or(Status::Pass)
    }

    pub fn failures(&self) -> usize {
        self.summary.iter().map(|s| s.failed + s.precondition_failed).sum()
    }
}

fn span(iv: &Interval64) -> (f64, f64) {
    (iv.a(), iv.b())
}

const HALF_LINE: (f64, f64) = (0.0, f64::INFINITY);

/// Turns an engine result into a row; any error is a precondition failure
/// because every generated input satisfies the hypotheses by construction.
fn row<T>(
    id: &str,
    function: &str,
    interval: (f64, f64),
    result: Result<T, Error>,
    make: impl FnOnce(T) -> ReportRow,
) -> ReportRow {
    match result {
        Ok(v) => make(v),
        Err(_) => ReportRow::precondition_failed(id, function, interval),
    }
}

/// A convexity verdict as a row. For a wanted verdict the slack is
/// `tolerance - max_violation`; for a refuted one it is the reverse.
fn certificate_row(
    id: &str,
    function: &str,
    interval: (f64, f64),
    cert: Result<convex_bounds::Certificate64, Error>,
    want_convex: bool,
) -> ReportRow {
    row(id, function, interval, cert, |c| {
        let (lhs, rhs) = if want_convex { (c.max_violation, c.tolerance) } else { (c.tolerance, c.max_violation) };
        let mut r = ReportRow::one_sided(id, function, interval, lhs, rhs, 0.0);
        let ok = if want_convex { c.verdict.is_convex() } else { c.verdict == convex_bounds::Verdict::Neither };
        r.status = if ok { Status::Pass } else { Status::Fail };
        r
    })
}

/// All rows of trial `index`.
pub fn trial(seed: u64, index: u64, tol: f64) -> Vec<ReportRow> {
    let s = Settings64::default();
    let mut rng = trial_rng(seed, index);
    let mut rows = Vec::with_capacity(IDS.len());

    // Hermite-Hadamard family on a convex f
    let f: FunctionSpec64 = sample_convex(&mut rng, ConvexClass::ConvexF);
    let iv = f.interval().expect("finite");
    let (ft, fi) = (f.text().to_string(), span(&iv));
    rows.push(row("HH", &ft, fi, hh::hh(&f, &iv, &s), |e| ReportRow::checked("HH", &ft, fi, e.lower, e.value, e.upper, tol)));
    let x = rng.gen_range(iv.a()..=iv.b());
    let mirror = f.eval(iv.a() + iv.b() - x).and_then(|m| Ok(m + f.eval(x)?));
    let ends = f.eval(iv.a()).and_then(|fa| Ok(fa + f.eval(iv.b())?));
    rows.push(row("2.1", &ft, fi, mirror.and_then(|m| Ok((m, ends?))), |(m, e)| {
        ReportRow::one_sided("2.1", &ft, fi, m, e, tol)
    }));
    let g: FunctionSpec64 = sample_symmetric_weight(&mut rng, iv.a(), iv.b());
    let gt = format!("{ft} ; weight {}", g.text());
    rows.push(row("Fejer", &gt, fi, hh::fejer_upper(&f, &g, &iv, 1e-9, &s), |c| {
        ReportRow::one_sided("Fejer", &gt, fi, c.lhs, c.rhs, tol)
    }));
    let n = rng.gen_range(1..=50);
    let nt = format!("{ft} ; n = {n}");
    rows.push(row("2.2", &nt, fi, hh::riemann_sandwich(&f, &iv, n, &s), |e| {
        ReportRow::checked("2.2", &nt, fi, e.lower, e.value, e.upper, tol)
    }));
    rows.push(row("2.5", &ft, fi, hh::refined_rhh(&f, &iv, &s), |e| {
        ReportRow::checked("2.5", &ft, fi, e.lower, e.value, e.upper, tol)
    }));
    rows.push(row("HH-composite", &ft, fi, hh::composite_hh(&f, &iv, 1e-6, 30, &s), |e| {
        ReportRow::checked("HH-composite", &ft, fi, e.lower, e.value, e.upper, tol)
    }));
    let slope = rng.gen_range(-2.0..2.0);
    let affine = FunctionSpec64::on_interval(&format!("{slope:.4}*x + 1"), iv.a(), iv.b());
    let at = affine.as_ref().map(|h| h.text().to_string()).unwrap_or_default();
    rows.push(row("HH-affine", &at, fi, affine.and_then(|h| hh::hh(&h, &iv, &s)), |e| {
        // equality case: both slacks vanish
        let mut r = ReportRow::checked("HH-affine", &at, fi, e.lower, e.value, e.upper, tol);
        if r.slack_lower.abs() > tol || r.slack_upper.abs() > tol {
            r.status = Status::Fail;
        }
        r
    }));

    // series on [0, inf)
    let h: FunctionSpec64 = sample_decreasing_convex(&mut rng);
    let ht = h.text().to_string();
    match hh::series_sandwiches(&h, &s) {
        Ok((had, mono)) => {
            let mut r = ReportRow::checked("2.9", &ht, HALF_LINE, had.lower, had.value, had.upper, tol);
            if !had.within(&mono) {
                r.status = Status::Fail;
            }
            rows.push(r);
            rows.push(ReportRow::checked("2.10", &ht, HALF_LINE, mono.lower, mono.value, mono.upper, tol));
        }
        Err(_) => {
            rows.push(ReportRow::precondition_failed("2.9", &ht, HALF_LINE));
            rows.push(ReportRow::precondition_failed("2.10", &ht, HALF_LINE));
        }
    }

    // Hardy ratios
    let h: FunctionSpec64 = sample_decreasing_convex(&mut rng);
    let p = rng.gen_range(1.2..8.0);
    let alpha = rng.gen_range(1.0 / p + 0.05..1.0 + 0.5 / p);
    let ht = format!("{} ; alpha = {alpha:.6}, p = {p:.6}", h.text());
    let ratio = HardyParams::new(alpha, p).and_then(|params| hardy::hardy_ratio(&h, &params, tol, &s));
    rows.push(row("3.1", &ht, HALF_LINE, ratio, |e| ReportRow::checked("3.1", &ht, HALF_LINE, e.lower, e.value, e.upper, tol)));
    let k = rng.gen_range(0.2..3.0);
    let e: FunctionSpec64 = FunctionSpec64::on_half_line(&format!("exp(-{k:.4}*x)")).expect("parses");
    let et = format!("{} ; alpha = 1, p = 256", e.text());
    let ratio = HardyParams::new(1.0, 256.0).and_then(|params| hardy::hardy_ratio(&e, &params, tol, &s));
    rows.push(row("3.3", &et, HALF_LINE, ratio, |r| {
        let mut row = ReportRow::checked("3.3", &et, HALF_LINE, r.lower, r.value, r.upper, tol);
        if r.width() >= 0.004 {
            row.status = Status::Fail;
        }
        row
    }));

    // products of positive convex factors
    let (a, b) = random_interval(&mut rng);
    let count = rng.gen_range(2..=4);
    let us: Vec<FunctionSpec64> = (0..count).map(|_| sample_positive_convex(&mut rng, a, b)).collect();
    let piv = us[0].interval().expect("finite");
    let pi = (a, b);
    let ut = us.iter().map(|u| u.text()).collect::<Vec<_>>().join(" ; ");
    rows.push(row("3.6", &ut, pi, hardy::holder_product_check(&us, &piv, &s), |c| {
        ReportRow::one_sided("3.6", &ut, pi, c.lhs, c.rhs, tol * c.rhs.abs().max(1.0))
    }));
    let power = rng.gen_range(2..=4);
    let pt = format!("({})^{power}", us[0].text());
    rows.push(certificate_row("L3.2", &pt, pi, hardy::power_convexity(&us[0], power, &piv, &s), true));
    rows.push(row("3.7", &ut, pi, hardy::product_bound(&us, &piv, &s), |c| {
        ReportRow::one_sided("3.7", &ut, pi, c.lhs, c.rhs, tol)
    }));
    let p = rng.gen_range(1.1..6.0);
    let q = p / (p - 1.0);
    let it = format!("{} ; {} ; p = {p:.6}", us[0].text(), us[1].text());
    rows.push(row("Ion", &it, pi, hardy::ion_bound(&us[0], &us[1], p, q, &piv, &s), |c| {
        ReportRow::one_sided("Ion", &it, pi, c.lhs, c.rhs, tol)
    }));

    // convexity of f' or f''
    let f: FunctionSpec64 = sample_convex(&mut rng, ConvexClass::ConcaveConvexSplit);
    let iv = f.interval().expect("finite");
    let (ft, fi) = (f.text().to_string(), span(&iv));
    rows.push(row("4.1", &ft, fi, deriv::inflection_hadamard(&f, &iv, SplitPoint::Auto, &s), |r| {
        ReportRow::one_sided("4.1", &ft, fi, r.report.value, r.report.upper, tol)
    }));
    let (a, b) = random_interval(&mut rng);
    let c0 = ((a + b) * 5e3).round() / 1e4;
    let b = ((2.0 * c0 - a) * 1e4).round() / 1e4;
    let f: FunctionSpec64 = sample_split(&mut rng, a, b, c0);
    let iv = f.interval().expect("finite");
    let (ft, fi) = (f.text().to_string(), span(&iv));
    rows.push(row("4.2", &ft, fi, deriv::inflection_hadamard(&f, &iv, SplitPoint::At(iv.midpoint()), &s), |r| {
        ReportRow::one_sided("4.2", &ft, fi, r.report.value, r.report.upper, tol)
    }));

    let f: FunctionSpec64 = sample_convex(&mut rng, ConvexClass::ConvexFPrime);
    let iv = f.interval().expect("finite");
    let (ft, fi) = (f.text().to_string(), span(&iv));
    let two_sided = |id: &str, r: Result<deriv::GapReport<f64>, Error>| {
        row(id, &ft, fi, r, |g| ReportRow::checked(id, &ft, fi, g.lower.unwrap_or(g.value), g.value, g.upper, tol))
    };
    rows.push(two_sided("5.1", deriv::moment_enclosure(&f, &iv, &s)));
    rows.push(two_sided("5.5", deriv::mean_enclosure_endpoint(&f, &iv, &s)));
    rows.push(two_sided("5.6", deriv::mean_enclosure_midpoint(&f, &iv, &s)));
    rows.push(two_sided("5.7", deriv::half_interval_gap(&f, &iv, &s)));
    let f: FunctionSpec64 = sample_convex(&mut rng, ConvexClass::ConvexFSecond);
    let iv = f.interval().expect("finite");
    let (ft, fi) = (f.text().to_string(), span(&iv));
    rows.push(row("5.3", &ft, fi, deriv::trapezoid_gap_enclosure(&f, &iv, &s), |g| {
        ReportRow::checked("5.3", &ft, fi, g.lower.unwrap_or(g.value), g.value, g.upper, tol)
    }));
    let a = rng.gen_range(0.01..10.0);
    let b = a + rng.gen_range(0.0..10.0);
    rows.push(row("5.14", "log-mean", (a, b), deriv::log_mean_bound(a, b), |l| {
        let mut r = ReportRow::checked("5.14", "log-mean", (a, b), l.lhs, l.mid, l.amgm, tol);
        if a < b && l.mid >= l.amgm {
            r.status = Status::Fail;
        }
        r
    }));
    rows
}

/// The product `x^2 (2-x)^2` of two convex factors, which must not certify
/// as convex.
pub fn nonconvex_product_row() -> ReportRow {
    let s = Settings64::default();
    let us = [
        FunctionSpec64::on_interval("x^2", 0.0, 2.0).expect("parses"),
        FunctionSpec64::on_interval("(2-x)^2", 0.0, 2.0).expect("parses"),
    ];
    let iv = us[0].interval().expect("finite");
    certificate_row("3.7-nonconvex", "x^2*(2-x)^2", (0.0, 2.0), hardy::product_certificate(&us, &iv, &s), false)
}

/// Runs `trials` trials from `seed`. Trial `i` draws only from stream `i`, so
/// the result does not depend on how trials are scheduled.
pub fn verify_suite(trials: u64, seed: u64, tol: f64) -> VerifyReport {
    let per_trial: Vec<Vec<ReportRow>> = (0..trials).into_par_iter().map(|i| trial(seed, i, tol)).collect();
    let mut rows: Vec<ReportRow> = per_trial.into_iter().flatten().collect();
    rows.push(nonconvex_product_row());
    let mut tally: BTreeMap<&str, IdSummary> = BTreeMap::new();
    for id in IDS {
        tally.insert(
            id,
            IdSummary { inequality_id: id, passed: 0, failed: 0, precondition_failed: 0, max_violation: 0.0 },
        );
    }
    for r in &rows {
        let entry = tally.get_mut(r.inequality_id.as_str()).expect("known id");
        match r.status {
            Status::Pass => entry.passed += 1,
            Status::Fail => entry.failed += 1,
            Status::PreconditionFailed => entry.precondition_failed += 1,
        }
        let worst = -(r.slack_lower.min(r.slack_upper));
        if worst > entry.max_violation {
            entry.max_violation = worst;
        }
    }
    let summary = IDS.iter().map(|id| tally.remove(id).expect("present")).collect();
    VerifyReport { rows, summary }
}
