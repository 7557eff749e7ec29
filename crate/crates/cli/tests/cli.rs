use std::process::Command;

use convex_bounds_cli::report::{format_number, parse_number, CSV_HEADER};
use convex_bounds_cli::verify::IDS;
use convex_bounds_cli::{run, verify_suite, ReportRow, Status};
use proptest::prelude::*;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("convex-bounds").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_rows(args: &[&str]) -> (i32, Vec<ReportRow>) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = call(&full);
    let rows = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, rows)
}

#[test]
fn hh_example() {
    let (code, rows) = json_rows(&["bound", "integral", "-f", "x^2", "-a", "0", "-b", "1"]);
    assert_eq!(code, 0);
    let r = &rows[0];
    assert_eq!((r.inequality_id.as_str(), r.status), ("HH", Status::Pass));
    assert_eq!((r.lower, r.upper), (0.25, 0.5));
    assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["bound", "integral", "-f", "sin(x)", "-a", "0", "-b", "3"]).0, 2);
    assert_eq!(call(&["bound", "integral", "-f", "x^2 +", "-a", "0", "-b", "1"]).0, 3);
    assert_eq!(call(&["bound", "integral", "-f", "x^2", "-a", "1", "-b", "0"]).0, 3);
    assert_eq!(call(&["bound", "nonsense"]).0, 3);
    assert_eq!(call(&["hardy", "ratio", "-f", "exp(-x)", "--alpha", "0.2", "--p", "2"]).0, 2);
    assert_eq!(call(&["verify", "all", "--trials", "0"]).0, 3);
    assert_eq!(call(&["check", "convexity", "-f", "x^2*(2-x)^2", "-a", "0", "-b", "2"]).0, 1);
    assert_eq!(call(&["check", "convexity", "-f", "exp(x)", "-a", "0", "-b", "2", "--level", "2"]).0, 0);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn precondition_row_is_reported() {
    let (code, rows) = json_rows(&["bound", "moment", "-f", "-exp(x)", "-a", "0", "-b", "1"]);
    assert_eq!(code, 2);
    assert_eq!(rows[0].status, Status::PreconditionFailed);
    assert!(rows[0].lower.is_nan());
}

#[test]
fn violated_tolerance_fails() {
    // a negative tolerance demands more slack than the equality case has
    let (code, rows) = json_rows(&["bound", "integral", "-f", "2*x+1", "-a", "0", "-b", "1", "--tol", "-1e-3"]);
    assert_eq!(code, 1);
    assert_eq!(rows[0].status, Status::Fail);
}

#[test]
fn product_emits_both_rows() {
    let (code, rows) = json_rows(&["product", "-f", "x", "-f", "exp(x)", "-a", "0", "-b", "1"]);
    assert_eq!(code, 0);
    let ids: Vec<_> = rows.iter().map(|r| r.inequality_id.as_str()).collect();
    assert_eq!(ids, ["3.6", "3.7"]);
    assert!((rows[1].lower - 1.0).abs() < 1e-10);
    assert!((rows[1].upper - 0.5 * (1.0 + std::f64::consts::E.powi(2)).sqrt()).abs() < 1e-10);

    let (_, ion) = json_rows(&["product", "-f", "x", "-f", "exp(x)", "-a", "0", "-b", "1", "--p", "2"]);
    assert_eq!(ion[1].inequality_id, "Ion");
    assert_eq!(ion[1].upper, rows[1].upper);
    assert_eq!(call(&["product", "-f", "x", "-a", "0", "-b", "1", "--p", "2"]).0, 3);
}

#[test]
fn csv_output() {
    let (code, out, _) = call(&["bound", "logmean", "-a", "1", "-b", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<ReportRow> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].value, 2.0);
    assert_eq!(rows[0].upper, 2.25);
}

#[test]
fn inflection_modes() {
    let (_, auto) = json_rows(&["bound", "inflection", "-f", "x^4/4", "-a", "-1", "-b", "1"]);
    let (_, at) = json_rows(&["bound", "inflection", "-f", "x^4/4", "-a", "-1", "-b", "1", "--c", "0"]);
    assert_eq!(auto[0].upper, at[0].upper);
    assert_eq!(call(&["bound", "inflection", "-f", "x^4/4", "-a", "-1", "-b", "1", "--c", "0", "--auto"]).0, 3);
}

#[test]
fn summary_lists_every_id_once() {
    let report = verify_suite(1, 0, 1e-8);
    let ids: Vec<_> = report.summary.iter().map(|s| s.inequality_id).collect();
    assert_eq!(ids, IDS);
    for s in &report.summary {
        assert!(s.passed + s.failed + s.precondition_failed >= 1, "{}", s.inequality_id);
    }
}

#[test]
fn verify_ignores_thread_count() {
    let at = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| verify_suite(12, 9, 1e-8))
    };
    let (one, four) = (at(1), at(4));
    let render = |r: &convex_bounds_cli::VerifyReport| serde_json::to_string(&r.rows).unwrap();
    assert_eq!(render(&one), render(&four));
    assert_eq!(one.summary, four.summary);
}

#[test]
fn binary_honours_tolerance_variable() {
    let bin = env!("CARGO_BIN_EXE_convex-bounds");
    let args = ["bound", "integral", "-f", "2*x+1", "-a", "0", "-b", "1"];
    let status = Command::new(bin).args(args).env("CONVEX_BOUNDS_TOL", "-1e-3").status().unwrap();
    assert_eq!(status.code(), Some(1));
    let status = Command::new(bin).args(args).env_remove("CONVEX_BOUNDS_TOL").status().unwrap();
    assert_eq!(status.code(), Some(0));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1e3..1e3f64,
        Just(0.0),
        Just(f64::INFINITY),
    ]
}

proptest! {
    #[test]
    fn json_round_trip(
        id in "[0-9A-Za-z.-]{1,12}",
        function in "[ -~]{0,24}",
        xs in proptest::collection::vec(finite(), 5),
        tol in 0.0..1e-6f64,
    ) {
        let row = ReportRow::checked(&id, &function, (xs[0], xs[1]), xs[2], xs[3], xs[4], tol);
        let text = serde_json::to_string(std::slice::from_ref(&row)).unwrap();
        let back: Vec<ReportRow> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let rounded = row.rounded();
        for (x, y) in [
            (back[0].lower, rounded.lower),
            (back[0].value, rounded.value),
            (back[0].upper, rounded.upper),
            (back[0].slack_lower, rounded.slack_lower),
            (back[0].slack_upper, rounded.slack_upper),
        ] {
            prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }

    #[test]
    fn fifteen_significant_digits(x in any::<f64>().prop_filter("finite", |x| x.is_finite() && *x != 0.0)) {
        let s = format_number(x);
        let y = parse_number(&s).unwrap();
        prop_assert!(((x - y) / x).abs() <= 5e-15, "{} -> {}", x, s);
        let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect::<String>();
        prop_assert!(digits.trim_start_matches('0').len() <= 15, "{}", s);
    }
}
