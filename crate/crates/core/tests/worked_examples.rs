//! Closed-form examples, with reference values computed independently at
//! high precision.

use convex_bounds::deriv::*;
use convex_bounds::hardy::*;
use convex_bounds::hh::*;
use convex_bounds::*;

const E: f64 = std::f64::consts::E;

fn close(what: &str, got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "{what}: got {got}, want {want}");
}

fn unit(src: &str) -> (FunctionSpec64, Interval64) {
    let f = FunctionSpec::on_interval(src, 0.0, 1.0).unwrap();
    let iv = f.interval().unwrap();
    (f, iv)
}

#[test]
fn reference_constants() {
    close("sqrt(e)/(e-1)", E.sqrt() / (E - 1.0), 0.959_517_375_667_471_9, 1e-15);
    close("1/(e-1)", 1.0 / (E - 1.0), 0.581_976_706_869_326_4, 1e-15);
    close("3^(5/8)", 3f64.powf(0.625), 1.987_013_346_421_578, 1e-15);
    close("2 sqrt(ln 2)", 2.0 * 2f64.ln().sqrt(), 1.665_109_222_315_396, 1e-15);
}

#[test]
fn series_example() {
    let s = Settings::default();
    let f = FunctionSpec::on_half_line("exp(-x)").unwrap();
    let (h, m) = series_sandwiches(&f, &s).unwrap();
    close("eq29 lower", h.lower, 0.959_517_375_667_471_9, 1e-9);
    close("eq29 upper", h.upper, 1.081_976_706_869_326, 1e-9);
    close("value", h.value, 1.0, 1e-9);
    close("eq210 lower", m.lower, 0.581_976_706_869_326_4, 1e-9);
    close("eq210 upper", m.upper, 1.581_976_706_869_326, 1e-9);
    assert!(m.lower < h.lower && h.upper < m.upper);
}

#[test]
fn hardy_examples() {
    let s = Settings::default();
    let f = FunctionSpec::on_half_line("exp(-x)").unwrap();
    let reference = [
        (2.0, 1.665_109_222_315_396),
        (4.0, 1.221_902_346_666_493),
        (16.0, 1.045_710_992_652_131),
        (64.0, 1.010_972_646_986_904),
        (256.0, 1.002_716_391_794_216),
    ];
    for (p, want) in reference {
        let e = hardy_ratio(&f, &HardyParams::new(1.0, p).unwrap(), 1e-10, &s).unwrap();
        close(&format!("ratio p={p}"), e.value, want, 1e-8);
        assert!(e.holds(0.0));
    }
    assert!(matches!(HardyParams::new(1.0, 1.0), Err(Error::Parameter(_))));
}

#[test]
fn refined_examples() {
    let s = Settings::default();
    let (f, iv) = unit("x^2");
    close("x^2 refined", refined_rhh(&f, &iv, &s).unwrap().value, 7.0 / 18.0, 1e-9);
    let (g, iv) = unit("exp(x)");
    let e = refined_rhh(&g, &iv, &s).unwrap();
    close("exp refined", e.value, 1.765_002_538_322_295, 1e-9);
    let plain = hh(&g, &iv, &s).unwrap();
    assert!(plain.value <= e.value && e.value <= plain.upper);
}

#[test]
fn derivative_examples() {
    let s = Settings::default();
    let (f, iv) = unit("exp(x)");
    let m = moment_enclosure(&f, &iv, &s).unwrap();
    close("A", m.lower.unwrap(), 0.137_321_023_797_817_2, 1e-8);
    close("M_f", m.value, 0.140_859_085_770_477_4, 1e-8);
    close("B", m.upper, 0.154_928_409_519_126_9, 1e-8);
    let t = trapezoid_gap_enclosure(&f, &iv, &s).unwrap();
    close("trapezoid A", t.lower.unwrap(), 0.137_321_023_797_817_2, 1e-8);
    close("trapezoid gap", t.value, (3.0 - E) / 2.0, 1e-8);
    close("trapezoid B", t.upper, 0.154_928_409_519_126_9, 1e-8);
    let n = mean_enclosure_endpoint(&f, &iv, &s).unwrap();
    close("N", n.lower.unwrap(), 1.692_474_247_562_856, 1e-8);
    close("mean", n.value, E - 1.0, 1e-8);
    close("M", n.upper, 1.739_427_276_153_015, 1e-8);
    let q = mean_enclosure_midpoint(&f, &iv, &s).unwrap();
    close("midpoint N", q.lower.unwrap(), 1.702_557_458_599_744, 1e-8);
    close("midpoint M", q.upper, 1.737_482_138_823_633, 1e-8);
    let h = half_interval_gap(&f, &iv, &s).unwrap();
    close("half gap", h.value, 0.420_839_287_058_788_9, 1e-8);
    close("half bound", h.upper, 0.429_570_457_114_761_3, 1e-8);
    let l = log_mean_bound(1.0, 3.0).unwrap();
    close("log-mean lhs", l.lhs, 1.987_013_346_421_578, 1e-8);
    assert_eq!((l.mid, l.amgm), (2.0, 2.25));
}

#[test]
fn product_examples() {
    let s = Settings::default();
    let (x, iv) = unit("x");
    let (ex, _) = unit("exp(x)");
    let c = product_bound(&[x.clone(), ex.clone()], &iv, &s).unwrap();
    close("int x e^x", c.lhs, 1.0, 1e-9);
    close("product rhs", c.rhs, 1.448_193_365_795_004, 1e-12);
    let certificate = product_certificate(
        &[FunctionSpec::on_interval("x^2", 0.0, 2.0).unwrap(), FunctionSpec::on_interval("(2-x)^2", 0.0, 2.0).unwrap()],
        &Interval::new(0.0, 2.0).unwrap(),
        &s,
    )
    .unwrap();
    assert_eq!(certificate.verdict, Verdict::Neither);
    assert!(certificate.witness.is_some());
}
