//! One test per acceptance criterion. Each writes a single line
//! `criterion N: PASS|FAIL ...` with the measured numbers and its runtime
//! to stderr, whether or not test output is captured.
//! Tests take a shared lock so that runtimes are measured one at a time.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use conelab::cross_section::{ConeModel, CrossSectionSpec};
use conelab::harness::scans::{self, LpScan, ScanOutput, Table};
use conelab::specfun::check_envelopes;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(n: u32, budget_s: f64, body: impl FnOnce() -> (bool, String)) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let (ok, detail) = body();
    let secs = start.elapsed().as_secs_f64();
    let pass = ok && secs < budget_s;
    let line = format!("criterion {n}: {} {detail}; runtime {secs:.1} s (limit {budget_s} s)\n", if pass { "PASS" } else { "FAIL" });
    // straight to the stream, so the line shows even when output is captured
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}; runtime {secs:.1} s");
}

fn torus(a: f64) -> ConeModel {
    ConeModel::new(3, CrossSectionSpec::torus(&[1.0, 1.0]).unwrap(), a).unwrap()
}

fn sphere(radius: f64) -> ConeModel {
    ConeModel::new(3, CrossSectionSpec::sphere(2, radius).unwrap(), 0.0).unwrap()
}

fn extra(o: &ScanOutput, key: &str) -> f64 {
    o.verdict.extra[key]
}

/// Largest value of `column` over the table rows whose first column is `check`.
fn worst(t: &Table, check: &str, column: usize) -> f64 {
    t.rows.iter().filter(|r| r[0] == check).map(|r| r[column].parse::<f64>().unwrap()).fold(0.0, f64::max)
}

#[test]
fn criterion_01_weber_identity() {
    criterion(1, 30.0, || {
        let o = scans::weber_scan(1e-10).unwrap();
        let max = o.verdict.constant.unwrap();
        (max <= 1e-7, format!("max residual {max:.2e} over {} cases ({} outside the envelope)", extra(&o, "cases"), extra(&o, "skipped")))
    });
}

#[test]
fn criterion_02_representation_equivalence() {
    criterion(2, 120.0, || {
        let o = scans::representation_scan(&torus(0.0), 1e-9).unwrap();
        let d = o.verdict.constant.unwrap();
        (o.verdict.pass && d <= 1e-6, format!("max |series - integral|·|t|^(n/2) = {d:.2e} on {} samples", o.table.rows.len()))
    });
}

#[test]
fn criterion_03_small_z_slope() {
    criterion(3, 60.0, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for a in [0.0, 0.3125] {
            let m = torus(a);
            let o = scans::small_z_scan(&m, [1e-3, 0.5], 30, 1e-10).unwrap();
            let s = o.verdict.slope.unwrap();
            ok &= (s - m.nu0).abs() <= 0.05;
            parts.push(format!("a={a}: slope {s:.4} vs nu0 {}", m.nu0));
        }
        (ok, parts.join(", "))
    });
}

#[test]
fn criterion_04_large_z_boundedness() {
    criterion(4, 600.0, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, m) in [("torus(1,1)", torus(0.0)), ("sphere 1.5", sphere(1.5))] {
            let o = scans::large_z_scan(&m, [5.0, 100.0], 400, 20, 250.0, 1e-9, 3.0, 0.15).unwrap();
            let (spread, s) = (extra(&o, "spread"), o.verdict.slope.unwrap());
            ok &= spread <= 3.0 && s.abs() <= 0.15;
            parts.push(format!("{name}: max/min {spread:.3}, slope {s:.3}"));
        }
        (ok, parts.join(", "))
    });
}

#[test]
fn criterion_05_halfwave_decay() {
    criterion(5, 600.0, || {
        let o = scans::halfwave_scan(&torus(0.0), &[1, 2, 3], [1.0, 64.0], 7, 1e-8, 0.15).unwrap();
        let slopes: Vec<f64> = (1..=3).map(|j| extra(&o, &format!("slope_j{j}"))).collect();
        let ok = slopes.iter().all(|s| (s + 1.0).abs() <= 0.15);
        (ok, format!("slopes {slopes:.3?} vs -1 ± 0.15, max kernel/bound {:.3}", o.verdict.max_ratio.unwrap()))
    });
}

#[test]
fn criterion_06_poisson_decay() {
    criterion(6, 60.0, || {
        let o = scans::poisson_scan(&torus(0.0), &[[0.1, 2.0 * PI], [2.0 * PI, 30.0]], 12, 1e-9).unwrap();
        let (s0, s1) = (extra(&o, "slope_segment0"), extra(&o, "slope_segment1"));
        let ok = s0 <= -0.5 + 0.2 && s1 <= -2.0 + 0.2;
        (ok, format!("slope {s0:.3} on [0.1, 2pi] (need <= -0.3), {s1:.3} on [2pi, 30] (need <= -1.8)"))
    });
}

#[test]
fn criterion_07_hankel_unitarity() {
    criterion(7, 30.0, || {
        let t = scans::hankel_checks(&torus(0.0), &[0.5, 1.0, 2.3]).unwrap();
        let (norm, inv) = (worst(&t, "norm_ratio", 4), worst(&t, "double_transform", 4));
        (norm <= 1e-6 && inv <= 1e-6, format!("max |ratio - 1| {norm:.2e}, max double-transform deviation {inv:.2e}"))
    });
}

#[test]
fn criterion_08_weyl_law() {
    criterion(8, 10.0, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, m) in [("sphere 1", sphere(1.0)), ("torus(1,1)", torus(0.0))] {
            let o = scans::spectrum_scan(&m, 500, 0.08).unwrap();
            let s = o.verdict.slope.unwrap();
            ok &= (s - 1.0).abs() <= 0.08;
            parts.push(format!("{name}: weyl slope {s:.4}"));
        }
        (ok, parts.join(", "))
    });
}

#[test]
fn criterion_09_bessel_envelopes() {
    criterion(9, 60.0, || {
        let c = check_envelopes(30.0, 100.0, 0.1);
        (c.violations == 0, format!("{} violations in {} checks, worst |J|/envelope {:.4}", c.violations, c.points, c.worst_ratio))
    });
}

#[test]
fn criterion_10_littlewood_paley() {
    criterion(10, 300.0, || {
        let m = torus(0.0);
        let lp = |functions| LpScan { j_window: [-6, 8], band_range: [-3, 5], functions, data_nu_max: 1.2, seed: 0 };
        let part = scans::partition_error();
        let b = scans::bernstein_scan(&m, &lp(20), [-2, 4], 4.0, 2.0, 10.0).unwrap();
        let s = scans::square_scan(&m, &lp(40), 4.0).unwrap();
        let (spread, change) = (b.verdict.max_ratio.unwrap(), extra(&s, "window_change"));
        let ok = part <= 1e-10 && spread <= 10.0 && change < 0.1;
        (ok, format!("partition error {part:.1e}, Bernstein max/min {spread:.3}, square-function window change {:.2}%", 100.0 * change))
    });
}

#[test]
fn criterion_11_schrodinger_flow_unitarity() {
    criterion(11, 120.0, || {
        let t = scans::flow_checks(&torus(0.0), 0, 5, 2.0).unwrap();
        let dev = worst(&t, "flow_norm_ratio", 4);
        let runs = t.rows.len();
        (runs == 10 && dev <= 1e-5, format!("max |ratio - 1| {dev:.2e} over {runs} (f, t) runs"))
    });
}
