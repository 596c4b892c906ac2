//! Bundled presets against reference values, plus output-format checks.

use std::time::Duration;

use num_complex::Complex64;
use resonax::config::{Format, Precision, RunConfig};
use resonax::output::{csv_header, emit_table, figure_data};
use resonax::presets;
use resonax::run::{run, solve, RunReport, SectorReport, Timing};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn preset(name: &str) -> RunConfig {
    presets::load(name).unwrap()
}

fn param(s: &SectorReport, m: usize, name: &str) -> Complex64 {
    let k = s.params.iter().position(|p| p == name).unwrap();
    s.rung(m).unwrap().param(k)
}

fn assert_near(what: &str, got: Complex64, want: Complex64, tol: f64) {
    let d = (got - want).norm();
    assert!(d < tol, "{what}: got {got}, want {want}, |diff| {d:e} >= {tol:e}");
}

/// Stabilized row of rung `m` nearest `(e, gamma)`.
fn row(s: &SectorReport, m: usize, e: f64, gamma: f64) -> (f64, f64) {
    s.resonances_at(m)
        .map(|r| (r.e, r.gamma))
        .min_by(|a, b| ((a.0 - e).hypot(a.1 - gamma)).total_cmp(&(b.0 - e).hypot(b.1 - gamma)))
        .unwrap_or_else(|| panic!("no stabilized rows at M={m}"))
}

/// Number of leading characters two decimal strings share.
fn shared_prefix(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count()
}

#[test]
fn quartic_frequencies_follow_table1() {
    let r = run(&preset("quartic-table1")).unwrap();
    let s = r.sector("even").unwrap();
    for (m, w) in [(20, c(0.723, -0.754)), (25, c(0.759, -0.853)), (30, c(0.791, -0.937)), (35, c(0.821, -1.010))] {
        assert_near(&format!("Omega at M={m}"), param(s, m, "omega"), w, 1e-3);
    }
    let (e2, g2) = row(s, 35, 2.393167523963263, 2.842626e-9);
    assert!((e2 - 2.3931675239632628).abs() < 1e-13, "E2 {e2}");
    assert!((g2 - 2.842626078391486e-9).abs() < 1e-15, "Gamma2 {g2:e}");
}

#[test]
fn quartic_extended_carries_the_long_digits() {
    let r = run(&preset("quartic-extended")).unwrap();
    let s = r.sector("even").unwrap();
    let ground = s.resonances_at(35).find(|x| x.index == 0).unwrap();
    let e = ground.e_text.as_deref().unwrap();
    assert!(shared_prefix(e, "0.49221383488262770042136241897612033") >= 32, "E0 {e}");
    let g = ground.gamma_text.as_deref().unwrap();
    assert!(g.starts_with("5.1093948883946272"), "Gamma0 {g}");
    let second = s.resonances_at(35).find(|x| x.index == 1).unwrap();
    let e2 = second.e_text.as_deref().unwrap();
    assert!(shared_prefix(e2, "2.39316752396326281772183026343") >= 28, "E2 {e2}");
}

#[test]
fn sextic_matches_table3() {
    let r = run(&preset("sextic-table3")).unwrap();
    let s = r.sector("even").unwrap();
    let table = [
        (10, c(0.5159, -1.7799)),
        (20, c(0.5163, -2.5792)),
        (30, c(0.5163, -3.1840)),
        (40, c(0.5164, -3.6909)),
        (50, c(0.5164, -4.1363)),
    ];
    for (m, w) in table {
        assert_near(&format!("Omega at M={m}"), param(s, m, "omega"), w, 1.5e-4);
    }
    let (e0, g0) = row(s, 50, 0.40780397907366957, 0.029400216892153486);
    assert!((e0 - 0.407_803_979_073_669_55).abs() < 1e-15);
    assert!((g0 - 0.029_400_216_892_153_486).abs() < 1e-15);
}

#[test]
fn cubic_extended_matches_table4() {
    // Binary64 loses the ground-state width past M = 40; the extended tier
    // carries every printed digit out to M = 60.
    let mut cfg = preset("cubic-table4");
    cfg.precision = Precision::Extended { digits: 40 };
    let r = run(&cfg).unwrap();
    let s = r.sector("all").unwrap();
    let table = [
        (50, "0.4843159970041175430", "0.00001612041900013357"),
        (60, "0.484315997004117543023", "0.0000161204190001335639"),
    ];
    for (m, e_want, g_want) in table {
        let ground = s.resonances_at(m).find(|x| x.index == 0).unwrap();
        let e = ground.e_text.as_deref().unwrap();
        assert!(shared_prefix(e, e_want) >= e_want.len() - 1, "E0 at M={m}: {e}");
        let g: f64 = ground.gamma_text.as_deref().unwrap().parse().unwrap();
        let g_want: f64 = g_want.parse().unwrap();
        assert!((g - g_want).abs() < 1e-20, "Gamma0 at M={m}: {g:e}");
    }
    assert_near("t at M=60", param(s, 60, "t"), c(-0.25, -3.86), 1e-2);
}

#[test]
fn gaussian_quartic_widths_follow_table5() {
    let r = run(&preset("gauss-quartic-table5")).unwrap();
    let even = r.sector("even").unwrap();
    let odd = r.sector("odd").unwrap();
    let table = [
        (20, c(5.114, 2.888), c(5.155, 2.915)),
        (30, c(5.840, 3.348), c(5.872, 3.367)),
        (40, c(6.427, 3.699), c(6.454, 3.715)),
        (50, c(6.924, 3.989), c(6.947, 4.003)),
    ];
    for (m, l_even, l_odd) in table {
        assert_near(&format!("even L at M={m}"), param(even, m, "L"), l_even, 1e-3);
        assert_near(&format!("odd L at M={m}"), param(odd, m, "L"), l_odd, 1e-3);
    }
    let (e0, g0) = row(even, 50, -4.566565509377719, 0.01770689410542862);
    assert!((e0 + 4.566_565_509_377_718).abs() < 1e-13, "E0 {e0}");
    assert!((g0 - 0.017_706_894_105_428_62).abs() < 1e-13, "Gamma0 {g0}");
    let (e1, g1) = row(odd, 50, -3.838103508910883, 0.2743215904678811);
    assert!((e1 + 3.838_103_508_910_882_6).abs() < 1e-13, "E1 {e1}");
    assert!((g1 - 0.274_321_590_467_881_1).abs() < 1e-13, "Gamma1 {g1}");
}

#[test]
fn narrow_gaussian_quartic_follows_table5a() {
    let r = run(&preset("gauss-quartic-table5a")).unwrap();
    let even = r.sector("even").unwrap();
    let odd = r.sector("odd").unwrap();
    for (m, l_even, l_odd) in [(20, c(7.202, 4.098), c(7.264, 4.135)), (50, c(9.788, 5.630), c(9.821, 5.649))] {
        assert_near(&format!("even L at M={m}"), param(even, m, "L"), l_even, 1e-3);
        assert_near(&format!("odd L at M={m}"), param(odd, m, "L"), l_odd, 1e-3);
    }
    let (e1, g1) = row(odd, 50, -3.623316934353134, 6.769098760765691e-5);
    assert!((e1 + 3.623_316_934_353_134).abs() < 1e-13, "E1 {e1}");
    assert!((g1 - 6.769_098_760_765_692e-5).abs() < 1e-14, "Gamma1 {g1:e}");
}

#[test]
fn mexican_hat_frequencies_follow_table6() {
    let r = run(&preset("mexican-hat-table6")).unwrap();
    let l0 = r.sector("l=0").unwrap();
    let l1 = r.sector("l=1").unwrap();
    let table = [
        (10, c(0.8982, -1.1917), c(0.9095, -1.2172)),
        (15, c(1.0000, -1.4142), c(1.0090, -1.4333)),
        (20, c(1.0832, -1.5874), c(1.0907, -1.6029)),
        (25, c(1.1545, -1.7316), c(1.1611, -1.7448)),
        (30, c(1.2174, -1.8564), c(1.2233, -1.8681)),
    ];
    for (m, w0, w1) in table {
        assert_near(&format!("l=0 Omega at M={m}"), param(l0, m, "omega"), w0, 1.5e-4);
        assert_near(&format!("l=1 Omega at M={m}"), param(l1, m, "omega"), w1, 1.5e-4);
    }
}

#[test]
fn bardsley_extended_matches_table7() {
    let r = run(&preset("bardsley-table7")).unwrap();
    let s = r.sector("l=0").unwrap();
    let (e0, g0) = row(s, 180, 3.4263903101482505, 0.025548961185791);
    assert!((e0 - 3.4263903101482505).abs() < 1e-14, "E0 {e0}");
    assert!((g0 - 0.025548961185791).abs() < 1e-14, "Gamma0 {g0}");
    let (e8, g8) = row(s, 160, -3.754144122, 40.00901499);
    assert!((e8 + 3.754144122607).abs() < 1e-8 && (g8 - 40.0090149933).abs() < 1e-8, "E8 {e8} {g8}");
    let (e9, g9) = row(s, 180, -6.800303886379, 45.52631015);
    assert!((e9 + 6.800303886379).abs() < 1e-8 && (g9 - 45.52631015).abs() < 1e-7, "E9 {e9} {g9}");
    for (m, l) in [(100, c(-0.841, 6.661)), (140, c(-1.319, 6.920)), (180, c(-1.680, 7.102))] {
        assert_near(&format!("L at M={m}"), param(s, m, "L"), l, 1e-3);
    }
}

#[test]
fn figure_segments_sit_at_the_resonance_energies() {
    let cfg = preset("quartic-figure1");
    let r = run(&cfg).unwrap();
    let fig = figure_data(&cfg, &r).unwrap();
    let mut heights: Vec<(String, f64)> = fig
        .sectors
        .iter()
        .flat_map(|s| s.segments.iter().map(|g| (g.sector.clone(), g.height)))
        .collect();
    heights.sort_by(|a, b| a.1.total_cmp(&b.1));
    assert_eq!(heights[0].0, "even");
    assert!((heights[0].1 - 0.4922).abs() < 1e-4);
    assert_eq!(heights[1].0, "odd");
    assert!((heights[1].1 - 1.47).abs() < 1e-2);
    assert_eq!(heights[2].0, "even");
    assert!((heights[2].1 - 2.3932).abs() < 1e-4);
    for s in &fig.sectors {
        assert_eq!(s.samples.len(), 401);
        assert_eq!(s.samples.first().unwrap()[0], -8.0);
        for g in &s.segments {
            assert!(g.x_left < 0.0 && 0.0 < g.x_right && g.x_left < g.x_right);
        }
    }
}

#[test]
fn half_line_figure_samples_the_potential() {
    let cfg = preset("bardsley-table7");
    let empty = RunReport {
        potential: String::new(),
        basis: String::new(),
        precision: String::new(),
        sectors: Vec::new(),
        timing: Timing(Duration::ZERO),
    };
    let fig = figure_data(&cfg, &empty).unwrap();
    let s = &fig.sectors[0];
    assert_eq!(s.samples.len(), 400);
    assert!(s.samples[0][0] > 0.0);
    let [x, v] = s.samples[39];
    assert_eq!(x, 2.0);
    // 7.5 x² e^{-x} at x = 2.
    assert!((v - 30.0 * (-2.0f64).exp()).abs() < 1e-12, "V(2) = {v}");
    assert!(s.segments.is_empty());
}

#[test]
fn json_round_trips() {
    let r = run(&preset("mexican-hat-table6")).unwrap();
    let mut buf = Vec::new();
    emit_table(&r, Format::Json, &mut buf).unwrap();
    let back: RunReport = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back, r);
}

#[test]
fn csv_output_is_deterministic() {
    let cfg = preset("quartic-table1");
    let bytes = || {
        let mut buf = Vec::new();
        emit_table(&run(&cfg).unwrap(), Format::Csv, &mut buf).unwrap();
        buf
    };
    let first = bytes();
    assert_eq!(first, bytes());
    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "M,omega_re,omega_im,n,E,Gamma,converged_digits");
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        let digits: f64 = fields[6].parse().unwrap();
        assert!(digits > 0.0);
    }
}

#[test]
fn empty_report_writes_only_the_header() {
    let empty = RunReport {
        potential: "quartic".into(),
        basis: "ho".into(),
        precision: "double".into(),
        sectors: Vec::new(),
        timing: Timing(Duration::ZERO),
    };
    let mut buf = Vec::new();
    emit_table(&empty, Format::Csv, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), csv_header(&[]).join(",") + "\n");
}

#[test]
fn single_solve_lists_every_eigenvalue() {
    let r = solve(&preset("quartic-table1"), 20).unwrap();
    let s = r.sector("even").unwrap();
    assert_eq!(s.rungs.len(), 1);
    assert_eq!(s.resonances.len(), 20);
    assert!(s.resonances.iter().all(|x| x.m == 20 && x.converged_digits.is_none()));
    let ground = s.resonances.iter().find(|x| x.index == 0).unwrap();
    assert!((ground.e - 0.4922138348826277).abs() < 1e-12);
}

#[test]
fn harmonic_box_has_no_widths() {
    let cfg = RunConfig::from_toml_str(
        "problem.potential = \"harmonic\"\nbasis.family = \"trig\"\nladder.M = [20, 30, 40]\n",
    )
    .unwrap();
    let r = run(&cfg).unwrap();
    for s in &r.sectors {
        assert!(!s.resonances.is_empty());
        for x in &s.resonances {
            assert!(x.gamma.abs() < 1e-10, "{} n={} Gamma {}", s.sector, x.index, x.gamma);
        }
    }
    let even = r.sector("even").unwrap();
    let ground = even.resonances_at(40).find(|x| x.index == 0).unwrap();
    assert!((ground.e - 0.5).abs() < 1e-10);
}
