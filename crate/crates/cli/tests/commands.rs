use std::process::Command;

use regge_cli::commands;
use regge_cli::csv::Table;
use regge_cli::RunConfig;

fn regge(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_regge")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn write_config(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("regge-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn classify_presets() {
    let (code, out, _) = regge(&["classify", "--preset", "fig2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("(I) Regge trajectory related to a bound state.\n"), "{out}");
    assert!(out.contains("type=I bound-correlated, E0=-1.3"), "{out}");
    let (code, out, _) = regge(&["--preset", "fig3", "classify"]);
    assert_eq!(code, 0);
    assert!(out.contains("type=II metastable-correlated, E0=4.7"), "{out}");
}

#[test]
fn malformed_config_exits_1() {
    let path = write_config("bad.conf", "model.d = 1.0\n");
    let (code, out, err) = regge(&["classify", "--config", &path]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("d = 1"), "{err}");
    let (code, _, _) = regge(&["classify", "--config", "/nonexistent/regge.conf"]);
    assert_eq!(code, 1);
    let path = write_config("neg.conf", "energy.min = -1\nenergy.max = 2\n");
    assert_eq!(regge(&["decompose", "--config", &path]).0, 1);
}

#[test]
fn lost_seed_exits_2() {
    let path = write_config("lost.conf", "energy.min = 5\nenergy.max = 6\nenergy.count = 2\nseeds.lambda = 45+19.5i\n");
    let (code, out, err) = regge(&["trajectory", "--config", &path]);
    assert_eq!(code, 2, "{err}");
    assert!(out.is_empty());
}

#[test]
fn empty_region_is_header_only() {
    let path = write_config("empty.conf", "energy.min = 5\nenergy.max = 5.5\nenergy.count = 2\nscan.re_min = 30\nscan.re_max = 31\n");
    let (code, out, _) = regge(&["poles", "--config", &path]);
    assert_eq!(code, 0);
    assert_eq!(out, "E,Re_lambda,Im_lambda,Re_rho,Im_rho,winding_checksum\n");
}

#[test]
fn output_file_and_thread_count_leave_bytes_unchanged() {
    let path = write_config("det.conf", "energy.min = 5\nenergy.max = 7\nenergy.count = 3\n");
    let out_path = write_config("det.csv", "");
    let (code, stdout1, _) = regge(&["poles", "--config", &path, "--threads", "1"]);
    assert_eq!(code, 0);
    let (code, stdout2, _) = regge(&["poles", "--config", &path, "--threads", "2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout1, stdout2);
    let (code, stdout3, _) = regge(&["poles", "--config", &path, "--out", &out_path]);
    assert_eq!(code, 0);
    assert!(stdout3.is_empty());
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), stdout1);
}

#[test]
fn poles_at_fixed_energy() {
    let cfg = RunConfig::parse("energy.min = 5\nenergy.max = 5.001\nenergy.count = 2\n").unwrap();
    let t = Table::parse(&commands::cmd_poles(&cfg).unwrap()).unwrap();
    assert!(t.rows.len() >= 2);
    let im = t.column("Im_lambda").unwrap();
    assert!(im.iter().any(|&v| v > 0.01 && v < 0.03), "{im:?}");
    let re = t.column("Re_lambda").unwrap();
    let e = t.column("E").unwrap();
    for w in 0..re.len() - 1 {
        if e[w] == e[w + 1] {
            assert!(re[w] <= re[w + 1], "rows sorted by Re_lambda");
        }
    }
}

/// Winding numbers add, so splitting the region finds the same poles.
#[test]
fn split_region_union() {
    let base = "energy.min = 5\nenergy.max = 8\nenergy.count = 2\nscan.im_max = 2\n";
    let whole = RunConfig::parse(&format!("{base}scan.re_min = 0\nscan.re_max = 12\n")).unwrap();
    let left = RunConfig::parse(&format!("{base}scan.re_min = 0\nscan.re_max = 5.13\n")).unwrap();
    let right = RunConfig::parse(&format!("{base}scan.re_min = 5.13\nscan.re_max = 12\n")).unwrap();
    let rows = |c: &RunConfig| Table::parse(&commands::cmd_poles(c).unwrap()).unwrap().rows;
    let all = rows(&whole);
    let mut parts: Vec<Vec<f64>> = rows(&left).into_iter().chain(rows(&right)).collect();
    parts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    assert_eq!(all.len(), parts.len());
    for (a, b) in all.iter().zip(&parts) {
        for i in 0..5 {
            assert!((a[i] - b[i]).abs() <= 1e-9 * a[i].abs().max(1.0), "{a:?} vs {b:?}");
        }
    }
    let w = |r: &[Vec<f64>]| r.first().map(|x| x[5]).unwrap_or(0.0);
    assert_eq!(w(&all), w(&rows(&left)) + w(&rows(&right)));
}

#[test]
fn tiny_span_gives_two_close_rows() {
    let cfg = RunConfig::parse("model.omega = 32.5\nenergy.min = 60\nenergy.max = 60.0001\nenergy.count = 2\nseeds.level = metastable:0\n")
        .unwrap();
    let t = Table::parse(&commands::cmd_trajectory(&cfg).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2);
    for i in 1..5 {
        assert!((t.rows[0][i] - t.rows[1][i]).abs() < 1e-3 * t.rows[0][i].abs().max(1e-3));
    }
}

#[test]
fn trajectory_is_deterministic_and_type_two_stays_above_axis() {
    let cfg = RunConfig::parse("model.omega = 32.5\nenergy.min = 20\nenergy.max = 90\nenergy.count = 15\nseeds.level = metastable:0\n")
        .unwrap();
    let a = commands::cmd_trajectory(&cfg).unwrap();
    assert_eq!(a, commands::cmd_trajectory(&cfg).unwrap());
    let t = Table::parse(&a).unwrap();
    assert_eq!(t.columns, commands::TRAJECTORY_COLUMNS);
    assert!(t.column("Im_lambda").unwrap().iter().all(|&v| v > 0.0));
}

#[test]
fn stiff_shell_decomposition_is_hard_sphere() {
    let cfg = RunConfig::parse("model.omega = 1e8\nenergy.min = 1\nenergy.max = 20\nenergy.count = 3\n").unwrap();
    let t = Table::parse(&commands::cmd_decompose(&cfg).unwrap()).unwrap();
    assert_eq!(t.columns, commands::DECOMPOSE_COLUMNS);
    for (s, h) in t.column("sigma_total").unwrap().iter().zip(t.column("sigma_hard_R").unwrap()) {
        assert!((s - h).abs() < 1e-4 * h, "{s} vs {h}");
    }
}

#[test]
fn verify_report_passes() {
    let text = commands::cmd_verify(&RunConfig::default()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(regge_core::verify::OracleReport::CSV_HEADER));
    assert!(lines.all(|l| l.ends_with(",true")));
}
