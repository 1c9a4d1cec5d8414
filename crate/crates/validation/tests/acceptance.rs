//! Acceptance criteria 1-10. Every criterion runs and prints one line;
//! the process exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use regge_cli::commands::{self, DecomposeRow};
use regge_cli::csv::Table;
use regge_cli::RunConfig;
use regge_core::cylinder::{self, HankelKind};
use regge_core::model::{self, PotentialParams};
use regge_core::poles::{ReggePole, TrajectoryKind};
use regge_core::verify;
use regge_core::xsec::{self, XsecSettings};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn both_sets() -> [PotentialParams; 2] {
    [PotentialParams::fig2(), PotentialParams::fig3()]
}

const ENERGIES: [f64; 5] = [0.5, 2.0, 8.0, 20.0, 50.0];

fn lambda_grid() -> impl Iterator<Item = f64> {
    (0..40).map(|i| 0.5 + i as f64)
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let reports = verify::cylinder_battery(100, 20_260_101, 1e-10);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let worst = reports.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let n = reports.len();

    // Wronskian and reflection on a 20 x 20 sweep of the domain box. The
    // Wronskian error is measured against the size of the two products,
    // since that is the cancellation any evaluation of the identity faces.
    let (mut wr, mut rf, mut missing) = (0.0f64, 0.0f64, 0);
    for i in 0..20 {
        for j in 0..20 {
            let nu = c(-47.3 + 4.97 * i as f64, -18.7 + 1.97 * ((i * 7 + j * 3) % 20) as f64);
            let z = Complex64::from_polar(0.3 + 3.1 * j as f64, -1.4 + 0.147 * ((i * 3 + j * 11) % 20) as f64);
            let (Ok((h1, h2)), Ok((m1, m2))) = (cylinder::hankel_pair(nu, z), cylinder::hankel_pair(-nu, z)) else {
                missing += 1;
                continue;
            };
            let w = h1.value * h2.deriv_arg - h1.deriv_arg * h2.value;
            let want = c(0.0, -4.0) / (PI * z);
            let scale = want.norm().max((h1.value * h2.deriv_arg).norm() + (h1.deriv_arg * h2.value).norm());
            wr = wr.max((w - want).norm() / scale);
            rf = rf.max(rel(m1.value, (Complex64::i() * nu * PI).exp() * h1.value));
            rf = rf.max(rel(m2.value, (-Complex64::i() * nu * PI).exp() * h2.value));
        }
    }

    let mut closed = 0.0f64;
    for z in [c(0.3, 0.0), c(1.0, 0.0), c(7.5, 0.0), c(2.0, 1.5), c(20.0, -3.0)] {
        let pre = (2.0 / (PI * z)).sqrt();
        let eiz = (Complex64::i() * z).exp();
        let h1 = |o: f64| cylinder::hankel(HankelKind::First, c(o, 0.0), z).unwrap().value;
        let h2 = |o: f64| cylinder::hankel(HankelKind::Second, c(o, 0.0), z).unwrap().value;
        closed = closed
            .max(rel(cylinder::bessel_j(c(0.5, 0.0), z).unwrap(), pre * z.sin()))
            .max(rel(cylinder::bessel_j(c(-0.5, 0.0), z).unwrap(), pre * z.cos()))
            .max(rel(h1(0.5), -Complex64::i() * pre * eiz))
            .max(rel(h2(0.5), Complex64::i() * pre / eiz))
            .max(rel(h1(1.5), -pre * eiz * (1.0 + Complex64::i() / z)));
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        failed == 0 && wr < 1e-10 && rf < 1e-10 && missing == 0 && closed < 1e-12 && secs < 10.0,
        format!(
            "oracle {n} points, {failed} failed, worst {worst:.1e}; wronskian {wr:.1e}, reflection {rf:.1e}, {missing} unevaluated; closed forms {closed:.1e}; {secs:.1} s"
        ),
    )
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut errors = 0;
    for p in both_sets() {
        for e in ENERGIES {
            for l in lambda_grid() {
                match model::s_matrix_real(&p, e, c(l, 0.0)) {
                    Ok(s) => worst = worst.max((s.norm() - 1.0).abs()),
                    Err(_) => errors += 1,
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(worst < 1e-9 && errors == 0 && secs < 30.0, format!("max ||S|-1| = {worst:.1e}, {errors} errors, {secs:.1} s"))
}

fn criterion_3() -> Outcome {
    let (mut free, mut stiff, mut errors) = (0.0f64, 0.0f64, 0);
    for p in both_sets() {
        let free_p = PotentialParams::new(0.0, p.r, p.d, 0.0).expect("valid");
        let stiff_p = p.with_omega(1e8);
        for e in ENERGIES {
            let k = c((2.0 * e).sqrt(), 0.0);
            for l in lambda_grid() {
                let l = c(l, 0.0);
                let pairs = [
                    (model::s_matrix_real(&free_p, e, l), model::hard_sphere_s_matrix(k, p.r - p.d, l), &mut free),
                    (model::s_matrix_real(&stiff_p, e, l), model::hard_sphere_s_matrix(k, p.r, l), &mut stiff),
                ];
                for (got, want, acc) in pairs {
                    match (got, want) {
                        (Ok(g), Ok(w)) => *acc = acc.max(rel(g, w)),
                        _ => errors += 1,
                    }
                }
            }
        }
    }
    outcome(
        free < 1e-6 && stiff < 1e-4 && errors == 0,
        format!("free-core limit {free:.1e} (tol 1e-6), stiff-shell limit {stiff:.1e} (tol 1e-4), {errors} errors"),
    )
}

fn criterion_4() -> Outcome {
    let points: Vec<(f64, f64)> = ENERGIES.iter().flat_map(|&e| [0.5, 1.7, 4.5, 9.3].map(|l| (e, l))).collect();
    let mut reports = Vec::new();
    for p in both_sets() {
        reports.extend(verify::ode_battery(&p, &points, 1e-8));
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let worst = reports.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    outcome(failed == 0, format!("{} points, {failed} failed, worst {worst:.1e} (tol 1e-8)", reports.len()))
}

fn ten_samples(samples: &[ReggePole]) -> Vec<ReggePole> {
    let n = samples.len();
    (0..10).map(|i| samples[i * (n - 1) / 9]).collect()
}

fn criterion_5() -> Outcome {
    let mut reports = Vec::new();
    let mut notes = Vec::new();
    for name in ["fig2", "fig3"] {
        let cfg = RunConfig::preset(name).expect("preset");
        match commands::trajectory_samples(&cfg) {
            Ok((samples, _)) => reports.extend(verify::residue_battery(&cfg.model, &ten_samples(&samples), 1e-8)),
            Err((_, e)) => notes.push(format!("{name}: {e}")),
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let worst = reports.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    outcome(
        failed == 0 && notes.is_empty() && reports.len() == 20,
        format!("{} poles, {failed} failed, worst {worst:.1e} (tol 1e-8) {}", reports.len(), notes.join("; ")),
    )
}

fn closure_runs() -> Vec<(PotentialParams, Result<xsec::MulhollandDecomposition, String>)> {
    let settings = XsecSettings::default();
    let mut out = Vec::new();
    for p in both_sets() {
        for i in 0..25 {
            let e = 0.5 + (50.0 - 0.5) * i as f64 / 24.0;
            out.push((p, xsec::decompose(&p, e, &settings).map(|(d, _)| d).map_err(|err| format!("E={e}: {err}"))));
        }
    }
    out
}

fn criterion_6(runs: &[(PotentialParams, Result<xsec::MulhollandDecomposition, String>)]) -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for (_, r) in runs {
        match r {
            Ok(d) => worst = worst.max(d.relative_closure_defect()),
            Err(e) => errors.push(e.clone()),
        }
    }
    outcome(
        worst < 1e-5 && errors.is_empty(),
        format!("{} energies, worst closure defect {worst:.1e} (tol 1e-5) {}", runs.len(), errors.join("; ")),
    )
}

fn criterion_7(runs: &[(PotentialParams, Result<xsec::MulhollandDecomposition, String>)]) -> Outcome {
    let settings = XsecSettings::default();
    let (mut shift, mut rearr) = (0.0f64, 0.0f64);
    for (_, d) in runs.iter().filter_map(|(p, r)| r.as_ref().ok().map(|d| (p, d))) {
        let scale = d.sigma_total.abs();
        shift = shift.max((d.sigma_res_mod - d.sigma_res - d.n0_moved).abs() / scale);
        rearr = rearr.max((d.sigma1_mod + d.sigma_res_mod - d.sigma1 - d.sigma_res).abs() / scale);
    }
    let p = PotentialParams::fig3();
    let mut contour = 0.0f64;
    let mut errors = Vec::new();
    for e in [50.0, 62.0, 74.0, 86.0, 98.0] {
        let attempt = xsec::decompose(&p, e, &settings).map_err(|err| err.to_string()).and_then(|(d, poles)| {
            let moved = xsec::moved_poles(&poles, &settings);
            verify::deformed_contour_sigma1_oracle(&p, e, &moved, verify::DEFAULT_DETOUR)
                .or_else(|_| verify::deformed_contour_sigma1_oracle(&p, e, &moved, 0.5 * verify::DEFAULT_DETOUR))
                .map(|o| (o - d.sigma1_mod).abs() / o.abs())
                .map_err(|err| err.to_string())
        });
        match attempt {
            Ok(r) => contour = contour.max(r),
            Err(err) => errors.push(format!("E={e}: {err}")),
        }
    }
    outcome(
        shift < 1e-12 && rearr < 1e-12 && contour < 1e-6 && errors.is_empty(),
        format!(
            "n=0 shift {shift:.1e}, rearrangement {rearr:.1e} (tol 1e-12); deformed contour {contour:.1e} (tol 1e-6) {}",
            errors.join("; ")
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, want) in [("fig2", TrajectoryKind::BoundCorrelated), ("fig3", TrajectoryKind::MetastableCorrelated)] {
        let cfg = RunConfig::preset(name).expect("preset");
        let text = match commands::cmd_classify(&cfg) {
            Ok(t) => t,
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
                continue;
            }
        };
        let class = commands::classify(&cfg).expect("classified above");
        let geometry = match want {
            TrajectoryKind::BoundCorrelated => class.e0 < 0.0 && class.gamma.abs() < 1e-9,
            TrajectoryKind::MetastableCorrelated => class.e0 > 0.0 && class.gamma > 0.0,
        };
        let heading = text.lines().next() == Some(want.heading());
        ok &= class.kind == want && geometry && heading;
        parts.push(format!("{name}: {} E0={:.4} gamma={:.2e}", class.kind.label(), class.e0, class.gamma));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let cfg = RunConfig::preset("fig2").expect("preset");
    let (samples, e0) = match commands::trajectory_samples(&cfg) {
        Ok(v) => v,
        Err((_, e)) => return outcome(false, e.to_string()),
    };
    let mut worst = (0.0f64, f64::NAN);
    let mut n = 0;
    for s in samples.iter().filter(|s| s.e > e0 && s.e < 0.0) {
        let est = regge_core::poles::centrifugal_estimate(&cfg.model, s.e, e0).re;
        let r = (s.lambda.re - est).abs() / est;
        n += 1;
        if r > worst.0 {
            worst = (r, s.e);
        }
    }
    outcome(
        n > 0 && worst.0 < 0.05,
        format!("{n} samples in (E0, 0) with E0 = {e0:.4}; worst relative deviation {:.2}% at E = {:.2} (tol 5%)", 100.0 * worst.0, worst.1),
    )
}

fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

fn argmax_abs(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).expect("non-empty")
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).expect("non-empty")
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["fig4", "fig5"] {
        let cfg = RunConfig::preset(name).expect("preset");
        let rows: Vec<DecomposeRow> = match commands::decompose_rows(&cfg) {
            Ok(r) => r,
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
                continue;
            }
        };
        let table = Table::parse(&commands::decompose_table(&rows).render()).expect("own CSV parses");
        let col = |c: &str| table.column(c).expect("column present");
        let (tv_orig, tv_mod) = (total_variation(&col("direct_orig")), total_variation(&col("direct_mod")));
        let a = tv_mod < tv_orig;
        // Im of the preset's trajectory on the same grid
        let b = match commands::trajectory_samples(&cfg) {
            Ok((traj, _)) if traj.len() == table.rows.len() => {
                let im: Vec<f64> = traj.iter().map(|s| s.lambda.im).collect();
                let at_min = argmin(&im);
                let energies = col("E");
                let mut fine = true;
                let mut peaks = Vec::new();
                for n in ["sigma_res_n1", "sigma_res_n2"] {
                    let at_max = argmax_abs(&col(n));
                    fine &= at_max.abs_diff(at_min) <= 1;
                    peaks.push(format!("{n} peak E={:.2}", energies[at_max]));
                }
                parts.push(format!("{name}: min Im lambda at E={:.2}, {}", energies[at_min], peaks.join(", ")));
                fine
            }
            Ok(_) => {
                parts.push(format!("{name}: trajectory length mismatch"));
                false
            }
            Err((_, e)) => {
                parts.push(format!("{name}: {e}"));
                false
            }
        };
        parts.push(format!("{name}: TV direct_orig {tv_orig:.3}, direct_mod {tv_mod:.3} (a {}) (b {})", verdict(a), verdict(b)));
        ok &= a && b;
    }
    outcome(ok, parts.join("; "))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(number: u32, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
    });
    println!(
        "criterion {number:>2} {title}: {} [{:.1} s] {}",
        verdict(result.passed),
        t0.elapsed().as_secs_f64(),
        result.detail
    );
    result.passed
}

fn main() {
    let mut all = Vec::new();
    all.push(run(1, "special functions", criterion_1));
    all.push(run(2, "unitarity", criterion_2));
    all.push(run(3, "limit reductions", criterion_3));
    all.push(run(4, "radial-equation oracle", criterion_4));
    all.push(run(5, "residues", criterion_5));
    let mut runs = Vec::new();
    all.push(run(6, "closure", || {
        runs = closure_runs();
        criterion_6(&runs)
    }));
    all.push(run(7, "modified decomposition", || criterion_7(&runs)));
    all.push(run(8, "classification", criterion_8));
    all.push(run(9, "centrifugal estimate", criterion_9));
    all.push(run(10, "figure reproduction", criterion_10));
    let failed = all.iter().filter(|p| !**p).count();
    println!("acceptance: {} of {} criteria passed", all.len() - failed, all.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
