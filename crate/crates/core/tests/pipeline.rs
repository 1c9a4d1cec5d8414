use num_complex::Complex64;
use regge_core::model::{self, PotentialParams, Sheet};
use regge_core::poles::{self, LevelSelector, Region, TrajectoryKind};
use regge_core::verify;
use regge_core::xsec::{self, XsecSettings};

fn type_one_samples() -> (PotentialParams, Vec<poles::ReggePole>) {
    let p = PotentialParams::fig2();
    let st = poles::find_level(&p, LevelSelector::Bound(1)).unwrap();
    let start = poles::regge_pole_from_level(&p, &st).unwrap();
    let grid: Vec<f64> = (0..12).map(|i| st.e.re + 0.05 + i as f64).collect();
    let t = poles::trace_regge_trajectory(&p, &grid, start.lambda).unwrap();
    (p, t.samples)
}

#[test]
fn type_one_on_real_axis_below_threshold() {
    let (p, samples) = type_one_samples();
    for s in samples.iter().filter(|s| s.e < 0.0) {
        assert!(s.lambda.im.abs() < 1e-10, "{s:?}");
        assert!(s.lambda.re > 0.5);
        // inverse map: the Siegert energy at Re λ̃ lands back on E
        let st = poles::find_siegert_energy(&p, s.lambda.re, Complex64::new(s.e, 0.0), Sheet::Physical).unwrap();
        assert!((st.e.re - s.e).abs() < 0.05 * s.e.abs(), "{} vs {}", st.e, s.e);
    }
    let class = poles::classify_state(&poles::find_level(&p, LevelSelector::Bound(1)).unwrap()).unwrap();
    assert_eq!(class.kind, TrajectoryKind::BoundCorrelated);
}

#[test]
fn scan_contains_traced_pole_and_its_reflection_is_a_zero() {
    let p = PotentialParams::fig2();
    let e = 5.0;
    let traced = poles::find_regge_pole(&p, e, Complex64::new(5.7, 0.02)).unwrap();
    let scan = poles::scan_poles(&p, e, Region::new(4.0, 8.0, -0.01, 1.0)).unwrap();
    assert_eq!(scan.winding as usize, scan.poles.len());
    assert!(scan.poles.iter().any(|q| (q.lambda - traced.lambda).norm() < 1e-9));
    let s_star = model::s_matrix_real(&p, e, traced.lambda.conj()).unwrap();
    assert!(s_star.norm() < 1e-6, "{s_star}");
}

#[test]
fn residues_agree_with_contour_average() {
    let p = PotentialParams::fig3();
    let scan = poles::scan_poles(&p, 60.0, Region::new(0.0, 15.0, 0.001, 2.0)).unwrap();
    assert!(!scan.poles.is_empty());
    for r in verify::residue_battery(&p, &scan.poles, 1e-8) {
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn closure_and_rearrangement() {
    let settings = XsecSettings::default();
    for (p, e) in [(PotentialParams::fig2(), 6.0), (PotentialParams::fig3(), 72.0)] {
        let (d, poles) = xsec::decompose(&p, e, &settings).unwrap();
        assert!(d.relative_closure_defect() < 1e-5, "{d:?}");
        let scale = d.sigma_total;
        assert!((d.sigma1_mod + d.sigma_res_mod - d.sigma1 - d.sigma_res).abs() < 1e-12 * scale);
        assert!((d.sigma_res_mod - d.sigma_res - d.n0_moved).abs() < 1e-12 * scale);
        let moved = xsec::moved_poles(&poles, &settings);
        let oracle = verify::deformed_contour_sigma1_oracle(&p, e, &moved, verify::DEFAULT_DETOUR).unwrap();
        assert!((oracle - d.sigma1_mod).abs() < 1e-6 * oracle.abs(), "{oracle} vs {}", d.sigma1_mod);
    }
}

#[test]
fn optical_forms_and_sigma2_truncation() {
    let p = PotentialParams::fig2();
    for e in [0.7, 9.0, 30.0] {
        let a = xsec::sigma_total_pw(&p, e, 1e-13).unwrap();
        let b = xsec::sigma_total_pw_squared(&p, e, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
        let base = XsecSettings::default();
        let s12 = xsec::sigma2(&p, e, &base).unwrap();
        let s16 = xsec::sigma2(&p, e, &XsecSettings { sigma2_t_max: 16.0, ..base }).unwrap();
        assert!((s12 - s16).abs() < 1e-9 * a, "{s12} vs {s16}");
    }
}

#[test]
fn radial_oracle_matches_and_converges_at_fourth_order() {
    let p = PotentialParams::fig3();
    for r in verify::ode_battery(&p, &[(3.0, 0.5), (47.6, 2.3), (90.0, 8.5)], 1e-8) {
        assert!(r.passed, "{r:?}");
    }
    let ratio = verify::convergence_ratio(&p, 10.0, 1.5, 60).unwrap();
    assert!((ratio - 16.0).abs() < 2.0, "{ratio}");
}
