use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use glassyjc_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        gjc_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn plan(samples: u64) -> GjcPlan {
    GjcPlan {
        samples,
        estimator: GjcEstimator::Auto,
        seed: 7,
        bootstrap_resamples: 50,
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gjc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn single_handle_lifecycle() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(gjc_single_new(50.0, 2.0, 1.0, &mut h), GjcStatus::Ok);
        let mut tr = 0.0;
        assert_eq!(gjc_single_revival_period(h, &mut tr), GjcStatus::Ok);
        assert!((tr - 2.0 * std::f64::consts::PI * 50f64.sqrt()).abs() < 1e-12);

        let clean = GjcDisorder { kind: GjcKind::Gaussian, strength: 0.0 };
        let mut w = f64::NAN;
        assert_eq!(gjc_single_inversion(h, clean, 0.0, &mut w), GjcStatus::Ok);
        assert!((w - 1.0).abs() < 1e-12);

        let cauchy = GjcDisorder { kind: GjcKind::Cauchy, strength: 0.01 };
        assert_eq!(gjc_single_inversion(h, cauchy, 1.0, &mut w), GjcStatus::Config);
        assert!(last_error().contains("closed form"));

        let mut est = GjcEstimate::default();
        assert_eq!(gjc_single_inversion_quenched(h, cauchy, plan(200), 1.0, &mut est), GjcStatus::Ok);
        assert!(est.value.abs() <= 1.0 && est.spread > 0.0);

        assert_eq!(gjc_single_entanglement(h, clean, plan(1), 0.0, &mut est), GjcStatus::Ok);
        assert!(est.value.abs() < 1e-12);
        gjc_single_free(h);
        gjc_single_free(ptr::null_mut());
    }
}

#[test]
fn invalid_input_maps_to_status() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(gjc_single_new(-1.0, 2.0, 1.0, &mut h), GjcStatus::Validation);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(gjc_single_new(50.0, 2.0, 1.0, ptr::null_mut()), GjcStatus::NullPointer);
        let mut w = 0.0;
        assert_eq!(gjc_single_revival_period(ptr::null(), &mut w), GjcStatus::NullPointer);
        let mut est = GjcEstimate::default();
        let cauchy = GjcDisorder { kind: GjcKind::Cauchy, strength: 0.1 };
        let mean = GjcPlan { estimator: GjcEstimator::Mean, ..plan(10) };
        assert_eq!(
            gjc_double_concurrence_quenched(0.5, 1.0, 1.0, GjcFamily::Phi, cauchy, cauchy, mean, 1.0, &mut est),
            GjcStatus::Config
        );
    }
}

#[test]
fn success_clears_last_error() {
    let mut w = 0.0;
    unsafe {
        gjc_single_revival_period(ptr::null(), &mut w);
        assert!(gjc_last_error_message(ptr::null_mut(), 0) > 0);
        assert_eq!(gjc_double_concurrence(0.3, 1.0, 1.0, GjcFamily::Psi, 0.0, 0.0, 1.0, &mut w), GjcStatus::Ok);
        assert_eq!(gjc_last_error_message(ptr::null_mut(), 0), 0);
    }
}

#[test]
fn double_and_general_agree() {
    let alpha = std::f64::consts::FRAC_PI_6;
    let mut c = 0.0;
    unsafe {
        assert_eq!(gjc_double_concurrence(alpha, 1.0, 1.0, GjcFamily::Phi, 0.0, 0.0, 0.0, &mut c), GjcStatus::Ok);
    }
    assert!((c - (2.0 * alpha).sin()).abs() < 1e-12);

    // cos a |11> + sin a |00> in the |11>,|10>,|01>,|00> order
    let amp = [alpha.cos(), 0.0, 0.0, alpha.sin()];
    let mut re = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            re[4 * i + j] = amp[i] * amp[j];
        }
    }
    let im = [0.0; 16];
    let mut g = 0.0;
    unsafe {
        assert_eq!(gjc_concurrence_general(re.as_ptr(), im.as_ptr(), &mut g), GjcStatus::Ok);
    }
    assert!((g - c).abs() < 1e-10);

    re[0] = 2.0;
    unsafe {
        assert_eq!(gjc_concurrence_general(re.as_ptr(), im.as_ptr(), &mut g), GjcStatus::Validation);
    }
}

#[test]
fn coupled_series_and_esd() {
    let mut h = ptr::null_mut();
    let times: Vec<f64> = (0..=5000).map(|k| k as f64 * 0.005).collect();
    let mut values = vec![0.0; times.len()];
    unsafe {
        assert_eq!(gjc_coupled_new(0, 0.0, 0.0, 1.0, 1.0, &mut h), GjcStatus::Ok);
        assert_eq!(
            gjc_coupled_concurrence(h, std::f64::consts::FRAC_PI_6, 0.0, 0.0, times.as_ptr(), times.len(), values.as_mut_ptr()),
            GjcStatus::Ok
        );
        gjc_coupled_free(h);
    }
    let mut direct = vec![0.0; times.len()];
    for (t, d) in times.iter().zip(&mut direct) {
        unsafe {
            gjc_double_concurrence(std::f64::consts::FRAC_PI_6, 1.0, 1.0, GjcFamily::Phi, 0.0, 0.0, *t, d);
        }
    }
    let err = values.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");

    let mut count = 0usize;
    unsafe {
        assert_eq!(gjc_esd_count(times.as_ptr(), direct.as_ptr(), times.len(), 1e-10, 0.05, &mut count), GjcStatus::Ok);
    }
    assert!(count > 0);

    unsafe {
        assert_eq!(gjc_coupled_new(9, 0.0, 0.0, 1.0, 1.0, &mut h), GjcStatus::Config);
    }
}

#[test]
fn header_is_current_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/glassyjc.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["gjc_version", "gjc_single_new", "gjc_concurrence_general", "gjc_esd_count", "GJC_STATUS_PANIC"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let src = std::env::temp_dir().join(format!("glassyjc_header_{}.c", std::process::id()));
    std::fs::write(&src, "#include \"glassyjc.h\"\nint main(void) { return gjc_version() == 0; }\n").unwrap();
    let status = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status();
    let _ = std::fs::remove_file(&src);
    if let Ok(status) = status {
        assert!(status.success(), "header does not compile");
    }
}
