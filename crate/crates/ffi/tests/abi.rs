use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use orlicz_approx_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(oa_last_error()) }.to_string_lossy().into_owned()
}

fn l2() -> *mut OaSpace {
    let mut sp = ptr::null_mut();
    let st = unsafe { oa_space_new(c("power 2").as_ptr(), c("const").as_ptr(), 0, &mut sp) };
    assert_eq!(st, OaStatus::Ok);
    sp
}

#[test]
fn norms_of_cosine() {
    let sp = l2();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(oa_function_from_family(c("harmonic 1").as_ptr(), &mut f), OaStatus::Ok);
        let (mut lux, mut ame) = (0.0, 0.0);
        assert_eq!(oa_luxemburg_norm(sp, f, &mut lux), OaStatus::Ok);
        assert_eq!(oa_orlicz_norm(sp, f, &mut ame), OaStatus::Ok);
        assert!((lux - std::f64::consts::PI.sqrt()).abs() < 1e-9);
        assert!(lux <= ame && ame <= 2.0 * lux + 1e-6);
        oa_function_free(f);
        oa_space_free(sp);
    }
}

#[test]
fn best_approximation_and_coefficients() {
    let sp = l2();
    let a = [1.0, 0.5, 0.25];
    let b = [0.0, -1.0, 0.0];
    let mut f = ptr::null_mut();
    let mut p = ptr::null_mut();
    let mut value = 0.0;
    unsafe {
        assert_eq!(oa_function_new(0.3, a.as_ptr(), b.as_ptr(), 3, &mut f), OaStatus::Ok);
        assert_eq!(oa_best_approx(sp, f, 2, &mut value, &mut p), OaStatus::Ok);
        let want = (std::f64::consts::PI * (0.25f64 + 1.0 + 0.0625)).sqrt();
        assert!((value - want).abs() < 1e-5 * want);
        assert_eq!(oa_function_degree(p), 1);
        let (mut a0, mut pa, mut pb) = (0.0, [0.0; 4], [0.0; 4]);
        assert_eq!(oa_function_coeffs(p, &mut a0, pa.as_mut_ptr(), pb.as_mut_ptr(), 4), OaStatus::Ok);
        assert!((a0 - 0.3).abs() < 1e-4 && (pa[0] - 1.0).abs() < 1e-4 && pb[0].abs() < 1e-4);
        oa_function_free(p);
        oa_function_free(f);
        oa_space_free(sp);
    }
}

#[test]
fn psi_round_trip() {
    let mut f = ptr::null_mut();
    let mut psi = ptr::null_mut();
    let (mut d, mut back) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(oa_function_from_family(c("poly-decay 1 6").as_ptr(), &mut f), OaStatus::Ok);
        assert_eq!(oa_psi_new(c("power 1.5").as_ptr(), 0.5, &mut psi), OaStatus::Ok);
        assert_eq!(oa_psi_derivative(f, psi, &mut d), OaStatus::Ok);
        assert_eq!(oa_psi_integral(d, psi, 0.0, &mut back), OaStatus::Ok);
        let (mut a0, mut a, mut b) = (1.0, [0.0; 6], [0.0; 6]);
        oa_function_coeffs(back, &mut a0, a.as_mut_ptr(), b.as_mut_ptr(), 6);
        for k in 0..6 {
            assert!((a[k] - 1.0 / (k + 1) as f64).abs() < 1e-12 && b[k].abs() < 1e-12);
        }
        for h in [f, d, back] {
            oa_function_free(h);
        }
        oa_psi_free(psi);
    }
}

#[test]
fn modulus_and_weights() {
    let sp = l2();
    let mut f = ptr::null_mut();
    let (mut m, mut cst, mut in_ap) = (0.0, 0.0, false);
    unsafe {
        oa_function_from_family(c("harmonic 1").as_ptr(), &mut f);
        assert_eq!(oa_modulus(sp, f, 1, std::f64::consts::FRAC_PI_2, &mut m), OaStatus::Ok);
        let pi = std::f64::consts::PI;
        assert!((m - (1.0 - 2.0 / pi) * pi.sqrt()).abs() < 1e-4);
        assert_eq!(oa_ap_constant(c("const").as_ptr(), 2.0, 1, &mut cst, &mut in_ap), OaStatus::Ok);
        assert!((cst - 1.0).abs() < 1e-9 && in_ap);
        assert_eq!(oa_modulus(sp, f, 5, 0.1, &mut m), OaStatus::InvalidArgument);
        oa_function_free(f);
        oa_space_free(sp);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut sp = ptr::null_mut();
    let mut out = 0.0;
    unsafe {
        assert_eq!(oa_space_new(c("powr 2").as_ptr(), c("const").as_ptr(), 0, &mut sp), OaStatus::InvalidArgument);
        assert!(last_error().contains("powr"));
        assert_eq!(oa_space_new(ptr::null(), c("const").as_ptr(), 0, &mut sp), OaStatus::NullPointer);
        assert_eq!(oa_luxemburg_norm(ptr::null(), ptr::null(), &mut out), OaStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(
            oa_function_from_family(bad.as_ptr().cast(), &mut ptr::null_mut()),
            OaStatus::InvalidUtf8
        );
        oa_space_free(ptr::null_mut());
        oa_function_free(ptr::null_mut());
        oa_psi_free(ptr::null_mut());
        oa_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_reports_and_gates() {
    let cfg = r#"{"function": {"family": "harmonic"}, "psi": {"family": "power 1", "beta": 1},
                  "run": {"theorem_id": "bernstein_15", "n_range": [1, 6]}}"#;
    let mut v = OaVerdict::Inconclusive;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(oa_verify(c(cfg).as_ptr(), &mut v, &mut json), OaStatus::Ok);
        assert_eq!(v, OaVerdict::Bounded);
        let rep: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(rep["rows"].as_array().unwrap().len(), 6);
        oa_string_free(json);

        let gated = cfg.replace("power 1", "power -1");
        assert_eq!(oa_verify(c(&gated).as_ptr(), &mut v, ptr::null_mut()), OaStatus::Hypothesis);
        assert!(last_error().contains("psi not in M*"));

        let typo = cfg.replace("\"beta\"", "\"betta\"");
        assert_eq!(oa_verify(c(&typo).as_ptr(), &mut v, ptr::null_mut()), OaStatus::Config);
        assert!(last_error().contains("/psi/betta"));
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/orlicz_approx.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["oa_space_new", "oa_luxemburg_norm", "oa_verify", "oa_last_error", "OA_STATUS_HYPOTHESIS"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let lib = target_dir().join("liborlicz_approx_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "orlicz_approx.h"
int main(void) {
    OaSpace *sp = NULL;
    OaFunction *f = NULL;
    double v = 0.0;
    if (oa_space_new("power 2", "const", 0, &sp) != OA_STATUS_OK) return 1;
    if (oa_function_from_family("harmonic 1", &f) != OA_STATUS_OK) return 2;
    if (oa_luxemburg_norm(sp, f, &v) != OA_STATUS_OK) return 3;
    if (fabs(v - sqrt(M_PI)) > 1e-9) return 4;
    if (oa_space_new("bogus", "const", 0, &sp) == OA_STATUS_OK) return 5;
    printf("%s\n", oa_last_error());
    oa_function_free(f);
    oa_space_free(sp);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-D_DEFAULT_SOURCE")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).contains("bogus"));
}
