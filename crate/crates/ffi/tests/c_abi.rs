use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use watershed_ffi::*;

unsafe fn take_string(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    ws_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ws_last_error()).to_str().unwrap().to_owned()
}

#[test]
fn watershed_calls() {
    unsafe {
        let seq = [2i64, 6, 1, 5, 4, 3];
        let mut k = 99usize;
        assert_eq!(ws_watershed(seq.as_ptr(), seq.len(), &mut k), WsStatus::Ok);
        assert_eq!(k, 2);
        assert_eq!(ws_watershed_brute(seq.as_ptr(), seq.len(), &mut k), WsStatus::Ok);
        assert_eq!(k, 2);

        assert_eq!(ws_watershed(ptr::null(), 0, &mut k), WsStatus::Ok);
        assert_eq!(k, 0);

        let odd = [1i64, 2, 3];
        assert_eq!(ws_watershed(odd.as_ptr(), 3, &mut k), WsStatus::Domain);
        assert!(last_error().contains("even"));

        let dup = [1i64, 1];
        assert_eq!(ws_watershed(dup.as_ptr(), 2, &mut k), WsStatus::Domain);
        assert_eq!(ws_watershed(ptr::null(), 2, &mut k), WsStatus::NullPointer);
        assert_eq!(ws_watershed(seq.as_ptr(), seq.len(), ptr::null_mut()), WsStatus::NullPointer);

        let mut json = ptr::null_mut();
        assert_eq!(ws_watershed_trace_json(seq.as_ptr(), seq.len(), &mut json), WsStatus::Ok);
        let trace: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(trace["left_cut"], 4);
    }
}

#[test]
fn counts() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ws_all_even_count(3, &mut s), WsStatus::Ok);
        assert_eq!(take_string(s), "225");
        assert_eq!(ws_watershed_count(2, 1, &mut s), WsStatus::Ok);
        assert_eq!(take_string(s), "6");
        assert_eq!(ws_watershed_count(2, 3, &mut s), WsStatus::Domain);
    }
}

#[test]
fn cycle_permutations() {
    unsafe {
        let elements = [2i64, 5, 7, 3, 6, 9];
        let lens = [2usize, 1, 3];
        let mut perm = ptr::null_mut();
        assert_eq!(ws_cycle_permutation_new(elements.as_ptr(), lens.as_ptr(), 3, &mut perm), WsStatus::Ok);
        assert_eq!(ws_cycle_count(perm), 3);

        let mut buf = [0i64; 8];
        let mut len = 0usize;
        assert_eq!(ws_cycle_get(perm, 2, buf.as_mut_ptr(), buf.len(), &mut len), WsStatus::Ok);
        assert_eq!(&buf[..len], &[9, 3, 6]);
        assert_eq!(ws_cycle_get(perm, 3, buf.as_mut_ptr(), buf.len(), &mut len), WsStatus::Domain);

        assert_eq!(ws_foata(perm, buf.as_mut_ptr(), buf.len(), &mut len), WsStatus::Ok);
        assert_eq!(&buf[..len], &[5, 2, 7, 9, 3, 6]);
        assert_eq!(ws_foata(perm, buf.as_mut_ptr(), 2, &mut len), WsStatus::BufferTooSmall);
        assert_eq!(len, 6);
        ws_cycle_permutation_free(perm);

        let seq = [5i64, 1, 6, 2];
        let mut inv = ptr::null_mut();
        assert_eq!(ws_foata_inverse(seq.as_ptr(), seq.len(), &mut inv), WsStatus::Ok);
        assert_eq!(ws_cycle_count(inv), 2);
        assert_eq!(ws_cycle_get(inv, 1, buf.as_mut_ptr(), buf.len(), &mut len), WsStatus::Ok);
        assert_eq!(&buf[..len], &[6, 2]);
        ws_cycle_permutation_free(inv);

        let bad = [1i64, 1];
        let one = [2usize];
        assert_eq!(
            ws_cycle_permutation_new(bad.as_ptr(), one.as_ptr(), 1, &mut perm),
            WsStatus::Domain
        );
        assert_eq!(ws_cycle_count(ptr::null()), 0);
        ws_cycle_permutation_free(ptr::null_mut());
    }
}

#[test]
fn hikita_and_sampling() {
    unsafe {
        let a = [1u64];
        let b = [1u64];
        let q = CString::new("2").unwrap();
        let mut params = ptr::null_mut();
        assert_eq!(ws_hikita_params_new(a.as_ptr(), b.as_ptr(), 1, q.as_ptr(), &mut params), WsStatus::Ok);

        let mut s = ptr::null_mut();
        assert_eq!(ws_hikita_phi(params, 1, &mut s), WsStatus::Ok);
        assert_eq!(take_string(s), "2/3");
        assert_eq!(ws_hikita_phi(params, 2, &mut s), WsStatus::Domain);

        let mut dist = ptr::null_mut();
        assert_eq!(ws_hikita_distribution(params, &mut dist), WsStatus::Ok);
        assert_eq!(ws_rational_vec_len(dist), 2);
        assert_eq!(CStr::from_ptr(ws_rational_vec_get(dist, 0)).to_str().unwrap(), "1/3");
        assert!(ws_rational_vec_get(dist, 2).is_null());
        ws_rational_vec_free(dist);

        let mut weights = ptr::null_mut();
        assert_eq!(ws_weights_from_params(params, &mut weights), WsStatus::Ok);
        assert_eq!(CStr::from_ptr(ws_rational_vec_get(weights, 1)).to_str().unwrap(), "2");
        ws_rational_vec_free(weights);

        let mut sampler = ptr::null_mut();
        assert_eq!(ws_sampler_new(params, 42, &mut sampler), WsStatus::Ok);
        let mut buf = [0i64; 2];
        let mut len = 0;
        let mut ascents = 0;
        for _ in 0..3000 {
            assert_eq!(ws_sampler_next(sampler, buf.as_mut_ptr(), 2, &mut len), WsStatus::Ok);
            assert_eq!(len, 2);
            if buf[0] < buf[1] {
                ascents += 1;
            }
        }
        // P(ascent) = 2/3; 4 sigma at n = 3000 is about 0.034.
        assert!((ascents as f64 / 3000.0 - 2.0 / 3.0).abs() < 0.035);
        assert_eq!(ws_sampler_next(sampler, buf.as_mut_ptr(), 1, &mut len), WsStatus::BufferTooSmall);
        ws_sampler_free(sampler);

        let mut report = ptr::null_mut();
        assert_eq!(ws_monte_carlo_json(params, 1000, 7, &mut report), WsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(report)).unwrap();
        assert_eq!(v["exact"], serde_json::json!(["1/3", "2/3"]));
        assert_eq!(v["seed"], 7);
        assert_eq!(ws_monte_carlo_json(params, 0, 7, &mut report), WsStatus::Domain);
        ws_hikita_params_free(params);

        let bad_q = CString::new("0").unwrap();
        assert_eq!(
            ws_hikita_params_new(a.as_ptr(), b.as_ptr(), 1, bad_q.as_ptr(), &mut params),
            WsStatus::Domain
        );
        let junk_q = CString::new("x/y").unwrap();
        assert_eq!(
            ws_hikita_params_new(a.as_ptr(), b.as_ptr(), 1, junk_q.as_ptr(), &mut params),
            WsStatus::Parse
        );
        assert_eq!(
            ws_hikita_params_new(a.as_ptr(), b.as_ptr(), 1, ptr::null(), &mut params),
            WsStatus::NullPointer
        );
    }
}

#[test]
fn bulldozers() {
    unsafe {
        let seq = [2i64, 6, 1, 5, 4, 3];
        let mut town = 0usize;
        assert_eq!(ws_bulldozer_unsweepable(seq.as_ptr(), seq.len(), &mut town), WsStatus::Ok);
        assert_eq!(town, 3);
        assert_eq!(ws_bulldozer_unsweepable(ptr::null(), 0, &mut town), WsStatus::Ok);
        assert_eq!(town, 1);
        assert_eq!(ws_bulldozer_unsweepable(seq.as_ptr(), 5, &mut town), WsStatus::Domain);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/watershed.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn ").or_else(|| l.trim().strip_prefix("pub extern \"C\" fn ")))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exported.len() > 20);
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn c_program_links_against_staticlib() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libwatershed_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());

    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("ws_smoke");
    let status = std::process::Command::new(cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = std::process::Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match std::process::Command::new(&cc).arg("--version").output() {
        Ok(o) if o.status.success() => Ok(cc),
        _ => Err(()),
    }
}
