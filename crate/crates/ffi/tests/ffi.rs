use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use spa_ffi::*;

fn params(n: usize, seed: u64) -> SpaModelParams {
    SpaModelParams { m: 2, a1: 0.5, a2: 5.0, p: 1.0, n, seed }
}

fn new_graph(n: usize, seed: u64) -> *mut SpaHandle {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { spa_generate(&params(n, seed), &mut g) }, SpaStatus::Ok);
    assert!(!g.is_null());
    g
}

fn last_error() -> String {
    let p = spa_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn generate_counts_and_metrics() {
    let g = new_graph(500, 3);
    unsafe {
        assert_eq!(spa_num_vertices(g), 500);
        let m = spa_num_edges(g);
        assert!(m > 0);

        let mut buf = vec![0u32; 3 * m];
        let mut written = 0;
        assert_eq!(spa_edges(g, buf.as_mut_ptr(), m, &mut written), SpaStatus::Ok);
        assert_eq!(written, m);
        assert!(buf.chunks(3).all(|e| e[1] < e[0] && e[2] == e[0] + 1));

        let mut frac = 0.0;
        assert_eq!(spa_giant_fraction(g, &mut frac), SpaStatus::Ok);
        assert!(frac > 0.0 && frac <= 1.0);

        let (mut exact, mut sampled) = (0u32, 0u32);
        assert_eq!(spa_effective_diameter(g, 0.9, 0, 0, &mut exact), SpaStatus::Ok);
        assert_eq!(spa_effective_diameter(g, 0.9, 10_000, 1, &mut sampled), SpaStatus::Ok);
        assert!(exact >= 1 && exact.abs_diff(sampled) <= 1);

        let mut r = SpaRumourResult::default();
        assert_eq!(spa_rumour(g, SpaProtocol::PushPull, 0, 7, 0, &mut r), SpaStatus::Ok);
        assert_eq!(r.informed, r.component_size);
        assert!(r.spread_time >= 0);
        spa_free(g);
    }
}

#[test]
fn write_read_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("g.spa").to_str().unwrap()).unwrap();
    let g = new_graph(200, 4);
    unsafe {
        assert_eq!(spa_write(g, path.as_ptr()), SpaStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(spa_read(path.as_ptr(), &mut h), SpaStatus::Ok);
        assert_eq!(spa_num_edges(h), spa_num_edges(g));
        spa_free(g);
        spa_free(h);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut g = ptr::null_mut();
    let mut bad = params(10, 0);
    bad.p = 2.0;
    unsafe {
        assert_eq!(spa_generate(&bad, &mut g), SpaStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(last_error().contains("p = 2"));

        assert_eq!(spa_generate(ptr::null(), &mut g), SpaStatus::NullPointer);
        assert!(last_error().contains("params"));

        let missing = CString::new("/nonexistent-dir/none.spa").unwrap();
        assert_eq!(spa_read(missing.as_ptr(), &mut g), SpaStatus::IoError);
        assert!(last_error().contains("/nonexistent-dir/none.spa"));

        let h = new_graph(50, 1);
        let mut r = SpaRumourResult::default();
        assert_eq!(spa_rumour(h, SpaProtocol::Push, 50, 0, 0, &mut r), SpaStatus::InvalidArgument);
        let mut d = 0;
        assert_eq!(spa_effective_diameter(h, 1.5, 0, 0, &mut d), SpaStatus::InvalidArgument);
        spa_free(h);

        assert_eq!(spa_num_vertices(ptr::null()), 0);
        spa_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/spa_ffi.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["spa_generate", "spa_free", "spa_last_error", "SPA_STATUS_IO_ERROR", "typedef struct SpaHandle SpaHandle"] {
        assert!(text.contains(sym), "{sym}");
    }
    // syntax check with the system C compiler when one is present
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"spa_ffi.h\"\nint main(void) { SpaHandle *g = 0; SpaModelParams p = {2, 0.5, 1.0, 1.0, 10, 1};\n\
         return spa_generate(&p, &g) == SPA_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = header.parent().unwrap();
    match std::process::Command::new("cc").arg("-fsyntax-only").arg("-I").arg(include).arg(&src).status() {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("no C compiler; skipped syntax check"),
    }
}
