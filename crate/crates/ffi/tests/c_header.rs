use std::path::{Path, PathBuf};
use std::process::Command;

/// Directory holding the library artifacts of this build.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/catmads.h"))
            .unwrap();
    for name in [
        "catmads_problem_builtin",
        "catmads_problem_callback",
        "catmads_solve",
        "catmads_result_best_f",
        "catmads_last_error",
        "CATMADS_STATUS_NO_FINITE_DOE",
        "typedef struct CatmadsProblem CatmadsProblem",
    ] {
        assert!(header.contains(name), "{name} missing");
    }
}

#[test]
fn c_program_links_and_solves() {
    let lib = artifact_dir().join("libcatmads_ffi.a");
    if !cfg!(unix) || !lib.exists() {
        eprintln!("skipping: {} not available", lib.display());
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.trim_end().ends_with("300 budget") || text.trim_end().ends_with("mesh_minimum"),
        "{text}"
    );
}

fn tempfile_dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_smoke");
    std::fs::create_dir_all(&d).unwrap();
    d
}
