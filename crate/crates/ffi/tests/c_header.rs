use std::path::{Path, PathBuf};
use std::process::Command;

// target/<profile>/deps/<test binary> -> target/<profile>
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn generated_header_compiles_and_links() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    // cargo test leaves the static library in deps/ without uplifting it
    let dir = profile_dir();
    let lib = [
        dir.join("deps/librespoisson_ffi.a"),
        dir.join("librespoisson_ffi.a"),
    ]
    .into_iter()
    .find(|p| p.exists())
    .expect("librespoisson_ffi.a");
    let out = std::env::temp_dir().join(format!("respoisson_smoke_{}", std::process::id()));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
