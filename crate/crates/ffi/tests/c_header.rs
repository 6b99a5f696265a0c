//! Compiles and links a small C program against the generated header and
//! the static library, when a C compiler is available.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "camellia.h"

int main(void) {
    CamelliaCode *code = NULL;
    if (camellia_code_new(3, 1, &code) != CAMELLIA_OK) return 1;
    double rate = 0.0;
    camellia_code_rate(code, &rate);
    CamelliaChannel *ch = NULL;
    if (camellia_channel_bec(0.3, &ch) != CAMELLIA_OK) return 2;
    double cap = 0.0;
    camellia_channel_capacity(ch, &cap);
    CamelliaCode *bad = NULL;
    if (camellia_code_new(2, 3, &bad) != CAMELLIA_ERR_INVALID) return 3;
    if (strstr(camellia_last_error(), "invalid") == NULL) return 4;
    printf("%g %g %zu\n", rate, cap, camellia_code_length(code));
    camellia_channel_free(ch);
    camellia_code_free(code);
    return 0;
}
"#;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(header_dir().join("camellia.h")).expect("generated header");
    for name in [
        "CAMELLIA_H",
        "typedef struct CamelliaCode CamelliaCode",
        "typedef struct CamelliaChannel CamelliaChannel",
        "CAMELLIA_ERR_BUDGET",
        "camellia_code_new",
        "camellia_simulate",
        "camellia_string_free",
        "camellia_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    // the test binary sits in target/<profile>/deps next to the archive
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    let Some(lib) = [deps, deps.parent().unwrap()]
        .iter()
        .map(|d| d.join("libcamellia_ffi.a"))
        .find(|p| p.exists())
    else {
        eprintln!("libcamellia_ffi.a not built; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_dir())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program exited with {:?}",
        out.status
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0.5 0.7 8\n");
}
