use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "quadcover.h"

int main(void) {
    QcModel *m = NULL;
    if (qc_model_new(1, 0, 0, &m) != QC_STATUS_OK) return 1;
    QcModelCounts c;
    if (qc_model_counts(m, &c) != QC_STATUS_OK || c.points_q != 27 || c.points_q0 != 15) return 2;
    QcCliqueCounts k;
    if (qc_census(m, &k) != QC_STATUS_OK || k.n3 != 20 || k.n6 != 1) return 3;
    qc_model_free(m);
    if (qc_model_new(9, 0, 0, &m) != QC_STATUS_TOO_LARGE) return 4;
    char buf[256];
    size_t need = 0;
    if (qc_last_error(buf, sizeof buf, &need) != QC_STATUS_OK || strlen(buf) + 1 != need) return 5;
    printf("%s\n", qc_status_str(QC_STATUS_OK));
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    // cargo test builds the staticlib next to the test binary in deps/
    let lib = std::env::current_exe().unwrap().parent().unwrap().join("libquadcover_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_smoke");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let st = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("running cc");
    assert!(st.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "C smoke test exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
