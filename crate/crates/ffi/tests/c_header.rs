//! Compiles and links a small C program against the generated header and static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

/// target/<profile>, found from this test binary's location (target/<profile>/deps/...).
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "rtsim.h"

int main(void) {
    RtsimScenario *s = NULL;
    if (rtsim_scenario_new("nope", &s) != RTSIM_STATUS_UNKNOWN_SCENARIO) return 10;
    if (strstr(rtsim_last_error(), "burst") == NULL) return 11;
    if (rtsim_scenario_new("burst", &s) != RTSIM_STATUS_OK) return 12;
    if (rtsim_scenario_set(s, "duration", "3") != RTSIM_STATUS_OK) return 13;
    RtsimRun *run = NULL;
    if (rtsim_scenario_run(s, &run) != RTSIM_STATUS_OK) return 14;
    RtsimTotals t;
    if (rtsim_run_totals(run, &t) != RTSIM_STATUS_OK) return 15;
    RtsimSnapshot snap;
    if (rtsim_run_snapshot(run, 2, &snap) != RTSIM_STATUS_OK) return 16;
    char *csv = rtsim_run_csv(run);
    printf("%zu %llu %llu %d\n", rtsim_run_snapshot_count(run),
           (unsigned long long)t.sent, (unsigned long long)snap.second, (int)strlen(csv) > 0);
    rtsim_string_free(csv);
    rtsim_run_free(run);
    rtsim_scenario_free(s);
    return 0;
}
"#;

#[test]
fn header_is_valid_c() {
    if !have_cc() {
        eprintln!("cc not found; skipping");
        return;
    }
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_dir().join("rtsim.h"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("librtsim_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("cc or {} not found; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror"])
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    let mut spec = rtsim::experiments::scenario_by_name("burst").unwrap();
    spec.set("duration", "3").unwrap();
    let sent = spec.run().unwrap().totals.sent;
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), format!("3 {sent} 2 1"));
}
