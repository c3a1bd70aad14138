#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

pub fn matrixgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matrixgt"))
        .args(args)
        .env_remove("MATRIXGT_WORKERS")
        .output()
        .expect("spawn matrixgt")
}

/// Runs the binary and panics with its stderr unless it exits with 0.
pub fn ok(args: &[&str]) -> Output {
    let out = matrixgt(args);
    assert!(
        out.status.success(),
        "matrixgt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn code(args: &[&str]) -> i32 {
    matrixgt(args).status.code().expect("exit code")
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

/// File name to SHA-256 of every regular file directly inside `dir`.
pub fn hash_dir(dir: &Path) -> BTreeMap<String, String> {
    fs::read_dir(dir)
        .expect("read dir")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.is_file())
        .map(|p| {
            let digest = Sha256::digest(fs::read(&p).expect("read file"));
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            (p.file_name().unwrap().to_string_lossy().into_owned(), hex)
        })
        .collect()
}

pub fn write_scenario(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.txt");
    fs::write(&path, text).expect("write scenario");
    path
}
