//! Running the `fuplab` binary on the sample configs and comparing with the
//! files under `tests/golden`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_fuplab");

pub const COMMANDS: &[&str] = &[
    "porosity", "norm", "sweep", "holes", "chain", "harmonic", "cover", "weight",
];

/// Outputs with no floating-point kernels beyond libm: compared byte for byte.
pub const EXACT: &[(&str, &[&str])] = &[
    ("porosity", &["porosity.csv", "porosity_profile.csv"]),
    ("holes", &["holes.csv", "mollifier.csv"]),
    ("cover", &["cover.csv"]),
    ("weight", &["cover.csv", "weight.txt"]),
];

/// FFT and Monte Carlo outputs: headers byte for byte, numbers to a tolerance.
pub const NUMERIC: &[(&str, &[&str])] = &[
    ("norm", &["norm.csv"]),
    ("sweep", &["sweep.csv"]),
    ("chain", &["chain.csv", "corpus.csv"]),
    ("harmonic", &["measure.csv", "subharmonic.csv"]),
];

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn golden_dir(cmd: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(cmd)
}

pub fn run_config(config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

pub fn run_named(cmd: &str, out: &Path) -> Output {
    run_config(&root().join("configs").join(format!("{cmd}.toml")), out, &[])
}

pub fn exact(want: &str, got: &str) -> Result<(), String> {
    if want == got {
        Ok(())
    } else {
        Err("differs from golden".into())
    }
}

pub fn close(want: &str, got: &str) -> Result<(), String> {
    let (wl, gl): (Vec<&str>, Vec<&str>) = (want.lines().collect(), got.lines().collect());
    if wl.len() != gl.len() {
        return Err(format!("{} lines, golden has {}", gl.len(), wl.len()));
    }
    if wl.first() != gl.first() {
        return Err("header differs".into());
    }
    // solver bookkeeping may legitimately move with FFT rounding
    let skip: Vec<bool> = wl[0].split(',').map(|h| h == "iterations" || h == "residual").collect();
    let split = |s: &str| s.split([',', '=']).map(str::to_string).collect::<Vec<_>>();
    for (w, g) in wl.iter().zip(&gl).skip(1) {
        let (wf, gf) = (split(w), split(g));
        if wf.len() != gf.len() {
            return Err(format!("field count in {g}"));
        }
        for (i, (a, b)) in wf.iter().zip(&gf).enumerate() {
            if !w.starts_with('#') && skip.get(i).copied().unwrap_or(false) {
                continue;
            }
            let ok = match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => (x - y).abs() <= 1e-7 * x.abs().max(1e-3),
                _ => a == b,
            };
            if !ok {
                return Err(format!("{a} vs {b} in row {g}"));
            }
        }
    }
    Ok(())
}

/// Runs `cmd` and checks `files` against the goldens, rewriting them instead
/// when `UPDATE_GOLDEN` is set.
pub fn check_golden(cmd: &str, files: &[&str], compare: fn(&str, &str) -> Result<(), String>) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = run_named(cmd, dir.path());
    if out.status.code() != Some(0) {
        return Err(format!(
            "{cmd} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    for f in files {
        let got = fs::read_to_string(dir.path().join(f)).map_err(|e| format!("{cmd}/{f}: {e}"))?;
        let path = golden_dir(cmd).join(f);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
            fs::write(&path, &got).map_err(|e| e.to_string())?;
            continue;
        }
        let want = fs::read_to_string(&path).map_err(|_| format!("missing golden {}", path.display()))?;
        compare(&want, &got).map_err(|e| format!("{cmd}/{f}: {e}"))?;
    }
    Ok(())
}

/// Manifest with the wall-clock fields removed.
pub fn stable_manifest(dir: &Path) -> serde_json::Value {
    let mut m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    m.as_object_mut().unwrap().remove("timings");
    m
}

pub fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

/// Runs `cmd` twice and compares every output; the manifests without timings.
pub fn check_determinism(cmd: &str) -> Result<(), String> {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for d in [&a, &b] {
        if !run_named(cmd, d.path()).status.success() {
            return Err(format!("{cmd} failed"));
        }
    }
    if listing(a.path()) != listing(b.path()) {
        return Err(format!("{cmd}: different file sets"));
    }
    for name in listing(a.path()) {
        let same = if name == "manifest.json" {
            stable_manifest(a.path()) == stable_manifest(b.path())
        } else {
            fs::read(a.path().join(&name)).unwrap() == fs::read(b.path().join(&name)).unwrap()
        };
        if !same {
            return Err(format!("{cmd}/{name} differs between runs"));
        }
    }
    Ok(())
}
