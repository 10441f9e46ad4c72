use crate::commands::Outcome;
use crate::Failure;
use std::path::{Path, PathBuf};

/// Relative tolerance for numbers in golden comparisons of text artifacts.
const GOLDEN_RTOL: f64 = 1e-9;

fn put(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write(out: &Path, name: &str, o: &Outcome) -> Result<Vec<PathBuf>, Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Io(format!("cannot create {}: {e}", out.display())))?;
    let mut written = Vec::new();
    let report = out.join(format!("{name}.report.json"));
    let mut json = serde_json::to_string_pretty(&o.report_json()).expect("report serializes");
    json.push('\n');
    put(&report, json.as_bytes())?;
    written.push(report);
    if let Some(t) = &o.table {
        let p = out.join(format!("{name}.table.csv"));
        put(&p, t.as_bytes())?;
        written.push(p);
    }
    if let Some(b) = &o.solution {
        let p = out.join(format!("{name}.solution.bin"));
        put(&p, b)?;
        written.push(p);
    }
    Ok(written)
}

fn tokens(s: &str) -> Vec<&str> {
    s.split(|c: char| c.is_whitespace() || ",:[]{}\"".contains(c)).filter(|t| !t.is_empty()).collect()
}

fn same_token(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= GOLDEN_RTOL * x.abs().max(y.abs()),
        _ => false,
    }
}

/// First difference between an artifact and its golden copy, if any. Text
/// artifacts compare token by token with a relative tolerance on numbers;
/// binary ones byte for byte.
fn difference(golden: &[u8], fresh: &[u8], binary: bool) -> Option<String> {
    if binary {
        return (golden != fresh).then(|| "binary contents differ".to_string());
    }
    let (g, f) = (String::from_utf8_lossy(golden), String::from_utf8_lossy(fresh));
    let (tg, tf) = (tokens(&g), tokens(&f));
    if let Some((i, (a, b))) = tg.iter().zip(&tf).enumerate().find(|(_, (a, b))| !same_token(a, b)) {
        return Some(format!("token {i}: golden {a:?}, got {b:?}"));
    }
    (tg.len() != tf.len()).then(|| format!("golden has {} tokens, got {}", tg.len(), tf.len()))
}

pub fn compare_golden(dir: &Path, written: &[PathBuf]) -> Result<bool, Failure> {
    let mut ok = true;
    for p in written {
        let file = p.file_name().expect("artifact has a file name");
        let golden = dir.join(file);
        let Ok(g) = std::fs::read(&golden) else {
            eprintln!("golden: no reference for {}", file.to_string_lossy());
            continue;
        };
        let fresh = std::fs::read(p).map_err(|e| Failure::Io(format!("cannot read {}: {e}", p.display())))?;
        let binary = p.extension().is_some_and(|e| e == "bin");
        if let Some(d) = difference(&g, &fresh, binary) {
            eprintln!("golden: {} differs ({d})", file.to_string_lossy());
            ok = false;
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_compare_with_tolerance() {
        assert!(difference(b"{\"a\": 1.0000000000001}", b"{\"a\": 1.0}", false).is_none());
        assert!(difference(b"a,1.0\n", b"a,1.1\n", false).is_some());
        assert!(difference(b"a,b", b"a,b,c", false).is_some());
        assert!(difference(b"\x01", b"\x02", true).is_some());
    }
}
