//! External solver invocation following the SAT-competition output
//! convention (`s SATISFIABLE`, `v` lines, exit codes 10/20).

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::SatResult;
use crate::error::{Error, Result};
use crate::logic::format::write_dimacs_cnf;
use crate::logic::{Assignment, Cnf};

static FILE_COUNTER: AtomicU64 = AtomicU64::new(0);

pub fn solve(exec: &Path, timeout: Duration, f: &Cnf) -> Result<SatResult> {
    let (text, map) = write_dimacs_cnf(f);
    let n = FILE_COUNTER.fetch_add(1, Ordering::Relaxed);
    let file = std::env::temp_dir().join(format!("beyondnp-{}-{n}.cnf", std::process::id()));
    std::fs::write(&file, text).map_err(|e| Error::External(format!("writing {}: {e}", file.display())))?;
    let result = run(exec, timeout, &file);
    let _ = std::fs::remove_file(&file);
    let (code, out) = result?;
    parse_output(code, &out, &map)
}

fn run(exec: &Path, timeout: Duration, file: &Path) -> Result<(Option<i32>, String)> {
    let mut child = Command::new(exec)
        .arg(file)
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::External(format!("cannot start {}: {e}", exec.display())))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let start = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(st)) => break st,
            Ok(None) if start.elapsed() > timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::External(format!("timed out after {}s", timeout.as_secs())));
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(Error::External(e.to_string())),
        }
    };
    let out = reader.join().unwrap_or_default();
    Ok((status.code(), out))
}

fn parse_output(code: Option<i32>, out: &str, map: &[(crate::logic::VarId, u32)]) -> Result<SatResult> {
    let mut status: Option<bool> = None;
    let mut values: HashMap<u32, bool> = HashMap::new();
    for line in out.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = match s.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                other => return Err(Error::External(format!("unknown status `{other}`"))),
            };
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| Error::External(format!("bad model token `{tok}`")))?;
                if x != 0 {
                    values.insert(x.unsigned_abs() as u32, x > 0);
                }
            }
        }
    }
    let status = status.or(match code {
        Some(10) => Some(true),
        Some(20) => Some(false),
        _ => None,
    });
    match status {
        Some(true) => Ok(SatResult::Sat(Assignment::from_pairs(
            map.iter().map(|(v, n)| (v.clone(), values.get(n).copied().unwrap_or(false))),
        ))),
        Some(false) => Ok(SatResult::Unsat),
        None => Err(Error::External(format!("no verdict (exit code {code:?})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::VarId;

    #[test]
    fn parses_competition_output() {
        let map = vec![(VarId::new("a"), 1), (VarId::new("b"), 2)];
        let r = parse_output(Some(10), "c hi\ns SATISFIABLE\nv 1 -2 0\n", &map).unwrap();
        let SatResult::Sat(m) = r else { panic!() };
        assert_eq!(m.get(&VarId::new("a")), Some(true));
        assert_eq!(m.get(&VarId::new("b")), Some(false));
        assert_eq!(parse_output(Some(20), "", &map).unwrap(), SatResult::Unsat);
        assert!(parse_output(Some(0), "", &map).is_err());
    }
}
