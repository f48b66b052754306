//! Output files. Every artifact is written to a temporary file in the target
//! directory and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use riemann_core::simulate::{FrontEvent, FrontFamily};
use riemann_core::State;
use serde::Serialize;

use crate::error::CliError;

pub const PROFILE_FILE: &str = "profile.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const FAN_FILE: &str = "fan.json";
pub const DECOUPLING_FILE: &str = "decoupling.json";
pub const COMPARE_FILE: &str = "compare.json";
pub const VALIDATE_FILE: &str = "validate.json";
pub const FAILURE_FILE: &str = "failure.json";

/// Header of the front-tracking event log.
pub const EVENTS_HEADER: &str =
    "time,position,incoming,outgoing,families_in,families_out,strength_in,strength_out,total_strength,front_count";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` to `dir/name` atomically and returns the final path.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(&path))?;
    tmp.as_file().sync_all().map_err(io_err(&path))?;
    tmp.persist(&path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

/// Column names of the state fields.
pub fn state_fields(state: &State) -> &'static [&'static str] {
    match state {
        State::Scalar { .. } => &["u"],
        State::Polymer(_) => &["s", "c", "k"],
        State::Traffic(_) => &["rho", "v", "k"],
    }
}

/// `time,x,<fields>` rows for one or more snapshots.
pub fn profile_csv(rows: &[(f64, f64, State)]) -> String {
    let fields = rows.first().map_or(&[][..], |r| state_fields(&r.2));
    let mut out = String::from("time,x");
    for f in fields {
        out.push(',');
        out.push_str(f);
    }
    out.push('\n');
    for (t, x, s) in rows {
        let _ = write!(out, "{t},{x}");
        for v in s.components() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn family_list(fs: &[FrontFamily]) -> String {
    fs.iter()
        .map(|f| match f {
            FrontFamily::V => "v",
            FrontFamily::Rho => "rho",
            FrontFamily::Vacuum => "vacuum",
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn events_csv(events: &[FrontEvent]) -> String {
    let mut out = format!("{EVENTS_HEADER}\n");
    for e in events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            e.time,
            e.position,
            e.incoming,
            e.outgoing,
            family_list(&e.families_in),
            family_list(&e.families_out),
            e.strength_in,
            e.strength_out,
            e.total_strength,
            e.front_count
        );
    }
    out
}
