//! JSON output with every float in normalized scientific notation
//! (17 significant digits), so that reports are byte-stable across runs
//! and round-trip to the exact bits.

use std::io;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Compact JSON, floats as `d.dddddddddddddddde±x`. Non-finite floats never
/// reach this formatter: serde_json turns them into `null` upstream, and the
/// solver types guarantee finite values anyway (fields are checked before
/// export), so a `null` where a number belongs marks an upstream bug.
pub struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(io::Error::other(e)))?;
    Ok(String::from_utf8(out).expect("serializer emits UTF-8"))
}

/// Writes `value` as a single JSON document with a trailing newline.
pub fn write_json_file<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
