use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Builds a CSV document in memory; numbers use `Display`, which prints the
/// shortest decimal that reads back to the same `f64`.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

/// Writes `bytes` to `out`, or stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// `<out>.meta.json` next to a CSV file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes a CSV and, when it goes to a file, its metadata sidecar.
pub fn emit_table<M: Serialize>(out: Option<&Path>, table: Table, meta: &M) -> CliResult<()> {
    emit(out, &table.into_bytes())?;
    if let Some(path) = out {
        let side = sidecar_path(path);
        std::fs::write(&side, json_bytes(meta)).map_err(|e| CliError::io(side, e))?;
    }
    Ok(())
}
