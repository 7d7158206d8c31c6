//! Config files: top-level `seed`, `threads` and `out`, plus one table per
//! command holding that command's parameters. Flags override file values.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

const GLOBAL_KEYS: [&str; 3] = ["seed", "threads", "out"];
pub const COMMANDS: [&str; 8] = ["permanent", "sample", "scattershot", "ghz", "hom", "jsa", "validate", "rates"];

#[derive(Debug, Default)]
pub struct ConfigFile {
    table: Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: Table = text.parse().map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        if let Some(key) = table.keys().find(|k| !GLOBAL_KEYS.contains(&k.as_str()) && !COMMANDS.contains(&k.as_str())) {
            return Err(CliError::parse(format!("{}: unknown key {key:?}", path.display())));
        }
        Ok(Self { table })
    }

    pub fn seed(&self) -> CliResult<Option<u64>> {
        match self.table.get("seed") {
            None => Ok(None),
            Some(Value::Integer(s)) => Ok(Some(*s as u64)),
            Some(v) => Err(CliError::parse(format!("seed must be an integer, got {v}"))),
        }
    }

    pub fn threads(&self) -> CliResult<Option<usize>> {
        match self.table.get("threads") {
            None => Ok(None),
            Some(Value::Integer(t)) if *t >= 0 => Ok(Some(*t as usize)),
            Some(v) => Err(CliError::parse(format!("threads must be a non-negative integer, got {v}"))),
        }
    }

    pub fn out(&self) -> CliResult<Option<PathBuf>> {
        match self.table.get("out") {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(PathBuf::from(s))),
            Some(v) => Err(CliError::parse(format!("out must be a string, got {v}"))),
        }
    }

    /// Overlays the flags that were given onto the command's table.
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, command: &str, flags: &T) -> CliResult<T> {
        let mut merged = match self.table.get(command) {
            None => Table::new(),
            Some(Value::Table(t)) => t.clone(),
            Some(v) => return Err(CliError::parse(format!("[{command}] must be a table, got {v}"))),
        };
        let given = Table::try_from(flags).map_err(|e| CliError::parse(format!("{command} flags: {e}")))?;
        merged.extend(given);
        Value::Table(merged).try_into().map_err(|e| CliError::parse(format!("[{command}]: {e}")))
    }
}
