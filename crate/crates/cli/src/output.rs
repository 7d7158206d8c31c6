use std::fmt::{Display, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Resolved run settings shared by every output of one invocation.
pub struct Session {
    pub command: &'static str,
    pub seed: u64,
    pub out: Option<PathBuf>,
    params: toml::Table,
}

impl Session {
    pub fn new(command: &'static str, seed: u64, out: Option<PathBuf>, params: &impl Serialize) -> CliResult<Self> {
        let params = toml::Table::try_from(params).map_err(|e| CliError::parse(format!("parameters: {e}")))?;
        Ok(Self { command, seed, out, params })
    }

    /// `#`-prefixed provenance block for text outputs.
    pub fn header(&self) -> String {
        let mut h = format!("# heralded {}\n# command = {:?}\n# seed = {}\n", heralded::VERSION, self.command, self.seed);
        for (k, v) in &self.params {
            let _ = writeln!(h, "# {k} = {v}");
        }
        h
    }

    /// The same provenance as a JSON object, for JSON outputs.
    pub fn json_header(&self) -> serde_json::Value {
        serde_json::json!({
            "tool": "heralded",
            "version": heralded::VERSION,
            "command": self.command,
            "seed": self.seed,
            "params": self.params,
        })
    }

    /// Writes `body` under the output directory, prefixed with the header.
    /// Does nothing without `--out`.
    pub fn write(&self, name: &str, body: &str) -> CliResult<()> {
        self.write_raw(name, &format!("{}{body}", self.header()))
    }

    pub fn write_raw(&self, name: &str, content: &str) -> CliResult<()> {
        let Some(dir) = &self.out else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| CliError::io(&path, e))
    }
}

/// Ordered `key = value` lines.
#[derive(Default)]
pub struct Report(String);

impl Report {
    pub fn field(&mut self, key: &str, value: impl Display) -> &mut Self {
        let _ = writeln!(self.0, "{key} = {value}");
        self
    }

    pub fn text(&self) -> &str {
        &self.0
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Global settings after merging flags over the config file.
pub struct Context {
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub config: crate::config::ConfigFile,
}

impl Context {
    /// Output session for `command`. The thread count is not recorded since
    /// results do not depend on it.
    pub fn session<T: Serialize>(&self, command: &'static str, params: &T) -> CliResult<Session> {
        Session::new(command, self.seed, self.out.clone(), params)
    }
}
