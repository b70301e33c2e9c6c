//! TOML experiment files and their merge with command-line flags.
//!
//! A file holds optional top-level `format`, `output`, `seed` and `threads`
//! keys plus one table per subcommand, named as on the command line:
//!
//! ```toml
//! seed = 7
//!
//! [thresholds]
//! n_stages = 24
//! vbar = 1.0
//!
//! [thresholds.prices]
//! kind = "two-point"
//! lo = 20.0
//! hi = 60.0
//! ```
//!
//! Flags given on the command line replace the matching file values, key by
//! key, including keys of nested tables.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{Format, COMMANDS};
use crate::error::{self, config};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Globals {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub globals: Globals,
    sections: toml::Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<ConfigFile> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        error::require_file(path)?;
        let text = std::fs::read_to_string(path)?;
        let mut table: toml::Table = text.parse().map_err(|e| config(format!("{}: {e}", path.display())))?;
        let mut sections = toml::Table::new();
        for name in COMMANDS {
            if let Some(v) = table.remove(*name) {
                if !v.is_table() {
                    return Err(config(format!("[{name}] must be a table")));
                }
                sections.insert(name.to_string(), v);
            }
        }
        let globals = Globals::deserialize(toml::Value::Table(table))
            .map_err(|e| config(format!("{}: {}", path.display(), e.message())))?;
        Ok(ConfigFile { globals, sections })
    }

    /// The parameters of `command`: the file's table overlaid with the
    /// flags that were actually given.
    pub fn layer<T: Serialize + DeserializeOwned>(&self, command: &str, flags: &T) -> Result<T> {
        let mut base = match self.sections.get(command) {
            Some(toml::Value::Table(t)) => t.clone(),
            _ => toml::Table::new(),
        };
        let overlay = toml::Table::try_from(flags).map_err(|e| config(format!("[{command}]: {e}")))?;
        merge(&mut base, overlay);
        T::deserialize(toml::Value::Table(base)).map_err(|e| config(format!("[{command}]: {}", e.message())))
    }
}

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
