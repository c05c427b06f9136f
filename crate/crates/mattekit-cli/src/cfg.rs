//! Optional JSON config file and flag resolution.
//!
//! The file holds one object per subcommand, keyed by the long flag names:
//!
//! ```json
//! { "eval": { "band-radius": 5 }, "filter": { "epsilon": 0.1, "t": 0.1 } }
//! ```
//!
//! Precedence: explicit flags, then the config file, then (for --workers)
//! the MATTEKIT_WORKERS environment variable, then built-in defaults.

use std::path::Path;

use serde_json::Value;

pub struct ConfigFile {
    root: Value,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let root = match path {
            None => Value::Null,
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("invalid config {}: {e}", p.display()))?
            }
        };
        Ok(ConfigFile { root })
    }

    fn raw(&self, command: &str, key: &str) -> Option<&Value> {
        self.root.get(command)?.get(key)
    }

    pub fn get_f64(&self, command: &str, key: &str) -> Option<f64> {
        self.raw(command, key)?.as_f64()
    }

    pub fn get_usize(&self, command: &str, key: &str) -> Option<usize> {
        self.raw(command, key)?.as_u64().map(|v| v as usize)
    }

    pub fn get_u64(&self, command: &str, key: &str) -> Option<u64> {
        self.raw(command, key)?.as_u64()
    }

    pub fn get_u32(&self, command: &str, key: &str) -> Option<u32> {
        self.raw(command, key)?.as_u64().map(|v| v as u32)
    }

    pub fn get_string(&self, command: &str, key: &str) -> Option<String> {
        self.raw(command, key)?.as_str().map(String::from)
    }
}

/// Resolves the worker count: flag, then config, then MATTEKIT_WORKERS,
/// then 0 (meaning the default pool size).
pub fn resolve_workers(flag: Option<usize>, config: &ConfigFile, command: &str) -> usize {
    flag.or_else(|| config.get_usize(command, "workers"))
        .or_else(|| {
            std::env::var("MATTEKIT_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0)
}
