//! Config-file loading, flag overlay and run directories.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

const SECTIONS: [&str; 7] = [
    "simulate", "converge", "camel", "modes", "capacity", "displace", "algebra",
];

/// Parsed TOML config: global keys plus one table per subcommand.
#[derive(Debug, Default)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    sections: Map<String, Value>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| Failure::Invalid(format!("config {}: {e}", path.display())))?;
        let mut cfg = FileConfig::default();
        for (key, value) in table {
            match key.as_str() {
                "seed" => {
                    let seed = value
                        .as_integer()
                        .filter(|s| *s >= 0)
                        .ok_or_else(|| Failure::Invalid("config `seed` must be a non-negative integer".into()))?;
                    cfg.seed = Some(seed as u64);
                }
                "out" => {
                    let out = value
                        .as_str()
                        .ok_or_else(|| Failure::Invalid("config `out` must be a string".into()))?;
                    cfg.out = Some(PathBuf::from(out));
                }
                s if SECTIONS.contains(&s) => {
                    if !value.is_table() {
                        return Err(Failure::Invalid(format!("config section `{s}` must be a table")));
                    }
                    let json = serde_json::to_value(&value).map_err(|e| Failure::Invalid(e.to_string()))?;
                    cfg.sections.insert(key, json);
                }
                other => return Err(Failure::Invalid(format!("unknown config key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    /// Config section overlaid with every flag that was given, then
    /// deserialized (and schema-checked) into the resolved parameters.
    pub fn resolve<F: Serialize, T: DeserializeOwned>(&self, section: &str, flags: &F) -> Result<T, Failure> {
        let mut merged = match self.sections.get(section) {
            Some(Value::Object(m)) => m.clone(),
            _ => Map::new(),
        };
        if let Value::Object(given) = serde_json::to_value(flags).map_err(|e| Failure::Invalid(e.to_string()))? {
            for (k, v) in given {
                if !v.is_null() {
                    merged.insert(k, v);
                }
            }
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::Invalid(format!("[{section}] {e}")))
    }
}

/// Provenance shared by every artifact of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub params: Value,
}

impl Provenance {
    pub fn new<P: Serialize>(command: &str, seed: u64, params: &P) -> Self {
        let params = serde_json::to_value(params).expect("parameters serialize");
        let canonical = serde_json::json!({ "command": command, "seed": seed, "params": params });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash,
            params,
        }
    }

    /// `# key=value` lines, parameters flattened as `param.<name>`.
    pub fn header(&self) -> Vec<(String, String)> {
        let mut h = vec![
            ("command".to_string(), self.command.clone()),
            ("version".to_string(), self.version.clone()),
            ("seed".to_string(), self.seed.to_string()),
            ("config_hash".to_string(), self.config_hash.clone()),
        ];
        if let Value::Object(m) = &self.params {
            for (k, v) in m {
                h.push((format!("param.{k}"), v.to_string()));
            }
        }
        h
    }

    pub fn header_text(&self) -> String {
        self.header().iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }
}

/// `<out>/run-<unix seconds>-<first 16 hex digits of the config hash>`.
pub struct RunDir {
    pub path: PathBuf,
    pub provenance: Provenance,
}

impl RunDir {
    pub fn create(out: &Path, provenance: Provenance) -> Result<Self, Failure> {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let path = out.join(format!("run-{secs}-{}", &provenance.config_hash[..16]));
        fs::create_dir_all(&path).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))?;
        Ok(Self { path, provenance })
    }

    /// Writes `body` after the provenance header.
    pub fn write_csv(&self, name: &str, body: &str) -> Result<(), Failure> {
        self.write(name, &format!("{}{body}", self.provenance.header_text()))
    }

    /// Writes `{"provenance": ..., "summary": ...}`.
    pub fn write_json<S: Serialize>(&self, name: &str, summary: &S) -> Result<(), Failure> {
        let doc = serde_json::json!({ "provenance": self.provenance, "summary": summary });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Runtime(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    fn write(&self, name: &str, text: &str) -> Result<(), Failure> {
        let p = self.path.join(name);
        fs::write(&p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display())))
    }
}
