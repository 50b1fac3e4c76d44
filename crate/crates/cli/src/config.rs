//! `--config` files. Keys mirror long flags: top-level `seed` applies to
//! every subcommand, and a table named after a subcommand supplies its
//! flags. Flags given on the command line win.

use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: unsupported value for `{key}`")]
    Value { path: String, key: String },
    #[error("{path}: unknown top-level key `{key}`")]
    UnknownKey { path: String, key: String },
}

const GLOBAL_KEYS: [&str; 1] = ["seed"];

fn scalar(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        _ => None,
    }
}

fn push_flag(out: &mut Vec<String>, path: &str, key: &str, v: &toml::Value) -> Result<(), ConfigError> {
    let flag = format!("--{}", key.replace('_', "-"));
    let bad = || ConfigError::Value {
        path: path.to_string(),
        key: key.to_string(),
    };
    match v {
        toml::Value::Boolean(true) => out.push(flag),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            for item in items {
                out.push(flag.clone());
                out.push(scalar(item).ok_or_else(bad)?);
            }
        }
        other => {
            out.push(flag);
            out.push(scalar(other).ok_or_else(bad)?);
        }
    }
    Ok(())
}

/// Command-line tokens equivalent to the config's settings for `subcommand`.
pub fn flags_for(text: &str, path: &str, subcommand: &str) -> Result<Vec<String>, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (key, value) in &table {
        match value {
            toml::Value::Table(section) => {
                if key == subcommand {
                    for (k, v) in section {
                        push_flag(&mut out, path, k, v)?;
                    }
                }
            }
            v if GLOBAL_KEYS.contains(&key.as_str()) => push_flag(&mut out, path, key, v)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    path: path.to_string(),
                    key: key.clone(),
                })
            }
        }
    }
    Ok(out)
}

pub fn load_flags(path: &Path, subcommand: &str) -> Result<Vec<String>, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: shown.clone(),
        source,
    })?;
    flags_for(&text, &shown, subcommand)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrors_flags() {
        let text = "seed = 7\n[train]\nmodel = \"biaffine\"\nmax_epochs = 20\nlearning_rate = 0.001\n\n[agree]\nfilters = [\"all\", \"ap\"]\n";
        assert_eq!(
            flags_for(text, "c.toml", "train").unwrap(),
            ["--seed", "7", "--learning-rate", "0.001", "--max-epochs", "20", "--model", "biaffine"]
        );
        assert_eq!(
            flags_for(text, "c.toml", "agree").unwrap(),
            ["--filters", "all", "--filters", "ap", "--seed", "7"]
        );
        assert!(matches!(
            flags_for("bogus = 1", "c.toml", "train"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }
}
