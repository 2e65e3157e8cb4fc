//! `key = value` configuration files mirroring the command-line flags.
//!
//! Keys are flag names without the leading dashes (`mod`, `snr-db`,
//! `lengths`, ...). The special key `command` names the subcommand. A value of
//! `true` turns a switch on and `false` leaves it off. Lines starting with `#`
//! and blank lines are ignored.

use std::ffi::OsString;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub reason: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config line {}: {}", self.line, self.reason)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub command: Option<String>,
    /// Remaining entries in file order.
    pub entries: Vec<(String, String)>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut out = ConfigFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| ConfigError {
            line: i + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(err(format!("invalid key {key:?}")));
        }
        let key = key.replace('_', "-");
        if key == "config" {
            return Err(err("config files cannot include other config files".into()));
        }
        if key == "command" {
            if out.command.replace(value.to_string()).is_some() {
                return Err(err("command given twice".into()));
            }
            continue;
        }
        if out.entries.iter().any(|(k, _)| *k == key) {
            return Err(err(format!("key {key:?} given twice")));
        }
        out.entries.push((key, value.to_string()));
    }
    Ok(out)
}

impl ConfigFile {
    /// Flag arguments equivalent to the file's entries.
    pub fn to_args(&self) -> Vec<OsString> {
        let mut args = Vec::new();
        for (key, value) in &self.entries {
            match value.as_str() {
                "true" => args.push(format!("--{key}").into()),
                "false" => {}
                v => {
                    args.push(format!("--{key}").into());
                    args.push(v.into());
                }
            }
        }
        args
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries() {
        let c = parse_config("# run\ncommand = spectrum\nmod = 40\npoly = 13x + 10x^2\n\noracle = false\njson_out=true\n").unwrap();
        assert_eq!(c.command.as_deref(), Some("spectrum"));
        assert_eq!(
            c.to_args(),
            ["--mod", "40", "--poly", "13x + 10x^2", "--json-out"]
                .map(OsString::from)
                .to_vec()
        );
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(parse_config("mod 40").unwrap_err().line, 1);
        assert!(parse_config("a=1\na=2").is_err());
        assert!(parse_config("=3").is_err());
        assert!(parse_config("m od = 3").is_err());
        assert!(parse_config("config = x").is_err());
        assert!(parse_config("command = a\ncommand = b").is_err());
    }
}
