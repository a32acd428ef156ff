//! `--config <path>` files: one `key = value` per line, `#` comments. Entries
//! are spliced in front of the command-line flags, so later flags win.

use std::ffi::OsString;

use clap::CommandFactory;

use crate::Cli;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(ConfigError(format!("line {}: empty key", lineno + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Inserts the entries of the `--config` file right after the subcommand
/// name. Keys that some other subcommand accepts are ignored, so one file can
/// serve several subcommands; keys no subcommand knows are rejected.
pub fn merge_config_file(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let entries = parse_entries(&text)?;
    let Some(sub_pos) = args.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(args);
    };
    let sub_pos = sub_pos + 1;
    let command = Cli::command();
    let sub_name = args[sub_pos].to_string_lossy().to_string();
    let Some(sub) = command.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let accepts = |cmd: &clap::Command, key: &str| cmd.get_arguments().any(|a| a.get_long() == Some(key));
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err(ConfigError("config files cannot include other config files".into()));
        }
        if accepts(sub, &key) {
            let arg = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())).unwrap();
            if arg.get_action().takes_values() {
                injected.push(format!("--{key}").into());
                injected.push(value.into());
            } else if matches!(value.as_str(), "true" | "1" | "yes") {
                injected.push(format!("--{key}").into());
            } else if !matches!(value.as_str(), "false" | "0" | "no") {
                return Err(ConfigError(format!("{key}: expected a boolean, got {value:?}")));
            }
        } else if !command.get_subcommands().any(|c| accepts(c, &key)) {
            return Err(ConfigError(format!("unknown config key {key:?}")));
        }
    }
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub_pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let e = parse_entries("# header\nmax_attempts = 3\n\nseed=9 # trailing\n").unwrap();
        assert_eq!(e, vec![("max-attempts".into(), "3".into()), ("seed".into(), "9".into())]);
        assert!(parse_entries("novalue\n").is_err());
    }
}
