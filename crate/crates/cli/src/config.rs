use std::fs;
use std::path::Path;

use crate::UsageError;

/// `key = value` lines; `#` comments. Keys are long flag names of the subcommand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub entries: Vec<(String, String)>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected `key = value`", i + 1)))?;
            let k = k.trim().replace('_', "-");
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(UsageError(format!("config line {}: bad key {k:?}", i + 1)));
            }
            entries.push((k, v.trim().to_string()));
        }
        Ok(ExperimentConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// As command-line flags. `true` becomes a bare switch, `false` is dropped.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, v) in &self.entries {
            match v.as_str() {
                "true" => out.push(format!("--{k}")),
                "false" => {}
                _ => {
                    out.push(format!("--{k}"));
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

/// Splices the file named by `--config` in front of the subcommand's own flags, so flags win.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>, UsageError> {
    let mut rest = Vec::new();
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| UsageError("--config needs a path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let extra = ExperimentConfig::load(Path::new(&path))?.to_args();
    // after the program name and the first non-flag word (the subcommand)
    let at = rest.iter().skip(1).position(|a| !a.starts_with('-')).map_or(rest.len(), |p| p + 2);
    rest.splice(at..at, extra);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_orders() {
        let c = ExperimentConfig::parse("# run\nradius = 8\nseed=3 # inline\npad = true\nforce_ilp = false\n").unwrap();
        assert_eq!(c.to_args(), ["--radius", "8", "--seed", "3", "--pad"]);
        assert!(ExperimentConfig::parse("radius 8").is_err());
    }
}
