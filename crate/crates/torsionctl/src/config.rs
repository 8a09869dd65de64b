//! Flat key-value run configuration with sections mirroring the
//! subcommands; command-line flags override file values.
//!
//! ```text
//! # comment
//! [heat]
//! k = 2
//! times = 0.05,0.2,1.0
//! ```

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::from("global");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(format!("line {}: unterminated section header", lineno + 1));
                }
                current = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(format!("line {}: expected key = value", lineno + 1))?;
            sections
                .entry(current.clone())
                .or_default()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(RunConfig { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .or_else(|| self.sections.get("global").and_then(|s| s.get(key)))
            .map(|s| s.as_str())
    }

    /// flag value if set, else config value, else default
    pub fn resolve<T: std::str::FromStr + Copy>(
        &self,
        flag: Option<T>,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(section, key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| format!("config {section}.{key}: cannot parse `{raw}`")),
            None => Ok(default),
        }
    }
}

/// Comma-separated float list.
pub fn parse_f64_list(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse `{s}` as a number"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let cfg = RunConfig::parse("# hi\n[heat]\nk = 2\ntimes = 0.05,0.2\n[torsion]\nk = 3\n")
            .unwrap();
        assert_eq!(cfg.get("heat", "k"), Some("2"));
        assert_eq!(cfg.get("torsion", "k"), Some("3"));
        assert_eq!(cfg.get("heat", "missing"), None);
    }

    #[test]
    fn flag_overrides_file() {
        let cfg = RunConfig::parse("[heat]\nk = 2\n").unwrap();
        let v: u64 = cfg.resolve(Some(5u64), "heat", "k", 1).unwrap();
        assert_eq!(v, 5);
        let v: u64 = cfg.resolve(None, "heat", "k", 1).unwrap();
        assert_eq!(v, 2);
    }

    #[test]
    fn float_lists() {
        assert_eq!(parse_f64_list("0.05, 0.2,1.0").unwrap(), vec![0.05, 0.2, 1.0]);
        assert!(parse_f64_list("a,b").is_err());
    }
}
