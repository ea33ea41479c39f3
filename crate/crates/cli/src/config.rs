//! `key = value` configuration files. Blank lines and `#` comments are
//! ignored; unknown keys are rejected.

use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FileConfig {
    pub binary_limit: Option<usize>,
    pub ternary_limit: Option<usize>,
    pub other_limit: Option<usize>,
    pub alpha: Option<String>,
    pub grid: Option<usize>,
    pub b: Option<usize>,
    pub max_n: Option<usize>,
    pub max_k: Option<usize>,
}

pub const KEYS: [&str; 8] = [
    "binary_limit",
    "ternary_limit",
    "other_limit",
    "alpha",
    "grid",
    "b",
    "max_n",
    "max_k",
];

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected key = value, got {raw:?}", i + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let number = || -> Result<usize> {
                value
                    .parse()
                    .with_context(|| format!("config line {}: {key} must be a nonnegative integer", i + 1))
            };
            match key {
                "binary_limit" => cfg.binary_limit = Some(number()?),
                "ternary_limit" => cfg.ternary_limit = Some(number()?),
                "other_limit" => cfg.other_limit = Some(number()?),
                "alpha" => cfg.alpha = Some(value.to_string()),
                "grid" => cfg.grid = Some(number()?),
                "b" => cfg.b = Some(number()?),
                "max_n" => cfg.max_n = Some(number()?),
                "max_k" => cfg.max_k = Some(number()?),
                _ => bail!(
                    "config line {}: unknown key {key:?} (known: {})",
                    i + 1,
                    KEYS.join(", ")
                ),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = FileConfig::parse("# limits\nbinary_limit = 8\n\nalpha=1/100 # strict\n").unwrap();
        assert_eq!(cfg.binary_limit, Some(8));
        assert_eq!(cfg.alpha.as_deref(), Some("1/100"));
        assert_eq!(cfg.grid, None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("grid = many").is_err());
        assert!(FileConfig::parse("grid").is_err());
    }
}
