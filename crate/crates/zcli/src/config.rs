//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored, as is anything after
//! a `#` that follows whitespace. Keys use the long names of the global and
//! per-command flags (`workers`, `omega`, `rounding`, ...). Values given on
//! the command line take precedence.

use std::collections::BTreeMap;
use std::path::Path;

/// Parses configuration text into a sorted map.
///
/// ```
/// let c = zcli::config::parse("# defaults\nworkers = 2\nrounding = nearest  # Table I mode\n").unwrap();
/// assert_eq!(c["workers"], "2");
/// assert_eq!(c["rounding"], "nearest");
/// ```
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find(" #").or_else(|| raw.find("\t#")) {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected `key = value`, got `{raw}`", i + 1));
        };
        let key = k.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("line {}: invalid key `{key}`", i + 1));
        }
        if out.insert(key.replace('_', "-"), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", i + 1));
        }
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Resolves one setting: command line first, then the file, then `default`.
pub fn pick<T: std::str::FromStr>(
    cli: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s.parse().map_err(|e| format!("config key `{key}`: {e}")),
        None => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse("workers 2").is_err());
        assert!(parse("a = 1\na = 2").is_err());
        assert!(parse("bad key = 1").is_err());
    }

    #[test]
    fn underscores_and_dashes_are_the_same_key() {
        let c = parse("term_budget = 5").unwrap();
        assert_eq!(pick(None::<u64>, &c, "term-budget", 0).unwrap(), 5);
        assert_eq!(pick(Some(7u64), &c, "term-budget", 0).unwrap(), 7);
        assert_eq!(pick(None::<u64>, &c, "reps", 9).unwrap(), 9);
    }
}
