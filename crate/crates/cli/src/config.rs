//! Flat `key = value` config files. Keys are long flag names without the
//! leading dashes; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

pub const KEYS: [&str; 17] = [
    "protocol", "family", "n", "k", "epsilon", "delta", "trials", "seed", "out", "access", "instances", "rank",
    "t", "order", "exponent", "scale", "threads",
];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(format!("line {}: unknown key `{key}`", i + 1));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_spacing() {
        let m = parse("# header\nprotocol = eq  # trailing\n\n epsilon=0.1,0.05\n").unwrap();
        assert_eq!(m["protocol"], "eq");
        assert_eq!(m["epsilon"], "0.1,0.05");
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn rejects_unknown_keys_and_bare_words() {
        assert!(parse("colour = blue").is_err());
        assert!(parse("protocol").is_err());
    }
}
