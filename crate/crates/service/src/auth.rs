//! Bearer tokens mapped to annotator ids, read from a static file.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TokenError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `token annotator`")]
    Malformed { line: usize },
    #[error("line {line}: token listed twice")]
    Duplicate { line: usize },
}

#[derive(Clone, Debug, Default)]
pub struct Tokens(HashMap<String, String>);

impl Tokens {
    /// One `token annotator` pair per line; blank lines and `#` comments
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self, TokenError> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(token), Some(who), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(TokenError::Malformed { line: i + 1 });
            };
            if map.insert(token.to_string(), who.to_string()).is_some() {
                return Err(TokenError::Duplicate { line: i + 1 });
            }
        }
        Ok(Tokens(map))
    }

    pub fn load(path: &Path) -> Result<Self, TokenError> {
        let text = fs::read_to_string(path).map_err(|source| TokenError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Tokens::parse(&text)
    }

    pub fn annotator(&self, token: &str) -> Option<&str> {
        self.0.get(token).map(String::as_str)
    }

    /// The annotator named by an `Authorization: Bearer …` header value.
    pub fn authorize(&self, header: &str) -> Option<&str> {
        let token = header.strip_prefix("Bearer ")?.trim();
        self.annotator(token)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_authorizes() {
        let t = Tokens::parse("# campaign one\nabc ann\n\nxyz bob\n").unwrap();
        assert_eq!(t.authorize("Bearer abc"), Some("ann"));
        assert_eq!(t.authorize("Bearer nope"), None);
        assert_eq!(t.authorize("abc"), None);
        assert!(matches!(Tokens::parse("abc"), Err(TokenError::Malformed { line: 1 })));
        assert!(matches!(
            Tokens::parse("a x\na y"),
            Err(TokenError::Duplicate { line: 2 })
        ));
    }
}
