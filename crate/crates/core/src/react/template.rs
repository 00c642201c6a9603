use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("placeholder {{{0}}} is not bound")]
    Unbound(String),
}

pub type Bindings = BTreeMap<String, String>;

/// A prompt with `{name}` placeholders (lower-case letters and underscores).
///
/// Braces around anything else, such as the JSON samples inside tool
/// descriptions or an empty `{}`, are literal text. Rendering is a single
/// pass, so bound values are never re-scanned for placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    text: String,
}

enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

fn pieces(text: &str) -> Vec<Piece<'_>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut literal_start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let name_len = bytes[i + 1..]
                .iter()
                .take_while(|b| b.is_ascii_lowercase() || **b == b'_')
                .count();
            let close = i + 1 + name_len;
            if name_len > 0 && bytes.get(close) == Some(&b'}') {
                out.push(Piece::Text(&text[literal_start..i]));
                out.push(Piece::Slot(&text[i + 1..close]));
                i = close + 1;
                literal_start = i;
                continue;
            }
        }
        i += 1;
    }
    out.push(Piece::Text(&text[literal_start..]));
    out
}

impl PromptTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        Self { text: text.into() }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Placeholder names in order of first appearance.
    pub fn placeholders(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for p in pieces(&self.text) {
            if let Piece::Slot(n) = p {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
        }
        names
    }

    /// Substitutes every placeholder. Extra bindings are ignored.
    pub fn render(&self, bindings: &Bindings) -> Result<String, TemplateError> {
        let mut out = String::with_capacity(self.text.len());
        for p in pieces(&self.text) {
            match p {
                Piece::Text(t) => out.push_str(t),
                Piece::Slot(n) => match bindings.get(n) {
                    Some(v) => out.push_str(v),
                    None => return Err(TemplateError::Unbound(n.to_string())),
                },
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&str, &str)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn json_braces_are_literal() {
        let t = PromptTemplate::new("a {x} {\"k\": 1} {} {high, low} {x}");
        assert_eq!(t.placeholders(), vec!["x"]);
        assert_eq!(t.render(&bind(&[("x", "1")])).unwrap(), "a 1 {\"k\": 1} {} {high, low} 1");
    }

    #[test]
    fn unbound_placeholder_is_an_error() {
        let t = PromptTemplate::new("{summary} {input}");
        assert_eq!(
            t.render(&bind(&[("summary", "")])),
            Err(TemplateError::Unbound("input".into()))
        );
    }

    #[test]
    fn values_are_not_rescanned() {
        let t = PromptTemplate::new("{a}");
        assert_eq!(t.render(&bind(&[("a", "{a}")])).unwrap(), "{a}");
    }
}
