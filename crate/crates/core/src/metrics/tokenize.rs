//! Canonical tokenization.
//!
//! Text is split on whitespace; leading and trailing punctuation characters
//! of each chunk are peeled off one at a time into their own tokens. Tags of
//! the form `<word>` (or `⟨word⟩`) are never split. Every token offset in
//! the crate, including coreference spans, refers to this tokenization.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// A token as it appears in the source text, with its byte range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span<'a> {
    pub text: &'a str,
    pub range: Range<usize>,
}

impl<'a> Span<'a> {
    pub fn start(&self) -> usize {
        self.range.start
    }

    pub fn end(&self) -> usize {
        self.range.end
    }
}

/// Lowercased canonical tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl<'a> FromIterator<&'a str> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        TokenSeq(
            iter.into_iter()
                .filter(|t| !t.is_empty())
                .map(str::to_lowercase)
                .collect(),
        )
    }
}

pub fn tokenize(text: &str) -> TokenSeq {
    surface_tokens(text).iter().map(|s| s.text).collect()
}

pub(crate) fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Length in bytes of a tag at the start of `s`, if there is one.
fn leading_tag(s: &str) -> Option<usize> {
    tag_len(s, '<', '>').or_else(|| tag_len(s, '⟨', '⟩'))
}

fn tag_len(s: &str, open: char, close: char) -> Option<usize> {
    let rest = s.strip_prefix(open)?;
    let end = rest.find(close)?;
    let body = &rest[..end];
    let valid = !body.is_empty() && body.chars().all(|c| c.is_alphanumeric() || c == '_');
    valid.then(|| open.len_utf8() + end + close.len_utf8())
}

/// Length in bytes of a tag at the end of `s`, if there is one.
fn trailing_tag(s: &str) -> Option<usize> {
    for (open, close) in [('<', '>'), ('⟨', '⟩')] {
        if !s.ends_with(close) {
            continue;
        }
        if let Some(start) = s.rfind(open) {
            if tag_len(&s[start..], open, close) == Some(s.len() - start) {
                return Some(s.len() - start);
            }
        }
    }
    None
}

pub fn is_tag(token: &str) -> bool {
    leading_tag(token) == Some(token.len())
}

/// Surface tokens of `text`, case preserved.
pub fn surface_tokens(text: &str) -> Vec<Span<'_>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for chunk in text.split_inclusive(char::is_whitespace) {
        let trimmed = chunk.trim_end();
        if !trimmed.is_empty() {
            split_chunk(text, offset, offset + trimmed.len(), &mut out);
        }
        offset += chunk.len();
    }
    out
}

fn split_chunk<'a>(text: &'a str, mut lo: usize, mut hi: usize, out: &mut Vec<Span<'a>>) {
    let push = |out: &mut Vec<Span<'a>>, range: Range<usize>| {
        out.push(Span {
            text: &text[range.clone()],
            range,
        })
    };
    while lo < hi {
        let s = &text[lo..hi];
        if let Some(len) = leading_tag(s) {
            push(out, lo..lo + len);
            lo += len;
            continue;
        }
        let c = s.chars().next().unwrap();
        if is_punct(c) {
            push(out, lo..lo + c.len_utf8());
            lo += c.len_utf8();
            continue;
        }
        break;
    }
    let mut tail = Vec::new();
    while lo < hi {
        let s = &text[lo..hi];
        if let Some(len) = trailing_tag(s) {
            tail.push(hi - len..hi);
            hi -= len;
            continue;
        }
        let c = s.chars().next_back().unwrap();
        if is_punct(c) {
            tail.push(hi - c.len_utf8()..hi);
            hi -= c.len_utf8();
            continue;
        }
        break;
    }
    if lo < hi {
        push(out, lo..hi);
    }
    for range in tail.into_iter().rev() {
        push(out, range);
    }
}

const ATTACH_LEFT: &[&str] = &[".", ",", "!", "?", ";", ":", "%", ")", "]", "}", "'"];
const ATTACH_RIGHT: &[&str] = &["(", "[", "{", "$", "#"];

/// Joins surface tokens back into text, re-attaching punctuation.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = false;
    for (i, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        if i > 0 && !glue_next && !ATTACH_LEFT.contains(&token) {
            out.push(' ');
        }
        out.push_str(token);
        glue_next = ATTACH_RIGHT.contains(&token);
    }
    out
}

/// Splits running text into sentences after `.`, `!` or `?` (plus any
/// closing quotes or brackets) when followed by whitespace.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut chars = text.trim().chars().peekable();
    while let Some(c) = chars.next() {
        current.push(c);
        if matches!(c, '.' | '!' | '?') {
            while let Some(&next) = chars.peek() {
                if matches!(next, '.' | '!' | '?' | '"' | '\'' | '”' | '’' | ')') {
                    current.push(next);
                    chars.next();
                } else {
                    break;
                }
            }
            // A lowercase continuation keeps quoted speech with its tag.
            let rest = chars.clone().find(|n| !n.is_whitespace());
            if chars.peek().is_none_or(|n| n.is_whitespace()) && !rest.is_some_and(char::is_lowercase) {
                let s = current.trim();
                if !s.is_empty() {
                    sentences.push(s.to_string());
                }
                current.clear();
            }
        }
    }
    let s = current.trim();
    if !s.is_empty() {
        sentences.push(s.to_string());
    }
    sentences
}
