//! Sentence segmentation.

use std::collections::HashSet;

/// Splits a document into sentences.
pub trait Segmenter: Send + Sync {
    fn segment(&self, text: &str) -> Vec<String>;

    /// Short name recorded in run metadata.
    fn name(&self) -> &'static str;
}

const ABBREVIATIONS: &[&str] = &[
    "Dr", "Mr", "Mrs", "Ms", "Prof", "Sr", "Jr", "St", "Mt", "Ft", "Gen", "Gov", "Sen", "Rep", "Col", "Capt", "Lt",
    "Sgt", "Rev", "Hon", "Inc", "Ltd", "Co", "Corp", "Bros", "No", "Nos", "Fig", "Vol", "vs", "etc", "approx", "Jan",
    "Feb", "Mar", "Apr", "Jun", "Jul", "Aug", "Sep", "Sept", "Oct", "Nov", "Dec",
];

/// Splits after `.`, `?` or `!` (plus any closing quotes or brackets) when
/// whitespace and an uppercase letter follow. A period after a listed
/// abbreviation, a single-letter initial or a dotted acronym (`U.S.`) does
/// not end a sentence.
#[derive(Debug, Clone)]
pub struct RuleSegmenter {
    abbreviations: HashSet<String>,
}

impl Default for RuleSegmenter {
    fn default() -> Self {
        RuleSegmenter::with_abbreviations(ABBREVIATIONS.iter().copied())
    }
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}' | '\u{bb}')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}' | '\u{ab}')
}

impl RuleSegmenter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RuleSegmenter {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
        }
    }

    fn guards(&self, word: &str) -> bool {
        let word = word.trim_start_matches(is_opener);
        if self.abbreviations.contains(word) {
            return true;
        }
        let mut chars = word.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            return c.is_uppercase();
        }
        word.contains('.') && word.split('.').all(|p| p.chars().count() == 1)
    }
}

impl Segmenter for RuleSegmenter {
    fn segment(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut out = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if !matches!(c, '.' | '?' | '!') {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < chars.len() && (matches!(chars[j].1, '.' | '?' | '!') || is_closer(chars[j].1)) {
                j += 1;
            }
            let mut k = j;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            let mut next = k;
            while next < chars.len() && is_opener(chars[next].1) {
                next += 1;
            }
            let breaks = k > j && next < chars.len() && chars[next].1.is_uppercase();
            let guarded = c == '.' && j == i + 1 && {
                let word_start = text[..pos].rfind(char::is_whitespace).map_or(0, |w| w + 1);
                self.guards(&text[word_start..pos])
            };
            if breaks && !guarded {
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                let sentence = text[start..end].trim();
                if !sentence.is_empty() {
                    out.push(sentence.to_string());
                }
                start = chars[k].0;
            }
            i = j;
        }
        let rest = text[start..].trim();
        if !rest.is_empty() {
            out.push(rest.to_string());
        }
        out
    }

    fn name(&self) -> &'static str {
        "rule"
    }
}

/// One sentence per non-empty line, for pre-segmented input.
#[derive(Debug, Clone, Copy, Default)]
pub struct NewlineSegmenter;

impl Segmenter for NewlineSegmenter {
    fn segment(&self, text: &str) -> Vec<String> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect()
    }

    fn name(&self) -> &'static str {
        "newline"
    }
}
