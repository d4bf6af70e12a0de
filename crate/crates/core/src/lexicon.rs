//! Lexical entries and explicit inflection tables.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{Case, Category, FeatureBundle, Gender, Language, Polarity};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexicalEntry {
    pub lemma: String,
    pub category: Category,
    pub features: FeatureBundle,
    pub surface: String,
}

/// Lookup key of an entry. Unique within a [`Lexicon`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntryKey {
    pub lemma: String,
    pub category: Category,
    pub features: FeatureBundle,
}

impl fmt::Display for EntryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.lemma, self.category, self.features)
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("no lexical entry for {0}")]
    MissingEntry(EntryKey),
    #[error("lexicon line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate lexical entry {0}")]
    Duplicate(EntryKey),
    #[error("invalid lexical entry {key}: {reason}")]
    Invalid { key: EntryKey, reason: String },
}

/// An immutable, validated set of lexical entries for one language.
#[derive(Debug, Clone)]
pub struct Lexicon {
    language: Language,
    entries: Vec<LexicalEntry>,
    by_key: HashMap<EntryKey, usize>,
    by_surface: HashMap<String, Vec<usize>>,
    by_category: HashMap<Category, Vec<usize>>,
}

impl Lexicon {
    pub fn new(language: Language, entries: Vec<LexicalEntry>) -> Result<Self, LexiconError> {
        let mut by_key = HashMap::with_capacity(entries.len());
        let mut by_surface: HashMap<String, Vec<usize>> = HashMap::new();
        let mut by_category: HashMap<Category, Vec<usize>> = HashMap::new();
        for (idx, entry) in entries.iter().enumerate() {
            let key = key_of(entry);
            validate_entry(language, entry).map_err(|reason| LexiconError::Invalid {
                key: key.clone(),
                reason,
            })?;
            if by_key.insert(key.clone(), idx).is_some() {
                return Err(LexiconError::Duplicate(key));
            }
            by_surface.entry(entry.surface.clone()).or_default().push(idx);
            by_category.entry(entry.category).or_default().push(idx);
        }
        Ok(Lexicon {
            language,
            entries,
            by_key,
            by_surface,
            by_category,
        })
    }

    /// Parses the tab-separated lexicon format:
    /// `lemma<TAB>category<TAB>features<TAB>surface`, `#` comments.
    pub fn parse(language: Language, text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let syntax = |message: String| LexiconError::Syntax {
                line: n + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(syntax(format!("expected 4 columns, found {}", cols.len())));
            }
            let category = cols[1].parse().map_err(|e| syntax(format!("{e}")))?;
            let features = FeatureBundle::parse_list(cols[2]).map_err(|e| syntax(format!("{e}")))?;
            entries.push(LexicalEntry {
                lemma: cols[0].to_string(),
                category,
                features,
                surface: cols[3].to_string(),
            });
        }
        Lexicon::new(language, entries)
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn entries(&self) -> &[LexicalEntry] {
        &self.entries
    }

    pub fn entry(&self, idx: usize) -> &LexicalEntry {
        &self.entries[idx]
    }

    pub fn by_category(&self, category: Category) -> &[usize] {
        self.by_category.get(&category).map_or(&[], Vec::as_slice)
    }

    /// Indices of all entries realized as `surface`.
    pub fn by_surface(&self, surface: &str) -> &[usize] {
        self.by_surface.get(surface).map_or(&[], Vec::as_slice)
    }

    pub fn lookup(&self, lemma: &str, category: Category, features: &FeatureBundle) -> Option<&LexicalEntry> {
        let key = EntryKey {
            lemma: lemma.to_string(),
            category,
            features: *features,
        };
        self.by_key.get(&key).map(|&i| &self.entries[i])
    }

    /// Surface form for `(lemma, category, features)`. A missing key is an
    /// error, never a fallback to some other form.
    pub fn inflect(&self, lemma: &str, category: Category, features: &FeatureBundle) -> Result<&str, LexiconError> {
        self.lookup(lemma, category, features)
            .map(|e| e.surface.as_str())
            .ok_or_else(|| {
                LexiconError::MissingEntry(EntryKey {
                    lemma: lemma.to_string(),
                    category,
                    features: *features,
                })
            })
    }

    /// True if some reading of `token` is a finite auxiliary or modal.
    pub fn is_auxiliary(&self, token: &str) -> bool {
        self.by_surface(token)
            .iter()
            .any(|&i| self.entries[i].category.is_auxiliary())
    }

    pub fn has_category(&self, token: &str, category: Category) -> bool {
        self.by_surface(token)
            .iter()
            .any(|&i| self.entries[i].category == category)
    }
}

fn key_of(entry: &LexicalEntry) -> EntryKey {
    EntryKey {
        lemma: entry.lemma.clone(),
        category: entry.category,
        features: entry.features,
    }
}

fn validate_entry(language: Language, entry: &LexicalEntry) -> Result<(), String> {
    let surface = &entry.surface;
    if surface.is_empty() {
        return Err("empty surface form".into());
    }
    if surface.chars().any(char::is_whitespace) {
        return Err("surface form contains whitespace".into());
    }
    if surface.to_lowercase() != *surface {
        return Err("surface form is not lowercase".into());
    }
    let f = &entry.features;
    match language {
        Language::En => {
            if f.case != Case::None || f.gender != Gender::None {
                return Err("English entries carry no case or gender".into());
            }
            if f.polarity != Polarity::None && entry.category != Category::Aux {
                return Err("only auxiliaries carry polarity".into());
            }
        }
        Language::De => {
            if matches!(entry.category, Category::Noun | Category::Det | Category::RelPron)
                && (f.case == Case::None || f.gender == Gender::None)
            {
                return Err("German nominal entries need case and gender".into());
            }
            if f.polarity != Polarity::None {
                return Err("German entries carry no polarity".into());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Number, VerbForm};
    use crate::grammar::Grammar;

    fn bundle(text: &str) -> FeatureBundle {
        FeatureBundle::parse_list(text).unwrap()
    }

    #[test]
    fn german_determiner_and_auxiliary_forms() {
        let g = Grammar::default_for(Language::De);
        let lex = g.lexicon();
        assert_eq!(lex.inflect("mein", Category::Det, &bundle("num=pl,case=dat,gen=masc")).unwrap(), "meinen");
        assert_eq!(
            lex.inflect("werden", Category::Aux, &bundle("num=sg,vform=preterite")).unwrap(),
            "wurde"
        );
        assert_eq!(
            lex.inflect("werden", Category::Aux, &bundle("num=pl,vform=preterite")).unwrap(),
            "wurden"
        );
        assert_eq!(lex.inflect("unser", Category::Det, &bundle("num=pl,case=dat,gen=neut")).unwrap(), "unseren");
        assert_eq!(lex.inflect("ziesel", Category::Noun, &bundle("num=pl,case=dat,gen=neut")).unwrap(), "zieseln");
        assert_eq!(lex.inflect("der", Category::RelPron, &bundle("num=sg,case=acc,gen=masc")).unwrap(), "den");
    }

    #[test]
    fn english_identity_inflection() {
        let g = Grammar::default_for(Language::En);
        let f = FeatureBundle {
            number: Some(Number::Pl),
            polarity: Polarity::Pos,
            verbform: VerbForm::Finite,
            ..FeatureBundle::default()
        };
        assert_eq!(g.lexicon().inflect("have", Category::Aux, &f).unwrap(), "have");
    }

    #[test]
    fn missing_entry_names_the_key() {
        let g = Grammar::default_for(Language::De);
        let err = g
            .lexicon()
            .inflect("ein", Category::Det, &bundle("num=pl,case=nom,gen=masc"))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ein") && msg.contains("num=pl"), "{msg}");
    }

    #[test]
    fn rejects_invalid_entries() {
        let bad_case = "yak\tNoun\tnum=sg,case=nom\tyak\n";
        assert!(matches!(
            Lexicon::parse(Language::En, bad_case),
            Err(LexiconError::Invalid { .. })
        ));
        let no_gender = "hund\tNoun\tnum=sg,case=nom\thund\n";
        assert!(Lexicon::parse(Language::De, no_gender).is_err());
        let upper = "yak\tNoun\tnum=sg\tYak\n";
        assert!(Lexicon::parse(Language::En, upper).is_err());
        let dup = "yak\tNoun\tnum=sg\tyak\nyak\tNoun\tnum=sg\tyaks\n";
        assert!(matches!(Lexicon::parse(Language::En, dup), Err(LexiconError::Duplicate(_))));
        let pol = "a\tDet\tnum=sg,pol=neg\ta\n";
        assert!(Lexicon::parse(Language::En, pol).is_err());
        assert!(matches!(
            Lexicon::parse(Language::En, "yak\tNoun\n"),
            Err(LexiconError::Syntax { line: 1, .. })
        ));
    }
}
