//! Closed feature inventories shared by the lexicon, grammar and oracles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! feature_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(
                #[serde(rename = $text)]
                $variant,
            )+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownValue;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(UnknownValue {
                        kind: stringify!($name),
                        value: s.to_string(),
                    }),
                }
            }
        }
    };
}

/// A string that does not name any variant of a feature enum.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} value `{value}`")]
pub struct UnknownValue {
    pub kind: &'static str,
    pub value: String,
}

feature_enum!(
    /// Language of a grammar, lexicon or example.
    Language { En => "en", De => "de" }
);

feature_enum!(
    Category {
        Det => "Det",
        Noun => "Noun",
        VTrans => "VTrans",
        VIntrans => "VIntrans",
        Aux => "Aux",
        Modal => "Modal",
        Prep => "Prep",
        RelPron => "RelPron",
        Negation => "Negation",
    }
);

feature_enum!(Number { Sg => "sg", Pl => "pl" });

feature_enum!(
    Case {
        Nom => "nom",
        Acc => "acc",
        Dat => "dat",
        None => "none",
    }
);

feature_enum!(
    Gender {
        Masc => "masc",
        Fem => "fem",
        Neut => "neut",
        None => "none",
    }
);

feature_enum!(
    Polarity {
        Pos => "pos",
        Neg => "neg",
        None => "none",
    }
);

feature_enum!(
    VerbForm {
        Finite => "finite",
        Infinitive => "infinitive",
        PastParticiple => "past-participle",
        Preterite => "preterite",
        None => "none",
    }
);

impl Category {
    /// Finite auxiliaries and modals: the items question formation fronts.
    pub fn is_auxiliary(self) -> bool {
        matches!(self, Category::Aux | Category::Modal)
    }

    pub fn is_verb(self) -> bool {
        matches!(self, Category::VTrans | Category::VIntrans)
    }
}

/// Morphosyntactic features of a lexical entry or constituent.
///
/// `number` is absent for number-neutral items (English prepositions,
/// relative pronouns and non-finite verb forms).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureBundle {
    pub number: Option<Number>,
    pub case: Case,
    pub gender: Gender,
    pub polarity: Polarity,
    pub verbform: VerbForm,
}

impl Default for FeatureBundle {
    fn default() -> Self {
        FeatureBundle {
            number: None,
            case: Case::None,
            gender: Gender::None,
            polarity: Polarity::None,
            verbform: VerbForm::None,
        }
    }
}

/// Names of the lexical features as they appear in grammar and lexicon files.
pub const LEXICAL_FEATURES: [&str; 6] = ["num", "case", "gen", "pol", "vform", "lemma"];

impl FeatureBundle {
    pub fn with_number(mut self, number: Number) -> Self {
        self.number = Some(number);
        self
    }

    pub fn with_case(mut self, case: Case) -> Self {
        self.case = case;
        self
    }

    pub fn with_verbform(mut self, verbform: VerbForm) -> Self {
        self.verbform = verbform;
        self
    }

    /// Value of a named feature (`num`, `case`, `gen`, `pol`, `vform`), `None`
    /// when unset.
    pub fn get(&self, name: &str) -> Option<&'static str> {
        match name {
            "num" => self.number.map(Number::as_str),
            "case" => (self.case != Case::None).then(|| self.case.as_str()),
            "gen" => (self.gender != Gender::None).then(|| self.gender.as_str()),
            "pol" => (self.polarity != Polarity::None).then(|| self.polarity.as_str()),
            "vform" => (self.verbform != VerbForm::None).then(|| self.verbform.as_str()),
            _ => None,
        }
    }

    /// Sets a named feature from its textual value.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), UnknownValue> {
        match name {
            "num" => self.number = Some(value.parse()?),
            "case" => self.case = value.parse()?,
            "gen" => self.gender = value.parse()?,
            "pol" => self.polarity = value.parse()?,
            "vform" => self.verbform = value.parse()?,
            _ => {
                return Err(UnknownValue {
                    kind: "feature",
                    value: name.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Parses `num=sg,case=nom` style lists; `-` or the empty string is the
    /// empty bundle.
    pub fn parse_list(text: &str) -> Result<Self, UnknownValue> {
        let mut bundle = FeatureBundle::default();
        let text = text.trim();
        if text.is_empty() || text == "-" {
            return Ok(bundle);
        }
        for item in text.split(',') {
            let (name, value) = item.split_once('=').ok_or_else(|| UnknownValue {
                kind: "feature assignment",
                value: item.to_string(),
            })?;
            bundle.set(name.trim(), value.trim())?;
        }
        Ok(bundle)
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = ["num", "case", "gen", "pol", "vform"]
            .iter()
            .filter_map(|name| self.get(name).map(|v| format!("{name}={v}")))
            .collect();
        if parts.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let b = FeatureBundle::parse_list("num=pl,case=dat,gen=masc").unwrap();
        assert_eq!(b.number, Some(Number::Pl));
        assert_eq!(b.case, Case::Dat);
        assert_eq!(b.gender, Gender::Masc);
        assert_eq!(b.to_string(), "num=pl,case=dat,gen=masc");
        assert_eq!(FeatureBundle::parse_list("-").unwrap(), FeatureBundle::default());
    }

    #[test]
    fn rejects_unknown_values() {
        assert!(FeatureBundle::parse_list("num=dual").is_err());
        assert!(FeatureBundle::parse_list("colour=red").is_err());
        assert!(FeatureBundle::parse_list("num").is_err());
    }
}
