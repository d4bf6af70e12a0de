//! Feature-constrained context-free grammars for English and German: loading,
//! seeded sampling of sentence trees per structural template, and parsing of
//! generated token sequences back into trees.
//!
//! A grammar is a set of productions over nonterminals, lexical categories
//! and literal tokens. Features are unified through production-scoped
//! variables, so agreement (`NP[num=?n] Aux[num=?n]`) and case assignment are
//! stated in the grammar file rather than in code. Inequality constraints
//! (`{?p != ?q}`) only restrict sampling; they express how the generated data
//! is counterbalanced, not what is grammatical.

mod config;
mod engine;
mod structure;
mod tree;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use thiserror::Error;

use crate::features::{Category, Language, LEXICAL_FEATURES};
use crate::lexicon::{Lexicon, LexiconError};

pub use structure::{Modifier, ModifierKind, RcGap, StructureSpec, Task, Transitivity};
pub use tree::{Role, SentenceTree, TreeChild, TreeLeaf, TreeNode};

use config::{RawKind, RawTerm};

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("grammar line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("invalid grammar: {0}")]
    Invalid(String),
    #[error("invalid structure {spec}: {constraint}")]
    InvalidSpec { spec: StructureSpec, constraint: String },
    #[error("grammar cannot realize {spec} (gave up after {attempts} attempts)")]
    Unrealizable { spec: StructureSpec, attempts: usize },
    #[error("cannot parse `{sentence}`: {reason}")]
    Unparseable { sentence: String, reason: String },
    #[error("`{sentence}` has parses with different structures")]
    Ambiguous { sentence: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Term {
    Const(u32),
    Var(u8),
}

#[derive(Debug, Clone)]
pub(crate) enum SymKind {
    Nonterminal(usize),
    Lexical(Category),
    Literal(String),
}

#[derive(Debug, Clone)]
pub(crate) struct Symbol {
    pub kind: SymKind,
    pub feats: Vec<(u32, Term)>,
    pub role: Option<Role>,
}

#[derive(Debug, Clone)]
pub(crate) struct Production {
    pub lhs: usize,
    pub lhs_feats: Vec<(u32, Term)>,
    pub rhs: Vec<Symbol>,
    pub constraints: Vec<(u8, u8)>,
    pub parse_only: bool,
    pub n_vars: usize,
    /// Heads first, then the remaining symbols left to right.
    pub expand_order: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Interner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.index.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(s.to_string());
        self.index.insert(s.to_string(), id);
        id
    }

    pub fn get(&self, s: &str) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }
}

/// Index of the `lemma` pseudo-feature among [`LEXICAL_FEATURES`].
pub(crate) const LEMMA_FEATURE: u32 = 5;

/// A compiled, validated grammar and its lexicon. Immutable once built and
/// shareable across threads.
#[derive(Debug, Clone)]
pub struct Grammar {
    language: Language,
    lexicon: Lexicon,
    agent_marker: String,
    passive_aux: String,
    pub(crate) nonterminals: Vec<String>,
    pub(crate) nt_index: HashMap<String, usize>,
    pub(crate) productions: Vec<Production>,
    pub(crate) by_lhs: Vec<Vec<usize>>,
    pub(crate) feats: Interner,
    pub(crate) vals: Interner,
    /// Per lexical entry, interned values of the lexical features.
    pub(crate) lex_vals: Vec<[Option<u32>; 6]>,
}

const EN_GRAMMAR: &str = include_str!("../../data/en/grammar.cfg");
const EN_LEXICON: &str = include_str!("../../data/en/lexicon.tsv");
const DE_GRAMMAR: &str = include_str!("../../data/de/grammar.cfg");
const DE_LEXICON: &str = include_str!("../../data/de/lexicon.tsv");

impl Grammar {
    /// Builds a grammar from the text of a grammar file and a lexicon file.
    pub fn from_texts(grammar: &str, lexicon: &str) -> Result<Self, GrammarError> {
        let raw = config::parse_config(grammar)?;
        let language = raw
            .language
            .ok_or_else(|| GrammarError::Invalid("missing `language` directive".into()))?;
        let lexicon = Lexicon::parse(language, lexicon)?;
        compile(raw, language, lexicon)
    }

    /// Loads `grammar.cfg` and `lexicon.tsv` from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, GrammarError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| GrammarError::Io { path, source })
        };
        Grammar::from_texts(&read("grammar.cfg")?, &read("lexicon.tsv")?)
    }

    /// The shipped grammar for `language`.
    pub fn default_for(language: Language) -> Self {
        let (g, l) = match language {
            Language::En => (EN_GRAMMAR, EN_LEXICON),
            Language::De => (DE_GRAMMAR, DE_LEXICON),
        };
        Grammar::from_texts(g, l).expect("shipped grammar data is valid")
    }

    /// Process-wide shared instance of [`Grammar::default_for`].
    pub fn builtin(language: Language) -> &'static Grammar {
        static EN: OnceLock<Grammar> = OnceLock::new();
        static DE: OnceLock<Grammar> = OnceLock::new();
        match language {
            Language::En => EN.get_or_init(|| Grammar::default_for(Language::En)),
            Language::De => DE.get_or_init(|| Grammar::default_for(Language::De)),
        }
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Token introducing the agent of a passive ("by" / "von").
    pub fn agent_marker(&self) -> &str {
        &self.agent_marker
    }

    /// Lemma of the passive auxiliary ("be" / "werden").
    pub fn passive_aux(&self) -> &str {
        &self.passive_aux
    }

    pub fn production_count(&self) -> usize {
        self.productions.len()
    }

    /// Samples a declarative tree for `spec`. Deterministic in
    /// `(grammar, spec, seed)`.
    pub fn sample_sentence(&self, spec: &StructureSpec, seed: u64) -> Result<SentenceTree, GrammarError> {
        spec.validate()?;
        engine::sample(self, spec, seed)
    }

    /// Parses a declarative/active token sequence into its tree. Fails with
    /// [`GrammarError::Ambiguous`] if readings differ in structure.
    pub fn parse<S: AsRef<str>>(&self, tokens: &[S]) -> Result<SentenceTree, GrammarError> {
        engine::parse_tree(self, tokens)
    }

    /// Every reading of a declarative/active token sequence. German case
    /// syncretism can leave the gap of a relative clause undetermined
    /// ("die hunde , die deine löwen bewundern können , ...").
    pub fn parses<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<SentenceTree>, GrammarError> {
        engine::parse_all(self, tokens)
    }

    /// Recovers the structural template of a generated sentence.
    pub fn classify_structure<S: AsRef<str>>(&self, tokens: &[S]) -> Result<StructureSpec, GrammarError> {
        self.parse(tokens).map(|t| t.structure())
    }

    /// Whether `tokens` derive from the root nonterminal `root` (`S`, `Q` or
    /// `P`).
    pub fn accepts<S: AsRef<str>>(&self, root: &str, tokens: &[S]) -> bool {
        engine::accepts(self, root, tokens)
    }
}

/// Left-to-right token sequence of a tree.
pub fn realize(tree: &SentenceTree) -> Vec<String> {
    tree.tokens()
}

fn compile(raw: config::RawGrammar, language: Language, lexicon: Lexicon) -> Result<Grammar, GrammarError> {
    let mut feats = Interner::default();
    for name in LEXICAL_FEATURES {
        feats.intern(name);
    }
    let mut vals = Interner::default();
    let lex_vals: Vec<[Option<u32>; 6]> = lexicon
        .entries()
        .iter()
        .map(|e| {
            let mut out = [None; 6];
            for (i, name) in LEXICAL_FEATURES.iter().enumerate().take(5) {
                out[i] = e.features.get(name).map(|v| vals.intern(v));
            }
            out[LEMMA_FEATURE as usize] = Some(vals.intern(&e.lemma));
            out
        })
        .collect();

    let mut nonterminals = Vec::new();
    let mut nt_index = HashMap::new();
    let mut nt_id = |name: &str| -> usize {
        if let Some(&i) = nt_index.get(name) {
            return i;
        }
        nonterminals.push(name.to_string());
        nt_index.insert(name.to_string(), nonterminals.len() - 1);
        nonterminals.len() - 1
    };
    for p in &raw.productions {
        nt_id(&p.lhs);
    }

    let invalid = |line: usize, message: String| GrammarError::Config { line, message };
    let mut productions = Vec::with_capacity(raw.productions.len());
    // nonterminal -> features declared on some left-hand side
    let mut declared: HashMap<usize, Vec<u32>> = HashMap::new();
    for p in &raw.productions {
        let mut vars: HashMap<String, u8> = HashMap::new();
        let mut term = |t: &RawTerm, vals: &mut Interner| -> Term {
            match t {
                RawTerm::Const(c) => Term::Const(vals.intern(c)),
                RawTerm::Var(v) => {
                    let next = vars.len() as u8;
                    Term::Var(*vars.entry(v.clone()).or_insert(next))
                }
            }
        };
        let lhs = nt_id(&p.lhs);
        let lhs_feats: Vec<(u32, Term)> = p
            .lhs_feats
            .iter()
            .map(|(f, t)| (feats.intern(f), term(t, &mut vals)))
            .collect();
        declared.entry(lhs).or_default().extend(lhs_feats.iter().map(|(f, _)| *f));

        let mut rhs = Vec::with_capacity(p.rhs.len());
        let mut heads = Vec::new();
        for (i, s) in p.rhs.iter().enumerate() {
            let kind = match &s.kind {
                RawKind::Nonterminal(name) => SymKind::Nonterminal(nt_id(name)),
                RawKind::Lexical(cat) => SymKind::Lexical(*cat),
                RawKind::Literal(lit) => SymKind::Literal(lit.clone()),
            };
            let sym_feats: Vec<(u32, Term)> = s
                .feats
                .iter()
                .map(|(f, t)| (feats.intern(f), term(t, &mut vals)))
                .collect();
            if let SymKind::Literal(_) = kind {
                if !sym_feats.is_empty() {
                    return Err(invalid(p.line, "literal tokens take no features".into()));
                }
            }
            if s.head {
                heads.push(i);
            }
            rhs.push(Symbol {
                kind,
                feats: sym_feats,
                role: s.role,
            });
        }
        let mut constraints = Vec::new();
        for (a, b) in &p.constraints {
            let lookup = |v: &String| {
                vars.get(v)
                    .copied()
                    .ok_or_else(|| invalid(p.line, format!("constraint variable ?{v} does not occur in the production")))
            };
            constraints.push((lookup(a)?, lookup(b)?));
        }
        let mut expand_order = heads.clone();
        expand_order.extend((0..rhs.len()).filter(|i| !heads.contains(i)));
        productions.push((
            p.line,
            Production {
                lhs,
                lhs_feats,
                rhs,
                constraints,
                parse_only: p.parse_only,
                n_vars: vars.len(),
                expand_order,
            },
        ));
    }

    let mut by_lhs = vec![Vec::new(); nonterminals.len()];
    for (i, (_, p)) in productions.iter().enumerate() {
        by_lhs[p.lhs].push(i);
    }

    // Validation: reachability of nonterminals, feature vocabulary.
    for (line, p) in &productions {
        for sym in &p.rhs {
            match &sym.kind {
                SymKind::Nonterminal(nt) => {
                    if by_lhs[*nt].is_empty() {
                        return Err(invalid(
                            *line,
                            format!("nonterminal `{}` has no production", nonterminals[*nt]),
                        ));
                    }
                    let known = declared.get(nt).map(Vec::as_slice).unwrap_or(&[]);
                    for (f, _) in &sym.feats {
                        if !known.contains(f) {
                            return Err(invalid(
                                *line,
                                format!(
                                    "feature `{}` is not declared on any `{}` production",
                                    feats.name(*f),
                                    nonterminals[*nt]
                                ),
                            ));
                        }
                    }
                }
                SymKind::Lexical(cat) => {
                    for (f, t) in &sym.feats {
                        if *f as usize >= LEXICAL_FEATURES.len() {
                            return Err(invalid(
                                *line,
                                format!("`{}` is not a lexical feature of {cat}", feats.name(*f)),
                            ));
                        }
                        if let Term::Const(c) = t {
                            let attested = lexicon
                                .by_category(*cat)
                                .iter()
                                .any(|&e| lex_vals[e][*f as usize] == Some(*c));
                            if !attested {
                                return Err(invalid(
                                    *line,
                                    format!("no {cat} entry has {}={}", feats.name(*f), vals.name(*c)),
                                ));
                            }
                        }
                    }
                }
                SymKind::Literal(_) => {}
            }
        }
    }
    let s = nt_index
        .get("S")
        .ok_or_else(|| GrammarError::Invalid("grammar has no `S` productions".into()))?;
    if by_lhs[*s].is_empty() {
        return Err(GrammarError::Invalid("grammar has no `S` productions".into()));
    }
    let agent_marker = raw
        .agent_marker
        .ok_or_else(|| GrammarError::Invalid("missing `agent_marker` directive".into()))?;
    let passive_aux = raw
        .passive_aux
        .ok_or_else(|| GrammarError::Invalid("missing `passive_aux` directive".into()))?;
    if !lexicon
        .by_category(Category::Aux)
        .iter()
        .any(|&e| lexicon.entry(e).lemma == passive_aux)
    {
        return Err(GrammarError::Invalid(format!(
            "passive auxiliary `{passive_aux}` has no Aux entries"
        )));
    }

    Ok(Grammar {
        language,
        lexicon,
        agent_marker,
        passive_aux,
        nonterminals,
        nt_index,
        productions: productions.into_iter().map(|(_, p)| p).collect(),
        by_lhs,
        feats,
        vals,
        lex_vals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_grammars_load() {
        for lang in [Language::En, Language::De] {
            let g = Grammar::default_for(lang);
            assert_eq!(g.language(), lang);
            assert!(g.production_count() > 10);
        }
        assert_eq!(Grammar::builtin(Language::De).agent_marker(), "von");
    }

    const LEX: &str = "the\tDet\tnum=sg\tthe\nyak\tNoun\tnum=sg\tyak\nbe\tAux\tnum=sg,vform=preterite\twas\n";

    #[test]
    fn rejects_undefined_nonterminal() {
        let g = "language en\nagent_marker by\npassive_aux be\nS -> NP VP\nNP -> Det Noun\n";
        let err = Grammar::from_texts(g, LEX).unwrap_err().to_string();
        assert!(err.contains("`VP` has no production"), "{err}");
    }

    #[test]
    fn rejects_undeclared_features() {
        let g = "language en\nagent_marker by\npassive_aux be\nS -> NP[case=nom] \".\"\nNP[num=?n] -> Det[num=?n] Noun[num=?n]\n";
        let err = Grammar::from_texts(g, LEX).unwrap_err().to_string();
        assert!(err.contains("`case` is not declared"), "{err}");
        let g = "language en\nagent_marker by\npassive_aux be\nS -> Det[colour=red]\n";
        assert!(Grammar::from_texts(g, LEX).is_err());
        let g = "language en\nagent_marker by\npassive_aux be\nS -> Det[num=pl]\n";
        let err = Grammar::from_texts(g, LEX).unwrap_err().to_string();
        assert!(err.contains("no Det entry has num=pl"), "{err}");
        let g = "language en\nagent_marker by\npassive_aux be\nS -> Det[num=?n] {?n != ?m}\n";
        assert!(Grammar::from_texts(g, LEX).is_err());
    }

    #[test]
    fn requires_directives() {
        assert!(Grammar::from_texts("S -> Det\n", LEX).is_err());
        assert!(Grammar::from_texts("language en\nagent_marker by\nS -> Det\n", LEX).is_err());
        assert!(Grammar::from_texts("language en\nagent_marker by\npassive_aux go\nS -> Det\n", LEX).is_err());
    }
}
