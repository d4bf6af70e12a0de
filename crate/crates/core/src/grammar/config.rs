//! Reader for the plain-text grammar format (see the header of
//! `data/en/grammar.cfg`).

use std::collections::HashMap;

use crate::features::{Category, Language};

use super::tree::Role;
use super::GrammarError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawTerm {
    Const(String),
    Var(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawKind {
    Nonterminal(String),
    Lexical(Category),
    Literal(String),
}

#[derive(Debug, Clone)]
pub(crate) struct RawSymbol {
    pub kind: RawKind,
    pub feats: Vec<(String, RawTerm)>,
    pub role: Option<Role>,
    pub head: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct RawProduction {
    pub line: usize,
    pub lhs: String,
    pub lhs_feats: Vec<(String, RawTerm)>,
    pub rhs: Vec<RawSymbol>,
    pub constraints: Vec<(String, String)>,
    pub parse_only: bool,
}

#[derive(Debug, Default)]
pub(crate) struct RawGrammar {
    pub language: Option<Language>,
    pub agent_marker: Option<String>,
    pub passive_aux: Option<String>,
    pub productions: Vec<RawProduction>,
}

pub(crate) fn parse_config(text: &str) -> Result<RawGrammar, GrammarError> {
    let mut raw = RawGrammar::default();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| GrammarError::Config { line: line_no, message };
        if let Some((lhs, rhs)) = line.split_once("->") {
            raw.productions
                .push(parse_production(line_no, lhs, rhs).map_err(err)?);
            continue;
        }
        let (directive, value) = line
            .split_once(char::is_whitespace)
            .map(|(d, v)| (d, v.trim()))
            .ok_or_else(|| err(format!("unrecognized line `{line}`")))?;
        match directive {
            "language" => raw.language = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "agent_marker" => raw.agent_marker = Some(value.to_string()),
            "passive_aux" => raw.passive_aux = Some(value.to_string()),
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(raw)
}

fn parse_production(line: usize, lhs: &str, rhs: &str) -> Result<RawProduction, String> {
    let mut lhs_cursor = Cursor::new(lhs.trim());
    let lhs_name = lhs_cursor.ident();
    if lhs_name.is_empty() {
        return Err("missing left-hand side".into());
    }
    let lhs_feats = if lhs_cursor.peek() == Some('[') {
        lhs_cursor.features()?
    } else {
        Vec::new()
    };
    lhs_cursor.skip_ws();
    if !lhs_cursor.at_end() {
        return Err(format!("trailing text after left-hand side `{lhs_name}`"));
    }

    let mut prod = RawProduction {
        line,
        lhs: lhs_name,
        lhs_feats,
        rhs: Vec::new(),
        constraints: Vec::new(),
        parse_only: false,
    };
    let mut c = Cursor::new(rhs);
    loop {
        c.skip_ws();
        match c.peek() {
            None => break,
            Some('"') => {
                c.bump();
                let lit = c.take_while(|ch| ch != '"');
                if c.bump() != Some('"') {
                    return Err("unterminated literal".into());
                }
                if lit.is_empty() || lit.chars().any(char::is_whitespace) {
                    return Err(format!("literal `{lit}` must be a single token"));
                }
                prod.rhs.push(RawSymbol {
                    kind: RawKind::Literal(lit),
                    feats: Vec::new(),
                    role: None,
                    head: false,
                });
            }
            Some('{') => {
                c.bump();
                let body = c.take_while(|ch| ch != '}');
                if c.bump() != Some('}') {
                    return Err("unterminated constraint block".into());
                }
                for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (a, b) = item
                        .split_once("!=")
                        .ok_or_else(|| format!("constraint `{item}` is not of the form ?x != ?y"))?;
                    let (a, b) = (a.trim(), b.trim());
                    let var = |s: &str| {
                        s.strip_prefix('?')
                            .filter(|v| !v.is_empty())
                            .map(str::to_string)
                            .ok_or_else(|| format!("constraint operand `{s}` is not a variable"))
                    };
                    prod.constraints.push((var(a)?, var(b)?));
                }
            }
            Some('%') => {
                c.bump();
                let flag = c.ident();
                if flag != "parse-only" {
                    return Err(format!("unknown production flag `%{flag}`"));
                }
                prod.parse_only = true;
            }
            Some(_) => {
                let name = c.ident();
                if name.is_empty() {
                    return Err(format!("unexpected character `{}`", c.peek().unwrap_or(' ')));
                }
                let head = if c.peek() == Some('*') {
                    c.bump();
                    true
                } else {
                    false
                };
                let role = if c.peek() == Some('@') {
                    c.bump();
                    let r = c.ident();
                    Some(r.parse::<Role>()?)
                } else {
                    None
                };
                let feats = if c.peek() == Some('[') { c.features()? } else { Vec::new() };
                let kind = match name.parse::<Category>() {
                    Ok(cat) => RawKind::Lexical(cat),
                    Err(_) => RawKind::Nonterminal(name),
                };
                prod.rhs.push(RawSymbol { kind, feats, role, head });
            }
        }
    }
    if prod.rhs.is_empty() {
        return Err("empty right-hand side".into());
    }
    Ok(prod)
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor {
            chars: s.chars().peekable(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.chars.next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(ch) = self.peek() {
            if !pred(ch) {
                break;
            }
            out.push(ch);
            self.bump();
        }
        out
    }

    fn ident(&mut self) -> String {
        self.take_while(|ch| !ch.is_whitespace() && !"[]{}\"*@,=%".contains(ch))
    }

    fn features(&mut self) -> Result<Vec<(String, RawTerm)>, String> {
        self.bump(); // '['
        let body = self.take_while(|ch| ch != ']');
        if self.bump() != Some(']') {
            return Err("unterminated feature list".into());
        }
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| format!("feature `{item}` is not of the form name=value"))?;
            let (name, value) = (name.trim().to_string(), value.trim());
            if seen.insert(name.clone(), ()).is_some() {
                return Err(format!("feature `{name}` given twice"));
            }
            let term = match value.strip_prefix('?') {
                Some(v) if !v.is_empty() => RawTerm::Var(v.to_string()),
                Some(_) => return Err("empty variable name".into()),
                None if value.is_empty() => return Err(format!("feature `{name}` has no value")),
                None => RawTerm::Const(value.to_string()),
            };
            out.push((name, term));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_symbols_roles_heads_and_constraints() {
        let raw = parse_config(
            "language en\nS[task=quest] -> NP@subject[num=?n] Noun*[num=?n] \".\" {?p != ?q} %parse-only\n",
        )
        .unwrap();
        assert_eq!(raw.language, Some(Language::En));
        let p = &raw.productions[0];
        assert_eq!(p.lhs, "S");
        assert_eq!(p.rhs.len(), 3);
        assert_eq!(p.rhs[0].role, Some(Role::Subject));
        assert!(p.rhs[1].head);
        assert_eq!(p.rhs[1].kind, RawKind::Lexical(Category::Noun));
        assert_eq!(p.rhs[2].kind, RawKind::Literal(".".into()));
        assert_eq!(p.constraints, vec![("p".to_string(), "q".to_string())]);
        assert!(p.parse_only);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_config("language en\n\nS -> NP[num]\n").unwrap_err();
        assert!(matches!(err, GrammarError::Config { line: 3, .. }), "{err}");
        let err = parse_config("colour red\n").unwrap_err();
        assert!(err.to_string().contains("unknown directive"));
        assert!(parse_config("S -> NP@boss\n").is_err());
        assert!(parse_config("S -> \"a b\"\n").is_err());
    }
}
