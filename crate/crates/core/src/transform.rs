//! Rule oracles: hierarchical and linear question formation and
//! passivization, plus identity.
//!
//! Every oracle returns its output together with a trace of edit steps.
//! Replaying the trace over the input tokens reproduces the output.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{Category, FeatureBundle, Language, VerbForm};
use crate::grammar::{Grammar, SentenceTree, Task};
use crate::lexicon::{LexicalEntry, Lexicon, LexiconError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformRule {
    MoveMain,
    MoveFirst,
    MoveObject,
    MoveSecond,
    Identity,
}

impl TransformRule {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformRule::MoveMain => "move-main",
            TransformRule::MoveFirst => "move-first",
            TransformRule::MoveObject => "move-object",
            TransformRule::MoveSecond => "move-second",
            TransformRule::Identity => "identity",
        }
    }

    /// The task a rule applies to; `None` for identity.
    pub fn task(self) -> Option<Task> {
        match self {
            TransformRule::MoveMain | TransformRule::MoveFirst => Some(Task::Quest),
            TransformRule::MoveObject | TransformRule::MoveSecond => Some(Task::Passiv),
            TransformRule::Identity => None,
        }
    }

    pub fn hierarchical(task: Task) -> Self {
        match task {
            Task::Quest => TransformRule::MoveMain,
            Task::Passiv => TransformRule::MoveObject,
        }
    }

    pub fn linear(task: Task) -> Self {
        match task {
            Task::Quest => TransformRule::MoveFirst,
            Task::Passiv => TransformRule::MoveSecond,
        }
    }
}

impl fmt::Display for TransformRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One edit step. Positions refer to the token sequence as it stands when
/// the step is applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStep {
    /// Copy `span` to the front (the original stays until deleted).
    Front { span: Range<usize> },
    Delete { span: Range<usize> },
    Insert { at: usize, tokens: Vec<String> },
    /// Replace the token at `at`, which must read `from`, with `to`.
    Reinflect { at: usize, from: String, to: String },
    /// Remove `span` and re-insert it at `to` (an index into the shortened
    /// sequence).
    Move { span: Range<usize>, to: usize },
}

/// Token sequences of the passive's parts as they appear in the output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassiveLandmarks {
    /// The fronted NP including any attached PP.
    pub fronted: Vec<String>,
    /// Determiner and noun of the fronted NP.
    pub fronted_head: Vec<String>,
    pub passive_aux: String,
    pub participle: String,
    pub agent_marker: String,
    /// The demoted agent including any attached PP.
    pub agent: Vec<String>,
    pub agent_head: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformResult {
    pub output: Vec<String>,
    pub trace: Vec<TraceStep>,
    pub landmarks: Option<PassiveLandmarks>,
}

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("{rule} expects a {expected} sentence, got a {found} sentence")]
    WrongTask {
        rule: TransformRule,
        expected: Task,
        found: Task,
    },
    #[error("no auxiliary in `{sentence}`")]
    NoAuxiliary { sentence: String },
    #[error("fewer than two noun phrases in `{sentence}`")]
    TooFewNounPhrases { sentence: String },
    #[error("sentence has no {what}: `{sentence}`")]
    MissingConstituent { what: &'static str, sentence: String },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("trace step {index} does not apply: {reason}")]
    Replay { index: usize, reason: String },
}

/// Applies `steps` in order to `input`.
pub fn replay<S: AsRef<str>>(input: &[S], steps: &[TraceStep]) -> Result<Vec<String>, TransformError> {
    let mut w: Vec<String> = input.iter().map(|t| t.as_ref().to_string()).collect();
    for (index, step) in steps.iter().enumerate() {
        apply_step(&mut w, step).map_err(|reason| TransformError::Replay { index, reason })?;
    }
    Ok(w)
}

fn apply_step(w: &mut Vec<String>, step: &TraceStep) -> Result<(), String> {
    let check = |span: &Range<usize>, len: usize| {
        if span.start > span.end || span.end > len {
            Err(format!("span {span:?} out of bounds for length {len}"))
        } else {
            Ok(())
        }
    };
    match step {
        TraceStep::Front { span } => {
            check(span, w.len())?;
            let copy: Vec<String> = w[span.clone()].to_vec();
            w.splice(0..0, copy);
        }
        TraceStep::Delete { span } => {
            check(span, w.len())?;
            w.drain(span.clone());
        }
        TraceStep::Insert { at, tokens } => {
            if *at > w.len() {
                return Err(format!("insert position {at} beyond length {}", w.len()));
            }
            w.splice(*at..*at, tokens.iter().cloned());
        }
        TraceStep::Reinflect { at, from, to } => {
            let tok = w.get_mut(*at).ok_or_else(|| format!("position {at} out of bounds"))?;
            if tok != from {
                return Err(format!("expected `{from}` at {at}, found `{tok}`"));
            }
            *tok = to.clone();
        }
        TraceStep::Move { span, to } => {
            check(span, w.len())?;
            let moved: Vec<String> = w.drain(span.clone()).collect();
            if *to > w.len() {
                return Err(format!("move target {to} beyond length {}", w.len()));
            }
            w.splice(*to..*to, moved);
        }
    }
    Ok(())
}

/// Working sequence that records every edit it performs.
struct Editor {
    tokens: Vec<String>,
    trace: Vec<TraceStep>,
}

impl Editor {
    fn new(tokens: Vec<String>) -> Self {
        Editor {
            tokens,
            trace: Vec::new(),
        }
    }

    fn step(&mut self, step: TraceStep) {
        apply_step(&mut self.tokens, &step).expect("oracle emits well-formed steps");
        self.trace.push(step);
    }

    fn finish(self, landmarks: Option<PassiveLandmarks>) -> TransformResult {
        TransformResult {
            output: self.tokens,
            trace: self.trace,
            landmarks,
        }
    }

    /// Replaces a final "." with "?" (or appends "?").
    fn make_question(&mut self) {
        let n = self.tokens.len();
        if self.tokens.last().is_some_and(|t| t == ".") {
            self.step(TraceStep::Delete { span: n - 1..n });
        }
        let at = self.tokens.len();
        self.step(TraceStep::Insert {
            at,
            tokens: vec!["?".into()],
        });
    }
}

fn sentence(tokens: &[impl AsRef<str>]) -> String {
    tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
}

fn expect_task(rule: TransformRule, tree: &SentenceTree) -> Result<(), TransformError> {
    let expected = rule.task().expect("rule with a task");
    let found = tree.structure().task;
    if found != expected {
        return Err(TransformError::WrongTask { rule, expected, found });
    }
    Ok(())
}

fn front_aux(tokens: Vec<String>, aux: usize) -> TransformResult {
    let mut ed = Editor::new(tokens);
    ed.step(TraceStep::Front { span: aux..aux + 1 });
    ed.step(TraceStep::Delete {
        span: aux + 1..aux + 2,
    });
    ed.make_question();
    ed.finish(None)
}

/// Move-main: fronts the matrix auxiliary.
pub fn quest_hierarchical(tree: &SentenceTree) -> Result<TransformResult, TransformError> {
    expect_task(TransformRule::MoveMain, tree)?;
    let aux = tree.matrix_aux().ok_or_else(|| TransformError::MissingConstituent {
        what: "matrix auxiliary",
        sentence: sentence(&tree.tokens()),
    })?;
    Ok(front_aux(tree.tokens(), aux))
}

/// Move-first: fronts the linearly first auxiliary or modal. Purely
/// positional; the lexicon only decides which tokens are auxiliaries.
pub fn quest_linear<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Result<TransformResult, TransformError> {
    let aux = tokens
        .iter()
        .position(|t| lexicon.is_auxiliary(t.as_ref()))
        .ok_or_else(|| TransformError::NoAuxiliary {
            sentence: sentence(tokens),
        })?;
    Ok(front_aux(tokens.iter().map(|t| t.as_ref().to_string()).collect(), aux))
}

pub fn identity<S: AsRef<str>>(tokens: &[S]) -> TransformResult {
    TransformResult {
        output: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
        trace: Vec::new(),
        landmarks: None,
    }
}

/// Move-object: the object NP (with its PP) becomes the passive subject and
/// the full subject NP goes into the agent phrase.
pub fn passiv_hierarchical(grammar: &Grammar, tree: &SentenceTree) -> Result<TransformResult, TransformError> {
    expect_task(TransformRule::MoveObject, tree)?;
    let patient = tree.object().ok_or_else(|| TransformError::MissingConstituent {
        what: "object",
        sentence: sentence(&tree.tokens()),
    })?;
    passivize(grammar, tree, tree.subject(), patient)
}

/// Move-second: the linearly second NP becomes the passive subject and the
/// linearly first (bare) NP goes into the agent phrase. A PP directly
/// following the second NP travels with it.
pub fn passiv_linear(grammar: &Grammar, tree: &SentenceTree) -> Result<TransformResult, TransformError> {
    expect_task(TransformRule::MoveSecond, tree)?;
    let leaves = tree.leaves();
    let cat = |i: usize| leaves.get(i).and_then(|l| l.category());
    let nps: Vec<usize> = (0..leaves.len())
        .filter(|&i| cat(i) == Some(Category::Det) && cat(i + 1) == Some(Category::Noun))
        .collect();
    if nps.len() < 2 {
        return Err(TransformError::TooFewNounPhrases {
            sentence: sentence(&tree.tokens()),
        });
    }
    let agent = nps[0]..nps[0] + 2;
    let mut patient = nps[1]..nps[1] + 2;
    if cat(patient.end) == Some(Category::Prep)
        && cat(patient.end + 1) == Some(Category::Det)
        && cat(patient.end + 2) == Some(Category::Noun)
    {
        patient.end += 3;
    }
    passivize(grammar, tree, agent, patient)
}

/// Oracle dispatch by rule.
pub fn apply(rule: TransformRule, grammar: &Grammar, tree: &SentenceTree) -> Result<TransformResult, TransformError> {
    match rule {
        TransformRule::MoveMain => quest_hierarchical(tree),
        TransformRule::MoveFirst => {
            expect_task(rule, tree)?;
            quest_linear(&tree.tokens(), grammar.lexicon())
        }
        TransformRule::MoveObject => passiv_hierarchical(grammar, tree),
        TransformRule::MoveSecond => passiv_linear(grammar, tree),
        TransformRule::Identity => Ok(identity(&tree.tokens())),
    }
}

fn entry_of<'t>(tree: &'t SentenceTree, i: usize, what: &'static str) -> Result<&'t LexicalEntry, TransformError> {
    tree.leaves()[i]
        .entry
        .as_ref()
        .ok_or_else(|| TransformError::MissingConstituent {
            what,
            sentence: sentence(&tree.tokens()),
        })
}

/// Surface form of `entry` with its case changed.
fn recase(lexicon: &Lexicon, entry: &LexicalEntry, case: crate::features::Case) -> Result<String, TransformError> {
    let features = entry.features.with_case(case);
    Ok(lexicon.inflect(&entry.lemma, entry.category, &features)?.to_string())
}

/// Shared passivization routine. `agent` and `patient` are leaf spans of the
/// active sentence whose first two leaves are determiner and noun.
fn passivize(
    grammar: &Grammar,
    tree: &SentenceTree,
    agent: Range<usize>,
    patient: Range<usize>,
) -> Result<TransformResult, TransformError> {
    use crate::features::Case;

    let lexicon = grammar.lexicon();
    let german = grammar.language() == Language::De;
    let verb = tree.matrix_verb();
    let n = tree.leaves().len();
    let last = n - 1;

    let verb_entry = entry_of(tree, verb, "lexical main verb")?;
    let participle = lexicon
        .inflect(
            &verb_entry.lemma,
            verb_entry.category,
            &FeatureBundle::default().with_verbform(VerbForm::PastParticiple),
        )?
        .to_string();
    let patient_noun = entry_of(tree, patient.start + 1, "patient head")?;
    let number = patient_noun.features.number.ok_or_else(|| TransformError::MissingConstituent {
        what: "patient number",
        sentence: sentence(&tree.tokens()),
    })?;
    let aux = lexicon
        .inflect(
            grammar.passive_aux(),
            Category::Aux,
            &FeatureBundle::default()
                .with_number(number)
                .with_verbform(VerbForm::Preterite),
        )?
        .to_string();

    // Reinflected heads (German case changes; English forms are caseless).
    let mut patient_head: Vec<String> = tree.tokens()[patient.start..patient.start + 2].to_vec();
    let mut agent_head: Vec<String> = tree.tokens()[agent.start..agent.start + 2].to_vec();
    if german {
        for k in 0..2 {
            patient_head[k] = recase(lexicon, entry_of(tree, patient.start + k, "patient head")?, Case::Nom)?;
            agent_head[k] = recase(lexicon, entry_of(tree, agent.start + k, "agent head")?, Case::Dat)?;
        }
    }

    let keep = |i: usize| agent.contains(&i) || patient.contains(&i) || i == verb || i == last;
    let mut ed = Editor::new(tree.tokens());

    // 1. Drop everything outside agent, patient, verb and final punctuation,
    //    right to left so earlier positions stay valid.
    let mut i = n;
    while i > 0 {
        if keep(i - 1) {
            i -= 1;
            continue;
        }
        let end = i;
        while i > 0 && !keep(i - 1) {
            i -= 1;
        }
        ed.step(TraceStep::Delete { span: i..end });
    }
    // Current positions: order of kept original indices is preserved.
    let kept: Vec<usize> = (0..n).filter(|&i| keep(i)).collect();
    let pos = |orig: usize| kept.iter().position(|&k| k == orig).expect("kept index");

    // 2. Front the patient.
    let p_len = patient.len();
    let p_start = pos(patient.start);
    ed.step(TraceStep::Move {
        span: p_start..p_start + p_len,
        to: 0,
    });
    // Now: patient, then agent and verb in active order, then punctuation.
    for (k, head) in patient_head.iter().enumerate().take(2) {
        if &ed.tokens[k] != head {
            let from = ed.tokens[k].clone();
            ed.step(TraceStep::Reinflect {
                at: k,
                from,
                to: head.clone(),
            });
        }
    }
    // 3. Insert the passive auxiliary after the patient.
    ed.step(TraceStep::Insert {
        at: p_len,
        tokens: vec![aux.clone()],
    });
    let a_start = p_len + 1;
    let a_len = agent.len();
    let v_pos = a_start + a_len;
    debug_assert_eq!(ed.tokens[v_pos], tree.tokens()[verb]);

    if ed.tokens[v_pos] != participle {
        let from = ed.tokens[v_pos].clone();
        ed.step(TraceStep::Reinflect {
            at: v_pos,
            from,
            to: participle.clone(),
        });
    }
    for (k, head) in agent_head.iter().enumerate().take(2) {
        if &ed.tokens[a_start + k] != head {
            let from = ed.tokens[a_start + k].clone();
            ed.step(TraceStep::Reinflect {
                at: a_start + k,
                from,
                to: head.clone(),
            });
        }
    }
    let marker = vec![grammar.agent_marker().to_string()];
    if german {
        // P aux von A Vpp .
        ed.step(TraceStep::Insert {
            at: a_start,
            tokens: marker,
        });
    } else {
        // P aux Vpp by A .
        ed.step(TraceStep::Move {
            span: v_pos..v_pos + 1,
            to: a_start,
        });
        ed.step(TraceStep::Insert {
            at: a_start + 1,
            tokens: marker,
        });
    }

    let fronted = ed.tokens[..p_len].to_vec();
    let agent_at = if german { a_start + 1 } else { a_start + 2 };
    let agent_tokens = ed.tokens[agent_at..agent_at + a_len].to_vec();
    let landmarks = PassiveLandmarks {
        fronted,
        fronted_head: patient_head,
        passive_aux: aux,
        participle,
        agent_marker: grammar.agent_marker().to_string(),
        agent: agent_tokens,
        agent_head,
    };
    Ok(ed.finish(Some(landmarks)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn replay_semantics() {
        let input = toks("a b c d");
        let steps = vec![
            TraceStep::Front { span: 2..3 },
            TraceStep::Delete { span: 3..4 },
            TraceStep::Reinflect {
                at: 1,
                from: "a".into(),
                to: "x".into(),
            },
            TraceStep::Move { span: 0..1, to: 3 },
            TraceStep::Insert {
                at: 0,
                tokens: toks("y z"),
            },
        ];
        assert_eq!(replay(&input, &steps).unwrap(), toks("y z x b d c"));
        let bad = vec![TraceStep::Reinflect {
            at: 0,
            from: "q".into(),
            to: "r".into(),
        }];
        assert!(matches!(replay(&input, &bad), Err(TransformError::Replay { index: 0, .. })));
    }

    #[test]
    fn question_oracles() {
        let g = Grammar::builtin(Language::En);
        let src = toks("my unicorn that hasn't amused the yaks has eaten .");
        let tree = g.parse(&src).unwrap();
        let hier = quest_hierarchical(&tree).unwrap();
        assert_eq!(hier.output, toks("has my unicorn that hasn't amused the yaks eaten ?"));
        assert_eq!(replay(&src, &hier.trace).unwrap(), hier.output);
        let lin = quest_linear(&src, g.lexicon()).unwrap();
        assert_eq!(lin.output, toks("hasn't my unicorn that amused the yaks has eaten ?"));
        assert!(matches!(
            quest_linear(&toks("the yak ."), g.lexicon()),
            Err(TransformError::NoAuxiliary { .. })
        ));
    }

    #[test]
    fn passive_oracles() {
        let g = Grammar::builtin(Language::En);
        let src = toks("her walruses above my unicorns annoyed her quail .");
        let tree = g.parse(&src).unwrap();
        let hier = passiv_hierarchical(g, &tree).unwrap();
        assert_eq!(hier.output, toks("her quail was annoyed by her walruses above my unicorns ."));
        assert_eq!(replay(&src, &hier.trace).unwrap(), hier.output);
        let lin = passiv_linear(g, &tree).unwrap();
        assert_eq!(lin.output, toks("my unicorns were annoyed by her walruses ."));
        assert_eq!(replay(&src, &lin.trace).unwrap(), lin.output);

        let de = Grammar::builtin(Language::De);
        let src = toks("ihr esel unterhielt meinen salamander .");
        let hier = passiv_hierarchical(de, &de.parse(&src).unwrap()).unwrap();
        assert_eq!(hier.output, toks("mein salamander wurde von ihrem esel unterhalten ."));
        let lm = hier.landmarks.unwrap();
        assert_eq!(lm.agent_head, toks("ihrem esel"));
        assert_eq!(lm.passive_aux, "wurde");
    }

    #[test]
    fn wrong_task_is_rejected() {
        let g = Grammar::builtin(Language::En);
        let tree = g.parse(&toks("your quails amused some vulture .")).unwrap();
        assert!(matches!(quest_hierarchical(&tree), Err(TransformError::WrongTask { .. })));
        let tree = g.parse(&toks("some xylophones have remembered my yak .")).unwrap();
        assert!(passiv_hierarchical(g, &tree).is_err());
        assert!(apply(TransformRule::MoveFirst, g, &tree).is_ok());
    }
}
