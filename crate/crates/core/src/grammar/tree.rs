use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::{Case, Category, FeatureBundle, Language};
use crate::lexicon::LexicalEntry;

use super::structure::{Modifier, ModifierKind, StructureSpec, Task};

/// Distinguished constituents the oracles operate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Subject,
    Object,
    MatrixAux,
    MatrixVerb,
    Modifier,
    RcAux,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::Object => "object",
            Role::MatrixAux => "matrix_aux",
            Role::MatrixVerb => "matrix_verb",
            Role::Modifier => "modifier",
            Role::RcAux => "rc_aux",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "subject" => Role::Subject,
            "object" => Role::Object,
            "matrix_aux" => Role::MatrixAux,
            "matrix_verb" => Role::MatrixVerb,
            "modifier" => Role::Modifier,
            "rc_aux" => Role::RcAux,
            other => return Err(format!("unknown role `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeChild {
    Node(usize),
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: String,
    pub features: FeatureBundle,
    /// Non-morphological features (`task`, `mod`, `gap`, `aux`, ...).
    pub extra: Vec<(String, String)>,
    pub children: Vec<TreeChild>,
    /// Leaf range covered by this node.
    pub span: Range<usize>,
    pub role: Option<Role>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLeaf {
    pub token: String,
    /// `None` for literal tokens such as punctuation.
    pub entry: Option<LexicalEntry>,
}

impl TreeLeaf {
    pub fn category(&self) -> Option<Category> {
        self.entry.as_ref().map(|e| e.category)
    }
}

/// A feature-annotated constituent tree with its distinguished constituents
/// resolved to leaf spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceTree {
    pub(crate) language: Language,
    pub(crate) structure: StructureSpec,
    pub(crate) nodes: Vec<TreeNode>,
    pub(crate) leaves: Vec<TreeLeaf>,
    pub(crate) root: usize,
    pub(crate) roles: Vec<(Role, Range<usize>)>,
}

impl SentenceTree {
    pub fn language(&self) -> Language {
        self.language
    }

    pub fn structure(&self) -> StructureSpec {
        self.structure
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[self.root]
    }

    pub fn leaves(&self) -> &[TreeLeaf] {
        &self.leaves
    }

    /// Left-to-right token sequence.
    pub fn tokens(&self) -> Vec<String> {
        self.leaves.iter().map(|l| l.token.clone()).collect()
    }

    pub fn role_span(&self, role: Role) -> Option<Range<usize>> {
        self.roles.iter().find(|(r, _)| *r == role).map(|(_, s)| s.clone())
    }

    pub fn subject(&self) -> Range<usize> {
        self.role_span(Role::Subject).expect("trees always have a subject")
    }

    pub fn object(&self) -> Option<Range<usize>> {
        self.role_span(Role::Object)
    }

    /// Leaf index of the matrix auxiliary (question-formation trees).
    pub fn matrix_aux(&self) -> Option<usize> {
        self.role_span(Role::MatrixAux).map(|s| s.start)
    }

    pub fn matrix_verb(&self) -> usize {
        self.role_span(Role::MatrixVerb)
            .expect("trees always have a matrix verb")
            .start
    }

    pub fn rc_aux(&self) -> Option<usize> {
        self.role_span(Role::RcAux).map(|s| s.start)
    }

    /// Modifier span and the role of the NP it attaches to.
    pub fn modifier(&self) -> Option<(Range<usize>, Role)> {
        let span = self.role_span(Role::Modifier)?;
        let subject = self.subject();
        let site = if subject.start <= span.start && span.end <= subject.end {
            Role::Subject
        } else {
            Role::Object
        };
        Some((span, site))
    }

    /// First noun leaf in `span`: the head of an NP span.
    pub fn head_noun(&self, span: Range<usize>) -> Option<usize> {
        span.into_iter()
            .find(|&i| self.leaves[i].category() == Some(Category::Noun))
    }

    /// Checks the structural and agreement invariants every tree of the
    /// default grammars satisfies. Returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let subject = self.subject();
        let subj_head = self
            .head_noun(subject.clone())
            .ok_or("subject has no head noun")?;
        let subj_feats = self.leaves[subj_head].entry.as_ref().unwrap().features;

        if let Some(aux) = self.matrix_aux() {
            let aux_feats = self.leaves[aux]
                .entry
                .as_ref()
                .ok_or("matrix auxiliary is not lexical")?
                .features;
            if aux_feats.number != subj_feats.number {
                return Err("matrix auxiliary does not agree with the subject".into());
            }
        } else if self.structure.task == Task::Quest {
            return Err("question-formation tree without matrix auxiliary".into());
        }

        let (mod_present, mod_site) = match self.modifier() {
            Some((_, site)) => (true, Some(site)),
            None => (false, None),
        };
        let expected_site = match self.structure.modifier {
            Modifier::None => None,
            Modifier::OnSubject => Some(Role::Subject),
            Modifier::OnObject => Some(Role::Object),
        };
        if mod_present != (self.structure.modifier != Modifier::None) || mod_site != expected_site {
            return Err("modifier placement does not match the structure".into());
        }

        if self.language == Language::De {
            if subj_feats.case != Case::Nom {
                return Err("German subject is not nominative".into());
            }
            if let Some(obj) = self.object() {
                let head = self.head_noun(obj).ok_or("object has no head noun")?;
                if self.leaves[head].entry.as_ref().unwrap().features.case != Case::Acc {
                    return Err("German object is not accusative".into());
                }
            }
        }

        if self.structure.modifier != Modifier::None && self.structure.modifier_kind == ModifierKind::Rc {
            let matrix = self.matrix_aux().ok_or("missing matrix auxiliary")?;
            let rc = self.rc_aux().ok_or("relative clause without auxiliary")?;
            if self.leaves[matrix].token == self.leaves[rc].token {
                return Err("matrix and relative-clause auxiliaries are indistinguishable".into());
            }
        }
        Ok(())
    }
}

impl fmt::Display for SentenceTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &SentenceTree, idx: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let node = &t.nodes[idx];
            write!(f, "({}", node.label)?;
            if let Some(role) = node.role {
                write!(f, "@{role}")?;
            }
            for child in &node.children {
                match child {
                    TreeChild::Node(c) => {
                        f.write_str(" ")?;
                        go(t, *c, f)?;
                    }
                    TreeChild::Leaf(l) => write!(f, " {}", t.leaves[*l].token)?,
                }
            }
            f.write_str(")")
        }
        go(self, self.root, f)
    }
}
