use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GrammarError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Quest,
    Passiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modifier {
    None,
    OnObject,
    OnSubject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModifierKind {
    Rc,
    Pp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transitivity {
    Trans,
    Intrans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RcGap {
    SubjectGap,
    ObjectGap,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::Quest, Task::Passiv];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Quest => "quest",
            Task::Passiv => "passiv",
        }
    }

    pub fn modifier_kind(self) -> ModifierKind {
        match self {
            Task::Quest => ModifierKind::Rc,
            Task::Passiv => ModifierKind::Pp,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quest" => Ok(Task::Quest),
            "passiv" => Ok(Task::Passiv),
            other => Err(format!("unknown task `{other}` (expected quest or passiv)")),
        }
    }
}

impl Modifier {
    pub const ALL: [Modifier; 3] = [Modifier::None, Modifier::OnObject, Modifier::OnSubject];

    pub fn as_str(self) -> &'static str {
        match self {
            Modifier::None => "none",
            Modifier::OnObject => "on-object",
            Modifier::OnSubject => "on-subject",
        }
    }

    /// Value of the `mod` root feature in grammar files.
    pub(crate) fn feature_value(self) -> &'static str {
        match self {
            Modifier::None => "none",
            Modifier::OnObject => "object",
            Modifier::OnSubject => "subject",
        }
    }
}

/// The structural template of a sentence: which transformation it feeds and
/// where (if anywhere) its modifier attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StructureSpec {
    pub task: Task,
    pub modifier: Modifier,
    pub modifier_kind: ModifierKind,
    pub transitivity: Transitivity,
    pub rc_gap: Option<RcGap>,
}

impl StructureSpec {
    pub fn quest(modifier: Modifier, transitivity: Transitivity, rc_gap: Option<RcGap>) -> Self {
        StructureSpec {
            task: Task::Quest,
            modifier,
            modifier_kind: ModifierKind::Rc,
            transitivity,
            rc_gap,
        }
    }

    pub fn passiv(modifier: Modifier) -> Self {
        StructureSpec {
            task: Task::Passiv,
            modifier,
            modifier_kind: ModifierKind::Pp,
            transitivity: Transitivity::Trans,
            rc_gap: None,
        }
    }

    /// Checks the cross-field constraints; the error names the violated one.
    pub fn validate(&self) -> Result<(), GrammarError> {
        let fail = |constraint: &str| {
            Err(GrammarError::InvalidSpec {
                spec: *self,
                constraint: constraint.to_string(),
            })
        };
        if self.modifier_kind != self.task.modifier_kind() {
            return fail("quest sentences take relative clauses and passiv sentences take prepositional phrases");
        }
        if self.task == Task::Passiv && self.transitivity != Transitivity::Trans {
            return fail("passivization requires a transitive verb");
        }
        if self.task == Task::Quest && self.modifier == Modifier::OnObject && self.transitivity != Transitivity::Trans {
            return fail("a modifier on the object requires a transitive matrix verb");
        }
        let has_rc = self.modifier != Modifier::None && self.modifier_kind == ModifierKind::Rc;
        if has_rc != self.rc_gap.is_some() {
            return fail("rc_gap is set exactly when the sentence has a relative clause");
        }
        Ok(())
    }

    /// Every valid spec for `task`, in a fixed order.
    pub fn all(task: Task) -> Vec<StructureSpec> {
        match task {
            Task::Passiv => Modifier::ALL.iter().map(|&m| StructureSpec::passiv(m)).collect(),
            Task::Quest => {
                let mut out = Vec::new();
                for modifier in Modifier::ALL {
                    for trans in [Transitivity::Trans, Transitivity::Intrans] {
                        let gaps: &[Option<RcGap>] = if modifier == Modifier::None {
                            &[None]
                        } else {
                            &[Some(RcGap::SubjectGap), Some(RcGap::ObjectGap)]
                        };
                        for &gap in gaps {
                            let spec = StructureSpec::quest(modifier, trans, gap);
                            if spec.validate().is_ok() {
                                out.push(spec);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Root feature assignments used to select the declarative production.
    pub(crate) fn root_features(&self) -> [(&'static str, &'static str); 4] {
        [
            ("task", self.task.as_str()),
            ("mod", self.modifier.feature_value()),
            (
                "trans",
                match self.transitivity {
                    Transitivity::Trans => "trans",
                    Transitivity::Intrans => "intrans",
                },
            ),
            (
                "gap",
                match self.rc_gap {
                    None => "none",
                    Some(RcGap::SubjectGap) => "subject",
                    Some(RcGap::ObjectGap) => "object",
                },
            ),
        ]
    }

    pub(crate) fn from_root_features(get: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let field = |name: &str| get(name).ok_or_else(|| format!("root feature `{name}` is unbound"));
        let task: Task = field("task")?.parse()?;
        let modifier = match field("mod")?.as_str() {
            "none" => Modifier::None,
            "object" => Modifier::OnObject,
            "subject" => Modifier::OnSubject,
            other => return Err(format!("bad mod value `{other}`")),
        };
        let transitivity = match field("trans")?.as_str() {
            "trans" => Transitivity::Trans,
            "intrans" => Transitivity::Intrans,
            other => return Err(format!("bad trans value `{other}`")),
        };
        let rc_gap = match field("gap")?.as_str() {
            "none" => None,
            "subject" => Some(RcGap::SubjectGap),
            "object" => Some(RcGap::ObjectGap),
            other => return Err(format!("bad gap value `{other}`")),
        };
        Ok(StructureSpec {
            task,
            modifier,
            modifier_kind: task.modifier_kind(),
            transitivity,
            rc_gap,
        })
    }
}

/// Parses the display form, such as `quest/on-subject/rc/trans/subject-gap`.
/// The fields after task and modifier may come in any order; omitted ones
/// default to the task's modifier kind, a transitive verb and no gap. The
/// result is not validated.
impl FromStr for StructureSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split('/').map(str::trim);
        let task: Task = parts.next().unwrap_or_default().parse()?;
        let modifier = match parts.next() {
            None | Some("none") => Modifier::None,
            Some("on-object") => Modifier::OnObject,
            Some("on-subject") => Modifier::OnSubject,
            Some(other) => return Err(format!("unknown modifier `{other}` (expected none, on-object or on-subject)")),
        };
        let mut spec = StructureSpec {
            task,
            modifier,
            modifier_kind: task.modifier_kind(),
            transitivity: Transitivity::Trans,
            rc_gap: None,
        };
        for part in parts {
            match part {
                "rc" => spec.modifier_kind = ModifierKind::Rc,
                "pp" => spec.modifier_kind = ModifierKind::Pp,
                "trans" => spec.transitivity = Transitivity::Trans,
                "intrans" => spec.transitivity = Transitivity::Intrans,
                "subject-gap" => spec.rc_gap = Some(RcGap::SubjectGap),
                "object-gap" => spec.rc_gap = Some(RcGap::ObjectGap),
                other => return Err(format!("unknown structure field `{other}` in `{s}`")),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for StructureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.task, self.modifier.as_str())?;
        if self.modifier != Modifier::None {
            let kind = match self.modifier_kind {
                ModifierKind::Rc => "rc",
                ModifierKind::Pp => "pp",
            };
            write!(f, "/{kind}")?;
        }
        if self.task == Task::Quest {
            let t = match self.transitivity {
                Transitivity::Trans => "trans",
                Transitivity::Intrans => "intrans",
            };
            write!(f, "/{t}")?;
        }
        match self.rc_gap {
            Some(RcGap::SubjectGap) => write!(f, "/subject-gap"),
            Some(RcGap::ObjectGap) => write!(f, "/object-gap"),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_valid_specs() {
        assert_eq!(StructureSpec::all(Task::Passiv).len(), 3);
        // none x {trans, intrans}; object x trans x 2 gaps; subject x 2 x 2
        assert_eq!(StructureSpec::all(Task::Quest).len(), 8);
    }

    #[test]
    fn rejects_passiv_with_rc() {
        let mut spec = StructureSpec::passiv(Modifier::OnSubject);
        spec.modifier_kind = ModifierKind::Rc;
        let err = spec.validate().unwrap_err().to_string();
        assert!(err.contains("prepositional"), "{err}");
    }

    #[test]
    fn rejects_intransitive_passiv_and_missing_gap() {
        let mut spec = StructureSpec::passiv(Modifier::None);
        spec.transitivity = Transitivity::Intrans;
        assert!(spec.validate().is_err());
        let spec = StructureSpec::quest(Modifier::OnSubject, Transitivity::Trans, None);
        assert!(spec.validate().is_err());
        let spec = StructureSpec::quest(Modifier::OnObject, Transitivity::Intrans, Some(RcGap::ObjectGap));
        assert!(spec.validate().is_err());
    }

    #[test]
    fn display_is_compact() {
        let spec = StructureSpec::quest(Modifier::OnSubject, Transitivity::Intrans, Some(RcGap::ObjectGap));
        assert_eq!(spec.to_string(), "quest/on-subject/rc/intrans/object-gap");
        assert_eq!(StructureSpec::passiv(Modifier::None).to_string(), "passiv/none");
    }

    #[test]
    fn parses_display_form() {
        for task in Task::ALL {
            for spec in StructureSpec::all(task) {
                assert_eq!(spec.to_string().parse::<StructureSpec>().unwrap(), spec);
            }
        }
        let bad: StructureSpec = "passiv/on-subject/rc".parse().unwrap();
        assert!(bad.validate().is_err());
        assert!("quest/sideways".parse::<StructureSpec>().is_err());
        assert!("quest/none/fast".parse::<StructureSpec>().is_err());
    }
}
