#![allow(dead_code)]

use povstim::features::Language;
use povstim::grammar::{Grammar, Task};
use povstim::tokenize;
use povstim::transform::{self, TransformRule};

pub struct Golden {
    pub language: Language,
    pub task: Task,
    pub source: &'static str,
    pub hierarchical: &'static str,
    pub linear: Option<&'static str>,
}

const fn g(
    language: Language,
    task: Task,
    source: &'static str,
    hierarchical: &'static str,
    linear: Option<&'static str>,
) -> Golden {
    Golden {
        language,
        task,
        source,
        hierarchical,
        linear,
    }
}

use Language::{De, En};
use Task::{Passiv, Quest};

/// Published reference transformations.
pub const GOLDENS: &[Golden] = &[
    // One per task and modifier site
    g(En, Quest, "some xylophones have remembered my yak .", "have some xylophones remembered my yak ?", None),
    g(
        En,
        Quest,
        "my zebras have amused some walrus who has waited .",
        "have my zebras amused some walrus who has waited ?",
        None,
    ),
    g(
        En,
        Quest,
        "my vultures that our peacock hasn't applauded haven't read .",
        "haven't my vultures that our peacock hasn't applauded read ?",
        None,
    ),
    g(En, Passiv, "your quails amused some vulture .", "some vulture was amused by your quails .", None),
    g(
        En,
        Passiv,
        "some tyrannosaurus entertained your quail behind your newt .",
        "your quail behind your newt was entertained by some tyrannosaurus .",
        None,
    ),
    g(
        En,
        Passiv,
        "the zebra upon the yak confused your orangutans .",
        "your orangutans were confused by the zebra upon the yak .",
        None,
    ),
    // Hierarchical and linear rules disagree
    g(
        En,
        Quest,
        "my unicorn that hasn't amused the yaks has eaten .",
        "has my unicorn that hasn't amused the yaks eaten ?",
        Some("hasn't my unicorn that amused the yaks has eaten ?"),
    ),
    g(
        De,
        Quest,
        "die hunde , die deine löwen bewundern können , haben gewartet .",
        "haben die hunde , die deine löwen bewundern können , gewartet ?",
        Some("können die hunde , die deine löwen bewundern , haben gewartet ?"),
    ),
    g(
        En,
        Passiv,
        "her walruses above my unicorns annoyed her quail .",
        "her quail was annoyed by her walruses above my unicorns .",
        Some("my unicorns were annoyed by her walruses ."),
    ),
    g(
        De,
        Passiv,
        "unsere papageie bei meinen dinosauriern bedauerten unsere esel .",
        "unsere esel wurden von unseren papageien bei meinen dinosauriern bedauert .",
        Some("meine dinosaurier wurden von unseren papageien bedauert ."),
    ),
    g(
        En,
        Quest,
        "the yak that your unicorns have amused hasn't entertained a newt .",
        "hasn't the yak that your unicorns have amused entertained a newt ?",
        Some("have the yak that your unicorns amused hasn't entertained a newt ?"),
    ),
    // Passives in both languages
    g(En, Passiv, "your quails amused some vulture .", "some vulture was amused by your quails .", None),
    g(
        De,
        Passiv,
        "ihr esel unterhielt meinen salamander .",
        "mein salamander wurde von ihrem esel unterhalten .",
        None,
    ),
    // German question formation
    g(
        De,
        Quest,
        "unsere salamander haben die pfaue bewundert .",
        "haben unsere salamander die pfaue bewundert ?",
        None,
    ),
    g(
        De,
        Quest,
        "ihre hunde haben unseren orang-utan genervt .",
        "haben ihre hunde unseren orang-utan genervt ?",
        None,
    ),
    g(
        De,
        Quest,
        "einige molche können meinen papagei , der deinen raben trösten kann , nerven .",
        "können einige molche meinen papagei , der deinen raben trösten kann , nerven ?",
        None,
    ),
    g(
        De,
        Quest,
        "ihr hund , den ihr geier nerven kann , hat einige pfaue amüsiert .",
        "hat ihr hund , den ihr geier nerven kann , einige pfaue amüsiert ?",
        None,
    ),
    // German passivization
    g(
        De,
        Passiv,
        "ihr kater bedauerte den dinosaurier .",
        "der dinosaurier wurde von ihrem kater bedauert .",
        None,
    ),
    g(
        De,
        Passiv,
        "unsere ziesel amüsierten einen kater hinter dem dinosaurier .",
        "ein kater hinter dem dinosaurier wurde von unseren zieseln amüsiert .",
        None,
    ),
    g(
        De,
        Passiv,
        "die geier hinter meinem ziesel akzeptieren die molche .",
        "die molche wurden von den geiern hinter meinem ziesel akzeptiert .",
        None,
    ),
];

/// Declaratives printed as identity examples.
pub const IDENTITIES: &[(Language, &str)] = &[
    (De, "unser ziesel kann den salamander , der meinen pfau verwirrt hat , akzeptieren ."),
    (De, "dein molch , den mein wellensittich bewundert hat , kann meine dinosaurier trösten ."),
    (De, "die löwen unterhielten einen wellensittich ."),
    (De, "ihre geier verwirrten ihren raben über unserem ziesel ."),
    (De, "ein löwe unter unserem hund nervte einige ziesel ."),
];

pub fn tokens(s: &str) -> Vec<String> {
    tokenize::normalize(s)
}

/// Output of `rule` on every reading of `source`; panics unless all
/// readings agree.
pub fn transform_all(grammar: &Grammar, source: &str, rule: TransformRule) -> Vec<String> {
    let trees = grammar
        .parses(&tokens(source))
        .unwrap_or_else(|e| panic!("`{source}` does not parse: {e}"));
    let outputs: Vec<Vec<String>> = trees
        .iter()
        .map(|t| transform::apply(rule, grammar, t).unwrap_or_else(|e| panic!("`{source}`: {e}")).output)
        .collect();
    for o in &outputs[1..] {
        assert_eq!(o, &outputs[0], "readings of `{source}` disagree under {rule}");
    }
    outputs.into_iter().next().expect("at least one parse")
}
