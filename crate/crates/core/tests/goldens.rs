mod common;

use common::{tokens, transform_all, GOLDENS, IDENTITIES};
use povstim::eval::{error_profile, ErrorProfile};
use povstim::features::Language;
use povstim::grammar::{Grammar, Modifier};
use povstim::transform::{self, TransformRule};

#[test]
fn hierarchical_rules_reproduce_printed_targets() {
    for ex in GOLDENS {
        let grammar = Grammar::builtin(ex.language);
        let out = transform_all(grammar, ex.source, TransformRule::hierarchical(ex.task));
        assert_eq!(out, tokens(ex.hierarchical), "{}", ex.source);
    }
}

#[test]
fn linear_rules_reproduce_printed_targets() {
    let mut checked = 0;
    for ex in GOLDENS {
        let Some(linear) = ex.linear else { continue };
        let grammar = Grammar::builtin(ex.language);
        let out = transform_all(grammar, ex.source, TransformRule::linear(ex.task));
        assert_eq!(out, tokens(linear), "{}", ex.source);
        checked += 1;
    }
    assert_eq!(checked, 5);
}

#[test]
fn printed_sources_have_the_expected_task() {
    for ex in GOLDENS {
        for tree in Grammar::builtin(ex.language).parses(&tokens(ex.source)).unwrap() {
            let spec = tree.structure();
            assert_eq!(spec.task, ex.task, "{}", ex.source);
            if ex.linear.is_some() {
                assert_eq!(spec.modifier, Modifier::OnSubject, "{}", ex.source);
            }
        }
    }
}

#[test]
fn identity_examples_parse_and_map_to_themselves() {
    for &(lang, sentence) in IDENTITIES {
        let out = transform_all(Grammar::builtin(lang), sentence, TransformRule::Identity);
        assert_eq!(out, tokens(sentence));
    }
}

#[test]
fn traces_replay_to_the_printed_targets() {
    for ex in GOLDENS {
        let grammar = Grammar::builtin(ex.language);
        let src = tokens(ex.source);
        for tree in grammar.parses(&src).unwrap() {
            let r = transform::apply(TransformRule::hierarchical(ex.task), grammar, &tree).unwrap();
            assert_eq!(transform::replay(&src, &r.trace).unwrap(), r.output, "{}", ex.source);
        }
    }
}

#[test]
fn dropped_pp_in_agent_phrase_is_the_only_error() {
    let g = Grammar::builtin(Language::En);
    let tree = g.parse(&tokens("my yaks below the unicorns comforted the orangutans .")).unwrap();
    let profile = error_profile(g, &tree, &tokens("the orangutans were comforted by my yaks .")).unwrap();
    let ErrorProfile::Passiv(p) = &profile else {
        panic!("expected a passivization profile")
    };
    assert!(p.object_np_moved);
    assert!(p.subject_in_by_phrase);
    assert!(!p.pp_on_second_np_preserved);
    assert!(p.tense_reinflected);
    assert!(p.passive_aux_inserted_inflected);
    assert!(!profile.all_correct());
}

#[test]
fn goldens_run_well_under_a_second() {
    let start = std::time::Instant::now();
    for ex in GOLDENS {
        let grammar = Grammar::builtin(ex.language);
        transform_all(grammar, ex.source, TransformRule::hierarchical(ex.task));
        if ex.linear.is_some() {
            transform_all(grammar, ex.source, TransformRule::linear(ex.task));
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}
