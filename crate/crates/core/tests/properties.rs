use std::collections::BTreeSet;

use proptest::prelude::*;

use povstim::dataset::{build_splits, DatasetConfig, ExampleTask, SplitCounts, TransformExample, SPLITS};
use povstim::eval::{aggregate, diagnostic_index, error_profile, evaluate, ExampleScore, SeqMode};
use povstim::features::Language;
use povstim::grammar::{Grammar, Modifier, StructureSpec, Task};
use povstim::miner::{jaccard, scan_pairs, Document, JaccardMode, MinerConfig, RuleSegmenter};
use povstim::transform::{self, TransformRule};

fn language() -> impl Strategy<Value = Language> {
    prop_oneof![Just(Language::En), Just(Language::De)]
}

fn task() -> impl Strategy<Value = Task> {
    prop_oneof![Just(Task::Quest), Just(Task::Passiv)]
}

/// A valid structure of either task with a sampling seed.
fn sampled() -> impl Strategy<Value = (Language, StructureSpec, u64)> {
    (language(), task(), any::<prop::sample::Index>(), any::<u64>())
        .prop_map(|(l, t, i, seed)| {
            let specs = StructureSpec::all(t);
            (l, specs[i.index(specs.len())], seed)
        })
}

proptest! {
    #[test]
    fn sampled_sentences_parse_back_to_their_structure((lang, spec, seed) in sampled()) {
        let g = Grammar::builtin(lang);
        let tree = g.sample_sentence(&spec, seed).unwrap();
        prop_assert!(tree.check_invariants().is_ok());
        prop_assert_eq!(tree.structure(), spec);
        let parsed = g.parse(&tree.tokens()).unwrap();
        prop_assert_eq!(parsed.structure(), spec);
        prop_assert_eq!(parsed.tokens(), tree.tokens());
        prop_assert_eq!(g.sample_sentence(&spec, seed).unwrap().tokens(), tree.tokens());
    }

    #[test]
    fn rules_agree_exactly_when_there_is_no_subject_modifier((lang, spec, seed) in sampled()) {
        let g = Grammar::builtin(lang);
        let tree = g.sample_sentence(&spec, seed).unwrap();
        let h = transform::apply(TransformRule::hierarchical(spec.task), g, &tree).unwrap().output;
        let l = transform::apply(TransformRule::linear(spec.task), g, &tree).unwrap().output;
        if spec.modifier == Modifier::OnSubject {
            let i = diagnostic_index(spec.task);
            prop_assert_ne!(&h[i], &l[i]);
        } else {
            prop_assert_eq!(h, l);
        }
    }

    #[test]
    fn traces_replay_to_the_output((lang, spec, seed) in sampled(), hierarchical in any::<bool>()) {
        let g = Grammar::builtin(lang);
        let tree = g.sample_sentence(&spec, seed).unwrap();
        let rule = if hierarchical { TransformRule::hierarchical(spec.task) } else { TransformRule::linear(spec.task) };
        let r = transform::apply(rule, g, &tree).unwrap();
        prop_assert_eq!(transform::replay(&tree.tokens(), &r.trace).unwrap(), r.output);
    }

    #[test]
    fn exact_predictions_have_a_clean_profile((lang, spec, seed) in sampled()) {
        let g = Grammar::builtin(lang);
        let tree = g.sample_sentence(&spec, seed).unwrap();
        let target = transform::apply(TransformRule::hierarchical(spec.task), g, &tree).unwrap().output;
        let profile = error_profile(g, &tree, &target).unwrap();
        prop_assert!(profile.all_correct(), "{:?}", profile);
        prop_assert!(!profile.unaligned());
    }

    #[test]
    fn jaccard_is_symmetric_and_bounded(
        a in prop::collection::vec("[a-e]{1,2}", 0..12),
        b in prop::collection::vec("[a-e]{1,2}", 0..12),
        multiset in any::<bool>(),
    ) {
        let mode = if multiset { JaccardMode::Multiset } else { JaccardMode::Types };
        let ab = jaccard(&a, &b, mode);
        prop_assert_eq!(ab, jaccard(&b, &a, mode));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(jaccard(&a, &a, mode), 1.0);
    }
}

const POOL: &[&str] = &[
    "The dog has eaten and the cat can run.",
    "Has the dog eaten and the cat can run?",
    "Can the dog run while the cat has slept?",
    "The dog can run while the cat has slept.",
    "It was raining.",
    "We went home after lunch.",
    "She is sure they will come.",
    "Is she sure they will come?",
];

fn documents() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(prop::collection::vec(0..POOL.len(), 1..8), 1..20).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, idx)| Document {
                id: format!("d{i:03}"),
                text: idx.iter().map(|&j| POOL[j]).collect::<Vec<_>>().join(" "),
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn scan_ignores_document_order(
        (docs, shuffled) in documents().prop_flat_map(|d| (Just(d.clone()), Just(d).prop_shuffle())),
    ) {
        let config = MinerConfig::default();
        let seg = RuleSegmenter::default();
        let (a, sa) = scan_pairs(&docs, &config, &seg, None);
        let (b, sb) = scan_pairs(&shuffled, &config, &seg, None);
        prop_assert_eq!(a, b);
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn aggregate_matches_a_direct_count(
        flags in prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()), 1..60),
        quest in any::<bool>(),
    ) {
        let scores: Vec<ExampleScore> = flags
            .iter()
            .map(|&(identity, exact, sub, diag, lin)| ExampleScore {
                identity,
                exact,
                subsequence: sub || exact,
                diagnostic: diag && !identity,
                linear_diagnostic: lin && !identity,
                profile: None,
            })
            .collect();
        let task = if quest { Task::Quest } else { Task::Passiv };
        let r = aggregate(task, SeqMode::Exact, Some(500), &scores);
        let transformed: Vec<&ExampleScore> = scores.iter().filter(|s| !s.identity).collect();
        let n = transformed.len();
        prop_assert_eq!(r.n, n);
        prop_assert_eq!(r.identity_n, scores.len() - n);
        let frac = |f: &dyn Fn(&ExampleScore) -> bool| {
            if n == 0 { 0.0 } else { transformed.iter().filter(|s| f(s)).count() as f64 / n as f64 }
        };
        prop_assert_eq!(r.sequence_acc, frac(&|s| s.exact));
        prop_assert_eq!(r.subsequence_acc, frac(&|s| s.subsequence));
        prop_assert!(r.subsequence_acc >= r.exact_acc);
        prop_assert_eq!(r.diagnostic_acc(), frac(&|s| s.diagnostic));
        prop_assert_eq!(r.linear_freq(), frac(&|s| s.linear_diagnostic));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagnostic_and_linear_hits_never_overlap(
        lang in language(),
        task in task(),
        seed in any::<u64>(),
        choices in prop::collection::vec(0u8..3, 20),
    ) {
        let g = Grammar::builtin(lang);
        let specs: Vec<StructureSpec> =
            StructureSpec::all(task).into_iter().filter(|s| s.modifier == Modifier::OnSubject).collect();
        let mut examples = Vec::new();
        let mut preds = Vec::new();
        for (i, &c) in choices.iter().enumerate() {
            let spec = specs[i % specs.len()];
            let tree = g.sample_sentence(&spec, seed.wrapping_add(i as u64)).unwrap();
            let source = tree.tokens();
            let target = transform::apply(TransformRule::hierarchical(task), g, &tree).unwrap().output;
            let linear = transform::apply(TransformRule::linear(task), g, &tree).unwrap().output;
            preds.push(match c {
                0 => target.clone(),
                1 => linear,
                _ => source.iter().rev().cloned().collect(),
            });
            examples.push(TransformExample {
                task: ExampleTask::from(task),
                language: lang,
                structure: spec,
                source,
                target,
            });
        }
        let r = evaluate(g, task, &examples, &preds, SeqMode::Exact, None).unwrap();
        prop_assert!(r.diagnostic_acc() + r.linear_freq() <= 1.0 + 1e-12);
        let hier = choices.iter().filter(|&&c| c == 0).count() as f64 / choices.len() as f64;
        let lin = choices.iter().filter(|&&c| c == 1).count() as f64 / choices.len() as f64;
        prop_assert!(r.sequence_acc >= hier - 1e-12);
        prop_assert!(r.linear_freq() >= lin - 1e-12);
    }

    #[test]
    fn splits_stay_disjoint_without_dedup(lang in language(), task in task(), seed in any::<u64>()) {
        let g = Grammar::builtin(lang);
        let mut config = DatasetConfig::new(lang, task, seed);
        config.counts = SplitCounts { train: 200, dev: 20, test: 40, gen: 40 };
        config.dedup = false;
        let m = build_splits(g, &config).unwrap();
        let sets: Vec<BTreeSet<&Vec<String>>> = SPLITS
            .iter()
            .map(|s| m.split(s).unwrap().iter().map(|e| &e.source).collect())
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                prop_assert!(sets[i].is_disjoint(&sets[j]), "{} and {} overlap", SPLITS[i], SPLITS[j]);
            }
        }
    }
}
