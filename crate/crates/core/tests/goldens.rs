mod common;

use sarcgen::pipeline::Stage;
use sarcgen::{generate, run_ablation, System, SystemConfig};

const HATE: &str = "I hate getting sick from fast food.";
const GENES: &str = "I inherited unfavorable genes from my mother.";
const ADDICT: &str = "It is not fun to date a drug addict.";
const POPCORN: &str = "Burnt popcorn is gross.";

fn run(system: System, input: &str) -> String {
    let res = common::resources();
    let backends = common::fixture_backends();
    let cfg = SystemConfig::new(system).with_seed(7);
    match generate(input, &cfg, &res, &backends) {
        Ok(out) => out.output,
        Err(e) => panic!("{system} on {input:?}: {e} after {:?}", e.trace.stages),
    }
}

#[test]
fn reversal_only_outputs() {
    assert_eq!(run(System::Rv, HATE), "I love getting sick from fast food.");
    assert_eq!(
        run(System::Rv, GENES),
        "I inherited great genes from my mother."
    );
    assert_eq!(run(System::Rv, ADDICT), "It is fun to date a drug addict.");
    assert_eq!(run(System::Rv, POPCORN), "Burnt popcorn is lovely.");
}

#[test]
fn full_model_outputs() {
    assert_eq!(
        run(System::Fm, HATE),
        "I love getting sick from fast food. Stomach ache is just an additional side effect."
    );
    assert_eq!(
        run(System::Fm, GENES),
        "I inherited great genes from my mother. Ugly goes down to the bone."
    );
    assert_eq!(
        run(System::Fm, ADDICT),
        "It is fun to date a drug addict. Spent the night in a police cell after his arrest."
    );
    assert_eq!(
        run(System::Fm, POPCORN),
        "Burnt popcorn is lovely. The smell made me want to vomit."
    );
}

#[test]
fn context_only_outputs() {
    assert_eq!(
        run(System::NoRv, HATE),
        "Stomach ache is just an additional side effect."
    );
    assert_eq!(run(System::NoRv, GENES), "Ugly goes down to the bone.");
    assert_eq!(
        run(System::NoRv, ADDICT),
        "Spent the night in a police cell after his arrest."
    );
    assert_eq!(
        run(System::NoRv, POPCORN),
        "The smell made me want to vomit."
    );
}

#[test]
fn random_choice_starts_with_reversal() {
    for input in [HATE, GENES, ADDICT, POPCORN] {
        let rv = run(System::Rv, input);
        let nsi = run(System::Nsi, input);
        assert!(nsi.starts_with(&format!("{rv} ")), "{nsi}");
    }
}

#[test]
fn ablation_matches_individual_runs() {
    let res = common::resources();
    let backends = common::fixture_backends();
    let base = SystemConfig::new(System::Fm).with_seed(7);
    for input in [HATE, GENES, ADDICT, POPCORN] {
        let all = run_ablation(input, &base, &res, &backends);
        assert_eq!(all.len(), 4);
        for (system, out) in all {
            let single = generate(input, &base.for_system(system), &res, &backends).unwrap();
            assert_eq!(out.unwrap(), single);
        }
    }
}

#[test]
fn fm_trace_records_every_stage_once() {
    let res = common::resources();
    let backends = common::fixture_backends();
    let out = generate(HATE, &SystemConfig::new(System::Fm), &res, &backends).unwrap();
    let t = &out.trace;
    assert_eq!(
        t.stages,
        [
            Stage::Tokenize,
            Stage::Reversal,
            Stage::ContentTerms,
            Stage::Causes,
            Stage::Concept,
            Stage::Retrieval,
            Stage::Grammar,
            Stage::Ranking,
            Stage::Output
        ]
    );
    assert_eq!(
        t.content_terms.as_deref().unwrap(),
        ["hate", "getting", "sick", "fast", "food"]
    );
    assert_eq!(t.concept.as_ref().unwrap().text, "stomach ache");
    let ranked = t.ranked.as_ref().unwrap();
    assert_eq!(t.chosen.as_ref(), Some(&ranked[0].context));
    assert!(t.error.is_none());
}

#[test]
fn ablation_isolates_a_missing_reversal_target() {
    use sarcgen::commonsense::FixtureCauses;
    use sarcgen::ranking::HeuristicNli;
    use sarcgen::{Backends, Error};
    use std::sync::Arc;

    let res = common::resources();
    let causes =
        FixtureCauses::from_json(r#"{"sky|blue": [{"phrase": "a stomach ache", "score": 0.9}]}"#)
            .unwrap();
    let backends = Backends {
        causes: Some(Arc::new(causes)),
        nli: Some(Arc::new(HeuristicNli::new(
            res.antonyms.clone(),
            res.stopwords.clone(),
        ))),
        gec: None,
    };
    let base = SystemConfig::new(System::Fm).with_seed(7);
    let all = run_ablation("The sky is blue.", &base, &res, &backends);
    for system in [System::Fm, System::Rv, System::Nsi] {
        let err = all[&system].as_ref().unwrap_err();
        assert!(
            matches!(err.error, Error::NoReversalTarget),
            "{system}: {}",
            err.error
        );
        assert_eq!(err.trace.stages.last(), Some(&Stage::Reversal), "{system}");
    }
    let norv = all[&System::NoRv].as_ref().unwrap();
    assert!(
        norv.output.to_lowercase().contains("stomach ache"),
        "{}",
        norv.output
    );
}
