mod common;

use monobn::inference::VariableElimination;
use monobn::oracle::{decide, OracleOptions, PairMode};
use monobn::qualitative::{propagate, refine_sign, ArcSigns};
use monobn::{approx_verdict, decide_mid, Direction, Property, Sign, Verdict};

const SIGNS: [Sign; 4] = Sign::ALL;

#[test]
fn sign_algebra_laws() {
    for a in SIGNS {
        assert_eq!(a * Sign::Zero, Sign::Zero);
        assert_eq!(a + Sign::Zero, a);
        assert_eq!(a + Sign::Unknown, Sign::Unknown);
        assert_eq!(a * Sign::Plus, a);
        for b in SIGNS {
            assert_eq!(a * b, b * a);
            assert_eq!(a + b, b + a);
            for c in SIGNS {
                assert_eq!((a * b) * c, a * (b * c));
                assert_eq!((a + b) + c, a + (b + c));
            }
        }
    }
}

fn claim_directions(verdict: &Verdict) -> Vec<Direction> {
    [Direction::Isotone, Direction::Antitone].into_iter().filter(|d| verdict.claims(*d)).collect()
}

#[test]
fn approximate_verdict_is_sound_on_binary_corpus() {
    let mut claims = 0;
    for (seed, net) in common::binary_corpus(600) {
        let report = approx_verdict(&net, 0).unwrap();
        for d in claim_directions(&report.verdict) {
            claims += 1;
            assert!(decide_mid(&net, d).unwrap().holds, "seed {seed}: {} claimed {d:?}", report.verdict.label());
        }
    }
    assert!(claims > 100, "only {claims} claims");
}

#[test]
fn approximate_verdict_is_sound_on_multivalued_corpus() {
    for (seed, net) in common::multi_corpus(400) {
        let report = approx_verdict(&net, 0).unwrap();
        for d in claim_directions(&report.verdict) {
            assert!(decide_mid(&net, d).unwrap().holds, "seed {seed}: claimed {d:?}");
        }
    }
}

#[test]
fn per_variable_signs_are_sound() {
    let engine = VariableElimination::default();
    for (seed, net) in common::binary_corpus(300).chain(common::multi_corpus(200)) {
        let report = approx_verdict(&net, 2).unwrap();
        for o in &report.observables {
            let directions: &[Direction] = match o.sign {
                Sign::Plus => &[Direction::Isotone],
                Sign::Minus => &[Direction::Antitone],
                Sign::Zero => &[Direction::Isotone, Direction::Antitone],
                Sign::Unknown => &[],
            };
            for &d in directions {
                let options = OracleOptions { pairs: PairMode::AllPairs, engine: &engine, vary: Some(o.variable) };
                let v = decide(&net, Property::Mid, d, &options).unwrap();
                assert!(v.holds, "seed {seed}: {} sign {} but {d:?} fails", net.name(o.variable), o.sign);
            }
        }
    }
}

#[test]
fn propagation_updates_are_bounded() {
    for (seed, net) in common::binary_corpus(300).chain(common::multi_corpus(100)) {
        let arcs = ArcSigns::compute(&net);
        for x in net.observables() {
            let p = propagate(&net, &arcs, x);
            assert!(p.updates <= 2 * net.len(), "seed {seed}: {} updates on {} nodes", p.updates, net.len());
            assert_eq!(p.signs[x.0], Sign::Plus);
        }
    }
}

#[test]
fn refinement_is_monotone_in_budget() {
    for (seed, net) in common::binary_corpus(200) {
        let arcs = ArcSigns::compute(&net);
        for x in net.observables() {
            if propagate(&net, &arcs, x).signs[net.output().0] != Sign::Unknown {
                continue;
            }
            let mut previous = Sign::Unknown;
            for budget in 0..=4 {
                let r = refine_sign(&net, x, budget).unwrap();
                if previous != Sign::Unknown {
                    assert_eq!(r.sign, previous, "seed {seed}: budget {budget} lost a resolved sign");
                }
                previous = r.sign;
            }
        }
    }
}

#[test]
fn incompleteness_witness() {
    let net = common::incompleteness_fixture(false);
    let x1 = net.id("X1").unwrap();
    let report = approx_verdict(&net, 0).unwrap();
    assert_eq!(report.verdict, Verdict::Inconclusive { unresolved: vec![x1] });
    assert!(decide_mid(&net, Direction::Isotone).unwrap().holds);
    let c = net.output();
    let d = |v: &str| monobn::inference::posterior(&net, &net.assignment(&[("X1", v)]).unwrap(), c).unwrap();
    assert!((d("x1_1").probs()[1] - 0.87).abs() < 1e-9);
    assert!((d("x1_0").probs()[1] - 0.56).abs() < 1e-9);
    assert_eq!(refine_sign(&net, x1, 1).unwrap().sign, Sign::Plus);
    assert_eq!(approx_verdict(&net, 1).unwrap().verdict, Verdict::IsotoneInDistribution);
}

#[test]
fn incompleteness_witness_with_bounded_context() {
    let net = common::incompleteness_fixture(true);
    let x1 = net.id("X1").unwrap();
    let x2 = net.id("X2").unwrap();
    assert_eq!(refine_sign(&net, x1, 0).unwrap().sign, Sign::Unknown);
    assert_eq!(refine_sign(&net, x1, 1).unwrap().sign, Sign::Unknown);
    assert_eq!(refine_sign(&net, x1, 2).unwrap().sign, Sign::Plus);
    let engine = VariableElimination::default();
    let per_var = |v, d| {
        let options = OracleOptions { pairs: PairMode::AllPairs, engine: &engine, vary: Some(v) };
        decide(&net, Property::Mid, d, &options).unwrap().holds
    };
    assert!(per_var(x1, Direction::Isotone));
    assert!(!per_var(x2, Direction::Isotone));
    assert!(!per_var(x2, Direction::Antitone));
}
