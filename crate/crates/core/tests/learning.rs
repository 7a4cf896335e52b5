mod common;

use common::{word, Audit};
use smealy::algebra::{Algebra, Char, EqSet};
use smealy::automata::{Equivalence, SMealy};
use smealy::bench::{make_lower_bound, make_mh, make_worked_example, random_sma, RandomSpec};
use smealy::learner::{learn, LearnConfig, NoMonitor, TraceLog};
use smealy::obstable::RepairOrder;
use smealy::oracle::{
    essential_characters, EquivMode, EquivOracle, ScriptedOracle, SimulatedTeacher, Teacher,
};
use smealy::partition::SweepPartitioner;
use smealy::Error;

fn learn_with(target: &SMealy, mode: EquivMode, cfg: &LearnConfig) -> smealy::Result<SMealy> {
    let mut t = SimulatedTeacher::new(target.clone(), mode)?;
    learn(
        &mut t,
        target.algebra(),
        &SweepPartitioner,
        cfg,
        &mut NoMonitor,
    )
    .map(|(m, _)| m)
}

#[test]
fn closed_first_order_also_converges() {
    let cfg = LearnConfig {
        order: RepairOrder::ClosedFirst,
        ..LearnConfig::default()
    };
    for target in [
        make_worked_example(),
        make_mh(),
        make_lower_bound(3, 4).unwrap(),
    ] {
        let m = learn_with(&target, EquivMode::Lexmin, &cfg).unwrap();
        assert_eq!(m.symbolic_equiv(&target).unwrap(), Equivalence::Equal);
    }
}

#[test]
fn equality_algebra_target() {
    let alg = Algebra::equality(None).unwrap();
    let set = |xs: &[u64], co: bool| {
        let s = xs.iter().copied().collect();
        alg.eq_set(if co {
            EqSet::Cofinite(s)
        } else {
            EqSet::Finite(s)
        })
        .unwrap()
    };
    let target = SMealy::new_valid(
        alg.clone(),
        2,
        0,
        vec![],
        vec![
            (0, set(&[3, 7], false), 1, "hit".into()),
            (0, set(&[3, 7], true), 0, "miss".into()),
            (1, set(&[3], false), 0, "again".into()),
            (1, set(&[3], true), 1, "wait".into()),
        ],
    )
    .unwrap();
    let essential = essential_characters(&target).unwrap();
    let mut t = SimulatedTeacher::new(target.clone(), EquivMode::Lexmin).unwrap();
    let mut audit = Audit::new(&essential);
    let (m, s) = learn(
        &mut t,
        &alg,
        &SweepPartitioner,
        &LearnConfig::default(),
        &mut audit,
    )
    .unwrap();
    assert!(audit.violations.is_empty(), "{:?}", audit.violations);
    assert_eq!(m.symbolic_equiv(&target).unwrap(), Equivalence::Equal);
    assert!(s.eq_queries <= target.states() + essential.len());
}

#[test]
fn random_oracle_is_seed_deterministic() {
    let target = random_sma(&RandomSpec::new(8, 6, 42)).unwrap();
    let run = |seed| {
        let mut t = SimulatedTeacher::new(target.clone(), EquivMode::Random(seed)).unwrap();
        let mut log = TraceLog::default();
        let (m, s) = learn(
            &mut t,
            target.algebra(),
            &SweepPartitioner,
            &LearnConfig::default(),
            &mut log,
        )
        .unwrap();
        (m, s.eq_queries, s.output_queries, log.lines)
    };
    let (a, b) = (run(5), run(5));
    assert_eq!(a.0, b.0);
    assert_eq!((a.1, a.2, &a.3), (b.1, b.2, &b.3));
}

#[test]
fn counterexamples_come_from_the_essential_set() {
    let target = make_lower_bound(2, 3).unwrap();
    let essential = essential_characters(&target).unwrap();
    let mut eq = EquivOracle::new(target.clone(), &essential, EquivMode::Lexmin).unwrap();
    let one_state = SMealy::new_valid(
        Algebra::naturals(),
        1,
        0,
        vec![],
        vec![(0, Algebra::naturals().top(), 0, "0".into())],
    )
    .unwrap();
    let cex = eq.query(&one_state).unwrap().expect("differs");
    assert!(cex.iter().all(|a| essential.contains(a)));
    assert_ne!(one_state.run(&cex).unwrap(), target.run(&cex).unwrap());
    assert_eq!(eq.query(&target).unwrap(), None);
    assert_eq!(eq.queries(), 2);
}

#[test]
fn scripted_oracle_rejects_bad_scripts() {
    let target = make_worked_example();
    let cfg = LearnConfig::default();
    let mut t = ScriptedOracle::new(target.clone(), vec![word(&[0])]);
    let e = learn(
        &mut t,
        target.algebra(),
        &SweepPartitioner,
        &cfg,
        &mut NoMonitor,
    )
    .unwrap_err();
    assert!(matches!(e, Error::Script(_)), "{e}");
    let mut t = ScriptedOracle::new(target.clone(), vec![word(&[20])]);
    let e = learn(
        &mut t,
        target.algebra(),
        &SweepPartitioner,
        &cfg,
        &mut NoMonitor,
    )
    .unwrap_err();
    assert!(matches!(e, Error::Script(_)), "{e}");
}

/// Always answers with the same counterexample.
struct Stubborn(SimulatedTeacher);

impl Teacher for Stubborn {
    fn output(&mut self, w: &[Char]) -> smealy::Result<String> {
        self.0.output(w)
    }
    fn equivalence(&mut self, _: &SMealy) -> smealy::Result<Option<Vec<Char>>> {
        Ok(Some(word(&[20])))
    }
    fn output_queries(&self) -> usize {
        self.0.output_queries()
    }
}

#[test]
fn misbehaving_oracle_is_reported() {
    let target = make_worked_example();
    let mut t = Stubborn(SimulatedTeacher::new(target.clone(), EquivMode::Lexmin).unwrap());
    let e = learn(
        &mut t,
        target.algebra(),
        &SweepPartitioner,
        &LearnConfig::default(),
        &mut NoMonitor,
    )
    .unwrap_err();
    assert!(matches!(e, Error::OracleAssumptionViolation(_)), "{e}");
}

#[test]
fn round_cap_is_enforced() {
    let target = make_lower_bound(3, 3).unwrap();
    let cfg = LearnConfig {
        max_rounds: Some(2),
        ..LearnConfig::default()
    };
    let e = learn_with(&target, EquivMode::Lexmin, &cfg).unwrap_err();
    assert!(matches!(e, Error::CapExceeded(_)), "{e}");
}

#[test]
fn initial_character_outside_the_domain_is_rejected() {
    let target = make_mh();
    let cfg = LearnConfig {
        init: Some(Char::nat(0)),
        ..LearnConfig::default()
    };
    assert!(learn_with(&target, EquivMode::Lexmin, &cfg).is_err());
}

fn random_equality_target(seed: u64) -> SMealy {
    use rand::Rng;
    let mut r = common::rng(seed);
    let alg = Algebra::equality(None).unwrap();
    let n = r.random_range(1..=4);
    let mut trans = Vec::new();
    for q in 0..n {
        let k = r.random_range(1..=3);
        let mut groups = vec![std::collections::BTreeSet::new(); k];
        for x in 0..6u64 {
            if r.random_bool(0.6) {
                groups[r.random_range(0..k)].insert(x);
            }
        }
        let listed: std::collections::BTreeSet<u64> =
            groups[1..].iter().flatten().copied().collect();
        for (i, g) in groups.into_iter().enumerate() {
            let set = if i == 0 {
                EqSet::Cofinite(listed.clone())
            } else {
                EqSet::Finite(g)
            };
            let out = format!("o{}", r.random_range(0..2));
            trans.push((q, alg.eq_set(set).unwrap(), r.random_range(0..n), out));
        }
    }
    SMealy::new_valid(alg, n, 0, vec![], trans).unwrap()
}

proptest::proptest! {
    #[test]
    fn random_equality_targets_are_learned(seed in proptest::prelude::any::<u64>()) {
        let target = random_equality_target(seed);
        let essential = essential_characters(&target).unwrap();
        let mut t = SimulatedTeacher::new(target.clone(), EquivMode::Lexmin).unwrap();
        let mut audit = Audit::new(&essential);
        let (m, s) = learn(&mut t, target.algebra(), &SweepPartitioner, &LearnConfig::default(), &mut audit).unwrap();
        proptest::prop_assert!(audit.violations.is_empty(), "{:?}", audit.violations);
        proptest::prop_assert_eq!(m.symbolic_equiv(&target).unwrap(), Equivalence::Equal);
        proptest::prop_assert!(m.states() <= target.states());
        proptest::prop_assert!(s.eq_queries <= target.states() + essential.len());
    }
}
