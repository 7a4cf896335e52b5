//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smealy::algebra::{
    next_above, Algebra, Axis, AxisKind, Char, EqSet, Interval, Predicate, Scalar, Word,
};
use smealy::automata::{Equivalence, SMealy};
use smealy::learner::{Hypothesis, Monitor, TableEvent};
use smealy::obstable::ObservationTable;
use smealy::partition::{
    partition_equality, partition_intervals, partition_product, Partitioner, SweepPartitioner,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn word(xs: &[u64]) -> Word {
    xs.iter().map(|&x| Char::nat(x)).collect()
}

// ---------------------------------------------------------------- algebras

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgKind {
    Naturals,
    BoundedNatPair,
    Reals,
    Mixed,
    EqualityOpen,
    EqualityCarrier,
}

pub const ALG_KINDS: [AlgKind; 6] = [
    AlgKind::Naturals,
    AlgKind::BoundedNatPair,
    AlgKind::Reals,
    AlgKind::Mixed,
    AlgKind::EqualityOpen,
    AlgKind::EqualityCarrier,
];

const SYMBOLS: u64 = 16;

pub fn law_algebra(kind: AlgKind) -> Algebra {
    let ax = |a: smealy::Result<Axis>| a.unwrap();
    match kind {
        AlgKind::Naturals => Algebra::naturals(),
        AlgKind::BoundedNatPair => Algebra::product(vec![
            ax(Axis::nat_range(2, Some(14))),
            ax(Axis::nat_range(0, Some(9))),
        ])
        .unwrap(),
        AlgKind::Reals => Algebra::product(vec![ax(Axis::real_range(-3.0, None))]).unwrap(),
        AlgKind::Mixed => Algebra::product(vec![
            ax(Axis::nat_range(0, Some(2))),
            ax(Axis::real_range(0.0, Some(6.0))),
            ax(Axis::nat_range(0, None)),
        ])
        .unwrap(),
        AlgKind::EqualityOpen => Algebra::equality(None).unwrap(),
        AlgKind::EqualityCarrier => Algebra::equality(Some((0..12).collect())).unwrap(),
    }
}

/// Candidate bounds on an axis. Samples are drawn near these so that
/// predicate boundaries get exercised.
fn anchors(ax: &Axis) -> Vec<Scalar> {
    match (ax.kind, ax.min, ax.sup) {
        (AxisKind::Nat, Scalar::Nat(lo), sup) => {
            let hi = match sup {
                Some(Scalar::Nat(h)) => h,
                _ => lo + 20,
            };
            (lo..hi).map(Scalar::Nat).collect()
        }
        (AxisKind::Real, Scalar::Real(lo), sup) => {
            let lo = lo.get();
            let hi = match sup {
                Some(Scalar::Real(h)) => h.get(),
                _ => lo + 12.0,
            };
            let step = (hi - lo) / 12.0;
            let mut out = Vec::new();
            for i in 0..12 {
                let x = Scalar::real(lo + step * i as f64).unwrap();
                out.push(x);
                out.push(next_above(x).unwrap());
            }
            out
        }
        _ => unreachable!(),
    }
}

fn random_scalar(rng: &mut ChaCha8Rng, ax: &Axis) -> Scalar {
    let a = anchors(ax);
    if ax.kind == AxisKind::Real && rng.random_bool(0.3) {
        let lo = ax.min.as_f64();
        let hi = ax.sup.map_or(lo + 12.0, Scalar::as_f64);
        let x = Scalar::real(rng.random_range(lo..hi)).unwrap();
        if ax.accepts(x) {
            return x;
        }
    }
    a[rng.random_range(0..a.len())]
}

pub fn random_char(rng: &mut ChaCha8Rng, alg: &Algebra) -> Char {
    match alg {
        Algebra::Intervals(axes) => Char::new(axes.iter().map(|ax| random_scalar(rng, ax))),
        Algebra::Equality { carrier } => match carrier {
            Some(c) => {
                let v: Vec<u64> = c.iter().copied().collect();
                Char::sym(v[rng.random_range(0..v.len())])
            }
            None => Char::sym(rng.random_range(0..SYMBOLS + 4)),
        },
    }
}

fn random_interval(rng: &mut ChaCha8Rng, ax: &Axis) -> Interval {
    let a = anchors(ax);
    let i = rng.random_range(0..a.len());
    if i + 1 == a.len() || rng.random_bool(0.25) {
        return Interval::new(a[i], None).unwrap();
    }
    let j = rng.random_range(i + 1..a.len());
    Interval::new(a[i], Some(a[j])).unwrap()
}

pub fn random_pred(rng: &mut ChaCha8Rng, alg: &Algebra) -> Predicate {
    match alg {
        Algebra::Intervals(axes) => {
            let boxes: Vec<Vec<Interval>> = (0..rng.random_range(0..5))
                .map(|_| axes.iter().map(|ax| random_interval(rng, ax)).collect())
                .collect();
            alg.from_boxes(&boxes).unwrap()
        }
        Algebra::Equality { .. } => {
            let set: BTreeSet<u64> = (0..SYMBOLS).filter(|_| rng.random_bool(0.3)).collect();
            let set = if rng.random_bool(0.5) {
                EqSet::Finite(set)
            } else {
                EqSet::Cofinite(set)
            };
            alg.eq_set(set).unwrap()
        }
    }
}

/// Checks the Boolean laws, canonical form and witness minimality on one
/// random predicate pair, over `samples` random characters.
pub fn laws_case(kind: AlgKind, seed: u64, samples: usize) {
    let alg = law_algebra(kind);
    let mut rng = rng(seed);
    let p = random_pred(&mut rng, &alg);
    let q = random_pred(&mut rng, &alg);
    let meet = alg.meet(&p, &q).unwrap();
    let join = alg.join(&p, &q).unwrap();
    let not_p = alg.complement(&p).unwrap();
    let minus = alg.minus(&p, &q).unwrap();

    let mut least: Option<Char> = None;
    for _ in 0..samples {
        let c = random_char(&mut rng, &alg);
        let (a, b) = (alg.denotes(&p, &c).unwrap(), alg.denotes(&q, &c).unwrap());
        assert_eq!(alg.denotes(&meet, &c).unwrap(), a && b, "meet at {c}");
        assert_eq!(alg.denotes(&join, &c).unwrap(), a || b, "join at {c}");
        assert_eq!(alg.denotes(&not_p, &c).unwrap(), !a, "complement at {c}");
        assert_eq!(alg.denotes(&minus, &c).unwrap(), a && !b, "minus at {c}");
        if a && least.as_ref().is_none_or(|l| c < *l) {
            least = Some(c);
        }
    }

    assert_eq!(alg.complement(&not_p).unwrap(), p);
    let not_q = alg.complement(&q).unwrap();
    assert_eq!(
        alg.complement(&alg.meet(&not_p, &not_q).unwrap()).unwrap(),
        join
    );
    assert_eq!(alg.meet(&q, &p).unwrap(), meet);
    assert_eq!(alg.join(&p, &p).unwrap(), p);
    assert_eq!(alg.meet(&p, &not_q).unwrap(), minus);
    assert!(alg.is_top(&alg.join(&p, &not_p).unwrap()));
    assert!(alg.is_empty(&alg.meet(&p, &not_p).unwrap()));
    assert_eq!(alg.is_empty(&p), p == alg.bottom());

    if alg.is_empty(&p) {
        assert!(alg.witness(&p).is_err());
        assert!(least.is_none());
    } else {
        let w = alg.witness(&p).unwrap();
        assert!(
            alg.denotes(&p, &w).unwrap(),
            "witness {w} outside its predicate"
        );
        if let Some(l) = least {
            assert!(w <= l, "sampled {l} below witness {w}");
        }
    }

    if let Algebra::Intervals(axes) = &alg {
        let boxes = alg.boxes(&p).unwrap();
        assert_eq!(alg.from_boxes(&boxes).unwrap(), p);
        let mut rev = boxes.clone();
        rev.reverse();
        assert_eq!(alg.from_boxes(&rev).unwrap(), p);
        for (i, a) in boxes.iter().enumerate() {
            for b in &boxes[i + 1..] {
                let m = alg
                    .meet(&alg.box_pred(a).unwrap(), &alg.box_pred(b).unwrap())
                    .unwrap();
                assert!(alg.is_empty(&m), "stored boxes overlap");
            }
        }
        // Splitting a box along an axis must not change the canonical form.
        if let Some(first) = boxes.first() {
            let d = rng.random_range(0..axes.len());
            let iv = first[d];
            let mid = next_above(iv.lo).unwrap();
            if iv.hi.is_none_or(|h| mid < h) {
                let mut lower = first.clone();
                let mut upper = first.clone();
                lower[d] = Interval::new(iv.lo, Some(mid)).unwrap();
                upper[d] = Interval::new(mid, iv.hi).unwrap();
                let mut split = vec![upper, lower];
                split.extend(boxes[1..].iter().cloned());
                assert_eq!(alg.from_boxes(&split).unwrap(), p);
            }
        }
    }
}

// -------------------------------------------------------------- partitions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartKind {
    Intervals,
    Product,
    Equality,
}

pub const PART_KINDS: [PartKind; 3] = [PartKind::Intervals, PartKind::Product, PartKind::Equality];

/// Asserts the output is a partition of the domain with one predicate per
/// group, each containing its group's samples.
pub fn check_partition(alg: &Algebra, groups: &[Vec<Char>], out: &[Predicate]) {
    assert_eq!(out.len(), groups.len());
    let mut all = alg.bottom();
    for (i, p) in out.iter().enumerate() {
        for q in &out[i + 1..] {
            assert!(alg.is_empty(&alg.meet(p, q).unwrap()), "predicates overlap");
        }
        all = alg.join(&all, p).unwrap();
        for c in &groups[i] {
            assert!(
                alg.denotes(p, c).unwrap(),
                "sample {c} missing from group {i}"
            );
        }
    }
    assert!(alg.is_top(&all), "predicates do not cover the domain");
}

fn random_groups(rng: &mut ChaCha8Rng, alg: &Algebra, k: usize, count: usize) -> Vec<Vec<Char>> {
    let mut seen = HashSet::new();
    let mut groups = vec![Vec::new(); k];
    for _ in 0..count {
        let c = random_char(rng, alg);
        if seen.insert(c.clone()) {
            groups[rng.random_range(0..k)].push(c);
        }
    }
    groups
}

/// Adds fresh samples to the groups whose predicate contains them.
fn grow(
    rng: &mut ChaCha8Rng,
    alg: &Algebra,
    groups: &[Vec<Char>],
    out: &[Predicate],
) -> Vec<Vec<Char>> {
    let mut grown = groups.to_vec();
    let mut seen: HashSet<Char> = groups.iter().flatten().cloned().collect();
    for _ in 0..rng.random_range(1..12) {
        let c = random_char(rng, alg);
        if !seen.insert(c.clone()) {
            continue;
        }
        let owner = out
            .iter()
            .position(|p| alg.denotes(p, &c).unwrap())
            .unwrap();
        grown[owner].push(c);
    }
    grown
}

type PartitionFn = fn(&Algebra, &[Vec<Char>]) -> smealy::Result<Vec<Predicate>>;

/// One random sample list for the given partitioning function: checks
/// validity, determinism and stability under growth inside predicates.
pub fn partition_case(kind: PartKind, seed: u64) {
    let mut rng = rng(seed);
    let (alg, run): (Algebra, PartitionFn) = match kind {
        PartKind::Intervals => (law_algebra(AlgKind::Naturals), partition_intervals),
        PartKind::Product => {
            let kinds = [
                AlgKind::Naturals,
                AlgKind::BoundedNatPair,
                AlgKind::Reals,
                AlgKind::Mixed,
            ];
            (
                law_algebra(kinds[rng.random_range(0..kinds.len())]),
                partition_product,
            )
        }
        PartKind::Equality => {
            let kinds = [AlgKind::EqualityOpen, AlgKind::EqualityCarrier];
            (
                law_algebra(kinds[rng.random_range(0..2)]),
                partition_equality,
            )
        }
    };
    let k = rng.random_range(1..6);
    let count = rng.random_range(1..16);
    let groups = random_groups(&mut rng, &alg, k, count);
    let out = run(&alg, &groups).unwrap();
    check_partition(&alg, &groups, &out);
    assert_eq!(run(&alg, &groups).unwrap(), out, "not deterministic");
    match kind {
        PartKind::Intervals => assert_eq!(partition_product(&alg, &groups).unwrap(), out),
        PartKind::Equality => assert_eq!(SweepPartitioner.partition(&alg, &groups).unwrap(), out),
        PartKind::Product => {}
    }
    let grown = grow(&mut rng, &alg, &groups, &out);
    assert_eq!(run(&alg, &grown).unwrap(), out, "not stable under growth");
}

// ------------------------------------------------------ small automata

type Block = (u64, Option<u64>, usize, usize);

/// Per-state blocks `(lo, hi, to, out)` over the naturals.
#[derive(Clone, Debug)]
pub struct Small {
    pub rows: Vec<Vec<Block>>,
}

impl Small {
    fn random(rng: &mut ChaCha8Rng, bounds: &[u64], n: usize) -> Small {
        let rows = (0..n)
            .map(|_| {
                let cuts: Vec<u64> = bounds
                    .iter()
                    .copied()
                    .filter(|_| rng.random_bool(0.6))
                    .collect();
                let mut los = vec![0];
                los.extend(cuts);
                (0..los.len())
                    .map(|i| {
                        (
                            los[i],
                            los.get(i + 1).copied(),
                            rng.random_range(0..n),
                            rng.random_range(0..2),
                        )
                    })
                    .collect()
            })
            .collect();
        Small { rows }
    }

    fn mutate(&self, rng: &mut ChaCha8Rng) -> Small {
        let mut m = self.clone();
        let q = rng.random_range(0..m.rows.len());
        let b = rng.random_range(0..m.rows[q].len());
        if rng.random_bool(0.5) {
            m.rows[q][b].3 ^= 1;
        } else {
            m.rows[q][b].2 = rng.random_range(0..m.rows.len());
        }
        m
    }

    /// Adds a copy of state `q` and redirects some edges into `q` to it.
    fn split(&self, rng: &mut ChaCha8Rng) -> Small {
        let mut m = self.clone();
        let n = m.rows.len();
        let q = rng.random_range(0..n);
        m.rows.push(m.rows[q].clone());
        for row in &mut m.rows {
            for blk in row.iter_mut() {
                if blk.2 == q && rng.random_bool(0.5) {
                    blk.2 = n;
                }
            }
        }
        m
    }

    pub fn build(&self) -> SMealy {
        let alg = Algebra::naturals();
        let mut trans = Vec::new();
        for (q, row) in self.rows.iter().enumerate() {
            for &(lo, hi, to, out) in row {
                let g = alg
                    .from_intervals(&[Interval::nat(lo, hi).unwrap()])
                    .unwrap();
                trans.push((q, g, to, format!("o{out}")));
            }
        }
        SMealy::new_valid(
            alg,
            self.rows.len(),
            0,
            vec!["o0".into(), "o1".into()],
            trans,
        )
        .unwrap()
    }
}

/// A random pair of automata with at most three states each, sharing at
/// most three boundaries. Returns the pair and the boundary characters.
pub fn small_pair(seed: u64) -> (SMealy, SMealy, Vec<Char>) {
    let mut rng = rng(seed);
    let mut bounds: Vec<u64> = (1..=12).collect();
    let nb = rng.random_range(0..=3);
    let mut picked = Vec::new();
    for _ in 0..nb {
        picked.push(bounds.swap_remove(rng.random_range(0..bounds.len())));
    }
    picked.sort_unstable();
    let na = rng.random_range(1..=3);
    let a = Small::random(&mut rng, &picked, na);
    let nb = rng.random_range(1..=3);
    let b = match rng.random_range(0..3) {
        0 => Small::random(&mut rng, &picked, nb),
        1 => a.mutate(&mut rng),
        _ if a.rows.len() < 3 => a.split(&mut rng),
        _ => a.clone(),
    };
    let chars = std::iter::once(0).chain(picked).map(Char::nat).collect();
    (a.build(), b.build(), chars)
}

/// Exhaustive search for a word of length `1..=max_len` over `chars` on
/// which the two automata produce different final outputs.
pub fn brute_force_mismatch(
    a: &SMealy,
    b: &SMealy,
    chars: &[Char],
    max_len: usize,
) -> Option<Word> {
    let table = |m: &SMealy| -> Vec<Vec<(usize, String)>> {
        (0..m.states())
            .map(|q| {
                chars
                    .iter()
                    .map(|c| {
                        let (to, out) = m.step(q, c).unwrap();
                        (to, m.outputs()[out].clone())
                    })
                    .collect()
            })
            .collect()
    };
    let (ta, tb) = (table(a), table(b));
    fn dfs(
        ta: &[Vec<(usize, String)>],
        tb: &[Vec<(usize, String)>],
        qa: usize,
        qb: usize,
        left: usize,
        path: &mut Vec<usize>,
    ) -> bool {
        if left == 0 {
            return false;
        }
        for i in 0..ta[qa].len() {
            path.push(i);
            let ((na, oa), (nb, ob)) = (&ta[qa][i], &tb[qb][i]);
            if oa != ob || dfs(ta, tb, *na, *nb, left - 1, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    dfs(&ta, &tb, a.initial(), b.initial(), max_len, &mut path)
        .then(|| path.into_iter().map(|i| chars[i].clone()).collect())
}

/// Compares `symbolic_equiv` with exhaustive search on one random pair.
/// Returns whether the pair was inequivalent.
pub fn equiv_case(seed: u64) -> bool {
    let (a, b, chars) = small_pair(seed);
    let brute = brute_force_mismatch(&a, &b, &chars, 10);
    match a.symbolic_equiv(&b).unwrap() {
        Equivalence::Equal => {
            assert!(
                brute.is_none(),
                "symbolic says equal, brute force found {brute:?}"
            );
            assert_eq!(b.symbolic_equiv(&a).unwrap(), Equivalence::Equal);
            false
        }
        Equivalence::Mismatch(w) => {
            assert!(
                brute.is_some(),
                "symbolic mismatch {w:?} but brute force found none"
            );
            assert!(!w.is_empty());
            assert_ne!(
                a.run(&w).unwrap(),
                b.run(&w).unwrap(),
                "witness does not distinguish"
            );
            true
        }
    }
}

// ------------------------------------------------------------ monitoring

/// Records violations of the per-round learning invariants.
pub struct Audit {
    pub essential: BTreeSet<Char>,
    pub counterexamples: Vec<Word>,
    pub hypotheses: usize,
    pub violations: Vec<String>,
}

impl Audit {
    pub fn new(essential: &[Char]) -> Self {
        Audit {
            essential: essential.iter().cloned().collect(),
            counterexamples: Vec::new(),
            hypotheses: 0,
            violations: Vec::new(),
        }
    }
}

impl Monitor for Audit {
    fn on_table(&mut self, event: &TableEvent<'_>, t: &ObservationTable) {
        if let Some(a) = t.sigma().iter().find(|a| !self.essential.contains(*a)) {
            self.violations.push(format!("Σ_E holds non-essential {a}"));
        }
        if let TableEvent::Counterexample(w) = event {
            if w.is_empty() || w.iter().any(|a| !self.essential.contains(a)) {
                self.violations
                    .push(format!("counterexample {w:?} leaves the essential set"));
            }
            self.counterexamples.push(w.to_vec());
        }
    }

    fn on_hypothesis(&mut self, h: &Hypothesis<'_>) {
        self.hypotheses += 1;
        let t = h.table;
        for w in t.rows() {
            for col in t.columns() {
                let full: Word = w.iter().chain(&col).cloned().collect();
                let want = t.cell(w, &col).unwrap();
                let got = h.machine.run(&full).unwrap();
                if got != want {
                    self.violations.push(format!(
                        "hypothesis {} gives {got}, table {want} on {full:?}",
                        self.hypotheses
                    ));
                }
            }
        }
    }
}
