//! Simulated teachers over a hidden target automaton.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{word_to_string, Algebra, Char, EqSet, Predicate, Word};
use crate::automata::{ConcreteMealy, Equivalence, SMealy};
use crate::error::{Error, Result};
use crate::partition::{Partitioner, SweepPartitioner};

/// What the learner may ask.
pub trait Teacher {
    /// Output of the target on a non-empty word.
    fn output(&mut self, w: &[Char]) -> Result<String>;
    /// `None` when the hypothesis is equivalent, otherwise a counterexample.
    fn equivalence(&mut self, hyp: &SMealy) -> Result<Option<Word>>;
    /// Number of distinct words asked so far.
    fn output_queries(&self) -> usize;
}

/// Caching output oracle.
#[derive(Clone, Debug)]
pub struct OutputOracle {
    target: SMealy,
    cache: HashMap<Word, usize>,
    total: usize,
}

impl OutputOracle {
    pub fn new(target: SMealy) -> Self {
        OutputOracle {
            target,
            cache: HashMap::new(),
            total: 0,
        }
    }

    pub fn target(&self) -> &SMealy {
        &self.target
    }

    pub fn query(&mut self, w: &[Char]) -> Result<String> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        self.total += 1;
        let o = match self.cache.get(w) {
            Some(&o) => o,
            None => {
                let o = self.target.run_index(w)?;
                self.cache.insert(w.to_vec(), o);
                o
            }
        };
        Ok(self.target.outputs()[o].clone())
    }

    pub fn distinct(&self) -> usize {
        self.cache.len()
    }

    /// Queries including repeats answered from the cache.
    pub fn total(&self) -> usize {
        self.total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivMode {
    Lexmin,
    Random(u64),
}

/// Exact equivalence oracle whose counterexamples use only `essential`.
#[derive(Clone, Debug)]
pub struct EquivOracle {
    target: SMealy,
    concrete: ConcreteMealy,
    mode: EquivMode,
    rng: ChaCha8Rng,
    queries: usize,
}

impl EquivOracle {
    pub fn new(target: SMealy, essential: &[Char], mode: EquivMode) -> Result<Self> {
        let concrete = target.restrict(essential)?;
        let seed = match mode {
            EquivMode::Random(s) => s,
            EquivMode::Lexmin => 0,
        };
        Ok(EquivOracle {
            target,
            concrete,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            queries: 0,
        })
    }

    /// Uses [`essential_characters`] of the target.
    pub fn for_target(target: SMealy, mode: EquivMode) -> Result<Self> {
        let sigma = essential_characters(&target)?;
        Self::new(target, &sigma, mode)
    }

    pub fn essential(&self) -> &[Char] {
        &self.concrete.alphabet
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn query(&mut self, hyp: &SMealy) -> Result<Option<Word>> {
        self.queries += 1;
        if hyp.symbolic_equiv(&self.target)? == Equivalence::Equal {
            return Ok(None);
        }
        let h = hyp.restrict(&self.concrete.alphabet)?;
        let depth = hyp.states() * self.target.states();
        let found = match self.mode {
            EquivMode::Lexmin => lexmin_mismatch(&h, &self.concrete, depth),
            EquivMode::Random(_) => random_mismatch(&h, &self.concrete, depth, &mut self.rng),
        };
        found.map(Some).ok_or_else(|| {
            Error::OracleAssumptionViolation(format!(
                "hypothesis differs from the target but agrees on every word over the {} essential characters",
                self.concrete.alphabet.len()
            ))
        })
    }
}

fn out_eq(a: &ConcreteMealy, oa: usize, b: &ConcreteMealy, ob: usize) -> bool {
    a.outputs[oa] == b.outputs[ob]
}

/// Shortlex-least word on which two machines over the same alphabet disagree.
fn lexmin_mismatch(a: &ConcreteMealy, b: &ConcreteMealy, depth: usize) -> Option<Word> {
    type Node = ((usize, usize), usize, Option<(usize, usize)>);
    let mut nodes: Vec<Node> = vec![((a.initial, b.initial), 0, None)];
    let mut seen: HashMap<(usize, usize), ()> = HashMap::from([((a.initial, b.initial), ())]);
    let mut head = 0;
    while head < nodes.len() {
        let ((p, q), d, _) = nodes[head];
        if d >= depth {
            break;
        }
        for i in 0..a.alphabet.len() {
            let (pa, oa) = a.delta[p][i];
            let (qb, ob) = b.delta[q][i];
            if !out_eq(a, oa, b, ob) {
                let mut w = vec![a.alphabet[i].clone()];
                let mut at = head;
                while let Some((parent, ch)) = nodes[at].2 {
                    w.push(a.alphabet[ch].clone());
                    at = parent;
                }
                w.reverse();
                return Some(w);
            }
            if seen.insert((pa, qb), ()).is_none() {
                nodes.push(((pa, qb), d + 1, Some((head, i))));
            }
        }
        head += 1;
    }
    None
}

/// Uniformly random word among the shortest disagreeing ones.
fn random_mismatch(
    a: &ConcreteMealy,
    b: &ConcreteMealy,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Word> {
    let len = lexmin_mismatch(a, b, depth)?.len();
    let k = a.alphabet.len();
    let (na, nb) = (a.states, b.states);
    let idx = |p: usize, q: usize| p * nb + q;
    // layers[j][pair]: relative number of length-(j+1) suffixes from `pair`
    // that end in a disagreement; each layer is rescaled by its maximum.
    let mut layers: Vec<Vec<f64>> = Vec::with_capacity(len);
    let mut first = vec![0.0; na * nb];
    for p in 0..na {
        for q in 0..nb {
            first[idx(p, q)] = (0..k)
                .filter(|&i| !out_eq(a, a.delta[p][i].1, b, b.delta[q][i].1))
                .count() as f64;
        }
    }
    layers.push(first);
    for j in 1..len {
        let prev = &layers[j - 1];
        let mut cur = vec![0.0; na * nb];
        for p in 0..na {
            for q in 0..nb {
                cur[idx(p, q)] = (0..k)
                    .map(|i| prev[idx(a.delta[p][i].0, b.delta[q][i].0)])
                    .sum();
            }
        }
        let max = cur.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            cur.iter_mut().for_each(|x| *x /= max);
        }
        layers.push(cur);
    }
    let mut w = Vec::with_capacity(len);
    let (mut p, mut q) = (a.initial, b.initial);
    for step in 0..len {
        let remaining = len - step;
        let weights: Vec<f64> = (0..k)
            .map(|i| {
                if remaining == 1 {
                    if out_eq(a, a.delta[p][i].1, b, b.delta[q][i].1) {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    layers[remaining - 2][idx(a.delta[p][i].0, b.delta[q][i].0)]
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let mut x = rng.random_range(0.0..total);
        let mut pick = weights
            .iter()
            .rposition(|&wt| wt > 0.0)
            .expect("positive total");
        for (i, &wt) in weights.iter().enumerate() {
            if x < wt {
                pick = i;
                break;
            }
            x -= wt;
        }
        w.push(a.alphabet[pick].clone());
        (p, q) = (a.delta[p][pick].0, b.delta[q][pick].0);
    }
    Some(w)
}

/// Output oracle plus equivalence oracle over the same target.
#[derive(Clone, Debug)]
pub struct SimulatedTeacher {
    pub out: OutputOracle,
    pub eq: EquivOracle,
}

impl SimulatedTeacher {
    pub fn new(target: SMealy, mode: EquivMode) -> Result<Self> {
        Ok(SimulatedTeacher {
            out: OutputOracle::new(target.clone()),
            eq: EquivOracle::for_target(target, mode)?,
        })
    }
}

impl Teacher for SimulatedTeacher {
    fn output(&mut self, w: &[Char]) -> Result<String> {
        self.out.query(w)
    }

    fn equivalence(&mut self, hyp: &SMealy) -> Result<Option<Word>> {
        self.eq.query(hyp)
    }

    fn output_queries(&self) -> usize {
        self.out.distinct()
    }
}

/// Replays a fixed list of counterexamples, then answers "equivalent".
#[derive(Clone, Debug)]
pub struct ScriptedOracle {
    out: OutputOracle,
    script: VecDeque<Word>,
}

impl ScriptedOracle {
    pub fn new(target: SMealy, script: Vec<Word>) -> Self {
        ScriptedOracle {
            out: OutputOracle::new(target),
            script: script.into(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl Teacher for ScriptedOracle {
    fn output(&mut self, w: &[Char]) -> Result<String> {
        self.out.query(w)
    }

    fn equivalence(&mut self, hyp: &SMealy) -> Result<Option<Word>> {
        let target = self.out.target();
        match self.script.pop_front() {
            Some(cex) => {
                if cex.is_empty() || hyp.run(&cex)? == target.run(&cex)? {
                    return Err(Error::Script(format!(
                        "{} does not distinguish the hypothesis from the target",
                        word_to_string(&cex)
                    )));
                }
                Ok(Some(cex))
            }
            None => match hyp.symbolic_equiv(target)? {
                Equivalence::Equal => Ok(None),
                Equivalence::Mismatch(w) => Err(Error::Script(format!(
                    "script exhausted but the hypothesis still differs on {}",
                    word_to_string(&w)
                ))),
            },
        }
    }

    fn output_queries(&self) -> usize {
        self.out.distinct()
    }
}

/// `(to, out)` of a transition.
type Key = (usize, usize);

/// Groups `sigma` by the `(to, out)` of the transition taking each
/// character from `q`, ordered by target state then output index.
pub(crate) fn groups_at(
    m: &SMealy,
    q: usize,
    sigma: &[Char],
) -> Result<(Vec<Key>, Vec<Vec<Char>>)> {
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let mut groups: Vec<Vec<Char>> = Vec::new();
    let mut by_key: Vec<((usize, usize), Char)> = Vec::with_capacity(sigma.len());
    for c in sigma {
        by_key.push((m.step(q, c)?, c.clone()));
    }
    by_key.sort_by_key(|a| a.0);
    for (key, c) in by_key {
        if keys.last() != Some(&key) {
            keys.push(key);
            groups.push(Vec::new());
        }
        groups.last_mut().expect("just pushed").push(c);
    }
    Ok((keys, groups))
}

fn same_set(alg: &Algebra, a: &Predicate, b: &Predicate) -> Result<bool> {
    Ok(alg.is_empty(&alg.minus(a, b)?) && alg.is_empty(&alg.minus(b, a)?))
}

/// True when partitioning `sigma` at every state reproduces the guards.
fn reconstructs(m: &SMealy, sigma: &[Char]) -> Result<bool> {
    let alg = m.algebra();
    for q in 0..m.states() {
        let (keys, groups) = groups_at(m, q, sigma)?;
        if keys.len() != m.outgoing(q).count() {
            return Ok(false);
        }
        let preds = SweepPartitioner.partition(alg, &groups)?;
        for ((to, out), p) in keys.iter().zip(&preds) {
            let t = m
                .outgoing(q)
                .find(|t| t.to == *to && t.out == *out)
                .expect("key comes from a transition");
            if !same_set(alg, p, &t.guard)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn grid_of_state(m: &SMealy, q: usize) -> Result<Vec<Char>> {
    let alg = m.algebra();
    let axes = alg.axes().expect("interval algebra");
    let mut coords: Vec<Vec<_>> = axes.iter().map(|a| vec![a.min]).collect();
    for t in m.outgoing(q) {
        for b in alg.boxes(&t.guard)? {
            for (i, iv) in b.iter().enumerate() {
                coords[i].push(iv.lo);
            }
        }
    }
    for c in &mut coords {
        c.sort();
        c.dedup();
    }
    let mut out = vec![Vec::new()];
    for c in &coords {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<_>| {
                c.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(Char::new).collect())
}

/// Finite character set from which the sweep partitioner rebuilds every
/// state's guards: lower corners of all guard boxes plus the domain minimum,
/// widened to a state's coordinate grid where corners do not suffice.
pub fn essential_characters(m: &SMealy) -> Result<Vec<Char>> {
    let alg = m.algebra();
    let mut sigma = m.guard_corners()?;
    sigma.push(alg.min_char());
    match alg {
        Algebra::Intervals(_) => {
            sigma.sort();
            sigma.dedup();
            if reconstructs(m, &sigma)? {
                return Ok(sigma);
            }
            for q in 0..m.states() {
                sigma.extend(grid_of_state(m, q)?);
            }
            sigma.sort();
            sigma.dedup();
            if reconstructs(m, &sigma)? {
                return Ok(sigma);
            }
            Err(Error::Unsupported(
                "guards cannot be rebuilt from their corners".into(),
            ))
        }
        Algebra::Equality { carrier } => {
            let mut mentioned = std::collections::BTreeSet::new();
            for t in m.transitions() {
                if let Predicate::Eq(EqSet::Finite(xs) | EqSet::Cofinite(xs)) = &t.guard {
                    mentioned.extend(xs.iter().copied());
                }
            }
            if carrier.is_none() {
                let fresh = mentioned.last().map_or(0, |&m| m + 1);
                mentioned.insert(fresh);
            }
            let mut sigma: Vec<Char> = mentioned.into_iter().map(Char::sym).collect();
            sigma.push(alg.min_char());
            sigma.sort();
            sigma.dedup();
            if reconstructs(m, &sigma)? {
                return Ok(sigma);
            }
            if let Some(c) = carrier {
                let all: Vec<Char> = c.iter().map(|&x| Char::sym(x)).collect();
                if reconstructs(m, &all)? {
                    return Ok(all);
                }
            }
            Err(Error::Unsupported(
                "equality guards cannot be rebuilt from finitely many symbols".into(),
            ))
        }
    }
}
