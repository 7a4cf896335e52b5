//! Symbolic and concrete Mealy automata.

mod io;

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{Algebra, Char, Predicate, Word};
use crate::error::{Error, Result};

pub use io::{from_json, to_dot, to_json, word_from_json};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub guard: Predicate,
    pub to: usize,
    /// Index into [`SMealy::outputs`].
    pub out: usize,
}

/// A symbolic Mealy automaton. The initial state is always state 0.
///
/// Construction merges transitions sharing `(from, to, out)`, drops ⊥
/// guards and renumbers the initial state to 0, but does not check
/// determinism or completeness; see [`SMealy::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMealy {
    algebra: Algebra,
    states: usize,
    outputs: Vec<String>,
    transitions: Vec<Transition>,
    by_state: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Nondeterministic {
        state: usize,
        first: usize,
        second: usize,
        overlap: Predicate,
    },
    Incomplete {
        state: usize,
        uncovered: Predicate,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    Mismatch(Word),
}

impl SMealy {
    /// Builds an automaton from `(from, guard, to, output)` tuples. Output
    /// symbols not listed in `outputs` are appended in order of appearance.
    pub fn new(
        algebra: Algebra,
        states: usize,
        initial: usize,
        outputs: Vec<String>,
        transitions: Vec<(usize, Predicate, usize, String)>,
    ) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidAutomaton(
                "an automaton needs at least one state".into(),
            ));
        }
        if initial >= states {
            return Err(Error::InvalidAutomaton(format!(
                "initial state {initial} out of range"
            )));
        }
        let mut outputs = outputs;
        let mut out_index: HashMap<String, usize> = HashMap::new();
        for (i, o) in outputs.iter().enumerate() {
            if out_index.insert(o.clone(), i).is_some() {
                return Err(Error::InvalidAutomaton(format!(
                    "output {o} declared twice"
                )));
            }
        }
        let renumber = |q: usize| {
            if q == initial {
                0
            } else if q == 0 {
                initial
            } else {
                q
            }
        };
        let mut merged: Vec<Transition> = Vec::new();
        let mut slot: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for (from, guard, to, out) in transitions {
            if from >= states || to >= states {
                return Err(Error::InvalidAutomaton(format!(
                    "transition {from} -> {to} out of range"
                )));
            }
            let o = *out_index.entry(out.clone()).or_insert_with(|| {
                outputs.push(out);
                outputs.len() - 1
            });
            let (from, to) = (renumber(from), renumber(to));
            match slot.get(&(from, to, o)) {
                Some(&i) => merged[i].guard = algebra.join(&merged[i].guard, &guard)?,
                None => {
                    algebra.check_pred(&guard)?;
                    slot.insert((from, to, o), merged.len());
                    merged.push(Transition {
                        from,
                        guard,
                        to,
                        out: o,
                    });
                }
            }
        }
        merged.retain(|t| !algebra.is_empty(&t.guard));
        let mut keyed: Vec<(usize, Char, usize, usize, Transition)> = merged
            .into_iter()
            .map(|t| {
                (
                    t.from,
                    algebra.witness(&t.guard).expect("non-empty guard"),
                    t.to,
                    t.out,
                    t,
                )
            })
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1, a.2, a.3).cmp(&(b.0, &b.1, b.2, b.3)));
        let transitions: Vec<Transition> = keyed.into_iter().map(|k| k.4).collect();
        let mut by_state = vec![Vec::new(); states];
        for (i, t) in transitions.iter().enumerate() {
            by_state[t.from].push(i);
        }
        Ok(SMealy {
            algebra,
            states,
            outputs,
            transitions,
            by_state,
        })
    }

    /// [`SMealy::new`] followed by a determinism and completeness check.
    pub fn new_valid(
        algebra: Algebra,
        states: usize,
        initial: usize,
        outputs: Vec<String>,
        transitions: Vec<(usize, Predicate, usize, String)>,
    ) -> Result<Self> {
        let m = SMealy::new(algebra, states, initial, outputs, transitions)?;
        m.ensure_valid()?;
        Ok(m)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidAutomaton(self.describe_violation(v))),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = &Transition> {
        self.by_state[q].iter().map(|&i| &self.transitions[i])
    }

    pub fn validate(&self) -> Vec<Violation> {
        let alg = &self.algebra;
        let mut out = Vec::new();
        for q in 0..self.states {
            let ts = &self.by_state[q];
            let mut covered = alg.bottom();
            for (a, &i) in ts.iter().enumerate() {
                let ti = &self.transitions[i];
                for &j in &ts[a + 1..] {
                    let tj = &self.transitions[j];
                    if (ti.to, ti.out) == (tj.to, tj.out) {
                        continue;
                    }
                    let overlap = alg.meet(&ti.guard, &tj.guard).expect("same algebra");
                    if !alg.is_empty(&overlap) {
                        out.push(Violation::Nondeterministic {
                            state: q,
                            first: i,
                            second: j,
                            overlap,
                        });
                    }
                }
                covered = alg.join(&covered, &ti.guard).expect("same algebra");
            }
            let uncovered = alg.complement(&covered).expect("same algebra");
            if !alg.is_empty(&uncovered) {
                out.push(Violation::Incomplete {
                    state: q,
                    uncovered,
                });
            }
        }
        out
    }

    pub fn describe_violation(&self, v: &Violation) -> String {
        match v {
            Violation::Nondeterministic {
                state,
                first,
                second,
                overlap,
            } => format!(
                "state {state}: guards {} and {} overlap on {}",
                self.algebra.display(&self.transitions[*first].guard),
                self.algebra.display(&self.transitions[*second].guard),
                self.algebra.display(overlap)
            ),
            Violation::Incomplete { state, uncovered } => {
                format!(
                    "state {state}: {} is not covered",
                    self.algebra.display(uncovered)
                )
            }
        }
    }

    /// The transition taken from `q` on `a`, as `(target, output index)`.
    pub fn step(&self, q: usize, a: &Char) -> Result<(usize, usize)> {
        for t in self.outgoing(q) {
            if self.algebra.denotes(&t.guard, a)? {
                return Ok((t.to, t.out));
            }
        }
        Err(Error::InvalidAutomaton(format!(
            "state {q} has no transition on {a}"
        )))
    }

    /// State reached after reading `w` (which may be empty).
    pub fn state_after(&self, w: &[Char]) -> Result<usize> {
        w.iter().try_fold(0, |q, a| self.step(q, a).map(|(p, _)| p))
    }

    /// Output index of the last step on `w`.
    pub fn run_index(&self, w: &[Char]) -> Result<usize> {
        let (last, prefix) = w.split_last().ok_or(Error::EmptyWord)?;
        let q = self.state_after(prefix)?;
        self.step(q, last).map(|(_, o)| o)
    }

    pub fn run(&self, w: &[Char]) -> Result<&str> {
        self.run_index(w).map(|o| self.outputs[o].as_str())
    }

    /// Concrete machine over the finite alphabet `sigma`, sorted ascending.
    pub fn restrict(&self, sigma: &[Char]) -> Result<ConcreteMealy> {
        let mut alphabet = sigma.to_vec();
        alphabet.sort();
        alphabet.dedup();
        if alphabet.is_empty() {
            return Err(Error::InvalidAutomaton(
                "restriction to an empty alphabet".into(),
            ));
        }
        let delta = (0..self.states)
            .map(|q| {
                alphabet
                    .iter()
                    .map(|a| self.step(q, a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcreteMealy {
            alphabet,
            states: self.states,
            initial: 0,
            outputs: self.outputs.clone(),
            delta,
        })
    }

    /// Language equivalence by breadth-first search over the product.
    pub fn symbolic_equiv(&self, other: &SMealy) -> Result<Equivalence> {
        if self.algebra != other.algebra {
            return Err(Error::KindMismatch(
                "automata over different algebras".into(),
            ));
        }
        let alg = &self.algebra;
        let same_out: Vec<Vec<bool>> = self
            .outputs
            .iter()
            .map(|a| other.outputs.iter().map(|b| a == b).collect())
            .collect();
        type Node = ((usize, usize), Option<(usize, Char)>);
        let mut nodes: Vec<Node> = vec![((0, 0), None)];
        let mut seen: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
        let mut head = 0;
        while head < nodes.len() {
            let (p, q) = nodes[head].0;
            for t in self.outgoing(p) {
                for u in other.outgoing(q) {
                    let m = alg.meet(&t.guard, &u.guard)?;
                    if alg.is_empty(&m) {
                        continue;
                    }
                    let c = alg.witness(&m)?;
                    if !same_out[t.out][u.out] {
                        let mut w = vec![c];
                        let mut at = head;
                        while let Some((parent, ch)) = &nodes[at].1 {
                            w.push(ch.clone());
                            at = *parent;
                        }
                        w.reverse();
                        return Ok(Equivalence::Mismatch(w));
                    }
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry((t.to, u.to)) {
                        e.insert(nodes.len());
                        nodes.push(((t.to, u.to), Some((head, c))));
                    }
                }
            }
            head += 1;
        }
        Ok(Equivalence::Equal)
    }

    /// Guard lower corners of every transition.
    pub fn guard_corners(&self) -> Result<Vec<Char>> {
        let mut out = Vec::new();
        for t in &self.transitions {
            match self.algebra.axes() {
                Some(_) => {
                    for b in self.algebra.boxes(&t.guard)? {
                        out.push(Char::new(b.iter().map(|iv| iv.lo)));
                    }
                }
                None => out.push(self.algebra.witness(&t.guard)?),
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for SMealy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.transitions {
            writeln!(
                f,
                "q{} -{} | {}-> q{}",
                t.from,
                self.algebra.display(&t.guard),
                self.outputs[t.out],
                t.to
            )?;
        }
        Ok(())
    }
}

/// A Mealy machine over a finite alphabet; `delta[q][i]` is the
/// `(target, output index)` pair for `alphabet[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteMealy {
    pub alphabet: Vec<Char>,
    pub states: usize,
    pub initial: usize,
    pub outputs: Vec<String>,
    pub delta: Vec<Vec<(usize, usize)>>,
}

impl ConcreteMealy {
    pub fn index_of(&self, a: &Char) -> Option<usize> {
        self.alphabet.binary_search(a).ok()
    }

    pub fn run(&self, w: &[Char]) -> Result<&str> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let mut q = self.initial;
        let mut o = 0;
        for a in w {
            let i = self
                .index_of(a)
                .ok_or_else(|| Error::InvalidChar(format!("{a} is outside the alphabet")))?;
            (q, o) = self.delta[q][i];
        }
        Ok(&self.outputs[o])
    }
}
