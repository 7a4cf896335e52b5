//! The learning loop: repair the table to cohesion, read off the evidence
//! automaton, generalise it with a partitioning function and ask for
//! equivalence until the teacher accepts.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::algebra::{word_to_string, Algebra, Char, Word};
use crate::automata::{ConcreteMealy, SMealy};
use crate::error::{Error, Result};
use crate::obstable::{Defect, ObservationTable, RepairOrder};
use crate::oracle::Teacher;
use crate::partition::Partitioner;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LearnStats {
    pub eq_queries: usize,
    /// Distinct words asked.
    pub output_queries: usize,
    pub sigma_e: usize,
    pub s_size: usize,
    pub r_size: usize,
    pub e_size: usize,
    pub max_cex_len: usize,
    /// Hypotheses built.
    pub rounds: usize,
    pub repairs: usize,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct LearnConfig {
    /// First character; the domain minimum when `None`.
    pub init: Option<Char>,
    pub order: RepairOrder,
    /// Round cap; `None` means `10 · (|S| + |Σ_E| + 1000)`, re-evaluated each round.
    pub max_rounds: Option<usize>,
    /// Re-check every hypothesis against every table cell.
    pub check_compatibility: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            init: None,
            order: RepairOrder::default(),
            max_rounds: None,
            check_compatibility: true,
        }
    }
}

/// Evidence automaton of a cohesive table. State `i` is the row of `access[i]`.
#[derive(Clone, Debug)]
pub struct Evidence {
    pub machine: ConcreteMealy,
    pub access: Vec<Word>,
}

/// A posed hypothesis with the table it was built from.
pub struct Hypothesis<'a> {
    pub machine: &'a SMealy,
    pub evidence: &'a Evidence,
    pub table: &'a ObservationTable,
}

pub enum TableEvent<'a> {
    Initial,
    Repaired(&'a Defect),
    Counterexample(&'a [Char]),
}

/// Observer of a learning run. All methods default to no-ops.
pub trait Monitor {
    fn on_table(&mut self, _event: &TableEvent<'_>, _table: &ObservationTable) {}
    fn on_hypothesis(&mut self, _h: &Hypothesis<'_>) {}
}

pub struct NoMonitor;

impl Monitor for NoMonitor {}

/// Text log of defects, table sizes and counterexamples.
#[derive(Default)]
pub struct TraceLog {
    pub lines: Vec<String>,
    /// Also append a dump of the table after each event.
    pub tables: bool,
}

impl Monitor for TraceLog {
    fn on_table(&mut self, event: &TableEvent<'_>, t: &ObservationTable) {
        let what = match event {
            TableEvent::Initial => "initial table".to_string(),
            TableEvent::Repaired(d) => format!("repaired {d}"),
            TableEvent::Counterexample(w) => format!("counterexample {}", word_to_string(w)),
        };
        self.lines.push(format!(
            "{what}: |S|={} |R|={} |Σ_E|={} |E|={}",
            t.s_len(),
            t.r_len(),
            t.sigma().len(),
            t.e().len()
        ));
        if self.tables {
            self.lines.push(t.to_string());
        }
    }

    fn on_hypothesis(&mut self, h: &Hypothesis<'_>) {
        self.lines.push(format!(
            "hypothesis: {} states, {} transitions",
            h.machine.states(),
            h.machine.transitions().len()
        ));
    }
}

pub fn build_evidence(t: &ObservationTable) -> Result<Evidence> {
    let d = t.check(RepairOrder::default());
    if d != Defect::Cohesive {
        return Err(Error::Precondition(format!(
            "evidence needs a cohesive table, found {d}"
        )));
    }
    let mut state_of: HashMap<&[u32], usize> = HashMap::new();
    let mut access: Vec<Word> = Vec::new();
    for s in t.s_words() {
        let key = t.row_key(s).expect("row exists");
        if !state_of.contains_key(key) {
            state_of.insert(key, access.len());
            access.push(s.clone());
        }
    }
    let mut alphabet = t.sigma().to_vec();
    alphabet.sort();
    let mut delta = Vec::with_capacity(access.len());
    for s in &access {
        let mut row = Vec::with_capacity(alphabet.len());
        for a in &alphabet {
            let mut sa = s.clone();
            sa.push(a.clone());
            let to = state_of[t.row_key(&sa).expect("evidence-closed")];
            let out = t
                .cell_index(s, std::slice::from_ref(a))
                .expect("Σ_E column") as usize;
            row.push((to, out));
        }
        delta.push(row);
    }
    let machine = ConcreteMealy {
        alphabet,
        states: access.len(),
        initial: 0,
        outputs: t.gamma().to_vec(),
        delta,
    };
    Ok(Evidence { machine, access })
}

/// Generalises an evidence automaton: at each state the characters are
/// grouped by `(target, output)`, ordered by target then output index, and
/// handed to the partitioning function.
pub fn sep_pred(me: &ConcreteMealy, alg: &Algebra, p: &dyn Partitioner) -> Result<SMealy> {
    let mut transitions = Vec::new();
    for q in 0..me.states {
        let mut keyed: Vec<((usize, usize), &Char)> =
            me.delta[q].iter().copied().zip(&me.alphabet).collect();
        keyed.sort_by_key(|(k, _)| *k);
        let mut keys: Vec<(usize, usize)> = Vec::new();
        let mut groups: Vec<Vec<Char>> = Vec::new();
        for (k, c) in keyed {
            if keys.last() != Some(&k) {
                keys.push(k);
                groups.push(Vec::new());
            }
            groups.last_mut().expect("just pushed").push(c.clone());
        }
        let preds = p.partition(alg, &groups)?;
        for ((to, out), g) in keys.into_iter().zip(preds) {
            transitions.push((q, g, to, me.outputs[out].clone()));
        }
    }
    SMealy::new_valid(
        alg.clone(),
        me.states,
        me.initial,
        me.outputs.clone(),
        transitions,
    )
}

fn check_compatible(hyp: &SMealy, t: &ObservationTable) -> Result<()> {
    let conc = hyp.restrict(t.sigma())?;
    let cols = t.columns();
    for w in t.rows() {
        let mut q = 0;
        for a in w {
            let i = conc
                .index_of(a)
                .ok_or_else(|| Error::Precondition(format!("{a} outside Σ_E")))?;
            q = conc.delta[q][i].0;
        }
        for c in &cols {
            let mut p = q;
            let mut o = 0;
            for a in c {
                let i = conc
                    .index_of(a)
                    .ok_or_else(|| Error::Precondition(format!("{a} outside Σ_E")))?;
                (p, o) = conc.delta[p][i];
            }
            if conc.outputs[o] != t.cell(w, c).expect("filled") {
                return Err(Error::Precondition(format!(
                    "hypothesis disagrees with the table at ({}, {})",
                    word_to_string(w),
                    word_to_string(c)
                )));
            }
        }
    }
    Ok(())
}

/// Learns the teacher's target. Returns the accepted hypothesis.
pub fn learn(
    teacher: &mut dyn Teacher,
    alg: &Algebra,
    partitioner: &dyn Partitioner,
    cfg: &LearnConfig,
    monitor: &mut dyn Monitor,
) -> Result<(SMealy, LearnStats)> {
    let start = Instant::now();
    let a0 = cfg.init.clone().unwrap_or_else(|| alg.min_char());
    alg.check_char(&a0)?;
    let mut stats = LearnStats::default();
    let mut table = ObservationTable::new(a0, teacher)?;
    monitor.on_table(&TableEvent::Initial, &table);
    loop {
        loop {
            let d = table.check(cfg.order);
            if d == Defect::Cohesive {
                break;
            }
            table.repair(&d, teacher)?;
            stats.repairs += 1;
            monitor.on_table(&TableEvent::Repaired(&d), &table);
        }
        let evidence = build_evidence(&table)?;
        let hyp = sep_pred(&evidence.machine, alg, partitioner)?;
        if cfg.check_compatibility {
            check_compatible(&hyp, &table)?;
        }
        stats.rounds += 1;
        monitor.on_hypothesis(&Hypothesis {
            machine: &hyp,
            evidence: &evidence,
            table: &table,
        });
        let cap = cfg
            .max_rounds
            .unwrap_or(10 * (table.s_len() + table.sigma().len() + 1000));
        if stats.rounds > cap {
            return Err(Error::CapExceeded(format!("no answer after {cap} rounds")));
        }
        stats.eq_queries += 1;
        match teacher.equivalence(&hyp)? {
            None => {
                stats.output_queries = teacher.output_queries();
                stats.sigma_e = table.sigma().len();
                stats.s_size = table.s_len();
                stats.r_size = table.r_len();
                stats.e_size = table.e().len();
                stats.wall_time = start.elapsed();
                return Ok((hyp, stats));
            }
            Some(cex) => {
                for a in &cex {
                    alg.check_char(a)?;
                }
                stats.max_cex_len = stats.max_cex_len.max(cex.len());
                if table.add_counterexample(&cex, teacher)? == 0 {
                    return Err(Error::OracleAssumptionViolation(format!(
                        "counterexample {} is already in the table",
                        word_to_string(&cex)
                    )));
                }
                monitor.on_table(&TableEvent::Counterexample(&cex), &table);
            }
        }
    }
}
