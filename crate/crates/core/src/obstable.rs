//! Observation table `(S, R, Σ_E, E, f)` with its cohesiveness checks and
//! repairs.
//!
//! Rows are kept in insertion order, S in the order rows were promoted.
//! Columns are the characters of Σ_E followed by the words of E, each in
//! insertion order. Cells hold interned output symbols.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::algebra::{shortlex, word_to_string, Char, Word};
use crate::error::{Error, Result};
use crate::oracle::Teacher;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    NotClosed(Word),
    NotConsistent {
        w1: Word,
        w2: Word,
        a: Char,
        e: Word,
    },
    NotEvidenceClosed {
        s: Word,
        e: Char,
    },
    NotOutputClosed {
        w: Word,
        a: Char,
    },
    Cohesive,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws = word_to_string;
        match self {
            Defect::NotClosed(r) => write!(f, "NotClosed({})", ws(r)),
            Defect::NotConsistent { w1, w2, a, e } => {
                write!(f, "NotConsistent({}, {}, {a}, {})", ws(w1), ws(w2), ws(e))
            }
            Defect::NotEvidenceClosed { s, e } => write!(f, "NotEvidenceClosed({}, {e})", ws(s)),
            Defect::NotOutputClosed { w, a } => write!(f, "NotOutputClosed({}, {a})", ws(w)),
            Defect::Cohesive => f.write_str("Cohesive"),
        }
    }
}

/// Priority among defect kinds when several are present.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RepairOrder {
    /// consistent, closed, evidence-closed, output-closed
    #[default]
    ConsistentFirst,
    /// closed, consistent, evidence-closed, output-closed
    ClosedFirst,
}

#[derive(Clone, Debug)]
pub struct ObservationTable {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    in_s: Vec<bool>,
    s: Vec<usize>,
    sigma: Vec<Char>,
    sigma_set: HashSet<Char>,
    e: Vec<Word>,
    cols: Vec<Word>,
    col_index: HashMap<Word, usize>,
    cells: Vec<Vec<u32>>,
    gamma: Vec<String>,
    gamma_index: HashMap<String, u32>,
}

type ConsistencyWitness = (Word, Word, Char, Word);

fn tuple_cmp(x: &ConsistencyWitness, y: &ConsistencyWitness) -> std::cmp::Ordering {
    shortlex(&x.0, &y.0)
        .then_with(|| shortlex(&x.1, &y.1))
        .then_with(|| x.2.cmp(&y.2))
        .then_with(|| shortlex(&x.3, &y.3))
}

fn concat(w: &[Char], e: &[Char]) -> Word {
    let mut v = Vec::with_capacity(w.len() + e.len());
    v.extend_from_slice(w);
    v.extend_from_slice(e);
    v
}

impl ObservationTable {
    /// `S = {ε}`, `R = {a0}`, `Σ_E = {a0}`, `E = ∅`.
    pub fn new(a0: Char, teacher: &mut dyn Teacher) -> Result<Self> {
        let mut t = ObservationTable {
            words: Vec::new(),
            index: HashMap::new(),
            in_s: Vec::new(),
            s: Vec::new(),
            sigma: Vec::new(),
            sigma_set: HashSet::new(),
            e: Vec::new(),
            cols: Vec::new(),
            col_index: HashMap::new(),
            cells: Vec::new(),
            gamma: Vec::new(),
            gamma_index: HashMap::new(),
        };
        t.push_row(Vec::new(), teacher)?;
        t.in_s[0] = true;
        t.s.push(0);
        t.push_col(vec![a0.clone()], teacher)?;
        t.sigma.push(a0.clone());
        t.sigma_set.insert(a0.clone());
        t.push_row(vec![a0], teacher)?;
        Ok(t)
    }

    fn intern(&mut self, o: String) -> u32 {
        if let Some(&i) = self.gamma_index.get(&o) {
            return i;
        }
        let i = self.gamma.len() as u32;
        self.gamma.push(o.clone());
        self.gamma_index.insert(o, i);
        i
    }

    fn push_row(&mut self, w: Word, teacher: &mut dyn Teacher) -> Result<()> {
        let mut row = Vec::with_capacity(self.cols.len());
        for c in 0..self.cols.len() {
            let o = teacher.output(&concat(&w, &self.cols[c]))?;
            row.push(self.intern(o));
        }
        self.index.insert(w.clone(), self.words.len());
        self.words.push(w);
        self.in_s.push(false);
        self.cells.push(row);
        Ok(())
    }

    fn push_col(&mut self, c: Word, teacher: &mut dyn Teacher) -> Result<()> {
        for r in 0..self.words.len() {
            let o = teacher.output(&concat(&self.words[r], &c))?;
            let o = self.intern(o);
            self.cells[r].push(o);
        }
        self.col_index.insert(c.clone(), self.cols.len());
        self.cols.push(c);
        Ok(())
    }

    /// Adds `w` and any missing prefixes to R, shortest first; returns how many rows were added.
    fn add_with_prefixes(&mut self, w: &[Char], teacher: &mut dyn Teacher) -> Result<usize> {
        let mut added = 0;
        for i in 1..=w.len() {
            if !self.index.contains_key(&w[..i]) {
                self.push_row(w[..i].to_vec(), teacher)?;
                added += 1;
            }
        }
        Ok(added)
    }

    pub fn s_words(&self) -> impl Iterator<Item = &Word> {
        self.s.iter().map(|&i| &self.words[i])
    }

    pub fn r_words(&self) -> impl Iterator<Item = &Word> {
        self.words
            .iter()
            .zip(&self.in_s)
            .filter(|(_, s)| !**s)
            .map(|(w, _)| w)
    }

    /// All rows, S ∪ R, in insertion order.
    pub fn rows(&self) -> &[Word] {
        &self.words
    }

    pub fn s_len(&self) -> usize {
        self.s.len()
    }

    pub fn r_len(&self) -> usize {
        self.words.len() - self.s.len()
    }

    pub fn sigma(&self) -> &[Char] {
        &self.sigma
    }

    pub fn e(&self) -> &[Word] {
        &self.e
    }

    /// Output symbols seen so far, in order of first appearance.
    pub fn gamma(&self) -> &[String] {
        &self.gamma
    }

    pub fn contains_row(&self, w: &[Char]) -> bool {
        self.index.contains_key(w)
    }

    pub fn is_in_s(&self, w: &[Char]) -> bool {
        self.index.get(w).is_some_and(|&i| self.in_s[i])
    }

    /// `f(w, col)` where `col` is a character of Σ_E (as a one-letter word) or a word of E.
    pub fn cell(&self, w: &[Char], col: &[Char]) -> Option<&str> {
        let r = *self.index.get(w)?;
        let c = *self.col_index.get(col)?;
        Some(&self.gamma[self.cells[r][c] as usize])
    }

    pub(crate) fn cell_index(&self, w: &[Char], col: &[Char]) -> Option<u32> {
        Some(self.cells[*self.index.get(w)?][*self.col_index.get(col)?])
    }

    /// Columns in display order: Σ_E then E.
    pub fn columns(&self) -> Vec<Word> {
        self.sigma
            .iter()
            .map(|a| vec![a.clone()])
            .chain(self.e.iter().cloned())
            .collect()
    }

    /// The row of `w` in display column order.
    pub fn row(&self, w: &[Char]) -> Option<Vec<&str>> {
        self.index.get(w)?;
        Some(
            self.columns()
                .iter()
                .map(|c| self.cell(w, c).expect("filled"))
                .collect(),
        )
    }

    pub(crate) fn row_key(&self, w: &[Char]) -> Option<&[u32]> {
        self.index.get(w).map(|&i| self.cells[i].as_slice())
    }

    pub fn check(&self, order: RepairOrder) -> Defect {
        let checks: [fn(&Self) -> Option<Defect>; 4] = match order {
            RepairOrder::ConsistentFirst => [
                Self::find_inconsistency,
                Self::find_unclosed,
                Self::find_evidence_gap,
                Self::find_output_gap,
            ],
            RepairOrder::ClosedFirst => [
                Self::find_unclosed,
                Self::find_inconsistency,
                Self::find_evidence_gap,
                Self::find_output_gap,
            ],
        };
        checks
            .iter()
            .find_map(|c| c(self))
            .unwrap_or(Defect::Cohesive)
    }

    pub fn is_cohesive(&self) -> bool {
        self.check(RepairOrder::default()) == Defect::Cohesive
    }

    fn s_rows(&self) -> HashSet<&[u32]> {
        self.s.iter().map(|&i| self.cells[i].as_slice()).collect()
    }

    fn find_unclosed(&self) -> Option<Defect> {
        let s_rows = self.s_rows();
        (0..self.words.len())
            .filter(|&i| !self.in_s[i] && !s_rows.contains(self.cells[i].as_slice()))
            .map(|i| &self.words[i])
            .min_by(|a, b| shortlex(a, b))
            .map(|r| Defect::NotClosed(r.clone()))
    }

    fn find_inconsistency(&self) -> Option<Defect> {
        let mut classes: HashMap<&[u32], Vec<usize>> = HashMap::new();
        for (i, row) in self.cells.iter().enumerate() {
            classes.entry(row.as_slice()).or_default().push(i);
        }
        let ext: Vec<Vec<Option<usize>>> = self
            .words
            .iter()
            .map(|w| {
                self.sigma
                    .iter()
                    .map(|a| self.index.get(&concat(w, std::slice::from_ref(a))).copied())
                    .collect()
            })
            .collect();
        let mut best: Option<ConsistencyWitness> = None;
        for members in classes.values().filter(|m| m.len() > 1) {
            let clash = (0..self.sigma.len()).any(|a| {
                let mut seen: Option<&[u32]> = None;
                members.iter().filter_map(|&m| ext[m][a]).any(|x| {
                    let row = self.cells[x].as_slice();
                    seen.replace(row).is_some_and(|prev| prev != row)
                })
            });
            if !clash {
                continue;
            }
            let mut sorted = members.clone();
            sorted.sort_by(|&x, &y| shortlex(&self.words[x], &self.words[y]));
            let mut letters: Vec<usize> = (0..self.sigma.len()).collect();
            letters.sort_by(|&x, &y| self.sigma[x].cmp(&self.sigma[y]));
            let found = 'search: {
                for (i, &w1) in sorted.iter().enumerate() {
                    for &w2 in &sorted[i + 1..] {
                        for &a in &letters {
                            let (Some(x1), Some(x2)) = (ext[w1][a], ext[w2][a]) else {
                                continue;
                            };
                            let e = (0..self.cols.len())
                                .filter(|&c| self.cells[x1][c] != self.cells[x2][c])
                                .map(|c| &self.cols[c])
                                .min_by(|p, q| shortlex(p, q));
                            if let Some(e) = e {
                                break 'search Some((
                                    self.words[w1].clone(),
                                    self.words[w2].clone(),
                                    self.sigma[a].clone(),
                                    e.clone(),
                                ));
                            }
                        }
                    }
                }
                None
            };
            if let Some(c) = found {
                if best.as_ref().is_none_or(|b| tuple_cmp(&c, b).is_lt()) {
                    best = Some(c);
                }
            }
        }
        best.map(|(w1, w2, a, e)| Defect::NotConsistent { w1, w2, a, e })
    }

    fn find_evidence_gap(&self) -> Option<Defect> {
        let mut best: Option<Word> = None;
        for &i in &self.s {
            for a in &self.sigma {
                let w = concat(&self.words[i], std::slice::from_ref(a));
                if !self.index.contains_key(&w)
                    && best.as_ref().is_none_or(|b| shortlex(&w, b).is_lt())
                {
                    best = Some(w);
                }
            }
        }
        best.map(|mut w| {
            let e = w.pop().expect("non-empty");
            Defect::NotEvidenceClosed { s: w, e }
        })
    }

    fn find_output_gap(&self) -> Option<Defect> {
        self.words
            .iter()
            .filter(|w| w.last().is_some_and(|a| !self.sigma_set.contains(a)))
            .min_by(|a, b| shortlex(a, b))
            .map(|w| {
                let mut w = w.clone();
                let a = w.pop().expect("non-empty");
                Defect::NotOutputClosed { w, a }
            })
    }

    /// Moves `r` from R to S.
    pub fn make_closed(&mut self, r: &[Char]) -> Result<()> {
        let i = *self
            .index
            .get(r)
            .ok_or_else(|| Error::Precondition(format!("{} is not a row", word_to_string(r))))?;
        if self.in_s[i] || self.s_rows().contains(self.cells[i].as_slice()) {
            return Err(Error::Precondition(format!(
                "{} does not witness a closedness defect",
                word_to_string(r)
            )));
        }
        self.in_s[i] = true;
        self.s.push(i);
        Ok(())
    }

    /// Adds `a·e` to E.
    pub fn make_consistent(
        &mut self,
        a: &Char,
        e: &[Char],
        teacher: &mut dyn Teacher,
    ) -> Result<()> {
        let col = concat(std::slice::from_ref(a), e);
        if !self.sigma_set.contains(a)
            || !self.col_index.contains_key(e)
            || self.col_index.contains_key(&col)
        {
            return Err(Error::Precondition(format!(
                "{} is not a new suffix",
                word_to_string(&col)
            )));
        }
        self.push_col(col.clone(), teacher)?;
        self.e.push(col);
        Ok(())
    }

    /// Adds `s·e` (and any missing prefix) to R.
    pub fn make_evidence_closed(
        &mut self,
        s: &[Char],
        e: &Char,
        teacher: &mut dyn Teacher,
    ) -> Result<()> {
        let w = concat(s, std::slice::from_ref(e));
        if !self.is_in_s(s) || !self.sigma_set.contains(e) || self.index.contains_key(&w) {
            return Err(Error::Precondition(format!(
                "{} does not witness an evidence gap",
                word_to_string(&w)
            )));
        }
        self.add_with_prefixes(&w, teacher).map(|_| ())
    }

    /// Adds `a` to Σ_E.
    pub fn make_output_closed(&mut self, a: &Char, teacher: &mut dyn Teacher) -> Result<()> {
        if self.sigma_set.contains(a) {
            return Err(Error::Precondition(format!("{a} is already in Σ_E")));
        }
        self.push_col(vec![a.clone()], teacher)?;
        self.sigma.push(a.clone());
        self.sigma_set.insert(a.clone());
        Ok(())
    }

    /// Applies the repair matching `d`.
    pub fn repair(&mut self, d: &Defect, teacher: &mut dyn Teacher) -> Result<()> {
        match d {
            Defect::NotClosed(r) => self.make_closed(r),
            Defect::NotConsistent { a, e, .. } => self.make_consistent(a, e, teacher),
            Defect::NotEvidenceClosed { s, e } => self.make_evidence_closed(s, e, teacher),
            Defect::NotOutputClosed { a, .. } => self.make_output_closed(a, teacher),
            Defect::Cohesive => Err(Error::Precondition("the table is already cohesive".into())),
        }
    }

    /// Adds every prefix of `cex` not yet in S ∪ R to R, shortest first.
    pub fn add_counterexample(&mut self, cex: &[Char], teacher: &mut dyn Teacher) -> Result<usize> {
        if cex.is_empty() {
            return Err(Error::EmptyWord);
        }
        self.add_with_prefixes(cex, teacher)
    }

    /// Checks the structural invariants; returns the first violation found.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if !self.in_s.first().copied().unwrap_or(false) || !self.words[0].is_empty() {
            return bad("ε is not in S".into());
        }
        if self.sigma.is_empty() {
            return bad("Σ_E is empty".into());
        }
        for w in &self.words {
            if !w.is_empty() && !self.index.contains_key(&w[..w.len() - 1]) {
                return bad(format!(
                    "S ∪ R is not prefix-closed at {}",
                    word_to_string(w)
                ));
            }
        }
        for e in &self.e {
            if !self.col_index.contains_key(&e[1..]) {
                return bad(format!(
                    "Σ_E ∪ E is not suffix-closed at {}",
                    word_to_string(e)
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ObservationTable {
    /// S rows above a rule, then R rows; columns Σ_E, a bar, then E.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.columns().iter().map(|c| word_to_string(c)).collect();
        let mut lines: Vec<(String, Vec<String>)> = Vec::new();
        let s: Vec<&Word> = self.s_words().collect();
        let r: Vec<&Word> = self.r_words().collect();
        for w in s.iter().chain(&r) {
            let cells = self
                .row(w)
                .expect("row")
                .into_iter()
                .map(str::to_string)
                .collect();
            lines.push((word_to_string(w), cells));
        }
        let label_w = lines
            .iter()
            .map(|(l, _)| l.chars().count())
            .max()
            .unwrap_or(1)
            .max(1);
        let widths: Vec<usize> = (0..head.len())
            .map(|c| {
                lines
                    .iter()
                    .map(|(_, cs)| cs[c].chars().count())
                    .chain([head[c].chars().count()])
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let ns = self.sigma.len();
        let render = |label: &str, cells: &[String]| {
            let mut line = format!("{label:<label_w$} |");
            for (c, v) in cells.iter().enumerate() {
                if c == ns {
                    line.push_str(" |");
                }
                line.push_str(&format!(" {v:<w$}", w = widths[c]));
            }
            line.trim_end().to_string()
        };
        let top = render("", &head);
        let rule = "-".repeat(top.chars().count());
        writeln!(f, "{top}")?;
        writeln!(f, "{rule}")?;
        for (i, (l, cs)) in lines.iter().enumerate() {
            if i == s.len() {
                writeln!(f, "{rule}")?;
            }
            writeln!(f, "{}", render(l, cs))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::make_worked_example;
    use crate::oracle::ScriptedOracle;

    fn w(xs: &[u64]) -> Word {
        xs.iter().map(|&x| Char::nat(x)).collect()
    }

    fn teacher() -> ScriptedOracle {
        ScriptedOracle::new(make_worked_example(), vec![])
    }

    #[test]
    fn initial_table() {
        let mut t = teacher();
        let tab = ObservationTable::new(Char::nat(0), &mut t).unwrap();
        assert_eq!(tab.cell(&[], &w(&[0])), Some("S"));
        assert_eq!(tab.cell(&w(&[0]), &w(&[0])), Some("S"));
        assert_eq!(tab.check(RepairOrder::default()), Defect::Cohesive);
        tab.check_invariants().unwrap();
        let tab = ObservationTable::new(Char::nat(20), &mut t).unwrap();
        assert_eq!(tab.cell(&[], &w(&[20])), Some("B"));
    }

    #[test]
    fn second_and_third_rounds() {
        let mut t = teacher();
        let mut tab = ObservationTable::new(Char::nat(0), &mut t).unwrap();
        assert_eq!(tab.add_counterexample(&w(&[20]), &mut t).unwrap(), 1);
        let d = tab.check(RepairOrder::default());
        assert_eq!(
            d,
            Defect::NotOutputClosed {
                w: vec![],
                a: Char::nat(20)
            }
        );
        tab.repair(&d, &mut t).unwrap();
        assert_eq!(tab.cell(&[], &w(&[20])), Some("B"));
        assert!(tab.is_cohesive());
        tab.add_counterexample(&w(&[0, 0, 0]), &mut t).unwrap();
        let d = tab.check(RepairOrder::default());
        assert_eq!(
            d,
            Defect::NotConsistent {
                w1: vec![],
                w2: w(&[0]),
                a: Char::nat(0),
                e: w(&[0])
            }
        );
        tab.repair(&d, &mut t).unwrap();
        assert_eq!(tab.e(), [w(&[0, 0])]);
        assert_eq!(
            (tab.cell(&[], &w(&[0, 0])), tab.cell(&w(&[0]), &w(&[0, 0]))),
            (Some("S"), Some("P"))
        );
        assert_eq!(tab.add_counterexample(&w(&[0, 0]), &mut t).unwrap(), 0);
        tab.check_invariants().unwrap();
    }

    #[test]
    fn closed_first_order_reports_closedness() {
        let mut t = teacher();
        let mut tab = ObservationTable::new(Char::nat(0), &mut t).unwrap();
        tab.add_counterexample(&w(&[20]), &mut t).unwrap();
        tab.make_output_closed(&Char::nat(20), &mut t).unwrap();
        tab.add_counterexample(&w(&[0, 0, 0]), &mut t).unwrap();
        assert_eq!(
            tab.check(RepairOrder::ClosedFirst),
            Defect::NotClosed(w(&[0, 0]))
        );
    }

    #[test]
    fn only_the_smaller_of_two_equal_rows_moves() {
        let mut t = teacher();
        let mut tab = ObservationTable::new(Char::nat(0), &mut t).unwrap();
        tab.add_counterexample(&w(&[20]), &mut t).unwrap();
        tab.make_output_closed(&Char::nat(20), &mut t).unwrap();
        tab.add_counterexample(&w(&[0, 0, 0]), &mut t).unwrap();
        assert_eq!(tab.row(&w(&[0, 0])), tab.row(&w(&[0, 0, 0])));
        let d = tab.check(RepairOrder::ClosedFirst);
        tab.repair(&d, &mut t).unwrap();
        assert!(tab.is_in_s(&w(&[0, 0])) && !tab.is_in_s(&w(&[0, 0, 0])));
        assert!(tab.make_closed(&w(&[0, 0, 0])).is_err());
    }

    #[test]
    fn repairs_check_preconditions() {
        let mut t = teacher();
        let mut tab = ObservationTable::new(Char::nat(0), &mut t).unwrap();
        assert!(tab.repair(&Defect::Cohesive, &mut t).is_err());
        assert!(tab
            .make_evidence_closed(&[], &Char::nat(0), &mut t)
            .is_err());
        assert!(tab.make_output_closed(&Char::nat(0), &mut t).is_err());
        assert!(tab.make_closed(&w(&[0])).is_err());
        assert_eq!(tab.add_counterexample(&[], &mut t), Err(Error::EmptyWord));
    }

    #[test]
    fn dump_layout() {
        let mut t = teacher();
        let mut tab = ObservationTable::new(Char::nat(0), &mut t).unwrap();
        tab.add_counterexample(&w(&[20]), &mut t).unwrap();
        tab.make_output_closed(&Char::nat(20), &mut t).unwrap();
        let text = tab.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "   | 0 20");
        assert_eq!(lines[2], "ε  | S B");
        assert!(lines[3].starts_with("---"));
        assert_eq!(lines[4..], ["0  | S B", "20 | S B"]);
    }
}
