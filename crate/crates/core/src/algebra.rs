//! Effective Boolean algebras over ordered domains.
//!
//! Two families are supported. Interval algebras live over a product of one
//! or more ordered axes (naturals or finite doubles); their predicates are
//! finite unions of half-open boxes, stored as a canonical slab tree so that
//! equal denotations have equal representations. The equality algebra works
//! over opaque `u64` symbols with finite and co-finite sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A finite double with a total order. `-0.0` is folded into `0.0`.
#[derive(Clone, Copy, Debug)]
pub struct R64(f64);

impl R64 {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidChar(format!("{x} is not a finite real")));
        }
        Ok(R64(if x == 0.0 { 0.0 } else { x }))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for R64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for R64 {}

impl PartialOrd for R64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for R64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Hash for R64 {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

/// One coordinate of a character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Nat(u64),
    Real(R64),
    Sym(u64),
}

impl Scalar {
    pub fn real(x: f64) -> Result<Self> {
        R64::new(x).map(Scalar::Real)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Scalar::Nat(n) | Scalar::Sym(n) => n as f64,
            Scalar::Real(r) => r.get(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Nat(n) | Scalar::Sym(n) => write!(f, "{n}"),
            Scalar::Real(r) => write!(f, "{:?}", r.get()),
        }
    }
}

/// An input character: a tuple with one scalar per axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Char(pub SmallVec<[Scalar; 4]>);

impl Char {
    pub fn new(scalars: impl IntoIterator<Item = Scalar>) -> Self {
        Char(scalars.into_iter().collect())
    }

    pub fn nat(n: u64) -> Self {
        Char::new([Scalar::Nat(n)])
    }

    pub fn sym(n: u64) -> Self {
        Char::new([Scalar::Sym(n)])
    }

    pub fn scalars(&self) -> &[Scalar] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Char {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

pub type Word = Vec<Char>;

/// Shortlex order: shorter words first, then pointwise.
pub fn shortlex(a: &[Char], b: &[Char]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn word_to_string(w: &[Char]) -> String {
    if w.is_empty() {
        return "ε".to_string();
    }
    w.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("·")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisKind {
    Nat,
    Real,
}

/// One ordered axis with domain `[min, sup)`; `sup = None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Axis {
    pub kind: AxisKind,
    pub min: Scalar,
    pub sup: Option<Scalar>,
}

impl Axis {
    pub fn naturals() -> Self {
        Axis {
            kind: AxisKind::Nat,
            min: Scalar::Nat(0),
            sup: None,
        }
    }

    pub fn nat_range(min: u64, sup: Option<u64>) -> Result<Self> {
        if let Some(s) = sup {
            if s <= min {
                return Err(Error::InvalidInterval(format!(
                    "empty natural domain [{min},{s})"
                )));
            }
        }
        Ok(Axis {
            kind: AxisKind::Nat,
            min: Scalar::Nat(min),
            sup: sup.map(Scalar::Nat),
        })
    }

    pub fn real_range(min: f64, sup: Option<f64>) -> Result<Self> {
        let lo = Scalar::real(min)?;
        let hi = sup.map(Scalar::real).transpose()?;
        if let Some(h) = hi {
            if h <= lo {
                return Err(Error::InvalidInterval(format!(
                    "empty real domain [{min},{h})"
                )));
            }
        }
        Ok(Axis {
            kind: AxisKind::Real,
            min: lo,
            sup: hi,
        })
    }

    pub fn accepts(&self, x: Scalar) -> bool {
        let kind_ok = matches!(
            (self.kind, x),
            (AxisKind::Nat, Scalar::Nat(_)) | (AxisKind::Real, Scalar::Real(_))
        );
        kind_ok && x >= self.min && self.sup.is_none_or(|s| x < s)
    }

    /// Clips `[lo, hi)` to the axis domain. Upper bounds at or past the
    /// domain supremum are stored as `None`. Returns `None` when empty.
    pub fn clip(&self, iv: Interval) -> Option<Interval> {
        let lo = iv.lo.max(self.min);
        let hi = match (iv.hi, self.sup) {
            (Some(h), Some(s)) if h >= s => None,
            (h, _) => h,
        };
        if let Some(s) = self.sup {
            if lo >= s {
                return None;
            }
        }
        match hi {
            Some(h) if h <= lo => None,
            _ => Some(Interval { lo, hi }),
        }
    }
}

/// Half-open interval `[lo, hi)`; `hi = None` is `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Option<Scalar>,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Option<Scalar>) -> Result<Self> {
        if let Some(h) = hi {
            if std::mem::discriminant(&h) != std::mem::discriminant(&lo) {
                return Err(Error::KindMismatch(format!("interval bounds {lo} and {h}")));
            }
            if h <= lo {
                return Err(Error::InvalidInterval(format!("[{lo},{h}) is empty")));
            }
        }
        Ok(Interval { lo, hi })
    }

    pub fn nat(lo: u64, hi: Option<u64>) -> Result<Self> {
        Interval::new(Scalar::Nat(lo), hi.map(Scalar::Nat))
    }

    pub fn real(lo: f64, hi: Option<f64>) -> Result<Self> {
        Interval::new(Scalar::real(lo)?, hi.map(Scalar::real).transpose()?)
    }

    pub fn contains(&self, x: Scalar) -> bool {
        x >= self.lo && self.hi.is_none_or(|h| x < h)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{},{})", self.lo, h),
            None => write!(f, "[{},∞)", self.lo),
        }
    }
}

/// Canonical slab tree over the remaining axes.
///
/// `Full` only occurs once every axis has been consumed. Slabs are sorted,
/// disjoint, carry non-empty children, and adjacent slabs never share an
/// equal child, so structural equality coincides with semantic equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Full,
    Slabs(Vec<(Interval, Region)>),
}

impl Region {
    pub fn empty() -> Self {
        Region::Slabs(Vec::new())
    }

    pub fn full(axes: &[Axis]) -> Self {
        axes.iter().rev().fold(Region::Full, |inner, ax| {
            Region::Slabs(vec![(
                Interval {
                    lo: ax.min,
                    hi: None,
                },
                inner,
            )])
        })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Slabs(v) if v.is_empty())
    }

    pub fn slabs(&self) -> &[(Interval, Region)] {
        match self {
            Region::Full => &[],
            Region::Slabs(v) => v,
        }
    }

    fn cell_at(&self, x: Scalar) -> Option<&Region> {
        let slabs = self.slabs();
        let idx = slabs.partition_point(|(iv, _)| iv.lo <= x);
        if idx == 0 {
            return None;
        }
        let (iv, inner) = &slabs[idx - 1];
        iv.contains(x).then_some(inner)
    }

    fn contains(&self, xs: &[Scalar]) -> bool {
        match (self, xs.split_first()) {
            (Region::Full, None) => true,
            (Region::Slabs(_), Some((x, rest))) => {
                self.cell_at(*x).is_some_and(|inner| inner.contains(rest))
            }
            _ => false,
        }
    }

    fn boxes_into(&self, prefix: &mut Vec<Interval>, out: &mut Vec<Vec<Interval>>) {
        match self {
            Region::Full => out.push(prefix.clone()),
            Region::Slabs(v) => {
                for (iv, inner) in v {
                    prefix.push(*iv);
                    inner.boxes_into(prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}

/// Pointwise combination of two regions with a Boolean connective.
fn combine(axes: &[Axis], a: &Region, b: &Region, op: fn(bool, bool) -> bool) -> Region {
    let Some((ax, rest)) = axes.split_first() else {
        let full = op(matches!(a, Region::Full), matches!(b, Region::Full));
        return if full { Region::Full } else { Region::empty() };
    };
    let mut cuts: Vec<Scalar> = vec![ax.min];
    for (iv, _) in a.slabs().iter().chain(b.slabs()) {
        cuts.push(iv.lo);
        cuts.extend(iv.hi);
    }
    cuts.sort();
    cuts.dedup();
    let empty = Region::empty();
    let mut out: Vec<(Interval, Region)> = Vec::new();
    for (i, &lo) in cuts.iter().enumerate() {
        let hi = cuts.get(i + 1).copied();
        let ra = a.cell_at(lo).unwrap_or(&empty);
        let rb = b.cell_at(lo).unwrap_or(&empty);
        let r = combine(rest, ra, rb, op);
        if r.is_empty() {
            continue;
        }
        match out.last_mut() {
            Some((last, inner)) if last.hi == Some(lo) && *inner == r => last.hi = hi,
            _ => out.push((Interval { lo, hi }, r)),
        }
    }
    Region::Slabs(out)
}

/// Finite or co-finite set of equality-algebra symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EqSet {
    Finite(BTreeSet<u64>),
    Cofinite(BTreeSet<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Predicate {
    Boxes(Region),
    Eq(EqSet),
}

/// The algebra a predicate or character belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    /// Interval algebra over one axis, or the product of several.
    Intervals(Vec<Axis>),
    /// Equality algebra over `u64` symbols, optionally on a finite carrier.
    Equality { carrier: Option<BTreeSet<u64>> },
}

impl Algebra {
    pub fn naturals() -> Self {
        Algebra::Intervals(vec![Axis::naturals()])
    }

    pub fn product(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::KindMismatch("product of zero axes".into()));
        }
        Ok(Algebra::Intervals(axes))
    }

    pub fn equality(carrier: Option<BTreeSet<u64>>) -> Result<Self> {
        if carrier.as_ref().is_some_and(|c| c.is_empty()) {
            return Err(Error::KindMismatch("empty equality carrier".into()));
        }
        Ok(Algebra::Equality { carrier })
    }

    pub fn arity(&self) -> usize {
        match self {
            Algebra::Intervals(axes) => axes.len(),
            Algebra::Equality { .. } => 1,
        }
    }

    pub fn axes(&self) -> Option<&[Axis]> {
        match self {
            Algebra::Intervals(axes) => Some(axes),
            Algebra::Equality { .. } => None,
        }
    }

    /// The least character of the domain.
    pub fn min_char(&self) -> Char {
        match self {
            Algebra::Intervals(axes) => Char::new(axes.iter().map(|a| a.min)),
            Algebra::Equality { carrier } => Char::sym(
                carrier
                    .as_ref()
                    .and_then(|c| c.first().copied())
                    .unwrap_or(0),
            ),
        }
    }

    pub fn check_char(&self, c: &Char) -> Result<()> {
        let ok = match self {
            Algebra::Intervals(axes) => {
                c.arity() == axes.len() && axes.iter().zip(c.scalars()).all(|(a, &x)| a.accepts(x))
            }
            Algebra::Equality { carrier } => match c.scalars() {
                [Scalar::Sym(s)] => carrier.as_ref().is_none_or(|cs| cs.contains(s)),
                _ => false,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidChar(format!("{c} is not in the domain")))
        }
    }

    pub fn check_pred(&self, p: &Predicate) -> Result<()> {
        match (self, p) {
            (Algebra::Intervals(_), Predicate::Boxes(_))
            | (Algebra::Equality { .. }, Predicate::Eq(_)) => Ok(()),
            _ => Err(Error::KindMismatch(
                "predicate does not belong to this algebra".into(),
            )),
        }
    }

    pub fn top(&self) -> Predicate {
        match self {
            Algebra::Intervals(axes) => Predicate::Boxes(Region::full(axes)),
            Algebra::Equality { carrier: Some(c) } => Predicate::Eq(EqSet::Finite(c.clone())),
            Algebra::Equality { carrier: None } => Predicate::Eq(EqSet::Cofinite(BTreeSet::new())),
        }
    }

    pub fn bottom(&self) -> Predicate {
        match self {
            Algebra::Intervals(_) => Predicate::Boxes(Region::empty()),
            Algebra::Equality { .. } => Predicate::Eq(EqSet::Finite(BTreeSet::new())),
        }
    }

    /// A single box. Each interval is clipped to its axis domain; a box
    /// that clips to nothing yields ⊥.
    pub fn box_pred(&self, ivs: &[Interval]) -> Result<Predicate> {
        let axes = self
            .axes()
            .ok_or_else(|| Error::KindMismatch("boxes need an interval algebra".into()))?;
        if ivs.len() != axes.len() {
            return Err(Error::KindMismatch(format!(
                "box of arity {} in an algebra of arity {}",
                ivs.len(),
                axes.len()
            )));
        }
        let mut clipped = Vec::with_capacity(ivs.len());
        for (ax, iv) in axes.iter().zip(ivs) {
            let iv = Interval::new(iv.lo, iv.hi)?;
            let lo_ok = matches!(
                (ax.kind, iv.lo),
                (AxisKind::Nat, Scalar::Nat(_)) | (AxisKind::Real, Scalar::Real(_))
            );
            if !lo_ok {
                return Err(Error::KindMismatch(format!("{iv} on a {:?} axis", ax.kind)));
            }
            match ax.clip(iv) {
                Some(c) => clipped.push(c),
                None => return Ok(self.bottom()),
            }
        }
        let region = clipped
            .into_iter()
            .rev()
            .fold(Region::Full, |inner, iv| Region::Slabs(vec![(iv, inner)]));
        Ok(Predicate::Boxes(region))
    }

    /// Union of boxes.
    pub fn from_boxes(&self, boxes: &[Vec<Interval>]) -> Result<Predicate> {
        let mut acc = self.bottom();
        for b in boxes {
            acc = self.join(&acc, &self.box_pred(b)?)?;
        }
        Ok(acc)
    }

    /// One-dimensional convenience: union of intervals.
    pub fn from_intervals(&self, ivs: &[Interval]) -> Result<Predicate> {
        let boxes: Vec<Vec<Interval>> = ivs.iter().map(|iv| vec![*iv]).collect();
        self.from_boxes(&boxes)
    }

    pub fn eq_set(&self, set: EqSet) -> Result<Predicate> {
        let Algebra::Equality { carrier } = self else {
            return Err(Error::KindMismatch(
                "equality set in an interval algebra".into(),
            ));
        };
        Ok(Predicate::Eq(normalize_eq(carrier.as_ref(), set)))
    }

    pub fn denotes(&self, p: &Predicate, c: &Char) -> Result<bool> {
        self.check_pred(p)?;
        self.check_char(c)?;
        Ok(match p {
            Predicate::Boxes(r) => r.contains(c.scalars()),
            Predicate::Eq(set) => {
                let Scalar::Sym(s) = c.scalars()[0] else {
                    unreachable!()
                };
                match set {
                    EqSet::Finite(xs) => xs.contains(&s),
                    EqSet::Cofinite(xs) => !xs.contains(&s),
                }
            }
        })
    }

    pub fn meet(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        self.binary(p, q, |a, b| a && b)
    }

    pub fn join(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        self.binary(p, q, |a, b| a || b)
    }

    pub fn complement(&self, p: &Predicate) -> Result<Predicate> {
        self.binary(p, p, |a, _| !a)
    }

    /// `p ∧ ¬q`
    pub fn minus(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        self.binary(p, q, |a, b| a && !b)
    }

    fn binary(
        &self,
        p: &Predicate,
        q: &Predicate,
        op: fn(bool, bool) -> bool,
    ) -> Result<Predicate> {
        self.check_pred(p)?;
        self.check_pred(q)?;
        match (self, p, q) {
            (Algebra::Intervals(axes), Predicate::Boxes(a), Predicate::Boxes(b)) => {
                Ok(Predicate::Boxes(combine(axes, a, b, op)))
            }
            (Algebra::Equality { carrier }, Predicate::Eq(a), Predicate::Eq(b)) => {
                Ok(Predicate::Eq(eq_combine(carrier.as_ref(), a, b, op)))
            }
            _ => unreachable!(),
        }
    }

    pub fn is_empty(&self, p: &Predicate) -> bool {
        // Co-finite sets are never stored over a finite carrier.
        match p {
            Predicate::Boxes(r) => r.is_empty(),
            Predicate::Eq(EqSet::Finite(xs)) => xs.is_empty(),
            Predicate::Eq(EqSet::Cofinite(_)) => false,
        }
    }

    pub fn is_top(&self, p: &Predicate) -> bool {
        *p == self.top()
    }

    /// The least element of the predicate's denotation.
    pub fn witness(&self, p: &Predicate) -> Result<Char> {
        self.check_pred(p)?;
        match p {
            Predicate::Boxes(r) => {
                let mut out = SmallVec::new();
                let mut cur = r;
                while let Region::Slabs(v) = cur {
                    let (iv, inner) = v.first().ok_or(Error::EmptyPredicate)?;
                    out.push(iv.lo);
                    cur = inner;
                }
                Ok(Char(out))
            }
            Predicate::Eq(EqSet::Finite(xs)) => xs
                .first()
                .map(|&s| Char::sym(s))
                .ok_or(Error::EmptyPredicate),
            Predicate::Eq(EqSet::Cofinite(xs)) => {
                let mut s = 0u64;
                for &x in xs {
                    if x != s {
                        break;
                    }
                    s += 1;
                }
                Ok(Char::sym(s))
            }
        }
    }

    /// Canonical boxes of an interval predicate, in lexicographic order.
    pub fn boxes(&self, p: &Predicate) -> Result<Vec<Vec<Interval>>> {
        self.check_pred(p)?;
        let Predicate::Boxes(r) = p else {
            return Err(Error::KindMismatch("boxes of an equality predicate".into()));
        };
        let mut out = Vec::new();
        r.boxes_into(&mut Vec::new(), &mut out);
        Ok(out)
    }

    pub fn display(&self, p: &Predicate) -> String {
        match p {
            Predicate::Boxes(r) if r.is_empty() => "⊥".to_string(),
            Predicate::Boxes(r) => {
                let mut boxes = Vec::new();
                r.boxes_into(&mut Vec::new(), &mut boxes);
                boxes
                    .iter()
                    .map(|b| {
                        b.iter()
                            .map(|iv| iv.to_string())
                            .collect::<Vec<_>>()
                            .join("×")
                    })
                    .collect::<Vec<_>>()
                    .join("∪")
            }
            Predicate::Eq(EqSet::Finite(xs)) if xs.is_empty() => "⊥".to_string(),
            Predicate::Eq(EqSet::Finite(xs)) => format!("{{{}}}", join_syms(xs)),
            Predicate::Eq(EqSet::Cofinite(xs)) if xs.is_empty() => "⊤".to_string(),
            Predicate::Eq(EqSet::Cofinite(xs)) => format!("¬{{{}}}", join_syms(xs)),
        }
    }
}

fn join_syms(xs: &BTreeSet<u64>) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn normalize_eq(carrier: Option<&BTreeSet<u64>>, set: EqSet) -> EqSet {
    match (carrier, set) {
        (None, s) => s,
        (Some(c), EqSet::Finite(xs)) => EqSet::Finite(xs.intersection(c).copied().collect()),
        (Some(c), EqSet::Cofinite(xs)) => EqSet::Finite(c.difference(&xs).copied().collect()),
    }
}

fn eq_combine(
    carrier: Option<&BTreeSet<u64>>,
    a: &EqSet,
    b: &EqSet,
    op: fn(bool, bool) -> bool,
) -> EqSet {
    // Symbols outside both stored sets behave uniformly; decide that case once,
    // then flip membership for the listed symbols.
    let (a_neg, a_set) = match a {
        EqSet::Finite(xs) => (false, xs),
        EqSet::Cofinite(xs) => (true, xs),
    };
    let (b_neg, b_set) = match b {
        EqSet::Finite(xs) => (false, xs),
        EqSet::Cofinite(xs) => (true, xs),
    };
    let rest = op(a_neg, b_neg);
    let listed: BTreeSet<u64> = a_set
        .union(b_set)
        .copied()
        .filter(|x| op(a_set.contains(x) != a_neg, b_set.contains(x) != b_neg) != rest)
        .collect();
    let set = if rest {
        EqSet::Cofinite(listed)
    } else {
        EqSet::Finite(listed)
    };
    normalize_eq(carrier, set)
}

/// Smallest domain value strictly above `x`.
pub fn next_above(x: Scalar) -> Result<Scalar> {
    match x {
        Scalar::Nat(n) => n
            .checked_add(1)
            .map(Scalar::Nat)
            .ok_or(Error::Overflow(x.to_string())),
        Scalar::Sym(n) => n
            .checked_add(1)
            .map(Scalar::Sym)
            .ok_or(Error::Overflow(x.to_string())),
        Scalar::Real(r) => {
            let y = r.get().next_up();
            if y.is_finite() {
                Scalar::real(y)
            } else {
                Err(Error::Overflow(x.to_string()))
            }
        }
    }
}

/// `next_above` on raw doubles; `na(y)` in benchmark guard listings.
pub fn na(x: f64) -> f64 {
    x.next_up()
}
