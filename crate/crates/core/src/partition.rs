//! Partitioning functions: map a list of disjoint finite sample sets to a
//! same-length list of disjoint predicates that cover the domain and
//! contain their samples.

use std::collections::{BTreeSet, HashMap};

use crate::algebra::{Algebra, Axis, Char, EqSet, Interval, Predicate, Region, Scalar};
use crate::error::{Error, Result};

pub trait Partitioner: Send + Sync {
    fn partition(&self, alg: &Algebra, groups: &[Vec<Char>]) -> Result<Vec<Predicate>>;
}

/// Descending-sweep partitioning; the product case uses [`partition_product`]
/// and the equality algebra uses [`partition_equality`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SweepPartitioner;

impl Partitioner for SweepPartitioner {
    fn partition(&self, alg: &Algebra, groups: &[Vec<Char>]) -> Result<Vec<Predicate>> {
        match alg {
            Algebra::Equality { .. } => partition_equality(alg, groups),
            Algebra::Intervals(axes) if axes.len() == 1 => partition_intervals(alg, groups),
            Algebra::Intervals(_) => partition_product(alg, groups),
        }
    }
}

fn check_samples(alg: &Algebra, groups: &[Vec<Char>]) -> Result<()> {
    let mut owner: HashMap<&Char, usize> = HashMap::new();
    for (i, g) in groups.iter().enumerate() {
        for c in g {
            alg.check_char(c)?;
            if let Some(j) = owner.insert(c, i) {
                if j != i {
                    return Err(Error::InvalidSamples(format!(
                        "{c} occurs in groups {j} and {i}"
                    )));
                }
            }
        }
    }
    if owner.is_empty() {
        return Err(Error::InvalidSamples("no samples".into()));
    }
    Ok(())
}

/// Interval partitioning by a descending sweep over the samples.
pub fn partition_intervals(alg: &Algebra, groups: &[Vec<Char>]) -> Result<Vec<Predicate>> {
    let axis = match alg.axes() {
        Some([axis]) => *axis,
        _ => {
            return Err(Error::KindMismatch(
                "interval partitioning needs a one-axis algebra".into(),
            ))
        }
    };
    check_samples(alg, groups)?;
    let mut samples: Vec<(Scalar, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(i, g)| g.iter().map(move |c| (c.scalars()[0], i)))
        .collect();
    samples.sort_by(|a, b| b.cmp(a));
    samples.dedup();

    let mut pieces: Vec<Vec<Interval>> = vec![Vec::new(); groups.len()];
    let mut b: Option<Scalar> = None;
    let mut last = 0;
    for &(a, i) in &samples {
        pieces[i].push(Interval { lo: a, hi: b });
        b = Some(a);
        last = i;
    }
    if let Some(a) = b {
        if a > axis.min {
            pieces[last].push(Interval {
                lo: axis.min,
                hi: Some(a),
            });
        }
    }
    pieces.iter().map(|ivs| alg.from_intervals(ivs)).collect()
}

/// Piecewise-constant labelling of the remaining axes. A `Split` lists slab
/// lower bounds in ascending order, the first at the axis minimum. Adjacent
/// slabs differ, and a lone slab only survives when its child still varies.
#[derive(Clone, Debug, PartialEq, Eq)]
enum LabelMap {
    Leaf(usize),
    Split(Vec<(Scalar, LabelMap)>),
}

fn normalize_slabs(slabs: Vec<(Scalar, LabelMap)>) -> LabelMap {
    let mut out: Vec<(Scalar, LabelMap)> = Vec::with_capacity(slabs.len());
    for (lo, m) in slabs {
        match out.last_mut() {
            Some((l, prev)) if *l == lo => *prev = m,
            Some((_, prev)) if *prev == m => {}
            _ => out.push((lo, m)),
        }
    }
    // Overwriting a slab in place may have made it equal to its predecessor.
    out.dedup_by(|b, a| a.1 == b.1);
    if out.len() == 1 && matches!(out[0].1, LabelMap::Leaf(_)) {
        out.pop().map(|(_, m)| m).expect("one slab")
    } else {
        LabelMap::Split(out)
    }
}

/// Sweeps the sample columns of the first axis in ascending order. Inside
/// each slab of `prior`, the region from a column up to the next column
/// inherits the labelling to its left with that column's samples imposed.
fn overlay(axes: &[Axis], prior: &LabelMap, samples: &mut [(&[Scalar], usize)]) -> LabelMap {
    if samples.is_empty() {
        return prior.clone();
    }
    let Some((axis, rest)) = axes.split_first() else {
        return LabelMap::Leaf(samples[0].1);
    };
    samples.sort_by(|a, b| a.0[0].cmp(&b.0[0]));
    let prior_slabs = match prior {
        LabelMap::Leaf(_) => vec![(axis.min, prior.clone())],
        LabelMap::Split(v) => v.clone(),
    };
    let mut out: Vec<(Scalar, LabelMap)> = Vec::new();
    let mut start = 0;
    for (t, (lo, sigma)) in prior_slabs.iter().enumerate() {
        let next = prior_slabs.get(t + 1).map(|s| s.0);
        let mut cur = sigma.clone();
        out.push((*lo, cur.clone()));
        while start < samples.len() && next.is_none_or(|n| samples[start].0[0] < n) {
            let x = samples[start].0[0];
            let end = start + samples[start..].partition_point(|s| s.0[0] == x);
            let mut column: Vec<(&[Scalar], usize)> = samples[start..end]
                .iter()
                .map(|(s, l)| (&s[1..], *l))
                .collect();
            cur = overlay(rest, &cur, &mut column);
            out.push((x, cur.clone()));
            start = end;
        }
    }
    normalize_slabs(out)
}

fn extract(axes: &[Axis], map: &LabelMap, label: usize) -> Region {
    match map {
        LabelMap::Leaf(l) if *l == label => Region::full(axes),
        LabelMap::Leaf(_) => Region::empty(),
        LabelMap::Split(slabs) => {
            let (_, rest) = axes.split_first().expect("split below the last axis");
            let mut cells: Vec<(Interval, Region)> = Vec::new();
            for (i, (lo, child)) in slabs.iter().enumerate() {
                let hi = slabs.get(i + 1).map(|s| s.0);
                let r = extract(rest, child, label);
                if r.is_empty() {
                    continue;
                }
                match cells.last_mut() {
                    Some((iv, inner)) if iv.hi == Some(*lo) && *inner == r => iv.hi = hi,
                    _ => cells.push((Interval { lo: *lo, hi }, r)),
                }
            }
            Region::Slabs(cells)
        }
    }
}

/// Partitioning over a product of ordered axes.
///
/// Starting from a constant map labelled by the group of the
/// lexicographically least sample, the first axis is swept as in
/// [`partition_intervals`]; at each sample column the remaining axes are
/// partitioned recursively on top of the labelling inherited from the left.
/// At arity one this is exactly the interval sweep.
pub fn partition_product(alg: &Algebra, groups: &[Vec<Char>]) -> Result<Vec<Predicate>> {
    let axes = alg.axes().ok_or_else(|| {
        Error::KindMismatch("product partitioning needs an interval algebra".into())
    })?;
    check_samples(alg, groups)?;
    let mut samples: Vec<(&[Scalar], usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(i, g)| g.iter().map(move |c| (c.scalars(), i)))
        .collect();
    samples.sort();
    samples.dedup();
    let base = LabelMap::Leaf(samples[0].1);
    let map = overlay(axes, &base, &mut samples);
    Ok((0..groups.len())
        .map(|l| Predicate::Boxes(extract(axes, &map, l)))
        .collect())
}

/// Equality partitioning: every group gets the set of its own samples,
/// except the group holding the largest sample, which also takes everything
/// unsampled.
pub fn partition_equality(alg: &Algebra, groups: &[Vec<Char>]) -> Result<Vec<Predicate>> {
    if !matches!(alg, Algebra::Equality { .. }) {
        return Err(Error::KindMismatch(
            "equality partitioning needs the equality algebra".into(),
        ));
    }
    check_samples(alg, groups)?;
    let sets: Vec<BTreeSet<u64>> = groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|c| match c.scalars()[0] {
                    Scalar::Sym(s) => s,
                    _ => unreachable!("checked by check_samples"),
                })
                .collect()
        })
        .collect();
    let first = sets
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.last().map(|&m| (m, i)))
        .max()
        .map(|(_, i)| i)
        .expect("checked non-empty");
    let others: BTreeSet<u64> = sets
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != first)
        .flat_map(|(_, s)| s.iter().copied())
        .collect();
    sets.into_iter()
        .enumerate()
        .map(|(i, s)| {
            if i == first {
                alg.eq_set(EqSet::Cofinite(others.clone()))
            } else {
                alg.eq_set(EqSet::Finite(s))
            }
        })
        .collect()
}
