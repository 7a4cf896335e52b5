//! Benchmark targets: the small worked example, the MH and ATGS controller
//! models, the `M(n,k)` lower-bound family and random interval automata.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{na, Algebra, Axis, Char, Interval, Predicate};
use crate::automata::SMealy;
use crate::error::{Error, Result};
use crate::partition::partition_intervals;

fn nat_iv(lo: u64, hi: Option<u64>) -> Interval {
    Interval::nat(lo, hi).expect("static interval")
}

fn nat_pred(ivs: &[(u64, Option<u64>)]) -> Predicate {
    let ivs: Vec<Interval> = ivs.iter().map(|&(l, h)| nat_iv(l, h)).collect();
    Algebra::naturals()
        .from_intervals(&ivs)
        .expect("static predicate")
}

/// The four-state target used to illustrate the learner step by step.
pub fn make_worked_example() -> SMealy {
    let t = |from, lo, hi, to, out: &str| (from, nat_pred(&[(lo, hi)]), to, out.to_string());
    SMealy::new_valid(
        Algebra::naturals(),
        4,
        0,
        vec!["S".into(), "B".into(), "P".into()],
        vec![
            t(0, 0, Some(20), 1, "S"),
            t(0, 20, None, 0, "B"),
            t(1, 0, Some(20), 2, "S"),
            t(1, 20, None, 1, "B"),
            t(2, 10, None, 1, "P"),
            t(2, 0, Some(10), 3, "P"),
            t(3, 0, None, 0, "P"),
        ],
    )
    .expect("worked example is valid")
}

pub fn mh_algebra() -> Algebra {
    Algebra::product(vec![
        Axis::nat_range(0, Some(2)).expect("static axis"),
        Axis::real_range(0.0, Some(1e5)).expect("static axis"),
        Axis::real_range(-274.0, Some(1e4)).expect("static axis"),
        Axis::real_range(0.0, Some(na(1.0))).expect("static axis"),
    ])
    .expect("static algebra")
}

/// Helicopter controller over (prepareFlight, altitude, temperature, charge).
pub fn make_mh() -> SMealy {
    let alg = mh_algebra();
    type MhBox = ((u64, u64), (f64, f64), (f64, f64), (f64, f64));
    let guard = |boxes: &[MhBox]| -> Predicate {
        let boxes: Vec<Vec<Interval>> = boxes
            .iter()
            .map(|&(b, alt, temp, charge)| {
                vec![
                    nat_iv(b.0, Some(b.1)),
                    Interval::real(alt.0, Some(alt.1)).expect("static interval"),
                    Interval::real(temp.0, Some(temp.1)).expect("static interval"),
                    Interval::real(charge.0, Some(charge.1)).expect("static interval"),
                ]
            })
            .collect();
        alg.from_boxes(&boxes).expect("static guard")
    };
    let (alt, full_t, full_c) = ((0.0, 1e5), (-274.0, 1e4), (0.0, na(1.0)));
    let (off, on, any) = ((0, 1), (1, 2), (0, 2));
    let none = "∅".to_string();
    let heater = "{heater}".to_string();
    let fly = "{fly}".to_string();
    let fly_ref = "{fly,altitudeRef}".to_string();
    let trans = vec![
        (
            0,
            guard(&[
                (on, alt, (-15.0, 1e4), (0.0, na(0.4))),
                (off, alt, (-15.0, 1e4), full_c),
            ]),
            0,
            none.clone(),
        ),
        (
            0,
            guard(&[(on, alt, (-15.0, 1e4), (na(0.4), na(1.0)))]),
            2,
            heater.clone(),
        ),
        (
            0,
            guard(&[(any, alt, (-274.0, -15.0), full_c)]),
            1,
            heater.clone(),
        ),
        (
            1,
            guard(&[(any, alt, (-274.0, na(-10.0)), (0.2, na(1.0)))]),
            1,
            heater.clone(),
        ),
        (
            1,
            guard(&[
                (any, alt, (na(-10.0), 1e4), full_c),
                (any, alt, (-274.0, na(-10.0)), (0.0, 0.2)),
            ]),
            0,
            none.clone(),
        ),
        (
            2,
            guard(&[(on, alt, (-274.0, na(10.0)), (0.3, na(1.0)))]),
            2,
            heater.clone(),
        ),
        (
            2,
            guard(&[(on, alt, (na(10.0), 1e4), (0.3, na(1.0)))]),
            3,
            fly_ref.clone(),
        ),
        (
            2,
            guard(&[(off, alt, full_t, full_c), (on, alt, full_t, (0.0, 0.3))]),
            0,
            none.clone(),
        ),
        (
            3,
            guard(&[(on, alt, full_t, (0.3, na(1.0)))]),
            3,
            fly_ref.clone(),
        ),
        (
            3,
            guard(&[(off, alt, full_t, full_c), (on, alt, full_t, (0.0, 0.3))]),
            4,
            fly.clone(),
        ),
        (
            4,
            guard(&[(any, (0.1, 1e5), full_t, full_c)]),
            4,
            fly.clone(),
        ),
        (
            4,
            guard(&[(any, (0.0, 0.1), full_t, full_c)]),
            0,
            none.clone(),
        ),
    ];
    SMealy::new_valid(alg, 5, 0, vec![none, heater, fly, fly_ref], trans).expect("MH is valid")
}

pub fn atgs_algebra() -> Algebra {
    Algebra::product(vec![
        Axis::real_range(0.0, Some(100.0)).expect("static axis"),
        Axis::real_range(0.0, Some(1e6)).expect("static axis"),
    ])
    .expect("static algebra")
}

/// State names of the gear-shift model, in state-index order.
pub const ATGS_STATES: [&str; 16] = [
    "q100", "q101", "q102", "q200", "q201", "q202", "q210", "q220", "q300", "q301", "q302", "q310",
    "q320", "q400", "q410", "q420",
];

/// Automatic gear shift over (throttle, velocity).
pub fn make_atgs() -> SMealy {
    let alg = atgs_algebra();
    let guard = |boxes: &[(f64, f64, f64, f64)]| -> Predicate {
        let boxes: Vec<Vec<Interval>> = boxes
            .iter()
            .map(|&(t0, t1, v0, v1)| {
                vec![
                    Interval::real(t0, Some(t1)).expect("static interval"),
                    Interval::real(v0, Some(v1)).expect("static interval"),
                ]
            })
            .collect();
        alg.from_boxes(&boxes).expect("static guard")
    };
    let top = 1e6;
    let up1_strict = [
        (50.0, 90.0, na(23.0), top),
        (0.0, 35.0, na(10.0), top),
        (35.0, 50.0, na(15.0), top),
        (90.0, 100.0, na(40.0), top),
    ];
    let stay1 = [
        (50.0, 90.0, 0.0, na(23.0)),
        (0.0, 35.0, 0.0, na(10.0)),
        (35.0, 50.0, 0.0, na(15.0)),
        (90.0, 100.0, 0.0, na(40.0)),
    ];
    let up1 = [
        (50.0, 90.0, 23.0, top),
        (0.0, 35.0, 10.0, top),
        (35.0, 50.0, 15.0, top),
        (90.0, 100.0, 40.0, top),
    ];
    let back1 = [
        (50.0, 90.0, 0.0, 23.0),
        (0.0, 35.0, 0.0, 10.0),
        (35.0, 50.0, 0.0, 15.0),
        (90.0, 100.0, 0.0, 40.0),
    ];
    let up2_strict = [
        (50.0, 90.0, na(41.0), top),
        (0.0, 50.0, na(30.0), top),
        (90.0, 100.0, na(70.0), top),
    ];
    let stay2 = [
        (0.0, 50.0, 5.0, na(30.0)),
        (90.0, 100.0, 30.0, na(70.0)),
        (50.0, 90.0, 5.0, na(41.0)),
    ];
    let down2 = [(0.0, 90.0, 0.0, 5.0), (90.0, 100.0, 0.0, 30.0)];
    let up2 = [
        (50.0, 90.0, 41.0, top),
        (0.0, 50.0, 30.0, top),
        (90.0, 100.0, 70.0, top),
    ];
    let back2 = [
        (50.0, 90.0, 0.0, 41.0),
        (0.0, 50.0, 0.0, 30.0),
        (90.0, 100.0, 0.0, 70.0),
    ];
    let low2 = [(0.0, 90.0, 0.0, na(5.0)), (90.0, 100.0, 0.0, na(30.0))];
    let high2 = [(0.0, 90.0, na(5.0), top), (90.0, 100.0, na(30.0), top)];
    let up3_strict = [
        (50.0, 90.0, na(60.0), top),
        (0.0, 50.0, na(50.0), top),
        (90.0, 100.0, na(100.0), top),
    ];
    let stay3 = [
        (0.0, 40.0, 20.0, na(50.0)),
        (90.0, 100.0, 50.0, na(100.0)),
        (40.0, 50.0, 25.0, na(50.0)),
        (50.0, 90.0, 30.0, na(60.0)),
    ];
    let down3 = [
        (0.0, 40.0, 0.0, 20.0),
        (40.0, 50.0, 0.0, 25.0),
        (50.0, 90.0, 0.0, 30.0),
        (90.0, 100.0, 0.0, 50.0),
    ];
    let up3 = [
        (50.0, 90.0, 60.0, top),
        (0.0, 50.0, 50.0, top),
        (90.0, 100.0, 100.0, top),
    ];
    let back3 = [
        (50.0, 90.0, 0.0, 60.0),
        (0.0, 50.0, 0.0, 50.0),
        (90.0, 100.0, 0.0, 100.0),
    ];
    let low3 = [
        (0.0, 40.0, 0.0, na(20.0)),
        (40.0, 50.0, 0.0, na(25.0)),
        (50.0, 90.0, 0.0, na(30.0)),
        (90.0, 100.0, 0.0, na(50.0)),
    ];
    let high3 = [
        (0.0, 40.0, na(20.0), top),
        (40.0, 50.0, na(25.0), top),
        (50.0, 90.0, na(30.0), top),
        (90.0, 100.0, na(50.0), top),
    ];
    let down4 = [
        (0.0, 40.0, 0.0, 35.0),
        (40.0, 50.0, 0.0, 40.0),
        (50.0, 90.0, 0.0, 50.0),
        (90.0, 100.0, 0.0, 80.0),
    ];
    let stay4 = [
        (0.0, 40.0, 35.0, top),
        (40.0, 50.0, 40.0, top),
        (50.0, 90.0, 50.0, top),
        (90.0, 100.0, 80.0, top),
    ];
    let high4 = [
        (0.0, 40.0, na(35.0), top),
        (40.0, 50.0, na(40.0), top),
        (50.0, 90.0, na(50.0), top),
        (90.0, 100.0, na(80.0), top),
    ];
    let low4 = [
        (0.0, 40.0, 0.0, na(35.0)),
        (40.0, 50.0, 0.0, na(40.0)),
        (50.0, 90.0, 0.0, na(50.0)),
        (90.0, 100.0, 0.0, na(80.0)),
    ];

    let id = |name: &str| {
        ATGS_STATES
            .iter()
            .position(|s| *s == name)
            .expect("known state")
    };
    type Edge<'a> = (&'a str, &'a [(f64, f64, f64, f64)], &'a str);
    let table: Vec<Edge> = vec![
        ("q100", &stay1, "q100"),
        ("q100", &up1_strict, "q101"),
        ("q101", &up1, "q102"),
        ("q101", &back1, "q100"),
        ("q102", &up1, "q200"),
        ("q102", &back1, "q100"),
        ("q200", &up2_strict, "q201"),
        ("q200", &stay2, "q200"),
        ("q200", &down2, "q210"),
        ("q201", &up2, "q202"),
        ("q201", &back2, "q200"),
        ("q210", &low2, "q220"),
        ("q210", &high2, "q200"),
        ("q220", &high2, "q200"),
        ("q220", &low2, "q100"),
        ("q202", &back2, "q200"),
        ("q202", &up2, "q300"),
        ("q300", &up3_strict, "q301"),
        ("q300", &stay3, "q300"),
        ("q300", &down3, "q310"),
        ("q301", &up3, "q302"),
        ("q301", &back3, "q300"),
        ("q310", &low3, "q320"),
        ("q310", &high3, "q300"),
        ("q320", &low3, "q200"),
        ("q320", &high3, "q300"),
        ("q302", &back3, "q300"),
        ("q302", &up3, "q400"),
        ("q400", &down4, "q410"),
        ("q400", &stay4, "q400"),
        ("q410", &high4, "q400"),
        ("q410", &low4, "q420"),
        ("q420", &low4, "q300"),
        ("q420", &high4, "q400"),
    ];
    let trans = table
        .into_iter()
        .map(|(from, boxes, to)| {
            let gear = format!("gear{}", &to[1..2]);
            (id(from), guard(boxes), id(to), gear)
        })
        .collect();
    let gears = (1..=4).map(|g| format!("gear{g}")).collect();
    SMealy::new_valid(alg, 16, 0, gears, trans).expect("ATGS is valid")
}

/// The lower-bound family `M(n,k)` with `2n` states over the naturals.
///
/// States form a spine `q0 → q1 → … → q(2n-1)` on `[0,10)`. Every state
/// loops on the blocks `[10l, 10l+10)` (the last one unbounded) with output
/// `l`, except that each even state `q(2m)` with `m ≥ 1` answers `-1` on its
/// own block `m`. The last state also loops on `[0,10)`.
pub fn make_lower_bound(n: usize, k: usize) -> Result<SMealy> {
    if n < 2 || k < n {
        return Err(Error::InvalidSpec(format!(
            "M(n,k) needs n >= 2 and k >= n, got ({n},{k})"
        )));
    }
    let block = |l: usize| -> Predicate {
        let lo = 10 * l as u64;
        let hi = if l + 1 == k { None } else { Some(lo + 10) };
        nat_pred(&[(lo, hi)])
    };
    let outputs: Vec<String> = std::iter::once("-1".to_string())
        .chain((0..k).map(|l| l.to_string()))
        .collect();
    let last = 2 * n - 1;
    let mut trans = Vec::new();
    for q in 0..2 * n {
        if q < last {
            trans.push((q, block(0), q + 1, "0".to_string()));
        } else {
            trans.push((q, block(0), q, "0".to_string()));
        }
        for l in 1..k {
            let own = q % 2 == 0 && q / 2 == l;
            let out = if own { "-1".to_string() } else { l.to_string() };
            trans.push((q, block(l), q, out));
        }
    }
    SMealy::new_valid(Algebra::naturals(), 2 * n, 0, outputs, trans)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub states: usize,
    /// Intended number of essential characters, i.e. blocks per state.
    pub essential: usize,
    pub seed: u64,
    pub outputs: usize,
    /// Boundaries are drawn from `[1, max_boundary]`; `None` means `100 · essential`.
    pub max_boundary: Option<u64>,
}

impl RandomSpec {
    pub fn new(states: usize, essential: usize, seed: u64) -> Self {
        RandomSpec {
            states,
            essential,
            seed,
            outputs: 3,
            max_boundary: None,
        }
    }
}

const REDRAWS: usize = 100;

/// Random automaton over the naturals: one shared block partition from
/// `essential - 1` random boundaries, random target and output per block.
pub fn random_sma(spec: &RandomSpec) -> Result<SMealy> {
    let RandomSpec {
        states: n,
        essential: k,
        seed,
        outputs,
        ..
    } = *spec;
    if n == 0 || k == 0 || outputs == 0 {
        return Err(Error::InvalidSpec(format!(
            "need states, essential and outputs >= 1, got {spec:?}"
        )));
    }
    let range = spec.max_boundary.unwrap_or(100 * k as u64);
    if range < k as u64 - 1 {
        return Err(Error::InvalidSpec(format!(
            "cannot draw {} distinct boundaries from [1,{range}]",
            k - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bounds: Vec<u64> = sample(&mut rng, range as usize, k - 1)
        .into_iter()
        .map(|b| b as u64 + 1)
        .collect();
    bounds.sort_unstable();
    let groups: Vec<Vec<Char>> = std::iter::once(0)
        .chain(bounds)
        .map(|b| vec![Char::nat(b)])
        .collect();
    let alg = Algebra::naturals();
    let blocks = partition_intervals(&alg, &groups)?;

    let names: Vec<String> = (0..outputs).map(|o| format!("o{o}")).collect();
    let mut trans = Vec::with_capacity(n * k);
    for q in 0..n {
        let mut choice: Vec<(usize, usize)> = Vec::new();
        for _ in 0..REDRAWS {
            choice = (0..k)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..outputs)))
                .collect();
            if choice.windows(2).all(|w| w[0] != w[1]) {
                break;
            }
        }
        for (block, (to, out)) in blocks.iter().zip(choice) {
            trans.push((q, block.clone(), to, names[out].clone()));
        }
    }
    SMealy::new_valid(alg, n, 0, names, trans)
}

/// Looks up a built-in target: `worked-example`, `mh`, `atgs` or `lower:n,k`.
pub fn builtin(name: &str) -> Result<SMealy> {
    match name {
        "worked-example" => Ok(make_worked_example()),
        "mh" => Ok(make_mh()),
        "atgs" => Ok(make_atgs()),
        _ => {
            let nk = name
                .strip_prefix("lower:")
                .and_then(|rest| rest.split_once(','))
                .and_then(|(n, k)| Some((n.trim().parse().ok()?, k.trim().parse().ok()?)));
            match nk {
                Some((n, k)) => make_lower_bound(n, k),
                None => Err(Error::InvalidSpec(format!("unknown benchmark {name}"))),
            }
        }
    }
}
