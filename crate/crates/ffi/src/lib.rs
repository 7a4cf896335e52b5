//! C interface to `smealy`.
//!
//! Automata are opaque handles released with [`smealy_automaton_free`].
//! Strings returned through out-parameters are owned by the caller and
//! released with [`smealy_string_free`]. Every fallible call returns a
//! [`SmealyStatus`]; on failure [`smealy_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use smealy::automata::{from_json, to_dot, to_json, word_from_json, Equivalence, SMealy};
use smealy::bench::{builtin, random_sma, RandomSpec};
use smealy::learner::{learn, LearnConfig, NoMonitor};
use smealy::oracle::{EquivMode, SimulatedTeacher};
use smealy::partition::SweepPartitioner;
use smealy::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmealyStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    LearningFailed = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmealyOracle {
    Lexmin = 0,
    Random = 1,
}

/// Statistics of one learning run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SmealyStats {
    pub eq_queries: u64,
    pub output_queries: u64,
    pub sigma_e: u64,
    pub s_size: u64,
    pub r_size: u64,
    pub e_size: u64,
    pub max_cex_len: u64,
    pub runtime_us: u64,
}

/// Opaque automaton handle.
pub struct SmealyAutomaton {
    inner: SMealy,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SmealyStatus {
    match e {
        Error::Parse(_) => SmealyStatus::Parse,
        Error::Io(_) => SmealyStatus::Io,
        Error::OracleAssumptionViolation(_)
        | Error::CapExceeded(_)
        | Error::Script(_)
        | Error::Precondition(_) => SmealyStatus::LearningFailed,
        _ => SmealyStatus::InvalidInput,
    }
}

struct Fail(SmealyStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SmealyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SmealyStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SmealyStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SmealyStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid nul-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SmealyStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or a handle from this library that has not been freed.
unsafe fn read_handle<'a>(p: *const SmealyAutomaton, what: &str) -> Result<&'a SMealy, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put_handle(out: *mut *mut SmealyAutomaton, m: SMealy) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(SmealyAutomaton { inner: m }));
    Ok(())
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s)
        .map_err(|_| Fail(SmealyStatus::InvalidInput, "string contains nul".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn smealy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and validates an automaton in the JSON file format.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_from_json(
    json: *const c_char,
    out: *mut *mut SmealyAutomaton,
) -> SmealyStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        put_handle(out, from_json(text)?)
    })
}

/// Built-in target: `worked-example`, `mh`, `atgs` or `lower:n,k`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_builtin(
    name: *const c_char,
    out: *mut *mut SmealyAutomaton,
) -> SmealyStatus {
    guard(|| put_handle(out, builtin(read_str(name, "name")?)?))
}

/// Random interval automaton with three outputs.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_random(
    states: usize,
    essential: usize,
    seed: u64,
    out: *mut *mut SmealyAutomaton,
) -> SmealyStatus {
    guard(|| put_handle(out, random_sma(&RandomSpec::new(states, essential, seed))?))
}

/// # Safety
/// `a` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_free(a: *mut SmealyAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn smealy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `a` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_state_count(a: *const SmealyAutomaton) -> usize {
    a.as_ref().map_or(0, |h| h.inner.states())
}

/// Number of transitions, or 0 for a null handle.
///
/// # Safety
/// `a` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_transition_count(a: *const SmealyAutomaton) -> usize {
    a.as_ref().map_or(0, |h| h.inner.transitions().len())
}

/// # Safety
/// `a` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_to_json(
    a: *const SmealyAutomaton,
    out: *mut *mut c_char,
) -> SmealyStatus {
    guard(|| put_string(out, to_json(read_handle(a, "automaton")?)?))
}

/// # Safety
/// `a` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_to_dot(
    a: *const SmealyAutomaton,
    out: *mut *mut c_char,
) -> SmealyStatus {
    guard(|| put_string(out, to_dot(read_handle(a, "automaton")?)))
}

/// Output on a word given as a JSON array, e.g. `[0, 20]` or `[[0, 1.5]]`.
///
/// # Safety
/// `a` must be a live handle, `word_json` a nul-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_run(
    a: *const SmealyAutomaton,
    word_json: *const c_char,
    out: *mut *mut c_char,
) -> SmealyStatus {
    guard(|| {
        let m = read_handle(a, "automaton")?;
        let w = word_from_json(m.algebra(), read_str(word_json, "word")?)?;
        put_string(out, m.run(&w)?.to_string())
    })
}

/// Sets `*out_equal`; when the automata differ and `out_witness` is not
/// null, also stores a distinguishing word as a JSON array.
///
/// # Safety
/// `a` and `b` must be live handles; `out_equal` must be valid for writes;
/// `out_witness` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_automaton_equivalent(
    a: *const SmealyAutomaton,
    b: *const SmealyAutomaton,
    out_equal: *mut bool,
    out_witness: *mut *mut c_char,
) -> SmealyStatus {
    guard(|| {
        let (ma, mb) = (read_handle(a, "a")?, read_handle(b, "b")?);
        if out_equal.is_null() {
            return Err(null("out_equal"));
        }
        match ma.symbolic_equiv(mb)? {
            Equivalence::Equal => *out_equal = true,
            Equivalence::Mismatch(w) => {
                *out_equal = false;
                if !out_witness.is_null() {
                    let chars: Vec<String> = w
                        .iter()
                        .map(|c| match c.arity() {
                            1 => json_scalar(c.scalars()[0]),
                            _ => format!(
                                "[{}]",
                                c.scalars()
                                    .iter()
                                    .map(|&s| json_scalar(s))
                                    .collect::<Vec<_>>()
                                    .join(",")
                            ),
                        })
                        .collect();
                    put_string(out_witness, format!("[{}]", chars.join(",")))?;
                }
            }
        }
        Ok(())
    })
}

fn json_scalar(s: smealy::algebra::Scalar) -> String {
    use smealy::algebra::Scalar;
    match s {
        Scalar::Nat(n) | Scalar::Sym(n) => n.to_string(),
        Scalar::Real(r) => format!("{:?}", r.get()),
    }
}

/// Learns `target` from a simulated teacher. `out_stats` may be null.
///
/// # Safety
/// `target` must be a live handle; `out_learned` must be valid for writes;
/// `out_stats` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn smealy_learn(
    target: *const SmealyAutomaton,
    oracle: SmealyOracle,
    seed: u64,
    out_learned: *mut *mut SmealyAutomaton,
    out_stats: *mut SmealyStats,
) -> SmealyStatus {
    guard(|| {
        let tgt = read_handle(target, "target")?;
        if out_learned.is_null() {
            return Err(null("out_learned"));
        }
        let mode = match oracle {
            SmealyOracle::Lexmin => EquivMode::Lexmin,
            SmealyOracle::Random => EquivMode::Random(seed),
        };
        let mut teacher = SimulatedTeacher::new(tgt.clone(), mode)?;
        let (m, s) = learn(
            &mut teacher,
            tgt.algebra(),
            &SweepPartitioner,
            &LearnConfig::default(),
            &mut NoMonitor,
        )?;
        if let Some(st) = out_stats.as_mut() {
            *st = SmealyStats {
                eq_queries: s.eq_queries as u64,
                output_queries: s.output_queries as u64,
                sigma_e: s.sigma_e as u64,
                s_size: s.s_size as u64,
                r_size: s.r_size as u64,
                e_size: s.e_size as u64,
                max_cex_len: s.max_cex_len as u64,
                runtime_us: s.wall_time.as_micros() as u64,
            };
        }
        put_handle(out_learned, m)
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn smealy_status_name(status: SmealyStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SmealyStatus::Ok => c"ok",
        SmealyStatus::NullArgument => c"null argument",
        SmealyStatus::InvalidUtf8 => c"invalid utf-8",
        SmealyStatus::Parse => c"parse error",
        SmealyStatus::InvalidInput => c"invalid input",
        SmealyStatus::LearningFailed => c"learning failed",
        SmealyStatus::Io => c"i/o error",
        SmealyStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
