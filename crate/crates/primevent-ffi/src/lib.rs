//! C ABI over the detection pipeline.
//!
//! The interface follows the usual handle conventions: `pv_config_new`
//! and `pv_detect` hand ownership to the caller, who releases it with
//! the matching `pv_*_free`; strings returned by `pv_events_to_json`
//! are released with `pv_string_free`. Every fallible call returns a
//! [`PvStatus`]; on failure `pv_last_error` holds a message for the
//! calling thread until its next failing call. `pv_version` and
//! `pv_last_error` return library-owned storage that must not be freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use primevent::pipeline::{analyze, event_reports, load_inputs, PipelineConfig};
use primevent::volatility::PviMode;

/// Opaque pipeline-configuration handle.
pub struct PvConfig(PipelineConfig);

/// Opaque detection result: the ranked events of one run.
pub struct PvEvents {
    spans: Vec<(usize, usize)>,
    scores: Vec<f64>,
    json: CString,
}

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was malformed or out of range; see `pv_last_error`.
    InvalidArgument = 2,
    /// An input file could not be read or parsed; see `pv_last_error`.
    ParseFailed = 3,
    /// The analysis itself failed; see `pv_last_error`.
    RunFailed = 4,
    /// An event index was past `pv_events_len`.
    IndexOutOfRange = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl std::fmt::Display) -> PvStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
    PvStatus::InvalidArgument
}

/// Renders an error with its full source chain on one line.
fn render_chain(err: &dyn std::error::Error) -> String {
    let mut text = err.to_string();
    let mut source = err.source();
    while let Some(cause) = source {
        text.push_str(": ");
        text.push_str(&cause.to_string());
        source = cause.source();
    }
    text
}

/// The message of the calling thread's most recent failure, empty if
/// none. Library-owned; valid until the thread's next failing call.
#[no_mangle]
pub extern "C" fn pv_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The library version as a static string. Never freed by the caller.
#[no_mangle]
pub extern "C" fn pv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Allocates a configuration with the documented defaults. Release with
/// `pv_config_free`.
#[no_mangle]
pub extern "C" fn pv_config_new() -> *mut PvConfig {
    Box::into_raw(Box::new(PvConfig(PipelineConfig::default())))
}

/// Releases a configuration handle. A null handle is a no-op.
///
/// # Safety
/// `config` must be null or a pointer obtained from `pv_config_new`
/// that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn pv_config_free(config: *mut PvConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets one configuration key from its string representation. Keys are
/// the flat JSON config keys (`burst_threshold`, `volatility_horizon`,
/// `pvi_bins`, `pvi_mode`, `topic_size_cap`, `kmax`, `kmeans_restarts`,
/// `sigma`, `tau`, `seed`, `baseline`). Rejected values leave the
/// configuration unchanged.
///
/// # Safety
/// `config` must be a live handle from `pv_config_new`; `key` and
/// `value` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn pv_config_set(
    config: *mut PvConfig,
    key: *const c_char,
    value: *const c_char,
) -> PvStatus {
    if config.is_null() || key.is_null() || value.is_null() {
        return PvStatus::NullPointer;
    }
    let (key, value) = match (CStr::from_ptr(key).to_str(), CStr::from_ptr(value).to_str()) {
        (Ok(k), Ok(v)) => (k, v),
        _ => return set_error("key and value must be valid UTF-8"),
    };
    let config = &mut (*config).0;
    let mut candidate = config.clone();
    macro_rules! parse {
        ($field:ident) => {
            match value.parse() {
                Ok(parsed) => candidate.$field = parsed,
                Err(_) => return set_error(format!("cannot parse '{value}' for {key}")),
            }
        };
    }
    match key {
        "burst_threshold" => parse!(burst_threshold),
        "volatility_horizon" => parse!(volatility_horizon),
        "pvi_bins" => parse!(pvi_bins),
        "pvi_mode" => match value.parse::<PviMode>() {
            Ok(mode) => candidate.pvi_mode = mode,
            Err(e) => return set_error(render_chain(&e)),
        },
        "topic_size_cap" => parse!(topic_size_cap),
        "kmax" => parse!(kmax),
        "kmeans_restarts" => parse!(kmeans_restarts),
        "sigma" => parse!(sigma),
        "tau" => parse!(tau),
        "seed" => parse!(seed),
        "baseline" => parse!(baseline),
        _ => return set_error(format!("unknown configuration key '{key}'")),
    }
    if let Err(e) = candidate.validate() {
        return set_error(render_chain(&e));
    }
    *config = candidate;
    PvStatus::Ok
}

/// Runs detection over a document stream (JSONL) and an index series
/// (CSV) and stores a result handle in `out`. The caller owns the
/// handle and releases it with `pv_events_free`.
///
/// # Safety
/// `config` must be a live handle from `pv_config_new`; `docs_path` and
/// `index_path` must be NUL-terminated paths; `out` must point at
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pv_detect(
    config: *const PvConfig,
    docs_path: *const c_char,
    index_path: *const c_char,
    out: *mut *mut PvEvents,
) -> PvStatus {
    if config.is_null() || docs_path.is_null() || index_path.is_null() || out.is_null() {
        return PvStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let (docs, index) = match (
        CStr::from_ptr(docs_path).to_str(),
        CStr::from_ptr(index_path).to_str(),
    ) {
        (Ok(d), Ok(i)) => (d, i),
        _ => return set_error("paths must be valid UTF-8"),
    };
    let inputs = match load_inputs(Path::new(docs), Path::new(index)) {
        Ok(inputs) => inputs,
        Err(e) => {
            set_error(render_chain(&e));
            return PvStatus::ParseFailed;
        }
    };
    let analysis = match analyze(&inputs.corpus, &inputs.index, &(*config).0) {
        Ok(analysis) => analysis,
        Err(e) => {
            set_error(render_chain(&e));
            return PvStatus::RunFailed;
        }
    };
    let reports = event_reports(&analysis, &inputs.corpus);
    let json = match serde_json::to_string(&reports) {
        Ok(json) => CString::new(json).unwrap_or_default(),
        Err(e) => {
            set_error(render_chain(&e));
            return PvStatus::RunFailed;
        }
    };
    let events = PvEvents {
        spans: analysis.events.iter().map(|e| (e.begin, e.end)).collect(),
        scores: analysis.events.iter().map(|e| e.score).collect(),
        json,
    };
    *out = Box::into_raw(Box::new(events));
    PvStatus::Ok
}

/// Number of detected events, ranked by score descending.
///
/// # Safety
/// `events` must be a live handle from `pv_detect`; null returns 0.
#[no_mangle]
pub unsafe extern "C" fn pv_events_len(events: *const PvEvents) -> usize {
    if events.is_null() {
        0
    } else {
        let events = &*events;
        events.scores.len()
    }
}

/// Stores the score of the event at `rank` (0-based) in `score`.
///
/// # Safety
/// `events` must be a live handle from `pv_detect`; `score` must point
/// at writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn pv_events_score(
    events: *const PvEvents,
    rank: usize,
    score: *mut f64,
) -> PvStatus {
    if events.is_null() || score.is_null() {
        return PvStatus::NullPointer;
    }
    let events = &*events;
    match events.scores.get(rank) {
        Some(&value) => {
            *score = value;
            PvStatus::Ok
        }
        None => PvStatus::IndexOutOfRange,
    }
}

/// Stores the inclusive window span of the event at `rank` (0-based).
///
/// # Safety
/// `events` must be a live handle from `pv_detect`; `begin` and `end`
/// must point at writable storage for one size each.
#[no_mangle]
pub unsafe extern "C" fn pv_events_window_span(
    events: *const PvEvents,
    rank: usize,
    begin: *mut usize,
    end: *mut usize,
) -> PvStatus {
    if events.is_null() || begin.is_null() || end.is_null() {
        return PvStatus::NullPointer;
    }
    let events = &*events;
    match events.spans.get(rank) {
        Some(&(b, e)) => {
            *begin = b;
            *end = e;
            PvStatus::Ok
        }
        None => PvStatus::IndexOutOfRange,
    }
}

/// Returns the full ranked report as a JSON array — the same content
/// the command-line `run` writes to `events.json`. The caller owns the
/// string and releases it with `pv_string_free`; null on a null handle.
///
/// # Safety
/// `events` must be null or a live handle from `pv_detect`.
#[no_mangle]
pub unsafe extern "C" fn pv_events_to_json(events: *const PvEvents) -> *mut c_char {
    if events.is_null() {
        return ptr::null_mut();
    }
    let events = &*events;
    events.json.clone().into_raw()
}

/// Releases a string returned by `pv_events_to_json`. Null is a no-op.
///
/// # Safety
/// `string` must be null or a pointer obtained from this library's
/// string-returning calls, not freed already.
#[no_mangle]
pub unsafe extern "C" fn pv_string_free(string: *mut c_char) {
    if !string.is_null() {
        drop(CString::from_raw(string));
    }
}

/// Releases a result handle. A null handle is a no-op.
///
/// # Safety
/// `events` must be null or a pointer obtained from `pv_detect` that
/// has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn pv_events_free(events: *mut PvEvents) {
    if !events.is_null() {
        drop(Box::from_raw(events));
    }
}
