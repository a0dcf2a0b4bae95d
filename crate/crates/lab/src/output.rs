//! CSV and JSON serialization of time series.
//!
//! CSV numbers use 17 significant digits in exponent form; JSON numbers use
//! the shortest representation that parses back to the same `f64`. Lines end
//! in `\n` on every platform.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use exchange_lab_core::cumulant::{DELTA_E_CONVENTION, V_E_CONVENTION};
use exchange_lab_core::{CommutationClass, Method, TimeSeries};
use serde::Serialize;

use crate::config::Format;
use crate::error::LabError;

pub const CSV_HEADER: &str = "t,delta_e,v_e,chi_re,chi_im";

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn series_csv(ts: &TimeSeries) -> String {
    let mut out = String::with_capacity(96 * (ts.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..ts.len() {
        let row = [ts.t[i], ts.delta_e[i], ts.v_e[i], ts.chi[i].re, ts.chi[i].im];
        let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
        writeln!(out, "{}", cells.join(",")).expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct Conventions {
    delta_e: &'static str,
    v_e: &'static str,
}

#[derive(Serialize)]
struct SeriesJson<'a> {
    model: &'a str,
    class: &'a CommutationClass,
    method: Method,
    reference_eta: f64,
    conventions: Conventions,
    t: &'a [f64],
    delta_e: &'a [f64],
    v_e: &'a [f64],
    chi_re: Vec<f64>,
    chi_im: Vec<f64>,
}

pub fn series_json(ts: &TimeSeries) -> String {
    let doc = SeriesJson {
        model: &ts.model_name,
        class: &ts.class,
        method: ts.method,
        reference_eta: ts.reference_eta,
        conventions: Conventions { delta_e: DELTA_E_CONVENTION, v_e: V_E_CONVENTION },
        t: &ts.t,
        delta_e: &ts.delta_e,
        v_e: &ts.v_e,
        chi_re: ts.chi.iter().map(|z| z.re).collect(),
        chi_im: ts.chi.iter().map(|z| z.im).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("series serializes");
    s.push('\n');
    s
}

pub fn render(ts: &TimeSeries, format: Format) -> String {
    match format {
        Format::Csv => series_csv(ts),
        Format::Json => series_json(ts),
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), LabError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| LabError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| LabError::io("<stdout>", e))
        }
    }
}
