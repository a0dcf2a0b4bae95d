//! The `zassenhaus` command: term table and error-scaling CSV.

use std::fmt::Write as _;
use std::path::Path;

use exchange_lab_core::zassenhaus::{error_table, log_grid, zassenhaus_terms, ErrorTable, Scenario};

use crate::error::LabError;
use crate::output::{emit, number};

pub const CSV_HEADER: &str = "t,error_order2,error_order3,error_order4,slope_order2,slope_order3,slope_order4";

/// Grid of the slope fits.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-3, 1e-1, 9)
}

pub fn term_table(order: usize) -> Result<String, LabError> {
    let e = zassenhaus_terms(order).map_err(LabError::schema)?;
    let mut out = String::from("order,coefficient,word\n");
    for t in &e.terms {
        for w in &t.words {
            writeln!(out, "{},{},{}", t.order, w.coefficient, w.word).expect("writing to a String");
        }
    }
    Ok(out)
}

pub fn table_csv(table: &ErrorTable) -> String {
    let slope = |s: Option<f64>| s.map_or_else(|| "nan".to_string(), number);
    let slopes: Vec<String> = table.slopes.iter().map(|&s| slope(s)).collect();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (t, e) in table.t.iter().zip(&table.errors) {
        let cells = [number(*t), number(e[0]), number(e[1]), number(e[2])];
        writeln!(out, "{},{}", cells.join(","), slopes.join(",")).expect("writing to a String");
    }
    out
}

pub fn cmd_zassenhaus(order: usize, scenario: &str, out: Option<&Path>) -> Result<(), LabError> {
    let scenario = Scenario::from_name(scenario).ok_or_else(|| {
        let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
        LabError::Schema(format!("unknown scenario {scenario:?}; expected one of {}", names.join(", ")))
    })?;
    let terms = term_table(order)?;
    let table = error_table(scenario, &default_grid()).map_err(LabError::Numeric)?;
    let csv = table_csv(&table);
    match out {
        Some(path) => {
            emit(&terms, None)?;
            emit(&csv, Some(path))
        }
        None => emit(&format!("{terms}\n{csv}"), None),
    }
}
