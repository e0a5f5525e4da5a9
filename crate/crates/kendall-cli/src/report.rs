//! Output artifacts: CSV tables and JSON reports with stable formatting, so
//! identical runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Row key of an output table: an epoch index or a grid point.
#[derive(Debug, Clone, Copy)]
pub enum XValue {
    Index(u32),
    Point(f64),
}

impl XValue {
    fn render(&self) -> String {
        match *self {
            XValue::Index(n) => n.to_string(),
            XValue::Point(t) => format_value(t),
        }
    }

    fn to_json(self) -> Value {
        match self {
            XValue::Index(n) => Value::from(n),
            XValue::Point(t) => Value::from(t),
        }
    }
}

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|source| CliError::Output { path: path.display().to_string(), source }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// CSV with header `x,value` or `x,value,std_error`.
pub fn render_csv(xs: &[XValue], values: &[f64], std_errors: Option<&[f64]>) -> String {
    let mut out = String::new();
    match std_errors {
        Some(ses) => {
            out.push_str("x,value,std_error\n");
            for ((x, v), se) in xs.iter().zip(values).zip(ses) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    x.render(),
                    format_value(*v),
                    format_value(*se)
                ));
            }
        }
        None => {
            out.push_str("x,value\n");
            for (x, v) in xs.iter().zip(values) {
                out.push_str(&format!("{},{}\n", x.render(), format_value(*v)));
            }
        }
    }
    out
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// JSON artifact of an eval run.
#[derive(Serialize)]
pub struct EvalReport {
    pub statistic: String,
    pub law: String,
    pub alpha: f64,
    pub params: BTreeMap<String, Value>,
    pub grid: Vec<Value>,
    pub analytic: Vec<f64>,
    /// Present (and true) only when a closed form was bypassed for the
    /// recurrence somewhere on the grid.
    #[serde(skip_serializing_if = "is_false")]
    pub fallback: bool,
}

/// JSON artifact of a simulate run.
#[derive(Serialize)]
pub struct SimulateReport {
    pub statistic: String,
    pub law: String,
    pub alpha: f64,
    pub params: BTreeMap<String, Value>,
    pub grid: Vec<Value>,
    pub empirical: Vec<f64>,
    pub std_error: Vec<f64>,
}

/// JSON artifact of a compare run. Key order is fixed; `ks` is null for
/// statistics that are not distribution functions of the grid variable.
#[derive(Serialize)]
pub struct ComparisonReport {
    pub statistic: String,
    pub law: String,
    pub alpha: f64,
    pub params: BTreeMap<String, Value>,
    pub grid: Vec<Value>,
    pub analytic: Vec<f64>,
    pub empirical: Vec<f64>,
    pub std_error: Vec<f64>,
    pub max_abs_err: f64,
    pub max_z: f64,
    pub ks: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub fallback: bool,
}

pub fn grid_json(xs: &[XValue]) -> Vec<Value> {
    xs.iter().map(|x| x.to_json()).collect()
}

pub fn render_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize infallibly");
    s.push('\n');
    s
}
