//! Input parsing, config merging and number formatting for the CLI.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde_json::{Map, Value};

use super::CliError;
use crate::flagcore::MatrixJson;
use crate::measures::WeightedPoints;

/// `%.12g`-style formatting; negative zero prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}"))
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn csv_line(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_num).collect::<Vec<_>>().join(",")
}

fn read_source(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(arg).map_err(|e| CliError::Input(format!("reading {arg}: {e}")))
}

/// JSON given inline (starting with `[` or `{`), as `-` for stdin, or as a
/// file path.
pub fn json_arg(arg: &str) -> Result<Value, CliError> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        read_source(arg)?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid JSON in {arg}: {e}")))
}

pub fn matrix_from_value(v: &Value, what: &str) -> Result<DMatrix<f64>, CliError> {
    let mj: MatrixJson = serde_json::from_value(v.clone())
        .map_err(|e| CliError::Input(format!("{what} must be a matrix (nested rows or flat row-major): {e}")))?;
    Ok(mj.to_matrix()?)
}

/// Parameter lookup: command-line value first, then the JSON config.
pub struct Config {
    map: Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let map = match path {
            None => Map::new(),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("reading config {}: {e}", p.display())))?;
                match serde_json::from_str(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::Input("config file must hold a JSON object".into())),
                    Err(e) => return Err(CliError::Input(format!("invalid config JSON: {e}"))),
                }
            }
        };
        Ok(Config { map })
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    pub fn f64(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Input(format!("config key '{key}' must be a number"))),
        }
    }

    pub fn usize(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|u| Some(u as usize))
                .ok_or_else(|| CliError::Input(format!("config key '{key}' must be a nonnegative integer"))),
        }
    }

    pub fn string(&self, flag: Option<String>, key: &str) -> Result<Option<String>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(CliError::Input(format!("config key '{key}' must be a string"))),
        }
    }

    pub fn vec(&self, flag: Option<Vec<f64>>, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|_| CliError::Input(format!("config key '{key}' must be an array of numbers"))),
        }
    }

    /// Matrix from a flat row-major flag value or a config entry in either
    /// JSON matrix form.
    pub fn matrix(&self, flag: Option<Vec<f64>>, key: &str) -> Result<Option<DMatrix<f64>>, CliError> {
        if let Some(flat) = flag {
            return Ok(Some(crate::linalg::square_from_row_major(&flat)?));
        }
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => matrix_from_value(v, key).map(Some),
        }
    }
}

/// Point cloud CSV: header with `x_1..x_n` and optional `mass`.
pub fn read_points_csv(path: &str) -> Result<WeightedPoints, CliError> {
    let text = read_source(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| CliError::Input(format!("{path}: {e}")))?.clone();
    let mut coord_cols = Vec::new();
    let mut mass_col = None;
    for (c, h) in headers.iter().enumerate() {
        if h == "mass" {
            mass_col = Some(c);
        } else if let Some(k) = h.strip_prefix("x_").and_then(|k| k.parse::<usize>().ok()) {
            coord_cols.push((k, c));
        } else {
            return Err(CliError::Input(format!("{path}: unexpected column '{h}'")));
        }
    }
    coord_cols.sort_unstable();
    let n = coord_cols.len();
    if n == 0 || coord_cols.iter().enumerate().any(|(i, (k, _))| *k != i + 1) {
        return Err(CliError::Input(format!("{path}: columns must be x_1..x_n")));
    }
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        let field = |c: usize| -> Result<f64, CliError> {
            rec.get(c)
                .ok_or_else(|| CliError::Input(format!("{path}: row {} is short", line + 2)))?
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("{path}: row {}: {e}", line + 2)))
        };
        let x = coord_cols.iter().map(|&(_, c)| field(c)).collect::<Result<Vec<_>, _>>()?;
        let m = match mass_col {
            Some(c) => field(c)?,
            None => 1.0,
        };
        points.push((nalgebra::DVector::from_vec(x), m));
    }
    Ok(WeightedPoints::new(n, points)?)
}

/// Sink for the main output: a file or stdout.
pub struct Output {
    path: Option<PathBuf>,
    buf: String,
}

impl Output {
    pub fn new(path: Option<PathBuf>) -> Self {
        Output { path, buf: String::new() }
    }

    pub fn line(&mut self, s: &str) {
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    pub fn json(&mut self, v: &Value) -> Result<(), CliError> {
        let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
        self.line(&s);
        Ok(())
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn finish(self) -> Result<(), CliError> {
        match &self.path {
            Some(p) => fs::write(p, &self.buf)
                .map_err(|e| CliError::Input(format!("writing {}: {e}", p.display()))),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(self.buf.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Internal(format!("writing stdout: {e}")))
            }
        }
    }
}

pub fn write_json_file(path: &Path, v: &Value) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(path, s + "\n").map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))
}
