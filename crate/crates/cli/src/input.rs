//! Loading matrices, profiles, projection families and sequences.

use std::path::Path;

use orbitkit::{
    materialize, profile_of, Complex64, DenseOperator, ProjectionFamily, RatioReference,
    SpectralProfile,
};
use serde_json::{json, Value};

use crate::CliError;

/// What an input file turned out to hold.
pub enum Input {
    Matrix(DenseOperator),
    Profile(SpectralProfile),
    Family(ProjectionFamily),
    Sequence(Vec<f64>),
}

pub fn read_input(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return parse_csv_matrix(&text)
            .map(Input::Matrix)
            .map_err(|msg| parse_err(path, msg));
    }
    let value: Value = serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?;
    classify(value).map_err(|msg| parse_err(path, msg))
}

fn parse_err(path: &Path, msg: String) -> CliError {
    CliError::Parse(format!("{}: {msg}", path.display()))
}

fn classify(value: Value) -> Result<Input, String> {
    match &value {
        Value::Array(items) if items.iter().all(Value::is_number) => Ok(Input::Sequence(
            items.iter().filter_map(Value::as_f64).collect(),
        )),
        Value::Array(_) => Err("arrays must hold numbers".into()),
        Value::Object(map) if map.contains_key("eigenvalues") => serde_json::from_value(value)
            .map(Input::Profile)
            .map_err(|e| e.to_string()),
        Value::Object(map) if map.contains_key("blocks") => {
            let dim = map
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or("family needs an integer \"dim\"")? as usize;
            let blocks: Vec<Vec<usize>> =
                serde_json::from_value(map["blocks"].clone()).map_err(|e| e.to_string())?;
            // structural problems with a family are input errors, not domain errors
            ProjectionFamily::new(dim, blocks)
                .map(Input::Family)
                .map_err(|e| e.to_string())
        }
        Value::Object(map) if map.contains_key("re") => parse_json_matrix(map).map(Input::Matrix),
        _ => Err("expected a matrix, a profile, a projection family or a number array".into()),
    }
}

fn parse_json_matrix(map: &serde_json::Map<String, Value>) -> Result<DenseOperator, String> {
    let rows = |key: &str| -> Result<Option<Vec<Vec<f64>>>, String> {
        map.get(key)
            .map(|v| serde_json::from_value(v.clone()).map_err(|e| format!("\"{key}\": {e}")))
            .transpose()
    };
    let re = rows("re")?.ok_or("matrix needs \"re\"")?;
    let dim = match map.get("dim") {
        Some(d) => d.as_u64().ok_or("\"dim\" must be a non-negative integer")? as usize,
        None => re.len(),
    };
    let im = rows("im")?.unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
    if re.len() != dim || im.len() != dim || re.iter().chain(&im).any(|r| r.len() != dim) {
        return Err(format!("matrix rows do not form a {dim}x{dim} array"));
    }
    let data = re
        .iter()
        .zip(&im)
        .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)))
        .collect();
    DenseOperator::from_row_major(dim, data).map_err(|e| e.to_string())
}

/// Rows of interleaved `re,im` pairs.
fn parse_csv_matrix(text: &str) -> Result<DenseOperator, String> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let nums = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format!("line {}: {e}", n + 1))?;
        if nums.len() % 2 != 0 {
            return Err(format!("line {}: odd number of columns", n + 1));
        }
        rows.push(
            nums.chunks(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect::<Vec<_>>(),
        );
    }
    DenseOperator::from_rows(&rows).map_err(|e| e.to_string())
}

pub fn read_matrix(path: &Path) -> Result<DenseOperator, CliError> {
    match read_input(path)? {
        Input::Matrix(m) => Ok(m),
        _ => Err(parse_err(path, "expected a matrix".into())),
    }
}

/// A profile file, or the clustered spectrum of a matrix file.
pub fn read_profile(path: &Path, tol: f64) -> Result<SpectralProfile, CliError> {
    match read_input(path)? {
        Input::Profile(p) => Ok(p),
        Input::Matrix(m) => Ok(profile_of(&m, tol)?),
        _ => Err(parse_err(
            path,
            "expected a spectral profile or a matrix".into(),
        )),
    }
}

/// Singular values of a matrix, or a number array sorted non-increasing.
pub fn read_singular_values(path: &Path) -> Result<Vec<f64>, CliError> {
    match read_input(path)? {
        Input::Matrix(m) => Ok(orbitkit::singular_values(&m)),
        Input::Sequence(mut s) => {
            s.sort_by(|a, b| b.total_cmp(a));
            Ok(s)
        }
        _ => Err(parse_err(
            path,
            "expected a matrix or a number array".into(),
        )),
    }
}

/// A family file, or the spectral family of a profile on `dim` coordinates.
pub fn read_family(path: &Path, dim: usize) -> Result<ProjectionFamily, CliError> {
    match read_input(path)? {
        Input::Family(f) => Ok(f),
        Input::Profile(p) => Ok(materialize(&p, dim)?.1),
        _ => Err(parse_err(
            path,
            "expected a projection family or a profile".into(),
        )),
    }
}

/// `harmonic:N`, `geometric:N`, a comma list, or a path to a number array.
pub fn parse_sequence(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Parse(format!("--seq {s:?}: {msg}"));
    if let Some((kind, len)) = s.split_once(':') {
        let len: usize = len.parse().map_err(|_| bad("length must be an integer"))?;
        return match kind {
            "harmonic" => Ok(RatioReference::harmonic(len).values),
            "geometric" => Ok(RatioReference::geometric(len).values),
            _ => Err(bad("unknown sequence family")),
        };
    }
    if s.contains(',') || s.parse::<f64>().is_ok() {
        return s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad("bad number")))
            .collect();
    }
    match read_input(Path::new(s))? {
        Input::Sequence(v) => Ok(v),
        _ => Err(bad("file does not hold a number array")),
    }
}

pub fn matrix_json(x: &DenseOperator) -> Value {
    let n = x.dim();
    let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| f(&x[(i, j)])).collect())
            .collect()
    };
    json!({"dim": n, "re": part(|z| z.re), "im": part(|z| z.im)})
}

/// Interleaved `re,im` rows, the CSV form of a matrix.
pub fn matrix_rows(x: &DenseOperator) -> Vec<Vec<Value>> {
    let n = x.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .flat_map(|j| [json!(x[(i, j)].re), json!(x[(i, j)].im)])
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_matrix_round_trip() {
        let m = parse_csv_matrix("1,0,0,2\n0,-2,3,0\n").unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, -2.0));
        assert_eq!(m[(1, 1)], Complex64::new(3.0, 0.0));
    }

    #[test]
    fn json_matrix_without_imaginary_part() {
        let v: Value = serde_json::from_str(r#"{"dim":2,"re":[[3,0],[0,4]]}"#).unwrap();
        match classify(v).unwrap() {
            Input::Matrix(m) => assert_eq!(m[(1, 1)], Complex64::new(4.0, 0.0)),
            _ => panic!("not a matrix"),
        }
    }

    #[test]
    fn sequences() {
        assert_eq!(parse_sequence("1,0.5").unwrap(), vec![1.0, 0.5]);
        assert_eq!(parse_sequence("geometric:2").unwrap().len(), 2);
        assert!(parse_sequence("nope:2").is_err());
    }
}
