//! One function per verb. Each returns a [`Report`]; domain errors bubble up
//! as [`CliError::Domain`].

use std::path::Path;

use orbitkit::{
    closed_range_witnesses, conditional_expectation, construct_intertwiner, epsilon_partition,
    escape_sequence, finite_rank_unitary_sequence, ideal_norm, intertwine_operators,
    isclosed_escape, ky_fan_majorizes_within, lagrange_coefficients, lagrange_lipschitz_bound,
    lagrange_spectral_projector, materialize, maximal_norm, min_witness_ratio, nonseparable_demo,
    operator_norm, orbit_verdict_with_tol, shift_sequence, shift_topology_demo_with_rank,
    solve_commutator, tangent_split, DenseOperator, NormSpec, PartialIsometryCert, RatioReference,
    SpectralProfile,
};
use serde_json::{json, Value};

use crate::input::{
    matrix_json, matrix_rows, parse_sequence, read_family, read_input, read_matrix, read_profile,
    read_singular_values, Input,
};
use crate::output::Report;
use crate::CliError;

macro_rules! to_value {
    ($x:expr) => {
        serde_json::to_value($x).expect("report types serialize")
    };
}

pub fn parse_spec(s: &str) -> Result<NormSpec, CliError> {
    s.parse()
        .map_err(|e: orbitkit::OrbitError| CliError::Parse(format!("--spec: {e}")))
}

fn default_dim(dim: Option<usize>, profiles: &[&SpectralProfile]) -> usize {
    dim.unwrap_or_else(|| {
        profiles
            .iter()
            .map(|p| p.minimal_dim())
            .max()
            .unwrap_or(1)
            .max(1)
    })
}

pub fn norm(input: &Path, spec: &str) -> Result<Report, CliError> {
    let spec = parse_spec(spec)?;
    let body = match read_input(input)? {
        Input::Matrix(x) => {
            let m = maximal_norm(&x, &spec)?;
            json!({
                "spec": spec.to_string(),
                "value": m.value,
                "partials": m.partials,
                "singular_values": orbitkit::singular_values(&x),
            })
        }
        Input::Sequence(_) => {
            let s = read_singular_values(input)?;
            json!({"spec": spec.to_string(), "value": ideal_norm(&s, &spec)?, "singular_values": s})
        }
        _ => {
            return Err(CliError::Parse(format!(
                "{}: expected a matrix or a number array",
                input.display()
            )))
        }
    };
    let table = vec![vec![body["spec"].clone(), body["value"].clone()]];
    Ok(Report::new(body).with_table(vec!["spec", "value"], table))
}

pub fn majorize(x: &Path, y: &Path, slack: f64) -> Result<Report, CliError> {
    let sx = read_singular_values(x)?;
    let sy = read_singular_values(y)?;
    let r = ky_fan_majorizes_within(&sx, &sy, slack)?;
    let rows = r
        .partial_sums_x
        .iter()
        .zip(&r.partial_sums_y)
        .enumerate()
        .map(|(i, (a, b))| vec![json!(i + 1), json!(a), json!(b)])
        .collect();
    Ok(Report::new(to_value!(&r)).with_table(vec!["k", "partial_sum_x", "partial_sum_y"], rows))
}

pub fn expectation(x: &Path, family: &Path) -> Result<Report, CliError> {
    let x = read_matrix(x)?;
    let fam = read_family(family, x.dim())?;
    let e = conditional_expectation(&x, &fam)?;
    Ok(matrix_report(json!({"expectation": matrix_json(&e)}), &e))
}

fn matrix_report(body: Value, m: &DenseOperator) -> Report {
    let header = vec!["re", "im"]
        .into_iter()
        .cycle()
        .take(2 * m.dim())
        .collect();
    Report::new(body).with_table(header, matrix_rows(m))
}

pub fn commutator_solve(profile: &Path, y: &Path, tol: f64) -> Result<Report, CliError> {
    let p = read_profile(profile, tol)?;
    let y = read_matrix(y)?;
    let (_, fam) = materialize(&p, y.dim())?;
    let sol = solve_commutator(&p, &fam, &y)?;
    let body = json!({
        "convention": to_value!(&sol.convention),
        "residual": sol.residual,
        "x": matrix_json(&sol.x),
    });
    Ok(matrix_report(body, &sol.x))
}

pub fn witnesses(profile: &Path, tol: f64) -> Result<Report, CliError> {
    let p = read_profile(profile, tol)?;
    let w = closed_range_witnesses(&p)?;
    let rows = w
        .iter()
        .map(|w| {
            vec![
                json!(w.index_pair.0),
                json!(w.index_pair.1),
                json!(w.gap),
                json!(w.commutator_norm),
                json!(w.ratio),
            ]
        })
        .collect();
    let body = json!({"witnesses": to_value!(&w), "min_ratio": min_witness_ratio(&w)});
    Ok(Report::new(body).with_table(vec!["j", "k", "gap", "commutator_norm", "ratio"], rows))
}

pub fn tangent(
    profile: &Path,
    v0: Option<&Path>,
    dim: Option<usize>,
    tol: f64,
) -> Result<Report, CliError> {
    let p = read_profile(profile, tol)?;
    let v0 = match v0 {
        Some(path) => read_matrix(path)?,
        None => support_projection(&p, default_dim(dim, &[&p]))?,
    };
    Ok(Report::new(to_value!(&tangent_split(&p, &v0)?)))
}

/// Projection onto the coordinates carrying nonzero eigenvalues.
fn support_projection(p: &SpectralProfile, dim: usize) -> Result<DenseOperator, CliError> {
    let (_, fam) = materialize(p, dim)?;
    let mut d = vec![0.0; dim];
    for &i in fam.blocks().iter().take(p.eigenvalues.len()).flatten() {
        d[i] = 1.0;
    }
    Ok(DenseOperator::from_real_diagonal(&d))
}

pub fn verdict(a: &Path, b: &Path, tol: f64) -> Result<Report, CliError> {
    let pa = read_profile(a, tol)?;
    let pb = read_profile(b, tol)?;
    Ok(Report::new(to_value!(&orbit_verdict_with_tol(
        &pa, &pb, tol
    )?)))
}

pub fn partition(profile: &Path, eps: f64, tol: f64) -> Result<Report, CliError> {
    let p = read_profile(profile, tol)?;
    let cells = epsilon_partition(&p, eps)?;
    let rows = cells
        .cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| {
            cell.members.iter().map(move |&m| {
                vec![
                    json!(c),
                    json!(cell.center.re),
                    json!(cell.center.im),
                    json!(m),
                ]
            })
        })
        .collect();
    Ok(Report::new(to_value!(&cells))
        .with_table(vec!["cell", "center_re", "center_im", "member"], rows))
}

pub fn intertwine(
    a: &Path,
    b: &Path,
    eps: f64,
    dim: Option<usize>,
    with_matrix: bool,
    tol: f64,
) -> Result<Report, CliError> {
    let cert = match (read_input(a)?, read_input(b)?) {
        (Input::Matrix(x), Input::Matrix(y)) => intertwine_operators(&x, &y, eps)?,
        _ => {
            let pa = read_profile(a, tol)?;
            let pb = read_profile(b, tol)?;
            construct_intertwiner(&pa, &pb, eps, default_dim(dim, &[&pa, &pb]))?
        }
    };
    Ok(cert_report(&cert, with_matrix))
}

fn cert_report(cert: &PartialIsometryCert, with_matrix: bool) -> Report {
    let rank = cert.initial_proj.trace().re.round() as i64;
    let mut body = json!({
        "dim": cert.v.dim(),
        "rank": rank,
        "epsilon": cert.epsilon,
        "certified_bound": cert.certified_bound,
        "achieved_error": cert.achieved_error,
    });
    if with_matrix {
        body["v"] = matrix_json(&cert.v);
        body["initial_proj"] = matrix_json(&cert.initial_proj);
        body["final_proj"] = matrix_json(&cert.final_proj);
    }
    let row = vec![
        json!(cert.epsilon),
        json!(cert.certified_bound),
        json!(cert.achieved_error),
    ];
    Report::new(body).with_table(
        vec!["epsilon", "certified_bound", "achieved_error"],
        vec![row],
    )
}

pub fn approx_seq(
    a: &Path,
    b: &Path,
    spec: &str,
    m: Option<usize>,
    dim: Option<usize>,
    tol: f64,
) -> Result<Report, CliError> {
    let spec = parse_spec(spec)?;
    let pa = read_profile(a, tol)?;
    let pb = read_profile(b, tol)?;
    let dim = default_dim(dim, &[&pa, &pb]);
    let m_max = m.unwrap_or(pa.eigenvalues.len().max(pb.eigenvalues.len()));
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let approx = finite_rank_unitary_sequence(&pa, &pb, m, dim)?;
        let error = approx.error_in(&spec)?;
        let bound = approx.tail_bound(&spec)?;
        entries.push(json!({"m": m, "error": error, "bound": bound}));
        rows.push(vec![json!(m), json!(error), json!(bound)]);
    }
    let body = json!({"spec": spec.to_string(), "dim": dim, "sequence": entries});
    Ok(Report::new(body).with_table(vec!["m", "error", "bound"], rows))
}

pub fn projector(
    profile: &Path,
    x: Option<&Path>,
    j: usize,
    dim: Option<usize>,
    tol: f64,
) -> Result<Report, CliError> {
    let p = read_profile(profile, tol)?;
    let (a, _) = materialize(&p, default_dim(dim, &[&p]))?;
    let x = match x {
        Some(path) => read_matrix(path)?,
        None => a.clone(),
    };
    let coeffs = lagrange_coefficients(&p, j)?;
    let radius = operator_norm(&a).max(operator_norm(&x));
    let proj = lagrange_spectral_projector(&p, j, &x)?;
    let body = json!({
        "index": j,
        "coefficients": coeffs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "lipschitz_bound": lagrange_lipschitz_bound(&coeffs, radius),
        "radius": radius,
        "projector": matrix_json(&proj),
    });
    Ok(matrix_report(body, &proj))
}

pub fn demo_isclosed(seq: &str, spec: &str, n: Option<usize>) -> Result<Report, CliError> {
    let eigs = parse_sequence(seq)?;
    let spec = parse_spec(spec)?;
    let reports = match n {
        Some(n) => vec![isclosed_escape(&eigs, &spec, n)?],
        None => escape_sequence(&eigs, &spec)?,
    };
    let rows = reports
        .iter()
        .map(|r| vec![json!(r.n), json!(r.distance), json!(r.bound)])
        .collect();
    let body =
        json!({"spec": spec.to_string(), "eigenvalues": eigs, "reports": to_value!(&reports)});
    Ok(Report::new(body).with_table(vec!["n", "distance", "bound"], rows))
}

pub fn demo_nonseparable(
    seq: Option<&str>,
    spec: Option<&str>,
    n: usize,
    m: usize,
) -> Result<Report, CliError> {
    let reference = match (spec, seq) {
        (Some(s), _) => parse_spec(s)?
            .ratio_reference()
            .map_err(|e| CliError::Parse(format!("--spec: {e}")))?,
        (None, Some(s)) => RatioReference::new(parse_sequence(s)?)?,
        (None, None) => RatioReference::harmonic(2 * n),
    };
    let r = nonseparable_demo(&reference, n, m)?;
    let rows = r
        .residuals
        .iter()
        .map(|e| vec![json!(e.m), json!(e.ratio_norm)])
        .collect();
    Ok(Report::new(to_value!(&r)).with_table(vec!["m", "ratio_norm"], rows))
}

pub fn demo_shift(seq: &str, n: Option<usize>, rank: usize) -> Result<Report, CliError> {
    let eigs = parse_sequence(seq)?;
    let reports = match n {
        Some(n) => vec![shift_topology_demo_with_rank(&eigs, n, rank)?],
        None => shift_sequence(&eigs, rank)?,
    };
    let rows = reports
        .iter()
        .map(|r| vec![json!(r.n), json!(r.distance), json!(r.bound)])
        .collect();
    let body = json!({"rank": rank, "eigenvalues": eigs, "reports": to_value!(&reports)});
    Ok(Report::new(body).with_table(vec!["n", "distance", "bound"], rows))
}
