//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Randomised criteria draw from `ORBITKIT_SEED` (see `orbitkit::sampling`).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use orbitkit::counterexamples::shift_topology_demo;
use orbitkit::norms::ky_fan_majorizes_within;
use orbitkit::sampling::{
    random_family, random_hermitian, random_matrix, random_profile, random_unitary, rng,
    seed_from_env, separated_values, shuffled,
};
use orbitkit::{
    conditional_expectation, construct_intertwiner, delta, finite_rank_unitary_sequence,
    hermitian_eigen, ideal_norm, isclosed_escape, materialize, nonseparable_demo, normal_eigen,
    operator_norm, orbit_verdict, profile_of, singular_values, solve_commutator, Complex64,
    DenseOperator, Eigenpair, KernelDim, NormSpec, RatioReference, SpectralProfile,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn support_projection(p: &SpectralProfile, dim: usize) -> DenseOperator {
    let d: Vec<f64> = (0..dim)
        .map(|i| if i < p.total_multiplicity() { 1.0 } else { 0.0 })
        .collect();
    DenseOperator::from_real_diagonal(&d)
}

/// Random profile whose minimal dimension does not exceed `max_dim`.
fn bounded_profile<R: Rng>(
    rng: &mut R,
    max_dim: usize,
    min_gap: f64,
    kernel: bool,
) -> SpectralProfile {
    loop {
        let distinct = rng.random_range(1..=max_dim.min(12));
        let max_mult = rng.random_range(1..=4);
        let p = random_profile(rng, distinct, max_mult, if kernel { 4 } else { 0 }, min_gap);
        if p.minimal_dim() <= max_dim && p.minimal_dim() >= 1 {
            return p;
        }
    }
}

fn c1_expectation_contraction() -> Outcome {
    let mut r = rng(1);
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for _ in 0..1000 {
        let n = r.random_range(2..=32);
        let x = random_matrix(&mut r, n);
        let f = random_family(&mut r, n);
        let se = singular_values(&conditional_expectation(&x, &f).unwrap());
        let sx = singular_values(&x);
        let rep = ky_fan_majorizes_within(&se, &sx, 1e-9).unwrap();
        let excess = rep
            .partial_sums_x
            .iter()
            .zip(&rep.partial_sums_y)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(excess);
        if !rep.dominated {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("1000 samples, {failures} violations, max partial-sum excess {worst:.3e}"),
    )
}

fn c2_commutator_round_trip() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let p = bounded_profile(&mut r, 32, 1e-3, true);
        let dim = p.minimal_dim();
        let (a, fam) = materialize(&p, dim).unwrap();
        let x = random_matrix(&mut r, dim);
        let y = x.clone() - conditional_expectation(&x, &fam).unwrap();
        let y_norm = operator_norm(&y);
        let sol = solve_commutator(&p, &fam, &y).unwrap();
        let res = operator_norm(&(delta(&a, &sol.x).unwrap() - y));
        if y_norm > 0.0 {
            worst = worst.max(res / y_norm);
        }
    }
    outcome(
        worst <= 1e-9,
        format!("500 samples, max relative residual {worst:.3e} (tol 1e-9)"),
    )
}

fn c3_intertwiner_certificate() -> Outcome {
    let mut r = rng(3);
    let mut bad = 0;
    let mut worst_slack = f64::NEG_INFINITY;
    for _ in 0..200 {
        let a = bounded_profile(&mut r, 56, 1e-3, false)
            .with_kernel(KernelDim::Finite(r.random_range(0..=8)));
        let b = shuffled(&mut r, &a).with_kernel(KernelDim::Finite(r.random_range(0..=8)));
        let dim = a.minimal_dim().max(b.minimal_dim());
        let eps = r.random_range(0.01..1.0);
        match construct_intertwiner(&a, &b, eps, dim) {
            Ok(cert) => {
                let exact = (&cert.v.adjoint() * &cert.v) == support_projection(&a, dim);
                worst_slack = worst_slack.max(cert.achieved_error - 2.0 * eps);
                if !exact || cert.achieved_error > 2.0 * eps {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    outcome(
        bad == 0,
        format!("200 pairs, {bad} failures, max (error − 2ε) {worst_slack:.3e}"),
    )
}

fn c4_verdict_oracle() -> Outcome {
    let mut r = rng(4);
    let mut misclassified = 0;
    for trial in 0..400 {
        let dim = r.random_range(2..=8);
        let distinct = r.random_range(1..dim);
        let values = separated_values(&mut r, distinct, 2.0, 0.1, false);
        let p = SpectralProfile::finite(
            values.iter().map(|&v| Eigenpair::new(v, 1)).collect(),
            dim - distinct,
        );
        let (d, _) = materialize(&p, dim).unwrap();
        let w = random_unitary(&mut r, dim);
        let a = d.conjugate_by(&w).unwrap();
        let pa = support_projection(&p, dim).conjugate_by(&w).unwrap();
        let v = &random_unitary(&mut r, dim) * &pa;
        let mut b = a.conjugate_by(&v).unwrap();
        let perturbed = trial >= 200;
        if perturbed {
            // shift the eigenvalue carried by the image of one eigenvector by 1e-2
            let k = r.random_range(0..distinct);
            let xi = (&v * &w).column(k);
            for i in 0..dim {
                for j in 0..dim {
                    b[(i, j)] += Complex64::new(1e-2, 0.0) * xi[i] * xi[j].conj();
                }
            }
        }
        let verdict = orbit_verdict(
            &profile_of(&a, 1e-9).unwrap(),
            &profile_of(&b, 1e-9).unwrap(),
        )
        .unwrap();
        if verdict.same_groupoid_orbit == perturbed {
            misclassified += 1;
        }
    }
    outcome(
        misclassified == 0,
        format!("200 conjugated + 200 perturbed pairs, {misclassified} misclassified"),
    )
}

fn c5_escape_sequence() -> Outcome {
    let eigs: Vec<f64> = (1..=12).map(|k| 0.5f64.powi(k)).collect();
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for n in 0..eigs.len() {
        let rep = isclosed_escape(&eigs, &NormSpec::Trace, n).unwrap();
        let tail: f64 = 2.0 * eigs[n..].iter().sum::<f64>();
        worst = worst.max(rep.distance - tail);
        ok &= rep.distance <= tail + 1e-9;
        ok &= rep.kernel_dim_limit == rep.kernel_dim_orbit + 1;
    }
    outcome(
        ok,
        format!("n = 0..11, max (distance − tail bound) {worst:.3e}, kernel +1 everywhere: {ok}"),
    )
}

fn c6_separability_dichotomy() -> Outcome {
    let mut r = rng(6);
    let mut worst_sep: f64 = 0.0;
    for _ in 0..50 {
        let a = bounded_profile(&mut r, 32, 1e-3, true);
        let b = shuffled(&mut r, &a);
        let m = a.eigenvalues.len();
        let s = finite_rank_unitary_sequence(&a, &b, m, a.minimal_dim()).unwrap();
        worst_sep = worst_sep.max(s.error_in(&NormSpec::Trace).unwrap());
    }
    let sep_ok = worst_sep < 1e-6;

    let rep = nonseparable_demo(&RatioReference::harmonic(128), 64, 32).unwrap();
    let below: Vec<usize> = rep
        .residuals
        .iter()
        .filter(|e| e.ratio_norm < 0.5)
        .map(|e| e.m)
        .collect();
    let at = |m: usize| rep.residuals[m].ratio_norm;
    let nonsep_ok = below.is_empty();
    outcome(
        sep_ok && nonsep_ok && rep.same_unitary_orbit,
        format!(
            "Schatten-1 error at full alignment max {worst_sep:.3e} (< 1e-6: {sep_ok}); \
             ratio residual m=0 {:.4}, m=8 {:.4}, m=16 {:.4}, m=24 {:.4}, m=32 {:.4}; \
             below 0.5 for m in {:?}",
            at(0),
            at(8),
            at(16),
            at(24),
            at(32),
            below.first().zip(below.last()).map(|(a, b)| a..=b)
        ),
    )
}

fn c7_shift_demo() -> Outcome {
    let eigs: Vec<f64> = (1..=16).map(|k| 1.0 / k as f64).collect();
    let mut dist_ok = true;
    let mut witness_ok = true;
    let mut worst_final: f64 = 0.0;
    let mut worst_final_section: f64 = 0.0;
    for n in 2..=15 {
        let rep = shift_topology_demo(&eigs, n).unwrap();
        dist_ok &= rep.distance <= 2.0 / n as f64;
        witness_ok &= rep.witness_distance >= 1.0 - 1e-9;
        worst_final = worst_final.max(rep.final_defect_raw);
        worst_final_section = worst_final_section.max(rep.final_defect);
    }
    let final_ok = worst_final <= 1e-10;
    outcome(
        dist_ok && witness_ok && final_ok,
        format!(
            "‖b_n − a‖ ≤ 2/n: {dist_ok}; ‖w − p_a‖ ≥ 1 − 1e-9: {witness_ok}; \
             max ‖ww* − (p_a − p_n)‖ = {worst_final:.3e} (tol 1e-10); \
             with the overflow coordinate added to p_a: {worst_final_section:.3e}"
        ),
    )
}

fn c8_eigensolver() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = r.random_range(1..=64);
        let h = random_hermitian(&mut r, n);
        let e = hermitian_eigen(&h).unwrap();
        worst = worst.max(e.residual / operator_norm(&h));
    }
    let herm_ok = worst <= 1e-10;

    let mut mismatches = 0;
    for _ in 0..100 {
        // clusters of eigenvalues exactly 2e-6 apart
        let count = r.random_range(1..=5);
        let centers = separated_values(&mut r, count, 2.0, 0.1, false);
        let mut pairs = Vec::new();
        for c in centers {
            pairs.push(Eigenpair::new(c, r.random_range(1..=3)));
            if r.random_bool(0.5) {
                pairs.push(Eigenpair::new(
                    c + Complex64::new(2e-6, 0.0),
                    r.random_range(1..=2),
                ));
            }
        }
        let p = SpectralProfile::finite(pairs, r.random_range(0..=2));
        let dim = p.minimal_dim();
        let (d, _) = materialize(&p, dim).unwrap();
        let x = d.conjugate_by(&random_unitary(&mut r, dim)).unwrap();
        let eig = normal_eigen(&x).unwrap();
        for ep in &p.eigenvalues {
            let hits = eig
                .values
                .iter()
                .filter(|z| (*z - ep.value).norm() < 5e-7)
                .count();
            if hits != ep.multiplicity {
                mismatches += 1;
            }
        }
    }
    outcome(
        herm_ok && mismatches == 0,
        format!(
            "500 hermitian, max residual/‖h‖ {worst:.3e} (tol 1e-10); \
             normal round trip with 2e-6 gaps: {mismatches} multiplicity mismatches"
        ),
    )
}

fn c9_norm_axioms() -> Outcome {
    let specs = vec![
        NormSpec::Operator,
        NormSpec::Trace,
        NormSpec::Schatten { p: 1.5 },
        NormSpec::Schatten { p: 2.0 },
        NormSpec::Schatten { p: 4.0 },
        NormSpec::KyFan { k: 1 },
        NormSpec::KyFan { k: 3 },
        NormSpec::ratio(&RatioReference::harmonic(16)),
        NormSpec::ratio(
            &RatioReference::new((1..=16).map(|k| (k as f64).powf(-0.5)).collect()).unwrap(),
        ),
    ];
    let mut r = rng(9);
    let mut violations = vec![0usize; specs.len()];
    for _ in 0..1000 {
        let n = r.random_range(2..=16);
        let x = random_matrix(&mut r, n);
        let y = random_matrix(&mut r, n);
        let u = random_unitary(&mut r, n);
        let v = random_unitary(&mut r, n);
        let sx = singular_values(&x);
        let sy = singular_values(&y);
        let sxy = singular_values(&(&x + &y));
        let suxv = singular_values(&(&(&u * &x) * &v));
        for (i, spec) in specs.iter().enumerate() {
            let nx = ideal_norm(&sx, spec).unwrap();
            let invariant = (ideal_norm(&suxv, spec).unwrap() - nx).abs() <= 1e-9 * nx.max(1.0);
            let triangle =
                ideal_norm(&sxy, spec).unwrap() <= nx + ideal_norm(&sy, spec).unwrap() + 1e-9;
            let rank_one = (ideal_norm(&[1.0], spec).unwrap() - 1.0).abs() <= 1e-9;
            let interleave = sx[0] <= nx + 1e-9 && nx <= sx.iter().sum::<f64>() + 1e-9;
            if !(invariant && triangle && rank_one && interleave) {
                violations[i] += 1;
            }
        }
    }
    let total: usize = violations.iter().sum();
    outcome(
        total == 0,
        format!(
            "{} specs × 1000 samples, violations per spec {violations:?}",
            specs.len()
        ),
    )
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    println!("acceptance suite (seed {})", seed_from_env());
    let criteria: Vec<Criterion> = vec![
        (
            "1 expectation contraction",
            Some(Duration::from_secs(30)),
            c1_expectation_contraction,
        ),
        (
            "2 commutator round trip",
            Some(Duration::from_secs(60)),
            c2_commutator_round_trip,
        ),
        (
            "3 intertwiner certificate",
            Some(Duration::from_secs(120)),
            c3_intertwiner_certificate,
        ),
        ("4 orbit verdict oracle", None, c4_verdict_oracle),
        ("5 escape sequence", None, c5_escape_sequence),
        (
            "6 separability dichotomy",
            Some(Duration::from_secs(60)),
            c6_separability_dichotomy,
        ),
        (
            "7 shift topology demo",
            Some(Duration::from_secs(30)),
            c7_shift_demo,
        ),
        (
            "8 eigensolver quality",
            Some(Duration::from_secs(60)),
            c8_eigensolver,
        ),
        ("9 norm axioms", None, c9_norm_axioms),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} [{:.2}s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit
                .map(|l| format!(" / {}s", l.as_secs()))
                .unwrap_or_default(),
            out.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
