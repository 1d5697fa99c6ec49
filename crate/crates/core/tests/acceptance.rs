//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::Zero;

use fuzzy_bundles::binomial::{binomial_identity, Variant};
use fuzzy_bundles::calculus::{
    exterior_d, graded_commutator, invariant_two_form, nc_integral, theta, two_form_coefficient, volume_form,
    wedge, FiberForm, FuzzyContext,
};
use fuzzy_bundles::chern::{
    charge_q, curvature_two_form, extract_f, f_closed_form, k_limit, lambda_mu_check, lemma3_check,
};
use fuzzy_bundles::linalg::{c, frobenius, identity, max_abs, mul, I};
use fuzzy_bundles::projector::{
    projector_haar_mc, projector_orbit, projector_spectral, total_generators, EquivariantProjector,
};
use fuzzy_bundles::spin::highest_weight;
use fuzzy_bundles::sweep::{run_sweep, ChargeRecord, Format, SweepConfig};
use fuzzy_bundles::{Branch, Result, TwoJ};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Valid `(two_N, two_nu, branch)` triples with `two_N <= n_max`, `two_nu <= nu_max`.
fn points(n_min: u32, n_max: u32, step: usize, nu_min: u32, nu_max: u32) -> Vec<(TwoJ, TwoJ, Branch)> {
    let mut out = Vec::new();
    for two_n in (n_min..=n_max).step_by(step) {
        for two_nu in nu_min..=nu_max {
            for branch in Branch::ALL {
                if branch.target(TwoJ(two_n), TwoJ(two_nu)).is_ok() {
                    out.push((TwoJ(two_n), TwoJ(two_nu), branch));
                }
            }
        }
    }
    out
}

fn numeric_c1(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<f64> {
    let ctx = FuzzyContext::new(two_n)?;
    let p = projector_spectral(two_n, two_nu, branch)?;
    Ok(-charge_q(extract_f(&ctx, &p)?, two_n)?)
}

fn closed_form_agreement() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (two_n, two_nu, branch) in points(2, 50, 2, 1, 4) {
        let ctx = FuzzyContext::new(two_n)?;
        let p = projector_spectral(two_n, two_nu, branch)?;
        let closed = f_closed_form(two_n, two_nu, branch)?;
        worst = worst.max((extract_f(&ctx, &p)? - closed).norm() / closed.norm().max(1.0));
    }
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        worst <= 1e-9 && elapsed < Duration::from_secs(60),
        format!("max relative gap {worst:.2e}, {:.1} s", elapsed.as_secs_f64()),
    ))
}

fn spot_values() -> Result<Outcome> {
    let root2 = 2f64.sqrt();
    let cases = [
        (Branch::Plus, Complex64::new(0.0, -5.0 / 27.0), 80.0 * root2 / 81.0),
        (Branch::Minus, Complex64::new(0.0, 2.0 / 27.0), -32.0 * root2 / 81.0),
    ];
    let mut worst: f64 = 0.0;
    for (branch, f_expected, q_expected) in cases {
        let (two_n, two_nu) = (TwoJ(2), TwoJ(1));
        let ctx = FuzzyContext::new(two_n)?;
        let p = projector_spectral(two_n, two_nu, branch)?;
        let f = extract_f(&ctx, &p)?;
        let q = charge_q(f, two_n)?;
        worst = worst.max((f - f_expected).norm()).max((q - q_expected).abs());
    }
    Ok(Outcome::new(worst <= 1e-10, format!("max abs gap {worst:.2e}")))
}

fn figure_sweep() -> Result<(Vec<ChargeRecord>, Duration)> {
    let config = SweepConfig {
        two_nu_list: vec![1, 2, 3, 4],
        branches: Branch::ALL.to_vec(),
        two_n_max: 100,
        output_path: PathBuf::new(),
        format: Format::Csv,
        half_integer: false,
        tol: 1e-9,
    };
    let start = Instant::now();
    let reports = run_sweep(&config)?;
    let elapsed = start.elapsed();
    Ok((reports.iter().map(ChargeRecord::from).collect(), elapsed))
}

fn continuum_limit(sweep_time: Duration) -> Result<Outcome> {
    let mut worst_ratio: (f64, String) = (0.5, String::new());
    let mut ok = true;
    for two_nu in 1..=4 {
        for branch in Branch::ALL {
            let k = k_limit(TwoJ(two_nu), branch) as f64;
            let errs: Vec<f64> = [20, 40, 80, 160]
                .iter()
                .map(|&two_n| numeric_c1(TwoJ(two_n), TwoJ(two_nu), branch).map(|c1| (c1 - k).abs()))
                .collect::<Result<_>>()?;
            for (w, big_n) in errs.windows(2).zip([10, 20, 40]) {
                let ratio = w[1] / w[0];
                if !(0.35..=0.65).contains(&ratio) {
                    ok = false;
                }
                if (ratio - 0.5).abs() > (worst_ratio.0 - 0.5).abs() {
                    worst_ratio = (ratio, format!("two_nu={two_nu} {branch} N={big_n}"));
                }
            }
        }
    }
    let in_time = sweep_time < Duration::from_secs(120);
    Ok(Outcome::new(
        ok && in_time,
        format!(
            "worst err(2N)/err(N) = {:.4} at {}, sweep to N=50 in {:.1} s",
            worst_ratio.0,
            worst_ratio.1,
            sweep_time.as_secs_f64()
        ),
    ))
}

fn figure_reproduction(rows: &[ChargeRecord]) -> Outcome {
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for r in rows {
        let k = r.k_limit as f64;
        let n = f64::from(r.two_n) / 2.0;
        if n >= 5.0 {
            let scaled = (r.c1 - k).abs() / (2.0 * k.abs() / n);
            worst = worst.max(scaled);
            if scaled > 1.0 {
                violations += 1;
            }
        }
        if r.c1.signum() != k.signum() {
            violations += 1;
        }
    }
    let ks: Vec<i64> = rows.iter().map(|r| r.k_limit).collect();
    let span = (ks.iter().min().copied(), ks.iter().max().copied());
    Outcome::new(
        violations == 0 && span == (Some(-4), Some(4)),
        format!("{} rows, {violations} violations, max |c1-k|/(2|k|/N) = {worst:.3}", rows.len()),
    )
}

fn projector_suite() -> Result<Outcome> {
    let mut worst = [0f64; 5];
    for (two_n, two_nu, branch) in points(0, 12, 1, 0, 4) {
        let p = projector_spectral(two_n, two_nu, branch)?;
        let gaps = p.gaps(&total_generators(two_n, two_nu));
        let orbit = projector_orbit(two_n, two_nu, branch)?;
        let vals = [
            gaps.idempotence,
            gaps.hermiticity,
            gaps.trace,
            gaps.equivariance,
            max_abs(&(&p.matrix - &orbit.matrix)),
        ];
        for (w, v) in worst.iter_mut().zip(vals) {
            *w = w.max(v);
        }
    }
    let limits = [1e-11, 1e-11, 1e-10, 1e-11, 1e-11];
    Ok(Outcome::new(
        worst.iter().zip(limits).all(|(w, l)| *w <= l),
        format!(
            "idem {:.1e}, herm {:.1e}, trace {:.1e}, equiv {:.1e}, orbit {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    ))
}

fn calculus_at(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<f64> {
    let pf = FiberForm::function(ctx, p.matrix.clone())?;
    let dp = exterior_d(ctx, &pf)?;
    let mut worst = exterior_d(ctx, &dp)?.max_abs();
    worst = worst.max(exterior_d(ctx, &exterior_d(ctx, &dp.left_mul(&p.matrix))?)?.max_abs());
    let th = theta(ctx);
    worst = worst.max(exterior_d(ctx, &th)?.add(&wedge(&th, &th)?)?.max_abs());
    let phi = FiberForm::function(ctx, mul(&ctx.y[0], &ctx.y[1]) + &ctx.y[2] * I)?;
    worst = worst.max(exterior_d(ctx, &phi)?.add(&graded_commutator(&th, &phi)?)?.max_abs());
    let om = volume_form(ctx);
    let (lambda, _) = two_form_coefficient(&om, &om)?;
    worst = worst.max((nc_integral(ctx, &(identity(ctx.dim()) * lambda))? - c(1.0)).norm());
    let curvature = curvature_two_form(ctx, p)?;
    worst = worst.max(exterior_d(ctx, &curvature)?.max_abs());
    let (_, proportionality) = two_form_coefficient(&curvature, &invariant_two_form(ctx))?;
    Ok(worst.max(proportionality))
}

fn calculus_suite() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (two_n, two_nu, branch) in points(1, 12, 1, 0, 4) {
        let ctx = FuzzyContext::new(two_n)?;
        let p = projector_spectral(two_n, two_nu, branch)?;
        worst = worst.max(calculus_at(&ctx, &p)?);
    }
    Ok(Outcome::new(worst < 1e-10, format!("max residual {worst:.2e}")))
}

fn lemma3_equality() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (two_n, two_nu, branch) in points(1, 12, 1, 0, 4) {
        let ctx = FuzzyContext::new(two_n)?;
        let p = projector_spectral(two_n, two_nu, branch)?;
        let h = highest_weight(two_n, two_nu, branch)?;
        worst = worst.max(lemma3_check(&ctx, &p, &h)?.relative_gap());
    }
    Ok(Outcome::new(worst <= 1e-9, format!("max relative gap {worst:.2e}")))
}

fn exact_identities() -> Result<Outcome> {
    let mut failures = 0;
    for n in 0..=60i64 {
        for l in 0..=n {
            for variant in [Variant::A, Variant::B, Variant::C] {
                if l == n && variant != Variant::A {
                    continue;
                }
                let (lhs, rhs) = binomial_identity(variant, n, l)?;
                if !(lhs - rhs).is_zero() {
                    failures += 1;
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (two_n, two_nu, branch) in points(1, 12, 1, 1, 4) {
        worst = worst.max(lambda_mu_check(two_n, two_nu, branch)?.max_gap());
    }
    Ok(Outcome::new(
        failures == 0 && worst <= 1e-10,
        format!("{failures} binomial mismatches, closed-form gap {worst:.2e}"),
    ))
}

fn clebsch_gordan() -> Result<Outcome> {
    let h = highest_weight(TwoJ(2), TwoJ(1), Branch::Minus)?.coefficients;
    let expected = [(1, (2.0f64 / 3.0).sqrt()), (2, -(1.0f64 / 3.0).sqrt())];
    let mut gap: f64 = 0.0;
    for (i, z) in h.iter().enumerate() {
        let want = expected.iter().find(|(k, _)| *k == i).map_or(0.0, |&(_, v)| v);
        gap = gap.max((z - c(want)).norm());
    }
    Ok(Outcome::new(gap <= 1e-12, format!("max gap {gap:.2e}")))
}

fn haar_oracle() -> Result<Outcome> {
    let (two_n, two_nu, branch) = (TwoJ(2), TwoJ(1), Branch::Plus);
    let p = projector_spectral(two_n, two_nu, branch)?;
    let first = projector_haar_mc(two_n, two_nu, branch, 200_000, 42)?;
    let second = projector_haar_mc(two_n, two_nu, branch, 200_000, 42)?;
    let gap = frobenius(&(&first.matrix - &p.matrix));
    let deterministic = first.matrix == second.matrix;
    Ok(Outcome::new(
        gap <= 0.05 && deterministic,
        format!("Frobenius gap {gap:.4}, deterministic {deterministic}"),
    ))
}

fn main() -> ExitCode {
    let (rows, sweep_time) = match figure_sweep() {
        Ok(v) => v,
        Err(e) => {
            println!("sweep failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut failed = 0;
    let mut report = |name: &str, outcome: Result<Outcome>| {
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("criterion {name:<28} {}  {detail}", if pass { "PASS" } else { "FAIL" });
    };
    report("1 closed-form oracle", closed_form_agreement());
    report("2 spot values", spot_values());
    report("3 continuum limit", continuum_limit(sweep_time));
    report("4 charge sweep |k| <= 4", Ok(figure_reproduction(&rows)));
    report("5 projector suite", projector_suite());
    report("6 calculus suite", calculus_suite());
    report("7 highest-weight reduction", lemma3_equality());
    report("8 exact identities", exact_identities());
    report("9 Clebsch-Gordan", clebsch_gordan());
    report("10 Haar Monte-Carlo", haar_oracle());
    println!("{failed} of 10 criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
