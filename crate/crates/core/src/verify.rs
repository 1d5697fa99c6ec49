//! Named invariant checks at one `(N, nu, branch)` point.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::binomial::{binomial_identity, Variant};
use crate::calculus::{
    exterior_d, graded_commutator, invariant_two_form, nc_integral, theta, two_form_coefficient, volume_form,
    wedge, FiberForm, FuzzyContext,
};
use crate::chern::{
    connection_consistency, curvature_two_form, extract_f, f_closed_form, lambda_mu_check, lemma3_check,
};
use crate::error::Result;
use crate::linalg::{c, frobenius, identity, kron, max_abs, mul, I};
use crate::projector::{projector_haar_mc, projector_orbit, projector_spectral, total_generators};
use crate::spin::{highest_weight, Branch, TwoJ};

/// Largest `n` covered by the exact binomial grid.
pub const BINOMIAL_GRID_MAX: i64 = 60;

/// Frobenius tolerance of the Monte-Carlo projector estimate.
pub const HAAR_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Core,
    /// Core plus the Haar Monte-Carlo oracle.
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual < self.threshold
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{:<26} {:>12.3e}  {verdict}", self.name, self.residual)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub two_n: TwoJ,
    pub two_nu: TwoJ,
    pub branch: Branch,
    pub suite: Suite,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
}

pub fn run_verify(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let (two_n, two_nu, branch, tol) = (opts.two_n, opts.two_nu, opts.branch, opts.tol);
    branch.target(two_n, two_nu)?;
    let ctx = FuzzyContext::new(two_n)?;
    let p = projector_spectral(two_n, two_nu, branch)?;
    let gens = total_generators(two_n, two_nu);
    let mut checks = Vec::new();
    let mut push = |name, residual| checks.push(Check { name, residual, threshold: tol });

    let gaps = p.gaps(&gens);
    push("projector_hermiticity", gaps.hermiticity);
    push("projector_idempotence", gaps.idempotence);
    push("projector_trace", gaps.trace);
    push("projector_equivariance", gaps.equivariance);
    push("projector_spectrum", gaps.spectrum);
    push("projector_rank", (gaps.rank as f64 - p.block_dim() as f64).abs());
    let orbit = projector_orbit(two_n, two_nu, branch)?;
    push("spectral_vs_orbit", max_abs(&(&p.matrix - &orbit.matrix)));
    let other = match branch {
        Branch::Plus => Branch::Minus,
        Branch::Minus => Branch::Plus,
    };
    if two_nu.value() > 0 && other.target(two_n, two_nu).is_ok() {
        let q = projector_spectral(two_n, two_nu, other)?;
        push("branch_orthogonality", max_abs(&mul(&p.matrix, &q.matrix)));
    }

    let fiber_dim = two_nu.dim();
    let pf = FiberForm::function(&ctx, p.matrix.clone())?;
    let dp = exterior_d(&ctx, &pf)?;
    push("d_squared_0form", exterior_d(&ctx, &dp)?.max_abs());
    push("d_squared_1form", exterior_d(&ctx, &exterior_d(&ctx, &dp.left_mul(&p.matrix))?)?.max_abs());
    let th = theta(&ctx);
    push("maurer_cartan", exterior_d(&ctx, &th)?.add(&wedge(&th, &th)?)?.max_abs());
    let phi = mul(&ctx.y[0], &ctx.y[2]) + &ctx.y[1] * I;
    let phi_form = FiberForm::function(&ctx, phi)?;
    let d_inner = exterior_d(&ctx, &phi_form)?.add(&graded_commutator(&th, &phi_form)?)?;
    push("d_inner", d_inner.max_abs());
    let om = volume_form(&ctx);
    let (lambda, _) = two_form_coefficient(&om, &om)?;
    let integral = nc_integral(&ctx, &(identity(ctx.dim()) * lambda))?;
    push("volume_integral", (integral - c(1.0)).norm());

    let curvature = curvature_two_form(&ctx, &p)?;
    push("cocycle", exterior_d(&ctx, &curvature)?.max_abs());
    let (_, proportionality) = two_form_coefficient(&curvature, &invariant_two_form(&ctx))?;
    push("proportionality", proportionality);

    let h = highest_weight(two_n, two_nu, branch)?;
    let lemma3 = lemma3_check(&ctx, &p, &h)?;
    push("lemma3", lemma3.relative_gap());
    push("b_decomposition", lemma3.decomposition_gap());
    push("lambda_mu", lambda_mu_check(two_n, two_nu, branch)?.max_gap());
    push("binomial_identities", binomial_grid_residual()?);

    let f_numeric = extract_f(&ctx, &p)?;
    let f_closed = f_closed_form(two_n, two_nu, branch)?;
    push("f_oracle", (f_numeric - f_closed).norm() / f_closed.norm().max(1.0));
    push("f_real_part", f_numeric.re.abs());

    // A fixed element of the row module {psi : psi p = psi}.
    let seed_row = kron(&(&ctx.y[0] + &ctx.y[1] * I + &ctx.y[2]), &identity(fiber_dim));
    let psi = mul(&seed_row, &p.matrix);
    push("connection_curvature", connection_consistency(&ctx, &p, &psi)?);

    if opts.suite == Suite::Full {
        let mc = projector_haar_mc(two_n, two_nu, branch, opts.samples, opts.seed)?;
        checks.push(Check {
            name: "haar_mc",
            residual: frobenius(&(&mc.matrix - &p.matrix)),
            threshold: HAAR_TOLERANCE,
        });
    }
    Ok(checks)
}

/// Number of failing `(variant, n, l)` cells over `0 <= l < n <= 60`
/// (variant A also at `l = n`).
pub fn binomial_grid_residual() -> Result<f64> {
    let mut failures = 0u32;
    for n in 0..=BINOMIAL_GRID_MAX {
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
    Ok(f64::from(failures))
}
