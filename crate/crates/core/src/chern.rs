//! Chern character of the fuzzy line bundles and the charges derived from it.
//!
//! For a projector `p ∈ A_N ⊗ End([nu])` the curvature two-form is
//! `F = Tr_2 p (dp ∧ dp)`, with `d` acting on the `A_N` factor only. By
//! equivariance `F = f eps_abc X_c Theta_a ∧ Theta_b`; the scalar `f` is read
//! off from a full double trace and compared against its closed form.
//!
//! Two component conventions appear here. The single-term object
//! `M_ab = Tr_2(p dp(e_a) dp(e_b))` has antisymmetric part `f eps_abd X_d`
//! (its symmetric part is nonzero but drops out of every contraction with
//! `eps`), while the wedge-built `F(e_a, e_b) = M_ab - M_ba = 2 f eps_abc X_c`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    exterior_d, invariant_two_form, nc_integral, two_form_coefficient, volume_form, wedge, FiberForm, FuzzyContext,
};
use crate::error::{Error, Result};
use crate::linalg::{c, commutator, levi_civita, max_abs, mul, partial_trace_fiber, third_index, CMatrix, CVector, I};
use crate::projector::{projector_orbit, total_generators, EquivariantProjector};
use crate::spin::{highest_weight, Branch, TwoJ, WeightVector};

/// Tolerance on the imaginary part discarded when converting `f` to `q`.
pub const REAL_TOLERANCE: f64 = 1e-10;

fn check_context(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<()> {
    let expected = ctx.dim() * p.two_nu.dim();
    if ctx.two_n != p.two_n || p.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: p.dim(),
        });
    }
    Ok(())
}

fn lifted(ctx: &FuzzyContext, p: &EquivariantProjector) -> [CMatrix; 3] {
    let fiber = p.two_nu.dim();
    std::array::from_fn(|a| ctx.lifted_generator(a, fiber))
}

/// `dp(e_a) = [X_a ⊗ 1, p]`, a one-form with fiber `End([nu])`.
pub fn d_projector(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<FiberForm> {
    check_context(ctx, p)?;
    let x = lifted(ctx, p);
    FiberForm::from_components(
        1,
        ctx.dim(),
        p.two_nu.dim(),
        x.iter().map(|xa| commutator(xa, &p.matrix)).collect(),
    )
}

/// `M_ab = Tr_2(p dp(e_a) dp(e_b))` for all ordered pairs.
pub fn single_term_curvature(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<[[CMatrix; 3]; 3]> {
    let dp = d_projector(ctx, p)?;
    let fiber = p.two_nu.dim();
    let comps = dp.components();
    Ok(std::array::from_fn(|a| {
        std::array::from_fn(|b| partial_trace_fiber(&mul(&mul(&p.matrix, &comps[a]), &comps[b]), fiber))
    }))
}

/// `Ch_r(p) = Tr_2 p (dp)^(2r) / r!`, a scalar-fiber form of degree `2r`.
///
/// `r = 0` gives `Tr_2 p`, `r = 1` the curvature two-form; every higher
/// component vanishes because there are no forms above degree three.
pub fn chern_component(ctx: &FuzzyContext, p: &EquivariantProjector, r: usize) -> Result<FiberForm> {
    let dp = d_projector(ctx, p)?;
    let mut acc = FiberForm::function(ctx, p.matrix.clone())?;
    for _ in 0..2 * r {
        acc = wedge(&acc, &dp)?;
    }
    let factorial: f64 = (1..=r).map(|k| k as f64).product();
    Ok(acc.fiber_trace().scale(c(1.0 / factorial)))
}

/// `F = Tr_2 p (dp ∧ dp)`.
pub fn curvature_two_form(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<FiberForm> {
    chern_component(ctx, p, 1)
}

/// `eps_abc Tr(p dp(e_a) dp(e_b) (X_c ⊗ 1))`, the trace taken over both factors.
fn double_trace(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<Complex64> {
    let dp = d_projector(ctx, p)?;
    let x = lifted(ctx, p);
    let comps = dp.components();
    let mut acc = c(0.0);
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let k = third_index(a, b);
            let pda = mul(&p.matrix, &comps[a]);
            let db_xc = mul(&comps[b], &x[k]);
            // Tr(A B) without forming the product
            let tr: Complex64 = pda.transpose().iter().zip(db_xc.iter()).map(|(u, v)| u * v).sum();
            acc += tr * levi_civita(a, b, k);
        }
    }
    Ok(acc)
}

/// `f = eps_abc Tr(p dp(e_a) dp(e_b) X_c) / (2N(N+1)(2N+1))`.
pub fn extract_f(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<Complex64> {
    let n = ctx.two_n.spin();
    Ok(double_trace(ctx, p)? / c(2.0 * n * (n + 1.0) * (2.0 * n + 1.0)))
}

/// Closed form of `f / i` as an exact rational in the doubled spins `n = 2N`,
/// `l = 2nu`:
/// plus `-n l (n+l+1)(n+l+2) / (2 (n+l)^2 (n+1)(n+2))`,
/// minus `l (n+2)(n-l)(n-l+1) / (2 n (n+1)(n-l+2)^2)`.
pub fn f_closed_form_exact(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<Ratio<i128>> {
    branch.target(two_n, two_nu)?;
    if two_n.value() == 0 {
        return Err(Error::Domain("closed-form f needs N >= 1/2".into()));
    }
    let n = i128::from(two_n.value());
    let l = i128::from(two_nu.value());
    Ok(match branch {
        Branch::Plus => Ratio::new(
            -n * l * (n + l + 1) * (n + l + 2),
            2 * (n + l) * (n + l) * (n + 1) * (n + 2),
        ),
        Branch::Minus => Ratio::new(
            l * (n + 2) * (n - l) * (n - l + 1),
            2 * n * (n + 1) * (n - l + 2) * (n - l + 2),
        ),
    })
}

pub fn f_closed_form(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<Complex64> {
    let r = f_closed_form_exact(two_n, two_nu, branch)?;
    Ok(I * (*r.numer() as f64 / *r.denom() as f64))
}

/// `q = (4/i) (N(N+1))^(3/2) / (1/2 - N(N+1)) f`.
pub fn charge_q(f: Complex64, two_n: TwoJ) -> Result<f64> {
    if two_n.value() == 0 {
        return Err(Error::Domain("charge needs N >= 1/2".into()));
    }
    let cas = two_n.casimir();
    let raw = f * (cas.powf(1.5) / (0.5 - cas)) * 4.0 / I + c(0.0);
    if raw.im.abs() > REAL_TOLERANCE {
        return Err(Error::NonRealResult(raw.im.abs()));
    }
    Ok(raw.re)
}

/// Charges and cross-check residuals at one `(N, nu, branch)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub two_n: TwoJ,
    pub two_nu: TwoJ,
    pub branch: Branch,
    pub f_numeric: Complex64,
    pub f_closed: Complex64,
    pub q: f64,
    pub c1: f64,
    /// Commutative limit of `c1`: `-2nu` for plus, `+2nu` for minus.
    pub k_limit: i64,
    pub residuals: BTreeMap<String, f64>,
}

impl ChargeReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    /// Residuals at or above `tol`; NaN counts as a failure.
    pub fn failures(&self, tol: f64) -> Vec<(&str, f64)> {
        self.residuals
            .iter()
            .filter(|(_, &v)| v.is_nan() || v >= tol)
            .map(|(k, &v)| (k.as_str(), v))
            .collect()
    }
}

pub fn k_limit(two_nu: TwoJ, branch: Branch) -> i64 {
    let l = i64::from(two_nu.value());
    match branch {
        Branch::Plus => -l,
        Branch::Minus => l,
    }
}

/// Full report: `f` both ways, `q`, `c1 = -q`, and every cross-check.
pub fn chern_number(ctx: &FuzzyContext, p: &EquivariantProjector) -> Result<ChargeReport> {
    check_context(ctx, p)?;
    let (two_n, two_nu, branch) = (p.two_n, p.two_nu, p.branch);
    let f_numeric = extract_f(ctx, p)?;
    let f_closed = f_closed_form(two_n, two_nu, branch)?;
    let q = charge_q(f_numeric, two_n)?;
    let c1 = -q;

    let mut residuals = BTreeMap::new();
    residuals.insert(
        "f_oracle".to_string(),
        (f_numeric - f_closed).norm() / f_closed.norm().max(1.0),
    );
    residuals.insert("f_real_part".to_string(), f_numeric.re.abs());

    let curvature = curvature_two_form(ctx, p)?;
    let (_, proportionality) = two_form_coefficient(&curvature, &invariant_two_form(ctx))?;
    residuals.insert("proportionality".to_string(), proportionality);
    residuals.insert("cocycle".to_string(), exterior_d(ctx, &curvature)?.max_abs());

    // Second route: F = lambda omega, c1 = (i / 2 pi) ∫* F.
    let (lambda, _) = two_form_coefficient(&curvature, &volume_form(ctx))?;
    let integral = nc_integral(ctx, &(CMatrix::identity(ctx.dim(), ctx.dim()) * lambda))?;
    let c1_alt = I * integral / (2.0 * PI);
    residuals.insert("c1_routes".to_string(), (c1_alt - c(c1)).norm());

    let h = highest_weight(two_n, two_nu, branch)?;
    let lemma3 = lemma3_check(ctx, p, &h)?;
    residuals.insert("lemma3".to_string(), lemma3.relative_gap());
    residuals.insert("b_decomposition".to_string(), lemma3.decomposition_gap());

    let gens = total_generators(two_n, two_nu);
    let gaps = p.gaps(&gens);
    residuals.insert("hermiticity".to_string(), gaps.hermiticity);
    residuals.insert("idempotence".to_string(), gaps.idempotence);
    residuals.insert("trace".to_string(), gaps.trace);
    residuals.insert("equivariance".to_string(), gaps.equivariance);
    let orbit = projector_orbit(two_n, two_nu, branch)?;
    residuals.insert("spectral_vs_orbit".to_string(), max_abs(&(&p.matrix - &orbit.matrix)));

    Ok(ChargeReport {
        two_n,
        two_nu,
        branch,
        f_numeric,
        f_closed,
        q,
        c1,
        k_limit: k_limit(two_nu, branch),
        residuals,
    })
}

/// Both sides of the reduction of the double trace to a highest-weight
/// expectation value, plus the split `B = C + i D`.
#[derive(Clone, Copy, Debug)]
pub struct Lemma3Report {
    /// `eps_abc Tr(p dp(e_a) dp(e_b) X_c)`
    pub lhs: Complex64,
    /// `(2(N ± nu) + 1) B`
    pub rhs: Complex64,
    /// `eps_abc <h|[X_a,p][X_b,p] X_c|h>`
    pub b: Complex64,
    /// `eps_abc <h|X_a p X_b p X_c|h>`, purely imaginary
    pub c: Complex64,
    /// `-<h|X_a p X_a|h>`, real
    pub d: Complex64,
}

impl Lemma3Report {
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.lhs.norm().max(1.0)
    }

    pub fn decomposition_gap(&self) -> f64 {
        (self.b - (self.c + I * self.d)).norm()
    }
}

pub fn lemma3_check(ctx: &FuzzyContext, p: &EquivariantProjector, h: &WeightVector) -> Result<Lemma3Report> {
    check_context(ctx, p)?;
    if h.branch != p.branch {
        return Err(Error::BranchMismatch {
            vector: h.branch,
            projector: p.branch,
        });
    }
    if h.coefficients.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: h.coefficients.len(),
        });
    }
    let x = lifted(ctx, p);
    let pm = &p.matrix;
    let hv = &h.coefficients;
    let expect = |v: &CVector| hv.dotc(v);

    let mut b = c(0.0);
    let mut cc = c(0.0);
    for a in 0..3 {
        for bb in 0..3 {
            if a == bb {
                continue;
            }
            let k = third_index(a, bb);
            let eps = levi_civita(a, bb, k);
            let xc_h = &x[k] * hv;
            let comm_b = commutator(&x[bb], pm) * &xc_h;
            b += expect(&(commutator(&x[a], pm) * comm_b)) * eps;
            cc += expect(&(&x[a] * (pm * (&x[bb] * (pm * &xc_h))))) * eps;
        }
    }
    let d = -(0..3).map(|a| expect(&(&x[a] * (pm * (&x[a] * hv))))).sum::<Complex64>();

    let lhs = double_trace(ctx, p)?;
    let rhs = b * (p.block_dim() as f64);
    Ok(Lemma3Report { lhs, rhs, b, c: cc, d })
}

/// A numeric value and its closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormPair {
    pub numeric: Complex64,
    pub closed: f64,
}

impl ClosedFormPair {
    pub fn gap(&self) -> f64 {
        (self.numeric - c(self.closed)).norm()
    }
}

/// Intermediate quantities of the highest-weight computation of `f`.
#[derive(Clone, Debug)]
pub struct LambdaMuRecord {
    pub branch: Branch,
    /// `p X_1 |h> = lambda |v>` with `|v> = J_- |h>`
    pub lambda: ClosedFormPair,
    /// Minus branch: `p X_3 |h> = (n/2 - mu) |h>`
    pub mu: Option<ClosedFormPair>,
    /// Minus branch: `<v|X_3|v>`
    pub v_x3_v: Option<ClosedFormPair>,
    /// Plus branch: `<w|p|w>` with `|w> = X_1 |h>`
    pub w_p_w: Option<ClosedFormPair>,
    /// Plus branch: `<w|p X_3 p|w>`
    pub w_p_x3_p_w: Option<ClosedFormPair>,
    /// `B` rebuilt from the quantities above, and `B` from its definition.
    pub b_from_parts: Complex64,
    pub b_direct: Complex64,
}

impl LambdaMuRecord {
    pub fn pairs(&self) -> Vec<(&'static str, ClosedFormPair)> {
        let mut out = vec![("lambda", self.lambda)];
        for (name, pair) in [
            ("mu", self.mu),
            ("v_x3_v", self.v_x3_v),
            ("w_p_w", self.w_p_w),
            ("w_p_x3_p_w", self.w_p_x3_p_w),
        ] {
            if let Some(pair) = pair {
                out.push((name, pair));
            }
        }
        out
    }

    pub fn max_gap(&self) -> f64 {
        self.pairs()
            .iter()
            .map(|(_, p)| p.gap())
            .fold((self.b_from_parts - self.b_direct).norm(), f64::max)
    }
}

/// Evaluates the intermediate quantities on explicit vectors and compares
/// them with their closed forms in `n = 2N`, `l = 2nu`.
pub fn lambda_mu_check(two_n: TwoJ, two_l: TwoJ, branch: Branch) -> Result<LambdaMuRecord> {
    branch.target(two_n, two_l)?;
    if two_n.value() == 0 {
        return Err(Error::Domain("intermediate quantities need N >= 1/2".into()));
    }
    let ctx = FuzzyContext::new(two_n)?;
    let p = crate::projector::projector_spectral(two_n, two_l, branch)?;
    let gens = total_generators(two_n, two_l);
    let h = highest_weight(two_n, two_l, branch)?;
    let x = lifted(&ctx, &p);
    let hv = &h.coefficients;
    let pm = &p.matrix;
    let n = f64::from(two_n.value());
    let l = f64::from(two_l.value());

    let w = &x[0] * hv;
    let v = &gens.j_minus * hv;
    let vv = v.dotc(&v);
    let lambda_num = v.dotc(&w) / vv;
    let b_direct = lemma3_check(&ctx, &p, &h)?.b;

    let record = match branch {
        Branch::Plus => {
            let wpw = w.dotc(&(pm * &w));
            let wpx3pw = w.dotc(&(pm * (&x[2] * (pm * &w))));
            let b_from_parts = I * (2.0 * (n - 1.0)) * wpw - I * 2.0 * wpx3pw - I * (n * n / 4.0);
            LambdaMuRecord {
                branch,
                lambda: ClosedFormPair {
                    numeric: lambda_num,
                    closed: 0.5 * n / (n + l),
                },
                mu: None,
                v_x3_v: None,
                w_p_w: Some(ClosedFormPair {
                    numeric: wpw,
                    closed: n * n / (4.0 * (n + l)),
                }),
                w_p_x3_p_w: Some(ClosedFormPair {
                    numeric: wpx3pw,
                    closed: n * n / (8.0 * (n + l) * (n + l)) * (n * (n - 2.0) + n * l),
                }),
                b_from_parts,
                b_direct,
            }
        }
        Branch::Minus => {
            // X_3 |h> = (n/2)|h> - |K>
            let k_vec = hv * c(n / 2.0) - &x[2] * hv;
            let mu_num = hv.dotc(&k_vec);
            let vx3v = v.dotc(&(&x[2] * &v));
            let lam = lambda_num;
            let b_from_parts = I * 2.0 * lam * lam * ((c(n - 1.0) - mu_num * 2.0) * vv - vx3v)
                - I * (c(n / 2.0) - mu_num) * (c(n / 2.0) - mu_num);
            LambdaMuRecord {
                branch,
                lambda: ClosedFormPair {
                    numeric: lambda_num,
                    closed: 0.5 * (n + 2.0) / (n - l + 2.0),
                },
                mu: Some(ClosedFormPair {
                    numeric: mu_num,
                    closed: l / (n + 2.0 - l),
                }),
                v_x3_v: Some(ClosedFormPair {
                    numeric: vx3v,
                    closed: (n + 2.0) * (n - l - 2.0) * (n - l) / (2.0 * (n - l + 2.0)),
                }),
                w_p_w: None,
                w_p_x3_p_w: None,
                b_from_parts,
                b_direct,
            }
        }
    };
    Ok(record)
}

/// Residual of `∇²ψ = -ψ (dp ∧ dp) p` for the row module `{ψ : ψ p = ψ}` with
/// `∇ψ = (dψ) p`, maximized over the three two-form components.
pub fn connection_consistency(ctx: &FuzzyContext, p: &EquivariantProjector, psi: &CMatrix) -> Result<f64> {
    check_context(ctx, p)?;
    let pm = &p.matrix;
    let membership = max_abs(&(psi * pm - psi));
    if membership > 1e-12 * max_abs(psi).max(1.0) {
        return Err(Error::ModuleMembership(membership));
    }
    let d_psi = exterior_d(ctx, &FiberForm::function(ctx, psi.clone())?)?;
    let nabla = d_psi.right_mul(pm);
    let nabla_sq = exterior_d(ctx, &nabla)?.right_mul(pm);
    let dp = d_projector(ctx, p)?;
    let rhs = wedge(&dp, &dp)?.left_mul(psi).right_mul(pm);
    Ok(nabla_sq.add(&rhs)?.max_abs())
}
