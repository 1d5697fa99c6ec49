//! The fuzzy sphere algebra `A_N` and its free differential calculus built on
//! the three inner derivations `e_a = [X_a, .]`.
//!
//! A p-form is stored by its values on strictly increasing index tuples of
//! derivations; coefficients live in `A_N ⊗ End(V)` for a fiber `V`, with the
//! `A_N` factor first in Kronecker order. Forms of degree above three vanish
//! identically and are represented with no components.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, hs_inner, identity, kron, levi_civita, mul, third_index, CMatrix, I};
use crate::spin::{make_spin_rep, SpinRep, TwoJ};

/// The matrix algebra `A_N` with its generators.
#[derive(Clone, Debug)]
pub struct FuzzyContext {
    pub two_n: TwoJ,
    pub rep: SpinRep,
    /// `X_1, X_2, X_3`
    pub x: [CMatrix; 3],
    /// `Y_a = X_a / sqrt(N(N+1))`, so that `sum_a Y_a^2 = 1`.
    pub y: [CMatrix; 3],
}

impl FuzzyContext {
    pub fn new(two_n: TwoJ) -> Result<Self> {
        if two_n.value() == 0 {
            return Err(Error::Domain("the fuzzy sphere needs N >= 1/2".into()));
        }
        let rep = make_spin_rep(two_n);
        let x = [rep.x1.clone(), rep.x2.clone(), rep.x3.clone()];
        let scale = c(1.0 / two_n.casimir().sqrt());
        let y = [&x[0] * scale, &x[1] * scale, &x[2] * scale];
        Ok(FuzzyContext { two_n, rep, x, y })
    }

    /// `2N + 1`
    pub fn dim(&self) -> usize {
        self.two_n.dim()
    }

    /// `X_a ⊗ 1_V`
    pub fn lifted_generator(&self, a: usize, fiber_dim: usize) -> CMatrix {
        if fiber_dim == 1 {
            self.x[a].clone()
        } else {
            kron(&self.x[a], &identity(fiber_dim))
        }
    }

    fn fiber_of(&self, m: &CMatrix) -> Result<usize> {
        let base = self.dim();
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(base) || m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: base,
                got: m.nrows(),
            });
        }
        Ok(m.nrows() / base)
    }
}

/// One of the three derivations `e_1, e_2, e_3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivationIndex(u8);

impl DerivationIndex {
    pub const E1: DerivationIndex = DerivationIndex(1);
    pub const E2: DerivationIndex = DerivationIndex(2);
    pub const E3: DerivationIndex = DerivationIndex(3);

    pub fn new(a: u8) -> Result<Self> {
        if (1..=3).contains(&a) {
            Ok(DerivationIndex(a))
        } else {
            Err(Error::Domain(format!("derivation index {a} outside 1..=3")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub(crate) fn zero_based(self) -> usize {
        usize::from(self.0 - 1)
    }
}

const TUPLES_0: &[&[usize]] = &[&[]];
const TUPLES_1: &[&[usize]] = &[&[0], &[1], &[2]];
const TUPLES_2: &[&[usize]] = &[&[0, 1], &[0, 2], &[1, 2]];
const TUPLES_3: &[&[usize]] = &[&[0, 1, 2]];

/// Strictly increasing zero-based index tuples of a given degree, in storage order.
pub fn index_tuples(degree: usize) -> &'static [&'static [usize]] {
    match degree {
        0 => TUPLES_0,
        1 => TUPLES_1,
        2 => TUPLES_2,
        3 => TUPLES_3,
        _ => &[],
    }
}

fn tuple_position(sorted: &[usize]) -> usize {
    index_tuples(sorted.len())
        .iter()
        .position(|t| *t == sorted)
        .expect("sorted tuple of distinct indices below 3")
}

/// Sorts `indices` in place and returns the permutation sign, or `None` on a repeat.
fn sort_with_sign(indices: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..indices.len() {
        for j in 0..indices.len() - 1 - i {
            if indices[j] > indices[j + 1] {
                indices.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// A degree-p antisymmetric form on the derivations with values in `A_N ⊗ End(V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberForm {
    degree: usize,
    base_dim: usize,
    fiber_dim: usize,
    components: Vec<CMatrix>,
}

impl FiberForm {
    pub fn from_components(
        degree: usize,
        base_dim: usize,
        fiber_dim: usize,
        components: Vec<CMatrix>,
    ) -> Result<Self> {
        let expected = index_tuples(degree).len();
        if components.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: components.len(),
            });
        }
        let dim = base_dim * fiber_dim;
        for m in &components {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows(),
                });
            }
        }
        Ok(FiberForm {
            degree,
            base_dim,
            fiber_dim,
            components,
        })
    }

    /// The zero form. Degrees above three carry no components.
    pub fn zero(degree: usize, base_dim: usize, fiber_dim: usize) -> Self {
        let dim = base_dim * fiber_dim;
        FiberForm {
            degree,
            base_dim,
            fiber_dim,
            components: vec![CMatrix::zeros(dim, dim); index_tuples(degree).len()],
        }
    }

    /// A 0-form.
    pub fn function(ctx: &FuzzyContext, m: CMatrix) -> Result<Self> {
        let fiber_dim = ctx.fiber_of(&m)?;
        Ok(FiberForm {
            degree: 0,
            base_dim: ctx.dim(),
            fiber_dim,
            components: vec![m],
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn matrix_dim(&self) -> usize {
        self.base_dim * self.fiber_dim
    }

    /// Values on increasing index tuples, in [`index_tuples`] order.
    pub fn components(&self) -> &[CMatrix] {
        &self.components
    }

    /// True when the degree exceeds three, i.e. the form is zero by construction.
    pub fn is_overflow(&self) -> bool {
        self.degree > 3
    }

    /// Evaluates on derivations given by zero-based indices in any order.
    pub fn eval(&self, indices: &[usize]) -> CMatrix {
        assert_eq!(indices.len(), self.degree, "wrong number of arguments");
        let dim = self.matrix_dim();
        if self.is_overflow() {
            return CMatrix::zeros(dim, dim);
        }
        let mut sorted = indices.to_vec();
        match sort_with_sign(&mut sorted) {
            Some(sign) => &self.components[tuple_position(&sorted)] * c(sign),
            None => CMatrix::zeros(dim, dim),
        }
    }

    /// Evaluates on `(e_a, e_b, ...)` with one-based derivation indices.
    pub fn at(&self, args: &[DerivationIndex]) -> CMatrix {
        let idx: Vec<usize> = args.iter().map(|a| a.zero_based()).collect();
        self.eval(&idx)
    }

    fn check_compatible(&self, other: &FiberForm) -> Result<()> {
        if self.base_dim != other.base_dim || self.fiber_dim != other.fiber_dim {
            return Err(Error::DimensionMismatch {
                expected: self.matrix_dim(),
                got: other.matrix_dim(),
            });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> FiberForm {
        FiberForm {
            components: self.components.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: Complex64) -> FiberForm {
        self.map(|m| m * s)
    }

    pub fn add(&self, other: &FiberForm) -> Result<FiberForm> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::Domain(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(FiberForm {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &FiberForm) -> Result<FiberForm> {
        self.add(&other.scale(c(-1.0)))
    }

    /// `m · form`, coefficientwise.
    pub fn left_mul(&self, m: &CMatrix) -> FiberForm {
        self.map(|x| mul(m, x))
    }

    /// `form · m`, coefficientwise.
    pub fn right_mul(&self, m: &CMatrix) -> FiberForm {
        self.map(|x| mul(x, m))
    }

    /// `form ⊗ 1_V` for a scalar-fiber form.
    pub fn tensor_identity(&self, fiber_dim: usize) -> FiberForm {
        assert_eq!(self.fiber_dim, 1, "tensor_identity expects a scalar-fiber form");
        let id = identity(fiber_dim);
        FiberForm {
            degree: self.degree,
            base_dim: self.base_dim,
            fiber_dim,
            components: self.components.iter().map(|m| kron(m, &id)).collect(),
        }
    }

    /// Partial trace over `End(V)`, giving a scalar-fiber form.
    pub fn fiber_trace(&self) -> FiberForm {
        FiberForm {
            degree: self.degree,
            base_dim: self.base_dim,
            fiber_dim: 1,
            components: self
                .components
                .iter()
                .map(|m| crate::linalg::partial_trace_fiber(m, self.fiber_dim))
                .collect(),
        }
    }

    /// Largest entry modulus over all components.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(crate::linalg::max_abs)
            .fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt pairing summed over components.
    pub fn hs_inner(&self, other: &FiberForm) -> Complex64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| hs_inner(a, b))
            .sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_inner(self).re.max(0.0).sqrt()
    }
}

/// `e_a(phi) = [X_a ⊗ 1_V, phi]`.
pub fn derive(ctx: &FuzzyContext, a: DerivationIndex, phi: &CMatrix) -> Result<CMatrix> {
    let fiber = ctx.fiber_of(phi)?;
    Ok(commutator(&ctx.lifted_generator(a.zero_based(), fiber), phi))
}

/// Exterior derivative via the Chevalley-Eilenberg formula with
/// `[e_a, e_b] = i eps_abc e_c`.
pub fn exterior_d(ctx: &FuzzyContext, form: &FiberForm) -> Result<FiberForm> {
    if form.base_dim != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            got: form.base_dim,
        });
    }
    let p = form.degree;
    if p >= 3 {
        return Ok(FiberForm::zero(p + 1, form.base_dim, form.fiber_dim));
    }
    let lifted: Vec<CMatrix> = (0..3).map(|a| ctx.lifted_generator(a, form.fiber_dim)).collect();
    let dim = form.matrix_dim();
    let components = index_tuples(p + 1)
        .iter()
        .map(|u| {
            let mut acc = CMatrix::zeros(dim, dim);
            for i in 0..u.len() {
                let rest: Vec<usize> = u.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
                let term = commutator(&lifted[u[i]], &form.eval(&rest));
                acc += term * c(parity(i));
            }
            for i in 0..u.len() {
                for j in (i + 1)..u.len() {
                    let rest: Vec<usize> = u
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, &x)| x)
                        .collect();
                    for k in 0..3 {
                        let eps = levi_civita(u[i], u[j], k);
                        if eps == 0.0 {
                            continue;
                        }
                        let mut args = Vec::with_capacity(p);
                        args.push(k);
                        args.extend_from_slice(&rest);
                        acc += form.eval(&args) * (I * (eps * parity(i + j)));
                    }
                }
            }
            acc
        })
        .collect();
    Ok(FiberForm {
        degree: p + 1,
        base_dim: form.base_dim,
        fiber_dim: form.fiber_dim,
        components,
    })
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Wedge product with unit-weight shuffle sums; coefficients multiply as
/// matrices in order. For 1-forms, `(a ∧ b)(u, v) = a(u) b(v) - a(v) b(u)`.
pub fn wedge(alpha: &FiberForm, beta: &FiberForm) -> Result<FiberForm> {
    alpha.check_compatible(beta)?;
    let (p, q) = (alpha.degree, beta.degree);
    if p + q > 3 {
        return Ok(FiberForm::zero(p + q, alpha.base_dim, alpha.fiber_dim));
    }
    let dim = alpha.matrix_dim();
    let components = index_tuples(p + q)
        .iter()
        .map(|u| {
            let mut acc = CMatrix::zeros(dim, dim);
            for mask in 0u32..(1 << u.len()) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let (mut left, mut right) = (Vec::with_capacity(p), Vec::with_capacity(q));
                let mut inversions = 0;
                for (pos, &idx) in u.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        left.push(idx);
                        inversions += right.len();
                    } else {
                        right.push(idx);
                    }
                }
                acc += mul(&alpha.eval(&left), &beta.eval(&right)) * c(parity(inversions));
            }
            acc
        })
        .collect();
    Ok(FiberForm {
        degree: p + q,
        base_dim: alpha.base_dim,
        fiber_dim: alpha.fiber_dim,
        components,
    })
}

/// Graded commutator `[a, b] = a ∧ b - (-1)^(pq) b ∧ a`.
pub fn graded_commutator(alpha: &FiberForm, beta: &FiberForm) -> Result<FiberForm> {
    let sign = parity(alpha.degree * beta.degree);
    wedge(alpha, beta)?.sub(&wedge(beta, alpha)?.scale(c(sign)))
}

/// The Maurer-Cartan form, `Theta(e_a) = -X_a`.
pub fn theta(ctx: &FuzzyContext) -> FiberForm {
    FiberForm {
        degree: 1,
        base_dim: ctx.dim(),
        fiber_dim: 1,
        components: ctx.x.iter().map(|x| -x).collect(),
    }
}

/// Dual basis one-form, `Theta_a(e_b) = delta_ab`.
pub fn theta_basis(ctx: &FuzzyContext, a: DerivationIndex) -> FiberForm {
    let dim = ctx.dim();
    let components = (0..3)
        .map(|b| {
            if b == a.zero_based() {
                identity(dim)
            } else {
                CMatrix::zeros(dim, dim)
            }
        })
        .collect();
    FiberForm {
        degree: 1,
        base_dim: dim,
        fiber_dim: 1,
        components,
    }
}

fn d_function(ctx: &FuzzyContext, m: &CMatrix) -> FiberForm {
    exterior_d(ctx, &FiberForm::function(ctx, m.clone()).expect("square A_N element"))
        .expect("context-matched form")
}

/// `omega = eps_abc Y_a dY_b ∧ dY_c / (8 pi)`.
pub fn volume_form(ctx: &FuzzyContext) -> FiberForm {
    let dy: Vec<FiberForm> = ctx.y.iter().map(|y| d_function(ctx, y)).collect();
    let mut acc = FiberForm::zero(2, ctx.dim(), 1);
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let k = third_index(a, b);
            let eps = levi_civita(a, b, k);
            let term = wedge(&dy[b], &dy[k]).expect("same context").left_mul(&ctx.y[a]);
            acc = acc.add(&term.scale(c(eps))).expect("same shape");
        }
    }
    acc.scale(c(1.0 / (8.0 * std::f64::consts::PI)))
}

/// `eps_abc X_c Theta_a ∧ Theta_b`, the invariant two-form spanning the
/// equivariant two-forms.
pub fn invariant_two_form(ctx: &FuzzyContext) -> FiberForm {
    let basis: Vec<FiberForm> = [DerivationIndex::E1, DerivationIndex::E2, DerivationIndex::E3]
        .iter()
        .map(|&a| theta_basis(ctx, a))
        .collect();
    let mut acc = FiberForm::zero(2, ctx.dim(), 1);
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let k = third_index(a, b);
            let term = wedge(&basis[a], &basis[b]).expect("same context").left_mul(&ctx.x[k]);
            acc = acc.add(&term.scale(c(levi_civita(a, b, k)))).expect("same shape");
        }
    }
    acc
}

/// `∫* phi omega = Tr(phi) / (2N + 1)`.
pub fn nc_integral(ctx: &FuzzyContext, phi: &CMatrix) -> Result<Complex64> {
    if ctx.fiber_of(phi)? != 1 {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            got: phi.nrows(),
        });
    }
    Ok(phi.trace() / c(ctx.dim() as f64))
}

/// Hilbert-Schmidt projection of a two-form onto the line spanned by `basis`.
///
/// Returns the coefficient and the relative residual `|G - lambda basis| / |G|`
/// (zero when `G` vanishes).
pub fn two_form_coefficient(g: &FiberForm, basis: &FiberForm) -> Result<(Complex64, f64)> {
    g.check_compatible(basis)?;
    if g.degree != 2 || basis.degree != 2 || g.fiber_dim != 1 {
        return Err(Error::Domain("two_form_coefficient expects scalar-fiber two-forms".into()));
    }
    let bb = basis.hs_inner(basis).re;
    if bb == 0.0 {
        return Err(Error::ZeroBasis);
    }
    let lambda = basis.hs_inner(g) / bb;
    let g_norm = g.hs_norm();
    let residual = if g_norm == 0.0 {
        0.0
    } else {
        g.sub(&basis.scale(lambda))?.hs_norm() / g_norm
    };
    Ok((lambda, residual))
}
