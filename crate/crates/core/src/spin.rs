//! Irreducible su(2) representations, the polynomial (Schwinger) realization,
//! and highest-weight vectors of the extremal blocks in `[N] ⊗ [nu]`.
//!
//! Spins are carried doubled ([`TwoJ`]) so half-integers stay exact. Ladder
//! bases are ordered by descending magnetic number, which makes `x_plus`
//! strictly upper triangular and puts the highest weight first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, kron, CMatrix, CVector, I};

/// Twice a spin. Spin `j = value / 2`, dimension `value + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoJ(pub u32);

impl TwoJ {
    pub fn new(value: u32) -> Self {
        TwoJ(value)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn spin(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// `j (j + 1)`
    pub fn casimir(self) -> f64 {
        let j = self.spin();
        j * (j + 1.0)
    }
}

impl fmt::Display for TwoJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Which extremal block of `[N] ⊗ [nu]` a projector selects: `[N + nu]` or `[N - nu]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }

    /// Doubled target spin `2(N ± nu)`, checking the `N > nu` requirement of
    /// the minus branch.
    pub fn target(self, two_n: TwoJ, two_nu: TwoJ) -> Result<TwoJ> {
        match self {
            Branch::Plus => Ok(TwoJ(two_n.0 + two_nu.0)),
            Branch::Minus if two_n.0 > two_nu.0 => Ok(TwoJ(two_n.0 - two_nu.0)),
            Branch::Minus => Err(Error::BranchDomain {
                branch: self,
                two_n: two_n.0,
                two_nu: two_nu.0,
            }),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(format!("unknown branch '{other}' (expected plus or minus)")),
        }
    }
}

/// Spin-j irreducible representation matrices.
#[derive(Clone, Debug)]
pub struct SpinRep {
    pub two_j: TwoJ,
    pub x1: CMatrix,
    pub x2: CMatrix,
    pub x3: CMatrix,
    pub x_plus: CMatrix,
    pub x_minus: CMatrix,
}

impl SpinRep {
    fn from_ladder(two_j: TwoJ, x3: CMatrix, x_plus: CMatrix, x_minus: CMatrix) -> Self {
        let x1 = (&x_plus + &x_minus) * c(0.5);
        let x2 = (&x_plus - &x_minus) / (I * 2.0);
        SpinRep {
            two_j,
            x1,
            x2,
            x3,
            x_plus,
            x_minus,
        }
    }

    pub fn dim(&self) -> usize {
        self.two_j.dim()
    }

    /// Generators as an array indexed `0..3` for `x1, x2, x3`.
    pub fn generators(&self) -> [&CMatrix; 3] {
        [&self.x1, &self.x2, &self.x3]
    }

    pub fn casimir(&self) -> CMatrix {
        &self.x1 * &self.x1 + &self.x2 * &self.x2 + &self.x3 * &self.x3
    }

    /// `U x_a U^dagger` for every generator.
    pub fn conjugated(&self, u: &CMatrix) -> SpinRep {
        let conj = |m: &CMatrix| u * m * u.adjoint();
        SpinRep {
            two_j: self.two_j,
            x1: conj(&self.x1),
            x2: conj(&self.x2),
            x3: conj(&self.x3),
            x_plus: conj(&self.x_plus),
            x_minus: conj(&self.x_minus),
        }
    }
}

/// Ladder-basis representation, basis ordered `m = j, j-1, ..., -j`.
pub fn make_spin_rep(two_j: TwoJ) -> SpinRep {
    let dim = two_j.dim();
    let j = two_j.spin();
    let m_of = |idx: usize| j - idx as f64;

    let x3 = CMatrix::from_fn(dim, dim, |r, col| if r == col { c(m_of(r)) } else { c(0.0) });
    let x_plus = CMatrix::from_fn(dim, dim, |r, col| {
        if col == r + 1 {
            let m = m_of(col);
            c((j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt())
        } else {
            c(0.0)
        }
    });
    let x_minus = x_plus.adjoint();
    SpinRep::from_ladder(two_j, x3, x_plus, x_minus)
}

pub(crate) fn binomial_f64(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Spin-`n/2` representation on degree-`n` homogeneous polynomials in
/// `z1, z2`, written in the orthonormal basis `psi_k = sqrt(C(n,k)) z1^k z2^(n-k)`.
///
/// Generators come from `a_i^dagger = z_i`, `a_i = d/dz_i`:
/// `X_+ = a1^dagger a2`, `X_- = a2^dagger a1`, `X_3 = (a1^dagger a1 - a2^dagger a2)/2`.
/// Also returns the permutation `U` with `U S U^dagger` equal to the ladder rep.
pub fn schwinger_rep(two_n: TwoJ) -> (SpinRep, CMatrix) {
    let n = two_n.0;
    let dim = two_n.dim();
    let norm = |k: u32| binomial_f64(n, k).sqrt();

    // Monomial z1^k z2^(n-k) is psi_k / norm(k).
    let mut x_plus = CMatrix::zeros(dim, dim);
    let mut x_minus = CMatrix::zeros(dim, dim);
    let mut x3 = CMatrix::zeros(dim, dim);
    for k in 0..=n {
        let col = k as usize;
        // z1 d/dz2 z1^k z2^(n-k) = (n-k) z1^(k+1) z2^(n-k-1)
        if k < n {
            x_plus[(col + 1, col)] = c(f64::from(n - k) * norm(k) / norm(k + 1));
        }
        // z2 d/dz1 z1^k z2^(n-k) = k z1^(k-1) z2^(n-k+1)
        if k > 0 {
            x_minus[(col - 1, col)] = c(f64::from(k) * norm(k) / norm(k - 1));
        }
        x3[(col, col)] = c(0.5 * (f64::from(k) - f64::from(n - k)));
    }

    let unitary = CMatrix::from_fn(dim, dim, |r, col| {
        if r + col == n as usize {
            c(1.0)
        } else {
            c(0.0)
        }
    });
    (SpinRep::from_ladder(two_n, x3, x_plus, x_minus), unitary)
}

/// A highest-weight vector of `[N ± nu]` inside `[N] ⊗ [nu]`, in the ladder
/// tensor basis `|N, m> ⊗ |nu, m'>` (index `i_N * (2nu + 1) + i_nu`).
#[derive(Clone, Debug)]
pub struct WeightVector {
    pub coefficients: CVector,
    pub two_n: TwoJ,
    pub two_l: TwoJ,
    pub branch: Branch,
}

/// Coefficients `a_k` of the minus-branch ansatz
/// `sum_k a_k z2^k z1^(n-k) ⊗ z1^k z2^(l-k)`, from the recursion
/// `(k - l) a_k = (k + 1) a_(k+1)` with `a_0 = sqrt((n-l+1)/(n+1)) > 0`.
pub fn minus_ansatz_coefficients(n: u32, l: u32) -> Vec<f64> {
    let mut a = Vec::with_capacity(l as usize + 1);
    a.push((f64::from(n - l + 1) / f64::from(n + 1)).sqrt());
    for k in 0..l {
        let next = (f64::from(k) - f64::from(l)) / f64::from(k + 1) * a[k as usize];
        a.push(next);
    }
    a
}

pub fn highest_weight(two_n: TwoJ, two_l: TwoJ, branch: Branch) -> Result<WeightVector> {
    branch.target(two_n, two_l)?;
    let (n, l) = (two_n.0, two_l.0);
    let fiber = two_l.dim();
    let mut coefficients = CVector::zeros(two_n.dim() * fiber);
    match branch {
        Branch::Plus => coefficients[0] = c(1.0),
        Branch::Minus => {
            // z2^k z1^(n-k) = psi_(n-k) / sqrt(C(n,k)), ladder index k;
            // z1^k z2^(l-k) = psi_k / sqrt(C(l,k)), ladder index l-k.
            for (k, a) in minus_ansatz_coefficients(n, l).into_iter().enumerate() {
                let ku = k as u32;
                let scale = (binomial_f64(n, ku) * binomial_f64(l, ku)).sqrt();
                coefficients[k * fiber + (l as usize - k)] = c(a / scale);
            }
        }
    }
    Ok(WeightVector {
        coefficients,
        two_n,
        two_l,
        branch,
    })
}

/// Total generators `x_a ⊗ 1 + 1 ⊗ y_a` of two representations.
pub fn kron_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let ia = CMatrix::identity(a.nrows(), a.nrows());
    let ib = CMatrix::identity(b.nrows(), b.nrows());
    kron(a, &ib) + kron(&ia, b)
}
