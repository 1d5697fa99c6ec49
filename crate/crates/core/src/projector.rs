//! Equivariant projectors onto the extremal block `[N ± nu]` of `[N] ⊗ [nu]`.
//!
//! Three constructions of the same matrix:
//! - [`projector_spectral`]: Lagrange interpolation in the total Casimir
//!   (the production route),
//! - [`projector_orbit`]: the lowering orbit of the highest-weight vector,
//! - [`projector_haar_mc`]: a Monte-Carlo Haar average of the rotated
//!   highest-weight projector, scaled by the block dimension.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, hermitian_eigen, hermiticity_gap, identity, max_abs, mul, unitary_exp, CMatrix, CVector};
use crate::spin::{highest_weight, kron_sum, make_spin_rep, Branch, TwoJ};

/// `J_a = X_a ⊗ 1 + 1 ⊗ X_a^(nu)` on `[N] ⊗ [nu]`.
#[derive(Clone, Debug)]
pub struct TotalGenerators {
    pub two_n: TwoJ,
    pub two_nu: TwoJ,
    pub j: [CMatrix; 3],
    pub j_plus: CMatrix,
    pub j_minus: CMatrix,
    /// `J_1^2 + J_2^2 + J_3^2`
    pub casimir: CMatrix,
}

impl TotalGenerators {
    pub fn dim(&self) -> usize {
        self.two_n.dim() * self.two_nu.dim()
    }

    /// Doubled spins `|2N - 2nu|, ..., 2N + 2nu` of the blocks in the decomposition.
    pub fn block_spins(&self) -> impl Iterator<Item = TwoJ> {
        let lo = self.two_n.value().abs_diff(self.two_nu.value());
        let hi = self.two_n.value() + self.two_nu.value();
        (lo..=hi).step_by(2).map(TwoJ)
    }
}

pub fn total_generators(two_n: TwoJ, two_nu: TwoJ) -> TotalGenerators {
    let a = make_spin_rep(two_n);
    let b = make_spin_rep(two_nu);
    let j = [kron_sum(&a.x1, &b.x1), kron_sum(&a.x2, &b.x2), kron_sum(&a.x3, &b.x3)];
    let casimir = mul(&j[0], &j[0]) + mul(&j[1], &j[1]) + mul(&j[2], &j[2]);
    TotalGenerators {
        two_n,
        two_nu,
        j_plus: kron_sum(&a.x_plus, &b.x_plus),
        j_minus: kron_sum(&a.x_minus, &b.x_minus),
        j,
        casimir,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Orbit,
    HaarMc,
}

#[derive(Clone, Debug)]
pub struct EquivariantProjector {
    pub two_n: TwoJ,
    pub two_nu: TwoJ,
    pub branch: Branch,
    pub matrix: CMatrix,
    pub method: Method,
}

/// Deviations of a projector from its defining properties.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProjectorGaps {
    /// `max |p - p^dagger|`
    pub hermiticity: f64,
    /// `max |p^2 - p|`
    pub idempotence: f64,
    /// `|Tr p - (2(N ± nu) + 1)|`
    pub trace: f64,
    /// `max_a max |[J_a, p]|`
    pub equivariance: f64,
    /// Largest distance of an eigenvalue from `{0, 1}`.
    pub spectrum: f64,
    /// Number of eigenvalues above one half.
    pub rank: usize,
}

impl ProjectorGaps {
    pub fn max_gap(&self) -> f64 {
        [self.hermiticity, self.idempotence, self.trace, self.equivariance, self.spectrum]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl EquivariantProjector {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Doubled spin of the target block.
    pub fn target(&self) -> TwoJ {
        self.branch
            .target(self.two_n, self.two_nu)
            .expect("projector constructed with a valid branch")
    }

    /// `2(N ± nu) + 1`
    pub fn block_dim(&self) -> usize {
        self.target().dim()
    }

    /// Eigenvalues of the Hermitian part, plus the largest entry coupling
    /// different total-weight sectors when the spectrum was computed sector
    /// by sector (zero for small matrices, which are diagonalized whole).
    pub fn spectrum(&self) -> (Vec<f64>, f64) {
        let herm = (&self.matrix + self.matrix.adjoint()) * c(0.5);
        if herm.nrows() <= DENSE_EIGEN_LIMIT {
            return (hermitian_eigen(&herm).0, 0.0);
        }
        // index i_N * (2nu + 1) + i_nu has weight (N - i_N) + (nu - i_nu)
        let fiber = self.two_nu.dim();
        let sector = |i: usize| i / fiber + i % fiber;
        let sectors = self.two_n.dim() + fiber - 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); sectors];
        for i in 0..herm.nrows() {
            members[sector(i)].push(i);
        }
        let mut leakage: f64 = 0.0;
        for (j, col) in herm.column_iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                if sector(i) != sector(j) {
                    leakage = leakage.max(z.norm());
                }
            }
        }
        let mut values = Vec::with_capacity(herm.nrows());
        for idx in members {
            let block = CMatrix::from_fn(idx.len(), idx.len(), |r, s| herm[(idx[r], idx[s])]);
            values.extend(hermitian_eigen(&block).0);
        }
        values.sort_by(f64::total_cmp);
        (values, leakage)
    }

    pub fn gaps(&self, gens: &TotalGenerators) -> ProjectorGaps {
        let p = &self.matrix;
        let (values, leakage) = self.spectrum();
        ProjectorGaps {
            hermiticity: hermiticity_gap(p),
            idempotence: max_abs(&(mul(p, p) - p)),
            trace: (p.trace() - c(self.block_dim() as f64)).norm(),
            equivariance: gens.j.iter().map(|j| max_abs(&commutator(j, p))).fold(0.0, f64::max),
            spectrum: values.iter().map(|&l| l.abs().min((l - 1.0).abs())).fold(leakage, f64::max),
            rank: values.iter().filter(|&&l| l > 0.5).count(),
        }
    }
}

pub fn projector_spectral(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<EquivariantProjector> {
    let target = branch.target(two_n, two_nu)?;
    let gens = total_generators(two_n, two_nu);
    Ok(spectral_from(&gens, target, branch))
}

pub(crate) fn spectral_from(gens: &TotalGenerators, target: TwoJ, branch: Branch) -> EquivariantProjector {
    let dim = gens.dim();
    let s_target = target.casimir();
    let mut p = identity(dim);
    for s in gens.block_spins().filter(|&s| s != target) {
        let factor = (&gens.casimir - identity(dim) * c(s.casimir())) / c(s_target - s.casimir());
        p = mul(&p, &factor);
    }
    EquivariantProjector {
        two_n: gens.two_n,
        two_nu: gens.two_nu,
        branch,
        matrix: p,
        method: Method::Spectral,
    }
}

/// Orthonormal basis of `[N ± nu]` from repeated lowering of the highest weight.
pub fn orbit_basis(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<Vec<CVector>> {
    let target = branch.target(two_n, two_nu)?;
    let gens = total_generators(two_n, two_nu);
    let h = highest_weight(two_n, two_nu, branch)?;
    let expected = target.dim();
    let mut basis = vec![h.coefficients];
    while basis.len() < expected {
        let next = &gens.j_minus * basis.last().expect("nonempty");
        let norm = next.norm();
        if norm < 1e-8 {
            return Err(Error::NumericalBreakdown {
                collected: basis.len(),
                expected,
                norm,
            });
        }
        basis.push(next / c(norm));
    }
    Ok(basis)
}

pub fn projector_orbit(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<EquivariantProjector> {
    let basis = orbit_basis(two_n, two_nu, branch)?;
    let dim = two_n.dim() * two_nu.dim();
    let matrix = basis
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, v| acc + v * v.adjoint());
    Ok(EquivariantProjector {
        two_n,
        two_nu,
        branch,
        matrix,
        method: Method::Orbit,
    })
}

const HAAR_BATCH: usize = 4096;

const DENSE_EIGEN_LIMIT: usize = 128;

/// Uniform SU(2) element as a rotation angle and unit axis, drawn from a
/// normalized Gaussian quaternion.
fn sample_rotation(rng: &mut ChaCha8Rng) -> (f64, [f64; 3]) {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let vnorm = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if vnorm > 1e-300 {
            let angle = 2.0 * vnorm.atan2(q[0]);
            return (angle, [q[1] / vnorm, q[2] / vnorm, q[3] / vnorm]);
        }
    }
}

/// Monte-Carlo estimate of `(2s + 1) ∫ pi(g)|h><h|pi(g)^-1 dmu(g)`.
///
/// Samples are split into fixed-size batches; batch `b` draws from the ChaCha
/// stream `b` of `seed`, so the estimate is deterministic regardless of the
/// thread count.
pub fn projector_haar_mc(
    two_n: TwoJ,
    two_nu: TwoJ,
    branch: Branch,
    samples: usize,
    seed: u64,
) -> Result<EquivariantProjector> {
    let target = branch.target(two_n, two_nu)?;
    if samples == 0 {
        return Err(Error::Domain("Haar Monte-Carlo needs at least one sample".into()));
    }
    let gens = total_generators(two_n, two_nu);
    let h = highest_weight(two_n, two_nu, branch)?.coefficients;
    let dim = gens.dim();
    let batches = samples.div_ceil(HAAR_BATCH);

    let partial: Vec<CMatrix> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = HAAR_BATCH.min(samples - b * HAAR_BATCH);
            let mut acc = CMatrix::zeros(dim, dim);
            for _ in 0..count {
                let (angle, axis) = sample_rotation(&mut rng);
                let gen = &gens.j[0] * c(axis[0]) + &gens.j[1] * c(axis[1]) + &gens.j[2] * c(axis[2]);
                let v: DVector<_> = unitary_exp(&gen, angle) * &h;
                acc += &v * v.adjoint();
            }
            acc
        })
        .collect();
    let total = partial.into_iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    let matrix = total * c(target.dim() as f64 / samples as f64);
    Ok(EquivariantProjector {
        two_n,
        two_nu,
        branch,
        matrix,
        method: Method::HaarMc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;

    #[test]
    fn casimir_spectrum_one_tensor_half() {
        let gens = total_generators(TwoJ(2), TwoJ(1));
        let (values, _) = hermitian_eigen(&gens.casimir);
        let low = values.iter().filter(|&&v| (v - 0.75).abs() < 1e-10).count();
        let high = values.iter().filter(|&&v| (v - 3.75).abs() < 1e-10).count();
        assert_eq!((low, high), (2, 4));
    }

    #[test]
    fn casimir_with_trivial_fiber() {
        let gens = total_generators(TwoJ(2), TwoJ(0));
        assert!(max_abs(&(&gens.casimir - identity(3) * c(2.0))) < 1e-14);
    }

    #[test]
    fn total_generators_commute_correctly() {
        let gens = total_generators(TwoJ(4), TwoJ(2));
        for a in 0..3 {
            let (b, k) = ((a + 1) % 3, (a + 2) % 3);
            let gap = max_abs(&(commutator(&gens.j[a], &gens.j[b]) - &gens.j[k] * crate::linalg::I));
            assert!(gap < 1e-12);
        }
    }

    #[test]
    fn casimir_spectrum_lies_in_block_values() {
        for (tn, tv) in [(3, 2), (6, 4), (5, 1)] {
            let gens = total_generators(TwoJ(tn), TwoJ(tv));
            let allowed: Vec<f64> = gens.block_spins().map(|s| s.casimir()).collect();
            let (values, _) = hermitian_eigen(&gens.casimir);
            for v in values {
                assert!(allowed.iter().any(|a| (a - v).abs() < 1e-10), "{v}");
            }
        }
    }

    #[test]
    fn spectral_two_factor_formula() {
        let p = projector_spectral(TwoJ(2), TwoJ(1), Branch::Plus).unwrap();
        let gens = total_generators(TwoJ(2), TwoJ(1));
        let expected = (&gens.casimir - identity(6) * c(0.75)) / c(3.0);
        assert!(max_abs(&(&p.matrix - expected)) < 1e-14);
        assert!((p.matrix.trace() - c(4.0)).norm() < 1e-12);
    }

    #[test]
    fn trivial_fiber_gives_identity() {
        for branch in Branch::ALL {
            let p = projector_spectral(TwoJ(3), TwoJ(0), branch).unwrap();
            assert_eq!(p.matrix, identity(4));
            let p = projector_orbit(TwoJ(3), TwoJ(0), branch).unwrap();
            assert!(max_abs(&(&p.matrix - identity(4))) < 1e-12);
        }
    }

    #[test]
    fn minus_projector_fixes_highest_weight() {
        let p = projector_spectral(TwoJ(2), TwoJ(1), Branch::Minus).unwrap();
        assert!((p.matrix.trace() - c(2.0)).norm() < 1e-12);
        let h = highest_weight(TwoJ(2), TwoJ(1), Branch::Minus).unwrap().coefficients;
        assert!((&p.matrix * &h - &h).camax() < 1e-12);
    }

    #[test]
    fn orbit_basis_dimension() {
        let basis = orbit_basis(TwoJ(6), TwoJ(2), Branch::Minus).unwrap();
        assert_eq!(basis.len(), 5);
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.dotc(v) - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn branch_domain_is_enforced() {
        assert!(matches!(
            projector_spectral(TwoJ(2), TwoJ(3), Branch::Minus),
            Err(Error::BranchDomain { .. })
        ));
        assert!(projector_orbit(TwoJ(2), TwoJ(2), Branch::Minus).is_err());
        assert!(projector_haar_mc(TwoJ(1), TwoJ(1), Branch::Minus, 10, 0).is_err());
    }

    #[test]
    fn spectral_and_orbit_agree_with_all_invariants() {
        for two_n in 1..=12u32 {
            for two_nu in 0..=4u32 {
                for branch in Branch::ALL {
                    let Ok(spec) = projector_spectral(TwoJ(two_n), TwoJ(two_nu), branch) else {
                        continue;
                    };
                    let orbit = projector_orbit(TwoJ(two_n), TwoJ(two_nu), branch).unwrap();
                    let gens = total_generators(TwoJ(two_n), TwoJ(two_nu));
                    for p in [&spec, &orbit] {
                        let g = p.gaps(&gens);
                        assert!(g.hermiticity < 1e-11 && g.idempotence < 1e-11, "{two_n} {two_nu} {branch} {g:?}");
                        assert!(g.trace < 1e-10 && g.equivariance < 1e-11 && g.spectrum < 1e-10, "{g:?}");
                        assert_eq!(g.rank, p.block_dim());
                        let dim = p.dim();
                        assert!(max_abs(&(&p.matrix * (identity(dim) - &p.matrix))) < 1e-10);
                    }
                    assert!(max_abs(&(&spec.matrix - &orbit.matrix)) < 1e-11);
                }
            }
        }
    }

    #[test]
    fn sector_spectrum_matches_dense() {
        let p = projector_spectral(TwoJ(40), TwoJ(3), Branch::Minus).unwrap();
        assert!(p.dim() > DENSE_EIGEN_LIMIT);
        let (values, leakage) = p.spectrum();
        assert_eq!(leakage, 0.0);
        let (dense, _) = hermitian_eigen(&p.matrix);
        for (a, b) in values.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(values.iter().filter(|&&v| v > 0.5).count(), 38);
    }

    #[test]
    fn plus_and_minus_blocks_are_orthogonal() {
        for (tn, tv) in [(2, 1), (5, 3), (8, 4), (3, 2)] {
            let plus = projector_spectral(TwoJ(tn), TwoJ(tv), Branch::Plus).unwrap();
            let minus = projector_spectral(TwoJ(tn), TwoJ(tv), Branch::Minus).unwrap();
            assert!(max_abs(&(&plus.matrix * &minus.matrix)) < 1e-10);
        }
    }

    #[test]
    fn haar_single_sample_has_exact_trace() {
        for seed in [0, 1, 99] {
            let p = projector_haar_mc(TwoJ(2), TwoJ(1), Branch::Plus, 1, seed).unwrap();
            assert!((p.matrix.trace() - c(4.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn haar_trivial_fiber_is_identity() {
        // Schur averaging on [N] alone
        let p = projector_haar_mc(TwoJ(2), TwoJ(0), Branch::Plus, 20000, 3).unwrap();
        assert!((p.matrix.trace() - c(3.0)).norm() < 1e-12);
        assert!(frobenius(&(&p.matrix - identity(3))) < 0.05);
    }

    #[test]
    fn haar_is_deterministic() {
        let a = projector_haar_mc(TwoJ(2), TwoJ(1), Branch::Minus, 9000, 17).unwrap();
        let b = projector_haar_mc(TwoJ(2), TwoJ(1), Branch::Minus, 9000, 17).unwrap();
        assert_eq!(a.matrix, b.matrix);
        let other = projector_haar_mc(TwoJ(2), TwoJ(1), Branch::Minus, 9000, 18).unwrap();
        assert_ne!(a.matrix, other.matrix);
    }
}
