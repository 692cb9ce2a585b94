//! Operators on the truncated ladder basis.
//!
//! These are assembled from ladder operators by matrix products, so they are
//! independent of the element-wise rung Hamiltonians in `hamiltonian`.

use crate::linalg::CMatrix;
use crate::model::basis::{BasisState, LadderBasis};
use crate::model::params::TunedParams;
use crate::scalar::{cplx, Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorRole {
    PhotonAnnihilation,
    PhotonCreation,
    ExcitonLowering(usize),
    Hamiltonian,
    EffectiveHamiltonian,
    Density,
    Other,
}

/// Dense operator on a [`LadderBasis`], tagged with what it represents.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    pub role: OperatorRole,
    pub matrix: CMatrix<T>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(role: OperatorRole, matrix: CMatrix<T>) -> Self {
        Self { role, matrix }
    }

    pub fn density(matrix: CMatrix<T>) -> Self {
        Self::new(OperatorRole::Density, matrix)
    }

    /// `|i⟩⟨j|` on a basis of dimension `dim`.
    pub fn projector(dim: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(i, j)] = cplx(T::one(), T::zero());
        Self::density(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

fn lowered(s: &BasisState, exciton: Option<usize>) -> Option<BasisState> {
    let mut t = s.clone();
    match exciton {
        None => {
            if t.photons == 0 {
                return None;
            }
            t.photons -= 1;
        }
        Some(n) => {
            if t.excitons[n] == 0 {
                return None;
            }
            t.excitons[n] = 0;
        }
    }
    Some(t)
}

/// Photon annihilation operator `a`, amplitude `√n_C`.
pub fn photon_annihilation<T: Real>(basis: &LadderBasis) -> OperatorMatrix<T> {
    let dim = basis.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (j, s) in basis.states().iter().enumerate() {
        if let Some(t) = lowered(s, None) {
            let i = basis.index_of(&t).expect("lowered state lies in the truncated basis");
            m[(i, j)] = cplx(T::lit(s.photons as f64).sqrt(), T::zero());
        }
    }
    OperatorMatrix::new(OperatorRole::PhotonAnnihilation, m)
}

/// Photon creation operator restricted to the basis, `a† = (a)ᴴ`.
pub fn photon_creation<T: Real>(basis: &LadderBasis) -> OperatorMatrix<T> {
    OperatorMatrix::new(OperatorRole::PhotonCreation, photon_annihilation::<T>(basis).matrix.adjoint())
}

/// Exciton lowering operator `|0⟩⟨n|` of emitter `n`, acting on the product basis.
pub fn exciton_lowering<T: Real>(basis: &LadderBasis, n: usize) -> OperatorMatrix<T> {
    let dim = basis.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (j, s) in basis.states().iter().enumerate() {
        if let Some(t) = lowered(s, Some(n)) {
            let i = basis.index_of(&t).expect("lowered state lies in the truncated basis");
            m[(i, j)] = cplx(T::one(), T::zero());
        }
    }
    OperatorMatrix::new(OperatorRole::ExcitonLowering(n), m)
}

/// Hamiltonian in the frame rotating at `tuned.reference` per excitation.
///
/// With `damped` set, the cavity and exciton energies carry their `−iγ`
/// parts, giving the effective non-Hermitian Hamiltonian.
pub fn hamiltonian<T: Real>(basis: &LadderBasis, tuned: &TunedParams<T>, damped: bool) -> OperatorMatrix<T> {
    let a = photon_annihilation::<T>(basis).matrix;
    let ad = a.adjoint();
    let (wc, wx) = tuned.relative_omegas();
    let pick = |w: Cplx<T>| if damped { w } else { cplx(w.re, T::zero()) };
    let mut h = (&ad * &a).scale(pick(wc));
    for n in 0..basis.n_emitters() {
        let s = exciton_lowering::<T>(basis, n).matrix;
        let sd = s.adjoint();
        h = &h + &(&sd * &s).scale(pick(wx[n]));
        // σ†a rather than aσ†: the latter leaks out of the truncated basis
        let coupling = &(&ad * &s) + &(&sd * &a);
        h = &h + &coupling.scale(cplx(tuned.g[n], T::zero()));
    }
    let role = if damped {
        OperatorRole::EffectiveHamiltonian
    } else {
        OperatorRole::Hamiltonian
    };
    OperatorMatrix::new(role, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::SystemParams;

    #[test]
    fn annihilation_lowers_excitation_by_one() {
        let b = LadderBasis::new(3).unwrap();
        let a = photon_annihilation::<f64>(&b).matrix;
        for i in 0..b.len() {
            for j in 0..b.len() {
                if a[(i, j)].norm() > 0.0 {
                    assert_eq!(b.rung_of(j), b.rung_of(i) + 1);
                    let nc = b.states()[j].photons as f64;
                    assert!((a[(i, j)].re - nc.sqrt()).abs() < 1e-15);
                }
            }
        }
        // a|0;2⟩ = √2 |0;1⟩
        assert!((a[(1, 5)].re - 2f64.sqrt()).abs() < 1e-15);
        let ad = photon_creation::<f64>(&b).matrix;
        assert_eq!(ad, a.adjoint());
    }

    #[test]
    fn hamiltonian_is_hermitian_without_damping() {
        let p = SystemParams::micropillar_three_dots();
        let t = p.tune(19.0).unwrap();
        let b = LadderBasis::new(3).unwrap();
        let h = hamiltonian(&b, &t, false).matrix;
        assert!((&h - &h.adjoint()).max_abs() < 1e-12);
        let ht = hamiltonian(&b, &t, true).matrix;
        // effective Hamiltonian is complex symmetric
        assert!((&ht - &ht.transpose()).max_abs() == 0.0);
    }
}
