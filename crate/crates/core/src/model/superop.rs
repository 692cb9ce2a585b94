//! Lindblad generator and its restriction to the emitting coherences.
//!
//! With `i ħ dρ/dt = L ρ`,
//!
//! ```text
//! L ρ = H̃ ρ − ρ H̃ᴴ + 2i γ_C a ρ a† + 2i Σ_n γ_Xn σ_n ρ σ_n†
//! ```
//!
//! where `H̃` carries the `−iγ` dampings. Restricted to the coherences
//! `|rung r+1⟩⟨rung r|` (r = 0, 1) the refilling terms only feed the
//! rung-2/rung-1 block into the rung-1/ground block, so the restricted
//! matrix is block triangular and its eigenvalues are the transition
//! frequencies `λ1_k` and `λ2_k − conj(λ1_m)`.

use crate::linalg::CMatrix;
use crate::model::basis::LadderBasis;
use crate::model::operators::{exciton_lowering, hamiltonian, photon_annihilation};
use crate::model::params::TunedParams;
use crate::scalar::{cplx, Real};

/// Operators needed to apply the Lindblad generator.
#[derive(Clone, Debug)]
pub struct LindbladGenerator<T: Real> {
    pub basis: LadderBasis,
    h_eff: CMatrix<T>,
    jumps: Vec<(T, CMatrix<T>)>,
}

impl<T: Real> LindbladGenerator<T> {
    pub fn new(tuned: &TunedParams<T>) -> Self {
        let basis = LadderBasis::new(tuned.n_emitters()).expect("tuned parameters have at least one emitter");
        let h_eff = hamiltonian(&basis, tuned, true).matrix;
        let mut jumps = vec![(tuned.gamma_c, photon_annihilation::<T>(&basis).matrix)];
        for n in 0..tuned.n_emitters() {
            jumps.push((tuned.gamma_x[n], exciton_lowering::<T>(&basis, n).matrix));
        }
        Self { basis, h_eff, jumps }
    }

    /// `L ρ` in μeV (energy units).
    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let mut out = &(&self.h_eff * rho) - &(rho * &self.h_eff.adjoint());
        let two_i = cplx(T::zero(), T::lit(2.0));
        for (gamma, c) in &self.jumps {
            if *gamma == T::zero() {
                continue;
            }
            let refill = &(c * rho) * &c.adjoint();
            out = &out + &refill.scale(two_i * *gamma);
        }
        out
    }
}

/// Labels a coherence `|ket⟩⟨bra|` by basis indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoherenceLabel {
    pub ket: usize,
    pub bra: usize,
}

/// `L` restricted to the `M = N1(1 + N2)` emitting coherences.
///
/// Ordering: `|k⟩⟨0|` for first-rung `k`, then `|p⟩⟨q|` for second-rung
/// `p` (outer) and first-rung `q` (inner). Energies are in the rotating frame.
#[derive(Clone, Debug)]
pub struct SuperoperatorMatrix<T: Real> {
    pub matrix: CMatrix<T>,
    pub labels: Vec<CoherenceLabel>,
    pub n1: usize,
    pub n2: usize,
    pub reference: T,
}

impl<T: Real> SuperoperatorMatrix<T> {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

pub fn coherence_labels(basis: &LadderBasis) -> Vec<CoherenceLabel> {
    let mut labels = Vec::with_capacity(basis.n_transitions());
    for k in basis.rung_range(1) {
        labels.push(CoherenceLabel { ket: k, bra: 0 });
    }
    for p in basis.rung_range(2) {
        for q in basis.rung_range(1) {
            labels.push(CoherenceLabel { ket: p, bra: q });
        }
    }
    labels
}

pub fn lindblad_superoperator<T: Real>(tuned: &TunedParams<T>) -> SuperoperatorMatrix<T> {
    let generator = LindbladGenerator::new(tuned);
    let basis = &generator.basis;
    let labels = coherence_labels(basis);
    let dim = basis.len();
    let m = labels.len();
    let mut matrix = CMatrix::zeros(m, m);
    for (col, lab) in labels.iter().enumerate() {
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(lab.ket, lab.bra)] = cplx(T::one(), T::zero());
        let out = generator.apply(&rho);
        for (row, target) in labels.iter().enumerate() {
            matrix[(row, col)] = out[(target.ket, target.bra)];
        }
    }
    SuperoperatorMatrix {
        matrix,
        labels,
        n1: basis.n1(),
        n2: basis.n2(),
        reference: tuned.reference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigenvalues;
    use crate::model::params::SystemParams;
    use crate::model::spectrum::{spectrum_of, transition_frequencies};

    #[test]
    fn dimension_is_transition_count() {
        let t = SystemParams::micropillar_three_dots().tune(19.0).unwrap();
        let s = lindblad_superoperator(&t);
        assert_eq!(s.dim(), 32);
        assert_eq!(s.matrix.rows(), 32);
    }

    #[test]
    fn vacuum_is_stationary() {
        let t = SystemParams::micropillar_three_dots().tune(19.0).unwrap();
        let gen = LindbladGenerator::new(&t);
        let mut rho = CMatrix::zeros(12, 12);
        rho[(0, 0)] = cplx(1.0, 0.0);
        assert_eq!(gen.apply(&rho).max_abs(), 0.0);
    }

    #[test]
    fn single_cavity_coherence_eigenvalue() {
        let t = TunedParams::from_energies(vec![30.0], 12.0, vec![0.0], vec![5.0], 20.0, 0.0)
            .unwrap()
            .with_reference(0.0);
        let s = lindblad_superoperator(&t);
        // |0;1⟩⟨0;0| is label 0; decoupled, so the column is an eigenvector
        let col = s.matrix.column(0);
        assert!((col[0] - cplx(12.0, -20.0)).norm() < 1e-14);
        assert!(col[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn refill_only_feeds_downward() {
        let t = SystemParams::micropillar_three_dots().tune(19.0).unwrap();
        let s = lindblad_superoperator(&t);
        let n1 = s.n1;
        // upper-right block: rung-2/rung-1 columns into rung-1/ground rows is nonzero
        let feed = s.matrix.submatrix(0..n1, n1..s.dim());
        assert!(feed.max_abs() > 0.0);
        // lower-left block vanishes
        let back = s.matrix.submatrix(n1..s.dim(), 0..n1);
        assert_eq!(back.max_abs(), 0.0);
    }

    #[test]
    fn spectrum_equals_transition_frequencies() {
        let t = SystemParams::micropillar_three_dots().tune(13.5).unwrap();
        let s = lindblad_superoperator(&t);
        let ev = eigenvalues(&s.matrix).unwrap();
        let mut tr = transition_frequencies(&spectrum_of(&t).unwrap()).omegas();
        crate::eigen::sort_eigenvalues(&mut tr);
        for (a, b) in ev.iter().zip(&tr) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }
}
