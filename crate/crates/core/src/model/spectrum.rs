//! Complex energy levels of the first two rungs and the resulting transitions.

use crate::eigen::{eigen, Eigen};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::hamiltonian::{build_h1, build_h2};
use crate::model::params::TunedParams;
use crate::scalar::{cplx, Cplx, Real};

/// Eigenvector condition number above which a rung is treated as defective.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Magnitude of the diagonal perturbation applied when jitter is enabled.
pub const JITTER_UEV: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiagonalizeOptions {
    /// On an ill-conditioned rung, perturb the diagonal by multiples of
    /// [`JITTER_UEV`] and retry once instead of failing.
    pub jitter: bool,
}

/// Eigen-structure of the first and second rung.
///
/// Eigenvalues are in the rotating frame of `reference`; add the reference
/// once (first rung) or twice (second rung) for absolute energies.
#[derive(Clone, Debug)]
pub struct RungSpectrum<T: Real> {
    pub rung1: Eigen<T>,
    pub rung2: Eigen<T>,
    pub reference: T,
    pub jittered: bool,
}

impl<T: Real> RungSpectrum<T> {
    pub fn lambda1(&self) -> &[Cplx<T>] {
        &self.rung1.values
    }

    pub fn lambda2(&self) -> &[Cplx<T>] {
        &self.rung2.values
    }

    pub fn n1(&self) -> usize {
        self.rung1.values.len()
    }

    pub fn n2(&self) -> usize {
        self.rung2.values.len()
    }

    /// First-rung eigenvalues in absolute μeV.
    pub fn lambda1_absolute(&self) -> Vec<Cplx<T>> {
        self.lambda1().iter().map(|l| *l + cplx(self.reference, T::zero())).collect()
    }

    /// Second-rung eigenvalues in absolute μeV.
    pub fn lambda2_absolute(&self) -> Vec<Cplx<T>> {
        let r = self.reference + self.reference;
        self.lambda2().iter().map(|l| *l + cplx(r, T::zero())).collect()
    }
}

fn jitter<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        out[(i, i)] += cplx(T::lit(JITTER_UEV * (i as f64 + 1.0)), T::zero());
    }
    out
}

fn diagonalize<T: Real>(m: &CMatrix<T>, rung: usize, opts: DiagonalizeOptions) -> Result<(Eigen<T>, bool)> {
    let limit = T::lit(CONDITION_LIMIT);
    let e = eigen(m)?;
    if e.condition <= limit {
        return Ok((e, false));
    }
    if opts.jitter {
        let e = eigen(&jitter(m))?;
        if e.condition <= limit {
            return Ok((e, true));
        }
        return Err(Error::IllConditioned {
            rung,
            condition: e.condition.to_f64_lossy(),
            limit: CONDITION_LIMIT,
        });
    }
    Err(Error::IllConditioned {
        rung,
        condition: e.condition.to_f64_lossy(),
        limit: CONDITION_LIMIT,
    })
}

/// Diagonalise both rung Hamiltonians.
pub fn rung_spectrum<T: Real>(h1: &CMatrix<T>, h2: &CMatrix<T>, reference: T) -> Result<RungSpectrum<T>> {
    rung_spectrum_with(h1, h2, reference, DiagonalizeOptions::default())
}

pub fn rung_spectrum_with<T: Real>(
    h1: &CMatrix<T>,
    h2: &CMatrix<T>,
    reference: T,
    opts: DiagonalizeOptions,
) -> Result<RungSpectrum<T>> {
    let (rung1, j1) = diagonalize(h1, 1, opts)?;
    let (rung2, j2) = diagonalize(h2, 2, opts)?;
    Ok(RungSpectrum {
        rung1,
        rung2,
        reference,
        jittered: j1 || j2,
    })
}

/// Convenience: build and diagonalise both rungs of `tuned`.
pub fn spectrum_of<T: Real>(tuned: &TunedParams<T>) -> Result<RungSpectrum<T>> {
    rung_spectrum(&build_h1(tuned), &build_h2(tuned), tuned.reference)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitionLabel {
    /// ground ↔ first-rung level `k`
    GroundFirst { k: usize },
    /// first-rung level `m` ↔ second-rung level `k`
    FirstSecond { k: usize, m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition<T: Real> {
    pub label: TransitionLabel,
    /// complex transition frequency in the rotating frame (μeV)
    pub omega: Cplx<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSet<T: Real> {
    pub transitions: Vec<Transition<T>>,
    pub reference: T,
}

impl<T: Real> TransitionSet<T> {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn omegas(&self) -> Vec<Cplx<T>> {
        self.transitions.iter().map(|t| t.omega).collect()
    }
}

/// The `N1` ground↔rung-1 frequencies `λ1_k`, followed by the `N1·N2`
/// rung-1↔rung-2 frequencies `λ2_k − conj(λ1_m)` (k outer, m inner).
pub fn transition_frequencies<T: Real>(spec: &RungSpectrum<T>) -> TransitionSet<T> {
    let mut transitions = Vec::with_capacity(spec.n1() * (1 + spec.n2()));
    for (k, l1) in spec.lambda1().iter().enumerate() {
        transitions.push(Transition {
            label: TransitionLabel::GroundFirst { k },
            omega: *l1,
        });
    }
    for (k, l2) in spec.lambda2().iter().enumerate() {
        for (m, l1) in spec.lambda1().iter().enumerate() {
            transitions.push(Transition {
                label: TransitionLabel::FirstSecond { k, m },
                omega: *l2 - l1.conj(),
            });
        }
    }
    TransitionSet {
        transitions,
        reference: spec.reference,
    }
}
