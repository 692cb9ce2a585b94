//! Instantaneous pulse actions on the density matrix.

use crate::linalg::CMatrix;
use crate::model::basis::LadderBasis;
use crate::model::operators::{photon_annihilation, OperatorMatrix, OperatorRole};
use crate::scalar::{cone, cplx, Cplx, Real};

/// Complex pulse areas `μE₁`, `μE₂` (dimensionless).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseConfig<T: Real> {
    pub area1: Cplx<T>,
    pub area2: Cplx<T>,
    /// Keep the overall `(−i)³/2` factor of the third-order polarization.
    pub include_prefactor: bool,
}

impl<T: Real> Default for PulseConfig<T> {
    fn default() -> Self {
        Self {
            area1: cone(),
            area2: cone(),
            include_prefactor: true,
        }
    }
}

impl<T: Real> PulseConfig<T> {
    pub fn new(area1: Cplx<T>, area2: Cplx<T>) -> Self {
        Self {
            area1,
            area2,
            include_prefactor: true,
        }
    }

    /// `conj(area1)·area2²`, the factor every third-order signal carries.
    pub fn third_order_factor(&self) -> Cplx<T> {
        self.area1.conj() * self.area2 * self.area2
    }
}

/// Photon ladder operators on a basis, shared by both pulse actions.
#[derive(Clone, Debug)]
pub struct PulseOperators<T: Real> {
    pub a: CMatrix<T>,
    pub a_dag: CMatrix<T>,
}

impl<T: Real> PulseOperators<T> {
    pub fn new(basis: &LadderBasis) -> Self {
        let a = photon_annihilation::<T>(basis).matrix;
        let a_dag = a.adjoint();
        Self { a, a_dag }
    }

    /// First pulse, linear in `conj(E₁)`: `ρ⁺ = −i·conj(μE₁)·[a, ρ⁻]`.
    pub fn apply_pulse1(&self, rho: &CMatrix<T>, pulses: &PulseConfig<T>) -> CMatrix<T> {
        let factor = cplx(T::zero(), -T::one()) * pulses.area1.conj();
        self.a.commutator(rho).scale(factor)
    }

    /// Second pulse, quadratic in `E₂`: `ρ⁺ = −½·(μE₂)²·[a†, [a†, ρ⁻]]`.
    pub fn apply_pulse2(&self, rho: &CMatrix<T>, pulses: &PulseConfig<T>) -> CMatrix<T> {
        let factor = pulses.area2 * pulses.area2 * T::lit(-0.5);
        let inner = self.a_dag.commutator(rho);
        self.a_dag.commutator(&inner).scale(factor)
    }
}

fn basis_for(rho: &OperatorMatrix<impl Real>) -> LadderBasis {
    // dim = 3 + N + N(N+1)/2
    let dim = rho.dim();
    let n = (1..)
        .find(|&n: &usize| 3 + n + n * (n + 1) / 2 >= dim)
        .expect("dimension search terminates");
    assert_eq!(3 + n + n * (n + 1) / 2, dim, "density matrix dimension {dim} is not a ladder basis size");
    LadderBasis::new(n).expect("n >= 1")
}

/// First pulse applied to a density matrix on the full truncated basis.
pub fn apply_pulse1<T: Real>(rho: &OperatorMatrix<T>, pulses: &PulseConfig<T>) -> OperatorMatrix<T> {
    let ops = PulseOperators::new(&basis_for(rho));
    OperatorMatrix::new(OperatorRole::Density, ops.apply_pulse1(&rho.matrix, pulses))
}

/// Second pulse applied to a density matrix on the full truncated basis.
pub fn apply_pulse2<T: Real>(rho: &OperatorMatrix<T>, pulses: &PulseConfig<T>) -> OperatorMatrix<T> {
    let ops = PulseOperators::new(&basis_for(rho));
    OperatorMatrix::new(OperatorRole::Density, ops.apply_pulse2(&rho.matrix, pulses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn dense_commutator(x: &CMatrix<f64>, y: &CMatrix<f64>) -> CMatrix<f64> {
        let n = x.rows();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(C::new(0.0, 0.0), |acc, k| acc + x[(i, k)] * y[(k, j)] - y[(i, k)] * x[(k, j)])
        })
    }

    fn photon_ops(basis: &LadderBasis) -> (CMatrix<f64>, CMatrix<f64>) {
        // annihilation built element-wise from occupation numbers
        let n = basis.len();
        let a = CMatrix::from_fn(n, n, |i, j| {
            let (si, sj) = (&basis.states()[i], &basis.states()[j]);
            if si.excitons == sj.excitons && sj.photons == si.photons + 1 {
                C::new((sj.photons as f64).sqrt(), 0.0)
            } else {
                C::new(0.0, 0.0)
            }
        });
        let ad = a.adjoint();
        (a, ad)
    }

    #[test]
    fn pulse1_on_ground_state() {
        let basis = LadderBasis::new(3).unwrap();
        let rho = OperatorMatrix::<f64>::projector(12, 0, 0);
        let p = PulseConfig::new(C::new(0.3, 0.4), C::new(1.0, 0.0));
        let out = apply_pulse1(&rho, &p);
        let nonzero: Vec<(usize, usize)> = (0..12)
            .flat_map(|i| (0..12).map(move |j| (i, j)))
            .filter(|&(i, j)| out.matrix[(i, j)].norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(0, 1)]);
        assert!((out.matrix[(0, 1)] - C::new(0.0, 1.0) * C::new(0.3, -0.4)).norm() < 1e-15);
        let _ = basis;
    }

    #[test]
    fn zero_areas_give_zero() {
        let rho = OperatorMatrix::<f64>::projector(12, 1, 1);
        let p = PulseConfig::new(C::new(0.0, 0.0), C::new(0.0, 0.0));
        assert_eq!(apply_pulse1(&rho, &p).matrix.max_abs(), 0.0);
        assert_eq!(apply_pulse2(&rho, &p).matrix.max_abs(), 0.0);
    }

    #[test]
    fn pulses_match_dense_commutators() {
        for n in 1..=3 {
            let basis = LadderBasis::new(n).unwrap();
            let dim = basis.len();
            let (a, ad) = photon_ops(&basis);
            let p = PulseConfig::new(C::new(0.7, -0.2), C::new(-0.4, 1.1));
            for (i, j) in [(1, 1), (0, 0), (1, 0), (2, 1), (dim - 1, 1)] {
                let rho = OperatorMatrix::<f64>::projector(dim, i, j);
                let got1 = apply_pulse1(&rho, &p).matrix;
                let want1 = dense_commutator(&a, &rho.matrix).scale(C::new(0.0, -1.0) * p.area1.conj());
                assert!((&got1 - &want1).max_abs() < 1e-14);
                let got2 = apply_pulse2(&rho, &p).matrix;
                let inner = dense_commutator(&ad, &rho.matrix);
                let want2 = dense_commutator(&ad, &inner).scale(p.area2 * p.area2 * -0.5);
                assert!((&got2 - &want2).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pulse2_on_ground_is_two_photon_coherence() {
        let rho = OperatorMatrix::<f64>::projector(12, 0, 0);
        let out = apply_pulse2(&rho, &PulseConfig::default()).matrix;
        // only |0;2⟩⟨0| survives, with −½·√2
        for i in 0..12 {
            for j in 0..12 {
                let v = out[(i, j)];
                if (i, j) == (5, 0) {
                    assert!((v.re + 0.5 * 2f64.sqrt()).abs() < 1e-15);
                } else {
                    assert_eq!(v.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn pulse2_is_linear() {
        let p = PulseConfig::<f64>::default();
        let r1 = OperatorMatrix::<f64>::projector(12, 0, 2);
        let r2 = OperatorMatrix::<f64>::projector(12, 3, 0);
        let sum = OperatorMatrix::density(&r1.matrix + &r2.matrix);
        let lhs = apply_pulse2(&sum, &p).matrix;
        let rhs = &apply_pulse2(&r1, &p).matrix + &apply_pulse2(&r2, &p).matrix;
        assert!((&lhs - &rhs).max_abs() < 1e-15);
    }
}
