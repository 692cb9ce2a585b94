//! Effective non-Hermitian Hamiltonians of the first and second rung.
//!
//! Both are written in the rotating frame of `TunedParams::reference`: a
//! rung-r state has the reference energy subtracted r times. Set the
//! reference to zero for absolute energies.

use crate::linalg::CMatrix;
use crate::model::basis::LadderBasis;
use crate::model::params::TunedParams;
use crate::scalar::{cplx, Real};

/// First-rung block, `(N+1)×(N+1)`: index 0 is the one-photon state, `1..=N`
/// the single excitons.
pub fn build_h1<T: Real>(tuned: &TunedParams<T>) -> CMatrix<T> {
    let n = tuned.n_emitters();
    let (wc, wx) = tuned.relative_omegas();
    let mut h = CMatrix::zeros(n + 1, n + 1);
    h[(0, 0)] = wc;
    for i in 0..n {
        let g = cplx(tuned.g[i], T::zero());
        h[(0, i + 1)] = g;
        h[(i + 1, 0)] = g;
        h[(i + 1, i + 1)] = wx[i];
    }
    h
}

/// Second-rung block, `N2×N2`, ordered as the second rung of [`LadderBasis`]:
/// two photons, photon + exciton n, exciton pairs (n, m) with n < m.
///
/// The two-photon state couples to photon + exciton n with `√2·g_n`; the
/// state photon + exciton n couples to the pair (n, m) with `g_m`. The
/// three-emitter matrix is reproduced exactly; larger N follows the same
/// pattern.
pub fn build_h2<T: Real>(tuned: &TunedParams<T>) -> CMatrix<T> {
    let n = tuned.n_emitters();
    let basis = LadderBasis::new(n).expect("tuned parameters have at least one emitter");
    let dim = basis.n2();
    let (wc, wx) = tuned.relative_omegas();
    let sqrt2 = T::lit(2.0).sqrt();
    let mut h = CMatrix::zeros(dim, dim);
    h[(0, 0)] = wc + wc;
    for i in 0..n {
        let row = 1 + i;
        h[(row, row)] = wc + wx[i];
        let g2 = cplx(sqrt2 * tuned.g[i], T::zero());
        h[(0, row)] = g2;
        h[(row, 0)] = g2;
    }
    for i in 0..n {
        for j in i + 1..n {
            let p = basis.pair_offset(i, j);
            h[(p, p)] = wx[i] + wx[j];
            // photon + X_i  <->  X_i X_j  via g_j, photon + X_j  <->  X_i X_j via g_i
            let (ri, rj) = (1 + i, 1 + j);
            h[(ri, p)] = cplx(tuned.g[j], T::zero());
            h[(p, ri)] = cplx(tuned.g[j], T::zero());
            h[(rj, p)] = cplx(tuned.g[i], T::zero());
            h[(p, rj)] = cplx(tuned.g[i], T::zero());
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigenvalues;
    use crate::model::operators::hamiltonian;
    use crate::model::params::SystemParams;
    use num_complex::Complex64 as C;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_tuned(t: f64) -> TunedParams<f64> {
        SystemParams::micropillar_three_dots().tune(t).unwrap()
    }

    #[test]
    fn rung_blocks_agree_with_operator_hamiltonian() {
        let tuned = table_tuned(19.0);
        let basis = LadderBasis::new(3).unwrap();
        let full = hamiltonian(&basis, &tuned, true).matrix;
        let h1 = full.submatrix(basis.rung_range(1), basis.rung_range(1));
        let h2 = full.submatrix(basis.rung_range(2), basis.rung_range(2));
        assert!((&h1 - &build_h1(&tuned)).max_abs() < 1e-12);
        assert!((&h2 - &build_h2(&tuned)).max_abs() < 1e-12);
        // no coupling between rungs
        let off = full.submatrix(basis.rung_range(1), basis.rung_range(2));
        assert_eq!(off.max_abs(), 0.0);
    }

    #[test]
    fn operator_agreement_for_larger_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            let t = TunedParams::from_energies(
                (0..n).map(|_| rng.random_range(-100.0..100.0)).collect(),
                rng.random_range(-50.0..50.0),
                (0..n).map(|_| rng.random_range(0.0..50.0)).collect(),
                (0..n).map(|_| rng.random_range(0.0..20.0)).collect(),
                rng.random_range(0.0..40.0),
                4.0,
            )
            .unwrap()
            .with_reference(3.0);
            let basis = LadderBasis::new(n).unwrap();
            let full = hamiltonian(&basis, &t, true).matrix;
            let h2 = full.submatrix(basis.rung_range(2), basis.rung_range(2));
            assert!((&h2 - &build_h2(&t)).max_abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn table_entries_read_directly() {
        let tuned = table_tuned(19.0).with_reference(0.0);
        let h1 = build_h1(&tuned);
        assert_eq!(h1[(0, 1)], C::new(43.0, 0.0));
        assert_eq!(h1[(2, 0)], C::new(40.0, 0.0));
        assert_eq!(h1[(0, 3)], C::new(31.5, 0.0));
        assert_eq!(h1[(0, 0)], C::new(tuned.omega_c, -36.5));
        assert_eq!(h1[(1, 1)], C::new(tuned.omega_x[0], -18.0));
        let h2 = build_h2(&tuned);
        assert_eq!(h2.rows(), 7);
        assert!((h2[(0, 1)].re - 2f64.sqrt() * 43.0).abs() < 1e-12);
        // photon+X1 couples to X1X2 with g2 and X1X3 with g3
        assert_eq!(h2[(1, 4)].re, 40.0);
        assert_eq!(h2[(1, 5)].re, 31.5);
        assert_eq!(h2[(2, 4)].re, 43.0);
        assert_eq!(h2[(3, 6)].re, 40.0);
        assert_eq!(h2[(4, 4)], C::new(tuned.omega_x[0] + tuned.omega_x[1], -29.5));
    }

    #[test]
    fn complex_symmetric_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let t = TunedParams::from_energies(
                (0..n).map(|_| rng.random_range(-200.0..200.0)).collect(),
                rng.random_range(-100.0..100.0),
                (0..n).map(|_| rng.random_range(0.0..60.0)).collect(),
                (0..n).map(|_| rng.random_range(0.0..30.0)).collect(),
                rng.random_range(0.0..50.0),
                0.0,
            )
            .unwrap()
            .with_reference(0.0);
            let h1 = build_h1(&t);
            let h2 = build_h2(&t);
            assert_eq!(h1, h1.transpose());
            assert_eq!(h2, h2.transpose());
            let wc = t.omega_c_tilde();
            let wx = t.omega_x_tilde();
            let mut expected: C = wc * 2.0;
            for i in 0..n {
                expected += wc + wx[i];
                for j in i + 1..n {
                    expected += wx[i] + wx[j];
                }
            }
            let tr = h2.trace();
            assert!((tr - expected).norm() <= 1e-12 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn decoupled_is_diagonal() {
        let t = table_tuned(19.0).with_couplings(vec![0.0; 3]);
        let h1 = build_h1(&t);
        let h2 = build_h2(&t);
        assert_eq!((&h1 - &CMatrix::from_diagonal(&h1.diagonal())).max_abs(), 0.0);
        assert_eq!((&h2 - &CMatrix::from_diagonal(&h2.diagonal())).max_abs(), 0.0);
        let wx = t.relative_omegas().1;
        assert_eq!(h2[(6, 6)], wx[1] + wx[2]);
        let mut ev = eigenvalues(&h1).unwrap();
        let mut diag = h1.diagonal();
        crate::eigen::sort_eigenvalues(&mut diag);
        ev.iter_mut().zip(&diag).for_each(|(a, b)| assert!((*a - *b).norm() < 1e-12));
    }

    #[test]
    fn symmetric_structure_eigenvalues() {
        let w0 = 5.0;
        let g = 40.0;
        let t = TunedParams::from_energies(vec![w0; 3], w0, vec![g; 3], vec![0.0; 3], 0.0, 0.0)
            .unwrap()
            .with_reference(0.0);
        let ev = eigenvalues(&build_h1(&t)).unwrap();
        let s = 3f64.sqrt() * g;
        let expected = [w0 - s, w0, w0, w0 + s];
        for (v, e) in ev.iter().zip(expected) {
            assert!((v.re - e).abs() < 1e-10 && v.im.abs() < 1e-10, "{v} vs {e}");
        }
    }
}
