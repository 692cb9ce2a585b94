//! Brute-force master-equation propagation with instantaneous pulse kicks.
//!
//! Operators are assembled here directly from the basis occupation numbers,
//! without going through the model's operator or rung-block builders.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::basis::LadderBasis;
use crate::model::operators::{OperatorMatrix, OperatorRole};
use crate::model::params::TunedParams;
use crate::scalar::{cplx, czero, Cplx, Real};

use super::ode::{integrate, OdeConfig};
use crate::fwm::PulseConfig;

/// Sparse square operator as `(row, col, value)` triples.
#[derive(Clone, Debug)]
struct Sparse<T: Real> {
    dim: usize,
    entries: Vec<(usize, usize, Cplx<T>)>,
}

impl<T: Real> Sparse<T> {
    fn from_dense(m: &CMatrix<T>) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != czero() {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Self { dim: m.rows(), entries }
    }

    /// `out += c · S·ρ`
    fn left_mul_acc(&self, rho: &[Cplx<T>], c: Cplx<T>, out: &mut [Cplx<T>]) {
        let d = self.dim;
        for &(i, k, v) in &self.entries {
            let f = v * c;
            for j in 0..d {
                out[i * d + j] += f * rho[k * d + j];
            }
        }
    }

    /// `out += c · ρ·S`
    fn right_mul_acc(&self, rho: &[Cplx<T>], c: Cplx<T>, out: &mut [Cplx<T>]) {
        let d = self.dim;
        for &(k, j, v) in &self.entries {
            let f = v * c;
            for i in 0..d {
                out[i * d + j] += f * rho[i * d + k];
            }
        }
    }

    /// `out += c · S·ρ·S†`
    fn sandwich_acc(&self, rho: &[Cplx<T>], c: Cplx<T>, out: &mut [Cplx<T>]) {
        let d = self.dim;
        for &(i, k, v) in &self.entries {
            for &(j, l, w) in &self.entries {
                // (SρS†)_ij = Σ S_ik ρ_kl conj(S_jl)
                out[i * d + j] += c * v * rho[k * d + l] * w.conj();
            }
        }
    }
}

/// Operators of the truncated ladder built from occupation numbers.
struct LadderOperators<T: Real> {
    dim: usize,
    a: CMatrix<T>,
    sigma: Vec<CMatrix<T>>,
}

impl<T: Real> LadderOperators<T> {
    fn new(basis: &LadderBasis) -> Self {
        let states = basis.states();
        let dim = states.len();
        let find = |photons: u8, excitons: &[u8]| {
            states
                .iter()
                .position(|s| s.photons == photons && s.excitons.as_slice() == excitons)
        };
        let mut a = CMatrix::zeros(dim, dim);
        let mut sigma = vec![CMatrix::zeros(dim, dim); basis.n_emitters()];
        for (j, s) in states.iter().enumerate() {
            if s.photons > 0 {
                if let Some(i) = find(s.photons - 1, &s.excitons) {
                    a[(i, j)] = cplx(T::lit(s.photons as f64).sqrt(), T::zero());
                }
            }
            for (n, sig) in sigma.iter_mut().enumerate() {
                if s.excitons[n] == 1 {
                    let mut lowered = s.excitons.clone();
                    lowered[n] = 0;
                    if let Some(i) = find(s.photons, &lowered) {
                        sig[(i, j)] = cplx(T::one(), T::zero());
                    }
                }
            }
        }
        Self { dim, a, sigma }
    }
}

/// Lindblad generator `dρ/dt = −(i/ħ)(H̃ρ − ρH̃† + 2iγ_C aρa† + 2iΣγ_n σ_nρσ_n†)`.
struct MasterEquation<T: Real> {
    dim: usize,
    h_eff: Sparse<T>,
    h_eff_adj: Sparse<T>,
    jumps: Vec<(T, Sparse<T>)>,
}

impl<T: Real> MasterEquation<T> {
    fn new(tuned: &TunedParams<T>, ops: &LadderOperators<T>) -> Self {
        let dim = ops.dim;
        let r = tuned.reference;
        let a = &ops.a;
        let ad = a.adjoint();
        let mut h = (&ad * a).scale(cplx(tuned.omega_c - r, -tuned.gamma_c));
        for (n, s) in ops.sigma.iter().enumerate() {
            let sd = s.adjoint();
            h = &h + &(&sd * s).scale(cplx(tuned.omega_x[n] - r, -tuned.gamma_x[n]));
            h = &h + &(&(&ad * s) + &(&sd * a)).scale(cplx(tuned.g[n], T::zero()));
        }
        let mut jumps = vec![(tuned.gamma_c, Sparse::from_dense(a))];
        for (n, s) in ops.sigma.iter().enumerate() {
            jumps.push((tuned.gamma_x[n], Sparse::from_dense(s)));
        }
        Self {
            dim,
            h_eff_adj: Sparse::from_dense(&h.adjoint()),
            h_eff: Sparse::from_dense(&h),
            jumps,
        }
    }

    fn rhs(&self, rho: &[Cplx<T>], out: &mut [Cplx<T>]) {
        out.iter_mut().for_each(|x| *x = czero());
        let hbar = T::hbar();
        let mi = cplx(T::zero(), -T::one() / hbar);
        // −(i/ħ) H̃ρ + (i/ħ) ρH̃†
        self.h_eff.left_mul_acc(rho, mi, out);
        self.h_eff_adj.right_mul_acc(rho, -mi, out);
        // −(i/ħ)·2iγ = 2γ/ħ
        for (gamma, op) in &self.jumps {
            if *gamma != T::zero() {
                op.sandwich_acc(rho, cplx(T::lit(2.0) * *gamma / hbar, T::zero()), out);
            }
        }
        debug_assert_eq!(out.len(), self.dim * self.dim);
    }
}

fn to_flat<T: Real>(m: &CMatrix<T>) -> Vec<Cplx<T>> {
    m.as_slice().to_vec()
}

fn from_flat<T: Real>(v: &[Cplx<T>], d: usize) -> CMatrix<T> {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

fn check_rho<T: Real>(rho: &OperatorMatrix<T>, basis: &LadderBasis) -> Result<()> {
    if rho.dim() != basis.len() || !rho.matrix.is_square() {
        return Err(Error::Dimension(format!(
            "density matrix is {}x{}, basis has {} states",
            rho.matrix.rows(),
            rho.matrix.cols(),
            basis.len()
        )));
    }
    Ok(())
}

/// Integrates the master equation from `times[0]`, returning `ρ` at every
/// requested time. `times` must be non-decreasing.
pub fn evolve_density_matrix<T: Real>(
    tuned: &TunedParams<T>,
    rho0: &OperatorMatrix<T>,
    times: &[T],
    cfg: &OdeConfig<T>,
) -> Result<Vec<OperatorMatrix<T>>> {
    let basis = LadderBasis::new(tuned.n_emitters())?;
    check_rho(rho0, &basis)?;
    let ops = LadderOperators::new(&basis);
    let me = MasterEquation::new(tuned, &ops);
    let d = ops.dim;
    let f = |_t: T, y: &[Cplx<T>], dy: &mut [Cplx<T>]| me.rhs(y, dy);
    let mut y = to_flat(&rho0.matrix);
    let mut out = Vec::with_capacity(times.len());
    let mut t = match times.first() {
        Some(t) => *t,
        None => return Ok(out),
    };
    for &tn in times {
        integrate(&f, &mut y, t, tn, cfg)?;
        t = tn;
        out.push(OperatorMatrix::new(OperatorRole::Density, from_flat(&y, d)));
    }
    Ok(out)
}

/// Third-order polarization `Tr{ρ a}` on `t_grid` for one delay, obtained by
/// kicking the ground state with both pulses and integrating in between.
///
/// `t` is measured from the second-arriving pulse; the rotating frame of
/// `tuned.reference` is used throughout.
pub fn fwm_via_ode<T: Real>(tuned: &TunedParams<T>, pulses: &PulseConfig<T>, t_grid: &[T], tau: T, cfg: &OdeConfig<T>) -> Result<Vec<Cplx<T>>> {
    if t_grid.iter().any(|t| *t < T::zero()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("emission times must be >= 0 and sorted".into()));
    }
    let basis = LadderBasis::new(tuned.n_emitters())?;
    let ops = LadderOperators::new(&basis);
    let me = MasterEquation::new(tuned, &ops);
    let d = ops.dim;
    let f = |_t: T, y: &[Cplx<T>], dy: &mut [Cplx<T>]| me.rhs(y, dy);
    let a = &ops.a;
    let ad = a.adjoint();
    let kick1 = |rho: &CMatrix<T>| a.commutator(rho).scale(cplx(T::zero(), -T::one()) * pulses.area1.conj());
    let kick2 = |rho: &CMatrix<T>| {
        let inner = ad.commutator(rho);
        ad.commutator(&inner).scale(pulses.area2 * pulses.area2 * T::lit(-0.5))
    };

    let mut rho = CMatrix::zeros(d, d);
    rho[(0, 0)] = cplx(T::one(), T::zero());
    let first = if tau >= T::zero() { kick1(&rho) } else { kick2(&rho) };
    let mut y = to_flat(&first);
    integrate(&f, &mut y, T::zero(), tau.abs(), cfg)?;
    let mid = from_flat(&y, d);
    let second = if tau >= T::zero() { kick2(&mid) } else { kick1(&mid) };
    let mut y = to_flat(&second);

    let scale = if pulses.include_prefactor { cplx(T::one(), T::zero()) } else { cplx(T::zero(), T::lit(-2.0)) };
    let mut out = Vec::with_capacity(t_grid.len());
    let mut t = T::zero();
    for &tn in t_grid {
        integrate(&f, &mut y, t, tn, cfg)?;
        t = tn;
        // Tr{ρa} = Σ ρ_ij a_ji
        let mut p: Cplx<T> = czero();
        for i in 0..d {
            for j in 0..d {
                p += y[i * d + j] * a[(j, i)];
            }
        }
        out.push(p * scale);
    }
    Ok(out)
}
