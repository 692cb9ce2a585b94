//! Eigenvalues as roots of `det(A − λI)`, independent of any QR iteration.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cplx, czero, Cplx, Real};

pub const CHARPOLY_MAX_DIM: usize = 8;

/// Coefficients `c_0 … c_n` (ascending, `c_n = 1`) of `det(λI − A)` by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly_coefficients<T: Real>(a: &CMatrix<T>) -> Result<Vec<Cplx<T>>> {
    if !a.is_square() {
        return Err(Error::Dimension("characteristic polynomial needs a square matrix".into()));
    }
    let n = a.rows();
    let mut c = vec![czero(); n + 1];
    c[n] = cplx(T::one(), T::zero());
    let mut m = CMatrix::zeros(n, n);
    let id = CMatrix::identity(n);
    for k in 1..=n {
        m = &(a * &m) + &id.scale(c[n + 1 - k]);
        let am = a * &m;
        c[n - k] = -am.trace() / T::lit(k as f64);
    }
    Ok(c)
}

fn horner<T: Real>(c: &[Cplx<T>], z: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
    let mut p = czero();
    let mut dp = czero();
    for coef in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + *coef;
    }
    (p, dp)
}

/// Simultaneous Aberth–Ehrlich iteration for all roots of a monic polynomial.
fn aberth<T: Real>(c: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let n = c.len() - 1;
    // Cauchy bound on root moduli
    let radius = T::one() + c[..n].iter().fold(T::zero(), |m, x| m.max(x.norm()));
    let r0 = radius.min(T::one() + c[..n].iter().enumerate().fold(T::zero(), |m, (k, x)| {
        m.max(x.norm().powf(T::one() / T::lit((n - k) as f64)))
    }) * T::lit(2.0));
    let mut z: Vec<Cplx<T>> = (0..n)
        .map(|k| {
            let ang = T::lit(2.0) * T::PI() * T::lit(k as f64) / T::lit(n as f64) + T::lit(0.4);
            cplx(r0 * ang.cos(), r0 * ang.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut moved = T::zero();
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p == czero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = czero();
            for j in 0..n {
                if j != i {
                    s += cplx(T::one(), T::zero()) / (z[i] - z[j]);
                }
            }
            let w = ratio / (cplx(T::one(), T::zero()) - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(T::one()));
            }
        }
        if moved < T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    z
}

/// Eigenvalues from the characteristic polynomial, polished by Newton steps
/// on `det(A − λI)` (`Δλ = 1 / tr((A − λI)⁻¹)`).
pub fn charpoly_eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<Cplx<T>>> {
    if !a.is_square() {
        return Err(Error::Dimension("eigenvalues need a square matrix".into()));
    }
    let n = a.rows();
    if n > CHARPOLY_MAX_DIM {
        return Err(Error::Dimension(format!("characteristic polynomial oracle limited to {CHARPOLY_MAX_DIM}x{CHARPOLY_MAX_DIM}, got {n}x{n}")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // center and scale to keep the coefficients tame
    let shift = a.trace() / T::lit(n as f64);
    let centered = &(a - &CMatrix::identity(n).scale(shift));
    let scale = centered.max_abs();
    if scale == T::zero() {
        return Ok(vec![shift; n]);
    }
    let b = centered.scale(cplx(T::one() / scale, T::zero()));
    let coeffs = charpoly_coefficients(&b)?;
    let roots = aberth(&coeffs);
    let mut out = Vec::with_capacity(n);
    for r in roots {
        let mut lam = r * scale + shift;
        for _ in 0..3 {
            let shifted = a - &CMatrix::identity(n).scale(lam);
            let inv = match shifted.inverse() {
                Ok(inv) => inv,
                Err(_) => break,
            };
            let step = cplx(T::one(), T::zero()) / inv.trace();
            if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > scale * T::lit(1e-6) {
                break;
            }
            lam += step;
        }
        out.push(lam);
    }
    crate::eigen::sort_eigenvalues(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn diagonal_entries() {
        let d = [C::new(3.0, -1.0), C::new(-2.0, 0.5), C::new(7.0, 0.0), C::new(0.1, -4.0)];
        let ev = charpoly_eigenvalues(&CMatrix::from_diagonal(&d)).unwrap();
        let mut expect = d.to_vec();
        crate::eigen::sort_eigenvalues(&mut expect);
        for (x, y) in ev.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn jaynes_cummings_block() {
        let (wc, wx, g) = (C::new(10.0, -30.0), C::new(-25.0, -8.0), 43.0);
        let m = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => wc,
            (1, 1) => wx,
            _ => C::new(g, 0.0),
        });
        let ev = charpoly_eigenvalues(&m).unwrap();
        let mean = (wc + wx) / 2.0;
        let delta = wc - wx;
        let root = (C::new(g * g, 0.0) + delta * delta / 4.0).sqrt();
        let mut expect = vec![mean + root, mean - root];
        crate::eigen::sort_eigenvalues(&mut expect);
        for (x, y) in ev.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_large() {
        assert!(charpoly_eigenvalues(&CMatrix::<f64>::identity(9)).is_err());
    }

    #[test]
    fn companion_coefficients() {
        // det(λI − diag(1, 2)) = λ² − 3λ + 2
        let c = charpoly_coefficients(&CMatrix::from_diagonal(&[C::new(1.0, 0.0), C::new(2.0, 0.0)])).unwrap();
        assert_eq!(c, vec![C::new(2.0, 0.0), C::new(-3.0, 0.0), C::new(1.0, 0.0)]);
    }
}
