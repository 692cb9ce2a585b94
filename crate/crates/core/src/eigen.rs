//! Eigendecomposition of general (non-Hermitian) complex matrices.
//!
//! Householder reduction to upper Hessenberg form, single-shift complex QR
//! sweeps to a Schur form `A = Q T Qᴴ`, then eigenvectors of the triangular
//! factor by back substitution. Left eigenvectors are the rows of the inverse
//! of the right-eigenvector matrix, so `left · right = 1` holds by construction.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cone, cplx, czero, Cplx, Real};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenpairs sorted by ascending real part, ties broken by ascending imaginary part.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<Cplx<T>>,
    /// Right eigenvectors as columns, each of unit 2-norm.
    pub right: CMatrix<T>,
    /// Left eigenvectors as rows; `left * right` is the identity.
    pub left: CMatrix<T>,
    /// 1-norm condition number of `right`.
    pub condition: T,
}

/// Schur factorisation `A = Q T Qᴴ` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur<T: Real> {
    pub q: CMatrix<T>,
    pub t: CMatrix<T>,
}

/// Ordering used for every eigenvalue list in the crate.
pub fn compare_eigenvalues<T: Real>(a: &Cplx<T>, b: &Cplx<T>, tie_tol: T) -> Ordering {
    if (a.re - b.re).abs() <= tie_tol {
        a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
    } else {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    }
}

fn tie_tolerance<T: Real>(values: &[Cplx<T>]) -> T {
    let scale = values.iter().fold(T::one(), |acc, z| acc.max(z.norm()));
    scale * T::lit(1e-9)
}

/// Sort a list of eigenvalues with the crate-wide ordering.
pub fn sort_eigenvalues<T: Real>(values: &mut [Cplx<T>]) {
    let tol = tie_tolerance(values);
    values.sort_by(|a, b| compare_eigenvalues(a, b, tol));
}

fn householder_hessenberg<T: Real>(a: &mut CMatrix<T>, q: &mut CMatrix<T>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm = (k + 1..n).fold(T::zero(), |acc, i| acc + a[(i, k)].norm_sqr()).sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { cone() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Cplx<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if vnorm == T::zero() {
            continue;
        }
        v.iter_mut().for_each(|z| *z = *z / vnorm);
        let two = T::lit(2.0);

        // A <- (I - 2vvᴴ) A
        for j in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(czero::<T>(), |acc, (r, vr)| acc + vr.conj() * a[(k + 1 + r, j)]);
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= *vr * dot * two;
            }
        }
        // A <- A (I - 2vvᴴ), Q <- Q (I - 2vvᴴ)
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let dot = v
                    .iter()
                    .enumerate()
                    .fold(czero::<T>(), |acc, (r, vr)| acc + m[(i, k + 1 + r)] * *vr);
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= dot * vr.conj() * two;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = czero();
        }
    }
}

/// Givens rotation `G = [[c, s], [-s̄, c]]` with `G [a; b] = [r; 0]`.
fn givens<T: Real>(a: Cplx<T>, b: Cplx<T>) -> (T, Cplx<T>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == T::zero() {
        return (T::one(), czero());
    }
    if na == T::zero() {
        return (T::zero(), cone());
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift<T: Real>(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>) -> Cplx<T> {
    // eigenvalue of [[a, b], [c, d]] closest to d
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let disc = (((a - d) * half) * ((a - d) * half) + b * c).sqrt();
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur factorisation.
pub fn schur<T: Real>(a: &CMatrix<T>) -> Result<Schur<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("eigenproblem needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    householder_hessenberg(&mut h, &mut q);
    if n <= 1 {
        return Ok(Schur { q, t: h });
    }

    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let limit = MAX_SWEEPS_PER_EIGENVALUE * n;

    while hi > 0 {
        // find the start of the active unreduced block
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == T::zero() { h.frobenius_norm() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > limit {
            return Err(Error::EigenNoConvergence { iterations: total });
        }

        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            let e = h[(hi, hi - 1)].re.abs() + if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { T::zero() };
            h[(hi, hi)] + cplx(e * T::lit(0.75), e * T::lit(0.25))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let row_end = (k + 2).min(hi + 1);
            for i in 0..row_end {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Ok(Schur { q, t: h })
}

/// Eigenvalues only, sorted.
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<Cplx<T>>> {
    let s = schur(a)?;
    let mut v = s.t.diagonal();
    sort_eigenvalues(&mut v);
    Ok(v)
}

fn triangular_eigenvectors<T: Real>(t: &CMatrix<T>) -> CMatrix<T> {
    let n = t.rows();
    let scale = t.frobenius_norm().max(T::min_positive_value());
    let degenerate = scale * T::lit(1e-12);
    let negligible = scale * T::lit(1e-10);
    let small = scale * T::epsilon();
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = cone();
        for i in (0..k).rev() {
            let s = (i + 1..=k).fold(czero::<T>(), |acc, j| acc + t[(i, j)] * y[(j, k)]);
            let mut d = t[(i, i)] - lambda;
            if d.norm() <= degenerate {
                if s.norm() <= negligible {
                    y[(i, k)] = czero();
                    continue;
                }
                d = cplx(small, T::zero());
            }
            y[(i, k)] = -s / d;
        }
    }
    y
}

/// Full eigendecomposition with sorted eigenpairs.
pub fn eigen<T: Real>(a: &CMatrix<T>) -> Result<Eigen<T>> {
    let n = a.rows();
    let s = schur(a)?;
    let y = triangular_eigenvectors(&s.t);
    let x = &s.q * &y;
    let values_unsorted = s.t.diagonal();

    let tol = tie_tolerance(&values_unsorted);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| compare_eigenvalues(&values_unsorted[i], &values_unsorted[j], tol));

    let mut right = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (new, &old) in order.iter().enumerate() {
        let mut col = x.column(old);
        let norm = col.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm > T::zero() {
            // fix the overall phase: largest component real and positive
            let (_, pivot) = col
                .iter()
                .fold((T::zero(), cone::<T>()), |best, z| if z.norm() > best.0 { (z.norm(), *z) } else { best });
            let phase = pivot.conj() / pivot.norm();
            col.iter_mut().for_each(|z| *z = *z * phase / norm);
        }
        right.set_column(new, &col);
        values.push(values_unsorted[old]);
    }
    let left = right.inverse()?;
    let condition = right.norm1() * left.norm1();
    Ok(Eigen {
        values,
        right,
        left,
        condition,
    })
}


/// Largest pairwise distance after matching two eigenvalue multisets.
///
/// Pairs are matched greedily by increasing distance, which is exact when
/// the tolerance of interest is well below the spacing of either set.
/// Returns `None` when the sets differ in size.
pub fn multiset_distance<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((*x - *y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = T::zero();
    let mut matched = 0;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
        matched += 1;
        if matched == a.len() {
            break;
        }
    }
    Some(worst)
}
