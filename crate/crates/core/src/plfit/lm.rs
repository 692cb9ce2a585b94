//! Damped least squares with central-difference Jacobians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmOptions<T> {
    pub max_iterations: usize,
    /// relative cost decrease treated as converged
    pub ftol: T,
    /// relative step treated as converged
    pub xtol: T,
    /// finite-difference step as a fraction of each parameter scale
    pub fd_fraction: T,
}

impl<T: Real> Default for LmOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            ftol: T::lit(1e-12),
            xtol: T::lit(1e-10),
            fd_fraction: T::lit(1e-4),
        }
    }
}

/// Optimizer trace: the cost after every accepted iteration never increases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence<T> {
    pub converged: bool,
    pub iterations: usize,
    pub cost_history: Vec<T>,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct LmReport<T> {
    pub x: Vec<T>,
    pub residuals: Vec<T>,
    /// `½‖r‖²`
    pub cost: T,
    /// `(JᵀJ)⁻¹` at the solution, `None` if singular
    pub covariance: Option<Vec<Vec<T>>>,
    /// `JᵀJ` at the solution
    pub normal_matrix: Vec<Vec<T>>,
    pub convergence: Convergence<T>,
}

impl<T: Real> LmReport<T> {
    /// One-sigma uncertainties scaled by the residual variance.
    pub fn uncertainties(&self) -> Vec<T> {
        let m = self.residuals.len();
        let n = self.x.len();
        let dof = if m > n { m - n } else { 1 };
        let s2 = T::lit(2.0) * self.cost / T::lit(dof as f64);
        match &self.covariance {
            Some(c) => (0..n).map(|i| (c[i][i].abs() * s2).sqrt()).collect(),
            None => vec![T::nan(); n],
        }
    }

    /// Correlation matrix derived from the covariance.
    pub fn correlation(&self) -> Option<Vec<Vec<T>>> {
        let c = self.covariance.as_ref()?;
        let n = c.len();
        Some(
            (0..n)
                .map(|i| (0..n).map(|j| c[i][j] / (c[i][i] * c[j][j]).abs().sqrt()).collect())
                .collect(),
        )
    }
}

fn cost_of<T: Real>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |a, x| a + *x * *x) / T::lit(2.0)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense<T: Real>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut m: Vec<Vec<T>> = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(*bi);
        r
    }).collect();
    let scale = a.iter().flatten().fold(T::zero(), |s, x| s.max(x.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if m[piv][col].abs() <= scale * T::epsilon() * T::lit(n as f64) || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f != T::zero() {
                for k in col..=n {
                    let v = m[col][k];
                    m[i][k] -= f * v;
                }
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for k in i + 1..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Solves `A δ = −g` after symmetric diagonal scaling, so parameters with
/// very different sensitivities do not look singular.
fn solve_scaled<T: Real>(a: &[Vec<T>], g: &[T]) -> Option<Vec<T>> {
    let n = g.len();
    let d: Vec<T> = (0..n).map(|i| {
        let v = a[i][i].abs().sqrt();
        if v > T::zero() { v } else { T::one() }
    }).collect();
    let scaled: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| a[i][j] / (d[i] * d[j])).collect()).collect();
    let rhs: Vec<T> = (0..n).map(|i| -g[i] / d[i]).collect();
    let y = solve_dense(&scaled, &rhs)?;
    Some((0..n).map(|i| y[i] / d[i]).collect())
}

fn invert<T: Real>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        // solve_scaled solves A x = −g, so pass −e_j
        let mut e = vec![T::zero(); n];
        e[j] = -T::one();
        cols.push(solve_scaled(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

fn jacobian<T: Real>(
    f: &mut impl FnMut(&[T]) -> Result<Vec<T>>,
    x: &[T],
    scales: &[T],
    lower: &[T],
    upper: &[T],
    frac: T,
) -> Result<Vec<Vec<T>>> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let h = scales[i] * frac;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] = (x[i] + h).min(upper[i]);
        xm[i] = (x[i] - h).max(lower[i]);
        let span = xp[i] - xm[i];
        if span == T::zero() {
            // parameter pinned by equal bounds
            cols.push(vec![T::zero(); f(x)?.len()]);
            continue;
        }
        let rp = f(&xp)?;
        let rm = f(&xm)?;
        cols.push(rp.iter().zip(&rm).map(|(a, b)| (*a - *b) / span).collect::<Vec<T>>());
    }
    Ok(cols)
}

/// Bound-constrained Levenberg–Marquardt.
///
/// `f` maps parameters to residuals. `scales` set the finite-difference steps
/// and must be positive. Steps are projected onto `[lower, upper]`; a step is
/// only accepted if it lowers the cost. A failing residual evaluation during
/// a trial step counts as a rejected step.
pub fn levenberg_marquardt<T: Real>(
    mut f: impl FnMut(&[T]) -> Result<Vec<T>>,
    x0: &[T],
    scales: &[T],
    lower: &[T],
    upper: &[T],
    opts: &LmOptions<T>,
) -> Result<LmReport<T>> {
    let n = x0.len();
    if scales.len() != n || lower.len() != n || upper.len() != n {
        return Err(Error::Dimension("parameter, scale and bound lengths differ".into()));
    }
    if scales.iter().any(|s| !(*s > T::zero())) {
        return Err(Error::InvalidParams("parameter scales must be positive".into()));
    }
    let clamp = |x: &mut Vec<T>| {
        for i in 0..n {
            x[i] = x[i].max(lower[i]).min(upper[i]);
        }
    };
    let mut x = x0.to_vec();
    clamp(&mut x);
    let mut r = f(&x)?;
    let mut cost = cost_of(&r);
    if !cost.is_finite() {
        return Err(Error::InvalidParams("initial residuals are not finite".into()));
    }
    let mut history = vec![cost];
    let mut mu = T::lit(1e-3);
    let mut converged = false;
    let mut message = String::from("iteration limit reached");
    let mut iterations = 0;
    let mut jtj = vec![vec![T::zero(); n]; n];

    while iterations < opts.max_iterations {
        iterations += 1;
        let j = jacobian(&mut f, &x, scales, lower, upper, opts.fd_fraction)?;
        for a in 0..n {
            for b in 0..n {
                jtj[a][b] = j[a].iter().zip(&j[b]).fold(T::zero(), |s, (p, q)| s + *p * *q);
            }
        }
        let grad: Vec<T> = (0..n).map(|a| j[a].iter().zip(&r).fold(T::zero(), |s, (p, q)| s + *p * *q)).collect();
        let gnorm = grad.iter().zip(scales).fold(T::zero(), |m, (g, s)| m.max((*g * *s).abs()));
        if gnorm <= T::epsilon() * cost.max(T::min_positive_value()) {
            converged = true;
            message = "gradient vanished".into();
            break;
        }
        let mut accepted = false;
        while mu < T::lit(1e20) {
            let mut damped = jtj.clone();
            for a in 0..n {
                damped[a][a] += mu * jtj[a][a].max(T::lit(1e-12) / (scales[a] * scales[a]));
            }
            let step = match solve_scaled(&damped, &grad) {
                Some(s) => s,
                None => {
                    mu = mu * T::lit(4.0);
                    continue;
                }
            };
            let mut trial: Vec<T> = x.iter().zip(&step).map(|(a, b)| *a + *b).collect();
            clamp(&mut trial);
            let trial_r = match f(&trial) {
                Ok(v) => v,
                Err(_) => {
                    mu = mu * T::lit(4.0);
                    continue;
                }
            };
            let trial_cost = cost_of(&trial_r);
            if trial_cost.is_finite() && trial_cost < cost {
                let rel_step = trial
                    .iter()
                    .zip(&x)
                    .zip(scales)
                    .fold(T::zero(), |m, ((a, b), s)| m.max((*a - *b).abs() / s.max(b.abs())));
                let rel_cost = (cost - trial_cost) / cost;
                x = trial;
                r = trial_r;
                cost = trial_cost;
                history.push(cost);
                mu = (mu / T::lit(3.0)).max(T::lit(1e-12));
                accepted = true;
                if rel_cost < opts.ftol {
                    converged = true;
                    message = "relative cost decrease below tolerance".into();
                } else if rel_step < opts.xtol {
                    converged = true;
                    message = "relative step below tolerance".into();
                }
                break;
            }
            mu = mu * T::lit(4.0);
        }
        if converged {
            break;
        }
        if !accepted {
            // no descent possible from here: a local minimum to working precision
            converged = true;
            message = "no further descent".into();
            break;
        }
    }
    // normal matrix at the final point
    let j = jacobian(&mut f, &x, scales, lower, upper, opts.fd_fraction)?;
    for a in 0..n {
        for b in 0..n {
            jtj[a][b] = j[a].iter().zip(&j[b]).fold(T::zero(), |s, (p, q)| s + *p * *q);
        }
    }
    Ok(LmReport {
        covariance: invert(&jtj),
        normal_matrix: jtj,
        x,
        residuals: r,
        cost,
        convergence: Convergence { converged, iterations, cost_history: history, message },
    })
}
