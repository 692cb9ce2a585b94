//! Explicit Runge–Kutta integrators for complex linear systems.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeMethod<T> {
    /// classical fourth-order Runge–Kutta with a fixed step (ps)
    Rk4 { step: T },
    /// Dormand–Prince 5(4) with error control
    DormandPrince { rtol: T, atol: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeConfig<T> {
    pub method: OdeMethod<T>,
    /// upper bound on any step (ps)
    pub max_step: T,
}

impl<T: Real> Default for OdeConfig<T> {
    fn default() -> Self {
        Self {
            method: OdeMethod::DormandPrince { rtol: T::lit(1e-10), atol: T::lit(1e-13) },
            max_step: T::lit(0.05),
        }
    }
}

impl<T: Real> OdeConfig<T> {
    pub fn rk4(step: T) -> Self {
        Self { method: OdeMethod::Rk4 { step }, max_step: step }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.method {
            OdeMethod::Rk4 { step } => step > T::zero() && step.is_finite(),
            OdeMethod::DormandPrince { rtol, atol } => rtol > T::zero() && atol > T::zero(),
        };
        if !ok || !(self.max_step > T::zero()) {
            return Err(Error::InvalidParams("ODE tolerances and steps must be positive".into()));
        }
        Ok(())
    }
}

/// Right-hand side `dy/dt = f(t, y)` written into the last argument.
pub trait Rhs<T: Real> {
    fn eval(&self, t: T, y: &[Cplx<T>], dy: &mut [Cplx<T>]);
}

impl<T: Real, F: Fn(T, &[Cplx<T>], &mut [Cplx<T>])> Rhs<T> for F {
    fn eval(&self, t: T, y: &[Cplx<T>], dy: &mut [Cplx<T>]) {
        self(t, y, dy)
    }
}

/// Advances `y` from `t0` to `t1` in place.
pub fn integrate<T: Real>(f: &impl Rhs<T>, y: &mut [Cplx<T>], t0: T, t1: T, cfg: &OdeConfig<T>) -> Result<()> {
    cfg.validate()?;
    if t1 == t0 {
        return Ok(());
    }
    if t1 < t0 {
        return Err(Error::InvalidGrid(format!("integration must move forward ({t0} -> {t1})")));
    }
    match cfg.method {
        OdeMethod::Rk4 { step } => rk4(f, y, t0, t1, step.min(cfg.max_step)),
        OdeMethod::DormandPrince { rtol, atol } => dopri(f, y, t0, t1, rtol, atol, cfg.max_step),
    }
}

fn axpy<T: Real>(out: &mut [Cplx<T>], y: &[Cplx<T>], terms: &[(T, &[Cplx<T>])], h: T) {
    for i in 0..y.len() {
        let mut acc = y[i];
        for (c, k) in terms {
            acc += k[i] * (*c * h);
        }
        out[i] = acc;
    }
}

fn rk4<T: Real>(f: &impl Rhs<T>, y: &mut [Cplx<T>], t0: T, t1: T, step: T) -> Result<()> {
    let n = y.len();
    let steps = ((t1 - t0) / step).ceil().to_usize().unwrap_or(1).max(1);
    let h = (t1 - t0) / T::lit(steps as f64);
    let z = Cplx::new(T::zero(), T::zero());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![z; n], vec![z; n], vec![z; n], vec![z; n], vec![z; n]);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    for s in 0..steps {
        let t = t0 + h * T::lit(s as f64);
        f.eval(t, y, &mut k1);
        axpy(&mut tmp, y, &[(half, &k1)], h);
        f.eval(t + h * half, &tmp, &mut k2);
        axpy(&mut tmp, y, &[(half, &k2)], h);
        f.eval(t + h * half, &tmp, &mut k3);
        axpy(&mut tmp, y, &[(T::one(), &k3)], h);
        f.eval(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * T::lit(2.0) + k4[i]) * (h * sixth);
        }
    }
    Ok(())
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dopri<T: Real>(f: &impl Rhs<T>, y: &mut [Cplx<T>], t0: T, t1: T, rtol: T, atol: T, max_step: T) -> Result<()> {
    let n = y.len();
    let z = Cplx::new(T::zero(), T::zero());
    let mut k: Vec<Vec<Cplx<T>>> = vec![vec![z; n]; 7];
    let mut tmp = vec![z; n];
    let mut t = t0;
    let mut h = max_step.min(t1 - t0);
    f.eval(t, y, &mut k[0]);
    let min_step = T::epsilon() * T::lit(16.0) * t1.abs().max(T::one());
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (T::lit(a) * h);
                    }
                }
                tmp[i] = acc;
            }
            let (_, tail) = k.split_at_mut(s);
            f.eval(t + T::lit(C[s]) * h, &tmp, &mut tail[0]);
        }
        // stage 6 was evaluated at the fifth-order solution, which is `tmp`
        let mut err = T::zero();
        for i in 0..n {
            let mut e = z;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * T::lit(E[j]);
                }
            }
            let scale = atol + rtol * y[i].norm().max(tmp[i].norm());
            err = err.max((e * h).norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integration { t: t.to_f64_lossy(), reason: "non-finite state".into() });
        }
        if err <= T::one() {
            t = if t1 - t - h <= min_step { t1 } else { t + h };
            y.copy_from_slice(&tmp);
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
        }
        let fac = if err == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
        };
        h = (h * fac).min(max_step);
        if h < min_step && t < t1 {
            return Err(Error::Integration { t: t.to_f64_lossy(), reason: format!("step size underflow ({h} ps)") });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn rotating(t: f64, y: &[C64], dy: &mut [C64]) {
        let _ = t;
        // y' = (-0.3 + 2i) y
        dy[0] = y[0] * C64::new(-0.3, 2.0);
    }

    fn exact(t: f64) -> C64 {
        (C64::new(-0.3, 2.0) * t).exp()
    }

    #[test]
    fn dormand_prince_hits_tolerance() {
        let mut y = vec![C64::new(1.0, 0.0)];
        integrate(&rotating, &mut y, 0.0, 5.0, &OdeConfig::default()).unwrap();
        assert!((y[0] - exact(5.0)).norm() < 1e-9);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |h: f64| {
            let mut y = vec![C64::new(1.0, 0.0)];
            integrate(&rotating, &mut y, 0.0, 2.0, &OdeConfig::rk4(h)).unwrap();
            (y[0] - exact(2.0)).norm()
        };
        let ratio = err(0.05) / err(0.025);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn backwards_span_rejected() {
        let mut y = vec![C64::new(1.0, 0.0)];
        assert!(integrate(&rotating, &mut y, 1.0, 0.0, &OdeConfig::default()).is_err());
    }

    #[test]
    fn stiff_underflow_reported() {
        let blow = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = y[0] * y[0] * 1e3;
        let mut y = vec![C64::new(1.0, 0.0)];
        let r = integrate(&blow, &mut y, 0.0, 1.0, &OdeConfig::default());
        assert!(matches!(r, Err(Error::Integration { .. })), "{r:?}");
    }
}
