//! Physical parameters and the temperature-tuning model.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};

/// Band-gap shift model: `F(T) = -(αθ/2)(coth(θ/2T) - 1)`.
///
/// Excitons shift by `F(T)`, the cavity by `η·F(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Serialize + DeserializeOwned")]
pub struct TemperatureModel<T> {
    /// μeV/K
    pub alpha: T,
    /// K
    pub theta: T,
    /// cavity shift relative to the exciton shift
    pub eta: T,
}

impl<T: Real> TemperatureModel<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.theta > T::zero()) || !self.theta.is_finite() {
            return Err(Error::InvalidParams(format!("theta must be > 0, got {}", self.theta)));
        }
        if !(self.eta >= T::zero() && self.eta <= T::one()) {
            return Err(Error::InvalidParams(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    /// Exciton energy shift in μeV at temperature `t` (K). `F(0) = 0`.
    pub fn shift(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidParams(format!("temperature must be >= 0 K, got {t}")));
        }
        Ok(self.shift_unchecked(t))
    }

    pub(crate) fn shift_unchecked(&self, t: T) -> T {
        if t == T::zero() {
            return T::zero();
        }
        let two = T::lit(2.0);
        let x = self.theta / (two * t);
        // coth(x) - 1 = 2 e^{-2x} / (1 - e^{-2x}), stable for large x
        let e = (-two * x).exp();
        let coth_minus_one = two * e / (T::one() - e);
        -(self.alpha * self.theta / two) * coth_minus_one
    }
}

/// Static parameters of N excitons coupled to one cavity mode. Energies in μeV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Serialize + DeserializeOwned")]
pub struct SystemParams<T> {
    /// exciton energies at T = 0
    pub omega_x0: Vec<T>,
    /// cavity energy at T = 0
    pub omega_c0: T,
    /// exciton-cavity couplings
    pub g: Vec<T>,
    /// exciton HWHM dampings
    pub gamma_x: Vec<T>,
    /// cavity HWHM damping
    pub gamma_c: T,
    /// spectrometer HWHM
    pub gamma_s: T,
    pub temp_model: TemperatureModel<T>,
}

impl<T: Real> SystemParams<T> {
    pub fn n_emitters(&self) -> usize {
        self.omega_x0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.omega_x0.len();
        if n == 0 {
            return Err(Error::InvalidParams("at least one emitter is required".into()));
        }
        if self.g.len() != n || self.gamma_x.len() != n {
            return Err(Error::InvalidParams(format!(
                "omega_x0, g and gamma_x must have equal lengths (got {}, {}, {})",
                n,
                self.g.len(),
                self.gamma_x.len()
            )));
        }
        let finite = self
            .omega_x0
            .iter()
            .chain(&self.g)
            .chain(&self.gamma_x)
            .chain([&self.omega_c0, &self.gamma_c, &self.gamma_s])
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.g.iter().any(|&g| g < T::zero()) {
            return Err(Error::InvalidParams("couplings g must be >= 0".into()));
        }
        if self.gamma_x.iter().chain([&self.gamma_c, &self.gamma_s]).any(|&g| g < T::zero()) {
            return Err(Error::InvalidParams("dampings must be >= 0".into()));
        }
        self.temp_model.validate()
    }

    /// Energies evaluated at temperature `temperature` (K).
    pub fn tune(&self, temperature: T) -> Result<TunedParams<T>> {
        self.validate()?;
        let f = self.temp_model.shift(temperature)?;
        let omega_x: Vec<T> = self.omega_x0.iter().map(|&w| w + f).collect();
        let omega_c = self.omega_c0 + self.temp_model.eta * f;
        Ok(TunedParams {
            omega_x,
            omega_c,
            g: self.g.clone(),
            gamma_x: self.gamma_x.clone(),
            gamma_c: self.gamma_c,
            gamma_s: self.gamma_s,
            temperature,
            reference: omega_c,
        })
    }

    /// Convert to another scalar type.
    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: &T| U::lit(x.to_f64_lossy());
        SystemParams {
            omega_x0: self.omega_x0.iter().map(c).collect(),
            omega_c0: c(&self.omega_c0),
            g: self.g.iter().map(c).collect(),
            gamma_x: self.gamma_x.iter().map(c).collect(),
            gamma_c: c(&self.gamma_c),
            gamma_s: c(&self.gamma_s),
            temp_model: TemperatureModel {
                alpha: c(&self.temp_model.alpha),
                theta: c(&self.temp_model.theta),
                eta: c(&self.temp_model.eta),
            },
        }
    }
}

impl SystemParams<f64> {
    /// Three excitons in a micropillar cavity, fitted from temperature-dependent
    /// photoluminescence: couplings (43, 40, 31.5) μeV, dampings
    /// (18, 11.5, 16) μeV and 36.5 μeV for the cavity, spectrometer 4 μeV HWHM.
    pub fn micropillar_three_dots() -> Self {
        SystemParams {
            omega_x0: vec![1_334_610.6, 1_334_741.2, 1_334_858.4],
            omega_c0: 1_334_573.2,
            g: vec![43.0, 40.0, 31.5],
            gamma_x: vec![18.0, 11.5, 16.0],
            gamma_c: 36.5,
            gamma_s: 4.0,
            temp_model: TemperatureModel {
                alpha: 60.9,
                theta: 58.9,
                eta: 0.227,
            },
        }
    }
}

/// Parameters evaluated at a working temperature.
///
/// `reference` is the energy subtracted per excitation in the rotating frame
/// used for all internal propagation; it defaults to the tuned cavity energy.
#[derive(Clone, Debug, PartialEq)]
pub struct TunedParams<T> {
    pub omega_x: Vec<T>,
    pub omega_c: T,
    pub g: Vec<T>,
    pub gamma_x: Vec<T>,
    pub gamma_c: T,
    pub gamma_s: T,
    pub temperature: T,
    pub reference: T,
}

impl<T: Real> TunedParams<T> {
    pub fn n_emitters(&self) -> usize {
        self.omega_x.len()
    }

    /// Complex cavity energy `ω_C − iγ_C`.
    pub fn omega_c_tilde(&self) -> Cplx<T> {
        cplx(self.omega_c, -self.gamma_c)
    }

    /// Complex exciton energies `ω_Xn − iγ_Xn`.
    pub fn omega_x_tilde(&self) -> Vec<Cplx<T>> {
        self.omega_x.iter().zip(&self.gamma_x).map(|(&w, &g)| cplx(w, -g)).collect()
    }

    pub fn with_reference(mut self, reference: T) -> Self {
        self.reference = reference;
        self
    }

    /// Frame-shifted copy: energies relative to `reference`.
    pub(crate) fn relative_omegas(&self) -> (Cplx<T>, Vec<Cplx<T>>) {
        let r = cplx(self.reference, T::zero());
        (self.omega_c_tilde() - r, self.omega_x_tilde().into_iter().map(|w| w - r).collect())
    }

    /// Constructs tuned parameters directly, bypassing the temperature model.
    pub fn from_energies(omega_x: Vec<T>, omega_c: T, g: Vec<T>, gamma_x: Vec<T>, gamma_c: T, gamma_s: T) -> Result<Self> {
        let n = omega_x.len();
        if n == 0 || g.len() != n || gamma_x.len() != n {
            return Err(Error::InvalidParams("omega_x, g and gamma_x must be non-empty with equal lengths".into()));
        }
        if g.iter().any(|&x| x < T::zero()) || gamma_x.iter().chain([&gamma_c, &gamma_s]).any(|&x| x < T::zero()) {
            return Err(Error::InvalidParams("couplings and dampings must be >= 0".into()));
        }
        Ok(Self {
            omega_x,
            omega_c,
            g,
            gamma_x,
            gamma_c,
            gamma_s,
            temperature: T::zero(),
            reference: omega_c,
        })
    }

    pub fn with_couplings(mut self, g: Vec<T>) -> Self {
        assert_eq!(g.len(), self.omega_x.len());
        self.g = g;
        self
    }
}
