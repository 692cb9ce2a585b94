use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Dynamic range of logarithmic maps, in decades.
pub const DEFAULT_DECADES: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerScale<T> {
    Linear,
    /// `log10(|x|²/max)` clamped below at `−decades`
    Log10 { decades: T },
}

/// Dense real map, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMap<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> RealMap<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max(&self) -> T {
        self.data.iter().fold(T::neg_infinity(), |m, x| m.max(*x))
    }

    /// Position of the largest entry.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, x) in self.data.iter().enumerate() {
            if *x > self.data[best] {
                best = k;
            }
        }
        (best / self.cols, best % self.cols)
    }
}

/// `|x|²` of every entry, optionally on a clamped log scale.
pub fn power_map<T: Real>(m: &CMatrix<T>, scale: PowerScale<T>) -> RealMap<T> {
    let data: Vec<T> = m.as_slice().iter().map(|z| z.norm_sqr()).collect();
    let data = match scale {
        PowerScale::Linear => data,
        PowerScale::Log10 { decades } => {
            let max = data.iter().fold(T::zero(), |a, b| a.max(*b));
            if max == T::zero() {
                vec![-decades; data.len()]
            } else {
                data.iter().map(|x| (*x / max).log10().max(-decades)).collect()
            }
        }
    };
    RealMap { rows: m.rows(), cols: m.cols(), data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn squares() {
        let m = CMatrix::from_fn(1, 2, |_, j| if j == 0 { C::new(0.0, 0.0) } else { C::new(1.0, 1.0) });
        let p = power_map(&m, PowerScale::Linear);
        assert_eq!(p.data, vec![0.0, 2.0]);
    }

    #[test]
    fn log_floor() {
        let m = CMatrix::from_fn(1, 3, |_, j| C::new([1.0, 1e-1, 1e-5][j], 0.0));
        let p = power_map(&m, PowerScale::Log10 { decades: DEFAULT_DECADES });
        assert_eq!(p.data[0], 0.0);
        assert!((p.data[1] + 2.0).abs() < 1e-12);
        assert_eq!(p.data[2], -4.0);
        let z = power_map(&CMatrix::<f64>::zeros(2, 2), PowerScale::Log10 { decades: 4.0 });
        assert!(z.data.iter().all(|x| *x == -4.0));
    }
}
