use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetry a sampled function is expected to have under k -> -k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    EvenInK,
    ConjugateSymmetric,
    None,
}

/// A complex function sampled on a real k-grid that is symmetric about 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSamples {
    pub k: Vec<f64>,
    pub values: Vec<Complex64>,
    pub symmetry: Symmetry,
}

/// `n` (odd) uniformly spaced points on [-k_max, k_max].
pub fn uniform_grid(k_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "grid size must be odd and at least 3");
    let h = 2.0 * k_max / (n - 1) as f64;
    let m = (n - 1) / 2;
    (0..n).map(|j| (j as f64 - m as f64) * h).collect()
}

impl SpectralSamples {
    /// Checks grid symmetry and the declared value symmetry (to 1e-10 relative to the largest value).
    pub fn new(k: Vec<f64>, values: Vec<Complex64>, symmetry: Symmetry) -> Result<Self> {
        if k.len() != values.len() || k.len() < 3 {
            return Err(Error::BadGrid("grid and values differ in length or are too short".into()));
        }
        let n = k.len();
        let scale = k.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for i in 0..n {
            if (k[i] + k[n - 1 - i]).abs() > 1e-12 * scale {
                return Err(Error::BadGrid(format!("grid is not symmetric at index {i}")));
            }
            if i > 0 && k[i] <= k[i - 1] {
                return Err(Error::BadGrid("grid is not strictly increasing".into()));
            }
        }
        let s = Self { k, values, symmetry };
        let err = s.symmetry_defect();
        let vmax = s.values.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(1e-300);
        if err > 1e-10 * vmax {
            return Err(Error::BadGrid(format!("values violate {:?} symmetry by {err:e}", symmetry)));
        }
        Ok(s)
    }

    /// Samples `f` on `grid` in parallel, using the symmetry to halve the work.
    pub fn from_fn<F>(grid: Vec<f64>, symmetry: Symmetry, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        let n = grid.len();
        let half = n / 2;
        let computed: Vec<Complex64> = match symmetry {
            Symmetry::None => grid.par_iter().map(|&k| f(k)).collect::<Result<_>>()?,
            _ => grid[half..].par_iter().map(|&k| f(k)).collect::<Result<_>>()?,
        };
        let values = match symmetry {
            Symmetry::None => computed,
            _ => {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                for (i, c) in computed.iter().enumerate() {
                    v[half + i] = *c;
                    v[half - i] = match symmetry {
                        Symmetry::EvenInK => *c,
                        _ => c.conj(),
                    };
                }
                if symmetry == Symmetry::ConjugateSymmetric {
                    v[half] = Complex64::new(v[half].re, 0.0);
                }
                v
            }
        };
        Self::new(grid, values, symmetry)
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k_max(&self) -> f64 {
        *self.k.last().unwrap()
    }

    /// Largest deviation from the declared symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.k.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.values[i], self.values[n - 1 - i]);
                match self.symmetry {
                    Symmetry::EvenInK => (a - b).norm(),
                    Symmetry::ConjugateSymmetric => (a - b.conj()).norm(),
                    Symmetry::None => 0.0,
                }
            })
            .fold(0.0, f64::max)
    }

    /// Grid spacing if the grid is uniform (relative tolerance 1e-9).
    pub fn uniform_spacing(&self) -> Result<f64> {
        let n = self.k.len();
        let h = (self.k[n - 1] - self.k[0]) / (n - 1) as f64;
        for i in 1..n {
            if ((self.k[i] - self.k[i - 1]) - h).abs() > 1e-9 * h {
                return Err(Error::BadGrid(format!("spacing is not uniform at index {i}")));
            }
        }
        Ok(h)
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, symmetry: Symmetry, f: F) -> Self {
        let values = self.k.iter().zip(&self.values).map(|(&k, &v)| f(k, v)).collect();
        Self { k: self.k.clone(), values, symmetry }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_uniform() {
        let g = uniform_grid(5.0, 11);
        assert_eq!(g[5], 0.0);
        assert!((g[0] + 5.0).abs() < 1e-15 && (g[10] - 5.0).abs() < 1e-15);
        let s = SpectralSamples::from_fn(g, Symmetry::EvenInK, |k| Ok(Complex64::new(k * k, 0.0))).unwrap();
        assert!((s.uniform_spacing().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetry_is_enforced() {
        let g = uniform_grid(1.0, 5);
        let v: Vec<Complex64> = g.iter().map(|&k| Complex64::new(k, 0.0)).collect();
        assert!(SpectralSamples::new(g.clone(), v.clone(), Symmetry::EvenInK).is_err());
        assert!(SpectralSamples::new(g, v, Symmetry::None).is_ok());
    }
}
