//! Scalar additive Riemann–Hilbert problems on the real line.
//!
//! Given an odd jump `G` sampled on a uniform symmetric grid, the solution
//! `F(k) = (1/2πi) ∫ G(t)/(t - k - i0) dt` is computed in two parts. The
//! slowly decaying tail of `G` is fitted by a finite combination of
//! `e^{iωk}/(k+i)^m`, whose Cauchy transform is known exactly. The remainder
//! decays fast and is integrated by local degree-5 product integration, so
//! the log singularity of the kernel is handled analytically on every cell.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::samples::{SpectralSamples, Symmetry};

const KAPPA: f64 = 1.0;
const TAIL_POWERS: u32 = 3;
const PAD: usize = 6;
const NEAR: f64 = 4.0;
const FIT_LO: f64 = 0.6;
const FIT_WINDOW: f64 = 0.25;

/// Jump function together with the frequencies expected in its tail.
///
/// The tail is modelled as `Σ c_{ω,m} e^{iωk}/(k+i)^m`, `m = 1..3`, with
/// `ω` running over `tail_frequencies`, their negatives and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpData {
    pub samples: SpectralSamples,
    pub tail_frequencies: Vec<f64>,
}

impl JumpData {
    pub fn new(samples: SpectralSamples, tail_frequencies: Vec<f64>) -> Self {
        Self { samples, tail_frequencies }
    }

    /// Jump with a plain `O(1/k)` tail.
    pub fn rational(samples: SpectralSamples) -> Self {
        Self { samples, tail_frequencies: vec![] }
    }
}

fn normalize_frequencies(freqs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    for &w in freqs {
        for v in [w, -w] {
            if v.is_finite() && out.iter().all(|&u| (u - v).abs() > 1e-9) {
                out.push(v);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Least-squares fit of the tail of a sampled function.
#[derive(Debug, Clone)]
pub struct TailModel {
    terms: Vec<(f64, u32, C)>,
}

impl TailModel {
    /// Fits over `|k| >= 0.6 K` with frequencies `freqs`, their negatives and zero.
    pub fn fit_samples(s: &SpectralSamples, freqs: &[f64]) -> Self {
        Self::fit(&s.k, &s.values, &normalize_frequencies(freqs))
    }

    fn fit(k: &[f64], g: &[C], freqs: &[f64]) -> Self {
        let k_max = k[k.len() - 1];
        let idx: Vec<usize> = (0..k.len()).filter(|&i| k[i].abs() >= FIT_LO * k_max).collect();
        let stride = (idx.len() / 6000).max(1);
        let rows: Vec<usize> = idx.into_iter().step_by(stride).collect();
        let cols: Vec<(f64, u32)> = freqs.iter().flat_map(|&w| (1..=TAIL_POWERS).map(move |m| (w, m))).collect();
        let basis = |kk: f64, (w, m): (f64, u32)| C::new(0.0, w * kk).exp() / C::new(kk, KAPPA).powu(m);
        let mut a = DMatrix::<C>::from_fn(rows.len(), cols.len(), |r, c| basis(k[rows[r]], cols[c]));
        let mut norms = vec![0.0; cols.len()];
        for (c, n) in norms.iter_mut().enumerate() {
            *n = a.column(c).norm().max(1e-300);
            a.column_mut(c).unscale_mut(*n);
        }
        let rhs = DVector::<C>::from_fn(rows.len(), |r, _| g[rows[r]]);
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let sol = svd.solve(&rhs, 1e-11 * smax).expect("svd was computed with both factors");
        let terms = cols.iter().zip(sol.iter()).zip(&norms).map(|((&(w, m), &c), &n)| (w, m, c / n)).collect();
        Self { terms }
    }

    /// Value of the model on the real axis.
    pub fn eval(&self, k: f64) -> C {
        self.terms.iter().map(|&(w, m, c)| c * C::new(0.0, w * k).exp() / C::new(k, KAPPA).powu(m)).sum()
    }

    /// Cauchy transform of the model at `z` in the closed upper half-plane.
    pub fn plus(&self, z: C) -> C {
        let ik = C::new(0.0, KAPPA);
        self.terms
            .iter()
            .map(|&(w, m, c)| {
                if w >= 0.0 {
                    c * (C::i() * w * z).exp() / (z + ik).powu(m)
                } else {
                    let wa = -w;
                    let mut s = C::new(0.0, 0.0);
                    for j in 0..m {
                        let p = m - 1 - j;
                        s += C::new(0.0, -wa).powu(p) / factorial(p) / (z + ik).powu(j + 1);
                    }
                    c * (-KAPPA * wa).exp() * s
                }
            })
            .sum()
    }
}

impl TailModel {
    /// `(1/2π) ∫ model(k) e^{ikξ} dk`, with the symmetric limit where the
    /// transform jumps.
    pub fn fourier(&self, xi: f64) -> C {
        self.fourier_limit(xi, 0)
    }

    /// As [`TailModel::fourier`], taking the limit from the right (`side > 0`),
    /// the left (`side < 0`) or the mean (`side == 0`) at jumps.
    pub fn fourier_limit(&self, xi: f64, side: i32) -> C {
        self.terms
            .iter()
            .map(|&(w, m, c)| {
                let theta = xi + w;
                if theta.abs() < 1e-12 {
                    if m == 1 {
                        match side.signum() {
                            1 => C::new(0.0, 0.0),
                            -1 => c * C::new(0.0, -1.0),
                            _ => c * C::new(0.0, -0.5),
                        }
                    } else {
                        C::new(0.0, 0.0)
                    }
                } else if theta > 0.0 {
                    C::new(0.0, 0.0)
                } else {
                    let p = m - 1;
                    c * C::new(0.0, -1.0) * C::new(0.0, theta).powu(p) * (KAPPA * theta).exp() / factorial(p)
                }
            })
            .sum()
    }
}

/// Monomial coefficients of the Lagrange basis on nodes -2..=3.
fn lagrange_coefs() -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for (l, row) in out.iter_mut().enumerate() {
        let sl = l as f64 - 2.0;
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for m in 0..6 {
            if m == l {
                continue;
            }
            let sm = m as f64 - 2.0;
            let mut next = vec![0.0; poly.len() + 1];
            for (p, &c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= sm * c;
            }
            poly = next;
            denom *= sl - sm;
        }
        for p in 0..6 {
            row[p] = poly[p] / denom;
        }
    }
    out
}

/// `∫_0^1 s^p/(s-ζ) ds` for p = 0..5, with the `+i0` limit on the real axis.
/// At the nodes 0 and 1 the log divergence is dropped; it cancels between
/// neighbouring cells.
fn moments(zeta: C) -> [C; 6] {
    let i0 = if zeta.im == 0.0 {
        let x = zeta.re;
        if x == 0.0 || x == 1.0 {
            C::new(0.0, PI / 2.0)
        } else if x > 0.0 && x < 1.0 {
            C::new(((1.0 - x) / x).ln(), PI)
        } else {
            C::new(((1.0 - x) / x).abs().ln(), 0.0)
        }
    } else {
        (C::new(1.0, 0.0) - zeta).ln() - (-zeta).ln()
    };
    let mut out = [i0; 6];
    for p in 1..6 {
        out[p] = 1.0 / p as f64 + zeta * out[p - 1];
    }
    out
}

fn snap(zeta: C) -> C {
    if zeta.im == 0.0 {
        let r = zeta.re.round();
        if (zeta.re - r).abs() < 1e-10 {
            return C::new(r, 0.0);
        }
    }
    zeta
}

/// Precomputed Cauchy operator for one sampled density.
#[derive(Debug, Clone)]
pub struct CauchySolver {
    k0: f64,
    h: f64,
    n: usize,
    k_max: f64,
    tail: TailModel,
    rem: Vec<C>,
    coefs: [[f64; 6]; 6],
    gl_x: Vec<f64>,
    gl_w: Vec<f64>,
    gl_vals: Vec<[C; 6]>,
    scale: C,
    tail_factor: C,
}

impl CauchySolver {
    /// Solver for `F(k) - F(-k) = G(k)`; `G` must be odd.
    pub fn new(j: &JumpData) -> Result<Self> {
        let s = &j.samples;
        let gmax = s.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let n = s.len();
        let defect = (0..n).map(|i| (s.values[i] + s.values[n - 1 - i]).norm()).fold(0.0, f64::max);
        if defect > 1e-9 * gmax.max(1.0) {
            return Err(Error::AsymmetricJump(defect));
        }
        Self::build(s, &j.tail_frequencies, C::new(0.0, -1.0 / (2.0 * PI)), C::new(1.0, 0.0))
    }

    /// Projection `P+[g](z) = (1/2πi) ∫ g(t)/(t - z - i0) dt` of a density
    /// with no symmetry requirement.
    pub fn projection(s: &SpectralSamples, tail_frequencies: &[f64]) -> Result<Self> {
        Self::build(s, tail_frequencies, C::new(0.0, -1.0 / (2.0 * PI)), C::new(1.0, 0.0))
    }

    /// Solver for the Schwarz formula `F(k) = (1/π) ∫ u(t)/(t - k - i0) dt`
    /// with `u = Im F` on the real axis.
    pub fn schwarz(im: &SpectralSamples, tail_frequencies: &[f64]) -> Result<Self> {
        let umax = im.values.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
        if im.values.iter().any(|v| v.im.abs() > 1e-12 * umax.max(1.0)) {
            return Err(Error::BadGrid("Schwarz density must be real-valued".into()));
        }
        // (1/π) = 2i/(2πi), so the exact tail transform picks up a factor 2i
        Self::build(im, tail_frequencies, C::new(1.0 / PI, 0.0), C::new(0.0, 2.0))
    }

    fn build(s: &SpectralSamples, freqs: &[f64], scale: C, tail_factor: C) -> Result<Self> {
        let h = s.uniform_spacing()?;
        let n = s.len();
        if n < 64 {
            return Err(Error::BadGrid("need at least 64 samples".into()));
        }
        let freqs = normalize_frequencies(freqs);
        let tail = TailModel::fit(&s.k, &s.values, &freqs);
        let mut rem = vec![C::new(0.0, 0.0); n + 2 * PAD];
        for i in 0..n {
            rem[i + PAD] = s.values[i] - tail.eval(s.k[i]);
        }
        let coefs = lagrange_coefs();
        let (t, w) = gauss_legendre(6);
        let gl_x: Vec<f64> = t.iter().map(|v| 0.5 * (v + 1.0)).collect();
        let gl_w: Vec<f64> = w.iter().map(|v| 0.5 * v).collect();
        let lag: Vec<[f64; 6]> = gl_x
            .iter()
            .map(|&x| {
                let mut out = [0.0; 6];
                for l in 0..6 {
                    out[l] = (0..6).rev().fold(0.0, |acc, p| acc * x + coefs[l][p]);
                }
                out
            })
            .collect();
        let m = rem.len();
        let mut gl_vals = vec![[C::new(0.0, 0.0); 6]; m];
        for c in 2..m - 3 {
            for g in 0..6 {
                gl_vals[c][g] = (0..6).map(|l| rem[c + l - 2] * lag[g][l]).sum();
            }
        }
        Ok(Self { k0: s.k[0], h, n, k_max: s.k_max(), tail, rem, coefs, gl_x, gl_w, gl_vals, scale, tail_factor })
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    fn weights(&self, zeta: C) -> [C; 6] {
        let mo = moments(zeta);
        let mut out = [C::new(0.0, 0.0); 6];
        for l in 0..6 {
            out[l] = (0..6).map(|p| mo[p] * self.coefs[l][p]).sum();
        }
        out
    }

    fn far_weights(&self, zeta: C) -> [C; 6] {
        let (t, w) = gauss_legendre(12);
        let mut out = [C::new(0.0, 0.0); 6];
        for (ti, wi) in t.iter().zip(&w) {
            let x = 0.5 * (ti + 1.0);
            let inv = 0.5 * wi / (C::new(x, 0.0) - zeta);
            for l in 0..6 {
                let lv = (0..6).rev().fold(0.0, |acc, p| acc * x + self.coefs[l][p]);
                out[l] += inv * lv;
            }
        }
        out
    }

    /// Solution at `z` with `Im z >= 0`; real `z` gives the boundary value.
    pub fn eval(&self, z: C) -> Result<C> {
        if z.im < 0.0 {
            return Err(Error::BadParams(format!("evaluation point {z} is in the lower half-plane")));
        }
        let limit = self.k_max / 10.0;
        if z.re.abs() > limit {
            return Err(Error::GridTooShort { k: z.re, limit });
        }
        let m = self.rem.len();
        let origin = self.k0 - PAD as f64 * self.h;
        let zc = (z - origin) / self.h;
        let mut acc = C::new(0.0, 0.0);
        for c in 2..m - 3 {
            let zeta = zc - c as f64;
            if (zeta - 0.5).norm() < NEAR {
                let w = self.weights(snap(zeta));
                for l in 0..6 {
                    acc += self.rem[c + l - 2] * w[l];
                }
            } else {
                let v = &self.gl_vals[c];
                for g in 0..6 {
                    acc += v[g] * self.gl_w[g] / (self.gl_x[g] - zeta);
                }
            }
        }
        Ok(self.scale * acc + self.tail_part(z))
    }

    fn tail_part(&self, z: C) -> C {
        self.tail_factor * self.tail.plus(z)
    }

    /// Evaluates at many points in parallel.
    pub fn eval_many(&self, zs: &[C]) -> Result<Vec<C>> {
        zs.par_iter().map(|&z| self.eval(z)).collect()
    }

    /// Boundary values at every grid node, by one FFT convolution.
    pub fn on_grid(&self) -> Vec<C> {
        let m = self.rem.len();
        let size = (2 * m).next_power_of_two();
        let mut kernel = vec![C::new(0.0, 0.0); size];
        for q in -(m as i64 - 1)..(m as i64) {
            let mut t = C::new(0.0, 0.0);
            for l in 0..6 {
                let zeta = C::new((q + l as i64 - 2) as f64, 0.0);
                let w = if (zeta.re - 0.5).abs() < NEAR { self.weights(zeta) } else { self.far_weights(zeta) };
                t += w[l];
            }
            kernel[q.rem_euclid(size as i64) as usize] = t;
        }
        let mut data = vec![C::new(0.0, 0.0); size];
        data[..m].copy_from_slice(&self.rem);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        fwd.process(&mut kernel);
        fwd.process(&mut data);
        for (d, k) in data.iter_mut().zip(&kernel) {
            *d *= k / size as f64;
        }
        inv.process(&mut data);
        (0..self.n)
            .map(|i| {
                let k = self.k0 + i as f64 * self.h;
                self.scale * data[i + PAD] + self.tail_part(C::new(k, 0.0))
            })
            .collect()
    }
}

/// Solution of `F(k) - F(-k) = G(k)` analytic and decaying in the upper
/// half-plane, evaluated at `k` (boundary value when `k` is real).
pub fn cauchy_split(j: &JumpData, k: C) -> Result<C> {
    CauchySolver::new(j)?.eval(k)
}

/// Recovers `F(k)` from samples of `Im F` on the real axis.
pub fn schwarz_reconstruct(im: &SpectralSamples, tail_frequencies: &[f64], k: C) -> Result<C> {
    CauchySolver::schwarz(im, tail_frequencies)?.eval(k)
}

/// Result of fitting `y(k) ≈ α sin(Lk) + O(1/k)` on the outer part of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SineFit {
    pub length: f64,
    pub amplitude: f64,
    pub explained: f64,
}

struct FitWindow {
    k: Vec<f64>,
    y: Vec<f64>,
    b: f64,
}

impl FitWindow {
    fn new(s: &SpectralSamples, b: f64, stride_cap: usize) -> Self {
        let kmax = s.k_max();
        let idx: Vec<usize> = (0..s.len()).filter(|&i| s.k[i] >= FIT_WINDOW * kmax).collect();
        let stride = (idx.len() / stride_cap).max(1);
        let (k, y) = idx.into_iter().step_by(stride).map(|i| (s.k[i], s.k[i] * s.values[i].re)).unzip();
        Self { k, y, b }
    }

    fn columns(&self, l: f64) -> Vec<Box<dyn Fn(f64) -> f64>> {
        let mut cols: Vec<Box<dyn Fn(f64) -> f64>> = vec![Box::new(move |k: f64| (l * k).sin())];
        let edge = (2.0 * self.b - l).abs();
        let mut freqs = vec![0.0, l];
        if (edge - l).abs() > 1e-9 && edge > 1e-9 {
            freqs.push(edge);
        }
        for &w in &freqs {
            for p in [1, 2] {
                cols.push(Box::new(move |k: f64| (w * k).cos() / k.powi(p)));
                if w > 0.0 {
                    cols.push(Box::new(move |k: f64| (w * k).sin() / k.powi(p)));
                }
            }
        }
        cols
    }

    /// Returns (residual energy, sine amplitude).
    fn solve(&self, l: f64) -> (f64, f64) {
        let cols = self.columns(l);
        let mut a = DMatrix::<f64>::from_fn(self.k.len(), cols.len(), |r, c| cols[c](self.k[r]));
        let mut norms = vec![0.0; cols.len()];
        for (c, n) in norms.iter_mut().enumerate() {
            *n = a.column(c).norm().max(1e-300);
            a.column_mut(c).unscale_mut(*n);
        }
        let rhs = DVector::from_column_slice(&self.y);
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let sol = svd.solve(&rhs, 1e-13 * smax).expect("svd was computed with both factors");
        let res = (&a * &sol - rhs).norm_squared();
        (res, sol[0] / norms[0])
    }

    fn energy(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum()
    }
}

/// Fits `k·s(k) ≈ α sin(Lk)` with `L > 0` over `k ∈ [K/4, K]`.
pub(crate) fn fit_sine_tail(s: &SpectralSamples, b: f64) -> Result<SineFit> {
    if s.symmetry != Symmetry::EvenInK {
        return Err(Error::BadGrid("asymptotic fit expects an even function of k".into()));
    }
    s.uniform_spacing()?;
    let coarse = FitWindow::new(s, b, 1500);
    let fine = FitWindow::new(s, b, 20000);
    let kmax = s.k_max();
    let width = (1.0 - FIT_WINDOW) * kmax;
    let step = PI / (4.0 * width);
    let lmax = 2.0 * b.max(1e-3);
    let mut best = (f64::INFINITY, step);
    let mut l = 2.0 * PI / width;
    while l <= lmax {
        let (r, _) = coarse.solve(l);
        if r < best.0 {
            best = (r, l);
        }
        l += step;
    }
    let (mut lo, mut hi) = ((best.1 - step).max(0.5 * step), best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = fine.solve(x1).0;
    let mut f2 = fine.solve(x2).0;
    for _ in 0..60 {
        if (hi - lo) < 1e-13 * hi {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = fine.solve(x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = fine.solve(x2).0;
        }
    }
    let length = 0.5 * (lo + hi);
    let (_, amplitude) = fine.solve(length);
    let sine: f64 = fine.k.iter().map(|&k| (amplitude * (length * k).sin()).powi(2)).sum();
    let total = fine.energy();
    let explained = if total > 0.0 { sine / total } else { 0.0 };
    if !(explained >= 0.5) {
        return Err(Error::FitDegenerate(format!(
            "an O(1) sinusoid explains only {:.1}% of k·E(k) on the outer grid; data decay like 1/k²",
            100.0 * explained
        )));
    }
    Ok(SineFit { length, amplitude, explained })
}

/// Fits `E(k) ≈ sin(k(b-a)) / (k·γ·ρ(0)^{1/4})` on `k ∈ [K/4, K]`.
///
/// Returns `(b - a, γ ρ(0)^{1/4})` with `b - a > 0`; `E` alone cannot fix the
/// common sign of the two numbers. The fit carries `1/k` and `1/k²`
/// corrections at the frequencies 0, `b - a` and `b + a`, the last coming from
/// the reflection at `x = b`, which is why `b` is needed.
pub fn extract_asymptotics(e: &SpectralSamples, b: f64) -> Result<(f64, f64)> {
    let fit = fit_sine_tail(e, b)?;
    Ok((fit.length, 1.0 / fit.amplitude))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::uniform_grid;

    fn oracle_jump(n: usize, k_max: f64) -> JumpData {
        let s = SpectralSamples::from_fn(uniform_grid(k_max, n), Symmetry::None, |k| {
            Ok(C::new(2.0 * k / (k * k + 1.0), 0.0))
        })
        .unwrap();
        JumpData::rational(s)
    }

    #[test]
    fn lagrange_basis_reproduces_nodes() {
        let c = lagrange_coefs();
        for l in 0..6 {
            for m in 0..6 {
                let s = m as f64 - 2.0;
                let v: f64 = (0..6).map(|p| c[l][p] * s.powi(p as i32)).sum();
                assert!((v - if l == m { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tail_projection_of_decaying_exponential() {
        // P+[e^{-iwk}/(k+i)^2] against direct quadrature of the Cauchy integral at z = 0.3 + 2i
        let w = 1.7;
        let tm = TailModel { terms: vec![(-w, 2, C::new(1.0, 0.0))] };
        let z = C::new(0.3, 2.0);
        let f = |t: f64| C::new(0.0, -w * t).exp() / C::new(t, 1.0).powu(2) / (t - z);
        let (x, wt) = gauss_legendre(40);
        let mut acc = C::new(0.0, 0.0);
        let mut lo = -4000.0;
        while lo < 4000.0 {
            for (xi, wi) in x.iter().zip(&wt) {
                acc += f(lo + 1.0 + xi) * *wi;
            }
            lo += 2.0;
        }
        let direct = acc / C::new(0.0, 2.0 * PI);
        assert!((direct - tm.plus(z)).norm() < 1e-6, "{direct} {}", tm.plus(z));
    }

    #[test]
    fn tail_fourier_transform_matches_quadrature() {
        for (w, m) in [(0.0, 1), (0.0, 2), (-2.0, 1), (-2.0, 3), (2.0, 2)] {
            let tm = TailModel { terms: vec![(w, m, C::new(1.0, 0.0))] };
            for xi in [0.5, 1.0, 3.0] {
                // damped integrand so that the truncated quadrature converges
                let eps = 1e-3;
                let (x, wt) = gauss_legendre(40);
                let mut acc = C::new(0.0, 0.0);
                let mut lo = -20000.0;
                while lo < 20000.0 {
                    for (xi_, wi) in x.iter().zip(&wt) {
                        let k = lo + 1.0 + xi_;
                        acc += C::new(0.0, (w + xi) * k).exp() / C::new(k, 1.0).powu(m) * (-eps * k.abs()).exp() * *wi;
                    }
                    lo += 2.0;
                }
                let direct = acc / (2.0 * PI);
                assert!((direct - tm.fourier(xi)).norm() < 2e-3, "w={w} m={m} xi={xi}: {direct} {}", tm.fourier(xi));
            }
        }
    }

    #[test]
    fn zero_jump_gives_zero() {
        let s = SpectralSamples::from_fn(uniform_grid(50.0, 1025), Symmetry::None, |_| Ok(C::new(0.0, 0.0))).unwrap();
        let sol = CauchySolver::new(&JumpData::rational(s)).unwrap();
        assert_eq!(sol.eval(C::new(1.0, 0.5)).unwrap(), C::new(0.0, 0.0));
    }

    #[test]
    fn rational_oracle_on_and_off_grid() {
        let j = oracle_jump(1 << 16 | 1, 500.0);
        let sol = CauchySolver::new(&j).unwrap();
        for z in [C::new(0.0, 0.0), C::new(2.0, 0.0), C::new(0.37, 0.0), C::new(-3.1, 0.2), C::new(1.0, 3.0)] {
            let f = sol.eval(z).unwrap();
            let exact = 1.0 / (z + C::i());
            assert!((f - exact).norm() < 1e-8, "z = {z}: {f} vs {exact}");
        }
        let grid = sol.on_grid();
        let k = &j.samples.k;
        let err = (0..k.len()).map(|i| (grid[i] - 1.0 / C::new(k[i], 1.0)).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "on-grid error {err}");
    }

    #[test]
    fn plemelj_limit_is_first_order() {
        let j = oracle_jump(1 << 13 | 1, 400.0);
        let sol = CauchySolver::new(&j).unwrap();
        let k = 1.3;
        let f0 = sol.eval(C::new(k, 0.0)).unwrap();
        let errs: Vec<f64> =
            [1e-2, 1e-3, 1e-4].iter().map(|&eta| (sol.eval(C::new(k, eta)).unwrap() - f0).norm()).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log10();
            assert!((order - 1.0).abs() < 0.1, "observed order {order}");
        }
    }

    #[test]
    fn schwarz_matches_cauchy_and_oracle() {
        let g = uniform_grid(500.0, 1 << 14 | 1);
        let im = SpectralSamples::from_fn(g.clone(), Symmetry::EvenInK, |k| Ok(C::new(-1.0 / (k * k + 1.0), 0.0)))
            .unwrap();
        let z = C::new(0.8, 0.1);
        let f = schwarz_reconstruct(&im, &[], z).unwrap();
        assert!((f - 1.0 / (z + C::i())).norm() < 1e-6);

        // an odd density where both formulas apply
        let u = |k: f64| k / (k * k + 4.0) * (2.0 * k).cos() / (1.0 + k * k).sqrt();
        let im = SpectralSamples::from_fn(g.clone(), Symmetry::None, |k| Ok(C::new(u(k), 0.0))).unwrap();
        let jump = SpectralSamples::from_fn(g, Symmetry::None, |k| Ok(C::new(0.0, 2.0 * u(k)))).unwrap();
        let a = schwarz_reconstruct(&im, &[2.0], z).unwrap();
        let b = cauchy_split(&JumpData::new(jump, vec![2.0]), z).unwrap();
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn delta_potential_jost_from_its_dispersion() {
        // V = c δ(y - a): f(0;k) = 1 - c/(2ik) + c e^{2ika}/(2ik), D = c sin²(ka)/k²
        let (c, a) = (2.0, 1.0);
        let s = SpectralSamples::from_fn(uniform_grid(500.0, 1 << 15 | 1), Symmetry::None, |k: f64| {
            let d = if k == 0.0 { c * a * a } else { c * (k * a).sin().powi(2) / (k * k) };
            Ok(C::new(0.0, 2.0 * k * d))
        })
        .unwrap();
        let sol = CauchySolver::new(&JumpData::new(s, vec![2.0 * a])).unwrap();
        let exact = |k: f64| {
            if k == 0.0 {
                C::new(1.0 - c * a, 0.0)
            } else {
                let ik = C::new(0.0, 2.0 * k);
                1.0 - c / ik + c * C::new(0.0, 2.0 * k * a).exp() / ik
            }
        };
        let mut err = 0.0f64;
        let mut k = -20.0;
        while k <= 20.0 {
            err = err.max((1.0 + sol.eval(C::new(k, 0.0)).unwrap() - exact(k)).norm());
            k += 0.173;
        }
        assert!(err < 1e-6, "max error {err}");
    }

    #[test]
    fn asymmetric_jump_and_short_grid_are_rejected() {
        let s = SpectralSamples::from_fn(uniform_grid(50.0, 1025), Symmetry::None, |k| Ok(C::new(1.0 / (1.0 + k * k), 0.0)))
            .unwrap();
        assert!(matches!(CauchySolver::new(&JumpData::rational(s)), Err(Error::AsymmetricJump(_))));
        let j = oracle_jump(1025, 50.0);
        assert!(matches!(cauchy_split(&j, C::new(6.0, 0.0)), Err(Error::GridTooShort { .. })));
    }

    #[test]
    fn sine_fit_recovers_length_and_amplitude() {
        let (l, amp, b) = (0.43, 2.5, 1.0);
        let s = SpectralSamples::from_fn(uniform_grid(500.0, 1 << 14 | 1), Symmetry::EvenInK, |k: f64| {
            if k == 0.0 {
                return Ok(C::new(0.0, 0.0));
            }
            let y = amp * (l * k).sin() + 0.7 * ((2.0 * b - l) * k).cos() / k + 0.3 / k - 1.1 * (l * k).sin() / (k * k);
            Ok(C::new(y / k, 0.0))
        })
        .unwrap();
        let (len, a) = extract_asymptotics(&s, b).unwrap();
        assert!((len - l).abs() < 1e-9 && (a - 1.0 / amp).abs() < 1e-9, "{len} {a}");

        let decaying = s.map(Symmetry::EvenInK, |k, _| C::new(if k == 0.0 { 0.0 } else { (2.0 * k).cos() / (k * k) }, 0.0));
        assert!(matches!(extract_asymptotics(&decaying, b), Err(Error::FitDegenerate(_))));
    }
}
