//! Half-line inverse scattering: scattering matrix, bound states, the
//! Marchenko kernel and integral equation, and recovery of the potential and
//! Jost solution from the kernel `K(y, ξ)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::SchrodingerSolver;
use crate::profiles::{PointPart, Potential, PotentialKind, PotentialPiece};
use crate::rh::{CauchySolver, TailModel};
use crate::samples::{SpectralSamples, Symmetry};

/// Default number of δ-steps across [0, a] in the Nyström grid.
pub const DEFAULT_STEPS: usize = 256;
const POINT_THRESHOLD: f64 = 1e-3;

/// `f̃(0;±k)` in the closed upper half-plane.
pub trait JostBoundary: Sync {
    /// `f̃(0;k)` for `Im k >= 0`.
    fn f0(&self, k: C) -> Result<C>;
    /// `f̃(0;-k)` for `Im k >= 0`.
    fn f0_reflected(&self, k: C) -> Result<C>;
}

impl JostBoundary for SchrodingerSolver {
    fn f0(&self, k: C) -> Result<C> {
        Ok(self.jost(k, 0.0)?.value)
    }

    fn f0_reflected(&self, k: C) -> Result<C> {
        Ok(self.jost(-k, 0.0)?.value)
    }
}

/// `f̃(0;k) = 1 + s·F(k)` from a Riemann–Hilbert solution `F`.
///
/// The reflected value uses `e^{2iak}(f̃(0;-k) - 1)`, which is analytic and
/// decaying in the upper half-plane and equals `e^{2iak}(conj f̃(0;k) - 1)`
/// on the real axis, so it is its own Cauchy projection.
#[derive(Debug, Clone)]
pub struct RhJost {
    f: CauchySolver,
    scale: C,
    h: CauchySolver,
    a: f64,
}

impl RhJost {
    pub fn new(f: CauchySolver, scale: C, f0: &SpectralSamples, a: f64) -> Result<Self> {
        let shifted = f0.map(Symmetry::None, |k, v| C::new(0.0, 2.0 * a * k).exp() * (v.conj() - 1.0));
        let h = CauchySolver::projection(&shifted, &[2.0 * a])?;
        Ok(Self { f, scale, h, a })
    }
}

impl JostBoundary for RhJost {
    fn f0(&self, k: C) -> Result<C> {
        Ok(1.0 + self.scale * self.f.eval(k)?)
    }

    fn f0_reflected(&self, k: C) -> Result<C> {
        Ok(1.0 + C::new(0.0, -2.0 * self.a * k.re).exp() * (2.0 * self.a * k.im).exp() * self.h.eval(k)?)
    }
}

/// A bound state `k = iβ` with norming constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub beta: f64,
    pub norming: f64,
}

/// Scattering data of a half-line Dirichlet problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub f0: SpectralSamples,
    pub s: SpectralSamples,
    pub bound_states: Vec<BoundState>,
    pub a: f64,
}

impl ScatteringData {
    pub fn new(f0: SpectralSamples, bound_states: Vec<BoundState>, a: f64) -> Result<Self> {
        let s = scattering_matrix(&f0)?;
        Ok(Self { f0, s, bound_states, a })
    }
}

/// `S̃(k) = f̃(0;-k)/f̃(0;k) = conj f̃(0;k) / f̃(0;k)` on the real grid.
pub fn scattering_matrix(f0: &SpectralSamples) -> Result<SpectralSamples> {
    let n = f0.len();
    let mid = n / 2;
    let mut values = vec![C::new(0.0, 0.0); n];
    for i in 0..n {
        let v = f0.values[i];
        if v.norm() < 1e-12 {
            if i == mid {
                continue;
            }
            return Err(Error::ZeroDenominator(f0.k[i]));
        }
        values[i] = v.conj() / v;
    }
    if f0.values[mid].norm() < 1e-12 {
        values[mid] = C::new(0.5 * (values[mid - 1].re + values[mid + 1].re), 0.0);
    }
    let defect = values.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
    if defect > 1e-9 {
        return Err(Error::IdentityMismatch(format!("|S(k)| deviates from 1 by {defect:e}")));
    }
    SpectralSamples::new(f0.k.clone(), values, Symmetry::ConjugateSymmetric)
}

fn illinois<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64) -> Result<f64> {
    let mut side = 0;
    for _ in 0..200 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let fx = f(x)?;
        if fx == 0.0 || (hi - lo).abs() < 1e-15 * hi.abs().max(1.0) {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zeros `iβ` of `f̃(0;·)` on `β ∈ (0, 30/a]` and their norming constants
/// `c = sqrt(i Res(S̃, iβ))`.
pub fn bound_states(f: &dyn JostBoundary, a: f64) -> Result<Vec<BoundState>> {
    let beta_max = 30.0 / a;
    let m = 256;
    let g = |b: f64| f.f0(C::new(0.0, b)).map(|v| v.re);
    let betas: Vec<f64> = (1..=m).map(|i| beta_max * i as f64 / m as f64).collect();
    let vals: Vec<f64> = betas.par_iter().map(|&b| g(b)).collect::<Result<_>>()?;
    let mut roots = vec![];
    for i in 1..m {
        if vals[i - 1] == 0.0 {
            roots.push(betas[i - 1]);
        } else if vals[i - 1].signum() != vals[i].signum() && vals[i] != 0.0 {
            roots.push(illinois(g, betas[i - 1], betas[i], vals[i - 1], vals[i])?);
        }
    }
    let mut out = vec![];
    for (j, &beta) in roots.iter().enumerate() {
        let mut gap = beta;
        if j > 0 {
            gap = gap.min(beta - roots[j - 1]);
        }
        if j + 1 < roots.len() {
            gap = gap.min(roots[j + 1] - beta);
        }
        let r = 0.25 * gap;
        let n = 32;
        let mut res = C::new(0.0, 0.0);
        for t in 0..n {
            let e = C::from_polar(1.0, 2.0 * PI * (t as f64 + 0.5) / n as f64);
            let z = C::new(0.0, beta) + r * e;
            res += f.f0_reflected(z)? / f.f0(z)? * r * e;
        }
        let ires = C::i() * res / n as f64;
        if !(ires.re > 0.0 && ires.im.abs() <= 1e-6 * ires.norm()) {
            return Err(Error::ResidueNotPositiveReal { beta, value: format!("{ires}") });
        }
        out.push(BoundState { beta, norming: ires.re.sqrt() });
    }
    Ok(out)
}

/// `M(ξ) = (1/2π)∫(1 - S̃(k)) e^{ikξ} dk + Σ c_j² e^{-β_j ξ}` at each `ξ`.
///
/// The `O(1/k)` tail of `1 - S̃` is fitted by rational-exponential terms at
/// frequencies `0, ±2a, ±4a` and transformed exactly; the remainder is summed
/// by the trapezoid rule on the sample grid. Where `M` jumps the symmetric
/// mean is returned.
pub fn marchenko_kernel(sd: &ScatteringData, xi: &[f64]) -> Result<Vec<f64>> {
    kernel_values(sd, xi, 0)
}

fn kernel_values(sd: &ScatteringData, xi: &[f64], side: i32) -> Result<Vec<f64>> {
    let s = &sd.s;
    let h = s.uniform_spacing()?;
    let one_minus = s.map(Symmetry::ConjugateSymmetric, |_, v| 1.0 - v);
    let tail = TailModel::fit_samples(&one_minus, &[2.0 * sd.a, 4.0 * sd.a]);
    let rem: Vec<C> = one_minus.k.iter().zip(&one_minus.values).map(|(&k, &v)| v - tail.eval(k)).collect();
    let k0 = s.k[0];
    let vals: Vec<C> = xi
        .par_iter()
        .map(|&x| {
            let step = C::new(0.0, h * x).exp();
            let mut acc = C::new(0.0, 0.0);
            let mut z = C::new(0.0, k0 * x).exp();
            for (j, r) in rem.iter().enumerate() {
                if j % 512 == 0 {
                    z = C::new(0.0, (k0 + j as f64 * h) * x).exp();
                }
                acc += r * z;
                z *= step;
            }
            let bound: f64 = sd.bound_states.iter().map(|b| b.norming * b.norming * (-b.beta * x).exp()).sum();
            acc * (h / (2.0 * PI)) + tail.fourier_limit(x, side) + bound
        })
        .collect();
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.re.abs()));
    let worst = vals.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if worst > 1e-4 * scale {
        return Err(Error::IdentityMismatch(format!("Marchenko kernel has imaginary part {worst:e}")));
    }
    Ok(vals.iter().map(|v| v.re).collect())
}

/// `M` on the Nyström grid `ξ = mδ`, `m = 0..=2n`, `δ = a/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSamples {
    pub a: f64,
    pub n: usize,
    pub values: Vec<f64>,
    /// `M(2a-)`.
    pub left_edge: f64,
}

impl KernelSamples {
    /// Samples `M` and checks that it vanishes on `(2a, 2a+1]`.
    pub fn from_scattering(sd: &ScatteringData, n: usize) -> Result<Self> {
        let a = sd.a;
        let delta = a / n as f64;
        let probes = 64;
        let mut xi: Vec<f64> = (0..=2 * n).map(|m| m as f64 * delta).collect();
        xi.extend((1..=probes).map(|t| 2.0 * a + 2.0 * delta + (1.0 - 2.0 * delta) * t as f64 / probes as f64));
        let m = marchenko_kernel(sd, &xi)?;
        for (x, v) in xi[2 * n + 1..].iter().zip(&m[2 * n + 1..]) {
            if v.abs() > 1e-4 {
                return Err(Error::SupportLeak { xi: *x, value: v.abs() });
            }
        }
        let mut values = m[..=2 * n].to_vec();
        // the equation only sees M(0+) and M(2a-)
        values[0] = kernel_values(sd, &[0.0], 1)?[0];
        let left_edge = kernel_values(sd, &[2.0 * a], -1)?[0];
        Ok(Self { a, n, left_edge, values })
    }

    pub fn zero(a: f64, n: usize) -> Self {
        Self { a, n, values: vec![0.0; 2 * n + 1], left_edge: 0.0 }
    }

    pub fn delta(&self) -> f64 {
        self.a / self.n as f64
    }

    /// The same kernel on the grid with twice the step.
    pub fn coarsen(&self) -> Result<Self> {
        if !self.n.is_multiple_of(2) || self.n < 8 {
            return Err(Error::BadParams(format!("cannot halve a grid of {} steps", self.n)));
        }
        let values = self.values.iter().step_by(2).copied().collect();
        Ok(Self { a: self.a, n: self.n / 2, values, left_edge: self.left_edge })
    }
}

/// Simpson weights on an even number of steps (rows always have one).
fn simpson_weights(j: usize, delta: f64) -> Vec<f64> {
    if j == 0 {
        return vec![0.0];
    }
    (0..=j)
        .map(|i| {
            let w = if i == 0 || i == j {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * delta / 3.0
        })
        .collect()
}

fn trapezoid_weights(j: usize, delta: f64) -> Vec<f64> {
    if j == 0 {
        return vec![0.0];
    }
    let mut w = vec![delta; j + 1];
    w[0] *= 0.5;
    w[j] *= 0.5;
    w
}

/// Solves `K(y,ξ) + M(y+ξ) + ∫_y^∞ K(y,s) M(s+ξ) ds = 0` for the row
/// `y = iδ`, returning `K(y, y + jδ)` for `j = 0..=2(n-i)`.
pub fn solve_marchenko(ks: &KernelSamples, i: usize) -> Result<Vec<f64>> {
    let n = ks.n;
    if i > n {
        return Err(Error::BadParams(format!("row {i} is beyond y = a")));
    }
    let delta = ks.delta();
    let big = 2 * (n - i);
    let w = trapezoid_weights(big, delta);
    let edge = 2 * n;
    let mval = |j: usize, jp: usize| -> f64 {
        let q = 2 * i + j + jp;
        if q > edge {
            0.0
        } else if q == edge {
            if j == 0 && jp == big {
                0.0
            } else if j == big && jp == 0 {
                ks.left_edge
            } else {
                ks.values[edge]
            }
        } else {
            ks.values[q]
        }
    };
    let size = big + 1;
    let mut a = DMatrix::<f64>::identity(size, size);
    for jp in 0..size {
        for j in 0..size {
            a[(jp, j)] += w[j] * mval(j, jp);
        }
    }
    let rhs = DVector::from_fn(size, |jp, _| {
        let q = 2 * i + jp;
        if q == edge {
            -ks.left_edge
        } else {
            -ks.values[q]
        }
    });
    let lu = a.lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..size).map(|d| u[(d, d)].abs()).collect();
    let (dmax, dmin) = diag.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)));
    let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    if cond > 1e12 {
        return Err(Error::SingularSystem { y: i as f64 * delta, cond });
    }
    let x = lu.solve(&rhs).ok_or(Error::SingularSystem { y: i as f64 * delta, cond })?;
    Ok(x.iter().copied().collect())
}

/// Solution of the Marchenko equation on the grid `y = iδ`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchenkoSolution {
    pub a: f64,
    pub y_grid: Vec<f64>,
    /// Row `i` holds `K(y_i, y_i + jδ)` for `j = 0..=2(n-i)`; `K` is zero beyond.
    pub kernel: Vec<Vec<f64>>,
    pub potential: Potential,
    /// `f̃(y_i; 0)`.
    pub f0_zero: Vec<f64>,
}

impl MarchenkoSolution {
    pub fn delta(&self) -> f64 {
        self.a / (self.y_grid.len() - 1) as f64
    }

    /// `K(y_i, ξ)` by linear interpolation along the row, zero beyond `2a - y_i`.
    pub fn kernel_at(&self, i: usize, xi: f64) -> f64 {
        let delta = self.delta();
        let row = &self.kernel[i];
        let t = (xi - self.y_grid[i]) / delta;
        if t < 0.0 || t > (row.len() - 1) as f64 {
            return 0.0;
        }
        let j = (t.floor() as usize).min(row.len().saturating_sub(2));
        if row.len() == 1 {
            return row[0];
        }
        let f = t - j as f64;
        row[j] * (1.0 - f) + row[j + 1] * f
    }
}

/// Solves every row, then recovers `V` and `f̃(y;0)`.
pub fn solve_all(ks: &KernelSamples) -> Result<MarchenkoSolution> {
    let kernel: Vec<Vec<f64>> = (0..=ks.n).into_par_iter().map(|i| solve_marchenko(ks, i)).collect::<Result<_>>()?;
    assemble(ks, kernel)
}

/// Solves on the grid of `ks` and on the grid with twice the step, and
/// combines the two as `(4 K_δ - K_{2δ}) / 3` on the coarse grid. The
/// trapezoid error is even in `δ` because every kink of `M` sits on a node.
pub fn solve_extrapolated(ks: &KernelSamples) -> Result<MarchenkoSolution> {
    let coarse = ks.coarsen()?;
    let rows: Vec<usize> = (0..=coarse.n).collect();
    let fine: Vec<Vec<f64>> = rows.par_iter().map(|&i| solve_marchenko(ks, 2 * i)).collect::<Result<_>>()?;
    let kernel: Vec<Vec<f64>> = rows
        .par_iter()
        .zip(fine)
        .map(|(&i, f)| {
            let c = solve_marchenko(&coarse, i)?;
            Ok(c.iter().zip(f.iter().step_by(2)).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
        })
        .collect::<Result<_>>()?;
    assemble(&coarse, kernel)
}

fn assemble(ks: &KernelSamples, kernel: Vec<Vec<f64>>) -> Result<MarchenkoSolution> {
    let n = ks.n;
    let delta = ks.delta();
    let y_grid: Vec<f64> = (0..=n).map(|i| i as f64 * delta).collect();
    let f0_zero = kernel
        .iter()
        .map(|row| 1.0 + simpson_weights(row.len() - 1, delta).iter().zip(row).map(|(w, k)| w * k).sum::<f64>())
        .collect();
    let mut sol = MarchenkoSolution { a: ks.a, y_grid, kernel, potential: Potential::zero(ks.a), f0_zero };
    sol.potential = potential_from_k(&sol)?;
    Ok(sol)
}

fn derivative(d: &[f64], h: f64) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|i| {
            let v = if i >= 2 && i + 2 < n {
                d[i - 2] - 8.0 * d[i - 1] + 8.0 * d[i + 1] - d[i + 2]
            } else if i == 0 {
                -25.0 * d[0] + 48.0 * d[1] - 36.0 * d[2] + 16.0 * d[3] - 3.0 * d[4]
            } else if i == 1 {
                -3.0 * d[0] - 10.0 * d[1] + 18.0 * d[2] - 6.0 * d[3] + d[4]
            } else if i == n - 2 {
                3.0 * d[n - 1] + 10.0 * d[n - 2] - 18.0 * d[n - 3] + 6.0 * d[n - 4] - d[n - 5]
            } else {
                25.0 * d[n - 1] - 48.0 * d[n - 2] + 36.0 * d[n - 3] - 16.0 * d[n - 4] + 3.0 * d[n - 5]
            };
            v / (12.0 * h)
        })
        .collect()
}

/// `V(y) = -2 dK(y,y)/dy` on the row grid; the drop of `K(y,y)` to zero at
/// `y = a` becomes a point part of weight `2 K(a-, a-)`.
pub fn potential_from_k(sol: &MarchenkoSolution) -> Result<Potential> {
    let a = sol.a;
    let diag: Vec<f64> = sol.kernel.iter().map(|r| r[0]).collect();
    if diag.len() < 5 {
        return Err(Error::BadParams("need at least four Nyström steps".into()));
    }
    let v: Vec<f64> = derivative(&diag, sol.delta()).iter().map(|d| -2.0 * d).collect();
    let mut points = vec![];
    let w = 2.0 * diag[diag.len() - 1];
    if w.abs() > POINT_THRESHOLD {
        points.push(PointPart { y: a, weight: w });
    }
    let pieces = if v.iter().all(|x| x.abs() < 1e-12) {
        vec![]
    } else {
        vec![PotentialPiece { lo: 0.0, hi: a, kind: PotentialKind::Samples { values: v } }]
    };
    Potential::new(a, pieces, points)
}

fn jost_row(sol: &MarchenkoSolution, i: usize, k: C) -> C {
    let delta = sol.delta();
    let row = &sol.kernel[i];
    let y = sol.y_grid[i];
    let w = simpson_weights(row.len() - 1, delta);
    let integral: C = row.iter().zip(&w).enumerate().map(|(j, (kv, wv))| (C::i() * k * (y + j as f64 * delta)).exp() * kv * wv).sum();
    integral
}

/// `f̃(y;k) = e^{iky} + ∫_y^{2a-y} K(y,s) e^{iks} ds`; between grid rows the
/// result is interpolated by a cubic through the four nearest rows.
pub fn jost_from_k(sol: &MarchenkoSolution, k: C, y: f64) -> C {
    let free = (C::i() * k * y).exp();
    if y >= sol.a {
        return free;
    }
    let delta = sol.delta();
    let n = sol.y_grid.len() - 1;
    let t = (y / delta).max(0.0);
    let r = t.round();
    if (t - r).abs() < 1e-9 {
        return free + jost_row(sol, r as usize, k);
    }
    let base = (t.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
    let mut acc = C::new(0.0, 0.0);
    for l in 0..4 {
        let mut basis = 1.0;
        for m in 0..4 {
            if m != l {
                basis *= (t - (base + m) as f64) / (l as f64 - m as f64);
            }
        }
        acc += jost_row(sol, base + l, k) * basis;
    }
    free + acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::IntegratorConfig;
    use crate::samples::uniform_grid;

    /// Shooting oracle for the Dirichlet square well: bound states solve
    /// κ cot κa = -β with κ² = depth - β².
    fn square_well_oracle(depth: f64) -> Vec<(f64, f64)> {
        let f = |b: f64| {
            let kap = (depth - b * b).sqrt();
            kap * kap.cos() + b * kap.sin()
        };
        let mut out = vec![];
        let m = 20000;
        let top = depth.sqrt() * (1.0 - 1e-12);
        for i in 0..m {
            let (lo, hi) = (top * i as f64 / m as f64 + 1e-9, top * (i + 1) as f64 / m as f64);
            if f(lo) * f(hi) < 0.0 {
                let (mut l, mut h) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (l + h);
                    if f(l) * f(mid) <= 0.0 {
                        h = mid;
                    } else {
                        l = mid;
                    }
                }
                let beta = 0.5 * (l + h);
                let kap = (depth - beta * beta).sqrt();
                // ψ = A sin κy inside, e^{-βy} outside, continuous at y = 1
                let amp = (-beta).exp() / kap.sin();
                let inner = amp * amp * (0.5 - (2.0 * kap).sin() / (4.0 * kap));
                let outer = (-2.0 * beta).exp() / (2.0 * beta);
                out.push((beta, (1.0 / (inner + outer)).sqrt()));
            }
        }
        out
    }

    #[test]
    fn trivial_data() {
        let f0 = SpectralSamples::from_fn(uniform_grid(100.0, 4097), Symmetry::ConjugateSymmetric, |_| Ok(C::new(1.0, 0.0)))
            .unwrap();
        let sd = ScatteringData::new(f0, vec![], 1.0).unwrap();
        assert!(sd.s.values.iter().all(|v| *v == C::new(1.0, 0.0)));
        let ks = KernelSamples::from_scattering(&sd, 32).unwrap();
        assert!(ks.values.iter().all(|v| v.abs() < 1e-12));
        let sol = solve_all(&ks).unwrap();
        assert!(sol.potential.is_zero());
        assert!((jost_from_k(&sol, C::new(2.0, 0.0), 0.3) - C::new(0.0, 0.6).exp()).norm() < 1e-14);
    }

    #[test]
    fn square_well_bound_state_matches_shooting() {
        let v = Potential::square_well(1.0, -9.0);
        let solver = SchrodingerSolver::new(&v, IntegratorConfig::default());
        let found = bound_states(&solver, 1.0).unwrap();
        let oracle = square_well_oracle(9.0);
        assert_eq!(found.len(), oracle.len());
        for (b, (beta, c)) in found.iter().zip(&oracle) {
            assert!((b.beta - beta).abs() < 1e-8, "{} vs {beta}", b.beta);
            assert!((b.norming - c).abs() < 1e-6, "{} vs {c}", b.norming);
        }
    }

    #[test]
    fn delta_potential_kernel_and_point_part() {
        // V = 2 δ(y - 1): M(ξ) = -1 on (0, 2) has the closed form below
        let (c, a) = (2.0, 1.0);
        let f0 = SpectralSamples::from_fn(uniform_grid(500.0, 1 << 15 | 1), Symmetry::ConjugateSymmetric, |k: f64| {
            if k == 0.0 {
                return Ok(C::new(1.0 - c * a, 0.0));
            }
            let ik = C::new(0.0, 2.0 * k);
            Ok(1.0 - c / ik + c * C::new(0.0, 2.0 * k * a).exp() / ik)
        })
        .unwrap();
        let sd = ScatteringData::new(f0, vec![], a).unwrap();
        // slow oracle: Gaussian-windowed quadrature of (1/2π)∫(1 - S)e^{ikξ}dk
        let s_exact = |k: f64| {
            let ik = C::new(0.0, 2.0 * k);
            (ik + c - c * (-ik * a).exp()) / (ik - c + c * (ik * a).exp())
        };
        let xi = [0.3, 1.1, 1.7, 2.5];
        let m = marchenko_kernel(&sd, &xi).unwrap();
        let (gx, gw) = crate::quad::gauss_legendre(16);
        let width = 3000.0;
        for (&x, &mv) in xi.iter().zip(&m) {
            let mut acc = C::new(0.0, 0.0);
            let mut lo = -6.0 * width;
            while lo < 6.0 * width {
                for (t, w) in gx.iter().zip(&gw) {
                    let k = lo + 0.25 * (1.0 + t);
                    acc += (1.0 - s_exact(k)) * C::new(0.0, k * x).exp() * (-(k / width).powi(2)).exp() * (0.25 * w);
                }
                lo += 0.5;
            }
            let direct = acc.re / (2.0 * PI);
            assert!((mv - direct).abs() < 1e-6, "ξ={x}: {mv} vs {direct}");
        }
        let ks = KernelSamples::from_scattering(&sd, 128).unwrap();
        let sol = solve_all(&ks).unwrap();
        let p = &sol.potential.points;
        assert_eq!(p.len(), 1);
        assert!((p[0].y - 1.0).abs() < 1e-12 && (p[0].weight - 2.0).abs() < 1e-3, "{:?}", p);
        assert!(sol.potential.smooth_sup_norm(400) < 1e-3);
    }

    #[test]
    fn square_well_round_trip() {
        let v = Potential::square_well(1.0, -9.0);
        let solver = SchrodingerSolver::new(&v, IntegratorConfig::default());
        let f0 = SpectralSamples::from_fn(uniform_grid(500.0, 1 << 15 | 1), Symmetry::ConjugateSymmetric, |k| {
            solver.f0(C::new(k, 0.0))
        })
        .unwrap();
        let bs = bound_states(&solver, 1.0).unwrap();
        let sd = ScatteringData::new(f0, bs, 1.0).unwrap();
        let ks = KernelSamples::from_scattering(&sd, DEFAULT_STEPS).unwrap();
        let sol = solve_extrapolated(&ks).unwrap();
        let mut err = 0.0f64;
        for i in 0..=100 {
            let y = 0.05 + 0.9 * i as f64 / 100.0;
            err = err.max((sol.potential.smooth(y) + 9.0).abs());
        }
        assert!(err < 1e-3, "potential error {err}");
        let direct = solver.jost(C::new(2.0, 0.0), 0.5).unwrap().value;
        let from_k = jost_from_k(&sol, C::new(2.0, 0.0), 0.5);
        assert!((direct - from_k).norm() < 1e-5, "{direct} vs {from_k}");
    }
}
