//! Integration of psi'' = -(k^2 w(x) - u(x)) psi on piecewise-smooth media.
//!
//! The wave equation uses w = rho, u = 0; the Schrödinger equation uses
//! w = 1, u = V. Constant sections are crossed with the exact transfer
//! matrix; smooth sections use an embedded Runge–Kutta–Fehlberg 7(8) pair.
//! Point parts of V are applied as exact jumps of psi'. Every returned
//! derivative is the limit from the right at the evaluation point.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::profiles::{PointPart, Potential, PotentialKind, RadialProfile};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step_per_period: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-13, max_step_per_period: 20.0 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step_per_period >= 10.0) {
            return Err(Error::BadParams(format!("invalid integrator configuration {self:?}")));
        }
        Ok(())
    }
}

/// A solution value and its derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionSample {
    pub value: C,
    pub derivative: C,
    pub k: C,
    pub x_or_y: f64,
}

/// `g h' - g' h`.
pub fn wronskian(s1: &SolutionSample, s2: &SolutionSample) -> Result<C> {
    if s1.x_or_y != s2.x_or_y {
        return Err(Error::MismatchedPoint(s1.x_or_y, s2.x_or_y));
    }
    Ok(s1.value * s2.derivative - s1.derivative * s2.value)
}

#[derive(Clone)]
enum Coef {
    Const(f64),
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coef {
    #[inline]
    fn at(&self, x: f64) -> f64 {
        match self {
            Coef::Const(v) => *v,
            Coef::Func(f) => f(x),
        }
    }
}

#[derive(Clone)]
struct Section {
    lo: f64,
    hi: f64,
    w: Coef,
    u: Coef,
    w_max: f64,
    u_max: f64,
}

impl Section {
    fn new(lo: f64, hi: f64, w: Coef, u: Coef) -> Self {
        let mut w_max = 0.0f64;
        let mut u_max = 0.0f64;
        for i in 0..=32 {
            let x = lo + (hi - lo) * i as f64 / 32.0;
            w_max = w_max.max(w.at(x).abs());
            u_max = u_max.max(u.at(x).abs());
        }
        Self { lo, hi, w, u, w_max, u_max }
    }

    fn is_constant(&self) -> bool {
        matches!((&self.w, &self.u), (Coef::Const(_), Coef::Const(_)))
    }
}

/// psi'' = -(k^2 w - u) psi on [0, end], free (w = 1, u = 0) beyond.
#[derive(Clone)]
pub struct Equation {
    sections: Vec<Section>,
    points: Vec<PointPart>,
    end: f64,
}

impl Equation {
    /// The wave equation psi'' + k^2 rho psi = 0.
    pub fn wave(p: &RadialProfile) -> Self {
        let p = Arc::new(p.clone());
        let mut nodes = vec![0.0];
        nodes.extend_from_slice(p.breakpoints());
        let pieces = p.pieces();
        let sections = nodes
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let seg = pieces.iter().position(|s| mid >= s.0 && mid <= s.1).unwrap_or(pieces.len() - 1);
                let coef = if pieces[seg].2 {
                    Coef::Const(p.rho(mid))
                } else {
                    let p = p.clone();
                    Coef::Func(Arc::new(move |x| p.rho_in_segment(seg, x)))
                };
                Section::new(w[0], w[1], coef, Coef::Const(0.0))
            })
            .collect();
        Self { sections, points: vec![], end: p.b() }
    }

    /// The Schrödinger equation psi'' + k^2 psi = V psi.
    pub fn schrodinger(v: &Potential) -> Self {
        let v = Arc::new(v.clone());
        let mut nodes = vec![0.0];
        nodes.extend(v.breakpoints());
        let sections = nodes
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let piece = v.pieces.iter().position(|p| mid >= p.lo && mid <= p.hi);
                let u = match piece {
                    None => Coef::Const(0.0),
                    Some(i) => match v.pieces[i].kind {
                        PotentialKind::Constant { value } => Coef::Const(value),
                        _ => {
                            let v = v.clone();
                            Coef::Func(Arc::new(move |y| v.pieces[i].eval(y)))
                        }
                    },
                };
                Section::new(w[0], w[1], Coef::Const(1.0), u)
            })
            .collect();
        Self { sections, points: v.points.clone(), end: v.a }
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// Propagates `(psi, psi')` from `x0` to `x1`.
    pub fn propagate(&self, k: C, x0: f64, x1: f64, y: [C; 2], cfg: &IntegratorConfig) -> Result<[C; 2]> {
        self.run::<2>(k, x0, x1, y, cfg)
    }

    /// Propagates `(psi, psi', d psi/dk, d psi'/dk)` from `x0` to `x1`.
    pub fn propagate_dk(&self, k: C, x0: f64, x1: f64, y: [C; 4], cfg: &IntegratorConfig) -> Result<[C; 4]> {
        self.run::<4>(k, x0, x1, y, cfg)
    }

    fn run<const N: usize>(&self, k: C, x0: f64, x1: f64, mut y: [C; N], cfg: &IntegratorConfig) -> Result<[C; N]> {
        if x0 == x1 {
            return Ok(y);
        }
        let forward = x1 > x0;
        let free = Section::new(self.end, f64::INFINITY, Coef::Const(1.0), Coef::Const(0.0));
        let mut spans: Vec<&Section> = self.sections.iter().collect();
        spans.push(&free);
        if !forward {
            spans.reverse();
        }
        let (lo, hi) = if forward { (x0, x1) } else { (x1, x0) };
        let mut x = x0;
        for s in spans {
            let a = s.lo.max(lo);
            let b = s.hi.min(hi);
            if b <= a {
                continue;
            }
            let (from, to) = if forward { (a, b) } else { (b, a) };
            if !forward {
                // leaving x = from (moving left) crosses any point part sitting there
                y = self.jump_left(from, y, x0);
            }
            y = if s.is_constant() {
                constant_step::<N>(s, k, to - from, y)
            } else {
                rk78::<N>(s, k, from, to, y, cfg)?
            };
            if forward {
                y = self.jump_right(to, y);
            }
            x = to;
        }
        debug_assert!((x - x1).abs() <= 1e-12 * x1.abs().max(1.0));
        Ok(y)
    }

    fn jump_right<const N: usize>(&self, x: f64, mut y: [C; N]) -> [C; N] {
        for p in self.points.iter().filter(|p| (p.y - x).abs() <= 1e-13 * self.end.max(1.0)) {
            y[1] += p.weight * y[0];
            if N == 4 {
                y[3] += p.weight * y[2];
            }
        }
        y
    }

    fn jump_left<const N: usize>(&self, x: f64, mut y: [C; N], start: f64) -> [C; N] {
        // The starting state is already the right limit; crossing leftwards removes the jump.
        let _ = start;
        for p in self.points.iter().filter(|p| (p.y - x).abs() <= 1e-13 * self.end.max(1.0)) {
            y[1] -= p.weight * y[0];
            if N == 4 {
                y[3] -= p.weight * y[2];
            }
        }
        y
    }
}

/// g(z) = (z cos z - sin z) / z^3.
fn g_entire(z: C) -> C {
    if z.norm() < 0.3 {
        let z2 = z * z;
        let mut term = C::new(-1.0 / 3.0, 0.0);
        let mut sum = term;
        for n in 2..12 {
            let n = n as f64;
            // ratio of consecutive series coefficients (-1)^n 2n/(2n+1)!
            term = -term * z2 * (2.0 * n) / ((2.0 * n - 2.0) * (2.0 * n) * (2.0 * n + 1.0));
            sum += term;
        }
        sum
    } else {
        (z * z.cos() - z.sin()) / (z * z * z)
    }
}

fn sinc(z: C) -> C {
    crate::profiles::sinc(z)
}

fn constant_step<const N: usize>(s: &Section, k: C, len: f64, y: [C; N]) -> [C; N] {
    let w = s.w.at(s.lo);
    let u = s.u.at(s.lo);
    let q = k * k * w - u;
    let root = q.sqrt();
    let z = root * len;
    let cs = z.cos();
    let sn = sinc(z) * len;
    let mut out = y;
    out[0] = cs * y[0] + sn * y[1];
    out[1] = -q * sn * y[0] + cs * y[1];
    if N == 4 {
        let dc = -0.5 * len * sn;
        let ds = 0.5 * len * len * len * g_entire(z);
        let dq = 2.0 * k * w;
        let (a, b, c, d) = (dc * dq, ds * dq, (-sn - q * ds) * dq, dc * dq);
        out[2] = cs * y[2] + sn * y[3] + a * y[0] + b * y[1];
        out[3] = -q * sn * y[2] + cs * y[3] + c * y[0] + d * y[1];
    }
    out
}

const RK_C: [f64; 13] = [
    0.0,
    2.0 / 27.0,
    1.0 / 9.0,
    1.0 / 6.0,
    5.0 / 12.0,
    0.5,
    5.0 / 6.0,
    1.0 / 6.0,
    2.0 / 3.0,
    1.0 / 3.0,
    1.0,
    0.0,
    1.0,
];

const RK_A: [[f64; 12]; 13] = [
    [0.0; 12],
    [2.0 / 27.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 36.0, 1.0 / 12.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 24.0, 0.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0, 0.0, 0.0, 0.0, 0.0],
    [-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0, 0.0, 0.0, 0.0],
    [
        2383.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -301.0 / 82.0,
        2133.0 / 4100.0,
        45.0 / 82.0,
        45.0 / 164.0,
        18.0 / 41.0,
        0.0,
        0.0,
    ],
    [3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0, 0.0],
    [
        -1777.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -289.0 / 82.0,
        2193.0 / 4100.0,
        51.0 / 82.0,
        33.0 / 164.0,
        12.0 / 41.0,
        0.0,
        1.0,
    ],
];

const RK_B8: [f64; 13] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    0.0,
    41.0 / 840.0,
    41.0 / 840.0,
];

#[inline]
fn rhs<const N: usize>(s: &Section, k: C, x: f64, y: &[C; N]) -> [C; N] {
    let w = s.w.at(x);
    let q = k * k * w - s.u.at(x);
    let mut d = [C::new(0.0, 0.0); N];
    d[0] = y[1];
    d[1] = -q * y[0];
    if N == 4 {
        d[2] = y[3];
        d[3] = -q * y[2] - 2.0 * k * w * y[0];
    }
    d
}

fn rk78<const N: usize>(s: &Section, k: C, x0: f64, x1: f64, mut y: [C; N], cfg: &IntegratorConfig) -> Result<[C; N]> {
    let span = x1 - x0;
    let dir = span.signum();
    let omega = (k.norm_sqr() * s.w_max + s.u_max).sqrt().max(1.0);
    let cap = (2.0 * std::f64::consts::PI / omega / cfg.max_step_per_period).min(span.abs());
    let mut h = cap * dir;
    let mut x = x0;
    let min_step = 1e-13 * span.abs().max(1e-300);
    let mut ks = [[C::new(0.0, 0.0); N]; 13];
    let mut steps = 0usize;
    while (x1 - x) * dir > 0.0 {
        if (x + h - x1) * dir > 0.0 || ((x1 - x - h) * dir).abs() < 1e-12 * span.abs() {
            h = x1 - x;
        }
        for st in 0..13 {
            let mut ys = y;
            for j in 0..st {
                let a = RK_A[st][j];
                if a != 0.0 {
                    for (c, kj) in ys.iter_mut().zip(&ks[j]) {
                        *c += h * a * kj;
                    }
                }
            }
            ks[st] = rhs::<N>(s, k, x + RK_C[st] * h, &ys);
        }
        let mut ynew = y;
        for st in 0..13 {
            let b = RK_B8[st];
            if b != 0.0 {
                for (c, kj) in ynew.iter_mut().zip(&ks[st]) {
                    *c += h * b * kj;
                }
            }
        }
        let mut err = 0.0f64;
        for pair in 0..N / 2 {
            let (i, j) = (2 * pair, 2 * pair + 1);
            let e0 = 41.0 / 840.0 * h * (ks[0][i] + ks[10][i] - ks[11][i] - ks[12][i]);
            let e1 = 41.0 / 840.0 * h * (ks[0][j] + ks[10][j] - ks[11][j] - ks[12][j]);
            let e = e0.norm() + e1.norm() / omega;
            let mag = (y[i].norm() + y[j].norm() / omega).max(ynew[i].norm() + ynew[j].norm() / omega);
            err = err.max(e / (cfg.abs_tol + cfg.rel_tol * mag));
        }
        if !err.is_finite() {
            return Err(Error::StepFailure { x, k: format!("{k}") });
        }
        if err <= 1.0 {
            x += h;
            y = ynew;
            steps += 1;
            if steps > 10_000_000 {
                return Err(Error::StepFailure { x, k: format!("{k}") });
            }
        }
        let fac = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 4.0) };
        h = (h * fac).abs().min(cap) * dir;
        if h.abs() < min_step && (x1 - x) * dir > min_step {
            return Err(Error::StepFailure { x, k: format!("{k}") });
        }
    }
    Ok(y)
}

/// Reusable solver for the wave equation of one profile.
#[derive(Clone)]
pub struct WaveSolver {
    eq: Equation,
    b: f64,
    pub cfg: IntegratorConfig,
}

impl WaveSolver {
    pub fn new(p: &RadialProfile, cfg: IntegratorConfig) -> Self {
        Self { eq: Equation::wave(p), b: p.b(), cfg }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// phi with phi(0) = 0, phi'(0) = 1.
    pub fn regular(&self, k: C, x: f64) -> Result<SolutionSample> {
        let y = self.eq.propagate(k, 0.0, x, [C::new(0.0, 0.0), C::new(1.0, 0.0)], &self.cfg)?;
        Ok(SolutionSample { value: y[0], derivative: y[1], k, x_or_y: x })
    }

    /// phi and its k-derivative: `[phi, phi', dphi/dk, dphi'/dk]`.
    pub fn regular_dk(&self, k: C, x: f64) -> Result<[C; 4]> {
        let z = C::new(0.0, 0.0);
        self.eq.propagate_dk(k, 0.0, x, [z, C::new(1.0, 0.0), z, z], &self.cfg)
    }

    /// Jost solution f = e^{ikx} for x >= b.
    pub fn jost(&self, k: C, x: f64) -> Result<SolutionSample> {
        let start = self.b.max(x);
        let e = (C::i() * k * start).exp();
        let y = self.eq.propagate(k, start, x, [e, C::i() * k * e], &self.cfg)?;
        Ok(SolutionSample { value: y[0], derivative: y[1], k, x_or_y: x })
    }
}

/// Reusable solver for the half-line Schrödinger equation of one potential.
#[derive(Clone)]
pub struct SchrodingerSolver {
    eq: Equation,
    a: f64,
    pub cfg: IntegratorConfig,
}

impl SchrodingerSolver {
    pub fn new(v: &Potential, cfg: IntegratorConfig) -> Self {
        Self { eq: Equation::schrodinger(v), a: v.a, cfg }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn regular(&self, k: C, y: f64) -> Result<SolutionSample> {
        let s = self.eq.propagate(k, 0.0, y, [C::new(0.0, 0.0), C::new(1.0, 0.0)], &self.cfg)?;
        Ok(SolutionSample { value: s[0], derivative: s[1], k, x_or_y: y })
    }

    pub fn regular_dk(&self, k: C, y: f64) -> Result<[C; 4]> {
        let z = C::new(0.0, 0.0);
        self.eq.propagate_dk(k, 0.0, y, [z, C::new(1.0, 0.0), z, z], &self.cfg)
    }

    pub fn jost(&self, k: C, y: f64) -> Result<SolutionSample> {
        let start = self.a.max(y);
        let e = (C::i() * k * start).exp();
        let s = self.eq.propagate(k, start, y, [e, C::i() * k * e], &self.cfg)?;
        Ok(SolutionSample { value: s[0], derivative: s[1], k, x_or_y: y })
    }

    /// Jost solution and its k-derivative at `y`.
    pub fn jost_dk(&self, k: C, y: f64) -> Result<[C; 4]> {
        let start = self.a.max(y);
        let i = C::i();
        let e = (i * k * start).exp();
        let init = [e, i * k * e, i * start * e, i * e * (1.0 + i * k * start)];
        self.eq.propagate_dk(k, start, y, init, &self.cfg)
    }
}

/// phi(x; k) for the wave equation.
pub fn solve_regular(p: &RadialProfile, k: C, x_eval: f64, cfg: &IntegratorConfig) -> Result<SolutionSample> {
    WaveSolver::new(p, *cfg).regular(k, x_eval)
}

/// f(x; k) for the wave equation.
pub fn solve_jost_wave(p: &RadialProfile, k: C, x_eval: f64, cfg: &IntegratorConfig) -> Result<SolutionSample> {
    WaveSolver::new(p, *cfg).jost(k, x_eval)
}

/// Jost solution of the Schrödinger equation at `y_eval`.
pub fn solve_jost_schrodinger(v: &Potential, k: C, y_eval: f64, cfg: &IntegratorConfig) -> Result<SolutionSample> {
    SchrodingerSolver::new(v, *cfg).jost(k, y_eval)
}

/// Regular solution of the Schrödinger equation at `y_eval`.
pub fn solve_regular_schrodinger(v: &Potential, k: C, y_eval: f64, cfg: &IntegratorConfig) -> Result<SolutionSample> {
    SchrodingerSolver::new(v, *cfg).regular(k, y_eval)
}
