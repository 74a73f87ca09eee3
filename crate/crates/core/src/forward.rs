//! Dispersion functions, their zeros with multiplicities, and the product E(k).

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{IntegratorConfig, SchrodingerSolver, WaveSolver};
use crate::profiles::{sinc, ClosedForm, Potential, RadialProfile};
use crate::samples::{SpectralSamples, Symmetry};

type C = Complex64;

/// An even entire function of k whose zeros are sought.
pub trait Dispersion: Sync {
    fn eval(&self, k: C) -> Result<C>;

    /// Value and k-derivative. The default differentiates on a small circle.
    fn eval_dk(&self, k: C) -> Result<(C, C)> {
        let h = 1e-3 / self.length_scale();
        let mut acc = C::new(0.0, 0.0);
        for j in 0..8 {
            let w = C::from_polar(1.0, 2.0 * PI * j as f64 / 8.0);
            acc += self.eval(k + h * w)? / w;
        }
        Ok((self.eval(k)?, acc / (8.0 * h)))
    }

    /// A cheaper, less accurate value, good enough to track arg D along contours.
    fn eval_rough(&self, k: C) -> Result<C> {
        self.eval(k)
    }

    /// Support length (b or a); sets the natural k scale.
    fn length_scale(&self) -> f64;
}

/// Integrator settings used for contour tracking.
fn rough_config(cfg: IntegratorConfig) -> IntegratorConfig {
    IntegratorConfig { rel_tol: cfg.rel_tol.max(1e-8), abs_tol: cfg.abs_tol.max(1e-10), max_step_per_period: 10.0 }
}

/// sin(z)/z and its derivative.
fn sinc_d(z: C) -> (C, C) {
    let s = sinc(z);
    let d = if z.norm() < 1e-3 {
        let z2 = z * z;
        -z / 3.0 * (1.0 - z2 / 10.0 * (1.0 - z2 / 28.0))
    } else {
        (z.cos() - s) / z
    };
    (s, d)
}

/// D(k) = sin(kL)/k psi'(L) - cos(kL) psi(L) and its k-derivative from a
/// regular solution and its variational derivative.
fn combine(len: f64, k: C, y: [C; 4]) -> (C, C) {
    let (s, ds) = sinc_d(k * len);
    let (sn, cs) = ((k * len).sin(), (k * len).cos());
    let d = len * s * y[1] - cs * y[0];
    let dd = len * len * ds * y[1] + len * s * y[3] + len * sn * y[0] - cs * y[2];
    (d, dd)
}

/// D(k) of a wave-speed profile.
#[derive(Clone)]
pub struct WaveDispersion {
    solver: WaveSolver,
    rough: WaveSolver,
}

impl WaveDispersion {
    pub fn new(p: &RadialProfile, cfg: IntegratorConfig) -> Self {
        let solver = WaveSolver::new(p, cfg);
        let mut rough = solver.clone();
        rough.cfg = rough_config(cfg);
        Self { solver, rough }
    }

    pub fn solver(&self) -> &WaveSolver {
        &self.solver
    }

    /// (f(0;k) - f(0;-k)) / (2ik).
    pub fn via_jost(&self, k: C) -> Result<C> {
        let fp = self.solver.jost(k, 0.0)?.value;
        let fm = self.solver.jost(-k, 0.0)?.value;
        Ok((fp - fm) / (2.0 * C::i() * k))
    }
}

impl Dispersion for WaveDispersion {
    fn eval(&self, k: C) -> Result<C> {
        let b = self.solver.b();
        let s = self.solver.regular(k, b)?;
        Ok(b * sinc(k * b) * s.derivative - (k * b).cos() * s.value)
    }

    fn eval_dk(&self, k: C) -> Result<(C, C)> {
        let b = self.solver.b();
        Ok(combine(b, k, self.solver.regular_dk(k, b)?))
    }

    fn eval_rough(&self, k: C) -> Result<C> {
        let b = self.solver.b();
        let s = self.rough.regular(k, b)?;
        Ok(b * sinc(k * b) * s.derivative - (k * b).cos() * s.value)
    }

    fn length_scale(&self) -> f64 {
        self.solver.b()
    }
}

/// D~(k) of a half-line potential.
#[derive(Clone)]
pub struct SchrodingerDispersion {
    solver: SchrodingerSolver,
    rough: SchrodingerSolver,
}

impl SchrodingerDispersion {
    pub fn new(v: &Potential, cfg: IntegratorConfig) -> Self {
        let solver = SchrodingerSolver::new(v, cfg);
        let mut rough = solver.clone();
        rough.cfg = rough_config(cfg);
        Self { solver, rough }
    }

    pub fn solver(&self) -> &SchrodingerSolver {
        &self.solver
    }

    pub fn via_jost(&self, k: C) -> Result<C> {
        let fp = self.solver.jost(k, 0.0)?.value;
        let fm = self.solver.jost(-k, 0.0)?.value;
        Ok((fp - fm) / (2.0 * C::i() * k))
    }
}

impl Dispersion for SchrodingerDispersion {
    fn eval(&self, k: C) -> Result<C> {
        let a = self.solver.a();
        let s = self.solver.regular(k, a)?;
        Ok(a * sinc(k * a) * s.derivative - (k * a).cos() * s.value)
    }

    fn eval_dk(&self, k: C) -> Result<(C, C)> {
        let a = self.solver.a();
        Ok(combine(a, k, self.solver.regular_dk(k, a)?))
    }

    fn eval_rough(&self, k: C) -> Result<C> {
        let a = self.solver.a();
        let s = self.rough.regular(k, a)?;
        Ok(a * sinc(k * a) * s.derivative - (k * a).cos() * s.value)
    }

    fn length_scale(&self) -> f64 {
        self.solver.a()
    }
}

/// Closed-form D of a built-in example.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormDispersion {
    pub form: ClosedForm,
    pub b: f64,
}

impl Dispersion for ClosedFormDispersion {
    fn eval(&self, k: C) -> Result<C> {
        Ok(self.form.dispersion(k))
    }

    fn length_scale(&self) -> f64 {
        self.b
    }
}

/// Any even entire function given as a closure.
pub struct FnDispersion<F> {
    pub f: F,
    pub scale: f64,
}

impl<F: Fn(C) -> Result<C> + Sync> Dispersion for FnDispersion<F> {
    fn eval(&self, k: C) -> Result<C> {
        (self.f)(k)
    }

    fn length_scale(&self) -> f64 {
        self.scale
    }
}

/// D(k) for a profile.
pub fn dispersion_d(p: &RadialProfile, k: C) -> Result<C> {
    WaveDispersion::new(p, IntegratorConfig::default()).eval(k)
}

/// D~(k) for a potential.
pub fn dispersion_d_schrodinger(v: &Potential, k: C) -> Result<C> {
    SchrodingerDispersion::new(v, IntegratorConfig::default()).eval(k)
}

/// D(k) with the Jost-solution path evaluated alongside; fails if they differ
/// by more than `tol * (1 + |D|)`. Near k = 0 only the direct path is used.
pub fn dispersion_d_checked(p: &RadialProfile, k: C, tol: f64) -> Result<C> {
    let w = WaveDispersion::new(p, IntegratorConfig::default());
    let d = w.eval(k)?;
    if k.norm() * p.b() > 1e-6 {
        let j = w.via_jost(k)?;
        if (d - j).norm() > tol * (1.0 + d.norm()) {
            return Err(Error::IdentityMismatch(format!("D({k}) = {d} but the Jost path gives {j}")));
        }
    }
    Ok(d)
}

pub fn dispersion_d_schrodinger_checked(v: &Potential, k: C, tol: f64) -> Result<C> {
    let w = SchrodingerDispersion::new(v, IntegratorConfig::default());
    let d = w.eval(k)?;
    if k.norm() * v.a > 1e-6 {
        let j = w.via_jost(k)?;
        if (d - j).norm() > tol * (1.0 + d.norm()) {
            return Err(Error::IdentityMismatch(format!("D({k}) = {d} but the Jost path gives {j}")));
        }
    }
    Ok(d)
}

/// Samples `d` on a symmetric real grid (even in k).
pub fn sample_dispersion(d: &dyn Dispersion, grid: Vec<f64>) -> Result<SpectralSamples> {
    SpectralSamples::from_fn(grid, Symmetry::EvenInK, |k| d.eval(C::new(k, 0.0)).map(|v| C::new(v.re, 0.0)))
}

/// Rectangle searched for zeros: Re k in [0, k_max], |Im k| <= im_band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub k_max: f64,
    pub im_band: f64,
}

impl SearchWindow {
    /// The default window 40/L by 20/L for support length L.
    pub fn for_length(len: f64) -> Self {
        Self { k_max: 40.0 / len, im_band: 20.0 / len }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub k: C,
    pub multiplicity: u32,
}

/// Zeros of a dispersion function in a window, closed under k -> -k and
/// k -> conj(k), together with the order `d` of the zero at the origin
/// (as a function of k^2) and gamma = lim D(k)/k^{2d}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSet {
    pub d: u32,
    pub zeros: Vec<Eigenvalue>,
    pub gamma: f64,
    pub window: SearchWindow,
}

impl EigenvalueSet {
    /// One zero per distinct k^2: Re k > 0, or Re k = 0 and Im k > 0.
    pub fn representatives(&self) -> Vec<Eigenvalue> {
        self.zeros.iter().copied().filter(|z| z.k.re > 0.0 || (z.k.re == 0.0 && z.k.im > 0.0)).collect()
    }

    /// Real positive zeros, ascending.
    pub fn real_positive(&self) -> Vec<Eigenvalue> {
        self.zeros.iter().copied().filter(|z| z.k.im == 0.0 && z.k.re > 0.0).collect()
    }
}

fn key(p: C) -> (u64, u64) {
    (p.re.to_bits(), p.im.to_bits())
}

fn lex_less(p: C, q: C) -> bool {
    (p.re, p.im) < (q.re, q.im)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Cell {
    fn corners(&self) -> [C; 4] {
        [C::new(self.x0, self.y0), C::new(self.x1, self.y0), C::new(self.x1, self.y1), C::new(self.x0, self.y1)]
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn contains(&self, k: C) -> bool {
        k.re >= self.x0 && k.re <= self.x1 && k.im >= self.y0 && k.im <= self.y1
    }

    fn center(&self) -> C {
        C::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn split(&self, fx: f64, fy: f64) -> [Cell; 4] {
        let xm = self.x0 + fx * (self.x1 - self.x0);
        let ym = self.y0 + fy * (self.y1 - self.y0);
        [
            Cell { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Cell { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Cell { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
            Cell { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
        ]
    }
}

const MIN_CELL: f64 = 1e-6;
const MIN_SEGMENT: f64 = 1e-10;

/// Argument-principle bookkeeping for one region; caches values and edge increments.
struct Winder<'a> {
    f: &'a dyn Dispersion,
    cap: f64,
    vals: RefCell<HashMap<(u64, u64), C>>,
    edges: RefCell<HashMap<[u64; 4], f64>>,
    fine: bool,
}

impl<'a> Winder<'a> {
    fn new(f: &'a dyn Dispersion, cap: f64) -> Self {
        Self { f, cap, vals: RefCell::new(HashMap::new()), edges: RefCell::new(HashMap::new()), fine: false }
    }

    fn value(&self, p: C) -> Result<C> {
        if let Some(v) = self.vals.borrow().get(&key(p)) {
            return Ok(*v);
        }
        // Near the origin D is small and the rough value has no correct digits.
        let v = if self.fine || p.norm() * self.f.length_scale() < 0.3 { self.f.eval(p)? } else { self.f.eval_rough(p)? };
        if v == C::new(0.0, 0.0) || !v.is_finite() {
            return Err(Error::ContourThroughZero(format!("{p}")));
        }
        self.vals.borrow_mut().insert(key(p), v);
        Ok(v)
    }

    /// Continuous change of arg f along the segment p -> q.
    fn edge(&self, p: C, q: C) -> Result<f64> {
        let (a, b, sign) = if lex_less(p, q) { (p, q, 1.0) } else { (q, p, -1.0) };
        let kk = [a.re.to_bits(), a.im.to_bits(), b.re.to_bits(), b.im.to_bits()];
        if let Some(v) = self.edges.borrow().get(&kk) {
            return Ok(sign * v);
        }
        let (fa, fb) = (self.value(a)?, self.value(b)?);
        let v = self.increment(a, fa, b, fb)?;
        self.edges.borrow_mut().insert(kk, v);
        Ok(sign * v)
    }

    /// Accepts a segment when both halves turn by at most pi/8 and |f| has no
    /// deep dip at the midpoint; a zero passing close to the segment fails
    /// one of the two tests even when the end points alone look benign.
    fn increment(&self, p: C, fp: C, q: C, fq: C) -> Result<f64> {
        let len = (q - p).norm();
        if len < MIN_SEGMENT {
            return Err(Error::ContourThroughZero(format!("{}", 0.5 * (p + q))));
        }
        let m = 0.5 * (p + q);
        let fm = self.value(m)?;
        let (d1, d2) = ((fm / fp).arg(), (fq / fm).arg());
        let dip = fm.norm() < 0.5 * fp.norm().min(fq.norm());
        if len <= self.cap && d1.abs() <= PI / 8.0 && d2.abs() <= PI / 8.0 && !dip {
            return Ok(d1 + d2);
        }
        Ok(self.increment(p, fp, m, fm)? + self.increment(m, fm, q, fq)?)
    }

    fn winding(&self, c: &Cell) -> Result<u32> {
        let k = c.corners();
        let mut total = 0.0;
        for i in 0..4 {
            total += self.edge(k[i], k[(i + 1) % 4])?;
        }
        let w = total / (2.0 * PI);
        let r = w.round();
        if (w - r).abs() > 1e-3 || r < 0.0 {
            return Err(Error::NonIntegerWinding(w));
        }
        Ok(r as u32)
    }

    /// Winding of f around a small circle (polygon with `n` vertices).
    fn circle_winding(&self, center: C, r: f64, n: usize) -> Result<f64> {
        let pts: Vec<C> = (0..n).map(|j| center + C::from_polar(r, 2.0 * PI * j as f64 / n as f64)).collect();
        let mut total = 0.0;
        for j in 0..n {
            total += self.edge(pts[j], pts[(j + 1) % n])?;
        }
        Ok(total / (2.0 * PI))
    }

    /// Newton with multiplicity `m`, from `k0`; returns the limit if it converged.
    /// Near a multiple zero the iteration stalls at the noise floor of D, which
    /// is accepted once the steps stop shrinking.
    fn newton(&self, k0: C, m: u32) -> Option<C> {
        let mut k = k0;
        let scale = 1.0 / self.f.length_scale();
        let mut prev = f64::INFINITY;
        for _ in 0..60 {
            let (v, dv) = self.f.eval_dk(k).ok()?;
            if v == C::new(0.0, 0.0) {
                return Some(k);
            }
            if dv == C::new(0.0, 0.0) || !dv.is_finite() {
                return None;
            }
            let step = m as f64 * v / dv;
            let size = step.norm();
            if size <= 1e-14 * k.norm().max(scale) {
                return Some(k - step);
            }
            if size > 0.5 * prev && size < 1e-6 * k.norm().max(scale) {
                return Some(k);
            }
            k -= step;
            if !k.is_finite() {
                return None;
            }
            prev = size;
        }
        None
    }

    fn resolve(&self, c: Cell, m: u32, frac: (f64, f64), out: &mut Vec<(C, u32)>) -> Result<()> {
        if m == 0 {
            return Ok(());
        }
        let origin = C::new(0.0, 0.0);
        if c.contains(origin) {
            // D is even, so a zero at the origin is expected; test it directly.
            let r = 0.5 * (-c.x0).min(c.x1).min(-c.y0).min(c.y1);
            if r * self.f.length_scale() > 1e-4 {
                let check = Winder { fine: true, ..Winder::new(self.f, r) };
                let w0 = check.circle_winding(origin, r, 16)?;
                if (w0 - m as f64).abs() < 1e-3 {
                    out.push((origin, m));
                    return Ok(());
                }
            }
        }
        if let Some(k) = self.newton(c.center(), m) {
            if c.contains(k) {
                if m == 1 {
                    out.push((k, 1));
                    return Ok(());
                }
                let r = (0.25 * c.size()).min(1e-3 / self.f.length_scale()).max(1e-9);
                let check = Winder { fine: true, ..Winder::new(self.f, r) };
                if let Ok(w) = check.circle_winding(k, r, 16) {
                    if (w - m as f64).abs() < 1e-3 {
                        out.push((k, m));
                        return Ok(());
                    }
                }
            }
        }
        if c.size() < MIN_CELL {
            out.push((self.newton(c.center(), m).filter(|k| c.contains(*k)).unwrap_or(c.center()), m));
            return Ok(());
        }
        let mut found = 0;
        for sub in c.split(frac.0, frac.1) {
            let w = self.winding(&sub)?;
            found += w;
            self.resolve(sub, w, frac, out)?;
        }
        if found != m {
            return Err(Error::ContourThroughZero(format!("cell {:?} lost zeros ({found} of {m})", c)));
        }
        Ok(())
    }
}

/// Finds all zeros of `d` in the window, with multiplicities from winding numbers.
pub fn find_eigenvalues(d: &dyn Dispersion, window: SearchWindow) -> Result<EigenvalueSet> {
    let len = d.length_scale();
    // A function that vanishes identically has no isolated zeros to count.
    let probes = [C::new(0.37 / len, 0.11 / len), C::new(1.3 / len, 0.0), C::new(2.9 / len, -0.7 / len)];
    let mut big = 0.0f64;
    for p in probes {
        big = big.max(d.eval(p)?.norm());
    }
    if big < 1e-13 {
        return Err(Error::GammaZero);
    }
    let mut last = None;
    for attempt in 0..4 {
        match search(d, window, attempt) {
            Ok(z) => return finish(d, window, z),
            Err(e @ Error::ContourThroughZero(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn search(d: &dyn Dispersion, window: SearchWindow, attempt: usize) -> Result<Vec<(C, u32)>> {
    let len = d.length_scale();
    let shifts = [0.0, 0.0173, -0.0291, 0.0437];
    let fracs = [(0.4913, 0.5087), (0.5311, 0.4689), (0.4607, 0.5393), (0.5127, 0.4873)];
    let frac = fracs[attempt];
    let x0 = -0.0137 / len * (1.0 + shifts[attempt]);
    let x1 = window.k_max * (1.0 + 0.37 * shifts[attempt]);
    let y1 = window.im_band * (1.0 + 0.53 * shifts[attempt]);
    let nx = ((x1 - x0) * len / 4.0).ceil().max(1.0) as usize;
    let ny = ((2.0 * y1) * len / 4.0).ceil().max(1.0) as usize;
    let cap = 0.25 * len;
    let hx = (x1 - x0) / nx as f64;
    let hy = 2.0 * y1 / ny as f64;
    // Grid lines avoid the real axis by construction through the odd offset.
    let off = frac.1 - 0.5;
    let cells: Vec<Cell> = (0..nx)
        .flat_map(|i| {
            (0..ny).map(move |j| {
                let ya = -y1 + hy * (j as f64 + if j == 0 { 0.0 } else { off });
                let yb = -y1 + hy * (j as f64 + 1.0 + if j + 1 == ny { 0.0 } else { off });
                Cell { x0: x0 + hx * i as f64, x1: x0 + hx * (i + 1) as f64, y0: ya, y1: yb }
            })
        })
        .collect();
    let parts: Vec<Vec<(C, u32)>> = cells
        .par_iter()
        .map(|c| {
            let w = Winder::new(d, cap);
            let m = w.winding(c)?;
            let mut out = Vec::new();
            w.resolve(*c, m, frac, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn same(p: C, q: C, scale: f64) -> bool {
    (p - q).norm() <= 1e-7 * p.norm().max(scale)
}

fn finish(d: &dyn Dispersion, window: SearchWindow, raw: Vec<(C, u32)>) -> Result<EigenvalueSet> {
    let len = d.length_scale();
    let scale = 1.0 / len;
    let tol = 1e-8 * scale;
    let mut d_order = 0u32;
    let mut reps: Vec<Eigenvalue> = Vec::new();
    for (k, m) in raw {
        if k.norm() < 1e-5 * scale {
            if m % 2 != 0 {
                return Err(Error::NonIntegerWinding(m as f64 / 2.0));
            }
            d_order += m / 2;
            continue;
        }
        let re = if k.re.abs() <= tol { 0.0 } else { k.re };
        let im = if k.im.abs() <= tol * k.norm().max(1.0) { 0.0 } else { k.im };
        if re < 0.0 || im < 0.0 {
            continue;
        }
        let k = C::new(re, im);
        if !reps.iter().any(|z| same(z.k, k, scale)) {
            reps.push(Eigenvalue { k, multiplicity: m });
        }
    }
    let mut zeros = Vec::new();
    for z in &reps {
        let k = z.k;
        for cand in [k, k.conj(), -k, -k.conj()] {
            if !zeros.iter().any(|e: &Eigenvalue| same(e.k, cand, scale)) {
                zeros.push(Eigenvalue { k: cand, multiplicity: z.multiplicity });
            }
        }
    }
    zeros.sort_by(|p, q| {
        (p.k.norm(), p.k.re, p.k.im).partial_cmp(&(q.k.norm(), q.k.re, q.k.im)).unwrap_or(std::cmp::Ordering::Equal)
    });
    let kmin = zeros.iter().map(|z| z.k.norm()).fold(f64::INFINITY, f64::min);
    let radius = (1.0 / len).min(0.5 * kmin);
    let (d_circle, gamma) = extract_gamma_d(d, radius)?;
    if d_circle != d_order {
        return Err(Error::IdentityMismatch(format!(
            "order at the origin from the search ({d_order}) differs from the probe circle ({d_circle})"
        )));
    }
    Ok(EigenvalueSet { d: d_order, zeros, gamma, window })
}

/// d from the winding number of D on |k| = r (which counts 2d), and
/// gamma = (1/2 pi i) ∮ D(k)/k^{2d+1} dk by the trapezoid rule on 64 points.
pub fn extract_gamma_d(d: &dyn Dispersion, probe_radius: f64) -> Result<(u32, f64)> {
    let w = Winder { fine: true, ..Winder::new(d, probe_radius) };
    let wind = w.circle_winding(C::new(0.0, 0.0), probe_radius, 64)?;
    let r = wind.round();
    if (wind - r).abs() > 1e-3 || r < 0.0 || (r as i64) % 2 != 0 {
        return Err(Error::NonIntegerWinding(wind / 2.0));
    }
    let order = (r as u32) / 2;
    let n = 64;
    let vals: Vec<C> = (0..n)
        .into_par_iter()
        .map(|j| {
            let k = C::from_polar(probe_radius, 2.0 * PI * (j as f64 + 0.5) / n as f64);
            d.eval(k).map(|v| v / k.powu(2 * order))
        })
        .collect::<Result<_>>()?;
    let g = vals.iter().sum::<C>() / n as f64;
    if g.im.abs() > 1e-8 * g.re.abs().max(1.0) {
        return Err(Error::IdentityMismatch(format!("gamma has imaginary part {:e}", g.im)));
    }
    if g.re == 0.0 {
        return Err(Error::GammaZero);
    }
    Ok((order, g.re))
}

/// Truncated product k^{2d} ∏ (1 - k^2/k_n^2)^{m_n} over the first
/// `truncation` representative zeros. The second value estimates the
/// truncation error as |E| |k^2| Σ m_n/|k_n|^2 over the last half of the
/// factors used, which is the size of the omitted tail for zeros growing
/// linearly in n.
pub fn evaluate_e(es: &EigenvalueSet, k: C, truncation: usize) -> (C, f64) {
    let reps = es.representatives();
    let n = truncation.min(reps.len());
    let mut e = k.powu(2 * es.d);
    for z in &reps[..n] {
        e *= (1.0 - k * k / (z.k * z.k)).powu(z.multiplicity);
    }
    let tail: f64 = reps[n / 2..n].iter().map(|z| z.multiplicity as f64 / z.k.norm_sqr()).sum();
    (e, e.norm() * k.norm_sqr() * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{example_profile, ExampleName, ExampleParams};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn trivial_medium_has_zero_dispersion() {
        let p = RadialProfile::constant(1.0);
        for k in [0.0, 0.5, 3.0, 17.0] {
            assert!(dispersion_d(&p, c(k, 0.0)).unwrap().norm() < 1e-13);
        }
        let w = WaveDispersion::new(&p, IntegratorConfig::default());
        assert_eq!(find_eigenvalues(&w, SearchWindow::for_length(1.0)), Err(Error::GammaZero));
    }

    #[test]
    fn ex62_first_matches_closed_form() {
        let p = example_profile(ExampleName::Ex62First, ExampleParams::default()).unwrap();
        let cf = p.closed_form().unwrap();
        for k in [0.0, 0.05, 3.0, 11.0] {
            let k = c(k, 0.0);
            let v = dispersion_d_checked(&p, k, 1e-9).unwrap();
            assert!((v - cf.dispersion(k)).norm() < 1e-10, "{k}: {v} vs {}", cf.dispersion(k));
        }
        let k: f64 = 3.0;
        let lit = ((k / 2.0).cos() - (1.5 * k).cos() - 2.0 * k * (k / 2.0).sin()) / (4.0 * k * k);
        assert!((cf.dispersion(c(k, 0.0)).re - lit).abs() < 1e-14);
    }

    #[test]
    fn delta_potential_dispersion() {
        let v = Potential::delta_at_edge(1.0, 2.0);
        let k = PI / 2.0;
        let d = dispersion_d_schrodinger_checked(&v, c(k, 0.0), 1e-9).unwrap();
        assert!((d.re - 8.0 / (PI * PI)).abs() < 1e-12);
        let w = SchrodingerDispersion::new(&v, IntegratorConfig::default());
        let (val, der) = w.eval_dk(c(PI, 0.0)).unwrap();
        assert!(val.norm() < 1e-12 && der.norm() < 1e-10);
    }

    #[test]
    fn variational_derivative_of_d() {
        let p = example_profile(ExampleName::Ex63, ExampleParams::default()).unwrap();
        let w = WaveDispersion::new(&p, IntegratorConfig::default());
        let k = c(4.1, 0.7);
        let (_, dv) = w.eval_dk(k).unwrap();
        let h = 1e-5;
        let fd = (w.eval(k + h).unwrap() - w.eval(k - h).unwrap()) / (2.0 * h);
        assert!((dv - fd).norm() < 1e-7 * dv.norm().max(1.0));
    }

    #[test]
    fn zeros_of_closed_form_ex62() {
        let cf = ClosedFormDispersion {
            form: example_profile(ExampleName::Ex62Second, ExampleParams::default()).unwrap().closed_form().unwrap(),
            b: 1.0,
        };
        let es = find_eigenvalues(&cf, SearchWindow { k_max: 20.0, im_band: 6.0 }).unwrap();
        assert_eq!(es.d, 1);
        assert!((es.gamma - 1.0 / 6.0).abs() < 1e-9);
        let real = es.real_positive();
        assert!(real.len() >= 3);
        for (n, z) in real.iter().take(3).enumerate() {
            assert!((z.k.re - 2.0 * PI * (n + 1) as f64).abs() < 1e-8);
            assert_eq!(z.multiplicity, 1);
        }
        let (e, _) = evaluate_e(&es, c(2.0 * PI, 0.0), 100);
        assert_eq!(e, c(0.0, 0.0));
        assert_eq!(evaluate_e(&es, c(0.0, 0.0), 10).0, c(0.0, 0.0));
    }

    #[test]
    fn double_zeros_of_delta_potential() {
        let cf = FnDispersion { f: |k: C| Ok(2.0 * sinc(k) * sinc(k)), scale: 1.0 };
        let es = find_eigenvalues(&cf, SearchWindow { k_max: 10.0, im_band: 3.0 }).unwrap();
        assert_eq!(es.d, 0);
        assert!((es.gamma - 2.0).abs() < 1e-10);
        let real = es.real_positive();
        assert_eq!(real.len(), 3);
        for (n, z) in real.iter().enumerate() {
            assert_eq!(z.multiplicity, 2);
            assert!((z.k.re - PI * (n + 1) as f64).abs() < 1e-6);
        }
    }
}
