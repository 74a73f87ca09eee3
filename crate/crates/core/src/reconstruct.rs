//! End-to-end inverse pipelines and regime classification.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{extract_gamma_d, sample_dispersion, Dispersion, SchrodingerDispersion, WaveDispersion};
use crate::interp::lagrange4_uniform;
use crate::marchenko::{
    bound_states, solve_extrapolated, KernelSamples, MarchenkoSolution, RhJost, ScatteringData, DEFAULT_STEPS,
};
use crate::ode::IntegratorConfig;
use crate::profiles::{example_profile, ExampleName, ExampleParams, Potential, RadialProfile};
use crate::quad::gauss_legendre;
use crate::rh::{fit_sine_tail, CauchySolver, JumpData};
use crate::samples::{SpectralSamples, Symmetry};

/// Which inverse problem the data belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ALtB,
    AEqB,
    Schrodinger,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ALtB => "a_lt_b",
            Regime::AEqB => "a_eq_b",
            Regime::Schrodinger => "schrodinger",
        }
    }
}

/// Tunables shared by the pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Nyström steps across [0, a] before extrapolation halves the grid.
    pub nystrom_steps: usize,
    /// Minimum number of radians `K(b-a)` the grid must span.
    pub min_oscillation: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { nystrom_steps: DEFAULT_STEPS, min_oscillation: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub stage: String,
    pub value: f64,
}

/// Output of one pipeline.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub regime: Regime,
    /// Recovered `ρ` on `[0, b]` for the wave pipelines.
    pub profile: Option<RadialProfile>,
    /// Recovered potential in the travel-time coordinate.
    pub potential: Potential,
    pub gamma_recovered: f64,
    pub a_recovered: f64,
    /// `f̃(0;k)` on the input grid.
    pub f0: SpectralSamples,
    pub marchenko: MarchenkoSolution,
    pub diagnostics: Vec<Diagnostic>,
}

impl ReconstructionResult {
    pub fn diagnostic(&self, stage: &str) -> Option<f64> {
        self.diagnostics.iter().find(|d| d.stage == stage).map(|d| d.value)
    }
}

fn push(diag: &mut Vec<Diagnostic>, stage: &str, value: f64) {
    diag.push(Diagnostic { stage: stage.into(), value });
}

fn check_even(s: &SpectralSamples) -> Result<()> {
    if s.symmetry != Symmetry::EvenInK {
        return Err(Error::BadGrid("dispersion samples must be declared even in k".into()));
    }
    s.uniform_spacing()?;
    Ok(())
}

fn is_zero(s: &SpectralSamples) -> bool {
    s.values.iter().all(|v| v.norm() == 0.0)
}

fn rms(k: &[f64], y: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let (mut s, mut n, mut lk) = (0.0, 0usize, 0.0);
    for (kk, v) in k.iter().zip(y) {
        if *kk >= lo && *kk <= hi {
            s += v * v;
            lk += kk.ln();
            n += 1;
        }
    }
    ((s / n.max(1) as f64).sqrt(), lk / n.max(1) as f64)
}

/// Envelope decay exponent `p` of `k D(k) ~ k^p` between `[0.35K, 0.5K]`
/// and `[0.7K, K]`.
pub fn envelope_exponent(d: &SpectralSamples) -> f64 {
    let kmax = d.k_max();
    let y: Vec<f64> = d.k.iter().zip(&d.values).map(|(k, v)| k * v.re).collect();
    let (r1, l1) = rms(&d.k, &y, 0.35 * kmax, 0.5 * kmax);
    let (r2, l2) = rms(&d.k, &y, 0.7 * kmax, kmax);
    (r2 / r1).ln() / (l2 - l1)
}

/// Decides between `a < b`, `a = b` and the unsupported `a > b` from the
/// large-`k` behaviour of `D`.
///
/// `k D(k)` either oscillates with a constant envelope, in which case
/// `D ≈ sin(k(b-a)) / (k ρ(0)^{1/4})` and the sign of the fitted amplitude is
/// the sign of `b - a`, or decays like `1/k` when `a = b`.
pub fn classify_regime(d: &SpectralSamples, b: f64) -> Result<Regime> {
    check_even(d)?;
    if is_zero(d) {
        return Err(Error::GammaZero);
    }
    let p = envelope_exponent(d);
    if p < -0.7 {
        return Ok(Regime::AEqB);
    }
    if p <= -0.3 || !p.is_finite() {
        return Err(Error::Ambiguous(p));
    }
    let fit = fit_sine_tail(d, b).map_err(|_| Error::Ambiguous(p))?;
    if fit.amplitude > 0.0 {
        Ok(Regime::ALtB)
    } else {
        Err(Error::Unsupported(-fit.length))
    }
}

/// Conjugate-symmetric samples `1 + values`.
fn jost_samples(k: &[f64], values: Vec<C>) -> Result<SpectralSamples> {
    let n = values.len();
    let sym: Vec<C> = (0..n).map(|i| 1.0 + 0.5 * (values[i] + values[n - 1 - i].conj())).collect();
    SpectralSamples::new(k.to_vec(), sym, Symmetry::ConjugateSymmetric)
}

fn marchenko_stage(
    f0: &SpectralSamples,
    a: f64,
    jost: Option<&RhJost>,
    cfg: PipelineConfig,
    diag: &mut Vec<Diagnostic>,
) -> Result<MarchenkoSolution> {
    let bs = match jost {
        Some(j) => bound_states(j, a)?,
        None => vec![],
    };
    push(diag, "bound_states", bs.len() as f64);
    let sd = ScatteringData::new(f0.clone(), bs, a)?;
    let unimod = sd.s.values.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
    push(diag, "scattering_unimodularity", unimod);
    let ks = KernelSamples::from_scattering(&sd, cfg.nystrom_steps)?;
    solve_extrapolated(&ks)
}

/// `ρ(x(y)) = f̃(y;0)^4` with `x(y) = ∫_0^y f̃(t;0)^{-2} dt`.
fn profile_from_jost(sol: &MarchenkoSolution, diag: &mut Vec<Diagnostic>) -> Result<RadialProfile> {
    let f = &sol.f0_zero;
    if let Some(bad) = f.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::NonPositiveJost { y: sol.y_grid[bad], value: f[bad] });
    }
    let h = sol.delta();
    let (gx, gw) = gauss_legendre(8);
    let mut x = vec![0.0; f.len()];
    for i in 1..f.len() {
        let (lo, hi) = (sol.y_grid[i - 1], sol.y_grid[i]);
        let cell: f64 = gx
            .iter()
            .zip(&gw)
            .map(|(t, w)| {
                let y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
                0.5 * (hi - lo) * w / lagrange4_uniform(f, 0.0, h, y).powi(2)
            })
            .sum();
        x[i] = x[i - 1] + cell;
    }
    let rho: Vec<f64> = f.iter().map(|v| v.powi(4)).collect();
    push(diag, "x_of_a", x[x.len() - 1]);
    RadialProfile::from_table(x, rho)
}

/// Leading coefficient `γ` of `D(k) ≈ γ k^{2d}` from the samples nearest `k = 0`.
pub fn estimate_gamma(d: &SpectralSamples) -> f64 {
    let mid = d.len() / 2;
    let m = 12.min(mid);
    let k: Vec<f64> = (0..m).map(|i| d.k[mid + i]).collect();
    let v: Vec<f64> = (0..m).map(|i| d.values[mid + i].re).collect();
    let deg = 5.min(m - 1);
    let a = nalgebra::DMatrix::from_fn(m, deg + 1, |r, c| k[r].powi(2 * c as i32));
    let coef = a.svd(true, true).solve(&nalgebra::DVector::from_vec(v), 1e-14).expect("svd with factors");
    let size: Vec<f64> = coef.iter().enumerate().map(|(j, c)| c.abs() * k[m - 1].powi(2 * j as i32)).collect();
    let scale = size.iter().fold(0.0f64, |s, x| s.max(*x));
    for (j, c) in coef.iter().enumerate() {
        if size[j] > 1e-4 * scale {
            return *c;
        }
    }
    0.0
}

/// Reconstruction for `a < b` from samples of `E(k) = D(k)/γ`.
pub fn reconstruct_a_lt_b(e: &SpectralSamples, b: f64) -> Result<ReconstructionResult> {
    reconstruct_a_lt_b_with(e, b, PipelineConfig::default())
}

pub fn reconstruct_a_lt_b_with(e: &SpectralSamples, b: f64, cfg: PipelineConfig) -> Result<ReconstructionResult> {
    check_even(e)?;
    if is_zero(e) {
        return Err(Error::GammaZero);
    }
    let mut diag = vec![];
    let fit = fit_sine_tail(e, b)?;
    let (len, amp) = (fit.length, 1.0 / fit.amplitude);
    push(&mut diag, "fit_b_minus_a", len);
    push(&mut diag, "fit_gamma_rho0_quarter", amp);
    push(&mut diag, "fit_explained_fraction", fit.explained);
    let span = e.k_max() * len;
    if span < cfg.min_oscillation {
        return Err(Error::BadGrid(format!(
            "K(b-a) = {span:.1} < {}; extend the grid to K >= {:.1}",
            cfg.min_oscillation,
            cfg.min_oscillation / len
        )));
    }
    // φ(k) = 2i[k E(k) γρ(0)^{1/4} - sin k(b-a)] is the jump of F(k) = e^{ik(b-a)} P(k)
    let phi = e.map(Symmetry::None, |k, v| C::new(0.0, 2.0) * (k * v.re * amp - (k * len).sin()));
    let jump = JumpData::new(phi, vec![len, 2.0 * b - len]);
    let solver = CauchySolver::new(&jump)?;
    let big_f = solver.on_grid();
    let p: Vec<C> = e.k.iter().zip(&big_f).map(|(&k, f)| C::new(0.0, -k * len).exp() * f).collect();
    let f0 = jost_samples(&e.k, p)?;
    let f00 = f0.values[f0.len() / 2].re;
    if !(f00 > 0.0) {
        return Err(Error::NonPositiveJost { y: 0.0, value: f00 });
    }
    let a = b - len;
    let sol = marchenko_stage(&f0, a, None, cfg, &mut diag)?;
    let profile = profile_from_jost(&sol, &mut diag)?;
    let rho0 = sol.f0_zero[0].powi(4);
    let gamma = amp / rho0.powf(0.25);
    push(&mut diag, "f0_at_zero_rh", f00);
    push(&mut diag, "f0_at_zero_marchenko", sol.f0_zero[0]);
    Ok(ReconstructionResult {
        regime: Regime::ALtB,
        profile: Some(profile),
        potential: sol.potential.clone(),
        gamma_recovered: gamma,
        a_recovered: a,
        f0,
        marchenko: sol,
        diagnostics: diag,
    })
}

/// Reconstruction for `a = b` from samples of `D(k)` (including `γ`).
pub fn reconstruct_a_eq_b(d: &SpectralSamples, b: f64) -> Result<ReconstructionResult> {
    reconstruct_a_eq_b_with(d, b, PipelineConfig::default())
}

pub fn reconstruct_a_eq_b_with(d: &SpectralSamples, b: f64, cfg: PipelineConfig) -> Result<ReconstructionResult> {
    check_even(d)?;
    let mut diag = vec![];
    let g = d.map(Symmetry::None, |k, v| C::new(0.0, 2.0 * k * v.re));
    let solver = CauchySolver::new(&JumpData::new(g, vec![2.0 * b]))?;
    let q = solver.on_grid();
    let im = d.map(Symmetry::None, |k, v| C::new(k * v.re, 0.0));
    let schwarz = CauchySolver::schwarz(&im, &[2.0 * b])?.on_grid();
    let agree = q.iter().zip(&schwarz).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    push(&mut diag, "schwarz_vs_cauchy", agree);
    let q0 = q[q.len() / 2].re;
    let f00 = 1.0 / (1.0 - q0);
    if !(q0 < 1.0) || !(f00 > 0.0) || !f00.is_finite() {
        return Err(Error::QZeroOutOfRange(q0));
    }
    push(&mut diag, "q_at_zero", q0);
    let f0 = jost_samples(&d.k, q.iter().map(|v| f00 * v).collect())?;
    let sol = marchenko_stage(&f0, b, None, cfg, &mut diag)?;
    let profile = profile_from_jost(&sol, &mut diag)?;
    Ok(ReconstructionResult {
        regime: Regime::AEqB,
        profile: Some(profile),
        potential: sol.potential.clone(),
        gamma_recovered: estimate_gamma(d),
        a_recovered: b,
        f0,
        marchenko: sol,
        diagnostics: diag,
    })
}

/// Reconstruction of a potential supported in `[0, a]` from samples of `D̃(k)`.
pub fn reconstruct_potential(dt: &SpectralSamples, a: f64) -> Result<ReconstructionResult> {
    reconstruct_potential_with(dt, a, PipelineConfig::default())
}

pub fn reconstruct_potential_with(dt: &SpectralSamples, a: f64, cfg: PipelineConfig) -> Result<ReconstructionResult> {
    check_even(dt)?;
    let mut diag = vec![];
    let g = dt.map(Symmetry::None, |k, v| C::new(0.0, 2.0 * k * v.re));
    let solver = CauchySolver::new(&JumpData::new(g, vec![2.0 * a]))?;
    let f0 = jost_samples(&dt.k, solver.on_grid())?;
    let jost = RhJost::new(solver, C::new(1.0, 0.0), &f0, a)?;
    let sol = marchenko_stage(&f0, a, Some(&jost), cfg, &mut diag)?;
    Ok(ReconstructionResult {
        regime: Regime::Schrodinger,
        profile: None,
        potential: sol.potential.clone(),
        gamma_recovered: estimate_gamma(dt),
        a_recovered: a,
        f0,
        marchenko: sol,
        diagnostics: diag,
    })
}

/// Comparison of two media with the same `E(k)` but different `(γ, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniquenessReport {
    pub b: f64,
    /// `max |E1 - E2| / max |E1|` over the probe points.
    pub max_relative_difference: f64,
    pub first: (f64, f64),
    pub second: (f64, f64),
    /// Same comparison for `c δ(y - a)` with `c = 1` and `c = 3`.
    pub delta_max_relative_difference: f64,
    pub delta_gammas: (f64, f64),
}

fn e_samples(d: &dyn Dispersion, r: f64, ks: &[f64]) -> Result<(f64, Vec<f64>)> {
    let (_, gamma) = extract_gamma_d(d, r)?;
    let e = ks.iter().map(|&k| d.eval(C::new(k, 0.0)).map(|v| v.re / gamma)).collect::<Result<_>>()?;
    Ok((gamma, e))
}

fn max_rel(x: &[f64], y: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale
}

/// Computes `E(k)` for the two example profiles that share it, by the
/// forward solver, on 200 points of `[0.1, 50]`.
pub fn demonstrate_nonuniqueness(b: f64) -> Result<NonuniquenessReport> {
    // Dividing by gamma = -b^3/24 magnifies the ODE error in D.
    let cfg = IntegratorConfig { rel_tol: 1e-13, abs_tol: 1e-16, ..IntegratorConfig::default() };
    let ks: Vec<f64> = (0..200).map(|i| 0.1 + (50.0 - 0.1) * i as f64 / 199.0).collect();
    let params = ExampleParams::with_b(b);
    let mut out = vec![];
    for name in [ExampleName::Ex62First, ExampleName::Ex62Second] {
        let p = example_profile(name, params)?;
        let map = crate::liouville::travel_time(&p)?;
        let w = WaveDispersion::new(&p, cfg);
        let (gamma, e) = e_samples(&w, 0.5 / b, &ks)?;
        out.push((gamma, map.a(), e));
    }
    let a = 1.0;
    let mut delta = vec![];
    for c in [1.0, 3.0] {
        let v = Potential::delta_at_edge(a, c);
        let w = SchrodingerDispersion::new(&v, cfg);
        delta.push(e_samples(&w, 0.5 / a, &ks)?);
    }
    Ok(NonuniquenessReport {
        b,
        max_relative_difference: max_rel(&out[0].2, &out[1].2),
        first: (out[0].0, out[0].1),
        second: (out[1].0, out[1].1),
        delta_max_relative_difference: max_rel(&delta[0].1, &delta[1].1),
        delta_gammas: (delta[0].0, delta[1].0),
    })
}

/// Samples `D` of a profile by the forward solver on `grid`.
pub fn forward_samples(p: &RadialProfile, grid: Vec<f64>) -> Result<SpectralSamples> {
    sample_dispersion(&WaveDispersion::new(p, IntegratorConfig::default()), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::ClosedFormDispersion;
    use crate::samples::uniform_grid;

    fn closed_form_samples(name: ExampleName, n: usize, k_max: f64) -> SpectralSamples {
        let p = example_profile(name, ExampleParams::default()).unwrap();
        let cf = ClosedFormDispersion { form: p.closed_form().unwrap(), b: 1.0 };
        sample_dispersion(&cf, uniform_grid(k_max, n)).unwrap()
    }

    #[test]
    fn regimes_of_the_examples() {
        let d = closed_form_samples(ExampleName::Ex62Second, 1 << 14 | 1, 500.0);
        assert_eq!(classify_regime(&d, 1.0).unwrap(), Regime::ALtB);
        let d = closed_form_samples(ExampleName::Ex61, 1 << 14 | 1, 500.0);
        match classify_regime(&d, 1.0) {
            Err(Error::Unsupported(l)) => assert!((l + 0.5).abs() < 1e-6, "{l}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_data_is_rejected_or_trivial() {
        let z = SpectralSamples::from_fn(uniform_grid(100.0, 1025), Symmetry::EvenInK, |_| Ok(C::new(0.0, 0.0))).unwrap();
        assert!(matches!(reconstruct_a_lt_b(&z, 1.0), Err(Error::GammaZero)));
        assert!(matches!(classify_regime(&z, 1.0), Err(Error::GammaZero)));
        let r = reconstruct_potential_with(&z, 1.0, PipelineConfig { nystrom_steps: 32, ..Default::default() }).unwrap();
        assert!(r.potential.is_zero());
        let r = reconstruct_a_eq_b_with(&z, 1.0, PipelineConfig { nystrom_steps: 32, ..Default::default() }).unwrap();
        let p = r.profile.unwrap();
        assert!((p.rho(0.3) - 1.0).abs() < 1e-12);
    }
}
