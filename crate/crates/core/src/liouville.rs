//! Travel-time coordinate and the Liouville transformation between
//! psi'' + k^2 rho psi = 0 and the Schrödinger equation.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::ode::{IntegratorConfig, WaveSolver};
use crate::profiles::{PointPart, Potential, PotentialKind, PotentialPiece, RadialProfile};
use crate::quad::{gk15, integrate, QuadTol};

type Rate = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const KNOTS: usize = 2048;

/// s(t) = ∫_0^t r with r > 0, tabulated at knots and evaluated exactly in between.
#[derive(Clone)]
struct MonotoneMap {
    t: Vec<f64>,
    s: Vec<f64>,
    rate: Rate,
    guess: Pchip,
}

impl MonotoneMap {
    fn new(rate: Rate, end: f64, breaks: &[f64]) -> Result<Self> {
        let mut t: Vec<f64> = (0..=KNOTS).map(|i| end * i as f64 / KNOTS as f64).collect();
        t.extend(breaks.iter().copied().filter(|&x| x > 0.0 && x < end));
        t.sort_by(|a, b| a.partial_cmp(b).unwrap());
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * end);
        let tol = QuadTol::default();
        let mut s = vec![0.0; t.len()];
        for i in 1..t.len() {
            let r = &rate;
            s[i] = s[i - 1] + integrate(|x| r(x), t[i - 1], t[i], &[], tol)?;
        }
        for i in 1..s.len() {
            if !(s[i] > s[i - 1]) {
                return Err(Error::QuadratureFailure { lo: t[i - 1], hi: t[i] });
            }
        }
        let guess = Pchip::new(s.clone(), t.clone());
        Ok(Self { t, s, rate, guess })
    }

    fn end(&self) -> (f64, f64) {
        (*self.t.last().unwrap(), *self.s.last().unwrap())
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.t.partition_point(|&v| v <= x).saturating_sub(1).min(self.t.len() - 2);
        let (lo, hi) = (self.t[i], x);
        if hi == lo {
            return self.s[i];
        }
        let r = &self.rate;
        self.s[i] + gk15(&|t| r(t), lo, hi).0
    }

    fn inverse(&self, s: f64) -> f64 {
        let (t_end, s_end) = self.end();
        if s <= 0.0 {
            return 0.0;
        }
        if s >= s_end {
            return t_end;
        }
        let j = self.s.partition_point(|&v| v <= s).saturating_sub(1).min(self.s.len() - 2);
        let (mut lo, mut hi) = (self.t[j], self.t[j + 1]);
        let mut t = self.guess.eval(s).clamp(lo, hi);
        for _ in 0..60 {
            let f = self.eval(t) - s;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / (self.rate)(t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() <= 1e-15 * t_end.max(t.abs());
            t = next;
            if done || hi - lo <= 1e-15 * t_end {
                break;
            }
        }
        t
    }
}

/// The monotone map x -> y with y(x) = ∫_0^x sqrt(rho), extended by
/// y = x - b + a beyond b.
#[derive(Clone)]
pub struct TravelTimeMap {
    map: MonotoneMap,
    x_to_y: bool,
    a: f64,
    b: f64,
}

impl std::fmt::Debug for TravelTimeMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TravelTimeMap").field("a", &self.a).field("b", &self.b).finish()
    }
}

impl TravelTimeMap {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// y(x).
    pub fn forward(&self, x: f64) -> f64 {
        if x >= self.b {
            return x - self.b + self.a;
        }
        if x <= 0.0 {
            return x;
        }
        if self.x_to_y {
            self.map.eval(x)
        } else {
            self.map.inverse(x)
        }
    }

    /// x(y).
    pub fn inverse(&self, y: f64) -> f64 {
        if y >= self.a {
            return y - self.a + self.b;
        }
        if y <= 0.0 {
            return y;
        }
        if self.x_to_y {
            self.map.inverse(y)
        } else {
            self.map.eval(y)
        }
    }

    /// dy/dx at x (right-sided at kinks).
    pub fn rate(&self, x: f64) -> f64 {
        if x >= self.b {
            return 1.0;
        }
        if self.x_to_y {
            (self.map.rate)(x)
        } else {
            1.0 / (self.map.rate)(self.forward(x))
        }
    }
}

/// y(x) = ∫_0^x sqrt(rho) with nodes at the profile breakpoints.
pub fn travel_time(p: &RadialProfile) -> Result<TravelTimeMap> {
    let q = Arc::new(p.clone());
    let rate: Rate = Arc::new(move |x| q.rho(x).sqrt());
    let map = MonotoneMap::new(rate, p.b(), p.breakpoints())?;
    let a = map.end().1;
    Ok(TravelTimeMap { map, x_to_y: true, a, b: p.b() })
}

/// Builds x(y) = ∫_0^y ds / f0(s)^2 on [0, a] from the zero-energy Jost solution.
pub fn invert_travel_time<F>(f0: F, a: f64, breaks: &[f64]) -> Result<TravelTimeMap>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if !(a > 0.0) {
        return Err(Error::BadParams(format!("support bound must be positive, got {a}")));
    }
    for i in 0..=4096 {
        let y = a * i as f64 / 4096.0;
        let v = f0(y);
        if !(v > 0.0) {
            return Err(Error::NonPositiveJost { y, value: v });
        }
    }
    let rate: Rate = Arc::new(move |y| {
        let v = f0(y);
        1.0 / (v * v)
    });
    let map = MonotoneMap::new(rate, a, breaks)?;
    let b = map.end().1;
    Ok(TravelTimeMap { map, x_to_y: false, a, b })
}

/// V(y) = rho''/(4 rho^2) - 5 rho'^2/(16 rho^3) at x.
fn v_of_x(r: (f64, f64, f64)) -> f64 {
    let (rho, d1, d2) = r;
    d2 / (4.0 * rho * rho) - 5.0 * d1 * d1 / (16.0 * rho * rho * rho)
}

/// Schrödinger potential of a profile. Each jump of rho' becomes a point part.
pub fn to_potential(p: &RadialProfile) -> Result<Potential> {
    let map = travel_time(p)?;
    to_potential_with(p, &map)
}

pub fn to_potential_with(p: &RadialProfile, map: &TravelTimeMap) -> Result<Potential> {
    let a = map.a();
    let mut nodes = vec![0.0];
    nodes.extend_from_slice(p.breakpoints());
    let pieces_x = p.pieces();
    let mut pieces = Vec::new();
    for w in nodes.windows(2) {
        let (xl, xh) = (w[0], w[1]);
        let (yl, yh) = (map.forward(xl), map.forward(xh));
        let mid = 0.5 * (xl + xh);
        let seg = pieces_x.iter().position(|s| mid >= s.0 && mid <= s.1).unwrap_or(0);
        let kind = if pieces_x[seg].2 {
            PotentialKind::Constant { value: 0.0 }
        } else {
            let n = ((4096.0 * (yh - yl) / a).ceil() as usize).max(64) + 1;
            let values: Vec<f64> = (0..n)
                .map(|i| {
                    let y = yl + (yh - yl) * i as f64 / (n - 1) as f64;
                    let x = map.inverse(y).clamp(xl, xh);
                    v_of_x(segment_eval3(p, x, xl, xh))
                })
                .collect();
            if values.iter().all(|v| v.abs() < 1e-11) {
                PotentialKind::Constant { value: 0.0 }
            } else {
                PotentialKind::Samples { values }
            }
        };
        pieces.push(PotentialPiece { lo: yl, hi: yh.min(a), kind });
    }
    let mut points = Vec::new();
    for &x in p.breakpoints() {
        let (rho, dl, _) = p.eval3_left(x);
        let dr = if x >= p.b() { 0.0 } else { p.eval3(x).1 };
        let w = (dr - dl) / (4.0 * rho.powf(1.5));
        if w.abs() > 1e-12 {
            points.push(PointPart { y: map.forward(x).min(a), weight: w });
        }
    }
    Potential::new(a, pieces, points)
}

/// rho and derivatives from the segment that covers [xl, xh], including its end points.
fn segment_eval3(p: &RadialProfile, x: f64, xl: f64, xh: f64) -> (f64, f64, f64) {
    if x <= xl {
        p.eval3(xl)
    } else if x >= xh {
        p.eval3_left(xh)
    } else {
        p.eval3(x)
    }
}

/// rho(x)^{1/4} e^{-ik(b-a)} f(x;k), which equals the Schrödinger Jost solution at y(x).
pub fn transform_jost(p: &RadialProfile, map: &TravelTimeMap, k: Complex64, x: f64, cfg: &IntegratorConfig) -> Result<Complex64> {
    let f = WaveSolver::new(p, *cfg).jost(k, x)?.value;
    let phase = (-Complex64::i() * k * (p.b() - map.a())).exp();
    Ok(p.rho(x).powf(0.25) * phase * f)
}

/// Max of |u'' - V u| with u(y) = rho(x(y))^{1/4} on interior points of the smooth pieces.
pub fn liouville_residual(p: &RadialProfile, map: &TravelTimeMap) -> f64 {
    let a = map.a();
    let h = 0.01 * a;
    let u = |y: f64| p.rho(map.inverse(y)).powf(0.25);
    let mut ys = vec![0.0];
    ys.extend(p.breakpoints().iter().map(|&x| map.forward(x)));
    let mut worst = 0.0f64;
    for w in ys.windows(2) {
        let (lo, hi) = (w[0] + 3.0 * h, w[1] - 3.0 * h);
        if hi <= lo {
            continue;
        }
        let n = ((hi - lo) / h).ceil() as usize;
        for i in 0..=n {
            let y = lo + (hi - lo) * i as f64 / n.max(1) as f64;
            let d2 = (2.0 * (u(y - 3.0 * h) + u(y + 3.0 * h)) - 27.0 * (u(y - 2.0 * h) + u(y + 2.0 * h))
                + 270.0 * (u(y - h) + u(y + h))
                - 490.0 * u(y))
                / (180.0 * h * h);
            let x = map.inverse(y);
            let v = v_of_x(p.eval3(x));
            worst = worst.max((d2 - v * u(y)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::SchrodingerSolver;
    use crate::profiles::{bump_profile, example_profile, ExampleName, ExampleParams};

    #[test]
    fn identity_medium() {
        let p = RadialProfile::constant(1.0);
        let m = travel_time(&p).unwrap();
        assert!((m.a() - 1.0).abs() < 1e-14);
        assert!((m.forward(0.37) - 0.37).abs() < 1e-14);
        assert!((m.forward(2.5) - 2.5).abs() < 1e-14);
        let v = to_potential(&p).unwrap();
        assert!(v.is_zero());
        let inv = invert_travel_time(|_| 1.0, 1.0, &[]).unwrap();
        assert!((inv.inverse(0.61) - 0.61).abs() < 1e-14);
    }

    #[test]
    fn ex61_map_and_point_part() {
        let p = example_profile(ExampleName::Ex61, ExampleParams::default()).unwrap();
        let m = travel_time(&p).unwrap();
        assert!((m.forward(0.25) - 2.0 / 3.0).abs() < 1e-10);
        assert!((m.a() - 1.5).abs() < 1e-12);
        assert!((m.inverse(2.0 / 3.0) - 0.25).abs() < 1e-12);
        let v = to_potential(&p).unwrap();
        assert!(v.smooth_sup_norm(2000) < 1e-9);
        assert_eq!(v.points.len(), 1);
        assert!((v.points[0].y - 1.0).abs() < 1e-12 && (v.points[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ex63_travel_time() {
        let p = example_profile(ExampleName::Ex63, ExampleParams::default()).unwrap();
        let m = travel_time(&p).unwrap();
        assert!((m.a() - 2.0 * 2f64.ln()).abs() < 1e-10 * m.a());
        for i in 0..50 {
            let x = i as f64 / 49.0;
            assert!((m.inverse(m.forward(x)) - x).abs() < 1e-12);
        }
        assert!(liouville_residual(&p, &m) < 1e-7);
    }

    #[test]
    fn linear_jost_inverts_to_ex61_map() {
        let m = invert_travel_time(|y| if y < 1.0 { 2.0 - y } else { 1.0 }, 1.5, &[1.0]).unwrap();
        for y in [0.1, 0.5, 0.9, 1.0] {
            assert!((m.inverse(y) - y / (2.0 * (2.0 - y))).abs() < 1e-12);
        }
        assert!((m.b() - 1.0).abs() < 1e-12);
        assert!(matches!(invert_travel_time(|y| 1.0 - y, 2.0, &[]), Err(Error::NonPositiveJost { .. })));
    }

    #[test]
    fn two_jost_paths_agree() {
        let cfg = IntegratorConfig::default();
        for p in [
            example_profile(ExampleName::Ex61, ExampleParams::default()).unwrap(),
            bump_profile(1.0, 0.6, 0.5, 0.4).unwrap(),
        ] {
            let m = travel_time(&p).unwrap();
            let v = to_potential_with(&p, &m).unwrap();
            let s = SchrodingerSolver::new(&v, cfg);
            let k = Complex64::new(2.0, 0.0);
            for x in [0.0, 0.3, 0.8] {
                let lhs = transform_jost(&p, &m, k, x, &cfg).unwrap();
                let rhs = s.jost(k, m.forward(x)).unwrap().value;
                assert!((lhs - rhs).norm() < 1e-8, "{lhs} {rhs}");
            }
        }
    }
}
