//! Wave-speed profiles rho(x) on [0, b] and half-line potentials V(y) on [0, a].
//!
//! Profiles are built from analytic segments so that integrators can put
//! nodes exactly on the places where smoothness fails.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{lagrange4_uniform, Pchip};

/// Analytic description of rho on one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    Constant { value: f64 },
    /// `coef * (shift + slope * x)^exponent`
    Power { coef: f64, shift: f64, slope: f64, exponent: f64 },
    /// `eps^4 / (eps * c * x + 1)^4`
    RationalEx61 { eps: f64, c: f64 },
    /// Monotone cubic through `(x, rho)`; every knot becomes a breakpoint.
    Table { x: Vec<f64>, rho: Vec<f64> },
    /// `base - amp * (1 + cos(pi (x - center) / width)) / 2` inside the bump, `base` outside.
    RaisedCosine { base: f64, amp: f64, center: f64, width: f64 },
    /// `sqrt(rho) = 1 + amp * sin(2 pi x / period) * sin^2(pi x / period)`.
    BalancedSine { amp: f64, period: f64 },
}

/// One segment as stored in profile files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

#[derive(Debug, Clone)]
struct Segment {
    spec: SegmentSpec,
    table: Option<Pchip>,
}

impl Segment {
    fn eval3(&self, x: f64) -> (f64, f64, f64) {
        match &self.spec.kind {
            SegmentKind::Constant { value } => (*value, 0.0, 0.0),
            SegmentKind::Power { coef, shift, slope, exponent } => power3(*coef, *shift, *slope, *exponent, x),
            SegmentKind::RationalEx61 { eps, c } => power3(eps.powi(4), 1.0, eps * c, -4.0, x),
            SegmentKind::Table { .. } => self.table.as_ref().expect("table segment").eval3(x),
            SegmentKind::RaisedCosine { base, amp, center, width } => {
                if (x - center).abs() >= *width {
                    return (*base, 0.0, 0.0);
                }
                let w = std::f64::consts::PI / width;
                let th = w * (x - center);
                (
                    base - amp * (1.0 + th.cos()) / 2.0,
                    amp * th.sin() * w / 2.0,
                    amp * th.cos() * w * w / 2.0,
                )
            }
            SegmentKind::BalancedSine { amp, period } => {
                let al = 2.0 * std::f64::consts::PI / period;
                let (s1, c1) = (al * x).sin_cos();
                let (s2, c2) = (2.0 * al * x).sin_cos();
                let s = 1.0 + 0.5 * amp * (s1 - 0.5 * s2);
                let ds = 0.5 * amp * al * (c1 - c2);
                let dds = 0.5 * amp * al * al * (-s1 + 2.0 * s2);
                (s * s, 2.0 * s * ds, 2.0 * ds * ds + 2.0 * s * dds)
            }
        }
    }

    fn rho(&self, x: f64) -> f64 {
        match &self.spec.kind {
            SegmentKind::Constant { value } => *value,
            SegmentKind::Power { coef, shift, slope, exponent } if exponent.fract() == 0.0 => {
                coef * (shift + slope * x).powi(*exponent as i32)
            }
            SegmentKind::RationalEx61 { eps, c } => eps.powi(4) * (1.0 + eps * c * x).powi(-4),
            _ => self.eval3(x).0,
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self.spec.kind, SegmentKind::Constant { .. })
    }
}

fn power3(coef: f64, shift: f64, slope: f64, e: f64, x: f64) -> (f64, f64, f64) {
    let u = shift + slope * x;
    let v = coef * u.powf(e);
    (v, v * e * slope / u, v * e * (e - 1.0) * slope * slope / (u * u))
}

/// Closed-form data attached to the built-in examples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// rho = eps^4/(eps c x + 1)^4 on [0, x0], 1 beyond.
    Rational { eps: f64, c: f64 },
    /// rho = (b + c)^2/(x + c)^2 on [0, b].
    Log { b: f64, c: f64 },
}

impl ClosedForm {
    pub fn a(&self, b: f64) -> f64 {
        match *self {
            ClosedForm::Rational { eps, c } => b + (eps - 1.0).powi(2) / (eps * c),
            ClosedForm::Log { b, c } => (b + c) * (1.0 + b / c).ln(),
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            ClosedForm::Rational { eps, c } => -(eps - 1.0).powi(4) / (3.0 * eps.powi(3) * c.powi(3)),
            ClosedForm::Log { b, c } => {
                let be = b / c;
                c.powi(3)
                    * (-2.0 / 3.0 * be.powi(3) - 3.0 * be * be - 2.0 * be + 2.0 * (1.0 + be).powi(2) * (1.0 + be).ln())
            }
        }
    }

    pub fn d(&self) -> u32 {
        1
    }

    /// Closed-form dispersion function.
    pub fn dispersion(&self, k: Complex64) -> Complex64 {
        match *self {
            ClosedForm::Rational { eps, c } => {
                let al = (eps - 1.0).powi(2) / (eps * c);
                let be = (eps * eps - 1.0) / (eps * c);
                if k.norm() * al.abs().max(be.abs()) < 0.5 {
                    return rational_series(eps, c, al, be, k);
                }
                c / (2.0 * eps * k * k) * ((k * al).cos() - (k * be).cos() - 2.0 * k / c * (k * al).sin())
            }
            ClosedForm::Log { b, c } => {
                let x = 1.0 + b / c;
                let l = x.ln();
                let s = (Complex64::new(1.0, 0.0) - 4.0 * (b + c).powi(2) * k * k).sqrt();
                let z = s * l / 2.0;
                let sq = x.sqrt();
                let phi = c * sq * l * shc(z);
                let dphi = c / (b + c) * sq * (l / 2.0 * shc(z) + z.cosh());
                sinc(k * b) * b * dphi - (k * b).cos() * phi
            }
        }
    }
}

/// Power series of the rational-family D about k = 0; the closed form
/// loses all digits to cancellation there.
fn rational_series(eps: f64, c: f64, al: f64, be: f64, k: Complex64) -> Complex64 {
    let k2 = k * k;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut kp = k2;
    let mut fact_2n_1 = 6.0; // (2n-1)! at n = 2
    for n in 2..40 {
        let fact_2n = fact_2n_1 * (2 * n) as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let coef = (al.powi(2 * n) - be.powi(2 * n)) / fact_2n
            + 2.0 / c * al.powi(2 * n - 1) / fact_2n_1;
        sum += sign * coef * kp;
        kp *= k2;
        fact_2n_1 = fact_2n * (2 * n + 1) as f64;
    }
    c / (2.0 * eps) * sum
}

/// sinh(z)/z, entire.
pub fn shc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0))
    } else {
        z.sinh() / z
    }
}

/// sin(z)/z, entire.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0))
    } else {
        z.sin() / z
    }
}

/// A positive, piecewise-smooth wave-speed profile with rho = 1 beyond `b`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    b: f64,
    segments: Vec<Segment>,
    breakpoints: Vec<f64>,
    closed_form: Option<ClosedForm>,
}

const JUNCTION_TOL: f64 = 1e-12;

impl RadialProfile {
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Interior junctions, table knots, and `b` itself, strictly increasing.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn segment_specs(&self) -> Vec<SegmentSpec> {
        self.segments.iter().map(|s| s.spec.clone()).collect()
    }

    /// Segment extents together with a flag telling whether rho is constant there.
    pub fn pieces(&self) -> Vec<(f64, f64, bool)> {
        self.segments.iter().map(|s| (s.spec.x_lo, s.spec.x_hi, s.is_constant())).collect()
    }

    fn segment_index(&self, x: f64) -> usize {
        let i = self.segments.partition_point(|s| s.spec.x_hi <= x);
        i.min(self.segments.len() - 1)
    }

    /// rho, rho', rho'' at `x`; one-sided from the right at junctions.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        if x >= self.b {
            return (1.0, 0.0, 0.0);
        }
        self.segments[self.segment_index(x.max(0.0))].eval3(x.max(0.0))
    }

    /// rho, rho', rho'' at `x`, taking the segment to the left of a junction.
    pub fn eval3_left(&self, x: f64) -> (f64, f64, f64) {
        if x > self.b {
            return (1.0, 0.0, 0.0);
        }
        let i = self.segments.partition_point(|s| s.spec.x_hi < x).min(self.segments.len() - 1);
        self.segments[i].eval3(x.max(0.0))
    }

    pub fn rho(&self, x: f64) -> f64 {
        self.eval3(x).0
    }

    /// rho from segment `i`'s formula, also at its end points.
    pub fn rho_in_segment(&self, i: usize, x: f64) -> f64 {
        self.segments[i].rho(x)
    }

    pub fn max_rho(&self) -> f64 {
        let n = 2000;
        (0..=n)
            .map(|i| self.rho(self.b * i as f64 / n as f64))
            .chain(self.breakpoints.iter().map(|&x| self.eval3_left(x).0))
            .fold(1.0, f64::max)
    }

    /// The trivial medium rho = 1 on [0, b].
    pub fn constant(b: f64) -> Self {
        make_piecewise_profile(b, vec![SegmentSpec { x_lo: 0.0, x_hi: b, kind: SegmentKind::Constant { value: 1.0 } }])
            .expect("constant profile")
    }

    /// Tabulated profile on [0, b], monotone cubic between knots.
    pub fn from_table(x: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        let b = *x.last().ok_or_else(|| Error::BadParams("empty table".into()))?;
        make_piecewise_profile(b, vec![SegmentSpec { x_lo: x[0], x_hi: b, kind: SegmentKind::Table { x, rho } }])
    }
}

/// Validates and assembles a profile from segments tiling [0, b].
pub fn make_piecewise_profile(b: f64, mut specs: Vec<SegmentSpec>) -> Result<RadialProfile> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::BadParams(format!("b must be positive, got {b}")));
    }
    if specs.is_empty() {
        return Err(Error::GapOrOverlap { b, detail: "no segments".into() });
    }
    specs.sort_by(|p, q| p.x_lo.partial_cmp(&q.x_lo).unwrap_or(std::cmp::Ordering::Equal));
    let tol = JUNCTION_TOL * b.max(1.0);
    if specs[0].x_lo.abs() > tol {
        return Err(Error::GapOrOverlap { b, detail: format!("first segment starts at {}", specs[0].x_lo) });
    }
    if (specs.last().unwrap().x_hi - b).abs() > tol {
        return Err(Error::GapOrOverlap { b, detail: format!("last segment ends at {}", specs.last().unwrap().x_hi) });
    }
    for w in specs.windows(2) {
        if (w[0].x_hi - w[1].x_lo).abs() > tol {
            return Err(Error::GapOrOverlap {
                b,
                detail: format!("segment ending at {} followed by one starting at {}", w[0].x_hi, w[1].x_lo),
            });
        }
    }
    for s in &specs {
        if !(s.x_hi > s.x_lo) {
            return Err(Error::GapOrOverlap { b, detail: format!("empty segment [{}, {}]", s.x_lo, s.x_hi) });
        }
    }
    specs[0].x_lo = 0.0;
    let last = specs.len() - 1;
    specs[last].x_hi = b;
    for i in 1..specs.len() {
        specs[i].x_lo = specs[i - 1].x_hi;
    }

    let mut segments = Vec::with_capacity(specs.len());
    let mut breakpoints = Vec::new();
    for spec in specs {
        let table = match &spec.kind {
            SegmentKind::Table { x, rho } => {
                if x.len() < 2 || x.len() != rho.len() || x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::BadParams("table needs at least two strictly increasing knots".into()));
                }
                if (x[0] - spec.x_lo).abs() > tol || (x[x.len() - 1] - spec.x_hi).abs() > tol {
                    return Err(Error::GapOrOverlap { b, detail: "table knots do not span their segment".into() });
                }
                breakpoints.extend_from_slice(&x[1..x.len() - 1]);
                Some(Pchip::new(x.clone(), rho.clone()))
            }
            SegmentKind::Power { shift, slope, .. } => {
                let u0 = shift + slope * spec.x_lo;
                let u1 = shift + slope * spec.x_hi;
                if !(u0 > 0.0 && u1 > 0.0) {
                    return Err(Error::BadParams("power segment base must stay positive".into()));
                }
                None
            }
            SegmentKind::RaisedCosine { center, width, .. } => {
                for e in [center - width, center + width] {
                    if e > spec.x_lo && e < spec.x_hi {
                        breakpoints.push(e);
                    }
                }
                None
            }
            _ => None,
        };
        if spec.x_hi < b {
            breakpoints.push(spec.x_hi);
        }
        segments.push(Segment { spec, table });
    }
    breakpoints.push(b);
    breakpoints.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breakpoints.dedup_by(|p, q| (*p - *q).abs() <= tol);

    let profile = RadialProfile { b, segments, breakpoints, closed_form: None };

    for w in profile.segments.windows(2) {
        let x = w[0].spec.x_hi;
        let left = w[0].eval3(x).0;
        let right = w[1].eval3(x).0;
        if (left - right).abs() > JUNCTION_TOL * left.abs().max(right.abs()).max(1e-300) {
            return Err(Error::DiscontinuousJunction { x, left, right });
        }
    }
    let n = 1000;
    for i in 0..=n {
        let x = b * i as f64 / n as f64;
        let v = profile.rho(x);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositive { x, value: v });
        }
    }
    Ok(profile)
}

/// Reason attached to an admissibility violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Nonpositive,
    RhoPrimeJump,
    NotOneBeyondB,
    Discontinuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub reason: ViolationKind,
    /// Left and right values of the probed quantity.
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub is_class_a: bool,
    pub violations: Vec<Violation>,
}

/// Probes positivity, continuity of rho and rho', and rho = 1 at and beyond b.
pub fn check_admissible(p: &RadialProfile) -> AdmissibilityReport {
    let b = p.b;
    let h = 1e-7 * b;
    let mut violations = Vec::new();
    let n = 1000;
    for i in 0..=n {
        let x = b * i as f64 / n as f64;
        let v = p.rho(x);
        if v <= 0.0 {
            violations.push(Violation { x, reason: ViolationKind::Nonpositive, left: v, right: v });
        }
    }
    for &x in p.breakpoints() {
        let left_val = p.eval3_left(x).0;
        let right_val = if x >= b { 1.0 } else { p.rho(x) };
        let reason =
            if x >= b { ViolationKind::NotOneBeyondB } else { ViolationKind::Discontinuous };
        if (left_val - right_val).abs() > 1e-10 * left_val.abs().max(1.0) {
            violations.push(Violation { x, reason, left: left_val, right: right_val });
            continue;
        }
        let dl = (3.0 * p.eval3_left(x).0 - 4.0 * p.rho(x - h) + p.rho(x - 2.0 * h)) / (2.0 * h);
        let dr = if x >= b {
            0.0
        } else {
            (-3.0 * p.rho(x) + 4.0 * p.rho(x + h) - p.rho(x + 2.0 * h)) / (2.0 * h)
        };
        if (dl - dr).abs() > 1e-6 * dl.abs().max(dr.abs()).max(1.0) {
            violations.push(Violation { x, reason: ViolationKind::RhoPrimeJump, left: dl, right: dr });
        }
    }
    AdmissibilityReport { is_class_a: violations.is_empty(), violations }
}

/// The built-in closed-form examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    Ex61,
    Ex62First,
    Ex62Second,
    Ex63,
}

impl std::str::FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex61" => Ok(Self::Ex61),
            "ex62_first" => Ok(Self::Ex62First),
            "ex62_second" => Ok(Self::Ex62Second),
            "ex63" => Ok(Self::Ex63),
            _ => Err(Error::BadParams(format!("unknown example {s:?}"))),
        }
    }
}

impl ExampleName {
    pub const ALL: [ExampleName; 4] = [Self::Ex61, Self::Ex62First, Self::Ex62Second, Self::Ex63];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ex61 => "ex61",
            Self::Ex62First => "ex62_first",
            Self::Ex62Second => "ex62_second",
            Self::Ex63 => "ex63",
        }
    }
}

/// Parameters for [`example_profile`]; unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleParams {
    pub b: f64,
    pub eps: f64,
    pub c: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self { b: 1.0, eps: 2.0, c: 1.0 }
    }
}

impl ExampleParams {
    pub fn with_b(b: f64) -> Self {
        Self { b, ..Self::default() }
    }
}

/// Builds a closed-form example profile with its metadata attached.
pub fn example_profile(name: ExampleName, params: ExampleParams) -> Result<RadialProfile> {
    let b = params.b;
    if !(b > 0.0) {
        return Err(Error::BadParams(format!("b must be positive, got {b}")));
    }
    let rational = |eps: f64, c: f64| -> Result<RadialProfile> {
        if !(eps > 0.0) || eps == 1.0 || c == 0.0 || c.signum() != (eps - 1.0).signum() {
            return Err(Error::BadParams(format!("need eps > 0, eps != 1, sign(c) = sign(eps - 1); got eps={eps}, c={c}")));
        }
        let x0 = (eps - 1.0) / (eps * c);
        if x0 > b * (1.0 + 1e-14) {
            return Err(Error::BadParams(format!("breakpoint x0 = {x0} lies beyond b = {b}")));
        }
        let mut specs = vec![SegmentSpec { x_lo: 0.0, x_hi: x0.min(b), kind: SegmentKind::RationalEx61 { eps, c } }];
        if x0 < b * (1.0 - 1e-14) {
            specs.push(SegmentSpec { x_lo: x0, x_hi: b, kind: SegmentKind::Constant { value: 1.0 } });
        }
        let mut p = make_piecewise_profile(b, specs)?;
        p.closed_form = Some(ClosedForm::Rational { eps, c });
        Ok(p)
    };
    match name {
        ExampleName::Ex61 => rational(params.eps, params.c),
        ExampleName::Ex62First => rational(2.0, 1.0 / b),
        ExampleName::Ex62Second => rational(0.5, -1.0 / b),
        ExampleName::Ex63 => {
            let c = params.c;
            if !(c > 0.0 || c < -b) {
                return Err(Error::BadParams(format!("need c > 0 or c < -b; got c={c}, b={b}")));
            }
            let spec = SegmentSpec {
                x_lo: 0.0,
                x_hi: b,
                kind: SegmentKind::Power { coef: (b + c).powi(2), shift: c, slope: 1.0, exponent: -2.0 },
            };
            let spec = if c < 0.0 {
                // (b+c)^2/(x+c)^2 = (b+c)^2/(-c-x)^2 keeps the power base positive.
                SegmentSpec { kind: SegmentKind::Power { coef: (b + c).powi(2), shift: -c, slope: -1.0, exponent: -2.0 }, ..spec }
            } else {
                spec
            };
            let mut p = make_piecewise_profile(b, vec![spec])?;
            p.closed_form = Some(ClosedForm::Log { b, c });
            Ok(p)
        }
    }
}

/// Smooth class-A test profile: a raised-cosine dip of depth `amp` centred at `center`.
pub fn bump_profile(b: f64, amp: f64, center: f64, width: f64) -> Result<RadialProfile> {
    let lo = center - width;
    let hi = center + width;
    if !(lo > 0.0 && hi < b) {
        return Err(Error::BadParams("bump must lie strictly inside (0, b)".into()));
    }
    make_piecewise_profile(
        b,
        vec![
            SegmentSpec { x_lo: 0.0, x_hi: lo, kind: SegmentKind::Constant { value: 1.0 } },
            SegmentSpec { x_lo: lo, x_hi: hi, kind: SegmentKind::RaisedCosine { base: 1.0, amp, center, width } },
            SegmentSpec { x_lo: hi, x_hi: b, kind: SegmentKind::Constant { value: 1.0 } },
        ],
    )
}

/// Class-A profile whose travel time equals `b` exactly.
pub fn balanced_profile(b: f64, amp: f64) -> Result<RadialProfile> {
    make_piecewise_profile(b, vec![SegmentSpec { x_lo: 0.0, x_hi: b, kind: SegmentKind::BalancedSine { amp, period: b } }])
}

/// Shape of the smooth part of a potential on one piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Constant { value: f64 },
    /// Uniform samples from `lo` to `hi`, local cubic interpolation.
    Samples { values: Vec<f64> },
    /// `amp * (1 + cos(pi (y - center) / width)) / 2` inside the bump.
    RaisedCosine { amp: f64, center: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialPiece {
    pub lo: f64,
    pub hi: f64,
    #[serde(flatten)]
    pub kind: PotentialKind,
}

impl PotentialPiece {
    pub fn eval(&self, y: f64) -> f64 {
        match &self.kind {
            PotentialKind::Constant { value } => *value,
            PotentialKind::Samples { values } => {
                let h = (self.hi - self.lo) / (values.len() - 1) as f64;
                lagrange4_uniform(values, self.lo, h, y)
            }
            PotentialKind::RaisedCosine { amp, center, width } => {
                if (y - center).abs() >= *width {
                    0.0
                } else {
                    amp * (1.0 + (std::f64::consts::PI * (y - center) / width).cos()) / 2.0
                }
            }
        }
    }
}

/// A delta component `weight * delta(y - y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointPart {
    pub y: f64,
    pub weight: f64,
}

/// Compactly supported potential on [0, a] with optional point parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub a: f64,
    pub pieces: Vec<PotentialPiece>,
    pub points: Vec<PointPart>,
}

impl Potential {
    pub fn new(a: f64, mut pieces: Vec<PotentialPiece>, mut points: Vec<PointPart>) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::BadParams(format!("support bound a must be positive, got {a}")));
        }
        pieces.sort_by(|p, q| p.lo.partial_cmp(&q.lo).unwrap());
        for p in &pieces {
            if p.lo < -1e-12 || p.hi > a * (1.0 + 1e-12) || p.hi <= p.lo {
                return Err(Error::BadParams(format!("piece [{}, {}] outside [0, {a}]", p.lo, p.hi)));
            }
            if let PotentialKind::Samples { values } = &p.kind {
                if values.len() < 4 {
                    return Err(Error::BadParams("sampled piece needs at least four values".into()));
                }
            }
        }
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi - 1e-12 * a {
                return Err(Error::BadParams("potential pieces overlap".into()));
            }
        }
        for p in &points {
            if !(p.y > 0.0 && p.y <= a * (1.0 + 1e-12)) {
                return Err(Error::BadParams(format!("point part at {} outside (0, {a}]", p.y)));
            }
        }
        points.sort_by(|p, q| p.y.partial_cmp(&q.y).unwrap());
        Ok(Self { a, pieces, points })
    }

    pub fn zero(a: f64) -> Self {
        Self { a, pieces: vec![], points: vec![] }
    }

    /// `c * delta(y - a)`.
    pub fn delta_at_edge(a: f64, c: f64) -> Self {
        Self { a, pieces: vec![], points: vec![PointPart { y: a, weight: c }] }
    }

    /// Constant well `value` on [0, a].
    pub fn square_well(a: f64, value: f64) -> Self {
        Self { a, pieces: vec![PotentialPiece { lo: 0.0, hi: a, kind: PotentialKind::Constant { value } }], points: vec![] }
    }

    /// Smooth part of V at `y` (zero outside the pieces).
    pub fn smooth(&self, y: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.hi <= y);
        match self.pieces.get(i) {
            Some(p) if y >= p.lo => p.eval(y),
            _ => 0.0,
        }
    }

    /// Breakpoints of the smooth part and point locations, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        for p in &self.pieces {
            if let PotentialKind::RaisedCosine { center, width, .. } = p.kind {
                v.extend([center - width, center + width]);
            }
        }
        v.extend(self.points.iter().map(|p| p.y));
        v.push(self.a);
        v.retain(|&y| y > 0.0 && y <= self.a);
        v.sort_by(|p, q| p.partial_cmp(q).unwrap());
        v.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * self.a);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|p| p.weight == 0.0)
            && self.pieces.iter().all(|p| matches!(p.kind, PotentialKind::Constant { value } if value == 0.0))
    }

    /// Sup norm of the smooth part sampled on `n` points.
    pub fn smooth_sup_norm(&self, n: usize) -> f64 {
        (0..=n).map(|i| self.smooth(self.a * i as f64 / n as f64).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_profile_is_admissible() {
        let p = RadialProfile::constant(1.0);
        assert_eq!(p.rho(0.3), 1.0);
        assert_eq!(p.rho(5.0), 1.0);
        assert!(check_admissible(&p).is_class_a);
    }

    #[test]
    fn ex61_matches_closed_form_and_flags_jump() {
        let p = example_profile(ExampleName::Ex61, ExampleParams::default()).unwrap();
        assert_eq!(p.breakpoints(), &[0.5, 1.0]);
        assert!((p.rho(0.25) - 16.0 / 1.5f64.powi(4)).abs() < 1e-15);
        let rep = check_admissible(&p);
        assert!(!rep.is_class_a);
        let v = &rep.violations[0];
        assert_eq!(v.reason, ViolationKind::RhoPrimeJump);
        assert!((v.x - 0.5).abs() < 1e-15);
        assert!((v.left + 4.0).abs() < 1e-5 && v.right.abs() < 1e-9);
    }

    #[test]
    fn ex63_jump_at_b() {
        let p = example_profile(ExampleName::Ex63, ExampleParams::default()).unwrap();
        let rep = check_admissible(&p);
        let v = rep.violations.iter().find(|v| v.x == 1.0).unwrap();
        assert_eq!(v.reason, ViolationKind::RhoPrimeJump);
        assert!((v.left + 1.0).abs() < 1e-5);
    }

    #[test]
    fn nonpositive_and_gaps_are_rejected() {
        let err = make_piecewise_profile(
            1.0,
            vec![SegmentSpec { x_lo: 0.0, x_hi: 1.0, kind: SegmentKind::Power { coef: 1.0, shift: 0.0, slope: 1.0, exponent: 1.0 } }],
        );
        assert!(err.is_err());
        let lin = SegmentSpec { x_lo: 0.0, x_hi: 1.0, kind: SegmentKind::Table { x: vec![0.0, 1.0], rho: vec![0.0, 1.0] } };
        assert!(matches!(make_piecewise_profile(1.0, vec![lin]), Err(Error::NonPositive { .. })));
        let gap = vec![
            SegmentSpec { x_lo: 0.0, x_hi: 0.4, kind: SegmentKind::Constant { value: 1.0 } },
            SegmentSpec { x_lo: 0.5, x_hi: 1.0, kind: SegmentKind::Constant { value: 1.0 } },
        ];
        assert!(matches!(make_piecewise_profile(1.0, gap), Err(Error::GapOrOverlap { .. })));
        let jump = vec![
            SegmentSpec { x_lo: 0.0, x_hi: 0.5, kind: SegmentKind::Constant { value: 2.0 } },
            SegmentSpec { x_lo: 0.5, x_hi: 1.0, kind: SegmentKind::Constant { value: 1.0 } },
        ];
        assert!(matches!(make_piecewise_profile(1.0, jump), Err(Error::DiscontinuousJunction { .. })));
    }

    #[test]
    fn example_metadata() {
        let p = example_profile(ExampleName::Ex62First, ExampleParams::with_b(1.0)).unwrap();
        let cf = p.closed_form().unwrap();
        assert!((cf.gamma() + 1.0 / 24.0).abs() < 1e-15);
        assert!((cf.a(1.0) - 1.5).abs() < 1e-15);
        let p = example_profile(ExampleName::Ex62Second, ExampleParams::with_b(1.0)).unwrap();
        let cf = p.closed_form().unwrap();
        assert!((cf.gamma() - 1.0 / 6.0).abs() < 1e-15);
        assert!((cf.a(1.0) - 0.5).abs() < 1e-15);
        assert!((p.rho(0.3) - 1.0 / 1.7f64.powi(4)).abs() < 1e-14);
        let p = example_profile(ExampleName::Ex63, ExampleParams::default()).unwrap();
        let cf = p.closed_form().unwrap();
        assert!((cf.a(1.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((cf.gamma() - (8.0 * 2f64.ln() - 17.0 / 3.0)).abs() < 1e-14);
        assert!(example_profile(ExampleName::Ex63, ExampleParams { b: 1.0, eps: 2.0, c: -0.5 }).is_err());
        assert!(example_profile(ExampleName::Ex61, ExampleParams { b: 1.0, eps: 2.0, c: -1.0 }).is_err());
    }

    #[test]
    fn rational_series_joins_closed_form() {
        let cf = ClosedForm::Rational { eps: 2.0, c: 1.0 };
        let k = Complex64::new(0.3333, 0.0);
        let (al, be) = (0.5, 1.5);
        let direct = 1.0 / (4.0 * k * k) * ((k * al).cos() - (k * be).cos() - 2.0 * k * (k * al).sin());
        assert!((rational_series(2.0, 1.0, al, be, k) - direct).norm() < 1e-12);
        let small = Complex64::new(1e-3, 2e-3);
        assert!((cf.dispersion(small) / (small * small) - cf.gamma()).norm() < 1e-5);
    }

    #[test]
    fn balanced_sine_derivatives() {
        let p = balanced_profile(1.0, 0.5).unwrap();
        let h = 1e-5;
        for x in [0.1, 0.37, 0.8] {
            let (r, d, dd) = p.eval3(x);
            let fd = (p.rho(x + h) - p.rho(x - h)) / (2.0 * h);
            let fdd = (p.rho(x + h) - 2.0 * r + p.rho(x - h)) / (h * h);
            assert!((d - fd).abs() < 1e-8 && (dd - fdd).abs() < 1e-4);
        }
        assert!(check_admissible(&p).is_class_a);
    }

    #[test]
    fn segment_specs_round_trip_through_toml() {
        #[derive(Serialize, Deserialize)]
        struct W {
            segments: Vec<SegmentSpec>,
        }
        let p = example_profile(ExampleName::Ex61, ExampleParams::default()).unwrap();
        let text = toml::to_string(&W { segments: p.segment_specs() }).unwrap();
        let back: W = toml::from_str(&text).unwrap();
        assert_eq!(back.segments, p.segment_specs());
    }
}
