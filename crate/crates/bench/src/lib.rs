//! Shared fixtures for the benchmarks.

use num_complex::Complex64 as C;
use transeig::forward::{ClosedFormDispersion, sample_dispersion};
use transeig::profiles::{example_profile, ExampleName, ExampleParams, RadialProfile};
use transeig::samples::{uniform_grid, SpectralSamples, Symmetry};

pub fn profile(name: ExampleName) -> RadialProfile {
    example_profile(name, ExampleParams::default()).expect("built-in example")
}

/// E(k) of ex62_second from its closed form.
pub fn ex62_e_samples(k_max: f64, n: usize) -> SpectralSamples {
    let p = profile(ExampleName::Ex62Second);
    let form = p.closed_form().expect("closed form");
    let d = sample_dispersion(&ClosedFormDispersion { form, b: 1.0 }, uniform_grid(k_max, n)).expect("samples");
    d.map(Symmetry::EvenInK, |_, v| v / form.gamma())
}

/// D~(k) of 2 delta(y - 1).
pub fn delta_samples(k_max: f64, n: usize) -> SpectralSamples {
    SpectralSamples::from_fn(uniform_grid(k_max, n), Symmetry::EvenInK, |k| {
        Ok(C::new(if k == 0.0 { 2.0 } else { 2.0 * (k.sin() / k).powi(2) }, 0.0))
    })
    .expect("samples")
}

/// The odd jump 2k/(k^2 + 1).
pub fn rational_jump(k_max: f64, n: usize) -> SpectralSamples {
    SpectralSamples::from_fn(uniform_grid(k_max, n), Symmetry::None, |k| Ok(C::new(2.0 * k / (k * k + 1.0), 0.0)))
        .expect("samples")
}
