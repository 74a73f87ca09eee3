//! Transmission eigenvalues of radially symmetric media: forward computation
//! of the dispersion function and its zeros, and reconstruction of the
//! wave-speed profile (or a half-line Schrödinger potential) from spectral
//! data via a scalar Riemann–Hilbert problem and the Marchenko equation.

pub mod error;
pub mod forward;
pub mod interp;
pub mod io;
pub mod liouville;
pub mod marchenko;
pub mod ode;
pub mod profiles;
pub mod quad;
pub mod reconstruct;
pub mod rh;
pub mod samples;
pub mod validate;

pub use error::{Error, Result};
pub use forward::{Eigenvalue, EigenvalueSet, SearchWindow};
pub use liouville::TravelTimeMap;
pub use marchenko::{MarchenkoSolution, ScatteringData};
pub use num_complex::Complex64;
pub use ode::{IntegratorConfig, SolutionSample};
pub use profiles::{AdmissibilityReport, ExampleName, PointPart, Potential, RadialProfile, SegmentKind, SegmentSpec};
pub use reconstruct::{ReconstructionResult, Regime};
pub use samples::{SpectralSamples, Symmetry};
