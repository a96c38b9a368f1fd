//! Symbolic–numeric toolkit for a constrained-quantization model of a point
//! particle coupled to a two-dimensional radial "window".
//!
//! The pipeline runs from a (3+2)-dimensional constrained phase space down to
//! an energy spectrum:
//!
//! 1. [`symbolic`] — a minimal exact expression kernel over the ten canonical
//!    phase-space variables: rational/√2 constants, Poisson brackets, formal
//!    η-derivatives, and strong substitution onto the constraint surface.
//! 2. [`constraints`] — the second-class constraint set of the window model,
//!    its Δ matrix, Dirac brackets, the deformed commutator table with the
//!    position-dependent Planck function ħ(r) = ħ/(1+η′²), the quantization
//!    anomaly, and the mass quantum.
//! 3. [`profiles`] — concrete window profiles η and their exact derivative
//!    jets in either chart (radial r or inverse-radial ε), with chart
//!    transforms.
//! 4. [`radial`] — the reduced radial wave equation in both charts, dual
//!    coefficient routes for cross-checking, singularity classification, and
//!    adaptive numerical integration.
//! 5. [`spectrum`] — boundary Taylor coefficients, indicial exponents, series
//!    recurrences, truncated-determinant spectra with root extraction, and the
//!    consistency conditions the series impose on the window profile.
//!
//! Every numeric result that matters is backed by an independently coded
//! oracle in the test suite; see `tests/` in this crate and the `acceptance`
//! integration test of the CLI crate.

pub mod constraints;
pub mod error;
pub mod jet;
pub mod ode;
pub mod profiles;
pub mod radial;
pub mod spectrum;
pub mod symbolic;

pub use constraints::{
    anomaly_term, mass_quantum, mass_quantum_si, CommutatorEntry, ConstraintSet, DiracStructure,
    Representation, WindowNormalization,
};
pub use error::CoreError;
pub use jet::Jet;
pub use ode::{DormandPrince, State};
pub use profiles::{EtaProfile, HarmonicWindow, PolynomialWindow, ProfileKind, WindowFn};
pub use radial::{Classification, EpsilonOde, LimitEstimate, RadialOde, SingularityReport};
pub use spectrum::{
    determinant_spectrum, dimensional_energy, eta_boundary_conditions, first_excited,
    frobenius_coeffs, frobenius_eval, frobenius_with_slope, indicial_exponents, rejected_branch,
    spectrum_sweep, BranchReport, EtaConditions, FirstExcited, IndicialRoots, SpectrumEntry,
    SpectrumResult, TaylorCoeffs,
};
pub use symbolic::{CanonicalVar, EvalContext, Expr, Param, VarKind};
