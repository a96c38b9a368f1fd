//! Minimal exact symbolic kernel over the ten-variable canonical phase space.
//!
//! Expressions are kept in a canonical rational-function form at all times:
//! a quotient of two multivariate polynomials over the atoms
//! {π, parameters, canonical variables, formal η-derivatives, sin/cos factors},
//! with coefficients in the exact field Q(√2) (rationals extended by √2, which
//! the window constraints need so that √2·√2 collapses to 2 and σ = π/4 stays
//! symbolic). Because construction always normalizes — sums merge like terms,
//! products distribute and collect, quotients cancel content, monomial factors
//! and exact polynomial factors — structural equality of two `Expr` values is
//! decidable equality of normal forms, and normalization is idempotent by
//! construction.
//!
//! The calculus layer provides partial derivatives (with the formal chain rule
//! η⁽ᵏ⁾ ↦ η⁽ᵏ⁺¹⁾ capped at a configurable order), the canonical Poisson
//! bracket over the five conjugate pairs, strong substitution onto the window
//! constraint surface, and numeric evaluation into complex doubles against a
//! concrete window profile.

mod coeff;
mod expr;
mod poly;

pub(crate) use poly::{Atom, Monomial};

pub use expr::{EvalContext, Expr};

use std::fmt;

/// Default cap on the order of formal η-derivatives produced by
/// differentiation. The reduction pipeline itself never needs more than η‴;
/// the cap exists to bound runaway symbolic growth.
pub const DEFAULT_ETA_CAP: u32 = 10;

/// The ten canonical phase-space variables: five coordinates (the 3d spherical
/// triple and the 2d window pair) and their conjugate momenta. The declaration
/// order — coordinates first, each block by conjugate-pair index — is the
/// canonical ordering used for normal forms and for the rows of the reduced
/// structure matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalVar {
    /// 3d radius.
    R,
    /// Polar angle.
    Theta,
    /// Azimuthal angle.
    Phi,
    /// Window radius.
    Rho,
    /// Window angle.
    Sigma,
    /// Momentum conjugate to `R`.
    PR,
    /// Momentum conjugate to `Theta`.
    PTheta,
    /// Momentum conjugate to `Phi`.
    PPhi,
    /// Momentum conjugate to `Rho`.
    PRho,
    /// Momentum conjugate to `Sigma`.
    PSigma,
}

/// Coordinate/momentum classification of a canonical variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Coordinate,
    Momentum,
}

impl CanonicalVar {
    /// All ten variables in canonical order.
    pub const ALL: [CanonicalVar; 10] = [
        CanonicalVar::R,
        CanonicalVar::Theta,
        CanonicalVar::Phi,
        CanonicalVar::Rho,
        CanonicalVar::Sigma,
        CanonicalVar::PR,
        CanonicalVar::PTheta,
        CanonicalVar::PPhi,
        CanonicalVar::PRho,
        CanonicalVar::PSigma,
    ];

    /// The five coordinates in pair order.
    pub const COORDINATES: [CanonicalVar; 5] = [
        CanonicalVar::R,
        CanonicalVar::Theta,
        CanonicalVar::Phi,
        CanonicalVar::Rho,
        CanonicalVar::Sigma,
    ];

    /// The five momenta in pair order.
    pub const MOMENTA: [CanonicalVar; 5] = [
        CanonicalVar::PR,
        CanonicalVar::PTheta,
        CanonicalVar::PPhi,
        CanonicalVar::PRho,
        CanonicalVar::PSigma,
    ];

    /// Coordinate or momentum.
    pub fn kind(self) -> VarKind {
        if (self as usize) < 5 {
            VarKind::Coordinate
        } else {
            VarKind::Momentum
        }
    }

    /// Conjugate-pair index, 1 ..= 5.
    pub fn pair_index(self) -> usize {
        (self as usize) % 5 + 1
    }

    /// The conjugate partner (coordinate ↔ momentum).
    pub fn conjugate(self) -> CanonicalVar {
        CanonicalVar::ALL[(self as usize + 5) % 10]
    }

    /// Index into [`CanonicalVar::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CanonicalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CanonicalVar::R => "r",
            CanonicalVar::Theta => "theta",
            CanonicalVar::Phi => "phi",
            CanonicalVar::Rho => "rho",
            CanonicalVar::Sigma => "sigma",
            CanonicalVar::PR => "p_r",
            CanonicalVar::PTheta => "p_theta",
            CanonicalVar::PPhi => "p_phi",
            CanonicalVar::PRho => "p_rho",
            CanonicalVar::PSigma => "p_sigma",
        };
        f.write_str(s)
    }
}

/// Physical parameters and Lagrange multipliers that may appear symbolically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    /// Planck constant ħ.
    Hbar,
    /// Particle mass m.
    Mass,
    /// Window length scale ρ_c.
    RhoC,
    /// Energy E.
    Energy,
    /// Orbital quantum number l.
    AngularL,
    /// Profile shape parameter α.
    Alpha,
    /// Profile shape parameter β.
    Beta,
    /// Multiplier of the first primary constraint.
    Lambda1,
    /// Multiplier of the second primary constraint.
    Lambda2,
}

impl Param {
    /// All parameters, in canonical order.
    pub const ALL: [Param; 9] = [
        Param::Hbar,
        Param::Mass,
        Param::RhoC,
        Param::Energy,
        Param::AngularL,
        Param::Alpha,
        Param::Beta,
        Param::Lambda1,
        Param::Lambda2,
    ];

    /// Index into [`Param::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Param::Hbar => "hbar",
            Param::Mass => "m",
            Param::RhoC => "rho_c",
            Param::Energy => "E",
            Param::AngularL => "l",
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Lambda1 => "lambda1",
            Param::Lambda2 => "lambda2",
        };
        f.write_str(s)
    }
}

/// Normalization of the window constraint pair.
///
/// The solved constraint surface can be written `ρ = w·η(r)`, `p_ρ = w·η′(r)·p_r`
/// with either `w = √2` (the form the linearized constraints take when the two
/// nonlinear window conditions are collapsed on the principal branch σ = π/4)
/// or `w = 1` (the effective form in which the reduced bracket table and the
/// Planck function ħ(r) = ħ/(1+η′²) come out with the 1+η′² metric). The two
/// conventions differ in substance — `RootTwo` produces a 1+2η′² metric — so
/// the choice is always explicit. Everything downstream of the bracket table
/// (radial equation, boundary series, spectra) uses the 1+η′² metric and hence
/// corresponds to `Unit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowNormalization {
    /// `ρ = √2·η(r)`: constraint set as written in linearized form.
    RootTwo,
    /// `ρ = η(r)`: effective normalization matching the reduced bracket table.
    Unit,
}

impl WindowNormalization {
    /// The scale factor `w` as an exact expression.
    pub fn scale(self) -> Expr {
        match self {
            WindowNormalization::RootTwo => Expr::sqrt2(),
            WindowNormalization::Unit => Expr::one(),
        }
    }

    /// The scale factor as a float.
    pub fn scale_f64(self) -> f64 {
        match self {
            WindowNormalization::RootTwo => std::f64::consts::SQRT_2,
            WindowNormalization::Unit => 1.0,
        }
    }
}
