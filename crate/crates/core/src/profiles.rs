//! Window-distribution profiles η and their exact derivatives in both charts.
//!
//! A profile describes how strongly the extra 2d window couples to the radial
//! coordinate. Profiles live natively either on the dimensionless inverse
//! radius ε = ρ_c/r (boundary chart, ε = 1 is the window edge) or on the
//! window radius ρ (interior chart). All derivative arrays are produced by
//! closed-form recurrences on truncated Taylor series — never by finite
//! differencing — so they are exact to rounding at any requested order up to
//! the configured cap.

use crate::error::CoreError;
use crate::jet::Jet;

/// Default cap on profile derivative orders. High-order series solutions need
/// window derivatives a few orders above the series degree, so this sits
/// comfortably above the default series degree of 12.
pub const DEFAULT_PROFILE_CAP: usize = 16;

/// Hard ceiling on the configurable cap (expression growth and rounding make
/// higher orders meaningless in double precision).
pub const MAX_PROFILE_CAP: usize = 32;

/// A window function on the radial chart: `derivs(x, n)` returns
/// `[η(x), η′(x), …, η⁽ⁿ⁾(x)]`. Implementors must produce analytically exact
/// derivatives. This is the hook the symbolic evaluator uses to bind the
/// formal η symbols.
pub trait WindowFn {
    fn derivs(&self, x: f64, n: usize) -> Result<Vec<f64>, CoreError>;
}

/// Polynomial window `η(r) = Σ c_k rᵏ` (ad-hoc test windows such as `c·r`,
/// `r²`, `r³`).
#[derive(Debug, Clone)]
pub struct PolynomialWindow {
    coeffs: Vec<f64>,
}

impl PolynomialWindow {
    pub fn new(coeffs: Vec<f64>) -> PolynomialWindow {
        PolynomialWindow { coeffs }
    }

    /// The zero window (no coupling to the extra dimension).
    pub fn zero() -> PolynomialWindow {
        PolynomialWindow { coeffs: vec![] }
    }
}

impl WindowFn for PolynomialWindow {
    fn derivs(&self, x: f64, n: usize) -> Result<Vec<f64>, CoreError> {
        let mut out = vec![0.0; n + 1];
        for (order, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, c) in self.coeffs.iter().enumerate().skip(order) {
                // d^order/dx^order of c x^j = c · j!/(j−order)! · x^(j−order)
                let mut fall = 1.0;
                for i in 0..order {
                    fall *= (j - i) as f64;
                }
                acc += c * fall * x.powi((j - order) as i32);
            }
            *slot = acc;
        }
        Ok(out)
    }
}

/// Harmonic window `η(r) = A·sin(ω r + φ)` (ad-hoc test window, e.g. sin r).
#[derive(Debug, Clone)]
pub struct HarmonicWindow {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl HarmonicWindow {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> HarmonicWindow {
        HarmonicWindow {
            amplitude,
            frequency,
            phase,
        }
    }
}

impl WindowFn for HarmonicWindow {
    fn derivs(&self, x: f64, n: usize) -> Result<Vec<f64>, CoreError> {
        let arg = self.frequency * x + self.phase;
        let (s, c) = arg.sin_cos();
        let mut out = Vec::with_capacity(n + 1);
        let mut scale = self.amplitude;
        for order in 0..=n {
            let v = match order % 4 {
                0 => s,
                1 => c,
                2 => -s,
                _ => -c,
            };
            out.push(scale * v);
            scale *= self.frequency;
        }
        Ok(out)
    }
}

/// The shape of a window profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// η ≡ 0: no extra window; every downstream formula collapses to its
    /// canonical 3d limit.
    Zero,
    /// Constant dimensionless profile η̄ ≡ value (same constant in every
    /// chart; all derivatives vanish).
    Constant { value: f64 },
    /// Interior-chart quadratic η₁(ρ) = ρ² + α ρ_c ρ + β ρ_c², defined on the
    /// window radius ρ. It never enters the radial pipeline, so the ε/r chart
    /// accessors reject it.
    InteriorQuadratic { alpha: f64, beta: f64 },
    /// η̄(ε) = ε·exp(−βε)·sin(α/ε): oscillation controlled by α, damping by
    /// β. Defined for ε > 0 only; ε = 0 is an essential singularity.
    DampedOscillatory { alpha: f64, beta: f64 },
    /// η̄(ε) = Σ c_j (ε−1)ʲ: boundary data at the window edge ε = 1.
    TaylorAtBoundary { coeffs: Vec<f64> },
}

impl ProfileKind {
    fn name(&self) -> &'static str {
        match self {
            ProfileKind::Zero => "zero",
            ProfileKind::Constant { .. } => "constant",
            ProfileKind::InteriorQuadratic { .. } => "interior-quadratic",
            ProfileKind::DampedOscillatory { .. } => "damped-oscillatory",
            ProfileKind::TaylorAtBoundary { .. } => "taylor-at-boundary",
        }
    }
}

/// A window profile with its critical length ρ_c and derivative cap.
///
/// The dimensionless profile is η̄(ε); the dimensionful window function on the
/// radial chart is η(r) = ρ_c·η̄(ρ_c/r).
#[derive(Debug, Clone)]
pub struct EtaProfile {
    kind: ProfileKind,
    rho_c: f64,
    cap: usize,
}

impl EtaProfile {
    pub fn new(kind: ProfileKind, rho_c: f64) -> Result<EtaProfile, CoreError> {
        if !(rho_c.is_finite() && rho_c > 0.0) {
            return Err(CoreError::invalid(format!(
                "critical length rho_c must be positive and finite, got {rho_c}"
            )));
        }
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(CoreError::invalid(format!(
                    "profile parameter {what} must be finite, got {v}"
                )))
            }
        };
        match &kind {
            ProfileKind::Zero => {}
            ProfileKind::Constant { value } => finite(*value, "value")?,
            ProfileKind::InteriorQuadratic { alpha, beta } => {
                finite(*alpha, "alpha")?;
                finite(*beta, "beta")?;
            }
            ProfileKind::DampedOscillatory { alpha, beta } => {
                finite(*alpha, "alpha")?;
                finite(*beta, "beta")?;
            }
            ProfileKind::TaylorAtBoundary { coeffs } => {
                if coeffs.is_empty() {
                    return Err(CoreError::invalid(
                        "taylor-at-boundary profile needs at least one coefficient",
                    ));
                }
                for (i, c) in coeffs.iter().enumerate() {
                    finite(*c, &format!("coefficient c{i}"))?;
                }
            }
        }
        Ok(EtaProfile {
            kind,
            rho_c,
            cap: DEFAULT_PROFILE_CAP,
        })
    }

    /// η ≡ 0 with unit critical length.
    pub fn vanishing() -> EtaProfile {
        EtaProfile::new(ProfileKind::Zero, 1.0).expect("zero profile is always valid")
    }

    /// Overrides the derivative cap (clamped to the hard ceiling).
    pub fn with_derivative_cap(mut self, cap: usize) -> EtaProfile {
        self.cap = cap.min(MAX_PROFILE_CAP);
        self
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn rho_c(&self) -> f64 {
        self.rho_c
    }

    pub fn derivative_cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ProfileKind::Zero)
    }

    fn check_order(&self, max_order: usize) -> Result<(), CoreError> {
        if max_order > self.cap {
            return Err(CoreError::ProfileOrderExceeded {
                requested: max_order,
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn chart_mismatch(&self) -> CoreError {
        CoreError::ChartMismatch {
            profile: self.kind.name().to_string(),
        }
    }

    /// Derivatives in the profile's native chart: the window radius ρ for the
    /// interior variant, ε for everything else.
    pub fn eval(&self, x: f64, max_order: usize) -> Result<Vec<f64>, CoreError> {
        self.check_order(max_order)?;
        match &self.kind {
            ProfileKind::InteriorQuadratic { alpha, beta } => {
                let mut out = vec![0.0; max_order + 1];
                out[0] = x * x + alpha * self.rho_c * x + beta * self.rho_c * self.rho_c;
                if max_order >= 1 {
                    out[1] = 2.0 * x + alpha * self.rho_c;
                }
                if max_order >= 2 {
                    out[2] = 2.0;
                }
                Ok(out)
            }
            _ => self.eval_epsilon(x, max_order),
        }
    }

    /// Derivatives `[η̄, η̄′, …]` of the dimensionless profile with respect to
    /// ε. Rejects the interior-chart variant and out-of-domain points.
    pub fn eval_epsilon(&self, eps: f64, max_order: usize) -> Result<Vec<f64>, CoreError> {
        self.check_order(max_order)?;
        match &self.kind {
            ProfileKind::Zero => Ok(vec![0.0; max_order + 1]),
            ProfileKind::Constant { value } => {
                let mut out = vec![0.0; max_order + 1];
                out[0] = *value;
                Ok(out)
            }
            ProfileKind::InteriorQuadratic { .. } => Err(self.chart_mismatch()),
            ProfileKind::DampedOscillatory { alpha, beta } => {
                if !(eps > 0.0) {
                    return Err(CoreError::ProfileDomain {
                        profile: self.kind.name().to_string(),
                        chart: "epsilon",
                        value: eps,
                    });
                }
                let t = Jet::variable(eps, max_order);
                let damp = t.scale(-beta).exp();
                let (osc, _) = t.recip()?.scale(*alpha).sin_cos();
                let full = &(&t * &damp) * &osc;
                Ok(full.derivatives())
            }
            ProfileKind::TaylorAtBoundary { coeffs } => {
                let u = eps - 1.0;
                let mut out = vec![0.0; max_order + 1];
                for (order, slot) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, c) in coeffs.iter().enumerate().skip(order) {
                        let mut fall = 1.0;
                        for i in 0..order {
                            fall *= (j - i) as f64;
                        }
                        acc += c * fall * u.powi((j - order) as i32);
                    }
                    *slot = acc;
                }
                Ok(out)
            }
        }
    }

    /// Derivatives of the dimensionless profile η̄ viewed as a function of r
    /// (chain rule through ε = ρ_c/r).
    pub fn eval_r_dimensionless(&self, r: f64, max_order: usize) -> Result<Vec<f64>, CoreError> {
        self.check_order(max_order)?;
        if !(r > 0.0) {
            return Err(CoreError::ProfileDomain {
                profile: self.kind.name().to_string(),
                chart: "r",
                value: r,
            });
        }
        let eps = self.rho_c / r;
        let eps_derivs = self.eval_epsilon(eps, max_order)?;
        epsilon_derivs_to_r(&eps_derivs, eps, r)
    }

    /// Derivatives of the dimensionful window function η(r) = ρ_c·η̄(ρ_c/r)
    /// with respect to r.
    pub fn eval_r(&self, r: f64, max_order: usize) -> Result<Vec<f64>, CoreError> {
        let mut out = self.eval_r_dimensionless(r, max_order)?;
        for v in &mut out {
            *v *= self.rho_c;
        }
        Ok(out)
    }
}

/// An [`EtaProfile`] acts as a window function on the radial chart through its
/// dimensionful form η(r).
impl WindowFn for EtaProfile {
    fn derivs(&self, x: f64, n: usize) -> Result<Vec<f64>, CoreError> {
        self.eval_r(x, n)
    }
}

/// Transforms a derivative array taken with respect to ε at `eps` into the
/// derivative array with respect to r at the matching radius `r` (with
/// ε·r = ρ_c implicitly defined by the pair of abscissae). Exact chain rule
/// via series composition.
pub fn epsilon_derivs_to_r(
    derivs_eps: &[f64],
    eps: f64,
    r: f64,
) -> Result<Vec<f64>, CoreError> {
    chain_through_reciprocal(derivs_eps, eps * r, r)
}

/// Inverse of [`epsilon_derivs_to_r`]: transforms r-chart derivatives at `r`
/// into ε-chart derivatives at the matching `eps`.
pub fn r_derivs_to_epsilon(
    derivs_r: &[f64],
    r: f64,
    eps: f64,
) -> Result<Vec<f64>, CoreError> {
    chain_through_reciprocal(derivs_r, r * eps, eps)
}

/// Both chart maps are x ↦ C/x; composing the outer Taylor data with the
/// inner jet of C/x about `at` gives the transformed derivatives.
fn chain_through_reciprocal(
    outer_derivs: &[f64],
    product: f64,
    at: f64,
) -> Result<Vec<f64>, CoreError> {
    if at == 0.0 {
        return Err(CoreError::invalid(
            "chart transform evaluated at zero abscissa",
        ));
    }
    let order = outer_derivs.len() - 1;
    // Taylor coefficients of the outer function about the image point.
    let mut fact = 1.0;
    let outer_coeffs: Vec<f64> = outer_derivs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            if k > 0 {
                fact *= k as f64;
            }
            d / fact
        })
        .collect();
    let outer = Jet::from_coeffs(outer_coeffs);
    // Inner jet: C/(at + t) − C/at. Subtract the jet's own constant term so
    // the offset vanishes exactly (a recomputed quotient can differ by 1 ulp).
    let mut inner = Jet::variable(at, order).recip()?.scale(product);
    inner = &inner - &Jet::constant(inner.value(), order);
    Ok(outer.compose(&inner).derivatives())
}
