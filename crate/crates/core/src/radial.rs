//! The reduced radial wave equation in both charts, singularity
//! classification, and direct numerical integration.
//!
//! The deformed quantization turns the free radial equation into
//! `R″ + P(r)R′ + Q(r)R = 0` with coefficients built from the Planck function
//! ħ(r) = ħ/(1+η′²). Every coefficient is computed along **two independent
//! routes** — through the Planck function and directly from the
//! wave-operator ratios in the r chart, and by literal transcription vs.
//! mechanical chain rule in the ε = ρ_c/r chart — so transcription errors in
//! either route are caught by cross-checking. The chain-rule route is
//! authoritative in the ε chart.

use crate::error::CoreError;
use crate::ode::{DormandPrince, State};
use crate::profiles::EtaProfile;
use num_complex::Complex64;

/// The radial equation in the dimensionful r chart:
/// `R″ + P(r)R′ + Q(r)R = 0`.
#[derive(Debug, Clone)]
pub struct RadialOde {
    profile: EtaProfile,
    l: u32,
    energy: Complex64,
    hbar: f64,
    mass: f64,
}

impl RadialOde {
    pub fn new(
        profile: EtaProfile,
        l: u32,
        energy: Complex64,
        hbar: f64,
        mass: f64,
    ) -> Result<RadialOde, CoreError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(CoreError::invalid(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(CoreError::invalid(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if !energy.re.is_finite() || !energy.im.is_finite() {
            return Err(CoreError::invalid("energy must be finite"));
        }
        Ok(RadialOde {
            profile,
            l,
            energy,
            hbar,
            mass,
        })
    }

    /// Natural-unit construction (ħ = m = 1) from the dimensionless energy
    /// Ē = 2mEρ_c²/ħ².
    pub fn natural(
        profile: EtaProfile,
        l: u32,
        energy_bar: Complex64,
    ) -> Result<RadialOde, CoreError> {
        let rho_c = profile.rho_c();
        let energy = energy_bar / (2.0 * rho_c * rho_c);
        RadialOde::new(profile, l, energy, 1.0, 1.0)
    }

    pub fn profile(&self) -> &EtaProfile {
        &self.profile
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn energy(&self) -> Complex64 {
        self.energy
    }

    /// The dimensionless energy Ē = 2mEρ_c²/ħ².
    pub fn energy_bar(&self) -> Complex64 {
        let rho_c = self.profile.rho_c();
        2.0 * self.mass * self.energy * rho_c * rho_c / (self.hbar * self.hbar)
    }

    fn window_derivs(&self, r: f64, n: usize) -> Result<Vec<f64>, CoreError> {
        if r == 0.0 {
            return Err(CoreError::SingularEvaluation {
                denominator: String::from("r"),
                expression: String::from("radial coefficient at r = 0"),
            });
        }
        self.profile.eval_r(r, n)
    }

    /// First route for P: logarithmic derivative of the Planck function,
    /// `ħ′(r)/(2ħ(r)) + 2/r`, with ħ(r) and ħ′(r) evaluated as functions.
    pub fn p_planck_route(&self, r: f64) -> Result<f64, CoreError> {
        let d = self.window_derivs(r, 2)?;
        let c = 1.0 + d[1] * d[1];
        let hbar_r = self.hbar / c;
        let hbar_r_prime = -self.hbar * 2.0 * d[1] * d[2] / (c * c);
        Ok(hbar_r_prime / (2.0 * hbar_r) + 2.0 / r)
    }

    /// Second route for P: the ratio of the first-derivative and
    /// second-derivative coefficients of the reduced wave operator,
    /// `−η′η″/(1+η′²) + 2/r`.
    pub fn p_coeff_route(&self, r: f64) -> Result<f64, CoreError> {
        let d = self.window_derivs(r, 2)?;
        let c = 1.0 + d[1] * d[1];
        Ok(-d[1] * d[2] / c + 2.0 / r)
    }

    /// P(r); the coefficient-ratio route is used (the two routes agree
    /// analytically and are cross-checked in the test suite).
    pub fn p(&self, r: f64) -> Result<f64, CoreError> {
        self.p_coeff_route(r)
    }

    /// Q(r) = −(l(l+1)ħ²/r² − 2mE)/(ħ·ħ(r)).
    pub fn q(&self, r: f64) -> Result<Complex64, CoreError> {
        let d = self.window_derivs(r, 1)?;
        let c = 1.0 + d[1] * d[1];
        let ll = (self.l * (self.l + 1)) as f64;
        let centrifugal = Complex64::new(ll * self.hbar * self.hbar / (r * r), 0.0);
        let energy_term = 2.0 * self.mass * self.energy;
        Ok(-(centrifugal - energy_term) * c / (self.hbar * self.hbar))
    }

    /// Transforms to the dimensionless ε chart (ε = ρ_c/r, Ē = 2mEρ_c²/ħ²).
    pub fn to_epsilon(&self) -> Result<EpsilonOde, CoreError> {
        EpsilonOde::new(self.profile.clone(), self.l, self.energy_bar())
    }
}

/// The radial equation in the dimensionless ε chart:
/// `R̄″ + P̄(ε)R̄′ + Q̄(ε)R̄ = 0` with ε = ρ_c/r.
#[derive(Debug, Clone)]
pub struct EpsilonOde {
    profile: EtaProfile,
    l: u32,
    energy_bar: Complex64,
    /// Natural-unit r-chart twin used by the chain-rule route.
    radial: RadialOde,
}

impl EpsilonOde {
    pub fn new(
        profile: EtaProfile,
        l: u32,
        energy_bar: Complex64,
    ) -> Result<EpsilonOde, CoreError> {
        let radial = RadialOde::natural(profile.clone(), l, energy_bar)?;
        Ok(EpsilonOde {
            profile,
            l,
            energy_bar,
            radial,
        })
    }

    pub fn profile(&self) -> &EtaProfile {
        &self.profile
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn energy_bar(&self) -> Complex64 {
        self.energy_bar
    }

    /// Replaces the energy, keeping profile and angular momentum.
    pub fn with_energy_bar(&self, energy_bar: Complex64) -> Result<EpsilonOde, CoreError> {
        EpsilonOde::new(self.profile.clone(), self.l, energy_bar)
    }

    /// Literal transcription route:
    /// P̄(ε) = −ε³η̄′(2η̄′+εη̄″)/(1+ε⁴η̄′²).
    pub fn p_printed(&self, eps: f64) -> Result<f64, CoreError> {
        let d = self.profile.eval_epsilon(eps, 2)?;
        let c = 1.0 + eps.powi(4) * d[1] * d[1];
        Ok(-eps.powi(3) * d[1] * (2.0 * d[1] + eps * d[2]) / c)
    }

    /// Literal transcription route:
    /// Q̄(ε) = −(1/ε⁴)(ε²l(l+1)−Ē)(1+ε⁴η̄′²).
    pub fn q_printed(&self, eps: f64) -> Result<Complex64, CoreError> {
        if eps == 0.0 {
            return Err(CoreError::SingularEvaluation {
                denominator: String::from("epsilon"),
                expression: String::from("Q coefficient at epsilon = 0"),
            });
        }
        let d = self.profile.eval_epsilon(eps, 1)?;
        let c = 1.0 + eps.powi(4) * d[1] * d[1];
        let ll = (self.l * (self.l + 1)) as f64;
        let term = Complex64::new(eps * eps * ll, 0.0) - self.energy_bar;
        Ok(-term * c / eps.powi(4))
    }

    /// Mechanical chain-rule route (authoritative): transform the r-chart
    /// coefficients through ε = ρ_c/r, P̄ = 2/ε − (ρ_c/ε²)·P(ρ_c/ε).
    pub fn p_chain(&self, eps: f64) -> Result<f64, CoreError> {
        if eps == 0.0 {
            return Err(CoreError::SingularEvaluation {
                denominator: String::from("epsilon"),
                expression: String::from("P coefficient at epsilon = 0"),
            });
        }
        let rho_c = self.profile.rho_c();
        let r = rho_c / eps;
        Ok(2.0 / eps - rho_c / (eps * eps) * self.radial.p(r)?)
    }

    /// Mechanical chain-rule route (authoritative):
    /// Q̄ = (ρ_c²/ε⁴)·Q(ρ_c/ε).
    pub fn q_chain(&self, eps: f64) -> Result<Complex64, CoreError> {
        if eps == 0.0 {
            return Err(CoreError::SingularEvaluation {
                denominator: String::from("epsilon"),
                expression: String::from("Q coefficient at epsilon = 0"),
            });
        }
        let rho_c = self.profile.rho_c();
        let r = rho_c / eps;
        Ok(rho_c * rho_c / eps.powi(4) * self.radial.q(r)?)
    }

    /// P̄(ε) by the authoritative route.
    pub fn p(&self, eps: f64) -> Result<f64, CoreError> {
        self.p_chain(eps)
    }

    /// Q̄(ε) by the authoritative route.
    pub fn q(&self, eps: f64) -> Result<Complex64, CoreError> {
        self.q_chain(eps)
    }

    /// Relative gaps between the two coefficient routes at a point, for
    /// strict-mode discrepancy surfacing: (|ΔP|/scale, |ΔQ|/scale).
    pub fn route_discrepancy(&self, eps: f64) -> Result<(f64, f64), CoreError> {
        let pp = self.p_printed(eps)?;
        let pc = self.p_chain(eps)?;
        let qp = self.q_printed(eps)?;
        let qc = self.q_chain(eps)?;
        let dp = (pp - pc).abs() / (1.0 + pc.abs().max(pp.abs()));
        let dq = (qp - qc).norm() / (1.0 + qc.norm().max(qp.norm()));
        Ok((dp, dq))
    }

    /// Right-hand side for the first-order system y = [R̄, R̄′].
    fn rhs(&self, eps: f64, y: &State) -> Result<State, CoreError> {
        let p = self.p(eps)?;
        let q = self.q(eps)?;
        Ok([y[1], -Complex64::new(p, 0.0) * y[1] - q * y[0]])
    }

    /// Adaptive integration from `(from, init)` through the target grid.
    /// Coefficient failures inside the right-hand side surface as located
    /// numerical errors.
    pub fn integrate(
        &self,
        from: f64,
        init: State,
        targets: &[f64],
        settings: &DormandPrince,
    ) -> Result<Vec<State>, CoreError> {
        // The RHS closure cannot return Result; capture the first failure and
        // poison the state so the step controller aborts.
        let failure = std::cell::RefCell::new(None);
        let rhs = |x: f64, y: &State| -> State {
            match self.rhs(x, y) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    [Complex64::new(f64::NAN, 0.0), Complex64::new(f64::NAN, 0.0)]
                }
            }
        };
        let result = settings.integrate_to(rhs, from, init, targets);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        result
    }

    /// Classifies a point of the ε chart by numerically probing the growth
    /// of the coefficients along a geometric approach sequence.
    pub fn classify(&self, point: f64) -> Result<SingularityReport, CoreError> {
        classify_point(self, point)
    }
}

/// Outcome of the two-limit test at a candidate singular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Both coefficients analytic (no pole detected).
    Ordinary,
    /// (ε−ε₀)P̄ and (ε−ε₀)²Q̄ both have finite limits, with a genuine pole
    /// present.
    RegularSingular,
    /// At least one of the limits diverges.
    Irregular,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Ordinary => "ordinary",
            Classification::RegularSingular => "regular-singular",
            Classification::Irregular => "irregular",
        };
        write!(f, "{s}")
    }
}

/// Fitted behavior of one coefficient near a point.
#[derive(Debug, Clone, Copy)]
pub struct LimitEstimate {
    /// Fitted growth exponent s of the raw coefficient, f ~ tˢ as t → 0.
    pub exponent: f64,
    /// Estimated limit of the weighted coefficient ((ε−ε₀)·P̄ or
    /// (ε−ε₀)²·Q̄); infinite when the limit diverges.
    pub limit: Complex64,
}

/// Classification report for one candidate point.
#[derive(Debug, Clone)]
pub struct SingularityReport {
    pub point: f64,
    pub limit_p: LimitEstimate,
    pub limit_q: LimitEstimate,
    pub classification: Classification,
}

impl std::fmt::Display for SingularityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "eps={}: {} (P exponent {:.3}, Q exponent {:.3})",
            self.point, self.classification, self.limit_p.exponent, self.limit_q.exponent
        )
    }
}

/// Probe offsets t_k = 0.1·2^{−k}, k = 4..20.
const PROBE_BASE: f64 = 0.1;
const PROBE_K_MIN: u32 = 4;
const PROBE_K_MAX: u32 = 20;
/// Exponent tolerance for snapping fitted slopes to the classification
/// boundaries.
const EXPONENT_TOL: f64 = 0.01;
/// Coefficient magnitudes below this are treated as an identically-zero
/// (analytic) signal rather than fitted.
const ZERO_FLOOR: f64 = 1e-12;

/// Result of fitting one coefficient's growth near a point.
enum FitOutcome {
    /// Clean power law: the limit estimate is trustworthy in full.
    Conclusive(LimitEstimate, f64),
    /// No single growth exponent (oscillatory signal), but the weighted
    /// samples decay geometrically, so the weighted limit is certified zero.
    /// The recorded exponent is the (unreliable) raw fit, kept as a
    /// diagnostic.
    SqueezedZero(LimitEstimate, f64),
    /// Neither a power law nor a certified decay.
    Inconclusive(f64),
}

impl FitOutcome {
    fn drift(&self) -> f64 {
        match self {
            FitOutcome::Conclusive(_, d)
            | FitOutcome::SqueezedZero(_, d)
            | FitOutcome::Inconclusive(d) => *d,
        }
    }

    fn estimate(&self) -> Option<LimitEstimate> {
        match self {
            FitOutcome::Conclusive(e, _) | FitOutcome::SqueezedZero(e, _) => Some(*e),
            FitOutcome::Inconclusive(_) => None,
        }
    }

    /// True when this outcome certifies a finite weighted limit.
    fn finite(&self) -> bool {
        match self {
            FitOutcome::Conclusive(e, _) => e.limit.is_finite(),
            FitOutcome::SqueezedZero(..) => true,
            FitOutcome::Inconclusive(_) => false,
        }
    }

    /// True when this outcome certifies a divergent weighted limit.
    fn infinite(&self) -> bool {
        matches!(self, FitOutcome::Conclusive(e, _) if !e.limit.is_finite())
    }

    /// True when the raw coefficient is certified analytic (no pole and no
    /// oscillation).
    fn analytic(&self) -> bool {
        matches!(self, FitOutcome::Conclusive(e, _) if e.exponent >= -EXPONENT_TOL)
    }
}

fn classify_point(ode: &EpsilonOde, point: f64) -> Result<SingularityReport, CoreError> {
    let ts: Vec<f64> = (PROBE_K_MIN..=PROBE_K_MAX)
        .map(|k| PROBE_BASE * 0.5f64.powi(k as i32))
        .collect();
    let mut p_samples = Vec::with_capacity(ts.len());
    let mut q_samples = Vec::with_capacity(ts.len());
    for &t in &ts {
        let eps = point + t;
        p_samples.push(Complex64::new(ode.p(eps)?, 0.0));
        q_samples.push(ode.q(eps)?);
    }
    let p_fit = fit_limit(&ts, &p_samples, 1);
    let q_fit = fit_limit(&ts, &q_samples, 2);
    // One certified divergence settles the class as irregular even if the
    // other coefficient has no clean exponent; otherwise both fits must
    // resolve.
    let decisive = p_fit.infinite() || q_fit.infinite();
    let (p_est, q_est) = match (p_fit.estimate(), q_fit.estimate()) {
        (Some(p), Some(q)) => (p, q),
        _ if !decisive => {
            return Err(CoreError::InconclusiveFit {
                point,
                drift_p: p_fit.drift(),
                drift_q: q_fit.drift(),
            })
        }
        (p, q) => {
            // The unresolved side reports an undetermined estimate.
            let fallback = LimitEstimate {
                exponent: f64::NAN,
                limit: Complex64::new(f64::NAN, f64::NAN),
            };
            (p.unwrap_or(fallback), q.unwrap_or(fallback))
        }
    };
    let classification = if decisive || !(p_fit.finite() && q_fit.finite()) {
        Classification::Irregular
    } else if p_fit.analytic() && q_fit.analytic() {
        Classification::Ordinary
    } else {
        Classification::RegularSingular
    };
    Ok(SingularityReport {
        point,
        limit_p: p_est,
        limit_q: q_est,
        classification,
    })
}

/// Fits f ~ tˢ on a geometric sample set and estimates lim t^weight·f.
fn fit_limit(ts: &[f64], samples: &[Complex64], weight: i32) -> FitOutcome {
    let max_mag = samples.iter().map(|s| s.norm()).fold(0.0f64, f64::max);
    if max_mag < ZERO_FLOOR {
        // Identically-zero signal: analytic, limit zero.
        return FitOutcome::Conclusive(
            LimitEstimate {
                exponent: 0.0,
                limit: Complex64::new(0.0, 0.0),
            },
            0.0,
        );
    }
    // Least-squares slope of log|f| against log t, discarding dead samples.
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(samples)
        .filter(|(_, s)| s.norm() > max_mag * 1e-13)
        .map(|(t, s)| (t.ln(), s.norm().ln()))
        .collect();
    if pts.len() < 4 {
        return squeeze_or_give_up(ts, samples, weight, f64::INFINITY);
    }
    let slope_of = |pts: &[(f64, f64)]| -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let slope = slope_of(&pts);
    // Drift diagnostic: slope difference between the two halves of the
    // sequence. Smooth power laws drift to zero; mixtures don't.
    let half = pts.len() / 2;
    let drift = (slope_of(&pts[..half]) - slope_of(&pts[half..])).abs();
    if drift > 0.25 && max_mag > 1e-8 {
        return squeeze_or_give_up(ts, samples, weight, drift);
    }
    let weighted_exponent = slope + weight as f64;
    let limit = if weighted_exponent > EXPONENT_TOL {
        Complex64::new(0.0, 0.0)
    } else if weighted_exponent >= -EXPONENT_TOL {
        // Finite nonzero limit: average the tail of t^weight·f.
        let tail = ts.len().saturating_sub(3);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in tail..ts.len() {
            acc += samples[i] * ts[i].powi(weight);
        }
        acc / (ts.len() - tail) as f64
    } else {
        Complex64::new(f64::INFINITY, 0.0)
    };
    FitOutcome::Conclusive(
        LimitEstimate {
            exponent: slope,
            limit,
        },
        drift,
    )
}

/// Fall-back when the power-law fit fails: squeeze the weighted limit
/// directly. If max|t^w·f| over the innermost quarter of the approach
/// sequence has dropped well below the outermost quarter, the weighted
/// samples decay and the limit is zero regardless of the oscillation that
/// broke the fit.
fn squeeze_or_give_up(ts: &[f64], samples: &[Complex64], weight: i32, drift: f64) -> FitOutcome {
    let weighted: Vec<f64> = ts
        .iter()
        .zip(samples)
        .map(|(t, s)| (s * t.powi(weight)).norm())
        .collect();
    let quarter = (weighted.len() / 4).max(1);
    let head = weighted[..quarter].iter().copied().fold(0.0f64, f64::max);
    let tail = weighted[weighted.len() - quarter..]
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    if tail <= 0.05 * head.max(ZERO_FLOOR) {
        FitOutcome::SqueezedZero(
            LimitEstimate {
                exponent: f64::NAN,
                limit: Complex64::new(0.0, 0.0),
            },
            drift,
        )
    } else {
        FitOutcome::Inconclusive(drift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::ProfileKind;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn damped() -> EtaProfile {
        EtaProfile::new(
            ProfileKind::DampedOscillatory {
                alpha: 1.0,
                beta: 1.0,
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn free_particle_coefficients() {
        // η ≡ 0, 2mE/ħ² = 1, l = 0: P = 2/r, Q = 1.
        let ode = RadialOde::new(EtaProfile::vanishing(), 0, c(0.5), 1.0, 1.0).unwrap();
        let r = 1.7;
        assert!((ode.p_planck_route(r).unwrap() - 2.0 / r).abs() < 1e-15);
        assert!((ode.p_coeff_route(r).unwrap() - 2.0 / r).abs() < 1e-15);
        assert!((ode.q(r).unwrap() - c(1.0)).norm() < 1e-15);
        // l = 2 brings the centrifugal term back.
        let ode2 = RadialOde::new(EtaProfile::vanishing(), 2, c(0.5), 1.0, 1.0).unwrap();
        let expect = 1.0 - 6.0 / (r * r);
        assert!((ode2.q(r).unwrap() - c(expect)).norm() < 1e-14);
    }

    #[test]
    fn linear_window_keeps_planck_constant() {
        // η̄(ε) = constant·? A window linear in r has η″ = 0, so ħ(r) is
        // constant and both P routes reduce to 2/r exactly. The boundary-data
        // profile η̄ = c·ε t gives η(r) = ρ_c²c/r which is not linear, so use
        // a profile with η̄′ constant in r: η̄(ε) = c/ε ⇒ η(r) = c·r.
        // That needs negative powers, outside the polynomial data; instead
        // verify on the vanishing profile and on explicit smallness of the
        // η′η″ product for the boundary profile.
        let p = EtaProfile::new(
            ProfileKind::TaylorAtBoundary {
                coeffs: vec![0.3, 0.1],
            },
            1.0,
        )
        .unwrap();
        let ode = RadialOde::new(p, 0, c(1.0), 1.0, 1.0).unwrap();
        for r in [0.8, 1.1, 2.4] {
            let a = ode.p_planck_route(r).unwrap();
            let b = ode.p_coeff_route(r).unwrap();
            assert!(
                (a - b).abs() <= 1e-13 * (1.0 + a.abs()),
                "routes differ at r={r}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn r_zero_is_singular() {
        let ode = RadialOde::new(EtaProfile::vanishing(), 0, c(1.0), 1.0, 1.0).unwrap();
        assert!(matches!(
            ode.p(0.0),
            Err(CoreError::SingularEvaluation { .. })
        ));
    }

    #[test]
    fn epsilon_chart_free_particle() {
        // η ≡ 0: P̄ = 0 and Q̄ = −(ε²l(l+1) − Ē)/ε⁴.
        let ode = EpsilonOde::new(EtaProfile::vanishing(), 1, c(2.0)).unwrap();
        for eps in [0.4, 1.0, 1.3] {
            assert!(ode.p_printed(eps).unwrap().abs() < 1e-15);
            assert!(ode.p_chain(eps).unwrap().abs() < 1e-12);
            let expect = -(eps * eps * 2.0 - 2.0) / eps.powi(4);
            assert!((ode.q_printed(eps).unwrap() - c(expect)).norm() < 1e-12);
            assert!((ode.q_chain(eps).unwrap() - c(expect)).norm() < 1e-12);
        }
        // At the boundary with flat profile and l = 0: Q̄(1) = Ē.
        let ode0 = EpsilonOde::new(EtaProfile::vanishing(), 0, c(2.0)).unwrap();
        assert!((ode0.q(1.0).unwrap() - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn printed_and_chain_routes_agree() {
        let ode = EpsilonOde::new(damped(), 1, c(2.0)).unwrap();
        for i in 0..25 {
            let eps = 0.3 + 1.2 * i as f64 / 24.0;
            let (dp, dq) = ode.route_discrepancy(eps).unwrap();
            assert!(dp < 1e-9, "P routes differ at eps={eps}: {dp}");
            assert!(dq < 1e-9, "Q routes differ at eps={eps}: {dq}");
        }
    }

    #[test]
    fn energy_bar_definition() {
        let p = EtaProfile::new(ProfileKind::Zero, 2.0).unwrap();
        let ode = RadialOde::new(p, 0, c(3.0), 2.0, 1.5).unwrap();
        // Ē = 2mEρ_c²/ħ² = 2·1.5·3·4/4 = 9.
        assert!((ode.energy_bar() - c(9.0)).norm() < 1e-14);
    }

    #[test]
    fn classify_boundary_and_infinity() {
        // ε = 0 (spatial infinity): irregular for any nonzero energy.
        for profile in [EtaProfile::vanishing(), damped()] {
            let ode = EpsilonOde::new(profile, 0, c(2.0)).unwrap();
            let rep0 = ode.classify(0.0).unwrap();
            assert_eq!(rep0.classification, Classification::Irregular, "{rep0}");
            assert!(rep0.limit_q.limit.re.is_infinite());
            // ε = 1 (window boundary): smooth coefficients, ordinary point.
            let rep1 = ode.classify(1.0).unwrap();
            assert_eq!(rep1.classification, Classification::Ordinary, "{rep1}");
            // A generic interior point is ordinary too.
            let rep_mid = ode.classify(0.5).unwrap();
            assert_eq!(rep_mid.classification, Classification::Ordinary, "{rep_mid}");
        }
    }

    #[test]
    fn integrates_free_particle_to_closed_form() {
        // η ≡ 0, l = 0: R̄(ε) = ε·sin(√Ē/ε) solves the ε-chart equation.
        let e_bar = 2.0f64;
        let ode = EpsilonOde::new(EtaProfile::vanishing(), 0, c(e_bar)).unwrap();
        let k = e_bar.sqrt();
        let r_exact = |eps: f64| eps * (k / eps).sin();
        let r_prime_exact =
            |eps: f64| (k / eps).sin() - (k / eps) * (k / eps).cos();
        let from = 1.0;
        let init = [c(r_exact(from)), c(r_prime_exact(from))];
        let targets: Vec<f64> = (1..=6).map(|i| 1.0 + 0.05 * i as f64).collect();
        let dp = DormandPrince::default();
        let states = ode.integrate(from, init, &targets, &dp).unwrap();
        for (eps, s) in targets.iter().zip(&states) {
            assert!(
                (s[0] - c(r_exact(*eps))).norm() < 1e-8,
                "at eps={eps}: {} vs {}",
                s[0],
                r_exact(*eps)
            );
        }
        // And to the left of the boundary.
        let targets_left: Vec<f64> = (1..=3).map(|i| 1.0 - 0.05 * i as f64).collect();
        let states_left = ode.integrate(from, init, &targets_left, &dp).unwrap();
        for (eps, s) in targets_left.iter().zip(&states_left) {
            assert!((s[0] - c(r_exact(*eps))).norm() < 1e-8, "at eps={eps}");
        }
    }

    #[test]
    fn interior_profile_is_rejected_by_the_pipeline() {
        let p = EtaProfile::new(
            ProfileKind::InteriorQuadratic {
                alpha: 1.0,
                beta: 1.0,
            },
            1.0,
        )
        .unwrap();
        let ode = EpsilonOde::new(p, 0, c(1.0)).unwrap();
        assert!(matches!(
            ode.q(0.8),
            Err(CoreError::ChartMismatch { .. })
        ));
    }
}
