//! Boundary-series machinery at the window edge ε = 1: Taylor data for the
//! wave-equation coefficients, indicial exponents, the series recurrence,
//! truncated-determinant energy spectra, and the consistency conditions the
//! series impose on the window profile.
//!
//! Everything is phrased in natural units (ħ = m = 1) and the dimensionless
//! energy Ē = 2mEρ_c²/ħ²; [`dimensional_energy`] restores units at the edge.
//!
//! The determinant route treats det M(Ē) as a polynomial of known degree
//! bound: M's entries are affine in Ē, so the determinant is sampled at
//! Chebyshev-spaced real energies, interpolated exactly, and rooted through a
//! companion matrix. No realness assumption is made about the roots — complex
//! energies are physical here (the imaginary part is a transition width into
//! the window).

use crate::error::CoreError;
use crate::jet::Jet;
use crate::profiles::EtaProfile;
use crate::radial::{Classification, EpsilonOde};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Taylor data of the ε-chart coefficients at the window boundary ε = 1.
///
/// `p[n]` is the n-th Taylor coefficient of P̄; the second coefficient is
/// kept as an affine form q̄_n = A_n + B_n·Ē so a single expansion serves
/// every energy.
#[derive(Debug, Clone)]
pub struct TaylorCoeffs {
    p: Vec<f64>,
    q_const: Vec<f64>,
    q_energy: Vec<f64>,
    /// Taylor coefficients of κ(ε) = −(1+ε⁴η̄′²)/ε⁴ at ε = 1, kept for the
    /// alternative κ-derivative construction of q̄_n.
    kappa: Vec<f64>,
    l: u32,
    rho_c: f64,
    truncation: usize,
}

impl TaylorCoeffs {
    /// Expands the boundary coefficients of the given profile to order `n`.
    /// The profile must be smooth to order n+2 in the ε chart.
    pub fn new(profile: &EtaProfile, l: u32, n: usize) -> Result<TaylorCoeffs, CoreError> {
        let derivs = profile.eval_epsilon(1.0, n + 2)?;
        let eta: Jet = {
            let mut coeffs = Vec::with_capacity(n + 3);
            let mut fact = 1.0f64;
            for (k, d) in derivs.iter().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                }
                coeffs.push(d / fact);
            }
            Jet::from_coeffs(coeffs)
        };
        let d1 = eta.differentiate().truncated(n);
        let d2 = eta.differentiate().differentiate().truncated(n);
        let eps = {
            let mut coeffs = vec![0.0; n + 1];
            coeffs[0] = 1.0;
            if n >= 1 {
                coeffs[1] = 1.0;
            }
            Jet::from_coeffs(coeffs)
        };
        let one = Jet::constant(1.0, n);
        let d1_sq = &d1 * &d1;
        let denom = &one + &(&eps.powi(4)? * &d1_sq);
        // P̄ = −ε³·η̄′·(2η̄′ + ε·η̄″)/(1 + ε⁴η̄′²)
        let p_num = &(&eps.powi(3)? * &d1) * &(&d1.scale(2.0) + &(&eps * &d2));
        let p_jet = (-&p_num).div(&denom)?;
        // κ = −ε⁻⁴ − η̄′²  and  ε²κ = −ε⁻² − ε²η̄′²
        let kappa = &(-&eps.powi(-4)?) - &d1_sq;
        let kappa_eps2 = &(-&eps.powi(-2)?) - &(&eps.powi(2)? * &d1_sq);
        // Q̄ = κ·(ε²·l(l+1) − Ē) = l(l+1)·(ε²κ) − Ē·κ
        let ll = (l * (l + 1)) as f64;
        let q_const = kappa_eps2.coeffs().iter().map(|k| ll * k).collect();
        let q_energy = kappa.coeffs().iter().map(|k| -k).collect();
        Ok(TaylorCoeffs {
            p: p_jet.coeffs().to_vec(),
            q_const,
            q_energy,
            kappa: kappa.coeffs().to_vec(),
            l,
            rho_c: profile.rho_c(),
            truncation: n,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn rho_c(&self) -> f64 {
        self.rho_c
    }

    /// Taylor coefficients p̄_0..p̄_N of the first-derivative coefficient.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// The affine form of q̄_n: (A_n, B_n) with q̄_n = A_n + B_n·Ē.
    pub fn q_affine(&self, n: usize) -> (Complex64, Complex64) {
        (c64(self.q_const[n]), c64(self.q_energy[n]))
    }

    /// q̄_n evaluated at a given dimensionless energy.
    pub fn q_at(&self, n: usize, energy_bar: Complex64) -> Complex64 {
        c64(self.q_const[n]) + c64(self.q_energy[n]) * energy_bar
    }

    /// The alternative construction of q̄_n from derivatives of
    /// κ(ε) = −(1+ε⁴η̄′²)/ε⁴:
    /// κ⁽ⁿ⁾(1)(l(l+1)−Ē) + n·l(l+1)(κ⁽ⁿ⁻¹⁾(1) + (n−1)κ⁽ⁿ⁻²⁾(1)).
    ///
    /// This formula is kept verbatim for comparison; it is reconciled with
    /// the direct Taylor expansion only through the measured normalization of
    /// [`TaylorCoeffs::kappa_normalization`], and its l-dependent part is not
    /// asserted anywhere.
    pub fn kappa_route_q(&self, n: usize, energy_bar: Complex64) -> Complex64 {
        let deriv = |i: i64| -> f64 {
            if i < 0 {
                return 0.0;
            }
            let i = i as usize;
            // κ⁽ⁱ⁾(1) = i!·(Taylor coefficient i)
            let mut fact = 1.0f64;
            for j in 2..=i {
                fact *= j as f64;
            }
            self.kappa[i] * fact
        };
        let ll = (self.l * (self.l + 1)) as f64;
        let nf = n as f64;
        c64(deriv(n as i64)) * (c64(ll) - energy_bar)
            + c64(nf * ll * (deriv(n as i64 - 1) + (nf - 1.0) * deriv(n as i64 - 2)))
    }

    /// Measured ratio between the κ-derivative route's Ē-coefficient and the
    /// direct Taylor expansion's, for each order. The two constructions use
    /// raw derivatives and Taylor coefficients respectively, so the measured
    /// constant is n! — reported, not assumed.
    pub fn kappa_normalization(&self) -> Vec<f64> {
        let mut fact = 1.0f64;
        (0..=self.truncation)
            .map(|n| {
                if n > 1 {
                    fact *= n as f64;
                }
                let direct = self.q_energy[n];
                if direct.abs() < 1e-300 {
                    f64::NAN
                } else {
                    // κ-route Ē-coefficient is −κ⁽ⁿ⁾(1) = −n!·κ_n.
                    -(self.kappa[n] * fact) / direct
                }
            })
            .collect()
    }
}

/// Roots of the exponent equation k(k−1) + p₀*k + q₀* = 0 at the expansion
/// point, where p₀*, q₀* are the weighted coefficient limits.
#[derive(Debug, Clone, Copy)]
pub struct IndicialRoots {
    pub k_minus: Complex64,
    pub k_plus: Complex64,
    pub double_root: bool,
}

impl IndicialRoots {
    pub fn from_limits(p0: Complex64, q0: Complex64) -> IndicialRoots {
        let half = (c64(1.0) - p0) / 2.0;
        let disc = half * half - q0;
        let root = disc.sqrt();
        let (a, b) = (half - root, half + root);
        let (k_minus, k_plus) = if a.re <= b.re { (a, b) } else { (b, a) };
        IndicialRoots {
            k_minus,
            k_plus,
            double_root: root.norm() < 1e-9 * (1.0 + half.norm()),
        }
    }
}

/// Indicial exponents of the equation at the window boundary.
/// Refuses irregular points with the full classification report.
pub fn indicial_exponents(ode: &EpsilonOde) -> Result<IndicialRoots, CoreError> {
    let report = ode.classify(1.0)?;
    if report.classification == Classification::Irregular {
        return Err(CoreError::IrregularPoint {
            report: report.to_string(),
        });
    }
    Ok(IndicialRoots::from_limits(
        report.limit_p.limit,
        report.limit_q.limit,
    ))
}

/// Series coefficients a₀..a_N for R̄ = Σ a_λ(ε−1)^{λ+k} by the standard
/// recurrence. For k = 0 the λ = 1 pivot vanishes with a vanishing
/// right-hand side, leaving a₁ as the free slope of the second solution
/// branch; the convention a₁ = 0 is applied (see
/// [`frobenius_with_slope`] to choose it explicitly).
pub fn frobenius_coeffs(
    coeffs: &TaylorCoeffs,
    k: u32,
    energy_bar: Complex64,
    a0: Complex64,
    n: usize,
) -> Result<Vec<Complex64>, CoreError> {
    frobenius_series(coeffs, k, energy_bar, a0, None, n)
}

/// The k = 0 series with both free coefficients (value and slope at the
/// boundary) chosen by the caller.
pub fn frobenius_with_slope(
    coeffs: &TaylorCoeffs,
    energy_bar: Complex64,
    a0: Complex64,
    a1: Complex64,
    n: usize,
) -> Result<Vec<Complex64>, CoreError> {
    frobenius_series(coeffs, 0, energy_bar, a0, Some(a1), n)
}

fn frobenius_series(
    coeffs: &TaylorCoeffs,
    k: u32,
    energy_bar: Complex64,
    a0: Complex64,
    a1_override: Option<Complex64>,
    n: usize,
) -> Result<Vec<Complex64>, CoreError> {
    if a0 == Complex64::new(0.0, 0.0) {
        return Err(CoreError::invalid("leading series coefficient must be nonzero"));
    }
    if n > coeffs.truncation() + 1 {
        return Err(CoreError::invalid(format!(
            "series order {n} needs coefficient data to order {}, have {}",
            n.saturating_sub(1),
            coeffs.truncation()
        )));
    }
    let mut a = Vec::with_capacity(n + 1);
    a.push(a0);
    for s in 1..=n {
        let pivot = ((s + k as usize) * (s + k as usize - 1)) as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for (lambda, a_l) in a.iter().enumerate() {
            let mut coeff = Complex64::new(0.0, 0.0);
            let weight = lambda + k as usize;
            if weight > 0 {
                coeff += c64(weight as f64 * coeffs.p[s - 1 - lambda]);
            }
            if lambda + 2 <= s {
                coeff += coeffs.q_at(s - 2 - lambda, energy_bar);
            }
            sum += coeff * a_l;
        }
        if pivot == 0.0 {
            if let Some(a1) = a1_override {
                a.push(a1);
            } else if sum.norm() <= 1e-12 * (1.0 + a0.norm()) {
                a.push(Complex64::new(0.0, 0.0));
            } else {
                return Err(CoreError::LogarithmicCase {
                    order: s,
                    residual: sum.norm(),
                });
            }
        } else {
            a.push(-sum / pivot);
        }
    }
    Ok(a)
}

/// Evaluates the partial sum Σ a_λ(ε−1)^{λ+k} and its first two derivatives.
pub fn frobenius_eval(a: &[Complex64], k: u32, eps: f64) -> (Complex64, Complex64, Complex64) {
    // Shift into a plain polynomial in u = ε−1 and Horner it with the two
    // derivative accumulators.
    let u = c64(eps - 1.0);
    let mut b = vec![Complex64::new(0.0, 0.0); k as usize];
    b.extend_from_slice(a);
    let mut v = Complex64::new(0.0, 0.0);
    let mut d1 = Complex64::new(0.0, 0.0);
    let mut d2 = Complex64::new(0.0, 0.0);
    for &coeff in b.iter().rev() {
        d2 = d2 * u + d1 * 2.0;
        d1 = d1 * u + v;
        v = v * u + coeff;
    }
    (v, d1, d2)
}

/// One energy root of a truncated determinant condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    /// Indicial exponent of the branch (0 or 1).
    pub k: u32,
    /// Truncation order of the determinant system.
    pub n: usize,
    pub l: u32,
    /// Dimensionless energy root Ē.
    pub energy_bar: Complex64,
    /// Dimensional energy once unit constants are supplied; `None` from the
    /// core routines (see [`dimensional_energy`]).
    pub energy_si: Option<Complex64>,
    /// The profile-dependent remainder f = Ē − l(l+1) of the decomposition
    /// Ē = l² + l + f.
    pub remainder: Complex64,
    /// |det M(Ē)| at the root, normalized by the Hadamard row bound of M.
    pub residual: f64,
    /// Residuals of the next (truncated-away) recurrence equations at this
    /// root — conditions on the window profile's boundary derivatives.
    /// Populated for k = 1 when the Taylor data reaches one order past the
    /// truncation; empty otherwise.
    pub eta_conditions: Vec<Complex64>,
}

impl SpectrumEntry {
    /// A complex energy means the state leaks into the window; the imaginary
    /// part is the transition width.
    pub fn is_transition(&self) -> bool {
        self.energy_bar.im != 0.0
    }
}

/// Restores units: E = Ē·ħ²/(2mρ_c²).
pub fn dimensional_energy(energy_bar: Complex64, hbar: f64, mass: f64, rho_c: f64) -> Complex64 {
    energy_bar * hbar * hbar / (2.0 * mass * rho_c * rho_c)
}

/// Assembles the truncated (n+1)×(n+1) series system on (a₀..a_n) for
/// exponent k. Row i is recurrence equation s = (2−k)+i with every
/// coefficient beyond column n dropped.
fn assemble_matrix(
    coeffs: &TaylorCoeffs,
    k: u32,
    n: usize,
    energy_bar: Complex64,
) -> DMatrix<Complex64> {
    let s0 = 2 - k as usize;
    DMatrix::from_fn(n + 1, n + 1, |i, lambda| {
        let s = s0 + i;
        let mut entry = Complex64::new(0.0, 0.0);
        if lambda == s {
            entry += c64(((s + k as usize) * (s + k as usize - 1)) as f64);
        }
        let weight = lambda + k as usize;
        if weight > 0 && lambda + 1 <= s {
            entry += c64(weight as f64 * coeffs.p[s - 1 - lambda]);
        }
        if lambda + 2 <= s {
            entry += coeffs.q_at(s - 2 - lambda, energy_bar);
        }
        entry
    })
}

/// det M(Ē) for real Ē, evaluated in real arithmetic.
fn det_at_real(coeffs: &TaylorCoeffs, k: u32, n: usize, energy_bar: f64) -> f64 {
    let s0 = 2 - k as usize;
    let m = DMatrix::from_fn(n + 1, n + 1, |i, lambda| {
        let s = s0 + i;
        let mut entry = 0.0;
        if lambda == s {
            entry += ((s + k as usize) * (s + k as usize - 1)) as f64;
        }
        let weight = lambda + k as usize;
        if weight > 0 && lambda + 1 <= s {
            entry += weight as f64 * coeffs.p[s - 1 - lambda];
        }
        if lambda + 2 <= s {
            entry += coeffs.q_const[s - 2 - lambda] + coeffs.q_energy[s - 2 - lambda] * energy_bar;
        }
        entry
    });
    m.determinant()
}

/// Hadamard bound Π‖row‖₂ of the system matrix — the natural scale for
/// determinant residuals.
fn hadamard_scale(m: &DMatrix<Complex64>) -> f64 {
    let mut scale = 1.0f64;
    for i in 0..m.nrows() {
        let norm: f64 = (0..m.ncols()).map(|j| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        scale *= norm.max(1e-150);
    }
    scale
}

/// Interpolates samples (xs, ys) into monomial coefficients via Newton
/// divided differences; exact for polynomial data of degree < len.
fn poly_from_samples(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let m = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // Expand the Newton form Σ dd_j·Π_{i<j}(x−x_i) into monomials.
    let mut coeffs = vec![0.0; m];
    let mut basis = vec![0.0; m];
    basis[0] = 1.0;
    let mut basis_len = 1;
    for (j, d) in dd.iter().enumerate() {
        for i in 0..basis_len {
            coeffs[i] += d * basis[i];
        }
        if j + 1 < m {
            // basis ← basis·(x − x_j)
            for i in (1..=basis_len).rev() {
                basis[i] = basis[i - 1] - xs[j] * basis[i];
            }
            basis[0] *= -xs[j];
            basis_len += 1;
        }
    }
    coeffs
}

/// Roots of a real-coefficient polynomial through the companion matrix of
/// its deflated monic form, with one Newton polish per root.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let max_c = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut degree = coeffs.len() - 1;
    while degree > 0 && coeffs[degree].abs() <= 1e-9 * max_c {
        degree -= 1;
    }
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let companion = DMatrix::from_fn(degree, degree, |i, j| {
        if j + 1 == degree {
            -coeffs[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in coeffs[..=degree].iter().rev() {
            d = d * z + v;
            v = v * z + c64(c);
        }
        (v, d)
    };
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&z| {
            let (v, d) = eval(z);
            if d.norm() > 1e-300 {
                let step = v / d;
                if step.norm() < 0.1 * (1.0 + z.norm()) {
                    return z - step;
                }
            }
            z
        })
        .collect()
}

/// Energy roots of the truncated determinant condition det M(Ē) = 0 for
/// exponent k at truncation order n, sorted by real then imaginary part.
pub fn determinant_spectrum(
    coeffs: &TaylorCoeffs,
    k: u32,
    n: usize,
) -> Result<Vec<SpectrumEntry>, CoreError> {
    if k > 1 {
        return Err(CoreError::invalid(format!(
            "exponent k must be 0 or 1, got {k}"
        )));
    }
    if n > coeffs.truncation() {
        return Err(CoreError::invalid(format!(
            "truncation {n} exceeds available coefficient order {}",
            coeffs.truncation()
        )));
    }
    // det M is a polynomial in Ē of degree ≤ n+1 (every entry is affine):
    // sample at n+2 Chebyshev-spaced real energies and interpolate exactly.
    let ll = (coeffs.l * (coeffs.l + 1)) as f64;
    let a_scale = coeffs.q_const.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let span = 4.0 + 2.0 * ll + 2.0 * a_scale;
    let m_samples = n + 2;
    let xs: Vec<f64> = (0..m_samples)
        .map(|j| span * (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * m_samples) as f64).cos())
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| det_at_real(coeffs, k, n, x)).collect();
    // Reference scale at a generic (imaginary) energy: at a root the matrix
    // itself shrinks, so normalizing there would hide a good residual.
    let reference = assemble_matrix(coeffs, k, n, Complex64::new(0.0, span));
    let scale = hadamard_scale(&reference);
    if ys.iter().all(|y| y.abs() <= 1e-12 * scale) {
        return Err(CoreError::StructuralDegeneracy { truncation: n });
    }
    let poly = poly_from_samples(&xs, &ys);
    let mut roots = polynomial_roots(&poly);
    // Conjugate-pair rounding noise: snap nearly-real roots.
    for z in &mut roots {
        if z.im.abs() < 1e-9 * (1.0 + z.re.abs()) {
            *z = c64(z.re);
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let entries = roots
        .into_iter()
        .map(|root| {
            let m_at_root = assemble_matrix(coeffs, k, n, root);
            let residual = m_at_root.determinant().norm() / scale;
            let eta_conditions = if k == 1 && coeffs.truncation() >= n + 1 {
                let a = frobenius_series(coeffs, 1, root, c64(1.0), None, n)
                    .expect("k=1 pivots never vanish");
                vec![closing_condition(coeffs, 1, root, &a, n + 2)]
            } else {
                Vec::new()
            };
            SpectrumEntry {
                k,
                n,
                l: coeffs.l,
                energy_bar: root,
                energy_si: None,
                remainder: root - c64(ll),
                residual,
                eta_conditions,
            }
        })
        .collect();
    Ok(entries)
}

/// Value of recurrence equation `s` on the truncated coefficient vector `a`
/// (terms beyond the vector are dropped) — the residual left over when the
/// series is cut.
fn closing_condition(
    coeffs: &TaylorCoeffs,
    k: u32,
    energy_bar: Complex64,
    a: &[Complex64],
    s: usize,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (lambda, a_l) in a.iter().enumerate() {
        let mut coeff = Complex64::new(0.0, 0.0);
        if lambda == s {
            coeff += c64(((s + k as usize) * (s + k as usize - 1)) as f64);
        }
        let weight = lambda + k as usize;
        if weight > 0 && lambda + 1 <= s {
            coeff += c64(weight as f64 * coeffs.p[s - 1 - lambda]);
        }
        if lambda + 2 <= s {
            coeff += coeffs.q_at(s - 2 - lambda, energy_bar);
        }
        sum += coeff * a_l;
    }
    sum
}

/// The continuous branch that the order-0 spectral condition would admit,
/// reported and rejected.
///
/// The condition q̄₀·a₀ = 0 with a₀ ≠ 0 factors as
/// (1+η̄′²(1))·(Ē − l(l+1)) = 0. Zeroing the first, Ē-independent factor
/// would allow any energy, but forces η̄′(1) = ±i — a non-real window slope
/// that makes the solution blow up at the boundary and breaks the operator
/// representation — so only the discrete factor is kept.
#[derive(Debug, Clone)]
pub struct BranchReport {
    /// Always true: the continuous branch is never accepted.
    pub rejected: bool,
    /// The Ē-independent factor 1+η̄′²(1) of q̄₀ (the branch would need it
    /// to vanish).
    pub energy_factor: Complex64,
    /// Boundary window values ±i that the alternate reading of the branch
    /// condition would impose; reported, never asserted.
    pub boundary_values: [Complex64; 2],
    pub reason: String,
}

pub fn rejected_branch(coeffs: &TaylorCoeffs) -> BranchReport {
    let (_, b0) = coeffs.q_affine(0);
    BranchReport {
        rejected: true,
        energy_factor: b0,
        boundary_values: [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)],
        reason: String::from(
            "continuous branch needs 1+eta'^2(1)=0, i.e. an imaginary window slope; \
             it diverges at the boundary and breaks the operator representation",
        ),
    }
}

/// The k = 1, order-1 energy by three routes.
#[derive(Debug, Clone)]
pub struct FirstExcited {
    /// The determinant-machinery root (authoritative).
    pub entry: SpectrumEntry,
    /// Closed form from eliminating a₁ in the order-1 system:
    /// Ē = l(l+1) + (p̄₀² − p̄₁)/(1+η̄′²(1)). Agrees with `entry` up to
    /// rounding.
    pub closed_form: Complex64,
    /// A literal transcription of an alternative closed form whose
    /// bracketing is ambiguous in its source; evaluated as
    /// l(l+1) − (p̄₀ + p̄₁)/(1+η̄′²(1)) and reported for diagnostics only,
    /// never asserted. It matches the other routes exactly when p̄₀ ∈ {0,−1}.
    pub printed_form: Complex64,
}

pub fn first_excited(coeffs: &TaylorCoeffs, profile: &EtaProfile) -> Result<FirstExcited, CoreError> {
    debug_assert_eq!(coeffs.rho_c(), profile.rho_c());
    let entries = determinant_spectrum(coeffs, 1, 1)?;
    let entry = entries
        .into_iter()
        .next()
        .ok_or_else(|| CoreError::RootSearchFailed {
            what: String::from("order-1 determinant has no energy root"),
            iterations: 0,
        })?;
    let ll = (coeffs.l * (coeffs.l + 1)) as f64;
    let (_, b0) = coeffs.q_affine(0);
    let closed_form = c64(ll) + c64(coeffs.p[0] * coeffs.p[0] - coeffs.p[1]) / b0;
    let printed_form = c64(ll) - c64(coeffs.p[0] + coeffs.p[1]) / b0;
    Ok(FirstExcited {
        entry,
        closed_form,
        printed_form,
    })
}

/// The k = 1 boundary system one order past square: solved coefficients,
/// the spectral energy, and the leftover consistency residual that
/// constrains the window profile's boundary derivatives.
#[derive(Debug, Clone)]
pub struct EtaConditions {
    pub order: usize,
    /// The spectral root used (lowest real part at truncation order−1).
    pub energy_bar: Complex64,
    /// Solved series coefficients a₀..a_{order−1} with a₀ = 1.
    pub a: Vec<Complex64>,
    /// Values of the equations left over after elimination — zero exactly
    /// when the profile's boundary derivatives are self-consistent.
    pub residuals: Vec<Complex64>,
    /// Human-readable linear forms of the leftover equations.
    pub rendered: Vec<String>,
}

/// Builds the k = 1 boundary equations through order+1 on a₀..a_{order−1},
/// eliminates the determined coefficients, fixes Ē from the square
/// subsystem, and returns the leftover residual(s).
pub fn eta_boundary_conditions(
    coeffs: &TaylorCoeffs,
    order: usize,
) -> Result<EtaConditions, CoreError> {
    if order < 2 {
        return Err(CoreError::invalid(format!(
            "boundary-condition order must be at least 2, got {order}"
        )));
    }
    if coeffs.truncation() < order {
        return Err(CoreError::invalid(format!(
            "boundary-condition order {order} needs coefficient data to the same order, have {}",
            coeffs.truncation()
        )));
    }
    let entries = determinant_spectrum(coeffs, 1, order - 1)?;
    let entry = entries.first().ok_or_else(|| CoreError::RootSearchFailed {
        what: format!("order-{} determinant has no energy root", order - 1),
        iterations: 0,
    })?;
    let energy_bar = entry.energy_bar;
    let a = frobenius_series(coeffs, 1, energy_bar, c64(1.0), None, order - 1)?;
    let s = order + 1;
    let residuals = vec![closing_condition(coeffs, 1, energy_bar, &a, s)];
    let rendered = vec![render_condition(1, s, a.len())];
    Ok(EtaConditions {
        order,
        energy_bar,
        a,
        residuals,
        rendered,
    })
}

fn render_condition(k: u32, s: usize, terms: usize) -> String {
    let mut parts = Vec::new();
    for lambda in 0..terms {
        let weight = lambda + k as usize;
        if weight > 0 && lambda + 1 <= s {
            let pi = s - 1 - lambda;
            if weight == 1 {
                parts.push(format!("p[{pi}]*a{lambda}"));
            } else {
                parts.push(format!("{weight}*p[{pi}]*a{lambda}"));
            }
        }
        if lambda + 2 <= s {
            parts.push(format!("q[{}]*a{lambda}", s - 2 - lambda));
        }
    }
    parts.join(" + ")
}

/// A full spectrum fan-out plus the scale commentary that goes with it.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Entries sorted by (l, k, n, Re Ē, Im Ē).
    pub entries: Vec<SpectrumEntry>,
    /// Boundary-oscillation scale ħ/(2mρ_c²) in natural units.
    pub omega_natural: f64,
    /// Window Casimir-force scale ħ/ρ_c³ in natural units.
    pub casimir_scale_natural: f64,
    pub branch: BranchReport,
    /// (l, k) combinations whose truncated determinant vanished identically
    /// and therefore contributed no entries.
    pub degenerate: Vec<(u32, u32)>,
}

/// Computes the truncated spectrum for every (l, k) combination in parallel.
pub fn spectrum_sweep(
    profile: &EtaProfile,
    l_range: std::ops::RangeInclusive<u32>,
    ks: &[u32],
    n: usize,
) -> Result<SpectrumResult, CoreError> {
    let combos: Vec<(u32, u32)> = l_range
        .flat_map(|l| ks.iter().map(move |&k| (l, k)))
        .collect();
    let per_combo: Vec<Result<Option<Vec<SpectrumEntry>>, CoreError>> = combos
        .par_iter()
        .map(|&(l, k)| {
            let coeffs = TaylorCoeffs::new(profile, l, n + 1)?;
            match determinant_spectrum(&coeffs, k, n) {
                Ok(entries) => Ok(Some(entries)),
                Err(CoreError::StructuralDegeneracy { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut entries = Vec::new();
    let mut degenerate = Vec::new();
    for (combo, result) in combos.iter().zip(per_combo) {
        match result? {
            Some(es) => entries.extend(es),
            None => degenerate.push(*combo),
        }
    }
    entries.sort_by(|a, b| {
        a.l.cmp(&b.l)
            .then(a.k.cmp(&b.k))
            .then(a.n.cmp(&b.n))
            .then(a.energy_bar.re.total_cmp(&b.energy_bar.re))
            .then(a.energy_bar.im.total_cmp(&b.energy_bar.im))
    });
    let rho_c = profile.rho_c();
    let branch_coeffs = TaylorCoeffs::new(profile, 0, 1)?;
    Ok(SpectrumResult {
        entries,
        omega_natural: 0.5 / (rho_c * rho_c),
        casimir_scale_natural: 1.0 / (rho_c * rho_c * rho_c),
        branch: rejected_branch(&branch_coeffs),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::DormandPrince;
    use crate::profiles::ProfileKind;

    fn flat() -> EtaProfile {
        EtaProfile::vanishing()
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

    fn boundary_quadratic() -> EtaProfile {
        // η̄(ε) = ε² expressed as boundary Taylor data 1 + 2u + u².
        EtaProfile::new(
            ProfileKind::TaylorAtBoundary {
                coeffs: vec![1.0, 2.0, 1.0],
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn flat_window_taylor_data() {
        // η ≡ 0: κ = −ε⁻⁴, so B_n = −κ_n = (−1)ⁿ·binom(n+3,3) and
        // A_n = −l(l+1)·(−1)ⁿ(n+1).
        let tc = TaylorCoeffs::new(&flat(), 1, 3).unwrap();
        for (n, b) in [1.0, -4.0, 10.0, -20.0].iter().enumerate() {
            let (a_n, b_n) = tc.q_affine(n);
            assert!((b_n - c64(*b)).norm() < 1e-12, "B_{n}");
            let expect_a = -2.0 * (-1.0f64).powi(n as i32) * (n as f64 + 1.0);
            assert!((a_n - c64(expect_a)).norm() < 1e-12, "A_{n}");
            assert!(tc.p()[n].abs() < 1e-14, "p_{n}");
        }
    }

    #[test]
    fn taylor_data_matches_interpolation_oracle() {
        // Independent route: interpolate the chain-rule coefficients on a
        // Chebyshev stencil around ε=1 and compare Taylor coefficients.
        let profile = boundary_quadratic();
        let l = 1;
        let tc = TaylorCoeffs::new(&profile, l, 4).unwrap();
        let radius = 0.08;
        let m = 13;
        let xs: Vec<f64> = (0..m)
            .map(|j| radius * (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * m) as f64).cos())
            .collect();
        let sample = |e_bar: f64| -> (Vec<f64>, Vec<f64>) {
            let ode = EpsilonOde::new(profile.clone(), l, c64(e_bar)).unwrap();
            let p: Vec<f64> = xs.iter().map(|&u| ode.p(1.0 + u).unwrap()).collect();
            let q: Vec<f64> = xs.iter().map(|&u| ode.q(1.0 + u).unwrap().re).collect();
            (p, q)
        };
        let (p0, q0) = sample(0.0);
        let (_, q1) = sample(1.0);
        let p_fit = poly_from_samples(&xs, &p0);
        let a_fit = poly_from_samples(&xs, &q0);
        let b_fit: Vec<f64> = poly_from_samples(&xs, &q1)
            .iter()
            .zip(&a_fit)
            .map(|(ab, a)| ab - a)
            .collect();
        for n in 0..=4 {
            let (a_n, b_n) = tc.q_affine(n);
            assert!(
                (tc.p()[n] - p_fit[n]).abs() <= 1e-6 * (1.0 + p_fit[n].abs()),
                "p_{n}: {} vs {}",
                tc.p()[n],
                p_fit[n]
            );
            assert!(
                (a_n.re - a_fit[n]).abs() <= 1e-6 * (1.0 + a_fit[n].abs()),
                "A_{n}: {} vs {}",
                a_n.re,
                a_fit[n]
            );
            assert!(
                (b_n.re - b_fit[n]).abs() <= 1e-6 * (1.0 + b_fit[n].abs()),
                "B_{n}: {} vs {}",
                b_n.re,
                b_fit[n]
            );
        }
    }

    #[test]
    fn kappa_route_normalization_is_factorial() {
        for profile in [flat(), damped(), boundary_quadratic()] {
            let tc = TaylorCoeffs::new(&profile, 2, 6).unwrap();
            let ratios = tc.kappa_normalization();
            let mut fact = 1.0f64;
            for (n, r) in ratios.iter().enumerate() {
                if n > 1 {
                    fact *= n as f64;
                }
                assert!(
                    (r / fact - 1.0).abs() < 1e-9,
                    "order {n}: ratio {r} vs {fact}"
                );
            }
        }
    }

    #[test]
    fn indicial_roots_for_the_model() {
        let ode = EpsilonOde::new(damped(), 1, c64(2.0)).unwrap();
        let roots = indicial_exponents(&ode).unwrap();
        assert!((roots.k_minus - c64(0.0)).norm() < 1e-9);
        assert!((roots.k_plus - c64(1.0)).norm() < 1e-9);
        assert!(!roots.double_root);
        // Generic double root.
        let double = IndicialRoots::from_limits(c64(1.0), c64(0.0));
        assert!(double.double_root);
        assert!(double.k_minus.norm() < 1e-12 && double.k_plus.norm() < 1e-12);
    }

    #[test]
    fn indicial_expansion_point_is_ordinary_here() {
        // The exponent computation expands at ε=1, which is ordinary for
        // every smooth profile; the irregular refusal path therefore guards
        // against misuse rather than a reachable model state.
        let ode = EpsilonOde::new(flat(), 0, c64(2.0)).unwrap();
        assert_eq!(
            ode.classify(0.0).unwrap().classification,
            Classification::Irregular
        );
        assert!(indicial_exponents(&ode).is_ok());
    }

    #[test]
    fn trivial_series_is_linear() {
        // p̄ = q̄ = 0 (flat window, l=0, Ē=0): k=1 series is exactly ε−1.
        let tc = TaylorCoeffs::new(&flat(), 0, 6).unwrap();
        let a = frobenius_coeffs(&tc, 1, c64(0.0), c64(1.0), 6).unwrap();
        assert_eq!(a[0], c64(1.0));
        for coeff in &a[1..] {
            assert!(coeff.norm() < 1e-14);
        }
        let (v, d1, d2) = frobenius_eval(&a, 1, 1.5);
        assert!((v - c64(0.5)).norm() < 1e-14);
        assert!((d1 - c64(1.0)).norm() < 1e-14);
        assert!(d2.norm() < 1e-14);
    }

    #[test]
    fn series_matches_free_particle_closed_form() {
        // Flat window, l=0: basis ε·sin(√Ē/ε), ε·cos(√Ē/ε). Match the k=1
        // series normalization R(1)=0, R′(1)=1 and compare at ε=1.2.
        let e_bar = 2.0f64;
        let kfree = e_bar.sqrt();
        let tc = TaylorCoeffs::new(&flat(), 0, 14).unwrap();
        let a = frobenius_coeffs(&tc, 1, c64(e_bar), c64(1.0), 12).unwrap();
        let f1 = |eps: f64| eps * (kfree / eps).sin();
        let f1p = |eps: f64| (kfree / eps).sin() - (kfree / eps) * (kfree / eps).cos();
        let f2 = |eps: f64| eps * (kfree / eps).cos();
        let f2p = |eps: f64| (kfree / eps).cos() + (kfree / eps) * (kfree / eps).sin();
        // Solve c1·f1 + c2·f2 with value 0 and slope 1 at ε=1.
        let det = f1(1.0) * f2p(1.0) - f2(1.0) * f1p(1.0);
        let c1 = -f2(1.0) / det;
        let c2 = f1(1.0) / det;
        let closed = |eps: f64| c1 * f1(eps) + c2 * f2(eps);
        let (v, _, _) = frobenius_eval(&a, 1, 1.2);
        assert!(
            (v - c64(closed(1.2))).norm() < 1e-7,
            "{v} vs {}",
            closed(1.2)
        );
    }

    #[test]
    fn partial_sum_residual_has_the_expected_order() {
        // The degree-N partial sum should fail the equation only at
        // O((ε−1)^{N−1}): fit the log-log slope of the residual.
        let n = 6;
        let tc = TaylorCoeffs::new(&boundary_quadratic(), 1, n + 1).unwrap();
        let e_bar = c64(1.7);
        let a = frobenius_coeffs(&tc, 0, e_bar, c64(1.0), n).unwrap();
        let ode = EpsilonOde::new(boundary_quadratic(), 1, e_bar).unwrap();
        let mut pts = Vec::new();
        for i in 0..7 {
            let t = 3e-2 * 0.75f64.powi(i);
            let eps = 1.0 + t;
            let (v, d1, d2) = frobenius_eval(&a, 0, eps);
            let res = d2 + c64(ode.p(eps).unwrap()) * d1 + ode.q(eps).unwrap() * v;
            pts.push((t.ln(), res.norm().ln()));
        }
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        assert!(
            slope > (n as f64 - 1.0) - 0.3,
            "residual slope {slope} below expected order {}",
            n - 1
        );
    }

    #[test]
    fn ground_state_is_angular_quantum() {
        // k=0, n=0: the single root is Ē = l(l+1) for every profile.
        for profile in [flat(), damped(), boundary_quadratic()] {
            for l in 0..=3 {
                let tc = TaylorCoeffs::new(&profile, l, 1).unwrap();
                let entries = determinant_spectrum(&tc, 0, 0).unwrap();
                assert_eq!(entries.len(), 1);
                let ll = (l * (l + 1)) as f64;
                assert!(
                    (entries[0].energy_bar - c64(ll)).norm() < 1e-9 * (1.0 + ll),
                    "profile {:?} l={l}: {}",
                    profile.kind(),
                    entries[0].energy_bar
                );
                assert!(entries[0].residual < 1e-10);
                assert!(entries[0].remainder.norm() < 1e-9 * (1.0 + ll));
            }
        }
    }

    #[test]
    fn degenerate_truncation_is_reported() {
        // Flat window, k=1, n=0: the 1×1 system is p̄₀ = 0 identically.
        let tc = TaylorCoeffs::new(&flat(), 0, 1).unwrap();
        match determinant_spectrum(&tc, 1, 0) {
            Err(CoreError::StructuralDegeneracy { truncation }) => assert_eq!(truncation, 0),
            other => panic!("expected structural degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn first_excited_routes_agree() {
        let profile = damped();
        let tc = TaylorCoeffs::new(&profile, 0, 2).unwrap();
        let fe = first_excited(&tc, &profile).unwrap();
        assert!(
            (fe.entry.energy_bar - fe.closed_form).norm() < 1e-9 * (1.0 + fe.closed_form.norm()),
            "determinant {} vs closed form {}",
            fe.entry.energy_bar,
            fe.closed_form
        );
        // Flat window: all three routes collapse to l(l+1).
        let tcf = TaylorCoeffs::new(&flat(), 2, 2).unwrap();
        let fef = first_excited(&tcf, &flat()).unwrap();
        assert!((fef.entry.energy_bar - c64(6.0)).norm() < 1e-9);
        assert!((fef.closed_form - c64(6.0)).norm() < 1e-12);
        assert!((fef.printed_form - c64(6.0)).norm() < 1e-12);
    }

    #[test]
    fn kernel_vector_satisfies_recurrence() {
        // For each k=0 root at n=3, the null vector of M(Ē) regenerated from
        // its first two entries by the untruncated recurrence must match.
        let tc = TaylorCoeffs::new(&boundary_quadratic(), 1, 4).unwrap();
        let entries = determinant_spectrum(&tc, 0, 3).unwrap();
        assert!(!entries.is_empty());
        for entry in &entries {
            let m = assemble_matrix(&tc, 0, 3, entry.energy_bar);
            let svd = m.clone().svd(true, true);
            let v_t = svd.v_t.as_ref().unwrap();
            let last = v_t.nrows() - 1;
            let kernel: Vec<Complex64> =
                (0..4).map(|j| v_t[(last, j)].conj()).collect();
            // Check it is actually a kernel vector.
            let entry_scale = m.iter().fold(0.0f64, |acc, e| acc.max(e.norm()));
            let mut image_norm = 0.0f64;
            for i in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, kj) in kernel.iter().enumerate() {
                    acc += m[(i, j)] * kj;
                }
                image_norm = image_norm.max(acc.norm());
            }
            assert!(image_norm < 1e-8 * (1.0 + entry_scale), "image {image_norm}");
            // Regenerate from the two free coefficients and compare.
            if kernel[0].norm() < 1e-8 {
                continue;
            }
            let regen =
                frobenius_with_slope(&tc, entry.energy_bar, kernel[0], kernel[1], 3).unwrap();
            for (have, want) in regen.iter().zip(&kernel) {
                assert!(
                    (have - want).norm() < 1e-8,
                    "recurrence {have} vs kernel {want}"
                );
            }
        }
    }

    #[test]
    fn series_agrees_with_integrator() {
        // Degree-12 partial sum vs adaptive integration seeded by the series
        // at the boundary, compared across ε ∈ [0.85, 1.15].
        let profile = damped();
        let e_bar = c64(1.3);
        let tc = TaylorCoeffs::new(&profile, 1, 13).unwrap();
        let a = frobenius_coeffs(&tc, 1, e_bar, c64(1.0), 12).unwrap();
        let ode = EpsilonOde::new(profile, 1, e_bar).unwrap();
        let dp = DormandPrince::default();
        for side in [-1.0, 1.0] {
            let targets: Vec<f64> = (1..=6).map(|i| 1.0 + side * 0.025 * i as f64).collect();
            let (v0, d0, _) = frobenius_eval(&a, 1, 1.0);
            let states = ode.integrate(1.0, [v0, d0], &targets, &dp).unwrap();
            for (eps, state) in targets.iter().zip(&states) {
                let (v, _, _) = frobenius_eval(&a, 1, *eps);
                let scale = 1.0 + v.norm().max(state[0].norm());
                assert!(
                    (v - state[0]).norm() < 1e-6 * scale,
                    "eps={eps}: series {v} vs integrated {}",
                    state[0]
                );
            }
        }
    }

    #[test]
    fn rejected_branch_report() {
        let tc = TaylorCoeffs::new(&boundary_quadratic(), 0, 1).unwrap();
        let report = rejected_branch(&tc);
        assert!(report.rejected);
        // η̄′(1) = 2 for ε², so the factor is 1+4.
        assert!((report.energy_factor - c64(5.0)).norm() < 1e-12);
        assert!((report.boundary_values[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((report.boundary_values[1] + Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn eta_conditions_order_two_matches_hand_assembly() {
        let profile = boundary_quadratic();
        let tc = TaylorCoeffs::new(&profile, 1, 3).unwrap();
        let ec = eta_boundary_conditions(&tc, 2).unwrap();
        // a₁ = −p̄₀/2, spectral energy from q̄₀ = p̄₀² − p̄₁, residual is the
        // next equation assembled by hand.
        let a1 = -tc.p()[0] / 2.0;
        assert!((ec.a[1] - c64(a1)).norm() < 1e-12);
        let (a0q, b0q) = tc.q_affine(0);
        let expect_e = (c64(tc.p()[0] * tc.p()[0] - tc.p()[1]) - a0q) / b0q;
        assert!(
            (ec.energy_bar - expect_e).norm() < 1e-9 * (1.0 + expect_e.norm()),
            "{} vs {}",
            ec.energy_bar,
            expect_e
        );
        let hand = c64(tc.p()[2]) + c64(2.0 * tc.p()[1]) * c64(a1)
            + tc.q_at(0, ec.energy_bar) * c64(a1)
            + tc.q_at(1, ec.energy_bar);
        assert!(
            (ec.residuals[0] - hand).norm() < 1e-10 * (1.0 + hand.norm()),
            "{} vs {}",
            ec.residuals[0],
            hand
        );
        assert_eq!(ec.rendered[0], "p[2]*a0 + q[1]*a0 + 2*p[1]*a1 + q[0]*a1");
    }

    #[test]
    fn eta_conditions_vanish_for_flat_window() {
        let tc = TaylorCoeffs::new(&flat(), 0, 3).unwrap();
        let ec = eta_boundary_conditions(&tc, 2).unwrap();
        assert!(ec.energy_bar.norm() < 1e-9);
        assert!(ec.a[1].norm() < 1e-12);
        for r in &ec.residuals {
            assert!(r.norm() < 1e-10, "residual {r}");
        }
    }

    #[test]
    fn sweep_is_sorted_and_deterministic() {
        let profile = damped();
        let sweep = spectrum_sweep(&profile, 0..=2, &[0, 1], 2).unwrap();
        assert!(!sweep.entries.is_empty());
        assert!((sweep.omega_natural - 0.5).abs() < 1e-15);
        assert!((sweep.casimir_scale_natural - 1.0).abs() < 1e-15);
        for pair in sweep.entries.windows(2) {
            let key = |e: &SpectrumEntry| (e.l, e.k, e.n);
            assert!(key(&pair[0]) <= key(&pair[1]));
        }
        for e in &sweep.entries {
            let ll = (e.l * (e.l + 1)) as f64;
            assert!((e.remainder - (e.energy_bar - c64(ll))).norm() < 1e-15);
        }
        let again = spectrum_sweep(&profile, 0..=2, &[0, 1], 2).unwrap();
        assert_eq!(sweep.entries.len(), again.entries.len());
        for (a, b) in sweep.entries.iter().zip(&again.entries) {
            assert_eq!(a.energy_bar.re.to_bits(), b.energy_bar.re.to_bits());
            assert_eq!(a.energy_bar.im.to_bits(), b.energy_bar.im.to_bits());
        }
    }

    #[test]
    fn dimensional_energy_restores_units() {
        let e = dimensional_energy(c64(6.0), 2.0, 3.0, 0.5);
        // 6·4/(2·3·0.25) = 16.
        assert!((e - c64(16.0)).norm() < 1e-14);
    }
}
