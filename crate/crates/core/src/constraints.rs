//! The second-class constraint system of the window model and its Dirac
//! reduction.
//!
//! A particle in spherical 3d space is coupled to a 2d polar "window"
//! (ρ, σ) through a radial coupling function η(r). Holding the particle on
//! the window surface requires two coordinate constraints; demanding their
//! stability under time evolution produces two momentum constraints. The four
//! together are second class: their mutual bracket matrix Δ is invertible, so
//! the window variables can be eliminated and the physical 3d theory carries a
//! deformed bracket — the Dirac bracket — whose radial sector is rescaled by
//! 1/(1+η′²). Quantizing the deformed bracket yields a position-dependent
//! Planck function ħ(r) = ħ/(1+η′²(r)).
//!
//! Two normalizations of the coordinate constraints are supported (see
//! [`WindowNormalization`]): they describe the same surface but produce
//! different deformation factors, and the toolkit keeps both explicit.

use crate::error::CoreError;
use crate::profiles::WindowFn;
use crate::symbolic::{Atom, CanonicalVar, Expr, Monomial, Param};
pub use crate::symbolic::WindowNormalization;

/// Reduced Planck constant in J·s (SI).
const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light in m/s (SI).
const C_SI: f64 = 2.997_924_58e8;

/// The four constraints and the Hamiltonian pieces of the (3+2)d model.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    /// Coordinate constraints: `ρ − w·η(r)` and `σ − π/4`.
    pub primaries: [Expr; 2],
    /// Momentum constraints from the consistency step: `p_σ` and
    /// `p_ρ − w·η′(r)·p_r`.
    pub secondaries: [Expr; 2],
    /// Kinetic energy of the spherical 3d sector.
    pub hamiltonian_3d: Expr,
    /// Kinetic energy of the polar window sector.
    pub hamiltonian_2d: Expr,
    norm: WindowNormalization,
}

impl ConstraintSet {
    /// Builds the linear constraint set for a given window normalization
    /// (`w = √2` or `w = 1`).
    pub fn linearized(norm: WindowNormalization) -> ConstraintSet {
        let w = norm.scale();
        let phi1 = Expr::var(CanonicalVar::Rho) - w.clone() * Expr::eta(0);
        let phi2 = Expr::var(CanonicalVar::Sigma) - Expr::pi() * Expr::rational(1, 4);
        let psi1 = Expr::var(CanonicalVar::PSigma);
        let psi2 = Expr::var(CanonicalVar::PRho)
            - w * Expr::eta(1) * Expr::var(CanonicalVar::PR);
        ConstraintSet {
            primaries: [phi1, phi2],
            secondaries: [psi1, psi2],
            hamiltonian_3d: Self::hamiltonian_3d(),
            hamiltonian_2d: Self::hamiltonian_2d(),
            norm,
        }
    }

    pub fn normalization(&self) -> WindowNormalization {
        self.norm
    }

    /// The nonlinear coordinate constraints the model starts from:
    /// `ρ cos σ − η(r)` and `ρ sin σ − η(r)`. Solving both fixes
    /// `σ = π/4`, `ρ = √2·η(r)` — the linear set in the √2 normalization.
    pub fn nonlinear_primaries() -> [Expr; 2] {
        let rho = Expr::var(CanonicalVar::Rho);
        let sigma = Expr::var(CanonicalVar::Sigma);
        [
            rho.clone() * Expr::cos(sigma.clone()) - Expr::eta(0),
            rho * Expr::sin(sigma) - Expr::eta(0),
        ]
    }

    /// Kinetic term `(p_r² + p_θ²/r² + p_φ²/(r² sin²θ)) / (2m)`.
    pub fn hamiltonian_3d() -> Expr {
        let r = Expr::var(CanonicalVar::R);
        let theta = Expr::var(CanonicalVar::Theta);
        let pr = Expr::var(CanonicalVar::PR);
        let ptheta = Expr::var(CanonicalVar::PTheta);
        let pphi = Expr::var(CanonicalVar::PPhi);
        let r2 = r.clone() * r;
        let sin2 = Expr::sin(theta.clone()) * Expr::sin(theta);
        let kin = pr.clone() * pr
            + ptheta.clone() * ptheta / r2.clone()
            + pphi.clone() * pphi / (r2 * sin2);
        kin / (Expr::int(2) * Expr::param(Param::Mass))
    }

    /// Kinetic term `(p_ρ² + p_σ²/ρ²) / (2m)`.
    pub fn hamiltonian_2d() -> Expr {
        let rho = Expr::var(CanonicalVar::Rho);
        let prho = Expr::var(CanonicalVar::PRho);
        let psigma = Expr::var(CanonicalVar::PSigma);
        let kin = prho.clone() * prho + psigma.clone() * psigma / (rho.clone() * rho);
        kin / (Expr::int(2) * Expr::param(Param::Mass))
    }

    /// Total Hamiltonian `H³ + H² + λ₁φ₁ + λ₂φ₂` with symbolic multipliers.
    pub fn total_hamiltonian(&self) -> Expr {
        self.hamiltonian_3d.clone()
            + self.hamiltonian_2d.clone()
            + Expr::param(Param::Lambda1) * self.primaries[0].clone()
            + Expr::param(Param::Lambda2) * self.primaries[1].clone()
    }

    /// Time-evolution brackets `{φ, H_T}` of the given constraints. For
    /// coordinate-only constraints the multiplier terms vanish identically,
    /// so the result is the raw secondary-constraint candidate.
    pub fn consistency_step(&self, constraints: &[Expr]) -> Result<Vec<Expr>, CoreError> {
        let ht = self.total_hamiltonian();
        constraints
            .iter()
            .map(|c| Expr::poisson_bracket(c, &ht))
            .collect()
    }

    /// Linearizes raw consistency brackets into clean momentum constraints:
    /// substitutes the solved coordinate constraints, recombines the pair
    /// (sum and difference decouple the window momenta), and rescales each
    /// combination so its window-momentum coefficient is one. Returns the
    /// constraints in the order `[p_σ-type, p_ρ-type]` together with a log of
    /// the smooth factors dropped by the rescaling.
    pub fn linearize_secondaries(
        &self,
        raw: &[Expr; 2],
    ) -> Result<([Expr; 2], Vec<String>), CoreError> {
        let lin_a = raw[0].substitute_primaries(self.norm);
        let lin_b = raw[1].substitute_primaries(self.norm);
        let sum = lin_a.clone() + lin_b.clone();
        let diff = lin_b - lin_a;
        let (psi1, log1) = normalize_constraint(&diff, CanonicalVar::PSigma)?;
        let (psi2, log2) = normalize_constraint(&sum, CanonicalVar::PRho)?;
        Ok(([psi1, psi2], vec![log1, log2]))
    }
}

/// Rescales a candidate constraint so the coefficient of the given momentum
/// variable is exactly one, dropping the (smooth, nonvanishing on-surface)
/// denominator. Returns the representative and a log line describing the
/// dropped factor.
fn normalize_constraint(e: &Expr, unit: CanonicalVar) -> Result<(Expr, String), CoreError> {
    let target = Monomial::atom(Atom::Var(unit));
    let coeff = e.num.0.get(&target).cloned().ok_or_else(|| {
        CoreError::invalid(format!(
            "candidate constraint has no {unit} term to normalize against: {e}"
        ))
    })?;
    let scaled = e.num.scale(&coeff.inverse());
    let log = format!(
        "normalized {unit}-constraint: dropped smooth factor ({coeff})/({})",
        e.den
    );
    Ok((Expr::from_poly(scaled), log))
}

/// The Dirac reduction data: the constraint-bracket matrix Δ, its symbolic
/// inverse, and the full deformed bracket table over the ten canonical
/// variables.
#[derive(Debug, Clone)]
pub struct DiracStructure {
    set: ConstraintSet,
    constraints: [Expr; 4],
    delta: [[Expr; 4]; 4],
    delta_inverse: [[Expr; 4]; 4],
    det_delta: Expr,
}

impl DiracStructure {
    /// Builds Δ = {c_α, c_β} over the ordered constraints [φ₁, φ₂, ψ₁, ψ₂],
    /// inverts it symbolically through the adjugate, and refuses constraint
    /// sets whose Δ is singular (not second class).
    pub fn build(set: ConstraintSet) -> Result<DiracStructure, CoreError> {
        let constraints = [
            set.primaries[0].clone(),
            set.primaries[1].clone(),
            set.secondaries[0].clone(),
            set.secondaries[1].clone(),
        ];
        let norm = set.norm;
        let mut delta: [[Expr; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        for i in 0..4 {
            for j in (i + 1)..4 {
                let b = Expr::poisson_bracket(&constraints[i], &constraints[j])?
                    .substitute_strong(norm);
                delta[i][j] = b.clone();
                delta[j][i] = -b;
            }
        }
        let det = det4(&delta);
        if det.is_zero() {
            return Err(CoreError::NotSecondClass);
        }
        let mut delta_inverse: [[Expr; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        for i in 0..4 {
            for j in 0..4 {
                // adj(Δ)ᵢⱼ = (−1)^{i+j}·M_ji, inverse = adj/det.
                let m = minor3(&delta, j, i);
                let cof = if (i + j) % 2 == 0 {
                    det3(&m)
                } else {
                    -det3(&m)
                };
                delta_inverse[i][j] = cof / det.clone();
            }
        }
        Ok(DiracStructure {
            set,
            constraints,
            delta,
            delta_inverse,
            det_delta: det,
        })
    }

    pub fn constraint_set(&self) -> &ConstraintSet {
        &self.set
    }

    pub fn constraints(&self) -> &[Expr; 4] {
        &self.constraints
    }

    pub fn delta(&self) -> &[[Expr; 4]; 4] {
        &self.delta
    }

    pub fn delta_inverse(&self) -> &[[Expr; 4]; 4] {
        &self.delta_inverse
    }

    pub fn det_delta(&self) -> &Expr {
        &self.det_delta
    }

    /// The Dirac bracket `{a,b} − {a,c_α}·Δ⁻¹_αβ·{c_β,b}`, strong-substituted
    /// onto the constraint surface and normalized.
    pub fn dirac_bracket(&self, a: &Expr, b: &Expr) -> Result<Expr, CoreError> {
        let mut out = Expr::poisson_bracket(a, b)?;
        let with_a: Vec<Expr> = self
            .constraints
            .iter()
            .map(|c| Expr::poisson_bracket(a, c))
            .collect::<Result<_, _>>()?;
        let with_b: Vec<Expr> = self
            .constraints
            .iter()
            .map(|c| Expr::poisson_bracket(c, b))
            .collect::<Result<_, _>>()?;
        for (alpha, left) in with_a.iter().enumerate() {
            if left.is_zero() {
                continue;
            }
            for (beta, right) in with_b.iter().enumerate() {
                if right.is_zero() || self.delta_inverse[alpha][beta].is_zero() {
                    continue;
                }
                out = out
                    - left.clone() * self.delta_inverse[alpha][beta].clone() * right.clone();
            }
        }
        Ok(out.substitute_strong(self.set.norm))
    }

    /// Dirac bracket of two canonical variables.
    pub fn dirac_bracket_vars(
        &self,
        a: CanonicalVar,
        b: CanonicalVar,
    ) -> Result<Expr, CoreError> {
        self.dirac_bracket(&Expr::var(a), &Expr::var(b))
    }

    /// The full 10×10 deformed bracket matrix over the canonical variables
    /// (antisymmetric by construction).
    pub fn omega(&self) -> Result<Vec<Vec<Expr>>, CoreError> {
        let n = CanonicalVar::ALL.len();
        let mut omega = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let b = self.dirac_bracket_vars(CanonicalVar::ALL[i], CanonicalVar::ALL[j])?;
                omega[j][i] = -b.clone();
                omega[i][j] = b;
            }
        }
        Ok(omega)
    }

    /// The deformed commutator table: every unordered pair of canonical
    /// variables with its Dirac bracket and the rendered operator commutator
    /// `iħ·{·,·}_D`, with powers of the Planck function ħ(r) = ħ/(1+η′²)
    /// factored out.
    pub fn commutator_table(&self) -> Result<Vec<CommutatorEntry>, CoreError> {
        let mut entries = Vec::new();
        let n = CanonicalVar::ALL.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = CanonicalVar::ALL[i];
                let b = CanonicalVar::ALL[j];
                let bracket = self.dirac_bracket_vars(a, b)?;
                entries.push(CommutatorEntry::new(a, b, bracket));
            }
        }
        Ok(entries)
    }

    /// Operator representation induced by the deformed brackets, on the
    /// chosen branch `z` of the angular constraint (σ = π/4 + 2πz).
    pub fn representation(&self, branch: i64) -> Representation {
        let c = Expr::one() + Expr::eta(1) * Expr::eta(1);
        let planck = Expr::param(Param::Hbar) / c;
        let w = self.set.norm.scale();
        let sigma_value = Expr::pi() * Expr::rational(1, 4)
            + Expr::int(2 * branch) * Expr::pi();
        Representation {
            planck_function: planck,
            sigma_branch: branch,
            sigma_operator: sigma_value,
            rho_operator: w * Expr::eta(0),
            p_sigma_operator: Expr::zero(),
            radial_momentum: String::from("-i*hbar(r)*d/dr"),
            window_momentum: String::from("-i*hbar(r)*d/drho"),
        }
    }
}

/// One row of the deformed commutator table.
#[derive(Debug, Clone)]
pub struct CommutatorEntry {
    pub pair: (CanonicalVar, CanonicalVar),
    /// The Dirac bracket of the pair, on the constraint surface.
    pub dirac_bracket: Expr,
    /// Highest power of (1+η′²) factored out of the bracket's denominator.
    pub planck_power: u32,
    /// The bracket with those factors removed:
    /// `dirac_bracket = prefactor/(1+η′²)^planck_power`.
    pub prefactor: Expr,
    /// Rendered operator commutator `iħ·bracket`, written through ħ(r) when
    /// the deformation factor is present.
    pub rendered: String,
}

impl CommutatorEntry {
    fn new(a: CanonicalVar, b: CanonicalVar, bracket: Expr) -> CommutatorEntry {
        let (power, prefactor) = factor_deformation(&bracket);
        let rendered = render_commutator(&bracket, power, &prefactor);
        CommutatorEntry {
            pair: (a, b),
            dirac_bracket: bracket,
            planck_power: power,
            prefactor,
            rendered,
        }
    }
}

/// Splits a bracket as `prefactor/(1+η′²)^p` with maximal `p`.
fn factor_deformation(bracket: &Expr) -> (u32, Expr) {
    if bracket.is_zero() {
        return (0, Expr::zero());
    }
    let c = (Expr::one() + Expr::eta(1) * Expr::eta(1)).num;
    let mut den = bracket.den.clone();
    let mut power = 0u32;
    while let Some(q) = den.div_exact(&c) {
        den = q;
        power += 1;
    }
    (power, Expr::make(bracket.num.clone(), den))
}

fn render_commutator(bracket: &Expr, power: u32, prefactor: &Expr) -> String {
    if bracket.is_zero() {
        return String::from("0");
    }
    let head = match power {
        0 => String::from("i*hbar"),
        1 => String::from("i*hbar(r)"),
        p => format!("i*hbar(r)^{p}/hbar^{}", p - 1),
    };
    let s = prefactor.to_string();
    if s == "1" {
        return head;
    }
    if s == "-1" {
        return format!("-{head}");
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => ("-", rest.to_string()),
        None => ("", s),
    };
    let wrapped = if body.contains(' ') {
        format!("({body})")
    } else {
        body
    };
    format!("{sign}{head}*{wrapped}")
}

/// Operator representation data induced by the reduction.
#[derive(Debug, Clone)]
pub struct Representation {
    /// ħ(r) = ħ/(1+η′²(r)) as a symbolic expression.
    pub planck_function: Expr,
    /// Winding branch z of the angular constraint.
    pub sigma_branch: i64,
    /// σ operator: the c-number π/4 + 2πz.
    pub sigma_operator: Expr,
    /// ρ operator: w·η(r) on the constraint surface.
    pub rho_operator: Expr,
    /// p_σ operator: identically zero.
    pub p_sigma_operator: Expr,
    /// Differential-operator form of the radial momentum.
    pub radial_momentum: String,
    /// Differential-operator form of the window momentum.
    pub window_momentum: String,
}

fn det2(m: &[[Expr; 2]; 2]) -> Expr {
    m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
}

fn det3(m: &[[Expr; 3]; 3]) -> Expr {
    let mut acc = Expr::zero();
    for col in 0..3 {
        if m[0][col].is_zero() {
            continue;
        }
        let sub: [[Expr; 2]; 2] = std::array::from_fn(|i| {
            let mut it = (0..3).filter(|&c| c != col);
            let c0 = it.next().unwrap();
            let c1 = it.next().unwrap();
            [m[i + 1][c0].clone(), m[i + 1][c1].clone()]
        });
        let term = m[0][col].clone() * det2(&sub);
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn minor3(m: &[[Expr; 4]; 4], row: usize, col: usize) -> [[Expr; 3]; 3] {
    let rows: Vec<usize> = (0..4).filter(|&r| r != row).collect();
    let cols: Vec<usize> = (0..4).filter(|&c| c != col).collect();
    std::array::from_fn(|i| std::array::from_fn(|j| m[rows[i]][cols[j]].clone()))
}

fn det4(m: &[[Expr; 4]; 4]) -> Expr {
    let mut acc = Expr::zero();
    for col in 0..4 {
        if m[0][col].is_zero() {
            continue;
        }
        let term = m[0][col].clone() * det3(&minor3(m, 0, col));
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// The leading quantum correction to the reduced dynamics:
/// `½·ħ(r)²·(η‴ − 2η′η″²/(1+η′²))`, evaluated on a concrete window.
pub fn anomaly_term(window: &dyn WindowFn, r: f64, hbar: f64) -> Result<f64, CoreError> {
    let d = window.derivs(r, 3)?;
    let c = 1.0 + d[1] * d[1];
    let hr = hbar / c;
    Ok(0.5 * hr * hr * (d[3] - 2.0 * d[1] * d[2] * d[2] / c))
}

/// Quantized mass ladder `m_z = z·ħ/(2ρ_c)` in natural units (c = 1).
pub fn mass_quantum(z: i64, rho_c: f64, hbar: f64) -> f64 {
    0.5 * z as f64 * hbar / rho_c
}

/// SI evaluation of the mass ladder for a window size in metres, in kg.
///
/// The natural-unit formula z·ħ/(2ρ_c) carries dimensions of momentum in SI;
/// an explicit division by c is required to obtain a mass, and that division
/// is applied here. The resulting scale for ρ_c in the sub-millimetre range
/// is far below the electron mass; the discrepancy is reported, not hidden.
pub fn mass_quantum_si(z: i64, rho_c_m: f64) -> f64 {
    0.5 * z as f64 * HBAR_SI / (rho_c_m * C_SI)
}
