//! The canonical expression type and its calculus.

use super::coeff::Rt2;
use super::poly::{Atom, Monomial, Poly};
use super::{CanonicalVar, Param, WindowNormalization, DEFAULT_ETA_CAP};
use crate::error::CoreError;
use crate::profiles::WindowFn;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A symbolic expression in canonical rational-function form `num/den`.
///
/// Invariants maintained by every constructor and operator:
/// - both polynomials are collected (no duplicate monomials, no zero terms);
/// - `den` is never the zero polynomial, and is `1` whenever the quotient is
///   polynomial;
/// - no common monomial factor survives between `num` and `den`, exact
///   polynomial factors of one in the other are cancelled, and `den` is monic;
/// - a zero numerator forces `den = 1`.
///
/// Equality, ordering, and hashing are therefore structural on the normal
/// form. Arithmetic never fails; differentiation can fail (η-derivative cap)
/// and evaluation can fail (unbound symbols, vanishing denominators).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl Expr {
    // ---- constructors ----------------------------------------------------

    pub(crate) fn from_poly(num: Poly) -> Expr {
        Expr {
            num,
            den: Poly::one(),
        }
    }

    /// Builds `num/den`, normalizing. Panics if `den` is the zero polynomial.
    pub(crate) fn make(num: Poly, den: Poly) -> Expr {
        assert!(!den.is_zero(), "zero denominator polynomial");
        let mut e = Expr { num, den };
        e.reduce();
        e
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    /// Exact integer constant.
    pub fn int(n: i64) -> Expr {
        Expr::from_poly(Poly::constant(Rt2::from_int(n)))
    }

    /// Exact rational constant `p/q`.
    pub fn rational(p: i64, q: i64) -> Expr {
        Expr::from_poly(Poly::constant(Rt2::from_ratio(p, q)))
    }

    /// The exact constant √2.
    pub fn sqrt2() -> Expr {
        Expr::from_poly(Poly::constant(Rt2::sqrt2()))
    }

    /// The exact named constant π.
    pub fn pi() -> Expr {
        Expr::from_poly(Poly::atom(Atom::Pi))
    }

    pub fn var(v: CanonicalVar) -> Expr {
        Expr::from_poly(Poly::atom(Atom::Var(v)))
    }

    pub fn param(p: Param) -> Expr {
        Expr::from_poly(Poly::atom(Atom::Param(p)))
    }

    /// The formal derivative η⁽ᵏ⁾(r); order 0 is η(r) itself.
    pub fn eta(order: u32) -> Expr {
        Expr::from_poly(Poly::atom(Atom::Eta { order }))
    }

    /// sin of an expression. Quarter-multiples of π (and zero) collapse to
    /// their exact Q(√2) values; anything else stays a symbolic factor.
    pub fn sin(arg: Expr) -> Expr {
        if let Some(q) = arg.as_pi_multiple() {
            if let Some(v) = exact_trig(&q, true) {
                return Expr::from_poly(Poly::constant(v));
            }
        }
        Expr::from_poly(Poly::atom(Atom::Sin(Box::new(arg))))
    }

    /// cos of an expression, with the same exact collapses as [`Expr::sin`].
    pub fn cos(arg: Expr) -> Expr {
        if let Some(q) = arg.as_pi_multiple() {
            if let Some(v) = exact_trig(&q, false) {
                return Expr::from_poly(Poly::constant(v));
            }
        }
        Expr::from_poly(Poly::atom(Atom::Cos(Box::new(arg))))
    }

    // ---- predicates and accessors ---------------------------------------

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The exact rational value `q` when the expression is exactly `q·π`
    /// (including 0 for the zero expression); used for exact trig collapse.
    fn as_pi_multiple(&self) -> Option<BigRational> {
        if !self.den.is_one() {
            return None;
        }
        if self.num.is_zero() {
            return Some(BigRational::zero());
        }
        if self.num.0.len() != 1 {
            return None;
        }
        let (mono, coeff) = self.num.0.iter().next().unwrap();
        if mono.0.len() == 1 {
            if let Some((Atom::Pi, 1)) = mono.0.iter().next().map(|(a, k)| (a.clone(), *k)) {
                return coeff.as_rational().cloned();
            }
        }
        None
    }

    /// Integer power. `powi(0)` is 1; negative powers invert (panicking on a
    /// zero base, like integer division by zero).
    pub fn powi(&self, n: i32) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        let k = n.unsigned_abs();
        let (num, den) = if n > 0 {
            (self.num.pow(k), self.den.pow(k))
        } else {
            assert!(!self.is_zero(), "negative power of the zero expression");
            (self.den.pow(k), self.num.pow(k))
        };
        Expr::make(num, den)
    }

    // ---- normalization ---------------------------------------------------

    /// Restores the canonical invariants after raw construction.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        // Cancel the common monomial factor.
        let g = self.num.monomial_content().gcd(&self.den.monomial_content());
        if !g.is_unit() {
            self.num = self.num.div_monomial(&g);
            self.den = self.den.div_monomial(&g);
        }
        // Cancel exact polynomial factors in either direction.
        if !self.den.is_one() {
            if let Some(c) = self.den.as_constant() {
                self.num = self.num.scale(&c.inverse());
                self.den = Poly::one();
            } else if let Some(q) = self.num.div_exact(&self.den) {
                self.num = q;
                self.den = Poly::one();
            } else if let Some(q) = self.den.div_exact(&self.num) {
                // num/(q·num) = 1/q
                self.num = Poly::one();
                self.den = q;
            }
        }
        // Monic denominator pins the remaining scalar freedom.
        if !self.den.is_one() {
            let lc = self.den.leading().1.clone();
            if !lc.is_one() {
                let inv = lc.inverse();
                self.num = self.num.scale(&inv);
                self.den = self.den.scale(&inv);
            }
        }
    }

    // ---- calculus --------------------------------------------------------

    /// Partial derivative with the default η-order cap.
    pub fn differentiate(&self, v: CanonicalVar) -> Result<Expr, CoreError> {
        self.differentiate_capped(v, DEFAULT_ETA_CAP)
    }

    /// Partial derivative; formal η-derivatives beyond `cap` are refused.
    pub fn differentiate_capped(&self, v: CanonicalVar, cap: u32) -> Result<Expr, CoreError> {
        let dnum = poly_derivative(&self.num, v, cap)?;
        if self.den.is_one() {
            return Ok(dnum);
        }
        let dden = poly_derivative(&self.den, v, cap)?;
        let num_e = Expr::from_poly(self.num.clone());
        let den_e = Expr::from_poly(self.den.clone());
        Ok((dnum * den_e.clone() - num_e * dden) / (den_e.clone() * den_e))
    }

    /// Canonical Poisson bracket over the five conjugate pairs,
    /// Σᵢ (∂a/∂qᵢ·∂b/∂pᵢ − ∂a/∂pᵢ·∂b/∂qᵢ), with the default η cap.
    pub fn poisson_bracket(a: &Expr, b: &Expr) -> Result<Expr, CoreError> {
        Expr::poisson_bracket_capped(a, b, DEFAULT_ETA_CAP)
    }

    /// Poisson bracket with an explicit η-derivative cap.
    pub fn poisson_bracket_capped(a: &Expr, b: &Expr, cap: u32) -> Result<Expr, CoreError> {
        let mut acc = Expr::zero();
        for i in 0..5 {
            let q = CanonicalVar::COORDINATES[i];
            let p = CanonicalVar::MOMENTA[i];
            let da_dq = a.differentiate_capped(q, cap)?;
            let db_dp = b.differentiate_capped(p, cap)?;
            if !da_dq.is_zero() && !db_dp.is_zero() {
                acc = acc + da_dq * db_dp;
            }
            let da_dp = a.differentiate_capped(p, cap)?;
            let db_dq = b.differentiate_capped(q, cap)?;
            if !da_dp.is_zero() && !db_dq.is_zero() {
                acc = acc - da_dp * db_dq;
            }
        }
        Ok(acc)
    }

    // ---- substitution ----------------------------------------------------

    /// Substitutes atoms by expressions (including inside trig arguments),
    /// renormalizing as it rebuilds.
    fn substitute_atoms<F>(&self, f: &F) -> Expr
    where
        F: Fn(&Atom) -> Option<Expr>,
    {
        let num = rebuild_poly(&self.num, f);
        let den = rebuild_poly(&self.den, f);
        assert!(
            !den.is_zero(),
            "substitution sent a denominator to zero symbolically"
        );
        num / den
    }

    /// Substitutes canonical variables by expressions (including inside trig
    /// arguments), renormalizing as it rebuilds.
    pub fn substitute_vars<F>(&self, f: &F) -> Expr
    where
        F: Fn(CanonicalVar) -> Option<Expr>,
    {
        self.substitute_atoms(&|atom| match atom {
            Atom::Var(v) => f(*v),
            _ => None,
        })
    }

    /// The no-window limit: every formal η-derivative replaced by zero.
    pub fn substitute_eta_zero(&self) -> Expr {
        self.substitute_atoms(&|atom| match atom {
            Atom::Eta { .. } => Some(Expr::zero()),
            _ => None,
        })
    }

    /// Strong substitution onto the constraint surface: the window variables
    /// are eliminated by `ρ ↦ w·η(r)`, `σ ↦ π/4`, `p_σ ↦ 0`,
    /// `p_ρ ↦ w·η′(r)·p_r`, with `w` fixed by the chosen normalization.
    pub fn substitute_strong(&self, norm: WindowNormalization) -> Expr {
        let w = norm.scale();
        self.substitute_vars(&move |v| match v {
            CanonicalVar::Rho => Some(w.clone() * Expr::eta(0)),
            CanonicalVar::Sigma => Some(Expr::pi() * Expr::rational(1, 4)),
            CanonicalVar::PSigma => Some(Expr::zero()),
            CanonicalVar::PRho => Some(w.clone() * Expr::eta(1) * Expr::var(CanonicalVar::PR)),
            _ => None,
        })
    }

    /// Substitutes only the primary (coordinate) constraint solutions
    /// `ρ ↦ w·η(r)`, `σ ↦ π/4`, leaving all momenta untouched. This is the
    /// linearization step applied to the consistency brackets.
    pub fn substitute_primaries(&self, norm: WindowNormalization) -> Expr {
        let w = norm.scale();
        self.substitute_vars(&move |v| match v {
            CanonicalVar::Rho => Some(w.clone() * Expr::eta(0)),
            CanonicalVar::Sigma => Some(Expr::pi() * Expr::rational(1, 4)),
            _ => None,
        })
    }

    // ---- evaluation ------------------------------------------------------

    /// Numeric evaluation against a binding context. Returns a complex value;
    /// fails on unbound symbols, on η-derivatives evaluated at non-real
    /// radius, or when a denominator vanishes at the point.
    pub fn eval(&self, ctx: &EvalContext<'_>) -> Result<Complex64, CoreError> {
        let num = eval_poly(&self.num, ctx)?;
        if self.den.is_one() {
            return Ok(num);
        }
        let den = eval_poly(&self.den, ctx)?;
        if den.norm() < f64::MIN_POSITIVE {
            return Err(CoreError::SingularEvaluation {
                denominator: self.den.to_string(),
                expression: self.to_string(),
            });
        }
        Ok(num / den)
    }
}

// ---- operator impls ------------------------------------------------------

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if self.den == rhs.den {
            return Expr::make(self.num.add(&rhs.num), self.den);
        }
        // Prefer the least common denominator when one divides the other, so
        // chained sums of reduced quotients stay reduced.
        if let Some(q) = rhs.den.div_exact(&self.den) {
            return Expr::make(self.num.mul(&q).add(&rhs.num), rhs.den);
        }
        if let Some(q) = self.den.div_exact(&rhs.den) {
            return Expr::make(self.num.add(&rhs.num.mul(&q)), self.den);
        }
        Expr::make(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den,
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        // Cross-cancel before multiplying so factors shared between one
        // numerator and the other denominator never inflate the product.
        let (mut n1, mut d2) = (self.num, rhs.den);
        if !d2.is_one() {
            if let Some(q) = n1.div_exact(&d2) {
                n1 = q;
                d2 = Poly::one();
            } else if let Some(q) = d2.div_exact(&n1) {
                n1 = Poly::one();
                d2 = q;
            }
        }
        let (mut n2, mut d1) = (rhs.num, self.den);
        if !d1.is_one() {
            if let Some(q) = n2.div_exact(&d1) {
                n2 = q;
                d1 = Poly::one();
            } else if let Some(q) = d1.div_exact(&n2) {
                n2 = Poly::one();
                d1 = q;
            }
        }
        Expr::make(n1.mul(&n2), d1.mul(&d2))
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        assert!(!rhs.is_zero(), "division by the zero expression");
        let inv = Expr {
            num: rhs.den,
            den: rhs.num,
        };
        self * inv
    }
}

// ---- derivative helpers ---------------------------------------------------

fn atom_derivative(atom: &Atom, v: CanonicalVar, cap: u32) -> Result<Expr, CoreError> {
    Ok(match atom {
        Atom::Pi | Atom::Param(_) => Expr::zero(),
        Atom::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Eta { order } => {
            if v == CanonicalVar::R {
                if *order + 1 > cap {
                    return Err(CoreError::EtaOrderExceeded {
                        requested: *order + 1,
                        cap,
                    });
                }
                Expr::eta(*order + 1)
            } else {
                Expr::zero()
            }
        }
        Atom::Sin(arg) => {
            let da = arg.differentiate_capped(v, cap)?;
            if da.is_zero() {
                Expr::zero()
            } else {
                Expr::cos((**arg).clone()) * da
            }
        }
        Atom::Cos(arg) => {
            let da = arg.differentiate_capped(v, cap)?;
            if da.is_zero() {
                Expr::zero()
            } else {
                -(Expr::sin((**arg).clone()) * da)
            }
        }
    })
}

fn poly_derivative(p: &Poly, v: CanonicalVar, cap: u32) -> Result<Expr, CoreError> {
    let mut acc = Expr::zero();
    for (mono, coeff) in &p.0 {
        for (atom, &k) in &mono.0 {
            let da = atom_derivative(atom, v, cap)?;
            if da.is_zero() {
                continue;
            }
            let mut rest = mono.0.clone();
            rest.remove(atom);
            let scaled = coeff * &Rt2::from_int(k as i64);
            let mut term = Expr::from_poly(Poly::term(Monomial(rest), scaled));
            if k > 1 {
                term = term * Expr::from_poly(Poly::atom(atom.clone())).powi(k as i32 - 1);
            }
            acc = acc + term * da;
        }
    }
    Ok(acc)
}

// ---- substitution helpers -------------------------------------------------

fn rebuild_poly<F>(p: &Poly, f: &F) -> Expr
where
    F: Fn(&Atom) -> Option<Expr>,
{
    let mut acc = Expr::zero();
    for (mono, coeff) in &p.0 {
        let mut term = Expr::from_poly(Poly::constant(coeff.clone()));
        for (atom, &k) in &mono.0 {
            let base = match f(atom) {
                Some(replacement) => replacement,
                None => match atom {
                    Atom::Sin(arg) => Expr::sin(arg.substitute_atoms(f)),
                    Atom::Cos(arg) => Expr::cos(arg.substitute_atoms(f)),
                    other => Expr::from_poly(Poly::atom(other.clone())),
                },
            };
            term = term * base.powi(k as i32);
            if term.is_zero() {
                break;
            }
        }
        acc = acc + term;
    }
    acc
}

// ---- evaluation helpers ---------------------------------------------------

/// Evaluation bindings: values for canonical variables and parameters, plus a
/// window profile supplying η and its radial derivatives.
#[derive(Clone, Copy)]
pub struct EvalContext<'a> {
    vars: [Option<Complex64>; 10],
    params: [Option<Complex64>; 9],
    window: Option<&'a dyn WindowFn>,
}

impl<'a> EvalContext<'a> {
    pub fn new() -> Self {
        EvalContext {
            vars: [None; 10],
            params: [None; 9],
            window: None,
        }
    }

    /// Binds ħ = m = ρ_c = 1 (the working units of the reduction pipeline).
    pub fn natural_units() -> Self {
        EvalContext::new()
            .set_param_f64(Param::Hbar, 1.0)
            .set_param_f64(Param::Mass, 1.0)
            .set_param_f64(Param::RhoC, 1.0)
    }

    pub fn set_var(mut self, v: CanonicalVar, value: Complex64) -> Self {
        self.vars[v.index()] = Some(value);
        self
    }

    pub fn set_var_f64(self, v: CanonicalVar, value: f64) -> Self {
        self.set_var(v, Complex64::new(value, 0.0))
    }

    /// Binds all ten canonical variables from a phase-space point in canonical
    /// order.
    pub fn set_phase_point(mut self, point: &[f64; 10]) -> Self {
        for (i, x) in point.iter().enumerate() {
            self.vars[i] = Some(Complex64::new(*x, 0.0));
        }
        self
    }

    pub fn set_param(mut self, p: Param, value: Complex64) -> Self {
        self.params[p.index()] = Some(value);
        self
    }

    pub fn set_param_f64(self, p: Param, value: f64) -> Self {
        self.set_param(p, Complex64::new(value, 0.0))
    }

    pub fn with_window(mut self, w: &'a dyn WindowFn) -> Self {
        self.window = Some(w);
        self
    }

    fn var(&self, v: CanonicalVar) -> Result<Complex64, CoreError> {
        self.vars[v.index()].ok_or_else(|| CoreError::UnboundSymbol {
            symbol: v.to_string(),
        })
    }

    fn param(&self, p: Param) -> Result<Complex64, CoreError> {
        self.params[p.index()].ok_or_else(|| CoreError::UnboundSymbol {
            symbol: p.to_string(),
        })
    }
}

impl<'a> Default for EvalContext<'a> {
    fn default() -> Self {
        Self::new()
    }
}

fn eval_atom(atom: &Atom, ctx: &EvalContext<'_>) -> Result<Complex64, CoreError> {
    match atom {
        Atom::Pi => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
        Atom::Param(p) => ctx.param(*p),
        Atom::Var(v) => ctx.var(*v),
        Atom::Eta { order } => {
            let r = ctx.var(CanonicalVar::R)?;
            if r.im != 0.0 {
                return Err(CoreError::EtaComplexArgument {
                    value: format!("{r}"),
                });
            }
            let window = ctx.window.ok_or_else(|| CoreError::UnboundSymbol {
                symbol: String::from("eta(r)"),
            })?;
            let derivs = window.derivs(r.re, *order as usize)?;
            Ok(Complex64::new(derivs[*order as usize], 0.0))
        }
        Atom::Sin(arg) => Ok(arg.eval(ctx)?.sin()),
        Atom::Cos(arg) => Ok(arg.eval(ctx)?.cos()),
    }
}

fn eval_poly(p: &Poly, ctx: &EvalContext<'_>) -> Result<Complex64, CoreError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (mono, coeff) in &p.0 {
        let mut term = Complex64::new(coeff.to_f64(), 0.0);
        for (atom, &k) in &mono.0 {
            let v = eval_atom(atom, ctx)?;
            term *= v.powi(k as i32);
        }
        acc += term;
    }
    Ok(acc)
}

// ---- exact trig table -----------------------------------------------------

/// Exact sin/cos of `q·π` for quarter-integer `q`; `None` if outside the
/// table.
fn exact_trig(q: &BigRational, sine: bool) -> Option<Rt2> {
    let four = BigRational::from_integer(4.into());
    let scaled = q * &four;
    if !scaled.denom().is_one() {
        return None;
    }
    let mut k = (scaled.numer() % 8i32).to_i64()?;
    if k < 0 {
        k += 8;
    }
    let half_rt2 = &Rt2::sqrt2() * &Rt2::from_ratio(1, 2);
    let neg_half_rt2 = -&half_rt2;
    let table_sin = [
        Rt2::zero(),
        half_rt2.clone(),
        Rt2::one(),
        half_rt2.clone(),
        Rt2::zero(),
        neg_half_rt2.clone(),
        Rt2::from_int(-1),
        neg_half_rt2.clone(),
    ];
    let table_cos = [
        Rt2::one(),
        half_rt2.clone(),
        Rt2::zero(),
        neg_half_rt2.clone(),
        Rt2::from_int(-1),
        neg_half_rt2,
        Rt2::zero(),
        half_rt2,
    ];
    let t = if sine { table_sin } else { table_cos };
    Some(t[k as usize].clone())
}

// ---- display --------------------------------------------------------------

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.0.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::PolynomialWindow;

    fn r() -> Expr {
        Expr::var(CanonicalVar::R)
    }

    fn pr() -> Expr {
        Expr::var(CanonicalVar::PR)
    }

    #[test]
    fn arithmetic_collects_and_cancels() {
        // (r + r) == 2r, and (r² − 1)/(r − 1) == r + 1
        assert_eq!(r() + r(), Expr::int(2) * r());
        let num = r() * r() - Expr::one();
        let den = r() - Expr::one();
        assert_eq!(num / den, r() + Expr::one());
    }

    #[test]
    fn quotient_sum_stays_reduced() {
        // 1 − x²/(1+x²) == 1/(1+x²), the cancellation pattern the Dirac
        // pipeline relies on (x standing in for η′).
        let x = Expr::eta(1);
        let c = Expr::one() + x.clone() * x.clone();
        let lhs = Expr::one() - x.clone() * x.clone() / c.clone();
        assert_eq!(lhs, Expr::one() / c);
    }

    #[test]
    fn nested_quotient_addition_reduces() {
        // a/c + b/c² = (a·c + b)/c²; adding then multiplying by c² must give
        // back the polynomial numerator exactly.
        let a = pr();
        let b = r();
        let c = Expr::one() + Expr::eta(1) * Expr::eta(1);
        let sum = a.clone() / c.clone() + b.clone() / (c.clone() * c.clone());
        let cleared = sum * c.clone() * c.clone();
        assert_eq!(cleared, a * c + b);
    }

    #[test]
    fn sqrt2_collapses_in_products() {
        assert_eq!(Expr::sqrt2() * Expr::sqrt2(), Expr::int(2));
        let w = Expr::sqrt2() * Expr::eta(1);
        assert_eq!(w.clone() * w, Expr::int(2) * Expr::eta(1) * Expr::eta(1));
    }

    #[test]
    fn pi_quarter_trig_is_exact() {
        let quarter_pi = Expr::pi() * Expr::rational(1, 4);
        let s = Expr::sin(quarter_pi.clone());
        let c = Expr::cos(quarter_pi);
        // sin(π/4) = cos(π/4) = √2/2, and their squares sum to 1.
        assert_eq!(s, c);
        assert_eq!(s.clone() * s.clone() + c.clone() * c, Expr::one());
        assert_eq!(s * Expr::sqrt2(), Expr::one());
        assert_eq!(Expr::sin(Expr::zero()), Expr::zero());
        assert_eq!(Expr::cos(Expr::zero()), Expr::one());
        assert_eq!(Expr::sin(Expr::pi()), Expr::zero());
    }

    #[test]
    fn general_trig_stays_symbolic() {
        let s = Expr::sin(Expr::var(CanonicalVar::Sigma));
        assert!(!s.is_zero());
        assert_eq!(s.to_string(), "sin(sigma)");
    }

    #[test]
    fn derivative_basics() {
        // ∂(ρ cos σ)/∂σ = −ρ sin σ
        let e = Expr::var(CanonicalVar::Rho) * Expr::cos(Expr::var(CanonicalVar::Sigma));
        let d = e.differentiate(CanonicalVar::Sigma).unwrap();
        let expected =
            -(Expr::var(CanonicalVar::Rho) * Expr::sin(Expr::var(CanonicalVar::Sigma)));
        assert_eq!(d, expected);
        // ∂η(r)/∂r = η′(r), chain through powers: ∂(η²)/∂r = 2ηη′
        assert_eq!(
            Expr::eta(0).differentiate(CanonicalVar::R).unwrap(),
            Expr::eta(1)
        );
        let e2 = Expr::eta(0) * Expr::eta(0);
        assert_eq!(
            e2.differentiate(CanonicalVar::R).unwrap(),
            Expr::int(2) * Expr::eta(0) * Expr::eta(1)
        );
    }

    #[test]
    fn quotient_rule() {
        // d(1/r)/dr = −1/r²
        let e = Expr::one() / r();
        let d = e.differentiate(CanonicalVar::R).unwrap();
        assert_eq!(d, -(Expr::one() / (r() * r())));
    }

    #[test]
    fn eta_cap_is_enforced() {
        let e = Expr::eta(10);
        let err = e.differentiate(CanonicalVar::R).unwrap_err();
        match err {
            CoreError::EtaOrderExceeded { requested, cap } => {
                assert_eq!((requested, cap), (11, 10));
            }
            other => panic!("unexpected error {other:?}"),
        }
        // A larger cap admits it.
        assert_eq!(
            e.differentiate_capped(CanonicalVar::R, 12).unwrap(),
            Expr::eta(11)
        );
    }

    #[test]
    fn canonical_poisson_brackets() {
        // {r, p_r} = 1, {r, p_θ} = 0, {q, q} = 0
        let one = Expr::poisson_bracket(&r(), &pr()).unwrap();
        assert_eq!(one, Expr::one());
        let zero = Expr::poisson_bracket(&r(), &Expr::var(CanonicalVar::PTheta)).unwrap();
        assert!(zero.is_zero());
        let auto = Expr::poisson_bracket(&r(), &r()).unwrap();
        assert!(auto.is_zero());
    }

    #[test]
    fn strong_substitution_rules() {
        use WindowNormalization::*;
        // ρ − √2·η(r) → 0 under the √2 normalization
        let phi1 = Expr::var(CanonicalVar::Rho) - Expr::sqrt2() * Expr::eta(0);
        assert!(phi1.substitute_strong(RootTwo).is_zero());
        // σ − π/4 → 0, p_σ → 0
        let phi2 = Expr::var(CanonicalVar::Sigma) - Expr::pi() * Expr::rational(1, 4);
        assert!(phi2.substitute_strong(RootTwo).is_zero());
        assert!(Expr::var(CanonicalVar::PSigma)
            .substitute_strong(Unit)
            .is_zero());
        // p_ρ − √2·η′·p_r → 0
        let psi2 = Expr::var(CanonicalVar::PRho) - Expr::sqrt2() * Expr::eta(1) * pr();
        assert!(psi2.substitute_strong(RootTwo).is_zero());
        // sin σ collapses exactly inside nested arguments
        let s = Expr::sin(Expr::var(CanonicalVar::Sigma));
        assert_eq!(s.substitute_strong(Unit) * Expr::sqrt2(), Expr::one());
    }

    #[test]
    fn eval_binds_and_fails_cleanly() {
        let profile = PolynomialWindow::new(vec![0.0, 0.0, 1.0]); // η(r) = r²
        let ctx = EvalContext::natural_units()
            .set_var_f64(CanonicalVar::R, 2.0)
            .with_window(&profile);
        // η′(r) at r=2 is 4
        let v = Expr::eta(1).eval(&ctx).unwrap();
        assert!((v.re - 4.0).abs() < 1e-15 && v.im == 0.0);
        // unbound variable is a typed error
        let err = pr().eval(&ctx).unwrap_err();
        assert!(matches!(err, CoreError::UnboundSymbol { .. }));
        // vanishing denominator is a typed error carrying the denominator
        let singular = Expr::one() / (r() - Expr::int(2));
        match singular.eval(&ctx).unwrap_err() {
            CoreError::SingularEvaluation { denominator, .. } => {
                assert!(denominator.contains('r'));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn display_is_stable() {
        let c = Expr::one() + Expr::eta(1) * Expr::eta(1);
        let e = Expr::one() / c;
        assert_eq!(e.to_string(), "1/(eta'(r)^2 + 1)");
        let m = -(Expr::eta(1) / (Expr::one() + Expr::eta(1) * Expr::eta(1)));
        assert_eq!(m.to_string(), "-eta'(r)/(eta'(r)^2 + 1)");
    }
}
