//! Canonical multivariate polynomials over the symbolic atoms.
//!
//! A polynomial is a sorted map monomial → coefficient with no zero entries;
//! a monomial is a sorted map atom → positive power. Monomials are compared
//! in lexicographic order over the (totally ordered) atom alphabet, which is a
//! proper monomial order, so single-divisor long division by leading terms
//! terminates and exact divisibility is decidable. That exact division is the
//! workhorse behind quotient cancellation in [`super::Expr`].

use super::coeff::Rt2;
use super::{CanonicalVar, Param};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::expr::Expr;

/// An atomic symbolic factor. The declaration order fixes the canonical
/// ordering: π, then parameters, then canonical variables (coordinates before
/// momenta, by pair), then formal η-derivatives by order, then trig factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    /// The circle constant, kept exact so σ = π/4 stays symbolic.
    Pi,
    /// A physical parameter.
    Param(Param),
    /// A canonical phase-space variable.
    Var(CanonicalVar),
    /// Formal k-th derivative η⁽ᵏ⁾(r) of the window profile. The argument is
    /// always the radial variable `r`; the inverse-radial chart is handled
    /// numerically downstream, never symbolically.
    Eta { order: u32 },
    /// sin of a normalized subexpression (in practice the window angle σ or
    /// the polar angle θ).
    Sin(Box<Expr>),
    /// cos of a normalized subexpression.
    Cos(Box<Expr>),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pi => write!(f, "pi"),
            Atom::Param(p) => write!(f, "{p}"),
            Atom::Var(v) => write!(f, "{v}"),
            Atom::Eta { order } => match order {
                0 => write!(f, "eta(r)"),
                1 => write!(f, "eta'(r)"),
                2 => write!(f, "eta''(r)"),
                3 => write!(f, "eta'''(r)"),
                k => write!(f, "eta^({k})(r)"),
            },
            Atom::Sin(e) => write!(f, "sin({e})"),
            Atom::Cos(e) => write!(f, "cos({e})"),
        }
    }
}

/// A product of atom powers. The empty monomial is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Monomial(pub BTreeMap<Atom, u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(a, 1);
        Monomial(m)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, k) in &other.0 {
            *out.entry(a.clone()).or_insert(0) += k;
        }
        Monomial(out)
    }

    /// Exact monomial quotient, if every power of `other` fits.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for (a, k) in &other.0 {
            match out.get_mut(a) {
                Some(p) if *p > *k => *p -= k,
                Some(p) if *p == *k => {
                    out.remove(a);
                }
                _ => return None,
            }
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of powers (monomial gcd).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = BTreeMap::new();
        for (a, k) in &self.0 {
            if let Some(j) = other.0.get(a) {
                out.insert(a.clone(), (*k).min(*j));
            }
        }
        Monomial(out)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Lexicographic order over the atom alphabet: the monomial with the
    /// higher power on the earliest differing atom is greater. This is a
    /// multiplicative well-order, unlike the structural order of the
    /// underlying maps.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut ia = self.0.iter().peekable();
        let mut ib = other.0.iter().peekable();
        loop {
            match (ia.peek(), ib.peek()) {
                (None, None) => return Ordering::Equal,
                // `self` has a power on an atom `other` lacks entirely from
                // here on: self is greater on that (earlier) atom.
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((aa, ka)), Some((ab, kb))) => match aa.cmp(ab) {
                    // Earlier atom present only in self ⇒ greater.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ka != kb {
                            return ka.cmp(kb);
                        }
                        ia.next();
                        ib.next();
                    }
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for (a, k) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *k == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{k}")?;
            }
        }
        Ok(())
    }
}

/// A canonical polynomial: monomial → nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly(pub BTreeMap<Monomial, Rt2>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: Rt2) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::unit(), c);
        }
        Poly(m)
    }

    pub fn one() -> Self {
        Poly::constant(Rt2::one())
    }

    pub fn atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::atom(a), Rt2::one());
        Poly(m)
    }

    pub fn term(mono: Monomial, c: Rt2) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(mono, c);
        }
        Poly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The constant value, if the polynomial has no atoms.
    pub fn as_constant(&self) -> Option<&Rt2> {
        if self.0.is_empty() {
            return None;
        }
        if self.0.len() == 1 {
            let (m, c) = self.0.iter().next().unwrap();
            if m.is_unit() {
                return Some(c);
            }
        }
        None
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            match out.get_mut(m) {
                Some(existing) => {
                    let sum = &*existing + c;
                    if sum.is_zero() {
                        out.remove(m);
                    } else {
                        *existing = sum;
                    }
                }
                None => {
                    out.insert(m.clone(), c.clone());
                }
            }
        }
        Poly(out)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out: BTreeMap<Monomial, Rt2> = BTreeMap::new();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let m = ma.mul(mb);
                let c = ca * cb;
                match out.get_mut(&m) {
                    Some(existing) => {
                        let sum = &*existing + &c;
                        if sum.is_zero() {
                            out.remove(&m);
                        } else {
                            *existing = sum;
                        }
                    }
                    None => {
                        if !c.is_zero() {
                            out.insert(m, c);
                        }
                    }
                }
            }
        }
        Poly(out)
    }

    pub fn scale(&self, c: &Rt2) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Leading (greatest) monomial and its coefficient.
    pub fn leading(&self) -> (&Monomial, &Rt2) {
        self.0
            .iter()
            .next_back()
            .expect("leading term of zero polynomial")
    }

    /// Greatest common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut iter = self.0.keys();
        let mut g = match iter.next() {
            Some(m) => m.clone(),
            None => return Monomial::unit(),
        };
        for m in iter {
            if g.is_unit() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Divides every term by a common monomial factor (must divide exactly).
    pub fn div_monomial(&self, g: &Monomial) -> Poly {
        if g.is_unit() {
            return self.clone();
        }
        Poly(
            self.0
                .iter()
                .map(|(m, c)| (m.div(g).expect("monomial content must divide"), c.clone()))
                .collect(),
        )
    }

    /// Exact polynomial division: returns `q` with `self = q·d`, or `None` if
    /// no exact quotient exists. Long division by leading terms under the
    /// lexicographic monomial order.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inverse()));
        }
        let mut rem = self.clone();
        let mut q = Poly::zero();
        let (dm, dc) = {
            let (m, c) = d.leading();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading();
                (m.clone(), c.clone())
            };
            let m = rm.div(&dm)?;
            let c = &rc / &dc;
            let t = Poly::term(m, c);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Leading terms first for readability.
        let mut first = true;
        for (m, c) in self.0.iter().rev() {
            let neg = c.is_negative_value();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_unit() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::atom(Atom::Var(CanonicalVar::R))
    }

    fn y() -> Poly {
        Poly::atom(Atom::Var(CanonicalVar::Rho))
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let mx = Monomial::atom(Atom::Var(CanonicalVar::R));
        let my = Monomial::atom(Atom::Var(CanonicalVar::Rho));
        // r sorts before rho in the atom alphabet, so r-heavy monomials are
        // greater; multiplying both sides by a common monomial preserves it.
        assert!(mx > my);
        assert!(mx.mul(&mx) > mx.mul(&my));
        assert!(mx.mul(&my) > my.mul(&my));
    }

    #[test]
    fn add_collects_like_terms() {
        let p = x().add(&x());
        let expected = x().scale(&Rt2::from_int(2));
        assert_eq!(p, expected);
        assert!(p.sub(&expected).is_zero());
    }

    #[test]
    fn product_of_binomials() {
        // (x + y)(x − y) = x² − y²
        let p = x().add(&y()).mul(&x().sub(&y()));
        let expected = x().mul(&x()).sub(&y().mul(&y()));
        assert_eq!(p, expected);
    }

    #[test]
    fn exact_division_succeeds_and_fails_properly() {
        // (x² − y²)/(x − y) = x + y
        let num = x().mul(&x()).sub(&y().mul(&y()));
        let den = x().sub(&y());
        assert_eq!(num.div_exact(&den), Some(x().add(&y())));
        // (x² + 1) is not divisible by (x − y)
        let num2 = x().mul(&x()).add(&Poly::one());
        assert_eq!(num2.div_exact(&den), None);
    }

    #[test]
    fn division_by_constant_scales() {
        let p = x().scale(&Rt2::from_int(6));
        let q = p.div_exact(&Poly::constant(Rt2::from_int(3))).unwrap();
        assert_eq!(q, x().scale(&Rt2::from_int(2)));
    }

    #[test]
    fn monomial_content_extraction() {
        // x²y + xy² has content xy
        let p = x().mul(&x()).mul(&y()).add(&x().mul(&y()).mul(&y()));
        let g = p.monomial_content();
        assert_eq!(
            g,
            Monomial::atom(Atom::Var(CanonicalVar::R))
                .mul(&Monomial::atom(Atom::Var(CanonicalVar::Rho)))
        );
        let reduced = p.div_monomial(&g);
        assert_eq!(reduced, x().add(&y()));
    }
}
