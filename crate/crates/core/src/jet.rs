//! Truncated Taylor series ("jets") with exact propagation of elementary
//! operations.
//!
//! A [`Jet`] holds the coefficients `c_0..c_n` of `f(x₀ + t) = Σ c_k tᵏ`
//! truncated at a fixed order. All arithmetic is closed-form coefficient
//! recurrences, so the k-th derivative of a composite profile is obtained to
//! machine precision rather than by finite differencing. Jets are the numeric
//! backbone for window-profile derivatives and for transporting profiles
//! between the radial chart and the inverted chart.

use crate::error::CoreError;
use std::ops::{Add, Mul, Neg, Sub};

/// Taylor coefficients of a scalar function about a point, truncated at a
/// fixed order. Index `k` stores `f⁽ᵏ⁾(x₀)/k!`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    /// The constant function `value`, carried to `order`.
    pub fn constant(value: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The identity `x₀ + t` expanded about `x₀`, carried to `order`.
    pub fn variable(value: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { coeffs }
    }

    /// Builds a jet directly from Taylor coefficients (`c_k = f⁽ᵏ⁾/k!`).
    pub fn from_coeffs(coeffs: Vec<f64>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant term");
        Jet { coeffs }
    }

    /// Truncation order `n` (the jet stores `n + 1` coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// The value `f(x₀)`.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Derivatives `f, f′, …, f⁽ⁿ⁾` at the expansion point (coefficients
    /// rescaled by `k!`).
    pub fn derivatives(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut fact = 1.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            out.push(c * fact);
        }
        out
    }

    /// Re-truncates to a (lower or equal) order.
    pub fn truncated(&self, order: usize) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, 0.0);
        Jet { coeffs }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Derivative of the series with respect to `t`, same truncation order
    /// (the top coefficient becomes unknown and is dropped to zero).
    pub fn differentiate(&self) -> Jet {
        let n = self.order();
        let mut coeffs = vec![0.0; n + 1];
        for k in 1..=n {
            coeffs[k - 1] = self.coeffs[k] * k as f64;
        }
        Jet { coeffs }
    }

    /// Multiplicative inverse; fails when the constant term vanishes.
    pub fn recip(&self) -> Result<Jet, CoreError> {
        let u0 = self.coeffs[0];
        if u0 == 0.0 {
            return Err(CoreError::invalid(
                "cannot invert a jet whose value at the expansion point is zero",
            ));
        }
        let n = self.order();
        let mut r = vec![0.0; n + 1];
        r[0] = 1.0 / u0;
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.coeffs[j] * r[k - j];
            }
            r[k] = -s / u0;
        }
        Ok(Jet { coeffs: r })
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet, CoreError> {
        Ok(self * &rhs.recip()?)
    }

    /// Exponential `exp(f)` via the standard convolution recurrence.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut e = vec![0.0; n + 1];
        e[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.coeffs[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet { coeffs: e }
    }

    /// Simultaneous sine and cosine of the jet (the recurrences are coupled).
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..=n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                ds += j as f64 * self.coeffs[j] * c[k - j];
                dc += j as f64 * self.coeffs[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = -dc / k as f64;
        }
        (Jet { coeffs: s }, Jet { coeffs: c })
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(&self, n: i32) -> Result<Jet, CoreError> {
        if n == 0 {
            return Ok(Jet::constant(1.0, self.order()));
        }
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = Jet::constant(1.0, self.order());
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Evaluates this jet's truncated polynomial on another jet with zero
    /// constant term (formal composition `self ∘ inner`). Both jets must share
    /// the truncation order of the result.
    pub fn compose(&self, inner: &Jet) -> Jet {
        assert!(
            inner.value() == 0.0,
            "composition requires the inner jet to vanish at the expansion point"
        );
        let order = inner.order();
        let mut acc = Jet::constant(0.0, order);
        for c in self.coeffs.iter().rev() {
            acc = &acc * inner;
            acc.coeffs[0] += c;
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order(), "jet order mismatch");
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order(), "jet order mismatch");
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order(), "jet order mismatch");
        let n = self.order();
        let mut out = vec![0.0; n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn exp_matches_closed_form() {
        // f(t) = exp(3 + 2t): c_k = e³·2ᵏ/k!
        let mut coeffs = vec![0.0; 9];
        coeffs[0] = 3.0;
        coeffs[1] = 2.0;
        let e = Jet::from_coeffs(coeffs).exp();
        let e3 = 3.0f64.exp();
        let mut expect = Vec::new();
        let mut fact = 1.0;
        for k in 0..=8 {
            if k > 0 {
                fact *= k as f64;
            }
            expect.push(e3 * 2.0f64.powi(k as i32) / fact);
        }
        assert_close(e.coeffs(), &expect, 1e-14);
    }

    #[test]
    fn sin_cos_match_shifted_series() {
        let x0 = 0.7;
        let u = Jet::variable(x0, 10);
        let (s, c) = u.sin_cos();
        // sin(x0 + t) = sin x0 cos t + cos x0 sin t
        let mut expect_s = Vec::new();
        let mut expect_c = Vec::new();
        let mut fact = 1.0;
        for k in 0..=10u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let (ds, dc) = match k % 4 {
                0 => (x0.sin(), x0.cos()),
                1 => (x0.cos(), -x0.sin()),
                2 => (-x0.sin(), -x0.cos()),
                _ => (-x0.cos(), x0.sin()),
            };
            expect_s.push(ds / fact);
            expect_c.push(dc / fact);
        }
        assert_close(s.coeffs(), &expect_s, 1e-14);
        assert_close(c.coeffs(), &expect_c, 1e-14);
        // Pythagorean identity as a jet: s² + c² = 1 with all higher
        // coefficients cancelling.
        let one = &(&s * &s) + &(&c * &c);
        let mut expect_one = vec![0.0; 11];
        expect_one[0] = 1.0;
        assert_close(one.coeffs(), &expect_one, 1e-14);
    }

    #[test]
    fn recip_round_trips() {
        let u = Jet::from_coeffs(vec![2.0, -1.0, 0.5, 0.25, -3.0]);
        let r = u.recip().unwrap();
        let prod = &u * &r;
        let mut expect = vec![0.0; 5];
        expect[0] = 1.0;
        assert_close(prod.coeffs(), &expect, 1e-14);
        // geometric series check: 1/(1+t) = Σ (−t)ᵏ
        let g = Jet::variable(1.0, 6).recip().unwrap();
        let expect: Vec<f64> = (0..=6).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_close(g.coeffs(), &expect, 1e-14);
        assert!(Jet::variable(0.0, 3).recip().is_err());
    }

    #[test]
    fn powers_and_derivatives() {
        let u = Jet::variable(2.0, 5);
        let cube = u.powi(3).unwrap();
        // (2+t)³ = 8 + 12t + 6t² + t³
        assert_close(cube.coeffs(), &[8.0, 12.0, 6.0, 1.0, 0.0, 0.0], 1e-14);
        assert_close(
            &cube.derivatives(),
            &[8.0, 12.0, 12.0, 6.0, 0.0, 0.0],
            1e-14,
        );
        let inv_sq = u.powi(-2).unwrap();
        // d/dx x⁻² = −2x⁻³ at x=2: coefficient of t is −2/8 = −0.25
        assert!((inv_sq.coeff(0) - 0.25).abs() < 1e-15);
        assert!((inv_sq.coeff(1) + 0.25).abs() < 1e-15);
        let diff = cube.differentiate();
        assert_close(diff.coeffs(), &[12.0, 12.0, 3.0, 0.0, 0.0, 0.0], 1e-14);
    }

    #[test]
    fn composition_evaluates_truncated_polynomial() {
        // exp-jet about 0 composed with 2t + t² reproduces exp(2t + t²).
        let order = 8;
        let base = Jet::variable(0.0, order).exp();
        let mut inner = Jet::constant(0.0, order);
        inner = &inner + &Jet::variable(0.0, order).scale(2.0);
        let t = Jet::variable(0.0, order);
        inner = &inner + &(&t * &t);
        let composed = base.compose(&inner);
        let direct = inner.exp();
        assert_close(composed.coeffs(), direct.coeffs(), 1e-13);
    }
}
