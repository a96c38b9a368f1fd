//! Adaptive Dormand–Prince 5(4) integration for two-component complex linear
//! systems.
//!
//! This integrator exists as an *independent oracle* for the series
//! solutions: it shares no code with the Frobenius machinery. The state is
//! `[R, R′]` over complex scalars, the right-hand side is any closure, and
//! step control follows the standard embedded-pair error estimate with the
//! first-same-as-last optimization.

use crate::error::CoreError;
use num_complex::Complex64;

/// Integration state `[R, R′]`.
pub type State = [Complex64; 2];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Adaptive Dormand–Prince 5(4) integrator settings.
#[derive(Debug, Clone)]
pub struct DormandPrince {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        DormandPrince {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

impl DormandPrince {
    pub fn with_tolerance(rel_tol: f64, abs_tol: f64) -> Self {
        DormandPrince {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    /// Integrates `y′ = rhs(x, y)` from `(x0, y0)`, landing exactly on each
    /// target abscissa in order (steps are clamped to the targets, never
    /// interpolated). Targets must move monotonically away from `x0`; both
    /// directions are supported. Returns one state per target.
    pub fn integrate_to<F>(
        &self,
        rhs: F,
        x0: f64,
        y0: State,
        targets: &[f64],
    ) -> Result<Vec<State>, CoreError>
    where
        F: Fn(f64, &State) -> State,
    {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(CoreError::invalid("integration tolerances must be positive"));
        }
        if targets.is_empty() {
            return Ok(Vec::new());
        }
        let dir = (targets[targets.len() - 1] - x0).signum();
        if dir == 0.0 {
            // All targets coincide with the start.
            return Ok(vec![y0; targets.len()]);
        }
        for w in targets.windows(2) {
            if (w[1] - w[0]) * dir < 0.0 {
                return Err(CoreError::invalid(
                    "integration targets must be monotone in the direction of travel",
                ));
            }
        }
        if (targets[0] - x0) * dir < 0.0 {
            return Err(CoreError::invalid(
                "integration targets must lie on one side of the start point",
            ));
        }

        let span = (targets[targets.len() - 1] - x0).abs().max(f64::MIN_POSITIVE);
        let mut h = dir * (span / 100.0).min(0.1);
        let mut x = x0;
        let mut y = y0;
        let mut k1 = rhs(x, &y);
        let mut out = Vec::with_capacity(targets.len());
        let mut steps = 0usize;

        for &target in targets {
            while (target - x) * dir > 1e-14 * (1.0 + x.abs()) {
                if steps >= self.max_steps {
                    return Err(CoreError::StepBudgetExceeded {
                        location: x,
                        max_steps: self.max_steps,
                    });
                }
                steps += 1;
                // Clamp onto the target so samples are exact grid points.
                let mut clamped = false;
                if (x + h - target) * dir > 0.0 {
                    h = target - x;
                    clamped = true;
                }
                if h.abs() < 1e-14 * (1.0 + x.abs()) {
                    return Err(CoreError::StepUnderflow {
                        location: x,
                        step: h,
                    });
                }
                let (y5, err_norm, k_last) = self.step(&rhs, x, &y, h, &k1);
                if err_norm.is_finite() && err_norm <= 1.0 {
                    x += h;
                    y = y5;
                    k1 = k_last;
                    let scale = if err_norm == 0.0 {
                        MAX_SCALE
                    } else {
                        (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
                    };
                    h *= scale;
                    if clamped && (target - x) * dir <= 1e-14 * (1.0 + x.abs()) {
                        break;
                    }
                } else {
                    let scale = if err_norm.is_finite() {
                        (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, 1.0)
                    } else {
                        MIN_SCALE
                    };
                    h *= scale;
                }
            }
            x = target;
            out.push(y);
        }
        Ok(out)
    }

    /// One embedded step: returns the 5th-order solution, the scaled error
    /// norm, and the last stage derivative (valid as the next first stage).
    fn step<F>(&self, rhs: &F, x: f64, y: &State, h: f64, k1: &State) -> (State, f64, State)
    where
        F: Fn(f64, &State) -> State,
    {
        let hc = Complex64::new(h, 0.0);
        let lin = |y: &State, terms: &[(f64, &State)]| -> State {
            let mut out = *y;
            for (c, k) in terms {
                let cc = hc * *c;
                out[0] += cc * k[0];
                out[1] += cc * k[1];
            }
            out
        };

        let k2 = rhs(x + h / 5.0, &lin(y, &[(1.0 / 5.0, k1)]));
        let k3 = rhs(
            x + 3.0 * h / 10.0,
            &lin(y, &[(3.0 / 40.0, k1), (9.0 / 40.0, &k2)]),
        );
        let k4 = rhs(
            x + 4.0 * h / 5.0,
            &lin(
                y,
                &[(44.0 / 45.0, k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
            ),
        );
        let k5 = rhs(
            x + 8.0 * h / 9.0,
            &lin(
                y,
                &[
                    (19372.0 / 6561.0, k1),
                    (-25360.0 / 2187.0, &k2),
                    (64448.0 / 6561.0, &k3),
                    (-212.0 / 729.0, &k4),
                ],
            ),
        );
        let k6 = rhs(
            x + h,
            &lin(
                y,
                &[
                    (9017.0 / 3168.0, k1),
                    (-355.0 / 33.0, &k2),
                    (46732.0 / 5247.0, &k3),
                    (49.0 / 176.0, &k4),
                    (-5103.0 / 18656.0, &k5),
                ],
            ),
        );
        let y5 = lin(
            y,
            &[
                (35.0 / 384.0, k1),
                (500.0 / 1113.0, &k3),
                (125.0 / 192.0, &k4),
                (-2187.0 / 6784.0, &k5),
                (11.0 / 84.0, &k6),
            ],
        );
        let k7 = rhs(x + h, &y5);
        // Difference of the 5th- and 4th-order weights.
        let e = [
            35.0 / 384.0 - 5179.0 / 57600.0,
            0.0,
            500.0 / 1113.0 - 7571.0 / 16695.0,
            125.0 / 192.0 - 393.0 / 640.0,
            -2187.0 / 6784.0 + 92097.0 / 339200.0,
            11.0 / 84.0 - 187.0 / 2100.0,
            -1.0 / 40.0,
        ];
        let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err_norm = 0.0f64;
        for comp in 0..2 {
            let mut err = Complex64::new(0.0, 0.0);
            for (w, k) in e.iter().zip(ks.iter()) {
                err += hc * *w * k[comp];
            }
            let tol = self.abs_tol + self.rel_tol * y[comp].norm().max(y5[comp].norm());
            err_norm = err_norm.max(err.norm() / tol);
        }
        (y5, err_norm, k7)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn linear_solution_is_exact() {
        // R″ = 0: R(x) = R(1) + R′(1)(x−1).
        let dp = DormandPrince::default();
        let rhs = |_x: f64, y: &State| [y[1], c(0.0)];
        let out = dp
            .integrate_to(rhs, 1.0, [c(1.0), c(2.0)], &[1.25, 1.5])
            .unwrap();
        assert!((out[0][0] - c(1.5)).norm() < 1e-12);
        assert!((out[1][0] - c(2.0)).norm() < 1e-12);
        assert!((out[1][1] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn harmonic_oscillator_matches_sine() {
        let dp = DormandPrince::default();
        let rhs = |_x: f64, y: &State| [y[1], -y[0]];
        let targets: Vec<f64> = (1..=10)
            .map(|i| i as f64 * std::f64::consts::FRAC_PI_2 / 10.0)
            .collect();
        let out = dp.integrate_to(rhs, 0.0, [c(0.0), c(1.0)], &targets).unwrap();
        for (x, s) in targets.iter().zip(&out) {
            assert!((s[0] - c(x.sin())).norm() < 1e-9, "at {x}");
            assert!((s[1] - c(x.cos())).norm() < 1e-9, "at {x}");
        }
    }

    #[test]
    fn backward_integration_works() {
        let dp = DormandPrince::default();
        let rhs = |_x: f64, y: &State| [y[1], -y[0]];
        // Start at π/2 with y = sin: integrate back to 0.
        let out = dp
            .integrate_to(
                rhs,
                std::f64::consts::FRAC_PI_2,
                [c(1.0), c(0.0)],
                &[1.0, 0.5, 0.0],
            )
            .unwrap();
        assert!((out[2][0] - c(0.0)).norm() < 1e-9);
        assert!((out[2][1] - c(1.0)).norm() < 1e-9);
        assert!((out[1][0] - c(0.5f64.sin())).norm() < 1e-9);
    }

    #[test]
    fn complex_frequency_growth() {
        // R″ = i·R with R(0)=1, R′(0)=√i gives R = exp(√i·x).
        let dp = DormandPrince::default();
        let i = Complex64::new(0.0, 1.0);
        let root_i = i.sqrt();
        let rhs = move |_x: f64, y: &State| [y[1], i * y[0]];
        let out = dp
            .integrate_to(rhs, 0.0, [c(1.0), root_i], &[1.0])
            .unwrap();
        let expect = (root_i * 1.0).exp();
        assert!((out[0][0] - expect).norm() < 1e-9, "{} vs {}", out[0][0], expect);
    }

    #[test]
    fn singular_rhs_underflows_with_location() {
        let dp = DormandPrince::default();
        // Coefficient blows up at x = 0.5; marching into it must fail with a
        // located step-size error rather than NaN output.
        let rhs = |x: f64, y: &State| {
            let d = x - 0.5;
            [y[1], y[0] / c(d * d)]
        };
        let err = dp
            .integrate_to(rhs, 0.0, [c(1.0), c(0.0)], &[0.5])
            .unwrap_err();
        match err {
            CoreError::StepUnderflow { location, .. } => {
                assert!((location - 0.5).abs() < 0.05, "stopped at {location}");
            }
            CoreError::StepBudgetExceeded { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn step_budget_is_enforced() {
        let dp = DormandPrince {
            max_steps: 10,
            ..Default::default()
        };
        let rhs = |_x: f64, y: &State| [y[1], -y[0] * c(1e6)];
        let err = dp
            .integrate_to(rhs, 0.0, [c(1.0), c(0.0)], &[10.0])
            .unwrap_err();
        assert!(matches!(err, CoreError::StepBudgetExceeded { max_steps: 10, .. }));
    }

    #[test]
    fn rejects_non_monotone_targets() {
        let dp = DormandPrince::default();
        let rhs = |_x: f64, y: &State| [y[1], c(0.0)];
        assert!(dp
            .integrate_to(rhs, 0.0, [c(1.0), c(0.0)], &[1.0, 0.5])
            .is_err());
    }
}
