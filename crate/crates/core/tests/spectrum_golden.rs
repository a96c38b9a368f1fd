//! Frozen-value regression tests for the spectrum machinery, plus a
//! root-finding use case: tuning a boundary Taylor coefficient of the window
//! until the leftover boundary condition closes.
//!
//! The pinned numbers were produced by this implementation and cross-checked
//! against the independent routes exercised elsewhere in the suite (closed
//! forms, kernel vectors, series–integrator agreement). They guard against
//! silent drift in the determinant pipeline.

use num_complex::Complex64;
use qwindow_core::{
    determinant_spectrum, eta_boundary_conditions, first_excited, EtaProfile, ProfileKind,
    TaylorCoeffs,
};

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

fn taylor(c2: f64) -> EtaProfile {
    EtaProfile::new(
        ProfileKind::TaylorAtBoundary {
            coeffs: vec![0.3, 0.5, c2],
        },
        1.4,
    )
    .unwrap()
}

#[test]
fn first_excited_regression() {
    let profile = damped();
    let coeffs = TaylorCoeffs::new(&profile, 0, 6).unwrap();
    let fe = first_excited(&coeffs, &profile).unwrap();
    let pinned = 0.194996957293768;
    assert!(
        (fe.entry.energy_bar - Complex64::new(pinned, 0.0)).norm() < 1e-12,
        "first excited level moved: {}",
        fe.entry.energy_bar
    );
    assert!((fe.closed_form - fe.entry.energy_bar).norm() < 1e-12);
    assert!(fe.entry.residual < 1e-14);
    assert!(!fe.entry.is_transition());
    // l = 0, so the whole level is profile-generated remainder.
    assert!((fe.entry.remainder - fe.entry.energy_bar).norm() < 1e-15);
}

#[test]
fn cubic_truncation_root_set_regression() {
    let coeffs = TaylorCoeffs::new(&damped(), 1, 5).unwrap();
    let roots = determinant_spectrum(&coeffs, 0, 3).unwrap();
    let pinned = [
        Complex64::new(-23.5386596692610297, 0.0),
        Complex64::new(-1.46402607717330246, -2.09416912325380089),
        Complex64::new(-1.46402607717330246, 2.09416912325380089),
        Complex64::new(0.476498532214139126, 0.0),
    ];
    assert_eq!(roots.len(), pinned.len());
    for (entry, want) in roots.iter().zip(&pinned) {
        assert!(
            (entry.energy_bar - want).norm() <= 1e-9 * (1.0 + want.norm()),
            "root moved: {} vs {}",
            entry.energy_bar,
            want
        );
        assert!(entry.residual < 1e-12, "residual {}", entry.residual);
    }
    // The complex pair is an exact conjugate pair and is flagged as a
    // transition (finite-width) level.
    assert_eq!(roots[1].energy_bar, roots[2].energy_bar.conj());
    assert!(roots[1].is_transition());
    assert!(!roots[0].is_transition());
}

#[test]
fn boundary_condition_residual_regression() {
    let tc = TaylorCoeffs::new(&taylor(-0.2), 1, 3).unwrap();
    let ec = eta_boundary_conditions(&tc, 2).unwrap();
    assert!(
        (ec.energy_bar - Complex64::new(1.99232, 0.0)).norm() < 1e-10,
        "spectral energy moved: {}",
        ec.energy_bar
    );
    assert!(
        (ec.residuals[0] - Complex64::new(-4.059968, 0.0)).norm() < 1e-9,
        "leftover residual moved: {}",
        ec.residuals[0]
    );
    assert_eq!(
        ec.rendered[0],
        "p[2]*a0 + q[1]*a0 + 2*p[1]*a1 + q[0]*a1"
    );
    assert_eq!(ec.a.len(), 2);
    assert_eq!(ec.a[0], Complex64::new(1.0, 0.0));
}

/// Secant iteration on the window's second boundary Taylor coefficient until
/// the first leftover boundary equation closes. Checks both convergence and
/// the solved coefficient against a frozen reference.
#[test]
fn window_tuning_closes_boundary_condition() {
    let f = |c2: f64| -> f64 {
        let tc = TaylorCoeffs::new(&taylor(c2), 1, 3).unwrap();
        eta_boundary_conditions(&tc, 2).unwrap().residuals[0].re
    };
    let mut x0 = -0.2;
    let mut x1 = -0.1;
    let mut f0 = f(x0);
    let mut f1 = f(x1);
    let mut converged = false;
    for _ in 0..60 {
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if f1.abs() < 1e-12 {
            converged = true;
            break;
        }
    }
    assert!(converged, "secant stalled at c2={x1}, F={f1}");
    assert!(f1.abs() < 1e-10);
    let pinned = -0.426410103544676899;
    assert!(
        (x1 - pinned).abs() < 1e-9,
        "tuned coefficient moved: {x1} vs {pinned}"
    );
    // The tuned window still produces a clean real spectral level.
    let tc = TaylorCoeffs::new(&taylor(x1), 1, 3).unwrap();
    let ec = eta_boundary_conditions(&tc, 2).unwrap();
    assert_eq!(ec.energy_bar.im, 0.0);
    assert!(ec.residuals[0].norm() < 1e-10);
}
