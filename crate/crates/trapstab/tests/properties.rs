//! Randomized structural properties: symplectic spectrum structure, angle
//! symmetry, sweep determinism, and Hill-determinant identities.

use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;
use trapstab::{
    build_matrices, classify_default, coupled_boundaries, hill_det, hill_det_single, monodromy,
    spectrum, sweep_grid, sweep_grid_serial, trace_eigenvalues, GridSpec, IntegratorConfig,
    StabilityLabel, TrapParams,
};

fn min_pairwise(values: &[Complex64; 4]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            min = min.min((values[i] - values[j]).norm());
        }
    }
    min
}

proptest! {
    /// The four multipliers always split into reciprocal pairs, close under
    /// conjugation, and multiply to det U = 1.
    #[test]
    fn spectrum_structure(
        q in -3.0..3.0f64,
        a in -3.0..3.0f64,
        alpha in 0.25..4.0f64,
        theta in 0.0..90.0f64,
    ) {
        let p = TrapParams::new(q, a, alpha, theta).unwrap();
        let s = spectrum(&monodromy(p, IntegratorConfig::default()).unwrap()).unwrap();

        for lam in s.values {
            let recip = s
                .values
                .iter()
                .map(|mu| (lam * mu - 1.0).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(recip <= 1e-6, "reciprocal defect {recip:e} for λ={lam}");

            let conj = s
                .values
                .iter()
                .map(|mu| (lam.conj() - mu).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(conj <= 1e-8, "conjugate defect {conj:e} for λ={lam}");
        }

        let product = s.values.iter().product::<Complex64>();
        prop_assert!((product - 1.0).norm() <= 1e-6, "product {product}");
    }

    /// unit_count is always even and the label matches it.
    #[test]
    fn classification_is_consistent(
        q in -3.0..3.0f64,
        a in -3.0..3.0f64,
        alpha in 0.25..4.0f64,
        theta in 0.0..90.0f64,
    ) {
        let p = TrapParams::new(q, a, alpha, theta).unwrap();
        let s = spectrum(&monodromy(p, IntegratorConfig::default()).unwrap()).unwrap();
        let c = classify_default(&s).unwrap();
        prop_assert!([0, 2, 4].contains(&c.unit_count));
        match c.label {
            StabilityLabel::FullyStable | StabilityLabel::Marginal => {
                prop_assert_eq!(c.unit_count, 4)
            }
            StabilityLabel::PartiallyStable => prop_assert_eq!(c.unit_count, 2),
            StabilityLabel::Unstable => prop_assert_eq!(c.unit_count, 0),
        }
    }

    /// Classification is invariant under θ → 90° − θ.
    #[test]
    fn classification_angle_mirror(
        q in 0.0..2.5f64,
        a in -2.0..1.5f64,
        alpha in 0.25..4.0f64,
        theta in 0.0..90.0f64,
    ) {
        let cfg = IntegratorConfig::default();
        let p1 = TrapParams::new(q, a, alpha, theta).unwrap();
        let p2 = TrapParams::new(q, a, alpha, 90.0 - theta).unwrap();
        let c1 = classify_default(&spectrum(&monodromy(p1, cfg).unwrap()).unwrap()).unwrap();
        let c2 = classify_default(&spectrum(&monodromy(p2, cfg).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(c1, c2);
    }

    /// Monodromy at 4096 steps keeps both structural residuals at the
    /// contract tolerance over the sweep ranges of interest.
    #[test]
    fn monodromy_structural_residuals(
        q in 0.0..2.5f64,
        a in -2.0..1.5f64,
        alpha in 0.25..4.0f64,
        theta in 0.0..90.0f64,
    ) {
        let p = TrapParams::new(q, a, alpha, theta).unwrap();
        let u = monodromy(p, IntegratorConfig::with_steps(4096).unwrap()).unwrap();
        prop_assert!(u.symplectic_residual() <= 1e-9);
        prop_assert!(u.det_residual() <= 1e-9);
    }

    /// The RF coupling matrix is exactly traceless and the DC matrix exactly
    /// diagonal, for all parameters.
    #[test]
    fn coefficient_matrices_structure(
        q in -5.0..5.0f64,
        a in -5.0..5.0f64,
        alpha in 0.1..10.0f64,
        theta in -400.0..400.0f64,
    ) {
        let p = TrapParams::new(q, a, alpha, theta).unwrap();
        let m = build_matrices(p).unwrap();
        prop_assert_eq!(m.q_mat[(0, 0)] + m.q_mat[(1, 1)], 0.0);
        prop_assert_eq!(m.q_mat[(0, 1)], m.q_mat[(1, 0)]);
        prop_assert_eq!(m.a_mat[(0, 1)], 0.0);
        prop_assert_eq!(m.a_mat[(1, 0)], 0.0);
    }

    /// With the RF off, exactly one oscillator is confined: one pair on the
    /// unit circle for every a ≠ 0 below the first resonance.
    #[test]
    fn rf_off_line_is_partially_stable(
        a in prop_oneof![-4.0..-0.01f64, 0.01..1.0f64],
        alpha in 0.3..3.0f64,
        theta in 0.0..90.0f64,
    ) {
        let p = TrapParams::new(0.0, a, alpha, theta).unwrap();
        let s = spectrum(&monodromy(p, IntegratorConfig::default()).unwrap()).unwrap();
        let c = classify_default(&s).unwrap();
        prop_assert_eq!(c.unit_count, 2, "a={}, alpha={}", a, alpha);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Sweeps are deterministic and independent of the execution engine.
    #[test]
    fn sweep_is_deterministic(
        q0 in 0.0..1.0f64,
        a0 in -0.8..0.5f64,
        nq in 2usize..5,
        na in 2usize..5,
        alpha in 0.3..3.0f64,
        theta in 0.0..90.0f64,
    ) {
        let spec = GridSpec {
            q_min: q0,
            q_max: q0 + 0.7,
            a_min: a0,
            a_max: a0 + 0.6,
            nq,
            na,
        };
        let cfg = IntegratorConfig::with_steps(256).unwrap();
        let g1 = sweep_grid(alpha, theta, spec, cfg).unwrap();
        let g2 = sweep_grid(alpha, theta, spec, cfg).unwrap();
        let g3 = sweep_grid_serial(alpha, theta, spec, cfg).unwrap();
        prop_assert_eq!(&g1, &g2);
        prop_assert_eq!(&g1, &g3);
        prop_assert_eq!(g1.cells.len(), nq * na);
    }

    /// Grid-level mirror symmetry: θ and 90° − θ classify identically.
    #[test]
    fn sweep_angle_mirror(
        theta in 0.0..45.0f64,
        a0 in -0.6..0.3f64,
    ) {
        let spec = GridSpec {
            q_min: 0.1,
            q_max: 0.9,
            a_min: a0,
            a_max: a0 + 0.5,
            nq: 3,
            na: 3,
        };
        let cfg = IntegratorConfig::with_steps(256).unwrap();
        let g1 = sweep_grid(0.5, theta, spec, cfg).unwrap();
        let g2 = sweep_grid(0.5, 90.0 - theta, spec, cfg).unwrap();
        prop_assert_eq!(g1.cells, g2.cells);
    }

    /// The Hill determinant depends on the angle only through c² and s².
    #[test]
    fn hill_det_angle_mirror(
        nu in 0u8..2,
        q in 0.0..1.5f64,
        a in -2.0..2.0f64,
        alpha in 0.3..3.0f64,
        theta in 0.0..90.0f64,
    ) {
        let p1 = TrapParams::new(q, a, alpha, theta).unwrap();
        let p2 = TrapParams::new(q, a, alpha, 90.0 - theta).unwrap();
        let d1 = hill_det(nu, p1, 12).unwrap();
        let d2 = hill_det(nu, p2, 12).unwrap();
        prop_assert!(
            (d1.value - d2.value).abs() <= 1e-9 * d1.value.abs().max(1.0),
            "{} vs {}",
            d1.value,
            d2.value
        );
    }

    /// At θ = 0 the block determinant factors into the two single-variable
    /// determinants evaluated at (a, q) and (−αa, −q).
    #[test]
    fn hill_det_decoupled_factorization(
        nu in 0u8..2,
        q in 0.0..1.5f64,
        a in -2.0..2.0f64,
        alpha in 0.3..3.0f64,
    ) {
        let p = TrapParams::new(q, a, alpha, 0.0).unwrap();
        let full = hill_det(nu, p, 10).unwrap();
        let x = hill_det_single(nu, a, q, 10).unwrap();
        let y = hill_det_single(nu, -alpha * a, -q, 10).unwrap();
        let prod = x.value * y.value;
        prop_assert!(
            (full.value - prod).abs() <= 1e-8 * full.value.abs().max(1.0),
            "block {} vs product {}",
            full.value,
            prod
        );
    }

    /// All four closed-form coupled boundary curves are mirror invariant.
    #[test]
    fn multiscale_angle_mirror(
        alpha in 0.3..3.0f64,
        theta in 0.0..90.0f64,
    ) {
        let qs = [0.0, 0.1, 0.25, 0.4];
        let b1 = coupled_boundaries(alpha, theta, &qs).unwrap();
        let b2 = coupled_boundaries(alpha, 90.0 - theta, &qs).unwrap();
        for (c1, c2) in b1.iter().zip(&b2) {
            for (p1, p2) in c1.points.iter().zip(&c2.points) {
                prop_assert!((p1.1 - p2.1).abs() <= 1e-12 * p1.1.abs().max(1.0));
            }
        }
    }
}

/// A coarse sweep and a 3× refined sweep evaluate the coarse cell centers at
/// identical coordinates (the center of fine cell 3i+1 is the center of
/// coarse cell i), so their classifications there must agree.
#[test]
fn refined_sweep_agrees_on_shared_centers() {
    let coarse_spec = GridSpec {
        q_min: 0.1,
        q_max: 1.1,
        a_min: -0.3,
        a_max: 0.5,
        nq: 5,
        na: 4,
    };
    let fine_spec = GridSpec {
        nq: 15,
        na: 12,
        ..coarse_spec
    };
    let cfg = IntegratorConfig::with_steps(512).unwrap();
    let coarse = sweep_grid(0.8, 17.0, coarse_spec, cfg).unwrap();
    let fine = sweep_grid(0.8, 17.0, fine_spec, cfg).unwrap();
    for i in 0..coarse_spec.nq {
        for j in 0..coarse_spec.na {
            assert_eq!(
                coarse.cell(i, j),
                fine.cell(3 * i + 1, 3 * j + 1),
                "cell ({i}, {j})"
            );
        }
    }
}

/// At a refined classification transition, the two multipliers involved have
/// just collided: the minimum pairwise distance there is tiny.
#[test]
fn transitions_coincide_with_collisions() {
    let cfg = IntegratorConfig::default();
    let lines = [
        (0.5, 0.0, 0.5, (-0.5, 1.5)),
        (0.5, 6.4, 1.5, (1.7, 2.1)),
        (1.0, 20.0, 0.7, (-0.6, 1.0)),
    ];
    let mut seen = 0;
    for (alpha, theta, q, range) in lines {
        let trace = trace_eigenvalues(alpha, theta, q, range, 81, cfg).unwrap();
        for c in &trace.collisions {
            let p = TrapParams::new(q, c.a, alpha, theta).unwrap();
            let s = spectrum(&monodromy(p, cfg).unwrap()).unwrap();
            let d = min_pairwise(&s.values);
            assert!(
                d <= 1e-3,
                "pair distance {d:e} at a={} (α={alpha}, θ={theta}, q={q})",
                c.a
            );
            seen += 1;
        }
    }
    assert!(seen >= 6, "expected several collisions, saw {seen}");
}

/// The eigensolver residual gate rejects a synthetic non-finite monodromy
/// without panicking.
#[test]
fn spectrum_rejects_non_finite_input() {
    let p = TrapParams::new(0.1, 0.1, 1.0, 0.0).unwrap();
    let mut m = Matrix4::identity();
    m[(2, 3)] = f64::NAN;
    let err = spectrum(&trapstab::MonodromyMatrix { m, params: p }).unwrap_err();
    assert!(matches!(err, trapstab::Error::NonFinite { .. }));
}
