use super::*;
use crate::numerics::DEFAULT_TOL;
use crate::{fredholm, polarized};
use std::f64::consts::PI;

fn tols() -> Tolerances {
    Tolerances::uniform(DEFAULT_TOL)
}

/// Structural identities on the sphere are exact linear algebra; only the
/// commutators with the truncated multiplication operators carry
/// truncation error (measured near 6e-2 at deformation amplitude 0.3).
fn sphere_tols() -> Tolerances {
    Tolerances {
        structural: 1e-7,
        commutation: 0.15,
    }
}

fn deformed_metric(basis: &SphereBasis) -> MetricField {
    MetricField::from_fn(basis, |t, _| [1.0 + 0.3 * t.sin(), 0.0, 1.0])
}

#[test]
fn basis_counts() {
    let basis = SphereBasis::new(1).unwrap();
    assert_eq!(basis.n_pairs, 3);
    assert_eq!(basis.dim(), 6);
    let basis = SphereBasis::new(4).unwrap();
    assert_eq!(basis.n_pairs, 24);
    assert_eq!(basis.dim(), 48);
}

#[test]
fn round_gram_is_diagonal_with_eigenvalues() {
    // analytic oracle: (dY_lm, dY_l'm') = l(l+1) delta, same for the
    // coexact block, no cross terms
    let basis = SphereBasis::new(4).unwrap();
    let g = basis.round_gram();
    let n = basis.n_pairs;
    for i in 0..2 * n {
        for j in 0..2 * n {
            let expect = if i == j {
                let (l, _) = basis.pairs[i % n];
                (l * (l + 1)) as f64
            } else {
                0.0
            };
            assert!(
                (g[(i, j)] - cr(expect)).norm() < 1e-11,
                "gram entry ({i},{j})"
            );
        }
    }
}

#[test]
fn sigma_gram_structure() {
    let basis = SphereBasis::new(4).unwrap();
    let s = basis.sigma_gram();
    let n = basis.n_pairs;
    // hermitian
    assert!(s.hermitian_residual() < 1e-12 * s.fro_norm().max(1.0));
    // exact block is isotropic (Stokes under exact quadrature)
    let mut iso: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            iso = iso.max(s[(i, j)].norm());
            iso = iso.max(s[(n + i, n + j)].norm());
        }
    }
    assert!(iso < 1e-11, "isotropy {iso:.3e}");
    // sigma(dY_10, *dY_10) = -i l(l+1) = -2i
    let idx10 = basis.pairs.iter().position(|&(l, m)| (l, m) == (1, 0)).unwrap();
    let entry = s[(idx10, n + idx10)];
    assert!((entry - c(0.0, -2.0)).norm() < 1e-12, "entry {entry}");
}

#[test]
fn round_metric_reproduces_exact_hodge() {
    let basis = SphereBasis::new(4).unwrap();
    let round = MetricField::round(&basis);
    let gamma = basis.gamma_from_metric(&round, tols()).unwrap();
    assert!((&gamma - &basis.round_gamma()).op_norm() < 1e-12);
    assert!(gamma.involution_residual() < 1e-12);
    // positivity fixed the sign: S gamma is positive definite
    let gram = (basis.sigma_gram() * &gamma).hermitian_part();
    let (vals, _) = gram.hermitian_eigen();
    assert!(vals[0] > 0.5);
    // gamma maps each exact form onto the matching coexact form with a
    // unit-modulus coefficient
    let n = basis.n_pairs;
    for j in 0..n {
        for i in 0..2 * n {
            let expect = if i == n + j { 1.0 } else { 0.0 };
            assert!((gamma[(i, j)].norm() - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn conformal_rescaling_leaves_gamma_unchanged() {
    // the pointwise star is scale free, so the whole pipeline is exactly
    // conformally invariant; assert far below the contract threshold
    let basis = SphereBasis::new(4).unwrap();
    let round = MetricField::round(&basis);
    let gamma = basis.gamma_from_metric(&round, tols()).unwrap();
    let conf = round.conformal_scale(&basis, |t, p| 0.5 * t.sin() * p.cos() + 0.3 * t.cos());
    let gamma_conf = basis.gamma_from_metric(&conf, tols()).unwrap();
    assert!((&gamma_conf - &gamma).op_norm() < 1e-10);

    // same through the serializable band-limited description
    let spec = MetricSpec::Conformal {
        phi_coeffs: vec![(1, 0, 0.6, 0.0), (2, 1, 0.2, 0.1), (2, -1, -0.2, 0.1)],
    };
    let metric = spec.build(&basis).unwrap();
    let gamma_spec = basis.gamma_from_metric(&metric, tols()).unwrap();
    assert!((&gamma_spec - &gamma).op_norm() < 1e-10);
}

#[test]
fn non_conformal_deformation_moves_gamma() {
    let basis = SphereBasis::new(6).unwrap();
    let gamma_round = basis.round_gamma();
    let gamma_def = basis
        .gamma_from_metric(&deformed_metric(&basis), tols())
        .unwrap();
    // regression anchor: measured difference ~ 0.18 at amplitude 0.3
    let delta = (&gamma_def - &gamma_round).op_norm();
    assert!(delta > 0.01, "deformation delta {delta:.3e}");
    assert!(gamma_def.involution_residual() < 1e-12);
    // Krein self-adjointness survives projection and repair exactly
    let s = basis.sigma_gram();
    let krein = (&(&gamma_def.adjoint_m() * s) - &(s * &gamma_def)).op_norm() / s.op_norm();
    assert!(krein < 1e-12);
}

#[test]
fn involution_repair_is_small_and_shrinks() {
    let repairs: Vec<f64> = [4usize, 6, 8]
        .iter()
        .map(|&lmax| {
            let basis = SphereBasis::new(lmax).unwrap();
            basis
                .hodge_repair_magnitude(&deformed_metric(&basis))
                .unwrap()
        })
        .collect();
    // measured near 7.2e-3 at amplitude 0.3
    assert!(repairs.iter().all(|&r| r < 0.1), "{repairs:?}");
    assert!(repairs[2] <= repairs[0] * 1.01, "{repairs:?}");
}

#[test]
fn canonical_polarized_module_is_valid() {
    let basis = SphereBasis::new(4).unwrap();
    let p = basis.canonical_polarized(1).unwrap();
    let rep = polarized::validate(&p, tols());
    assert!(rep.passed(), "{:?}", rep.first_failure());
    // E is Lagrangian by construction
    assert_eq!(p.e.ncols(), basis.n_pairs);
    // pi(Y_00) is the constant 1/sqrt(4 pi)
    let expect = CMat::identity(basis.dim()).scale_f(1.0 / (4.0 * PI).sqrt());
    assert!((&p.pi[0] - &expect).op_norm() < 1e-12);
}

#[test]
fn round_lift_is_block_signature() {
    let basis = SphereBasis::new(4).unwrap();
    let round = MetricField::round(&basis);
    let fm = basis.conformal_lift(&round, 1, tols()).unwrap();
    let n = basis.n_pairs;
    let signs = CMat::diag_f(
        &(0..2 * n)
            .map(|i| if i < n { 1.0 } else { -1.0 })
            .collect::<Vec<_>>(),
    );
    assert!((&fm.f - &signs).op_norm() < 1e-10);
    let rep = fredholm::validate(&fm, tols());
    assert!(rep.passed(), "{:?}", rep.first_failure());
}

#[test]
fn deformed_lift_is_valid_fredholm_module() {
    let basis = SphereBasis::new(6).unwrap();
    let fm = basis
        .conformal_lift(&deformed_metric(&basis), 1, sphere_tols())
        .unwrap();
    let rep = fredholm::validate(&fm, sphere_tols());
    assert!(rep.passed(), "{:?}", rep.first_failure());
    let round_f = {
        let round = MetricField::round(&basis);
        basis.conformal_lift(&round, 1, tols()).unwrap().f
    };
    assert!((&fm.f - &round_f).op_norm() > 0.01);
    // truncation error in the gamma-pi commutators sits near 6e-2
    let gamma_pi = rep.get("gamma_pi_commute").unwrap().residual;
    assert!(gamma_pi > 1e-4 && gamma_pi < 0.15, "gamma_pi {gamma_pi:.3e}");
}

#[test]
fn generalized_moebius_bridges_round_and_deformed_lifts() {
    let basis = SphereBasis::new(4).unwrap();
    let p = basis.canonical_polarized(1).unwrap();
    let round = MetricField::round(&basis);
    let gamma_r = basis.gamma_from_metric(&round, tols()).unwrap();
    let gamma_d = basis
        .gamma_from_metric(&deformed_metric(&basis), tols())
        .unwrap();
    let lift_r = polarized::lift(&p, &gamma_r, sphere_tols()).unwrap();
    let lift_d = polarized::lift(&p, &gamma_d, sphere_tols()).unwrap();
    let g = polarized::gen_moebius(&p, &gamma_d, &gamma_r, sphere_tols()).unwrap();
    let (moved, rep) = polarized::apply(&g, &lift_r, sphere_tols()).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert!((&moved.f - &lift_d.f).op_norm() < 1e-6);
    assert!(
        (moved.gamma.as_ref().unwrap() - lift_d.gamma.as_ref().unwrap()).op_norm() < 1e-6
    );
    assert!((&moved.gram - &lift_d.gram).op_norm() < 1e-6);
}

#[test]
fn commutator_decay_tables() {
    // constants are central: every entry at rounding level
    let table = commutator_decay(0, 0, &[3, 4], &MetricSpec::Round, tols()).unwrap();
    assert!(table.iter().all(|&(_, v)| v < 1e-10), "{table:?}");

    // Y_10, round: converged from below toward the continuum commutator
    // norm; successive ratios must stay within the 5% noise band.
    // regression anchor: entries near 0.48860 for lmax in {4, 6, 8}
    let table = commutator_decay(1, 0, &[4, 6, 8], &MetricSpec::Round, tols()).unwrap();
    for &(_, v) in &table {
        assert!((v - 0.48860).abs() < 2e-3, "{table:?}");
    }
    for w in table.windows(2) {
        let ratio = w[1].1 / w[0].1;
        assert!(ratio <= 1.05, "ratio {ratio} in {table:?}");
    }

    // deformed metric through the serializable spec
    let spec = MetricSpec::Tensor {
        // a11 = 1 + 0.3 Y_20-ish bump, a22 = 1: Y_00 = 1/sqrt(4 pi)
        a11: vec![(0, 0, (4.0 * PI).sqrt(), 0.0), (2, 0, 0.4, 0.0)],
        a12: vec![],
        a22: vec![(0, 0, (4.0 * PI).sqrt(), 0.0)],
    };
    let table = commutator_decay(1, 0, &[4, 6, 8], &spec, tols()).unwrap();
    for w in table.windows(2) {
        let ratio = w[1].1 / w[0].1;
        assert!(ratio <= 1.05, "ratio {ratio} in {table:?}");
    }
}

#[test]
fn real_structure_suite() {
    let basis = SphereBasis::new(4).unwrap();
    let rs = basis.real_structure(1);

    // C^2 = 1
    assert!(
        (&(&rs.j * &rs.j.conj_m()) - &CMat::identity(basis.dim())).op_norm() < 1e-12
    );
    // C gamma C = -gamma for the round Hodge involution
    let gamma = basis.round_gamma();
    let conj_gamma = rs.conjugate_operator(&gamma).unwrap();
    assert!((&conj_gamma + &gamma).op_norm() < 1e-12);

    // C(E) = E: conjugates of exact forms are exact
    let p = basis.canonical_polarized(1).unwrap();
    let ce = rs.apply(&p.e);
    let sines = ce.principal_angle_sines(&p.e, 1e-12).unwrap();
    assert!(sines[0] < 1e-12);

    // the full real checks pass with epsilon = -1 on the round lift and on
    // the canonical polarized module
    let round = MetricField::round(&basis);
    let fm = basis.conformal_lift(&round, 1, tols()).unwrap();
    let rep = fredholm::real_check(&fm, &rs, 1e-9);
    assert!(rep.passed(), "{:?}", rep.first_failure());
    let rep = polarized::real_check(&p, &rs, 1e-9);
    assert!(rep.passed(), "{:?}", rep.first_failure());

    // and on a deformed lift (the conjugation acts on the same basis)
    let fm = basis
        .conformal_lift(&deformed_metric(&basis), 1, sphere_tols())
        .unwrap();
    let rep = fredholm::real_check(&fm, &rs, 1e-9);
    assert!(rep.passed(), "{:?}", rep.first_failure());
}

#[test]
fn trace_invariance_on_round_lift() {
    let basis = SphereBasis::new(3).unwrap();
    let round = MetricField::round(&basis);
    let fm = basis.conformal_lift(&round, 1, tols()).unwrap();

    // u = identity: difference exactly zero
    let d = trace_invariance_check(&fm, &CMat::identity(basis.dim()), &[1], &[2], 1e-9).unwrap();
    assert!(d < 1e-14);

    // u = exp(i theta gamma) commutes with pi (round gamma does exactly)
    // and is gram-unitary
    let gamma = basis.round_gamma();
    let theta = 0.73_f64;
    let u = CMat::identity(basis.dim()).scale_f(theta.cos()) + gamma.scale_c(c(0.0, theta.sin()));
    for (fi, gi) in [(0usize, 1usize), (1, 2), (3, 1)] {
        let d = trace_invariance_check(&fm, &u, &[fi], &[gi], 1e-9).unwrap();
        assert!(d < 1e-10, "trace moved by {d:.3e}");
    }

    // a non-commuting unitary is rejected
    let bad = {
        let mut m = CMat::identity(basis.dim());
        m[(0, 0)] = c(0.0, 1.0);
        m
    };
    assert!(trace_invariance_check(&fm, &bad, &[1], &[2], 1e-9).is_err());
}

#[test]
fn metric_spec_rejects_degenerate_tensors() {
    let basis = SphereBasis::new(2).unwrap();
    let spec = MetricSpec::Tensor {
        a11: vec![(0, 0, -(4.0 * PI).sqrt(), 0.0)],
        a12: vec![],
        a22: vec![(0, 0, (4.0 * PI).sqrt(), 0.0)],
    };
    assert!(matches!(spec.build(&basis), Err(Error::NotSpd { .. })));
}
