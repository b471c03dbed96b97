use super::*;
use crate::hyperfun::{laguerre, pfq, upper_incomplete_gamma, SeriesControl};
use crate::model::{classify, derive, Params, PhaseKind, DEFAULT_CLASS_TOL};
use crate::PhysicalParams;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn generic_params() -> PhysicalParams {
    Params::kerr_only(1.0)
        .with_detuning(0.7)
        .with_losses(0.4, 0.2)
        .with_drive_linear(c(0.5, -0.3))
        .with_drive_pair(c(0.8, 0.2))
        .with_drive_cubic(c(0.3, 0.1))
}

/// Λ1 placing r1 at `target` (r1 is affine in Λ1).
fn drive_for_r1(p: PhysicalParams, target: C64) -> PhysicalParams {
    let r0 = derive(&p.with_drive_linear(c(0.0, 0.0))).unwrap().blockade_index.unwrap();
    let r1 = derive(&p.with_drive_linear(c(1.0, 0.0))).unwrap().blockade_index.unwrap();
    p.with_drive_linear((target - r0) / (r1 - r0))
}

#[test]
fn core_coefficient_examples() {
    let p = drive_for_r1(
        Params::kerr_only(1.0).with_detuning(2.35).with_losses(0.2, 0.0).with_drive_pair(c(1.0, 0.0)),
        c(1.0, 0.0),
    );
    let d = derive(&p).unwrap();
    let cls = classify(&d, 1e-9);
    assert_eq!(cls.kind, PhaseKind::Blockade(1));
    let cs = core_coefficients(&d, &cls, 5).unwrap();
    let r1 = d.blockade_index.unwrap();
    assert!((cs[1] - r1 / d.resonance_index).norm() < 1e-14);
    assert!(cs[2..].iter().all(|x| *x == c(0.0, 0.0)));

    // all equal when r1 = r2
    let mut d2 = d;
    d2.blockade_index = Some(c(0.3, 0.2));
    d2.resonance_index = c(0.3, 0.2);
    let cls = classify(&d2, 1e-9);
    assert_eq!(cls.kind, PhaseKind::PureCoherent);
    assert!(core_coefficients(&d2, &cls, 6).unwrap().iter().all(|x| *x == c(1.0, 0.0)));

    // anti-blockade zeros
    let mut d3 = d;
    d3.blockade_index = Some(c(0.3, 0.2));
    d3.resonance_index = c(3.0, 0.0);
    let cls = classify(&d3, 1e-9);
    let cs = core_coefficients(&d3, &cls, 8).unwrap();
    assert!(cs[..4].iter().all(|x| *x == c(0.0, 0.0)));
    assert_eq!(cs[4], c(1.0, 0.0));
    assert!(core_coefficients(&d3, &cls, 0).is_err());
}

#[test]
fn vacuum_when_undriven() {
    let p = Params::kerr_only(1.0).with_detuning(0.3).with_losses(0.5, 0.1);
    let s = solve(&p).unwrap();
    let cache = s.amplitudes().unwrap();
    assert!((cache.rho_element(0, 0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    assert!(cache.rho_element(1, 1).unwrap().norm() < 1e-15);
    assert!(cache.moment(1, 1).unwrap().norm() < 1e-15);
    assert_eq!(cache.derivative(0), c(1.0, 0.0));
}

#[test]
fn pure_coherent_photon_number() {
    // r1 = r2 needs λ1 = ε+ D: choose Λ1 accordingly.
    let base = Params::kerr_only(1.0).with_detuning(0.45).with_losses(0.3, 0.0).with_drive_pair(c(1.2, 0.4));
    let d0 = derive(&base).unwrap();
    let target = d0.resonance_index;
    let p = drive_for_r1(base, target);
    let d = derive(&p).unwrap();
    assert_eq!(classify(&d, 1e-9).kind, PhaseKind::PureCoherent);
    let s = solve(&p).unwrap();
    let n = s.amplitudes().unwrap().mean_photon_number().unwrap();
    assert!((n - d.pump.norm() / 2.0).abs() < 1e-12, "{n} vs {}", d.pump.norm() / 2.0);
}

#[test]
fn blockade_state_is_laguerre() {
    let base = Params::kerr_only(1.0).with_detuning(1.7).with_losses(0.1, 0.0).with_drive_pair(c(0.9, 0.0));
    let p = drive_for_r1(base, c(3.0, 0.0));
    let d = derive(&p).unwrap();
    let s = solve(&p).unwrap();
    assert_eq!(s.form, StateForm::TruncatedBlockade(3));
    let ctl = SeriesControl::default();
    let order = -d.detuning_ratio - 1.0;
    let l0 = laguerre(3, order, c(0.0, 0.0), &ctl).unwrap();
    for z in [c(0.3, -0.2), c(-1.1, 0.4), c(0.8, 1.3)] {
        let expect = (-d.gauge_plus * z).exp() * laguerre(3, order, d.gauge_span() * z, &ctl).unwrap() / l0;
        let got = s.sb_value(z, 120);
        assert!((got - expect).norm() < 1e-11 * expect.norm().max(1.0), "{got} vs {expect}");
    }
}

#[test]
fn bessel_form() {
    let p = Params::kerr_only(1.0).with_detuning(0.4).with_losses(0.6, 0.0).with_drive_linear(c(0.7, 0.2));
    let d = derive(&p).unwrap();
    let s = solve(&p).unwrap();
    assert_eq!(s.form, StateForm::Bessel);
    let ctl = SeriesControl::default();
    for z in [c(0.5, 0.0), c(-1.0, 2.0), c(2.0, -1.5)] {
        let expect = pfq(&[], &[-d.detuning_ratio], -d.source * z, &ctl).unwrap();
        let got = s.sb_value(z, 100);
        assert!((got - expect).norm() < 1e-12 * expect.norm().max(1.0));
    }
}

#[test]
fn closed_form_matches_recursion() {
    for p in [
        generic_params(),
        Params::kerr_only(1.0)
            .with_detuning(-0.6)
            .with_losses(0.5, 0.0)
            .with_drive_pair(c(0.7, 0.3))
            .with_drive_linear(c(0.2, 0.4)),
    ] {
        let d = derive(&p).unwrap();
        let s = solve(&p).unwrap();
        let cache = s.amplitudes_at(61).unwrap();
        for l in 0..=60 {
            let (v, scale) = closed_form_derivative(&d, l).unwrap();
            let got = cache.derivative(l);
            assert!((got - v).norm() <= 1e-12 * scale.max(got.norm()), "l={l}: {got} vs {v} (scale {scale})");
        }
    }
}

/// Reference: build |ψ⟩_c |0⟩ as a two-mode array by repeatedly applying
/// (a† + b†)/√2, then trace out the second mode.
fn two_mode_reduced(amps: &[C64], dim: usize) -> Vec<Vec<C64>> {
    let cut = amps.len();
    // state[k] for |k⟩_c as a (cut × cut) array over (a, b) occupation
    let mut basis = vec![vec![c(0.0, 0.0); cut * cut]];
    basis[0][0] = c(1.0, 0.0);
    for k in 1..cut {
        let prev = &basis[k - 1];
        let mut next = vec![c(0.0, 0.0); cut * cut];
        for i in 0..cut {
            for j in 0..cut {
                let v = prev[i * cut + j];
                if v == c(0.0, 0.0) {
                    continue;
                }
                if i + 1 < cut {
                    next[(i + 1) * cut + j] += v * ((i + 1) as f64).sqrt();
                }
                if j + 1 < cut {
                    next[i * cut + j + 1] += v * ((j + 1) as f64).sqrt();
                }
            }
        }
        let s = 1.0 / (2.0 * k as f64).sqrt();
        next.iter_mut().for_each(|x| *x *= s);
        basis.push(next);
    }
    let mut psi = vec![c(0.0, 0.0); cut * cut];
    for (k, a) in amps.iter().enumerate() {
        for (x, b) in psi.iter_mut().zip(&basis[k]) {
            *x += a * b;
        }
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let mut rho = vec![vec![c(0.0, 0.0); dim]; dim];
    for m in 0..dim {
        for n in 0..dim {
            let mut acc = c(0.0, 0.0);
            for j in 0..cut {
                acc += psi[m * cut + j] * psi[n * cut + j].conj();
            }
            rho[m][n] = acc / norm;
        }
    }
    rho
}

#[test]
#[allow(clippy::needless_range_loop)]
fn rho_element_matches_two_mode_partial_trace() {
    let p = Params::kerr_only(1.0)
        .with_detuning(0.2)
        .with_losses(0.8, 0.3)
        .with_drive_linear(c(0.3, -0.2))
        .with_drive_pair(c(0.4, 0.1))
        .with_drive_cubic(c(0.15, 0.05));
    let s = solve(&p).unwrap();
    let cache = s.amplitudes_at(40).unwrap();
    let reference = two_mode_reduced(cache.scaled(), 8);
    for m in 0..8 {
        for n in 0..8 {
            let v = cache.rho_element(m, n).unwrap();
            assert!((v - reference[m][n]).norm() < 1e-10, "({m},{n}) {v} vs {}", reference[m][n]);
        }
    }
    let full = cache.density_matrix(8).unwrap();
    assert!((full.get(2, 5) - reference[2][5]).norm() < 1e-10);
}

#[test]
fn moments_agree_with_density_matrix() {
    let s = solve(&generic_params()).unwrap();
    let cache = s.amplitudes().unwrap();
    let rho = cache.density_matrix(cache.len()).unwrap();
    for (n, m) in [(1, 1), (0, 1), (2, 1), (2, 2), (0, 2)] {
        let a = cache.moment(n, m).unwrap();
        let b = rho.moment(n, m);
        assert!((a - b).norm() < 1e-11 * a.norm().max(1.0), "({n},{m}) {a} vs {b}");
    }
}

#[test]
fn density_matrix_invariants() {
    for p in [generic_params(), drive_for_r1(generic_params(), c(2.0, 0.0))] {
        let s = solve(&p).unwrap();
        let cache = s.amplitudes().unwrap();
        let rho = cache.density_matrix(40).unwrap();
        assert!(rho.hermiticity_error() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-10);
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
    }
}

fn zero_pump_params() -> PhysicalParams {
    // Λ2 cancelling the cubic-drive contribution to λ2.
    let p = Params::kerr_only(1.0)
        .with_detuning(0.6)
        .with_losses(0.5, 0.3)
        .with_drive_cubic(c(0.4, 0.2))
        .with_drive_linear(c(0.3, 0.1));
    let d = derive(&p).unwrap();
    let kt = p.kerr_eff();
    p.with_drive_pair(-d.pump * kt / 2.0)
}

#[test]
fn hypergeometric_closed_forms() {
    let p = zero_pump_params();
    let d = derive(&p).unwrap();
    assert!(d.pump.norm() < 1e-14);
    let s = solve(&p).unwrap();
    let cache = s.amplitudes().unwrap();
    let n_closed = hypergeometric_norm(&d).unwrap();
    assert!((n_closed - cache.norm()).abs() < 1e-12 * n_closed);
    for (m, n) in [(0, 0), (1, 0), (2, 3), (4, 4)] {
        let a = hypergeometric_rho_element(&d, m, n).unwrap();
        let b = cache.rho_element(m, n).unwrap();
        assert!((a - b).norm() < 1e-12, "({m},{n}) {a} vs {b}");
    }
    let a = hypergeometric_moment(&d, 1, 1).unwrap();
    let b = cache.moment(1, 1).unwrap();
    assert!((a - b).norm() < 1e-12 * b.norm());
    assert_eq!(hypergeometric_norm(&derive(&generic_params()).unwrap()).unwrap_err().code(), "WrongRegime");
}

#[test]
fn gauge_choice_does_not_change_the_state() {
    let p = generic_params();
    let d = derive(&p).unwrap();
    for z in [c(0.0, 0.0), c(1.5, -2.0), c(-3.0, 1.0), c(0.0, 4.0)] {
        let plus = sb_value_in_gauge(&d, z, Gauge::Plus).unwrap();
        let minus = sb_value_in_gauge(&d, z, Gauge::Minus).unwrap();
        assert!((plus - minus).norm() < 1e-12 * plus.norm().max(minus.norm()));
    }
}

#[test]
fn dark_state_residual_small() {
    for p in [generic_params(), drive_for_r1(generic_params(), c(1.0, 0.0)), zero_pump_params()] {
        let s = solve(&p).unwrap();
        let r = dark_state_residual(&s, 150).unwrap();
        assert!(r < 1e-8, "residual {r} for {:?}", s.form);
    }
}

#[test]
fn finite_kernel_two_level_state() {
    // K = κ2 = Δ = Λ2 = 0, Λ3 = κ1/2, Λ1 = −Λ3.
    let p = Params::kerr_only(0.0).with_losses(1.0, 0.0).with_drive_cubic(c(0.5, 0.0)).with_drive_linear(c(-0.5, 0.0));
    let s = solve_finite_kernel(&p).unwrap();
    assert_eq!(s.form, StateForm::TruncatedBlockade(1));
    let cache = s.amplitudes_at(10).unwrap();
    assert!((cache.rho_element(0, 0).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-14);
    assert!((cache.rho_element(1, 1).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
    assert!((cache.rho_element(1, 0).unwrap() - c(0.0, 1.0 / 3.0)).norm() < 1e-14);
    assert!(dark_state_residual(&s, 8).unwrap() < 1e-15);
    let bad = p.with_drive_linear(c(0.0, 0.0)).with_drive_cubic(c(0.5, 0.0)).with_drive_linear(c(0.2, 0.0));
    assert_eq!(solve_finite_kernel(&bad).unwrap_err().code(), "NoSolution");
}

#[test]
fn bistable_origin_pair() {
    // κ1 = Λ1 = Δ = 0 puts (r1, r2) at (0, 0).
    let p = Params::kerr_only(1.0).with_drive_pair(c(1.5, 0.0));
    let d = derive(&p).unwrap();
    let (psi1, psi2) = bistable_pair(&d, 0, 0).unwrap();
    let eps = d.gauge_plus;
    for z in [c(0.4, 0.1), c(-1.2, 0.7)] {
        let e1 = (-eps * z).exp();
        let e2 = (eps * z).exp() - (-eps * z).exp();
        assert!((psi1.sb_value(z, 80) - e1).norm() < 1e-12 * e1.norm().max(1.0));
        assert!((psi2.sb_value(z, 80) - e2).norm() < 1e-12 * e2.norm().max(1.0));
    }
    assert_eq!(bistable_pair(&derive(&generic_params()).unwrap(), 0, 0).unwrap_err().code(), "NotBistable");
}

#[test]
fn bistable_diagonal_pair_is_incomplete_gamma() {
    // (n, n) with n = 2: Δ = n K/2 … chosen by r2 = 2, r1 = 2.
    let base = Params::kerr_only(1.0).with_detuning(1.0).with_drive_pair(c(1.0, 0.0));
    let p = drive_for_r1(base, c(2.0, 0.0));
    let d = derive(&p).unwrap();
    assert_eq!(classify(&d, DEFAULT_CLASS_TOL).kind, PhaseKind::Bistable(2, 2));
    let (psi1, psi2) = bistable_pair(&d, 2, 2).unwrap();
    let eps = d.gauge_plus;
    let n_fact = 2.0;
    for z in [c(0.3, 0.2), c(-0.9, 0.5)] {
        let g = upper_incomplete_gamma(c(3.0, 0.0), eps * z * 2.0).unwrap();
        let f1 = (eps * z).exp() * g / n_fact;
        let f2 = (eps * z).exp() * (c(1.0, 0.0) - g / n_fact);
        let v1 = psi1.sb_value(z, 80);
        let v2 = psi2.sb_value(z, 80);
        // ψ1 is normalized to c_0 = 1, which equals the incomplete-Gamma form at z = 0.
        assert!((v1 - f1).norm() < 1e-11 * f1.norm().max(1.0), "{v1} vs {f1}");
        assert!((v2 - f2).norm() < 1e-11 * f2.norm().max(1.0), "{v2} vs {f2}");
    }
}

/// (1/π) ∫ f* g e^{−|z|²} d²z for SB functions given by amplitudes: Gauss-Laguerre
/// nodes in |z|² (Golub-Welsch) times a uniform angular rule, exact for these degrees.
fn sb_inner(f: &[C64], g: &[C64]) -> C64 {
    let eval = |a: &[C64], z: C64| {
        let mut acc = c(0.0, 0.0);
        let mut zp = c(1.0, 0.0);
        for (l, al) in a.iter().enumerate() {
            acc += al * zp;
            zp = zp * z / ((l + 1) as f64).sqrt();
        }
        acc
    };
    let nodes = f.len().max(g.len()) + 4;
    let jacobi = nalgebra::DMatrix::from_fn(nodes, nodes, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i + 1 == j || j + 1 == i {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let nt = 4 * nodes;
    let dt = 2.0 * std::f64::consts::PI / nt as f64;
    let mut acc = c(0.0, 0.0);
    for (k, &u) in eig.eigenvalues.iter().enumerate() {
        let w = eig.eigenvectors[(0, k)].powi(2);
        for j in 0..nt {
            let z = C64::from_polar(u.max(0.0).sqrt(), j as f64 * dt);
            acc += eval(f, z).conj() * eval(g, z) * w;
        }
    }
    acc / nt as f64
}

#[test]
fn bistable_pair_inner_product_and_orthogonalization() {
    let p = Params::kerr_only(1.0).with_drive_pair(c(0.8, 0.0));
    let d = derive(&p).unwrap();
    let (psi1, psi2) = bistable_pair(&d, 0, 0).unwrap();
    let a = psi1.amplitudes_at(60).unwrap();
    let b = psi2.amplitudes_at(60).unwrap();
    let fock: C64 = a.scaled().iter().zip(b.scaled()).map(|(x, y)| x.conj() * y).sum();
    let grid = sb_inner(a.scaled(), b.scaled());
    assert!((grid - fock).norm() < 1e-10 * fock.norm(), "{grid} vs {fock}");
    // Gram-Schmidt in the Fock basis, checked with the SB inner product.
    let w = fock / a.norm();
    let orth: Vec<C64> = a.scaled().iter().zip(b.scaled()).map(|(x, y)| y - w * x).collect();
    let fock_after: C64 = a.scaled().iter().zip(&orth).map(|(x, y)| x.conj() * y).sum();
    assert!(fock_after.norm() < 1e-12);
    let after = sb_inner(a.scaled(), &orth).norm();
    assert!(after < 1e-10 * fock.norm(), "{after}");
}

#[test]
fn q_parameter_values() {
    let base = Params::kerr_only(1.0).with_losses(0.01, 0.0).with_drive_pair(c(4.0, 0.0));
    for (l1, q) in [(0.0, 0.0), (0.01, 1.0), (0.02, 2.0), (0.1, 10.0)] {
        let d = derive(&base.with_drive_linear(c(l1, 0.0))).unwrap();
        let near = near_bistable_state(&d, 0, 0).unwrap();
        let got = near.q.unwrap();
        assert!((got - c(q, 0.0)).norm() < 1e-12, "Λ1 = {l1}: Q = {got}");
    }
    // Q = 0: state ∝ cosh(εz)
    let d = derive(&base).unwrap();
    let near = near_bistable_state(&d, 0, 0).unwrap();
    let eps = d.gauge_plus;
    let z = c(0.4, -0.3);
    let v = near.state.sb_value(z, 120) / near.state.sb_value(c(0.0, 0.0), 120);
    let expect = (eps * z).cosh();
    assert!((v - expect).norm() < 1e-11 * expect.norm());
    let far = derive(&base.with_drive_linear(c(1.0, 0.0))).unwrap();
    assert_eq!(near_bistable_state(&far, 0, 0).unwrap_err().code(), "NotNearBistable");
}

#[test]
fn undisplace_examples() {
    let vac = crate::density::TruncatedDensityMatrix::from_pure(&[c(1.0, 0.0)]);
    assert_eq!(undisplace(&vac, c(0.0, 0.0)).unwrap(), vac);
    let lab = undisplace(&vac, c(1.0, 0.0)).unwrap();
    assert!((lab.mean_photon_number() - 0.5).abs() < 1e-10);
    assert!((lab.moment(0, 1) - c(-std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-10);
    // Dense matrix exponential as an independent reference.
    let rho = crate::density::TruncatedDensityMatrix::from_pure(&[c(0.6, 0.0), c(0.0, 0.8)]);
    let alpha = c(0.7, -0.4);
    let lab = undisplace(&rho, alpha).unwrap();
    let n = lab.dim() + 20;
    let beta = -alpha / std::f64::consts::SQRT_2;
    let mut gen = nalgebra::DMatrix::from_element(n, n, c(0.0, 0.0));
    for k in 1..n {
        gen[(k, k - 1)] = beta * (k as f64).sqrt();
        gen[(k - 1, k)] = -beta.conj() * (k as f64).sqrt();
    }
    let u = gen.exp().view((0, 0), (lab.dim(), 2)).into_owned();
    let reference = &u * rho.matrix() * u.adjoint();
    assert!((lab.matrix() - reference).norm() < 1e-10);
}

#[test]
fn lab_frame_paths_agree() {
    let s = solve(&generic_params()).unwrap();
    let shifted = s.amplitudes().unwrap();
    let rho_shifted = shifted.density_matrix(60).unwrap();
    let via_matrix = undisplace(&rho_shifted, s.displacement).unwrap();
    let via_vector = s.lab_amplitudes().unwrap().density_matrix(60).unwrap();
    assert!(via_matrix.resized(40).hs_distance(&via_vector.resized(40)) < 1e-10);
}

#[test]
fn blockade_hard_cutoff_in_lab_frame() {
    // Λ2 = 0, Λ3 ≠ 0: one gauge root equals −α+, so r1 = n0 truncates the lab-frame state.
    let base = Params::kerr_only(1.0).with_detuning(1.0).with_losses(0.01, 0.001).with_drive_cubic(c(1.0, 0.0));
    let p = drive_for_r1(base, c(1.0, 0.0));
    let d = derive(&p).unwrap();
    assert!((d.gauge_plus + d.displacement).norm() < 1e-12);
    let s = solve(&p).unwrap();
    let lab = s.lab_amplitudes().unwrap();
    let tail: f64 = lab.scaled().iter().skip(2).map(|a| a.norm_sqr()).sum::<f64>() / lab.norm();
    assert!(tail < 1e-20, "collective-mode tail {tail}");
    let rho = lab.density_matrix(20).unwrap();
    let beyond: f64 = rho.populations().iter().skip(2).sum();
    assert!(beyond < 1e-12, "P(n > 1) = {beyond}");
}

#[test]
fn parity_regime_closed_forms() {
    let p = Params::kerr_only(1.0).with_detuning(0.8).with_losses(0.0, 1.0).with_drive_pair(c(2.0, 0.5));
    let sol = parity_solve(&p).unwrap();
    let d = derive(&p).unwrap();
    let cache = sol.state.amplitudes().unwrap();
    assert!((sol.norm - cache.norm()).abs() < 1e-10 * sol.norm);
    assert!(cache.scaled().iter().skip(1).step_by(2).all(|a| *a == c(0.0, 0.0)));
    for (m, n) in [(0, 0), (0, 2), (1, 1), (3, 1), (4, 6), (1, 2)] {
        let a = parity_rho_element(&d, m, n).unwrap();
        let b = cache.rho_element(m, n).unwrap();
        assert!((a - b).norm() < 1e-12, "({m},{n}) {a} vs {b}");
    }
    // ρ+ = [(N+1) ρe + (N−1) ρo] / (2N)
    let nn = sol.norm;
    let dim = sol.rho_plus.dim();
    for (i, j) in [(0, 0), (2, 0), (1, 1), (3, 1)] {
        let mix = (sol.rho_even.get(i, j) * (nn + 1.0) + sol.rho_odd.get(i, j) * (nn - 1.0)) / (2.0 * nn);
        assert!((mix - sol.rho_plus.get(i, j)).norm() < 1e-12, "({i},{j}) dim {dim}");
    }
    let wrong = p.with_losses(0.1, 1.0);
    assert_eq!(parity_solve(&wrong).unwrap_err().code(), "WrongRegime");
}

#[test]
fn parity_limits() {
    // weak drive: N → 1, ρ+ → ρe
    let weak = Params::kerr_only(1.0).with_detuning(0.5).with_losses(0.0, 1.0).with_drive_pair(c(1e-4, 0.0));
    let sol = parity_solve(&weak).unwrap();
    assert!((sol.norm - 1.0).abs() < 1e-7);
    assert!(sol.rho_plus.hs_distance(&sol.rho_even) < 1e-7);
    // strong drive: ρ+ → (ρe + ρo)/2
    let strong = weak.with_drive_pair(c(12.0, 0.0));
    let sol = parity_solve(&strong).unwrap();
    let half = crate::density::TruncatedDensityMatrix::from_matrix(
        (sol.rho_even.matrix() + sol.rho_odd.resized(sol.rho_even.dim()).matrix()) * c(0.5, 0.0),
    );
    assert!(sol.rho_plus.hs_distance(&half) < 1.0 / sol.norm * 2.0, "N = {}", sol.norm);
}
