use super::spectrum::{coherent_basis, mode_basis};
use super::*;
use crate::cqa::{bistable_pair, solve, solve_finite_kernel};
use crate::fock::coherent_vector;
use crate::model::{derive, Params};
use crate::phase_space::PhaseGrid;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn zero_rates_give_zero_map() {
    let l = build_liouvillian(&Params::kerr_only(0.0), 6).unwrap();
    assert!(l.entries().is_empty());
    let rep = spectrum(&l, 2).unwrap();
    assert!(rep.rates.is_empty());
    assert_eq!(steady_state(&l).unwrap_err().code(), "DegenerateKernel");
}

#[test]
fn negative_loss_is_refused() {
    let mut p = Params::kerr_only(1.0).with_losses(-0.1, 0.0);
    p.allow_negative_loss = true;
    assert_eq!(build_liouvillian(&p, 4).unwrap_err().code(), "NegativeLoss");
}

#[test]
fn single_drive_commutator_on_vacuum() {
    let l1 = c(0.3, -0.7);
    let l = build_liouvillian(&Params::kerr_only(0.0).with_drive_linear(l1), 4).unwrap();
    let mut rho = DMatrix::from_element(5, 5, c(0.0, 0.0));
    rho[(0, 0)] = c(1.0, 0.0);
    let out = l.apply_matrix(&rho);
    let mut expect = DMatrix::from_element(5, 5, c(0.0, 0.0));
    expect[(1, 0)] = c(0.0, -1.0) * l1;
    expect[(0, 1)] = c(0.0, 1.0) * l1.conj();
    assert!((out - expect).norm() < 1e-15);
}

#[test]
fn generator_preserves_trace() {
    let p = Params::kerr_only(1.0)
        .with_detuning(0.4)
        .with_drive_linear(c(0.5, 0.2))
        .with_drive_pair(c(-0.3, 0.8))
        .with_drive_cubic(c(0.2, -0.1))
        .with_losses(0.3, 0.2);
    let l = build_liouvillian(&p, 12).unwrap();
    assert!(l.trace_defect() < 1e-14 * l.scale());
}

#[test]
fn linear_cavity_spectrum_and_state() {
    let p = Params::kerr_only(0.0).with_losses(0.8, 0.0).with_drive_linear(c(0.3, 0.1));
    let l = build_liouvillian(&p, 24).unwrap();
    let rho = steady_state(&l).unwrap();
    let alpha = c(0.0, -2.0) * p.drive_linear / p.loss_single;
    let expect = TruncatedDensityMatrix::from_pure(&coherent_vector(alpha, 25));
    assert!(rho.hs_distance(&expect) < 1e-10);
    assert!(rho.hermiticity_error() < 1e-12);
    let rep = spectrum(&l, 4).unwrap();
    assert!((rep.rates[0] - 0.4).abs() < 1e-9, "{:?}", rep.rates);
    assert!((rep.rates[1] - 0.4).abs() < 1e-9);
    // n + m = 2 comes next (three modes).
    assert!((rep.rates[2] - 0.8).abs() < 1e-9);
    let fp = semiclassical_fixed_points(&p);
    assert_eq!(fp.amplitudes.len(), 1);
    assert!((fp.amplitudes[0] - alpha).norm() < 1e-12);
    assert!(fp.stable[0]);
}

#[test]
fn finite_kernel_state_matches_oracle() {
    let p = Params::kerr_only(0.0).with_losses(1.0, 0.0).with_drive_cubic(c(0.5, 0.0)).with_drive_linear(c(-0.5, 0.0));
    let rho = steady_state(&build_liouvillian(&p, 12).unwrap()).unwrap();
    assert!((rho.get(0, 0) - c(2.0 / 3.0, 0.0)).norm() < 1e-9);
    assert!((rho.get(1, 1) - c(1.0 / 3.0, 0.0)).norm() < 1e-9);
    assert!((rho.get(1, 0) - c(0.0, 1.0 / 3.0)).norm() < 1e-9);
    let cqa = solve_finite_kernel(&p).unwrap().amplitudes_at(13).unwrap().density_matrix(13).unwrap();
    assert!(rho.hs_distance(&cqa) < 1e-9);
}

#[test]
fn oracle_agrees_with_dark_state() {
    let p = Params::kerr_only(1.0)
        .with_detuning(1.3)
        .with_drive_linear(c(0.7, -0.4))
        .with_drive_pair(c(0.9, 0.3))
        .with_drive_cubic(c(0.15, 0.05))
        .with_losses(0.25, 0.05);
    let rho = steady_state_adaptive(&p, 30).unwrap();
    let s = solve(&p).unwrap();
    let cqa = s.lab_amplitudes().unwrap().density_matrix(rho.dim()).unwrap();
    let (no, nc) = (rho.mean_photon_number(), cqa.mean_photon_number());
    assert!(((no - nc) / nc).abs() < 1e-6, "{no} vs {nc}");
    assert!(rho.hs_distance(&cqa) < 1e-7);
    assert!(rho.min_eigenvalue() > -1e-8);
}

#[test]
fn anti_blockade_resonance_matches() {
    // Two-photon drive with Δ near an anti-blockade resonance.
    let p = Params::kerr_only(1.0)
        .with_detuning(2.5)
        .with_drive_pair(c(1.0, 0.0))
        .with_drive_linear(c(0.3, 0.0))
        .with_losses(0.05, 0.0);
    let rho = steady_state_adaptive(&p, 40).unwrap();
    let nc = solve(&p).unwrap().lab_amplitudes().unwrap().mean_photon_number().unwrap();
    assert!(((rho.mean_photon_number() - nc) / nc).abs() < 1e-6);
}

#[test]
fn parity_sectors_and_degenerate_kernel() {
    let p = Params::kerr_only(1.0).with_detuning(0.5).with_drive_pair(c(2.0, 0.0)).with_losses(0.0, 1.0);
    let l = build_liouvillian(&p, 40).unwrap();
    // Block structure: no entry links different (m mod 2, n mod 2) classes.
    let d = l.levels();
    assert!(l.entries().iter().all(|&(i, j, _)| (i / d) % 2 == (j / d) % 2 && (i % d) % 2 == (j % d) % 2));
    assert_eq!(steady_state(&l).unwrap_err().code(), "DegenerateKernel");
    let even = steady_state_sector(&l, 0).unwrap();
    let odd = steady_state_sector(&l, 1).unwrap();
    let sol = crate::cqa::parity_solve(&p).unwrap();
    assert!(even.hs_distance(&sol.rho_even) < 1e-8);
    assert!(odd.hs_distance(&sol.rho_odd) < 1e-8);
}

#[test]
fn fixed_points_of_two_photon_drive() {
    // Λ1 = Δ = κ = 0: roots 0 and ±√(−i Λ2 / K)-type amplitudes with |α|² = |Λ2|/K.
    let p = Params::kerr_only(1.0).with_drive_pair(c(2.0, 0.0));
    let fp = semiclassical_fixed_points(&p);
    let nonzero: Vec<C64> = fp.amplitudes.iter().copied().filter(|a| a.norm() > 1e-6).collect();
    assert!(nonzero.len() >= 2);
    for a in &nonzero {
        assert!((a.norm_sqr() - 2.0).abs() < 1e-10);
    }
    assert!(fp.residuals.iter().all(|&r| r < 1e-10));
    // Metastable recipe (K = 1, no losses, Δ = n/2, Λ1 = −i n √Λ2 / 2): the negated
    // roots satisfy Δ(α − i√Λ2) − Λ2 α* − α|α|² = 0.
    let (n, l2) = (2.0, 6.0);
    let delta = n / 2.0;
    let q = Params::kerr_only(1.0)
        .with_detuning(delta)
        .with_drive_pair(c(l2, 0.0))
        .with_drive_linear(c(0.0, -n * l2.sqrt() / 2.0));
    let fq = semiclassical_fixed_points(&q);
    assert!(fq.amplitudes.len() >= 2);
    for a in &fq.amplitudes {
        let b = -*a;
        let cubic = (b - c(0.0, l2.sqrt())) * delta - b.conj() * l2 - b * b.norm_sqr();
        assert!(cubic.norm() < 1e-10, "{a}: {cubic}");
    }
}

#[test]
fn metapotential_values() {
    let g = PhaseGrid::square(2.0, 9).unwrap();
    let m = metapotential(&Params::kerr_only(2.0), &g);
    let z = g.point(7, 3);
    assert!((m.value(7, 3).re - z.norm_sqr().powi(2)).abs() < 1e-14);
    // Two-photon drive alone: the extrema at ±z0 are degenerate, also with a small imaginary Λ1.
    let p = Params::kerr_only(1.0).with_drive_pair(c(0.0, 2.0));
    let fine = PhaseGrid::square(2.0, 401).unwrap();
    let vals = metapotential(&p, &fine);
    let v = vals.real_values().unwrap();
    let (imin, vmin) =
        v.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
    let mirror = v.len() - 1 - imin;
    assert!((v[mirror] - vmin).abs() < 1e-12);
    let q = p.with_drive_linear(c(0.0, 1e-3));
    let h =
        |z: C64| metapotential(&q, &PhaseGrid::new(z.re, z.re + 1.0, z.im, z.im + 1.0, 2, 2).unwrap()).value(0, 0).re;
    let z0 = fine.point(imin % 401, imin / 401);
    // First-order shift 2 Re(Λ1 z*) is odd in z, but the extremum moves; compare extremal values.
    let local_min = |centre: C64| {
        let mut best = f64::INFINITY;
        for i in -50..=50 {
            for j in -50..=50 {
                best = best.min(h(centre + c(i as f64 * 2e-3, j as f64 * 2e-3)));
            }
        }
        best
    };
    let split = (local_min(z0) - local_min(-z0)).abs();
    assert!(split < 1e-2, "{split}");
}

#[test]
fn projection_identities() {
    let p = Params::kerr_only(1.0).with_drive_pair(c(1.2, 0.0));
    let d = derive(&p).unwrap();
    let (s1, s2) = bistable_pair(&d, 0, 0).unwrap();
    let basis = mode_basis((&s1, &s2), 30).unwrap();
    let weights = [c(0.3, 0.1), c(-0.7, 0.2), c(0.1, 0.5), c(0.4, -0.6)];
    let mut x = DMatrix::from_element(30, 30, c(0.0, 0.0));
    for (w, b) in weights.iter().zip(&basis) {
        x += b * *w;
    }
    let pr = projection_onto(&x, &basis).unwrap();
    assert!((pr.value - 1.0).abs() < 1e-10);
    // A matrix supported far above the states is orthogonal to the span.
    let mut far = DMatrix::from_element(30, 30, c(0.0, 0.0));
    far[(29, 28)] = c(1.0, 0.0);
    let basis_small: Vec<DMatrix<C64>> = coherent_basis(&[c(0.0, 0.0)], 30);
    assert!(projection_onto(&far, &basis_small).unwrap().value < 1e-20);
    assert_eq!(projection_onto(&far, &[]).unwrap_err().code(), "RankDeficiency");
}

#[test]
fn metastable_slow_mode_lives_in_bistable_span() {
    // Two-photon drive at Δ = 0 with weak one-photon loss: a slow tunnelling mode.
    let p = Params::kerr_only(1.0).with_drive_pair(c(4.0, 0.0)).with_losses(0.05, 0.0);
    let l = build_liouvillian(&p, 30).unwrap();
    let rep = spectrum(&l, 4).unwrap();
    assert!(rep.rates[0] < 0.05);
    assert!(rep.gap_ratio().unwrap() > 3.0, "{:?}", rep.rates);
    let exact = Params::kerr_only(1.0).with_drive_pair(c(4.0, 0.0));
    let d = derive(&exact).unwrap();
    let (s1, s2) = bistable_pair(&d, 0, 0).unwrap();
    let pb = slow_mode_projection(&rep, (&s1, &s2)).unwrap();
    assert!(pb.value > 0.9 && pb.value <= 1.0 + 1e-10, "{pb:?}");
}

#[test]
fn residual_wrapper() {
    let s = solve(&Params::kerr_only(1.0).with_losses(1.0, 0.0)).unwrap();
    assert_eq!(dark_state_residual(&s, 20).unwrap(), 0.0);
}
