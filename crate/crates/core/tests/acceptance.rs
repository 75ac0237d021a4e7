//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass/fail line (run with `--nocapture` to see them).

use std::sync::Arc;

use fujita_core::contraction::{contraction_experiment, ContractionVerdict};
use fujita_core::data::{ball_mass, baras_pierre_report, tau_series, DataSpec, MassVerdict};
use fujita_core::duhamel::HeatPropagator;
use fujita_core::error::Error;
use fujita_core::grid::{RadialField, RadialGrid};
use fujita_core::gweight::{check_g_properties, jensen_check, xq_norm, GParams, SampleSpec};
use fujita_core::iterate::{
    build_supersolution, monotone_iterate, picard_iterate, verify_supersolution, IterationOptions,
};
use fujita_core::kernel::{HeatKernel, KernelMethod};
use fujita_core::mesh::TimeMesh;
use fujita_core::quadrature::log_weight_integral;
use fujita_core::semigroup::{apply_semigroup, lp_norm};
use fujita_core::trajectory::weighted_supnorm_track;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const E: f64 = std::f64::consts::E;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn lab_grid(dim: u32, n: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::new(dim, 20.0 * (-40.0_f64).exp(), 20.0, n, 0.8).unwrap())
}

fn gaussian_profile(dim: u32, t0: f64, mass: f64) -> impl Fn(f64) -> f64 {
    let nf = dim as f64;
    move |r: f64| {
        mass * (4.0 * std::f64::consts::PI * t0).powf(-0.5 * nf) * (-r * r / (4.0 * t0)).exp()
    }
}

#[test]
fn criterion_01_log_weight_integral_closed_form() {
    // quadrature of ∫_0^t s^-1 (-log s)^{-(q+1)} ds vs 2/(N (-log t)^q)
    let mut worst = 0.0_f64;
    for dim in [1_u32, 2, 4] {
        let q = dim as f64 / 2.0;
        for sigma in [20.0, 10.0, 4.0] {
            let t = (-sigma_f(sigma)).exp();
            let out = log_weight_integral(t, q + 1.0, 0.0).unwrap();
            let expected = 2.0 / (dim as f64 * sigma.powf(q));
            worst = worst.max(rel(out.quadrature, expected));
            worst = worst.max(rel(out.closed_form, expected));
        }
    }
    assert!(worst <= 1e-8, "criterion 1: worst rel {worst}");
    println!("criterion 01 log-weight integrals vs closed form: PASS (worst rel {worst:.2e})");
}

fn sigma_f(s: f64) -> f64 {
    s
}

#[test]
fn criterion_02_uniqueness_integral_closed_form() {
    // quadrature vs N (-log t)^{1-2q/N} / (2q - N)
    let mut worst = 0.0_f64;
    for (dim, q) in [(1_u32, 1.0_f64), (2, 2.0), (2, 3.0)] {
        let nf = dim as f64;
        for sigma in [30.0, 17.0, 9.0, 4.0] {
            let t = (-sigma_f(sigma)).exp();
            let out = log_weight_integral(t, 2.0 * q / nf, 0.0).unwrap();
            let expected = nf * sigma.powf(1.0 - 2.0 * q / nf) / (2.0 * q - nf);
            worst = worst.max(rel(out.quadrature, expected));
        }
    }
    assert!(worst <= 1e-8, "criterion 2: worst rel {worst}");
    println!("criterion 02 uniqueness time integral vs closed form: PASS (worst rel {worst:.2e})");
}

#[test]
fn criterion_03_xq_certification_and_ball_mass() {
    let mut worst_mass = 0.0_f64;
    for (dim, q, eps) in [(2_u32, 0.5, 0.25), (1, 0.0, 0.25), (4, 1.0, 0.5)] {
        let grid = lab_grid(dim, 1024);
        let phi0 = DataSpec::Phi0 { eps }.materialize(&grid).unwrap();
        let omega = grid.surface_area();
        let nf = dim as f64;

        let value = xq_norm(&phi0, q, E).unwrap();
        let bound = (2.0 * nf).powf(q) * omega / (0.5 * nf - q - eps);
        assert!(
            value.is_finite() && value <= bound * (1.0 + 1e-3),
            "criterion 3: X_q value {value} vs bound {bound} at N={dim}"
        );

        // ball mass vs omega (-log tau)^{-(N/2-eps)} / (N/2-eps)
        for k in 0..10 {
            let sigma = 1.0 + (13.815510557964274 - 1.0) * k as f64 / 9.0; // tau in [1e-6, 1/e]
            let tau = (-sigma).exp();
            let exact = omega * sigma.powf(-(0.5 * nf - eps)) / (0.5 * nf - eps);
            worst_mass = worst_mass.max(rel(ball_mass(&phi0, tau).unwrap(), exact));
        }
    }
    assert!(worst_mass <= 1e-4, "criterion 3: worst mass rel {worst_mass}");
    println!("criterion 03 X_q certification and B(tau) masses: PASS (worst mass rel {worst_mass:.2e})");
}

#[test]
fn criterion_04_mass_ratio_verdicts() {
    let grid = lab_grid(2, 1024);
    let taus = tau_series(3.0, 30.0, 1.5);
    let eps = 0.25;

    let phi0 = DataSpec::Phi0 { eps }.materialize(&grid).unwrap();
    let rep = baras_pierre_report(&phi0, &taus).unwrap();
    assert!(matches!(rep.verdict, MassVerdict::Diverging), "phi0 must diverge");
    assert!(
        (rep.slope - eps).abs() <= 0.05,
        "criterion 4: phi0 slope {} vs eps {eps}",
        rep.slope
    );

    let psi = DataSpec::Psi.materialize(&grid).unwrap();
    let rep_psi = baras_pierre_report(&psi, &taus).unwrap();
    assert!(matches!(rep_psi.verdict, MassVerdict::Bounded));
    assert!(rep_psi.slope.abs() <= 0.02, "psi slope {}", rep_psi.slope);
    let gamma0_expect = grid.surface_area() * 2.0 / 2.0; // omega * 2/N
    assert!(
        rel(rep_psi.gamma0_empirical, gamma0_expect) <= 0.01,
        "criterion 4: gamma0 {} vs {}",
        rep_psi.gamma0_empirical,
        gamma0_expect
    );

    let gauss = DataSpec::Gaussian { t0: 1e-2, amplitude: 1.0 }
        .materialize(&grid)
        .unwrap();
    let rep_g = baras_pierre_report(&gauss, &taus).unwrap();
    assert!(matches!(rep_g.verdict, MassVerdict::Bounded));
    let last = rep_g.series.last().unwrap().ratio;
    assert!(
        last <= 1e-3 * rep_g.gamma0_empirical.max(1e-300),
        "criterion 4: gaussian ratio does not collapse ({last})"
    );
    println!(
        "criterion 04 mass-ratio test: PASS (phi0 slope {:.3}, psi gamma0 rel {:.2e}, gaussian ratio -> {last:.1e})",
        rep.slope,
        rel(rep_psi.gamma0_empirical, gamma0_expect)
    );
}

#[test]
fn criterion_05_semigroup_fidelity() {
    let dim = 1_u32;
    let grid = Arc::new(RadialGrid::new(dim, 8.0 * (-40.0_f64).exp(), 8.0, 2048, 0.7).unwrap());
    let kernel = HeatKernel::new(dim).unwrap();

    // gaussian maps to gaussian, sup-relative error <= 1e-8
    let mut worst_gauss = 0.0_f64;
    let t0 = 1e-3;
    let phi = RadialField::from_profile(grid.clone(), gaussian_profile(dim, t0, 1.0)).unwrap();
    for t in [1e-3, 1e-2, 5e-2] {
        let evolved = apply_semigroup(&phi, t, &kernel).unwrap();
        let exact =
            RadialField::from_profile(grid.clone(), gaussian_profile(dim, t0 + t, 1.0)).unwrap();
        let sup = exact.sup_norm().0;
        let mut err = 0.0_f64;
        for (a, b) in evolved.values().iter().zip(exact.values()) {
            err = err.max((a - b).abs());
        }
        worst_gauss = worst_gauss.max(err / sup);
    }
    assert!(worst_gauss <= 1e-8, "gaussian fidelity {worst_gauss}");

    // mass conservation for a capped singular datum, with the tail reported
    let capped = DataSpec::truncated(DataSpec::Phi0 { eps: 0.25 }, 1e6)
        .materialize(&grid)
        .unwrap();
    let m0 = lp_norm(&capped, 1.0).unwrap();
    let evolved = apply_semigroup(&capped, 1e-3, &kernel).unwrap();
    let m1 = lp_norm(&evolved, 1.0).unwrap();
    let mass_drift = rel(m1, m0);
    assert!(mass_drift <= 1e-6, "mass drift {mass_drift}");
    let tail = capped.core_mass_estimate();
    assert!(tail.is_finite());

    // semigroup law in L1
    let t = 1e-3;
    let two = apply_semigroup(&apply_semigroup(&capped, t, &kernel).unwrap(), t, &kernel).unwrap();
    let one = apply_semigroup(&capped, 2.0 * t, &kernel).unwrap();
    let diff = two.zip_with(&one, |a, b| a - b).unwrap();
    let law_defect = lp_norm(&diff, 1.0).unwrap() / m0;
    assert!(law_defect <= 1e-6, "semigroup law defect {law_defect}");

    // N=3 angular quadrature vs closed form on 10^3 seeded samples
    let closed = HeatKernel::new(3).unwrap();
    let quad = HeatKernel::with_method(3, KernelMethod::AngularQuadrature).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20260811);
    let mut worst_kernel = 0.0_f64;
    for _ in 0..1000 {
        let t = (-12.0 + 10.0 * rng.gen::<f64>()).exp();
        let r = 5.0 * rng.gen::<f64>();
        let offset = (4.0 * t).sqrt() * 6.0 * (rng.gen::<f64>() - 0.5);
        let s = (r + offset).abs();
        let a = closed.eval(r, s, t).unwrap();
        let b = quad.eval(r, s, t).unwrap();
        if a > 1e-250 {
            worst_kernel = worst_kernel.max(rel(b, a));
        } else {
            assert!(b <= 1e-250);
        }
    }
    assert!(worst_kernel <= 1e-10, "N=3 kernel quadrature {worst_kernel}");

    println!(
        "criterion 05 semigroup fidelity: PASS (gaussian {worst_gauss:.2e}, mass {mass_drift:.2e}, law {law_defect:.2e}, N=3 kernel {worst_kernel:.2e})"
    );
}

#[test]
fn criterion_06_weight_function_property_suite() {
    // (i)-(v) on 10^4 log-spaced samples in [0, 1e8]
    let spec = SampleSpec {
        s_min: 1e-8,
        s_max: 1e8,
        count: 10_000,
    };
    for dim in [1_u32, 2, 3] {
        let q = dim as f64 / 2.0;
        let params = GParams::canonical(q, dim).unwrap();
        let rep = check_g_properties(&params, dim, &spec);
        assert!(rep.convex && rep.power_monotone);
        assert!(rep.c1_empirical.is_finite());
        for p in rep.properties.iter() {
            assert!(
                !p.checked || p.worst >= -1e-10,
                "criterion 6: N={dim} property {} worst {} at s={}",
                p.name,
                p.worst,
                p.worst_at
            );
        }
    }

    // convexity inequality margin on 3 canonical data x 3 times
    let dim = 2_u32;
    let grid = lab_grid(dim, 512);
    let kernel = HeatKernel::new(dim).unwrap();
    let params = GParams::canonical(1.0, dim).unwrap();
    let data = [
        DataSpec::Gaussian { t0: 1e-3, amplitude: 1.0 },
        DataSpec::truncated(DataSpec::Phi0 { eps: 0.5 }, 1e4),
        DataSpec::truncated(DataSpec::Psi, 1e4),
    ];
    let mut worst_margin = f64::INFINITY;
    for spec in &data {
        let phi = spec.materialize(&grid).unwrap();
        for t in [1e-4, 1e-3, 1e-2] {
            let margin = jensen_check(&phi, t, &params, &kernel).unwrap();
            worst_margin = worst_margin.min(margin);
        }
    }
    assert!(worst_margin >= -1e-8, "criterion 6: convexity margin {worst_margin}");
    println!(
        "criterion 06 weight-function suite: PASS (convexity-inequality margin {worst_margin:.2e})"
    );
}

#[test]
fn criterion_07_monotone_picard_engine() {
    // N=1, q=1, 1024-node grid, 48-node mesh with T = e^-8
    let dim = 1_u32;
    let grid = Arc::new(RadialGrid::new(dim, 8.0 * (-40.0_f64).exp(), 8.0, 1024, 0.7).unwrap());
    let mesh = Arc::new(TimeMesh::log_graded((-20.0_f64).exp(), (-8.0_f64).exp(), 48).unwrap());
    let prop = HeatPropagator::new(grid.clone(), mesh, HeatKernel::new(dim).unwrap()).unwrap();
    let params = GParams::canonical(1.0, dim).unwrap();
    let opts = IterationOptions {
        tol: 1e-8,
        slack: 1e-6,
        n_max: 50,
    };
    let phi = RadialField::from_profile(grid, gaussian_profile(dim, 1e-3, 1e-3)).unwrap();

    let ubar = build_supersolution(&prop, &phi, &params).unwrap();
    let sup = verify_supersolution(&prop, &ubar, &phi, &params, &opts).unwrap();
    assert!(sup.confirmed_all, "supersolution not confirmed: {:?}", sup.residuals);

    let (mono, w) = monotone_iterate(&prop, &phi, &ubar, &params, &opts).unwrap();
    assert!(mono.converged);
    assert!(mono.iterations <= 15, "iterations {}", mono.iterations);
    assert!(mono.monotone_margin >= -1e-6, "monotone margin {}", mono.monotone_margin);
    assert!(mono.domination_margin >= -1e-6);
    assert!(
        mono.fixed_point_residual <= 2e-8,
        "fixed-point residual {}",
        mono.fixed_point_residual
    );

    let flipped = phi.map(|v| -v);
    let (pic, _) = picard_iterate(&prop, &flipped, &w, &params, &opts).unwrap();
    assert!(pic.converged);
    assert!(pic.envelope_margin >= -1e-6, "envelope margin {}", pic.envelope_margin);

    println!(
        "criterion 07 monotone/picard engine: PASS ({} sweeps, residual {:.2e}, envelope {:.2e})",
        mono.iterations, mono.fixed_point_residual, pic.envelope_margin
    );
}

#[test]
fn criterion_08_weighted_estimate_stability() {
    // capped phi0 (cap 1e4), N=2, q=1: m(t) bounded, max stable under one
    // mesh-refinement doubling
    let dim = 2_u32;
    let grid = Arc::new(RadialGrid::new(dim, 20.0 * (-40.0_f64).exp(), 20.0, 512, 0.8).unwrap());
    let phi = DataSpec::truncated(DataSpec::Phi0 { eps: 0.5 }, 1e4)
        .materialize(&grid)
        .unwrap();
    let params = GParams::canonical(1.0, dim).unwrap();
    let opts = IterationOptions::default();

    let mut maxes = Vec::new();
    for m in [48_usize, 95] {
        let mesh = Arc::new(TimeMesh::log_graded((-23.0_f64).exp(), (-10.0_f64).exp(), m).unwrap());
        let prop = HeatPropagator::new(grid.clone(), mesh, HeatKernel::new(dim).unwrap()).unwrap();
        let ubar = build_supersolution(&prop, &phi, &params).unwrap();
        let sup = verify_supersolution(&prop, &ubar, &phi, &params, &opts).unwrap();
        assert!(sup.confirmed_all);
        let (rep, sol) = monotone_iterate(&prop, &phi, &ubar, &params, &opts).unwrap();
        assert!(rep.converged);
        let track = weighted_supnorm_track(&sol, params.q());
        assert!(track.max.is_finite() && track.max > 0.0);
        maxes.push(track.max);
    }
    let drift = (maxes[1] - maxes[0]).abs() / maxes[0];
    assert!(drift <= 0.10, "criterion 8: drift {drift}");
    println!(
        "criterion 08 weighted sup-norm estimate: PASS (max {:.5e}, refinement drift {:.2e})",
        maxes[0], drift
    );
}

#[test]
fn criterion_09_contraction_experiment() {
    // (N, q, T) = (1, 1, e^-8): theoretical integral 0.125, factor <= 0.3
    let dim = 1_u32;
    let grid = Arc::new(RadialGrid::new(dim, 8.0 * (-40.0_f64).exp(), 8.0, 768, 0.7).unwrap());
    let mesh = Arc::new(TimeMesh::log_graded((-20.0_f64).exp(), (-8.0_f64).exp(), 40).unwrap());
    let prop = HeatPropagator::new(grid.clone(), mesh, HeatKernel::new(dim).unwrap()).unwrap();
    let params = GParams::canonical(1.0, dim).unwrap();
    let phi = RadialField::from_profile(grid, gaussian_profile(dim, 1e-3, 1e-3)).unwrap();
    let opts = IterationOptions::default();

    let rep = contraction_experiment(&prop, &phi, 0.01, &params, &opts).unwrap();
    assert!(rel(rep.theoretical_integral, 0.125) < 1e-12);
    assert!(rep.theoretical_factor <= 0.3, "theory factor {}", rep.theoretical_factor);
    assert!(rep.measured_factor <= 0.5, "measured factor {}", rep.measured_factor);
    assert!(matches!(rep.verdict, ContractionVerdict::Contractive));
    assert!(rep.class_bound_u.is_finite() && rep.class_bound_v.is_finite());

    // the run refuses q <= N/2 with the documented error
    let subcritical = GParams::canonical(0.5, dim).unwrap();
    let phi2 = RadialField::from_profile(
        prop.grid().clone(),
        gaussian_profile(dim, 1e-3, 1e-3),
    )
    .unwrap();
    match contraction_experiment(&prop, &phi2, 0.01, &subcritical, &opts) {
        Err(Error::UniquenessExponent { q, dim }) => {
            assert_eq!(dim, 1);
            assert!((q - 0.5).abs() < 1e-15);
        }
        other => panic!("expected UniquenessExponent, got {other:?}"),
    }

    println!(
        "criterion 09 contraction experiment: PASS (integral {:.3}, theory {:.2e}, measured {:.2e})",
        rep.theoretical_integral, rep.theoretical_factor, rep.measured_factor
    );
}

#[test]
fn criterion_10_parabolic_scaling() {
    // ||phi_lambda||_1 invariance at q_c = 1
    let grid1 = lab_grid(1, 1024);
    let base = DataSpec::Gaussian { t0: 4e-3, amplitude: 1.0 };
    let m0 = lp_norm(&base.materialize(&grid1).unwrap(), 1.0).unwrap();
    let mut worst_mass = 0.0_f64;
    for lambda in [0.5, 2.0, 8.0] {
        let scaled = DataSpec::scaled(base.clone(), lambda).materialize(&grid1).unwrap();
        worst_mass = worst_mass.max(rel(lp_norm(&scaled, 1.0).unwrap(), m0));
    }
    assert!(worst_mass <= 1e-8, "criterion 10: mass invariance {worst_mass}");

    // ball-mass covariance ball_mass(phi_lambda, tau) = ball_mass(phi, lambda tau)
    let grid2 = lab_grid(2, 1024);
    let phi0 = DataSpec::Phi0 { eps: 0.5 };
    let phi = phi0.materialize(&grid2).unwrap();
    let mut worst_cov = 0.0_f64;
    for lambda in [0.5, 2.0, 8.0] {
        let scaled = DataSpec::scaled(phi0.clone(), lambda).materialize(&grid2).unwrap();
        for tau in [0.01, 0.03] {
            let a = ball_mass(&scaled, tau).unwrap();
            let b = ball_mass(&phi, lambda * tau).unwrap();
            worst_cov = worst_cov.max(rel(a, b));
        }
    }
    assert!(worst_cov <= 1e-6, "criterion 10: covariance {worst_cov}");
    println!(
        "criterion 10 parabolic scaling: PASS (mass invariance {worst_mass:.2e}, covariance {worst_cov:.2e})"
    );
}
