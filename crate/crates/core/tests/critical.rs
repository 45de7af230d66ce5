use nlsgraph_core::closed_forms::{critical_masses, gn_constant_halfline, gn_constant_line};
use nlsgraph_core::critical::{self, Regime};
use nlsgraph_core::{shapes, GraphFunction, SolverConfig};

fn cfg(l: f64, h: f64) -> SolverConfig {
    let mut c = SolverConfig::for_problem(6.0, 1.0);
    c.truncation_length = l;
    c.h_target = h;
    c
}

#[test]
fn quotient_is_scale_invariant_under_refinement() {
    // Q(√λ u(λ·)) on the line, computed on meshes that resolve both scales.
    let g = shapes::line();
    let c = cfg(60.0, 0.005);
    let mesh = c.mesh(&g).unwrap();
    let profile = |lambda: f64| {
        GraphFunction::sample(mesh.clone(), |_, x| {
            lambda.sqrt() * (1.0 / (lambda * x).cosh()).sqrt() * (-0.01 * (lambda * x).powi(2)).exp()
        })
        .unwrap()
    };
    let q1 = critical::gn_quotient(&profile(1.0));
    let q2 = critical::gn_quotient(&profile(2.0));
    assert!((q1 - q2).abs() < 1e-4 * q1, "{q1} vs {q2}");
}

#[test]
fn constants_are_sandwiched() {
    let (kl, kh) = (gn_constant_line(), gn_constant_halfline());
    let c = cfg(100.0, 0.05);
    for (name, g) in shapes::corpus() {
        let est = critical::estimate_k(&g, &c).unwrap();
        assert!(est.k >= kl * 0.99 && est.k <= kh * (1.0 + 1e-9), "{name}: {}", est.k);
    }
}

#[test]
fn tadpole_minimizers_satisfy_modified_inequality() {
    let g = shapes::tadpole(2.0 * std::f64::consts::PI).unwrap();
    let c = cfg(60.0, 0.05);
    let (mu_line, mu_half) = critical_masses();
    let mut minimizers = Vec::new();
    for t in [0.25, 0.5, 0.75, 1.0] {
        let mu = mu_half + t * (mu_line - mu_half);
        let r = critical::critical_search(&g, mu, &c).unwrap();
        minimizers.push((mu, r.u));
    }
    // Smallest C for which θ = μ is admissible for every minimizer.
    let fitted = minimizers
        .iter()
        .map(|(mu, u)| u.pl_power_integral(6.0) / mu.sqrt())
        .fold(0.0, f64::max);
    for (mu, u) in &minimizers {
        let theta = critical::modified_gn_theta(u, *mu, fitted).unwrap().expect("θ exists");
        let e = u.kinetic() - u.pl_power_integral(6.0) / 6.0;
        if e < 0.0 {
            assert!(fitted * theta.sqrt() >= 6.0 * -e * (1.0 - 1e-6), "mu={mu}");
        }
    }
    // Larger C only lowers the smallest admissible θ.
    let (mu, u) = &minimizers[2];
    let a = critical::modified_gn_theta(u, *mu, fitted).unwrap().unwrap();
    let b = critical::modified_gn_theta(u, *mu, 10.0 * fitted).unwrap().unwrap();
    assert!(b <= a);
}

#[test]
fn profile_regimes_on_tadpole() {
    let g = shapes::tadpole(2.0 * std::f64::consts::PI).unwrap();
    let (mu_line, mu_half) = critical_masses();
    let rows = critical::energy_profile_p6(
        &g,
        &[0.9 * mu_half, 0.5 * (mu_half + mu_line), 1.05 * mu_line],
        &cfg(200.0, 0.05),
    )
    .unwrap();
    assert_eq!(rows[0].regime, Regime::ZeroLevel);
    assert!(rows[0].energy.abs() <= 1e-4);
    assert_eq!(rows[1].regime, Regime::NegativeFinite);
    assert!(rows[1].energy <= -1e-3);
    assert_eq!(rows[2].regime, Regime::UnboundedSuspected);
}
