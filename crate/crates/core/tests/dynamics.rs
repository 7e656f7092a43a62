use emlangevin::diagnostics::{energy_audit, fit_growth_rate};
use emlangevin::forces::ExternalPotential;
use emlangevin::integrators::run;
use emlangevin::model::RunStatus;
use emlangevin::scenario::{EquationFamily, QbmMode, Scenario};
use emlangevin::units::{tau_m, ParticleSpec, UnitSystem, GAMMA0};

/// Charge giving `τ_m = tau` for unit mass.
fn charge_for_tau(tau: f64) -> f64 {
    (6.0 * std::f64::consts::PI * tau).sqrt()
}

fn harmonic(family: EquationFamily, tau: f64, dt: f64, t_end: f64) -> Scenario {
    let p = ParticleSpec::new("q", 1.0, charge_for_tau(tau)).unwrap();
    let mut s = Scenario::single(family, p, [1.0, 0.0, 0.0], [0.0, 0.5, 0.0], dt, t_end);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    s
}

#[test]
fn consistent_and_ford_oconnell_damping_rate() {
    for tau in [1e-3, 1e-2] {
        for fam in [EquationFamily::Consistent1OverC3, EquationFamily::FordOConnell] {
            let mut s = harmonic(fam, tau, 0.05, 2.0 / tau);
            s.record_stride = 20;
            let out = run(&s).unwrap();
            assert_eq!(out.trajectory.status, RunStatus::Completed);
            let fit = fit_growth_rate(&out.ledger.h_sys, s.dt * s.record_stride as f64).unwrap();
            let want = -tau; // energy decays at twice the amplitude rate τω₀²/2
            assert!((fit.rate / want - 1.0).abs() < 0.02, "{fam:?} tau={tau}: {} vs {want}", fit.rate);
        }
    }
}

#[test]
fn qbm_ohmic_damping_rate() {
    let e: f64 = 0.5;
    let p = ParticleSpec::new("q", 1.0, e).unwrap();
    let mut s = Scenario::single(EquationFamily::Qbm, p, [1.0, 0.0, 0.0], [0.0; 3], 0.02, 600.0);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    s.record_stride = 25;
    let out = run(&s).unwrap();
    let fit = fit_growth_rate(&out.ledger.h_sys, 0.5).unwrap();
    let want = -2.0 * e * e * GAMMA0;
    assert!((fit.rate / want - 1.0).abs() < 0.02, "{} vs {want}", fit.rate);
}

#[test]
fn abraham_lorentz_runaway_rate() {
    let p = ParticleSpec::new("e", 1.0, 1.0).unwrap();
    let tau = tau_m(&p, &UnitSystem::default());
    let mut s = Scenario::single(EquationFamily::AbrahamLorentz, p, [0.0; 3], [0.0; 3], 0.01 * tau, 40.0 * tau);
    s.initial.accelerations = Some(vec![[1.0, 0.0, 0.0]]);
    let out = run(&s).unwrap();
    let RunStatus::RunawayDetected { time } = out.trajectory.status else {
        panic!("expected runaway, got {:?}", out.trajectory.status);
    };
    let a = out.trajectory.aux_series(0, 0).unwrap();
    let fit = fit_growth_rate(&a, s.dt).unwrap();
    assert!((fit.rate * tau - 1.0).abs() < 0.02, "rate {}", fit.rate * tau);
    // |p| ≈ m τ a₀ e^{t/τ} reaches the bound at t ≈ τ ln(bound / (m τ a₀))
    let predicted = tau * (1e6 / tau).ln();
    assert!((time - predicted).abs() < 0.05 * predicted, "{time} vs {predicted}");

    // the order-reduced and consistent equations have no runaway branch
    for fam in [EquationFamily::FordOConnell, EquationFamily::Consistent1OverC3] {
        let mut t = s.clone();
        t.equation_family = fam;
        t.initial.accelerations = None;
        t.t_end = 1e3 * tau;
        t.dt = 0.1 * tau;
        let out = run(&t).unwrap();
        assert_eq!(out.trajectory.status, RunStatus::Completed);
    }
}

#[test]
fn abraham_lorentz_free_particle_without_acceleration() {
    let p = ParticleSpec::new("e", 1.0, 1.0).unwrap();
    let tau = tau_m(&p, &UnitSystem::default());
    let s = Scenario::single(EquationFamily::AbrahamLorentz, p, [0.0; 3], [0.3, 0.0, 0.0], 0.05 * tau, 20.0 * tau);
    let out = run(&s).unwrap();
    assert_eq!(out.trajectory.status, RunStatus::Completed);
    let last = out.trajectory.samples.last().unwrap();
    assert!(last.state.aux.as_ref().unwrap()[0].norm() == 0.0);
    assert!((last.state.positions[0].x - 0.3 * 20.0 * tau).abs() < 1e-14);
}

#[test]
fn abraham_lorentz_tracks_ford_oconnell_before_runaway() {
    for tau in [1e-2, 5e-3] {
        // start on the slow manifold a = −x − τv + τ²x + O(τ³); any offset
        // seeds the runaway mode, which grows by e¹⁰ over the horizon
        let mut al = harmonic(EquationFamily::AbrahamLorentz, tau, 0.01 * tau, 10.0 * tau);
        al.initial.accelerations = Some(vec![[-1.0 + tau * tau, -0.5 * tau, 0.0]]);
        let mut fo = al.clone();
        fo.equation_family = EquationFamily::FordOConnell;
        fo.initial.accelerations = None;
        let a = run(&al).unwrap();
        let b = run(&fo).unwrap();
        assert_eq!(a.trajectory.status, RunStatus::Completed);
        let dev = a
            .trajectory
            .samples
            .iter()
            .zip(&b.trajectory.samples)
            .map(|(p, q)| (p.state.positions[0] - q.state.positions[0]).norm())
            .fold(0.0, f64::max);
        assert!(dev < tau * tau, "tau {tau}: {dev}");
    }
}

#[test]
fn consistent_ledger_closes_without_noise() {
    let mut s = harmonic(EquationFamily::Consistent1OverC3, 1e-2, 0.02, 200.0);
    s.record_stride = 10;
    let out = run(&s).unwrap();
    let audit = energy_audit(&out.trajectory, &out.ledger, &s).unwrap();
    assert!(audit.relative_residual < 1e-6, "{}", audit.relative_residual);
    assert!(audit.h_gamma_nonincreasing);
    assert!(audit.h_xi_zero);
    assert!(audit.h_sys_mismatch < 1e-15);
}

#[test]
fn uncharged_harmonic_conserves_energy() {
    let p = ParticleSpec::new("n", 1.0, 0.0).unwrap();
    let mut s = Scenario::single(EquationFamily::Consistent1OverC3, p, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.005, 2000.0 * std::f64::consts::PI);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    s.record_stride = 1000;
    let out = run(&s).unwrap();
    let h0 = out.ledger.h_sys[0];
    let drift = out.ledger.h_sys.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max);
    // RK4 damps a harmonic mode by (ω dt)⁶/72 in energy per step
    let bound = s.steps() as f64 * s.dt.powi(6) / 72.0;
    assert!(drift / h0 < bound && drift / h0 < 1e-8, "{} vs {bound}", drift / h0);
    assert!(out.ledger.h_gamma.iter().all(|&g| g == 0.0));
}

#[test]
fn qbm_ledger_matches_local_dissipation() {
    let e: f64 = 0.8;
    let p = ParticleSpec::new("q", 1.0, e).unwrap();
    let mut s = Scenario::single(EquationFamily::Qbm, p, [1.0, 0.0, 0.0], [0.0; 3], 0.01, 50.0);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    let out = run(&s).unwrap();
    let dt = s.dt;
    let l = &out.ledger;
    let samples = &out.trajectory.samples;
    for k in 1..l.len() {
        let v0 = samples[k - 1].velocities[0].norm_squared();
        let v1 = samples[k].velocities[0].norm_squared();
        let want = -2.0 * e * e * GAMMA0 * 0.5 * (v0 + v1);
        let got = (l.h_gamma[k] - l.h_gamma[k - 1]) / dt;
        assert!((got - want).abs() < 1e-12, "k={k}");
    }
    assert!(l.relative_residual() < 1e-4, "{}", l.relative_residual());
}

#[test]
fn nonlocal_memory_approaches_local_damping() {
    let e: f64 = 0.8;
    let p = ParticleSpec::new("q", 1.0, e).unwrap();
    let mut base = Scenario::single(EquationFamily::Qbm, p, [1.0, 0.0, 0.0], [0.0; 3], 0.005, 40.0);
    base.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    let local = run(&base).unwrap();
    let mut last = f64::INFINITY;
    for lam in [50.0, 100.0, 200.0] {
        let mut s = base.clone();
        s.qbm.mode = QbmMode::Nonlocal;
        s.kernel.cutoff_lambda = lam;
        // a window fixed in time keeps the truncated tail shrinking with Λ
        s.qbm.memory_window = Some(20.0);
        let out = run(&s).unwrap();
        let l2: f64 = out
            .trajectory
            .samples
            .iter()
            .zip(&local.trajectory.samples)
            .map(|(a, b)| (a.state.positions[0] - b.state.positions[0]).norm_squared())
            .sum::<f64>()
            .sqrt();
        assert!(l2 < last, "lambda {lam}: {l2} !< {last}");
        last = l2;
    }
}
