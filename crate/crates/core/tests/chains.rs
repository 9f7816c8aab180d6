use condorcet_core::heuristics::{run_ea, EaRun};
use condorcet_core::markov::{
    analyze_chain, coupling_coalescence, coupling_meet_probability, exact_tv_curve, gamma_to_p,
    mixing_time_bound, stationary_by_power_iteration, stationary_distribution, total_variation, TransitionMatrix,
};
use condorcet_core::{PlackettLuceModel, PreferenceMatrix, QueryPolicy, RngStream};

fn pi_star(m: &PreferenceMatrix, x: u64) -> f64 {
    let p = TransitionMatrix::from_preferences(m, QueryPolicy::new(x).unwrap()).unwrap();
    stationary_distribution(&p).unwrap().pi[m.condorcet_winner().unwrap()]
}

#[test]
fn gamma_grid_hits_target_mass() {
    for n in 2..=50 {
        for g in 1..=19 {
            let gamma = g as f64 * 0.05;
            let gap = gamma_to_p(gamma, n).unwrap();
            if !gap.strict_condorcet {
                continue;
            }
            let m = PreferenceMatrix::uniform_gap(n, n / 2, gap.p).unwrap();
            assert!((pi_star(&m, 1) - (1.0 - gamma)).abs() <= 1e-10, "n={n} gamma={gamma}");
        }
    }
}

#[test]
fn winner_mass_decreases_in_p() {
    for n in [2, 5, 20] {
        let mut last = f64::INFINITY;
        for k in 1..100 {
            let p = k as f64 * 0.005;
            let now = pi_star(&PreferenceMatrix::uniform_gap(n, 0, p).unwrap(), 1);
            assert!(now < last, "n={n} p={p}");
            last = now;
        }
    }
}

#[test]
fn power_iteration_agrees_with_solve() {
    let m = PlackettLuceModel::new(vec![5.0, 1.0, 2.0, 3.0]).unwrap().to_matrix();
    let p = TransitionMatrix::from_preferences(&m, QueryPolicy::new(3).unwrap()).unwrap();
    let direct = stationary_distribution(&p).unwrap();
    let power = stationary_by_power_iteration(&p, 1e-14, 100_000);
    assert!(total_variation(&direct.pi, &power.pi) < 1e-10);
    assert!(direct.residual < 1e-14);
}

#[test]
fn exact_mixing_within_bound() {
    let epsilons = [0.1, 0.01, 0.001];
    let mut chains = Vec::new();
    for n in [2, 3, 5, 10, 20, 50] {
        chains.push(PreferenceMatrix::uniform_gap(n, 0, 0.3).unwrap());
        let u: Vec<f64> = (0..n).map(|i| 1.0 + (n - i) as f64).collect();
        chains.push(PlackettLuceModel::new(u).unwrap().to_matrix());
    }
    for m in &chains {
        let n = m.n();
        let p = TransitionMatrix::from_preferences(m, QueryPolicy::single()).unwrap();
        let horizon = mixing_time_bound(n, 0.001).unwrap().ceil() as usize + 1;
        let report = exact_tv_curve(&p, horizon, &epsilons).unwrap();
        for e in &report.estimates {
            let tau = e.tau.expect("reached within the bound horizon");
            assert!(tau as f64 <= e.bound, "n={n} eps={} tau={tau} bound={}", e.epsilon, e.bound);
        }
    }
}

#[test]
fn two_state_mixing_time() {
    let m = PreferenceMatrix::new(&[vec![1.0, 2.0 / 3.0], vec![1.0 / 3.0, 1.0]]).unwrap();
    let p = TransitionMatrix::from_preferences(&m, QueryPolicy::single()).unwrap();
    let report = exact_tv_curve(&p, 20, &[0.01]).unwrap();
    assert_eq!(report.estimates[0].tau, Some(7));
}

#[test]
fn coupling_meets_at_exact_rate() {
    let m = PlackettLuceModel::new(vec![3.0, 1.0, 2.0, 0.5, 1.5]).unwrap().to_matrix();
    let mut rng = RngStream::new(41, 0);
    let trials = 100_000u64;
    for (i, j) in [(0, 1), (2, 4), (3, 1)] {
        let exact = coupling_meet_probability(&m, i, j);
        assert!(exact >= 1.0 / m.n() as f64);
        let met = (0..trials)
            .filter(|_| matches!(coupling_coalescence(&m, i, j, &mut rng, 1), Ok(1)))
            .count() as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((met / trials as f64 - exact).abs() <= 3.0 * sigma, "({i},{j})");
    }
}

#[test]
fn occupancy_tracks_stationary_distribution() {
    let gap = gamma_to_p(0.5, 3).unwrap();
    let m = PreferenceMatrix::uniform_gap(3, 0, gap.p).unwrap();
    let mut rng = RngStream::new(7, 0);
    let EaRun { occupancy, .. } = run_ea(&m, QueryPolicy::single(), 300_000, 1000, &mut rng, 0).unwrap();
    assert!((occupancy[0] - 0.5).abs() < 0.01);
}

#[test]
fn analysis_rows_are_consistent() {
    let m = PlackettLuceModel::new(vec![3.0, 1.0, 1.0, 2.0]).unwrap().to_matrix();
    let rows = analyze_chain(&m, QueryPolicy::new(3).unwrap(), &[0.1, 0.01]).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.pi_star_lower <= r.pi_star_exact && r.pi_star_exact <= r.pi_star_upper);
        assert!((r.gamma - (1.0 - r.pi_star_lower)).abs() < 1e-12);
        assert!(r.tau_eps_exact.unwrap() as f64 <= r.tau_eps_bound);
    }
}
