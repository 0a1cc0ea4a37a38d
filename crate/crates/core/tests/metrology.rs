use comsense_core::dynamics::{propagator, recommended_cutoff, tau_1};
use comsense_core::fock::{coherent_state, superposition_state, FockOperator};
use comsense_core::linalg::CMatrix;
use comsense_core::metrology::*;
use comsense_core::model::hamiltonian_effective;
use comsense_core::StateKind;
use num_complex::Complex64;

fn sup(lambda: f64) -> comsense_core::fock::QuantumState {
    superposition_state(recommended_cutoff(lambda + DEFAULT_DLAMBDA, StateKind::Superposition).unwrap()).unwrap()
}

fn interior_max(m: &CMatrix, n: usize) -> f64 {
    let mut v: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            v = v.max(m[(i, j)].norm());
        }
    }
    v
}

#[test]
fn h_generator_matches_definition() {
    // h_ξ = i U†(∂_ξU) with U = exp(−i H_ξ s) and H_ξ = P²/2 + ξX²/2 − 1/2.
    for &(lambda, s) in &[(0.9, 2.0), (0.3, 0.7), (0.6, 1.5), (0.8, 3.0), (0.95, 1.1)] {
        let cutoff = 160;
        let gd = generator_decomposition(lambda, cutoff).unwrap();
        let h = h_generator(&gd, s).unwrap();
        let dxi = 1e-6;
        let u_at = |xi: f64| {
            let l = (1.0 - xi).sqrt();
            propagator(&hamiltonian_effective(l, cutoff, false).unwrap(), s).unwrap()
        };
        let up = u_at(gd.xi + dxi);
        let um = u_at(gd.xi - dxi);
        let u = u_at(gd.xi);
        let du = (up.matrix() - um.matrix()) / Complex64::new(2.0 * dxi, 0.0);
        let oracle = u.matrix().adjoint() * du * Complex64::new(0.0, 1.0);
        let diff = &oracle - h.matrix();
        let keep = 12;
        let scale = interior_max(h.matrix(), keep);
        assert!(interior_max(&diff, keep) < 1e-5 * scale.max(1.0), "λ={lambda} s={s} {} {scale}", interior_max(&diff, keep));
    }
}

#[test]
fn h_generator_small_time() {
    let gd = generator_decomposition(0.7, 40).unwrap();
    let s = 1e-3;
    let h = h_generator(&gd, s).unwrap();
    let lin: FockOperator = gd.h1.scale(s);
    let diff = h.matrix() - lin.matrix();
    assert!(interior_max(&diff, 20) < 1e-5);
    assert_eq!(interior_max(h_generator(&gd, 0.0).unwrap().matrix(), 40), 0.0);
}

#[test]
fn qfi_exact_agrees_with_fidelity_qfi() {
    let lambda = 0.9;
    let tau = tau_1(lambda).unwrap();
    let state = sup(lambda);
    for s in [0.5 * tau, tau] {
        let b = qfi_exact_breakdown(lambda, s, &state).unwrap();
        assert!((b.direct - b.expanded).abs() <= 1e-6 * b.direct);
        let n = qfi_numeric(lambda, s, &state, DEFAULT_DLAMBDA).unwrap();
        assert!((n - b.direct).abs() <= 1e-3 * b.direct, "{n} vs {}", b.direct);
    }
}

#[test]
fn qfi_numeric_step_halving() {
    let lambda = 0.9;
    let state = sup(lambda);
    let s = tau_1(lambda).unwrap();
    let a = qfi_numeric(lambda, s, &state, 2e-4).unwrap();
    let b = qfi_numeric(lambda, s, &state, 1e-4).unwrap();
    assert!((a - b).abs() < 1e-4 * b);
}

#[test]
fn qfi_asymptotic_examples() {
    let p = qfi_asymptotic_peak(0.9, 1, SUPERPOSITION_VAR_P2).unwrap();
    let expected = 64.0 * 0.81 * std::f64::consts::PI.powi(2) * 1.25 / 0.76f64.powi(3);
    assert!((p - expected).abs() < 1e-9 * expected);
    assert!((p - 1457.0).abs() < 0.5);
    let tau = tau_1(0.9).unwrap();
    assert!((qfi_asymptotic(0.9, tau, SUPERPOSITION_VAR_P2).unwrap() - p).abs() < 1e-9 * p);
    // At τ_1 the generator reduces to τ_1(P² + ξX²)/(4ξ), so the exact QFI
    // is the asymptotic one with Var[P²] replaced by Var[P² + ξX²].
    for lambda in [0.9, 0.95, 0.99] {
        let tau = tau_1(lambda).unwrap();
        let state = sup(lambda);
        let exact = qfi_exact(lambda, tau, &state).unwrap();
        let xi = 1.0 - lambda * lambda;
        let gd = generator_decomposition(lambda, state.space().dim()).unwrap();
        let full = gd.h0.add(&gd.h1.scale(xi)).unwrap().scale(2.0);
        let v = comsense_core::fock::variance(&full, &state).unwrap();
        let asym = qfi_asymptotic(lambda, tau, SUPERPOSITION_VAR_P2).unwrap();
        println!("lambda {lambda}: exact/asymptotic {}", exact / asym);
        assert!((exact / asym - v / 1.25).abs() < 1e-8);
    }
    // O(s⁶) start.
    let r = qfi_asymptotic(0.9, 2e-3, 1.25).unwrap() / qfi_asymptotic(0.9, 1e-3, 1.25).unwrap();
    assert!((r - 64.0).abs() < 1e-3);
}

#[test]
fn var_d_and_var_p2_gap_closes_near_critical_point() {
    let gap = |lambda: f64| {
        let state = sup(lambda);
        (var_d(lambda, &state).unwrap() - var_p2(&state).unwrap()).abs()
    };
    assert!(gap(0.99) < gap(0.9));
    assert!((var_p2(&sup(0.5)).unwrap() - 1.25).abs() < 1e-12);
}

#[test]
fn cfi_normalization_and_step_halving() {
    let lambda = 0.9;
    let s = tau_1(lambda).unwrap();
    let state = sup(lambda);
    let stencil = LambdaStencil::new(lambda, DEFAULT_DLAMBDA, &state).unwrap();
    let states = stencil.states(s).unwrap();
    let grid = stencil.default_grid(&states).unwrap();
    let density: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| comsense_core::fock::position_amplitude(&states.center, x).unwrap().norm_sqr())
        .collect();
    let mass = comsense_core::linalg::trapezoid(&density, grid.step);
    assert!((mass - 1.0).abs() < 1e-6);
    let a = stencil.cfi(&states, &grid).unwrap();
    let b = stencil.cfi(&states, &grid.halved()).unwrap();
    assert!((a - b).abs() < 1e-3 * b);
    let q = qfi_exact(lambda, s, &state).unwrap();
    let e = stencil.error_propagation(&states).unwrap();
    check_ordering(s, q, a, e).unwrap();
}

#[test]
fn error_propagation_peaks() {
    let lambda: f64 = 0.9;
    let big = 4.0 * (1.0 - lambda * lambda);
    let pi2 = std::f64::consts::PI.powi(2);
    let tau = tau_1(lambda).unwrap();
    let sup_closed = 32.0 * lambda * lambda * pi2 / big.powi(3);
    assert!((sup_closed - 582.76).abs() < 0.01);
    let a = error_propagation(lambda, tau, StateKind::Superposition, ErrorPropagationPath::Analytic).unwrap();
    assert!((a - sup_closed).abs() < 1e-3 * sup_closed);
    let n = error_propagation(lambda, tau, StateKind::Superposition, ErrorPropagationPath::Numeric { cutoff: None })
        .unwrap();
    assert!((n - sup_closed).abs() < 1e-2 * sup_closed);
    let a2 = error_propagation(lambda, 2.0 * tau, StateKind::Superposition, ErrorPropagationPath::Analytic).unwrap();
    assert!((a2 / a - 4.0).abs() < 1e-3);

    let coh = StateKind::Coherent(Complex64::new(0.0, 2.0));
    let printed_closed = 64.0 * pi2 * lambda * lambda / big.powi(3) * 4.0;
    assert!((printed_closed - 4662.2).abs() < 0.1);
    let printed = error_propagation(lambda, tau, coh, ErrorPropagationPath::AnalyticAsPrinted).unwrap();
    assert!((printed - printed_closed).abs() < 1e-3 * printed_closed);
    // The Heisenberg-consistent forms and exact propagation agree with each
    // other at four times the printed value.
    let heis = error_propagation(lambda, tau, coh, ErrorPropagationPath::Analytic).unwrap();
    let numeric = error_propagation(lambda, tau, coh, ErrorPropagationPath::Numeric { cutoff: None }).unwrap();
    assert!((heis - 4.0 * printed_closed).abs() < 1e-3 * heis);
    assert!((numeric - heis).abs() < 1e-2 * heis);

    let real = StateKind::Coherent(Complex64::new(1.5, 0.0));
    let r = error_propagation(lambda, tau, real, ErrorPropagationPath::Analytic).unwrap();
    assert!(r < 1e-20);
}

#[test]
fn series_ordering_and_peaks() {
    let lambda = 0.9;
    let tau = tau_1(lambda).unwrap();
    let times: Vec<f64> = (0..50).map(|k| 2.0 * tau * k as f64 / 49.0).collect();
    let series = metrology_series(lambda, &times, StateKind::Superposition, None).unwrap();
    for (k, &s) in times.iter().enumerate() {
        check_ordering(s, series.qfi_exact[k], series.cfi[k], series.err_prop[k]).unwrap();
    }
    let peaks = find_peaks(&series.times, &series.err_prop).unwrap();
    assert!(!peaks.is_empty());
    let step = times[1] - times[0];
    assert!((peaks[0].time - tau).abs() <= step);
}

#[test]
fn coherent_series_ordering() {
    let lambda = 0.8;
    let tau = tau_1(lambda).unwrap();
    let times: Vec<f64> = (1..8).map(|k| tau * k as f64 / 4.0).collect();
    let kind = StateKind::Coherent(Complex64::new(0.5, 1.0));
    metrology_series(lambda, &times, kind, None).unwrap();
}

#[test]
fn coherent_qfi_two_routes() {
    let lambda = 0.8;
    let kind = StateKind::Coherent(Complex64::new(0.3, -0.7));
    let state = coherent_state(Complex64::new(0.3, -0.7), recommended_cutoff(lambda + 1e-5, kind).unwrap()).unwrap();
    let s = 1.3;
    let b = qfi_exact_breakdown(lambda, s, &state).unwrap();
    let n = qfi_numeric(lambda, s, &state, DEFAULT_DLAMBDA).unwrap();
    assert!((n - b.direct).abs() <= 1e-3 * b.direct);
}

#[test]
fn unstable_coupling_rejected() {
    let state = superposition_state(30).unwrap();
    assert!(qfi_exact(1.0, 1.0, &state).is_err());
    assert!(metrology_series(1.2, &[0.0, 1.0], StateKind::Superposition, None).is_err());
}

#[test]
fn qfi_direct_matches_generator_matrix() {
    let lambda = 0.85;
    let state = sup(lambda);
    let moments = QfiMoments::new(lambda, &state).unwrap();
    let gd = generator_decomposition(lambda, state.space().dim()).unwrap();
    for s in [0.4, 1.7, 5.0] {
        let h = h_generator(&gd, s).unwrap();
        let via_matrix = 16.0 * lambda * lambda * comsense_core::fock::variance(&h, &state).unwrap();
        let b = moments.breakdown(s).unwrap();
        assert!((b.direct - via_matrix).abs() <= 1e-9 * via_matrix, "{} vs {via_matrix}", b.direct);
        assert_eq!(moments.qfi(s).unwrap(), qfi_exact(lambda, s, &state).unwrap());
    }
}
