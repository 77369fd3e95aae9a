//! The spectral-synthesis evolution e^{−itH_V} is checked against an
//! independent time-domain integrator (Crank–Nicolson with the Numerov
//! compact correction) on compactly supported potentials, half line and
//! whole line.

mod common;

use common::{crank_nicolson_schrodinger, dirichlet_gaussian, free_gaussian};
use num_complex::Complex64;
use scatter1d::eigen::EigenConfig;
use scatter1d::potential::make_bump;
use scatter1d::quad::WeightedGrid;
use scatter1d::spectral::{build_psi, evolve_v};
use scatter1d::waveop::{build_psi_wholeline, evolve_v_wholeline};

// Packet: spectrally concentrated near |λ| = 1.2 with width √(2α) = 0.2, so
// the band [0.3, 2.2] captures it to Gaussian-tail accuracy.
const X0: f64 = 30.0;
const ALPHA: f64 = 0.02;
const K0: f64 = -1.2;

const DX: f64 = 0.01;
const DT: f64 = 5e-4;

/// The time-domain scheme itself is validated against the closed-form free
/// Gaussian before it is trusted as an oracle.
#[test]
fn crank_nicolson_matches_free_closed_form() {
    let t = 1.0;
    let steps = (t / DT).round() as usize;
    let sol = crank_nicolson_schrodinger(
        |_| 0.0,
        0.0,
        80.0,
        DX,
        DT,
        steps,
        |x| dirichlet_gaussian(x, X0, ALPHA, K0),
    );
    let mut worst = 0.0f64;
    for j in (0..sol.values.len()).step_by(37) {
        let x = sol.x0 + j as f64 * sol.dx;
        let exact = free_gaussian(x, t, X0, ALPHA, K0) - free_gaussian(x, t, -X0, ALPHA, -K0);
        worst = worst.max((sol.values[j] - exact).norm());
    }
    assert!(worst < 2e-5, "scheme error vs closed form: {worst}");
}

#[test]
fn halfline_evolution_matches_time_domain_integrator() {
    let p = make_bump(0.3, 10.0, 14.0);
    let cfg = EigenConfig::default();
    let xg = WeightedGrid::gauss_panels(0.0, 80.0, 100);
    let lg = WeightedGrid::gauss_panels(0.3, 2.2, 60);
    let table = build_psi(&p, &lg, &xg, &cfg).unwrap();
    let gx: Vec<Complex64> = xg
        .points
        .iter()
        .map(|&x| dirichlet_gaussian(x, X0, ALPHA, K0))
        .collect();
    for &t in &[1.0, 5.0] {
        let ev = evolve_v(&table, &gx, t).unwrap();
        assert!(!ev.beyond_horizon);
        let steps = (t / DT).round() as usize;
        let oracle = crank_nicolson_schrodinger(
            |x| p.eval(x).unwrap(),
            0.0,
            80.0,
            DX,
            DT,
            steps,
            |x| dirichlet_gaussian(x, X0, ALPHA, K0),
        );
        let mut worst = 0.0f64;
        for (j, &x) in xg.points.iter().enumerate() {
            worst = worst.max((ev.values[j] - oracle.interp(x)).norm());
        }
        assert!(worst < 1e-4, "t = {t}: sup gap vs PDE oracle {worst}");
    }
}

#[test]
fn wholeline_evolution_matches_time_domain_integrator() {
    let p = make_bump(0.3, 0.0, 4.0);
    let cfg = EigenConfig::default();
    let xg = WeightedGrid::gauss_panels(-40.0, 60.0, 100);
    let lg = WeightedGrid::gauss_panels(0.3, 2.2, 60);
    let table = build_psi_wholeline(&p, &lg, &xg, &cfg).unwrap();
    let packet = |x: f64| -> Complex64 {
        (-ALPHA * (x - 20.0) * (x - 20.0)).exp() * Complex64::new(0.0, K0 * x).exp()
    };
    let gx: Vec<Complex64> = xg.points.iter().map(|&x| packet(x)).collect();
    for &t in &[1.0, 5.0] {
        let ev = evolve_v_wholeline(&table, &gx, t).unwrap();
        assert!(!ev.beyond_horizon);
        let steps = (t / DT).round() as usize;
        let oracle = crank_nicolson_schrodinger(
            |x| p.eval(x).unwrap(),
            -50.0,
            70.0,
            DX,
            DT,
            steps,
            packet,
        );
        let mut worst = 0.0f64;
        for (j, &x) in xg.points.iter().enumerate() {
            worst = worst.max((ev.values[j] - oracle.interp(x)).norm());
        }
        assert!(worst < 1e-4, "t = {t}: sup gap vs PDE oracle {worst}");
    }
}
