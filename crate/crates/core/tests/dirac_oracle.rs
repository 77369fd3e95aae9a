//! The Dirac spectral evolution is checked against an independent split-step
//! time-domain integrator on a compactly supported coupling. The split-step
//! scheme transports each channel exactly (the free Dirac flow is a rigid
//! shift at speed ±1) and applies the closed-form 2×2 potential kick, so its
//! only error is the O(dt²) Strang splitting defect.

mod common;

use common::split_step_dirac;
use num_complex::Complex64;
use scatter1d::dirac::{dirac_evolve, rotate, unrotate, Coupling, EtaTable};
use scatter1d::quad::WeightedGrid;

const X0: f64 = -14.0;
const ALPHA: f64 = 0.05;
const K0: f64 = 2.0;
const DX: f64 = 0.0025;

/// Right-moving packet in the rotated representation: (1, i)·Gaussian·e^{iK0x}.
fn packet(x: f64) -> [Complex64; 2] {
    let a = (-ALPHA * (x - X0) * (x - X0)).exp() * Complex64::new(0.0, K0 * x).exp();
    [a, Complex64::i() * a]
}

/// Smooth compactly supported coupling: q = 0.4 cos²(π(x−1)/2) on [0, 2].
fn coupling() -> Coupling {
    Coupling::new(
        |x| {
            if (0.0..=2.0).contains(&x) {
                let c = (std::f64::consts::FRAC_PI_2 * (x - 1.0)).cos();
                Complex64::new(0.4 * c * c, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        Some((0.0, 2.0)),
    )
}

#[test]
fn split_step_free_case_is_exact_transport() {
    let t = 4.0;
    let steps = (t / DX).round() as usize;
    let sol = split_step_dirac(
        |_| Complex64::new(0.0, 0.0),
        -45.0,
        25.0,
        DX,
        steps,
        |x| unrotate(packet(x)),
    );
    let mut worst = 0.0f64;
    for j in (0..sol.y1.len()).step_by(53) {
        let x = sol.x0 + j as f64 * sol.dx;
        let expect = unrotate(packet(x - t));
        worst = worst
            .max((sol.y1[j] - expect[0]).norm())
            .max((sol.y2[j] - expect[1]).norm());
    }
    assert!(worst < 1e-12, "free transport defect {worst}");
}

#[test]
fn dirac_evolution_matches_split_step_integrator() {
    let q = coupling();
    let eg = WeightedGrid::gauss_panels(K0 - 1.6, K0 + 1.6, 110);
    let xg = WeightedGrid::gauss_panels(-45.0, 25.0, 70);
    let table = EtaTable::build(&q, eg, xg.clone(), 1e-12).unwrap();
    let g: Vec<[Complex64; 2]> = xg.points.iter().map(|&x| packet(x)).collect();
    let v = {
        let q = coupling();
        move |x: f64| q.v(x)
    };
    for &t in &[2.0, 5.0] {
        let ev = dirac_evolve(&table, &g, t).unwrap();
        assert!(!ev.beyond_horizon);
        let steps = (t / DX).round() as usize;
        let oracle = split_step_dirac(&v, -45.0, 25.0, DX, steps, |x| unrotate(packet(x)));
        let mut worst = 0.0f64;
        for (j, &x) in xg.points.iter().enumerate() {
            let reference = rotate(oracle.interp(x));
            worst = worst
                .max((ev.values[j][0] - reference[0]).norm())
                .max((ev.values[j][1] - reference[1]).norm());
        }
        assert!(worst < 1e-4, "t = {t}: sup gap vs PDE oracle {worst}");
    }
}
