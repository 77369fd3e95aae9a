// Each integration-test binary compiles this module and uses its own subset.
#![allow(dead_code)]

//! Shared helpers for the integration tests: independent time-domain
//! integrators used as oracles for the spectral evolution routines, plus
//! interpolation between the oracle's uniform grid and quadrature grids.

use num_complex::Complex64;

/// Uniform-grid samples of a PDE solution.
pub struct UniformSolution {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

impl UniformSolution {
    /// Four-point Lagrange interpolation (O(dx⁴) for smooth data); clamps
    /// to the boundary stencil near the ends.
    pub fn interp(&self, x: f64) -> Complex64 {
        let n = self.values.len();
        let s = (x - self.x0) / self.dx;
        let j = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut out = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (s - (j + b) as f64) / ((j + a) as f64 - (j + b) as f64);
                }
            }
            out += w * self.values[j + a];
        }
        out
    }
}

/// Thomas solve for a constant-coefficient complex tridiagonal system
/// (sub, diag, super are the three bands; rhs is overwritten in place).
fn solve_tridiag(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &mut [Complex64],
) {
    let n = diag.len();
    let mut cp = vec![Complex64::new(0.0, 0.0); n];
    cp[0] = sup[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - cp[i] * rhs[i + 1];
    }
}

/// Crank–Nicolson integrator for i∂t u = −u″ + V u on [a, b] with Dirichlet
/// ends, using the Numerov compact correction so the spatial error is
/// O(dx⁴) while the system stays tridiagonal:
///
///   (B ± i(dt/2)(−D + B·diag(V))) with D the second-difference operator
///   and B = I + (dx²/12) D.
///
/// Returns the solution after `steps` steps of size `dt`.
pub fn crank_nicolson_schrodinger(
    v: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    dx: f64,
    dt: f64,
    steps: usize,
    init: impl Fn(f64) -> Complex64,
) -> UniformSolution {
    let n = ((b - a) / dx).round() as usize; // nodes 0..=n, interior 1..n-1
    let xs: Vec<f64> = (0..=n).map(|j| a + j as f64 * dx).collect();
    let m = n - 1; // interior unknowns
    let vv: Vec<f64> = (1..n).map(|j| v(xs[j])).collect();

    // bands of −D + B·diag(V) over the interior (Dirichlet: boundary terms
    // drop since u vanishes there)
    let idx2 = 1.0 / (dx * dx);
    let mut h_sub = vec![Complex64::new(0.0, 0.0); m];
    let mut h_diag = vec![Complex64::new(0.0, 0.0); m];
    let mut h_sup = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        h_diag[i] = Complex64::new(2.0 * idx2 + 5.0 / 6.0 * vv[i], 0.0);
        if i > 0 {
            h_sub[i] = Complex64::new(-idx2 + vv[i - 1] / 12.0, 0.0);
        }
        if i + 1 < m {
            h_sup[i] = Complex64::new(-idx2 + vv[i + 1] / 12.0, 0.0);
        }
    }
    // B bands
    let b_off = 1.0 / 12.0;
    let b_diag = 5.0 / 6.0;

    let half = Complex64::new(0.0, dt / 2.0);
    let mk = |sgn: f64| -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let mut s = vec![Complex64::new(0.0, 0.0); m];
        let mut d = vec![Complex64::new(0.0, 0.0); m];
        let mut p = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            d[i] = Complex64::new(b_diag, 0.0) + sgn * half * h_diag[i];
            if i > 0 {
                s[i] = Complex64::new(b_off, 0.0) + sgn * half * h_sub[i];
            }
            if i + 1 < m {
                p[i] = Complex64::new(b_off, 0.0) + sgn * half * h_sup[i];
            }
        }
        (s, d, p)
    };
    let (l_sub, l_diag, l_sup) = mk(1.0);
    let (r_sub, r_diag, r_sup) = mk(-1.0);

    let mut u: Vec<Complex64> = (1..n).map(|j| init(xs[j])).collect();
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    for _ in 0..steps {
        for i in 0..m {
            rhs[i] = r_diag[i] * u[i];
            if i > 0 {
                rhs[i] += r_sub[i] * u[i - 1];
            }
            if i + 1 < m {
                rhs[i] += r_sup[i] * u[i + 1];
            }
        }
        solve_tridiag(&l_sub, &l_diag, &l_sup, &mut rhs);
        std::mem::swap(&mut u, &mut rhs);
    }
    let mut values = vec![Complex64::new(0.0, 0.0)];
    values.extend(u);
    values.push(Complex64::new(0.0, 0.0));
    UniformSolution { x0: a, dx, values }
}

/// Strang split-step integrator for the Dirac system
/// i∂t y = [[−i∂x, V], [V̄, i∂x]] y on a uniform grid with dt = dx, so the
/// free half-step is an exact one-node shift (y₁ moves right, y₂ moves
/// left) and the potential kick is the closed-form 2×2 unitary
/// e^{−iτ[[0,V],[V̄,0]]} = cos(|V|τ) I − i sin(|V|τ)/|V| [[0,V],[V̄,0]].
/// Inflow boundaries are fed zeros; the caller keeps the packet inside.
pub fn split_step_dirac(
    v: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    dx: f64,
    steps: usize,
    init: impl Fn(f64) -> [Complex64; 2],
) -> UniformSolution2 {
    let n = ((b - a) / dx).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|j| a + j as f64 * dx).collect();
    let kick: Vec<[Complex64; 4]> = xs
        .iter()
        .map(|&x| {
            let vx = v(x);
            let r = vx.norm();
            let tau = dx / 2.0;
            if r < 1e-300 {
                return [
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ];
            }
            let c = Complex64::new((r * tau).cos(), 0.0);
            let s = -Complex64::i() * (r * tau).sin() / r;
            [c, s * vx, s * vx.conj(), c]
        })
        .collect();
    let mut y1: Vec<Complex64> = xs.iter().map(|&x| init(x)[0]).collect();
    let mut y2: Vec<Complex64> = xs.iter().map(|&x| init(x)[1]).collect();
    let apply_kick = |y1: &mut [Complex64], y2: &mut [Complex64]| {
        for j in 0..=n {
            let (a1, a2) = (y1[j], y2[j]);
            y1[j] = kick[j][0] * a1 + kick[j][1] * a2;
            y2[j] = kick[j][2] * a1 + kick[j][3] * a2;
        }
    };
    for _ in 0..steps {
        apply_kick(&mut y1, &mut y2);
        // exact free transport by one node
        for j in (1..=n).rev() {
            y1[j] = y1[j - 1];
        }
        y1[0] = Complex64::new(0.0, 0.0);
        for j in 0..n {
            y2[j] = y2[j + 1];
        }
        y2[n] = Complex64::new(0.0, 0.0);
        apply_kick(&mut y1, &mut y2);
    }
    UniformSolution2 {
        x0: a,
        dx,
        y1,
        y2,
    }
}

/// Two-component uniform-grid solution.
pub struct UniformSolution2 {
    pub x0: f64,
    pub dx: f64,
    pub y1: Vec<Complex64>,
    pub y2: Vec<Complex64>,
}

impl UniformSolution2 {
    pub fn interp(&self, x: f64) -> [Complex64; 2] {
        let comp = |vals: &Vec<Complex64>| {
            UniformSolution {
                x0: self.x0,
                dx: self.dx,
                values: vals.clone(),
            }
            .interp(x)
        };
        [comp(&self.y1), comp(&self.y2)]
    }
}

/// Free evolution of the Gaussian packet e^{−α(x−x0)²} e^{ikx}:
/// ψ(x, t) = (1 + 4iαt)^{−1/2} exp(−α(x−x0−2kt)²/(1+4iαt)) e^{ikx − ik²t}
/// with the Gaussian factor evaluated as exp(−αc²/(1+4iαt)), c = x−x0−2kt.
pub fn free_gaussian(x: f64, t: f64, x0: f64, alpha: f64, k: f64) -> Complex64 {
    let beta = Complex64::new(1.0, 4.0 * alpha * t);
    let c = x - x0 - 2.0 * k * t;
    let amp = beta.sqrt().inv();
    amp * (-alpha * c * c / beta + Complex64::new(0.0, k * x - k * k * t)).exp()
}

/// The Dirichlet-compatible packet used across the evolution tests:
/// Gaussian minus its odd mirror image, so the value at x = 0 vanishes.
pub fn dirichlet_gaussian(x: f64, x0: f64, alpha: f64, k: f64) -> Complex64 {
    let direct = (-alpha * (x - x0) * (x - x0)).exp() * Complex64::new(0.0, k * x).exp();
    let mirror = (-alpha * (x + x0) * (x + x0)).exp() * Complex64::new(0.0, -k * x).exp();
    direct - mirror
}
