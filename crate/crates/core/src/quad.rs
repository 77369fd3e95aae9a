//! Adaptive quadrature and fixed-grid integration helpers shared by every module.
//!
//! The workhorse is a 15-point Gauss–Kronrod rule driven by interval bisection
//! with an absolute-error budget. Complex integrands are handled natively since
//! almost everything downstream carries an oscillatory phase.

use num_complex::Complex64;

/// Kronrod abscissae (positive half) for the 7-15 pair.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Embedded 7-point Gauss weights (indices 1, 3, 5, 7 of `XGK`).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub converged: bool,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fl, fr) = if x == 0.0 {
            let v = f(c);
            (v, Complex64::new(0.0, 0.0))
        } else {
            (f(c - h * x), f(c + h * x))
        };
        let s = fl + fr;
        kron += wk * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).norm();
    (value, err)
}

/// Adaptive Gauss–Kronrod integration of a complex-valued integrand to an
/// absolute tolerance. Subdivision is depth-limited; when the budget runs out
/// the result is returned with `converged = false` rather than panicking, so
/// that sweeps over potential families can keep going.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    if a == b {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            converged: true,
        };
    }
    // stack of (a, b, value, err)
    let (v0, e0) = gk15(&f, a, b);
    let mut stack = vec![(a, b, v0, e0, 0u32)];
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_error = 0.0;
    let mut converged = true;
    const MAX_DEPTH: u32 = 48;
    const MAX_INTERVALS: usize = 200_000;
    let mut processed = 0usize;
    while let Some((ia, ib, iv, ie, depth)) = stack.pop() {
        processed += 1;
        let local_tol = tol * ((ib - ia) / (b - a)).abs().max(1e-300);
        if ie <= local_tol.max(1e-15 * iv.norm()) || depth >= MAX_DEPTH || processed > MAX_INTERVALS
        {
            if ie > local_tol && !(ie <= 1e-13 * iv.norm().max(1.0)) {
                converged = false;
            }
            value += iv;
            abs_error += ie;
            continue;
        }
        let mid = 0.5 * (ia + ib);
        let (vl, el) = gk15(&f, ia, mid);
        let (vr, er) = gk15(&f, mid, ib);
        stack.push((ia, mid, vl, el, depth + 1));
        stack.push((mid, ib, vr, er, depth + 1));
    }
    QuadResult {
        value,
        abs_error,
        converged,
    }
}

/// Real-valued adaptive integral (thin wrapper over [`integrate`]).
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, tol)
}

/// Composite Simpson on a uniform grid of sampled values. Handles an odd
/// number of intervals by a 3/8 rule on the final block.
pub fn simpson_uniform(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    if n == 2 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let intervals = n - 1;
    let mut total = Complex64::new(0.0, 0.0);
    let even_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= even_end {
        total += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        i += 2;
    }
    if intervals % 2 != 0 {
        // 3/8 rule on the last three intervals
        let m = n - 4;
        total += 3.0 * h / 8.0 * (values[m] + 3.0 * values[m + 1] + 3.0 * values[m + 2] + values[m + 3]);
    }
    total
}

/// Simpson weights for a uniform grid, used where an inner product against
/// sampled data is needed rather than a one-off integral.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let intervals = n - 1;
    let even_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= even_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if intervals % 2 != 0 {
        let m = n - 4;
        w[m] += 3.0 * h / 8.0;
        w[m + 1] += 9.0 * h / 8.0;
        w[m + 2] += 9.0 * h / 8.0;
        w[m + 3] += 3.0 * h / 8.0;
    }
    w
}

/// A quadrature grid: points with matching weights. Used for spectral (λ)
/// integrals where composite Gauss panels resolve long-range oscillation far
/// more efficiently than uniform sampling.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// 8-point Gauss–Legendre nodes/weights on [-1, 1] (positive half; symmetric).
const GL8_X: [f64; 4] = [
    0.183434642495650,
    0.525532409916329,
    0.796666477413627,
    0.960289856497536,
];
const GL8_W: [f64; 4] = [
    0.362683783378362,
    0.313706645877887,
    0.222381034453374,
    0.101228536290376,
];

impl WeightedGrid {
    /// Composite 8-point Gauss–Legendre grid with `panels` equal panels on [a, b].
    pub fn gauss_panels(a: f64, b: f64, panels: usize) -> Self {
        let mut points = Vec::with_capacity(panels * 8);
        let mut weights = Vec::with_capacity(panels * 8);
        let w = (b - a) / panels as f64;
        for p in 0..panels {
            let pa = a + p as f64 * w;
            let c = pa + 0.5 * w;
            let h = 0.5 * w;
            let mut local: Vec<(f64, f64)> = Vec::with_capacity(8);
            for k in 0..4 {
                local.push((c - h * GL8_X[k], h * GL8_W[k]));
                local.push((c + h * GL8_X[k], h * GL8_W[k]));
            }
            local.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            for (x, ww) in local {
                points.push(x);
                weights.push(ww);
            }
        }
        WeightedGrid { points, weights }
    }

    /// Uniform grid with Simpson weights.
    pub fn simpson(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2);
        let h = (b - a) / (n - 1) as f64;
        let points = (0..n).map(|i| a + i as f64 * h).collect();
        let weights = simpson_weights(n, h);
        WeightedGrid { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(values.iter())
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// Cumulative integral of uniformly sampled values, accumulated from the right
/// end: output[i] = ∫_{x_i}^{x_end} f. Fourth-order Gregory-type end corrections
/// keep the global error at O(h^4), which matters for the eigenfunction series.
pub fn cumulative_from_right(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in (0..n - 1).rev() {
            out[i] = out[i + 1] + 0.5 * h * (values[i] + values[i + 1]);
        }
        return out;
    }
    for i in (0..n - 1).rev() {
        // Adams–Moulton style 4-point panel: ∫_{x_i}^{x_{i+1}} f using the
        // stencil {i, i+1, i+2, i+3}, falling back to the mirrored stencil at
        // the right edge.
        let panel = if i + 3 < n {
            h / 24.0 * (9.0 * values[i] + 19.0 * values[i + 1] - 5.0 * values[i + 2] + values[i + 3])
        } else {
            let m = n - 4;
            // mirrored stencil {m, m+1, m+2, m+3} integrating [x_i, x_{i+1}]
            let t0 = (i - m) as f64;
            integrate_cubic_through(values[m], values[m + 1], values[m + 2], values[m + 3], t0, t0 + 1.0) * h
        };
        out[i] = out[i + 1] + panel;
    }
    out
}

/// Integral over [t0, t1] (in units of h, relative to node m) of the cubic
/// interpolant through four consecutive samples.
fn integrate_cubic_through(
    f0: Complex64,
    f1: Complex64,
    f2: Complex64,
    f3: Complex64,
    t0: f64,
    t1: f64,
) -> Complex64 {
    // Lagrange basis on nodes t = 0, 1, 2, 3; antiderivatives evaluated exactly.
    let p = |t: f64| {
        let l0 = ((t - 1.0) * (t - 2.0) * (t - 3.0)) / -6.0;
        let l1 = (t * (t - 2.0) * (t - 3.0)) / 2.0;
        let l2 = (t * (t - 1.0) * (t - 3.0)) / -2.0;
        let l3 = (t * (t - 1.0) * (t - 2.0)) / 6.0;
        f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3
    };
    // 4-point Gauss–Legendre on [t0, t1] is exact for cubics.
    let c = 0.5 * (t0 + t1);
    let hh = 0.5 * (t1 - t0);
    const X2: [f64; 2] = [0.339981043584856, 0.861136311594053];
    const W2: [f64; 2] = [0.652145154862546, 0.347854845137454];
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..2 {
        s += W2[k] * (p(c - hh * X2[k]) + p(c + hh * X2[k]));
    }
    s * hh
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let r = integrate_real(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((r.value.re - 8.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn oscillatory_integral() {
        // ∫_0^{10π} sin x dx = 0
        let r = integrate_real(|x| x.sin(), 0.0, 10.0 * std::f64::consts::PI, 1e-12);
        assert!(r.value.re.abs() < 1e-10);
    }

    #[test]
    fn complex_phase_integral() {
        // ∫_0^1 e^{2ix} dx = (e^{2i} - 1) / (2i)
        let r = integrate(|x| Complex64::new(0.0, 2.0 * x).exp(), 0.0, 1.0, 1e-13);
        let exact = (Complex64::new(0.0, 2.0).exp() - 1.0) / Complex64::new(0.0, 2.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn simpson_matches_closed_form() {
        let n = 1001;
        let h = 1.0 / (n - 1) as f64;
        let vals: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * h).exp(), 0.0))
            .collect();
        let s = simpson_uniform(&vals, h);
        assert!((s.re - (1f64.exp() - 1.0)).abs() < 1e-10);
        // weights route agrees
        let w = simpson_weights(n, h);
        let s2: Complex64 = w.iter().zip(vals.iter()).map(|(w, v)| w * v).sum();
        assert!((s - s2).norm() < 1e-14);
    }

    #[test]
    fn cumulative_right_fourth_order() {
        let n = 2001;
        let h = 4.0 / (n - 1) as f64;
        let vals: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((2.0 * (i as f64 * h)).cos(), 0.0))
            .collect();
        let cum = cumulative_from_right(&vals, h);
        // ∫_x^4 cos 2t dt = (sin 8 - sin 2x)/2
        for (i, c) in cum.iter().enumerate().step_by(100) {
            let x = i as f64 * h;
            let exact = ((8.0f64).sin() - (2.0 * x).sin()) / 2.0;
            assert!(
                (c.re - exact).abs() < 1e-10,
                "x={x} err={}",
                (c.re - exact).abs()
            );
        }
    }

    #[test]
    fn gauss_panels_oscillatory() {
        // ∫_0^1 e^{i 50 x} dx with modest panel count
        let g = WeightedGrid::gauss_panels(0.0, 1.0, 20);
        let vals: Vec<Complex64> = g
            .points
            .iter()
            .map(|&x| Complex64::new(0.0, 50.0 * x).exp())
            .collect();
        let s = g.integrate(&vals);
        let exact = (Complex64::new(0.0, 50.0).exp() - 1.0) / Complex64::new(0.0, 50.0);
        assert!((s - exact).norm() < 1e-12);
    }
}
