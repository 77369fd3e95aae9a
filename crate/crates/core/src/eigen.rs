//! Generalized eigenfunctions of −u″ + Vu = zu: WKB phases, the iterated
//! series solution, an adaptive ODE oracle, the Weyl m-function and
//! nontangential boundary limits.

use num_complex::Complex64;
use serde::Serialize;

use crate::ode;
use crate::potential::Potential;
use crate::quad;

#[derive(Debug, thiserror::Error)]
pub enum EigenError {
    #[error("spectral parameter {0} lies outside C+ ∪ R+")]
    OutsideDomain(Complex64),
    #[error("|√z| = {0} below the small-λ floor {1}")]
    BelowLambdaFloor(f64, f64),
    #[error("potential evaluation failed: {0}")]
    Potential(#[from] crate::potential::PotentialError),
    #[error("ODE integration failed: {0}")]
    Ode(#[from] ode::OdeError),
    #[error("series did not converge: per-term sup norms not decreasing near N={0}")]
    NonConvergentSeries(usize),
    #[error("solutions live on different grids or spectral parameters")]
    GridMismatch,
    #[error("empty or non-monotone output grid")]
    BadGrid,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenConfig {
    pub quad_tol: f64,
    pub ode_tol: f64,
    /// series truncation cap
    pub series_max: usize,
    /// small-λ exclusion floor ρ
    pub lambda_floor: f64,
    /// ∫_X^∞|V| threshold fixing the far-field truncation X_max
    pub tail_tol: f64,
    pub x_max_cap: f64,
    /// target phase increment |2ζ|·h of the internal series mesh
    pub mesh_phase_step: f64,
    pub mesh_max_nodes: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            quad_tol: 1e-10,
            ode_tol: 1e-12,
            series_max: 16,
            lambda_floor: 0.1,
            tail_tol: 1e-8,
            x_max_cap: 1e4,
            mesh_phase_step: 0.05,
            mesh_max_nodes: 2_000_000,
        }
    }
}

// ---------------------------------------------------------------------------
// Spectral parameter and branch of the square root
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub z: Complex64,
    /// ζ = √z with Im ζ ≥ 0
    pub zeta: Complex64,
    pub on_real_axis: bool,
}

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self, EigenError> {
        let zeta = sqrt_branch(z)?;
        Ok(SpectralParameter {
            z,
            zeta,
            on_real_axis: z.im == 0.0,
        })
    }
}

/// √z with Im √z ≥ 0, continuous on C⁺ and on R⁺ from above; the negative
/// real axis (and 0) is excluded.
pub fn sqrt_branch(z: Complex64) -> Result<Complex64, EigenError> {
    if z.im < 0.0 || (z.im == 0.0 && z.re <= 0.0) {
        return Err(EigenError::OutsideDomain(z));
    }
    let zeta = z.sqrt(); // principal root: Im ≥ 0 exactly on C+ ∪ R+
    Ok(zeta)
}

// ---------------------------------------------------------------------------
// Phases
// ---------------------------------------------------------------------------

/// ξ(x, z) = √z·x − (2√z)^{−1} ∫_0^x V.
pub fn phase_xi(
    p: &Potential,
    x: f64,
    z: Complex64,
    cfg: &EigenConfig,
) -> Result<Complex64, EigenError> {
    let sp = SpectralParameter::new(z)?;
    if sp.zeta.norm() < cfg.lambda_floor {
        return Err(EigenError::BelowLambdaFloor(sp.zeta.norm(), cfg.lambda_floor));
    }
    let q = p.cumulative(x)?;
    Ok(sp.zeta * x - q / (2.0 * sp.zeta))
}

// ---------------------------------------------------------------------------
// Eigen solutions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Normalization {
    /// u − e^{iξ} → 0 as x → +∞
    Wkb,
    /// prescribed (u, u′) at the left end of the range
    InitialData,
    /// boundary-condition-β pairing at the origin
    BoundaryBeta(f64),
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub grid: Vec<f64>,
    pub u: Vec<Complex64>,
    pub du: Vec<Complex64>,
    pub z: Complex64,
    pub normalization: Normalization,
}

impl EigenSolution {
    /// Max over interior nodes of the centered-second-difference residual of
    /// −u″ + (V−z)u, relative to the sup of |u|. Meaningful on (nearly)
    /// uniform grids; the stencil itself carries an O(h²) truncation error.
    pub fn residual_max(&self, p: &Potential) -> Result<f64, EigenError> {
        let n = self.grid.len();
        if n < 3 {
            return Ok(0.0);
        }
        let scale = self.u.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        let mut worst: f64 = 0.0;
        for k in 1..n - 1 {
            let hl = self.grid[k] - self.grid[k - 1];
            let hr = self.grid[k + 1] - self.grid[k];
            // nonuniform central second difference
            let upp = 2.0
                * (self.u[k - 1] * hr - self.u[k] * (hl + hr) + self.u[k + 1] * hl)
                / (hl * hr * (hl + hr));
            let v = p.eval(self.grid[k])?;
            let r = -upp + (v - self.z) * self.u[k];
            worst = worst.max(r.norm());
        }
        Ok(worst / scale)
    }

    /// CSV export: x, Re u, Im u, Re u′, Im u′.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re_u,im_u,re_du,im_du")?;
        for k in 0..self.grid.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.grid[k], self.u[k].re, self.u[k].im, self.du[k].re, self.du[k].im
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WronskianReport {
    pub mean: Complex64,
    /// max node deviation from the mean, relative to mean magnitude (or
    /// absolute when the mean is ~0)
    pub max_drift: f64,
}

/// W[u, v] = u v′ − u′ v along the common grid.
pub fn wronskian(u: &EigenSolution, v: &EigenSolution) -> Result<WronskianReport, EigenError> {
    if u.grid.len() != v.grid.len()
        || u.z != v.z
        || u.grid
            .iter()
            .zip(&v.grid)
            .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
    {
        return Err(EigenError::GridMismatch);
    }
    let ws: Vec<Complex64> = (0..u.grid.len())
        .map(|k| u.u[k] * v.du[k] - u.du[k] * v.u[k])
        .collect();
    let mean = ws.iter().sum::<Complex64>() / ws.len() as f64;
    let scale = mean.norm().max(
        ws.iter().map(|w| w.norm()).fold(0.0, f64::max) * 1e-6 + 1e-300,
    );
    let max_drift = ws.iter().map(|w| (w - mean).norm()).fold(0.0, f64::max) / scale;
    Ok(WronskianReport { mean, max_drift })
}

// ---------------------------------------------------------------------------
// ODE oracle
// ---------------------------------------------------------------------------

/// Adaptive integration of u″ = (V − z)u from `start_x` with data
/// (u, u′) = `init`, sampled at `out_grid` (monotone either way; results are
/// always stored with ascending grid).
pub fn solve_ivp(
    p: &Potential,
    z: Complex64,
    init: (Complex64, Complex64),
    start_x: f64,
    out_grid: &[f64],
    tol: f64,
) -> Result<EigenSolution, EigenError> {
    if out_grid.is_empty() {
        return Err(EigenError::BadGrid);
    }
    let ascending = out_grid.windows(2).all(|w| w[0] < w[1]);
    let descending = out_grid.windows(2).all(|w| w[0] > w[1]);
    if !(ascending || descending) && out_grid.len() > 1 {
        return Err(EigenError::BadGrid);
    }
    let rhs = |x: f64, y: [Complex64; 2]| {
        let v = p.eval(x).unwrap_or(0.0);
        [y[1], (v - z) * y[0]]
    };
    let states = ode::integrate_ode(rhs, start_x, [init.0, init.1], out_grid, tol)?;
    let (grid, states): (Vec<f64>, Vec<[Complex64; 2]>) = if descending {
        (
            out_grid.iter().rev().cloned().collect(),
            states.into_iter().rev().collect(),
        )
    } else {
        (out_grid.to_vec(), states)
    };
    Ok(EigenSolution {
        grid,
        u: states.iter().map(|s| s[0]).collect(),
        du: states.iter().map(|s| s[1]).collect(),
        z,
        normalization: Normalization::InitialData,
    })
}

// ---------------------------------------------------------------------------
// Series solution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SeriesDiagnostics {
    /// number of series terms actually used (T_1 … T_{n_used})
    pub n_used: usize,
    /// sup over the mesh of |T_n|, n = 1 … n_used
    pub term_sup: Vec<f64>,
    /// upper proxy for the omitted tail (≥ first omitted term)
    pub tail_estimate: f64,
    pub converged: bool,
    /// |u − e^{iξ}| at the right end of the mesh
    pub wkb_defect: f64,
    /// far-field truncation point used
    pub x_max: f64,
}

struct SeriesMesh {
    xs: Vec<f64>,
    h: f64,
    xi: Vec<Complex64>,
    v: Vec<f64>,
}

fn build_series_mesh(
    p: &Potential,
    x_lo: f64,
    zeta: Complex64,
    cfg: &EigenConfig,
) -> Result<SeriesMesh, EigenError> {
    let x_max = p.tail_cutoff(cfg.tail_tol, cfg.x_max_cap).max(x_lo + 1.0);
    let h_target = (cfg.mesh_phase_step / (2.0 * zeta.norm())).min(0.01);
    let n = (((x_max - x_lo) / h_target).ceil() as usize).clamp(8, cfg.mesh_max_nodes);
    let h = (x_max - x_lo) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| x_lo + i as f64 * h).collect();
    let mut v = Vec::with_capacity(n + 1);
    for &x in &xs {
        v.push(p.eval(x).unwrap_or(0.0));
    }
    // cumulative ∫_0^x V, accumulated segment by segment with adaptive
    // quadrature so kinks inside segments are still resolved
    let mut q = Vec::with_capacity(n + 1);
    let mut acc = p.cumulative(x_lo)?;
    q.push(acc);
    for i in 0..n {
        acc += quad::integrate_real(|t| p.eval(t).unwrap_or(0.0), xs[i], xs[i + 1], cfg.quad_tol)
            .value
            .re;
        q.push(acc);
    }
    let xi = xs
        .iter()
        .zip(&q)
        .map(|(&x, &qx)| zeta * x - qx / (2.0 * zeta))
        .collect();
    Ok(SeriesMesh { xs, h, xi, v })
}

/// One level of the inner-to-outer recursion:
/// K_s(x_i) = ∫_{x_i}^{X} e^{2iσξ} V K_{s−1}, σ = ±1.
fn series_level(mesh: &SeriesMesh, prev: &[Complex64], sigma: f64) -> Vec<Complex64> {
    let i2 = Complex64::new(0.0, 2.0 * sigma);
    let integrand: Vec<Complex64> = (0..mesh.xs.len())
        .map(|i| (i2 * mesh.xi[i]).exp() * mesh.v[i] * prev[i])
        .collect();
    quad::cumulative_from_right(&integrand, mesh.h)
}

/// T_n(x, z): the n-fold ordered integral
/// (2√z)^{−n} ∫_{x≤t_1≤…≤t_n} Π_j e^{2i(−1)^{n−j}ξ(t_j)} V(t_j) dt, computed
/// by the level recursion on a refining mesh.
pub fn series_tn(
    p: &Potential,
    n: usize,
    x: f64,
    z: Complex64,
    cfg: &EigenConfig,
) -> Result<Complex64, EigenError> {
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sp = SpectralParameter::new(z)?;
    if sp.zeta.norm() < cfg.lambda_floor {
        return Err(EigenError::BelowLambdaFloor(sp.zeta.norm(), cfg.lambda_floor));
    }
    let mut cfg2 = *cfg;
    let mut prev_val: Option<Complex64> = None;
    loop {
        let mesh = build_series_mesh(p, x, sp.zeta, &cfg2)?;
        let mut k = vec![Complex64::new(1.0, 0.0); mesh.xs.len()];
        for s in 1..=n {
            let sigma = if s % 2 == 1 { 1.0 } else { -1.0 };
            k = series_level(&mesh, &k, sigma);
        }
        let val = k[0] / (2.0 * sp.zeta).powi(n as i32);
        if let Some(pv) = prev_val {
            if (val - pv).norm() < cfg.quad_tol.max(1e-12) * 10.0 {
                return Ok(val);
            }
        }
        if mesh.xs.len() >= cfg.mesh_max_nodes {
            return Ok(val);
        }
        prev_val = Some(val);
        cfg2.mesh_phase_step *= 0.5;
    }
}

/// Cubic Lagrange interpolation on a uniform mesh; constant continuation
/// outside the mesh (the interpolated sums are constant beyond the
/// truncation point).
fn interp_cubic(xs: &[f64], ys: &[Complex64], h: f64, x: f64) -> Complex64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let fi = ((x - xs[0]) / h).floor() as isize;
    let i0 = fi.clamp(1, n as isize - 3) as usize - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (x - xs[i0 + b]) / (xs[i0 + a] - xs[i0 + b]);
            }
        }
        acc += ys[i0 + a] * w;
    }
    acc
}

/// Assemble the WKB-normalized solution
/// (u, u′)ᵀ = [[e^{iξ}, e^{−iξ}], [iζe^{iξ}, −iζe^{−iξ}]]·(Σ T_{2n}, −iΣ T_{2n+1})ᵀ
/// on `grid`, truncating the series at `n_max` terms or when the next term's
/// sup norm drops below `tol`. (The factor −i on the odd sums is forced by
/// the variation-of-parameters system a′ = −(iV/2ζ)be^{−2iξ},
/// b′ = (iV/2ζ)ae^{2iξ} with a → 1, b → 0 at +∞; with it the assembled pair
/// satisfies the eigenfunction equation to solver accuracy.)
pub fn solve_series(
    p: &Potential,
    grid: &[f64],
    z: Complex64,
    n_max: usize,
    tol: f64,
    cfg: &EigenConfig,
) -> Result<(EigenSolution, SeriesDiagnostics), EigenError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EigenError::BadGrid);
    }
    let sp = SpectralParameter::new(z)?;
    if sp.zeta.norm() < cfg.lambda_floor {
        return Err(EigenError::BelowLambdaFloor(sp.zeta.norm(), cfg.lambda_floor));
    }
    let mesh = build_series_mesh(p, grid[0].min(0.0), sp.zeta, cfg)?;
    let m = mesh.xs.len();
    let two_zeta = 2.0 * sp.zeta;

    let mut k = vec![Complex64::new(1.0, 0.0); m]; // K_0 ≡ 1
    let mut scale = Complex64::new(1.0, 0.0); // (2ζ)^{−s}
    let mut sum_even = vec![Complex64::new(1.0, 0.0); m]; // T_0
    let mut sum_odd = vec![Complex64::new(0.0, 0.0); m];
    let mut term_sup = Vec::new();
    let mut n_used = 0;
    let mut converged = true;
    for s in 1..=n_max.min(cfg.series_max) {
        let sigma = if s % 2 == 1 { 1.0 } else { -1.0 };
        k = series_level(&mesh, &k, sigma);
        scale /= two_zeta;
        let sup = k.iter().map(|v| (v * scale).norm()).fold(0.0, f64::max);
        term_sup.push(sup);
        n_used = s;
        if s % 2 == 0 {
            for i in 0..m {
                sum_even[i] += k[i] * scale;
            }
        } else {
            for i in 0..m {
                sum_odd[i] -= Complex64::i() * k[i] * scale;
            }
        }
        if sup < tol {
            break;
        }
        let l = term_sup.len();
        if l >= 4 && term_sup[l - 1] > term_sup[l - 2] && term_sup[l - 2] > term_sup[l - 3] {
            converged = false;
            break;
        }
    }
    let tail_estimate = 2.0 * term_sup.last().cloned().unwrap_or(0.0);

    // interpolate the slowly varying sums onto the requested grid, then
    // apply the exact phase factors
    let mut u = Vec::with_capacity(grid.len());
    let mut du = Vec::with_capacity(grid.len());
    for &x in grid {
        let a = interp_cubic(&mesh.xs, &sum_even, mesh.h, x);
        let b = interp_cubic(&mesh.xs, &sum_odd, mesh.h, x);
        let xi = phase_xi(p, x, z, cfg)?;
        let ep = (Complex64::i() * xi).exp();
        let em = (-Complex64::i() * xi).exp();
        u.push(ep * a + em * b);
        du.push(Complex64::i() * sp.zeta * (ep * a - em * b));
    }
    // WKB defect at the right end of the internal mesh
    let last = m - 1;
    let u_end = (Complex64::i() * mesh.xi[last]).exp() * sum_even[last]
        + (-Complex64::i() * mesh.xi[last]).exp() * sum_odd[last];
    let wkb_defect = (u_end - (Complex64::i() * mesh.xi[last]).exp()).norm();

    Ok((
        EigenSolution {
            grid: grid.to_vec(),
            u,
            du,
            z,
            normalization: Normalization::Wkb,
        },
        SeriesDiagnostics {
            n_used,
            term_sup,
            tail_estimate,
            converged,
            wkb_defect,
            x_max: *mesh.xs.last().unwrap(),
        },
    ))
}

// ---------------------------------------------------------------------------
// Weyl m-function
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MValue {
    pub m: Complex64,
    /// u(0, z) vanished within tolerance: z sits at a pole of m
    pub pole: bool,
}

/// m(z) = u′(0, z)/u(0, z) for the decaying (Weyl) solution, built by
/// integrating back from WKB data at the far-field truncation point. With
/// `beta`, returns the boundary-condition variant
/// m_β = m/(1 + βm) (the Möbius transform induced by u(0) + βu′(0) = 0).
pub fn weyl_m(
    p: &Potential,
    z: Complex64,
    beta: Option<f64>,
    cfg: &EigenConfig,
) -> Result<MValue, EigenError> {
    if z.im <= 0.0 {
        return Err(EigenError::OutsideDomain(z));
    }
    let sp = SpectralParameter::new(z)?;
    if sp.zeta.norm() < cfg.lambda_floor {
        return Err(EigenError::BelowLambdaFloor(sp.zeta.norm(), cfg.lambda_floor));
    }
    let x_max = p.tail_cutoff(cfg.tail_tol, cfg.x_max_cap).max(1.0);
    let xi = phase_xi(p, x_max, z, cfg)?;
    // sample V just beyond x_max so a closed compact support does not leak
    // its edge value into the outgoing WKB slope
    let dxi = sp.zeta - p.eval(x_max + 1e-9).unwrap_or(0.0) / (2.0 * sp.zeta);
    let init = (
        (Complex64::i() * xi).exp(),
        Complex64::i() * dxi * (Complex64::i() * xi).exp(),
    );
    let sol = solve_ivp(p, z, init, x_max, &[0.0], cfg.ode_tol)?;
    let (u0, du0) = (sol.u[0], sol.du[0]);
    let pole = u0.norm() <= 1e-12 * du0.norm();
    let m = du0 / u0;
    let m = match beta {
        Some(b) => m / (1.0 + b * m),
        None => m,
    };
    Ok(MValue { m, pole })
}

// ---------------------------------------------------------------------------
// Boundary limits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryLimit {
    /// withheld (None) when the ε-sequence is not Cauchy
    pub value: Option<Complex64>,
    pub error: f64,
    pub stable: bool,
}

/// Extrapolate F(E + iε_k), ε_k = ε0·2^{−k}, k = 0…K, to ε = 0 by Neville
/// polynomial extrapolation (Romberg-style with ratio 2).
pub fn boundary_limit<F: Fn(Complex64) -> Complex64>(
    f: F,
    e: f64,
    eps0: f64,
    k_max: usize,
) -> BoundaryLimit {
    let eps: Vec<f64> = (0..=k_max).map(|k| eps0 * 0.5f64.powi(k as i32)).collect();
    let vals: Vec<Complex64> = eps.iter().map(|&ek| f(Complex64::new(e, ek))).collect();
    // Cauchy check on the raw sequence
    let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let n = diffs.len();
    let finite = vals.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    let tail_growing = n >= 3
        && diffs[n - 1] > diffs[n - 2] * (1.0 + 1e-9)
        && diffs[n - 2] > diffs[n - 3] * (1.0 + 1e-9);
    if !finite || tail_growing {
        return BoundaryLimit {
            value: None,
            error: diffs.last().cloned().unwrap_or(f64::INFINITY),
            stable: false,
        };
    }
    // Neville table evaluated at ε = 0
    let mut table = vals.clone();
    let mut prev_diag = table[0];
    let mut last_increment = f64::INFINITY;
    for j in 1..table.len() {
        for i in (j..table.len()).rev() {
            let num = table[i] * eps[i - j] - table[i - 1] * eps[i];
            table[i] = num / (eps[i - j] - eps[i]);
        }
        last_increment = (table[table.len() - 1] - prev_diag).norm();
        prev_diag = table[table.len() - 1];
    }
    BoundaryLimit {
        value: Some(table[table.len() - 1]),
        error: last_increment,
        stable: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{
        make_bump, make_power_decay, make_square_barrier, make_zero, Kind, Potential,
        DeclaredClass,
    };

    fn cfg() -> EigenConfig {
        EigenConfig::default()
    }

    #[test]
    fn sqrt_branch_examples() {
        assert!((sqrt_branch(Complex64::new(4.0, 0.0)).unwrap() - 2.0).norm() < 1e-14);
        let want = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((sqrt_branch(Complex64::i()).unwrap() - want).norm() < 1e-14);
        assert!(sqrt_branch(Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn sqrt_branch_continuity_to_real_axis() {
        let zeta0 = sqrt_branch(Complex64::new(2.0, 0.0)).unwrap();
        for k in 1..=10 {
            let z = Complex64::new(2.0, 10f64.powi(-k));
            let zeta = sqrt_branch(z).unwrap();
            assert!(zeta.im >= 0.0);
            assert!((zeta - zeta0).norm() < 1e-1 * 10f64.powi(-(k - 1)));
        }
    }

    #[test]
    fn phase_xi_free_and_barrier() {
        let cfg = cfg();
        let free = make_zero();
        let xi = phase_xi(&free, 3.0, Complex64::new(4.0, 0.0), &cfg).unwrap();
        assert!((xi - 6.0).norm() < 1e-12);
        let bar = make_square_barrier(1.0, 0.0, 1.0);
        let xi = phase_xi(&bar, 2.0, Complex64::new(1.0, 0.0), &cfg).unwrap();
        assert!((xi - 1.5).norm() < 1e-9);
    }

    #[test]
    fn phase_xi_power_decay_antiderivative() {
        let cfg = cfg();
        let p = make_power_decay(1.0, 0.6);
        let q10 = ((11.0f64).powf(0.4) - 1.0) / 0.4;
        let xi = phase_xi(&p, 10.0, Complex64::new(4.0, 0.0), &cfg).unwrap();
        assert!((xi - (20.0 - q10 / 4.0)).norm() < 1e-8);
    }

    #[test]
    fn phase_xi_small_lambda_floor() {
        let cfg = cfg();
        assert!(matches!(
            phase_xi(&make_zero(), 1.0, Complex64::new(1e-4, 0.0), &cfg),
            Err(EigenError::BelowLambdaFloor(..))
        ));
    }

    #[test]
    fn series_tn_trivial_cases() {
        let cfg = cfg();
        let z = Complex64::new(1.0, 1.0);
        let t0 = series_tn(&make_zero(), 0, 0.0, z, &cfg).unwrap();
        assert_eq!(t0, Complex64::new(1.0, 0.0));
        let t3 = series_tn(&make_zero(), 3, 0.0, z, &cfg).unwrap();
        assert!(t3.norm() < 1e-14);
    }

    #[test]
    fn series_t1_barrier_closed_form() {
        // V = χ_{[0,1]}, ξ(t) = ζt − t/(2ζ) on [0,1]:
        // T_1(0) = (2ζ)^{−1} ∫_0^1 e^{2i(ζ−1/(2ζ))t} dt
        let cfg = cfg();
        let z = Complex64::new(1.0, 1.0);
        let zeta = sqrt_branch(z).unwrap();
        let kappa = zeta - 0.5 / zeta;
        let i2k = Complex64::i() * 2.0 * kappa;
        let want = ((i2k.exp() - 1.0) / i2k) / (2.0 * zeta);
        let got = series_tn(&make_square_barrier(1.0, 0.0, 1.0), 1, 0.0, z, &cfg).unwrap();
        assert!((got - want).norm() < 1e-8, "got {got} want {want}");
    }

    #[test]
    fn solve_ivp_free_sin_cos() {
        let p = make_zero();
        let grid: Vec<f64> = (0..=60).map(|i| i as f64 * 0.1).collect();
        let z = Complex64::new(1.0, 0.0);
        let s = solve_ivp(&p, z, (0.0.into(), 1.0.into()), 0.0, &grid, 1e-12).unwrap();
        let c = solve_ivp(&p, z, (1.0.into(), 0.0.into()), 0.0, &grid, 1e-12).unwrap();
        for (k, &x) in grid.iter().enumerate() {
            assert!((s.u[k] - x.sin()).norm() < 1e-10);
            assert!((c.u[k] - x.cos()).norm() < 1e-10);
        }
        let w = wronskian(&s, &c).unwrap();
        assert!((w.mean + 1.0).norm() < 1e-10);
        assert!(w.max_drift < 1e-9);
    }

    #[test]
    fn wronskian_of_proportional_solutions_vanishes() {
        let p = make_zero();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let z = Complex64::new(1.0, 0.0);
        let s = solve_ivp(&p, z, (0.0.into(), 1.0.into()), 0.0, &grid, 1e-12).unwrap();
        let s2 = solve_ivp(&p, z, (0.0.into(), 2.0.into()), 0.0, &grid, 1e-12).unwrap();
        let w = wronskian(&s, &s2).unwrap();
        assert!(w.mean.norm() < 1e-10);
    }

    #[test]
    fn solve_ivp_square_well_piecewise_matching() {
        // V = −1 on [0,1], z = 1: inside κ = √2, u = sin(√2 x)/√2 for
        // init (0,1); outside matched trig continuation
        let p = make_square_barrier(-1.0, 0.0, 1.0);
        let grid = vec![0.0, 0.5, 1.0, 1.5, 2.0];
        let z = Complex64::new(1.0, 0.0);
        let s = solve_ivp(&p, z, (0.0.into(), 1.0.into()), 0.0, &grid, 1e-13).unwrap();
        let k = 2f64.sqrt();
        let (u1, du1) = ((k * 1.0).sin() / k, (k * 1.0).cos());
        // beyond x=1: u = u1 cos(x−1) + du1 sin(x−1)
        let want2 = u1 * (1.0f64).cos() + du1 * (1.0f64).sin();
        assert!((s.u[2] - u1).norm() < 1e-10);
        assert!((s.du[2] - du1).norm() < 1e-10);
        assert!((s.u[4] - want2).norm() < 1e-10);
    }

    #[test]
    fn solve_series_free_is_plane_wave() {
        let cfg = cfg();
        let p = make_zero();
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2).collect();
        let z = Complex64::new(2.0, 0.5);
        let zeta = sqrt_branch(z).unwrap();
        let (sol, diag) = solve_series(&p, &grid, z, 12, 1e-12, &cfg).unwrap();
        assert!(diag.converged);
        for (k, &x) in grid.iter().enumerate() {
            let want = (Complex64::i() * zeta * x).exp();
            assert!((sol.u[k] - want).norm() < 1e-12);
            assert!((sol.du[k] - Complex64::i() * zeta * want).norm() < 1e-12);
        }
    }

    #[test]
    fn solve_series_matches_ode_for_bump() {
        let cfg = cfg();
        let p = make_bump(0.3, 0.0, 2.0);
        let z = Complex64::new(1.0, 0.1);
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let (ser, diag) = solve_series(&p, &grid, z, 12, 1e-14, &cfg).unwrap();
        assert!(diag.converged);
        // ODE initialized with the series' own values at the right edge of
        // the support, integrated back
        let x0 = 2.0;
        let (ser_init, _) = solve_series(&p, &[x0], z, 12, 1e-14, &cfg).unwrap();
        let desc: Vec<f64> = grid.iter().rev().cloned().collect();
        let ode = solve_ivp(&p, z, (ser_init.u[0], ser_init.du[0]), x0, &desc, 1e-12).unwrap();
        let gap = ser
            .u
            .iter()
            .zip(&ode.u)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(gap < 1e-8, "series/ODE gap {gap}");
    }

    #[test]
    fn series_term_envelope_decays_superexponentially() {
        let cfg = cfg();
        let p = make_bump(0.5, 0.0, 2.0);
        let (_, diag) = solve_series(
            &p,
            &[0.0],
            Complex64::new(1.0, 0.3),
            10,
            1e-30,
            &cfg,
        )
        .unwrap();
        // |T_n|·√(n!) should stay bounded by C^{n+1} for some moderate C:
        // check log|T_n| + ½ log n! grows at most linearly
        let mut lf = 0.0;
        let mut prev = f64::NEG_INFINITY;
        let mut slope_ok = true;
        for (i, &s) in diag.term_sup.iter().enumerate() {
            let n = (i + 1) as f64;
            lf += n.ln();
            let val = s.max(1e-300).ln() + 0.5 * lf;
            if i > 0 && val - prev > 3.0 {
                slope_ok = false;
            }
            prev = val;
        }
        assert!(slope_ok, "per-term sups {:?}", diag.term_sup);
    }

    #[test]
    fn series_damping_monotone_in_imaginary_part() {
        // larger Im z damps the n=2 term on a fixed barrier
        let cfg = cfg();
        let p = make_square_barrier(1.0, 0.0, 4.0);
        let t_at = |eta: f64| {
            series_tn(&p, 2, 0.0, Complex64::new(1.0, eta), &cfg)
                .unwrap()
                .norm()
        };
        let (a, b, c) = (t_at(0.2), t_at(0.8), t_at(2.0));
        assert!(a > b && b > c, "{a} {b} {c}");
    }

    #[test]
    fn residual_of_ode_solution_small() {
        let p = make_bump(0.7, 0.3, 1.1);
        let grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 1e-3).collect();
        let z = Complex64::new(2.0, 0.4);
        let s = solve_ivp(&p, z, (1.0.into(), 0.0.into()), 0.0, &grid, 1e-12).unwrap();
        // residual limited by the O(h²) stencil truncation, h = 1e-3
        let r = s.residual_max(&p).unwrap();
        assert!(r < 5e-5, "residual {r}");
    }

    #[test]
    fn weyl_m_free_closed_form() {
        let cfg = cfg();
        let p = make_zero();
        for z in [Complex64::new(1.0, 0.01), Complex64::i()] {
            let zeta = sqrt_branch(z).unwrap();
            let m = weyl_m(&p, z, None, &cfg).unwrap();
            assert!(!m.pole);
            assert!(
                (m.m - Complex64::i() * zeta).norm() < 1e-9,
                "z {z}: m {} vs i√z {}",
                m.m,
                Complex64::i() * zeta
            );
        }
    }

    #[test]
    fn weyl_m_herglotz_square_well() {
        let cfg = cfg();
        let p = make_square_barrier(-0.8, 0.0, 1.0);
        for &re in &[0.3, 1.0, 2.5] {
            for &im in &[0.05, 0.4, 1.5] {
                let m = weyl_m(&p, Complex64::new(re, im), None, &cfg).unwrap();
                assert!(m.m.im > 0.0, "Im m = {} at {re}+{im}i", m.m.im);
            }
        }
    }

    #[test]
    fn weyl_m_beta_mobius_matches_direct_pairing() {
        let cfg = cfg();
        let p = make_square_barrier(0.5, 0.0, 1.0);
        let z = Complex64::new(1.3, 0.2);
        let beta = 0.7;
        let via_mobius = weyl_m(&p, z, Some(beta), &cfg).unwrap().m;
        // direct: f′(0)/(f(0)+βf′(0)) for the decaying solution
        let x_max = p.tail_cutoff(cfg.tail_tol, cfg.x_max_cap).max(1.0);
        let zeta = sqrt_branch(z).unwrap();
        let xi = phase_xi(&p, x_max, z, &cfg).unwrap();
        let init = (
            (Complex64::i() * xi).exp(),
            Complex64::i() * zeta * (Complex64::i() * xi).exp(),
        );
        let sol = solve_ivp(&p, z, init, x_max, &[0.0], 1e-12).unwrap();
        let direct = sol.du[0] / (sol.u[0] + beta * sol.du[0]);
        assert!((via_mobius - direct).norm() < 1e-9);
    }

    #[test]
    fn boundary_limit_continuous_and_free_m() {
        let bl = boundary_limit(|z| z.sqrt(), 4.0, 0.1, 12);
        assert!(bl.stable);
        assert!((bl.value.unwrap() - 2.0).norm() < 1e-10);
        let cfg = cfg();
        let p = make_zero();
        let bl = boundary_limit(
            |z| weyl_m(&p, z, None, &cfg).unwrap().m,
            1.0,
            0.1,
            12,
        );
        assert!(bl.stable);
        assert!((bl.value.unwrap() - Complex64::i()).norm() < 1e-7);
    }

    #[test]
    fn boundary_limit_pole_flagged() {
        let bl = boundary_limit(|z| 1.0 / (z - 4.0), 4.0, 0.1, 12);
        assert!(!bl.stable);
        assert!(bl.value.is_none());
    }

    #[test]
    fn series_conjugate_wronskian_near_minus_2i_zeta() {
        // at real z the series solution and its conjugate span the solution
        // space with W[u, ū] → −2i√z
        let cfg = cfg();
        let p = make_bump(0.4, 0.0, 2.0);
        let z = Complex64::new(2.0, 0.0);
        let zeta = sqrt_branch(z).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let (sol, diag) = solve_series(&p, &grid, z, 14, 1e-12, &cfg).unwrap();
        assert!(diag.converged);
        let conj = EigenSolution {
            grid: sol.grid.clone(),
            u: sol.u.iter().map(|v| v.conj()).collect(),
            du: sol.du.iter().map(|v| v.conj()).collect(),
            z,
            normalization: sol.normalization,
        };
        let w = wronskian(&sol, &conj).unwrap();
        assert!(
            (w.mean + Complex64::i() * 2.0 * zeta).norm() < 1e-6,
            "W = {}",
            w.mean
        );
        assert!(w.max_drift < 1e-6);
    }

    #[test]
    fn sampled_potential_kind_roundtrip_in_series() {
        // a sampled potential runs through the series pipeline without
        // domain errors (out-of-grid treated as zero)
        let cfg = cfg();
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| 0.2 * (3.0 * x).cos()).collect();
        let p = Potential::new(
            Kind::Sampled { grid, values: vals },
            DeclaredClass::Unknown,
        );
        let (sol, diag) =
            solve_series(&p, &[0.0, 1.0], Complex64::new(1.0, 0.2), 10, 1e-12, &cfg).unwrap();
        assert!(diag.converged);
        assert!(sol.u[0].norm() > 0.1);
    }
}
