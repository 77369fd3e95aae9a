//! Half-line spectral data with a Dirichlet boundary condition: boundary
//! values of the Weyl function, the scattering coefficient γ, the
//! eigenfunction transform and its inverse, spectral projections onto energy
//! windows, and the perturbed evolution group.
//!
//! Normalization convention: the transform pair is symmetric,
//!   g̃(λ) = √(2/π) ∫ ψ̄(x,λ) g(x) dx,   g(x) = √(2/π) ∫ ψ(x,λ) g̃(λ) dλ,
//! which makes the free case (ψ = sin λx) the classical unitary sine
//! transform. All projection/evolution kernels below use this pair, so no
//! bare 2/π factors appear.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eigen::{
    boundary_limit, solve_ivp, weyl_m, EigenConfig, EigenError, EigenSolution,
};
use crate::potential::{Potential, PotentialError};
use crate::quad;

/// |u(0,λ²)| below this (against a far-field amplitude of 1) marks λ as a
/// resonance: γ = 1/u(0) is unreliable there.
const RESONANCE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("grid is empty or not strictly increasing")]
    BadGrid,
    #[error("grid lengths do not match the table")]
    GridMismatch,
    #[error("energy window ({0}, {1}) is not an interval in (0, ∞)")]
    BadWindow(f64, f64),
}

// ---------------------------------------------------------------------------
// Real-axis eigenfunctions
// ---------------------------------------------------------------------------

/// The generalized eigenfunction u(·, λ²) normalized by u ~ e^{iξ} at +∞,
/// obtained by integrating backward from WKB data at the far-field cutoff.
/// `out_grid` must be strictly increasing and nonnegative.
pub fn real_axis_solution(
    p: &Potential,
    lambda: f64,
    out_grid: &[f64],
    cfg: &EigenConfig,
) -> Result<EigenSolution, SpectralError> {
    if out_grid.is_empty()
        || out_grid[0] < 0.0
        || out_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(SpectralError::BadGrid);
    }
    let z = Complex64::new(lambda * lambda, 0.0);
    if lambda < cfg.lambda_floor {
        return Err(EigenError::BelowLambdaFloor(lambda, cfg.lambda_floor).into());
    }
    let x_top = *out_grid.last().unwrap();
    let x_max = p.tail_cutoff(cfg.tail_tol, cfg.x_max_cap).max(x_top + 1.0);
    let q = p.cumulative(x_max)?;
    let xi = Complex64::new(lambda * x_max - q / (2.0 * lambda), 0.0);
    // sample V just beyond x_max so a closed compact support does not leak
    // its edge value into the outgoing WKB slope
    let dxi = lambda - p.eval(x_max + 1e-9).unwrap_or(0.0) / (2.0 * lambda);
    let init = (
        (Complex64::i() * xi).exp(),
        Complex64::i() * dxi * (Complex64::i() * xi).exp(),
    );
    let descending: Vec<f64> = out_grid.iter().rev().cloned().collect();
    Ok(solve_ivp(p, z, init, x_max, &descending, cfg.ode_tol)?)
}

/// The regular solution u₁(·, λ²) with u₁(0) = 0, u₁′(0) = 1 (real-valued
/// for real V).
pub fn regular_solution(
    p: &Potential,
    lambda: f64,
    out_grid: &[f64],
    cfg: &EigenConfig,
) -> Result<EigenSolution, SpectralError> {
    if out_grid.is_empty()
        || out_grid[0] < 0.0
        || out_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(SpectralError::BadGrid);
    }
    let z = Complex64::new(lambda * lambda, 0.0);
    let init = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    Ok(solve_ivp(p, z, init, 0.0, out_grid, cfg.ode_tol)?)
}

// ---------------------------------------------------------------------------
// Scattering coefficient and ac density
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaValue {
    pub gamma: Complex64,
    /// boundary value u(0, λ²) the coefficient was derived from
    pub u0: Complex64,
    /// u(0) ≈ 0: γ is a near-pole and should not be trusted
    pub resonant: bool,
}

/// γ(E) = 1/u(0, E) at E = λ², from the WKB-normalized eigenfunction.
pub fn gamma_coeff(
    p: &Potential,
    lambda: f64,
    cfg: &EigenConfig,
) -> Result<GammaValue, SpectralError> {
    let sol = real_axis_solution(p, lambda, &[0.0], cfg)?;
    let u0 = sol.u[0];
    let resonant = u0.norm() < RESONANCE_THRESHOLD;
    Ok(GammaValue {
        gamma: 1.0 / u0,
        u0,
        resonant,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityValue {
    /// π^{−1} Im m(E+i0); withheld when the ε→0 extrapolation is not Cauchy
    pub value: Option<f64>,
    pub m: Option<Complex64>,
    pub error: f64,
    pub stable: bool,
}

/// Density of the absolutely continuous part at E = λ², via the boundary
/// limit of the Weyl function.
pub fn ac_density(
    p: &Potential,
    lambda: f64,
    cfg: &EigenConfig,
) -> Result<DensityValue, SpectralError> {
    if lambda < cfg.lambda_floor {
        return Err(EigenError::BelowLambdaFloor(lambda, cfg.lambda_floor).into());
    }
    let e = lambda * lambda;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let lim = boundary_limit(
        |z| weyl_m(p, z, None, cfg).map(|v| v.m).unwrap_or(nan),
        e,
        1e-2,
        10,
    );
    Ok(DensityValue {
        value: lim.value.map(|m| m.im / std::f64::consts::PI),
        m: lim.value,
        error: lim.error,
        stable: lim.stable,
    })
}

// ---------------------------------------------------------------------------
// Spectral table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralRow {
    pub lambda: f64,
    pub m: Complex64,
    pub density: f64,
    pub gamma: Complex64,
    /// ω(λ) = arg(γ̄/γ) = −2 arg γ
    pub omega: f64,
    /// boundary limit stable and λ not resonant
    pub stable: bool,
    /// entries at this λ are interpolated from stable neighbors
    pub masked: bool,
    pub limit_error: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralTable {
    pub rows: Vec<SpectralRow>,
}

impl SpectralTable {
    /// Per-λ boundary values, in parallel. Resonant or unstable λ are masked
    /// and their table entries linearly interpolated from the nearest stable
    /// neighbors (never silently zeroed); the flag column records this.
    pub fn build(
        p: &Potential,
        lambdas: &[f64],
        cfg: &EigenConfig,
    ) -> Result<Self, SpectralError> {
        if lambdas.is_empty() || lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SpectralError::BadGrid);
        }
        let mut rows = lambdas
            .par_iter()
            .map(|&lambda| -> Result<SpectralRow, SpectralError> {
                let g = gamma_coeff(p, lambda, cfg)?;
                let d = ac_density(p, lambda, cfg)?;
                let stable = d.stable && !g.resonant;
                Ok(SpectralRow {
                    lambda,
                    m: d.m.unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
                    density: d.value.unwrap_or(f64::NAN),
                    gamma: g.gamma,
                    omega: -2.0 * g.gamma.arg(),
                    stable,
                    masked: false,
                    limit_error: d.error,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        interpolate_masked(&mut rows);
        Ok(SpectralTable { rows })
    }

    /// CSV export: lambda, Re m, Im m, density, Re gamma, Im gamma, omega,
    /// stable_flag.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "lambda,re_m,im_m,density,re_gamma,im_gamma,omega,stable_flag"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.lambda,
                r.m.re,
                r.m.im,
                r.density,
                r.gamma.re,
                r.gamma.im,
                r.omega,
                if r.stable { 1 } else { 0 }
            )?;
        }
        Ok(())
    }
}

fn interpolate_masked(rows: &mut [SpectralRow]) {
    let stable_idx: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.stable)
        .map(|(i, _)| i)
        .collect();
    if stable_idx.is_empty() {
        return;
    }
    for i in 0..rows.len() {
        if rows[i].stable {
            continue;
        }
        let right = stable_idx.iter().find(|&&j| j > i);
        let left = stable_idx.iter().rev().find(|&&j| j < i);
        let (a, b) = match (left, right) {
            (Some(&a), Some(&b)) => (a, b),
            (Some(&a), None) => (a, a),
            (None, Some(&b)) => (b, b),
            (None, None) => continue,
        };
        let t = if a == b {
            0.0
        } else {
            (rows[i].lambda - rows[a].lambda) / (rows[b].lambda - rows[a].lambda)
        };
        let lerp = |x: Complex64, y: Complex64| x * (1.0 - t) + y * t;
        rows[i].m = lerp(rows[a].m, rows[b].m);
        rows[i].density = rows[a].density * (1.0 - t) + rows[b].density * t;
        rows[i].gamma = lerp(rows[a].gamma, rows[b].gamma);
        rows[i].omega = -2.0 * rows[i].gamma.arg();
        rows[i].masked = true;
    }
}

// ---------------------------------------------------------------------------
// Scattered-wave table ψ(x, λ)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PsiTable {
    /// λ quadrature grid (points strictly increasing, weights for ∫ dλ)
    pub lambda: quad::WeightedGrid,
    /// x quadrature grid (points strictly increasing, weights for ∫ dx)
    pub x: quad::WeightedGrid,
    /// ψ[λ index][x index] = λ γ̄(λ²) u₁(x, λ²)
    pub psi: Vec<Vec<Complex64>>,
    pub gamma: Vec<Complex64>,
    /// sup over x of the gap between the two defining formulas
    /// λ γ̄ u₁ and (2i)^{−1}(u − (γ̄/γ) ū), per λ
    pub formula_gap: Vec<f64>,
    pub resonant: Vec<bool>,
}

/// Builds the ψ(x, λ) table on the product of the two quadrature grids, in
/// parallel over λ. Both defining formulas are evaluated and their gap
/// recorded; resonant λ are flagged (their rows are kept but untrusted).
/// Gauss-panel grids resolve the e^{iλx} oscillation of the transforms far
/// beyond what uniform sampling can; keep the phase increment per panel,
/// λ_max·Δx and x_max·Δλ, below ≈ 3 radians.
pub fn build_psi(
    p: &Potential,
    lambda: &quad::WeightedGrid,
    x: &quad::WeightedGrid,
    cfg: &EigenConfig,
) -> Result<PsiTable, SpectralError> {
    let lambdas = &lambda.points;
    let xs = &x.points;
    if lambdas.is_empty() || lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::BadGrid);
    }
    if xs.is_empty() || xs[0] < 0.0 || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::BadGrid);
    }
    // solve on {0} ∪ xs so u(0) is always available for γ
    let mut grid = xs.to_vec();
    let prepend_zero = xs[0] > 0.0;
    if prepend_zero {
        grid.insert(0, 0.0);
    }
    let per_lambda = lambdas
        .par_iter()
        .map(|&lambda| -> Result<_, SpectralError> {
            let u = real_axis_solution(p, lambda, &grid, cfg)?;
            let u1 = regular_solution(p, lambda, &grid, cfg)?;
            let u0 = u.u[0];
            let gamma = 1.0 / u0;
            let resonant = u0.norm() < RESONANCE_THRESHOLD;
            let ratio = gamma.conj() / gamma; // γ̄/γ, unit modulus
            let skip = if prepend_zero { 1 } else { 0 };
            let mut row = Vec::with_capacity(xs.len());
            let mut gap: f64 = 0.0;
            for k in 0..xs.len() {
                let a = lambda * gamma.conj() * u1.u[k + skip];
                let b = (u.u[k + skip] - ratio * u.u[k + skip].conj())
                    / Complex64::new(0.0, 2.0);
                gap = gap.max((a - b).norm());
                row.push(a);
            }
            Ok((row, gamma, gap, resonant))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut psi = Vec::with_capacity(lambdas.len());
    let mut gamma = Vec::with_capacity(lambdas.len());
    let mut formula_gap = Vec::with_capacity(lambdas.len());
    let mut resonant = Vec::with_capacity(lambdas.len());
    for (row, g, gap, res) in per_lambda {
        psi.push(row);
        gamma.push(g);
        formula_gap.push(gap);
        resonant.push(res);
    }
    Ok(PsiTable {
        lambda: lambda.clone(),
        x: x.clone(),
        psi,
        gamma,
        formula_gap,
        resonant,
    })
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// L² norm of sampled values under the grid's quadrature weights.
pub fn grid_norm(grid: &quad::WeightedGrid, values: &[Complex64]) -> f64 {
    values
        .iter()
        .zip(&grid.weights)
        .map(|(v, wi)| wi * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4; // √(2/π)

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransformReport {
    /// ‖inverse(forward(g)) − g‖ / ‖g‖ on the packet's own grids
    pub unitarity_defect: f64,
    /// fraction of ‖g̃‖² carried by the top decile of the λ grid
    pub leakage_fraction: f64,
    /// set when the packet's spectrum is not contained in the λ grid
    pub leakage: bool,
}

/// g̃(λ) = √(2/π) ∫ ψ̄(x,λ) g(x) dx on the table's x grid.
pub fn forward_transform(
    table: &PsiTable,
    gx: &[Complex64],
) -> Result<Vec<Complex64>, SpectralError> {
    if gx.len() != table.x.len() {
        return Err(SpectralError::GridMismatch);
    }
    let w = &table.x.weights;
    Ok(table
        .psi
        .par_iter()
        .map(|row| {
            SQRT_2_OVER_PI
                * row
                    .iter()
                    .zip(gx)
                    .zip(w)
                    .map(|((psi, g), wi)| psi.conj() * g * *wi)
                    .sum::<Complex64>()
        })
        .collect())
}

/// g(x) = √(2/π) ∫ ψ(x,λ) g̃(λ) dλ on the table's λ grid.
pub fn inverse_transform(
    table: &PsiTable,
    gl: &[Complex64],
) -> Result<Vec<Complex64>, SpectralError> {
    if gl.len() != table.lambda.len() {
        return Err(SpectralError::GridMismatch);
    }
    let w = &table.lambda.weights;
    Ok((0..table.x.len())
        .into_par_iter()
        .map(|k| {
            SQRT_2_OVER_PI
                * table
                    .psi
                    .iter()
                    .zip(gl)
                    .zip(w)
                    .map(|((row, c), wi)| row[k] * c * *wi)
                    .sum::<Complex64>()
        })
        .collect())
}

/// Round-trip and leakage diagnostics for a packet on the table's grids.
pub fn transform_report(
    table: &PsiTable,
    gx: &[Complex64],
) -> Result<TransformReport, SpectralError> {
    let gl = forward_transform(table, gx)?;
    let back = inverse_transform(table, &gl)?;
    let norm_g = grid_norm(&table.x, gx).max(1e-300);
    let diff: Vec<Complex64> = back.iter().zip(gx).map(|(b, g)| b - g).collect();
    let unitarity_defect = grid_norm(&table.x, &diff) / norm_g;
    let w = &table.lambda.weights;
    let total: f64 = gl.iter().zip(w).map(|(c, wi)| wi * c.norm_sqr()).sum();
    let cut = table.lambda.len() - table.lambda.len() / 10;
    let top: f64 = gl
        .iter()
        .zip(w)
        .skip(cut)
        .map(|(c, wi)| wi * c.norm_sqr())
        .sum();
    let leakage_fraction = if total > 0.0 { top / total } else { 0.0 };
    Ok(TransformReport {
        unitarity_defect,
        leakage_fraction,
        leakage: leakage_fraction > 1e-3,
    })
}

// ---------------------------------------------------------------------------
// Projections and evolution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Projection {
    pub values: Vec<Complex64>,
    /// a window endpoint landed within one grid step of a masked/resonant λ,
    /// where the contour argument behind the formula is suspect
    pub endpoint_flag: bool,
}

/// Spectral projection onto the energy window (a, b):
/// restricts g̃ to λ ∈ (√a, √b) and inverts.
pub fn project_ac(
    table: &PsiTable,
    a: f64,
    b: f64,
    gx: &[Complex64],
) -> Result<Projection, SpectralError> {
    if !(0.0 < a && a < b) {
        return Err(SpectralError::BadWindow(a, b));
    }
    let (la, lb) = (a.sqrt(), b.sqrt());
    let gl = forward_transform(table, gx)?;
    let restricted: Vec<Complex64> = table
        .lambda
        .points
        .iter()
        .zip(&gl)
        .map(|(&l, c)| {
            if l > la && l < lb {
                *c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let n = table.lambda.len();
    let step = if n > 1 {
        (table.lambda.points[n - 1] - table.lambda.points[0]) / (n - 1) as f64
    } else {
        0.0
    };
    let endpoint_flag = table
        .lambda
        .points
        .iter()
        .zip(&table.resonant)
        .any(|(&l, &res)| res && ((l - la).abs() <= step || (l - lb).abs() <= step));
    Ok(Projection {
        values: inverse_transform(table, &restricted)?,
        endpoint_flag,
    })
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub values: Vec<Complex64>,
    /// | ‖output‖ − ‖g̃‖ | / ‖g̃‖
    pub norm_defect: f64,
    /// largest |t| the λ grid can resolve: π / (2 λ_max Δλ)
    pub horizon: f64,
    pub beyond_horizon: bool,
}

/// e^{−itH} g(x) = √(2/π) ∫ e^{−iλ²t} ψ(x,λ) g̃(λ) dλ.
pub fn evolve_v(
    table: &PsiTable,
    gx: &[Complex64],
    t: f64,
) -> Result<Evolution, SpectralError> {
    let gl = forward_transform(table, gx)?;
    let phased: Vec<Complex64> = table
        .lambda
        .points
        .iter()
        .zip(&gl)
        .map(|(&l, c)| (Complex64::new(0.0, -l * l * t)).exp() * c)
        .collect();
    let values = inverse_transform(table, &phased)?;
    let n = table.lambda.len();
    let lambda_max = *table.lambda.points.last().unwrap();
    let dl = if n > 1 {
        (lambda_max - table.lambda.points[0]) / (n - 1) as f64
    } else {
        f64::INFINITY
    };
    let horizon = std::f64::consts::PI / (2.0 * lambda_max * dl);
    let norm_gl = grid_norm(&table.lambda, &gl).max(1e-300);
    let norm_out = grid_norm(&table.x, &values);
    Ok(Evolution {
        values,
        norm_defect: (norm_out - norm_gl).abs() / norm_gl,
        horizon,
        beyond_horizon: t.abs() > horizon,
    })
}
