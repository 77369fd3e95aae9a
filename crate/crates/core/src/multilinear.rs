//! Martingale structures on an interval, the square-function style g_δ
//! functionals, brute-force multilinear simplex integrals M_n and their
//! maximal variants, and the combinatorial b_n inequality check.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::quad;

#[derive(Debug, thiserror::Error)]
pub enum MultilinearError {
    #[error("function has zero (or non-finite) mass on its support")]
    ZeroMass,
    #[error("depth {0} exceeds the resolution of the density (cell width {1:.3e})")]
    DepthExceedsResolution(u32, f64),
    #[error("{0} factors exceeds the brute-force guard of {1}")]
    TooManyFactors(usize, usize),
    #[error("invalid step function: {0}")]
    InvalidStepFn(String),
    #[error("oscillatory cell integral on [{0}, {1}] did not converge")]
    CellQuadratureFailure(f64, f64),
}

// ---------------------------------------------------------------------------
// Step functions
// ---------------------------------------------------------------------------

/// Complex-valued piecewise-constant function: value `vals[i]` on
/// [breaks[i], breaks[i+1]), zero outside [breaks[0], breaks.last()].
#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    breaks: Vec<f64>,
    vals: Vec<Complex64>,
}

impl StepFn {
    pub fn new(breaks: Vec<f64>, vals: Vec<Complex64>) -> Result<Self, MultilinearError> {
        if breaks.len() != vals.len() + 1 || vals.is_empty() {
            return Err(MultilinearError::InvalidStepFn(
                "need breaks.len() == vals.len() + 1 >= 2".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MultilinearError::InvalidStepFn(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(StepFn { breaks, vals })
    }

    /// Real indicator c·χ_{[a,b]}.
    pub fn indicator(a: f64, b: f64, c: Complex64) -> Self {
        StepFn::new(vec![a, b], vec![c]).unwrap()
    }

    /// Random step function with `n_steps` equal-width steps on [a, b] and
    /// values uniform in the complex unit square.
    pub fn random<R: Rng>(rng: &mut R, n_steps: usize, a: f64, b: f64) -> Self {
        let breaks: Vec<f64> = (0..=n_steps)
            .map(|i| a + (b - a) * i as f64 / n_steps as f64)
            .collect();
        let vals: Vec<Complex64> = (0..n_steps)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        StepFn { breaks, vals }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        if x < self.breaks[0] || x >= self.breaks[self.breaks.len() - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let i = match self
            .breaks
            .binary_search_by(|b| b.partial_cmp(&x).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.vals[i.min(self.vals.len() - 1)]
    }

    /// ∫_a^b f, exact.
    pub fn integral(&self, a: f64, b: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.vals.len() {
            let lo = self.breaks[i].max(a);
            let hi = self.breaks[i + 1].min(b);
            if hi > lo {
                total += self.vals[i] * (hi - lo);
            }
        }
        total
    }

    /// ∫_a^b |f|^p, exact.
    pub fn abs_p_integral(&self, p: f64, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.vals.len() {
            let lo = self.breaks[i].max(a);
            let hi = self.breaks[i + 1].min(b);
            if hi > lo {
                total += self.vals[i].norm().powf(p) * (hi - lo);
            }
        }
        total
    }

    /// x ↦ f(−x): supports reflect, values reverse.
    pub fn reflected(&self) -> Self {
        let breaks: Vec<f64> = self.breaks.iter().rev().map(|b| -b).collect();
        let vals: Vec<Complex64> = self.vals.iter().rev().cloned().collect();
        StepFn { breaks, vals }
    }
}

// ---------------------------------------------------------------------------
// Martingale structures
// ---------------------------------------------------------------------------

/// Nested dyadic-in-index partitions E^m_j = [x^m_{j-1}, x^m_j] of a base
/// interval, stored through the finest level: level-m breakpoints are every
/// 2^{M−m}-th entry of `points`, so the refinement property holds by
/// construction.
#[derive(Debug, Clone)]
pub struct MartingaleStructure {
    depth: u32,
    points: Vec<f64>,
}

impl MartingaleStructure {
    pub fn from_finest_points(depth: u32, points: Vec<f64>) -> Result<Self, MultilinearError> {
        if points.len() != (1usize << depth) + 1 {
            return Err(MultilinearError::InvalidStepFn(
                "finest level must have 2^depth + 1 points".into(),
            ));
        }
        if points.windows(2).any(|w| w[0] > w[1]) {
            return Err(MultilinearError::InvalidStepFn(
                "breakpoints must be nondecreasing".into(),
            ));
        }
        Ok(MartingaleStructure { depth, points })
    }

    pub fn uniform(a: f64, b: f64, depth: u32) -> Self {
        let n = 1usize << depth;
        let points = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        MartingaleStructure { depth, points }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn base(&self) -> (f64, f64) {
        (self.points[0], self.points[self.points.len() - 1])
    }

    /// Cell E^m_j for 1 ≤ j ≤ 2^m (paper indexing).
    pub fn cell(&self, m: u32, j: usize) -> (f64, f64) {
        assert!(m <= self.depth && j >= 1 && j <= (1usize << m));
        let stride = 1usize << (self.depth - m);
        (self.points[(j - 1) * stride], self.points[j * stride])
    }

    pub fn level_breakpoints(&self, m: u32) -> Vec<f64> {
        let stride = 1usize << (self.depth - m);
        self.points.iter().step_by(stride).cloned().collect()
    }

    /// Partition + refinement invariants (monotone points and shared
    /// endpoints are what the storage can violate; nesting is structural).
    pub fn check_invariants(&self) -> bool {
        self.points.windows(2).all(|w| w[0] <= w[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdaptMode {
    Lp,
    Amalgam,
}

const MIN_CELL_WIDTH: f64 = 1e-12;

/// Build a martingale structure adapted to a nonnegative-mass density:
/// in `Lp` mode every level-m cell carries exactly 2^{−m} of ∫|f|^p; in
/// `Amalgam` mode every level-m cell satisfies
/// ‖f·χ_{E^m_j}‖^p_{ℓ^p(L^1)} ≤ 2^{−m}·‖f‖^p (splitting a unit cell between
/// two children only lowers the sum, since a^p + (μ−a)^p ≤ μ^p for p ≥ 1).
pub fn build_adapted<F: Fn(f64) -> f64>(
    f: F,
    support: (f64, f64),
    p: f64,
    depth: u32,
    mode: AdaptMode,
) -> Result<MartingaleStructure, MultilinearError> {
    assert!(p >= 1.0 && depth >= 1);
    let (a, b) = support;
    assert!(a < b);
    match mode {
        AdaptMode::Lp => build_adapted_lp(f, a, b, p, depth),
        AdaptMode::Amalgam => build_adapted_amalgam(f, a, b, p, depth),
    }
}

fn build_adapted_lp<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    p: f64,
    depth: u32,
) -> Result<MartingaleStructure, MultilinearError> {
    let dens = |x: f64| f(x).abs().powf(p);
    // coarse cumulative table for bracketing, exact local quadrature for the
    // final bisection
    let n_table = 1usize << (depth.min(14) + 4);
    let h = (b - a) / n_table as f64;
    let mut cum = Vec::with_capacity(n_table + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for k in 0..n_table {
        let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        let r = quad::integrate_real(dens, lo, hi, 1e-14);
        acc += r.value.re.max(0.0);
        cum.push(acc);
    }
    let total = acc;
    if !(total.is_finite() && total > 0.0) {
        return Err(MultilinearError::ZeroMass);
    }
    let cells = 1usize << depth;
    let mut points = Vec::with_capacity(cells + 1);
    points.push(a);
    for j in 1..cells {
        let target = total * j as f64 / cells as f64;
        // bracket in the table
        let idx = cum.partition_point(|&c| c < target).clamp(1, n_table);
        let node = a + (idx - 1) as f64 * h;
        let base = cum[idx - 1];
        // bisection on base + ∫_node^x dens = target
        let (mut lo, mut hi) = (node, node + h);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let v = base + quad::integrate_real(dens, node, mid, 1e-15).value.re;
            if v < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 * (b - a).abs() {
                break;
            }
        }
        points.push(0.5 * (lo + hi));
    }
    points.push(b);
    for w in points.windows(2) {
        if w[1] - w[0] < MIN_CELL_WIDTH {
            return Err(MultilinearError::DepthExceedsResolution(depth, w[1] - w[0]));
        }
    }
    MartingaleStructure::from_finest_points(depth, points)
}

fn build_adapted_amalgam<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    p: f64,
    depth: u32,
) -> Result<MartingaleStructure, MultilinearError> {
    // L^1 mass of |f| on a sub-cell, memoizing whole unit cells [n, n+1)
    let mut full_cells: HashMap<i64, f64> = HashMap::new();
    let mut cell_l1 = |lo: f64, hi: f64| -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let n = lo.floor() as i64;
        if lo == n as f64 && hi == (n + 1) as f64 {
            return *full_cells.entry(n).or_insert_with(|| {
                quad::integrate_real(|x| f(x).abs(), lo, hi, 1e-13).value.re.max(0.0)
            });
        }
        quad::integrate_real(|x| f(x).abs(), lo, hi, 1e-13).value.re.max(0.0)
    };
    // ℓ^p(L^1) p-mass of the restriction to [lo, hi], boundary cells standalone
    let mut amass = |lo: f64, hi: f64| -> f64 {
        let mut sum = 0.0;
        let mut n = lo.floor();
        while n < hi {
            let clo = lo.max(n);
            let chi = hi.min(n + 1.0);
            let m = cell_l1(clo, chi);
            if m > 0.0 {
                sum += m.powf(p);
            }
            n += 1.0;
        }
        sum
    };
    let total = amass(a, b);
    if !(total.is_finite() && total > 0.0) {
        return Err(MultilinearError::ZeroMass);
    }
    // recursive half-mass splits, level by level
    let mut level: Vec<f64> = vec![a, b];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2 - 1);
        for w in level.windows(2) {
            let (clo, chi) = (w[0], w[1]);
            next.push(clo);
            let mass = amass(clo, chi);
            if mass <= 0.0 {
                next.push(0.5 * (clo + chi));
                continue;
            }
            let target = 0.5 * mass;
            let (mut lo, mut hi) = (clo, chi);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if amass(clo, mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 * (b - a).abs() {
                    break;
                }
            }
            next.push(0.5 * (lo + hi));
        }
        next.push(b);
        level = next;
    }
    for w in level.windows(2) {
        if w[1] - w[0] < MIN_CELL_WIDTH {
            return Err(MultilinearError::DepthExceedsResolution(depth, w[1] - w[0]));
        }
    }
    MartingaleStructure::from_finest_points(depth, level)
}

// ---------------------------------------------------------------------------
// g_δ functionals
// ---------------------------------------------------------------------------

/// Anything that can produce ∫_a^b f for martingale cells.
pub trait CellIntegrable {
    fn cell_integral(&self, a: f64, b: f64) -> Complex64;
}

impl CellIntegrable for StepFn {
    fn cell_integral(&self, a: f64, b: f64) -> Complex64 {
        self.integral(a, b)
    }
}

/// Adapter running adaptive quadrature over a closure.
pub struct QuadFn<F: Fn(f64) -> Complex64> {
    pub f: F,
    pub tol: f64,
}

impl<F: Fn(f64) -> Complex64> CellIntegrable for QuadFn<F> {
    fn cell_integral(&self, a: f64, b: f64) -> Complex64 {
        quad::integrate(&self.f, a, b, self.tol).value
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GDeltaValue {
    pub value: f64,
    /// contribution of the deepest level, reported as the truncation estimate
    pub last_level_term: f64,
}

/// g_δ(f) = Σ_{m=1}^{M} 2^{δm} (Σ_j |∫_{E^m_j} f|²)^{1/2}.
pub fn g_delta<F: CellIntegrable>(f: &F, ms: &MartingaleStructure, delta: f64) -> GDeltaValue {
    let mut value = 0.0;
    let mut last = 0.0;
    for m in 1..=ms.depth() {
        let mut sq = 0.0;
        for j in 1..=(1usize << m) {
            let (a, b) = ms.cell(m, j);
            sq += f.cell_integral(a, b).norm_sqr();
        }
        last = 2f64.powf(delta * m as f64) * sq.sqrt();
        value += last;
    }
    GDeltaValue {
        value,
        last_level_term: last,
    }
}

/// max_k g_δ(f_k), the quantity entering the multilinear bound for the
/// arguments beyond the first.
pub fn g_delta_max<F: CellIntegrable>(fs: &[F], ms: &MartingaleStructure, delta: f64) -> f64 {
    fs.iter()
        .map(|f| g_delta(f, ms, delta).value)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelWeights {
    /// weight m at level m (the G = Σ m·G_m sum)
    Linear,
    /// weight 2^{δm}
    Exponential(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct GPhaseValue {
    pub value: f64,
    pub per_level: Vec<f64>,
    pub converged: bool,
}

/// Phase-twisted square function built from the endpoint-referenced cell
/// integrals
///   s^{m,−}_j = ∫_{E^m_j} e^{2i[φ(t)−φ(left)]} V(t) dt,
///   s^{m,+}_j = ∫_{E^m_j} e^{2i[φ(right)−φ(t)]} V(t) dt,
/// with the + term of the last cell (j = 2^m) omitted. `phi` is the WKB
/// phase already bound to the spectral parameter; Im φ ≥ 0 keeps the
/// exponentials bounded.
pub fn g_phase<V, P>(
    v: V,
    ms: &MartingaleStructure,
    weights: LevelWeights,
    phi: P,
    tol: f64,
) -> GPhaseValue
where
    V: Fn(f64) -> f64,
    P: Fn(f64) -> Complex64,
{
    let i2 = Complex64::new(0.0, 2.0);
    let mut per_level = Vec::with_capacity(ms.depth() as usize);
    let mut converged = true;
    for m in 1..=ms.depth() {
        let mut sq = 0.0;
        let last_j = 1usize << m;
        for j in 1..=last_j {
            let (a, b) = ms.cell(m, j);
            let phi_a = phi(a);
            let minus = quad::integrate(|t| (i2 * (phi(t) - phi_a)).exp() * v(t), a, b, tol);
            converged &= minus.converged;
            sq += minus.value.norm_sqr();
            if j != last_j {
                let phi_b = phi(b);
                let plus = quad::integrate(|t| (i2 * (phi_b - phi(t))).exp() * v(t), a, b, tol);
                converged &= plus.converged;
                sq += plus.value.norm_sqr();
            }
        }
        per_level.push(sq.sqrt());
    }
    let value = per_level
        .iter()
        .enumerate()
        .map(|(i, gm)| {
            let m = (i + 1) as f64;
            match weights {
                LevelWeights::Linear => m * gm,
                LevelWeights::Exponential(delta) => 2f64.powf(delta * m) * gm,
            }
        })
        .sum();
    GPhaseValue {
        value,
        per_level,
        converged,
    }
}

// ---------------------------------------------------------------------------
// Brute-force simplex integrals
// ---------------------------------------------------------------------------

const MAX_FACTORS: usize = 6;

/// Polynomial in a local coordinate s, coefficients low-to-high.
#[derive(Debug, Clone)]
struct Poly(Vec<Complex64>);

impl Poly {
    fn eval(&self, s: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }
    /// antiderivative vanishing at s = 0
    fn antiderivative(&self) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + 1];
        for (k, c) in self.0.iter().enumerate() {
            out[k + 1] = c / (k as f64 + 1.0);
        }
        Poly(out)
    }
    fn scaled(&self, c: Complex64) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect())
    }
}

/// F_n as a piecewise polynomial: segment i covers [breaks[i], breaks[i+1]]
/// with local coordinate s = x − breaks[i].
struct PiecewisePoly {
    breaks: Vec<f64>,
    segs: Vec<Poly>,
    /// value for x beyond the last break
    tail: Complex64,
}

fn merged_breaks(fs: &[StepFn]) -> Vec<f64> {
    let mut all: Vec<f64> = fs.iter().flat_map(|f| f.breaks.iter().cloned()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-300);
    all
}

/// Iterated integral recursion: F_0 ≡ 1, F_k(x) = ∫_{−∞}^x f_k F_{k−1};
/// exact for step functions. Returns the full piecewise polynomial of F_n.
fn simplex_recursion(fs: &[StepFn]) -> PiecewisePoly {
    let breaks = merged_breaks(fs);
    let nseg = breaks.len() - 1;
    let one = Poly(vec![Complex64::new(1.0, 0.0)]);
    let mut segs: Vec<Poly> = vec![one; nseg];
    let mut tail = Complex64::new(1.0, 0.0);
    for f in fs {
        let mut new_segs = Vec::with_capacity(nseg);
        let mut acc = Complex64::new(0.0, 0.0); // F_k at the left end (zero: f vanishes there)
        for (i, seg) in segs.iter().enumerate() {
            let c = f.eval(0.5 * (breaks[i] + breaks[i + 1]));
            let prim = seg.scaled(c).antiderivative();
            let len = breaks[i + 1] - breaks[i];
            let mut poly = prim;
            poly.0[0] += acc;
            acc = poly.eval(len);
            new_segs.push(poly);
        }
        segs = new_segs;
        tail = acc;
    }
    PiecewisePoly { breaks, segs, tail }
}

/// M_n(f_1,…,f_n) = ∫_{x_1 ≤ … ≤ x_n} Π f_j(x_j) dx, exact for step
/// functions via the iterated-primitive recursion.
pub fn m_n_bruteforce(fs: &[StepFn]) -> Result<Complex64, MultilinearError> {
    if fs.is_empty() || fs.len() > MAX_FACTORS {
        return Err(MultilinearError::TooManyFactors(fs.len(), MAX_FACTORS));
    }
    Ok(simplex_recursion(fs).tail)
}

/// sup_y |M_n with x_n ≤ y|, scanned on a refining grid per segment until
/// the change between refinements drops below 1e-6.
pub fn m_n_star_bruteforce(fs: &[StepFn]) -> Result<f64, MultilinearError> {
    if fs.is_empty() || fs.len() > MAX_FACTORS {
        return Err(MultilinearError::TooManyFactors(fs.len(), MAX_FACTORS));
    }
    let pw = simplex_recursion(fs);
    let mut best_prev = -1.0;
    let mut per_seg = 8usize;
    loop {
        let mut best: f64 = pw.tail.norm();
        for (i, seg) in pw.segs.iter().enumerate() {
            let len = pw.breaks[i + 1] - pw.breaks[i];
            for k in 0..=per_seg {
                let s = len * k as f64 / per_seg as f64;
                best = best.max(seg.eval(s).norm());
            }
        }
        if (best - best_prev).abs() < 1e-6 || per_seg > 1 << 20 {
            return Ok(best);
        }
        best_prev = best;
        per_seg *= 2;
    }
}

/// Simplex integral for smooth function handles: the same recursion carried
/// on a uniform mesh with fourth-order cumulative quadrature, with the mesh
/// refined until the value settles below `tol`.
pub fn m_n_bruteforce_fn<F: Fn(f64) -> Complex64>(
    fs: &[F],
    support: (f64, f64),
    tol: f64,
) -> Result<Complex64, MultilinearError> {
    if fs.is_empty() || fs.len() > MAX_FACTORS {
        return Err(MultilinearError::TooManyFactors(fs.len(), MAX_FACTORS));
    }
    let (a, b) = support;
    let mut n = 256usize;
    let mut prev: Option<Complex64> = None;
    loop {
        let h = (b - a) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        let mut fvals: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n + 1];
        for f in fs {
            let integrand: Vec<Complex64> =
                xs.iter().zip(&fvals).map(|(&x, &v)| f(x) * v).collect();
            fvals = cumulative_from_left(&integrand, h);
        }
        let value = fvals[n];
        if let Some(p) = prev {
            if (value - p).norm() < tol {
                return Ok(value);
            }
        }
        if n > 1 << 22 {
            return Ok(value);
        }
        prev = Some(value);
        n *= 2;
    }
}

/// Maximal variant for function handles: sup over mesh nodes of |F_n|.
pub fn m_n_star_bruteforce_fn<F: Fn(f64) -> Complex64>(
    fs: &[F],
    support: (f64, f64),
    tol: f64,
) -> Result<f64, MultilinearError> {
    if fs.is_empty() || fs.len() > MAX_FACTORS {
        return Err(MultilinearError::TooManyFactors(fs.len(), MAX_FACTORS));
    }
    let (a, b) = support;
    let mut n = 256usize;
    let mut prev: Option<f64> = None;
    loop {
        let h = (b - a) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        let mut fvals: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n + 1];
        for f in fs {
            let integrand: Vec<Complex64> =
                xs.iter().zip(&fvals).map(|(&x, &v)| f(x) * v).collect();
            fvals = cumulative_from_left(&integrand, h);
        }
        let value = fvals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if let Some(p) = prev {
            if (value - p).abs() < tol {
                return Ok(value);
            }
        }
        if n > 1 << 22 {
            return Ok(value);
        }
        prev = Some(value);
        n *= 2;
    }
}

fn cumulative_from_left(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let rev: Vec<Complex64> = values.iter().rev().cloned().collect();
    let mut right = quad::cumulative_from_right(&rev, h);
    right.reverse();
    right
}

// ---------------------------------------------------------------------------
// The multilinear bound and the b_n inequality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs / lhs (∞ when lhs = 0); the bound holds iff margin ≥ 1
    pub margin: f64,
    pub lhs_star: f64,
    pub rhs_star: f64,
    pub margin_star: f64,
    pub c: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub holds: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Check |M_n| ≤ (C^{n+1}/√n!)·g_{−δ}(f_1)·(max_{k≥2} g_δ(f_k))^{n−1} and
/// the maximal variant with δ′ in place of δ on the first factor's weight.
pub fn check_numerical_bound(
    fs: &[StepFn],
    ms: &MartingaleStructure,
    delta: f64,
    delta_prime: f64,
    c: f64,
) -> Result<BoundReport, MultilinearError> {
    let n = fs.len();
    if n == 0 || n > 5 {
        return Err(MultilinearError::TooManyFactors(n, 5));
    }
    let b_n = c.powi(n as i32 + 1) / factorial(n).sqrt();
    let g_first = g_delta(&fs[0], ms, -delta).value;
    let g_rest = if n > 1 {
        g_delta_max(&fs[1..], ms, delta)
    } else {
        1.0
    };
    let lhs = m_n_bruteforce(fs)?.norm();
    let rhs = b_n * g_first * g_rest.powi(n as i32 - 1);

    let g_first_star = g_delta(&fs[0], ms, -delta_prime).value;
    let g_rest_star = if n > 1 {
        g_delta_max(&fs[1..], ms, delta_prime)
    } else {
        1.0
    };
    let lhs_star = m_n_star_bruteforce(fs)?;
    let rhs_star = b_n * g_first_star * g_rest_star.powi(n as i32 - 1);

    let margin = if lhs > 0.0 { rhs / lhs } else { f64::INFINITY };
    let margin_star = if lhs_star > 0.0 {
        rhs_star / lhs_star
    } else {
        f64::INFINITY
    };
    Ok(BoundReport {
        n,
        lhs,
        rhs,
        margin,
        lhs_star,
        rhs_star,
        margin_star,
        c,
        delta,
        delta_prime,
        holds: lhs <= rhs * (1.0 + 1e-12) && lhs_star <= rhs_star * (1.0 + 1e-12),
    })
}

/// b_n = C^{n+1}/√n! together with the boundedness check on √n·b_{n+1}/b_n.
#[derive(Debug, Clone, Serialize)]
pub struct BnTable {
    pub c: f64,
    pub b: Vec<f64>,
}

impl BnTable {
    pub fn new(c: f64, n_max: usize) -> Self {
        let b = (0..=n_max)
            .map(|n| c.powi(n as i32 + 1) / factorial(n).sqrt())
            .collect();
        BnTable { c, b }
    }

    /// sup_n √n · b_{n+1}/b_n over the table (equals C·√(n/(n+1)) ≤ C).
    pub fn ratio_bound(&self) -> f64 {
        (1..self.b.len() - 1)
            .map(|n| (n as f64).sqrt() * self.b[n + 1] / self.b[n])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrateOutcome {
    pub ok: bool,
    /// violating (n, x, y) when `ok` is false
    pub violation: Option<(usize, f64, f64)>,
}

/// Verify the modified binomial inequality
///   b_n y^n + Σ_{i=2}^{n−2} b_i b_{n−i} x^i y^{n−i} + b_n x^n ≤ b_n
/// on the quarter circle x² + y² = 1 (the general case follows by
/// homogeneity) at `grid_size` points, for all 2 ≤ n ≤ n_max.
pub fn calibrate_bn(c: f64, n_max: usize, grid_size: usize) -> CalibrateOutcome {
    assert!(n_max <= 20);
    let table = BnTable::new(c, n_max);
    for n in 2..=n_max {
        for k in 0..=grid_size {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / grid_size as f64;
            let (x, y) = (theta.cos(), theta.sin());
            let mut lhs = table.b[n] * (y.powi(n as i32) + x.powi(n as i32));
            for i in 2..=n.saturating_sub(2) {
                lhs += table.b[i] * table.b[n - i] * x.powi(i as i32) * y.powi((n - i) as i32);
            }
            if lhs > table.b[n] * (1.0 + 1e-12) {
                return CalibrateOutcome {
                    ok: false,
                    violation: Some((n, x, y)),
                };
            }
        }
    }
    CalibrateOutcome {
        ok: true,
        violation: None,
    }
}

/// Largest C (to 1e-6) passing `calibrate_bn`, located by bisection.
pub fn max_feasible_c(n_max: usize, grid_size: usize) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 4.0f64);
    while calibrate_bn(hi, n_max, grid_size).ok {
        hi *= 2.0;
        if hi > 1e3 {
            return hi;
        }
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if calibrate_bn(mid, n_max, grid_size).ok {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
