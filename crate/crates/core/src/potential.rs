//! Potentials in the decay classes L^p, L^1+L^p and ℓ^p(L^1): construction,
//! pointwise evaluation, cumulative integrals Q(x) = ∫_0^x V, norms, and the
//! improper-integral diagnostic that gates the unmodified wave-operator
//! experiments.
//!
//! Half-line potentials are extended by zero to x < 0 so the same objects can
//! be fed to the whole-line machinery.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::quad;

/// Default absolute quadrature tolerance for cumulative integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum PotentialError {
    #[error("x = {0} outside the sampled grid domain [{1}, {2}]")]
    OutOfDomain(f64, f64, f64),
    #[error("quadrature failed to converge on [{0}, {1}]")]
    QuadratureFailure(f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown potential kind: {0}")]
    UnknownKind(String),
    #[error("malformed spec: {0}")]
    MalformedSpec(String),
}

/// Kind of a potential together with its defining parameters.
#[derive(Debug, Clone)]
pub enum Kind {
    Zero,
    /// height·χ_{[a,b]}
    SquareBarrier { height: f64, a: f64, b: f64 },
    /// c·(1+x)^{-alpha} for x ≥ 0
    PowerDecay { c: f64, alpha: f64 },
    /// c·sin(2x)/x for x > 0 (value 2c at the origin)
    WignerVonNeumann { c: f64 },
    /// height · 16·(s(1-s))² with s = (x-a)/(b-a); C¹ bump of sup-norm `height`
    Bump { height: f64, a: f64, b: f64 },
    /// Σ_{n≥1} a_n n^{-g_exponent} f(x-n), a_n i.i.d. uniform on [-1,1],
    /// f(s) = 16·(s(1-s))² on (0,1)
    RandomDecaying { g_exponent: f64, seed: u64 },
    /// linear interpolation of samples; out-of-grid evaluation is an error
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

/// Declared membership class; metadata only, never enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeclaredClass {
    L1,
    Lp(f64),
    Amalgam(f64),
    Unknown,
}

struct RandomCoeffs {
    rng: ChaCha8Rng,
    coeffs: Vec<f64>,
}

/// Cache of cumulative-integral values at integer nodes, extended on demand.
struct CumCache {
    /// q_pos[k] = ∫_0^k V
    q_pos: Vec<f64>,
    /// q_neg[k] = ∫_0^{-k} V (signed)
    q_neg: Vec<f64>,
}

pub struct Potential {
    kind: Kind,
    class: DeclaredClass,
    quad_tol: f64,
    cache: Mutex<CumCache>,
    random: Option<Mutex<RandomCoeffs>>,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Potential")
            .field("kind", &self.kind)
            .field("class", &self.class)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormOutcome {
    pub value: f64,
    pub finite: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailReport {
    /// ∫_0^N V
    pub value: f64,
    /// sup_{N' ∈ [N/2, N]} |Q(N') - Q(N)|
    pub oscillation: f64,
    pub convergent: bool,
}

impl Potential {
    pub fn new(kind: Kind, class: DeclaredClass) -> Self {
        let random = match &kind {
            Kind::RandomDecaying { seed, .. } => Some(Mutex::new(RandomCoeffs {
                rng: ChaCha8Rng::seed_from_u64(*seed),
                coeffs: Vec::new(),
            })),
            _ => None,
        };
        Potential {
            kind,
            class,
            quad_tol: DEFAULT_QUAD_TOL,
            cache: Mutex::new(CumCache {
                q_pos: vec![0.0],
                q_neg: vec![0.0],
            }),
            random,
        }
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn class(&self) -> DeclaredClass {
        self.class
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    fn coeff(&self, n: usize) -> f64 {
        let m = self.random.as_ref().expect("random kind");
        let mut state = m.lock().unwrap();
        while state.coeffs.len() <= n {
            let a: f64 = state.rng.gen_range(-1.0..=1.0);
            state.coeffs.push(a);
        }
        state.coeffs[n]
    }

    /// V(x). Half-line kinds return 0 for x < 0.
    pub fn eval(&self, x: f64) -> Result<f64, PotentialError> {
        match &self.kind {
            Kind::Zero => Ok(0.0),
            Kind::SquareBarrier { height, a, b } => {
                Ok(if x >= *a && x <= *b { *height } else { 0.0 })
            }
            Kind::PowerDecay { c, alpha } => {
                if x < 0.0 {
                    Ok(0.0)
                } else {
                    Ok(c * (1.0 + x).powf(-alpha))
                }
            }
            Kind::WignerVonNeumann { c } => {
                if x < 0.0 {
                    Ok(0.0)
                } else if x.abs() < 1e-8 {
                    Ok(2.0 * c)
                } else {
                    Ok(c * (2.0 * x).sin() / x)
                }
            }
            Kind::Bump { height, a, b } => {
                if x <= *a || x >= *b {
                    Ok(0.0)
                } else {
                    let s = (x - a) / (b - a);
                    Ok(height * 16.0 * (s * (1.0 - s)).powi(2))
                }
            }
            Kind::RandomDecaying { g_exponent, .. } => {
                if x < 1.0 {
                    return Ok(0.0);
                }
                let n = x.floor() as usize;
                let s = x - n as f64;
                if s <= 0.0 || s >= 1.0 {
                    return Ok(0.0);
                }
                let profile = 16.0 * (s * (1.0 - s)).powi(2);
                Ok(self.coeff(n) * (n as f64).powf(-g_exponent) * profile)
            }
            Kind::Sampled { grid, values } => {
                let (lo, hi) = (grid[0], grid[grid.len() - 1]);
                if x < lo || x > hi {
                    return Err(PotentialError::OutOfDomain(x, lo, hi));
                }
                let idx = match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
                    Ok(i) => return Ok(values[i]),
                    Err(i) => i,
                };
                let (x0, x1) = (grid[idx - 1], grid[idx]);
                let t = (x - x0) / (x1 - x0);
                Ok(values[idx - 1] * (1.0 - t) + values[idx] * t)
            }
        }
    }

    /// Evaluation for internal quadrature loops where the domain has already
    /// been checked; out-of-grid sampled points contribute zero.
    fn eval_or_zero(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(0.0)
    }

    /// Bounded support, when one is declared by the kind.
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Zero => Some((0.0, 0.0)),
            Kind::SquareBarrier { a, b, .. } | Kind::Bump { a, b, .. } => Some((*a, *b)),
            Kind::Sampled { grid, .. } => Some((grid[0], grid[grid.len() - 1])),
            _ => None,
        }
    }

    /// Smallest x ≥ 0 with ∫_x^∞ |V| < tol, capped at `cap` when the tail is
    /// not integrable (Wigner–von Neumann, slow power decay).
    pub fn tail_cutoff(&self, tol: f64, cap: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::SquareBarrier { b, .. } | Kind::Bump { b, .. } => b.max(0.0),
            Kind::Sampled { grid, .. } => grid[grid.len() - 1].max(0.0),
            Kind::PowerDecay { c, alpha } => {
                if *alpha > 1.0 {
                    let x = (c.abs() / ((alpha - 1.0) * tol)).powf(1.0 / (alpha - 1.0)) - 1.0;
                    x.clamp(0.0, cap)
                } else {
                    cap
                }
            }
            Kind::WignerVonNeumann { .. } => cap,
            Kind::RandomDecaying { g_exponent, .. } => {
                // Σ_{n>x} n^{-g} ∫f ≤ x^{1-g}/(g-1)·(∫f); ∫_0^1 f = 16/30
                if *g_exponent > 1.0 {
                    let mass = 16.0 / 30.0;
                    let x = (mass / ((g_exponent - 1.0) * tol)).powf(1.0 / (g_exponent - 1.0));
                    x.clamp(0.0, cap)
                } else {
                    cap
                }
            }
        }
    }

    fn segment_integral(&self, a: f64, b: f64) -> Result<f64, PotentialError> {
        // Piecewise-linear sampled data integrates exactly by trapezoids on
        // its own grid.
        if let Kind::Sampled { grid, values } = &self.kind {
            return Ok(sampled_integral(grid, values, a, b));
        }
        let r = quad::integrate_real(|x| self.eval_or_zero(x), a, b, self.quad_tol);
        if !r.converged {
            return Err(PotentialError::QuadratureFailure(a, b));
        }
        Ok(r.value.re)
    }

    /// Q(x) = ∫_0^x V (signed for x < 0), through the integer-node cache.
    pub fn cumulative(&self, x: f64) -> Result<f64, PotentialError> {
        if x == 0.0 {
            return Ok(0.0);
        }
        let node = x.abs().floor() as usize;
        let base = {
            // extend cache up to `node` before reading
            let need_extend = {
                let cache = self.cache.lock().unwrap();
                let vec = if x >= 0.0 { &cache.q_pos } else { &cache.q_neg };
                vec.len() <= node
            };
            if need_extend {
                // compute segments outside the lock, then splice them in
                let start = {
                    let cache = self.cache.lock().unwrap();
                    if x >= 0.0 {
                        cache.q_pos.len()
                    } else {
                        cache.q_neg.len()
                    }
                };
                let mut segs = Vec::new();
                for k in start..=node {
                    let (a, b) = if x >= 0.0 {
                        ((k - 1) as f64, k as f64)
                    } else {
                        (-(k as f64), -((k - 1) as f64))
                    };
                    let v = self.segment_integral(a, b)?;
                    segs.push(if x >= 0.0 { v } else { -v });
                }
                let mut cache = self.cache.lock().unwrap();
                let vec = if x >= 0.0 {
                    &mut cache.q_pos
                } else {
                    &mut cache.q_neg
                };
                // another thread may have extended concurrently
                for (i, dv) in segs.into_iter().enumerate() {
                    let k = start + i;
                    if vec.len() == k {
                        let prev = vec[k - 1];
                        vec.push(prev + dv);
                    }
                }
            }
            let cache = self.cache.lock().unwrap();
            if x >= 0.0 {
                cache.q_pos[node]
            } else {
                cache.q_neg[node]
            }
        };
        let node_x = if x >= 0.0 { node as f64 } else { -(node as f64) };
        if x == node_x {
            return Ok(base);
        }
        let rest = if x >= 0.0 {
            self.segment_integral(node_x, x)?
        } else {
            -self.segment_integral(x, node_x)?
        };
        Ok(base + rest)
    }

    /// (∫_a^b |V|^p)^{1/p}. Pass `b = f64::INFINITY` for the improper case;
    /// divergence is reported through the `finite` flag, never an error.
    pub fn norm_lp(&self, p: f64, a: f64, b: f64) -> Result<NormOutcome, PotentialError> {
        assert!(p >= 1.0, "exponent must be >= 1");
        assert!(a < b);
        let integrand = |x: f64| self.eval_or_zero(x).abs().powf(p);
        if b.is_finite() {
            let r = quad::integrate_real(integrand, a, b, self.quad_tol);
            if !r.converged {
                return Err(PotentialError::QuadratureFailure(a, b));
            }
            return Ok(NormOutcome {
                value: r.value.re.max(0.0).powf(1.0 / p),
                finite: true,
            });
        }
        if let Some((_, hi)) = self.support() {
            let r = quad::integrate_real(integrand, a, hi.max(a + 1.0), self.quad_tol);
            return Ok(NormOutcome {
                value: r.value.re.max(0.0).powf(1.0 / p),
                finite: true,
            });
        }
        let (sum, finite) = self.improper_cell_sum(|x| integrand(x), a)?;
        Ok(NormOutcome {
            value: if finite { sum.powf(1.0 / p) } else { f64::INFINITY },
            finite,
        })
    }

    /// Sum of ∫ integrand over unit cells [a+k, a+k+1), with a per-decade
    /// geometric tail extrapolation once the direct window [a, a+4096] is
    /// exhausted. Returns (value incl. tail estimate, finite flag).
    fn improper_cell_sum<F: Fn(f64) -> f64>(
        &self,
        integrand: F,
        a: f64,
    ) -> Result<(f64, bool), PotentialError> {
        const CELLS: usize = 4096;
        let mut cells = Vec::with_capacity(CELLS);
        for k in 0..CELLS {
            let (lo, hi) = (a + k as f64, a + (k + 1) as f64);
            let r = quad::integrate_real(|x| integrand(x), lo, hi, self.quad_tol * 0.01);
            if !r.converged {
                return Err(PotentialError::QuadratureFailure(lo, hi));
            }
            cells.push(r.value.re.max(0.0));
        }
        let partial: f64 = cells.iter().sum();
        // decade sums over [1024, 2048) and [2048, 4096)
        let d1: f64 = cells[1024..2048].iter().sum();
        let d2: f64 = cells[2048..4096].iter().sum();
        if d2 <= 1e-14 * (1.0 + partial) {
            return Ok((partial, true));
        }
        let r = d2 / d1.max(1e-300);
        if r >= 0.999 {
            return Ok((partial, false));
        }
        // geometric in decades: remaining ≈ d2·r/(1-r)
        Ok((partial + d2 * r / (1.0 - r), true))
    }

    /// ℓ^p(L^1) amalgam norm: (Σ_n (∫_n^{n+1} |V|)^p)^{1/p}, cells on the
    /// integer grid.
    pub fn norm_amalgam(&self, p: f64) -> Result<NormOutcome, PotentialError> {
        assert!(p >= 1.0);
        let cell_l1 = |n: f64| -> Result<f64, PotentialError> {
            if let Kind::Sampled { grid, values } = &self.kind {
                let (lo, hi) = (grid[0], grid[grid.len() - 1]);
                if n + 1.0 <= lo || n >= hi {
                    return Ok(0.0);
                }
                return Ok(sampled_abs_integral(grid, values, n.max(lo), (n + 1.0).min(hi)));
            }
            let r = quad::integrate_real(|x| self.eval_or_zero(x).abs(), n, n + 1.0, self.quad_tol);
            if !r.converged {
                return Err(PotentialError::QuadratureFailure(n, n + 1.0));
            }
            Ok(r.value.re.max(0.0))
        };
        // negative cells (only bounded-support kinds reach x < 0)
        let n_min = match self.support() {
            Some((lo, _)) => lo.floor() as i64,
            None => 0,
        };
        let mut sum = 0.0;
        for n in n_min..0 {
            sum += cell_l1(n as f64)?.powf(p);
        }
        if let Some((_, hi)) = self.support() {
            let n_max = hi.ceil() as i64;
            for n in 0..n_max.max(1) {
                sum += cell_l1(n as f64)?.powf(p);
            }
            return Ok(NormOutcome {
                value: sum.powf(1.0 / p),
                finite: true,
            });
        }
        const CELLS: usize = 4096;
        let mut cells = Vec::with_capacity(CELLS);
        for k in 0..CELLS {
            cells.push(cell_l1(k as f64)?.powf(p));
        }
        let partial: f64 = sum + cells.iter().sum::<f64>();
        let d1: f64 = cells[1024..2048].iter().sum();
        let d2: f64 = cells[2048..4096].iter().sum();
        if d2 <= 1e-14 * (1.0 + partial) {
            return Ok(NormOutcome {
                value: partial.powf(1.0 / p),
                finite: true,
            });
        }
        let r = d2 / d1.max(1e-300);
        if r >= 0.999 {
            return Ok(NormOutcome {
                value: f64::INFINITY,
                finite: false,
            });
        }
        Ok(NormOutcome {
            value: (partial + d2 * r / (1.0 - r)).powf(1.0 / p),
            finite: true,
        })
    }

    /// ∫_0^N V plus an oscillation estimate over the last octave [N/2, N],
    /// serving as convergence evidence for the improper integral ∫_0^∞ V.
    pub fn improper_tail(&self, n: f64) -> Result<TailReport, PotentialError> {
        assert!(n > 0.0);
        let q_n = self.cumulative(n)?;
        let samples = 129;
        let mut osc: f64 = 0.0;
        for i in 0..samples {
            let x = n / 2.0 + (n / 2.0) * i as f64 / (samples - 1) as f64;
            let q = self.cumulative(x)?;
            osc = osc.max((q - q_n).abs());
        }
        let convergent = osc <= 0.02 * (1.0 + q_n.abs());
        Ok(TailReport {
            value: q_n,
            oscillation: osc,
            convergent,
        })
    }
}

fn sampled_bracket(grid: &[f64], x: f64) -> usize {
    match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(i) => i,
    }
}

/// Exact integral of the piecewise-linear interpolant over [a, b] ∩ grid span.
fn sampled_integral(grid: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    let lo = a.max(grid[0]);
    let hi = b.min(grid[grid.len() - 1]);
    if lo >= hi {
        return 0.0;
    }
    let interp = |x: f64| -> f64 {
        let idx = sampled_bracket(grid, x).clamp(1, grid.len() - 1);
        let (x0, x1) = (grid[idx - 1], grid[idx]);
        let t = (x - x0) / (x1 - x0);
        values[idx - 1] * (1.0 - t) + values[idx] * t
    };
    let mut total = 0.0;
    let mut x = lo;
    while x < hi {
        // first grid node strictly beyond the cursor
        let idx = grid.partition_point(|&g| g <= x);
        let next = if idx < grid.len() { grid[idx].min(hi) } else { hi };
        if next <= x {
            break;
        }
        total += 0.5 * (interp(x) + interp(next)) * (next - x);
        x = next;
    }
    total
}

/// Same but with |·| applied, splitting segments at sign changes so the
/// result is exact for the interpolant.
fn sampled_abs_integral(grid: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    let lo = a.max(grid[0]);
    let hi = b.min(grid[grid.len() - 1]);
    if lo >= hi {
        return 0.0;
    }
    let interp = |x: f64| -> f64 {
        let idx = sampled_bracket(grid, x).clamp(1, grid.len() - 1);
        let (x0, x1) = (grid[idx - 1], grid[idx]);
        let t = (x - x0) / (x1 - x0);
        values[idx - 1] * (1.0 - t) + values[idx] * t
    };
    let mut total = 0.0;
    let mut x = lo;
    while x < hi {
        let idx = grid.partition_point(|&g| g <= x);
        let mut next = if idx < grid.len() { grid[idx].min(hi) } else { hi };
        if next <= x {
            break;
        }
        let (v0, v1) = (interp(x), interp(next));
        if v0 * v1 < 0.0 {
            // split at the zero crossing of the linear segment
            let z = x + v0 / (v0 - v1) * (next - x);
            if z > x && z < next {
                next = z;
            }
        }
        total += 0.5 * (interp(x).abs() + interp(next).abs()) * (next - x);
        if next >= hi {
            break;
        }
        x = next;
    }
    total
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

pub fn make_zero() -> Potential {
    Potential::new(Kind::Zero, DeclaredClass::L1)
}

pub fn make_square_barrier(height: f64, a: f64, b: f64) -> Potential {
    assert!(a < b);
    Potential::new(Kind::SquareBarrier { height, a, b }, DeclaredClass::L1)
}

pub fn make_power_decay(c: f64, alpha: f64) -> Potential {
    assert!(alpha > 0.0, "alpha must be positive");
    // (1+x)^{-alpha} ∈ L^p iff p·alpha > 1
    let class = if alpha > 1.0 {
        DeclaredClass::L1
    } else {
        DeclaredClass::Lp((1.0 / alpha) * 1.0001 + 0.05)
    };
    Potential::new(Kind::PowerDecay { c, alpha }, class)
}

pub fn make_wigner_von_neumann(c: f64) -> Potential {
    Potential::new(Kind::WignerVonNeumann { c }, DeclaredClass::Lp(1.5))
}

pub fn make_bump(height: f64, a: f64, b: f64) -> Potential {
    assert!(a < b);
    Potential::new(Kind::Bump { height, a, b }, DeclaredClass::L1)
}

pub fn make_random_decaying(g_exponent: f64, seed: u64) -> Potential {
    assert!(g_exponent > 0.0);
    let class = if g_exponent > 1.0 {
        DeclaredClass::L1
    } else {
        DeclaredClass::Amalgam((1.0 / g_exponent).min(1.99))
    };
    Potential::new(Kind::RandomDecaying { g_exponent, seed }, class)
}

pub fn make_sampled(grid: Vec<f64>, values: Vec<f64>) -> Result<Potential, PotentialError> {
    if grid.len() != values.len() || grid.len() < 2 {
        return Err(PotentialError::InvalidParameter(
            "grid and values must have equal length >= 2".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PotentialError::InvalidParameter(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(Potential::new(
        Kind::Sampled { grid, values },
        DeclaredClass::Unknown,
    ))
}

// ---------------------------------------------------------------------------
// PotentialSpec: the on-disk description
// ---------------------------------------------------------------------------

/// Textual description of a potential. JSON format:
/// `{"kind": "...", "params": {...}, "seed": int?}`. Unknown kinds are
/// rejected at parse time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl PotentialSpec {
    pub fn parse(text: &str) -> Result<Self, PotentialError> {
        let spec: PotentialSpec = serde_json::from_str(text)
            .map_err(|e| PotentialError::MalformedSpec(e.to_string()))?;
        // validate the kind eagerly
        spec.build()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization")
    }

    fn param_f64(&self, name: &str) -> Result<f64, PotentialError> {
        self.params
            .get(name)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| PotentialError::MalformedSpec(format!("missing numeric param '{name}'")))
    }

    pub fn build(&self) -> Result<Potential, PotentialError> {
        match self.kind.as_str() {
            "zero" => Ok(make_zero()),
            "square_barrier" => Ok(make_square_barrier(
                self.param_f64("height")?,
                self.param_f64("a")?,
                self.param_f64("b")?,
            )),
            "power_decay" => Ok(make_power_decay(
                self.param_f64("c")?,
                self.param_f64("alpha")?,
            )),
            "wigner_von_neumann" => Ok(make_wigner_von_neumann(self.param_f64("c")?)),
            "bump" => Ok(make_bump(
                self.param_f64("height")?,
                self.param_f64("a")?,
                self.param_f64("b")?,
            )),
            "random_decaying" => {
                let seed = self
                    .seed
                    .ok_or_else(|| PotentialError::MalformedSpec("random kind needs a seed".into()))?;
                Ok(make_random_decaying(self.param_f64("g_exponent")?, seed))
            }
            "sampled" => {
                let get = |name: &str| -> Result<Vec<f64>, PotentialError> {
                    self.params
                        .get(name)
                        .and_then(|v| v.as_array())
                        .map(|a| a.iter().filter_map(|x| x.as_f64()).collect())
                        .ok_or_else(|| {
                            PotentialError::MalformedSpec(format!("missing array param '{name}'"))
                        })
                };
                make_sampled(get("grid")?, get("values")?)
            }
            other => Err(PotentialError::UnknownKind(other.to_string())),
        }
    }
}
