//! Command-line driver: parse a potential spec, run a named experiment, emit
//! machine-readable CSV or JSON.
//!
//! Exit codes: 0 success, 2 validation error (bad flags, malformed spec,
//! inadmissible request), 3 when numerical-instability flags are present and
//! --strict was given.
//!
//! Every emitted table carries the sha-256 hash of the run configuration and
//! the tolerance, so a result file can be traced back to the exact invocation
//! that produced it; reruns with the same configuration are bit-identical.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use scatter1d::{dirac, eigen, multilinear, potential, quad, spectral, waveop};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Serialize)]
#[command(name = "scatter1d", version, about = "1D scattering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Working tolerance recorded in the output and used for flag thresholds
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Exit 3 when any numerical-instability flag is raised
    #[arg(long, global = true)]
    strict: bool,
    /// Seed for randomized subcommands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// Regular solution u(x) of −u″ + Vu = zu with u(0)=0, u′(0)=1
    Eigen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        z_re: f64,
        #[arg(long, default_value_t = 0.1)]
        z_im: f64,
        #[arg(long, default_value_t = 20.0)]
        x_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Weyl m-function at E + iε together with its ε → 0 boundary limit
    Mfun {
        #[arg(long)]
        spec: PathBuf,
        /// Energies, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0, 4.0])]
        energies: Vec<f64>,
        /// Imaginary offsets ε; a boundary-limit row (ε = 0) is always added
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4])]
        eps: Vec<f64>,
    },
    /// m, ac density, γ, and ω = −2 arg γ on a λ grid
    SpectralTable {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        lambda_min: f64,
        #[arg(long, default_value_t = 3.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Scattering data: S-multiplier (half line) or t, r coefficients (whole line)
    Scatter {
        #[arg(long)]
        spec: PathBuf,
        /// λ values, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        lambda: Vec<f64>,
        #[arg(long, value_enum, default_value_t = GeometryArg::Half)]
        geometry: GeometryArg,
    },
    /// e^{−itH_V} applied to a Gaussian packet, half line
    Evolve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// λ band [lo, hi] of the packet transform grid
        #[arg(long, num_args = 2, default_values_t = [0.25, 2.8])]
        band: Vec<f64>,
        #[arg(long, default_value_t = 80.0)]
        x_max: f64,
        #[arg(long, default_value_t = 30.0)]
        x0: f64,
        #[arg(long, default_value_t = 0.02)]
        alpha: f64,
        #[arg(long, default_value_t = 1.5)]
        k: f64,
        #[arg(long, default_value_t = 80)]
        x_panels: usize,
        #[arg(long, default_value_t = 40)]
        lambda_panels: usize,
    },
    /// Wave-operator convergence experiment on a time schedule
    Waveop {
        #[arg(long)]
        spec: PathBuf,
        /// λ band [lo, hi]
        #[arg(long, num_args = 2, default_values_t = [0.25, 2.8])]
        band: Vec<f64>,
        /// geometric:T0:N — times T0·2^{k/2}, k < N
        #[arg(long, default_value = "geometric:10:5")]
        schedule: String,
        /// Run the ordinary (unmodified) comparison dynamics
        #[arg(long)]
        unmodified: bool,
        #[arg(long, default_value_t = 30.0)]
        x0: f64,
        #[arg(long, default_value_t = 0.02)]
        alpha: f64,
        #[arg(long, default_value_t = 250.0)]
        x_max: f64,
        #[arg(long, default_value_t = 250)]
        x_panels: usize,
        #[arg(long, default_value_t = 190)]
        lambda_panels: usize,
    },
    /// Embedded-eigenvalue designer: |V| = A/(1+x) phase-locked at energy E
    Dirac {
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        #[arg(long, default_value_t = 1.2)]
        amplitude: f64,
        #[arg(long, default_value_t = 400.0)]
        x_max: f64,
        #[arg(long, default_value_t = 8001)]
        samples: usize,
    },
    /// Multilinear bound report on a random step-function corpus
    MultilinearCheck {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Corpus descriptor, e.g. seed:7
        #[arg(long, default_value = "seed:7")]
        corpus: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Norms and integrability diagnostics of the potential
    Norms {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum GeometryArg {
    Half,
    Whole,
}

/// A finished run: column names, rows of formatted values, and whether any
/// instability flag was raised.
struct Output {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    unstable: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<potential::PotentialError> for CliError {
    fn from(e: potential::PotentialError) -> Self {
        CliError::Validation(e.to_string())
    }
}
impl From<eigen::EigenError> for CliError {
    fn from(e: eigen::EigenError) -> Self {
        CliError::Validation(e.to_string())
    }
}
impl From<spectral::SpectralError> for CliError {
    fn from(e: spectral::SpectralError) -> Self {
        CliError::Validation(e.to_string())
    }
}
impl From<waveop::WaveopError> for CliError {
    fn from(e: waveop::WaveopError) -> Self {
        CliError::Validation(e.to_string())
    }
}
impl From<dirac::DiracError> for CliError {
    fn from(e: dirac::DiracError) -> Self {
        CliError::Validation(e.to_string())
    }
}
impl From<multilinear::MultilinearError> for CliError {
    fn from(e: multilinear::MultilinearError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config_json = serde_json::to_string(&cli).expect("config serialization");
    let hash = {
        let mut h = Sha256::new();
        h.update(config_json.as_bytes());
        let digest = h.finalize();
        let mut s = String::with_capacity(16);
        for b in &digest[..8] {
            s.push_str(&format!("{b:02x}"));
        }
        s
    };
    match run(&cli) {
        Ok(output) => {
            if let Err(e) = emit(&cli, &hash, &output) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if cli.strict && output.unstable {
                eprintln!("instability flags present (strict mode)");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, hash: &str, output: &Output) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Csv => {
            let mut header = output.columns.join(",");
            header.push_str(",config_hash,tol");
            writeln!(buf, "{header}")?;
            for row in &output.rows {
                writeln!(buf, "{},{},{}", row.join(","), hash, cli.tol)?;
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = output
                .rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (name, val) in output.columns.iter().zip(row) {
                        let parsed = val
                            .parse::<f64>()
                            .ok()
                            .and_then(serde_json::Number::from_f64)
                            .map(serde_json::Value::Number)
                            .unwrap_or_else(|| serde_json::Value::String(val.clone()));
                        obj.insert((*name).to_string(), parsed);
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({
                "config_hash": hash,
                "tol": cli.tol,
                "unstable": output.unstable,
                "rows": rows,
            });
            writeln!(buf, "{}", serde_json::to_string_pretty(&doc).unwrap())?;
        }
    }
    match &cli.out {
        Some(path) => write_atomic(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

/// Write-temp-then-rename so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn load_potential(path: &Path) -> Result<potential::Potential, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(potential::PotentialSpec::parse(&text)?.build()?)
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = eigen::EigenConfig::default();
    match &cli.command {
        Command::Eigen {
            spec,
            z_re,
            z_im,
            x_max,
            points,
        } => {
            if *points < 2 || *x_max <= 0.0 {
                return Err(CliError::Validation("need points ≥ 2 and x-max > 0".into()));
            }
            let p = load_potential(spec)?;
            let z = Complex64::new(*z_re, *z_im);
            let grid: Vec<f64> = (0..*points)
                .map(|i| x_max * i as f64 / (*points - 1) as f64)
                .collect();
            let init = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            let sol = eigen::solve_ivp(&p, z, init, 0.0, &grid, cfg.ode_tol)?;
            let rows = (0..grid.len())
                .map(|i| {
                    vec![
                        fmt(grid[i]),
                        fmt(sol.u[i].re),
                        fmt(sol.u[i].im),
                        fmt(sol.du[i].re),
                        fmt(sol.du[i].im),
                    ]
                })
                .collect();
            Ok(Output {
                columns: vec!["x", "re_u", "im_u", "re_du", "im_du"],
                rows,
                unstable: false,
            })
        }

        Command::Mfun {
            spec,
            energies,
            eps,
        } => {
            let p = load_potential(spec)?;
            let mut rows = Vec::new();
            let mut unstable = false;
            for &e in energies {
                for &ep in eps {
                    if ep <= 0.0 {
                        return Err(CliError::Validation("eps must be positive".into()));
                    }
                    let mv = eigen::weyl_m(&p, Complex64::new(e, ep), None, &cfg)?;
                    rows.push(vec![
                        fmt(e),
                        fmt(ep),
                        fmt(mv.m.re),
                        fmt(mv.m.im),
                        (mv.pole as u8).to_string(),
                        "1".into(),
                    ]);
                }
                if e > cfg.lambda_floor * cfg.lambda_floor {
                    let d = spectral::ac_density(&p, e.sqrt(), &cfg)?;
                    let m = d.m.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    unstable |= !d.stable;
                    rows.push(vec![
                        fmt(e),
                        fmt(0.0),
                        fmt(m.re),
                        fmt(m.im),
                        "0".into(),
                        (d.stable as u8).to_string(),
                    ]);
                }
            }
            Ok(Output {
                columns: vec!["e", "eps", "re_m", "im_m", "pole", "stable"],
                rows,
                unstable,
            })
        }

        Command::SpectralTable {
            spec,
            lambda_min,
            lambda_max,
            points,
        } => {
            if *points < 2 || lambda_min >= lambda_max {
                return Err(CliError::Validation("need points ≥ 2 and an increasing λ range".into()));
            }
            let p = load_potential(spec)?;
            let lambdas: Vec<f64> = (0..*points)
                .map(|i| lambda_min + (lambda_max - lambda_min) * i as f64 / (*points - 1) as f64)
                .collect();
            let table = spectral::SpectralTable::build(&p, &lambdas, &cfg)?;
            let unstable = table.rows.iter().any(|r| !r.stable);
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        fmt(r.lambda),
                        fmt(r.m.re),
                        fmt(r.m.im),
                        fmt(r.density),
                        fmt(r.gamma.re),
                        fmt(r.gamma.im),
                        fmt(r.omega),
                        (r.stable as u8).to_string(),
                        (r.masked as u8).to_string(),
                    ]
                })
                .collect();
            Ok(Output {
                columns: vec![
                    "lambda", "re_m", "im_m", "density", "re_gamma", "im_gamma", "omega",
                    "stable", "masked",
                ],
                rows,
                unstable,
            })
        }

        Command::Scatter {
            spec,
            lambda,
            geometry,
        } => {
            let p = load_potential(spec)?;
            match geometry {
                GeometryArg::Half => {
                    let mut rows = Vec::new();
                    let mut unstable = false;
                    for &l in lambda {
                        let s = waveop::scattering_halfline(&p, l, &cfg)?;
                        unstable |= s.resonant;
                        rows.push(vec![
                            fmt(l),
                            fmt(s.multiplier.re),
                            fmt(s.multiplier.im),
                            fmt(s.moller_phase),
                            (s.resonant as u8).to_string(),
                        ]);
                    }
                    Ok(Output {
                        columns: vec!["lambda", "re_s", "im_s", "moller_phase", "resonant"],
                        rows,
                        unstable,
                    })
                }
                GeometryArg::Whole => {
                    let mut rows = Vec::new();
                    for &l in lambda {
                        let s = waveop::scattering_wholeline(&p, l, &cfg)?;
                        rows.push(vec![
                            fmt(l),
                            fmt(s.t1.re),
                            fmt(s.t1.im),
                            fmt(s.r1.re),
                            fmt(s.r1.im),
                            fmt(s.t2.re),
                            fmt(s.t2.im),
                            fmt(s.r2.re),
                            fmt(s.r2.im),
                            fmt(s.unitarity_defect()),
                        ]);
                    }
                    Ok(Output {
                        columns: vec![
                            "lambda", "re_t1", "im_t1", "re_r1", "im_r1", "re_t2", "im_t2",
                            "re_r2", "im_r2", "unitarity_defect",
                        ],
                        rows,
                        unstable: false,
                    })
                }
            }
        }

        Command::Evolve {
            spec,
            t,
            band,
            x_max,
            x0,
            alpha,
            k,
            x_panels,
            lambda_panels,
        } => {
            let p = load_potential(spec)?;
            let (lo, hi) = (band[0], band[1]);
            if lo <= 0.0 || lo >= hi {
                return Err(CliError::Validation("band must satisfy 0 < lo < hi".into()));
            }
            let xg = quad::WeightedGrid::gauss_panels(0.0, *x_max, *x_panels);
            let lg = quad::WeightedGrid::gauss_panels(lo, hi, *lambda_panels);
            let table = spectral::build_psi(&p, &lg, &xg, &cfg)?;
            let gx = dirichlet_packet(&xg.points, *x0, *alpha, *k);
            let ev = spectral::evolve_v(&table, &gx, *t)?;
            let unstable = ev.beyond_horizon || ev.norm_defect > cli.tol.max(1e-4);
            let rows = (0..xg.points.len())
                .map(|j| {
                    vec![
                        fmt(xg.points[j]),
                        fmt(ev.values[j].re),
                        fmt(ev.values[j].im),
                    ]
                })
                .collect();
            Ok(Output {
                columns: vec!["x", "re_psi", "im_psi"],
                rows,
                unstable,
            })
        }

        Command::Waveop {
            spec,
            band,
            schedule,
            unmodified,
            x0,
            alpha,
            x_max,
            x_panels,
            lambda_panels,
        } => {
            let p = load_potential(spec)?;
            let (lo, hi) = (band[0], band[1]);
            if lo <= 0.0 || lo >= hi {
                return Err(CliError::Validation("band must satisfy 0 < lo < hi".into()));
            }
            let times = parse_schedule(schedule)?;
            let xg = quad::WeightedGrid::gauss_panels(0.0, *x_max, *x_panels);
            let lg = quad::WeightedGrid::gauss_panels(lo, hi, *lambda_panels);
            let table = spectral::build_psi(&p, &lg, &xg, &cfg)?;
            // incoming packet so the dynamics actually scatters
            let gx = dirichlet_packet(&xg.points, *x0, *alpha, -(0.5 * (lo + hi)));
            let report = waveop::waveop_experiment(&p, &table, &gx, &times, !*unmodified)?;
            if !report.admissible {
                return Err(CliError::Validation(
                    "improper integral of V divergent: the unmodified wave operator does not apply"
                        .into(),
                ));
            }
            let unstable = times.last().is_some_and(|&t| t > report.horizon);
            let rows = (0..report.ts.len())
                .map(|i| {
                    vec![
                        fmt(report.ts[i]),
                        fmt(report.increments[i]),
                        fmt(report.dist_to_limit[i]),
                        fmt(report.norm_defect[i]),
                    ]
                })
                .collect();
            Ok(Output {
                columns: vec!["t", "cauchy_increment", "dist_to_limit", "norm_defect"],
                rows,
                unstable,
            })
        }

        Command::Dirac {
            e,
            amplitude,
            x_max,
            samples,
        } => {
            if *amplitude < 0.0 {
                return Err(CliError::Validation("amplitude must be ≥ 0".into()));
            }
            let (_, state, report) = dirac::design_embedded(*e, *amplitude, *x_max, *samples)?;
            let mut rows = vec![vec![
                "report".into(),
                String::new(),
                String::new(),
                fmt(report.decay_exponent),
                fmt(report.tail_ratio),
                fmt(report.lock_defect),
                (report.lock_failed as u8).to_string(),
            ]];
            for (i, &x) in state.grid.iter().enumerate() {
                let mut row = vec![fmt(x), fmt(state.log_r[i]), fmt(state.theta1[i])];
                row.extend(std::iter::repeat(String::new()).take(4));
                rows.push(row);
            }
            Ok(Output {
                columns: vec![
                    "x", "log_r", "theta1", "decay_exponent", "tail_ratio", "lock_defect",
                    "lock_failed",
                ],
                rows,
                unstable: report.lock_failed,
            })
        }

        Command::MultilinearCheck {
            n,
            corpus,
            count,
            depth,
        } => {
            if *n == 0 || *n > 5 {
                return Err(CliError::Validation("n must be in 1..=5".into()));
            }
            let seed = parse_corpus(corpus)?.unwrap_or(cli.seed);
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let ms = multilinear::MartingaleStructure::uniform(0.0, 1.0, *depth);
            let corpus: Vec<Vec<multilinear::StepFn>> = (0..*count)
                .map(|_| {
                    (0..*n)
                        .map(|_| {
                            let steps = rng.gen_range(2..=6);
                            multilinear::StepFn::random(&mut rng, steps, 0.0, 1.0)
                        })
                        .collect()
                })
                .collect();
            // Calibrate the constant on the corpus: rhs scales like c^{n+1},
            // so each sample pins the smallest admissible c.
            let mut c: f64 = 0.1;
            for fs in &corpus {
                let probe = multilinear::check_numerical_bound(fs, &ms, 0.1, 0.2, 1.0)?;
                let pow = 1.0 / (*n as f64 + 1.0);
                if probe.margin.is_finite() && probe.margin > 0.0 {
                    c = c.max(probe.margin.recip().powf(pow));
                }
                if probe.margin_star.is_finite() && probe.margin_star > 0.0 {
                    c = c.max(probe.margin_star.recip().powf(pow));
                }
            }
            c *= 1.0 + 1e-9;
            let c_bn = multilinear::max_feasible_c(20, 10_000);
            let calibrated = multilinear::calibrate_bn(c_bn, 20, 10_000);
            let mut rows = Vec::new();
            let mut all_hold = true;
            let mut min_margin = f64::INFINITY;
            for (sample, fs) in corpus.iter().enumerate() {
                let rep = multilinear::check_numerical_bound(fs, &ms, 0.1, 0.2, c)?;
                all_hold &= rep.holds;
                min_margin = min_margin.min(rep.margin.min(rep.margin_star));
                rows.push(vec![
                    sample.to_string(),
                    fmt(rep.lhs),
                    fmt(rep.rhs),
                    fmt(rep.margin),
                    fmt(rep.margin_star),
                    (rep.holds as u8).to_string(),
                ]);
            }
            rows.push(vec![
                "summary".into(),
                fmt(c),
                fmt(min_margin),
                fmt(c_bn),
                (calibrated.ok as u8).to_string(),
                (all_hold as u8).to_string(),
            ]);
            Ok(Output {
                columns: vec!["sample", "lhs", "rhs", "margin", "margin_star", "holds"],
                rows,
                unstable: !all_hold,
            })
        }

        Command::Norms { spec } => {
            let p = load_potential(spec)?;
            let cutoff = p.tail_cutoff(1e-8, 1e4);
            let l1 = p.norm_lp(1.0, 0.0, cutoff)?;
            let l2 = p.norm_lp(2.0, 0.0, cutoff)?;
            let lp = p.norm_lp(1.8, 0.0, cutoff)?;
            let amalgam = p.norm_amalgam(1.8)?;
            // probe the tail on a window past the effective support
            let tail = p.improper_tail(2.0 * cutoff.max(1.0))?;
            let rows = vec![vec![
                fmt(l1.value),
                fmt(l2.value),
                fmt(lp.value),
                fmt(amalgam.value),
                fmt(cutoff),
                fmt(tail.value),
                (tail.convergent as u8).to_string(),
            ]];
            Ok(Output {
                columns: vec![
                    "l1", "l2", "l1p8", "amalgam_1p8", "tail_cutoff", "tail_integral",
                    "tail_convergent",
                ],
                rows,
                unstable: false,
            })
        }
    }
}

/// Dirichlet-compatible Gaussian packet: e^{−α(x−x0)²}e^{ikx} minus its
/// mirror image, so the packet vanishes at x = 0.
fn dirichlet_packet(xs: &[f64], x0: f64, alpha: f64, k: f64) -> Vec<Complex64> {
    xs.iter()
        .map(|&x| {
            let a = (-alpha * (x - x0) * (x - x0)).exp();
            let b = (-alpha * (x + x0) * (x + x0)).exp();
            a * Complex64::new(0.0, k * x).exp() - b * Complex64::new(0.0, -k * x).exp()
        })
        .collect()
}

/// `geometric:T0:N` → T0·2^{k/2} for k < N.
fn parse_schedule(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["geometric", t0, n] => {
            let t0: f64 = t0
                .parse()
                .map_err(|_| CliError::Validation(format!("bad schedule start '{t0}'")))?;
            let n: usize = n
                .parse()
                .map_err(|_| CliError::Validation(format!("bad schedule length '{n}'")))?;
            if t0 <= 0.0 || n == 0 {
                return Err(CliError::Validation("schedule needs T0 > 0 and N ≥ 1".into()));
            }
            Ok(waveop::geometric_schedule(t0, n))
        }
        _ => Err(CliError::Validation(format!(
            "unrecognized schedule '{text}' (expected geometric:T0:N)"
        ))),
    }
}

/// `seed:<u64>` → Some(seed); empty → None (fall back to --seed).
fn parse_corpus(text: &str) -> Result<Option<u64>, CliError> {
    if text.is_empty() {
        return Ok(None);
    }
    match text.split_once(':') {
        Some(("seed", v)) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Validation(format!("bad corpus seed '{v}'"))),
        _ => Err(CliError::Validation(format!(
            "unrecognized corpus '{text}' (expected seed:<int>)"
        ))),
    }
}
