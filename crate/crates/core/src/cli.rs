//! Command-line experiments.
//!
//! Every subcommand validates its flags into a typed configuration before any
//! computation, then writes one CSV or JSON artifact. Output goes to `--out`
//! when given, otherwise to `$NODAL_HARDY_OUT_DIR/<subcommand>.<ext>` when that
//! variable is set, otherwise to standard output.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when a numerical
//! diagnostic fails (for example a spectral scan that contradicts the
//! lower-bound condition).
//!
//! Homogeneous polynomial harmonics (`--family poly --poly-file FILE`) are
//! read either as JSON,
//!
//! ```text
//! [{"exponents": [1, 1, 0], "coefficient": 1.0}, ...]
//! ```
//!
//! or as plain text with one term per line, the exponents followed by the
//! coefficient (`1 1 0 1.0`); blank lines and `#` comments are ignored.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hardy::{
    delta_psi_residual, optimality_sweep, psi_local_scale, sample_off_nodal_point, sharp_constant, sharp_constant_of,
    weight_psi, BumpKind, BumpProfile,
};
use crate::harmonics::{validate_degree, Dimension, FamilyKind, HarmonicSpec, Parity, Polynomial};
use crate::output::{fmt_num, json_array, scan_csv, sweep_csv, write_atomic, JsonObject};
use crate::radial::{
    assemble, condition_holds, fall_to_center_report, lowest_eigenvalues, minimal_degree, regime_thresholds, spectrum,
    GridSpec, RadialProblem, Spacing, BOUNDED_TOL,
};

pub const OUT_DIR_ENV: &str = "NODAL_HARDY_OUT_DIR";

/// Tolerance on `|gap|` in `hardy-verify`, relative to `1 + C`.
const SWEEP_GAP_TOL: f64 = 1e-6;
/// Acceptable `residual(h) / residual(h/2)` band in `psi-check`.
const RATIO_BAND: (f64, f64) = (3.5, 4.5);
/// Bound on the relative `Δψ` residual at the fine step in `psi-check`.
const PSI_RESIDUAL_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "nodal-hardy", version, about = "Sharp Hardy constants and inverse-square spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lower bounds on k for the four existence regimes.
    Thresholds {
        #[arg(long = "N")]
        n: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rayleigh quotients of the minimizing sequence against the sharp constant.
    HardyVerify {
        #[command(flatten)]
        harmonic: HarmonicArgs,
        #[arg(long = "m", value_delimiter = ',', default_value = "1,2,4,8,16,32")]
        m_list: Vec<u32>,
        #[arg(long, default_value = "mollifier")]
        bump: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference residual of the Δψ identity at random off-nodal points.
    PsiCheck {
        #[command(flatten)]
        harmonic: HarmonicArgs,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Step for the reported residual.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Coarse step for the convergence ratio (compared against half of it).
        #[arg(long, default_value_t = 1e-2)]
        h_ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lowest eigenvalues of one Dirichlet truncation.
    Spectrum {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "log")]
        spacing: String,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lowest truncated eigenvalue as the inner cutoff shrinks.
    FallToCenter {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3")]
        eps: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-bound condition and λ_min over a grid of k and ℓ.
    PhaseDiagram {
        #[arg(long = "N")]
        n: i64,
        /// start,stop,step (inclusive)
        #[arg(long, allow_hyphen_values = true, default_value = "-10,2,1")]
        k_range: String,
        /// lo,hi (inclusive)
        #[arg(long, default_value = "0,4")]
        ell_range: String,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// csv (k,ell,condition,lambda_min) or json (no spectra)
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest ℓ for which the lower-bound condition holds.
    MinDegree {
        #[arg(long = "N")]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct HarmonicArgs {
    #[arg(long = "N")]
    n: i64,
    #[arg(long)]
    ell: Option<i64>,
    /// zonal, planar-cos, planar-sin, product or poly
    #[arg(long, default_value = "zonal")]
    family: String,
    #[arg(long)]
    poly_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    #[arg(long = "N")]
    n: i64,
    #[arg(long, default_value_t = 0)]
    ell: i64,
    #[arg(long, allow_negative_numbers = true)]
    k: f64,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long = "R", default_value_t = GridSpec::DEFAULT_OUTER)]
    outer: f64,
    #[arg(long = "n", default_value_t = GridSpec::DEFAULT_POINTS)]
    points: usize,
}

#[derive(Debug, Deserialize)]
struct PolyTerm {
    exponents: Vec<u32>,
    coefficient: f64,
}

/// Parses polynomial terms from the JSON or plain-text form described above.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let trimmed = text.trim_start();
    let terms = if trimmed.starts_with('[') {
        let parsed: Vec<PolyTerm> =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("polynomial JSON: {e}")))?;
        parsed.into_iter().map(|t| (t.exponents, t.coefficient)).collect()
    } else {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("polynomial line {}: `{line}`", lineno + 1));
            let (coef, exps) = fields.split_last().ok_or_else(bad)?;
            if exps.is_empty() {
                return Err(bad());
            }
            let coefficient: f64 = coef.parse().map_err(|_| bad())?;
            let exponents = exps.iter().map(|e| e.parse::<u32>()).collect::<std::result::Result<Vec<_>, _>>();
            terms.push((exponents.map_err(|_| bad())?, coefficient));
        }
        terms
    };
    Polynomial::new(terms)
}

fn build_harmonic(args: &HarmonicArgs) -> Result<HarmonicSpec> {
    let dim = Dimension::new(args.n)?;
    let kind: FamilyKind = args.family.parse()?;
    let require_ell = || {
        args.ell
            .ok_or_else(|| Error::Domain(format!("--ell is required for family `{}`", args.family)))
            .and_then(|ell| validate_degree(args.n, ell).map(|(_, l)| l))
    };
    let spec = match kind {
        FamilyKind::Zonal => HarmonicSpec::zonal(dim, require_ell()?)?,
        FamilyKind::PlanarCos => HarmonicSpec::planar(dim, require_ell()?, Parity::Cos)?,
        FamilyKind::PlanarSin => HarmonicSpec::planar(dim, require_ell()?, Parity::Sin)?,
        FamilyKind::Product => HarmonicSpec::product(dim)?,
        FamilyKind::Poly => {
            let path = args
                .poly_file
                .as_ref()
                .ok_or_else(|| Error::Domain("--poly-file is required for family `poly`".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            HarmonicSpec::homogeneous_poly(dim, parse_polynomial(&text)?)?
        }
    };
    if let Some(ell) = args.ell {
        if ell != i64::from(spec.degree()) {
            return Err(Error::Domain(format!(
                "--ell {ell} does not match the degree {} of family `{}`",
                spec.degree(),
                args.family
            )));
        }
    }
    Ok(spec)
}

fn parse_k_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("--k-range `{text}` must be start,stop,step")))?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::Parse(format!("--k-range `{text}` must be start,stop,step")));
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Domain(format!("--k-range `{text}` needs start ≤ stop and step > 0")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::Domain(format!("--k-range `{text}` has too many points")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn parse_ell_range(text: &str) -> Result<(u32, u32)> {
    let parts: Vec<u32> = text
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("--ell-range `{text}` must be lo,hi")))?;
    match parts[..] {
        [lo, hi] if lo <= hi => Ok((lo, hi)),
        _ => Err(Error::Parse(format!("--ell-range `{text}` must be lo,hi with lo ≤ hi"))),
    }
}

/// What a subcommand produced.
struct Artifact {
    name: &'static str,
    extension: &'static str,
    contents: String,
    summary: Option<String>,
    diagnostic: Option<String>,
}

fn resolve_output(out: Option<&Path>, name: &str, extension: &str) -> Option<PathBuf> {
    if let Some(p) = out {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{name}.{extension}")))
}

fn run(command: Command) -> Result<(Option<PathBuf>, Artifact)> {
    match command {
        Command::Thresholds { n, out } => {
            let t = regime_thresholds(n)?;
            let json = JsonObject::new()
                .int("N", n)
                .num("friedrichs", t.friedrichs)
                .num("essential_sa", t.essential_sa)
                .num("quadrant", t.quadrant)
                .num("theorem1", t.theorem1)
                .render();
            Ok((
                out,
                Artifact {
                    name: "thresholds",
                    extension: "json",
                    contents: json + "\n",
                    summary: None,
                    diagnostic: None,
                },
            ))
        }
        Command::HardyVerify {
            harmonic,
            m_list,
            bump,
            out,
        } => {
            let spec = build_harmonic(&harmonic)?.normalized();
            let kind: BumpKind = bump.parse()?;
            if m_list.is_empty() || m_list.contains(&0) {
                return Err(Error::Domain("--m entries must be positive integers".into()));
            }
            let profile = BumpProfile::new(kind)?;
            let rows = optimality_sweep(&spec, &profile, &m_list)?;
            let constant = sharp_constant_of(&spec);
            let worst = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
            let tol = SWEEP_GAP_TOL * (1.0 + constant);
            let diagnostic =
                (worst > tol).then(|| format!("largest |gap| {worst:e} exceeds {tol:e} (sharp constant {constant})"));
            Ok((
                out,
                Artifact {
                    name: "hardy-verify",
                    extension: "csv",
                    contents: sweep_csv(&rows),
                    summary: Some(format!(
                        "sharp constant {}, ‖φ'‖² {}, max |gap| {}",
                        fmt_num(constant),
                        fmt_num(profile.derivative_energy()),
                        fmt_num(worst)
                    )),
                    diagnostic,
                },
            ))
        }
        Command::PsiCheck {
            harmonic,
            points,
            h,
            h_ratio,
            seed,
            out,
        } => {
            let spec = build_harmonic(&harmonic)?.normalized();
            if points == 0 || !(h > 0.0) || !(h_ratio > 0.0) || h >= 0.5 || h_ratio >= 0.5 {
                return Err(Error::Domain("--points must be positive and 0 < h, h-ratio < 0.5".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<Vec<f64>> = (0..points).map(|_| sample_off_nodal_point(&spec, &mut rng)).collect();
            let mut csv = String::from("point,rho,psi,residual_coarse,residual_half,ratio,relative_residual\n");
            let mut failures = 0usize;
            for (i, x) in xs.iter().enumerate() {
                let coarse = delta_psi_residual(&spec, x, h_ratio)?;
                let half = delta_psi_residual(&spec, x, 0.5 * h_ratio)?;
                let relative = delta_psi_residual(&spec, x, h)? / psi_local_scale(&spec, x)?;
                let ratio = coarse / half;
                let exact = coarse <= 1e-10 * psi_local_scale(&spec, x)?;
                if !(exact || (RATIO_BAND.0..=RATIO_BAND.1).contains(&ratio)) || relative > PSI_RESIDUAL_TOL {
                    failures += 1;
                }
                let rho = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                csv.push_str(&format!(
                    "{i},{},{},{},{},{},{}\n",
                    fmt_num(rho),
                    fmt_num(weight_psi(&spec, x)?),
                    fmt_num(coarse),
                    fmt_num(half),
                    fmt_num(if exact { f64::NAN } else { ratio }),
                    fmt_num(relative)
                ));
            }
            Ok((
                out,
                Artifact {
                    name: "psi-check",
                    extension: "csv",
                    contents: csv,
                    summary: Some(format!("{points} points, {failures} outside tolerance")),
                    diagnostic: (failures > 0).then(|| format!("{failures} of {points} points failed the Δψ check")),
                },
            ))
        }
        Command::Spectrum {
            problem,
            eps,
            grid,
            spacing,
            count,
            out,
        } => {
            let p = RadialProblem::new(problem.n, problem.ell, problem.k)?;
            let g = GridSpec::new(eps, grid.outer, grid.points, spacing.parse::<Spacing>()?)?;
            if count == 0 || count > g.points {
                return Err(Error::Domain(format!("--count must be in 1..={}", g.points)));
            }
            let s = spectrum(&p, &g, count)?;
            let mut csv = String::from("j,lambda\n");
            for (j, lam) in s.eigenvalues.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", j + 1, fmt_num(*lam)));
            }
            let mut diagnostic = None;
            if !s.sturm_counts_verified {
                diagnostic = Some("Sturm counts disagree with the returned eigenvalues".to_string());
            } else if p.condition_holds() && s.eigenvalues[0] < -BOUNDED_TOL {
                diagnostic = Some(format!(
                    "lower-bound condition holds but λ_1 = {} is negative",
                    s.eigenvalues[0]
                ));
            }
            Ok((
                out,
                Artifact {
                    name: "spectrum",
                    extension: "csv",
                    contents: csv,
                    summary: Some(format!("effective coupling c = {}", fmt_num(p.c))),
                    diagnostic,
                },
            ))
        }
        Command::FallToCenter {
            problem,
            eps,
            grid,
            out,
        } => {
            let p = RadialProblem::new(problem.n, problem.ell, problem.k)?;
            // validates every ε against the grid before scanning
            for &e in &eps {
                GridSpec::new(e, grid.outer, grid.points, Spacing::LogUniform)?;
            }
            let report = fall_to_center_report(&p, &eps, grid.outer, grid.points)?;
            let summary = format!(
                "classification {} (condition {}, c = {})",
                report.classification,
                report.condition_holds,
                fmt_num(p.c)
            );
            let diagnostic = (!report.consistent()).then(|| {
                format!(
                    "scan classified {} but the lower-bound condition is {}",
                    report.classification, report.condition_holds
                )
            });
            Ok((
                out,
                Artifact {
                    name: "fall-to-center",
                    extension: "csv",
                    contents: scan_csv(&report),
                    summary: Some(summary),
                    diagnostic,
                },
            ))
        }
        Command::PhaseDiagram {
            n,
            k_range,
            ell_range,
            eps,
            grid,
            format,
            out,
        } => {
            let dim = Dimension::new(n)?;
            let ks = parse_k_range(&k_range)?;
            let (lo, hi) = parse_ell_range(&ell_range)?;
            let cells: Vec<(f64, u32)> = ks.iter().flat_map(|&k| (lo..=hi).map(move |l| (k, l))).collect();
            match format.as_str() {
                "json" => {
                    let rows = cells
                        .iter()
                        .map(|&(k, ell)| {
                            Ok(JsonObject::new()
                                .int("N", n)
                                .int("ell", i64::from(ell))
                                .num("k", k)
                                .num("lambda_ell", dim.eigenvalue(ell) as f64)
                                .num("sharp_constant", sharp_constant(n, i64::from(ell))?)
                                .boolean("condition_holds", condition_holds(n, i64::from(ell), k)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((
                        out,
                        Artifact {
                            name: "phase-diagram",
                            extension: "json",
                            contents: json_array(&rows),
                            summary: None,
                            diagnostic: None,
                        },
                    ))
                }
                "csv" => {
                    let g = GridSpec::new(eps, grid.outer, grid.points, Spacing::LogUniform)?;
                    let rows = cells
                        .par_iter()
                        .map(|&(k, ell)| {
                            let p = RadialProblem::new(n, i64::from(ell), k)?;
                            let lam = lowest_eigenvalues(&assemble(&p, &g)?, 1)?[0];
                            Ok((k, ell, p.condition_holds(), lam))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let violations = rows.iter().filter(|r| r.2 && r.3 < -BOUNDED_TOL).count();
                    let mut csv = String::from("k,ell,condition,lambda_min\n");
                    for (k, ell, cond, lam) in &rows {
                        csv.push_str(&format!("{},{ell},{cond},{}\n", fmt_num(*k), fmt_num(*lam)));
                    }
                    Ok((
                        out,
                        Artifact {
                            name: "phase-diagram",
                            extension: "csv",
                            contents: csv,
                            summary: None,
                            diagnostic: (violations > 0)
                                .then(|| format!("{violations} cells satisfy the condition but have λ_min < 0")),
                        },
                    ))
                }
                other => Err(Error::Parse(format!("unknown --format `{other}` (csv or json)"))),
            }
        }
        Command::MinDegree { n, k, out } => {
            let ell = minimal_degree(n, k)?;
            let dim = Dimension::new(n)?;
            let json = JsonObject::new()
                .int("N", n)
                .num("k", k)
                .int("ell_min", i64::from(ell))
                .num("lambda_ell", dim.eigenvalue(ell) as f64)
                .num("sharp_constant", sharp_constant(n, i64::from(ell))?)
                .boolean("condition_holds", condition_holds(n, i64::from(ell), k)?)
                .render();
            Ok((
                out,
                Artifact {
                    name: "min-degree",
                    extension: "json",
                    contents: json + "\n",
                    summary: None,
                    diagnostic: None,
                },
            ))
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Quadrature { .. } | Error::Bisection { .. } | Error::Diagnostic(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn parse_and_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (out_flag, artifact) = match run(cli.command) {
        Ok(done) => done,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match resolve_output(out_flag.as_deref(), artifact.name, artifact.extension) {
        Some(path) => {
            if let Err(e) = write_atomic(&path, &artifact.contents) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
            if let Some(s) = &artifact.summary {
                println!("{s}");
            }
            if artifact.extension == "json" {
                print!("{}", artifact.contents);
            }
            println!("wrote {}", path.display());
        }
        None => {
            print!("{}", artifact.contents);
            if let Some(s) = &artifact.summary {
                eprintln!("{s}");
            }
        }
    }
    match artifact.diagnostic {
        Some(d) => {
            eprintln!("diagnostic failure: {d}");
            2
        }
        None => 0,
    }
}
