//! `conslaw` command line: argument parsing, config/env merging, output writers.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bloch::{assemble_bloch, critical_curves, critical_pairs};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionConfig};
use crate::fourier::SpectralGrid;
use crate::mgl::{compare_exact_vs_mgl, MglParameters};
use crate::reduced::{band_product, classify_numerically, default_sigma_grid, stability_predicate};
use crate::roll::{solve_roll, RollParameters, DEFAULT_TOL, MAX_EPS};
use crate::verification;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
const ENV_PREFIX: &str = "CONSLAW_";

#[derive(Parser, Debug)]
#[command(
    name = "conslaw",
    version,
    about = "Rolls, Bloch spectra and stability bands for a conserved Swift-Hohenberg model"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Fourier truncation M of one roll period.
    #[arg(
        long,
        global = true,
        env = "CONSLAW_MODES",
        default_value_t = 32,
        allow_negative_numbers = true
    )]
    pub modes: usize,
    /// Spectral gap required of the non-critical eigenvalues.
    #[arg(
        long,
        global = true,
        env = "CONSLAW_DELTA",
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub delta: f64,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true, env = "CONSLAW_OUTPUT", allow_negative_numbers = true)]
    pub output: Option<PathBuf>,
    /// Output format; `solve` defaults to json, everything else to csv.
    #[arg(
        long,
        global = true,
        env = "CONSLAW_FORMAT",
        value_enum,
        allow_negative_numbers = true
    )]
    pub format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, env = "CONSLAW_JOBS", allow_negative_numbers = true)]
    pub jobs: Option<usize>,
    /// JSON object of flag values; explicit flags and environment variables win.
    #[arg(long, global = true, env = "CONSLAW_CONFIG", allow_negative_numbers = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapMode {
    Predicate,
    Numeric,
    Both,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct RollArgs {
    #[arg(long, env = "CONSLAW_EPS", allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, env = "CONSLAW_OMEGA", allow_negative_numbers = true)]
    pub omega: f64,
    #[arg(long, env = "CONSLAW_S", allow_negative_numbers = true)]
    pub s: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the roll and write it as JSON.
    Solve {
        #[command(flatten)]
        roll: RollArgs,
        #[arg(long, env = "CONSLAW_TOL", default_value_t = DEFAULT_TOL, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Critical Bloch eigenvalue curves over a range of sigma.
    Spectrum {
        #[command(flatten)]
        roll: RollArgs,
        #[arg(
            long,
            env = "CONSLAW_SIGMA_MIN",
            default_value_t = 0.0,
            allow_negative_numbers = true
        )]
        sigma_min: f64,
        #[arg(
            long,
            env = "CONSLAW_SIGMA_MAX",
            default_value_t = 0.5,
            allow_negative_numbers = true
        )]
        sigma_max: f64,
        #[arg(
            long,
            env = "CONSLAW_SIGMA_STEPS",
            default_value_t = 51,
            allow_negative_numbers = true
        )]
        sigma_steps: usize,
    },
    /// Stability verdicts over an (omega, s) grid.
    Map {
        #[arg(long, env = "CONSLAW_EPS", default_value_t = 0.02, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, env = "CONSLAW_S_MIN", default_value_t = -1.5, allow_negative_numbers = true)]
        s_min: f64,
        #[arg(long, env = "CONSLAW_S_MAX", default_value_t = 1.5, allow_negative_numbers = true)]
        s_max: f64,
        #[arg(long, env = "CONSLAW_OMEGA_MIN", default_value_t = -0.45, allow_negative_numbers = true)]
        omega_min: f64,
        #[arg(
            long,
            env = "CONSLAW_OMEGA_MAX",
            default_value_t = 0.45,
            allow_negative_numbers = true
        )]
        omega_max: f64,
        /// Grid points per axis.
        #[arg(long, env = "CONSLAW_STEPS", default_value_t = 30, allow_negative_numbers = true)]
        steps: usize,
        #[arg(long, env = "CONSLAW_MODE", value_enum, default_value_t = MapMode::Both, allow_negative_numbers = true)]
        mode: MapMode,
    },
    /// Exact critical eigenvalues over eps^2 next to the amplitude-equation ones.
    Compare {
        #[command(flatten)]
        roll: RollArgs,
        #[arg(
            long,
            env = "CONSLAW_SIGMA_HAT_MAX",
            default_value_t = 1.0,
            allow_negative_numbers = true
        )]
        sigma_hat_max: f64,
        #[arg(long, env = "CONSLAW_STEPS", default_value_t = 21, allow_negative_numbers = true)]
        steps: usize,
    },
    /// Evolve the roll plus its leading Bloch mode and record the perturbation.
    Evolve {
        #[command(flatten)]
        roll: RollArgs,
        /// Bloch number of the seed; rounded to a multiple of 1/periods.
        #[arg(long, env = "CONSLAW_SIGMA", default_value_t = 0.25, allow_negative_numbers = true)]
        sigma: f64,
        /// Roll periods in the domain (default: smallest count that represents sigma, at most 200).
        #[arg(long, env = "CONSLAW_PERIODS", allow_negative_numbers = true)]
        periods: Option<usize>,
        #[arg(long, env = "CONSLAW_DT", default_value_t = 0.5, allow_negative_numbers = true)]
        dt: f64,
        /// Default: 10 / |predicted rate|, capped at 1e4.
        #[arg(long, env = "CONSLAW_T_FINAL", allow_negative_numbers = true)]
        t_final: Option<f64>,
        #[arg(long, env = "CONSLAW_AMP", default_value_t = EvolutionConfig::DEFAULT_AMPLITUDE, allow_negative_numbers = true)]
        amp: f64,
    },
    /// Run the acceptance checks and print a pass/fail table.
    Verify {
        /// Only these criteria, e.g. `--criteria 1,6`.
        #[arg(long, env = "CONSLAW_CRITERIA", value_delimiter = ',', allow_negative_numbers = true)]
        criteria: Vec<u32>,
    },
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_VALIDATION;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --jobs: {e}");
            return EXIT_VALIDATION;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

/// Value-taking global flags, needed to find the subcommand before parsing.
const GLOBAL_VALUE_FLAGS: [&str; 6] = ["--modes", "--delta", "--output", "--format", "--jobs", "--config"];

fn subcommand_name(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(tok) = it.next() {
        if GLOBAL_VALUE_FLAGS.contains(&tok.as_str()) || tok == "-o" {
            it.next();
        } else if !tok.starts_with('-') {
            return Some(tok.clone());
        }
    }
    None
}

fn env_name(flag: &str) -> String {
    format!("{ENV_PREFIX}{}", flag.to_uppercase().replace('-', "_"))
}

/// Appends `--key value` for every config entry not set by a flag or the environment.
fn merge_config(argv: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = std::env::var_os(env_name("config")).map(PathBuf::from);
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("--config {}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("--config {}: {e}", path.display()))?;
    let serde_json::Value::Object(map) = value else {
        return Err(format!("--config {}: expected a JSON object", path.display()));
    };

    let command = Cli::command();
    let longs = |c: &clap::Command| -> Vec<String> {
        c.get_arguments()
            .filter_map(|a| a.get_long().map(str::to_owned))
            .collect()
    };
    let global = longs(&command);
    let all: Vec<String> = command
        .get_subcommands()
        .flat_map(longs)
        .chain(global.clone())
        .collect();
    let accepted: Vec<String> = match subcommand_name(&args).and_then(|n| command.find_subcommand(&n).cloned()) {
        Some(sub) => longs(&sub).into_iter().chain(global).collect(),
        None => global,
    };

    let mut out = argv;
    for (key, v) in map {
        let flag = key.replace('_', "-");
        if flag == "config" {
            continue;
        }
        if !all.contains(&flag) {
            return Err(format!("--config: unknown key '{key}'"));
        }
        let given = args
            .iter()
            .any(|a| *a == format!("--{flag}") || a.starts_with(&format!("--{flag}=")));
        if !accepted.contains(&flag) || given || std::env::var_os(env_name(&flag)).is_some() {
            continue;
        }
        let text = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Array(items) => items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            other => other.to_string(),
        };
        out.push(format!("--{flag}={text}").into());
    }
    Ok(out)
}

fn execute(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    let grid = SpectralGrid::new(g.modes)?;
    if !(g.delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: g.delta,
            range: "(0, ∞)",
        });
    }
    let format = g.format.unwrap_or(match cli.command {
        Command::Solve { .. } => Format::Json,
        _ => Format::Csv,
    });
    let body = match &cli.command {
        Command::Solve { roll, tol } => {
            let p = roll_params(roll)?;
            check_tol(*tol)?;
            let sol = solve_roll(&p, &grid, *tol)?;
            match format {
                Format::Json => serde_json::to_string_pretty(&sol)? + "\n",
                Format::Csv => {
                    let rows: Vec<TripleRow> = sol
                        .profile
                        .to_triples()
                        .into_iter()
                        .map(|(m, re, im)| TripleRow { m, re, im })
                        .collect();
                    to_csv(&rows)?
                }
            }
        }
        Command::Spectrum {
            roll,
            sigma_min,
            sigma_max,
            sigma_steps,
        } => {
            let p = roll_params(roll)?;
            let sigmas = checked_range("sigma", *sigma_min, *sigma_max, *sigma_steps, 0.5)?;
            let sol = solve_roll(&p, &grid, DEFAULT_TOL)?;
            let rows: Vec<SpectrumRow> = critical_curves(&sol, &sigmas, &grid, g.delta)?
                .iter()
                .map(|sp| {
                    let c = sp.critical_values();
                    SpectrumRow {
                        sigma: sp.sigma,
                        re_lambda_1: c[0].re,
                        im_lambda_1: c[0].im,
                        re_lambda_2: c[1].re,
                        im_lambda_2: c[1].im,
                        re_lambda_3: c[2].re,
                        im_lambda_3: c[2].im,
                        gap: sp.gap,
                    }
                })
                .collect();
            render(&rows, format)?
        }
        Command::Map {
            eps,
            s_min,
            s_max,
            omega_min,
            omega_max,
            steps,
            mode,
        } => {
            let ss = checked_range("s", *s_min, *s_max, *steps, f64::INFINITY)?;
            let omegas = checked_range("omega", *omega_min, *omega_max, *steps, 0.5)?;
            for w in [*omega_min, *omega_max] {
                for s in [*s_min, *s_max] {
                    RollParameters::new(*eps, w, s)?;
                    stability_predicate(w, s)?;
                }
            }
            if *mode != MapMode::Predicate && !(*eps > 0.0) {
                return Err(Error::OutOfRange {
                    name: "eps",
                    value: *eps,
                    range: "(0, 0.2]",
                });
            }
            let rows = map_rows(*eps, &ss, &omegas, *mode, &grid, g.delta)?;
            render(&rows, format)?
        }
        Command::Compare {
            roll,
            sigma_hat_max,
            steps,
        } => {
            let p = roll_params(roll)?;
            MglParameters::new(p.omega, p.s)?;
            if !(p.eps > 0.0) {
                return Err(Error::OutOfRange {
                    name: "eps",
                    value: p.eps,
                    range: "(0, 0.2]",
                });
            }
            let bound = 0.5 / p.eps;
            let sh = checked_range("sigma-hat", -sigma_hat_max, *sigma_hat_max, *steps, bound)?;
            let sol = solve_roll(&p, &grid, DEFAULT_TOL)?;
            let rows: Vec<CompareRow> = compare_exact_vs_mgl(&sol, &sh, &grid, g.delta)?
                .iter()
                .map(|r| CompareRow {
                    sigma_hat: r.sigma_hat,
                    re_exact_1: r.exact[0].re,
                    re_exact_2: r.exact[1].re,
                    re_exact_3: r.exact[2].re,
                    re_mgl_1: r.mgl[0].re,
                    re_mgl_2: r.mgl[1].re,
                    re_mgl_3: r.mgl[2].re,
                    max_deviation: r.deviation,
                })
                .collect();
            render(&rows, format)?
        }
        Command::Evolve {
            roll,
            sigma,
            periods,
            dt,
            t_final,
            amp,
        } => {
            let p = roll_params(roll)?;
            crate::error::require_finite("sigma", *sigma)?;
            let n_periods = periods.unwrap_or_else(|| default_periods(*sigma));
            let rounded = if n_periods == 0 {
                *sigma
            } else {
                EvolutionConfig::rounded_sigma(*sigma, n_periods)
            };
            let mut config = EvolutionConfig {
                n_periods,
                dt: *dt,
                t_final: t_final.unwrap_or(1.0),
                perturbation_amplitude: *amp,
                seed_sigma: rounded,
            };
            config.validate()?;
            if rounded != *sigma {
                eprintln!(
                    "note: sigma {sigma} rounded to {rounded} = j/{n_periods} with j = {}",
                    (rounded * n_periods as f64).round()
                );
            }
            let sol = solve_roll(&p, &grid, DEFAULT_TOL)?;
            if t_final.is_none() {
                let rate = critical_pairs(&assemble_bloch(&sol, rounded, &grid)?).0[2];
                config.t_final = EvolutionConfig::default_t_final(rate);
            }
            let run = evolve(&sol, &config)?;
            eprintln!(
                "predicted rate {:e}, measured rate {:e}, mass drift {:e}",
                run.predicted_rate,
                run.growth_rate(),
                run.mass_drift()
            );
            match format {
                Format::Json => serde_json::to_string_pretty(&run)? + "\n",
                Format::Csv => to_csv(&run.samples)?,
            }
        }
        Command::Verify { criteria } => {
            for &c in criteria {
                if !(1..=9).contains(&c) {
                    return Err(Error::OutOfRange {
                        name: "criteria",
                        value: c as f64,
                        range: "1..=9",
                    });
                }
            }
            let reports = run_selected(criteria);
            let all_pass = reports.iter().all(|r| r.passed);
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
                Format::Csv => {
                    let mut t: String = reports.iter().map(|r| r.line() + "\n").collect();
                    let passed = reports.iter().filter(|r| r.passed).count();
                    t += &format!("{passed}/{} criteria passed\n", reports.len());
                    t
                }
            };
            emit(g, &text)?;
            return Ok(if all_pass { EXIT_OK } else { EXIT_NUMERICAL });
        }
    };
    emit(g, &body)?;
    Ok(EXIT_OK)
}

fn run_selected(criteria: &[u32]) -> Vec<verification::CriterionReport> {
    if criteria.is_empty() {
        return verification::run_all();
    }
    let mut ids = criteria.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let runs = if ids.iter().any(|&c| c >= 8) {
        verification::evolution_runs()
    } else {
        vec![]
    };
    ids.iter()
        .map(|&c| match c {
            1 => verification::existence_order(),
            2 => verification::coperiodic_spectrum(),
            3 => verification::small_sigma_curvatures(),
            4 => verification::mgl_convergence(),
            5 => verification::stability_band(),
            6 => verification::cubic_machinery(),
            7 => verification::symmetry_properties(),
            8 => verification::dynamic_confirmation(&runs),
            _ => verification::conservation(&runs),
        })
        .collect()
}

fn emit(g: &GlobalOpts, text: &str) -> Result<()> {
    match &g.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn roll_params(r: &RollArgs) -> Result<RollParameters> {
    let p = RollParameters::new(r.eps, r.omega, r.s)?;
    if p.eps > MAX_EPS {
        return Err(Error::OutOfRange {
            name: "eps",
            value: p.eps,
            range: "[0, 0.2]",
        });
    }
    Ok(p)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= crate::roll::MIN_TOL) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "[1e-13, ∞)",
        });
    }
    Ok(())
}

/// `steps` equally spaced points in `[lo, hi]`, all within `|x| ≤ bound`.
fn checked_range(name: &'static str, lo: f64, hi: f64, steps: usize, bound: f64) -> Result<Vec<f64>> {
    crate::error::require_finite(name, lo)?;
    crate::error::require_finite(name, hi)?;
    if steps == 0 || lo > hi || (steps == 1 && lo != hi) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("need min <= max and at least 2 steps for a proper range (got [{lo}, {hi}] with {steps})"),
        });
    }
    for v in [lo, hi] {
        if v.abs() > bound {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "outside the admissible interval",
            });
        }
    }
    Ok((0..steps)
        .map(|i| {
            if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn default_periods(sigma: f64) -> usize {
    (1..=200)
        .find(|&m| {
            let j = sigma * m as f64;
            (j - j.round()).abs() < 1e-9
        })
        .unwrap_or(200)
}

fn map_rows(
    eps: f64,
    ss: &[f64],
    omegas: &[f64],
    mode: MapMode,
    grid: &SpectralGrid,
    delta: f64,
) -> Result<Vec<MapRow>> {
    use rayon::prelude::*;
    let cells: Vec<(f64, f64)> = ss.iter().flat_map(|&s| omegas.iter().map(move |&w| (s, w))).collect();
    let sigma_grid = default_sigma_grid(eps);
    cells
        .par_iter()
        .map(|&(s, omega)| {
            let predicate = match mode {
                MapMode::Numeric => None,
                _ => Some(stability_predicate(omega, s)?.as_str()),
            };
            let numeric = match mode {
                MapMode::Predicate => None,
                _ => {
                    let roll = solve_roll(&RollParameters::new(eps, omega, s)?, grid, DEFAULT_TOL)?;
                    Some(classify_numerically(&roll, &sigma_grid, grid, delta)?)
                }
            };
            Ok(MapRow {
                s,
                omega,
                predicate_verdict: predicate,
                numeric_verdict: numeric.map(|v| v.verdict.as_str()),
                pi: band_product(omega, s),
                witness_sigma: numeric.and_then(|v| v.witness_sigma),
                witness_relambda: numeric.and_then(|v| v.witness_lambda).map(|z| z.re),
            })
        })
        .collect()
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| csv_error(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
    }
}

#[derive(Serialize)]
struct TripleRow {
    m: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SpectrumRow {
    sigma: f64,
    re_lambda_1: f64,
    im_lambda_1: f64,
    re_lambda_2: f64,
    im_lambda_2: f64,
    re_lambda_3: f64,
    im_lambda_3: f64,
    gap: f64,
}

#[derive(Serialize)]
struct MapRow {
    s: f64,
    omega: f64,
    predicate_verdict: Option<&'static str>,
    numeric_verdict: Option<&'static str>,
    #[serde(rename = "Pi")]
    pi: f64,
    witness_sigma: Option<f64>,
    witness_relambda: Option<f64>,
}

#[derive(Serialize)]
struct CompareRow {
    sigma_hat: f64,
    re_exact_1: f64,
    re_exact_2: f64,
    re_exact_3: f64,
    re_mgl_1: f64,
    re_mgl_2: f64,
    re_mgl_3: f64,
    max_deviation: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn subcommand_found_past_global_values() {
        assert_eq!(
            subcommand_name(&strings(&["conslaw", "--modes", "16", "map"])).as_deref(),
            Some("map")
        );
        assert_eq!(
            subcommand_name(&strings(&["conslaw", "-o", "solve", "spectrum"])).as_deref(),
            Some("spectrum")
        );
        assert_eq!(subcommand_name(&strings(&["conslaw", "--modes=16"])), None);
    }

    #[test]
    fn env_names_follow_flags() {
        assert_eq!(env_name("sigma-hat-max"), "CONSLAW_SIGMA_HAT_MAX");
    }

    #[test]
    fn ranges_validate_before_work() {
        assert_eq!(checked_range("x", -1.0, 1.0, 3, 2.0).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(checked_range("x", 1.0, -1.0, 3, 2.0).is_err());
        assert!(checked_range("sigma", 0.0, 0.6, 3, 0.5).is_err());
        assert!(checked_range("x", 0.0, 1.0, 0, 2.0).is_err());
    }

    #[test]
    fn periods_represent_sigma() {
        assert_eq!(default_periods(0.25), 4);
        assert_eq!(default_periods(0.0), 1);
        assert_eq!(default_periods(0.3), 10);
    }
}
