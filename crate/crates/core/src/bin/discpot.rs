//! Command-line front end: fan validation, g-functions and mirror maps,
//! equivariant potentials with critical-point search, pinched-torus chart
//! gluing, and Borel Morse complexes, all over exact rationals with JSON
//! or human-readable output.
//!
//! Exit status: 0 on success, 1 on a domain or validation failure, 2 on an
//! I/O or schema problem. All output is deterministic; the critical-point
//! search takes a --seed so that repeated runs are byte-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use serde_json::json;

use discpot::borel_morse::{expected_point_betti, flow_verify, BorelComplex, FiberComplex};
use discpot::immersed::{
    coordinate_names, glue, parse_direction, sphere_potential, ChartId, Spin,
};
use discpot::mirror::{g_function, mirror_map};
use discpot::potential::{
    build_potential, critical_points, evaluate, parse_subtorus_spec, EquivariantPotential,
};
use discpot::rational::parse_rational;
use discpot::toric::validate;
use discpot::{Error, Rational, Result, ToricInput, TruncatedSeries};

#[derive(Parser)]
#[command(
    name = "discpot",
    version,
    about = "Equivariant disc potentials of toric fibers, pinched-torus gluing, and Borel Morse complexes in exact arithmetic"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FiberArg {
    Point,
    S2,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SpinArg {
    Nontrivial,
    Trivial,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a fan: completeness, smoothness, Fano classification.
    Validate {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Correction series of one ray.
    GFunction {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        ray: usize,
        #[arg(long)]
        cutoff: String,
    },
    /// Mirror map data: g, forward/inverse families, corrected coefficients.
    MirrorMap {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        cutoff: String,
        /// Restrict the report to one ray.
        #[arg(long)]
        ray: Option<usize>,
    },
    /// Assemble the equivariant potential of a fiber.
    Potential {
        #[arg(long)]
        fan: PathBuf,
        /// Subtorus directions, rows separated by ';', entries by ','.
        #[arg(long)]
        subtorus: String,
        #[arg(long)]
        cutoff: String,
        /// Evaluate at "t,x1..xd,lambda1..lambdal" (reals).
        #[arg(long)]
        eval: Option<String>,
    },
    /// Newton search for critical points of the specialized potential.
    Crit {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        subtorus: String,
        #[arg(long)]
        cutoff: String,
        /// Novikov parameter value in (0, 1).
        #[arg(long)]
        t: f64,
        /// Equivariant parameter values, comma separated (default zeros).
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 64)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sphere potential of the pinched torus, or one chart transition.
    GlueSphere {
        #[arg(long)]
        cutoff: Option<u32>,
        /// Chart transition, e.g. L0L1, L1L0, L1L2.
        #[arg(long)]
        direction: Option<String>,
        /// JSON file with the source-chart coordinate series.
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SpinArg::Nontrivial)]
        spin: SpinArg,
    },
    /// Build a Borel Morse complex, check d^2 = 0, print cohomology ranks.
    MorseCheck {
        /// Number of circle factors.
        #[arg(long = "l")]
        ell: usize,
        /// Truncation order of the approximation space.
        #[arg(long = "n")]
        order: usize,
        #[arg(long, value_enum, default_value_t = FiberArg::Point)]
        fiber: FiberArg,
    },
    /// Integrate the handover flow and report whether it connects.
    Flow {
        /// Angular offset between source and target generators.
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
        /// Initial angle override.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd, cli.format) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn emit(format: Format, value: serde_json::Value, pretty: String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("JSON output")
        ),
        Format::Pretty => println!("{pretty}"),
    }
}

fn read_fan(path: &Path) -> Result<ToricInput> {
    let text = std::fs::read_to_string(path)?;
    ToricInput::from_json_str(&text)
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|e| {
            e.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("bad {what} entry {e:?}")))
        })
        .collect()
}

fn parse_cutoff(s: &str) -> Result<Rational> {
    parse_rational(s)
}

fn series_json(s: &TruncatedSeries) -> serde_json::Value {
    serde_json::to_value(s).expect("series serialization")
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im})
}

fn read_coords(path: &Path, source: ChartId) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::schema("/", format!("coordinate file is not JSON: {e}")))?;
    let (ka, kb) = coordinate_names(source);
    let fetch = |key: &str| -> Result<TruncatedSeries> {
        let v = value
            .get(key)
            .ok_or_else(|| Error::schema(format!("/{key}"), "missing chart coordinate"))?;
        serde_json::from_value(v.clone())
            .map_err(|e| Error::schema(format!("/{key}"), e.to_string()))
    };
    Ok((fetch(ka)?, fetch(kb)?))
}

fn eval_params(
    pot: &EquivariantPotential,
    spec: &str,
) -> Result<(f64, Vec<Complex64>, Vec<Complex64>)> {
    let vals = parse_floats(spec, "eval")?;
    let want = 1 + pot.dim + pot.equivariant_part.len();
    if vals.len() != want {
        return Err(Error::Validation(format!(
            "--eval needs {want} values (t, {} coordinates, {} equivariant parameters), got {}",
            pot.dim,
            pot.equivariant_part.len(),
            vals.len()
        )));
    }
    let t = vals[0];
    let x: Vec<Complex64> = vals[1..=pot.dim]
        .iter()
        .map(|v| Complex64::new(*v, 0.0))
        .collect();
    let lambda: Vec<Complex64> = vals[pot.dim + 1..]
        .iter()
        .map(|v| Complex64::new(*v, 0.0))
        .collect();
    Ok((t, x, lambda))
}

fn run(cmd: Cmd, format: Format) -> Result<()> {
    match cmd {
        Cmd::Validate { fan } => {
            let input = read_fan(&fan)?;
            let report = validate(&input)?;
            let mut parts = vec![
                if report.complete {
                    "complete"
                } else {
                    "incomplete"
                }
                .to_string(),
                if report.smooth { "smooth" } else { "singular" }.to_string(),
            ];
            match (report.fano, report.semi_fano) {
                (Some(true), _) => parts.push("Fano".into()),
                (Some(false), Some(true)) => parts.push("semi-Fano".into()),
                (Some(false), Some(false)) => parts.push("not semi-Fano".into()),
                _ => {}
            }
            let mut pretty = parts.join(", ");
            for note in &report.notes {
                pretty.push_str(&format!("\nnote: {note}"));
            }
            emit(
                format,
                serde_json::to_value(&report).expect("report serialization"),
                pretty,
            );
        }
        Cmd::GFunction { fan, ray, cutoff } => {
            let input = read_fan(&fan)?;
            let cutoff = parse_cutoff(&cutoff)?;
            let g = g_function(&input, ray, &cutoff)?;
            emit(
                format,
                json!({"ray": g.ray, "g": series_json(&g.series)}),
                format!("g[{}] = {}", g.ray, g.series),
            );
        }
        Cmd::MirrorMap { fan, cutoff, ray } => {
            let input = read_fan(&fan)?;
            let cutoff = parse_cutoff(&cutoff)?;
            let mm = mirror_map(&input, &cutoff)?;
            let ray_report = |i: usize| {
                json!({
                    "ray": i,
                    "g": series_json(&mm.g[i]),
                    "corrected": series_json(&mm.corrected[i]),
                })
            };
            let mut pretty = String::new();
            for (a, c) in mm.generators.iter().enumerate() {
                pretty.push_str(&format!("q{} = {:?}\n", a + 1, c.0));
            }
            match ray {
                Some(i) => {
                    if i >= mm.g.len() {
                        return Err(Error::Validation(format!(
                            "ray index {i} out of range (fan has {} rays)",
                            mm.g.len()
                        )));
                    }
                    pretty.push_str(&format!("ray {i}: corrected = {}", mm.corrected[i]));
                    emit(format, ray_report(i), pretty);
                }
                None => {
                    let rays: Vec<serde_json::Value> = (0..mm.g.len()).map(ray_report).collect();
                    let lines: Vec<String> = (0..mm.g.len())
                        .map(|i| format!("ray {i}: corrected = {}", mm.corrected[i]))
                        .collect();
                    pretty.push_str(&lines.join("\n"));
                    emit(
                        format,
                        json!({
                            "generators": serde_json::to_value(&mm.generators).expect("classes"),
                            "rays": rays,
                        }),
                        pretty,
                    );
                }
            }
        }
        Cmd::Potential {
            fan,
            subtorus,
            cutoff,
            eval,
        } => {
            let input = read_fan(&fan)?;
            let subtorus = parse_subtorus_spec(&subtorus)?;
            let cutoff = parse_cutoff(&cutoff)?;
            let pot = build_potential(&input, &subtorus, &cutoff)?;
            let mut out = pot.to_json_value();
            let mut pretty = format!("W = {}", pot.pretty());
            if let Some(spec) = eval {
                let (t, x, lambda) = eval_params(&pot, &spec)?;
                let w = evaluate(&pot, t, &x, &lambda)?;
                out["eval"] = json!({
                    "t": t,
                    "x": x.iter().copied().map(complex_json).collect::<Vec<_>>(),
                    "lambda": lambda.iter().copied().map(complex_json).collect::<Vec<_>>(),
                    "value": complex_json(w),
                });
                pretty.push_str(&format!("\nW(t={t}) = {:+.12}{:+.12}i", w.re, w.im));
            }
            emit(format, out, pretty);
        }
        Cmd::Crit {
            fan,
            subtorus,
            cutoff,
            t,
            lambda,
            seeds,
            seed,
        } => {
            let input = read_fan(&fan)?;
            let subtorus = parse_subtorus_spec(&subtorus)?;
            let cutoff = parse_cutoff(&cutoff)?;
            let pot = build_potential(&input, &subtorus, &cutoff)?;
            let lambda: Vec<Complex64> = match lambda {
                Some(s) => parse_floats(&s, "lambda")?
                    .into_iter()
                    .map(|v| Complex64::new(v, 0.0))
                    .collect(),
                None => vec![Complex64::new(0.0, 0.0); pot.equivariant_part.len()],
            };
            let out = critical_points(&pot, t, &lambda, seeds, seed)?;
            let points: Vec<serde_json::Value> = out
                .points
                .iter()
                .map(|p| {
                    json!({
                        "x": p.x.iter().copied().map(complex_json).collect::<Vec<_>>(),
                        "value": complex_json(p.value),
                        "grad_norm": p.grad_norm,
                    })
                })
                .collect();
            let mut pretty = String::new();
            for p in &out.points {
                let xs: Vec<String> = p
                    .x
                    .iter()
                    .map(|z| format!("{:+.9}{:+.9}i", z.re, z.im))
                    .collect();
                pretty.push_str(&format!(
                    "W = {:+.9}{:+.9}i at ({})  |grad| = {:.2e}\n",
                    p.value.re,
                    p.value.im,
                    xs.join(", "),
                    p.grad_norm
                ));
            }
            if let Some(w) = &out.warning {
                pretty.push_str(&format!("warning: {w}\n"));
            }
            let pretty = pretty.trim_end().to_string();
            emit(
                format,
                json!({
                    "t": t,
                    "seeds": seeds,
                    "seed": seed,
                    "points": points,
                    "warning": out.warning,
                }),
                if pretty.is_empty() {
                    "no critical points found".into()
                } else {
                    pretty
                },
            );
        }
        Cmd::GlueSphere {
            cutoff,
            direction,
            coords,
            spin,
        } => {
            let spin = match spin {
                SpinArg::Nontrivial => Spin::Nontrivial,
                SpinArg::Trivial => Spin::Trivial,
            };
            match direction {
                None => {
                    let n = cutoff.ok_or_else(|| {
                        Error::Validation("--cutoff is required for the sphere potential".into())
                    })?;
                    if n == 0 {
                        return Err(Error::Validation("cutoff must be positive".into()));
                    }
                    let w = sphere_potential(n);
                    emit(
                        format,
                        json!({
                            "lambda_factor": w.lambda_factor,
                            "series": series_json(&w.series),
                        }),
                        w.pretty(),
                    );
                }
                Some(d) => {
                    let (source, target) = parse_direction(&d)?;
                    let path = coords.ok_or_else(|| {
                        Error::Validation("--direction needs --coords with the source series".into())
                    })?;
                    let (a, b) = read_coords(&path, source)?;
                    let (fa, fb) = glue(source, target, &a, &b, spin)?;
                    let (ka, kb) = coordinate_names(target);
                    emit(
                        format,
                        json!({ka: series_json(&fa), kb: series_json(&fb)}),
                        format!("{ka} = {fa}\n{kb} = {fb}"),
                    );
                }
            }
        }
        Cmd::MorseCheck { ell, order, fiber } => {
            let fc = match fiber {
                FiberArg::Point => FiberComplex::point(),
                FiberArg::S2 => FiberComplex::two_sphere(),
            };
            let complex = BorelComplex::build(ell, order, fc)?;
            complex.check_d_squared()?;
            let ranks = complex.cohomology_ranks();
            let point = expected_point_betti(ell, order);
            let expected: BTreeMap<i64, usize> = match fiber {
                FiberArg::Point => point,
                FiberArg::S2 => {
                    let mut m = BTreeMap::new();
                    for (d, b) in &point {
                        *m.entry(*d).or_insert(0) += b;
                        *m.entry(d + 2).or_insert(0) += b;
                    }
                    m
                }
            };
            let matches = ranks == expected;
            let to_map = |m: &BTreeMap<i64, usize>| {
                m.iter()
                    .map(|(d, b)| (d.to_string(), json!(b)))
                    .collect::<serde_json::Map<_, _>>()
            };
            let mut pretty = format!(
                "generators: {}\nd^2 = 0: ok\n",
                complex.generators.len()
            );
            for (d, b) in &ranks {
                pretty.push_str(&format!("rank H^{d} = {b}\n"));
            }
            pretty.push_str(&format!(
                "matches expected: {}",
                if matches { "yes" } else { "no" }
            ));
            emit(
                format,
                json!({
                    "l": ell,
                    "n": order,
                    "fiber": match fiber { FiberArg::Point => "point", FiberArg::S2 => "s2" },
                    "generators": complex.generators.len(),
                    "d_squared_zero": true,
                    "ranks": to_map(&ranks),
                    "expected": to_map(&expected),
                    "matches": matches,
                }),
                pretty,
            );
        }
        Cmd::Flow {
            phase,
            theta,
            source,
            target,
            tolerance,
        } => {
            let r = flow_verify(source, target, phase, tolerance, theta)?;
            emit(
                format,
                json!({
                    "source": r.source,
                    "target": r.target,
                    "phase": r.angle,
                    "theta0": r.theta0,
                    "theta_minus": r.theta_minus,
                    "theta_plus": r.theta_plus,
                    "connects": r.connects,
                }),
                format!(
                    "theta(-inf) = {:.9}, theta(+inf) = {:.9}: {}",
                    r.theta_minus,
                    r.theta_plus,
                    if r.connects {
                        "connects"
                    } else {
                        "does not connect"
                    }
                ),
            );
        }
    }
    Ok(())
}
