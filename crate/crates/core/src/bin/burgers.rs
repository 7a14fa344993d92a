use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use burgers_core::analytic::coeffs;
use burgers_core::bench::{self, output, RunConfig};
use burgers_core::cfd6::{self, ClosureCoefficient, Parity};
use burgers_core::verify;
use burgers_core::Result;

#[derive(Parser)]
#[command(
    name = "burgers",
    version,
    about = "Hopf-Cole / compact-difference / precise-integration Burgers solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one example and compare with its reference solution.
    Solve {
        #[arg(long, conflicts_with = "config")]
        example: Option<u32>,
        /// JSON run configuration; absent keys take the example's defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Write the axis generators and step increments here as text matrices.
        #[arg(long)]
        dump_matrices: Option<PathBuf>,
    },
    /// Errors and observed orders over a ladder of grid sizes.
    Convergence {
        #[arg(long, conflicts_with = "config")]
        example: Option<u32>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Nodes per axis, comma separated.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Series coefficients, or reference values at points.
    Oracle {
        #[arg(long)]
        example: u32,
        #[arg(long)]
        omega: Option<f64>,
        /// Print the coefficient table with this many terms per axis instead of point values.
        #[arg(long)]
        coeffs: Option<usize>,
        /// Point coordinates, comma separated; repeat for several points.
        #[arg(long = "point", value_parser = parse_point)]
        points: Vec<Point>,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Spectrum of one generator and the spectral radius of its step propagator.
    Stability {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, value_enum, default_value_t = Kind::Periodic)]
        kind: Kind,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        /// Grid spacing; defaults to the unit interval (periodic: 1/n, otherwise 1/(n-1)).
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        printed_coefficient: bool,
        /// Write the generator as a text matrix.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run every example at its default settings.
    Bench {
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Periodic,
    Closure,
    ReflectEven,
    ReflectOdd,
    ClosureInterior,
}

#[derive(Clone, Debug)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Point)
}

fn load_config(example: Option<u32>, config: Option<PathBuf>) -> Result<RunConfig> {
    match (example, config) {
        (_, Some(path)) => RunConfig::from_json(&std::fs::read_to_string(path)?),
        (Some(id), None) => RunConfig::defaults(id),
        (None, None) => Err(burgers_core::Error::Config(
            "give --example or --config".into(),
        )),
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<bool> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve {
            example,
            config,
            csv,
            summary,
            dump_matrices,
        } => {
            let cfg = load_config(example, config)?;
            if let Some(dir) = dump_matrices {
                for p in bench::dump_operators(&cfg, &dir)? {
                    writeln!(out, "wrote {}", p.display())?;
                }
            }
            let report = bench::run_example(&cfg)?;
            write!(out, "{}", output::format_report(&report))?;
            if let Some(p) = csv {
                output::write_csv(create(&p)?, &report)?;
            }
            if let Some(p) = summary {
                output::write_summary(create(&p)?, &report)?;
            }
            Ok(report.passed)
        }
        Command::Convergence {
            example,
            config,
            ladder,
            csv,
        } => {
            let mut cfg = load_config(example, config)?;
            if let Some(l) = ladder {
                cfg.ladder = l;
            }
            let table = bench::convergence_study(&cfg)?;
            output::write_convergence_csv(&mut out, &table)?;
            if let Some(p) = csv {
                output::write_convergence_csv(create(&p)?, &table)?;
            }
            Ok(true)
        }
        Command::Oracle {
            example,
            omega,
            coeffs: m,
            points,
            t,
        } => {
            let cfg = RunConfig::defaults(example)?;
            let omega = omega.unwrap_or(cfg.omega());
            if let Some(m) = m {
                let table = match cfg.rank() {
                    1 => coeffs::coeffs_1d(omega, m)?,
                    2 => coeffs::coeffs_2d(omega, m)?,
                    _ => coeffs::coeffs_3d(omega, m)?,
                };
                writeln!(out, "index,coefficient")?;
                for (flat, v) in table.values.iter().enumerate() {
                    let mut idx = vec![0usize; table.rank];
                    let mut r = flat;
                    for k in (0..table.rank).rev() {
                        idx[k] = r % table.m;
                        r /= table.m;
                    }
                    let labels: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                    writeln!(out, "{},{v:.16e}", labels.join(" "))?;
                }
                return Ok(true);
            }
            let reference = bench::examples::reference(example, omega, cfg.epsilon)?;
            let comps = ["u", "v", "w"];
            let axes = ["x", "y", "z"];
            let r = cfg.rank();
            writeln!(
                out,
                "{},t,{},phi,oracle",
                axes[..r].join(","),
                comps[..r]
                    .iter()
                    .map(|c| format!("{c}_ref"))
                    .collect::<Vec<_>>()
                    .join(",")
            )?;
            for Point(p) in &points {
                let (vel, phi) = reference.at(p, t)?;
                let mut cols: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
                cols.push(format!("{t:.16e}"));
                cols.extend(vel.iter().map(|v| format!("{v:.16e}")));
                cols.push(format!("{phi:.16e}"));
                cols.push(reference.kind().as_str().into());
                writeln!(out, "{}", cols.join(","))?;
            }
            Ok(true)
        }
        Command::Stability {
            n,
            omega,
            kind,
            tau,
            h,
            printed_coefficient,
            dump,
        } => {
            let coef = if printed_coefficient {
                ClosureCoefficient::Printed
            } else {
                ClosureCoefficient::Derived
            };
            let gen = match kind {
                Kind::Periodic => {
                    let h = h.unwrap_or(1.0 / n as f64);
                    cfd6::form_generator(&cfd6::assemble_periodic(n, h)?, omega)?
                }
                Kind::Closure => {
                    let h = h.unwrap_or(1.0 / (n - 1) as f64);
                    cfd6::form_generator(&cfd6::assemble_closure_with(n, h, coef)?, omega)?
                }
                Kind::ReflectEven => cfd6::reflect_generator(
                    n,
                    h.unwrap_or(1.0 / (n - 1) as f64),
                    omega,
                    Parity::Even,
                )?,
                Kind::ReflectOdd => cfd6::reflect_generator(
                    n,
                    h.unwrap_or(1.0 / (n - 1) as f64),
                    omega,
                    Parity::Odd,
                )?,
                Kind::ClosureInterior => cfd6::closure_interior_generator(
                    n,
                    h.unwrap_or(1.0 / (n - 1) as f64),
                    omega,
                    coef,
                )?,
            };
            if let Some(p) = dump {
                cfd6::write_matrix(create(&p)?, &gen.h_matrix)?;
            }
            let report = verify::check_generator_spectrum(&gen, tau)?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            Ok(report.passed)
        }
        Command::Bench { out_dir } => {
            let mut all = true;
            for id in 1..=9 {
                let cfg = RunConfig::defaults(id)?;
                let report = bench::run_example(&cfg)?;
                write!(out, "{}", output::format_report(&report))?;
                if let Some(dir) = &out_dir {
                    output::write_csv(create(&dir.join(format!("example{id}.csv")))?, &report)?;
                    output::write_summary(
                        create(&dir.join(format!("example{id}.json")))?,
                        &report,
                    )?;
                }
                all &= report.passed;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
