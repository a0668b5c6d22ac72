use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use robbins::emit::{csv, Envelope, Json};
use robbins::exact;
use robbins::memoryless;
use robbins::montecarlo;
use robbins::noinfo;
use robbins::registry;
use robbins::verify::{self, Level};
use robbins::Error;

#[derive(Parser)]
#[command(name = "robbins", version, about = "Expected-rank optimal stopping: exact policies, memoryless thresholds, and verification tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal memoryless expected ranks for horizons 1..=n
    #[command(name = "table1")]
    Table1 {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constants and piecewise pieces of the exact policy for n = 2, 3, 4
    #[command(name = "thresholds")]
    Thresholds {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples of the step-2 threshold curve for n = 4
    #[command(name = "h2-curve")]
    H2Curve {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raster of step-3 minimizer regions for n = 4
    #[command(name = "regions")]
    Regions {
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of a registered policy's expected rank
    #[command(name = "simulate")]
    Simulate {
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check suite: closed forms vs numeric oracle vs simulation
    #[command(name = "verify")]
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// No-information benchmark W(n) for horizons 1..=n
    #[command(name = "noinfo")]
    Noinfo {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(Error::InvalidInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(err @ Error::NoConvergence { .. }) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Table1 { n, tol, format, out } => {
            let text = cmd_table1(n, tol, format)?;
            write_output(&text, out.as_deref())
        }
        Command::Thresholds { n, format, out } => {
            let text = cmd_thresholds(n, format)?;
            write_output(&text, out.as_deref())
        }
        Command::H2Curve { samples, format, out } => {
            let text = cmd_h2_curve(samples, format)?;
            write_output(&text, out.as_deref())
        }
        Command::Regions { grid, format, out } => {
            let text = cmd_regions(grid, format)?;
            write_output(&text, out.as_deref())
        }
        Command::Simulate { policy, trials, seed, format, out } => {
            let text = cmd_simulate(&policy, trials, seed, format)?;
            write_output(&text, out.as_deref())
        }
        Command::Verify { level, format, out } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let (text, all_pass) = cmd_verify(level, format);
            write_output(&text, out.as_deref())?;
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Noinfo { n, format, out } => {
            let text = cmd_noinfo(n, format)?;
            write_output(&text, out.as_deref())
        }
    }
}

fn write_output(text: &str, out: Option<&std::path::Path>) -> Result<ExitCode, Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table1(max_n: usize, tol: f64, format: Format) -> Result<String, Error> {
    if !(1..=50).contains(&max_n) {
        return Err(Error::input("table1 supports 1 <= n <= 50"));
    }
    let rows: Result<Vec<(usize, f64)>, Error> = (1..=max_n)
        .map(|n| memoryless::optimize(n, tol).map(|(_, v)| (n, v)))
        .collect();
    let rows = rows?;
    Ok(match format {
        Format::Csv => csv(
            &["n", "expected-rank"],
            &rows
                .iter()
                .map(|&(n, v)| vec![n.to_string(), robbins::emit::fmt_f64(v)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => Envelope::new("table1")
            .param("n", max_n as u64)
            .param("tol", tol)
            .results(Json::Arr(
                rows.iter()
                    .map(|&(n, v)| {
                        Json::obj([("n", Json::UInt(n as u64)), ("expected-rank", Json::Num(v))])
                    })
                    .collect(),
            ))
            .render(),
    })
}

fn cmd_thresholds(n: usize, format: Format) -> Result<String, Error> {
    struct Piece {
        name: String,
        lo: f64,
        hi: f64,
    }
    let (h1, breakpoints, pieces): (f64, Vec<(&str, f64)>, Vec<Piece>) = match n {
        2 => (0.5, vec![], vec![]),
        3 => (
            exact::h1_n3(),
            vec![("b1", 1.0 / 3.0), ("b2", 2.0 / 3.0)],
            ["(1 - x) / 2", "x", "1 - x / 2"]
                .iter()
                .zip([(0.0, 1.0 / 3.0), (1.0 / 3.0, 2.0 / 3.0), (2.0 / 3.0, 1.0)])
                .map(|(&name, (lo, hi))| Piece {
                    name: name.to_string(),
                    lo,
                    hi,
                })
                .collect(),
        ),
        4 => {
            let curve = exact::h2_curve();
            let b = curve.breakpoints().to_vec();
            let names = curve.piece_names();
            let mut edges = vec![0.0];
            edges.extend_from_slice(&b);
            edges.push(1.0);
            let pieces = names
                .iter()
                .enumerate()
                .map(|(i, name)| Piece {
                    name: name.to_string(),
                    lo: edges[i],
                    hi: edges[i + 1],
                })
                .collect();
            (
                exact::h1_n4(),
                ["beta1", "beta2", "beta3", "beta4", "beta5"]
                    .into_iter()
                    .zip(b)
                    .collect(),
                pieces,
            )
        }
        _ => return Err(Error::input("thresholds supports n in {2, 3, 4}")),
    };
    Ok(match format {
        Format::Csv => {
            let mut rows = vec![vec![
                "constant".to_string(),
                "h1".to_string(),
                String::new(),
                String::new(),
                robbins::emit::fmt_f64(h1),
            ]];
            for (name, value) in &breakpoints {
                rows.push(vec![
                    "breakpoint".to_string(),
                    name.to_string(),
                    String::new(),
                    String::new(),
                    robbins::emit::fmt_f64(*value),
                ]);
            }
            for p in &pieces {
                rows.push(vec![
                    "piece".to_string(),
                    p.name.replace(',', ";"),
                    robbins::emit::fmt_f64(p.lo),
                    robbins::emit::fmt_f64(p.hi),
                    String::new(),
                ]);
            }
            csv(&["kind", "name", "x-lo", "x-hi", "value"], &rows)
        }
        Format::Json => Envelope::new("thresholds")
            .param("n", n as u64)
            .results(Json::obj([
                ("h1", Json::Num(h1)),
                (
                    "breakpoints",
                    Json::Obj(
                        breakpoints
                            .iter()
                            .map(|&(name, v)| (name.to_string(), Json::Num(v)))
                            .collect(),
                    ),
                ),
                (
                    "pieces",
                    Json::Arr(
                        pieces
                            .iter()
                            .map(|p| {
                                Json::obj([
                                    ("formula", Json::Str(p.name.clone())),
                                    ("x-lo", Json::Num(p.lo)),
                                    ("x-hi", Json::Num(p.hi)),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ]))
            .render(),
    })
}

fn cmd_h2_curve(samples: usize, format: Format) -> Result<String, Error> {
    if samples < 2 {
        return Err(Error::input("h2-curve needs at least 2 samples"));
    }
    let mut xs: Vec<f64> = (0..samples)
        .map(|i| i as f64 / (samples - 1) as f64)
        .collect();
    xs.extend(exact::betas());
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let rows: Vec<(f64, f64)> = xs
        .into_iter()
        .map(|x| (x, exact::h2(x).expect("grid stays inside [0, 1]")))
        .collect();
    Ok(match format {
        Format::Csv => csv(
            &["x1", "h2"],
            &rows
                .iter()
                .map(|&(x, h)| vec![robbins::emit::fmt_f64(x), robbins::emit::fmt_f64(h)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => Envelope::new("h2-curve")
            .param("samples", samples as u64)
            .results(Json::Arr(
                rows.iter()
                    .map(|&(x, h)| Json::obj([("h2", Json::Num(h)), ("x1", Json::Num(x))]))
                    .collect(),
            ))
            .render(),
    })
}

fn cmd_regions(grid: usize, format: Format) -> Result<String, Error> {
    if grid < 2 {
        return Err(Error::input("regions needs grid >= 2"));
    }
    let cell = |i: usize| (i as f64 + 0.5) / grid as f64;
    let mut rows = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let (x1, x2) = (cell(i), cell(j));
            let region = exact::classify_region(x1, x2).expect("cell centers stay inside (0, 1)");
            rows.push((x1, x2, region.label()));
        }
    }
    Ok(match format {
        Format::Csv => csv(
            &["x1", "x2", "region"],
            &rows
                .iter()
                .map(|&(x1, x2, label)| {
                    vec![
                        robbins::emit::fmt_f64(x1),
                        robbins::emit::fmt_f64(x2),
                        label.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => Envelope::new("regions")
            .param("grid", grid as u64)
            .results(Json::Arr(
                rows.iter()
                    .map(|&(x1, x2, label)| {
                        Json::obj([
                            ("region", Json::Str(label.to_string())),
                            ("x1", Json::Num(x1)),
                            ("x2", Json::Num(x2)),
                        ])
                    })
                    .collect(),
            ))
            .render(),
    })
}

fn cmd_simulate(policy_id: &str, trials: u64, seed: u64, format: Format) -> Result<String, Error> {
    let registered = registry::build_policy(policy_id)?;
    let result = montecarlo::evaluate(registered.policy.as_ref(), policy_id, trials, seed)?;
    Ok(match format {
        Format::Csv => csv(
            &["policy-id", "trials", "seed", "mean", "stderr"],
            &[vec![
                result.policy_id.clone(),
                result.trials.to_string(),
                result.seed.to_string(),
                robbins::emit::fmt_f64(result.mean),
                robbins::emit::fmt_f64(result.stderr),
            ]],
        ),
        Format::Json => {
            let mut envelope = Envelope::new("simulate")
                .param("trials", trials)
                .param("seed", seed);
            for (key, value) in &registered.params {
                envelope.params.insert(key.clone(), value.clone());
            }
            envelope
                .results(Json::obj([
                    ("mean", Json::Num(result.mean)),
                    ("stderr", Json::Num(result.stderr)),
                ]))
                .render()
        }
    })
}

fn cmd_verify(level: Level, format: Format) -> (String, bool) {
    let checks = verify::run_checks(level);
    let all_pass = checks.iter().all(|c| c.pass);
    let level_name = match level {
        Level::Quick => "quick",
        Level::Full => "full",
    };
    let text = match format {
        Format::Csv => csv(
            &["name", "required", "achieved", "pass"],
            &checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.to_string(),
                        robbins::emit::fmt_f64(c.required),
                        robbins::emit::fmt_f64(c.achieved),
                        c.pass.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => Envelope::new("verify")
            .param("level", level_name)
            .results(Json::obj([
                ("all-pass", Json::Bool(all_pass)),
                (
                    "checks",
                    Json::Arr(
                        checks
                            .iter()
                            .map(|c| {
                                Json::obj([
                                    ("achieved", Json::Num(c.achieved)),
                                    ("name", Json::Str(c.name.to_string())),
                                    ("pass", Json::Bool(c.pass)),
                                    ("required", Json::Num(c.required)),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ]))
            .render(),
    };
    (text, all_pass)
}

fn cmd_noinfo(max_n: usize, format: Format) -> Result<String, Error> {
    if !(1..=10_000).contains(&max_n) {
        return Err(Error::input("noinfo supports 1 <= n <= 10000"));
    }
    let table = noinfo::w_table(max_n)?;
    Ok(match format {
        Format::Csv => csv(
            &["n", "w"],
            &table
                .iter()
                .map(|&(n, w)| vec![n.to_string(), robbins::emit::fmt_f64(w)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => Envelope::new("noinfo")
            .param("n", max_n as u64)
            .results(Json::Arr(
                table
                    .iter()
                    .map(|&(n, w)| Json::obj([("n", Json::UInt(n as u64)), ("w", Json::Num(w))]))
                    .collect(),
            ))
            .render(),
    })
}
