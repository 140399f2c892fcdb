use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use intrinsic_capacity::decomposition::{birkhoff_decompose, greedy_vertex, lexicographic_ordering, ColumnSumBounds};
use intrinsic_capacity::intrinsic::{
    binary_binary_report, ic01_binary_input, ic10_binary_output, ic11_bounds, ic11_exact_with_limit, rank1_probs,
    upper_ic_via_vertices,
};
use intrinsic_capacity::io::{channel_to_json, format_sig, parse_channel, to_csv};
use intrinsic_capacity::optim::{solve_capacity, BaOptions, Sense};
use intrinsic_capacity::state_info::{
    preset, run_paper_checks, si_sweep, CfOptions, Flag, PaperCheckOptions, StrategyLimits,
};
use intrinsic_capacity::{Channel, Decomposition, Error};

#[derive(Parser, Debug)]
#[command(name = "intrinsic-cap", version, about = "Intrinsic capacities of discrete memoryless channels")]
struct Cli {
    /// Convergence tolerance for capacity iterations; for verify-paper, the
    /// tolerance applied to every check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration cap for capacity iterations.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Largest number of deterministic channels n^m handed to an LP.
    #[arg(long, global = true, default_value_t = intrinsic_capacity::intrinsic::DEFAULT_LP_LIMIT)]
    lp_limit: u128,
    /// Largest number of candidate encoder strategies.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    strategy_limit: u128,
    /// Seed for the greedy ordering; 0 is lexicographic.
    #[arg(long, global = true, default_value_t = 0)]
    ordering_seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Bsc,
    Z,
    Binary,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity, rank probabilities and intrinsic capacities of a channel.
    Analyze { channel: PathBuf },
    /// A vertex of Dec(W) from the greedy extraction, or a decomposition into
    /// deterministic channels with column sums in [a, b].
    Decompose {
        channel: PathBuf,
        /// Column-sum bounds `A,B` applied to every column.
        #[arg(long)]
        birkhoff: Option<String>,
    },
    /// Intrinsic capacities of binary-input binary-output channels along a
    /// parameter grid.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// `start:stop:step`
        #[arg(long)]
        param_grid: String,
        /// Second crossover for the `binary` family; the grid drives the first.
        #[arg(long, default_value_t = 0.0)]
        eps2: f64,
    },
    /// Capacity of a state-dependent channel against the encoder observation
    /// crossover.
    SiSweep {
        #[arg(long, default_value = "paper-fig5")]
        preset: String,
        #[arg(long, default_value_t = 0.25)]
        q: f64,
        #[arg(long, default_value = "0:0.5:0.01")]
        p_grid: String,
    },
    /// Recomputes the worked examples and reports each check.
    VerifyPaper,
}

enum Failure {
    Config(String),
    Lib(Error),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
        Err(Failure::Checks(report)) => {
            print!("{report}");
            eprintln!("error: some checks failed");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    configure_threads()?;
    let ba = ba_options(cli)?;
    if cli.lp_limit == 0 || cli.strategy_limit == 0 {
        return Err(Failure::Config("limits must be positive".into()));
    }
    let text = match &cli.command {
        Command::Analyze { channel } => analyze(cli, &read_channel(channel)?, &ba)?,
        Command::Decompose { channel, birkhoff } => decompose(cli, &read_channel(channel)?, birkhoff.as_deref())?,
        Command::Sweep { family, param_grid, eps2 } => sweep(cli, *family, &parse_grid(param_grid)?, *eps2)?,
        Command::SiSweep { preset: name, q, p_grid } => {
            let model = preset(name)?;
            let points = si_sweep(&model, *q, &parse_grid(p_grid)?, &ba)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = points.iter().map(|p| vec![p.p, p.capacity_bits]).collect();
                    to_csv(&["p", "capacity_bits"], &rows)
                }
                Format::Json => pretty(&serde_json::to_value(&points).expect("serializable")),
            }
        }
        Command::VerifyPaper => {
            let report = run_paper_checks(&PaperCheckOptions { tol: cli.tol })?;
            let text = match cli.format {
                Some(Format::Json) => pretty(&serde_json::to_value(&report).expect("serializable")),
                _ => {
                    let mut s = String::new();
                    for c in &report.checks {
                        let tag = if c.passed { "PASS" } else { "FAIL" };
                        s.push_str(&format!(
                            "{tag}  {}: observed {}, expected {} ({})\n",
                            c.item,
                            format_sig(c.observed),
                            format_sig(c.expected),
                            c.detail
                        ));
                    }
                    let passed = report.checks.iter().filter(|c| c.passed).count();
                    s.push_str(&format!("{passed}/{} checks passed\n", report.checks.len()));
                    s
                }
            };
            if !report.all_passed() {
                if let Some(path) = &cli.output {
                    write_file(path, &text)?;
                    return Err(Failure::Checks(String::new()));
                }
                return Err(Failure::Checks(text));
            }
            text
        }
    };
    match &cli.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Outcome<()> {
    let Ok(value) = std::env::var("INTRINSIC_CAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Config(format!("INTRINSIC_CAP_THREADS must be a positive integer, got {value:?}")))?;
    // A second initialisation only fails if a pool already exists; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn ba_options(cli: &Cli) -> Outcome<BaOptions> {
    let mut ba = BaOptions::default();
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Config(format!("--tol must be positive, got {tol}")));
        }
        // verify-paper reads --tol as a check tolerance, not an iteration target.
        if !matches!(cli.command, Command::VerifyPaper) {
            ba.tol = tol;
            ba.accept_gap = ba.accept_gap.max(tol);
        }
    }
    if let Some(it) = cli.max_iter {
        if it == 0 {
            return Err(Failure::Config("--max-iter must be positive".into()));
        }
        ba.max_iter = it;
    }
    Ok(ba)
}

fn read_channel(path: &Path) -> Outcome<Channel> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_channel(&text)?)
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::Lib(Error::InvalidInput(format!("cannot write {}: {e}", path.display()))))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses `start:stop:step` into the points `start + k·step ≤ stop`.
fn parse_grid(spec: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Config(format!("grid must be start:stop:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Outcome<Vec<f64>>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if nums.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    if step <= 0.0 {
        return Err(Failure::Config(format!("grid step must be positive, got {step}")));
    }
    if stop < start {
        return Err(Failure::Config(format!("grid stop {stop} is below start {start}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Failure::Config(format!("grid has {count} points")));
    }
    Ok((0..count)
        .map(|k| {
            let x = start + k as f64 * step;
            // Snap accumulated rounding so that 0:1:0.1 ends exactly on 1.
            let snapped = (x * 1e12).round() / 1e12;
            snapped.min(stop)
        })
        .collect())
}

fn sweep(cli: &Cli, family: Family, grid: &[f64], eps2: f64) -> Outcome<String> {
    let header = ["param", "lower11", "lower10", "lower01", "upper11", "upper10", "upper01"];
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid {
        let (e1, e2) = match family {
            Family::Bsc => (t, t),
            Family::Z => (0.0, t),
            Family::Binary => (t, eps2),
        };
        let r = binary_binary_report(e1, e2)?;
        rows.push(vec![t, r.lower11, r.lower10, r.lower01, r.upper11, r.upper10, r.upper01]);
    }
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&header, &rows),
        Format::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect()))
                .collect();
            pretty(&Value::Array(records))
        }
    })
}

fn skipped(e: Error) -> Value {
    json!({ "skipped": e.to_string() })
}

fn analyze(cli: &Cli, w: &Channel, ba: &BaOptions) -> Outcome<String> {
    if cli.format == Some(Format::Csv) {
        return Err(Failure::Config("analyze writes JSON only".into()));
    }
    let cert = solve_capacity(w, ba)?;
    let mut report = serde_json::Map::new();
    report.insert("channel".into(), channel_to_json(w));
    report.insert("capacity".into(), json!(cert.capacity));
    report.insert("capacity_achieving_input".into(), json!(cert.input_dist));
    report.insert("rank1_probs".into(), serde_json::to_value(rank1_probs(w)).expect("serializable"));

    let exact = match (
        ic11_exact_with_limit(w, Sense::Minimize, cli.lp_limit),
        ic11_exact_with_limit(w, Sense::Maximize, cli.lp_limit),
    ) {
        (Ok((lo, lw)), Ok((hi, hw))) => json!({
            "lower": lo,
            "upper": hi,
            "lower_witness": lw,
            "upper_witness": hw,
        }),
        (Err(e), _) | (_, Err(e)) => {
            if !matches!(e, Error::TooLarge { .. }) {
                return Err(e.into());
            }
            skipped(e)
        }
    };
    report.insert("ic11_exact".into(), exact);
    report.insert("ic11_bounds".into(), serde_json::to_value(ic11_bounds(w)?).expect("serializable"));
    let ic10 = if w.n() == 2 {
        serde_json::to_value(ic10_binary_output(w)?).expect("serializable")
    } else {
        Value::Null
    };
    report.insert("ic10".into(), ic10);
    let ic01 = if w.m() == 2 {
        serde_json::to_value(ic01_binary_input(w)?).expect("serializable")
    } else {
        Value::Null
    };
    report.insert("ic01".into(), ic01);

    let cf = CfOptions { ba: *ba, strategy: StrategyLimits { candidates: cli.strategy_limit, ..Default::default() } };
    let mut search = serde_json::Map::new();
    for flag in [Flag::F10, Flag::F01] {
        let entry = match upper_ic_via_vertices(w, flag, &cf) {
            Ok((value, witness)) => json!({ "value": value, "witness": witness }),
            Err(e @ Error::TooLarge { .. }) => skipped(e),
            Err(e) => return Err(e.into()),
        };
        search.insert(format!("upper{flag}"), entry);
    }
    report.insert("vertex_search".into(), Value::Object(search));
    Ok(pretty(&Value::Object(report)))
}

fn decompose(cli: &Cli, w: &Channel, birkhoff: Option<&str>) -> Outcome<String> {
    let lambda: Decomposition = match birkhoff {
        Some(spec) => {
            let parsed: Vec<i64> = spec
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Failure::Config(format!("--birkhoff expects A,B integers, got {spec:?}")))?;
            let [a, b] = parsed[..] else {
                return Err(Failure::Config(format!("--birkhoff expects A,B integers, got {spec:?}")));
            };
            birkhoff_decompose(w, &ColumnSumBounds::uniform(w.n(), a, b)?)?
        }
        None => {
            let mut ordering = lexicographic_ordering(w.m(), w.n());
            if cli.ordering_seed != 0 {
                ordering.shuffle(&mut ChaCha8Rng::seed_from_u64(cli.ordering_seed));
            }
            greedy_vertex(w, &ordering)?
        }
    };
    Ok(match cli.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&serde_json::to_value(&lambda).expect("serializable")),
        Format::Csv => {
            let mut s = String::from("image,weight\n");
            for (d, weight) in lambda.atoms() {
                let image: Vec<String> = d.image().iter().map(|y| (y + 1).to_string()).collect();
                s.push_str(&format!("{},{}\n", image.join(" "), format_sig(weight)));
            }
            s
        }
    })
}
