mod report;

use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use arcmatch::arctree::ArcTree;
use arcmatch::engine::rooted_text;
use arcmatch::fuzz::{self, FuzzConfig};
use arcmatch::gen::Generator;
use arcmatch::records::{parse_records, Record};
use arcmatch::succinct::encode;
use arcmatch::{naps, EngineConfig, Mode};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use report::{json_line, key_lines, RunReport, Sizes};

/// Arc-preserving subsequence matching for nested arc-annotated strings.
#[derive(Parser)]
#[command(name = "arcmatch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether each pattern is an arc-preserving subsequence of each
    /// text. Exits 0 if all are, 1 if any is not, 2 on input errors.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        mode: ModeArg,
        /// Include operation counts and space measurements.
        #[arg(long)]
        stats: bool,
        /// One JSON object per pair instead of key: value lines.
        #[arg(long)]
        json: bool,
        /// Print the final Γ sequence and its compressed bit strings.
        #[arg(long)]
        dump_gamma: bool,
    },
    /// Print the length of the longest pattern prefix that embeds in the text.
    Prefix {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Cross-check all engine modes against the reference oracles on random
    /// instances. Exits 0 iff nothing diverges.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_m: usize,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Texts up to this length are also checked by exhaustive search.
        #[arg(long, default_value_t = 12)]
        search_cap: usize,
    },
    /// Time the engine on random instances of the given sizes.
    Bench {
        /// Pattern lengths; repeat or separate with commas.
        #[arg(long, value_delimiter = ',', default_value = "100")]
        m: Vec<usize>,
        /// Text lengths; repeat or separate with commas.
        #[arg(long, value_delimiter = ',', default_value = "100000")]
        n: Vec<usize>,
        /// Modes to run; defaults to ARCMATCH_MODE or uncompressed.
        #[arg(long, value_delimiter = ',')]
        mode: Vec<Mode>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fraction of text positions carrying arcs.
        #[arg(long, default_value_t = 0.6)]
        paired: f64,
        #[arg(long)]
        json: bool,
    },
    /// Show the heavy-path decomposition of each text's arc tree.
    Tree {
        /// Record file, or '-' for standard input.
        text: PathBuf,
    },
}

#[derive(Args)]
struct Inputs {
    /// Pattern record file, or '-' for standard input.
    pattern: PathBuf,
    /// Text record file, or '-' for standard input.
    text: PathBuf,
}

#[derive(Args)]
struct ModeArg {
    #[arg(long, env = "ARCMATCH_MODE", default_value_t = Mode::Uncompressed)]
    mode: Mode,
}

fn default_mode() -> Result<Mode> {
    match std::env::var("ARCMATCH_MODE") {
        Ok(s) => s.parse().context("ARCMATCH_MODE"),
        Err(_) => Ok(Mode::Uncompressed),
    }
}

fn read_records(path: &Path) -> Result<Vec<Record>> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_records(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(inputs: &Inputs) -> Result<(Vec<Record>, Vec<Record>)> {
    let patterns = read_records(&inputs.pattern)?;
    let texts = read_records(&inputs.text)?;
    anyhow::ensure!(
        !patterns.is_empty(),
        "{} has no records",
        inputs.pattern.display()
    );
    anyhow::ensure!(
        !texts.is_empty(),
        "{} has no records",
        inputs.text.display()
    );
    Ok((patterns, texts))
}

fn sizes(p: &Record, q: &Record) -> Sizes {
    Sizes {
        m: p.string.len(),
        n: q.string.len(),
        pattern_arcs: p.string.arc_count(),
        text_arcs: q.string.arc_count(),
    }
}

fn check(inputs: &Inputs, mode: Mode, stats: bool, json: bool, dump: bool) -> Result<ExitCode> {
    let (patterns, texts) = load(inputs)?;
    let mut out = io::stdout().lock();
    let mut all = true;
    let mut first = true;
    for p in &patterns {
        for q in &texts {
            let r = naps(&p.string, &q.string, EngineConfig::new(mode))?;
            all &= r.is_subsequence;
            let report = RunReport::new((&p.id, &q.id), mode, sizes(p, q), &r, stats);
            if json {
                writeln!(out, "{}", json_line(&report))?;
                continue;
            }
            if !first {
                writeln!(out)?;
            }
            first = false;
            write!(out, "{}", key_lines(&report))?;
            if dump {
                let values: Vec<String> = r.root.values().iter().map(u32::to_string).collect();
                writeln!(out, "gamma: {}", values.join(" "))?;
                for line in encode(&r.root)?.dump().lines() {
                    writeln!(out, "compressed: {line}")?;
                }
            }
        }
    }
    Ok(if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn prefix(inputs: &Inputs, mode: Mode) -> Result<ExitCode> {
    let (patterns, texts) = load(inputs)?;
    let single = patterns.len() == 1 && texts.len() == 1;
    let mut out = io::stdout().lock();
    for p in &patterns {
        for q in &texts {
            let k = arcmatch::longest_prefix(&p.string, &q.string, EngineConfig::new(mode))?;
            if single {
                writeln!(out, "{k}")?;
            } else {
                writeln!(out, "{}\t{}\t{k}", p.id, q.id)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_fuzz(cfg: FuzzConfig) -> Result<ExitCode> {
    let report = fuzz::run(&cfg);
    let mut out = io::stdout().lock();
    if let Some(d) = &report.divergence {
        writeln!(out, "{d}")?;
        writeln!(
            out,
            "{}/{} agree before the divergence",
            report.agreed, report.checked
        )?;
        return Ok(ExitCode::from(1));
    }
    writeln!(
        out,
        "{}/{} agree ({} also checked by exhaustive search, {} embeddable)",
        report.agreed, cfg.count, report.searched, report.positives
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BenchRow {
    m: usize,
    n: usize,
    mode: Mode,
    repeats: usize,
    text_arcs: usize,
    max_lightdepth: usize,
    total_spaces: usize,
    #[serde(serialize_with = "secs")]
    median_time: Duration,
    /// Median time over the previous row with the same m and mode.
    ratio: Option<f64>,
    initialize: u64,
    extend: u64,
    combine: u64,
    meld: u64,
    encode: u64,
    decode: u64,
    peak_live_gamma: usize,
    peak_gamma_bits: usize,
    /// Largest |V| of one compressed sequence.
    sequence_bound: usize,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

struct BenchPlan {
    ms: Vec<usize>,
    ns: Vec<usize>,
    modes: Vec<Mode>,
    repeats: usize,
    seed: u64,
    paired: f64,
    json: bool,
}

fn bench(plan: BenchPlan) -> Result<ExitCode> {
    anyhow::ensure!(plan.repeats > 0, "--repeats must be positive");
    let mut out = io::stdout().lock();
    if !plan.json {
        writeln!(
            out,
            "{:>6} {:>9} {:<23} {:>8} {:>5} {:>11} {:>6} {:>10} {:>9} {:>5} {:>9} {:>6}",
            "m",
            "n",
            "mode",
            "|A_Q|",
            "ld",
            "median",
            "ratio",
            "extend",
            "combine",
            "live",
            "bits",
            "2m+1"
        )?;
    }
    let mut previous: Vec<(usize, Mode, Duration)> = Vec::new();
    for &m in &plan.ms {
        for &n in &plan.ns {
            // one instance per size pair, independent of the mode list
            let mut gen = Generator::new(plan.seed ^ (m as u64) << 32 ^ n as u64);
            let q = gen.string(n, plan.paired);
            let p = gen.string(m, plan.paired);
            for &mode in &plan.modes {
                let mut runs = Vec::with_capacity(plan.repeats);
                for _ in 0..plan.repeats {
                    runs.push(naps(&p, &q, EngineConfig::new(mode))?);
                }
                runs.sort_by_key(|r| r.stats.wall_time);
                let s = &runs[plan.repeats / 2].stats;
                let ratio = previous
                    .iter()
                    .rev()
                    .find(|(pm, pmode, _)| *pm == m && *pmode == mode)
                    .map(|(_, _, t)| s.wall_time.as_secs_f64() / t.as_secs_f64());
                previous.push((m, mode, s.wall_time));
                let row = BenchRow {
                    m,
                    n,
                    mode,
                    repeats: plan.repeats,
                    text_arcs: s.tree_arcs,
                    max_lightdepth: s.max_lightdepth,
                    total_spaces: s.total_spaces,
                    median_time: s.wall_time,
                    ratio,
                    initialize: s.initialize,
                    extend: s.extend,
                    combine: s.combine,
                    meld: s.meld,
                    encode: s.encode,
                    decode: s.decode,
                    peak_live_gamma: s.peak_live_gamma,
                    peak_gamma_bits: s.peak_gamma_bits,
                    sequence_bound: 2 * m + 1,
                };
                if plan.json {
                    writeln!(out, "{}", json_line(&row))?;
                } else {
                    writeln!(
                        out,
                        "{:>6} {:>9} {:<23} {:>8} {:>5} {:>11} {:>6} {:>10} {:>9} {:>5} {:>9} {:>6}",
                        row.m,
                        row.n,
                        row.mode.as_str(),
                        row.text_arcs,
                        row.max_lightdepth,
                        format!("{:.2?}", row.median_time),
                        row.ratio.map_or("-".into(), |r| format!("{r:.2}")),
                        row.extend,
                        row.combine,
                        row.peak_live_gamma,
                        row.peak_gamma_bits,
                        row.sequence_bound
                    )?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn tree(path: &Path) -> Result<ExitCode> {
    let records = read_records(path)?;
    let mut out = io::stdout().lock();
    for (k, r) in records.iter().enumerate() {
        let text = rooted_text(&r.string);
        let tree = ArcTree::build(&text)?;
        if k > 0 {
            writeln!(out)?;
        }
        writeln!(out, ">{}", r.id)?;
        if text.len() != r.string.len() {
            writeln!(out, "wrapped: {} {}", text.sequence(), text.structure())?;
        }
        writeln!(
            out,
            "arcs: {}  max lightdepth: {}  spaces: {}",
            tree.len(),
            tree.max_lightdepth(),
            tree.total_spaces()
        )?;
        write!(out, "{}", tree.dump())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check {
            inputs,
            mode,
            stats,
            json,
            dump_gamma,
        } => check(&inputs, mode.mode, stats, json, dump_gamma),
        Command::Prefix { inputs, mode } => prefix(&inputs, mode.mode),
        Command::Fuzz {
            count,
            max_m,
            max_n,
            seed,
            search_cap,
        } => run_fuzz(FuzzConfig {
            count,
            max_m,
            max_n,
            seed,
            search_cap,
        }),
        Command::Bench {
            m,
            n,
            mode,
            repeats,
            seed,
            paired,
            json,
        } => bench(BenchPlan {
            ms: m,
            ns: n,
            modes: if mode.is_empty() {
                vec![default_mode()?]
            } else {
                mode
            },
            repeats,
            seed,
            paired,
            json,
        }),
        Command::Tree { text } => tree(&text),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
