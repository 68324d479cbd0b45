use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ontominer_core::miner::parse_ratio;
use ontominer_core::{
    chase, clausify, mine, parse_kb_with, report, ChaseConfig, CombinedKb, EquivScan, Error, MiningConfig,
    MiningResult, Mode, ParseError, ParseOptions, Ratio, VariableSharing,
};

#[derive(Parser)]
#[command(name = "ontominer", version, about = "Frequent conjunctive query mining over DL knowledge bases with DL-safe rules")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine frequent patterns and write patterns.txt, stats.csv and trie.graphml.
    Mine {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "sem")]
        mode: Mode,
    },
    /// Run the semantic and syntactic modes and tabulate their counters in compare.csv.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Also run the taxonomy-driven mode.
        #[arg(long)]
        with_tax: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanArg {
    Whole,
    SameDepth,
}

#[derive(Clone, Copy, ValueEnum)]
enum SharingArg {
    Extended,
    Single,
}

#[derive(Args)]
struct RunArgs {
    /// Knowledge base in the s-expression syntax.
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    ref_concept: String,
    /// Minimum support, as a decimal (`0.5`) or a fraction (`2/3`).
    #[arg(long, value_parser = parse_minsup)]
    minsup: Ratio<usize>,
    /// Maximum number of atoms per pattern, the reference atom included.
    #[arg(long)]
    max_depth: usize,
    /// Comma-separated predicate names; defaults to every predicate occurring in some model.
    #[arg(long, value_delimiter = ',')]
    bias: Option<Vec<String>>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// File of `key=value` lines using the long option names; command-line options take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Read `(equivalent A (not B))` as disjointness plus covering.
    #[arg(long)]
    covering_complement: bool,
    /// Keep non-DL facts in the program used for the semantic tests.
    #[arg(long)]
    cp_keep_nondl: bool,
    #[arg(long, value_enum, default_value = "whole")]
    equiv_scan: ScanArg,
    #[arg(long, value_enum, default_value = "extended")]
    sharing: SharingArg,
    #[arg(long, default_value_t = ChaseConfig::default().skolem_depth_cap)]
    skolem_depth: usize,
    #[arg(long, default_value_t = ChaseConfig::default().max_branches)]
    max_branches: usize,
    /// Write the clausified program to FILE.
    #[arg(long, value_name = "FILE")]
    dump_program: Option<PathBuf>,
    /// Write the minimal models of the full KB to FILE.
    #[arg(long, value_name = "FILE")]
    dump_models: Option<PathBuf>,
    /// Add a runtime column to stats.csv (otherwise runtime goes to runtime.txt only).
    #[arg(long)]
    record_runtime: bool,
}

fn parse_minsup(s: &str) -> Result<Ratio<usize>, String> {
    parse_ratio(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn chase_config(&self) -> ChaseConfig {
        ChaseConfig {
            skolem_depth_cap: self.skolem_depth,
            max_branches: self.max_branches,
        }
    }

    fn mining_config(&self, mode: Mode) -> MiningConfig {
        let mut cfg = MiningConfig::new(self.ref_concept.clone(), self.minsup, self.max_depth, mode);
        cfg.bias = self.bias.clone();
        cfg.cp_keep_nondl = self.cp_keep_nondl;
        cfg.equiv_scan = match self.equiv_scan {
            ScanArg::Whole => EquivScan::WholeTrie,
            ScanArg::SameDepth => EquivScan::SameDepth,
        };
        cfg.sharing = match self.sharing {
            SharingArg::Extended => VariableSharing::Extended,
            SharingArg::Single => VariableSharing::SingleNew,
        };
        cfg.chase = self.chase_config();
        cfg
    }

    fn load_kb(&self) -> Result<CombinedKb> {
        let src = fs::read_to_string(&self.kb).with_context(|| format!("reading {}", self.kb.display()))?;
        let opts = ParseOptions {
            covering_complement: self.covering_complement,
        };
        let kb = parse_kb_with(&src, opts).with_context(|| format!("parsing {}", self.kb.display()))?;
        Ok(kb)
    }

    fn dumps(&self, kb: &CombinedKb) -> Result<()> {
        if self.dump_program.is_none() && self.dump_models.is_none() {
            return Ok(());
        }
        let program = clausify(kb)?;
        if let Some(path) = &self.dump_program {
            write(path, &program.to_string())?;
        }
        if let Some(path) = &self.dump_models {
            let ms = chase(&program, &kb.abox, &self.chase_config())?;
            write(path, &ms.to_string())?;
        }
        Ok(())
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_outputs(dir: &Path, result: &MiningResult, record_runtime: bool) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join("patterns.txt"), &report::patterns_txt(result))?;
    write(&dir.join("stats.csv"), &report::stats_csv(&result.stats, record_runtime))?;
    write(&dir.join("trie.graphml"), &report::trie_graphml(&result.trie))?;
    write(
        &dir.join("runtime.txt"),
        &format!("{:.6}\n", result.stats.runtime.as_secs_f64()),
    )?;
    if result.stats.truncated {
        log::warn!("skolem depth cap reached; entailments may be incomplete");
    }
    log::info!(
        "{} frequent patterns, {} chase calls, {:.3}s",
        result.trie.len(),
        result.stats.chase_calls,
        result.stats.runtime.as_secs_f64()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mine { run, mode } => {
            let kb = run.load_kb()?;
            run.dumps(&kb)?;
            let result = mine(&kb, &run.mining_config(mode))?;
            write_outputs(&run.out, &result, run.record_runtime)
        }
        Command::Compare { run, with_tax } => {
            let kb = run.load_kb()?;
            run.dumps(&kb)?;
            let mut modes = vec![Mode::Sem, Mode::NoSem];
            if with_tax {
                modes.push(Mode::SemTax);
            }
            let mut results = Vec::new();
            for mode in modes {
                let result = mine(&kb, &run.mining_config(mode))?;
                write_outputs(&run.out.join(mode.to_string()), &result, run.record_runtime)?;
                results.push((mode, result));
            }
            let stats: Vec<_> = results.iter().map(|(m, r)| (*m, &r.stats)).collect();
            write(&run.out.join("compare.csv"), &report::compare_csv(&stats))
        }
    }
}

/// Splices `--key value` pairs from a `--config` file in front of the
/// command-line options, so that the latter win.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = args.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(args) };
    let Some(sub) = args.iter().position(|a| a == "mine" || a == "compare") else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{path}:{}: expected key=value", n + 1);
        };
        let key = key.trim().replace('_', "-");
        if key == "config" {
            bail!("{path}:{}: nested config files are not supported", n + 1);
        }
        match value.trim() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => {
                extra.push(format!("--{key}"));
                extra.push(v.to_string());
            }
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ParseError>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::InconsistentKb) => 2,
        Some(Error::EmptyReferenceConcept(_)) => 3,
        Some(Error::BranchLimitExceeded(_)) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
