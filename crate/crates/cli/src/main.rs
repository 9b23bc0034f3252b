use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cantor_spectra::frame::{frame_scan, to_csv, XiGrid};
use cantor_spectra::gap::{certify_spectrum, gap_value, min_gap, refute_series, SearchLimits};
use cantor_spectra::measure::compute_constants;
use cantor_spectra::ortho::set_report;
use cantor_spectra::rescale::{classify_k_lambda4, classify_scaled};
use cantor_spectra::tree::{
    enumerate_lambda, make_kappa, make_standard, make_tau24, rescaled_counterexample, FiniteTrie,
    TreeMapping,
};
use cantor_spectra::{Certificate, MeasureParams, Verdict, Word};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cantor-spectra", version, about = "Spectra of Cantor measures μ_{q,b}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify integer rescalings KΛ as JSON lines.
    ClassifyK {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        /// Only odd K.
        #[arg(long)]
        odd: bool,
    },
    /// Certify or refute the spectral property of a construction.
    Certify {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Partial frame sums Q_n on a grid.
    FrameScan {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long, allow_hyphen_values = true)]
        xi_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Infimum of the gap quantity over extensions of a word.
    Gap {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        word: String,
    },
    /// The truncation Λ_level of Λ(τ).
    Export {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Orthogonality and maximality of an integer set.
    Ortho {
        #[command(flatten)]
        run: RunConfig,
        /// Comma separated integers; must contain 0.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        set: Vec<BigInt>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Tau24,
    Standard,
    Kappa,
    TrieFile,
    RescaledCounterexample,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunConfig {
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long, value_enum, default_value = "tau24")]
    construction: Construction,
    /// Trie file for `--construction trie-file`.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 24)]
    depth: usize,
    #[arg(long, default_value_t = 8)]
    level: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long, default_value_t = 1e-10)]
    mu_tol: f64,
    #[arg(long, default_value_t = 1e-5)]
    grid_resolution: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl RunConfig {
    fn params(&self) -> Result<MeasureParams> {
        let (q, b) = match (self.construction, self.q, self.b) {
            (Construction::Tau24, q, b) => {
                if q.is_some_and(|q| q != 2) || b.is_some_and(|b| b != 4) {
                    bail!("tau24 is defined for q=2, b=4");
                }
                (2, 4)
            }
            (Construction::Kappa | Construction::RescaledCounterexample, q, b) => {
                (q.unwrap_or(2), b.unwrap_or(6))
            }
            (_, Some(q), Some(b)) => (q, b),
            (Construction::TrieFile, _, _) => return Ok(self.trie()?.params()),
            _ => bail!("--q and --b are required for this construction"),
        };
        Ok(MeasureParams::new(q, b)?)
    }

    fn trie(&self) -> Result<FiniteTrie> {
        let path = self
            .file
            .as_ref()
            .context("--file is required for --construction trie-file")?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let trie = FiniteTrie::from_json(&text).with_context(|| format!("loading {}", path.display()))?;
        if let (Some(q), Some(b)) = (self.q, self.b) {
            if (q, b) != (trie.params().q(), trie.params().b()) {
                bail!("{} is a trie for different parameters", path.display());
            }
        }
        Ok(trie)
    }

    fn mapping(&self) -> Result<Box<dyn TreeMapping>> {
        if self.construction == Construction::TrieFile {
            return Ok(Box::new(self.trie()?));
        }
        let p = self.params()?;
        Ok(match self.construction {
            Construction::Tau24 => Box::new(make_tau24()),
            Construction::Standard => Box::new(make_standard(p)),
            Construction::Kappa => Box::new(make_kappa(p)?),
            Construction::RescaledCounterexample => Box::new(rescaled_counterexample(p)?),
            Construction::TrieFile => unreachable!("handled above"),
        })
    }

    fn limits(&self) -> SearchLimits {
        SearchLimits {
            budget: self.budget,
            ..SearchLimits::default()
        }
    }

    fn record_tolerances(&self, c: &mut Certificate) {
        let t = &mut c.parameters.tolerances;
        t.insert("mu_tol".into(), self.mu_tol);
        t.insert("grid_resolution".into(), self.grid_resolution);
        t.insert("depth".into(), self.depth as f64);
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// Exit status for a verdict: 0 when definitive, 2 otherwise.
fn status(v: Verdict) -> u8 {
    if v.is_definitive() {
        0
    } else {
        2
    }
}

fn classify_k(run: &RunConfig, from: i64, to: i64, odd: bool) -> Result<u8> {
    let p = run.params()?;
    let ks: Vec<i64> = (from..=to).filter(|k| !odd || k % 2 != 0).collect();
    let mut out = String::new();
    let mut code = 0;
    if (p.q(), p.b()) == (2, 4) && run.construction == Construction::Tau24 {
        for &k in &ks {
            let c = classify_k_lambda4(k)?;
            out += &serde_json::to_string(&c)?;
            out.push('\n');
        }
    } else {
        let t = run.mapping()?;
        for &k in &ks {
            let mut c = classify_scaled(t.as_ref(), k, run.depth, None)?;
            run.record_tolerances(&mut c);
            code = code.max(status(c.verdict));
            out += &serde_json::to_string(&json!({
                "k": k,
                "verdict": c.verdict,
                "certificate": c,
            }))?;
            out.push('\n');
        }
    }
    run.emit(&out)?;
    Ok(code)
}

fn certify(run: &RunConfig) -> Result<u8> {
    let t = run.mapping()?;
    let mut c = if t.n_tau_bound().is_some() {
        let p = t.params();
        let constants = compute_constants(&p, run.grid_resolution)?;
        refute_series(t.as_ref(), &constants, run.level, run.limits().horizon)?
    } else {
        certify_spectrum(t.as_ref(), run.level, &run.limits())?
    };
    run.record_tolerances(&mut c);
    let mut text = c.to_json();
    text.push('\n');
    run.emit(&text)?;
    Ok(status(c.verdict))
}

fn scan(run: &RunConfig, xi_min: f64, xi_max: f64, steps: usize) -> Result<u8> {
    let t = run.mapping()?;
    let grid = XiGrid {
        xi_min,
        xi_max,
        steps,
    };
    let rows = frame_scan(t.as_ref(), &grid, run.level, run.mu_tol)?;
    let text = match run.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&rows),
        Format::Json => {
            let mut s = String::new();
            for r in &rows {
                s += &serde_json::to_string(r)?;
                s.push('\n');
            }
            s
        }
    };
    run.emit(&text)?;
    Ok(0)
}

fn gap(run: &RunConfig, word: &str) -> Result<u8> {
    let t = run.mapping()?;
    let delta = Word::parse(t.params().q(), word)?;
    let limits = run.limits();
    let m = min_gap(t.as_ref(), &delta, &limits)?;
    let zero_tail = gap_value(t.as_ref(), &delta, &Word::empty(delta.q()), limits.horizon);
    let text = serde_json::to_string_pretty(&json!({
        "mapping": t.name(),
        "word": delta,
        "value": m.value,
        "witness": m.witness,
        "exact": m.exact,
        "nodes": m.nodes,
        "zero_tail": zero_tail,
    }))?;
    run.emit(&(text + "\n"))?;
    Ok(if m.exact { 0 } else { 2 })
}

fn export(run: &RunConfig) -> Result<u8> {
    let t = run.mapping()?;
    let set = enumerate_lambda(t.as_ref(), run.level, run.level + run.depth)?;
    let values: Vec<String> = set.values.iter().map(BigInt::to_string).collect();
    run.emit(&format!("[{}]\n", values.join(",")))?;
    if !set.unresolved.is_empty() {
        eprintln!("{} words left unresolved", set.unresolved.len());
        return Ok(2);
    }
    Ok(0)
}

fn ortho(run: &RunConfig, set: &[BigInt]) -> Result<u8> {
    let p = run.params()?;
    let set: BTreeSet<BigInt> = set.iter().cloned().collect();
    let r = set_report(&p, &set, run.depth)?;
    run.emit(&(serde_json::to_string_pretty(&r)? + "\n"))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::ClassifyK { run, from, to, odd } => classify_k(run, *from, *to, *odd),
        Command::Certify { run } => certify(run),
        Command::FrameScan {
            run,
            xi_min,
            xi_max,
            steps,
        } => scan(run, *xi_min, *xi_max, *steps),
        Command::Gap { run, word } => gap(run, word),
        Command::Export { run } => export(run),
        Command::Ortho { run, set } => ortho(run, set),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
