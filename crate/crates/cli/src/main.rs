mod config;

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use pba_core::corpus::{filter_corpus, parse_nettalk_str, render, BOUNDARY};
use pba_core::evaluation::{bounds, evaluate_with_index};
use pba_core::report::{self, ReportHeader, SummaryRow};
use pba_core::strategies::{rank, rank_pronunciations, score_component};
use pba_core::{
    probscore, CountSource, Direction, EvaluationReport, Lexicon, Root, Selector, StrategySpec,
    SubstringIndex, WordLattice,
};

use config::{CommonArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "pba",
    version,
    about = "Pronunciation by analogy over NETtalk-style lexicons"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the substring index of the filtered corpus and save it to --out
    BuildIndex,
    /// Pronounce one word and print the best-ranked pronunciations
    Pronounce {
        word: String,
        /// print every candidate's factors
        #[arg(long)]
        explain: bool,
        #[arg(long, default_value_t = 5)]
        top: usize,
        /// hold the word out of the index if it is in the lexicon
        #[arg(long)]
        leave_one_out: bool,
        /// prebuilt index from build-index
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Leave-one-out evaluation of one strategy
    Evaluate {
        /// per-word TSV
        #[arg(long)]
        detail: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Lower (random tie-breaking) and upper (edit-distance oracle) bounds
    Bounds {
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Evaluate a grid of strategies and root degrees; resumes an existing --out
    Sweep {
        /// comma-separated strategies (default: --strategy)
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
        /// comma-separated root degrees (default: --root)
        #[arg(long, value_delimiter = ',')]
        roots: Option<Vec<String>>,
        /// add all 2047 eleven-component combinations to the grid
        #[arg(long)]
        all_combinations: bool,
        #[arg(long)]
        index: Option<PathBuf>,
    },
}

struct Loaded {
    lexicon: Lexicon,
    digest: String,
}

fn load_lexicon(cfg: &RunConfig) -> Result<Loaded> {
    let path = cfg.corpus_path()?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_nettalk_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if !parsed.rejected.is_empty() {
        log::warn!("{} malformed lines skipped", parsed.rejected.len());
        for r in parsed.rejected.iter().take(5) {
            log::warn!("  line {}: {}", r.line_number, r.reason);
        }
    }
    let lexicon = filter_corpus(&parsed.entries, cfg.direction, &cfg.filter);
    if lexicon.is_empty() {
        bail!("{} has no usable entries", path.display());
    }
    log::info!(
        "{} entries, {} after filtering for {}",
        parsed.entries.len(),
        lexicon.len(),
        cfg.direction
    );
    Ok(Loaded {
        lexicon,
        digest: report::config_hash(&text),
    })
}

fn load_index(lexicon: &Lexicon, path: Option<&Path>) -> Result<SubstringIndex> {
    match path {
        Some(p) => {
            let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
            SubstringIndex::read_from(BufReader::new(f))
                .with_context(|| format!("reading {}", p.display()))
        }
        None => Ok(SubstringIndex::build(lexicon.entries())),
    }
}

/// Writes via a temporary file so an interrupted run never leaves a torn file.
fn write_atomic(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let tmp = path.with_extension("partial");
    {
        let mut w = io::BufWriter::new(
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?,
        );
        f(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, f),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            Ok(())
        }
    }
}

fn summary_line(r: &EvaluationReport) -> String {
    format!(
        "{} {} {} root={}: words {:.2}% phones {:.2}% silenced {} ({} ms)",
        r.strategy,
        r.direction,
        r.mode,
        r.root,
        r.word_accuracy,
        r.phoneme_accuracy,
        r.silenced,
        r.wall_ms
    )
}

fn say(cfg: &RunConfig, line: &str) {
    // keep stdout clean for TSV when no --out is given
    if cfg.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn padded_word(cfg: &RunConfig, lexicon: &Lexicon, word: &str) -> Result<Vec<u8>> {
    let raw: Vec<u8> = match cfg.direction {
        Direction::TextToSpeech => word.to_ascii_lowercase().into_bytes(),
        Direction::SpeechToText => word.as_bytes().to_vec(),
    };
    if raw.is_empty() {
        bail!("empty word");
    }
    let alphabet = lexicon.alphabet();
    let unknown: Vec<char> = raw
        .iter()
        .filter(|b| !alphabet.contains(b))
        .map(|&b| b as char)
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    if !unknown.is_empty() {
        let mut unknown = unknown;
        unknown.sort_unstable();
        bail!("`{word}` uses symbols not in the corpus: {unknown:?}");
    }
    let mut w = vec![BOUNDARY];
    w.extend(raw);
    w.push(BOUNDARY);
    Ok(w)
}

fn inner(p: &[u8]) -> String {
    render(&p[1..p.len() - 1])
}

fn pronounce_with<S: CountSource + ?Sized>(
    cfg: &RunConfig,
    word: &[u8],
    source: &S,
    top: usize,
    explain: bool,
) -> Result<()> {
    let lattice = match WordLattice::build(
        word,
        source,
        cfg.mode_for(&cfg.strategy),
        &cfg.lattice_options(),
    ) {
        Ok(l) => l,
        Err(e) => bail!("`{}`: {e}", inner(word)),
    };
    let ranking = rank_pronunciations(&lattice, &cfg.strategy)?;
    println!(
        "{}\t{} {}, {} segmentations of {} segments, {} candidates",
        inner(word),
        cfg.strategy,
        lattice.mode(),
        lattice.segmentations().len(),
        lattice.segment_count(),
        lattice.candidates().len()
    );
    for (i, (p, score)) in ranking.entries.iter().take(top).enumerate() {
        println!("{}\t{}\t{:.6e}", i + 1, inner(p), score);
    }
    if explain {
        match &cfg.strategy {
            StrategySpec::Probabilistic { rule, root, .. } => {
                print!("{}", probscore::explain(*rule, &lattice, *root))
            }
            StrategySpec::Combination { components, .. } => {
                let cands = lattice.candidates();
                let mut cols = Vec::new();
                for &comp in components {
                    let scores = score_component(comp, &lattice)?;
                    let ranks = rank(&scores, comp.optimum());
                    cols.push((comp, scores, ranks));
                }
                let names: Vec<&str> = cols.iter().map(|c| c.0.name()).collect();
                println!(
                    "  segmentation  pronunciation  {}  (score/rank)",
                    names.join(" ")
                );
                for (i, c) in cands.iter().enumerate() {
                    let cells: Vec<String> = cols
                        .iter()
                        .map(|(_, s, r)| format!("{:.4}/{}", s[i].primary, r[i]))
                        .collect();
                    println!(
                        "  {}  {}  {}",
                        lattice.segmentation_of(c).render(word),
                        render(&c.assembled),
                        cells.join(" ")
                    );
                }
            }
            _ => {
                for c in lattice.candidates() {
                    let seg = lattice.segmentation_of(c);
                    let prons: Vec<String> = c.pronunciations.iter().map(|p| render(p)).collect();
                    let counts: Vec<String> = c.counts.iter().map(|n| n.to_string()).collect();
                    println!(
                        "  {}  {}  counts {}",
                        seg.render(word),
                        prons.join("+"),
                        counts.join("x")
                    );
                }
            }
        }
    }
    Ok(())
}

fn cmd_build_index(cfg: &RunConfig) -> Result<()> {
    let Some(out) = cfg.out.as_deref() else {
        bail!("build-index needs --out FILE");
    };
    let loaded = load_lexicon(cfg)?;
    let idx = SubstringIndex::build(loaded.lexicon.entries());
    write_atomic(out, |w| idx.write_to(w).map_err(io::Error::other))?;
    println!(
        "{} substrings from {} words -> {}",
        idx.len(),
        loaded.lexicon.len(),
        out.display()
    );
    Ok(())
}

fn cmd_pronounce(
    cfg: &RunConfig,
    word: &str,
    top: usize,
    explain: bool,
    loo: bool,
    index: Option<&Path>,
) -> Result<()> {
    let loaded = load_lexicon(cfg)?;
    let idx = load_index(&loaded.lexicon, index)?;
    let w = padded_word(cfg, &loaded.lexicon, word)?;
    let held_out = loo
        .then(|| {
            loaded
                .lexicon
                .entries()
                .iter()
                .find(|e| e.letters() == &w[..])
        })
        .flatten();
    match held_out {
        Some(e) => pronounce_with(cfg, &w, &idx.leave_one_out(e), top, explain),
        None => {
            if loo {
                log::info!("`{word}` is not in the lexicon; nothing to hold out");
            }
            pronounce_with(cfg, &w, &idx, top, explain)
        }
    }
}

fn header(cfg: &RunConfig, digest: &str, grid: &str) -> ReportHeader {
    ReportHeader::new(&cfg.canonical(digest, grid), &cfg.filter.label())
}

fn cmd_evaluate(cfg: &RunConfig, detail: Option<&Path>, index: Option<&Path>) -> Result<()> {
    let loaded = load_lexicon(cfg)?;
    let idx = load_index(&loaded.lexicon, index)?;
    let sel = Selector::Strategy(cfg.strategy.clone());
    let rep = evaluate_with_index(&loaded.lexicon, &idx, &sel, &cfg.eval_options());
    let h = header(
        cfg,
        &loaded.digest,
        &format!("strategy={};root={}", rep.strategy, rep.root),
    );
    let row = SummaryRow::from_report(&rep, cfg.timing);
    emit(cfg.out.as_deref(), |w| {
        report::write_summary(w, &h, std::slice::from_ref(&row))
    })?;
    if let Some(p) = detail {
        write_atomic(p, |w| report::write_detail(w, &h, &rep))?;
    }
    say(cfg, &summary_line(&rep));
    Ok(())
}

fn cmd_bounds(cfg: &RunConfig, index: Option<&Path>) -> Result<()> {
    let loaded = load_lexicon(cfg)?;
    let idx = load_index(&loaded.lexicon, index)?;
    let (lo, hi) = bounds(&loaded.lexicon, &idx, &cfg.eval_options());
    let h = header(cfg, &loaded.digest, "bounds");
    let rows = [
        SummaryRow::from_report(&lo, cfg.timing),
        SummaryRow::from_report(&hi, cfg.timing),
    ];
    emit(cfg.out.as_deref(), |w| report::write_summary(w, &h, &rows))?;
    say(cfg, &summary_line(&lo));
    say(cfg, &summary_line(&hi));
    Ok(())
}

/// Expands strategy names and roots into grid points in a fixed order.
/// Strategies that take no root appear once.
fn grid(
    cfg: &RunConfig,
    strategies: &[String],
    roots: &[String],
    all: bool,
) -> Result<Vec<StrategySpec>> {
    let roots: Vec<Root> = roots
        .iter()
        .map(|r| {
            r.parse()
                .map_err(|e: String| anyhow::anyhow!("--roots: {e}"))
        })
        .collect::<Result<_>>()?;
    let mut names: Vec<String> = strategies.to_vec();
    if all {
        names.extend((1u32..2048).map(|m| {
            (0..11)
                .map(|b| if m >> (10 - b) & 1 == 1 { '1' } else { '0' })
                .collect()
        }));
    }
    let mut out: Vec<StrategySpec> = Vec::new();
    let mut seen = HashSet::new();
    for name in &names {
        let base = StrategySpec::parse(name)?;
        let rooted = matches!(
            base,
            StrategySpec::Product { .. } | StrategySpec::Probabilistic { .. }
        );
        let points: Vec<StrategySpec> = if rooted {
            roots
                .iter()
                .map(|r| base.clone().with_root(*r).with_collate(cfg.collate))
                .collect()
        } else if roots.is_empty() {
            vec![]
        } else {
            vec![base]
        };
        for p in points {
            let sel = Selector::Strategy(p.clone());
            if seen.insert((sel.label(), p.root().to_string())) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn cmd_sweep(
    cfg: &RunConfig,
    strategies: Option<Vec<String>>,
    roots: Option<Vec<String>>,
    all: bool,
    index: Option<&Path>,
) -> Result<()> {
    let clean = |v: Vec<String>| -> Vec<String> {
        v.into_iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };
    let strategies = match strategies {
        Some(v) => clean(v),
        None if all => vec![],
        None => vec![cfg.strategy.to_string()],
    };
    let roots = match roots {
        Some(v) => clean(v),
        None => vec![cfg.root.to_string()],
    };
    let points = grid(cfg, &strategies, &roots, all)?;
    let loaded = load_lexicon(cfg)?;
    let h = header(cfg, &loaded.digest, "sweep");

    let mut done: Vec<SummaryRow> = Vec::new();
    if let Some(p) = cfg.out.as_deref().filter(|p| p.exists()) {
        let f = fs::File::open(p)?;
        let (old, rows) = report::read_summary(BufReader::new(f))
            .with_context(|| format!("reading existing report {}", p.display()))?;
        if old.config_hash != h.config_hash || old.homophones != h.homophones {
            bail!(
                "{} was written with a different configuration (config={}); remove it or pick another --out",
                p.display(),
                old.config_hash
            );
        }
        log::info!("resuming: {} rows already in {}", rows.len(), p.display());
        done = rows;
    }

    let key = |s: &StrategySpec, mode: &str| {
        let sel = Selector::Strategy(s.clone());
        (
            sel.label(),
            cfg.direction.as_str().to_string(),
            mode.to_string(),
            s.root().to_string(),
        )
    };
    let mode_of = |s: &StrategySpec| cfg.mode_for(s).to_string();
    let mut results: Vec<Option<SummaryRow>> = points
        .iter()
        .map(|s| {
            let k = key(s, &mode_of(s));
            done.iter()
                .find(|r| {
                    (
                        r.strategy.clone(),
                        r.direction.clone(),
                        r.mode.clone(),
                        r.root.clone(),
                    ) == k
                })
                .cloned()
        })
        .collect();

    let write = |results: &[Option<SummaryRow>]| -> Result<()> {
        let rows: Vec<SummaryRow> = results.iter().flatten().cloned().collect();
        match cfg.out.as_deref() {
            Some(p) => write_atomic(p, |w| report::write_summary(w, &h, &rows)),
            None => Ok(()),
        }
    };
    // an empty grid still produces a (header-only) report
    write(&results)?;

    let needed = results.iter().filter(|r| r.is_none()).count();
    if needed > 0 {
        let idx = load_index(&loaded.lexicon, index)?;
        let mut n = 0;
        for (i, s) in points.iter().enumerate() {
            if results[i].is_some() {
                continue;
            }
            n += 1;
            let rep = evaluate_with_index(
                &loaded.lexicon,
                &idx,
                &Selector::Strategy(s.clone()),
                &cfg.eval_options(),
            );
            say(cfg, &format!("[{n}/{needed}] {}", summary_line(&rep)));
            results[i] = Some(SummaryRow::from_report(&rep, cfg.timing));
            write(&results)?;
        }
    }
    if cfg.out.is_none() {
        let rows: Vec<SummaryRow> = results.into_iter().flatten().collect();
        report::write_summary(io::stdout().lock(), &h, &rows)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::resolve(&cli.common)?;
    match cli.command {
        Command::BuildIndex => cmd_build_index(&cfg),
        Command::Pronounce {
            word,
            explain,
            top,
            leave_one_out,
            index,
        } => cmd_pronounce(&cfg, &word, top, explain, leave_one_out, index.as_deref()),
        Command::Evaluate { detail, index } => {
            cmd_evaluate(&cfg, detail.as_deref(), index.as_deref())
        }
        Command::Bounds { index } => cmd_bounds(&cfg, index.as_deref()),
        Command::Sweep {
            strategies,
            roots,
            all_combinations,
            index,
        } => cmd_sweep(&cfg, strategies, roots, all_combinations, index.as_deref()),
    }
}
