//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use pba_core::corpus::FilterOptions;
use pba_core::lattice::FallbackPolicy;
use pba_core::{
    Direction, EvalOptions, HomophoneRule, LatticeOptions, PhoneAggregation, Root,
    SegmentationMode, StrategySpec,
};
use serde::Deserialize;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// NETtalk-format lexicon
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// TOML file with defaults for any of these flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// tts (letters to phonemes) or stt (phonemes to letters)
    #[arg(long, global = true)]
    pub direction: Option<String>,
    /// overlap1 or nonoverlap
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// strategy name (PF, CONDF, PROB, TP, PRODUCT-EST, ...) or 5/11-bit combination
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// root degree 1..10 or `n` (segment count)
    #[arg(long, global = true)]
    pub root: Option<String>,
    /// rank pronunciations by their best candidate instead of summing
    #[arg(long, global = true)]
    pub no_collate: bool,
    /// worker threads (0 = all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// output file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// perword or corpus
    #[arg(long, global = true)]
    pub phone_agg: Option<String>,
    /// fallback junction placements: all or leftmost
    #[arg(long, global = true)]
    pub fallback: Option<String>,
    /// keep-first or drop-group
    #[arg(long, global = true)]
    pub homophone_rule: Option<String>,
    /// compare pronunciations without nulls when finding homophones
    #[arg(long, global = true)]
    pub ignore_nulls: bool,
    /// refuse words with more candidates than this
    #[arg(long, global = true)]
    pub candidate_limit: Option<usize>,
    /// write 0 for wall_ms so reruns are byte-identical
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    corpus: Option<PathBuf>,
    direction: Option<String>,
    mode: Option<String>,
    strategy: Option<String>,
    root: Option<String>,
    collate: Option<bool>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    phone_agg: Option<String>,
    fallback: Option<String>,
    homophone_rule: Option<String>,
    ignore_nulls: Option<bool>,
    candidate_limit: Option<usize>,
    timing: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub direction: Direction,
    pub mode: SegmentationMode,
    pub strategy: StrategySpec,
    pub root: Root,
    pub collate: bool,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub phone_agg: PhoneAggregation,
    pub fallback: FallbackPolicy,
    pub filter: FilterOptions,
    pub candidate_limit: Option<usize>,
    pub timing: bool,
}

fn parse<T: std::str::FromStr<Err = String>>(
    what: &str,
    v: Option<String>,
    default: T,
) -> Result<T> {
    match v {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|e: String| anyhow::anyhow!("--{what}: {e}")),
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            None => FileConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
        };
        let a = args.clone();
        let direction = parse(
            "direction",
            a.direction.or(file.direction),
            Direction::TextToSpeech,
        )?;
        let explicit_mode = a.mode.is_some() || file.mode.is_some();
        let mode = parse("mode", a.mode.or(file.mode), SegmentationMode::OverlapOne)?;
        let root = parse("root", a.root.or(file.root), Root::default())?;
        let collate = !a.no_collate && file.collate.unwrap_or(true);
        let explicit_strategy = a.strategy.is_some() || file.strategy.is_some();
        let strategy_name = a
            .strategy
            .or(file.strategy)
            .unwrap_or_else(|| "CONDF".into());
        let strategy = StrategySpec::parse(&strategy_name)?;
        let strategy = if matches!(
            strategy,
            StrategySpec::Product { .. } | StrategySpec::Probabilistic { .. }
        ) {
            strategy.with_root(root).with_collate(collate)
        } else {
            if explicit_strategy && !root.is_identity() {
                log::warn!("--root has no effect on {strategy}");
            }
            strategy
        };
        if let Some(m) = strategy.required_mode() {
            if explicit_strategy && explicit_mode && m != mode {
                log::warn!("{strategy} is defined on {m} segmentations; ignoring --mode {mode}");
            }
        }
        let filter = FilterOptions {
            rule: parse(
                "homophone-rule",
                a.homophone_rule.or(file.homophone_rule),
                HomophoneRule::KeepFirst,
            )?,
            ignore_nulls: a.ignore_nulls || file.ignore_nulls.unwrap_or(false),
        };
        Ok(Self {
            corpus: a.corpus.or(file.corpus),
            direction,
            mode,
            strategy,
            root,
            collate,
            jobs: a.jobs.or(file.jobs).unwrap_or(0),
            out: a.out.or(file.out),
            phone_agg: parse(
                "phone-agg",
                a.phone_agg.or(file.phone_agg),
                PhoneAggregation::PerWord,
            )?,
            fallback: parse(
                "fallback",
                a.fallback.or(file.fallback),
                FallbackPolicy::AllPlacements,
            )?,
            filter,
            candidate_limit: a.candidate_limit.or(file.candidate_limit),
            timing: !a.no_timing && file.timing.unwrap_or(true),
        })
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        match &self.corpus {
            Some(p) if !p.as_os_str().is_empty() => Ok(p),
            _ => bail!("no corpus given; pass --corpus FILE"),
        }
    }

    /// Segmentation mode used for `spec`: probabilistic rules fix their own.
    pub fn mode_for(&self, spec: &StrategySpec) -> SegmentationMode {
        spec.required_mode().unwrap_or(self.mode)
    }

    pub fn lattice_options(&self) -> LatticeOptions {
        LatticeOptions {
            fallback: self.fallback,
            candidate_limit: self.candidate_limit,
        }
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            mode: self.mode,
            lattice: self.lattice_options(),
            jobs: self.jobs,
            phone_agg: self.phone_agg,
        }
    }

    /// Everything that can change a result, in a fixed textual form. The grid
    /// part is left to the caller.
    pub fn canonical(&self, corpus_digest: &str, grid: &str) -> String {
        format!(
            "corpus={corpus_digest};direction={};mode={};fallback={};filter={};limit={:?};phone-agg={};{grid}",
            self.direction,
            self.mode,
            self.fallback.as_str(),
            self.filter.label(),
            self.candidate_limit,
            self.phone_agg.as_str(),
        )
    }
}
