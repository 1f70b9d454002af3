//! Python bindings: `import pba`.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pba_core::corpus::{filter_corpus, parse_nettalk_str, render, BOUNDARY};
use pba_core::evaluation::{self, bounds, evaluate_with_index};
use pba_core::strategies::rank_pronunciations;
use pba_core::{
    Direction, EvalOptions, EvaluationReport, FilterOptions, HomophoneRule, LatticeOptions,
    Lexicon, PhoneAggregation, Root, SegmentationMode, Selector, StrategySpec, SubstringIndex,
    WordLattice,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_arg<T: std::str::FromStr<Err = String>>(what: &str, v: &str) -> PyResult<T> {
    v.parse()
        .map_err(|e: String| PyValueError::new_err(format!("{what}: {e}")))
}

/// A filtered lexicon with its substring index.
#[pyclass(module = "pba", frozen)]
struct Engine {
    lexicon: Lexicon,
    index: SubstringIndex,
}

struct Query {
    spec: StrategySpec,
    mode: SegmentationMode,
}

fn query(strategy: &str, root: &str, collate: bool, mode: Option<&str>) -> PyResult<Query> {
    let spec = StrategySpec::parse(strategy).map_err(value_err)?;
    let spec = match spec {
        StrategySpec::Product { .. } | StrategySpec::Probabilistic { .. } => spec
            .with_root(parse_arg::<Root>("root", root)?)
            .with_collate(collate),
        other => other,
    };
    let mode = match mode {
        Some(m) => parse_arg("mode", m)?,
        None => SegmentationMode::default(),
    };
    let mode = spec.required_mode().unwrap_or(mode);
    Ok(Query { spec, mode })
}

fn report_dict<'py>(py: Python<'py>, r: &EvaluationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("strategy", &r.strategy)?;
    d.set_item("direction", r.direction.as_str())?;
    d.set_item("mode", r.mode.to_string())?;
    d.set_item("root", &r.root)?;
    d.set_item("word_accuracy", r.word_accuracy)?;
    d.set_item("phoneme_accuracy", r.phoneme_accuracy)?;
    d.set_item("silenced", r.silenced)?;
    d.set_item("words", r.words.len())?;
    Ok(d)
}

#[pymethods]
impl Engine {
    /// Builds an engine from NETtalk-format text.
    #[new]
    #[pyo3(signature = (text, direction = "tts", homophone_rule = "keep-first", ignore_nulls = false))]
    fn new(
        text: &str,
        direction: &str,
        homophone_rule: &str,
        ignore_nulls: bool,
    ) -> PyResult<Self> {
        let direction: Direction = parse_arg("direction", direction)?;
        let filter = FilterOptions {
            rule: parse_arg::<HomophoneRule>("homophone_rule", homophone_rule)?,
            ignore_nulls,
        };
        let parsed = parse_nettalk_str(text).map_err(value_err)?;
        let lexicon = filter_corpus(&parsed.entries, direction, &filter);
        if lexicon.is_empty() {
            return Err(PyValueError::new_err("corpus has no usable entries"));
        }
        let index = SubstringIndex::build(lexicon.entries());
        Ok(Self { lexicon, index })
    }

    /// Reads a NETtalk-format file.
    #[staticmethod]
    #[pyo3(signature = (path, direction = "tts", homophone_rule = "keep-first", ignore_nulls = false))]
    fn from_file(
        path: &str,
        direction: &str,
        homophone_rule: &str,
        ignore_nulls: bool,
    ) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        Self::new(&text, direction, homophone_rule, ignore_nulls)
    }

    fn __len__(&self) -> usize {
        self.lexicon.len()
    }

    /// Ranked `(pronunciation, score)` pairs, best first. Raises ValueError
    /// when the word cannot be pronounced.
    #[pyo3(signature = (word, strategy = "CONDF", root = "1", collate = true, mode = None, top = 5, leave_one_out = false))]
    #[allow(clippy::too_many_arguments)]
    fn pronounce(
        &self,
        word: &str,
        strategy: &str,
        root: &str,
        collate: bool,
        mode: Option<&str>,
        top: usize,
        leave_one_out: bool,
    ) -> PyResult<Vec<(String, f64)>> {
        let q = query(strategy, root, collate, mode)?;
        let raw = match self.lexicon.direction() {
            Direction::TextToSpeech => word.to_ascii_lowercase(),
            Direction::SpeechToText => word.to_string(),
        };
        let alphabet = self.lexicon.alphabet();
        if raw.is_empty() || raw.bytes().any(|b| !alphabet.contains(&b)) {
            return Err(PyValueError::new_err(format!(
                "`{word}` uses symbols not in the corpus"
            )));
        }
        let mut padded = vec![BOUNDARY];
        padded.extend(raw.bytes());
        padded.push(BOUNDARY);
        let opts = LatticeOptions::default();
        let held_out = leave_one_out
            .then(|| {
                self.lexicon
                    .entries()
                    .iter()
                    .find(|e| e.letters() == &padded[..])
            })
            .flatten();
        let lattice = match held_out {
            Some(e) => WordLattice::build(&padded, &self.index.leave_one_out(e), q.mode, &opts),
            None => WordLattice::build(&padded, &self.index, q.mode, &opts),
        }
        .map_err(value_err)?;
        let ranking = rank_pronunciations(&lattice, &q.spec).map_err(value_err)?;
        Ok(ranking
            .entries
            .into_iter()
            .take(top)
            .map(|(p, s)| (render(&p[1..p.len() - 1]), s))
            .collect())
    }

    /// Leave-one-out evaluation; returns a dict of accuracies.
    #[pyo3(signature = (strategy = "CONDF", root = "1", collate = true, mode = None, phone_agg = "perword", jobs = 0))]
    #[allow(clippy::too_many_arguments)]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        strategy: &str,
        root: &str,
        collate: bool,
        mode: Option<&str>,
        phone_agg: &str,
        jobs: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let q = query(strategy, root, collate, mode)?;
        let opts = EvalOptions {
            mode: q.mode,
            phone_agg: parse_arg::<PhoneAggregation>("phone_agg", phone_agg)?,
            jobs,
            ..EvalOptions::default()
        };
        let sel = Selector::Strategy(q.spec);
        let report = py.detach(|| evaluate_with_index(&self.lexicon, &self.index, &sel, &opts));
        report_dict(py, &report)
    }

    /// `(lower, upper)` accuracy bounds as dicts.
    #[pyo3(signature = (mode = None, phone_agg = "perword", jobs = 0))]
    fn bounds<'py>(
        &self,
        py: Python<'py>,
        mode: Option<&str>,
        phone_agg: &str,
        jobs: usize,
    ) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyDict>)> {
        let opts = EvalOptions {
            mode: match mode {
                Some(m) => parse_arg("mode", m)?,
                None => SegmentationMode::default(),
            },
            phone_agg: parse_arg::<PhoneAggregation>("phone_agg", phone_agg)?,
            jobs,
            ..EvalOptions::default()
        };
        let (lo, hi) = py.detach(|| bounds(&self.lexicon, &self.index, &opts));
        Ok((report_dict(py, &lo)?, report_dict(py, &hi)?))
    }
}

/// Edit distance between two symbol strings.
#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    evaluation::levenshtein(a.as_bytes(), b.as_bytes())
}

/// `(word, pronunciation)` pairs of NETtalk-format text; malformed lines are skipped.
#[pyfunction]
fn parse_nettalk(text: &str) -> PyResult<Vec<(String, String)>> {
    let parsed = parse_nettalk_str(text).map_err(value_err)?;
    Ok(parsed
        .entries
        .iter()
        .map(|e| (e.word(), e.pronunciation()))
        .collect())
}

#[pymodule]
fn pba(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(parse_nettalk, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
