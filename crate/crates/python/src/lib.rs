//! Python bindings: wordlists, ensemble reconstruction, scoring, reports and
//! the synthetic-data self-test.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fuzzyrecon::cli::run_pipeline;
use fuzzyrecon::metrics::{confused_pairs, score_predictions, AlignmentSizeMode};
use fuzzyrecon::report::{render_report, QuintileGrid};
use fuzzyrecon::synth::{self, SynthSpec, CLEAN_SPEC, NOISY_SPEC};
use fuzzyrecon::wordlist::{parse_wordlist_str, tokenize as core_tokenize};
use fuzzyrecon::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Aligned cognate sets read from a LingPy-style TSV.
#[pyclass(name = "Wordlist", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWordlist {
    inner: fuzzyrecon::Wordlist,
}

#[pymethods]
impl PyWordlist {
    #[staticmethod]
    #[pyo3(signature = (text, proto=None))]
    fn from_tsv(text: &str, proto: Option<&str>) -> PyResult<Self> {
        let (inner, _) = parse_wordlist_str(text, proto).map_err(to_py)?;
        Ok(PyWordlist { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, proto=None))]
    fn read(path: &str, proto: Option<&str>) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        Self::from_tsv(&text, proto)
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    #[getter]
    fn doculects(&self) -> Vec<String> {
        self.inner.doculects().to_vec()
    }

    #[getter]
    fn proto_doculect(&self) -> Option<String> {
        self.inner.proto_doculect().map(str::to_string)
    }

    #[getter]
    fn reflex_count(&self) -> usize {
        self.inner.reflex_count()
    }

    fn cogids(&self) -> Vec<String> {
        self.inner.sets().iter().map(|s| s.cogid.clone()).collect()
    }

    /// Gold proto-form of a set as a list of tokens, if it has one.
    fn proto_form(&self, cogid: &str) -> Option<Vec<String>> {
        let set = self.inner.get(cogid)?;
        set.proto
            .as_ref()
            .map(|f| f.tokens.iter().map(|t| t.as_str().to_string()).collect())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Wordlist(sets={}, reflexes={}, proto={:?})",
            self.inner.len(),
            self.inner.reflex_count(),
            self.inner.proto_doculect()
        )
    }
}

/// Ensemble settings: number of samples, dropout fraction, seed, epochs.
#[pyclass(name = "EnsembleConfig", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnsembleConfig {
    inner: fuzzyrecon::EnsembleConfig,
}

#[pymethods]
impl PyEnsembleConfig {
    #[new]
    #[pyo3(signature = (samples=10, dropout=0.1, seed=42, epochs=20))]
    fn new(samples: usize, dropout: f64, seed: u64, epochs: usize) -> PyResult<Self> {
        let inner = fuzzyrecon::EnsembleConfig {
            n_samples: samples,
            dropout,
            seed,
            epochs,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyEnsembleConfig { inner })
    }

    #[getter]
    fn samples(&self) -> usize {
        self.inner.n_samples
    }

    #[getter]
    fn dropout(&self) -> f64 {
        self.inner.dropout
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn epochs(&self) -> usize {
        self.inner.epochs
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "EnsembleConfig(samples={}, dropout={}, seed={}, epochs={})",
            c.n_samples, c.dropout, c.seed, c.epochs
        )
    }
}

#[pyclass(name = "FuzzyReconstruction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFuzzyReconstruction {
    inner: fuzzyrecon::FuzzyReconstruction,
}

#[pymethods]
impl PyFuzzyReconstruction {
    #[getter]
    fn cogid(&self) -> &str {
        &self.inner.cogid
    }

    #[getter]
    fn concept(&self) -> &str {
        &self.inner.concept
    }

    #[getter]
    fn certain(&self) -> bool {
        self.inner.certain
    }

    #[getter]
    fn n_samples(&self) -> usize {
        self.inner.n_samples
    }

    /// Per position, `(label, count)` options, most frequent first.
    #[getter]
    fn segments(&self) -> Vec<Vec<(String, usize)>> {
        self.inner
            .segments
            .iter()
            .map(|s| s.options.iter().map(|(l, n)| (l.to_string(), *n)).collect())
            .collect()
    }

    #[pyo3(signature = (bare=false))]
    fn render(&self, bare: bool) -> String {
        fuzzyrecon::render_fuzzy(&self.inner, bare)
    }

    fn consensus(&self) -> PyResult<Vec<String>> {
        let tokens = fuzzyrecon::consensus(&self.inner).map_err(to_py)?;
        Ok(tokens.iter().map(|t| t.as_str().to_string()).collect())
    }

    /// Five rows of labels, one cell per position.
    fn quintiles(&self) -> Vec<Vec<String>> {
        let grid = QuintileGrid::from_reconstruction(&self.inner);
        (0..fuzzyrecon::report::QUINTILE_CELLS)
            .map(|r| grid.row(r).map(|l| l.to_string()).collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "FuzzyReconstruction({:?}, {:?}, certain={})",
            self.inner.cogid,
            fuzzyrecon::render_fuzzy(&self.inner, false),
            self.inner.certain
        )
    }
}

fn unwrap_all(frs: &[PyRef<'_, PyFuzzyReconstruction>]) -> Vec<fuzzyrecon::FuzzyReconstruction> {
    frs.iter().map(|f| f.inner.clone()).collect()
}

/// Train the ensemble on sets with a gold proto-form and reconstruct every set.
#[pyfunction]
#[pyo3(signature = (wordlist, config=None))]
fn reconstruct(
    py: Python<'_>,
    wordlist: &PyWordlist,
    config: Option<&PyEnsembleConfig>,
) -> PyResult<Vec<PyFuzzyReconstruction>> {
    let cfg = config.map(|c| c.inner).unwrap_or_default();
    let wl = &wordlist.inner;
    let frs = py.detach(|| run_pipeline(wl, &cfg)).map_err(to_py)?;
    Ok(frs.into_iter().map(|inner| PyFuzzyReconstruction { inner }).collect())
}

/// Summary scores as a dict keyed by category.
#[pyfunction]
#[pyo3(signature = (reconstructions, gold, columns=false))]
fn evaluate<'py>(
    py: Python<'py>,
    reconstructions: Vec<PyRef<'py, PyFuzzyReconstruction>>,
    gold: &PyWordlist,
    columns: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = if columns {
        AlignmentSizeMode::Columns
    } else {
        AlignmentSizeMode::Rows
    };
    let scores = score_predictions(&unwrap_all(&reconstructions), &gold.inner, mode);
    let out = PyDict::new(py);
    out.set_item("total", scores.total)?;
    out.set_item("excluded", scores.excluded)?;
    for (name, cat) in scores.categories() {
        let entry = PyDict::new(py);
        entry.set_item("count", cat.count)?;
        entry.set_item("proportion", cat.proportion)?;
        entry.set_item("alignment_size", cat.mean_alignment_size)?;
        out.set_item(name, entry)?;
    }
    Ok(out)
}

/// `(a, b, freq)` triples, most frequent first.
#[pyfunction]
#[pyo3(signature = (reconstructions, top=None))]
fn confusions(
    reconstructions: Vec<PyRef<'_, PyFuzzyReconstruction>>,
    top: Option<usize>,
) -> Vec<(String, String, usize)> {
    let table = confused_pairs(&unwrap_all(&reconstructions));
    table.rows.into_iter().take(top.unwrap_or(usize::MAX)).collect()
}

#[pyfunction]
#[pyo3(signature = (wordlist, reconstructions, bare=false))]
fn report_html(
    wordlist: &PyWordlist,
    reconstructions: Vec<PyRef<'_, PyFuzzyReconstruction>>,
    bare: bool,
) -> PyResult<String> {
    render_report(&wordlist.inner, &unwrap_all(&reconstructions), bare).map_err(to_py)
}

#[pyfunction]
fn tokenize(form: &str) -> PyResult<Vec<String>> {
    let tokens = core_tokenize(form).map_err(to_py)?;
    Ok(tokens.iter().map(|t| t.as_str().to_string()).collect())
}

/// Whether a space-separated form is one of the expansions of `pattern`.
#[pyfunction]
fn matches(pattern: &str, form: &str) -> PyResult<bool> {
    let tokens = core_tokenize(form).map_err(to_py)?;
    fuzzyrecon::matches(pattern, &tokens).map_err(to_py)
}

#[pyfunction]
fn expansion_count(pattern: &str) -> PyResult<u128> {
    fuzzyrecon::expansion_count(pattern).map_err(to_py)
}

/// `(cogid, doculect, position, original, replacement)`
type CorruptionRow = (String, String, usize, String, String);

/// Generate a wordlist from spec-file text. Returns the wordlist and the
/// corrupted reflexes as `(cogid, doculect, position, original, replacement)`.
#[pyfunction]
fn synthesize(spec: &str) -> PyResult<(PyWordlist, Vec<CorruptionRow>)> {
    let spec = SynthSpec::parse(spec).map_err(to_py)?;
    let out = synth::generate(&spec).map_err(to_py)?;
    let corruptions = out
        .corruptions
        .into_iter()
        .map(|c| {
            (
                c.cogid,
                c.doculect,
                c.position,
                c.original.as_str().to_string(),
                c.replacement.as_str().to_string(),
            )
        })
        .collect();
    Ok((PyWordlist { inner: out.wordlist }, corruptions))
}

/// Run the synthetic oracle. Without a spec, the built-in clean and noisy
/// scenarios run. Returns `(name, passed, report)` per scenario.
#[pyfunction]
#[pyo3(signature = (spec=None, config=None))]
fn selftest(
    py: Python<'_>,
    spec: Option<&str>,
    config: Option<&PyEnsembleConfig>,
) -> PyResult<Vec<(String, bool, String)>> {
    let cfg = config.map(|c| c.inner).unwrap_or_default();
    let scenarios: Vec<(&str, &str)> = match spec {
        Some(text) => vec![("custom", text)],
        None => vec![("clean", CLEAN_SPEC), ("noisy", NOISY_SPEC)],
    };
    let mut results = Vec::new();
    for (name, text) in scenarios {
        let spec = SynthSpec::parse(text).map_err(to_py)?;
        let report = py
            .detach(|| fuzzyrecon::cli::selftest_spec(&spec, &cfg, None))
            .map_err(to_py)?;
        results.push((name.to_string(), report.passed(), report.to_string()));
    }
    Ok(results)
}

#[pymodule]
#[pyo3(name = "fuzzyrecon")]
fn fuzzyrecon_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWordlist>()?;
    m.add_class::<PyEnsembleConfig>()?;
    m.add_class::<PyFuzzyReconstruction>()?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(confusions, m)?)?;
    m.add_function(wrap_pyfunction!(report_html, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(matches, m)?)?;
    m.add_function(wrap_pyfunction!(expansion_count, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
