//! Python bindings: normal-form statistics and gaps, bound envelopes,
//! stochastic-game models and the λ-sweep runners.
//!
//! Matrices are lists of rows, distributions lists of floats; report-like
//! results come back as plain dicts.

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;

use beliefsafe_core::{self as core, bounds, casestudies, harness, nfg, optimizer, sbg};

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::UnknownType(m) => PyKeyError::new_err(m),
        core::Error::NoConvergence { .. }
        | core::Error::Contraction { .. }
        | core::Error::Lp(_)
        | core::Error::Envelope(_)
        | core::Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Any serializable value as nested Python dicts/lists/floats.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any().unbind(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any().unbind(),
            _ => py.None(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<nfg::PayoffMatrix> {
    nfg::PayoffMatrix::new(rows).map_err(err)
}

/// `None` means the full simplex over the matrix columns.
fn hypotheses(theta: Option<Vec<Vec<f64>>>, cols: usize) -> PyResult<nfg::HypothesisSet> {
    match theta {
        Some(members) => nfg::HypothesisSet::from_vectors(members).map_err(err),
        None => Ok(nfg::HypothesisSet::full_simplex(cols)),
    }
}

/// η, κ (None when undefined), μ and ν of `theta` for the row player of `a`.
#[pyfunction]
#[pyo3(signature = (a, theta=None))]
fn theta_stats(py: Python<'_>, a: Vec<Vec<f64>>, theta: Option<Vec<Vec<f64>>>) -> PyResult<Py<PyAny>> {
    let a = matrix(a)?;
    let theta = hypotheses(theta, a.cols())?;
    to_py(py, &nfg::theta_stats(&theta, &a).map_err(err)?)
}

/// Safe strategy and its guaranteed payoff against `theta`.
#[pyfunction]
#[pyo3(signature = (a, theta=None))]
fn maximin(a: Vec<Vec<f64>>, theta: Option<Vec<Vec<f64>>>) -> PyResult<(Vec<f64>, f64)> {
    let a = matrix(a)?;
    let theta = hypotheses(theta, a.cols())?;
    let r = optimizer::maximin_strategy(&a, &theta).map_err(err)?;
    Ok((r.strategy.probs().to_vec(), r.value))
}

/// The λ-policy's action distribution for a belief (weights over `theta`).
#[pyfunction]
#[pyo3(signature = (a, theta, belief, lam))]
fn lambda_policy(a: Vec<Vec<f64>>, theta: Vec<Vec<f64>>, belief: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
    use nfg::StrategyMap;
    let a = matrix(a)?;
    let theta = hypotheses(Some(theta), a.cols())?;
    let rho = nfg::Belief::new(belief, &theta).map_err(err)?;
    let pi = nfg::lambda_policy(&a, &theta, lam).map_err(err)?;
    Ok(pi.strategy(&rho).probs().to_vec())
}

/// Exact opportunity, risk and the gap curve of the λ-policy.
#[pyfunction]
#[pyo3(signature = (a, theta, lam, eps_grid=Vec::new()))]
fn opportunity_risk(
    py: Python<'_>,
    a: Vec<Vec<f64>>,
    theta: Vec<Vec<f64>>,
    lam: f64,
    eps_grid: Vec<f64>,
) -> PyResult<Py<PyAny>> {
    let a = matrix(a)?;
    let theta = hypotheses(Some(theta), a.cols())?;
    let pi = nfg::lambda_policy(&a, &theta, lam).map_err(err)?;
    let r = nfg::opportunity_risk_nfg(&a, &theta, &pi, &eps_grid, nfg::BeliefSearch::default()).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (mu, nu, eta, kappa, lam))]
fn nfg_envelope(py: Python<'_>, mu: f64, nu: f64, eta: f64, kappa: Option<f64>, lam: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::nfg_envelope(mu, nu, eta, kappa, lam).map_err(err)?)
}

#[pyfunction]
fn adversarial_matrix(mu: f64, nu: f64, theta: Vec<Vec<f64>>, a: usize, b: usize) -> PyResult<Vec<Vec<f64>>> {
    let theta = hypotheses(Some(theta), b)?;
    Ok(bounds::adversarial_matrix(mu, nu, &theta, a, b).map_err(err)?.to_rows())
}

#[pyfunction]
fn sbg_constants(py: Python<'_>, gamma: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::sbg_constants(gamma).map_err(err)?)
}

#[pyfunction]
fn sbg_envelopes(py: Python<'_>, gamma: f64, r_max: f64, nu: f64, lam: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &bounds::sbg_envelopes(gamma, r_max, nu, lam).map_err(err)?)
}

/// Number of strictly ordinal 2×2 game classes.
#[pyfunction]
fn ordinal_class_count() -> usize {
    casestudies::enumerate_ordinal_2x2().len()
}

/// λ-sweep rows for `mp`, `amp` or a game file.
#[pyfunction]
#[pyo3(signature = (game, lambda_grid, runs=100, horizon=100, seed=0, theta=None))]
fn tradeoff_nfg(
    py: Python<'_>,
    game: &str,
    lambda_grid: Vec<f64>,
    runs: usize,
    horizon: usize,
    seed: u64,
    theta: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let (a, theta) = harness::resolve_nfg(game, theta).map_err(err)?;
    let cfg = harness::NfgTradeoffConfig { lambda_grid, runs, horizon, seed };
    let rows = py.detach(|| harness::run_tradeoff_nfg(&a, &theta, &cfg)).map_err(err)?;
    to_py(py, &rows)
}

fn policy_kind(name: &str) -> PyResult<sbg::PolicyKind> {
    name.parse().map_err(err)
}

/// A stochastic Bayesian game with a named set of stationary opponent types.
#[pyclass(name = "StochasticGame", frozen)]
struct PyStochasticGame {
    model: sbg::SbgModel,
}

#[pymethods]
impl PyStochasticGame {
    /// `reward[s][a][b]`, `transition[s][a][b][s']`, and `kernel` mapping
    /// type names to per-state opponent distributions.
    #[new]
    #[pyo3(signature = (reward, transition, gamma, kernel, r_max=None))]
    fn new(
        reward: Vec<Vec<Vec<f64>>>,
        transition: Vec<Vec<Vec<Vec<f64>>>>,
        gamma: f64,
        kernel: Vec<(String, Vec<Vec<f64>>)>,
        r_max: Option<f64>,
    ) -> PyResult<Self> {
        let game = sbg::StochasticGame::new(reward, transition, gamma, r_max).map_err(err)?;
        let (names, dists) = kernel.into_iter().unzip();
        let kernel = sbg::StrategyKernel::new(names, dists, &game).map_err(err)?;
        Ok(Self { model: sbg::SbgModel::with_all_types(game, kernel).map_err(err)? })
    }

    /// Single-state game on a payoff matrix; types are the given columns.
    #[staticmethod]
    fn stateless(a: Vec<Vec<f64>>, gamma: f64, types: Vec<(String, Vec<f64>)>) -> PyResult<Self> {
        let game = sbg::StochasticGame::stateless(&matrix(a)?, gamma).map_err(err)?;
        let (names, dists): (Vec<String>, Vec<Vec<Vec<f64>>>) =
            types.into_iter().map(|(n, y)| (n, vec![y])).unzip();
        let kernel = sbg::StrategyKernel::new(names, dists, &game).map_err(err)?;
        Ok(Self { model: sbg::SbgModel::with_all_types(game, kernel).map_err(err)? })
    }

    #[getter]
    fn types(&self) -> Vec<String> {
        self.model.kernel().names().to_vec()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.model.game().gamma()
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.model.game().r_max()
    }

    /// Minimax values, safe strategies and worst-case types per state.
    fn game_value(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, self.model.game_value())
    }

    /// Optimal values against a type.
    fn optimal_values(&self, belief: &str) -> PyResult<Vec<f64>> {
        let t = self.model.kernel().index_of(belief).map_err(err)?;
        Ok(self.model.optimal(t).map_err(err)?.0.values().to_vec())
    }

    /// Per-state action distributions of the chosen policy.
    #[pyo3(signature = (belief, lam, kind="safe-exploit"))]
    fn policy(&self, belief: &str, lam: f64, kind: &str) -> PyResult<Vec<Vec<f64>>> {
        use sbg::PolicyBuilder;
        let t = self.model.kernel().index_of(belief).map_err(err)?;
        Ok(policy_kind(kind)?.build(&self.model, t, lam).map_err(err)?.rows().to_vec())
    }

    /// β, δ and every pairwise gap of the chosen policy.
    #[pyo3(signature = (lam, kind="safe-exploit"))]
    fn opportunity_risk(&self, py: Python<'_>, lam: f64, kind: &str) -> PyResult<Py<PyAny>> {
        let kind = policy_kind(kind)?;
        let r = py.detach(|| sbg::opportunity_risk_sbg(&self.model, &kind, lam)).map_err(err)?;
        to_py(py, &r)
    }
}

#[pymodule]
#[pyo3(name = "beliefsafe")]
fn beliefsafe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(theta_stats, m)?)?;
    m.add_function(wrap_pyfunction!(maximin, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_policy, m)?)?;
    m.add_function(wrap_pyfunction!(opportunity_risk, m)?)?;
    m.add_function(wrap_pyfunction!(nfg_envelope, m)?)?;
    m.add_function(wrap_pyfunction!(adversarial_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(sbg_constants, m)?)?;
    m.add_function(wrap_pyfunction!(sbg_envelopes, m)?)?;
    m.add_function(wrap_pyfunction!(ordinal_class_count, m)?)?;
    m.add_function(wrap_pyfunction!(tradeoff_nfg, m)?)?;
    m.add_class::<PyStochasticGame>()?;
    Ok(())
}
