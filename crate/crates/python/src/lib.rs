//! Python bindings for `fivenum`.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use fivenum::convert::{self, ConvertMethod, Scenario};
use fivenum::estimators::{self as est, Method};
use fivenum::normal::{self, Probability};
use fivenum::order_stats::{self as os, MomentMethod, SampleSizeQ};
use fivenum::power_law::{self, PowerLawOptions};
use fivenum::simulation::{
    self as sim, DistributionSpec, SdDivisor, SimulationConfig, SummaryConvention,
};

fn py_err(e: fivenum::Error) -> PyErr {
    match e {
        fivenum::Error::Domain(_) | fivenum::Error::InvalidInput(_) => {
            PyValueError::new_err(e.to_string())
        }
        fivenum::Error::NumericFailure(_) => PyArithmeticError::new_err(e.to_string()),
        fivenum::Error::Io(_) => PyOSError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for fivenum::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn parse<T: std::str::FromStr<Err = fivenum::Error>>(s: &str) -> PyResult<T> {
    s.parse().py()
}

#[pyclass(name = "Estimate", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEstimate(est::Estimate);

#[pymethods]
impl PyEstimate {
    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.label()
    }

    #[getter]
    fn weight_used(&self) -> Option<f64> {
        self.0.weight_used
    }

    /// `(range_based, iqr_based)` for the weighted SD estimators.
    #[getter]
    fn components(&self) -> Option<(f64, f64)> {
        self.0.components
    }

    fn __float__(&self) -> f64 {
        self.0.value
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(value={}, method='{}')",
            self.0.value,
            self.0.method.label()
        )
    }
}

impl From<est::Estimate> for PyEstimate {
    fn from(e: est::Estimate) -> Self {
        PyEstimate(e)
    }
}

#[pyclass(name = "FiveNumberSummary", frozen, from_py_object)]
#[derive(Clone)]
struct PySummary(est::FiveNumberSummary);

#[pymethods]
impl PySummary {
    #[new]
    fn new(a: f64, q1: f64, m: f64, q3: f64, b: f64, n: u64) -> PyResult<Self> {
        Ok(PySummary(
            est::FiveNumberSummary::new(a, q1, m, q3, b, n).py()?,
        ))
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }
    #[getter]
    fn q1(&self) -> f64 {
        self.0.q1
    }
    #[getter]
    fn m(&self) -> f64 {
        self.0.m
    }
    #[getter]
    fn q3(&self) -> f64 {
        self.0.q3
    }
    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    /// SD by estimator label, e.g. `"shi_sd"` or `"wan_sd_s3"`.
    fn sd(&self, method: &str) -> PyResult<PyEstimate> {
        Ok(est::sd_from_summary(parse::<Method>(method)?, &self.0)
            .py()?
            .into())
    }

    fn sd_shi(&self) -> PyResult<PyEstimate> {
        Ok(est::sd_shi(&self.0).py()?.into())
    }

    fn sd_wan_s3(&self) -> PyResult<PyEstimate> {
        Ok(est::sd_wan_s3(&self.0).py()?.into())
    }

    fn sd_bland(&self) -> PyResult<PyEstimate> {
        Ok(est::sd_bland(&self.0).py()?.into())
    }

    fn sd_weighted(&self, w: f64) -> PyResult<PyEstimate> {
        Ok(est::sd_weighted(&self.0, w).py()?.into())
    }

    fn mean_luo(&self) -> PyResult<PyEstimate> {
        Ok(est::mean_luo(&self.0).py()?.into())
    }

    fn mean_bland(&self) -> PyResult<PyEstimate> {
        Ok(est::mean_bland(&self.0).py()?.into())
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "FiveNumberSummary(a={}, q1={}, m={}, q3={}, b={}, n={})",
            s.a, s.q1, s.m, s.q3, s.b, s.n
        )
    }
}

#[pyclass(name = "NormalizationConstants", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyConstants {
    n: u64,
    xi: f64,
    eta: f64,
    theta1: f64,
    theta2: f64,
}

#[pyclass(name = "OrderStatMoments", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyMoments {
    n: u64,
    e_min: f64,
    e_q1: f64,
    e_q3: f64,
    e_max: f64,
    var_range: f64,
    var_iqr: f64,
    cov_range_iqr: f64,
}

impl From<os::OrderStatMoments> for PyMoments {
    fn from(m: os::OrderStatMoments) -> Self {
        PyMoments {
            n: m.n,
            e_min: m.e_min,
            e_q1: m.e_q1,
            e_q3: m.e_q3,
            e_max: m.e_max,
            var_range: m.var_range,
            var_iqr: m.var_iqr,
            cov_range_iqr: m.cov_range_iqr,
        }
    }
}

#[pyclass(name = "RmseRecord", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyRmseRecord {
    n: u64,
    rmse_existing: f64,
    rmse_new: f64,
    mc_standard_error: f64,
}

#[pyclass(name = "PowerLawFit", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyPowerLawFit {
    c0: f64,
    c1: f64,
    c2: f64,
    residual: f64,
    log_linear: (f64, f64),
}

#[pyfunction]
fn std_normal_pdf(x: f64) -> PyResult<f64> {
    normal::std_normal_pdf(x).py()
}

#[pyfunction]
fn std_normal_cdf(x: f64) -> PyResult<f64> {
    normal::std_normal_cdf(x).py()
}

#[pyfunction]
fn std_normal_quantile(p: f64) -> PyResult<f64> {
    normal::std_normal_quantile(Probability::new(p).py()?).py()
}

#[pyfunction]
fn normalization_constants(n: u64) -> PyResult<PyConstants> {
    let c = est::normalization_constants(n).py()?;
    Ok(PyConstants {
        n: c.n,
        xi: c.xi,
        eta: c.eta,
        theta1: c.theta1,
        theta2: c.theta2,
    })
}

#[pyfunction]
fn sd_wan_s1(a: f64, m: f64, b: f64, n: u64) -> PyResult<PyEstimate> {
    Ok(est::sd_wan_s1(&est::RangeSummary::new(a, m, b, n).py()?)
        .py()?
        .into())
}

#[pyfunction]
fn sd_hozo_s1(a: f64, m: f64, b: f64, n: u64) -> PyResult<PyEstimate> {
    Ok(est::sd_hozo_s1(&est::RangeSummary::new(a, m, b, n).py()?)
        .py()?
        .into())
}

#[pyfunction]
fn sd_wan_s2(q1: f64, m: f64, q3: f64, n: u64) -> PyResult<PyEstimate> {
    Ok(
        est::sd_wan_s2(&est::QuartileSummary::new(q1, m, q3, n).py()?)
            .py()?
            .into(),
    )
}

#[pyfunction]
fn sd_shi_from_widths(range: f64, iqr: f64, n: u64) -> PyResult<PyEstimate> {
    Ok(est::sd_shi_from_widths(range, iqr, n).py()?.into())
}

#[pyfunction]
fn sd_wan_s3_from_widths(range: f64, iqr: f64, n: u64) -> PyResult<PyEstimate> {
    Ok(est::sd_wan_s3_from_widths(range, iqr, n).py()?.into())
}

#[pyfunction]
fn approx_optimal_weight(n: u64) -> PyResult<f64> {
    est::approx_optimal_weight(n).py()
}

/// `[(q, n, theta1, theta2), ...]` for Q = 1..=q_max.
#[pyfunction]
fn coefficient_table(q_max: u64) -> PyResult<Vec<(u64, u64, f64, f64)>> {
    Ok(est::coefficient_table(q_max)
        .py()?
        .into_iter()
        .map(|r| (r.q, r.n, r.theta1, r.theta2))
        .collect())
}

fn moment_method(method: &str, tol: f64, reps: u64, seed: u64) -> PyResult<MomentMethod> {
    match method {
        "quadrature" => Ok(MomentMethod::Quadrature { abs_tol: tol }),
        "monte_carlo" => Ok(MomentMethod::MonteCarlo { reps, seed }),
        other => Err(PyValueError::new_err(format!(
            "unknown moment method {other:?}; expected quadrature or monte_carlo"
        ))),
    }
}

#[pyfunction]
#[pyo3(signature = (n, method = "quadrature", tol = 1e-10, reps = 100_000, seed = 1))]
fn order_stat_moments(
    py: Python<'_>,
    n: u64,
    method: &str,
    tol: f64,
    reps: u64,
    seed: u64,
) -> PyResult<PyMoments> {
    let method = moment_method(method, tol, reps, seed)?;
    let size = SampleSizeQ::from_n(n).py()?;
    Ok(py
        .detach(|| os::order_stat_moments(size, &method))
        .py()?
        .into())
}

fn exact_parts(
    py: Python<'_>,
    n: u64,
    tol: f64,
) -> PyResult<(os::OrderStatMoments, est::NormalizationConstants)> {
    let size = SampleSizeQ::from_n(n).py()?;
    let m = py.detach(|| os::quadrature_moments(size, tol)).py()?;
    Ok((m, est::normalization_constants(n).py()?))
}

#[pyfunction]
#[pyo3(signature = (n, tol = 1e-10))]
fn optimal_weight_exact(py: Python<'_>, n: u64, tol: f64) -> PyResult<f64> {
    let (m, c) = exact_parts(py, n, tol)?;
    os::optimal_weight_exact(&m, &c).py()
}

#[pyfunction]
#[pyo3(signature = (n, tol = 1e-10))]
fn j_exact(py: Python<'_>, n: u64, tol: f64) -> PyResult<f64> {
    let (m, c) = exact_parts(py, n, tol)?;
    os::j_of_n(&m, &c).py()
}

#[pyfunction]
#[pyo3(signature = (w, n, sigma = 1.0, tol = 1e-10))]
fn mse_of_weight(py: Python<'_>, w: f64, n: u64, sigma: f64, tol: f64) -> PyResult<f64> {
    let (m, c) = exact_parts(py, n, tol)?;
    est::mse_of_weight(w, &m, &c, sigma).py()
}

/// Converts CSV text; returns `(rows_csv, errors_csv)`.
#[pyfunction]
#[pyo3(signature = (text, method = "auto", scenario = None))]
fn convert_csv(text: &str, method: &str, scenario: Option<&str>) -> PyResult<(String, String)> {
    let method = parse::<ConvertMethod>(method)?;
    let scenario = scenario.map(parse::<Scenario>).transpose()?;
    let outcome = convert::convert_csv(text.as_bytes(), method, scenario).py()?;
    Ok((
        convert::render_rows(&outcome.rows),
        convert::render_errors(&outcome.errors),
    ))
}

#[pyfunction]
#[pyo3(signature = (
    dist = "normal:50,17",
    grid = None,
    reps = None,
    seed = 1,
    pair = ("wan_sd_s3".to_owned(), "shi_sd".to_owned()),
    divisor = "n-1",
    convention = None,
))]
#[allow(clippy::too_many_arguments)]
fn simulate_rmse(
    py: Python<'_>,
    dist: &str,
    grid: Option<Vec<u64>>,
    reps: Option<u64>,
    seed: u64,
    pair: (String, String),
    divisor: &str,
    convention: Option<&str>,
) -> PyResult<Vec<PyRmseRecord>> {
    let base = SimulationConfig::new(parse::<DistributionSpec>(dist)?, seed);
    let config = SimulationConfig {
        n_grid: grid.unwrap_or_else(|| sim::DEFAULT_GRID.to_vec()),
        reps: reps.unwrap_or(base.reps),
        estimator_pair: (parse(&pair.0)?, parse(&pair.1)?),
        sd_divisor: parse::<SdDivisor>(divisor)?,
        convention: convention.map(parse::<SummaryConvention>).transpose()?,
        ..base
    };
    let report = py.detach(|| sim::run_rmse(&config)).py()?;
    Ok(report
        .records
        .into_iter()
        .map(|r| PyRmseRecord {
            n: r.n,
            rmse_existing: r.rmse_existing,
            rmse_new: r.rmse_new,
            mc_standard_error: r.mc_standard_error,
        })
        .collect())
}

/// `(range_based, iqr_based)` estimate lists from standard-normal samples.
#[pyfunction]
#[pyo3(signature = (n, reps = 10_000, seed = 1))]
fn histogram_scenario(
    py: Python<'_>,
    n: u64,
    reps: u64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let h = py.detach(|| sim::histogram_scenario(n, reps, seed)).py()?;
    Ok((h.range_based, h.iqr_based))
}

/// Fits `y ≈ c0 + c1 x^c2` to `(x, y)` points.
#[pyfunction]
#[pyo3(signature = (points, fit_intercept = false))]
fn fit_power_law(points: Vec<(f64, f64)>, fit_intercept: bool) -> PyResult<PyPowerLawFit> {
    let f = power_law::fit_power_law_with(&points, PowerLawOptions { fit_intercept }).py()?;
    Ok(PyPowerLawFit {
        c0: f.c0,
        c1: f.c1,
        c2: f.c2,
        residual: f.residual,
        log_linear: f.log_linear,
    })
}

#[pymodule]
#[pyo3(name = "fivenum")]
fn fivenum_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySummary>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyConstants>()?;
    m.add_class::<PyMoments>()?;
    m.add_class::<PyRmseRecord>()?;
    m.add_class::<PyPowerLawFit>()?;
    m.add_function(wrap_pyfunction!(std_normal_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(std_normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(std_normal_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(normalization_constants, m)?)?;
    m.add_function(wrap_pyfunction!(sd_wan_s1, m)?)?;
    m.add_function(wrap_pyfunction!(sd_hozo_s1, m)?)?;
    m.add_function(wrap_pyfunction!(sd_wan_s2, m)?)?;
    m.add_function(wrap_pyfunction!(sd_shi_from_widths, m)?)?;
    m.add_function(wrap_pyfunction!(sd_wan_s3_from_widths, m)?)?;
    m.add_function(wrap_pyfunction!(approx_optimal_weight, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient_table, m)?)?;
    m.add_function(wrap_pyfunction!(order_stat_moments, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_weight_exact, m)?)?;
    m.add_function(wrap_pyfunction!(j_exact, m)?)?;
    m.add_function(wrap_pyfunction!(mse_of_weight, m)?)?;
    m.add_function(wrap_pyfunction!(convert_csv, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_rmse, m)?)?;
    m.add_function(wrap_pyfunction!(histogram_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    Ok(())
}

/// Registers the module as a builtin so an embedded interpreter can import it.
pub fn register_builtin() {
    pyo3::append_to_inittab!(fivenum_module);
}
