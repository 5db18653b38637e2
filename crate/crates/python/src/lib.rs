//! Python module `ascap`: configurations, closed-form capacities, Monte Carlo
//! estimates and sweeps.

use ascap_core::asymptotics;
use ascap_core::montecarlo::{self, Power, Scheme};
use ascap_core::orderstats::{BranchSnrDist, SelectionConfig};
use ascap_core::sweep::{run_sweep, SweepSpec};
use ascap_core::{ras, tas, Error};
use pyo3::exceptions::{PyArithmeticError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain { .. } | Error::InvalidConfig(_) => PyValueError::new_err(e.to_string()),
        Error::Index { .. } => PyIndexError::new_err(e.to_string()),
        Error::Convergence { .. } | Error::Bracket(_) => PyArithmeticError::new_err(e.to_string()),
    }
}

fn scheme(name: &str) -> PyResult<Scheme> {
    match name {
        "ras" => Ok(Scheme::Ras),
        "tas" => Ok(Scheme::Tas),
        "joint" => Ok(Scheme::Joint),
        _ => Err(PyValueError::new_err(format!(
            "scheme must be ras, tas or joint, got {name:?}"
        ))),
    }
}

/// Link parameters: antennas, average branch SNR (linear), QoS exponent
/// (1/bits), bandwidth (Hz) and frame length (s).
#[pyclass(name = "SystemConfig", module = "ascap", frozen)]
#[derive(Clone)]
struct PySystemConfig {
    inner: ascap_core::SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (mt, mr, gamma0, theta, bandwidth_hz = ascap_core::config::DEFAULT_BANDWIDTH_HZ, frame_s = ascap_core::config::DEFAULT_FRAME_S))]
    fn new(mt: u32, mr: u32, gamma0: f64, theta: f64, bandwidth_hz: f64, frame_s: f64) -> PyResult<Self> {
        let inner = ascap_core::SystemConfig::with_link(mt, mr, bandwidth_hz, frame_s, gamma0, theta).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Same link with the SNR given in dB.
    #[staticmethod]
    #[pyo3(signature = (mt, mr, gamma0_db, theta, bandwidth_hz = ascap_core::config::DEFAULT_BANDWIDTH_HZ, frame_s = ascap_core::config::DEFAULT_FRAME_S))]
    fn from_db(mt: u32, mr: u32, gamma0_db: f64, theta: f64, bandwidth_hz: f64, frame_s: f64) -> PyResult<Self> {
        Self::new(
            mt,
            mr,
            ascap_core::config::db_to_linear(gamma0_db),
            theta,
            bandwidth_hz,
            frame_s,
        )
    }

    #[getter]
    fn mt(&self) -> u32 {
        self.inner.mt
    }

    #[getter]
    fn mr(&self) -> u32 {
        self.inner.mr
    }

    #[getter]
    fn gamma0(&self) -> f64 {
        self.inner.gamma0
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn bandwidth_hz(&self) -> f64 {
        self.inner.bandwidth_hz
    }

    #[getter]
    fn frame_s(&self) -> f64 {
        self.inner.frame_s
    }

    #[getter]
    fn bt(&self) -> f64 {
        self.inner.bt()
    }

    #[getter]
    fn theta_tilde(&self) -> f64 {
        self.inner.theta_tilde()
    }

    fn with_theta(&self, theta: f64) -> PyResult<Self> {
        let inner = self.inner.with_theta(theta);
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn with_gamma0(&self, gamma0: f64) -> PyResult<Self> {
        let inner = self.inner.with_gamma0(gamma0);
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Bits per frame to bits/s/Hz.
    fn normalize(&self, bits_per_frame: f64) -> f64 {
        self.inner.normalize(bits_per_frame)
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SystemConfig(mt={}, mr={}, gamma0={:?}, theta={:?}, bandwidth_hz={:?}, frame_s={:?})",
            c.mt, c.mr, c.gamma0, c.theta, c.bandwidth_hz, c.frame_s
        )
    }
}

/// Optimal power policy: zero below the cutoff, `μ(x)` above it.
#[pyclass(name = "PowerPolicy", module = "ascap", frozen)]
#[derive(Clone)]
struct PyPowerPolicy {
    inner: tas::PowerPolicy,
}

#[pymethods]
impl PyPowerPolicy {
    #[new]
    fn new(cutoff: f64, theta_tilde: f64) -> PyResult<Self> {
        Ok(Self {
            inner: tas::PowerPolicy::new(cutoff, theta_tilde).map_err(to_py)?,
        })
    }

    #[getter]
    fn cutoff(&self) -> f64 {
        self.inner.cutoff()
    }

    #[getter]
    fn ln_cutoff(&self) -> f64 {
        self.inner.ln_cutoff()
    }

    #[getter]
    fn theta_tilde(&self) -> f64 {
        self.inner.theta_tilde()
    }

    fn mu(&self, snr: f64) -> f64 {
        self.inner.mu(snr)
    }

    fn __repr__(&self) -> String {
        format!(
            "PowerPolicy(cutoff={:?}, theta_tilde={:?})",
            self.inner.cutoff(),
            self.inner.theta_tilde()
        )
    }
}

/// Monte Carlo estimate with its standard error.
#[pyclass(name = "McEstimate", module = "ascap", frozen, get_all)]
#[derive(Clone)]
struct PyMcEstimate {
    mean: f64,
    std_error: f64,
    n: u64,
    seed: u64,
}

#[pymethods]
impl PyMcEstimate {
    fn __repr__(&self) -> String {
        format!(
            "McEstimate(mean={:?}, std_error={:?}, n={}, seed={})",
            self.mean, self.std_error, self.n, self.seed
        )
    }
}

impl From<montecarlo::McEstimate> for PyMcEstimate {
    fn from(e: montecarlo::McEstimate) -> Self {
        Self {
            mean: e.mean,
            std_error: e.std_error,
            n: e.n,
            seed: e.seed,
        }
    }
}

/// Receive-selection effective capacity in bits per frame.
#[pyfunction]
fn ras_effective_capacity(cfg: &PySystemConfig) -> PyResult<f64> {
    ras::ras_effective_capacity(&cfg.inner).map_err(to_py)
}

/// Transmit-selection effective capacity with optimal power, in bits per
/// frame, and the policy that achieves it.
#[pyfunction]
fn tas_effective_capacity(cfg: &PySystemConfig) -> PyResult<(f64, PyPowerPolicy)> {
    let (ec, inner) = tas::tas_effective_capacity_with_policy(&cfg.inner).map_err(to_py)?;
    Ok((ec, PyPowerPolicy { inner }))
}

/// Transmit-selection effective capacity with constant power, in bits per frame.
#[pyfunction]
fn constant_power_effective_capacity(cfg: &PySystemConfig) -> PyResult<f64> {
    tas::constant_power_effective_capacity(&cfg.inner).map_err(to_py)
}

/// Configuration whose transmit selection equals joint selection over all pairs.
#[pyfunction]
fn joint_selection_config(cfg: &PySystemConfig) -> PySystemConfig {
    PySystemConfig {
        inner: tas::joint_selection_config(&cfg.inner),
    }
}

#[pyfunction]
fn solve_cutoff(cfg: &PySystemConfig) -> PyResult<PyPowerPolicy> {
    Ok(PyPowerPolicy {
        inner: tas::solve_cutoff(&cfg.inner).map_err(to_py)?,
    })
}

/// `E{μ}` under the optimal policy with the given cutoff.
#[pyfunction]
fn mean_mu(cfg: &PySystemConfig, cutoff: f64) -> PyResult<f64> {
    tas::mean_mu(&cfg.inner, cutoff).map_err(to_py)
}

/// Ergodic capacity with water-filling, in bits per frame.
#[pyfunction]
fn ergodic_capacity(cfg: &PySystemConfig) -> PyResult<f64> {
    asymptotics::ergodic_capacity(&cfg.inner).map_err(to_py)
}

#[pyfunction]
fn alpha_constant(cfg: &PySystemConfig) -> PyResult<f64> {
    asymptotics::alpha_constant(&cfg.inner).map_err(to_py)
}

/// Strict-QoS limit `B T log2(1 + α)` in bits per frame.
#[pyfunction]
fn ec_infinity(cfg: &PySystemConfig) -> PyResult<f64> {
    asymptotics::ec_infinity(&cfg.inner).map_err(to_py)
}

/// Density of the largest of `l` gamma(`k`, `gamma0`) variates at `x`.
#[pyfunction]
fn max_order_pdf(k: u32, l: u32, gamma0: f64, x: f64) -> PyResult<f64> {
    let sel = SelectionConfig::new(l, BranchSnrDist::new(k, gamma0).map_err(to_py)?).map_err(to_py)?;
    sel.max_order_pdf(x).map_err(to_py)
}

/// `True` when every exact identity holds.
#[pyfunction]
fn identities_hold() -> bool {
    asymptotics::identity_suite().all_hold()
}

/// Simulated effective capacity in bits per frame. `policy = None` is
/// constant power.
#[pyfunction]
#[pyo3(signature = (cfg, scheme_name, policy = None, trials = 1_000_000, seed = 0))]
fn mc_effective_capacity(
    py: Python<'_>,
    cfg: &PySystemConfig,
    scheme_name: &str,
    policy: Option<&PyPowerPolicy>,
    trials: u64,
    seed: u64,
) -> PyResult<PyMcEstimate> {
    let s = scheme(scheme_name)?;
    let c = cfg.inner;
    let p = policy.map(|p| p.inner);
    py.detach(|| montecarlo::mc_effective_capacity(&c, s, p.as_ref(), trials, seed))
        .map(Into::into)
        .map_err(to_py)
}

/// Parameter sweep; returns one dict per grid point with capacities in bits/s/Hz.
#[pyfunction]
#[pyo3(signature = (scheme_name, mt, mr, snr_db, theta, power = "optimal", mc_trials = None, seed = 0, asymptotes = false))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    scheme_name: &str,
    mt: Vec<u32>,
    mr: Vec<u32>,
    snr_db: Vec<f64>,
    theta: Vec<f64>,
    power: &str,
    mc_trials: Option<u64>,
    seed: u64,
    asymptotes: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let power = match power {
        "optimal" => vec![Power::Optimal],
        "constant" => vec![Power::Constant],
        "both" => vec![Power::Optimal, Power::Constant],
        _ => {
            return Err(PyValueError::new_err(format!(
                "power must be optimal, constant or both, got {power:?}"
            )))
        }
    };
    let spec = SweepSpec {
        scheme: scheme(scheme_name)?,
        mt,
        mr,
        gamma0_db: snr_db,
        theta,
        power,
        mc_trials,
        seed,
        asymptotes,
        ..SweepSpec::default()
    };
    spec.validate().map_err(to_py)?;
    let rows = py
        .detach(|| run_sweep(&spec))
        .map_err(|e| PyArithmeticError::new_err(format!("numeric failure at {e}")))?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("gamma0_db", r.gamma0_db)?;
            d.set_item("theta", r.theta)?;
            d.set_item("scheme", r.scheme.as_str())?;
            d.set_item("power", r.power.as_str())?;
            d.set_item("ec_norm_analytic", r.ec_norm_analytic)?;
            d.set_item("ec_norm_mc", r.ec_norm_mc)?;
            d.set_item("mc_std_error", r.mc_std_error)?;
            d.set_item("cutoff", r.cutoff)?;
            d.set_item("ergodic_norm", r.ergodic_norm)?;
            d.set_item("ec_inf_norm", r.ec_inf_norm)?;
            d.set_item("mt", r.mt)?;
            d.set_item("mr", r.mr)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn ascap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyPowerPolicy>()?;
    m.add_class::<PyMcEstimate>()?;
    m.add_function(wrap_pyfunction!(ras_effective_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(tas_effective_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(constant_power_effective_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(joint_selection_config, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(mean_mu, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_constant, m)?)?;
    m.add_function(wrap_pyfunction!(ec_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(max_order_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(identities_hold, m)?)?;
    m.add_function(wrap_pyfunction!(mc_effective_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
