//! Python bindings: config-driven generation and certification.

use pyo3::prelude::*;

#[pymodule]
mod quasimin_py {
    use std::path::PathBuf;

    use pyo3::create_exception;
    use pyo3::exceptions::{PyException, PyValueError};
    use pyo3::prelude::*;

    use quasimin::cli::{certify_config, cmd_generate, list_families as families};
    use quasimin::config::RunConfig;
    use quasimin::immersion::{fundamental_data, null_space_of};
    use quasimin::verify::Grid2D;
    use quasimin::Error;

    create_exception!(
        quasimin_py,
        InadmissibleError,
        PyException,
        "A family condition fails on the domain."
    );

    #[pymodule_init]
    fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
        m.add("InadmissibleError", m.py().get_type::<InadmissibleError>())
    }

    fn to_py(e: Error) -> PyErr {
        if e.condition().is_some() {
            InadmissibleError::new_err(e.to_string())
        } else {
            PyValueError::new_err(e.to_string())
        }
    }

    fn parse(config: &str) -> PyResult<RunConfig> {
        RunConfig::from_json(config).map_err(to_py)
    }

    /// Family tags with their admissibility conditions, one per line.
    #[pyfunction]
    fn list_families() -> String {
        families()
    }

    /// Writes the CSV and JSON sidecar for a JSON config string; returns the CSV path.
    #[pyfunction]
    fn generate(config: &str, out: PathBuf) -> PyResult<PathBuf> {
        cmd_generate(&parse(config)?, Some(out)).map_err(to_py)
    }

    /// Certification report as a JSON string.
    #[pyfunction]
    #[pyo3(signature = (config, grid=None, convergence=false))]
    fn certify(config: &str, grid: Option<(usize, usize)>, convergence: bool) -> PyResult<String> {
        let mut cfg = parse(config)?;
        if let Some((ns, nt)) = grid {
            cfg = cfg.with_grid(Grid2D { ns, nt }).map_err(to_py)?;
        }
        let (_, report) = certify_config(&cfg, convergence).map_err(to_py)?;
        serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Ambient coordinates of H at `(s, t)`.
    #[pyfunction]
    fn mean_curvature(config: &str, s: f64, t: f64) -> PyResult<Vec<f64>> {
        let surface = parse(config)?.build().map_err(to_py)?;
        let d = fundamental_data(&surface.immersion, s, t).map_err(to_py)?;
        Ok(d.mean_curvature.coords().to_vec())
    }

    /// Dimension of the relative null space at `(s, t)`.
    #[pyfunction]
    fn relative_nullity(config: &str, s: f64, t: f64) -> PyResult<usize> {
        let surface = parse(config)?.build().map_err(to_py)?;
        let d = fundamental_data(&surface.immersion, s, t).map_err(to_py)?;
        Ok(null_space_of(&d).map_err(to_py)?.dimension)
    }
}
