use pyo3::prelude::*;

#[pymodule]
fn moebius_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
