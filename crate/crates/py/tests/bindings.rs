use blockset_py::blockset_module;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
    pyo3::append_to_inittab!(blockset_module);
    Python::initialize();
    Python::attach(|py| {
        let m = py.import("blockset").unwrap();
        f(py, &m);
    });
}

#[test]
fn module_surface() {
    with_module(|py, m| {
        let qbin: u64 = m.getattr("qbin").unwrap().call1((4, 2, 3)).unwrap().extract().unwrap();
        assert_eq!(qbin, 130);

        let t = m.getattr("tetrahedron").unwrap().call1((3, 4)).unwrap();
        assert_eq!(t.len().unwrap(), 4 * 3 / 2 * 2 + 4);
        let verdict = t.call_method1("is_strong_blocking", (1,)).unwrap();
        let verdict = verdict.cast::<PyDict>().unwrap();
        assert!(verdict.get_item("holds").unwrap().unwrap().extract::<bool>().unwrap());

        let cert = m.getattr("solve_bprime").unwrap().call1((2,)).unwrap();
        let optimum: usize = cert.get_item("optimum").unwrap().extract().unwrap();
        assert_eq!(optimum, 4);

        let err = m.getattr("compute_cq").unwrap().call1((6,)).unwrap_err();
        assert!(err.is_instance(py, &m.getattr("BlocksetError").unwrap().cast_into().unwrap()));
    });
}
