use pyo3::ffi::c_str;
use feynpar::feynpar;
use pyo3::prelude::*;

#[test]
fn module_runs_inside_an_embedded_interpreter() {
    pyo3::append_to_inittab!(feynpar);
    Python::initialize();
    Python::attach(|py| {
        let code = c_str!(
            r#"
import feynpar
g = feynpar.Graph.builtin("triangle")
assert g.loops == 1 and str(g.psi()) == "t1+t2+t3"
assert feynpar.Graph.builtin("banana-3").psi().count_points(2) == 4
try:
    feynpar.Slice.make(2, 5)
except feynpar.FeynparError:
    pass
else:
    raise AssertionError("bad slice accepted")
"#
        );
        py.run(code, None, None).unwrap_or_else(|e| panic!("{e}"));
    });
}
