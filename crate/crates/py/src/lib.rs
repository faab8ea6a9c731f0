//! Python bindings for the core crate: an exact cyclotomic number type and
//! the headline verification entry points, returned as plain Python data.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use eisen::bernoulli::beta_const;
use eisen::cli::{export_series, AssignmentName, ExportSeriesArgs, SeriesFamily};
use eisen::cyclotomic::{eta_block_sum, eta_block_sum_closed};
use eisen::dz::{dz_dim, verify_sum_formula};
use eisen::gamma::{build_system, rank_and_pivots, row_labels, solve};
use eisen::numeric::{frakz_numeric, gbtz_sign_probe, ProbeSign};
use eisen::qseries::verify_divisor_identity;
use eisen::shuffle::verify_double_shuffle;
use eisen::CycNum;

fn perr(e: eisen::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn value_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let out = PyList::empty(py);
            for item in items {
                out.append(value_to_py(py, item)?)?;
            }
            out.into_py_any(py)
        }
        Value::Object(map) => {
            let out = PyDict::new(py);
            for (k, val) in map {
                out.set_item(k, value_to_py(py, val)?)?;
            }
            out.into_py_any(py)
        }
    }
}

/// Exact element of the degree-phi(N) field extension generated by a
/// primitive N-th root of unity, with rational coordinates.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Cyc {
    inner: CycNum,
}

impl Cyc {
    fn check_same_level(&self, other: &Cyc) -> PyResult<()> {
        if self.inner.level() != other.inner.level() {
            return Err(PyValueError::new_err(format!(
                "level mismatch: {} vs {}",
                self.inner.level(),
                other.inner.level()
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl Cyc {
    /// The zero element at the given level.
    #[staticmethod]
    fn zero(level: u32) -> Cyc {
        Cyc {
            inner: CycNum::zero(level),
        }
    }

    /// The unit element at the given level.
    #[staticmethod]
    fn one(level: u32) -> Cyc {
        Cyc {
            inner: CycNum::one(level),
        }
    }

    /// A rational number (given as "p" or "p/q") embedded at the level.
    #[staticmethod]
    fn rational(level: u32, value: &str) -> PyResult<Cyc> {
        let r = eisen::arith::rat_from_str(value)
            .ok_or_else(|| PyValueError::new_err(format!("bad rational {:?}", value)))?;
        Ok(Cyc {
            inner: CycNum::from_rat(level, r),
        })
    }

    /// The k-th power of the distinguished primitive root of unity.
    #[staticmethod]
    fn root(level: u32, k: i64) -> Cyc {
        Cyc {
            inner: CycNum::root_power(level, k),
        }
    }

    #[getter]
    fn level(&self) -> u32 {
        self.inner.level()
    }

    /// Rational coordinates over the power basis, rendered as strings.
    fn coords(&self) -> Vec<String> {
        self.inner.coord_strings()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Floating-point image under the standard embedding.
    fn to_complex(&self) -> Complex64 {
        self.inner.to_complex()
    }

    /// Complex conjugation (the root goes to its inverse).
    fn conj(&self) -> Cyc {
        Cyc {
            inner: self.inner.conj(),
        }
    }

    /// The field automorphism sending the root to its k-th power
    /// (k must be coprime to the level).
    fn galois(&self, k: u32) -> PyResult<Cyc> {
        Ok(Cyc {
            inner: self.inner.galois(k).map_err(perr)?,
        })
    }

    /// The same number viewed at a multiple of its level.
    fn promote(&self, to_level: u32) -> PyResult<Cyc> {
        if to_level == 0 || !to_level.is_multiple_of(self.inner.level()) {
            return Err(PyValueError::new_err(format!(
                "{} is not a multiple of level {}",
                to_level,
                self.inner.level()
            )));
        }
        Ok(Cyc {
            inner: self.inner.promote(to_level),
        })
    }

    fn __add__(&self, other: &Cyc) -> PyResult<Cyc> {
        self.check_same_level(other)?;
        Ok(Cyc {
            inner: &self.inner + &other.inner,
        })
    }

    fn __sub__(&self, other: &Cyc) -> PyResult<Cyc> {
        self.check_same_level(other)?;
        Ok(Cyc {
            inner: &self.inner - &other.inner,
        })
    }

    fn __mul__(&self, other: &Cyc) -> PyResult<Cyc> {
        self.check_same_level(other)?;
        Ok(Cyc {
            inner: &self.inner * &other.inner,
        })
    }

    fn __neg__(&self) -> Cyc {
        Cyc {
            inner: -&self.inner,
        }
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.extract::<Cyc>() {
            Ok(o) => self.inner.level() == o.inner.level() && self.inner == o.inner,
            Err(_) => false,
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Cyc(level={}, coords={:?})",
            self.inner.level(),
            self.inner.coord_strings()
        )
    }
}

/// Exact sum of root-of-unity powers over one multiplicity-pattern block of
/// residues, with a power twist per prime.
#[pyfunction]
fn block_sum(level: u32, alpha: Vec<u32>, ell: Vec<u32>) -> PyResult<Cyc> {
    Ok(Cyc {
        inner: eta_block_sum(level, &alpha, &ell).map_err(perr)?,
    })
}

/// Closed form of `block_sum`: zero or a signed product of prime powers.
#[pyfunction]
fn block_sum_closed(level: u32, alpha: Vec<u32>, ell: Vec<u32>) -> PyResult<Cyc> {
    Ok(Cyc {
        inner: eta_block_sum_closed(level, &alpha, &ell).map_err(perr)?,
    })
}

/// True when the weight-two divisor identity holds at every coefficient
/// q^1 through q^max_m.
#[pyfunction]
#[pyo3(signature = (level, max_m = 200))]
fn divisor_identity(level: u32, max_m: u32) -> PyResult<bool> {
    for m in 1..=max_m {
        if !verify_divisor_identity(level, m).map_err(perr)?.pass() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The defining linear system at one level: labelled rows and columns, the
/// integer matrix, and the symbolic right-hand side.
#[pyfunction]
fn system(py: Python<'_>, level: u32) -> PyResult<Py<PyAny>> {
    let sys = build_system(level).map_err(perr)?;
    let out = PyDict::new(py);
    out.set_item(
        "rows",
        sys.rows.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "cols",
        sys.cols.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    )?;
    let matrix: Vec<Vec<i64>> = sys
        .mat
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| e.to_integer().to_i64().expect("small integer entry"))
                .collect()
        })
        .collect();
    out.set_item("matrix", matrix)?;
    let rhs = PyList::empty(py);
    for v in &sys.rhs {
        rhs.append(value_to_py(py, &v.to_json())?)?;
    }
    out.set_item("rhs", rhs)?;
    out.into_py_any(py)
}

/// Rank, left nullity, and the free columns of the system at one level.
#[pyfunction]
fn rank(py: Python<'_>, level: u32) -> PyResult<Py<PyAny>> {
    let rep = rank_and_pivots(level).map_err(perr)?;
    let pivots: std::collections::BTreeSet<_> = rep.pivot_cols.iter().copied().collect();
    let free: Vec<String> = eisen::gamma::col_labels(level)
        .into_iter()
        .filter(|c| !pivots.contains(c))
        .map(|c| c.to_string())
        .collect();
    let out = PyDict::new(py);
    out.set_item("rank", rep.rank)?;
    out.set_item("nullity", row_labels(level).len() - rep.rank)?;
    out.set_item("free_cols", free)?;
    out.set_item("pivots_match_published_rule", rep.pass())?;
    out.into_py_any(py)
}

/// Solves the system with all free columns set to zero and returns the
/// symbolic assignment plus its consistency verdict.
#[pyfunction]
#[pyo3(signature = (level, truncation = 50))]
fn solve_zero(py: Python<'_>, level: u32, truncation: usize) -> PyResult<Py<PyAny>> {
    let res = solve(level, &std::collections::HashMap::new(), truncation).map_err(perr)?;
    let gamma = PyDict::new(py);
    let lambda = PyDict::new(py);
    for a in 0..level {
        for b in 0..level {
            let g = res.assignment.gamma(a, b);
            gamma.set_item(
                format!("gamma({},{})", a, b),
                value_to_py(py, &g.to_json())?,
            )?;
            if a <= b {
                let l = res.assignment.lambda(a, b);
                lambda.set_item(
                    format!("lambda({},{})", a, b),
                    value_to_py(py, &l.to_json())?,
                )?;
            }
        }
    }
    let out = PyDict::new(py);
    out.set_item("pass", res.pass())?;
    out.set_item("gamma", gamma)?;
    out.set_item("lambda", lambda)?;
    out.into_py_any(py)
}

/// True when every stuffle and shuffle decomposition up to the weight agrees
/// with the product series, under the zero-free-value constants.
#[pyfunction]
#[pyo3(signature = (level, max_weight = 6, truncation = 50))]
fn double_shuffle(level: u32, max_weight: u32, truncation: usize) -> PyResult<bool> {
    let asg = AssignmentName::SolvedZero
        .resolve(level, truncation)
        .map_err(perr)?;
    let rep = verify_double_shuffle(level, &asg, max_weight, truncation, true).map_err(perr)?;
    Ok(rep.pass())
}

/// Generator and relation counts for the formal double zeta space at one
/// level and weight, with the even-weight dimension bound when it applies.
#[pyfunction]
#[pyo3(signature = (level, weight, pure = false))]
fn dz_dims(py: Python<'_>, level: u32, weight: u32, pure: bool) -> PyResult<Py<PyAny>> {
    let rep = dz_dim(level, weight, pure).map_err(perr)?;
    let out = PyDict::new(py);
    out.set_item("generators", rep.generators)?;
    out.set_item("relation_rows", rep.relation_rows)?;
    out.set_item("distinct_rows", rep.distinct_rows)?;
    out.set_item("rank", rep.rank)?;
    out.set_item("dim", rep.dim)?;
    out.set_item("doubles_generators", rep.doubles_generators)?;
    out.set_item("doubles_rank", rep.doubles_rank)?;
    out.set_item("doubles_dim", rep.doubles_dim)?;
    out.set_item("printed_bound", rep.printed_bound)?;
    out.set_item("note", rep.note)?;
    out.into_py_any(py)
}

/// True when both weighted sum-formula vectors lie in the exact row space
/// of the defining relations.
#[pyfunction]
#[pyo3(signature = (level, weight, residue = 0))]
fn sum_formula(level: u32, weight: u32, residue: u32) -> PyResult<bool> {
    Ok(verify_sum_formula(level, weight, residue)
        .map_err(perr)?
        .pass())
}

/// The order-n expansion constant at one residue, as an exact number.
#[pyfunction]
fn beta(level: u32, a: u32, n: u32) -> PyResult<Cyc> {
    Ok(Cyc {
        inner: beta_const(level, a, n).map_err(perr)?,
    })
}

/// Numeric value of the symmetrized one-variable sum, with an error bound.
#[pyfunction]
fn frakz(py: Python<'_>, level: u32, a: u32, n: u32) -> PyResult<Py<PyAny>> {
    let v = frakz_numeric(level, a, n).map_err(perr)?;
    let out = PyDict::new(py);
    out.set_item("value", v.value)?;
    out.set_item("error_bound", v.error_bound)?;
    out.into_py_any(py)
}

/// Which shift sign ("plus", "minus", or "anomaly") reconciles the exact
/// order-one constant with the numeric sum at one residue.
#[pyfunction]
#[pyo3(signature = (level, a, tol = 1e-9))]
fn sign_probe(level: u32, a: u32, tol: f64) -> PyResult<String> {
    let rep = gbtz_sign_probe(level, a, tol).map_err(perr)?;
    Ok(match rep.sign {
        ProbeSign::Plus => "plus",
        ProbeSign::Minus => "minus",
        ProbeSign::Anomaly => "anomaly",
    }
    .to_string())
}

/// One q-expansion (family "g", "g-prime", or "f2") as nested coordinate
/// strings: coeffs[m] lists the coordinates of the q^m coefficient.
#[pyfunction]
#[pyo3(signature = (level, family, residues = vec![0], orders = None, truncation = None))]
fn series(
    py: Python<'_>,
    level: u32,
    family: &str,
    residues: Vec<u32>,
    orders: Option<Vec<u32>>,
    truncation: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let family = match family {
        "g" => SeriesFamily::G,
        "g-prime" => SeriesFamily::GPrime,
        "f2" => SeriesFamily::F2,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown family {:?}: expected \"g\", \"g-prime\", or \"f2\"",
                other
            )))
        }
    };
    let join = |xs: &[u32]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let args = ExportSeriesArgs {
        level,
        family,
        residues: join(&residues),
        orders: orders.as_deref().map(join),
        truncation,
    };
    let qs = export_series(&args).map_err(perr)?;
    value_to_py(py, &qs.to_json())
}

#[pymodule]
fn eisen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Cyc>()?;
    m.add_function(wrap_pyfunction!(block_sum, m)?)?;
    m.add_function(wrap_pyfunction!(block_sum_closed, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_identity, m)?)?;
    m.add_function(wrap_pyfunction!(system, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(solve_zero, m)?)?;
    m.add_function(wrap_pyfunction!(double_shuffle, m)?)?;
    m.add_function(wrap_pyfunction!(dz_dims, m)?)?;
    m.add_function(wrap_pyfunction!(sum_formula, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(frakz, m)?)?;
    m.add_function(wrap_pyfunction!(sign_probe, m)?)?;
    m.add_function(wrap_pyfunction!(series, m)?)?;
    Ok(())
}
