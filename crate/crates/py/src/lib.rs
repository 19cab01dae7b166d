//! Python bindings: points, instances, partitions and the pipeline operations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hyptw::decomp::{decompose_by_separators, heuristic_decompose, validate_td, WeightedTreeDecomposition, MIN_SIZE};
use hyptw::experiment::{gen_points, rows_to_csv, run_experiment, volume_radius, ExperimentConfig, PointKind};
use hyptw::hardness::{
    build_grid_embedding, gtleq_to_is, random_gt_instance, reduction_vertex_count, sat_to_gridtiling, CnfFormula,
    GtMode,
};
use hyptw::hypgeo::{dist, HPoint, Model};
use hyptw::nubg::{self, contract, greedy_partition, partition_spec, tiling_partition, NoisePolicy, NubgInstance};
use hyptw::separator::{separator_for_partition, validate_separator, SeparatorOptions};
use hyptw::solvers::{self, DpBudget};
use hyptw::{io, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn model(s: &str) -> PyResult<Model> {
    s.parse().map_err(err)
}

#[pyclass(name = "Point", module = "pyhyptw", frozen, from_py_object)]
#[derive(Clone)]
struct PyPoint(HPoint);

#[pymethods]
impl PyPoint {
    /// Point from coordinates in `model` (hyperboloid, ball, halfspace or klein).
    #[new]
    #[pyo3(signature = (coords, model = "hyperboloid"))]
    fn new(coords: Vec<f64>, model: &str) -> PyResult<Self> {
        HPoint::from_model(self::model(model)?, &coords).map(PyPoint).map_err(err)
    }

    #[staticmethod]
    fn origin(d: usize) -> Self {
        PyPoint(HPoint::origin(d))
    }

    #[pyo3(signature = (model = "hyperboloid"))]
    fn coords(&self, model: &str) -> PyResult<Vec<f64>> {
        self.0.to_model(self::model(model)?).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }

    fn dist(&self, other: &PyPoint) -> f64 {
        dist(&self.0, &other.0)
    }

    fn __repr__(&self) -> String {
        format!("Point({:?})", self.0.coords())
    }
}

#[pyclass(name = "Instance", module = "pyhyptw", from_py_object)]
#[derive(Clone)]
struct PyInstance(NubgInstance);

#[pymethods]
impl PyInstance {
    /// Graph over `points` with gray-zone pairs joined with probability `noise`.
    #[new]
    #[pyo3(signature = (points, rho, nu = 1.0, noise = 0.5, seed = 0))]
    fn new(points: Vec<PyPoint>, rho: f64, nu: f64, noise: f64, seed: u64) -> PyResult<Self> {
        let pts: Vec<HPoint> = points.into_iter().map(|p| p.0).collect();
        nubg::build_graph(&pts, rho, nu, NoisePolicy::Bernoulli { p: noise, seed }).map(PyInstance).map_err(err)
    }

    /// Uniform points in the ball of volume `n` (or of the given radius) and their graph.
    #[staticmethod]
    #[pyo3(signature = (n, seed, d = 2, rho = 0.3, nu = 1.2, noise = 0.5, radius = None))]
    fn random(n: usize, seed: u64, d: usize, rho: f64, nu: f64, noise: f64, radius: Option<f64>) -> PyResult<Self> {
        let radius = match radius {
            Some(r) => r,
            None => volume_radius(d, n as f64).map_err(err)?,
        };
        let pts = gen_points(&PointKind::UniformBall { radius }, n, d, seed).map_err(err)?;
        nubg::build_graph(&pts, rho, nu, NoisePolicy::Bernoulli { p: noise, seed }).map(PyInstance).map_err(err)
    }

    #[staticmethod]
    fn from_text(graph: &str, points: &str) -> PyResult<Self> {
        io::read_instance(graph, points).map(PyInstance).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.graph.m()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.0.nu
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.graph.edges()
    }

    fn points(&self) -> Vec<PyPoint> {
        self.0.points.iter().cloned().map(PyPoint).collect()
    }

    /// First vertex pair violating the distance rules, if any.
    fn check_membership(&self) -> Option<(usize, usize)> {
        self.0.check_membership()
    }

    fn graph_text(&self) -> String {
        io::write_graph(&self.0.graph, self.0.rho, self.0.nu)
    }

    #[pyo3(signature = (model = "hyperboloid"))]
    fn points_text(&self, model: &str) -> PyResult<String> {
        io::write_points(&self.0.points, self::model(model)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={}, rho={}, nu={})", self.0.n(), self.0.graph.m(), self.0.rho, self.0.nu)
    }
}

#[pyclass(name = "Partition", module = "pyhyptw", frozen, from_py_object)]
#[derive(Clone)]
struct PyPartition(nubg::Partition);

#[pymethods]
impl PyPartition {
    #[staticmethod]
    fn tiling(inst: &PyInstance) -> PyResult<Self> {
        let spec = partition_spec(inst.0.dim(), inst.0.rho).map_err(err)?;
        tiling_partition(&inst.0, &spec).map(PyPartition).map_err(err)
    }

    #[staticmethod]
    fn greedy(inst: &PyInstance, seed: u64) -> Self {
        PyPartition(greedy_partition(&inst.0.graph, seed))
    }

    #[staticmethod]
    fn singletons(n: usize) -> Self {
        PyPartition(nubg::Partition::singletons(n))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        io::read_partition(text).map(PyPartition).map_err(err)
    }

    #[getter]
    fn classes(&self) -> Vec<Vec<usize>> {
        self.0.classes.clone()
    }

    fn to_text(&self) -> String {
        io::write_partition(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "Decomposition", module = "pyhyptw", frozen, from_py_object)]
#[derive(Clone)]
struct PyDecomposition {
    part: nubg::Partition,
    wtd: WeightedTreeDecomposition,
}

#[pymethods]
impl PyDecomposition {
    /// Bags over partition classes.
    #[getter]
    fn bags(&self) -> Vec<Vec<usize>> {
        self.wtd.td.bags.clone()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.wtd.td.edges.clone()
    }

    #[getter]
    fn weighted_width(&self) -> f64 {
        self.wtd.weighted_width()
    }

    #[getter]
    fn partition(&self) -> PyPartition {
        PyPartition(self.part.clone())
    }

    fn to_text(&self) -> String {
        let w: Vec<f64> = self.wtd.td.bags.iter().map(|b| b.iter().map(|&c| self.wtd.weights[c]).sum()).collect();
        io::write_td(&self.wtd.td, self.part.len(), Some(&w))
    }
}

/// Separator over the tiling partition, as a dict.
#[pyfunction]
#[pyo3(signature = (inst, seed, trials = 64))]
fn separator<'py>(py: Python<'py>, inst: &PyInstance, seed: u64, trials: usize) -> PyResult<Bound<'py, PyDict>> {
    let spec = partition_spec(inst.0.dim(), inst.0.rho).map_err(err)?;
    let part = tiling_partition(&inst.0, &spec).map_err(err)?;
    let opts = SeparatorOptions { seed, trials, ..SeparatorOptions::default() };
    let sep = separator_for_partition(&inst.0, &spec, &part, &opts).map_err(err)?;
    let rep = validate_separator(&inst.0, &part, &sep, opts.eps_bal);
    let d = PyDict::new(py);
    d.set_item("size", sep.size)?;
    d.set_item("weight", sep.weight)?;
    d.set_item("balance", sep.balance)?;
    d.set_item("valid", rep.valid)?;
    d.set_item("vertices", sep.classes.iter().flat_map(|&c| part.classes[c].clone()).collect::<Vec<_>>())?;
    Ok(d)
}

/// Decomposition by recursive separators (`seed` given) or by a min-degree heuristic over `partition`.
#[pyfunction]
#[pyo3(signature = (inst, seed = None, partition = None))]
fn decompose(inst: &PyInstance, seed: Option<u64>, partition: Option<PyPartition>) -> PyResult<PyDecomposition> {
    match seed {
        Some(s) => {
            let spec = partition_spec(inst.0.dim(), inst.0.rho).map_err(err)?;
            let (part, _, wtd) = decompose_by_separators(&inst.0, &spec, MIN_SIZE, s).map_err(err)?;
            Ok(PyDecomposition { part, wtd })
        }
        None => {
            let part = partition.map_or_else(|| nubg::Partition::singletons(inst.0.n()), |p| p.0);
            let q = contract(&inst.0.graph, &part).map_err(err)?;
            Ok(PyDecomposition {
                wtd: WeightedTreeDecomposition { td: heuristic_decompose(&q.graph), weights: q.weights },
                part,
            })
        }
    }
}

/// Exact `is`, `vc` or `ds` value with a witness, on `decomposition` or a heuristic one.
#[pyfunction]
#[pyo3(signature = (inst, problem, decomposition = None))]
fn solve(inst: &PyInstance, problem: &str, decomposition: Option<PyDecomposition>) -> PyResult<(usize, Vec<usize>)> {
    let dec = match decomposition {
        Some(d) => d,
        None => decompose(inst, None, None)?,
    };
    let q = contract(&inst.0.graph, &dec.part).map_err(err)?;
    if !validate_td(&q.graph, &dec.wtd.td).valid {
        return Err(PyValueError::new_err("decomposition does not match the instance"));
    }
    let (g, b) = (&inst.0.graph, DpBudget::default());
    let s = match problem {
        "is" => solvers::solve_is(g, &dec.wtd, &dec.part, &b),
        "vc" => solvers::solve_vc(g, &dec.wtd, &dec.part, &b),
        "ds" => solvers::solve_ds(g, &dec.wtd, &dec.part, &b),
        _ => return Err(PyValueError::new_err(format!("unknown problem `{problem}`"))),
    }
    .map_err(err)?;
    Ok((s.value, s.witness))
}

/// Proper `q`-coloring over the tiling partition, or `None`.
#[pyfunction]
#[pyo3(signature = (inst, q = 3))]
fn coloring(inst: &PyInstance, q: usize) -> PyResult<Option<Vec<usize>>> {
    let part = PyPartition::tiling(inst)?.0;
    solvers::solve_qcoloring(&inst.0.graph, q, &part, &DpBudget::default()).map_err(err)
}

/// Hamiltonian cycle over the tiling partition, or `None`.
#[pyfunction]
fn hamiltonian_cycle(inst: &PyInstance) -> PyResult<Option<Vec<usize>>> {
    let part = PyPartition::tiling(inst)?.0;
    Ok(solvers::solve_hamiltonian(&inst.0.graph, &part, &DpBudget::default()).map_err(err)?.0)
}

/// Random Grid Tiling-<= instance and its independent set instance; returns `(gt_json, instance, target, formula)`.
#[pyfunction]
#[pyo3(signature = (k, big_n, seed, density = 0.4, n_param = 16.0))]
fn lowerbound(
    k: usize,
    big_n: u32,
    seed: u64,
    density: f64,
    n_param: f64,
) -> PyResult<(String, PyInstance, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gt = random_gt_instance(k, big_n, GtMode::Leq, density, &mut rng).map_err(err)?;
    let emb = build_grid_embedding(n_param, k).map_err(err)?;
    let red = gtleq_to_is(&gt, &emb).map_err(err)?;
    let formula = reduction_vertex_count(&gt, &emb);
    Ok((gt.to_json(), PyInstance(red.instance), red.target, formula))
}

/// Grid Tiling instance (JSON) encoding a DIMACS formula.
#[pyfunction]
fn sat_to_grid_tiling(dimacs: &str) -> PyResult<String> {
    let phi = CnfFormula::parse_dimacs(dimacs).map_err(err)?;
    Ok(sat_to_gridtiling(&phi).map_err(err)?.to_json())
}

/// Runs an experiment from a JSON config and returns the CSV text.
#[pyfunction]
fn experiment(config_json: &str) -> PyResult<String> {
    let cfg: ExperimentConfig = serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    rows_to_csv(&run_experiment(&cfg).map_err(err)?).map_err(err)
}

#[pymodule]
fn pyhyptw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoint>()?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(separator, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(coloring, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(lowerbound, m)?)?;
    m.add_function(wrap_pyfunction!(sat_to_grid_tiling, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    Ok(())
}
