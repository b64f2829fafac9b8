//! Problem files: the JSON documents the CLI consumes.
//!
//! See `docs/problem-schema.md` for the schema and worked examples. Complex
//! entries are `[re, im]` pairs; matrices are row-major; per-vertex matrix
//! coordinates follow the dart order of the graph (per vertex: edges by id,
//! the `-` dart before the `+` dart for self-loops).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::calculus::space_basis;
use crate::error::{Error, Result};
use crate::graph::{build_graph, EdgeSpec, Graph};
use crate::linalg::{c, CMatrix, CVector};
use crate::metric::{BoundaryCase, MetricProblem, SecularSolverConfig};
use crate::space::{make_space, SpaceSpec, VertexSpace};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub graph: GraphSection,
    pub space: SpaceSection,
    #[serde(rename = "L", default)]
    pub l: Option<BTreeMap<String, ComplexMatrix>>,
    #[serde(default)]
    pub case: Option<String>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSection {
    pub src: String,
    pub dst: String,
    #[serde(default)]
    pub length: Option<f64>,
}

/// Row-major complex matrix as `[re, im]` pairs.
pub type ComplexMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub kind: String,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub projections: Option<BTreeMap<String, ComplexMatrix>>,
    #[serde(default)]
    pub bases: Option<BTreeMap<String, Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub mu_min: Option<f64>,
    #[serde(default)]
    pub mu_max: Option<f64>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub refine_tol: Option<f64>,
    #[serde(default)]
    pub multiplicity_tol: Option<f64>,
}

/// Everything a subcommand needs, constructed and validated.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub graph: Graph,
    pub space: VertexSpace,
    pub metric: MetricProblem,
    pub solver: SecularSolverConfig,
    /// SHA-256 hex digest of the raw problem document.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads and validates a problem file.
pub fn parse_problem(path: &Path) -> Result<BuiltProblem> {
    let bytes = std::fs::read(path)?;
    build_problem(&bytes)
}

/// Parses and validates a problem document from raw bytes.
pub fn build_problem(bytes: &[u8]) -> Result<BuiltProblem> {
    let file: ProblemFile = serde_json::from_slice(bytes)
        .map_err(|e| Error::SchemaError(format!("{e}")))?;
    let digest = sha256_hex(bytes);

    let specs: Vec<EdgeSpec> = file
        .graph
        .edges
        .iter()
        .map(|e| EdgeSpec { src: e.src.clone(), dst: e.dst.clone(), length: e.length })
        .collect();
    let graph = build_graph(&file.graph.vertices, &specs)?;

    let space = build_space(&graph, &file.space)?;
    let case = match &file.case {
        None => BoundaryCase::Simple,
        Some(name) => BoundaryCase::parse(name).ok_or_else(|| {
            Error::SchemaError(format!(
                "unknown case `{name}`; expected one of {}",
                BoundaryCase::ALL.map(|c| c.name()).join(", ")
            ))
        })?,
    };
    let l_blocks = build_l_blocks(&graph, &space, file.l.as_ref())?;
    let metric = MetricProblem::new(graph.clone(), space.clone(), l_blocks, case)?;

    let mut solver = SecularSolverConfig::default();
    if let Some(s) = &file.solver {
        if let Some(x) = s.mu_min {
            solver.mu_min = x;
        }
        if let Some(x) = s.mu_max {
            solver.mu_max = x;
        }
        if let Some(x) = s.grid_points {
            solver.grid_points = x;
        }
        if let Some(x) = s.refine_tol {
            solver.refine_tol = x;
        }
        if let Some(x) = s.multiplicity_tol {
            solver.multiplicity_tol = x;
        }
    }
    solver.validate()?;

    Ok(BuiltProblem { graph, space, metric, solver, digest })
}

fn complex_matrix(m: &ComplexMatrix) -> Result<CMatrix> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::SchemaError("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| c(m[i][j][0], m[i][j][1])))
}

fn build_space(graph: &Graph, section: &SpaceSection) -> Result<VertexSpace> {
    let spec = match section.kind.as_str() {
        "minimal" => SpaceSpec::Minimal,
        "maximal" => SpaceSpec::Maximal,
        "standard" => SpaceSpec::Standard,
        "oriented_standard" => SpaceSpec::OrientedStandard,
        "sum" => SpaceSpec::Sum,
        "oriented_sum" => SpaceSpec::OrientedSum,
        "magnetic" => {
            let alpha = section.alpha.clone().ok_or_else(|| {
                Error::SchemaError("magnetic space needs `alpha` (one entry per edge)".into())
            })?;
            if alpha.len() != graph.edge_count() {
                return Err(Error::DimensionMismatch(format!(
                    "alpha has {} entries for {} edges",
                    alpha.len(),
                    graph.edge_count()
                )));
            }
            SpaceSpec::Magnetic { alpha }
        }
        "custom" => match (&section.projections, &section.bases) {
            (Some(per_vertex), None) => {
                for id in per_vertex.keys() {
                    if graph.vertex_index(id).is_none() {
                        return Err(Error::UnknownVertex(id.clone()));
                    }
                }
                let mut ps = Vec::with_capacity(graph.vertex_count());
                for v in 0..graph.vertex_count() {
                    let id = graph.vertex_id(v);
                    let m = per_vertex.get(id).ok_or_else(|| {
                        Error::SchemaError(format!("missing projection for vertex `{id}`"))
                    })?;
                    let p = complex_matrix(m)?;
                    if p.nrows() != graph.degree(v) || p.ncols() != graph.degree(v) {
                        return Err(Error::DimensionMismatch(format!(
                            "projection at `{id}` is {}x{}, degree is {}",
                            p.nrows(),
                            p.ncols(),
                            graph.degree(v)
                        )));
                    }
                    ps.push(p);
                }
                SpaceSpec::Projections(ps)
            }
            (None, Some(per_vertex)) => {
                for id in per_vertex.keys() {
                    if graph.vertex_index(id).is_none() {
                        return Err(Error::UnknownVertex(id.clone()));
                    }
                }
                let mut bases = Vec::with_capacity(graph.vertex_count());
                for v in 0..graph.vertex_count() {
                    let id = graph.vertex_id(v);
                    let vecs = per_vertex.get(id).ok_or_else(|| {
                        Error::SchemaError(format!("missing basis list for vertex `{id}`"))
                    })?;
                    let mut out: Vec<CVector> = Vec::with_capacity(vecs.len());
                    for raw in vecs {
                        if raw.len() != graph.degree(v) {
                            return Err(Error::DimensionMismatch(format!(
                                "basis vector at `{id}` has {} entries, degree is {}",
                                raw.len(),
                                graph.degree(v)
                            )));
                        }
                        out.push(CVector::from_fn(raw.len(), |i, _| {
                            c(raw[i][0], raw[i][1])
                        }));
                    }
                    bases.push(out);
                }
                SpaceSpec::Bases(bases)
            }
            (Some(_), Some(_)) => {
                return Err(Error::SchemaError(
                    "custom space: give `projections` or `bases`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::SchemaError(
                    "custom space needs `projections` or `bases`".into(),
                ))
            }
        },
        other => {
            return Err(Error::SchemaError(format!(
                "unknown space kind `{other}`"
            )))
        }
    };
    make_space(graph, &spec)
}

fn build_l_blocks(
    graph: &Graph,
    space: &VertexSpace,
    l: Option<&BTreeMap<String, ComplexMatrix>>,
) -> Result<Vec<CMatrix>> {
    let basis = space_basis(graph, space)?;
    let mut blocks: Vec<CMatrix> = (0..graph.vertex_count())
        .map(|v| CMatrix::zeros(basis.dim_at(v), basis.dim_at(v)))
        .collect();
    if let Some(map) = l {
        for (id, raw) in map {
            let v = graph
                .vertex_index(id)
                .ok_or_else(|| Error::UnknownVertex(id.clone()))?;
            let m = complex_matrix(raw)?;
            let dim = basis.dim_at(v);
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "L block at `{id}` is {}x{}, dim G_v is {}",
                    m.nrows(),
                    m.ncols(),
                    dim
                )));
            }
            blocks[v] = m;
        }
    }
    Ok(blocks)
}
