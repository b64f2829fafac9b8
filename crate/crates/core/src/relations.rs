//! End-to-end verification of the named spectral identities: the line-graph
//! relation, the subdivision relation, and the 0-form dual relation at unit
//! lengths.

use crate::calculus::{assemble, supersymmetry_check};
use crate::error::{Error, Result};
use crate::graph::{cycle_structure, line_graph, subdivision_graph, Graph};
use crate::linalg::{cr, max_abs, multiset_match, remove_near, CMatrix};
use crate::space::{dual_space, make_space, standard_reduction, SpaceSpec, VertexSpace};

pub const SPECTRUM_TOL: f64 = 1e-9;
pub const MATRIX_TOL: f64 = 1e-12;

fn require_unit_lengths(g: &Graph) -> Result<()> {
    if !g.has_unit_lengths() {
        return Err(Error::PreconditionViolated("all edge lengths must be 1".into()));
    }
    Ok(())
}

fn require_connected(g: &Graph) -> Result<()> {
    if cycle_structure(g).component_count != 1 {
        return Err(Error::PreconditionViolated("graph must be connected".into()));
    }
    Ok(())
}

fn require_simple(g: &Graph) -> Result<()> {
    if let Some(e) = g.has_self_loop() {
        return Err(Error::SelfLoopPresent(e));
    }
    if let Some((a, b)) = g.has_multi_edge() {
        return Err(Error::MultiEdgePresent(a.to_string(), b.to_string()));
    }
    Ok(())
}

/// Result of checking
/// `spec L(g) \ {d/(d-1)} = d/(2(d-1)) * (spec g \ {2})` together with the
/// matrix identity `lap1(or-std) = 2 - (2d-2)/d * lap0(L(g))`.
#[derive(Debug, Clone)]
pub struct LineGraphRecord {
    pub degree: usize,
    pub spectrum_graph: Vec<f64>,
    pub spectrum_line_graph: Vec<f64>,
    /// Largest entry defect of the matrix identity.
    pub matrix_residual: f64,
    /// Spectrum of the line graph stays inside [0, d/(d-1)].
    pub range_ok: bool,
    /// Supersymmetric pairing of the oriented-standard Laplacians held.
    pub susy_ok: bool,
}

pub fn line_graph_relation(g: &Graph) -> Result<LineGraphRecord> {
    require_simple(g)?;
    require_connected(g)?;
    require_unit_lengths(g)?;
    let d = match g.is_regular() {
        Some(d) if d >= 2 => d,
        Some(d) => return Err(Error::NotRegular(d.max(2))),
        None => return Err(Error::NotRegular(2)),
    };
    let lg = line_graph(g)?;

    let spec_g = standard_reduction(g).reduced_lap0_spectrum(g);
    let spec_lg = standard_reduction(&lg).reduced_lap0_spectrum(&lg);

    let excluded = d as f64 / (d as f64 - 1.0);
    let lhs = remove_near(&spec_lg, excluded, SPECTRUM_TOL);
    let scale = d as f64 / (2.0 * (d as f64 - 1.0));
    let rhs: Vec<f64> =
        remove_near(&spec_g, 2.0, SPECTRUM_TOL).into_iter().map(|x| scale * x).collect();
    if let Err((a, b)) = multiset_match(&lhs, &rhs, SPECTRUM_TOL) {
        return Err(Error::RelationFailed {
            relation: "line-graph spectral relation".into(),
            detail: format!("unmatched pair {a:?} vs {b:?}"),
        });
    }
    let range_ok = spec_lg.iter().all(|&x| x >= -SPECTRUM_TOL && x <= excluded + SPECTRUM_TOL);

    // Matrix identity in the raw edge coordinates, aligned by e -> vertex e.
    let or = make_space(g, &SpaceSpec::OrientedStandard)?;
    let ops_or = assemble(g, &or)?;
    let lap0_lg = standard_reduction(&lg).reduced_lap0(&lg);
    let factor = (2.0 * d as f64 - 2.0) / d as f64;
    let ne = g.edge_count();
    let expect = CMatrix::identity(ne, ne) * cr(2.0) - lap0_lg * cr(factor);
    let matrix_residual = max_abs(&(&ops_or.lap1 - expect));
    if matrix_residual > MATRIX_TOL {
        return Err(Error::RelationFailed {
            relation: "line-graph matrix identity".into(),
            detail: format!("residual {matrix_residual:.3e}"),
        });
    }

    let susy_ok = supersymmetry_check(&ops_or, SPECTRUM_TOL).is_ok();
    Ok(LineGraphRecord {
        degree: d,
        spectrum_graph: spec_g,
        spectrum_line_graph: spec_lg,
        matrix_residual,
        range_ok,
        susy_ok,
    })
}

/// Result of checking
/// `spec S(g) \ {1} = eta^{-1}(spec g \ {2})` with `eta(x) = 2x(2-x)`.
#[derive(Debug, Clone)]
pub struct SubdivisionRecord {
    pub spectrum_graph: Vec<f64>,
    pub spectrum_subdivision: Vec<f64>,
    /// Multiplicity of the eigenvalue 1 in the subdivision spectrum
    /// (reported, not asserted).
    pub multiplicity_of_one: usize,
    pub susy_ok: bool,
}

pub fn subdivision_relation(g: &Graph) -> Result<SubdivisionRecord> {
    require_simple(g)?;
    require_connected(g)?;
    require_unit_lengths(g)?;
    let sg = subdivision_graph(g)?;

    let spec_g = standard_reduction(g).reduced_lap0_spectrum(g);
    let spec_sg = standard_reduction(&sg).reduced_lap0_spectrum(&sg);

    let lhs = remove_near(&spec_sg, 1.0, SPECTRUM_TOL);
    let multiplicity_of_one = spec_sg.len() - lhs.len();
    let mut rhs = Vec::new();
    for mu in remove_near(&spec_g, 2.0, SPECTRUM_TOL) {
        // eta(x) = 2x(2-x) = mu has the preimages 1 +/- sqrt(1 - mu/2).
        let disc = (1.0 - mu / 2.0).max(0.0).sqrt();
        rhs.push(1.0 - disc);
        rhs.push(1.0 + disc);
    }
    if let Err((a, b)) = multiset_match(&lhs, &rhs, SPECTRUM_TOL) {
        return Err(Error::RelationFailed {
            relation: "subdivision spectral relation".into(),
            detail: format!("unmatched pair {a:?} vs {b:?}"),
        });
    }

    let or = make_space(g, &SpaceSpec::OrientedStandard)?;
    let susy_ok = supersymmetry_check(&assemble(g, &or)?, SPECTRUM_TOL).is_ok();
    Ok(SubdivisionRecord {
        spectrum_graph: spec_g,
        spectrum_subdivision: spec_sg,
        multiplicity_of_one,
        susy_ok,
    })
}

/// Result of checking
/// `spec lap0(G-perp) \ {0,2} = 2 - (spec lap0(G) \ {0,2})` at unit lengths.
#[derive(Debug, Clone)]
pub struct DualSpectrumRecord {
    pub spectrum: Vec<f64>,
    pub spectrum_dual: Vec<f64>,
}

pub fn zero_form_dual_relation(g: &Graph, s: &VertexSpace) -> Result<DualSpectrumRecord> {
    require_unit_lengths(g)?;
    let ops = assemble(g, s)?;
    let ops_dual = assemble(g, &dual_space(s))?;
    let spec = ops.lap0_spectrum();
    let spec_dual = ops_dual.lap0_spectrum();

    let punct = |xs: &[f64]| {
        let a = remove_near(xs, 0.0, SPECTRUM_TOL);
        remove_near(&a, 2.0, SPECTRUM_TOL)
    };
    let lhs = punct(&spec_dual);
    let rhs: Vec<f64> = punct(&spec).into_iter().map(|x| 2.0 - x).collect();
    if let Err((a, b)) = multiset_match(&lhs, &rhs, SPECTRUM_TOL) {
        return Err(Error::RelationFailed {
            relation: "0-form dual spectral relation".into(),
            detail: format!("unmatched pair {a:?} vs {b:?}"),
        });
    }
    Ok(DualSpectrumRecord { spectrum: spec, spectrum_dual: spec_dual })
}
