//! Metric-graph side: kernels of the metric Dirac operator for the five
//! boundary-condition families, their isomorphism onto discrete kernels,
//! quantum-graph curvature, the secular eigenvalue solver and vertex
//! scattering matrices.
//!
//! A problem is `(graph, G, L, case)`: a vertex space `G` with a Hermitian
//! positive semi-definite `L` acting block-locally on it (blocks are given in
//! the per-vertex orthonormal bases extracted by the discrete assembly), and
//! one of the five case tags. Kernel elements of the metric Dirac operator
//! are edgewise constant, so each kernel is the null space of an explicit
//! finite constraint system over the per-edge constants plus the auxiliary
//! vertex components; the trace map carries them onto the kernel of the
//! matching (trivially enlarged) discrete Dirac operator.

use num::rational::BigRational;
use num::{BigInt, FromPrimitive, Zero};

use crate::calculus::{assemble, cohomology, rational_from_f64, space_basis, OperatorSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{
    c, cr, hermitian_eigen, hermitian_sqrt_psd, max_abs, null_space, rank, spectral_norm, svd,
    CMatrix, CVector,
};
use crate::space::{make_space, SpaceSpec, VertexSpace};

/// The five families of metric differential-form spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    Simple,
    Enlarged0,
    Enlarged0Proj,
    Enlarged1,
    Enlarged1Proj,
}

impl BoundaryCase {
    pub const ALL: [BoundaryCase; 5] = [
        BoundaryCase::Simple,
        BoundaryCase::Enlarged0,
        BoundaryCase::Enlarged0Proj,
        BoundaryCase::Enlarged1,
        BoundaryCase::Enlarged1Proj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCase::Simple => "simple",
            BoundaryCase::Enlarged0 => "0-enlarged",
            BoundaryCase::Enlarged0Proj => "0-enlarged-proj",
            BoundaryCase::Enlarged1 => "1-enlarged",
            BoundaryCase::Enlarged1Proj => "1-enlarged-proj",
        }
    }

    pub fn parse(s: &str) -> Option<BoundaryCase> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Closed-form index of the metric Dirac operator.
    pub fn expected_index(self, dim_g: usize, edges: usize) -> i64 {
        let (dim_g, edges) = (dim_g as i64, edges as i64);
        match self {
            BoundaryCase::Simple | BoundaryCase::Enlarged0 => dim_g - edges,
            BoundaryCase::Enlarged0Proj => edges,
            BoundaryCase::Enlarged1 => edges - dim_g,
            BoundaryCase::Enlarged1Proj => -edges,
        }
    }
}

/// A metric graph with vertex space `G`, block-local `L >= 0` on it, and a
/// case tag.
#[derive(Debug, Clone)]
pub struct MetricProblem {
    pub graph: Graph,
    pub space: VertexSpace,
    /// Per-vertex Hermitian PSD blocks of `L` in the assembly bases of `G_v`.
    pub l_blocks: Vec<CMatrix>,
    pub case: BoundaryCase,
}

/// Root-finding configuration for [`metric_spectrum`].
#[derive(Debug, Clone)]
pub struct SecularSolverConfig {
    pub mu_min: f64,
    pub mu_max: f64,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub multiplicity_tol: f64,
}

impl Default for SecularSolverConfig {
    fn default() -> Self {
        SecularSolverConfig {
            mu_min: 1e-3,
            mu_max: 10.0,
            grid_points: 400,
            refine_tol: 1e-12,
            multiplicity_tol: 1e-6,
        }
    }
}

impl SecularSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_min > 0.0 && self.mu_max > self.mu_min) {
            return Err(Error::BadProblem("need 0 < mu_min < mu_max".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::BadProblem("need at least 2 grid points".into()));
        }
        Ok(())
    }
}

/// Everything derived from `(G, L)` that the case solvers share: bases of
/// `G` and `G^perp`, `L`, `L^{1/2}` and the kernel split `G = G_0 + G_1`.
pub(crate) struct ProblemData {
    pub ops: OperatorSet,
    /// 2|E| x dim G, orthonormal columns spanning `G`.
    pub embed_g: CMatrix,
    /// 2|E| x dim G-perp.
    pub embed_perp: CMatrix,
    pub l_full: CMatrix,
    pub l_sqrt: CMatrix,
    /// dim G x dim G0: coordinates (in `G`) of an orthonormal basis of
    /// `G_0 = ker L`.
    pub ker_l: CMatrix,
    pub dim_g: usize,
    pub dim_g0: usize,
}

impl MetricProblem {
    pub fn new(
        graph: Graph,
        space: VertexSpace,
        l_blocks: Vec<CMatrix>,
        case: BoundaryCase,
    ) -> Result<MetricProblem> {
        let p = MetricProblem { graph, space, l_blocks, case };
        p.validate()?;
        Ok(p)
    }

    /// Zero `L`.
    pub fn with_zero_l(
        graph: Graph,
        space: VertexSpace,
        case: BoundaryCase,
    ) -> Result<MetricProblem> {
        let basis = space_basis(&graph, &space)?;
        let l_blocks = (0..graph.vertex_count())
            .map(|v| CMatrix::zeros(basis.dim_at(v), basis.dim_at(v)))
            .collect();
        MetricProblem::new(graph, space, l_blocks, case)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.space.matches_graph(&self.graph) {
            return Err(Error::BadProblem("vertex space does not match the graph".into()));
        }
        if self.l_blocks.len() != self.graph.vertex_count() {
            return Err(Error::BadProblem(format!(
                "{} L blocks for {} vertices",
                self.l_blocks.len(),
                self.graph.vertex_count()
            )));
        }
        let basis = space_basis(&self.graph, &self.space)?;
        for (v, block) in self.l_blocks.iter().enumerate() {
            let dim = basis.dim_at(v);
            if block.nrows() != dim || block.ncols() != dim {
                return Err(Error::BadProblem(format!(
                    "L block at vertex `{}` is {}x{}, dim G_v is {}",
                    self.graph.vertex_id(v),
                    block.nrows(),
                    block.ncols(),
                    dim
                )));
            }
            let scale = spectral_norm(block).max(1.0);
            if max_abs(&(block - block.adjoint())) > 1e-9 * scale {
                return Err(Error::BadProblem(format!(
                    "L block at vertex `{}` is not Hermitian",
                    self.graph.vertex_id(v)
                )));
            }
            let (values, _) = hermitian_eigen(&((block + block.adjoint()) * cr(0.5)));
            if values.iter().any(|&x| x < -1e-9 * scale) {
                return Err(Error::BadProblem(format!(
                    "L block at vertex `{}` is not positive semi-definite",
                    self.graph.vertex_id(v)
                )));
            }
        }
        Ok(())
    }

    /// `L` scaled by `t` (for limit checks).
    pub fn scaled_l(&self, t: f64) -> MetricProblem {
        MetricProblem {
            graph: self.graph.clone(),
            space: self.space.clone(),
            l_blocks: self.l_blocks.iter().map(|b| b * cr(t)).collect(),
            case: self.case,
        }
    }

    pub(crate) fn data(&self) -> Result<ProblemData> {
        self.validate()?;
        let ops = assemble(&self.graph, &self.space)?;
        let dim_g = ops.dim_g();
        let embed_g = ops.basis.embed.clone();
        // Complement basis: assemble the dual space and take its embedding.
        let dual = crate::space::dual_space(&self.space);
        let dual_basis = space_basis(&self.graph, &dual)?;
        let embed_perp = dual_basis.embed;

        let mut l_full = CMatrix::zeros(dim_g, dim_g);
        let mut l_sqrt = CMatrix::zeros(dim_g, dim_g);
        let mut ker_cols: Vec<CVector> = Vec::new();
        for v in 0..self.graph.vertex_count() {
            let off = ops.basis.offsets[v];
            let dim = ops.basis.dim_at(v);
            if dim == 0 {
                continue;
            }
            let block = (&self.l_blocks[v] + self.l_blocks[v].adjoint()) * cr(0.5);
            let sqrt = hermitian_sqrt_psd(&block, 1e-9 * spectral_norm(&block).max(1.0))?;
            for i in 0..dim {
                for j in 0..dim {
                    l_full[(off + i, off + j)] = block[(i, j)];
                    l_sqrt[(off + i, off + j)] = sqrt[(i, j)];
                }
            }
            // ker L_v, lifted to G coordinates at this vertex's offset.
            let k = null_space(&block)?;
            for col in 0..k.ncols() {
                let mut vec = CVector::zeros(dim_g);
                for i in 0..dim {
                    vec[off + i] = k[(i, col)];
                }
                ker_cols.push(vec);
            }
        }
        let ker_l = if ker_cols.is_empty() {
            CMatrix::zeros(dim_g, 0)
        } else {
            CMatrix::from_columns(&ker_cols)
        };
        let dim_g0 = ker_l.ncols();
        Ok(ProblemData { ops, embed_g, embed_perp, l_full, l_sqrt, ker_l, dim_g, dim_g0 })
    }
}

impl ProblemData {
    /// Unoriented trace matrix `T`: 2|E| x |E|, sending per-edge constants to
    /// the dart vector with both endpoint values equal.
    pub fn trace_matrix(&self, g: &Graph) -> CMatrix {
        let mut t = CMatrix::zeros(g.dart_count(), g.edge_count());
        for e in 0..g.edge_count() {
            let (dm, dp) = g.edge_dart_indices(e);
            t[(dm, e)] = cr(1.0);
            t[(dp, e)] = cr(1.0);
        }
        t
    }

    /// Oriented trace matrix: like `trace_matrix` but with the dart signs.
    pub fn signed_trace_matrix(&self, g: &Graph) -> CMatrix {
        let mut t = CMatrix::zeros(g.dart_count(), g.edge_count());
        for e in 0..g.edge_count() {
            let (dm, dp) = g.edge_dart_indices(e);
            t[(dm, e)] = cr(-1.0);
            t[(dp, e)] = cr(1.0);
        }
        t
    }

    /// Projections of `G^max` dart vectors into `G` resp. `G^perp`
    /// coordinates.
    pub fn to_g(&self, m: &CMatrix) -> CMatrix {
        self.embed_g.adjoint() * m
    }

    pub fn to_perp(&self, m: &CMatrix) -> CMatrix {
        self.embed_perp.adjoint() * m
    }
}

/// Stacks matrices vertically; all must share the column count.
fn vstack(blocks: &[CMatrix]) -> CMatrix {
    let ncols = blocks.iter().map(|b| b.ncols()).max().unwrap_or(0);
    let nrows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(nrows, ncols);
    let mut row = 0;
    for b in blocks {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                out[(row + i, j)] = b[(i, j)];
            }
        }
        row += b.nrows();
    }
    out
}

/// Places `a` and `b` side by side on a shared row space:
/// `[a | b]` with `a.nrows() == b.nrows()`.
fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out[(i, j)] = a[(i, j)];
        }
        for j in 0..b.ncols() {
            out[(i, a.ncols() + j)] = b[(i, j)];
        }
    }
    out
}

/// Kernel report of the metric Dirac operator for one problem.
#[derive(Debug, Clone)]
pub struct MetricKernelReport {
    pub dim_ker_de: usize,
    pub dim_ker_de_star: usize,
    pub metric_index: i64,
    pub discrete_index: i64,
    pub expected_index: i64,
    pub phi_bijective: bool,
    /// 0-form kernel basis: per-edge constants stacked over auxiliary `G`
    /// components (layout depends on the case).
    pub ker0_basis: CMatrix,
    pub ker1_basis: CMatrix,
}

/// Builds the effective discrete vertex space for each case, as dart-space
/// projections: the space the (trivially enlarged) discrete Dirac operator
/// acts on.
fn effective_space(p: &MetricProblem, data: &ProblemData) -> Result<(VertexSpace, usize)> {
    let g = &p.graph;
    // Per-vertex dart-space projections of G0 = ker L (within G).
    let mut p0: Vec<CMatrix> = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        let deg = g.degree(v);
        let dim = data.ops.basis.dim_at(v);
        let off = data.ops.basis.offsets[v];
        if dim == 0 {
            p0.push(CMatrix::zeros(deg, deg));
            continue;
        }
        let block = (&p.l_blocks[v] + p.l_blocks[v].adjoint()) * cr(0.5);
        let k = null_space(&block)?;
        let lifted = &data.ops.basis.per_vertex[v] * k; // deg x k
        p0.push(&lifted * lifted.adjoint());
        let _ = off;
    }
    let projections: Vec<CMatrix> = match p.case {
        BoundaryCase::Simple => p.space.projections().to_vec(),
        // d acts through G1 = G - ker L; the enlargement G0 is bookkept
        // separately via `dim_g0`.
        BoundaryCase::Enlarged0 => (0..g.vertex_count())
            .map(|v| p.space.projection(v) - &p0[v])
            .collect(),
        BoundaryCase::Enlarged0Proj => (0..g.vertex_count())
            .map(|v| CMatrix::identity(g.degree(v), g.degree(v)) - &p0[v])
            .collect(),
        BoundaryCase::Enlarged1 => (0..g.vertex_count())
            .map(|v| {
                CMatrix::identity(g.degree(v), g.degree(v))
                    - (p.space.projection(v) - &p0[v])
            })
            .collect(),
        BoundaryCase::Enlarged1Proj => p0.clone(),
    };
    let space = make_space(g, &SpaceSpec::Projections(projections))?;
    Ok((space, data.dim_g0))
}

pub fn metric_kernel(p: &MetricProblem) -> Result<MetricKernelReport> {
    let g = &p.graph;
    let data = p.data()?;
    let ne = g.edge_count();
    let t = data.trace_matrix(g);
    let s = data.signed_trace_matrix(g);
    let tg = data.to_g(&t); // dim G x |E|
    let tp = data.to_perp(&t); // dim G-perp x |E|
    let sg = data.to_g(&s);
    let sp = data.to_perp(&s);
    let lsq = &data.l_sqrt;
    let dim_g = data.dim_g;

    // Constraint systems over the indicated unknowns; kernels are the
    // Dirac kernels restricted to edgewise constants.
    let (m0, m1): (CMatrix, CMatrix) = match p.case {
        BoundaryCase::Simple => {
            // 0-forms c: trace(c) in G. 1-forms c: oriented trace in G-perp.
            (tp.clone(), sg.clone())
        }
        BoundaryCase::Enlarged0 => {
            // 0-forms (c, F): trace(c) = L^{1/2} F.
            let top = hstack(&tp, &CMatrix::zeros(tp.nrows(), dim_g));
            let bottom = hstack(&tg, &(-(lsq.clone())));
            let m0 = vstack(&[top, bottom]);
            // 1-forms c: L^{1/2} P sigma-trace(c) = 0.
            let m1 = lsq * &sg;
            (m0, m1)
        }
        BoundaryCase::Enlarged0Proj => {
            // 0-forms (c, F): P trace(c) = L^{1/2} F.
            let m0 = hstack(&tg, &(-(lsq.clone())));
            // 1-forms c: sigma-trace(c) in G and L^{1/2} (coords) = 0.
            let m1 = vstack(&[sp.clone(), lsq * &sg]);
            (m0, m1)
        }
        BoundaryCase::Enlarged1 => {
            // 0-forms c: L^{1/2} P trace(c) = 0.
            let m0 = lsq * &tg;
            // 1-forms (c, G): sigma-trace(c) in G, coords + L^{1/2} G = 0.
            let top = hstack(&sp, &CMatrix::zeros(sp.nrows(), dim_g));
            let bottom = hstack(&sg, lsq);
            let m1 = vstack(&[top, bottom]);
            (m0, m1)
        }
        BoundaryCase::Enlarged1Proj => {
            // 0-forms c: trace(c) in G and L^{1/2} (coords) = 0.
            let m0 = vstack(&[tp.clone(), lsq * &tg]);
            // 1-forms (c, G): P sigma-trace(c) + L^{1/2} G = 0.
            let m1 = hstack(&sg, lsq);
            (m0, m1)
        }
    };

    let ker0 = null_space(&m0)?;
    let ker1 = null_space(&m1)?;
    let metric_index = ker0.ncols() as i64 - ker1.ncols() as i64;

    // Discrete side: effective space plus trivial enlargement by G0.
    let (eff_space, dim_g0) = effective_space(p, &data)?;
    let eff_ops = assemble(g, &eff_space)?;
    let eff_coh = cohomology(&eff_ops)?;
    let (disc_b0, disc_b1) = match p.case {
        BoundaryCase::Simple => (eff_coh.b0, eff_coh.b1),
        BoundaryCase::Enlarged0 | BoundaryCase::Enlarged0Proj => {
            (eff_coh.b0 + dim_g0, eff_coh.b1)
        }
        BoundaryCase::Enlarged1 | BoundaryCase::Enlarged1Proj => {
            (eff_coh.b0, eff_coh.b1 + dim_g0)
        }
    };
    let discrete_index = disc_b0 as i64 - disc_b1 as i64;
    let expected_index = p.case.expected_index(dim_g, ne);

    let phi_bijective = phi_is_bijective(
        p, &data, &eff_ops, &eff_coh, &ker0, &ker1, disc_b0, disc_b1,
    )?;

    if !phi_bijective {
        return Err(Error::PhiNotBijective(format!(
            "case {}: metric kernels ({}, {}), discrete kernels ({}, {})",
            p.case.name(),
            ker0.ncols(),
            ker1.ncols(),
            disc_b0,
            disc_b1
        )));
    }

    Ok(MetricKernelReport {
        dim_ker_de: ker0.ncols(),
        dim_ker_de_star: ker1.ncols(),
        metric_index,
        discrete_index,
        expected_index,
        phi_bijective,
        ker0_basis: ker0,
        ker1_basis: ker1,
    })
}

/// Verifies that the trace map carries the computed metric kernels
/// bijectively onto the discrete kernels: image dimensions match, images lie
/// in the discrete kernel, and the image has full rank.
#[allow(clippy::too_many_arguments)]
fn phi_is_bijective(
    p: &MetricProblem,
    data: &ProblemData,
    eff_ops: &OperatorSet,
    eff_coh: &crate::calculus::CohomologyReport,
    ker0: &CMatrix,
    ker1: &CMatrix,
    disc_b0: usize,
    disc_b1: usize,
) -> Result<bool> {
    let g = &p.graph;
    let ne = g.edge_count();
    if ker0.ncols() != disc_b0 || ker1.ncols() != disc_b1 {
        return Ok(false);
    }
    let t = data.trace_matrix(g);
    let eff_dim = eff_ops.dim_g();

    // Phi_0: edge constants -> trace coordinates in the effective space;
    // auxiliary F components -> their ker-L part, appended as extra
    // coordinates.
    let map0: CMatrix = {
        let to_eff = eff_ops.basis.embed.adjoint() * &t; // eff_dim x |E|
        match p.case {
            BoundaryCase::Simple | BoundaryCase::Enlarged1 | BoundaryCase::Enlarged1Proj => {
                // Unknowns: c only.
                to_eff
            }
            BoundaryCase::Enlarged0 | BoundaryCase::Enlarged0Proj => {
                // Unknowns: (c, F). Image: (coords of trace(c) in the
                // effective space, ker-L coordinates of F).
                let f_to_g0 = data.ker_l.adjoint(); // dim_g0 x dim_g
                let top = hstack(&to_eff, &CMatrix::zeros(eff_dim, data.dim_g));
                let bottom =
                    hstack(&CMatrix::zeros(data.dim_g0, ne), &f_to_g0);
                vstack(&[top, bottom])
            }
        }
    };
    // Phi_1: integration eta_e = l_e c_e, plus ker-L coordinates of the
    // auxiliary 1-form component where present.
    let map1: CMatrix = {
        let mut integrate = CMatrix::zeros(ne, ne);
        for e in 0..ne {
            integrate[(e, e)] = cr(g.edge(e).length);
        }
        match p.case {
            BoundaryCase::Simple | BoundaryCase::Enlarged0 | BoundaryCase::Enlarged0Proj => {
                integrate
            }
            BoundaryCase::Enlarged1 | BoundaryCase::Enlarged1Proj => {
                let f_to_g0 = data.ker_l.adjoint();
                let top = hstack(&integrate, &CMatrix::zeros(ne, data.dim_g));
                let bottom = hstack(&CMatrix::zeros(data.dim_g0, ne), &f_to_g0);
                vstack(&[top, bottom])
            }
        }
    };

    // Discrete kernel bases in the same coordinates. 0-forms: effective
    // coordinates followed by G0 coordinates (enlarged-0 cases only).
    let scale0 = max_abs(&map0).max(1.0);
    let img0 = &map0 * ker0;
    let in_kernel0 = match p.case {
        BoundaryCase::Simple | BoundaryCase::Enlarged1 | BoundaryCase::Enlarged1Proj => {
            max_abs(&(&eff_ops.d * &img0)) <= 1e-8 * scale0
        }
        BoundaryCase::Enlarged0 | BoundaryCase::Enlarged0Proj => {
            let eff = img0.rows(0, eff_dim).into_owned();
            max_abs(&(&eff_ops.d * &eff)) <= 1e-8 * scale0
        }
    };
    if !in_kernel0 {
        return Ok(false);
    }
    let rank0 = if img0.ncols() == 0 { 0 } else { rank(&img0)? };
    if rank0 != disc_b0 {
        return Ok(false);
    }

    // 1-forms: raw edge coordinates (plus G0 coordinates in enlarged-1
    // cases). In-kernel means d*_eff eta = 0.
    let scale1 = max_abs(&map1).max(1.0);
    let img1 = &map1 * ker1;
    let eta_part = img1.rows(0, ne).into_owned();
    let in_kernel1 = max_abs(&(&eff_ops.d_star * &eta_part)) <= 1e-8 * scale1;
    if !in_kernel1 {
        return Ok(false);
    }
    let rank1 = if img1.ncols() == 0 { 0 } else { rank(&img1)? };
    if rank1 != disc_b1 {
        return Ok(false);
    }
    let _ = eff_coh;
    Ok(true)
}

/// Per-edge affine curvature and its exact integral.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    /// Twice the curvature of the effective space at each vertex (an exact
    /// integer).
    pub vertex_curvature_twice: Vec<i64>,
    /// Per-edge affine coefficients `(a_e, b_e)`: `kappa_e(x) = a_e + b_e x`.
    pub edge_coefficients: Vec<(f64, f64)>,
    /// Exact integral over the metric graph.
    pub integral: BigRational,
    /// Exact vertex sum (equals the discrete index of the effective space).
    pub vertex_sum: BigRational,
}

impl CurvatureReport {
    pub fn integral_f64(&self) -> f64 {
        rational_to_f64(&self.integral)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    let fnum: f64 = num.to_string().parse().unwrap_or(f64::NAN);
    let fden: f64 = den.to_string().parse().unwrap_or(f64::NAN);
    fnum / fden
}

/// Curvature of the quantum graph: per-edge affine interpolation of the
/// effective discrete curvature, with the hat/tent profile normalised so the
/// edge integral reproduces the vertex sum exactly:
/// `kappa_e(x) = 2 [ ktilde(-e) (1 - x/l_e) / S(-e) + ktilde(+e) (x/l_e) / S(+e) ]`
/// where `S(v) = sum of the lengths at v` (self-loops counted twice).
pub fn curvature_function(p: &MetricProblem) -> Result<CurvatureReport> {
    let g = &p.graph;
    let data = p.data()?;
    // Effective space dimension per vertex by case.
    let dim_eff = |v: usize| -> i64 {
        let dim_g_v = data.ops.basis.dim_at(v) as i64;
        let deg = g.degree(v) as i64;
        match p.case {
            BoundaryCase::Simple | BoundaryCase::Enlarged0 => dim_g_v,
            BoundaryCase::Enlarged0Proj => deg,
            BoundaryCase::Enlarged1 => deg - dim_g_v,
            BoundaryCase::Enlarged1Proj => 0,
        }
    };
    let curvature_twice: Vec<i64> =
        (0..g.vertex_count()).map(|v| 2 * dim_eff(v) - g.degree(v) as i64).collect();

    // S(v) as exact rationals.
    let s_of: Vec<BigRational> = (0..g.vertex_count())
        .map(|v| {
            g.darts_at(v)
                .iter()
                .map(|d| rational_from_f64(g.edge(d.edge).length))
                .fold(BigRational::zero(), |a, b| a + b)
        })
        .collect();

    let two = BigRational::from_integer(BigInt::from(2));
    let kv = |v: usize| {
        BigRational::new(BigInt::from_i64(curvature_twice[v]).unwrap(), BigInt::from(2))
    };

    let mut edge_coefficients = Vec::with_capacity(g.edge_count());
    let mut integral = BigRational::zero();
    for e in g.edges() {
        let l = rational_from_f64(e.length);
        let km = kv(e.src);
        let kp = kv(e.dst);
        // kappa_e(0) and kappa_e(l).
        let at0 = &two * &km / &s_of[e.src];
        let atl = &two * &kp / &s_of[e.dst];
        let a = rational_to_f64(&at0);
        let b = (rational_to_f64(&atl) - a) / e.length;
        edge_coefficients.push((a, b));
        // Exact integral of the affine function over [0, l].
        integral = integral + (at0 + atl) * &l / &two;
    }
    let vertex_sum = BigRational::new(
        BigInt::from_i64(curvature_twice.iter().sum()).unwrap(),
        BigInt::from(2),
    );
    Ok(CurvatureReport { vertex_curvature_twice: curvature_twice, edge_coefficients, integral, vertex_sum })
}

/// Secular matrix of the classical quantum graph `(Gamma, G, L)` at `mu > 0`:
/// each edge carries `a cos(mu x) + b sin(mu x)`; rows are the `G^perp`
/// coordinates of the trace condition and the `G` coordinates of
/// `P (sigma f') + L f = 0`. The matrix is singular exactly when `mu^2` is an
/// eigenvalue. With `oriented` set, the oriented evaluations swap roles.
pub fn secular_matrix(p: &MetricProblem, mu: f64, oriented: bool) -> Result<CMatrix> {
    if !(mu > 0.0) {
        return Err(Error::BadProblem(format!("need mu > 0, got {mu}")));
    }
    let g = &p.graph;
    let data = p.data()?;
    let ne = g.edge_count();
    // Dart-value matrices over the unknowns (a_0..a_{m-1}, b_0..b_{m-1}).
    let mut value = CMatrix::zeros(g.dart_count(), 2 * ne);
    let mut deriv_plain = CMatrix::zeros(g.dart_count(), 2 * ne);
    let mut deriv_signed = CMatrix::zeros(g.dart_count(), 2 * ne);
    let mut value_signed = CMatrix::zeros(g.dart_count(), 2 * ne);
    for e in 0..ne {
        let l = g.edge(e).length;
        let (dm, dp) = g.edge_dart_indices(e);
        let (cos, sin) = ((mu * l).cos(), (mu * l).sin());
        // f(0) = a, f(l) = a cos + b sin
        value[(dm, e)] = cr(1.0);
        value[(dp, e)] = cr(cos);
        value[(dp, ne + e)] = cr(sin);
        // f'(0) = mu b, f'(l) = mu (-a sin + b cos)
        deriv_plain[(dm, ne + e)] = cr(mu);
        deriv_plain[(dp, e)] = cr(-mu * sin);
        deriv_plain[(dp, ne + e)] = cr(mu * cos);
        // Oriented versions carry the dart signs.
        value_signed[(dm, e)] = cr(-1.0);
        value_signed[(dp, e)] = cr(cos);
        value_signed[(dp, ne + e)] = cr(sin);
        deriv_signed[(dm, ne + e)] = cr(-mu);
        deriv_signed[(dp, e)] = cr(-mu * sin);
        deriv_signed[(dp, ne + e)] = cr(mu * cos);
    }
    let (trace_rows, flux_rows, flux_trace) = if oriented {
        (value_signed.clone(), deriv_plain.clone(), value_signed.clone())
    } else {
        (value.clone(), deriv_signed.clone(), value.clone())
    };
    // (1 - P) trace = 0 in G-perp coordinates.
    let top = data.to_perp(&trace_rows);
    // P flux + L trace = 0 in G coordinates.
    let bottom = data.to_g(&flux_rows) + &data.l_full * data.to_g(&flux_trace);
    Ok(vstack(&[top, bottom]))
}

/// Eigenvalues `mu^2` (with multiplicity) of the classical quantum graph
/// `(Gamma, G, L)` located through the secular matrix: a grid scan of the
/// smallest singular value, golden-section refinement of each dip, and a
/// singular-value count at the root. `lambda = 0` is handled exactly by the
/// kernel solver.
pub fn metric_spectrum(
    p: &MetricProblem,
    cfg: &SecularSolverConfig,
) -> Result<Vec<(f64, usize)>> {
    metric_spectrum_inner(p, cfg, false)
}

/// Oriented variant, used for supersymmetry cross-checks on 1-forms.
pub fn metric_spectrum_oriented(
    p: &MetricProblem,
    cfg: &SecularSolverConfig,
) -> Result<Vec<(f64, usize)>> {
    metric_spectrum_inner(p, cfg, true)
}

fn smallest_singular_value(m: &CMatrix) -> (f64, f64) {
    let sv = svd(m).singular_values;
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    (min, max)
}

fn metric_spectrum_inner(
    p: &MetricProblem,
    cfg: &SecularSolverConfig,
    oriented: bool,
) -> Result<Vec<(f64, usize)>> {
    cfg.validate()?;
    let mut out: Vec<(f64, usize)> = Vec::new();

    if !oriented {
        // lambda = 0: eigenfunctions are edgewise constants with
        // trace in G_0 = ker L (the quadratic form forces f' = 0, L f = 0).
        let zero_problem = MetricProblem {
            graph: p.graph.clone(),
            space: p.space.clone(),
            l_blocks: p.l_blocks.clone(),
            case: BoundaryCase::Enlarged1Proj,
        };
        let data = zero_problem.data()?;
        let t = data.trace_matrix(&p.graph);
        let m = vstack(&[data.to_perp(&t), &data.l_sqrt * data.to_g(&t)]);
        let mult = null_space(&m)?.ncols();
        if mult > 0 {
            out.push((0.0, mult));
        }
    }

    let n = cfg.grid_points;
    let h = (cfg.mu_max - cfg.mu_min) / (n - 1) as f64;
    let mus: Vec<f64> = (0..n).map(|i| cfg.mu_min + i as f64 * h).collect();
    let mut smin = Vec::with_capacity(n);
    for &mu in &mus {
        let m = secular_matrix(p, mu, oriented)?;
        let (lo, _hi) = smallest_singular_value(&m);
        smin.push(lo);
    }

    let eval = |mu: f64| -> Result<f64> {
        Ok(smallest_singular_value(&secular_matrix(p, mu, oriented)?).0)
    };

    let mut roots: Vec<(f64, usize)> = Vec::new();
    for i in 1..n - 1 {
        if !(smin[i] <= smin[i - 1] && smin[i] <= smin[i + 1]) {
            continue;
        }
        // Golden-section refinement of the dip over [mu_{i-1}, mu_{i+1}].
        let (mut a, mut b) = (mus[i - 1], mus[i + 1]);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
        let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
        while b - a > cfg.refine_tol {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(x2)?;
            }
        }
        let mu_star = 0.5 * (a + b);
        let m = secular_matrix(p, mu_star, oriented)?;
        let sv = svd(&m).singular_values;
        let smax = sv.first().copied().unwrap_or(0.0).max(1.0);
        let counted: Vec<f64> = sv
            .iter()
            .copied()
            .filter(|&x| x <= cfg.multiplicity_tol * smax)
            .collect();
        let mult = counted.len();
        if mult == 0 {
            continue; // dip did not reach zero: not an eigenvalue
        }
        // Multiplicity-inflation heuristic: at a genuine multiple root every
        // counted singular value sits at the refinement noise floor; a
        // distinct root hiding within the multiplicity tolerance leaves one
        // singular value orders of magnitude above it.
        let floor = counted
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .max(10.0 * cfg.refine_tol * smax);
        let inflated = counted.iter().copied().fold(0.0, f64::max);
        if mult >= 2 && inflated > 100.0 * floor {
            return Err(Error::GridTooCoarse(format!(
                "near-coincident secular roots at mu = {mu_star:.9} \
                 (counted singular values span {floor:.3e}..{inflated:.3e}); \
                 refine the grid or tighten multiplicity_tol"
            )));
        }
        // Merge with a previous root when a neighbouring bracket refined to
        // the same point.
        if let Some(last) = roots.last() {
            if (last.0 - mu_star).abs() <= 100.0 * cfg.refine_tol.max(1e-9) {
                continue;
            }
        }
        roots.push((mu_star, mult));
    }
    out.extend(roots.into_iter().map(|(mu, mult)| (mu * mu, mult)));
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Vertex scattering data at spectral parameter `mu`.
#[derive(Debug, Clone)]
pub struct ScatteringRecord {
    /// `S(mu)` in the `G + G-perp` block coordinates: the first `dim G`
    /// coordinates carry `-(L + i mu)^{-1} (L - i mu)`, the rest `-1`.
    pub s_blocks: CMatrix,
    /// The same operator in dart coordinates on `G^max`.
    pub s_max: CMatrix,
    pub unitarity_residual: f64,
    /// Residual between the `(A, B)` construction and the block closed form.
    pub construction_residual: f64,
}

/// Scattering matrix `S(mu) = -(A + i mu B)^{-1} (A - i mu B)` with
/// `A = diag(L, Id on G-perp)` and `B = diag(Id on G, 0)` in the
/// `G + G-perp` decomposition.
///
/// Note on the `(A, B)` pair: the boundary condition `f-bar in G`,
/// `P (sigma f') + L f-bar = 0` is sometimes written with `A = diag(L, 0)`
/// and `B = P`, but that pair leaves `A + i mu B` singular on `G-perp` and
/// cannot produce the `-1` reflection block. The pair used here encodes the
/// same boundary condition (`G-perp` rows read `f-bar = 0`) and yields the
/// standard block form `diag(-(L + i mu)^{-1} (L - i mu), -1)`, which the
/// construction residual cross-checks.
pub fn scattering_matrix(p: &MetricProblem, mu: f64) -> Result<ScatteringRecord> {
    if !(mu > 0.0) {
        return Err(Error::BadProblem(format!("need mu > 0, got {mu}")));
    }
    let data = p.data()?;
    let dim_g = data.dim_g;
    let dim_p = data.embed_perp.ncols();
    let n = dim_g + dim_p;

    // Closed form: block diag(-(L + i mu)^{-1}(L - i mu), -1).
    let mut s_blocks = CMatrix::zeros(n, n);
    if dim_g > 0 {
        let li = &data.l_full + CMatrix::identity(dim_g, dim_g) * c(0.0, mu);
        let rhs = &data.l_full - CMatrix::identity(dim_g, dim_g) * c(0.0, mu);
        let lu = li.lu();
        let g_block = lu
            .solve(&rhs)
            .ok_or_else(|| Error::BadProblem("L + i mu is singular".into()))?;
        for i in 0..dim_g {
            for j in 0..dim_g {
                s_blocks[(i, j)] = -g_block[(i, j)];
            }
        }
    }
    for i in 0..dim_p {
        s_blocks[(dim_g + i, dim_g + i)] = cr(-1.0);
    }

    // Cross-check through the (A, B) parametrisation.
    let mut a = CMatrix::zeros(n, n);
    let mut b = CMatrix::zeros(n, n);
    for i in 0..dim_g {
        for j in 0..dim_g {
            a[(i, j)] = data.l_full[(i, j)];
        }
        b[(i, i)] = cr(1.0);
    }
    for i in 0..dim_p {
        a[(dim_g + i, dim_g + i)] = cr(1.0);
    }
    let lhs = &a + &b * c(0.0, mu);
    let rhs = &a - &b * c(0.0, mu);
    let s_ab = lhs
        .lu()
        .solve(&rhs)
        .map(|m| -m)
        .ok_or_else(|| Error::BadProblem("A + i mu B is singular".into()))?;
    let construction_residual = max_abs(&(&s_ab - &s_blocks));

    // Dart coordinates.
    let frame = hstack(&data.embed_g, &data.embed_perp);
    let s_max = &frame * &s_blocks * frame.adjoint();

    let unit = s_blocks.adjoint() * &s_blocks - CMatrix::identity(n, n);
    let unitarity_residual = max_abs(&unit);
    Ok(ScatteringRecord { s_blocks, s_max, unitarity_residual, construction_residual })
}

/// Whether `S(mu)` is the same matrix across the given grid (true iff L = 0).
pub fn scattering_mu_independent(p: &MetricProblem, mus: &[f64]) -> Result<bool> {
    let mut first: Option<CMatrix> = None;
    for &mu in mus {
        let rec = scattering_matrix(p, mu)?;
        match &first {
            None => first = Some(rec.s_blocks),
            Some(f) => {
                if max_abs(&(&rec.s_blocks - f)) > 1e-12 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Index stability of the enlarged cases under `L -> t L`, `t` in
/// `{1, 10, 100, 1000}`, with the `t -> infinity` limit identified with the
/// matching simple-case problem.
#[derive(Debug, Clone)]
pub struct LimitCheckRecord {
    /// `(case, indices for each t, limiting simple-case index)`.
    pub rows: Vec<(BoundaryCase, Vec<i64>, i64)>,
    pub all_ok: bool,
}

pub fn l_to_infinity_limit_check(p: &MetricProblem) -> Result<LimitCheckRecord> {
    let data = p.data()?;
    if data.dim_g0 != 0 {
        return Err(Error::BadProblem(
            "limit check needs L invertible on G (ker L = 0)".into(),
        ));
    }
    let g = &p.graph;
    let dual = crate::space::dual_space(&p.space);

    let simple_index = |space: &VertexSpace| -> Result<i64> {
        let q = MetricProblem::with_zero_l(g.clone(), space.clone(), BoundaryCase::Simple)?;
        Ok(metric_kernel(&q)?.metric_index)
    };
    let maximal = make_space(g, &SpaceSpec::Maximal)?;
    let minimal = make_space(g, &SpaceSpec::Minimal)?;

    let mut rows = Vec::new();
    let mut all_ok = true;
    for case in [
        BoundaryCase::Enlarged0,
        BoundaryCase::Enlarged0Proj,
        BoundaryCase::Enlarged1,
        BoundaryCase::Enlarged1Proj,
    ] {
        let mut indices = Vec::new();
        for t in [1.0, 10.0, 100.0, 1000.0] {
            let scaled = MetricProblem {
                graph: g.clone(),
                space: p.space.clone(),
                l_blocks: p.l_blocks.iter().map(|b| b * cr(t)).collect(),
                case,
            };
            indices.push(metric_kernel(&scaled)?.metric_index);
        }
        let limit = match case {
            BoundaryCase::Enlarged0 => simple_index(&p.space)?,
            BoundaryCase::Enlarged0Proj => simple_index(&maximal)?,
            BoundaryCase::Enlarged1 => simple_index(&dual)?,
            BoundaryCase::Enlarged1Proj => simple_index(&minimal)?,
            BoundaryCase::Simple => unreachable!(),
        };
        let ok = indices.iter().all(|&i| i == indices[0]) && indices[0] == limit;
        all_ok &= ok;
        rows.push((case, indices, limit));
    }
    Ok(LimitCheckRecord { rows, all_ok })
}

/// Exact equality check `integral kappa = index`, used by the CLI and the
/// acceptance suite.
pub fn curvature_matches_index(report: &CurvatureReport, index: i64) -> bool {
    let as_rational = BigRational::from_integer(BigInt::from_i64(index).unwrap());
    report.integral == as_rational && (&report.integral - &report.vertex_sum).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::random::{random_dims, random_graph, random_psd_block, random_space, trial_rng};

    fn standard(g: &Graph) -> VertexSpace {
        make_space(g, &SpaceSpec::Standard).unwrap()
    }

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn simple_case_on_c3_standard() {
        let g = Graph::cycle(3);
        let p = MetricProblem::with_zero_l(g.clone(), standard(&g), BoundaryCase::Simple)
            .unwrap();
        let rep = metric_kernel(&p).unwrap();
        assert_eq!(rep.dim_ker_de, 1);
        assert_eq!(rep.dim_ker_de_star, 1);
        assert_eq!(rep.metric_index, 0);
        assert_eq!(rep.discrete_index, 0);
        assert!(rep.phi_bijective);
    }

    #[test]
    fn enlarged0_single_edge_identity_l() {
        let g = Graph::interval(1.0);
        let s = standard(&g);
        let l_blocks = vec![CMatrix::identity(1, 1), CMatrix::identity(1, 1)];
        let p = MetricProblem::new(g, s, l_blocks, BoundaryCase::Enlarged0).unwrap();
        let rep = metric_kernel(&p).unwrap();
        // dim G - |E| = 2 - 1 = 1.
        assert_eq!(rep.metric_index, 1);
        assert_eq!(rep.expected_index, 1);
        assert_eq!(rep.dim_ker_de, 1);
        assert_eq!(rep.dim_ker_de_star, 0);
    }

    #[test]
    fn enlarged1_proj_always_minus_edges() {
        for t in 0..5 {
            let mut rng = trial_rng(61, t);
            let g = random_graph(&mut rng, 5, 8, None);
            let dims = random_dims(&g, &mut rng);
            let s = random_space(&g, &mut rng, &dims).unwrap();
            let basis = space_basis(&g, &s).unwrap();
            let l_blocks: Vec<CMatrix> = (0..g.vertex_count())
                .map(|v| random_psd_block(&mut rng, basis.dim_at(v)))
                .collect();
            let p =
                MetricProblem::new(g.clone(), s, l_blocks, BoundaryCase::Enlarged1Proj)
                    .unwrap();
            let rep = metric_kernel(&p).unwrap();
            assert_eq!(rep.metric_index, -(g.edge_count() as i64));
            assert_eq!(rep.metric_index, rep.discrete_index);
        }
    }

    #[test]
    fn all_cases_match_closed_forms_on_random_problems() {
        for t in 0..6 {
            let mut rng = trial_rng(62, t);
            let g = random_graph(&mut rng, 5, 7, None);
            let dims = random_dims(&g, &mut rng);
            let s = random_space(&g, &mut rng, &dims).unwrap();
            let basis = space_basis(&g, &s).unwrap();
            let l_blocks: Vec<CMatrix> = (0..g.vertex_count())
                .map(|v| random_psd_block(&mut rng, basis.dim_at(v)))
                .collect();
            for case in BoundaryCase::ALL {
                let p = MetricProblem::new(
                    g.clone(),
                    s.clone(),
                    l_blocks.clone(),
                    case,
                )
                .unwrap();
                let rep = metric_kernel(&p).unwrap();
                assert_eq!(rep.metric_index, rep.expected_index, "case {}", case.name());
                assert_eq!(rep.metric_index, rep.discrete_index, "case {}", case.name());
                assert!(rep.phi_bijective);
            }
        }
    }

    #[test]
    fn curvature_on_c3_standard_is_zero() {
        let g = Graph::cycle(3);
        let p = MetricProblem::with_zero_l(g.clone(), standard(&g), BoundaryCase::Simple)
            .unwrap();
        let rep = curvature_function(&p).unwrap();
        for &(a, b) in &rep.edge_coefficients {
            assert_eq!(a, 0.0);
            assert_eq!(b, 0.0);
        }
        assert!(curvature_matches_index(&rep, 0));
    }

    #[test]
    fn curvature_on_k4_standard() {
        let g = Graph::complete(4);
        let p = MetricProblem::with_zero_l(g.clone(), standard(&g), BoundaryCase::Simple)
            .unwrap();
        let rep = curvature_function(&p).unwrap();
        // kappa(v) = 1 - 3/2 = -1/2 per vertex, integral = -2 = 4 - 6.
        assert!(rep.vertex_curvature_twice.iter().all(|&k| k == -1));
        assert!(curvature_matches_index(&rep, -2));
    }

    #[test]
    fn curvature_case5_is_minus_edges() {
        let g = Graph::complete(4);
        let p =
            MetricProblem::with_zero_l(g.clone(), standard(&g), BoundaryCase::Enlarged1Proj)
                .unwrap();
        let rep = curvature_function(&p).unwrap();
        for v in 0..4 {
            assert_eq!(rep.vertex_curvature_twice[v], -(g.degree(v) as i64));
        }
        assert!(curvature_matches_index(&rep, -6));
    }

    #[test]
    fn curvature_exact_for_rational_lengths() {
        let ids: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let g = crate::graph::build_graph(
            &ids,
            &[
                crate::graph::EdgeSpec::with_length("0", "1", 0.5),
                crate::graph::EdgeSpec::with_length("1", "2", 0.25),
                crate::graph::EdgeSpec::with_length("2", "0", 2.75),
            ],
        )
        .unwrap();
        let p = MetricProblem::with_zero_l(g.clone(), standard(&g), BoundaryCase::Simple)
            .unwrap();
        let rep = curvature_function(&p).unwrap();
        assert!(curvature_matches_index(&rep, 0));
    }

    #[test]
    fn secular_dirichlet_interval() {
        let g = Graph::interval(1.0);
        let s = make_space(&g, &SpaceSpec::Minimal).unwrap();
        let p = MetricProblem::with_zero_l(g, s, BoundaryCase::Enlarged1Proj).unwrap();
        let cfg = SecularSolverConfig {
            mu_min: 0.5,
            mu_max: 10.0,
            grid_points: 300,
            ..Default::default()
        };
        let spec = metric_spectrum(&p, &cfg).unwrap();
        let expect = [PI * PI, 4.0 * PI * PI, 9.0 * PI * PI];
        assert_eq!(spec.len(), 3, "{spec:?}");
        for ((lambda, mult), e) in spec.iter().zip(expect.iter()) {
            assert!((lambda - e).abs() <= 1e-8 * e, "{lambda} vs {e}");
            assert_eq!(*mult, 1);
        }
    }

    #[test]
    fn secular_neumann_interval() {
        let g = Graph::interval(1.0);
        let s = standard(&g);
        let p = MetricProblem::with_zero_l(g, s, BoundaryCase::Enlarged1Proj).unwrap();
        let cfg = SecularSolverConfig {
            mu_min: 0.5,
            mu_max: 7.0,
            grid_points: 300,
            ..Default::default()
        };
        let spec = metric_spectrum(&p, &cfg).unwrap();
        assert_eq!(spec[0], (0.0, 1));
        assert!((spec[1].0 - PI * PI).abs() <= 1e-8 * PI * PI);
        assert!((spec[2].0 - 4.0 * PI * PI).abs() <= 4e-8 * PI * PI);
    }

    #[test]
    fn secular_loop_with_multiplicities() {
        let g = Graph::loop_graph(1.0);
        let s = standard(&g);
        let p = MetricProblem::with_zero_l(g, s, BoundaryCase::Enlarged1Proj).unwrap();
        let cfg = SecularSolverConfig {
            mu_min: 0.5,
            mu_max: 14.0,
            grid_points: 500,
            ..Default::default()
        };
        let spec = metric_spectrum(&p, &cfg).unwrap();
        assert_eq!(spec[0], (0.0, 1));
        assert!((spec[1].0 - 4.0 * PI * PI).abs() <= 4e-8 * PI * PI);
        assert_eq!(spec[1].1, 2);
        assert!((spec[2].0 - 16.0 * PI * PI).abs() <= 1.6e-7 * PI * PI);
        assert_eq!(spec[2].1, 2);
    }

    #[test]
    fn susy_pairing_of_metric_spectra() {
        // (Gamma, G, 0) away from 0 agrees with the oriented dual problem.
        let cfg = SecularSolverConfig {
            mu_min: 0.5,
            mu_max: 7.0,
            grid_points: 300,
            ..Default::default()
        };
        for g in [Graph::interval(1.0), Graph::loop_graph(1.0)] {
            let s = standard(&g);
            let p = MetricProblem::with_zero_l(g.clone(), s.clone(), BoundaryCase::Enlarged1Proj)
                .unwrap();
            let spec0 = metric_spectrum(&p, &cfg).unwrap();
            let dual = crate::space::dual_space(&s);
            let q = MetricProblem::with_zero_l(g, dual, BoundaryCase::Enlarged1Proj).unwrap();
            let spec1 = metric_spectrum_oriented(&q, &cfg).unwrap();
            let nz0: Vec<f64> = spec0
                .iter()
                .filter(|(l, _)| *l > 1e-9)
                .flat_map(|&(l, m)| std::iter::repeat(l).take(m))
                .collect();
            let nz1: Vec<f64> = spec1
                .iter()
                .filter(|(l, _)| *l > 1e-9)
                .flat_map(|&(l, m)| std::iter::repeat(l).take(m))
                .collect();
            assert_eq!(nz0.len(), nz1.len());
            for (a, b) in nz0.iter().zip(nz1.iter()) {
                assert!((a - b).abs() <= 1e-8 * a.max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn scattering_with_zero_l_is_plus_minus_identity() {
        let g = Graph::cycle(3);
        let p = MetricProblem::with_zero_l(g, standard(&Graph::cycle(3)), BoundaryCase::Simple)
            .unwrap();
        for mu in [0.1, 1.0, 10.0] {
            let rec = scattering_matrix(&p, mu).unwrap();
            let n = rec.s_blocks.nrows();
            for i in 0..n {
                for j in 0..n {
                    let expect = if i != j {
                        cr(0.0)
                    } else if i < 3 {
                        cr(1.0)
                    } else {
                        cr(-1.0)
                    };
                    assert_eq!(rec.s_blocks[(i, j)], expect, "entry ({i},{j}) at mu={mu}");
                }
            }
            assert!(rec.unitarity_residual <= 1e-10);
        }
        assert!(scattering_mu_independent(&p, &[0.1, 0.7, 2.0, 9.0]).unwrap());
    }

    #[test]
    fn scattering_scalar_example() {
        // L = mu on a 1-dim G: block value -(mu + i mu)^{-1} (mu - i mu) = i.
        let g = Graph::interval(1.0);
        let s = make_space(
            &g,
            &SpaceSpec::Projections(vec![CMatrix::identity(1, 1), CMatrix::zeros(1, 1)]),
        )
        .unwrap();
        let mu = 1.7;
        let p = MetricProblem::new(
            g,
            s,
            vec![CMatrix::identity(1, 1) * cr(mu), CMatrix::zeros(0, 0)],
            BoundaryCase::Simple,
        )
        .unwrap();
        let rec = scattering_matrix(&p, mu).unwrap();
        assert!((rec.s_blocks[(0, 0)] - c(0.0, 1.0)).norm() < 1e-12);
        assert!(!scattering_mu_independent(&p, &[0.5, 1.0, 2.0]).unwrap());
    }

    #[test]
    fn scattering_unitary_on_random_l() {
        for t in 0..5 {
            let mut rng = trial_rng(63, t);
            let g = random_graph(&mut rng, 4, 6, None);
            let dims = random_dims(&g, &mut rng);
            let s = random_space(&g, &mut rng, &dims).unwrap();
            let basis = space_basis(&g, &s).unwrap();
            let l_blocks: Vec<CMatrix> = (0..g.vertex_count())
                .map(|v| random_psd_block(&mut rng, basis.dim_at(v)))
                .collect();
            let p = MetricProblem::new(g, s, l_blocks, BoundaryCase::Simple).unwrap();
            for mu in [0.1, 1.0, 10.0] {
                let rec = scattering_matrix(&p, mu).unwrap();
                assert!(rec.unitarity_residual <= 1e-10, "{}", rec.unitarity_residual);
                assert!(rec.construction_residual <= 1e-10);
                // s_max is unitary too.
                let n = rec.s_max.nrows();
                let resid =
                    max_abs(&(rec.s_max.adjoint() * &rec.s_max - CMatrix::identity(n, n)));
                assert!(resid <= 1e-10);
            }
        }
    }

    #[test]
    fn limit_check_on_c3() {
        let g = Graph::cycle(3);
        let s = standard(&g);
        let l_blocks: Vec<CMatrix> =
            (0..3).map(|_| CMatrix::identity(1, 1) * cr(2.0)).collect();
        let p = MetricProblem::new(g, s, l_blocks, BoundaryCase::Enlarged0).unwrap();
        let rec = l_to_infinity_limit_check(&p).unwrap();
        assert!(rec.all_ok, "{rec:?}");
        for (case, indices, limit) in &rec.rows {
            let expect = match case {
                BoundaryCase::Enlarged0 => 0,
                BoundaryCase::Enlarged0Proj => 3,
                BoundaryCase::Enlarged1 => 0,
                BoundaryCase::Enlarged1Proj => -3,
                BoundaryCase::Simple => unreachable!(),
            };
            assert_eq!(*limit, expect);
            assert!(indices.iter().all(|&i| i == expect));
        }
    }

    #[test]
    fn near_coincident_roots_raise_grid_too_coarse() {
        // Two Dirichlet edges with lengths 1 and 1 - 5e-8: the roots k*pi
        // and k*pi*(1 + 5e-8) are too close for the multiplicity tolerance
        // to separate, so the inflation heuristic must fire instead of
        // reporting a fake multiplicity-2 eigenvalue.
        let ids: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let g = crate::graph::build_graph(
            &ids,
            &[
                crate::graph::EdgeSpec::with_length("0", "1", 1.0),
                crate::graph::EdgeSpec::with_length("1", "2", 1.0 - 5e-8),
            ],
        )
        .unwrap();
        let s = make_space(&g, &SpaceSpec::Minimal).unwrap();
        let p = MetricProblem::with_zero_l(g, s, BoundaryCase::Enlarged1Proj).unwrap();
        let cfg = SecularSolverConfig {
            mu_min: 2.0,
            mu_max: 4.0,
            grid_points: 100,
            ..Default::default()
        };
        match metric_spectrum(&p, &cfg) {
            Err(Error::GridTooCoarse(_)) => {}
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn well_separated_double_edges_resolve() {
        // Same structure but length ratio 1 : 0.8 keeps the roots apart, so
        // the scan resolves pi and pi/0.8 as distinct simple eigenvalues.
        let ids: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let g = crate::graph::build_graph(
            &ids,
            &[
                crate::graph::EdgeSpec::with_length("0", "1", 1.0),
                crate::graph::EdgeSpec::with_length("1", "2", 0.8),
            ],
        )
        .unwrap();
        let s = make_space(&g, &SpaceSpec::Minimal).unwrap();
        let p = MetricProblem::with_zero_l(g, s, BoundaryCase::Enlarged1Proj).unwrap();
        let cfg = SecularSolverConfig {
            mu_min: 2.0,
            mu_max: 4.5,
            grid_points: 200,
            ..Default::default()
        };
        let spec = metric_spectrum(&p, &cfg).unwrap();
        assert_eq!(spec.len(), 2, "{spec:?}");
        assert!((spec[0].0 - PI * PI).abs() <= 1e-8 * PI * PI);
        let expect = (PI / 0.8) * (PI / 0.8);
        assert!((spec[1].0 - expect).abs() <= 1e-8 * expect);
    }
}
