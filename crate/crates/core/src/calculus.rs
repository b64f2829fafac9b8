//! Exterior derivative, Dirac and Laplace operators for a decorated graph,
//! and everything derived from them: cohomology, index, curvature, Hodge
//! decomposition, supersymmetric spectra, the dual-kernel isomorphism and the
//! edge-space embedding.
//!
//! Coordinates. 0-forms live in `G = ⊕_v G_v`; each `G_v` gets an
//! orthonormal basis extracted from its projection, concatenated in vertex
//! order. 1-forms are raw per-edge values with the `1/l_e`-weighted inner
//! product, kept explicit through the diagonal weight matrix rather than
//! pre-orthonormalised. With `B = W^{1/2} d` the 0-form Laplacian is `B* B`
//! and the 1-form Laplacian is similar to `B B*`, which is how spectra and
//! ranks are computed.

use num::rational::BigRational;
use num::{BigInt, FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{cycle_structure, flux, Graph};
use crate::linalg::{
    cr, hermitian_eigen, max_abs, null_space, rank, spectral_norm, CMatrix, CVector,
};
use crate::random::{haar_frame, trial_rng};
use crate::space::{dual_space, make_space, orient_space, SpaceSpec, VertexSpace, TAU_PROJ};

/// Orthonormal bases of the `G_v`, concatenated into `G`-coordinates, plus
/// the isometric embedding of `G` into the dart coordinates of `G^max`.
#[derive(Debug, Clone)]
pub struct SpaceBasis {
    /// Per-vertex orthonormal basis, `deg v` x `dim G_v`.
    pub per_vertex: Vec<CMatrix>,
    /// Offset of each vertex's coordinate block in `G`.
    pub offsets: Vec<usize>,
    pub total_dim: usize,
    /// `2|E|` x `dim G`, orthonormal columns.
    pub embed: CMatrix,
}

impl SpaceBasis {
    pub fn dim_at(&self, v: usize) -> usize {
        self.per_vertex[v].ncols()
    }
}

/// Extracts a deterministic orthonormal basis of the range of a projection:
/// Hermitian eigendecomposition, eigenvalues >= 1/2 select range vectors,
/// ordered by descending eigenvalue with phase-fixed columns. Projections
/// that are exactly trivial get the canonical basis.
fn projection_basis(g: &Graph, v: usize, p: &CMatrix) -> Result<CMatrix> {
    let deg = p.nrows();
    let expected: f64 = p.diagonal().iter().map(|z| z.re).sum();
    let expected = expected.round() as usize;
    if expected == 0 {
        return Ok(CMatrix::zeros(deg, 0));
    }
    if expected == deg && max_abs(&(p - CMatrix::identity(deg, deg))) <= TAU_PROJ {
        return Ok(CMatrix::identity(deg, deg));
    }
    let (values, vectors) = hermitian_eigen(p);
    let kept: Vec<usize> = (0..deg).filter(|&i| values[i] >= 0.5).collect();
    if kept.len() != expected {
        return Err(Error::BadProjection {
            vertex: g.vertex_id(v).to_string(),
            reason: format!(
                "range extraction found {} eigenvalues >= 1/2, trace says {}",
                kept.len(),
                expected
            ),
        });
    }
    let mut basis = CMatrix::zeros(deg, expected);
    // Descending eigenvalue order.
    for (col, &i) in kept.iter().rev().enumerate() {
        basis.set_column(col, &vectors.column(i));
    }
    Ok(basis)
}

pub fn space_basis(g: &Graph, s: &VertexSpace) -> Result<SpaceBasis> {
    let mut per_vertex = Vec::with_capacity(g.vertex_count());
    let mut offsets = Vec::with_capacity(g.vertex_count());
    let mut total = 0usize;
    for v in 0..g.vertex_count() {
        let b = projection_basis(g, v, s.projection(v))?;
        offsets.push(total);
        total += b.ncols();
        per_vertex.push(b);
    }
    let mut embed = CMatrix::zeros(g.dart_count(), total);
    for v in 0..g.vertex_count() {
        let b = &per_vertex[v];
        let dart0 = g.dart_offset(v);
        for k in 0..b.ncols() {
            for i in 0..b.nrows() {
                embed[(dart0 + i, offsets[v] + k)] = b[(i, k)];
            }
        }
    }
    Ok(SpaceBasis { per_vertex, offsets, total_dim: total, embed })
}

/// Assembled exterior derivative and Laplacians of a decorated graph.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    /// `|E|` x `dim G`.
    pub d: CMatrix,
    /// `dim G` x `|E|`; the adjoint w.r.t. the weighted 1-form product,
    /// `d* = d^H W`.
    pub d_star: CMatrix,
    /// `dim G` x `dim G` Hermitian.
    pub lap0: CMatrix,
    /// `|E|` x `|E|`, Hermitian w.r.t. the weights (not entrywise).
    pub lap1: CMatrix,
    /// Diagonal 1-form weights `w_e = 1/l_e`.
    pub edge_weight: Vec<f64>,
    pub basis: SpaceBasis,
    /// Vertex degrees, for curvature bookkeeping.
    pub degrees: Vec<usize>,
}

impl OperatorSet {
    pub fn dim_g(&self) -> usize {
        self.basis.total_dim
    }

    pub fn edge_count(&self) -> usize {
        self.edge_weight.len()
    }

    /// `B = W^{1/2} d`: the derivative expressed into the orthonormalised
    /// 1-form coordinates.
    pub fn weighted_d(&self) -> CMatrix {
        let mut b = self.d.clone();
        for e in 0..self.edge_count() {
            let w = cr(self.edge_weight[e].sqrt());
            for j in 0..b.ncols() {
                b[(e, j)] *= w;
            }
        }
        b
    }

    /// Operator norm of `d` between the weighted spaces.
    pub fn d_norm(&self) -> f64 {
        spectral_norm(&self.weighted_d())
    }

    /// Eigenvalues of the 0-form Laplacian, ascending.
    pub fn lap0_spectrum(&self) -> Vec<f64> {
        let sym = (&self.lap0 + self.lap0.adjoint()) * cr(0.5);
        hermitian_eigen(&sym).0
    }

    /// Eigenvalues of the 1-form Laplacian in the weighted space, ascending.
    pub fn lap1_spectrum(&self) -> Vec<f64> {
        let b = self.weighted_d();
        let m = &b * b.adjoint();
        let sym = (&m + m.adjoint()) * cr(0.5);
        hermitian_eigen(&sym).0
    }

    /// Largest relative defect of `<dF, eta>_w = <F, d* eta>` over seeded
    /// probe vectors.
    pub fn adjointness_residual(&self, trials: usize, seed: u64) -> f64 {
        let mut worst: f64 = 0.0;
        let scale = self.d_norm().max(1.0);
        for t in 0..trials {
            let mut rng = trial_rng(seed, t as u64);
            let f = crate::random::gaussian_matrix(&mut rng, self.dim_g(), 1);
            let eta = crate::random::gaussian_matrix(&mut rng, self.edge_count(), 1);
            let df = &self.d * &f;
            let mut lhs = cr(0.0);
            for e in 0..self.edge_count() {
                lhs += df[(e, 0)].conj() * eta[(e, 0)] * cr(self.edge_weight[e]);
            }
            let dstar_eta = &self.d_star * &eta;
            let mut rhs = cr(0.0);
            for i in 0..self.dim_g() {
                rhs += f[(i, 0)].conj() * dstar_eta[(i, 0)];
            }
            let denom = (f.norm() * eta.norm()).max(1e-300) * scale;
            worst = worst.max((lhs - rhs).norm() / denom);
        }
        worst
    }
}

/// Assembles `d`, `d*` and the two Laplacians for a vertex space.
pub fn assemble(g: &Graph, s: &VertexSpace) -> Result<OperatorSet> {
    if !s.matches_graph(g) {
        return Err(Error::DimensionMismatch(
            "vertex space does not belong to this graph".into(),
        ));
    }
    let basis = space_basis(g, s)?;
    let ne = g.edge_count();
    let mut d = CMatrix::zeros(ne, basis.total_dim);
    for v in 0..g.vertex_count() {
        let b = &basis.per_vertex[v];
        for (i, dart) in g.darts_at(v).iter().enumerate() {
            let sgn = cr(dart.sign.factor());
            for k in 0..b.ncols() {
                d[(dart.edge, basis.offsets[v] + k)] += sgn * b[(i, k)];
            }
        }
    }
    let edge_weight: Vec<f64> = g.edges().iter().map(|e| 1.0 / e.length).collect();
    let mut d_star = d.adjoint();
    for j in 0..ne {
        let w = cr(edge_weight[j]);
        for i in 0..d_star.nrows() {
            d_star[(i, j)] *= w;
        }
    }
    let lap0 = &d_star * &d;
    let lap1 = &d * &d_star;
    let degrees = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    Ok(OperatorSet { d, d_star, lap0, lap1, edge_weight, basis, degrees })
}

/// `kappa = sup_v |P_v [1/l]_v P_v|`: the norm-bound parameter of the
/// exterior derivative (`|d| <= sqrt(2 kappa)`). The compression to `G_v` is
/// the constant that actually appears in the bound: on the standard space it
/// evaluates to `(1/deg v) sum_e 1/l_e`, and for uniform lengths `l_0` it is
/// `1/l_0` for any space with a nonzero block.
pub fn kappa(g: &Graph, s: &VertexSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for v in 0..g.vertex_count() {
        let darts = g.darts_at(v);
        let p = s.projection(v);
        let mut m = p.clone();
        for (j, dart) in darts.iter().enumerate() {
            let w = cr(1.0 / g.edge(dart.edge).length);
            for i in 0..m.nrows() {
                m[(i, j)] *= w;
            }
        }
        worst = worst.max(spectral_norm(&(m * p)));
    }
    worst
}

/// Betti numbers, index, kernel bases and curvature of a decorated graph.
#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub b0: usize,
    pub b1: usize,
    pub index: i64,
    pub dim_g: usize,
    pub edge_count: usize,
    /// Orthonormal kernel basis of `d` in `G`-coordinates.
    pub ker0: CMatrix,
    /// Kernel basis of `d*` in raw 1-form coordinates (orthonormal w.r.t.
    /// the weighted product).
    pub ker1: CMatrix,
    /// Per-vertex curvature `dim G_v - deg v / 2`, stored exactly as twice
    /// its value.
    pub curvature_twice: Vec<i64>,
    pub index_theorem_ok: bool,
    pub gauss_bonnet_ok: bool,
}

impl CohomologyReport {
    pub fn curvature(&self, v: usize) -> f64 {
        self.curvature_twice[v] as f64 / 2.0
    }
}

pub fn cohomology(ops: &OperatorSet) -> Result<CohomologyReport> {
    let b = ops.weighted_d();
    let dim_g = ops.dim_g();
    let ne = ops.edge_count();
    let ker0 = null_space(&b)?;
    let left = null_space(&b.adjoint())?;
    // Raw 1-form coordinates: eta = W^{-1/2} y.
    let mut ker1 = left;
    for e in 0..ne {
        let w = cr(1.0 / ops.edge_weight[e].sqrt());
        for j in 0..ker1.ncols() {
            ker1[(e, j)] *= w;
        }
    }
    let b0 = ker0.ncols();
    let b1 = ker1.ncols();
    let index = b0 as i64 - b1 as i64;
    let curvature_twice: Vec<i64> = (0..ops.degrees.len())
        .map(|v| 2 * ops.basis.dim_at(v) as i64 - ops.degrees[v] as i64)
        .collect();
    let index_theorem_ok = index == dim_g as i64 - ne as i64;
    let gauss_bonnet_ok = curvature_twice.iter().sum::<i64>() == 2 * index;
    Ok(CohomologyReport {
        b0,
        b1,
        index,
        dim_g,
        edge_count: ne,
        ker0,
        ker1,
        curvature_twice,
        index_theorem_ok,
        gauss_bonnet_ok,
    })
}

/// Exact Gauss-Bonnet sum `sum_v (dim G_v - deg v / 2)` as a rational.
pub fn gauss_bonnet_sum(report: &CohomologyReport) -> BigRational {
    let num: i64 = report.curvature_twice.iter().sum();
    BigRational::new(BigInt::from_i64(num).unwrap(), BigInt::from(2))
}

/// Predicted Betti numbers of the magnetic space from prime-cycle fluxes:
/// a component contributes to `b0` iff every flux lies in `2 pi Z`.
pub fn magnetic_cohomology_predict(g: &Graph, alpha: &[f64]) -> Result<(usize, usize)> {
    let cb = cycle_structure(g);
    let mut trivial = vec![true; cb.component_count];
    for cycle in &cb.prime_cycles {
        let f = flux(g, alpha, cycle)?;
        let defect = f - 2.0 * std::f64::consts::PI * (f / (2.0 * std::f64::consts::PI)).round();
        if defect.abs() > 1e-9 {
            let comp = cb.component_of[g.edge(cycle[0].0).src];
            trivial[comp] = false;
        }
    }
    let b0 = trivial.iter().filter(|&&t| t).count();
    let b1 = b0 + g.edge_count() - g.vertex_count();
    Ok((b0, b1))
}

/// Dimensions and orthogonality residuals of the Hodge decomposition
/// `ker D + ran d* + ran d`.
#[derive(Debug, Clone)]
pub struct HodgeReport {
    pub dim_ker_d: usize,
    pub dim_ran_dstar: usize,
    pub dim_ker_dstar: usize,
    pub dim_ran_d: usize,
    pub rank: usize,
    /// Largest cross inner product between `ker d` and `ran d*` (0-forms).
    pub residual0: f64,
    /// Largest weighted cross inner product between `ker d*` and `ran d`.
    pub residual1: f64,
    pub dims_ok: bool,
}

pub fn hodge(ops: &OperatorSet) -> Result<HodgeReport> {
    let b = ops.weighted_d();
    let dec = crate::linalg::svd(&b);
    let r = crate::linalg::rank_from_singular_values(
        &dec.singular_values,
        b.nrows().max(b.ncols()),
    )?;
    let ker0 = null_space(&b)?;
    let ker1w = null_space(&b.adjoint())?;
    // ran d* = row space of B; ran d = column space of B (in W^{1/2} coords).
    let ran_dstar = dec.vt.rows(0, r).adjoint();
    let ran_d = dec.u.columns(0, r).into_owned();
    let residual0 = max_abs(&(ker0.adjoint() * &ran_dstar));
    let residual1 = max_abs(&(ker1w.adjoint() * &ran_d));
    let dims_ok =
        ker0.ncols() + r == ops.dim_g() && ker1w.ncols() + r == ops.edge_count();
    Ok(HodgeReport {
        dim_ker_d: ker0.ncols(),
        dim_ran_dstar: r,
        dim_ker_dstar: ker1w.ncols(),
        dim_ran_d: r,
        rank: r,
        residual0,
        residual1,
        dims_ok,
    })
}

/// Nonzero spectra of the two Laplacians paired by supersymmetry.
#[derive(Debug, Clone)]
pub struct SusyCheck {
    pub spec0: Vec<f64>,
    pub spec1: Vec<f64>,
    /// Matched nonzero eigenvalue pairs `(from Delta_0, from Delta_1)`.
    pub pairs: Vec<(f64, f64)>,
}

/// Checks that the nonzero spectra of the 0- and 1-form Laplacians agree
/// within `tol`, including multiplicity. The two spectra come from
/// independent eigensolves of `B* B` and `B B*`.
pub fn supersymmetry_check(ops: &OperatorSet, tol: f64) -> Result<SusyCheck> {
    let spec0 = ops.lap0_spectrum();
    let spec1 = ops.lap1_spectrum();
    let nz0: Vec<f64> = spec0.iter().copied().filter(|&x| x > tol).collect();
    let nz1: Vec<f64> = spec1.iter().copied().filter(|&x| x > tol).collect();
    let n = nz0.len().max(nz1.len());
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        match (nz0.get(i), nz1.get(i)) {
            (Some(&a), Some(&b)) if (a - b).abs() <= tol => pairs.push((a, b)),
            (a, b) => return Err(Error::SpectraMismatch(a.copied(), b.copied())),
        }
    }
    Ok(SusyCheck { spec0, spec1, pairs })
}

/// Verification record for the kernel isomorphism between the dual space and
/// the oriented space: `b^0(G-perp) = b^1(oriented G)` and vice versa, plus
/// the explicit map `psi(eta) = P-perp { eta_e / l_e }` carried onto a kernel
/// basis.
#[derive(Debug, Clone)]
pub struct DualKernelRecord {
    pub b0_dual: usize,
    pub b1_dual: usize,
    pub b0_oriented: usize,
    pub b1_oriented: usize,
    /// Residual of psi-images inside ker d_{G-perp}.
    pub psi_kernel_residual: f64,
    pub psi_rank: usize,
}

pub fn dual_kernel_iso(g: &Graph, s: &VertexSpace) -> Result<DualKernelRecord> {
    let dual = dual_space(s);
    let oriented = orient_space(g, s);
    let ops_dual = assemble(g, &dual)?;
    let ops_or = assemble(g, &oriented)?;
    let coh_dual = cohomology(&ops_dual)?;
    let coh_or = cohomology(&ops_or)?;
    if coh_dual.b0 != coh_or.b1 || coh_dual.b1 != coh_or.b0 {
        return Err(Error::IsoFailed(format!(
            "Betti mismatch: dual ({}, {}), oriented ({}, {})",
            coh_dual.b0, coh_dual.b1, coh_or.b0, coh_or.b1
        )));
    }
    // psi maps ker d*_{oriented G} into ker d_{G-perp}.
    let ker1 = &coh_or.ker1; // |E| x b1, raw coordinates
    let mut images = CMatrix::zeros(ops_dual.dim_g(), ker1.ncols());
    let mut residual: f64 = 0.0;
    for j in 0..ker1.ncols() {
        let mut dart_vec = CVector::zeros(g.dart_count());
        for e in 0..g.edge_count() {
            let (dm, dp) = g.edge_dart_indices(e);
            let val = ker1[(e, j)] * cr(1.0 / g.edge(e).length);
            dart_vec[dm] = val;
            dart_vec[dp] = val;
        }
        // Project into the dual space blockwise.
        let mut projected = CVector::zeros(g.dart_count());
        for v in 0..g.vertex_count() {
            let off = g.dart_offset(v);
            let deg = g.degree(v);
            let block = dart_vec.rows(off, deg).into_owned();
            let proj = dual.projection(v) * block;
            for i in 0..deg {
                projected[off + i] = proj[i];
            }
        }
        let coords = ops_dual.basis.embed.adjoint() * &projected;
        let defect = (&ops_dual.d * &coords).norm();
        let scale = coords.norm().max(1e-300);
        residual = residual.max(defect / scale);
        images.set_column(j, &coords);
    }
    let psi_rank = if images.ncols() == 0 { 0 } else { rank(&images)? };
    if psi_rank != coh_or.b1 {
        return Err(Error::IsoFailed(format!(
            "psi images have rank {}, expected {}",
            psi_rank, coh_or.b1
        )));
    }
    if residual > 1e-8 {
        return Err(Error::IsoFailed(format!(
            "psi images leave ker d (residual {residual:.3e})"
        )));
    }
    Ok(DualKernelRecord {
        b0_dual: coh_dual.b0,
        b1_dual: coh_dual.b1,
        b0_oriented: coh_or.b0,
        b1_oriented: coh_or.b1,
        psi_kernel_residual: residual,
        psi_rank,
    })
}

/// Verification record for the isometry `iota: l_2(E) -> G^max`,
/// `(iota eta)_e(v) = eta_e / sqrt(2 l_e)`, whose range is `ker d^max`.
#[derive(Debug, Clone)]
pub struct IotaRecord {
    pub gram_residual: f64,
    pub dim_ker_dmax: usize,
    pub edge_count: usize,
    /// Residual of `d^max` applied to the embedded basis.
    pub kernel_residual: f64,
}

impl IotaRecord {
    pub fn ok(&self) -> bool {
        self.gram_residual <= 1e-12
            && self.dim_ker_dmax == self.edge_count
            && self.kernel_residual <= 1e-12
    }
}

pub fn iota_embedding_check(g: &Graph) -> Result<IotaRecord> {
    let ne = g.edge_count();
    let mut iota = CMatrix::zeros(g.dart_count(), ne);
    for e in 0..ne {
        let (dm, dp) = g.edge_dart_indices(e);
        let val = cr(1.0 / (2.0 * g.edge(e).length).sqrt());
        iota[(dm, e)] = val;
        iota[(dp, e)] = val;
    }
    // <iota delta_e, iota delta_f> must equal the weighted Gram <delta_e, delta_f>_w.
    let gram = iota.adjoint() * &iota;
    let mut gram_residual: f64 = 0.0;
    for i in 0..ne {
        for j in 0..ne {
            let expect = if i == j { 1.0 / g.edge(i).length } else { 0.0 };
            gram_residual = gram_residual.max((gram[(i, j)] - cr(expect)).norm());
        }
    }
    let maximal = make_space(g, &SpaceSpec::Maximal)?;
    let ops = assemble(g, &maximal)?;
    let coh = cohomology(&ops)?;
    // iota lands in ker d^max; together with full column rank and the
    // dimension count this pins ran iota = ker d^max.
    let kernel_residual = max_abs(&(&ops.d * ops.basis.embed.adjoint() * &iota));
    Ok(IotaRecord {
        gram_residual,
        dim_ker_dmax: coh.b0,
        edge_count: ne,
        kernel_residual,
    })
}

/// Index stability under deformation of the vertex space at fixed per-vertex
/// dimensions: the model Neumann/Dirichlet space plus Haar-random frames all
/// share the index `sum dims - |E|`.
#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub expected_index: i64,
    pub model_index: i64,
    pub trial_indices: Vec<i64>,
    pub all_ok: bool,
}

pub fn index_stability_fuzz(
    g: &Graph,
    dims: &[usize],
    trials: usize,
    seed: u64,
) -> Result<FuzzReport> {
    if dims.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} dims for {} vertices",
            dims.len(),
            g.vertex_count()
        )));
    }
    for v in 0..g.vertex_count() {
        if dims[v] > g.degree(v) {
            return Err(Error::DimensionMismatch(format!(
                "dims[{v}] = {} exceeds degree {}",
                dims[v],
                g.degree(v)
            )));
        }
    }
    let expected = dims.iter().sum::<usize>() as i64 - g.edge_count() as i64;

    // Model space: first dims[v] coordinates Neumann, the rest Dirichlet.
    let model_projections: Vec<CMatrix> = (0..g.vertex_count())
        .map(|v| {
            CMatrix::from_fn(g.degree(v), g.degree(v), |i, j| {
                if i == j && i < dims[v] {
                    cr(1.0)
                } else {
                    cr(0.0)
                }
            })
        })
        .collect();
    let model = make_space(g, &SpaceSpec::Projections(model_projections))?;
    let model_index = cohomology(&assemble(g, &model)?)?.index;

    let mut trial_indices = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let ps: Vec<CMatrix> = (0..g.vertex_count())
            .map(|v| {
                let q = haar_frame(&mut rng, g.degree(v), dims[v]);
                &q * q.adjoint()
            })
            .collect();
        let s = make_space(g, &SpaceSpec::Projections(ps))?;
        trial_indices.push(cohomology(&assemble(g, &s)?)?.index);
    }
    let all_ok =
        model_index == expected && trial_indices.iter().all(|&i| i == expected);
    Ok(FuzzReport { expected_index: expected, model_index, trial_indices, all_ok })
}

/// Exact rational integral bookkeeping for Gauss-Bonnet checks: turns an
/// `f64` length into the exact binary rational it represents.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}
