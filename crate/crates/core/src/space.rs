//! Vertex spaces: the per-vertex subspace decoration `G_v <= C^{E_v}`.
//!
//! A vertex space is stored as one orthogonal projection per vertex in the
//! dart coordinates of the graph. Construction covers the named families
//! (minimal/Dirichlet, maximal/Neumann, standard, oriented standard, sum,
//! oriented sum, magnetic) plus custom decorations given as explicit
//! projections or orthonormal bases. Duality (`P -> 1 - P`) and orientation
//! switching (`P -> T P T` with `T` the dart-sign involution) are exact
//! matrix-level involutions.


use crate::error::{Error, Result};
use crate::graph::{Graph, Sign};
use crate::linalg::{c, cr, hermitian_eigen, spectral_norm, CMatrix, CVector};

/// Validation tolerance for projections, relative to the spectral norm.
pub const TAU_PROJ: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Minimal,
    Maximal,
    Standard,
    OrientedStandard,
    Sum,
    OrientedSum,
    Magnetic,
    Custom,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Minimal => "minimal",
            SpaceKind::Maximal => "maximal",
            SpaceKind::Standard => "standard",
            SpaceKind::OrientedStandard => "oriented_standard",
            SpaceKind::Sum => "sum",
            SpaceKind::OrientedSum => "oriented_sum",
            SpaceKind::Magnetic => "magnetic",
            SpaceKind::Custom => "custom",
        }
    }
}

/// Construction request for [`make_space`].
#[derive(Debug, Clone)]
pub enum SpaceSpec {
    Minimal,
    Maximal,
    Standard,
    OrientedStandard,
    Sum,
    OrientedSum,
    /// Magnetic space for an edge potential `alpha` (one entry per edge).
    Magnetic { alpha: Vec<f64> },
    /// Explicit projections, one per vertex in vertex order.
    Projections(Vec<CMatrix>),
    /// Orthonormal basis vectors per vertex; the projection is the sum of
    /// the rank-one projectors.
    Bases(Vec<Vec<CVector>>),
}

#[derive(Debug, Clone)]
pub struct VertexSpace {
    kind: SpaceKind,
    projections: Vec<CMatrix>,
    alpha: Option<Vec<f64>>,
    graph_digest: u64,
}

impl VertexSpace {
    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn projection(&self, v: usize) -> &CMatrix {
        &self.projections[v]
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    pub fn alpha(&self) -> Option<&[f64]> {
        self.alpha.as_deref()
    }

    pub fn graph_digest(&self) -> u64 {
        self.graph_digest
    }

    /// `dim G_v`, as the rounded trace of the projection.
    pub fn dim_at(&self, v: usize) -> usize {
        let tr: f64 = self.projections[v].diagonal().iter().map(|z| z.re).sum();
        tr.round() as usize
    }

    /// `dim G = sum_v dim G_v`.
    pub fn total_dim(&self) -> usize {
        (0..self.projections.len()).map(|v| self.dim_at(v)).sum()
    }

    pub fn matches_graph(&self, g: &Graph) -> bool {
        self.graph_digest == g.digest()
            && self.projections.len() == g.vertex_count()
            && (0..g.vertex_count()).all(|v| self.projections[v].nrows() == g.degree(v))
    }
}

fn all_ones_projection(deg: usize) -> CMatrix {
    CMatrix::from_element(deg, deg, cr(1.0 / deg as f64))
}

/// Dart-sign vector `(sigma 1)(v)` as a diagonal involution on `C^{E_v}`.
fn sign_diagonal(g: &Graph, v: usize) -> CMatrix {
    let darts = g.darts_at(v);
    CMatrix::from_fn(darts.len(), darts.len(), |i, j| {
        if i == j {
            cr(darts[i].sign.factor())
        } else {
            cr(0.0)
        }
    })
}

fn rank_one_projection(p: &CVector) -> CMatrix {
    let nsq = p.norm_squared();
    (p * p.adjoint()) / cr(nsq)
}

fn validate_projection(g: &Graph, v: usize, m: &CMatrix) -> Result<()> {
    let deg = g.degree(v);
    if m.nrows() != deg || m.ncols() != deg {
        return Err(Error::DimensionMismatch(format!(
            "projection at vertex `{}` is {}x{}, degree is {}",
            g.vertex_id(v),
            m.nrows(),
            m.ncols(),
            deg
        )));
    }
    let norm = spectral_norm(m);
    let tol = TAU_PROJ * norm.max(1.0);
    let herm = crate::linalg::max_abs(&(m - m.adjoint()));
    if herm > tol {
        return Err(Error::BadProjection {
            vertex: g.vertex_id(v).to_string(),
            reason: format!("not Hermitian (residual {herm:.3e})"),
        });
    }
    let idem = crate::linalg::max_abs(&(m * m - m));
    if idem > tol {
        return Err(Error::BadProjection {
            vertex: g.vertex_id(v).to_string(),
            reason: format!("not idempotent (residual {idem:.3e})"),
        });
    }
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    if (tr - tr.round()).abs() > tol.max(TAU_PROJ) {
        return Err(Error::BadProjection {
            vertex: g.vertex_id(v).to_string(),
            reason: format!("trace {tr} is not close to an integer"),
        });
    }
    Ok(())
}

/// Builds a vertex space on `g`. Custom input is validated, not repaired.
pub fn make_space(g: &Graph, spec: &SpaceSpec) -> Result<VertexSpace> {
    let n = g.vertex_count();
    let (kind, alpha, projections) = match spec {
        SpaceSpec::Minimal => {
            let ps = (0..n).map(|v| CMatrix::zeros(g.degree(v), g.degree(v))).collect();
            (SpaceKind::Minimal, None, ps)
        }
        SpaceSpec::Maximal => {
            let ps = (0..n).map(|v| CMatrix::identity(g.degree(v), g.degree(v))).collect();
            (SpaceKind::Maximal, None, ps)
        }
        SpaceSpec::Standard => {
            let ps = (0..n).map(|v| all_ones_projection(g.degree(v))).collect();
            (SpaceKind::Standard, None, ps)
        }
        SpaceSpec::OrientedStandard => {
            let ps = (0..n)
                .map(|v| {
                    let t = sign_diagonal(g, v);
                    &t * all_ones_projection(g.degree(v)) * &t
                })
                .collect();
            (SpaceKind::OrientedStandard, None, ps)
        }
        SpaceSpec::Sum => {
            let ps = (0..n)
                .map(|v| {
                    CMatrix::identity(g.degree(v), g.degree(v)) - all_ones_projection(g.degree(v))
                })
                .collect();
            (SpaceKind::Sum, None, ps)
        }
        SpaceSpec::OrientedSum => {
            let ps = (0..n)
                .map(|v| {
                    let t = sign_diagonal(g, v);
                    CMatrix::identity(g.degree(v), g.degree(v))
                        - &t * all_ones_projection(g.degree(v)) * &t
                })
                .collect();
            (SpaceKind::OrientedSum, None, ps)
        }
        SpaceSpec::Magnetic { alpha } => {
            if alpha.len() != g.edge_count() {
                return Err(Error::DimensionMismatch(format!(
                    "magnetic potential has {} entries for {} edges",
                    alpha.len(),
                    g.edge_count()
                )));
            }
            let ps = (0..n)
                .map(|v| {
                    // Generator p_e(v) = exp(-i (sigma alpha)_e(v) / 2), one
                    // coordinate per dart.
                    let darts = g.darts_at(v);
                    let p = CVector::from_fn(darts.len(), |i, _| {
                        let d = darts[i];
                        let signed = match d.sign {
                            Sign::Plus => alpha[d.edge],
                            Sign::Minus => -alpha[d.edge],
                        };
                        c(0.0, -signed / 2.0).exp()
                    });
                    rank_one_projection(&p)
                })
                .collect();
            (SpaceKind::Magnetic, Some(alpha.clone()), ps)
        }
        SpaceSpec::Projections(ps) => {
            if ps.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} projections given for {} vertices",
                    ps.len(),
                    n
                )));
            }
            (SpaceKind::Custom, None, ps.clone())
        }
        SpaceSpec::Bases(bases) => {
            if bases.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} basis lists given for {} vertices",
                    bases.len(),
                    n
                )));
            }
            let mut ps = Vec::with_capacity(n);
            for (v, vecs) in bases.iter().enumerate() {
                let deg = g.degree(v);
                let mut p = CMatrix::zeros(deg, deg);
                for b in vecs {
                    if b.len() != deg {
                        return Err(Error::DimensionMismatch(format!(
                            "basis vector at vertex `{}` has {} entries, degree is {}",
                            g.vertex_id(v),
                            b.len(),
                            deg
                        )));
                    }
                    p += b * b.adjoint();
                }
                ps.push(p);
            }
            (SpaceKind::Custom, None, ps)
        }
    };
    for (v, p) in projections.iter().enumerate() {
        validate_projection(g, v, p)?;
    }
    Ok(VertexSpace { kind, projections, alpha, graph_digest: g.digest() })
}

/// Dual vertex space: projections `1 - P_v`.
pub fn dual_space(s: &VertexSpace) -> VertexSpace {
    let projections = s
        .projections
        .iter()
        .map(|p| CMatrix::identity(p.nrows(), p.ncols()) - p)
        .collect();
    let kind = match s.kind {
        SpaceKind::Minimal => SpaceKind::Maximal,
        SpaceKind::Maximal => SpaceKind::Minimal,
        SpaceKind::Standard => SpaceKind::Sum,
        SpaceKind::Sum => SpaceKind::Standard,
        SpaceKind::OrientedStandard => SpaceKind::OrientedSum,
        SpaceKind::OrientedSum => SpaceKind::OrientedStandard,
        SpaceKind::Magnetic | SpaceKind::Custom => SpaceKind::Custom,
    };
    VertexSpace { kind, projections, alpha: None, graph_digest: s.graph_digest }
}

/// Orientation switch: projections `T_v P_v T_v` with `T_v = diag(dart signs)`.
pub fn orient_space(g: &Graph, s: &VertexSpace) -> VertexSpace {
    let projections = (0..g.vertex_count())
        .map(|v| {
            let t = sign_diagonal(g, v);
            &t * &s.projections[v] * &t
        })
        .collect();
    let kind = match s.kind {
        SpaceKind::Minimal => SpaceKind::Minimal,
        SpaceKind::Maximal => SpaceKind::Maximal,
        SpaceKind::Standard => SpaceKind::OrientedStandard,
        SpaceKind::OrientedStandard => SpaceKind::Standard,
        SpaceKind::Sum => SpaceKind::OrientedSum,
        SpaceKind::OrientedSum => SpaceKind::Sum,
        SpaceKind::Magnetic | SpaceKind::Custom => SpaceKind::Custom,
    };
    VertexSpace { kind, projections, alpha: None, graph_digest: s.graph_digest }
}

/// Interaction structure of a vertex space: the matrices
/// `p_{e1,e2}(v) = <delta_{e1}, P_v delta_{e2}>` and the finest partition of
/// the darts at each vertex into mutually decoupled blocks.
#[derive(Debug, Clone)]
pub struct InteractionProfile {
    pub per_vertex: Vec<VertexInteraction>,
}

#[derive(Debug, Clone)]
pub struct VertexInteraction {
    /// The interaction matrix (equals the projection in dart coordinates).
    pub matrix: CMatrix,
    /// Partition of the local dart indices into decoupling blocks, each block
    /// sorted, blocks ordered by their smallest dart.
    pub blocks: Vec<Vec<usize>>,
    pub completely_interacting: bool,
}

pub fn interaction_profile(s: &VertexSpace) -> InteractionProfile {
    let per_vertex = s
        .projections
        .iter()
        .map(|p| {
            let deg = p.nrows();
            let scale = spectral_norm(p).max(1.0);
            // Union-find over darts with |p_{e1,e2}| above tolerance.
            let mut root: Vec<usize> = (0..deg).collect();
            fn find(root: &mut Vec<usize>, i: usize) -> usize {
                if root[i] != i {
                    let r = find(root, root[i]);
                    root[i] = r;
                }
                root[i]
            }
            let mut interacting_pairs = 0usize;
            for i in 0..deg {
                for j in (i + 1)..deg {
                    if p[(i, j)].norm() > TAU_PROJ * scale {
                        interacting_pairs += 1;
                        let (a, b) = (find(&mut root, i), find(&mut root, j));
                        if a != b {
                            root[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            let mut block_of = vec![usize::MAX; deg];
            for i in 0..deg {
                let r = find(&mut root, i);
                if block_of[r] == usize::MAX {
                    block_of[r] = blocks.len();
                    blocks.push(Vec::new());
                }
                blocks[block_of[r]].push(i);
            }
            let completely_interacting = deg < 2 || interacting_pairs == deg * (deg - 1) / 2;
            VertexInteraction { matrix: p.clone(), blocks, completely_interacting }
        })
        .collect();
    InteractionProfile { per_vertex }
}

/// The unitary reduction of a continuous vertex space to scalar vertex
/// values: per vertex the generator `p(v)` with `|p(v)|^2 = deg v`, phase
/// fixed so the first non-negligible coordinate is real positive.
#[derive(Debug, Clone)]
pub struct ContinuousReduction {
    /// Generator per vertex, one coordinate per dart.
    pub p: Vec<CVector>,
    /// Whether the rank-one reconstruction `p p* / deg` matched every
    /// projection within tolerance.
    pub weights_ok: bool,
}

impl ContinuousReduction {
    /// Coefficient `p_e(v)` addressed by edge and endpoint sign.
    pub fn coefficient(&self, g: &Graph, v: usize, edge: usize, sign: Sign) -> crate::linalg::C64 {
        let darts = g.darts_at(v);
        let i = darts
            .iter()
            .position(|d| d.edge == edge && d.sign == sign)
            .expect("dart exists at vertex");
        self.p[v][i]
    }

    /// Transformed exterior derivative on scalar vertex values:
    /// `(d F)_e = p_e(+e) F(+e) - p_e(-e) F(-e)`, an `|E| x |V|` matrix.
    pub fn reduced_d(&self, g: &Graph) -> CMatrix {
        let mut d = CMatrix::zeros(g.edge_count(), g.vertex_count());
        for e in g.edges() {
            d[(e.id, e.dst)] += self.coefficient(g, e.dst, e.id, Sign::Plus);
            d[(e.id, e.src)] -= self.coefficient(g, e.src, e.id, Sign::Minus);
        }
        d
    }

    /// Transformed 0-form Laplacian on scalar vertex values (entries in the
    /// raw `F(v)` coordinates, self-adjoint w.r.t. the `deg v` weights):
    /// `W_V^{-1} d* W_E d` with `W_E = diag(1/l_e)`.
    pub fn reduced_lap0(&self, g: &Graph) -> CMatrix {
        let d = self.reduced_d(g);
        let we = CMatrix::from_fn(g.edge_count(), g.edge_count(), |i, j| {
            if i == j { cr(1.0 / g.edge(i).length) } else { cr(0.0) }
        });
        let wv_inv = CMatrix::from_fn(g.vertex_count(), g.vertex_count(), |i, j| {
            if i == j { cr(1.0 / g.degree(i) as f64) } else { cr(0.0) }
        });
        wv_inv * d.adjoint() * we * d
    }

    /// Eigenvalues of the reduced 0-form Laplacian in the weighted space,
    /// ascending. Computed from the similar Hermitian matrix
    /// `W^{1/2} lap W^{-1/2}`.
    pub fn reduced_lap0_spectrum(&self, g: &Graph) -> Vec<f64> {
        let lap = self.reduced_lap0(g);
        let n = g.vertex_count();
        let w_half = CMatrix::from_fn(n, n, |i, j| {
            if i == j { cr((g.degree(i) as f64).sqrt()) } else { cr(0.0) }
        });
        let w_half_inv = CMatrix::from_fn(n, n, |i, j| {
            if i == j { cr(1.0 / (g.degree(i) as f64).sqrt()) } else { cr(0.0) }
        });
        let sym = &w_half * lap * &w_half_inv;
        // Symmetrise away the last bits of floating noise.
        let sym = (&sym + sym.adjoint()) * cr(0.5);
        hermitian_eigen(&sym).0
    }
}

/// Reduction of the standard space with its canonical generator `(1,...,1)`.
pub fn standard_reduction(g: &Graph) -> ContinuousReduction {
    let p = (0..g.vertex_count())
        .map(|v| CVector::from_element(g.degree(v), cr(1.0)))
        .collect();
    ContinuousReduction { p, weights_ok: true }
}

/// Reduction of the oriented standard space with its canonical generator,
/// the dart-sign vector. The generic [`continuous_reduction`] fixes phases
/// per vertex and may return the negative of this generator; the canonical
/// choice is what the entrywise operator identities are stated with.
pub fn oriented_standard_reduction(g: &Graph) -> ContinuousReduction {
    let p = (0..g.vertex_count())
        .map(|v| {
            let darts = g.darts_at(v);
            CVector::from_fn(darts.len(), |i, _| cr(darts[i].sign.factor()))
        })
        .collect();
    ContinuousReduction { p, weights_ok: true }
}

/// Extracts the reduction of a continuous vertex space (`dim G_v = 1`,
/// completely interacting) to `l_2(V)` with weight `deg v`.
pub fn continuous_reduction(g: &Graph, s: &VertexSpace) -> Result<ContinuousReduction> {
    let mut p = Vec::with_capacity(g.vertex_count());
    let mut weights_ok = true;
    for v in 0..g.vertex_count() {
        let proj = &s.projections[v];
        let deg = g.degree(v) as f64;
        if s.dim_at(v) != 1 {
            return Err(Error::NotContinuous {
                vertex: g.vertex_id(v).to_string(),
                reason: format!("dim G_v = {}, need 1", s.dim_at(v)),
            });
        }
        let (values, vectors) = hermitian_eigen(proj);
        // Top eigenvector generates the 1-dimensional range.
        let top = values.len() - 1;
        if values[top] < 0.5 {
            return Err(Error::NotContinuous {
                vertex: g.vertex_id(v).to_string(),
                reason: "projection has no eigenvalue near 1".into(),
            });
        }
        let mut gen: CVector = vectors.column(top).into_owned();
        // Scale |p(v)|^2 = deg v; phase was fixed by hermitian_eigen.
        gen *= cr(deg.sqrt());
        let max = gen.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if let Some(i) = gen.iter().position(|z| z.norm() <= TAU_PROJ * max.max(1.0)) {
            let dart = g.darts_at(v)[i];
            return Err(Error::NotContinuous {
                vertex: g.vertex_id(v).to_string(),
                reason: format!("coefficient p_e(v) vanishes at edge {}", dart.edge),
            });
        }
        let recon = rank_one_projection(&gen);
        if crate::linalg::max_abs(&(&recon - proj)) > 1e-8 {
            weights_ok = false;
        }
        p.push(gen);
    }
    Ok(ContinuousReduction { p, weights_ok })
}

/// Result of testing a projection for invariance under permutations of the
/// local coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationInvariance {
    Maximal,
    Minimal,
    Standard,
    Sum,
    None,
}

/// Tests `P_v` for invariance under all adjacent transpositions of the dart
/// coordinates and classifies the invariant cases.
pub fn classify_permutation_invariance(
    g: &Graph,
    v: usize,
    p: &CMatrix,
) -> PermutationInvariance {
    let deg = g.degree(v);
    if p.nrows() != deg || p.ncols() != deg {
        return PermutationInvariance::None;
    }
    let scale = spectral_norm(p).max(1.0);
    let tol = TAU_PROJ * scale;
    for i in 0..deg.saturating_sub(1) {
        let mut swapped = p.clone();
        swapped.swap_rows(i, i + 1);
        swapped.swap_columns(i, i + 1);
        if crate::linalg::max_abs(&(&swapped - p)) > tol {
            return PermutationInvariance::None;
        }
    }
    let id = CMatrix::identity(deg, deg);
    let ones = all_ones_projection(deg);
    if crate::linalg::max_abs(p) <= tol {
        PermutationInvariance::Minimal
    } else if crate::linalg::max_abs(&(p - &id)) <= tol {
        PermutationInvariance::Maximal
    } else if crate::linalg::max_abs(&(p - &ones)) <= tol {
        PermutationInvariance::Standard
    } else if crate::linalg::max_abs(&(p - (&id - &ones))) <= tol {
        PermutationInvariance::Sum
    } else {
        PermutationInvariance::None
    }
}
