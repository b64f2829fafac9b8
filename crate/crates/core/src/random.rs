//! Seeded randomness for fuzzing and property tests.
//!
//! Every consumer derives an independent ChaCha stream from a master seed, so
//! batches are reproducible and trials are independent of evaluation order.

use nalgebra::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::graph::{build_graph, EdgeSpec, Graph};
use crate::linalg::{cr, CMatrix};
use crate::space::{make_space, SpaceSpec, VertexSpace};

/// RNG for trial `stream` of a batch with the given master seed.
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream.into());
    rng
}

fn gaussian(rng: &mut ChaCha12Rng) -> Complex<f64> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im)
}

pub fn gaussian_matrix(rng: &mut ChaCha12Rng, nrows: usize, ncols: usize) -> CMatrix {
    CMatrix::from_fn(nrows, ncols, |_, _| gaussian(rng))
}

/// Haar-random orthonormal frame: `dim` orthonormal columns in `C^deg`.
pub fn haar_frame(rng: &mut ChaCha12Rng, deg: usize, dim: usize) -> CMatrix {
    assert!(dim <= deg);
    if dim == 0 {
        return CMatrix::zeros(deg, 0);
    }
    let g = gaussian_matrix(rng, deg, dim);
    let qr = g.qr();
    let q = qr.q();
    q.columns(0, dim).into_owned()
}

/// Random rank-`dim` orthogonal projection on `C^deg`.
pub fn random_projection(rng: &mut ChaCha12Rng, deg: usize, dim: usize) -> CMatrix {
    let q = haar_frame(rng, deg, dim);
    &q * q.adjoint()
}

/// Random vertex space with prescribed per-vertex dimensions.
pub fn random_space(g: &Graph, rng: &mut ChaCha12Rng, dims: &[usize]) -> Result<VertexSpace> {
    let ps: Vec<CMatrix> = (0..g.vertex_count())
        .map(|v| random_projection(rng, g.degree(v), dims[v]))
        .collect();
    make_space(g, &SpaceSpec::Projections(ps))
}

/// Random per-vertex dimensions `0 <= dims[v] <= deg v`.
pub fn random_dims(g: &Graph, rng: &mut ChaCha12Rng) -> Vec<usize> {
    (0..g.vertex_count()).map(|v| rng.random_range(0..=g.degree(v))).collect()
}

/// Random connected multigraph without isolated vertices: a random spanning
/// chain plus extra edges (self-loops and multi-edges allowed). Lengths are
/// drawn from `length_range` when given, otherwise 1.
pub fn random_graph(
    rng: &mut ChaCha12Rng,
    max_vertices: usize,
    max_edges: usize,
    length_range: Option<(f64, f64)>,
) -> Graph {
    let nv = rng.random_range(2..=max_vertices.max(2));
    let min_edges = nv - 1;
    let ne = rng.random_range(min_edges..=max_edges.max(min_edges));
    let ids: Vec<String> = (0..nv).map(|i| i.to_string()).collect();
    let length = |rng: &mut ChaCha12Rng| match length_range {
        Some((lo, hi)) => Some(rng.random_range(lo..hi)),
        None => None,
    };
    let mut specs = Vec::with_capacity(ne);
    // Spanning chain over a random vertex order keeps everyone non-isolated.
    let mut order: Vec<usize> = (0..nv).collect();
    for i in (1..nv).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for w in order.windows(2) {
        specs.push(EdgeSpec {
            src: ids[w[0]].clone(),
            dst: ids[w[1]].clone(),
            length: length(rng),
        });
    }
    for _ in min_edges..ne {
        let a = rng.random_range(0..nv);
        let b = rng.random_range(0..nv);
        specs.push(EdgeSpec { src: ids[a].clone(), dst: ids[b].clone(), length: length(rng) });
    }
    build_graph(&ids, &specs).expect("random graph construction is valid")
}

/// Random positive semi-definite block of the given size with rank drawn
/// uniformly from `0..=dim`, so kernels of `L` are exercised. Nonzero
/// eigenvalues are kept in `[1/2, 2]`, leaving the rank decision
/// unambiguous.
pub fn random_psd_block(rng: &mut ChaCha12Rng, dim: usize) -> CMatrix {
    if dim == 0 {
        return CMatrix::zeros(0, 0);
    }
    let rank = rng.random_range(0..=dim);
    if rank == 0 {
        return CMatrix::zeros(dim, dim);
    }
    let q = haar_frame(rng, dim, rank);
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..rank {
        let lambda = cr(rng.random_range(0.5..2.0));
        let col = q.column(k);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += col[i] * col[j].conj() * lambda;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn haar_frame_is_orthonormal() {
        let mut rng = trial_rng(1, 0);
        let q = haar_frame(&mut rng, 5, 3);
        let gram = q.adjoint() * &q;
        assert!(max_abs(&(&gram - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn random_graph_has_no_isolated_vertex() {
        for t in 0..20 {
            let mut rng = trial_rng(2, t);
            let g = random_graph(&mut rng, 8, 14, None);
            for v in 0..g.vertex_count() {
                assert!(g.degree(v) >= 1);
            }
            let total: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
            assert_eq!(total, 2 * g.edge_count());
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let a = random_graph(&mut trial_rng(3, 4), 8, 14, Some((0.1, 10.0)));
        let b = random_graph(&mut trial_rng(3, 4), 8, 14, Some((0.1, 10.0)));
        assert_eq!(a.vertex_count(), b.vertex_count());
        assert_eq!(a.edges().len(), b.edges().len());
        for (x, y) in a.edges().iter().zip(b.edges().iter()) {
            assert_eq!(x.src, y.src);
            assert_eq!(x.dst, y.dst);
            assert_eq!(x.length, y.length);
        }
    }
}
