//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything in the crate works with small dense matrices over `Complex<f64>`;
//! nalgebra's Hermitian eigendecomposition and SVD do the heavy lifting. The
//! wrappers here add the two things nalgebra does not give us out of the box:
//! empty-matrix safety (nalgebra panics on 0-dimensional SVD inputs) and rank
//! decisions with an explicit gray zone instead of a silent guess.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative rank tolerance: a singular value counts as zero when it is below
/// `TAU_RANK * sigma_max * max(nrows, ncols)`.
pub const TAU_RANK: f64 = 1e-10;

/// Gray-zone factor around the rank cutoff; singular values within a factor
/// 100 of the cutoff trigger [`Error::RankAmbiguous`] instead of a guess.
pub const RANK_GRAY_ZONE: f64 = 100.0;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending, each
/// eigenvector phase-fixed so its first non-negligible coordinate is real
/// and positive. Safe on 0x0 input.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v: CVector = eig.eigenvectors.column(i).into_owned();
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

/// Multiplies a vector by a unit phase so that its first coordinate of
/// non-negligible modulus becomes real and positive.
pub fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let lead = v.iter().find(|z| z.norm() > 1e-12 * max);
    if let Some(&z) = lead {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Thin SVD of an arbitrary rectangular matrix, singular values descending.
/// `u` is nrows x k, `vt` is k x ncols with k = min(nrows, ncols).
/// Safe on empty input.
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub vt: CMatrix,
}

/// SVD through the Hermitian eigendecomposition of the augmented matrix
/// `[[0, A^H], [A, 0]]`, whose eigenpairs at `+sigma` are `(v; u)/sqrt(2)`.
/// The tridiagonal eigensolver pairs degenerate singular values correctly,
/// which the direct bidiagonal SVD does not always manage for the highly
/// structured matrices assembled here.
pub fn svd(m: &CMatrix) -> Svd {
    let (nr, nc) = m.shape();
    let k = nr.min(nc);
    if k == 0 {
        return Svd {
            u: CMatrix::zeros(nr, 0),
            singular_values: Vec::new(),
            vt: CMatrix::zeros(0, nc),
        };
    }
    let n = nr + nc;
    let mut h = CMatrix::zeros(n, n);
    for i in 0..nr {
        for j in 0..nc {
            h[(nc + i, j)] = m[(i, j)];
            h[(j, nc + i)] = m[(i, j)].conj();
        }
    }
    let (values, vectors) = hermitian_eigen(&h);
    let sigma_max = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    // Eigenvalues come in +/- sigma pairs; a pair counts as usable when it is
    // clearly away from the zero cluster.
    let split = 1e-13 * sigma_max * n as f64;

    let mut u = CMatrix::zeros(nr, k);
    let mut vt = CMatrix::zeros(k, nc);
    let mut singular_values = Vec::with_capacity(k);
    let mut filled = 0usize;
    for i in (0..n).rev() {
        if filled == k || values[i] <= split {
            break;
        }
        let w = vectors.column(i);
        let mut v = CVector::from_fn(nc, |r, _| w[r]);
        let mut uu = CVector::from_fn(nr, |r, _| w[nc + r]);
        let (nv, nu) = (v.norm(), uu.norm());
        if nv == 0.0 || nu == 0.0 {
            continue;
        }
        v /= cr(nv);
        uu /= cr(nu);
        fix_phase(&mut v);
        // Keep the pairing A v = sigma u: rescale u by the phase moved onto v.
        let av = m * &v;
        let proj = uu.dotc(&av);
        if proj.norm() > 0.0 {
            uu *= proj / cr(proj.norm());
        }
        singular_values.push(values[i]);
        u.set_column(filled, &uu);
        vt.set_row(filled, &v.adjoint());
        filled += 1;
    }
    let rank_like = filled;
    if rank_like < k {
        // Remaining slots carry sigma = 0: pull the null directions out of
        // the zero-eigenvalue block (x-parts span ker A, y-parts ker A^H).
        let zero_cols: Vec<usize> =
            (0..n).filter(|&i| values[i].abs() <= split).collect();
        let mut xs = CMatrix::zeros(nc, zero_cols.len());
        let mut ys = CMatrix::zeros(nr, zero_cols.len());
        for (c, &i) in zero_cols.iter().enumerate() {
            for r in 0..nc {
                xs[(r, c)] = vectors[(r, i)];
            }
            for r in 0..nr {
                ys[(r, c)] = vectors[(nc + r, i)];
            }
        }
        let right = orthonormal_columns(&xs, k - rank_like);
        let left = orthonormal_columns(&ys, k - rank_like);
        for (slot, j) in (rank_like..k).enumerate() {
            singular_values.push(0.0);
            vt.set_row(j, &right.column(slot).adjoint());
            u.set_column(j, &left.column(slot));
        }
    }
    Svd { u, singular_values, vt }
}

/// Extracts `want` orthonormal columns from the span of `cols` by pivoted
/// Gram-Schmidt with re-orthogonalisation.
fn orthonormal_columns(cols: &CMatrix, want: usize) -> CMatrix {
    let dim = cols.nrows();
    let mut out: Vec<CVector> = Vec::with_capacity(want);
    while out.len() < want {
        let mut best: Option<(f64, CVector)> = None;
        for i in 0..cols.ncols() {
            let mut v: CVector = cols.column(i).into_owned();
            for _ in 0..2 {
                for b in &out {
                    let coeff = b.dotc(&v);
                    v -= b * coeff;
                }
            }
            let n = v.norm();
            if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
                best = Some((n, v));
            }
        }
        let (n, mut v) = best.expect("non-empty candidate set");
        assert!(
            n > 1e-10,
            "orthonormal extraction stalled: wanted {want} from a rank-deficient set"
        );
        v /= cr(n);
        fix_phase(&mut v);
        out.push(v);
    }
    if out.is_empty() {
        CMatrix::zeros(dim, 0)
    } else {
        CMatrix::from_columns(&out)
    }
}

/// Rank of a singular value list at the [`TAU_RANK`] tolerance, refusing to
/// decide when a singular value falls in the gray zone around the cutoff.
pub fn rank_from_singular_values(sv: &[f64], max_dim: usize) -> Result<usize> {
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let cutoff = TAU_RANK * sigma_max * max_dim as f64;
    for &s in sv {
        if s > cutoff / RANK_GRAY_ZONE && s < cutoff * RANK_GRAY_ZONE {
            return Err(Error::RankAmbiguous { value: s, cutoff });
        }
    }
    Ok(sv.iter().filter(|&&s| s >= cutoff).count())
}

pub fn rank(m: &CMatrix) -> Result<usize> {
    let dec = svd(m);
    rank_from_singular_values(&dec.singular_values, m.nrows().max(m.ncols()))
}

/// Orthonormal basis of the right null space (kernel) of `m`, as columns.
pub fn null_space(m: &CMatrix) -> Result<CMatrix> {
    let (nr, nc) = m.shape();
    if nc == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if nr == 0 {
        return Ok(CMatrix::identity(nc, nc));
    }
    let dec = svd(m);
    let r = rank_from_singular_values(&dec.singular_values, nr.max(nc))?;
    let k = dec.singular_values.len();
    let mut basis = CMatrix::zeros(nc, nc - r);
    // Rows r..k of vt span the kernel directions found by the SVD; when
    // nc > k the remaining directions are not represented and must be
    // completed. For nc <= nr (k == nc) this never happens.
    if nc <= k {
        for (out, row) in (r..k).enumerate() {
            let mut v: CVector = dec.vt.row(row).adjoint();
            fix_phase(&mut v);
            basis.set_column(out, &v);
        }
        return Ok(basis);
    }
    // Wide matrix: complete {rows of vt} to a basis of C^nc and keep the
    // orthogonal complement of the row space.
    let mut complement = orthonormal_complement(&dec.vt.adjoint(), nc)?;
    let mut cols: Vec<CVector> = Vec::with_capacity(nc - r);
    for row in r..k {
        let mut v: CVector = dec.vt.row(row).adjoint();
        fix_phase(&mut v);
        cols.push(v);
    }
    for i in 0..complement.ncols() {
        let mut v: CVector = complement.column(i).into_owned();
        fix_phase(&mut v);
        cols.push(v);
    }
    complement = CMatrix::from_columns(&cols);
    debug_assert_eq!(complement.ncols(), nc - r);
    Ok(complement)
}

/// Orthonormal basis (columns) of the orthogonal complement of span(cols)
/// inside C^dim: greedy pivoted Gram-Schmidt over the standard basis with
/// re-orthogonalisation, always returning exactly `dim - cols.ncols()`
/// vectors.
fn orthonormal_complement(cols: &CMatrix, dim: usize) -> Result<CMatrix> {
    let needed = dim - cols.ncols();
    if needed == 0 {
        return Ok(CMatrix::zeros(dim, 0));
    }
    let basis: Vec<CVector> =
        (0..cols.ncols()).map(|i| cols.column(i).into_owned()).collect();
    let mut out: Vec<CVector> = Vec::with_capacity(needed);
    let residual = |i: usize, out: &[CVector]| -> CVector {
        let mut v = CVector::zeros(dim);
        v[i] = cr(1.0);
        for _ in 0..2 {
            for b in basis.iter().chain(out.iter()) {
                let coeff = b.dotc(&v);
                v -= b * coeff;
            }
        }
        v
    };
    while out.len() < needed {
        // Pivot: the standard basis vector farthest from the current span.
        let mut best: Option<(f64, CVector)> = None;
        for i in 0..dim {
            let v = residual(i, &out);
            let n = v.norm();
            if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
                best = Some((n, v));
            }
        }
        let (n, v) = best.expect("dim > 0");
        if n <= 1e-8 {
            return Err(Error::DimensionMismatch(format!(
                "orthonormal completion stalled at {} of {} vectors",
                out.len(),
                needed
            )));
        }
        out.push(v / cr(n));
    }
    Ok(CMatrix::from_columns(&out))
}

/// Largest singular value; 0 for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    svd(m).singular_values.first().copied().unwrap_or(0.0)
}

/// Largest absolute entry; 0 for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian square root of a positive semi-definite matrix. Eigenvalues
/// below `-neg_tol` are rejected; eigenvalues below the rank cutoff (noise
/// around zero) are clamped to zero, so the square root annihilates exactly
/// the directions that count as the kernel.
pub fn hermitian_sqrt_psd(m: &CMatrix, neg_tol: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let lambda_max = values.last().copied().unwrap_or(0.0).max(0.0);
    let zero_cutoff = TAU_RANK * lambda_max * n.max(1) as f64;
    let mut d = CMatrix::zeros(n, n);
    for (i, &lambda) in values.iter().enumerate() {
        if lambda < -neg_tol {
            return Err(Error::BadProblem(format!(
                "matrix is not positive semi-definite: eigenvalue {lambda:.3e}"
            )));
        }
        let clamped = if lambda <= zero_cutoff { 0.0 } else { lambda };
        d[(i, i)] = cr(clamped.sqrt());
    }
    Ok(&vectors * d * vectors.adjoint())
}

/// Removes every entry within `tol` of `value` from a sorted list.
pub fn remove_near(list: &[f64], value: f64, tol: f64) -> Vec<f64> {
    list.iter().copied().filter(|x| (x - value).abs() > tol).collect()
}

/// Matches two multisets of reals by sorted pairing at an absolute tolerance.
/// Returns the first offending pair on failure.
pub fn multiset_match(a: &[f64], b: &[f64], tol: f64) -> std::result::Result<(), (Option<f64>, Option<f64>)> {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let n = a.len().max(b.len());
    for i in 0..n {
        match (a.get(i), b.get(i)) {
            (Some(&x), Some(&y)) => {
                if (x - y).abs() > tol {
                    return Err((Some(x), Some(y)));
                }
            }
            (x, y) => return Err((x.copied(), y.copied())),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_incidence_row() {
        // Row (-1, 1): kernel is the constant direction.
        let m = CMatrix::from_row_slice(1, 2, &[cr(-1.0), cr(1.0)]);
        let ns = null_space(&m).unwrap();
        assert_eq!(ns.ncols(), 1);
        let v = ns.column(0);
        assert!((v[0] - v[1]).norm() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_of_wide_zero_block() {
        // 1x3 zero matrix: kernel is all of C^3 even though the SVD only
        // carries one right singular vector.
        let m = CMatrix::zeros(1, 3);
        let ns = null_space(&m).unwrap();
        assert_eq!(ns.ncols(), 3);
        let gram = ns.adjoint() * &ns;
        assert!(max_abs(&(&gram - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn rank_gray_zone_is_reported() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = cr(1.0);
        m[(1, 1)] = cr(5e-10); // cutoff = 2e-10, gray zone (2e-12, 2e-8)
        assert!(matches!(rank(&m), Err(Error::RankAmbiguous { .. })));
    }

    #[test]
    fn sqrt_of_psd_matrix() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]);
        let s = hermitian_sqrt_psd(&m, 1e-9).unwrap();
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }

    #[test]
    fn multiset_match_reports_first_mismatch() {
        assert!(multiset_match(&[1.0, 2.0], &[2.0, 1.0 + 1e-12], 1e-9).is_ok());
        let err = multiset_match(&[1.0], &[1.5], 1e-9).unwrap_err();
        assert_eq!(err, (Some(1.0), Some(1.5)));
    }
}
